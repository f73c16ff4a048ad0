"""Presburger arithmetic toolkit.

Parsing and evaluation of first-order formulas over (Z, +, -, 0, 1, <, mod),
quantifier elimination, cell decomposition, the coset algebra of
order-free-definable sets, polyhedron inradius decisions, and a classifier
that decides, with a checkable witness, whether a definable set is
order-free-definable or defines the ordering.
"""

__version__ = "0.1.0"
