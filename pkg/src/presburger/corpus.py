"""Curated classification corpus: formula, variable order, expected verdict.

Shared by the acceptance suite and the CLI selftest. Each entry classifies
with full witness verification; the expected verdicts are fixed by hand.
"""

from __future__ import annotations

GROUP = "group_definable"
ORDER = "defines_ordering"

# (name, formula text, variables, expected verdict)
CORPUS: list[tuple[str, str, tuple[str, ...], str]] = [
    ("nonnegatives", "0 <= x", ("x",), ORDER),
    ("evens", "x = 0 mod 2", ("x",), GROUP),
    ("mixed_residue_rays", "(x <= 0 & x = 0 mod 2) | (0 <= x & x = 1 mod 2)", ("x",), ORDER),
    ("triangle", "0 <= y & y <= x", ("x", "y"), ORDER),
    ("residue_band", "x <= y & y <= x + 6 & y = x mod 3", ("x", "y"), GROUP),
    ("triple_graph", "y = 3*x", ("x", "y"), GROUP),
    ("odd_fibers", "y = 1 mod 2", ("x", "y"), GROUP),
    ("cone_3d", "0 <= z & z <= x & z <= y", ("x", "y", "z"), ORDER),
    ("lattice_slab_3d", "x <= z & z <= x + 4 & z = 0 mod 2 & y = 0 mod 3", ("x", "y", "z"), GROUP),
    ("singleton", "x = 5", ("x",), GROUP),
    ("punctured_line", "!(x = 0)", ("x",), GROUP),
    ("union_of_cosets", "x = 1 mod 2 | x = 0 mod 4", ("x",), GROUP),
    ("finite_set", "x = 2 | x = 5 | x = -3", ("x",), GROUP),
    ("ray_with_hole", "5 <= x & !(x = 8)", ("x",), ORDER),
    ("half_plane", "x + y <= 3", ("x", "y"), ORDER),
    ("diagonal", "y = x", ("x", "y"), GROUP),
    ("parallel_graphs", "y = x + 5 | y = x - 5", ("x", "y"), GROUP),
    ("double_band", "(x <= y & y <= x + 2) | (x + 7 <= y & y <= x + 9)", ("x", "y"), GROUP),
    ("product_lattice", "x = 0 mod 2 & y = 1 mod 3", ("x", "y"), GROUP),
    ("punctured_diagonal", "y = x & !(x = 0)", ("x", "y"), GROUP),
    ("quantified_triangle", "E z. (y = z + z & 0 <= z & z <= x)", ("x", "y"), ORDER),
    ("full_plane", "0 = 0", ("x", "y"), GROUP),
    ("empty_set", "x < x", ("x",), GROUP),
    ("fiberwise_mixed_rays", "(y <= 0 & y = 0 mod 2) | (0 <= y & y = 1 mod 2)", ("x", "y"), ORDER),
    ("halving_graph", "y + y = x", ("x", "y"), GROUP),
    ("punctured_plane", "!(x = 0 & y = 0)", ("x", "y"), GROUP),
    ("diagonal_slab_3d", "x + y <= z & z <= x + y + 6 & z = 1 mod 2", ("x", "y", "z"), GROUP),
    ("cone_sum_3d", "0 <= z & z <= x + y", ("x", "y", "z"), ORDER),
    ("coset_plus_point", "x = 0 mod 3 | x = 1", ("x",), GROUP),
    ("odd_by_quantifier", "E y. x = y + y + 1", ("x",), GROUP),
]
