"""Command-line surface: classify, qe, cells, decompose, rank, inradius,
eval, selftest.

Exit codes: 0 success (for classify: verification passed), 1 usage or parse
errors, 2 verification failure. With --format json every result, including
errors, is a single JSON document with a top-level "schema": "1" field;
output is deterministic for fixed flags and seed.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from fractions import Fraction
from typing import Optional

from . import __version__
from .arith import IntMatrix
from .cells import decompose as cell_decompose
from .classifier import classify as run_classify
from .corpus import CORPUS
from .formula import Formula, ParseError, free_vars, parse, render, simplify
from .gen import (
    random_group_formula,
    random_matrix,
    random_qe_instance,
    random_qf,
    random_unimodular,
)
from .groupsets import from_boolean_combination, to_formula
from .oracle import Box, DEFAULT_CONFIG, EvalConfig, UnknownError, equiv_on_box, set_on_box
from .polyhedra import (
    AffineFunctional,
    HalfSpace,
    Polyhedron,
    inradius_bounds,
    inradius_infinite,
    is_empty,
    opposite_system,
)
from .qe import decide_equiv, eliminate

SCHEMA = "1"


class CliError(ValueError):
    pass


def _emit(args, payload: dict, text_lines: list[str]) -> None:
    if args.format == "json":
        payload = {"schema": SCHEMA, **payload}
        print(json.dumps(payload, sort_keys=True, separators=(",", ":")))
    else:
        for line in text_lines:
            print(line)


def _read_formula(args) -> Formula:
    if args.formula is not None and args.file is not None:
        raise CliError("pass either --formula or --file, not both")
    if args.formula is not None:
        text = args.formula
    elif args.file is not None:
        with open(args.file, "r", encoding="utf-8") as fh:
            text = fh.read()
    else:
        raise CliError("one of --formula or --file is required")
    return parse(text)


def _read_vars(args, f: Formula) -> list[str]:
    if args.vars:
        vars = [v.strip() for v in args.vars.split(",") if v.strip()]
    else:
        raise CliError("--vars is required (the last variable is the fiber variable)")
    missing = free_vars(f) - set(vars)
    if missing:
        raise CliError(f"--vars does not cover free variables {sorted(missing)}")
    return vars


def _cfg(args) -> EvalConfig:
    if args.qbound is not None:
        return EvalConfig(quantifier_bound=args.qbound)
    return DEFAULT_CONFIG


def _cmd_classify(args) -> int:
    f = _read_formula(args)
    vars = _read_vars(args, f)
    result = run_classify(f, vars)
    payload = result.to_json()
    payload["formula"] = render(f)
    payload["vars"] = vars
    ok = bool(result.report.get("ok"))
    _emit(
        args,
        payload,
        [
            f"verdict: {result.verdict}",
            f"witness: {render(result.witness)}",
            f"verification: {'pass' if ok else 'FAIL'} ({result.report})",
        ],
    )
    return 0 if ok else 2


def _cmd_qe(args) -> int:
    f = _read_formula(args)
    g = simplify(eliminate(f))
    _emit(
        args,
        {"input": render(f), "eliminated": render(g)},
        [render(g)],
    )
    return 0


def _cmd_cells(args) -> int:
    f = _read_formula(args)
    vars = _read_vars(args, f)
    g = simplify(eliminate(f))
    d = cell_decompose(g, vars)
    payload = d.to_json()
    payload["formula"] = render(f)
    _emit(
        args,
        payload,
        [f"{len(d.terms)} cell term(s) over {vars}"]
        + [
            f"  base={t['base']!r} lower={t['lower']} upper={t['upper']} "
            f"residue={t['residue']} mod={t['modulus']}"
            for t in payload["terms"]
        ],
    )
    return 0


def _cmd_decompose(args) -> int:
    f = _read_formula(args)
    vars = _read_vars(args, f)
    gs = from_boolean_combination(simplify(eliminate(f)), vars)
    payload = gs.to_json()
    payload["formula"] = render(f)
    payload["rank"] = gs.rank()
    _emit(
        args,
        payload,
        [f"rank {gs.rank()}, {len(gs.pieces)} quasi-coset(s)", json.dumps(payload["pieces"])],
    )
    return 0


def _cmd_rank(args) -> int:
    f = _read_formula(args)
    vars = _read_vars(args, f)
    gs = from_boolean_combination(simplify(eliminate(f)), vars)
    _emit(args, {"rank": gs.rank()}, [str(gs.rank())])
    return 0


def _parse_halfspaces(text: str, dims: int) -> Polyhedron:
    names = ["x", "y", "z", "w"][:dims] if dims <= 4 else [f"x{i+1}" for i in range(dims)]
    halves = []
    for chunk in text.split(";"):
        chunk = chunk.strip()
        if not chunk:
            continue
        atom = parse(chunk)
        from .formula import Le, Lt

        if not isinstance(atom, (Le, Lt)):
            raise CliError(f"half-space {chunk!r} must be a single <= or < comparison")
        d = atom.lhs - atom.rhs  # d <= 0 resp. d < 0
        unknown = d.vars() - set(names)
        if unknown:
            raise CliError(f"half-space {chunk!r} uses unknown variables {sorted(unknown)}")
        coeffs = [Fraction(d.coeff(n)) for n in names]
        fn = AffineFunctional(tuple(coeffs), Fraction(d.const))
        halves.append(HalfSpace(fn, "-", isinstance(atom, Le)))
    return Polyhedron(dims, tuple(halves))


def _cmd_inradius(args) -> int:
    if not args.halfspaces:
        raise CliError("--halfspaces is required (semicolon-separated comparisons)")
    p = _parse_halfspaces(args.halfspaces, args.dims)
    if is_empty(p):
        _emit(args, {"inradius": "empty"}, ["empty"])
        return 0
    if inradius_infinite(p):
        _emit(args, {"inradius": "infinite"}, ["infinite"])
        return 0
    lo, hi = inradius_bounds(p)
    _emit(
        args,
        {"inradius": "finite", "lo": str(lo), "hi": str(hi)},
        [f"finite: {lo} <= r <= {hi}"],
    )
    return 0


def _cmd_eval(args) -> int:
    f = _read_formula(args)
    vars = _read_vars(args, f)
    box = Box.cube(vars, args.box)
    pts = set_on_box(f, box, cfg=_cfg(args))
    _emit(
        args,
        {"vars": vars, "box": args.box, "count": len(pts), "points": [list(p) for p in pts]},
        [f"{len(pts)} point(s) in [{-args.box}, {args.box}]^{len(vars)}"]
        + [" ".join(str(c) for c in p) for p in pts],
    )
    return 0


def _selftest_normal_forms(rng: random.Random, n: int) -> dict:
    from .arith import hnf, lattice_hnf_basis, snf

    failures = 0
    for _ in range(n):
        m = random_matrix(rng, rng.randint(1, 4), rng.randint(1, 4), 50)
        h, u = hnf(m)
        d, us, vs = snf(m)
        diag = [d.entries[i][i] for i in range(min(d.rows, d.cols))]
        ok = (
            u @ m == h
            and abs(u.det()) == 1
            and us @ m @ vs == d
            and abs(us.det()) == 1
            and abs(vs.det()) == 1
            and all(b % a == 0 for a, b in zip(diag, diag[1:]) if a)
            and all(x >= 0 for x in diag)
        )
        w = random_unimodular(rng, m.rows)
        ok = ok and lattice_hnf_basis(m) == lattice_hnf_basis(w @ m)
        failures += 0 if ok else 1
    return {"cases": n, "failures": failures}


def _selftest_qe(rng: random.Random, n: int) -> dict:
    from .formula import is_quantifier_free

    failures = 0
    for _ in range(n):
        f = random_qe_instance(rng)
        g = eliminate(f)
        ok = is_quantifier_free(g)
        fv = sorted(f.free_vars() | g.free_vars())
        if ok and fv:
            ok = equiv_on_box(f, g, Box.cube(fv, 10), cfg=EvalConfig(quantifier_bound=60)) is None
        failures += 0 if ok else 1
    return {"cases": n, "failures": failures}


def _selftest_cells(rng: random.Random, n: int) -> dict:
    failures = 0
    for _ in range(n):
        k = rng.randint(2, 3)
        vars = ("x", "y", "z")[:k]
        f = random_qf(rng, vars, n_atoms=rng.randint(1, 3), coef_bound=2, const_bound=3, mod_bound=3)
        d = cell_decompose(f, vars)
        ok = equiv_on_box(f, d.semantics(), Box.cube(vars, 6)) is None
        failures += 0 if ok else 1
    return {"cases": n, "failures": failures}


def _selftest_groupsets(rng: random.Random, n: int) -> dict:
    failures = 0
    for _ in range(n):
        k = rng.randint(1, 2)
        vars = ("x", "y")[:k]
        f = random_group_formula(rng, vars, n_atoms=rng.randint(1, 3), coef_bound=2, const_bound=4, mod_bound=4)
        g = random_group_formula(rng, vars, n_atoms=1, coef_bound=2, const_bound=4, mod_bound=4)
        a = from_boolean_combination(f, vars)
        b = from_boolean_combination(g, vars)
        ok = a.union(b).rank() == max(a.rank(), b.rank())
        pts = set(set_on_box(f, Box.cube(vars, 7)))
        import itertools as it

        mine = {p for p in it.product(range(-7, 8), repeat=k) if a.contains(p)}
        ok = ok and pts == mine
        failures += 0 if ok else 1
    return {"cases": n, "failures": failures}


def _selftest_polyhedra(rng: random.Random, n: int) -> dict:
    failures = 0
    for _ in range(n):
        dim = rng.randint(1, 3)
        k = rng.randint(1, 4)
        fs = []
        for _ in range(k):
            coeffs = [rng.randint(-5, 5) for _ in range(dim)]
            if all(c == 0 for c in coeffs):
                coeffs[rng.randrange(dim)] = 1
            fs.append(AffineFunctional(tuple(Fraction(c) for c in coeffs), Fraction(0)))
        bs = [Fraction(rng.randint(-5, 5)) for _ in range(k)]
        flags = [rng.random() < 0.6 for _ in range(k)]
        p, m = opposite_system(fs, bs, flags)
        ok = inradius_infinite(p) == inradius_infinite(m)
        failures += 0 if ok else 1
    return {"cases": n, "failures": failures}


def _selftest_classifier(rng: random.Random, n: int) -> dict:
    failures = 0
    picks = list(CORPUS)[:n] if n < len(CORPUS) else list(CORPUS)
    for name, text, vars, expected in picks:
        r = run_classify(parse(text), list(vars))
        ok = r.verdict == expected and bool(r.report.get("ok"))
        failures += 0 if ok else 1
    return {"cases": len(picks), "failures": failures}


def _cmd_selftest(args) -> int:
    rng = random.Random(args.seed)
    suites = {
        "normal_forms": lambda: _selftest_normal_forms(rng, 60),
        "quantifier_elimination": lambda: _selftest_qe(rng, 40),
        "cell_decomposition": lambda: _selftest_cells(rng, 25),
        "group_sets": lambda: _selftest_groupsets(rng, 25),
        "polyhedra": lambda: _selftest_polyhedra(rng, 60),
        "classifier_corpus": lambda: _selftest_classifier(rng, len(CORPUS)),
    }
    matrix = {}
    all_ok = True
    lines = []
    for name, fn in suites.items():
        result = fn()
        result["pass"] = result["failures"] == 0
        all_ok = all_ok and result["pass"]
        matrix[name] = result
        lines.append(
            f"{'PASS' if result['pass'] else 'FAIL'} {name}: "
            f"{result['cases'] - result['failures']}/{result['cases']}"
        )
    _emit(args, {"seed": args.seed, "suites": matrix, "pass": all_ok}, lines)
    return 0 if all_ok else 2


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="presburger",
        description="Presburger toolkit: quantifier elimination, cells, coset "
        "algebra, polyhedron inradius, and the group-vs-order classifier.",
    )
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, needs_vars=True):
        p.add_argument("--formula", "-f", help="formula text")
        p.add_argument("--file", help="path to a UTF-8 file with one formula")
        if needs_vars:
            p.add_argument("--vars", help="comma-separated variable order (fiber variable last)")
        p.add_argument("--box", type=int, default=10, help="box radius for enumeration")
        p.add_argument("--qbound", type=int, default=None, help="quantifier bound override")
        p.add_argument("--format", choices=["json", "text"], default="json")
        p.add_argument("--seed", type=int, default=0, help="seed for randomized suites")

    p = sub.add_parser("classify", help="decide the dichotomy and verify the witness")
    common(p)
    p.set_defaults(fn=_cmd_classify)

    p = sub.add_parser("qe", help="eliminate quantifiers")
    common(p, needs_vars=False)
    p.set_defaults(fn=_cmd_qe)

    p = sub.add_parser("cells", help="cell decomposition of a quantifier-free formula")
    common(p)
    p.set_defaults(fn=_cmd_cells)

    p = sub.add_parser("decompose", help="quasi-coset decomposition of an order-free formula")
    common(p)
    p.set_defaults(fn=_cmd_decompose)

    p = sub.add_parser("rank", help="rank of the set of an order-free formula")
    common(p)
    p.set_defaults(fn=_cmd_rank)

    p = sub.add_parser("inradius", help="inscribed-ball status of a rational polyhedron")
    p.add_argument("--dims", type=int, required=True)
    p.add_argument("--halfspaces", help="semicolon-separated comparisons, e.g. 'x>=0;y>=0'")
    p.add_argument("--format", choices=["json", "text"], default="json")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(fn=_cmd_inradius)

    p = sub.add_parser("eval", help="enumerate satisfying points on a box")
    common(p)
    p.set_defaults(fn=_cmd_eval)

    p = sub.add_parser("selftest", help="run the randomized property suites")
    p.add_argument("--format", choices=["json", "text"], default="json")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(fn=_cmd_selftest)

    return ap


def main(argv: Optional[list[str]] = None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return 1 if exc.code not in (0, None) else 0
    try:
        return args.fn(args)
    except (CliError, ParseError, UnknownError, ValueError) as exc:
        payload = {"schema": SCHEMA, "error": str(exc), "kind": type(exc).__name__}
        if getattr(args, "format", "json") == "json":
            print(json.dumps(payload, sort_keys=True, separators=(",", ":")))
        else:
            print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
