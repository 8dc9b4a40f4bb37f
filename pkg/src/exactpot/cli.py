"""Command-line front end.

Exit codes: 0 ok, 1 exactness failure off the degenerate set (a bug signal),
2 input error, 3 precondition refused (operator not of constant rank).
"""
from __future__ import annotations

import argparse
import json
import os
import sys
import warnings
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import catalog
from .algebra import matrix_to_json, poly_to_json
from .construction import (
    DiffOperator,
    InvalidOperatorError,
    decell_pseudoinverse_symbolic,
    potential,
)
from .spectral import (
    GridField,
    NotConstantRankError,
    apply_symbol,
    decomposition_report,
    frequencies,
    helmholtz_decompose,
    random_bandlimited,
)
from .verification import constant_rank_scan

EXIT_OK, EXIT_INEXACT, EXIT_INPUT, EXIT_REFUSED = 0, 1, 2, 3


class InputError(Exception):
    pass


def _emit(obj) -> None:
    sys.stdout.write(json.dumps(obj, indent=2) + "\n")


def _row_lines(text: str) -> list[int]:
    """Line numbers (1-based) where each row of the "entries" array starts."""
    start = text.find('"entries"')
    if start < 0:
        return []
    i = text.find("[", start)
    depth, in_str, lines = 0, False, []
    while 0 <= i < len(text):
        ch = text[i]
        if in_str:
            if ch == "\\":
                i += 1
            elif ch == '"':
                in_str = False
        elif ch == '"':
            in_str = True
        elif ch == "[":
            depth += 1
            if depth == 2:
                lines.append(text.count("\n", 0, i) + 1)
        elif ch == "]":
            depth -= 1
            if depth == 0:
                break
        i += 1
    return lines


def load_operator(source: str) -> DiffOperator:
    if source in catalog.list_ids():
        return catalog.get(source).operator
    path = Path(source)
    if not path.is_file():
        raise InputError(f"{source}: neither a catalog id ({', '.join(catalog.list_ids())}) "
                         "nor a readable file")
    text = path.read_text()
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as e:
        raise InputError(f"{source}:{e.lineno}:{e.colno}: {e.msg}") from None
    try:
        op = catalog.operator_from_json(obj)
    except (ValueError, TypeError, KeyError) as e:
        msg = str(e)
        line = 1
        rows = _row_lines(text)
        if msg.startswith("row ") and rows:
            k = int(msg.split()[1].rstrip(":"))
            line = rows[min(k, len(rows) - 1)]
        elif rows:
            line = rows[0]
        raise InputError(f"{source}:{line}: {msg}") from None
    if not op.name:
        op = DiffOperator(op.symbol, op.row_degrees, op.col_degrees, path.stem)
    return op


def _parse_point(s: str) -> list[Fraction]:
    try:
        return [Fraction(x.strip()) for x in s.split(",")]
    except ValueError:
        raise InputError(f"bad point {s!r}; expected comma-separated rationals") from None


def _frac(x) -> str:
    return f"{x.numerator}/{x.denominator}"


def cmd_construct(args) -> int:
    A = load_operator(args.operator)
    res = potential(A, reduce_content=args.reduce_content)
    scan = constant_rank_scan(A, args.samples, args.seed, result=res)
    out = {"operator": A.name}
    out.update(res.to_json())
    out["nominal_degree"] = res.nominal_degree
    out["constant_rank"] = scan.constant_rank_verdict
    out["warnings"] = []
    if scan.constant_rank_verdict == "no":
        w = f"not constant rank: rank drops at xi = ({', '.join(scan.drop_witnesses[0])})"
        out["warnings"].append(w)
        print(f"warning: {w}", file=sys.stderr)
    _emit(out)
    return EXIT_OK


def cmd_verify(args) -> int:
    A = load_operator(args.operator)
    report = constant_rank_scan(A, args.samples, args.seed)
    _emit(report.to_json())
    return EXIT_OK if report.exact else EXIT_INEXACT


def cmd_pinv(args) -> int:
    A = load_operator(args.operator)
    pinv = decell_pseudoinverse_symbolic(A.symbol)
    out = {
        "operator": A.name,
        "numerator": matrix_to_json(pinv.numerator),
        "denominator": poly_to_json(pinv.denominator),
    }
    if args.point:
        pt = _parse_point(args.point)
        if len(pt) != A.n:
            raise InputError(f"point has {len(pt)} coordinates, operator has n={A.n}")
        P = A.symbol.evaluate(pt)
        try:
            X = pinv.evaluate(pt)
        except ZeroDivisionError:
            out["at"] = {"point": [_frac(x) for x in pt], "value": None,
                         "note": "denominator vanishes; point outside the maximal-rank set"}
        else:
            out["at"] = {"point": [_frac(x) for x in pt],
                         "value": [[_frac(x) for x in r] for r in X],
                         "penrose": _penrose_exact(P, X)}
    _emit(out)
    return EXIT_OK


def _penrose_exact(P, X) -> dict:
    def mul(a, b):
        return [[sum(a[i][k] * b[k][j] for k in range(len(b))) for j in range(len(b[0]))]
                for i in range(len(a))]

    def T(a):
        return [list(r) for r in zip(*a)]

    PX, XP = mul(P, X), mul(X, P)
    return {
        "XPX=X": mul(XP, X) == X,
        "PXP=P": mul(PX, P) == P,
        "PX symmetric": T(PX) == PX,
        "XP symmetric": T(XP) == XP,
    }


def _input_field(args, A: DiffOperator) -> GridField:
    shape = (args.grid,) * A.n
    if args.field == "random":
        return random_bandlimited(shape, A.N, args.band, args.seed)
    if args.field == "gradient":
        if A.N != A.n:
            raise InputError(f"gradient field needs N = n, operator has N={A.N}, n={A.n}")
        phi = random_bandlimited(shape, 1, args.band, args.seed)
        kappa = frequencies(shape)
        coeffs = 2j * np.pi * kappa * phi.fourier()
        return GridField.from_fourier(coeffs)
    path = Path(args.field)
    if not path.is_file():
        raise InputError(f"{args.field}: not 'random', 'gradient' or a readable file")
    try:
        if path.suffix == ".csv":
            return GridField.from_csv(path.read_text())
        return GridField.load(path)
    except (ValueError, OSError) as e:
        raise InputError(f"{args.field}: {e}") from None


def cmd_project(args) -> int:
    A = load_operator(args.operator)
    res = potential(A)
    v = _input_field(args, A)
    if v.channels != A.N or v.n != A.n:
        raise InputError(f"field is {v.n}-dimensional with {v.channels} channels; "
                         f"operator needs n={A.n}, N={A.N}")
    try:
        v1, v2, u = helmholtz_decompose(A, res, v)
    except NotConstantRankError as e:
        print(f"refused: {e}", file=sys.stderr)
        return EXIT_REFUSED
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for name, f in (("v1", v1), ("v2", v2), ("u", u)):
        f.save(out / f"{name}.grid")
    report = {"operator": A.name, "grid": list(v.shape), "seed": args.seed,
              "files": ["v1.grid", "v2.grid", "u.grid"]}
    report.update(decomposition_report(A, res, v, v1, v2, u))
    (out / "report.json").write_text(json.dumps(report, indent=2) + "\n")
    _emit(report)
    return EXIT_OK


def cmd_catalog(args) -> int:
    if args.export:
        sys.stdout.write(catalog.export(args.export) + "\n")
        return EXIT_OK
    _emit([{"id": i, "notes": catalog.get(i, verify=False).notes,
            "constant_rank_expected": catalog.get(i, verify=False).constant_rank_expected}
           for i in catalog.list_ids()])
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="exactpot", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def operator_arg(sp):
        sp.add_argument("--operator", required=True, help="catalog id or operator JSON file")

    sp = sub.add_parser("construct", help="build the potential B of an operator")
    operator_arg(sp)
    sp.add_argument("--reduce-content", action="store_true",
                    help="divide B by the rational content of its entries")
    sp.add_argument("--samples", type=int, default=200)
    sp.add_argument("--seed", type=int, default=0)
    sp.set_defaults(func=cmd_construct)

    sp = sub.add_parser("verify", help="sampled exactness and constant-rank scan")
    operator_arg(sp)
    sp.add_argument("--samples", type=int, default=1000)
    sp.add_argument("--seed", type=int, default=0)
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("pinv", help="symbolic Moore-Penrose inverse of the symbol")
    operator_arg(sp)
    sp.add_argument("--point", help="evaluate exactly at this point, e.g. 1,2,1/3")
    sp.set_defaults(func=cmd_pinv)

    sp = sub.add_parser("project", help="periodic decomposition v = v1 + v2, v1 = B u")
    operator_arg(sp)
    sp.add_argument("--field", default="random",
                    help="'random', 'gradient', or a .grid/.csv file")
    sp.add_argument("--grid", type=int, default=32)
    sp.add_argument("--band", type=int, default=4)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--out", default="project_out")
    sp.set_defaults(func=cmd_project)

    sp = sub.add_parser("catalog", help="list built-in operators or export one")
    sp.add_argument("--export", metavar="ID")
    sp.set_defaults(func=cmd_catalog)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if getattr(args, "samples", 1) < 1:
        print("error: --samples must be >= 1", file=sys.stderr)
        return EXIT_INPUT
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            return args.func(args)
    except (InputError, InvalidOperatorError, catalog.CatalogError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
