"""Command-line front end: one subcommand per problem kind.

Results are JSON on stdout (or --out).  Exit codes: 0 success, 2 parse or
input error, 3 inconclusive computation, 4 resource limit exceeded.
"""

from __future__ import annotations

import argparse
import sys
from fractions import Fraction
from typing import List, Optional

from .errors import (
    InconclusiveError,
    ParseError,
    ResourceLimitError,
    ShapeError,
    SteinLGError,
    StripError,
)
from .problems import ProblemSpec, ResultRecord, parse_problem, run

EXIT_PARSE = 2
EXIT_INCONCLUSIVE = 3
EXIT_RESOURCE = 4


def _parse_box(text: str):
    boxes = []
    for chunk in text.split(";"):
        parts = [float(x) for x in chunk.split(",")]
        if len(parts) != 4:
            raise ParseError("each box needs re_lo,re_hi,im_lo,im_hi")
        boxes.append(tuple(parts))
    return boxes[0] if len(boxes) == 1 else boxes


def _parse_caps(text: str) -> List[int]:
    return [int(x) for x in text.split(",")]


def _read_arrangement_file(path: str):
    forms = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            forms.append([str(Fraction(tok)) for tok in line.split()])
    return forms


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="steinlg",
        description="Exact and numeric invariants of Landau-Ginzburg data on Stein manifolds",
    )
    parser.add_argument("--out", help="write the JSON result to this file")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run a problem file")
    p_run.add_argument("problem", help="path to a JSON problem file")

    p_jac = sub.add_parser("jacobi", help="quotient basis of a critical ideal")
    p_jac.add_argument("--W", required=True)
    p_jac.add_argument("--nvars", type=int)
    p_jac.add_argument("--hypersurface-f", dest="hyp_f")
    p_jac.add_argument("--order", default="grevlex", choices=["lex", "grlex", "grevlex"])
    p_jac.add_argument("--cap", type=int, default=64)

    p_kos = sub.add_parser("koszul", help="truncated contraction-complex cohomology")
    p_kos.add_argument("--W", required=True)
    p_kos.add_argument("--nvars", type=int)
    p_kos.add_argument("--caps", default="4,6,8")

    p_cri = sub.add_parser("critical", help="multistart critical points on a hypersurface")
    p_cri.add_argument("--f", required=True)
    p_cri.add_argument("--W", required=True)
    p_cri.add_argument("--nvars", type=int)
    p_cri.add_argument("--box", default="-3,3,-3,3", help="re_lo,re_hi,im_lo,im_hi[;per-variable]")
    p_cri.add_argument("--grid", type=int, default=5)
    p_cri.add_argument("--tol", type=float, default=1e-10)
    p_cri.add_argument("--max-iter", type=int, default=80)

    p_mf = sub.add_parser("mf", help="matrix factorization operations")
    p_mf.add_argument("action", choices=["verify", "hom", "disk"])
    p_mf.add_argument("file", help="JSON description of the factorization(s)")
    p_mf.add_argument("--caps")

    p_arr = sub.add_parser("arrangement", help="central hyperplane arrangement invariants")
    p_arr.add_argument("--file", required=True, help="one rational linear form per line")
    p_arr.add_argument(
        "--report", default="all", choices=["poincare", "mobius", "os", "h2", "all"]
    )

    p_th = sub.add_parser("theta", help="theta-function identity suite")
    p_th.add_argument("action", choices=["check"])
    p_th.add_argument("--samples", type=int, default=100)
    p_th.add_argument("--tol", type=float, default=1e-8)
    p_th.add_argument("--seed", type=int, default=0)
    p_th.add_argument("--n-max", type=int, default=8)

    return parser


def _spec_from_args(args) -> ProblemSpec:
    if args.command == "run":
        with open(args.problem, "r", encoding="utf-8") as fh:
            return parse_problem(fh.read())
    if args.command == "jacobi":
        payload = {"W": args.W, "order": args.order, "degree_cap": args.cap}
        if args.nvars:
            payload["nvars"] = args.nvars
        if args.hyp_f:
            payload["frame"] = {"hypersurface": {"f": args.hyp_f}}
        return ProblemSpec("jacobi", payload)
    if args.command == "koszul":
        payload = {"W": args.W, "caps": _parse_caps(args.caps)}
        if args.nvars:
            payload["nvars"] = args.nvars
        return ProblemSpec("koszul", payload)
    if args.command == "critical":
        payload = {
            "f": args.f,
            "W": args.W,
            "box": _parse_box(args.box),
            "grid": args.grid,
            "tol": args.tol,
            "max_iter": args.max_iter,
        }
        if args.nvars:
            payload["nvars"] = args.nvars
        return ProblemSpec("critical", payload)
    if args.command == "mf":
        import json as _json

        with open(args.file, "r", encoding="utf-8") as fh:
            try:
                data = _json.load(fh)
            except _json.JSONDecodeError as exc:
                raise ParseError(exc.msg, exc.lineno, exc.colno) from None
        if args.action == "verify":
            payload = {"factorization": data}
            kind = "mf-verify"
        elif args.action == "hom":
            payload = dict(data)
            kind = "mf-hom"
        else:
            payload = {"a": data} if "a" not in data else dict(data)
            kind = "mf-disk"
        if args.caps:
            payload["caps"] = _parse_caps(args.caps)
        spec_text = ProblemSpec(kind, payload)
        return parse_problem(serialize(spec_text))
    if args.command == "arrangement":
        payload = {"forms": _read_arrangement_file(args.file), "report": args.report}
        return ProblemSpec("arrangement", payload)
    if args.command == "theta":
        payload = {
            "samples": args.samples,
            "tol": args.tol,
            "seed": args.seed,
            "n_max": args.n_max,
        }
        return ProblemSpec("theta", payload)
    raise ParseError(f"unknown command {args.command!r}")


def serialize(spec: ProblemSpec) -> str:
    from .problems import serialize_problem

    return serialize_problem(spec)


def main(argv: Optional[List[str]] = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        spec = _spec_from_args(args)
        record = run(spec)
    except (ParseError, ShapeError, StripError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except InconclusiveError as exc:
        print(f"inconclusive: {exc}", file=sys.stderr)
        return EXIT_INCONCLUSIVE
    except ResourceLimitError as exc:
        print(f"resource limit: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except SteinLGError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    text = record.to_json()
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
