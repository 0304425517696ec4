"""Problem files and result records: the interchange layer behind the CLI.

A problem is a JSON object {"kind": ..., "payload": {...}} with a strict
per-kind schema; unknown keys are rejected by name so typos surface at parse
time.  Results are plain JSON with stable key order, so identical problems
yield byte-identical records apart from the version field.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Dict, List, Optional

from . import __version__
from .arrangement import (
    Arrangement,
    h2_rank,
    intersection_lattice,
    mobius_table,
    os_ranks,
    poincare_polynomial,
)
from .critical import critical_system, find_critical_points
from .errors import ParseError, ShapeError
from .exprparse import parse_exp_poly_family, parse_poly, parse_poly_family
from .factorization import (
    MatrixFactorization,
    disk_algebra_dims,
    hmf_hom_dims,
    verify_factorization,
)
from .koszul import koszul_cohomology_dims
from .poly import (
    GREVLEX,
    AffineFrame,
    CompleteIntersectionFrame,
    HypersurfaceFrame,
    MonomialOrder,
    buchberger,
    jacobi_ideal,
    quotient_basis,
)
from .theta import ThetaSeriesParams, theta_identity_report

KINDS = (
    "jacobi",
    "koszul",
    "critical",
    "mf-verify",
    "mf-hom",
    "mf-disk",
    "arrangement",
    "theta",
)


@dataclass(frozen=True)
class ProblemSpec:
    kind: str
    payload: Dict[str, Any]


@dataclass(frozen=True)
class ResultRecord:
    kind: str
    inputs: Dict[str, Any]
    outputs: Dict[str, Any]
    diagnostics: Dict[str, Any]
    version: str = __version__

    def to_json(self, indent: Optional[int] = 2) -> str:
        payload = {
            "kind": self.kind,
            "inputs": self.inputs,
            "outputs": self.outputs,
            "diagnostics": self.diagnostics,
            "version": self.version,
        }
        return json.dumps(payload, sort_keys=True, indent=indent)


def _reject_unknown(obj: dict, allowed, context: str):
    for key in obj:
        if key not in allowed:
            raise ParseError(f"unknown key {key!r} in {context}")


def _require(obj: dict, keys, context: str):
    for key in keys:
        if key not in obj:
            raise ParseError(f"missing key {key!r} in {context}")


_MF_KEYS = {"r0", "r1", "A", "B", "W", "nvars"}


def _validate_mf(obj, context: str):
    if not isinstance(obj, dict):
        raise ParseError(f"{context} must be an object")
    _reject_unknown(obj, _MF_KEYS, context)
    _require(obj, ("r0", "r1", "A", "B", "W"), context)
    r0, r1 = obj["r0"], obj["r1"]
    if not (isinstance(r0, int) and isinstance(r1, int) and r0 >= 0 and r1 >= 0):
        raise ParseError(f"{context}: r0 and r1 must be non-negative integers")
    for name, rows, cols, M in (("A", r1, r0, obj["A"]), ("B", r0, r1, obj["B"])):
        if not isinstance(M, list) or len(M) != rows or any(
            not isinstance(r, list) or len(r) != cols for r in M
        ):
            raise ShapeError(
                f"{context}: block {name} must be a {rows}x{cols} matrix of expressions"
            )


def _validate_payload(kind: str, payload: dict):
    ctx = f"payload of kind {kind!r}"
    if not isinstance(payload, dict):
        raise ParseError(f"{ctx} must be an object")
    if kind == "jacobi":
        _reject_unknown(payload, {"W", "nvars", "frame", "order", "degree_cap"}, ctx)
        _require(payload, ("W",), ctx)
        frame = payload.get("frame", "affine")
        if isinstance(frame, dict):
            _reject_unknown(frame, {"hypersurface", "complete_intersection"}, "frame")
            if "hypersurface" in frame:
                _reject_unknown(frame["hypersurface"], {"f"}, "hypersurface frame")
                _require(frame["hypersurface"], ("f",), "hypersurface frame")
            elif "complete_intersection" in frame:
                ci = frame["complete_intersection"]
                _reject_unknown(ci, {"constraints", "tangent_fields"}, "complete_intersection frame")
                _require(ci, ("constraints", "tangent_fields"), "complete_intersection frame")
            else:
                raise ParseError("frame object must name hypersurface or complete_intersection")
        elif frame != "affine":
            raise ParseError(f"unknown frame {frame!r}")
    elif kind == "koszul":
        _reject_unknown(payload, {"W", "nvars", "caps"}, ctx)
        _require(payload, ("W", "caps"), ctx)
    elif kind == "critical":
        _reject_unknown(
            payload, {"f", "W", "nvars", "box", "grid", "tol", "max_iter"}, ctx
        )
        _require(payload, ("f", "W", "box", "grid"), ctx)
    elif kind == "mf-verify":
        _reject_unknown(payload, {"factorization"}, ctx)
        _require(payload, ("factorization",), ctx)
        _validate_mf(payload["factorization"], "factorization")
    elif kind == "mf-hom":
        _reject_unknown(payload, {"a1", "a2", "caps"}, ctx)
        _require(payload, ("a1", "a2"), ctx)
        _validate_mf(payload["a1"], "a1")
        _validate_mf(payload["a2"], "a2")
    elif kind == "mf-disk":
        _reject_unknown(payload, {"a", "caps", "jacobi_cap"}, ctx)
        _require(payload, ("a",), ctx)
        _validate_mf(payload["a"], "a")
    elif kind == "arrangement":
        _reject_unknown(payload, {"forms", "report"}, ctx)
        _require(payload, ("forms",), ctx)
        report = payload.get("report", "all")
        if report not in ("poincare", "mobius", "os", "h2", "all"):
            raise ParseError(f"unknown report {report!r}")
    elif kind == "theta":
        _reject_unknown(payload, {"samples", "tol", "seed", "n_max", "precision"}, ctx)
    else:
        raise ParseError(f"unknown problem kind {kind!r}")


def parse_problem(text: str) -> ProblemSpec:
    """Strictly validated problem file; errors carry line/column positions
    for JSON syntax and name the offending key otherwise."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, exc.lineno, exc.colno) from None
    if not isinstance(data, dict):
        raise ParseError("problem file must contain a JSON object")
    _reject_unknown(data, {"kind", "payload"}, "problem")
    _require(data, ("kind", "payload"), "problem")
    kind = data["kind"]
    if kind not in KINDS:
        raise ParseError(f"unknown problem kind {kind!r}")
    _validate_payload(kind, data["payload"])
    return ProblemSpec(kind, data["payload"])


def serialize_problem(spec: ProblemSpec) -> str:
    return json.dumps({"kind": spec.kind, "payload": spec.payload}, sort_keys=True, indent=2)


# -- dispatch -------------------------------------------------------------------


def _mf_from_payload(obj) -> MatrixFactorization:
    texts = [obj["W"]]
    for M in (obj["A"], obj["B"]):
        for row in M:
            texts.extend(row)
    polys = parse_poly_family(texts, obj.get("nvars"))
    W = polys[0]
    rest = polys[1:]
    r0, r1 = obj["r0"], obj["r1"]
    A = []
    k = 0
    for _ in range(r1):
        A.append(tuple(rest[k : k + r0]))
        k += r0
    B = []
    for _ in range(r0):
        B.append(tuple(rest[k : k + r1]))
        k += r1
    return MatrixFactorization(r0, r1, tuple(A), tuple(B), W)


def _mf_outputs(report) -> Dict[str, Any]:
    return {
        "ok": report.ok,
        "residual_ba": [[p.to_string() for p in row] for row in report.residual_ba],
        "residual_ab": [[p.to_string() for p in row] for row in report.residual_ab],
    }


def _complex_pair(z: complex):
    return [z.real, z.imag]


def _run_jacobi(payload) -> ResultRecord:
    nvars = payload.get("nvars")
    frame_spec = payload.get("frame", "affine")
    order = MonomialOrder(payload.get("order", "grevlex"))
    cap = payload.get("degree_cap", 64)
    if frame_spec == "affine":
        W = parse_poly(payload["W"], nvars)
        frame = AffineFrame()
    elif "hypersurface" in frame_spec:
        W, f = parse_poly_family([payload["W"], frame_spec["hypersurface"]["f"]], nvars)
        frame = HypersurfaceFrame(f)
    else:
        ci = frame_spec["complete_intersection"]
        texts = [payload["W"]] + list(ci["constraints"])
        flat_fields: List[str] = []
        for field_vec in ci["tangent_fields"]:
            flat_fields.extend(field_vec)
        polys = parse_poly_family(texts + flat_fields, nvars)
        W = polys[0]
        ncons = len(ci["constraints"])
        constraints = tuple(polys[1 : 1 + ncons])
        n = W.nvars
        fields = []
        k = 1 + ncons
        for field_vec in ci["tangent_fields"]:
            fields.append(tuple(polys[k : k + len(field_vec)]))
            k += len(field_vec)
        for vec in fields:
            if len(vec) != n:
                raise ShapeError("tangent field length must equal the variable count")
        frame = CompleteIntersectionFrame(constraints, tuple(fields))
    ideal = jacobi_ideal(W, frame)
    gb = buchberger(ideal, order)
    qb = quotient_basis(gb, cap)
    outputs = {
        "dimension": "infinite" if qb.infinite else qb.dimension,
        "standard_monomials": None
        if qb.infinite
        else [list(m.exps) for m in qb.standard_monomials],
        "groebner_size": len(gb.basis),
        "generators": [g.to_string() for g in ideal.generators],
    }
    return ResultRecord(
        "jacobi",
        dict(payload),
        outputs,
        {"order": order.kind, "degree_cap": cap},
    )


def _run_koszul(payload) -> ResultRecord:
    W = parse_poly(payload["W"], payload.get("nvars"))
    caps = list(payload["caps"])
    report = koszul_cohomology_dims(W, caps)
    return ResultRecord(
        "koszul", dict(payload), report.to_json_dict(), {"caps": caps}
    )


def _run_critical(payload) -> ResultRecord:
    f, W = parse_exp_poly_family([payload["f"], payload["W"]], payload.get("nvars"))
    sys = critical_system(f, W)
    tol = payload.get("tol", 1e-10)
    box = payload["box"]
    pts = find_critical_points(sys, box, payload["grid"], tol, payload.get("max_iter", 80))
    outputs = {
        "count": len(pts),
        "degenerate": sys.degenerate,
        "points": [
            {
                "coordinates": [_complex_pair(z) for z in p.coordinates],
                "residual": p.residual,
                "multiplicity_hint": p.multiplicity_hint,
            }
            for p in pts
        ],
    }
    return ResultRecord(
        "critical", dict(payload), outputs, {"grid": payload["grid"], "tol": tol}
    )


def _run_arrangement(payload) -> ResultRecord:
    forms = []
    for row in payload["forms"]:
        forms.append(tuple(Fraction(str(x)) for x in row))
    if not forms:
        raise ParseError("arrangement needs at least one form")
    arr = Arrangement(len(forms[0]), tuple(forms))
    report = payload.get("report", "all")
    outputs: Dict[str, Any] = {}
    if report in ("poincare", "all"):
        outputs["poincare"] = poincare_polynomial(arr)
    if report in ("mobius", "all"):
        L = intersection_lattice(arr)
        mob = mobius_table(L)
        outputs["mobius"] = [
            {
                "codim": flat.codim,
                "hyperplanes": sorted(flat.hyperplanes),
                "mu": mob.values[i],
            }
            for i, flat in enumerate(L.flats)
        ]
    if report in ("os", "all"):
        outputs["os_ranks"] = os_ranks(arr)
    if report in ("h2", "all"):
        rank = h2_rank(arr)
        outputs["h2_rank"] = rank
        outputs["supports_nontrivial_elementary"] = rank > 0
    return ResultRecord("arrangement", dict(payload), outputs, {"report": report})


def _run_theta(payload) -> ResultRecord:
    params = ThetaSeriesParams(
        n_max=payload.get("n_max", 8), precision=payload.get("precision", 53)
    )
    report = theta_identity_report(
        samples=payload.get("samples", 100),
        tol=payload.get("tol", 1e-8),
        seed=payload.get("seed", 0),
        params=params,
    )
    outputs = {
        "ok": report.ok,
        "max_residuals": {
            "periodicity": report.periodicity,
            "quasi_periodicity": report.quasi_periodicity,
            "zero_value": report.zero_value,
            "wtilde_period_z1": report.wtilde_period_z1,
            "wtilde_period_z2": report.wtilde_period_z2,
            "chart_identity": report.chart_identity,
        },
    }
    return ResultRecord(
        "theta",
        dict(payload),
        outputs,
        {"samples": report.samples, "tol": report.tol, "n_max": params.n_max},
    )


def run(problem: ProblemSpec) -> ResultRecord:
    """Dispatch a validated problem to its owning module."""
    payload = problem.payload
    if problem.kind == "jacobi":
        return _run_jacobi(payload)
    if problem.kind == "koszul":
        return _run_koszul(payload)
    if problem.kind == "critical":
        return _run_critical(payload)
    if problem.kind == "mf-verify":
        mf = _mf_from_payload(payload["factorization"])
        return ResultRecord(
            "mf-verify", dict(payload), _mf_outputs(verify_factorization(mf)), {}
        )
    if problem.kind == "mf-hom":
        a1 = _mf_from_payload(payload["a1"])
        a2 = _mf_from_payload(payload["a2"])
        caps = payload.get("caps", [4, 6, 8])
        hd = hmf_hom_dims(a1, a2, caps)
        outputs = {
            "even_dim": hd.even_dim,
            "odd_dim": hd.odd_dim,
            "stabilized": hd.stabilized,
        }
        return ResultRecord("mf-hom", dict(payload), outputs, {"caps": caps})
    if problem.kind == "mf-disk":
        a = _mf_from_payload(payload["a"])
        caps = payload.get("caps", [6, 8])
        rep = disk_algebra_dims(a, caps, payload.get("jacobi_cap", 64))
        outputs = {
            "predicted": rep.predicted,
            "direct": rep.direct,
            "equal": rep.equal,
            "jacobi_dim": rep.jacobi_dim,
            "self_hom": {"even": rep.hom.even_dim, "odd": rep.hom.odd_dim},
            "direct_even": rep.direct_even,
            "direct_odd": rep.direct_odd,
            "stabilized": rep.stabilized,
        }
        return ResultRecord("mf-disk", dict(payload), outputs, {"caps": caps})
    if problem.kind == "arrangement":
        return _run_arrangement(payload)
    if problem.kind == "theta":
        return _run_theta(payload)
    raise ParseError(f"unknown problem kind {problem.kind!r}")
