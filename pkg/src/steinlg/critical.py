"""Critical-locus systems for hypersurfaces with transcendental defining data,
and multistart Newton root finding.

Expressions mix polynomials with exponentials of expressions (entire functions
only), kept in an expanded canonical form: a sum of terms, each a complex
coefficient times a sorted product of atom powers, where an atom is a variable
or exp(expression).  Canonical form makes structural identities like the
tangency relation cancel exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .errors import ShapeError
from .poly import Poly

# atoms: ("var", k) or ("exp", ExpPoly)


def _atom_key(atom):
    kind, payload = atom
    if kind == "var":
        return (0, payload)
    return (1, payload.key)


def _atom_eq(a, b):
    return _atom_key(a) == _atom_key(b)


class ExpPoly:
    """Canonical exponential-polynomial expression in nvars variables."""

    __slots__ = ("nvars", "terms", "_key")

    def __init__(self, nvars: int, terms: Iterable[Tuple[complex, tuple]]):
        merged = {}
        order = {}
        for coeff, factors in terms:
            coeff = complex(coeff)
            factors = tuple(sorted(factors, key=lambda f: _atom_key(f[0])))
            fkey = tuple((_atom_key(a), p) for a, p in factors)
            if fkey in merged:
                c0, _ = merged[fkey]
                merged[fkey] = (c0 + coeff, factors)
            else:
                merged[fkey] = (coeff, factors)
                order[fkey] = len(order)
        cleaned = [
            (c, f) for (c, f) in (merged[k] for k in sorted(merged, key=lambda k: k))
            if c != 0
        ]
        object.__setattr__(self, "nvars", nvars)
        object.__setattr__(self, "terms", tuple(cleaned))
        object.__setattr__(self, "_key", None)

    def __setattr__(self, name, value):
        raise AttributeError("ExpPoly is immutable")

    # -- constructors --------------------------------------------------------

    @classmethod
    def constant(cls, c, nvars: int) -> "ExpPoly":
        return cls(nvars, [(complex(c), ())])

    @classmethod
    def variable(cls, i: int, nvars: int) -> "ExpPoly":
        if not 0 <= i < nvars:
            raise ShapeError(f"variable index {i} out of range for {nvars} vars")
        return cls(nvars, [(1.0, ((("var", i), 1),))])

    @classmethod
    def from_poly(cls, p: Poly) -> "ExpPoly":
        terms = []
        for m, c in p.terms.items():
            factors = tuple((("var", i), e) for i, e in enumerate(m.exps) if e)
            terms.append((c.to_complex(), factors))
        return cls(p.nvars, terms)

    # -- structure ------------------------------------------------------------

    @property
    def key(self):
        k = self._key
        if k is None:
            k = (
                self.nvars,
                tuple(
                    (c.real, c.imag, tuple((_atom_key(a), p) for a, p in f))
                    for c, f in self.terms
                ),
            )
            object.__setattr__(self, "_key", k)
        return k

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other):
        return isinstance(other, ExpPoly) and self.key == other.key

    def __hash__(self):
        return hash(self.key)

    # -- arithmetic ------------------------------------------------------------

    def _check(self, other):
        if self.nvars != other.nvars:
            raise ShapeError("variable count mismatch")

    def __add__(self, other: "ExpPoly") -> "ExpPoly":
        self._check(other)
        return ExpPoly(self.nvars, list(self.terms) + list(other.terms))

    def __sub__(self, other: "ExpPoly") -> "ExpPoly":
        return self + (-other)

    def __neg__(self) -> "ExpPoly":
        return ExpPoly(self.nvars, [(-c, f) for c, f in self.terms])

    def __mul__(self, other) -> "ExpPoly":
        if isinstance(other, (int, float, complex)):
            return ExpPoly(self.nvars, [(c * other, f) for c, f in self.terms])
        self._check(other)
        out = []
        for c1, f1 in self.terms:
            for c2, f2 in other.terms:
                out.append((c1 * c2, _merge_factors(f1, f2)))
        return ExpPoly(self.nvars, out)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "ExpPoly":
        if k < 0:
            raise ValueError("negative power")
        out = ExpPoly.constant(1.0, self.nvars)
        for _ in range(k):
            out = out * self
        return out

    # -- calculus ---------------------------------------------------------------

    def derivative(self, var: int) -> "ExpPoly":
        out: List[Tuple[complex, tuple]] = []
        for coeff, factors in self.terms:
            for idx, (atom, power) in enumerate(factors):
                rest = factors[:idx] + factors[idx + 1 :]
                if power > 1:
                    rest = _merge_factors(rest, ((atom, power - 1),))
                kind, payload = atom
                if kind == "var":
                    if payload != var:
                        continue
                    out.append((coeff * power, rest))
                else:
                    inner = payload.derivative(var)
                    if inner.is_zero:
                        continue
                    with_exp = _merge_factors(rest, ((atom, 1),))
                    for ci, fi in inner.terms:
                        out.append((coeff * power * ci, _merge_factors(with_exp, fi)))
        return ExpPoly(self.nvars, out)

    # -- evaluation ----------------------------------------------------------------

    def eval(self, point, cache=None):
        """Evaluate at complex scalars or elementwise over numpy arrays.

        cache maps exp-atom keys to already computed values so repeated
        exponentials across a system are evaluated once per point batch.
        """
        if cache is None:
            cache = {}
        total = None
        for coeff, factors in self.terms:
            v = coeff
            for (kind, payload), power in factors:
                if kind == "var":
                    base = point[payload]
                else:
                    key = payload.key
                    base = cache.get(key)
                    if base is None:
                        base = np.exp(payload.eval(point, cache))
                        cache[key] = base
                v = v * base**power
            total = v if total is None else total + v
        if total is None:
            shape = np.shape(point[0]) if len(point) else ()
            return np.zeros(shape, dtype=complex) if shape else 0j
        return total

    def eval_scalar(self, point: Sequence[complex]) -> complex:
        if len(point) != self.nvars:
            raise ShapeError("evaluation point has wrong length")
        return complex(self.eval(tuple(point)))

    # -- display --------------------------------------------------------------------

    def to_string(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for c, factors in self.terms:
            bits = []
            for (kind, payload), p in factors:
                s = f"x{payload+1}" if kind == "var" else f"exp({payload.to_string()})"
                bits.append(s if p == 1 else f"{s}^{p}")
            body = "*".join(bits)
            if not body:
                parts.append(_fmt_complex(c))
            elif c == 1:
                parts.append(body)
            elif c == -1:
                parts.append(f"-{body}")
            else:
                parts.append(f"{_fmt_complex(c)}*{body}")
        return " + ".join(parts).replace("+ -", "- ")

    def __repr__(self):
        return f"ExpPoly({self.to_string()})"


def _fmt_complex(c: complex) -> str:
    if c.imag == 0:
        v = c.real
        return str(int(v)) if v == int(v) else repr(v)
    return f"({c.real}{c.imag:+}i)"


def _merge_factors(f1: tuple, f2: tuple) -> tuple:
    out = list(f1)
    for atom, p in f2:
        for i, (a2, p2) in enumerate(out):
            if _atom_eq(atom, a2):
                out[i] = (a2, p2 + p)
                break
        else:
            out.append((atom, p))
    return tuple(out)


def exp_of(e: ExpPoly) -> ExpPoly:
    """exp applied to an expression, as a new atom."""
    return ExpPoly(e.nvars, [(1.0, ((("exp", e), 1),))])


def derivative(e: ExpPoly, var: int) -> ExpPoly:
    """Symbolic partial derivative with chain rule on exp nodes."""
    return e.derivative(var)


@dataclass(frozen=True)
class ExpPolySystem:
    equations: tuple
    nvars: int
    zero_rows: tuple = ()

    def __post_init__(self):
        for e in self.equations:
            if e.nvars != self.nvars:
                raise ShapeError("equation variable count mismatch")

    @property
    def degenerate(self) -> bool:
        """All rows beyond the first are identically zero."""
        return len(self.equations) > 1 and len(self.zero_rows) == len(self.equations) - 1

    def jacobian(self):
        return [
            [eq.derivative(j) for j in range(self.nvars)] for eq in self.equations
        ]

    def residual(self, point) -> float:
        return max(abs(eq.eval_scalar(point)) for eq in self.equations)


def tangent_generators_hypersurface(f: ExpPoly, N: int) -> List[tuple]:
    """The N(N-1)/2 antisymmetric tangent fields of the hypersurface f = 0:
    for i < j the field has d_j(f) in slot i, -d_i(f) in slot j, zeros
    elsewhere, so it annihilates f identically."""
    if N < 2:
        raise ShapeError("need at least two variables")
    if f.nvars != N:
        raise ShapeError("f has wrong variable count")
    df = [f.derivative(k) for k in range(N)]
    zero = ExpPoly.constant(0.0, N)
    fields = []
    for i in range(N):
        for j in range(i + 1, N):
            v = [zero] * N
            v[i] = df[j]
            v[j] = -df[i]
            fields.append(tuple(v))
    return fields


def critical_system(f: ExpPoly, W_ambient: ExpPoly) -> ExpPolySystem:
    """Defining equations of the critical locus of W restricted to {f = 0}:
    f itself plus d_i(W) d_j(f) - d_j(W) d_i(f) over i < j."""
    if f.nvars != W_ambient.nvars:
        raise ShapeError("f and W have different variable counts")
    n = f.nvars
    df = [f.derivative(k) for k in range(n)]
    dW = [W_ambient.derivative(k) for k in range(n)]
    eqs = [f]
    zero_rows = []
    for i in range(n):
        for j in range(i + 1, n):
            e = dW[i] * df[j] - dW[j] * df[i]
            if e.is_zero:
                zero_rows.append(len(eqs))
            eqs.append(e)
    return ExpPolySystem(tuple(eqs), n, tuple(zero_rows))


@dataclass(frozen=True)
class CriticalPoint:
    coordinates: tuple
    residual: float
    multiplicity_hint: int = 1
    iterations: int = 0


@dataclass(frozen=True)
class NewtonResult:
    converged: bool
    point: Optional[CriticalPoint]
    reason: str
    iterations: int


def _lstsq_step(J: np.ndarray, r: np.ndarray):
    sol, _, rank, _ = np.linalg.lstsq(J, r, rcond=None)
    return sol, rank


def newton_solve(
    sys: ExpPolySystem,
    seed: Sequence[complex],
    tol: float = 1e-10,
    max_iter: int = 60,
) -> NewtonResult:
    """Damped-free complex Newton (Gauss-Newton when overdetermined).

    The full holomorphic Jacobian is used; overdetermined systems are solved
    through least squares on the residual.  Deterministic for a fixed seed.
    """
    n = sys.nvars
    if len(sys.equations) < n:
        raise ShapeError("system must be square or overdetermined")
    if len(seed) != n:
        raise ShapeError("seed has wrong length")
    jac = sys.jacobian()
    x = np.array([complex(z) for z in seed], dtype=complex)
    steps: List[float] = []
    for it in range(max_iter):
        point = tuple(complex(z) for z in x)
        r = np.array([eq.eval_scalar(point) for eq in sys.equations])
        res = float(np.abs(r).max()) if len(r) else 0.0
        if not np.isfinite(res) or np.abs(x).max() > 1e8:
            return NewtonResult(False, None, "diverged", it)
        if res < tol:
            return NewtonResult(
                True,
                CriticalPoint(point, res, _rate_to_multiplicity(steps), it),
                "converged",
                it,
            )
        J = np.array([[d.eval_scalar(point) for d in row] for row in jac])
        dx, rank = _lstsq_step(J, -r)
        if rank < n:
            return NewtonResult(False, None, "singular jacobian", it)
        if not np.all(np.isfinite(dx)):
            return NewtonResult(False, None, "diverged", it)
        x = x + dx
        steps.append(float(np.abs(dx).max()))
    return NewtonResult(False, None, "max_iter exceeded", max_iter)


def _rate_to_multiplicity(steps: List[float]) -> int:
    """Quadratic step decay reads as a simple root; a linear ratio r
    estimates multiplicity 1/(1-r).  Heuristic only."""
    tail = [s for s in steps[-4:] if s > 0]
    if len(tail) < 2:
        return 1
    ratios = [b / a for a, b in zip(tail, tail[1:]) if a > 0]
    if not ratios:
        return 1
    r = ratios[-1]
    if r < 0.2:
        return 1
    return max(2, round(1.0 / max(1e-3, 1.0 - min(r, 0.95))))


def _normalize_box(box, nvars: int):
    if box and isinstance(box[0], (int, float)):
        box = [tuple(box)] * nvars
    box = [tuple(map(float, b)) for b in box]
    if len(box) != nvars:
        raise ShapeError("box must give (re_lo, re_hi, im_lo, im_hi) per variable")
    for re_lo, re_hi, im_lo, im_hi in box:
        if re_lo > re_hi or im_lo > im_hi:
            raise ShapeError("box bounds out of order")
    return box

def _axis_values(lo: float, hi: float, grid: int) -> np.ndarray:
    if lo == hi:
        return np.array([lo])
    return np.unique(np.linspace(lo, hi, grid))


def find_critical_points(
    sys: ExpPolySystem,
    box,
    grid: int,
    tol: float = 1e-10,
    max_iter: int = 80,
) -> List[CriticalPoint]:
    """Newton from every grid seed in the complex box, deduplicated and
    sorted lexicographically by (re, im) of the coordinates.

    Seeds are iterated as one vectorized batch; the merge order makes the
    result deterministic.  The origin is residual-checked explicitly whenever
    the box contains it.
    """
    if grid < 1:
        raise ShapeError("grid must be >= 1")
    n = sys.nvars
    box = _normalize_box(box, n)
    jac = sys.jacobian()

    axes = []
    for re_lo, re_hi, im_lo, im_hi in box:
        rs = _axis_values(re_lo, re_hi, grid)
        ims = _axis_values(im_lo, im_hi, grid)
        axes.append((rs[:, None] + 1j * ims[None, :]).ravel())
    mesh = np.meshgrid(*axes, indexing="ij")
    X = np.stack([m.ravel() for m in mesh], axis=1)

    m = len(sys.equations)
    # seeds that wander this far from the box never contribute an in-box
    # solution; cutting them early keeps the batch small
    span = max(max(abs(v) for v in b) for b in box)
    escape = 2.0 * span + 5.0

    def eval_all(pts):
        cols = [pts[:, j] for j in range(n)]
        cache = {}
        R = np.empty((len(pts), m), dtype=complex)
        for i, expr in enumerate(sys.equations):
            v = expr.eval(cols, cache)
            R[:, i] = v if np.ndim(v) else complex(v)
        J = np.empty((len(pts), m, n), dtype=complex)
        for i, row in enumerate(jac):
            for j, expr in enumerate(row):
                v = expr.eval(cols, cache)
                J[:, i, j] = v if np.ndim(v) else complex(v)
        return R, J

    active = np.ones(len(X), dtype=bool)
    last_step = np.zeros(len(X))
    prev_step = np.zeros(len(X))
    converged = np.zeros(len(X), dtype=bool)
    with np.errstate(all="ignore"):
        for _ in range(max_iter):
            if not active.any():
                break
            idx = np.where(active)[0]
            pts = X[idx]
            far = (np.abs(pts.real).max(axis=1) > escape) | (
                np.abs(pts.imag).max(axis=1) > escape
            )
            if far.any():
                active[idx[far]] = False
                idx = idx[~far]
                if len(idx) == 0:
                    continue
                pts = X[idx]
            R, J = eval_all(pts)
            res = np.abs(R).max(axis=1)
            finite = np.isfinite(res)
            done = finite & (res < tol)
            converged[idx[done]] = True
            active[idx[done | ~finite]] = False
            keep = finite & ~done
            if not keep.any():
                continue
            sub = idx[keep]
            Jk = J[keep]
            H = np.einsum("nij,nik->njk", Jk.conj(), Jk)
            g = np.einsum("nij,ni->nj", Jk.conj(), R[keep])
            det = np.linalg.det(H)
            solvable = np.isfinite(det) & (np.abs(det) > 1e-300)
            dx = np.zeros_like(g)
            if solvable.any():
                dx[solvable] = np.linalg.solve(
                    H[solvable], g[solvable][..., None]
                )[..., 0]
            bad = ~solvable | ~np.all(np.isfinite(dx), axis=1)
            active[sub[bad]] = False
            ok = sub[~bad]
            X[ok] -= dx[~bad]
            prev_step[ok] = last_step[ok]
            last_step[ok] = np.abs(dx[~bad]).max(axis=1)

    def in_box(point) -> bool:
        eps = 1e-9
        return all(
            b[0] - eps <= z.real <= b[1] + eps and b[2] - eps <= z.imag <= b[3] + eps
            for z, b in zip(point, box)
        )

    candidates = []
    for i in np.where(converged)[0]:
        point = tuple(complex(z) for z in X[i])
        if not in_box(point):
            continue
        res = sys.residual(point)
        if res < tol:
            ratio = last_step[i] / prev_step[i] if prev_step[i] > 0 else 0.0
            hint = 1 if ratio < 0.2 else max(2, round(1.0 / max(1e-3, 1.0 - min(ratio, 0.95))))
            candidates.append(CriticalPoint(point, res, hint))

    origin = tuple(0j for _ in range(n))
    if all(b[0] <= 0 <= b[1] and b[2] <= 0 <= b[3] for b in box):
        res0 = sys.residual(origin)
        if res0 < tol:
            candidates.append(CriticalPoint(origin, res0, 1))

    def sort_key(cp: CriticalPoint):
        return tuple((z.real, z.imag) for z in cp.coordinates)

    candidates.sort(key=sort_key)
    merged: List[CriticalPoint] = []
    for cp in candidates:
        dup_at = None
        for k, kept in enumerate(merged):
            dist = max(
                abs(a - b) for a, b in zip(cp.coordinates, kept.coordinates)
            )
            if dist < 10 * tol:
                dup_at = k
                break
        if dup_at is None:
            merged.append(cp)
        else:
            kept = merged[dup_at]
            if cp.residual < kept.residual or cp.multiplicity_hint > kept.multiplicity_hint:
                merged[dup_at] = CriticalPoint(
                    kept.coordinates,
                    min(kept.residual, cp.residual),
                    max(kept.multiplicity_hint, cp.multiplicity_hint),
                )
    return merged
