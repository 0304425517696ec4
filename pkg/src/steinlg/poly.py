"""Multivariate polynomials over Gaussian rationals, Groebner bases, quotient
bases, and critical-ideal construction.

The quotient of the coordinate ring by a critical ideal is the bulk algebra of
the model; everything here serves computing a monomial basis of that quotient
exactly.  Laurent-type spaces are handled through complete-intersection
embeddings (x_1*...*x_{d+1} = 1), never through Laurent polynomials.
"""

from __future__ import annotations

import heapq
import os
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence, Union

from .errors import InconclusiveError, ResourceLimitError, ShapeError
from .scalars import GR_ONE, GR_ZERO, GaussianRational

DEFAULT_MAX_PAIRS = 200_000


def _max_pairs_limit() -> int:
    return int(os.environ.get("STEINLG_MAX_PAIRS", DEFAULT_MAX_PAIRS))


class Monomial:
    """Exponent vector of a power product; length equals the variable count."""

    __slots__ = ("exps",)

    def __init__(self, exps: Iterable[int]):
        exps = tuple(int(e) for e in exps)
        if any(e < 0 for e in exps):
            raise ValueError("negative exponent in monomial")
        object.__setattr__(self, "exps", exps)

    def __setattr__(self, name, value):
        raise AttributeError("Monomial is immutable")

    @property
    def degree(self) -> int:
        return sum(self.exps)

    @property
    def is_one(self) -> bool:
        return all(e == 0 for e in self.exps)

    def __mul__(self, other: "Monomial") -> "Monomial":
        return Monomial(a + b for a, b in zip(self.exps, other.exps))

    def divides(self, other: "Monomial") -> bool:
        return all(a <= b for a, b in zip(self.exps, other.exps))

    def __truediv__(self, other: "Monomial") -> "Monomial":
        if not other.divides(self):
            raise ValueError(f"{other} does not divide {self}")
        return Monomial(a - b for a, b in zip(self.exps, other.exps))

    def lcm(self, other: "Monomial") -> "Monomial":
        return Monomial(max(a, b) for a, b in zip(self.exps, other.exps))

    def gcd_is_one(self, other: "Monomial") -> bool:
        return all(min(a, b) == 0 for a, b in zip(self.exps, other.exps))

    def __eq__(self, other):
        return isinstance(other, Monomial) and self.exps == other.exps

    def __hash__(self):
        return hash(self.exps)

    def __repr__(self):
        return f"Monomial{self.exps}"


@dataclass(frozen=True)
class MonomialOrder:
    """A well-founded total order compatible with multiplication.

    kind is one of 'lex', 'grlex', 'grevlex'.  An optional variable
    permutation is applied before comparison, so x2 > x1 orders are available
    without rewriting polynomials.
    """

    kind: str = "grevlex"
    perm: Optional[tuple] = None

    def __post_init__(self):
        if self.kind not in ("lex", "grlex", "grevlex"):
            raise ValueError(f"unknown monomial order {self.kind!r}")

    def _permuted(self, exps):
        if self.perm is None:
            return exps
        return tuple(exps[p] for p in self.perm)

    def key(self, m: Monomial):
        e = self._permuted(m.exps)
        if self.kind == "lex":
            return e
        if self.kind == "grlex":
            return (sum(e), e)
        return (sum(e), tuple(-x for x in reversed(e)))

    def max(self, monomials):
        return max(monomials, key=self.key)


LEX = MonomialOrder("lex")
GRLEX = MonomialOrder("grlex")
GREVLEX = MonomialOrder("grevlex")


class Poly:
    """Sparse polynomial: Monomial -> GaussianRational, zero coefficients pruned."""

    __slots__ = ("terms", "nvars")

    def __init__(self, terms, nvars: int):
        pruned = {}
        for m, c in terms.items():
            if not isinstance(m, Monomial):
                m = Monomial(m)
            if len(m.exps) != nvars:
                raise ShapeError(f"monomial {m} has {len(m.exps)} vars, expected {nvars}")
            c = GaussianRational.from_value(c)
            if not c.is_zero:
                pruned[m] = c
        object.__setattr__(self, "terms", pruned)
        object.__setattr__(self, "nvars", nvars)

    def __setattr__(self, name, value):
        raise AttributeError("Poly is immutable")

    # -- constructors -------------------------------------------------------

    @classmethod
    def zero(cls, nvars: int) -> "Poly":
        return cls({}, nvars)

    @classmethod
    def constant(cls, c, nvars: int) -> "Poly":
        return cls({Monomial((0,) * nvars): GaussianRational.from_value(c)}, nvars)

    @classmethod
    def one(cls, nvars: int) -> "Poly":
        return cls.constant(1, nvars)

    @classmethod
    def variable(cls, i: int, nvars: int) -> "Poly":
        if not 0 <= i < nvars:
            raise ShapeError(f"variable index {i} out of range for {nvars} vars")
        exps = [0] * nvars
        exps[i] = 1
        return cls({Monomial(exps): GR_ONE}, nvars)

    # -- predicates ---------------------------------------------------------

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        if not self.terms:
            return -1
        return max(m.degree for m in self.terms)

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        if not isinstance(other, Poly):
            return NotImplemented
        return self.nvars == other.nvars and self.terms == other.terms

    def __hash__(self):
        return hash((self.nvars, frozenset((m, c.re, c.im) for m, c in self.terms.items())))

    # -- arithmetic ----------------------------------------------------------

    def _check(self, other: "Poly"):
        if self.nvars != other.nvars:
            raise ShapeError(f"variable count mismatch: {self.nvars} vs {other.nvars}")

    def __add__(self, other: "Poly") -> "Poly":
        self._check(other)
        out = dict(self.terms)
        for m, c in other.terms.items():
            s = out.get(m, GR_ZERO) + c
            if s.is_zero:
                out.pop(m, None)
            else:
                out[m] = s
        return Poly(out, self.nvars)

    def __sub__(self, other: "Poly") -> "Poly":
        self._check(other)
        out = dict(self.terms)
        for m, c in other.terms.items():
            s = out.get(m, GR_ZERO) - c
            if s.is_zero:
                out.pop(m, None)
            else:
                out[m] = s
        return Poly(out, self.nvars)

    def __neg__(self) -> "Poly":
        return Poly({m: -c for m, c in self.terms.items()}, self.nvars)

    def __mul__(self, other) -> "Poly":
        if isinstance(other, (int, GaussianRational)):
            c = GaussianRational.from_value(other)
            if c.is_zero:
                return Poly.zero(self.nvars)
            return Poly({m: a * c for m, a in self.terms.items()}, self.nvars)
        self._check(other)
        out = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = m1 * m2
                s = out.get(m, GR_ZERO) + c1 * c2
                if s.is_zero:
                    out.pop(m, None)
                else:
                    out[m] = s
        return Poly(out, self.nvars)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "Poly":
        if k < 0:
            raise ValueError("negative power of a polynomial")
        out = Poly.one(self.nvars)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def mul_term(self, mono: Monomial, coeff: GaussianRational) -> "Poly":
        return Poly({m * mono: c * coeff for m, c in self.terms.items()}, self.nvars)

    def diff(self, var: int) -> "Poly":
        out = {}
        for m, c in self.terms.items():
            e = m.exps[var]
            if e == 0:
                continue
            exps = list(m.exps)
            exps[var] = e - 1
            out[Monomial(exps)] = c * e
        return Poly(out, self.nvars)

    def evaluate(self, point: Sequence[complex]) -> complex:
        if len(point) != self.nvars:
            raise ShapeError("evaluation point has wrong length")
        total = 0j
        for m, c in self.terms.items():
            v = c.to_complex()
            for x, e in zip(point, m.exps):
                if e:
                    v *= x**e
            total += v
        return total

    # -- leading data --------------------------------------------------------

    def leading_monomial(self, order: MonomialOrder) -> Monomial:
        if self.is_zero:
            raise ValueError("zero polynomial has no leading monomial")
        return order.max(self.terms)

    def leading_coeff(self, order: MonomialOrder) -> GaussianRational:
        return self.terms[self.leading_monomial(order)]

    def monic(self, order: MonomialOrder) -> "Poly":
        lc = self.leading_coeff(order)
        return Poly({m: c / lc for m, c in self.terms.items()}, self.nvars)

    # -- display -------------------------------------------------------------

    def to_string(self, varnames: Optional[Sequence[str]] = None) -> str:
        if self.is_zero:
            return "0"
        if varnames is None:
            varnames = [f"x{i+1}" for i in range(self.nvars)]
        parts = []
        for m in sorted(self.terms, key=GREVLEX.key, reverse=True):
            c = self.terms[m]
            factors = [
                varnames[i] if e == 1 else f"{varnames[i]}^{e}"
                for i, e in enumerate(m.exps)
                if e
            ]
            if not factors:
                parts.append(str(c))
                continue
            body = "*".join(factors)
            if c == GR_ONE:
                parts.append(body)
            elif c == -GR_ONE:
                parts.append(f"-{body}")
            else:
                cs = str(c)
                if "+" in cs[1:] or "-" in cs[1:]:
                    cs = f"({cs})"
                parts.append(f"{cs}*{body}")
        s = " + ".join(parts)
        return s.replace("+ -", "- ")

    def __repr__(self):
        return f"Poly({self.to_string()})"


@dataclass(frozen=True)
class Ideal:
    """Finitely many polynomial generators in a common ambient ring."""

    generators: tuple
    nvars: int

    def __post_init__(self):
        gens = tuple(g for g in self.generators if not g.is_zero)
        for g in gens:
            if g.nvars != self.nvars:
                raise ShapeError("generator variable count mismatch")
        object.__setattr__(self, "generators", gens)


@dataclass(frozen=True)
class GroebnerBasis:
    basis: tuple
    order: MonomialOrder
    source: Ideal

    @property
    def nvars(self) -> int:
        return self.source.nvars

    def leading_monomials(self):
        return [g.leading_monomial(self.order) for g in self.basis]


@dataclass(frozen=True)
class QuotientBasis:
    """Monomial basis of the quotient ring, or the infinite marker."""

    infinite: bool
    dimension: Optional[int] = None
    standard_monomials: Optional[tuple] = None


# -- division and Buchberger -------------------------------------------------


def normal_form(p: Poly, gb: GroebnerBasis) -> Poly:
    """Remainder of p on division by the basis; no term of the result is
    divisible by any leading term, and p - result lies in the ideal."""
    if p.nvars != gb.nvars:
        raise ShapeError(f"polynomial has {p.nvars} vars, basis expects {gb.nvars}")
    order = gb.order
    divisors = [(g.leading_monomial(order), g.leading_coeff(order), g) for g in gb.basis]
    remainder = {}
    work = p
    while not work.is_zero:
        lm = work.leading_monomial(order)
        lc = work.terms[lm]
        for dm, dc, g in divisors:
            if dm.divides(lm):
                work = work - g.mul_term(lm / dm, lc / dc)
                break
        else:
            remainder[lm] = lc
            work = Poly({m: c for m, c in work.terms.items() if m != lm}, work.nvars)
    return Poly(remainder, p.nvars)


def _s_poly(f: Poly, g: Poly, order: MonomialOrder) -> Poly:
    mf, mg = f.leading_monomial(order), g.leading_monomial(order)
    l = mf.lcm(mg)
    return f.mul_term(l / mf, GR_ONE / f.terms[mf]) - g.mul_term(l / mg, GR_ONE / g.terms[mg])


def buchberger(ideal: Ideal, order: MonomialOrder = GREVLEX, max_pairs: Optional[int] = None) -> GroebnerBasis:
    """Buchberger's algorithm with the sugar selection strategy and a reduced
    basis as postprocessing.

    Deterministic: pairs are popped by (sugar, lcm order key, input indices)
    and all reductions walk the working basis in insertion order.  Raises
    ResourceLimitError once the processed-pair count exceeds the bound
    (argument, else STEINLG_MAX_PAIRS, else the built-in default).
    """
    limit = max_pairs if max_pairs is not None else _max_pairs_limit()
    basis = list(ideal.generators)
    if not basis:
        return GroebnerBasis((), order, ideal)
    sugars = [g.degree() for g in basis]

    def push_pair(heap, i, j):
        f, g = basis[i], basis[j]
        mf, mg = f.leading_monomial(order), g.leading_monomial(order)
        if mf.gcd_is_one(mg):
            return  # Buchberger's coprimality criterion
        l = mf.lcm(mg)
        sugar = max(
            sugars[i] + (l / mf).degree,
            sugars[j] + (l / mg).degree,
        )
        heapq.heappush(heap, (sugar, order.key(l), i, j))

    heap: list = []
    for j in range(len(basis)):
        for i in range(j):
            push_pair(heap, i, j)

    processed = 0
    while heap:
        processed += 1
        if processed > limit:
            raise ResourceLimitError(
                f"Buchberger pair budget exceeded ({limit}); raise STEINLG_MAX_PAIRS"
            )
        sugar, _, i, j = heapq.heappop(heap)
        s = _s_poly(basis[i], basis[j], order)
        interim = GroebnerBasis(tuple(basis), order, ideal)
        r = normal_form(s, interim)
        if r.is_zero:
            continue
        basis.append(r)
        sugars.append(max(sugar, r.degree()))
        k = len(basis) - 1
        for i2 in range(k):
            push_pair(heap, i2, k)

    return GroebnerBasis(_reduce_basis(basis, order), order, ideal)


def _reduce_basis(basis, order) -> tuple:
    monic = [g.monic(order) for g in basis if not g.is_zero]
    monic.sort(key=lambda g: order.key(g.leading_monomial(order)))
    # minimal: drop any element whose leading term another one divides
    minimal = []
    for g in monic:
        lm = g.leading_monomial(order)
        if any(h.leading_monomial(order).divides(lm) for h in minimal):
            continue
        minimal.append(g)
    # inter-reduce tails until stable
    changed = True
    while changed:
        changed = False
        for idx, g in enumerate(minimal):
            others = minimal[:idx] + minimal[idx + 1 :]
            if not others:
                continue
            r = normal_form(g, GroebnerBasis(tuple(others), order, Ideal((), g.nvars)))
            r = r.monic(order)
            if r != g:
                minimal[idx] = r
                changed = True
    minimal.sort(key=lambda g: order.key(g.leading_monomial(order)))
    return tuple(minimal)


# -- quotient bases -----------------------------------------------------------


def quotient_basis(gb: GroebnerBasis, degree_cap: int = 64) -> QuotientBasis:
    """Standard monomials under the staircase of the reduced basis.

    Infinite exactly when some variable has no pure power among the leading
    terms.  When finite, the staircase bound is sum_i (k_i - 1) with x_i^{k_i}
    the minimal pure powers; if that exceeds degree_cap the enumeration is
    refused with InconclusiveError rather than silently truncated.
    """
    n = gb.nvars
    lms = gb.leading_monomials()
    if any(m.is_one for m in lms):
        return QuotientBasis(infinite=False, dimension=0, standard_monomials=())
    pure = {}
    for m in lms:
        nz = [i for i, e in enumerate(m.exps) if e]
        if len(nz) == 1:
            i = nz[0]
            pure[i] = min(pure.get(i, m.exps[i]), m.exps[i])
    if len(pure) < n:
        return QuotientBasis(infinite=True)
    bound = sum(k - 1 for k in pure.values())
    if bound > degree_cap:
        raise InconclusiveError(
            f"staircase bound {bound} exceeds degree cap {degree_cap}"
        )
    standard = []

    def rec(prefix, i):
        if i == n:
            m = Monomial(prefix)
            if not any(lm.divides(m) for lm in lms):
                standard.append(m)
            return
        for e in range(pure[i]):
            rec(prefix + [e], i + 1)

    rec([], 0)
    standard.sort(key=gb.order.key)
    return QuotientBasis(
        infinite=False, dimension=len(standard), standard_monomials=tuple(standard)
    )


# -- critical ideals -----------------------------------------------------------


@dataclass(frozen=True)
class AffineFrame:
    """Coordinate vector fields; the critical ideal is the partial-derivative ideal."""


@dataclass(frozen=True)
class HypersurfaceFrame:
    """Hypersurface f = 0 with the antisymmetric tangent fields
    v_ij = (d_j f) e_i - (d_i f) e_j."""

    f: Poly


@dataclass(frozen=True)
class CompleteIntersectionFrame:
    """Complete intersection f_1 = ... = f_c = 0 with explicitly supplied
    tangent generators, each an ambient vector of polynomials."""

    constraints: tuple
    tangent_fields: tuple  # each entry: tuple of nvars polynomials


FrameSpec = Union[AffineFrame, HypersurfaceFrame, CompleteIntersectionFrame]


def jacobi_ideal(W: Poly, frame: FrameSpec = AffineFrame()) -> Ideal:
    """Critical ideal of W in the ambient polynomial ring for the given frame.

    Affine: the partials of W.  Hypersurface f: f together with the
    antisymmetrized combinations d_i(W) d_j(f) - d_j(W) d_i(f).  Complete
    intersection: the constraints together with the tangent-field directional
    derivatives of W.
    """
    n = W.nvars
    if isinstance(frame, AffineFrame):
        gens = [W.diff(i) for i in range(n)]
        return Ideal(tuple(gens), n)
    if isinstance(frame, HypersurfaceFrame):
        f = frame.f
        if f.nvars != n:
            raise ShapeError("hypersurface equation has wrong variable count")
        dW = [W.diff(i) for i in range(n)]
        df = [f.diff(i) for i in range(n)]
        gens = [f]
        for i in range(n):
            for j in range(i + 1, n):
                gens.append(dW[i] * df[j] - dW[j] * df[i])
        return Ideal(tuple(gens), n)
    if isinstance(frame, CompleteIntersectionFrame):
        dW = [W.diff(i) for i in range(n)]
        gens = list(frame.constraints)
        for g in gens:
            if g.nvars != n:
                raise ShapeError("constraint has wrong variable count")
        for v in frame.tangent_fields:
            if len(v) != n:
                raise ShapeError("tangent field has wrong length")
            acc = Poly.zero(n)
            for comp, dwj in zip(v, dW):
                acc = acc + comp * dwj
            gens.append(acc)
        return Ideal(tuple(gens), n)
    raise TypeError(f"unknown frame spec {frame!r}")


def jacobi_dimension(
    W: Poly,
    frame: FrameSpec = AffineFrame(),
    order: MonomialOrder = GREVLEX,
    degree_cap: int = 64,
) -> QuotientBasis:
    """Groebner route to the quotient basis of the critical ideal."""
    gb = buchberger(jacobi_ideal(W, frame), order)
    return quotient_basis(gb, degree_cap)
