"""Degree-truncated models of the Koszul complex of the gradient of W and
exact cohomology dimensions at every position.

The contraction differential sends a basis k-vector against the partials of W
with alternating signs.  Truncations are finite-dimensional, matrices exact,
ranks computed without floating point.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Dict, List, Sequence, Tuple

from .errors import ShapeError
from .linalg import sparse_rank
from .poly import Monomial, Poly
from .scalars import GaussianRational


def monomials_up_to(nvars: int, deg: int) -> List[Monomial]:
    """All monomials of total degree <= deg, ordered by (degree, exponents)."""
    if deg < 0:
        return []
    out: List[Tuple[int, ...]] = []

    def rec(prefix, remaining):
        if len(prefix) == nvars - 1:
            for e in range(remaining + 1):
                out.append(tuple(prefix) + (e,))
            return
        for e in range(remaining + 1):
            rec(prefix + [e], remaining - e)

    if nvars == 0:
        return [Monomial(())]
    rec([], deg)
    out.sort(key=lambda t: (sum(t), t))
    return [Monomial(t) for t in out]


@dataclass(frozen=True)
class TruncatedComplex:
    """Finite-dimensional truncation of an operator sequence.

    maps[k] sends position-k basis labels to sparse target columns
    {target_label: coefficient}; labels are self-describing tuples so that
    ranks and compositions can be checked without separate index books.
    """

    positions: tuple
    bases: dict
    maps: dict
    truncation_degree: int
    periodic: bool = False

    def dim(self, position: int) -> int:
        return len(self.bases[position])


def _contract(S: tuple, m: Monomial, partials, nvars) -> Dict[tuple, GaussianRational]:
    """Image of e_S (x) m under contraction against the gradient, as a sparse
    column keyed by (S', monomial)."""
    col: Dict[tuple, GaussianRational] = {}
    for pos, i in enumerate(S):
        sign = -1 if pos % 2 else 1
        rest = tuple(x for x in S if x != i)
        for mono, c in partials[i].terms.items():
            key = (rest, mono * m)
            acc = col.get(key)
            contrib = c * sign
            acc = contrib if acc is None else acc + contrib
            if acc.is_zero:
                col.pop(key, None)
            else:
                col[key] = acc
    return col


def build_truncated_koszul(W: Poly, D: int) -> TruncatedComplex:
    """Positions -d..0 host basis k-vectors tensored with monomials of degree
    <= D; the map at position k contracts with the partials of W, landing in
    degree <= D + deg W - 1 so no image term is clipped."""
    d = W.nvars
    degW = W.degree()
    if degW < 1:
        raise ShapeError("W must be non-constant")
    if D < degW:
        raise ShapeError(
            f"truncation degree {D} too small to contain deg(dW) = {degW - 1} times 1"
        )
    partials = [W.diff(i) for i in range(d)]
    monos = monomials_up_to(d, D)
    bases = {}
    maps = {}
    for k in range(-d, 1):
        size = abs(k)
        bases[k] = tuple(
            (S, m) for S in combinations(range(d), size) for m in monos
        )
    for k in range(-d, 0):
        cols = {}
        for S, m in bases[k]:
            cols[(S, m)] = _contract(S, m, partials, d)
        maps[k] = cols
    return TruncatedComplex(
        positions=tuple(range(-d, 1)),
        bases=bases,
        maps=maps,
        truncation_degree=D,
    )


@dataclass(frozen=True)
class KoszulReport:
    positions: tuple
    dims_per_cap: dict  # cap -> tuple of dims aligned with positions
    stabilized: bool

    def to_json_dict(self) -> dict:
        return {
            "positions": list(self.positions),
            "dims_per_cap": {str(c): list(v) for c, v in self.dims_per_cap.items()},
            "stabilized": self.stabilized,
        }


def _weighted_bases(d, weights, D):
    bases = {}
    for k in range(-d, 1):
        size = abs(k)
        items = []
        for S in combinations(range(d), size):
            wS = sum(weights[i] for i in S)
            for m in monomials_up_to(d, D - wS):
                items.append((S, m))
        bases[k] = items
    return bases


def koszul_cohomology_dims(W: Poly, D_list: Sequence[int]) -> KoszulReport:
    """Cohomology dimensions of the truncated contraction complex per cap.

    Basis k-vectors carry the total degree of their generators' partials, and
    the truncation keeps weighted degree <= D.  Contraction preserves that
    weight bound, so every cap yields an honest subcomplex: kernels and images
    are computed without clipped entries, and negative positions vanish
    exactly for a regular gradient sequence.  The flag reports whether the
    last two caps agree at every position.
    """
    d = W.nvars
    if W.degree() < 1:
        raise ShapeError("W must be non-constant")
    D_list = list(D_list)
    if not D_list or any(b <= a for a, b in zip(D_list, D_list[1:])):
        raise ShapeError("D_list must be nonempty and strictly increasing")
    partials = [W.diff(i) for i in range(d)]
    weights = [max(0, p.degree()) for p in partials]
    positions = tuple(range(-d, 1))
    dims_per_cap = {}
    for D in D_list:
        bases = _weighted_bases(d, weights, D)
        ranks = {}
        for k in range(-d, 0):
            cols = [_contract(S, m, partials, d) for S, m in bases[k]]
            ranks[k] = sparse_rank(cols)
        dims = []
        for k in positions:
            out_rank = ranks.get(k, 0)
            in_rank = ranks.get(k - 1, 0)
            dims.append(len(bases[k]) - out_rank - in_rank)
        dims_per_cap[D] = tuple(dims)
    stabilized = (
        len(D_list) >= 2 and dims_per_cap[D_list[-1]] == dims_per_cap[D_list[-2]]
    )
    return KoszulReport(positions, dims_per_cap, stabilized)
