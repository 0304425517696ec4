"""Central complex hyperplane arrangements: intersection lattice, Moebius
function, Poincare polynomial, Orlik-Solomon ranks, and the codimension-2
count that detects topologically nontrivial elementary factorizations.

Two independent algorithms are deliberately kept: the Moebius route through
the intersection lattice and the no-broken-circuit monomial count.  Agreement
of the two is a cross-check used by the tests.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Dict, FrozenSet, List, Sequence, Tuple

from .errors import ShapeError
from .linalg import nullspace, rref


def _proportional(a: Sequence[Fraction], b: Sequence[Fraction]) -> bool:
    return all(a[i] * b[j] == a[j] * b[i] for i in range(len(a)) for j in range(len(a)))


@dataclass(frozen=True)
class Arrangement:
    """Finitely many distinct hyperplanes through the origin, each given by a
    nonzero rational linear functional (so the arrangement is central by
    construction; affine data is not representable and thus rejected)."""

    d: int
    forms: tuple

    def __post_init__(self):
        forms = tuple(tuple(Fraction(x) for x in f) for f in self.forms)
        if any(len(f) != self.d for f in forms):
            raise ShapeError("every form needs exactly d coefficients")
        if any(all(x == 0 for x in f) for f in forms):
            raise ShapeError("zero linear form does not define a hyperplane")
        for i in range(len(forms)):
            for j in range(i + 1, len(forms)):
                if _proportional(forms[i], forms[j]):
                    raise ShapeError(
                        f"forms {i} and {j} define the same hyperplane"
                    )
        object.__setattr__(self, "forms", forms)

    @property
    def n_hyperplanes(self) -> int:
        return len(self.forms)

    def rank(self) -> int:
        _, r = rref([list(f) for f in self.forms])
        return r


@dataclass(frozen=True)
class Flat:
    """An intersection of hyperplanes, canonicalized by the reduced row
    echelon form of the linear forms vanishing on it."""

    normals: tuple  # rref rows spanning the annihilator
    codim: int
    hyperplanes: FrozenSet[int]
    subspace: tuple  # row-reduced basis of the flat itself


class IntersectionLattice:
    """All flats of a central arrangement ordered by reverse inclusion.

    Flat 0 is the ambient space; order is containment of hyperplane sets,
    which for flats coincides with reverse inclusion of subspaces.
    """

    def __init__(self, arrangement: Arrangement, flats: List[Flat]):
        self.arrangement = arrangement
        self.flats = tuple(flats)

    def __len__(self):
        return len(self.flats)

    def leq(self, i: int, j: int) -> bool:
        return self.flats[i].hyperplanes <= self.flats[j].hyperplanes

    def flats_by_codim(self) -> Dict[int, List[int]]:
        out: Dict[int, List[int]] = {}
        for idx, f in enumerate(self.flats):
            out.setdefault(f.codim, []).append(idx)
        return out

    def covers(self) -> List[Tuple[int, int]]:
        """Pairs (i, j) with j covering i."""
        pairs = []
        for i in range(len(self.flats)):
            for j in range(len(self.flats)):
                if i == j or not self.leq(i, j):
                    continue
                strict_between = any(
                    k != i and k != j and self.leq(i, k) and self.leq(k, j)
                    for k in range(len(self.flats))
                )
                if not strict_between:
                    pairs.append((i, j))
        return pairs


def _make_flat(arr: Arrangement, span_rows: List[List[Fraction]]) -> Flat:
    reduced, r = rref(span_rows)
    normals = tuple(tuple(row) for row in reduced)
    members = []
    for idx, form in enumerate(arr.forms):
        _, r2 = rref([list(row) for row in reduced] + [list(form)])
        if r2 == r:
            members.append(idx)
    basis = nullspace([list(row) for row in reduced], arr.d)
    sub, _ = rref(basis) if basis else ([], 0)
    return Flat(
        normals=normals,
        codim=r,
        hyperplanes=frozenset(members),
        subspace=tuple(tuple(row) for row in sub),
    )


def intersection_lattice(arr: Arrangement) -> IntersectionLattice:
    """Enumerate every flat exactly once by closing the hyperplane list under
    intersections, canonicalizing through reduced row echelon form."""
    ambient = _make_flat(arr, [])
    seen = {ambient.normals: ambient}
    frontier = [ambient]
    while frontier:
        nxt = []
        for flat in frontier:
            for h in range(arr.n_hyperplanes):
                if h in flat.hyperplanes:
                    continue
                rows = [list(r) for r in flat.normals] + [list(arr.forms[h])]
                cand = _make_flat(arr, rows)
                if cand.normals not in seen:
                    seen[cand.normals] = cand
                    nxt.append(cand)
        frontier = nxt
    flats = sorted(seen.values(), key=lambda f: (f.codim, f.normals))
    return IntersectionLattice(arr, flats)


@dataclass(frozen=True)
class MobiusTable:
    lattice: IntersectionLattice
    values: tuple  # aligned with lattice.flats

    def value(self, flat_index: int) -> int:
        return self.values[flat_index]


def mobius_table(L: IntersectionLattice) -> MobiusTable:
    """mu(ambient) = 1 and each flat balances everything strictly below it."""
    values = [0] * len(L)
    order = sorted(range(len(L)), key=lambda i: L.flats[i].codim)
    for i in order:
        if L.flats[i].codim == 0:
            values[i] = 1
            continue
        below = sum(values[j] for j in order if j != i and L.leq(j, i))
        values[i] = -below
    return MobiusTable(L, tuple(values))


def poincare_polynomial(arr: Arrangement) -> List[int]:
    """Coefficient vector: entry j is the sum of |mu| over codim-j flats."""
    L = intersection_lattice(arr)
    mob = mobius_table(L)
    top = max(f.codim for f in L.flats)
    coeffs = [0] * (top + 1)
    for idx, f in enumerate(L.flats):
        coeffs[f.codim] += abs(mob.values[idx])
    return coeffs


def _circuits(arr: Arrangement) -> List[FrozenSet[int]]:
    """Minimal linearly dependent subsets of the forms."""
    n = arr.n_hyperplanes
    circuits: List[FrozenSet[int]] = []
    for size in range(2, n + 1):
        for subset in combinations(range(n), size):
            s = frozenset(subset)
            if any(c <= s for c in circuits):
                continue
            rows = [list(arr.forms[i]) for i in subset]
            _, r = rref(rows)
            if r < size:
                circuits.append(s)
    return circuits


def os_ranks(arr: Arrangement) -> List[int]:
    """Graded ranks of the Orlik-Solomon algebra via the no-broken-circuit
    basis: subsets avoiding every circuit-minus-its-least-element, counted by
    size.  Independent of the Moebius computation by construction."""
    circuits = _circuits(arr)
    broken = [frozenset(c - {min(c)}) for c in circuits]
    n = arr.n_hyperplanes
    top = arr.rank()
    counts = [0] * (top + 1)
    for size in range(0, top + 1):
        for subset in combinations(range(n), size):
            s = frozenset(subset)
            if any(b <= s for b in broken):
                continue
            counts[size] += 1
    return counts


def h2_rank(arr: Arrangement) -> int:
    """Sum of |mu| over codimension-2 flats: the rank of the second integral
    cohomology of the complement, positive exactly when the complement admits
    topologically nontrivial elementary factorizations."""
    L = intersection_lattice(arr)
    mob = mobius_table(L)
    return sum(
        abs(mob.values[i]) for i, f in enumerate(L.flats) if f.codim == 2
    )


def supports_nontrivial_elementary(arr: Arrangement) -> bool:
    return h2_rank(arr) > 0
