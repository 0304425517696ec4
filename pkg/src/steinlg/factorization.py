"""Matrix factorizations of polynomial superpotentials: construction and
verification, morphism complexes under the defect differential, hom-space
dimensions, and the disk-algebra comparison.

Only free (matrix) factorizations are represented; rank-(1,1) elementary
factorizations cover the line-bundle constructions numerically exercised
elsewhere.  All cohomology dimensions are reported over the scalars from
finite degree truncations with a stabilization flag.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Dict, List, Optional, Sequence, Tuple

from .errors import InconclusiveError, ShapeError
from .koszul import TruncatedComplex, monomials_up_to
from .linalg import sparse_rank
from .poly import GREVLEX, Monomial, Poly, jacobi_dimension
from .scalars import GR_ONE, GaussianRational

Matrix = Tuple[Tuple[Poly, ...], ...]


def _as_matrix(rows, nrows, ncols, nvars) -> Matrix:
    rows = tuple(tuple(r) for r in rows)
    if len(rows) != nrows or any(len(r) != ncols for r in rows):
        raise ShapeError(f"expected a {nrows}x{ncols} matrix")
    for r in rows:
        for p in r:
            if not isinstance(p, Poly) or p.nvars != nvars:
                raise ShapeError("matrix entries must be polynomials in the ambient ring")
    return rows


def _matmul(X: Matrix, Y: Matrix, nvars: int) -> Matrix:
    if X and Y and len(X[0]) != len(Y):
        raise ShapeError("inner dimensions do not match")
    inner = len(Y)
    ncols = len(Y[0]) if Y else 0
    out = []
    for i in range(len(X)):
        row = []
        for j in range(ncols):
            acc = Poly.zero(nvars)
            for k in range(inner):
                acc = acc + X[i][k] * Y[k][j]
            row.append(acc)
        out.append(tuple(row))
    return tuple(out)


def _mat_sub_scaled_identity(M: Matrix, W: Poly) -> Matrix:
    out = []
    for i, row in enumerate(M):
        out.append(
            tuple(p - W if i == j else p for j, p in enumerate(row))
        )
    return tuple(out)


def _max_entry_degree(*matrices: Matrix) -> int:
    deg = 0
    for M in matrices:
        for row in M:
            for p in row:
                deg = max(deg, p.degree())
    return deg


@dataclass(frozen=True)
class MatrixFactorization:
    """Free Z2-graded module with odd differential D = [[0, B], [A, 0]],
    so that B.A = W on the even summand and A.B = W on the odd one."""

    r0: int
    r1: int
    A: Matrix  # r1 x r0, even-to-odd block
    B: Matrix  # r0 x r1, odd-to-even block
    W: Poly

    def __post_init__(self):
        n = self.W.nvars
        object.__setattr__(self, "A", _as_matrix(self.A, self.r1, self.r0, n))
        object.__setattr__(self, "B", _as_matrix(self.B, self.r0, self.r1, n))

    @property
    def nvars(self) -> int:
        return self.W.nvars


@dataclass(frozen=True)
class VerificationReport:
    ok: bool
    residual_ba: Matrix  # B.A - W*Id
    residual_ab: Matrix  # A.B - W*Id


def verify_factorization(mf: MatrixFactorization) -> VerificationReport:
    """Exact check of the square identity; the residual blocks are returned
    so a failure shows exactly which entries break it."""
    n = mf.nvars
    res_ba = _mat_sub_scaled_identity(_matmul(mf.B, mf.A, n), mf.W)
    res_ab = _mat_sub_scaled_identity(_matmul(mf.A, mf.B, n), mf.W)
    ok = all(p.is_zero for m in (res_ba, res_ab) for row in m for p in row)
    return VerificationReport(ok, res_ba, res_ab)


def quiver_factorization(n: int, k: int) -> MatrixFactorization:
    """The rank-(2,2) factorization family of x1^(n+1) + x2*x3 with blocks
    [[x2, x1^(n+1-k)], [x1^k, -x3]] and [[x3, x1^(n+1-k)], [x1^k, -x2]]."""
    if n < 1:
        raise ShapeError("need n >= 1")
    if not 0 <= k <= n + 1:
        raise ShapeError(f"k = {k} outside 0..{n+1}")
    x1 = Poly.variable(0, 3)
    x2 = Poly.variable(1, 3)
    x3 = Poly.variable(2, 3)
    W = x1 ** (n + 1) + x2 * x3
    a_k = ((x2, x1 ** (n + 1 - k)), (x1**k, -x3))
    b_k = ((x3, x1 ** (n + 1 - k)), (x1**k, -x2))
    return MatrixFactorization(2, 2, a_k, b_k, W)


def elementary_factorization(u: Poly, v: Poly) -> MatrixFactorization:
    """Rank-(1,1) factorization of u*v from a pair of sections."""
    if u.is_zero or v.is_zero:
        raise ShapeError("elementary factorization needs nonzero sections")
    if u.nvars != v.nvars:
        raise ShapeError("sections live in different rings")
    return MatrixFactorization(1, 1, ((u,),), ((v,),), u * v)


# -- morphism complexes -------------------------------------------------------
#
# A block map a1 -> a2 is a pair of polynomial matrices:
#   even  (f0: r2_0 x r1_0, f1: r2_1 x r1_1)
#   odd   (g:  r2_1 x r1_0, h:  r2_0 x r1_1)
# and the defect differential is the supercommutator with the factorization
# differentials:
#   d(f0, f1) = (A2.f0 - f1.A1, B2.f1 - f0.B1)
#   d(g, h)   = (B2.g + h.A1,  A2.h + g.B1)


@dataclass(frozen=True)
class BlockMap:
    parity: int  # 0 even, 1 odd
    p: Matrix
    q: Matrix


def _zeros(nrows, ncols, nvars) -> Matrix:
    z = Poly.zero(nvars)
    return tuple(tuple(z for _ in range(ncols)) for _ in range(nrows))


def block_shapes(a1: MatrixFactorization, a2: MatrixFactorization, parity: int):
    if parity == 0:
        return (a2.r0, a1.r0), (a2.r1, a1.r1)
    return (a2.r1, a1.r0), (a2.r0, a1.r1)


def defect_apply(a1: MatrixFactorization, a2: MatrixFactorization, bm: BlockMap) -> BlockMap:
    """One application of the defect differential to a block map."""
    n = a1.nvars
    if bm.parity == 0:
        f0, f1 = bm.p, bm.q
        g = _mat_sub(_matmul(a2.A, f0, n), _matmul(f1, a1.A, n))
        h = _mat_sub(_matmul(a2.B, f1, n), _matmul(f0, a1.B, n))
        return BlockMap(1, g, h)
    g, h = bm.p, bm.q
    f0 = _mat_add(_matmul(a2.B, g, n), _matmul(h, a1.A, n))
    f1 = _mat_add(_matmul(a2.A, h, n), _matmul(g, a1.B, n))
    return BlockMap(0, f0, f1)


def _mat_add(X: Matrix, Y: Matrix) -> Matrix:
    return tuple(tuple(a + b for a, b in zip(rx, ry)) for rx, ry in zip(X, Y))


def _mat_sub(X: Matrix, Y: Matrix) -> Matrix:
    return tuple(tuple(a - b for a, b in zip(rx, ry)) for rx, ry in zip(X, Y))


def _basis_blockmap(a1, a2, parity, which, i, j, mono: Monomial) -> BlockMap:
    n = a1.nvars
    (pr, pc), (qr, qc) = block_shapes(a1, a2, parity)
    p = [[Poly.zero(n)] * pc for _ in range(pr)]
    q = [[Poly.zero(n)] * qc for _ in range(qr)]
    entry = Poly({mono: GR_ONE}, n)
    if which == 0:
        p[i][j] = entry
    else:
        q[i][j] = entry
    return BlockMap(parity, tuple(map(tuple, p)), tuple(map(tuple, q)))


def _blockmap_column(bm: BlockMap) -> Dict[tuple, GaussianRational]:
    col = {}
    for which, M in ((0, bm.p), (1, bm.q)):
        for i, row in enumerate(M):
            for j, poly in enumerate(row):
                for mono, c in poly.terms.items():
                    col[(which, i, j, mono)] = c
    return col


def _check_same_w(a1, a2):
    if a1.W != a2.W:
        raise ShapeError("factorizations have different superpotentials")


def defect_operator(a1: MatrixFactorization, a2: MatrixFactorization, D_cap: int) -> TruncatedComplex:
    """The two matrices of the 2-periodic morphism complex, on block maps with
    polynomial entries of degree <= D_cap.  Position 0 holds even maps."""
    _check_same_w(a1, a2)
    n = a1.nvars
    monos = monomials_up_to(n, D_cap)
    bases = {}
    maps = {}
    for parity in (0, 1):
        (pr, pc), (qr, qc) = block_shapes(a1, a2, parity)
        labels = [
            (which, i, j, m)
            for which, (rr, cc) in ((0, (pr, pc)), (1, (qr, qc)))
            for i in range(rr)
            for j in range(cc)
            for m in monos
        ]
        bases[parity] = tuple(labels)
        cols = {}
        for which, i, j, m in labels:
            bm = _basis_blockmap(a1, a2, parity, which, i, j, m)
            cols[(which, i, j, m)] = _blockmap_column(defect_apply(a1, a2, bm))
        maps[parity] = cols
    return TruncatedComplex(
        positions=(0, 1),
        bases=bases,
        maps=maps,
        truncation_degree=D_cap,
        periodic=True,
    )


@dataclass(frozen=True)
class HomDims:
    even_dim: int
    odd_dim: int
    stabilized: bool
    cap_used: int


def _periodic_dims(col_builder, dims_of_cap, cap: int, delta: int):
    """ker/im bookkeeping for a 2-periodic complex truncated at entry degree
    cap: kernels over sources of degree <= cap (images never clipped), images
    restricted to sources of degree <= cap - delta so they stay inside the
    window.  Returns (even, odd)."""
    rank_even_full = sparse_rank(col_builder(0, cap))
    rank_odd_full = sparse_rank(col_builder(1, cap))
    small = cap - delta
    rank_even_small = sparse_rank(col_builder(0, small)) if small >= 0 else 0
    rank_odd_small = sparse_rank(col_builder(1, small)) if small >= 0 else 0
    dim_even, dim_odd = dims_of_cap(cap)
    even = (dim_even - rank_even_full) - rank_odd_small
    odd = (dim_odd - rank_odd_full) - rank_even_small
    return even, odd


def hmf_hom_dims(
    a1: MatrixFactorization,
    a2: MatrixFactorization,
    caps: Sequence[int] = (4, 6, 8),
) -> HomDims:
    """Even/odd hom dimensions between factorizations of the same W from the
    truncated morphism complex, with a cap-stability flag."""
    _check_same_w(a1, a2)
    n = a1.nvars
    delta = max(1, _max_entry_degree(a1.A, a1.B, a2.A, a2.B))
    caps = list(caps)
    if not caps:
        raise ShapeError("need at least one cap")

    nblocks = {}
    for parity in (0, 1):
        (pr, pc), (qr, qc) = block_shapes(a1, a2, parity)
        nblocks[parity] = pr * pc + qr * qc

    def col_builder(parity, cap):
        (pr, pc), (qr, qc) = block_shapes(a1, a2, parity)
        monos = monomials_up_to(n, cap)
        cols = []
        for which, (rr, cc) in ((0, (pr, pc)), (1, (qr, qc))):
            for i in range(rr):
                for j in range(cc):
                    for m in monos:
                        bm = _basis_blockmap(a1, a2, parity, which, i, j, m)
                        cols.append(_blockmap_column(defect_apply(a1, a2, bm)))
        return cols

    def dims_of_cap(cap):
        count = len(monomials_up_to(n, cap))
        return nblocks[0] * count, nblocks[1] * count

    history = [ _periodic_dims(col_builder, dims_of_cap, c, delta) for c in caps ]
    stabilized = len(history) >= 2 and history[-1] == history[-2]
    even, odd = history[-1]
    return HomDims(even, odd, stabilized, caps[-1])


# -- disk algebra ---------------------------------------------------------------


@dataclass(frozen=True)
class DiskReport:
    predicted: int
    direct: int
    equal: bool
    jacobi_dim: int
    hom: HomDims
    direct_even: int
    direct_odd: int
    stabilized: bool
    cap_used: int


def disk_algebra_dims(
    a: MatrixFactorization,
    caps: Sequence[int] = (6, 8),
    jacobi_cap: int = 64,
) -> DiskReport:
    """Compare the tensor-product prediction for the disk algebra against the
    direct cohomology of the combined contraction-plus-defect operator.

    predicted: (dimension of the bulk quotient algebra) x (even + odd
    self-hom dims).  direct: stabilized even+odd cohomology of the truncated
    2-periodic complex on exterior-vector-valued endomorphism blocks, where
    the combined operator acts by contraction on the exterior factor plus the
    sign-twisted defect differential on the block factor.
    """
    W = a.W
    n = W.nvars
    if a.r0 == 0 and a.r1 == 0:
        hom = HomDims(0, 0, True, caps[-1] if caps else 0)
        return DiskReport(0, 0, True, 0, hom, 0, 0, True, hom.cap_used)
    qb = jacobi_dimension(W, degree_cap=jacobi_cap)
    if qb.infinite:
        raise ValueError("Jacobi quotient is infinite; disk comparison undefined")
    jac_dim = qb.dimension

    hom = hmf_hom_dims(a, a, caps)
    if not hom.stabilized:
        raise InconclusiveError("self-hom dimensions did not stabilize across caps")
    predicted = jac_dim * (hom.even_dim + hom.odd_dim)

    partials = [W.diff(i) for i in range(n)]
    delta = max(
        1,
        _max_entry_degree(a.A, a.B),
        max((p.degree() for p in partials), default=0),
    )

    shapes = {}
    for parity in (0, 1):
        (pr, pc), (qr, qc) = block_shapes(a, a, parity)
        shapes[parity] = ((pr, pc), (qr, qc))

    def labels_for(parity, cap):
        out = []
        monos = monomials_up_to(n, cap)
        for size in range(n + 1):
            block_parity = (parity + size) % 2
            (pr, pc), (qr, qc) = shapes[block_parity]
            for S in combinations(range(n), size):
                for which, (rr, cc) in ((0, (pr, pc)), (1, (qr, qc))):
                    for i in range(rr):
                        for j in range(cc):
                            for m in monos:
                                out.append((S, which, i, j, m))
        return out

    def col_builder(parity, cap):
        cols = []
        for S, which, i, j, m in labels_for(parity, cap):
            block_parity = (parity + len(S)) % 2
            col: Dict[tuple, GaussianRational] = {}
            # contraction part: strip one exterior generator, same block
            for pos, t in enumerate(S):
                sign = -1 if pos % 2 else 1
                rest = tuple(x for x in S if x != t)
                for mono, c in partials[t].terms.items():
                    _col_add(col, (rest, which, i, j, mono * m), c * sign)
            # defect part, with the exterior-degree sign
            bm = _basis_blockmap(a, a, block_parity, which, i, j, m)
            dsign = -1 if len(S) % 2 else 1
            image = defect_apply(a, a, bm)
            for key, c in _blockmap_column(image).items():
                _col_add(col, (S,) + key, c * dsign)
            cols.append(col)
        return cols

    def dims_of_cap(cap):
        return len(labels_for(0, cap)), len(labels_for(1, cap))

    history = [_periodic_dims(col_builder, dims_of_cap, c, delta) for c in caps]
    stabilized = len(history) >= 2 and history[-1] == history[-2]
    direct_even, direct_odd = history[-1]
    direct = direct_even + direct_odd
    return DiskReport(
        predicted=predicted,
        direct=direct,
        equal=predicted == direct,
        jacobi_dim=jac_dim,
        hom=hom,
        direct_even=direct_even,
        direct_odd=direct_odd,
        stabilized=stabilized,
        cap_used=caps[-1],
    )


def _col_add(col: dict, key: tuple, c: GaussianRational):
    acc = col.get(key)
    acc = c if acc is None else acc + c
    if acc.is_zero:
        col.pop(key, None)
    else:
        col[key] = acc
