"""Exact linear algebra helpers: sparse rank over Gaussian rationals and
dense row reduction over the rationals.  No floating point anywhere."""

from __future__ import annotations

import os
from fractions import Fraction
from typing import Dict, Hashable, Iterable, List, Tuple

from .errors import ResourceLimitError
from .scalars import GaussianRational

DEFAULT_MAX_MATRIX_DIM = 200_000


def _matrix_dim_limit() -> int:
    return int(os.environ.get("STEINLG_MAX_MATRIX_DIM", DEFAULT_MAX_MATRIX_DIM))


def sparse_rank(vectors: Iterable[Dict[Hashable, GaussianRational]]) -> int:
    """Rank of the span of sparse vectors keyed by arbitrary hashable labels.

    Incremental elimination: each vector is reduced against the pivots found
    so far (smallest label first, labels ordered by insertion-id to stay
    deterministic), then normalized and stored if nonzero.
    """
    label_ids: Dict[Hashable, int] = {}

    def lid(label):
        if label not in label_ids:
            label_ids[label] = len(label_ids)
        return label_ids[label]

    pivots: Dict[int, Dict[int, GaussianRational]] = {}
    count = 0
    limit = _matrix_dim_limit()
    for vec in vectors:
        row = {lid(k): v for k, v in vec.items() if not v.is_zero}
        if len(label_ids) > limit:
            raise ResourceLimitError(
                f"matrix dimension exceeds {limit}; raise STEINLG_MAX_MATRIX_DIM"
            )
        while row:
            lead = min(row)
            piv = pivots.get(lead)
            if piv is None:
                c = row[lead]
                pivots[lead] = {k: v / c for k, v in row.items()}
                count += 1
                break
            factor = row[lead]
            for k, v in piv.items():
                s = row.get(k)
                w = (s if s is not None else GaussianRational(0)) - factor * v
                if w.is_zero:
                    row.pop(k, None)
                else:
                    row[k] = w
    return count


def kernel_dim(vectors: List[Dict[Hashable, GaussianRational]], ncols: int) -> int:
    return ncols - sparse_rank(vectors)


def rref(rows: List[List[Fraction]]) -> Tuple[List[List[Fraction]], int]:
    """Reduced row echelon form over Fraction; returns (nonzero rows, rank)."""
    m = [list(map(Fraction, r)) for r in rows]
    if not m:
        return [], 0
    ncols = len(m[0])
    rank = 0
    for col in range(ncols):
        piv = None
        for r in range(rank, len(m)):
            if m[r][col] != 0:
                piv = r
                break
        if piv is None:
            continue
        m[rank], m[piv] = m[piv], m[rank]
        pv = m[rank][col]
        m[rank] = [x / pv for x in m[rank]]
        for r in range(len(m)):
            if r != rank and m[r][col] != 0:
                f = m[r][col]
                m[r] = [a - f * b for a, b in zip(m[r], m[rank])]
        rank += 1
        if rank == len(m):
            break
    return [r for r in m[:rank]], rank


def nullspace(rows: List[List[Fraction]], ncols: int) -> List[List[Fraction]]:
    """Basis of the right nullspace of the row span, over Fraction."""
    reduced, rank = rref(rows)
    pivot_cols = []
    for r in reduced:
        for c, v in enumerate(r):
            if v != 0:
                pivot_cols.append(c)
                break
    free_cols = [c for c in range(ncols) if c not in pivot_cols]
    basis = []
    for fc in free_cols:
        vec = [Fraction(0)] * ncols
        vec[fc] = Fraction(1)
        for r, pc in zip(reduced, pivot_cols):
            vec[pc] = -r[fc]
        basis.append(vec)
    return basis
