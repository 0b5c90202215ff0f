"""Minors, lexicographic index-set bookkeeping, and p-th compound matrices.

Index sets are 1-based tuples throughout (the convention used in every report
this package emits).  All C(n,p) index sets of one cardinality are ordered
lexicographically; ``lex_rank``/``lex_unrank`` convert between a set and its
position in that ordering.

The multiplicative compound of A collects every order-p minor in that
ordering, so that the compound of a product is the product of the compounds.
The additive compound is the derivative at h=0 of the multiplicative compound
of I + hA and is assembled directly from its closed-form entries.
"""

from dataclasses import dataclass
from itertools import combinations
from math import comb

import numpy as np

from .errors import DimensionMismatch, OrderOutOfRange, RankOutOfRange, NonpositiveParameter, ShapeError

# C(14,7)^2 dense entries is ~1.2e7 floats; beyond that the caller must opt in.
MAX_AMBIENT_DIM = 14

# Cap on gathered submatrix scratch (floats) when batching determinants.
_BLOCK_BUDGET = 2_000_000


def _validate_index_set(indices, n):
    if len(indices) == 0:
        raise RankOutOfRange("index set must be nonempty")
    prev = 0
    for i in indices:
        if not isinstance(i, (int, np.integer)):
            raise RankOutOfRange("index sets contain integers, got %r" % (i,))
        if i <= prev:
            raise RankOutOfRange("index set must be strictly increasing and 1-based")
        prev = int(i)
    if prev > n:
        raise RankOutOfRange("index %d exceeds ambient dimension %d" % (prev, n))


def lex_rank(indices, n):
    """Position of a strictly increasing 1-based index set among all sets of its size."""
    idx = tuple(int(i) for i in indices)
    _validate_index_set(idx, n)
    p = len(idx)
    rank = 0
    prev = 0
    for k, s in enumerate(idx):
        for j in range(prev + 1, s):
            rank += comb(n - j, p - k - 1)
        prev = s
    return rank


def lex_unrank(rank, n, p):
    """Inverse of lex_rank: the index set at a given lexicographic position."""
    if not 0 < p <= n:
        raise OrderOutOfRange("cardinality p=%d out of range for n=%d" % (p, n))
    if not 0 <= rank < comb(n, p):
        raise RankOutOfRange("rank %d out of range [0, %d)" % (rank, comb(n, p)))
    out = []
    r = int(rank)
    j = 1
    for k in range(p):
        while True:
            cnt = comb(n - j, p - k - 1)
            if r < cnt:
                out.append(j)
                j += 1
                break
            r -= cnt
            j += 1
    return tuple(out)


def _det_stack(stack):
    """Determinants over the trailing two axes; closed form up to 3x3, LU beyond."""
    p = stack.shape[-1]
    if p == 1:
        return stack[..., 0, 0].copy()
    if p == 2:
        return stack[..., 0, 0] * stack[..., 1, 1] - stack[..., 0, 1] * stack[..., 1, 0]
    if p == 3:
        return (
            stack[..., 0, 0] * (stack[..., 1, 1] * stack[..., 2, 2] - stack[..., 1, 2] * stack[..., 2, 1])
            - stack[..., 0, 1] * (stack[..., 1, 0] * stack[..., 2, 2] - stack[..., 1, 2] * stack[..., 2, 0])
            + stack[..., 0, 2] * (stack[..., 1, 0] * stack[..., 2, 1] - stack[..., 1, 1] * stack[..., 2, 0])
        )
    return np.linalg.det(stack)


def minor(A, rows, cols):
    """Determinant of the submatrix selected by 1-based row/column index sets."""
    A = np.asarray(A, dtype=float)
    if A.ndim != 2:
        raise ShapeError("expected a matrix")
    rows = tuple(int(i) for i in rows)
    cols = tuple(int(j) for j in cols)
    if len(rows) != len(cols):
        raise DimensionMismatch(
            "row set has %d indices but column set has %d" % (len(rows), len(cols))
        )
    _validate_index_set(rows, A.shape[0])
    _validate_index_set(cols, A.shape[1])
    sub = A[np.ix_([i - 1 for i in rows], [j - 1 for j in cols])]
    return float(_det_stack(sub[None, ...])[0])


@dataclass
class CompoundMatrix:
    """Dense p-th compound with its lexicographic index-set labels."""

    order: int
    ambient_rows: int
    ambient_cols: int
    kind: str  # "multiplicative" or "additive"
    row_sets: tuple
    col_sets: tuple
    entries: np.ndarray

    @property
    def ambient_dim(self):
        if self.ambient_rows != self.ambient_cols:
            raise ShapeError("ambient dimension is only defined for square ambient matrices")
        return self.ambient_rows

    def to_dict(self):
        d = {
            "order": self.order,
            "ambient_rows": self.ambient_rows,
            "ambient_cols": self.ambient_cols,
            "kind": self.kind,
            "row_sets": [list(s) for s in self.row_sets],
            "col_sets": [list(s) for s in self.col_sets],
            "entries": self.entries.tolist(),
        }
        if self.ambient_rows == self.ambient_cols:
            d["ambient_dim"] = self.ambient_rows
        return d


def _check_cap(n, m, allow_large):
    if max(n, m) > MAX_AMBIENT_DIM and not allow_large:
        raise OrderOutOfRange(
            "ambient dimension %d exceeds the default cap %d "
            "(pass allow_large=True to override)" % (max(n, m), MAX_AMBIENT_DIM)
        )


def mult_compound(A, p, *, allow_large=False):
    """Matrix of all order-p minors of A, rows and columns in lexicographic order."""
    A = np.asarray(A, dtype=float)
    if A.ndim != 2:
        raise ShapeError("expected a matrix")
    n, m = A.shape
    if not 1 <= p <= min(n, m):
        raise OrderOutOfRange("order p=%d out of range for a %dx%d matrix" % (p, n, m))
    _check_cap(n, m, allow_large)
    row_sets = list(combinations(range(n), p))
    col_sets = list(combinations(range(m), p))
    R = np.asarray(row_sets, dtype=np.intp)
    C = np.asarray(col_sets, dtype=np.intp)
    out = np.empty((len(row_sets), len(col_sets)))
    blk = max(1, _BLOCK_BUDGET // max(1, len(col_sets) * p * p))
    for i0 in range(0, len(row_sets), blk):
        rb = R[i0 : i0 + blk]
        sub = A[rb[:, None, :, None], C[None, :, None, :]]
        out[i0 : i0 + blk] = _det_stack(sub)
    return CompoundMatrix(
        order=p,
        ambient_rows=n,
        ambient_cols=m,
        kind="multiplicative",
        row_sets=tuple(tuple(i + 1 for i in s) for s in row_sets),
        col_sets=tuple(tuple(j + 1 for j in s) for s in col_sets),
        entries=out,
    )


def add_compound(A, p, *, allow_large=False):
    """Additive compound of a square matrix, built from its closed-form entries.

    The entry at (alpha, beta) is the diagonal sum over alpha when alpha ==
    beta, equals (-1)**(l+m) * A[i_l, j_m] when the two sets share all but one
    index (i_l the leftover of alpha at position l, j_m the leftover of beta at
    position m), and is zero otherwise.
    """
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ShapeError("additive compound requires a square matrix")
    n = A.shape[0]
    if not 1 <= p <= n:
        raise OrderOutOfRange("order p=%d out of range for a %dx%d matrix" % (p, n, n))
    _check_cap(n, n, allow_large)
    combos = list(combinations(range(n), p))
    rank_of = {c: r for r, c in enumerate(combos)}
    N = len(combos)
    out = np.zeros((N, N))
    diag = np.asarray(combos, dtype=np.intp)
    out[np.arange(N), np.arange(N)] = A[diag, diag].sum(axis=1)
    for a_rank, alpha in enumerate(combos):
        members = set(alpha)
        for l, i_l in enumerate(alpha):
            rest = alpha[:l] + alpha[l + 1 :]
            for j in range(n):
                if j in members:
                    continue
                beta = tuple(sorted(rest + (j,)))
                m = beta.index(j)
                out[a_rank, rank_of[beta]] = (-1.0) ** (l + m) * A[i_l, j]
    labels = tuple(tuple(i + 1 for i in s) for s in combos)
    return CompoundMatrix(
        order=p,
        ambient_rows=n,
        ambient_cols=n,
        kind="additive",
        row_sets=labels,
        col_sets=labels,
        entries=out,
    )


def add_compound_fd(A, p, h, *, allow_large=False):
    """Finite-difference additive compound ((I + hA)^(p) - I) / h.

    Converges to add_compound(A, p) as h -> 0; kept as an independent route
    for cross-checking the closed-form assembly.
    """
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ShapeError("additive compound requires a square matrix")
    if h <= 0:
        raise NonpositiveParameter("finite-difference step h must be positive")
    n = A.shape[0]
    cp = mult_compound(np.eye(n) + h * A, p, allow_large=allow_large)
    out = (cp.entries - np.eye(cp.entries.shape[0])) / h
    return CompoundMatrix(
        order=p,
        ambient_rows=n,
        ambient_cols=n,
        kind="additive",
        row_sets=cp.row_sets,
        col_sets=cp.col_sets,
        entries=out,
    )
