"""Static matrix classification.

Covers sign regularity of the order-k minors (strict, weak, or mixed, with
witnesses), Metzler and irreducibility tests, the banded structural classes
used for variation-diminishing dynamics, and the flowchart that decides
whether the constant system dx/dt = Ax diminishes cyclic (cvds) or linear
(tpds) sign variations.

Class conventions, for a square n x n matrix:

* M       tridiagonal with nonnegative sub- and super-diagonal entries;
* M_plus  tridiagonal with strictly positive sub- and super-diagonals;
* Q       Metzler, with nonzeros confined to the tridiagonal band plus the
          two ring corners (1,n) and (n,1);
* Q_plus  Q and irreducible.

Diagonal entries are unconstrained in all four classes.
"""

from dataclasses import dataclass
from itertools import combinations
from math import comb

import numpy as np

from .compound import _BLOCK_BUDGET, _det_stack, add_compound
from .errors import NonpositiveScale, OrderOutOfRange, ShapeError

DEFAULT_TOL = 1e-9

STRICT = "strictly_signed"
WEAK = "weakly_signed"
MIXED = "mixed"


@dataclass
class SsrVerdict:
    """Sign pattern of all order-k minors.

    status is "strictly_signed" when every minor clears the scaled tolerance
    with one common sign, "weakly_signed" when no two minors have opposite
    strict signs but some vanish, and "mixed" otherwise.  witness holds up to
    two (rows, cols, value) triples justifying the verdict, chosen first in
    lexicographic order.
    """

    order: int
    status: str
    sign: int  # +1, -1, or 0
    witness: list

    def to_dict(self):
        return {
            "order": self.order,
            "status": self.status,
            "sign": self.sign,
            "witness": [
                {"rows": list(r), "cols": list(c), "value": v} for (r, c, v) in self.witness
            ],
        }


def _require_matrix(A):
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.size == 0:
        raise ShapeError("expected a nonempty matrix")
    return A


def _require_square(A):
    A = _require_matrix(A)
    if A.shape[0] != A.shape[1]:
        raise ShapeError("expected a square matrix, got %dx%d" % A.shape)
    return A


def ssr_verdict(A, k, tol=DEFAULT_TOL):
    """Classify all order-k minors of A as strictly signed, weakly signed, or mixed.

    Each minor is compared against tol scaled by the product of its rows'
    max-abs entries, so the verdict does not depend on the overall scale of A.
    """
    A = _require_matrix(A)
    n, m = A.shape
    if not 1 <= k <= min(n, m):
        raise OrderOutOfRange("order k=%d out of range for a %dx%d matrix" % (k, n, m))
    row_sets = list(combinations(range(n), k))
    col_sets = list(combinations(range(m), k))
    C = np.asarray(col_sets, dtype=np.intp)
    first_pos = first_neg = first_zero = None
    blk = max(1, _BLOCK_BUDGET // max(1, len(col_sets) * k * k))
    R = np.asarray(row_sets, dtype=np.intp)

    def _first_triple(flag, dets, i0):
        if not flag.any():
            return None
        i, j = np.unravel_index(int(np.argmax(flag)), flag.shape)
        return (
            tuple(int(x) + 1 for x in row_sets[i0 + i]),
            tuple(int(x) + 1 for x in col_sets[j]),
            float(dets[i, j]),
        )

    for i0 in range(0, len(row_sets), blk):
        rb = R[i0 : i0 + blk]
        sub = A[rb[:, None, :, None], C[None, :, None, :]]
        dets = _det_stack(sub)
        scale = np.abs(sub).max(axis=-1).prod(axis=-1)
        thr = tol * scale
        pos = dets > thr
        neg = dets < -thr
        if first_pos is None:
            first_pos = _first_triple(pos, dets, i0)
        if first_neg is None:
            first_neg = _first_triple(neg, dets, i0)
        if first_zero is None:
            first_zero = _first_triple(~(pos | neg), dets, i0)
        if first_pos is not None and first_neg is not None:
            break
    if first_pos is not None and first_neg is not None:
        return SsrVerdict(order=k, status=MIXED, sign=0, witness=[first_pos, first_neg])
    if first_zero is not None:
        signed = first_pos if first_pos is not None else first_neg
        sign = 0 if signed is None else (1 if signed is first_pos else -1)
        witness = [signed, first_zero] if signed is not None else [first_zero]
        return SsrVerdict(order=k, status=WEAK, sign=sign, witness=witness)
    signed = first_pos if first_pos is not None else first_neg
    return SsrVerdict(
        order=k,
        status=STRICT,
        sign=1 if first_pos is not None else -1,
        witness=[signed],
    )


def is_metzler(A, tol=DEFAULT_TOL):
    """True when every off-diagonal entry is nonnegative (above -tol)."""
    A = _require_square(A)
    off = A[~np.eye(A.shape[0], dtype=bool)]
    return bool((off >= -tol).all())


def _reaches_all(adj, start):
    n = adj.shape[0]
    seen = np.zeros(n, dtype=bool)
    seen[start] = True
    stack = [start]
    while stack:
        i = stack.pop()
        for j in np.flatnonzero(adj[i]):
            if not seen[j]:
                seen[j] = True
                stack.append(int(j))
    return bool(seen.all())


def is_irreducible(A, tol=DEFAULT_TOL):
    """Strong connectivity of the digraph with an edge i -> j whenever |a_ij| > tol, i != j."""
    A = _require_square(A)
    n = A.shape[0]
    if n == 1:
        return True
    adj = (np.abs(A) > tol) & ~np.eye(n, dtype=bool)
    return _reaches_all(adj, 0) and _reaches_all(adj.T, 0)


def _band_masks(n):
    i = np.arange(n)
    dist = np.abs(i[:, None] - i[None, :])
    tri = dist <= 1
    corners = np.zeros((n, n), dtype=bool)
    if n >= 2:
        corners[0, n - 1] = True
        corners[n - 1, 0] = True
    return tri, corners


def in_M(A, tol=DEFAULT_TOL):
    """Tridiagonal with nonnegative sub- and super-diagonal entries."""
    A = _require_square(A)
    n = A.shape[0]
    tri, _ = _band_masks(n)
    if not (np.abs(A[~tri]) <= tol).all():
        return False
    sub = np.diag(A, -1)
    sup = np.diag(A, 1)
    return bool((sub >= -tol).all() and (sup >= -tol).all())


def in_M_plus(A, tol=DEFAULT_TOL):
    """Tridiagonal with strictly positive sub- and super-diagonal entries."""
    A = _require_square(A)
    n = A.shape[0]
    tri, _ = _band_masks(n)
    if not (np.abs(A[~tri]) <= tol).all():
        return False
    sub = np.diag(A, -1)
    sup = np.diag(A, 1)
    return bool((sub > tol).all() and (sup > tol).all())


def in_Q(A, tol=DEFAULT_TOL):
    """Metzler with nonzeros confined to the tridiagonal band and the two ring corners."""
    A = _require_square(A)
    n = A.shape[0]
    if not is_metzler(A, tol):
        return False
    tri, corners = _band_masks(n)
    return bool((np.abs(A[~(tri | corners)]) <= tol).all())


def in_Q_plus(A, tol=DEFAULT_TOL):
    """in_Q plus irreducibility."""
    return in_Q(A, tol) and is_irreducible(A, tol)


def diag_scale(A, d):
    """Similarity by a positive diagonal matrix: returns diag(d) A diag(d)^-1."""
    A = _require_matrix(A)
    d = np.asarray(d, dtype=float)
    if d.ndim != 1 or d.size != A.shape[0] or A.shape[0] != A.shape[1]:
        raise ShapeError("scale vector must match the dimension of a square matrix")
    if (d <= 0).any():
        raise NonpositiveScale("all diagonal scale entries must be positive")
    return A * np.outer(d, 1.0 / d)


def cvds_tpds_flowchart(A, tol=DEFAULT_TOL):
    """Decide whether dx/dt = Ax diminishes cyclic and/or linear sign variations.

    The system diminishes linear sign variations (tpds) exactly when A is in
    M_plus, and cyclic ones (cvds) exactly when A is in Q_plus.  For any
    dimension it suffices to test that A and its third additive compound are
    both Metzler and irreducible; the reason string names the first of those
    checks that fails.
    """
    A = _require_square(A)
    n = A.shape[0]
    cvds = in_Q_plus(A, tol)
    tpds = in_M_plus(A, tol)
    checks = [
        ("A is not Metzler", is_metzler(A, tol)),
        ("A is not irreducible", is_irreducible(A, tol)),
    ]
    if n >= 3:
        a3 = add_compound(A, 3).entries
        checks.append(("the third additive compound of A is not Metzler", is_metzler(a3, tol)))
        checks.append(
            ("the third additive compound of A is not irreducible", is_irreducible(a3, tol))
        )
    reason = None
    for name, ok in checks:
        if not ok:
            reason = name
            break
    if reason is None and not cvds:
        # tolerance edge: the band test disagreed with the compound test
        reason = "a nonzero entry lies outside the tridiagonal band and ring corners"
    if cvds:
        reason = (
            "A and its third additive compound are Metzler and irreducible"
            if n >= 3
            else "A is Metzler and irreducible"
        )
    return {"cvds": cvds, "tpds": tpds, "reason": reason}


@dataclass
class ClassificationReport:
    """Aggregate structural verdict for one matrix."""

    rows: int
    cols: int
    ssr: list
    metzler: bool
    irreducible: bool
    in_M: bool
    in_M_plus: bool
    in_Q: bool
    in_Q_plus: bool
    cvds: bool
    tpds: bool
    reason: str

    def to_dict(self):
        return {
            "rows": self.rows,
            "cols": self.cols,
            "ssr": [v.to_dict() for v in self.ssr],
            "metzler": self.metzler,
            "irreducible": self.irreducible,
            "in_M": self.in_M,
            "in_M_plus": self.in_M_plus,
            "in_Q": self.in_Q,
            "in_Q_plus": self.in_Q_plus,
            "cvds": self.cvds,
            "tpds": self.tpds,
            "reason": self.reason,
        }


# Full sign-regularity analysis enumerates sum_k C(n,k)*C(m,k) minors, which
# grows combinatorially; refuse clearly oversized inputs unless told otherwise.
_MINOR_BUDGET = 2_000_000


def classify_matrix(A, tol=DEFAULT_TOL, *, allow_large=False):
    """Full classification: sign regularity of every order plus structural classes."""
    A = _require_matrix(A)
    n, m = A.shape
    total = sum(comb(n, k) * comb(m, k) for k in range(1, min(n, m) + 1))
    if total > _MINOR_BUDGET and not allow_large:
        raise OrderOutOfRange(
            "full classification of a %dx%d matrix needs %d minors "
            "(pass allow_large=True to override)" % (n, m, total)
        )
    ssr = [ssr_verdict(A, k, tol) for k in range(1, min(n, m) + 1)]
    if n == m:
        flow = cvds_tpds_flowchart(A, tol)
        return ClassificationReport(
            rows=n,
            cols=m,
            ssr=ssr,
            metzler=is_metzler(A, tol),
            irreducible=is_irreducible(A, tol),
            in_M=in_M(A, tol),
            in_M_plus=in_M_plus(A, tol),
            in_Q=in_Q(A, tol),
            in_Q_plus=in_Q_plus(A, tol),
            cvds=flow["cvds"],
            tpds=flow["tpds"],
            reason=flow["reason"],
        )
    return ClassificationReport(
        rows=n,
        cols=m,
        ssr=ssr,
        metzler=False,
        irreducible=False,
        in_M=False,
        in_M_plus=False,
        in_Q=False,
        in_Q_plus=False,
        cvds=False,
        tpds=False,
        reason="matrix is not square",
    )
