"""Variation-diminishing-property checkers.

Each checker decides its property structurally, from the sign pattern of the
relevant minors; the equivalences behind those decisions hold for square
nonsingular matrices, so every checker first gates on a scaled determinant
test.  Sampling never decides a property here, it only hunts for a concrete
violating vector to attach to a failing verdict.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .classify import STRICT, WEAK, ssr_verdict
from .errors import NonpositiveParameter, OrderOutOfRange, ShapeError, SingularMatrix
from .signvar import (
    DEFAULT_ZERO_TOL,
    s_minus_rows,
    s_plus_rows,
    sc_minus_rows,
    sc_plus_rows,
)

# Fraction of sample entries forced to exact zero; exercises the zero-handling
# branches of the counters, which is where violations hide.
ZERO_FRACTION = 0.2

_SAMPLE_BLOCK = 65536

RELATIONS = ("scvdp", "weak_cvdp", "svdp")


@dataclass
class Counterexample:
    """A vector that violates the checked inequality, with both counter values."""

    vector: np.ndarray
    before: int
    after: int
    relation: str
    sample_index: int

    def to_dict(self):
        return {
            "vector": [float(x) for x in self.vector],
            "before": self.before,
            "after": self.after,
            "relation": self.relation,
            "sample_index": self.sample_index,
        }


@dataclass
class VdpVerdict:
    property: str
    holds: bool
    counterexample: Optional[Counterexample]
    method: str

    def to_dict(self):
        return {
            "property": self.property,
            "holds": self.holds,
            "counterexample": None
            if self.counterexample is None
            else self.counterexample.to_dict(),
            "method": self.method,
        }


def _require_square(A):
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.size == 0 or A.shape[0] != A.shape[1]:
        raise ShapeError("expected a nonempty square matrix")
    return A


def _require_nonsingular(A, tol):
    # scale the determinant test by the product of row max-abs entries so the
    # gate is insensitive to the overall scale of A
    scale = float(np.prod(np.abs(A).max(axis=1)))
    if scale == 0.0 or abs(float(np.linalg.det(A))) <= tol * scale:
        raise SingularMatrix("the matrix is singular within tolerance %g" % tol)


def _relation_spec(relation, zero_tol):
    if relation == "scvdp":
        return (
            lambda X: sc_minus_rows(X, zero_tol),
            lambda Y: sc_plus_rows(Y, zero_tol),
            "sc_plus(Ax) <= sc_minus(x)",
        )
    if relation == "weak_cvdp":
        return (
            lambda X: sc_minus_rows(X, zero_tol),
            lambda Y: sc_minus_rows(Y, zero_tol),
            "sc_minus(Ax) <= sc_minus(x)",
        )
    if relation == "svdp":
        return (
            lambda X: s_minus_rows(X, zero_tol),
            lambda Y: s_plus_rows(Y, zero_tol),
            "s_plus(Ax) <= s_minus(x)",
        )
    raise ValueError("unknown relation %r (one of %s)" % (relation, ", ".join(RELATIONS)))


def _draw_block(rng, cnt, n):
    X = rng.standard_normal((cnt, n))
    X[rng.random((cnt, n)) < ZERO_FRACTION] = 0.0
    return X


def _sample_violation(A, relation, num_samples, seed, zero_tol):
    """First sampled nonzero x with after(Ax) > before(x), or None."""
    A = np.asarray(A, dtype=float)
    n = A.shape[1]
    before_fn, after_fn, label = _relation_spec(relation, zero_tol)
    rng = np.random.default_rng(seed)
    done = 0
    while done < num_samples:
        cnt = min(_SAMPLE_BLOCK, num_samples - done)
        X = _draw_block(rng, cnt, n)
        nonzero = np.abs(X).max(axis=1) > 0
        before = before_fn(X)
        after = after_fn(X @ A.T)
        viol = nonzero & (after > before)
        if viol.any():
            i = int(np.argmax(viol))
            return Counterexample(
                vector=X[i].copy(),
                before=int(before[i]),
                after=int(after[i]),
                relation=label,
                sample_index=done + i,
            )
        done += cnt
    return None


def sample_vdp_counterexample(A, relation, num_samples=10000, seed=0, zero_tol=DEFAULT_ZERO_TOL):
    """Search random vectors for a violation of the given relation.

    Entries are i.i.d. standard normal with a fifth of them zeroed out.  The
    first violating vector (smallest sample index) is returned, or None; a
    fixed seed makes the outcome reproducible.
    """
    if num_samples < 1:
        raise NonpositiveParameter("num_samples must be at least 1")
    hit = _sample_violation(A, relation, num_samples, seed, zero_tol)
    return None if hit is None else hit.vector


def check_nonstandard_vdp(A, p, tol=1e-9, det_tol=None, num_samples=10000, seed=0,
                          zero_tol=DEFAULT_ZERO_TOL):
    """Does s_minus(c) <= p force s_plus(Ac) <= p?

    For a nonsingular A this holds exactly when the minors of order p+1 are
    strictly signed; when it fails, sampling looks for a witness c with
    s_minus(c) <= p and s_plus(Ac) > p.
    """
    A = _require_square(A)
    n = A.shape[0]
    if not 0 <= p <= n - 1:
        raise OrderOutOfRange("p=%d out of range {0,...,%d}" % (p, n - 1))
    _require_nonsingular(A, tol if det_tol is None else det_tol)
    holds = ssr_verdict(A, p + 1, tol).status == STRICT
    ce = None if holds else _search_nonstandard(A, p, num_samples, seed, zero_tol)
    return VdpVerdict("nonstandard(%d)" % p, holds, ce, "structural")


def _search_nonstandard(A, p, num_samples, seed, zero_tol):
    rng = np.random.default_rng(seed)
    n = A.shape[0]
    done = 0
    while done < num_samples:
        cnt = min(_SAMPLE_BLOCK, num_samples - done)
        X = _draw_block(rng, cnt, n)
        nonzero = np.abs(X).max(axis=1) > 0
        before = s_minus_rows(X, zero_tol)
        after = s_plus_rows(X @ A.T, zero_tol)
        viol = nonzero & (before <= p) & (after > p)
        if viol.any():
            i = int(np.argmax(viol))
            return Counterexample(
                vector=X[i].copy(),
                before=int(before[i]),
                after=int(after[i]),
                relation="s_minus(c) <= %d but s_plus(Ac) > %d" % (p, p),
                sample_index=done + i,
            )
        done += cnt
    return None


def check_scvdp(A, tol=1e-9, det_tol=None, num_samples=10000, seed=0,
                zero_tol=DEFAULT_ZERO_TOL):
    """Strong cyclic VDP: sc_plus(Ax) <= sc_minus(x) for every nonzero x.

    Holds iff every odd-order family of minors is strictly signed.
    """
    A = _require_square(A)
    _require_nonsingular(A, tol if det_tol is None else det_tol)
    holds = all(
        ssr_verdict(A, r, tol).status == STRICT for r in range(1, A.shape[0] + 1, 2)
    )
    ce = None if holds else _sample_violation(A, "scvdp", num_samples, seed, zero_tol)
    return VdpVerdict("scvdp", holds, ce, "structural")


def check_weak_cvdp(A, tol=1e-9, det_tol=None, num_samples=10000, seed=0,
                    zero_tol=DEFAULT_ZERO_TOL):
    """Weak cyclic VDP: sc_minus(Ax) <= sc_minus(x) for every nonzero x.

    Holds iff every odd-order family of minors is signed at least weakly.
    """
    A = _require_square(A)
    _require_nonsingular(A, tol if det_tol is None else det_tol)
    holds = all(
        ssr_verdict(A, r, tol).status in (STRICT, WEAK)
        for r in range(1, A.shape[0] + 1, 2)
    )
    ce = None if holds else _sample_violation(A, "weak_cvdp", num_samples, seed, zero_tol)
    return VdpVerdict("weak_cvdp", holds, ce, "structural")


def check_prop_sv1(U, tol=1e-9, num_samples=10000, seed=0, zero_tol=DEFAULT_ZERO_TOL):
    """For a tall n x m matrix (m < n): s_plus(Uc) <= m-1 for every nonzero c?

    Structurally this holds exactly when the order-m minors of U are strictly
    signed.  The verdict is cross-validated by sampling coefficient vectors;
    a concrete sampled violator overrides a structural pass, since it can be
    re-checked directly.
    """
    U = np.asarray(U, dtype=float)
    if U.ndim != 2:
        raise ShapeError("expected a matrix")
    n, m = U.shape
    if m >= n:
        raise ShapeError("need strictly fewer columns than rows, got %dx%d" % (n, m))
    holds = ssr_verdict(U, m, tol).status == STRICT
    ce = _search_prop_sv1(U, num_samples, seed, zero_tol)
    if holds and ce is not None:
        return VdpVerdict("svdp", False, ce, "sampled(%d,%d)" % (num_samples, seed))
    if holds:
        ce = None
    return VdpVerdict("svdp", holds, ce, "structural")


def _search_prop_sv1(U, num_samples, seed, zero_tol):
    rng = np.random.default_rng(seed)
    n, m = U.shape
    cap = m - 1
    done = 0
    while done < num_samples:
        cnt = min(_SAMPLE_BLOCK, num_samples - done)
        C = _draw_block(rng, cnt, m)
        nonzero = np.abs(C).max(axis=1) > 0
        after = s_plus_rows(C @ U.T, zero_tol)
        viol = nonzero & (after > cap)
        if viol.any():
            i = int(np.argmax(viol))
            return Counterexample(
                vector=C[i].copy(),
                before=int(s_minus_rows(C[i : i + 1], zero_tol)[0]),
                after=int(after[i]),
                relation="s_plus(Uc) > %d" % cap,
                sample_index=done + i,
            )
        done += cnt
    return None


def gaussian_kernel(n, y):
    """The n x n totally positive smoothing kernel exp(-(i-j)^2 y), y > 0.

    Tends to the identity as y grows; multiplying a weakly signed nonsingular
    matrix by it sharpens every weak odd-order sign pattern into a strict one.
    """
    if y <= 0:
        raise NonpositiveParameter("kernel parameter must be positive")
    if n < 1:
        raise ShapeError("kernel dimension must be at least 1")
    i = np.arange(1, n + 1, dtype=float)
    return np.exp(-((i[:, None] - i[None, :]) ** 2) * y)
