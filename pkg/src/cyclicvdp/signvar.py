"""Sign-variation counters for finite real vectors, linear and cyclic.

Five counters are provided.  ``sigma`` counts adjacent sign alternations and
is only defined on vectors with nonzero endpoints whose interior zeros are
bridged by a strict sign change.  ``s_minus`` deletes zeros before counting,
``s_plus`` maximizes the count over all +/-1 fillings of the zeros.  The
cyclic counters ``sc_minus``/``sc_plus`` are the maxima of the linear ones
over all rotations of the vector around a ring; they equal the linear counter
rounded up to the next even integer, which is what the production code uses
(the rotation definition is kept as a test oracle).

All counters share one zero threshold: an entry x is treated as zero exactly
when abs(x) <= zero_tol.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import NotInV, ShapeError

DEFAULT_ZERO_TOL = 1e-9


def _threshold_signs(v, zero_tol):
    v = np.asarray(v, dtype=float)
    if v.ndim != 1 or v.size == 0:
        raise ShapeError("expected a nonempty one-dimensional vector")
    s = np.sign(v).astype(np.int64)
    s[np.abs(v) <= zero_tol] = 0
    return s


def _alternations(signs):
    if signs.size < 2:
        return 0
    return int(np.count_nonzero(signs[1:] * signs[:-1] < 0))


def sigma(v, zero_tol=DEFAULT_ZERO_TOL):
    """Adjacent sign-alternation count for vectors with nonzero endpoints.

    Interior zeros are allowed only when their two neighbors have strictly
    opposite signs; each such zero then contributes exactly one alternation.
    Raises NotInV otherwise.
    """
    s = _threshold_signs(v, zero_tol)
    if s[0] == 0 or s[-1] == 0:
        raise NotInV("endpoint entry is zero after thresholding")
    for i in range(1, s.size - 1):
        if s[i] == 0 and s[i - 1] * s[i + 1] >= 0:
            raise NotInV(
                "interior zero at position %d is not bridged by a strict sign change" % (i + 1)
            )
    return _alternations(s[s != 0])


def s_minus(v, zero_tol=DEFAULT_ZERO_TOL):
    """Number of sign changes after deleting all zero entries (0 for the zero vector)."""
    s = _threshold_signs(v, zero_tol)
    return _alternations(s[s != 0])


def s_plus(v, zero_tol=DEFAULT_ZERO_TOL):
    """Maximum number of sign changes over all +/-1 replacements of the zero entries.

    Computed by a linear scan over the maximal zero runs: a boundary run of
    length z contributes z alternations, an interior run flanked by signs a, b
    contributes z+1 when the flanks allow a full alternation across the run
    (b == a * (-1)**(z+1)) and z otherwise.  The zero vector yields n-1.
    """
    return _s_plus_from_signs(_threshold_signs(v, zero_tol))


def _s_plus_from_signs(s):
    n = s.size
    nz = np.flatnonzero(s)
    if nz.size == 0:
        return n - 1
    total = int(nz[0]) + int(n - 1 - nz[-1])
    for a, b in zip(nz[:-1], nz[1:]):
        gap = int(b - a - 1)
        full = -1 if gap % 2 == 0 else 1  # sign product needed for gap+1 alternations
        total += gap + 1 if s[a] * s[b] == full else gap
    return total


def sc_minus(v, zero_tol=DEFAULT_ZERO_TOL):
    """Cyclic version of s_minus: the value rounded up to the next even integer."""
    s = s_minus(v, zero_tol)
    return s + (s % 2)


def sc_plus(v, zero_tol=DEFAULT_ZERO_TOL):
    """Cyclic version of s_plus: the value rounded up to the next even integer."""
    s = s_plus(v, zero_tol)
    return s + (s % 2)


@dataclass(frozen=True)
class SignCountReport:
    """All counters of one vector plus membership in the two continuity sets.

    in_V is equivalent to s_minus == s_plus and in_Vc to sc_minus == sc_plus;
    sigma is populated only when the vector satisfies the structural membership
    conditions of V (nonzero endpoints, bridged interior zeros).
    """

    sigma: Optional[int]
    s_minus: int
    s_plus: int
    sc_minus: int
    sc_plus: int
    in_V: bool
    in_Vc: bool

    def to_dict(self):
        return {
            "sigma": self.sigma,
            "s_minus": self.s_minus,
            "s_plus": self.s_plus,
            "sc_minus": self.sc_minus,
            "sc_plus": self.sc_plus,
            "in_V": self.in_V,
            "in_Vc": self.in_Vc,
        }


def sign_report(v, zero_tol=DEFAULT_ZERO_TOL):
    """Compute every counter of v in one pass and package them."""
    sm = s_minus(v, zero_tol)
    sp = s_plus(v, zero_tol)
    try:
        sig = sigma(v, zero_tol)
    except NotInV:
        sig = None
    return SignCountReport(
        sigma=sig,
        s_minus=sm,
        s_plus=sp,
        sc_minus=sm + (sm % 2),
        sc_plus=sp + (sp % 2),
        in_V=(sm == sp),
        in_Vc=(sm + (sm % 2) == sp + (sp % 2)),
    )


# Row-wise vectorized counters.  These process a whole batch of vectors at
# once and are what makes large counterexample searches affordable; they must
# agree with the scalar functions above (checked in the tests).

def _threshold_sign_rows(X, zero_tol):
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or X.shape[1] == 0:
        raise ShapeError("expected a 2-d array of row vectors")
    S = np.sign(X).astype(np.int8)
    S[np.abs(X) <= zero_tol] = 0
    return S


def s_minus_rows(X, zero_tol=DEFAULT_ZERO_TOL):
    """s_minus of every row of X, returned as an integer array."""
    S = _threshold_sign_rows(X, zero_tol)
    m, n = S.shape
    cols = np.arange(n)
    idx = np.where(S != 0, cols[None, :], -1)
    last = np.maximum.accumulate(idx, axis=1)
    prev = np.concatenate([np.full((m, 1), -1, dtype=last.dtype), last[:, :-1]], axis=1)
    prev_sign = np.take_along_axis(S, np.clip(prev, 0, None), axis=1)
    prev_sign = np.where(prev >= 0, prev_sign, 0)
    changes = (S != 0) & (prev_sign != 0) & (prev_sign != S)
    return changes.sum(axis=1).astype(np.int64)


def s_plus_rows(X, zero_tol=DEFAULT_ZERO_TOL):
    """s_plus of every row of X.

    Uses the classical duality s_plus(x) = n - 1 - s_minus(D x) where D
    alternates the signs of the coordinates; zeros are preserved by D, so the
    same threshold applies.
    """
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or X.shape[1] == 0:
        raise ShapeError("expected a 2-d array of row vectors")
    n = X.shape[1]
    alt = np.where(np.arange(n) % 2 == 0, 1.0, -1.0)
    return (n - 1) - s_minus_rows(X * alt, zero_tol)


def sc_minus_rows(X, zero_tol=DEFAULT_ZERO_TOL):
    s = s_minus_rows(X, zero_tol)
    return s + (s % 2)


def sc_plus_rows(X, zero_tol=DEFAULT_ZERO_TOL):
    s = s_plus_rows(X, zero_tol)
    return s + (s % 2)
