"""Independent reference implementations used only to cross-check the library.

Everything here follows the defining constructions directly (exhaustive
replacement, rotation maxima, cofactor expansion, Taylor series) and stays
deliberately separate from the production code paths.
"""

from itertools import product

import numpy as np


def _threshold(v, tol):
    return [0.0 if abs(x) <= tol else float(x) for x in v]


def sign_changes_nozeros(u):
    cnt = 0
    for a, b in zip(u[:-1], u[1:]):
        if a * b < 0:
            cnt += 1
    return cnt


def s_minus_ref(v, tol=0.0):
    u = [x for x in _threshold(v, tol) if x != 0.0]
    return sign_changes_nozeros(u)


def s_plus_ref(v, tol=0.0):
    """Exhaustive maximum over +/-1 replacements of the zero entries."""
    w = _threshold(v, tol)
    zeros = [i for i, x in enumerate(w) if x == 0.0]
    if len(zeros) > 20:
        raise ValueError("too many zeros for exhaustive replacement")
    best = 0
    for bits in product((1.0, -1.0), repeat=len(zeros)):
        filled = list(w)
        for i, b in zip(zeros, bits):
            filled[i] = b
        best = max(best, sign_changes_nozeros(filled))
    return best


def _wrap(v, i):
    return list(v[i:]) + list(v[:i]) + [v[i]]


def sc_minus_ref(v, tol=0.0):
    """Rotation definition: max of s_minus over all wrapped rotations."""
    v = _threshold(v, tol)
    return max(s_minus_ref(_wrap(v, i)) for i in range(len(v)))


def sc_plus_ref(v, tol=0.0):
    """Rotation definition of the cyclic s_plus.

    The wrapped vector duplicates the rotation's first entry at both ends;
    when that entry is zero the two copies must receive the same replacement.
    """
    v = _threshold(v, tol)
    n = len(v)
    best = 0
    for i in range(n):
        w = _wrap(v, i)
        zeros = [j for j, x in enumerate(w) if x == 0.0]
        tied = abs(w[0]) == 0.0
        free = [j for j in zeros if j not in (0, n)] if tied else zeros
        slots = len(free) + (1 if tied else 0)
        if slots > 18:
            raise ValueError("too many zeros for exhaustive replacement")
        for bits in product((1.0, -1.0), repeat=slots):
            filled = list(w)
            if tied:
                filled[0] = filled[n] = bits[0]
                choice = bits[1:]
            else:
                choice = bits
            for j, b in zip(free, choice):
                filled[j] = b
            best = max(best, sign_changes_nozeros(filled))
    return best


def in_V_ref(v, tol=0.0):
    """Structural membership: nonzero endpoints, interior zeros strictly bridged."""
    w = _threshold(v, tol)
    if w[0] == 0.0 or w[-1] == 0.0:
        return False
    for i in range(1, len(w) - 1):
        if w[i] == 0.0 and not (w[i - 1] * w[i + 1] < 0):
            return False
    return True


def laplace_det(M):
    """Cofactor expansion along the first row; exact for small integer matrices."""
    M = [list(map(float, row)) for row in np.asarray(M)]
    n = len(M)
    if n == 1:
        return M[0][0]
    total = 0.0
    for j in range(n):
        sub = [row[:j] + row[j + 1 :] for row in M[1:]]
        total += ((-1.0) ** j) * M[0][j] * laplace_det(sub)
    return total


def expm_taylor(M, nterms=24, nsquare=None):
    """Scaling-and-squaring Taylor matrix exponential."""
    M = np.asarray(M, dtype=float)
    n = M.shape[0]
    norm = np.abs(M).sum(axis=1).max()
    if nsquare is None:
        nsquare = max(0, int(np.ceil(np.log2(max(norm, 1e-16))))) + 6
    S = M / (2.0 ** nsquare)
    E = np.eye(n)
    term = np.eye(n)
    for k in range(1, nterms + 1):
        term = term @ S / k
        E = E + term
    for _ in range(nsquare):
        E = E @ E
    return E


def random_q_plus(rng, n, diag_range=(-1.5, 0.5), off_range=(0.5, 2.0), drop_prob=0.3):
    """Random matrix in the ring-banded Metzler irreducible class.

    The super-diagonal plus the (n,1) corner always form a cycle covering all
    nodes, so the result is irreducible whatever else gets dropped.
    """
    A = np.zeros((n, n))
    A[np.diag_indices(n)] = rng.uniform(*diag_range, size=n)
    for i in range(n - 1):
        A[i, i + 1] = rng.uniform(*off_range)
        if rng.random() > drop_prob:
            A[i + 1, i] = rng.uniform(*off_range)
    A[n - 1, 0] = rng.uniform(*off_range)
    if rng.random() > drop_prob:
        A[0, n - 1] = rng.uniform(*off_range)
    return A


def random_metzler_irreducible_not_ring(rng, n, off_range=(0.5, 2.0)):
    """Metzler and irreducible with at least one entry off the ring band (needs n >= 4)."""
    if n < 4:
        raise ValueError("needs n >= 4")
    A = random_q_plus(rng, n, off_range=off_range, drop_prob=0.0)
    w = int(rng.integers(0, n))
    offsets = [q for q in range(n) if 1 < abs(w - q) < n - 1]
    q = offsets[int(rng.integers(0, len(offsets)))]
    A[w, q] = rng.uniform(*off_range)
    return A
