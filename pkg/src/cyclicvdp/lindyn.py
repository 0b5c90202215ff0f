"""Linear time-varying dynamics and integer sign-count monitoring.

A system is described by its generator A(t), which may be constant, piecewise
constant, or sampled on a time grid (zero-order hold or linear interpolation).
Transition matrices are integrated with classical fixed-step RK4, splitting
every step at generator discontinuities.  Trajectory simulation additionally
uses exact matrix-exponential stepping whenever the generator is piecewise
constant, so the sign-count analysis of the flagship examples carries no
integrator error.

Sign counters are integers, so a change between two grid times is localized
by bisecting the bracket down to EVENT_BRACKET; only the bracket matters, not
the exact crossing time.
"""

import math
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np
from scipy.linalg import expm

from .compound import add_compound, mult_compound
from .errors import (
    InputError,
    NotMetzler,
    NumericalAbort,
    OrderOutOfRange,
    ShapeError,
    StepTooLarge,
    ZeroInitialCondition,
)
from .signvar import DEFAULT_ZERO_TOL, SignCountReport, sign_report

STATE_NORM_LIMIT = 1e12
EVENT_BRACKET = 1e-6

CONSTANT = "constant"
PIECEWISE = "piecewise_constant"
SAMPLED = "sampled"


@dataclass
class LtvSystem:
    """Generator description for dx/dt = A(t) x.

    For the piecewise kind, matrices[i] is active on [breakpoints[i-1],
    breakpoints[i]) with matrices[0] before the first breakpoint and
    matrices[-1] after the last, so len(matrices) == len(breakpoints) + 1.
    For the sampled kind, breakpoints holds the sample times (one per matrix)
    and the interpolation is zero-order hold or linear, clamped outside the
    sampled range.
    """

    dim: int
    kind: str
    matrices: np.ndarray
    breakpoints: Optional[np.ndarray] = None
    interpolation: str = "hold"

    @classmethod
    def constant(cls, A):
        A = _square(A)
        return cls(dim=A.shape[0], kind=CONSTANT, matrices=A[None, :, :])

    @classmethod
    def piecewise_constant(cls, breakpoints, matrices):
        bp = np.asarray(breakpoints, dtype=float)
        mats = np.asarray([_square(M) for M in matrices], dtype=float)
        if bp.ndim != 1 or len(mats) != bp.size + 1:
            raise ShapeError("need exactly one more matrix than breakpoints")
        if bp.size and not (np.diff(bp) > 0).all():
            raise ShapeError("breakpoints must be strictly increasing")
        if len({M.shape for M in mats}) != 1:
            raise ShapeError("all pieces must share one square shape")
        return cls(dim=mats.shape[1], kind=PIECEWISE, matrices=mats, breakpoints=bp)

    @classmethod
    def sampled(cls, times, matrices, interpolation="hold"):
        t = np.asarray(times, dtype=float)
        mats = np.asarray([_square(M) for M in matrices], dtype=float)
        if t.ndim != 1 or len(mats) != t.size or t.size == 0:
            raise ShapeError("need one sample matrix per sample time")
        if t.size > 1 and not (np.diff(t) > 0).all():
            raise ShapeError("sample times must be strictly increasing")
        if interpolation not in ("hold", "linear"):
            raise ShapeError("interpolation must be 'hold' or 'linear'")
        return cls(
            dim=mats.shape[1],
            kind=SAMPLED,
            matrices=mats,
            breakpoints=t,
            interpolation=interpolation,
        )

    def piece_index(self, t):
        if self.kind == CONSTANT:
            return 0
        t_knots = self.breakpoints
        if self.kind == PIECEWISE:
            return int(np.searchsorted(t_knots, t, side="right"))
        return int(np.clip(np.searchsorted(t_knots, t, side="right") - 1, 0, len(t_knots) - 1))

    def generator(self, t):
        """A(t) as an n x n array."""
        if self.kind == CONSTANT:
            return self.matrices[0]
        if self.kind == PIECEWISE:
            return self.matrices[self.piece_index(t)]
        i = self.piece_index(t)
        if self.interpolation == "hold" or i == len(self.matrices) - 1:
            return self.matrices[i]
        t0, t1 = self.breakpoints[i], self.breakpoints[i + 1]
        if t <= t0:
            return self.matrices[i]
        w = (t - t0) / (t1 - t0)
        return (1 - w) * self.matrices[i] + w * self.matrices[i + 1]

    def knots_between(self, t0, t1):
        """Generator discontinuities (or kinks) strictly inside (t0, t1)."""
        if self.kind == CONSTANT or self.breakpoints is None:
            return []
        bp = self.breakpoints
        return [float(b) for b in bp if t0 < b < t1]

    def exact_steppable(self):
        return self.kind in (CONSTANT, PIECEWISE)


def _square(A):
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1] or A.size == 0:
        raise ShapeError("expected a nonempty square matrix")
    return A


def _rk4_span(f, t0, t1, y0, step):
    """Classical RK4 from t0 to t1 with uniform steps of size <= step."""
    span = t1 - t0
    nsteps = max(1, int(math.ceil(span / step - 1e-12)))
    h = span / nsteps
    y = y0
    t = t0
    for _ in range(nsteps):
        k1 = f(t, y)
        k2 = f(t + 0.5 * h, y + 0.5 * h * k1)
        k3 = f(t + 0.5 * h, y + 0.5 * h * k2)
        k4 = f(t + h, y + h * k3)
        y = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        t += h
    return y


def _integrate(gen_at, sys, t0, t1, y0, step):
    """RK4 between generator knots.

    The generator is frozen at the span midpoint whenever it is constant on
    the span (piecewise or held kinds), so no RK4 stage ever samples the
    neighboring piece at a breakpoint.
    """
    frozen = sys.kind in (CONSTANT, PIECEWISE) or (
        sys.kind == SAMPLED and sys.interpolation == "hold"
    )
    y = y0
    prev = t0
    for knot in sys.knots_between(t0, t1) + [t1]:
        if knot <= prev:
            continue
        if frozen:
            G = gen_at(0.5 * (prev + knot))
            f = lambda tau, Y, G=G: G @ Y
        else:
            f = lambda tau, Y: gen_at(tau) @ Y
        y = _rk4_span(f, prev, knot, y, step)
        prev = knot
    return y


def transition_matrix(sys, t0, t, step):
    """Transition matrix of dx/dt = A(t)x from t0 to t, integrated with RK4."""
    n = sys.dim
    if t == t0:
        return np.eye(n)
    if t < t0:
        raise InputError("target time must not precede the start time")
    if step <= 0:
        raise StepTooLarge("step must be positive")
    if step > t - t0:
        raise StepTooLarge("step %g exceeds the integration span %g" % (step, t - t0))
    return _integrate(sys.generator, sys, t0, t, np.eye(n), step)


def compound_transition(sys, p, t0, t, step):
    """Order-p compound of the transition matrix, via its own linear dynamics.

    Integrates dPsi/dt = B(t) Psi from the identity, where B is the p-th
    additive compound of the generator; an independent route that must agree
    with the compound of transition_matrix.
    """
    n = sys.dim
    if not 1 <= p <= n:
        raise OrderOutOfRange("order p=%d out of range for dimension %d" % (p, n))
    size = math.comb(n, p)
    if t == t0:
        return _as_compound(np.eye(size), sys, p)
    if t < t0:
        raise InputError("target time must not precede the start time")
    if step <= 0 or step > t - t0:
        raise StepTooLarge("step must be positive and no larger than the span")
    if sys.exact_steppable():
        # the generator takes finitely many values; compound each once
        cache = [add_compound(M, p).entries for M in sys.matrices]
        gen = lambda tau: cache[sys.piece_index(tau)]
    else:
        gen = lambda tau: add_compound(sys.generator(tau), p).entries
    return _as_compound(_integrate(gen, sys, t0, t, np.eye(size), step), sys, p)


def _as_compound(entries, sys, p):
    template = mult_compound(np.eye(sys.dim), p)
    template.entries = entries
    return template


def verify_cvds(sys, t0, t_grid, step, tol=1e-9):
    """Check that every odd-order minor of the transition matrix stays above tol.

    The minors are computed fresh from the transition matrix at each grid time
    (propagated across grid times by the cocycle rule, which is exact).
    Returns the verdict and the first violation, if any, as a dict.
    """
    t_grid = [float(t) for t in t_grid]
    if not t_grid or any(t <= t0 for t in t_grid):
        raise InputError("grid times must all exceed t0")
    if any(b >= a for a, b in zip(t_grid[1:], t_grid[:-1])):
        raise InputError("grid times must be strictly increasing")
    phi = np.eye(sys.dim)
    prev = t0
    for t in t_grid:
        phi = transition_matrix(sys, prev, t, min(step, t - prev)) @ phi
        prev = t
        for p in range(1, sys.dim + 1, 2):
            cm = mult_compound(phi, p)
            bad = cm.entries <= tol
            if bad.any():
                i, j = np.unravel_index(int(np.argmax(bad)), bad.shape)
                return {
                    "holds": False,
                    "first_violation": {
                        "t": t,
                        "order": p,
                        "rows": list(cm.row_sets[i]),
                        "cols": list(cm.col_sets[j]),
                        "value": float(cm.entries[i, j]),
                    },
                }
    return {"holds": True, "first_violation": None}


@dataclass
class SignEvent:
    """A localized change of one integer counter: value `before` at t_lo, `after` at t_hi."""

    t_lo: float
    t_hi: float
    kind: str  # "sc_minus_drop" or "s_minus_increase"
    before: int
    after: int

    def to_dict(self):
        return {
            "t_lo": self.t_lo,
            "t_hi": self.t_hi,
            "kind": self.kind,
            "before": self.before,
            "after": self.after,
        }


@dataclass
class Trajectory:
    times: np.ndarray
    states: np.ndarray
    counts: List[SignCountReport]
    events: List[SignEvent]
    phi: Optional[np.ndarray] = None

    def series(self, name):
        return np.array([getattr(c, name) for c in self.counts])


class Propagator:
    """Advances states of an LTV system between arbitrary times.

    Piecewise-constant generators are advanced exactly with cached matrix
    exponentials; anything else falls back to RK4 with steps no larger than
    the configured one.
    """

    def __init__(self, sys, step):
        self.sys = sys
        self.step = step
        self._exp_cache = {}

    def _piece_exp(self, idx, dt):
        key = (idx, dt)
        E = self._exp_cache.get(key)
        if E is None:
            E = expm(self.sys.matrices[idx] * dt)
            self._exp_cache[key] = E
        return E

    def advance(self, t_from, x, t_to):
        if t_to == t_from:
            return x
        sys = self.sys
        if sys.exact_steppable():
            prev = t_from
            for knot in sys.knots_between(t_from, t_to) + [t_to]:
                if knot > prev:
                    x = self._piece_exp(sys.piece_index(prev), knot - prev) @ x
                    prev = knot
            return x
        return _integrate(sys.generator, sys, t_from, t_to, x, self.step)


def time_grid(t0, t1, step):
    if t1 <= t0:
        raise InputError("horizon must exceed the start time")
    if step <= 0:
        raise StepTooLarge("step must be positive")
    if step > t1 - t0:
        raise StepTooLarge("step %g exceeds the horizon %g" % (step, t1 - t0))
    m = int(math.floor((t1 - t0) / step + 1e-12))
    times = [t0 + k * step for k in range(m + 1)]
    if times[-1] < t1 - 1e-12 * max(1.0, abs(t1)):
        times.append(t1)
    else:
        times[-1] = t1
    return times


def locate_events(times, states, counts, advance, zero_tol, project=None, bracket=EVENT_BRACKET):
    """Bisect every grid-to-grid change of sc_minus or s_minus down to `bracket`.

    `advance(t_from, state, t_to)` must reproduce the dynamics for the full
    stored state; `project` extracts the monitored vector from it (identity by
    default).  Only drops of sc_minus and increases of s_minus are reported as
    events; everything else is visible in the count series itself.
    """
    if project is None:
        project = lambda s: s
    events = []
    for k in range(len(times) - 1):
        for counter, fn in (("sc_minus", _sc_minus_of), ("s_minus", _s_minus_of)):
            b = getattr(counts[k], counter)
            a = getattr(counts[k + 1], counter)
            if a == b:
                continue
            lo_t, lo_x, lo_v = times[k], states[k], b
            hi_t, hi_v = times[k + 1], a
            while hi_t - lo_t > bracket:
                mid = 0.5 * (lo_t + hi_t)
                x_mid = advance(lo_t, lo_x, mid)
                v_mid = fn(project(x_mid), zero_tol)
                if v_mid == lo_v:
                    lo_t, lo_x, lo_v = mid, x_mid, v_mid
                else:
                    hi_t, hi_v = mid, v_mid
            if counter == "sc_minus" and hi_v < lo_v:
                events.append(SignEvent(lo_t, hi_t, "sc_minus_drop", lo_v, hi_v))
            elif counter == "s_minus" and hi_v > lo_v:
                events.append(SignEvent(lo_t, hi_t, "s_minus_increase", lo_v, hi_v))
    events.sort(key=lambda e: e.t_lo)
    return events


def _sc_minus_of(v, zero_tol):
    r = sign_report(v, zero_tol)
    return r.sc_minus


def _s_minus_of(v, zero_tol):
    r = sign_report(v, zero_tol)
    return r.s_minus


def simulate(sys, x0, t0, t1, step, zero_tol=DEFAULT_ZERO_TOL, keep_phi=False):
    """Integrate dx/dt = A(t)x and monitor all sign counters along the way.

    Counter changes between grid points are localized by bisection and
    classified; the trajectory aborts if the state norm passes
    STATE_NORM_LIMIT, since counters of an overflowing state are meaningless.
    """
    x0 = np.asarray(x0, dtype=float)
    if x0.ndim != 1 or x0.size != sys.dim:
        raise ShapeError("initial state must be a vector of dimension %d" % sys.dim)
    if float(np.abs(x0).max()) == 0.0:
        raise ZeroInitialCondition("initial state must be nonzero")
    times = time_grid(t0, t1, step)
    prop = Propagator(sys, step)
    states = np.empty((len(times), sys.dim))
    states[0] = x0
    phis = None
    if keep_phi:
        phis = np.empty((len(times), sys.dim, sys.dim))
        phis[0] = np.eye(sys.dim)
    for k in range(len(times) - 1):
        states[k + 1] = prop.advance(times[k], states[k], times[k + 1])
        if not np.isfinite(states[k + 1]).all() or np.abs(states[k + 1]).max() > STATE_NORM_LIMIT:
            raise NumericalAbort(
                "state norm exceeded %g at t=%g" % (STATE_NORM_LIMIT, times[k + 1])
            )
        if keep_phi:
            phis[k + 1] = prop.advance(times[k], phis[k], times[k + 1])
    counts = [sign_report(x, zero_tol) for x in states]
    events = locate_events(times, states, counts, prop.advance, zero_tol)
    return Trajectory(
        times=np.asarray(times), states=states, counts=counts, events=events, phi=phis
    )


def check_positivity_condition(sys, t0, t, step, tol=1e-9):
    """Is the transition matrix entrywise positive at time t?

    Requires a Metzler generator at every evaluated time; for a generator that
    is irreducible somewhere in every subinterval this is guaranteed, and for
    a generator that stays reducible over a whole piece some entry stays zero.
    """
    if sys.kind == CONSTANT:
        samples = [sys.matrices[0]]
    elif sys.kind == PIECEWISE:
        idx = {sys.piece_index(tau) for tau in [t0, t] + sys.knots_between(t0, t)}
        samples = [sys.matrices[i] for i in sorted(idx)]
    else:
        knots = [t0] + sys.knots_between(t0, t) + [t]
        samples = [sys.generator(tau) for tau in knots]
    for M in samples:
        off = M[~np.eye(M.shape[0], dtype=bool)]
        if (off < -tol).any():
            raise NotMetzler("generator has a negative off-diagonal entry")
    phi = transition_matrix(sys, t0, t, step)
    return bool((phi > tol).all())
