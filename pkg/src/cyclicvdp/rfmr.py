"""Ribosome flow model on a ring.

n sites sit on a ring, each with an occupancy in [0,1]; material moves from
site i to site i+1 (indices mod n) at rate rates[i] * x_i * (1 - x_{i+1}).
The unit cube is invariant, total occupancy is conserved, and the Jacobian is
a Metzler matrix whose nonzeros live on the tridiagonal band plus the two ring
corners, so the variational system dz/dt = J(x(t)) z diminishes cyclic sign
variations; simulate_with_variational co-integrates x and z and monitors the
counters of z.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    InadmissibleState,
    NonpositiveParameter,
    NumericalAbort,
    OutOfUnitCube,
    ShapeError,
    ZeroInitialCondition,
)
from .lindyn import (
    STATE_NORM_LIMIT,
    Trajectory,
    locate_events,
    time_grid,
)
from .signvar import DEFAULT_ZERO_TOL, sign_report

# Cube violations up to this size are integrator noise and get clamped;
# anything larger aborts the run.
CUBE_SLACK = 1e-9


@dataclass
class RfmrParams:
    """Ring size and the n positive transfer rates (rates[i] feeds site i+2 from site i+1, 1-based)."""

    n: int
    rates: np.ndarray

    def __post_init__(self):
        self.rates = np.asarray(self.rates, dtype=float)
        if self.n < 2:
            raise ShapeError("the ring needs at least 2 sites")
        if self.rates.shape != (self.n,):
            raise ShapeError("need exactly one rate per site")
        if (self.rates <= 0).any():
            raise NonpositiveParameter("all transfer rates must be positive")


def _check_cube(x, n, slack=CUBE_SLACK):
    x = np.asarray(x, dtype=float)
    if x.shape != (n,):
        raise ShapeError("state must be a vector of dimension %d" % n)
    if (x < -slack).any() or (x > 1 + slack).any():
        raise OutOfUnitCube("state leaves the unit cube by more than %g" % slack)
    return np.clip(x, 0.0, 1.0)


def rfmr_rhs(params, x):
    """Occupancy derivative: inflow from the previous site minus outflow to the next."""
    x = _check_cube(x, params.n)
    lam = params.rates
    inflow = np.roll(lam, 1) * np.roll(x, 1) * (1.0 - x)
    outflow = lam * x * (1.0 - np.roll(x, -1))
    return inflow - outflow


def link_flows(params, x):
    """Per-link flow rates[i] * x_i * (1 - x_{i+1}), one per site."""
    x = _check_cube(x, params.n)
    return params.rates * x * (1.0 - np.roll(x, -1))


def rfmr_jacobian(params, x):
    """Jacobian of the ring dynamics at state x.

    Contributions are accumulated per modular neighbor so the n=2 ring, where
    the two off-diagonal positions coincide, comes out right.
    """
    x = _check_cube(x, params.n)
    n = params.n
    lam = params.rates
    J = np.zeros((n, n))
    for i in range(n):
        im = (i - 1) % n
        ip = (i + 1) % n
        J[i, im] += lam[im] * (1.0 - x[i])
        J[i, ip] += lam[i] * x[i]
        J[i, i] = -(lam[im] * x[im] + lam[i] * (1.0 - x[ip]))
    return J


def _admissible_x0(x0, n):
    x0 = np.asarray(x0, dtype=float)
    if x0.shape != (n,):
        raise ShapeError("initial occupancy must be a vector of dimension %d" % n)
    if (x0 < 0).any() or (x0 > 1).any():
        raise InadmissibleState("initial occupancy must lie in the unit cube")
    if (x0 == 0).all() or (x0 == 1).all():
        raise InadmissibleState("the all-empty and all-full states are equilibria; pick another start")
    return x0


def simulate_with_variational(params, x0, z0, t1, step, zero_tol=DEFAULT_ZERO_TOL, t0=0.0):
    """Co-integrate the ring state x and the variational vector z = J(x) z.

    One RK4 step function advances the joint (x, z) state so z always sees the
    same x samples.  Returns (trajectory of x, trajectory of z); the z
    trajectory carries the sign-count series and localized events.
    """
    n = params.n
    x0 = _admissible_x0(x0, n)
    z0 = np.asarray(z0, dtype=float)
    if z0.shape != (n,):
        raise ShapeError("variational state must be a vector of dimension %d" % n)
    if float(np.abs(z0).max()) == 0.0:
        raise ZeroInitialCondition("variational state must be nonzero")

    lam = params.rates
    lam_prev = np.roll(lam, 1)

    def f(y):
        # fused right-hand side of the joint system; equivalent to
        # (rfmr_rhs(x), rfmr_jacobian(x) @ z) but without matrix assembly
        x = y[:n]
        z = y[n:]
        xm = np.roll(x, 1)
        xp = np.roll(x, -1)
        dx = lam_prev * xm * (1.0 - x) - lam * x * (1.0 - xp)
        dz = (
            lam_prev * (1.0 - x) * np.roll(z, 1)
            + lam * x * np.roll(z, -1)
            - (lam_prev * xm + lam * (1.0 - xp)) * z
        )
        return np.concatenate([dx, dz])

    def advance(t_from, y, t_to):
        span = t_to - t_from
        if span <= 0:
            return y
        nsteps = max(1, int(math.ceil(span / step - 1e-12)))
        h = span / nsteps
        for _ in range(nsteps):
            k1 = f(y)
            k2 = f(y + 0.5 * h * k1)
            k3 = f(y + 0.5 * h * k2)
            k4 = f(y + h * k3)
            y = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
            x = y[:n]
            if (x < -CUBE_SLACK).any() or (x > 1 + CUBE_SLACK).any():
                raise NumericalAbort(
                    "occupancy left the unit cube by more than %g; reduce the step" % CUBE_SLACK
                )
            np.clip(x, 0.0, 1.0, out=y[:n])
            if not np.isfinite(y).all() or np.abs(y).max() > STATE_NORM_LIMIT:
                raise NumericalAbort("variational state blew up")
        return y

    times = time_grid(t0, t1, step)
    joint = np.empty((len(times), 2 * n))
    joint[0] = np.concatenate([x0, z0])
    for k in range(len(times) - 1):
        joint[k + 1] = advance(times[k], joint[k], times[k + 1])
    xs = joint[:, :n].copy()
    zs = joint[:, n:].copy()
    counts_x = [sign_report(x, zero_tol) for x in xs]
    counts_z = [sign_report(z, zero_tol) for z in zs]
    events_z = locate_events(
        np.asarray(times), joint, counts_z, advance, zero_tol, project=lambda y: y[n:]
    )
    traj_x = Trajectory(times=np.asarray(times), states=xs, counts=counts_x, events=[])
    traj_z = Trajectory(times=np.asarray(times), states=zs, counts=counts_z, events=events_z)
    return traj_x, traj_z
