"""Autonomous ODE for the mean and variance of the Gaussian conductance profile.

    db/dt = g0 + g1 N(b, c) - b
    dc/dt = 2 a0 + 2 a1 N(b, c) - 2 c

The system is cooperative (both off-diagonal Jacobian entries positive), so
every bounded trajectory is eventually monotone in each component.  For
g1/V_F < 1 there is a unique, linearly stable steady state which attracts all
initial data with c(0) > 0; for g1/V_F >= 1 the firing rate diverges.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, IntegrationDivergedError
from .firing import GaussianState, firing_rate, firing_rate_grad
from .params import ModelParams

DIVERGENCE_THRESHOLD = 1e6
STEADY_TOL = 1e-12


@dataclass(frozen=True)
class OdeTrajectory:
    times: np.ndarray
    b: np.ndarray
    c: np.ndarray
    firing: np.ndarray
    diverged: bool = False

    @property
    def states(self) -> list[GaussianState]:
        return [GaussianState(bi, ci) for bi, ci in zip(self.b, self.c)]

    def final_state(self) -> GaussianState:
        return GaussianState(float(self.b[-1]), float(self.c[-1]))


@dataclass(frozen=True)
class SteadyStateReport:
    b_star: float
    c_star: float
    trace: float
    det: float
    stable: bool
    lower_bounds: tuple[float, float]


@dataclass(frozen=True)
class Classification:
    kind: str                       # "convergent" | "divergent"
    steady: SteadyStateReport | None = None


def rhs(state: GaussianState, params: ModelParams) -> tuple[float, float]:
    n = firing_rate(state.b, state.c, params.v_f)
    return (
        params.g0 + params.g1 * n - state.b,
        2.0 * params.a0 + 2.0 * params.a1 * n - 2.0 * state.c,
    )


def _rhs_raw(b: float, c: float, params: ModelParams) -> tuple[float, float]:
    if c <= 0.0:
        raise DomainError(f"variance went nonpositive during a step (c={c})")
    n = firing_rate(b, c, params.v_f)
    return (params.g0 + params.g1 * n - b,
            2.0 * params.a0 + 2.0 * params.a1 * n - 2.0 * c)


def integrate(initial: GaussianState, params: ModelParams, t_end: float,
              dt: float, validate_halving: bool = False) -> OdeTrajectory:
    """Fixed-step RK4 integration from ``initial`` up to ``t_end``.

    Stops early (with ``diverged=True``) once b exceeds 1e6; a non-finite
    state raises :class:`IntegrationDivergedError` carrying the last valid
    state.  ``validate_halving`` repeats the run at dt/2 and raises if the
    final states disagree by more than 100 * dt**4.
    """
    params.validate()
    if dt <= 0.0 or t_end <= 0.0:
        raise DomainError("dt and t_end must be positive")
    n_steps = int(round(t_end / dt))
    b = np.empty(n_steps + 1)
    c = np.empty(n_steps + 1)
    b[0], c[0] = initial.b, initial.c
    diverged = False
    i = 0
    for i in range(n_steps):
        bi, ci = b[i], c[i]
        try:
            k1 = _rhs_raw(bi, ci, params)
            k2 = _rhs_raw(bi + 0.5 * dt * k1[0], ci + 0.5 * dt * k1[1], params)
            k3 = _rhs_raw(bi + 0.5 * dt * k2[0], ci + 0.5 * dt * k2[1], params)
            k4 = _rhs_raw(bi + dt * k3[0], ci + dt * k3[1], params)
        except (DomainError, FloatingPointError) as exc:
            raise IntegrationDivergedError(
                f"step {i} produced an invalid state: {exc}",
                (i * dt, float(bi), float(ci))) from exc
        b[i + 1] = bi + dt / 6.0 * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0])
        c[i + 1] = ci + dt / 6.0 * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1])
        if not (math.isfinite(b[i + 1]) and math.isfinite(c[i + 1])):
            raise IntegrationDivergedError(
                f"step {i} produced a non-finite state",
                (i * dt, float(bi), float(ci)))
        if b[i + 1] > DIVERGENCE_THRESHOLD:
            diverged = True
            i += 1
            break
    n_done = i + 1 if n_steps else 1
    times = dt * np.arange(n_done if diverged else n_steps + 1)
    b = b[: len(times)]
    c = c[: len(times)]
    traj = OdeTrajectory(times=times, b=b, c=c,
                         firing=firing_rate(b, c, params.v_f), diverged=diverged)
    if validate_halving and not diverged:
        fine = integrate(initial, params, t_end, 0.5 * dt)
        gap = abs(fine.b[-1] - traj.b[-1]) + abs(fine.c[-1] - traj.c[-1])
        if gap > 100.0 * dt ** 4 + 1e-10:
            raise IntegrationDivergedError(
                f"step-halving validation failed: gap {gap:.3e} at dt={dt}",
                (t_end, float(traj.b[-1]), float(traj.c[-1])))
    return traj


def _beta(c, params: ModelParams):
    return params.g0 + (params.g1 / params.a1) * (c - params.a0)


def _steady_residual(c, params: ModelParams):
    return params.a0 + params.a1 * firing_rate(_beta(c, params), c, params.v_f) - c


def _bisect(f, lo, hi, tol):
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        val = f(mid)
        if abs(val) <= tol:
            return mid
        if val > 0.0:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 2.0 * np.spacing(abs(hi)):
            break
    return 0.5 * (lo + hi)


def steady_state(params: ModelParams) -> SteadyStateReport | None:
    """Unique steady state for g1/V_F < 1, found by bisection; None otherwise.

    The mean is eliminated through b = beta(c), leaving a scalar root problem
    F(c) = a0 + a1 N(beta(c), c) - c on (a0, infinity); F(a0) > 0 and F is
    eventually negative, which brackets the root.  In the frozen-diffusion
    test mode a1 = 0 the variance is a0 exactly and the mean is solved alone.
    """
    params.validate()
    if params.g1 / params.v_f >= 1.0:
        return None
    if params.a1 == 0.0:
        c_star = params.a0

        def resid_b(b):
            return params.g0 + params.g1 * firing_rate(b, c_star, params.v_f) - b

        hi = max(2.0 * params.g0, 1.0)
        while resid_b(hi) >= 0.0:
            hi *= 2.0
        b_star = _bisect(resid_b, params.g0, hi, STEADY_TOL)
    else:
        lo = params.a0
        hi = 2.0 * params.a0
        while _steady_residual(hi, params) >= 0.0:
            hi *= 2.0
        c_star = _bisect(lambda c: _steady_residual(c, params), lo, hi, STEADY_TOL)
        b_star = _beta(c_star, params)
    jac = jacobian(GaussianState(b_star, c_star), params)
    trace = float(np.trace(jac))
    det = float(np.linalg.det(jac))
    b_lower = params.g0 / (1.0 - params.g1 / params.v_f)
    c_lower = params.a0 + (params.a1 / params.v_f) * b_lower
    return SteadyStateReport(
        b_star=b_star, c_star=c_star, trace=trace, det=det,
        stable=(trace < 0.0 and det > 0.0),
        lower_bounds=(b_lower, c_lower),
    )


def jacobian(state: GaussianState, params: ModelParams) -> np.ndarray:
    """Linearization of the right-hand side at ``state`` (2x2 array)."""
    d_b, d_c = firing_rate_grad(state.b, state.c, params.v_f)
    return np.array([
        [params.g1 * d_b - 1.0, params.g1 * d_c],
        [2.0 * params.a1 * d_b, 2.0 * params.a1 * d_c - 2.0],
    ])


def classify(params: ModelParams) -> Classification:
    """Long-time dichotomy: convergent iff g1/V_F < 1 (tie counts as divergent)."""
    params.validate()
    if params.g1 / params.v_f < 1.0:
        return Classification(kind="convergent", steady=steady_state(params))
    return Classification(kind="divergent")
