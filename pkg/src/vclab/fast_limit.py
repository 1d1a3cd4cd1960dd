"""Fast-conductance-limit model: nonlinear transport of the voltage marginal.

In the internal transport time tau the profile is rigidly advected,
rho(t, v) = rho_init(v - tau), and physical time is recovered from
dt/dtau = 1/g_in(tau).  The firing rate at each tau solves the scalar
fixed point N = rho_bar * V_F * N(g0 + g1 N, a0 + a1 N) with
rho_bar = rho_init((V_F - tau) mod V_F), which loses solvability exactly
when rho_bar reaches 1/g1.  Consequently the solution is periodic when
max rho_init < 1/g1 and otherwise the firing rate blows up at a finite
time no later than V_F/g0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, DomainError
from .firing import solve_limit_firing
from .params import InitialData, ModelParams

DEFAULT_NODES = 4096


@dataclass(frozen=True)
class FclState:
    """Tabulated continuous voltage profile with matching endpoint values."""

    v_nodes: np.ndarray     # uniform, includes 0 and V_F
    values: np.ndarray
    v_f: float

    def validate(self) -> None:
        if np.any(self.values < 0.0):
            raise ConfigError("profile must be nonnegative")
        if abs(self.values[0] - self.values[-1]) > 1e-12:
            raise ConfigError("profile must match at v=0 and v=V_F")
        mass = float(np.trapezoid(self.values, self.v_nodes))
        if abs(mass - 1.0) > 1e-10:
            raise ConfigError(f"profile mass must be 1, got {mass:.17g}")
        dv = np.diff(self.v_nodes)
        if not np.allclose(dv, dv[0], rtol=1e-12, atol=0.0):
            raise ConfigError("v_nodes must be uniform")

    def rho(self, v):
        """Linear interpolation with periodic wrap."""
        vv = np.mod(v, self.v_f)
        return np.interp(vv, self.v_nodes, self.values)

    def max_value(self) -> float:
        return float(np.max(self.values))

    @classmethod
    def from_callable(cls, fn, v_f: float, n_nodes: int = DEFAULT_NODES + 1) -> "FclState":
        v = np.linspace(0.0, v_f, n_nodes)
        vals = np.asarray(fn(v), dtype=float)
        state = cls(v_nodes=v, values=vals, v_f=v_f)
        state.validate()
        return state

    @classmethod
    def from_initial_data(cls, init: InitialData, n_nodes: int = DEFAULT_NODES + 1) -> "FclState":
        return cls.from_callable(lambda v: init.v_marginal(v), init.v_f, n_nodes)


def firing_at_tau(tau: float, state: FclState, params: ModelParams) -> float:
    """Firing rate at transport time tau; ``inf`` marks blow-up."""
    if tau < 0.0:
        raise DomainError("tau must be nonnegative")
    rho_bar = float(state.rho((state.v_f - tau) % state.v_f))
    return solve_limit_firing(rho_bar, params)


def threshold_g1(state: FclState) -> float:
    """Feedback gain below which the solution is periodic: 1 / max(rho_init)."""
    return 1.0 / state.max_value()


@dataclass(frozen=True)
class FclOutcome:
    kind: str                      # "periodic" | "blowup"
    period: float | None = None
    blowup_time: float | None = None
    v_star: float | None = None
    tau_star: float | None = None

    def to_json_dict(self) -> dict:
        if self.kind == "periodic":
            return {"type": "periodic", "T": self.period}
        return {"type": "blowup", "T_star": self.blowup_time, "v_star": self.v_star}


@dataclass(frozen=True)
class FclResult:
    outcome: FclOutcome
    times: np.ndarray
    taus: np.ndarray
    firing: np.ndarray
    rho_at_vf: np.ndarray


def _largest_crossing(state: FclState, level: float) -> float:
    """Largest v with rho(v) = level and rho < level on (v, V_F].

    The profile is scanned from v = V_F downward; a plateau exactly at the
    level resolves to its largest node.
    """
    vals = state.values
    nodes = state.v_nodes
    n = len(nodes)
    for i in range(n - 1, -1, -1):
        if vals[i] >= level:
            if vals[i] == level:
                return float(nodes[i])
            # crossing inside (nodes[i], nodes[i+1]); bisect the interpolant
            lo, hi = nodes[i], nodes[i + 1]
            for _ in range(80):
                mid = 0.5 * (lo + hi)
                if state.rho(mid) >= level:
                    lo = mid
                else:
                    hi = mid
            return float(0.5 * (lo + hi))
    raise ConfigError("profile never reaches the level")  # pragma: no cover


def evolve(state: FclState, params: ModelParams, t_end: float,
           dtau: float | None = None) -> FclResult:
    """March the transported profile, classifying the outcome.

    Periodic case: the trajectory covers [0, t_end] and the period is the
    tau-quadrature of 1/g_in over one profile revolution.  Blow-up case: the
    trajectory stops at tau* = V_F - v*, with the blow-up time bounded by
    V_F/g0.  A profile already at or above 1/g1 on the firing line blows up
    at t = 0.
    """
    params.validate()
    state.validate()
    if params.g1 == 0.0:
        raise ConfigError("the limit model requires g1 > 0")
    v_f = state.v_f
    if dtau is None:
        dtau = v_f / DEFAULT_NODES
    m_per_period = max(int(round(v_f / dtau)), 1)
    dtau = v_f / m_per_period
    level = 1.0 / params.g1

    rho_vf0 = float(state.rho(v_f))
    if rho_vf0 >= level:
        outcome = FclOutcome(kind="blowup", blowup_time=0.0, v_star=v_f, tau_star=0.0)
        return FclResult(outcome=outcome, times=np.zeros(1), taus=np.zeros(1),
                         firing=np.array([math.inf]), rho_at_vf=np.array([rho_vf0]))

    blows_up = state.max_value() >= level
    tau_star = v_f - _largest_crossing(state, level) if blows_up else None

    n_cache: dict[int, float] = {}

    def n_at(m: int) -> float:
        key = m % m_per_period
        if key not in n_cache:
            n_cache[key] = firing_at_tau(key * dtau, state, params)
        return n_cache[key]

    taus = [0.0]
    times = [0.0]
    firing = [n_at(0)]
    rho_vf = [rho_vf0]
    gin_prev = params.g0 + params.g1 * firing[0]
    m = 0
    while True:
        m += 1
        tau = m * dtau
        if blows_up and tau >= tau_star:
            break
        n_here = n_at(m)
        gin = params.g0 + params.g1 * n_here
        times.append(times[-1] + 0.5 * dtau * (1.0 / gin_prev + 1.0 / gin))
        taus.append(tau)
        firing.append(n_here)
        rho_vf.append(float(state.rho((v_f - tau) % v_f)))
        gin_prev = gin
        if not blows_up and times[-1] >= t_end:
            break
        if blows_up and tau_star is not None and tau > tau_star + v_f:
            break  # pragma: no cover

    if blows_up:
        # close the quadrature on [last tau, tau*]; 1/g_in -> 0 at tau*
        t_star = times[-1] + 0.5 * (tau_star - taus[-1]) * (1.0 / gin_prev)
        outcome = FclOutcome(kind="blowup", blowup_time=t_star,
                             v_star=v_f - tau_star, tau_star=tau_star)
    else:
        period_t = 0.0
        for i in range(m_per_period):
            g_a = params.g0 + params.g1 * n_at(i)
            g_b = params.g0 + params.g1 * n_at(i + 1)
            period_t += 0.5 * dtau * (1.0 / g_a + 1.0 / g_b)
        outcome = FclOutcome(kind="periodic", period=period_t)
    return FclResult(outcome=outcome, times=np.asarray(times), taus=np.asarray(taus),
                     firing=np.asarray(firing), rho_at_vf=np.asarray(rho_vf))
