"""Direct finite-volume solver of the kinetic equation, the scheme-level oracle.

Strang splitting per step: a half step of voltage transport (first-order
upwind by the sign of g, periodic seam at v = V_F), a full implicit step of
the conductance Ornstein-Uhlenbeck flux in exponential-fitting (Chang-Cooper)
form, then the second transport half step.  The exponential-fitting weights
make the implicit matrix an M-matrix, so cell values stay nonnegative, and
the flux form conserves mass to roundoff with no-flux walls in g.  The
nonlinear closure is explicit: each step's drift and diffusion use the firing
rate of the pre-step field (an optional predictor-corrector pass exists for
audits).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field

import numpy as np

from .errors import CflError, ConfigError, DomainError
from .modes import FiringSeries, advance_series
from .params import InitialData, ModelParams

try:
    from numba import njit
except ImportError:                                   # pragma: no cover
    def njit(*args, **kwargs):
        def wrap(fn):
            return fn
        return wrap(args[0]) if args and callable(args[0]) else wrap

CFL_LIMIT = 0.9


@njit(cache=True)
def _transport_half(p, out, nu):
    """One upwind transport substep: out = p - nu_j * (upwind difference)."""
    n_v, n_g = p.shape
    for i in range(n_v):
        im = i - 1 if i > 0 else n_v - 1
        ip = i + 1 if i < n_v - 1 else 0
        for j in range(n_g):
            if nu[j] >= 0.0:
                out[i, j] = p[i, j] - nu[j] * (p[i, j] - p[im, j])
            else:
                out[i, j] = p[i, j] - nu[j] * (p[ip, j] - p[i, j])


@njit(cache=True)
def _transport_half_minmod(p, out, nu):
    """Second-order variant with minmod-limited slopes (audit toggle)."""
    n_v, n_g = p.shape
    for j in range(n_g):
        c = nu[j]
        for i in range(n_v):
            im = i - 1 if i > 0 else n_v - 1
            imm = im - 1 if im > 0 else n_v - 1
            ip = i + 1 if i < n_v - 1 else 0
            ipp = ip + 1 if ip < n_v - 1 else 0
            if c >= 0.0:
                s_up = _minmod(p[i, j] - p[im, j], p[ip, j] - p[i, j])
                s_upm = _minmod(p[im, j] - p[imm, j], p[i, j] - p[im, j])
                f_hi = p[i, j] + 0.5 * (1.0 - c) * s_up
                f_lo = p[im, j] + 0.5 * (1.0 - c) * s_upm
            else:
                s_up = _minmod(p[ip, j] - p[i, j], p[ipp, j] - p[ip, j])
                s_upm = _minmod(p[i, j] - p[im, j], p[ip, j] - p[i, j])
                f_hi = p[ip, j] - 0.5 * (1.0 + c) * s_up
                f_lo = p[i, j] - 0.5 * (1.0 + c) * s_upm
            out[i, j] = p[i, j] - c * (f_hi - f_lo)


@njit(cache=True, inline="always")
def _minmod(a, b):
    if a * b <= 0.0:
        return 0.0
    return a if abs(a) < abs(b) else b


@njit(cache=True)
def _thomas_rows(rhs, lower, diag, upper, out):
    """Solve the shared tridiagonal system for every v-row of ``rhs``."""
    n_v, n_g = rhs.shape
    cp = np.empty(n_g)
    denom = np.empty(n_g)
    denom[0] = diag[0]
    cp[0] = upper[0] / denom[0]
    for j in range(1, n_g):
        denom[j] = diag[j] - lower[j] * cp[j - 1]
        cp[j] = upper[j] / denom[j]
    for i in range(n_v):
        out[i, 0] = rhs[i, 0] / denom[0]
        for j in range(1, n_g):
            out[i, j] = (rhs[i, j] - lower[j] * out[i, j - 1]) / denom[j]
        for j in range(n_g - 2, -1, -1):
            out[i, j] -= cp[j] * out[i, j + 1]


def _bp(w):
    """w / (1 - exp(-w)), the downwind exponential-fitting weight."""
    out = np.empty_like(w)
    small = np.abs(w) < 1e-12
    out[small] = 1.0
    ws = w[~small]
    out[~small] = -ws / np.expm1(-ws)
    return out


@dataclass
class GridField:
    """Nonnegative cell-averaged density on a periodic-v, truncated-g grid."""

    v_centers: np.ndarray
    g_centers: np.ndarray
    p: np.ndarray          # (n_v, n_g), probability density per unit area
    t: float
    v_f: float

    @property
    def dv(self) -> float:
        return self.v_centers[1] - self.v_centers[0]

    @property
    def dg(self) -> float:
        return self.g_centers[1] - self.g_centers[0]

    def mass(self) -> float:
        return float(np.sum(self.p)) * self.dv * self.dg

    def min_density(self) -> float:
        return float(np.min(self.p))

    def first_moment(self) -> float:
        return float(np.sum(self.p @ self.g_centers)) * self.dv * self.dg

    def seam_density(self) -> np.ndarray:
        """Density on the firing line v = V_F (the periodic seam average)."""
        return 0.5 * (self.p[-1, :] + self.p[0, :])

    def g_marginal(self) -> np.ndarray:
        """integral p dv on the g grid."""
        return np.sum(self.p, axis=0) * self.dv

    def boundary_mass(self) -> float:
        """Mass sitting in the two outermost g layers (truncation leakage proxy)."""
        edge = np.sum(self.p[:, :2]) + np.sum(self.p[:, -2:])
        return float(edge) * self.dv * self.dg

    @classmethod
    def from_initial_data(cls, init: InitialData, n_v: int, n_g: int,
                          g_lo: float, g_hi: float) -> "GridField":
        v = (np.arange(n_v) + 0.5) * (init.v_f / n_v)
        g = g_lo + (np.arange(n_g) + 0.5) * ((g_hi - g_lo) / n_g)
        p = np.asarray(init.density(v[:, None], g[None, :]), dtype=float)
        p = np.clip(p, 0.0, None)
        total = np.sum(p) * (v[1] - v[0]) * (g[1] - g[0])
        if total <= 0.0:
            raise ConfigError("initial data has no mass on the chosen grid")
        # renormalize the sampled field so the discrete mass is exactly 1
        return cls(v_centers=v, g_centers=g, p=p / total, t=0.0, v_f=init.v_f)


def firing_rate_grid(field: GridField) -> tuple[float, float]:
    """(clamped, raw) firing rate: integral of g times the seam density over g > 0."""
    g = field.g_centers
    seam = field.seam_density()
    mask = g > 0.0
    raw = float(np.trapezoid(g[mask] * seam[mask], g[mask]))
    return max(raw, 0.0), raw


def _g_step_matrix(field: GridField, gin: float, a: float, eps: float, dt: float):
    g_edges = field.g_centers[:-1] + 0.5 * field.dg
    w = (g_edges - gin) * field.dg / a
    bp = _bp(w)
    bm = bp - w                       # w/(e^w - 1)
    n_g = len(field.g_centers)
    scale = dt * a / (eps * field.dg ** 2)
    lower = np.zeros(n_g)
    diag = np.ones(n_g)
    upper = np.zeros(n_g)
    upper[:-1] = -scale * bp
    lower[1:] = -scale * bm
    diag[:-1] += scale * bm
    diag[1:] += scale * bp
    return lower, diag, upper


def check_cfl(field: GridField, dt: float) -> None:
    speed = float(np.max(np.abs(field.g_centers)))
    if dt * speed / field.dv > CFL_LIMIT + 1e-12:
        raise CflError(
            f"dt={dt:.3e} violates CFL: dt*max|g|/dv = {dt * speed / field.dv:.3f} > {CFL_LIMIT}")


def cfl_dt(field: GridField) -> float:
    return CFL_LIMIT * field.dv / float(np.max(np.abs(field.g_centers)))


def step(field: GridField, params: ModelParams, dt: float,
         transport_only: bool = False, second_order: bool = False,
         predictor_corrector: bool = False) -> GridField:
    """Advance one Strang-split step; mass-conserving and positivity-preserving."""
    if params.epsilon <= 0.0:
        raise DomainError("grid solver requires epsilon > 0")
    check_cfl(field, dt)
    n_clamped, _ = firing_rate_grid(field)
    gin = params.g0 + params.g1 * n_clamped
    a = params.a0 + params.a1 * n_clamped
    if predictor_corrector and not transport_only:
        trial = GridField(v_centers=field.v_centers, g_centers=field.g_centers,
                          p=_apply_split(field, gin, a, params.epsilon, dt, second_order),
                          t=field.t + dt, v_f=field.v_f)
        n_mid, _ = firing_rate_grid(trial)
        n_use = 0.5 * (n_clamped + max(n_mid, 0.0))
        gin = params.g0 + params.g1 * n_use
        a = params.a0 + params.a1 * n_use
    if transport_only:
        out = _apply_transport_only(field, dt, second_order)
    else:
        out = _apply_split(field, gin, a, params.epsilon, dt, second_order)
    return GridField(v_centers=field.v_centers, g_centers=field.g_centers,
                     p=out, t=field.t + dt, v_f=field.v_f)


def _apply_split(field: GridField, gin: float, a: float, eps: float, dt: float,
                 second_order: bool) -> np.ndarray:
    nu = field.g_centers * (0.5 * dt / field.dv)
    kernel = _transport_half_minmod if second_order else _transport_half
    buf1 = np.empty_like(field.p)
    kernel(field.p, buf1, nu)
    lower, diag, upper = _g_step_matrix(field, gin, a, eps, dt)
    buf2 = np.empty_like(field.p)
    _thomas_rows(buf1, lower, diag, upper, buf2)
    kernel(buf2, buf1, nu)
    return buf1


def _apply_transport_only(field: GridField, dt: float, second_order: bool) -> np.ndarray:
    nu = field.g_centers * (0.5 * dt / field.dv)
    kernel = _transport_half_minmod if second_order else _transport_half
    buf1 = np.empty_like(field.p)
    buf2 = np.empty_like(field.p)
    kernel(field.p, buf1, nu)
    kernel(buf1, buf2, nu)
    return buf2


def auto_g_bounds(init: InitialData, params: ModelParams, t_end: float):
    """Domain [-10, center + 12 sqrt(c_max)] sized from a cheap moment-ODE scout."""
    from .moment_ode import integrate
    from .firing import GaussianState

    if init.kind == "v-homogeneous":
        comps = init.components
    elif init.kind == "separable-sum":
        comps = [(t.mean, t.variance, t.weight) for t in init.terms]
    else:
        g = init.g_nodes
        return float(g[0]), float(g[-1])
    m0 = max(m for m, _, _ in comps)
    s0 = max(s for _, s, _ in comps)
    scout = integrate(GaussianState(m0, s0), params, t_end=max(t_end, 1.0), dt=1e-2)
    b_max = float(np.max(scout.b))
    c_max = float(np.max(scout.c))
    hi = max(b_max, m0) + 12.0 * math.sqrt(max(c_max, s0))
    return -10.0, hi


@dataclass
class PdeResult:
    series: FiringSeries
    final_field: GridField
    diagnostics: dict = dc_field(default_factory=dict)
    snapshots: list = dc_field(default_factory=list)


def run(init: InitialData, params: ModelParams, t_end: float, dt: float | None = None,
        n_v: int = 256, n_g: int = 256, g_lo: float | None = None,
        g_hi: float | None = None, snapshot_times: tuple[float, ...] = (),
        second_order: bool = False, predictor_corrector: bool = False) -> PdeResult:
    """March the split scheme to ``t_end`` recording the firing-rate series.

    ``dt`` defaults to the CFL limit (and is capped at epsilon/10 so the
    conductance relaxation stays resolved).  Diagnostics report mass drift
    per unit time, the minimum cell value seen, and the worst boundary-layer
    mass as the truncation-leakage budget.
    """
    params.validate()
    if params.epsilon <= 0.0:
        raise DomainError("grid solver requires epsilon > 0")
    if init.v_f != params.v_f:
        raise ConfigError("initial data v_f must match params v_f")
    if g_lo is None or g_hi is None:
        lo_auto, hi_auto = auto_g_bounds(init, params, t_end)
        g_lo = lo_auto if g_lo is None else g_lo
        g_hi = hi_auto if g_hi is None else g_hi
    field = GridField.from_initial_data(init, n_v, n_g, g_lo, g_hi)
    if dt is None:
        dt = min(cfl_dt(field), params.epsilon / 10.0)
    n_steps = max(int(math.ceil(t_end / dt - 1e-9)), 1)
    dt = t_end / n_steps
    check_cfl(field, dt)

    n0, n0_raw = firing_rate_grid(field)
    series = FiringSeries(params, dt, n0_raw)
    min_density = field.min_density()
    mass0 = field.mass()
    mass_lo = mass_hi = mass0
    boundary_worst = field.boundary_mass()
    snapshots = []
    snap_left = sorted(snapshot_times)
    for i in range(n_steps):
        field = step(field, params, dt, second_order=second_order,
                     predictor_corrector=predictor_corrector)
        _, raw = firing_rate_grid(field)
        advance_series(series, max(raw, 0.0), params, n_raw=raw)
        if (i + 1) % 50 == 0 or i == n_steps - 1:
            min_density = min(min_density, field.min_density())
            m = field.mass()
            mass_lo, mass_hi = min(mass_lo, m), max(mass_hi, m)
            boundary_worst = max(boundary_worst, field.boundary_mass())
        while snap_left and field.t >= snap_left[0] - 0.5 * dt:
            snapshots.append((snap_left.pop(0), field))
    drift = max(abs(mass_hi - mass0), abs(mass_lo - mass0)) / max(t_end, 1e-12)
    diagnostics = {
        "mass_initial": mass0,
        "mass_drift_per_unit_time": drift,
        "min_density": min_density,
        "boundary_mass_worst": boundary_worst,
        "dt": dt,
        "n_steps": n_steps,
    }
    return PdeResult(series=series, final_field=field,
                     diagnostics=diagnostics, snapshots=snapshots)


def run_eps_sweep(init: InitialData, params: ModelParams, eps_list, t_end: float,
                  dt: float | None = None, output_dt: float | None = None,
                  **kwargs) -> dict:
    """Run the grid solver for each epsilon; firing series on a shared output grid.

    Returns {eps: (FiringSeries, t_out, n_out, diagnostics)} with n_out the
    firing rate linearly interpolated to the common output times.
    """
    for eps in eps_list:
        if eps <= 0.0:
            raise DomainError("every epsilon in the sweep must be positive")
    if output_dt is None:
        output_dt = t_end / 600.0
    t_out = np.arange(0.0, t_end + 0.5 * output_dt, output_dt)
    out = {}
    for eps in eps_list:
        p_eps = ModelParams(g0=params.g0, g1=params.g1, a0=params.a0, a1=params.a1,
                            v_f=params.v_f, epsilon=eps)
        res = run(init, p_eps, t_end, dt=dt, **kwargs)
        times = res.series.times
        n_vals = res.series.N
        n_out = np.interp(t_out, times, n_vals)
        out[eps] = (res.series, t_out, n_out, res.diagnostics)
    return out
