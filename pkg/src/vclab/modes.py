"""Semi-explicit Fourier-mode solver for the kinetic model at any epsilon > 0.

Each voltage mode k evolves as a frequency-shifted convolution of the shrunk
initial coefficient with a drifting Gaussian kernel whose mean B(t), variance
C(t), phase slope kappa(t) and damping exponent D(t) are exponentially
weighted integrals of the firing-rate history.  Because the initial
coefficients are Gaussian mixtures (tabulated data enters as point-mass
quadrature), the convolution, the mode profiles and the per-mode firing
contributions all have closed forms; no shrinkage profile is ever put on a
grid.  The only discretization is the time stepping of the weighted
integrals, which uses exact exponential kernels against piecewise-linear
coefficient histories, and the per-step damped fixed point that closes the
firing-rate nonlinearity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import wofz

from .errors import ConfigError, DomainError, StepFailureError
from .params import InitialData, ModeCoeff, ModelParams, fourier_init_coeffs

FIXED_POINT_ABS_TOL = 1e-10
FIXED_POINT_MAX_ITER = 50
_DAMPING = 0.5
_SQRT2PI = math.sqrt(2.0 * math.pi)


def _f1(x):
    """(1 - exp(-x)) / x for x > 0."""
    return -np.expm1(-x) / x


def _f2(x):
    """(1 - (1 + x) exp(-x)) / x**2, series branch for small x."""
    if x < 1e-3:
        return x * (x * (x / 144.0 - 1.0 / 30.0) + 1.0 / 8.0) * x - x / 3.0 + 0.5
    return (-math.expm1(-x) - x * math.exp(-x)) / (x * x)


def _kernel_integral(rate: float, c0: float, c1: float, dt: float) -> float:
    """integral_0^dt exp(-rate (dt - s)) (c0 + c1 s) ds, exact."""
    x = rate * dt
    f1 = _f1(x)
    return c0 * dt * f1 + c1 * dt * dt * (f1 - _f2(x))


@dataclass(frozen=True)
class SeriesState:
    """All weighted integrals of the firing history at one instant."""

    t: float
    n: float          # clamped firing rate
    n_raw: float      # as summed over modes, before clamping
    gin: float
    a: float
    B: float
    C: float
    I1: float
    I2: float
    Ia: float
    Ig: float

    @property
    def kappa(self) -> float:
        return self.I1 / self.I2 if self.I2 > 0.0 else 1.0

    def decay_exponent(self, eps: float) -> float:
        """D(t) = Ia/eps - I1**2 / (eps I2), nonnegative by Cauchy-Schwarz."""
        if self.I2 <= 0.0:
            return 0.0
        return self.Ia / eps - self.I1 * self.I1 / (eps * self.I2)


def _advance_state(st: SeriesState, n_new_raw: float, params: ModelParams,
                   dt: float) -> SeriesState:
    eps = params.epsilon
    n_new = max(n_new_raw, 0.0)
    gin_new = params.g0 + params.g1 * n_new
    a_new = params.a0 + params.a1 * n_new
    slope_g = (gin_new - st.gin) / dt
    slope_a = (a_new - st.a) / dt
    e1 = math.exp(-dt / eps)
    e2 = math.exp(-2.0 * dt / eps)
    k1g = _kernel_integral(1.0 / eps, st.gin, slope_g, dt)
    k1a = _kernel_integral(1.0 / eps, st.a, slope_a, dt)
    k2a = _kernel_integral(2.0 / eps, st.a, slope_a, dt)
    return SeriesState(
        t=st.t + dt,
        n=n_new,
        n_raw=n_new_raw,
        gin=gin_new,
        a=a_new,
        B=e1 * st.B + k1g / eps,
        C=e2 * st.C + 2.0 * k2a / eps,
        I1=e1 * st.I1 + k1a,
        I2=e2 * st.I2 + k2a,
        Ia=st.Ia + 0.5 * dt * (st.a + a_new),
        Ig=st.Ig + 0.5 * dt * (st.gin + gin_new),
    )


class FiringSeries:
    """Uniform-time record of the firing rate and its weighted integrals."""

    def __init__(self, params: ModelParams, dt: float, n0_raw: float):
        params.validate()
        if params.epsilon <= 0.0:
            raise DomainError("mode solver requires epsilon > 0")
        if dt <= 0.0:
            raise DomainError("dt must be positive")
        self.params = params
        self.dt = dt
        n0 = max(n0_raw, 0.0)
        self._states: list[SeriesState] = [SeriesState(
            t=0.0, n=n0, n_raw=n0_raw,
            gin=params.g0 + params.g1 * n0, a=params.a0 + params.a1 * n0,
            B=0.0, C=0.0, I1=0.0, I2=0.0, Ia=0.0, Ig=0.0)]

    def __len__(self) -> int:
        return len(self._states)

    @property
    def t_end(self) -> float:
        return self._states[-1].t

    def state(self, i: int) -> SeriesState:
        return self._states[i]

    def last(self) -> SeriesState:
        return self._states[-1]

    def index_of(self, t: float) -> int:
        i = int(round(t / self.dt))
        if i < 0 or i >= len(self._states) or abs(i * self.dt - t) > 1e-9 * max(1.0, t):
            raise DomainError(f"t={t} is not on the series grid [0, {self.t_end}]")
        return i

    @property
    def times(self) -> np.ndarray:
        return np.array([s.t for s in self._states])

    def column(self, name: str) -> np.ndarray:
        return np.array([getattr(s, name) for s in self._states])

    @property
    def N(self) -> np.ndarray:
        return self.column("n")

    @property
    def D(self) -> np.ndarray:
        eps = self.params.epsilon
        return np.array([s.decay_exponent(eps) for s in self._states])


def advance_series(series: FiringSeries, n_new: float, params: ModelParams,
                   n_raw: float | None = None) -> FiringSeries:
    """Append one step with firing sample ``n_new`` (>= 0); returns the series."""
    if n_new < 0.0:
        raise DomainError(f"firing sample must be nonnegative, got {n_new}")
    if params != series.params:
        raise ConfigError("params must match the series")
    series._states.append(_advance_state(
        series.last(), n_new if n_raw is None else n_raw, params, series.dt))
    return series


# -- closed-form mode evaluation ------------------------------------------------

@dataclass(frozen=True)
class _ModeTerms:
    """Per-term quantities of one mode profile at one time.

    profile(g) = sum_j amp[j] * exp(i gamma[j] g) * Gauss(g; mean[j], var[j])
    """

    amp: np.ndarray      # complex
    gamma: np.ndarray    # real phase slope
    mean: np.ndarray
    var: np.ndarray


def _mode_terms(k: int, coeff: ModeCoeff, st: SeriesState, params: ModelParams) -> _ModeTerms:
    eps = params.epsilon
    mu_k = k * 2.0 * math.pi / params.v_f
    r = math.exp(-st.t / eps)
    s = coeff.variances
    m = coeff.means
    S = st.C + r * r * s
    M = st.B + r * m
    kappa = st.kappa
    beta = eps * mu_k * (1.0 - kappa * r)
    gamma = eps * mu_k * (1.0 - kappa) - beta * r * s / S
    sbar = s * st.C / S
    d_exp = st.decay_exponent(eps)
    phase = (-1j * mu_k * st.Ig
             + 1j * eps * mu_k * kappa * st.B
             - 1j * beta * (m * st.C - r * s * st.B) / S
             - 0.5 * beta * beta * sbar
             - (eps * mu_k) ** 2 * d_exp)
    return _ModeTerms(amp=coeff.amps * np.exp(phase), gamma=gamma, mean=M, var=S)


def _gauss_half_moment(gamma, mean, var):
    """integral_0^inf g exp(i gamma g) Gauss(g; mean, var) dg, overflow-safe.

    Splits into sqrt(var/2pi) exp(-mean^2/(2 var)) plus (mean + i gamma var)
    times the phase-shifted Gaussian tail weight, evaluated through the
    scaled Faddeeva function so large phases never overflow.
    """
    gamma = np.asarray(gamma, dtype=float)
    mean = np.asarray(mean, dtype=float)
    var = np.asarray(var, dtype=float)
    s2 = np.sqrt(2.0 * var)
    core = np.exp(-mean * mean / (2.0 * var))
    m_c = mean + 1j * gamma * var
    zeta = -m_c / s2
    pos = mean > 0.0
    w_arg = np.where(pos, -1j * zeta, 1j * zeta)
    tail = 0.5 * core * wofz(w_arg)
    full = np.exp(1j * gamma * mean - 0.5 * gamma * gamma * var)
    q = np.where(pos, full - tail, tail)
    return np.sqrt(var / (2.0 * math.pi)) * core + m_c * q


def _point_half_moment(gamma, mean):
    """Limit of the half moment for zero variance: mean_+ exp(i gamma mean)."""
    mean = np.asarray(mean, dtype=float)
    return np.where(mean > 0.0, mean, 0.0) * np.exp(1j * np.asarray(gamma) * mean)


def _terms_half_moment(terms: _ModeTerms) -> complex:
    if terms.amp.size == 0:
        return 0.0 + 0.0j
    zero = terms.var <= 0.0
    out = np.empty(terms.amp.shape, dtype=complex)
    if np.any(zero):
        out[zero] = _point_half_moment(terms.gamma[zero], terms.mean[zero])
    if np.any(~zero):
        out[~zero] = _gauss_half_moment(terms.gamma[~zero], terms.mean[~zero],
                                        terms.var[~zero])
    return complex(np.sum(terms.amp * out))


def _initial_half_moment(coeff: ModeCoeff) -> complex:
    zero = coeff.variances <= 0.0
    out = np.empty(coeff.amps.shape, dtype=complex)
    if np.any(zero):
        out[zero] = np.where(coeff.means[zero] > 0.0, coeff.means[zero], 0.0)
    if np.any(~zero):
        out[~zero] = _gauss_half_moment(np.zeros(np.count_nonzero(~zero)),
                                        coeff.means[~zero], coeff.variances[~zero])
    return complex(np.sum(coeff.amps * out))


def _terms_profile(terms: _ModeTerms, g: np.ndarray, chunk: int = 128) -> np.ndarray:
    """Evaluate the term sum on a grid, chunked over terms to bound memory.

    Every term variance is positive for t > 0 because the kernel variance
    C(t) is; point-mass initial terms have widened into Gaussians of width C.
    """
    out = np.zeros(g.shape, dtype=complex)
    for i0 in range(0, terms.amp.size, chunk):
        sl = slice(i0, i0 + chunk)
        a = terms.amp[sl][:, None]
        gam = terms.gamma[sl][:, None]
        m = terms.mean[sl][:, None]
        s = terms.var[sl][:, None]
        gaus = np.exp(-0.5 * np.square(g[None, :] - m) / s) / np.sqrt(2.0 * math.pi * s)
        out += np.sum(a * np.exp(1j * gam * g[None, :]) * gaus, axis=0)
    return out


def mode_profile(k: int, t: float, series: FiringSeries,
                 init_coeffs: list[ModeCoeff], g_grid: np.ndarray) -> np.ndarray:
    """Complex profile of mode k at time t on ``g_grid``.

    Bounded pointwise by |q_k|_L1 / sqrt(2 pi C(t)) times the mode decay
    factor; the k = 0 profile is real and nonnegative.
    """
    if t <= 0.0:
        raise DomainError("mode_profile requires t > 0")
    st = series.state(series.index_of(t))
    ka = abs(k)
    if ka >= len(init_coeffs):
        raise DomainError(f"mode {k} outside the prepared coefficient range")
    out = _terms_profile(_mode_terms(ka, init_coeffs[ka], st, series.params), g_grid)
    return np.conj(out) if k < 0 else out


@dataclass(frozen=True)
class SpectralField:
    """Truncated set of mode profiles sampled on a conductance grid."""

    t: float
    k_values: tuple[int, ...]        # nonnegative; negative modes by conjugation
    g_grid: np.ndarray
    modes: np.ndarray                # (len(k_values), n_g) complex
    v_f: float

    def mode(self, k: int) -> np.ndarray:
        idx = self.k_values.index(abs(k))
        prof = self.modes[idx]
        return np.conj(prof) if k < 0 else prof

    def mode_l1(self, k: int) -> float:
        return float(np.trapezoid(np.abs(self.mode(k)), self.g_grid))

    def mass(self) -> float:
        idx = self.k_values.index(0)
        return float(np.trapezoid(self.modes[idx].real, self.g_grid))

    def reconstruct(self, v_grid: np.ndarray) -> np.ndarray:
        """Density p(t, v, g) on the tensor grid; returns the real part.

        The imaginary residue is available via :meth:`imag_residue`.
        """
        return self._assemble(v_grid).real

    def imag_residue(self, v_grid: np.ndarray) -> float:
        field = self._assemble(v_grid)
        dv = v_grid[1] - v_grid[0]
        return float(np.trapezoid(np.trapezoid(np.abs(field.imag), self.g_grid, axis=1),
                                  dx=dv))

    def _assemble(self, v_grid: np.ndarray) -> np.ndarray:
        mu = 2.0 * math.pi / self.v_f
        out = np.zeros((len(v_grid), len(self.g_grid)), dtype=complex)
        for k, prof in zip(self.k_values, self.modes):
            wave = np.exp(1j * mu * k * np.asarray(v_grid))
            block = wave[:, None] * prof[None, :]
            out += block if k == 0 else block + np.conj(block)
        return out / self.v_f


def firing_from_modes(t: float, field: SpectralField, series: FiringSeries):
    """Total firing rate and per-mode contributions from grid profiles.

    N_k = (1/V_F) integral_{g>0} g p_k dg by trapezoid; negative modes enter
    through conjugation so the total is real up to quadrature residue.
    """
    series.index_of(t)
    g = field.g_grid
    mask = g >= 0.0
    contributions: dict[int, complex] = {}
    total = 0.0 + 0.0j
    for k in field.k_values:
        prof = field.mode(k)
        nk = np.trapezoid(g[mask] * prof[mask], g[mask]) / field.v_f
        contributions[k] = complex(nk)
        if k == 0:
            total += nk
        else:
            contributions[-k] = complex(np.conj(nk))
            total += 2.0 * nk.real
    return float(total.real), contributions


def default_g_grid(st: SeriesState, coeffs: list[ModeCoeff], params: ModelParams,
                   n_points: int = 2048) -> np.ndarray:
    """Grid covering the drifted Gaussian cores of every initial term."""
    r = math.exp(-st.t / params.epsilon)
    lo, hi = -10.0, 10.0
    for c in coeffs:
        if c.amps.size == 0:
            continue
        spread = np.sqrt(st.C + r * r * c.variances)
        center = st.B + r * c.means
        lo = min(lo, float(np.min(center - 10.0 * spread)))
        hi = max(hi, float(np.max(center + 10.0 * spread)))
    return np.linspace(lo, hi, n_points)


@dataclass
class ModesResult:
    series: FiringSeries
    snapshots: list[SpectralField] = field(default_factory=list)
    audit: dict = field(default_factory=dict)


def run(init: InitialData, params: ModelParams, t_end: float, dt: float,
        k_max: int = 16, g_grid: np.ndarray | None = None,
        snapshot_times: tuple[float, ...] = (),
        stop_above: float | None = None) -> ModesResult:
    """March the self-consistent firing closure and sample mode snapshots.

    At each step the new firing rate solves N = sum_k N_k(N) by a damped
    fixed point (damping 0.5) to absolute tolerance 1e-10 (plus a relative
    guard of 1e-13 for very large rates); non-convergence raises
    :class:`StepFailureError` with the iteration trace.  Raw mode totals are
    clamped at zero before entering the drift/diffusion coefficients; the raw
    value is kept in the series.  ``stop_above`` truncates the run once the
    firing rate exceeds it (divergent regimes grow without bound).
    """
    params.validate()
    if params.epsilon <= 0.0:
        raise DomainError("mode solver requires epsilon > 0")
    if init.v_f != params.v_f:
        raise ConfigError("initial data v_f must match params v_f")
    coeffs = fourier_init_coeffs(init, k_max)
    active = [c.k for c in coeffs if c.amps.size and np.max(np.abs(c.amps)) > 0.0]

    def total_raw(st: SeriesState) -> float:
        tot = 0.0
        for k in active:
            terms = _mode_terms(k, coeffs[k], st, params)
            nk = _terms_half_moment(terms) / params.v_f
            tot += nk.real if k == 0 else 2.0 * nk.real
        return tot

    n0_raw = 0.0
    for k in active:
        nk0 = _initial_half_moment(coeffs[k]) / params.v_f
        n0_raw += nk0.real if k == 0 else 2.0 * nk0.real
    series = FiringSeries(params, dt, n0_raw)

    n_steps = int(round(t_end / dt))
    clamp_events = 1 if n0_raw < 0.0 else 0
    max_iters = 0
    for _ in range(n_steps):
        st = series.last()
        # linear predictor shortens the damped iteration considerably
        if len(series) >= 2:
            x = max(2.0 * st.n - series.state(len(series) - 2).n, 0.0)
        else:
            x = st.n
        trace = [x]
        for it in range(FIXED_POINT_MAX_ITER):
            cand = _advance_state(st, x, params, dt)
            f_x = max(total_raw(cand), 0.0)
            x_new = x + _DAMPING * (f_x - x)
            trace.append(x_new)
            delta = abs(x_new - x)
            x = x_new
            if delta <= FIXED_POINT_ABS_TOL + 1e-13 * abs(x):
                break
        else:
            raise StepFailureError(
                f"fixed point did not converge at t={st.t + dt:.6g}", trace)
        max_iters = max(max_iters, it + 1)
        raw = total_raw(_advance_state(st, x, params, dt))
        if raw < 0.0:
            clamp_events += 1
        advance_series(series, x, params, n_raw=raw)
        if stop_above is not None and x > stop_above:
            truncated_at = series.t_end
            break
    else:
        truncated_at = None

    snapshots = []
    for t_snap in snapshot_times:
        if t_snap > series.t_end + 1e-12:
            continue       # unreachable after a stop_above truncation
        idx = series.index_of(t_snap)
        st = series.state(idx)
        grid = (default_g_grid(st, coeffs, params) if g_grid is None
                else np.asarray(g_grid, dtype=float))
        profs = []
        for k in active:
            if t_snap == 0.0:
                profs.append(coeffs[k].evaluate(grid))
            else:
                profs.append(mode_profile(k, t_snap, series, coeffs, grid))
        snapshots.append(SpectralField(
            t=t_snap, k_values=tuple(active), g_grid=grid,
            modes=np.array(profs), v_f=params.v_f))

    tail = 0.0
    if init.kind == "grid-samples" and len(series) > 1:
        mu = 2.0 * math.pi / params.v_f
        d_end = series.last().decay_exponent(params.epsilon)
        x = (params.epsilon * mu) ** 2 * d_end
        if x > 0:
            tail = 2.0 * math.exp(-x * (k_max + 1) ** 2) / -math.expm1(-x)
    mass0 = sum(c.amps.real.sum() for c in coeffs if c.k == 0)
    audit = {
        "mode_mass": float(mass0),
        "mass_drift": abs(float(mass0) - 1.0),
        "truncation_tail_bound": tail,
        "clamp_events": clamp_events,
        "max_fixed_point_iters": max_iters,
        "truncated_at": truncated_at,
        "snapshot_mass": [s.mass() for s in snapshots],
    }
    return ModesResult(series=series, snapshots=snapshots, audit=audit)
