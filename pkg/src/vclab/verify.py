"""Named invariant suites asserting the model's proven bounds across solvers.

Each check returns a :class:`CheckResult`; the ``fast`` level covers the
firing nonlinearity, the moment ODE, a short mode-solver run, and the
transport limit in well under a minute.  The ``full`` level adds the
cross-solver comparisons, the epsilon sweep, and grid refinement at desk
scale.  All randomness is seeded, so reports are reproducible.
"""

from __future__ import annotations

import functools
import math
import time
from dataclasses import dataclass

import numpy as np
from scipy.special import ndtr

from . import fast_limit, modes, moment_ode, pde
from .firing import GaussianState, firing_rate, firing_rate_grad, solve_limit_firing, stability_margin
from .params import (InitialData, ModelParams, VelocityProfile, cosine_perturbed,
                     fourier_init_coeffs, gaussian_v_homogeneous, transform_velocity,
                     inverse_transform_velocity)

FIG1 = ModelParams(g0=10.0, g1=1.0, a0=2.0, a1=0.1, v_f=1.0)
FIG2 = ModelParams(g0=10.0, g1=0.5, a0=2.0, a1=0.1, v_f=1.0)


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str
    ref: str
    elapsed: float = 0.0

    def to_json_dict(self) -> dict:
        return {"name": self.name, "passed": self.passed, "detail": self.detail,
                "ref": self.ref, "elapsed_s": round(self.elapsed, 3)}


def _check(name, ref):
    def deco(fn):
        def wrapped(*args, **kwargs):
            t0 = time.perf_counter()
            try:
                passed, detail = fn(*args, **kwargs)
            except Exception as exc:           # a crashed check is a failed check
                passed, detail = False, f"raised {type(exc).__name__}: {exc}"
            return CheckResult(name=name, passed=passed, detail=detail, ref=ref,
                               elapsed=time.perf_counter() - t0)
        wrapped.check_name = name
        return wrapped
    return deco


def decay_floor(t, a0: float):
    """Guaranteed lower bound a0 (t - 2 tanh(t/2)) for the damping exponent."""
    t = np.asarray(t, dtype=float)
    return a0 * (t - 2.0 * np.tanh(0.5 * t))


def homogenization_envelope(d_value, v_f: float):
    """L1 bound 2 q / (1 - q), q = exp(-(2 pi / V_F)^2 D), on the mode remainder."""
    q = np.exp(-((2.0 * math.pi / v_f) ** 2) * np.asarray(d_value, dtype=float))
    return 2.0 * q / (1.0 - q)


def l1_distance_to_v_average(snapshot: modes.SpectralField, n_v: int = 192) -> float:
    """integral |p - p_0 / V_F| dv dg over the snapshot's grid."""
    v = np.linspace(0.0, snapshot.v_f, n_v)
    mu = 2.0 * math.pi / snapshot.v_f
    rem = np.zeros((n_v, len(snapshot.g_grid)), dtype=complex)
    for k, prof in zip(snapshot.k_values, snapshot.modes):
        if k == 0:
            continue
        wave = np.exp(1j * mu * k * v)
        block = wave[:, None] * prof[None, :]
        rem += block + np.conj(block)
    rem /= snapshot.v_f
    inner = np.trapezoid(np.abs(rem), snapshot.g_grid, axis=1)
    return float(np.trapezoid(inner, v))


# -- firing nonlinearity ---------------------------------------------------------

@_check("firing-envelope", "positive-part moment pinched between b_+ and b_+ + sqrt(c)")
def check_firing_envelope(n: int = 10_000, seed: int = 20240 ):
    rng = np.random.default_rng(seed)
    b = rng.uniform(-50.0, 50.0, n)
    c = rng.uniform(1e-6, 100.0, n)
    val = firing_rate(b, c, 1.0)
    lo = np.maximum(b, 0.0)
    hi = lo + np.sqrt(c)
    bad = np.sum((val < lo - 1e-12) | (val > hi + 1e-12))
    worst = float(np.max(np.maximum(lo - val, val - hi)))
    return bad == 0, f"{bad} violations, worst slack {worst:.3e}"


@_check("firing-monotone", "strictly increasing in mean and in variance")
def check_firing_monotone(n: int = 2_000, seed: int = 7):
    rng = np.random.default_rng(seed)
    b = rng.uniform(-20.0, 20.0, n)
    c = rng.uniform(0.01, 50.0, n)
    base = firing_rate(b, c, 1.0)
    up_b = firing_rate(b + 0.1, c, 1.0)
    up_c = firing_rate(b, c + 0.1, 1.0)
    slack = 2.0 * np.spacing(np.maximum(base, 1.0))
    never_decreases = np.all(up_b >= base - slack) and np.all(up_c >= base - slack)
    # strict increase is only float-visible where the predicted increment
    # clears the rounding granularity of the rate itself
    lam = b / np.sqrt(c)
    phi = np.exp(-0.5 * lam * lam) / math.sqrt(2.0 * math.pi)
    grain = 1e-12 * np.maximum(base, 1.0)
    strict_b = 0.1 * ndtr(lam) > grain
    strict_c = 0.05 * phi / np.sqrt(c) > grain
    strictly_up = (np.all(up_b[strict_b] > base[strict_b])
                   and np.all(up_c[strict_c] > base[strict_c]))
    ok = bool(never_decreases and strictly_up)
    n_strict = int(strict_b.sum() + strict_c.sum())
    return ok, f"strict on {n_strict} comparisons, nondecreasing on all {len(b)}"


@_check("firing-gradients", "closed-form derivatives match central differences")
def check_firing_gradients(n: int = 10_000, seed: int = 11, h: float = 1e-5):
    # the difference quotient carries roundoff noise of order |N| eps / h
    # (about 1e-9 here); relative agreement is only claimable above it
    rng = np.random.default_rng(seed)
    b = rng.uniform(-50.0, 50.0, n)
    c = rng.uniform(0.01, 100.0, n)
    d_b, d_c = firing_rate_grad(b, c, 1.0)
    fd_b = (firing_rate(b + h, c, 1.0) - firing_rate(b - h, c, 1.0)) / (2 * h)
    fd_c = (firing_rate(b, c + h, 1.0) - firing_rate(b, c - h, 1.0)) / (2 * h)
    tol_b = 1e-6 * np.abs(d_b) + 1e-8
    tol_c = 1e-6 * np.abs(d_c) + 1e-8
    bad = int(np.sum(np.abs(fd_b - d_b) > tol_b) + np.sum(np.abs(fd_c - d_c) > tol_c))
    rel_b = np.abs(fd_b - d_b)[d_b > 1e-2] / d_b[d_b > 1e-2]
    rel_c = np.abs(fd_c - d_c)[d_c > 1e-2] / d_c[d_c > 1e-2]
    worst_strong = float(max(rel_b.max(), rel_c.max()))
    lam = b / np.sqrt(c)
    # the open bounds (0, 1/V_F) saturate in floats once the normal CDF
    # rounds to 0 or 1 (|lam| beyond ~8 resp. ~37)
    in_range = (np.all(d_b >= 0) and np.all(d_b <= 1.0) and np.all(d_c >= 0)
                and np.all(d_b[lam > -37.0] > 0)
                and np.all(d_b[lam < 8.0] < 1.0)
                and np.all(d_c[np.abs(lam) < 37.0] > 0))
    ok = bad == 0 and worst_strong <= 1e-6 and bool(in_range)
    return ok, f"{bad} outside tolerance, worst rel err {worst_strong:.3e} where resolvable"


@_check("margin-nonnegative", "CDF/ratio pair sums to at most one")
def check_margin(n: int = 10_000):
    lam = np.linspace(0.0, 50.0, n)
    _, _, margin = stability_margin(lam)
    worst = float(np.min(margin))
    return worst >= -1e-12, f"min margin {worst:.3e}"


@_check("limit-fixed-point", "unique root below the gain threshold, divergent approaching it")
def check_limit_fixed_point():
    p = FIG2
    inv = 1.0 / p.g1
    rhos = np.linspace(0.05, 0.95, 10) * inv
    vals = [solve_limit_firing(r, p) for r in rhos]
    monotone = all(v2 > v1 for v1, v2 in zip(vals, vals[1:]))
    big = solve_limit_firing(inv - 1e-4 * inv, p)
    small = solve_limit_firing(0.1 * inv, p)
    diverges = big > 1e3 * small
    no_sol = math.isinf(solve_limit_firing(inv, p))
    detail = f"monotone={monotone}, ratio={big / small:.1f}, no-solution-at-threshold={no_sol}"
    return monotone and diverges and no_sol, detail


# -- moment ODE ------------------------------------------------------------------

@_check("ode-steady-state", "unique steady state with proven lower bounds, stable linearization")
def check_ode_steady():
    rep = moment_ode.steady_state(FIG2)
    ok = (rep is not None and rep.b_star >= rep.lower_bounds[0] - 1e-9
          and rep.c_star >= rep.lower_bounds[1] - 1e-9
          and rep.trace < 0.0 and rep.det > 0.0 and rep.stable)
    none_above = moment_ode.steady_state(FIG1) is None
    detail = (f"b*={rep.b_star:.6f} c*={rep.c_star:.6f} trace={rep.trace:.3f} "
              f"det={rep.det:.3f}; none-at-gain-1={none_above}")
    return ok and none_above, detail


@_check("ode-attractor", "spread initial states all reach the steady state")
def check_ode_attractor():
    rep = moment_ode.steady_state(FIG2)
    worst = 0.0
    for angle in np.arange(8) * (math.pi / 4.0):
        b0 = rep.b_star + 10.0 * math.cos(angle)
        c0 = max(rep.c_star + 10.0 * math.sin(angle), 0.25)
        traj = moment_ode.integrate(GaussianState(b0, c0), FIG2, t_end=50.0, dt=0.01)
        worst = max(worst, abs(traj.b[-1] - rep.b_star) + abs(traj.c[-1] - rep.c_star))
    return worst <= 1e-5, f"worst final distance {worst:.3e}"


@_check("ode-divergent-growth", "mean grows at least linearly at rate g0 above the gain threshold")
def check_ode_divergent():
    ok = True
    details = []
    for g1 in (1.0, 2.0):
        p = ModelParams(g0=10.0, g1=g1, a0=2.0, a1=0.1, v_f=1.0)
        traj = moment_ode.integrate(GaussianState(0.0, 1.0), p, t_end=20.0, dt=1e-3)
        floor = traj.b[0] + p.g0 * traj.times * 0.95
        ok = ok and bool(np.all(traj.b >= floor - 1e-9))
        details.append(f"g1={g1}: b(T)={traj.b[-1]:.3e}")
    return ok, "; ".join(details)


@_check("ode-variance-floor", "variance stays above the no-feedback relaxation floor")
def check_ode_variance_floor():
    dt = 1e-3
    traj = moment_ode.integrate(GaussianState(0.0, 1e-2), FIG2, t_end=10.0, dt=dt)
    floor = FIG2.a0 * (1.0 - np.exp(-2.0 * traj.times)) * (1.0 - 10.0 * dt)
    ok = bool(np.all(traj.c >= np.minimum(floor, traj.c[0] * np.exp(-2 * traj.times))
                     - 1e-12)) and bool(np.all(traj.c > 0))
    worst = float(np.min(traj.c - floor))
    return ok and worst > -1e-9, f"min(c - floor) = {worst:.3e}"


@_check("ode-eventual-monotone", "components become monotone in time (cooperative flow)")
def check_ode_monotone():
    traj = moment_ode.integrate(GaussianState(0.0, 1.0), FIG2, t_end=50.0, dt=0.01)
    mask = traj.times > 5.0
    db = np.diff(traj.b[mask])
    signs = np.sign(db[np.abs(db) > 1e-13])
    flips = int(np.sum(np.abs(np.diff(signs)) > 0))
    return flips <= 1, f"{flips} sign changes of db/dt after t=5"


@_check("ode-steady-blowup", "steady mean grows without bound as the gain nears the threshold")
def check_ode_steady_blowup():
    p_lo = ModelParams(g0=10.0, g1=0.5, a0=2.0, a1=0.1, v_f=1.0)
    p_hi = ModelParams(g0=10.0, g1=0.99, a0=2.0, a1=0.1, v_f=1.0)
    b_lo = moment_ode.steady_state(p_lo).b_star
    b_hi = moment_ode.steady_state(p_hi).b_star
    ratio = b_hi / b_lo
    # exact ratio is 50 up to exponentially small corrections; allow root tolerance
    return ratio >= 50.0 * (1.0 - 1e-9), f"ratio {ratio:.9f}"


@_check("ode-jacobian-cooperative", "off-diagonal linearization entries strictly positive")
def check_jacobian_cooperative(seed: int = 3):
    rng = np.random.default_rng(seed)
    ok = True
    for _ in range(200):
        st = GaussianState(rng.uniform(-20, 40), rng.uniform(0.05, 30.0))
        jac = moment_ode.jacobian(st, FIG2)
        ok = ok and jac[0, 1] > 0 and jac[1, 0] > 0
    return ok, "200 random states"


# -- mode solver -----------------------------------------------------------------

@functools.lru_cache(maxsize=1)
def _short_cosine_run(t_end: float = 2.0, dt: float = 1e-3):
    init = cosine_perturbed(5.0, 1.0, phase_shifted=True, amplitude=0.2)
    snaps = tuple(np.round(np.arange(0.2, t_end + 1e-9, 0.2), 10))
    return modes.run(init, FIG2, t_end=t_end, dt=dt, k_max=4, snapshot_times=snaps)


@_check("mode-decay-envelope", "voltage inhomogeneity bounded by the damping-exponent envelope")
def check_mode_envelope():
    res = _short_cosine_run()
    eps_d = res.series.D
    times = res.series.times
    worst = -np.inf
    for snap in res.snapshots:
        d_here = eps_d[np.argmin(np.abs(times - snap.t))]
        dist = l1_distance_to_v_average(snap)
        bound = homogenization_envelope(d_here, snap.v_f)
        worst = max(worst, dist - bound)
    return worst <= 1e-10, f"max (distance - bound) = {worst:.3e}"


@_check("decay-exponent-floor", "damping exponent dominated from below by its zero-feedback value")
def check_decay_floor():
    res = _short_cosine_run()
    d_meas = res.series.D
    floor = decay_floor(res.series.times, FIG2.a0)
    worst = float(np.min(d_meas - floor))
    cubic = decay_floor(0.005, FIG2.a0)
    cubic_ok = abs(cubic - FIG2.a0 * 0.005 ** 3 / 12.0) <= FIG2.a0 * 0.005 ** 4
    return worst >= -1e-12 and cubic_ok, f"min(D - floor) = {worst:.3e}"


@_check("mode-ode-consistency", "mode solver's effective Gaussian tracks the moment ODE")
def check_mode_ode():
    init = gaussian_v_homogeneous(5.0, 1.0)
    dt = 1e-3
    res = modes.run(init, FIG2, t_end=2.0, dt=dt)
    traj = moment_ode.integrate(GaussianState(5.0, 1.0), FIG2, t_end=2.0, dt=dt)
    st = res.series.last()
    m_eff = st.B + math.exp(-2.0) * 5.0
    v_eff = st.C + math.exp(-4.0) * 1.0
    gap = abs(m_eff - traj.b[-1]) + abs(v_eff - traj.c[-1])
    return gap <= 1e-5, f"|effective - ode| = {gap:.3e} at t=2"


@_check("series-kernel-identities", "weighted-integral recursion exact for constant rates")
def check_series_identities():
    p = ModelParams(g0=10.0, g1=0.5, a0=2.0, a1=0.1, v_f=1.0)
    n_bar = 3.0
    series = modes.FiringSeries(p, dt=0.01, n0_raw=n_bar)
    for _ in range(100):
        modes.advance_series(series, n_bar, p)
    st = series.last()
    gin = p.g0 + p.g1 * n_bar
    a_bar = p.a0 + p.a1 * n_bar
    b_err = abs(st.B - gin * -math.expm1(-1.0))
    c_err = abs(st.C - a_bar * -math.expm1(-2.0))
    d_exact = a_bar * (1.0 - 2.0 * math.tanh(0.5) / 1.0)
    d_err = abs(st.decay_exponent(p.epsilon) - d_exact)
    ok = b_err <= 1e-10 and c_err <= 1e-10 and d_err <= 1e-10
    return ok, f"B err {b_err:.2e}, C err {c_err:.2e}, D err {d_err:.2e}"


@_check("velocity-transform", "change of voltage variable preserves mass and inverts")
def check_velocity_transform():
    prof = VelocityProfile(v_f=1.0, intercept=2.0, slope=-1.0)
    v = np.linspace(0.0, 1.0, 2001)
    rho = 1.0 + 0.3 * np.sin(2.0 * math.pi * v)
    u_f, u_nodes, tilted = transform_velocity(prof, v, rho)
    mass_in = np.trapezoid(rho, v)
    mass_out = np.trapezoid(tilted, u_nodes)
    back = inverse_transform_velocity(prof, v, tilted)
    l1 = np.trapezoid(np.abs(back - rho), v)
    ok = abs(u_f - math.log(2.0)) <= 1e-12 and abs(mass_in - mass_out) <= 1e-6 and l1 <= 1e-10
    return ok, f"U_F err {abs(u_f - math.log(2.0)):.2e}, mass err {abs(mass_in - mass_out):.2e}"


# -- transport limit -------------------------------------------------------------

@_check("fcl-dichotomy", "finite-time blow-up above the profile threshold, periodic below")
def check_fcl_dichotomy():
    state = fast_limit.FclState.from_callable(
        lambda v: 1.0 - 0.2 * np.cos(2.0 * math.pi * v), 1.0)
    blow = fast_limit.evolve(state, FIG1, t_end=1.0)
    per = fast_limit.evolve(state, FIG2, t_end=0.4)
    ok_blow = (blow.outcome.kind == "blowup"
               and 0.0 < blow.outcome.blowup_time <= FIG1.v_f / FIG1.g0)
    near = fast_limit.firing_at_tau(blow.outcome.tau_star - 1e-4, state, FIG1)
    ratio = near / blow.firing[0]
    ok_sig = ratio > 1e3
    ok_per = per.outcome.kind == "periodic" and per.outcome.period > 0.0
    g1s = fast_limit.threshold_g1(state)
    sharp_lo = fast_limit.evolve(
        state, ModelParams(10.0, g1s * (1 - 1e-3), 2.0, 0.1), t_end=0.2)
    sharp_hi = fast_limit.evolve(
        state, ModelParams(10.0, g1s, 2.0, 0.1), t_end=0.2)
    ok_sharp = sharp_lo.outcome.kind == "periodic" and sharp_hi.outcome.kind == "blowup"
    detail = (f"T*={blow.outcome.blowup_time:.5f}, N-ratio={ratio:.0f}, "
              f"T={per.outcome.period:.5f}, threshold sharp={ok_sharp}")
    return ok_blow and ok_sig and ok_per and ok_sharp, detail


@_check("fcl-periodicity", "firing repeats after one transported revolution")
def check_fcl_periodicity():
    state = fast_limit.FclState.from_callable(
        lambda v: 1.0 - 0.2 * np.cos(2.0 * math.pi * v), 1.0)
    res = fast_limit.evolve(state, FIG2, t_end=0.5)
    t_per = res.outcome.period
    t_grid = np.linspace(0.0, res.times[-1] - t_per - 1e-9, 400)
    n_a = np.interp(t_grid, res.times, res.firing)
    n_b = np.interp(t_grid + t_per, res.times, res.firing)
    gap = float(np.max(np.abs(n_a - n_b)))
    mono = bool(np.all(np.diff(res.times) > 0.0))
    slope = np.diff(res.times) / np.diff(res.taus)
    slope_ok = bool(np.all(slope <= 1.0 / FIG2.g0 + 1e-12)) and bool(np.all(slope > 0))
    return gap <= 1e-6 and mono and slope_ok, f"period mismatch {gap:.2e}"


# -- grid solver (full level) ----------------------------------------------------

@_check("pde-conservation", "mass conserved and cells nonnegative on the grid")
def check_pde_conservation():
    init = cosine_perturbed(5.0, 1.0, phase_shifted=True, amplitude=0.2)
    res = pde.run(init, FIG2, t_end=1.0, n_v=128, n_g=192)
    d = res.diagnostics
    ok = d["mass_drift_per_unit_time"] <= 1e-10 and d["min_density"] >= -1e-14
    return ok, (f"drift/unit-time {d['mass_drift_per_unit_time']:.2e}, "
                f"min density {d['min_density']:.2e}")


@_check("pde-divergent-first-moment", "grid first moment grows at rate g0 above threshold")
def check_pde_first_moment():
    init = gaussian_v_homogeneous(5.0, 1.0)
    t_end = 1.5
    res = pde.run(init, FIG1, t_end=t_end, n_v=48, n_g=256, g_lo=-10.0, g_hi=60.0)
    field = res.final_field
    m1_init = 5.0
    m1 = field.first_moment()
    ok = m1 >= m1_init + FIG1.g0 * t_end * 0.95
    return ok, f"M1({t_end}) = {m1:.3f} >= {m1_init + FIG1.g0 * t_end * 0.95:.3f}"


@_check("pde-mode-cross-check", "grid firing matches the semi-explicit solver")
def check_pde_mode_cross(n_cells: int = 128, t_end: float = 2.0):
    init = cosine_perturbed(5.0, 1.0, phase_shifted=True, amplitude=0.2)
    res_m = modes.run(init, FIG2, t_end=t_end, dt=1e-3, k_max=2)
    res_p = pde.run(init, FIG2, t_end=t_end, n_v=n_cells, n_g=n_cells)
    worst = 0.0
    for t_chk in (0.5, 1.0, 2.0):
        n_m = res_m.series.state(res_m.series.index_of(t_chk)).n
        times = res_p.series.times
        n_p = float(np.interp(t_chk, times, res_p.series.N))
        worst = max(worst, abs(n_p - n_m) / n_m)
    return worst <= 0.02, f"worst relative firing gap {worst:.4f}"


@_check("pde-homogenization", "grid voltage inhomogeneity within envelope plus scheme dissipation")
def check_pde_homogenization():
    init = cosine_perturbed(5.0, 1.0, phase_shifted=True, amplitude=0.2)
    t_end = 5.0
    res = pde.run(init, FIG2, t_end=t_end, n_v=128, n_g=192, snapshot_times=(t_end,))
    _, field = res.snapshots[0]
    avg = np.mean(field.p, axis=0)
    dist = float(np.sum(np.abs(field.p - avg[None, :])) * field.dv * field.dg)
    bound = float(homogenization_envelope(decay_floor(t_end, FIG2.a0), FIG2.v_f))
    # upwind dissipation only shrinks inhomogeneity, so no extra budget is needed
    return dist <= bound + 1e-10, f"distance {dist:.3e} vs envelope {bound:.3e}"


@_check("eps-family-rescale", "epsilon runs collapse onto the unit-ratio run after rescaling")
def check_eps_rescale():
    t_end = 0.8
    gaps = []
    for eps in (0.5, 0.25):
        p_eps = ModelParams(10.0, 0.5, 2.0, 0.1, v_f=1.0, epsilon=eps)
        init = cosine_perturbed(10.0, 2.0, v_f=1.0, phase_shifted=True, amplitude=0.2)
        res = modes.run(init, p_eps, t_end=t_end, dt=eps * 1e-3, k_max=2)
        u_f = 1.0 / eps
        p_ref = ModelParams(10.0, 0.5 / eps, 2.0, 0.1 / eps, v_f=u_f, epsilon=1.0)
        init_ref = cosine_perturbed(10.0, 2.0, v_f=u_f, phase_shifted=True, amplitude=0.2)
        ref = modes.run(init_ref, p_ref, t_end=t_end / eps, dt=1e-3, k_max=2)
        n_eps = res.series.N
        n_ref = ref.series.N / eps
        gap = float(np.max(np.abs(n_eps - n_ref)) / np.max(n_eps))
        gaps.append(gap)
    worst = max(gaps)
    return worst <= 1e-6, f"worst rescaled mismatch {worst:.2e}"


FAST_CHECKS = [
    check_firing_envelope,
    check_firing_monotone,
    check_firing_gradients,
    check_margin,
    check_limit_fixed_point,
    check_ode_steady,
    check_ode_attractor,
    check_ode_divergent,
    check_ode_variance_floor,
    check_ode_monotone,
    check_ode_steady_blowup,
    check_jacobian_cooperative,
    check_mode_envelope,
    check_decay_floor,
    check_mode_ode,
    check_series_identities,
    check_velocity_transform,
    check_fcl_dichotomy,
    check_fcl_periodicity,
]

FULL_CHECKS = FAST_CHECKS + [
    check_pde_conservation,
    check_pde_first_moment,
    check_pde_mode_cross,
    check_pde_homogenization,
    check_eps_rescale,
]


def run_verify(level: str = "fast") -> list[CheckResult]:
    if level not in ("fast", "full"):
        raise ValueError(f"level must be 'fast' or 'full', got {level!r}")
    checks = FAST_CHECKS if level == "fast" else FULL_CHECKS
    return [fn() for fn in checks]


def report_dict(level: str, results: list[CheckResult]) -> dict:
    return {
        "level": level,
        "all_passed": all(r.passed for r in results),
        "checks": [r.to_json_dict() for r in results],
    }
