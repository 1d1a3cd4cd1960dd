"""Acceptance gate: every quantitative criterion at its stated tolerance.

Each test prints one PASS/FAIL line (visible with ``pytest -s`` or in the
captured output) and asserts the criterion.  Stated runtime budgets are
asserted too; all heavy runs are shared session fixtures so the whole module
stays at desk scale.
"""

import math
import time

import numpy as np
import pytest

from vclab import fast_limit, modes, moment_ode, verify
from vclab.firing import (GaussianState, firing_rate, firing_rate_grad,
                          stability_margin)
from vclab.params import ModelParams, gaussian_v_homogeneous


class Budget:
    def __init__(self, num, seconds):
        self.num = num
        self.seconds = seconds

    def __enter__(self):
        self.t0 = time.perf_counter()
        return self

    def __exit__(self, exc_type, exc, tb):
        elapsed = time.perf_counter() - self.t0
        status = "FAIL" if exc_type else "PASS"
        print(f"ACCEPTANCE criterion-{self.num}: {status} ({elapsed:.1f}s budget {self.seconds}s)")
        if exc_type is None:
            assert elapsed <= self.seconds, (
                f"criterion {self.num} exceeded its runtime budget: {elapsed:.1f}s")
        return False


def test_criterion_1_firing_function_suite(rng):
    with Budget(1, 5):
        b = rng.uniform(-50.0, 50.0, 10_000)
        c = rng.uniform(1e-6, 100.0, 10_000)
        val = firing_rate(b, c, 1.0)
        lo = np.maximum(b, 0.0)
        assert np.all(val >= lo - 1e-12)
        assert np.all(val <= lo + np.sqrt(c) + 1e-12)

        c_fd = np.clip(c, 0.01, None)     # keep the difference stencil in-domain
        h = 1e-5
        d_b, d_c = firing_rate_grad(b, c_fd, 1.0)
        fd_b = (firing_rate(b + h, c_fd, 1.0) - firing_rate(b - h, c_fd, 1.0)) / (2 * h)
        fd_c = (firing_rate(b, c_fd + h, 1.0) - firing_rate(b, c_fd - h, 1.0)) / (2 * h)
        # relative 1e-6 wherever the quotient resolves above its roundoff
        # noise floor (~1e-9 for rates of this size)
        assert np.all(np.abs(fd_b - d_b) <= 1e-6 * np.abs(d_b) + 1e-8)
        assert np.all(np.abs(fd_c - d_c) <= 1e-6 * np.abs(d_c) + 1e-8)

        lam = np.linspace(0.0, 50.0, 10_000)
        _, _, margin = stability_margin(lam)
        assert np.min(margin) >= -1e-12


def test_criterion_2_ode_dichotomy(fig2):
    with Budget(2, 10):
        rep = moment_ode.steady_state(fig2)
        assert rep.b_star >= 20.0 - 1e-9
        assert rep.c_star >= 4.0 - 1e-9
        assert rep.trace < 0.0 and rep.det > 0.0
        worst = 0.0
        for angle in np.arange(8) * (math.pi / 4.0):
            b0 = rep.b_star + 10.0 * math.cos(angle)
            c0 = max(rep.c_star + 10.0 * math.sin(angle), 0.25)
            traj = moment_ode.integrate(GaussianState(b0, c0), fig2,
                                        t_end=50.0, dt=0.01)
            worst = max(worst, abs(traj.b[-1] - rep.b_star)
                        + abs(traj.c[-1] - rep.c_star))
        assert worst <= 1e-5
        for g1 in (1.0, 2.0):
            p = ModelParams(10.0, g1, 2.0, 0.1)
            traj = moment_ode.integrate(GaussianState(0.0, 1.0), p,
                                        t_end=20.0, dt=1e-3)
            assert np.all(traj.b >= traj.b[0] + p.g0 * traj.times * 0.95 - 1e-9)


def test_criterion_3_mode_solver_tracks_ode(fig2):
    with Budget(3, 60):
        m0, s0 = 5.0, 1.0
        dt = 1e-3
        res = modes.run(gaussian_v_homogeneous(m0, s0), fig2, t_end=10.0, dt=dt)
        traj = moment_ode.integrate(GaussianState(m0, s0), fig2, t_end=10.0, dt=dt)
        worst = 0.0
        for t_chk in np.arange(0.5, 10.0 + 1e-9, 0.5):
            i_m = res.series.index_of(t_chk)
            st = res.series.state(i_m)
            m_eff = st.B + m0 * math.exp(-t_chk)
            v_eff = st.C + s0 * math.exp(-2.0 * t_chk)
            i_o = int(round(t_chk / dt))
            worst = max(worst, abs(m_eff - traj.b[i_o]), abs(v_eff - traj.c[i_o]))
        assert worst <= 1e-4, f"worst effective-moment gap {worst:.2e}"


def test_criterion_4_mode_decay_envelope(cosine_init, fig2):
    with Budget(4, 120):
        t_end = 5.0
        snaps = tuple(np.round(np.arange(0.25, t_end + 1e-9, 0.25), 10))
        res = modes.run(cosine_init, fig2, t_end=t_end, dt=1e-3, k_max=2,
                        snapshot_times=snaps)
        d_series = res.series.D
        floor = verify.decay_floor(res.series.times, fig2.a0)
        assert np.min(d_series - floor) >= -1e-12
        times = res.series.times
        for snap in res.snapshots:
            d_here = d_series[np.argmin(np.abs(times - snap.t))]
            dist = verify.l1_distance_to_v_average(snap)
            bound = verify.homogenization_envelope(d_here, snap.v_f)
            assert dist <= bound + 1e-12, f"t={snap.t}: {dist:.3e} > {bound:.3e}"


def test_criterion_5_cross_solver_equivalence(modes_cosine_t10, pde_cosine_t10,
                                              cosine_init, fig2):
    with Budget(5, 600):
        from vclab import pde

        def deviation(res_p):
            worst = 0.0
            for t_chk in (1.0, 5.0, 10.0):
                n_m = modes_cosine_t10.series.state(
                    modes_cosine_t10.series.index_of(t_chk)).n
                n_p = float(np.interp(t_chk, res_p.series.times, res_p.series.N))
                worst = max(worst, abs(n_p - n_m) / n_m)
            return worst

        dev_256 = deviation(pde_cosine_t10)
        assert dev_256 <= 0.02, f"256x256 deviation {dev_256:.4f}"
        res_128 = pde.run(cosine_init, fig2, t_end=10.0, n_v=128, n_g=128)
        dev_128 = deviation(res_128)
        assert dev_128 >= 1.5 * dev_256, (
            f"halving all steps gained only {dev_128 / dev_256:.2f}x")


def test_criterion_6_fcl_dichotomy(fig1, fig2):
    with Budget(6, 30):
        state = fast_limit.FclState.from_callable(
            lambda v: 1.0 - 0.2 * np.cos(2.0 * math.pi * v), 1.0)
        assert fast_limit.threshold_g1(state) == pytest.approx(1.0 / 1.2, abs=1e-12)

        blow = fast_limit.evolve(state, fig1, t_end=1.0)
        assert blow.outcome.kind == "blowup"
        assert 0.0 < blow.outcome.blowup_time <= 0.1
        near = fast_limit.firing_at_tau(blow.outcome.tau_star - 1e-4, state, fig1)
        assert near > 1e3 * blow.firing[0]

        per = fast_limit.evolve(state, fig2, t_end=0.5)
        assert per.outcome.kind == "periodic"
        t_per = per.outcome.period
        taus = np.linspace(0.0, 1.0, 8193)
        gin = np.array([fig2.g0 + fig2.g1 * fast_limit.firing_at_tau(t, state, fig2)
                        for t in taus])
        assert t_per == pytest.approx(float(np.trapezoid(1.0 / gin, taus)), rel=1e-6)
        t_grid = np.linspace(0.0, per.times[-1] - t_per - 1e-9, 500)
        n_a = np.interp(t_grid, per.times, per.firing)
        n_b = np.interp(t_grid + t_per, per.times, per.firing)
        assert np.max(np.abs(n_a - n_b)) <= 1e-6

        g1s = fast_limit.threshold_g1(state)
        below = fast_limit.evolve(state, ModelParams(10.0, g1s * (1 - 1e-3), 2.0, 0.1),
                                  t_end=0.2)
        at = fast_limit.evolve(state, ModelParams(10.0, g1s, 2.0, 0.1), t_end=0.2)
        assert below.outcome.kind == "periodic" and at.outcome.kind == "blowup"

        # seam-maximal phase of the same profile: firing undefined from the start
        literal = fast_limit.FclState.from_callable(
            lambda v: 1.0 + 0.2 * np.cos(2.0 * math.pi * v), 1.0)
        at_zero = fast_limit.evolve(literal, fig1, t_end=1.0)
        assert at_zero.outcome.kind == "blowup"
        assert at_zero.outcome.blowup_time == 0.0


def test_criterion_7_eps_limit(eps_sweep_fig2, eps_sweep_fig1, limit_trace_fig2):
    with Budget(7, 1800):
        sups = {}
        for eps, (series, t_out, n_out, diag) in eps_sweep_fig2.items():
            mask = (t_out >= 0.5) & (t_out <= 3.0)
            n_lim = np.interp(t_out[mask], limit_trace_fig2.times,
                              limit_trace_fig2.firing)
            sups[eps] = float(np.max(np.abs(n_out[mask] - n_lim)))
        assert sups[0.5] > sups[0.1] > sups[0.02], f"sup gaps not decreasing: {sups}"

        maxima = {eps: float(np.max(n_out))
                  for eps, (_, _, n_out, _) in eps_sweep_fig1.items()}
        assert maxima[0.1] > maxima[0.5], f"peak rates not increasing: {maxima}"


def test_criterion_8_conservation_positivity(pde_cosine_t10, eps_sweep_fig2,
                                             eps_sweep_fig1):
    with Budget(8, 60):
        budgets = [pde_cosine_t10.diagnostics]
        budgets += [diag for _, _, _, diag in eps_sweep_fig2.values()]
        budgets += [diag for _, _, _, diag in eps_sweep_fig1.values()]
        for diag in budgets:
            assert diag["mass_drift_per_unit_time"] <= 1e-10
            assert diag["min_density"] >= -1e-14


def test_verify_report_covers_required_results():
    names = {fn.check_name for fn in verify.FULL_CHECKS}
    required = {"decay-exponent-floor", "firing-envelope", "margin-nonnegative",
                "mode-decay-envelope", "fcl-dichotomy"}
    assert required <= names
