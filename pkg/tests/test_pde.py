import math

import numpy as np
import pytest

from vclab.errors import CflError
from vclab.firing import firing_rate
from vclab.modes import FiringSeries
from vclab.params import ModelParams, gaussian_v_homogeneous
from vclab.pde import (GridField, cfl_dt, check_cfl, firing_rate_grid, run,
                       run_eps_sweep, step)


def frozen_params(g0=10.0, a0=2.0):
    return ModelParams(g0=g0, g1=0.0, a0=a0, a1=0.0)


def test_ou_benchmark_frozen_coefficients():
    p = frozen_params()
    init = gaussian_v_homogeneous(5.0, 1.0)
    res = run(init, p, t_end=1.0, n_v=64, n_g=256, g_lo=-10.0, g_hi=25.0)
    field = res.final_field
    marg = field.g_marginal()
    g = field.g_centers
    mean = np.trapezoid(g * marg, g)
    var = np.trapezoid((g - mean) ** 2 * marg, g)
    m_exact = 10.0 + (5.0 - 10.0) * math.exp(-1.0)
    v_exact = 2.0 + (1.0 - 2.0) * math.exp(-2.0)
    dg = field.dg
    dt = res.diagnostics["dt"]
    tol = 30.0 * (dg ** 2 + dt)        # first-order in time, second in g
    assert abs(mean - m_exact) <= tol
    assert abs(var - v_exact) <= tol


def test_exact_discrete_gaussian_steady_state():
    # with frozen coefficients the exponential-fitting flux admits the
    # discrete Gaussian as an exact fixed point
    p = frozen_params()
    init = gaussian_v_homogeneous(10.0, 2.0)
    field = GridField.from_initial_data(init, 16, 256, -10.0, 30.0)
    before = field.p.copy()
    stepped = step(field, p, dt=cfl_dt(field))
    # the sampled Gaussian is close to the scheme's own steady profile
    assert np.max(np.abs(stepped.p - before)) <= 1e-5 * np.max(before)


def test_transport_only_rigid_shift():
    # single-speed row: period V_F / g for the row at g = g_j0
    init = gaussian_v_homogeneous(5.0, 1.0)
    field = GridField.from_initial_data(init, 128, 8, 4.0, 6.0)
    profile = 1.0 + 0.5 * np.sin(2 * math.pi * field.v_centers)
    field.p[:] = profile[:, None] * field.p.mean(axis=0)[None, :]
    j0 = 3
    speed = field.g_centers[j0]
    row0 = field.p[:, j0].copy()
    p = frozen_params()
    dt = cfl_dt(field)
    n_steps = int(math.ceil((field.v_f / speed) / dt))
    dt = (field.v_f / speed) / n_steps
    mass0 = field.mass()
    for _ in range(n_steps):
        field = step(field, p, dt, transport_only=True)
        assert field.min_density() >= -1e-14
    assert abs(field.mass() - mass0) <= 1e-12
    l1_self = np.sum(np.abs(field.p[:, j0] - row0)) * field.dv
    l1_norm = np.sum(np.abs(row0)) * field.dv
    # first-order upwind dissipation budget for this smooth profile
    assert l1_self <= 0.5 * l1_norm


def test_second_order_transport_less_dissipative():
    init = gaussian_v_homogeneous(5.0, 1.0)
    p = frozen_params()
    results = {}
    for flag in (False, True):
        field = GridField.from_initial_data(init, 128, 8, 4.0, 6.0)
        profile = 1.0 + 0.5 * np.sin(2 * math.pi * field.v_centers)
        field.p[:] = profile[:, None] * field.p.mean(axis=0)[None, :]
        j0 = 3
        speed = field.g_centers[j0]
        row0 = field.p[:, j0].copy()
        dt = cfl_dt(field)
        n_steps = int(math.ceil((field.v_f / speed) / dt))
        dt = (field.v_f / speed) / n_steps
        mass0 = field.mass()
        for _ in range(n_steps):
            field = step(field, p, dt, transport_only=True, second_order=flag)
        assert abs(field.mass() - mass0) <= 1e-12
        assert field.min_density() >= -1e-14
        results[flag] = np.sum(np.abs(field.p[:, j0] - row0)) * field.dv
    assert results[True] < 0.3 * results[False]


def test_mass_and_positivity_every_step(cosine_init, fig2):
    field = GridField.from_initial_data(cosine_init, 48, 96, -10.0, 20.0)
    dt = cfl_dt(field)
    mass_prev = field.mass()
    for _ in range(200):
        field = step(field, fig2, dt)
        m = field.mass()
        assert abs(m - mass_prev) <= 1e-12
        assert field.min_density() >= -1e-14
        mass_prev = m


def test_cfl_guard():
    init = gaussian_v_homogeneous(5.0, 1.0)
    field = GridField.from_initial_data(init, 64, 64, -10.0, 25.0)
    with pytest.raises(CflError):
        check_cfl(field, 10.0 * cfl_dt(field))
    with pytest.raises(CflError):
        step(field, frozen_params(), 2.0 * cfl_dt(field))


def test_seam_firing_matches_closed_form():
    init = gaussian_v_homogeneous(5.0, 1.0)
    field = GridField.from_initial_data(init, 32, 512, -10.0, 25.0)
    clamped, raw = firing_rate_grid(field)
    assert clamped == pytest.approx(firing_rate(5.0, 1.0, 1.0), rel=1e-6)
    assert raw == clamped


def test_seam_firing_empty_positive_range():
    init = gaussian_v_homogeneous(-8.0, 0.25)
    field = GridField.from_initial_data(init, 16, 256, -16.0, -2.0)
    clamped, raw = firing_rate_grid(field)
    assert clamped == 0.0
    assert raw == 0.0


def test_run_returns_series_with_shared_schema(cosine_init, fig2):
    res = run(cosine_init, fig2, t_end=0.2, n_v=48, n_g=96)
    assert isinstance(res.series, FiringSeries)
    assert res.series.t_end == pytest.approx(0.2)
    assert np.all(res.series.N >= 0.0)
    assert np.all(res.series.D >= -1e-12)
    assert res.diagnostics["mass_drift_per_unit_time"] <= 1e-10
    assert res.diagnostics["min_density"] >= -1e-14


def test_predictor_corrector_close_to_explicit(cosine_init, fig2):
    res_a = run(cosine_init, fig2, t_end=0.2, n_v=48, n_g=96)
    res_b = run(cosine_init, fig2, t_end=0.2, n_v=48, n_g=96,
                predictor_corrector=True)
    gap = np.max(np.abs(res_a.series.N - res_b.series.N))
    assert 0.0 < gap <= 5e-3 * np.max(res_a.series.N)


def test_divergent_first_moment_growth():
    p = ModelParams(10.0, 1.0, 2.0, 0.1)
    init = gaussian_v_homogeneous(5.0, 1.0)
    t_end = 1.0
    res = run(init, p, t_end=t_end, n_v=32, n_g=256, g_lo=-10.0, g_hi=50.0)
    m1 = res.final_field.first_moment()
    assert m1 >= 5.0 + p.g0 * t_end * 0.95


def test_eps_sweep_common_grid(cosine_init, fig2):
    out = run_eps_sweep(cosine_init, fig2, [1.0], t_end=0.2, n_v=48, n_g=96)
    series, t_out, n_out, diag = out[1.0]
    assert t_out[0] == 0.0 and t_out[-1] == pytest.approx(0.2)
    single = run(cosine_init, fig2, t_end=0.2, n_v=48, n_g=96)
    np.testing.assert_allclose(
        n_out, np.interp(t_out, single.series.times, single.series.N), atol=1e-12)
