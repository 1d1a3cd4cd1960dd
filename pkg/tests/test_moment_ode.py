import math

import numpy as np
import pytest
from scipy.integrate import quad
from scipy.optimize import brentq

from vclab.errors import DomainError
from vclab.firing import GaussianState, firing_rate
from vclab.moment_ode import (Classification, classify, integrate, jacobian, rhs,
                              steady_state)
from vclab.params import ModelParams


def closed_form_rate(b, c):
    lam = b / math.sqrt(c)
    phi = math.exp(-lam * lam / 2) / math.sqrt(2 * math.pi)
    cdf = 0.5 * math.erfc(-lam / math.sqrt(2))
    return math.sqrt(c) * phi + b * cdf


def test_rhs_hand_value(fig2):
    n = closed_form_rate(1.0, 1.0)
    db, dc = rhs(GaussianState(1.0, 1.0), fig2)
    assert db == pytest.approx(10.0 + 0.5 * n - 1.0, abs=1e-12)
    assert dc == pytest.approx(4.0 + 0.2 * n - 2.0, abs=1e-12)


def test_rhs_vanishes_at_steady_state(fig2):
    rep = steady_state(fig2)
    db, dc = rhs(GaussianState(rep.b_star, rep.c_star), fig2)
    assert abs(db) <= 1e-10 and abs(dc) <= 1e-10


def test_rhs_variance_pushed_up_at_floor(fig2):
    _, dc = rhs(GaussianState(0.0, fig2.a0), fig2)
    assert dc > 0.0


def test_steady_state_bisection_oracle(fig2):
    rep = steady_state(fig2)
    assert rep.b_star >= 20.0 - 1e-9
    assert rep.c_star >= 4.0 - 1e-9
    assert rep.lower_bounds == (20.0, 4.0)

    def residual(c):
        beta = fig2.g0 + (fig2.g1 / fig2.a1) * (c - fig2.a0)
        return fig2.a0 + fig2.a1 * firing_rate(beta, c, fig2.v_f) - c

    c_oracle = brentq(residual, fig2.a0, 100.0, xtol=1e-13)
    assert rep.c_star == pytest.approx(c_oracle, abs=1e-9)
    assert abs(residual(rep.c_star)) <= 1e-12
    assert rep.trace < 0.0 and rep.det > 0.0 and rep.stable


def test_steady_state_none_at_or_above_threshold():
    assert steady_state(ModelParams(10.0, 1.0, 2.0, 0.1)) is None
    assert steady_state(ModelParams(10.0, 1.5, 2.0, 0.1)) is None


def test_steady_state_degenerate_no_mean_feedback():
    p = ModelParams(g0=10.0, g1=0.0, a0=2.0, a1=0.1)
    rep = steady_state(p)
    assert rep.b_star == pytest.approx(10.0, abs=1e-10)
    assert rep.c_star == pytest.approx(
        p.a0 + p.a1 * firing_rate(10.0, rep.c_star, 1.0), abs=1e-10)


def test_steady_state_frozen_diffusion_mode():
    p = ModelParams(g0=10.0, g1=0.5, a0=2.0, a1=0.0)
    rep = steady_state(p)
    assert rep.c_star == p.a0
    assert rep.b_star == pytest.approx(
        p.g0 + p.g1 * firing_rate(rep.b_star, p.a0, 1.0), abs=1e-10)


def test_jacobian_matches_finite_differences(fig2):
    st = GaussianState(3.0, 2.0)
    jac = jacobian(st, fig2)
    h = 1e-6
    fd = np.empty((2, 2))
    for col, (db, dc) in enumerate([(h, 0.0), (0.0, h)]):
        hi = rhs(GaussianState(st.b + db, st.c + dc), fig2)
        lo = rhs(GaussianState(st.b - db, st.c - dc), fig2)
        fd[0, col] = (hi[0] - lo[0]) / (2 * h)
        fd[1, col] = (hi[1] - lo[1]) / (2 * h)
    np.testing.assert_allclose(jac, fd, rtol=1e-6, atol=1e-9)
    assert jac[0, 1] > 0.0 and jac[1, 0] > 0.0


def test_integrate_holds_equilibrium(fig2):
    rep = steady_state(fig2)
    traj = integrate(GaussianState(rep.b_star, rep.c_star), fig2, t_end=10.0, dt=0.01)
    drift = abs(traj.b[-1] - rep.b_star) + abs(traj.c[-1] - rep.c_star)
    assert drift <= 1e-8 * 10.0


def test_integrate_converges_from_cold_start(fig2):
    rep = steady_state(fig2)
    traj = integrate(GaussianState(0.0, 1.0), fig2, t_end=50.0, dt=0.01)
    assert abs(traj.b[-1] - rep.b_star) <= 1e-6
    assert abs(traj.c[-1] - rep.c_star) <= 1e-6
    assert np.all(traj.c > 0.0)
    assert np.all(traj.firing >= 0.0)


def test_integrate_positivity_floor(fig2):
    dt = 1e-3
    traj = integrate(GaussianState(-5.0, 1e-3), fig2, t_end=5.0, dt=dt)
    floor = fig2.a0 * (1.0 - np.exp(-2.0 * traj.times)) * (1.0 - 10.0 * dt)
    assert np.all(traj.c >= np.minimum(floor, 1e-3) - 1e-12)


def test_integrate_divergent_growth_floor():
    for g1 in (1.0, 2.0):
        p = ModelParams(10.0, g1, 2.0, 0.1)
        traj = integrate(GaussianState(0.0, 1.0), p, t_end=20.0, dt=1e-3)
        assert np.all(traj.b >= traj.b[0] + p.g0 * traj.times * 0.95 - 1e-9)


def test_integrate_divergence_window_flag():
    p = ModelParams(10.0, 2.0, 2.0, 0.1)
    traj = integrate(GaussianState(0.0, 1.0), p, t_end=60.0, dt=1e-3)
    assert traj.diverged
    assert traj.b[-1] > 1e6
    assert traj.times[-1] < 60.0


def test_integrate_validate_halving(fig2):
    traj = integrate(GaussianState(0.0, 1.0), fig2, t_end=2.0, dt=0.01,
                     validate_halving=True)
    assert len(traj.times) == 201


def test_integrate_rejects_bad_steps(fig2):
    with pytest.raises(DomainError):
        integrate(GaussianState(0.0, 1.0), fig2, t_end=1.0, dt=-0.1)


def test_classify_dichotomy():
    assert classify(ModelParams(10.0, 0.5, 2.0, 0.1)).kind == "convergent"
    assert classify(ModelParams(10.0, 0.5, 2.0, 0.1)).steady is not None
    assert classify(ModelParams(10.0, 1.0, 2.0, 0.1)).kind == "divergent"
    assert classify(ModelParams(10.0, 2.0, 2.0, 0.1)).kind == "divergent"


def test_classify_scales_with_threshold():
    assert classify(ModelParams(10.0, 1.5, 2.0, 0.1, v_f=2.0)).kind == "convergent"
    assert classify(ModelParams(10.0, 2.0, 2.0, 0.1, v_f=2.0)).kind == "divergent"


def test_steady_state_blowup_toward_threshold():
    b_half = steady_state(ModelParams(10.0, 0.5, 2.0, 0.1)).b_star
    b_near = steady_state(ModelParams(10.0, 0.99, 2.0, 0.1)).b_star
    assert b_near >= 50.0 * b_half * (1.0 - 1e-9)
    assert b_near >= 1000.0 - 1e-6
