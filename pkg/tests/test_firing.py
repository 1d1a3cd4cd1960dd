import math

import numpy as np
import pytest
from scipy.integrate import quad
from scipy.optimize import brentq

from vclab.errors import DomainError
from vclab.firing import (GaussianState, firing_rate, firing_rate_grad,
                          solve_limit_firing, stability_margin)
from vclab.params import ModelParams


def rate_by_quadrature(b, c, v_f):
    """Independent oracle: adaptive quadrature of the defining integral."""
    dens = lambda g: g * math.exp(-((g - b) ** 2) / (2 * c)) / math.sqrt(2 * math.pi * c)
    hi = abs(b) + 40.0 * math.sqrt(c)
    val, err = quad(dens, 0.0, hi, limit=400, epsabs=1e-13, epsrel=1e-13)
    assert err < 1e-11 * max(val, 1.0)
    return val / v_f


def test_rate_at_zero_mean_unit_variance():
    # lam = 0 collapses the closed form to the normal density at zero
    assert firing_rate(0.0, 1.0, 1.0) == pytest.approx(1.0 / math.sqrt(2 * math.pi), abs=1e-15)


def test_rate_deep_subthreshold_tiny():
    assert firing_rate(-10.0, 1.0, 1.0) < 1e-20


def test_rate_matches_quadrature():
    expected = rate_by_quadrature(3.0, 4.0, 1.0)
    assert expected == pytest.approx(3.0586135875252090, rel=1e-10)
    assert firing_rate(3.0, 4.0, 1.0) == pytest.approx(expected, rel=1e-10)
    for b, c in [(-2.0, 0.5), (0.7, 9.0), (12.0, 0.2), (-0.3, 25.0)]:
        assert firing_rate(b, c, 1.0) == pytest.approx(rate_by_quadrature(b, c, 1.0), rel=1e-10)


def test_rate_threshold_scaling():
    assert firing_rate(3.0, 4.0, 2.0) == pytest.approx(firing_rate(3.0, 4.0, 1.0) / 2.0)


def test_rate_domain_errors():
    with pytest.raises(DomainError):
        firing_rate(0.0, 0.0, 1.0)
    with pytest.raises(DomainError):
        firing_rate(0.0, -1.0, 1.0)
    with pytest.raises(DomainError):
        firing_rate(0.0, 1.0, 0.0)
    with pytest.raises(DomainError):
        GaussianState(1.0, -2.0)


def test_envelope_random_states(rng):
    b = rng.uniform(-50.0, 50.0, 10_000)
    c = rng.uniform(1e-6, 100.0, 10_000)
    val = firing_rate(b, c, 1.0)
    lo = np.maximum(b, 0.0)
    assert np.all(val >= lo - 1e-12)
    assert np.all(val <= lo + np.sqrt(c) + 1e-12)


def test_gradients_closed_form():
    d_b, d_c = firing_rate_grad(0.0, 1.0, 1.0)
    assert d_b == pytest.approx(0.5, abs=1e-15)
    assert d_c == pytest.approx(1.0 / (2.0 * math.sqrt(2 * math.pi)), abs=1e-15)


def test_gradients_match_finite_differences(rng):
    b = rng.uniform(-8.0, 8.0, 500)
    c = rng.uniform(0.05, 40.0, 500)
    h = 1e-5
    d_b, d_c = firing_rate_grad(b, c, 1.0)
    fd_b = (firing_rate(b + h, c, 1.0) - firing_rate(b - h, c, 1.0)) / (2 * h)
    fd_c = (firing_rate(b, c + h, 1.0) - firing_rate(b, c - h, 1.0)) / (2 * h)
    assert np.all(np.abs(fd_b - d_b) <= 1e-6 * np.abs(d_b) + 1e-9)
    assert np.all(np.abs(fd_c - d_c) <= 1e-6 * np.abs(d_c) + 1e-9)


def test_margin_at_zero():
    a1, a2, margin = stability_margin(0.0)
    assert a1 == pytest.approx(0.5, abs=1e-15)
    assert a2 == pytest.approx(0.5, abs=1e-15)
    assert margin == pytest.approx(0.0, abs=1e-15)


def test_margin_nonnegative_on_grid():
    lam = np.concatenate([np.array([0.1, 0.5, 1.0, 2.0, 5.0, 10.0]),
                          np.linspace(0.0, 50.0, 10_000)])
    _, _, margin = stability_margin(lam)
    assert np.min(margin) >= -1e-12


def test_margin_cross_checked_by_quadrature():
    # rebuild both pieces from raw integrals at a few points
    for lam in (0.1, 0.5, 2.0, 5.0):
        phi = math.exp(-lam * lam / 2) / math.sqrt(2 * math.pi)
        cdf, err = quad(lambda x: math.exp(-x * x / 2) / math.sqrt(2 * math.pi),
                        -40.0, lam)
        a1, a2, margin = stability_margin(lam)
        assert a1 == pytest.approx(cdf, abs=1e-10)
        assert a2 == pytest.approx(0.5 * phi / (phi + lam * cdf), abs=1e-10)
        assert margin >= 0.0


def test_margin_domain():
    with pytest.raises(DomainError):
        stability_margin(-0.1)


def test_limit_firing_zero_density(fig2):
    assert solve_limit_firing(0.0, fig2) == 0.0


def test_limit_firing_no_solution_at_threshold(fig2):
    assert math.isinf(solve_limit_firing(1.0 / fig2.g1, fig2))
    assert math.isinf(solve_limit_firing(2.0 / fig2.g1, fig2))


def test_limit_firing_negative_density(fig2):
    with pytest.raises(DomainError):
        solve_limit_firing(-0.1, fig2)


def test_limit_firing_against_independent_bisection(fig2):
    rho = 0.5
    n_star = solve_limit_firing(rho, fig2)
    lower = fig2.g0 * rho / (1.0 - fig2.g1 * rho)
    assert n_star >= lower
    assert n_star >= 20.0 / 3.0

    def h(n):
        return n - rho * rate_by_quadrature(fig2.g0 + fig2.g1 * n,
                                            fig2.a0 + fig2.a1 * n, 1.0)

    oracle = brentq(h, lower, 1e3, xtol=1e-12)
    assert n_star == pytest.approx(oracle, abs=1e-9)
    # residual of the solver's own equation
    from vclab.firing import firing_rate as fr
    resid = n_star - rho * fig2.v_f * fr(fig2.g0 + fig2.g1 * n_star,
                                         fig2.a0 + fig2.a1 * n_star, fig2.v_f)
    assert abs(resid) <= 1e-12


def test_limit_firing_monotone_and_divergent(fig2):
    inv = 1.0 / fig2.g1
    rhos = np.linspace(0.05, 0.95, 12) * inv
    vals = [solve_limit_firing(r, fig2) for r in rhos]
    assert all(b > a for a, b in zip(vals, vals[1:]))
    assert solve_limit_firing(inv - 1e-4 * inv, fig2) > 1e3 * solve_limit_firing(0.1 * inv, fig2)
