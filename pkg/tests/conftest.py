import numpy as np
import pytest

from vclab.params import ModelParams, cosine_perturbed, gaussian_v_homogeneous

FIG1 = ModelParams(g0=10.0, g1=1.0, a0=2.0, a1=0.1, v_f=1.0)
FIG2 = ModelParams(g0=10.0, g1=0.5, a0=2.0, a1=0.1, v_f=1.0)


@pytest.fixture(scope="session")
def fig1():
    return FIG1


@pytest.fixture(scope="session")
def fig2():
    return FIG2


@pytest.fixture(scope="session")
def cosine_init():
    """(1 - 0.2 cos(2 pi v)) x Gaussian(5, 1), voltage bump mid-domain."""
    return cosine_perturbed(5.0, 1.0, amplitude=0.2, phase_shifted=True)


@pytest.fixture(scope="session")
def gauss_init():
    return gaussian_v_homogeneous(5.0, 1.0)


@pytest.fixture(scope="session")
def modes_cosine_t10(cosine_init, fig2):
    """Reference semi-explicit run shared by the cross-solver criteria."""
    from vclab import modes
    return modes.run(cosine_init, fig2, t_end=10.0, dt=1e-3, k_max=2)


@pytest.fixture(scope="session")
def pde_cosine_t10(cosine_init, fig2):
    from vclab import pde
    return pde.run(cosine_init, fig2, t_end=10.0, n_v=256, n_g=256)


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(1234)


@pytest.fixture(scope="session")
def sweep_init():
    from vclab import presets
    return presets.preset_init(1.0)


@pytest.fixture(scope="session")
def limit_trace_fig2(sweep_init):
    from vclab import fast_limit
    prof = fast_limit.FclState.from_initial_data(sweep_init)
    p0 = ModelParams(10.0, 0.5, 2.0, 0.1, epsilon=0.0)
    return fast_limit.evolve(prof, p0, t_end=3.2)


@pytest.fixture(scope="session")
def eps_sweep_fig2(sweep_init, fig2):
    from vclab import pde
    return pde.run_eps_sweep(sweep_init, fig2, [0.5, 0.1, 0.02], t_end=3.0,
                             n_v=256, n_g=256)


@pytest.fixture(scope="session")
def eps_sweep_fig1(sweep_init, fig1):
    from vclab import pde
    return pde.run_eps_sweep(sweep_init, fig1, [0.5, 0.1], t_end=0.1,
                             n_v=256, n_g=256)
