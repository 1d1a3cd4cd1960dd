"""Numerical laboratory for a separable voltage-conductance kinetic neuron model.

Four levels of reduction of the same dynamics:

- :mod:`vclab.modes` -- semi-explicit voltage-Fourier solution of the kinetic
  equation for any timescale ratio epsilon > 0;
- :mod:`vclab.pde` -- direct finite-volume solver, the scheme-level oracle;
- :mod:`vclab.moment_ode` -- the closed mean/variance ODE of the Gaussian
  conductance profile;
- :mod:`vclab.fast_limit` -- the epsilon -> 0 transport model with its
  blow-up / periodic dichotomy.

:mod:`vclab.firing` holds the Gaussian firing nonlinearity shared by all of
them, :mod:`vclab.verify` the invariant suites, and :mod:`vclab.cli` the
command-line harness.
"""

__version__ = "0.1.0"

from .firing import GaussianState, firing_rate, firing_rate_grad, solve_limit_firing
from .params import InitialData, ModelParams, VelocityProfile

__all__ = [
    "GaussianState",
    "InitialData",
    "ModelParams",
    "VelocityProfile",
    "firing_rate",
    "firing_rate_grad",
    "solve_limit_firing",
    "__version__",
]
