"""Firing rate of a Gaussian conductance profile and the scalar limit fixed point.

For a Gaussian density with mean ``b`` and variance ``c`` the firing rate is
the positive-part first moment divided by the threshold voltage,

    N(b, c) = (1/V_F) * integral_0^inf g * G(g; b, c) dg,

which collapses to the closed form

    V_F * N = sqrt(c) * phi(lam) + b * Phi(lam),    lam = b / sqrt(c),

with phi / Phi the standard normal density / CDF.  Everything here is a pure
function of scalars or numpy arrays and safe for concurrent use.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import ndtr

from .errors import DomainError

log = logging.getLogger(__name__)

_SQRT2PI = math.sqrt(2.0 * math.pi)

#: Geometric-growth cap for the upper bisection bracket of the limit fixed point.
BRACKET_CAP = 1e12


@dataclass(frozen=True)
class GaussianState:
    """Mean/variance pair of a Gaussian conductance profile (variance > 0)."""

    b: float
    c: float

    def __post_init__(self):
        if not self.c > 0.0:
            raise DomainError(f"variance c must be positive, got {self.c}")

    @property
    def lam(self) -> float:
        """Signal-to-spread ratio b / sqrt(c)."""
        return self.b / math.sqrt(self.c)


def _phi(x):
    return np.exp(-0.5 * np.square(x)) / _SQRT2PI


def firing_rate(b, c, v_f):
    """Firing rate of a Gaussian profile; accepts scalars or arrays.

    Satisfies b_+ <= V_F * N <= b_+ + sqrt(c) and is strictly increasing in
    both b and c.
    """
    b = np.asarray(b, dtype=float)
    c = np.asarray(c, dtype=float)
    if np.any(c <= 0.0):
        raise DomainError("variance c must be positive")
    if not v_f > 0.0:
        raise DomainError("threshold v_f must be positive")
    lam = b / np.sqrt(c)
    out = (np.sqrt(c) * _phi(lam) + b * ndtr(lam)) / v_f
    return float(out) if out.ndim == 0 else out


def firing_rate_grad(b, c, v_f):
    """Partial derivatives (dN/db, dN/dc) of :func:`firing_rate`.

    dN/db = Phi(lam) / V_F lies in (0, 1/V_F); dN/dc = phi(lam) / (2 sqrt(c) V_F) > 0.
    """
    b = np.asarray(b, dtype=float)
    c = np.asarray(c, dtype=float)
    if np.any(c <= 0.0):
        raise DomainError("variance c must be positive")
    if not v_f > 0.0:
        raise DomainError("threshold v_f must be positive")
    lam = b / np.sqrt(c)
    d_b = ndtr(lam) / v_f
    d_c = _phi(lam) / (2.0 * np.sqrt(c) * v_f)
    if d_b.ndim == 0:
        return float(d_b), float(d_c)
    return d_b, d_c


def stability_margin(lam):
    """Tail/ratio pair (A1, A2) and the slack 1 - A1 - A2, nonnegative for lam >= 0.

    A1 is the normal CDF at lam; A2 = (phi/2) / (phi + lam * Phi).  The slack
    is what keeps the steady state's linearization determinant positive.
    """
    lam = np.asarray(lam, dtype=float)
    if np.any(lam < 0.0):
        raise DomainError("lam must be nonnegative")
    a1 = ndtr(lam)
    ph = _phi(lam)
    a2 = 0.5 * ph / (ph + lam * a1)
    # ndtr(-lam) instead of 1 - a1: avoids cancellation for large lam
    margin = ndtr(-lam) - a2
    if a1.ndim == 0:
        return float(a1), float(a2), float(margin)
    return a1, a2, margin


def solve_limit_firing(rho_bar: float, params) -> float:
    """Solve N = rho_bar * V_F * firing_rate(g0 + g1 N, a0 + a1 N) for N >= 0.

    Returns ``math.inf`` when ``rho_bar * g1 >= 1``, where no finite solution
    exists; this is the blow-up value of the transport limit model.  Otherwise
    the unique root is bracketed from the analytic lower bound
    g0 rho_bar / (1 - g1 rho_bar) and found by bisection.
    """
    if rho_bar < 0.0:
        raise DomainError(f"density value must be nonnegative, got {rho_bar}")
    if rho_bar == 0.0:
        return 0.0
    g0, g1, a0, a1, v_f = params.g0, params.g1, params.a0, params.a1, params.v_f
    if rho_bar * g1 >= 1.0:
        return math.inf

    def h(n):
        return n - rho_bar * v_f * firing_rate(g0 + g1 * n, a0 + a1 * n, v_f)

    lo = g0 * rho_bar / (1.0 - g1 * rho_bar)
    hi = max(2.0 * lo, 1.0)
    while h(hi) <= 0.0:
        hi *= 2.0
        if hi > BRACKET_CAP:
            log.warning(
                "limit firing bracket exceeded %.1e at rho_bar=%.17g "
                "(g1*rho_bar=%.17g); reporting no solution",
                BRACKET_CAP, rho_bar, g1 * rho_bar,
            )
            return math.inf
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        val = h(mid)
        if abs(val) <= 1e-12:
            return mid
        if val > 0.0:
            hi = mid
        else:
            lo = mid
        if hi - lo <= 4.0 * np.spacing(hi):
            break
    return 0.5 * (lo + hi)
