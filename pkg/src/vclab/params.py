"""Model parameters, initial-data descriptors, and the velocity change of variable.

Initial data is canonically a separable sum of trigonometric polynomials in
voltage times Gaussians in conductance, so every voltage-Fourier coefficient
is a Gaussian mixture with a closed form.  Grid-sampled data is admitted and
converted to tabulated coefficients by quadrature in v.  All types are
immutable after construction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, DomainError

MASS_TOL = 1e-12
_NONNEG_SAMPLES = 1024

PARAMS_JSON_SCHEMA = {
    "type": "object",
    "required": ["g0", "g1", "a0", "a1", "v_f", "epsilon"],
    "properties": {
        "g0": {"type": "number", "exclusiveMinimum": 0},
        "g1": {"type": "number", "minimum": 0},
        "a0": {"type": "number", "exclusiveMinimum": 0},
        "a1": {"type": "number", "exclusiveMinimum": 0},
        "v_f": {"type": "number", "exclusiveMinimum": 0},
        "epsilon": {"type": "number", "minimum": 0},
    },
    "additionalProperties": False,
}

INITIAL_DATA_JSON_SCHEMA = {
    "type": "object",
    "required": ["kind"],
    "properties": {
        "kind": {"enum": ["separable-sum", "v-homogeneous", "grid-samples"]},
        "v_f": {"type": "number", "exclusiveMinimum": 0},
        "terms": {"type": "array"},
        "components": {"type": "array"},
        "v_nodes": {"type": "array"},
        "g_nodes": {"type": "array"},
        "values": {"type": "array"},
    },
}


@dataclass(frozen=True)
class ModelParams:
    """Drift/diffusion feedback parameters, threshold voltage, timescale ratio.

    ``epsilon`` is the conductance/voltage timescale ratio: 1 for the base
    model, 0 flags the transport limit model (legal only there).
    """

    g0: float
    g1: float
    a0: float
    a1: float
    v_f: float = 1.0
    epsilon: float = 1.0

    def validate(self) -> None:
        if not self.g0 > 0.0:
            raise ConfigError("g0 must be positive")
        if self.g1 < 0.0:
            raise ConfigError("g1 must be nonnegative")
        if not self.a0 > 0.0:
            raise ConfigError("a0 must be positive")
        if self.a1 < 0.0:
            # a1 = 0 is a degenerate test mode (frozen diffusion), like g1 = 0
            raise ConfigError("a1 must be nonnegative")
        if not self.v_f > 0.0:
            raise ConfigError("v_f must be positive")
        if self.epsilon < 0.0:
            raise ConfigError("epsilon must be nonnegative")

    def to_json_dict(self) -> dict:
        return {
            "g0": self.g0, "g1": self.g1, "a0": self.a0, "a1": self.a1,
            "v_f": self.v_f, "epsilon": self.epsilon,
        }

    @classmethod
    def from_json_dict(cls, d: dict) -> "ModelParams":
        unknown = set(d) - {"g0", "g1", "a0", "a1", "v_f", "epsilon"}
        if unknown:
            raise ConfigError(f"unknown params fields: {sorted(unknown)}")
        try:
            p = cls(
                g0=float(d["g0"]), g1=float(d["g1"]),
                a0=float(d["a0"]), a1=float(d["a1"]),
                v_f=float(d.get("v_f", 1.0)),
                epsilon=float(d.get("epsilon", 1.0)),
            )
        except KeyError as exc:
            raise ConfigError(f"missing params field: {exc.args[0]}") from exc
        p.validate()
        return p


def validate(params: ModelParams) -> None:
    """Raise :class:`ConfigError` naming the first violated constraint."""
    params.validate()


def _gauss(g, mean, variance):
    return np.exp(-0.5 * np.square(g - mean) / variance) / math.sqrt(2.0 * math.pi * variance)


@dataclass(frozen=True)
class SeparableTerm:
    """One product term: trig polynomial in v times a weighted Gaussian in g.

    T(v) = cos_coeffs[0] + sum_k cos_coeffs[k] cos(2 pi k v / V_F)
                         + sum_k sin_coeffs[k-1] sin(2 pi k v / V_F)
    """

    cos_coeffs: tuple
    sin_coeffs: tuple = ()
    mean: float = 0.0
    variance: float = 1.0
    weight: float = 1.0

    def trig_value(self, v, v_f):
        v = np.asarray(v, dtype=float)
        out = np.full_like(v, float(self.cos_coeffs[0]))
        mu = 2.0 * math.pi / v_f
        for k in range(1, len(self.cos_coeffs)):
            out = out + self.cos_coeffs[k] * np.cos(k * mu * v)
        for k in range(1, len(self.sin_coeffs) + 1):
            out = out + self.sin_coeffs[k - 1] * np.sin(k * mu * v)
        return out

    def trig_fourier(self, k: int, v_f: float) -> complex:
        """integral_0^{V_F} T(v) exp(-i k 2 pi v / V_F) dv, closed form."""
        if k == 0:
            return complex(v_f * self.cos_coeffs[0])
        ka = abs(k)
        a_k = self.cos_coeffs[ka] if ka < len(self.cos_coeffs) else 0.0
        b_k = self.sin_coeffs[ka - 1] if ka - 1 < len(self.sin_coeffs) else 0.0
        t = 0.5 * v_f * complex(a_k, -b_k)
        return t.conjugate() if k < 0 else t


@dataclass(frozen=True)
class ModeCoeff:
    """Voltage-Fourier coefficient of the initial data, as a profile in g.

    Either a Gaussian mixture with complex amplitudes (closed-form kinds) or a
    tabulated complex profile with trapezoid quadrature weights.  The solver
    treats a tabulated profile as a mixture of point masses (zero variance).
    """

    k: int
    amps: np.ndarray
    means: np.ndarray
    variances: np.ndarray
    tabulated: bool = False

    def evaluate(self, g):
        g = np.asarray(g, dtype=float)
        if self.tabulated:
            # point-mass quadrature amps carry the node weights; divide out
            w = _trapezoid_weights(self.means)
            vals = self.amps / w
            re = np.interp(g, self.means, vals.real, left=0.0, right=0.0)
            im = np.interp(g, self.means, vals.imag, left=0.0, right=0.0)
            return re + 1j * im
        out = np.zeros(g.shape, dtype=complex)
        for a, m, s in zip(self.amps, self.means, self.variances):
            out += a * _gauss(g, m, s)
        return out

    def l1_norm(self) -> float:
        """integral |q_k(g)| dg by dense quadrature (exact sum for point masses)."""
        if self.tabulated:
            return float(np.sum(np.abs(self.amps)))
        if len(self.amps) == 0:
            return 0.0
        if len(self.amps) == 1:
            return float(abs(self.amps[0]))
        lo = float(np.min(self.means - 10.0 * np.sqrt(self.variances)))
        hi = float(np.max(self.means + 10.0 * np.sqrt(self.variances)))
        y = np.linspace(lo, hi, 8192)
        return float(np.trapezoid(np.abs(self.evaluate(y)), y))

    def mass(self) -> complex:
        return complex(np.sum(self.amps))

    def first_abs_moment(self) -> float:
        """integral |y| |q_k(y)| dy, used in per-mode firing bounds."""
        span_lo = float(np.min(self.means - 10.0 * np.sqrt(self.variances)))
        span_hi = float(np.max(self.means + 10.0 * np.sqrt(self.variances)))
        y = np.linspace(span_lo, span_hi, 8192)
        return float(np.trapezoid(np.abs(y) * np.abs(self.evaluate(y)), y))


def _trapezoid_weights(x: np.ndarray) -> np.ndarray:
    w = np.empty_like(x)
    w[1:-1] = 0.5 * (x[2:] - x[:-2])
    w[0] = 0.5 * (x[1] - x[0])
    w[-1] = 0.5 * (x[-1] - x[-2])
    return w


@dataclass(frozen=True)
class InitialData:
    """Initial probability density on (0, V_F) x R.

    kind is one of "separable-sum", "v-homogeneous", "grid-samples"; the
    matching payload field is set.  Mass must be 1 within 1e-12 and the
    density nonnegative (checked by dense sampling for the analytic kinds).
    """

    kind: str
    v_f: float = 1.0
    terms: tuple = ()
    components: tuple = ()   # (mean, variance, weight) triples
    v_nodes: np.ndarray | None = None
    g_nodes: np.ndarray | None = None
    values: np.ndarray | None = None

    def mass(self) -> float:
        if self.kind == "separable-sum":
            return float(sum(t.weight * t.trig_fourier(0, self.v_f).real for t in self.terms))
        if self.kind == "v-homogeneous":
            return float(sum(w for _, _, w in self.components))
        dv = self.v_nodes[1] - self.v_nodes[0]
        col = np.trapezoid(self.values, self.g_nodes, axis=1)
        return float(np.sum(col) * dv)

    def validate(self) -> None:
        if self.kind not in ("separable-sum", "v-homogeneous", "grid-samples"):
            raise ConfigError(f"unknown initial data kind: {self.kind}")
        if abs(self.mass() - 1.0) > MASS_TOL:
            raise ConfigError(f"initial mass must be 1, got {self.mass():.17g}")
        if self.kind == "grid-samples":
            if np.any(self.values < 0.0):
                raise ConfigError("grid-sampled initial data must be nonnegative")
            dv = np.diff(self.v_nodes)
            if not np.allclose(dv, dv[0]):
                raise ConfigError("v_nodes must be uniform")
        elif self.kind == "separable-sum":
            for t in self.terms:
                if t.variance <= 0.0:
                    raise ConfigError("term variance must be positive")
            lo, hi = self._g_span()
            v = np.linspace(0.0, self.v_f, _NONNEG_SAMPLES)
            g = np.linspace(lo, hi, _NONNEG_SAMPLES)
            dens = self.density(v[:, None], g[None, :])
            if dens.min() < -1e-12:
                raise ConfigError(
                    f"separable-sum density is negative (min {dens.min():.3e} on sample grid)")
        else:
            for m, s, w in self.components:
                if s <= 0.0:
                    raise ConfigError("component variance must be positive")
            lo, hi = self._g_span()
            g = np.linspace(lo, hi, 4096)
            dens = self.density(0.0, g)
            if np.min(dens) < -1e-12:
                raise ConfigError("v-homogeneous density is negative somewhere")

    def _g_span(self):
        if self.kind == "separable-sum":
            ms = [(t.mean, t.variance) for t in self.terms]
        else:
            ms = [(m, s) for m, s, _ in self.components]
        lo = min(m - 8.0 * math.sqrt(s) for m, s in ms)
        hi = max(m + 8.0 * math.sqrt(s) for m, s in ms)
        return lo, hi

    def density(self, v, g):
        """Pointwise density; v and g broadcast."""
        v = np.asarray(v, dtype=float)
        g = np.asarray(g, dtype=float)
        if self.kind == "separable-sum":
            out = 0.0
            for t in self.terms:
                out = out + t.weight * t.trig_value(v, self.v_f) * _gauss(g, t.mean, t.variance)
            return out
        if self.kind == "v-homogeneous":
            out = 0.0
            for m, s, w in self.components:
                out = out + (w / self.v_f) * _gauss(g, m, s)
            return out * np.ones_like(v)
        from scipy.interpolate import RegularGridInterpolator
        interp = RegularGridInterpolator(
            (self.v_nodes, self.g_nodes), self.values,
            method="linear", bounds_error=False, fill_value=0.0)
        vv, gg = np.broadcast_arrays(v, g)
        pts = np.stack([np.mod(vv.ravel(), self.v_f), gg.ravel()], axis=-1)
        return interp(pts).reshape(vv.shape)

    def v_marginal(self, v):
        """Marginal density in v (integral over g)."""
        v = np.asarray(v, dtype=float)
        if self.kind == "separable-sum":
            out = np.zeros_like(v)
            for t in self.terms:
                out = out + t.weight * t.trig_value(v, self.v_f)
            return out
        if self.kind == "v-homogeneous":
            return np.full_like(v, 1.0 / self.v_f)
        rho = np.trapezoid(self.values, self.g_nodes, axis=1)
        return np.interp(v, self.v_nodes, rho, period=self.v_f)

    def to_json_dict(self) -> dict:
        if self.kind == "separable-sum":
            return {
                "kind": self.kind, "v_f": self.v_f,
                "terms": [
                    {"cos_coeffs": list(t.cos_coeffs), "sin_coeffs": list(t.sin_coeffs),
                     "mean": t.mean, "variance": t.variance, "weight": t.weight}
                    for t in self.terms
                ],
            }
        if self.kind == "v-homogeneous":
            return {
                "kind": self.kind, "v_f": self.v_f,
                "components": [{"mean": m, "variance": s, "weight": w}
                               for m, s, w in self.components],
            }
        return {
            "kind": self.kind, "v_f": self.v_f,
            "v_nodes": self.v_nodes.tolist(),
            "g_nodes": self.g_nodes.tolist(),
            "values": self.values.tolist(),
        }

    @classmethod
    def from_json_dict(cls, d: dict) -> "InitialData":
        kind = d.get("kind")
        v_f = float(d.get("v_f", 1.0))
        if kind == "separable-sum":
            terms = tuple(
                SeparableTerm(
                    cos_coeffs=tuple(t["cos_coeffs"]),
                    sin_coeffs=tuple(t.get("sin_coeffs", ())),
                    mean=float(t["mean"]), variance=float(t["variance"]),
                    weight=float(t.get("weight", 1.0)),
                ) for t in d["terms"]
            )
            init = cls(kind=kind, v_f=v_f, terms=terms)
        elif kind == "v-homogeneous":
            comps = tuple((float(c["mean"]), float(c["variance"]), float(c.get("weight", 1.0)))
                          for c in d["components"])
            init = cls(kind=kind, v_f=v_f, components=comps)
        elif kind == "grid-samples":
            init = cls(
                kind=kind, v_f=v_f,
                v_nodes=np.asarray(d["v_nodes"], dtype=float),
                g_nodes=np.asarray(d["g_nodes"], dtype=float),
                values=np.asarray(d["values"], dtype=float),
            )
        else:
            raise ConfigError(f"unknown initial data kind: {kind!r}")
        init.validate()
        return init


def gaussian_v_homogeneous(mean: float, variance: float, v_f: float = 1.0) -> InitialData:
    return InitialData(kind="v-homogeneous", v_f=v_f, components=((mean, variance, 1.0),))


def cosine_perturbed(mean: float, variance: float, v_f: float = 1.0,
                     amplitude: float = 1.0, phase_shifted: bool = False) -> InitialData:
    """(1/V_F)(1 +- amplitude cos(2 pi v / V_F)) x Gaussian(mean, variance).

    With ``phase_shifted`` the cosine is flipped so the voltage maximum sits
    mid-domain instead of at the firing seam.
    """
    amp = -amplitude if phase_shifted else amplitude
    term = SeparableTerm(cos_coeffs=(1.0 / v_f, amp / v_f), mean=mean,
                         variance=variance, weight=1.0)
    return InitialData(kind="separable-sum", v_f=v_f, terms=(term,))


def fourier_init_coeffs(init: InitialData, k_max: int) -> list[ModeCoeff]:
    """Voltage-Fourier coefficients q_k(g) of the initial data for k = 0..k_max.

    Negative modes follow by conjugation since the data is real.  q_0 is real,
    nonnegative, with unit mass; every |q_k| has L1 norm at most 1.
    """
    if k_max < 0:
        raise DomainError(f"k_max must be nonnegative, got {k_max}")
    init.validate()
    out = []
    if init.kind == "separable-sum":
        for k in range(k_max + 1):
            amps, means, variances = [], [], []
            for t in init.terms:
                a = t.weight * t.trig_fourier(k, init.v_f)
                if a != 0:
                    amps.append(a)
                    means.append(t.mean)
                    variances.append(t.variance)
            out.append(ModeCoeff(k=k, amps=np.asarray(amps, dtype=complex),
                                 means=np.asarray(means, dtype=float),
                                 variances=np.asarray(variances, dtype=float)))
    elif init.kind == "v-homogeneous":
        for k in range(k_max + 1):
            if k == 0:
                amps = np.asarray([w for _, _, w in init.components], dtype=complex)
                means = np.asarray([m for m, _, _ in init.components], dtype=float)
                variances = np.asarray([s for _, s, _ in init.components], dtype=float)
            else:
                amps = np.zeros(0, dtype=complex)
                means = np.zeros(0)
                variances = np.zeros(0)
            out.append(ModeCoeff(k=k, amps=amps, means=means, variances=variances))
    else:
        mu = 2.0 * math.pi / init.v_f
        dv = init.v_nodes[1] - init.v_nodes[0]
        w_g = _trapezoid_weights(init.g_nodes)
        for k in range(k_max + 1):
            phase = np.exp(-1j * k * mu * init.v_nodes)
            prof = dv * np.tensordot(phase, init.values, axes=(0, 0))
            out.append(ModeCoeff(k=k, amps=prof * w_g, means=init.g_nodes.copy(),
                                 variances=np.zeros_like(init.g_nodes), tabulated=True))
    return out


@dataclass(frozen=True)
class VelocityProfile:
    """Positive voltage speed factor f(v) on [0, V_F] with its transformed span.

    Supported forms: affine f(v) = intercept + slope * v (identity and
    constants included) and tabulated samples with linear interpolation.
    """

    v_f: float
    intercept: float = 1.0
    slope: float = 0.0
    v_nodes: np.ndarray | None = None
    f_values: np.ndarray | None = None

    def __post_init__(self):
        if self.v_nodes is None:
            for v in (0.0, self.v_f):
                if self.f(v) <= 0.0:
                    raise DomainError(f"f({v}) must be positive")
        else:
            if np.any(self.f_values <= 0.0):
                raise DomainError("tabulated f must be positive on all nodes")

    def f(self, v):
        if self.v_nodes is None:
            return self.intercept + self.slope * np.asarray(v, dtype=float)
        return np.interp(v, self.v_nodes, self.f_values)

    def u_of_v(self, v):
        """u(v) = integral_0^v dv'/f(v')."""
        v = np.asarray(v, dtype=float)
        if self.v_nodes is None:
            if self.slope == 0.0:
                return v / self.intercept
            return np.log1p(self.slope * v / self.intercept) / self.slope
        # cumulative trapezoid of 1/f on the tabulated nodes, then interp
        inv = 1.0 / self.f_values
        cum = np.concatenate(([0.0], np.cumsum(
            0.5 * (inv[1:] + inv[:-1]) * np.diff(self.v_nodes))))
        return np.interp(v, self.v_nodes, cum)

    @property
    def u_f(self) -> float:
        return float(self.u_of_v(self.v_f))


def transform_velocity(profile: VelocityProfile, v_nodes, rho_values):
    """Map a v-marginal density to the straightened voltage variable.

    Returns (U_F, u_nodes, transformed density) with the density
    rho~(u(v)) = f(v) rho(v); total mass is preserved.
    """
    v_nodes = np.asarray(v_nodes, dtype=float)
    rho_values = np.asarray(rho_values, dtype=float)
    f = profile.f(v_nodes)
    if np.any(f <= 0.0):
        raise DomainError("f must be positive on the sample nodes")
    u_nodes = profile.u_of_v(v_nodes)
    return profile.u_f, u_nodes, f * rho_values


def inverse_transform_velocity(profile: VelocityProfile, v_nodes, transformed_values):
    """Undo :func:`transform_velocity` on the same node set."""
    v_nodes = np.asarray(v_nodes, dtype=float)
    return np.asarray(transformed_values, dtype=float) / profile.f(v_nodes)
