"""Figure-replica presets: timescale-ratio families plus the limit trace.

Both presets share the initial profile (1 - 0.2 cos(2 pi v/V_F))/V_F in
voltage times a Gaussian(10, 2) in conductance, with V_F fixed to 1; the
choice is recorded in the run manifest.  The strong-feedback preset produces
series that grow without bound next to a limit trace that blows up in finite
time; the moderate-feedback preset produces damped oscillations next to a
periodic limit trace.
"""

from __future__ import annotations

import math

import numpy as np

from . import fast_limit, modes
from .params import InitialData, ModelParams, cosine_perturbed

PRESETS = {
    "figure1": {
        "params": {"g0": 10.0, "g1": 1.0, "a0": 2.0, "a1": 0.1, "v_f": 1.0},
        "eps_list": [0.5, 0.25, 0.1],
        "t_end": 0.5,
        "fcl_t_end": 0.5,
        "stop_above": 1e9,
    },
    "figure2": {
        "params": {"g0": 10.0, "g1": 0.5, "a0": 2.0, "a1": 0.1, "v_f": 1.0},
        "eps_list": [0.5, 0.25, 0.1],
        "t_end": 2.0,
        "fcl_t_end": 2.0,
        "stop_above": None,
    },
}

INIT_MEAN = 10.0
INIT_VARIANCE = 2.0
INIT_AMPLITUDE = 0.2


def preset_init(v_f: float = 1.0) -> InitialData:
    return cosine_perturbed(INIT_MEAN, INIT_VARIANCE, v_f=v_f,
                            amplitude=INIT_AMPLITUDE, phase_shifted=True)


def run_preset(name: str):
    """Execute a preset; returns (spec, {eps: ModesResult}, FclResult)."""
    if name not in PRESETS:
        raise KeyError(f"unknown preset {name!r}; available: {sorted(PRESETS)}")
    spec = PRESETS[name]
    base = spec["params"]
    init = preset_init(base["v_f"])
    eps_runs = {}
    for eps in spec["eps_list"]:
        params = ModelParams(epsilon=eps, **base)
        dt = eps / 500.0
        eps_runs[eps] = modes.run(init, params, t_end=spec["t_end"], dt=dt,
                                  k_max=4, stop_above=spec["stop_above"])
    params0 = ModelParams(epsilon=0.0, **base)
    profile = fast_limit.FclState.from_initial_data(init)
    fcl_res = fast_limit.evolve(profile, params0, t_end=spec["fcl_t_end"])
    return spec, eps_runs, fcl_res
