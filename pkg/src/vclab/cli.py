"""Command-line harness: run solvers, presets, sweeps and the verify suite.

Every run writes its artifacts plus a ``manifest.json`` (config echo, code
version, wall time, error budgets, outcome) into the required ``--out``
directory.  Outputs of fixed-step, randomness-free runs are byte-identical
across repeats.  Exit codes: 0 success, 2 configuration error, 3 solver
failure, 4 verify-suite failures present.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time

import numpy as np

from . import __version__, csvio, fast_limit, modes, moment_ode, pde, presets, verify
from .errors import ConfigError, DomainError
from .firing import GaussianState
from .params import InitialData, ModelParams, cosine_perturbed, gaussian_v_homogeneous

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_SOLVER = 3
EXIT_VERIFY = 4


def _add_param_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--g0", type=float, default=None)
    p.add_argument("--g1", type=float, default=None)
    p.add_argument("--a0", type=float, default=None)
    p.add_argument("--a1", type=float, default=None)
    p.add_argument("--vf", type=float, default=None, help="firing threshold voltage")
    p.add_argument("--eps", type=float, default=None, help="timescale ratio")


def _add_init_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--init-kind", choices=("gaussian", "cosine"), default=None,
                   help="v-homogeneous Gaussian or cosine-perturbed product data")
    p.add_argument("--init-mean", type=float, default=None)
    p.add_argument("--init-var", type=float, default=None)
    p.add_argument("--init-amp", type=float, default=None,
                   help="cosine amplitude; negative puts the bump mid-domain")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="vclab",
        description="voltage-conductance kinetic model laboratory")
    sub = ap.add_subparsers(dest="command", required=True)

    for name, desc in (("ode", "mean/variance moment ODE"),
                       ("modes", "semi-explicit Fourier-mode solver"),
                       ("pde", "finite-volume kinetic solver"),
                       ("fcl", "fast-conductance-limit transport"),
                       ("sweep", "grid-solver sweep over epsilon")):
        p = sub.add_parser(name, help=desc)
        p.add_argument("--config", type=str, default=None, help="JSON run config")
        p.add_argument("--out", type=str, required=True, help="output directory")
        _add_param_flags(p)
        p.add_argument("--t-end", type=float, default=None)
        p.add_argument("--dt", type=float, default=None)
        p.add_argument("--stride", type=int, default=None, help="CSV row stride")
        if name == "ode":
            p.add_argument("--b0", type=float, default=None)
            p.add_argument("--c0", type=float, default=None)
        if name in ("modes", "pde", "fcl", "sweep"):
            _add_init_flags(p)
        if name == "modes":
            p.add_argument("--k-max", type=int, default=None)
            p.add_argument("--snapshots", type=str, default=None,
                           help="comma-separated snapshot times")
        if name in ("pde", "sweep"):
            p.add_argument("--n-v", type=int, default=None)
            p.add_argument("--n-g", type=int, default=None)
            p.add_argument("--g-lo", type=float, default=None)
            p.add_argument("--g-hi", type=float, default=None)
        if name == "pde":
            p.add_argument("--snapshots", type=str, default=None)
        if name == "fcl":
            p.add_argument("--dtau", type=float, default=None)
        if name == "sweep":
            p.add_argument("--eps-list", type=str, default=None,
                           help="comma-separated epsilon values")

    pv = sub.add_parser("verify", help="run the invariant suites")
    pv.add_argument("--level", choices=("fast", "full"), default="fast")
    pv.add_argument("--out", type=str, required=True)

    pp = sub.add_parser("preset", help="figure replica runs")
    pp.add_argument("name", choices=sorted(presets.PRESETS))
    pp.add_argument("--out", type=str, required=True)

    return ap


def _merge_config(args: argparse.Namespace) -> dict:
    cfg: dict = {"params": {}, "init": {}, "numerics": {}}
    if getattr(args, "config", None):
        with open(args.config, encoding="utf-8") as fh:
            loaded = json.load(fh)
        for key in ("params", "init", "numerics"):
            section = loaded.get(key)
            if section:
                cfg[key].update(section)
    flag_map = {
        "g0": ("params", "g0"), "g1": ("params", "g1"),
        "a0": ("params", "a0"), "a1": ("params", "a1"),
        "vf": ("params", "v_f"), "eps": ("params", "epsilon"),
        "init_kind": ("init", "preset_kind"), "init_mean": ("init", "mean"),
        "init_var": ("init", "variance"), "init_amp": ("init", "amplitude"),
        "t_end": ("numerics", "t_end"), "dt": ("numerics", "dt"),
        "k_max": ("numerics", "k_max"), "n_v": ("numerics", "n_v"),
        "n_g": ("numerics", "n_g"), "g_lo": ("numerics", "g_lo"),
        "g_hi": ("numerics", "g_hi"), "dtau": ("numerics", "dtau"),
        "stride": ("numerics", "stride"), "b0": ("numerics", "b0"),
        "c0": ("numerics", "c0"),
    }
    for flag, (section, key) in flag_map.items():
        val = getattr(args, flag, None)
        if val is not None:
            cfg[section][key] = val
    if getattr(args, "snapshots", None):
        cfg["numerics"]["snapshot_times"] = [float(x) for x in args.snapshots.split(",")]
    if getattr(args, "eps_list", None):
        cfg["numerics"]["eps_list"] = [float(x) for x in args.eps_list.split(",")]
    return cfg


def _params_from(cfg: dict, default_eps: float = 1.0) -> ModelParams:
    p = dict(cfg.get("params", {}))
    missing = {"g0", "g1", "a0", "a1"} - set(p)
    if missing:
        raise ConfigError(f"missing model parameters: {sorted(missing)}")
    p.setdefault("v_f", 1.0)
    p.setdefault("epsilon", default_eps)
    return ModelParams.from_json_dict(p)


def _init_from(cfg: dict, v_f: float) -> InitialData:
    section = dict(cfg.get("init", {}))
    if "kind" in section:               # full InitialData JSON payload
        return InitialData.from_json_dict(section)
    kind = section.get("preset_kind", "cosine")
    mean = float(section.get("mean", 10.0))
    variance = float(section.get("variance", 2.0))
    amplitude = float(section.get("amplitude", -0.2))
    if kind == "gaussian":
        return gaussian_v_homogeneous(mean, variance, v_f=v_f)
    return cosine_perturbed(mean, variance, v_f=v_f,
                            amplitude=abs(amplitude), phase_shifted=amplitude < 0)


def _manifest_skeleton(command: str, cfg: dict) -> dict:
    return {
        "command": command,
        "config": cfg,
        "code_version": __version__,
        "status": "failed",
        "error": None,
        "error_budgets": {},
        "outcome": {},
        "wall_time_s": 0.0,
    }


def _finish(out_dir: str, manifest: dict, t0: float, status: str, error: str | None):
    manifest["status"] = status
    manifest["error"] = error
    manifest["wall_time_s"] = round(time.perf_counter() - t0, 3)
    csvio.write_json_atomic(os.path.join(out_dir, "manifest.json"), manifest)


def _cmd_ode(cfg: dict, out_dir: str, manifest: dict) -> None:
    params = _params_from(cfg)
    num = cfg["numerics"]
    traj = moment_ode.integrate(
        GaussianState(float(num.get("b0", 0.0)), float(num.get("c0", 1.0))),
        params, t_end=float(num.get("t_end", 50.0)), dt=float(num.get("dt", 0.01)))
    stride = int(num.get("stride", 1))
    csvio.write_ode_trajectory(os.path.join(out_dir, "ode_trajectory.csv"), traj, stride)
    cls = moment_ode.classify(params)
    manifest["outcome"] = {
        "classification": cls.kind,
        "final_b": traj.b[-1], "final_c": traj.c[-1], "final_N": traj.firing[-1],
        "diverged_in_window": traj.diverged,
    }
    if cls.steady is not None:
        manifest["outcome"]["steady_state"] = {
            "b_star": cls.steady.b_star, "c_star": cls.steady.c_star,
            "trace": cls.steady.trace, "det": cls.steady.det,
            "stable": cls.steady.stable,
        }
    manifest["error_budgets"] = {"integrator_dt": float(num.get("dt", 0.01))}


def _cmd_modes(cfg: dict, out_dir: str, manifest: dict) -> None:
    params = _params_from(cfg)
    if params.epsilon <= 0.0:
        raise ConfigError("modes solver needs epsilon > 0")
    init = _init_from(cfg, params.v_f)
    num = cfg["numerics"]
    t_end = float(num.get("t_end", 5.0))
    dt = float(num.get("dt", max(params.epsilon / 500.0, 1e-5)))
    snaps = tuple(num.get("snapshot_times", ()))
    res = modes.run(init, params, t_end=t_end, dt=dt,
                    k_max=int(num.get("k_max", 16)), snapshot_times=snaps)
    stride = int(num.get("stride", max(1, len(res.series) // 4000)))
    csvio.write_firing_series(os.path.join(out_dir, "firing_series.csv"),
                              res.series, stride)
    if res.snapshots:
        csvio.write_mode_snapshots(os.path.join(out_dir, "mode_snapshots.csv"),
                                   res.snapshots)
    st = res.series.last()
    manifest["outcome"] = {"final_N": st.n, "final_B": st.B, "final_C": st.C,
                           "t_end": st.t}
    manifest["error_budgets"] = {k: v for k, v in res.audit.items()
                                 if k != "snapshot_mass"}
    manifest["error_budgets"]["snapshot_mass_worst"] = (
        max((abs(m - 1.0) for m in res.audit["snapshot_mass"]), default=0.0))


def _cmd_pde(cfg: dict, out_dir: str, manifest: dict) -> None:
    params = _params_from(cfg)
    init = _init_from(cfg, params.v_f)
    num = cfg["numerics"]
    res = pde.run(
        init, params, t_end=float(num.get("t_end", 2.0)),
        dt=num.get("dt"), n_v=int(num.get("n_v", 256)), n_g=int(num.get("n_g", 256)),
        g_lo=num.get("g_lo"), g_hi=num.get("g_hi"),
        snapshot_times=tuple(num.get("snapshot_times", ())))
    stride = int(num.get("stride", max(1, len(res.series) // 4000)))
    csvio.write_firing_series(os.path.join(out_dir, "firing_series.csv"),
                              res.series, stride)
    if res.snapshots:
        csvio.write_pde_snapshots(os.path.join(out_dir, "pde_snapshots.csv"),
                                  res.snapshots)
    manifest["outcome"] = {"final_N": res.series.last().n,
                           "final_mass": res.final_field.mass()}
    manifest["error_budgets"] = dict(res.diagnostics)


def _cmd_fcl(cfg: dict, out_dir: str, manifest: dict) -> None:
    params = _params_from(cfg, default_eps=0.0)
    init = _init_from(cfg, params.v_f)
    num = cfg["numerics"]
    profile = fast_limit.FclState.from_initial_data(init)
    res = fast_limit.evolve(profile, params, t_end=float(num.get("t_end", 2.0)),
                            dtau=num.get("dtau"))
    stride = int(num.get("stride", max(1, len(res.times) // 8000)))
    csvio.write_fcl_trajectory(os.path.join(out_dir, "fcl_trace.csv"), res, stride)
    csvio.write_json_atomic(os.path.join(out_dir, "fcl_outcome.json"),
                            res.outcome.to_json_dict())
    manifest["outcome"] = res.outcome.to_json_dict()
    manifest["error_budgets"] = {
        "dtau": float(num.get("dtau") or profile.v_f / fast_limit.DEFAULT_NODES),
        "profile_mass_error": abs(float(np.trapezoid(profile.values, profile.v_nodes)) - 1.0),
    }


def _cmd_sweep(cfg: dict, out_dir: str, manifest: dict) -> None:
    params = _params_from(cfg)
    init = _init_from(cfg, params.v_f)
    num = cfg["numerics"]
    eps_list = [float(e) for e in num.get("eps_list", (0.5, 0.1))]
    results = pde.run_eps_sweep(
        init, params, eps_list, t_end=float(num.get("t_end", 2.0)),
        dt=num.get("dt"), n_v=int(num.get("n_v", 256)), n_g=int(num.get("n_g", 256)),
        g_lo=num.get("g_lo"), g_hi=num.get("g_hi"))
    budgets = {}
    outcome = {}
    for eps, (series, t_out, n_out, diagnostics) in results.items():
        tag = f"{eps:g}"
        stride = max(1, len(series) // 4000)
        csvio.write_firing_series(
            os.path.join(out_dir, f"series_eps_{tag}.csv"), series, stride)
        csvio.write_resampled_series(
            os.path.join(out_dir, f"series_eps_{tag}_common.csv"), t_out, n_out)
        budgets[tag] = diagnostics
        outcome[tag] = {"final_N": series.last().n}
    manifest["error_budgets"] = budgets
    manifest["outcome"] = outcome


def _cmd_preset(name: str, out_dir: str, manifest: dict) -> None:
    spec, eps_runs, fcl_res = presets.run_preset(name)
    manifest["config"] = {
        "preset": name, "params": spec["params"],
        "eps_list": spec["eps_list"], "t_end": spec["t_end"],
        "init": presets.preset_init(spec["params"]["v_f"]).to_json_dict(),
        "v_f_note": "threshold voltage fixed to 1 for figure replication",
    }
    budgets = {}
    for eps, res in eps_runs.items():
        tag = f"{eps:g}"
        stride = max(1, len(res.series) // 4000)
        csvio.write_firing_series(
            os.path.join(out_dir, f"series_eps_{tag}.csv"), res.series, stride)
        budgets[tag] = {k: v for k, v in res.audit.items() if k != "snapshot_mass"}
    csvio.write_fcl_trajectory(os.path.join(out_dir, "fcl_trace.csv"), fcl_res,
                               max(1, len(fcl_res.times) // 8000))
    csvio.write_json_atomic(os.path.join(out_dir, "fcl_outcome.json"),
                            fcl_res.outcome.to_json_dict())
    manifest["error_budgets"] = budgets
    manifest["outcome"] = {"fcl": fcl_res.outcome.to_json_dict()}


def _cmd_verify(level: str, out_dir: str, manifest: dict) -> int:
    results = verify.run_verify(level)
    report = verify.report_dict(level, results)
    csvio.write_json_atomic(os.path.join(out_dir, "verify_report.json"), report)
    for r in results:
        print(("PASS" if r.passed else "FAIL"), r.name, "-", r.detail)
    manifest["outcome"] = {"all_passed": report["all_passed"],
                           "n_checks": len(results),
                           "n_failed": sum(1 for r in results if not r.passed)}
    manifest["error_budgets"] = {"level": level}
    return EXIT_OK if report["all_passed"] else EXIT_VERIFY


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    out_dir = args.out
    try:
        os.makedirs(out_dir, exist_ok=True)
    except OSError as exc:
        print(f"cannot create output directory: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    t0 = time.perf_counter()
    cfg: dict = {}
    manifest = _manifest_skeleton(args.command, cfg)
    try:
        if args.command == "verify":
            manifest["config"] = {"level": args.level}
            code = _cmd_verify(args.level, out_dir, manifest)
            _finish(out_dir, manifest, t0, "ok", None)
            return code
        if args.command == "preset":
            _cmd_preset(args.name, out_dir, manifest)
            _finish(out_dir, manifest, t0, "ok", None)
            return EXIT_OK
        cfg = _merge_config(args)
        manifest["config"] = cfg
        handler = {"ode": _cmd_ode, "modes": _cmd_modes, "pde": _cmd_pde,
                   "fcl": _cmd_fcl, "sweep": _cmd_sweep}[args.command]
        handler(cfg, out_dir, manifest)
    except (ConfigError, DomainError, FileNotFoundError, KeyError,
            json.JSONDecodeError) as exc:
        _finish(out_dir, manifest, t0, "failed", f"config error: {exc}")
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except Exception as exc:
        _finish(out_dir, manifest, t0, "failed", f"solver failure: {exc}")
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    _finish(out_dir, manifest, t0, "ok", None)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
