"""Deterministic CSV and JSON emission shared by the CLI and the solvers.

CSV files are RFC-4180 (CRLF line endings), '.' decimal separator, numbers in
scientific notation with 17 significant digits, so repeated runs of the same
configuration are byte-identical.
"""

from __future__ import annotations

import csv
import json
import os
import tempfile

import numpy as np


def fmt(x: float) -> str:
    return f"{float(x):.16e}"


def _write_rows(path, header, rows):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\r\n")
        writer.writerow(header)
        writer.writerows(rows)


def write_firing_series(path, series, stride: int = 1) -> None:
    """Columns t, N, B, C, D on the series grid (optionally strided)."""
    eps = series.params.epsilon
    rows = []
    for i in range(0, len(series), stride):
        st = series.state(i)
        rows.append((fmt(st.t), fmt(st.n), fmt(st.B), fmt(st.C),
                     fmt(st.decay_exponent(eps))))
    _write_rows(path, ("t", "N", "B", "C", "D"), rows)


def write_resampled_series(path, t_out, n_out) -> None:
    """Columns t, N for a series interpolated to a common output grid."""
    rows = [(fmt(t), fmt(n)) for t, n in zip(t_out, n_out)]
    _write_rows(path, ("t", "N"), rows)


def write_ode_trajectory(path, traj, stride: int = 1) -> None:
    """Columns t, b, c, N."""
    rows = [(fmt(traj.times[i]), fmt(traj.b[i]), fmt(traj.c[i]), fmt(traj.firing[i]))
            for i in range(0, len(traj.times), stride)]
    _write_rows(path, ("t", "b", "c", "N"), rows)


def write_fcl_trajectory(path, result, stride: int = 1) -> None:
    """Columns t, tau, N, rho_at_VF; non-finite firing samples are omitted."""
    rows = []
    for i in range(0, len(result.times), stride):
        if not np.isfinite(result.firing[i]):
            continue
        rows.append((fmt(result.times[i]), fmt(result.taus[i]),
                     fmt(result.firing[i]), fmt(result.rho_at_vf[i])))
    _write_rows(path, ("t", "tau", "N", "rho_at_VF"), rows)


def write_mode_snapshots(path, snapshots) -> None:
    """Rows (t, k, g, Re p_k, Im p_k) for every stored mode incl. conjugates."""
    rows = []
    for snap in snapshots:
        ks = sorted(set(snap.k_values) | {-k for k in snap.k_values})
        for k in ks:
            prof = snap.mode(k)
            for g, val in zip(snap.g_grid, prof):
                rows.append((fmt(snap.t), str(k), fmt(g), fmt(val.real), fmt(val.imag)))
    _write_rows(path, ("t", "k", "g", "re_p", "im_p"), rows)


def write_pde_snapshots(path, snapshots) -> None:
    """Rows (t, v, g, p)."""
    rows = []
    for t_snap, field in snapshots:
        for i, v in enumerate(field.v_centers):
            for j, g in enumerate(field.g_centers):
                rows.append((fmt(field.t), fmt(v), fmt(g), fmt(field.p[i, j])))
    _write_rows(path, ("t", "v", "g", "p"), rows)


def write_json_atomic(path, payload: dict) -> None:
    """Serialize with sorted keys and replace the target atomically."""
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            json.dump(payload, fh, indent=2, sort_keys=True)
            fh.write("\n")
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
