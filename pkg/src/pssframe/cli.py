"""Configuration-driven command line.

Commands: verify, solve-frame, hierarchy, conserve, converge.  Every run
reads one INI config (see `config`), writes its outputs plus a manifest
into the output directory, and exits 0 on success, 1 when a gate fails,
2 on configuration problems.  Runs are deterministic: the same config and
flags produce byte-identical files.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys

import numpy as np

from .config import RunConfig, parse_config
from .conservation import analyze, hierarchy_report, write_csv, write_q_svg
from .errors import ConfigError, PssframeError, StructureGateError
from .fieldio import write_field
from .frames import load_frame_data, structure_residuals
from .grid import GridChart
from .hierarchy import solve_hierarchy
from .models import (
    ch_evolve,
    ch_forms,
    ch_integral_drift,
    ch_pde_residual,
    ch_series_table,
    igsge_explicit_solution,
    igsge_forms,
    igsge_residual,
    sg_forms,
    sg_pde_residual,
    sg_solution,
)
from .rotation_solver import solve_L_nd, solve_phi_2d, special_coordinates_check


def _scaled_chart(cfg: RunConfig, scale):
    counts = tuple((c - 1) * scale + 1 for c in cfg.counts)
    spacing = tuple(s / scale for s in cfg.spacing)
    return GridChart(
        origin=cfg.origin, spacing=spacing, counts=counts, axis_names=cfg.axis_names
    )


def _build_model(cfg: RunConfig, scale):
    """Instantiate the configured model at a grid scale.

    Returns (frame_data, model_lines, state) where model_lines are
    human-readable residual lines for the verify report and state is the
    model object (None for external frame files).
    """
    kind = cfg.model_kind
    if kind == "camassa_holm":
        def profile(x):
            return cfg.u0_offset + cfg.u0_amplitude * np.cos(
                2.0 * np.pi * x / cfg.period
            )

        state = ch_evolve(
            profile,
            cfg.m,
            cfg.period,
            cfg.t_final,
            nx=cfg.nx * scale,
            nt=cfg.nt * scale,
            cfl=cfg.cfl,
        )
        fd = ch_forms(state, 0.0)
        lines = [
            "model: camassa_holm pde_residual=%.3e integral_drift=%.3e"
            % (ch_pde_residual(state), ch_integral_drift(state))
        ]
        return fd, lines, state
    if kind == "sine_gordon":
        chart = _scaled_chart(cfg, scale)
        sol = sg_solution(chart, cfg.kink, cfg.velocity)
        fd = sg_forms(sol)
        lines = [
            "model: sine_gordon pde_residual=%.3e"
            % sg_pde_residual(chart, sol.u.values)
        ]
        return fd, lines, sol
    if kind == "igsge":
        chart = _scaled_chart(cfg, scale)
        state = igsge_explicit_solution(chart, cfg.c)
        fd = igsge_forms(state)
        res = igsge_residual(state)
        lines = [
            "model: igsge unit=%.3e gradient=%.3e coupling=%.3e mixed=%.3e"
            % (res.unit, res.gradient, res.coupling, res.mixed)
        ]
        return fd, lines, state
    if kind == "external":
        if scale != 1:
            raise ConfigError("--grid-scale is not applicable to external fields")
        fd = load_frame_data(cfg.field_file)
        return fd, ["model: external file=%s" % cfg.field_file], None
    raise ConfigError("unsupported model kind %r" % kind)


def _structure_lines(fd, cfg):
    res1, res2 = structure_residuals(fd, curvature=-1.0)
    h_max = max(fd.chart.spacing)
    threshold = cfg.gate_factor * h_max**2 * max(1.0, fd.max_abs())
    ok = res1 <= threshold and res2 <= threshold
    line = "structure: res1=%.3e res2=%.3e threshold=%.3e %s" % (
        res1,
        res2,
        threshold,
        "pass" if ok else "FAIL",
    )
    return (res1, res2), threshold, ok, line


def _solve(fd, cfg):
    if fd.dim == 2:
        return solve_phi_2d(
            fd, cfg.phi0, cfg.base, gate_factor=cfg.gate_factor
        )
    return solve_L_nd(fd, cfg.l0, cfg.base, gate_factor=cfg.gate_factor)


def _write_manifest(out_dir, command, cfg_path, scale, cfg, results):
    with open(cfg_path, "rb") as fh:
        digest = hashlib.sha256(fh.read()).hexdigest()
    manifest = {
        "command": command,
        "config_sha256": digest,
        "grid_scale": scale,
        "tolerances": {
            "gate_factor": cfg.gate_factor,
            "orth_tol": cfg.orth_tol,
            "det_rtol": cfg.det_rtol,
            "drift_tol": cfg.drift_tol,
            "order_floor": cfg.order_floor,
        },
        "results": results,
    }
    path = os.path.join(out_dir, "manifest.json")
    with open(path, "w") as fh:
        json.dump(manifest, fh, sort_keys=True, indent=2)
        fh.write("\n")


def _write_report_fields(out_dir, report):
    chart = report.theta1.chart
    write_field(
        os.path.join(out_dir, "theta1.pssfield"),
        chart,
        [c.values for c in report.theta1.coeffs],
    )
    n = chart.dim
    rot = report.rotation.matrix
    write_field(
        os.path.join(out_dir, "rotation.pssfield"),
        chart,
        [rot[..., i, j] for i in range(n) for j in range(n)],
    )
    if report.rotation.angle is not None:
        write_field(
            os.path.join(out_dir, "phi.pssfield"),
            chart,
            [report.rotation.angle.values],
        )


def cmd_verify(cfg, cfg_path, out_dir, scale):
    fd, lines, _ = _build_model(cfg, scale)
    (res1, res2), threshold, ok, line = _structure_lines(fd, cfg)
    for text in lines:
        print(text)
    print(line)
    _write_manifest(
        out_dir,
        "verify",
        cfg_path,
        scale,
        cfg,
        {"res1": res1, "res2": res2, "threshold": threshold, "pass": ok},
    )
    return 0 if ok else 1


def cmd_solve_frame(cfg, cfg_path, out_dir, scale):
    fd, _, _ = _build_model(cfg, scale)
    report = _solve(fd, cfg)
    _write_report_fields(out_dir, report)
    print(report.summary())
    results = {
        "compat_residual": report.compat_residual,
        "closed_residual": report.closed_residual,
        "orth_residual": report.orth_residual,
        "res1": report.structure[0],
        "res2": report.structure[1],
    }
    if cfg.coordinates_check:
        constants = cfg.coordinate_constants or None
        check = special_coordinates_check(
            fd, report, constants, cfg.base, cfg.det_rtol
        )
        write_field(
            os.path.join(out_dir, "potential.pssfield"),
            fd.chart,
            [check.potential.values],
        )
        print(
            "coords: path=%.3e bracket=%.3e valid=%.3f"
            % (check.path_residual, check.max_bracket(), check.valid_fraction)
        )
        results["path_residual"] = check.path_residual
        results["max_bracket"] = check.max_bracket()
        results["valid_fraction"] = check.valid_fraction
    _write_manifest(out_dir, "solve-frame", cfg_path, scale, cfg, results)
    return 0


def _run_hierarchy(cfg, scale):
    if cfg.model_kind != "camassa_holm":
        raise ConfigError(
            "the expansion commands need the camassa_holm model (parameter family)"
        )
    def profile(x):
        return cfg.u0_offset + cfg.u0_amplitude * np.cos(2.0 * np.pi * x / cfg.period)

    state = ch_evolve(
        profile,
        cfg.m,
        cfg.period,
        cfg.t_final,
        nx=cfg.nx * scale,
        nt=cfg.nt * scale,
        cfl=cfg.cfl,
    )
    table = ch_series_table(state, cfg.order)
    start = dict(enumerate(cfg.start_values)) if cfg.start_values else None
    result = solve_hierarchy(
        state.chart,
        table,
        cfg.order,
        base=cfg.base,
        start_values=start,
        periodic_axis=cfg.periodic_axis,
        gate_factor=cfg.gate_factor,
    )
    return state, result


def cmd_hierarchy(cfg, cfg_path, out_dir, scale):
    state, result = _run_hierarchy(cfg, scale)
    chart = state.chart
    per_order = {}
    for item in result.orders:
        write_field(
            os.path.join(out_dir, "phi_%d.pssfield" % item.order),
            chart,
            [item.phi.values],
        )
        write_field(
            os.path.join(out_dir, "theta_%d.pssfield" % item.order),
            chart,
            [c.values for c in item.form.coeffs],
        )
        per_order[str(item.order)] = {
            "compat_residual": item.compat_residual,
            "closed_residual": item.closed_residual,
            "start_value": item.start_value,
        }
    for text in result.summary_lines():
        print(text)
    _write_manifest(out_dir, "hierarchy", cfg_path, scale, cfg, {"orders": per_order})
    return 0


def cmd_conserve(cfg, cfg_path, out_dir, scale):
    time_axis = cfg.resolved_time_axis()
    results = {}
    if cfg.model_kind == "camassa_holm":
        state, hier = _run_hierarchy(cfg, scale)
        forms = [item.form for item in hier.orders]
        orders = [item.order for item in hier.orders]
        reports = hierarchy_report(forms, time_axis)
        drift_u = ch_integral_drift(state)
        print("model: camassa_holm integral_drift=%.3e" % drift_u)
        results["integral_drift"] = drift_u
    else:
        fd, _, _ = _build_model(cfg, scale)
        report = _solve(fd, cfg)
        print(report.summary())
        reports = [analyze(report.theta1, time_axis)]
        orders = [0]

    worst_rel = 0.0
    per_order = {}
    for order, rep in zip(orders, reports):
        print("order %d %s rel_drift=%.3e" % (order, rep.summary(), rep.max_relative_drift()))
        worst_rel = max(worst_rel, rep.max_relative_drift())
        per_order[str(order)] = {
            "flux_residual": rep.max_flux_residual(),
            "drift": rep.max_drift(),
            "relative_drift": rep.max_relative_drift(),
        }
    write_csv(os.path.join(out_dir, "conservation.csv"), reports, orders)
    if cfg.svg:
        write_q_svg(os.path.join(out_dir, "q.svg"), reports, orders)

    results["orders"] = per_order
    ok = cfg.drift_tol is None or worst_rel <= cfg.drift_tol
    results["pass"] = ok
    _write_manifest(out_dir, "conserve", cfg_path, scale, cfg, results)
    return 0 if ok else 1


def _fit_order(h_values, errors):
    """Least-squares slope of log(error) against log(h)."""
    h = np.asarray(h_values, dtype=float)
    e = np.maximum(np.asarray(errors, dtype=float), 1e-300)
    slope = np.polyfit(np.log(h), np.log(e), 1)[0]
    return float(slope)


def cmd_converge(cfg, cfg_path, out_dir, scale):
    scales = sorted(set(int(s) * scale for s in cfg.scales))
    rows = []
    for k in scales:
        fd, _, _ = _build_model(cfg, k)
        report = _solve(fd, cfg)
        h_max = max(fd.chart.spacing)
        rows.append(
            {
                "scale": k,
                "h_max": h_max,
                "res1": report.structure[0],
                "res2": report.structure[1],
                "compat": report.compat_residual,
                "closed": report.closed_residual,
                "orth": report.orth_residual,
            }
        )
        print(
            "scale %d: h=%.6g closed=%.3e compat=%.3e res1=%.3e res2=%.3e orth=%.3e"
            % (k, h_max, rows[-1]["closed"], rows[-1]["compat"], rows[-1]["res1"], rows[-1]["res2"], rows[-1]["orth"])
        )

    h_values = [row["h_max"] for row in rows]
    closed_order = _fit_order(h_values, [row["closed"] for row in rows])
    pair_orders = [
        float(np.log(rows[i]["closed"] / rows[i + 1]["closed"]) / np.log(h_values[i] / h_values[i + 1]))
        if rows[i + 1]["closed"] > 0
        else float("inf")
        for i in range(len(rows) - 1)
    ]
    print(
        "orders: closed=%.3f pairs=%s floor=%.2f"
        % (closed_order, ",".join("%.3f" % o for o in pair_orders), cfg.order_floor)
    )

    csv_path = os.path.join(out_dir, "converge.csv")
    with open(csv_path, "w", newline="") as fh:
        fh.write("scale,h_max,res1,res2,compat,closed,orth\n")
        for row in rows:
            fh.write(
                "%d,%s\n"
                % (
                    row["scale"],
                    ",".join(
                        "%.17g" % row[key]
                        for key in ("h_max", "res1", "res2", "compat", "closed", "orth")
                    ),
                )
            )

    ok = closed_order >= cfg.order_floor
    _write_manifest(
        out_dir,
        "converge",
        cfg_path,
        scale,
        cfg,
        {
            "rows": rows,
            "closed_order": closed_order,
            "pair_orders": pair_orders,
            "pass": ok,
        },
    )
    return 0 if ok else 1


_COMMANDS = {
    "verify": cmd_verify,
    "solve-frame": cmd_solve_frame,
    "hierarchy": cmd_hierarchy,
    "conserve": cmd_conserve,
    "converge": cmd_converge,
}


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="pssframe",
        description="Frame rotations and conservation laws on constant-curvature charts.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in _COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="INI run configuration")
        p.add_argument("--out", default=None, help="output directory (default from config)")
        p.add_argument(
            "--grid-scale",
            type=int,
            default=1,
            help="refine every chart axis by this integer factor",
        )
    args = parser.parse_args(argv)

    try:
        cfg = parse_config(args.config)
    except ConfigError as exc:
        print("config error: %s" % exc, file=sys.stderr)
        return 2
    if args.grid_scale < 1:
        print("config error: --grid-scale must be >= 1", file=sys.stderr)
        return 2

    out_dir = args.out or cfg.out_dir
    os.makedirs(out_dir, exist_ok=True)

    try:
        return _COMMANDS[args.command](cfg, args.config, out_dir, args.grid_scale)
    except ConfigError as exc:
        print("config error: %s" % exc, file=sys.stderr)
        return 2
    except StructureGateError as exc:
        print("gate failure: %s" % exc, file=sys.stderr)
        return 1
    except PssframeError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 1


def entry():
    raise SystemExit(main())
