"""Command line: config parsing, subcommands, manifests, determinism."""

import hashlib
import json

import pytest

from conftest import flat_frame
from pssframe.cli import main
from pssframe.config import parse_config
from pssframe.frames import save_frame_data

SG_CONFIG = """
[model]
kind = sine_gordon

[chart]
origin = -4, -4
extent = 8, 8
counts = 33, 33
"""

CH_CONFIG = """
[model]
kind = camassa_holm
m = 0.5
period = 6
t_final = 0.5
nx = 64
nt = 8

[hierarchy]
order = 1
periodic_axis = 1
"""


def write_config(tmp_path, text, name="run.ini"):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


def read_manifest(out_dir):
    with open(out_dir / "manifest.json") as fh:
        return json.load(fh)


def test_verify_reports_structure_and_manifest(tmp_path, capsys):
    cfg = write_config(tmp_path, SG_CONFIG)
    out = tmp_path / "out"
    assert main(["verify", "--config", cfg, "--out", str(out)]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0].startswith("model: sine_gordon pde_residual=")
    assert lines[1].startswith("structure: res1=")
    assert lines[1].endswith("pass")
    manifest = read_manifest(out)
    assert manifest["command"] == "verify"
    assert manifest["grid_scale"] == 1
    assert manifest["results"]["pass"] is True
    digest = hashlib.sha256(open(cfg, "rb").read()).hexdigest()
    assert manifest["config_sha256"] == digest
    assert manifest["tolerances"]["gate_factor"] == 10.0


def test_verify_fails_on_frame_with_wrong_curvature(tmp_path, capsys):
    field = tmp_path / "flat.pssfield"
    save_frame_data(field, flat_frame(17))
    cfg = write_config(
        tmp_path,
        "[model]\nkind = external\nfield_file = %s\n" % field,
    )
    out = tmp_path / "out"
    assert main(["verify", "--config", cfg, "--out", str(out)]) == 1
    assert capsys.readouterr().out.splitlines()[-1].endswith("FAIL")
    assert read_manifest(out)["results"]["pass"] is False


def test_solve_frame_writes_fields_and_summary(tmp_path, capsys):
    cfg = write_config(tmp_path, SG_CONFIG)
    out = tmp_path / "out"
    assert main(["solve-frame", "--config", cfg, "--out", str(out)]) == 0
    assert capsys.readouterr().out.startswith("solve: compat=")
    for name in ("theta1.pssfield", "rotation.pssfield", "phi.pssfield"):
        assert (out / name).exists()
    results = read_manifest(out)["results"]
    for key in ("compat_residual", "closed_residual", "orth_residual", "res1", "res2"):
        assert key in results
    assert results["orth_residual"] <= 1e-12


def test_solve_frame_gate_blocks_flat_frame(tmp_path, capsys):
    field = tmp_path / "flat.pssfield"
    save_frame_data(field, flat_frame(17))
    cfg = write_config(
        tmp_path,
        "[model]\nkind = external\nfield_file = %s\n" % field,
    )
    assert main(["solve-frame", "--config", cfg, "--out", str(tmp_path / "o")]) == 1
    assert capsys.readouterr().err.startswith("gate failure:")


def test_solve_frame_coordinates_check(tmp_path, capsys):
    cfg = write_config(
        tmp_path,
        """
[model]
kind = igsge
c = 1.0

[chart]
origin = 0.5, -1
spacing = 0.1, 0.1
counts = 26, 21

[solver]
coordinates_check = true
""",
    )
    out = tmp_path / "out"
    assert main(["solve-frame", "--config", cfg, "--out", str(out)]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[-1].startswith("coords: path=")
    assert (out / "potential.pssfield").exists()
    results = read_manifest(out)["results"]
    assert results["path_residual"] < 1e-8
    assert results["valid_fraction"] > 0.8  # interior nodes of a 26x21 chart


def test_hierarchy_writes_per_order_outputs(tmp_path, capsys):
    cfg = write_config(tmp_path, CH_CONFIG)
    out = tmp_path / "out"
    assert main(["hierarchy", "--config", cfg, "--out", str(out)]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0].startswith("order 0: compat=")
    assert lines[1].startswith("order 1: compat=")
    for order in (0, 1):
        assert (out / ("phi_%d.pssfield" % order)).exists()
        assert (out / ("theta_%d.pssfield" % order)).exists()
    manifest = read_manifest(out)
    assert set(manifest["results"]["orders"]) == {"0", "1"}


def test_hierarchy_rejects_non_family_models(tmp_path, capsys):
    cfg = write_config(tmp_path, SG_CONFIG)
    assert main(["hierarchy", "--config", cfg, "--out", str(tmp_path / "o")]) == 2
    assert capsys.readouterr().err.startswith("config error:")


def test_conserve_writes_csv_and_svg(tmp_path, capsys):
    cfg = write_config(tmp_path, CH_CONFIG + "\n[conservation]\nsvg = true\n")
    out = tmp_path / "out"
    assert main(["conserve", "--config", cfg, "--out", str(out)]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0].startswith("model: camassa_holm integral_drift=")
    assert lines[1].startswith("order 0 conserve:")
    assert "rel_drift=" in lines[1]
    header = (out / "conservation.csv").read_text().splitlines()[0]
    assert header == "order,axis,t,Q,drift,flux_residual"
    assert (out / "q.svg").exists()
    results = read_manifest(out)["results"]
    assert results["pass"] is True
    assert "relative_drift" in results["orders"]["0"]


def test_conserve_drift_gate(tmp_path):
    cfg = write_config(tmp_path, CH_CONFIG + "\n[conservation]\ndrift_tol = 1e-30\n")
    out = tmp_path / "out"
    assert main(["conserve", "--config", cfg, "--out", str(out)]) == 1
    assert read_manifest(out)["results"]["pass"] is False


def test_converge_orders_and_determinism(tmp_path, capsys):
    cfg = write_config(
        tmp_path,
        SG_CONFIG + "\n[convergence]\nscales = 1, 2\n",
    )
    out_a = tmp_path / "a"
    out_b = tmp_path / "b"
    assert main(["converge", "--config", cfg, "--out", str(out_a)]) == 0
    text = capsys.readouterr().out
    assert "scale 1: h=" in text
    assert "scale 2: h=" in text
    assert "orders: closed=" in text
    assert main(["converge", "--config", cfg, "--out", str(out_b)]) == 0
    assert (out_a / "converge.csv").read_bytes() == (out_b / "converge.csv").read_bytes()
    assert (out_a / "manifest.json").read_bytes() == (out_b / "manifest.json").read_bytes()
    manifest = read_manifest(out_a)
    assert manifest["results"]["closed_order"] >= 1.7
    assert manifest["results"]["pass"] is True


def test_grid_scale_refines_chart(tmp_path):
    cfg = write_config(tmp_path, SG_CONFIG)
    out1 = tmp_path / "s1"
    out2 = tmp_path / "s2"
    assert main(["verify", "--config", cfg, "--out", str(out1)]) == 0
    assert main(["verify", "--config", cfg, "--out", str(out2), "--grid-scale", "2"]) == 0
    r1 = read_manifest(out1)["results"]
    r2 = read_manifest(out2)["results"]
    assert read_manifest(out2)["grid_scale"] == 2
    assert r2["res2"] < 0.5 * r1["res2"]  # finer grid, smaller residual


def test_grid_scale_rejected_for_external_fields(tmp_path, capsys):
    field = tmp_path / "flat.pssfield"
    save_frame_data(field, flat_frame(9))
    cfg = write_config(
        tmp_path, "[model]\nkind = external\nfield_file = %s\n" % field
    )
    code = main(
        ["verify", "--config", cfg, "--out", str(tmp_path / "o"), "--grid-scale", "2"]
    )
    assert code == 2
    assert capsys.readouterr().err.startswith("config error:")


@pytest.mark.parametrize(
    "text,fragment",
    [
        ("[model]\nkind = heat\n", "not one of"),
        ("[model]\nkind = sine_gordon\nflux = 3\n", "unknown key"),
        ("[extra]\nx = 1\n", "unknown config section"),
        (
            "[model]\nkind = sine_gordon\n[chart]\norigin = -4, -4\n"
            "spacing = 0.25, 0.25\nextent = 8, 8\ncounts = 33, 33\n",
            "not both",
        ),
        ("[chart\norigin = 0, 0\n", "unreadable config"),
        (SG_CONFIG + SG_CONFIG, "unreadable config"),  # duplicate sections
        (CH_CONFIG + "\n[conservation]\ntime_axis = 0\n", "one-based"),
        (CH_CONFIG.replace("nx = 64", "nx = 15"), "even number"),
        (CH_CONFIG + "\n[convergence]\nscales = 1\n", "two entries"),
        (CH_CONFIG + "\n[tolerances]\ngate_factor = 0\n", "positive"),
        ("[model]\nkind = sine_gordon\n", "counts is required"),
        ("[model]\nkind = external\n", "field_file is required"),
        (
            "[model]\nkind = igsge\nc = 1.0\n[chart]\norigin = 0.5, 0\n"
            "spacing = 0.1, 0.1, 0.1\ncounts = 5, 5, 5\n",
            "lengths differ",
        ),
    ],
)
def test_config_errors_have_diagnostics(tmp_path, text, fragment):
    from pssframe.errors import ConfigError

    cfg = write_config(tmp_path, text)
    with pytest.raises(ConfigError, match=fragment):
        parse_config(cfg)


def test_cli_exit_code_2_on_config_problems(tmp_path, capsys):
    missing = str(tmp_path / "absent.ini")
    assert main(["verify", "--config", missing, "--out", str(tmp_path / "o")]) == 2
    assert capsys.readouterr().err.startswith("config error:")
    cfg = write_config(tmp_path, "[model]\nkind = heat\n")
    assert main(["verify", "--config", cfg, "--out", str(tmp_path / "o")]) == 2
    cfg_ok = write_config(tmp_path, SG_CONFIG, name="ok.ini")
    code = main(
        ["verify", "--config", cfg_ok, "--out", str(tmp_path / "o"), "--grid-scale", "0"]
    )
    assert code == 2


def test_defaults_round_trip_through_parser(tmp_path):
    cfg = parse_config(write_config(tmp_path, CH_CONFIG))
    assert cfg.model_kind == "camassa_holm"
    assert cfg.resolved_time_axis() == 1  # evolution time is the second axis
    assert cfg.order == 1
    assert cfg.periodic_axis == 0  # stored zero-based
    assert cfg.scales == (1, 2, 4)
    assert cfg.out_dir == "out"
    sg = parse_config(write_config(tmp_path, SG_CONFIG, name="sg.ini"))
    assert sg.resolved_time_axis() == 0
    assert sg.spacing == (0.25, 0.25)  # extent 8 over 32 intervals
