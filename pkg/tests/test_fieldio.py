"""pssfield v1 text round trips and header validation."""

import numpy as np
import pytest

from pssframe import (
    GridChart,
    ScalarField,
    read_field,
    read_scalar,
    write_field,
    write_scalar,
)


def test_scalar_round_trip_is_bit_exact(tmp_path, rng):
    chart = GridChart((-0.3, 1.0 / 3.0), (0.1, 0.25), (7, 5), ("x", "t"))
    f = ScalarField(chart, rng.standard_normal(chart.shape) * 1e3)
    path = tmp_path / "f.pssfield"
    write_scalar(path, f)
    g = read_scalar(path)
    assert g.chart.counts == chart.counts
    assert np.array_equal(g.values, f.values)
    assert g.chart.origin == pytest.approx(chart.origin, abs=0.0)
    assert g.chart.spacing == pytest.approx(chart.spacing, abs=0.0)


def test_multi_component_round_trip(tmp_path, rng):
    chart = GridChart((0.0, 0.0, 0.0), (0.5, 0.5, 0.5), (3, 4, 5))
    stack = rng.standard_normal((4,) + chart.shape)
    path = tmp_path / "v.pssfield"
    write_field(path, chart, stack)
    chart2, back = read_field(path)
    assert chart2.counts == (3, 4, 5)
    assert back.shape == (4, 3, 4, 5)
    assert np.array_equal(back, stack)


def test_write_accepts_mixed_component_types(tmp_path):
    chart = GridChart((0.0,), (1.0,), (6,))
    f = ScalarField.constant(chart, 2.5)
    write_field(tmp_path / "m.pssfield", chart, [f, np.arange(6.0)])
    _, back = read_field(tmp_path / "m.pssfield")
    assert np.array_equal(back[0], np.full(6, 2.5))
    assert np.array_equal(back[1], np.arange(6.0))


def test_write_rejects_shape_mismatch(tmp_path):
    chart = GridChart((0.0,), (1.0,), (6,))
    with pytest.raises(ValueError):
        write_field(tmp_path / "bad.pssfield", chart, [np.zeros(5)])


def test_read_rejects_wrong_magic(tmp_path):
    path = tmp_path / "junk.pssfield"
    path.write_text("nonsense v9; dim=1\n0.0\n")
    with pytest.raises(ValueError, match="not a pssfield"):
        read_field(path)


def test_read_rejects_malformed_header(tmp_path):
    path = tmp_path / "bad.pssfield"
    path.write_text("pssfield v1; dim=two; counts=3; origin=0; spacing=1; components=1\n")
    with pytest.raises(ValueError, match="malformed"):
        read_field(path)


def test_read_rejects_inconsistent_dimensions(tmp_path):
    path = tmp_path / "bad.pssfield"
    path.write_text(
        "pssfield v1; dim=2; counts=3; origin=0,0; spacing=1,1; components=1\n"
        + "0\n" * 3
    )
    with pytest.raises(ValueError, match="dimensions disagree"):
        read_field(path)


def test_read_rejects_truncated_body(tmp_path):
    path = tmp_path / "short.pssfield"
    path.write_text(
        "pssfield v1; dim=1; counts=4; origin=0; spacing=1; components=1\n0\n1\n"
    )
    with pytest.raises(ValueError, match="body"):
        read_field(path)


def test_read_scalar_requires_single_component(tmp_path):
    chart = GridChart((0.0,), (1.0,), (3,))
    write_field(tmp_path / "two.pssfield", chart, np.zeros((2, 3)))
    with pytest.raises(ValueError, match="single-component"):
        read_scalar(tmp_path / "two.pssfield")


def test_identical_fields_produce_identical_bytes(tmp_path):
    chart = GridChart((0.0, 0.0), (0.1, 0.2), (4, 4))
    f = ScalarField.from_function(chart, lambda x, t: np.sin(x + t))
    write_scalar(tmp_path / "a.pssfield", f)
    write_scalar(tmp_path / "b.pssfield", f)
    assert (tmp_path / "a.pssfield").read_bytes() == (tmp_path / "b.pssfield").read_bytes()
