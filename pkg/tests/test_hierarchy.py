"""Truncated parameter series and the order-by-order angle hierarchy."""

import numpy as np
import pytest

from pssframe import EtaSeries, solve_hierarchy, solve_phi_2d
from pssframe.errors import PssframeError
from pssframe.hierarchy import closed_form_series, expand_phi_system
from pssframe.models import ch_evolve, ch_forms, ch_series_table


def random_series(rng, order, shape=()):
    return EtaSeries(rng.standard_normal((order + 1,) + shape))


@pytest.mark.parametrize("shape", [(), (5,), (3, 4)])
def test_series_ring_laws(rng, shape):
    a = random_series(rng, 4, shape)
    b = random_series(rng, 4, shape)
    c = random_series(rng, 4, shape)
    comm = (a * b).coeffs - (b * a).coeffs
    assert np.max(np.abs(comm)) < 1e-14
    distrib = ((a + b) * c).coeffs - ((a * c).coeffs + (b * c).coeffs)
    assert np.max(np.abs(distrib)) < 1e-13
    assoc = ((a * b) * c).coeffs - (a * (b * c)).coeffs
    assert np.max(np.abs(assoc)) < 1e-13


def test_series_truncated_product_drops_high_powers():
    x = EtaSeries.from_terms({1: 1.0}, 2)  # eta itself, truncated at order 2
    sq = x * x
    cube = sq * x
    assert np.allclose(sq.coeffs, [0.0, 0.0, 1.0])
    assert np.allclose(cube.coeffs, [0.0, 0.0, 0.0])  # eta^3 is out of window


def test_series_shift_and_eval(rng):
    a = random_series(rng, 3)
    shifted = a.shifted(2)
    assert shifted.coefficient(0) == 0.0 and shifted.coefficient(1) == 0.0
    assert shifted.coefficient(2) == pytest.approx(a.coefficient(0))
    eta = 0.37
    manual = sum(a.coefficient(j) * eta**j for j in range(4))
    assert a.evaluate(eta) == pytest.approx(manual, rel=1e-14)


def test_series_pythagorean_identity(rng):
    phi = random_series(rng, 5, (7,))
    s, c = phi.sin_cos()
    total = (s * s + c * c).coeffs
    assert np.max(np.abs(total[0] - 1.0)) < 1e-14
    assert np.max(np.abs(total[1:])) < 1e-13


def test_series_sin_cos_match_pointwise_composition(rng):
    phi = random_series(rng, 4)
    s, _ = phi.sin_cos()
    errs = []
    for eta in (0.1, 0.05):
        truth = np.sin(phi.evaluate(eta))
        # evaluate() collapses the same truncation both ways, so compare the
        # series of sin against the sin of the full (untruncated) polynomial
        poly = sum(phi.coefficient(j) * eta**j for j in range(5))
        errs.append(abs(s.evaluate(eta) - np.sin(poly)))
    assert errs[0] < 1e-4
    assert errs[1] / errs[0] < 0.06  # O(eta^5) remainder: ~2^-5 per halving


def _small_ch_table(order=1):
    state = ch_evolve(
        lambda x: 0.2 + 0.1 * np.cos(2 * np.pi * x / 6.0),
        m=0.5,
        period=6.0,
        t_final=0.5,
        nx=64,
        nt=8,
    )
    return state, ch_series_table(state, order)


def test_expanded_order_zero_rhs_matches_direct_formula():
    # at order 0, the expanded x and t right-hand sides must coincide with
    # the scalar angle equation evaluated on the parameter-free coefficients
    state, table = _small_ch_table(0)
    phi = EtaSeries.from_terms({0: 0.3}, 0, state.chart.shape)
    phi.coeffs[0] = 0.3 + 0.01 * np.arange(phi.coeffs[0].size).reshape(state.chart.shape)
    rhs_x, rhs_t = expand_phi_system(table, phi)
    c, s = np.cos(phi.coeffs[0]), np.sin(phi.coeffs[0])
    f11, f12 = table[0][0].coefficient(0), table[0][1].coefficient(0)
    f21, f22 = table[1][0].coefficient(0), table[1][1].coefficient(0)
    f31, f32 = table[2][0].coefficient(0), table[2][1].coefficient(0)
    assert np.max(np.abs(rhs_x.coefficient(0) - (f31 + s * f11 + c * f21))) < 1e-13
    assert np.max(np.abs(rhs_t.coefficient(0) - (f32 + s * f12 + c * f22))) < 1e-13


def test_closed_form_series_order_zero_matches_direct_formula():
    state, table = _small_ch_table(0)
    phi = EtaSeries(0.2 * np.ones((1,) + state.chart.shape))
    fx, ft = closed_form_series(table, phi)
    c, s = np.cos(0.2), np.sin(0.2)
    want_x = c * table[0][0].coefficient(0) - s * table[1][0].coefficient(0)
    want_t = c * table[0][1].coefficient(0) - s * table[1][1].coefficient(0)
    assert np.max(np.abs(fx.coefficient(0) - want_x)) < 1e-13
    assert np.max(np.abs(ft.coefficient(0) - want_t)) < 1e-13


def test_hierarchy_order_zero_agrees_with_scalar_solve():
    state, table = _small_ch_table(1)
    result = solve_hierarchy(state.chart, table, 1)
    fd0 = ch_forms(state, 0.0)
    rep = solve_phi_2d(fd0)
    zero = result.orders[0]
    assert np.max(np.abs(zero.phi.values - rep.rotation.angle.values)) < 1e-12
    for a in range(2):
        diff = zero.form.coefficient(a).values - rep.theta1.coefficient(a).values
        assert np.max(np.abs(diff)) < 1e-12


def test_hierarchy_series_is_taylor_expansion_of_nonlinear_solve():
    # evaluating the truncated phi series at small eta must reproduce the
    # direct nonlinear solve of the eta-frozen coframe to O(eta^{K+1})
    state, table = _small_ch_table(2)
    table = ch_series_table(state, 2)
    result = solve_hierarchy(state.chart, table, 2)
    errs = []
    for eta in (0.1, 0.05):
        fd = ch_forms(state, eta)
        rep = solve_phi_2d(fd)
        series_phi = result.phi_series.evaluate(eta)
        errs.append(float(np.max(np.abs(series_phi - rep.rotation.angle.values))))
    assert errs[0] < 2e-2
    assert errs[1] / errs[0] < 0.25  # at least O(eta^3) shrinkage: 8x per halving
    assert errs[1] / errs[0] > 0.05  # and not accidentally exact


def test_hierarchy_start_values_are_respected():
    state, table = _small_ch_table(1)
    result = solve_hierarchy(state.chart, table, 1, start_values={0: 0.3, 1: -0.2})
    base = result.base_index
    assert result.orders[0].phi.values[base] == pytest.approx(0.3)
    assert result.orders[1].phi.values[base] == pytest.approx(-0.2)
    assert result.orders[0].start_value == pytest.approx(0.3)
    assert result.orders[1].start_value == pytest.approx(-0.2)


def test_hierarchy_periodic_mode_closes_the_angle_in_x():
    state, table = _small_ch_table(1)
    result = solve_hierarchy(state.chart, table, 1, periodic_axis=0)
    # base moves to the x = 0 column and the solved angle is x-periodic
    assert result.base_index[0] == 0
    phi0 = result.orders[0].phi.values
    gap = np.abs(phi0[-1, :] - phi0[0, :] - 2 * np.pi * np.round((phi0[-1, :] - phi0[0, :]) / (2 * np.pi)))
    assert np.max(gap) < 1e-6
    phi1 = result.orders[1].phi.values
    assert np.max(np.abs(phi1[-1, :] - phi1[0, :])) < 1e-6


def test_hierarchy_summary_lines_shape():
    state, table = _small_ch_table(1)
    result = solve_hierarchy(state.chart, table, 1)
    lines = result.summary_lines()
    assert len(lines) == 2
    assert lines[0].startswith("order 0: compat=")
    assert "start=" in lines[1]


def test_hierarchy_rejects_bad_arguments():
    state, table = _small_ch_table(1)
    with pytest.raises(ValueError):
        solve_hierarchy(state.chart, table, -1)
    with pytest.raises(ValueError):
        solve_hierarchy(state.chart, table, 1, periodic_axis=1)
    with pytest.raises(ValueError):
        solve_hierarchy(state.chart, ch_series_table(state, 0), 1)
