"""Discrete differential forms on grid charts.

One-forms store one coefficient field per axis, two-forms one per ordered
axis pair (k, l) with k < l, and connection fields a skew matrix of
one-forms kept exactly skew by storing only the upper triangle.  The
exterior derivative uses the chart's second-order stencils; `potential`
recovers a primitive of a closed one-form by staircase line integration
(composite trapezoid, axes in chart order) and reports the discrepancy
against the reversed axis order as a self-check.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grid import GridChart, ScalarField, interior_max_abs, partial_derivative


def _pairs(n):
    return [(i, j) for i in range(n) for j in range(i + 1, n)]


@dataclass
class OneFormField:
    """theta = sum_k coeffs[k] dx_k."""

    chart: GridChart
    coeffs: tuple

    def __post_init__(self):
        coeffs = tuple(self.coeffs)
        if len(coeffs) != self.chart.dim:
            raise ValueError("one-form needs one coefficient per axis")
        for c in coeffs:
            self.chart.require_same(c.chart)
        self.coeffs = coeffs

    @classmethod
    def from_arrays(cls, chart, arrays):
        return cls(chart, tuple(ScalarField(chart, a) for a in arrays))

    @classmethod
    def zeros(cls, chart):
        return cls(chart, tuple(ScalarField.zeros(chart) for _ in range(chart.dim)))

    def coefficient(self, axis):
        return self.coeffs[axis]

    def __add__(self, other):
        self.chart.require_same(other.chart)
        return OneFormField(
            self.chart, tuple(a + b for a, b in zip(self.coeffs, other.coeffs))
        )

    def __sub__(self, other):
        self.chart.require_same(other.chart)
        return OneFormField(
            self.chart, tuple(a - b for a, b in zip(self.coeffs, other.coeffs))
        )

    def __neg__(self):
        return OneFormField(self.chart, tuple(-a for a in self.coeffs))

    def scaled(self, factor):
        """Pointwise scaling by a scalar or ScalarField."""
        return OneFormField(self.chart, tuple(c * factor for c in self.coeffs))

    def max_abs(self):
        return max(c.max_abs() for c in self.coeffs)


@dataclass
class TwoFormField:
    """omega = sum_{k<l} coeffs[(k,l)] dx_k^dx_l."""

    chart: GridChart
    coeffs: dict

    def __post_init__(self):
        want = _pairs(self.chart.dim)
        if sorted(self.coeffs.keys()) != want:
            raise ValueError("two-form needs coefficients exactly for k<l pairs")
        for c in self.coeffs.values():
            self.chart.require_same(c.chart)

    @classmethod
    def zeros(cls, chart):
        return cls(
            chart,
            {p: ScalarField.zeros(chart) for p in _pairs(chart.dim)},
        )

    def coefficient(self, k, l):
        if k == l:
            return ScalarField.zeros(self.chart)
        if k < l:
            return self.coeffs[(k, l)]
        return -self.coeffs[(l, k)]

    def __add__(self, other):
        self.chart.require_same(other.chart)
        return TwoFormField(
            self.chart,
            {p: self.coeffs[p] + other.coeffs[p] for p in self.coeffs},
        )

    def __sub__(self, other):
        self.chart.require_same(other.chart)
        return TwoFormField(
            self.chart,
            {p: self.coeffs[p] - other.coeffs[p] for p in self.coeffs},
        )

    def max_abs(self):
        return max(c.max_abs() for c in self.coeffs.values())

    def interior_max_abs(self):
        return max(interior_max_abs(c.values) for c in self.coeffs.values())


@dataclass
class ConnectionField:
    """Skew matrix of one-forms; entry(j, i) == -entry(i, j) exactly.

    Only the upper triangle is stored, so the skew invariant holds by
    construction rather than up to round-off.
    """

    chart: GridChart
    upper: dict  # {(i, j): OneFormField} for i < j

    def __post_init__(self):
        n = self.chart.dim
        if sorted(self.upper.keys()) != _pairs(n):
            raise ValueError("connection needs entries exactly for i<j pairs")
        for w in self.upper.values():
            self.chart.require_same(w.chart)

    @classmethod
    def zeros(cls, chart):
        return cls(chart, {p: OneFormField.zeros(chart) for p in _pairs(chart.dim)})

    def entry(self, i, j):
        if i == j:
            return OneFormField.zeros(self.chart)
        if i < j:
            return self.upper[(i, j)]
        return -self.upper[(j, i)]

    def coefficient_matrix(self, axis):
        """Array W of shape (*counts, n, n) with W[..., i, j] = entry(i,j)_axis."""
        n = self.chart.dim
        out = np.zeros(self.chart.counts + (n, n))
        for (i, j), w in self.upper.items():
            vals = w.coeffs[axis].values
            out[..., i, j] = vals
            out[..., j, i] = -vals
        return out

    def max_abs(self):
        return max(w.max_abs() for w in self.upper.values())


def d_scalar(f: ScalarField) -> OneFormField:
    """Exterior derivative of a scalar field (its gradient one-form)."""
    chart = f.chart
    coeffs = [
        ScalarField(chart, partial_derivative(f.values, k, chart.spacing[k]))
        for k in range(chart.dim)
    ]
    return OneFormField(chart, tuple(coeffs))


def d_oneform(theta: OneFormField) -> TwoFormField:
    """Exterior derivative; coefficient of dx_k^dx_l is d_k theta_l - d_l theta_k."""
    chart = theta.chart
    out = {}
    for k, l in _pairs(chart.dim):
        dk = partial_derivative(theta.coeffs[l].values, k, chart.spacing[k])
        dl = partial_derivative(theta.coeffs[k].values, l, chart.spacing[l])
        out[(k, l)] = ScalarField(chart, dk - dl)
    return TwoFormField(chart, out)


def wedge(alpha: OneFormField, beta: OneFormField) -> TwoFormField:
    """Wedge product of two one-forms."""
    alpha.chart.require_same(beta.chart)
    chart = alpha.chart
    out = {}
    for k, l in _pairs(chart.dim):
        out[(k, l)] = ScalarField(
            chart,
            alpha.coeffs[k].values * beta.coeffs[l].values
            - alpha.coeffs[l].values * beta.coeffs[k].values,
        )
    return TwoFormField(chart, out)


def closedness_residual(theta: OneFormField) -> float:
    """Max-norm of d(theta) over interior nodes."""
    return d_oneform(theta).interior_max_abs()


def _cumulative_line_integral(values, axis, base_index, spacing):
    """Composite-trapezoid integral from the base node along one axis.

    Returns I with I[base] = 0 and I[j] the signed integral from the base
    node to node j along `axis`.
    """
    f = np.asarray(values, dtype=float)
    n = f.ndim

    def sl(part):
        idx = [slice(None)] * n
        idx[axis] = part
        return tuple(idx)

    seg = 0.5 * spacing * (f[sl(slice(None, -1))] + f[sl(slice(1, None))])
    out = np.zeros_like(f)
    np.cumsum(seg, axis=axis, out=out[sl(slice(1, None))])
    out -= out[sl(slice(base_index, base_index + 1))]
    return out


def potential(theta: OneFormField, base="center"):
    """Primitive G of a (numerically) closed one-form, G(base) = 0.

    Integrates along the staircase path that follows the chart axes in
    order, then repeats with the axes reversed; the max discrepancy between
    the two primitives is returned as `path_residual`.  Callers decide what
    residual is tolerable for their data.
    """
    chart = theta.chart
    base_idx = chart.base_index(base)

    def staircase(axis_order):
        g = np.zeros(chart.counts)
        fixed = {k: base_idx[k] for k in range(chart.dim)}
        for axis in axis_order:
            region = tuple(
                slice(None)
                if k not in fixed or k == axis
                else slice(fixed[k], fixed[k] + 1)
                for k in range(chart.dim)
            )
            block = theta.coeffs[axis].values[region]
            incr = _cumulative_line_integral(
                block, axis, base_idx[axis], chart.spacing[axis]
            )
            prev_region = tuple(
                slice(base_idx[axis], base_idx[axis] + 1) if k == axis else region[k]
                for k in range(chart.dim)
            )
            g[region] = g[prev_region] + incr
            del fixed[axis]
        return g

    order = list(range(chart.dim))
    g_fwd = staircase(order)
    g_rev = staircase(order[::-1])
    path_residual = float(np.max(np.abs(g_fwd - g_rev)))
    return ScalarField(chart, g_fwd), path_residual
