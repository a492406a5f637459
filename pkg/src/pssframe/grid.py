"""Rectangular grid charts, scalar fields, and difference stencils.

All fields in this package live on a `GridChart`: an axis-aligned box sampled
on a uniform tensor grid.  Values are stored C-ordered (last axis fastest),
which is also the node order of the text exchange format in `fieldio`.

Derivatives use the second-order stencils

    interior:  (f[i+1] - f[i-1]) / (2h)
    edges:     (-3f[0] + 4f[1] - f[2]) / (2h)   and its mirror,

so a derivative is second-order accurate on the whole chart, boundary
included.  `midpoints` provides the cubic (4-point) interval-midpoint
interpolation the sweep integrators use to keep their classic fourth-order
one-step accuracy.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ChartMismatchError


@dataclass(frozen=True)
class GridChart:
    """Uniformly sampled axis-aligned box.

    origin[k] is the coordinate of node index 0 on axis k, spacing[k] > 0 the
    node distance, counts[k] >= 3 the number of nodes.  axis_names defaults
    to ("x1", ..., "xn").
    """

    origin: tuple
    spacing: tuple
    counts: tuple
    axis_names: tuple = field(default=())

    def __post_init__(self):
        origin = tuple(float(v) for v in self.origin)
        spacing = tuple(float(v) for v in self.spacing)
        counts = tuple(int(v) for v in self.counts)
        if not (len(origin) == len(spacing) == len(counts)):
            raise ValueError("origin/spacing/counts lengths differ")
        if len(counts) < 1:
            raise ValueError("chart needs at least one axis")
        if any(s <= 0.0 for s in spacing):
            raise ValueError("spacing must be positive")
        if any(c < 3 for c in counts):
            raise ValueError("need at least 3 nodes per axis")
        names = tuple(self.axis_names) or tuple(
            "x%d" % (k + 1) for k in range(len(counts))
        )
        if len(names) != len(counts):
            raise ValueError("axis_names length mismatch")
        object.__setattr__(self, "origin", origin)
        object.__setattr__(self, "spacing", spacing)
        object.__setattr__(self, "counts", counts)
        object.__setattr__(self, "axis_names", names)

    @property
    def dim(self):
        return len(self.counts)

    @property
    def shape(self):
        return self.counts

    def axis_coordinates(self, axis):
        """1D array of node coordinates along one axis."""
        return self.origin[axis] + self.spacing[axis] * np.arange(self.counts[axis])

    def meshgrid(self):
        """Node coordinate arrays, each of shape `counts` (ij indexing)."""
        axes = [self.axis_coordinates(k) for k in range(self.dim)]
        return np.meshgrid(*axes, indexing="ij")

    def interior(self):
        """Slicer selecting nodes with all indices strictly inside."""
        return tuple(slice(1, -1) for _ in self.counts)

    def require_same(self, other):
        if not isinstance(other, GridChart) or (
            self.counts != other.counts
            or any(abs(a - b) > 1e-12 for a, b in zip(self.origin, other.origin))
            or any(abs(a - b) > 1e-12 for a, b in zip(self.spacing, other.spacing))
        ):
            raise ChartMismatchError("fields live on different charts")

    def base_index(self, selector="center"):
        """Resolve a base-node selector: 'center', 'origin', or an index tuple."""
        if selector == "center":
            return tuple(c // 2 for c in self.counts)
        if selector == "origin":
            return tuple(0 for _ in self.counts)
        base = tuple(int(v) for v in selector)
        if len(base) != self.dim:
            raise ValueError("base index has wrong length")
        for b, c in zip(base, self.counts):
            if not (0 <= b < c):
                raise ValueError("base index out of range")
        return base


@dataclass
class ScalarField:
    """Scalar samples on a chart (values.shape == chart.counts)."""

    chart: GridChart
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != tuple(self.chart.counts):
            raise ValueError(
                "values shape %s != chart counts %s"
                % (self.values.shape, self.chart.counts)
            )

    @classmethod
    def from_function(cls, chart, fn):
        return cls(chart, fn(*chart.meshgrid()))

    @classmethod
    def zeros(cls, chart):
        return cls(chart, np.zeros(chart.counts))

    @classmethod
    def constant(cls, chart, value):
        return cls(chart, np.full(chart.counts, float(value)))

    def copy(self):
        return ScalarField(self.chart, self.values.copy())

    def _coerce(self, other):
        if isinstance(other, ScalarField):
            self.chart.require_same(other.chart)
            return other.values
        return other

    def __add__(self, other):
        return ScalarField(self.chart, self.values + self._coerce(other))

    __radd__ = __add__

    def __sub__(self, other):
        return ScalarField(self.chart, self.values - self._coerce(other))

    def __rsub__(self, other):
        return ScalarField(self.chart, self._coerce(other) - self.values)

    def __mul__(self, other):
        return ScalarField(self.chart, self.values * self._coerce(other))

    __rmul__ = __mul__

    def __neg__(self):
        return ScalarField(self.chart, -self.values)

    def max_abs(self):
        return float(np.max(np.abs(self.values)))


def partial_derivative(values, axis, spacing):
    """Second-order partial derivative along `axis` of a node array."""
    values = np.asarray(values, dtype=float)
    if values.shape[axis] < 3:
        raise ValueError("need at least 3 nodes along the axis")
    out = np.empty_like(values)
    h2 = 2.0 * spacing

    def sl(part):
        idx = [slice(None)] * values.ndim
        idx[axis] = part
        return tuple(idx)

    out[sl(slice(1, -1))] = (values[sl(slice(2, None))] - values[sl(slice(None, -2))]) / h2
    out[sl(0)] = (
        -3.0 * values[sl(0)] + 4.0 * values[sl(1)] - values[sl(2)]
    ) / h2
    out[sl(-1)] = (
        3.0 * values[sl(-1)] - 4.0 * values[sl(-2)] + values[sl(-3)]
    ) / h2
    return out


def midpoints(values, axis):
    """Interval midpoints along `axis` via cubic 4-point interpolation.

    Returns an array one shorter along `axis`; entry i sits between nodes i
    and i+1.  Exact for cubics, so the interpolation error is O(h^4); the two
    boundary intervals use the one-sided 4-point rule of the same order.
    """
    f = np.asarray(values, dtype=float)
    n = f.shape[axis]
    if n < 4:
        # fall back to the 2-point average on very short lines
        lo = tuple(
            slice(None, -1) if k == axis else slice(None) for k in range(f.ndim)
        )
        hi = tuple(
            slice(1, None) if k == axis else slice(None) for k in range(f.ndim)
        )
        return 0.5 * (f[lo] + f[hi])

    def sl(part):
        idx = [slice(None)] * f.ndim
        idx[axis] = part
        return tuple(idx)

    out_shape = list(f.shape)
    out_shape[axis] = n - 1
    out = np.empty(out_shape)

    out[sl(slice(1, -1))] = (
        -f[sl(slice(0, -3))]
        + 9.0 * f[sl(slice(1, -2))]
        + 9.0 * f[sl(slice(2, -1))]
        - f[sl(slice(3, None))]
    ) / 16.0
    out[sl(0)] = (
        5.0 * f[sl(0)] + 15.0 * f[sl(1)] - 5.0 * f[sl(2)] + f[sl(3)]
    ) / 16.0
    out[sl(-1)] = (
        5.0 * f[sl(-1)] + 15.0 * f[sl(-2)] - 5.0 * f[sl(-3)] + f[sl(-4)]
    ) / 16.0
    return out


def interior_max_abs(values):
    """Max |values| over nodes with every index strictly interior."""
    arr = np.asarray(values)
    core = arr[tuple(slice(1, -1) for _ in range(arr.ndim))]
    if core.size == 0:
        return 0.0
    return float(np.max(np.abs(core)))
