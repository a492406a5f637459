"""Orthonormal coframes, connection forms, and frame rotations.

`FrameData` bundles the dual coframe (one-forms omega_1..omega_n) with the
skew connection matrix (omega_ij).  `structure_residuals` measures how well
the bundle satisfies the first and second structure equations at constant
sectional curvature K; `frame_change` rotates the bundle by a pointwise
orthogonal matrix field; `special_frame_residual` measures the defining
conditions of the distinguished frame whose first dual form is closed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import fieldio
from .errors import DegenerateFrameError
from .forms import ConnectionField, OneFormField, d_oneform, d_scalar, wedge
from .grid import GridChart, ScalarField, partial_derivative

DET_RTOL_DEFAULT = 1e-8
ORTH_TOL_DEFAULT = 1e-12


@dataclass
class FrameRotationField:
    """Pointwise orthogonal matrix field L (shape (*counts, n, n)).

    For n = 2 rotations built from an angle field, `angle` keeps the
    (unwrapped) angle so cos/sin relations stay available to callers.
    """

    chart: GridChart
    matrix: np.ndarray
    angle: ScalarField = None
    orth_tol: float = ORTH_TOL_DEFAULT

    def __post_init__(self):
        n = self.chart.dim
        self.matrix = np.asarray(self.matrix, dtype=float)
        if self.matrix.shape != tuple(self.chart.counts) + (n, n):
            raise ValueError("rotation matrix field has wrong shape")
        err = self.orthogonality_error()
        if not np.isfinite(err) or err > self.orth_tol:
            raise ValueError(
                "matrix field is not orthogonal: max |LL^T - I| = %.3e" % err
            )

    @classmethod
    def identity(cls, chart):
        n = chart.dim
        mat = np.broadcast_to(np.eye(n), chart.counts + (n, n)).copy()
        return cls(chart, mat)

    @classmethod
    def from_angle(cls, phi: ScalarField):
        """SO(2) rotation field [[cos, -sin], [sin, cos]] from an angle field."""
        if phi.chart.dim != 2:
            raise ValueError("angle rotations are for 2D charts")
        c, s = np.cos(phi.values), np.sin(phi.values)
        mat = np.empty(phi.chart.counts + (2, 2))
        mat[..., 0, 0] = c
        mat[..., 0, 1] = -s
        mat[..., 1, 0] = s
        mat[..., 1, 1] = c
        return cls(phi.chart, mat, angle=phi.copy())

    @classmethod
    def constant(cls, chart, matrix):
        mat = np.broadcast_to(
            np.asarray(matrix, dtype=float), chart.counts + np.shape(matrix)
        ).copy()
        return cls(chart, mat)

    def orthogonality_error(self):
        n = self.chart.dim
        gram = np.matmul(self.matrix, np.swapaxes(self.matrix, -1, -2))
        return float(np.max(np.abs(gram - np.eye(n))))

    def entry(self, i, j):
        return ScalarField(self.chart, self.matrix[..., i, j].copy())


@dataclass
class FrameData:
    """Dual coframe + connection on a chart."""

    chart: GridChart
    omega: tuple  # n OneFormFields
    connection: ConnectionField

    def __post_init__(self):
        n = self.chart.dim
        if n < 2:
            raise ValueError("frame data needs a chart of dimension >= 2")
        omega = tuple(self.omega)
        if len(omega) != n:
            raise ValueError("need one dual form per dimension")
        for w in omega:
            self.chart.require_same(w.chart)
        self.chart.require_same(self.connection.chart)
        self.omega = omega

    @property
    def dim(self):
        return self.chart.dim

    def coefficient_matrix(self):
        """F of shape (*counts, n, n) with F[..., i, k] = (omega_i)_k."""
        n = self.dim
        out = np.empty(self.chart.counts + (n, n))
        for i in range(n):
            for k in range(n):
                out[..., i, k] = self.omega[i].coeffs[k].values
        return out

    def max_abs(self):
        scale = max(w.max_abs() for w in self.omega)
        return max(scale, self.connection.max_abs())


def structure_residuals(fd: FrameData, curvature=-1.0):
    """Max-norm interior residuals of the two structure equations.

    res1: d(omega_i) - sum_{j != i} omega_j ^ omega_{ji}
    res2: d(omega_ij) - sum_k omega_ik ^ omega_kj + K omega_i ^ omega_j
    """
    n = fd.dim
    res1 = 0.0
    for i in range(n):
        resid = d_oneform(fd.omega[i])
        for j in range(n):
            if j == i:
                continue
            resid = resid - wedge(fd.omega[j], fd.connection.entry(j, i))
        res1 = max(res1, resid.interior_max_abs())

    res2 = 0.0
    for i in range(n):
        for j in range(i + 1, n):
            resid = d_oneform(fd.connection.entry(i, j))
            for k in range(n):
                resid = resid - wedge(
                    fd.connection.entry(i, k), fd.connection.entry(k, j)
                )
            target = wedge(fd.omega[i], fd.omega[j])
            for pair, coeff in target.coeffs.items():
                resid.coeffs[pair] = resid.coeffs[pair] + coeff * float(curvature)
            res2 = max(res2, resid.interior_max_abs())
    return res1, res2


def special_frame_residual(fd: FrameData):
    """Max-norm over all nodes of the special-frame conditions.

    For the distinguished frame: theta_{1i} + theta_i = 0 (i >= 2) and
    theta_ij = 0 (2 <= i < j).  Algebraic, so no interior restriction.
    """
    n = fd.dim
    worst = 0.0
    for i in range(1, n):
        form = fd.connection.entry(0, i) + fd.omega[i]
        worst = max(worst, form.max_abs())
    for i in range(1, n):
        for j in range(i + 1, n):
            worst = max(worst, fd.connection.entry(i, j).max_abs())
    return worst


def frame_change(fd: FrameData, rot: FrameRotationField) -> FrameData:
    """Rotate the bundle: theta_i = L_ij omega_j, Theta = dL L^T + L W L^T.

    The rotated connection is skew-symmetrized (its analytic skewness holds
    only to stencil order for non-constant L), which keeps the
    ConnectionField invariant exact.
    """
    fd.chart.require_same(rot.chart)
    chart = fd.chart
    n = fd.dim
    L = rot.matrix

    theta = []
    for i in range(n):
        coeffs = []
        for k in range(n):
            acc = np.zeros(chart.counts)
            for j in range(n):
                acc += L[..., i, j] * fd.omega[j].coeffs[k].values
            coeffs.append(acc)
        theta.append(OneFormField.from_arrays(chart, coeffs))

    # dL as a matrix of gradient coefficient arrays: dL[a][i][j] = d_a L_ij
    dL = np.empty((n,) + tuple(chart.counts) + (n, n))
    for i in range(n):
        for j in range(n):
            grad = d_scalar(ScalarField(chart, L[..., i, j]))
            for a in range(n):
                dL[a][..., i, j] = grad.coeffs[a].values

    upper = {}
    for i in range(n):
        for j in range(i + 1, n):
            coeffs = []
            for a in range(n):
                w_a = fd.connection.coefficient_matrix(a)
                m_a = np.matmul(np.matmul(L, w_a), np.swapaxes(L, -1, -2))
                d_part = np.einsum("...k,...k->...", dL[a][..., i, :], L[..., j, :])
                d_part_t = np.einsum(
                    "...k,...k->...", dL[a][..., j, :], L[..., i, :]
                )
                total = d_part + m_a[..., i, j]
                total_t = d_part_t + m_a[..., j, i]
                coeffs.append(0.5 * (total - total_t))
            upper[(i, j)] = OneFormField.from_arrays(chart, coeffs)

    return FrameData(chart, tuple(theta), ConnectionField(chart, upper))


def frame_vector_fields(fd: FrameData, det_rtol=DET_RTOL_DEFAULT):
    """Coordinate components of the frame vectors dual to the coframe.

    Returns (components, valid) where components[..., i, k] is the k-th
    coordinate component of e_i (so omega_j(e_i) = delta_ij) and valid marks
    nodes whose coefficient matrix passed the relative determinant test.
    Raises DegenerateFrameError when no node is invertible.
    """
    F = fd.coefficient_matrix()
    n = fd.dim
    scale = float(np.max(np.abs(F)))
    if scale == 0.0:
        raise DegenerateFrameError("coefficient matrix vanishes identically")
    det = np.linalg.det(F)
    valid = np.abs(det) > det_rtol * scale**n
    if not valid.any():
        raise DegenerateFrameError("coefficient matrix is singular everywhere")

    comps = np.zeros_like(F)
    safe = F[valid]
    inv = np.linalg.inv(safe)
    comps[valid] = np.swapaxes(inv, -1, -2)
    return comps, valid


def lie_bracket(chart: GridChart, x_comp, y_comp):
    """[X, Y]^k = X^m d_m Y^k - Y^m d_m X^k with the chart stencils.

    x_comp, y_comp: arrays of shape (*counts, n) of coordinate components.
    """
    n = chart.dim
    out = np.zeros_like(x_comp)
    for k in range(n):
        for m in range(n):
            d_yk = partial_derivative(y_comp[..., k], m, chart.spacing[m])
            d_xk = partial_derivative(x_comp[..., k], m, chart.spacing[m])
            out[..., k] += x_comp[..., m] * d_yk - y_comp[..., m] * d_xk
    return out


def save_frame_data(path, fd: FrameData):
    """Write a frame bundle as one pssfield file.

    Component order: omega_1..omega_n then omega_ij for i<j (row-major),
    each form contributing its n coefficients in axis order.
    """
    comps = []
    for w in fd.omega:
        comps.extend(w.coeffs)
    for i in range(fd.dim):
        for j in range(i + 1, fd.dim):
            comps.extend(fd.connection.entry(i, j).coeffs)
    fieldio.write_field(path, fd.chart, comps)


def load_frame_data(path):
    chart, stack = fieldio.read_field(path)
    n = chart.dim
    n_pairs = n * (n - 1) // 2
    if stack.shape[0] != n * n + n_pairs * n:
        raise ValueError("component count does not match frame data layout")
    omega = []
    pos = 0
    for _ in range(n):
        omega.append(OneFormField.from_arrays(chart, stack[pos : pos + n]))
        pos += n
    upper = {}
    for i in range(n):
        for j in range(i + 1, n):
            upper[(i, j)] = OneFormField.from_arrays(chart, stack[pos : pos + n])
            pos += n
    return FrameData(chart, tuple(omega), ConnectionField(chart, upper))
