"""Shared fixtures: small analytic frames with known structure behavior."""

import numpy as np
import pytest

from pssframe import ConnectionField, FrameData, GridChart, OneFormField, ScalarField


def square_chart(n, lo=-1.0, hi=1.0):
    """Uniform n x n chart on [lo, hi]^2."""
    h = (hi - lo) / (n - 1)
    return GridChart((lo, lo), (h, h), (n, n), ("x", "y"))


def exp_metric_frame(n, lo=-1.0, hi=1.0):
    """Orthonormal coframe of ds^2 = dx^2 + e^{-2x} dy^2 (curvature -1).

    omega_1 = dx, omega_2 = e^{-x} dy, omega_12 = -e^{-x} dy.  This frame
    already satisfies omega_12 + omega_2 = 0, so the solved rotation is the
    identity and theta_1 = dx exactly.
    """
    chart = square_chart(n, lo, hi)
    x, _ = chart.meshgrid()
    zero = np.zeros(chart.shape)
    ex = np.exp(-x)
    omega1 = OneFormField.from_arrays(chart, [np.ones(chart.shape), zero])
    omega2 = OneFormField.from_arrays(chart, [zero, ex])
    omega12 = OneFormField.from_arrays(chart, [zero, -ex])
    conn = ConnectionField(chart, {(0, 1): omega12})
    return FrameData(chart, (omega1, omega2), conn)


def cosh_metric_frame(n, lo=-1.0, hi=1.0):
    """Orthonormal coframe of ds^2 = dx^2 + cosh(x)^2 dy^2 (curvature -1).

    omega_1 = dx, omega_2 = cosh(x) dy, omega_12 = sinh(x) dy.  Not special:
    solving for the rotation angle is a genuine quadrature here.
    """
    chart = square_chart(n, lo, hi)
    x, _ = chart.meshgrid()
    zero = np.zeros(chart.shape)
    omega1 = OneFormField.from_arrays(chart, [np.ones(chart.shape), zero])
    omega2 = OneFormField.from_arrays(chart, [zero, np.cosh(x)])
    omega12 = OneFormField.from_arrays(chart, [zero, np.sinh(x)])
    conn = ConnectionField(chart, {(0, 1): omega12})
    return FrameData(chart, (omega1, omega2), conn)


def flat_frame(n):
    """Coframe of the flat plane: fails every curvature -1 check."""
    chart = square_chart(n)
    zero = np.zeros(chart.shape)
    one = np.ones(chart.shape)
    omega1 = OneFormField.from_arrays(chart, [one, zero])
    omega2 = OneFormField.from_arrays(chart, [zero, one])
    conn = ConnectionField(chart, {(0, 1): OneFormField.zeros(chart)})
    return FrameData(chart, (omega1, omega2), conn)


def scalar_from(chart, fn):
    return ScalarField.from_function(chart, fn)


@pytest.fixture
def chart41():
    return square_chart(41)


@pytest.fixture
def exp_frame():
    return exp_metric_frame(41)


@pytest.fixture
def cosh_frame():
    return cosh_metric_frame(41)


@pytest.fixture
def rng():
    return np.random.default_rng(20260817)
