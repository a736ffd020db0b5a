"""Electrode potential curves: anchors, derivatives, monotonicity, domain."""

import math

import numpy as np
import pytest

from pairdva import DomainError, docv_dz, ocv, u_neg, u_pos


def u_pos_reference(z):
    # independent transcription: Horner form + math module
    poly = 3.6674 + z * (-0.0225 + z * (0.5619 + z * (0.6329
           + z * (-0.1957 + z * 0.1016))))
    return poly - 0.5623 * math.exp(95.102 * (1.0 - z) - 97.036)


def u_neg_reference(z):
    steps = ((0.012, 0.15, 0.019), (0.012, 0.19, 0.019),
             (0.004, 0.27, 0.024), (0.009, 0.23, 0.016),
             (0.0145, 0.59, 0.024), (0.080, 1.24, 0.066))
    val = 0.063 + 0.8 * math.exp(-75.0 * (0.83 * z + 0.007))
    for amp, center, width in steps:
        val -= amp * math.tanh((z - center) / width)
    return val


def test_endpoint_anchors():
    assert u_pos(1.0) == pytest.approx(4.7456000000000005, abs=1e-12)
    assert u_pos(0.0) == pytest.approx(3.5861089832557416, abs=1e-12)
    assert u_neg(0.0) == pytest.approx(0.6677442881088992, abs=1e-12)
    assert u_neg(1.0) == pytest.approx(0.09138900248138397, abs=1e-12)
    assert ocv(0.59) == pytest.approx(3.857256714947333, abs=1e-12)


def test_matches_independent_transcription():
    z = np.linspace(0.0, 1.0, 257)
    got_p = u_pos(z)
    got_n = u_neg(z)
    for i, zi in enumerate(z):
        assert got_p[i] == pytest.approx(u_pos_reference(float(zi)), abs=1e-12)
        assert got_n[i] == pytest.approx(u_neg_reference(float(zi)), abs=1e-12)


def test_ocv_is_electrode_difference():
    z = np.linspace(0.0, 1.0, 1001)
    assert np.allclose(ocv(z), u_pos(z) - u_neg(z), rtol=0.0, atol=1e-15)


def test_ocv_strictly_increasing():
    z = np.linspace(0.0, 1.0, 10001)
    assert np.all(np.diff(ocv(z)) > 0.0)


def test_ocv_slope_bounded():
    # steepest feature is the staging transition near z = 0.59
    z = np.linspace(0.0, 1.0, 20001)
    v = ocv(z)
    dz = z[1] - z[0]
    assert np.abs(np.diff(v)).max() <= 40.0 * dz


def test_derivative_matches_finite_differences():
    z = np.linspace(0.01, 0.99, 197)
    h = 1e-6
    fd = (ocv(z + h) - ocv(z - h)) / (2.0 * h)
    assert np.allclose(docv_dz(z), fd, rtol=1e-6, atol=1e-9)


def test_derivative_positive_everywhere():
    z = np.linspace(0.0, 1.0, 10001)
    assert docv_dz(z).min() > 0.0


def test_domain_rejected_outside_unit_interval():
    for bad in (-0.01, 1.01, -5.0, 2.0):
        with pytest.raises(DomainError):
            ocv(bad)
        with pytest.raises(DomainError):
            docv_dz(bad)
    with pytest.raises(DomainError):
        u_pos(np.array([0.5, 1.2]))
    # the closed interval itself is fine
    ocv(0.0)
    ocv(1.0)


def test_scalar_and_array_paths_agree():
    z = np.linspace(0.0, 1.0, 37)
    arr = ocv(z)
    for i, zi in enumerate(z):
        assert ocv(float(zi)) == arr[i]


def test_deterministic():
    z = np.linspace(0.0, 1.0, 501)
    assert np.array_equal(ocv(z), ocv(z))
    assert np.array_equal(docv_dz(z), docv_dz(z))
