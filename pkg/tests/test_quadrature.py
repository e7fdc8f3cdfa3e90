import math

import numpy as np
import pytest

from skodom.quadrature import (_GWEIGHTS, _KWEIGHTS, _NODES, QuadratureError, cosine_moments)


@pytest.mark.parametrize("deg", range(0, 23))
def test_kronrod_exact_to_degree_22(deg):
    exact = 0.0 if deg % 2 else 2.0 / (deg + 1)
    assert float(np.sum(_KWEIGHTS * _NODES ** deg)) == pytest.approx(exact, abs=1e-14)


@pytest.mark.parametrize("deg", range(0, 13))
def test_gauss_exact_to_degree_12(deg):
    exact = 0.0 if deg % 2 else 2.0 / (deg + 1)
    assert float(np.sum(_GWEIGHTS * _NODES ** deg)) == pytest.approx(exact, abs=1e-14)


def test_linear_closed_form():
    # int_0^1 y cos(n pi y) dy = ((-1)^n - 1) / (n pi)^2
    c, err = cosine_moments(lambda y: y, 50)
    n = np.arange(1, 51)
    assert c[0] == pytest.approx(0.5, abs=1e-14)
    assert np.allclose(c[1:], ((-1.0) ** n - 1) / (n * math.pi) ** 2, atol=1e-13)
    assert err <= 1e-12


def test_jump_is_isolated():
    # step at 1/3: int_{1/3}^1 cos(n pi y) = -sin(n pi / 3) / (n pi)
    c, _ = cosine_moments(lambda y: (y >= 1 / 3).astype(float), 40)
    n = np.arange(1, 41)
    assert np.allclose(c[1:], -np.sin(n * math.pi / 3) / (n * math.pi), atol=1e-11)


def test_subinterval():
    c, _ = cosine_moments(lambda y: np.ones_like(y), 5, 0.25, 0.75)
    n = np.arange(1, 6)
    ref = (np.sin(0.75 * n * math.pi) - np.sin(0.25 * n * math.pi)) / (n * math.pi)
    assert c[0] == pytest.approx(0.5, abs=1e-15)
    assert np.allclose(c[1:], ref, atol=1e-14)


def test_non_convergence_reports_tolerance():
    with pytest.raises(QuadratureError) as info:
        cosine_moments(lambda y: 1.0 / np.sqrt(np.abs(y - 0.3)), 8, tol=1e-14, max_panels=64)
    assert info.value.achieved > info.value.requested == 1e-14
    assert "tolerance" in str(info.value)


def test_negative_order():
    with pytest.raises(ValueError):
        cosine_moments(lambda y: y, -1)
