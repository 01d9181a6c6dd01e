import math

import numpy as np
import pytest

from heismod.errors import QuadratureNonConvergence
from heismod.numerics import (DEFAULT_QUAD_N, Rect, beta_fn, default_quad_n, gauss_legendre,
                              gauss_rect, graded_integral, graded_nodes, graded_rect,
                              rk4_step, tail_cutoff, tan_substitution_integral)

# B(1/2, 1/6) = Gamma(1/2) Gamma(1/6) / Gamma(2/3), evaluated once with mpmath at 30 digits
BETA_HALF_SIXTH = 7.285951943662749


def test_gauss_rule_properties():
    for n in (1, 4, 16, 64):
        r = gauss_legendre(n)
        assert np.all(r.weights > 0)
        assert r.weights.sum() == pytest.approx(2.0)
        for m in range(0, n):
            if 2 * m <= 2 * n - 1:
                assert r.weights @ r.nodes ** (2 * m) == pytest.approx(2 / (2 * m + 1), rel=1e-12)
    nodes, w = gauss_legendre(8).mapped(1.0, 4.0)
    assert w.sum() == pytest.approx(3.0)
    assert np.all((nodes > 1) & (nodes < 4))


def test_gauss_rect_examples():
    unit = Rect(0, 1, 0, 1)
    assert gauss_rect(lambda x, y: x**2 * y, unit, 8) == pytest.approx(1 / 6, rel=1e-14)
    r = Rect(-1.0, 2.5, 0.3, 0.9)
    assert gauss_rect(lambda x, y: np.ones_like(x), r, 4) == pytest.approx(r.area, rel=1e-14)
    assert gauss_rect(lambda x, y: x, Rect(0, 0, 0, 1)) == 0.0


def test_gauss_rect_deterministic():
    fn = lambda x, y: np.exp(np.sin(3 * x) * y)
    r = Rect(0, 2, -1, 1)
    assert gauss_rect(fn, r, 32) == gauss_rect(fn, r, 32)


def test_gauss_rect_flags_nonconvergence():
    with pytest.raises(QuadratureNonConvergence):
        gauss_rect(lambda x, y: np.abs(x - 0.3) ** 0.5, Rect(0, 1, 0, 1), 4, rtol=1e-12)


def test_rect_helpers():
    r = Rect(0, 2, 0, 1)
    a, b = r.split_u(0.5)
    assert a.area + b.area == r.area
    assert r.contains(1.0, 0.5) and not r.contains(2.0, 0.5)
    U, V = r.grid(5, inclusive=True)
    assert U.min() == 0 and U.max() == 2


def test_default_quad_n(monkeypatch):
    monkeypatch.delenv("HEISMOD_QUAD_N", raising=False)
    assert default_quad_n() == DEFAULT_QUAD_N
    monkeypatch.setenv("HEISMOD_QUAD_N", "24")
    assert default_quad_n() == 24


def test_graded_nodes_cover_interval():
    x, w = graded_nodes(-1.0, 3.0, 16)
    assert np.all(np.diff(x) > 0)
    assert w.sum() == pytest.approx(4.0, rel=1e-13)


def test_graded_integral_endpoint_singularity():
    # int_{-pi/2}^{pi/2} cos^{-2/3} = B(1/2, 1/6)
    val = graded_integral(lambda p: np.cos(p) ** (-2 / 3), -np.pi / 2, np.pi / 2, 64)
    assert val == pytest.approx(BETA_HALF_SIXTH, rel=1e-9)


def test_graded_rect_corner_singularity():
    # int over [0,1]^2 of sqrt(x^2 + y^2) = (sqrt 2 + asinh 1) / 3
    exact = (math.sqrt(2) + math.asinh(1.0)) / 3
    assert graded_rect(lambda x, y: np.hypot(x, y), Rect(0, 1, 0, 1), 32) == pytest.approx(exact, rel=1e-10)


def test_tail_cutoff():
    z = tail_cutoff(1e-6)
    assert 6 * z ** (-1 / 3) == pytest.approx(1e-6)


def test_tan_substitution_examples():
    assert tan_substitution_integral(1.0) == pytest.approx(BETA_HALF_SIXTH, rel=1e-9)
    assert tan_substitution_integral(0.5) == pytest.approx(2 ** (1 / 3) * BETA_HALF_SIXTH, rel=1e-9)
    with pytest.raises(ValueError):
        tan_substitution_integral(0.0)


def test_tan_substitution_scaling():
    ks = np.array([0.1, 0.25, 0.5, 0.75, 1.0, 2.0, 5.0])
    scaled = np.array([tan_substitution_integral(k) * k ** (1 / 3) for k in ks])
    assert np.ptp(scaled) / scaled.mean() < 1e-8


def test_beta_fn():
    assert beta_fn(1, 1) == pytest.approx(1.0, rel=1e-15)
    assert beta_fn(0.5, 0.5) == pytest.approx(math.pi, rel=1e-14)
    assert beta_fn(0.5, 1 / 6) == pytest.approx(BETA_HALF_SIXTH, rel=1e-13)
    assert beta_fn(2.5, 3.5) == pytest.approx(beta_fn(3.5, 2.5))
    with pytest.raises(ValueError):
        beta_fn(0, 1)


def test_rk4_constant_field():
    y = np.array([1.0, -2.0])
    for _ in range(10):
        y = rk4_step(lambda s: np.array([0.5, 0.25]), y, 0.1)
    assert y == pytest.approx([1.5, -1.75])


def test_rk4_circle():
    y = np.array([1.0, 0.0])
    for _ in range(1000):
        y = rk4_step(lambda s: np.array([-s[1], s[0]]), y, 1e-3)
    assert abs(np.hypot(*y) - 1.0) <= 1e-10
    assert y == pytest.approx([math.cos(1.0), math.sin(1.0)], abs=1e-12)


def test_rk4_order():
    def err(h):
        y = np.array([1.0])
        for _ in range(int(round(1 / h))):
            y = rk4_step(lambda s: s, y, h)
        return abs(y[0] - math.e)

    slope = math.log2(err(0.1) / err(0.05))
    assert 3.8 < slope < 4.2
