import numpy as np
import pytest

from heismod.errors import CharacteristicPoint, DerivOracleFailure
from heismod.heis import Point, contact_form
from heismod.logchart import LogPoint, phi
from heismod.numerics import Rect
from heismod.surfaces import (SurfacePatch, characteristic_test, cone_patch, flow_pushforward,
                              gauge_sphere_patch, horizontal_area, horizontal_area_integral,
                              horizontal_flow_field, horizontal_normal, induced_form,
                              integrate_flow, is_horizontal_curve, plane_t0, vertical_plane_y0)

A, B = 1.0, np.e
RING_U = Rect(2 * np.log(A), 2 * np.log(B), -2 * np.pi / 3, 2 * np.pi / 3)


def test_cone_normal_closed_form():
    rng = np.random.default_rng(0)
    for psi in (-1.3, -0.2, 0.0, 0.7, 1.5):
        s = cone_patch(psi, RING_U)
        xi, eta = rng.uniform(0, 2, 10), rng.uniform(-2, 2, 10)
        nd = horizontal_normal(s, xi, eta)
        assert np.allclose(nd.norm, 1.5 * np.exp(1.5 * xi) * np.sqrt(np.cos(psi)), rtol=1e-13)
        assert not np.any(nd.is_characteristic)


def test_plane_t0_normal():
    s = plane_t0()
    nd = horizontal_normal(s, 0.3, -0.6)
    assert (nd.n_h.a, nd.n_h.b) == pytest.approx((2 * -0.6, -2 * 0.3))
    assert characteristic_test(s, 0.0, 0.0)
    assert not characteristic_test(s, 0.1, 0.0)


def test_vertical_plane_normal():
    s = vertical_plane_y0()
    nd = horizontal_normal(s, np.array([0.3, -0.7]), np.array([0.1, 0.9]))
    assert np.allclose(nd.n_h.a, 0.0) and np.allclose(nd.n_h.b, -1.0)


def test_gauge_sphere_poles():
    s = gauge_sphere_patch(0.0)
    norms = [float(horizontal_normal(s, np.pi / 2 - d, 0.3).norm) for d in (1e-1, 1e-3, 1e-5)]
    assert norms[0] > norms[1] > norms[2]
    assert norms[2] < 1e-2


def test_fd_matches_analytic():
    rng = np.random.default_rng(1)
    for s in (cone_patch(0.4, RING_U), gauge_sphere_patch(0.5), plane_t0()):
        u = rng.uniform(s.domain.u0, s.domain.u1, 20) * 0.9
        v = rng.uniform(s.domain.v0, s.domain.v1, 20) * 0.9
        a = horizontal_normal(s, u, v)
        f = horizontal_normal(s.with_fd(), u, v)
        assert np.allclose(a.n_h.a, f.n_h.a, rtol=1e-6, atol=1e-6)
        assert np.allclose(a.n_h.b, f.n_h.b, rtol=1e-6, atol=1e-6)


def test_bad_oracle_raises():
    s = SurfacePatch(lambda u, v: Point(u + 1j * v, np.log(u)), Rect(-1, 1, -1, 1))
    with np.errstate(invalid="ignore"), pytest.raises(DerivOracleFailure):
        horizontal_normal(s, -0.5, 0.0)


def test_induced_form_on_cones():
    rng = np.random.default_rng(2)
    for c in (-1.0, 0.3, 1.2):
        s = cone_patch(c, RING_U)
        xi, eta = rng.uniform(0, 2, 8), rng.uniform(-2, 2, 8)
        wu, wv = induced_form(s, xi, eta)
        assert np.allclose(wu, -np.exp(xi) * np.cos(c) * np.tan(c))
        assert np.allclose(wv, -np.exp(xi) * np.cos(c) * 3)


def test_induced_form_plane():
    wu, wv = induced_form(plane_t0(), 0.4, -0.25)
    assert (wu, wv) == pytest.approx((0.5, 0.8))


def test_induced_form_vanishes_with_normal():
    U, V = plane_t0().domain.grid(21, inclusive=True)
    s = plane_t0()
    wu, wv = induced_form(s, U, V)
    nd = horizontal_normal(s, U, V)
    assert np.array_equal(np.hypot(wu, wv) == 0, nd.norm == 0)


def test_flow_field_properties():
    rng = np.random.default_rng(3)
    for s in (cone_patch(0.6, RING_U), plane_t0(Rect(0.2, 1, 0.2, 1)), gauge_sphere_patch(0.2)):
        u = rng.uniform(s.domain.u0, s.domain.u1, 10) * 0.9
        v = rng.uniform(s.domain.v0, s.domain.v1, 10) * 0.9
        beta, malpha = horizontal_flow_field(s, u, v)
        wu, wv = induced_form(s, u, v)
        assert np.allclose(wu * beta + wv * malpha, 0.0, atol=1e-12)
        assert np.allclose(flow_pushforward(s, u, v).norm(), 1.0)


def test_flow_direction_on_cone():
    c = 0.8
    beta, malpha = horizontal_flow_field(cone_patch(c, RING_U), 1.0, 0.2)
    assert malpha / beta == pytest.approx(-np.tan(c) / 3)


def test_flow_raises_at_characteristic():
    with pytest.raises(CharacteristicPoint):
        horizontal_flow_field(plane_t0(), 0.0, 0.0)
    with pytest.raises(CharacteristicPoint):
        integrate_flow(plane_t0(), (0.0, 0.0), 10)


def test_cone_flow_lines_are_straight():
    for c in (0.0, 0.5, -1.1):
        line = integrate_flow(cone_patch(c, RING_U), (0.1, 0.0), 500, 1e-3)
        xi, eta = line.points[:, 0], line.points[:, 1]
        assert np.max(np.abs(eta - (-np.tan(c) / 3) * (xi - 0.1))) <= 1e-8
        if c == 0.0:
            assert np.ptp(eta) == 0.0


def test_flow_line_is_horizontal():
    s = gauge_sphere_patch(0.3)
    line = integrate_flow(s, (0.2, 0.1), 300, 1e-3)
    pts = line.points
    d = np.gradient(pts, axis=0)
    samples = [((u, v), (du, dv)) for (u, v), (du, dv) in zip(pts[1:-1], d[1:-1])]
    assert is_horizontal_curve(s, samples, tol=1e-6)
    # cartesian check along the traced curve
    cart = s(pts[:, 0], pts[:, 1]).as_array()
    tangent = np.gradient(cart, axis=1)
    mid = Point.from_array(cart[:, 1:-1])
    assert np.max(np.abs(contact_form(mid, tangent[:, 1:-1]))) <= 1e-6


def test_flow_stops_at_boundary():
    line = integrate_flow(cone_patch(0.0, Rect(0, 0.05, -1, 1)), (0.01, 0.0), 1000, 1e-3)
    assert line.stopped == "boundary"


def test_horizontal_curve_negative_and_degenerate():
    s = plane_t0()
    assert not is_horizontal_curve(s, [((0.5, 0.4), (1.0, 0.0))])
    assert is_horizontal_curve(s, [((0.0, 0.0), (1.0, 0.0)), ((0.0, 0.0), (0.0, 1.0))])


@pytest.mark.parametrize("psi", [-1.2, 0.0, 0.9])
def test_cone_horizontal_area(psi):
    s = cone_patch(psi, RING_U)
    exact = 4 * np.pi / 3 * (B**3 - A**3) * np.sqrt(np.cos(psi))
    assert horizontal_area(s) == pytest.approx(exact, rel=1e-8)


def test_area_additivity_and_zero_region():
    s = cone_patch(0.3, RING_U)
    left, right = RING_U.split_u(0.7)
    assert horizontal_area(s, left) + horizontal_area(s, right) == pytest.approx(horizontal_area(s), rel=1e-10)
    assert horizontal_area(s, Rect(0.5, 0.5, 0, 1)) == 0.0


def test_area_integral_linear():
    s = cone_patch(0.3, RING_U)
    assert horizontal_area_integral(lambda p: 2.5 + 0 * p.t, s) == pytest.approx(2.5 * horizontal_area(s))


def test_reparametrization_invariance():
    # xi = 2 u, eta = v + u/4 has Jacobian 2 > 0
    c = 0.4
    base = cone_patch(c, RING_U)

    def sigma(u, v):
        return base(2 * u, v + u / 4)

    def partials(u, v):
        su, sv = base.derivatives(2 * u, v + u / 4)
        return 2 * su + sv / 4, sv

    s = SurfacePatch(sigma, Rect(0, 1, -1, 1), partials)
    u, v = 0.3, 0.2
    assert horizontal_normal(s, u, v).norm == pytest.approx(2 * horizontal_normal(base, 2 * u, v + u / 4).norm)
    # the image is a sheared strip over xi in (0, 2); the cone integrand does not depend on eta
    assert horizontal_area(s) == pytest.approx(horizontal_area(base, Rect(0, 2, -1, 1)), rel=1e-8)


def test_gauge_sphere_area_scales_cubically():
    a0 = horizontal_area(gauge_sphere_patch(0.0), graded=True, rtol=1e-6)
    a1 = horizontal_area(gauge_sphere_patch(2 * np.log(2.0)), graded=True, rtol=1e-6)
    assert a1 / a0 == pytest.approx(8.0, rel=1e-9)


def test_phi_consistency_of_cone_patch():
    s = cone_patch(0.2, RING_U)
    p = s(0.5, 0.1)
    q = phi(LogPoint(0.5, 0.2, 0.1))
    assert p.z == q.z and p.t == q.t
