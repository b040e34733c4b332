import math

import mpmath
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from magflow.hyp import (
    GeodesicCircle,
    GeometryError,
    HalfPlanePoint,
    Isometry,
    QuadratureError,
    apply_isometry,
    circle_length,
    circle_line_integral,
    circle_point,
    circle_quadrature,
    circle_tangent,
    disk_area,
    disk_quadrature,
    geodesic_point,
    hyp_distance,
    point_to_polar,
    polar_to_point,
)

coord = st.floats(-5, 5)
height = st.floats(0.05, 20)
points = st.builds(HalfPlanePoint, coord, height)


@st.composite
def isometries(draw):
    a, b, c = draw(st.floats(-3, 3)), draw(st.floats(-3, 3)), draw(st.floats(-3, 3))
    if abs(a) < 0.2:
        a = 0.2 + abs(a)
    return Isometry(a, b, c, (1.0 + b * c) / a)


def distance_oracle(p, q):
    mpmath.mp.dps = 40
    x1, y1, x2, y2 = (mpmath.mpf(v) for v in (p.x, p.y, q.x, q.y))
    return float(mpmath.acosh(1 + ((x1 - x2) ** 2 + (y1 - y2) ** 2) / (2 * y1 * y2)))


def test_distance_examples():
    assert hyp_distance(HalfPlanePoint(0, 1), HalfPlanePoint(0, 1)) == 0.0
    assert hyp_distance(HalfPlanePoint(0, 1), HalfPlanePoint(0, math.e)) == pytest.approx(1.0, abs=1e-15)
    assert hyp_distance(HalfPlanePoint(0, 1), HalfPlanePoint(3, 4)) == pytest.approx(math.acosh(3.25), rel=1e-14)


@given(points, points)
def test_distance_matches_high_precision_oracle(p, q):
    assert hyp_distance(p, q) == pytest.approx(distance_oracle(p, q), rel=1e-12, abs=1e-14)


def test_distance_tiny_separation():
    p = HalfPlanePoint(0.3, 1.7)
    q = HalfPlanePoint(0.3 + 1e-11, 1.7)
    assert hyp_distance(p, q) == pytest.approx(distance_oracle(p, q), rel=1e-6)


@given(points, points, points)
def test_distance_metric_axioms(p, q, r):
    d = hyp_distance
    assert d(p, q) == pytest.approx(d(q, p), rel=1e-13, abs=1e-15)
    assert d(p, r) <= d(p, q) + d(q, r) + 1e-9


@given(isometries(), points, points)
def test_isometry_preserves_distance(m, p, q):
    d0 = hyp_distance(p, q)
    assert hyp_distance(m(p), m(q)) == pytest.approx(d0, rel=1e-10, abs=1e-10)


def test_isometry_examples():
    assert apply_isometry(Isometry.identity(), HalfPlanePoint(2, 3)) == HalfPlanePoint(2, 3)
    assert apply_isometry(Isometry(1, 1, 0, 1), HalfPlanePoint(0, 1)) == HalfPlanePoint(1, 1)
    p = apply_isometry(Isometry(0, -1, 1, 0), HalfPlanePoint(0, 2))
    assert p.x == pytest.approx(0, abs=1e-15) and p.y == pytest.approx(0.5)


def test_degenerate_isometry_rejected():
    with pytest.raises(GeometryError):
        Isometry(1, 1, 1, 1)
    with pytest.raises(GeometryError):
        Isometry(2, 0, 0, 1)


@given(isometries(), isometries(), points)
def test_composition(m1, m2, p):
    q1, q2 = (m1 @ m2)(p), m1(m2(p))
    assert hyp_distance(q1, q2) < 1e-8
    r = m1.inverse()(m1(p))
    assert hyp_distance(r, p) < 1e-8


def test_invalid_point():
    with pytest.raises(GeometryError):
        HalfPlanePoint(0, 0)
    with pytest.raises(GeometryError):
        HalfPlanePoint(0, -1)


def test_act_state_turns_tangent():
    # z -> -1/z at i maps the upward direction to the downward one
    x, y, th = Isometry(0, -1, 1, 0).act_state(0.0, 1.0, math.pi / 2)
    assert (x, y) == pytest.approx((0, 1), abs=1e-15)
    assert th == pytest.approx(3 * math.pi / 2)


def test_circle_length_and_area():
    assert circle_length(0) == 0 and disk_area(0) == 0
    assert circle_length(1) == pytest.approx(2 * math.pi * math.sinh(1), rel=1e-15)
    assert circle_length(3) == pytest.approx(62.944, abs=1e-3)
    assert disk_area(1) == pytest.approx(3.4123, abs=1e-4)
    for r in np.linspace(0.1, 6, 10):
        assert disk_area(r) / circle_length(r) == pytest.approx(math.tanh(r / 2), rel=1e-13)
    assert disk_area(3) / circle_length(3) == pytest.approx(0.90515, abs=1e-5)
    with pytest.raises(GeometryError):
        circle_length(-1)
    with pytest.raises(GeometryError):
        disk_area(-0.5)
    with pytest.raises(GeometryError):
        GeodesicCircle(HalfPlanePoint(0, 1), 0.0)


@given(points, st.floats(0.01, 5), st.floats(-4, 4))
def test_polar_round_trip(c, rho, phi):
    x, y = polar_to_point(c, rho, phi)
    assert hyp_distance(c, HalfPlanePoint(float(x), float(y))) == pytest.approx(rho, rel=1e-9)
    r2, p2 = point_to_polar(c, x, y)
    assert r2 == pytest.approx(rho, rel=1e-8)
    assert math.remainder(float(p2) - phi, 2 * math.pi) == pytest.approx(0, abs=1e-8)


def test_circle_point_conventions():
    c = GeodesicCircle(HalfPlanePoint(0, 1), 1.3)
    top = circle_point(c, 0.0)
    assert top.x == pytest.approx(0, abs=1e-14) and top.y == pytest.approx(math.exp(1.3))
    L = circle_length(1.3)
    back = circle_point(c, L)
    assert hyp_distance(top, back) < 1e-9
    t = np.linspace(0, L, 50)
    x, y = circle_point(c, t)
    assert np.allclose([hyp_distance(c.center, HalfPlanePoint(a, b)) for a, b in zip(x, y)], 1.3, atol=1e-10)


@given(points, st.floats(0.1, 3), st.floats(0, 20))
def test_circle_unit_speed(center, r, t):
    c = GeodesicCircle(center, r)
    h = 1e-5
    p, q = circle_point(c, t - h), circle_point(c, t + h)
    assert hyp_distance(p, q) / (2 * h) == pytest.approx(1.0, rel=1e-6)
    vx, vy = circle_tangent(c, t)
    m = circle_point(c, t)
    assert math.hypot(vx, vy) / m.y == pytest.approx(1.0, rel=1e-12)


def test_geodesic_point():
    p = geodesic_point(HalfPlanePoint(0, 1), math.pi / 2, 1.0)
    assert (p.x, p.y) == pytest.approx((0, math.e), abs=1e-14)


def test_disk_quadrature_constant_and_zero():
    c = GeodesicCircle(HalfPlanePoint(0.5, 2), 2.0)
    one = disk_quadrature(c, lambda x, y: np.ones_like(x))
    assert one == pytest.approx(2 * math.pi * (math.cosh(2) - 1), rel=1e-13)
    assert disk_quadrature(c, lambda x, y: np.zeros_like(x)) == 0.0


def test_disk_quadrature_converges_on_sqrt_y():
    c = GeodesicCircle(HalfPlanePoint(0, 1), 2.0)
    from magflow.radon import q_kernel_real

    exact = q_kernel_real(2.0, 0.0)
    errs = [abs(disk_quadrature(c, lambda x, y: np.sqrt(y), order=n) - exact) for n in (4, 8, 16, 32)]
    for a, b in zip(errs, errs[1:]):
        assert b <= 1.1 * a or b < 1e-12
    assert errs[-1] < 1e-6


def test_nonfinite_integrand_reports_location():
    c = GeodesicCircle(HalfPlanePoint(0, 1), 1.0)
    with pytest.raises(QuadratureError) as info:
        disk_quadrature(c, lambda x, y: np.where(x > 0.2, np.nan, 1.0))
    assert info.value.location[0] > 0.2


def test_circle_quadrature_examples():
    for r in (0.5, 1.0, 2.0):
        c = GeodesicCircle(HalfPlanePoint(0, 1), r)
        prim = lambda x, y: (1.0 / y, np.zeros_like(y))
        assert circle_quadrature(c, prim) == pytest.approx(disk_area(r), rel=1e-12)
        assert circle_quadrature(c, prim, reverse=True) == pytest.approx(-disk_area(r), rel=1e-12)
        assert abs(circle_quadrature(c, lambda x, y: (np.ones_like(x), np.zeros_like(x)))) < 1e-12
    assert circle_quadrature(GeodesicCircle(HalfPlanePoint(0, 1), 1.0), prim) == pytest.approx(3.4123, abs=1e-4)


def test_circle_line_integral_length():
    c = GeodesicCircle(HalfPlanePoint(1, 0.3), 1.7)
    assert circle_line_integral(c, lambda x, y: np.ones_like(x)) == pytest.approx(circle_length(1.7), rel=1e-14)
