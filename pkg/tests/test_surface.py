import itertools
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from magflow.hyp import GeodesicCircle, GeometryError, HalfPlanePoint, circle_quadrature, dist, hyp_distance, mobius
from magflow.surface import (
    BASE_AREA,
    Bump,
    InvariantOneForm,
    InvariantScalar,
    bump_profile,
    constant_scalar,
    enumerate_group_ball,
    swirl_potential_profile,
)


def interior_points(group, n, shrink=0.95):
    x, y = group.sample_domain(n)
    # pull toward the center so points are strictly interior
    from magflow.hyp import point_to_polar, polar_to_point

    rho, phi = point_to_polar(group.base_point, x, y)
    return polar_to_point(group.base_point, shrink * rho, phi)


def test_octagon_invariants(group):
    assert group.relator_residual() < 1e-8
    assert len(group.relator) == 8
    assert group.area_polar() == pytest.approx(4 * math.pi, abs=1e-6)
    x, y, w = group.domain_nodes()
    assert float(np.sum(w)) == pytest.approx(4 * math.pi, abs=1e-6)
    assert 6 * math.pi - 8 * math.pi / 4 == pytest.approx(BASE_AREA)
    assert group.inradius == pytest.approx(math.acosh(1 / math.tan(math.pi / 8)), rel=1e-12)
    assert group.circumradius == pytest.approx(math.acosh(3 + 2 * math.sqrt(2)), rel=1e-10)


def test_generators_pair_up(group):
    G = group.gen_matrices
    for j in range(8):
        prod = G[j] @ G[group.inverse_index(j)]
        assert np.allclose(prod * np.sign(prod[0, 0]), np.eye(2), atol=1e-12)


def test_generator_translates_are_disjoint(group):
    x, y = interior_points(group, 400)
    assert group.in_domain(x, y).all()
    for g in group.generators:
        gx, gy = g.act(x, y)
        assert not group.in_domain(gx, gy, tol=-1e-9).any()


def test_group_ball_examples(group):
    assert len(enumerate_group_ball(group, 0.0)) == 1
    gen_disp = min(hyp_distance(group.base_point, g(group.base_point)) for g in group.generators)
    assert gen_disp == pytest.approx(2 * group.inradius)
    assert len(enumerate_group_ball(group, gen_disp - 1e-6)) == 1
    assert len(enumerate_group_ball(group, gen_disp + 1e-6)) == 9


def _brute_force(group, R, max_len):
    bx, by = group.base_point
    mats = [np.eye(2)]
    frontier = [np.eye(2)]
    for _ in range(max_len):
        nxt = [m @ g for m in frontier for g in group.gen_matrices]
        mats += nxt
        frontier = nxt
    mats = np.array(mats)
    ox, oy = mobius(mats, bx, by)
    d = dist(ox, oy, bx, by)
    keep = d <= R
    pts = {(round(float(a), 7), round(float(b), 7)) for a, b in zip(ox[keep], oy[keep])}
    return pts


def test_group_ball_matches_word_enumeration(group):
    R = 6.0
    ball = enumerate_group_ball(group, R)
    ox, oy = ball.orbit(group.base_point)
    mine = {(round(float(a), 7), round(float(b), 7)) for a, b in zip(ox, oy)}
    assert mine == _brute_force(group, R, 4)
    assert len(ball) == 97


def test_group_ball_closure(group):
    small = enumerate_group_ball(group, 5.0)
    big = enumerate_group_ball(group, 7.0)
    assert len(big) % 2 == 1 and len(small) % 2 == 1
    assert np.allclose(big.matrices[0], np.eye(2))
    bx, by = group.base_point
    ox, oy = mobius(big.matrices, bx, by)
    key = {(round(float(a), 8), round(float(b), 8)) for a, b in zip(ox, oy)}
    inv = np.array([[[m[1, 1], -m[0, 1]], [-m[1, 0], m[0, 0]]] for m in big.matrices])
    ix, iy = mobius(inv, bx, by)
    assert all((round(float(a), 8), round(float(b), 8)) in key for a, b in zip(ix, iy))
    sx, sy = mobius(small.matrices, bx, by)
    assert all((round(float(a), 8), round(float(b), 8)) in key for a, b in zip(sx, sy))


def test_group_ball_cap(group):
    from magflow.surface import GroupError

    with pytest.raises(GroupError):
        enumerate_group_ball(group, 8.0, cap=100)


def test_reduce_point_examples(group):
    p = HalfPlanePoint(0.1, 1.2)
    q, word = group.reduce_point(p)
    assert word == [] and (q.x, q.y) == (p.x, p.y)
    for j, g in enumerate(group.generators):
        q, word = group.reduce_point(g(p))
        assert word == [j]
        assert hyp_distance(q, p) < 1e-9


@given(st.floats(-4, 4), st.floats(-4, 4))
def test_reduce_round_trip(x, logy):
    from magflow.surface import default_group

    group = default_group()
    p = HalfPlanePoint(x, math.exp(logy))
    q, word = group.reduce_point(p)
    assert group.in_domain(q.x, q.y, tol=1e-9)
    back = group.word_matrix(word)(q)
    assert hyp_distance(back, p) < 1e-8
    q2, w2 = group.reduce_point(q)
    assert w2 == [] and hyp_distance(q2, q) == 0


def test_reduce_is_lift_invariant(group):
    ball = enumerate_group_ball(group, 6.0)
    rng = np.random.default_rng(3)
    x, y = interior_points(group, 50)
    for k in range(50):
        m = ball.elements[rng.integers(len(ball))]
        p = HalfPlanePoint(float(x[k]), float(y[k]))
        q1, _ = group.reduce_point(p)
        q2, _ = group.reduce_point(m(q1))
        assert hyp_distance(q1, q2) < 1e-9


def test_vectorized_reduction_agrees(group):
    rng = np.random.default_rng(5)
    x, y = rng.uniform(-2, 2, 200), np.exp(rng.uniform(-2, 2, 200))
    xr, yr, W = group.reduce_points(x, y, track=True)
    bx, by = mobius(W, xr, yr)
    assert np.max(dist(bx, by, x, y)) < 1e-9
    assert group.in_domain(xr, yr, tol=1e-9).all()


def test_injectivity_radius(group):
    assert group.injectivity_radius(group.base_point) == pytest.approx(group.inradius, rel=1e-9)
    with pytest.raises(GeometryError):
        InvariantScalar(group, 0.0, [Bump(group.base_point, 1.0, 1.6)])
    with pytest.raises(GeometryError):
        InvariantScalar(group, 0.0, [Bump(group.base_point, 1.0, 0.0)])


def test_constant_scalar():
    s = constant_scalar(0.7)
    ev = s.evaluate(np.array([0.1, 3.0]), np.array([0.5, 2.0]))
    assert np.all(ev.value == 0.7) and np.all(ev.grad_x == 0) and np.all(ev.laplacian == 0)


def test_bump_at_center(group):
    s = InvariantScalar(group, 0.0, [Bump(HalfPlanePoint(0.2, 1.1), 0.4, 0.8)])
    ev = s.evaluate(0.2, 1.1)
    assert float(ev.value) == pytest.approx(0.4, rel=1e-14)
    assert abs(float(ev.grad_x)) < 1e-14 and abs(float(ev.grad_y)) < 1e-14


@pytest.mark.parametrize("name", ["u_bump", "off_bump"])
def test_scalar_invariance(group, name, request):
    s = request.getfixturevalue(name)
    x, y = interior_points(group, 100, shrink=1.0)
    v0 = s.value(x, y)
    for g in group.generators:
        gx, gy = g.act(x, y)
        assert np.max(np.abs(s.value(gx, gy) - v0)) < 1e-10


@pytest.mark.parametrize("name", ["u_bump", "off_bump"])
def test_scalar_derivatives_vs_finite_differences(group, name, request):
    s = request.getfixturevalue(name)
    rng = np.random.default_rng(11)
    pts = np.column_stack([rng.uniform(-1.5, 1.5, 20), np.exp(rng.uniform(-1.2, 1.2, 20))])
    h = 1e-4
    for x, y in pts:
        ev = s.evaluate(x, y)
        f = lambda a, b: float(s.value(a, b))
        fx = (f(x + h, y) - f(x - h, y)) / (2 * h)
        fy = (f(x, y + h) - f(x, y - h)) / (2 * h)
        lap = y * y * (f(x + h, y) + f(x - h, y) + f(x, y + h) + f(x, y - h) - 4 * f(x, y)) / h**2
        scale = 1.0 + abs(fx) + abs(fy)
        assert abs(float(ev.grad_x) - fx) < 1e-5 * scale
        assert abs(float(ev.grad_y) - fy) < 1e-5 * scale
        assert abs(float(ev.laplacian) - lap) < 1e-5 * (1.0 + abs(lap)) * max(1.0, y * y)


def test_scalar_integral_and_centering(group, off_bump):
    x, y, w = group.domain_nodes(32, 4, 2)
    quad = float(np.sum(w * off_bump.value(x, y)))
    assert off_bump.integral() == pytest.approx(quad, rel=1e-8)
    c = off_bump.centered()
    assert abs(c.integral()) < 1e-13
    assert abs(float(np.sum(w * c.value(x, y)))) < 1e-8


def test_oneform_zero(group):
    f = InvariantOneForm(group)
    bx, by = f.components(np.array([0.1, 1.0]), np.array([1.0, 2.0]))
    assert np.all(bx == 0) and np.all(by == 0)


def test_oneform_invariance(group, beta_bump):
    x, y = interior_points(group, 100, shrink=1.0)
    bx, by = beta_bump.components(x, y)
    for g in group.generators:
        gx, gy = g.act(x, y)
        cx, cy = beta_bump.components(gx, gy)
        # pull back through dg = 1/(cz+d)^2
        jac = 1.0 / (g.c * (x + 1j * y) + g.d) ** 2
        pb = (cx - 1j * cy) * jac
        assert np.max(np.abs(pb.real - bx)) < 1e-10
        assert np.max(np.abs(-pb.imag - by)) < 1e-10


def test_oneform_linear_in_tangent(group, beta_bump):
    v1 = beta_bump.evaluate(0.3, 1.0, 1.0, 0.0)
    v2 = beta_bump.evaluate(0.3, 1.0, 0.0, 1.0)
    assert beta_bump.evaluate(0.3, 1.0, 2.0, -3.0) == pytest.approx(2 * v1 - 3 * v2, rel=1e-13)


def test_oneform_density_is_exterior_derivative(group, beta_bump):
    dens = beta_bump.density()
    rng = np.random.default_rng(2)
    h = 1e-5
    for x, y in zip(rng.uniform(-0.5, 0.8, 15), rng.uniform(0.6, 1.7, 15)):
        byx = (beta_bump.components(x + h, y)[1] - beta_bump.components(x - h, y)[1]) / (2 * h)
        bxy = (beta_bump.components(x, y + h)[0] - beta_bump.components(x, y - h)[0]) / (2 * h)
        curl = y * y * (byx - bxy)
        assert float(dens.value(x, y)) == pytest.approx(float(curl), abs=1e-6)


def test_single_swirl_circle_integral(group):
    c = HalfPlanePoint(0.2, 1.1)
    f = InvariantOneForm(group, [Bump(c, 0.3, 0.8)])
    prof = swirl_potential_profile(0.8)
    for rho in (0.2, 0.5, 0.79):
        val = circle_quadrature(GeodesicCircle(c, rho), f.components, order=512)
        assert val == pytest.approx(2 * math.pi * 0.3 * float(prof.value(rho)), rel=1e-10)


def test_exact_form_has_zero_total_flux(group, beta_bump):
    x, y, w = group.domain_nodes(32, 4, 2)
    total = float(np.sum(w * beta_bump.density().value(x, y)))
    assert abs(total) < 1e-6
    assert abs(beta_bump.density().integral()) < 1e-12


def test_bump_profile_integral():
    prof = bump_profile(1.0)
    from scipy.integrate import quad

    ref, _ = quad(lambda r: 2 * math.pi * (1 - r * r) ** 4 * math.sinh(r), 0, 1, epsabs=0, epsrel=1e-13)
    assert prof.integral() == pytest.approx(ref, rel=1e-12)
