"""The genus-2 surface M = H^2 / Gamma built from the regular octagon.

The octagon is centered at i with vertex angles pi/4; opposite sides are
paired by hyperbolic translations through the center. Everything that has
to be exactly Gamma-invariant (conformal factors, test densities, the exact
part of the magnetic field) is a finite sum of compactly supported radial
bumps over group translates, so no series truncation enters.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy.optimize import brentq
from scipy.stats import qmc

from .hyp import (
    BASE_POINT,
    GeometryError,
    HalfPlanePoint,
    Isometry,
    composite_gauss,
    dist,
    mobius,
    point_to_polar,
    polar_to_point,
    renormalize,
    rotation,
    translation_up,
)

GENUS = 2
EULER_CHAR = 2 - 2 * GENUS
BASE_AREA = -2.0 * math.pi * EULER_CHAR  # 4 pi
RELATOR_TOL = 1e-8
BALL_CAP = 1_000_000
REDUCE_MAX_ITER = 10_000


class GroupError(RuntimeError):
    pass


def _vertex_angle(circumradius: float, n: int = 8) -> float:
    # isosceles triangle (center, v_k, v_k+1): apex angle 2pi/n, legs = circumradius
    R = circumradius
    cosh_side = math.cosh(R) ** 2 - math.sinh(R) ** 2 * math.cos(2 * math.pi / n)
    side = math.acosh(cosh_side)
    # base angle by the hyperbolic law of cosines
    cos_b = (math.cosh(R) * math.cosh(side) - math.cosh(R)) / (math.sinh(R) * math.sinh(side))
    return 2.0 * math.acos(min(1.0, cos_b))


def octagon_circumradius(angle: float = math.pi / 4) -> float:
    """Circumradius of the regular hyperbolic octagon with the given vertex angle."""
    return brentq(lambda R: _vertex_angle(R) - angle, 0.1, 10.0, xtol=1e-15, rtol=1e-15)


def _polar_from_matrices(m, base):
    # polar coordinates of m(base) about base, read off the matrix entries.
    # Evaluating the Mobius map near the boundary loses digits; the entries don't.
    bx, by = base
    sy = math.sqrt(by)
    A = np.array([[sy, bx / sy], [0.0, 1.0 / sy]])
    Ai = np.array([[1.0 / sy, -bx / sy], [0.0, sy]])
    k = Ai @ m @ A
    a, b, c, d = k[..., 0, 0], k[..., 0, 1], k[..., 1, 0], k[..., 1, 1]
    cosh_rho = 0.5 * (a * a + b * b + c * c + d * d)
    rho = np.arccosh(np.maximum(cosh_rho, 1.0))
    phi = np.angle((b + c) + 1j * (a - d)) - np.angle((b - c) + 1j * (a + d))
    return rho, phi


def _key(m, base):
    # geodesic polar position on a 1e-3 grid (radius, arclength), frame rotated
    # off the branch cut of the angle. Orbit points are ~3 apart, so the coarse
    # grid is safe; a fine one fails because sinh(rho) amplifies radius error.
    rho, phi = _polar_from_matrices(m, base)
    phi = np.angle(np.exp(1j * (phi + 0.5123456789)))
    return np.rint(rho * 1e3).astype(np.int64), np.rint(phi * np.sinh(rho) * 1e3).astype(np.int64)


@dataclass(frozen=True)
class GroupBall:
    radius: float
    matrices: np.ndarray  # (n, 2, 2), identity first
    displacements: np.ndarray  # distance from base point to its image

    def __len__(self):
        return len(self.matrices)

    @property
    def elements(self) -> list[Isometry]:
        return [Isometry.from_matrix(m) for m in self.matrices]

    def orbit(self, p: HalfPlanePoint):
        return mobius(self.matrices, p.x, p.y)


@dataclass(frozen=True, eq=False)
class SurfaceGroup:
    """Side pairings of the regular octagon. ``generators[j]`` maps the octagon
    across side j; ``generators[(j + 4) % 8]`` is its inverse."""

    generators: tuple[Isometry, ...]
    relator: tuple[int, ...]
    base_point: HalfPlanePoint
    inradius: float
    circumradius: float

    @cached_property
    def gen_matrices(self) -> np.ndarray:
        return np.stack([g.matrix for g in self.generators])

    @staticmethod
    def inverse_index(j: int) -> int:
        return (j + 4) % 8

    @property
    def covering_radius(self) -> float:
        """Every point of M lies within this distance of the base point."""
        return self.circumradius

    @property
    def side_directions(self) -> np.ndarray:
        return np.arange(8) * (math.pi / 4)

    def vertices(self):
        phi = self.side_directions + math.pi / 8
        return polar_to_point(self.base_point, np.full(8, self.circumradius), phi)

    def relator_residual(self) -> float:
        m = np.eye(2)
        for j in self.relator:
            m = m @ self.gen_matrices[j]
        m = m * np.sign(m[0, 0])
        return float(np.max(np.abs(m - np.eye(2))))

    def in_domain(self, x, y, tol: float = 1e-12):
        """Closed Dirichlet domain of the base point (the octagon itself)."""
        d0 = dist(x, y, self.base_point.x, self.base_point.y)
        ok = np.ones(np.shape(d0), dtype=bool)
        for g in self.generators:
            gx, gy = g.act(self.base_point.x, self.base_point.y)
            ok &= d0 <= dist(x, y, gx, gy) + tol
        return ok

    def boundary_radius(self, delta):
        """Distance from the center to the octagon boundary at angle delta off a side normal."""
        delta = np.mod(np.asarray(delta) + math.pi / 8, math.pi / 4) - math.pi / 8
        return np.arctanh(math.tanh(self.inradius) / np.cos(delta))

    def area_polar(self, order: int = 64) -> float:
        """Octagon area by radial integration, 8 * int (cosh rho_max - 1) d delta."""
        d, w = composite_gauss(-math.pi / 8, math.pi / 8, order)
        return float(8.0 * np.sum(w * (np.cosh(self.boundary_radius(d)) - 1.0)))

    def domain_nodes(self, order: int = 32, rho_panels: int = 2, delta_panels: int = 1, rho_breaks=()):
        """Quadrature nodes/weights over the octagon against mu0.

        Eight sectors around the center; in each, Gauss-Legendre in the
        angle and in the radius up to the boundary. ``rho_breaks`` are radii
        (about the center) where the integrand has a kink.
        """
        d, wd = composite_gauss(-math.pi / 8, math.pi / 8, order, delta_panels)
        rmax = self.boundary_radius(d)
        xs, ys, ws = [], [], []
        for k, di in enumerate(d):
            rho, wr = composite_gauss(0.0, rmax[k], order, rho_panels, rho_breaks)
            ang = np.broadcast_to(di + self.side_directions[:, None], (8, rho.size))
            x, y = polar_to_point(self.base_point, np.broadcast_to(rho, ang.shape), ang)
            xs.append(x.ravel())
            ys.append(y.ravel())
            ws.append(np.broadcast_to(wd[k] * wr * np.sinh(rho), ang.shape).ravel())
        return np.concatenate(xs), np.concatenate(ys), np.concatenate(ws)

    def sample_domain(self, n: int):
        """Deterministic low-discrepancy sample of the octagon (area-uniform per sector)."""
        u = qmc.Halton(d=2, scramble=False).random(n + 1)[1:]
        sector = np.floor(u[:, 0] * 8)
        delta = (u[:, 0] * 8 - sector - 0.5) * (math.pi / 4)
        rmax = self.boundary_radius(delta)
        # invert the radial area profile cosh(rho) - 1 on [0, rmax]
        rho = np.arccosh(1.0 + u[:, 1] * (np.cosh(rmax) - 1.0))
        return polar_to_point(self.base_point, rho, delta + sector * (math.pi / 4))

    def reduce_points(self, x, y, track: bool = False):
        """Vectorized greedy reduction into the octagon.

        Returns reduced coordinates and, if ``track``, the stack of matrices W
        with W . reduced = original.
        """
        x = np.array(x, dtype=float, copy=True).ravel()
        y = np.array(y, dtype=float, copy=True).ravel()
        bx, by = self.base_point
        W = np.broadcast_to(np.eye(2), (x.size, 2, 2)).copy() if track else None
        G = self.gen_matrices
        active = np.arange(x.size)
        for _ in range(REDUCE_MAX_ITER):
            if active.size == 0:
                break
            xa, ya = x[active], y[active]
            d0 = dist(xa, ya, bx, by)
            cx, cy = mobius(G[:, None], xa[None], ya[None])
            dc = dist(cx, cy, bx, by)
            j = np.argmin(dc, axis=0)
            cols = np.arange(active.size)
            move = dc[j, cols] < d0 - 1e-12 * (1.0 + d0)
            if not move.any():
                break
            idx, jm = active[move], j[move]
            x[idx], y[idx] = cx[jm, cols[move]], cy[jm, cols[move]]
            if track:
                W[idx] = renormalize(W[idx] @ G[(jm + 4) % 8])
            active = idx
        else:
            raise GroupError("point reduction did not terminate")
        return (x, y, W) if track else (x, y)

    def reduce_point(self, p: HalfPlanePoint):
        """Reduce p into the closed octagon.

        Returns ``(q, word)`` where ``word`` is the list of generator indices
        with ``g_{w0} g_{w1} ... q = p``.
        """
        x, y = p.x, p.y
        word = []
        bx, by = self.base_point
        for _ in range(REDUCE_MAX_ITER):
            d0 = float(dist(x, y, bx, by))
            cx, cy = mobius(self.gen_matrices, x, y)
            dc = dist(cx, cy, bx, by)
            j = int(np.argmin(dc))
            if not dc[j] < d0 - 1e-12 * (1.0 + d0):
                return HalfPlanePoint(float(x), float(y)), word
            x, y = cx[j], cy[j]
            word.append(self.inverse_index(j))
        raise GroupError("point reduction did not terminate")

    def word_matrix(self, word) -> Isometry:
        m = np.eye(2)
        for j in word:
            m = m @ self.gen_matrices[j]
        return Isometry.from_matrix(renormalize(m))

    def injectivity_radius(self, p: HalfPlanePoint) -> float:
        q, _ = self.reduce_point(p)
        d = float(dist(q.x, q.y, *self.base_point))
        ball = enumerate_group_ball(self, 4.0 * d + 2.0 * self.inradius + 1e-9)
        xs, ys = ball.orbit(q)
        return 0.5 * float(np.min(dist(xs[1:], ys[1:], q.x, q.y)))


def _relator_from_vertex(gens: np.ndarray, vx, vy) -> tuple[int, ...]:
    """Walk the tiles around vertex 0 and record the crossed side pairings."""
    P = (vx[0], vy[0])
    W = np.eye(2)
    entered = 1  # start as if we came into F through side 1
    word = []
    for _ in range(16):
        ix, iy = mobius(np.linalg.inv(W), *P)
        k = int(np.argmin(dist(vx, vy, ix, iy)))
        sides = (k, (k + 1) % 8)  # vertex k sits between sides k and k+1
        exit_side = sides[1] if sides[0] == entered else sides[0]
        word.append(exit_side)
        W = W @ gens[exit_side]
        entered = (exit_side + 4) % 8
        Wn = W * np.sign(W[0, 0]) if W[0, 0] != 0 else W
        if np.max(np.abs(Wn - np.eye(2))) < 1e-6:
            return tuple(word)
    raise GroupError("vertex cycle did not close")


def build_genus2_group() -> SurfaceGroup:
    R = octagon_circumradius(math.pi / 4)
    # right triangle (center, side midpoint, vertex) with angles pi/8, pi/8
    r_in = math.acosh(math.cos(math.pi / 8) / math.sin(math.pi / 8))
    vx, vy = polar_to_point(BASE_POINT, np.full(8, R), np.arange(8) * math.pi / 4 + math.pi / 8)
    # the computed vertices must lie on the side geodesics at distance r_in
    check = math.atanh(math.tanh(r_in) / math.cos(math.pi / 8))
    if abs(check - R) > 1e-10:
        raise GroupError(f"octagon geometry inconsistent: residual {abs(check - R):.3e}")
    gens = []
    for j in range(8):
        rj = rotation(j * math.pi / 4)
        m = rj @ translation_up(2.0 * r_in) @ np.linalg.inv(rj)
        gens.append(renormalize(m))
    gens = np.stack(gens)
    relator = _relator_from_vertex(gens, vx, vy)
    group = SurfaceGroup(
        generators=tuple(Isometry.from_matrix(g) for g in gens),
        relator=relator,
        base_point=BASE_POINT,
        inradius=r_in,
        circumradius=R,
    )
    res = group.relator_residual()
    if not (len(relator) == 8 and res < RELATOR_TOL):
        raise GroupError(f"relator residual {res:.3e} above tolerance (length {len(relator)})")
    return group


_DEFAULT_GROUP: SurfaceGroup | None = None


def default_group() -> SurfaceGroup:
    global _DEFAULT_GROUP
    if _DEFAULT_GROUP is None:
        _DEFAULT_GROUP = build_genus2_group()
    return _DEFAULT_GROUP


def enumerate_group_ball(group: SurfaceGroup, R: float, cap: int = BALL_CAP) -> GroupBall:
    """All gamma with d(o, gamma o) <= R, by breadth-first search over tiles.

    A tile gamma F lying on the geodesic from o to gamma' o is within
    d(o, gamma' o) + covering radius of o, so exploring only tiles with
    displacement <= R + covering radius reaches every element of the ball
    through side-adjacent tiles.
    """
    if R < 0:
        raise GeometryError(f"ball radius must be nonnegative, got {R}")
    explore = R + group.covering_radius + 1e-6
    bx, by = group.base_point
    G = group.gen_matrices
    seen = set()
    k0 = _key(np.eye(2), (bx, by))
    seen.add((int(k0[0]), int(k0[1])))
    mats = [np.eye(2)[None]]
    frontier = np.eye(2)[None]
    total = 1
    while frontier.size:
        cand = renormalize((frontier[:, None] @ G[None]).reshape(-1, 2, 2))
        rho, _ = _polar_from_matrices(cand, (bx, by))
        cand = cand[rho <= explore]
        kr, kp = _key(cand, (bx, by))
        new = []
        for i in range(len(cand)):
            a, b = int(kr[i]), int(kp[i])
            if (a, b) in seen:
                continue
            if any((a + da, b + db) in seen for da in (-1, 0, 1) for db in (-1, 0, 1)):
                continue
            seen.add((a, b))
            new.append(i)
        frontier = cand[new]
        if len(frontier):
            mats.append(frontier)
            total += len(frontier)
            if total > cap:
                raise GroupError(f"group ball exceeds cap of {cap} elements at radius {R}")
    allm = np.concatenate(mats)
    disp, _ = _polar_from_matrices(allm, (bx, by))
    inside = disp <= R + 1e-12
    order = np.argsort(disp[inside], kind="stable")
    return GroupBall(radius=R, matrices=allm[inside][order], displacements=disp[inside][order])


# --------------------------------------------------------------------------
# radial profiles


def _sinc_series(rho):
    # rho/sinh(rho) and its first two derivatives, Taylor through rho^8
    r2 = rho * rho
    c = (1.0, -1.0 / 6, 7.0 / 360, -31.0 / 15120, 127.0 / 604800)
    s = c[0] + r2 * (c[1] + r2 * (c[2] + r2 * (c[3] + r2 * c[4])))
    s1 = rho * (2 * c[1] + r2 * (4 * c[2] + r2 * (6 * c[3] + r2 * 8 * c[4])))
    s2 = 2 * c[1] + r2 * (12 * c[2] + r2 * (30 * c[3] + r2 * 56 * c[4]))
    return s, s1, s2


def sinc_parts(rho):
    rho = np.asarray(rho, dtype=float)
    small = rho < 0.05
    r = np.where(small, 1.0, rho)
    S, C = np.sinh(r), np.cosh(r)
    s = r / S
    s1 = 1.0 / S - r * C / S**2
    s2 = -2.0 * C / S**2 - r / S + 2.0 * r * C**2 / S**3
    ss, ss1, ss2 = _sinc_series(np.where(small, rho, 0.0))
    return np.where(small, ss, s), np.where(small, ss1, s1), np.where(small, ss2, s2)


@dataclass(frozen=True)
class RadialProfile:
    """F(rho) = p(tau) * (rho / sinh rho)**k, tau = (rho/R)^2, zero for rho >= R.

    ``p`` is given by polynomial coefficients in tau (lowest degree first).
    """

    coeffs: tuple[float, ...]
    support: float
    sinc_power: int = 0

    def _poly(self, rho):
        P = np.polynomial.Polynomial(self.coeffs)
        tau = (np.asarray(rho, dtype=float) / self.support) ** 2
        inside = tau < 1.0
        return tau, inside, P(tau), P.deriv(1)(tau), P.deriv(2)(tau)

    def value(self, rho):
        tau, inside, p, _, _ = self._poly(rho)
        if self.sinc_power:
            p = p * sinc_parts(rho)[0]
        return np.where(inside, p, 0.0)

    def derivs(self, rho):
        """(F, F'/sinh rho, Laplacian F'' + coth(rho) F')."""
        rho = np.asarray(rho, dtype=float)
        tau, inside, p, p1, p2 = self._poly(rho)
        R2 = self.support**2
        cosh = np.cosh(rho)
        if self.sinc_power == 0:
            s0 = sinc_parts(rho)[0]
            F = p
            d1s = p1 * (2.0 / R2) * s0
            F2 = p2 * (2.0 * rho / R2) ** 2 + p1 * (2.0 / R2)
        else:
            s, s1, s2 = sinc_parts(rho)
            sinh = np.where(rho > 0, np.sinh(rho), 1.0)
            s1_over_sinh = np.where(rho > 0, s1 / sinh, -1.0 / 3.0)
            F = p * s
            d1s = p1 * (2.0 / R2) * s * s + p * s1_over_sinh
            F2 = p2 * (2.0 * rho / R2) ** 2 * s + p1 * (2.0 / R2) * s + 2.0 * p1 * (2.0 * rho / R2) * s1 + p * s2
        lap = F2 + cosh * d1s
        zero = np.zeros_like(rho)
        return np.where(inside, F, zero), np.where(inside, d1s, zero), np.where(inside, lap, zero)

    def integral(self, order: int = 64) -> float:
        """Integral over H^2 of the profile against mu0."""
        rho, w = composite_gauss(0.0, self.support, order)
        return float(2.0 * math.pi * np.sum(w * self.value(rho) * np.sinh(rho)))


def bump_profile(support: float) -> RadialProfile:
    """(1 - (rho/R)^2)^4."""
    return RadialProfile((1.0, -4.0, 6.0, -4.0, 1.0), support)


def swirl_potential_profile(support: float) -> RadialProfile:
    """A(rho) = tau (1 - tau)^4: coefficient of d(phi) in a rotational bump."""
    return RadialProfile((0.0, 1.0, -4.0, 6.0, -4.0, 1.0), support)


def swirl_density_profile(support: float) -> RadialProfile:
    """A'(rho)/sinh(rho) for the rotational bump, i.e. d(A dphi) / mu0."""
    # (2/R^2) [(1 - tau)^4 - 4 tau (1 - tau)^3] * rho/sinh(rho)
    q = np.polynomial.Polynomial((1.0, -4.0, 6.0, -4.0, 1.0)) - 4.0 * np.polynomial.Polynomial(
        (0.0, 1.0, -3.0, 3.0, -1.0)
    )
    return RadialProfile(tuple(2.0 / support**2 * q.coef), support, sinc_power=1)


# --------------------------------------------------------------------------
# invariant objects


@dataclass(frozen=True)
class Bump:
    center: HalfPlanePoint
    amplitude: float
    support_radius: float


def _grad_w(x, y, cx, cy):
    """Chart gradient of cosh d(z, c) with respect to z = (x, y)."""
    dx, dy = x - cx, y - cy
    wx = dx / (y * cy)
    wy = dy / (y * cy) - (dx * dx + dy * dy) / (2.0 * y * y * cy)
    return wx, wy


class _TranslateSum:
    """Shared machinery: for each bump, the translates that can reach the octagon."""

    CHUNK = 20000

    def __init__(self, group: SurfaceGroup, bumps, kind: str):
        self.group = group
        self.bumps = tuple(bumps)
        cx, cy, amp, rad = [], [], [], []
        for b in self.bumps:
            if not b.support_radius > 0:
                raise GeometryError("bump support radius must be positive")
            inj = group.injectivity_radius(b.center)
            if not b.support_radius < inj:
                raise GeometryError(
                    f"bump support {b.support_radius} not below injectivity radius {inj:.6f} at {b.center}"
                )
            q, _ = group.reduce_point(b.center)
            reach = float(dist(q.x, q.y, *group.base_point))
            ball = enumerate_group_ball(group, reach + group.covering_radius + b.support_radius + 1e-6)
            ox, oy = ball.orbit(q)
            near = dist(ox, oy, *group.base_point) <= group.covering_radius + b.support_radius + 1e-6
            cx.append(ox[near])
            cy.append(oy[near])
            amp.append(np.full(near.sum(), b.amplitude))
            rad.append(np.full(near.sum(), b.support_radius))
        cat = (lambda v: np.concatenate(v)) if self.bumps else (lambda v: np.zeros(0))
        self.cx, self.cy, self.amp, self.rad = cat(cx), cat(cy), cat(amp), cat(rad)
        self.kind = kind

    def _reduced(self, x, y):
        shape = np.shape(np.broadcast_arrays(x, y)[0])
        xb, yb = np.broadcast_arrays(np.asarray(x, float), np.asarray(y, float))
        xr, yr, W = self.group.reduce_points(xb, yb, track=True)
        # holomorphic derivative of z -> W^{-1} z at the original points
        z = xb.ravel() + 1j * yb.ravel()
        jac = 1.0 / (-W[:, 1, 0] * z + W[:, 0, 0]) ** 2
        return shape, xr, yr, jac


@dataclass(frozen=True)
class ScalarEval:
    value: np.ndarray
    grad_x: np.ndarray
    grad_y: np.ndarray
    laplacian: np.ndarray  # hyperbolic Laplacian y^2 (d_xx + d_yy)


class InvariantScalar(_TranslateSum):
    """constant + sum over bumps and their Gamma-translates of amplitude * profile(d)."""

    def __init__(self, group: SurfaceGroup, constant: float = 0.0, bumps=(), profile: str = "bump"):
        super().__init__(group, bumps, profile)
        self.constant = float(constant)
        self.profile = profile

    def _profiles(self):
        make = {"bump": bump_profile, "swirl_density": swirl_density_profile}[self.profile]
        return {r: make(r) for r in np.unique(self.rad)}

    @property
    def is_constant(self) -> bool:
        return not any(b.amplitude != 0 for b in self.bumps)

    def evaluate(self, x, y, derivatives: bool = True) -> ScalarEval:
        shape, xr, yr, jac = self._reduced(x, y) if not self.is_constant else (np.shape(np.broadcast_arrays(x, y)[0]), None, None, None)
        n = int(np.prod(shape)) if shape else 1
        val = np.full(n, self.constant)
        gx = np.zeros(n)
        gy = np.zeros(n)
        lap = np.zeros(n)
        if not self.is_constant:
            profs = self._profiles()
            for s in range(0, n, self.CHUNK):
                sl = slice(s, s + self.CHUNK)
                px, py = xr[sl, None], yr[sl, None]
                d = dist(px, py, self.cx[None], self.cy[None])
                for R, prof in profs.items():
                    m = self.rad == R
                    F, d1s, L = prof.derivs(d[:, m])
                    A = self.amp[m][None]
                    val[sl] += np.sum(A * F, axis=1)
                    if derivatives:
                        wx, wy = _grad_w(px, py, self.cx[None, m], self.cy[None, m])
                        gx[sl] += np.sum(A * d1s * wx, axis=1)
                        gy[sl] += np.sum(A * d1s * wy, axis=1)
                        lap[sl] += np.sum(A * L, axis=1)
            # gradient transforms as a (1,0)-form under z -> W^{-1} z
            g = (gx - 1j * gy) * jac
            gx, gy = g.real, -g.imag
        r = lambda a: a.reshape(shape)
        return ScalarEval(r(val), r(gx), r(gy), r(lap))

    def value(self, x, y):
        return self.evaluate(x, y, derivatives=False).value

    def __call__(self, x, y):
        return self.value(x, y)

    def integral(self) -> float:
        """Integral over M against mu0 (exact profile integrals, no domain quadrature)."""
        make = {"bump": bump_profile, "swirl_density": swirl_density_profile}[self.profile]
        return self.constant * BASE_AREA + sum(b.amplitude * make(b.support_radius).integral() for b in self.bumps)

    def centered(self) -> "InvariantScalar":
        """Same bumps, constant shifted so the mean over M is zero."""
        shift = self.integral() / BASE_AREA
        return InvariantScalar(self.group, self.constant - shift, self.bumps, self.profile)

    def scaled(self, factor: float) -> "InvariantScalar":
        return InvariantScalar(
            self.group,
            factor * self.constant,
            [Bump(b.center, factor * b.amplitude, b.support_radius) for b in self.bumps],
            self.profile,
        )


class InvariantOneForm(_TranslateSum):
    """Sum over bumps and translates of the rotational form A(rho) dphi about the center."""

    def __init__(self, group: SurfaceGroup, bumps=()):
        super().__init__(group, bumps, "swirl")

    @property
    def is_zero(self) -> bool:
        return not any(b.amplitude != 0 for b in self.bumps)

    def components(self, x, y):
        """Chart components (b_x, b_y) of the form, b = b_x dx + b_y dy."""
        shape = np.shape(np.broadcast_arrays(x, y)[0])
        n = int(np.prod(shape)) if shape else 1
        bx = np.zeros(n)
        by = np.zeros(n)
        if self.is_zero:
            return bx.reshape(shape), by.reshape(shape)
        shape, xr, yr, jac = self._reduced(x, y)
        pots = {r: swirl_potential_profile(r) for r in np.unique(self.rad)}
        for s in range(0, n, self.CHUNK):
            sl = slice(s, s + self.CHUNK)
            px, py = xr[sl, None], yr[sl, None]
            for R, prof in pots.items():
                m = self.rad == R
                ccx, ccy = self.cx[None, m], self.cy[None, m]
                d = dist(px, py, ccx, ccy)
                A = self.amp[m][None] * prof.value(d)
                w = (px - ccx + 1j * py) / ccy
                den = ccy * (w * w + 1.0)
                with np.errstate(divide="ignore", invalid="ignore"):
                    Q = np.where(A != 0, 2j / den, 0.0)
                # dphi = Im(Q dz) = Q_i dx + Q_r dy
                bx[sl] += np.sum(A * Q.imag, axis=1)
                by[sl] += np.sum(A * Q.real, axis=1)
        b = (bx - 1j * by) * jac
        return b.real.reshape(shape), (-b.imag).reshape(shape)

    def __call__(self, x, y):
        return self.components(x, y)

    def evaluate(self, x, y, vx, vy):
        """Value of the form on the chart tangent vector (vx, vy) at (x, y)."""
        bx, by = self.components(x, y)
        return bx * vx + by * vy

    def density(self) -> InvariantScalar:
        """d(form) / mu0 as an invariant scalar."""
        return InvariantScalar(self.group, 0.0, self.bumps, profile="swirl_density")

    def scaled(self, factor: float) -> "InvariantOneForm":
        return InvariantOneForm(self.group, [Bump(b.center, factor * b.amplitude, b.support_radius) for b in self.bumps])


def constant_scalar(value: float = 0.0, group: SurfaceGroup | None = None) -> InvariantScalar:
    return InvariantScalar(group or default_group(), value)
