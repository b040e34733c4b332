"""Upper half-plane primitives: distances, Möbius isometries, geodesic
circles, and quadrature over geodesic disks and circles.

Points are handled either as :class:`HalfPlanePoint` values or as raw
coordinate arrays ``(x, y)``; every numeric routine here broadcasts over
arrays so quadrature nodes can be evaluated in one call.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np

DET_TOL = 1e-12


class GeometryError(ValueError):
    pass


class QuadratureError(ArithmeticError):
    """Raised when an integrand returns a non-finite value at a node."""

    def __init__(self, message, location=None):
        super().__init__(message)
        self.location = location


@dataclass(frozen=True)
class HalfPlanePoint:
    x: float
    y: float

    def __post_init__(self):
        if not (self.y > 0 and math.isfinite(self.x) and math.isfinite(self.y)):
            raise GeometryError(f"not a point of the upper half-plane: ({self.x}, {self.y})")

    @property
    def z(self) -> complex:
        return complex(self.x, self.y)

    @classmethod
    def from_complex(cls, z: complex) -> "HalfPlanePoint":
        return cls(float(z.real), float(z.imag))

    def __iter__(self):
        yield self.x
        yield self.y


BASE_POINT = HalfPlanePoint(0.0, 1.0)


@dataclass(frozen=True)
class Isometry:
    """Orientation-preserving isometry z -> (az + b)/(cz + d) with ad - bc = 1."""

    a: float
    b: float
    c: float
    d: float

    def __post_init__(self):
        det = self.a * self.d - self.b * self.c
        if not abs(det - 1.0) <= DET_TOL * max(1.0, abs(self.a * self.d), abs(self.b * self.c)):
            raise GeometryError(f"matrix is not unimodular: det - 1 = {det - 1.0:.3e}")

    @classmethod
    def from_matrix(cls, m) -> "Isometry":
        m = np.asarray(m, dtype=float)
        return cls(float(m[0, 0]), float(m[0, 1]), float(m[1, 0]), float(m[1, 1]))

    @classmethod
    def identity(cls) -> "Isometry":
        return cls(1.0, 0.0, 0.0, 1.0)

    @property
    def matrix(self) -> np.ndarray:
        return np.array([[self.a, self.b], [self.c, self.d]])

    def __matmul__(self, other: "Isometry") -> "Isometry":
        return Isometry.from_matrix(renormalize(self.matrix @ other.matrix))

    def inverse(self) -> "Isometry":
        return Isometry(self.d, -self.b, -self.c, self.a)

    def __call__(self, p: HalfPlanePoint) -> HalfPlanePoint:
        return apply_isometry(self, p)

    def act(self, x, y):
        """Vectorized action on coordinate arrays."""
        return mobius(self.matrix, x, y)

    def act_state(self, x, y, theta):
        """Action on a point together with the chart angle of a tangent direction."""
        x2, y2 = mobius(self.matrix, x, y)
        w = self.c * (np.asarray(x) + 1j * np.asarray(y)) + self.d
        return x2, y2, np.mod(theta - 2.0 * np.angle(w), 2.0 * np.pi)


def renormalize(m: np.ndarray) -> np.ndarray:
    """Rescale a 2x2 (or stacked) matrix to determinant one, absorbing round-off."""
    det = m[..., 0, 0] * m[..., 1, 1] - m[..., 0, 1] * m[..., 1, 0]
    return m / np.sqrt(det)[..., None, None]


def mobius(m: np.ndarray, x, y):
    """Apply a real 2x2 matrix (or a stack broadcast against the points) by Möbius action."""
    m = np.asarray(m, dtype=float)
    z = np.asarray(x, dtype=float) + 1j * np.asarray(y, dtype=float)
    w = (m[..., 0, 0] * z + m[..., 0, 1]) / (m[..., 1, 0] * z + m[..., 1, 1])
    return w.real, w.imag


def apply_isometry(m: Isometry, p: HalfPlanePoint) -> HalfPlanePoint:
    x, y = m.act(p.x, p.y)
    return HalfPlanePoint(float(x), float(y))


def dist(x1, y1, x2, y2):
    """Hyperbolic distance between coordinate arrays.

    Uses d = 2 asinh(|p - q| / (2 sqrt(y_p y_q))), algebraically identical to
    the arccosh form but free of cancellation for nearby points.
    """
    chord = np.hypot(np.subtract(x1, x2), np.subtract(y1, y2))
    return 2.0 * np.arcsinh(chord / (2.0 * np.sqrt(np.multiply(y1, y2))))


def hyp_distance(p: HalfPlanePoint, q: HalfPlanePoint) -> float:
    return float(dist(p.x, p.y, q.x, q.y))


def rotation(phi) -> np.ndarray:
    """Rotation about i by angle phi (counterclockwise); stacked if phi is an array."""
    phi = np.asarray(phi, dtype=float)
    c, s = np.cos(phi / 2.0), np.sin(phi / 2.0)
    return np.stack([np.stack([c, s], -1), np.stack([-s, c], -1)], -2)


def translation_up(length) -> np.ndarray:
    """Hyperbolic translation by ``length`` along the imaginary axis (z -> e^length z)."""
    e = math.exp(length / 2.0)
    return np.array([[e, 0.0], [0.0, 1.0 / e]])


def chart_at(p: HalfPlanePoint) -> np.ndarray:
    """The affine isometry z -> y_p z + x_p sending i to p without rotation."""
    s = math.sqrt(p.y)
    return np.array([[s, p.x / s], [0.0, 1.0 / s]])


def polar_to_point(center: HalfPlanePoint, rho, phi):
    """Point at distance ``rho`` from ``center`` in polar direction ``phi``.

    ``phi = 0`` is straight up and increases counterclockwise, so the chart
    angle of the outgoing geodesic is ``phi + pi/2``.
    """
    rho = np.asarray(rho, dtype=float)
    phi = np.asarray(phi, dtype=float)
    # rotate i*e^rho about i, written in closed form to stay vectorized
    t = np.tanh(rho / 2.0)
    zeta = t * np.exp(1j * phi)
    w = 1j * (1.0 + zeta) / (1.0 - zeta)
    return center.x + center.y * w.real, center.y * w.imag


def point_to_polar(center: HalfPlanePoint, x, y):
    """Inverse of :func:`polar_to_point`: returns (rho, phi) about ``center``."""
    w = (np.asarray(x) - center.x + 1j * np.asarray(y)) / center.y
    zeta = (w - 1j) / (w + 1j)
    r = np.minimum(np.abs(zeta), 1.0 - 1e-17)
    return 2.0 * np.arctanh(r), np.angle(zeta)


def geodesic_point(p: HalfPlanePoint, theta: float, length: float) -> HalfPlanePoint:
    """Endpoint of the geodesic of the given length leaving p at chart angle theta."""
    x, y = polar_to_point(p, length, theta - math.pi / 2.0)
    return HalfPlanePoint(float(x), float(y))


@dataclass(frozen=True)
class GeodesicCircle:
    center: HalfPlanePoint
    radius: float

    def __post_init__(self):
        if not self.radius > 0:
            raise GeometryError(f"circle radius must be positive, got {self.radius}")


def _check_radius(r):
    if r < 0:
        raise GeometryError(f"radius must be nonnegative, got {r}")


def circle_length(r: float) -> float:
    _check_radius(r)
    return 2.0 * math.pi * math.sinh(r)


def disk_area(r: float) -> float:
    _check_radius(r)
    return 2.0 * math.pi * (math.cosh(r) - 1.0)


def circle_point(c: GeodesicCircle, t):
    """Point of ``c`` at g0-arclength ``t`` from the top of the circle, counterclockwise.

    Returns a HalfPlanePoint for scalar ``t`` and coordinate arrays otherwise.
    """
    phi = np.mod(np.asarray(t, dtype=float), circle_length(c.radius)) / math.sinh(c.radius)
    x, y = polar_to_point(c.center, c.radius, phi)
    if np.ndim(t) == 0:
        return HalfPlanePoint(float(x), float(y))
    return x, y


def circle_tangent(c: GeodesicCircle, t):
    """Chart velocity (dx/dt, dy/dt) of the unit-g0-speed parametrization at t."""
    phi = np.mod(np.asarray(t, dtype=float), circle_length(c.radius)) / math.sinh(c.radius)
    tr = math.tanh(c.radius / 2.0)
    zeta = tr * np.exp(1j * phi)
    # w = i(1+zeta)/(1-zeta), dw/dzeta = 2i/(1-zeta)^2, dzeta/dphi = i zeta
    dw = 2j / (1.0 - zeta) ** 2 * 1j * zeta / math.sinh(c.radius)
    return c.center.y * dw.real, c.center.y * dw.imag


@lru_cache(maxsize=64)
def gauss_legendre(n: int):
    """Gauss-Legendre nodes and weights on [0, 1]."""
    x, w = np.polynomial.legendre.leggauss(n)
    return 0.5 * (x + 1.0), 0.5 * w


def composite_gauss(a: float, b: float, n: int, panels: int = 1, breaks=()):
    """Composite Gauss-Legendre rule on [a, b]; ``breaks`` add extra panel edges."""
    edges = np.linspace(a, b, panels + 1)
    extra = [t for t in breaks if a < t < b]
    if extra:
        edges = np.unique(np.concatenate([edges, extra]))
    x0, w0 = gauss_legendre(n)
    h = np.diff(edges)
    x = (edges[:-1, None] + h[:, None] * x0[None, :]).ravel()
    w = (h[:, None] * w0[None, :]).ravel()
    return x, w


def _finite_or_raise(values, x, y):
    values = np.asarray(values, dtype=float)
    bad = ~np.isfinite(values)
    if bad.any():
        i = np.flatnonzero(bad.ravel())[0]
        loc = (float(np.ravel(x)[i]), float(np.ravel(y)[i]))
        raise QuadratureError(f"integrand is not finite at node {loc}", location=loc)
    return values


def disk_nodes(c: GeodesicCircle, order: int = 48, rho_panels: int = 1, phi_nodes: int | None = None,
               rho_breaks=()):
    """Nodes (x, y) and weights for integrating over the closed disk against dmu0.

    Gauss-Legendre in the geodesic radius (composite, ``rho_panels`` panels of
    ``order`` nodes each) times a uniform periodic rule in the polar angle.
    """
    rho, wr = composite_gauss(0.0, c.radius, order, rho_panels, rho_breaks)
    nphi = phi_nodes if phi_nodes is not None else 2 * order
    phi = 2.0 * math.pi * np.arange(nphi) / nphi
    R, P = np.meshgrid(rho, phi, indexing="ij")
    W = (wr * np.sinh(rho))[:, None] * np.full(nphi, 2.0 * math.pi / nphi)[None, :]
    x, y = polar_to_point(c.center, R, P)
    return x, y, W


def disk_quadrature(c: GeodesicCircle, integrand: Callable, order: int = 48, **kw) -> float:
    """Integrate a vectorized scalar field ``integrand(x, y)`` over the geodesic disk ``c``.

    Geodesic polar coordinates about the center, dmu0 = sinh(rho) drho dphi.
    Extra keywords are forwarded to :func:`disk_nodes`.
    """
    x, y, w = disk_nodes(c, order, **kw)
    vals = _finite_or_raise(integrand(x, y), x, y)
    return float(np.sum(vals * w))


def circle_quadrature(c: GeodesicCircle, oneform: Callable, order: int = 256, reverse: bool = False) -> float:
    """Line integral of ``oneform(x, y) -> (form_dx, form_dy)`` over the circle.

    Positive (counterclockwise) orientation unless ``reverse``. The periodic
    trapezoid rule with ``order`` nodes is spectrally accurate for smooth forms.
    """
    L = circle_length(c.radius)
    t = L * np.arange(order) / order
    x, y = circle_point(c, t)
    vx, vy = circle_tangent(c, t)
    fx, fy = oneform(x, y)
    vals = _finite_or_raise(np.asarray(fx) * vx + np.asarray(fy) * vy, x, y)
    total = float(np.sum(vals) * L / order)
    return -total if reverse else total


def circle_line_integral(c: GeodesicCircle, density: Callable, order: int = 256) -> float:
    """Integral of a scalar ``density(x, y)`` against g0-arclength on the circle."""
    L = circle_length(c.radius)
    t = L * np.arange(order) / order
    x, y = circle_point(c, t)
    vals = _finite_or_raise(density(x, y), x, y)
    return float(np.sum(vals) * L / order)
