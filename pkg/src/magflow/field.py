"""The pair (g, sigma): conformal metric g = e^{2u} g0 over the octagon
surface and magnetic 2-form sigma = a mu0 + d beta0.

Helicity is available both by the closed formula and by quadrature of
tau(F) = 1 - a f - beta(v) over the unit circle bundle.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .hyp import dist
from .surface import (
    BASE_AREA,
    EULER_CHAR,
    InvariantOneForm,
    InvariantScalar,
    SurfaceGroup,
    default_group,
)


@dataclass(frozen=True)
class QuadratureRule:
    """Resolution of the octagon quadrature (Gauss-Legendre per panel)."""

    order: int = 32
    rho_panels: int = 4
    delta_panels: int = 2
    fiber_nodes: int = 16


DEFAULT_RULE = QuadratureRule()


def _centered_breaks(group: SurfaceGroup, *objects) -> list[float]:
    # support edges of bumps sitting at the octagon center are radial kinks
    breaks = []
    for obj in objects:
        for b in getattr(obj, "bumps", ()):
            if float(dist(b.center.x, b.center.y, *group.base_point)) < 1e-12:
                breaks.append(b.support_radius)
    return sorted(set(breaks))


def domain_rule(group: SurfaceGroup, *objects, rule: QuadratureRule = DEFAULT_RULE):
    return group.domain_nodes(rule.order, rule.rho_panels, rule.delta_panels, _centered_breaks(group, *objects))


class ConformalMetric:
    def __init__(self, u: InvariantScalar | None = None, rule: QuadratureRule = DEFAULT_RULE):
        self.u = u if u is not None else InvariantScalar(default_group(), 0.0)
        self.group = self.u.group
        self.rule = rule

    @cached_property
    def _nodes(self):
        x, y, w = domain_rule(self.group, self.u, rule=self.rule)
        return x, y, w, self.u.evaluate(x, y)

    @cached_property
    def area(self) -> float:
        if self.u.is_constant:
            return BASE_AREA * math.exp(2.0 * self.u.constant)
        _, _, w, ev = self._nodes
        return float(np.sum(w * np.exp(2.0 * ev.value)))

    @property
    def is_constant_curvature(self) -> bool:
        return self.u.is_constant

    def total_curvature(self) -> float:
        """Integral of K mu_g; K mu_g = (-1 - Laplacian0 u) mu0."""
        if self.u.is_constant:
            return -BASE_AREA
        _, _, w, ev = self._nodes
        return float(np.sum(w * (-1.0 - ev.laplacian)))

    def gaussian_curvature(self, x, y):
        ev = self.u.evaluate(x, y)
        return np.exp(-2.0 * ev.value) * (-1.0 - ev.laplacian)

    @property
    def uniformizing_scale(self) -> float:
        """lambda with rho = lambda e^{-u}: rho^2 g has curvature const and area A."""
        return math.sqrt(self.area / BASE_AREA)

    def conformality_parts(self):
        """(rho_g, (1/A) int rho^2 mu_g) for the Cauchy-Schwarz comparison."""
        lam = self.uniformizing_scale
        if self.u.is_constant:
            return 1.0, 1.0
        _, _, w, ev = self._nodes
        A = self.area
        rho_mean = lam / A * float(np.sum(w * np.exp(ev.value)))
        rho_sq = lam**2 / A * float(np.sum(w))
        return rho_mean, rho_sq


def metric_area(g: ConformalMetric) -> float:
    return g.area


def conformality_coefficient(g: ConformalMetric) -> float:
    return g.conformality_parts()[0]


class MagneticField:
    """sigma = a mu0 + d beta0 with beta0 an invariant rotational-bump 1-form."""

    def __init__(self, a: float, beta0: InvariantOneForm | None = None):
        self.a = float(a)
        self.beta0 = beta0 if beta0 is not None else InvariantOneForm(default_group())

    @cached_property
    def h0(self) -> InvariantScalar:
        return self.beta0.density()

    @property
    def is_exact_part_zero(self) -> bool:
        return self.beta0.is_zero

    @property
    def total_flux(self) -> float:
        return -self.a * 2.0 * math.pi * EULER_CHAR

    def scaled(self, s: float) -> "MagneticField":
        return MagneticField(s * self.a, self.beta0.scaled(s))

    def negated(self) -> "MagneticField":
        return self.scaled(-1.0)

    def density0(self, x, y):
        """sigma / mu0 = a + h0."""
        if self.beta0.is_zero:
            return np.full(np.shape(np.broadcast_arrays(x, y)[0]), self.a)
        return self.a + self.h0.value(x, y)

    def f(self, g: ConformalMetric, x, y):
        """sigma / mu_g."""
        if g.u.is_constant:
            return math.exp(-2.0 * g.u.constant) * self.density0(x, y)
        return np.exp(-2.0 * g.u.value(x, y)) * self.density0(x, y)

    def exact_primitive(self, g: ConformalMetric, x, y):
        """Components of beta with sigma = -a K mu_g + d beta, beta = beta0 - a *du."""
        bx, by = self.beta0.components(x, y)
        if g.u.is_constant or self.a == 0.0:
            return bx, by
        ev = g.u.evaluate(x, y)
        # *du = u_x dy - u_y dx
        return bx + self.a * ev.grad_y, by - self.a * ev.grad_x


def total_flux(sigma: MagneticField) -> float:
    return sigma.total_flux


def helicity_formula(g: ConformalMetric, sigma: MagneticField) -> float:
    return 2.0 * math.pi * g.area + sigma.total_flux**2 / EULER_CHAR


@dataclass(frozen=True)
class HelicityQuadrature:
    value: float
    kinetic: float  # integral of 1
    flux_term: float  # integral of a f
    beta_term: float  # integral of beta(v); zero by the flip symmetry
    nodes: int


def helicity_integral(g: ConformalMetric, sigma: MagneticField, fiber_nodes: int | None = None) -> HelicityQuadrature:
    """Quadrature of tau(F)(x, v) = 1 - a f(x) - beta_x(v) over SM.

    Liouville measure = mu_g x fiber angle; fiber rule is the uniform
    periodic rule, symmetric under v -> -v.
    """
    n = fiber_nodes or g.rule.fiber_nodes
    if n % 2:
        raise ValueError("fiber rule needs an even node count for flip symmetry")
    x, y, w = domain_rule(g.group, g.u, sigma.beta0, rule=g.rule)
    u = g.u.evaluate(x, y)
    mu_g = w * np.exp(2.0 * u.value)
    a = sigma.total_flux / (-2.0 * math.pi * EULER_CHAR)
    f = np.exp(-2.0 * u.value) * sigma.density0(x, y)
    bx, by = sigma.exact_primitive(g, x, y)
    theta = 2.0 * math.pi * np.arange(n) / n
    speed = y * np.exp(-u.value)  # chart length of a unit g-vector
    beta_v = speed[:, None] * (bx[:, None] * np.cos(theta) + by[:, None] * np.sin(theta))
    dtheta = 2.0 * math.pi / n
    kinetic = float(np.sum(mu_g) * 2.0 * math.pi)
    flux_term = float(np.sum(mu_g * a * f) * 2.0 * math.pi)
    beta_term = float(np.sum(mu_g[:, None] * beta_v) * dtheta)
    return HelicityQuadrature(kinetic - flux_term - beta_term, kinetic, flux_term, beta_term, x.size * n)


def fiber_beta_integral(g: ConformalMetric, sigma: MagneticField, x, y, fiber_nodes: int = 16):
    """Fiber integral of beta_x(v) at each point; vanishes by the flip symmetry."""
    bx, by = sigma.exact_primitive(g, x, y)
    theta = 2.0 * math.pi * np.arange(fiber_nodes) / fiber_nodes
    vals = np.asarray(bx)[..., None] * np.cos(theta) + np.asarray(by)[..., None] * np.sin(theta)
    return vals.sum(axis=-1) * (2.0 * math.pi / fiber_nodes)


def s_h_value(g: ConformalMetric, sigma: MagneticField) -> float | None:
    flux = sigma.total_flux
    if flux == 0.0:
        return None
    return math.sqrt(-2.0 * math.pi * EULER_CHAR * g.area) / abs(flux)


def contact_primitive_value(g: ConformalMetric, sigma: MagneticField, s: float, state):
    """tau_s(F_s) = 1 - a s^2 f(x) - s beta_x(v) at a phase state."""
    return tau_s(g, sigma, s, state.x, state.y, state.theta)


def tau_s(g: ConformalMetric, sigma: MagneticField, s: float, x, y, theta):
    x, y, theta = np.asarray(x, float), np.asarray(y, float), np.asarray(theta, float)
    a = sigma.total_flux / (-2.0 * math.pi * EULER_CHAR)
    u = g.u.value(x, y) if not g.u.is_constant else g.u.constant
    f = np.exp(-2.0 * u) * sigma.density0(x, y)
    bx, by = sigma.exact_primitive(g, x, y)
    speed = y * np.exp(-u)
    beta_v = speed * (bx * np.cos(theta) + by * np.sin(theta))
    return 1.0 - a * s * s * f - s * beta_v


@dataclass(frozen=True)
class ContactSample:
    minimum: float
    maximum: float
    samples: int

    @property
    def sign_definite(self) -> bool:
        return self.minimum > 0 or self.maximum < 0


def contact_primitive_range(g: ConformalMetric, sigma: MagneticField, s: float, n_points: int = 512, n_angles: int = 16):
    """Min/max of tau_s(F_s) over a sample of SM; a sign-definite range witnesses contact type."""
    x, y = g.group.sample_domain(n_points)
    theta = 2.0 * math.pi * np.arange(n_angles) / n_angles
    v = tau_s(g, sigma, s, np.repeat(x, n_angles), np.repeat(y, n_angles), np.tile(theta, n_points))
    return ContactSample(float(np.min(v)), float(np.max(v)), v.size)
