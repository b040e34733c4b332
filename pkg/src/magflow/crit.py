"""Two-sided estimates of the Mane critical value c(g, sigma).

Lower bounds come from geodesic circles of g0: A_{L+c} >= 0 on a circle
run at g-speed sqrt(2c) gives sqrt(2c) l_g(C) >= |flux through C|.
Upper bounds come from explicit primitives theta of p*sigma on H^2,
c <= sup (1/2)|theta|_g^2.
"""
from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .field import (
    ConformalMetric,
    MagneticField,
    conformality_coefficient,
    helicity_formula,
    s_h_value,
)
from .hyp import (
    GeodesicCircle,
    HalfPlanePoint,
    circle_length,
    circle_point,
    circle_tangent,
    disk_area,
    mobius,
    polar_to_point,
)
from .surface import EULER_CHAR, Bump, InvariantScalar, enumerate_group_ball

DEFAULT_R_GRID = tuple(0.25 * 2**k for k in range(6))  # 0.25 ... 8


class BoundInversionError(RuntimeError):
    pass


class TheoremViolation(AssertionError):
    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


def max_workers() -> int:
    try:
        return max(1, int(os.environ.get("MAGFLOW_THREADS", "1")))
    except ValueError:
        return 1


def _pmap(fn, items):
    items = list(items)
    n = max_workers()
    if n == 1 or len(items) < 2:
        return [fn(i) for i in items]
    with ThreadPoolExecutor(n) as ex:
        return list(ex.map(fn, items))


def default_centers(g: ConformalMetric, n: int = 5) -> list[HalfPlanePoint]:
    """The octagon center plus points halfway to the sides along the vertex rays."""
    grp = g.group
    pts = [grp.base_point]
    for k in range(n - 1):
        phi = math.pi / 8 + 2.0 * math.pi * k / (n - 1)
        x, y = polar_to_point(grp.base_point, grp.inradius / 2.0, phi)
        pts.append(HalfPlanePoint(float(x), float(y)))
    return pts


# --------------------------------------------------------------------------
# curves and action


@dataclass(frozen=True)
class CurveSample:
    """Closed curve sampled at increasing times; first node repeated at the end.

    ``velocities`` (chart dx/dt, dy/dt) are optional; without them the curve
    is treated as a polyline.
    """

    x: np.ndarray
    y: np.ndarray
    times: np.ndarray
    velocities: tuple[np.ndarray, np.ndarray] | None = None

    def __post_init__(self):
        if len(self.x) < 3 or len(self.x) != len(self.y) or len(self.x) != len(self.times):
            raise ValueError("curve needs matching node and time arrays with at least 3 nodes")
        if self.x[0] != self.x[-1] or self.y[0] != self.y[-1]:
            raise ValueError("curve is not closed: first and last nodes differ")
        if not np.all(np.diff(self.times) > 0):
            raise ValueError("curve times must be strictly increasing (degenerate segment)")

    @property
    def duration(self) -> float:
        return float(self.times[-1] - self.times[0])


def _periodic_cumulative(values: np.ndarray, period: float):
    """Spectral antiderivative of a periodic sample; returns (mean, F) with
    integral_0^s = mean * s + F(s)."""
    n = values.size
    c = np.fft.rfft(values) / n
    k = np.arange(c.size)
    mean = c[0].real
    coef = np.zeros_like(c)
    coef[1:] = c[1:] / (2j * math.pi * k[1:] / period)
    if n % 2 == 0:
        coef[-1] = 0.0  # Nyquist mode has no consistent antiderivative

    def F(s):
        s = np.atleast_1d(s)
        ph = np.exp(2j * math.pi * np.outer(s, k[1:]) / period)
        # shifted so that F(0) = 0
        return 2.0 * (ph @ coef[1:]).real - 2.0 * np.sum(coef[1:]).real

    return mean, F


def circle_curve(circle: GeodesicCircle, nodes: int = 2048, speed: float = 1.0,
                 g: ConformalMetric | None = None, reverse: bool = False) -> CurveSample:
    """Circle run at constant g-speed ``speed`` (g0 if no metric is given)."""
    L0 = circle_length(circle.radius)
    s0 = L0 * np.arange(nodes) / nodes
    if g is None or g.u.is_constant:
        scale = 1.0 if g is None else math.exp(g.u.constant)
        lg = scale * L0
        s = s0
        dsdt = np.full(nodes, speed / scale)
    else:
        x, y = circle_point(circle, s0)
        eu = np.exp(g.u.value(x, y))
        mean, F = _periodic_cumulative(eu, L0)
        lg = mean * L0
        target = lg * np.arange(nodes) / nodes
        s = target / mean
        for _ in range(50):
            xs, ys = circle_point(circle, s)
            res = mean * s + F(s) - target
            s = s - res / np.exp(g.u.value(xs, ys))
            if np.max(np.abs(res)) < 1e-13 * lg:
                break
        xs, ys = circle_point(circle, s)
        dsdt = speed / np.exp(g.u.value(xs, ys))
    if reverse:
        # node k of the reversed curve is forward node -k
        idx = (-np.arange(nodes)) % nodes
        s, dsdt = s[idx], -dsdt[idx]
    x, y = circle_point(circle, s)
    vx, vy = circle_tangent(circle, s)
    T = lg / speed
    times = T * np.arange(nodes + 1) / nodes
    close = lambda a: np.append(a, a[0])
    return CurveSample(close(x), close(y), times, (close(vx * dsdt), close(vy * dsdt)))


def _lagrangian(g: ConformalMetric, sigma: MagneticField, x, y, vx, vy, k):
    u = g.u.value(x, y) if not g.u.is_constant else g.u.constant
    kinetic = 0.5 * np.exp(2.0 * u) * (vx * vx + vy * vy) / (y * y)
    bx, by = sigma.beta0.components(x, y)
    theta_v = sigma.a * vx / y + bx * vx + by * vy
    return kinetic - theta_v + k


def action_value(g: ConformalMetric, sigma: MagneticField, curve: CurveSample, k: float) -> float:
    """A_{L+k}(curve) with L = |v|_g^2/2 - theta(v), theta = a y^-1 dx + beta0."""
    t = curve.times
    if curve.velocities is not None:
        vx, vy = curve.velocities
        vals = _lagrangian(g, sigma, curve.x, curve.y, vx, vy, k)
        return float(np.sum(0.5 * (vals[1:] + vals[:-1]) * np.diff(t)))
    # polyline: constant chart velocity per segment, Simpson on each segment
    h = np.diff(t)
    vx = np.diff(curve.x) / h
    vy = np.diff(curve.y) / h
    mx = 0.5 * (curve.x[1:] + curve.x[:-1])
    my = 0.5 * (curve.y[1:] + curve.y[:-1])
    f0 = _lagrangian(g, sigma, curve.x[:-1], curve.y[:-1], vx, vy, k)
    f1 = _lagrangian(g, sigma, curve.x[1:], curve.y[1:], vx, vy, k)
    fm = _lagrangian(g, sigma, mx, my, vx, vy, k)
    return float(np.sum(h * (f0 + 4.0 * fm + f1) / 6.0))


# --------------------------------------------------------------------------
# lower bound from circles


def _circle_nodes(r: float, g: ConformalMetric, sigma: MagneticField, per_unit: float | None) -> int:
    sizes = [b.support_radius for b in (*g.u.bumps, *sigma.beta0.bumps)]
    if per_unit is None:
        per_unit = 24.0 / min(sizes) if sizes else 0.0
    n = int(math.ceil(circle_length(r) * per_unit))
    return max(256, n + (n % 2))


def circle_flux(g: ConformalMetric, sigma: MagneticField, circle: GeodesicCircle, per_unit: float | None = None):
    """(flux through the disk, l_g of the circle), counterclockwise orientation."""
    r = circle.radius
    area_part = sigma.a * disk_area(r)
    if g.u.is_constant and sigma.beta0.is_zero:
        return area_part, math.exp(g.u.constant) * circle_length(r)
    n = _circle_nodes(r, g, sigma, per_unit)
    L = circle_length(r)
    t = L * np.arange(n) / n
    x, y = circle_point(circle, t)
    if sigma.beta0.is_zero:
        line = 0.0
    else:
        vx, vy = circle_tangent(circle, t)
        bx, by = sigma.beta0.components(x, y)
        line = float(np.sum(bx * vx + by * vy) * L / n)
    if g.u.is_constant:
        lg = math.exp(g.u.constant) * L
    else:
        lg = float(np.sum(np.exp(g.u.value(x, y))) * L / n)
    return area_part + line, lg


@dataclass(frozen=True)
class CircleBound:
    value: float
    best_center: HalfPlanePoint | None
    best_radius: float | None
    best_orientation: int  # +1 counterclockwise, -1 clockwise
    ratios: dict = field(default_factory=dict)  # (center index, r) -> signed flux / l_g


def circle_lower_bound(g: ConformalMetric, sigma: MagneticField, r_grid=DEFAULT_R_GRID, center_grid=None,
                       per_unit: float | None = None) -> CircleBound:
    """(1/2) (max over circles and orientations of flux / l_g)^2 <= c(g, sigma)."""
    r_grid = list(r_grid)
    centers = list(center_grid) if center_grid is not None else default_centers(g)
    if not r_grid or not centers:
        raise ValueError("circle grids must be nonempty")
    jobs = [(i, r) for i, _ in enumerate(centers) for r in r_grid]

    def one(job):
        i, r = job
        flux, lg = circle_flux(g, sigma, GeodesicCircle(centers[i], r), per_unit)
        return flux / lg

    ratios = dict(zip(jobs, _pmap(one, jobs)))
    best, arg, orient = 0.0, None, 1
    for job in jobs:  # fixed order for deterministic tie-breaking
        q = ratios[job]
        if abs(q) > best:
            best, arg, orient = abs(q), job, (1 if q >= 0 else -1)
    return CircleBound(
        0.5 * best * best,
        centers[arg[0]] if arg else None,
        arg[1] if arg else None,
        orient,
        ratios,
    )


# --------------------------------------------------------------------------
# upper bound from explicit primitives


@dataclass(frozen=True)
class PrimitiveBound:
    value: float  # min over the family of sup_F (1/2) e^{-2u} (|a| + |eta|_g0)^2
    sampled: float  # same primitive, sup of (1/2)|theta|_g^2 over F and its nearest translates
    best_amplitude: float
    samples: int
    translates: int
    table: dict = field(default_factory=dict)


def _phi_family(g: ConformalMetric, sigma: MagneticField, amplitudes):
    bumps = [*g.u.bumps, *sigma.beta0.bumps]
    for amp in amplitudes:
        yield amp, InvariantScalar(g.group, 0.0, [Bump(b.center, amp, b.support_radius) for b in bumps])


def primitive_upper_bound(g: ConformalMetric, sigma: MagneticField, amplitudes=(-0.2, -0.1, 0.0, 0.1, 0.2),
                          samples: int = 4096, translates: int = 16) -> PrimitiveBound:
    """Upper bound from theta = a y^-1 dx + beta0 + d(phi) over a bump family for phi.

    For z = gamma x, |a y^-1 dx|_g0 = |a| everywhere and eta = beta0 + d phi is
    invariant, so sup over H^2 of |theta|_g0 is at most sup over the octagon
    of |a| + |eta|_g0; that envelope is the reported bound. The plain sup over
    the octagon and its nearest translates is reported alongside.
    """
    x, y = g.group.sample_domain(samples)
    ball = enumerate_group_ball(g.group, 2.0 * g.group.inradius + 2.5)
    mats = ball.matrices[: translates + 1]
    u = g.u.evaluate(x, y) if not g.u.is_constant else None
    e2u = np.exp(-2.0 * u.value) if u is not None else math.exp(-2.0 * g.u.constant)
    bx0, by0 = sigma.beta0.components(x, y)
    a = sigma.a
    table = {}
    best = None
    for amp, phi in _phi_family(g, sigma, amplitudes if (g.u.bumps or sigma.beta0.bumps) else (0.0,)):
        if amp == 0.0:
            ex, ey = bx0, by0
        else:
            ev = phi.evaluate(x, y)
            ex, ey = bx0 + ev.grad_x, by0 + ev.grad_y
        eta = y * np.hypot(ex, ey)
        envelope = float(np.max(0.5 * e2u * (abs(a) + eta) ** 2))
        sampled = 0.0
        for m in mats:
            # theta pulled back along gamma: a (gamma^* y^-1 dx) + eta, computed at gamma x
            gx, gy = mobius(m, x, y)
            jac = 1.0 / (m[1, 0] * (x + 1j * y) + m[1, 1]) ** 2
            # (y^-1 dx) at gamma x, pulled back: component (1/gy) * jac as a (1,0)-form
            pb = jac / gy
            tx = a * pb.real + ex
            ty = -a * pb.imag + ey
            sampled = max(sampled, float(np.max(0.5 * e2u * y * y * (tx * tx + ty * ty))))
        table[amp] = (envelope, sampled)
        if best is None or envelope < table[best][0]:
            best = amp
    env, smp = table[best]
    return PrimitiveBound(env, smp, best, x.size, len(mats), table)


# --------------------------------------------------------------------------
# combined estimate and the derived checks


@dataclass(frozen=True)
class CriticalEstimate:
    lower: float
    upper: float
    tolerance: float
    circle: CircleBound
    primitive: PrimitiveBound
    history: tuple = ()

    def as_dict(self) -> dict:
        c = self.circle
        return {
            "lower": self.lower,
            "upper": self.upper,
            "upper_sampled": self.primitive.sampled,
            "best_circle": None
            if c.best_center is None
            else {"center": [c.best_center.x, c.best_center.y], "radius": c.best_radius, "orientation": c.best_orientation},
            "best_primitive_amplitude": self.primitive.best_amplitude,
            "samples": self.primitive.samples,
            "lower_history": list(self.history),
        }


@dataclass(frozen=True)
class Budget:
    r_max: float = 8.0
    centers: int = 5
    samples: int = 4096
    amplitudes: tuple = (-0.2, -0.1, 0.0, 0.1, 0.2)
    per_unit: float | None = None
    tolerance: float = 1e-6


def estimate_critical_value(g: ConformalMetric, sigma: MagneticField, budget: Budget = Budget(), r_grid=None,
                            center_grid=None) -> CriticalEstimate:
    grid = sorted(r_grid) if r_grid is not None else [r for r in DEFAULT_R_GRID if r <= budget.r_max]
    centers = center_grid if center_grid is not None else default_centers(g, budget.centers)
    bound = circle_lower_bound(g, sigma, grid, centers, budget.per_unit)
    # best value over the expanding grids grid[:1], grid[:2], ...
    history, best = [], 0.0
    for r in grid:
        best = max(best, max(0.5 * q * q for (i, rr), q in bound.ratios.items() if rr == r))
        history.append((r, best))
    prim = primitive_upper_bound(g, sigma, budget.amplitudes, budget.samples)
    if bound.value > prim.value + budget.tolerance:
        raise BoundInversionError(f"lower bound {bound.value:.9g} exceeds upper bound {prim.value:.9g}")
    return CriticalEstimate(bound.value, prim.value, budget.tolerance, bound, prim, tuple(history))


def s_c_value(est: CriticalEstimate):
    """Interval for s_c = 1/sqrt(2c); the upper end is inf when the lower bound is 0."""
    if not est.upper > 0:
        raise ValueError("upper bound on c is zero: s_c is unbounded")
    lo = 1.0 / math.sqrt(2.0 * est.upper)
    hi = math.inf if est.lower <= 0 else 1.0 / math.sqrt(2.0 * est.lower)
    return lo, hi


def gk_bound(g: ConformalMetric, sigma: MagneticField, rho_g: float | None = None) -> float:
    """[sigma]^2 / (-4 pi chi A rho_g^2), a lower bound for c."""
    rho = conformality_coefficient(g) if rho_g is None else rho_g
    return sigma.total_flux**2 / (-4.0 * math.pi * EULER_CHAR * g.area * rho * rho)


def theorem_gap_report(g: ConformalMetric, sigma: MagneticField, est: CriticalEstimate | None = None,
                       tol: float = 1e-3, gk_tol: float = 1e-6) -> dict:
    s_h = s_h_value(g, sigma)
    if s_h is None:
        raise ValueError("theorem check needs [sigma] != 0")
    est = est or estimate_critical_value(g, sigma)
    lo, hi = s_c_value(est)
    rho = conformality_coefficient(g)
    gk = gk_bound(g, sigma, rho)
    report = {
        "s_h": s_h,
        "s_c": [lo, hi],
        "c": [est.lower, est.upper],
        "rho_g": rho,
        "gk_rhs": gk,
        "gk_residual": est.upper - gk,
        "gap": s_h - hi,
        "constant_curvature": g.is_constant_curvature,
        "exact_part_zero": sigma.is_exact_part_zero,
        "s_c_le_s_h": hi <= s_h + tol,
        "gk_holds": est.upper - gk >= -gk_tol,
    }
    if not report["s_c_le_s_h"]:
        raise TheoremViolation(f"s_c upper end {hi:.9g} exceeds s_h {s_h:.9g}", report)
    if not report["gk_holds"]:
        raise TheoremViolation(f"c upper {est.upper:.9g} below [sigma]^2/(-4 pi chi A rho^2) = {gk:.9g}", report)
    return report


def proposition_check(g: ConformalMetric, sigma: MagneticField, est: CriticalEstimate | None = None,
                      tol: float = 1e-6) -> dict:
    """2c >= 2 rho_g^2 c >= 1 - H / (2 pi A), evaluated at the upper estimate of c."""
    est = est or estimate_critical_value(g, sigma)
    rho = conformality_coefficient(g)
    H = helicity_formula(g, sigma)
    rhs = 1.0 - H / (2.0 * math.pi * g.area)
    left = 2.0 * est.upper
    middle = 2.0 * rho * rho * est.upper
    report = {
        "two_c": left,
        "two_rho2_c": middle,
        "two_rho2_c_lower": 2.0 * rho * rho * est.lower,
        "rhs": rhs,
        "helicity": H,
        "rho_g": rho,
        "slack": middle - rhs,
    }
    if not (left >= middle - tol and middle + tol >= rhs):
        raise TheoremViolation(f"proposition chain violated: {left:.9g} >= {middle:.9g} >= {rhs:.9g}", report)
    return report


def radon_bound_check(g: ConformalMetric, sigma: MagneticField, c: float, r_grid=(1.0, 2.0, 4.0, 6.0),
                      center_grid=None, per_unit: float | None = None) -> dict:
    """Report int_{C_r} beta0 against 2 pi sqrt(2c)(1 - e^{-r}) in the a = sqrt(2c) scenario."""
    if not g.u.is_constant:
        raise ValueError("the circle bound is stated for the constant-curvature metric")
    centers = list(center_grid) if center_grid is not None else default_centers(g)
    k = math.sqrt(2.0 * c)
    rows = []
    for i, ctr in enumerate(centers):
        for r in r_grid:
            circ = GeodesicCircle(ctr, r)
            flux, _ = circle_flux(g, MagneticField(0.0, sigma.beta0), circ, per_unit)
            bound = 2.0 * math.pi * k * (1.0 - math.exp(-r))
            rows.append({"center": i, "r": r, "integral": flux, "bound": bound,
                         "ratio": flux / (2.0 * math.pi * k) if k > 0 else math.nan})
    worst = max(rows, key=lambda row: row["ratio"])
    return {"rows": rows, "max_ratio": worst["ratio"], "within_bound": all(r["integral"] <= r["bound"] + 1e-9 for r in rows)}
