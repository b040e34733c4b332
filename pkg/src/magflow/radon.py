"""Disk Radon transform on the octagon surface and the spectral kernel q_r(s).

For an eigenfunction phi of the hyperbolic Laplacian with eigenvalue
1/4 + s^2, the integral of phi over a geodesic disk of radius r equals
q_r(s) phi(center), with

    q_r(s) = 4 sqrt(2) int_0^r cos(s u) (cosh r - cosh u)^(1/2) du.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .hyp import (
    GeodesicCircle,
    HalfPlanePoint,
    composite_gauss,
    disk_area,
    disk_nodes,
    dist,
    gauss_legendre,
    polar_to_point,
)
from .surface import InvariantScalar, enumerate_group_ball

ZERO_MEAN_TOL = 1e-8


class ZeroMeanError(ValueError):
    pass


class GrowthViolation(AssertionError):
    def __init__(self, message, n=None):
        super().__init__(message)
        self.n = n


@dataclass(frozen=True)
class KernelSample:
    r: float
    s: float  # real s, or alpha = |s| for imaginary s
    value: float
    imaginary: bool = False

    def __post_init__(self):
        if not math.isfinite(self.value):
            raise ValueError("kernel value is not finite")


# --------------------------------------------------------------------------
# kernel


def _kernel_sum(r: float, weight, n: int, panels: int) -> tuple[float, float]:
    """Integral of weight(u) (cosh r - cosh u)^(1/2) over [0, r] after u = r - w^2.

    Returns (value, integral of |integrand|).
    """
    w, wt = composite_gauss(0.0, math.sqrt(r), n, panels)
    w2 = w * w
    # cosh r - cosh(r - w^2) = 2 sinh(r - w^2/2) sinh(w^2/2), no cancellation
    root = np.sqrt(2.0 * np.sinh(r - 0.5 * w2) * np.sinh(0.5 * w2))
    f = 2.0 * w * weight(r - w2) * root
    return float(np.sum(wt * f)), float(np.sum(wt * np.abs(f)))


def _kernel(r: float, weight, freq: float, rtol: float = 1e-12) -> float:
    if r < 0:
        raise ValueError(f"radius must be nonnegative, got {r}")
    if r == 0:
        return 0.0
    # panels scale with oscillations in w (phase s(r - w^2) spans s r)
    panels = max(1, int(math.ceil((freq * r + r) / 4.0)))
    prev, _ = _kernel_sum(r, weight, 24, panels)
    for _ in range(12):
        panels *= 2
        val, scale = _kernel_sum(r, weight, 24, panels)
        if abs(val - prev) <= rtol * max(scale, 1e-300):
            return 4.0 * math.sqrt(2.0) * val
        prev = val
    return 4.0 * math.sqrt(2.0) * val


def q_kernel_real(r: float, s: float) -> float:
    s = float(s)
    return _kernel(float(r), lambda u: np.cos(s * u), abs(s))


def q_kernel_imag(r: float, alpha: float) -> float:
    alpha = float(alpha)
    if not 0.0 <= alpha <= 0.5:
        raise ValueError(f"alpha must lie in [0, 1/2], got {alpha}")
    return _kernel(float(r), lambda u: np.cosh(alpha * u), 0.0)


def kernel_table(r_grid, s_list=(), alpha_list=()) -> list[KernelSample]:
    rows = []
    for r in r_grid:
        rows += [KernelSample(r, s, q_kernel_real(r, s)) for s in s_list]
        rows += [KernelSample(r, a, q_kernel_imag(r, a), imaginary=True) for a in alpha_list]
    return rows


def kernel_csv(rows) -> str:
    out = ["r,s_or_alpha,imaginary,value"]
    out += [f"{k.r:.12g},{k.s:.12g},{int(k.imaginary)},{k.value:.15g}" for k in rows]
    return "\n".join(out) + "\n"


# --------------------------------------------------------------------------
# mean value identity on H^2


def plane_eigenfunction(s: float, part: str = "re"):
    """Re or Im of y^(1/2 + i s); eigenvalue 1/4 + s^2."""
    if part == "re":
        return lambda x, y: np.sqrt(y) * np.cos(s * np.log(y))
    if part == "im":
        return lambda x, y: np.sqrt(y) * np.sin(s * np.log(y))
    raise ValueError("part must be 're' or 'im'")


def _disk_order(r: float, s: float) -> tuple[int, int]:
    # nodes per panel, panels; y varies by e^{+-r} across the disk
    return 32, max(2, int(math.ceil(r * (1.0 + abs(s)))))


def eigenfunction_mean_value_check(s: float, center: HalfPlanePoint, r: float, part: str = "re"):
    """(lhs, rhs, residual) for int_{D(center, r)} phi = q_r(s) phi(center)."""
    if not r > 0:
        raise ValueError("radius must be positive")
    phi = plane_eigenfunction(s, part)
    order, panels = _disk_order(r, s)
    nphi = int(max(64, 16 * math.ceil(math.exp(r) * (1.0 + abs(s)))))
    x, y, w = disk_nodes(GeodesicCircle(center, r), order, rho_panels=panels, phi_nodes=nphi)
    lhs = float(np.sum(w * phi(x, y)))
    rhs = q_kernel_real(r, s) * float(phi(center.x, center.y))
    return lhs, rhs, lhs - rhs


# --------------------------------------------------------------------------
# Radon transform of invariant scalars


def _require_zero_mean(h: InvariantScalar, tol: float = ZERO_MEAN_TOL):
    mean = h.integral() / (4.0 * math.pi)
    if abs(mean) > tol:
        raise ZeroMeanError(f"h must have zero mean over M (mean {mean:.3e}); use h.centered()")


def disk_radon(h: InvariantScalar, x: HalfPlanePoint, r: float, order: int = 24, panel_width: float = 0.1,
               phi_per_unit: float = 32.0) -> float:
    """Integral of h over the geodesic disk D(x, r) in H^2, h evaluated through
    reduction of each quadrature node to the octagon.

    Gauss-Legendre panels in the radius; each panel gets a periodic rule in
    the angle sized to its outer circumference.
    """
    _require_zero_mean(h)
    if not r > 0:
        raise ValueError("radius must be positive")
    if h.is_constant:
        return h.constant * disk_area(r)
    panels = max(1, int(math.ceil(r / panel_width)))
    edges = np.linspace(0.0, r, panels + 1)
    total = 0.0
    for a, b in zip(edges[:-1], edges[1:]):
        rho, wr = composite_gauss(a, b, order)
        nphi = int(math.ceil(2.0 * math.pi * math.sinh(b) * phi_per_unit))
        nphi = max(64, nphi + nphi % 2)
        phi = 2.0 * math.pi * np.arange(nphi) / nphi
        R, P = np.meshgrid(rho, phi, indexing="ij")
        px, py = polar_to_point(x, R, P)
        vals = h.value(px, py)
        total += float(np.sum((wr * np.sinh(rho))[:, None] * vals)) * (2.0 * math.pi / nphi)
    return total


def _smoothstep_rule(a: float, b: float, n: int):
    """Gauss rule on [a, b] after rho = a + (b - a)(3v^2 - 2v^3); clusters at both ends."""
    v, wv = gauss_legendre(n)
    rho = a + (b - a) * (3 * v * v - 2 * v**3)
    return rho, wv * (b - a) * 6.0 * v * (1.0 - v)


def _lens_integral(profile, d: float, r: float, n: int = 48) -> float:
    """int over D(x, r) of profile(dist(., c)) with d = dist(x, c), by circles about c."""
    R = profile.support
    hi = min(R, d + r)
    if d < 1e-14:
        rho, w = composite_gauss(0.0, min(R, r), n)
        return float(2.0 * math.pi * np.sum(w * profile.value(rho) * np.sinh(rho)))
    edges = sorted({0.0, hi, *[t for t in (abs(r - d), d + r) if 0.0 < t < hi]})
    total = 0.0
    for a, b in zip(edges[:-1], edges[1:]):
        rho, w = _smoothstep_rule(a, b, n)
        with np.errstate(invalid="ignore", divide="ignore"):
            cpsi = (math.cosh(d) * np.cosh(rho) - math.cosh(r)) / (math.sinh(d) * np.sinh(rho))
        ang = 2.0 * np.arccos(np.clip(np.nan_to_num(cpsi, nan=1.0), -1.0, 1.0))
        total += float(np.sum(w * profile.value(rho) * np.sinh(rho) * ang))
    return total


def group_sum_radon(h: InvariantScalar, x: HalfPlanePoint, r: float) -> float:
    """Same transform as a sum over Gamma-translates of the bumps:
    int_{D(x, r)} h = int_M h(y) K_r(x, y) dy, with the kernel counting translates."""
    _require_zero_mean(h)
    total = h.constant * disk_area(r)
    if h.is_constant:
        return total
    grp = h.group
    profiles = h._profiles()
    base = grp.base_point
    dx = float(dist(x.x, x.y, *base))
    for b in h.bumps:
        q, _ = grp.reduce_point(b.center)
        reach = float(dist(q.x, q.y, *base))
        ball = enumerate_group_ball(grp, dx + r + b.support_radius + reach + 1e-9)
        ox, oy = ball.orbit(q)
        d = dist(ox, oy, x.x, x.y)
        prof = profiles[b.support_radius]
        for di in np.sort(d[d < r + b.support_radius]):
            total += b.amplitude * _lens_integral(prof, float(di), r)
    return total


def lifts(h: InvariantScalar, x: HalfPlanePoint, k: int = 1) -> list[HalfPlanePoint]:
    """x and its image under the k-th generator: two lifts of the same point of M."""
    m = h.group.generators[k % len(h.group.generators)]
    gx, gy = m.act(x.x, x.y)
    return [x, HalfPlanePoint(float(gx), float(gy))]


# --------------------------------------------------------------------------
# growth lemma and boundedness probe


def growth_check(s: float, n_max: int = 5) -> list[tuple[float, float, float]]:
    if not s > 0:
        raise ValueError("growth check needs s > 0")
    rows = []
    for n in range(1, n_max + 1):
        rn = math.pi * (2 * n + 0.5) / s
        q = q_kernel_real(rn, s)
        bound = 4.0 * math.sqrt(2.0) * math.sqrt(math.cosh(rn)) / (s * (1.0 + s * s))
        if not q >= bound:
            raise GrowthViolation(f"q_r(s) = {q:.9g} below {bound:.9g} at n = {n} (s = {s})", n)
        if rows and not q > rows[-1][1]:
            raise GrowthViolation(f"q not increasing at n = {n} (s = {s})", n)
        rows.append((rn, q, bound))
    return rows


@dataclass
class RadonProbeReport:
    radii: list
    centers: list
    values: np.ndarray  # (len(radii), len(centers))
    running_max: list
    lift_error: float = 0.0
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        if not np.all(np.isfinite(self.values)):
            raise ValueError("probe produced non-finite values")

    def csv(self) -> str:
        out = ["r,x_index,value"]
        for i, r in enumerate(self.radii):
            for j in range(len(self.centers)):
                out.append(f"{r:.12g},{j},{self.values[i, j]:.15g}")
        return "\n".join(out) + "\n"


def boundedness_probe(h: InvariantScalar, r_grid=tuple(range(1, 9)), x_grid=None) -> RadonProbeReport:
    """Tabulate the transform over radii and centers with the group-sum route.

    Every value is recomputed from a second lift of the center; the largest
    discrepancy is reported as ``lift_error``.
    """
    _require_zero_mean(h)
    centers = list(x_grid) if x_grid is not None else [h.group.base_point]
    radii = sorted(float(r) for r in r_grid)
    vals = np.zeros((len(radii), len(centers)))
    lift_err = 0.0
    for j, c in enumerate(centers):
        x1, x2 = lifts(h, c)
        for i, r in enumerate(radii):
            v1 = group_sum_radon(h, x1, r)
            v2 = group_sum_radon(h, x2, r)
            vals[i, j] = v1
            lift_err = max(lift_err, abs(v1 - v2))
    running, best = [], -math.inf
    for i in range(len(radii)):
        best = max(best, float(np.max(np.abs(vals[i]))))
        running.append(best)
    return RadonProbeReport(radii, [(c.x, c.y) for c in centers], vals, running, lift_err)
