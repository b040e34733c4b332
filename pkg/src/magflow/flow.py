"""Magnetic flow F_s = X + s f V on the unit circle bundle, integrated in
half-plane chart coordinates (x, y, theta), theta the chart angle of the
unit tangent.

With w = u - ln y the total conformal exponent of g in the Euclidean chart:

    dx/dt = e^{-w} cos(theta)
    dy/dt = e^{-w} sin(theta)
    dtheta/dt = e^{-w} (w_y cos(theta) - w_x sin(theta)) + s f

so the geodesic curvature of the projected orbit is s f, turning left for
positive f. Time is g-arclength.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .field import ConformalMetric, MagneticField
from .hyp import GeometryError, HalfPlanePoint, Isometry, dist, geodesic_point

Y_MIN = 1e-250


class IntegrationError(RuntimeError):
    def __init__(self, message, time=None):
        super().__init__(message)
        self.time = time


@dataclass(frozen=True)
class PhaseState:
    x: float
    y: float
    theta: float

    def __post_init__(self):
        if not self.y > 0:
            raise GeometryError(f"phase state needs y > 0, got {self.y}")
        object.__setattr__(self, "theta", float(self.theta) % (2.0 * math.pi))

    @property
    def point(self) -> HalfPlanePoint:
        return HalfPlanePoint(self.x, self.y)

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.theta])

    def moved_by(self, m: Isometry) -> "PhaseState":
        x, y, t = m.act_state(self.x, self.y, self.theta)
        return PhaseState(float(x), float(y), float(t))


@dataclass
class Trajectory:
    times: np.ndarray
    states: np.ndarray  # (n, 3) columns x, y, theta (theta unwrapped)
    rates: np.ndarray  # (n, 3) vector field at each sample
    dt: float
    max_error: float
    steps: int
    rhs_evaluations: int

    def state(self, i: int) -> PhaseState:
        x, y, t = self.states[i]
        return PhaseState(x, y, t)

    @property
    def end(self) -> PhaseState:
        return self.state(-1)


class MagneticSystem:
    """Right-hand side of the flow for a fixed (g, sigma, s)."""

    def __init__(self, g: ConformalMetric, sigma: MagneticField, s: float):
        if not s > 0:
            raise ValueError(f"intensity s must be positive, got {s}")
        self.g, self.sigma, self.s = g, sigma, float(s)
        self._flat_u = g.u.is_constant
        self._const_f = self._flat_u and sigma.beta0.is_zero

    def __call__(self, state: np.ndarray) -> np.ndarray:
        x, y, th = state
        if not (np.isfinite(x) and np.isfinite(y) and y > Y_MIN):
            raise IntegrationError(f"state left the numeric range: ({x}, {y})")
        if self._flat_u:
            u, ux, uy = self.g.u.constant, 0.0, 0.0
        else:
            ev = self.g.u.evaluate(x, y)
            u, ux, uy = float(ev.value), float(ev.grad_x), float(ev.grad_y)
        if self._const_f:
            f = math.exp(-2.0 * u) * self.sigma.a
        else:
            f = math.exp(-2.0 * u) * float(self.sigma.density0(x, y))
        emw = y * math.exp(-u)
        wx, wy = ux, uy - 1.0 / y
        c, s = math.cos(th), math.sin(th)
        return np.array([emw * c, emw * s, emw * (wy * c - wx * s) + self.s * f])


def vector_field(g: ConformalMetric, sigma: MagneticField, s: float, state: PhaseState):
    return tuple(float(v) for v in MagneticSystem(g, sigma, s)(state.as_array()))


def _rk4(rhs, y, h, k1=None):
    k1 = rhs(y) if k1 is None else k1
    k2 = rhs(y + 0.5 * h * k1)
    k3 = rhs(y + 0.5 * h * k2)
    k4 = rhs(y + h * k3)
    return y + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def integrate(g: ConformalMetric, sigma: MagneticField, s: float, state0: PhaseState, T: float, dt: float,
              tol: float = 1e-6) -> Trajectory:
    """Classical RK4 with fixed step; every step is re-done as two half steps
    and the difference (/15) is the local error estimate."""
    if not (T > 0 and dt > 0):
        raise ValueError("T and dt must be positive")
    rhs = MagneticSystem(g, sigma, s)
    n = int(math.ceil(T / dt - 1e-12))
    h = T / n
    Y = np.empty((n + 1, 3))
    K = np.empty((n + 1, 3))
    Y[0] = state0.as_array()
    K[0] = rhs(Y[0])
    worst = 0.0
    for i in range(n):
        y = Y[i]
        full = _rk4(rhs, y, h, K[i])
        half = _rk4(rhs, _rk4(rhs, y, 0.5 * h, K[i]), 0.5 * h)
        # positional error measured hyperbolically, angle directly
        err = (float(dist(full[0], full[1], half[0], half[1])) + abs(full[2] - half[2])) / 15.0
        if not math.isfinite(err) or err > tol:
            raise IntegrationError(f"step error estimate {err:.3e} exceeds tolerance at t = {i * h:.6g}", i * h)
        worst = max(worst, err)
        Y[i + 1] = full
        K[i + 1] = rhs(full)
    times = h * np.arange(n + 1)
    return Trajectory(times, Y, K, h, worst, n, 12 * n + 1)


def circle_orbit_oracle(kappa: float):
    """Radius and period of the closed orbit with constant curvature kappa > 1 in H^2."""
    if not kappa > 1:
        raise ValueError(f"closed circular orbits need kappa > 1, got {kappa}")
    radius = math.atanh(1.0 / kappa)
    return radius, 2.0 * math.pi * math.sinh(radius)


def orbit_center(state: PhaseState, kappa: float) -> HalfPlanePoint:
    """Center of the left-turning circle of curvature kappa through the state."""
    radius, _ = circle_orbit_oracle(kappa)
    return geodesic_point(state.point, state.theta + math.pi / 2.0, radius)


def _hermite(t0, t1, p0, p1, m0, m1, t):
    h = t1 - t0
    s = (t - t0) / h
    h00 = 2 * s**3 - 3 * s**2 + 1
    h10 = s**3 - 2 * s**2 + s
    h01 = -2 * s**3 + 3 * s**2
    h11 = s**3 - s**2
    return h00 * p0 + h10 * h * m0 + h01 * p1 + h11 * h * m1


def phase_distance(traj: Trajectory, i: int, ref: np.ndarray) -> float:
    x, y, th = traj.states[i]
    dth = abs((th - ref[2] + math.pi) % (2 * math.pi) - math.pi)
    return float(dist(x, y, ref[0], ref[1])) + dth


def detect_period(traj: Trajectory, tol: float = 1e-6) -> float | None:
    """First return time to the initial phase state, or None.

    Uses the signed progress along the initial direction,
    g(t) = <(x, y)(t) - (x, y)(0), v0>, whose downward-to-upward crossing
    near a return is located with cubic Hermite interpolation of the chart
    position (rates are the stored vector field samples).
    """
    ref = traj.states[0]
    v0 = np.array([math.cos(ref[2]), math.sin(ref[2])])
    pos = traj.states[:, :2] - ref[:2]
    g = pos @ v0
    gd = traj.rates[:, :2] @ v0
    n = len(traj.times)
    # leave the neighbourhood of the start before looking for a return
    scale = max(4.0 * traj.dt, 1e3 * tol)
    left = False
    for i in range(1, n - 1):
        d = phase_distance(traj, i, ref)
        if not left:
            left = d > 2 * scale
            continue
        if g[i] <= 0.0 < g[i + 1] or g[i] < 0.0 <= g[i + 1]:
            if min(d, phase_distance(traj, i + 1, ref)) > 10 * scale:
                continue
            t0, t1 = traj.times[i], traj.times[i + 1]
            lo, hi = t0, t1
            for _ in range(80):
                mid = 0.5 * (lo + hi)
                if _hermite(t0, t1, g[i], g[i + 1], gd[i], gd[i + 1], mid) <= 0.0:
                    lo = mid
                else:
                    hi = mid
            tr = 0.5 * (lo + hi)
            x = _hermite(t0, t1, *traj.states[i:i + 2, 0], *traj.rates[i:i + 2, 0], tr)
            y = _hermite(t0, t1, *traj.states[i:i + 2, 1], *traj.rates[i:i + 2, 1], tr)
            th = _hermite(t0, t1, *traj.states[i:i + 2, 2], *traj.rates[i:i + 2, 2], tr)
            dth = abs((th - ref[2] + math.pi) % (2 * math.pi) - math.pi)
            if float(dist(x, y, ref[0], ref[1])) + dth <= tol:
                return float(tr)
    return None


def trajectory_csv(traj: Trajectory) -> str:
    lines = ["t,x,y,theta"]
    for t, (x, y, th) in zip(traj.times, traj.states):
        lines.append(f"{t:.12g},{x:.15g},{y:.15g},{th % (2 * math.pi):.15g}")
    return "\n".join(lines) + "\n"
