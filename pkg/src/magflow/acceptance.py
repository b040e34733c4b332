"""Acceptance battery: ten numbered checks against closed forms and property suites.

Each check returns a :class:`Check`; :func:`run_all` runs them in order.
Shared by ``magflow verify`` and the test suite.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from .crit import (
    circle_lower_bound,
    estimate_critical_value,
    primitive_upper_bound,
    proposition_check,
    s_c_value,
    theorem_gap_report,
)
from .field import ConformalMetric, MagneticField, helicity_formula, helicity_integral, s_h_value
from .flow import PhaseState, circle_orbit_oracle, detect_period, integrate, orbit_center
from .hyp import HalfPlanePoint, dist
from .radon import (
    ZeroMeanError,
    disk_radon,
    eigenfunction_mean_value_check,
    group_sum_radon,
    growth_check,
    lifts,
    q_kernel_imag,
)
from .surface import Bump, InvariantOneForm, InvariantScalar, default_group


@dataclass
class Check:
    id: int
    name: str
    passed: bool = True
    details: list = field(default_factory=list)
    seconds: float = 0.0

    def expect(self, ok: bool, what: str):
        self.details.append(("ok  " if ok else "FAIL") + " " + what)
        self.passed &= bool(ok)

    def line(self) -> str:
        return f"[{'PASS' if self.passed else 'FAIL'}] criterion {self.id:2d}: {self.name} ({self.seconds:.1f}s)"


def _u_bump(amp: float, radius: float = 1.0) -> InvariantScalar:
    grp = default_group()
    return InvariantScalar(grp, 0.0, [Bump(grp.base_point, amp, radius)])


def _beta_bump(amp: float = 0.3) -> InvariantOneForm:
    return InvariantOneForm(default_group(), [Bump(HalfPlanePoint(0.2, 1.1), amp, 0.8)])


def constant_baseline() -> Check:
    c = Check(1, "constant-curvature baseline")
    g, sig = ConformalMetric(), MagneticField(1.0)
    H = helicity_formula(g, sig)
    c.expect(abs(H) < 1e-12, f"helicity formula {H:.3e}")
    Hq = helicity_integral(g, sig).value
    c.expect(abs(Hq) < 1e-6, f"helicity integral {Hq:.3e}")
    sh = s_h_value(g, sig)
    c.expect(abs(sh - 1.0) < 1e-12, f"s_h {sh!r}")
    lo = circle_lower_bound(g, sig, [6.0]).value
    c.expect(lo >= 0.495, f"circle bound at r=6 {lo:.6f} >= 0.495")
    up = primitive_upper_bound(g, sig).value
    c.expect(abs(up - 0.5) < 1e-10, f"primitive bound {up!r}")
    est = estimate_critical_value(g, sig)
    lo_s, hi_s = s_c_value(est)
    c.expect(lo_s >= 1.0 - 1e-12 and hi_s <= 1.006, f"s_c in [{lo_s:.6f}, {hi_s:.6f}]")
    return c


def helicity_grid() -> Check:
    c = Check(2, "helicity formula vs integral grid")
    worst = 0.0
    for amp in (0.0, 0.1, 0.2):
        g = ConformalMetric(_u_bump(amp))
        for a in (0.0, 0.5, 1.0):
            for beta in (None, _beta_bump()):
                sig = MagneticField(a, beta)
                H, Hq = helicity_formula(g, sig), helicity_integral(g, sig).value
                err = abs(Hq - H) / abs(H) if abs(H) > 1e-9 else abs(Hq - H)
                tol = 1e-5 if abs(H) > 1e-9 else 1e-6
                worst = max(worst, err / tol)
                if err > tol:
                    c.expect(False, f"u={amp} a={a} beta={'bump' if beta else 0}: {H!r} vs {Hq!r}")
    c.expect(worst <= 1.0, f"18 configurations, worst error / tolerance {worst:.2e}")
    return c


def kernel_closed_form() -> Check:
    c = Check(3, "kernel closed form at alpha = 1/2")
    for r in (0.5, 1.0, 2.0, 4.0):
        exact = 2.0 * math.pi * (math.cosh(r) - 1.0)
        rel = abs(q_kernel_imag(r, 0.5) - exact) / exact
        c.expect(rel < 1e-9, f"r={r}: relative error {rel:.2e}")
    return c


def mean_value() -> Check:
    c = Check(4, "mean-value identity for y^(1/2+is)")
    worst = 0.0
    for s in (0.0, 1.0, 2.5):
        for r in (0.5, 1.0, 2.0):
            for ctr in (HalfPlanePoint(0.0, 1.0), HalfPlanePoint(2.0, 0.5)):
                for part in ("re", "im"):
                    lhs, rhs, res = eigenfunction_mean_value_check(s, ctr, r, part)
                    worst = max(worst, abs(res) / (abs(rhs) + 1.0))
    c.expect(worst < 1e-6, f"36 cases, worst relative residual {worst:.2e}")
    return c


def growth() -> Check:
    c = Check(5, "growth lemma")
    for s in (0.5, 1.0, 3.0):
        try:
            rows = growth_check(s, 5)
            c.expect(True, f"s={s}: n=1..5 hold, q(r_5)/bound = {rows[-1][1] / rows[-1][2]:.3f}")
        except AssertionError as exc:
            c.expect(False, f"s={s}: {exc}")
    return c


def flow_oracle() -> Check:
    c = Check(6, "flow oracles")
    g, sig = ConformalMetric(), MagneticField(1.0)
    for kappa, want_r, want_p in ((2.0, 0.5 * math.log(3.0), 2 * math.pi / math.sqrt(3.0)), (math.sqrt(2.0), None, 2 * math.pi)):
        radius, period = circle_orbit_oracle(kappa)
        st = PhaseState(0.3, 1.2, 0.4)
        tr = integrate(g, sig, kappa, st, 1.3 * period, 1e-2)
        ctr = orbit_center(st, kappa)
        dev = float(np.max(np.abs(dist(tr.states[:, 0], tr.states[:, 1], ctr.x, ctr.y) - (want_r or radius))))
        found = detect_period(tr, 1e-6)
        if want_r is not None:
            c.expect(dev < 1e-6, f"s f = {kappa:.4f}: radius deviation {dev:.2e}")
        c.expect(found is not None and abs(found - want_p) < 1e-5, f"s f = {kappa:.4f}: period {found} vs {want_p:.10f}")
    zero = MagneticField(0.0)
    errs = []
    for dt in (1e-2, 5e-3):
        end = integrate(g, zero, 1.0, PhaseState(0.0, 1.0, math.pi / 2), 2.0, dt).end
        errs.append(abs(end.y - math.exp(2.0)) + abs(end.x))
    c.expect(errs[0] < 1e-8, f"vertical geodesic endpoint error {errs[0]:.2e}")
    ratio = errs[0] / errs[1]
    c.expect(12.0 <= ratio <= 20.0, f"convergence factor {ratio:.2f}")
    return c


def surface_integrity() -> Check:
    c = Check(7, "surface integrity")
    grp = default_group()
    x, y, w = grp.domain_nodes(32, 2, 1)
    area = float(np.sum(w))
    c.expect(abs(area - 4 * math.pi) < 1e-6, f"octagon area error {area - 4 * math.pi:.2e}")
    res = grp.relator_residual()
    c.expect(res < 1e-8, f"relator residual {res:.2e}")
    rng = np.random.default_rng(7)
    worst = 0.0
    for px, py in zip(rng.uniform(-3, 3, 100), np.exp(rng.uniform(-3, 3, 100))):
        q, word = grp.reduce_point(HalfPlanePoint(px, py))
        bx, by = grp.word_matrix(word).act(q.x, q.y)
        worst = max(worst, float(dist(bx, by, px, py)))
    c.expect(worst < 1e-8, f"reduce_point round trip on 100 points {worst:.2e}")
    return c


def _theorem_configs():
    yield "u=0 a=1", ConformalMetric(), MagneticField(1.0)
    yield "u=0 a=1 beta bump", ConformalMetric(), MagneticField(1.0, _beta_bump())
    yield "u=bump(0.2) a=1", ConformalMetric(_u_bump(0.2)), MagneticField(1.0)
    yield "u=bump(0.2) a=1/2 beta bump", ConformalMetric(_u_bump(0.2)), MagneticField(0.5, _beta_bump())


def theorem_inequality() -> Check:
    c = Check(8, "s_c <= s_h and the rho_g inequality")
    for name, g, sig in _theorem_configs():
        try:
            rep = theorem_gap_report(g, sig)
        except AssertionError as exc:
            c.expect(False, f"{name}: {exc}")
            continue
        c.expect(rep["s_c"][1] <= rep["s_h"] + 1e-3, f"{name}: s_c <= {rep['s_c'][1]:.6f}, s_h = {rep['s_h']:.6f}")
        c.expect(rep["gk_residual"] >= -1e-6, f"{name}: c_upper - gk = {rep['gk_residual']:.3e}")
        if name == "u=bump(0.2) a=1":
            c.expect(rep["gap"] > 0, f"{name}: strict gap {rep['gap']:.3e}")
    return c


def proposition_equality() -> Check:
    c = Check(9, "proposition chain equality at a = 1/2")
    g, sig = ConformalMetric(), MagneticField(0.5)
    rep = proposition_check(g, sig)
    c.expect(abs(rep["two_rho2_c"] - 0.25) < 1e-6, f"2 rho^2 c = {rep['two_rho2_c']!r}")
    c.expect(abs(rep["rhs"] - 0.25) < 1e-6, f"1 - H/(2 pi A) = {rep['rhs']!r}")
    return c


def radon_plumbing() -> Check:
    c = Check(10, "Radon transform plumbing")
    grp = default_group()
    raw = InvariantScalar(grp, 0.0, [Bump(HalfPlanePoint(0.3, 1.2), 1.0, 0.8)])
    h = raw.centered()
    x, r = HalfPlanePoint(0.1, 0.9), 3.0  # r exceeds the covering radius of the octagon
    x1, x2 = lifts(h, x)
    d1, d2 = disk_radon(h, x1, r), disk_radon(h, x2, r)
    c.expect(abs(d1 - d2) < 1e-8, f"lift independence {abs(d1 - d2):.2e}")
    gs = group_sum_radon(h, x1, r)
    c.expect(abs(d1 - gs) < 1e-7, f"direct vs group sum {abs(d1 - gs):.2e}")
    try:
        disk_radon(raw, x1, r)
        c.expect(False, "nonzero-mean h accepted")
    except ZeroMeanError:
        c.expect(True, "nonzero-mean h rejected")
    zero = InvariantScalar(grp, 0.0)
    vals = [f(zero, p, rr) for f in (disk_radon, group_sum_radon) for p in (x1, x2) for rr in (0.5, 3.0)]
    c.expect(all(v == 0.0 for v in vals), "h = 0 gives 0")
    return c


CHECKS = (
    constant_baseline,
    helicity_grid,
    kernel_closed_form,
    mean_value,
    growth,
    flow_oracle,
    surface_integrity,
    theorem_inequality,
    proposition_equality,
    radon_plumbing,
)


def run_check(fn) -> Check:
    t = time.perf_counter()
    try:
        c = fn()
    except Exception as exc:  # a crash is a failed criterion, not a crashed battery
        c = Check(CHECKS.index(fn) + 1, fn.__name__.replace("_", " "))
        c.expect(False, f"raised {type(exc).__name__}: {exc}")
    c.seconds = time.perf_counter() - t
    return c


def run_all(report=print) -> list[Check]:
    out = []
    for fn in CHECKS:
        c = run_check(fn)
        report(c.line())
        out.append(c)
    return out
