"""magflow command line.

    magflow helicity|critical|flow|verify [--config PATH] [--output PATH]
    magflow radon {kernel,meanvalue,probe,growth} [--config PATH] [--output PATH]

Exit codes: 0 success, 1 verification failure, 2 usage or config error.
"""
from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

from . import acceptance
from .config import Config, ConfigError, dumps, load_config
from .crit import BoundInversionError, TheoremViolation, estimate_critical_value, proposition_check, s_c_value, theorem_gap_report
from .field import helicity_formula, helicity_integral, s_h_value
from .flow import IntegrationError, detect_period, integrate, trajectory_csv
from .hyp import HalfPlanePoint
from .radon import (
    GrowthViolation,
    boundedness_probe,
    eigenfunction_mean_value_check,
    growth_check,
    kernel_csv,
    kernel_table,
)
from .surface import EULER_CHAR

OK, FAILED, USAGE = 0, 1, 2


class Failure(Exception):
    """Verification failure carrying the report produced so far."""

    def __init__(self, message, text=""):
        super().__init__(message)
        self.text = text


def _emit(text: str, output: str | None):
    if output is None:
        sys.stdout.write(text)
    else:
        Path(output).write_text(text, newline="\n")


def cmd_helicity(cfg: Config) -> str:
    g, sig = cfg.metric.build(), cfg.magnetic.build()
    H = helicity_formula(g, sig)
    Hq = helicity_integral(g, sig).value
    sh = s_h_value(g, sig)
    tol = cfg.tolerances.cross_check
    rep = {
        "area": g.area,
        "flux": sig.total_flux,
        "euler_characteristic": EULER_CHAR,
        "helicity_formula": H,
        "helicity_integral": Hq,
        "s_h": sh,
    }
    text = dumps(rep)
    err = abs(Hq - H) / abs(H) if abs(H) > tol else abs(Hq - H)
    if err > tol:
        raise Failure(f"helicity formula and integral disagree by {err:.3e}", text)
    return text


def cmd_critical(cfg: Config) -> str:
    g, sig = cfg.metric.build(), cfg.magnetic.build()
    rep = {}
    try:
        est = estimate_critical_value(g, sig, cfg.budget(), cfg.crit.r_grid, cfg.crit.centers())
        rep["estimate"] = est.as_dict()
        if est.upper > 0:
            rep["s_c"] = list(s_c_value(est))
        rep["s_h"] = s_h_value(g, sig)
        if sig.total_flux != 0:
            rep["theorem"] = theorem_gap_report(g, sig, est, tol=cfg.tolerances.theorem)
        rep["proposition"] = proposition_check(g, sig, est, tol=cfg.tolerances.cross_check)
    except (BoundInversionError, TheoremViolation) as exc:
        if getattr(exc, "report", None):
            rep["violation"] = exc.report
        raise Failure(str(exc), dumps(rep)) from None
    return dumps(rep)


def cmd_flow(cfg: Config) -> tuple[str, str]:
    g, sig = cfg.metric.build(), cfg.magnetic.build()
    f = cfg.flow
    try:
        tr = integrate(g, sig, f.s, f.state(), f.T, f.dt, cfg.tolerances.integrator)
    except IntegrationError as exc:
        raise Failure(f"integration failed: {exc}") from None
    period = detect_period(tr, cfg.tolerances.integrator)
    summary = "period: none\n" if period is None else f"period: {period:.10f}\n"
    return trajectory_csv(tr), summary


def cmd_radon(cfg: Config, sub: str) -> str:
    rc = cfg.radon
    if sub == "kernel":
        return kernel_csv(kernel_table(rc.r_grid, rc.s_list, rc.alpha_list))
    if sub == "meanvalue":
        lines = ["r,s,center_index,part,lhs,rhs,residual"]
        bad = []
        for r in rc.r_grid:
            for s in rc.s_list:
                for j, c in enumerate(rc.centers):
                    for part in ("re", "im"):
                        lhs, rhs, res = eigenfunction_mean_value_check(s, HalfPlanePoint(*c), r, part)
                        lines.append(f"{r:.12g},{s:.12g},{j},{part},{lhs:.15g},{rhs:.15g},{res:.6e}")
                        if abs(res) > cfg.tolerances.cross_check * (abs(rhs) + 1.0):
                            bad.append((r, s, j, part))
        text = "\n".join(lines) + "\n"
        if bad:
            raise Failure(f"mean-value residual above tolerance at {bad}", text)
        return text
    if sub == "probe":
        centers = [HalfPlanePoint(*c) for c in rc.centers]
        rep = boundedness_probe(rc.h_scalar(), rc.r_grid, centers)
        if rep.lift_error > cfg.tolerances.geometry:
            raise Failure(f"lift discrepancy {rep.lift_error:.3e}", rep.csv())
        return rep.csv()
    if sub == "growth":
        lines = ["s,n,r_n,value,bound"]
        for s in rc.s_list:
            if not s > 0:
                continue
            try:
                rows = growth_check(s, rc.n_max)
            except GrowthViolation as exc:
                raise Failure(str(exc), "\n".join(lines) + "\n") from None
            lines += [f"{s:.12g},{n},{rn:.12g},{q:.15g},{b:.15g}" for n, (rn, q, b) in enumerate(rows, 1)]
        return "\n".join(lines) + "\n"
    raise ValueError(sub)


def cmd_verify() -> bool:
    checks = acceptance.run_all(print)
    failed = [c for c in checks if not c.passed]
    for c in failed:
        for d in c.details:
            print(f"  criterion {c.id}: {d}")
    print(f"{len(checks) - len(failed)}/{len(checks)} criteria passed")
    return not failed


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="magflow", description="Magnetic flows on a genus-two hyperbolic surface.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--config", help="JSON config file (defaults are used when omitted)")
        sp.add_argument("--output", help="write the report or table here instead of stdout")

    for name in ("helicity", "critical", "flow", "verify"):
        common(sub.add_parser(name))
    rad = sub.add_parser("radon")
    rad.add_argument("table", choices=("kernel", "meanvalue", "probe", "growth"))
    common(rad)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return USAGE if exc.code else OK
    try:
        cfg = load_config(args.config)
    except ConfigError as exc:
        print(f"magflow: {exc}", file=sys.stderr)
        return USAGE
    try:
        if args.command == "verify":
            return OK if cmd_verify() else FAILED
        if args.command == "flow":
            csv, summary = cmd_flow(cfg)
            _emit(csv, args.output)
            (sys.stdout if args.output else sys.stderr).write(summary)
            return OK
        if args.command == "radon":
            text = cmd_radon(cfg, args.table)
        else:
            text = {"helicity": cmd_helicity, "critical": cmd_critical}[args.command](cfg)
        _emit(text, args.output)
        return OK
    except Failure as exc:
        if exc.text:
            _emit(exc.text, args.output)
        print(f"magflow: {exc}", file=sys.stderr)
        return FAILED


if __name__ == "__main__":
    sys.exit(main())
