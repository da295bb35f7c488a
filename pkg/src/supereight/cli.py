"""Command line interface.

Exit codes: 0 success, 2 non-convergence, 3 input error, 4 collision abort.
"""
from __future__ import annotations

import argparse
import csv
import json
import logging
import math
import sys

import numpy as np

from . import bounds, collision
from .dynamics import CollisionError
from .minimizer import MinimizationFailed, RunConfig, Schedule, default_ladder, minimize
from .orbitio import SAMPLE_COLUMNS, OrbitFileError, StoredOrbit, read_orbit, sample_bodies, write_orbit
from .verify import residual_report

EXIT_OK = 0
EXIT_NONCONVERGENCE = 2
EXIT_INPUT = 3
EXIT_COLLISION = 4

LOG_COLUMNS = ("seed", "rung", "eps", "iter", "action", "grad_norm", "min_sep")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_INPUT)


def _positive(kind):
    def conv(text):
        try:
            v = kind(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"not a number: {text!r}")
        if not v > 0:
            raise argparse.ArgumentTypeError(f"must be positive: {text!r}")
        return v

    return conv


def _nonnegative(text):
    v = float(text)
    if not (v >= 0 and math.isfinite(v)):
        raise argparse.ArgumentTypeError(f"must be finite and non-negative: {text!r}")
    return v


def _complex(text):
    try:
        return complex(text.replace(" ", "").replace("i", "j"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a complex number: {text!r}")


def _table(rows, headers):
    cells = [[str(c) for c in r] for r in rows]
    width = [max(len(h), *(len(r[i]) for r in cells)) for i, h in enumerate(headers)]
    fmt = "  ".join(f"{{:<{w}}}" for w in width)
    out = [fmt.format(*headers), fmt.format(*("-" * w for w in width))]
    out += [fmt.format(*r) for r in cells]
    return "\n".join(out)


# ------------------------------------------------------------------ commands

def cmd_bounds(args):
    reports = bounds.bound_reports(args.resolution)
    if args.json:
        print(json.dumps([r.as_dict() for r in reports], indent=1))
        return EXIT_OK
    rows = [(r.name, f"{r.formula_value:.10f}", f"{r.oracle_value:.10f}", f"{r.discrepancy:.3e}") for r in reports]
    print(_table(rows, ("bound", "closed form", "oracle", "discrepancy")))
    test = reports[-1].oracle_value
    total = reports[0].formula_value
    print(f"\ntotal_collision = {total:.4f}  (> 9: {'PASS' if total > 9 else 'FAIL'})")
    print(f"test_path = {test:.8f}  (< 5: {'PASS' if test < 5 else 'FAIL'})")
    return EXIT_OK


def _write_log(path, results):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(LOG_COLUMNS)
        for r in results:
            fh.write(f"# start seed={r.seed} status={r.status}\n")
            for row in r.log_rows:
                w.writerow([repr(v) if isinstance(v, float) else v for v in row])


def cmd_minimize(args):
    ladder = default_ladder(args.rungs, args.eps0)
    schedule = Schedule(eps_ladder=ladder, step=args.step, max_iters=args.max_iters,
                        grad_tol=args.grad_tol, collision_floor=args.collision_floor,
                        max_step=max(args.step, Schedule.max_step))
    cfg = RunConfig(seeds=tuple(range(args.seed0, args.seed0 + args.seeds)), k=args.k, m=args.m,
                    amplitude=args.amplitude, schedule=schedule, workers=args.workers)
    try:
        report = minimize(cfg)
    except MinimizationFailed as exc:
        if args.log:
            _write_log(args.log, exc.report.results)
        print(str(exc), file=sys.stderr)
        return EXIT_NONCONVERGENCE
    if args.log:
        _write_log(args.log, report.results)
    best = report.best
    basins = [{"action": a, "seeds": s} for a, s in report.basins]
    orbit = StoredOrbit.from_result(best, cfg.m, {"basins": basins})
    write_orbit(args.output, orbit)
    for r in report.results:
        print(f"seed {r.seed}: {r.status}  J = {r.action.total:.12f}  min_sep = {r.min_separation:.4f}")
    print(f"best: seed {best.seed}, J = {best.action.total:.12f} (segment units), "
          f"{len(report.basins[0][1])}/{len(cfg.seeds)} starts in the largest basin")
    print(f"wrote {args.output}")
    return EXIT_OK


def cmd_verify(args):
    orbit = read_orbit(args.orbit)
    rep = residual_report(orbit.loop, tol=args.tol)
    d = rep.as_dict()
    if args.json:
        print(json.dumps(d, indent=1))
    else:
        print(_table([(k, f"{v:.6e}") for k, v in d.items()], ("residual", "value")))
    return EXIT_OK if math.isfinite(rep.newton_sup) else EXIT_COLLISION


def cmd_scaling(args):
    tr = collision.integrate_scaling(args.d, args.branch, args.s_max, kepler_coefficient=args.kepler_coefficient)
    rows = [
        ("theta(s_max)", f"{tr.theta_final():.10f}"),
        ("theta extrapolated", f"{tr.extrapolated_theta():.10f}"),
        ("exact limit for this ODE", f"{collision.limit_angle(args.d, args.branch, args.kepler_coefficient):.10f}"),
        ("pi/2 -+ pi sqrt(1+d)", f"{collision.theta_asymptote(args.d, args.branch):.10f}"),
        ("energy drift", f"{tr.energy_drift():.3e}"),
    ]
    print(f"d = {args.d}, branch {args.branch}, s_max = {args.s_max:g}, k = {args.kepler_coefficient}")
    print(_table(rows, ("quantity", "value")))
    return EXIT_OK


def cmd_levi_civita(args):
    path = collision.integrate_through_collision(args.q2, args.p2, (-args.tau, args.tau))
    near = (np.abs(path.tau) < min(0.1, args.tau)) & (path.tau != 0)
    cubic = float(np.polyfit(path.tau[near], path.t[near], 5)[2])
    rows = [
        ("E", f"{path.E:.10f}"),
        ("energy relation residual", f"{path.energy_residual():.3e}"),
        ("max |Im z|", f"{np.max(np.abs(path.z.imag)):.3e}"),
        ("t/tau^3 fitted (2/3 expected)", f"{cubic:.8f}"),
    ]
    if args.p2 != 0:
        qd = collision.quadrant_diagnostic(args.q2, args.p2, args.tau)
        rows += [
            ("Re q1 at tau_probe", f"{qd.transverse:.3e}"),
            ("Im b3", f"{qd.im_b3:.6f}"),
            ("sign rule", "indeterminate" if qd.indeterminate else ("holds" if qd.rule_holds else "violated")),
        ]
    print(_table(rows, ("quantity", "value")))
    return EXIT_OK


def cmd_export(args):
    orbit = read_orbit(args.orbit)
    out = open(args.output, "w", encoding="utf-8", newline="") if args.output else sys.stdout
    try:
        if args.format == "csv":
            data = sample_bodies(orbit.loop, args.samples)
            w = csv.writer(out, lineterminator="\n")
            w.writerow(SAMPLE_COLUMNS)
            for row in data:
                w.writerow([repr(float(v)) for v in row])
        else:
            out.write(orbit.to_json())
    finally:
        if out is not sys.stdout:
            out.close()
    return EXIT_OK


# ------------------------------------------------------------------ parser

def build_parser():
    p = _Parser(prog="supereight", description="Super-eight four-body choreography toolkit.")
    p.add_argument("-v", "--verbose", action="count", default=0)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    b = sub.add_parser("bounds", help="collision bounds and the test path")
    b.add_argument("--json", action="store_true")
    b.add_argument("--resolution", type=int, default=32)
    b.set_defaults(func=cmd_bounds)

    m = sub.add_parser("minimize", help="multi-start continuation search")
    m.add_argument("--k", type=_positive(int), default=32, help="highest Fourier harmonic")
    m.add_argument("--m", type=_positive(int), default=2048, help="quadrature points per period")
    m.add_argument("--seeds", type=_positive(int), default=8, help="number of random starts")
    m.add_argument("--seed0", type=int, default=0, help="first seed")
    m.add_argument("--eps0", type=_positive(float), default=0.1, help="first strong-force coefficient")
    m.add_argument("--rungs", type=_positive(int), default=16, help="halvings of eps before the final eps = 0 rung")
    m.add_argument("--step", type=_positive(float), default=0.05, help="initial Euler step")
    m.add_argument("--max-iters", type=_positive(int), default=20000, help="iteration cap per rung")
    m.add_argument("--grad-tol", type=_positive(float), default=1e-7, help="gradient norm tolerance at eps = 0")
    m.add_argument("--collision-floor", type=_nonnegative, default=1e-3, help="restart when a separation drops below this")
    m.add_argument("--amplitude", type=_positive(float), default=2.0, help="scale of the random initial coefficients")
    m.add_argument("--workers", type=_positive(int), default=None, help="worker processes (default: CPU count)")
    m.add_argument("--output", "-o", default="orbit.json", help="orbit file to write")
    m.add_argument("--log", default="convergence.csv", help="per-iteration CSV log")
    m.set_defaults(func=cmd_minimize)

    v = sub.add_parser("verify", help="residuals of an orbit file")
    v.add_argument("orbit")
    v.add_argument("--json", action="store_true")
    v.add_argument("--tol", type=_positive(float), default=1e-12)
    v.set_defaults(func=cmd_verify)

    s = sub.add_parser("scaling", help="escape angle of the scaling ODE")
    s.add_argument("--d", type=_nonnegative, default=0.0)
    s.add_argument("--branch", choices=("+", "-"), default="+")
    s.add_argument("--s-max", type=_positive(float), default=1e3)
    s.add_argument("--kepler-coefficient", type=_positive(float), default=collision.REDUCED_KEPLER)
    s.set_defaults(func=cmd_scaling)

    lc = sub.add_parser("levi-civita", help="integrate through a binary collision")
    lc.add_argument("--q2", type=_complex, default=1.0)
    lc.add_argument("--p2", type=_complex, default=0.0)
    lc.add_argument("--tau", type=_positive(float), default=0.3)
    lc.set_defaults(func=cmd_levi_civita)

    e = sub.add_parser("export", help="sample an orbit file for plotting")
    e.add_argument("orbit")
    e.add_argument("--format", choices=("csv", "json"), default="csv")
    e.add_argument("--samples", type=_positive(int), default=512)
    e.add_argument("--output", "-o", default=None)
    e.set_defaults(func=cmd_export)
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    level = logging.WARNING - 10 * args.verbose
    logging.basicConfig(level=max(level, logging.DEBUG), format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except CollisionError as exc:
        print(f"collision abort: {exc}", file=sys.stderr)
        return EXIT_COLLISION
    except (OrbitFileError, ValueError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
