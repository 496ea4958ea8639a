"""Command-line front end.

One subcommand per computation; every run can read defaults from a plain
config file (key = value lines grouped in [subcommand] sections) with
command-line flags winning over file values.  Sweep subcommands emit CSV
plus a text report and a rendered figure; exit code 0 on success, 1 when
an acceptance-style check fails, 2 on usage errors.
"""

from __future__ import annotations

import argparse
import configparser
import math
import os
import sys
from pathlib import Path

import numpy as np

USAGE_ERROR = 2


def _thread_default():
    try:
        return max(1, int(os.environ.get("MAGEDGE_THREADS", "1")))
    except ValueError:
        return 1


def build_parser():
    p = argparse.ArgumentParser(
        prog="magedge",
        description="Spectral toolkit for magnetic Neumann boundary states",
    )
    p.add_argument("--config", help="config file (key = value per section)")
    p.add_argument("--out", default="out", help="output directory")
    p.add_argument("--threads", type=int, default=None,
                   help="worker threads (default from MAGEDGE_THREADS)")
    sub = p.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("mu1", help="first band function of the half-line family")
    sp.add_argument("--xi", type=float, required=True)
    sp.add_argument("--n-points", type=int, default=4000)
    sp.add_argument("--dirichlet-T", type=float, default=None,
                    help="solve the Dirichlet-truncated variant instead")

    sp = sub.add_parser("mu2-gap", help="minimum of the second band over a grid")
    sp.add_argument("--xi-min", type=float, default=-3.0)
    sp.add_argument("--xi-max", type=float, default=3.0)
    sp.add_argument("--step", type=float, default=0.05)
    sp.add_argument("--n-points", type=int, default=3000)

    sp = sub.add_parser("theta0", help="locate the band minimum Theta0")
    sp.add_argument("--tol", type=float, default=1e-6)
    sp.add_argument("--n-points", type=int, default=2000)

    sp = sub.add_parser("moment", help="edge moment m(c)")
    sp.add_argument("--c", type=float, required=True)

    sp = sub.add_parser("coef-energy", help="boundary energy coefficient")
    _curve_flags(sp)
    sp.add_argument("--b", type=float, default=1.0)

    sp = sub.add_parser("coef-counting", help="boundary counting coefficient")
    _curve_flags(sp)
    sp.add_argument("--b", type=float, default=1.0)
    sp.add_argument("--lambda-frac", type=float, required=True)

    sp = sub.add_parser("cylinder-energy", help="exact cylinder shifted energy")
    sp.add_argument("--b", type=float, default=1.0)
    sp.add_argument("--S", type=float, required=True)
    sp.add_argument("--T", type=float, required=True)
    sp.add_argument("--lambda", dest="lam", type=float, required=True)
    sp.add_argument("--h", type=float, required=True)

    sp = sub.add_parser("disk-spectrum", help="disk spectrum below a threshold")
    _disk_flags(sp)
    sp.add_argument("--h", type=float, required=True)
    sp.add_argument("--threshold-frac", type=float, default=1.0,
                    help="threshold as a fraction of b*h")
    sp.add_argument("--exterior", action="store_true")
    sp.add_argument("--r-out", type=float, default=None)

    sp = sub.add_parser("verify-thm1", help="boundary energy h-sweep")
    _disk_flags(sp)
    _sweep_flags(sp)

    sp = sub.add_parser("verify-thm2", help="bulk isolation h-sweep")
    _disk_flags(sp)
    _sweep_flags(sp)
    sp.add_argument("--a", type=float, required=True)

    sp = sub.add_parser("verify-counting", help="counting function h-sweep")
    _disk_flags(sp)
    _sweep_flags(sp)
    sp.add_argument("--lambda-frac", type=float, required=True)

    sp = sub.add_parser("verify-projectors", help="kernel identity residuals")
    sp.add_argument("--xi-cut", type=float, default=8.0)
    sp.add_argument("--j-max", type=int, default=12)
    sp.add_argument("--seed", type=int, default=7)

    sp = sub.add_parser("prop-variational", help="trace variational property run")
    sp.add_argument("--seed", type=int, default=2024)
    sp.add_argument("--trials", type=int, default=1000)

    sp = sub.add_parser("report", help="re-read an emitted CSV and render")
    sp.add_argument("--csv", required=True)
    return p


def _curve_flags(sp):
    sp.add_argument("--curve", help="x y point table, one pair per line")
    sp.add_argument("--circle", type=float, default=None,
                    help="circle radius instead of a point file")
    sp.add_argument("--curve-points", type=int, default=512)


def _disk_flags(sp):
    sp.add_argument("--R", type=float, default=1.0)
    sp.add_argument("--b", type=float, default=1.0)
    sp.add_argument("--n-radial", type=int, default=0)
    sp.add_argument("--m-margin", type=int, default=5)


def _sweep_flags(sp):
    sp.add_argument("--h-list", default="0.02,0.01,0.005,0.0025",
                    help="comma-separated decreasing h values")


def _apply_config(args, parser, argv):
    """Fill argparse defaults from the config file; flags already set win."""
    if not args.config:
        return args
    cp = configparser.ConfigParser()
    read = cp.read(args.config)
    if not read:
        parser.error(f"config file not found: {args.config}")
    section = args.command
    if not cp.has_section(section):
        return args
    known = {k.replace("-", "_") for k in vars(args)}
    argv_given = {a.split("=")[0].lstrip("-").replace("-", "_")
                  for a in argv if a.startswith("--")}
    for key, value in cp.items(section):
        attr = key.replace("-", "_")
        if attr not in known:
            parser.error(f"unknown key {key!r} in config section [{section}]")
        if attr in argv_given:
            continue  # explicit flag wins
        current = getattr(args, attr)
        caster = type(current) if current is not None else str
        if caster is bool:
            setattr(args, attr, value.strip().lower() in ("1", "true", "yes"))
        else:
            try:
                setattr(args, attr, caster(value))
            except ValueError:
                parser.error(f"bad value for {key!r} in config: {value!r}")
    return args


def _load_curve(args):
    from .geometry import circle, curve_from_parametrization, load_curve_points

    if args.curve and args.circle is not None:
        raise SystemExit("give either --curve or --circle, not both")
    if args.curve:
        return curve_from_parametrization(load_curve_points(args.curve))
    radius = args.circle if args.circle is not None else 1.0
    return circle(radius, n=args.curve_points)


def _fmt(x):
    return f"{x:.12e}"


def dispatch(argv=None) -> int:
    parser = build_parser()
    if argv is None:
        argv = sys.argv[1:]
    args = parser.parse_args(argv)
    args = _apply_config(args, parser, argv)
    threads = args.threads if args.threads is not None else _thread_default()
    out_dir = Path(args.out)

    from . import degennes, harness, models2d, projectors, reporting, semiclassics
    from .errors import MagedgeError

    try:
        cmd = args.command
        if cmd == "mu1":
            if args.dirichlet_T is not None:
                v = degennes.mu1_truncated(args.xi, args.dirichlet_T,
                                           n_points=args.n_points)
                print(f"mu1(xi={args.xi}; T={args.dirichlet_T}) = {_fmt(v)}")
            else:
                v = degennes.mu1(args.xi, n_points=args.n_points)
                print(f"mu1(xi={args.xi}) = {_fmt(v)}")
            return 0

        if cmd == "mu2-gap":
            grid = np.arange(args.xi_min, args.xi_max + args.step / 2, args.step)
            v = degennes.mu2_gap(grid, n_points=args.n_points)
            print(f"min mu2 over [{args.xi_min}, {args.xi_max}] = {_fmt(v)}")
            return 0 if v > 1.0 else 1

        if cmd == "theta0":
            res = degennes.theta0(refinement=args.tol, n_points=args.n_points)
            print(f"theta0 = {_fmt(res.theta0)} (stable to {args.tol:g} "
                  f"under grid refinement)")
            print(f"xi_star = {res.xi_star:.8f} (located to 1e-8)")
            return 0

        if cmd == "moment":
            v = semiclassics.edge_moment(args.c)
            tail = degennes.default_table().tail_bound()
            print(f"m({args.c}) = {_fmt(v)} (xi tail bound {tail:.3e})")
            return 0

        if cmd == "coef-energy":
            curve = _load_curve(args)
            fld = semiclassics.FieldProfile.constant(curve, args.b)
            v = semiclassics.boundary_energy_coefficient(curve, fld)
            print(f"boundary energy coefficient = {_fmt(v)}")
            return 0

        if cmd == "coef-counting":
            curve = _load_curve(args)
            fld = semiclassics.FieldProfile.constant(curve, args.b)
            v = semiclassics.counting_coefficient(curve, fld,
                                                  args.lambda_frac * args.b)
            print(f"counting coefficient = {_fmt(v)}")
            return 0

        if cmd == "cylinder-energy":
            spec = models2d.CylinderSpec(S=args.S, T=args.T, b=args.b,
                                         lam=args.lam, h=args.h)
            res = models2d.cylinder_energy_exact(spec)
            bound = models2d.cylinder_energy_bound(spec)
            print(f"energy = {_fmt(res.value)}")
            print(f"closed-form bound = {_fmt(bound)}")
            print(f"certificates: {res.certificates}")
            return 0 if res.value <= bound else 1

        if cmd == "disk-spectrum":
            spec = models2d.DiskSpec(
                R=args.R, b=args.b, h=args.h,
                n_radial=args.n_radial or max(400, int(
                    48 * args.R * math.sqrt(args.b / args.h))),
                m_margin=args.m_margin, exterior=args.exterior,
                R_out=args.r_out)
            thr = args.threshold_frac * args.b * args.h
            res = models2d.disk_spectrum(spec, thr, threads=threads)
            out_dir.mkdir(parents=True, exist_ok=True)
            path = out_dir / "disk-spectrum.csv"
            with open(path, "w", encoding="utf-8", newline="\n") as fh:
                fh.write("index,m,eigenvalue\n")
                for i, (m, e) in enumerate(zip(res.sector_labels,
                                               res.eigenvalues), 1):
                    fh.write(f"{i},{m},{_fmt(e)}\n")
            print(f"{len(res)} eigenvalues below {_fmt(thr)} -> {path}")
            print(f"certificates: {res.certificates}")
            return 0

        if cmd in ("verify-thm1", "verify-thm2", "verify-counting"):
            h_list = [float(x) for x in args.h_list.split(",") if x]
            template = harness.DiskTemplate(R=args.R, b=args.b,
                                            n_radial=args.n_radial,
                                            m_margin=args.m_margin)
            if cmd == "verify-thm1":
                t = harness.verify_theorem1(template, h_list, threads=threads)
                checks = [("last raw row within 10%",
                           abs(t.rows[-1].ratio - 1.0) <= 0.10,
                           f"ratio={t.rows[-1].ratio:.4f}")]
                if len(t.rows) >= 3:
                    fit = harness.extrapolate(t)
                    checks.insert(0, (
                        "extrapolated limit within 5% of coefficient",
                        abs(fit.limit_estimate - t.rows[-1].rhs)
                        <= 0.05 * abs(t.rows[-1].rhs),
                        f"limit={fit.limit_estimate:.6f} "
                        f"rhs={t.rows[-1].rhs:.6f}"))
            elif cmd == "verify-thm2":
                t = harness.verify_theorem2(template, args.a, h_list,
                                            threads=threads)
                bulk = t.metadata["bulk_term"]
                last = t.rows[-1].lhs
                if args.a > 0:
                    ok = abs(last - bulk) <= 0.15 * abs(bulk)
                else:
                    ok = last < 0.02
                checks = [("differenced quantity against bulk term", ok,
                           f"value={last:.6f} bulk={bulk:.6f}")]
            else:
                t = harness.verify_counting(template, args.lambda_frac,
                                            h_list, threads=threads)
                rhs = t.rows[-1].rhs
                if rhs == 0.0:
                    ok = t.rows[-1].lhs < 0.02
                    detail = f"lhs={t.rows[-1].lhs:.6f} (empty level set)"
                elif len(t.rows) >= 3:
                    fit = harness.extrapolate(t)
                    ok = abs(fit.limit_estimate - rhs) <= 0.10 * rhs
                    detail = f"limit={fit.limit_estimate:.6f} rhs={rhs:.6f}"
                else:
                    ok = abs(t.rows[-1].ratio - 1.0) <= 0.10
                    detail = f"ratio={t.rows[-1].ratio:.4f} (too few rows " \
                             f"to extrapolate)"
                checks = [("counting sweep against coefficient", ok, detail)]
            paths = reporting.write_report(t, out_dir, checks=checks)
            print(reporting.format_report(t, checks), end="")
            print("wrote: " + ", ".join(str(p) for p in paths))
            return 0 if all(ok for _, ok, _ in checks) else 1

        if cmd == "verify-projectors":
            rng = np.random.default_rng(args.seed)
            ok_all = True
            # constant diagonal of the whole-plane kernels
            worst = 0.0
            for _ in range(100):
                j = int(rng.integers(1, 9))
                h = float(rng.uniform(0.05, 2.0))
                b = float(rng.uniform(0.5, 4.0))
                x = rng.uniform(-3, 3, 2)
                k = projectors.ProjectorKernel("landau", j, h, b)
                v = projectors.landau_kernel_eval(k, x, x)
                worst = max(worst, abs(v - b / (2 * np.pi * h)))
            ok = worst < 1e-12
            ok_all &= ok
            print(f"{'PASS' if ok else 'FAIL'}  whole-plane diagonal "
                  f"b/(2 pi h): worst |dev| = {worst:.2e}")
            probe = projectors.TestFunction.gaussian_probe()
            r = projectors.verify_resolution_identity(
                probe, xi_cut=args.xi_cut, j_max=args.j_max)
            ok = r < 1e-3
            ok_all &= ok
            print(f"{'PASS' if ok else 'FAIL'}  resolution of identity: "
                  f"residual = {r:.2e}")
            kern = projectors.ProjectorKernel("halfplane", 1, 0.5, 2.0, xi=0.8)
            res = projectors.verify_intertwining(kern, probe)
            ok = res.residual is not None and res.residual < 1e-3
            ok_all &= ok
            print(f"{'PASS' if ok else 'FAIL'}  intertwining: residual = "
                  f"{res.residual:.2e}, eigenvalue/(hb) = "
                  f"{res.eigenvalue_estimate / (0.5 * 2.0):.6f}")
            return 0 if ok_all else 1

        if cmd == "prop-variational":
            res = harness.variational_check(args.seed, args.trials)
            print(f"{'PASS' if res.passed else 'FAIL'}  {res.trials} trials, "
                  f"{len(res.violations)} violations")
            for v in res.violations[:3]:
                print(f"  counterexample: {v}")
            return 0 if res.passed else 1

        if cmd == "report":
            t = reporting.read_table_csv(args.csv)
            paths = reporting.write_report(t, out_dir, stem=Path(args.csv).stem)
            print(reporting.format_report(t), end="")
            print("wrote: " + ", ".join(str(p) for p in paths))
            return 0

    except MagedgeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    parser.error(f"unhandled command {args.command!r}")


def main():
    sys.exit(dispatch())


if __name__ == "__main__":
    main()
