"""``heis``: command-line access to distances, geodesics, flows and experiments.

Exit codes: 0 on success or a passing experiment, 1 when an experiment
fails its quantitative checks, 2 on usage errors.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys

import numpy as np

from . import experiments as ex
from .geodesics import GeodesicParams, cc_distance, geodesic_point, rho, rho_prime, sphere_arrays
from .maps import POTENTIALS, integrate_flow

SAMPLING = {"b", "d", "e", "sesto"}


def _point(text: str) -> np.ndarray:
    try:
        vals = [float(v) for v in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"cannot parse point {text!r}; expected x,y,t") from None
    if len(vals) != 3:
        raise argparse.ArgumentTypeError(f"point {text!r} needs exactly three coordinates")
    return np.array(vals)


def _floats(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"cannot parse number list {text!r}") from None


def _write_rows(path, header, rows):
    fh = open(path, "w", newline="") if path and path != "-" else sys.stdout
    try:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([repr(float(v)) for v in r])
    finally:
        if fh is not sys.stdout:
            fh.close()


def cmd_dist(args) -> int:
    print(f"{float(cc_distance(args.p, args.q)):.12f}")
    return 0


def cmd_geodesic(args) -> int:
    g = GeodesicParams(args.phi, args.alpha, tuple(args.base))
    s = np.linspace(0.0, args.length, args.steps + 1)
    pts = geodesic_point(g, s)
    _write_rows(args.out, ["s", "x", "y", "t"], np.column_stack([s, pts]))
    return 0


def cmd_sphere(args) -> int:
    rng = np.random.default_rng(args.seed)
    alpha = rng.uniform(0.0, 2 * math.pi, args.n)
    phi = rng.uniform(-2 * math.pi, 2 * math.pi, args.n) / args.radius
    pts = sphere_arrays(args.radius, phi, alpha)
    _write_rows(args.out, ["alpha", "phi", "x", "y", "t"], np.column_stack([alpha, phi, pts]))
    return 0


def cmd_rho(args) -> int:
    theta = np.linspace(args.lo, args.hi, args.n)
    _write_rows(args.out, ["theta", "rho", "rho_prime"], np.column_stack([theta, rho(theta), rho_prime(theta)]))
    return 0


def cmd_flow(args) -> int:
    end = integrate_flow(POTENTIALS[args.potential], args.s, args.point, args.h)
    print(json.dumps([float(v) for v in end]))
    return 0


def _run_experiment(args) -> ex.ExperimentReport:
    th = args.theorem
    grid = ex.EpsGrid(tuple(args.grid)) if args.grid else ex.EpsGrid()
    seed = args.seed if args.seed is not None else 0
    if th == "a":
        return ex.run_theorem_a(args.family, grid, C=args.C)
    if th == "b":
        return ex.run_theorem_b(args.family, grid, R=args.R, n=args.n or 2000, seed=seed, C=args.C)
    if th == "c":
        return ex.run_theorem_c(args.family, grid, C=args.C)
    if th == "d":
        return ex.run_theorem_d(args.family, grid, R=args.R, n=args.n or 4000, seed=seed, C=args.C)
    if th == "e":
        return ex.run_theorem_e(args.family, grid, R=args.R, n=args.n or 200_000, seed=seed, C=args.C)
    if th == "sesto":
        sigmas = args.sigma or [1e-3, 1e-4, 1e-5]
        return ex.run_sesto(args.q, args.s, tuple(sigmas), n=args.n or 100_000, seed=seed, C0=args.C)
    if th == "cartozzo-b":
        return ex.check_cartozzo_b()
    return ex.appendix_inequality_check()


def cmd_experiment(args) -> int:
    if args.theorem in SAMPLING and args.seed is None:
        raise ValueError(f"--seed is required for --theorem {args.theorem}")
    report = _run_experiment(args)
    if args.out:
        text = report.dumps() if args.format == "json" else report.to_csv()
        with open(args.out, "w", newline="") as fh:
            fh.write(text if text.endswith("\n") else text + "\n")
    print(report.summary())
    return 0 if report.passed else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="heis", description="Geometry of the first Heisenberg group.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("dist", help="control distance between two points",
                       description="Carnot-Caratheodory distance d(P, Q); vertical points give sqrt(pi |t|).")
    p.add_argument("p", type=_point, help="first point as x,y,t")
    p.add_argument("q", type=_point, help="second point as x,y,t")
    p.set_defaults(func=cmd_dist)

    p = sub.add_parser("geodesic", help="trace a geodesic to CSV",
                       description="Unit-speed geodesic base . gamma(s) with curvature phi and initial heading alpha.")
    p.add_argument("--phi", type=float, required=True)
    p.add_argument("--alpha", type=float, default=0.0)
    p.add_argument("--base", type=_point, default=np.zeros(3))
    p.add_argument("--length", type=float, required=True)
    p.add_argument("--steps", type=int, default=200)
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_geodesic)

    p = sub.add_parser("sphere", help="sample a geodesic sphere to CSV",
                       description="Random points of the sphere S(O, r) via its (alpha, phi) chart.")
    p.add_argument("--radius", type=float, default=1.0)
    p.add_argument("--n", type=int, default=1000)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_sphere)

    p = sub.add_parser("rho", help="table of the distance rho(theta) and its derivative",
                       description="rho(theta) = d(O, (2 sin(theta/2), 0, 4 sin(theta/2) cos(theta/2))) "
                                   "and its closed-form derivative.")
    p.add_argument("--n", type=int, default=50)
    p.add_argument("--lo", type=float, default=0.05)
    p.add_argument("--hi", type=float, default=math.pi - 0.3)
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_rho)

    p = sub.add_parser("flow", help="integrate a contact flow from a potential",
                       description="RK4 time-s flow of the contact field generated by a scalar potential.")
    p.add_argument("--potential", choices=sorted(POTENTIALS), required=True)
    p.add_argument("--s", type=float, required=True)
    p.add_argument("--point", type=_point, required=True)
    p.add_argument("--h", type=float, default=1e-3)
    p.set_defaults(func=cmd_flow)

    p = sub.add_parser(
        "experiment", help="run a stability experiment",
        description="Stability of (1+eps)-biLipschitz maps: a = images of lines, b = the horizontal plane, "
                    "c = the vertical axis, d = balls up to an isometry, e = mean oscillation of the "
                    "Pansu differential, sesto = spheres tangent to the plane, cartozzo-b = long-lived "
                    "geodesics, appendix = two distances that differ.")
    p.add_argument("--theorem", choices=ex.THEOREMS, required=True)
    p.add_argument("--family", choices=ex.FAMILIES, default="dilation")
    p.add_argument("--seed", type=int)
    p.add_argument("--grid", type=_floats, help="comma-separated decreasing eps values")
    p.add_argument("--C", type=float, default=10.0, help="constant in the bound C eps^power")
    p.add_argument("--R", type=float, default=1.0)
    p.add_argument("--n", type=int, help="sample count")
    p.add_argument("--q", type=float, default=1.0)
    p.add_argument("--s", type=float, default=math.pi / 2)
    p.add_argument("--sigma", type=_floats, help="one or more sigma values")
    p.add_argument("--out")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.set_defaults(func=cmd_experiment)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, KeyError) as exc:
        print(f"heis {args.command}: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
