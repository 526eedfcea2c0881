"""Command-line entry point.

Subcommands: ``domain gen``, ``solve green|poisson|excursion``,
``conformal``, ``lerw sample|crossing``, ``experiment <id>``.  Experiment
reports are CSV files with a metadata header and are rendered to a figure
alongside the delimited output unless ``--no-figure`` is given.  Flags can
be defaulted from the environment as WALKCROSS_<FLAG>.

Exit codes: 0 success, 2 configuration errors, 3 domain validation errors,
4 solver failures.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys

from . import experiments, lattice, lerw, report
from .errors import (
    Empty,
    NotConnected,
    NotSimplyConnected,
    SolveFailure,
    WalkcrossError,
)

_DOMAIN_ERRORS = (Empty, NotConnected, NotSimplyConnected)


def _env(name: str, fallback):
    return os.environ.get(f"WALKCROSS_{name.upper()}", fallback)


def _parse_point(text: str):
    x, y = text.split(",")
    return (int(x), int(y))


def _parse_points(text: str):
    return [_parse_point(part) for part in text.split(";") if part]


def _parse_ints(text: str):
    return [int(v) for v in str(text).split(",") if v]


def _parse_floats(text: str):
    return [float(v) for v in str(text).split(",") if v]


def _load_domain_spec(spec) -> lattice.LatticeDomain:
    if isinstance(spec, str):
        return lattice.load_domain(spec)
    if "file" in spec:
        return lattice.load_domain(spec["file"])
    if "points" in spec:
        return lattice.build_domain([tuple(p) for p in spec["points"]])
    shape = spec.get("shape", "disk")
    n = int(spec.get("n", 8))
    return _generate(shape, n, None)


def _generate(shape: str, n: int, src) -> lattice.LatticeDomain:
    if shape == "disk":
        return lattice.lattice_disk(n)
    if shape == "square":
        return lattice.square_domain(n)
    if shape == "plus":
        return lattice.plus_domain(n)
    if shape == "file":
        if not src:
            raise ValueError("--shape file needs --src")
        return lattice.load_domain(src)
    raise ValueError(f"unknown shape {shape!r}")


def build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(prog="walkcross", description=__doc__)
    sub = top.add_subparsers(dest="command", required=True)

    p = sub.add_parser("domain", help="domain utilities")
    dsub = p.add_subparsers(dest="domain_command", required=True)
    g = dsub.add_parser("gen", help="generate and validate a domain file")
    g.add_argument("--shape", choices=("disk", "square", "plus", "file"),
                   default="disk")
    g.add_argument("--n", type=int, default=int(_env("n", 8)))
    g.add_argument("--src", help="input file for --shape file")
    g.add_argument("--out", required=True)

    p = sub.add_parser("solve", help="exact kernels on a domain")
    p.add_argument("kind", choices=("green", "poisson", "excursion"))
    p.add_argument("--domain", required=True)
    p.add_argument("--points", required=True,
                   help="semicolon-separated x,y pairs")
    p.add_argument("--tolerance", type=float,
                   default=float(_env("tolerance", 1e-12)))
    p.add_argument("--out", required=True)

    p = sub.add_parser("conformal", help="continuum data on the refined grid")
    p.add_argument("--domain", required=True)
    p.add_argument("--mesh", default=str(_env("mesh", "2,4")))
    p.add_argument("--points", default="1,0;2,0;4,0",
                   help="interior sample points for g")
    p.add_argument("--tolerance", type=float,
                   default=float(_env("tolerance", 1e-12)))
    p.add_argument("--out", required=True)

    p = sub.add_parser("lerw", help="loop-erased walk sampling")
    lsub = p.add_subparsers(dest="lerw_command", required=True)
    s = lsub.add_parser("sample", help="one loop-erased excursion")
    s.add_argument("--domain", required=True)
    s.add_argument("--start", required=True, help="boundary point x,y")
    s.add_argument("--seed", type=int, default=int(_env("seed", 0)))
    s.add_argument("--out")
    c = lsub.add_parser("crossing", help="Monte Carlo crossing probability")
    c.add_argument("--config", required=True, help="JSON crossing config")
    c.add_argument("--samples", type=int, default=int(_env("samples", 100000)))
    c.add_argument("--seed", type=int, default=int(_env("seed", 0)))
    c.add_argument("--threads", type=int, default=int(_env("threads", 1)))
    c.add_argument("--out")

    p = sub.add_parser("experiment", help="comparison experiment suites")
    p.add_argument("id", choices=sorted(experiments.EXPERIMENTS))
    p.add_argument("--family", default="disk")
    p.add_argument("--n", default=str(_env("n", "16,32,64")))
    p.add_argument("--mesh", default=str(_env("mesh", "2,4")))
    p.add_argument("--tolerance", type=float,
                   default=float(_env("tolerance", 1e-12)))
    p.add_argument("--k", type=int, default=2, help="pairs for prop15")
    p.add_argument("--L", default="3,4,5,6", help="lengths for prop15")
    p.add_argument("--out", required=True)
    p.add_argument("--no-figure", action="store_true")
    return top


def _cmd_domain(args) -> int:
    domain = _generate(args.shape, args.n, args.src)
    lattice.save_domain(domain, args.out,
                        header=f"shape={args.shape} n={args.n}")
    print(args.out)
    return 0


def _cmd_solve(args) -> int:
    domain = lattice.load_domain(args.domain)
    points = _parse_points(args.points)
    from .harmonic import excursion_kernel, green_row, poisson_kernel

    rows = []
    if args.kind == "green":
        columns = ("x", "y", "value")
        for src in points:
            field = green_row(domain, src, args.tolerance)
            rows.extend({"x": p[0], "y": p[1], "value": field[p]}
                        for p in sorted(field.values))
    elif args.kind == "poisson":
        columns = ("x", "y", "value")
        for src in points:
            field = poisson_kernel(domain, src, args.tolerance)
            rows.extend({"x": p[0], "y": p[1], "value": field.values[p]}
                        for p in sorted(field.values))
    else:
        columns = ("px", "py", "qx", "qy", "value")
        for a in points:
            for b in points:
                if a != b:
                    rows.append({"px": a[0], "py": a[1], "qx": b[0],
                                 "qy": b[1],
                                 "value": excursion_kernel(
                                     domain, a, b, tolerance=args.tolerance)})
    rep = report.ExperimentReport(
        f"solve-{args.kind}", columns, rows,
        {"domain": args.domain, "points": args.points,
         "solver_tolerance": args.tolerance})
    report.write_csv(rep, args.out)
    print(args.out)
    return 0


def _cmd_conformal(args) -> int:
    from .continuum import conformal_data

    domain = lattice.load_domain(args.domain)
    mesh = tuple(_parse_ints(args.mesh))
    samples = _parse_points(args.points)
    cd = conformal_data(domain, samples, mesh, args.tolerance)
    rows = [{"record": "f_prime", "x": 0, "y": 0,
             "value": cd.f_prime_at_0, "error": cd.error_estimate["f_prime"]}]
    rows.extend({"record": "green", "x": p[0], "y": p[1],
                 "value": cd.g_values[p], "error": cd.error_estimate["g"]}
                for p in samples)
    rows.extend({"record": "theta", "x": p[0], "y": p[1],
                 "value": cd.theta_boundary[p], "error": 0.0}
                for p in sorted(cd.theta_boundary))
    rep = report.ExperimentReport(
        "conformal", ("record", "x", "y", "value", "error"), rows,
        {"domain": args.domain, "mesh_levels": args.mesh,
         "solver_tolerance": args.tolerance})
    report.write_csv(rep, args.out)
    print(args.out)
    return 0


def _cmd_lerw(args) -> int:
    if args.lerw_command == "sample":
        domain = lattice.load_domain(args.domain)
        saw, exit_point = lerw.sample_lerw(domain, _parse_point(args.start),
                                           args.seed)
        payload = {"start": list(saw.sites[0]), "exit": list(exit_point),
                   "seed": args.seed, "sites": [list(p) for p in saw.sites]}
    else:
        with open(args.config, "r", encoding="ascii") as fh:
            spec = json.load(fh)
        domain = _load_domain_spec(spec["domain"])
        cfg = lerw.CrossingConfig(
            domain,
            tuple(tuple(p) for p in spec["xs"]),
            tuple(tuple(p) for p in spec["ys"]))
        est, err = lerw.crossing_probability_mc(cfg, args.samples, args.seed,
                                                args.threads)
        payload = {"estimate": est, "std_error": err, "samples": args.samples,
                   "seed": args.seed, "threads": args.threads,
                   "config": spec,
                   "rng": "philox4x64 key=seed, stream i jumped i*2^128"}
    text = json.dumps(payload, sort_keys=True, indent=2)
    if args.out:
        with open(args.out, "w", encoding="ascii") as fh:
            fh.write(text + "\n")
        print(args.out)
    else:
        print(text)
    return 0


def _cmd_experiment(args) -> int:
    runner = experiments.EXPERIMENTS[args.id]
    if args.id == "prop15":
        rep = runner(k=args.k, L_list=tuple(_parse_floats(args.L)))
    else:
        rep = runner(family=args.family, n_list=tuple(_parse_ints(args.n)),
                     mesh_levels=tuple(_parse_ints(args.mesh)),
                     tolerance=args.tolerance)
    report.write_csv(rep, args.out)
    print(args.out)
    if not args.no_figure:
        base, _, _ = str(args.out).rpartition(".")
        fig_path = (base or str(args.out)) + ".png"
        report.render_figure(rep, fig_path)
        print(fig_path)
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "domain":
            return _cmd_domain(args)
        if args.command == "solve":
            return _cmd_solve(args)
        if args.command == "conformal":
            return _cmd_conformal(args)
        if args.command == "lerw":
            return _cmd_lerw(args)
        return _cmd_experiment(args)
    except _DOMAIN_ERRORS as exc:
        print(f"domain validation failed: {type(exc).__name__}: {exc}",
              file=sys.stderr)
        return 3
    except SolveFailure as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return 4
    except (WalkcrossError, ValueError, OSError, KeyError, json.JSONDecodeError) as exc:
        print(f"configuration error: {type(exc).__name__}: {exc}",
              file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
