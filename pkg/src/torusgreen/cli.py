"""Command-line front end: ``torusgreen <subcommand> [options]``.

Exit status is 0 on success, 2 on a usage error and 1 when a computation
fails; in the last case a JSON object ``{"error": name, "message": ...}``
is written to standard error.  Complex arguments are written ``re+imi``
(``0.5+0.9i``); a value starting with ``-`` must be attached with ``=``
(``--tau=-0.5+0.9i``).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from pathlib import Path

import numpy as np

from .errors import TorusGreenError
from .lattice import cpair, lattice_from_tau

FLOAT_FMT = ".17g"


def parse_complex(text: str) -> complex:
    s = text.strip().replace(" ", "").replace("I", "i").replace("j", "i")
    if not s:
        raise argparse.ArgumentTypeError("empty complex number")
    if s.endswith("i") and (len(s) == 1 or s[-2] in "+-"):
        s = s[:-1] + "1i"
    try:
        z = complex(s.replace("i", "j"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"cannot parse {text!r} as a complex number (expected re+imi)")
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise argparse.ArgumentTypeError(f"{text!r} is not finite")
    return z


def parse_tau(text: str) -> complex:
    tau = parse_complex(text)
    if not tau.imag > 0:
        raise argparse.ArgumentTypeError("Im(tau) must be positive")
    return tau


def parse_radii(text: str) -> list[float]:
    """``start:ratio:count`` geometric ladder, or a comma-separated list."""
    try:
        if ":" in text:
            start, ratio, count = text.split(":")
            return [float(start) * float(ratio) ** k for k in range(int(count))]
        return [float(x) for x in text.split(",") if x]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad radii {text!r}; expected start:ratio:count or r1,r2,...")


def _positive_int(text: str) -> int:
    try:
        n = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not an integer")
    if n < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return n


def _f(x: float) -> str:
    return format(float(x), FLOAT_FMT)


def _emit(text: str, path: str | None) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _json_text(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=False) + "\n"


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_f(v) if isinstance(v, float) else v for v in row])
    return buf.getvalue()


# -- subcommands --------------------------------------------------------


def cmd_lattice(args) -> int:
    _emit(_json_text(lattice_from_tau(args.tau).to_json()), args.json)
    return 0


def cmd_weierstrass(args) -> int:
    from .elliptic import weierstrass

    _emit(_json_text(weierstrass(args.z, lattice_from_tau(args.tau)).to_json()), args.json)
    return 0


def cmd_critical_points(args) -> int:
    from .green import solve_critical_points

    report = solve_critical_points(lattice_from_tau(args.tau), grid=args.grid)
    _emit(_json_text(report.to_json()), args.json)
    return 0


def cmd_orbit(args) -> int:
    from .dynamics import iterate_orbit

    rec = iterate_orbit(args.z0, args.max_iter, lattice_from_tau(args.tau))
    _emit(_csv_text(("step", "re", "im"), rec.to_csv_rows()), args.out)
    summary = {
        "status": rec.status.value,
        "steps": len(rec.points) - 1,
        "limit": None if rec.limit is None else cpair(rec.limit),
    }
    if args.out not in (None, "-"):
        sys.stdout.write(_json_text(summary))
    return 0


def cmd_region_scan(args) -> int:
    from .plotting import region_csv, region_svg
    from .region import scan_region

    if args.re_min > args.re_max or args.im_min > args.im_max:
        raise _Usage("window bounds must satisfy min <= max")
    if args.im_max <= 0:
        raise _Usage("window must lie in the upper half-plane")
    m = scan_region(
        window=(args.re_min, args.re_max, args.im_min, args.im_max),
        resolution=(args.nx, args.ny),
        cross_validate=args.cross_validate,
        threads=args.threads,
    )
    _emit(region_csv(m), args.out)
    if args.svg:
        region_svg(m, args.svg)
    if args.out not in (None, "-"):
        summary = {
            "nx": args.nx,
            "ny": args.ny,
            "evaluated": int(m.evaluated.sum()),
            "in_region": int(m.in_region.sum()),
            "region_fraction": m.region_fraction(),
        }
        if m.checks is not None:
            done = [c for c in m.checks if c is not None]
            summary["inconsistent"] = sum(1 for c in done if not c.consistent)
        sys.stdout.write(_json_text(summary))
    return 0


def cmd_metric(args) -> int:
    from .metric import MetricSolution, cone_angle, multipliers, pde_residual, u_grid

    sol = MetricSolution.from_tau(args.tau, c=args.c)
    x, y, z, u = u_grid(sol, args.nx, args.ny)
    rows = (
        (float(x[j, i]), float(y[j, i]), float(z[j, i].real), float(z[j, i].imag), float(u[j, i]))
        for j in range(u.shape[0])
        for i in range(u.shape[1])
    )
    _emit(_csv_text(("s", "t", "re", "im", "u"), rows), args.out)
    # residual at a 5x5 interior grid of the cell, well away from the cone point
    tau = sol.lattice.tau
    k = (np.arange(5) + 0.5) / 5
    h = 1e-3
    res = [abs(pde_residual(s + t * tau, h, sol)) for t in k for s in k]
    lam1, lam2 = multipliers(sol)
    summary = {
        "tau": cpair(tau),
        "a": cpair(sol.a),
        "c": cpair(sol.c),
        "lambda1": cpair(lam1),
        "lambda2": cpair(lam2),
        "cone_angle": cone_angle(sol),
        "max_pde_residual": max(res),
    }
    if args.json:
        _emit(_json_text(summary), args.json)
    elif args.out not in (None, "-"):
        sys.stdout.write(_json_text(summary))
    if args.svg:
        from .plotting import metric_svg

        metric_svg(x, y, u, args.svg, title=f"tau = {tau.real:g}{tau.imag:+g}i")
    return 0


def _series(spec: str, truncated: bool = False):
    from . import wvlab

    name, _, arg = spec.partition(":")
    if spec.startswith("polynomial(") and spec.endswith(")"):
        name, arg = "polynomial", spec[len("polynomial(") : -1]
    if name == "exp":
        return wvlab.exp_series()
    if name == "cosh":
        return wvlab.cosh_series()
    if name == "polynomial":
        try:
            d = int(arg)
        except ValueError:
            raise _Usage(f"polynomial degree must be an integer, got {arg!r}")
        if d < 0:
            raise _Usage("polynomial degree must be nonnegative")
        return wvlab.polynomial_series(d)
    if name == "file":
        if not arg:
            raise _Usage("file series needs a path: file:coeffs.txt")
        return wvlab.series_from_file(arg, exact=not truncated)
    raise _Usage(f"unknown series {spec!r}; expected exp, cosh, polynomial:d or file:path")


def cmd_wv_analyze(args) -> int:
    from .wvlab import WVSnapshot, snapshot

    if not 0 < args.eps < 0.5:
        raise _Usage("--eps must lie in (0, 1/2)")
    s = _series(args.series, args.truncated)
    snaps = [snapshot(r, args.eps, s) for r in args.radii]
    _emit(_csv_text(WVSnapshot.CSV_HEADER, (sn.csv_row() for sn in snaps)), args.out)
    return 0


_MAPS = {
    "exp": lambda z: np.exp(z),
    "square": lambda z: z * z,
}


def cmd_wv_escape(args) -> int:
    from .wvlab import escaping_orbit

    rec = escaping_orbit(_MAPS[args.map], args.z0, bound=args.bound, max_iter=args.max_iter)
    rows = [(k, p.real, p.imag) for k, p in enumerate(rec.points)]
    _emit(_csv_text(("step", "re", "im"), rows), args.out)
    if args.out not in (None, "-"):
        sys.stdout.write(
            _json_text({"status": rec.status, "iterations": rec.iterations, "overflow": rec.overflow})
        )
    return 0


def cmd_check_rs(args) -> int:
    from .wvlab import rippon_stallard_check

    rng = np.random.default_rng(args.seed)
    z = rng.uniform(args.re_min, args.re_max, args.n) + 1j * rng.uniform(-math.pi, math.pi, args.n)
    scale = args.scale

    def g(w):
        return scale * np.exp(w)

    rep = rippon_stallard_check(g, g, args.R, z)
    rows = [
        (s.z.real, s.z.imag, s.abs_g, "" if s.lhs is None else s.lhs, "" if s.rhs is None else s.rhs, s.status)
        for s in rep.samples
    ]
    if args.out:
        _emit(_csv_text(("re", "im", "abs_g", "lhs", "rhs", "status"), rows), args.out)
    summary = {
        "R": args.R,
        "scale": scale,
        "samples": len(rep.samples),
        "qualifying": rep.qualifying,
        "vacuous": rep.vacuous,
        "violations": len(rep.violations),
    }
    sys.stdout.write(_json_text(summary))
    return 0 if not rep.violations else 1


# -- parser -------------------------------------------------------------


class _Usage(Exception):
    pass


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="torusgreen", description="Critical points of Green's functions on flat tori.")
    p.add_argument("--threads", type=_positive_int, default=1, help="worker threads for grid scans")
    p.add_argument("--seed", type=int, default=0, help="seed for randomized sampling")
    sub = p.add_subparsers(dest="command", required=True)

    q = sub.add_parser("lattice", help="lattice constants as JSON")
    q.add_argument("--tau", type=parse_tau, required=True)
    q.add_argument("--json", help="output path (default stdout)")
    q.set_defaults(func=cmd_lattice)

    q = sub.add_parser("weierstrass", help="sigma, zeta, wp, wp' at one point (debug)")
    q.add_argument("--tau", type=parse_tau, required=True)
    q.add_argument("--z", type=parse_complex, required=True)
    q.add_argument("--json")
    q.set_defaults(func=cmd_weierstrass)

    q = sub.add_parser("critical-points", help="all critical points of G")
    q.add_argument("--tau", type=parse_tau, required=True)
    q.add_argument("--grid", type=_positive_int, default=24, help="initial Newton seed grid side")
    q.add_argument("--json")
    q.set_defaults(func=cmd_critical_points)

    q = sub.add_parser("orbit", help="orbit of the antimeromorphic map g as CSV")
    q.add_argument("--tau", type=parse_tau, required=True)
    q.add_argument("--z0", type=parse_complex, required=True)
    q.add_argument("--max-iter", type=_positive_int, default=200)
    q.add_argument("--out")
    q.set_defaults(func=cmd_orbit)

    q = sub.add_parser("region", help="tau-plane region maps")
    rsub = q.add_subparsers(dest="region_command", required=True)
    s = rsub.add_parser("scan", help="evaluate the region inequalities on a grid")
    s.add_argument("--re-min", type=float, default=-0.5)
    s.add_argument("--re-max", type=float, default=0.5)
    s.add_argument("--im-min", type=float, default=0.05)
    s.add_argument("--im-max", type=float, default=2.0)
    s.add_argument("--nx", type=_positive_int, default=200)
    s.add_argument("--ny", type=_positive_int, default=200)
    s.add_argument("--cross-validate", action="store_true", help="also run the solver at every sample")
    s.add_argument("--out", help="CSV output path (default stdout)")
    s.add_argument("--svg", help="SVG figure path")
    s.set_defaults(func=cmd_region_scan)

    q = sub.add_parser("metric", help="conic metric built from the nontrivial critical point")
    q.add_argument("--tau", type=parse_tau, required=True)
    q.add_argument("--c", type=parse_complex, default=1.0)
    q.add_argument("--nx", type=_positive_int, default=32)
    q.add_argument("--ny", type=_positive_int, default=32)
    q.add_argument("--out", help="CSV grid of u (default stdout)")
    q.add_argument("--json", help="JSON summary path")
    q.add_argument("--svg")
    q.set_defaults(func=cmd_metric)

    q = sub.add_parser("wv", help="Wiman-Valiron experiments")
    wsub = q.add_subparsers(dest="wv_command", required=True)
    s = wsub.add_parser("analyze", help="snapshots along a radius ladder")
    s.add_argument("--series", default="exp", help="exp, cosh, polynomial:d or file:path")
    s.add_argument("--radii", type=parse_radii, default=parse_radii("25:2:10"))
    s.add_argument("--eps", type=float, default=0.1)
    s.add_argument(
        "--truncated",
        action="store_true",
        help="the coefficient file truncates an infinite series: guard against a too-short tail",
    )
    s.add_argument("--out")
    s.set_defaults(func=cmd_wv_analyze)
    s = wsub.add_parser("escape", help="iterate exp or z^2 until escape")
    s.add_argument("--map", choices=sorted(_MAPS), default="exp")
    s.add_argument("--z0", type=parse_complex, default=1.0)
    s.add_argument("--bound", type=float, default=1e10)
    s.add_argument("--max-iter", type=_positive_int, default=100)
    s.add_argument("--out")
    s.set_defaults(func=cmd_wv_escape)

    q = sub.add_parser("check-rs", help="sweep the logarithmic-derivative lower bound for g = scale*exp")
    q.add_argument("--scale", type=float, default=1.0)
    q.add_argument("--R", type=float, default=1.0)
    q.add_argument("--n", type=_positive_int, default=50)
    q.add_argument("--re-min", type=float, default=3.0)
    q.add_argument("--re-max", type=float, default=30.0)
    q.add_argument("--out")
    q.set_defaults(func=cmd_check_rs)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else 0
    try:
        return args.func(args)
    except _Usage as exc:
        parser.print_usage(sys.stderr)
        sys.stderr.write(f"{parser.prog}: error: {exc}\n")
        return 2
    except TorusGreenError as exc:
        sys.stderr.write(json.dumps(exc.to_dict()) + "\n")
        return 1
    except (OSError, ValueError, FloatingPointError, OverflowError) as exc:
        sys.stderr.write(json.dumps({"error": type(exc).__name__, "message": str(exc)}) + "\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
