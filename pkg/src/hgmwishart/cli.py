"""Command-line front end: CDF curves of the extreme roots as CSV.

Numbers go to stdout (or ``--out``) as CSV with 17 significant digits;
every diagnostic goes to stderr.  Defaults of the numeric options can be
overridden with environment variables named ``HGMW_<OPTION>``, e.g.
``HGMW_Q0=0.1`` or ``HGMW_ABSERR=1e-30``.

Exit codes: 0 success, 2 bad parameters, 3 no admissible initial point,
4 integration failure, 5 tied ``beta`` (singular for the HGM).
"""

from __future__ import annotations

import argparse
import csv
import logging
import os
import sys
import warnings
from contextlib import contextmanager
from typing import Sequence

import numpy as np

from .dist import l1_density_khatri, max_root_cdf, min_root_upper, null_constantine, null_venables
from .errors import (DiagonalSingularityError, DomainError, HgmError, InitializationError,
                     IntegrationError, ParameterError, SingularityError)
from .hgm import IntegratorConfig, ProblemSpec, initial_vector, integrate_cdf
from .oracle import empirical_max_root_cdf

ENV_PREFIX = "HGMW_"

EXIT_OK = 0
EXIT_PARAMETER = 2
EXIT_INIT = 3
EXIT_INTEGRATION = 4
EXIT_DIAGONAL = 5

log = logging.getLogger("hgmwishart")


def _env(name: str, default, cast=float):
    raw = os.environ.get(ENV_PREFIX + name.upper().replace("-", "_"))
    if raw is None:
        return default
    try:
        return cast(raw)
    except ValueError:
        raise ParameterError(f"bad value {raw!r} for {ENV_PREFIX}{name.upper()}") from None


def _floats(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a comma separated list of numbers, got {text!r}")


def _err_pair(text: str) -> tuple[float, float]:
    vals = _floats(text)
    if len(vals) != 2:
        raise argparse.ArgumentTypeError("--err takes two numbers: abserr,relerr")
    return vals[0], vals[1]


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="hgmwishart",
        description="Distribution of the extreme roots of W1 W2^-1 for two Wishart matrices.",
        epilog=f"Numeric defaults can be overridden with {ENV_PREFIX}<OPTION> environment variables.")
    p.add_argument("-v", "--verbose", action="store_true", help="progress messages on stderr")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, need_beta=True):
        sp.add_argument("--m", type=int, required=True, help="dimension")
        if need_beta:
            sp.add_argument("--beta", type=_floats, required=True,
                            help="eigenvalues of Sigma2^-1 Sigma1, comma separated")
        sp.add_argument("--n1", type=float, required=True, help="degrees of freedom of W1")
        sp.add_argument("--n2", type=float, required=True, help="degrees of freedom of W2")
        sp.add_argument("--q", type=float, required=True, help="last evaluation point")
        sp.add_argument("--q0", type=float, default=_env("q0", 0.3),
                        help="first (initial) evaluation point (default 0.3)")
        sp.add_argument("--grid-points", type=int, default=_env("grid_points", 100, int),
                        help="number of output rows (default 100)")
        sp.add_argument("--linear", action="store_true", help="linear instead of geometric grid")
        sp.add_argument("--out", help="write the CSV here instead of stdout")
        sp.add_argument("--gnuplot", metavar="SCRIPT", help="also write a gnuplot script for --out")

    def tuning(sp):
        sp.add_argument("--abserr", type=float, default=_env("abserr", 1e-10),
                        help="absolute error of the Runge-Kutta steps, probability scale")
        sp.add_argument("--relerr", type=float, default=_env("relerr", 1e-10),
                        help="relative error of the Runge-Kutta steps")
        sp.add_argument("--err", type=_err_pair, metavar="ABS,REL",
                        help="shorthand for --abserr ABS --relerr REL")
        sp.add_argument("--no-auto-abserr", action="store_true",
                        help="do not tighten abserr from the initial series")
        sp.add_argument("--series-error", type=float, default=_env("series_error", 1e-5),
                        help="relative stopping threshold of the initial series")
        sp.add_argument("--x0value-min", type=float, default=_env("x0value_min", 1e-60),
                        help="smallest acceptable initial probability")
        sp.add_argument("--max-degree", type=int, default=_env("max_degree", 200, int),
                        help="degree cap of the initial series")

    sp = sub.add_parser("p2wishart", help="Pr(l_1 < x) of the largest root by the HGM")
    common(sp)
    tuning(sp)

    sp = sub.add_parser("minroot", help="Pr(l_m >= x) of the smallest root")
    common(sp)
    tuning(sp)

    sp = sub.add_parser("null", help="Pr(l_1 <= x) when Sigma1 = Sigma2 (closed forms)")
    common(sp, need_beta=False)
    sp.add_argument("--formula", choices=("auto", "constantine", "venables"), default="auto",
                    help="auto uses the finite sum when (n2-m-1)/2 is a non-negative integer")

    sp = sub.add_parser("density", help="density of the largest root")
    common(sp)
    tuning(sp)
    sp.add_argument("--method", choices=("khatri", "hgm"), default="khatri",
                    help="3F2 series or the HGM derivative")

    sp = sub.add_parser("mc-check", help="p2wishart curve next to a Monte Carlo estimate")
    common(sp)
    tuning(sp)
    sp.add_argument("--seed", type=int, default=_env("seed", 0, int))
    sp.add_argument("--n-samples", type=int, default=_env("n_samples", 200_000, int))
    sp.add_argument("--workers", type=int, default=_env("workers", 1, int))
    return p


def _config(args) -> IntegratorConfig:
    abserr, relerr = args.err if args.err else (args.abserr, args.relerr)
    return IntegratorConfig(q0=args.q0, series_error=args.series_error,
                            x0value_min=args.x0value_min, abs_err=abserr, rel_err=relerr,
                            max_degree=args.max_degree, auto_abs_err=not args.no_auto_abserr)


def _spec(args) -> ProblemSpec:
    if len(args.beta) != args.m:
        raise ParameterError(f"--beta has {len(args.beta)} values but --m is {args.m}")
    return ProblemSpec(args.m, args.n1, args.n2, tuple(args.beta))


def _grid(lo: float, hi: float, n: int, linear: bool) -> np.ndarray:
    if n < 2:
        raise ParameterError("--grid-points must be at least 2")
    if not 0 < lo < hi:
        raise ParameterError(f"need 0 < q0 < q, got q0={lo:g}, q={hi:g}")
    grid = np.linspace(lo, hi, n) if linear else np.geomspace(lo, hi, n)
    grid[0], grid[-1] = lo, hi
    return grid


def _ties_message(spec: ProblemSpec) -> str:
    if np.ptp(spec.beta) <= 1e-8 * max(spec.beta):
        return ("beta has repeated values: the Pfaffian system is singular on the diagonal. "
                "All beta are equal, so use the `null` subcommand (with x scaled by beta).")
    return ("beta has repeated values: the Pfaffian system is singular on the diagonal; "
            "perturb beta or use the series (dist.max_root_cdf(..., method='series')).")


def _largest_root_curve(spec: ProblemSpec, cfg: IntegratorConfig, args):
    if spec.has_ties(cfg.gap):
        raise DiagonalSingularityError(_ties_message(spec))
    x0, state = initial_vector(spec, cfg)
    if x0 != args.q0:
        log.warning("initial point moved from q0=%g to x0=%g", args.q0, x0)
    if x0 >= args.q:
        raise InitializationError(f"accepted initial point x0={x0:g} is not below q={args.q:g}")
    grid = _grid(x0, args.q, args.grid_points, args.linear)
    curve = integrate_cdf(spec, cfg, grid, state=state)
    log.info("x0=%g, %d steps (%d rejected), effective abserr %.3g",
             x0, curve.n_steps, curve.n_rejected, curve.abs_err)
    return curve


def _cmd_p2wishart(args):
    spec, cfg = _spec(args), _config(args)
    curve = _largest_root_curve(spec, cfg, args)
    return ["x", "prob"], [curve.x, curve.prob]


def _cmd_minroot(args):
    spec, cfg = _spec(args), _config(args)
    grid = _grid(args.q0, args.q, args.grid_points, args.linear)
    method = "series" if spec.has_ties(cfg.gap) else "auto"
    return ["x", "prob"], [grid, min_root_upper(spec, grid, method, cfg)]


def _cmd_null(args):
    grid = _grid(args.q0, args.q, args.grid_points, args.linear)
    formula = args.formula
    r2 = args.n2 - args.m - 1
    if formula == "auto":
        formula = "venables" if r2 >= 0 and r2 % 2 == 0 else "constantine"
    if formula == "venables":
        if not args.n1.is_integer() or not args.n2.is_integer():
            raise ParameterError("the finite sum needs integer degrees of freedom")
        vals = [null_venables(args.m, int(args.n1), int(args.n2), float(x)) for x in grid]
    else:
        vals = [null_constantine(args.m, args.n1, args.n2, float(x)) for x in grid]
    return ["x", "prob"], [grid, np.asarray(vals)]


def _cmd_density(args):
    spec, cfg = _spec(args), _config(args)
    if args.method == "hgm":
        curve = _largest_root_curve(spec, cfg, args)
        return ["x", "density"], [curve.x, curve.density]
    grid = _grid(args.q0, args.q, args.grid_points, args.linear)
    vals = [l1_density_khatri(spec, float(x), max_degree=max(args.max_degree, 400)).value
            for x in grid]
    return ["x", "density"], [grid, np.asarray(vals)]


def _cmd_mc_check(args):
    spec, cfg = _spec(args), _config(args)
    curve = _largest_root_curve(spec, cfg, args)
    est = empirical_max_root_cdf(spec, curve.x, args.n_samples, args.seed, workers=args.workers)
    return (["x", "prob", "mc_prob", "mc_se"],
            [curve.x, curve.prob, np.array([e.probability for e in est]),
             np.array([e.standard_error for e in est])])


_COMMANDS = {
    "p2wishart": _cmd_p2wishart,
    "minroot": _cmd_minroot,
    "null": _cmd_null,
    "density": _cmd_density,
    "mc-check": _cmd_mc_check,
}


def _write_csv(stream, header: Sequence[str], columns) -> None:
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(header)
    for row in zip(*columns):
        writer.writerow([f"{float(v):.17g}" for v in row])


def _write_gnuplot(path: str, data: str, header: Sequence[str]) -> None:
    lines = [
        "set datafile separator ','",
        "set key autotitle columnhead",
        f"set xlabel '{header[0]}'",
        f"set ylabel '{header[1]}'",
        "set grid",
    ]
    plots = [f"'{data}' using 1:2 with lines lw 2"]
    if "mc_prob" in header:
        plots.append(f"'{data}' using 1:3:4 with yerrorbars pt 7 ps 0.5")
    lines.append("plot " + ", ".join(plots))
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


@contextmanager
def _warnings_to_stderr():
    def show(message, category, filename, lineno, file=None, line=None):
        print(f"warning: {message}", file=sys.stderr)

    old = warnings.showwarning
    warnings.showwarning = show
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("always")
            warnings.showwarning = show
            yield
    finally:
        warnings.showwarning = old


def run(argv: Sequence[str] | None = None) -> int:
    try:
        parser = _parser()
    except ParameterError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARAMETER
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_PARAMETER
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s", stream=sys.stderr)
    if args.gnuplot and not args.out:
        print("error: --gnuplot needs --out", file=sys.stderr)
        return EXIT_PARAMETER
    if not 0 < args.q0 < args.q:
        print(f"error: need 0 < q0 < q, got q0={args.q0:g}, q={args.q:g}", file=sys.stderr)
        return EXIT_PARAMETER
    try:
        with _warnings_to_stderr():
            header, columns = _COMMANDS[args.command](args)
    except DiagonalSingularityError as exc:
        msg = str(exc)
        if "null" not in msg:
            msg += " (for equal beta use the `null` subcommand)"
        print(f"error: {msg}", file=sys.stderr)
        return EXIT_DIAGONAL
    except SingularityError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INTEGRATION
    except (ParameterError, DomainError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARAMETER
    except InitializationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INIT
    except (IntegrationError, HgmError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INTEGRATION
    if args.out:
        with open(args.out, "w", newline="") as fh:
            _write_csv(fh, header, columns)
        if args.gnuplot:
            _write_gnuplot(args.gnuplot, args.out, header)
    else:
        _write_csv(sys.stdout, header, columns)
        sys.stdout.flush()
    return EXIT_OK


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
