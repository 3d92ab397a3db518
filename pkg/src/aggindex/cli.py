"""Command-line interface: ``aggindex <command> [options]``.

Exit codes: 0 success, 1 bad arguments, 2 runtime failure.
"""

from __future__ import annotations

import argparse
import csv
import logging
import re
import sys
import warnings
from pathlib import Path

from . import __version__
from .cade import DEFAULT_ALPHA, CalibrationTable, analyze_image, calibrate, cade, schedule_for_radius
from .experiment import ExperimentSpec, run_experiment, write_report
from .genesis import generate_with_image
from .io_store import (FormatError, format_configuration, load_calibration, load_configuration, load_image,
                       save_calibration, save_configuration, save_image)
from .morphology import SCHEDULE_VARIANTS, thicken_trace
from .pointstats import clark_evans, euler_radius_curve, measured_minkowski
from .raster import rasterize, rasterize_centers
from .topology import CONNECTIVITIES, euler_number

log = logging.getLogger("aggindex")

EXIT_OK, EXIT_USAGE, EXIT_RUNTIME = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _seed_list(values: list[str]) -> list[int]:
    """Seeds given as integers, comma lists or inclusive ranges like ``1-10``."""
    seeds = []
    for v in values:
        for part in filter(None, (x.strip() for x in v.split(","))):
            m = re.fullmatch(r"(\d+)-(\d+)", part)
            if m:
                seeds.extend(range(int(m[1]), int(m[2]) + 1))
            else:
                try:
                    seeds.append(int(part))
                except ValueError:
                    raise UsageError(f"bad seed {part!r}") from None
    return seeds


def _radii(spec: str) -> list[float]:
    """``start:stop:step`` (stop inclusive) or a comma-separated list."""
    if ":" in spec:
        start, stop, step = (float(x) for x in spec.split(":"))
        out, k = [], 0
        while start + k * step <= stop + 1e-9:
            out.append(start + k * step)
            k += 1
        return out
    return [float(x) for x in spec.split(",") if x.strip()]


def _writer(out):
    if out in (None, "-"):
        return sys.stdout, False
    return open(out, "w", newline=""), True


def _schedule(args, rho):
    return schedule_for_radius(rho, variant=args.schedule)


# ---------------------------------------------------------------- commands

def cmd_generate(args):
    config, pixels = generate_with_image(args.gamma, args.p, args.rho, args.box_size, args.seed)
    if args.out:
        save_configuration(args.out, config)
    else:
        sys.stdout.write(format_configuration(config))
    if args.image:
        save_image(args.image, pixels, plain=args.plain)
    log.info("%d particles, achieved p = %.6f", len(config), config.achieved_p)


def cmd_rasterize(args):
    if not args.out:
        raise UsageError("rasterize needs --out")
    save_image(args.out, rasterize(load_configuration(args.config)), plain=args.plain)


def cmd_euler(args):
    print(euler_number(load_image(args.image), args.connectivity))


def cmd_thicken_trace(args):
    image = load_image(args.image)
    schedule = _schedule(args, args.rho)
    trace = thicken_trace(image, schedule, args.connectivity, dump_dir=args.dump_steps)
    fh, close = _writer(args.out)
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["step", "element", "chi", "area"])
    for k, (chi, area) in enumerate(zip(trace.chis, trace.areas)):
        w.writerow([k, schedule.steps[k - 1].value if k else "", chi, area])
    if close:
        fh.close()


def cmd_cade(args):
    image = load_image(args.image)
    schedule = _schedule(args, args.rho)
    trace = thicken_trace(image, schedule, args.connectivity)
    n1 = schedule.n1 if args.n1 is None else args.n1
    n2 = schedule.n2 if args.n2 is None else args.n2
    print(cade(trace, n1, n2).value)


def cmd_calibrate(args):
    seeds = _seed_list(args.seeds)
    schedule = _schedule(args, args.rho)
    entries = [calibrate(p, args.rho, args.box_size, seeds, schedule, args.connectivity) for p in args.p]
    if args.out:
        save_calibration(args.out, entries)
    for e in entries:
        print(f"p={e.p:g} e_hat_p={e.mean:.1f} min={e.min:g} max={e.max:g} std={e.std:.1f}")


def cmd_delta(args):
    image = load_image(args.image)
    if args.calibration is None:
        calibration = "auto"
    else:
        try:
            calibration = float(args.calibration)
        except ValueError:
            calibration = load_calibration(args.calibration)
            if not isinstance(calibration, CalibrationTable) or not calibration.entries:
                raise UsageError(f"{args.calibration}: empty calibration")
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        result = analyze_image(image, args.rho, calibration, args.alpha, _schedule(args, args.rho),
                               args.connectivity, _seed_list(args.seeds))
    for w in caught:
        print(f"warning: {w.message}", file=sys.stderr)
    print(f"delta={result.delta!r} cade={result.cade} e_hat_p={result.e_hat!r} p={result.p!r}")


def cmd_clark_evans(args):
    print(repr(clark_evans(load_configuration(args.config), args.edge_correction)))


def cmd_euler_curve(args):
    config = load_configuration(args.config)
    radii = _radii(args.radii)
    curve = euler_radius_curve(config.centers, radii, config.box_size, args.connectivity)
    fh, close = _writer(args.out)
    w = csv.writer(fh, lineterminator="\n")
    if args.minkowski:
        w.writerow(["r", "chi", "e", "a", "l"])
        for r, chi in zip(curve.radii, curve.chi):
            m = measured_minkowski(rasterize_centers(config.centers, r, config.box_size), len(config), r,
                                   args.connectivity)
            w.writerow([repr(float(r)), int(chi), repr(m.e), repr(m.a), repr(m.l)])
    else:
        w.writerow(["r", "chi"])
        for r, chi in zip(curve.radii, curve.chi):
            w.writerow([repr(float(r)), int(chi)])
    if close:
        fh.close()


def cmd_experiment(args):
    spec = ExperimentSpec(tuple(args.p), tuple(args.gamma), tuple(_seed_list(args.seeds)), args.rho,
                          args.box_size, args.schedule, args.connectivity, args.alpha, args.out, args.workers)
    out = args.out or "experiment_out"

    def progress(run, k, total):
        log.info("[%d/%d] p=%g gamma=%g seed=%d cade=%d ce=%.3f", k, total, run.p, run.gamma, run.seed,
                 run.cade, run.clark_evans)

    bundle = run_experiment(spec, progress, curves=not args.no_euler_curves)
    write_report(bundle, out)
    if len(spec.seeds) < 2:
        print("warning: single seed, calibration standard deviation unavailable", file=sys.stderr)
    for (cell, err) in bundle.failures:
        print(f"failed cell p={cell[0]:g} gamma={cell[1]:g} seed={cell[2]}: {err}", file=sys.stderr)
    print(f"wrote {out}/ ({len(bundle.rows)} runs, {len(bundle.failures)} failed)")
    return EXIT_OK if bundle.ok else EXIT_RUNTIME


# ---------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    g = common.add_argument_group("global options")
    g.add_argument("--seed", type=int, default=1, help="random seed (default: 1)")
    g.add_argument("--out", default=None, help="output file or directory")
    g.add_argument("--workers", type=int, default=None, help="worker processes (default: CPU count)")
    g.add_argument("--schedule", choices=SCHEDULE_VARIANTS, default="count-matched",
                   help="thickening element sequence (default: count-matched)")
    g.add_argument("--connectivity", choices=sorted(CONNECTIVITIES), default="8-4",
                   help="foreground-background adjacency pair (default: 8-4)")
    g.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")

    parser = _Parser(prog="aggindex", description=__doc__.splitlines()[0], parents=[common])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", metavar="command", parser_class=_Parser)
    sub.required = True

    def add(name, func, help, aliases=()):
        p = sub.add_parser(name, help=help, description=help, parents=[common], aliases=list(aliases))
        p.set_defaults(func=func)
        return p

    def geometry(p):
        p.add_argument("--rho", type=float, default=10, help="particle radius in pixels (default: 10)")
        p.add_argument("--box-size", type=int, default=2400, help="box side L in pixels (default: 2400)")

    p = add("generate", cmd_generate, "generate an agglomerated configuration")
    p.add_argument("--gamma", type=float, required=True, help="agglomeration parameter in [0, 1]")
    p.add_argument("--p", type=float, required=True, help="target volume fraction in (0, 0.5]")
    geometry(p)
    p.add_argument("--image", help="also write the raster as a bitmap")
    p.add_argument("--plain", action="store_true", help="write plain (P1) instead of raw (P4) bitmaps")

    p = add("rasterize", cmd_rasterize, "rasterize a centers file to a bitmap")
    p.add_argument("--config", required=True, help="centers CSV")
    p.add_argument("--plain", action="store_true", help="write plain (P1) instead of raw (P4)")

    p = add("euler", cmd_euler, "Euler number of a bitmap")
    p.add_argument("--image", required=True)

    p = add("thicken-trace", cmd_thicken_trace, "Euler number and area along the thickening")
    p.add_argument("--image", required=True)
    p.add_argument("--rho", type=float, default=10, help="particle radius in pixels (default: 10)")
    p.add_argument("--dump-steps", metavar="DIR", help="write every intermediate image to DIR")

    p = add("cade", cmd_cade, "CADE of a bitmap")
    p.add_argument("--image", required=True)
    p.add_argument("--rho", type=float, default=10, help="particle radius in pixels (default: 10)")
    p.add_argument("--n1", type=int, default=None, help="first step counted (default: 1)")
    p.add_argument("--n2", type=int, default=None, help="last step counted (default: round(rho))")

    p = add("calibrate", cmd_calibrate, "standard-pattern CADE averages")
    p.add_argument("--p", type=float, nargs="+", required=True, help="volume fractions")
    geometry(p)
    p.add_argument("--seeds", nargs="+", default=["1-10"], help="seeds, e.g. 1-10 (default: 1-10)")

    p = add("delta", cmd_delta, "agglomeration index of a bitmap", aliases=("analyze",))
    p.add_argument("--image", required=True)
    p.add_argument("--rho", type=float, required=True, help="particle radius in pixels")
    p.add_argument("--calibration", help="calibration CSV or a number; default: calibrate on the fly")
    p.add_argument("--alpha", type=float, default=DEFAULT_ALPHA, help="normalizing factor (default: 1.2)")
    p.add_argument("--seeds", nargs="+", default=["1-10"], help="seeds for on-the-fly calibration")

    p = add("clark-evans", cmd_clark_evans, "Clark-Evans index of a centers file")
    p.add_argument("--config", required=True)
    p.add_argument("--edge-correction", choices=("none", "reflect"), default="none")

    p = add("euler-curve", cmd_euler_curve, "Euler number vs disk radius around fixed centers")
    p.add_argument("--config", required=True)
    p.add_argument("--radii", default="1:30:1", help="start:stop:step or comma list (default: 1:30:1)")
    p.add_argument("--minkowski", action="store_true", help="add normalized e, a, l columns")

    p = add("experiment", cmd_experiment, "run the full (p, gamma, seed) grid")
    p.add_argument("--p", type=float, nargs="+", default=[0.1, 0.2, 0.3, 0.4])
    p.add_argument("--gamma", type=float, nargs="+", default=[0.0, 0.3, 0.6, 0.9])
    p.add_argument("--seeds", nargs="+", default=["1-10"], help="seeds (default: 1-10)")
    geometry(p)
    p.add_argument("--alpha", type=float, default=DEFAULT_ALPHA)
    p.add_argument("--no-euler-curves", action="store_true", help="skip Euler-vs-radius curves")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s", stream=sys.stderr)
    try:
        code = args.func(args)
    except FormatError as exc:
        print(f"aggindex: error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except (UsageError, ValueError) as exc:
        print(f"aggindex: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (OSError, RuntimeError) as exc:
        print(f"aggindex: error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    return EXIT_OK if code is None else code


if __name__ == "__main__":
    sys.exit(main())
