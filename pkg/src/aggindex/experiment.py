"""The (p, gamma, seed) sweep behind the summary tables.

Every cell is independent: generate a configuration, thicken its raster,
record the Euler trace and the Clark-Evans index.  A single-threaded
reducer then calibrates each volume fraction on its ``gamma = 0`` cells
and derives the agglomeration index of every run.
"""

from __future__ import annotations

import logging
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor, as_completed
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np

from . import __version__
from .cade import DEFAULT_ALPHA, CalibrationEntry, cade, calibration_from_values, delta_agg, schedule_for_radius
from .genesis import generate_with_image
from .morphology import thicken_trace
from .pointstats import clark_evans, euler_radius_curve

log = logging.getLogger(__name__)

__all__ = ["ExperimentSpec", "RunRecord", "ReportBundle", "run_cell", "run_experiment", "write_report"]


@dataclass
class ExperimentSpec:
    ps: tuple[float, ...] = (0.1, 0.2, 0.3, 0.4)
    gammas: tuple[float, ...] = (0.0, 0.3, 0.6, 0.9)
    seeds: tuple[int, ...] = tuple(range(1, 11))
    rho: float = 10
    box_size: int = 2400
    schedule_variant: str = "count-matched"
    connectivity: str = "8-4"
    alpha: float = DEFAULT_ALPHA
    out_dir: str | None = None
    workers: int | None = None
    euler_curve_radii: tuple[float, ...] = tuple(range(2, 32, 2))

    def __post_init__(self):
        if 0.0 not in self.gammas:
            raise ValueError("the gamma list must include 0 (the calibration cells)")
        if not self.seeds:
            raise ValueError("at least one seed is required")
        for p in self.ps:
            if not 0 < p <= 0.5:
                raise ValueError(f"volume fractions must lie in (0, 0.5], got {p}")

    def cells(self):
        return [(p, g, s) for p in self.ps for g in self.gammas for s in self.seeds]


@dataclass
class RunRecord:
    p: float
    gamma: float
    seed: int
    cade: int
    chis: list[int]
    clark_evans: float
    n_particles: int
    achieved_p: float
    euler_curve: list[int] | None = None


@dataclass
class ReportBundle:
    spec: ExperimentSpec
    runs: list[RunRecord]
    rows: list[dict]
    calibrations: dict[float, CalibrationEntry]
    failures: list[tuple[tuple, str]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures


def run_cell(p: float, gamma: float, seed: int, rho: float = 10, box_size: int = 2400,
             schedule_variant: str = "count-matched", connectivity: str = "8-4",
             curve_radii=None) -> RunRecord:
    config, pixels = generate_with_image(gamma, p, rho, box_size, seed)
    schedule = schedule_for_radius(rho, variant=schedule_variant)
    trace = thicken_trace(pixels, schedule, connectivity)
    curve = None
    if curve_radii:
        curve = euler_radius_curve(config.centers, curve_radii, box_size, connectivity).chi.tolist()
    return RunRecord(p, gamma, seed, cade(trace, schedule.n1, schedule.n2).value, list(trace.chis),
                     clark_evans(config), len(config), config.achieved_p, curve)


def _reduce(spec: ExperimentSpec, runs: list[RunRecord]):
    calibrations = {}
    for p in spec.ps:
        base = sorted((r for r in runs if r.p == p and r.gamma == 0.0), key=lambda r: r.seed)
        if base:
            calibrations[p] = calibration_from_values(p, spec.rho, spec.box_size, [r.seed for r in base],
                                                      [r.cade for r in base])
    rows = []
    for r in sorted(runs, key=lambda r: (r.p, r.gamma, r.seed)):
        cal = calibrations.get(r.p)
        delta = delta_agg(r.cade, cal, spec.alpha).delta if cal is not None else math.nan
        rows.append({"p": r.p, "gamma": r.gamma, "seed": r.seed, "cade": r.cade,
                     "e_hat_p": cal.mean if cal is not None else math.nan, "delta": delta,
                     "clark_evans": r.clark_evans, "n_particles": r.n_particles, "achieved_p": r.achieved_p})
    return rows, calibrations


def run_experiment(spec: ExperimentSpec, progress: Callable[[RunRecord, int, int], None] | None = None,
                   curves: bool = False) -> ReportBundle:
    """Run every cell of ``spec`` and reduce.  Failed cells are collected, not raised."""
    cells = spec.cells()
    first_seed = spec.seeds[0]
    kwargs = dict(rho=spec.rho, box_size=spec.box_size, schedule_variant=spec.schedule_variant,
                  connectivity=spec.connectivity)

    def radii_for(seed):
        return spec.euler_curve_radii if curves and seed == first_seed else None

    runs, failures = [], []
    workers = spec.workers or os.cpu_count() or 1
    if workers <= 1:
        for k, (p, g, s) in enumerate(cells, 1):
            try:
                runs.append(run_cell(p, g, s, curve_radii=radii_for(s), **kwargs))
            except Exception as exc:  # one bad cell must not lose the rest
                log.error("cell p=%g gamma=%g seed=%d failed: %s", p, g, s, exc)
                failures.append(((p, g, s), str(exc)))
                continue
            if progress:
                progress(runs[-1], k, len(cells))
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = {pool.submit(run_cell, p, g, s, curve_radii=radii_for(s), **kwargs): (p, g, s)
                       for p, g, s in cells}
            for k, fut in enumerate(as_completed(futures), 1):
                try:
                    runs.append(fut.result())
                except Exception as exc:
                    p, g, s = futures[fut]
                    log.error("cell p=%g gamma=%g seed=%d failed: %s", p, g, s, exc)
                    failures.append((futures[fut], str(exc)))
                    continue
                if progress:
                    progress(runs[-1], k, len(cells))
    runs.sort(key=lambda r: (r.p, r.gamma, r.seed))
    rows, calibrations = _reduce(spec, runs)
    for p, cal in calibrations.items():
        if len(cal.seeds) < 2:
            log.warning("p=%g: calibration from a single seed, standard deviation unavailable", p)
    return ReportBundle(spec, runs, rows, calibrations, failures)


def write_report(bundle: ReportBundle, out_dir) -> list[Path]:
    """Write all CSVs and append to the manifest under ``out_dir``."""
    from .io_store import _write_csv, append_manifest, save_calibration, save_results, save_summary

    started = time.strftime("%Y-%m-%dT%H:%M:%S%z")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    spec = bundle.spec
    written = []

    path = out / "results.csv"
    save_results(path, bundle.rows)
    written.append(path)
    path = out / "calibration.csv"
    save_calibration(path, list(bundle.calibrations.values()))
    written.append(path)
    for name, key in (("table_cade.csv", "cade"), ("table_delta.csv", "delta"),
                      ("table_clark_evans.csv", "clark_evans")):
        save_summary(out / name, bundle.rows, key)
        written.append(out / name)

    # CADE accumulated from step 0 to step n, per cell
    steps = []
    cells: dict[tuple, list[RunRecord]] = {}
    for r in bundle.runs:
        cells.setdefault((r.p, r.gamma), []).append(r)
    for (p, g), rs in sorted(cells.items()):
        acc = np.array([np.concatenate([[0], np.cumsum(np.abs(np.diff(r.chis)))]) for r in rs])
        for n in range(acc.shape[1]):
            steps.append((p, g, n, float(acc[:, n].mean()), int(acc[:, n].max()), int(acc[:, n].min())))
    path = out / "cade_vs_step.csv"
    _write_csv(path, ("p", "gamma", "step", "avg", "max", "min"), steps)
    written.append(path)

    curve_rows = [(r.p, r.gamma, r.seed, rad, chi) for r in bundle.runs if r.euler_curve
                  for rad, chi in zip(spec.euler_curve_radii, r.euler_curve)]
    if curve_rows:
        path = out / "euler_vs_radius.csv"
        _write_csv(path, ("p", "gamma", "seed", "r", "chi"), curve_rows)
        written.append(path)

    spec_dict = asdict(spec)
    spec_dict.pop("out_dir", None)
    spec_dict.pop("workers", None)
    append_manifest(out / "manifest.jsonl", {
        "tool": "aggindex", "version": __version__, "started": started,
        "finished": time.strftime("%Y-%m-%dT%H:%M:%S%z"), "spec": spec_dict,
        "schedule": schedule_for_radius(spec.rho, variant=spec.schedule_variant).describe(),
        "outputs": sorted(p.name for p in written),
        "failures": [{"cell": list(c), "error": e} for c, e in bundle.failures],
    })
    return written
