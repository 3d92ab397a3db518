"""CADE, standard-pattern calibration and the agglomeration index.

CADE (cumulus of the absolute differential Euler number) sums
``|chi(M_i) - chi(M_{i-1})|`` over thickening steps ``n1+1 .. n2``.  The
agglomeration index compares it with the mean CADE ``E_p`` of uniformly
random (``gamma_agg = 0``) patterns of the same volume fraction::

    delta = alpha * (E_p - CADE) / E_p
"""

from __future__ import annotations

import math
import statistics
import warnings
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .genesis import generate_with_image
from .morphology import EulerTrace, ThickeningSchedule, default_schedule, thicken_trace
from .raster import as_array, volume_fraction

__all__ = [
    "DEFAULT_ALPHA",
    "SNAP_TOLERANCE",
    "CadeValue",
    "CalibrationEntry",
    "CalibrationTable",
    "AggIndex",
    "cade",
    "schedule_for_radius",
    "image_cade",
    "calibrate",
    "calibration_from_values",
    "build_calibration_table",
    "delta_agg",
    "analyze_image",
]

DEFAULT_ALPHA = 1.2

#: fraction distance within which a stored calibration is used without interpolation
SNAP_TOLERANCE = 1e-3


@dataclass(frozen=True)
class CadeValue:
    value: int
    n1: int
    n2: int
    source: str = ""

    def __int__(self):
        return self.value


@dataclass(frozen=True)
class CalibrationEntry:
    """Mean CADE of standard patterns at one volume fraction, with its spread."""

    p: float
    rho: float
    box_size: int
    seeds: tuple[int, ...]
    mean: float
    min: float
    max: float
    std: float  # sample standard deviation; nan for a single seed
    values: tuple[int, ...] = ()

    @property
    def e_hat(self) -> float:
        return self.mean


@dataclass(frozen=True)
class AggIndex:
    delta: float
    alpha: float
    cade: int
    e_hat: float
    p: float


def cade(trace: EulerTrace | Sequence[int], n1: int = 1, n2: int | None = None) -> CadeValue:
    """Sum of absolute successive differences of chi over steps ``n1+1 .. n2``."""
    chis = list(trace.chis if isinstance(trace, EulerTrace) else trace)
    if n2 is None:
        n2 = len(chis) - 1
    if not 0 <= n1 < n2 <= len(chis) - 1:
        raise ValueError(f"need 0 <= n1 < n2 <= {len(chis) - 1}, got n1={n1}, n2={n2}")
    value = sum(abs(chis[i] - chis[i - 1]) for i in range(n1 + 1, n2 + 1))
    return CadeValue(int(value), n1, n2)


def schedule_for_radius(rho: float, pixel_size: float = 1.0, variant: str = "count-matched",
                        n1: int = 1) -> ThickeningSchedule:
    """Schedule thickening out to the particle radius, ``n2 = round(rho / a)``."""
    n2 = int(round(rho / pixel_size))
    if n2 <= n1:
        raise ValueError(f"rho / pixel_size = {rho / pixel_size:g} gives too short a schedule")
    return default_schedule(n2, n1, variant)


def image_cade(image, rho: float, schedule: ThickeningSchedule | None = None,
               connectivity: str = "8-4") -> CadeValue:
    """CADE of one picture thickened out to the particle radius."""
    if schedule is None:
        schedule = schedule_for_radius(rho)
    trace = thicken_trace(image, schedule, connectivity)
    return cade(trace, schedule.n1, schedule.n2)


def calibration_from_values(p: float, rho: float, box_size: int, seeds: Sequence[int],
                            values: Sequence[int]) -> CalibrationEntry:
    values = tuple(int(v) for v in values)
    if len(values) != len(seeds) or not values:
        raise ValueError("need one CADE value per seed")
    std = statistics.stdev(values) if len(values) > 1 else math.nan
    return CalibrationEntry(p, rho, box_size, tuple(int(s) for s in seeds),
                            statistics.fmean(values), min(values), max(values), std, values)


def calibrate(p: float, rho: float = 10, box_size: int = 2400, seeds: Sequence[int] = range(1, 11),
              schedule: ThickeningSchedule | None = None, connectivity: str = "8-4") -> CalibrationEntry:
    """Mean CADE of ``gamma_agg = 0`` configurations at fraction ``p``, one per seed."""
    seeds = list(seeds)
    if len(seeds) < 2:
        raise ValueError("calibration needs at least two seeds")
    if schedule is None:
        schedule = schedule_for_radius(rho)
    values = []
    for seed in seeds:
        _, pixels = generate_with_image(0.0, p, rho, box_size, seed)
        values.append(image_cade(pixels, rho, schedule, connectivity).value)
    return calibration_from_values(p, rho, box_size, seeds, values)


@dataclass
class CalibrationTable:
    """Calibrations on a grid of volume fractions, linearly interpolated in ``p``."""

    entries: list[CalibrationEntry] = field(default_factory=list)

    def __post_init__(self):
        self.entries = sorted(self.entries, key=lambda e: e.p)

    def e_hat(self, p: float) -> float:
        if not self.entries:
            raise ValueError("empty calibration table")
        ps = [e.p for e in self.entries]
        if not ps[0] <= p <= ps[-1]:
            raise ValueError(f"p={p:g} outside the calibrated range [{ps[0]:g}, {ps[-1]:g}]")
        return float(np.interp(p, ps, [e.mean for e in self.entries]))

    def entry(self, p: float, snap: float = SNAP_TOLERANCE) -> CalibrationEntry:
        """Entry for fraction ``p``.

        A stored entry within ``snap`` of ``p`` is returned as is (generated
        patterns overshoot their nominal fraction by at most one disk);
        otherwise the mean is interpolated.
        """
        nearest = min(self.entries, key=lambda e: abs(e.p - p), default=None)
        if nearest is not None and abs(nearest.p - p) <= snap:
            return nearest
        ref = self.entries[0]
        mean = self.e_hat(p)
        return CalibrationEntry(p, ref.rho, ref.box_size, ref.seeds, mean, math.nan, math.nan, math.nan)


def build_calibration_table(rho: float = 10, box_size: int = 2400, seeds: Sequence[int] = range(1, 11),
                            ps: Sequence[float] | None = None, **kwargs) -> CalibrationTable:
    if ps is None:
        ps = [round(0.05 * k, 2) for k in range(1, 11)]
    return CalibrationTable([calibrate(p, rho, box_size, seeds, **kwargs) for p in ps])


def delta_agg(cade_value: CadeValue | int, calibration: CalibrationEntry | float,
              alpha: float = DEFAULT_ALPHA) -> AggIndex:
    """``alpha * (E_p - CADE) / E_p``."""
    value = int(cade_value.value if isinstance(cade_value, CadeValue) else cade_value)
    if isinstance(calibration, CalibrationEntry):
        e_hat, p = calibration.mean, calibration.p
    else:
        e_hat, p = float(calibration), math.nan
    if not e_hat > 0:
        raise ValueError("degenerate calibration: mean standard-pattern CADE is zero; "
                         "the volume fraction or window is too small")
    return AggIndex(alpha * (e_hat - value) / e_hat, alpha, value, e_hat, p)


def analyze_image(image, rho: float, calibration: CalibrationEntry | CalibrationTable | float | str = "auto",
                  alpha: float = DEFAULT_ALPHA, schedule: ThickeningSchedule | None = None,
                  connectivity: str = "8-4", seeds: Sequence[int] = range(1, 11)) -> AggIndex:
    """Agglomeration index of an arbitrary binary picture.

    ``calibration="auto"`` measures the picture's volume fraction and
    calibrates on standard patterns of that fraction in a box of the same
    size; the picture must then be square.
    """
    arr = as_array(image)
    p = volume_fraction(arr)
    if p == 0:
        raise ValueError("degenerate image: no foreground (p = 0)")
    if p > 0.5:
        warnings.warn(f"volume fraction {p:.3f} exceeds 0.5, outside the validated regime", stacklevel=2)
    pixel_size = getattr(image, "pixel_size", 1.0)
    if rho / pixel_size < 3:
        warnings.warn(f"rho / pixel size = {rho / pixel_size:g} < 3: schedule too short to be meaningful",
                      stacklevel=2)
    if schedule is None:
        schedule = schedule_for_radius(rho, pixel_size)
    value = image_cade(arr, rho, schedule, connectivity)
    if isinstance(calibration, str):
        if calibration != "auto":
            raise ValueError(f"unknown calibration mode {calibration!r}")
        if arr.shape[0] != arr.shape[1]:
            raise ValueError("automatic calibration needs a square picture; supply a calibration")
        calibration = calibrate(min(p, 0.5), rho, arr.shape[0], seeds, schedule, connectivity)
    elif isinstance(calibration, CalibrationTable):
        calibration = calibration.entry(p)
    result = delta_agg(value, calibration, alpha)
    return AggIndex(result.delta, result.alpha, result.cade, result.e_hat, p)
