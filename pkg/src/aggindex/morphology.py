"""Thickening of binary images and the Euler trace along it.

Two structuring elements are used: the 5-pixel cross (type I) and the
3x3 square (type II).  Alternating them in a period-3 pattern grows a
single pixel into a digital octagon whose area tracks that of a disk of
radius ``k + 1/2`` after ``k`` steps.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .raster import BinaryImage, as_array
from .topology import euler_number

__all__ = [
    "StructuringElement",
    "ThickeningSchedule",
    "EulerTrace",
    "PRINTED_TABLE_SEQUENCE",
    "SCHEDULE_VARIANTS",
    "dilate",
    "default_schedule",
    "thicken_trace",
]


class StructuringElement(enum.Enum):
    TYPE_I = "I"  # cross: center and 4-neighbors
    TYPE_II = "II"  # 3x3 square

    def footprint(self) -> np.ndarray:
        if self is StructuringElement.TYPE_I:
            return np.array([[0, 1, 0], [1, 1, 1], [0, 1, 0]], dtype=bool)
        return np.ones((3, 3), dtype=bool)


I, II = StructuringElement.TYPE_I, StructuringElement.TYPE_II

# Alternative type sequence.  It does not reproduce the standard cumulative
# pixel counts; kept for sensitivity checks.
PRINTED_TABLE_SEQUENCE = (II, I, I, I, II, I, I, II, I, I)

SCHEDULE_VARIANTS = ("count-matched", "printed")


@dataclass(frozen=True)
class ThickeningSchedule:
    """Ordered dilation steps; the first ``skip`` differences are ignored by CADE."""

    steps: tuple[StructuringElement, ...]
    skip: int = 1
    variant: str = "count-matched"

    def __post_init__(self):
        object.__setattr__(self, "steps", tuple(StructuringElement(s) for s in self.steps))
        if not 0 <= self.skip < len(self.steps):
            raise ValueError(
                f"need 0 <= skip < number of steps, got skip={self.skip}, steps={len(self.steps)}"
            )

    @property
    def n1(self) -> int:
        return self.skip

    @property
    def n2(self) -> int:
        return len(self.steps)

    def describe(self) -> str:
        return f"{self.variant}:" + ",".join(s.value for s in self.steps) + f";n1={self.skip}"


@dataclass
class EulerTrace:
    """Euler numbers and foreground areas before and after each thickening step."""

    chis: list[int] = field(default_factory=list)
    areas: list[int] = field(default_factory=list)

    def __len__(self):
        return len(self.chis)


def default_schedule(n2: int = 10, n1: int = 1, variant: str = "count-matched") -> ThickeningSchedule:
    """The standard thickening schedule.

    ``count-matched`` uses the square at steps 1, 4, 7, ... and the cross
    elsewhere; applied to one pixel it yields 1, 9, 21, 37, 69, 97, 129,
    185, 229, 277 pixels.  ``printed`` cycles `PRINTED_TABLE_SEQUENCE`.
    """
    if n2 < 1:
        raise ValueError("schedule needs at least one step")
    if variant == "count-matched":
        steps = tuple(II if k % 3 == 1 else I for k in range(1, n2 + 1))
    elif variant == "printed":
        steps = tuple(PRINTED_TABLE_SEQUENCE[k % len(PRINTED_TABLE_SEQUENCE)] for k in range(n2))
    else:
        raise ValueError(f"unknown schedule variant {variant!r}; choose from {SCHEDULE_VARIANTS}")
    return ThickeningSchedule(steps, n1, variant)


def _dilate_array(arr: np.ndarray, element: StructuringElement) -> np.ndarray:
    out = arr.copy()
    if element is StructuringElement.TYPE_II:
        # separable: horizontal pass then vertical pass over the result
        out[:, 1:] |= arr[:, :-1]
        out[:, :-1] |= arr[:, 1:]
        row = out.copy()
        out[1:, :] |= row[:-1, :]
        out[:-1, :] |= row[1:, :]
    else:
        out[:, 1:] |= arr[:, :-1]
        out[:, :-1] |= arr[:, 1:]
        out[1:, :] |= arr[:-1, :]
        out[:-1, :] |= arr[1:, :]
    return out


def dilate(image, element: StructuringElement):
    """Dilation of the foreground by ``element``, clipped at the frame.

    Returns the same kind it was given: a `BinaryImage` or a ``bool`` array.
    """
    out = _dilate_array(as_array(image), StructuringElement(element))
    if isinstance(image, BinaryImage):
        return BinaryImage(out, image.pixel_size)
    return out


def thicken_trace(image, schedule: ThickeningSchedule | None = None,
                  connectivity: str = "8-4", dump_dir: str | Path | None = None) -> EulerTrace:
    """Apply ``schedule`` and record chi and area before the first and after each step.

    With ``dump_dir`` each intermediate image is written there as
    ``step_XX.pbm`` (raw PBM).
    """
    if schedule is None:
        schedule = default_schedule()
    arr = as_array(image)
    trace = EulerTrace()
    if dump_dir is not None:
        from .io_store import save_image
        dump_dir = Path(dump_dir)
        dump_dir.mkdir(parents=True, exist_ok=True)

    def record(a, step):
        trace.chis.append(euler_number(a, connectivity))
        trace.areas.append(int(np.count_nonzero(a)))
        if dump_dir is not None:
            save_image(dump_dir / f"step_{step:02d}.pbm", a)

    record(arr, 0)
    for step, element in enumerate(schedule.steps, start=1):
        arr = _dilate_array(arr, element)
        record(arr, step)
    return trace
