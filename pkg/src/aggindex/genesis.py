"""Monte-Carlo construction of agglomerated disk configurations.

Particles of equal radius are dropped into the box ``[0, L]^2`` one at a
time.  Each new particle draws a position and a number ``gamma`` uniform on
``[0, 1]``.  If ``gamma > gamma_agg`` it is placed where it fell (overlap
allowed).  Otherwise its position is redrawn until the disk touches the
union already placed.  Insertion stops at the first particle that lifts
the covered fraction of the raster above the target.

Because the random stream does not depend on the target fraction, a run to
a smaller target is always a prefix of a run to a larger one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .raster import stamp_disk, volume_fraction, rasterize_centers

__all__ = [
    "Configuration",
    "GenerationError",
    "MAX_ATTEMPTS",
    "POSITION_QUANTUM",
    "generate_configuration",
    "generate_with_image",
    "disks_intersect",
    "coverage_fraction",
    "expected_boolean_count",
]

#: resampling attempts allowed for one particle before giving up
MAX_ATTEMPTS = 10_000_000

#: positions are snapped down to multiples of this (a power of two), so
#: reflections and quarter turns of the box act exactly in float64
POSITION_QUANTUM = 2.0 ** -32


class GenerationError(RuntimeError):
    pass


@dataclass(frozen=True, eq=False)
class Configuration:
    """Disk centers in insertion order plus the parameters that produced them.

    ``connected`` records, per particle, whether it was placed under the
    must-touch branch; the first particle is never flagged.
    """

    centers: np.ndarray
    rho: float
    box_size: int
    gamma_agg: float = 0.0
    target_p: float = 0.0
    seed: int = 0
    achieved_p: float = 0.0
    connected: np.ndarray = field(default=None)

    def __post_init__(self):
        centers = np.array(self.centers, dtype=np.float64).reshape(-1, 2)
        if self.box_size <= 0 or self.rho <= 0:
            raise ValueError("box_size and rho must be positive")
        if len(centers) and (centers.min() < 0 or centers.max() > self.box_size):
            raise ValueError(f"centers must lie in [0, {self.box_size}]^2")
        connected = self.connected
        connected = (np.zeros(len(centers), dtype=bool) if connected is None
                     else np.array(connected, dtype=bool).reshape(-1))
        if len(connected) != len(centers):
            raise ValueError("connected flags must match the number of centers")
        centers.setflags(write=False)
        connected.setflags(write=False)
        object.__setattr__(self, "centers", centers)
        object.__setattr__(self, "connected", connected)

    def __len__(self):
        return len(self.centers)

    @property
    def n_particles(self) -> int:
        return len(self.centers)

    def __eq__(self, other):
        if not isinstance(other, Configuration):
            return NotImplemented
        return (np.array_equal(self.centers, other.centers)
                and np.array_equal(self.connected, other.connected)
                and (self.rho, self.box_size, self.gamma_agg, self.target_p, self.seed, self.achieved_p)
                == (other.rho, other.box_size, other.gamma_agg, other.target_p, other.seed, other.achieved_p))


def disks_intersect(c1, c2, rho: float) -> bool:
    """True iff closed disks of radius ``rho`` around ``c1`` and ``c2`` meet."""
    dx = c1[0] - c2[0]
    dy = c1[1] - c2[1]
    return dx * dx + dy * dy <= 4.0 * rho * rho


def coverage_fraction(config: Configuration) -> float:
    """Covered fraction of the ``L x L`` raster of ``config``."""
    if len(config) == 0:
        return 0.0
    return volume_fraction(rasterize_centers(config.centers, config.rho, config.box_size))


def expected_boolean_count(p: float, rho: float, box_size: float) -> float:
    """Particle count at which a Boolean model of equal disks covers fraction ``p``."""
    return -math.log1p(-p) * box_size ** 2 / (math.pi * rho ** 2)


class _UniformStream:
    """Sequential uniform draws on [0, 1) from PCG64, read in blocks."""

    def __init__(self, seed: int, block: int = 1 << 14):
        self._gen = np.random.Generator(np.random.PCG64(seed))
        self._block = block
        self._buf = np.empty(0)
        self._pos = 0

    def _fill(self, k: int):
        if len(self._buf) - self._pos < k:
            fresh = self._gen.random(max(self._block, k))
            self._buf = np.concatenate([self._buf[self._pos:], fresh])
            self._pos = 0

    def next(self) -> float:
        self._fill(1)
        u = self._buf[self._pos]
        self._pos += 1
        return float(u)

    def peek(self, k: int) -> np.ndarray:
        self._fill(k)
        return self._buf[self._pos:self._pos + k]

    def skip(self, k: int):
        self._pos += k


class _CenterGrid:
    """Uniform hash grid over centers with cell size ``2 rho``.

    ``near`` marks every cell within one cell of an occupied one; a point
    outside ``near`` cannot be within ``2 rho`` of any center.
    """

    def __init__(self, rho: float, box_size: int):
        self.reach2 = 4.0 * rho * rho
        self.cell = 2.0 * rho
        self.ncell = int(math.ceil(box_size / self.cell)) + 1
        self.near = np.zeros((self.ncell + 2, self.ncell + 2), dtype=bool)
        self.cells: dict[tuple[int, int], list[tuple[float, float]]] = {}

    def add(self, x: float, y: float):
        cx, cy = int(x // self.cell), int(y // self.cell)
        self.cells.setdefault((cx, cy), []).append((x, y))
        self.near[cy:cy + 3, cx:cx + 3] = True

    def touches(self, x: float, y: float) -> bool:
        cx, cy = int(x // self.cell), int(y // self.cell)
        for i in (cx - 1, cx, cx + 1):
            for j in (cy - 1, cy, cy + 1):
                for u, v in self.cells.get((i, j), ()):
                    dx, dy = u - x, v - y
                    if dx * dx + dy * dy <= self.reach2:
                        return True
        return False

    def first_touching(self, xs: np.ndarray, ys: np.ndarray) -> int:
        """Index of the first candidate touching the union, or -1."""
        cx = (xs // self.cell).astype(np.int64)
        cy = (ys // self.cell).astype(np.int64)
        for k in np.flatnonzero(self.near[cy + 1, cx + 1]):
            if self.touches(float(xs[k]), float(ys[k])):
                return int(k)
        return -1


def _snap(u, box_size):
    return np.floor(u * (box_size / POSITION_QUANTUM)) * POSITION_QUANTUM


def _validate(gamma_agg, target_p, rho, box_size):
    if rho <= 0 or box_size <= 0:
        raise ValueError("rho and box_size must be positive")
    if not 0.0 <= gamma_agg <= 1.0:
        raise ValueError(f"gamma_agg must lie in [0, 1], got {gamma_agg}")
    if not 0.0 < target_p <= 0.5:
        raise ValueError(f"target_p must lie in (0, 0.5], got {target_p}")
    if rho < 2:
        raise ValueError(f"rho must be at least 2 pixels, got {rho}")
    if box_size < 20 * rho:
        raise ValueError(f"box_size must be at least 20 * rho, got {box_size}")
    if box_size != int(box_size):
        raise ValueError("box_size must be a whole number of pixels")


def generate_with_image(gamma_agg: float, target_p: float, rho: float = 10, box_size: int = 2400,
                        seed: int = 0, max_attempts: int = MAX_ATTEMPTS):
    """Run the generator and return ``(configuration, raster)``.

    The raster is the ``bool`` pixel array built incrementally while the
    covered fraction was being monitored.
    """
    _validate(gamma_agg, target_p, rho, box_size)
    box_size = int(box_size)
    stream = _UniformStream(seed)
    grid = _CenterGrid(rho, box_size)
    pixels = np.zeros((box_size, box_size), dtype=bool)
    total = box_size * box_size
    centers: list[tuple[float, float]] = []
    flags: list[bool] = []
    covered = 0

    def place(x, y, joined):
        nonlocal covered
        covered += stamp_disk(pixels, x, y, rho)
        grid.add(x, y)
        centers.append((x, y))
        flags.append(joined)

    x = float(_snap(stream.next(), box_size))
    y = float(_snap(stream.next(), box_size))
    place(x, y, False)

    while covered / total <= target_p:
        x = float(_snap(stream.next(), box_size))
        y = float(_snap(stream.next(), box_size))
        gamma = stream.next()
        if gamma > gamma_agg:
            place(x, y, False)
            continue
        if not grid.touches(x, y):
            x, y = _resample(stream, grid, box_size, max_attempts)
        place(x, y, True)

    config = Configuration(np.array(centers), rho, box_size, gamma_agg, target_p, seed,
                           covered / total, np.array(flags))
    return config, pixels


def _resample(stream, grid, box_size, max_attempts):
    """Draw positions until one touches the union; consumes exactly the draws used."""
    attempts = 1
    batch = 64
    while attempts < max_attempts:
        k = min(batch, max_attempts - attempts)
        pairs = _snap(stream.peek(2 * k), box_size).reshape(k, 2)
        hit = grid.first_touching(pairs[:, 0], pairs[:, 1])
        if hit >= 0:
            stream.skip(2 * (hit + 1))
            return float(pairs[hit, 0]), float(pairs[hit, 1])
        stream.skip(2 * k)
        attempts += k
        batch = min(batch * 2, 4096)
    raise GenerationError(
        f"no touching position found in {max_attempts} attempts; the box is too sparse"
    )


def generate_configuration(gamma_agg: float, target_p: float, rho: float = 10, box_size: int = 2400,
                           seed: int = 0, max_attempts: int = MAX_ATTEMPTS) -> Configuration:
    """Generate one agglomerated configuration (see module docstring)."""
    return generate_with_image(gamma_agg, target_p, rho, box_size, seed, max_attempts)[0]
