"""Cross-checks computed from particle centers.

Includes the Clark-Evans nearest-neighbor index, Euler number versus disk
radius around fixed centers, and the closed-form normalized Minkowski
functionals of a Boolean model of disks with normalized radius
``x = lambda * pi * r^2``::

    e(x) = (1 - x) exp(-x),   a(x) = (1 - exp(-x)) / x,   l(x) = exp(-x)
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree

from .raster import as_array, rasterize_centers
from .topology import euler_number

__all__ = [
    "MinkowskiTriple",
    "EulerRadiusCurve",
    "nearest_neighbor_distances",
    "clark_evans_index",
    "clark_evans",
    "euler_radius_curve",
    "minkowski_reference",
    "boundary_length",
    "measured_minkowski",
]


@dataclass(frozen=True)
class MinkowskiTriple:
    e: float
    a: float
    l: float  # noqa: E741


@dataclass
class EulerRadiusCurve:
    radii: np.ndarray
    chi: np.ndarray
    n_points: int
    box_size: int

    @property
    def x(self) -> np.ndarray:
        """Normalized radii ``lambda * pi * r^2``."""
        return self.n_points / self.box_size ** 2 * np.pi * self.radii ** 2


def nearest_neighbor_distances(points, box_size: float | None = None, edge_correction: str = "none"):
    """Distance from every point to its nearest other point.

    ``edge_correction="reflect"`` also offers mirror images of the points
    across the four box edges as neighbors.
    """
    pts = np.asarray(points, dtype=np.float64).reshape(-1, 2)
    if len(pts) < 2:
        raise ValueError("nearest-neighbor distances need at least 2 points")
    if edge_correction == "none":
        d, _ = cKDTree(pts).query(pts, k=2)
        return d[:, 1]
    if edge_correction != "reflect":
        raise ValueError(f"unknown edge correction {edge_correction!r}")
    if box_size is None:
        raise ValueError("reflective edge correction needs box_size")
    x, y = pts[:, 0], pts[:, 1]
    mirrors = [np.column_stack(m) for m in ((-x, y), (2 * box_size - x, y), (x, -y), (x, 2 * box_size - y))]
    d, _ = cKDTree(np.vstack([pts] + mirrors)).query(pts, k=2)
    return d[:, 1]


def clark_evans_index(points, area: float, edge_correction: str = "none", box_size: float | None = None) -> float:
    """Mean nearest-neighbor distance over its value ``1 / (2 sqrt(lambda))`` under CSR."""
    pts = np.asarray(points, dtype=np.float64).reshape(-1, 2)
    if len(pts) < 2:
        raise ValueError("Clark-Evans index needs at least 2 points")
    d = nearest_neighbor_distances(pts, box_size, edge_correction)
    intensity = len(pts) / area
    return float(d.mean() * 2.0 * math.sqrt(intensity))


def clark_evans(config, edge_correction: str = "none") -> float:
    """Clark-Evans index of a configuration's centers in its ``L x L`` box."""
    return clark_evans_index(config.centers, float(config.box_size) ** 2, edge_correction, config.box_size)


def euler_radius_curve(centers, radii, box_size: int, connectivity: str = "8-4") -> EulerRadiusCurve:
    """Euler number of the rasterized union of radius-``r`` disks, for each ``r``."""
    radii = np.asarray(radii, dtype=np.float64)
    if radii.ndim != 1 or (radii <= 0).any() or (np.diff(radii) <= 0).any():
        raise ValueError("radii must be positive and strictly increasing")
    centers = np.asarray(centers, dtype=np.float64).reshape(-1, 2)
    chi = np.array([euler_number(rasterize_centers(centers, r, box_size), connectivity) for r in radii],
                   dtype=np.int64)
    return EulerRadiusCurve(radii, chi, len(centers), box_size)


def minkowski_reference(x: float) -> MinkowskiTriple:
    if x < 0:
        raise ValueError("normalized radius must be non-negative")
    ex = math.exp(-x)
    a = 1.0 if x == 0 else -math.expm1(-x) / x
    return MinkowskiTriple((1.0 - x) * ex, a, ex)


def boundary_length(image) -> int:
    """Number of foreground/background pixel-edge adjacencies inside the frame."""
    arr = as_array(image)
    return int(np.count_nonzero(arr[:, 1:] != arr[:, :-1]) + np.count_nonzero(arr[1:, :] != arr[:-1, :]))


def measured_minkowski(image, n_particles: int, rho_effective: float,
                       connectivity: str = "8-4", crofton: bool = True) -> MinkowskiTriple:
    """Normalized Euler number, area and perimeter of a picture of ``n`` disks.

    Normalized so that a Boolean model reproduces `minkowski_reference`:
    ``e = chi / n``, ``a = fraction / x`` and ``l = perimeter / (2 pi rho n)``
    with ``x = n pi rho^2 / |W|``.  The perimeter is the pixel-edge count
    times the pixel size; that count overestimates the length of isotropic
    boundaries by 4/pi on average, which ``crofton`` divides out.
    """
    if n_particles <= 0:
        raise ValueError("n_particles must be positive")
    arr = as_array(image)
    pixel_size = getattr(image, "pixel_size", 1.0)
    area = arr.size * pixel_size ** 2
    x = n_particles * math.pi * rho_effective ** 2 / area
    fraction = float(np.count_nonzero(arr)) / arr.size
    e = euler_number(arr, connectivity) / n_particles
    perim = boundary_length(arr) * pixel_size
    if crofton:
        perim *= math.pi / 4
    return MinkowskiTriple(float(e), fraction / x, float(perim) / (2 * math.pi * rho_effective * n_particles))
