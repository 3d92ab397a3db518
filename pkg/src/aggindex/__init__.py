"""Agglomeration index of binary particle images from Euler numbers along a thickening."""

__version__ = "0.1.0"

from .raster import BinaryImage, rasterize, volume_fraction
from .topology import euler_number, euler_by_components
from .morphology import StructuringElement, ThickeningSchedule, EulerTrace, default_schedule, dilate, thicken_trace
from .genesis import Configuration, generate_configuration, generate_with_image, disks_intersect, coverage_fraction
from .cade import CalibrationEntry, CalibrationTable, cade, calibrate, delta_agg, analyze_image, image_cade
from .pointstats import clark_evans, euler_radius_curve, minkowski_reference, measured_minkowski

__all__ = [
    "BinaryImage", "rasterize", "volume_fraction",
    "euler_number", "euler_by_components",
    "StructuringElement", "ThickeningSchedule", "EulerTrace", "default_schedule", "dilate", "thicken_trace",
    "Configuration", "generate_configuration", "generate_with_image", "disks_intersect", "coverage_fraction",
    "CalibrationEntry", "CalibrationTable", "cade", "calibrate", "delta_agg", "analyze_image", "image_cade",
    "clark_evans", "euler_radius_curve", "minkowski_reference", "measured_minkowski",
]
