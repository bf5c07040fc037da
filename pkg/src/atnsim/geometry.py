"""Planar geometry and coverage footprints.

Positions live on a local flat plane in kilometres (x east, y north).
Earth curvature is ignored; at the scales involved (a few hundred km at
most) this is well inside the error of the disk-footprint model itself.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ValidationError


@dataclass(frozen=True)
class GeoPoint:
    x: float
    y: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValidationError(f"GeoPoint: non-finite coordinate ({self.x}, {self.y})")

    def lerp(self, other: GeoPoint, t: float) -> GeoPoint:
        return GeoPoint(self.x + (other.x - self.x) * t, self.y + (other.y - self.y) * t)


@dataclass(frozen=True)
class Footprint:
    center: GeoPoint
    radius: float

    def __post_init__(self):
        if not self.radius > 0:
            raise ValidationError(f"Footprint.radius: must be > 0, got {self.radius}")

    @property
    def area(self) -> float:
        return footprint_area(self.radius)

    def covers(self, p: GeoPoint) -> bool:
        return distance(self.center, p) <= self.radius

    @classmethod
    def from_area(cls, center: GeoPoint, area: float) -> Footprint:
        return cls(center, radius_for_area(area))


def distance(a: GeoPoint, b: GeoPoint) -> float:
    return math.hypot(a.x - b.x, a.y - b.y)


def footprint_radius(altitude: float, min_elevation: float) -> float:
    """Ground radius (km) seen above `min_elevation` degrees from `altitude` metres."""
    if not altitude > 0:
        raise ValidationError(f"altitude: must be > 0 m, got {altitude}")
    if not 0 < min_elevation < 90:
        raise ValidationError(f"min_elevation: must be in (0, 90) degrees, got {min_elevation}")
    return (altitude / 1000.0) / math.tan(math.radians(min_elevation))


def footprint_area(radius: float) -> float:
    if not radius > 0:
        raise ValidationError(f"radius: must be > 0 km, got {radius}")
    return math.pi * radius * radius


def radius_for_area(area: float) -> float:
    if not area > 0:
        raise ValidationError(f"area: must be > 0 km², got {area}")
    return math.sqrt(area / math.pi)


def calibrated_min_elevation(altitude: float, area: float) -> float:
    """Elevation angle (degrees) that makes a platform at `altitude` m cover `area` km².

    This is a derived calibration: inverts footprint_radius for a known
    altitude/covered-area pair.
    """
    if not altitude > 0:
        raise ValidationError(f"altitude: must be > 0 m, got {altitude}")
    return math.degrees(math.atan((altitude / 1000.0) / radius_for_area(area)))


def coverage_ratio(lap_count: int, footprint_area: float, disaster_area: float) -> float:
    """Fraction of the disaster area covered by `lap_count` non-overlapping footprints."""
    if not disaster_area > 0:
        raise ValidationError(f"disaster_area: must be > 0 km², got {disaster_area}")
    if lap_count < 0 or int(lap_count) != lap_count:
        raise ValidationError(f"lap_count: must be a non-negative integer, got {lap_count}")
    if footprint_area < 0:
        raise ValidationError(f"footprint_area: must be >= 0 km², got {footprint_area}")
    return lap_count * footprint_area / disaster_area
