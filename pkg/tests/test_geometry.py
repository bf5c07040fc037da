import math

import pytest
from hypothesis import given, strategies as st

from atnsim.errors import ValidationError
from atnsim.geometry import (
    Footprint, GeoPoint, calibrated_min_elevation, coverage_ratio, distance,
    footprint_area, footprint_radius, radius_for_area,
)

# closed-form inversion of the 440 m / 47.39 km² pair
R_LAP = math.sqrt(47.39 / math.pi)  # 3.883903...


def test_radius_at_45_degrees():
    assert footprint_radius(1000, 45) == pytest.approx(1.0, rel=1e-12)


def test_radius_matches_lap_calibration():
    elevation = calibrated_min_elevation(440, 47.39)
    assert elevation == pytest.approx(math.degrees(math.atan(0.44 / R_LAP)), rel=1e-12)
    assert elevation == pytest.approx(6.46337, abs=1e-5)
    assert footprint_radius(440, elevation) == pytest.approx(3.883903, abs=1e-6)


def test_radius_at_published_elevation_rounding():
    # 6.4640 deg is a 4-decimal rounding of the calibrated angle
    assert footprint_radius(440, 6.4640) == pytest.approx(3.883523, abs=1e-6)


def test_radius_vanishes_towards_nadir():
    assert footprint_radius(440, 90 - 1e-9) < 1e-9


@pytest.mark.parametrize("altitude, elevation", [(0, 10), (-5, 10), (440, 0), (440, 90), (440, 95)])
def test_radius_rejects_bad_inputs(altitude, elevation):
    with pytest.raises(ValidationError):
        footprint_radius(altitude, elevation)


@pytest.mark.parametrize("radius, area", [(1.0, math.pi), (0.5, math.pi / 4), (R_LAP, 47.39)])
def test_footprint_area(radius, area):
    assert footprint_area(radius) == pytest.approx(area, rel=1e-12)


def test_footprint_area_rejects_nonpositive():
    with pytest.raises(ValidationError):
        footprint_area(0)


def test_footprint_invariants():
    fp = Footprint.from_area(GeoPoint(1, 2), 47.39)
    assert fp.area == pytest.approx(47.39, rel=1e-9)
    assert fp.covers(GeoPoint(1 + R_LAP - 1e-9, 2))
    assert not fp.covers(GeoPoint(1 + R_LAP + 1e-6, 2))
    with pytest.raises(ValidationError):
        Footprint(GeoPoint(0, 0), 0)


def test_coverage_ratio_katrina():
    ratio = coverage_ratio(12, 47.39, 233000)
    assert ratio == pytest.approx(568.68 / 233000, rel=1e-12)
    assert ratio == pytest.approx(0.0024407, abs=1e-7)
    assert ratio < 0.0025


def test_coverage_ratio_edges():
    assert coverage_ratio(0, 47.39, 233000) == 0
    assert coverage_ratio(1, 47.39, 47.39) == 1.0
    with pytest.raises(ValidationError):
        coverage_ratio(1, 47.39, 0)
    with pytest.raises(ValidationError):
        coverage_ratio(-1, 47.39, 100)


@pytest.mark.parametrize("a, b, d", [((0, 0), (3, 4), 5), ((1, 1), (1, 1), 0), ((0, 0), (10, 0), 10)])
def test_distance(a, b, d):
    assert distance(GeoPoint(*a), GeoPoint(*b)) == pytest.approx(d)


def test_geopoint_rejects_nonfinite():
    with pytest.raises(ValidationError):
        GeoPoint(math.nan, 0)
    with pytest.raises(ValidationError):
        GeoPoint(0, math.inf)


coords = st.floats(-1e4, 1e4, allow_nan=False)
points = st.builds(GeoPoint, coords, coords)


@given(st.floats(1, 50000), st.floats(0.5, 89), st.floats(0.5, 89))
def test_area_decreases_with_elevation(h, e1, e2):
    lo, hi = sorted((e1, e2))
    assert footprint_area(footprint_radius(h, hi)) <= footprint_area(footprint_radius(h, lo))


@given(st.integers(0, 10000), st.floats(0.01, 1e3), st.floats(1.0, 1e6))
def test_coverage_ratio_linear(k, a, total):
    assert coverage_ratio(2 * k, a, total) == pytest.approx(2 * coverage_ratio(k, a, total), rel=1e-12)


@given(points, points, points)
def test_triangle_inequality(a, b, c):
    assert distance(a, c) <= distance(a, b) + distance(b, c) + 1e-9
    assert distance(a, b) == distance(b, a)


@given(st.floats(1e-6, 1e7))
def test_area_round_trip(area):
    assert footprint_area(radius_for_area(area)) == pytest.approx(area, rel=1e-9)
