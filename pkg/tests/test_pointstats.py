import math

import numpy as np
import pytest

from aggindex.genesis import Configuration, generate_configuration
from aggindex.pointstats import (boundary_length, clark_evans, clark_evans_index, euler_radius_curve,
                                 measured_minkowski, minkowski_reference, nearest_neighbor_distances)
from aggindex.raster import rasterize_centers


def test_reference_values():
    assert minkowski_reference(0) == minkowski_reference(0.0)
    m0 = minkowski_reference(0)
    assert (m0.e, m0.a, m0.l) == (1, 1, 1)
    assert minkowski_reference(1).e == 0
    assert minkowski_reference(2).e == pytest.approx(-math.exp(-2), abs=1e-15)
    assert minkowski_reference(2).e == pytest.approx(-0.13534, abs=5e-6)
    with pytest.raises(ValueError):
        minkowski_reference(-0.1)


def test_reference_a_and_l_decrease():
    xs = np.linspace(0.01, 5, 200)
    a = [minkowski_reference(x).a for x in xs]
    l = [minkowski_reference(x).l for x in xs]  # noqa: E741
    assert (np.diff(a) < 0).all() and (np.diff(l) < 0).all()


def test_two_point_clark_evans():
    pts = [[10.0, 10.0], [13.0, 14.0]]
    assert clark_evans_index(pts, 100.0 ** 2) == pytest.approx(5 / (100 / (2 * math.sqrt(2))))
    with pytest.raises(ValueError):
        clark_evans_index(pts[:1], 1.0)


def test_nn_distances_reflect():
    pts = np.array([[1.0, 50.0], [60.0, 50.0]])
    assert nearest_neighbor_distances(pts).tolist() == [59.0, 59.0]
    assert nearest_neighbor_distances(pts, 100, "reflect").tolist() == [2.0, 59.0]
    with pytest.raises(ValueError):
        nearest_neighbor_distances(pts, None, "reflect")
    with pytest.raises(ValueError):
        nearest_neighbor_distances(pts, 100, "torus")


def test_clark_evans_box_symmetries():
    config = generate_configuration(0.5, 0.2, 10, 600, seed=4)
    ce = clark_evans(config)
    x, y = config.centers.T
    L = config.box_size
    for pts in (np.column_stack([L - y, x]), np.column_stack([L - x, y]), np.column_stack([y, x])):
        assert clark_evans(Configuration(pts, 10, L)) == ce


def test_clark_evans_csr_near_one():
    values = [clark_evans(generate_configuration(0.0, 0.2, 10, 1200, seed=s)) for s in (1, 2, 3)]
    assert 0.95 < np.mean(values) < 1.08


def test_euler_curve_two_centers():
    curve = euler_radius_curve([[20.5, 30.5], [50.5, 30.5]], [5, 14, 15, 16], 80)
    assert curve.chi.tolist() == [2, 2, 1, 1]
    assert curve.x[0] == pytest.approx(2 / 6400 * math.pi * 25)
    with pytest.raises(ValueError):
        euler_radius_curve([[1, 1]], [3, 2], 10)


def test_euler_curve_small_radius_counts_centers(rng):
    # jittered grid: every digital disk is non-empty and no two are 8-adjacent
    base = np.stack(np.meshgrid(np.arange(8), np.arange(8)), -1).reshape(-1, 2) * 12.0 + 6
    pts = base + rng.uniform(-2, 2, base.shape)
    dmin = nearest_neighbor_distances(pts).min()
    r = (dmin - math.sqrt(2)) / 2 - 0.01
    assert r > math.sqrt(2) / 2
    assert euler_radius_curve(pts, [1.0, r], 96).chi.tolist() == [64, 64]


def test_single_disk_minkowski():
    img = rasterize_centers([[50.5, 50.5]], 10, 101)
    m = measured_minkowski(img, 1, 10.0)
    assert m.e == 1.0
    assert m.a == pytest.approx(317 / (math.pi * 100), rel=1e-12)
    assert abs(m.a - 1) < 0.02
    with pytest.raises(ValueError):
        measured_minkowski(img, 0, 10.0)


def test_disk_perimeter_bias_is_bounded():
    img = rasterize_centers([[50.5, 50.5]], 10, 101)
    ratio = boundary_length(img) / (2 * math.pi * 10)
    assert 1.0 <= ratio <= 4 / math.pi * 1.06
    assert measured_minkowski(img, 1, 10.0).l == pytest.approx(ratio * math.pi / 4)


def test_boolean_area_and_perimeter_follow_reference():
    config = generate_configuration(0.0, 0.3, 10, 1200, seed=2)
    for r in (6, 10, 14):
        img = rasterize_centers(config.centers, r, 1200)
        m = measured_minkowski(img, len(config), r)
        x = len(config) * math.pi * r * r / 1200 ** 2
        ref = minkowski_reference(x)
        assert abs(m.a - ref.a) < 0.1
        assert abs(m.l - ref.l) < 0.1
