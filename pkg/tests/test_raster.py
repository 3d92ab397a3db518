import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from aggindex.genesis import Configuration, coverage_fraction, generate_configuration
from aggindex.raster import BinaryImage, rasterize, rasterize_centers, stamp_disk, volume_fraction

from conftest import digital_disk_count


def test_binary_image_is_immutable():
    img = BinaryImage(np.zeros((3, 4)))
    assert (img.width, img.height) == (4, 3)
    with pytest.raises(ValueError):
        img.bits[0, 0] = True


def test_binary_image_rejects_bad_input():
    with pytest.raises(ValueError):
        BinaryImage(np.zeros(5))
    with pytest.raises(ValueError):
        BinaryImage(np.zeros((2, 2)), pixel_size=0)


@pytest.mark.parametrize("arr, expected", [
    (np.zeros((4, 4)), 0.0),
    (np.ones((4, 4)), 1.0),
    (np.indices((6, 6)).sum(axis=0) % 2, 0.5),
])
def test_volume_fraction(arr, expected):
    assert volume_fraction(arr) == expected


def test_empty_configuration_rasterizes_to_background():
    config = Configuration(np.empty((0, 2)), 10, 100)
    assert not rasterize(config).bits.any()


def test_single_interior_disk_pixel_count():
    assert digital_disk_count(10) == 317
    config = Configuration([[1200.5, 1200.5]], 10, 2400)
    assert rasterize(config).bits.sum() == 317


def test_disk_at_pixel_center_is_rotation_symmetric():
    pixels = rasterize_centers([[30.5, 30.5]], 10.0, 61)
    assert np.array_equal(pixels, np.rot90(pixels))
    assert np.array_equal(pixels, pixels[::-1])


def test_disks_are_clipped_to_the_frame():
    pixels = rasterize_centers([[0.0, 0.0]], 10, 50)
    assert pixels.shape == (50, 50)
    # quarter disk around the corner
    assert 0 < pixels.sum() < 317 / 2


@settings(max_examples=40, deadline=None)
@given(st.lists(st.tuples(st.floats(0, 64), st.floats(0, 64)), max_size=12),
       st.floats(2, 9))
def test_vectorized_raster_matches_stamping(centers, rho):
    ref = np.zeros((64, 64), dtype=bool)
    for x, y in centers:
        stamp_disk(ref, x, y, rho)
    assert np.array_equal(rasterize_centers(centers, rho, 64), ref)


def test_raster_fraction_equals_generator_coverage():
    config = generate_configuration(0.3, 0.2, 10, 400, seed=5)
    assert volume_fraction(rasterize(config)) == config.achieved_p == coverage_fraction(config)


def test_adding_a_particle_never_clears_pixels():
    config = generate_configuration(0.0, 0.3, 10, 300, seed=2)
    prev = rasterize_centers(config.centers[:1], 10, 300)
    for k in range(2, len(config) + 1, 7):
        cur = rasterize_centers(config.centers[:k], 10, 300)
        assert not (prev & ~cur).any()
        prev = cur
