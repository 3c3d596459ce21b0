"""
Tests for PGM reading and writing and image landscapes.
"""

import numpy as np
import pytest
from django.conf import settings

from landscapes.exceptions import InvalidDomainError, PgmFormatError
from landscapes.fields import ImageField
from landscapes.imaging import (
    bright_region_boxes,
    inside_box,
    load_image_field,
    parse_pgm,
    read_pgm,
    synthetic_blob_image,
    write_pgm,
)


class TestParsePgm:
    """Strict PGM decoding"""

    def test_plain_with_comments(self):
        pixels, maxval = parse_pgm(b"P2\n# made by hand 9\n3 2\n# max\n255\n0 1 2\n3 4 5\n")
        assert maxval == 255
        np.testing.assert_array_equal(pixels, [[0, 1, 2], [3, 4, 5]])

    def test_raw_eight_bit(self):
        pixels, maxval = parse_pgm(b"P5\n2 2\n255\n\x00\x10\x20\xff")
        np.testing.assert_array_equal(pixels, [[0, 16], [32, 255]])

    def test_raw_sixteen_bit_is_big_endian(self):
        pixels, maxval = parse_pgm(b"P5\n2 1\n65535\n\x01\x00\xff\xff")
        assert maxval == 65535
        np.testing.assert_array_equal(pixels, [[256, 65535]])

    @pytest.mark.parametrize("data,offset", [
        (b"P6\n1 1\n255\n\x00\x00\x00", 0),
        (b"GIF89a", 0),
        (b"P2 x", 3),
        (b"P2 1 1 0 0", 7),
        (b"P2 2 1 10 5 11", 12),
        (b"P2 2 2 255 1 2 3", 16),
        (b"P5\n2 2\n255\n\x00\x01", 13),
        (b"P5 2 1 10\n\x05\x0b", 11),
        (b"P5 1 1 255", 10),
    ])
    def test_errors_report_byte_offset(self, data, offset):
        with pytest.raises(PgmFormatError) as excinfo:
            parse_pgm(data)
        assert excinfo.value.offset == offset
        assert f"offset {offset}" in str(excinfo.value)


class TestWritePgm:
    """Round trips through Pillow"""

    def test_eight_bit_round_trip(self, tmp_path):
        pixels = np.array([[0, 10, 20], [255, 3, 7]])
        path = write_pgm(tmp_path / "small.pgm", pixels)
        read, maxval = read_pgm(path)
        assert maxval == 255
        np.testing.assert_array_equal(read, pixels)

    def test_sixteen_bit_round_trip(self, tmp_path):
        pixels = np.array([[0, 300], [65535, 1]])
        read, maxval = read_pgm(write_pgm(tmp_path / "deep.pgm", pixels))
        assert maxval == 65535
        np.testing.assert_array_equal(read, pixels)

    @pytest.mark.parametrize("pixels", [np.zeros(4), np.array([[-1, 0]]), np.array([[70000, 0]])])
    def test_bad_pixels_rejected(self, tmp_path, pixels):
        with pytest.raises(InvalidDomainError):
            write_pgm(tmp_path / "bad.pgm", pixels)

    def test_missing_file(self, tmp_path):
        with pytest.raises(FileNotFoundError):
            read_pgm(tmp_path / "nowhere.pgm")


class TestImageLandscapes:
    """Loading images and finding bright regions"""

    def test_shipped_sample(self):
        field = load_image_field(settings.BMO_SCENARIO_DIR / "ship_sample.pgm")
        assert field.values.shape == (64, 96)
        assert field.values.max() == pytest.approx(1.0)
        assert np.linalg.norm(field.peaks[0] - [62.0, 24.0]) <= 5.0

    def test_blob_image_is_integer_and_saturates(self):
        image = synthetic_blob_image((20, 30), [(10, 10, 2, 1.0), (10, 10, 2, 1.0)])
        assert image.dtype == np.int64
        assert image.max() == 255
        assert image[10, 10] == 255
        assert image[0, 29] == 0

    def test_bright_regions_largest_first(self):
        image = synthetic_blob_image((60, 80), [(20, 20, 3, 1.0), (60, 40, 5, 1.0)])
        field = ImageField(image, gamma=2.0)
        boxes = bright_region_boxes(field, threshold=0.5)
        assert len(boxes) == 2
        big, small = boxes
        assert inside_box(np.array([[60.0, 40.0]]), big)[0]
        assert inside_box(np.array([[20.0, 20.0]]), small)[0]
        assert (big[2] - big[0]) > (small[2] - small[0])

    def test_dilation_grows_boxes(self):
        image = synthetic_blob_image((40, 40), [(20, 20, 3, 1.0)])
        field = ImageField(image, gamma=2.0)
        plain = bright_region_boxes(field)[0]
        grown = bright_region_boxes(field, dilate=2.0)[0]
        assert grown == (plain[0] - 2, plain[1] - 2, plain[2] + 2, plain[3] + 2)

    def test_no_bright_region(self):
        field = ImageField(np.full((4, 4), 3))
        assert bright_region_boxes(field) == []

    def test_inside_box_tolerance(self):
        points = np.array([[0.0, 0.0], [10.5, 5.0]])
        np.testing.assert_array_equal(inside_box(points, (0, 0, 10, 10)), [True, False])
        np.testing.assert_array_equal(inside_box(points, (0, 0, 10, 10), tol=1.0), [True, True])
