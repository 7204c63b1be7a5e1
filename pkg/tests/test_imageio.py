import struct

import numpy as np
import pytest
from PIL import Image

from tvpwl.imageio import RAW_MAGIC, ImageFormatError, quantise_8bit, read_image, write_image


def test_raw_round_trip_bit_identical(tmp_path, rng):
    u = rng.standard_normal((13, 7)) * 1e3
    write_image(tmp_path / "a.raw", u)
    back = read_image(tmp_path / "a.raw")
    assert back.dtype == np.float64 and np.array_equal(back, u)


def test_raw_header_layout(tmp_path):
    write_image(tmp_path / "a.raw", np.array([[1.5, 2.0]]))
    data = (tmp_path / "a.raw").read_bytes()
    assert data[:8] == RAW_MAGIC
    assert struct.unpack("<QQ", data[8:24]) == (1, 2)
    assert struct.unpack("<2d", data[24:]) == (1.5, 2.0)


def test_pgm_spec_example(tmp_path):
    (tmp_path / "a.pgm").write_bytes(b"P5\n2 2\n255\n" + bytes([0, 85, 170, 255]))
    np.testing.assert_array_equal(read_image(tmp_path / "a.pgm"), [[0, 85], [170, 255]])


def test_pgm_comments_and_16bit(tmp_path):
    payload = np.array([0, 65535, 257], dtype=">u2").tobytes()
    (tmp_path / "b.pgm").write_bytes(b"P5 # comment\n3 1\n# another\n65535\n" + payload)
    np.testing.assert_allclose(read_image(tmp_path / "b.pgm"), [[0, 255, 1]], rtol=1e-15)


def test_pgm_round_trip(tmp_path):
    u = np.array([[0.0, 12.5, 254.49], [255.4, -3.0, 100.0]])
    write_image(tmp_path / "c.pgm", u)
    np.testing.assert_array_equal(read_image(tmp_path / "c.pgm"), [[0, 13, 254], [255, 0, 100]])


def test_png_clamps(tmp_path):
    write_image(tmp_path / "a.png", np.full((3, 3), 255.4))
    assert np.all(read_image(tmp_path / "a.png") == 255)


def test_png_16bit_scaled(tmp_path):
    a = np.array([[0, 65535], [32768, 257]], dtype=np.uint16)
    Image.fromarray(a).save(tmp_path / "b.png")
    np.testing.assert_allclose(read_image(tmp_path / "b.png"), a.astype(float) * 255 / 65535, rtol=1e-15)


def test_png_colour_rejected(tmp_path):
    Image.new("RGB", (4, 4)).save(tmp_path / "c.png")
    with pytest.raises(ImageFormatError):
        read_image(tmp_path / "c.png")


def test_quantise_half_away_from_zero():
    out = quantise_8bit(np.array([[0.5, 1.5, 2.5, -0.5, 254.5, 300.0]]))
    np.testing.assert_array_equal(out, [[1, 2, 3, 0, 255, 255]])


@pytest.mark.parametrize("name,data", [
    ("x.raw", b"NOTMAGIC" + b"\0" * 16),
    ("x.raw", RAW_MAGIC + struct.pack("<QQ", 4, 4) + b"\0" * 8),
    ("x.pgm", b"P2\n1 1\n255\n0"),
    ("x.pgm", b"P5\n4 4\n255\n\0"),
    ("x.pgm", b"P5\n4"),
    ("x.png", b"garbage"),
])
def test_corrupt_files(tmp_path, name, data):
    (tmp_path / name).write_bytes(data)
    with pytest.raises(ImageFormatError):
        read_image(tmp_path / name)


def test_unsupported_extension(tmp_path):
    with pytest.raises(ImageFormatError):
        write_image(tmp_path / "a.tif", np.zeros((2, 2)))


def test_no_temp_files_left(tmp_path):
    write_image(tmp_path / "a.png", np.zeros((4, 4)))
    assert [p.name for p in tmp_path.iterdir()] == ["a.png"]
