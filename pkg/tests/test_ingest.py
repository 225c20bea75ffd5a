import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays
from PIL import Image

from artdissect.errors import BadBinCount, BadParameter, EmptyImage, UnreadableFile, UnsupportedFormat
from artdissect.ingest import (QuantizedImage, RawImage, bin_centers, decode_image, quantize,
                               resize_max)


def solid(h, w, color):
    px = np.zeros((h, w, 3), dtype=np.uint8)
    px[:] = color
    return RawImage(px)


def test_decode_single_black_pixel(tmp_path):
    p = tmp_path / "one.png"
    Image.new("RGB", (1, 1), (0, 0, 0)).save(p)
    img = decode_image(p)
    assert (img.width, img.height) == (1, 1)
    assert img.pixels.tolist() == [[[0, 0, 0]]]


def test_decode_dimensions(tmp_path):
    p = tmp_path / "big.png"
    Image.new("RGB", (512, 512), (10, 20, 30)).save(p)
    img = decode_image(p)
    assert img.pixels.shape[0] * img.pixels.shape[1] == 262144


def test_decode_drops_alpha_without_compositing(tmp_path):
    p = tmp_path / "rgba.png"
    Image.new("RGBA", (2, 2), (200, 100, 50, 0)).save(p)
    assert decode_image(p).pixels[0, 0].tolist() == [200, 100, 50]


@pytest.mark.parametrize("fmt,ext", [("BMP", "bmp"), ("JPEG", "jpg")])
def test_decode_other_formats(tmp_path, fmt, ext):
    p = tmp_path / f"x.{ext}"
    Image.new("RGB", (7, 5), (255, 255, 255)).save(p, format=fmt)
    img = decode_image(p)
    assert (img.width, img.height) == (7, 5)


def test_decode_corrupt(tmp_path):
    p = tmp_path / "bad.png"
    p.write_bytes(b"\x89PNG\r\n\x1a\nthis is not a png")
    with pytest.raises(UnsupportedFormat):
        decode_image(p)


def test_decode_missing(tmp_path):
    with pytest.raises(UnreadableFile):
        decode_image(tmp_path / "nope.png")


def test_raw_image_rejects_empty():
    with pytest.raises(EmptyImage):
        RawImage(np.zeros((0, 3, 3), dtype=np.uint8))


def test_resize_noop():
    img = solid(50, 100, (1, 2, 3))
    assert resize_max(img, 200) is img
    tiny = solid(2, 2, (255, 0, 0))
    assert resize_max(tiny, 16) is tiny


def test_resize_aspect():
    out = resize_max(solid(500, 1000, (9, 9, 9)), 200)
    assert (out.width, out.height) == (200, 100)
    assert (out.pixels == 9).all()
    tall = resize_max(solid(1000, 333, (0, 0, 0)), 300)
    assert (tall.width, tall.height) == (100, 300)


def test_resize_rejects_small_max_dim():
    with pytest.raises(BadParameter):
        resize_max(solid(4, 4, (0, 0, 0)), 15)


def test_resize_is_area_average():
    px = np.zeros((40, 40, 3), dtype=np.uint8)
    px[:, ::2] = 200  # alternating columns average to 100
    out = resize_max(RawImage(px), 20)
    assert np.abs(out.pixels.astype(int) - 100).max() <= 1


@pytest.mark.parametrize("color,index", [((0, 0, 0), 0), ((255, 255, 255), 511), ((128, 64, 200), 278)])
def test_quantize_examples(color, index):
    q = quantize(solid(1, 1, color), 8)
    assert q.indices[0, 0] == index


@pytest.mark.parametrize("b", [1, 17, 0])
def test_quantize_bad_bins(b):
    with pytest.raises(BadBinCount):
        quantize(solid(1, 1, (0, 0, 0)), b)


@settings(max_examples=60, deadline=None)
@given(arrays(np.uint8, st.tuples(st.integers(1, 9), st.integers(1, 9), st.just(3))),
       st.integers(2, 16))
def test_quantize_histogram_matches_brute_force(px, b):
    q = quantize(RawImage(px), b)
    assert q.indices.max() < b ** 3
    brute = np.zeros(b ** 3, dtype=np.int64)
    for r, g, bl in px.reshape(-1, 3).tolist():
        brute[(r * b // 256) * b * b + (g * b // 256) * b + bl * b // 256] += 1
    assert np.array_equal(brute, q.global_hist)
    assert q.global_hist.sum() == px.shape[0] * px.shape[1]


@pytest.mark.parametrize("b", range(2, 17))
def test_quantize_idempotent_on_bin_centers(b):
    centers = bin_centers(b)
    rng = np.random.default_rng(b)
    px = centers[rng.integers(0, b, size=(6, 7, 3))]
    q = quantize(RawImage(px), b)
    # channel bins recovered exactly from the representative values
    ch = np.stack([q.indices // (b * b), (q.indices // b) % b, q.indices % b], axis=-1)
    assert np.array_equal(centers[ch], px)
    assert quantize(RawImage(centers[ch]), b) == q


def test_resize_then_quantize_is_deterministic():
    rng = np.random.default_rng(0)
    px = rng.integers(0, 256, size=(400, 320, 3), dtype=np.uint8)
    a = quantize(resize_max(RawImage(px), 100), 8)
    b = quantize(resize_max(RawImage(px.copy()), 100), 8)
    assert a == b


def test_quantized_image_from_indices_validates():
    with pytest.raises(ValueError):
        QuantizedImage.from_indices(np.array([[512]]), 8)
