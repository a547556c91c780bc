import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from eyemouth.imgio import (BoundsError, ImageFormatError, Rect, crop, read_image, read_pgm,
                            read_ppm, resize_bilinear, to_grayscale, write_pgm, write_ppm)
from oracles import oracle_resize


def test_read_pgm_maps_bytes(tmp_path):
    p = tmp_path / "a.pgm"
    p.write_bytes(b"P5\n2 2\n255\n" + bytes([0, 64, 128, 255]))
    img = read_pgm(p)
    assert img.shape == (2, 2)
    assert img.tolist() == [[0, 64], [128, 255]]


def test_pgm_roundtrip_constant(tmp_path):
    p = tmp_path / "c.pgm"
    img = np.full((3, 3), 7.0)
    write_pgm(img, p)
    np.testing.assert_array_equal(read_pgm(p), img)


def test_write_pgm_rounds_and_clamps(tmp_path):
    p = tmp_path / "q.pgm"
    write_pgm(np.array([[-4.0, 12.4], [12.6, 300.0]]), p)
    assert read_pgm(p).tolist() == [[0, 12], [13, 255]]


def test_ppm_truncated_payload(tmp_path):
    p = tmp_path / "t.ppm"
    p.write_bytes(b"P6\n2 2\n255\n" + bytes([1, 2]))
    with pytest.raises(ImageFormatError, match="truncated payload"):
        read_ppm(p)


@pytest.mark.parametrize("data, field", [
    (b"P5\n2 2\n65535\n" + bytes(8), "maxval"),
    (b"P5\nx 2\n255\n" + bytes(4), "width"),
    (b"P5\n2\n", "height"),
    (b"P2\n2 2\n255\n" + bytes(4), "magic"),
])
def test_malformed_header_names_field(tmp_path, data, field):
    p = tmp_path / "bad.pgm"
    p.write_bytes(data)
    with pytest.raises(ImageFormatError, match=field):
        read_pgm(p)


def test_header_comment_skipped(tmp_path):
    p = tmp_path / "c.pgm"
    p.write_bytes(b"P5\n# made by hand\n1 1\n255\n" + bytes([9]))
    assert read_pgm(p).tolist() == [[9]]


def test_ppm_roundtrip_and_dispatch(tmp_path, rng):
    rgb = rng.integers(0, 256, size=(5, 4, 3)).astype(np.uint8)
    p = tmp_path / "c.ppm"
    write_ppm(rgb, p)
    np.testing.assert_array_equal(read_ppm(p), rgb)
    np.testing.assert_array_equal(read_image(p), rgb)


@settings(max_examples=30, deadline=None)
@given(arrays(np.uint8, st.tuples(st.integers(1, 9), st.integers(1, 9))))
def test_pgm_roundtrip_lossless(tmp_path_factory, pixels):
    p = tmp_path_factory.mktemp("rt") / "x.pgm"
    write_pgm(pixels.astype(float), p)
    np.testing.assert_array_equal(read_pgm(p), pixels)


@pytest.mark.parametrize("rgb, gray", [
    ((255, 255, 255), 255.0),
    ((0, 0, 0), 0.0),
    ((255, 0, 0), 76.245),
])
def test_to_grayscale(rgb, gray):
    img = np.array([[rgb]], dtype=np.uint8)
    assert to_grayscale(img)[0, 0] == pytest.approx(gray, abs=1e-9)


@given(arrays(np.uint8, st.tuples(st.integers(1, 6), st.integers(1, 6), st.just(3))))
def test_grayscale_range(rgb):
    g = to_grayscale(rgb)
    assert g.min() >= 0.0 and g.max() <= 255.0 + 1e-9


def test_grayscale_monotone_in_each_channel(rng):
    base = rng.integers(0, 200, size=(4, 4, 3)).astype(np.uint8)
    g0 = to_grayscale(base)
    for c in range(3):
        brighter = base.copy()
        brighter[..., c] += 10
        assert np.all(to_grayscale(brighter) > g0)


def test_resize_constant():
    img = np.full((2, 2), 10.0)
    for w, h in [(1, 1), (3, 5), (10, 10), (7, 2)]:
        np.testing.assert_array_equal(resize_bilinear(img, w, h), np.full((h, w), 10.0))


def test_resize_row_widened():
    out = resize_bilinear(np.array([[0.0, 255.0]]), 4, 1)
    np.testing.assert_allclose(out[0], [0.0, 63.75, 191.25, 255.0], atol=1e-12)
    np.testing.assert_allclose(out, oracle_resize([[0.0, 255.0]], 4, 1), atol=1e-12)


def test_resize_identity_is_bit_identical(rng):
    img = rng.normal(size=(7, 9))
    out = resize_bilinear(img, 9, 7)
    assert out.tobytes() == img.tobytes()


@pytest.mark.parametrize("shape, out", [((30, 24), (10, 10)), ((5, 8), (13, 3)), ((64, 1), (4, 4))])
def test_resize_matches_oracle(rng, shape, out):
    img = rng.uniform(0, 255, size=shape)
    np.testing.assert_allclose(resize_bilinear(img, *out), oracle_resize(img, *out), atol=1e-9)


@given(arrays(np.float64, st.tuples(st.integers(1, 12), st.integers(1, 12)),
              elements=st.floats(-255, 255)),
       st.integers(1, 15), st.integers(1, 15))
def test_resize_is_convex(img, w, h):
    out = resize_bilinear(img, w, h)
    assert out.shape == (h, w)
    slack = 1e-9 * (1 + np.abs(img).max())
    assert out.min() >= img.min() - slack
    assert out.max() <= img.max() + slack


def test_crop(rng):
    img = rng.normal(size=(6, 8))
    np.testing.assert_array_equal(crop(img, Rect(0, 0, 8, 6)), img)
    assert crop(img, Rect(3, 2, 1, 1)).tolist() == [[img[2, 3]]]
    with pytest.raises(BoundsError):
        crop(img, Rect(5, 0, 4, 2))
