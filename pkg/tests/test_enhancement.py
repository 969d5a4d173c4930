import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from biostego.enhancement import (GradientField, binarize_adaptive, fft_enhance,
                                  gradient_magnitude_direction, histogram_equalize,
                                  round_half_up, sobel_gradients)
from biostego.errors import ImageTooSmall
from biostego.imagecore import GrayImage

from oracles import binarize_oracle, direct_dft, enhance_block_oracle, sobel_at


def test_round_half_up():
    assert round_half_up([0.5, 1.5, 2.49, -0.5]).tolist() == [1.0, 2.0, 2.0, 0.0]


# -- histogram equalization -------------------------------------------------------

def test_equalize_constant():
    out = histogram_equalize(GrayImage(np.full((4, 4), 100)))
    assert (out.pixels == 255).all()


def test_equalize_two_pixels():
    assert histogram_equalize(GrayImage(np.array([[0, 255]]))).data == [128, 255]


def test_equalize_uniform_histogram():
    img = GrayImage(np.arange(256).reshape(16, 16))
    out = histogram_equalize(img)
    assert np.abs(out.pixels.astype(int) - img.pixels.astype(int)).max() <= 1


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_equalize_monotone(seed):
    rng = np.random.default_rng(seed)
    img = GrayImage(rng.integers(0, rng.integers(1, 257), (12, 12)))
    out = histogram_equalize(img).pixels.ravel().astype(int)
    inp = img.pixels.ravel().astype(int)
    order = np.argsort(inp, kind="stable")
    assert (np.diff(out[order]) >= 0).all()
    assert out[inp == inp.max()].min() == 255


# -- FFT enhancement ---------------------------------------------------------------

def test_direct_dft_oracle_agrees_with_definition():
    # the oracle itself, on a case small enough to sum by hand
    f = np.array([[1.0, 2.0], [3.0, 4.0]])
    F = direct_dft(f)
    assert F[0, 0] == pytest.approx(10)
    assert F[1, 0] == pytest.approx((1 + 2) - (3 + 4))
    assert F[0, 1] == pytest.approx((1 + 3) - (2 + 4))


@pytest.mark.parametrize("k", [0.0, 0.45, 1.0])
def test_fft_enhance_matches_direct_dft(rng, k):
    for _ in range(5):
        block = rng.integers(0, 256, (32, 32))
        got = fft_enhance(GrayImage(block), k).pixels.astype(int)
        want = enhance_block_oracle(block, k)
        assert np.abs(got - want).max() <= 1


def test_fft_enhance_k_zero_identity(rng):
    img = GrayImage(rng.integers(0, 256, (70, 45)))
    out = fft_enhance(img, 0.0)
    assert np.abs(out.pixels.astype(int) - img.pixels.astype(int)).max() <= 1


@pytest.mark.parametrize("k", [0.0, 0.45, 1.0, 2.0])
def test_fft_enhance_constant_block(k):
    out = fft_enhance(GrayImage(np.full((32, 32), 77)), k)
    assert np.abs(out.pixels.astype(int) - 77).max() <= 1


def test_fft_enhance_amplifies_dominant_frequency(rng):
    x = np.arange(32)
    clean = 128 + 100 * np.cos(2 * np.pi * x / 32)[None, :] * np.ones((32, 1))
    noisy = np.clip(np.floor(clean + rng.normal(0, 6, (32, 32)) + 0.5), 0, 255)
    out = fft_enhance(GrayImage(noisy), 0.45).pixels.astype(float)
    assert np.abs(out - enhance_block_oracle(noisy, 0.45)).max() <= 1

    def dominance(a):
        F = np.abs(direct_dft(a - a.mean()))
        peak = F[0, 1] + F[0, 31]
        return peak / (F.sum() - peak)

    assert dominance(out) > dominance(noisy)


def test_fft_enhance_ragged_image_is_block_local(rng):
    img = rng.integers(0, 256, (40, 50))
    out = fft_enhance(GrayImage(img), 0.45).pixels
    # the bottom-right 18x8 block sees only its own (mirror padded) pixels
    tile = img[32:40, 32:50]
    padded = np.pad(tile, ((0, 8), (0, 14)), mode="symmetric")
    padded = np.pad(padded, ((0, 16), (0, 0)), mode="symmetric")
    g = np.real(np.fft.ifft2(np.fft.fft2(padded) * np.abs(np.fft.fft2(padded)) ** 0.45))[:8, :18]
    want = tile.min() + (g - g.min()) / (g.max() - g.min()) * (tile.max() - tile.min())
    assert np.abs(out[32:40, 32:50].astype(int) - np.floor(want + 0.5)).max() <= 1


def test_fft_enhance_rejects_negative_k():
    with pytest.raises(ValueError):
        fft_enhance(GrayImage(np.zeros((4, 4))), -0.1)


# -- Sobel ---------------------------------------------------------------------------

def test_sobel_constant():
    f = sobel_gradients(GrayImage(np.full((6, 7), 50)))
    assert not f.gx.any() and not f.gy.any()


def test_sobel_horizontal_ramp():
    f = sobel_gradients(GrayImage(np.tile(np.arange(10), (8, 1))))
    assert (f.gx[1:-1, 1:-1] == -8).all()
    assert (f.gy[1:-1, 1:-1] == 0).all()


def test_sobel_vertical_ramp():
    f = sobel_gradients(GrayImage(np.tile(np.arange(8)[:, None], (1, 10))))
    assert (f.gy[1:-1, 1:-1] == -8).all()
    assert (f.gx[1:-1, 1:-1] == 0).all()


def test_sobel_matches_window_sums(rng):
    img = rng.integers(0, 256, (7, 9))
    f = sobel_gradients(GrayImage(img))
    for y in range(7):
        for x in range(9):
            assert (f.gx[y, x], f.gy[y, x]) == sobel_at(img, y, x)


def test_sobel_bound(rng):
    img = rng.choice([0, 255], (16, 16))
    f = sobel_gradients(GrayImage(img))
    assert np.abs(f.gx).max() <= 4 * 255 and np.abs(f.gy).max() <= 4 * 255


def test_sobel_too_small():
    with pytest.raises(ImageTooSmall):
        sobel_gradients(GrayImage(np.zeros((2, 5))))


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_sobel_mirror_symmetry(seed):
    img = np.random.default_rng(seed).integers(0, 256, (8, 8))
    f = sobel_gradients(GrayImage(img))
    m = sobel_gradients(GrayImage(img[:, ::-1]))
    assert np.array_equal(m.gx[:, ::-1], -f.gx)
    assert np.array_equal(m.gy[:, ::-1], f.gy)


def test_magnitude_direction():
    field = GradientField(np.array([[3, 0, -1]]), np.array([[4, 0, 0]]))
    mag, ang = gradient_magnitude_direction(field)
    assert mag.tolist() == [[5.0, 0.0, 1.0]]
    assert ang[0, 0] == pytest.approx(math.atan2(4, 3))
    assert ang[0, 1] == 0.0
    assert ang[0, 2] == pytest.approx(math.pi)


# -- binarization --------------------------------------------------------------------

def test_binarize_constant():
    assert not binarize_adaptive(GrayImage(np.full((16, 16), 90))).bits.any()


def test_binarize_half_and_half():
    img = np.zeros((16, 16), dtype=np.uint8)
    img[:, 8:] = 255
    bits = binarize_adaptive(GrayImage(img)).bits
    assert (bits[:, 8:] == 1).all() and (bits[:, :8] == 0).all()


@pytest.mark.parametrize("shape", [(32, 32), (37, 21)])
def test_binarize_matches_oracle(rng, shape):
    img = rng.integers(0, 256, shape)
    assert np.array_equal(binarize_adaptive(GrayImage(img), 16).bits, binarize_oracle(img, 16))


def test_binarize_block_local(rng):
    img = rng.integers(0, 256, (32, 32))
    other = img.copy()
    other[16:, 16:] = rng.permutation(other[16:, 16:].ravel()).reshape(16, 16)
    other[:16, 16:] = 255 - other[:16, 16:]
    a = binarize_adaptive(GrayImage(img)).bits
    b = binarize_adaptive(GrayImage(other)).bits
    assert np.array_equal(a[:16, :16], b[:16, :16])
    assert np.array_equal(a[16:, :16], b[16:, :16])
