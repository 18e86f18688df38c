import numpy as np
import pytest

from tweetfuse.errors import DataError, DecodeError
from tweetfuse.image_features import (
    GLCM_OFFSETS,
    GrayRaster,
    HogConfig,
    ImageConfig,
    Raster,
    color_histogram,
    glcm,
    haralick,
    hog_descriptor,
    image_feature_vector,
    load_raster,
    resize_bilinear,
    to_grayscale,
)

from conftest import save_png
from oracles import glcm_bruteforce, haralick_bruteforce


def rgb(pixels):
    arr = np.asarray(pixels, dtype=np.uint8)
    return Raster(width=arr.shape[1], height=arr.shape[0], pixels=arr)


def gray(pixels):
    arr = np.asarray(pixels, dtype=np.uint8)
    return GrayRaster(width=arr.shape[1], height=arr.shape[0], intensities=arr)


class TestLoadRaster:
    def test_png_round_trip(self, tmp_path):
        arr = np.arange(48, dtype=np.uint8).reshape(4, 4, 3)
        save_png(tmp_path / "a.png", arr)
        r = load_raster(tmp_path / "a.png")
        assert (r.width, r.height) == (4, 4)
        assert np.array_equal(r.pixels, arr)

    def test_grayscale_file_replicated_to_three_channels(self, tmp_path):
        from PIL import Image

        arr = np.arange(16, dtype=np.uint8).reshape(4, 4)
        Image.fromarray(arr, mode="L").save(tmp_path / "g.png")
        r = load_raster(tmp_path / "g.png")
        assert np.array_equal(r.pixels[:, :, 0], arr)
        assert np.array_equal(r.pixels[:, :, 0], r.pixels[:, :, 2])

    def test_alpha_dropped(self, tmp_path):
        from PIL import Image

        rgba = np.zeros((2, 2, 4), dtype=np.uint8)
        rgba[..., 0] = 200
        rgba[..., 3] = 255
        Image.fromarray(rgba, mode="RGBA").save(tmp_path / "a.png")
        r = load_raster(tmp_path / "a.png")
        assert r.pixels.shape == (2, 2, 3)
        assert r.pixels[0, 0, 0] == 200

    def test_garbage_file_raises_decode_error(self, tmp_path):
        bad = tmp_path / "bad.png"
        bad.write_bytes(b"this is not an image")
        with pytest.raises(DecodeError):
            load_raster(bad)

    def test_missing_file_raises_decode_error(self, tmp_path):
        with pytest.raises(DecodeError):
            load_raster(tmp_path / "absent.png")


class TestGrayscale:
    def test_primary_colors(self):
        r = rgb([[[255, 0, 0], [0, 255, 0], [0, 0, 255], [255, 255, 255]]])
        g = to_grayscale(r)
        # 0.299*255 = 76.245, 0.587*255 = 149.685, 0.114*255 = 29.07
        assert list(g.intensities[0]) == [76, 150, 29, 255]

    def test_gray_input_unchanged(self):
        r = rgb(np.full((3, 3, 3), 77))
        assert np.all(to_grayscale(r).intensities == 77)

    def test_dtype_and_shape(self):
        r = rgb(np.zeros((2, 5, 3)))
        g = to_grayscale(r)
        assert g.intensities.dtype == np.uint8
        assert g.intensities.shape == (2, 5)
        assert (g.width, g.height) == (5, 2)


class TestResize:
    def test_upsample_1d_hand_values(self):
        g = gray([[0, 255]])
        out = resize_bilinear(g, 4, 1)
        # sample coords -0.25, 0.25, 0.75, 1.25 -> clamped interpolation
        assert list(out.intensities[0]) == [0, 64, 191, 255]

    def test_downsample_1d_hand_values(self):
        g = gray([[0, 100, 200, 255]])
        out = resize_bilinear(g, 2, 1)
        # coords 0.5 and 2.5 -> midpoints 50 and 227.5 (rounds up)
        assert list(out.intensities[0]) == [50, 228]

    def test_identity_resize_is_exact(self):
        arr = np.arange(64, dtype=np.uint8).reshape(8, 8)
        out = resize_bilinear(gray(arr), 8, 8)
        assert np.array_equal(out.intensities, arr)

    def test_constant_stays_constant(self):
        out = resize_bilinear(gray(np.full((5, 7), 93)), 64, 64)
        assert np.all(out.intensities == 93)
        assert (out.width, out.height) == (64, 64)

    def test_output_within_input_range(self):
        rng = np.random.default_rng(3)
        arr = rng.integers(40, 200, size=(6, 9), dtype=np.uint8)
        out = resize_bilinear(gray(arr), 17, 5)
        assert out.intensities.min() >= 40
        assert out.intensities.max() <= 200


class TestGlcm:
    def test_two_pixel_hand_case(self):
        m = glcm(gray([[0, 255]]), (0, 1), levels=16)
        assert m.probs[0, 15] == 0.5
        assert m.probs[15, 0] == 0.5
        assert m.probs.sum() == 1.0

    def test_vertical_offset(self):
        m = glcm(gray([[0], [255]]), (1, 0), levels=16)
        assert m.probs[0, 15] == 0.5
        assert m.probs[15, 0] == 0.5

    def test_quantization_boundaries(self):
        # 15 -> level 0, 16 -> level 1 with 16 levels
        m = glcm(gray([[15, 16]]), (0, 1), levels=16)
        assert m.probs[0, 1] == 0.5
        assert m.probs[1, 0] == 0.5

    def test_offset_with_no_pairs_rejected(self):
        with pytest.raises(DataError):
            glcm(gray([[0, 255]]), (1, 0), levels=16)
        with pytest.raises(DataError):
            glcm(gray([[0, 255]]), (0, 5), levels=16)

    def test_symmetry_and_normalization_random(self):
        rng = np.random.default_rng(11)
        for _ in range(20):
            arr = rng.integers(0, 256, size=(8, 8), dtype=np.uint8)
            for off in GLCM_OFFSETS:
                m = glcm(gray(arr), off, levels=16)
                assert np.allclose(m.probs, m.probs.T)
                assert m.probs.sum() == pytest.approx(1.0, abs=1e-12)

    def test_matches_pair_enumeration(self):
        rng = np.random.default_rng(12)
        arr = rng.integers(0, 256, size=(8, 8), dtype=np.uint8)
        for off in GLCM_OFFSETS:
            m = glcm(gray(arr), off, levels=16)
            expected = glcm_bruteforce(arr.tolist(), off, 16)
            for (i, j), p in expected.items():
                assert m.probs[i, j] == pytest.approx(float(p), abs=1e-15)
            assert m.probs.sum() == pytest.approx(1.0, abs=1e-12)
            assert np.count_nonzero(m.probs) == len(expected)


class TestHaralick:
    def test_two_pixel_hand_case(self):
        feats = haralick(glcm(gray([[0, 255]]), (0, 1), levels=16))
        assert feats.contrast == pytest.approx(225.0, abs=1e-12)
        assert feats.energy == pytest.approx(0.5, abs=1e-12)
        assert feats.homogeneity == pytest.approx(0.0625, abs=1e-12)
        assert feats.correlation == pytest.approx(-1.0, abs=1e-12)

    def test_constant_image(self):
        feats = haralick(glcm(gray(np.full((4, 4), 200)), (0, 1), levels=16))
        assert feats.contrast == 0.0
        assert feats.energy == 1.0
        assert feats.homogeneity == 1.0
        assert feats.correlation == 1.0

    def test_correlation_bounded(self):
        rng = np.random.default_rng(13)
        for _ in range(30):
            arr = rng.integers(0, 256, size=(6, 6), dtype=np.uint8)
            feats = haralick(glcm(gray(arr), (0, 1), levels=16))
            assert -1.0 - 1e-9 <= feats.correlation <= 1.0 + 1e-9

    def test_matches_pair_enumeration(self):
        rng = np.random.default_rng(14)
        for _ in range(5):
            arr = rng.integers(0, 256, size=(8, 8), dtype=np.uint8)
            for off in GLCM_OFFSETS:
                got = haralick(glcm(gray(arr), off, levels=16)).as_tuple()
                want = haralick_bruteforce(arr.tolist(), off, 16)
                assert got == pytest.approx(want, abs=1e-12)


class TestHog:
    def test_constant_image_gives_zero_vector(self):
        vec = hog_descriptor(gray(np.full((64, 64), 128)))
        assert vec.dim == 1764
        assert vec.entries == {}
        assert not np.any(vec.to_dense())

    def test_dimension_for_default_geometry(self):
        rng = np.random.default_rng(15)
        arr = rng.integers(0, 256, size=(64, 64), dtype=np.uint8)
        assert hog_descriptor(gray(arr)).dim == 1764

    def test_intensity_shift_invariance_is_exact(self):
        rng = np.random.default_rng(16)
        arr = rng.integers(0, 200, size=(64, 64), dtype=np.uint8)
        base = hog_descriptor(gray(arr)).to_dense()
        shifted = hog_descriptor(gray(arr + np.uint8(40))).to_dense()
        assert np.array_equal(base, shifted)

    def test_block_norms_bounded_and_entries_nonnegative(self):
        rng = np.random.default_rng(17)
        for _ in range(5):
            arr = rng.integers(0, 256, size=(64, 64), dtype=np.uint8)
            dense = hog_descriptor(gray(arr)).to_dense()
            assert np.all(dense >= 0.0)
            blocks = dense.reshape(-1, 36)
            norms = np.sqrt((blocks**2).sum(axis=1))
            assert np.all(norms <= 1.0 + 1e-6)

    def test_entries_never_exceed_one(self):
        # clipping at 0.2 then renormalizing caps any single entry at 1
        rng = np.random.default_rng(18)
        arr = rng.integers(0, 256, size=(64, 64), dtype=np.uint8)
        dense = hog_descriptor(gray(arr)).to_dense()
        assert dense.max() <= 1.0 + 1e-9

    def test_small_geometry(self):
        cfg = HogConfig(resize_to=(16, 16), cell=8, block=2, block_stride=1, bins=9)
        arr = np.zeros((16, 16), dtype=np.uint8)
        arr[:, 8:] = 255
        vec = hog_descriptor(gray(arr), cfg)
        # 2x2 cells -> one 2x2 block -> 36 values
        assert vec.dim == 36

    def test_bad_geometry_rejected(self):
        with pytest.raises(DataError):
            HogConfig(resize_to=(60, 64))
        with pytest.raises(DataError):
            HogConfig(bins=1)


class TestColorHistogram:
    def test_pure_red(self):
        arr = np.zeros((4, 4, 3), dtype=np.uint8)
        arr[..., 0] = 255
        vec = color_histogram(rgb(arr), 16)
        dense = vec.to_dense()
        assert vec.dim == 48
        assert dense[15] == 1.0  # red top bin
        assert dense[16] == 1.0  # green bottom bin
        assert dense[32] == 1.0  # blue bottom bin
        assert dense.sum() == pytest.approx(3.0, abs=1e-12)

    def test_each_channel_block_sums_to_one(self):
        rng = np.random.default_rng(19)
        arr = rng.integers(0, 256, size=(5, 7, 3), dtype=np.uint8)
        dense = color_histogram(rgb(arr), 16).to_dense()
        for c in range(3):
            assert dense[c * 16 : (c + 1) * 16].sum() == pytest.approx(1.0, abs=1e-12)

    def test_bin_edges(self):
        arr = np.zeros((1, 4, 3), dtype=np.uint8)
        arr[0, :, 0] = [0, 15, 16, 255]
        dense = color_histogram(rgb(arr), 16).to_dense()
        assert dense[0] == 0.5
        assert dense[1] == 0.25
        assert dense[15] == 0.25

    def test_bins_must_divide_256(self):
        arr = np.zeros((2, 2, 3), dtype=np.uint8)
        with pytest.raises(DataError):
            color_histogram(rgb(arr), 10)


class TestFullVector:
    def test_dimension_is_1828(self):
        rng = np.random.default_rng(20)
        arr = rng.integers(0, 256, size=(30, 40, 3), dtype=np.uint8)
        vec = image_feature_vector(rgb(arr))
        assert vec.dim == 1764 + 16 + 48

    def test_layout_hog_then_texture_then_color(self):
        # constant mid-gray: HOG zero, texture degenerate, histogram spiked
        arr = np.full((20, 20, 3), 128, dtype=np.uint8)
        dense = image_feature_vector(rgb(arr)).to_dense()
        assert not np.any(dense[:1764])
        texture = dense[1764 : 1764 + 16]
        # per offset: contrast 0, correlation 1, energy 1, homogeneity 1
        assert list(texture) == [0.0, 1.0, 1.0, 1.0] * 4
        color = dense[1764 + 16 :]
        assert color[8] == 1.0  # 128 // 16 = bin 8

    def test_histogram_taken_before_resize(self):
        # a tiny 2x2 image upsampled to 64x64 would smear the histogram;
        # the color block must reflect the original four pixels only.
        arr = np.zeros((2, 2, 3), dtype=np.uint8)
        arr[0, 0] = 255
        dense = image_feature_vector(rgb(arr)).to_dense()
        color = dense[1764 + 16 :]
        assert color[0] == 0.75
        assert color[15] == 0.25

    def test_custom_config_changes_dimension(self):
        cfg = ImageConfig(
            hog=HogConfig(resize_to=(16, 16)), glcm_levels=8, hist_bins=8
        )
        arr = np.full((4, 4, 3), 9, dtype=np.uint8)
        vec = image_feature_vector(rgb(arr), cfg)
        assert vec.dim == 36 + 16 + 24
