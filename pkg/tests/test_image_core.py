"""Tests for the image container, file formats, resampling and Wald prep."""

import struct

import numpy as np
import pytest

from errors import EmptyResultError, ImageFormatError, NonFiniteError, ShapeError, TruncatedImageError
from image_core import (
    DatasetSpec,
    ImageTensor,
    bicubic_resize,
    bilinear_resize,
    crop_patches,
    load_image,
    patch_origins,
    resample_matrix,
    save_image,
    synth_scene,
    to_preview_ppm,
    wald_degrade,
)
from image_core.io import decode_fimg, decode_pnm, encode_fimg
from metrics import cc


def test_image_tensor_promotes_2d_to_single_band():
    """A 2-D array becomes a 1-channel image."""
    img = ImageTensor(np.zeros((3, 5)))
    assert img.shape == (1, 3, 5)
    assert img.data.dtype == np.float32


@pytest.mark.parametrize("shape", [(2, 2, 2, 2), (0, 4, 4), (4,)])
def test_image_tensor_rejects_bad_shapes(shape):
    """Non-planar or empty arrays are shape errors."""
    with pytest.raises(ShapeError):
        ImageTensor(np.zeros(shape))


def test_image_tensor_rejects_non_finite():
    """NaN values are refused at construction."""
    data = np.zeros((1, 2, 2))
    data[0, 1, 1] = np.nan
    with pytest.raises(NonFiniteError):
        ImageTensor(data)


def test_from_planar_layout():
    """Values fill channel-major, then row-major."""
    img = ImageTensor.from_planar(2, 1, 3, [1, 2, 3, 4, 5, 6])
    assert img.data[1, 0, 2] == 6
    with pytest.raises(ShapeError):
        ImageTensor.from_planar(2, 2, 2, [1, 2, 3])


def test_fimg_preserves_values_bit_exactly(rng):
    """FIMG is lossless for float32 content."""
    img = ImageTensor(rng.standard_normal((3, 4, 5)))
    decoded = decode_fimg(encode_fimg(img))
    assert np.array_equal(decoded.data, img.data)


def test_fimg_rejects_bad_magic_and_version():
    """Wrong magic or version is a format error."""
    blob = encode_fimg(ImageTensor(np.ones((1, 2, 2))))
    with pytest.raises(ImageFormatError):
        decode_fimg(b"XIMG" + blob[4:])
    with pytest.raises(ImageFormatError):
        decode_fimg(blob[:4] + struct.pack("<I", 2) + blob[8:])


def test_fimg_truncated_payload():
    """A short payload is reported as truncation."""
    blob = encode_fimg(ImageTensor(np.ones((2, 3, 3))))
    with pytest.raises(TruncatedImageError):
        decode_fimg(blob[:-4])


def test_pgm_is_scaled_by_maxval():
    """8-bit samples are divided by 255."""
    img = decode_pnm(b"P5\n2 1\n255\n" + bytes([0, 255]))
    assert img.shape == (1, 1, 2)
    assert img.data[0, 0, 1] == pytest.approx(1.0)


def test_sixteen_bit_pgm_is_big_endian_and_scaled():
    """Two-byte samples are read big-endian and divided by maxval."""
    img = decode_pnm(b"P5\n3 1\n65535\n" + struct.pack(">3H", 0, 32768, 65535))
    assert img.shape == (1, 1, 3)
    assert np.allclose(img.data[0, 0], [0.0, 32768 / 65535, 1.0])
    ppm = decode_pnm(b"P6\n1 1\n1023\n" + struct.pack(">3H", 1023, 0, 512))
    assert np.allclose(ppm.data[:, 0, 0], [1.0, 0.0, 512 / 1023])


def test_sixteen_bit_pgm_truncated_raster():
    """A 16-bit raster needs two bytes per sample."""
    with pytest.raises(TruncatedImageError):
        decode_pnm(b"P5\n2 1\n4095\n" + bytes([0, 1, 2]))


def test_save_and_load_by_extension(tmp_path):
    """.pgm goes through 8-bit PNM, anything else through FIMG."""
    img = ImageTensor(np.array([[[0.0, 0.5], [1.0, 0.25]]]))
    save_image(img, tmp_path / "a.pgm")
    save_image(img, tmp_path / "a.fimg")
    assert (tmp_path / "a.pgm").read_bytes().startswith(b"P5")
    assert np.array_equal(load_image(tmp_path / "a.fimg").data, img.data)
    assert np.allclose(load_image(tmp_path / "a.pgm").data, np.rint(img.data * 255) / 255)


def test_preview_uses_first_three_bands(tmp_path):
    """Previews are clipped 8-bit RGB from bands 0..2."""
    img = ImageTensor(np.stack([np.full((2, 2), v) for v in (0.0, 0.5, 2.0, 0.9)]))
    to_preview_ppm(img, tmp_path / "p.ppm")
    preview = load_image(tmp_path / "p.ppm")
    assert preview.channels == 3
    assert preview.data[2, 0, 0] == pytest.approx(1.0)
    assert preview.data[1, 0, 0] == pytest.approx(128 / 255)


def test_load_unknown_container(tmp_path):
    """Unrecognised files are format errors."""
    path = tmp_path / "x.bin"
    path.write_bytes(b"GIF89a")
    with pytest.raises(ImageFormatError):
        load_image(path)


@pytest.mark.parametrize("kernel", ["bicubic", "bilinear"])
@pytest.mark.parametrize("sizes", [(8, 16), (16, 8), (5, 7), (6, 6)])
def test_resample_rows_sum_to_one(kernel, sizes):
    """Interpolation weights form a partition of unity."""
    matrix = resample_matrix(*sizes, kernel)
    assert matrix.shape == (sizes[1], sizes[0])
    assert np.allclose(matrix.sum(axis=1), 1.0)


def test_same_size_resample_is_identity():
    """Resizing to the input size changes nothing."""
    assert np.allclose(resample_matrix(9, 9, "bicubic"), np.eye(9))


def test_bilinear_upsample_half_pixel_centers():
    """Align-corners-false sampling puts 2x output centers at quarter pixels."""
    ramp = ImageTensor(np.arange(4, dtype=np.float64)[None, None, :].repeat(2, axis=1))
    up = bilinear_resize(ramp, 4, 8)
    assert up.data[0, 0, 1] == pytest.approx(0.25)
    assert up.data[0, 0, 2] == pytest.approx(0.75)


def test_bicubic_reproduces_linear_ramp_in_interior():
    """Keys cubic convolution is exact on linear signals away from borders."""
    ramp = np.tile(np.arange(16, dtype=np.float64), (16, 1))
    down = bicubic_resize(ImageTensor(ramp), 8, 8).data[0]
    expected = 2 * np.arange(8) + 0.5
    assert np.allclose(down[4, 1:7], expected[1:7], atol=1e-5)


def test_bicubic_preserves_constants():
    """A constant image stays constant at any size."""
    img = ImageTensor(np.full((2, 6, 6), 0.3))
    assert np.allclose(bicubic_resize(img, 13, 9).data, 0.3)


def test_wald_degrade_shapes(scene_pair):
    """LRMS shrinks by sus; PAN drops to MS size; reference is the MS."""
    ms, pan = scene_pair
    lrms, pan_lo, reference = wald_degrade(ms, pan, 2)
    assert lrms.shape == (4, 16, 16)
    assert pan_lo.shape == (1, 32, 32)
    assert reference is ms


def test_wald_degrade_rejects_mismatch(scene_pair):
    """PAN must be exactly sus times the MS."""
    ms, pan = scene_pair
    with pytest.raises(ShapeError):
        wald_degrade(ms, pan, 4)
    with pytest.raises(ShapeError):
        wald_degrade(ms, ms.band(0), 2)


def test_patch_origins_deterministic_and_in_bounds():
    """Same seed and size give the same grid; every patch fits."""
    spec = DatasetSpec(sus=2, bands=4, patch=8, seed=5)
    first = patch_origins(30, 21, spec)
    assert first == patch_origins(30, 21, spec)
    assert len(first) == 3 * 2
    assert all(r + 8 <= 30 and c + 8 <= 21 for r, c in first)


def test_patch_origins_too_small():
    """An LRMS smaller than one patch yields no patches."""
    with pytest.raises(EmptyResultError):
        patch_origins(7, 40, DatasetSpec(sus=2, patch=8))


def test_crop_patches_alignment(scene_pair):
    """PAN/reference crops start at sus times the LRMS origin."""
    ms, pan = scene_pair
    lrms, pan_lo, reference = wald_degrade(ms, pan, 2)
    spec = DatasetSpec(sus=2, bands=4, patch=4, seed=1)
    patches = crop_patches((pan_lo, lrms, reference), spec)
    origins = patch_origins(lrms.height, lrms.width, spec)
    assert len(patches) == 16
    (row, col), first = origins[0], patches[0]
    assert first.lrms.shape == (4, 4, 4)
    assert first.pan.shape == (1, 8, 8)
    assert np.array_equal(first.reference.data, reference.data[:, 2 * row : 2 * row + 8, 2 * col : 2 * col + 8])
    assert np.array_equal(first.lrms.data, lrms.data[:, row : row + 4, col : col + 4])


def test_synth_scene_deterministic():
    """Equal seeds give identical scenes, values stay in [0, 1]."""
    ms_a, pan_a = synth_scene(11, 3, 32, 32, 2)
    ms_b, pan_b = synth_scene(11, 3, 32, 32, 2)
    ms_c, _ = synth_scene(12, 3, 32, 32, 2)
    assert ms_a.shape == (3, 16, 16) and pan_a.shape == (1, 32, 32)
    assert np.array_equal(ms_a.data, ms_b.data) and np.array_equal(pan_a.data, pan_b.data)
    assert not np.array_equal(ms_a.data, ms_c.data)
    assert ms_a.data.min() >= 0.0 and ms_a.data.max() <= 1.0


def test_synth_scene_rejects_indivisible_size():
    """Scene size must be divisible by sus."""
    with pytest.raises(ShapeError):
        synth_scene(0, 2, 33, 32, 2)


def test_synth_scene_pan_tracks_upsampled_ms():
    """Across 100 seeds PAN correlates (CC > 0.5) with the band mean of the upsampled MS."""
    for seed in range(100):
        ms, pan = synth_scene(seed, 4, 64, 64, 2)
        band_mean = ImageTensor(bicubic_resize(ms, 64, 64).data.mean(axis=0))
        assert cc(pan, band_mean) > 0.5, f"seed {seed}"


def test_crop_patches_tiles_square_image():
    """A 64x64 LRMS with 32x32 patches yields a 2x2 grid."""
    spec = DatasetSpec(sus=2, bands=3, patch=32, seed=0)
    pan = ImageTensor(np.zeros((1, 128, 128)))
    lrms = ImageTensor(np.zeros((3, 64, 64)))
    reference = ImageTensor(np.zeros((3, 128, 128)))
    patches = crop_patches((pan, lrms, reference), spec)
    assert len(patches) == 4
    assert all(p.lrms.shape == (3, 32, 32) and p.pan.shape == (1, 64, 64) for p in patches)


def test_wald_degrade_unit_ratio_is_identity(scene_pair):
    """With sus = 1 nothing is resampled."""
    ms, _ = scene_pair
    pan = ImageTensor(ms.data.mean(axis=0))
    lrms, pan_lo, reference = wald_degrade(ms, pan, 1)
    assert np.allclose(lrms.data, ms.data, atol=1e-6)
    assert np.allclose(pan_lo.data, pan.data, atol=1e-6)
    assert reference is ms
