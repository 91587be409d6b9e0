"""Tests for the classical detail-injection baselines."""

import numpy as np
import pytest

from baselines import BASELINES, BaselineParams, bicubic, brovey, hpf, ihs, sfim
from errors import ShapeError
from image_core import ImageTensor, bicubic_resize, synth_scene, wald_degrade
from metrics import psnr

INJECTORS = {"ihs": ihs, "brovey": brovey, "hpf": hpf, "sfim": sfim}


def naive_box(x: np.ndarray, r: int) -> np.ndarray:
    out = np.empty_like(x)
    height, width = x.shape
    for i in range(height):
        for j in range(width):
            out[i, j] = x[max(i - r, 0) : i + r + 1, max(j - r, 0) : j + r + 1].mean()
    return out


def oracle(method: str, pan: np.ndarray, lrms: ImageTensor, sus: int, radius: int) -> np.ndarray:
    """Direct transcription of each method with uniform intensity weights."""
    ms_up = bicubic_resize(lrms, pan.shape[0], pan.shape[1]).data.astype(np.float64)
    intensity = ms_up.mean(axis=0)
    matched = (pan - pan.mean()) / pan.std() * intensity.std() + intensity.mean()
    if method == "ihs":
        return ms_up + matched - intensity
    if method == "brovey":
        return ms_up * matched / np.maximum(intensity, 1e-6)
    low = naive_box(matched, radius)
    if method == "hpf":
        return ms_up + matched - low
    return ms_up * matched / np.maximum(low, 1e-6)


@pytest.fixture
def random_inputs(rng):
    pan = rng.uniform(0.2, 0.9, size=(12, 16))
    lrms = ImageTensor(rng.uniform(0.2, 0.9, size=(3, 6, 8)))
    return pan, lrms


@pytest.mark.parametrize("method", sorted(INJECTORS))
def test_baseline_matches_direct_transcription(method, random_inputs):
    """Each method equals its textbook formula on random inputs."""
    pan, lrms = random_inputs
    out = INJECTORS[method](ImageTensor(pan), lrms, 2)
    assert out.shape == (3, 12, 16)
    assert np.allclose(out.data, oracle(method, pan.astype(np.float32).astype(np.float64), lrms, 2, 4), atol=1e-5)


@pytest.mark.parametrize("method", ["ihs", "brovey"])
def test_pan_equal_to_intensity_returns_upsampled_ms(method, rng):
    """No detail is injected when PAN already is the intensity."""
    lrms = ImageTensor(rng.uniform(0.2, 0.8, size=(4, 5, 5)))
    ms_up = bicubic_resize(lrms, 10, 10).data
    pan = ImageTensor(ms_up.astype(np.float64).mean(axis=0))
    assert np.allclose(INJECTORS[method](pan, lrms, 2).data, ms_up, atol=1e-5)


def test_ihs_step_edge_reaches_every_band():
    """A PAN step over a flat LRMS appears in all output bands."""
    lrms = ImageTensor(np.full((3, 4, 4), 0.5))
    step = np.zeros((8, 8))
    step[:, 4:] = 0.2
    out = ihs(ImageTensor(step), lrms, 2).data
    assert np.allclose(out[:, :, 4:] - out[:, :, :4], 0.2, atol=1e-6)


def test_brovey_is_homogeneous(rng):
    """Scaling the LRMS by t scales the output by t."""
    pan = ImageTensor(rng.uniform(0.2, 0.9, size=(8, 8)))
    lrms = rng.uniform(0.2, 0.9, size=(2, 4, 4))
    base = brovey(pan, ImageTensor(lrms), 2).data
    scaled = brovey(pan, ImageTensor(lrms * 1.7), 2).data
    assert np.allclose(scaled, base * 1.7, rtol=1e-5)


@pytest.mark.parametrize("method", ["hpf", "sfim"])
def test_constant_pan_returns_upsampled_ms(method, rng):
    """A flat PAN has no detail to inject."""
    lrms = ImageTensor(rng.uniform(0.2, 0.8, size=(2, 6, 6)))
    out = INJECTORS[method](ImageTensor(np.full((12, 12), 0.4)), lrms, 2)
    assert np.allclose(out.data, bicubic_resize(lrms, 12, 12).data, atol=1e-5)


def test_bicubic_baseline_ignores_pan_values(rng):
    """The bicubic method is plain LRMS upsampling."""
    lrms = ImageTensor(rng.uniform(size=(3, 4, 4)))
    out = bicubic(ImageTensor(rng.uniform(size=(8, 8))), lrms, 2)
    assert np.array_equal(out.data, bicubic_resize(lrms, 8, 8).data)


@pytest.mark.parametrize("method", sorted(BASELINES))
def test_baselines_reject_mismatched_sizes(method, rng):
    """PAN must be sus times the LRMS."""
    with pytest.raises(ShapeError):
        BASELINES[method](ImageTensor(rng.uniform(size=(9, 8))), ImageTensor(rng.uniform(size=(2, 4, 4))), 2)


def test_baseline_params_validation():
    """Weights must be non-negative, sum to one and match the band count."""
    with pytest.raises(ValueError):
        BaselineParams(intensity_weights=(0.5, 0.6))
    with pytest.raises(ValueError):
        BaselineParams(intensity_weights=(1.5, -0.5))
    with pytest.raises(ShapeError):
        BaselineParams(intensity_weights=(0.5, 0.5)).weights(3)
    assert BaselineParams().radius(4) == 8
    assert BaselineParams(hpf_radius=1).radius(4) == 1


def test_custom_intensity_weights_change_ihs(rng):
    """Non-uniform weights move the intensity and so the injected detail."""
    pan = ImageTensor(rng.uniform(0.2, 0.9, size=(8, 8)))
    lrms = ImageTensor(rng.uniform(0.2, 0.9, size=(2, 4, 4)))
    uniform = ihs(pan, lrms, 2).data
    skewed = ihs(pan, lrms, 2, BaselineParams(intensity_weights=(0.9, 0.1))).data
    assert not np.allclose(uniform, skewed)


@pytest.mark.slow
@pytest.mark.parametrize("method", sorted(INJECTORS))
def test_detail_injection_beats_bicubic_on_synthetic_scenes(method):
    """Each baseline tops bicubic PSNR on at least 70% of 50 seeds."""
    wins = 0
    for seed in range(50):
        ms, pan = synth_scene(seed, 4, 128, 128, 2)
        lrms, pan_lo, reference = wald_degrade(ms, pan, 2)
        fused = INJECTORS[method](pan_lo, lrms, 2)
        wins += psnr(fused, reference) > psnr(bicubic(pan_lo, lrms, 2), reference)
    assert wins >= 35
