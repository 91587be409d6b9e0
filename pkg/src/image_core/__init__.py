"""Image container, file formats, resampling and Wald-protocol data prep."""

from image_core.io import load_image, save_image, to_preview_ppm
from image_core.resample import bicubic_resize, bilinear_resize, resample_matrix, resize_array
from image_core.synth import synth_scene
from image_core.tensor import DatasetSpec, ImageTensor
from image_core.wald import WaldTriple, crop_patches, patch_origins, wald_degrade

__all__ = [
    "DatasetSpec",
    "ImageTensor",
    "WaldTriple",
    "bicubic_resize",
    "bilinear_resize",
    "crop_patches",
    "load_image",
    "patch_origins",
    "resample_matrix",
    "resize_array",
    "save_image",
    "synth_scene",
    "to_preview_ppm",
    "wald_degrade",
]
