"""Image file formats: FIMG (lossless float32) and 8-bit PGM/PPM."""

import struct
from pathlib import Path
from typing import List, Tuple, Union

import numpy as np
import structlog

from errors import ImageFormatError, TruncatedImageError
from image_core.tensor import ImageTensor

logger = structlog.get_logger(__name__)

PathLike = Union[str, Path]

FIMG_MAGIC = b"FIMG"
FIMG_VERSION = 1
_FIMG_HEADER = struct.Struct("<4sIIII")

PNM_EXTENSIONS = {".pgm", ".ppm", ".pnm"}


def encode_fimg(img: ImageTensor) -> bytes:
    header = _FIMG_HEADER.pack(FIMG_MAGIC, FIMG_VERSION, img.channels, img.height, img.width)
    return header + img.data.astype("<f4", copy=False).tobytes(order="C")


def decode_fimg(blob: bytes) -> ImageTensor:
    """Decode a FIMG byte string.

    Raises:
        ImageFormatError: On bad magic, version or zero dimensions
        TruncatedImageError: When the payload length disagrees with the header
    """
    if len(blob) < 4 or blob[:4] != FIMG_MAGIC:
        raise ImageFormatError("missing FIMG magic")
    if len(blob) < _FIMG_HEADER.size:
        raise TruncatedImageError(f"FIMG header needs {_FIMG_HEADER.size} bytes, got {len(blob)}")
    _, version, channels, height, width = _FIMG_HEADER.unpack_from(blob)
    if version != FIMG_VERSION:
        raise ImageFormatError(f"unsupported FIMG version {version}")
    if min(channels, height, width) == 0:
        raise ImageFormatError(f"invalid FIMG dims {channels}x{height}x{width}")
    expected = channels * height * width * 4
    payload = blob[_FIMG_HEADER.size :]
    if len(payload) != expected:
        raise TruncatedImageError(
            f"FIMG header claims {channels}x{height}x{width} "
            f"({expected // 4} floats) but payload holds {len(payload) / 4:g}"
        )
    data = np.frombuffer(payload, dtype="<f4").reshape(channels, height, width)
    return ImageTensor(data)


def _pnm_tokens(blob: bytes, count: int) -> Tuple[List[bytes], int]:
    """Read ``count`` whitespace-separated header tokens, skipping comments."""
    tokens: List[bytes] = []
    pos = 0
    while len(tokens) < count:
        while pos < len(blob) and blob[pos : pos + 1].isspace():
            pos += 1
        if pos >= len(blob):
            raise TruncatedImageError("PNM header ends early")
        if blob[pos : pos + 1] == b"#":
            while pos < len(blob) and blob[pos : pos + 1] not in (b"\n", b"\r"):
                pos += 1
            continue
        start = pos
        while pos < len(blob) and not blob[pos : pos + 1].isspace():
            pos += 1
        tokens.append(blob[start:pos])
    # exactly one whitespace byte separates the header from the raster
    return tokens, pos + 1


def decode_pnm(blob: bytes) -> ImageTensor:
    """Decode binary PGM (P5) or PPM (P6) into [0, 1] values.

    Samples are one byte for maxval <= 255 and two big-endian bytes up to 65535.
    """
    tokens, offset = _pnm_tokens(blob, 4)
    magic = tokens[0]
    if magic not in (b"P5", b"P6"):
        raise ImageFormatError(f"unsupported PNM magic {magic!r}")
    try:
        width, height, maxval = (int(token) for token in tokens[1:4])
    except ValueError as e:
        raise ImageFormatError(f"bad PNM header: {e}") from e
    if width < 1 or height < 1:
        raise ImageFormatError(f"invalid PNM dims {width}x{height}")
    if not 0 < maxval <= 65535:
        raise ImageFormatError(f"PNM maxval must be in 1..65535, got {maxval}")
    channels = 1 if magic == b"P5" else 3
    sample = np.dtype(np.uint8) if maxval <= 255 else np.dtype(">u2")
    expected = width * height * channels * sample.itemsize
    raster = blob[offset:]
    if len(raster) != expected:
        raise TruncatedImageError(f"PNM raster holds {len(raster)} bytes, expected {expected}")
    pixels = np.frombuffer(raster, dtype=sample).reshape(height, width, channels)
    return ImageTensor(pixels.transpose(2, 0, 1).astype(np.float32) / np.float32(maxval))


def encode_pnm(img: ImageTensor) -> bytes:
    if img.channels not in (1, 3):
        raise ImageFormatError(f"PGM/PPM holds 1 or 3 channels, not {img.channels}")
    magic = "P5" if img.channels == 1 else "P6"
    pixels = np.clip(np.rint(img.data * 255.0), 0, 255).astype(np.uint8)
    header = f"{magic}\n{img.width} {img.height}\n255\n".encode("ascii")
    return header + pixels.transpose(1, 2, 0).tobytes()


def load_image(path: PathLike) -> ImageTensor:
    """Load a FIMG, PGM or PPM file.

    Args:
        path: File to read; the container is detected from its magic bytes

    Returns:
        Image tensor; PNM samples are divided by the file's maxval
    """
    blob = Path(path).read_bytes()
    if blob[:4] == FIMG_MAGIC:
        return decode_fimg(blob)
    if blob[:2] in (b"P5", b"P6"):
        return decode_pnm(blob)
    raise ImageFormatError(f"{path}: unrecognized image container")


def save_image(img: ImageTensor, path: PathLike) -> None:
    """Write an image; ``.pgm``/``.ppm``/``.pnm`` go to 8-bit PNM, anything else to FIMG."""
    path = Path(path)
    if path.suffix.lower() in PNM_EXTENSIONS:
        path.write_bytes(encode_pnm(img))
    else:
        path.write_bytes(encode_fimg(img))


def to_preview_ppm(img: ImageTensor, path: PathLike) -> None:
    """Write a lossy 8-bit RGB preview from the first three bands."""
    picks = [min(i, img.channels - 1) for i in range(3)]
    preview = ImageTensor(np.clip(img.data[picks], 0.0, 1.0))
    Path(path).write_bytes(encode_pnm(preview))
    logger.debug("preview_written", path=str(path), bands=picks)
