"""FCKPT checkpoint format.

Layout (little-endian): magic ``FCKP``, u32 version (1), u32 tensor count,
then per tensor a u16 name length, the UTF-8 name, a u8 rank, ``rank`` u32
dims and the float32 payload.
"""

import struct
from collections import OrderedDict
from pathlib import Path
from typing import Mapping, Union

import numpy as np
import structlog

from errors import CheckpointError

logger = structlog.get_logger(__name__)

MAGIC = b"FCKP"
VERSION = 1
_HEADER = struct.Struct("<4sII")


def encode_checkpoint(tensors: Mapping[str, np.ndarray]) -> bytes:
    chunks = [_HEADER.pack(MAGIC, VERSION, len(tensors))]
    for name, tensor in tensors.items():
        encoded = name.encode("utf-8")
        if len(encoded) > 0xFFFF:
            raise CheckpointError(f"tensor name too long: {name[:40]}...")
        array = np.asarray(tensor, dtype="<f4")
        chunks.append(struct.pack("<H", len(encoded)) + encoded)
        chunks.append(struct.pack(f"<B{array.ndim}I", array.ndim, *array.shape))
        chunks.append(array.tobytes(order="C"))
    return b"".join(chunks)


def decode_checkpoint(blob: bytes) -> "OrderedDict[str, np.ndarray]":
    if len(blob) < _HEADER.size or blob[:4] != MAGIC:
        raise CheckpointError("missing FCKP magic")
    _, version, count = _HEADER.unpack_from(blob)
    if version != VERSION:
        raise CheckpointError(f"unsupported checkpoint version {version}")

    tensors: "OrderedDict[str, np.ndarray]" = OrderedDict()
    offset = _HEADER.size
    try:
        for _ in range(count):
            (name_len,) = struct.unpack_from("<H", blob, offset)
            offset += 2
            name = blob[offset : offset + name_len].decode("utf-8")
            offset += name_len
            (rank,) = struct.unpack_from("<B", blob, offset)
            offset += 1
            dims = struct.unpack_from(f"<{rank}I", blob, offset)
            offset += 4 * rank
            size = int(np.prod(dims, dtype=np.int64))
            if offset + 4 * size > len(blob):
                raise CheckpointError(f"checkpoint truncated inside tensor {name!r}")
            tensors[name] = np.frombuffer(blob, dtype="<f4", count=size, offset=offset).reshape(dims).astype(np.float32)
            offset += 4 * size
    except struct.error as e:
        raise CheckpointError(f"checkpoint truncated: {e}") from e
    if offset != len(blob):
        raise CheckpointError(f"{len(blob) - offset} trailing bytes after {count} tensors")
    return tensors


def save_checkpoint(path: Union[str, Path], tensors: Mapping[str, np.ndarray]) -> None:
    Path(path).write_bytes(encode_checkpoint(tensors))
    logger.info("checkpoint_saved", path=str(path), tensors=len(tensors))


def load_checkpoint(path: Union[str, Path]) -> "OrderedDict[str, np.ndarray]":
    return decode_checkpoint(Path(path).read_bytes())
