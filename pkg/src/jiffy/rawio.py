"""Raw frame-dump ingestion: headerless little-endian arrays on disk.

Datasets arrive as flat files of back-to-back frames (float32 meters or
already-quantized unsigned integers). A RawSequenceSpec pins down the
geometry; reading streams one frame at a time so sequence length never
matters for memory.
"""

import os
from dataclasses import dataclass

import numpy as np

from .scan import ScanType

ELEMENT_TYPES = {
    "float32": np.dtype("<f4"),
    "uint32": np.dtype("<u4"),
    "uint16": np.dtype("<u2"),
    "uint8": np.dtype("<u1"),
}


@dataclass(frozen=True)
class RawSequenceSpec:
    path: str
    element_type: str
    rows: int
    cols: int
    scan_type: ScanType = ScanType.RANGE
    frame_stride: int | None = None     # bytes between frame starts

    def __post_init__(self):
        if self.element_type not in ELEMENT_TYPES:
            raise ValueError(f"element_type must be one of "
                             f"{sorted(ELEMENT_TYPES)}, got {self.element_type!r}")
        if self.rows < 1 or self.cols < 1:
            raise ValueError("rows and cols must be positive")
        if self.frame_stride is not None and self.frame_stride < self.frame_bytes:
            raise ValueError("frame_stride smaller than one frame")
        object.__setattr__(self, "scan_type", ScanType(self.scan_type))

    @property
    def dtype(self) -> np.dtype:
        return ELEMENT_TYPES[self.element_type]

    @property
    def frame_bytes(self) -> int:
        return self.rows * self.cols * self.dtype.itemsize

    @property
    def stride(self) -> int:
        return self.frame_stride or self.frame_bytes

    def count_frames(self) -> int:
        size = os.path.getsize(self.path)
        if size % self.stride:
            raise ValueError(
                f"{self.path}: size {size} is not a whole number of "
                f"{self.stride}-byte frames")
        return size // self.stride


def read_frames(spec: RawSequenceSpec):
    """Yield one (rows, cols) array per frame, in file order."""
    n = spec.count_frames()
    skip = spec.stride - spec.frame_bytes
    with open(spec.path, "rb") as f:
        for _ in range(n):
            buf = f.read(spec.frame_bytes)
            if len(buf) != spec.frame_bytes:
                raise ValueError(f"{spec.path}: short read")
            if skip:
                f.seek(skip, os.SEEK_CUR)
            yield np.frombuffer(buf, dtype=spec.dtype).reshape(
                spec.rows, spec.cols)


def read_all(spec: RawSequenceSpec) -> np.ndarray:
    """Whole file as a (frames, rows, cols) array."""
    frames = list(read_frames(spec))
    if not frames:
        return np.empty((0, spec.rows, spec.cols), dtype=spec.dtype)
    return np.stack(frames)


def write_frames(path: str, frames, element_type: str):
    """Write frames back-to-back as little-endian raw data."""
    dtype = ELEMENT_TYPES[element_type]
    with open(path, "wb") as f:
        for frame in frames:
            f.write(np.ascontiguousarray(frame, dtype=dtype).tobytes())
