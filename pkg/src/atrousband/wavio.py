"""
Minimal RIFF/WAVE reader and writer: 16/24-bit PCM and 32-bit float, 1-2 channels.

Integer samples map to [-1, 1) by dividing by 2**(bits - 1). Nothing is
high-passed or DC-corrected on the way in or out.
"""
from __future__ import annotations

import os
import struct
from dataclasses import dataclass

import numpy as np

from .atrous import Signal
from .errors import CorruptFile, InvalidArgument, UnsupportedFormat

BIT_DEPTHS = ("16", "24", "float32")

_PCM = 0x0001
_FLOAT = 0x0003
_EXTENSIBLE = 0xFFFE


@dataclass(frozen=True)
class WavMeta:
    sample_rate_hz: float
    bit_depth: str
    channels: int
    num_frames: int
    clipped_samples: int = 0

    @property
    def duration_s(self) -> float:
        return self.num_frames / self.sample_rate_hz


def _chunks(data):
    pos = 12
    while pos + 8 <= len(data):
        cid, size = struct.unpack_from("<4sI", data, pos)
        body = pos + 8
        if body + size > len(data):
            raise CorruptFile(f"chunk {cid!r} runs past end of file")
        yield cid, data[body : body + size]
        pos = body + size + (size & 1)


def read_wav(path):
    """Return (Signal, WavMeta) for a PCM16/PCM24/float32 WAV file."""
    with open(path, "rb") as fh:
        data = fh.read()
    if len(data) < 12:
        raise CorruptFile(f"{path}: file too short for a RIFF header")
    riff, _, wave = struct.unpack_from("<4sI4s", data, 0)
    if riff != b"RIFF" or wave != b"WAVE":
        raise UnsupportedFormat(f"{path}: not a RIFF/WAVE file")

    fmt = body = None
    for cid, chunk in _chunks(data):
        if cid == b"fmt ":
            fmt = chunk
        elif cid == b"data":
            body = chunk
            break
    if fmt is None or body is None:
        raise CorruptFile(f"{path}: missing fmt or data chunk")
    if len(fmt) < 16:
        raise CorruptFile(f"{path}: fmt chunk too short")

    tag, channels, rate, _, block_align, bits = struct.unpack_from("<HHIIHH", fmt, 0)
    if tag == _EXTENSIBLE:
        if len(fmt) < 40:
            raise CorruptFile(f"{path}: truncated extensible fmt chunk")
        tag = struct.unpack_from("<H", fmt, 24)[0]
    if channels not in (1, 2):
        raise UnsupportedFormat(f"{path}: {channels} channels, only 1 or 2 supported")
    if (tag, bits) == (_PCM, 16):
        depth = "16"
    elif (tag, bits) == (_PCM, 24):
        depth = "24"
    elif (tag, bits) == (_FLOAT, 32):
        depth = "float32"
    else:
        raise UnsupportedFormat(f"{path}: format tag {tag:#06x} with {bits} bits not supported")
    if block_align != channels * bits // 8:
        raise CorruptFile(f"{path}: block align {block_align} inconsistent with format")
    if len(body) % block_align:
        raise CorruptFile(f"{path}: data chunk ends mid-frame")

    if depth == "16":
        x = np.frombuffer(body, dtype="<i2").astype(np.float64) / 2**15
    elif depth == "24":
        raw = np.frombuffer(body, dtype=np.uint8).reshape(-1, 3).astype(np.int32)
        v = raw[:, 0] | (raw[:, 1] << 8) | (raw[:, 2] << 16)
        v = np.where(v >= 1 << 23, v - (1 << 24), v)
        x = v.astype(np.float64) / 2**23
    else:
        x = np.frombuffer(body, dtype="<f4").astype(np.float64)
        if not np.all(np.isfinite(x)):
            raise CorruptFile(f"{path}: non-finite float samples")
    x = x.reshape(-1, channels).T
    meta = WavMeta(float(rate), depth, channels, x.shape[1])
    return Signal(x, rate), meta


def _encode(signal: Signal, bit_depth):
    x = np.ascontiguousarray(signal.samples.T)  # interleave
    if bit_depth == "float32":
        return x.astype("<f4").tobytes(), 32, _FLOAT, 0
    bits = int(bit_depth)
    full = 2 ** (bits - 1)
    q = np.rint(x * full)
    clipped = int(np.count_nonzero((q < -full) | (q > full - 1)))
    q = np.clip(q, -full, full - 1).astype(np.int32)
    if bits == 16:
        return q.astype("<i2").tobytes(), 16, _PCM, clipped
    u = q.astype("<u4").view(np.uint8).reshape(-1, 4)[:, :3]
    return u.tobytes(), 24, _PCM, clipped


def write_wav(path, signal: Signal, bit_depth="float32") -> WavMeta:
    """Write atomically (temp file + rename). Integer depths clip at full scale."""
    bit_depth = str(bit_depth)
    if bit_depth not in BIT_DEPTHS:
        raise InvalidArgument(f"bit depth {bit_depth!r} not in {BIT_DEPTHS}")
    payload, bits, tag, clipped = _encode(signal, bit_depth)
    channels = signal.channels
    rate = int(round(signal.sample_rate_hz))
    block_align = channels * bits // 8
    fmt = struct.pack("<HHIIHH", tag, channels, rate, rate * block_align, block_align, bits)
    pad = b"\x00" if len(payload) & 1 else b""
    riff_size = 4 + (8 + len(fmt)) + (8 + len(payload) + len(pad))
    header = struct.pack("<4sI4s", b"RIFF", riff_size, b"WAVE")
    header += struct.pack("<4sI", b"fmt ", len(fmt)) + fmt
    header += struct.pack("<4sI", b"data", len(payload))
    tmp = f"{path}.tmp"
    try:
        with open(tmp, "wb") as fh:
            fh.write(header + payload + pad)
        os.replace(tmp, path)
    except OSError:
        if os.path.exists(tmp):
            os.remove(tmp)
        raise
    return WavMeta(float(rate), bit_depth, channels, signal.num_frames, clipped)
