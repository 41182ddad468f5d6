import struct

import numpy as np
import pytest

from atrousband import Signal
from atrousband.errors import CorruptFile, UnsupportedFormat
from atrousband.wavio import read_wav, write_wav

from .conftest import FS


def pcm16_file(path, frames, channels=1, rate=FS):
    data = np.asarray(frames, dtype="<i2").tobytes()
    fmt = struct.pack("<HHIIHH", 1, channels, rate, rate * 2 * channels, 2 * channels, 16)
    body = b"WAVE" + b"fmt " + struct.pack("<I", 16) + fmt + b"data" + struct.pack("<I", len(data)) + data
    path.write_bytes(b"RIFF" + struct.pack("<I", len(body)) + body)


def test_pcm16_scaling(tmp_path):
    p = tmp_path / "a.wav"
    pcm16_file(p, [-32768, 0, 16384, 32767])
    sig, meta = read_wav(p)
    assert sig.samples[0, 0] == -1.0
    assert sig.samples[0, 2] == 0.5
    assert sig.samples[0, 3] == 32767 / 32768
    assert (meta.bit_depth, meta.channels, meta.num_frames, meta.sample_rate_hz) == ("16", 1, 4, FS)
    assert meta.duration_s == 4 / FS


def test_all_zero_file(tmp_path):
    p = tmp_path / "z.wav"
    pcm16_file(p, np.zeros(100, dtype=int))
    sig, _ = read_wav(p)
    assert sig.num_frames == 100 and not np.any(sig.samples)


def test_float32_round_trip_is_bit_identical(tmp_path, rng):
    x = rng.uniform(-1.5, 1.5, (2, 1000)).astype(np.float32).astype(np.float64)
    p = tmp_path / "f.wav"
    meta = write_wav(p, Signal(x, FS), "float32")
    assert meta.clipped_samples == 0
    y, m2 = read_wav(p)
    assert np.array_equal(y.samples, x)
    assert (m2.bit_depth, m2.channels) == ("float32", 2)


def test_stereo_interleaving(tmp_path):
    p = tmp_path / "s.wav"
    pcm16_file(p, [1, -1, 2, -2, 3, -3], channels=2)
    sig, _ = read_wav(p)
    assert np.array_equal(sig.samples * 32768, [[1, 2, 3], [-1, -2, -3]])
    write_wav(tmp_path / "t.wav", sig, "16")
    assert (tmp_path / "t.wav").read_bytes() == p.read_bytes()


def test_pcm24_noise_within_quantization(tmp_path, rng):
    x = rng.uniform(-0.99, 0.99, (1, 5000))
    p = tmp_path / "n24.wav"
    write_wav(p, Signal(x, FS), "24")
    y, meta = read_wav(p)
    assert meta.bit_depth == "24"
    assert np.max(np.abs(y.samples - x)) <= 2.0**-23
    assert y.samples.min() >= -1 and y.samples.max() < 1


def test_pcm24_stereo_round_trip(tmp_path, rng):
    x = np.round(rng.uniform(-1, 1, (2, 300)) * 2**23) / 2**23
    write_wav(tmp_path / "s24.wav", Signal(x, FS), "24")
    y, meta = read_wav(tmp_path / "s24.wav")
    assert meta.channels == 2 and np.array_equal(y.samples, x)


def test_pcm24_extremes(tmp_path):
    x = np.array([-1.0, -2**-23, 0.0, 2**-23, 1 - 2**-23])
    write_wav(tmp_path / "e.wav", Signal(x, FS), "24")
    y, _ = read_wav(tmp_path / "e.wav")
    assert np.array_equal(y.samples[0], x)


def test_clipping_is_reported(tmp_path):
    t = np.arange(4800) / FS
    meta = write_wav(tmp_path / "c.wav", Signal(1.5 * np.sin(2 * np.pi * 440 * t), FS), "16")
    assert meta.clipped_samples > 0
    y, _ = read_wav(tmp_path / "c.wav")
    assert y.samples.max() == 32767 / 32768 and y.samples.min() == -1.0


@pytest.mark.parametrize("depth,step", [("16", 2.0**-15), ("24", 2.0**-23), ("float32", 0.0)])
def test_dc_survives(tmp_path, depth, step):
    p = tmp_path / f"dc{depth}.wav"
    write_wav(p, Signal(np.full(1000, 0.5), FS), depth)
    y, _ = read_wav(p)
    assert abs(y.samples.mean() - 0.5) <= step


def test_unsupported_formats(tmp_path):
    p = tmp_path / "junk.wav"
    p.write_bytes(b"OggS" + b"\0" * 40)
    with pytest.raises(UnsupportedFormat):
        read_wav(p)
    # 8-bit PCM
    fmt = struct.pack("<HHIIHH", 1, 1, FS, FS, 1, 8)
    body = b"WAVE" + b"fmt " + struct.pack("<I", 16) + fmt + b"data" + struct.pack("<I", 4) + b"\x80" * 4
    p.write_bytes(b"RIFF" + struct.pack("<I", len(body)) + body)
    with pytest.raises(UnsupportedFormat):
        read_wav(p)
    # three channels
    fmt = struct.pack("<HHIIHH", 1, 3, FS, FS * 6, 6, 16)
    body = b"WAVE" + b"fmt " + struct.pack("<I", 16) + fmt + b"data" + struct.pack("<I", 6) + b"\0" * 6
    p.write_bytes(b"RIFF" + struct.pack("<I", len(body)) + body)
    with pytest.raises(UnsupportedFormat):
        read_wav(p)


def test_truncated_file_is_corrupt(tmp_path):
    good = tmp_path / "g.wav"
    pcm16_file(good, np.arange(100))
    raw = good.read_bytes()
    for cut in (len(raw) - 10, 30, 8):
        bad = tmp_path / f"t{cut}.wav"
        bad.write_bytes(raw[:cut])
        with pytest.raises(CorruptFile):
            read_wav(bad)


def test_extensible_float_is_read(tmp_path):
    x = np.array([0.25, -0.5, 0.125], dtype="<f4")
    guid = struct.pack("<H", 3) + b"\x00\x00\x00\x00\x10\x00\x80\x00\x00\xaa\x00\x38\x9b\x71"
    fmt = struct.pack("<HHIIHHHHI", 0xFFFE, 1, FS, FS * 4, 4, 32, 22, 32, 4) + guid
    body = b"WAVE" + b"fmt " + struct.pack("<I", len(fmt)) + fmt + b"data" + struct.pack("<I", 12) + x.tobytes()
    p = tmp_path / "ext.wav"
    p.write_bytes(b"RIFF" + struct.pack("<I", len(body)) + body)
    sig, meta = read_wav(p)
    assert meta.bit_depth == "float32"
    assert np.array_equal(sig.samples[0], x.astype(float))


def test_unwritable_path(tmp_path):
    with pytest.raises(OSError):
        write_wav(tmp_path / "missing" / "x.wav", Signal(np.zeros(4), FS))
