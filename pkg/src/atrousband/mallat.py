"""
Decimated dyadic wavelet transform (Mallat pyramid), used as a foil.

Subsampling by two at every stage aliases whatever the analysis filters let
through near the band edges. As long as every band is kept, the synthesis
bank cancels it; zero one band and the alias shows up in the output. This
module exists to make that measurable next to the a trous result.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.signal.windows import blackmanharris

from .atrous import Signal
from .errors import InvalidArgument


@dataclass(frozen=True)
class QmfPair:
    analysis_lowpass: np.ndarray
    analysis_highpass: np.ndarray
    synthesis_lowpass: np.ndarray
    synthesis_highpass: np.ndarray


def haar_pair() -> QmfPair:
    s = 1 / math.sqrt(2)
    lo = np.array([s, s])
    hi = np.array([s, -s])
    return QmfPair(lo, hi, lo, hi)


def orthogonal_pair(lowpass) -> QmfPair:
    """Build the four filters of an orthogonal bank from its low-pass."""
    h0 = np.asarray(lowpass, dtype=float)
    h1 = h0[::-1] * (-1.0) ** np.arange(h0.size)
    return QmfPair(h0, h1, h0, h1)


def _indices(n, k):
    return (2 * np.arange(n // 2)[:, None] + np.arange(k)[None, :]) % n


def _analyze(x, filters):
    idx = _indices(x.shape[-1], filters.analysis_lowpass.size)
    blocks = x[:, idx]  # (channels, n/2, taps)
    return blocks @ filters.analysis_lowpass, blocks @ filters.analysis_highpass


def _synthesize(lo, hi, filters):
    channels, half = lo.shape
    n = 2 * half
    k = filters.synthesis_lowpass.size
    idx = _indices(n, k).ravel()
    out = np.zeros((channels, n))
    for c in range(channels):
        contrib = (
            lo[c][:, None] * filters.synthesis_lowpass[None, :]
            + hi[c][:, None] * filters.synthesis_highpass[None, :]
        )
        np.add.at(out[c], idx, contrib.ravel())
    return out


def _padded_length(n, num_stages):
    step = 2**num_stages
    return -(-n // step) * step


def mallat_decompose(signal: Signal, filters: QmfPair | None = None, num_stages=1):
    """Pyramid analysis with periodic extension.

    Returns ``num_stages + 1`` Signals ordered low to high band: the coarsest
    approximation first, the finest detail last. Each carries its own
    (halved) sample rate. Signals whose length is not a multiple of
    ``2**num_stages`` are zero-padded at the end.
    """
    filters = filters or haar_pair()
    num_stages = int(num_stages)
    if num_stages < 1:
        raise InvalidArgument("num_stages must be >= 1")
    n = signal.num_frames
    if n < 2**num_stages:
        raise InvalidArgument(f"signal of {n} samples too short for {num_stages} stages")
    x = np.zeros((signal.channels, _padded_length(n, num_stages)))
    x[:, :n] = signal.samples
    rate = signal.sample_rate_hz
    details = []
    for _ in range(num_stages):
        x, d = _analyze(x, filters)
        rate /= 2
        details.append(Signal(d, rate))
    return [Signal(x, rate)] + details[::-1]


def mallat_synthesize(bands, filters: QmfPair | None = None, length=None) -> Signal:
    filters = filters or haar_pair()
    x = bands[0].samples
    for d in bands[1:]:
        x = _synthesize(x, d.samples, filters)
    rate = bands[-1].sample_rate_hz * 2
    if length is not None:
        x = x[:, :length]
    return Signal(x, rate)


def mallat_resynth_with_zeroed_band(signal: Signal, filters: QmfPair | None = None,
                                    num_stages=1, band_index=None) -> Signal:
    """Round trip with one band (low-to-high index) replaced by zeros; None zeroes nothing."""
    bands = mallat_decompose(signal, filters, num_stages)
    if band_index is not None:
        if not 0 <= band_index < len(bands):
            raise InvalidArgument(f"band index {band_index} outside 0..{len(bands) - 1}")
        b = bands[band_index]
        bands[band_index] = Signal(np.zeros_like(b.samples), b.sample_rate_hz)
    return mallat_synthesize(bands, filters, signal.num_frames)


def _spectrum(x):
    w = blackmanharris(x.size, sym=False)
    return np.abs(np.fft.rfft(x * w))


def aliasing_metric(original: Signal, modified: Signal, tone_hz, exclusion=0.05) -> float:
    """Largest spurious peak in `modified`, in dB relative to the tone of `original`.

    Frequencies closer than ``exclusion * Nyquist`` to the tone or any of its
    harmonics are ignored. Only the first channel is analyzed.
    """
    fs = original.sample_rate_hz
    ref = _spectrum(original.samples[0])
    spec = _spectrum(modified.samples[0])
    freqs = np.fft.rfftfreq(original.num_frames, 1 / fs)
    guard = exclusion * fs / 2
    near_tone = np.abs(freqs - tone_hz) < guard
    tone_level = ref[near_tone].max()
    if tone_level == 0:
        raise InvalidArgument(f"original has no energy near {tone_hz} Hz")
    mask = np.ones(freqs.size, dtype=bool)
    for k in range(1, int(fs / 2 // tone_hz) + 2):
        mask &= np.abs(freqs - k * tone_hz) >= guard
    spur = spec[mask].max() if mask.any() else 0.0
    return 20 * math.log10(max(spur / tone_level, 1e-20))
