"""
Modified a trous decomposition and additive synthesis.

Each stage convolves the current approximation with a symmetric odd-length
low-pass, drops the first `tau = (N - 1) / 2` (non-causal) output samples and
takes the detail as the zero-padded input minus that trimmed approximation.
All subbands stay at the input sample rate and are time-aligned at sample 0,
so synthesis is a plain zero-padded sum.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.signal import fftconvolve

from .errors import InvalidArgument
from .filters import FirFilter, group_delay
from .mappings import BandLabel, DecompositionPlan

FFT_MIN_TAPS = 129


@dataclass(frozen=True)
class Signal:
    """Planar audio: `samples` has shape (channels, frames)."""

    samples: np.ndarray
    sample_rate_hz: float

    def __post_init__(self):
        x = np.array(self.samples, dtype=np.float64, ndmin=1)
        if x.ndim == 1:
            x = x[np.newaxis, :]
        if x.ndim != 2 or x.shape[0] not in (1, 2):
            raise InvalidArgument(f"expected 1 or 2 channels, got shape {np.shape(self.samples)}")
        if not self.sample_rate_hz > 0:
            raise InvalidArgument(f"sample rate must be positive, got {self.sample_rate_hz}")
        if not np.all(np.isfinite(x)):
            raise InvalidArgument("signal contains NaN or Inf")
        x.setflags(write=False)
        object.__setattr__(self, "samples", x)
        object.__setattr__(self, "sample_rate_hz", float(self.sample_rate_hz))

    @property
    def channels(self) -> int:
        return self.samples.shape[0]

    @property
    def num_frames(self) -> int:
        return self.samples.shape[1]

    def channel(self, i) -> "Signal":
        return Signal(self.samples[i], self.sample_rate_hz)


@dataclass(frozen=True)
class SubbandSet:
    """Subband signals ordered from lowest band to highest band.

    `bands[0]` is the final approximation; the remaining entries are the
    details. Every array has shape (channels, length) where the length
    depends on how many stages the band went through.
    """

    bands: tuple
    band_labels: tuple
    stage_delays: tuple
    original_length: int
    sample_rate_hz: float
    mapping_kind: str = ""

    def __post_init__(self):
        object.__setattr__(self, "bands", tuple(self.bands))
        object.__setattr__(self, "band_labels", tuple(self.band_labels))
        object.__setattr__(self, "stage_delays", tuple(self.stage_delays))
        if len(self.bands) != len(self.band_labels):
            raise InvalidArgument("one label per band required")
        if len({b.shape[0] for b in self.bands}) != 1:
            raise InvalidArgument("all bands must have the same channel count")

    @property
    def num_bands(self) -> int:
        return len(self.bands)

    @property
    def channels(self) -> int:
        return self.bands[0].shape[0]

    @property
    def final_approximation(self) -> np.ndarray:
        return self.bands[0]

    @property
    def details(self) -> list:
        """Detail signals, finest (highest band) first."""
        return list(self.bands[:0:-1])

    @property
    def max_length(self) -> int:
        return max(b.shape[1] for b in self.bands)

    def padded(self) -> np.ndarray:
        """All bands zero-padded to a common length: shape (bands, channels, length)."""
        out = np.zeros((self.num_bands, self.channels, self.max_length))
        for k, b in enumerate(self.bands):
            out[k, :, : b.shape[1]] = b
        return out

    def channel(self, i) -> "SubbandSet":
        return SubbandSet(
            [b[i : i + 1] for b in self.bands],
            self.band_labels,
            self.stage_delays,
            self.original_length,
            self.sample_rate_hz,
            self.mapping_kind,
        )

    def band_index(self, name: str) -> int:
        for i, label in enumerate(self.band_labels):
            if label.name == name:
                return i
        raise InvalidArgument(f"no band named {name!r}")


def fir_convolve(x: np.ndarray, h: np.ndarray) -> np.ndarray:
    """Full linear convolution along the last axis, zero-extended."""
    x = np.atleast_2d(x)
    if h.size >= FFT_MIN_TAPS:
        y = fftconvolve(x, h[np.newaxis, :], axes=-1)
        # FFT round-off leaks ~1e-17 everywhere; keep unreachable outputs exactly 0
        # so silent stretches stay silent, as they would with direct convolution
        hit = np.zeros((x.shape[0], y.shape[1] + 1))
        np.cumsum(x != 0, axis=-1, out=hit[:, 1 : x.shape[1] + 1])
        hit[:, x.shape[1] + 1 :] = hit[:, x.shape[1] : x.shape[1] + 1]
        k = np.arange(y.shape[1])
        reach = hit[:, k + 1] - hit[:, np.maximum(k - h.size + 1, 0)]
        y[reach == 0] = 0.0
        return y
    return np.stack([np.convolve(row, h) for row in x])


def _split(x: np.ndarray, f: FirFilter):
    tau = group_delay(f)
    approx = fir_convolve(x, f.coefficients)[:, tau:]
    padded = np.zeros_like(approx)
    padded[:, : x.shape[1]] = x
    return approx, padded - approx


def decompose_stage(approx, stage_filter: FirFilter):
    """One analysis step: returns (new_approx, detail), both of length L + tau."""
    sig = approx if isinstance(approx, Signal) else None
    x = sig.samples if sig is not None else np.atleast_2d(np.asarray(approx, dtype=float))
    if x.shape[-1] == 0:
        raise InvalidArgument("cannot decompose an empty signal")
    a, d = _split(x, stage_filter)
    if sig is not None:
        return Signal(a, sig.sample_rate_hz), Signal(d, sig.sample_rate_hz)
    return a, d


def decompose(signal: Signal, plan: DecompositionPlan) -> SubbandSet:
    if signal.sample_rate_hz != plan.sample_rate_hz:
        raise InvalidArgument(
            f"plan built for {plan.sample_rate_hz} Hz, signal is {signal.sample_rate_hz} Hz"
        )
    if signal.num_frames == 0:
        raise InvalidArgument("cannot decompose an empty signal")
    bands = [signal.samples]
    delays = []
    for st in plan.stages:
        low, high = _split(bands[st.target], st.filter)
        bands[st.target : st.target + 1] = [low, high]
        delays.append(group_delay(st.filter))
    return SubbandSet(
        bands,
        plan.band_labels,
        delays,
        signal.num_frames,
        signal.sample_rate_hz,
        plan.mapping_kind,
    )


def synthesize(subbands: SubbandSet, gains=None) -> Signal:
    """Gain-weighted zero-padded sum, truncated to the original length."""
    if gains is None:
        gains = np.ones(subbands.num_bands)
    gains = np.asarray(gains, dtype=float)
    if gains.shape != (subbands.num_bands,):
        raise InvalidArgument(
            f"expected {subbands.num_bands} gains, got {gains.size}"
        )
    if not np.all(np.isfinite(gains)):
        raise InvalidArgument("gains must be finite")
    n = subbands.original_length
    out = np.zeros((subbands.channels, n))
    for g, b in zip(gains, subbands.bands):
        if g != 0:
            m = min(n, b.shape[1])
            out[:, :m] += g * b[:, :m]
    return Signal(out, subbands.sample_rate_hz)


def filter_band(subbands: SubbandSet, index: int, f: FirFilter) -> SubbandSet:
    """Apply a user FIR to one band, trimming its group delay to keep alignment."""
    if not 0 <= index < subbands.num_bands:
        raise InvalidArgument(f"band index {index} out of range")
    tau = group_delay(f)
    bands = list(subbands.bands)
    bands[index] = fir_convolve(bands[index], f.coefficients)[:, tau:]
    return SubbandSet(
        bands,
        subbands.band_labels,
        subbands.stage_delays,
        subbands.original_length,
        subbands.sample_rate_hz,
        subbands.mapping_kind,
    )


def merge_channels(left: SubbandSet, right: SubbandSet) -> SubbandSet:
    """Stack two mono subband sets into one 2B-band set (L bands, then R bands)."""
    if left.band_labels != right.band_labels or left.sample_rate_hz != right.sample_rate_hz:
        raise InvalidArgument("left and right were decomposed with different plans")
    if left.channels != 1 or right.channels != 1:
        raise InvalidArgument("merge_channels expects mono subband sets")
    labels = [BandLabel(f"L:{b.name}", b.f_low_hz, b.f_high_hz) for b in left.band_labels]
    labels += [BandLabel(f"R:{b.name}", b.f_low_hz, b.f_high_hz) for b in right.band_labels]
    return SubbandSet(
        list(left.bands) + list(right.bands),
        labels,
        left.stage_delays,
        left.original_length,
        left.sample_rate_hz,
        left.mapping_kind,
    )
