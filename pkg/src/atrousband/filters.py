"""
Odd-length linear-phase FIR low-pass filters.

Every decomposition stage is driven by a symmetric FIR low-pass with an odd
number of taps, so its group delay is a whole number of samples and can be
trimmed away exactly.
"""
from __future__ import annotations

import math
import os
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidArgument

WINDOW_KINDS = ("blackman", "hamming", "rectangular")


@dataclass(frozen=True)
class FirFilter:
    """Immutable FIR coefficients plus design metadata.

    `nominal_cutoff_hz` is the -6 dB point of a windowed sinc; it is
    NaN for user-supplied filters whose cutoff is unknown.
    """

    coefficients: np.ndarray
    nominal_cutoff_hz: float = math.nan
    design_sample_rate_hz: float = math.nan
    window_kind: str = field(default="", compare=False)

    def __post_init__(self):
        h = np.array(self.coefficients, dtype=np.float64, ndmin=1)
        if h.ndim != 1:
            raise InvalidArgument("FIR coefficients must be one-dimensional")
        if h.size % 2 == 0:
            raise InvalidArgument(f"FIR length must be odd, got {h.size}")
        if not np.all(np.isfinite(h)):
            raise InvalidArgument("FIR coefficients must be finite")
        h.setflags(write=False)
        object.__setattr__(self, "coefficients", h)

    @property
    def num_taps(self) -> int:
        return self.coefficients.size

    def __eq__(self, other):
        if not isinstance(other, FirFilter):
            return NotImplemented
        return (
            np.array_equal(self.coefficients, other.coefficients)
            and _same_float(self.nominal_cutoff_hz, other.nominal_cutoff_hz)
            and _same_float(self.design_sample_rate_hz, other.design_sample_rate_hz)
        )

    __hash__ = None


def _same_float(a, b):
    return (math.isnan(a) and math.isnan(b)) or a == b


def _window(kind: str, n: int) -> np.ndarray:
    if kind == "blackman":
        return np.blackman(n)
    if kind == "hamming":
        return np.hamming(n)
    if kind == "rectangular":
        return np.ones(n)
    raise InvalidArgument(f"unknown window kind {kind!r}, expected one of {WINDOW_KINDS}")


def design_lowpass(cutoff_hz, sample_rate_hz, num_taps=499, window_kind="blackman"):
    """Windowed-sinc low-pass, exactly symmetric and normalized to unit DC gain."""
    num_taps = int(num_taps)
    if num_taps < 3 or num_taps % 2 == 0:
        raise InvalidArgument(f"num_taps must be odd and >= 3, got {num_taps}")
    if not 0 < cutoff_hz < sample_rate_hz / 2:
        raise InvalidArgument(
            f"cutoff {cutoff_hz} Hz outside (0, {sample_rate_hz / 2}) Hz"
        )
    fc = cutoff_hz / sample_rate_hz
    n = np.arange(num_taps) - (num_taps - 1) // 2
    h = 2 * fc * np.sinc(2 * fc * n) * _window(window_kind, num_taps)
    # fold the two halves so symmetry is exact, not just up to rounding
    h = 0.5 * (h + h[::-1])
    h = h / np.sum(h)
    return FirFilter(h, float(cutoff_hz), float(sample_rate_hz), window_kind)


def oversample_filter(f: FirFilter) -> FirFilter:
    """Insert one zero between consecutive taps (dilate by 2)."""
    h = np.zeros(2 * f.num_taps - 1)
    h[::2] = f.coefficients
    return FirFilter(h, f.nominal_cutoff_hz / 2, f.design_sample_rate_hz, f.window_kind)


def group_delay(f: FirFilter) -> int:
    return (f.num_taps - 1) // 2


def magnitude_response(f: FirFilter, freqs_hz, sample_rate_hz=None) -> np.ndarray:
    """|H(f)| evaluated directly from the DTFT sum."""
    fs = f.design_sample_rate_hz if sample_rate_hz is None else sample_rate_hz
    freqs = np.atleast_1d(np.asarray(freqs_hz, dtype=float))
    k = np.arange(f.num_taps)
    phase = np.exp(-2j * np.pi * np.outer(freqs / fs, k))
    return np.abs(phase @ f.coefficients)


def write_filter_csv(path, f: FirFilter) -> None:
    lines = [f"# taps={f.num_taps} cutoff_hz={f.nominal_cutoff_hz:.9g} fs={f.design_sample_rate_hz:.9g}"]
    lines += [f"{c:.17g}" for c in f.coefficients]
    tmp = f"{path}.tmp"
    with open(tmp, "w", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")
    os.replace(tmp, path)


def read_filter_csv(path) -> FirFilter:
    cutoff = fs = math.nan
    coeffs = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                for token in line[1:].split():
                    key, _, value = token.partition("=")
                    if key == "cutoff_hz":
                        cutoff = float(value)
                    elif key == "fs":
                        fs = float(value)
                continue
            coeffs.append(float(line.split(",")[0]))
    if not coeffs:
        raise InvalidArgument(f"no coefficients in {path}")
    return FirFilter(np.array(coeffs), cutoff, fs)
