"""
Energy balance between subbands: global ISD and its time-evolving variants.

The ISD weight of a band is its energy (sum of squared samples) as a percent
of the total energy over all bands. Time-evolving variants (TISD) use the
same ratio with per-sample, sliding-window or running energies. Columns whose
normalizer is zero are kept in place and hold ``GAP`` (NaN internally, an
empty cell in CSV output).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .atrous import SubbandSet, merge_channels, synthesize
from .errors import InvalidArgument, SilentInput

GAP = math.nan

TISD_VARIANTS = ("instant", "windowed", "cumulative", "gradient")
TISD_WINDOW_KINDS = ("rectangular", "hann", "hamming", "blackman")
CHANNEL_MODES = ("mono", "stereo_independent", "stereo_joint")


@dataclass(frozen=True)
class IsdReport:
    weights_percent: np.ndarray
    band_labels: tuple
    total_energy: float
    channel_mode: str = "mono"
    level_dbfs: float = -math.inf
    channel: str = ""


@dataclass(frozen=True)
class TisdSeries:
    variant: str
    times_s: np.ndarray
    values: np.ndarray  # shape (bands, times)
    band_labels: tuple
    window_len: int | None = None
    hop: int | None = None
    window_kind: str | None = None
    source_variant: str | None = None


def _peak(subbands: SubbandSet) -> float:
    return max((float(np.max(np.abs(b), initial=0.0)) for b in subbands.bands), default=0.0)


def _mono_power(subbands: SubbandSet) -> np.ndarray:
    """Squared samples of peak-scaled bands; ratios are unaffected, underflow is avoided."""
    if subbands.channels != 1:
        raise InvalidArgument(
            "ISD works per channel; split stereo sets with .channel(i) or use stereo_isd"
        )
    x = subbands.padded()[:, 0, :]
    peak = _peak(subbands)
    return (x / peak) ** 2 if peak > 0 else x * x


def band_energies(subbands: SubbandSet, scaled=False) -> np.ndarray:
    """Per-band sum of squares, shape (bands,) for mono or (bands, channels).

    With ``scaled=True`` bands are divided by the common peak before squaring.
    """
    peak = _peak(subbands) if scaled else 0.0
    k = 1.0 / peak if peak > 0 else 1.0
    e = np.array([np.sum((k * b) ** 2, axis=-1) for b in subbands.bands])
    return e[:, 0] if subbands.channels == 1 else e


def rms_dbfs(subbands: SubbandSet) -> float:
    x = synthesize(subbands).samples
    if x.size == 0:
        return -math.inf
    rms = math.sqrt(float(np.mean(x * x)))
    return 20 * math.log10(rms) if rms > 0 else -math.inf


def _weights(subbands):
    energies = band_energies(subbands, scaled=True)
    total = float(np.sum(energies))
    if total == 0:
        raise SilentInput("all subbands are silent; energy balance is undefined")
    peak = _peak(subbands)
    return 100.0 * (energies / total), total * peak * peak


def isd(subbands: SubbandSet) -> IsdReport:
    if subbands.channels != 1:
        raise InvalidArgument("isd expects a mono subband set; use stereo_isd for stereo")
    weights, total = _weights(subbands)
    return IsdReport(weights, subbands.band_labels, total, "mono", rms_dbfs(subbands))


def stereo_isd(left: SubbandSet, right: SubbandSet, mode="stereo_independent"):
    """Two per-channel reports, or one jointly normalized report of 2B bands."""
    if left.band_labels != right.band_labels or left.sample_rate_hz != right.sample_rate_hz:
        raise InvalidArgument("left and right were decomposed with different plans")
    if mode in ("independent", "stereo_independent"):
        reports = []
        for name, sb in (("L", left), ("R", right)):
            w, total = _weights(sb)
            reports.append(
                IsdReport(w, sb.band_labels, total, "stereo_independent", rms_dbfs(sb), name)
            )
        return tuple(reports)
    if mode in ("joint", "stereo_joint"):
        both = merge_channels(left, right)
        w, total = _weights(both)
        level = rms_dbfs(_restack(left, right))
        return IsdReport(w, both.band_labels, total, "stereo_joint", level)
    raise InvalidArgument(f"unknown stereo mode {mode!r}")


def _restack(left, right):
    return SubbandSet(
        [np.vstack([l, r]) for l, r in zip(left.bands, right.bands)],
        left.band_labels,
        left.stage_delays,
        left.original_length,
        left.sample_rate_hz,
    )


def _normalize_columns(energy):
    total = energy.sum(axis=0)
    out = np.full(energy.shape, GAP)
    ok = total > 0
    out[:, ok] = 100.0 * (energy[:, ok] / total[ok])
    return out


def tisd_instant(subbands: SubbandSet) -> TisdSeries:
    p = _mono_power(subbands)
    times = np.arange(p.shape[1]) / subbands.sample_rate_hz
    return TisdSeries("instant", times, _normalize_columns(p), subbands.band_labels)


def _tisd_window(kind, n):
    if kind == "rectangular":
        return np.ones(n)
    if kind == "hann":
        return np.hanning(n)
    if kind == "hamming":
        return np.hamming(n)
    if kind == "blackman":
        return np.blackman(n)
    raise InvalidArgument(f"unknown window kind {kind!r}, expected one of {TISD_WINDOW_KINDS}")


def tisd_windowed(subbands: SubbandSet, window_len=2048, hop=1, window_kind="rectangular"):
    """Sliding-window energy balance; frame times are window centers."""
    p = _mono_power(subbands)
    n = p.shape[1]
    window_len, hop = int(window_len), int(hop)
    if window_len < 1 or hop < 1:
        raise InvalidArgument("window_len and hop must be >= 1")
    if window_len > n:
        raise InvalidArgument(f"window of {window_len} samples exceeds signal length {n}")
    w = _tisd_window(window_kind, window_len)
    starts = np.arange(0, n - window_len + 1, hop)
    if window_kind == "rectangular":
        # running sums: frames over all-zero stretches come out exactly 0
        c = np.zeros((p.shape[0], n + 1))
        np.cumsum(p, axis=1, out=c[:, 1:])
        energy = c[:, starts + window_len] - c[:, starts]
        np.maximum(energy, 0.0, out=energy)
    else:
        energy = np.stack([np.convolve(row, w[::-1], mode="valid")[::hop] for row in p])
    times = (starts + (window_len - 1) / 2) / subbands.sample_rate_hz
    return TisdSeries(
        "windowed",
        times,
        _normalize_columns(energy),
        subbands.band_labels,
        window_len,
        hop,
        window_kind,
    )


def tisd_cumulative(subbands: SubbandSet) -> TisdSeries:
    p = _mono_power(subbands)
    times = np.arange(p.shape[1]) / subbands.sample_rate_hz
    values = _normalize_columns(np.cumsum(p, axis=1))
    return TisdSeries("cumulative", times, values, subbands.band_labels)


def tisd_gradient(series: TisdSeries) -> TisdSeries:
    """First difference along time, H[z] = 1 - z^-1, with input[-1] = 0.

    Gaps in the source count as 0% so the output is defined everywhere and
    its running sum gives back the source with gaps zero-filled.
    """
    if series.variant == "gradient":
        raise InvalidArgument("gradient of a gradient series is not defined")
    v = np.nan_to_num(series.values, nan=0.0)
    out = np.diff(v, axis=1, prepend=0.0)
    return TisdSeries(
        "gradient",
        series.times_s,
        out,
        series.band_labels,
        series.window_len,
        series.hop,
        series.window_kind,
        series.variant,
    )


def tisd(subbands: SubbandSet, variant, window_len=2048, hop=1, window_kind="rectangular",
         gradient_source="cumulative") -> TisdSeries:
    if variant == "instant":
        return tisd_instant(subbands)
    if variant == "windowed":
        return tisd_windowed(subbands, window_len, hop, window_kind)
    if variant == "cumulative":
        return tisd_cumulative(subbands)
    if variant == "gradient":
        if gradient_source == "gradient":
            raise InvalidArgument("gradient of a gradient series is not defined")
        src = tisd(subbands, gradient_source, window_len, hop, window_kind)
        return tisd_gradient(src)
    raise InvalidArgument(f"unknown TISD variant {variant!r}, expected one of {TISD_VARIANTS}")
