"""
Command-line front end.

    atrousband decompose in.wav --mapping leipp --out bands/
    atrousband remix in.wav --mute low-bass --out mix/
    atrousband isd in.wav --stereo-mode joint
    atrousband tisd in.wav --tisd-variant windowed --window 2048 --hop 1
    atrousband compare-aliasing --out alias/

Exit codes: 0 ok, 1 I/O error, 2 usage, 3 unsupported/corrupt file,
4 unsupported sample rate, 5 silent input.
"""
from __future__ import annotations

import argparse
import logging
import math
import os
import sys

import numpy as np

from . import report
from .atrous import Signal, decompose, filter_band, merge_channels, synthesize
from .errors import (
    CorruptFile,
    InvalidArgument,
    SilentInput,
    UnsupportedFormat,
    UnsupportedSampleRate,
)
from .filters import WINDOW_KINDS, read_filter_csv
from .isd import TISD_VARIANTS, TISD_WINDOW_KINDS, band_energies, isd, stereo_isd, tisd
from .mallat import aliasing_metric, mallat_resynth_with_zeroed_band
from .mappings import LEIPP_DEFAULT_WINDOW, MAPPING_KINDS, dyadic_plan, make_plan
from .wavio import BIT_DEPTHS, read_wav, write_wav

log = logging.getLogger("atrousband")

EXIT_OK, EXIT_IO, EXIT_USAGE, EXIT_FORMAT, EXIT_RATE, EXIT_SILENT = 0, 1, 2, 3, 4, 5


def _add_mapping_args(p):
    p.add_argument("input", help="input WAV file (16/24-bit PCM or 32-bit float, mono or stereo)")
    p.add_argument("--mapping", choices=MAPPING_KINDS, default="leipp",
                   help="frequency mapping (default: leipp)")
    p.add_argument("--stages", type=int, default=None,
                   help="dyadic: number of stages (default 8); audio: sub-octaves below 8 kHz (default 7)")
    p.add_argument("--taps", type=int, default=499, help="filter length, odd (default: 499)")
    p.add_argument("--filter-window", choices=WINDOW_KINDS, default=None,
                   help=f"filter design window (default: {LEIPP_DEFAULT_WINDOW} for leipp, blackman otherwise)")
    p.add_argument("--split-12k", action="store_true",
                   help="audio mapping: split 8-16 kHz at 12 kHz")
    p.add_argument("--out", default=".", help="output directory (default: current directory)")


def _add_stereo_arg(p):
    p.add_argument("--stereo-mode", choices=("independent", "joint"), default="independent",
                   help="stereo normalization: one ISD per channel or one joint ISD (default: independent)")


def build_parser():
    parser = argparse.ArgumentParser(prog="atrousband", description=__doc__.split("\n\n")[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("decompose", help="write one WAV per subband plus bands.csv")
    _add_mapping_args(p)
    p.add_argument("--bit-depth", choices=BIT_DEPTHS, default="float32",
                   help="subband file format (default: float32, never clips)")

    p = sub.add_parser("remix", help="resynthesize a gain-weighted selection of subbands")
    _add_mapping_args(p)
    p.add_argument("--gains", default=None,
                   help="comma-separated gain per band, lowest band first")
    p.add_argument("--mute", action="append", default=[], metavar="BAND",
                   help="mute a band by name (repeatable)")
    p.add_argument("--band-fir", action="append", default=[], metavar="BAND=CSV",
                   help="filter one band with FIR coefficients from a CSV dump (repeatable)")
    p.add_argument("--bit-depth", choices=BIT_DEPTHS, default="float32")

    p = sub.add_parser("isd", help="global energy balance per band (CSV + SVG bar chart)")
    _add_mapping_args(p)
    _add_stereo_arg(p)

    p = sub.add_parser("tisd", help="time-evolving energy balance (CSV + SVG)")
    _add_mapping_args(p)
    _add_stereo_arg(p)
    p.add_argument("--tisd-variant", choices=TISD_VARIANTS + ("all",), default="all",
                   help="which representation to emit (default: all four)")
    p.add_argument("--window", type=int, default=2048, help="sliding window length in samples (default: 2048)")
    p.add_argument("--hop", type=int, default=1, help="sliding window step in samples (default: 1)")
    p.add_argument("--window-kind", choices=TISD_WINDOW_KINDS, default="rectangular",
                   help="sliding window shape (default: rectangular)")
    p.add_argument("--gradient-source", choices=("cumulative", "windowed", "instant"),
                   default="cumulative", help="series differenced by the gradient variant (default: cumulative)")

    p = sub.add_parser("compare-aliasing",
                       help="decimated dyadic transform vs a trous on a tone just below a band edge")
    p.add_argument("--sample-rate", type=float, default=48000.0)
    p.add_argument("--duration", type=float, default=1.0, help="tone duration in seconds")
    p.add_argument("--stages", type=int, default=1)
    p.add_argument("--taps", type=int, default=499)
    p.add_argument("--out", default=".")
    return parser


def _stem(path):
    return os.path.splitext(os.path.basename(path))[0]


def _plan_for(args, sample_rate):
    return make_plan(args.mapping, sample_rate, args.stages, args.taps,
                     args.filter_window, args.split_12k)


def _check_common(args):
    if args.taps < 3 or args.taps % 2 == 0:
        raise InvalidArgument(f"--taps must be odd and >= 3, got {args.taps}")
    if args.stages is not None and args.stages < 1:
        raise InvalidArgument("--stages must be >= 1")


def _parse_gains(text, n):
    try:
        gains = [float(g) for g in text.split(",")]
    except ValueError:
        raise InvalidArgument(f"cannot parse --gains {text!r}") from None
    if len(gains) != n:
        raise InvalidArgument(f"--gains has {len(gains)} values, the mapping has {n} bands")
    if not all(math.isfinite(g) for g in gains):
        raise InvalidArgument("--gains must be finite")
    return np.array(gains)


def _write_wav(path, signal, bit_depth):
    meta = write_wav(path, signal, bit_depth)
    if meta.clipped_samples:
        log.warning("%s: %d samples clipped at full scale", path, meta.clipped_samples)
    elif bit_depth == "float32" and np.max(np.abs(signal.samples), initial=0) > 1:
        log.warning("%s: peak above full scale; integer conversion would clip", path)
    return meta


def cmd_decompose(args):
    _check_common(args)
    signal, _ = read_wav(args.input)
    plan = _plan_for(args, signal.sample_rate_hz)
    sb = decompose(signal, plan)
    os.makedirs(args.out, exist_ok=True)
    stem = _stem(args.input)
    files = []
    n = sb.original_length
    for k, (band, label) in enumerate(zip(sb.bands, sb.band_labels)):
        name = f"{stem}_band{k}_{report.fmt(label.f_low_hz)}-{report.fmt(label.f_high_hz)}Hz.wav"
        out = np.zeros((sb.channels, n))
        m = min(n, band.shape[1])
        out[:, :m] = band[:, :m]
        _write_wav(os.path.join(args.out, name), Signal(out, sb.sample_rate_hz), args.bit_depth)
        files.append(name)
    energies = band_energies(sb)
    if energies.ndim == 2:
        energies = energies.sum(axis=1)
    window = plan.stages[0].filter.window_kind
    header = (f"mapping={plan.mapping_kind} taps={args.taps} window={window} "
              f"fs={report.fmt(sb.sample_rate_hz)} stages={plan.num_stages}")
    report.atomic_write(os.path.join(args.out, "bands.csv"),
                        report.bands_manifest_csv(sb.band_labels, files, energies, header))
    print(f"{len(files)} subbands written to {args.out}")
    return EXIT_OK


def cmd_remix(args):
    _check_common(args)
    band_firs = []
    for spec in args.band_fir:
        band, sep, path = spec.partition("=")
        if not sep:
            raise InvalidArgument(f"--band-fir expects BAND=CSV, got {spec!r}")
        band_firs.append((band, read_filter_csv(path)))
    signal, _ = read_wav(args.input)
    plan = _plan_for(args, signal.sample_rate_hz)
    labels = plan.band_labels
    gains = np.ones(len(labels)) if args.gains is None else _parse_gains(args.gains, len(labels))
    for name in args.mute:
        gains[plan.band_index(name)] = 0.0
    fir_targets = [(plan.band_index(b), f) for b, f in band_firs]

    sb = decompose(signal, plan)
    for index, f in fir_targets:
        sb = filter_band(sb, index, f)
    out = synthesize(sb, gains)
    os.makedirs(args.out, exist_ok=True)
    path = os.path.join(args.out, f"{_stem(args.input)}_remix.wav")
    _write_wav(path, out, args.bit_depth)
    if np.all(gains == 1) and not fir_targets:
        ref = np.sum(signal.samples ** 2)
        err = math.sqrt(np.sum((out.samples - signal.samples) ** 2) / ref) if ref else 0.0
        print(f"reconstruction relative RMS error: {err:.3e}")
    print(f"output mean per channel: {', '.join(report.fmt(m) for m in out.samples.mean(axis=1))}")
    print(f"wrote {path}")
    return EXIT_OK


def _per_channel(sb, stereo_mode):
    """Yield (suffix, subband set) pairs to analyze."""
    if sb.channels == 1:
        return [("", sb)]
    left, right = sb.channel(0), sb.channel(1)
    if stereo_mode == "joint":
        return [("", merge_channels(left, right))]
    return [("_L", left), ("_R", right)]


def cmd_isd(args):
    _check_common(args)
    signal, _ = read_wav(args.input)
    plan = _plan_for(args, signal.sample_rate_hz)
    sb = decompose(signal, plan)
    if sb.channels == 1:
        reports = [("", isd(sb))]
    else:
        res = stereo_isd(sb.channel(0), sb.channel(1), args.stereo_mode)
        reports = list(zip(("_L", "_R"), res)) if isinstance(res, tuple) else [("", res)]
    os.makedirs(args.out, exist_ok=True)
    stem = _stem(args.input)
    for suffix, rep in reports:
        title = f"ISD {stem}{suffix.replace('_', ' ')} ({plan.mapping_kind})"
        report.atomic_write(os.path.join(args.out, f"isd{suffix}.csv"), report.isd_csv(rep))
        report.atomic_write(os.path.join(args.out, f"isd{suffix}.svg"), report.isd_bar_svg(rep, title))
        print(f"ISD{suffix} level {rep.level_dbfs:.2f} dBFS RMS")
        for label, w in zip(rep.band_labels, rep.weights_percent):
            print(f"  {label.name:>16s} {label.f_low_hz:>8g}-{label.f_high_hz:<8g} Hz {w:7.3f} %")
    return EXIT_OK


def cmd_tisd(args):
    _check_common(args)
    if args.window < 1 or args.hop < 1:
        raise InvalidArgument("--window and --hop must be >= 1")
    variants = TISD_VARIANTS if args.tisd_variant == "all" else (args.tisd_variant,)
    signal, _ = read_wav(args.input)
    plan = _plan_for(args, signal.sample_rate_hz)
    sb = decompose(signal, plan)
    if args.window > sb.max_length and ("windowed" in variants or args.gradient_source == "windowed"):
        raise InvalidArgument(f"--window {args.window} exceeds subband length {sb.max_length}")
    if not np.any([np.any(b) for b in sb.bands]):
        raise SilentInput("input is silent; energy balance is undefined")
    stem = _stem(args.input)
    outputs = []
    for suffix, part in _per_channel(sb, args.stereo_mode):
        for variant in variants:
            series = tisd(part, variant, args.window, args.hop, args.window_kind, args.gradient_source)
            title = f"TISD {variant} {stem}{suffix.replace('_', ' ')} ({plan.mapping_kind})"
            outputs.append((f"tisd_{variant}{suffix}", report.tisd_csv(series),
                            report.tisd_svg(series, title)))
    os.makedirs(args.out, exist_ok=True)
    for base, csv_text, svg_text in outputs:
        report.atomic_write(os.path.join(args.out, base + ".csv"), csv_text)
        report.atomic_write(os.path.join(args.out, base + ".svg"), svg_text)
        print(f"wrote {base}.csv / {base}.svg")
    return EXIT_OK


def aliasing_experiment(sample_rate=48000.0, duration=1.0, num_stages=1, taps=499):
    """Tone 5% below the top dyadic edge; drop the band above it in both transforms.

    Returns (tone_hz, tone, mallat_output, atrous_output, mallat_db, atrous_db).
    """
    edge = sample_rate / 4
    tone_hz = 0.95 * edge
    n = int(round(duration * sample_rate))
    tone = Signal(0.5 * np.sin(2 * np.pi * tone_hz * np.arange(n) / sample_rate), sample_rate)
    mallat_out = mallat_resynth_with_zeroed_band(tone, None, num_stages, band_index=num_stages)
    plan = dyadic_plan(sample_rate, num_stages, taps)
    gains = np.ones(plan.num_bands)
    gains[-1] = 0.0
    atrous_out = synthesize(decompose(tone, plan), gains)
    return (tone_hz, tone, mallat_out, atrous_out,
            aliasing_metric(tone, mallat_out, tone_hz),
            aliasing_metric(tone, atrous_out, tone_hz))


def cmd_compare_aliasing(args):
    if args.stages < 1:
        raise InvalidArgument("--stages must be >= 1")
    if args.taps < 3 or args.taps % 2 == 0:
        raise InvalidArgument(f"--taps must be odd and >= 3, got {args.taps}")
    if not args.duration > 0 or not args.sample_rate > 0:
        raise InvalidArgument("--duration and --sample-rate must be positive")
    tone_hz, _, m_out, a_out, m_db, a_db = aliasing_experiment(
        args.sample_rate, args.duration, args.stages, args.taps)
    os.makedirs(args.out, exist_ok=True)
    report.atomic_write(os.path.join(args.out, "aliasing.csv"),
                        report.aliasing_csv([("mallat", tone_hz, m_db), ("atrous", tone_hz, a_db)]))
    write_wav(os.path.join(args.out, "mallat_zeroed.wav"), m_out, "float32")
    write_wav(os.path.join(args.out, "atrous_muted.wav"), a_out, "float32")
    print(f"tone {tone_hz:g} Hz: mallat {m_db:.2f} dB, a trous {a_db:.2f} dB")
    return EXIT_OK


COMMANDS = {
    "decompose": cmd_decompose,
    "remix": cmd_remix,
    "isd": cmd_isd,
    "tisd": cmd_tisd,
    "compare-aliasing": cmd_compare_aliasing,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except UnsupportedSampleRate as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_RATE
    except SilentInput as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_SILENT
    except (UnsupportedFormat, CorruptFile) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_FORMAT
    except InvalidArgument as e:
        print(f"usage error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
