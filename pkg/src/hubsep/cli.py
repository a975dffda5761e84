"""Command-line interface.

Subcommands
-----------
separate : split a mixture WAV into background.wav and vocals.wav
hubness  : write the hubness-vs-k profile as hubness.csv
sweep    : fixed-k SDR sweep against reference stems, written as report.csv
eval     : alias of sweep

Exit codes: 0 success, 1 usage error, 2 runtime error.  Output files are
written to a temporary name and renamed, so failed runs leave no partial
artifacts.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

import numpy as np

from .audio_io import WavError, load_wav, save_wav, to_mono
from .evaluation import sweep_report
from .hubness import distance_matrix, hubness_profile, sweep_k_values
from .separation import SeparationConfig, separate
from .stft import StftConfig, magnitude, stft_forward

__all__ = ["main"]


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with status 2 on bad flags; 2 is reserved for runtime
    # errors here, so surface usage problems as exceptions instead.
    def error(self, message):
        raise _UsageError(message)


def _positive_int(text: str) -> int:
    value = int(text)
    if value <= 0:
        raise argparse.ArgumentTypeError(f"must be positive, got {value}")
    return value


def _nonnegative_int(text: str) -> int:
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError(f"must be >= 0, got {value}")
    return value


def _sweep_triple(text: str) -> tuple[float, float, float]:
    parts = text.split(":")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError(
            f"expected start:step:stop fractions, got {text!r}"
        )
    try:
        start, step, stop = (float(p) for p in parts)
    except ValueError as err:
        raise argparse.ArgumentTypeError(str(err)) from None
    if not 0.0 < start <= stop < 1.0 or step <= 0.0:
        raise argparse.ArgumentTypeError(
            f"need 0 < start <= stop < 1 and step > 0, got {text!r}"
        )
    return start, step, stop


def _k_list(text: str) -> list[int]:
    try:
        values = [int(p) for p in text.split(",") if p.strip() != ""]
    except ValueError as err:
        raise argparse.ArgumentTypeError(str(err)) from None
    if not values or any(v < 0 for v in values):
        raise argparse.ArgumentTypeError(f"expected nonnegative integers, got {text!r}")
    return values


def _add_stft_flags(parser) -> None:
    parser.add_argument("--fft-size", type=_positive_int, default=4096,
                        help="FFT size in samples (default 4096)")
    parser.add_argument("--hop-size", type=_positive_int, default=1024,
                        help="hop size in samples (default 1024)")


def _add_sweep_flag(parser) -> None:
    parser.add_argument("--sweep", type=_sweep_triple, default=(0.001, 0.010, 0.45),
                        metavar="START:STEP:STOP",
                        help="k sweep as fractions of the frame count "
                             "(default 0.001:0.010:0.45)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="hubsep",
                     description="k-NN median-filter vocal separation with "
                                 "hubness-based k selection")
    sub = parser.add_subparsers(dest="command", required=True)

    p_sep = sub.add_parser("separate", help="separate a mixture into stems")
    p_sep.add_argument("mix", help="input mixture WAV")
    p_sep.add_argument("-o", "--output-dir", default=".", help="output directory")
    group = p_sep.add_mutually_exclusive_group()
    group.add_argument("--k", type=_nonnegative_int, default=None,
                       help="fixed neighbor count (0 = passthrough)")
    group.add_argument("--auto-k", action="store_true",
                       help="select k by maximal normalized hubness (default)")
    _add_stft_flags(p_sep)
    _add_sweep_flag(p_sep)
    p_sep.add_argument("--mask-exponent", type=float, default=2.0)
    p_sep.add_argument("--encoding", choices=["pcm16", "float32"], default="float32",
                       help="output WAV encoding (default float32)")
    p_sep.set_defaults(handler=_cmd_separate)

    p_hub = sub.add_parser("hubness", help="write the hubness-vs-k profile")
    p_hub.add_argument("mix", help="input mixture WAV")
    p_hub.add_argument("-o", "--output-dir", default=".", help="output directory")
    _add_stft_flags(p_hub)
    _add_sweep_flag(p_hub)
    p_hub.add_argument("--spectrogram-csv", default=None, metavar="PATH",
                       help="also dump the magnitude spectrogram as CSV")
    p_hub.set_defaults(handler=_cmd_hubness)

    for name in ("sweep", "eval"):
        p_ev = sub.add_parser(name, help="fixed-k SDR sweep against reference stems")
        p_ev.add_argument("mix", help="input mixture WAV")
        p_ev.add_argument("--vocals", required=True, help="vocal reference WAV")
        p_ev.add_argument("--background", required=True, help="background reference WAV")
        p_ev.add_argument("-o", "--output-dir", default=".", help="output directory")
        p_ev.add_argument("--k-list", type=_k_list, default=None,
                          help="comma-separated fixed k values "
                               "(default 0,25,50,100,200,400,800,1600,3200 "
                               "clipped to the frame count)")
        _add_stft_flags(p_ev)
        _add_sweep_flag(p_ev)
        p_ev.add_argument("--mask-exponent", type=float, default=2.0)
        p_ev.set_defaults(handler=_cmd_eval)

    return parser


def _commit(outputs) -> None:
    """Write every (path, writer) to a temp name, then rename all."""
    staged = []
    try:
        for final, write in outputs:
            final = Path(final)
            tmp = final.with_name(f".{final.name}.{os.getpid()}.tmp")
            write(tmp)
            staged.append((tmp, final))
        for tmp, final in staged:
            os.replace(tmp, final)
    finally:
        for tmp, _ in staged:
            tmp.unlink(missing_ok=True)


def _separation_config(args, k) -> SeparationConfig:
    start, step, stop = args.sweep
    return SeparationConfig(
        stft=StftConfig(args.fft_size, args.hop_size),
        k=k,
        sweep_start=start,
        sweep_step=step,
        sweep_stop=stop,
        mask_exponent=args.mask_exponent,
    )


def _cmd_separate(args) -> None:
    mix = load_wav(args.mix)
    result = separate(mix, _separation_config(args, args.k))
    outdir = Path(args.output_dir)
    outdir.mkdir(parents=True, exist_ok=True)
    outputs = [
        (outdir / "background.wav",
         lambda p: save_wav(p, result.background, args.encoding)),
        (outdir / "vocals.wav",
         lambda p: save_wav(p, result.vocals, args.encoding)),
        (outdir / "chosen_k.txt",
         lambda p: Path(p).write_text(f"{result.chosen_k}\n", encoding="ascii")),
    ]
    if result.profile is not None:
        outputs.append((outdir / "hubness.csv", result.profile.to_csv))
    _commit(outputs)


def _cmd_hubness(args) -> None:
    mix = load_wav(args.mix)
    mono = to_mono(mix) if mix.channels > 1 else mix
    spec = stft_forward(mono, StftConfig(args.fft_size, args.hop_size))
    X = magnitude(spec)
    distances = distance_matrix(X)
    start, step, stop = args.sweep
    profile = hubness_profile(distances, sweep_k_values(spec.n_frames, start, step, stop))
    outdir = Path(args.output_dir)
    outdir.mkdir(parents=True, exist_ok=True)
    outputs = [(outdir / "hubness.csv", profile.to_csv)]
    if args.spectrogram_csv is not None:
        outputs.append(
            (Path(args.spectrogram_csv),
             lambda p: np.savetxt(p, X.values, delimiter=",", fmt="%.12g"))
        )
    _commit(outputs)


def _cmd_eval(args) -> None:
    mix = load_wav(args.mix)
    ref_vocals = load_wav(args.vocals)
    ref_background = load_wav(args.background)
    report = sweep_report(mix, ref_vocals, ref_background, args.k_list,
                          _separation_config(args, None))
    outdir = Path(args.output_dir)
    outdir.mkdir(parents=True, exist_ok=True)
    _commit([(outdir / "report.csv", report.to_csv)])


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as err:
        print(f"hubsep: usage error: {err}", file=sys.stderr)
        return 1
    try:
        args.handler(args)
    except (WavError, OSError, ValueError) as err:
        print(f"hubsep: error: {err}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
