"""Simplified signal-to-distortion ratio and the two k-selection protocols.

The SDR here is the plain energy ratio 10*log10(sum ref^2 / sum (est-ref)^2)
with no distortion-filter projection, so absolute values are not comparable
to full BSS Eval results; reports are tagged ``sdr_variant=simple``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .audio_io import AudioBuffer, to_mono
from .hubness import hubness_profile, select_k, sweep_k_values, distance_matrix
from .separation import SeparationConfig, _masked_estimates
from .stft import magnitude, stft_forward

__all__ = [
    "SDR_VARIANT",
    "EvalRow",
    "EvalReport",
    "sdr",
    "default_fixed_k_values",
    "sweep_report",
]

SDR_VARIANT = "simple"

# Fixed-k sweep used by the traditional protocol; entries are clipped to the
# track's frame count at run time.
DEFAULT_FIXED_K = (0, 25, 50, 100, 200, 400, 800, 1600, 3200)


def sdr(reference: AudioBuffer, estimate: AudioBuffer) -> float:
    """Energy-ratio SDR in dB; +inf when the estimate matches exactly."""
    if reference.samples.shape != estimate.samples.shape:
        raise ValueError(
            f"length/channel mismatch: reference {reference.samples.shape}, "
            f"estimate {estimate.samples.shape}"
        )
    ref = reference.samples
    ref_energy = float(np.sum(ref * ref))
    if ref_energy == 0.0:
        raise ValueError("reference has zero energy")
    residual = estimate.samples - ref
    residual_energy = float(np.sum(residual * residual))
    if residual_energy == 0.0:
        return math.inf
    return 10.0 * math.log10(ref_energy / residual_energy)


def default_fixed_k_values(n_frames: int) -> list[int]:
    """The standard fixed-k sweep, clipped to [0, n_frames - 1] and deduplicated."""
    if n_frames < 2:
        raise ValueError("need at least 2 frames")
    return sorted({min(k, n_frames - 1) for k in DEFAULT_FIXED_K})


@dataclass
class EvalRow:
    """One sweep point: SDRs for both stems, plus normalized hubness if swept."""

    k: int
    sdr_vocals_db: float
    sdr_background_db: float
    h_norm: float | None = None


@dataclass
class EvalReport:
    """Fixed-sweep SDRs next to the hubness-selected k, for one track."""

    rows: list[EvalRow] = field(default_factory=list)
    chosen_k_standard: int = 0
    chosen_k_proposed: int = 0

    def render_csv(self) -> str:
        lines = ["k,sdr_vocals_db,sdr_background_db,h_norm"]
        for row in self.rows:
            h_norm = "" if row.h_norm is None else repr(float(row.h_norm))
            lines.append(
                f"{row.k},{float(row.sdr_vocals_db)!r},{float(row.sdr_background_db)!r},{h_norm}"
            )
        lines.append(f"# chosen_k_standard={self.chosen_k_standard}")
        lines.append(f"# chosen_k_proposed={self.chosen_k_proposed}")
        lines.append(f"# sdr_variant={SDR_VARIANT}")
        return "\n".join(lines) + "\n"

    def to_csv(self, path) -> None:
        with open(path, "w", encoding="ascii") as handle:
            handle.write(self.render_csv())

    @classmethod
    def parse_csv(cls, text: str) -> "EvalReport":
        rows = []
        meta = {}
        lines = [line.strip() for line in text.splitlines() if line.strip()]
        if not lines or lines[0] != "k,sdr_vocals_db,sdr_background_db,h_norm":
            raise ValueError("not an evaluation report CSV")
        for line in lines[1:]:
            if line.startswith("#"):
                key, _, value = line.lstrip("# ").partition("=")
                meta[key] = value
                continue
            k, voc, bg, h_norm = line.split(",")
            rows.append(
                EvalRow(int(k), float(voc), float(bg), float(h_norm) if h_norm else None)
            )
        if meta.get("sdr_variant", SDR_VARIANT) != SDR_VARIANT:
            raise ValueError(f"unknown sdr_variant {meta.get('sdr_variant')!r}")
        return cls(
            rows=rows,
            chosen_k_standard=int(meta["chosen_k_standard"]),
            chosen_k_proposed=int(meta["chosen_k_proposed"]),
        )

    @classmethod
    def from_csv(cls, path) -> "EvalReport":
        with open(path, "r", encoding="ascii") as handle:
            return cls.parse_csv(handle.read())


def sweep_report(
    mix: AudioBuffer,
    ref_vocals: AudioBuffer,
    ref_background: AudioBuffer,
    k_values=None,
    config: SeparationConfig = SeparationConfig(),
) -> EvalReport:
    """Separate at every k in ``k_values`` and score both stems against references.

    The distance matrix is computed once and shared by all fixed-k
    separations and the hubness sweep.  The hubness-selected k is added to
    the rows if the fixed list does not already contain it.
    """
    mono_mix = to_mono(mix) if mix.channels > 1 else mix
    refs = [to_mono(r) if r.channels > 1 else r for r in (ref_vocals, ref_background)]
    if any(r.n_samples != mono_mix.n_samples for r in refs):
        raise ValueError("mixture and references must have equal length")

    spec = stft_forward(mono_mix, config.stft)
    n_frames = spec.n_frames
    if n_frames < 2:
        raise ValueError("mixture too short for a sweep")
    X = magnitude(spec)
    distances = distance_matrix(X)

    if k_values is None:
        k_values = default_fixed_k_values(n_frames)
    ks = sorted(set(int(k) for k in k_values))
    if not ks:
        raise ValueError("k_values may not be empty")
    if ks[0] < 0 or ks[-1] > n_frames - 1:
        raise ValueError(f"k values must lie in [0, {n_frames - 1}]")

    sweep = sweep_k_values(n_frames, config.sweep_start, config.sweep_step, config.sweep_stop)
    profile = hubness_profile(distances, sweep)
    proposed = select_k(profile)
    h_norm_at = {int(k): float(h) for k, h in zip(profile.k, profile.h_norm)}

    rows = []
    for k in sorted(set(ks) | {proposed}):
        background, vocals = _masked_estimates(
            spec, X, distances, k, config, mono_mix.n_samples
        )
        rows.append(
            EvalRow(
                k=k,
                sdr_vocals_db=sdr(refs[0], vocals),
                sdr_background_db=sdr(refs[1], background),
                h_norm=h_norm_at.get(k),
            )
        )
    standard = rows[int(np.argmax([row.sdr_vocals_db for row in rows]))].k
    return EvalReport(rows=rows, chosen_k_standard=standard, chosen_k_proposed=proposed)
