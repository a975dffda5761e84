"""Background estimation by k-NN median filtering and soft-mask separation.

For every frame, the k most similar frames are assumed to share the same
accompaniment while differing in the vocal part, so a per-bin median across
them recovers the accompaniment and rejects the (sparse) vocal outliers.
A Wiener-like soft mask then splits the mixture spectrogram into
complementary background and vocal estimates.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .audio_io import AudioBuffer, to_mono
from .hubness import (
    DistanceMatrix,
    HubnessProfile,
    KnnGraph,
    distance_matrix,
    hubness_profile,
    knn,
    select_k,
    sweep_k_values,
)
from .stft import (
    ComplexSpectrogram,
    MagnitudeSpectrogram,
    StftConfig,
    magnitude,
    stft_forward,
    stft_inverse,
)

__all__ = [
    "SeparationConfig",
    "SeparationResult",
    "neighbor_median",
    "soft_mask",
    "separate",
]


@dataclass(frozen=True)
class SeparationConfig:
    """Pipeline parameters.

    ``k=None`` selects the neighbor count per track by maximizing normalized
    hubness over the fractional sweep; an integer forces that k (0 passes the
    mixture through as background).
    """

    stft: StftConfig = StftConfig()
    k: int | None = None
    sweep_start: float = 0.001
    sweep_step: float = 0.010
    sweep_stop: float = 0.45
    mask_exponent: float = 2.0
    mask_epsilon: float = 1e-12

    def __post_init__(self):
        if self.k is not None and self.k < 0:
            raise ValueError(f"fixed k must be >= 0, got {self.k}")
        if self.mask_exponent <= 0:
            raise ValueError(f"mask_exponent must be positive, got {self.mask_exponent}")
        if self.mask_epsilon <= 0:
            raise ValueError(f"mask_epsilon must be positive, got {self.mask_epsilon}")


@dataclass(eq=False)
class SeparationResult:
    """Separated stems plus the k that produced them."""

    background: AudioBuffer
    vocals: AudioBuffer
    chosen_k: int
    profile: HubnessProfile | None = None


def neighbor_median(X: MagnitudeSpectrogram, graph: KnnGraph) -> MagnitudeSpectrogram:
    """Per-bin median across each frame's k nearest neighbor frames.

    Even neighbor counts use the midpoint of the two central values.
    """
    values = X.values
    n_bins, n_frames = values.shape
    if graph.n_frames != n_frames:
        raise ValueError(
            f"graph covers {graph.n_frames} frames but spectrogram has {n_frames}"
        )
    idx = graph.neighbors
    k = idx.shape[1]
    if k == 0:
        raise ValueError("graph has empty neighbor lists; k=0 must be special-cased")
    if k == n_frames - 1:
        # Neighbor lists are duplicate-free and never contain the frame
        # itself, so k = n-1 means "every frame but self": one sort per bin
        # replaces the per-frame partial sorts.
        return MagnitudeSpectrogram(_median_excluding_self(values), X.config)

    lo, hi = (k - 1) // 2, k // 2
    out = np.empty_like(values)
    gathered = np.empty((n_frames, k))
    # One frequency row at a time: the gather source stays cache-resident
    # and the partial sort runs over contiguous rows.
    for m in range(n_bins):
        np.take(values[m], idx, out=gathered)
        gathered.partition(hi if lo == hi else (lo, hi), axis=1)
        if lo == hi:
            out[m] = gathered[:, hi]
        else:
            out[m] = 0.5 * (gathered[:, lo] + gathered[:, hi])
    return MagnitudeSpectrogram(out, X.config)


def _median_excluding_self(values: np.ndarray) -> np.ndarray:
    """Per bin, the median over all frames except the own column.

    Removing the element at sorted rank r shifts every later order statistic
    down by one, so the two central values of the reduced row can be read
    straight off the full sorted row.
    """
    n_frames = values.shape[1]
    reduced = n_frames - 1
    lo, hi = (reduced - 1) // 2, reduced // 2
    ordered = np.sort(values, axis=1)
    ranks = np.empty(values.shape, dtype=np.int64)
    for m in range(values.shape[0]):
        ranks[m] = np.searchsorted(ordered[m], values[m])
    lo_idx = lo + (lo >= ranks)
    hi_idx = hi + (hi >= ranks)
    low = np.take_along_axis(ordered, lo_idx, axis=1)
    if lo == hi:
        return low
    high = np.take_along_axis(ordered, hi_idx, axis=1)
    return 0.5 * (low + high)


def soft_mask(
    X: MagnitudeSpectrogram,
    Y: MagnitudeSpectrogram,
    exponent: float = 2.0,
    eps: float = 1e-12,
) -> MagnitudeSpectrogram:
    """Wiener-like background mask in [0, 1].

    The background estimate is clipped to B = min(Y, X) so that the vocal
    part V = X - B is nonnegative; the mask is B^p / (B^p + V^p + eps).
    """
    if X.values.shape != Y.values.shape:
        raise ValueError(
            f"shape mismatch: X is {X.values.shape}, Y is {Y.values.shape}"
        )
    background = np.minimum(Y.values, X.values)
    vocals = X.values - background
    if exponent == 2.0:
        bg_p = background * background
        voc_p = vocals * vocals
    else:
        bg_p = background**exponent
        voc_p = vocals**exponent
    return MagnitudeSpectrogram(bg_p / (bg_p + voc_p + eps), X.config)


def _masked_estimates(
    spec: ComplexSpectrogram,
    X: MagnitudeSpectrogram,
    distances: DistanceMatrix | None,
    k: int,
    config: SeparationConfig,
    out_length: int,
) -> tuple[AudioBuffer, AudioBuffer]:
    """Background and vocal signals for one k; k=0 passes the mixture through."""
    if k == 0:
        background = stft_inverse(spec, out_length)
        silence = AudioBuffer(np.zeros(out_length), spec.sample_rate)
        return background, silence
    graph = knn(distances, k)
    estimate = neighbor_median(X, graph)
    mask = soft_mask(X, estimate, config.mask_exponent, config.mask_epsilon).values
    background_spec = ComplexSpectrogram(spec.values * mask, spec.config, spec.sample_rate)
    vocal_spec = ComplexSpectrogram(spec.values * (1.0 - mask), spec.config, spec.sample_rate)
    return stft_inverse(background_spec, out_length), stft_inverse(vocal_spec, out_length)


def separate(mix: AudioBuffer, config: SeparationConfig = SeparationConfig()) -> SeparationResult:
    """Split a mixture into background and vocal estimates.

    Multi-channel input is mixed down to mono first; outputs are mono and
    have exactly the input length.  With ``config.k=None`` the distance
    matrix is computed once and reused for both the hubness sweep and the
    final graph.
    """
    mono = to_mono(mix) if mix.channels > 1 else mix
    n_samples = mono.n_samples
    spec = stft_forward(mono, config.stft)
    n_frames = spec.n_frames
    if n_frames < 2:
        raise ValueError(
            f"mixture too short: {n_frames} STFT frame(s), need at least 2"
        )
    X = magnitude(spec)

    profile = None
    if config.k is None:
        distances = distance_matrix(X)
        ks = sweep_k_values(n_frames, config.sweep_start, config.sweep_step, config.sweep_stop)
        profile = hubness_profile(distances, ks)
        chosen_k = select_k(profile)
    else:
        chosen_k = config.k
        if chosen_k > n_frames - 1:
            raise ValueError(f"k={chosen_k} out of range [0, {n_frames - 1}]")
        distances = distance_matrix(X) if chosen_k >= 1 else None

    background, vocals = _masked_estimates(spec, X, distances, chosen_k, config, n_samples)
    return SeparationResult(background, vocals, chosen_k, profile)
