"""Scikit-learn style estimators wrapping the separation pipeline.

``KnnMedianSeparator`` treats the neighbor count k as a hyperparameter
learned from the track itself: ``fit`` runs the STFT and the hubness sweep
(or accepts a fixed k), ``transform`` separates a signal with the fitted k.
``HubnessKSelector`` exposes just the k-selection step for arbitrary frame
features or precomputed distances.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_array, check_is_fitted

from .audio_io import AudioBuffer
from .hubness import (
    DistanceMatrix,
    distance_matrix,
    hubness_profile,
    select_k,
    sweep_k_values,
)
from .separation import SeparationConfig, separate
from .stft import StftConfig

__all__ = ["HubnessKSelector", "KnnMedianSeparator"]


class HubnessKSelector(BaseEstimator):
    """Pick the neighbor count k that maximizes normalized k-NN hubness.

    Parameters
    ----------
    sweep_start, sweep_step, sweep_stop : float
        Sweep fractions of the frame count; candidate k values are
        round(f * n_frames) for f = start, start+step, ... <= stop.
    metric : {'euclidean', 'precomputed'}
        With 'euclidean', X holds one frame per row and squared Euclidean
        distances are computed; with 'precomputed', X is already a square
        matrix of squared distances (symmetric, zero diagonal).

    Attributes
    ----------
    k_ : int
        Selected neighbor count.
    profile_ : HubnessProfile
        Raw, null and normalized hubness over the sweep.
    n_frames_ : int
        Number of frames seen during fit.
    """

    def __init__(self, sweep_start=0.001, sweep_step=0.010, sweep_stop=0.45,
                 metric="euclidean"):
        self.sweep_start = sweep_start
        self.sweep_step = sweep_step
        self.sweep_stop = sweep_stop
        self.metric = metric

    def fit(self, X, y=None):
        X = check_array(X, dtype=np.float64)
        if self.metric == "precomputed":
            distances = DistanceMatrix(X)
        elif self.metric == "euclidean":
            distances = distance_matrix(X.T)  # rows are frames; core wants columns
        else:
            raise ValueError(f"metric must be 'euclidean' or 'precomputed', got {self.metric!r}")
        n_frames = distances.n_frames
        ks = sweep_k_values(n_frames, self.sweep_start, self.sweep_step, self.sweep_stop)
        self.profile_ = hubness_profile(distances, ks)
        self.k_ = select_k(self.profile_)
        self.n_frames_ = n_frames
        return self

    def fit_predict(self, X, y=None):
        """Fit and return the selected k."""
        return self.fit(X).k_


class KnnMedianSeparator(BaseEstimator):
    """Background/vocal separation by median filtering over k-NN frames.

    Parameters
    ----------
    k : 'auto' or int
        'auto' selects k per track by maximal normalized hubness; an integer
        forces that neighbor count (0 = passthrough).
    fft_size, hop_size, window :
        STFT geometry.
    sweep_start, sweep_step, sweep_stop : float
        Fractions for the automatic k sweep.
    mask_exponent, mask_epsilon : float
        Soft mask shape and regularizer.
    sample_rate : int
        Rate attached to signals passed as bare arrays.

    Attributes
    ----------
    k_ : int
        Neighbor count used for the fitted signal.
    hubness_profile_ : HubnessProfile or None
        Sweep statistics (None when k was fixed).
    background_, vocals_ : ndarray
        Separated stems of the fitted signal, 1-D.
    """

    def __init__(self, k="auto", fft_size=4096, hop_size=1024, window="hann",
                 sweep_start=0.001, sweep_step=0.010, sweep_stop=0.45,
                 mask_exponent=2.0, mask_epsilon=1e-12, sample_rate=44100):
        self.k = k
        self.fft_size = fft_size
        self.hop_size = hop_size
        self.window = window
        self.sweep_start = sweep_start
        self.sweep_step = sweep_step
        self.sweep_stop = sweep_stop
        self.mask_exponent = mask_exponent
        self.mask_epsilon = mask_epsilon
        self.sample_rate = sample_rate

    def _as_buffer(self, X) -> AudioBuffer:
        if isinstance(X, AudioBuffer):
            return X
        X = check_array(X, ensure_2d=False, dtype=np.float64)
        if X.ndim > 2:
            raise ValueError(f"expected 1-D samples or (n_samples, n_channels), got {X.shape}")
        return AudioBuffer(X, self.sample_rate)

    def _config(self, k) -> SeparationConfig:
        return SeparationConfig(
            stft=StftConfig(self.fft_size, self.hop_size, self.window),
            k=k,
            sweep_start=self.sweep_start,
            sweep_step=self.sweep_step,
            sweep_stop=self.sweep_stop,
            mask_exponent=self.mask_exponent,
            mask_epsilon=self.mask_epsilon,
        )

    def fit(self, X, y=None):
        """Run the pipeline on one track; the track's stems become attributes."""
        if self.k != "auto" and not (isinstance(self.k, (int, np.integer)) and self.k >= 0):
            raise ValueError(f"k must be 'auto' or a nonnegative integer, got {self.k!r}")
        fixed = None if self.k == "auto" else int(self.k)
        result = separate(self._as_buffer(X), self._config(fixed))
        self.k_ = result.chosen_k
        self.hubness_profile_ = result.profile
        self.background_ = result.background.samples[:, 0]
        self.vocals_ = result.vocals.samples[:, 0]
        return self

    def transform(self, X):
        """Separate ``X`` with the fitted k; returns (n_samples, 2) = [background, vocals]."""
        check_is_fitted(self, "k_")
        result = separate(self._as_buffer(X), self._config(self.k_))
        return np.column_stack(
            [result.background.samples[:, 0], result.vocals.samples[:, 0]]
        )

    def fit_transform(self, X, y=None):
        self.fit(X)
        return np.column_stack([self.background_, self.vocals_])
