"""Vocal/accompaniment separation by k-NN median filtering.

The accompaniment at each spectrogram frame is estimated as the per-bin
median over the frame's k nearest neighbors, and k itself is chosen per
track, without ground truth, by maximizing the normalized hubness of the
k-NN frame graph.
"""

from .audio_io import (
    AudioBuffer,
    UnsupportedEncodingError,
    WavError,
    WavFormatError,
    load_wav,
    save_wav,
    to_mono,
)
from .estimators import HubnessKSelector, KnnMedianSeparator
from .evaluation import (
    EvalReport,
    EvalRow,
    SDR_VARIANT,
    default_fixed_k_values,
    sdr,
    sweep_report,
)
from .hubness import (
    DistanceMatrix,
    HubnessProfile,
    KnnGraph,
    distance_matrix,
    distance_matrix_call_count,
    hubness,
    hubness_profile,
    k_occurrence,
    knn,
    null_hubness,
    select_k,
    skewness,
    sweep_k_values,
)
from .separation import (
    SeparationConfig,
    SeparationResult,
    neighbor_median,
    separate,
    soft_mask,
)
from .stft import (
    ComplexSpectrogram,
    MagnitudeSpectrogram,
    StftConfig,
    magnitude,
    stft_forward,
    stft_inverse,
)

__version__ = "0.1.0"

__all__ = [
    "AudioBuffer",
    "ComplexSpectrogram",
    "DistanceMatrix",
    "EvalReport",
    "EvalRow",
    "HubnessKSelector",
    "HubnessProfile",
    "KnnGraph",
    "KnnMedianSeparator",
    "MagnitudeSpectrogram",
    "SDR_VARIANT",
    "SeparationConfig",
    "SeparationResult",
    "StftConfig",
    "UnsupportedEncodingError",
    "WavError",
    "WavFormatError",
    "default_fixed_k_values",
    "distance_matrix",
    "distance_matrix_call_count",
    "hubness",
    "hubness_profile",
    "k_occurrence",
    "knn",
    "load_wav",
    "magnitude",
    "neighbor_median",
    "null_hubness",
    "save_wav",
    "sdr",
    "select_k",
    "separate",
    "skewness",
    "soft_mask",
    "stft_forward",
    "stft_inverse",
    "sweep_k_values",
    "sweep_report",
    "to_mono",
    "__version__",
]
