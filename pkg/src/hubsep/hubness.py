"""Frame distances, k-NN graph statistics, and hubness-based selection of k.

The k-NN lists of all frames form a directed graph; the in-degree of a frame
(its k-occurrence) counts how often it is chosen as a neighbor.  The skewness
of the in-degree distribution ("hubness") peaks, after subtracting what a
uniformly random graph would produce, at neighborhood sizes that expose the
repetitive structure of the track.  That peak is used to pick k per track.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "DistanceMatrix",
    "KnnGraph",
    "HubnessProfile",
    "distance_matrix",
    "distance_matrix_call_count",
    "knn",
    "k_occurrence",
    "skewness",
    "hubness",
    "null_hubness",
    "hubness_profile",
    "select_k",
    "sweep_k_values",
]

# Incremented on every distance_matrix() call so callers can assert how many
# times the O(M N^2) kernel was evaluated.
_distance_matrix_calls = 0


def distance_matrix_call_count() -> int:
    return _distance_matrix_calls


@dataclass(eq=False)
class DistanceMatrix:
    """Symmetric matrix of squared Euclidean distances between frames."""

    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.float64)
        if values.ndim != 2 or values.shape[0] != values.shape[1]:
            raise ValueError(f"expected a square matrix, got shape {values.shape}")
        if not np.isfinite(values).all():
            raise ValueError("distances must be finite")
        if values.size and values.min() < 0:
            raise ValueError("distances must be nonnegative")
        if np.diagonal(values).any():
            raise ValueError("diagonal must be zero")
        if not np.array_equal(values, values.T):
            raise ValueError("matrix must be symmetric")
        self.values = values

    @property
    def n_frames(self) -> int:
        return self.values.shape[0]


@dataclass(eq=False)
class KnnGraph:
    """Directed k-NN graph: per-frame neighbor indices, nearest first."""

    neighbors: np.ndarray
    k: int
    n_frames: int

    def __post_init__(self):
        neighbors = np.asarray(self.neighbors, dtype=np.int64)
        expected = min(self.k, self.n_frames - 1)
        if neighbors.shape != (self.n_frames, expected):
            raise ValueError(
                f"neighbor lists have shape {neighbors.shape}, "
                f"expected ({self.n_frames}, {expected})"
            )
        if neighbors.size:
            if neighbors.min() < 0 or neighbors.max() >= self.n_frames:
                raise ValueError("neighbor indices out of range")
            own = np.arange(self.n_frames)[:, np.newaxis]
            if (neighbors == own).any():
                raise ValueError("a frame may not be its own neighbor")
            if neighbors.shape[1] > 1:
                ordered = np.sort(neighbors, axis=1)
                if (np.diff(ordered, axis=1) == 0).any():
                    raise ValueError("neighbor lists must not contain duplicates")
        self.neighbors = neighbors


@dataclass(eq=False)
class HubnessProfile:
    """Raw, null-model and normalized hubness across a sweep of k values."""

    k: np.ndarray
    h: np.ndarray
    h_null: np.ndarray
    h_norm: np.ndarray
    n_frames: int

    def __post_init__(self):
        self.k = np.asarray(self.k, dtype=np.int64)
        self.h = np.asarray(self.h, dtype=np.float64)
        self.h_null = np.asarray(self.h_null, dtype=np.float64)
        self.h_norm = np.asarray(self.h_norm, dtype=np.float64)
        if not (self.k.shape == self.h.shape == self.h_null.shape == self.h_norm.shape):
            raise ValueError("profile columns must have equal length")
        if self.k.size == 0:
            raise ValueError("profile may not be empty")
        if (np.diff(self.k) <= 0).any():
            raise ValueError("k values must be strictly increasing")
        if self.k[0] < 1 or self.k[-1] > self.n_frames - 1:
            raise ValueError("k values must lie in [1, n_frames - 1]")

    def to_csv(self, path) -> None:
        """Write ``k,h,h_null,h_norm`` rows; floats keep full precision."""
        lines = ["k,h,h_null,h_norm"]
        for k, h, h_null, h_norm in zip(self.k, self.h, self.h_null, self.h_norm):
            lines.append(f"{int(k)},{float(h)!r},{float(h_null)!r},{float(h_norm)!r}")
        with open(path, "w", encoding="ascii") as handle:
            handle.write("\n".join(lines) + "\n")

    @classmethod
    def from_csv(cls, path, n_frames: int | None = None) -> "HubnessProfile":
        with open(path, "r", encoding="ascii") as handle:
            lines = [line.strip() for line in handle if line.strip()]
        if not lines or lines[0] != "k,h,h_null,h_norm":
            raise ValueError(f"{path}: not a hubness profile CSV")
        rows = [line.split(",") for line in lines[1:]]
        k = [int(r[0]) for r in rows]
        if n_frames is None:
            n_frames = (max(k) + 1) if k else 0
        return cls(
            k=np.array(k, dtype=np.int64),
            h=np.array([float(r[1]) for r in rows]),
            h_null=np.array([float(r[2]) for r in rows]),
            h_norm=np.array([float(r[3]) for r in rows]),
            n_frames=n_frames,
        )


def distance_matrix(X) -> DistanceMatrix:
    """Squared Euclidean distances between all pairs of spectrogram columns.

    ``X`` is a MagnitudeSpectrogram or a plain (n_bins, n_frames) array.
    Computed via the Gram expansion ||a||^2 + ||b||^2 - 2 a.b, then
    symmetrized and clamped at zero to restore the exact invariants.
    """
    global _distance_matrix_calls
    values = np.asarray(getattr(X, "values", X), dtype=np.float64)
    if values.ndim != 2:
        raise ValueError(f"expected a 2-D spectrogram, got shape {values.shape}")
    if values.shape[1] < 2:
        raise ValueError("need at least 2 frames to compute pairwise distances")
    gram = values.T @ values
    norms = np.diagonal(gram).copy()
    dist = norms[:, np.newaxis] + norms[np.newaxis, :] - 2.0 * gram
    dist = 0.5 * (dist + dist.T)
    np.maximum(dist, 0.0, out=dist)
    np.fill_diagonal(dist, 0.0)
    _distance_matrix_calls += 1
    return DistanceMatrix(dist)


def _neighbor_order(distances: DistanceMatrix) -> np.ndarray:
    """All frames sorted by (distance, index) per row, self excluded.

    Shape (n, n-1).  A stable sort breaks distance ties toward the lower
    frame index; the self entry is pushed to the end by an infinite
    distance and dropped.
    """
    work = distances.values.copy()
    np.fill_diagonal(work, np.inf)
    order = np.argsort(work, axis=1, kind="stable")
    return order[:, :-1].astype(np.int64)


def knn(distances: DistanceMatrix, k: int) -> KnnGraph:
    """The k nearest frames to every frame, nearest first, self excluded."""
    n = distances.n_frames
    if not 1 <= k <= n - 1:
        raise ValueError(f"k must be in [1, {n - 1}], got {k}")
    order = _neighbor_order(distances)
    return KnnGraph(np.ascontiguousarray(order[:, :k]), k, n)


def k_occurrence(graph: KnnGraph) -> np.ndarray:
    """In-degree of every frame in the k-NN digraph."""
    return np.bincount(graph.neighbors.ravel(), minlength=graph.n_frames)


def skewness(values) -> float:
    """Population skewness m3 / m2^1.5; defined as 0 for zero variance."""
    v = np.asarray(values, dtype=np.float64)
    if v.ndim != 1 or v.size < 2:
        raise ValueError("skewness needs a 1-D vector of length >= 2")
    centered = v - v.mean()
    m2 = np.mean(centered * centered)
    if m2 == 0.0:
        return 0.0
    m3 = np.mean(centered * centered * centered)
    return float(m3 / m2**1.5)


def hubness(graph: KnnGraph) -> float:
    """Skewness of the k-occurrence distribution."""
    return skewness(k_occurrence(graph))


def null_hubness(k: int, n: int) -> float:
    """Expected hubness of a uniformly random directed k-NN graph.

    In-degrees of such a graph follow Binomial(n, k/n), whose skewness is
    (1 - 2k/n) / sqrt(k (1 - k/n)).
    """
    k = int(k)
    n = int(n)
    if not 1 <= k < n:
        raise ValueError(f"k must be in [1, n - 1] = [1, {n - 1}], got {k}")
    ratio = k / n
    return (1.0 - 2.0 * ratio) / math.sqrt(k * (1.0 - ratio))


def _normalize(h: np.ndarray, h_null: np.ndarray) -> np.ndarray:
    """Excess hubness: each curve divided by its sweep maximum, then subtracted.

    A non-positive sweep maximum would flip or blow up the ratio, so that
    term is defined as 0 in that degenerate case.
    """
    h_term = h / h.max() if h.max() > 0 else np.zeros_like(h)
    null_term = h_null / h_null.max() if h_null.max() > 0 else np.zeros_like(h_null)
    return h_term - null_term


def hubness_profile(distances: DistanceMatrix, k_values) -> HubnessProfile:
    """Raw/null/normalized hubness at every k in ``k_values``.

    Each distance row is sorted once and all k-NN graphs are read off as
    prefixes, so the whole sweep costs one sort plus one in-degree count
    per k instead of one full k-NN search per k.
    """
    n = distances.n_frames
    ks = np.asarray(list(k_values), dtype=np.int64)
    if ks.size == 0:
        raise ValueError("k_values may not be empty")
    if (np.diff(ks) <= 0).any():
        raise ValueError("k_values must be strictly increasing")
    if ks[0] < 1 or ks[-1] > n - 1:
        raise ValueError(f"k values must lie in [1, {n - 1}]")

    order = _neighbor_order(distances)
    h = np.empty(ks.size)
    for i, k in enumerate(ks):
        occurrence = np.bincount(order[:, :k].ravel(), minlength=n)
        h[i] = skewness(occurrence)
    h_null = np.array([null_hubness(int(k), n) for k in ks])
    return HubnessProfile(ks, h, h_null, _normalize(h, h_null), n)


def select_k(profile: HubnessProfile) -> int:
    """The k with maximal normalized hubness; ties go to the smaller k."""
    return int(profile.k[int(np.argmax(profile.h_norm))])


def sweep_k_values(
    n_frames: int,
    start: float = 0.001,
    step: float = 0.010,
    stop: float = 0.45,
) -> list[int]:
    """Candidate k values as fractions of the frame count.

    Rounds ``f * n_frames`` half-up for f = start, start+step, ... <= stop,
    clamps rounded values below 1 up to 1, and deduplicates.  A fraction
    that rounds past n_frames - 1 is an error.
    """
    if n_frames < 2:
        raise ValueError("need at least 2 frames")
    if not 0.0 < start <= stop < 1.0:
        raise ValueError(f"need 0 < start <= stop < 1, got start={start}, stop={stop}")
    if step <= 0.0:
        raise ValueError(f"step must be positive, got {step}")

    count = int(math.floor((stop - start) / step + 1e-9)) + 1
    ks = []
    for i in range(count):
        fraction = start + i * step
        k = int(math.floor(fraction * n_frames + 0.5))
        if k > n_frames - 1:
            raise ValueError(
                f"fraction {fraction:g} rounds to k={k}, beyond n_frames - 1 = {n_frames - 1}"
            )
        ks.append(max(k, 1))
    return sorted(set(ks))
