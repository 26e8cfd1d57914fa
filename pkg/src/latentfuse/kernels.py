"""Pairwise distances, self-tuning Gaussian affinities, column-stochastic
normalization."""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import _kernels
from .errors import DegenerateGraphError, DegenerateScaleError, InvalidInputError, ParameterError

DEFAULT_K = 16


@dataclass
class SampleSet:
    """N simultaneous observations from one sensor, one row per sample.

    ``hidden_truth`` carries the latent realizations for synthetic data and
    is never read by the pipeline.
    """

    data: np.ndarray
    sensor_id: int = 1
    hidden_truth: Optional[np.ndarray] = None

    def __post_init__(self):
        data = np.asarray(self.data, dtype=np.float64)
        if data.ndim == 1:
            data = data[:, None]
        if data.ndim != 2:
            raise InvalidInputError(f"sample data must be 2-D, got shape {data.shape}")
        # a single sample is a valid set (a one-segment lag map); graphs need two
        if data.shape[0] < 1 or data.shape[1] < 1:
            raise InvalidInputError(f"need at least 1 sample of dimension >= 1, got {data.shape}")
        if not np.all(np.isfinite(data)):
            raise InvalidInputError("sample data contains non-finite entries")
        self.data = data
        if self.hidden_truth is not None:
            truth = np.asarray(self.hidden_truth, dtype=np.float64)
            if truth.ndim == 1:
                truth = truth[:, None]
            if truth.shape[0] != data.shape[0]:
                raise InvalidInputError(
                    f"hidden_truth has {truth.shape[0]} rows, data has {data.shape[0]}"
                )
            self.hidden_truth = truth

    @property
    def n(self):
        return self.data.shape[0]

    @property
    def dim(self):
        return self.data.shape[1]


@dataclass
class StochasticMatrix:
    """Column-stochastic transition matrix.

    ``degree`` holds the column sums of the symmetric affinity it came from;
    it is None for products such as the alternating-diffusion kernel, which
    then need the general (non-symmetric) eigensolver.
    """

    k: np.ndarray
    degree: Optional[np.ndarray] = None

    def __post_init__(self):
        self.k = _as_square(self.k, "stochastic matrix")

    @property
    def n(self):
        return self.k.shape[0]


def _as_data(s):
    if isinstance(s, SampleSet):
        return s.data
    data = np.asarray(s, dtype=np.float64)
    if data.ndim == 1:
        data = data[:, None]
    if not np.all(np.isfinite(data)):
        raise InvalidInputError("sample data contains non-finite entries")
    return data


def _as_square(m, name):
    m = np.asarray(m, dtype=np.float64)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise InvalidInputError(f"{name} must be square, got shape {m.shape}")
    return m


def pairwise_sq_dists(s):
    """Squared Euclidean distances between all rows of ``s``.

    Returns a symmetric N x N matrix with an exactly zero diagonal.
    """
    data = _as_data(s)
    if data.shape[0] < 2:
        raise InvalidInputError(f"a sample graph needs at least 2 samples, got {data.shape[0]}")
    return _kernels.sq_dists(data)


def adaptive_scales(d2, k=DEFAULT_K):
    """Per-sample kernel scale: mean of the ``k`` smallest off-diagonal
    squared distances in each row of ``d2`` (self excluded)."""
    d2 = _as_square(d2, "distance matrix")
    n = d2.shape[0]
    if not 1 <= k <= n - 1:
        raise ParameterError(f"k must lie in [1, {n - 1}], got {k}")
    masked = d2.copy()
    np.fill_diagonal(masked, np.inf)
    nearest = np.partition(masked, k - 1, axis=1)[:, :k]
    eps = nearest.mean(axis=1)
    bad = np.flatnonzero(~(eps > 0))
    if bad.size:
        raise DegenerateScaleError(bad[0])
    return eps


def gaussian_affinity(d2, scales):
    """``exp(-d2[i, j] / sqrt(scales[i] * scales[j]))``.

    ``scales`` may be a vector of per-sample scales or a scalar global
    epsilon (the override used when adaptive scaling is switched off).
    """
    d2 = _as_square(d2, "distance matrix")
    n = d2.shape[0]
    eps = np.asarray(scales, dtype=np.float64)
    if eps.ndim == 0:
        eps = np.full(n, float(eps))
    if eps.shape != (n,):
        raise ParameterError(f"expected {n} scales, got shape {eps.shape}")
    bad = np.flatnonzero(~(eps > 0) | ~np.isfinite(eps))
    if bad.size:
        raise DegenerateScaleError(bad[0])
    return _kernels.gaussian(d2, eps)


def column_normalize(w):
    """Divide each column of an affinity matrix by its sum."""
    w = _as_square(w, "affinity")
    sums = w.sum(axis=0)
    bad = np.flatnonzero(~(sums > 0))
    if bad.size:
        raise DegenerateGraphError(f"column {bad[0]} of the affinity matrix sums to zero")
    degree = sums if np.array_equal(w, w.T) else None
    return StochasticMatrix(w / sums, degree)


def affinity_from_sq_dists(d2, k=DEFAULT_K, global_eps=None):
    """Adaptive (or global-epsilon) Gaussian affinity from squared distances."""
    if global_eps is not None:
        return gaussian_affinity(d2, float(global_eps))
    return gaussian_affinity(d2, adaptive_scales(d2, k))
