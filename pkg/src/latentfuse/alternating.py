"""Alternating diffusion: the common-variable stage."""

import numpy as np

from .diffusion import column_distances, diffusion_map
from .errors import InvalidInputError, ParameterError
from .kernels import (
    SampleSet,
    StochasticMatrix,
    affinity_from_sq_dists,
    column_normalize,
    pairwise_sq_dists,
)
from .params import PipelineParams


def ad_kernel(k1, k2):
    """Alternating-diffusion kernel ``K2 @ K1``: one step on sensor 1's
    graph followed by one step on sensor 2's graph."""
    a = k1.k if isinstance(k1, StochasticMatrix) else np.asarray(k1, dtype=np.float64)
    b = k2.k if isinstance(k2, StochasticMatrix) else np.asarray(k2, dtype=np.float64)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise InvalidInputError(f"K1 must be square, got shape {a.shape}")
    if a.shape != b.shape:
        raise ParameterError(f"kernel sizes differ: {a.shape} vs {b.shape}")
    return StochasticMatrix(b @ a, None)


def sensor_kernel(s, params=PipelineParams()):
    """Column-stochastic Gaussian kernel of one sensor."""
    d2 = pairwise_sq_dists(s)
    return column_normalize(affinity_from_sq_dists(d2, params.k, params.global_eps))


def common_kernel(s1, s2, params=PipelineParams()):
    """Alternating-diffusion kernel for two paired sample sets."""
    n1 = s1.n if isinstance(s1, SampleSet) else len(s1)
    n2 = s2.n if isinstance(s2, SampleSet) else len(s2)
    if n1 != n2:
        raise ParameterError(f"sensors must have the same number of samples, got {n1} and {n2}")
    return ad_kernel(sensor_kernel(s1, params), sensor_kernel(s2, params))


def common_embedding(s1, s2, params=PipelineParams()):
    """Parametrize the variable shared by two simultaneously sampled sensors.

    The columns of the alternating kernel raised to ``m_ad`` become the
    vertices of a new graph; their squared Euclidean distances feed a second
    self-tuning Gaussian kernel whose diffusion map is returned.
    """
    k = common_kernel(s1, s2, params)
    dist = column_distances(k, params.m_ad)
    w = affinity_from_sq_dists(dist * dist, params.k, params.global_eps)
    return diffusion_map(column_normalize(w), params.d, params.m)
