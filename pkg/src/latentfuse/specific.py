"""Sensor-specific stage: neighborhoods in the common embedding, local
Gaussian statistics, truncated-pseudo-inverse Mahalanobis affinity and the
final diffusion map."""

import warnings
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import _kernels
from .diffusion import Embedding, diffusion_map
from .errors import InvalidInputError, ParameterError
from .kernels import SampleSet, column_normalize, gaussian_affinity
from .params import PipelineParams


class DegenerateNeighborhoodWarning(RuntimeWarning):
    """Some local covariances vanished; their pseudo-inverse is zero."""


@dataclass
class NeighborhoodIndex:
    """``neighbors[i]`` lists the q samples closest to i in the common
    embedding, i itself first, remaining ties broken by lower index."""

    neighbors: np.ndarray
    q: int

    def __len__(self):
        return self.neighbors.shape[0]


@dataclass
class LocalGaussian:
    mean: np.ndarray
    cov: np.ndarray
    pinv: Optional[np.ndarray] = None
    rank: Optional[int] = None


class LocalStats:
    """Batched local means and covariances.

    Covariances are stored through the SVD of each centered neighborhood,
    ``cov_i = V_i diag(sv_i**2) V_i.T``, so high-dimensional samples (lag
    maps) never materialize a D x D matrix per sample. Indexing yields a
    :class:`LocalGaussian` with dense matrices.
    """

    def __init__(self, means, singular_values, right_vecs):
        self.means = means
        self.singular_values = singular_values
        self.right_vecs = right_vecs
        self.factors = None
        self.ranks = None

    def __len__(self):
        return self.means.shape[0]

    @property
    def dim(self):
        return self.means.shape[1]

    def eigvals(self):
        """Covariance eigenvalues per sample, descending."""
        return self.singular_values ** 2

    def cov(self, i):
        v = self.right_vecs[i]
        return (v.T * self.eigvals()[i]) @ v

    def pinv(self, i):
        if self.factors is None:
            raise InvalidInputError("pseudo-inverses not computed; call truncate() first")
        f = self.factors[i]
        return f @ f.T

    def __getitem__(self, i):
        pinv = self.pinv(i) if self.factors is not None else None
        rank = int(self.ranks[i]) if self.ranks is not None else None
        return LocalGaussian(self.means[i].copy(), self.cov(i), pinv, rank)

    def truncate(self, tau=1e-2, rank=None):
        """Attach truncated pseudo-inverses, stored as factors with
        ``pinv_i = F_i @ F_i.T``."""
        lam = self.eigvals()
        keep = _keep_mask(lam, tau, rank, floor_scale=max(self.dim, lam.shape[1]))
        self.ranks = keep.sum(axis=1)
        r = int(self.ranks.max()) if len(self) else 0
        # eigenvalues are sorted descending, so kept columns come first
        inv_sv = np.where(keep, 1.0 / np.where(keep, self.singular_values, 1.0), 0.0)
        self.factors = np.ascontiguousarray(
            np.transpose(self.right_vecs[:, :r, :], (0, 2, 1)) * inv_sv[:, None, :r]
        )
        zero = np.flatnonzero(self.ranks == 0)
        if zero.size:
            warnings.warn(
                f"{zero.size} local covariance(s) vanished (first: sample {zero[0]}); "
                "their pseudo-inverse is zero",
                DegenerateNeighborhoodWarning,
                stacklevel=2,
            )
        return self


def _keep_mask(lam, tau, rank, floor_scale):
    # lam: (..., r) eigenvalues sorted descending
    lam_max = lam[..., :1]
    floor = lam_max * floor_scale * np.finfo(float).eps
    keep = (lam > floor) & (lam > 0)
    if rank is not None:
        keep &= np.arange(lam.shape[-1]) < rank
    else:
        keep &= lam >= tau * lam_max
    return keep


def _coords(xhat):
    coords = xhat.coords if isinstance(xhat, Embedding) else np.asarray(xhat, dtype=np.float64)
    if coords.ndim == 1:
        coords = coords[:, None]
    return coords


def neighborhoods(xhat, q):
    """The ``q`` nearest samples of every sample in the common embedding."""
    coords = _coords(xhat)
    n = coords.shape[0]
    if not 1 <= q <= n:
        raise ParameterError(f"neighborhood size q must lie in [1, {n}], got {q}")
    d2 = _kernels.sq_dists(coords)
    # self goes first even when an exact duplicate has a lower index
    np.fill_diagonal(d2, -1.0)
    order = np.argsort(d2, axis=1, kind="stable")[:, :q]
    return NeighborhoodIndex(order, int(q))


def local_stats(s, nbr):
    """Mean and biased (1/q) covariance of each neighborhood."""
    data = s.data if isinstance(s, SampleSet) else np.asarray(s, dtype=np.float64)
    idx = nbr.neighbors if isinstance(nbr, NeighborhoodIndex) else np.asarray(nbr)
    if idx.shape[0] != data.shape[0]:
        raise ParameterError(f"neighborhood index covers {idx.shape[0]} samples, data has {data.shape[0]}")
    if idx.size and (idx.min() < 0 or idx.max() >= data.shape[0]):
        raise ParameterError("neighborhood index refers to samples outside the data")
    q = idx.shape[1]
    pts = data[idx]
    means = pts.mean(axis=1)
    centered = (pts - means[:, None, :]) / np.sqrt(q)
    _, sv, vt = np.linalg.svd(centered, full_matrices=False)
    return LocalStats(means, sv, vt)


def truncated_pinv(cov, tau=1e-2, rank=None):
    """Pseudo-inverse of a PSD matrix keeping eigenvalues ``>= tau * max``
    (or the top ``rank`` of them). Returns ``(pinv, kept_rank)``."""
    cov = np.asarray(cov, dtype=np.float64)
    if cov.ndim != 2 or cov.shape[0] != cov.shape[1]:
        raise InvalidInputError(f"covariance must be square, got shape {cov.shape}")
    vals, vecs = np.linalg.eigh(0.5 * (cov + cov.T))
    vals, vecs = vals[::-1], vecs[:, ::-1]
    keep = _keep_mask(vals, tau, rank, floor_scale=cov.shape[0])
    kept = vecs[:, keep]
    return (kept / vals[keep]) @ kept.T, int(keep.sum())


def _centered(data, stats, center):
    return data - stats.means if center else data


def mahalanobis_forms(s, stats, center=True):
    """Symmetric matrix of ``delta.T (C_i^+ + C_j^+) delta`` where delta is the
    difference of the (optionally mean-subtracted) samples i and j."""
    data = s.data if isinstance(s, SampleSet) else np.asarray(s, dtype=np.float64)
    if len(stats) != data.shape[0] or stats.dim != data.shape[1]:
        raise ParameterError(
            f"statistics for {len(stats)} samples of dimension {stats.dim} "
            f"do not match data of shape {data.shape}"
        )
    if stats.factors is None:
        raise InvalidInputError("pseudo-inverses not computed; call truncate() first")
    one_sided = _kernels.one_sided_forms(_centered(data, stats, center), stats.factors)
    return one_sided + one_sided.T


def mahalanobis_affinity(s, stats, eps="adaptive", k=16, center=True):
    """Gaussian kernel on the modified Mahalanobis forms.

    ``eps`` is ``"adaptive"`` (per-sample scales from the ``k`` smallest forms
    in each row, combined pairwise) or a positive number used globally.
    """
    forms = mahalanobis_forms(s, stats, center)
    if isinstance(eps, str):
        if eps != "adaptive":
            raise ParameterError(f"unknown epsilon policy {eps!r}")
        n = forms.shape[0]
        k = min(k, n - 1)
        masked = forms.copy()
        np.fill_diagonal(masked, np.inf)
        scales = np.partition(masked, k - 1, axis=1)[:, :k].mean(axis=1)
        flat = ~(scales > 0)
        if flat.any():
            # rows with k zero forms: the kernel is locally flat there
            warnings.warn(
                f"{flat.sum()} sample(s) have vanishing Mahalanobis scale; kernel is flat there",
                DegenerateNeighborhoodWarning,
                stacklevel=2,
            )
            positive = scales[~flat]
            scales[flat] = positive.min() if positive.size else 1.0
        return gaussian_affinity(forms, scales)
    return gaussian_affinity(forms, float(eps))


def specific_embedding(s, xhat, params=PipelineParams()):
    """Parametrize the variable seen only by sensor ``s``, given the common
    embedding ``xhat``."""
    nbr = neighborhoods(xhat, params.q)
    stats = local_stats(s, nbr).truncate(params.tau, params.rank)
    eps = params.global_eps if params.global_eps is not None else "adaptive"
    w = mahalanobis_affinity(s, stats, eps=eps, k=params.k, center=params.center)
    return diffusion_map(column_normalize(w), params.d, params.m)
