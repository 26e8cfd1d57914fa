"""Diffusion maps on column-stochastic matrices and diffusion distances."""

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import DegenerateSpectrumError, InvalidInputError, NumericalError, ParameterError, SpectralError
from .kernels import StochasticMatrix

DEFAULT_DIM = 2
DEFAULT_POWER = 1

_UNIT_SUM_TOL = 1e-10
_IMAG_TOL = 1e-8
# below this size a full eigendecomposition is cheaper than two subset calls
_FULL_EIGH_MAX = 256


@dataclass
class Embedding:
    """Diffusion-map coordinates.

    ``coords[:, j] = eigvals[j] ** power * phi_j`` where ``phi_j`` is the
    j-th non-trivial left eigenvector, normalized to unit Euclidean norm
    with its largest-magnitude entry positive.
    """

    coords: np.ndarray
    eigvals: np.ndarray
    power: int = 1

    @property
    def n(self):
        return self.coords.shape[0]

    @property
    def dim(self):
        return self.coords.shape[1]

    def angle(self, first=0, second=1):
        """Polar angle of the point (coords[:, first], coords[:, second])."""
        return np.arctan2(self.coords[:, second], self.coords[:, first])


def _as_stochastic(k):
    if isinstance(k, StochasticMatrix):
        mat, degree = k.k, k.degree
    else:
        mat, degree = np.asarray(k, dtype=np.float64), None
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise InvalidInputError(f"stochastic matrix must be square, got shape {mat.shape}")
    if not np.all(np.isfinite(mat)):
        raise InvalidInputError("stochastic matrix contains non-finite entries")
    sums = mat.sum(axis=0)
    if np.max(np.abs(sums - 1.0)) > _UNIT_SUM_TOL:
        raise InvalidInputError("matrix is not column-stochastic (column sums differ from 1)")
    return mat, degree


def _fix_signs(vecs):
    idx = np.argmax(np.abs(vecs), axis=0)
    signs = np.sign(vecs[idx, np.arange(vecs.shape[1])])
    signs[signs == 0] = 1.0
    return vecs * signs


def _top_by_modulus_sym(a, count):
    n = a.shape[0]
    try:
        if n <= _FULL_EIGH_MAX or 2 * count >= n:
            vals, vecs = scipy.linalg.eigh(a)
        else:
            hi_vals, hi_vecs = scipy.linalg.eigh(a, subset_by_index=[n - count, n - 1])
            lo_vals, lo_vecs = scipy.linalg.eigh(a, subset_by_index=[0, count - 1])
            vals = np.concatenate([lo_vals, hi_vals])
            vecs = np.hstack([lo_vecs, hi_vecs])
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise NumericalError(f"symmetric eigensolver failed: {exc}") from exc
    # stable sort on -|lambda| keeps the positive member of a +-pair first
    order = np.argsort(-np.abs(vals[::-1]), kind="stable")
    vals, vecs = vals[::-1][order], vecs[:, ::-1][:, order]
    return vals[:count], vecs[:, :count]


def _decompose_symmetric(mat, degree, d):
    root = np.sqrt(degree)
    # D^-1/2 W D^-1/2 with W = K D
    a = mat * (root[None, :] / root[:, None])
    a = 0.5 * (a + a.T)
    trivial = root / np.linalg.norm(root)
    a -= np.outer(trivial, trivial)
    vals, vecs = _top_by_modulus_sym(a, d)
    left = vecs / root[:, None]
    left /= np.linalg.norm(left, axis=0)
    return vals, left


def _decompose_general(mat, d):
    n = mat.shape[0]
    try:
        vals, vecs = scipy.linalg.eig(mat.T)
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise NumericalError(f"general eigensolver failed: {exc}") from exc
    ones = np.full(n, 1.0 / np.sqrt(n))
    align = np.abs(ones @ vecs) / np.linalg.norm(vecs, axis=0)
    near_one = np.abs(vals - 1.0) <= 1e-8
    if not near_one.any():
        raise NumericalError("no unit eigenvalue found; matrix is not stochastic")
    candidates = np.flatnonzero(near_one)
    if candidates.size > 1:
        # disconnected graph: rebuild the unit eigenspace as the constant
        # direction plus an orthonormal complement of it
        basis = scipy.linalg.orth(vecs[:, candidates].real)
        const = basis @ (basis.T @ ones)
        const /= np.linalg.norm(const)
        rest = scipy.linalg.orth(basis - np.outer(const, const @ basis))
        vecs = vecs.copy()
        vecs[:, candidates[0]] = const
        vecs[:, candidates[1:]] = rest[:, : candidates.size - 1]
        vals = vals.copy()
        vals[candidates] = 1.0
        align[candidates] = 0.0
        align[candidates[0]] = 1.0
    trivial = candidates[np.argmax(align[candidates])]
    keep = np.delete(np.arange(n), trivial)
    order = keep[np.argsort(-np.abs(vals[keep]), kind="stable")][:d]
    chosen = vals[order]
    if np.any(np.abs(chosen.imag) > _IMAG_TOL):
        raise SpectralError(
            "leading eigenvalues are complex; use column_distances on this kernel "
            "and embed the resulting distances instead"
        )
    left = vecs[:, order].real
    left /= np.linalg.norm(left, axis=0)
    return chosen.real, left


def spectral_decompose(k, d=DEFAULT_DIM):
    """Leading ``d`` non-trivial left eigenpairs of a column-stochastic matrix.

    The stationary pair (eigenvalue 1, constant left eigenvector) is removed.
    Kernels that carry the degree of a symmetric affinity are conjugated to a
    symmetric matrix, so their spectrum is real; anything else goes through
    the general solver and must have a real leading spectrum.

    Returns ``(eigvals, left_vecs)`` sorted by descending modulus.
    """
    mat, degree = _as_stochastic(k)
    n = mat.shape[0]
    if not 1 <= d <= n - 1:
        raise ParameterError(f"embedding dimension must lie in [1, {n - 1}], got {d}")
    off_diag = mat.sum() - np.trace(mat)
    if off_diag <= n * np.finfo(float).eps:
        raise DegenerateSpectrumError("stochastic matrix is the identity; no spectral gap")
    if degree is not None:
        vals, left = _decompose_symmetric(mat, degree, d)
    else:
        vals, left = _decompose_general(mat, d)
    return vals, _fix_signs(left)


def diffusion_map(k, d=DEFAULT_DIM, m=DEFAULT_POWER):
    """Diffusion-map embedding: coordinates ``eigval_j ** m * phi_j``."""
    if int(m) != m or m < 1:
        raise ParameterError(f"diffusion power m must be a positive integer, got {m}")
    vals, left = spectral_decompose(k, d)
    return Embedding(coords=left * vals ** int(m), eigvals=vals, power=int(m))


def _column_sq_dists(km):
    gram = km.T @ km
    norms = np.diag(gram).copy()
    sq = norms[:, None] + norms[None, :] - 2.0 * gram
    # cancellation is severe for near-identical columns; redo those exactly
    scale = norms[:, None] + norms[None, :]
    ii, jj = np.nonzero(np.triu(sq < 1e-6 * scale, 1))
    for lo in range(0, ii.size, 4096):
        a, b = ii[lo:lo + 4096], jj[lo:lo + 4096]
        diff = km[:, a] - km[:, b]
        sq[a, b] = np.einsum("ij,ij->j", diff, diff)
    sq = np.triu(sq, 1)
    sq = sq + sq.T
    np.maximum(sq, 0.0, out=sq)
    return sq


def column_distances(k, m=1):
    """Diffusion distances: Euclidean distance between columns of ``k ** m``."""
    if int(m) != m or m < 1:
        raise ParameterError(f"diffusion power m must be a positive integer, got {m}")
    mat, _ = _as_stochastic(k)
    km = np.linalg.matrix_power(mat, int(m))
    return np.sqrt(_column_sq_dists(km))
