"""Inner loops shared by the kernel and Mahalanobis modules.

Every kernel has a ``*_nb`` (numba) and ``*_np`` (numpy) variant with the
same signature; the undecorated name dispatches on ``_accel.USE_NUMBA``.
Entries are computed independently per (i, j), so both variants are
deterministic for a fixed thread count.
"""

import numpy as np

from . import _accel
from ._accel import njit, prange

# rows per block in the numpy variants; bounds temporaries to ~64 MB
_BLOCK_BYTES = 64 * 2**20


def _block_rows(n, width):
    return max(1, min(n, _BLOCK_BYTES // max(1, 8 * n * width)))


@njit(parallel=True, cache=True)
def sq_dists_nb(a):
    n, dim = a.shape
    out = np.zeros((n, n))
    for i in prange(n):
        for j in range(i + 1, n):
            acc = 0.0
            for k in range(dim):
                t = a[i, k] - a[j, k]
                acc += t * t
            out[i, j] = acc
    for i in range(n):
        for j in range(i + 1, n):
            out[j, i] = out[i, j]
    return out


def sq_dists_np(a):
    n, dim = a.shape
    out = np.empty((n, n))
    step = _block_rows(n, dim)
    for lo in range(0, n, step):
        diff = a[lo:lo + step, None, :] - a[None, :, :]
        out[lo:lo + step] = np.einsum("bnd,bnd->bn", diff, diff)
    # exact symmetry: copy the upper triangle down
    iu = np.triu_indices(n, 1)
    out[(iu[1], iu[0])] = out[iu]
    np.fill_diagonal(out, 0.0)
    return out


@njit(parallel=True, cache=True)
def gaussian_nb(d2, eps):
    n = d2.shape[0]
    out = np.empty((n, n))
    for i in prange(n):
        for j in range(n):
            out[i, j] = np.exp(-d2[i, j] / np.sqrt(eps[i] * eps[j]))
    return out


def gaussian_np(d2, eps):
    return np.exp(-d2 / np.sqrt(np.multiply.outer(eps, eps)))


@njit(parallel=True, cache=True)
def one_sided_forms_nb(a, factors):
    # out[i, j] = || factors[i].T @ (a[i] - a[j]) ||^2
    n, dim = a.shape
    r = factors.shape[2]
    out = np.zeros((n, n))
    for i in prange(n):
        for j in range(n):
            if j == i:
                continue
            acc = 0.0
            for c in range(r):
                proj = 0.0
                for k in range(dim):
                    proj += factors[i, k, c] * (a[i, k] - a[j, k])
                acc += proj * proj
            out[i, j] = acc
    return out


def one_sided_forms_np(a, factors):
    n, dim = a.shape
    r = factors.shape[2]
    out = np.empty((n, n))
    # project every sample onto each row's factor, then differences are cheap
    step = _block_rows(n, max(r, 1))
    for lo in range(0, n, step):
        f = factors[lo:lo + step]
        proj_all = np.einsum("nd,bdr->bnr", a, f)
        proj_self = np.einsum("bd,bdr->br", a[lo:lo + step], f)
        diff = proj_self[:, None, :] - proj_all
        out[lo:lo + step] = np.einsum("bnr,bnr->bn", diff, diff)
    np.fill_diagonal(out, 0.0)
    return out


def sq_dists(a):
    a = np.ascontiguousarray(a, dtype=np.float64)
    return sq_dists_nb(a) if _accel.USE_NUMBA else sq_dists_np(a)


def gaussian(d2, eps):
    d2 = np.ascontiguousarray(d2, dtype=np.float64)
    eps = np.ascontiguousarray(eps, dtype=np.float64)
    return gaussian_nb(d2, eps) if _accel.USE_NUMBA else gaussian_np(d2, eps)


def one_sided_forms(a, factors):
    a = np.ascontiguousarray(a, dtype=np.float64)
    factors = np.ascontiguousarray(factors, dtype=np.float64)
    if _accel.USE_NUMBA:
        return one_sided_forms_nb(a, factors)
    return one_sided_forms_np(a, factors)
