"""Synthetic datasets with known hidden variables."""

from dataclasses import dataclass

import numpy as np

from .errors import ParameterError
from .kernels import SampleSet

GEOMETRIES = ("standard", "printed")


def make_rng(seed):
    """Seeded counter-based generator (Philox): same seed, same stream on any
    platform."""
    return np.random.Generator(np.random.Philox(seed))


@dataclass
class HiddenTriplets:
    x: np.ndarray
    y: np.ndarray
    z: np.ndarray
    seed: int

    @property
    def n(self):
        return self.x.shape[0]

    def as_array(self):
        return np.column_stack([self.x, self.y, self.z])


@dataclass(frozen=True)
class TorusParams:
    R: float = 10.0
    r1: float = 4.0
    r2: float = 2.0

    def __post_init__(self):
        if not (self.r1 > 0 and self.r2 > 0):
            raise ParameterError("minor radii must be positive")
        if not (self.R > self.r1 and self.R > self.r2):
            raise ParameterError(f"major radius {self.R} must exceed both minor radii")


def sample_hidden(n, seed=0):
    """``n`` i.i.d. triplets, each coordinate uniform on [0, 1]."""
    if int(n) != n or n < 1:
        raise ParameterError(f"n must be a positive integer, got {n}")
    u = make_rng(seed).random((3, int(n)))
    return HiddenTriplets(u[0], u[1], u[2], seed)


def torus_observe(x, v, R, r):
    """Observation map with the additive ``R`` on both planar components::

        (R + r cos(2 pi v) cos(2 pi x),
         R + r cos(2 pi v) sin(2 pi x),
             r sin(2 pi v))

    Geometrically this is a sphere of radius ``r`` centred at (R, R, 0)
    covered twice: (x, v) and (x + 1/2, 1/2 - v) land on the same point.
    """
    a = 2 * np.pi * np.asarray(x, dtype=np.float64)
    b = 2 * np.pi * np.asarray(v, dtype=np.float64)
    rc = r * np.cos(b)
    return np.stack([R + rc * np.cos(a), R + rc * np.sin(a), r * np.sin(b)], axis=-1)


def standard_torus_observe(x, v, R, r):
    """Ring torus with major angle ``x`` and minor angle ``v`` (both in turns)."""
    a = 2 * np.pi * np.asarray(x, dtype=np.float64)
    b = 2 * np.pi * np.asarray(v, dtype=np.float64)
    rho = R + r * np.cos(b)
    return np.stack([rho * np.cos(a), rho * np.sin(a), r * np.sin(b)], axis=-1)


def observe(geometry):
    if geometry == "standard":
        return standard_torus_observe
    if geometry == "printed":
        return torus_observe
    raise ParameterError(f"unknown torus geometry {geometry!r}; choose from {GEOMETRIES}")


def torus_residual(points, R, r, geometry="standard"):
    """Implicit-equation residual of points on the chosen surface."""
    p = np.asarray(points, dtype=np.float64)
    if geometry == "standard":
        return (np.hypot(p[..., 0], p[..., 1]) - R) ** 2 + p[..., 2] ** 2 - r * r
    if geometry == "printed":
        return (p[..., 0] - R) ** 2 + (p[..., 1] - R) ** 2 + p[..., 2] ** 2 - r * r
    raise ParameterError(f"unknown torus geometry {geometry!r}")


def generate_tori_dataset(n=3000, seed=0, params=TorusParams(), geometry="standard"):
    """Two sensors sharing the major angle x; minor angles y and z are
    specific to sensor 1 and sensor 2."""
    g = observe(geometry)
    h = sample_hidden(n, seed)
    truth = h.as_array()
    s1 = SampleSet(g(h.x, h.y, params.R, params.r1), sensor_id=1, hidden_truth=truth)
    s2 = SampleSet(g(h.x, h.z, params.R, params.r2), sensor_id=2, hidden_truth=truth)
    return s1, s2


@dataclass
class LinearObservation:
    """``g(x, y) = A x + B y``; ``B`` is the exact Jacobian in y."""

    A: np.ndarray
    B: np.ndarray

    def __call__(self, x, y):
        return np.asarray(x) @ self.A.T + np.asarray(y) @ self.B.T

    @property
    def jac_y(self):
        return self.B


def linear_observation(d_obs, d_x, d_y, seed=0):
    if d_obs <= d_x + d_y:
        raise ParameterError(f"need d_obs > d_x + d_y, got {d_obs} <= {d_x} + {d_y}")
    rng = make_rng(seed)
    while True:
        mix = rng.standard_normal((d_obs, d_x + d_y))
        sv = np.linalg.svd(mix, compute_uv=False)
        if sv[-1] > 1e-6 * sv[0] and sv[-1] > 1e-6:
            return LinearObservation(mix[:, :d_x], mix[:, d_x:])


def linear_multimodal(n, d_obs, d_x, d_y, seed=0):
    """Samples of a random full-column-rank linear map of uniform (x, y).

    Returns ``(samples, jac_y)``; hidden_truth holds ``[x, y]``.
    """
    g = linear_observation(d_obs, d_x, d_y, seed)
    rng = make_rng([seed, 1])
    x = rng.random((int(n), d_x))
    y = rng.random((int(n), d_y))
    s = SampleSet(g(x, y), sensor_id=1, hidden_truth=np.hstack([x, y]))
    return s, g.B.copy()
