"""Numerical oracles for the local-covariance and Mahalanobis identities,
plus the evaluation metrics used by the acceptance suite.

The oracles never touch the embedding pipeline: neighborhoods are built
analytically around a base point from an offset design whose y-offsets are
whitened (sum of outer products equal to ``h**2 * I``) and whose x-offsets
shrink quadratically with the y-offsets, then compared against the exact
Jacobian of the observation map.
"""

import io
from dataclasses import dataclass, field
from typing import Callable, List, NamedTuple

import numpy as np

from .errors import InvalidInputError, NoPeakError, ParameterError
from .specific import truncated_pinv
from .synthetic import linear_observation, make_rng, observe

G_KINDS = ("linear", "torus")
SLOPE_RADII = (1e-2, 5e-3, 2.5e-3)

# acceptance thresholds
THM1_LINEAR_TOL = 1e-10
THM1_SLOPE_RANGE = (2.5, 3.5)
THM1_SMALL_RADIUS = 1e-3
THM1_SMALL_RADIUS_TOL = 1e-5
THM2_LINEAR_TOL = 1e-8
THM2_MIN_SLOPE = 2.5


@dataclass
class JacobianOracle:
    """Observation map ``g(x, y)`` with its exact Jacobian in ``y``."""

    g: Callable
    jac_y: Callable
    d_x: int
    d_y: int
    kind: str = "custom"


def linear_oracle(d_obs=5, d_x=1, d_y=2, seed=0):
    lin = linear_observation(d_obs, d_x, d_y, seed)
    return JacobianOracle(g=lin, jac_y=lambda x, y: lin.B, d_x=d_x, d_y=d_y, kind="linear")


def torus_jac_y(x, v, r):
    a, b = 2 * np.pi * float(np.ravel(x)[0]), 2 * np.pi * float(np.ravel(v)[0])
    return (2 * np.pi * r) * np.array([[-np.sin(b) * np.cos(a)], [-np.sin(b) * np.sin(a)], [np.cos(b)]])


def torus_oracle(R=10.0, r=4.0, geometry="standard"):
    # the y-Jacobian is the same for both geometries; only d/dx differs
    obs = observe(geometry)

    def g(x, y):
        return obs(np.ravel(x)[0], np.ravel(y)[0], R, r)

    return JacobianOracle(g=g, jac_y=lambda x, y: torus_jac_y(x, y, r), d_x=1, d_y=1, kind="torus")


def make_oracle(g_kind, seed=0):
    if g_kind == "linear":
        return linear_oracle(seed=seed)
    if g_kind == "torus":
        return torus_oracle()
    raise ParameterError(f"unknown observation map {g_kind!r}; choose from {G_KINDS}")


def whitened_design(q, d, rng):
    """``q`` offsets in R^d with ``sum u u^T = I`` exactly."""
    if q < d:
        raise ParameterError(f"need at least {d} offsets, got {q}")
    z = rng.standard_normal((q, d))
    vals, vecs = np.linalg.eigh(z.T @ z)
    return z @ (vecs / np.sqrt(vals)) @ vecs.T


def _x_offsets(dy, d_x, x_scale, rng):
    dirs = rng.standard_normal((dy.shape[0], d_x))
    dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
    return x_scale * np.sum(dy * dy, axis=1, keepdims=True) * dirs


def gram_residual(oracle, x0, y0, dy, dx):
    """``||sum ds ds^T - J (sum dy dy^T) J^T||_F / ||J J^T||_F``."""
    s0 = oracle.g(x0, y0)
    ds = np.array([oracle.g(x0 + a, y0 + b) - s0 for a, b in zip(dx, dy)])
    jac = oracle.jac_y(x0, y0)
    gram = jac @ jac.T
    target = jac @ (dy.T @ dy) @ jac.T
    return np.linalg.norm(ds.T @ ds - target) / np.linalg.norm(gram)


def pair_forms(oracle, x0, y0, dy, dx):
    """One-sided and symmetrized Mahalanobis forms of the pair
    ``(x0, y0) -> (x0 + dx, y0 + dy)`` using pseudo-inverses of the exact
    Jacobian Gram matrices at rank ``d_y``."""
    x1, y1 = x0 + dx, y0 + dy
    ds = oracle.g(x1, y1) - oracle.g(x0, y0)
    j0, j1 = oracle.jac_y(x0, y0), oracle.jac_y(x1, y1)
    p0, _ = truncated_pinv(j0 @ j0.T, rank=oracle.d_y)
    p1, _ = truncated_pinv(j1 @ j1.T, rank=oracle.d_y)
    one_sided = ds @ p0 @ ds
    return one_sided, 0.5 * (one_sided + ds @ p1 @ ds)


def loglog_slope(radii, errors):
    """Least-squares slope of log(error) against log(radius)."""
    radii, errors = np.asarray(radii, dtype=float), np.asarray(errors, dtype=float)
    if np.any(errors <= 0):
        return float("nan")
    return float(np.polyfit(np.log(radii), np.log(errors), 1)[0])


def _default_x_scale(oracle, x_scale):
    if x_scale is not None:
        return x_scale
    # linear maps are exact only with the common variable frozen
    return 0.0 if oracle.kind == "linear" else 1.0


def _trial_points(oracle, trials, seed):
    if int(trials) != trials or trials < 1:
        raise ParameterError(f"trials must be a positive integer, got {trials}")
    rng = make_rng([seed, 7])
    return [(rng.random(oracle.d_x), rng.random(oracle.d_y)) for _ in range(int(trials))]


@dataclass
class OracleReport:
    name: str
    radius: float
    errors: List[float] = field(default_factory=list)

    @property
    def max_error(self):
        return max(self.errors)


def check_theorem1(g_kind, h, trials=20, seed=0, q=8, x_scale=None):
    """Local-covariance identity: per-trial Gram residual at radius ``h``."""
    oracle = g_kind if isinstance(g_kind, JacobianOracle) else make_oracle(g_kind, seed)
    x_scale = _default_x_scale(oracle, x_scale)
    report = OracleReport(f"thm1/{oracle.kind}", h)
    for t, (x0, y0) in enumerate(_trial_points(oracle, trials, seed)):
        rng = make_rng([seed, 11, t])
        dy = h * whitened_design(max(q, oracle.d_y), oracle.d_y, rng)
        dx = _x_offsets(dy, oracle.d_x, x_scale, rng)
        report.errors.append(float(gram_residual(oracle, x0, y0, dy, dx)))
    return report


@dataclass
class Theorem2Report:
    name: str
    radius: float
    relative: List[float] = field(default_factory=list)
    absolute: List[float] = field(default_factory=list)
    relative_sym: List[float] = field(default_factory=list)
    absolute_sym: List[float] = field(default_factory=list)


def check_theorem2(g_kind, h, trials=20, seed=0, x_scale=None):
    """Mahalanobis-distance identity at radius ``h``: errors of the one-sided
    and symmetrized forms against ``||dy||^2``."""
    oracle = g_kind if isinstance(g_kind, JacobianOracle) else make_oracle(g_kind, seed)
    x_scale = _default_x_scale(oracle, x_scale)
    report = Theorem2Report(f"thm2/{oracle.kind}", h)
    for t, (x0, y0) in enumerate(_trial_points(oracle, trials, seed)):
        rng = make_rng([seed, 13, t])
        u = rng.standard_normal(oracle.d_y)
        dy = h * u / np.linalg.norm(u)
        dx = _x_offsets(dy[None, :], oracle.d_x, x_scale, rng)[0]
        one, sym = pair_forms(oracle, x0, y0, dy, dx)
        target = h * h
        report.absolute.append(abs(one - target))
        report.relative.append(abs(one - target) / target)
        report.absolute_sym.append(abs(sym - target))
        report.relative_sym.append(abs(sym - target) / target)
    return report


def circular_correlation(theta_est, theta_true):
    """Agreement of two angle samples up to a rotation offset and a
    reflection: ``max |mean exp(i(a -+ b))|``. 1 means exact recovery,
    independent angles give about ``1/sqrt(N)``."""
    a = np.asarray(theta_est, dtype=np.float64).ravel()
    b = np.asarray(theta_true, dtype=np.float64).ravel()
    if a.shape != b.shape:
        raise InvalidInputError(f"angle vectors differ in length: {a.size} vs {b.size}")
    if a.size == 0:
        raise InvalidInputError("empty angle vectors")
    same = np.abs(np.mean(np.exp(1j * (a - b))))
    flipped = np.abs(np.mean(np.exp(1j * (a + b))))
    return float(min(1.0, max(same, flipped)))


class DftPeak(NamedTuple):
    frequency: float
    magnitude: float
    bin: int


def dft_peak(signal, sample_period=1.0, rtol=1e-9):
    """Largest non-DC bin of the DFT magnitude. Bins within ``rtol`` of the
    maximum count as ties and the lowest one wins."""
    x = np.asarray(signal, dtype=np.float64).ravel()
    if x.size < 4:
        raise ParameterError(f"need at least 4 samples, got {x.size}")
    mag = np.abs(np.fft.rfft(x))[1:]
    top = mag.max()
    if top <= 1e-12 * max(1.0, np.linalg.norm(x)) * np.sqrt(x.size):
        raise NoPeakError("signal has no non-zero frequency content")
    b = int(np.flatnonzero(mag >= top * (1 - rtol))[0]) + 1
    return DftPeak(b / (x.size * sample_period), float(mag[b - 1]), b)


@dataclass
class SuiteResult:
    lines: List[str] = field(default_factory=list)
    checks: List[tuple] = field(default_factory=list)

    @property
    def ok(self):
        return all(passed for _, passed in self.checks)

    def check(self, label, passed):
        self.checks.append((label, bool(passed)))
        self.lines.append(f"{'PASS' if passed else 'FAIL'} {label}")

    def text(self):
        return "\n".join(self.lines) + "\n"

    def csv(self):
        buf = io.StringIO()
        buf.write("check,passed\n")
        for label, passed in self.checks:
            buf.write(f"\"{label}\",{int(passed)}\n")
        return buf.getvalue()


def _fmt(v):
    return f"{v:.6e}"


def run_theorem1(result, trials, seed):
    lin = check_theorem1("linear", 1e-2, trials, seed)
    for t, e in enumerate(lin.errors):
        result.lines.append(f"thm1 linear h=1e-2 trial={t} rel_frobenius={_fmt(e)}")
    result.check(f"thm1 linear max error {_fmt(lin.max_error)} <= {THM1_LINEAR_TOL:g}",
                 lin.max_error <= THM1_LINEAR_TOL)
    means = []
    for h in SLOPE_RADII:
        rep = check_theorem1("torus", h, trials, seed)
        means.append(float(np.mean(rep.errors)))
        result.lines.append(f"thm1 torus h={h:g} mean_error={_fmt(means[-1])} max_error={_fmt(rep.max_error)}")
    slope = loglog_slope(SLOPE_RADII, means)
    lo, hi = THM1_SLOPE_RANGE
    result.check(f"thm1 torus log-log slope {slope:.4f} in [{lo}, {hi}]", lo <= slope <= hi)
    small = check_theorem1("torus", THM1_SMALL_RADIUS, trials, seed)
    result.check(f"thm1 torus h={THM1_SMALL_RADIUS:g} max error {_fmt(small.max_error)} <= {THM1_SMALL_RADIUS_TOL:g}",
                 small.max_error <= THM1_SMALL_RADIUS_TOL)


def run_theorem2(result, trials, seed):
    lin = check_theorem2("linear", 1e-2, trials, seed)
    for t, (e, es) in enumerate(zip(lin.relative, lin.relative_sym)):
        result.lines.append(f"thm2 linear h=1e-2 trial={t} rel_error={_fmt(e)} rel_error_sym={_fmt(es)}")
    worst = max(max(lin.relative), max(lin.relative_sym))
    result.check(f"thm2 linear max relative error {_fmt(worst)} <= {THM2_LINEAR_TOL:g}", worst <= THM2_LINEAR_TOL)
    one, sym = [], []
    for h in SLOPE_RADII:
        rep = check_theorem2("torus", h, trials, seed)
        one.append(float(np.mean(rep.absolute)))
        sym.append(float(np.mean(rep.absolute_sym)))
        result.lines.append(
            f"thm2 torus h={h:g} abs_error={_fmt(one[-1])} abs_error_sym={_fmt(sym[-1])} "
            f"rel_error_sym={_fmt(float(np.mean(rep.relative_sym)))}"
        )
    result.lines.append(f"thm2 torus one-sided log-log slope {loglog_slope(SLOPE_RADII, one):.4f}")
    slope = loglog_slope(SLOPE_RADII, sym)
    result.check(f"thm2 torus symmetrized log-log slope {slope:.4f} >= {THM2_MIN_SLOPE}", slope >= THM2_MIN_SLOPE)


def run_suite(suite="all", trials=20, seed=0):
    """Run the oracle suite(s); returns a :class:`SuiteResult`."""
    if suite not in ("thm1", "thm2", "all"):
        raise ParameterError(f"unknown suite {suite!r}; choose thm1, thm2 or all")
    if int(trials) != trials or trials < 1:
        raise ParameterError(f"trials must be a positive integer, got {trials}")
    result = SuiteResult()
    if suite in ("thm1", "all"):
        run_theorem1(result, trials, seed)
    if suite in ("thm2", "all"):
        run_theorem2(result, trials, seed)
    return result
