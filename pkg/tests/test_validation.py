import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from latentfuse.errors import InvalidInputError, NoPeakError, ParameterError
from latentfuse.synthetic import make_rng, standard_torus_observe, torus_observe
from latentfuse.validation import (
    JacobianOracle,
    check_theorem1,
    check_theorem2,
    circular_correlation,
    dft_peak,
    linear_oracle,
    loglog_slope,
    pair_forms,
    run_suite,
    torus_jac_y,
    torus_oracle,
    whitened_design,
)


def central_difference_jac_y(g, x, v, h=1e-6):
    return ((g(x, v + h, 10.0, 4.0) - g(x, v - h, 10.0, 4.0)) / (2 * h))[:, None]


@pytest.mark.parametrize("g", [torus_observe, standard_torus_observe])
@pytest.mark.parametrize("x,v", [(0.0, 0.0), (0.13, 0.71), (0.9, 0.4)])
def test_torus_jacobian_against_finite_differences(g, x, v):
    np.testing.assert_allclose(torus_jac_y(x, v, 4.0), central_difference_jac_y(g, x, v), atol=1e-6)


def test_torus_jacobian_formula():
    x, v, r = 0.2, 0.35, 4.0
    a, b = 2 * np.pi * x, 2 * np.pi * v
    expected = r * 2 * np.pi * np.array([-np.sin(b) * np.cos(a), -np.sin(b) * np.sin(a), np.cos(b)])
    np.testing.assert_allclose(torus_jac_y(x, v, r)[:, 0], expected, rtol=1e-15)


def test_linear_oracle_constant_jacobian():
    o = linear_oracle()
    assert isinstance(o, JacobianOracle) and o.kind == "linear"
    np.testing.assert_array_equal(o.jac_y(np.zeros(1), np.zeros(2)), o.jac_y(np.ones(1), np.ones(2)))


@pytest.mark.parametrize("q,d", [(2, 2), (8, 2), (11, 1), (20, 3)])
def test_whitened_design(q, d):
    u = whitened_design(q, d, make_rng(q))
    np.testing.assert_allclose(u.T @ u, np.eye(d), atol=1e-12)
    with pytest.raises(ParameterError):
        whitened_design(d - 1, d, make_rng(0))


def test_covariance_identity_linear_exact():
    rep = check_theorem1("linear", 1e-2, trials=20)
    assert len(rep.errors) == 20 and rep.max_error <= 1e-10


def test_covariance_identity_torus_two_radius_ratio():
    h = 1e-2
    big = np.mean(check_theorem1("torus", h, trials=20).errors)
    small = np.mean(check_theorem1("torus", h / 2, trials=20).errors)
    assert 2 ** 2.5 <= big / small <= 2 ** 3.5


def test_covariance_identity_torus_small_radius():
    assert check_theorem1("torus", 1e-3, trials=20).max_error <= 1e-5


def test_distance_identity_linear_exact():
    rep = check_theorem2("linear", 1e-2, trials=20)
    assert max(rep.relative) <= 1e-8 and max(rep.relative_sym) <= 1e-8


def test_distance_identity_symmetrized_slope():
    radii = [1e-2, 5e-3, 2.5e-3]
    errs = [np.mean(check_theorem2("torus", h, trials=20).absolute_sym) for h in radii]
    assert loglog_slope(radii, errs) >= 2.5


def test_distance_identity_zero_specific_displacement():
    # dy = 0 and |dx| = h^2: the form only sees the leaked common motion
    o = linear_oracle()
    x0, y0 = np.array([0.3]), np.array([0.2, 0.6])
    vals = []
    for h in (1e-2, 5e-3):
        one, sym = pair_forms(o, x0, y0, np.zeros(2), np.array([h * h]))
        vals.append(sym)
        assert sym <= 1e3 * h ** 4
    assert vals[0] / vals[1] == pytest.approx(16.0, rel=1e-6)


def test_custom_oracle_accepted():
    o = torus_oracle(R=10.0, r=2.0)
    assert check_theorem1(o, 1e-3, trials=3).max_error <= 1e-5


def test_unknown_g_kind():
    with pytest.raises(ParameterError):
        check_theorem1("cubic", 1e-2)


def test_trials_must_be_positive():
    with pytest.raises(ParameterError):
        check_theorem2("linear", 1e-2, trials=0)


def test_loglog_slope():
    assert loglog_slope([1, 2, 4], [3, 24, 192]) == pytest.approx(3.0)
    assert np.isnan(loglog_slope([1, 2], [0.0, 1.0]))


# --- circular correlation ----------------------------------------------------

def test_circular_identity_and_reflection(rng):
    theta = rng.uniform(0, 2 * np.pi, 500)
    assert circular_correlation(theta, theta) == pytest.approx(1.0, abs=1e-12)
    assert circular_correlation(-theta + 0.7, theta) == pytest.approx(1.0, abs=1e-12)


def test_circular_independent_null():
    rng = make_rng(5)
    a, b = rng.uniform(0, 2 * np.pi, 3000), rng.uniform(0, 2 * np.pi, 3000)
    assert circular_correlation(a, b) <= 0.1


def test_circular_length_mismatch():
    with pytest.raises(InvalidInputError):
        circular_correlation(np.zeros(3), np.zeros(4))


@settings(max_examples=40, deadline=None)
@given(st.floats(-10, 10), st.booleans(), st.integers(0, 2**31 - 1))
def test_circular_invariance(offset, flip, seed):
    theta = np.random.default_rng(seed).uniform(0, 2 * np.pi, 50)
    noisy = theta + np.random.default_rng(seed + 1).normal(0, 0.3, 50)
    base = circular_correlation(noisy, theta)
    moved = (-noisy if flip else noisy) + offset
    assert circular_correlation(moved, theta) == pytest.approx(base, abs=1e-12)
    assert 0.0 <= base <= 1.0


# --- dft_peak ----------------------------------------------------------------

def naive_dft_magnitude(x):
    n = len(x)
    k = np.arange(n // 2 + 1)
    return np.abs(np.exp(-2j * np.pi * np.outer(k, np.arange(n)) / n) @ x)


def test_pure_tone_bin():
    n = 256
    peak = dft_peak(np.cos(2 * np.pi * 17 * np.arange(n) / n))
    assert peak.bin == 17 and peak.frequency == pytest.approx(17 / n)


def test_sample_period_scales_frequency():
    n, rate = 400, 1000.0
    t = np.arange(n) / rate
    assert dft_peak(np.sin(2 * np.pi * 50 * t), sample_period=1 / rate).frequency == pytest.approx(50.0)


def test_noisy_tone_matches_naive_dft():
    n = 300
    x = np.sin(2 * np.pi * 17 * np.arange(n) / n) + 0.1 * make_rng(2).standard_normal(n)
    mag = naive_dft_magnitude(x)
    expected = int(np.argmax(mag[1:])) + 1
    peak = dft_peak(x)
    assert peak.bin == expected == 17
    assert peak.magnitude == pytest.approx(mag[17], rel=1e-10)


def test_equal_tones_lower_bin():
    n = 128
    t = np.arange(n) / n
    assert dft_peak(np.cos(2 * np.pi * 9 * t) + np.cos(2 * np.pi * 23 * t)).bin == 9


def test_constant_and_short_signals():
    with pytest.raises(NoPeakError):
        dft_peak(np.full(64, 3.0))
    with pytest.raises(ParameterError):
        dft_peak(np.arange(3.0))


# --- suite -------------------------------------------------------------------

def test_run_suite_passes_and_is_deterministic():
    a, b = run_suite("all", trials=5, seed=3), run_suite("all", trials=5, seed=3)
    assert a.ok and a.text() == b.text()
    assert a.csv().splitlines()[0] == "check,passed"
    assert sum(line.startswith("PASS") for line in a.lines) == 5


def test_run_suite_rejects_bad_arguments():
    with pytest.raises(ParameterError):
        run_suite("thm3")
    with pytest.raises(ParameterError):
        run_suite("all", trials=0)
