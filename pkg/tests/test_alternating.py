import numpy as np
import pytest

from latentfuse.alternating import ad_kernel, common_embedding, common_kernel, sensor_kernel
from latentfuse.diffusion import column_distances
from latentfuse.errors import ParameterError
from latentfuse.kernels import SampleSet, StochasticMatrix
from latentfuse.params import PRESETS, PipelineParams
from latentfuse.synthetic import generate_tori_dataset
from latentfuse.timeseries import lag_map, surrogate_ecg
from latentfuse.validation import circular_correlation, dft_peak

from conftest import random_stochastic


def naive_matmul(a, b):
    n = a.shape[0]
    out = np.zeros((n, n))
    for i in range(n):
        for j in range(n):
            for t in range(n):
                out[i, j] += a[i, t] * b[t, j]
    return out


def test_identity_step_returns_k1(rng):
    k1 = random_stochastic(rng, 8)
    np.testing.assert_array_equal(ad_kernel(k1, np.eye(8)).k, k1)


def test_uniform_chain():
    u = np.full((5, 5), 0.2)
    np.testing.assert_allclose(ad_kernel(u, u).k, u, rtol=0, atol=1e-16)


def test_naive_multiply_oracle(rng):
    k1, k2 = random_stochastic(rng, 25), random_stochastic(rng, 25)
    k = ad_kernel(k1, k2)
    assert isinstance(k, StochasticMatrix) and k.degree is None
    np.testing.assert_allclose(k.k, naive_matmul(k2, k1), rtol=0, atol=1e-12)
    np.testing.assert_allclose(k.k.sum(axis=0), 1.0, rtol=0, atol=1e-10)


def test_size_mismatch(rng):
    with pytest.raises(ParameterError):
        ad_kernel(random_stochastic(rng, 4), random_stochastic(rng, 5))
    with pytest.raises(ParameterError):
        common_kernel(SampleSet(rng.random((6, 2))), SampleSet(rng.random((7, 2))))


def test_identical_sensors_column_distances(rng):
    s = SampleSet(rng.standard_normal((40, 3)))
    k = sensor_kernel(s)
    ad = common_kernel(s, s)
    np.testing.assert_allclose(column_distances(ad, 1), column_distances(k.k @ k.k, 1), rtol=0, atol=1e-10)


def test_equal_sensors_on_circle_give_closed_curve(rng):
    t = rng.random(300)
    s = SampleSet(np.c_[np.cos(2 * np.pi * t), np.sin(2 * np.pi * t)])
    # random gaps on a 1-D circle are several mean spacings wide; the first
    # kernel has to bridge them or the refined graph splits into clusters
    emb = common_embedding(s, s, PipelineParams(k=32))
    assert circular_correlation(emb.angle(), 2 * np.pi * t) >= 0.9
    # walking once around the latent circle winds the embedding once
    theta = np.unwrap(emb.angle()[np.argsort(t)])
    winding = (theta[-1] - theta[0] + np.angle(np.exp(1j * (theta[0] - theta[-1])))) / (2 * np.pi)
    assert abs(round(winding)) == 1


@pytest.fixture(scope="module")
def small_tori():
    return generate_tori_dataset(800, seed=3)


def test_small_tori_common_variable(small_tori):
    s1, s2 = small_tori
    emb = common_embedding(s1, s2, PRESETS["tori"])
    assert circular_correlation(emb.angle(), 2 * np.pi * s1.hidden_truth[:, 0]) >= 0.9


def test_sensor_order_does_not_matter(small_tori):
    s1, s2 = small_tori
    a = common_embedding(s1, s2, PRESETS["tori"])
    b = common_embedding(s2, s1, PRESETS["tori"])
    assert circular_correlation(a.angle(), b.angle()) >= 0.9


def test_surrogate_common_frequency():
    rate, hop = 1000.0, 16
    ch1, ch2 = surrogate_ecg(12000, rate, 2.0, 3.4, seed=1)
    s1, s2 = lag_map(ch1, 256, hop=hop), lag_map(ch2, 256, hop=hop, sensor_id=2)
    emb = common_embedding(s1, s2, PRESETS["ecg"])
    peak = dft_peak(emb.coords[:, 0], sample_period=hop / rate)
    bin_width = rate / hop / s1.n
    assert abs(peak.frequency - 2.0) <= bin_width
