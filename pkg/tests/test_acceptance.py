"""Acceptance criteria, one PASS/FAIL line each.

Run with ``pytest tests/test_acceptance.py -s`` to see the lines, or
directly as ``python3 tests/test_acceptance.py``.
"""

import io
import sys
import tempfile
import time
from contextlib import redirect_stdout
from pathlib import Path

import numpy as np
import pytest

from latentfuse import PRESETS, analyze, column_normalize, gaussian_affinity
from latentfuse.alternating import ad_kernel, sensor_kernel
from latentfuse.cli import main as cli_main
from latentfuse.kernels import SampleSet, adaptive_scales, pairwise_sq_dists
from latentfuse.specific import local_stats, mahalanobis_affinity, neighborhoods
from latentfuse.synthetic import make_rng
from latentfuse.timeseries import lag_map, segment_starts, surrogate_ecg
from latentfuse.validation import dft_peak, run_suite

_TORI_ARGS = ["tori", "--n", "3000", "--seed", "0", "--q", "11", "--d", "2"]
_cache = {}


def _run_cli(args):
    buf = io.StringIO()
    with redirect_stdout(buf):
        code = cli_main(args)
    return code, buf.getvalue()


def _tori_report(tag):
    out = Path(tempfile.mkdtemp(prefix=f"tori-{tag}-"))
    start = time.perf_counter()
    code, _ = _run_cli(_TORI_ARGS + ["--out", str(out)])
    return code, (out / "report.txt").read_bytes() if code == 0 else b"", time.perf_counter() - start


def criterion_1():
    code, report, seconds = _tori_report("a")
    _cache["tori_report"] = report
    corr = {}
    for line in report.decode().splitlines():
        if line.startswith("circular_correlation"):
            parts = line.split()
            corr[parts[1]] = float(parts[2])
    ok = code == 0 and len(corr) == 3 and all(v >= 0.9 for v in corr.values()) and seconds <= 300
    detail = " ".join(f"{k}={v:.4f}" for k, v in corr.items())
    return ok, f"tori N=3000 {detail} (>= 0.9), {seconds:.1f}s (<= 300s)"


def _suite(name):
    start = time.perf_counter()
    result = run_suite(name, trials=20, seed=0)
    seconds = time.perf_counter() - start
    checks = "; ".join(label for label, _ in result.checks)
    return result.ok and seconds <= 10, f"{checks}; {seconds:.2f}s (<= 10s)"


def criterion_2():
    return _suite("thm1")


def criterion_3():
    return _suite("thm2")


def criterion_4():
    start = time.perf_counter()
    rng = make_rng(2024)
    worst_sum, worst_sym, worst_diag = 0.0, 0.0, 0.0
    for _ in range(100):
        n = int(rng.integers(20, 120))
        s1 = SampleSet(rng.standard_normal((n, int(rng.integers(1, 6)))))
        s2 = SampleSet(rng.standard_normal((n, int(rng.integers(1, 6)))))
        d2 = pairwise_sq_dists(s1)
        w = gaussian_affinity(d2, adaptive_scales(d2, min(16, n - 1)))
        k1, k2 = column_normalize(w), sensor_kernel(s2)
        ad = ad_kernel(k1, k2)
        coords = rng.random((n, 2))
        stats = local_stats(s1, neighborhoods(coords, min(11, n))).truncate(1e-2)
        wm = mahalanobis_affinity(s1, stats)
        km = column_normalize(wm)
        for k in (k1, k2, ad, km):
            worst_sum = max(worst_sum, np.max(np.abs(k.k.sum(axis=0) - 1.0)))
        for a in (w, wm):
            worst_sym = max(worst_sym, np.max(np.abs(a - a.T)))
            worst_diag = max(worst_diag, np.max(np.abs(np.diag(a) - 1.0)))
    seconds = time.perf_counter() - start
    ok = worst_sum <= 1e-10 and worst_sym <= 1e-12 and worst_diag <= 1e-12 and seconds <= 30
    return ok, (f"100 datasets: column-sum dev {worst_sum:.1e} (<= 1e-10), asymmetry {worst_sym:.1e}, "
                f"diagonal dev {worst_diag:.1e} (<= 1e-12), {seconds:.1f}s (<= 30s)")


def criterion_5():
    signal = make_rng(5).normal(3.0, 1.0, 32760)
    s = lag_map(signal, 256, overlap=16)
    starts = segment_starts(32760, 256, 16)
    worst = float(np.max(np.abs(s.data.mean(axis=1))))
    ok = s.n == 136 and starts[-1] == 135 * 240 and worst <= 1e-12
    return ok, f"segments={s.n} (== 136), max |segment mean| {worst:.1e} (<= 1e-12)"


def criterion_6():
    rate, hop, seconds_of_signal = 1000.0, 16, 33.0
    start = time.perf_counter()
    ch1, ch2 = surrogate_ecg(int(rate * seconds_of_signal), rate, 2.0, 3.4, seed=0)
    s1, s2 = lag_map(ch1, 256, hop=hop, sensor_id=1), lag_map(ch2, 256, hop=hop, sensor_id=2)
    res = analyze(s1, s2, PRESETS["ecg"])
    period = hop / rate
    bin_width = 1.0 / (s1.n * period)
    px = dft_peak(res.xhat.coords[:, 0], period)
    py = dft_peak(res.yhat.coords[:, 0], period)
    seconds = time.perf_counter() - start
    ok = abs(px.frequency - 2.0) <= bin_width and abs(py.frequency - 3.4) <= bin_width and seconds <= 120
    return ok, (f"xhat peak {px.frequency:.3f} Hz (2 Hz), yhat peak {py.frequency:.3f} Hz (3.4 Hz), "
                f"bin {bin_width:.4f} Hz, hop {hop}, {seconds:.1f}s (<= 120s)")


def criterion_7():
    first = _cache.get("tori_report")
    if first is None:
        first = _tori_report("a")[1]
    second = _tori_report("b")[1]
    v1 = _run_cli(["validate", "--suite", "all", "--trials", "20", "--seed", "0"])
    v2 = _run_cli(["validate", "--suite", "all", "--trials", "20", "--seed", "0"])
    ok = bool(first) and first == second and v1 == v2
    return ok, f"tori report identical: {first == second}; validate output identical: {v1 == v2}"


CRITERIA = [
    (1, "tori recovery", criterion_1),
    (2, "local covariance oracle", criterion_2),
    (3, "Mahalanobis distance oracle", criterion_3),
    (4, "stochastic-matrix properties", criterion_4),
    (5, "lag-map contract", criterion_5),
    (6, "surrogate two-channel pipeline", criterion_6),
    (7, "determinism", criterion_7),
]


def _line(number, name, ok, detail):
    return f"{'PASS' if ok else 'FAIL'} criterion {number} ({name}): {detail}"


@pytest.mark.parametrize("number,name,func", CRITERIA, ids=[f"criterion_{n}" for n, _, _ in CRITERIA])
def test_criterion(number, name, func, capsys):
    ok, detail = func()
    with capsys.disabled():
        print("\n" + _line(number, name, ok, detail))
    assert ok, detail


if __name__ == "__main__":
    failed = 0
    for number, name, func in CRITERIA:
        ok, detail = func()
        failed += not ok
        print(_line(number, name, ok, detail), flush=True)
    sys.exit(1 if failed else 0)
