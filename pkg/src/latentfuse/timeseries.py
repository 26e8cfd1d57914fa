"""Lag maps, two-channel CSV ingestion and a synthetic maternal/fetal
surrogate."""

import csv
from pathlib import Path

import numpy as np

from .errors import FormatError, ParameterError
from .kernels import SampleSet
from .synthetic import make_rng

TIME_COLUMNS = ("t", "time")


def segment_starts(length, seg_len, overlap=0, hop=None):
    """Start indices of the lag-map segments.

    Consecutive segments share ``overlap`` samples (hop ``seg_len - overlap``)
    unless ``hop`` is given explicitly.
    """
    if int(seg_len) != seg_len or seg_len < 1:
        raise ParameterError(f"seg_len must be a positive integer, got {seg_len}")
    if hop is None:
        if not 0 <= overlap < seg_len:
            raise ParameterError(f"overlap must lie in [0, seg_len), got {overlap} with seg_len {seg_len}")
        hop = seg_len - overlap
    elif int(hop) != hop or hop < 1:
        raise ParameterError(f"hop must be a positive integer, got {hop}")
    if seg_len > length:
        raise ParameterError(f"segment length {seg_len} exceeds signal length {length}")
    count = (length - seg_len) // hop + 1
    return np.arange(count) * hop


def lag_map(signal, seg_len, overlap=0, hop=None, sensor_id=1):
    """Overlapping windows of ``signal``, one mean-subtracted window per row."""
    x = np.asarray(signal, dtype=np.float64).ravel()
    starts = segment_starts(x.size, seg_len, overlap, hop)
    rows = np.lib.stride_tricks.sliding_window_view(x, seg_len)[starts]
    rows = rows - rows.mean(axis=1, keepdims=True)
    return SampleSet(rows, sensor_id=sensor_id)


def load_two_channel_csv(path, sample_rate=None):
    """Read ``t,ch1,ch2`` or ``ch1,ch2`` (header required).

    Returns ``(ch1, ch2, sample_rate)``. The rate comes from the ``t`` column
    when present, otherwise from ``sample_rate``.
    """
    path = Path(path)
    with path.open(newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise FormatError("file is empty; a header row is required", line=1)
    header = [h.strip() for h in rows[0]]
    try:
        [float(h) for h in header]
    except ValueError:
        pass
    else:
        raise FormatError("missing header row", line=1)
    has_time = header[0].lower() in TIME_COLUMNS
    channels = len(header) - int(has_time)
    if channels != 2:
        raise FormatError(f"expected 2 channel columns, header has {channels}", line=1)
    values = []
    for lineno, row in enumerate(rows[1:], start=2):
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != len(header):
            raise FormatError(f"expected {len(header)} fields, got {len(row)}", line=lineno)
        try:
            values.append([float(c) for c in row])
        except ValueError:
            raise FormatError(f"non-numeric field in {row!r}", line=lineno) from None
    if not values:
        raise FormatError("no samples after the header (empty signal)", line=2)
    data = np.array(values)
    if not np.all(np.isfinite(data)):
        raise FormatError("non-finite value in signal")
    if has_time:
        if data.shape[0] < 2:
            raise FormatError("need at least two samples to infer the rate from t")
        step = np.median(np.diff(data[:, 0]))
        if not step > 0:
            raise FormatError("time column is not increasing")
        rate = 1.0 / step
        if sample_rate is not None and not np.isclose(rate, sample_rate, rtol=1e-6):
            raise ParameterError(f"sample rate {sample_rate} contradicts time column ({rate:g})")
        data = data[:, 1:]
    else:
        if sample_rate is None:
            raise ParameterError("no time column; pass the sample rate explicitly")
        rate = float(sample_rate)
    return data[:, 0].copy(), data[:, 1].copy(), float(rate)


def write_columns(path, header, columns, time=None):
    """Write equal-length columns as CSV with 17 significant digits."""
    cols = [np.asarray(c).ravel() for c in columns]
    names = list(header)
    if time is not None:
        cols.insert(0, np.asarray(time).ravel())
        names.insert(0, "t")
    table = np.column_stack(cols) if cols else np.empty((0, 0))
    with Path(path).open("w", newline="") as fh:
        fh.write(",".join(names) + "\n")
        for row in table:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def _fmt(v):
    if float(v).is_integer() and abs(v) < 2**53:
        return str(int(v))
    return f"{v:.17g}"


def pulse_train(n_samples, rate, freq, phase, width):
    """Unit Gaussian pulses of std ``width`` seconds at ``phase + k / freq``."""
    t = np.arange(n_samples) / rate
    period = 1.0 / freq
    offset = (t - phase) % period
    dist = np.minimum(offset, period - offset)
    return np.exp(-0.5 * (dist / width) ** 2)


def surrogate_ecg(n_samples, rate, common_freq, specific_freq, seed=0, noise=0.05,
                  specific_amp=0.3, common_width=0.012, specific_width=0.008):
    """Two-channel stand-in for thorax/abdomen recordings.

    ch2 (thorax) carries the common pulse train plus noise; ch1 (abdomen)
    carries the same train, a weaker train at ``specific_freq`` and its own
    noise. Pulse phases and noise depend only on ``seed``.
    """
    nyquist = rate / 2
    if not (0 < common_freq < nyquist and 0 < specific_freq < nyquist):
        raise ParameterError(f"pulse frequencies must lie in (0, {nyquist}) to avoid aliasing")
    if np.isclose(common_freq, specific_freq):
        raise ParameterError("common and specific frequencies must differ")
    rng = make_rng(seed)
    phase_c = rng.random() / common_freq
    phase_s = rng.random() / specific_freq
    common = pulse_train(n_samples, rate, common_freq, phase_c, common_width)
    specific = specific_amp * pulse_train(n_samples, rate, specific_freq, phase_s, specific_width)
    noise_1 = noise * rng.standard_normal(n_samples)
    noise_2 = noise * rng.standard_normal(n_samples)
    return common + specific + noise_1, common + noise_2
