"""Command-line front end.

Exit codes: 0 success, 2 usage / parameter / format errors, 3 numerical
failure (including a failed validation threshold).
"""

import argparse
import os
import sys
from pathlib import Path

import numpy as np

from . import _accel
from .errors import LatentFuseError, NumericalError
from .params import PRESETS, PipelineParams
from .pipeline import analyze
from .synthetic import GEOMETRIES, TorusParams, generate_tori_dataset
from .timeseries import lag_map, load_two_channel_csv, segment_starts, surrogate_ecg, write_columns
from .validation import circular_correlation, run_suite

EXIT_OK, EXIT_USAGE, EXIT_NUMERICAL = 0, 2, 3


class UsageError(Exception):
    pass


def _add_pipeline_flags(p, preset):
    p.add_argument("--k", type=int, default=preset.k, help="neighbors per adaptive kernel scale")
    p.add_argument("--m-ad", type=int, default=preset.m_ad, help="power of the alternating kernel")
    p.add_argument("--m", type=int, default=preset.m, help="eigenvalue power in the embedding")
    p.add_argument("--d", type=int, default=preset.d, help="embedding dimension")
    p.add_argument("--q", type=int, default=preset.q, help="neighborhood size in the common embedding")
    p.add_argument("--tau", type=float, default=preset.tau, help="relative pseudo-inverse cutoff")
    p.add_argument("--rank", type=int, default=preset.rank, help="fixed pseudo-inverse rank (overrides --tau)")
    p.add_argument("--global-eps", type=float, default=preset.global_eps, help="fixed kernel epsilon")
    p.add_argument("--center", action=argparse.BooleanOptionalAction, default=preset.center,
                   help="subtract neighborhood means in the Mahalanobis form")


def _params(args):
    return PipelineParams(k=args.k, m_ad=args.m_ad, m=args.m, d=args.d, q=args.q, tau=args.tau,
                          rank=args.rank, global_eps=args.global_eps, center=args.center)


def build_parser():
    parser = argparse.ArgumentParser(prog="latentfuse", description=__doc__.splitlines()[0])
    parser.add_argument("--threads", type=int, default=None,
                        help="cap worker threads (falls back to LATENTFUSE_THREADS)")
    parser.add_argument("--config", type=Path, default=None,
                        help="key=value file mirroring the flags; explicit flags win")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("tori", help="two-tori synthetic experiment")
    p.add_argument("--n", type=int, default=3000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--geometry", choices=GEOMETRIES, default="standard")
    p.add_argument("--R", type=float, default=10.0)
    p.add_argument("--r1", type=float, default=4.0)
    p.add_argument("--r2", type=float, default=2.0)
    p.add_argument("--out", type=Path, required=True)
    _add_pipeline_flags(p, PRESETS["tori"])
    p.set_defaults(func=cmd_tori)

    p = sub.add_parser("fuse", help="run the pipeline on a two-channel CSV recording")
    p.add_argument("--input", type=Path, required=True)
    p.add_argument("--sample-rate", type=float, default=None, help="needed when the CSV has no t column")
    p.add_argument("--seg-len", type=int, default=256)
    p.add_argument("--overlap", type=int, default=16)
    p.add_argument("--hop", type=int, default=None, help="segment hop; overrides --overlap")
    p.add_argument("--out", type=Path, required=True)
    _add_pipeline_flags(p, PRESETS["ecg"])
    p.set_defaults(func=cmd_fuse)

    p = sub.add_parser("validate", help="numerical checks of the local-geometry identities")
    p.add_argument("--suite", choices=("thm1", "thm2", "all"), default="all")
    p.add_argument("--trials", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--csv", type=Path, default=None, help="also write pass/fail lines as CSV")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("surrogate", help="write a synthetic two-channel recording")
    p.add_argument("--out", type=Path, required=True)
    p.add_argument("--duration", type=float, default=33.0)
    p.add_argument("--rate", type=float, default=1000.0)
    p.add_argument("--common-freq", type=float, default=2.0)
    p.add_argument("--specific-freq", type=float, default=3.4)
    p.add_argument("--noise", type=float, default=0.05)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_surrogate)
    return parser


def read_config(path):
    """Parse ``key=value`` lines; ``#`` starts a comment."""
    values = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected key=value")
        key, value = (part.strip() for part in line.split("=", 1))
        values[key.lstrip("-").replace("-", "_")] = value
    return values


def _apply_config(parser, argv, config):
    # re-parse with config values injected as defaults of the chosen subcommand
    probe = parser.parse_args(argv)
    subparser = parser._subparsers._group_actions[0].choices[probe.command]
    actions = {a.dest: a for a in subparser._actions + parser._actions}
    defaults = {}
    for key, value in config.items():
        action = actions.get(key)
        if action is None or key in ("config", "func", "help"):
            raise UsageError(f"unknown config key {key!r} for '{probe.command}'")
        if isinstance(action, argparse.BooleanOptionalAction):
            lowered = value.lower()
            if lowered not in ("true", "false", "1", "0", "yes", "no"):
                raise UsageError(f"config key {key!r} expects a boolean, got {value!r}")
            defaults[key] = lowered in ("true", "1", "yes")
        elif action.type is not None and value.lower() not in ("none", ""):
            try:
                defaults[key] = action.type(value)
            except ValueError:
                raise UsageError(f"config key {key!r}: bad value {value!r}") from None
        else:
            defaults[key] = None if value.lower() in ("none", "") else value
    for key, value in defaults.items():
        owner = parser if actions[key] in parser._actions else subparser
        owner.set_defaults(**{key: value})
    return parser.parse_args(argv)


def _prepare_out(path):
    try:
        path.mkdir(parents=True, exist_ok=True)
        probe = path / ".write-test"
        probe.write_text("")
        probe.unlink()
    except OSError as exc:
        raise UsageError(f"cannot write to output directory {path}: {exc}") from exc


def _embedding_columns(prefix, emb):
    return [f"{prefix}{j + 1}" for j in range(emb.dim)], list(emb.coords.T)


def _write_embedding(path, emb):
    names, cols = _embedding_columns("c", emb)
    write_columns(path, names, cols)


def cmd_tori(args, out=None):
    out = out or sys.stdout
    params = _params(args)
    if args.q > args.n:
        raise UsageError(f"--q {args.q} exceeds --n {args.n}")
    torus = TorusParams(args.R, args.r1, args.r2)
    _prepare_out(args.out)
    s1, s2 = generate_tori_dataset(args.n, args.seed, torus, args.geometry)
    result = analyze(s1, s2, params)
    truth = s1.hidden_truth
    write_columns(args.out / "s1.csv", ["c1", "c2", "c3"], list(s1.data.T))
    write_columns(args.out / "s2.csv", ["c1", "c2", "c3"], list(s2.data.T))
    write_columns(args.out / "truth.csv", ["x", "y", "z"], list(truth.T))
    for name, emb in (("xhat", result.xhat), ("yhat", result.yhat), ("zhat", result.zhat)):
        _write_embedding(args.out / f"{name}.csv", emb)
    lines = [
        "latentfuse tori report",
        f"n={args.n} seed={args.seed} geometry={args.geometry} R={args.R:g} r1={args.r1:g} r2={args.r2:g}",
        "params " + " ".join(f"{k}={v}" for k, v in params.as_dict().items()),
    ]
    for name, emb, col in (("xhat/x", result.xhat, 0), ("yhat/y", result.yhat, 1), ("zhat/z", result.zhat, 2)):
        corr = circular_correlation(emb.angle(), 2 * np.pi * truth[:, col])
        eig = " ".join(f"{v:.10f}" for v in emb.eigvals)
        lines.append(f"circular_correlation {name} {corr:.10f} eigvals {eig}")
    text = "\n".join(lines) + "\n"
    (args.out / "report.txt").write_text(text)
    out.write(text)
    return EXIT_OK


def cmd_fuse(args, out=None):
    out = out or sys.stdout
    params = _params(args)
    ch1, ch2, rate = load_two_channel_csv(args.input, args.sample_rate)
    starts = segment_starts(ch1.size, args.seg_len, args.overlap, args.hop)
    if args.q > starts.size:
        raise UsageError(f"--q {args.q} exceeds the number of segments ({starts.size})")
    _prepare_out(args.out)
    s1 = lag_map(ch1, args.seg_len, args.overlap, args.hop, sensor_id=1)
    s2 = lag_map(ch2, args.seg_len, args.overlap, args.hop, sensor_id=2)
    result = analyze(s1, s2, params)
    seg_cols = [np.arange(starts.size), starts, starts / rate]
    for name, emb in (("xhat", result.xhat), ("yhat", result.yhat), ("zhat", result.zhat)):
        names, cols = _embedding_columns("c", emb)
        write_columns(args.out / f"{name}.csv", ["segment", "start", "t_start"] + names, seg_cols + cols)
    # each sample takes the coordinates of the last segment starting at or before it
    hop = starts[1] - starts[0] if starts.size > 1 else args.seg_len
    n_cover = starts[-1] + args.seg_len
    idx = np.arange(n_cover)
    seg = np.minimum(idx // hop, starts.size - 1)
    names, cols = ["index", "t", "ch1", "ch2", "segment"], [idx, idx / rate, ch1[:n_cover], ch2[:n_cover], seg]
    for prefix, emb in (("x", result.xhat), ("y", result.yhat), ("z", result.zhat)):
        n_, c_ = _embedding_columns(prefix, emb)
        names += n_
        cols += [c[seg] for c in c_]
    write_columns(args.out / "colored_signal.csv", names, cols)
    out.write(
        f"segments={starts.size} seg_len={args.seg_len} hop={hop} rate={rate:g}\n"
        "params " + " ".join(f"{k}={v}" for k, v in params.as_dict().items()) + "\n"
    )
    return EXIT_OK


def cmd_validate(args, out=None):
    out = out or sys.stdout
    if args.trials < 1:
        raise UsageError(f"--trials must be >= 1, got {args.trials}")
    result = run_suite(args.suite, args.trials, args.seed)
    out.write(result.text())
    if args.csv is not None:
        args.csv.write_text(result.csv())
    return EXIT_OK if result.ok else EXIT_NUMERICAL


def cmd_surrogate(args, out=None):
    out = out or sys.stdout
    n = int(round(args.duration * args.rate))
    ch1, ch2 = surrogate_ecg(n, args.rate, args.common_freq, args.specific_freq, args.seed, noise=args.noise)
    args.out.parent.mkdir(parents=True, exist_ok=True)
    write_columns(args.out, ["ch1", "ch2"], [ch1, ch2], time=np.arange(n) / args.rate)
    out.write(f"wrote {n} samples to {args.out}\n")
    return EXIT_OK


def main(argv=None):
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.config is not None:
            args = _apply_config(parser, argv, read_config(args.config))
        threads = args.threads if args.threads is not None else os.environ.get("LATENTFUSE_THREADS")
        if threads not in (None, ""):
            _accel.set_threads(threads)
        return args.func(args)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    except (UsageError, ValueError, OSError) as exc:
        if isinstance(exc, NumericalError):
            print(f"latentfuse: numerical failure: {exc}", file=sys.stderr)
            return EXIT_NUMERICAL
        print(f"latentfuse: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (NumericalError, ArithmeticError, np.linalg.LinAlgError) as exc:
        print(f"latentfuse: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except LatentFuseError as exc:
        print(f"latentfuse: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
