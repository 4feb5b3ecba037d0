"""Command-line entry point: ``rosenthal <command> [options]``.

Exit codes: 0 success, 1 configuration or usage error, 2 a bound was
violated by an exact gap.
"""

from __future__ import annotations

import argparse
import sys
from importlib import resources

from . import __version__
from .bounds import GrowthSpec, moment_gap_bound
from .combinatorics import gaussian_moment, moments_from_cumulants
from .exact_models import ModelKind, ModelSpec, default_regime, model_cumulants, model_gap_bound, standardized_cumulants, standardized_gap_exact
from .harness import ConfigError, emit_report, load_config, run_experiment, soundness_violations
from .simulators import MAX_ENUMERATE_N, enumerate_pair_partitions_crossings

EXIT_OK, EXIT_CONFIG, EXIT_UNSOUND = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    # usage errors share the config-error exit code; 2 is reserved
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def _config_arg(sub):
    sub.add_argument("--config", help="experiment TOML file, or builtin:<name> for a shipped config")
    sub.add_argument("--seed", type=int, help="override the config's master seed")
    sub.add_argument("--out", help="output file (default: stdout)")
    sub.add_argument("--format", choices=("csv", "json"), default="csv")
    sub.add_argument("--threads", type=int, default=1, help="worker threads across grid points")


def _model_args(sub):
    sub.add_argument("--model", choices=[k.value for k in ModelKind])
    sub.add_argument("--n", type=int)
    sub.add_argument("--p", type=int)
    sub.add_argument("--n2", type=int)
    sub.add_argument("--beta", type=float, default=1.0)
    sub.add_argument("--kmax", type=int, default=8)


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="rosenthal", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    subs = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = subs.add_parser("exact", help="exact cumulant and moment tables")
    _config_arg(s)
    _model_args(s)

    s = subs.add_parser("bound", help="evaluate the moment-gap bound")
    _config_arg(s)
    _model_args(s)
    s.add_argument("--delta", type=float, help="unit-constant bound at this Δ instead of a model")
    s.add_argument("--gamma", type=float, default=0.0)
    s.add_argument("--factorial", action="store_true", help="factorial-form constants (j!)^(1+γ)")

    s = subs.add_parser("simulate", help="Monte Carlo rows of a config")
    _config_arg(s)

    s = subs.add_parser("report", help="exact and Monte Carlo rows with bounds and decay fits")
    _config_arg(s)

    s = subs.add_parser("enumerate", help="exact crossing distribution of pair partitions")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--out")
    return ap


def _load(args):
    src = args.config
    if src is None:
        raise ConfigError("--config is required")
    if src.startswith("builtin:"):
        name = src.split(":", 1)[1]
        ref = resources.files("rosenthal") / "configs" / f"{name}.toml"
        if not ref.is_file():
            raise ConfigError(f"no shipped config named {name!r}")
        with resources.as_file(ref) as path:
            cfg = load_config(path)
    else:
        cfg = load_config(src)
    if args.seed is not None:
        if not 0 <= args.seed < 2**64:
            raise ConfigError("--seed must be an unsigned 64-bit integer")
        cfg = cfg.with_seed(args.seed)
    if args.threads < 1:
        raise ConfigError("--threads must be >= 1")
    return cfg


def _write(text: str, out) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def _run_config(args, paths) -> int:
    cfg = _load(args)
    rows = run_experiment(cfg, threads=args.threads, paths=paths)
    if not rows:
        raise ConfigError(f"config has no {'/'.join(paths)} entries")
    text = emit_report(rows, args.format, args.out, cfg)
    if args.out is None:
        sys.stdout.write(text)
    for r in rows:
        if r.error:
            print(f"warning: {r.model} n={r.n} k={r.k}: {r.error}", file=sys.stderr)
    bad = soundness_violations(rows)
    for r in bad:
        print(f"VIOLATION: {r.model} n={r.n} p={r.p} k={r.k}: gap {r.gap!r} > bound {r.bound!r}", file=sys.stderr)
    return EXIT_UNSOUND if bad else EXIT_OK


def _model_from_args(args) -> ModelSpec:
    if args.model is None or args.n is None:
        raise ConfigError("give --config, or --model and --n")
    try:
        return ModelSpec(args.model, args.n, args.p, args.n2, args.beta)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def _cmd_exact(args) -> int:
    if args.config:
        return _run_config(args, ("exact",))
    m = _model_from_args(args)
    if not 3 <= args.kmax <= 20:
        raise ConfigError("--kmax must lie in 3..20")
    cum = model_cumulants(m, args.kmax)
    std = standardized_cumulants(m, args.kmax)
    mom = moments_from_cumulants(std).floats()
    lines = ["j,cumulant,standardized_cumulant,standardized_moment,gaussian_moment,gap"]
    for j in range(1, args.kmax + 1):
        gap = format(abs(float(standardized_gap_exact(m, j))), ".17g") if j >= 3 else ""
        lines.append(f"{j},{cum[j - 1]:.17g},{std[j - 1]:.17g},{mom[j - 1]:.17g},{gaussian_moment(j)},{gap}")
    _write("\n".join(lines) + "\n", args.out)
    return EXIT_OK


def _cmd_bound(args) -> int:
    if args.config:
        return _run_config(args, ("exact",))
    lines = ["k,gap,bound,delta,satisfied"]
    if args.delta is not None:
        try:
            spec = GrowthSpec.unit(args.delta, args.gamma, max(args.kmax, 3), args.factorial)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        for k in range(3, args.kmax + 1):
            lines.append(f"{k},,{moment_gap_bound(k, spec):.17g},{spec.delta:.17g},")
        _write("\n".join(lines) + "\n", args.out)
        return EXIT_OK
    m = _model_from_args(args)
    regime = default_regime(m)
    bad = False
    for k in range(3, args.kmax + 1):
        gap = abs(float(standardized_gap_exact(m, k)))
        bound, delta = model_gap_bound(m, k, regime)
        ok = gap <= bound
        bad |= not ok
        lines.append(f"{k},{gap:.17g},{bound:.17g},{delta:.17g},{'true' if ok else 'false'}")
    _write("\n".join(lines) + "\n", args.out)
    return EXIT_UNSOUND if bad else EXIT_OK


def _cmd_enumerate(args) -> int:
    if not 1 <= args.n <= MAX_ENUMERATE_N:
        raise ConfigError(f"--n must lie in 1..{MAX_ENUMERATE_N}")
    dist = enumerate_pair_partitions_crossings(args.n)
    lines = ["crossings,count"] + [f"{c},{w}" for c, w in sorted(dist.items())]
    _write("\n".join(lines) + "\n", args.out)
    return EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "exact":
            return _cmd_exact(args)
        if args.command == "bound":
            return _cmd_bound(args)
        if args.command == "simulate":
            return _run_config(args, ("mc",))
        if args.command == "report":
            return _run_config(args, ("exact", "mc"))
        return _cmd_enumerate(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
