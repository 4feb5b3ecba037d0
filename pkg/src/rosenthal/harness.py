"""Config-driven experiment runner.

A config is a TOML file::

    experiment = "demo"
    seed = 12345
    orders = [3, 4]

    [[exact]]
    model = "LaguerreLogDet"
    n = [100, 1000]
    p_rule = "full"

    [[simulate]]
    model = "GnpSubgraph"
    n = [10, 20]
    p = 0.5
    pattern = "triangle"
    replicates = 20000

See the README for every key. Unknown keys are rejected.
"""

from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, fields
from pathlib import Path
from typing import Any, Sequence

from . import __version__
from .bounds import DnaSpec, bernstein_growth_spec, dna_cumulant_bound, growth_spec_from_cumulant_bounds, moment_gap_bound
from .estimation import EMPIRICAL, Exact, decay_fit, noise_floor_filter, standardized_gap, summarize
from .exact_models import (
    LaguerreRegime,
    ModelKind,
    ModelSpec,
    RegimeTag,
    default_regime,
    model_cumulant,
    model_gap_bound,
    standardized_gap_exact,
)
from .simulators import (
    DEFAULT_KERNEL,
    DISTRIBUTIONS,
    SimKind,
    SimSpec,
    bernstein_constants,
    crossings_moments_exact,
    gnp_triangle_moments_exact,
    run_batch,
    ustat_variance,
)
from .patterns import NAMED_PATTERNS

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

MIN_ORDER, MAX_CONFIG_ORDER = 3, 12
CSV_HEADER = ("model", "n", "p", "beta", "k", "gap", "se", "bound", "delta", "satisfied")
P_RULES = ("full", "sqrt", "proportional", "n_minus_sqrt")
REGIMES = ("auto",) + tuple(t.value for t in RegimeTag)


class ConfigError(ValueError):
    pass


# ------------------------------------------------------------------ config


@dataclass(frozen=True)
class ExactEntry:
    model: ModelKind
    n: tuple[int, ...]
    p: tuple[int, ...] | None
    n2: tuple[int, ...] | None
    beta: float
    regime: str
    c: float | None
    orders: tuple[int, ...]

    def specs(self) -> list[ModelSpec]:
        out = []
        for i, n in enumerate(self.n):
            p = None if self.p is None else self.p[i]
            n2 = None if self.n2 is None else self.n2[i]
            out.append(ModelSpec(self.model, n, p, n2, self.beta))
        return out

    def regime_for(self, m: ModelSpec) -> LaguerreRegime | None:
        if self.regime == "auto":
            return default_regime(m)
        if self.regime == RegimeTag.PROPORTIONAL.value:
            return LaguerreRegime(RegimeTag.PROPORTIONAL, self.c if self.c is not None else m.p / m.n)
        return LaguerreRegime(RegimeTag(self.regime))


@dataclass(frozen=True)
class SimEntry:
    model: SimKind
    n: tuple[int, ...]
    replicates: int
    p: tuple[float, ...] | None
    m: tuple[int, ...] | None
    pattern: str | None
    kernel: str
    dist: str | None
    sigmas: tuple[float, ...] | None
    orders: tuple[int, ...]

    def specs(self, seed: int, entry_index: int) -> list[SimSpec]:
        out = []
        for i, n in enumerate(self.n):
            out.append(
                SimSpec(
                    kind=self.model,
                    n=n,
                    replicates=self.replicates,
                    seed=seed,
                    p=None if self.p is None else self.p[i],
                    m=None if self.m is None else self.m[i],
                    pattern=self.pattern,
                    kernel=self.kernel,
                    dist=self.dist,
                    # a sigma list is repeated cyclically up to n summands
                    sigmas=None if self.sigmas is None else tuple(self.sigmas[t % len(self.sigmas)] for t in range(n)),
                    stream=(entry_index, i),
                )
            )
        return out


@dataclass(frozen=True)
class ExperimentConfig:
    experiment: str
    seed: int
    orders: tuple[int, ...]
    exact: tuple[ExactEntry, ...]
    simulate: tuple[SimEntry, ...]
    raw: dict

    def with_seed(self, seed: int) -> "ExperimentConfig":
        raw = dict(self.raw, seed=seed)
        return parse_config(raw)


def _check_keys(table: dict, allowed: set, where: str) -> None:
    extra = sorted(set(table) - allowed)
    if extra:
        raise ConfigError(f"{where}: unknown key(s) {', '.join(extra)}")


def _int_list(v, where: str) -> tuple[int, ...]:
    vals = v if isinstance(v, list) else [v]
    if not vals:
        raise ConfigError(f"{where}: empty grid")
    for x in vals:
        if isinstance(x, bool) or not isinstance(x, int) or x < 1:
            raise ConfigError(f"{where}: expected positive integers, got {x!r}")
    return tuple(vals)


def _per_point(v, size: int, where: str, cast) -> tuple:
    vals = v if isinstance(v, list) else [v] * size
    if len(vals) != size:
        raise ConfigError(f"{where}: list length {len(vals)} does not match the n grid ({size})")
    try:
        return tuple(cast(x) for x in vals)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{where}: {exc}") from None


def _strict_int(x) -> int:
    if isinstance(x, bool) or not isinstance(x, int):
        raise ValueError(f"expected an integer, got {x!r}")
    return x


def _orders(v, where: str) -> tuple[int, ...]:
    if not isinstance(v, list) or not v:
        raise ConfigError(f"{where}: orders must be a nonempty list")
    for k in v:
        if isinstance(k, bool) or not isinstance(k, int) or not MIN_ORDER <= k <= MAX_CONFIG_ORDER:
            raise ConfigError(f"{where}: orders must lie in {MIN_ORDER}..{MAX_CONFIG_ORDER}, got {k!r}")
    return tuple(sorted(set(v)))


def _apply_p_rule(rule: str, ns: Sequence[int], c, where: str) -> tuple[int, ...]:
    if rule not in P_RULES:
        raise ConfigError(f"{where}: p_rule must be one of {P_RULES}")
    if (rule == "proportional") != (c is not None):
        raise ConfigError(f"{where}: key c is required with p_rule = 'proportional' and only then")
    out = []
    for n in ns:
        if rule == "full":
            out.append(n)
        elif rule == "sqrt":
            out.append(math.isqrt(n - 1) + 1 if n > 1 else 1)
        elif rule == "proportional":
            if not 0 < c < 1:
                raise ConfigError(f"{where}: c must lie in (0, 1)")
            out.append(max(1, math.floor(c * n)))
        else:
            out.append(max(1, n - math.isqrt(n)))
    return tuple(out)


_EXACT_KEYS = {"model", "n", "p", "p_rule", "c", "n2", "beta", "regime", "orders"}
_SIM_KEYS = {"model", "n", "replicates", "p", "p_rule", "c", "m", "density", "pattern", "kernel", "dist", "sigmas", "orders"}


def _parse_exact(t: dict, idx: int, orders) -> ExactEntry:
    where = f"exact[{idx}]"
    if not isinstance(t, dict):
        raise ConfigError(f"{where}: expected a table")
    _check_keys(t, _EXACT_KEYS, where)
    try:
        kind = ModelKind(t.get("model"))
    except ValueError:
        raise ConfigError(f"{where}: model must be one of {[k.value for k in ModelKind]}") from None
    ns = _int_list(t.get("n", []), f"{where}.n")
    if "p" in t and "p_rule" in t:
        raise ConfigError(f"{where}: give p or p_rule, not both")
    c = t.get("c")
    p = None
    if "p_rule" in t:
        p = _apply_p_rule(t["p_rule"], ns, c, where)
    elif "p" in t:
        p = _per_point(t["p"], len(ns), f"{where}.p", _strict_int)
        if c is not None:
            raise ConfigError(f"{where}: c is only used with p_rule = 'proportional'")
    n2 = _per_point(t["n2"], len(ns), f"{where}.n2", _strict_int) if "n2" in t else None
    regime = t.get("regime", "auto")
    if regime not in REGIMES:
        raise ConfigError(f"{where}: regime must be one of {REGIMES}")
    entry = ExactEntry(
        model=kind,
        n=ns,
        p=p,
        n2=n2,
        beta=float(t.get("beta", 1.0)),
        regime=regime,
        c=None if c is None else float(c),
        orders=_orders(t["orders"], f"{where}.orders") if "orders" in t else orders,
    )
    try:
        entry.specs()
    except ValueError as exc:
        raise ConfigError(f"{where}: {exc}") from None
    return entry


def _parse_sim(t: dict, idx: int, orders, seed: int) -> SimEntry:
    where = f"simulate[{idx}]"
    if not isinstance(t, dict):
        raise ConfigError(f"{where}: expected a table")
    _check_keys(t, _SIM_KEYS, where)
    try:
        kind = SimKind(t.get("model"))
    except ValueError:
        raise ConfigError(f"{where}: model must be one of {[k.value for k in SimKind]}") from None
    ns = _int_list(t.get("n", []), f"{where}.n")
    reps = t.get("replicates")
    if isinstance(reps, bool) or not isinstance(reps, int) or reps < 2:
        raise ConfigError(f"{where}: replicates must be an integer >= 2")
    p = m = None
    if kind is SimKind.WISHART:
        if "p" in t and "p_rule" in t:
            raise ConfigError(f"{where}: give p or p_rule, not both")
        if "p_rule" in t:
            p = tuple(float(v) for v in _apply_p_rule(t["p_rule"], ns, t.get("c"), where))
        elif "p" in t:
            p = tuple(float(v) for v in _per_point(t["p"], len(ns), f"{where}.p", _strict_int))
    elif kind is SimKind.GNP and "p" in t:
        p = _per_point(t["p"], len(ns), f"{where}.p", float)
    if kind is SimKind.GNM:
        if ("m" in t) == ("density" in t):
            raise ConfigError(f"{where}: G(n,m) needs exactly one of m / density")
        if "m" in t:
            m = _per_point(t["m"], len(ns), f"{where}.m", _strict_int)
        else:
            dens = float(t["density"])
            m = tuple(round(dens * n * (n - 1) / 2) for n in ns)
    entry = SimEntry(
        model=kind,
        n=ns,
        replicates=reps,
        p=p,
        m=m,
        pattern=t.get("pattern"),
        kernel=t.get("kernel", DEFAULT_KERNEL),
        dist=t.get("dist"),
        sigmas=tuple(float(s) for s in t["sigmas"]) if "sigmas" in t else None,
        orders=_orders(t["orders"], f"{where}.orders") if "orders" in t else orders,
    )
    if entry.pattern is not None and entry.pattern not in NAMED_PATTERNS:
        raise ConfigError(f"{where}: unknown pattern {entry.pattern!r}; known: {sorted(NAMED_PATTERNS)}")
    if entry.sigmas is not None and (not entry.sigmas or min(entry.sigmas) <= 0):
        raise ConfigError(f"{where}: sigmas must be a nonempty list of positive numbers")
    if entry.dist is not None and entry.dist not in DISTRIBUTIONS:
        raise ConfigError(f"{where}: dist must be one of {DISTRIBUTIONS}")
    try:
        entry.specs(seed, idx)
    except ValueError as exc:
        raise ConfigError(f"{where}: {exc}") from None
    return entry


def parse_config(raw: dict) -> ExperimentConfig:
    """Validate a config mapping; raises ConfigError before any work is done."""
    if not isinstance(raw, dict):
        raise ConfigError("config must be a table")
    _check_keys(raw, {"experiment", "seed", "orders", "exact", "simulate"}, "config")
    exp = raw.get("experiment")
    if not isinstance(exp, str) or not exp:
        raise ConfigError("config: experiment id must be a nonempty string")
    seed = raw.get("seed")
    if isinstance(seed, bool) or not isinstance(seed, int) or not 0 <= seed < 2**64:
        raise ConfigError("config: seed must be an unsigned 64-bit integer")
    orders = _orders(raw.get("orders"), "config")
    ex = raw.get("exact", [])
    sim = raw.get("simulate", [])
    if not isinstance(ex, list) or not isinstance(sim, list):
        raise ConfigError("config: exact / simulate must be arrays of tables")
    if not ex and not sim:
        raise ConfigError("config: empty grid (no exact or simulate entries)")
    exact = tuple(_parse_exact(t, i, orders) for i, t in enumerate(ex))
    simulate = tuple(_parse_sim(t, i, orders, seed) for i, t in enumerate(sim))
    return ExperimentConfig(exp, seed, orders, exact, simulate, raw)


def load_config(path) -> ExperimentConfig:
    path = Path(path)
    try:
        with path.open("rb") as fh:
            raw = tomllib.load(fh)
    except OSError as exc:
        raise ConfigError(f"{path}: {exc.strerror or exc}") from None
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: {exc}") from None
    try:
        return parse_config(raw)
    except ConfigError as exc:
        raise ConfigError(f"{path}: {exc}") from None


# -------------------------------------------------------------------- rows


@dataclass(frozen=True)
class ReportRow:
    """One (model, grid point, order) result.

    ``path`` is "exact" or "mc". ``satisfied`` is None when no bound is
    available; ``error`` carries a per-row failure message.
    """

    model: str
    n: int
    p: float | None
    beta: float | None
    k: int
    gap: float | None
    se: float | None
    bound: float | None
    delta: float | None
    satisfied: bool | None
    path: str = "exact"
    error: str | None = None
    entry: int = 0

    def sort_key(self):
        return (self.path != "exact", self.entry, self.n, -1 if self.p is None else self.p, self.model, self.k)


def _model_label(m: ModelSpec) -> str:
    if m.kind is ModelKind.JACOBI:
        return f"{m.kind.value}[n2={m.n2}]"
    return m.kind.value


def _exact_rows(entry: ExactEntry, idx: int, m: ModelSpec) -> list[ReportRow]:
    rows = []
    label = _model_label(m)
    p = None if m.p is None else float(m.p)
    beta = m.beta
    try:
        regime = entry.regime_for(m)
    except ValueError as exc:
        regime, regime_err = None, str(exc)
    else:
        regime_err = None
    for k in entry.orders:
        gap = bound = delta = None
        err = regime_err
        try:
            gap = float(abs(standardized_gap_exact(m, k)))
            if err is None:
                bound, delta = model_gap_bound(m, k, regime)
        except (ValueError, KeyError, ArithmeticError) as exc:
            err = f"{type(exc).__name__}: {exc}"
        sat = None if gap is None or bound is None else gap <= bound
        rows.append(ReportRow(label, m.n, p, beta, k, gap, None, bound, delta, sat, "exact", err, idx))
    return rows


def _mc_standardization(s: SimSpec):
    """Exact center/scale when a closed form exists, else the empirical one."""
    if s.kind is SimKind.GNP and s.pattern == "triangle" and s.n >= 3:
        mu, var = gnp_triangle_moments_exact(s.n, s.p)
        return Exact(mu, math.sqrt(var))
    if s.kind is SimKind.GNP and s.pattern == "edge":
        e = s.n * (s.n - 1) / 2
        return Exact(e * s.p, math.sqrt(e * s.p * (1 - s.p)))
    if s.kind is SimKind.CROSSINGS and s.n >= 2:
        mu, var = crossings_moments_exact(s.n)
        return Exact(mu, math.sqrt(var))
    if s.kind is SimKind.WISHART:
        m = ModelSpec(ModelKind.LAGUERRE, s.n, int(s.p))
        return Exact(model_cumulant(m, 1), math.sqrt(model_cumulant(m, 2)))
    if s.kind is SimKind.USTAT and s.kernel == "sum_product":
        return Exact(0.0, math.sqrt(ustat_variance(s.n, 1.0, 3.0)))
    if s.kind is SimKind.INDEPENDENT:
        return Exact(0.0, 1.0)
    return EMPIRICAL


def _mc_bound(s: SimSpec, k: int) -> tuple[float | None, float | None]:
    """(moment-gap bound, Δ) for models with explicit cumulant control."""
    if s.kind is SimKind.GNP and s.pattern == "triangle" and s.n >= 4:
        _, var = gnp_triangle_moments_exact(s.n, s.p)
        # dependency graph: triangles sharing an edge; max degree 3(n-3)
        dna = DnaSpec(math.comb(s.n, 3), 3 * (s.n - 3) + 1, 1.0, var)
        delta = math.sqrt(dna.n_count / dna.degree)
        spec = growth_spec_from_cumulant_bounds({j: dna_cumulant_bound(j, dna) for j in range(3, k + 1)}, delta)
        return moment_gap_bound(k, spec), delta
    if s.kind is SimKind.WISHART:
        return model_gap_bound(ModelSpec(ModelKind.LAGUERRE, s.n, int(s.p)), k)
    if s.kind is SimKind.INDEPENDENT:
        big_k, gamma = bernstein_constants(s.dist, s.sigmas)
        spec = bernstein_growth_spec(big_k, s.sigmas, gamma, kmax=max(k, 3))
        return moment_gap_bound(k, spec), spec.delta
    return None, None


def _mc_p(s: SimSpec) -> float | None:
    if s.kind is SimKind.GNM:
        return float(s.m)
    return None if s.p is None else float(s.p)


def _mc_rows(entry: SimEntry, idx: int, s: SimSpec) -> list[ReportRow]:
    rows = []
    p = _mc_p(s)
    try:
        batch = run_batch(s, threads=1)
        summary = summarize(batch, K=max(entry.orders))
        cs = _mc_standardization(s)
    except (ValueError, ArithmeticError, MemoryError) as exc:
        err = f"{type(exc).__name__}: {exc}"
        return [ReportRow(s.label, s.n, p, None, k, None, None, None, None, None, "mc", err, idx) for k in entry.orders]
    for k in entry.orders:
        gap = se = bound = delta = None
        err = None
        try:
            gap, se = standardized_gap(summary, k, cs)
            bound, delta = _mc_bound(s, k)
        except (ValueError, KeyError, ArithmeticError) as exc:
            err = f"{type(exc).__name__}: {exc}"
        sat = None if gap is None or bound is None else gap <= bound
        rows.append(ReportRow(s.label, s.n, p, None, k, gap, se, bound, delta, sat, "mc", err, idx))
    return rows


def run_experiment(config: ExperimentConfig, threads: int = 1, paths: Sequence[str] = ("exact", "mc")) -> list[ReportRow]:
    """All rows of the experiment, sorted canonically.

    Grid points run concurrently when ``threads > 1``; Monte Carlo
    substreams are addressed by (entry, grid point, block), so the rows
    do not depend on ``threads``.
    """
    tasks = []
    if "exact" in paths:
        for i, e in enumerate(config.exact):
            for m in e.specs():
                tasks.append((_exact_rows, e, i, m))
    if "mc" in paths:
        for i, e in enumerate(config.simulate):
            for s in e.specs(config.seed, i):
                tasks.append((_mc_rows, e, i, s))

    def work(t):
        fn, e, i, spec = t
        return fn(e, i, spec)

    if threads > 1 and len(tasks) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(work, tasks))
    else:
        results = [work(t) for t in tasks]
    rows = [r for chunk in results for r in chunk]
    rows.sort(key=ReportRow.sort_key)
    return rows


def soundness_violations(rows: Sequence[ReportRow]) -> list[ReportRow]:
    return [r for r in rows if r.path == "exact" and r.satisfied is False]


# ------------------------------------------------------------------ decay fits


@dataclass(frozen=True)
class DecaySummary:
    model: str
    path: str
    entry: int
    k: int
    x: str
    slope: float | None
    intercept: float | None
    r_squared: float | None
    points: int
    dropped: int


def decay_summaries(rows: Sequence[ReportRow]) -> list[DecaySummary]:
    """Log-log fits of gap against Δ (or n when Δ is unknown), per (entry, model, k).

    Monte Carlo points with gap < 3·SE are dropped first.
    """
    groups: dict[tuple, list[ReportRow]] = {}
    for r in rows:
        if r.gap is None:
            continue
        groups.setdefault((r.path, r.entry, r.model, r.k), []).append(r)
    out = []
    for (path, entry, model, k), rs in sorted(groups.items(), key=lambda kv: (kv[0][0] != "exact",) + kv[0][1:]):
        if len(rs) < 3:
            continue
        use_delta = all(r.delta is not None and r.delta > 0 for r in rs)
        triples = [(r.delta if use_delta else float(r.n), r.gap, r.se or 0.0) for r in rs]
        kept, dropped = noise_floor_filter(triples) if path == "mc" else ([t for t in triples if t[1] > 0], [t for t in triples if not t[1] > 0])
        if len(kept) >= 3:
            fit = decay_fit([(x, g) for x, g, _ in kept])
            vals = (fit.slope, fit.intercept, fit.r_squared)
        else:
            vals = (None, None, None)
        out.append(DecaySummary(model, path, entry, k, "delta" if use_delta else "n", *vals, len(kept), len(dropped)))
    return out


# ------------------------------------------------------------------ output


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return format(v, ".17g")
    return str(v)


def rows_to_csv(rows: Sequence[ReportRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in rows:
        w.writerow([_fmt(getattr(r, f)) for f in CSV_HEADER])
    return buf.getvalue()


def decay_to_csv(fits: Sequence[DecaySummary]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    names = [f.name for f in fields(DecaySummary)]
    w.writerow(names)
    for d in fits:
        w.writerow([_fmt(getattr(d, f)) for f in names])
    return buf.getvalue()


def _json_safe(v):
    if isinstance(v, float) and not math.isfinite(v):
        return None
    return v


def rows_to_json(rows: Sequence[ReportRow], config: ExperimentConfig | None = None) -> str:
    doc: dict[str, Any] = {
        "version": __version__,
        "experiment": None if config is None else config.experiment,
        "config": None if config is None else config.raw,
        "rows": [{k: _json_safe(v) for k, v in asdict(r).items()} for r in rows],
        "decay_fits": [{k: _json_safe(v) for k, v in asdict(d).items()} for d in decay_summaries(rows)],
    }
    return json.dumps(doc, indent=2, sort_keys=False, allow_nan=False) + "\n"


def rows_from_json(text: str) -> list[ReportRow]:
    doc = json.loads(text)
    return [ReportRow(**r) for r in doc["rows"]]


def emit_report(rows: Sequence[ReportRow], fmt: str, path=None, config: ExperimentConfig | None = None) -> str:
    """Serialize rows as CSV or JSON; write to ``path`` when given.

    With CSV and a path, the decay-fit summary goes to a sidecar file
    ``<path stem>.decay.csv`` so the main file keeps its fixed header.
    Returns the main document text.
    """
    if not rows:
        raise ValueError("no rows to emit")
    fmt = fmt.lower()
    if fmt == "csv":
        text = rows_to_csv(rows)
    elif fmt == "json":
        text = rows_to_json(rows, config)
    else:
        raise ValueError(f"format must be csv or json, got {fmt!r}")
    if path is not None:
        path = Path(path)
        try:
            path.write_text(text, encoding="utf-8", newline="")
            if fmt == "csv":
                fits = decay_summaries(rows)
                if fits:
                    side = path.with_name(path.stem + ".decay.csv")
                    side.write_text(decay_to_csv(fits), encoding="utf-8", newline="")
        except OSError as exc:
            raise OSError(f"cannot write report to {path}: {exc.strerror or exc}") from exc
    return text
