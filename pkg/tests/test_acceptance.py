"""End-to-end acceptance checks, one test per criterion.

Each criterion function returns (ok, detail). Running this file directly
prints one PASS/FAIL line per criterion without pytest.
"""

import math
import random
import subprocess
import sys
import time
from importlib import resources

import numpy as np

from rosenthal.combinatorics import cumulants_from_moments, gaussian_moment, moments_from_cumulants
from rosenthal.estimation import EMPIRICAL, Exact, decay_fit, standardized_gap, standardized_moment, summarize
from rosenthal.exact_models import ModelKind, ModelSpec, model_cumulant, standardized_gap_exact
from rosenthal.harness import load_config, run_experiment, soundness_violations
from rosenthal.rng import substream
from rosenthal.simulators import (
    enumerate_pair_partitions_crossings,
    gnp_triangle_moments_exact,
    sample_gnp_subgraph_count,
    sample_pair_partition_crossings,
    sample_ustatistic,
    sample_wishart_logdet,
    ustat_variance,
)
from rosenthal.specfun import EULER_GAMMA, half_sum_constant, polygamma, polygamma_bound, polygamma_half_sum

SEED = 20250101


def _mean_var_se(x):
    x = np.asarray(x, dtype=float)
    n = x.size
    d2 = (x - x.mean()) ** 2
    return x.mean(), x.std(ddof=1) / math.sqrt(n), x.var(ddof=1), d2.std(ddof=1) / math.sqrt(n)


def _non_increasing_within(vals, ses, z=2.0):
    return all(b <= a + z * math.hypot(sa, sb) for a, b, sa, sb in zip(vals, vals[1:], ses, ses[1:]))


def criterion_1():
    rnd = random.Random(SEED)
    seqs = []
    for _ in range(1000):
        K = rnd.randint(1, 10)
        seqs.append([rnd.uniform(-10, 10) for _ in range(K)])
    t0 = time.perf_counter()
    worst = 0.0
    for c in seqs:
        back = cumulants_from_moments(moments_from_cumulants(c)).floats()
        for a, b in zip(back, c):
            worst = max(worst, abs(a - b) / abs(b) if b else abs(a))
    dt = time.perf_counter() - t0
    return worst <= 1e-10 and dt < 1.0, f"max rel err {worst:.2e}, {dt:.2f} s for 1000 round trips"


def criterion_2():
    cums = [0, 1] + [0] * 10
    m = moments_from_cumulants(cums)
    ok = all(
        m.moment(k) == (0 if k % 2 else math.factorial(k) // (2 ** (k // 2) * math.factorial(k // 2))) == gaussian_moment(k)
        for k in range(1, 13)
    )
    return ok, "moments of (0,1,0,...) equal (k-1)!! / 0 exactly for k <= 12"


def _series(j, z, N=2000):
    k = np.arange(N, dtype=float)
    if j == 0:
        a, b = N + 1.0, N + z
        tail = math.log(b / a) + 0.5 * (1 / a - 1 / b) + (1 / a**2 - 1 / b**2) / 12 - (6 / a**4 - 6 / b**4) / 720
        return -EULER_GAMMA + math.fsum(1.0 / (k + 1) - 1.0 / (k + z)) + tail
    p = j + 1
    x = N + z
    tail = x ** (1 - p) / (p - 1) + 0.5 * x**-p + p * x ** (-p - 1) / 12 - p * (p + 1) * (p + 2) * x ** (-p - 3) / 720
    return (-1) ** (j + 1) * math.factorial(j) * (math.fsum((z + k) ** -p) + tail)


def criterion_3():
    t0 = time.perf_counter()
    r1 = abs(polygamma(1, 1.0) / (math.pi**2 / 6) - 1)
    r2 = abs(polygamma(1, 0.5) / (math.pi**2 / 2) - 1)
    grid = [float(z) for z in np.logspace(-1, 4, 41)]
    worst = max(abs(polygamma(j, z) / _series(j, z) - 1) for j in range(0, 7) for z in grid)
    fine = np.logspace(-1, 4, 400)
    violations = sum(
        1 for j in range(1, 7) for z in fine if abs(polygamma(j, float(z))) > polygamma_bound(j, float(z))
    )
    dt = time.perf_counter() - t0
    ok = r1 <= 1e-12 and r2 <= 1e-12 and worst <= 1e-10 and violations == 0 and dt < 5
    return ok, f"psi'(1) err {r1:.1e}, psi'(1/2) err {r2:.1e}, series max rel {worst:.1e}, {violations} bound violations, {dt:.2f} s"


def criterion_4():
    n = 10**5
    err = polygamma_half_sum(n, 1) - 2 * math.log(n) - half_sum_constant()
    return abs(err) < 1e-3, f"half-sum - 2 log n - c = {err:.2e} at n = 1e5"


def criterion_5():
    t0 = time.perf_counter()
    m = ModelSpec(ModelKind.LAGUERRE, 50, 50)
    x = sample_wishart_logdet(50, 50, substream(SEED, 5), 10**5)
    mean, se_mean, var, se_var = _mean_var_se(x)
    g1, g2, g3 = (model_cumulant(m, j) for j in (1, 2, 3))
    skew, se_skew = standardized_moment(summarize(x, K=3), 3, EMPIRICAL)
    exact_skew = g3 / g2**1.5
    dt = time.perf_counter() - t0
    zs = (abs(mean - g1) / se_mean, abs(var - g2) / se_var, abs(skew - exact_skew) / se_skew)
    ok = max(zs) <= 4 and dt < 10
    return ok, f"|z| for mean/var/skew = {zs[0]:.2f}/{zs[1]:.2f}/{zs[2]:.2f}, {dt:.2f} s"


def criterion_6():
    t0 = time.perf_counter()
    pts = []
    for e in range(6, 13):
        n = 2**e
        p = math.isqrt(n - 1) + 1
        gap = abs(float(standardized_gap_exact(ModelSpec(ModelKind.LAGUERRE, n, p), 4)))
        pts.append((p * n, gap))
    fit = decay_fit(pts)
    dt = time.perf_counter() - t0
    return abs(fit.slope + 1) <= 0.15 and dt < 1, f"slope vs p*n = {fit.slope:.4f}, {dt:.3f} s"


def criterion_7():
    vals = []
    for n in (10**2, 10**3, 10**4, 10**5):
        gap = abs(float(standardized_gap_exact(ModelSpec(ModelKind.LAGUERRE, n, n), 4)))
        vals.append(gap * math.log(n))
    ratio = max(vals) / min(vals)
    return ratio <= 3, "gap*log n = " + ", ".join(f"{v:.3f}" for v in vals) + f"; max/min {ratio:.2f}"


def criterion_8():
    scaled, ratio_last = [], None
    for n in (10, 100, 1000, 10**4):
        m = ModelSpec(ModelKind.CBE, n, beta=2)
        var = model_cumulant(m, 2)
        scaled.append(abs(float(standardized_gap_exact(m, 4))) * var)
        ratio_last = var / (0.5 * math.log(n))
    # bounded: the scaled gap never exceeds its value at the smallest n
    bounded = max(scaled) <= scaled[0]
    close = abs(ratio_last - 1) <= 0.05
    detail = "gap*sigma^2 = " + ", ".join(f"{v:.3f}" for v in scaled) + f"; sigma^2/(log n / 2) = {ratio_last:.4f} at n = 1e4"
    return bounded and close, detail


def criterion_9():
    cfg = load_config(resources.files("rosenthal") / "configs" / "default.toml")
    rows = [r for r in run_experiment(cfg) if 3 <= r.k <= 8]
    bad = soundness_violations(rows)
    errors = [r for r in rows if r.error or r.satisfied is None]
    return not bad and not errors, f"{len(rows)} exact rows, {len(bad)} violations, {len(errors)} unevaluated"


def criterion_10():
    ok_enum = enumerate_pair_partitions_crossings(2) == {0: 2, 1: 1}
    worst = 0.0
    for n in range(2, 9):
        dist = enumerate_pair_partitions_crossings(n)
        tot = sum(dist.values())
        mu = sum(k * w for k, w in dist.items()) / tot
        var = sum(k * k * w for k, w in dist.items()) / tot - mu * mu
        x = sample_pair_partition_crossings(n, substream(SEED, 10, n), 10**5)
        mean, se_mean, v, se_v = _mean_var_se(x)
        worst = max(worst, abs(mean - mu) / se_mean, abs(v - var) / se_v)
    gaps, ses = [], []
    for n in (25, 50, 100):
        dist_mu, dist_var = n * (n - 1) / 6, n * (n - 1) * (n + 3) / 45
        x = sample_pair_partition_crossings(n, substream(SEED, 10, 1000 + n), 10**5)
        g, se = standardized_gap(summarize(x, K=4), 4, Exact(dist_mu, math.sqrt(dist_var)))
        gaps.append(g)
        ses.append(se)
    shrink = _non_increasing_within(gaps, ses)
    detail = (
        f"enum(2) ok={ok_enum}; small-n max |z| {worst:.2f}; |m4-3| at n=25,50,100 = "
        + ", ".join(f"{g:.4f}±{s:.4f}" for g, s in zip(gaps, ses))
    )
    return ok_enum and worst <= 4 and shrink, detail


def criterion_11():
    t0 = time.perf_counter()
    skews, skse, kurts, kuse = [], [], [], []
    for n in (10, 20, 40):
        x = sample_gnp_subgraph_count(n, 0.5, "triangle", substream(SEED, 11, n), 2 * 10**5)
        mu, var = gnp_triangle_moments_exact(n, 0.5)
        s = summarize(x, K=4)
        cs = Exact(mu, math.sqrt(var))
        g3, s3 = standardized_gap(s, 3, cs)
        g4, s4 = standardized_gap(s, 4, cs)
        skews.append(g3)
        skse.append(s3)
        kurts.append(g4)
        kuse.append(s4)
    dt = time.perf_counter() - t0
    ok = _non_increasing_within(skews, skse) and _non_increasing_within(kurts, kuse) and dt < 120
    detail = (
        "|skew| = " + ", ".join(f"{g:.4f}±{s:.4f}" for g, s in zip(skews, skse))
        + "; |kurt-3| = " + ", ".join(f"{g:.4f}±{s:.4f}" for g, s in zip(kurts, kuse))
        + f"; {dt:.1f} s"
    )
    return ok, detail


def criterion_12():
    worst, skews, ses = 0.0, [], []
    for n in (50, 200, 800):
        x = sample_ustatistic(n, "sum_product", substream(SEED, 12, n), 10**5)
        _, _, v, se_v = _mean_var_se(x)
        target = ustat_variance(n, 1.0, 3.0)
        worst = max(worst, abs(v - target) / se_v)
        g, se = standardized_gap(summarize(x, K=3), 3, Exact(0.0, math.sqrt(target)))
        skews.append(g)
        ses.append(se)
    ok = worst <= 4 and _non_increasing_within(skews, ses)
    return ok, f"variance max |z| {worst:.2f}; |skew| = " + ", ".join(f"{g:.4f}±{s:.4f}" for g, s in zip(skews, ses))


def criterion_13(tmpdir):
    def report(out, threads):
        cmd = [sys.executable, "-m", "rosenthal", "report", "--config", "builtin:smoke", "--out", str(out), "--threads", str(threads)]
        return subprocess.run(cmd, capture_output=True, text=True).returncode

    paths = [tmpdir / f"r{i}.csv" for i in range(3)]
    codes = [report(paths[0], 1), report(paths[1], 1), report(paths[2], 8)]
    data = [p.read_bytes() for p in paths]
    ok = codes == [0, 0, 0] and data[0] == data[1] == data[2]
    return ok, f"exit codes {codes}; repeat identical {data[0] == data[1]}; threads 1 vs 8 identical {data[0] == data[2]}"


def _check(number, fn, record, *args):
    ok, detail = fn(*args)
    record(number, ok, detail)
    assert ok, detail


def test_criterion_01_round_trip(record_criterion):
    _check(1, criterion_1, record_criterion)


def test_criterion_02_gaussian_fixed_point(record_criterion):
    _check(2, criterion_2, record_criterion)


def test_criterion_03_polygamma(record_criterion):
    _check(3, criterion_3, record_criterion)


def test_criterion_04_half_sum_constant(record_criterion):
    _check(4, criterion_4, record_criterion)


def test_criterion_05_laguerre_monte_carlo(record_criterion):
    _check(5, criterion_5, record_criterion)


def test_criterion_06_small_p_rate(record_criterion):
    _check(6, criterion_6, record_criterion)


def test_criterion_07_full_rank_rate(record_criterion):
    _check(7, criterion_7, record_criterion)


def test_criterion_08_cbe_variance(record_criterion):
    _check(8, criterion_8, record_criterion)


def test_criterion_09_soundness_ledger(record_criterion):
    _check(9, criterion_9, record_criterion)


def test_criterion_10_crossings(record_criterion):
    _check(10, criterion_10, record_criterion)


def test_criterion_11_triangles(record_criterion):
    _check(11, criterion_11, record_criterion)


def test_criterion_12_ustatistic(record_criterion):
    _check(12, criterion_12, record_criterion)


def test_criterion_13_reproducibility(record_criterion, tmp_path):
    _check(13, criterion_13, record_criterion, tmp_path)


if __name__ == "__main__":
    import tempfile
    from pathlib import Path

    fns = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5, criterion_6, criterion_7,
           criterion_8, criterion_9, criterion_10, criterion_11, criterion_12]
    results = [fn() for fn in fns]
    with tempfile.TemporaryDirectory() as d:
        results.append(criterion_13(Path(d)))
    for i, (ok, detail) in enumerate(results, start=1):
        print(f"criterion {i:>2}: {'PASS' if ok else 'FAIL'}  {detail}")
    sys.exit(0 if all(ok for ok, _ in results) else 1)
