"""Empirical moments, cumulants and decay-rate fits for sample batches."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence, Union

import numpy as np

from .combinatorics import cumulants_from_moments, gaussian_moment

MAX_SUMMARY_ORDER = 12
MAX_KSTAT_ORDER = 4


@dataclass(frozen=True)
class SampleSummary:
    """Moments of one sample, orders 1..K.

    Tuples are 0-based by order minus one, so ``central_moments[1]`` is
    the biased variance m_2. ``std_errors`` are batch-means standard
    errors of the empirically standardized moments.
    """

    count: int
    raw_moments: tuple[float, ...]
    central_moments: tuple[float, ...]
    plugin_cumulants: tuple[float, ...]
    k_statistics: tuple[float, ...]
    std_errors: tuple[float, ...]
    mean: float
    # per-batch means of (x - mean)^i, i = 0..K; used to re-standardize
    batch_central: np.ndarray = field(repr=False, compare=False)

    @property
    def order(self) -> int:
        return len(self.raw_moments)

    def central(self, k: int) -> float:
        if k == 0:
            return 1.0
        return 0.0 if k == 1 else self.central_moments[k - 1]


@dataclass(frozen=True)
class Empirical:
    """Standardize with the sample mean and the (biased) sample sd."""


@dataclass(frozen=True)
class Exact:
    """Standardize with known mean and sd."""

    mean: float
    sd: float

    def __post_init__(self):
        if not self.sd > 0:
            raise ValueError(f"sd must be positive, got {self.sd}")


CenterScale = Union[Empirical, Exact]
EMPIRICAL = Empirical()


@dataclass(frozen=True)
class DecayFit:
    """Least-squares fit of log gap = intercept + slope * log x."""

    slope: float
    intercept: float
    r_squared: float
    points: tuple[tuple[float, float], ...]


def k_statistics(n: int, m2: float, m3: float, m4: float, order: int) -> tuple[float, ...]:
    """Unbiased cumulant estimates k_2..k_order from biased central moments.

    Works on floats or Fractions alike.
    """
    ks = []
    if order >= 2:
        ks.append(n * m2 / (n - 1))
    if order >= 3:
        ks.append(n * n * m3 / ((n - 1) * (n - 2)))
    if order >= 4:
        ks.append(n * n * ((n + 1) * m4 - 3 * (n - 1) * m2 * m2) / ((n - 1) * (n - 2) * (n - 3)))
    return tuple(ks)


def _values(batch) -> np.ndarray:
    vals = getattr(batch, "values", batch)
    return np.asarray(vals, dtype=float).ravel()


def summarize(batch, K: int = 4) -> SampleSummary:
    """Moments to order K of a SampleBatch or a 1-d array.

    Central moments come from a shifted two-pass scheme (mean, then a
    correction pass), so adding a large constant to the data leaves them
    essentially unchanged. k-statistics are given for orders up to
    min(4, K, count).
    """
    if not 1 <= K <= MAX_SUMMARY_ORDER:
        raise ValueError(f"K must be in 1..{MAX_SUMMARY_ORDER}, got {K}")
    x = _values(batch)
    n = x.size
    if n < 2:
        raise ValueError("need at least two observations")
    if not np.all(np.isfinite(x)):
        raise ValueError("sample contains non-finite values")
    mean = float(np.mean(x))
    d = x - mean
    corr = float(np.mean(d))
    mean += corr
    d -= corr

    powers = np.ones((K + 1, n))
    for i in range(1, K + 1):
        powers[i] = powers[i - 1] * d
    central = [float(c) for c in powers.mean(axis=1)]
    central[1] = 0.0

    raw = []
    for k in range(1, K + 1):
        raw.append(math.fsum(math.comb(k, i) * mean ** (k - i) * central[i] for i in range(k + 1)))

    cum = [float(c) for c in cumulants_from_moments(central[1:]).values]
    cum[0] = mean

    kmax = min(MAX_KSTAT_ORDER, K, n)
    m2 = central[2] if K >= 2 else float(np.mean(d * d))
    m3 = central[3] if K >= 3 else 0.0
    m4 = central[4] if K >= 4 else 0.0
    kst = (mean,) + tuple(float(v) for v in k_statistics(n, m2, m3, m4, kmax))

    nb = max(2, math.isqrt(n))
    batch_central = np.stack([p.mean(axis=1) for p in np.array_split(powers, nb, axis=1)])
    summary = SampleSummary(
        count=n,
        raw_moments=tuple(raw),
        central_moments=tuple(central[1:]),
        plugin_cumulants=tuple(cum),
        k_statistics=kst,
        std_errors=(),
        mean=mean,
        batch_central=batch_central,
    )
    ses = []
    for k in range(1, K + 1):
        if k == 2 or m2 <= 0:
            ses.append(0.0)
        else:
            ses.append(_standardized(summary, k, EMPIRICAL)[1])
    object.__setattr__(summary, "std_errors", tuple(ses))
    return summary


def _standardized(s: SampleSummary, k: int, cs: CenterScale) -> tuple[float, float]:
    """(E Z^k estimate, batch-means SE)."""
    bc = s.batch_central
    nb = bc.shape[0]
    if isinstance(cs, Exact):
        shift = s.mean - cs.mean
        coef = np.array([math.comb(k, i) * shift ** (k - i) for i in range(k + 1)])
        point = math.fsum(coef[i] * s.central(i) for i in range(k + 1)) / cs.sd**k
        per_batch = (bc[:, : k + 1] @ coef) / cs.sd**k
    else:
        m2 = s.central(2)
        if not m2 > 0:
            raise ValueError("sample variance is zero; cannot standardize")
        point = s.central(k) / m2 ** (k / 2)
        b2 = bc[:, 2] - bc[:, 1] ** 2
        if np.any(b2 <= 0):
            per_batch = np.full(nb, np.nan)
        else:
            # center each batch at its own mean so the batch ratio mirrors the full estimator
            mu = bc[:, 1]
            bk = sum(math.comb(k, i) * (-mu) ** (k - i) * bc[:, i] for i in range(k + 1))
            per_batch = bk / b2 ** (k / 2)
    se = float(np.std(per_batch, ddof=1) / math.sqrt(nb))
    return point, se


def standardized_moment(summary: SampleSummary, k: int, center_scale: CenterScale = EMPIRICAL) -> tuple[float, float]:
    if not 1 <= k <= summary.order:
        raise ValueError(f"k must be in 1..{summary.order}")
    return _standardized(summary, k, center_scale)


def standardized_gap(summary: SampleSummary, k: int, center_scale: CenterScale = EMPIRICAL) -> tuple[float, float]:
    """(|m̂_k(Z) - E N^k|, SE) with Z standardized as requested."""
    if not 1 <= k <= summary.order:
        raise ValueError(f"k must be in 1..{summary.order}")
    point, se = _standardized(summary, k, center_scale)
    return abs(point - gaussian_moment(k)), se


def decay_fit(points: Sequence[tuple[float, float]]) -> DecayFit:
    """Fit gap ≈ e^intercept x^slope by least squares in log-log space."""
    pts = tuple((float(x), float(g)) for x, g in points)
    if len(pts) < 3:
        raise ValueError(f"need at least 3 points, got {len(pts)}")
    for x, g in pts:
        if not x > 0:
            raise ValueError(f"x must be positive, got {x}")
        if not g > 0:
            raise ValueError(f"gap must be positive, got {g}; filter noise-floor points first")
    lx = np.log([p[0] for p in pts])
    lg = np.log([p[1] for p in pts])
    A = np.column_stack([lx, np.ones_like(lx)])
    (slope, intercept), *_ = np.linalg.lstsq(A, lg, rcond=None)
    resid = lg - (slope * lx + intercept)
    ss_res = float(resid @ resid)
    ss_tot = float(((lg - lg.mean()) ** 2).sum())
    # flat data: r² is undefined, report a perfect fit when the residual is at rounding level
    if ss_tot <= 1e-20 * max(1.0, float(lg @ lg)):
        r2 = 1.0
    else:
        r2 = 1.0 - ss_res / ss_tot
    return DecayFit(float(slope), float(intercept), r2, pts)


def noise_floor_filter(points: Sequence[tuple[float, float, float]], factor: float = 3.0):
    """Split (x, gap, se) triples into those with gap >= factor·se and the rest."""
    kept, dropped = [], []
    for x, g, se in points:
        (kept if g > 0 and g >= factor * se else dropped).append((x, g, se))
    return kept, dropped
