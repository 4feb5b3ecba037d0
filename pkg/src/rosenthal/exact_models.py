"""Closed-form cumulants of log-determinants and log-volumes.

Every model here has a Mellin transform whose logarithm is a sum of
log-gamma ratios, so its cumulants are sums of polygamma values. The
building block is :func:`L_derivative`, the j-th z-derivative at 0 of

    L(p, l, α; z) = Σ_{k=1}^{p} log Γ(α(k+l) + z) - log Γ(α(k+l)).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .bounds import GrowthSpec, growth_spec_from_cumulant_bounds, moment_gap_bound
from .combinatorics import MAX_ORDER, moments_from_cumulants, standardized_moment_gap
from .specfun import polygamma, polygamma_bound

MAX_TERMS = 10**8
ALLOWED_BETAS = (1.0, 2.0, 4.0)


class ModelKind(str, enum.Enum):
    CBE = "CBE"
    LAGUERRE = "LaguerreLogDet"
    JACOBI = "JacobiLogDet"
    GINIBRE = "GinibreLogDet"
    PARALLELOTOPE = "ParallelotopeLogVol"
    SIMPLEX = "SimplexLogVol"


class RegimeTag(str, enum.Enum):
    SMALL_P = "SmallP"
    PROPORTIONAL = "Proportional"
    FULL_RANK = "FullRank"
    # polygamma-sum bound, usable for every model in this module
    GENERIC = "Generic"


class DegenerateVarianceError(ValueError):
    pass


class UnsupportedBoundError(ValueError):
    pass


@dataclass(frozen=True)
class ModelSpec:
    """One exact model.

    ``n`` is the matrix size (n1 for Jacobi), ``p`` the rank or dimension
    where the model has one, ``n2`` the second Jacobi parameter.
    """

    kind: ModelKind
    n: int
    p: int | None = None
    n2: int | None = None
    beta: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "kind", ModelKind(self.kind))
        if self.n < 1:
            raise ValueError("n must be positive")
        if float(self.beta) not in ALLOWED_BETAS:
            raise ValueError(f"beta must be one of {ALLOWED_BETAS}, got {self.beta}")
        object.__setattr__(self, "beta", float(self.beta))
        if self.kind in (ModelKind.CBE, ModelKind.GINIBRE):
            return
        if self.p is None or not 1 <= self.p <= self.n:
            raise ValueError(f"{self.kind.value} needs 1 <= p <= n, got p={self.p}, n={self.n}")
        if self.kind is ModelKind.JACOBI:
            if self.n2 is None or self.n2 < 1:
                raise ValueError("Jacobi needs n2 >= 1")
        if self.kind in (ModelKind.PARALLELOTOPE, ModelKind.SIMPLEX) and self.beta != 1.0:
            raise ValueError("random-volume models are Gaussian (beta = 1)")

    @property
    def label(self) -> str:
        return self.kind.value


@dataclass(frozen=True)
class LaguerreRegime:
    tag: RegimeTag
    c: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "tag", RegimeTag(self.tag))
        if self.tag is RegimeTag.PROPORTIONAL:
            if self.c is None or not 0 < self.c < 1:
                raise ValueError("Proportional regime needs c in (0, 1)")
        elif self.c is not None:
            raise ValueError(f"{self.tag.value} regime takes no c")


def _poly_sum(j: int, args: np.ndarray) -> float:
    return math.fsum(polygamma(j, args))


def L_derivative(p: int, l: int, alpha: float, j: int) -> float:
    """d^j/dz^j L(p, l, α; z) at z = 0, i.e. Σ_{k=1}^p ψ^(j-1)(α(k+l))."""
    if j < 1:
        raise ValueError("j must be >= 1")
    if p < 1:
        raise ValueError("p must be >= 1")
    if p > MAX_TERMS:
        raise ValueError(f"p={p} exceeds runtime guard {MAX_TERMS}")
    if not alpha * (1 + l) > 0:
        raise ValueError("need alpha (1 + l) > 0")
    return _poly_sum(j - 1, alpha * (np.arange(1, p + 1, dtype=float) + l))


def _cbe_args(n: int, beta: float) -> np.ndarray:
    return 1.0 + np.arange(n, dtype=float) * beta / 2.0


def model_cumulant(m: ModelSpec, j: int) -> float:
    """Γ_j of the model's scalar statistic."""
    if j < 1:
        raise ValueError("j must be >= 1")
    kind, n, p, b = m.kind, m.n, m.p, m.beta
    if kind is ModelKind.CBE:
        if j == 1:
            return 0.0
        pref = (2.0 ** (j - 1) - 1.0) / 2.0 ** (j - 1)
        return pref * _poly_sum(j - 1, _cbe_args(n, b))
    if kind is ModelKind.LAGUERRE:
        out = L_derivative(p, n - p, b / 2, j)
        return out + p * math.log(2.0) if j == 1 else out
    if kind is ModelKind.JACOBI:
        return L_derivative(p, n - p, b / 2, j) - L_derivative(p, n + m.n2 - p, b / 2, j)
    if kind is ModelKind.GINIBRE:
        out = L_derivative(n, 0, b / 2, j)
        return out + 0.5 * n * math.log(2.0 / b) if j == 1 else out
    if kind in (ModelKind.PARALLELOTOPE, ModelKind.SIMPLEX):
        out = L_derivative(p, n - p, 0.5, j) / 2.0**j
        if j == 1:
            out += 0.5 * p * math.log(2.0)
            if kind is ModelKind.SIMPLEX:
                out += 0.5 * math.log(p + 1) - math.lgamma(p + 1)
        return out
    raise AssertionError(kind)


def model_cumulants(m: ModelSpec, kmax: int) -> list[float]:
    return [model_cumulant(m, j) for j in range(1, kmax + 1)]


def standardized_cumulants(m: ModelSpec, kmax: int) -> list[float]:
    """(0, 1, Γ_3/Γ_2^{3/2}, ..., Γ_kmax/Γ_2^{kmax/2})."""
    var = model_cumulant(m, 2)
    if not var > 0:
        raise DegenerateVarianceError(f"variance {var} of {m} is not positive")
    out = [0.0, 1.0]
    for j in range(3, kmax + 1):
        out.append(model_cumulant(m, j) / var ** (j / 2))
    return out[:kmax]


def standardized_moment_exact(m: ModelSpec, k: int) -> float:
    """E Z^k of the standardized statistic, through order-k cumulants only."""
    if not 3 <= k <= MAX_ORDER:
        raise ValueError(f"k must be in 3..{MAX_ORDER}")
    return float(moments_from_cumulants(standardized_cumulants(m, k)).values[k - 1])


def standardized_gap_exact(m: ModelSpec, k: int) -> Fraction:
    """E Z^k - E N^k computed without cancellation against (k-1)!!."""
    if not 3 <= k <= MAX_ORDER:
        raise ValueError(f"k must be in 3..{MAX_ORDER}")
    return standardized_moment_gap(standardized_cumulants(m, k), k)


# ---------------------------------------------------------------- regimes


def laguerre_variance_regime(n: int, p: int) -> tuple[LaguerreRegime, float]:
    """Heuristic regime of a single (n, p) and its asymptotic variance.

    FullRank if n - p <= sqrt(n), SmallP if p <= sqrt(n), otherwise
    Proportional with c = p/n.
    """
    if not 1 <= p <= n:
        raise ValueError("need 1 <= p <= n")
    root = math.sqrt(n)
    if n - p <= root:
        return LaguerreRegime(RegimeTag.FULL_RANK), 2.0 * math.log(n / (n - p + 1))
    if p <= root:
        return LaguerreRegime(RegimeTag.SMALL_P), 2.0 * p / n
    c = p / n
    return LaguerreRegime(RegimeTag.PROPORTIONAL, c), 2.0 * math.log(1.0 / (1.0 - c))


def _d_constant(n: int, p: int, regime: LaguerreRegime) -> float:
    if regime.tag is RegimeTag.SMALL_P:
        d = 4.0
    else:
        d = 2.0 / (1.0 - regime.c) + 1.0
    if not (n - p + 1) / 2 > n / d:
        raise UnsupportedBoundError(f"d={d} does not satisfy (n-p+1)/2 > n/d at n={n}, p={p}")
    if n - p < 1:
        raise UnsupportedBoundError("small-p bound needs n - p >= 1")
    return d


def _laguerre_like(m: ModelSpec) -> tuple[int, int] | None:
    """(n, p) of the β=1 Laguerre law with the same standardized cumulants."""
    if m.kind is ModelKind.LAGUERRE and m.beta == 1.0:
        return m.n, m.p
    if m.kind in (ModelKind.PARALLELOTOPE, ModelKind.SIMPLEX):
        return m.n, m.p
    if m.kind is ModelKind.GINIBRE and m.beta == 1.0:
        return m.n, m.n
    return None


def default_regime(m: ModelSpec) -> LaguerreRegime | None:
    """Regime used when the caller gives none; CBE has no regime (None)."""
    if m.kind is ModelKind.CBE:
        return None
    like = _laguerre_like(m)
    if like is not None:
        return laguerre_variance_regime(*like)[0]
    return LaguerreRegime(RegimeTag.GENERIC)


def _generic_abs_bound(m: ModelSpec, j: int) -> float:
    """Σ |ψ^(j-1)| bounds over every polygamma term in Γ_j of the raw statistic."""
    pb = np.vectorize(polygamma_bound, otypes=[float])
    kind, n, p, b = m.kind, m.n, m.p, m.beta
    if kind is ModelKind.CBE:
        pref = (2.0 ** (j - 1) - 1.0) / 2.0 ** (j - 1)
        return pref * math.fsum(pb(j - 1, _cbe_args(n, b)))
    if kind is ModelKind.LAGUERRE:
        return math.fsum(pb(j - 1, b / 2 * (np.arange(1, p + 1) + n - p)))
    if kind is ModelKind.JACOBI:
        k = np.arange(1, p + 1)
        return math.fsum(pb(j - 1, b / 2 * (k + n - p))) + math.fsum(pb(j - 1, b / 2 * (k + n + m.n2 - p)))
    if kind is ModelKind.GINIBRE:
        return math.fsum(pb(j - 1, b / 2 * np.arange(1, n + 1)))
    return math.fsum(pb(j - 1, 0.5 * (np.arange(1, p + 1) + n - p))) / 2.0**j


_CBE_CONST = {2.0: 4.0 * math.pi**2 / 6.0, 4.0: 8.0 * math.pi**2 / 6.0}


def model_cumulant_bound(m: ModelSpec, regime: LaguerreRegime | None, j: int) -> float:
    """Bound on |Γ_j(Z)| for the standardized statistic, j >= 3.

    * CBE: j! c_β / σ^(j-2).
    * β=1 Laguerre (and the volume models and real Ginibre, which share its
      standardized law): C_1(j)(j-1)!/(sqrt(pn))^(j-2) for SmallP and
      Proportional, C_2(j)(j-1)!/L^(j/2) with L = log(n/(n-p+1)) for
      FullRank. The constants C_1(j) = 2^(j/2) d^(j-1) and
      C_2(j) = 2^(j/2+1) come from |Γ_j| <= 2 d^(j-1) p (j-1)! n^(1-j),
      |Γ_j| <= 2^(j+1)(j-1)!, and the variance floors σ² >= 2p/n and
      σ² >= 2L (ψ'(z) > 1/z).
    * Generic: Σ (polygamma_bound) over all terms of Γ_j, over σ^j.
    """
    if j < 3:
        raise ValueError("cumulant bounds are for j >= 3")
    if regime is None:
        regime = default_regime(m)
    var = model_cumulant(m, 2)
    if not var > 0:
        raise DegenerateVarianceError(f"variance {var} of {m} is not positive")
    sigma = math.sqrt(var)

    if regime is not None and regime.tag is RegimeTag.GENERIC:
        return _generic_abs_bound(m, j) / sigma**j

    if m.kind is ModelKind.CBE:
        if m.beta == 1.0:
            c = 2.0**j * math.pi**2 / 3.0
        else:
            c = _CBE_CONST[m.beta]
        return math.factorial(j) * c / sigma ** (j - 2)

    like = _laguerre_like(m)
    if like is None or regime is None:
        raise UnsupportedBoundError(f"no {getattr(regime, 'tag', regime)} bound for {m}")
    n, p = like
    if regime.tag is RegimeTag.FULL_RANK:
        L = math.log(n / (n - p + 1))
        if not L > 0:
            raise UnsupportedBoundError(f"log(n/(n-p+1)) = {L} is not positive")
        return 2.0 ** (j / 2 + 1) * math.factorial(j - 1) / L ** (j / 2)
    d = _d_constant(n, p, regime)
    return 2.0 ** (j / 2) * d ** (j - 1) * math.factorial(j - 1) / math.sqrt(p * n) ** (j - 2)


def regime_delta(m: ModelSpec, regime: LaguerreRegime | None) -> float:
    """Δ used to phrase a model's cumulant bounds as C_j / Δ^(j-2)."""
    if m.kind is ModelKind.CBE or regime.tag is RegimeTag.GENERIC:
        return math.sqrt(model_cumulant(m, 2))
    like = _laguerre_like(m)
    if like is None:
        raise UnsupportedBoundError(f"no {regime.tag.value} bound for {m}")
    n, p = like
    if regime.tag is RegimeTag.FULL_RANK:
        return math.sqrt(math.log(n / (n - p + 1)))
    return math.sqrt(p * n)


def model_growth_spec(m: ModelSpec, kmax: int, regime: LaguerreRegime | None = None) -> GrowthSpec:
    """Explicit growth spec C_j = bound_j Δ^(j-2) for j = 3..kmax."""
    if regime is None:
        regime = default_regime(m)
    delta = regime_delta(m, regime)
    bounds = {j: model_cumulant_bound(m, regime, j) for j in range(3, kmax + 1)}
    return growth_spec_from_cumulant_bounds(bounds, delta)


def model_gap_bound(m: ModelSpec, k: int, regime: LaguerreRegime | None = None) -> tuple[float, float]:
    """(moment_gap_bound, Δ) for the standardized statistic at order k."""
    spec = model_growth_spec(m, max(k, 3), regime)
    return moment_gap_bound(k, spec), spec.delta


def log_mellin(m: ModelSpec, z: float) -> float:
    """log E[exp(z X)] for the model statistic X, via log-gamma ratios.

    Valid for z > -min argument; for CBE this is log E|Z|^z. Used as an
    independent check of :func:`model_cumulant` by differentiation.
    """
    def L(p, l, alpha, zz):
        return math.fsum(math.lgamma(alpha * (k + l) + zz) - math.lgamma(alpha * (k + l)) for k in range(1, p + 1))

    kind, n, p, b = m.kind, m.n, m.p, m.beta
    if kind is ModelKind.CBE:
        return math.fsum(
            math.lgamma(1 + k * b / 2) + math.lgamma(1 + z + k * b / 2) - 2 * math.lgamma(1 + z / 2 + k * b / 2)
            for k in range(n)
        )
    if kind is ModelKind.LAGUERRE:
        return z * p * math.log(2.0) + L(p, n - p, b / 2, z)
    if kind is ModelKind.JACOBI:
        return L(p, n - p, b / 2, z) - L(p, n + m.n2 - p, b / 2, z)
    if kind is ModelKind.GINIBRE:
        return 0.5 * n * z * math.log(2.0 / b) + L(n, 0, b / 2, z)
    out = 0.5 * z * p * math.log(2.0) + L(p, n - p, 0.5, z / 2)
    if kind is ModelKind.SIMPLEX:
        out += 0.5 * z * math.log(p + 1) - z * math.lgamma(p + 1)
    return out
