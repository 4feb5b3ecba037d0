"""Seeded Monte Carlo samplers and small exhaustive enumerators.

Each ``sample_*`` function draws ``size`` independent replicates from an
explicit :class:`numpy.random.Generator` (one value when ``size`` is
None). :func:`run_batch` drives them over fixed-size replicate blocks,
each with its own counter-based substream, so results do not depend on
how many threads execute the blocks.
"""

from __future__ import annotations

import enum
import hashlib
import math
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .combinatorics import cumulants_from_moments
from .patterns import PatternGraph, adjacency_from_edges, as_pattern, count_copies
from .rng import BLOCK_SIZE, blocks, substream

MAX_ENUMERATE_N = 8


class SimKind(str, enum.Enum):
    GNP = "GnpSubgraph"
    GNM = "GnmSubgraph"
    CROSSINGS = "Crossings"
    WISHART = "WishartLogDet"
    USTAT = "UStatistic"
    INDEPENDENT = "IndependentSum"


def _single(values: np.ndarray, size):
    return values[0].item() if size is None else values


def _count(size) -> int:
    return 1 if size is None else int(size)


# ------------------------------------------------------------ random graphs


def gnp_adjacency(n: int, p: float, rng: np.random.Generator, size: int) -> np.ndarray:
    present = rng.random((size, n * (n - 1) // 2)) < p
    return adjacency_from_edges(n, present)


def sample_gnp_subgraph_count(n: int, p: float, h, rng: np.random.Generator, size=None):
    """Copies of H in G(n, p)."""
    h = as_pattern(h)
    if not 0 < p < 1:
        raise ValueError("p must lie in (0, 1)")
    out = np.empty(_count(size), dtype=np.int64)
    # bound the (B, n, n) adjacency to roughly 64 MB
    step = max(1, min(BLOCK_SIZE, 64_000_000 // max(n * n, 1)))
    for s in range(0, out.size, step):
        c = min(step, out.size - s)
        out[s:s + c] = count_copies(gnp_adjacency(n, p, rng, c), h)
    return _single(out, size)


def gnp_triangle_moments_exact(n: int, p: float) -> tuple[float, float]:
    """Mean and variance of the triangle count in G(n, p)."""
    if n < 3:
        raise ValueError("need n >= 3")
    c3 = math.comb(n, 3)
    mean = c3 * p**3
    var = c3 * (p**3 - p**6) + 12 * math.comb(n, 4) * (p**5 - p**6)
    return mean, var


def gnm_edge_sets(n: int, m: int, rng: np.random.Generator, size: int) -> np.ndarray:
    """(size, m) edge indices of uniform m-subsets, by partial Fisher-Yates."""
    total = n * (n - 1) // 2
    if not 0 <= m <= total:
        raise ValueError(f"m must lie in 0..{total}, got {m}")
    idx = np.tile(np.arange(total, dtype=np.int64), (size, 1))
    rows = np.arange(size)
    for t in range(m):
        r = rng.integers(t, total, size=size)
        picked = idx[rows, r]
        idx[rows, r] = idx[:, t]
        idx[:, t] = picked
    return idx[:, :m]


def sample_gnm_subgraph_count(n: int, m: int, h, rng: np.random.Generator, size=None):
    """Copies of H in G(n, m)."""
    h = as_pattern(h)
    B = _count(size)
    total = n * (n - 1) // 2
    out = np.empty(B, dtype=np.int64)
    step = max(1, min(BLOCK_SIZE, 64_000_000 // max(n * n, 1)))
    for s in range(0, B, step):
        c = min(step, B - s)
        chosen = gnm_edge_sets(n, m, rng, c)
        present = np.zeros((c, total), dtype=bool)
        np.put_along_axis(present, chosen, True, axis=1)
        out[s:s + c] = count_copies(adjacency_from_edges(n, present), h)
    return _single(out, size)


# ----------------------------------------------------------------- crossings


def random_pair_partitions(n: int, rng: np.random.Generator, size: int) -> np.ndarray:
    """(size, n, 2) uniform pair partitions of {0, ..., 2n-1}.

    Sequential construction: the element at position 2t of a working pool
    gets a partner chosen uniformly among the 2n-2t-1 elements still free.
    """
    pool = np.tile(np.arange(2 * n, dtype=np.int64), (size, 1))
    rows = np.arange(size)
    for t in range(n):
        r = rng.integers(2 * t + 1, 2 * n, size=size)
        partner = pool[rows, r]
        pool[rows, r] = pool[:, 2 * t + 1]
        pool[:, 2 * t + 1] = partner
    return pool.reshape(size, n, 2)


def count_crossings(pairs: np.ndarray) -> np.ndarray:
    """Crossings of each pair partition in a (B, n, 2) batch, O(n²) per partition."""
    a = pairs.min(axis=2)
    b = pairs.max(axis=2)
    B, n = a.shape
    out = np.empty(B, dtype=np.int64)
    step = max(1, 4_000_000 // max(n * n, 1))
    for s in range(0, B, step):
        aa, bb = a[s:s + step], b[s:s + step]
        cross = (aa[:, :, None] < aa[:, None, :]) & (aa[:, None, :] < bb[:, :, None]) & (bb[:, :, None] < bb[:, None, :])
        out[s:s + step] = cross.sum(axis=(1, 2))
    return out


def sample_pair_partition_crossings(n: int, rng: np.random.Generator, size=None):
    """Number of crossings in a uniform pair partition of [2n]."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return _single(count_crossings(random_pair_partitions(n, rng, _count(size))), size)


def enumerate_pair_partitions_crossings(n: int) -> dict[int, int]:
    """Exact crossing distribution over all (2n-1)!! pair partitions of [2n].

    Partitions are built by always pairing the smallest free element; the
    crossings created by closing an arc (i, j) are the earlier arcs whose
    right end lies strictly between i and j. Counts are memoized on the
    set of used positions, so every partition is counted exactly once.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if n > MAX_ENUMERATE_N:
        raise ValueError(f"exhaustive enumeration is limited to n <= {MAX_ENUMERATE_N}")
    size = 2 * n
    full = (1 << size) - 1

    @lru_cache(maxsize=None)
    def dist(used: int) -> tuple[tuple[int, int], ...]:
        if used == full:
            return ((0, 1),)
        i = (~used & (used + 1)).bit_length() - 1
        acc: Counter = Counter()
        for j in range(i + 1, size):
            if used >> j & 1:
                continue
            between = bin(used >> (i + 1) & ((1 << (j - i - 1)) - 1)).count("1")
            for c, w in dist(used | 1 << i | 1 << j):
                acc[c + between] += w
        return tuple(sorted(acc.items()))

    return dict(dist(0))


def crossings_moments_exact(n: int) -> tuple[float, float]:
    """Mean n(n-1)/6 and variance n(n-1)(n+3)/45 of the crossing count."""
    return n * (n - 1) / 6.0, n * (n - 1) * (n + 3) / 45.0


# ------------------------------------------------------------------ Wishart


def sample_wishart_logdet(n: int, p: int, rng: np.random.Generator, size=None):
    """log det of a real p x p Wishart matrix with n degrees of freedom.

    Uses the Bartlett identity log det W = Σ_{i=1}^p log χ²_{n-i+1}.
    """
    if not 1 <= p <= n:
        raise ValueError("need 1 <= p <= n")
    shapes = (n - np.arange(p)) / 2.0
    g = rng.standard_gamma(shapes, size=(_count(size), p))
    return _single(np.log(2.0 * g).sum(axis=1), size)


# ------------------------------------------------------------- U-statistics


@dataclass(frozen=True)
class Kernel:
    name: str
    sigma1sq: float | None
    sigma2sq: float | None
    mean: float | None


KERNELS = {
    "sum_product": Kernel("sum_product", 1.0, 3.0, 0.0),
    "gini": Kernel("gini", None, None, 2.0 / math.sqrt(math.pi)),
}
DEFAULT_KERNEL = "sum_product"


def _ustat_from_normals(x: np.ndarray, kernel: str) -> np.ndarray:
    n = x.shape[1]
    pairs = n * (n - 1) / 2.0
    if kernel == "sum_product":
        # Σ_{i<j} (x_i + x_j + x_i x_j) = (n-1) S + (S² - Q) / 2
        s = x.sum(axis=1)
        q = (x * x).sum(axis=1)
        return ((n - 1) * s + 0.5 * (s * s - q)) / pairs
    if kernel == "gini":
        xs = np.sort(x, axis=1)
        w = 2.0 * np.arange(n) - (n - 1)
        return (xs @ w) / pairs
    raise ValueError(f"unknown kernel {kernel!r}; known: {sorted(KERNELS)}")


def sample_ustatistic(n: int, kernel: str, rng: np.random.Generator, size=None):
    """U_n(h) over n i.i.d. standard normals."""
    if n < 2:
        raise ValueError("need n >= 2")
    if kernel not in KERNELS:
        raise ValueError(f"unknown kernel {kernel!r}; known: {sorted(KERNELS)}")
    B = _count(size)
    out = np.empty(B)
    step = max(1, min(BLOCK_SIZE, 8_000_000 // n))
    for s in range(0, B, step):
        c = min(step, B - s)
        out[s:s + c] = _ustat_from_normals(rng.standard_normal((c, n)), kernel)
    return _single(out, size)


def ustat_variance(n: int, sigma1sq: float, sigma2sq: float) -> float:
    """Var U_n = 4σ₁²(n-2)/(n(n-1)) + 2σ₂²/(n(n-1))."""
    if n < 2:
        raise ValueError("need n >= 2")
    return 4.0 * sigma1sq / n * (n - 2) / (n - 1) + 2.0 * sigma2sq / (n * (n - 1))


# --------------------------------------------------------- independent sums

DISTRIBUTIONS = ("rademacher", "exponential", "uniform")
# K / σ for which |E X^j| <= j! K^(j-2) σ² holds with γ = 0
_BERNSTEIN_FACTOR = {"rademacher": 1.0, "exponential": 1.0, "uniform": math.sqrt(3.0)}


def _unit_draws(dist: str, rng: np.random.Generator, shape) -> np.ndarray:
    if dist == "rademacher":
        return 2.0 * rng.integers(0, 2, size=shape) - 1.0
    if dist == "exponential":
        return rng.standard_exponential(shape) - 1.0
    if dist == "uniform":
        return math.sqrt(3.0) * (2.0 * rng.random(shape) - 1.0)
    raise ValueError(f"unknown distribution {dist!r}; known: {DISTRIBUTIONS}")


def bernstein_constants(dist: str, sigmas) -> tuple[float, float]:
    """(K, γ) such that every summand satisfies the generalized Bernstein condition."""
    if dist not in _BERNSTEIN_FACTOR:
        raise ValueError(f"unknown distribution {dist!r}; known: {DISTRIBUTIONS}")
    return _BERNSTEIN_FACTOR[dist] * max(float(s) for s in sigmas), 0.0


def unit_cumulant(dist: str, j: int) -> float:
    """Γ_j of the unit-variance summand law."""
    if dist == "exponential":
        return 0.0 if j == 1 else float(math.factorial(j - 1))
    if dist == "rademacher":
        moms = [k % 2 == 0 for k in range(1, j + 1)]
    elif dist == "uniform":
        # E U^k = 3^(k/2)/(k+1) for even k
        moms = [0 if k % 2 else Fraction(3 ** (k // 2), k + 1) for k in range(1, j + 1)]
    else:
        raise ValueError(f"unknown distribution {dist!r}; known: {DISTRIBUTIONS}")
    return float(cumulants_from_moments([int(x) if isinstance(x, bool) else x for x in moms]).values[j - 1])


def sample_independent_sum(sigmas, dist: str, rng: np.random.Generator, size=None):
    """Z_n = Σ σ_i ξ_i / sqrt(Σ σ_i²) with ξ_i unit-variance draws from ``dist``."""
    sig = np.asarray(sigmas, dtype=float)
    if sig.ndim != 1 or sig.size == 0 or np.any(sig <= 0):
        raise ValueError("sigmas must be a nonempty list of positive numbers")
    if dist not in DISTRIBUTIONS:
        raise ValueError(f"unknown distribution {dist!r}; known: {DISTRIBUTIONS}")
    norm = math.sqrt(math.fsum(sig * sig))
    B = _count(size)
    out = np.empty(B)
    step = max(1, min(BLOCK_SIZE, 8_000_000 // sig.size))
    for s in range(0, B, step):
        c = min(step, B - s)
        out[s:s + c] = (_unit_draws(dist, rng, (c, sig.size)) @ sig) / norm
    return _single(out, size)


# -------------------------------------------------------------- batch runner


@dataclass(frozen=True)
class SimSpec:
    """One Monte Carlo model with replicate count and seed.

    ``p`` is the edge probability for G(n,p) and the rank for Wishart;
    ``stream`` prefixes the substream path so several specs sharing one
    seed stay independent.
    """

    kind: SimKind
    n: int
    replicates: int
    seed: int
    p: float | None = None
    m: int | None = None
    pattern: str | None = None
    kernel: str = DEFAULT_KERNEL
    dist: str | None = None
    sigmas: tuple[float, ...] | None = None
    stream: tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "kind", SimKind(self.kind))
        if self.n < 1:
            raise ValueError("n must be positive")
        if self.replicates < 1:
            raise ValueError("replicates must be positive")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be an unsigned 64-bit integer")
        k = self.kind
        if k in (SimKind.GNP, SimKind.GNM):
            as_pattern(self.pattern)
        if k is SimKind.GNP and (self.p is None or not 0 < self.p < 1):
            raise ValueError("G(n,p) needs p in (0, 1)")
        if k is SimKind.GNM and (self.m is None or not 0 <= self.m <= self.n * (self.n - 1) // 2):
            raise ValueError("G(n,m) needs 0 <= m <= C(n,2)")
        if k is SimKind.WISHART and (self.p is None or int(self.p) != self.p or not 1 <= self.p <= self.n):
            raise ValueError("Wishart needs integer rank 1 <= p <= n")
        if k is SimKind.USTAT and (self.kernel not in KERNELS or self.n < 2):
            raise ValueError(f"U-statistic needs n >= 2 and a kernel in {sorted(KERNELS)}")
        if k is SimKind.INDEPENDENT:
            if self.dist not in DISTRIBUTIONS:
                raise ValueError(f"independent sum needs dist in {DISTRIBUTIONS}")
            if not self.sigmas:
                object.__setattr__(self, "sigmas", (1.0,) * self.n)
            object.__setattr__(self, "sigmas", tuple(float(s) for s in self.sigmas))

    @property
    def label(self) -> str:
        if self.kind in (SimKind.GNP, SimKind.GNM):
            return f"{self.kind.value}[{self.pattern}]"
        if self.kind is SimKind.USTAT:
            return f"{self.kind.value}[{self.kernel}]"
        if self.kind is SimKind.INDEPENDENT:
            return f"{self.kind.value}[{self.dist}]"
        return self.kind.value


@dataclass(frozen=True)
class SampleBatch:
    values: np.ndarray = field(repr=False)
    spec: SimSpec
    rng_state_digest: str

    def __len__(self) -> int:
        return self.values.size


def sample_block(spec: SimSpec, rng: np.random.Generator, count: int) -> np.ndarray:
    k = spec.kind
    if k is SimKind.GNP:
        v = sample_gnp_subgraph_count(spec.n, spec.p, spec.pattern, rng, count)
    elif k is SimKind.GNM:
        v = sample_gnm_subgraph_count(spec.n, spec.m, spec.pattern, rng, count)
    elif k is SimKind.CROSSINGS:
        v = sample_pair_partition_crossings(spec.n, rng, count)
    elif k is SimKind.WISHART:
        v = sample_wishart_logdet(spec.n, int(spec.p), rng, count)
    elif k is SimKind.USTAT:
        v = sample_ustatistic(spec.n, spec.kernel, rng, count)
    else:
        v = sample_independent_sum(spec.sigmas, spec.dist, rng, count)
    return np.asarray(v, dtype=float)


def run_batch(spec: SimSpec, threads: int = 1, block_size: int = BLOCK_SIZE) -> SampleBatch:
    """All replicates of ``spec``; bit-identical for any ``threads``."""
    parts = list(blocks(spec.replicates, block_size))

    def work(part):
        b, _, count = part
        return sample_block(spec, substream(spec.seed, *spec.stream, b), count)

    if threads > 1 and len(parts) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            chunks = list(pool.map(work, parts))
    else:
        chunks = [work(part) for part in parts]
    values = np.concatenate(chunks)
    digest = hashlib.sha256(values.tobytes()).hexdigest()[:16]
    return SampleBatch(values, spec, digest)
