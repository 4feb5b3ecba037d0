"""Digamma and polygamma functions on the positive real axis.

Arguments below ``10 + j`` are shifted upward with the recurrence
ψ^(j)(z) = ψ^(j)(z+1) - (-1)^j j!/z^(j+1); from there the asymptotic
expansion with Bernoulli numbers B_2..B_30 is summed.
"""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np

MAX_ORDER = 30

EULER_GAMMA = 0.57721566490153286061


def _bernoulli_even(n_max: int) -> tuple[float, ...]:
    B = [Fraction(1)]
    for m in range(1, n_max + 1):
        B.append(-sum(math.comb(m + 1, k) * B[k] for k in range(m)) / (m + 1))
    return tuple(float(B[2 * k]) for k in range(1, n_max // 2 + 1))


# B_2, B_4, ..., B_30
_B2K = _bernoulli_even(30)


def _asymptotic(j: int, z: np.ndarray) -> np.ndarray:
    if j == 0:
        s = np.log(z) - 0.5 / z
        zz = z * z
        zpow = zz.copy()
        for k, b in enumerate(_B2K, start=1):
            s = s - b / (2 * k * zpow)
            zpow = zpow * zz
        return s
    # factor out z^-j so nothing overflows for large z
    inv2 = 1.0 / (z * z)
    s = math.factorial(j - 1) + math.factorial(j) / (2.0 * z)
    ipow = inv2
    for k, b in enumerate(_B2K, start=1):
        coef = b * math.factorial(2 * k + j - 1) / math.factorial(2 * k)
        s = s + coef * ipow
        ipow = ipow * inv2
    s = s * z ** (-float(j))
    return s if j % 2 else -s


def polygamma(j: int, z):
    """ψ^(j)(z) for integer ``0 <= j <= 30`` and real ``z > 0``.

    Accepts scalars or arrays; returns the same shape (a Python float for
    scalar input).
    """
    j = int(j)
    if j < 0 or j > MAX_ORDER:
        raise ValueError(f"polygamma order must be in 0..{MAX_ORDER}, got {j}")
    scalar = np.ndim(z) == 0
    x = np.array(z, dtype=float, ndmin=1)
    if not np.all(x > 0) or not np.all(np.isfinite(x)):
        raise ValueError("polygamma is only defined here for finite z > 0")

    threshold = 10.0 + j
    shift = np.maximum(np.ceil(threshold - x), 0.0)
    acc = np.zeros_like(x)
    jfact = math.factorial(j)
    sign = -1.0 if j % 2 == 0 else 1.0  # (-1)^(j+1)
    n_steps = int(shift.max()) if x.size else 0
    w = x.copy()
    for _ in range(n_steps):
        active = w < threshold
        if not active.any():
            break
        acc = np.where(active, acc + sign * jfact / w ** (j + 1), acc)
        w = np.where(active, w + 1.0, w)
    out = acc + _asymptotic(j, w)
    return float(out[0]) if scalar else out.reshape(np.shape(z))


def digamma(z):
    return polygamma(0, z)


def polygamma_bound(j: int, z: float) -> float:
    """Upper bound (j-1)!/z^j + j!/z^(j+1) on |ψ^(j)(z)| for j >= 1."""
    if j < 1:
        raise ValueError("bound holds for j >= 1")
    if z <= 0:
        raise ValueError("z must be positive")
    return math.factorial(j - 1) / z**j + math.factorial(j) / z ** (j + 1)


def polygamma_half_sum(n: int, j: int) -> float:
    """Σ_{k=1}^{n} ψ^(j)(k/2)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    k = np.arange(1, n + 1, dtype=float)
    return math.fsum(polygamma(j, 0.5 * k))


def half_sum_constant() -> float:
    """Limit of Σ_{k<=n} ψ'(k/2) - 2 log n, namely 2(γ + 1 + π²/8)."""
    return 2.0 * (EULER_GAMMA + 1.0 + math.pi**2 / 8.0)
