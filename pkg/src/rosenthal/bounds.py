"""Moment-gap bounds from cumulant growth conditions.

A :class:`GrowthSpec` describes a standardized variable Z with
|Γ_j(Z)| <= C_j / Δ^(j-2) for j >= 3. From it :func:`moment_gap_bound`
bounds |E Z^k - E N^k| by Σ_j A_{j,k} Δ^-(k-2j).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .combinatorics import MAX_ORDER, compositions_min2, multinomial


@dataclass(frozen=True)
class GrowthSpec:
    """Cumulant growth constants for a standardized variable.

    Exactly one of ``constants`` (explicit C_{j,γ}) or
    ``factorial_constants`` (the C̃_j of the (j!)^(1+γ) C̃_j form) is given.
    Both map order j -> constant. Order 2 defaults to 1, which is exact
    for a unit-variance variable; orders missing above 2 are an error at
    evaluation time.
    """

    delta: float
    gamma: float = 0.0
    constants: Mapping[int, float] | None = None
    factorial_constants: Mapping[int, float] | None = None
    _table: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if not self.delta > 0:
            raise ValueError(f"delta must be positive, got {self.delta}")
        if self.gamma < 0:
            raise ValueError(f"gamma must be >= 0, got {self.gamma}")
        if (self.constants is None) == (self.factorial_constants is None):
            raise ValueError("give exactly one of constants / factorial_constants")
        table = dict(self.constants if self.constants is not None else self.factorial_constants)
        table.setdefault(2, 1.0)
        for j, c in table.items():
            if not c > 0:
                raise ValueError(f"constant for order {j} must be positive, got {c}")
        object.__setattr__(self, "_table", table)

    @property
    def is_factorial(self) -> bool:
        return self.factorial_constants is not None

    @classmethod
    def unit(cls, delta: float, gamma: float = 0.0, kmax: int = MAX_ORDER, factorial_form: bool = False):
        """All constants equal to one, orders 2..kmax."""
        table = {j: 1.0 for j in range(2, kmax + 1)}
        if factorial_form:
            return cls(delta=delta, gamma=gamma, factorial_constants=table)
        return cls(delta=delta, gamma=gamma, constants=table)

    def constant(self, j: int) -> float:
        """C_{j,γ}; in factorial form this is (j!)^(1+γ) C̃_j."""
        try:
            c = self._table[j]
        except KeyError:
            raise KeyError(f"no growth constant for order {j}") from None
        if self.is_factorial:
            return math.factorial(j) ** (1.0 + self.gamma) * c
        return c

    def raw_constant(self, j: int) -> float:
        try:
            return self._table[j]
        except KeyError:
            raise KeyError(f"no growth constant for order {j}") from None

    def cumulant_bound(self, j: int) -> float:
        """Bound on |Γ_j(Z)| implied by these constants."""
        return self.constant(j) / self.delta ** (j - 2)


@dataclass(frozen=True)
class DnaSpec:
    """Count N, degree D, amplitude A and variance σ² of a dependency-graph sum."""

    n_count: float
    degree: float
    amplitude: float
    sigma2: float

    def __post_init__(self):
        if not self.n_count > 0:
            raise ValueError("n_count must be positive")
        if not self.degree >= 1:
            raise ValueError("degree must be >= 1")
        if self.amplitude < 0:
            raise ValueError("amplitude must be nonnegative")
        if not self.sigma2 > 0:
            raise ValueError("sigma2 must be positive")


def coefficient_A(j: int, k: int, spec: GrowthSpec) -> float:
    """A_{j,k} = (1/j!) Σ_{k_1+..+k_j=k, k_i>=2} C_{k_1}...C_{k_j} k!/(k_1!...k_j!).

    For factorial-form constants the closed-form coefficient (k!)^(1+γ) Ã_{j,k}
    is returned instead, where Ã uses the bare C̃_j. It dominates the
    explicit A_{j,k} built from C_j = (j!)^(1+γ) C̃_j because
    k_1!...k_j! <= k!.
    """
    if j < 1:
        raise ValueError("j must be >= 1")
    if k > MAX_ORDER:
        raise ValueError(f"order {k} exceeds cap {MAX_ORDER}")
    if 2 * j > k:
        raise ValueError(f"need 2j <= k, got j={j}, k={k}")
    total = 0.0
    getter = spec.raw_constant if spec.is_factorial else spec.constant
    for parts in compositions_min2(k, j):
        prod = float(multinomial(k, parts))
        for p in parts:
            prod *= getter(p)
        total += prod
    total /= math.factorial(j)
    if spec.is_factorial:
        total *= math.factorial(k) ** (1.0 + spec.gamma)
    return total


def _j_max(k: int) -> int:
    return math.ceil(k / 2 - 1)


def moment_gap_bound(k: int, spec: GrowthSpec) -> float:
    """Σ_{1<=j<=⌈k/2-1⌉} A_{j,k} Δ^-(k-2j), a bound on |E Z^k - E N^k|."""
    if k < 3:
        raise ValueError("bound is stated for k >= 3")
    return math.fsum(coefficient_A(j, k, spec) / spec.delta ** (k - 2 * j) for j in range(1, _j_max(k) + 1))


def leading_bound(k: int, spec: GrowthSpec) -> tuple[int, float]:
    """(exponent, constant) with gap <= constant / Δ^exponent once Δ >= 1.

    Exponent is 2 for even k and 1 for odd k. The constant Σ_j A_{j,k}
    is crude but explicit.
    """
    if k < 3:
        raise ValueError("bound is stated for k >= 3")
    exponent = 2 if k % 2 == 0 else 1
    const = math.fsum(coefficient_A(j, k, spec) for j in range(1, _j_max(k) + 1))
    return exponent, const


def bernstein_delta(big_k: float, sigmas: Sequence[float]) -> float:
    """Δ_n = sqrt(Σ σ_i²) / (2 max{K, max σ_i}) for an independent sum."""
    sig = [float(s) for s in sigmas]
    if not sig:
        raise ValueError("need at least one sigma")
    if not big_k > 0 or any(not s > 0 for s in sig):
        raise ValueError("K and all sigmas must be positive")
    return math.sqrt(math.fsum(s * s for s in sig)) / (2.0 * max(big_k, max(sig)))


def bernstein_growth_spec(big_k: float, sigmas: Sequence[float], gamma: float = 0.0, kmax: int = MAX_ORDER) -> GrowthSpec:
    """Factorial-form growth spec (C̃_j = 1) for a normalized independent sum."""
    return GrowthSpec.unit(bernstein_delta(big_k, sigmas), gamma=gamma, kmax=kmax, factorial_form=True)


def dna_constant(j: int) -> float:
    """C_j = 2^(j-1) j^(j-2)."""
    return 2.0 ** (j - 1) * float(j) ** (j - 2)


def dna_cumulant_bound(j: int, spec: DnaSpec) -> float:
    """Bound C_j N D^(j-1) A^j / σ^j on |Γ_j(Y/σ)|."""
    if j < 2:
        raise ValueError("j must be >= 2")
    if j > MAX_ORDER:
        raise ValueError(f"order {j} exceeds cap {MAX_ORDER}")
    if spec.amplitude == 0:
        return 0.0
    return dna_constant(j) * spec.n_count * spec.degree ** (j - 1) * spec.amplitude**j / spec.sigma2 ** (j / 2)


def growth_spec_from_cumulant_bounds(bounds: Mapping[int, float], delta: float) -> GrowthSpec:
    """Explicit spec with C_j = b_j Δ^(j-2) from bounds b_j on |Γ_j(Z)|."""
    consts = {j: b * delta ** (j - 2) for j, b in bounds.items() if j >= 3}
    return GrowthSpec(delta=delta, constants=consts)
