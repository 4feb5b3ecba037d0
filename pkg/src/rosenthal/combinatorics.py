"""Exact integer combinatorics and moment/cumulant transforms.

All transforms run in rational arithmetic: float inputs are converted to
:class:`fractions.Fraction` without rounding, so a moment sequence produced
from a cumulant sequence carries every bit needed to invert it again. Call
:meth:`MomentSequence.floats` / :meth:`CumulantSequence.floats` when double
precision is wanted.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb, factorial
from numbers import Rational, Real
from typing import Iterable, Sequence

MAX_ORDER = 20


class OrderOverflowError(ValueError):
    """Raised when an order exceeds the exact-factorial cap of 20."""


class Composition(tuple):
    """Ordered tuple of positive integer parts."""

    def __new__(cls, parts: Iterable[int]):
        parts = tuple(int(x) for x in parts)
        if not parts or any(x < 1 for x in parts):
            raise ValueError(f"composition parts must be positive, got {parts}")
        return super().__new__(cls, parts)

    @property
    def parts(self) -> tuple[int, ...]:
        return tuple(self)

    @property
    def total(self) -> int:
        return sum(self)


def _exact(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, Rational)):
        return Fraction(x)
    if isinstance(x, Real):
        xf = float(x)
        if xf != xf or xf in (float("inf"), float("-inf")):
            raise ValueError(f"non-finite entry {x!r}")
        return Fraction(xf)
    raise TypeError(f"expected a real number, got {type(x).__name__}")


@dataclass(frozen=True)
class CumulantSequence:
    """Cumulants Γ_1..Γ_K of one random variable, stored exactly."""

    values: tuple[Fraction, ...]

    def __init__(self, values: Iterable):
        vals = tuple(_exact(v) for v in values)
        if not vals:
            raise ValueError("need at least one cumulant")
        object.__setattr__(self, "values", vals)

    @property
    def max_order(self) -> int:
        return len(self.values)

    def cumulant(self, j: int) -> Fraction:
        """Γ_j, 1-based."""
        return self.values[j - 1]

    def floats(self) -> tuple[float, ...]:
        return tuple(float(v) for v in self.values)

    def __len__(self) -> int:
        return len(self.values)

    def __iter__(self):
        return iter(self.values)


@dataclass(frozen=True)
class MomentSequence:
    """Raw moments E X^1..E X^K, stored exactly."""

    values: tuple[Fraction, ...]

    def __init__(self, values: Iterable):
        vals = tuple(_exact(v) for v in values)
        if not vals:
            raise ValueError("need at least one moment")
        object.__setattr__(self, "values", vals)

    @property
    def max_order(self) -> int:
        return len(self.values)

    def moment(self, k: int) -> Fraction:
        """E X^k, 1-based."""
        return self.values[k - 1]

    def floats(self) -> tuple[float, ...]:
        return tuple(float(v) for v in self.values)

    def __len__(self) -> int:
        return len(self.values)

    def __iter__(self):
        return iter(self.values)


def _check_order(k: int) -> None:
    if k > MAX_ORDER:
        raise OrderOverflowError(f"order {k} exceeds exact cap {MAX_ORDER}")


@lru_cache(maxsize=None)
def _compositions_min2(k: int, j: int) -> tuple[Composition, ...]:
    if j == 1:
        return (Composition((k,)),) if k >= 2 else ()
    out = []
    # first part runs upward, which yields lexicographic order overall
    for first in range(2, k - 2 * (j - 1) + 1):
        for rest in _compositions_min2(k - first, j - 1):
            out.append(Composition((first, *rest)))
    return tuple(out)


def compositions_min2(k: int, j: int) -> list[Composition]:
    """All ordered ``(k_1, ..., k_j)`` with ``k_i >= 2`` summing to ``k``.

    Returned in lexicographic order; empty when ``2 j > k``.
    """
    if k < 2 or j < 1:
        raise ValueError(f"need k >= 2 and j >= 1, got k={k}, j={j}")
    if 2 * j > k:
        return []
    return list(_compositions_min2(k, j))


def multinomial(k: int, parts: Sequence[int]) -> int:
    """k! / (k_1! ... k_j!) as an exact integer."""
    _check_order(k)
    if sum(parts) != k:
        raise ValueError(f"parts {tuple(parts)} do not sum to {k}")
    if any(p < 0 for p in parts):
        raise ValueError("parts must be nonnegative")
    out = factorial(k)
    for p in parts:
        out //= factorial(p)
    return out


def moments_from_cumulants(c: CumulantSequence | Sequence) -> MomentSequence:
    """Raw moments from cumulants, orders 1..K.

    Uses the recursion m_k = sum_i C(k-1, i-1) Γ_i m_{k-i}, which is the
    Leonov-Shiryaev composition sum regrouped by the part containing the
    first element.
    """
    if not isinstance(c, CumulantSequence):
        c = CumulantSequence(c)
    K = c.max_order
    _check_order(K)
    kap = c.values
    m = [Fraction(1)]
    for n in range(1, K + 1):
        m.append(sum(comb(n - 1, i - 1) * kap[i - 1] * m[n - i] for i in range(1, n + 1)))
    return MomentSequence(m[1:])


def cumulants_from_moments(m: MomentSequence | Sequence) -> CumulantSequence:
    """Inverse of :func:`moments_from_cumulants`."""
    if not isinstance(m, MomentSequence):
        m = MomentSequence(m)
    K = m.max_order
    _check_order(K)
    mm = (Fraction(1),) + m.values
    kap: list[Fraction] = []
    for n in range(1, K + 1):
        acc = mm[n]
        for i in range(1, n):
            acc -= comb(n - 1, i - 1) * kap[i - 1] * mm[n - i]
        kap.append(acc)
    return CumulantSequence(kap)


def leonov_shiryaev_moment(c: CumulantSequence | Sequence, k: int, *, centered: bool = True) -> Fraction:
    """E X^k by the explicit composition sum.

    With ``centered=True`` Γ_1 is taken to be zero and only parts >= 2
    are summed (j up to floor(k/2)); otherwise all parts >= 1 are used.
    Slower than :func:`moments_from_cumulants` and kept as an independent
    route to the same number.
    """
    if not isinstance(c, CumulantSequence):
        c = CumulantSequence(c)
    _check_order(k)
    if k > c.max_order:
        raise ValueError(f"need cumulants up to order {k}")
    kap = c.values
    total = Fraction(0)
    if centered:
        for j in range(1, k // 2 + 1):
            inner = Fraction(0)
            for parts in compositions_min2(k, j):
                prod = Fraction(multinomial(k, parts))
                for p in parts:
                    prod *= kap[p - 1]
                inner += prod
            total += inner / factorial(j)
    else:
        for parts in _all_compositions(k):
            prod = Fraction(multinomial(k, parts))
            for p in parts:
                prod *= kap[p - 1]
            total += prod / factorial(len(parts))
    return total


def _all_compositions(k: int):
    if k == 0:
        yield ()
        return
    for first in range(1, k + 1):
        for rest in _all_compositions(k - first):
            yield (first, *rest)


def gaussian_moment(k: int) -> int:
    """E N^k for a standard normal N: (k-1)!! for even k, else 0."""
    if k < 0:
        raise ValueError("k must be nonnegative")
    if k % 2:
        return 0
    out = 1
    for i in range(k - 1, 0, -2):
        out *= i
    return out


def standardized_moment_gap(std_cumulants: Sequence, k: int) -> Fraction:
    """E Z^k - E N^k exactly, given cumulants (Γ_1, Γ_2, Γ_3, ...) of Z.

    Callers normally pass (0, 1, Γ_3/Γ_2^{3/2}, ...). The subtraction is
    done in rational arithmetic so tiny gaps survive next to (k-1)!!.
    """
    vals = list(std_cumulants)[:k]
    if len(vals) < k:
        raise ValueError(f"need cumulants up to order {k}")
    m = moments_from_cumulants(vals)
    return m.values[k - 1] - gaussian_moment(k)
