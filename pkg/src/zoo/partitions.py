"""Cycle-index sums over integer partitions for the symmetric and alternating groups.

A partition of n is written by its multiplicities j_1, ..., j_n
(sum k j_k = n).  Substituting x_k = d into the cycle index of S_n gives
sum d^(sum j) / prod(k^j_k j_k!), which counts multisets of size n from d
colours.  All arithmetic here is exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterator, List, Tuple

from .errors import ArgumentError, ResourceError
from .numeric import binomial, falling_factorial

DEFAULT_PARTITION_CAP = 10 ** 6
DEFAULT_SERIES_CAP = 10 ** 7


@dataclass(frozen=True)
class PartitionMultiplicity:
    """Multiplicity vector j = (j_1, ..., j_n) with sum k j_k = n."""

    n: int
    j: Tuple[int, ...]

    def __post_init__(self):
        if len(self.j) != self.n:
            raise ArgumentError("multiplicity vector must have length n")
        if sum((k + 1) * jk for k, jk in enumerate(self.j)) != self.n:
            raise ArgumentError("multiplicities do not add up to n")

    @property
    def parts(self) -> int:
        return sum(self.j)

    @property
    def even_part_count(self) -> int:
        """j_2 + j_4 + ..., the number of even-length cycles."""
        return sum(self.j[1::2])


@lru_cache(maxsize=None)
def partition_count(n: int) -> int:
    """p(n) by Euler's pentagonal-number recurrence."""
    if n < 0:
        return 0
    p = [1] + [0] * n
    for m in range(1, n + 1):
        total = 0
        k = 1
        while True:
            g1 = k * (3 * k - 1) // 2
            if g1 > m:
                break
            sign = 1 if k % 2 else -1
            total += sign * p[m - g1]
            g2 = k * (3 * k + 1) // 2
            if g2 <= m:
                total += sign * p[m - g2]
            k += 1
        p[m] = total
    return p[n]


def _check_cap(n: int, cap: int) -> None:
    count = partition_count(n)
    if count > cap:
        raise ResourceError(f"p({n}) = {count} exceeds the enumeration cap {cap}; use the closed form")


def partitions_iter(n: int, cap: int = DEFAULT_PARTITION_CAP) -> Iterator[PartitionMultiplicity]:
    """Every multiplicity vector of n once, ordered by largest part (ascending)."""
    if n < 1:
        raise ArgumentError("n must be >= 1")
    _check_cap(n, cap)
    for counts in _descend(n, n):
        yield PartitionMultiplicity(n, tuple(counts))


def _descend(n: int, largest_cap: int) -> Iterator[List[int]]:
    # Parts are chosen from largest to smallest; for a fixed largest part the
    # recursion fills the remainder with parts no larger than it.
    def rec(remaining: int, max_part: int, j: List[int]):
        if remaining == 0:
            yield list(j)
            return
        for part in range(min(remaining, max_part), 0, -1):
            j[part - 1] += 1
            yield from rec(remaining - part, part, j)
            j[part - 1] -= 1

    j = [0] * n
    for largest in range(1, largest_cap + 1):
        j[largest - 1] += 1
        yield from rec(n - largest, largest, j)
        j[largest - 1] -= 1


def _cycle_index_walk(n: int, d: int, alternating: bool, cap: int) -> Fraction:
    """Sum of d^(sum j) / prod(k^j_k j_k!) over partitions of n, optionally parity-weighted.

    Denominators are built along the recursion, so every leaf costs O(1)
    big-integer work.  For the alternating group each term carries the weight
    1 + (-1)^(j_2 + j_4 + ...), i.e. only even permutations count, twice.
    """
    if n < 1 or d < 1:
        raise ArgumentError("n and d must be >= 1")
    _check_cap(n, cap)
    # Sum of d^parts * n!/denominator is an integer class-size-weighted count.
    nfact = math.factorial(n)
    total = 0

    def rec(remaining: int, max_part: int, parts: int, denom: int, odd_cycles_even: int):
        nonlocal total
        if remaining == 0:
            weight = 1
            if alternating:
                weight = 2 if odd_cycles_even % 2 == 0 else 0
            if weight:
                total += weight * (nfact // denom) * d ** parts
            return
        for part in range(min(remaining, max_part), 0, -1):
            # take j copies of ``part`` at once so j! enters exactly
            mult = 1
            den = denom
            while mult * part <= remaining:
                den *= part * mult
                flips = (mult if part % 2 == 0 else 0)
                rec(remaining - mult * part, part - 1, parts + mult, den, odd_cycles_even + flips)
                mult += 1

    rec(n, n, 0, 1, 0)
    return Fraction(total, nfact)


def cycle_index_sum_symmetric(n: int, d: int, cap: int = DEFAULT_PARTITION_CAP) -> Fraction:
    """Z(S_n) evaluated at x_k = d."""
    return _cycle_index_walk(n, d, False, cap)


def cycle_index_sum_alternating(n: int, d: int, cap: int = DEFAULT_PARTITION_CAP) -> Fraction:
    """Z(A_n) evaluated at x_k = d (for n = 1 the group is trivial, as is S_1)."""
    if n == 1:
        return cycle_index_sum_symmetric(1, d, cap)
    return _cycle_index_walk(n, d, True, cap)


def cycle_index_sum_by_partitions(n: int, d: int, cap: int = DEFAULT_PARTITION_CAP) -> Fraction:
    """Same as :func:`cycle_index_sum_symmetric`, summed term by term over
    :func:`partitions_iter` in exact rationals (slower, independent code path)."""
    total = Fraction(0)
    for pm in partitions_iter(n, cap):
        den = 1
        for k, jk in enumerate(pm.j, start=1):
            den *= k ** jk * math.factorial(jk)
        total += Fraction(d ** pm.parts, den)
    return total


def closed_form_symmetric(n: int, d: int) -> int:
    """C(n + d - 1, n)."""
    if n < 0 or d < 1:
        raise ArgumentError("need n >= 0 and d >= 1")
    return binomial(n + d - 1, n)


def closed_form_alternating(n: int, d: int) -> Fraction:
    """C(n + d - 1, n) + d(d-1)...(d-n+1)/n!, for n >= 2."""
    if n < 1 or d < 1:
        raise ArgumentError("need n >= 1 and d >= 1")
    if n == 1:
        return Fraction(closed_form_symmetric(1, d))
    return closed_form_symmetric(n, d) + Fraction(falling_factorial(d, n), math.factorial(n))


def _truncated_mul(x: List[int], y: List[int], deg: int) -> List[int]:
    out = [0] * (deg + 1)
    for i, xi in enumerate(x):
        if xi:
            for j in range(deg + 1 - i):
                out[i + j] += xi * y[j]
    return out


def gf_coefficient_oracle(n: int, d: int, cap: int = DEFAULT_SERIES_CAP) -> int:
    """[t^n] (1 + t + t^2 + ...)^d by repeated squaring of truncated series."""
    if n < 0 or d < 1:
        raise ArgumentError("need n >= 0 and d >= 1")
    if (n + 1) * d.bit_length() * (n + 1) > cap:
        raise ResourceError("series multiplication beyond the configured cap")
    base = [1] * (n + 1)
    result = [1] + [0] * n
    e = d
    while e:
        if e & 1:
            result = _truncated_mul(result, base, n)
        e >>= 1
        if e:
            base = _truncated_mul(base, base, n)
    return result[n]
