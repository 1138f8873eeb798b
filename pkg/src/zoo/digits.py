"""Digit-count sequences, their generating functions, and a near-identity built on them.

a(n) and b(n) count the even and odd decimal digits of n (zero counts as one
even digit), and c_k(n) = k^5 a(n) - b(n)/k^5.  The series sum c_k(n)/k^n is
within about k^-105 of the rational (k^11 - 1)/(k^4 (k^2 - 1)).
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Dict, List, Optional, Tuple

import mpmath
from mpmath import mpf

from .errors import ArgumentError, TermCapExceeded
from .numeric import PrecisionContext

GF_TERMS_DEFAULT = 6


@dataclass(frozen=True)
class DigitCounts:
    n: int
    a: int
    b: int
    d: int


def digit_counts(n: int) -> DigitCounts:
    """Even, odd and total decimal digit counts of n >= 0."""
    if n < 0:
        raise ArgumentError("n must be non-negative")
    s = str(n)
    odd = sum(1 for ch in s if ch in "13579")
    return DigitCounts(n, len(s) - odd, odd, len(s))


def _check_k(k: int) -> None:
    if k < 2:
        raise ArgumentError("k must be >= 2")


def c_sequence_value(n: int, k: int) -> Fraction:
    """c_k(n) = k^5 a(n) - b(n)/k^5."""
    _check_k(k)
    dc = digit_counts(n)
    return Fraction(k ** 5 * dc.a) - Fraction(dc.b, k ** 5)


def default_direct_terms(k: int, digits: int) -> int:
    return 130 + math.ceil(10 * digits / math.log10(k))


def direct_sum_exact(k: int, n_terms: int) -> Fraction:
    """sum_{n < n_terms} c_k(n)/k^n as an exact fraction."""
    _check_k(k)
    if n_terms < 1:
        raise ArgumentError("n_terms must be >= 1")
    k10 = k ** 10
    num = 0
    scale = 1
    # Horner from the last term: num / k^(n_terms - 1) after the loop
    for n in range(n_terms - 1, -1, -1):
        dc = digit_counts(n)
        num += (k10 * dc.a - dc.b) * scale
        scale *= k
    return Fraction(num, k ** (n_terms - 1 + 5))


def direct_tail_bound(k: int, n_terms: int) -> Fraction:
    """Upper bound for sum_{n >= N} |c_k(n)|/k^n.

    |c_k(n)| <= k^5 d(n) and d(N + j) <= d(N) + j, so the remainder is at most
    k^(5-N) (d(N) k/(k-1) + k/(k-1)^2).
    """
    d = digit_counts(n_terms).d
    return Fraction(k ** 5, k ** n_terms) * (Fraction(d * k, k - 1) + Fraction(k, (k - 1) ** 2))


def direct_sum(k: int, n_terms: int, ctx: PrecisionContext) -> mpf:
    """sum_{n < n_terms} c_k(n)/k^n rounded to working precision."""
    if n_terms > ctx.max_terms:
        raise TermCapExceeded(f"{n_terms} terms exceed the cap {ctx.max_terms}")
    exact = direct_sum_exact(k, n_terms)
    with ctx.work():
        return mpf(exact.numerator) / exact.denominator


def gf_term_exact(k: int, n: int) -> Fraction:
    """(k^(5 - 2*10^n) - k^(-5 - 10^n)) / (1 + k^(-10^n))."""
    p = 10 ** n
    kp = k ** p
    # multiply top and bottom by k^(2p + 5)
    return Fraction(k ** 10 - kp, k ** 5 * kp * (kp + 1))


def gf_term_log10(k: int, n: int) -> float:
    """log10 of the size of the n-th generating-function term."""
    return -(5 + 10 ** n) * math.log10(k)


def gf_closed_sum(k: int, gf_terms: int, ctx: PrecisionContext) -> mpf:
    """k^5 + k/(k-1) sum_{n < gf_terms} T_n, the generating function at x = 1/k.

    Each T_n is an exact fraction; once |T_n| drops below the working
    precision it and all later terms (each far smaller than the previous
    one) are omitted.  Their sum is below twice the first omitted term.
    """
    _check_k(k)
    if gf_terms < 1:
        raise ArgumentError("gf_terms must be >= 1")
    with ctx.work():
        wd = ctx.working_digits
        total = Fraction(0)
        for n in range(gf_terms):
            if gf_term_log10(k, n) < -(wd + 20):
                break
            total += gf_term_exact(k, n)
        value = Fraction(k ** 5) + Fraction(k, k - 1) * total
        return mpf(value.numerator) / value.denominator


def approx_fraction(k: int) -> Fraction:
    """k^5 + (k^4 - k^-5)/(k - 1/k) = (k^11 - 1)/(k^4 (k^2 - 1))."""
    _check_k(k)
    return Fraction(k ** 11 - 1, k ** 4 * (k * k - 1))


def epsilon_exact(k: int, ctx: PrecisionContext, gf_terms: int = GF_TERMS_DEFAULT) -> mpf:
    """approx_fraction(k) minus the generating-function value.

    The fraction equals k^5 + k/(k-1)(T_0 + T_1), so the difference is
    -k/(k-1) sum_{n>=2} T_n.  Summing that directly keeps full relative
    precision however small the difference is.
    """
    _check_k(k)
    with ctx.work():
        total = mpf(0)
        for n in range(2, gf_terms):
            p = 10 ** n
            kp = mpmath.power(k, -p)  # exponent range is unbounded
            total += (mpf(k) ** 5 * kp * kp - kp / mpf(k) ** 5) / (1 + kp)
        return -mpf(k) / (k - 1) * total


def pattern_string(p: int) -> str:
    """The rational for k = 10^p written out from its digit pattern.

    Numerator: eleven 1's separated by p-1 zeros.  Denominator: 1, p-1
    zeros, 1, then 4p zeros.
    """
    if p < 1:
        raise ArgumentError("p must be >= 1")
    gap = "0" * (p - 1)
    numerator = gap.join(["1"] * 11)
    denominator = "1" + gap + "1" + "0" * (4 * p)
    return f"{numerator}/{denominator}"


def parse_fraction(text: str) -> Fraction:
    num, den = text.split("/")
    return Fraction(int(num), int(den))


# -- generating-function coefficient streams ---------------------------------


def gf_coefficients(order: int) -> Dict[str, List[int]]:
    """Coefficients of x^0 .. x^(order-1) of the d, b and a generating functions.

    d: 1 + (1/(1-x)) sum x^(10^n)
    b: (1/(1-x)) sum x^(10^n)/(1 + x^(10^n))
    a: 1 + (1/(1-x)) sum x^(2*10^n)/(1 + x^(10^n))
    Each inner series is expanded as an alternating geometric series and the
    1/(1-x) factor becomes a running sum.
    """
    if order < 1:
        raise ArgumentError("order must be >= 1")
    inner_d = [0] * order
    inner_b = [0] * order
    inner_a = [0] * order
    p = 1
    while p < order:
        inner_d[p] += 1
        j = 1
        while j * p < order:
            sign = 1 if j % 2 else -1
            inner_b[j * p] += sign  # x^p/(1+x^p) = sum_{j>=1} (-1)^(j+1) x^(jp)
            if j >= 2:
                inner_a[j * p] -= sign  # x^(2p)/(1+x^p) = sum_{j>=2} (-1)^j x^(jp)
            j += 1
        p *= 10
    out = {}
    for name, inner, const in (("d", inner_d, 1), ("b", inner_b, 0), ("a", inner_a, 1)):
        acc = 0
        coeffs = []
        for m in range(order):
            acc += inner[m]
            coeffs.append(acc + (const if m == 0 else 0))
        out[name] = coeffs
    return out


def c_gf_coefficients(k: int, order: int) -> List[Fraction]:
    """Coefficients of the c_k generating function, built from the a and b streams."""
    _check_k(k)
    streams = gf_coefficients(order)
    k5 = k ** 5
    return [Fraction(k5 * a) - Fraction(b, k5) for a, b in zip(streams["a"], streams["b"])]


def load_digit_table(path) -> List[Tuple[int, int, int]]:
    """Read (n, a, b) rows from a CSV file with header n,a,b."""
    rows = []
    with Path(path).open(newline="") as fh:
        for rec in csv.DictReader(fh):
            rows.append((int(rec["n"]), int(rec["a"]), int(rec["b"])))
    return rows


def epsilon_bracket_check(eps: mpf, p: int) -> bool:
    """True when 10^(-105p-1) < |eps| < 10^(-105p+1)."""
    mag = abs(eps)
    return mpf(10) ** (-105 * p - 1) < mag < mpf(10) ** (-105 * p + 1)


def gf_identity_gap(k: int, n_terms: int, ctx: PrecisionContext, gf_terms: Optional[int] = None) -> mpf:
    """|direct_sum - gf_closed_sum|, to be compared with :func:`direct_tail_bound`."""
    with ctx.work():
        return abs(direct_sum(k, n_terms, ctx) - gf_closed_sum(k, gf_terms or GF_TERMS_DEFAULT, ctx))


def direct_sum_error(k: int, n_terms: int, ctx: PrecisionContext) -> mpf:
    """approx_fraction(k) minus the truncated direct sum, formed exactly then rounded."""
    if n_terms > ctx.max_terms:
        raise TermCapExceeded(f"{n_terms} terms exceed the cap {ctx.max_terms}")
    diff = approx_fraction(k) - direct_sum_exact(k, n_terms)
    with ctx.work():
        return mpf(diff.numerator) / diff.denominator
