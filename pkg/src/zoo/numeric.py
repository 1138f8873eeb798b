"""Precision handling, exact combinatorics and tail-bounded series summation.

Real numbers are :class:`mpmath.mpf` values (binary mantissa, unbounded
exponent), so magnitudes such as ``1e-272854`` are ordinary values.  All
precision accounting at the API surface is in decimal digits.
"""

from __future__ import annotations

import math
import os
from contextlib import contextmanager
from dataclasses import dataclass, field, replace
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Iterator, Optional

import mpmath
from mpmath import mp, mpf
from mpmath.libmp import repr_dps

from .errors import ArgumentError, ConvergenceError, DomainError, TermCapExceeded

BigReal = mpf

DEFAULT_MAX_TERMS = 100_000


def _env_max_terms() -> Optional[int]:
    raw = os.environ.get("ZOO_MAX_TERMS")
    if not raw:
        return None
    try:
        value = int(raw)
    except ValueError as exc:
        raise ArgumentError(f"ZOO_MAX_TERMS must be an integer, got {raw!r}") from exc
    if value < 1:
        raise ArgumentError("ZOO_MAX_TERMS must be >= 1")
    return value


@dataclass(frozen=True)
class PrecisionContext:
    """Requested accuracy plus the budget used to reach it.

    ``guard_digits`` defaults to ``15 + ceil(log10(max_terms))``.  The
    ``ZOO_MAX_TERMS`` environment variable, when set, caps ``max_terms``.
    """

    out_digits: int = 30
    guard_digits: Optional[int] = None
    max_terms: int = DEFAULT_MAX_TERMS
    rounding: str = field(default="half-even")

    def __post_init__(self):
        if int(self.out_digits) < 1:
            raise ArgumentError("out_digits must be positive")
        cap = _env_max_terms()
        max_terms = int(self.max_terms)
        if cap is not None:
            max_terms = min(max_terms, cap)
        if max_terms < 1:
            raise ArgumentError("max_terms must be >= 1")
        object.__setattr__(self, "max_terms", max_terms)
        if self.guard_digits is None:
            guard = 15 + math.ceil(math.log10(max_terms)) if max_terms > 1 else 15
            object.__setattr__(self, "guard_digits", guard)
        if self.guard_digits < 10:
            raise ArgumentError("guard_digits must be >= 10")
        if self.rounding != "half-even":
            raise ArgumentError("only round-half-even is supported")

    @property
    def working_digits(self) -> int:
        return self.out_digits + self.guard_digits

    @property
    def tolerance(self) -> mpf:
        """``10**-out_digits`` as a BigReal."""
        return mpf(10) ** (-self.out_digits)

    def with_digits(self, out_digits: int) -> "PrecisionContext":
        return replace(self, out_digits=int(out_digits), guard_digits=None)

    def at_least(self, out_digits: int) -> "PrecisionContext":
        if self.out_digits >= out_digits:
            return self
        return self.with_digits(out_digits)

    @contextmanager
    def work(self, extra: int = 0) -> Iterator[None]:
        """Run the enclosed block at working precision (plus ``extra`` digits)."""
        with mp.workdps(self.working_digits + extra):
            yield


def to_real(value) -> mpf:
    """Convert int / Fraction / str / float / mpf to a BigReal at current precision."""
    if isinstance(value, Fraction):
        return mpf(value.numerator) / value.denominator
    if isinstance(value, mpf):
        return +value
    return mpf(value)


# -- decimal serialization ---------------------------------------------------

_EXACT_EXPONENT_LIMIT = 10 ** 6


def _round_half_even_div(num: int, den: int) -> int:
    q, r = divmod(num, den)
    twice = 2 * r
    if twice > den or (twice == den and q % 2 == 1):
        q += 1
    return q


def to_decimal_string(x, digits: Optional[int] = None) -> str:
    """Scientific-notation decimal string, rounded half-even to ``digits``.

    With ``digits=None`` enough digits are emitted for an exact round trip at
    the current working precision.  Rounding is exact for decimal exponents up
    to 10**6 in magnitude; beyond that mpmath's own conversion is used.
    """
    x = mpf(x)
    if digits is None:
        digits = repr_dps(mp.prec)
    if digits < 1:
        raise ArgumentError("digits must be positive")
    if x == 0:
        return "0." + "0" * (digits - 1) + "e+0" if digits > 1 else "0e+0"
    if not mpmath.isfinite(x):
        raise DomainError("cannot serialize a non-finite value")
    sign = "-" if x < 0 else ""
    _sign, mant, bexp, bits = abs(x)._mpf_  # |x| = mant * 2**bexp, mant has `bits` bits
    est = math.floor((bexp + bits - 1) * math.log10(2))
    if abs(est) > _EXACT_EXPONENT_LIMIT:
        text = mpmath.nstr(abs(x), digits, min_fixed=1, max_fixed=0, strip_zeros=False)
        return sign + _normalize_sci(text, digits)
    # refine the decimal exponent using exact integers: find E with 10**E <= |x| < 10**(E+1)
    for E in (est - 1, est, est + 1, est + 2):
        if _cmp_pow10(mant, bexp, E + 1) < 0:
            break
    while _cmp_pow10(mant, bexp, E) < 0:
        E -= 1
    shift = digits - 1 - E
    num, den = mant, 1
    if bexp >= 0:
        num <<= bexp
    else:
        den <<= -bexp
    if shift >= 0:
        num *= 10 ** shift
    else:
        den *= 10 ** (-shift)
    scaled = _round_half_even_div(num, den)
    if scaled >= 10 ** digits:
        scaled = _round_half_even_div(scaled, 10)
        E += 1
    s = str(scaled)
    mantissa = s[0] + ("." + s[1:] if len(s) > 1 else "")
    return f"{sign}{mantissa}e{E:+d}"


def _cmp_pow10(mant: int, bexp: int, E: int) -> int:
    """Sign of mant*2**bexp - 10**E, exactly."""
    left, right = mant, 1
    if bexp >= 0:
        left <<= bexp
    else:
        right <<= -bexp
    if E >= 0:
        right *= 10 ** E
    else:
        left *= 10 ** (-E)
    return (left > right) - (left < right)


def _normalize_sci(text: str, digits: int) -> str:
    mant, _, exp = text.partition("e")
    if "." not in mant and digits > 1:
        mant += "."
    mant = mant.ljust(digits + 1, "0") if digits > 1 else mant
    return f"{mant}e{int(exp or 0):+d}"


def from_decimal_string(text: str) -> mpf:
    """Parse a decimal string at the current working precision."""
    try:
        return mpf(text.strip())
    except (ValueError, TypeError) as exc:
        raise ArgumentError(f"not a decimal number: {text!r}") from exc


# -- elementary functions ----------------------------------------------------


def const_pi(ctx: PrecisionContext) -> mpf:
    with ctx.work():
        return +mp.pi


def const_e(ctx: PrecisionContext) -> mpf:
    with ctx.work():
        return +mp.e


def exp(x, ctx: PrecisionContext) -> mpf:
    with ctx.work():
        return mpmath.exp(to_real(x))


def log(x, ctx: PrecisionContext) -> mpf:
    with ctx.work():
        x = to_real(x)
        if x <= 0:
            raise DomainError("log requires x > 0")
        return mpmath.log(x)


def sqrt(x, ctx: PrecisionContext) -> mpf:
    with ctx.work():
        x = to_real(x)
        if x < 0:
            raise DomainError("sqrt requires x >= 0")
        return mpmath.sqrt(x)


def pow(x, y, ctx: PrecisionContext) -> mpf:  # noqa: A001 - mirrors the math name
    with ctx.work():
        x, y = to_real(x), to_real(y)
        if x < 0 and y != mpmath.floor(y):
            raise DomainError("negative base with non-integer exponent")
        if x == 0 and y < 0:
            raise DomainError("zero to a negative power")
        return mpmath.power(x, y)


# -- exact combinatorics -----------------------------------------------------


def binomial(n: int, k: int) -> int:
    if n < 0:
        raise ArgumentError("binomial requires n >= 0")
    if k < 0 or k > n:
        raise ArgumentError("binomial requires 0 <= k <= n")
    return math.comb(n, k)


def falling_factorial(d: int, n: int) -> int:
    """d (d-1) ... (d-n+1); the empty product (n = 0) is 1."""
    if n < 0:
        raise ArgumentError("falling_factorial requires n >= 0")
    out = 1
    for i in range(n):
        out *= d - i
        if out == 0:
            break
    return out


@lru_cache(maxsize=None)
def bernoulli(n: int) -> Fraction:
    """Exact Bernoulli number B_n (with B_1 = -1/2)."""
    if n < 0:
        raise ArgumentError("bernoulli requires n >= 0")
    p, q = mpmath.bernfrac(n)
    return Fraction(int(p), int(q))


# -- series ------------------------------------------------------------------


def sum_series(
    term: Callable[[int], object],
    tail_bound: Callable[[int], object],
    ctx: PrecisionContext,
    start: int = 0,
    correction: Optional[Callable[[int], object]] = None,
) -> mpf:
    """Sum ``term(start) + term(start+1) + ...`` in ascending index order.

    After adding ``term(m)`` the loop stops once
    ``tail_bound(m) < 10**-(out_digits+5) * max(1, |S_m|)``.  When
    ``correction`` is given the result is ``S_m + correction(m)`` and
    ``tail_bound(m)`` must bound what the correction leaves over (for
    example an Euler-Maclaurin remainder).

    Raises TermCapExceeded after ``ctx.max_terms`` terms.
    """
    with ctx.work():
        threshold = mpf(10) ** (-(ctx.out_digits + 5))
        total = mpf(0)
        for count in range(ctx.max_terms):
            m = start + count
            total += to_real(term(m))
            bound = to_real(tail_bound(m))
            if bound < threshold * max(1, abs(total)):
                if correction is not None:
                    total += to_real(correction(m))
                return total
    raise TermCapExceeded(
        f"series not converged after {ctx.max_terms} terms (start={start})"
    )


def euler_maclaurin_tail(s, m: int, ctx: PrecisionContext, order: Optional[int] = None):
    """Euler-Maclaurin estimate of sum_{n > m} n**-s and a bound on its error.

    Returns ``(estimate, error_bound)``.  The error bound is the magnitude of
    the first omitted correction term, which for this completely monotone
    summand bounds the remainder.
    """
    with ctx.work():
        s = to_real(s)
        M = mpf(m)
        est = M ** (1 - s) / (s - 1) - M ** (-s) / 2
        rising = s  # s (s+1) ... (s+2k-2)
        power = M ** (-s - 1)
        k = 1
        last = None
        limit = order if order is not None else 200
        while k <= limit:
            t = to_real(bernoulli(2 * k)) / math.factorial(2 * k) * rising * power
            if last is not None and abs(t) > abs(last) and order is None:
                break
            est += t
            last = t
            rising *= (s + 2 * k - 1) * (s + 2 * k)
            power /= M * M
            k += 1
        nxt = to_real(bernoulli(2 * k)) / math.factorial(2 * k) * rising * power
        return est, abs(nxt)


def zeta_euler_maclaurin(s, ctx: PrecisionContext, cutoff: Optional[int] = None) -> mpf:
    """Riemann zeta(s), s > 1, by direct summation plus Euler-Maclaurin tail."""
    wd = ctx.working_digits
    if cutoff is None:
        cutoff = max(10, int(wd * 0.45) + 5)
    with ctx.work():
        s = to_real(s)
        if s <= 1:
            raise DomainError("zeta_euler_maclaurin requires s > 1")
        head = mpmath.fsum(mpf(n) ** (-s) for n in range(1, cutoff + 1))
        tail, err = euler_maclaurin_tail(s, cutoff, ctx)
        if err > mpf(10) ** (-(ctx.out_digits + 3)):
            raise ConvergenceError("Euler-Maclaurin cutoff too small for the requested digits")
        return head + tail


def bracket_root(
    f: Callable[[mpf], mpf],
    lo,
    hi,
    ctx: PrecisionContext,
    xtol=None,
    max_iter: int = 2000,
) -> mpf:
    """Root of ``f`` in ``[lo, hi]`` by the Illinois variant of regula falsi.

    Requires a sign change across the bracket; keeps the bracket throughout.
    """
    with ctx.work():
        a, b = to_real(lo), to_real(hi)
        fa, fb = f(a), f(b)
        if fa == 0:
            return a
        if fb == 0:
            return b
        if (fa > 0) == (fb > 0):
            raise ConvergenceError("no sign change across bracket")
        if xtol is None:
            xtol = mpf(10) ** (-(ctx.out_digits + 3)) * max(1, abs(a), abs(b))
        side = 0
        for _ in range(max_iter):
            c = (a * fb - b * fa) / (fb - fa)
            if not (min(a, b) < c < max(a, b)):
                c = (a + b) / 2
            fc = f(c)
            if fc == 0 or abs(b - a) < xtol:
                return c
            if (fc > 0) == (fb > 0):
                b, fb = c, fc
                if side == -1:
                    fa /= 2
                side = -1
            else:
                a, fa = c, fc
                if side == 1:
                    fb /= 2
                side = 1
            if abs(b - a) < xtol:
                return (a + b) / 2
        raise ConvergenceError("bracketed root search did not converge")
