"""Moments of the discrete normal law on Z and on Z + 1/2.

With weights q^(x^2) on x in Z (or x in Z - 1/2) the normalised second and
fourth moments have closed forms in the complete elliptic integrals attached
to the nome q.  This module evaluates both the lattice sums and the closed
forms so each can serve as the other's oracle.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import mpmath
from mpmath import mp, mpf

from .errors import DomainError
from .numeric import PrecisionContext, bracket_root, sum_series, to_real
from .specfun import EllipticPair, elliptic_E, elliptic_K, nome_to_modulus, theta3

PRECISION_FLOOR = 40
OFFSETS = (Fraction(0), Fraction(1, 2))
ORDERS = (0, 2, 4)


def _floor(ctx: PrecisionContext) -> PrecisionContext:
    return ctx.at_least(PRECISION_FLOOR)


@dataclass(frozen=True)
class ThetaMomentResult:
    """A lattice moment sum next to its elliptic closed form (when one exists)."""

    q: mpf
    offset: Fraction
    order: int
    direct_value: mpf
    exact_value: Optional[mpf]
    elliptic: EllipticPair

    @property
    def discrepancy(self) -> Optional[mpf]:
        if self.exact_value is None:
            return None
        return self.direct_value - self.exact_value


def _check(q, offset, order):
    q = to_real(q)
    if not (0 < q < 1):
        raise DomainError("nome must satisfy 0 < q < 1")
    offset = Fraction(offset)
    if offset not in OFFSETS:
        raise DomainError("offset must be 0 or 1/2")
    if order not in ORDERS:
        raise DomainError("order must be 0, 2 or 4")
    return q, offset, order


def theta_moment_sum(q, offset, order: int, ctx: PrecisionContext) -> mpf:
    """sum_{n in Z} (n - offset)^order q^((n - offset)^2), n and 1 - n (or -n) paired."""
    ctx = _floor(ctx)
    with ctx.work():
        q, offset, order = _check(q, offset, order)
        off = mpf(offset.numerator) / offset.denominator

        def x_of(i):
            # i-th positive lattice point: i for offset 0, i - 1/2 otherwise
            return mpf(i) if offset == 0 else i + 1 - off

        def weight(x):
            return x ** order * mpmath.power(q, x * x)

        def term(i):
            if offset == 0:
                if i == 0:
                    return mpf(1) if order == 0 else mpf(0)
                return 2 * weight(x_of(i))
            return 2 * weight(x_of(i))

        def tail(i):
            # Term ratios ((x+1)/x)^order q^(2x+1) decrease in x; once the
            # next ratio is below 1 the remainder is geometric.
            x = x_of(i + 1)
            r = ((x + 1) / x) ** order * mpmath.power(q, 2 * x + 1)
            if r >= 1:
                return mpf("inf")
            return 2 * weight(x) / (1 - r)

        return sum_series(term, tail, ctx)


def direct_ratio(q, offset, order: int, ctx: PrecisionContext) -> mpf:
    """Normalised moment: order-th moment sum divided by the order-0 sum."""
    ctx = _floor(ctx)
    with ctx.work():
        return theta_moment_sum(q, offset, order, ctx) / theta_moment_sum(q, offset, 0, ctx)


def second_moment_ratio_exact(q, ctx: PrecisionContext) -> mpf:
    """sigma^2 = (K/pi)^2 (E/K - k'^2) for weights q^(n^2) on Z."""
    ctx = _floor(ctx)
    with ctx.work():
        ell = nome_to_modulus(q, ctx)
        return _sigma2(ell)


def _sigma2(ell: EllipticPair) -> mpf:
    return (ell.K / mp.pi) ** 2 * (ell.E / ell.K - ell.k_prime ** 2)


def fourth_moment_correction(q, ctx: PrecisionContext) -> mpf:
    """theta_3^8 (k k')^2 / 8, the excess of the fourth-moment ratio over 3 sigma^4."""
    ctx = _floor(ctx)
    with ctx.work():
        ell = nome_to_modulus(q, ctx)
        t3 = theta3(q, ctx)
        return t3 ** 8 * (ell.k * ell.k_prime) ** 2 / 8


def fourth_moment_ratio_exact(q, ctx: PrecisionContext) -> mpf:
    """3 sigma^4 + theta_3^8 (k k')^2 / 8."""
    ctx = _floor(ctx)
    with ctx.work():
        ell = nome_to_modulus(q, ctx)
        t3 = theta3(q, ctx)
        s2 = _sigma2(ell)
        return 3 * s2 ** 2 + t3 ** 8 * (ell.k * ell.k_prime) ** 2 / 8


def theta2_second_moment_ratio_exact(q, ctx: PrecisionContext) -> mpf:
    """E K / pi^2 for weights q^((n - 1/2)^2) on Z - 1/2."""
    ctx = _floor(ctx)
    with ctx.work():
        ell = nome_to_modulus(q, ctx)
        return ell.E * ell.K / mp.pi ** 2


def moment_result(q, offset, order: int, ctx: PrecisionContext) -> ThetaMomentResult:
    """Direct normalised moment plus the matching closed form."""
    ctx = _floor(ctx)
    with ctx.work():
        q_r, offset, order = _check(q, offset, order)
        direct = direct_ratio(q_r, offset, order, ctx) if order else theta_moment_sum(q_r, offset, 0, ctx)
        exact: Optional[mpf] = None
        if offset == 0 and order == 2:
            exact = second_moment_ratio_exact(q_r, ctx)
        elif offset == 0 and order == 4:
            exact = fourth_moment_ratio_exact(q_r, ctx)
        elif offset == Fraction(1, 2) and order == 2:
            exact = theta2_second_moment_ratio_exact(q_r, ctx)
        return ThetaMomentResult(q_r, offset, order, direct, exact, nome_to_modulus(q_r, ctx))


@dataclass(frozen=True)
class UnitVarianceSolution:
    c: mpf
    k: mpf
    k_prime: mpf
    residual: mpf


def _sigma2_from_kprime(kp: mpf, ctx: PrecisionContext) -> mpf:
    k = mpmath.sqrt((1 - kp) * (1 + kp))
    K = elliptic_K(k, ctx, k_prime=kp)
    E = elliptic_E(k, ctx, k_prime=kp)
    return (K / mp.pi) ** 2 * (E / K - kp * kp)


def solve_unit_variance(ctx: PrecisionContext) -> UnitVarianceSolution:
    """Find the modulus with sigma^2 = 1 and the matching c, q = exp(-c).

    The root is sought in log k', which is well scaled where k is within
    1e-7 of 1.  Then c = pi K'/K.
    """
    ctx = _floor(ctx)
    inner = ctx.with_digits(ctx.out_digits + 5)
    with inner.work():

        def f(t):
            return _sigma2_from_kprime(mpmath.exp(t), inner) - 1

        t = bracket_root(f, mpmath.log(mpf("1e-6")), mpmath.log(mpf("1e-2")), inner)
        kp = mpmath.exp(t)
        k = mpmath.sqrt((1 - kp) * (1 + kp))
        K = elliptic_K(k, inner, k_prime=kp)
        Kp = elliptic_K(kp, inner, k_prime=k)
        c = mp.pi * Kp / K
        residual = second_moment_ratio_exact(mpmath.exp(-c), inner) - 1
        return UnitVarianceSolution(c=+c, k=+k, k_prime=+kp, residual=+residual)


def solve_unit_variance_c(ctx: PrecisionContext) -> mpf:
    return solve_unit_variance(ctx).c
