"""Student-t and Gaussian lattice sums and their Poisson-dual forms.

The primal Student sum is (1/a) sum_n (1 + n^2/a^2)^(-lambda).  Poisson
summation turns it into B(1/2, lambda - 1/2) plus a rapidly convergent series
of modified Bessel functions, so the difference between the sum and the beta
value can be computed without cancellation from the dual side alone.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import mpmath
from mpmath import mp, mpf

from .errors import ArgumentError, ConvergenceError, TermCapExceeded
from .numeric import PrecisionContext, bernoulli, bracket_root, to_real
from .specfun import bessel_k, beta, digamma, gamma, theta3

MAX_LAMBDA = 10 ** 7


@dataclass(frozen=True)
class LatticeSumResult:
    """Both sides of the Student lattice identity for one (a, lambda)."""

    scale_a: mpf
    lam: mpf
    primal_sum: mpf
    beta_target: mpf
    dual_correction: mpf
    terms_used: int
    method: str

    @property
    def deviation(self) -> mpf:
        """primal_sum - beta_target as measured on the side named by ``method``."""
        if self.method == "dual-bessel":
            return self.dual_correction
        return self.primal_sum - self.beta_target


def _check_args(a, lam):
    a, lam = to_real(a), to_real(lam)
    if a <= 0:
        raise ArgumentError("scale a must be positive")
    if lam <= mpf(1) / 2:
        raise ArgumentError("lambda must exceed 1/2")
    if lam > MAX_LAMBDA:
        raise ArgumentError(f"lambda is limited to {MAX_LAMBDA}")
    return a, lam


def _primal_cutoff(a: mpf, wd: int) -> int:
    # The smallest Euler-Maclaurin correction past the cutoff m is about
    # exp(-2 pi sqrt(m^2 + a^2)) relative to f(m); twice the bare requirement
    # leaves room for the poles of order lambda.  The cutoff also keeps
    # m >= 10a so the tail integral's series converges like (1/101)^j.
    return max(int(mpmath.ceil(10 * a)), math.ceil((wd + 10) * math.log(10) / math.pi) + 1)


def _tail_integral(a: mpf, lam: mpf, m: int, eps: mpf) -> mpf:
    """int_m^inf (1 + x^2/a^2)^(-lambda) dx as a series in a^2/(a^2 + m^2)."""
    u0 = a * a / (a * a + m * m)
    s = lam - mpf(1) / 2
    coef = mpf(1)  # (1/2)_j / j!
    upow = mpmath.power(u0, s)
    total = mpf(0)
    j = 0
    while True:
        t = coef * upow / (s + j)
        total += t
        if abs(t) < eps * abs(total):
            break
        coef *= (mpf(1) / 2 + j) / (j + 1)
        upow *= u0
        j += 1
    return a / 2 * total


def _taylor_at(a: mpf, lam: mpf, m: int, order: int):
    """Taylor coefficients c_j of f(m + h) = (1 + (m+h)^2/a^2)^(-lambda)."""
    A = 1 + mpf(m) ** 2 / (a * a)
    u1 = 2 * m / (a * a) / A
    u2 = 1 / (a * a) / A
    p = -lam
    g = [mpf(1)]
    for n in range(1, order + 1):
        acc = (p - (n - 1)) * u1 * g[n - 1]
        if n >= 2:
            acc += (2 * p - (n - 2)) * u2 * g[n - 2]
        g.append(acc / n)
    lead = mpmath.power(A, p)
    return [lead * x for x in g]


def _em_tail(a: mpf, lam: mpf, m: int, eps: mpf) -> mpf:
    """sum_{n > m} f(n) by Euler-Maclaurin around the cutoff m.

    f has branch points at +-ia, at distance rho = sqrt(m^2 + a^2) from m, so
    the correction terms behave like (2k)!/(2 pi rho)^(2k) and keep shrinking
    while 2k < 2 pi rho.  Within that range the series is stopped at the first
    term below ``eps`` relative to the integral.
    """
    integral = _tail_integral(a, lam, m, eps)
    rho = mpmath.sqrt(mpf(m) ** 2 + a * a)
    k_max = max(1, int(mp.pi * rho * 0.9))
    order = 16
    k = 0
    while True:
        order = min(order, 2 * k_max)
        c = _taylor_at(a, lam, m, order)
        total = integral - c[0] / 2
        small = 0
        for k in range(1, order // 2 + 1):
            b = bernoulli(2 * k)
            t = mpf(b.numerator) / b.denominator * c[2 * k - 1] / (2 * k)
            total -= t
            small = small + 1 if abs(t) < eps * abs(integral) else 0
            if small == 2:
                return total
        if order >= 2 * k_max:
            raise ConvergenceError("Euler-Maclaurin tail did not reach precision; raise the cutoff")
        order *= 2


def student_lattice_sum(a, lam, ctx: PrecisionContext) -> mpf:
    """(1/a) sum_{n in Z} (1 + n^2/a^2)^(-lambda), summed on the primal side.

    Terms |n| <= m are added directly in pairs.  When the terms drop below
    the working precision quickly (large lambda) the remainder is the tail
    integral; otherwise it comes from the Euler-Maclaurin formula with exact
    Taylor coefficients at m.
    """
    return _student_primal(a, lam, ctx)[0]


def _student_primal(a, lam, ctx: PrecisionContext):
    with ctx.work():
        a, lam = _check_args(a, lam)
        wd = ctx.working_digits
        eps = mpf(10) ** (-(wd + 5))
        # Where the terms themselves fall below eps first, stop there and
        # add the tail integral: sum_{n>m} f(n) lies within f(m) < eps of it.
        # Otherwise (slow decay) use the Euler-Maclaurin cutoff.
        m_direct = max(1, int(mpmath.ceil(a * mpmath.sqrt(mpmath.power(10, (wd + 5) / lam) - 1))))
        m_em = _primal_cutoff(a, wd)
        m = min(m_direct, m_em)
        if m > ctx.max_terms:
            raise TermCapExceeded(
                f"primal Student sum at a={mpmath.nstr(a, 8)} needs {m} terms "
                f"(cap {ctx.max_terms}); use the dual form"
            )
        inv_a2 = 1 / (a * a)
        s = mpf(0)
        for n in range(m, 0, -1):  # smallest terms first
            s += mpmath.power(1 + n * n * inv_a2, -lam)
        if m == m_direct:
            tail = _tail_integral(a, lam, m, eps)
        else:
            tail = _em_tail(a, lam, m, eps)
        return (1 + 2 * (s + tail)) / a, m


def dual_correction(a, lam, ctx: PrecisionContext, method: str = "auto"):
    """Return (primal - B(1/2, lambda - 1/2), terms) from the Bessel side.

    Every dual term is positive, so the value is certified positive and free
    of cancellation however small it is.  Summation stops when the
    geometric bound from the last term ratio falls below the working
    precision relative to the running total.
    """
    with ctx.work():
        a, lam = _check_args(a, lam)
        nu = lam - mpf(1) / 2
        wd = ctx.working_digits
        eps = mpf(10) ** (-(wd + 5))
        pref = 2 * mpmath.power(2, mpf(3) / 2 - lam) * mpmath.sqrt(mp.pi) / gamma(lam, ctx)
        total = mpf(0)
        prev = None
        n = 0
        while True:
            n += 1
            if n > ctx.max_terms:
                raise TermCapExceeded("dual Bessel sum exceeded the term cap")
            x = 2 * mp.pi * a * n
            t = mpmath.power(x, nu) * bessel_k(nu, x, ctx, method=method)
            total += t
            if prev is not None:
                r = t / prev
                if r < 1 and t * r / (1 - r) < eps * total:
                    break
            prev = t
        return pref * total, n


def dual_bessel_sum(a, lam, ctx: PrecisionContext, method: str = "auto") -> mpf:
    """B(1/2, lambda - 1/2) plus the Bessel-side correction."""
    with ctx.work():
        corr, _ = dual_correction(a, lam, ctx, method=method)
        return beta(mpf(1) / 2, to_real(lam) - mpf(1) / 2, ctx) + corr


def lattice_sum(a, lam, ctx: PrecisionContext, side: str = "auto") -> LatticeSumResult:
    """Evaluate both sides where possible.

    ``side="auto"`` tries the primal sum first and falls back to the dual
    representation when the primal cutoff exceeds ``ctx.max_terms``.
    """
    with ctx.work():
        a_r, lam_r = _check_args(a, lam)
        target = beta(mpf(1) / 2, lam_r - mpf(1) / 2, ctx)
        corr, dual_n = dual_correction(a, lam, ctx)
        if side in ("auto", "primal"):
            try:
                primal, m = _student_primal(a, lam, ctx)
                return LatticeSumResult(a_r, lam_r, primal, target, corr, 2 * m + 1, "primal")
            except TermCapExceeded:
                if side == "primal":
                    raise
        return LatticeSumResult(a_r, lam_r, target + corr, target, corr, dual_n, "dual-bessel")


# -- Gaussian lattice sum ----------------------------------------------------


def gaussian_lattice_sum(a, ctx: PrecisionContext) -> mpf:
    """(1/a) sum_n exp(-n^2/a^2) = theta_3(exp(-1/a^2)) / a."""
    with ctx.work():
        a = to_real(a)
        if a <= 0:
            raise ArgumentError("scale a must be positive")
        return theta3(mpmath.exp(-1 / (a * a)), ctx) / a


def gaussian_dual_correction(a, ctx: PrecisionContext) -> mpf:
    """(1/a) sum_n exp(-n^2/a^2) - sqrt(pi) = 2 sqrt(pi) sum_{n>=1} exp(-pi^2 a^2 n^2)."""
    with ctx.work():
        a = to_real(a)
        if a <= 0:
            raise ArgumentError("scale a must be positive")
        wd = ctx.working_digits
        eps = mpf(10) ** (-(wd + 5))
        c = (mp.pi * a) ** 2
        total = mpf(0)
        n = 1
        while True:
            t = mpmath.exp(-c * n * n)
            total += t
            # later terms shrink by at least exp(-c(2n+1)) each
            r = mpmath.exp(-c * (2 * n + 1))
            if r < 1 and t * r / (1 - r) < eps * total:
                break
            n += 1
        return 2 * mpmath.sqrt(mp.pi) * total


# -- worst-case error model --------------------------------------------------


def lambda_star(a, ctx: PrecisionContext) -> mpf:
    """Root of psi(lambda) = log(pi a), bracketed in [1, 10 pi a]."""
    with ctx.work():
        a = to_real(a)
        if a < 1:
            raise ArgumentError("lambda_star requires a >= 1")
        target = mpmath.log(mp.pi * a)
        lo, hi = mpf(1), 10 * mp.pi * a

        def f(x):
            return digamma(x, ctx) - target

        if f(lo) * f(hi) > 0:
            raise ConvergenceError("no sign change of psi(lambda) - log(pi a) in [1, 10 pi a]")
        return bracket_root(f, lo, hi, ctx)


def worst_case_error(a, ctx: PrecisionContext) -> mpf:
    """The error model sqrt(2/a) exp(-pi a) for the maximal deviation over lambda."""
    with ctx.work():
        a = to_real(a)
        if a <= 0:
            raise ArgumentError("scale a must be positive")
        return mpmath.sqrt(2 / a) * mpmath.exp(-mp.pi * a)
