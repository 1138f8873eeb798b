"""Special functions at arbitrary precision.

Everything here works on real arguments only.  Each function takes a
:class:`~zoo.numeric.PrecisionContext` and returns an ``mpf`` computed at the
context's working precision.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import mpmath
from mpmath import mp, mpf

from .errors import ConvergenceError, DomainError, RangeError
from .numeric import PrecisionContext, bernoulli, sum_series, to_real

_FACTORIAL_LIMIT = 2000


def _is_half_integer(nu) -> bool:
    if isinstance(nu, Fraction):
        return nu.denominator == 2
    v = to_real(nu)
    return (2 * v) == mpmath.floor(2 * v) and v != mpmath.floor(v)


# -- gamma family ------------------------------------------------------------


def _stirling_shift(x: mpf, wd: int) -> int:
    # Terms of the Stirling series shrink down to about exp(-2 pi x); pick the
    # shift so that this floor sits below the working precision.
    target = (wd + 8) * math.log(10) / (2 * math.pi) + 2
    return max(0, math.ceil(target - float(x)))


def loggamma(x, ctx: PrecisionContext) -> mpf:
    """log Gamma(x) for x > 0 via argument shift and the Stirling series."""
    with ctx.work(5):
        x = to_real(x)
        if x <= 0:
            raise DomainError("loggamma requires x > 0")
        wd = mp.dps
        shift = _stirling_shift(x, wd)
        y = x + shift
        eps = mpf(10) ** (-wd - 2)
        acc = (y - mpf(1) / 2) * mpmath.log(y) - y + mpmath.log(2 * mp.pi) / 2
        ypow = y
        y2 = y * y
        prev = None
        k = 1
        while True:
            b = bernoulli(2 * k)
            t = mpf(b.numerator) / b.denominator / ((2 * k) * (2 * k - 1) * ypow)
            if prev is not None and abs(t) > abs(prev):
                raise ConvergenceError("Stirling series diverged before reaching precision")
            acc += t
            if abs(t) < eps * max(1, abs(acc)):
                break
            prev = t
            ypow *= y2
            k += 1
        if shift:
            prod = mpf(1)
            for j in range(shift):
                prod *= x + j
            acc -= mpmath.log(prod)
        return acc


def gamma(x, ctx: PrecisionContext) -> mpf:
    """Gamma(x) for x > 0 with relative error below 10**-out_digits."""
    with ctx.work():
        xr = to_real(x)
        if xr <= 0:
            raise DomainError("gamma requires x > 0")
        if xr == mpmath.floor(xr) and xr <= _FACTORIAL_LIMIT:
            return mpf(math.factorial(int(xr) - 1))
        lg = loggamma(xr, ctx)
        extra = max(0, int(mpmath.log10(abs(lg) + 1))) + 3
    with ctx.work(extra):
        lg = loggamma(xr, PrecisionContext(ctx.out_digits + extra, max_terms=ctx.max_terms))
        return mpmath.exp(lg)


def digamma(x, ctx: PrecisionContext) -> mpf:
    """psi(x) = Gamma'(x)/Gamma(x) for x > 0.

    Recurrence psi(x) = psi(x + N) - sum 1/(x + j) moves the argument to
    where the asymptotic series (truncation error below the first omitted
    term) reaches working precision.
    """
    with ctx.work(5):
        x = to_real(x)
        if x <= 0:
            raise DomainError("digamma requires x > 0")
        wd = mp.dps
        shift = _stirling_shift(x, wd)
        y = x + shift
        eps = mpf(10) ** (-wd - 2)
        acc = mpmath.log(y) - 1 / (2 * y)
        y2 = y * y
        ypow = y2
        prev = None
        k = 1
        while True:
            b = bernoulli(2 * k)
            t = -mpf(b.numerator) / b.denominator / (2 * k * ypow)
            if prev is not None and abs(t) > abs(prev):
                raise ConvergenceError("digamma asymptotic series diverged")
            acc += t
            if abs(t) < eps * max(1, abs(acc)):
                break
            prev = t
            ypow *= y2
            k += 1
        if shift:
            acc -= mpmath.fsum(1 / (x + j) for j in range(shift))
        return acc


def beta(a, b, ctx: PrecisionContext) -> mpf:
    """Euler beta B(a, b) = Gamma(a) Gamma(b) / Gamma(a + b), a, b > 0."""
    with ctx.work():
        a, b = to_real(a), to_real(b)
        if a <= 0 or b <= 0:
            raise DomainError("beta requires a, b > 0")
        inner = PrecisionContext(ctx.out_digits + 5, max_terms=ctx.max_terms)
        lg = loggamma(a, inner) + loggamma(b, inner) - loggamma(a + b, inner)
        extra = max(0, int(mpmath.log10(abs(lg) + 1))) + 3
    with ctx.work(extra):
        inner = PrecisionContext(ctx.out_digits + extra + 5, max_terms=ctx.max_terms)
        lg = loggamma(a, inner) + loggamma(b, inner) - loggamma(a + b, inner)
        return mpmath.exp(lg)


# -- Bessel functions --------------------------------------------------------

J0_MAX_ARG = 10 ** 6


def _hankel_coeff(k: int) -> Fraction:
    # |a_k(0)| = (1^2 3^2 ... (2k-1)^2) / (k! 8^k); the sign is (-1)^k.
    return _HANKEL_CACHE_get(k)


_HANKEL_CACHE = [Fraction(1)]


def _HANKEL_CACHE_get(k: int) -> Fraction:
    while len(_HANKEL_CACHE) <= k:
        j = len(_HANKEL_CACHE)
        _HANKEL_CACHE.append(_HANKEL_CACHE[-1] * (2 * j - 1) ** 2 / (8 * j))
    return _HANKEL_CACHE[k]


def j0_switchover(working_digits: int) -> float:
    """Argument above which the Hankel expansion of J0 reaches working precision."""
    return (working_digits + 5) * math.log(10) / 2 + 2


def _j0_series(x: mpf, wd: int) -> mpf:
    extra = int(float(abs(x)) * 0.4343) + 5
    with mp.workdps(wd + extra):
        x = +x
        h = -(x * x) / 4
        term = mpf(1)
        total = mpf(1)
        eps = mpf(10) ** (-(wd + 3))
        k = 0
        while True:
            k += 1
            term = term * h / (k * k)
            total += term
            if abs(term) < eps and k > abs(x) / 2:
                break
    return +total


def _j0_hankel(x: mpf, wd: int) -> mpf:
    with mp.workdps(wd + 5):
        x = +x
        eps = mpf(10) ** (-(wd + 3))
        P = mpf(0)
        Q = mpf(0)
        xpow = mpf(1)
        prev = None
        k = 0
        while True:
            c = _hankel_coeff(k)
            t = (mpf(c.numerator) / c.denominator) / xpow
            if prev is not None and t > prev:
                raise ConvergenceError("Hankel expansion diverged; argument too small")
            sign = -1 if (k // 2) % 2 else 1
            if k % 2 == 0:
                P += sign * t
            else:
                Q -= sign * t
            if t < eps:
                break
            prev = t
            xpow *= x
            k += 1
        chi = x - mp.pi / 4
        return mpmath.sqrt(2 / (mp.pi * x)) * (P * mpmath.cos(chi) - Q * mpmath.sin(chi))


def bessel_j0(x, ctx: PrecisionContext) -> mpf:
    """J0(x) with absolute error below 10**-out_digits for |x| <= 10**6.

    Power series (with enough extra digits to absorb its cancellation) below
    :func:`j0_switchover`, Hankel asymptotic expansion above it.
    """
    with ctx.work():
        x = abs(to_real(x))
        if x > J0_MAX_ARG:
            raise RangeError(f"bessel_j0 supports |x| <= {J0_MAX_ARG}")
        wd = ctx.working_digits
        if x > j0_switchover(wd):
            return +_j0_hankel(x, wd)
        return +_j0_series(x, wd)


CLOSED_FORM_MAX_ORDER = 500


def _bessel_k_half_integer(nu, x: mpf) -> mpf:
    # K_(n+1/2)(x) = sqrt(pi/(2x)) e^-x sum_j (n+j)!/(j!(n-j)!) (2x)^-j; each
    # term is the previous one times (n+j+1)(n-j)/((j+1) 2x).
    n = int(mpmath.floor(to_real(nu)))
    term = mpf(1)
    total = mpf(1)
    for j in range(n):
        term = term * ((n + j + 1) * (n - j)) / ((j + 1) * 2 * x)
        total += term
    return mpmath.sqrt(mp.pi / (2 * x)) * mpmath.exp(-x) * total


def _tanh_sinh(f, lo: mpf, hi: mpf, wd: int, max_level: int = 12):
    """Tanh-sinh quadrature on [lo, hi] with step halving.

    Returns (value, estimate_of_error).  The error estimate is the change
    between the last two levels.
    """
    half = (hi - lo) / 2
    eps = mpf(10) ** (-wd)
    pi2 = mp.pi / 2

    def node(u):
        s = pi2 * mpmath.sinh(u)
        ch = mpmath.cosh(s)
        w = pi2 * mpmath.cosh(u) / (ch * ch)
        # distance from the nearer endpoint, computed without cancellation
        d = half * mpmath.exp(-s) / ch if s > 0 else half * mpmath.exp(s) / ch
        return w, d, s > 0

    # u range where weights stay above eps: w ~ exp(-pi/2 exp|u|)
    umax = float(mpmath.log(2 * (wd + 5) * math.log(10) / math.pi)) + 1
    h = mpf(1)
    total = None
    values = []
    for level in range(max_level):
        if level == 0:
            ks = range(-int(umax / float(h)) - 1, int(umax / float(h)) + 2)
        else:
            h = h / 2
            n = int(umax / float(h)) + 2
            ks = range(-n if n % 2 else -n - 1, n + 1, 2)
        s = mpf(0)
        for k in ks:
            u = k * h
            w, d, upper = node(u)
            if w < eps * 1e-5 or d == 0:
                continue
            t = hi - d if upper else lo + d
            s += w * f(t)
        if total is None:
            total = s
        else:
            total = total + s
        est = total * h * half
        values.append(est)
        if len(values) >= 3 and abs(values[-1] - values[-2]) <= eps * abs(values[-1]):
            return values[-1], abs(values[-1] - values[-2])
    raise ConvergenceError("tanh-sinh quadrature did not converge")


def _bessel_k_integral(nu: mpf, x: mpf, wd: int) -> mpf:
    # K_nu(x) = exp(-x) * int_0^inf exp(-2x sinh(t/2)^2) cosh(nu t) dt
    with mp.workdps(wd + 10):
        nu = +nu
        x = +x

        def log_integrand(t):
            return -2 * x * mpmath.sinh(t / 2) ** 2 + nu * t

        # The exponent is concave in t with its maximum at t_peak, so the
        # region where the integrand exceeds 10**-(wd+15) of its peak is an
        # interval [lo, hi].  Past hi the exponent falls with slope <= -1 and
        # the remainder is below the same threshold.  For large orders the
        # peak is narrow; splitting there puts it at an endpoint, where the
        # tanh-sinh nodes cluster.
        t_peak = mpmath.asinh(nu / x) if nu > 0 else mpf(0)
        peak = log_integrand(t_peak)
        floor = peak - (wd + 15) * mpmath.log(10)
        T = max(t_peak + 1, mpmath.asinh((nu + 1) / x) + 1)
        while log_integrand(T) > floor:
            T *= 2

        def edge(inside, outside):
            # bisect for log_integrand = floor between a point above and one below it
            for _ in range(200):
                mid = (inside + outside) / 2
                if log_integrand(mid) > floor:
                    inside = mid
                else:
                    outside = mid
                if abs(outside - inside) < mpf("1e-6") * max(1, abs(t_peak)):
                    break
            return outside

        hi = edge(t_peak, T)
        lo = mpf(0) if log_integrand(mpf(0)) > floor else edge(t_peak, mpf(0))

        def f(t):
            return mpmath.exp(log_integrand(t) - peak) * (1 + mpmath.exp(-2 * nu * t)) / 2

        val = mpf(0)
        if t_peak > lo:
            val += _tanh_sinh(f, lo, t_peak, wd + 5)[0]
        val += _tanh_sinh(f, t_peak, hi, wd + 5)[0]
        return val * mpmath.exp(peak - x)


def bessel_k(nu, x, ctx: PrecisionContext, method: str = "auto") -> mpf:
    """Modified Bessel function K_nu(x) for x >= 1, nu >= 0.

    Half-integer orders up to ``CLOSED_FORM_MAX_ORDER`` use the terminating
    closed form; any other order uses the integral representation with
    tanh-sinh quadrature.  ``method`` may
    force ``"closed"`` or ``"integral"``.
    """
    with ctx.work():
        nu_r, x = to_real(nu), to_real(x)
        if x < 1:
            raise DomainError("bessel_k is only supported for x >= 1")
        if nu_r < 0:
            raise DomainError("bessel_k requires nu >= 0")
        half = _is_half_integer(nu)
        if method == "auto":
            method = "closed" if half and nu_r <= CLOSED_FORM_MAX_ORDER else "integral"
        if method == "closed":
            if not half:
                raise DomainError("closed form only exists for half-integer orders")
            return +_bessel_k_half_integer(nu, x)
        if method != "integral":
            raise DomainError(f"unknown bessel_k method {method!r}")
        return +_bessel_k_integral(nu_r, x, ctx.working_digits)


# -- AGM and complete elliptic integrals -------------------------------------


def agm(a, b, ctx: PrecisionContext) -> mpf:
    with ctx.work(5):
        a, b = to_real(a), to_real(b)
        if a <= 0 or b <= 0:
            raise DomainError("agm requires a, b > 0")
        eps = mpf(10) ** (-(mp.dps - 2))
        for _ in range(200):
            if abs(a - b) <= eps * a:
                return (a + b) / 2
            a, b = (a + b) / 2, mpmath.sqrt(a * b)
    raise ConvergenceError("AGM did not converge")


def _complement(k: mpf) -> mpf:
    return mpmath.sqrt((1 - k) * (1 + k))


def _check_modulus(k: mpf) -> None:
    if k < 0 or k >= 1:
        raise DomainError("elliptic modulus must satisfy 0 <= k < 1")


def elliptic_K(k, ctx: PrecisionContext, k_prime=None) -> mpf:
    """K(k) = pi / (2 AGM(1, k')).

    Pass ``k_prime`` directly when k is close to 1; forming sqrt(1 - k^2)
    would lose the digits that matter there.
    """
    with ctx.work(5):
        k = to_real(k)
        _check_modulus(k)
        if k == 0:
            return mp.pi / 2
        kp = to_real(k_prime) if k_prime is not None else _complement(k)
        return mp.pi / (2 * agm(1, kp, ctx))


def elliptic_E(k, ctx: PrecisionContext, k_prime=None) -> mpf:
    """E(k) = K(k) (1 - sum_n 2^(n-1) c_n^2) from the AGM sequence."""
    with ctx.work(5):
        k = to_real(k)
        _check_modulus(k)
        if k == 0:
            return mp.pi / 2
        kp = to_real(k_prime) if k_prime is not None else _complement(k)
        a, b, c = mpf(1), kp, k
        eps = mpf(10) ** (-(mp.dps - 2))
        acc = c * c / 2
        weight = mpf(1) / 2
        for _ in range(200):
            if abs(c) <= eps:
                break
            a, b, c = (a + b) / 2, mpmath.sqrt(a * b), (a - b) / 2
            weight *= 2
            acc += weight * c * c
        else:
            raise ConvergenceError("AGM for E did not converge")
        K = mp.pi / (2 * a)
        return K * (1 - acc)


# -- theta functions ---------------------------------------------------------


def _check_nome(q: mpf) -> None:
    if not (0 < q < 1):
        raise DomainError("nome must satisfy 0 < q < 1")


def _geometric_tail(last_term: mpf, ratio: mpf) -> mpf:
    if ratio >= 1:
        return mpf("inf")
    return abs(last_term) * ratio / (1 - ratio)


def theta3(q, ctx: PrecisionContext) -> mpf:
    """theta_3(q) = sum_n q^(n^2), terms paired n <-> -n."""
    with ctx.work():
        q = to_real(q)
        _check_nome(q)
        q2 = q * q
        state = {"t": mpf(1), "step": q}

        def term(n):
            if n == 0:
                return mpf(1)
            state["t"] *= state["step"]  # q^(n^2)
            state["step"] *= q2
            return 2 * state["t"]

        def tail(n):
            # next paired term is 2 q^((n+1)^2); later ratios are <= q^(2n+3)
            nxt = 2 * state["t"] * state["step"]
            return nxt + _geometric_tail(nxt, state["step"] * q2)

        return sum_series(term, tail, ctx)


def theta4(q, ctx: PrecisionContext) -> mpf:
    """theta_4(q) = sum_n (-1)^n q^(n^2)."""
    with ctx.work():
        q = to_real(q)
        _check_nome(q)
        q2 = q * q
        state = {"t": mpf(1), "step": q}

        def term(n):
            if n == 0:
                return mpf(1)
            state["t"] *= state["step"]
            state["step"] *= q2
            return 2 * state["t"] if n % 2 == 0 else -2 * state["t"]

        def tail(n):
            nxt = 2 * state["t"] * state["step"]
            return nxt + _geometric_tail(nxt, state["step"] * q2)

        return sum_series(term, tail, ctx)


def theta2(q, ctx: PrecisionContext) -> mpf:
    """theta_2(q) = sum_n q^((n - 1/2)^2) = 2 q^(1/4) sum_{n>=0} q^(n(n+1))."""
    with ctx.work():
        q = to_real(q)
        _check_nome(q)
        q2 = q * q
        lead = 2 * mpmath.root(q, 4)
        state = {"t": mpf(1), "step": q2}

        def term(n):
            if n == 0:
                return lead
            state["t"] *= state["step"]  # q^(n(n+1))
            state["step"] *= q2
            return lead * state["t"]

        def tail(n):
            nxt = lead * state["t"] * state["step"]
            return nxt + _geometric_tail(nxt, state["step"] * q2)

        return sum_series(term, tail, ctx)


@dataclass(frozen=True)
class EllipticPair:
    """Modulus data attached to a nome q = exp(-pi K'/K)."""

    k: mpf
    k_prime: mpf
    K: mpf
    K_prime: mpf
    E: mpf
    E_prime: mpf

    def legendre_residual(self) -> mpf:
        """E K' + E' K - K K' - pi/2 (zero in exact arithmetic)."""
        return self.E * self.K_prime + self.E_prime * self.K - self.K * self.K_prime - mp.pi / 2

    def nome(self) -> mpf:
        return mpmath.exp(-mp.pi * self.K_prime / self.K)


def nome_to_modulus(q, ctx: PrecisionContext) -> EllipticPair:
    """k = theta2^2/theta3^2 and k' = theta4^2/theta3^2, then K, K', E, E'."""
    inner = ctx.with_digits(ctx.out_digits + 5)
    with inner.work():
        q = to_real(q)
        _check_nome(q)
        t2 = theta2(q, inner)
        t3 = theta3(q, inner)
        t4 = theta4(q, inner)
        k = t2 * t2 / (t3 * t3)
        kp = t4 * t4 / (t3 * t3)
        K = elliptic_K(k, inner, k_prime=kp)
        Kp = elliptic_K(kp, inner, k_prime=k)
        E = elliptic_E(k, inner, k_prime=kp)
        Ep = elliptic_E(kp, inner, k_prime=k)
        return EllipticPair(k=k, k_prime=kp, K=K, K_prime=Kp, E=E, E_prime=Ep)


def sinc(x, ctx: PrecisionContext) -> mpf:
    """sin(x)/x with sinc(0) = 1."""
    with ctx.work():
        x = to_real(x)
        if x == 0:
            return mpf(1)
        return mpmath.sin(x) / x
