"""Special functions checked against mpmath's independent implementations."""

from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from mpmath import mp, mpf

from zoo.errors import DomainError, RangeError
from zoo.numeric import PrecisionContext
from zoo.specfun import (
    agm,
    bessel_j0,
    bessel_k,
    beta,
    digamma,
    elliptic_E,
    elliptic_K,
    gamma,
    loggamma,
    nome_to_modulus,
    sinc,
    theta2,
    theta3,
    theta4,
)

CTX = PrecisionContext(out_digits=40)
TOL = mpf(10) ** -38


def close(x, y, tol=TOL):
    return abs(x - y) <= tol * max(1, abs(y))


@pytest.mark.parametrize("x", ["0.5", "1", "4.5", "17.25", "123.4", "2001"])
def test_gamma_family(x):
    with CTX.work():
        x = mpf(x)
        assert close(loggamma(x, CTX), mpmath.loggamma(x))
        assert close(digamma(x, CTX), mpmath.digamma(x))
        if x < 200:
            assert close(gamma(x, CTX), mpmath.gamma(x))


def test_gamma_integer_is_factorial():
    with CTX.work():
        assert gamma(11, CTX) == 3628800


def test_beta_half():
    with CTX.work():
        assert close(beta(mpf(1) / 2, mpf(9) / 2, CTX), mpmath.beta(mpf(1) / 2, mpf(9) / 2))
        assert close(beta(mpf(1) / 2, mpf(1) / 2, CTX), mp.pi)


@pytest.mark.parametrize("x", ["0", "0.3", "1", "7.5", "30", "85", "250.5", "123456.7"])
def test_j0_against_mpmath(x):
    with CTX.work():
        x = mpf(x)
        assert abs(bessel_j0(x, CTX) - mpmath.besselj(0, x)) < TOL


def test_j0_range_limit():
    with pytest.raises(RangeError):
        bessel_j0(mpf("1e7"), CTX)


@pytest.mark.parametrize(
    "nu, x",
    [("0.5", "2"), ("4.5", "30"), ("1", "3"), ("2", "40"), ("1.3", "7"), ("0", "1.5")],
)
def test_bessel_k_against_mpmath(nu, x):
    with CTX.work():
        nu, x = mpf(nu), mpf(x)
        assert close(bessel_k(nu, x, CTX), mpmath.besselk(nu, x))


def test_bessel_k_closed_matches_integral():
    with CTX.work():
        a = bessel_k(mpf(5) / 2, mpf(6), CTX, method="closed")
        b = bessel_k(mpf(5) / 2, mpf(6), CTX, method="integral")
        assert close(a, b)


def test_bessel_k_domain():
    with pytest.raises(DomainError):
        bessel_k(1, mpf("0.5"), CTX)


@pytest.mark.parametrize("nu", ["0", "0.5", "1"])
def test_bessel_k_asymptotic_ratio(nu):
    # K_nu(x) ~ sqrt(pi/(2x)) e^-x (1 + (4 nu^2 - 1)/(8x) + ...); at x = 50 the
    # first correction stays under 1% for nu up to about 1.1
    with CTX.work():
        x = mpf(50)
        ratio = bessel_k(mpf(nu), x, CTX) * mpmath.exp(x) * mpmath.sqrt(2 * x / mp.pi)
        assert abs(ratio - 1) < mpf("0.01")


def test_agm_known_value():
    with CTX.work():
        assert close(agm(1, mpmath.sqrt(2), CTX), mpmath.agm(1, mpmath.sqrt(2)))


@pytest.mark.parametrize("k", ["0.1", "0.5", "0.9", "0.999999"])
def test_elliptic_integrals(k):
    with CTX.work():
        k = mpf(k)
        assert close(elliptic_K(k, CTX), mpmath.ellipk(k * k))
        assert close(elliptic_E(k, CTX), mpmath.ellipe(k * k))


def test_elliptic_edges():
    with CTX.work():
        assert close(elliptic_K(0, CTX), mp.pi / 2)
        assert close(elliptic_E(0, CTX), mp.pi / 2)
    with pytest.raises(DomainError):
        elliptic_K(1, CTX)


@pytest.mark.parametrize("q", ["0.05", "0.3", "0.6065306597126334", "0.9"])
def test_theta_against_mpmath(q):
    with CTX.work():
        q = mpf(q)
        assert close(theta2(q, CTX), mpmath.jtheta(2, 0, q))
        assert close(theta3(q, CTX), mpmath.jtheta(3, 0, q))
        assert close(theta4(q, CTX), mpmath.jtheta(4, 0, q))


@pytest.mark.parametrize("q", ["0.1", "0.3", "exp(-1/2)"])
def test_jacobi_quartic_identity(q):
    with CTX.work():
        q = mpmath.exp(-mpf(1) / 2) if q == "exp(-1/2)" else mpf(q)
        lhs = theta2(q, CTX) ** 4 + theta4(q, CTX) ** 4
        assert abs(lhs - theta3(q, CTX) ** 4) <= mpf(10) ** -(CTX.out_digits - 5) * lhs


@pytest.mark.parametrize("t", ["1/2", "1", "2"])
def test_theta3_modular_identity(t):
    # sum exp(-t n^2) = sqrt(pi/t) sum exp(-pi^2 n^2 / t)
    with CTX.work():
        frac = Fraction(t)
        t = mpf(frac.numerator) / frac.denominator
        lhs = theta3(mpmath.exp(-t), CTX)
        rhs = mpmath.sqrt(mp.pi / t) * theta3(mpmath.exp(-mp.pi ** 2 / t), CTX)
        assert abs(lhs - rhs) <= mpf(10) ** -(CTX.out_digits - 5) * lhs


@settings(max_examples=25, deadline=None)
@given(st.floats(min_value=0.02, max_value=0.9))
def test_legendre_relation_and_nome_round_trip(qf):
    with CTX.work():
        q = mpf(qf)
        pair = nome_to_modulus(q, CTX)
        assert abs(pair.legendre_residual()) < mpf(10) ** -(CTX.out_digits - 5)
        assert abs(pair.nome() - q) < mpf(10) ** -(CTX.out_digits - 5)
        assert abs(pair.k ** 2 + pair.k_prime ** 2 - 1) < mpf(10) ** -(CTX.out_digits - 5)


def test_modulus_at_half():
    with CTX.work():
        pair = nome_to_modulus(mpmath.exp(-mpf(1) / 2), CTX)
        assert mpmath.nstr(pair.k, 16) == "0.9999999785976963"
        assert abs(pair.k_prime - mpf("0.000206892742601")) < mpf("1e-15")


def test_sinc():
    with CTX.work():
        assert sinc(0, CTX) == 1
        assert close(sinc(mp.pi / 2, CTX), 2 / mp.pi)
