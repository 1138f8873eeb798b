import mpmath
import pytest
from mpmath import mp, mpf

from zoo.errors import ArgumentError, TermCapExceeded
from zoo.lattice import (
    dual_bessel_sum,
    dual_correction,
    gaussian_dual_correction,
    gaussian_lattice_sum,
    lambda_star,
    lattice_sum,
    student_lattice_sum,
    worst_case_error,
)
from zoo.numeric import PrecisionContext
from zoo.specfun import beta

CTX = PrecisionContext(out_digits=45)


def _beta_target(lam):
    return beta(mpf(1) / 2, lam - mpf(1) / 2, CTX)


@pytest.mark.parametrize("a", [1, 2, 10])
@pytest.mark.parametrize("lam", ["1", "1.5", "2", "5"])
def test_poisson_two_sided_equivalence(a, lam):
    with CTX.work():
        lam = mpf(lam)
        primal = student_lattice_sum(a, lam, CTX)
        dual = dual_bessel_sum(a, lam, CTX)
        target = _beta_target(lam)
        assert abs(primal - dual) <= mpf(10) ** -(CTX.out_digits - 5) * target
        assert primal - target > 0


def test_primal_against_mpmath_nsum():
    with CTX.work():
        direct = (1 + 2 * mpmath.nsum(lambda n: (1 + n * n / mpf(4)) ** -3, [1, mpmath.inf])) / 2
        assert abs(student_lattice_sum(2, 3, CTX) - direct) < mpf(10) ** -40


def test_dual_correction_positive_and_tiny_at_full_scale():
    ctx = PrecisionContext(out_digits=30)
    corr, terms = dual_correction(100000, 5, ctx)
    with ctx.work():
        assert corr > 0
        assert terms <= 3
        assert -272855 < mpmath.log10(corr) < -272853


def test_lattice_sum_switches_to_dual_side():
    res = lattice_sum(100000, 5, PrecisionContext(out_digits=30))
    assert res.method == "dual-bessel"
    assert res.deviation == res.dual_correction
    small = lattice_sum(2, 5, CTX)
    assert small.method == "primal"
    with CTX.work():
        assert abs(small.deviation - small.dual_correction) < mpf(10) ** -40


def test_primal_side_respects_term_cap():
    with pytest.raises(TermCapExceeded):
        lattice_sum(100000, 5, PrecisionContext(out_digits=30), side="primal")


@pytest.mark.parametrize("lam", ["0.5", "0.2"])
def test_lambda_domain(lam):
    with pytest.raises(ArgumentError):
        student_lattice_sum(1, mpf(lam), CTX)


def test_gaussian_sum_against_theta():
    with CTX.work():
        a = mpf(3)
        assert abs(gaussian_lattice_sum(a, CTX) - mpmath.jtheta(3, 0, mpmath.exp(-1 / a ** 2)) / a) < mpf(10) ** -40
        diff = gaussian_lattice_sum(1, CTX) - mpmath.sqrt(mp.pi)
        assert abs(diff - gaussian_dual_correction(1, CTX)) < mpf(10) ** -40
        assert mpmath.nstr(gaussian_lattice_sum(1, CTX), 15) == "1.77263720482665"


def test_gaussian_correction_order_at_full_scale():
    ctx = PrecisionContext(out_digits=20)
    corr = gaussian_dual_correction(100000, ctx)
    with ctx.work():
        # log10(2 sqrt(pi)) - pi^2 10^10 / ln 10
        expected = mpmath.log10(2 * mpmath.sqrt(mp.pi)) - mp.pi ** 2 * mpf(10) ** 10 / mpmath.log(10)
        assert abs(mpmath.log10(corr) - expected) < mpf("1e-6")


@pytest.mark.parametrize("a", [5, 10, 20])
def test_lambda_star_is_digamma_root(a):
    with CTX.work():
        ls = lambda_star(a, CTX)
        assert abs(mpmath.digamma(ls) - mpmath.log(mp.pi * a)) < mpf(10) ** -35


@pytest.mark.parametrize("a", [5, 10, 20])
def test_error_model_consistency(a):
    """Measured |primal - B| at lambda_star(a) within a factor 10 of sqrt(2/a) exp(-pi a)."""
    with CTX.work():
        ls = lambda_star(a, CTX)
        measured = abs(student_lattice_sum(a, ls, CTX) - _beta_target(ls))
        model = worst_case_error(a, CTX)
        ratio = model / measured
        assert mpf(1) / 10 <= ratio <= 10, f"model/measured = {mpmath.nstr(ratio, 4)}"


def test_large_lambda_dominated_by_center_term():
    with CTX.work():
        value = student_lattice_sum(1, 100, CTX)
        assert abs(value - (1 + 2 * mpf(2) ** -100)) < 3 * mpf(5) ** -100


def test_small_scale_deviation_matches_first_dual_term():
    with CTX.work():
        lam = mpf(2)
        eps = student_lattice_sum(10, lam, CTX) - _beta_target(lam)
        x = 2 * mp.pi * 10
        first = 2 * mpf(2) ** (mpf(3) / 2 - lam) * mpmath.sqrt(mp.pi) / mpmath.gamma(lam) * x ** (lam - mpf(1) / 2) \
            * mpmath.besselk(lam - mpf(1) / 2, x)
        assert abs(eps / first - 1) < mpf("1e-20")
        assert mpmath.nstr(eps, 3) == "1.03e-25"


def test_half_integer_closed_form_path_matches_integral_path():
    ctx = PrecisionContext(out_digits=30)
    closed, _ = dual_correction(2, 3, ctx, method="closed")
    integral, _ = dual_correction(2, 3, ctx, method="integral")
    with ctx.work():
        assert abs(closed / integral - 1) < mpf(10) ** -30


def test_gaussian_sum_at_ten_is_sqrt_pi_within_bound():
    with CTX.work():
        corr = gaussian_dual_correction(10, CTX)
        assert 0 < corr < mpf(10) ** -130
        assert corr < 10 * mpmath.sqrt(mp.pi) * 2 * mpmath.exp(-mp.pi ** 2 * 100)


def test_lambda_star_full_scale():
    ctx = PrecisionContext(out_digits=20)
    with ctx.work():
        ls = lambda_star(100000, ctx)
        assert abs(ls - mp.pi * 100000) < 1


def test_worst_case_error_figures():
    ctx = PrecisionContext(out_digits=20)
    with ctx.work():
        assert abs(mpmath.log10(worst_case_error(100000, ctx)) + 136440) <= 2
        assert mpmath.nstr(worst_case_error(10, ctx), 2) == "1.0e-14"
        assert worst_case_error(10, ctx) > worst_case_error(11, ctx)


def test_deviation_past_lambda_star_exceeds_model():
    """The deviation keeps growing with lambda, so no uniform bound of the model's size holds."""
    ctx = PrecisionContext(out_digits=15)
    with ctx.work():
        at_star, _ = dual_correction(100000, lambda_star(100000, ctx), ctx)
        at_big, _ = dual_correction(100000, 10 ** 6, ctx)
        assert mpmath.log10(at_star) > -103000
        assert at_big > at_star
