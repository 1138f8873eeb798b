import csv
import json
from fractions import Fraction

import mpmath
import pytest
from mpmath import mp, mpf

from zoo.borwein_integral import (
    DEFICIT,
    EXACT,
    IntegralSpec,
    LadderRow,
    _poisson_interval,
    convolution_tail_oracle,
    deficit,
    integral_estimate,
    ladder_specs,
    proportion_interval,
    threshold_verdict,
    write_ladder_csv,
    write_ladder_json,
)
from zoo.errors import ArgumentError, BoundaryError, DomainError, ToleranceNotMet
from zoo.numeric import PrecisionContext

CTX = PrecisionContext(out_digits=15, guard_digits=10)
LADDER_DEFICIT = IntegralSpec(Fraction(1), tuple(Fraction(1, d) for d in range(3, 16, 2)))
THREE_FACTORS = IntegralSpec(Fraction(1), (Fraction(1, 2), Fraction(1, 3), Fraction(1, 4)))
TWO_FACTORS = IntegralSpec(Fraction(1), (Fraction(1, 2), Fraction(2, 3)))


@pytest.fixture(scope="module")
def ladder_deficit():
    return deficit(LADDER_DEFICIT, CTX)


def half_pi():
    with CTX.work():
        return mp.pi / 2


def test_threshold_verdicts():
    specs = ladder_specs()
    assert len(specs) == 7
    assert [threshold_verdict(s) for s in specs] == [EXACT] * 6 + [DEFICIT]
    assert specs[-1].factor_sum > 1 > specs[-2].factor_sum
    assert threshold_verdict(IntegralSpec(Fraction(1))) == EXACT
    assert threshold_verdict(IntegralSpec(Fraction(1), (Fraction(3, 4),))) == EXACT


def test_boundary_case_rejected():
    with pytest.raises(BoundaryError):
        threshold_verdict(IntegralSpec(Fraction(1), (Fraction(1, 2), Fraction(1, 2))))


def test_spec_validation():
    with pytest.raises(ArgumentError):
        IntegralSpec(Fraction(0))
    with pytest.raises(ArgumentError):
        IntegralSpec(Fraction(1), (Fraction(1, 3),), ("J1",))


@pytest.mark.parametrize("tail_method", ["asymptotic", "aitken"])
def test_dirichlet_integral(tail_method):
    q = integral_estimate(IntegralSpec(Fraction(1)), "1e-8", CTX, tail_method=tail_method)
    with CTX.work():
        assert abs(q.value - half_pi()) < mpf("1e-8")
        assert q.abs_error_estimate > 0
        assert q.accelerated == (tail_method == "aitken")


def test_aitken_refused_with_bessel_factors():
    with pytest.raises(ArgumentError):
        integral_estimate(THREE_FACTORS, "1e-8", CTX, tail_method="aitken")


def test_single_factor_is_exact():
    q = integral_estimate(IntegralSpec(Fraction(1), (Fraction(1, 3),)), "1e-8", CTX)
    with CTX.work():
        assert abs(q.value - half_pi()) < mpf("1e-8")


@pytest.mark.slow
def test_exact_ladder_cases():
    for spec in ladder_specs()[:-1]:
        q = integral_estimate(spec, "1e-8", CTX)
        with CTX.work():
            assert abs(q.value - half_pi()) < mpf("1e-8"), spec.label()


@pytest.mark.slow
def test_first_deficit_on_ladder(ladder_deficit):
    with CTX.work():
        assert ladder_deficit.deficit > 10 * ladder_deficit.error_estimate
        assert abs(ladder_deficit.relative - mpf("6.267e-7")) < mpf("0.5e-7")
        assert mpmath.nstr(ladder_deficit.relative, 2) == "6.3e-7"


def test_deficit_large_case():
    d = deficit(TWO_FACTORS, CTX)
    with CTX.work():
        assert d.deficit > mpf("1e-3")
        assert d.deficit > 10 * d.error_estimate


def test_deficit_requires_deficit_side():
    with pytest.raises(DomainError):
        deficit(IntegralSpec(Fraction(1), (Fraction(1, 3),)), CTX)


def test_self_consistency_under_refinement():
    base = integral_estimate(THREE_FACTORS, "1e-8", CTX)
    fine = integral_estimate(THREE_FACTORS, "1e-8", CTX, order=40, subdivide=2)
    with CTX.work():
        assert abs(fine.value - base.value) < base.abs_error_estimate
        assert fine.segments_used == 2 * base.segments_used


@pytest.mark.slow
def test_self_consistency_on_ladder_deficit(ladder_deficit):
    fine = integral_estimate(LADDER_DEFICIT, "1e-8", CTX, order=40, subdivide=2)
    with CTX.work():
        base = ladder_deficit.quadrature
        assert abs(fine.value - base.value) < base.abs_error_estimate


def test_tolerance_not_met_carries_result():
    with pytest.raises(ToleranceNotMet) as info:
        integral_estimate(THREE_FACTORS, "1e-12", CTX, order=4)
    assert info.value.result.abs_error_estimate > mpf("1e-12")


@pytest.mark.parametrize("kwargs", [{"order": 2}, {"subdivide": 0}, {"tail_method": "euler"}])
def test_integral_argument_errors(kwargs):
    with pytest.raises(ArgumentError):
        integral_estimate(THREE_FACTORS, "1e-8", CTX, **kwargs)


def test_tolerance_floor():
    with pytest.raises(ArgumentError):
        integral_estimate(THREE_FACTORS, "1e-13", CTX)


def test_poisson_interval_values():
    lo, hi = _poisson_interval(6, 1)
    assert abs(lo - 2.2019) < 1e-4 and abs(hi - 13.0595) < 1e-4
    lo, hi = _poisson_interval(1, 1)
    assert abs(lo - 0.0253) < 1e-4 and abs(hi - 5.5716) < 1e-4
    assert proportion_interval(0, 10 ** 7) == (0.0, pytest.approx(2.9957e-7, rel=1e-4))


def test_interval_switch_is_continuous():
    poisson = proportion_interval(1000, 10 ** 6)
    wilson = proportion_interval(1001, 10 ** 6)
    assert abs(poisson[0] - wilson[0]) < 1e-5 and abs(poisson[1] - wilson[1]) < 1e-5
    with pytest.raises(ArgumentError):
        proportion_interval(5, 4)


def test_oracle_zero_on_exact_cases():
    for spec in (ladder_specs()[-2], IntegralSpec(Fraction(1), (Fraction(3, 4),))):
        mc = convolution_tail_oracle(spec, 10 ** 6, 1)
        assert mc.hits == 0 and mc.estimate == 0
        assert mc.ci_high < 3 / mc.samples


def test_oracle_reproducible():
    a = convolution_tail_oracle(TWO_FACTORS, 10 ** 6, 7)
    b = convolution_tail_oracle(TWO_FACTORS, 10 ** 6, 7)
    assert a == b
    with pytest.raises(ArgumentError):
        convolution_tail_oracle(TWO_FACTORS, 10 ** 5, 7)


@pytest.mark.parametrize("spec", [TWO_FACTORS, THREE_FACTORS], ids=["two-factors", "three-factors"])
def test_oracle_agrees_with_quadrature(spec):
    d = deficit(spec, CTX)
    mc = convolution_tail_oracle(spec, 10 ** 7, 2024)
    assert mc.ci_low <= float(d.relative) <= mc.ci_high


@pytest.mark.slow
def test_oracle_agrees_on_ladder_deficit(ladder_deficit):
    mc = convolution_tail_oracle(LADDER_DEFICIT, 10 ** 7, 2024)
    assert mc.hits > 0
    assert mc.ci_low <= float(ladder_deficit.relative) <= mc.ci_high


def test_probability_constant_on_exact_case():
    # integral = (pi / (2 a0)) P(|S| <= a0/2); on an EXACT case P = 1, so the
    # integral must be pi/(2 a0) for a0 other than 1 as well
    spec = IntegralSpec(Fraction(2), (Fraction(1, 2), Fraction(1, 3)))
    q = integral_estimate(spec, "1e-8", CTX)
    with CTX.work():
        assert abs(q.value - mp.pi / 4) < mpf("1e-8")


def test_ladder_writers(tmp_path):
    rows = [LadderRow("a0=1; factors=[1/3]", "1/3", EXACT, "1.5707963267949e+0", "0", "0", "1e-18")]
    write_ladder_json(rows, tmp_path / "t.json")
    write_ladder_csv(rows, tmp_path / "t.csv")
    assert json.loads((tmp_path / "t.json").read_text())[0]["verdict"] == EXACT
    with (tmp_path / "t.csv").open() as fh:
        assert list(csv.DictReader(fh))[0]["factor_sum"] == "1/3"
