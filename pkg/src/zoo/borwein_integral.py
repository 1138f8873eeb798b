"""Integrals of sinc(a0 z) times products of J0(a_k z) over [0, inf).

If a0 exceeds a_1 + ... + a_n the integral is exactly pi/(2 a0); otherwise
it falls short.  The integral equals pi/(2 a0) times P(|S| <= a0/2), where
S = sum X_k and X_k = (a_k/2) cos(pi U_k) follows the arcsine law on
[-a_k/2, a_k/2].  This module decides the case exactly, measures the
integral by oscillatory quadrature, and estimates the probability by
Monte Carlo as an independent check.
"""

from __future__ import annotations

import csv
import json
import math
import statistics
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import mpmath
import numpy as np
from mpmath import mp, mpc, mpf

from .errors import ArgumentError, BoundaryError, DomainError, ToleranceNotMet
from .numeric import PrecisionContext, bracket_root, to_decimal_string
from .specfun import _hankel_coeff, _j0_hankel, _j0_series, j0_switchover

EXACT = "EXACT_PI_OVER_2A0"
DEFICIT = "DEFICIT"
KINDS = ("J0",)


@dataclass(frozen=True)
class IntegralSpec:
    """sinc(a0 z) prod_k J0(a_k z); every scale is a positive rational."""

    a0: Fraction
    factors: Tuple[Fraction, ...] = ()
    kinds: Tuple[str, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "a0", Fraction(self.a0))
        object.__setattr__(self, "factors", tuple(Fraction(f) for f in self.factors))
        kinds = self.kinds or ("J0",) * len(self.factors)
        object.__setattr__(self, "kinds", tuple(kinds))
        if self.a0 <= 0 or any(f <= 0 for f in self.factors):
            raise ArgumentError("all scales must be positive")
        if len(self.kinds) != len(self.factors):
            raise ArgumentError("one kernel tag per factor")
        for k in self.kinds:
            if k not in KINDS:
                raise ArgumentError(f"unsupported kernel {k!r}; only J0 factors are implemented")

    @property
    def factor_sum(self) -> Fraction:
        return sum(self.factors, Fraction(0))

    def label(self) -> str:
        inner = ", ".join(str(f) for f in self.factors)
        return f"a0={self.a0}; factors=[{inner}]"


@dataclass(frozen=True)
class QuadratureResult:
    value: mpf
    abs_error_estimate: mpf
    segments_used: int
    accelerated: bool
    quadrature_error: mpf = mpf(0)
    tail_value: mpf = mpf(0)
    tail_error: mpf = mpf(0)
    cutoff: mpf = mpf(0)


def threshold_verdict(spec: IntegralSpec) -> str:
    """EXACT when a0 > sum a_k, DEFICIT when a0 < sum a_k (exact comparison)."""
    s = spec.factor_sum
    if spec.a0 == s:
        raise BoundaryError("a0 equals the sum of the factor scales; the boundary case is not covered")
    return EXACT if spec.a0 > s else DEFICIT


def ladder_specs(last_denominator: int = 15) -> List[IntegralSpec]:
    """a0 = 1 with factors 1/3, 1/3 + 1/5, ... up to 1/last_denominator."""
    out = []
    for top in range(3, last_denominator + 1, 2):
        out.append(IntegralSpec(Fraction(1), tuple(Fraction(1, d) for d in range(3, top + 1, 2))))
    return out


# -- integrand ---------------------------------------------------------------


def _j0_fast(x: mpf, wd: int, switch: float) -> mpf:
    x = abs(x)
    if x > switch:
        return _j0_hankel(x, wd)
    return _j0_series(x, wd)


def _integrand_factory(spec: IntegralSpec):
    a0 = _q(spec.a0)
    scales = [_q(f) for f in spec.factors]
    wd = mp.dps
    switch = j0_switchover(wd)

    def f(z: mpf) -> mpf:
        if z == 0:
            return mpf(1)
        v = mpmath.sin(a0 * z) / (a0 * z)
        for a in scales:
            v *= _j0_fast(a * z, wd, switch)
        return v

    return f


def _q(x: Fraction) -> mpf:
    return mpf(x.numerator) / x.denominator


# -- asymptotic tail ---------------------------------------------------------


def _tail_expansion(spec: IntegralSpec, J: int) -> Dict[Fraction, List[mpc]]:
    """Expansion of the integrand for large z.

    The result maps each frequency w to coefficients c_j such that the
    integrand is z^(-1 - m/2) sum_w e^(i w z) sum_j c_j z^(-j), m being the
    number of J0 factors.  sinc(a0 z) contributes (e^(i a0 z) - e^(-i a0 z))
    / (2 i a0 z); each J0(a z) contributes the Hankel expansion written as
    two exponentials e^(+-i(a z - pi/4)).
    """
    a0 = _q(spec.a0)
    terms: Dict[Fraction, List[mpc]] = {
        spec.a0: [mpc(0, -1) / (2 * a0)] + [mpc(0)] * (J - 1),
        -spec.a0: [mpc(0, 1) / (2 * a0)] + [mpc(0)] * (J - 1),
    }
    hc = [_q(_hankel_coeff(j)) for j in range(J)]
    rot_plus = mpmath.exp(mpc(0, -1) * mp.pi / 4)
    rot_minus = mpmath.exp(mpc(0, 1) * mp.pi / 4)
    for a_frac in spec.factors:
        a = _q(a_frac)
        pref = mpmath.sqrt(2 / (mp.pi * a)) / 2
        plus = [pref * mpc(0, -1) ** j * hc[j] / a ** j * rot_plus for j in range(J)]
        minus = [pref * mpc(0, 1) ** j * hc[j] / a ** j * rot_minus for j in range(J)]
        new: Dict[Fraction, List[mpc]] = {}
        for freq, coeffs in terms.items():
            for shift, d in ((a_frac, plus), (-a_frac, minus)):
                acc = new.setdefault(freq + shift, [mpc(0)] * J)
                for i, ci in enumerate(coeffs):
                    if ci == 0:
                        continue
                    for j in range(J - i):
                        acc[i + j] += ci * d[j]
        terms = new
    return terms


def asymptotic_tail(spec: IntegralSpec, Z: mpf, J: int = 25) -> Tuple[mpf, mpf]:
    """int_Z^inf of the integrand from its large-z expansion.

    Each term integrates exactly: int_Z^inf z^-p e^(i w z) dz equals
    Z^(1-p) E_p(-i w Z), or Z^(1-p)/(p-1) when w = 0.  Returns the value and
    an error estimate, namely the size of the last order kept.
    """
    m = len(spec.factors)
    p0 = 1 + mpf(m) / 2
    by_order = [mpc(0)] * J
    for freq, coeffs in _tail_expansion(spec, J).items():
        w = _q(freq)
        for j, c in enumerate(coeffs):
            if c == 0:
                continue
            p = p0 + j
            if w == 0:
                integral = mpmath.power(Z, 1 - p) / (p - 1)
            else:
                integral = mpmath.power(Z, 1 - p) * mpmath.expint(p, mpc(0, -w * Z))
            by_order[j] += c * integral
    total = mpmath.fsum(by_order)
    # the asymptotic series must be decreasing where it is cut off
    err = abs(by_order[-1].real) + abs(by_order[-2].real)
    return total.real, err


# -- quadrature --------------------------------------------------------------


def _gauss_nodes(order: int):
    return mp.gauss_quadrature(order, "legendre")


def default_cutoff(spec: IntegralSpec) -> mpf:
    """Start of the asymptotic tail: far enough that the slowest factor is oscillating."""
    a_min = min([spec.a0] + list(spec.factors))
    return mpf(max(60, math.ceil(13.5 / float(a_min))))


def _aitken(seq: List[mpf]) -> List[mpf]:
    out = []
    for i in range(len(seq) - 2):
        d2 = seq[i + 2] - 2 * seq[i + 1] + seq[i]
        if d2 == 0:
            out.append(seq[i + 2])
        else:
            out.append(seq[i + 2] - (seq[i + 2] - seq[i + 1]) ** 2 / d2)
    return out


def integral_estimate(
    spec: IntegralSpec,
    target_abs_tol,
    ctx: Optional[PrecisionContext] = None,
    *,
    order: int = 20,
    cutoff=None,
    tail_method: str = "asymptotic",
    expansion_terms: int = 25,
    subdivide: int = 1,
) -> QuadratureResult:
    """Integral of sinc(a0 z) prod J0(a_k z) over [0, inf).

    [0, Z] is split into segments of length pi/(a0 + sum a_k), the half
    period of the fastest oscillation, divided further into ``subdivide``
    equal pieces, and each piece gets Gauss-Legendre of the given order.  The same segments are also integrated with a
    half-order rule; the difference bounds the quadrature error.

    ``tail_method="asymptotic"`` integrates [Z, inf) exactly from the
    large-z expansion of the whole integrand.  ``tail_method="aitken"``
    instead extrapolates the segment partial sums with iterated Aitken
    transforms.  Segment sums only alternate cleanly for the bare sinc
    kernel, so that mode is restricted to specs without J0 factors.
    """
    tol = to_real_tol(target_abs_tol)
    if tol < mpf("1e-12"):
        raise ArgumentError("target_abs_tol must be at least 1e-12")
    ctx = ctx or PrecisionContext(out_digits=15, guard_digits=10)
    if subdivide < 1:
        raise ArgumentError("subdivide must be >= 1")
    if order < 4:
        raise ArgumentError("order must be >= 4")
    if tail_method not in ("asymptotic", "aitken"):
        raise ArgumentError("tail_method must be 'asymptotic' or 'aitken'")
    with ctx.work():
        f = _integrand_factory(spec)
        width = mp.pi / _q(spec.a0 + spec.factor_sum)
        Z0 = to_real_tol(cutoff) if cutoff is not None else default_cutoff(spec)
        nseg = int(mpmath.ceil(Z0 / width))
        Z = nseg * width
        width /= subdivide
        nseg *= subdivide
        X, W = _gauss_nodes(order)
        lo_order = order // 2
        Xl, Wl = _gauss_nodes(lo_order)
        total = mpf(0)
        total_lo = mpf(0)
        partials = []
        half = width / 2
        for i in range(nseg):
            mid = (i + mpf(1) / 2) * width
            seg = mpmath.fsum(W[j] * f(mid + half * X[j]) for j in range(order)) * half
            seg_lo = mpmath.fsum(Wl[j] * f(mid + half * Xl[j]) for j in range(lo_order)) * half
            total += seg
            total_lo += seg_lo
            if (i + 1) % subdivide == 0:  # keep partial sums on whole half-periods
                partials.append(total)
        quad_err = abs(total - total_lo) + mpf(10) ** (-(mp.dps - 5)) * nseg
        if tail_method == "asymptotic":
            tail, tail_err = asymptotic_tail(spec, Z, expansion_terms)
            value = total + tail
            accelerated = False
        else:
            if spec.factors:
                raise ArgumentError("Aitken extrapolation is only offered for the bare sinc integral")
            seq = partials[-24:]
            cols = [seq]
            while len(cols[-1]) >= 3:
                cols.append(_aitken(cols[-1]))
            last = cols[-1] if cols[-1] else cols[-2]
            prev = cols[-2]
            value = last[-1]
            tail = value - total
            tail_err = abs(last[-1] - prev[-1])
            accelerated = True
        err = quad_err + tail_err
        result = QuadratureResult(
            value=value,
            abs_error_estimate=err,
            segments_used=nseg,
            accelerated=accelerated,
            quadrature_error=quad_err,
            tail_value=tail,
            tail_error=tail_err,
            cutoff=Z,
        )
    if err > tol:
        raise ToleranceNotMet(
            f"error estimate {mpmath.nstr(err, 3)} exceeds tolerance {mpmath.nstr(tol, 3)}", result
        )
    return result


def to_real_tol(x) -> mpf:
    if isinstance(x, Fraction):
        return mpf(x.numerator) / x.denominator
    return mpf(x)


@dataclass(frozen=True)
class DeficitResult:
    deficit: mpf
    relative: mpf
    error_estimate: mpf
    quadrature: QuadratureResult


def deficit(spec: IntegralSpec, ctx: Optional[PrecisionContext] = None, target_abs_tol="1e-8", **kw) -> DeficitResult:
    """pi/(2 a0) minus the integral, for specs on the DEFICIT side."""
    if threshold_verdict(spec) != DEFICIT:
        raise DomainError("deficit is only defined when a0 < sum of the factor scales")
    ctx = ctx or PrecisionContext(out_digits=15, guard_digits=10)
    q = integral_estimate(spec, target_abs_tol, ctx, **kw)
    with ctx.work():
        full = mp.pi / (2 * _q(spec.a0))
        d = full - q.value
        return DeficitResult(d, d / full, q.abs_error_estimate, q)


# -- Monte Carlo oracle ------------------------------------------------------


@dataclass(frozen=True)
class MonteCarloEstimate:
    estimate: float
    ci_low: float
    ci_high: float
    hits: int
    samples: int
    seed: int
    shards: int


POISSON_HIT_LIMIT = 1000


def _poisson_interval(hits: int, samples: int, level: float = 0.95) -> Tuple[float, float]:
    """Exact Poisson (Garwood) interval for a small proportion.

    With no hits the one-sided bound -log(1 - level)/n is returned as the
    upper end.
    """
    alpha = 1 - level
    if hits == 0:
        return 0.0, -math.log(alpha) / samples

    qctx = PrecisionContext(out_digits=12, guard_digits=10)

    def quantile(shape: int, prob: float) -> float:
        # inverse of the regularised lower incomplete gamma function
        def f(t):
            return mpmath.gammainc(shape, 0, t, regularized=True) - prob

        return float(bracket_root(f, 0, shape + 10 * math.sqrt(shape) + 20, qctx))

    lo = quantile(hits, alpha / 2)
    hi = quantile(hits + 1, 1 - alpha / 2)
    return lo / samples, hi / samples


def _wilson_interval(hits: int, samples: int, level: float = 0.95) -> Tuple[float, float]:
    """Wilson score interval for a binomial proportion."""
    z = statistics.NormalDist().inv_cdf(1 - (1 - level) / 2)
    p = hits / samples
    denom = 1 + z * z / samples
    centre = (p + z * z / (2 * samples)) / denom
    half = z * math.sqrt(p * (1 - p) / samples + z * z / (4 * samples * samples)) / denom
    return max(0.0, centre - half), min(1.0, centre + half)


def proportion_interval(hits: int, samples: int, level: float = 0.95) -> Tuple[float, float]:
    """95% interval for hits/samples.

    Rare events (at most POISSON_HIT_LIMIT hits) get the Garwood interval,
    which stays honest for a handful of hits.  Above that the proportion is
    no longer small enough for the Poisson model and the Wilson score
    interval is used.
    """
    if samples < 1 or not (0 <= hits <= samples):
        raise ArgumentError("need 0 <= hits <= samples and samples >= 1")
    if hits <= POISSON_HIT_LIMIT:
        return _poisson_interval(hits, samples, level)
    return _wilson_interval(hits, samples, level)


def convolution_tail_oracle(
    spec: IntegralSpec,
    samples: int,
    seed: int,
    shards: int = 8,
    chunk: int = 1 << 21,
) -> MonteCarloEstimate:
    """Monte Carlo estimate of P(|S| > a0/2) with a 95% interval.

    Splitting rule: ``SeedSequence(seed).spawn(shards)`` gives one stream per
    shard; shard i draws samples // shards values, plus one if
    i < samples % shards, in chunks of ``chunk``.  Results depend only on
    (seed, shards, samples, chunk).
    """
    if samples < 10 ** 6:
        raise ArgumentError("use at least 10**6 samples")
    if shards < 1:
        raise ArgumentError("shards must be >= 1")
    half_scales = np.array([float(f) / 2 for f in spec.factors], dtype=np.float64)
    limit = float(spec.a0) / 2
    hits = 0
    if len(half_scales) and half_scales.sum() <= limit:
        hits = 0  # support of S lies inside [-a0/2, a0/2]
    elif len(half_scales):
        children = np.random.SeedSequence(seed).spawn(shards)
        base, extra = divmod(samples, shards)
        for i, child in enumerate(children):
            rng = np.random.default_rng(child)
            todo = base + (1 if i < extra else 0)
            while todo:
                n = min(chunk, todo)
                u = rng.random((n, len(half_scales)))
                s = np.cos(np.pi * u) @ half_scales
                hits += int(np.count_nonzero(np.abs(s) > limit))
                todo -= n
    lo, hi = proportion_interval(hits, samples)
    return MonteCarloEstimate(hits / samples, lo, hi, hits, samples, seed, shards)


# -- ladder table ------------------------------------------------------------


@dataclass
class LadderRow:
    case: str
    factor_sum: str
    verdict: str
    value: str
    deficit: str
    relative_deficit: str
    error_estimate: str
    notes: List[str] = field(default_factory=list)


def ladder_table(ctx: Optional[PrecisionContext] = None, target_abs_tol="1e-8") -> List[LadderRow]:
    ctx = ctx or PrecisionContext(out_digits=15, guard_digits=10)
    rows = []
    for spec in ladder_specs():
        verdict = threshold_verdict(spec)
        q = integral_estimate(spec, target_abs_tol, ctx)
        with ctx.work():
            full = mp.pi / (2 * _q(spec.a0))
            d = full - q.value
            rows.append(
                LadderRow(
                    case=spec.label(),
                    factor_sum=str(spec.factor_sum),
                    verdict=verdict,
                    value=to_decimal_string(q.value, 15),
                    deficit=to_decimal_string(d, 6),
                    relative_deficit=to_decimal_string(d / full, 6),
                    error_estimate=to_decimal_string(q.abs_error_estimate, 3),
                )
            )
    return rows


def write_ladder_json(rows: Sequence[LadderRow], path) -> None:
    Path(path).write_text(json.dumps([asdict(r) for r in rows], indent=2) + "\n")


def write_ladder_csv(rows: Sequence[LadderRow], path) -> None:
    cols = ["case", "factor_sum", "verdict", "value", "deficit", "relative_deficit", "error_estimate"]
    with Path(path).open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(cols)
        for r in rows:
            w.writerow([getattr(r, c) for c in cols])
