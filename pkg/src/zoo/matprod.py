"""Structured infinite matrix products for zeta values.

Each factor is the block matrix [[A_k, u_k], [0, 1]] with A_k = alpha_k I +
beta_k J, where J is the superdiagonal shift.  The last column of the n-fold
product is v_n = sum_{p <= n} A_1 ... A_{p-1} u_p, and because the A_k commute
it has a closed form in elementary symmetric functions of beta/alpha.

All per-step quantities (alpha, beta, u, hyper-harmonic numbers, central
binomials) are exact fractions.  They are rounded only when accumulated into
a floating partial sum, so rounding cannot be blamed when an identity fails.
"""

from __future__ import annotations

import math
import random
import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Dict, Iterator, List, Optional, Sequence, Union

from mpmath import mpf

from .errors import ArgumentError
from .numeric import PrecisionContext

Scalar = Union[Fraction, mpf]
Matrix = List[List[Scalar]]


@dataclass(frozen=True)
class TriangularProductSpec:
    """Generator of the factors M_k = [[alpha_k I + beta_k J, u_k], [0, 1]].

    ``u(k)`` returns the column top to bottom, that is (u^(N), ..., u^(1)).
    """

    dim_n: int
    alpha: Callable[[int], Fraction]
    beta: Callable[[int], Fraction]
    u: Callable[[int], Sequence[Fraction]]
    name: str = "custom"

    def matrix(self, k: int) -> List[List[Fraction]]:
        """The exact (N+1) x (N+1) factor M_k."""
        n = self.dim_n
        a, b, col = self.alpha(k), self.beta(k), list(self.u(k))
        if a == 0:
            raise ArgumentError(f"alpha_{k} vanishes")
        if len(col) != n:
            raise ArgumentError(f"u_{k} has length {len(col)}, expected {n}")
        m = [[Fraction(0)] * (n + 1) for _ in range(n + 1)]
        for i in range(n):
            m[i][i] = a
            if i + 1 < n:
                m[i][i + 1] = b
            m[i][n] = col[i]
        m[n][n] = Fraction(1)
        return m


class HyperHarmonic:
    """H_n^(p) = sum_{k<=n} k^-p, extended on demand, plus bivariate sums.

    The bivariate table holds H_n^(p,q) = sum_{n >= k1 > k2 >= 1} k1^-p k2^-q.
    """

    def __init__(self, order: int):
        if order < 1:
            raise ArgumentError("hyper-harmonic order must be >= 1")
        self.order = order
        self.values: List[Fraction] = [Fraction(0)]
        self._bivariate: Dict[int, List[Fraction]] = {}

    def value(self, n: int) -> Fraction:
        while len(self.values) <= n:
            k = len(self.values)
            self.values.append(self.values[-1] + Fraction(1, k ** self.order))
        return self.values[n]

    def bivariate(self, q: int, n: int) -> Fraction:
        inner = _HH.get(q)
        table = self._bivariate.setdefault(q, [Fraction(0)])
        while len(table) <= n:
            k = len(table)
            table.append(table[-1] + inner.value(k - 1) / k ** self.order)
        return table[n]


class _HyperHarmonicPool:
    def __init__(self):
        self._pool: Dict[int, HyperHarmonic] = {}

    def get(self, p: int) -> HyperHarmonic:
        if p not in self._pool:
            self._pool[p] = HyperHarmonic(p)
        return self._pool[p]


_HH = _HyperHarmonicPool()


def harmonic(p: int, n: int) -> Fraction:
    """H_n^(p)."""
    return _HH.get(p).value(n)


def harmonic2(p: int, q: int, n: int) -> Fraction:
    """H_n^(p,q)."""
    return _HH.get(p).bivariate(q, n)


def terms_for_digits(digits: int) -> int:
    """Factors needed for ``digits`` correct digits (ratio 1/4 per factor, 10% margin)."""
    return math.ceil(1.1 * digits / math.log10(4)) + 1


def central_binomials(n: int) -> Iterator[int]:
    """C(2k, k) for k = 1..n via C(2k+2, k+1) = C(2k, k) 2(2k+1)/(k+1)."""
    c = 1
    for k in range(1, n + 1):
        c = c * 2 * (2 * k - 1) // k
        yield c


# -- products ----------------------------------------------------------------


def _zero(exact: bool) -> Scalar:
    return Fraction(0) if exact else mpf(0)


def _matmul(x: Matrix, y: Matrix, exact: bool) -> Matrix:
    n = len(x)
    out = []
    for i in range(n):
        row = []
        xi = x[i]
        for j in range(n):
            s = _zero(exact)
            for k in range(n):
                if xi[k] and y[k][j]:
                    s += xi[k] * y[k][j]
            row.append(s)
        out.append(row)
    return out


def _convert(m: List[List[Fraction]], exact: bool) -> Matrix:
    if exact:
        return m
    return [[mpf(v.numerator) / v.denominator if v else mpf(0) for v in row] for row in m]


def partial_product_direct(
    spec: TriangularProductSpec, n: int, ctx: Optional[PrecisionContext] = None, exact: bool = False
) -> Matrix:
    """Literal left-to-right product M_1 M_2 ... M_n."""
    if n < 1:
        raise ArgumentError("need at least one factor")
    ctx = ctx or PrecisionContext()
    with ctx.work():
        acc = _convert(spec.matrix(1), exact)
        for k in range(2, n + 1):
            acc = _matmul(acc, _convert(spec.matrix(k), exact), exact)
        return acc


def partial_product_tree(
    spec: TriangularProductSpec, n: int, ctx: Optional[PrecisionContext] = None, exact: bool = False
) -> Matrix:
    """Balanced-tree (pairwise) product of M_1 ... M_n.

    Adjacent factors are multiplied in pairs, then pairs of pairs, until one
    matrix remains; the combine order is fixed by the tree shape.
    """
    if n < 1:
        raise ArgumentError("need at least one factor")
    ctx = ctx or PrecisionContext()
    with ctx.work():
        level = [_convert(spec.matrix(k), exact) for k in range(1, n + 1)]
        while len(level) > 1:
            nxt = [_matmul(level[i], level[i + 1], exact) for i in range(0, len(level) - 1, 2)]
            if len(level) % 2:
                nxt.append(level[-1])
            level = nxt
        return level[0]


def benchmark_products(spec: TriangularProductSpec, n: int, ctx: PrecisionContext) -> Dict[str, float]:
    """Wall-clock seconds for the direct and tree products, plus their disagreement."""
    t0 = time.perf_counter()
    direct = partial_product_direct(spec, n, ctx)
    t1 = time.perf_counter()
    tree = partial_product_tree(spec, n, ctx)
    t2 = time.perf_counter()
    with ctx.work():
        diff = max(abs(direct[i][-1] - tree[i][-1]) for i in range(spec.dim_n))
    return {"direct_s": t1 - t0, "tree_s": t2 - t1, "max_abs_diff": float(diff)}


@dataclass
class PartialProductState:
    """Running data of the closed-form column after ``step`` factors."""

    step: int
    alpha_prod: Fraction
    elem_sym: List[Fraction]
    v_partial: List[Scalar]


def closed_form_states(
    spec: TriangularProductSpec, ctx: Optional[PrecisionContext] = None, exact: bool = False
) -> Iterator[PartialProductState]:
    """Yield the state after each step p = 1, 2, ...

    Component l of v (row N - l from the top) is
        sum_p (sum_{m<l} e_m(r_1..r_{p-1}) u_p^(l-m)) prod_{q<p} alpha_q,
    with r_j = beta_j / alpha_j.  The e_m are updated in O(N) per step.
    """
    n = spec.dim_n
    ctx = ctx or PrecisionContext()
    alpha_prod = Fraction(1)
    e = [Fraction(1)] + [Fraction(0)] * (n - 1)  # e_0 .. e_{N-1}
    v: List[Scalar] = [_zero(exact) for _ in range(n)]
    p = 0
    while True:
        p += 1
        col = list(spec.u(p))  # col[i] = u^(N - i)
        with ctx.work():
            for i in range(n):
                ell = n - i
                s = Fraction(0)
                for m in range(ell):
                    s += e[m] * col[i + m]
                term = s * alpha_prod
                v[i] = v[i] + (term if exact else mpf(term.numerator) / term.denominator)
        yield PartialProductState(p, alpha_prod, list(e[1:]), list(v))
        a, b = spec.alpha(p), spec.beta(p)
        if a == 0:
            raise ArgumentError(f"alpha_{p} vanishes")
        r = b / a
        for m in range(n - 1, 0, -1):
            e[m] += r * e[m - 1]
        alpha_prod *= a


def v_partial_closed(
    spec: TriangularProductSpec, n: int, ctx: Optional[PrecisionContext] = None, exact: bool = False
) -> List[Scalar]:
    """Last column (top N entries) of M_1 ... M_n from the closed form."""
    if n < 1:
        raise ArgumentError("need at least one factor")
    for state in closed_form_states(spec, ctx, exact):
        if state.step == n:
            return state.v_partial
    raise AssertionError("unreachable")


# -- the zeta specs ----------------------------------------------------------

EVEN_VARIANTS = ("zeta4", "zeta6_uncorrected", "zeta6_corrected", "zeta6_alternate")


def _even_alpha(n: int) -> Fraction:
    return Fraction(n, 2 * (2 * n + 1))


def _even_beta(n: int) -> Fraction:
    return Fraction(-3, 2 * n * (2 * n + 1))


def zeta_even_spec(variant: str) -> TriangularProductSpec:
    """Factors for the even-argument products.

    ``zeta4`` is the 3x3 product for (zeta(4), zeta(2)).  The 4x4 variants
    share alpha and beta; ``zeta6_corrected`` subtracts 9 H_{n-1}^(4) / (2n)
    from the top entry of u_n.  ``zeta6_uncorrected`` and ``zeta6_alternate``
    have identical factors; they differ only in the value claimed for the
    top entry (zeta(6) versus zeta(6) + delta).
    """
    if variant == "zeta4":
        def u(n):
            return [Fraction(3, 2 * n ** 3), Fraction(3, 2 * n)]
        dim = 2
    elif variant in ("zeta6_uncorrected", "zeta6_alternate"):
        def u(n):
            return [Fraction(3, 2 * n ** 5), Fraction(3, 2 * n ** 3), Fraction(3, 2 * n)]
        dim = 3
    elif variant == "zeta6_corrected":
        def u(n):
            top = Fraction(3, 2 * n ** 5) - 9 * harmonic(4, n - 1) / (2 * n)
            return [top, Fraction(3, 2 * n ** 3), Fraction(3, 2 * n)]
        dim = 3
    else:
        raise ArgumentError(f"unknown even-zeta variant {variant!r}; choose from {EVEN_VARIANTS}")
    return TriangularProductSpec(dim, _even_alpha, _even_beta, u, name=variant)


def zeta_odd_spec(N: int) -> TriangularProductSpec:
    """Factors for (zeta(2N+1), ..., zeta(3)) with u_k = (k^-2N, ..., k^-4, 5/(4k^2))."""
    if N < 1:
        raise ArgumentError("N must be >= 1")

    def alpha(k):
        return Fraction(-k, 2 * (2 * k + 1))

    def beta(k):
        return Fraction(1, 2 * k * (2 * k + 1))

    def u(k):
        col = [Fraction(1, k ** (2 * j)) for j in range(N, 1, -1)]
        col.append(Fraction(5, 4 * k * k))
        return col

    return TriangularProductSpec(N, alpha, beta, u, name=f"zeta_odd_{N}")


def random_spec(rng: random.Random, dim_n: int, size: int = 9) -> TriangularProductSpec:
    """A spec with random nonzero rational alpha and random rational beta, u."""

    def rnd(k, salt, nonzero=False):
        local = random.Random(f"{seed}|{k}|{salt}")
        while True:
            v = Fraction(local.randint(-size, size), local.randint(1, size))
            if v or not nonzero:
                return v

    seed = rng.random()
    return TriangularProductSpec(
        dim_n,
        lambda k: rnd(k, "a", nonzero=True),
        lambda k: rnd(k, "b"),
        lambda k: [rnd(k, ("u", i)) for i in range(dim_n)],
        name="random",
    )


# -- series forms ------------------------------------------------------------


def _to_mpf(x: Fraction) -> mpf:
    return mpf(x.numerator) / x.denominator


def markov_zeta2(terms: int, ctx: PrecisionContext) -> mpf:
    """sum_{i<=terms} 3 / (i^2 C(2i, i)).

    Consecutive terms shrink by a factor below 1/4 (ratio
    i^2 / (2(i+1)(2i+1))), so the tail after the last term t is at most t/3.
    """
    if terms < 1:
        raise ArgumentError("terms must be >= 1")
    with ctx.work():
        total = mpf(0)
        for i, c in enumerate(central_binomials(terms), start=1):
            total += _to_mpf(Fraction(3, i * i * c))
        return total


def markov_tail_bound(terms: int) -> Fraction:
    c = math.comb(2 * terms, terms)
    return Fraction(1, terms * terms * c)


def _series_mul(x: List[Fraction], y: List[Fraction], deg: int) -> List[Fraction]:
    out = [Fraction(0)] * (deg + 1)
    for i, xi in enumerate(x):
        if not xi:
            continue
        for j in range(deg + 1 - i):
            out[i + j] += xi * y[j]
    return out


def borwein_gf_terms(order: int, terms: int) -> Iterator[Fraction]:
    """Exact z^order coefficients of the successive terms of the Borwein series.

    In y = z^2 each term is 3/(C(2k,k)(k^2 - y)) prod_{j<k} (j^2 - 4y)/(j^2 - y);
    the product is carried as a power series truncated at degree order/2.
    """
    if order not in (0, 2, 4):
        raise ArgumentError("order must be 0, 2 or 4")
    deg = order // 2
    prod = [Fraction(1)] + [Fraction(0)] * deg
    for k, c in enumerate(central_binomials(terms), start=1):
        if k > 1:
            j2 = (k - 1) ** 2
            # (j^2 - 4y)/(j^2 - y) = 1 - 3 sum_{i>=1} y^i / j^(2i)
            factor = [Fraction(1)] + [Fraction(-3, j2 ** i) for i in range(1, deg + 1)]
            prod = _series_mul(prod, factor, deg)
        k2 = k * k
        geom = [Fraction(1, k2 ** (i + 1)) for i in range(deg + 1)]  # 1/(k^2 - y)
        yield 3 * _series_mul(prod, geom, deg)[deg] / c


def borwein_gf_coefficient(order: int, terms: int, ctx: PrecisionContext, exact: bool = False) -> Scalar:
    """Partial sum of the z^order coefficient; order 0, 2, 4 give zeta(2), zeta(4), zeta(6)."""
    if terms < 1:
        raise ArgumentError("terms must be >= 1")
    if exact:
        return sum(borwein_gf_terms(order, terms), Fraction(0))
    with ctx.work():
        total = mpf(0)
        for t in borwein_gf_terms(order, terms):
            total += _to_mpf(t)
        return total


def zeta6_expansion_terms(terms: int) -> Iterator[Fraction]:
    """3 [17 H22 + H4 - 4 H2^2 - 3 H2/k^2 + 1/k^4] / (C(2k,k) k^2), H's at k-1."""
    for k, c in enumerate(central_binomials(terms), start=1):
        h2 = harmonic(2, k - 1)
        h4 = harmonic(4, k - 1)
        h22 = harmonic2(2, 2, k - 1)
        bracket = 17 * h22 + h4 - 4 * h2 * h2 - 3 * h2 / k ** 2 + Fraction(1, k ** 4)
        yield 3 * bracket / (c * k * k)


def zeta6_expansion(terms: int, ctx: PrecisionContext, exact: bool = False) -> Scalar:
    if terms < 1:
        raise ArgumentError("terms must be >= 1")
    if exact:
        return sum(zeta6_expansion_terms(terms), Fraction(0))
    with ctx.work():
        total = mpf(0)
        for t in zeta6_expansion_terms(terms):
            total += _to_mpf(t)
        return total


def delta_terms(terms: int) -> Iterator[Fraction]:
    for m, c in enumerate(central_binomials(terms), start=1):
        yield 9 * harmonic(4, m - 1) / (c * m * m)


def delta_constant(terms: int, ctx: PrecisionContext) -> mpf:
    """9 sum_{m<=terms} H_{m-1}^(4) / (C(2m,m) m^2), read with one summation index."""
    if terms < 1:
        raise ArgumentError("terms must be >= 1")
    with ctx.work():
        total = mpf(0)
        for t in delta_terms(terms):
            total += _to_mpf(t)
        return total


def delta_tail_bound(terms: int) -> mpf:
    """Bound on the omitted delta terms: H^(4) < 1.09 and the C(2m,m) m^2 decay below 1/4."""
    c = math.comb(2 * (terms + 1), terms + 1)
    return mpf(9) * mpf("1.0824") / (c * (terms + 1) ** 2) * mpf(4) / 3
