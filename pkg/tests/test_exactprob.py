import math
import warnings
from fractions import Fraction

import mpmath
import numpy as np
import pytest

from blockpmp.exactprob import (
    ExactLimitExceeded,
    ExactProb,
    comparison_bounds,
    component_pmp,
    count_irreducibles,
    dun,
    harmonic,
    is_prime_power,
    mobius,
    pmp_exact,
    pmp_single_block,
    pmpmin_approx,
    pmpmin_exact,
    pmpmin_large_field,
    pmpmin_log,
    pmpmin_medium_field,
    pmpmin_one_sided,
    rank_distribution,
    to_decimal,
    worst_profile,
)
from blockpmp.jordan import spec_of, structure_types

from oracles import irreducibles_by_sieve, rank_change_brute, rank_distribution_brute


# ---------------------------------------------------------------------------
# number theory

def _factor(a):
    out, k = {}, 2
    while k * k <= a:
        while a % k == 0:
            out[k] = out.get(k, 0) + 1
            a //= k
        k += 1
    if a > 1:
        out[a] = out.get(a, 0) + 1
    return out


def test_mobius():
    assert (mobius(1), mobius(6), mobius(12)) == (1, 1, 0)
    assert (mobius(2), mobius(30), mobius(49)) == (-1, -1, 0)
    for a in range(1, 500):
        f = _factor(a)
        expected = 0 if any(e > 1 for e in f.values()) else (-1) ** len(f)
        assert mobius(a) == expected
    with pytest.raises(ValueError):
        mobius(0)


def test_count_irreducibles_examples():
    assert count_irreducibles(2, 2) == 1
    assert count_irreducibles(2, 3) == 2
    assert count_irreducibles(7, 1) == 7
    assert [count_irreducibles(2, m) for m in range(1, 11)] == [2, 1, 2, 3, 6, 9, 18, 30, 56, 99]
    with pytest.raises(ValueError):
        count_irreducibles(1, 3)


@pytest.mark.parametrize("q", [2, 3, 4, 5])
def test_count_irreducibles_sieve(q):
    for m in range(1, 6):
        assert count_irreducibles(q, m) == len(irreducibles_by_sieve(q, m))


def test_count_identity():
    # sum_{d | m} d L_q(d) = q^m
    for q in (2, 3, 4, 5, 7, 8, 9, 11):
        for m in range(1, 13):
            assert sum(d * count_irreducibles(q, d) for d in range(1, m + 1) if m % d == 0) == q**m


def test_prime_power():
    assert [q for q in range(2, 30) if is_prime_power(q)] == [2, 3, 4, 5, 7, 8, 9, 11, 13, 16, 17, 19, 23, 25, 27, 29]
    with pytest.warns(UserWarning):
        pmp_single_block(6, 1, 1, 1) and pmpmin_exact(6, 3, 1)


# ---------------------------------------------------------------------------
# rank-one updates and the recurrence

def test_dun_examples():
    for Q in (2, 3, 7, 49):
        for b in (1, 2, 4):
            D, U, N = dun(Q, b, 0)
            assert D == 0 and N == Fraction(2 * Q**b - 1, Q ** (2 * b))
            assert dun(Q, b, b)[1] == 0
            for r in range(b + 1):
                d_, u_, n_ = dun(Q, b, r)
                assert min(d_, u_, n_) >= 0 and d_ + u_ + n_ == 1
    assert dun(2, 1, 0) == (0, Fraction(1, 4), Fraction(3, 4))
    with pytest.raises(ValueError):
        dun(2, 2, 3)
    with pytest.raises(ValueError):
        dun(1, 2, 0)


@pytest.mark.parametrize("p,b", [(2, 1), (2, 2), (2, 3), (3, 1), (3, 2), (5, 1), (5, 2)])
def test_dun_brute_force(p, b):
    for r in range(b + 1):
        assert dun(p, b, r) == rank_change_brute(p, b, r)


def test_dun_rectangular_square_default():
    assert dun(3, 2, 1) == dun(3, 2, 1, cols=2)
    assert rank_distribution(3, 2, 4) == rank_distribution(3, 2, 4, cols=2)
    assert sum(rank_distribution(3, 2, 4, cols=3).probs) == 1


def test_rank_distribution_examples():
    for Q in (2, 7, 49):
        for b in (1, 3):
            assert rank_distribution(Q, b, 0).probs == (1,)
            assert rank_distribution(Q, b, 1).zero == Fraction(2 * Q**b - 1, Q ** (2 * b))
    assert rank_distribution(2, 1, 2)[5] == 0
    with pytest.raises(ValueError):
        rank_distribution(2, 0, 1)


@pytest.mark.parametrize("p,b,t", [(2, 1, 2), (2, 1, 3), (2, 2, 2), (2, 2, 3), (3, 2, 2), (2, 3, 2), (5, 1, 3)])
def test_rank_distribution_brute_force(p, b, t):
    assert list(rank_distribution(p, b, t).probs) == rank_distribution_brute(p, b, t)


def test_rank_distribution_mass_and_monotone():
    for Q in (2, 3, 4, 5, 7, 8, 9, 25, 49):
        for b in range(1, 5):
            prev = None
            for t in range(0, 7):
                dist = rank_distribution(Q, b, t)
                assert sum(dist.probs) == 1 and min(dist.probs) >= 0
                assert len(dist.probs) == min(t, b) + 1
                if t >= 1:
                    cur = 1 - dist.zero
                    assert prev is None or cur >= prev
                    prev = cur


# ---------------------------------------------------------------------------
# known structure

def test_pmp_exact_examples(examples):
    assert pmp_exact(examples["a5"], 1) == Fraction(6, 7) ** 10
    assert to_decimal(pmp_exact(examples["a5"], 1), 3) == "0.214"
    assert to_decimal(pmp_exact(examples["a2"], 2), 3) == "0.959"
    assert to_decimal(pmp_exact(examples["a1"], 3), 5) == "0.99998"
    with pytest.raises(ValueError):
        pmp_exact(examples["a1"], 0)


def test_table_values(examples):
    from conftest import TABLE1
    for name, row in TABLE1.items():
        for b, reference in enumerate(row, 1):
            digits = len(reference.split(".")[1])
            assert to_decimal(pmp_exact(examples[name], b), digits) == reference, (name, b)


def test_single_block_closed_form():
    assert pmp_single_block(7, 2, 1, 1) == Fraction(48, 49) ** 2
    assert abs(float(pmp_single_block(7, 2, 1, 1)) - 0.9596) < 5e-5
    assert pmp_single_block(7, 2, 1, 3) == pmp_single_block(7, 2, 5, 3)
    assert pmp_single_block(2, 1, 1, 1) == Fraction(1, 4)
    assert pmp_single_block(2, 2, 1, 1) == Fraction(9, 16)
    with pytest.raises(ValueError):
        pmp_single_block(2, 0, 1, 1)


def test_single_block_equals_recurrence():
    for q in (2, 3, 5, 7, 4, 9):
        for d in range(1, 4):
            for b in range(1, 6):
                assert component_pmp(q, d, 1, b) == pmp_single_block(q, d, 1, b)
                assert pmp_exact(spec_of(q, (d, [3])), b) == pmp_single_block(q, d, 3, b)


def test_a2_decomposition():
    # A2 = J_{f^2} + C_g: product of the two single-block values
    for b in range(1, 5):
        assert pmp_exact(spec_of(7, ("6,3,1", [2]), ("4,1", [1])), b) == \
            pmp_single_block(7, 2, 2, b) * pmp_single_block(7, 1, 1, b)


def test_exponent_invariance():
    for b in range(1, 5):
        base = pmp_exact(spec_of(7, ("6,3,1", [1])), b)
        assert pmp_exact(spec_of(7, ("6,3,1", [5])), b) == base
        assert pmp_exact(spec_of(3, (1, [2, 2, 1]), (2, [1])), b) == \
            pmp_exact(spec_of(3, (1, [4, 4]), (2, [3, 2, 2])), b)


def test_example_ordering(examples):
    for b in range(1, 5):
        v = {k: pmp_exact(s, b) for k, s in examples.items()}
        assert v["a1"] > v["a3"] > v["a2"] == v["a4"] > v["a5"]


def test_exact_prob_range_and_rendering():
    with pytest.raises(ValueError):
        ExactProb(3, 2)
    with pytest.raises(ValueError):
        ExactProb(-1, 2)
    x = ExactProb(1, 8)
    assert x.decimal(2) == "0.12"          # half-even
    assert to_decimal(Fraction(3, 8), 2) == "0.38"
    assert to_decimal(Fraction(1), 3) == "1.000"
    assert abs(float(x.log()) - math.log(0.125)) < 1e-15


# ---------------------------------------------------------------------------
# worst case

def test_worst_profile_examples():
    p = worst_profile(7, 5)
    assert (p.m, p.counts, p.residual) == (1, (5,), 5)
    p = worst_profile(2, 2)
    assert (p.m, p.counts[0]) == (2, 2) and p.max_degree == 1
    # q=2, n=5: x, x+1 (degree 2), x^2+x+1 (degree 2), then 1 left over
    p = worst_profile(2, 5)
    assert p.m == 3 and p.counts == (2, 1, 0) and p.residual == 1
    assert p.max_degree == 2 and p.filled == 4
    with pytest.raises(ValueError):
        worst_profile(2, 0)


def test_worst_profile_invariants():
    for q in (2, 3, 4, 5, 7):
        for n in range(1, 200):
            prof = worst_profile(q, n)
            below = sum(d * count_irreducibles(q, d) for d in range(1, prof.m))
            assert below <= n < below + prof.m * count_irreducibles(q, prof.m)
            assert prof.residual == n - below
            for d in range(1, prof.m):
                assert prof.counts[d - 1] == count_irreducibles(q, d)
            assert prof.counts[prof.m - 1] == min(count_irreducibles(q, prof.m), prof.residual // prof.m)
            assert prof.filled <= n


def test_pmpmin_examples(examples):
    assert pmpmin_exact(7, 5, 1) == Fraction(6, 7) ** 10 == pmp_exact(examples["a5"], 1)
    for q, n, b in [(7, 5, 2), (11, 11, 3), (13, 4, 1)]:
        assert pmpmin_exact(q, n, b) == (1 - Fraction(1, q**b)) ** (2 * n)
    assert pmpmin_exact(2, 5, 2) == Fraction(3, 4) ** 4 * Fraction(15, 16) ** 2
    with pytest.raises(ExactLimitExceeded):
        pmpmin_exact(2, 10**5, 2)


def test_single_exponent_reading_differs():
    # the single-exponent reading loses every factor when the last count is zero
    assert pmpmin_exact(2, 5, 2, reading="single-exponent") == 1
    assert pmpmin_exact(2, 5, 2) < 1
    assert pmpmin_exact(7, 5, 1, reading="single-exponent") == pmpmin_exact(7, 5, 1)
    with pytest.raises(ValueError):
        pmpmin_exact(2, 5, 2, reading="other")


@pytest.mark.parametrize("q", [2, 3])
def test_pmpmin_is_minimum_over_all_structures(q):
    for n in range(1, 7):
        types = structure_types(q, n)
        for b in range(1, 4):
            lo = pmpmin_exact(q, n, b)
            values = [pmp_exact(s, b) for s in types]
            assert min(values) == lo


def test_log_agrees_with_exact():
    with mpmath.workdps(40):
        for q in (2, 3, 4, 5, 7):
            for n in range(1, 101):
                for b in range(1, 5):
                    exact = pmpmin_exact(q, n, b)
                    res = pmpmin_log(q, n, b)
                    num = mpmath.mpf(exact.numerator) / exact.denominator
                    assert abs(res.pmpmin - num) <= mpmath.mpf(10) ** -12 * num
                    fail = 1 - num
                    assert abs(res.failure - fail) <= mpmath.mpf(10) ** -12 * fail


def test_log_failure_limit():
    # prod over all monic irreducibles of (1 - t^deg) = 1 - q t, so the
    # worst case tends to (1 - q^{1-b})^2 as n grows
    with mpmath.workdps(50):
        for q, b in [(2, 3), (2, 22), (3, 4), (5, 3)]:
            limit_failure = 1 - (1 - mpmath.mpf(q) ** (1 - b)) ** 2
            res = pmpmin_log(q, 10**8, b)
            assert res.failure <= limit_failure
            assert res.failure > (1 - mpmath.mpf(10) ** -6) * limit_failure


def test_figure_character():
    res = pmpmin_log(2, 10**8, 22)
    assert res.failure < mpmath.mpf("1e-6")
    assert abs(res.failure / mpmath.mpf("9.53674089033e-7") - 1) < 1e-10
    for q in (2, 3, 5):
        fails = [pmpmin_log(q, 10**8, b).failure for b in range(1, 25)]
        assert all(a > c for a, c in zip(fails, fails[1:]))


def test_approx_regimes():
    for q, n, b in [(7, 5, 1), (101, 50, 2), (13, 13, 3)]:
        exact, approx = pmpmin_large_field(q, n, b)
        assert exact == pmpmin_exact(q, n, b)
        assert approx == pytest.approx(math.exp(-2 * n / q**b))
        x = 1 / q**b
        assert approx * math.exp(-2 * n * x * x) * (1 - 1e-12) <= float(exact) <= approx * (1 + 1e-12)
    with pytest.raises(ValueError):
        pmpmin_large_field(3, 5, 1)
    assert pmpmin_approx(7, 5, 2) == pytest.approx(math.exp(-2 / 49))
    assert harmonic(1) == 1 and harmonic(4) == Fraction(25, 12)


def test_medium_field_regime():
    for q, n in [(5, 7), (5, 9), (7, 11), (7, 25), (11, 21)]:
        for b in (1, 2, 3):
            exact, approx = pmpmin_medium_field(q, n, b)
            if (n - q) % 2 == 0:
                assert exact == pmpmin_exact(q, n, b)
            # -x - x^2 <= log(1 - x) <= -x for x <= 1/2
            x1, x2 = 1 / q**b, 1 / q ** (2 * b)
            second = 2 * q * x1 * x1 + (n - q) * x2 * x2
            assert approx * math.exp(-second) * (1 - 1e-12) <= float(exact) <= approx * (1 + 1e-12)
    with pytest.raises(ValueError):
        pmpmin_medium_field(3, 20, 1)


def _approx_max_error(b):
    ns = sorted(set(range(1, 201)) | {int(x) for x in np.geomspace(200, 10**6, 120)})
    return max(abs(pmpmin_approx(2, n, b) / float(pmpmin_log(2, n, b).pmpmin) - 1) for n in ns)


@pytest.mark.parametrize("b", [5, 6, 7, 8, 10])
def test_harmonic_approx_within_ten_percent(b):
    assert _approx_max_error(b) < 0.10


def test_harmonic_approx_at_b4_recorded():
    # at b = 4 the harmonic approximation drifts past 10% by n = 10^6
    assert _approx_max_error(4) == pytest.approx(0.1617, abs=5e-4)


def test_comparison_bounds():
    res = comparison_bounds(2, 100)
    assert res["wiedemann"] == pytest.approx(1 / (6 * math.log2(100)))
    assert res["wiedemann"] == pytest.approx(0.0251, abs=5e-5)
    for q in (101, 1009, 10007):
        res = comparison_bounds(q, q)
        assert res["kaltofen_pan"] == 0
        assert res["wiedemann"] == pytest.approx(1 / 6)
        assert res["ours"] == pytest.approx((1 - 1 / q) ** q)
        assert abs(res["ours"] - math.exp(-1)) / math.exp(-1) < 0.02
    big = comparison_bounds(10**6 + 3, 10)
    assert big["kaltofen_pan"] == pytest.approx(1, abs=1e-4)
    assert big["ours"] == pytest.approx(1, abs=1e-4)
    with pytest.raises(ValueError):
        comparison_bounds(2, 1)


def test_one_sided_general():
    # small fields: one factor (1 - q^-d) per irreducible of the extremal profile
    prof = worst_profile(2, 5)
    expected = math.prod((1 - 2.0**-d) ** c for d, c in enumerate(prof.counts, 1))
    assert pmpmin_one_sided(2, 5) == pytest.approx(expected)


def test_non_prime_power_warning():
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        pmpmin_exact(4, 3, 1)
