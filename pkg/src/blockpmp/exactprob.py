"""Exact probabilities that a random b x b projection preserves the minimal
polynomial, for a known elementary-divisor structure and in the worst case.

Everything here is arithmetic in the field size, so ``q`` may be any integer
>= 2; a warning is issued when it is not a prime power.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from decimal import ROUND_HALF_EVEN, Decimal, localcontext
from fractions import Fraction
from functools import lru_cache

import mpmath

DEFAULT_EXACT_LIMIT = 10**4
LOG_DPS = 50


class ExactLimitExceeded(ValueError):
    pass


class ExactProb(Fraction):
    """A probability held as an exact rational."""

    def __new__(cls, numerator=0, denominator=None):
        self = super().__new__(cls, numerator, denominator)
        if not 0 <= self <= 1:
            raise ValueError(f"probability out of range: {Fraction(self)}")
        return self

    def decimal(self, digits: int = 3) -> str:
        return to_decimal(self, digits)

    def log(self) -> mpmath.mpf:
        with mpmath.workdps(LOG_DPS):
            return mpmath.log(mpmath.mpf(self.numerator)) - mpmath.log(mpmath.mpf(self.denominator))

    def __repr__(self):
        return f"ExactProb({self.numerator}/{self.denominator})"


def to_decimal(x: Fraction, digits: int = 3) -> str:
    """Round-half-even decimal rendering with exactly ``digits`` places."""
    x = Fraction(x)
    with localcontext() as ctx:
        ctx.prec = digits + len(str(x.denominator)) + len(str(abs(x.numerator))) + 10
        value = Decimal(x.numerator) / Decimal(x.denominator)
        return str(value.quantize(Decimal(1).scaleb(-digits), rounding=ROUND_HALF_EVEN))


def is_prime_power(q: int) -> bool:
    if q < 2:
        return False
    p = next((k for k in range(2, math.isqrt(q) + 1) if q % k == 0), q)
    while q % p == 0:
        q //= p
    return q == 1


def _check_q(q: int) -> None:
    if q < 2:
        raise ValueError(f"field size must be >= 2, got {q}")
    if not is_prime_power(q):
        warnings.warn(f"q={q} is not a prime power; formulas are evaluated arithmetically", stacklevel=3)


# ---------------------------------------------------------------------------
# irreducible counts

def mobius(a: int) -> int:
    if a < 1:
        raise ValueError("mobius is defined for positive integers")
    sign, k = 1, 2
    while k * k <= a:
        if a % k == 0:
            a //= k
            if a % k == 0:
                return 0
            sign = -sign
        k += 1
    return -sign if a > 1 else sign


def _divisors(m: int) -> list[int]:
    small = [d for d in range(1, math.isqrt(m) + 1) if m % d == 0]
    return sorted(set(small + [m // d for d in small]))


@lru_cache(maxsize=None)
def count_irreducibles(q: int, m: int) -> int:
    """Number of monic irreducibles of degree ``m`` over a field of size ``q``."""
    if q < 2 or m < 1:
        raise ValueError(f"need q >= 2 and m >= 1, got q={q}, m={m}")
    total = sum(mobius(m // d) * q**d for d in _divisors(m))
    return total // m


# ---------------------------------------------------------------------------
# rank-one updates

def dun(Q: int, b: int, r: int, cols: int | None = None) -> tuple[Fraction, Fraction, Fraction]:
    """Probabilities that adding a uniform rank-one ``u v^T`` to a rank-``r``
    ``b x cols`` matrix lowers, raises, or keeps the rank."""
    c = b if cols is None else cols
    if not 0 <= r <= min(b, c):
        raise ValueError(f"rank {r} out of range for a {b}x{c} matrix")
    if Q < 2:
        raise ValueError(f"field size must be >= 2, got {Q}")
    total = Fraction(Q) ** (b + c)
    down = Fraction(Q) ** (r - 1) * (Q**r - 1) / total
    up = Fraction((Q ** (b - r) - 1) * (Q ** (c - r) - 1), Q ** (b + c - 2 * r))
    return down, up, 1 - down - up


@dataclass(frozen=True)
class RankDistribution:
    Q: int
    b: int
    t: int
    probs: tuple[Fraction, ...]

    def __getitem__(self, r: int) -> Fraction:
        return self.probs[r] if 0 <= r < len(self.probs) else Fraction(0)

    @property
    def zero(self) -> Fraction:
        return self.probs[0]


@lru_cache(maxsize=4096)
def _dun(Q: int, b: int, c: int, r: int) -> tuple[Fraction, Fraction, Fraction]:
    return dun(Q, b, r, c)


@lru_cache(maxsize=4096)
def _rank_probs(Q: int, b: int, c: int, t: int) -> tuple[Fraction, ...]:
    probs: tuple[Fraction, ...] = (Fraction(1),)
    for step in range(1, t + 1):
        prev = probs
        out = []
        for r in range(min(step, b, c) + 1):
            val = Fraction(0)
            if r < len(prev):
                val += prev[r] * _dun(Q, b, c, r)[2]
            if 1 <= r <= len(prev):
                val += prev[r - 1] * _dun(Q, b, c, r - 1)[1]
            if r + 1 < len(prev):
                val += prev[r + 1] * _dun(Q, b, c, r + 1)[0]
            out.append(val)
        probs = tuple(out)
    return probs


def rank_distribution(Q: int, b: int, t: int, cols: int | None = None) -> RankDistribution:
    """Distribution of the rank of a sum of ``t`` uniform rank-one outer
    products of length-``b`` vectors over a field of size ``Q``."""
    if b < 1 or t < 0:
        raise ValueError(f"need b >= 1 and t >= 0, got b={b}, t={t}")
    return RankDistribution(Q, b, t, _rank_probs(Q, b, b if cols is None else cols, t))


# ---------------------------------------------------------------------------
# known structure

def component_pmp(q: int, d: int, s: int, b: int) -> Fraction:
    """Success probability for one primary component: degree ``d`` and ``s``
    Jordan blocks of top exponent."""
    return 1 - rank_distribution(q**d, b, s).zero


def pmp_exact(spec, b: int) -> ExactProb:
    """Exact probability for an :class:`~blockpmp.jordan.ElementaryDivisorSpec`."""
    if b < 1:
        raise ValueError("block size must be >= 1")
    _check_q(spec.q)
    out = Fraction(1)
    for d, s in spec.degree_profile():
        out *= component_pmp(spec.q, d, s, b)
    return ExactProb(out)


def pmp_single_block(q: int, d: int, e: int, b: int) -> ExactProb:
    """Closed form for one Jordan block ``J_{f^e}``; ``e`` does not matter."""
    if min(d, e, b) < 1:
        raise ValueError("d, e, b must all be >= 1")
    return ExactProb((1 - Fraction(1, q ** (d * b))) ** 2)


# ---------------------------------------------------------------------------
# worst case

@dataclass(frozen=True)
class WorstCaseProfile:
    """Irreducible counts of the extremal matrix.

    ``m`` is the cutoff degree with ``sum_{d<m} d L_q(d) <= n < sum_{d<=m} d L_q(d)``;
    ``counts[d-1]`` is how many degree-``d`` irreducibles are used, and
    ``residual`` is the degree left after all degrees below ``m``.
    """

    q: int
    n: int
    m: int
    counts: tuple[int, ...]
    residual: int

    @property
    def max_degree(self) -> int:
        """Largest degree actually used (may be below ``m`` when ``counts[m-1] == 0``)."""
        return max(d for d, c in enumerate(self.counts, 1) if c)

    @property
    def filled(self) -> int:
        return sum(d * c for d, c in enumerate(self.counts, 1))


def worst_profile(q: int, n: int) -> WorstCaseProfile:
    if n < 1 or q < 2:
        raise ValueError(f"need n >= 1 and q >= 2, got n={n}, q={q}")
    counts = []
    below = 0
    m = 1
    while True:
        lm = count_irreducibles(q, m)
        if n < below + m * lm:
            break
        counts.append(lm)
        below += m * lm
        m += 1
    r = n - below
    counts.append(min(count_irreducibles(q, m), r // m))
    return WorstCaseProfile(q, n, m, tuple(counts), r)


def _worst_exponents(profile: WorstCaseProfile, reading: str) -> list[tuple[int, int]]:
    """``(d, exponent)`` pairs of the worst-case product."""
    if reading == "per-degree":
        return [(d, 2 * c) for d, c in enumerate(profile.counts, 1)]
    if reading == "single-exponent":
        last = profile.counts[-1]
        return [(d, 2 * last) for d in range(1, profile.m + 1)]
    raise ValueError(f"unknown reading {reading!r}")


def pmpmin_exact(q: int, n: int, b: int, reading: str = "per-degree",
                 limit: int = DEFAULT_EXACT_LIMIT) -> ExactProb:
    """Exact worst-case probability over all ``n x n`` matrices.

    ``reading="single-exponent"`` uses the single exponent ``2 L_q(n, m)`` on every
    factor instead of the per-degree count; it is kept only for
    comparison and is not the minimum.
    """
    if n > limit:
        raise ExactLimitExceeded(f"n={n} exceeds exact limit {limit}; use pmpmin_log")
    _check_q(q)
    prof = worst_profile(q, n)
    out = Fraction(1)
    for d, k in _worst_exponents(prof, reading):
        out *= (1 - Fraction(1, q ** (d * b))) ** k
    return ExactProb(out)


@dataclass(frozen=True)
class LogWorstCase:
    log_pmpmin: mpmath.mpf
    pmpmin: mpmath.mpf
    failure: mpmath.mpf


def pmpmin_log(q: int, n: int, b: int, reading: str = "per-degree", dps: int = LOG_DPS) -> LogWorstCase:
    """Worst case in extended precision, for dimensions far past the exact limit.

    Each factor contributes ``k * log1p(-q^{-db})`` evaluated at ``dps``
    digits; the failure probability is ``-expm1(sum)`` so it keeps full
    relative accuracy when it is tiny.
    """
    prof = worst_profile(q, n)
    with mpmath.workdps(dps):
        total = mpmath.mpf(0)
        for d, k in _worst_exponents(prof, reading):
            if k:
                total += k * mpmath.log1p(-mpmath.power(q, -d * b))
        return LogWorstCase(+total, mpmath.exp(total), -mpmath.expm1(total))


def harmonic(m: int) -> Fraction:
    return sum((Fraction(1, k) for k in range(1, m + 1)), Fraction(0))


def pmpmin_approx(q: int, n: int, b: int) -> float:
    """``exp(-2 H_m / q^b)`` with ``H_m`` the harmonic number of the cutoff degree."""
    m = worst_profile(q, n).m
    return math.exp(-2 * float(harmonic(m)) / q**b)


def pmpmin_large_field(q: int, n: int, b: int) -> tuple[ExactProb, float]:
    """``q >= n``: every elementary divisor can be a distinct linear.
    Returns the exact value and ``exp(-2n/q^b)``."""
    if q < n:
        raise ValueError(f"needs q >= n, got q={q}, n={n}")
    exact = ExactProb((1 - Fraction(1, q**b)) ** (2 * n))
    return exact, math.exp(-2 * n / q**b)


def pmpmin_medium_field(q: int, n: int, b: int) -> tuple[ExactProb, float]:
    """``n > q >= sqrt(n)``: linears and quadratics only.
    Returns ``(1-q^-b)^{2q} (1-q^-2b)^{n-q}`` and its exponential approximation."""
    if not (n > q and q * q >= n):
        raise ValueError(f"needs n > q >= sqrt(n), got q={q}, n={n}")
    exact = ExactProb((1 - Fraction(1, q**b)) ** (2 * q) * (1 - Fraction(1, q ** (2 * b))) ** (n - q))
    return exact, math.exp(-(2 / q ** (b - 1) + (n - q) / q ** (2 * b)))


def pmpmin_one_sided(q: int, n: int) -> float:
    """Worst case with one side of the projection fixed (b = 1): each
    irreducible contributes a single factor ``1 - q^{-d}``."""
    prof = worst_profile(q, n)
    with mpmath.workdps(30):
        total = mpmath.mpf(0)
        for d, c in enumerate(prof.counts, 1):
            if c:
                total += c * mpmath.log1p(-mpmath.power(q, -d))
        return float(mpmath.exp(total))


def comparison_bounds(q: int, n: int) -> dict[str, float]:
    """Single-vector (b = 1) lower bounds: Wiedemann's ``1/(6 log_q n)``,
    Kaltofen-Pan's ``1 - n/q``, and the exact worst case."""
    if n < 2 or q < 2:
        raise ValueError(f"need n >= 2 and q >= 2, got n={n}, q={q}")
    return {
        "wiedemann": 1 / (6 * math.log(n, q)),
        "kaltofen_pan": max(0.0, 1 - n / q),
        "ours": pmpmin_one_sided(q, n),
    }
