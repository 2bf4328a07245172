"""Dense univariate polynomials over GF(p), the shift action on sequences,
irreducibility testing and Berlekamp-Massey.

Sequences are plain lists (or 1-d arrays) of residues; the field travels with
the polynomial that acts on them.
"""

from __future__ import annotations

import re
from functools import reduce
from typing import Iterable, Sequence

import numpy as np

from .finitefield import PrimeField

DEFAULT_ENUMERATION_LIMIT = 2**20


class SequenceTooShort(ValueError):
    pass


class LimitExceeded(ValueError):
    pass


def _trim(coeffs: list[int]) -> tuple[int, ...]:
    while coeffs and coeffs[-1] == 0:
        coeffs.pop()
    return tuple(coeffs)


class Poly:
    """Polynomial with coefficients in ascending degree order, no trailing zeros."""

    __slots__ = ("coeffs", "field")

    def __init__(self, coeffs: Iterable[int], field: PrimeField):
        p = field.p
        self.coeffs = _trim([int(c) % p for c in coeffs])
        self.field = field

    # constructors ---------------------------------------------------------
    @classmethod
    def zero(cls, field: PrimeField) -> "Poly":
        return cls((), field)

    @classmethod
    def one(cls, field: PrimeField) -> "Poly":
        return cls((1,), field)

    @classmethod
    def x(cls, field: PrimeField) -> "Poly":
        return cls((0, 1), field)

    @classmethod
    def monomial(cls, k: int, field: PrimeField, c: int = 1) -> "Poly":
        return cls([0] * k + [c], field)

    # basic properties ------------------------------------------------------
    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def lead(self) -> int:
        return self.coeffs[-1] if self.coeffs else 0

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_monic(self) -> bool:
        return self.lead == 1

    def monic(self) -> "Poly":
        if self.is_zero():
            return self
        inv = self.field.inv(self.lead)
        return Poly([c * inv for c in self.coeffs], self.field)

    def __getitem__(self, i: int) -> int:
        return self.coeffs[i] if 0 <= i < len(self.coeffs) else 0

    def __eq__(self, other):
        if isinstance(other, Poly):
            return self.field == other.field and self.coeffs == other.coeffs
        if isinstance(other, int):
            return self.coeffs == _trim([other % self.field.p])
        return NotImplemented

    def __hash__(self):
        return hash((self.field.p, self.coeffs))

    def __bool__(self):
        return bool(self.coeffs)

    def __repr__(self):
        return f"Poly({format_poly(self)!r}, GF({self.field.p}))"

    def __str__(self):
        return format_poly(self)

    # arithmetic -------------------------------------------------------------
    def _check(self, other) -> "Poly":
        if isinstance(other, int):
            return Poly((other,), self.field)
        if not isinstance(other, Poly):
            raise TypeError(f"cannot combine Poly with {type(other).__name__}")
        if other.field != self.field:
            raise ValueError(f"mixing polynomials over {self.field} and {other.field}")
        return other

    def __add__(self, other):
        other = self._check(other)
        a, b = self.coeffs, other.coeffs
        n = max(len(a), len(b))
        return Poly([(a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0) for i in range(n)], self.field)

    __radd__ = __add__

    def __neg__(self):
        return Poly([-c for c in self.coeffs], self.field)

    def __sub__(self, other):
        return self + (-self._check(other))

    def __rsub__(self, other):
        return self._check(other) - self

    def __mul__(self, other):
        other = self._check(other)
        a, b = self.coeffs, other.coeffs
        if not a or not b:
            return Poly.zero(self.field)
        out = [0] * (len(a) + len(b) - 1)
        for i, ai in enumerate(a):
            if ai:
                for j, bj in enumerate(b):
                    out[i + j] += ai * bj
        return Poly(out, self.field)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative polynomial power")
        result, base = Poly.one(self.field), self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __divmod__(self, other):
        other = self._check(other)
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        p = self.field.p
        rem = list(self.coeffs)
        db = other.degree
        if len(rem) <= db:
            return Poly.zero(self.field), self
        inv = self.field.inv(other.lead)
        quot = [0] * (len(rem) - db)
        b = other.coeffs
        for k in range(len(rem) - 1, db - 1, -1):
            c = rem[k] * inv % p
            if c:
                quot[k - db] = c
                for j in range(db + 1):
                    rem[k - db + j] = (rem[k - db + j] - c * b[j]) % p
        return Poly(quot, self.field), Poly(rem[:db], self.field)

    def __floordiv__(self, other):
        return divmod(self, other)[0]

    def __mod__(self, other):
        return divmod(self, other)[1]

    def __call__(self, x: int) -> int:
        acc = 0
        for c in reversed(self.coeffs):
            acc = (acc * x + c) % self.field.p
        return acc

    def pow_mod(self, k: int, modulus: "Poly") -> "Poly":
        result, base = Poly.one(self.field), self % modulus
        while k:
            if k & 1:
                result = result * base % modulus
            base = base * base % modulus
            k >>= 1
        return result


# gcd / lcm ----------------------------------------------------------------------

def gcd(f: Poly, g: Poly) -> Poly:
    """Monic gcd; gcd(0, 0) is 0."""
    while g:
        f, g = g, f % g
    return f.monic()


def lcm(f: Poly, g: Poly) -> Poly:
    if f.is_zero() or g.is_zero():
        return Poly.zero(f.field)
    return (f * g // gcd(f, g)).monic()


def lcm_all(polys: Iterable[Poly], field: PrimeField) -> Poly:
    return reduce(lcm, polys, Poly.one(field))


# text format ----------------------------------------------------------------------

_TERM = re.compile(r"([+-]?)\s*(\d*)\s*(\*?\s*x\s*(?:\^\s*(\d+))?)?")


def parse_poly(text: str, field: PrimeField) -> Poly:
    """Parse ``"6,3,1"`` (ascending coefficients) or ``"x^2+3x+6"``."""
    s = text.strip()
    if not s:
        raise ValueError("empty polynomial")
    if "x" not in s:
        try:
            return Poly([int(tok) for tok in s.split(",")], field)
        except ValueError:
            raise ValueError(f"cannot parse polynomial {text!r}") from None
    coeffs: dict[int, int] = {}
    pos = 0
    s = s.replace(" ", "")
    while pos < len(s):
        m = _TERM.match(s, pos)
        if not m or m.end() == pos:
            raise ValueError(f"cannot parse polynomial {text!r} near position {pos}")
        sign, num, xpart, exp = m.groups()
        if not num and not xpart:
            raise ValueError(f"cannot parse polynomial {text!r} near position {pos}")
        c = int(num) if num else 1
        if sign == "-":
            c = -c
        k = (int(exp) if exp else 1) if xpart else 0
        coeffs[k] = coeffs.get(k, 0) + c
        pos = m.end()
    top = max(coeffs)
    return Poly([coeffs.get(i, 0) for i in range(top + 1)], field)


def format_poly(f: Poly) -> str:
    if f.is_zero():
        return "0"
    terms = []
    for k in range(f.degree, -1, -1):
        c = f.coeffs[k]
        if not c:
            continue
        if k == 0:
            terms.append(str(c))
        else:
            mono = "x" if k == 1 else f"x^{k}"
            terms.append(mono if c == 1 else f"{c}{mono}")
    return "+".join(terms)


def format_coeffs(f: Poly) -> str:
    return ",".join(str(c) for c in f.coeffs) or "0"


# sequences -------------------------------------------------------------------------

def apply_poly_to_sequence(f: Poly, seq: Sequence[int]) -> list[int]:
    """``f(S)``: term k is ``sum_i f_i * S[i + k]``; length ``len(S) - deg f``."""
    if f.is_zero():
        raise ValueError("the zero polynomial has no meaningful action")
    d = f.degree
    if len(seq) < d + 1:
        raise SequenceTooShort(f"need at least {d + 1} terms to apply a degree-{d} polynomial, got {len(seq)}")
    p = f.field.p
    s = [int(v) for v in seq]
    fc = f.coeffs
    return [sum(fc[i] * s[i + k] for i in range(d + 1)) % p for k in range(len(s) - d)]


def berlekamp_massey(seq: Sequence[int], field: PrimeField) -> Poly:
    """Monic minimal generating polynomial of a scalar sequence.

    Correct for the infinite continuation whenever ``len(seq) >= 2 * deg``.
    The classical connection polynomial ``C`` (with ``C(0) = 1``) is returned
    reversed, ``x^L C(1/x)``, to match the forward shift action.
    """
    p = field.p
    s = [int(v) % p for v in seq]
    C, B = [1], [1]
    L, m, b = 0, 1, 1
    for n in range(len(s)):
        d = s[n]
        for i in range(1, L + 1):
            if i < len(C):
                d = (d + C[i] * s[n - i]) % p
        if d == 0:
            m += 1
            continue
        coef = d * pow(b, p - 2, p) % p
        T = C[:]
        if len(C) < len(B) + m:
            C = C + [0] * (len(B) + m - len(C))
        for i, bi in enumerate(B):
            C[i + m] = (C[i + m] - coef * bi) % p
        if 2 * L <= n:
            L, B, b, m = n + 1 - L, T, d, 1
        else:
            m += 1
    C = C + [0] * (L + 1 - len(C))
    return Poly(reversed(C[:L + 1]), field)


def minpoly_block_sequence(block: np.ndarray, field: PrimeField) -> Poly:
    """lcm of the entrywise minimal polynomials of a ``(len, b, b)`` sequence."""
    block = np.asarray(block)
    if block.ndim != 3:
        raise ValueError(f"expected a (len, rows, cols) array, got shape {block.shape}")
    _, rows, cols = block.shape
    return lcm_all(
        (berlekamp_massey(block[:, i, j].tolist(), field) for i in range(rows) for j in range(cols)),
        field,
    )


# irreducibility ----------------------------------------------------------------------

def _prime_divisors(n: int) -> list[int]:
    out, k = [], 2
    while k * k <= n:
        if n % k == 0:
            out.append(k)
            while n % k == 0:
                n //= k
        k += 1
    if n > 1:
        out.append(n)
    return out


def is_irreducible(f: Poly) -> bool:
    """Rabin's test: ``x^(p^d) = x mod f`` and ``gcd(x^(p^(d/r)) - x, f) = 1``
    for every prime ``r | d``."""
    d = f.degree
    if d < 1:
        raise ValueError("irreducibility is defined for degree >= 1")
    if d == 1:
        return True
    f = f.monic()
    p = f.field.p
    x = Poly.x(f.field)
    if f[0] == 0:
        return False
    for r in _prime_divisors(d):
        h = x.pow_mod(p ** (d // r), f) - x
        if gcd(h, f).degree != 0:
            return False
    return x.pow_mod(p**d, f) == x % f


def _monic_from_index(idx: int, d: int, field: PrimeField) -> Poly:
    p = field.p
    coeffs = []
    for _ in range(d):
        idx, c = divmod(idx, p)
        coeffs.append(c)
    return Poly(coeffs + [1], field)


def enumerate_irreducibles(field: PrimeField, d: int, limit: int = DEFAULT_ENUMERATION_LIMIT) -> list[Poly]:
    """All monic irreducibles of degree ``d``.

    Ordered by the integer ``sum_i c_i p^i`` of the lower coefficients, which
    for ``d = 1`` over GF(2) gives ``[x, x+1]``.
    """
    if d < 1:
        raise ValueError("degree must be >= 1")
    total = field.p**d
    if total > limit:
        raise LimitExceeded(f"{field.p}^{d} = {total} candidates exceeds limit {limit}")
    return [f for f in (_monic_from_index(i, d, field) for i in range(total)) if is_irreducible(f)]


def random_irreducible(rng: np.random.Generator, field: PrimeField, d: int) -> Poly:
    if d < 1:
        raise ValueError("degree must be >= 1")
    while True:
        f = Poly([int(c) for c in rng.integers(0, field.p, size=d)] + [1], field)
        if is_irreducible(f):
            return f


def product_of_powers(polys: Iterable[tuple[Poly, int]]) -> Poly:
    """Product of ``f**e`` over ``(f, e)`` pairs."""
    polys = list(polys)
    if not polys:
        raise ValueError("empty product needs a field")
    field = polys[0][0].field
    return reduce(lambda acc, fe: acc * fe[0] ** fe[1], polys, Poly.one(field))
