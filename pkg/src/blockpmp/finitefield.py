"""Prime field arithmetic, dense matrices mod p, and seeded sampling.

Matrices are plain ``numpy.int64`` arrays holding canonical residues in
``[0, p)``.  Since ``p < 2**31`` a single product fits in 64 bits; sums of
products are reduced in slices small enough to avoid overflow.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

MAX_MODULUS = 2**31

#: Name and version of the random stream.  Bump the version whenever the
#: derivation of child streams changes, since it changes every reproduced number.
RNG_NAME = "numpy-PCG64/SeedSequence"
RNG_VERSION = 1


class NotPrime(ValueError):
    pass


class FieldDivisionByZero(ZeroDivisionError):
    pass


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin, exact for all n < 3.3e24."""
    if n < 2:
        return False
    small = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)
    for sp in small:
        if n % sp == 0:
            return n == sp
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in small:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def make_rng(seed: int, *key: int) -> np.random.Generator:
    """Child generator for ``(seed, *key)``.

    Stream-split rule: the master seed is the SeedSequence entropy and the
    key (e.g. ``(purpose, chunk_index)``) is its spawn key, so every child is
    reproducible on its own without replaying siblings.
    """
    ss = np.random.SeedSequence(entropy=seed, spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.PCG64(ss))


@dataclass(frozen=True)
class PrimeField:
    p: int

    def __post_init__(self):
        if not isinstance(self.p, (int, np.integer)) or self.p < 2:
            raise NotPrime(f"modulus must be an integer >= 2, got {self.p!r}")
        if self.p >= MAX_MODULUS:
            raise ValueError(f"modulus {self.p} exceeds 2^31")
        if not is_prime(int(self.p)):
            raise NotPrime(f"{self.p} is not prime")
        object.__setattr__(self, "p", int(self.p))

    def __call__(self, value: int) -> "FieldElement":
        return FieldElement(int(value) % self.p, self)

    def __repr__(self):
        return f"GF({self.p})"

    @property
    def zero(self) -> "FieldElement":
        return FieldElement(0, self)

    @property
    def one(self) -> "FieldElement":
        return FieldElement(1, self)

    # integer-level helpers used by the polynomial and matrix code
    def inv(self, a: int) -> int:
        a %= self.p
        if a == 0:
            raise FieldDivisionByZero(f"0 has no inverse in GF({self.p})")
        return pow(a, self.p - 2, self.p)

    def elements(self):
        return range(self.p)

    def random_element(self, rng: np.random.Generator) -> "FieldElement":
        return FieldElement(int(rng.integers(0, self.p)), self)

    def random_matrix(self, rng: np.random.Generator, rows: int, cols: int) -> np.ndarray:
        """Uniform ``rows x cols`` matrix.

        ``Generator.integers`` draws bounded integers by rejection (Lemire),
        so there is no modulo bias.
        """
        if rows < 1 or cols < 1:
            raise ValueError(f"matrix dimensions must be positive, got {rows}x{cols}")
        return rng.integers(0, self.p, size=(rows, cols), dtype=np.int64)

    def random_vector(self, rng: np.random.Generator, n: int) -> np.ndarray:
        return self.random_matrix(rng, 1, n)[0]


def new_field(p: int) -> PrimeField:
    return PrimeField(p)


@dataclass(frozen=True)
class FieldElement:
    value: int
    field: PrimeField

    def _coerce(self, other) -> int:
        if isinstance(other, FieldElement):
            if other.field != self.field:
                raise ValueError(f"mixing elements of {self.field} and {other.field}")
            return other.value
        if isinstance(other, (int, np.integer)):
            return int(other) % self.field.p
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return FieldElement((self.value + o) % self.field.p, self.field)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return FieldElement((self.value - o) % self.field.p, self.field)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return FieldElement((o - self.value) % self.field.p, self.field)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return FieldElement(self.value * o % self.field.p, self.field)

    __rmul__ = __mul__

    def __neg__(self):
        return FieldElement(-self.value % self.field.p, self.field)

    def inv(self) -> "FieldElement":
        return FieldElement(self.field.inv(self.value), self.field)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return FieldElement(self.value * self.field.inv(o) % self.field.p, self.field)

    def __pow__(self, k: int):
        if k < 0:
            return self.inv() ** (-k)
        return FieldElement(pow(self.value, k, self.field.p), self.field)

    def __bool__(self):
        return self.value != 0

    def __int__(self):
        return self.value

    def __repr__(self):
        return f"{self.value} (mod {self.field.p})"


# dense matrices mod p --------------------------------------------------------

def _safe_inner(p: int) -> int:
    """Largest inner dimension whose sum of products cannot overflow int64."""
    return max(1, (2**63 - 1) // ((p - 1) ** 2 or 1))


def matmul_mod(a: np.ndarray, b: np.ndarray, p: int) -> np.ndarray:
    """``(a @ b) mod p`` for int64 residues, batching over leading axes."""
    a = np.asarray(a, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64)
    k = a.shape[-1]
    step = _safe_inner(p)
    if k <= step:
        return np.matmul(a, b) % p
    out = None
    for lo in range(0, k, step):
        part = np.matmul(a[..., lo:lo + step], b[..., lo:lo + step, :]) % p
        out = part if out is None else (out + part) % p
    return out


def identity(n: int) -> np.ndarray:
    return np.eye(n, dtype=np.int64)


def _row_reduce(m: np.ndarray, p: int) -> tuple[np.ndarray, int]:
    m = np.array(m, dtype=object) % p
    rows, cols = m.shape
    rank = 0
    for c in range(cols):
        pivot = next((r for r in range(rank, rows) if m[r, c] % p), None)
        if pivot is None:
            continue
        m[[rank, pivot]] = m[[pivot, rank]]
        m[rank] = m[rank] * pow(int(m[rank, c]), p - 2, p) % p
        for r in range(rows):
            if r != rank and m[r, c]:
                m[r] = (m[r] - m[r, c] * m[rank]) % p
        rank += 1
        if rank == rows:
            break
    return m, rank


def rank_mod(m: np.ndarray, p: int) -> int:
    return _row_reduce(np.atleast_2d(m), p)[1]


def inv_mod(m: np.ndarray, p: int) -> np.ndarray:
    m = np.asarray(m)
    n = m.shape[0]
    if m.shape != (n, n):
        raise ValueError(f"inverse of non-square {m.shape} matrix")
    aug, _ = _row_reduce(np.hstack([m, identity(n)]), p)
    if not (aug[:, :n] == np.eye(n, dtype=np.int64)).all():
        raise FieldDivisionByZero("matrix is singular")
    return aug[:, n:].astype(np.int64)
