"""Generalized Jordan forms built from elementary divisors.

A matrix is described by an :class:`ElementaryDivisorSpec` (distinct
irreducibles, each with a nonincreasing list of exponents) and realized as a
:class:`BlackBoxMatrix`, a direct sum of Jordan blocks ``J_{f^e}`` applied
structurally.  Layout follows the usual convention: companion blocks carry
``-f_0 .. -f_{d-1}`` in their last column with ones on the subdiagonal, and
``J_{f^e}`` has identity blocks below its diagonal of companion blocks.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field as dc_field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .finitefield import PrimeField, identity, is_prime, matmul_mod
from .polynomials import (
    DEFAULT_ENUMERATION_LIMIT,
    Poly,
    enumerate_irreducibles,
    format_coeffs,
    is_irreducible,
    parse_poly,
    product_of_powers,
    random_irreducible,
)


class InvalidSpec(ValueError):
    pass


class NotMonic(ValueError):
    pass


class InsufficientIrreducibles(ValueError):
    pass


class DimensionMismatch(ValueError):
    pass


# ---------------------------------------------------------------------------
# specs

@dataclass(frozen=True)
class SpecEntry:
    """One primary component: an irreducible (or just its degree) and its exponents."""

    degree: int
    exps: tuple[int, ...]
    poly: Poly | None = None

    @property
    def top(self) -> int:
        return self.exps[0]

    @property
    def multiplicity(self) -> int:
        """Number of exponents equal to the largest one."""
        return sum(1 for e in self.exps if e == self.exps[0])

    @property
    def size(self) -> int:
        return self.degree * sum(self.exps)


@dataclass(frozen=True)
class ElementaryDivisorSpec:
    q: int
    entries: tuple[SpecEntry, ...]

    def __post_init__(self):
        object.__setattr__(self, "entries", tuple(self.entries))
        _validate(self)

    @property
    def n(self) -> int:
        return sum(e.size for e in self.entries)

    @property
    def field(self) -> PrimeField:
        return PrimeField(self.q)

    @property
    def explicit(self) -> bool:
        return all(e.poly is not None for e in self.entries)

    def degree_profile(self) -> list[tuple[int, int]]:
        """``(d_i, s_i)`` per component: all that the exact formula needs."""
        return [(e.degree, e.multiplicity) for e in self.entries]

    def with_exponents(self, index: int, exps: Sequence[int]) -> "ElementaryDivisorSpec":
        entries = list(self.entries)
        entries[index] = SpecEntry(entries[index].degree, tuple(exps), entries[index].poly)
        return ElementaryDivisorSpec(self.q, entries)

    # JSON ---------------------------------------------------------------
    @classmethod
    def from_dict(cls, data: dict) -> "ElementaryDivisorSpec":
        if not isinstance(data, dict) or "q" not in data or "blocks" not in data:
            raise InvalidSpec("spec must be an object with keys 'q' and 'blocks'")
        q = data["q"]
        if not isinstance(q, int) or q < 2:
            raise InvalidSpec(f"q must be an integer >= 2, got {q!r}")
        entries = []
        for i, blk in enumerate(data["blocks"]):
            if "exps" not in blk:
                raise InvalidSpec(f"block {i}: missing 'exps'")
            exps = tuple(blk["exps"])
            if "poly" in blk:
                if not is_prime(q):
                    raise InvalidSpec(f"block {i}: explicit polynomials need a prime q, got {q}")
                try:
                    f = parse_poly(str(blk["poly"]), PrimeField(q))
                except ValueError as exc:
                    raise InvalidSpec(f"block {i}: {exc}") from None
                entries.append(SpecEntry(f.degree, exps, f))
            elif "degree" in blk:
                entries.append(SpecEntry(int(blk["degree"]), exps, None))
            else:
                raise InvalidSpec(f"block {i}: needs 'poly' or 'degree'")
        return cls(q, entries)

    @classmethod
    def from_json(cls, text: str) -> "ElementaryDivisorSpec":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise InvalidSpec(f"spec is not valid JSON: {exc}") from None
        return cls.from_dict(data)

    @classmethod
    def load(cls, path: str | Path) -> "ElementaryDivisorSpec":
        return cls.from_json(Path(path).read_text())

    def to_dict(self) -> dict:
        blocks = []
        for e in self.entries:
            blk = {"poly": format_coeffs(e.poly)} if e.poly is not None else {"degree": e.degree}
            blk["exps"] = list(e.exps)
            blocks.append(blk)
        return {"q": self.q, "blocks": blocks}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def _validate(spec: ElementaryDivisorSpec) -> None:
    if not spec.entries:
        raise InvalidSpec("n >= 1: spec has no blocks")
    seen = set()
    for i, e in enumerate(spec.entries):
        if e.degree < 1:
            raise InvalidSpec(f"block {i}: degree must be >= 1")
        if not e.exps:
            raise InvalidSpec(f"block {i}: exponent list is empty")
        if any((not isinstance(x, (int, np.integer))) or x < 1 for x in e.exps):
            raise InvalidSpec(f"block {i}: exponents must be integers >= 1, got {list(e.exps)}")
        if any(a < b for a, b in zip(e.exps, e.exps[1:])):
            raise InvalidSpec(f"block {i}: exponents must be nonincreasing, got {list(e.exps)}")
        if e.poly is not None:
            f = e.poly
            if f.field.p != spec.q:
                raise InvalidSpec(f"block {i}: polynomial is over GF({f.field.p}), spec has q={spec.q}")
            if f.degree < 1 or not f.is_monic():
                raise InvalidSpec(f"block {i}: {f} must be monic of degree >= 1")
            if not is_irreducible(f):
                raise InvalidSpec(f"block {i}: {f} is not irreducible")
            if f in seen:
                raise InvalidSpec(f"block {i}: irreducibles must be pairwise distinct, {f} repeats")
            seen.add(f)


def spec_of(q: int, *components: tuple) -> ElementaryDivisorSpec:
    """Shorthand: ``spec_of(7, ("6,3,1", [1]), (1, [2, 1]))``; ints are degrees."""
    entries = []
    for what, exps in components:
        if isinstance(what, int):
            entries.append(SpecEntry(what, tuple(exps)))
        else:
            f = what if isinstance(what, Poly) else parse_poly(what, PrimeField(q))
            entries.append(SpecEntry(f.degree, tuple(exps), f))
    return ElementaryDivisorSpec(q, entries)


def resolve(spec: ElementaryDivisorSpec, rng: np.random.Generator | None = None,
            limit: int = DEFAULT_ENUMERATION_LIMIT) -> ElementaryDivisorSpec:
    """Fill degree-only entries with distinct irreducibles not used elsewhere."""
    if spec.explicit:
        return spec
    from .exactprob import count_irreducibles

    field = spec.field
    used = {e.poly for e in spec.entries if e.poly is not None}
    wanted: dict[int, int] = {}
    for e in spec.entries:
        wanted[e.degree] = wanted.get(e.degree, 0) + 1
    for d, k in wanted.items():
        if k > count_irreducibles(spec.q, d):
            raise InsufficientIrreducibles(
                f"spec needs {k} distinct irreducibles of degree {d} over GF({spec.q}), "
                f"only {count_irreducibles(spec.q, d)} exist")

    pools: dict[int, list[Poly]] = {}
    entries = []
    for e in spec.entries:
        if e.poly is not None:
            entries.append(e)
            continue
        d = e.degree
        if rng is None:
            # deterministic: the first unused irreducible in enumeration order
            if d not in pools:
                pools[d] = enumerate_irreducibles(field, d, limit)
            f = next(g for g in pools[d] if g not in used)
        elif field.p**d <= limit:
            if d not in pools:
                pool = enumerate_irreducibles(field, d, limit)
                pools[d] = [pool[i] for i in rng.permutation(len(pool))]
            f = next(g for g in pools[d] if g not in used)
        else:
            f = random_irreducible(rng, field, d)
            while f in used:
                f = random_irreducible(rng, field, d)
        used.add(f)
        entries.append(SpecEntry(d, e.exps, f))
    return ElementaryDivisorSpec(spec.q, entries)


def spec_minpoly(spec: ElementaryDivisorSpec) -> Poly:
    """Product of ``f_i ** e_{i,1}`` over the components."""
    if not spec.explicit:
        raise InvalidSpec("minimal polynomial needs explicit irreducibles; resolve the spec first")
    return product_of_powers((e.poly, e.top) for e in spec.entries)


# ---------------------------------------------------------------------------
# black boxes

@dataclass(frozen=True)
class JordanBlock:
    f: Poly
    e: int

    @property
    def size(self) -> int:
        return self.f.degree * self.e


@dataclass(frozen=True)
class BlackBoxMatrix:
    """Direct sum of Jordan blocks, applied without forming the dense matrix."""

    field: PrimeField
    blocks: tuple[JordanBlock, ...]
    spec: ElementaryDivisorSpec | None = dc_field(default=None, compare=False)

    @property
    def n(self) -> int:
        return sum(b.size for b in self.blocks)

    def apply(self, x: np.ndarray) -> np.ndarray:
        """``A @ x mod p`` for ``x`` of shape ``(..., n, k)``."""
        x = np.asarray(x, dtype=np.int64)
        if x.shape[-2] != self.n:
            raise DimensionMismatch(f"operand has {x.shape[-2]} rows, matrix is {self.n}x{self.n}")
        p = self.field.p
        y = np.empty_like(x)
        off = 0
        for blk in self.blocks:
            d = blk.f.degree
            neg_f = np.array([(-c) % p for c in blk.f.coeffs[:d]], dtype=np.int64)[:, None]
            for j in range(blk.e):
                lo = off + j * d
                xs = x[..., lo:lo + d, :]
                ys = y[..., lo:lo + d, :]
                ys[..., 0, :] = 0
                ys[..., 1:, :] = xs[..., :-1, :]
                ys += neg_f * xs[..., d - 1:d, :]
                if j:
                    ys += x[..., lo - d:lo, :]
                ys %= p
            off += blk.size
        return y

    def to_dense(self) -> np.ndarray:
        return self.apply(identity(self.n))


@dataclass(frozen=True)
class DenseBlackBox:
    """Dense matrix with the black-box interface (tests and conjugation checks)."""

    field: PrimeField
    matrix: np.ndarray

    @property
    def n(self) -> int:
        return self.matrix.shape[0]

    def apply(self, x: np.ndarray) -> np.ndarray:
        if np.shape(x)[-2] != self.n:
            raise DimensionMismatch(f"operand has {np.shape(x)[-2]} rows, matrix is {self.n}x{self.n}")
        return matmul_mod(self.matrix, x, self.field.p)

    def to_dense(self) -> np.ndarray:
        return np.array(self.matrix, dtype=np.int64)


def _require_monic(f: Poly) -> None:
    if f.degree < 1:
        raise NotMonic(f"companion matrix needs degree >= 1, got {f}")
    if not f.is_monic():
        raise NotMonic(f"{f} is not monic")


def companion(f: Poly) -> BlackBoxMatrix:
    _require_monic(f)
    return BlackBoxMatrix(f.field, (JordanBlock(f, 1),))


def jordan_block(f: Poly, e: int) -> BlackBoxMatrix:
    _require_monic(f)
    if e < 1:
        raise ValueError(f"exponent must be >= 1, got {e}")
    return BlackBoxMatrix(f.field, (JordanBlock(f, e),))


def direct_sum(parts: Iterable[BlackBoxMatrix]) -> BlackBoxMatrix:
    parts = list(parts)
    return BlackBoxMatrix(parts[0].field, tuple(b for m in parts for b in m.blocks))


def build(spec: ElementaryDivisorSpec, rng: np.random.Generator | None = None) -> BlackBoxMatrix:
    """Jordan form for ``spec``; degree-only entries get distinct irreducibles."""
    spec = resolve(spec, rng)
    blocks = tuple(JordanBlock(e.poly, x) for e in spec.entries for x in e.exps)
    return BlackBoxMatrix(spec.field, blocks, spec)


def project_sequence(a, u: np.ndarray, v: np.ndarray, length: int) -> np.ndarray:
    """Terms ``U A^k V`` for ``k < length``; shape ``(..., length, b_u, b_v)``.

    Leading axes of ``u`` and ``v`` are batch axes (one projection per trial).
    """
    u = np.asarray(u, dtype=np.int64)
    v = np.asarray(v, dtype=np.int64)
    if length < 1:
        raise ValueError("sequence length must be >= 1")
    if u.shape[-1] != a.n or v.shape[-2] != a.n:
        raise DimensionMismatch(f"U is {u.shape[-2:]}, V is {v.shape[-2:]}, A is {a.n}x{a.n}")
    p = a.field.p
    terms = []
    x = v
    for k in range(length):
        terms.append(matmul_mod(u, x, p))
        if k + 1 < length:
            x = a.apply(x)
    return np.stack(terms, axis=-3)


# ---------------------------------------------------------------------------
# dense structural helpers

def companion_dense(f: Poly) -> np.ndarray:
    return companion(f).to_dense()


def poly_at_matrix(f: Poly, m: np.ndarray) -> np.ndarray:
    """``f(M)`` by Horner's rule."""
    p = f.field.p
    n = m.shape[0]
    acc = np.zeros((n, n), dtype=np.int64)
    for c in reversed(f.coeffs):
        acc = (matmul_mod(acc, m, p) + c * identity(n)) % p
    return acc


def hankel(values: Sequence[int], size: int) -> np.ndarray:
    """``size x size`` matrix with entry ``(i, j) = values[i + j]``."""
    return np.array([[values[i + j] for j in range(size)] for i in range(size)], dtype=np.int64)


def hankel_transform(f: Poly) -> np.ndarray:
    """Symmetric ``P`` with ``C_f P = P C_f^T``: ``(-f_0)`` direct-summed with the
    Hankel matrix on ``(f_2, ..., f_{d-1}, 1, 0, ..., 0)``."""
    _require_monic(f)
    p = f.field.p
    d = f.degree
    P = np.zeros((d, d), dtype=np.int64)
    P[0, 0] = (-f[0]) % p
    if d == 1 and P[0, 0] == 0:
        # f = x: C_f = (0) and any nonzero scalar works
        P[0, 0] = 1
    if d > 1:
        vals = [f[k] for k in range(2, d)] + [1] + [0] * (d - 2)
        P[1:, 1:] = hankel(vals, d - 1)
    return P


def krylov_matrix(c: np.ndarray, v: Sequence[int], p: int) -> np.ndarray:
    """Columns ``v, C v, ..., C^{d-1} v``."""
    col = np.asarray(v, dtype=np.int64).reshape(-1, 1) % p
    cols = []
    for _ in range(c.shape[0]):
        cols.append(col)
        col = matmul_mod(c, col, p)
    return np.hstack(cols)


def regular_representation(v: Sequence[int], f: Poly) -> np.ndarray:
    """Matrix of multiplication by ``v(x)`` in ``GF(p)[x]/(f)``: ``sum_j v_j C_f^j``."""
    d = f.degree
    if len(v) != d:
        raise DimensionMismatch(f"vector has length {len(v)}, polynomial has degree {d}")
    p = f.field.p
    c = companion_dense(f)
    acc = np.zeros((d, d), dtype=np.int64)
    power = identity(d)
    for vj in v:
        acc = (acc + int(vj) * power) % p
        power = matmul_mod(power, c, p)
    return acc


# ---------------------------------------------------------------------------
# enumeration of structures

def partitions(k: int, largest: int | None = None):
    """Partitions of ``k`` as nonincreasing tuples."""
    largest = k if largest is None else largest
    if k == 0:
        yield ()
        return
    for first in range(min(k, largest), 0, -1):
        for rest in partitions(k - first, first):
            yield (first,) + rest


def similarity_classes(q: int, n: int) -> list[ElementaryDivisorSpec]:
    """Every ``n x n`` similarity class over GF(q), one explicit spec each."""
    field = PrimeField(q)
    irreducibles = [f for d in range(1, n + 1) for f in enumerate_irreducibles(field, d)]
    out = []

    def rec(i, left, chosen):
        if left == 0:
            out.append(ElementaryDivisorSpec(q, [SpecEntry(f.degree, lam, f) for f, lam in chosen]))
            return
        if i == len(irreducibles):
            return
        f = irreducibles[i]
        rec(i + 1, left, chosen)
        for k in range(1, left // f.degree + 1):
            for lam in partitions(k):
                rec(i + 1, left - k * f.degree, chosen + [(f, lam)])

    rec(0, n, [])
    return out


def structure_types(q: int, n: int) -> list[ElementaryDivisorSpec]:
    """Degree-only specs, one per way of choosing component degrees and
    exponent partitions (irreducibles up to relabelling)."""
    from .exactprob import count_irreducibles

    out = []
    comps = [(d, lam) for d in range(1, n + 1) for k in range(1, n // d + 1) for lam in partitions(k)]

    def rec(i, left, chosen, per_degree):
        if left == 0:
            out.append(ElementaryDivisorSpec(q, [SpecEntry(d, lam) for d, lam in chosen]))
            return
        for j in range(i, len(comps)):
            d, lam = comps[j]
            size = d * sum(lam)
            if size > left or per_degree.get(d, 0) >= count_irreducibles(q, d):
                continue
            per_degree[d] = per_degree.get(d, 0) + 1
            rec(j, left - size, chosen + [(d, lam)], per_degree)
            per_degree[d] -= 1

    rec(0, n, [], {})
    return out
