"""Empirical and exhaustive estimates of projection success, plus CSV sweeps.

A trial draws ``U`` (b x n) and ``V`` (n x b), forms ``2n + 2`` terms of
``U A^k V`` and succeeds when the block sequence has the same minimal
polynomial as ``A``.

Two success tests are available.  ``"bm"`` runs Berlekamp-Massey on every
entry and takes the lcm.  ``"divisor"`` (the default, vectorized over trials)
uses that the sequence's minimal polynomial always divides ``m = minpoly(A)``,
so it equals ``m`` exactly when ``(m / f)(S) != 0`` for every irreducible
factor ``f`` of ``m``.

Random streams: trial ``i`` belongs to chunk ``i // CHUNK``, and chunk ``c``
draws from ``make_rng(seed, STREAM_TRIALS, c)``.  Results therefore do not
depend on how many worker threads process the chunks.
"""

from __future__ import annotations

import csv
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence, TextIO

import numpy as np

from . import exactprob
from .finitefield import make_rng, matmul_mod
from .jordan import BlackBoxMatrix, ElementaryDivisorSpec, build, project_sequence, spec_minpoly
from .polynomials import LimitExceeded, Poly, minpoly_block_sequence

CHUNK = 4096
STREAM_BUILD = 0
STREAM_TRIALS = 1
DEFAULT_EXHAUSTIVE_LIMIT = 2**26
Z95 = 1.959963984540054

CSV_COLUMNS = ["case", "q", "n", "b", "exact", "estimate", "trials", "successes", "z", "ci_lo", "ci_hi", "seed"]
FIGURE1_COLUMNS = ["q", "n", "b", "pmpmin", "failure"]


def sequence_length(n: int) -> int:
    return 2 * n + 2


@dataclass(frozen=True)
class Target:
    """Minimal polynomial of the source matrix and its cofactors ``m / f``."""

    minpoly: Poly
    cofactors: tuple[Poly, ...]

    @classmethod
    def from_spec(cls, spec: ElementaryDivisorSpec) -> "Target":
        m = spec_minpoly(spec)
        return cls(m, tuple(m // e.poly for e in spec.entries))


def divisor_success(seqs: np.ndarray, target: Target, p: int) -> np.ndarray:
    """Boolean success per trial for sequences of shape ``(trials, len, b, b)``."""
    D = target.minpoly.degree
    ok = np.ones(seqs.shape[0], dtype=bool)
    for h in target.cofactors:
        acc = np.zeros((seqs.shape[0], D) + seqs.shape[2:], dtype=np.int64)
        for j, c in enumerate(h.coeffs):
            if c:
                acc = (acc + c * seqs[:, j:j + D]) % p
        ok &= acc.reshape(seqs.shape[0], -1).any(axis=1)
    return ok


def bm_success(seqs: np.ndarray, target: Target, p: int) -> np.ndarray:
    field_ = target.minpoly.field
    return np.array([minpoly_block_sequence(s, field_) == target.minpoly for s in seqs], dtype=bool)


_SUCCESS = {"divisor": divisor_success, "bm": bm_success}


def _success_fn(method: str):
    try:
        return _SUCCESS[method]
    except KeyError:
        raise ValueError(f"unknown success test {method!r}; choose from {sorted(_SUCCESS)}") from None


def draw_chunk(a, b: int, seed: int, chunk: int, size: int) -> tuple[np.ndarray, np.ndarray]:
    rng = make_rng(seed, STREAM_TRIALS, chunk)
    p = a.field.p
    u = rng.integers(0, p, size=(size, b, a.n), dtype=np.int64)
    v = rng.integers(0, p, size=(size, a.n, b), dtype=np.int64)
    return u, v


def trial_outcomes(a, target: Target, b: int, seed: int, chunk: int, size: int,
                   method: str = "divisor") -> np.ndarray:
    u, v = draw_chunk(a, b, seed, chunk, size)
    seqs = project_sequence(a, u, v, sequence_length(a.n))
    return _success_fn(method)(seqs, target, a.field.p)


def count_successes(a, target: Target, b: int, trials: int, seed: int,
                    threads: int = 1, method: str = "divisor") -> int:
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if b < 1:
        raise ValueError("block size must be >= 1")
    _success_fn(method)
    sizes = [min(CHUNK, trials - lo) for lo in range(0, trials, CHUNK)]

    def run(c):
        return int(trial_outcomes(a, target, b, seed, c, sizes[c], method).sum())

    if threads <= 1:
        return sum(run(c) for c in range(len(sizes)))
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return sum(pool.map(run, range(len(sizes))))


def wilson_interval(successes: int, trials: int, z: float = Z95) -> tuple[float, float]:
    phat = successes / trials
    denom = 1 + z * z / trials
    centre = (phat + z * z / (2 * trials)) / denom
    half = z / denom * math.sqrt(phat * (1 - phat) / trials + z * z / (4 * trials * trials))
    return max(0.0, centre - half), min(1.0, centre + half)


def z_score(successes: int, trials: int, p: Fraction | float) -> float:
    p = float(p)
    sd = math.sqrt(trials * p * (1 - p))
    diff = successes - trials * p
    if sd == 0:
        return 0.0 if diff == 0 else math.copysign(math.inf, diff)
    return diff / sd


@dataclass(frozen=True)
class TrialReport:
    trials: int
    successes: int
    estimate: float
    exact: Fraction | None
    z_score: float | None
    ci95: tuple[float, float]
    seed: int
    elapsed: float = field(compare=False)
    b: int = 0
    n: int = 0
    q: int = 0

    def summary(self) -> str:
        lines = [
            f"q={self.q} n={self.n} b={self.b} seed={self.seed}",
            f"trials     {self.trials}",
            f"successes  {self.successes}",
            f"estimate   {self.estimate:.6f}",
            f"ci95       [{self.ci95[0]:.6f}, {self.ci95[1]:.6f}]",
        ]
        if self.exact is not None:
            lines.append(f"exact      {float(self.exact):.6f}")
            lines.append(f"z          {self.z_score:+.3f}")
        lines.append(f"elapsed    {self.elapsed:.2f}s")
        return "\n".join(lines)


def estimate_matrix(a, target: Target, b: int, trials: int, seed: int, exact: Fraction | None = None,
                    threads: int = 1, method: str = "divisor") -> TrialReport:
    """Monte-Carlo success rate for any black box with known minimal polynomial."""
    start = time.perf_counter()
    succ = count_successes(a, target, b, trials, seed, threads, method)
    return TrialReport(
        trials=trials,
        successes=succ,
        estimate=succ / trials,
        exact=exact,
        z_score=None if exact is None else z_score(succ, trials, exact),
        ci95=wilson_interval(succ, trials),
        seed=seed,
        elapsed=time.perf_counter() - start,
        b=b,
        n=a.n,
        q=a.field.p,
    )


def estimate_pmp(spec: ElementaryDivisorSpec, b: int, trials: int, seed: int,
                 threads: int = 1, method: str = "divisor", with_exact: bool = True) -> TrialReport:
    a = build(spec, make_rng(seed, STREAM_BUILD))
    exact = exactprob.pmp_exact(spec, b) if with_exact else None
    return estimate_matrix(a, Target.from_spec(a.spec), b, trials, seed, exact, threads, method)


# ---------------------------------------------------------------------------
# exhaustive enumeration

def _all_matrices(q: int, rows: int, cols: int, start: int, stop: int) -> np.ndarray:
    """Matrices with lexicographic (row-major, first entry most significant) indices in ``[start, stop)``."""
    k = rows * cols
    idx = np.arange(start, stop, dtype=np.int64)
    weights = q ** np.arange(k - 1, -1, -1, dtype=np.int64)
    return ((idx[:, None] // weights) % q).reshape(-1, rows, cols)


def _cofactor_windows(a, target: Target, v: np.ndarray) -> list[np.ndarray]:
    """``h(A) A^k V`` for ``k < deg m``, one array ``(nv, D, n, b)`` per cofactor ``h``."""
    p = a.field.p
    D = target.minpoly.degree
    top = max(h.degree for h in target.cofactors) + D
    powers = [v]
    for _ in range(top - 1):
        powers.append(a.apply(powers[-1]))
    krylov = np.stack(powers, axis=1)
    out = []
    for h in target.cofactors:
        acc = np.zeros((v.shape[0], D) + v.shape[1:], dtype=np.int64)
        for j, c in enumerate(h.coeffs):
            if c:
                acc = (acc + c * krylov[:, j:j + D]) % p
        out.append(acc)
    return out


def exhaustive_counts(a, target: Target, b: int, v_start: int = 0, v_stop: int | None = None,
                      method: str = "divisor") -> tuple[int, int]:
    """Successes and pairs examined over all ``U`` for ``V`` indices in ``[v_start, v_stop)``.

    Pairs are visited V-major in lexicographic order, so disjoint index ranges
    can be run separately and their counts added.
    """
    q, n = a.field.p, a.n
    nv = q ** (n * b)
    v_stop = nv if v_stop is None else min(v_stop, nv)
    if method == "bm":
        return _exhaustive_bm(a, target, b, v_start, v_stop)
    if method != "divisor":
        raise ValueError(f"unknown success test {method!r}")
    p = q
    rows = _all_matrices(q, 1, n, 0, q**n)[:, 0, :]
    per_v = nv
    step = max(1, 2**22 // per_v)
    successes = 0
    for lo in range(v_start, v_stop, step):
        v = _all_matrices(q, n, b, lo, min(lo + step, v_stop))
        fail = np.zeros((v.shape[0],) + (q**n,) * b, dtype=bool)
        for w in _cofactor_windows(a, target, v):
            # row u kills h(A)A^kV for every k: (nv, D, q^n, b) -> (nv, q^n)
            killed = ~(matmul_mod(rows, w, p).any(axis=(1, 3)))
            all_rows = np.ones_like(fail)
            for r in range(b):
                shape = [v.shape[0]] + [1] * b
                shape[r + 1] = q**n
                all_rows &= killed.reshape(shape)
            fail |= all_rows
        successes += int((~fail).sum())
    return successes, (v_stop - v_start) * nv


def _exhaustive_bm(a, target: Target, b: int, v_start: int, v_stop: int) -> tuple[int, int]:
    q, n = a.field.p, a.n
    nu = q ** (n * b)
    length = sequence_length(n)
    successes = 0
    for vi in range(v_start, v_stop):
        v = _all_matrices(q, n, b, vi, vi + 1)
        us = _all_matrices(q, b, n, 0, nu)
        seqs = project_sequence(a, us, np.broadcast_to(v, (nu, n, b)), length)
        successes += int(bm_success(seqs, target, q).sum())
    return successes, (v_stop - v_start) * nu


def exhaustive_pmp(spec_or_matrix, b: int, limit: int = DEFAULT_EXHAUSTIVE_LIMIT,
                   method: str = "divisor", target: Target | None = None) -> exactprob.ExactProb:
    """Exact success fraction over every ``(U, V)`` pair."""
    if isinstance(spec_or_matrix, ElementaryDivisorSpec):
        a = build(spec_or_matrix)
    else:
        a = spec_or_matrix
    if target is None:
        if not isinstance(a, BlackBoxMatrix) or a.spec is None:
            raise ValueError("a target minimal polynomial is needed for matrices without a spec")
        target = Target.from_spec(a.spec)
    q, n = a.field.p, a.n
    pairs = q ** (2 * n * b)
    if pairs > limit:
        raise LimitExceeded(f"{q}^{2 * n * b} = {pairs} pairs exceeds limit {limit}")
    succ, total = exhaustive_counts(a, target, b, method=method)
    assert total == pairs
    return exactprob.ExactProb(succ, total)


# ---------------------------------------------------------------------------
# sweeps

def sweep(cases: Sequence[tuple[str, ElementaryDivisorSpec]], bs: Iterable[int], trials: int = 0,
          seed: int = 0, threads: int = 1, digits: int = 12) -> list[dict]:
    """One row per ``(case, b)``; ``trials == 0`` gives the exact column only."""
    rows = []
    bs = list(bs)
    for name, spec in cases:
        for b in bs:
            exact = exactprob.pmp_exact(spec, b)
            row = {"case": name, "q": spec.q, "n": spec.n, "b": b, "exact": exactprob.to_decimal(exact, digits),
                   "estimate": "", "trials": trials, "successes": "", "z": "", "ci_lo": "", "ci_hi": "",
                   "seed": seed if trials else ""}
            if trials:
                rep = estimate_pmp(spec, b, trials, seed, threads)
                row.update(estimate=f"{rep.estimate:.6f}", successes=rep.successes, z=f"{rep.z_score:.4f}",
                           ci_lo=f"{rep.ci95[0]:.6f}", ci_hi=f"{rep.ci95[1]:.6f}")
            rows.append(row)
    return rows


def figure1_rows(qs: Iterable[int], n: int, bs: Iterable[int]) -> list[dict]:
    rows = []
    bs = list(bs)
    for q in qs:
        for b in bs:
            res = exactprob.pmpmin_log(q, n, b)
            rows.append({"q": q, "n": n, "b": b,
                         "pmpmin": _fmt_mp(res.pmpmin), "failure": _fmt_mp(res.failure)})
    return rows


def _fmt_mp(x) -> str:
    import mpmath

    return mpmath.nstr(x, 15, min_fixed=-4, max_fixed=4)


def write_csv(rows: Sequence[dict], out: TextIO, columns: Sequence[str] = CSV_COLUMNS) -> None:
    writer = csv.DictWriter(out, fieldnames=list(columns), lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow(row)
