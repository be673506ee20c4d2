"""Exhaustive exact searches over matrices with root-of-unity entries.

All predicates used for pruning are exact: a candidate column is a vector of
k-th roots of unity, and orthogonality/unbiasedness between two dephased
columns depends only on their exponent difference.  The k^(n-1) possible
difference vectors are classified once (sum vanishes / squared modulus of
the sum equals n, decided in Z[zeta]), after which the backtracking works
on integer indices and boolean tables.
"""

from __future__ import annotations

import json
import os
import tempfile
from dataclasses import dataclass, field
from functools import lru_cache
from math import lcm

import numpy as np

from .core import DEFAULT_TOL, Tolerance, haagerup_invariants
from .cyclotomic import RootVector, reduction_matrix

MAX_CANDIDATES = 10**8
_CHUNK = 1 << 19
_DENSE_ADJ_LIMIT = 8000


class EnumerationBudgetError(RuntimeError):
    """The requested root order / dimension combination is not enumerable."""


@dataclass(frozen=True)
class SearchSpec:
    """Parameters identifying one search run (used for checkpoint compatibility)."""

    n: int
    k: int
    depth: str  # hadamards | triplets | quartets
    budget: int | None = None
    resume_token: str | None = None

    def key(self) -> dict:
        return {"n": self.n, "k": self.k, "depth": self.depth}


@dataclass
class SearchOutcome:
    """Results of a search stage plus completeness bookkeeping."""

    spec: SearchSpec
    results: list
    complete: bool
    nodes_used: int
    resume_token: str | None = None

    @property
    def verdict(self) -> str:
        if not self.complete:
            return "inconclusive"
        return "empty" if not self.results else "non-empty"


class _NodeBudget:
    """Shared node counter; charge() returns False once the budget is spent."""

    def __init__(self, limit: int | None):
        self.limit = limit
        self.used = 0

    def charge(self, amount: int = 1) -> bool:
        self.used += amount
        return self.limit is None or self.used <= self.limit


def _digit_matrix(n: int, k: int, lo: int, hi: int) -> np.ndarray:
    """Exponent digits (little-endian base k) for candidate indices lo..hi-1."""
    idx = np.arange(lo, hi, dtype=np.int64)
    out = np.empty((hi - lo, n - 1), dtype=np.int16)
    for j in range(n - 1):
        out[:, j] = (idx // k**j) % k
    return out


def _row_histogram(values: np.ndarray, k: int) -> np.ndarray:
    """Per-row histogram over 0..k-1 of an integer matrix (rows x cols)."""
    rows, cols = values.shape
    offsets = values + k * np.arange(rows, dtype=np.int64)[:, None]
    return np.bincount(offsets.ravel(), minlength=rows * k).reshape(rows, k)


@lru_cache(maxsize=8)
def _unit_roots(k: int) -> np.ndarray:
    roots = np.exp(2j * np.pi * np.arange(k) / k)
    roots.setflags(write=False)
    return roots


# A floating sum of n unit roots is accurate to ~1e-14, so a 1e-6 margin can
# only ever discard candidates whose exact value provably misses the target;
# every near-hit is then decided exactly.
_PRESCREEN_MARGIN = 1e-6


def _candidate_count(n: int, k: int) -> int:
    m = k ** (n - 1)
    if m > MAX_CANDIDATES:
        raise EnumerationBudgetError(
            f"k^(n-1) = {m} exceeds the enumeration guard ({MAX_CANDIDATES}); "
            "use the numerical multistart census instead"
        )
    return m


@lru_cache(maxsize=3)
def _difference_tables(n: int, k: int) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """(exponents, powers, orth_diff, unb_diff) for all k^(n-1) dephased difference vectors.

    orth_diff[i]: 1 + sum_a zeta^{d_a} = 0 exactly.
    unb_diff[i]:  |1 + sum_a zeta^{d_a}|^2 = n exactly.
    """
    m_total = _candidate_count(n, k)
    red = reduction_matrix(k)
    roots = _unit_roots(k)
    exps = np.empty((m_total, n - 1), dtype=np.int16)
    orth = np.zeros(m_total, dtype=bool)
    unb = np.zeros(m_total, dtype=bool)
    for lo in range(0, m_total, _CHUNK):
        hi = min(lo + _CHUNK, m_total)
        digits = _digit_matrix(n, k, lo, hi)
        exps[lo:hi] = digits
        sums = 1.0 + roots[digits].sum(axis=1)
        near_orth = np.abs(sums) < _PRESCREEN_MARGIN
        near_unb = np.abs(np.abs(sums) ** 2 - n) < _PRESCREEN_MARGIN
        near = near_orth | near_unb
        if not near.any():
            continue
        hist = _row_histogram(digits[near].astype(np.int64), k)
        hist[:, 0] += 1  # the fixed leading zero exponent
        exact_orth = np.all(hist @ red.T == 0, axis=1)
        corr = np.stack([np.sum(hist * np.roll(hist, -s, axis=1), axis=1) for s in range(k)], axis=1)
        corr[:, 0] -= n
        exact_unb = np.all(corr @ red.T == 0, axis=1)
        where = np.nonzero(near)[0] + lo
        orth[where] = exact_orth & near_orth[near]
        unb[where] = exact_unb & near_unb[near]
    powers = (k ** np.arange(n - 1)).astype(np.int64)
    for arr in (exps, orth, unb):
        arr.setflags(write=False)
    powers.setflags(write=False)
    return exps, powers, orth, unb


def _diff_indices(exps: np.ndarray, base: np.ndarray, k: int, powers: np.ndarray) -> np.ndarray:
    """Indices of (exps - base) mod k in the difference tables."""
    return ((exps.astype(np.int64) - base.astype(np.int64)) % k) @ powers


def unbiased_vector_enumerate(n: int, k: int) -> list[RootVector]:
    """All dephased k-th-root vectors of length n exactly unbiased to every Fourier column.

    Exactness means |sum_a x_a q^{ab}|^2 = n in cyclotomic arithmetic for
    every b, with x_a = zeta_k^{e_a} and e_0 = 0.  These are precisely the
    root-restricted biunimodular candidates.
    """
    m_total = _candidate_count(n, k)
    kk = lcm(k, n)
    red = reduction_matrix(kk)
    lift_e = kk // k
    lift_f = kk // n
    alive = np.empty(0, dtype=np.int64)
    # Pass b = 0 runs chunked over everything; later passes touch survivors only.
    survivors = []
    for lo in range(0, m_total, _CHUNK):
        hi = min(lo + _CHUNK, m_total)
        digits = _digit_matrix(n, k, lo, hi).astype(np.int64)
        mask = _fourier_unbiased_mask(digits, n, kk, red, lift_e, lift_f, b=0)
        survivors.append(np.arange(lo, hi, dtype=np.int64)[mask])
    alive = np.concatenate(survivors)
    for b in range(1, n):
        if len(alive) == 0:
            break
        digits = np.empty((len(alive), n - 1), dtype=np.int64)
        for j in range(n - 1):
            digits[:, j] = (alive // k**j) % k
        mask = _fourier_unbiased_mask(digits, n, kk, red, lift_e, lift_f, b)
        alive = alive[mask]
    out = []
    for idx in alive:
        e = tuple(int((idx // k**j) % k) for j in range(n - 1))
        out.append(RootVector(k, (0,) + e))
    return out


def _fourier_unbiased_mask(digits, n, kk, red, lift_e, lift_f, b):
    phases = (digits * lift_e + (b * lift_f * np.arange(1, n))[None, :]) % kk
    sums = 1.0 + _unit_roots(kk)[phases].sum(axis=1)
    near = np.abs(np.abs(sums) ** 2 - n) < _PRESCREEN_MARGIN
    out = np.zeros(len(digits), dtype=bool)
    if not near.any():
        return out
    hist = _row_histogram(phases[near], kk)
    hist[:, 0] += 1  # a = 0 term contributes zeta^0 for every b
    corr = np.stack([np.sum(hist * np.roll(hist, -s, axis=1), axis=1) for s in range(kk)], axis=1)
    corr[:, 0] -= n
    out[near] = np.all(corr @ red.T == 0, axis=1)
    return out


def _hadamard_matrix_from_columns(n: int, exps: np.ndarray, columns: list) -> np.ndarray:
    """Exponent matrix (rows x cols); column 0 is the implicit all-ones column."""
    mat = np.zeros((n, n), dtype=np.int16)
    for pos, cand in enumerate(columns, start=1):
        mat[1:, pos] = exps[cand]
    return mat


@dataclass
class HadamardEnumeration:
    """All dephased Hadamards for one (n, k), bucketed by their invariant multisets."""

    spec: SearchSpec
    matrices: list[np.ndarray]  # n x n exponent matrices
    buckets: list[list[int]]  # matrix indices grouped by equal Haagerup multiset
    complete: bool
    nodes_used: int
    resume_token: str | None = None


def _write_checkpoint(path: str, spec: SearchSpec, completed_units: list[int], counts: dict) -> None:
    payload = {"spec": spec.key(), "completed_units": sorted(completed_units), "partial_counts": counts}
    directory = os.path.dirname(os.path.abspath(path)) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    with os.fdopen(fd, "w") as handle:
        json.dump(payload, handle, sort_keys=True)
    os.replace(tmp, path)


def _read_checkpoint(path: str, spec: SearchSpec) -> set[int]:
    with open(path) as handle:
        payload = json.load(handle)
    if payload.get("spec") != spec.key():
        raise ValueError(f"checkpoint {path} belongs to a different search: {payload.get('spec')}")
    return set(int(u) for u in payload.get("completed_units", []))


class _OrthAdjacency:
    """Orthogonality rows over the candidate set S, dense below a size cutoff."""

    def __init__(self, s_exps: np.ndarray, k: int, powers: np.ndarray, orth_diff: np.ndarray):
        self.s_exps = s_exps
        self.k = k
        self.powers = powers
        self.orth_diff = orth_diff
        self.n_s = len(s_exps)
        self.dense = None
        self._cache: dict[int, np.ndarray] = {}
        if self.n_s <= _DENSE_ADJ_LIMIT:
            rows = [self._compute_row(i) for i in range(self.n_s)]
            self.dense = np.stack(rows) if rows else np.zeros((0, 0), dtype=bool)

    def _compute_row(self, i: int) -> np.ndarray:
        row = self.orth_diff[_diff_indices(self.s_exps, self.s_exps[i], self.k, self.powers)]
        row[i] = False
        return row

    def row(self, i: int) -> np.ndarray:
        if self.dense is not None:
            return self.dense[i]
        if i not in self._cache:
            self._cache[i] = self._compute_row(i)
        return self._cache[i]


def root_hadamard_enumerate(
    n: int,
    k: int,
    budget: int | None = None,
    checkpoint_path: str | None = None,
    resume_token: str | None = None,
    tol: Tolerance = DEFAULT_TOL,
) -> HadamardEnumeration:
    """Column-by-column backtracking over dephased k-th-root Hadamards of size n.

    The first column is all-ones; remaining columns are drawn, in strictly
    increasing candidate order, from the dephased vectors exactly orthogonal
    to everything already chosen.  Column order is a symmetry of the
    enumeration, so each column set appears exactly once.

    Work is split into units by the first chosen column; a resumed run
    (resume_token) skips completed units and returns results for the newly
    completed units only.
    """
    spec = SearchSpec(n=n, k=k, depth="hadamards", budget=budget, resume_token=resume_token)
    exps, powers, orth_diff, _ = _difference_tables(n, k)
    s_idx = np.nonzero(orth_diff)[0]
    s_exps = exps[s_idx]
    adj = _OrthAdjacency(s_exps, k, powers, orth_diff)
    budget_box = _NodeBudget(budget)

    done_units = _read_checkpoint(resume_token, spec) if resume_token else set()
    completed = sorted(done_units)
    matrices: list[np.ndarray] = []
    complete = True

    for first in range(adj.n_s):
        if first in done_units:
            continue
        if not budget_box.charge():
            complete = False
            break
        found_here: list[list[int]] = []
        aborted = False

        def extend(chosen: list[int], mask: np.ndarray) -> bool:
            nonlocal aborted
            if len(chosen) == n - 1:
                found_here.append(list(chosen))
                return True
            for nxt in np.nonzero(mask)[0]:
                if nxt <= chosen[-1]:
                    continue
                if not budget_box.charge():
                    aborted = True
                    return False
                if not extend(chosen + [int(nxt)], mask & adj.row(int(nxt))):
                    return False
            return True

        extend([first], adj.row(first))
        if aborted:
            complete = False
            break
        for chosen in found_here:
            matrices.append(_hadamard_matrix_from_columns(n, s_exps, chosen))
        completed.append(first)

    token = None
    if not complete:
        token = checkpoint_path or (f"hadamards-n{n}-k{k}.checkpoint.json")
        _write_checkpoint(token, spec, completed, {"matrices": len(matrices)})

    buckets = _haagerup_buckets(matrices, n, k, tol)
    return HadamardEnumeration(
        spec=spec,
        matrices=matrices,
        buckets=buckets,
        complete=complete,
        nodes_used=budget_box.used,
        resume_token=token,
    )


def exponents_to_complex(exponent_matrix: np.ndarray, k: int) -> np.ndarray:
    """Normalized complex matrix for an exponent matrix over k-th roots."""
    exps = np.asarray(exponent_matrix)
    n = exps.shape[0]
    return np.exp(2j * np.pi * exps / k) / np.sqrt(n)


def _haagerup_buckets(matrices: list[np.ndarray], n: int, k: int, tol: Tolerance) -> list[list[int]]:
    buckets: dict = {}
    order: list = []
    for i, exps in enumerate(matrices):
        inv = haagerup_invariants(exponents_to_complex(exps, k), tol)
        key = tuple(sorted(((v.real, v.imag), c) for v, c in inv.items()))
        if key not in buckets:
            buckets[key] = []
            order.append(key)
        buckets[key].append(i)
    return [buckets[key] for key in order]


@dataclass
class _TripletContext:
    """Shared exact tables for the triplet/quartet stages."""

    n: int
    k: int
    exps: np.ndarray
    powers: np.ndarray
    orth_diff: np.ndarray
    unb_diff: np.ndarray
    base_mask: np.ndarray  # candidates unbiased to the all-ones column
    row_cache: dict = field(default_factory=dict)

    def unbiased_row(self, cand: int) -> np.ndarray:
        """Packed bits over all candidates: unbiased to candidate column `cand`."""
        if cand not in self.row_cache:
            idx = _diff_indices(self.exps, self.exps[cand], self.k, self.powers)
            self.row_cache[cand] = np.packbits(self.unb_diff[idx])
        return self.row_cache[cand]

    def candidates_for(self, matrix: np.ndarray) -> np.ndarray:
        """Global candidate indices unbiased to every column of a dephased matrix."""
        packed = np.packbits(self.base_mask)
        for col in range(1, self.n):
            cand = int(matrix[1:, col].astype(np.int64) @ self.powers)
            packed = packed & self.unbiased_row(cand)
        mask = np.unpackbits(packed, count=len(self.base_mask)).astype(bool)
        return np.nonzero(mask)[0]

    def mutually_orthogonal_bases(self, cand: np.ndarray) -> list[list[int]]:
        """All n-subsets of `cand` that are pairwise exactly orthogonal."""
        nc = len(cand)
        if nc < self.n:
            return []
        sub = self.exps[cand].astype(np.int64)
        adj = np.zeros((nc, nc), dtype=bool)
        for a in range(nc):
            adj[a] = self.orth_diff[((sub - sub[a]) % self.k) @ self.powers]
            adj[a, a] = False
        out: list[list[int]] = []

        def extend(chosen: list[int], mask: np.ndarray) -> None:
            if len(chosen) == self.n:
                out.append([int(cand[c]) for c in chosen])
                return
            for nxt in np.nonzero(mask)[0]:
                if nxt > chosen[-1]:
                    extend(chosen + [int(nxt)], mask & adj[nxt])

        for a in range(nc):
            extend([a], adj[a])
        return out

    def matrix_from_candidates(self, members: list[int]) -> np.ndarray:
        mat = np.zeros((self.n, self.n), dtype=np.int16)
        for pos, cand in enumerate(sorted(members)):
            mat[1:, pos] = self.exps[cand]
        return mat


def _make_context(n: int, k: int) -> _TripletContext:
    exps, powers, orth_diff, unb_diff = _difference_tables(n, k)
    base_idx = _diff_indices(exps, np.zeros(n - 1, dtype=np.int16), k, powers)
    return _TripletContext(
        n=n, k=k, exps=exps, powers=powers, orth_diff=orth_diff, unb_diff=unb_diff,
        base_mask=unb_diff[base_idx],
    )


def mub_triplet_search(
    n: int,
    k: int,
    budget: int | None = None,
    checkpoint_path: str | None = None,
    resume_token: str | None = None,
    hadamards: HadamardEnumeration | None = None,
) -> SearchOutcome:
    """All pairs (H1, H2) of k-th-root matrices with {identity, H1, H2} pairwise MUB.

    H1 runs over the dephased Hadamard enumeration; H2 over column-dephased
    matrices whose columns are exactly unbiased to every column of H1 and
    exactly orthogonal to one another.  Every k-th-root triplet containing
    the standard basis is equivalent to one of this shape.
    """
    spec = SearchSpec(n=n, k=k, depth="triplets", budget=budget, resume_token=resume_token)
    if hadamards is None:
        hadamards = root_hadamard_enumerate(n, k, budget=None)
    ctx = _make_context(n, k)
    budget_box = _NodeBudget(budget)
    budget_box.used += hadamards.nodes_used

    done_units = _read_checkpoint(resume_token, spec) if resume_token else set()
    completed = sorted(done_units)
    results: list[tuple[np.ndarray, np.ndarray]] = []
    complete = hadamards.complete

    for hi, h1 in enumerate(hadamards.matrices):
        if hi in done_units:
            continue
        if not budget_box.charge(ctx.n):
            complete = False
            break
        cand = ctx.candidates_for(h1)
        for members in ctx.mutually_orthogonal_bases(cand):
            results.append((h1, ctx.matrix_from_candidates(members)))
        completed.append(hi)

    token = None
    if not complete:
        token = checkpoint_path or f"triplets-n{n}-k{k}.checkpoint.json"
        _write_checkpoint(token, spec, completed, {"triplets": len(results)})
    return SearchOutcome(spec=spec, results=results, complete=complete,
                         nodes_used=budget_box.used, resume_token=token)


def mub_quartet_search(
    n: int,
    k: int,
    budget: int | None = None,
    checkpoint_path: str | None = None,
    resume_token: str | None = None,
    triplets: SearchOutcome | None = None,
) -> SearchOutcome:
    """Extend every MUB triplet by a further k-th-root Hadamard unbiased to both.

    The third matrix's columns must be unbiased to every column of H1 and H2,
    so they are filtered from the H1 candidate set; completeness follows from
    the triplet search's.  An exhausted budget yields verdict 'inconclusive',
    never 'empty'.
    """
    spec = SearchSpec(n=n, k=k, depth="quartets", budget=budget, resume_token=resume_token)
    if triplets is None:
        triplets = mub_triplet_search(n, k, budget=None)
    ctx = _make_context(n, k)
    budget_box = _NodeBudget(budget)
    budget_box.used += triplets.nodes_used

    done_units = _read_checkpoint(resume_token, spec) if resume_token else set()
    completed = sorted(done_units)
    results: list[tuple[np.ndarray, np.ndarray, np.ndarray]] = []
    complete = triplets.complete

    cand_cache: dict[bytes, np.ndarray] = {}
    for ti, (h1, h2) in enumerate(triplets.results):
        if ti in done_units:
            continue
        if not budget_box.charge(ctx.n):
            complete = False
            break
        key = h1.tobytes()
        if key not in cand_cache:
            cand_cache[key] = ctx.candidates_for(h1)
        cand = cand_cache[key]
        keep = np.ones(len(cand), dtype=bool)
        sub = ctx.exps[cand].astype(np.int64)
        for col in range(n):
            keep &= ctx.unb_diff[((sub - h2[1:, col].astype(np.int64)) % k) @ ctx.powers]
        for members in ctx.mutually_orthogonal_bases(cand[keep]):
            results.append((h1, h2, ctx.matrix_from_candidates(members)))
        completed.append(ti)

    token = None
    if not complete:
        token = checkpoint_path or f"quartets-n{n}-k{k}.checkpoint.json"
        _write_checkpoint(token, spec, completed, {"quartets": len(results)})
    return SearchOutcome(spec=spec, results=results, complete=complete,
                         nodes_used=budget_box.used, resume_token=token)
