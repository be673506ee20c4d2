"""Bloch-space view of bases: traceless-Hermitian embedding, basis-plane projectors,
and the chordal distance between basis planes."""

from __future__ import annotations

from functools import lru_cache
from itertools import combinations
from math import isqrt

import numpy as np

from .core import DEFAULT_TOL, Basis, Tolerance


@lru_cache(maxsize=None)
def gell_mann_basis(n: int) -> np.ndarray:
    """Orthonormal traceless-Hermitian coordinate frame with Tr(T_a T_b) = 2 delta_ab.

    Ordered as the symmetric pair family, the antisymmetric pair family, then
    the diagonal family; fixed so Bloch coordinates are reproducible.
    """
    if n < 2:
        raise ValueError("need dimension >= 2")
    mats = []
    for j in range(n):
        for k in range(j + 1, n):
            m = np.zeros((n, n), dtype=complex)
            m[j, k] = m[k, j] = 1.0
            mats.append(m)
    for j in range(n):
        for k in range(j + 1, n):
            m = np.zeros((n, n), dtype=complex)
            m[j, k] = -1j
            m[k, j] = 1j
            mats.append(m)
    for l in range(1, n):
        m = np.zeros((n, n), dtype=complex)
        m[np.arange(l), np.arange(l)] = 1.0
        m[l, l] = -float(l)
        mats.append(m * np.sqrt(2.0 / (l * (l + 1))))
    out = np.stack(mats)
    out.setflags(write=False)
    return out


def bloch_embed(v: np.ndarray) -> np.ndarray:
    """Coordinates of sqrt(2N/(N-1)) (|v><v| - I/N) in the fixed traceless frame.

    The input must be a unit vector; the output is a real unit vector of
    length N^2 - 1 under the half-trace scalar product.
    """
    vec = np.asarray(v, dtype=complex).ravel()
    n = len(vec)
    norm = np.linalg.norm(vec)
    if abs(norm - 1.0) > 1e-9:
        raise ValueError(f"expected a unit vector, got norm {norm:.6f}")
    proj = np.outer(vec, vec.conj())
    e = np.sqrt(2.0 * n / (n - 1)) * (proj - np.eye(n) / n)
    frame = gell_mann_basis(n)
    return 0.5 * np.real(np.einsum("aij,ji->a", frame, e))


def hs_distance_sq(a: np.ndarray, b: np.ndarray) -> float:
    """Squared Hilbert-Schmidt distance (1/2) Tr (A-B)^2 between Hermitian matrices."""
    ma = np.asarray(a, dtype=complex)
    mb = np.asarray(b, dtype=complex)
    if ma.shape != mb.shape:
        raise ValueError(f"shape mismatch: {ma.shape} vs {mb.shape}")
    d = ma - mb
    return float(0.5 * np.sum(np.abs(d) ** 2))


def basis_frame(basis: Basis, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """(N^2-1) x N frame of scaled Bloch columns; it has rank N-1 and columns summing to zero."""
    basis.require_unitary(tol)
    n = basis.dim
    cols = [bloch_embed(basis.matrix[:, j]) for j in range(n)]
    return np.sqrt((n - 1.0) / n) * np.stack(cols, axis=1)


def basis_projector(basis: Basis, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """Rank-(N-1) projector onto the Bloch plane of a basis.

    Accumulated as ((N-1)/N) sum_a e_a e_a^T rather than through the
    explicit frame matrix.
    """
    basis.require_unitary(tol)
    n = basis.dim
    p = np.zeros((n * n - 1, n * n - 1))
    for j in range(n):
        e = bloch_embed(basis.matrix[:, j])
        p += np.outer(e, e)
    return (n - 1.0) / n * p


def projector_dim(projector: np.ndarray) -> int:
    """Recover the Hilbert-space dimension N from an (N^2-1)-dimensional projector."""
    s = projector.shape[0]
    n = isqrt(s + 1)
    if n * n - 1 != s or projector.shape != (s, s):
        raise ValueError(f"not a Bloch-space projector shape: {projector.shape}")
    return n


def chordal_distance_sq(p1: np.ndarray, p2: np.ndarray) -> float:
    """Squared chordal distance N - 1 - Tr(P1 P2) between two basis-plane projectors.

    Lies in [0, N-1], with the maximum reached exactly for unbiased bases.
    """
    n = projector_dim(np.asarray(p1))
    if np.asarray(p2).shape != np.asarray(p1).shape:
        raise ValueError("projector shape mismatch")
    return float(n - 1 - np.sum(p1 * p2))


def chordal_distance_sq_overlap(a: Basis, b: Basis, tol: Tolerance = DEFAULT_TOL) -> float:
    """Overlap form of the squared chordal distance: N-1 - sum_ab (|<a|b>|^2 - 1/N)^2."""
    if a.dim != b.dim:
        raise ValueError(f"dimension mismatch: {a.dim} vs {b.dim}")
    n = a.dim
    s = np.abs(a.matrix.conj().T @ b.matrix) ** 2
    return float(n - 1 - np.sum((s - 1.0 / n) ** 2))


def distance_table(bases: list[Basis], tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """Symmetric table of pairwise squared chordal distances (zero diagonal)."""
    if len(bases) < 2:
        raise ValueError("need at least two bases")
    dims = {b.dim for b in bases}
    if len(dims) != 1:
        raise ValueError(f"bases of mixed dimensions: {sorted(dims)}")
    projs = [basis_projector(b, tol) for b in bases]
    m = len(bases)
    table = np.zeros((m, m))
    for i, j in combinations(range(m), 2):
        table[i, j] = table[j, i] = chordal_distance_sq(projs[i], projs[j])
    return table


def spread_objective(bases: list[Basis], tol: Tolerance = DEFAULT_TOL) -> float:
    """Sum of squared chordal distances over unordered pairs of bases.

    Bounded by C(m,2) * (N-1), attained exactly when all pairs are unbiased.
    """
    table = distance_table(bases, tol)
    return float(np.sum(np.triu(table, 1)))


def spread_upper_bound(n: int, m: int) -> float:
    return m * (m - 1) / 2 * (n - 1)
