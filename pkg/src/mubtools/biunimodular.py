"""Biunimodular sequences and the six-dimensional census: multistart Newton solving,
exact root-restricted enumeration, basis assembly, and the distance-pattern report."""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np
from scipy.stats import qmc

from . import search as search_mod
from .core import DEFAULT_TOL, Basis, Tolerance
from .constructions import fourier
from .grassmann import distance_table

GAUSSIAN = "gaussian"
BJORCK = "bjorck"

NEWTON_RESIDUAL_TOL = 1e-12
NEWTON_MAX_ITERATIONS = 200


def dft(x: np.ndarray) -> np.ndarray:
    """Unitary discrete Fourier transform with positive exponent: (1/sqrt N) sum_b x_b q^{ba}."""
    v = np.asarray(x, dtype=complex)
    return np.fft.ifft(v) * np.sqrt(len(v))


def is_biunimodular(x: np.ndarray, tol: Tolerance = DEFAULT_TOL) -> tuple[bool, float]:
    """Whether x and its transform are both unimodular; returns the max modulus deviation."""
    v = np.asarray(x, dtype=complex)
    dev = max(
        float(np.abs(np.abs(v) - 1.0).max()),
        float(np.abs(np.abs(dft(v)) - 1.0).max()),
    )
    return dev <= tol.eq_tol, dev


def autocorrelation(x: np.ndarray) -> np.ndarray:
    """Cyclic autocorrelation (1/N) sum_a conj(x_a) x_{a+b}; a delta spike iff x is biunimodular."""
    v = np.asarray(x, dtype=complex)
    n = len(v)
    return np.array([np.vdot(v, np.roll(v, -b)) for b in range(n)]) / n


def classify_sequence(entries: np.ndarray, tol: float = 1e-8) -> str:
    """gaussian when every entry is a 2N-th root of unity, bjorck otherwise."""
    v = np.asarray(entries, dtype=complex)
    roots = np.exp(2j * np.pi * np.arange(2 * len(v)) / (2 * len(v)))
    dist = np.abs(v[:, None] - roots[None, :]).min(axis=1).max()
    return GAUSSIAN if dist < tol else BJORCK


def entry_structure(entries: np.ndarray, tol: float = 1e-8) -> list[str]:
    """Tag each entry as a 12th-root multiple of a power of d (or as 'other').

    Diagnostic only; the tags are recorded in census metadata, not asserted.
    """
    from .catalog import bjorck_d

    roots12 = np.exp(2j * np.pi * np.arange(12) / 12)
    d = bjorck_d()
    tags = []
    for z in np.asarray(entries, dtype=complex):
        for power, tag in ((0, "root12"), (1, "d-times-root12"), (-1, "d-times-root12"),
                           (2, "d2-times-root12"), (-2, "d2-times-root12")):
            if np.abs(z / d**power - roots12).min() < tol:
                tags.append(tag)
                break
        else:
            tags.append("other")
    return tags


@dataclass(frozen=True)
class BiuniSequence:
    """A biunimodular sequence normalized to x_0 = 1."""

    entries: tuple[complex, ...]
    kind: str  # gaussian | bjorck

    @property
    def n(self) -> int:
        return len(self.entries)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.entries, dtype=complex)

    def phases(self) -> np.ndarray:
        return np.angle(self.as_array()[1:]) % (2 * np.pi)


@dataclass(frozen=True)
class CensusResult:
    """Deduplicated census of biunimodular sequences plus any assembled bases."""

    n: int
    sequences: tuple[BiuniSequence, ...]
    bases: tuple[Basis, ...]
    metadata: dict

    @property
    def count(self) -> int:
        return len(self.sequences)

    def count_by_kind(self) -> dict[str, int]:
        out: dict[str, int] = {}
        for s in self.sequences:
            out[s.kind] = out.get(s.kind, 0) + 1
        return out

    def quotient_counts(self, tol: float = 1e-6) -> dict[str, int]:
        """Sequence counts when cyclic shifts and/or conjugates are identified.

        The headline count fixes x_0 = 1 and nothing else; these supplementary
        counts show how it collapses under the natural symmetries (a shifted
        sequence is renormalized back to x_0 = 1 before comparison).
        """
        arrays = [s.as_array() for s in self.sequences]

        def canon(x):
            return tuple(np.round(np.angle(x[1:]) % (2 * np.pi), 6))

        index = {canon(x): i for i, x in enumerate(arrays)}

        def orbit_count(ops) -> int:
            seen: set[int] = set()
            orbits = 0
            for i, x in enumerate(arrays):
                if i in seen:
                    continue
                orbits += 1
                stack = [x]
                while stack:
                    y = stack.pop()
                    j = index.get(canon(y))
                    if j is None or j in seen:
                        continue
                    seen.add(j)
                    for op in ops:
                        stack.append(op(y))
            return orbits

        shift = lambda y: np.roll(y, -1) / np.roll(y, -1)[0]
        conj = lambda y: np.conj(y)
        return {
            "fixed_first_entry": len(arrays),
            "up_to_shift": orbit_count([shift]),
            "up_to_conjugation": orbit_count([conj]),
            "up_to_shift_and_conjugation": orbit_count([shift, conj]),
        }

    def to_dict(self) -> dict:
        return {
            "format": "census",
            "n": self.n,
            "metadata": self.metadata,
            "sequences": [
                {"kind": s.kind, "entries": [[z.real, z.imag] for z in s.entries]} for s in self.sequences
            ],
            "bases": [
                {
                    "label": b.label,
                    "n": b.dim,
                    "entries": [[[z.real, z.imag] for z in row] for row in np.asarray(b.matrix)],
                }
                for b in self.bases
            ],
        }

    @staticmethod
    def from_dict(payload: dict) -> "CensusResult":
        if payload.get("format") != "census":
            raise ValueError("not a census payload")
        sequences = tuple(
            BiuniSequence(
                entries=tuple(complex(re, im) for re, im in item["entries"]),
                kind=item["kind"],
            )
            for item in payload["sequences"]
        )
        bases = tuple(
            Basis(
                np.array([[complex(re, im) for re, im in row] for row in item["entries"]]),
                label=item.get("label", ""),
            )
            for item in payload.get("bases", [])
        )
        return CensusResult(n=int(payload["n"]), sequences=sequences, bases=bases, metadata=payload["metadata"])


def _circular_gap(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return np.abs((a - b + np.pi) % (2 * np.pi) - np.pi)


def _phase_residual_system(phi: np.ndarray, dft_matrix: np.ndarray, n: int):
    """Residuals |x~_a|^2 - 1 (a = 1..n-1) and analytic Jacobian, batched over rows of phi."""
    x = np.concatenate([np.ones((len(phi), 1), dtype=complex), np.exp(1j * phi)], axis=1)
    xt = x @ dft_matrix
    r = np.abs(xt[:, 1:]) ** 2 - 1.0
    return r, x, xt


def _phase_jacobian(x: np.ndarray, xt: np.ndarray, q_table: np.ndarray, n: int) -> np.ndarray:
    # d|x~_a|^2 / dphi_j = -(2/sqrt(n)) Im(conj(x~_a) x_j q^{ja})
    return -(2.0 / np.sqrt(n)) * np.imag(np.conj(xt[:, 1:, None]) * x[:, None, 1:] * q_table[None, :, :])


def newton_census(
    n: int = 6,
    restarts: int = 20000,
    seed: int = 0,
    tol: Tolerance = DEFAULT_TOL,
    batch_size: int = 512,
) -> CensusResult:
    """Multistart damped-Newton census of the biunimodular sequences with x_0 = 1.

    Solves the square system |x~_a|^2 = 1 (a = 1..n-1) over the n-1 free
    phases, starting from a low-discrepancy (Halton) sweep of the phase
    torus.  Damped steps use Armijo backtracking on the squared residual;
    convergence demands residual inf-norm <= 1e-12.  Solutions are merged at
    dedupe_tol (componentwise circular phase distance) and the run stops
    early once the latter half of the restarts used produced nothing new.

    Rank-deficient Jacobians at solutions mark the result 'not
    zero-dimensional'; exhausting the restart budget before the count
    stabilizes marks it 'unconverged census'.
    """
    if n not in (3, 5, 6, 7):
        raise ValueError("census targets n = 6 (primary) or odd n <= 7")
    if restarts < 1:
        raise ValueError("need at least one restart")

    q = np.exp(2j * np.pi / n)
    a = np.arange(n)
    dft_matrix = q ** np.outer(a, a) / np.sqrt(n)
    q_table = q ** np.outer(np.arange(1, n), np.arange(1, n))

    sampler = qmc.Halton(d=n - 1, scramble=True, seed=seed)
    pool: list[np.ndarray] = []
    first_seen: list[int] = []
    last_new = -1
    used = 0
    rank_deficient = 0
    stabilized = False

    while used < restarts:
        take = min(batch_size, restarts - used)
        phi = sampler.random(take) * 2 * np.pi
        start_index = used
        used += take

        active = np.ones(take, dtype=bool)
        for _ in range(NEWTON_MAX_ITERATIONS):
            if not active.any():
                break
            idx = np.nonzero(active)[0]
            r, x, xt = _phase_residual_system(phi[idx], dft_matrix, n)
            done = np.abs(r).max(axis=1) <= NEWTON_RESIDUAL_TOL
            if done.any():
                active[idx[done]] = False
                keep = ~done
                idx, r, x, xt = idx[keep], r[keep], x[keep], xt[keep]
            if len(idx) == 0:
                continue
            jac = _phase_jacobian(x, xt, q_table, n)
            try:
                step = np.linalg.solve(jac, -r[..., None])[..., 0]
            except np.linalg.LinAlgError:
                step = np.stack(
                    [np.linalg.lstsq(jac[i], -r[i], rcond=None)[0] for i in range(len(idx))]
                )
            f0 = 0.5 * np.sum(r * r, axis=1)
            t = np.ones(len(idx))
            accepted = np.zeros(len(idx), dtype=bool)
            for _ in range(40):
                trial = np.nonzero(~accepted)[0]
                if len(trial) == 0:
                    break
                r_new, _, _ = _phase_residual_system(
                    phi[idx[trial]] + t[trial, None] * step[trial], dft_matrix, n
                )
                f_new = 0.5 * np.sum(r_new * r_new, axis=1)
                ok = f_new <= f0[trial] * (1.0 - 0.5 * t[trial])
                accepted[trial[ok]] = True
                t[trial[~ok]] *= 0.5
            dead = ~accepted | (t < 1e-12)
            move = accepted & ~dead
            phi[idx[move]] = (phi[idx[move]] + t[move, None] * step[move]) % (2 * np.pi)
            active[idx[dead]] = False
        # anything still active hit the iteration cap: discard

        r, x, xt = _phase_residual_system(phi, dft_matrix, n)
        converged = np.abs(r).max(axis=1) <= NEWTON_RESIDUAL_TOL
        for row in np.nonzero(converged)[0]:
            sol = phi[row] % (2 * np.pi)
            jac = _phase_jacobian(x[row : row + 1], xt[row : row + 1], q_table, n)[0]
            if np.linalg.svd(jac, compute_uv=False)[-1] < 1e-6:
                rank_deficient += 1
            is_new = True
            for known in pool:
                if _circular_gap(sol, known).max() <= tol.dedupe_tol:
                    is_new = False
                    break
            if is_new:
                pool.append(sol)
                first_seen.append(start_index + int(row))
                last_new = start_index + int(row)
        floor = min(restarts, 2048)  # never stabilize off a tiny sample
        if pool and used >= floor and used >= 2 * (last_new + 1):
            stabilized = True
            break

    if pool and not stabilized:
        stabilized = used >= 2 * (last_new + 1)

    order = sorted(range(len(pool)), key=lambda i: tuple(pool[i]))
    sequences = []
    for i in order:
        entries = np.concatenate([[1.0 + 0j], np.exp(1j * pool[i])])
        sequences.append(BiuniSequence(entries=tuple(entries), kind=classify_sequence(entries)))

    status = "ok"
    if rank_deficient:
        status = "not zero-dimensional"
    elif not stabilized:
        status = "unconverged census"
    structure: dict[str, int] = {}
    for seq in sequences:
        if seq.kind == BJORCK:
            for tag in entry_structure(seq.as_array()):
                structure[tag] = structure.get(tag, 0) + 1
    metadata = {
        "n": n,
        "method": "newton",
        "seed": seed,
        "restart_budget": restarts,
        "restarts_used": used,
        "newton_residual_tol": NEWTON_RESIDUAL_TOL,
        "max_iterations": NEWTON_MAX_ITERATIONS,
        "dedupe_tol": tol.dedupe_tol,
        "rank_deficient_solutions": rank_deficient,
        "last_new_solution_at_restart": last_new,
        "bjorck_entry_tags": structure,
        "status": status,
    }
    result = CensusResult(n=n, sequences=tuple(sequences), bases=(), metadata=metadata)
    metadata["counts_under_quotients"] = result.quotient_counts(tol.dedupe_tol)
    return result


def root_census(n: int, k: int, tol: Tolerance = DEFAULT_TOL) -> CensusResult:
    """Exact enumeration of biunimodular sequences whose entries are k-th roots of unity."""
    vectors = search_mod.unbiased_vector_enumerate(n, k)
    sequences = []
    for v in sorted(vectors, key=lambda rv: rv.exponents):
        entries = v.to_complex(normalized=False)
        sequences.append(BiuniSequence(entries=tuple(entries), kind=classify_sequence(entries)))
    metadata = {
        "n": n,
        "method": "roots",
        "k": k,
        "exact": True,
        "candidates": k ** (n - 1),
        "status": "ok",
    }
    return CensusResult(n=n, sequences=tuple(sequences), bases=(), metadata=metadata)


def _is_circulant_column_set(columns: np.ndarray, tol: float = 1e-6) -> bool:
    """Whether the column set is closed (projectively) under the cyclic shift."""
    n = columns.shape[0]
    for j in range(columns.shape[1]):
        shifted = np.roll(columns[:, j], 1)
        overlaps = np.abs(shifted.conj() @ columns)
        if not np.any(np.abs(overlaps - 1.0) < tol):
            return False
    return True


def assemble_bases(census: CensusResult, tol: Tolerance = DEFAULT_TOL, orth_tol: float = 1e-8) -> CensusResult:
    """Find every orthonormal basis among the census vectors and attach it to the census.

    Census vectors (normalized by 1/sqrt(n)) close under cyclic shift up to
    the x_0 = 1 renormalization, so the bases are exactly the n-cliques of
    the orthogonality graph on the census itself.  Each basis is checked to
    be unbiased to the standard and Fourier bases.
    """
    n = census.n
    if census.count == 0:
        raise ValueError("census is empty; nothing to assemble")
    vecs = np.stack([s.as_array() for s in census.sequences]) / np.sqrt(n)
    m = len(vecs)
    gram = np.abs(vecs.conj() @ vecs.T)
    adj = gram < orth_tol
    np.fill_diagonal(adj, False)

    cliques: list[list[int]] = []

    def extend(chosen: list[int], mask: np.ndarray) -> None:
        if len(chosen) == n:
            cliques.append(list(chosen))
            return
        for nxt in np.nonzero(mask)[0]:
            if nxt > chosen[-1]:
                extend(chosen + [int(nxt)], mask & adj[nxt])

    for i in range(m):
        extend([i], adj[i])

    std = Basis.standard(n)
    fb = fourier(n)
    bases = []
    membership = np.zeros(m, dtype=int)
    for bi, clique in enumerate(cliques):
        cols = np.stack([vecs[i] for i in clique], axis=1)
        kind = GAUSSIAN if all(census.sequences[i].kind == GAUSSIAN for i in clique) else BJORCK
        circulant = _is_circulant_column_set(cols)
        label = f"census-basis-{bi:02d}:{kind}:{'circulant' if circulant else 'enphased'}"
        basis = Basis(cols, label=label)
        for other in (std, fb):
            s = np.abs(other.matrix.conj().T @ basis.matrix) ** 2
            defect = float(np.abs(s - 1.0 / n).max())
            if defect > 1e-8:
                raise ValueError(f"{label} is not unbiased to {other.label}: defect {defect:.3e}")
        bases.append(basis)
        for i in clique:
            membership[i] += 1

    metadata = dict(census.metadata)
    metadata.update(
        {
            "bases_found": len(bases),
            "membership_per_vector": {
                "min": int(membership.min()) if m else 0,
                "max": int(membership.max()) if m else 0,
            },
            "circulant_bases": int(sum(1 for b in bases if b.label.endswith("circulant"))),
        }
    )
    return replace(census, bases=tuple(bases), metadata=metadata)


@dataclass(frozen=True)
class DistanceReport:
    """Distance table over the assembled bases plus the summary pattern statistics."""

    labels: tuple[str, ...]
    table: np.ndarray
    groups: dict
    stats: dict

    def summary_lines(self) -> list[str]:
        s = self.stats
        lines = [
            f"bases: {len(self.labels)} "
            f"(gaussian {len(self.groups['gaussian'])}, "
            f"circulant six-plet {len(self.groups['circulant_sixplet'])}, "
            f"enphased six-plet {len(self.groups['enphased_sixplet'])})",
            "gaussian square: sides D2 = "
            + " ".join(f"{v:.3f}" for v in s["gaussian_square_sides"])
            + ", diagonals D2 = "
            + " ".join(f"{v:.3f}" for v in s["gaussian_square_diagonals"]),
            f"gaussian vs non-gaussian: D2 ~ {s['gaussian_vs_nongaussian'][1]:.2f} "
            f"(range {s['gaussian_vs_nongaussian'][0]:.6f}..{s['gaussian_vs_nongaussian'][1]:.6f})",
            f"six-plet vs six-plet: D2 ~ {s['sixplet_cross'][1]:.2f} "
            f"(range {s['sixplet_cross'][0]:.6f}..{s['sixplet_cross'][1]:.6f})",
            f"within six-plet max: D2 ~ {s['within_sixplet_max']:.2f} ({s['within_sixplet_max']:.6f})",
            f"six-plets isometric: {s['isometric_sixplets']}",
            f"global max D2 = {s['global_max']:.6f} (maximum for an unbiased pair would be {s['mub_distance']:.0f})",
        ]
        return lines


def census_distance_report(census: CensusResult, tol: Tolerance = DEFAULT_TOL) -> DistanceReport:
    """Chordal distance table over the assembled bases and the paper-pattern statistics."""
    if not census.bases:
        raise ValueError("census has no assembled bases; run assemble_bases first")
    bases = list(census.bases)
    table = distance_table(bases, tol)
    gaussian = [i for i, b in enumerate(bases) if f":{GAUSSIAN}:" in b.label]
    nongaussian = [i for i in range(len(bases)) if i not in gaussian]
    circ = [i for i in nongaussian if bases[i].label.endswith("circulant")]
    enph = [i for i in nongaussian if not bases[i].label.endswith("circulant")]
    if len(gaussian) < 2 or not circ or not enph:
        raise ValueError(
            "distance report needs the full census structure "
            f"(got {len(gaussian)} gaussian, {len(circ)} circulant, {len(enph)} enphased bases); "
            "run it on an assembled full census"
        )

    def pairs_within(group):
        return [table[i, j] for x, i in enumerate(group) for j in group[x + 1 :]]

    def pairs_between(g1, g2):
        return [table[i, j] for i in g1 for j in g2]

    gg = sorted(pairs_within(gaussian))
    stats = {
        "gaussian_square_sides": [float(v) for v in gg[:4]],
        "gaussian_square_diagonals": [float(v) for v in gg[4:]],
        "gaussian_vs_nongaussian": (
            float(min(pairs_between(gaussian, nongaussian))),
            float(max(pairs_between(gaussian, nongaussian))),
        ),
        "sixplet_cross": (
            float(min(pairs_between(circ, enph))),
            float(max(pairs_between(circ, enph))),
        ),
        "within_sixplet_max": float(max(max(pairs_within(circ)), max(pairs_within(enph)))),
        "isometric_sixplets": bool(
            np.allclose(sorted(pairs_within(circ)), sorted(pairs_within(enph)), atol=0.01)
        ),
        "global_max": float(table.max()),
        "mub_distance": float(census.n - 1),
    }
    return DistanceReport(
        labels=tuple(b.label for b in bases),
        table=table,
        groups={"gaussian": gaussian, "circulant_sixplet": circ, "enphased_sixplet": enph},
        stats=stats,
    )
