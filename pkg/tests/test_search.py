from itertools import combinations

import numpy as np
import pytest

from mubtools.catalog import load_fixture
from mubtools.constructions import prime_mub_set
from mubtools.core import Basis, Tolerance, is_complex_hadamard, is_unbiased_pair
from mubtools.search import (
    EnumerationBudgetError,
    exponents_to_complex,
    mub_quartet_search,
    mub_triplet_search,
    root_hadamard_enumerate,
    unbiased_vector_enumerate,
)

TOL = Tolerance(eq_tol=1e-10, dedupe_tol=1e-6)


def same_basis_projectively(a: np.ndarray, b: np.ndarray, tol=1e-9) -> bool:
    """Columns agree up to per-column phases and a permutation."""
    overlaps = np.abs(a.conj().T @ b) * a.shape[0] ** 0  # already normalized
    hits = np.abs(overlaps - 1.0) < tol
    return bool(hits.any(axis=0).all() and hits.any(axis=1).all())


class TestUnbiasedVectorEnumerate:
    def test_n6_k12_gaussians(self):
        vecs = unbiased_vector_enumerate(6, 12)
        assert len(vecs) == 12
        assert all(v.exponents[0] == 0 for v in vecs)

    def test_n2_k4(self):
        vecs = unbiased_vector_enumerate(2, 4)
        assert {v.exponents for v in vecs} == {(0, 1), (0, 3)}

    def test_budget_guard(self):
        with pytest.raises(EnumerationBudgetError, match="census"):
            unbiased_vector_enumerate(9, 24)


class TestHadamardEnumerate:
    def test_n6_k3_contains_fixture(self):
        enum = root_hadamard_enumerate(6, 3)
        assert enum.complete
        assert len(enum.matrices) > 0
        assert len(enum.buckets) == 1
        lexleast = min(enum.matrices, key=lambda m: tuple(m.ravel()))
        assert np.allclose(exponents_to_complex(lexleast, 3), load_fixture("S"))

    def test_n6_k4_contains_dita0(self):
        enum = root_hadamard_enumerate(6, 4)
        assert enum.complete and len(enum.buckets) == 1
        lexleast = min(enum.matrices, key=lambda m: tuple(m.ravel()))
        assert np.allclose(exponents_to_complex(lexleast, 4), load_fixture("DITA0"))

    def test_n4_k2_real_hadamard_single_bucket(self):
        enum = root_hadamard_enumerate(4, 2)
        assert enum.complete
        assert len(enum.buckets) == 1
        assert all(is_complex_hadamard(exponents_to_complex(m, 2), TOL) for m in enum.matrices)

    def test_emitted_matrices_pass_float_predicates(self):
        for n, k in ((3, 3), (6, 3), (6, 4), (4, 2)):
            enum = root_hadamard_enumerate(n, k)
            for m in enum.matrices:
                assert is_complex_hadamard(exponents_to_complex(m, k), TOL)

    def test_completeness_against_bruteforce_n3_k3(self):
        # oracle: all 3^(2*3) exponent grids with first row and column zero,
        # checked for unitarity numerically, counted as column sets
        roots = np.exp(2j * np.pi * np.arange(3) / 3)
        found = set()
        for e11 in range(3):
            for e12 in range(3):
                for e21 in range(3):
                    for e22 in range(3):
                        exps = np.array([[0, 0, 0], [0, e11, e12], [0, e21, e22]])
                        m = roots[exps] / np.sqrt(3)
                        if np.abs(m.conj().T @ m - np.eye(3)).max() < 1e-9:
                            cols = tuple(sorted(tuple(exps[:, j]) for j in range(3)))
                            found.add(cols)
        enum = root_hadamard_enumerate(3, 3)
        ours = {tuple(sorted(tuple(m[:, j]) for j in range(3))) for m in enum.matrices}
        assert ours == found

    def test_determinism(self):
        a = root_hadamard_enumerate(6, 4)
        b = root_hadamard_enumerate(6, 4)
        assert len(a.matrices) == len(b.matrices)
        assert all(x.tobytes() == y.tobytes() for x, y in zip(a.matrices, b.matrices))
        assert a.buckets == b.buckets

    def test_budget_and_resume_roundtrip(self, tmp_path):
        full = root_hadamard_enumerate(6, 4)
        token = str(tmp_path / "had.checkpoint.json")
        partial = root_hadamard_enumerate(6, 4, budget=400, checkpoint_path=token)
        assert not partial.complete
        assert partial.resume_token == token
        resumed = root_hadamard_enumerate(6, 4, resume_token=token)
        assert resumed.complete
        union = {m.tobytes() for m in partial.matrices} | {m.tobytes() for m in resumed.matrices}
        assert union == {m.tobytes() for m in full.matrices}


class TestTripletSearch:
    def test_n2_k4_pauli_pair(self):
        outcome = mub_triplet_search(2, 4)
        assert outcome.complete and len(outcome.results) == 1
        h1, h2 = outcome.results[0]
        m1 = exponents_to_complex(h1, 4)
        m2 = exponents_to_complex(h2, 4)
        x_eigen = np.array([[1, 1], [1, -1]]) / np.sqrt(2)
        y_eigen = np.array([[1, 1], [1j, -1j]]) / np.sqrt(2)
        assert same_basis_projectively(m1, x_eigen)
        assert same_basis_projectively(m2, y_eigen)

    def test_n3_k3_contains_prime_construction(self):
        outcome = mub_triplet_search(3, 3)
        assert outcome.complete and outcome.results
        mubs = prime_mub_set(3)
        targets = [np.asarray(b.matrix) for b in mubs.bases[1:]]
        hit = False
        for h1, h2 in outcome.results:
            m1 = exponents_to_complex(h1, 3)
            m2 = exponents_to_complex(h2, 3)
            for a, b in ((0, 1), (0, 2), (1, 2)):
                if (same_basis_projectively(m1, targets[a]) and same_basis_projectively(m2, targets[b])) or (
                    same_basis_projectively(m1, targets[b]) and same_basis_projectively(m2, targets[a])
                ):
                    hit = True
        assert hit

    def test_triplets_are_mub_numerically(self):
        outcome = mub_triplet_search(3, 3)
        for h1, h2 in outcome.results:
            b1 = Basis(exponents_to_complex(h1, 3))
            b2 = Basis(exponents_to_complex(h2, 3))
            for basis in (b1, b2):
                assert is_complex_hadamard(basis.matrix, TOL)
            ok, dev = is_unbiased_pair(b1, b2, TOL)
            assert ok, dev


class TestQuartetSearch:
    def test_n3_k3_complete_set_found(self):
        triplets = mub_triplet_search(3, 3)
        outcome = mub_quartet_search(3, 3, triplets=triplets)
        assert outcome.complete
        assert outcome.verdict == "non-empty"
        triplet_keys = {(h1.tobytes(), h2.tobytes()) for h1, h2 in triplets.results}
        for h1, h2, h3 in outcome.results:
            assert (h1.tobytes(), h2.tobytes()) in triplet_keys
            bases = [Basis(exponents_to_complex(h, 3)) for h in (h1, h2, h3)]
            for i, j in combinations(range(3), 2):
                ok, dev = is_unbiased_pair(bases[i], bases[j], TOL)
                assert ok, dev

    def test_n5_k5_complete_set_exists(self):
        outcome = mub_quartet_search(5, 5)
        assert outcome.complete
        assert outcome.verdict == "non-empty"

    def test_budget_exhaustion_is_inconclusive(self, tmp_path):
        token = str(tmp_path / "quartets.checkpoint.json")
        outcome = mub_quartet_search(5, 5, budget=8, checkpoint_path=token)
        assert not outcome.complete
        assert outcome.verdict == "inconclusive"
        assert outcome.resume_token == token
