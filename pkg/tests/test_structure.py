import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from opdefect.classes import classify, stability
from opdefect.errors import DomainError, IllConditionedDecomposition
from opdefect.fuzz import FuzzConfig, trial_instance
from opdefect.generators import generate
from opdefect.linalg import positive_inv_sqrt, positive_sqrt, spectral_radius
from opdefect.structure import (
    contraction_extract,
    dunford_decompose,
    invariant_metric,
    invertibility_check,
    kerchy_split,
    minimal_polynomial,
    similar_to_unitary,
)

from conftest import crandn, haar, random_pd, seeds

J = np.array([[1.0, 1.0], [0.0, 1.0]])
ROT = np.array([[0.0, 2.0], [-0.5, 0.0]])


def test_invariant_metric_examples(rng):
    U = haar(rng, 3)
    assert np.allclose(invariant_metric(U), np.eye(3), atol=1e-12)
    Q = invariant_metric(ROT)
    # hand oracle: diagonal ansatz gives q22 = 4 q11
    assert np.allclose(Q / Q[1, 1], np.diag([0.25, 1.0]), atol=1e-12)
    assert invariant_metric(J) is None
    assert invariant_metric(2 * np.eye(2)) is None


def test_similar_to_unitary_examples(rng):
    w = similar_to_unitary(ROT)
    # Q is normalized to max eigenvalue 1, so S = diag(1/2, 1)
    assert np.allclose(w.transform, np.diag([0.5, 1.0]), atol=1e-12)
    assert np.allclose(w.target, [[0, 1], [-1, 0]], atol=1e-12)
    assert w.cond == pytest.approx(2.0)
    U = haar(rng, 3)
    w = similar_to_unitary(U)
    assert np.allclose(w.transform, np.eye(3), atol=1e-12)
    assert np.allclose(w.target, U, atol=1e-12)
    assert similar_to_unitary(2 * np.eye(2)) is None


@given(seeds, st.integers(2, 5))
@settings(max_examples=30, deadline=None)
def test_metric_round_trip(seed, n):
    rng = np.random.default_rng(seed)
    V = crandn(rng, n, n)
    lam = np.exp(2j * np.pi * rng.random(n))
    T = V @ np.diag(lam) @ np.linalg.inv(V)
    Q = invariant_metric(T)
    assert Q is not None
    assert np.linalg.eigvalsh(Q)[-1] == pytest.approx(1.0)
    assert np.linalg.eigvalsh(Q)[0] > 0
    scale = max(1, np.linalg.norm(T, 2)) ** 2
    assert np.linalg.norm(T.conj().T @ Q @ T - Q, "fro") <= 1e-9 * scale
    U = positive_sqrt(Q) @ T @ positive_inv_sqrt(Q)
    assert np.linalg.norm(U.conj().T @ U - np.eye(n), "fro") <= 1e-8 * scale


def test_dunford_examples():
    d = dunford_decompose(J)
    assert np.allclose(d.semisimple, np.eye(2))
    assert np.allclose(d.nilpotent, [[0, 1], [0, 0]])
    assert d.nilpotency_index == 2
    d = dunford_decompose(np.diag([1.0, 2.0, 2.0]))
    assert np.allclose(d.nilpotent, 0) and d.nilpotency_index == 1
    T = np.array([[1j, 1, 0], [0, 1j, 0], [0, 0, 3]])
    d = dunford_decompose(T)
    assert np.allclose(d.semisimple, np.diag([1j, 1j, 3]))
    E12 = np.zeros((3, 3))
    E12[0, 1] = 1
    assert np.allclose(d.nilpotent, E12)
    assert d.nilpotency_index == 2


def test_dunford_ambiguity_band():
    with pytest.raises(IllConditionedDecomposition):
        dunford_decompose(np.diag([1.0, 1.0 + 1e-8]))
    d = dunford_decompose(np.diag([1.0, 1.0 + 1e-12]))
    assert len(d.clusters) == 1
    assert len(dunford_decompose(np.diag([1.0, 1.0 + 1e-6])).clusters) == 2


def _dunford_invariants(T):
    d = dunford_decompose(T)
    T0, N, p = d.semisimple, d.nilpotent, d.nilpotency_index
    scale = max(1, np.linalg.norm(T, 2))
    assert np.linalg.norm(T - T0 - N) <= 1e-9 * scale
    assert np.linalg.norm(T0 @ N - N @ T0) <= 1e-9 * scale**2
    assert np.linalg.norm(np.linalg.matrix_power(N, p), 2) <= 1e-8 * scale**p
    if p > 1:
        assert np.linalg.norm(np.linalg.matrix_power(N, p - 1), 2) > 1e-8 * scale ** (p - 1)
    # eigenvalues of T0 are the cluster centres
    centers = np.array([c.center for c in d.clusters for _ in range(c.multiplicity)])
    eig0 = np.linalg.eigvals(T0)
    for z in eig0:
        assert np.min(np.abs(centers - z)) <= 1e-7 * scale
    return d


@given(seeds, st.integers(2, 6))
@settings(max_examples=40, deadline=None)
def test_dunford_invariants_ginibre(seed, n):
    _dunford_invariants(crandn(np.random.default_rng(seed), n, n))


def test_dunford_invariants_structured_families():
    cfg = FuzzConfig(trials=30, seed=3)
    for fam in ("jordan", "unitary_plus_commuting_nilpotent", "direct_sum", "scaled_identity"):
        for i in range(cfg.trials):
            spec, _, _ = trial_instance(cfg, fam, i)
            T, _ = generate(spec)
            _dunford_invariants(T)


def test_minimal_polynomial_examples():
    assert np.allclose(minimal_polynomial(np.eye(2)), [1, -1])
    assert np.allclose(minimal_polynomial(J), [1, -2, 1])
    assert np.allclose(minimal_polynomial(np.diag([1.0, 2.0])), [1, -3, 2])


@given(seeds, st.integers(2, 5))
@settings(max_examples=30, deadline=None)
def test_minimal_polynomial_annihilates(seed, n):
    T = crandn(np.random.default_rng(seed), n, n)
    q = minimal_polynomial(T)
    assert len(q) - 1 == n  # distinct eigenvalues almost surely
    acc = np.zeros_like(T)
    for c in q:
        acc = acc @ T + c * np.eye(n)
    assert np.linalg.norm(acc) <= 1e-7 * sum(abs(c) * np.linalg.norm(T, 2) ** k for k, c in enumerate(q[::-1]))


def test_invertibility_examples(rng):
    r = invertibility_check(2 * np.eye(2))
    assert r.invertible and r.zero_is_pole_order == 0
    r = invertibility_check([[0, 1], [0, 0]])
    assert not r.invertible and r.zero_is_pole_order == 2
    T = np.zeros((3, 3), dtype=complex)
    T[:2, :2] = haar(rng, 2)
    r = invertibility_check(T)
    assert not r.invertible and r.zero_is_pole_order == 1


def test_kerchy_split_examples(rng):
    s = kerchy_split(np.diag([0.5, 1j]))
    assert np.allclose(np.abs(s.inner_basis[:, 0]), [1, 0])
    assert np.allclose(np.abs(s.peripheral_basis[:, 0]), [0, 1])
    s = kerchy_split(haar(rng, 3))
    assert s.inner_basis.shape == (3, 0) and s.peripheral_basis.shape == (3, 3)
    s = kerchy_split(np.diag([0.9, 0.5]))
    assert s.inner_basis.shape == (2, 2) and s.peripheral_basis.shape == (2, 0)
    with pytest.raises(DomainError):
        kerchy_split(J)


def test_kerchy_split_properties():
    cfg = FuzzConfig(trials=60, seed=11)
    seen = 0
    for fam in ("direct_sum", "unitary", "ginibre"):
        for i in range(cfg.trials):
            spec, _, _ = trial_instance(cfg, fam, i)
            T, _ = generate(spec)
            if not stability(T).power_bounded:
                continue
            s = kerchy_split(T)
            n = T.shape[0]
            both = np.hstack([s.inner_basis, s.peripheral_basis])
            assert np.linalg.matrix_rank(both) == n
            if s.inner_block.size:
                assert spectral_radius(s.inner_block) < 1
            if s.peripheral_block.size:
                assert invariant_metric(s.peripheral_block) is not None
            seen += 1
    assert seen > 50


def test_contraction_extract_examples(rng):
    C = contraction_extract(np.diag([0.5, 1.0]), np.eye(2))
    assert np.allclose(C, np.diag([0.5, 1.0])) and np.linalg.norm(C, 2) == pytest.approx(1)
    U = haar(rng, 3)
    assert np.allclose(contraction_extract(U, np.eye(3)), U.conj().T)
    C = contraction_extract(ROT, np.diag([1.0, 4.0]))
    assert np.allclose(C, [[0, -1], [1, 0]])
    with pytest.raises(DomainError):
        contraction_extract(ROT, np.diag([1.0, 0.0]))


def test_contraction_extract_on_contractive_instances():
    cfg = FuzzConfig(trials=80, seed=5)
    seen = 0
    for i in range(cfg.trials):
        spec, _, _ = trial_instance(cfg, "direct_sum", i)
        T, P = generate(spec)
        if not (stability(T).power_bounded and classify(T, P, 1).contractive):
            continue
        C = contraction_extract(T, P)
        assert np.linalg.norm(C, 2) <= 1 + 1e-8
        K = kerchy_split(C).peripheral_block
        if K.size:
            assert np.linalg.norm(K.conj().T @ K - np.eye(K.shape[0])) <= 1e-8
        seen += 1
    assert seen >= 10
