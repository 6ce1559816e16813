import numpy as np
import pytest

from opdefect.errors import ContractViolation
from opdefect.fuzz import FuzzConfig, trial_instance
from opdefect.generators import generate
from opdefect.verify import (
    THEOREM_IDS,
    Case,
    verify,
    verify_algebraic_structure,
    verify_alternating,
    verify_contractive_split,
    verify_descent,
    verify_factorization,
    verify_invertibility,
    verify_pair_descent,
    verify_power_bounded_hyper,
    verify_remark,
    verify_similarity,
    verify_spectral_inclusion,
)

from conftest import haar

I2 = np.eye(2)
J = np.array([[1.0, 1.0], [0.0, 1.0]])
ROT = np.array([[0.0, 2.0], [-0.5, 0.0]])
P14 = np.diag([1.0, 4.0])


@pytest.fixture
def U(rng):
    return haar(rng, 2)


def holds(v):
    return v.hypotheses_hold and v.conclusion_holds is True


def vacuous(v):
    return not v.hypotheses_hold and v.conclusion_holds is None


def test_descent_examples(U):
    assert holds(verify_descent(U, I2, 2))
    # defect_3 = 0 so defect_4 = 0 <= 0 and expansive(3) must hold
    assert holds(verify_descent(J, I2, 4))
    assert vacuous(verify_descent(2 * I2, I2, 1))


def test_pair_descent(U):
    assert holds(verify_pair_descent(U, I2, 2, pair_scale=1.0))
    # (2 T*, T) with T = 1/2 I: (1 - 1/2)^m > 0, contractive at odd m
    assert holds(verify_pair_descent(0.5 * I2, I2, 3, pair_scale=2.0))
    assert vacuous(verify_pair_descent(2 * I2, I2, 3, pair_scale=1.0))


def test_power_bounded_hyper_examples(U):
    assert holds(verify_power_bounded_hyper(ROT, P14, 3))
    assert vacuous(verify_power_bounded_hyper(J, I2, 3))
    assert holds(verify_power_bounded_hyper(U, I2, 4))


def test_similarity_examples(U):
    v = verify_similarity(ROT, P14, 1)
    assert holds(v) and all(v.checks.values())
    Q = v.witness["Q"]
    assert np.allclose(Q / Q[1, 1], np.diag([0.25, 1.0]), atol=1e-10)
    assert vacuous(verify_similarity(2 * I2, I2, 1))
    v = verify_similarity(U, I2, 2)
    assert holds(v) and np.allclose(v.witness["Q"], I2, atol=1e-12)


def test_factorization_witness(U):
    v = verify_factorization(ROT, P14, 1)
    assert holds(v)
    P1, P2, V = v.witness["P1"], v.witness["P2"], v.witness["V"]
    assert np.allclose(ROT, np.linalg.inv(P2) @ V @ P2)
    assert np.allclose(ROT.T, np.linalg.inv(P1) @ V.conj().T @ P1)
    assert vacuous(verify_factorization(J, I2, 3))


def test_contractive_split_examples(U):
    v = verify_contractive_split(np.diag([0.5, 1j]), I2, 1)
    assert holds(v)
    assert np.allclose(np.abs(v.witness["inner_basis"][:, 0]), [1, 0])
    v = verify_contractive_split(U, I2, 2)
    assert holds(v) and v.witness["inner_basis"].shape[1] == 0
    assert vacuous(verify_contractive_split(np.diag([2.0, 1.0]), I2, 1))


def test_spectral_inclusion_examples(U):
    v = verify_spectral_inclusion(2 * I2, I2, 3)
    assert holds(v) and v.residuals["min_modulus"] == pytest.approx(2)
    assert holds(verify_spectral_inclusion(U, I2, 2))
    # defect_2 = diag(9/16, 0) >= 0, not <= 0
    assert vacuous(verify_spectral_inclusion(np.diag([0.5, 1.0]), I2, 2))


def test_invertibility_examples(U):
    assert holds(verify_invertibility(J, I2, 3))
    assert vacuous(verify_invertibility(np.diag([2.0, 0.0]), I2, 1))
    assert holds(verify_invertibility(U, I2, 5))


def test_algebraic_structure_examples(U):
    v = verify_algebraic_structure(J, I2, 3)
    assert holds(v)
    assert v.residuals["m0"] == 3 and v.residuals["n"] == 2
    assert "proof_form=pass" in v.notes
    v = verify_algebraic_structure(U, I2, 2)
    assert holds(v) and v.residuals["n"] == 1
    assert vacuous(verify_algebraic_structure(2 * I2, I2, 3))


def test_algebraic_structure_ignores_metric():
    a = verify_algebraic_structure(J, I2, 3)
    b = verify_algebraic_structure(J, P14, 3)
    assert a.checks == b.checks and a.residuals == b.residuals


def test_alternating_examples(U):
    v = verify_alternating(2 * I2, I2, 3)
    assert holds(v)
    assert holds(verify_alternating(U, I2, 2))
    v = verify_alternating(J, I2, 3)
    assert vacuous(v)
    assert v.residuals["min_eig_TstarT_minus_I"] == pytest.approx(-(np.sqrt(5) - 1) / 2)


def test_remark_examples():
    assert holds(verify_remark(3, 2, np.eye(1), np.eye(1)))
    assert holds(verify_remark(0.5, 3, np.eye(1), np.eye(1)))
    for m in (1, 2, 5):
        v = verify_remark(0, m, np.eye(2), np.diag([1.0, 3.0]))
        assert holds(v)
    assert vacuous(verify_remark(3, 3, np.eye(1), np.eye(1)))


def test_dispatch_and_contracts(U):
    for tid in THEOREM_IDS:
        v = verify(tid, U, I2, 2)
        assert v.theorem_id == tid
    with pytest.raises(ContractViolation):
        verify("THM_99", U, I2, 2)
    with pytest.raises(ContractViolation):
        Case(U, I2, 0)


def test_vacuity_and_determinism():
    cfg = FuzzConfig(trials=15, seed=9)
    for fam in cfg.families:
        for i in range(cfg.trials):
            spec, m, c = trial_instance(cfg, fam, i)
            T, P = generate(spec)
            for tid in THEOREM_IDS:
                a = verify(tid, T, P, m, pair_scale=c)
                b = verify(tid, T, P, m, pair_scale=c)
                if not a.hypotheses_hold:
                    assert a.conclusion_holds is None
                assert a.hypotheses_hold == b.hypotheses_hold
                assert a.conclusion_holds == b.conclusion_holds
                assert a.residuals == b.residuals
