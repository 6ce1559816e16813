"""Executable checks of the descent, similarity and structure theorems.

Each verifier returns a :class:`TheoremVerdict`. When the hypotheses fail the
implication holds vacuously and ``conclusion_holds`` is ``None``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from . import tolerances
from .calculus import defect_sequence
from .classes import ClassReport, _report_from_sequence, classify_pair, is_order_preserving_pair, stability
from .errors import ContractViolation, DimensionMismatch
from .linalg import as_matrix, require_positive_invertible, scale_of, spectral_radius
from .structure import (
    contraction_extract,
    dunford_decompose,
    invariant_metric,
    invertibility_check,
    kerchy_split,
    similar_to_unitary,
)

__all__ = [
    "THEOREM_IDS",
    "TheoremVerdict",
    "Case",
    "verify",
    "verify_pair_descent",
    "verify_descent",
    "verify_power_bounded_hyper",
    "verify_factorization",
    "verify_similarity",
    "verify_contractive_split",
    "verify_spectral_inclusion",
    "verify_invertibility",
    "verify_algebraic_structure",
    "verify_alternating",
    "verify_remark",
]

THEOREM_IDS = (
    "PRO_00",
    "PRO_01",
    "THM_30",
    "THM_31",
    "THM_32",
    "THM_310",
    "SPECTRAL_INCLUSION",
    "NO_SINGULAR_DRAZIN",
    "THM_10",
    "PRO_11",
    "REMARK_CONTRACTIVE",
)

# equivalent-norm probe: number of random vectors and orders n = 1..NORM_ORDERS
NORM_PROBES = 4
NORM_ORDERS = 4


@dataclass(frozen=True)
class TheoremVerdict:
    theorem_id: str
    hypotheses_hold: bool
    conclusion_holds: bool | None
    checks: dict[str, bool] = field(default_factory=dict)
    residuals: dict[str, float] = field(default_factory=dict)
    witness: dict[str, np.ndarray] | None = None
    notes: tuple[str, ...] = ()

    @property
    def counterexample(self) -> bool:
        return self.hypotheses_hold and self.conclusion_holds is False


def _vacuous(tid: str, checks=None, residuals=None, notes=()) -> TheoremVerdict:
    return TheoremVerdict(tid, False, None, dict(checks or {}), dict(residuals or {}), None, tuple(notes))


def _verdict(tid, checks, residuals=None, witness=None, notes=()) -> TheoremVerdict:
    return TheoremVerdict(
        tid, True, all(checks.values()), dict(checks), dict(residuals or {}), witness, tuple(notes)
    )


class Case:
    """One ``(T, P, m)`` instance with lazily cached derived objects."""

    def __init__(self, T, P, m: int):
        self.T = as_matrix(T, "T")
        self.P = require_positive_invertible(P)
        if self.T.shape != self.P.shape:
            raise DimensionMismatch(f"T is {self.T.shape}, P is {self.P.shape}")
        if isinstance(m, bool) or int(m) != m or m < 1:
            raise ContractViolation(f"m must be a positive integer, got {m!r}")
        self.m = int(m)
        self.n = self.T.shape[0]
        self._seqs: dict[int, object] = {}

    def _seq(self, metric: str, order: int):
        seq = self._seqs.get(metric)
        if seq is None or seq.m < order:
            P = self.P if metric == "P" else np.eye(self.n, dtype=complex)
            seq = defect_sequence(self.T.conj().T, self.T, P, max(order, self.m))
            self._seqs[metric] = seq
        return seq

    def report(self, order: int, metric: str = "P") -> ClassReport:
        seq = self._seq(metric, order)
        return _report_from_sequence(seq.values, seq.scales, order, metric)

    @cached_property
    def stab(self):
        return stability(self.T)

    @cached_property
    def eig(self) -> np.ndarray:
        return np.asarray(self.stab.eigenvalues)

    @cached_property
    def metric(self):
        return invariant_metric(self.T)

    @cached_property
    def similarity(self):
        return similar_to_unitary(self.T)

    @cached_property
    def dunford(self):
        return dunford_decompose(self.T)

    @cached_property
    def invertibility(self):
        return invertibility_check(self.T)


def verify_pair_descent(T, P, m: int, pair_scale: float = 1.0, case: Case | None = None) -> TheoremVerdict:
    """Descent for the order-preserving pair ``(c T*, T)``."""
    case = case or Case(T, P, m)
    tid = "PRO_00"
    A = pair_scale * case.T.conj().T
    preserving = is_order_preserving_pair(A, case.T)
    if not preserving:
        return _vacuous(tid, {"order_preserving": False})
    top = classify_pair(A, case.T, case.P, case.m)
    even = case.m % 2 == 0
    hyp = top.expansive if even else top.contractive
    if not hyp:
        return _vacuous(tid, {"order_preserving": True})
    if case.m == 1:
        # order zero: the defect is P itself
        lower = True
    else:
        below = classify_pair(A, case.T, case.P, case.m - 1)
        lower = below.expansive if even else below.contractive
    return _verdict(tid, {"order_preserving": True, "descends": lower}, notes=(f"pair_scale={pair_scale!r}",))


def verify_descent(T, P, m: int, case: Case | None = None) -> TheoremVerdict:
    """Even ``m``: expansive at ``m`` implies expansive at ``m-1``; odd ``m``: contractive."""
    case = case or Case(T, P, m)
    tid = "PRO_01"
    top = case.report(case.m)
    even = case.m % 2 == 0
    if not (top.expansive if even else top.contractive):
        return _vacuous(tid)
    if case.m == 1:
        lower = True
    else:
        below = case.report(case.m - 1)
        lower = below.expansive if even else below.contractive
    margin = top.margins[case.m - 2] if case.m > 1 else (0.0, 0.0)
    return _verdict(tid, {"descends": lower}, {"lower_min_eig": margin[0], "lower_max_eig": margin[1]})


def verify_power_bounded_hyper(T, P, m: int, case: Case | None = None) -> TheoremVerdict:
    """Power bounded and expansive (contractive) implies hyperexpansive (hypercontractive)."""
    case = case or Case(T, P, m)
    tid = "THM_30"
    rep = case.report(case.m)
    if not case.stab.power_bounded or not (rep.expansive or rep.contractive):
        return _vacuous(tid, {"power_bounded": case.stab.power_bounded})
    checks = {}
    if rep.expansive:
        checks["hyperexpansive"] = rep.hyperexpansive
    if rep.contractive:
        checks["hypercontractive"] = rep.hypercontractive
    worst = max(max(hi, -lo) for lo, hi in rep.margins) if rep.margins else 0.0
    return _verdict(tid, checks, {"max_abs_defect_eig": worst})


def verify_factorization(T, P, m: int, case: Case | None = None) -> TheoremVerdict:
    """``T* = P1^{-1} V1* P1`` and ``T = P2^{-1} V2 P2`` with positive ``P_i``, isometric ``V_i``.

    In finite dimension the isometries are unitary; the witness uses
    ``P2 = S = Q^{1/2}``, ``P1 = S^{-1}`` and ``V1 = V2 = S T S^{-1}``.
    """
    case = case or Case(T, P, m)
    tid = "THM_31"
    rep = case.report(case.m)
    if not (case.stab.power_bounded and rep.expansive):
        return _vacuous(tid, {"power_bounded": case.stab.power_bounded, "expansive": rep.expansive})
    wit = case.similarity
    if wit is None:
        return _verdict(tid, {"witness_exists": False})
    S, V = wit.transform, wit.target
    Sinv = np.linalg.inv(S)
    T = case.T
    res_b = float(np.linalg.norm(T - Sinv @ V @ S, "fro"))
    P1 = 0.5 * (Sinv + Sinv.conj().T)
    res_a = float(np.linalg.norm(T.conj().T - np.linalg.inv(P1) @ V.conj().T @ P1, "fro"))
    iso = float(np.linalg.norm(V.conj().T @ V - np.eye(case.n), "fro"))
    bound = 1e-8 * scale_of(T) * wit.cond
    checks = {
        "witness_exists": True,
        "B_factor": res_b <= bound,
        "A_factor": res_a <= bound,
        "isometry": iso <= 1e-8,
        "positive": bool(np.linalg.eigvalsh(S)[0] > 0 and np.linalg.eigvalsh(P1)[0] > 0),
    }
    residuals = {"B_factor": res_b, "A_factor": res_a, "isometry": iso, "cond": wit.cond}
    return _verdict(tid, checks, residuals, {"P1": P1, "P2": S, "V": V})


def verify_similarity(T, P, m: int, case: Case | None = None, seed: int = 0) -> TheoremVerdict:
    """For power-bounded expansive ``T``: similarity to a unitary and an invariant metric.

    (a) a unitary similarity witness exists; (b) ``T* Q T = Q``; (c) ``T`` is
    ``C_1.``; (d) ``sum_j (-1)^j C(n,j) ||T^j x||_Q^2 = 0`` for ``n = 1..4`` on
    random ``x``.
    """
    case = case or Case(T, P, m)
    tid = "THM_32"
    rep = case.report(case.m)
    if not (case.stab.power_bounded and rep.expansive):
        return _vacuous(tid, {"power_bounded": case.stab.power_bounded, "expansive": rep.expansive})
    T = case.T
    Q = case.metric
    checks = {"similar_to_unitary": case.similarity is not None, "c1_dot": case.stab.c1_dot}
    residuals: dict[str, float] = {}
    if Q is None:
        checks["invariant_metric"] = False
        checks["equivalent_norm"] = False
        return _verdict(tid, checks, residuals)
    stein = float(np.linalg.norm(T.conj().T @ Q @ T - Q, "fro"))
    residuals["stein"] = stein
    checks["invariant_metric"] = stein <= tolerances.get().psd_tol * scale_of(T) ** 2
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(NORM_PROBES):
        x = rng.normal(size=case.n) + 1j * rng.normal(size=case.n)
        x /= np.linalg.norm(x)
        norms = []
        y = x
        for _ in range(NORM_ORDERS + 1):
            norms.append(float(np.real(np.vdot(y, Q @ y))))
            y = T @ y
        for n in range(1, NORM_ORDERS + 1):
            terms = [(-1) ** j * math.comb(n, j) * norms[j] for j in range(n + 1)]
            scale = max(1.0, sum(abs(t) for t in terms))
            worst = max(worst, abs(sum(terms)) / scale)
    residuals["equivalent_norm"] = worst
    checks["equivalent_norm"] = worst <= 1e-8
    return _verdict(tid, checks, residuals, {"Q": Q})


def verify_contractive_split(T, P, m: int, case: Case | None = None) -> TheoremVerdict:
    """Power-bounded contractive ``T`` is similar to ``(C0-contraction)* (+) unitary``.

    With ``C = P^{-1/2} T* P^{1/2}``: ``||C|| <= 1``; the unimodular part of
    ``C`` is an orthogonal, unitary summand and the rest has ``r < 1``; the
    spectral split of ``T`` has an inner block with ``r < 1`` and a peripheral
    block similar to a unitary.
    """
    case = case or Case(T, P, m)
    tid = "THM_310"
    rep = case.report(case.m)
    if not (case.stab.power_bounded and rep.contractive):
        return _vacuous(tid, {"power_bounded": case.stab.power_bounded, "contractive": rep.contractive})
    C = contraction_extract(case.T, case.P)
    normC = float(np.linalg.norm(C, 2))
    checks = {"contraction": normC <= 1.0 + 1e-8}
    residuals = {"norm_C": normC}
    edge = 1.0 - tolerances.get().spectral_tol

    split_T = kerchy_split(case.T)
    rT = spectral_radius(split_T.inner_block) if split_T.inner_block.size else 0.0
    checks["T_inner_c0"] = rT < edge
    Tp = split_T.peripheral_block
    checks["T_peripheral_similar_to_unitary"] = Tp.size == 0 or similar_to_unitary(Tp) is not None
    residuals["r_T_inner"] = rT

    if checks["contraction"]:
        split_C = kerchy_split(C)
        rC = spectral_radius(split_C.inner_block) if split_C.inner_block.size else 0.0
        K = split_C.peripheral_block
        unit = float(np.linalg.norm(K.conj().T @ K - np.eye(K.shape[0]), "fro")) if K.size else 0.0
        cross = (
            float(np.linalg.norm(split_C.inner_basis.conj().T @ split_C.peripheral_basis, 2))
            if K.size and split_C.inner_block.size
            else 0.0
        )
        checks["C_inner_c0"] = rC < edge
        checks["C_peripheral_unitary"] = unit <= 1e-8
        checks["C_split_orthogonal"] = cross <= 1e-8
        residuals.update({"r_C_inner": rC, "C_peripheral_unitarity": unit, "C_split_overlap": cross})
    witness = {"C": C, "inner_basis": split_T.inner_basis, "peripheral_basis": split_T.peripheral_basis}
    return _verdict(tid, checks, residuals, witness)


def verify_spectral_inclusion(T, P, m: int, case: Case | None = None) -> TheoremVerdict:
    """Expansive with ``m`` even puts the spectrum on the circle; ``m`` odd, outside the open disk."""
    case = case or Case(T, P, m)
    tid = "SPECTRAL_INCLUSION"
    if not case.report(case.m).expansive:
        return _vacuous(tid)
    tol = tolerances.get().spectral_tol
    mod = np.abs(case.eig)
    checks = {"outside_open_disk": bool(np.min(mod) >= 1.0 - tol)}
    if case.m % 2 == 0:
        checks["on_circle"] = bool(np.max(mod) <= 1.0 + tol)
    return _verdict(tid, checks, {"min_modulus": float(np.min(mod)), "max_modulus": float(np.max(mod))})


def verify_invertibility(T, P, m: int, case: Case | None = None) -> TheoremVerdict:
    """Expansive operators have no pole at zero, i.e. are invertible."""
    case = case or Case(T, P, m)
    tid = "NO_SINGULAR_DRAZIN"
    if not case.report(case.m).expansive:
        return _vacuous(tid)
    inv = case.invertibility
    return _verdict(
        tid,
        {"invertible": inv.invertible, "no_pole_at_zero": inv.zero_is_pole_order == 0},
        {"min_singular_value": inv.min_singular_value},
    )


def verify_algebraic_structure(T, P, m: int, case: Case | None = None) -> TheoremVerdict:
    """``m``-expansive (metric ``I``) with ``r(T) <= 1``: unitary plus commuting nilpotent.

    Checks (a) ``T0`` unitary and ``[T0, N] = 0``; (b) ``T`` is
    ``(2n-1)``-isometric for the nilpotency index ``n``; (c) ``n >= (m0+1)/2``
    with ``m0`` the least odd order ``<= m`` at which ``T`` is expansive. The
    equivalent form ``N^k != 0`` for ``k <= (m0-1)/2`` is recorded separately.
    The theorem is stated for the identity metric, so ``P`` is ignored.
    """
    case = case or Case(T, P, m)
    tid = "THM_10"
    tol = tolerances.get().spectral_tol
    r = float(np.max(np.abs(case.eig)))
    expansive = case.report(case.m, "I").expansive
    if not expansive or r > 1.0 + tol:
        return _vacuous(tid, {"expansive": expansive, "radius_le_1": r <= 1.0 + tol})
    m0 = next((k for k in range(1, case.m + 1, 2) if case.report(k, "I").expansive), None)
    if m0 is None:
        return _vacuous(tid, {"expansive": True, "odd_expansive_order": False})
    d = case.dunford
    T0, N, n = d.semisimple, d.nilpotent, d.nilpotency_index
    scale = scale_of(case.T)
    unit = float(np.linalg.norm(T0.conj().T @ T0 - np.eye(case.n), 2))
    comm = d.commutator_residual
    iso = case.report(2 * n - 1, "I").isometric
    # proof form: N^k is not zero for every k <= (m0-1)/2
    Nk = np.eye(case.n, dtype=complex)
    proof_form = True
    for k in range(1, (m0 - 1) // 2 + 1):
        Nk = Nk @ N
        if np.linalg.norm(Nk, 2) <= tolerances.get().rank_tol * scale**k:
            proof_form = False
    checks = {
        "T0_unitary": unit <= 1e-8,
        "commuting": comm <= 1e-9 * scale,
        "isometric_2n_minus_1": iso,
        "index_bound": 2 * n >= m0 + 1,
    }
    notes = (f"m0={m0}", f"n={n}", f"proof_form={'pass' if proof_form else 'fail'}")
    residuals = {"T0_unitarity": unit, "commutator": comm, "m0": float(m0), "n": float(n)}
    return _verdict(tid, checks, residuals, {"T0": T0, "N": N}, notes)


def verify_alternating(T, P, m: int, case: Case | None = None) -> TheoremVerdict:
    """Invertible, expansive and ``T*T >= I`` implies alternatingly expansive."""
    case = case or Case(T, P, m)
    tid = "PRO_11"
    T = case.T
    gram = np.linalg.eigvalsh(0.5 * (T.conj().T @ T + (T.conj().T @ T).conj().T))[0] - 1.0
    rep = case.report(case.m)
    ok = case.invertibility.invertible and rep.expansive and gram >= -tolerances.get().psd_tol
    if not ok:
        return _vacuous(tid, residuals={"min_eig_TstarT_minus_I": float(gram)})
    return _verdict(
        tid,
        {"alternatingly_expansive": rep.alternatingly_expansive},
        {"min_eig_TstarT_minus_I": float(gram)},
        notes=(rep.alternating_convention,),
    )


def verify_remark(alpha: complex, m: int, P1, P2) -> TheoremVerdict:
    """``T = alpha I (+) 0`` is singular and ``(m, P1 (+) P2)``-contractive.

    Hypotheses: ``m`` even, or ``|alpha| <= 1``.
    """
    tid = "REMARK_CONTRACTIVE"
    P1 = require_positive_invertible(P1, "P1")
    P2 = require_positive_invertible(P2, "P2")
    k1, k2 = P1.shape[0], P2.shape[0]
    n = k1 + k2
    P = np.zeros((n, n), dtype=complex)
    P[:k1, :k1] = P1
    P[k1:, k1:] = P2
    T = np.zeros((n, n), dtype=complex)
    T[:k1, :k1] = complex(alpha) * np.eye(k1)
    if isinstance(m, bool) or int(m) != m or m < 1:
        raise ContractViolation(f"m must be a positive integer, got {m!r}")
    m = int(m)
    if not (m % 2 == 0 or abs(alpha) <= 1.0):
        return _vacuous(tid)
    case = Case(T, P, m)
    rep = case.report(m)
    inv = case.invertibility
    checks = {"contractive": rep.contractive, "singular": (not inv.invertible) and inv.zero_is_pole_order >= 1}
    return _verdict(tid, checks, {"min_defect_eig": rep.margins[-1][0]}, {"T": T, "P": P})


_BY_ID = {
    "PRO_01": verify_descent,
    "THM_30": verify_power_bounded_hyper,
    "THM_31": verify_factorization,
    "THM_32": verify_similarity,
    "THM_310": verify_contractive_split,
    "SPECTRAL_INCLUSION": verify_spectral_inclusion,
    "NO_SINGULAR_DRAZIN": verify_invertibility,
    "THM_10": verify_algebraic_structure,
    "PRO_11": verify_alternating,
}


def verify(theorem_id: str, T, P, m: int, *, pair_scale: float = 1.0, alpha=None, case: Case | None = None) -> TheoremVerdict:
    """Dispatch by theorem id.

    ``REMARK_CONTRACTIVE`` takes ``alpha`` (default ``T[0,0]``) and splits ``P``
    into leading and trailing principal blocks of sizes ``n - n//2`` and ``n//2``.
    """
    if theorem_id not in THEOREM_IDS:
        raise ContractViolation(f"unknown theorem id {theorem_id!r}")
    case = case or Case(T, P, m)
    if theorem_id == "PRO_00":
        return verify_pair_descent(case.T, case.P, case.m, pair_scale=pair_scale, case=case)
    if theorem_id == "REMARK_CONTRACTIVE":
        if case.n < 2:
            raise ContractViolation("the remark needs dimension >= 2")
        a = case.T[0, 0] if alpha is None else alpha
        k = case.n - case.n // 2
        return verify_remark(a, case.m, case.P[:k, :k], case.P[k:, k:])
    return _BY_ID[theorem_id](case.T, case.P, case.m, case=case)
