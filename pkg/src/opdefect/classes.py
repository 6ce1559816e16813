"""Executable predicates for the (m, P) operator classes and for stability.

Classes are decided from the defects of the pair ``(T*, T)``:

    expansive      defect_m <= 0
    contractive    defect_m >= 0
    isometric      defect_m == 0
    hyper-*        the sign holds for every order 1..m
    alternatingly  (-1)^t defect_t >= 0 for every order 1..m

Sign tests go through :func:`opdefect.linalg.psd_check` with the rounding
scale of the defect's binomial terms, so cancellation noise in near-zero
defects is not mistaken for a sign.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import tolerances
from .calculus import defect_sequence
from .errors import ConsistencyError, DimensionMismatch
from .linalg import as_matrix, hermitize, psd_check, require_positive_invertible, scale_of

__all__ = [
    "ALTERNATING_CONVENTION",
    "ClassReport",
    "StabilityReport",
    "classify",
    "classify_pair",
    "is_order_preserving_pair",
    "stability",
    "semisimple_at",
    "sup_norm_estimate",
]

ALTERNATING_CONVENTION = "tilde_defect(T*,T,P,t) >= 0 for all 1 <= t <= m"


@dataclass(frozen=True)
class ClassReport:
    m: int
    metric_id: str
    expansive: bool
    contractive: bool
    isometric: bool
    hyperexpansive: bool
    hypercontractive: bool
    alternatingly_expansive: bool
    # (min_eig, max_eig) of defect_t for t = 1..m
    margins: tuple[tuple[float, float], ...]
    scales: tuple[float, ...]
    alternating_convention: str = ALTERNATING_CONVENTION

    @property
    def flags(self) -> dict[str, bool]:
        return {
            "expansive": self.expansive,
            "contractive": self.contractive,
            "isometric": self.isometric,
            "hyperexpansive": self.hyperexpansive,
            "hypercontractive": self.hypercontractive,
            "alternatingly_expansive": self.alternatingly_expansive,
        }


def _signs(D: np.ndarray, scale: float) -> tuple[bool, bool, bool, float, float]:
    """(<= 0, >= 0, == 0, min eig, max eig) for a Hermitian defect value."""
    tol = tolerances.get().psd_tol
    w = np.linalg.eigh(D)[0]
    lo, hi = float(w[0]), float(w[-1])
    nonneg = psd_check(D, scale=scale).is_psd
    nonpos = psd_check(-D, scale=scale).is_psd
    zero = max(abs(lo), abs(hi)) <= tol * scale
    return nonpos, nonneg, zero, lo, hi


def _report_from_sequence(values, scales, m: int, metric_id: str) -> ClassReport:
    nonpos, nonneg, zero, margins = [], [], [], []
    for t in range(1, m + 1):
        a, b, c, lo, hi = _signs(values[t], scales[t])
        nonpos.append(a)
        nonneg.append(b)
        zero.append(c)
        margins.append((lo, hi))
    # (-1)^t defect_t >= 0  <=>  defect_t >= 0 (t even) or <= 0 (t odd)
    alternating = all(nonneg[t - 1] if t % 2 == 0 else nonpos[t - 1] for t in range(1, m + 1))
    return ClassReport(
        m=m,
        metric_id=metric_id,
        expansive=nonpos[-1],
        contractive=nonneg[-1],
        isometric=zero[-1],
        hyperexpansive=all(nonpos),
        hypercontractive=all(nonneg),
        alternatingly_expansive=alternating,
        margins=tuple(margins),
        scales=tuple(float(s) for s in scales[1 : m + 1]),
    )


def classify(T, P, m: int, metric_id: str = "P") -> ClassReport:
    """Class verdicts for ``T`` with metric ``P`` at order ``m`` (pair ``(T*, T)``)."""
    T = as_matrix(T, "T")
    P = require_positive_invertible(P)
    if int(m) != m or m < 1:
        raise ValueError(f"m must be a positive integer, got {m!r}")
    seq = defect_sequence(T.conj().T, T, P, int(m))
    return _report_from_sequence(seq.values, seq.scales, int(m), metric_id)


def classify_pair(A, B, P, m: int, metric_id: str = "P") -> ClassReport:
    """Class verdicts for a general pair whose defects are Hermitian.

    Used for order-preserving pairs ``B = c A*``; the defects are symmetrized
    after checking the discarded skew part.
    """
    P = require_positive_invertible(P)
    seq = defect_sequence(A, B, P, int(m))
    values = [hermitize(v, s) for v, s in zip(seq.values, seq.scales)]
    return _report_from_sequence(values, seq.scales, int(m), metric_id)


def is_order_preserving_pair(A, B, trials: int = 16, seed: int = 0) -> bool:
    """Whether ``X -> A X B`` maps PSD matrices to PSD matrices.

    Decided structurally (``B = c A*`` with real ``c >= 0``, within 1e-8) and
    cross-validated on ``trials`` random PSD probes. Disagreement between the
    two routes raises :class:`ConsistencyError`.
    """
    A = as_matrix(A, "A")
    B = as_matrix(B, "B")
    if A.shape != B.shape:
        raise DimensionMismatch(f"shapes {A.shape} and {B.shape} do not match")
    tol = 1e-8
    Ah = A.conj().T
    na = np.linalg.norm(Ah, "fro")
    nb = np.linalg.norm(B, "fro")
    if na <= tol or nb <= tol:
        structural = True
    else:
        c = float(np.real(np.vdot(Ah, B))) / na**2
        structural = c >= -tol and np.linalg.norm(B - c * Ah, "fro") <= tol * max(1.0, nb)

    n = A.shape[0]
    rng = np.random.default_rng(seed)
    probes = True
    for k in range(trials):
        if k % 2 == 0:
            x = rng.normal(size=(n, 1)) + 1j * rng.normal(size=(n, 1))
            X = x @ x.conj().T
        else:
            W = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
            X = W @ W.conj().T
        Y = A @ X @ B
        scale = max(1.0, np.linalg.norm(A, 2) * np.linalg.norm(X, 2) * np.linalg.norm(B, 2))
        if np.linalg.norm(Y - Y.conj().T, 2) > tol * scale:
            probes = False
            break
        if np.linalg.eigvalsh(0.5 * (Y + Y.conj().T))[0] < -tol * scale:
            probes = False
            break
    if structural != probes:
        raise ConsistencyError(
            f"order-preservation tests disagree (structural={structural}, probes={probes})"
        )
    return structural


@dataclass(frozen=True)
class StabilityReport:
    power_bounded: bool
    c0_dot: bool
    c1_dot: bool
    c_dot0: bool
    c_dot1: bool
    sup_norm_estimate: float
    spectral_radius: float
    eigenvalues: tuple[complex, ...] = field(default=(), repr=False)


def semisimple_at(T: np.ndarray, lam: complex) -> bool:
    """``rank(T - lam I) == rank((T - lam I)^2)`` at threshold ``rank_tol * scale``."""
    tol = tolerances.get().rank_tol
    n = T.shape[0]
    scale = scale_of(T)
    M = T - lam * np.eye(n)
    s1 = np.linalg.svd(M, compute_uv=False)
    s2 = np.linalg.svd(M @ M, compute_uv=False)
    return int(np.sum(s1 > tol * scale)) == int(np.sum(s2 > tol * scale * scale))


SUP_NORM_HORIZON = 64


def _spectral_flags(T: np.ndarray) -> tuple[bool, bool, bool, float, np.ndarray]:
    tol = tolerances.get().spectral_tol
    eig = np.linalg.eigvals(T)
    mod = np.abs(eig)
    r = float(np.max(mod))
    bounded = r < 1.0 + tol and all(
        semisimple_at(T, lam) for lam, a in zip(eig, mod) if a >= 1.0 - tol
    )
    c0 = r < 1.0 - tol
    c1 = float(np.min(mod)) >= 1.0 - tol
    return bounded, c0, c1, r, eig


def sup_norm_estimate(T, horizon: int = SUP_NORM_HORIZON) -> float:
    """``max_{0 < n <= horizon} ||T^n||_2``."""
    T = as_matrix(T, "T")
    best = 0.0
    Tn = np.eye(T.shape[0], dtype=complex)
    for _ in range(horizon):
        Tn = Tn @ T
        best = max(best, float(np.linalg.norm(Tn, 2)))
    return best


def stability(T) -> StabilityReport:
    """Power-boundedness and ``C_{ab}`` membership, decided spectrally.

    In finite dimension ``T`` is power bounded iff ``r(T) <= 1`` and every
    unimodular eigenvalue is semisimple; ``C_0.`` means ``r(T) < 1``; ``C_1.``
    means no eigenvalue in the open unit disk. The adjoint classes are
    evaluated on ``T*``. The norm samples ``||T^n||`` (n <= 64) are reported
    as an estimate only.
    """
    T = as_matrix(T, "T")
    bounded, c0, c1, r, eig = _spectral_flags(T)
    _, c0_adj, c1_adj, _, _ = _spectral_flags(T.conj().T)
    return StabilityReport(
        power_bounded=bool(bounded),
        c0_dot=bool(c0),
        c1_dot=bool(c1),
        c_dot0=bool(c0_adj),
        c_dot1=bool(c1_adj),
        sup_norm_estimate=sup_norm_estimate(T),
        spectral_radius=r,
        eigenvalues=tuple(complex(z) for z in eig),
    )
