"""Elementary-operator calculus.

For a pair ``(A, B)`` the elementary operator is ``X -> X - A X B``; its
``m``-th power applied to ``P`` is the defect

    defect(A, B, P, m) = sum_j (-1)^j C(m, j) A^j P B^j.

Every evaluation here is cross-checked against the Horner-style recurrence
``D_{t+1} = D_t - A D_t B``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import tolerances
from .errors import ConsistencyError, ContractViolation, DimensionMismatch
from .linalg import as_hermitian, as_matrix, hermitize, scale_of

MAX_ORDER = 60

__all__ = [
    "MAX_ORDER",
    "DefectSequence",
    "binomial",
    "is_adjoint_pair",
    "defect",
    "defect_terms",
    "tilde_defect",
    "power_pair_defect",
    "defect_sequence",
]


def binomial(m: int, j: int) -> int:
    if m > MAX_ORDER:
        raise ContractViolation(f"order {m} exceeds the supported maximum {MAX_ORDER}")
    return math.comb(m, j)


def _check_order(m: int) -> int:
    if isinstance(m, bool) or int(m) != m or m < 0:
        raise ContractViolation(f"order must be a non-negative integer, got {m!r}")
    m = int(m)
    if m > MAX_ORDER:
        raise ContractViolation(f"order {m} exceeds the supported maximum {MAX_ORDER}")
    return m


def _operands(A, B, P):
    A = as_matrix(A, "A")
    B = as_matrix(B, "B")
    P = as_matrix(P, "P")
    if not (A.shape == B.shape == P.shape):
        raise DimensionMismatch(f"shapes {A.shape}, {B.shape}, {P.shape} do not match")
    return A, B, P


def is_adjoint_pair(A, B, tol: float = 1e-12) -> bool:
    """True when ``B = A*`` within ``tol * max(1, ||A||_F)``."""
    A = np.asarray(A)
    B = np.asarray(B)
    return bool(np.linalg.norm(B - A.conj().T, "fro") <= tol * scale_of(A, "fro"))


def _powers(M: np.ndarray, k: int) -> list[np.ndarray]:
    out = [np.eye(M.shape[0], dtype=complex)]
    for _ in range(k):
        out.append(out[-1] @ M)
    return out


def defect_terms(A, B, P, m: int) -> tuple[list[np.ndarray], float]:
    """The products ``A^j P B^j`` for ``j = 0..m`` and their rounding scale.

    The scale ``max(1, sum_j C(m,j) ||A^j P B^j||_2)`` bounds the magnitude of
    everything summed into the defect, so cancellation error is proportional
    to it.
    """
    A, B, P = _operands(A, B, P)
    m = _check_order(m)
    Ap = _powers(A, m)
    Bp = _powers(B, m)
    terms = [Ap[j] @ P @ Bp[j] for j in range(m + 1)]
    scale = max(1.0, sum(binomial(m, j) * np.linalg.norm(t, 2) for j, t in enumerate(terms)))
    return terms, float(scale)


def _binomial_sum(terms: list[np.ndarray], m: int) -> np.ndarray:
    out = np.zeros_like(terms[0])
    for j in range(m + 1):
        c = binomial(m, j)
        if j % 2:
            out = out - c * terms[j]
        else:
            out = out + c * terms[j]
    return out


def _recurrence(A: np.ndarray, B: np.ndarray, P: np.ndarray, m: int, sign: int = 1) -> np.ndarray:
    # sign=+1: D <- D - A D B ; sign=-1: D <- A D B - D
    D = P.copy()
    for _ in range(m):
        D = D - A @ D @ B if sign > 0 else A @ D @ B - D
    return D


def _finish(D: np.ndarray, A: np.ndarray, B: np.ndarray, scale: float) -> np.ndarray:
    if is_adjoint_pair(A, B):
        return hermitize(D, scale)
    return D


def _raw_defect(A, B, P, m):
    A, B, P = _operands(A, B, P)
    m = _check_order(m)
    terms, scale = defect_terms(A, B, P, m)
    D = _binomial_sum(terms, m)
    R = _recurrence(A, B, P, m)
    tol = tolerances.get().psd_tol
    gap = np.linalg.norm(D - R, "fro")
    if gap > tol * scale:
        raise ConsistencyError(
            f"binomial sum and recurrence disagree by {gap:.3e} (scale {scale:.3e})"
        )
    return A, B, D, scale


def defect(A, B, P, m: int) -> np.ndarray:
    """``(I - L_A R_B)^m (P)`` evaluated as a binomial sum.

    When ``B = A*`` (within 1e-12) and ``P`` is Hermitian the result is
    symmetrized; otherwise the raw matrix is returned.
    """
    A, B, D, scale = _raw_defect(A, B, P, m)
    return _finish(D, A, B, scale)


def tilde_defect(A, B, P, m: int) -> np.ndarray:
    """``(L_A R_B - I)^m (P)``, computed as ``(-1)^m`` times :func:`defect`.

    The sign flip is exact, so ``tilde_defect + (-1)^(m+1) defect`` vanishes
    identically. The opposite-sign recurrence is evaluated independently as a
    consistency check.
    """
    A, B, D, scale = _raw_defect(A, B, P, m)
    out = D if m % 2 == 0 else -D
    R = _recurrence(A, B, np.asarray(P, dtype=complex), int(m), sign=-1)
    gap = np.linalg.norm(out - R, "fro")
    if gap > tolerances.get().psd_tol * scale:
        raise ConsistencyError(f"tilde recurrence disagrees by {gap:.3e}")
    return _finish(out, A, B, scale)


def power_pair_defect(A, B, P, m: int, n: int) -> np.ndarray:
    """Defect of the power pair ``(A^n, B^n)``.

    Checks the telescoping factorization

        defect(A^n, B^n, P, m) = (sum_{k<n} L_A^k R_B^k)^m (defect(A, B, P, m))

    and raises :class:`ConsistencyError` on a mismatch above ``1e-8 * scale``.
    """
    A, B, P = _operands(A, B, P)
    m = _check_order(m)
    if isinstance(n, bool) or int(n) != n or n < 1:
        raise ContractViolation(f"power must be a positive integer, got {n!r}")
    n = int(n)
    _check_order(n * m)
    An = np.linalg.matrix_power(A, n)
    Bn = np.linalg.matrix_power(B, n)
    _, _, direct, scale = _raw_defect(An, Bn, P, m)

    _, _, base, base_scale = _raw_defect(A, B, P, m)
    Ap = _powers(A, n - 1)
    Bp = _powers(B, n - 1)
    X = base
    for _ in range(m):
        X = sum(Ap[k] @ X @ Bp[k] for k in range(n))
    # the telescoped route multiplies the base defect by up to (sum ||A^k|| ||B^k||)^m
    growth = sum(np.linalg.norm(Ap[k], 2) * np.linalg.norm(Bp[k], 2) for k in range(n)) ** m
    check_scale = max(scale, base_scale * growth)
    gap = np.linalg.norm(direct - X, "fro")
    if gap > 1e-8 * check_scale:
        raise ConsistencyError(
            f"power-pair factorization mismatch {gap:.3e} (scale {check_scale:.3e})"
        )
    return _finish(direct, An, Bn, scale)


@dataclass(frozen=True)
class DefectSequence:
    """``values[t]`` is the defect of order ``t`` for ``t = 0..m``."""

    A: np.ndarray
    B: np.ndarray
    P: np.ndarray
    m: int
    values: tuple[np.ndarray, ...]
    scales: tuple[float, ...]


def defect_sequence(A, B, P, m: int) -> DefectSequence:
    """All defects of order ``0..m`` for one pair and metric.

    The products ``A^j P B^j`` are formed once; each order is summed from them
    and checked against the recurrence iterate of the same order. ``P`` must
    be Hermitian; entries are Hermitized when ``B = A*``.
    """
    A, B, P = _operands(A, B, P)
    as_hermitian(P, "P")
    m = _check_order(m)
    Ap = _powers(A, m)
    Bp = _powers(B, m)
    terms = [Ap[j] @ P @ Bp[j] for j in range(m + 1)]
    norms = [np.linalg.norm(t, 2) for t in terms]
    adjoint = is_adjoint_pair(A, B)
    tol = tolerances.get().psd_tol
    values = [P.copy()]
    scales = [max(1.0, float(norms[0]))]
    R = P.copy()
    for t in range(1, m + 1):
        R = R - A @ R @ B
        D = _binomial_sum(terms, t)
        scale = max(1.0, float(sum(binomial(t, j) * norms[j] for j in range(t + 1))))
        gap = np.linalg.norm(D - R, "fro")
        if gap > tol * scale:
            raise ConsistencyError(
                f"order {t}: binomial sum and recurrence disagree by {gap:.3e}"
            )
        values.append(hermitize(D, scale) if adjoint else D)
        scales.append(scale)
    return DefectSequence(A=A, B=B, P=P, m=m, values=tuple(values), scales=tuple(scales))
