"""Dense complex linear-algebra substrate.

Matrices are plain ``numpy.ndarray`` objects of dtype ``complex128``; the
validators below enforce the square/finite/Hermitian contracts at the
boundary of each public operation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import tolerances
from .errors import ContractViolation, DimensionMismatch, DomainError

__all__ = [
    "PsdVerdict",
    "as_matrix",
    "as_hermitian",
    "hermitize",
    "scale_of",
    "hermitian_eig",
    "psd_check",
    "positive_sqrt",
    "positive_inv_sqrt",
    "require_positive_invertible",
    "spectral_radius",
    "numerical_rank",
    "douglas_factor",
]


def as_matrix(M, name: str = "matrix") -> np.ndarray:
    """Return ``M`` as a square, finite complex array (a copy is not forced)."""
    arr = np.asarray(M, dtype=complex)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] == 0:
        raise ContractViolation(f"{name} must be a non-empty square matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ContractViolation(f"{name} has non-finite entries")
    return arr


def scale_of(M, ord=2) -> float:
    return max(1.0, float(np.linalg.norm(M, ord)))


def _same_dim(*mats: np.ndarray) -> None:
    dims = {m.shape for m in mats}
    if len(dims) != 1:
        raise DimensionMismatch(f"incompatible shapes {sorted(dims)}")


def as_hermitian(M, name: str = "matrix", tol: float | None = None) -> np.ndarray:
    """Validate the Hermitian invariant ``||M - M*||_F <= herm_tol * max(1, ||M||_F)``.

    The input is returned unchanged (not symmetrized).
    """
    arr = as_matrix(M, name)
    tol = tolerances.get().herm_tol if tol is None else tol
    skew = np.linalg.norm(arr - arr.conj().T, "fro")
    if skew > tol * scale_of(arr, "fro"):
        raise ContractViolation(f"{name} is not Hermitian (skew part {skew:.3e})")
    return arr


def hermitize(M, scale: float | None = None) -> np.ndarray:
    """Symmetrize ``(M + M*)/2``; the discarded skew part must be <= skew_tol * scale."""
    arr = np.asarray(M, dtype=complex)
    scale = scale_of(arr) if scale is None else max(1.0, scale)
    skew = 0.5 * np.linalg.norm(arr - arr.conj().T, 2)
    if skew > tolerances.get().skew_tol * scale:
        raise ContractViolation(
            f"skew part {skew:.3e} exceeds {tolerances.get().skew_tol:g} * {scale:.3e}"
        )
    return 0.5 * (arr + arr.conj().T)


def hermitian_eig(M) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues (ascending) and unitary eigenvectors of a Hermitian matrix."""
    arr = as_hermitian(M)
    w, V = np.linalg.eigh(arr)
    return w, V


@dataclass(frozen=True)
class PsdVerdict:
    is_psd: bool
    min_eig: float
    scale: float


def psd_check(M, tol: float | None = None, scale: float | None = None) -> PsdVerdict:
    """Decide ``M >= 0`` as ``min_eig >= -psd_tol * scale``.

    ``scale`` defaults to ``max(1, ||M||_2)``. Callers that know the magnitude of
    the terms ``M`` was assembled from may pass a larger scale.
    """
    arr = as_hermitian(M)
    tol = tolerances.get().psd_tol if tol is None else tol
    w = np.linalg.eigh(arr)[0]
    if scale is None:
        scale = max(1.0, float(np.max(np.abs(w))))
    min_eig = float(w[0])
    return PsdVerdict(is_psd=min_eig >= -tol * scale, min_eig=min_eig, scale=float(scale))


def positive_sqrt(M) -> np.ndarray:
    """Positive square root of a PSD matrix."""
    verdict = psd_check(M)
    if not verdict.is_psd:
        raise DomainError(f"matrix is not positive semidefinite (min eig {verdict.min_eig:.3e})")
    w, V = np.linalg.eigh(as_matrix(M))
    root = (V * np.sqrt(np.clip(w, 0.0, None))) @ V.conj().T
    return 0.5 * (root + root.conj().T)


def require_positive_invertible(P, name: str = "metric") -> np.ndarray:
    """Validate that ``P`` is Hermitian with ``min_eig >= psd_tol * scale``."""
    arr = as_hermitian(P, name)
    w = np.linalg.eigh(arr)[0]
    scale = max(1.0, float(np.max(np.abs(w))))
    if w[0] < tolerances.get().psd_tol * scale:
        raise DomainError(f"{name} is not positive invertible (min eig {w[0]:.3e})")
    return 0.5 * (arr + arr.conj().T)


def positive_inv_sqrt(P) -> np.ndarray:
    """``P^{-1/2}`` for a positive invertible ``P``."""
    arr = require_positive_invertible(P)
    w, V = np.linalg.eigh(arr)
    root = (V / np.sqrt(w)) @ V.conj().T
    return 0.5 * (root + root.conj().T)


def spectral_radius(T) -> float:
    return float(np.max(np.abs(np.linalg.eigvals(as_matrix(T)))))


def numerical_rank(M, tol: float, scale: float | None = None) -> int:
    s = np.linalg.svd(np.asarray(M, dtype=complex), compute_uv=False)
    if scale is None:
        scale = max(1.0, float(s[0]) if s.size else 0.0)
    return int(np.sum(s > tol * scale))


def douglas_factor(A, B) -> np.ndarray | None:
    """Minimal-norm ``C`` with ``A = B C``, or ``None`` when range(A) is not in range(B).

    The range inclusion is decided by comparing the numerical ranks of ``B`` and
    ``[B | A]`` at threshold ``invertible_tol * scale``. The returned ``C = B^+ A``
    satisfies ``null(A) <= null(C)`` and ``range(C) _|_ null(B)``.
    """
    A = as_matrix(A, "A")
    B = as_matrix(B, "B")
    _same_dim(A, B)
    tol = tolerances.get().invertible_tol
    stacked = np.hstack([B, A])
    scale = scale_of(stacked)
    if numerical_rank(stacked, tol, scale) != numerical_rank(B, tol, scale):
        return None
    U, s, Vh = np.linalg.svd(B)
    keep = s > tol * scale
    # B^+ restricted to the retained singular triplets
    C = (Vh[keep].conj().T / s[keep]) @ (U[:, keep].conj().T @ A)
    if np.linalg.norm(A - B @ C, "fro") > tol * scale_of(A, "fro"):
        return None
    return C
