"""Similarity and decomposition objects for finite matrices.

Spectral projections are computed without contour integrals: for each
eigenvalue cluster the complex Schur form is reordered so the cluster comes
first, and the Sylvester equation ``R11 X - X R22 = -R12`` decouples the
leading block. The Riesz projection is then ``Z [[I, -X], [0, 0]] Z*``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import linalg as sla

from . import tolerances
from .classes import stability
from .errors import ConsistencyError, DomainError, IllConditionedDecomposition
from .linalg import as_matrix, positive_inv_sqrt, positive_sqrt, scale_of

__all__ = [
    "Cluster",
    "DunfordPair",
    "InvertibilityReport",
    "SimilarityWitness",
    "SpectralSplit",
    "eigen_clusters",
    "dunford_decompose",
    "minimal_polynomial",
    "invertibility_check",
    "invariant_metric",
    "similar_to_unitary",
    "kerchy_split",
    "contraction_extract",
]


@dataclass(frozen=True)
class Cluster:
    center: complex
    multiplicity: int
    # least p with (T - center)^p = 0 on the generalized eigenspace
    pole_order: int
    projector: np.ndarray = field(repr=False)


@dataclass(frozen=True)
class DunfordPair:
    semisimple: np.ndarray
    nilpotent: np.ndarray
    nilpotency_index: int
    clusters: tuple[Cluster, ...] = field(repr=False)
    reconstruction_residual: float = 0.0
    commutator_residual: float = 0.0


@dataclass(frozen=True)
class InvertibilityReport:
    invertible: bool
    zero_is_pole_order: int
    min_singular_value: float


@dataclass(frozen=True)
class SimilarityWitness:
    """``target = transform @ T @ inv(transform)``; ``residual = ||U*U - I||_F``."""

    transform: np.ndarray
    target: np.ndarray
    residual: float
    cond: float


@dataclass(frozen=True)
class SpectralSplit:
    inner_basis: np.ndarray
    peripheral_basis: np.ndarray
    inner_block: np.ndarray
    peripheral_block: np.ndarray
    invariance_residual: float


def _schur_eigenvalues(T: np.ndarray) -> np.ndarray:
    R, _ = sla.schur(T, output="complex")
    return np.diag(R).copy()


def _group(eig: np.ndarray, scale: float) -> list[list[int]]:
    """Single-linkage grouping with a hard error inside the ambiguity band."""
    tol = tolerances.get()
    lo, hi = tol.merge_tol * scale, tol.cluster_tol * scale
    n = len(eig)
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(n):
        for j in range(i + 1, n):
            d = abs(eig[i] - eig[j])
            if d <= lo:
                parent[find(i)] = find(j)
            elif d <= hi:
                raise IllConditionedDecomposition(
                    f"eigenvalues {eig[i]:.12g} and {eig[j]:.12g} are {d:.3e} apart, "
                    f"inside the ambiguity band [{lo:.1e}, {hi:.1e}]"
                )
    groups: dict[int, list[int]] = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    return sorted(groups.values(), key=lambda g: (g[0]))


def _index(M: np.ndarray, scale: float, start: int = 1) -> int:
    """Least ``p >= start`` with ``||M^p||_2 <= rank_tol * scale^p``."""
    tol = tolerances.get().rank_tol
    k = M.shape[0]
    if k == 0:
        return 0
    Mp = np.linalg.matrix_power(M, start)
    p = start
    while np.linalg.norm(Mp, 2) > tol * scale**p:
        if p >= k:
            raise ConsistencyError(f"block of size {k} is not nilpotent to tolerance")
        Mp = Mp @ M
        p += 1
    return p


def eigen_clusters(T) -> tuple[Cluster, ...]:
    """Eigenvalue clusters of ``T`` with Riesz projections and pole orders."""
    T = as_matrix(T, "T")
    n = T.shape[0]
    scale = scale_of(T)
    eig = _schur_eigenvalues(T)
    groups = _group(eig, scale)
    centers = [complex(np.mean(eig[g])) for g in groups]

    out = []
    for c, (center, g) in enumerate(zip(centers, groups)):

        def select(z, c=c):
            return int(np.argmin([abs(z - w) for w in centers])) == c

        R, Z, k = sla.schur(T, output="complex", sort=select)
        if k != len(g):
            raise ConsistencyError(f"Schur reordering selected {k} eigenvalues, expected {len(g)}")
        if k == n:
            proj = np.eye(n, dtype=complex)
        else:
            X = sla.solve_sylvester(R[:k, :k], -R[k:, k:], -R[:k, k:])
            E = np.zeros((n, n), dtype=complex)
            E[:k, :k] = np.eye(k)
            E[:k, k:] = -X
            proj = Z @ E @ Z.conj().T
        lam = complex(np.trace(R[:k, :k]) / k)
        order = _index(R[:k, :k] - lam * np.eye(k), scale)
        out.append(Cluster(center=lam, multiplicity=k, pole_order=order, projector=proj))
    return tuple(out)


def dunford_decompose(T) -> DunfordPair:
    """``T = T0 + N`` with ``T0`` diagonalizable, ``N`` nilpotent, ``T0 N = N T0``.

    ``T0 = sum_c lam_c Pi_c`` over eigenvalue clusters. Clusters closer than
    ``merge_tol * scale`` are merged, farther than ``cluster_tol * scale`` are
    distinct, and anything between raises
    :class:`IllConditionedDecomposition`.
    """
    T = as_matrix(T, "T")
    scale = scale_of(T)
    clusters = eigen_clusters(T)
    T0 = sum(c.center * c.projector for c in clusters)
    N = T - T0
    p = _index(N, scale, start=1) if N.shape[0] else 0
    recon = float(np.linalg.norm(T - (T0 + N), "fro"))
    comm = float(np.linalg.norm(T0 @ N - N @ T0, "fro"))
    if comm > 1e-9 * scale * max(1.0, np.linalg.norm(T0, 2)):
        raise ConsistencyError(f"semisimple and nilpotent parts do not commute ({comm:.3e})")
    expected = max(c.pole_order for c in clusters)
    if p != expected:
        raise ConsistencyError(f"nilpotency index {p} disagrees with pole orders (max {expected})")
    return DunfordPair(
        semisimple=T0,
        nilpotent=N,
        nilpotency_index=p,
        clusters=clusters,
        reconstruction_residual=recon,
        commutator_residual=comm,
    )


def minimal_polynomial(T) -> np.ndarray:
    """Monic coefficients (highest degree first) of the minimal polynomial.

    Built as ``prod_c (z - lam_c)^{p_c}`` from the cluster pole orders and
    checked by evaluating ``q(T)``.
    """
    T = as_matrix(T, "T")
    roots = [c.center for c in eigen_clusters(T) for _ in range(c.pole_order)]
    coeffs = np.poly(np.array(roots, dtype=complex)).astype(complex)
    n = T.shape[0]
    acc = np.zeros_like(T)
    Tk = np.eye(n, dtype=complex)
    weight = 0.0
    deg = len(coeffs) - 1
    for k in range(deg + 1):
        a = coeffs[deg - k]
        acc = acc + a * Tk
        weight += abs(a) * np.linalg.norm(Tk, 2)
        Tk = Tk @ T
    res = np.linalg.norm(acc, "fro")
    if res > 1e-7 * max(1.0, weight):
        raise ConsistencyError(f"q(T) does not vanish (residual {res:.3e})")
    return coeffs


def invertibility_check(T) -> InvertibilityReport:
    """Invertibility by smallest singular value, plus the pole order at zero."""
    T = as_matrix(T, "T")
    s = np.linalg.svd(T, compute_uv=False)
    smin = float(s[-1])
    invertible = smin >= tolerances.get().invertible_tol * max(1.0, float(s[0]))
    order = 0
    if not invertible:
        nearest = min(eigen_clusters(T), key=lambda c: abs(c.center))
        order = nearest.pole_order
    return InvertibilityReport(invertible=bool(invertible), zero_is_pole_order=order, min_singular_value=smin)


def invariant_metric(T) -> np.ndarray | None:
    """Positive invertible ``Q`` with ``T* Q T = Q``, or ``None``.

    Exists iff ``T`` is diagonalizable with unimodular spectrum. The witness is
    ``Q = sum_c Pi_c* Pi_c``, i.e. ``inv(V)* inv(V)`` for an eigenbasis ``V``
    that is orthonormal inside each eigenspace, scaled so ``max eig(Q) = 1``.
    """
    T = as_matrix(T, "T")
    tol = tolerances.get()
    try:
        clusters = eigen_clusters(T)
    except IllConditionedDecomposition:
        return None
    if any(c.pole_order > 1 or abs(abs(c.center) - 1.0) > tol.spectral_tol for c in clusters):
        return None
    Q = sum(c.projector.conj().T @ c.projector for c in clusters)
    Q = 0.5 * (Q + Q.conj().T)
    Q = Q / np.linalg.eigvalsh(Q)[-1]
    res = np.linalg.norm(T.conj().T @ Q @ T - Q, "fro")
    if res > tol.psd_tol * scale_of(T) ** 2:
        return None
    return Q


def similar_to_unitary(T) -> SimilarityWitness | None:
    """``S = Q^{1/2}`` and ``U = S T S^{-1}`` for the invariant metric ``Q``."""
    T = as_matrix(T, "T")
    Q = invariant_metric(T)
    if Q is None:
        return None
    S = positive_sqrt(Q)
    U = np.linalg.solve(S.T, (S @ T).T).T
    res = float(np.linalg.norm(U.conj().T @ U - np.eye(T.shape[0]), "fro"))
    if res > 1e-8 * scale_of(T):
        raise ConsistencyError(f"similarity target is not unitary (residual {res:.3e})")
    return SimilarityWitness(transform=S, target=U, residual=res, cond=float(np.linalg.cond(S)))


def _invariant_basis(T: np.ndarray, select) -> tuple[np.ndarray, np.ndarray]:
    _, Z, k = sla.schur(T, output="complex", sort=select)
    B = Z[:, :k]
    return B, B.conj().T @ T @ B


def kerchy_split(T) -> SpectralSplit:
    """Split a power-bounded ``T`` into its ``|lam| < 1`` and ``|lam| = 1`` parts.

    Both bases are orthonormal and span generalized eigenspaces, so each is
    invariant under ``T``. The inner block has spectral radius below one; the
    peripheral block is similar to a unitary.
    """
    T = as_matrix(T, "T")
    if not stability(T).power_bounded:
        raise DomainError("operator is not power bounded")
    edge = 1.0 - tolerances.get().spectral_tol
    Bi, Ti = _invariant_basis(T, lambda z: abs(z) < edge)
    Bp, Tp = _invariant_basis(T, lambda z: abs(z) >= edge)
    res = max(
        float(np.linalg.norm(T @ Bi - Bi @ Ti, "fro")) if Bi.shape[1] else 0.0,
        float(np.linalg.norm(T @ Bp - Bp @ Tp, "fro")) if Bp.shape[1] else 0.0,
    )
    if res > 1e-8 * scale_of(T):
        raise ConsistencyError(f"split subspaces are not invariant (residual {res:.3e})")
    return SpectralSplit(
        inner_basis=Bi,
        peripheral_basis=Bp,
        inner_block=Ti,
        peripheral_block=Tp,
        invariance_residual=res,
    )


def contraction_extract(T, P) -> np.ndarray:
    """``C = P^{-1/2} T* P^{1/2}``; a contraction when ``T* P T <= P``."""
    T = as_matrix(T, "T")
    return positive_inv_sqrt(P) @ T.conj().T @ positive_sqrt(P)
