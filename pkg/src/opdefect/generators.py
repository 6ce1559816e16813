"""Seeded random instances for the theorem fuzzer.

Every family is a pure function of an :class:`InstanceSpec`. Families with
defective eigenvalues are generated in exactly upper-triangular form (and only
conjugated by diagonal phases) so that the eigenvalues are exact in floating
point; a dense similarity would split a defective eigenvalue by roughly
``eps ** (1/k)`` and land it in the clustering ambiguity band.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import linalg as sla
from scipy.stats import unitary_group

FAMILIES = (
    "ginibre",
    "unitary",
    "jordan",
    "unitary_plus_commuting_nilpotent",
    "scaled_identity",
    "direct_sum",
)
METRICS = ("identity", "random_positive")

SCALED_MODULI = (0.0, 0.5, 1.0, 1.5, 2.0)
JORDAN_RADII = (1.25, 1.5)
INNER_RADII = (0.25, 0.5, 0.75)


@dataclass(frozen=True)
class InstanceSpec:
    dim: int
    generator: str
    seed: int
    metric: str = "identity"

    def __post_init__(self):
        if not 2 <= self.dim <= 8:
            raise ValueError(f"dim must be in 2..8, got {self.dim}")
        if self.generator not in FAMILIES:
            raise ValueError(f"unknown generator {self.generator!r}")
        if self.metric not in METRICS:
            raise ValueError(f"unknown metric {self.metric!r}")


def _cnormal(rng, *shape):
    return rng.normal(size=shape) + 1j * rng.normal(size=shape)


def _haar(rng, n: int) -> np.ndarray:
    if n == 1:
        return np.array([[np.exp(2j * np.pi * rng.random())]])
    return unitary_group.rvs(n, random_state=rng)


def _phase(rng) -> complex:
    return complex(np.exp(2j * np.pi * rng.random()))


def _grid_phase(rng) -> complex:
    # eighth roots of unity make repeated eigenvalues across blocks likely
    return complex(np.exp(2j * np.pi * rng.integers(8) / 8))


def _block_sizes(rng, n: int, first: int | None = None) -> list[int]:
    sizes = [] if first is None else [first]
    left = n - sum(sizes)
    while left > 0:
        k = int(min(left, rng.integers(1, 4)))
        sizes.append(k)
        left -= k
    return sizes


def _phase_conjugate(rng, T: np.ndarray) -> np.ndarray:
    d = np.exp(2j * np.pi * rng.random(T.shape[0]))
    return (d[:, None] * T) / d[None, :]


def _ginibre(rng, n):
    return _cnormal(rng, n, n) / np.sqrt(n)


def _unitary(rng, n):
    return _haar(rng, n)


def _jordan(rng, n):
    radius = 1.0 if rng.random() < 0.75 else float(rng.choice(JORDAN_RADII))
    sizes = _block_sizes(rng, n, first=min(n, int(rng.integers(2, 4))))
    T = np.zeros((n, n), dtype=complex)
    at = 0
    for b, k in enumerate(sizes):
        lam = radius * (1.0 if b == 0 else _grid_phase(rng))
        T[at : at + k, at : at + k] = lam * np.eye(k) + np.eye(k, k=1)
        at += k
    return _phase_conjugate(rng, T)


def _unitary_plus_nilpotent(rng, n):
    sizes = _block_sizes(rng, n)
    rng.shuffle(sizes)
    T = np.zeros((n, n), dtype=complex)
    at = 0
    for k in sizes:
        N = np.triu(_cnormal(rng, k, k), 1)
        T[at : at + k, at : at + k] = _grid_phase(rng) * np.eye(k) + N
        at += k
    return _phase_conjugate(rng, T)


def _scaled_identity(rng, n):
    return float(rng.choice(SCALED_MODULI)) * _phase(rng) * np.eye(n, dtype=complex)


def _direct_sum(rng, n):
    k = int(rng.integers(1, n))
    kind = int(rng.integers(3))
    T = np.zeros((n, n), dtype=complex)
    if kind == 2:
        # alpha I (+) 0
        T[:k, :k] = float(rng.choice(SCALED_MODULI)) * _phase(rng) * np.eye(k)
        return T
    T[:k, :k] = _haar(rng, k)
    rho = float(rng.choice(INNER_RADII))
    if kind == 0:
        # normal contraction
        V = _haar(rng, n - k)
        lam = rho * rng.random(n - k) * np.exp(2j * np.pi * rng.random(n - k))
        T[k:, k:] = (V * lam) @ V.conj().T
    else:
        G = _cnormal(rng, n - k, n - k)
        T[k:, k:] = rho * G / np.max(np.abs(np.linalg.eigvals(G)))
    W = _haar(rng, n)
    return W @ T @ W.conj().T


_BUILDERS = {
    "ginibre": _ginibre,
    "unitary": _unitary,
    "jordan": _jordan,
    "unitary_plus_commuting_nilpotent": _unitary_plus_nilpotent,
    "scaled_identity": _scaled_identity,
    "direct_sum": _direct_sum,
}


def random_positive(rng, n: int, basis: np.ndarray | None = None) -> np.ndarray:
    """``V diag(e) V*`` with log-uniform ``e`` in [1/4, 4]; ``V`` is Haar unless given."""
    V = _haar(rng, n) if basis is None else basis
    e = np.exp(rng.uniform(np.log(0.25), np.log(4.0), size=n))
    P = (V * e) @ V.conj().T
    return 0.5 * (P + P.conj().T)


def generate(spec: InstanceSpec) -> tuple[np.ndarray, np.ndarray]:
    """The operator ``T`` and metric ``P`` for ``spec``; bit-reproducible.

    For the unitary family a random metric is drawn diagonal in the Schur
    (eigen) basis of ``T``; any other metric makes a unitary neither expansive
    nor contractive in general, which would leave its target theorems idle.
    """
    rng = np.random.default_rng(spec.seed)
    T = np.asarray(_BUILDERS[spec.generator](rng, spec.dim), dtype=complex)
    if spec.metric == "identity":
        P = np.eye(spec.dim, dtype=complex)
    elif spec.generator == "unitary":
        # diagonal in the eigenbasis of T, so T stays (m, P)-isometric
        _, Z = sla.schur(T, output="complex")
        P = random_positive(rng, spec.dim, basis=Z)
    else:
        P = random_positive(rng, spec.dim)
    return T, P
