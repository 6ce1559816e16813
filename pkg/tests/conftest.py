import numpy as np
import pytest
from hypothesis import strategies as st

from opdefect import tolerances


def crandn(rng, *shape):
    return rng.normal(size=shape) + 1j * rng.normal(size=shape)


def random_pd(rng, n, lo=0.25, hi=4.0):
    Q, _ = np.linalg.qr(crandn(rng, n, n))
    e = rng.uniform(lo, hi, size=n)
    P = (Q * e) @ Q.conj().T
    return 0.5 * (P + P.conj().T)


def haar(rng, n):
    Q, R = np.linalg.qr(crandn(rng, n, n))
    return Q * (np.diag(R) / np.abs(np.diag(R)))


def brute_defect(A, B, P, m):
    """Independent oracle: explicit binomial sum with matrix_power."""
    from math import comb

    A, B, P = (np.asarray(x, dtype=complex) for x in (A, B, P))
    out = np.zeros_like(P)
    for j in range(m + 1):
        out += (-1) ** j * comb(m, j) * np.linalg.matrix_power(A, j) @ P @ np.linalg.matrix_power(B, j)
    return out


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


@pytest.fixture(autouse=True)
def _default_tolerances():
    with tolerances.override(**tolerances.Tolerances().as_dict()):
        yield


seeds = st.integers(min_value=0, max_value=2**32 - 1)
dims = st.integers(min_value=2, max_value=5)
