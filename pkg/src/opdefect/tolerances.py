"""Numerical tolerance policy shared by every sign and equality test.

All tests are relative: a quantity is compared against ``tol * scale`` where
``scale = max(1, ||M||)`` unless a caller supplies a better-informed scale.
The active configuration lives in a :class:`contextvars.ContextVar`, so
overriding it inside a ``with`` block does not leak across threads.
"""

from __future__ import annotations

import contextlib
import contextvars
import dataclasses
import os

ENV_VAR = "OPDEFECT_TOLERANCE"


@dataclasses.dataclass(frozen=True)
class Tolerances:
    psd_tol: float = 1e-9
    herm_tol: float = 1e-9
    # discarded skew part when symmetrizing a defect value
    skew_tol: float = 1e-8
    # singular-value threshold for numerical rank / semisimplicity
    rank_tol: float = 1e-8
    # eigenvalues closer than merge_tol are one cluster, farther than
    # cluster_tol are distinct; anything in between is an error
    merge_tol: float = 1e-9
    cluster_tol: float = 1e-7
    # slack on eigenvalue moduli (unit circle, open disk)
    spectral_tol: float = 1e-7
    invertible_tol: float = 1e-9

    def as_dict(self) -> dict[str, float]:
        return dataclasses.asdict(self)


_DEFAULT = Tolerances()
_active: contextvars.ContextVar[Tolerances] = contextvars.ContextVar(
    "opdefect_tolerances", default=_DEFAULT
)


def get() -> Tolerances:
    return _active.get()


def set_global(**changes: float) -> Tolerances:
    """Replace the active tolerances for the current context."""
    tol = dataclasses.replace(_active.get(), **changes)
    _active.set(tol)
    return tol


@contextlib.contextmanager
def override(**changes: float):
    token = _active.set(dataclasses.replace(_active.get(), **changes))
    try:
        yield _active.get()
    finally:
        _active.reset(token)


def from_environment(base: Tolerances | None = None) -> Tolerances:
    """Apply ``OPDEFECT_TOLERANCE`` (a decimal string) to ``psd_tol``.

    Raises ValueError if the variable is set but is not a positive finite
    decimal.
    """
    base = base or _DEFAULT
    raw = os.environ.get(ENV_VAR)
    if raw is None or raw.strip() == "":
        return base
    value = float(raw)
    if not (value > 0.0 and value < float("inf")):
        raise ValueError(f"{ENV_VAR} must be a positive finite decimal, got {raw!r}")
    return dataclasses.replace(base, psd_tol=value)
