"""Seeded counterexample search over the theorem verifiers.

Trial ``i`` of family ``f`` draws everything from
``SeedSequence(seed, spawn_key=(f, i))``, so trials are independent and the
reduction (counts and maxima) does not depend on execution order.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import tolerances
from .classes import stability
from .errors import OpDefectError
from .generators import FAMILIES, METRICS, InstanceSpec, generate
from .serialize import matrix_entries
from .verify import THEOREM_IDS, Case, verify

__all__ = ["TARGET_FAMILY", "FuzzConfig", "fuzz", "trial_instance"]

# the family built to exercise each theorem's hypotheses
TARGET_FAMILY = {
    "PRO_00": "scaled_identity",
    "PRO_01": "scaled_identity",
    "THM_30": "unitary",
    "THM_31": "unitary",
    "THM_32": "unitary",
    "THM_310": "direct_sum",
    "SPECTRAL_INCLUSION": "unitary",
    "NO_SINGULAR_DRAZIN": "jordan",
    "THM_10": "jordan",
    "PRO_11": "scaled_identity",
    "REMARK_CONTRACTIVE": "scaled_identity",
}

MIN_APPLICABILITY = 0.05
PAIR_SCALES = (0.5, 1.0, 2.0)
# power-bounded operators must keep sampled norms under this multiple of dim * (1 + ||T||)
SAMPLING_FACTOR = 10.0


@dataclass(frozen=True)
class FuzzConfig:
    trials: int
    seed: int = 0
    dims: tuple[int, int] = (2, 6)
    orders: tuple[int, int] = (1, 6)
    families: tuple[str, ...] = FAMILIES

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if not 2 <= self.dims[0] <= self.dims[1] <= 8:
            raise ValueError(f"dims must satisfy 2 <= lo <= hi <= 8, got {self.dims}")
        if not 1 <= self.orders[0] <= self.orders[1]:
            raise ValueError(f"m range must satisfy 1 <= lo <= hi, got {self.orders}")
        unknown = set(self.families) - set(FAMILIES)
        if unknown:
            raise ValueError(f"unknown families {sorted(unknown)}")


def trial_instance(cfg: FuzzConfig, family: str, i: int):
    """``(spec, m, pair_scale)`` of trial ``i`` in ``family``."""
    ss = np.random.SeedSequence(cfg.seed, spawn_key=(FAMILIES.index(family), i))
    rng = np.random.default_rng(ss)
    dim = int(rng.integers(cfg.dims[0], cfg.dims[1] + 1))
    m = int(rng.integers(cfg.orders[0], cfg.orders[1] + 1))
    metric = METRICS[int(rng.integers(len(METRICS)))]
    pair_scale = float(PAIR_SCALES[int(rng.integers(len(PAIR_SCALES)))])
    seed = int(rng.integers(2**63))
    return InstanceSpec(dim=dim, generator=family, seed=seed, metric=metric), m, pair_scale


def _payload(spec, m, pair_scale, T, P, tid, verdict=None, error=None) -> dict:
    out = {
        "theorem_id": tid,
        "family": spec.generator,
        "instance_seed": spec.seed,
        "dim": spec.dim,
        "m": m,
        "metric": spec.metric,
        "pair_scale": pair_scale,
        "T": {"dim": spec.dim, "entries": matrix_entries(T)},
        "P": {"dim": spec.dim, "entries": matrix_entries(P)},
        "tolerances": tolerances.get().as_dict(),
    }
    if verdict is not None:
        out["checks"] = verdict.checks
        out["residuals"] = verdict.residuals
        out["notes"] = list(verdict.notes)
    if error is not None:
        out["error"] = {"code": getattr(error, "code", type(error).__name__), "message": str(error)}
    return out


def _empty_counts() -> dict:
    return {"evaluated": 0, "applicable": 0, "passed": 0, "counterexamples": 0, "errors": 0}


def _run_family(cfg: FuzzConfig, family: str, tol: tolerances.Tolerances) -> dict:
    with tolerances.override(**tol.as_dict()):
        counts = {tid: _empty_counts() for tid in THEOREM_IDS}
        residuals: dict[str, dict[str, float]] = {tid: {} for tid in THEOREM_IDS}
        found, errors = [], []
        sampling = {"power_bounded": 0, "bound_exceeded": 0}
        for i in range(cfg.trials):
            spec, m, pair_scale = trial_instance(cfg, family, i)
            T, P = generate(spec)
            case = Case(T, P, m)
            st = stability(T)
            if st.power_bounded:
                sampling["power_bounded"] += 1
                limit = SAMPLING_FACTOR * spec.dim * (1.0 + np.linalg.norm(T, 2))
                if st.sup_norm_estimate > limit:
                    sampling["bound_exceeded"] += 1
            for tid in THEOREM_IDS:
                c = counts[tid]
                c["evaluated"] += 1
                try:
                    v = verify(tid, T, P, m, pair_scale=pair_scale, case=case)
                except (OpDefectError, ArithmeticError, ValueError, np.linalg.LinAlgError) as exc:
                    c["errors"] += 1
                    errors.append(dict(_payload(spec, m, pair_scale, T, P, tid, error=exc), trial=i))
                    continue
                if not v.hypotheses_hold:
                    continue
                c["applicable"] += 1
                if v.conclusion_holds:
                    c["passed"] += 1
                else:
                    c["counterexamples"] += 1
                    found.append(dict(_payload(spec, m, pair_scale, T, P, tid, verdict=v), trial=i))
                res = residuals[tid]
                for k, val in v.residuals.items():
                    res[k] = max(res.get(k, float("-inf")), float(val))
        return {"counts": counts, "residuals": residuals, "counterexamples": found, "errors": errors, "sampling": sampling}


def _merge_counts(into: dict, add: dict) -> None:
    for k, v in add.items():
        into[k] += v


def fuzz(cfg: FuzzConfig, workers: int = 1) -> dict:
    """Run ``cfg.trials`` trials per family through every verifier.

    Families run in separate processes when ``workers > 1``; the summary is
    identical either way.
    """
    tol = tolerances.get()
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_run_family, [cfg] * len(cfg.families), cfg.families, [tol] * len(cfg.families)))
    else:
        parts = [_run_family(cfg, f, tol) for f in cfg.families]

    totals = {tid: _empty_counts() for tid in THEOREM_IDS}
    max_res: dict[str, dict[str, float]] = {tid: {} for tid in THEOREM_IDS}
    by_family = {}
    counterexamples, errors = [], []
    sampling = {"power_bounded": 0, "bound_exceeded": 0}
    for fam, part in zip(cfg.families, parts):
        by_family[fam] = part["counts"]
        for tid in THEOREM_IDS:
            _merge_counts(totals[tid], part["counts"][tid])
            for k, v in part["residuals"][tid].items():
                max_res[tid][k] = max(max_res[tid].get(k, float("-inf")), v)
        counterexamples.extend(part["counterexamples"])
        errors.extend(part["errors"])
        _merge_counts(sampling, part["sampling"])

    targets = {}
    for tid, fam in TARGET_FAMILY.items():
        if fam not in by_family:
            continue
        c = by_family[fam][tid]
        frac = c["applicable"] / c["evaluated"] if c["evaluated"] else 0.0
        targets[tid] = {"family": fam, "applicable_fraction": frac, "meets_minimum": frac >= MIN_APPLICABILITY}

    return {
        "seed": cfg.seed,
        "trials_per_family": cfg.trials,
        "dims": list(cfg.dims),
        "m": list(cfg.orders),
        "families": list(cfg.families),
        "theorems": totals,
        "by_family": by_family,
        "max_residuals": max_res,
        "targets": targets,
        "stability_sampling": sampling,
        "total_counterexamples": sum(c["counterexamples"] for c in totals.values()),
        "total_errors": sum(c["errors"] for c in totals.values()),
        "counterexamples": counterexamples,
        "errors": errors,
    }
