"""``opdefect`` command-line front end.

Every successful command prints one JSON report on stdout and exits 0. Input
and domain errors exit 1, usage errors exit 2; both write a single-line JSON
error object to stderr.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import tolerances
from .calculus import defect_sequence
from .classes import classify, stability
from .errors import OpDefectError
from .fuzz import FuzzConfig, fuzz
from .linalg import douglas_factor
from .serialize import MatrixDocument, MatrixFormatError, ReportDocument, parse_matrix
from .structure import (
    dunford_decompose,
    invariant_metric,
    kerchy_split,
    minimal_polynomial,
    similar_to_unitary,
)
from .verify import THEOREM_IDS, verify, verify_remark

EXIT_OK, EXIT_INPUT, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _emit_error(code: str, message: str) -> None:
    sys.stderr.write(json.dumps({"error": code, "message": message}, sort_keys=True) + "\n")


def _range(text: str) -> tuple[int, int]:
    """``"2..6"`` or ``"4"`` as an inclusive integer range."""
    lo, sep, hi = text.partition("..")
    try:
        a = int(lo)
        b = int(hi) if sep else a
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected N or LO..HI, got {text!r}") from None
    if a > b:
        raise argparse.ArgumentTypeError(f"empty range {text!r}")
    return a, b


def _complex(text: str) -> complex:
    try:
        return complex(text.replace(" ", "").replace("i", "j"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a complex number: {text!r}") from None


def _positive_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {v}")
    return v


def _positive_float(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not (0.0 < v < float("inf")):
        raise argparse.ArgumentTypeError(f"must be positive and finite, got {text!r}")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="opdefect", description="Elementary-operator defects, operator classes and theorem checks.")
    p.add_argument("--psd-tol", type=_positive_float, help="PSD test tolerance (overrides OPDEFECT_TOLERANCE)")
    p.add_argument("--herm-tol", type=_positive_float, help="Hermitian test tolerance")
    p.add_argument("--seed", type=int, default=0, help="seed for randomized probes and fuzzing")
    sub = p.add_subparsers(dest="command", parser_class=_Parser, required=True)

    def op_cmd(name, help_, metric=False, order=False):
        s = sub.add_parser(name, help=help_)
        s.add_argument("--op", required=True, help="operator matrix file")
        if metric:
            s.add_argument("--metric", help="metric matrix file (default: identity)")
        if order:
            s.add_argument("--m", type=_positive_int, required=True, help="order m")
        return s

    op_cmd("classify", "class verdicts at order m", metric=True, order=True)
    op_cmd("defect", "defect sequence of (T*, T) for orders 0..m", metric=True, order=True)
    op_cmd("stability", "power boundedness and C-class membership")
    op_cmd("metric", "invariant metric Q with T*QT = Q")
    op_cmd("similar", "similarity to a unitary")
    op_cmd("dunford", "semisimple plus nilpotent decomposition")
    op_cmd("minpoly", "minimal polynomial")
    op_cmd("split", "split into |lambda| < 1 and |lambda| = 1 parts")

    d = sub.add_parser("douglas", help="minimal-norm C with A = B C")
    d.add_argument("--a", required=True, help="matrix file for A")
    d.add_argument("--b", required=True, help="matrix file for B")

    v = sub.add_parser("verify", help="check one theorem on one instance")
    v.add_argument("--theorem", required=True, choices=THEOREM_IDS)
    v.add_argument("--op", help="operator matrix file")
    v.add_argument("--metric", help="metric matrix file (default: identity)")
    v.add_argument("--m", type=_positive_int, required=True)
    v.add_argument("--pair-scale", type=_positive_float, default=1.0, help="c in the pair (c T*, T) for PRO_00")
    v.add_argument("--alpha", type=_complex, help="scalar for REMARK_CONTRACTIVE (e.g. 0.5 or 1+2j)")
    v.add_argument("--p1", help="first metric block for REMARK_CONTRACTIVE")
    v.add_argument("--p2", help="second metric block for REMARK_CONTRACTIVE")

    f = sub.add_parser("fuzz", help="seeded counterexample search")
    f.add_argument("--trials", type=_positive_int, required=True, help="trials per generator family")
    f.add_argument("--dims", type=_range, default=(2, 6), help="dimension range LO..HI (default 2..6)")
    f.add_argument("--m", type=_range, default=(1, 6), help="order range LO..HI (default 1..6)")
    f.add_argument("--workers", type=_positive_int, default=1, help="worker processes")
    return p


def _load(path: str, role: str) -> MatrixDocument:
    try:
        with open(path, "rb") as fh:
            raw = fh.read()
    except OSError as exc:
        raise MatrixFormatError("IO_ERROR", f"cannot read {path}: {exc.strerror}") from None
    doc = parse_matrix(raw)
    if role == "metric" and doc.role != "metric":
        # validate metric semantics even when the file does not declare the role
        doc = parse_matrix(json.dumps({**doc.to_dict(), "role": "metric"}))
    return doc


def _metric(path: str | None, dim: int):
    if path is None:
        return np.eye(dim, dtype=complex), None, "I"
    doc = _load(path, "metric")
    if doc.dim != dim:
        raise MatrixFormatError("DIM_MISMATCH", f"metric has dim {doc.dim}, operator has dim {dim}")
    return doc.matrix, doc, doc.name


def _run(args) -> tuple[list[MatrixDocument], object]:
    cmd = args.command
    docs: list[MatrixDocument] = []

    if cmd == "douglas":
        A, B = _load(args.a, "operator"), _load(args.b, "operator")
        if A.dim != B.dim:
            raise MatrixFormatError("DIM_MISMATCH", f"A has dim {A.dim}, B has dim {B.dim}")
        C = douglas_factor(A.matrix, B.matrix)
        out = {"exists": C is not None, "C": C, "norm": None if C is None else float(np.linalg.norm(C, 2))}
        return [A, B], out

    if cmd == "fuzz":
        cfg = FuzzConfig(trials=args.trials, seed=args.seed, dims=args.dims, orders=args.m)
        return [], fuzz(cfg, workers=args.workers)

    if cmd == "verify" and args.theorem == "REMARK_CONTRACTIVE" and args.p1 and args.p2:
        p1, p2 = _load(args.p1, "metric"), _load(args.p2, "metric")
        alpha = 0.0 if args.alpha is None else args.alpha
        return [p1, p2], verify_remark(alpha, args.m, p1.matrix, p2.matrix)

    if not getattr(args, "op", None):
        raise UsageError("--op is required")
    op = _load(args.op, "operator")
    docs.append(op)
    T = op.matrix

    if cmd in ("classify", "defect", "verify"):
        P, pdoc, pid = _metric(args.metric, op.dim)
        if pdoc is not None:
            docs.append(pdoc)
        if cmd == "classify":
            return docs, classify(T, P, args.m, metric_id=pid)
        if cmd == "defect":
            seq = defect_sequence(T.conj().T, T, P, args.m)
            return docs, {"pair": "(T*, T)", "metric_id": pid, "m": seq.m, "values": list(seq.values), "scales": list(seq.scales)}
        return docs, verify(args.theorem, T, P, args.m, pair_scale=args.pair_scale, alpha=args.alpha)

    if cmd == "stability":
        return docs, stability(T)
    if cmd == "metric":
        Q = invariant_metric(T)
        return docs, {"exists": Q is not None, "Q": Q}
    if cmd == "similar":
        w = similar_to_unitary(T)
        if w is None:
            return docs, {"exists": False}
        return docs, {"exists": True, "transform": w.transform, "target": w.target, "residual": w.residual, "cond": w.cond}
    if cmd == "dunford":
        d = dunford_decompose(T)
        clusters = [{"center": c.center, "multiplicity": c.multiplicity, "pole_order": c.pole_order} for c in d.clusters]
        return docs, {
            "semisimple": d.semisimple,
            "nilpotent": d.nilpotent,
            "nilpotency_index": d.nilpotency_index,
            "clusters": clusters,
            "reconstruction_residual": d.reconstruction_residual,
            "commutator_residual": d.commutator_residual,
        }
    if cmd == "minpoly":
        q = minimal_polynomial(T)
        return docs, {"degree": len(q) - 1, "coefficients": [complex(c) for c in q]}
    if cmd == "split":
        return docs, kerchy_split(T)
    raise UsageError(f"unknown command {cmd!r}")


def _active_tolerances(args) -> tolerances.Tolerances:
    # precedence: command-line flag > OPDEFECT_TOLERANCE > default
    tol = tolerances.from_environment()
    changes = {}
    if args.psd_tol is not None:
        changes["psd_tol"] = args.psd_tol
    if args.herm_tol is not None:
        changes["herm_tol"] = args.herm_tol
    return tolerances.Tolerances(**{**tol.as_dict(), **changes})


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        _emit_error("USAGE", str(exc))
        return EXIT_USAGE
    try:
        tol = _active_tolerances(args)
    except ValueError as exc:
        _emit_error("INVALID_TOLERANCE", str(exc))
        return EXIT_USAGE
    with tolerances.override(**tol.as_dict()):
        try:
            inputs, result = _run(args)
        except UsageError as exc:
            _emit_error("USAGE", str(exc))
            return EXIT_USAGE
        except OpDefectError as exc:
            _emit_error(exc.code, str(exc))
            return EXIT_INPUT
        except ValueError as exc:
            _emit_error("INVALID_ARGUMENT", str(exc))
            return EXIT_INPUT
        report = ReportDocument(
            command=args.command,
            tolerances=tol.as_dict(),
            inputs=[d.reference() for d in inputs],
            result=result,
        )
        sys.stdout.write(report.to_json())
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
