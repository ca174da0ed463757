"""Command-line front end: ``polyinv invert|trace|check-keller|oracle|compare``."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import abch
from .abch import Budget, Status
from .oracle import truncated_formal_inverse
from .parser import MapDocument, ParseError, parse_document
from .poly import Poly
from .polymap import SingularLinearPart, degree_data, jacobian_det, normalize

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_NOT_INVERTIBLE = 2
EXIT_BUDGET = 3

_EXIT_FOR = {
    Status.INVERTIBLE: EXIT_OK,
    Status.NOT_INVERTIBLE: EXIT_NOT_INVERTIBLE,
    Status.BUDGET_EXCEEDED: EXIT_BUDGET,
}

SUMMARY_THRESHOLD = 20

INVERT_FIELDS = (
    "status",
    "mode",
    "inverse",
    "m",
    "early_stop",
    "certificate",
    "degrees",
    "term_counts",
    "witness",
    "diagnostics",
    "elapsed_ms",
)


class InputError(Exception):
    pass


def _load(path: str) -> MapDocument:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror or exc}") from exc
    try:
        return parse_document(text)
    except ParseError as exc:
        raise InputError(f"{path}: {exc}") from exc


def _fmt(p: Poly, names) -> str:
    return p.format(names)


def _summary(p: Poly, names) -> str:
    if p.nterms <= SUMMARY_THRESHOLD:
        return _fmt(p, names)
    return f"<{p.nterms} terms, degrees {p.lower_degree()}..{p.degree()}>"


def _budget(args) -> Budget:
    md = None if args.max_degree in (None, "auto") else int(args.max_degree)
    return Budget(max_terms=args.max_terms, max_degree=md)


def _invert_record(doc: MapDocument, out: abch.InversionOutcome) -> dict:
    names = doc.names
    n = len(names)
    return {
        "status": out.status.value,
        "mode": out.mode,
        "inverse": None if out.inverse is None else [_fmt(g, names) for g in out.inverse],
        "m": [c.m for c in out.certificate] if out.certificate else None,
        "early_stop": [c.early_stop for c in out.certificate] if out.certificate else None,
        "certificate": [c.as_dict() for c in out.certificate],
        "degrees": None if out.degrees is None else out.degrees.as_dict(),
        "term_counts": out.diagnostics.get("term_counts", [[] for _ in range(n)]),
        "witness": None
        if out.witness is None
        else {"component": out.witness.component + 1, "difference": _summary(out.witness.difference, names)},
        "diagnostics": {k: v for k, v in out.diagnostics.items() if k not in ("term_counts", "elapsed_ms")},
        "elapsed_ms": out.diagnostics.get("elapsed_ms"),
    }


def cmd_invert(args) -> int:
    doc = _load(args.file)
    names = doc.names
    try:
        out = abch.invert(doc.to_map(), mode=args.mode, budget=_budget(args))
    except SingularLinearPart as exc:
        if args.json:
            record = dict.fromkeys(INVERT_FIELDS)
            record.update(status=Status.NOT_INVERTIBLE.value, mode=args.mode, certificate=[], term_counts=[])
            record["diagnostics"] = {"reason": "singular_linear_part", "message": str(exc)}
            print(json.dumps(record, indent=2))
        else:
            print("status: not invertible")
            print(f"reason: {exc}")
        return EXIT_NOT_INVERTIBLE
    if args.json:
        print(json.dumps(_invert_record(doc, out), indent=2))
        return _EXIT_FOR[out.status]
    lines = [f"status: {out.status.value.replace('_', ' ')}", f"mode: {out.mode}"]
    if out.degrees is not None:
        dd = out.degrees
        lines.append(f"degrees: d={dd.d} D={dd.D} B={dd.B}")
    else:
        lines.append("degrees: affine map")
    for c in out.certificate:
        resid = "verified" if c.residual_verified else ("n/a" if out.mode == "capped" else "failed")
        lines.append(
            f"component {c.component + 1}: m={c.m} steps={c.steps} "
            f"early_stop={'yes' if c.early_stop else 'no'} residual={resid}"
        )
    if out.inverse is not None:
        lines.append("inverse:")
        lines.extend(f"  G{i + 1} = {_fmt(g, names)}" for i, g in enumerate(out.inverse))
    if out.witness is not None:
        lines.append(f"witness: component {out.witness.component + 1}")
        lines.append(f"  difference = {_summary(out.witness.difference, names)}")
    if out.status is Status.BUDGET_EXCEEDED:
        lines.append(f"budget: {out.diagnostics.get('budget')}")
    counts = out.diagnostics.get("term_counts", [])
    for i, cs in enumerate(counts):
        lines.append(f"terms P^{out.traces[i].component + 1}: {cs}")
    print("\n".join(lines))
    return _EXIT_FOR[out.status]


def cmd_trace(args) -> int:
    doc = _load(args.file)
    names = doc.names
    n = len(names)
    if not 1 <= args.component <= n:
        raise InputError(f"component must be between 1 and {n}")
    try:
        N = normalize(doc.to_map())
    except SingularLinearPart as exc:
        raise InputError(str(exc)) from exc
    tr = abch.sequence(N, args.component - 1, args.steps, cap=args.cap, budget=Budget(max_terms=args.max_terms))
    for k, p in enumerate(tr.terms):
        mark = "  (first zero)" if tr.early_stop and k == len(tr.terms) - 1 else ""
        print(f"P_{k} = {_summary(p, names)}{mark}")
    if tr.budget_hit:
        print(f"budget exceeded: {tr.budget_reason}")
        return EXIT_BUDGET
    return EXIT_OK


def cmd_check_keller(args) -> int:
    doc = _load(args.file)
    det = jacobian_det(doc.to_map())
    if det == 1:
        print("Keller: yes")
        return EXIT_OK
    print(f"Keller: no, det = {_fmt(det, doc.names)}")
    return EXIT_NOT_INVERTIBLE


def _oracle_cap(N, cap) -> int:
    if cap is not None:
        return cap
    return 1 if N.is_affine() else degree_data(N).B


def cmd_oracle(args) -> int:
    doc = _load(args.file)
    try:
        N = normalize(doc.to_map())
    except SingularLinearPart as exc:
        raise InputError(str(exc)) from exc
    cap = _oracle_cap(N, args.cap)
    G = truncated_formal_inverse(N, cap)
    print(f"truncated formal inverse of Id + H (degree <= {cap}):")
    for i, g in enumerate(G):
        print(f"  G{i + 1} = {_summary(g, doc.names) if args.summary else _fmt(g, doc.names)}")
    return EXIT_OK


def cmd_compare(args) -> int:
    doc = _load(args.file)
    try:
        out = abch.invert(doc.to_map(), mode=args.mode, budget=_budget(args))
    except SingularLinearPart as exc:
        raise InputError(str(exc)) from exc
    if out.normalized_inverse is None:
        print(f"sequence method: {out.status.value}; nothing to compare")
        return _EXIT_FOR[out.status]
    N = out.normalized
    G_oracle = truncated_formal_inverse(N, _oracle_cap(N, None))
    for i, (a, b) in enumerate(zip(out.normalized_inverse, G_oracle)):
        if a != b:
            print(f"disagree at component {i + 1}")
            print(f"  sequence: {_summary(a, doc.names)}")
            print(f"  oracle:   {_summary(b, doc.names)}")
            return EXIT_NOT_INVERTIBLE
    print(f"agree (sequence method: {out.status.value})")
    return EXIT_OK


def cmd_write_corpus(args) -> int:
    from .corpus import write_corpus

    for path in write_corpus(args.directory):
        print(path)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="polyinv", description="Exact inversion of polynomial maps over Q.")
    sub = ap.add_subparsers(dest="command", required=True)

    def budget_flags(p):
        p.add_argument("--mode", choices=("capped", "residual"), default="capped")
        p.add_argument("--max-terms", type=int, default=abch.DEFAULT_MAX_TERMS)
        p.add_argument("--max-degree", default="auto", help="integer or 'auto' (4*B)")

    p = sub.add_parser("invert", help="decide invertibility and print the inverse")
    p.add_argument("file")
    budget_flags(p)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_invert)

    p = sub.add_parser("trace", help="print the sequence P_0, P_1, ... for one component")
    p.add_argument("file")
    p.add_argument("--component", type=int, required=True, help="one-based component index")
    p.add_argument("--steps", type=int, default=5)
    p.add_argument("--cap", type=int, default=None)
    p.add_argument("--max-terms", type=int, default=abch.DEFAULT_MAX_TERMS)
    p.set_defaults(func=cmd_trace)

    p = sub.add_parser("check-keller", help="test whether the Jacobian determinant is 1")
    p.add_argument("file")
    p.set_defaults(func=cmd_check_keller)

    p = sub.add_parser("oracle", help="print the truncated formal inverse")
    p.add_argument("file")
    p.add_argument("--cap", type=int, default=None, help="degree cap (default B)")
    p.add_argument("--summary", action="store_true", help="abbreviate large polynomials")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("compare", help="cross-check the sequence method against the oracle")
    p.add_argument("file")
    budget_flags(p)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("write-corpus", help="write the example maps as .map files")
    p.add_argument("directory")
    p.set_defaults(func=cmd_write_corpus)
    return ap


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
