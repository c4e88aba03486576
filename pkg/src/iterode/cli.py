"""Command-line client for the engine.

Thin by construction: every subcommand loads JSON documents, hands them to
the same service-layer functions the HTTP endpoints use, and prints the
response either as deterministic JSON (--json) or as a readable text report.

Exit codes: 0 success, 1 domain error (singularity, order exhaustion,
non-canonical input), 2 parse error (malformed document, bad JSON, missing
file).
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

from pydantic import BaseModel, ValidationError

from .jets import AlgebraError, Jet
from .documents import (
    DocumentError,
    GenerateRequest,
    IterateRequest,
    LinearFormReport,
    NormalizeResponse,
    SolveRequest,
    SolveResponse,
    SystemDocument,
    TransformDocument,
    TransformRequest,
    VerdictReport,
    canonical_json,
)
from .service import (
    run_check,
    run_generate,
    run_iterate,
    run_normalize,
    run_solve,
    run_transform,
)


def _load_json(path: str) -> dict:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise DocumentError(f"cannot read {path}: {exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DocumentError(
            f"{path}: invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}"
        ) from exc
    if not isinstance(data, dict):
        raise DocumentError(f"{path}: document root must be an object")
    return data


def _jet_str(coeffs: list[str]) -> str:
    return str(Jet(tuple(Fraction(c) for c in coeffs)))


def _matrix_lines(entries: list[list[list[str]]], indent: str = "  ") -> list[str]:
    lines = []
    for i, row in enumerate(entries):
        for j, cell in enumerate(row):
            lines.append(f"{indent}[{i}][{j}] = {_jet_str(cell)}")
    return lines


def _render_system(doc: SystemDocument) -> str:
    lines = [
        f"monic system of order {doc.order}, dimension {doc.dim}, "
        f"truncation {doc.truncation}, base point {doc.base_point}",
    ]
    for k, mat in enumerate(doc.coefficients, start=1):
        lines.append(f"B_{k} (multiplies y^({doc.order}-{k})):")
        lines.extend(_matrix_lines(mat))
    return "\n".join(lines) + "\n"


def _render_form(rep: LinearFormReport) -> str:
    lines = [f"iterated form of order {rep.order}, dimension {rep.dim}, "
             f"base point {rep.base_point}"]
    for j, block in enumerate(rep.matrices):
        lines.append(f"K_{j} (multiplies y^({rep.order}-{j}), "
                     f"effective order {block.effective_order}):")
        lines.extend(_matrix_lines(block.entries))
    return "\n".join(lines) + "\n"


def _render_normalize(rep: NormalizeResponse) -> str:
    lines = [f"gauge Q (effective order {rep.gauge.effective_order}):"]
    lines.extend(_matrix_lines(rep.gauge.entries))
    lines.append("normal form:")
    lines.append(_render_system(rep.normal_form).rstrip("\n"))
    return "\n".join(lines) + "\n"


def _render_verdict(rep: VerdictReport) -> str:
    status = "yes" if rep.is_canonical_class else "no"
    lines = [f"canonical class: {status} (exact through order {rep.order_checked})"]
    if rep.extracted_q is not None:
        lines.append(f"source q = {_jet_str(rep.extracted_q)}")
    if rep.witness is not None:
        w = rep.witness
        lines.append(
            f"witness: coefficient B_{w.coefficient_index}, entry "
            f"({w.row},{w.col}), {w.witness_kind}: {w.detail}")
    return "\n".join(lines) + "\n"


def _render_solve(rep: SolveResponse) -> str:
    lines = [
        f"general solution of an order-{rep.order}, dimension-{rep.dim} "
        "canonical-class system",
        f"source q = {_jet_str(rep.extracted_q)}",
        f"u = {_jet_str(rep.source_u)}",
        f"v = {_jet_str(rep.source_v)}",
        "superposition basis (solutions are rational combinations; y = Q w):",
    ]
    for j, b in enumerate(rep.basis, start=1):
        lines.append(f"  basis_{j} = {_jet_str(b)}")
    lines.append(f"gauge Q effective order {rep.gauge.effective_order}")
    lines.append(f"residuals vanish through order {rep.residual_order}: "
                 f"{rep.residual_is_zero}")
    lines.append(f"transported solutions solve the input system: "
                 f"{rep.transported_residual_is_zero}")
    lines.append("single-solution formula spans the same space: "
                 f"{rep.single_formula_spans_match}"
                 + ("" if rep.single_formula_spans_match
                    else " (known index-range discrepancy; top power is not a solution)"))
    if rep.numeric_defect is not None:
        lines.append(f"numeric cross-check max defect: {rep.numeric_defect:.3e}")
    return "\n".join(lines) + "\n"


def _emit(model: BaseModel, as_json: bool, renderer) -> None:
    if as_json:
        sys.stdout.write(canonical_json(model))
    else:
        sys.stdout.write(renderer(model))


def cmd_iterate(args: argparse.Namespace) -> int:
    req = IterateRequest.model_validate(_load_json(args.input))
    if args.order is not None:
        req = req.truncated(args.order)
    _emit(run_iterate(req), args.json, _render_form)
    return 0


def cmd_normalize(args: argparse.Namespace) -> int:
    doc = SystemDocument.model_validate(_load_json(args.input))
    if args.order is not None:
        doc = doc.truncated(args.order)
    _emit(run_normalize(doc), args.json, _render_normalize)
    return 0


def cmd_check(args: argparse.Namespace) -> int:
    doc = SystemDocument.model_validate(_load_json(args.input))
    if args.order is not None:
        doc = doc.truncated(args.order)
    _emit(run_check(doc), args.json, _render_verdict)
    return 0


def cmd_transform(args: argparse.Namespace) -> int:
    doc = SystemDocument.model_validate(_load_json(args.input))
    tr = TransformDocument.model_validate(_load_json(args.transform))
    if args.order is not None:
        doc = doc.truncated(args.order)
        tr = tr.truncated(args.order)
    _emit(run_transform(TransformRequest(system=doc, transform=tr)),
          args.json, _render_system)
    return 0


def cmd_solve(args: argparse.Namespace) -> int:
    doc = SystemDocument.model_validate(_load_json(args.input))
    if args.order is not None:
        doc = doc.truncated(args.order)
    req = SolveRequest(system=doc, numeric_check=args.numeric_check)
    _emit(run_solve(req), args.json, _render_solve)
    return 0


def cmd_generate(args: argparse.Namespace) -> int:
    req = GenerateRequest.model_validate(_load_json(args.input))
    if args.order is not None:
        req = req.truncated(args.order)
    _emit(run_generate(req), args.json, _render_system)
    return 0


def cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .service import app

    uvicorn.run(app, host=args.host, port=args.port)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="iterode",
        description="Exact computer algebra for iterative linear ODE systems",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--input", required=True, help="path to the input JSON document")
        p.add_argument("--order", type=int, default=None,
                       help="truncation override for the input documents")
        p.add_argument("--json", action="store_true", help="machine-readable output")

    p = sub.add_parser("iterate", help="iterate a first-order operator n times")
    common(p)
    p.set_defaults(func=cmd_iterate)

    p = sub.add_parser("normalize", help="gauge away the y^(n-1) coefficient")
    common(p)
    p.set_defaults(func=cmd_normalize)

    p = sub.add_parser("check", help="decide canonical-class membership")
    common(p)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("transform", help="apply an equivalence transformation")
    common(p)
    p.add_argument("--transform", required=True,
                   help="path to the transformation JSON document")
    p.set_defaults(func=cmd_transform)

    p = sub.add_parser("solve", help="superposition solution of a canonical-class system")
    common(p)
    p.add_argument("--numeric-check", action="store_true",
                   help="integrate numerically and report the max defect")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("generate", help="build an iterative system from source data")
    common(p)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValidationError, DocumentError) as exc:
        sys.stderr.write(f"parse error: {exc}\n")
        return 2
    except (AlgebraError, ValueError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
