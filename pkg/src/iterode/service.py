"""Service layer: document-in, document-out wrappers over the engine.

Each run_* function is pure and deterministic; the FastAPI app exposes them
as POST endpoints with pydantic validation on the wire.  Domain errors
(singular matrices, exhausted orders, non-canonical input) map to HTTP 400;
malformed documents are rejected by validation with the usual 422.
"""

from __future__ import annotations

from fractions import Fraction

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .jets import AlgebraError, BasePointMismatchError, Jet, MatrixJet
from .operator import LinearSystem, iterate
from .transform import PointTransformation, normal_form_gauge, pushforward
from .iterative import build_iterative_normal, iterative_from_r
from .canonical import canonical_class_test
from .solutions import (
    numeric_crosscheck,
    residual,
    single_solution_basis,
    solution_basis,
    span_report,
)
from .documents import (
    GenerateRequest,
    IterateRequest,
    LinearFormReport,
    MatrixBlock,
    NormalizeResponse,
    SolveRequest,
    SolveResponse,
    SystemDocument,
    TransformRequest,
    VerdictReport,
    WitnessReport,
    emit_jet,
    parse_rational,
)


def run_iterate(req: IterateRequest) -> LinearFormReport:
    psi = req.operator.to_operator()
    form = iterate(psi, req.times)
    return LinearFormReport(
        order=form.n,
        dim=form.dim,
        base_point=req.operator.base_point,
        matrices=[MatrixBlock.from_matrix(M) for M in form.K],
    )


def run_normalize(doc: SystemDocument) -> NormalizeResponse:
    Q, nf = normal_form_gauge(doc.to_system())
    return NormalizeResponse(
        gauge=MatrixBlock.from_matrix(Q),
        normal_form=SystemDocument.from_system(nf, base_point=doc.base_point),
    )


def run_check(doc: SystemDocument) -> VerdictReport:
    verdict = canonical_class_test(doc.to_system())
    return VerdictReport(
        is_canonical_class=verdict.is_canonical_class,
        order_checked=verdict.order_checked,
        extracted_q=emit_jet(verdict.extracted_q) if verdict.extracted_q else None,
        gauge=MatrixBlock.from_matrix(verdict.gauge) if verdict.gauge else None,
        witness=WitnessReport(
            coefficient_index=verdict.witness.coefficient_index,
            row=verdict.witness.row,
            col=verdict.witness.col,
            witness_kind=verdict.witness.kind,
            detail=verdict.witness.detail,
        ) if verdict.witness else None,
    )


def run_transform(req: TransformRequest) -> SystemDocument:
    sys = req.system.to_system()
    tr = req.transform.to_transformation(req.system.truncation)
    x0 = parse_rational(req.system.base_point)
    if tr.f.coeffs[0] != x0:
        raise BasePointMismatchError(
            f"variable_map takes the value {tr.f.coeffs[0]} at the transform base "
            f"point but the system lives at {req.system.base_point}")
    # the engine computes in charts shifted to 0 on both sides
    engine_tr = PointTransformation(tr.f - x0, tr.T) if x0 != 0 else tr
    pushed = pushforward(sys, engine_tr)
    return SystemDocument.from_system(pushed, base_point=req.transform.base_point)


def run_solve(req: SolveRequest) -> SolveResponse:
    sys = req.system.to_system()
    verdict = canonical_class_test(sys)
    if not verdict.is_canonical_class:
        from .canonical import NotInCanonicalClassError

        raise NotInCanonicalClassError(
            f"system is not in the canonical class (witness: {verdict.witness})")
    assert verdict.extracted_q is not None and verdict.gauge is not None
    n, m = sys.order, sys.dim
    q = verdict.extracted_q
    basis = solution_basis(q, n, m)

    scalar_template = build_iterative_normal(n, q, 1)
    residuals = [residual(scalar_template, [b]) for b in basis.basis]
    residual_ok = all(r.is_zero() for r in residuals)
    residual_order = min(r.order for r in residuals)

    # transported solutions: y = Q w solves the original system
    cycle = tuple(basis.basis[i % n] for i in range(m))
    transported = verdict.gauge.matvec(cycle)
    transported_ok = residual(sys, transported).is_zero()

    spans = span_report(basis.basis, single_solution_basis(basis.u, n))

    defect: float | None = None
    if req.numeric_check:
        template_m = build_iterative_normal(n, q, m)
        end = float(parse_rational(req.numeric_end))
        defect = numeric_crosscheck(template_m, cycle, (0.0, end), req.numeric_steps)

    return SolveResponse(
        order=n,
        dim=m,
        extracted_q=emit_jet(q),
        gauge=MatrixBlock.from_matrix(verdict.gauge),
        source_u=emit_jet(basis.u),
        source_v=emit_jet(basis.v),
        basis=[emit_jet(b) for b in basis.basis],
        residual_is_zero=residual_ok,
        residual_order=residual_order,
        transported_residual_is_zero=transported_ok,
        single_formula_spans_match=spans.spans_equal,
        numeric_defect=defect,
    )


def run_generate(req: GenerateRequest) -> SystemDocument:
    N = req.truncation
    if req.source_q is not None:
        coeffs = [parse_rational(v) for v in req.source_q]
        coeffs += [Fraction(0)] * (N + 1 - len(coeffs))
        q = Jet(tuple(coeffs))
        sys = build_iterative_normal(req.order, q, req.dim)
    else:
        assert req.source_r is not None
        coeffs = [parse_rational(v) for v in req.source_r]
        coeffs += [Fraction(0)] * (N + 1 - len(coeffs))
        scalar = iterative_from_r(req.order, Jet(tuple(coeffs)))
        if req.dim == 1:
            sys = scalar
        else:
            sys = LinearSystem(tuple(
                MatrixJet.scalar_multiple(M.entries[0][0], req.dim)
                for M in scalar.B))
    return SystemDocument.from_system(sys, base_point=req.base_point)


def create_app() -> FastAPI:
    app = FastAPI(
        title="iterode",
        description="Exact computer-algebra service for iterative linear ODE systems",
        version="0.1.0",
    )

    @app.exception_handler(AlgebraError)
    async def _domain_error(_: Request, exc: AlgebraError) -> JSONResponse:
        return JSONResponse(
            status_code=400,
            content={"error": str(exc), "error_kind": type(exc).__name__},
        )

    @app.exception_handler(ValueError)
    async def _value_error(_: Request, exc: ValueError) -> JSONResponse:
        return JSONResponse(
            status_code=400,
            content={"error": str(exc), "error_kind": type(exc).__name__},
        )

    @app.get("/health")
    def health() -> dict:
        return {"status": "ok"}

    @app.post("/iterate", response_model=LinearFormReport)
    def _iterate(req: IterateRequest) -> LinearFormReport:
        return run_iterate(req)

    @app.post("/normalize", response_model=NormalizeResponse)
    def _normalize(doc: SystemDocument) -> NormalizeResponse:
        return run_normalize(doc)

    @app.post("/check", response_model=VerdictReport)
    def _check(doc: SystemDocument) -> VerdictReport:
        return run_check(doc)

    @app.post("/transform", response_model=SystemDocument)
    def _transform(req: TransformRequest) -> SystemDocument:
        return run_transform(req)

    @app.post("/solve", response_model=SolveResponse)
    def _solve(req: SolveRequest) -> SolveResponse:
        return run_solve(req)

    @app.post("/generate", response_model=SystemDocument)
    def _generate(req: GenerateRequest) -> SystemDocument:
        return run_generate(req)

    return app


app = create_app()
