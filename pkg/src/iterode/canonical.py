"""Decision procedure for the canonical class.

A monic linear system is reducible by an invertible point transformation to
y^(n) = 0 exactly when its normal form is isotropic (every coefficient a
scalar matrix) and the scalar coefficients are those of the iterative
equation generated by the source q read off the y^(n-2) coefficient.  The
verdict is decided exactly through the tracked truncation order, which the
result reports.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb

from .jets import AlgebraError, Jet, MatrixJet
from .operator import LinearSystem
from .transform import normal_form_gauge
from .iterative import build_iterative_normal


class NotInCanonicalClassError(AlgebraError):
    """Raised when an operation requires canonical-class input."""


@dataclass(frozen=True)
class Witness:
    """First failing coefficient of a negative verdict.

    coefficient_index is the k of B_k in the normal form; (row, col) is the
    lexicographically first offending entry.  kind is "non_scalar" when the
    matrix is not a scalar multiple of the identity, "coefficient_mismatch"
    when the scalar disagrees with the iterative template.
    """

    coefficient_index: int
    row: int
    col: int
    kind: str
    detail: str = ""


@dataclass(frozen=True)
class CanonicalVerdict:
    is_canonical_class: bool
    order_checked: int
    gauge: MatrixJet | None = None
    extracted_q: Jet | None = None
    witness: Witness | None = None

    def __post_init__(self) -> None:
        if self.is_canonical_class and (self.gauge is None or self.extracted_q is None):
            raise ValueError("a positive verdict carries its gauge and source q")


def canonical_class_test(sys: LinearSystem) -> CanonicalVerdict:
    """Decide canonical-class membership through the tracked order.

    Reduce to normal form, test every coefficient for scalar shape, extract
    q from the y^(n-2) coefficient, and compare against the iterative
    template built from that q.
    """
    n = sys.order
    if n < 2:
        raise ValueError("order-1 systems are all trivially equivalent to y' = 0")
    Q, nf = normal_form_gauge(sys)

    scalars: list[Jet] = []
    for k in range(2, n + 1):
        M = nf.coefficient(k)
        part = M.scalar_part()
        if part is None:
            cell = M.first_non_scalar_cell()
            assert cell is not None
            return CanonicalVerdict(
                is_canonical_class=False,
                order_checked=M.order,
                witness=Witness(k, cell[0], cell[1], "non_scalar",
                                "coefficient is not a scalar matrix"),
            )
        scalars.append(part)

    q = scalars[0] / comb(n + 1, 3)
    template = build_iterative_normal(n, q, 1)
    order_checked = min(
        min(s.order for s in scalars),
        min(template.coefficient(k).order for k in range(2, n + 1)),
    )
    for k in range(2, n + 1):
        expected = template.coefficient(k).entries[0][0]
        if not scalars[k - 2].agrees(expected):
            return CanonicalVerdict(
                is_canonical_class=False,
                order_checked=order_checked,
                witness=Witness(k, 0, 0, "coefficient_mismatch",
                                "scalar coefficient differs from the iterative "
                                f"equation generated by q at index {k}"),
            )
    return CanonicalVerdict(
        is_canonical_class=True,
        order_checked=order_checked,
        gauge=Q,
        extracted_q=q.truncate(order_checked) if q.order > order_checked else q,
    )


def uncouple(sys: LinearSystem,
             verdict: CanonicalVerdict | None = None
             ) -> tuple[MatrixJet, list[LinearSystem]]:
    """Gauge a canonical-class system to m identical scalar iterative equations.

    Returns the mixing matrix P (the normal-form gauge, which is scalar
    whenever the y^(n-1) coefficient is) and the m copies of the scalar
    normal-form iterative equation they all satisfy.
    """
    if verdict is None:
        verdict = canonical_class_test(sys)
    if not verdict.is_canonical_class:
        raise NotInCanonicalClassError(
            "cannot uncouple: system is not in the canonical class "
            f"(witness: {verdict.witness})"
        )
    assert verdict.gauge is not None and verdict.extracted_q is not None
    scalar_eq = build_iterative_normal(sys.order, verdict.extracted_q, 1)
    return verdict.gauge, [scalar_eq] * sys.dim
