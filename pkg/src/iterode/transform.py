"""Equivalence transformations of monic linear systems.

A point transformation x = f(z), y = T(z) w maps monic systems to monic
systems.  The pushforward rewrites derivatives with the chain rule
D_x = (1/f') D_z, re-expresses coefficients at the new variable by series
composition, and renormalizes the leading coefficient.

The normal-form gauge is the special case f = z with the mixing matrix Q
solving B_1 Q + n Q' = 0; it kills the y^(n-1) coefficient.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .jets import (
    BasePointMismatchError,
    DimensionMismatchError,
    Jet,
    MatrixJet,
    NonUnitError,
    RationalLike,
    rational_matrix_inverse,
)
from .operator import LinearSystem


@dataclass(frozen=True)
class PointTransformation:
    """x = f(z), y = T(z) w.  f'(z0) must be a unit and T invertible at z0."""

    f: Jet
    T: MatrixJet

    def __post_init__(self) -> None:
        if self.f.order < 1 or self.f.coeffs[1] == 0:
            raise NonUnitError("independent-variable map needs f'(z0) != 0")
        rational_matrix_inverse(self.T.constant_matrix())

    @property
    def dim(self) -> int:
        return self.T.dim

    @classmethod
    def identity(cls, dim: int, order: int) -> "PointTransformation":
        return cls(Jet.variable(order), MatrixJet.identity(dim, order))

    @classmethod
    def gauge(cls, T: MatrixJet) -> "PointTransformation":
        """Dependent-variable mixing only (f = z)."""
        return cls(Jet.variable(T.order + 1, T.base_point), T)

    @classmethod
    def normal_form_shape(cls, f: Jet, C: Sequence[Sequence[RationalLike]],
                          n: int) -> "PointTransformation":
        """The normal-form subgroup element x = f(z), y = f'(z)^((n-1)/2) C w,
        with C a constant invertible matrix.

        For even n this takes a series square root of f', so f'(z0) must be
        the square of a rational.
        """
        factor = f.derive().pow(Fraction(n - 1, 2))
        dim = len(C)
        Cmat = MatrixJet.from_constant_rows(C, order=factor.order,
                                            base_point=f.base_point)
        return cls(f, Cmat.scale(factor))

    def then(self, second: "PointTransformation") -> "PointTransformation":
        """Composite transformation equivalent to applying self, then second.

        If self maps x = f1(z), y = T1 w and second maps z = f2(t), w = T2 h,
        then the composite is x = f1(f2(t)), y = (T1 o f2)(t) T2(t) h.
        """
        if self.dim != second.dim:
            raise DimensionMismatchError("composed transformations must share dim")
        return PointTransformation(self.f.compose(second.f),
                                   self.T.compose(second.f) * second.T)


def _derivative_rows(tr: PointTransformation, n: int) -> list[list[MatrixJet]]:
    """rows[k][i] = coefficient of w^(i) in D_x^k y, where y = T(z) w and
    D_x = (1/f') D_z."""
    finv = tr.f.derive().invert()
    rows: list[list[MatrixJet]] = [[tr.T]]
    for k in range(n):
        prev = rows[-1]
        nxt: list[MatrixJet] = []
        for i in range(k + 2):
            acc: MatrixJet | None = None
            if i <= k:
                acc = prev[i].derive()
            if i >= 1:
                acc = prev[i - 1] if acc is None else acc + prev[i - 1]
            assert acc is not None
            nxt.append(acc.scale(finv))
        rows.append(nxt)
    return rows


def pushforward(sys: LinearSystem, tr: PointTransformation) -> LinearSystem:
    """The monic system satisfied by w(z) when y(x) = T(z) w(z), x = f(z)."""
    if tr.dim != sys.dim:
        raise DimensionMismatchError("transformation and system dims differ")
    if tr.f.coeffs[0] != sys.base_point:
        raise BasePointMismatchError(
            f"f(z0) = {tr.f.coeffs[0]} must equal the system base point {sys.base_point}"
        )
    n = sys.order
    rows = _derivative_rows(tr, n)
    total: list[MatrixJet] = list(rows[n])
    for k in range(1, n + 1):
        Bk = sys.coefficient(k).compose(tr.f)
        contrib = rows[n - k]
        for i in range(len(contrib)):
            total[i] = total[i] + Bk * contrib[i]
    lead_inv = total[n].invert()
    return LinearSystem(tuple(lead_inv * total[n - k] for k in range(1, n + 1)))


def _solve_linear_matrix_ode(A: MatrixJet, scale: Fraction) -> MatrixJet:
    """Series solution of Q' = scale * A * Q with Q(z0) = I."""
    m, order = A.dim, A.order
    coeff = [[[A.entries[i][j].coeffs[k] for j in range(m)] for i in range(m)]
             for k in range(order + 1)]
    out = [[[Fraction(1) if i == j else Fraction(0) for j in range(m)] for i in range(m)]]
    for k in range(order + 1):
        acc = [[Fraction(0)] * m for _ in range(m)]
        for j in range(min(k, order) + 1):
            for i in range(m):
                for c in range(m):
                    v = sum(coeff[j][i][t] * out[k - j][t][c] for t in range(m))
                    acc[i][c] += v
        out.append([[scale * acc[i][c] / (k + 1) for c in range(m)] for i in range(m)])
    rows = [[Jet(tuple(out[k][i][j] for k in range(len(out))), A.base_point)
             for j in range(m)] for i in range(m)]
    return MatrixJet.from_rows(rows)


def normal_form_gauge(sys: LinearSystem) -> tuple[MatrixJet, LinearSystem]:
    """Gauge Q with B_1 Q + n Q' = 0, Q(z0) = I, and the resulting normal form.

    The returned system has a vanishing y^(n-1) coefficient through its
    tracked order.
    """
    n = sys.order
    if sys.coefficient(1).is_zero():
        # the gauge is exactly the identity; skip the pushforward and keep
        # the full tracked order
        return MatrixJet.identity(sys.dim, sys.min_order(), sys.base_point), sys
    Q = _solve_linear_matrix_ode(sys.coefficient(1), Fraction(-1, n))
    nf = pushforward(sys, PointTransformation.gauge(Q))
    return Q, nf


def scalar_normal_gauge(sys: LinearSystem) -> tuple[Jet, LinearSystem]:
    """m = 1 specialization of normal_form_gauge."""
    if sys.dim != 1:
        raise DimensionMismatchError("scalar gauge needs a one-dimensional system")
    Q, nf = normal_form_gauge(sys)
    return Q.entries[0][0], nf
