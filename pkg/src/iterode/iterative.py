"""Iterative equations in normal form and their commuting matrix families.

Every n-th order iterative equation in normal form is determined by the
single scalar q from the second-order source equation y'' + q y = 0: take
any nonzero solution u, set r = u^2 and s = -(n-1) r'/2, iterate
Psi = r d/dx + s, and divide by r^n.  The map

    A(xi) = (1/4) xi^-2 (xi'^2 - 2 xi xi'')

recovers q from r (A(u^2) = -u''/u = q) and extends literally to matrix
arguments, with the factors kept in the left-to-right order written above;
the ordering is immaterial on the commuting families built here.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb
from typing import Sequence

from .jets import (
    AlgebraError,
    DimensionMismatchError,
    Jet,
    MatrixJet,
    NonUnitError,
    RationalLike,
    rat,
    rational_matrix_inverse,
)
from .operator import DiffOperator, LinearSystem, iterate, monicize


class NonCommutingError(AlgebraError):
    """R does not commute with R', so the normal-form operator is undefined."""


def source_solution(q: Jet, value: RationalLike, slope: RationalLike) -> Jet:
    """Series solution of y'' + q y = 0 with y(b) = value, y'(b) = slope.

    The two-term recursion determines coefficients through order q.order + 2.
    """
    c = [rat(value), rat(slope)]
    for k in range(q.order + 1):
        conv = sum((q.coeffs[j] * c[k - j] for j in range(k + 1)), Fraction(0))
        c.append(-conv / ((k + 1) * (k + 2)))
    return Jet(tuple(c), q.base_point)


def A_map(xi: Jet | MatrixJet) -> Jet | MatrixJet:
    """(1/4) xi^-2 (xi'^2 - 2 xi xi''), for a jet or a matrix jet."""
    d1 = xi.derive()
    d2 = d1.derive()
    inv = xi.invert()
    return Fraction(1, 4) * ((inv * inv) * (d1 * d1 - 2 * (xi * d2)))


def psi_nor(R: MatrixJet, n: int) -> DiffOperator:
    """The normal-form iteration operator R d/dx - (n-1)/2 R'.

    Only defined when R commutes with R' (through the tracked order); for
    non-commuting R the cancellation of the second-highest coefficient
    underlying the construction breaks down, so such input is rejected.
    """
    Rp = R.derive()
    if not R.truncate(Rp.order).commutes_with(Rp):
        raise NonCommutingError("R must commute with R' for the normal-form operator")
    return DiffOperator(R, Rp.scale(Fraction(-(n - 1), 2)))


def build_iterative_normal(n: int, q: Jet, m: int = 1) -> LinearSystem:
    """The isotropic n-th order iterative system in normal form with source q.

    Scalar construction: u solves y'' + q y = 0 with u(0) = 1, u'(0) = 0,
    r = u^2, s = -(n-1) r'/2; iterate and monicize.  For m > 1 every scalar
    coefficient is tensored with the identity.
    """
    if n < 1:
        raise ValueError("order must be at least 1")
    if m < 1:
        raise ValueError("dimension must be at least 1")
    u = source_solution(q, 1, 0)
    scalar_sys = iterative_from_r(n, u * u)
    if m == 1:
        return scalar_sys
    return LinearSystem(tuple(
        MatrixJet.scalar_multiple(M.entries[0][0], m) for M in scalar_sys.B))


def iterative_from_r(n: int, r: Jet) -> LinearSystem:
    """Monic normal-form iterative equation from the parameter r directly."""
    s = r.derive() * Fraction(-(n - 1), 2)
    psi = DiffOperator.scalar(r, s)
    return monicize(iterate(psi, n))


def check_an2(n: int, q: Jet) -> bool:
    """True iff the generated y^(n-2) coefficient equals C(n+1,3) * q."""
    if n < 2:
        raise ValueError("the y^(n-2) coefficient needs order at least 2")
    sys = build_iterative_normal(n, q, 1)
    a2 = sys.coefficient(2).entries[0][0]
    expected = q.truncate(min(q.order, a2.order)) * comb(n + 1, 3)
    return sys.coefficient(1).entries[0][0].is_zero() and a2.agrees(expected)


@dataclass(frozen=True)
class CommutingFamily2x2:
    """Parameters of the general 2x2 matrix commuting with its derivative:

        R = [[a1, l1*a2], [l2*a2, a1 + l3*a2]].
    """

    lambda1: Fraction
    lambda2: Fraction
    lambda3: Fraction
    a1: Jet
    a2: Jet

    @classmethod
    def of(cls, lambda1: RationalLike, lambda2: RationalLike,
           lambda3: RationalLike, a1: Jet, a2: Jet) -> "CommutingFamily2x2":
        return cls(rat(lambda1), rat(lambda2), rat(lambda3), a1, a2)


def family_aa2(params: CommutingFamily2x2) -> MatrixJet:
    """Assemble the commuting-family matrix from its parameters."""
    a1, a2 = params.a1, params.a2
    return MatrixJet.from_rows([
        [a1, a2 * params.lambda1],
        [a2 * params.lambda2, a1 + a2 * params.lambda3],
    ])


def family_diag(q: Jet, inits: Sequence[tuple[RationalLike, RationalLike]]) -> MatrixJet:
    """diag(u_1^2, ..., u_m^2) with every u_i a source-equation solution.

    Each u_i must be a unit at the base point so the matrix stays invertible.
    """
    us = [source_solution(q, v, s) for v, s in inits]
    for i, u in enumerate(us):
        if u.coeffs[0] == 0:
            raise NonUnitError(f"solution {i} vanishes at the base point")
    m = len(us)
    zero = Jet.constant(0, us[0].order, q.base_point)
    return MatrixJet.from_rows([
        [us[i] * us[i] if i == j else zero for j in range(m)] for i in range(m)])


def family_scaled(q: Jet, k_rows: Sequence[Sequence[RationalLike]],
                  init: tuple[RationalLike, RationalLike] = (1, 0)) -> MatrixJet:
    """u^2 * K for a constant matrix K and a source-equation solution u.

    K must be invertible, otherwise the generated operator would have a
    singular leading matrix.
    """
    rows = [[rat(v) for v in row] for row in k_rows]
    rational_matrix_inverse(rows)
    u = source_solution(q, *init)
    if u.coeffs[0] == 0:
        raise NonUnitError("scaling solution vanishes at the base point")
    r = u * u
    return MatrixJet.from_rows([
        [r * v for v in row] for row in rows])


def A_entries_2x2(R: MatrixJet) -> MatrixJet:
    """Closed-form entries of A(R) for a 2x2 commuting-family matrix.

    With R = [[alpha, beta], [gamma, delta]], each entry a_ij is the
    polynomial below divided by 4 (beta gamma - alpha delta)^2; the
    determinant factor must be a unit at the base point.
    """
    if R.dim != 2:
        raise DimensionMismatchError("closed-form entries are for dimension 2")
    al, be = R.entries[0][0], R.entries[0][1]
    ga, de = R.entries[1][0], R.entries[1][1]
    alp, bep, gap, dep = al.derive(), be.derive(), ga.derive(), de.derive()
    alpp, bepp, gapp, depp = alp.derive(), bep.derive(), gap.derive(), dep.derive()
    order = alpp.order
    al, be, ga, de = (j.truncate(order) for j in (al, be, ga, de))
    alp, bep, gap, dep = (j.truncate(order) for j in (alp, bep, gap, dep))

    a11_hat = (de * de * (alp * alp + bep * gap - 2 * (al * alpp))
               - 2 * (be * be * (ga * gapp))
               + be * (-(de * (gap * (alp + dep)))
                       + ga * (alp * alp + bep * gap + 2 * (de * alpp))
                       - al * (alp * gap + gap * dep - 2 * (de * gapp))))
    a12_hat = (de * de * (alp * bep + bep * dep - 2 * (al * bepp))
               - 2 * (be * be * (ga * depp))
               + be * (-(de * (bep * gap + dep * dep))
                       + ga * (alp * bep + bep * dep + 2 * (de * bepp))
                       - al * (bep * gap + dep * dep - 2 * (de * depp))))
    a21_hat = (ga * (-(de * (alp * alp + bep * gap))
                     + be * (alp * gap + gap * dep - 2 * (ga * alpp)))
               - al * ga * (alp * alp + bep * gap - 2 * (de * alpp) - 2 * (be * gapp))
               + al * al * (alp * gap + gap * dep - 2 * (de * gapp)))
    a22_hat = (ga * (-(de * (bep * (alp + dep)))
                     + be * (bep * gap + dep * dep - 2 * (ga * bepp)))
               - al * ga * (alp * bep + bep * dep - 2 * (de * bepp) - 2 * (be * depp))
               + al * al * (bep * gap + dep * dep - 2 * (de * depp)))

    det = be * ga - al * de
    scale = (4 * (det * det)).invert()
    return MatrixJet.from_rows([
        [a11_hat * scale, a12_hat * scale],
        [a21_hat * scale, a22_hat * scale],
    ])
