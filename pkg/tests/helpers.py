"""Seeded random generators shared by the test suites."""

from __future__ import annotations

import random
from fractions import Fraction

from iterode import DiffOperator, Jet, LinearSystem, MatrixJet
from iterode.jets import SingularMatrixError, rational_matrix_inverse
from iterode.transform import PointTransformation


def rand_fraction(rng: random.Random, span: int = 3, max_den: int = 2,
                  nonzero: bool = False) -> Fraction:
    while True:
        v = Fraction(rng.randint(-span, span), rng.randint(1, max_den))
        if not nonzero or v != 0:
            return v


def rand_jet(rng: random.Random, order: int, degree: int = 3,
             unit: bool = False) -> Jet:
    coeffs = [rand_fraction(rng) for _ in range(min(degree, order) + 1)]
    if unit and coeffs[0] == 0:
        coeffs[0] = Fraction(rng.choice([1, -1, 2]))
    return Jet.of(*coeffs, order=order)


def rand_matrix(rng: random.Random, dim: int, order: int, degree: int = 3,
                invertible: bool = False) -> MatrixJet:
    while True:
        M = MatrixJet.from_rows(
            [[rand_jet(rng, order, degree) for _ in range(dim)] for _ in range(dim)])
        if not invertible:
            return M
        try:
            rational_matrix_inverse(M.constant_matrix())
            return M
        except SingularMatrixError:
            continue


def rand_operator(rng: random.Random, dim: int, order: int,
                  degree: int = 3) -> DiffOperator:
    return DiffOperator(rand_matrix(rng, dim, order, degree, invertible=True),
                        rand_matrix(rng, dim, order, degree))


def rand_constant_invertible(rng: random.Random, dim: int) -> list[list[Fraction]]:
    while True:
        rows = [[rand_fraction(rng) for _ in range(dim)] for _ in range(dim)]
        try:
            rational_matrix_inverse(rows)
            return rows
        except SingularMatrixError:
            continue


def rand_variable_map(rng: random.Random, order: int, degree: int = 3,
                      square_slope: bool = False) -> Jet:
    """Random f with f(0) = 0 and f'(0) != 0; square_slope forces f'(0) to be
    a perfect square so half-integer powers stay rational."""
    slope = Fraction(rng.choice([1, 4, Fraction(9, 4)])) if square_slope \
        else rand_fraction(rng, nonzero=True)
    tail = [rand_fraction(rng) for _ in range(degree - 1)]
    return Jet.of(0, slope, *tail, order=order)


def rand_transformation(rng: random.Random, dim: int, order: int,
                        degree: int = 3,
                        square_slope: bool = False) -> PointTransformation:
    return PointTransformation(
        rand_variable_map(rng, order, degree, square_slope),
        rand_matrix(rng, dim, order, degree, invertible=True))


def rand_normal_form_transformation(rng: random.Random, dim: int, n: int,
                                    order: int, degree: int = 3) -> PointTransformation:
    return PointTransformation.normal_form_shape(
        rand_variable_map(rng, order, degree, square_slope=(n % 2 == 0)),
        rand_constant_invertible(rng, dim), n)


def build_canonical_instance(rng: random.Random, n: int, dim: int,
                             order: int = 16):
    """Transform y^(n) = 0 by a composite equivalence transformation; returns
    (system, composite_transformation)."""
    from iterode import LinearSystem
    from iterode.transform import pushforward

    tr = rand_normal_form_transformation(rng, dim, n, order)
    tr = tr.then(rand_transformation(rng, dim, order, square_slope=(n % 2 == 0)))
    return pushforward(LinearSystem.canonical(n, dim, order), tr), tr


def perturb_one_coefficient(rng: random.Random, sys, max_power: int = 4):
    """Add a nonzero rational to a single Taylor coefficient of one entry."""
    from iterode import LinearSystem

    k = rng.randrange(1, sys.order + 1)
    i = rng.randrange(sys.dim)
    j = rng.randrange(sys.dim)
    p = rng.randrange(0, max_power + 1)
    delta = rand_fraction(rng, nonzero=True)
    mats = list(sys.B)
    entry = mats[k - 1].entries[i][j]
    coeffs = list(entry.coeffs)
    coeffs[p] += delta
    rows = [list(row) for row in mats[k - 1].entries]
    rows[i][j] = Jet(tuple(coeffs), entry.base_point)
    mats[k - 1] = MatrixJet.from_rows(rows)
    return LinearSystem(tuple(mats))
