"""Jet and matrix-jet arithmetic: exactness, ring laws, calculus identities."""

import random
from fractions import Fraction

import pytest

from iterode import Jet, MatrixJet
from iterode.jets import (
    BasePointMismatchError,
    NonUnitError,
    OrderExhaustedError,
    SingularMatrixError,
    UnsupportedExtensionError,
    rational_sqrt,
)

from helpers import rand_fraction, rand_jet, rand_matrix


def J(*coeffs, order=None, base=0):
    return Jet.of(*coeffs, order=order, base_point=base)


class TestArithmetic:
    def test_difference_of_squares(self):
        a = J(1, 1, order=6)
        b = J(1, -1, order=6)
        assert a * b == J(1, 0, -1, order=6)

    def test_multiplicative_identity(self):
        a = J(2, -1, Fraction(1, 3), order=5)
        assert a * J(1, order=5) == a

    def test_coefficientwise_sum(self):
        assert J(1, 1, 1, order=2) + J(2, -1, order=2) == J(3, 0, 1, order=2)

    def test_order_propagates_as_minimum(self):
        assert (J(1, order=9) + J(1, order=4)).order == 4
        assert (J(1, 1, order=9) * J(1, order=4)).order == 4

    def test_base_point_mismatch_rejected(self):
        with pytest.raises(BasePointMismatchError):
            J(1, order=3) + J(1, order=3, base=1)
        with pytest.raises(BasePointMismatchError):
            J(1, order=3) * J(1, order=3, base=1)

    def test_ring_laws_on_random_inputs(self):
        rng = random.Random(101)
        for _ in range(40):
            a = rand_jet(rng, 8)
            b = rand_jet(rng, 8)
            c = rand_jet(rng, 8)
            assert a * b == b * a
            assert (a * b) * c == a * (b * c)
            assert a * (b + c) == a * b + a * c
            assert (a + b) + c == a + (b + c)

    def test_scalar_mixing(self):
        a = J(1, 2, order=4)
        assert 3 * a == J(3, 6, order=4)
        assert a - 1 == J(0, 2, order=4)
        assert (2 - a) == J(1, -2, order=4)


class TestCalculus:
    def test_derivative_of_square(self):
        assert J(0, 0, 1, order=5).derive() == J(0, 2, order=4)

    def test_derivative_of_constant(self):
        assert J(7, order=3).derive() == J(0, order=2)

    def test_derivative_general(self):
        assert J(1, 2, 3, order=2).derive() == J(2, 6, order=1)

    def test_derivative_order_zero_errors(self):
        with pytest.raises(OrderExhaustedError):
            J(5, order=0).derive()

    def test_integrate(self):
        assert J(1, order=0).integrate() == J(0, 1, order=1)
        assert J(0, 2, order=1).integrate() == J(0, 0, 1, order=2)
        assert J(1, -2, 3, order=2).integrate() == J(0, 1, -1, 1, order=3)

    def test_derive_integrate_roundtrip(self):
        rng = random.Random(5)
        for _ in range(25):
            a = rand_jet(rng, 7)
            assert a.integrate().derive() == a
            recovered = a.derive().integrate()
            assert recovered == (a - a.coeffs[0]).truncate(recovered.order)


class TestInversion:
    def test_geometric_series(self):
        assert J(1, 1, order=5).invert() == J(1, -1, 1, -1, 1, -1, order=5)

    def test_constant(self):
        assert J(2, order=3).invert() == J(Fraction(1, 2), order=3)

    def test_invert_times_self_is_one(self):
        rng = random.Random(11)
        for _ in range(30):
            a = rand_jet(rng, 9, unit=True)
            assert a.invert() * a == J(1, order=9)

    def test_non_unit_rejected(self):
        with pytest.raises(NonUnitError):
            J(0, 1, order=4).invert()


class TestSqrtAndPowers:
    def test_perfect_square(self):
        assert J(1, 2, 1, order=4).sqrt() == J(1, 1, order=4)

    def test_constant_root(self):
        assert J(4, order=3).sqrt() == J(2, order=3)

    def test_sqrt_squares_back(self):
        rng = random.Random(23)
        for _ in range(25):
            b = rand_jet(rng, 8, unit=True)
            square = b * b
            # sqrt returns the branch with positive constant term
            root = square.sqrt()
            assert root * root == square

    def test_irrational_root_rejected(self):
        with pytest.raises(UnsupportedExtensionError):
            J(2, 1, order=4).sqrt()

    def test_nonpositive_rejected(self):
        with pytest.raises(UnsupportedExtensionError):
            J(-1, order=4).sqrt()
        with pytest.raises(UnsupportedExtensionError):
            J(0, 1, order=4).sqrt()

    def test_rational_sqrt_helper(self):
        assert rational_sqrt(Fraction(9, 4)) == Fraction(3, 2)
        with pytest.raises(UnsupportedExtensionError):
            rational_sqrt(Fraction(1, 3))

    def test_power_zero_is_one(self):
        a = J(3, 1, 2, order=6)
        assert a.pow(0) == J(1, order=6)

    def test_three_halves_power(self):
        base = J(1, 2, 1, order=6)
        cube = J(1, 1, order=6).pow(3)
        assert base.pow(Fraction(3, 2)) == cube

    def test_half_powers_cancel(self):
        rng = random.Random(31)
        for _ in range(15):
            b = rand_jet(rng, 8, unit=True)
            a = b * b
            prod = a.pow(Fraction(5, 2)) * a.pow(Fraction(-5, 2))
            assert prod == J(1, order=prod.order)

    def test_quarter_power_rejected(self):
        with pytest.raises(UnsupportedExtensionError):
            J(1, 1, order=4).pow(Fraction(1, 4))


class TestComposition:
    def test_square_after_shift(self):
        outer = J(1, 2, 1, order=4, base=1)  # x^2 expanded at 1
        inner = J(1, 1, order=4)             # 1 + z
        assert outer.compose(inner) == J(1, 2, 1, order=4)

    def test_identity_inner(self):
        a = J(2, -1, 3, order=6)
        assert a.compose(Jet.variable(6)) == a

    def test_evaluation_oracle(self):
        rng = random.Random(47)
        for _ in range(25):
            outer = rand_jet(rng, 12, degree=3)
            inner_tail = [rand_fraction(rng) for _ in range(3)]
            inner = Jet.of(0, *inner_tail, order=12)
            composed = outer.compose(inner)
            t = Fraction(rng.randint(-2, 2), 5)
            # degree 3 o degree 3 stays below order 12, so values match exactly
            assert composed(t) == outer(inner(t))

    def test_base_point_precondition(self):
        with pytest.raises(BasePointMismatchError):
            J(1, 1, order=3).compose(J(1, 1, order=3))

    def test_evaluation(self):
        a = J(1, 2, 3, order=2)
        assert a(Fraction(1, 2)) == Fraction(1) + 1 + Fraction(3, 4)
        assert a.evalf(0.5) == pytest.approx(2.75)


class TestMatrixJets:
    def test_scalar_detection(self):
        M = MatrixJet.from_constant_rows([[3, 0], [0, 3]], order=4)
        part = M.scalar_part()
        assert part is not None and part == Jet.constant(3, 4)

    def test_non_scalar_diagonal(self):
        M = MatrixJet.from_rows([
            [Jet.of(1, order=4), Jet.of(0, order=4)],
            [Jet.of(0, order=4), Jet.of(1, 1, order=4)],
        ])
        assert M.scalar_part() is None
        assert M.first_non_scalar_cell() == (1, 1)

    def test_inverse_roundtrip(self):
        rng = random.Random(59)
        for dim in (2, 3):
            for _ in range(10):
                M = rand_matrix(rng, dim, 8, invertible=True)
                assert (M * M.invert()).agrees(MatrixJet.identity(dim, 8))
                assert (M.invert() * M).agrees(MatrixJet.identity(dim, 8))

    def test_singular_constant_term_rejected(self):
        M = MatrixJet.from_rows([
            [Jet.of(0, 1, order=4), Jet.of(0, order=4)],
            [Jet.of(0, order=4), Jet.of(1, order=4)],
        ])
        with pytest.raises(SingularMatrixError):
            M.invert()

    def test_product_rule(self):
        rng = random.Random(61)
        for _ in range(10):
            A = rand_matrix(rng, 2, 8)
            B = rand_matrix(rng, 2, 8)
            lhs = (A * B).derive()
            rhs = A.derive() * B + A * B.derive()
            assert lhs.agrees(rhs)

    def test_matrix_ring_laws(self):
        rng = random.Random(67)
        for _ in range(8):
            A = rand_matrix(rng, 3, 6)
            B = rand_matrix(rng, 3, 6)
            C = rand_matrix(rng, 3, 6)
            assert ((A * B) * C).agrees(A * (B * C))
            assert (A * (B + C)).agrees(A * B + A * C)

    def test_matvec(self):
        M = MatrixJet.from_constant_rows([[1, 2], [0, 1]], order=3)
        v = (Jet.of(1, 1, order=3), Jet.of(2, order=3))
        out = M.matvec(v)
        assert out[0] == Jet.of(5, 1, order=3)
        assert out[1] == Jet.of(2, order=3)

    def test_mixed_orders_truncate_to_min(self):
        M = MatrixJet.from_rows([
            [Jet.of(1, order=9), Jet.of(0, order=4)],
            [Jet.of(0, order=7), Jet.of(1, order=6)],
        ])
        assert M.order == 4
