"""Canonical-class decision procedure: round trips, witnesses, invariance."""

import random
from fractions import Fraction
from math import comb

import pytest

from iterode import (
    Jet,
    LinearSystem,
    MatrixJet,
    NotInCanonicalClassError,
    build_iterative_normal,
    canonical_class_test,
    normal_form_gauge,
    pushforward,
    uncouple,
)
from iterode.transform import PointTransformation

from helpers import (
    build_canonical_instance as _build_with_tr,
    perturb_one_coefficient,
    rand_transformation,
    rand_variable_map,
)

N = 16


def build_canonical_instance(rng, n, dim, order=N):
    sys, _ = _build_with_tr(rng, n, dim, order)
    return sys


class TestVerdicts:
    def test_canonical_form_itself(self):
        for n, dim in ((2, 1), (3, 2), (4, 3)):
            v = canonical_class_test(LinearSystem.canonical(n, dim, N))
            assert v.is_canonical_class
            assert v.extracted_q is not None and v.extracted_q.is_zero()
            assert v.gauge is not None and v.gauge.agrees(MatrixJet.identity(dim, 1))

    def test_round_trip_with_scalar_oracle(self):
        rng = random.Random(3)
        for _ in range(5):
            f = rand_variable_map(rng, N)
            C = [[Fraction(1), Fraction(1)], [Fraction(0), Fraction(1)]]
            tr = PointTransformation.normal_form_shape(f, C, 3)
            built = pushforward(LinearSystem.canonical(3, 2, N), tr)
            v = canonical_class_test(built)
            assert v.is_canonical_class
            # the scalar pushforward of y''' = 0 exposes the same q via its
            # second coefficient divided by C(4,3)
            scalar_tr = PointTransformation.normal_form_shape(f, [[1]], 3)
            scalar = pushforward(LinearSystem.canonical(3, 1, N), scalar_tr)
            expected_q = scalar.coefficient(2).entries[0][0] / comb(4, 3)
            assert v.extracted_q is not None
            assert v.extracted_q.agrees(expected_q)

    def test_non_scalar_coefficient_detected(self):
        # w'' + diag(1, 1+z) w = 0 fails at the second coefficient
        B2 = MatrixJet.from_rows([
            [Jet.constant(1, N), Jet.constant(0, N)],
            [Jet.constant(0, N), Jet.of(1, 1, order=N)],
        ])
        sys = LinearSystem((MatrixJet.zero(2, N), B2))
        v = canonical_class_test(sys)
        assert not v.is_canonical_class
        assert v.witness is not None
        assert v.witness.coefficient_index == 2
        assert (v.witness.row, v.witness.col) == (1, 1)
        assert v.witness.kind == "non_scalar"

    def test_isotropic_but_not_iterative_detected(self):
        # w''' + q2 w' + q3 w with unrelated q2, q3 is isotropic yet fails the
        # template comparison
        q2 = Jet.of(4, order=N)
        q3 = Jet.of(0, 5, order=N)  # the iterative template would need q3 = q2'/2 = 0
        sys = LinearSystem.scalar((Jet.constant(0, N), q2, q3))
        v = canonical_class_test(sys)
        assert not v.is_canonical_class
        assert v.witness is not None
        assert v.witness.kind == "coefficient_mismatch"
        assert v.witness.coefficient_index == 3

    def test_round_trips_all_true(self):
        rng = random.Random(7)
        cases = [(2, 2), (2, 3), (3, 2), (3, 3), (4, 2)]
        for n, dim in cases:
            built = build_canonical_instance(rng, n, dim)
            v = canonical_class_test(built)
            assert v.is_canonical_class, (n, dim)
            assert v.order_checked >= N - 2 * n

    def test_perturbations_all_false(self):
        rng = random.Random(11)
        cases = [(2, 2), (3, 2), (3, 3), (4, 2)]
        for n, dim in cases:
            built = build_canonical_instance(rng, n, dim)
            bad = perturb_one_coefficient(rng, built)
            v = canonical_class_test(bad)
            assert not v.is_canonical_class, (n, dim)
            assert v.witness is not None
            # the witness points at a genuine defect of the normal form
            _, nf = normal_form_gauge(bad)
            M = nf.coefficient(v.witness.coefficient_index)
            if v.witness.kind == "non_scalar":
                assert M.first_non_scalar_cell() == (v.witness.row, v.witness.col)
            else:
                part = M.scalar_part()
                assert part is not None

    def test_verdict_invariant_under_equivalence(self):
        rng = random.Random(13)
        for n, dim, expect in ((2, 2, True), (3, 2, True)):
            sys = build_canonical_instance(rng, n, dim)
            tr = rand_transformation(rng, dim, N)
            moved = pushforward(sys, tr)
            assert canonical_class_test(moved).is_canonical_class == expect
        # and a negative stays negative
        B2 = MatrixJet.from_rows([
            [Jet.constant(1, N), Jet.constant(0, N)],
            [Jet.constant(0, N), Jet.of(1, 1, order=N)],
        ])
        bad = LinearSystem((MatrixJet.zero(2, N), B2))
        tr = rand_transformation(rng, 2, N)
        assert not canonical_class_test(pushforward(bad, tr)).is_canonical_class

    def test_normal_form_depends_only_on_q(self):
        rng = random.Random(17)
        built = build_canonical_instance(rng, 3, 2)
        v = canonical_class_test(built)
        assert v.is_canonical_class and v.extracted_q is not None
        _, nf = normal_form_gauge(built)
        template = build_iterative_normal(3, v.extracted_q, 2)
        assert nf.agrees(template)

    def test_order_one_rejected(self):
        sys = LinearSystem.scalar((Jet.of(1, 1, order=8),))
        with pytest.raises(ValueError):
            canonical_class_test(sys)


class TestUncouple:
    def test_isotropic_normal_form_needs_no_gauge(self):
        q = Jet.of(1, -2, order=N)
        sys = build_iterative_normal(3, q, 2)
        P, eqs = uncouple(sys)
        assert P.agrees(MatrixJet.identity(2, 1))
        assert len(eqs) == 2
        assert eqs[0].agrees(eqs[1])
        assert eqs[0].coefficient(2).entries[0][0].agrees(4 * q)

    def test_zero_source_components(self):
        sys = LinearSystem.canonical(3, 2, N)
        _, eqs = uncouple(sys)
        for eq in eqs:
            for k in range(1, 4):
                assert eq.coefficient(k).is_zero()

    def test_round_trip_components_identical(self):
        rng = random.Random(19)
        built = build_canonical_instance(rng, 2, 2)
        P, eqs = uncouple(built)
        assert len(eqs) == 2
        assert eqs[0].agrees(eqs[1])
        # the gauge really produces the claimed uncoupled equations
        nf = pushforward(built, PointTransformation.gauge(P))
        iso = nf.isotropic_scalar()
        assert iso is not None
        assert iso.agrees(eqs[0])

    def test_rejects_non_canonical_input(self):
        B2 = MatrixJet.from_rows([
            [Jet.constant(1, N), Jet.constant(0, N)],
            [Jet.constant(0, N), Jet.of(1, 1, order=N)],
        ])
        sys = LinearSystem((MatrixJet.zero(2, N), B2))
        with pytest.raises(NotInCanonicalClassError):
            uncouple(sys)
