"""General solutions of canonical-class systems by superposition.

Two independent solutions u, v of the source equation y'' + q y = 0 span
every solution of the n-th order iterative system through the products
u^(n-j) v^(j-1).  A single nonzero solution u also suffices, via powers of
the antiderivative of 1/u^2.  Solutions are verified by exact residual
substitution, with an optional floating-point integration cross-check.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import factorial
from typing import Sequence

from .jets import (
    DimensionMismatchError,
    Jet,
    NonUnitError,
    RationalLike,
    rat,
)
from .operator import LinearSystem
from .iterative import source_solution


def source_solutions(q: Jet) -> tuple[Jet, Jet]:
    """The normalized solution pair: u(0) = 1, u'(0) = 0 and v(0) = 0, v'(0) = 1."""
    return source_solution(q, 1, 0), source_solution(q, 0, 1)


def wronskian(u: Jet, v: Jet) -> Jet:
    return u * v.derive() - u.derive() * v


@dataclass(frozen=True)
class SolutionBasis:
    """The n products u^(n-j) v^(j-1), j = 1..n, for an m-component system."""

    n: int
    m: int
    u: Jet
    v: Jet
    basis: tuple[Jet, ...]


def solution_basis(q: Jet, n: int, m: int = 1) -> SolutionBasis:
    """Build and validate the superposition basis for source q."""
    if n < 1 or m < 1:
        raise ValueError("order and dimension must be positive")
    u, v = source_solutions(q)
    w = wronskian(u, v)
    if not w.is_constant() or w.coeffs[0] == 0:
        raise ValueError("source solutions must have a nonzero constant Wronskian")
    basis = tuple(u.pow(n - j) * v.pow(j - 1) for j in range(1, n + 1))
    return SolutionBasis(n, m, u, v, basis)


def superpose(basis: SolutionBasis, C: Sequence[Sequence[RationalLike]]) -> tuple[Jet, ...]:
    """Components w_i = sum_j C[i][j] * u^(n-j) v^(j-1)."""
    if len(C) != basis.m or any(len(row) != basis.n for row in C):
        raise DimensionMismatchError(
            f"coefficient matrix must be {basis.m} x {basis.n}")
    out = []
    for row in C:
        acc = basis.basis[0] * rat(row[0])
        for j in range(1, basis.n):
            acc = acc + basis.basis[j] * rat(row[j])
        out.append(acc)
    return tuple(out)


def single_solution_basis(u: Jet, n: int) -> tuple[Jet, ...]:
    """The functions u^(n-1) (integral of 1/u^2)^j for j = 1..n.

    The antiderivative constant is fixed to 0.  Starting the index at j = 1
    drops the member u^(n-1) and includes a top power that is not a
    solution; compare spans against the two-solution basis with span_report
    rather than assuming equality.
    """
    if u.coeffs[0] == 0:
        raise NonUnitError("single-solution superposition needs u(0) != 0")
    integral = (u * u).invert().integrate()
    lead = u.pow(n - 1)
    return tuple(lead * integral.pow(j) for j in range(1, n + 1))


def superpose_single(u: Jet, n: int, C: Sequence[Sequence[RationalLike]]) -> tuple[Jet, ...]:
    """Superposition over the single-solution basis."""
    basis = single_solution_basis(u, n)
    out = []
    for row in C:
        if len(row) != n:
            raise DimensionMismatchError(f"coefficient rows must have length {n}")
        acc = basis[0] * rat(row[0])
        for j in range(1, n):
            acc = acc + basis[j] * rat(row[j])
        out.append(acc)
    return tuple(out)


@dataclass(frozen=True)
class Residual:
    """L[w] componentwise; zero means membership through the tracked order."""

    components: tuple[Jet, ...]
    order: int

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.components)

    def first_defect(self) -> tuple[int, int] | None:
        """(component, power) of the first nonvanishing coefficient, or None."""
        for i, c in enumerate(self.components):
            for k, v in enumerate(c.coeffs):
                if v != 0:
                    return (i, k)
        return None


def residual(sys: LinearSystem, w: Sequence[Jet]) -> Residual:
    """Substitute w into the system and collect what is left."""
    if len(w) != sys.dim:
        raise DimensionMismatchError(
            f"solution has {len(w)} components, system has dimension {sys.dim}")
    n = sys.order
    derivs: list[tuple[Jet, ...]] = [tuple(w)]
    for _ in range(n):
        derivs.append(tuple(c.derive() for c in derivs[-1]))
    acc = list(derivs[n])
    for k in range(1, n + 1):
        term = sys.coefficient(k).matvec(derivs[n - k])
        acc = [a + t for a, t in zip(acc, term)]
    return Residual(tuple(acc), min(c.order for c in acc))


@dataclass(frozen=True)
class SpanReport:
    """Exact rational comparison of two families of jets as linear spans."""

    rank_primary: int
    rank_candidate: int
    rank_joint: int

    @property
    def spans_equal(self) -> bool:
        return self.rank_primary == self.rank_candidate == self.rank_joint

    @property
    def candidate_contained(self) -> bool:
        return self.rank_joint == self.rank_primary


def _rank(rows: list[list[Fraction]]) -> int:
    work = [row[:] for row in rows]
    rank = 0
    cols = len(work[0]) if work else 0
    for col in range(cols):
        pivot = next((r for r in range(rank, len(work)) if work[r][col] != 0), None)
        if pivot is None:
            continue
        work[rank], work[pivot] = work[pivot], work[rank]
        inv = 1 / work[rank][col]
        work[rank] = [v * inv for v in work[rank]]
        for r in range(len(work)):
            if r != rank and work[r][col] != 0:
                f = work[r][col]
                work[r] = [v - f * p for v, p in zip(work[r], work[rank])]
        rank += 1
    return rank


def span_report(primary: Sequence[Jet], candidate: Sequence[Jet]) -> SpanReport:
    """Compare spans using the common tracked coefficient window."""
    width = min(j.order for j in list(primary) + list(candidate)) + 1
    prim = [list(j.coeffs[:width]) for j in primary]
    cand = [list(j.coeffs[:width]) for j in candidate]
    return SpanReport(
        rank_primary=_rank(prim),
        rank_candidate=_rank(cand),
        rank_joint=_rank(prim + cand),
    )


def linearly_independent(jets: Sequence[Jet]) -> bool:
    width = min(j.order for j in jets) + 1
    return _rank([list(j.coeffs[:width]) for j in jets]) == len(jets)


def numeric_crosscheck(sys: LinearSystem, w: Sequence[Jet],
                       interval: tuple[float, float] = (0.0, 0.5),
                       steps: int = 1000) -> float:
    """Max deviation between a classical 4th-order integration and w.

    The system is rewritten as a first-order companion system seeded with
    the derivatives of w at the base point, integrated across the interval,
    and compared against the Horner evaluation of w at every grid point.
    """
    if steps < 1:
        raise ValueError("step count must be at least 1")
    n, m = sys.order, sys.dim
    if len(w) != m:
        raise DimensionMismatchError("solution/system dimension mismatch")
    if min(c.order for c in w) < n:
        raise ValueError(f"solution jets need order >= {n} to seed initial data")

    # bpoly[k-1][i][j]: float coefficient list of (B_k)_{ij}
    bpoly = [[[list(map(float, sys.coefficient(k).entries[i][j].coeffs))
               for j in range(m)] for i in range(m)] for k in range(1, n + 1)]
    base = float(sys.base_point)

    def eval_poly(coeffs: list[float], x: float) -> float:
        acc = 0.0
        t = x - base
        for c in reversed(coeffs):
            acc = acc * t + c
        return acc

    def rhs(x: float, state: list[float]) -> list[float]:
        # state layout: blocks of size m for y, y', ..., y^(n-1)
        out = state[m:] + [0.0] * m
        top = [0.0] * m
        for k in range(1, n + 1):
            block = state[(n - k) * m:(n - k + 1) * m]
            for i in range(m):
                for j in range(m):
                    top[i] -= eval_poly(bpoly[k - 1][i][j], x) * block[j]
        out[(n - 1) * m:] = top
        return out

    state = []
    for d in range(n):
        for i in range(m):
            state.append(float(w[i].coeffs[d]) * factorial(d))

    x0, x1 = interval
    h = (x1 - x0) / steps
    x = x0
    defect = max(abs(state[i] - w[i].evalf(x)) for i in range(m))
    for _ in range(steps):
        k1 = rhs(x, state)
        s2 = [s + 0.5 * h * v for s, v in zip(state, k1)]
        k2 = rhs(x + 0.5 * h, s2)
        s3 = [s + 0.5 * h * v for s, v in zip(state, k2)]
        k3 = rhs(x + 0.5 * h, s3)
        s4 = [s + h * v for s, v in zip(state, k3)]
        k4 = rhs(x + h, s4)
        state = [s + h * (a + 2 * b + 2 * c + d) / 6.0
                 for s, a, b, c, d in zip(state, k1, k2, k3, k4)]
        x += h
        defect = max(defect, max(abs(state[i] - w[i].evalf(x)) for i in range(m)))
    return defect
