"""Exact truncated power series (jets) over the rationals.

A :class:`Jet` is a Taylor polynomial truncated at a finite order, with
coefficients stored as ``fractions.Fraction``.  It is the scalar that every
coefficient function of a linear ODE system is made of; :class:`MatrixJet`
is a square matrix of jets sharing one base point and one truncation order.

Conventions:

* All internal computation happens at base point 0; documents at other base
  points get relabelled on ingestion (see :mod:`iterode.documents`).
* Arithmetic propagates the truncation order as the minimum of the operand
  orders; differentiation lowers it by one, antidifferentiation raises it.
* Every comparison is exact rational equality.  There is no epsilon here.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import isqrt, lcm
from typing import Iterable, Sequence, Union

DEFAULT_ORDER = 16

RationalLike = Union[Fraction, int, str]


class AlgebraError(Exception):
    """Base class for domain errors raised by the engine."""


class BasePointMismatchError(AlgebraError):
    pass


class OrderExhaustedError(AlgebraError):
    """Not enough tracked coefficients remain to perform the operation."""


class NonUnitError(AlgebraError):
    """Inversion of a series whose constant term is zero."""


class UnsupportedExtensionError(AlgebraError):
    """Square root would leave the rationals; rescale the input instead."""


class SingularMatrixError(AlgebraError):
    pass


class DimensionMismatchError(AlgebraError):
    pass


def rat(value: RationalLike) -> Fraction:
    """Coerce ints, strings like ``'2/3'`` and Fractions to Fraction."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, float):
        raise TypeError("floats are not exact; pass a Fraction, int or 'p/q' string")
    return Fraction(value)


def rational_sqrt(value: Fraction) -> Fraction:
    """Exact square root of a nonnegative rational, or raise if irrational."""
    if value < 0:
        raise UnsupportedExtensionError(f"square root of negative rational {value}")
    num, den = value.numerator, value.denominator
    rn, rd = isqrt(num), isqrt(den)
    if rn * rn != num or rd * rd != den:
        raise UnsupportedExtensionError(
            f"square root of {value} is irrational; rescale the input to a perfect square"
        )
    return Fraction(rn, rd)


@dataclass(frozen=True)
class Jet:
    """Truncated Taylor series sum(coeffs[k] * (x - base_point)**k, k=0..order)."""

    coeffs: tuple[Fraction, ...]
    base_point: Fraction = Fraction(0)

    def __post_init__(self) -> None:
        if not self.coeffs:
            raise ValueError("a jet needs at least its constant coefficient")

    @classmethod
    def of(cls, *coeffs: RationalLike, order: int | None = None,
           base_point: RationalLike = 0) -> "Jet":
        """Build a jet from ascending coefficients, zero-padded to `order`."""
        cs = [rat(c) for c in coeffs] or [Fraction(0)]
        if order is not None:
            if order + 1 < len(cs):
                raise ValueError(f"{len(cs)} coefficients exceed order {order}")
            cs += [Fraction(0)] * (order + 1 - len(cs))
        return cls(tuple(cs), rat(base_point))

    @classmethod
    def constant(cls, value: RationalLike, order: int = DEFAULT_ORDER,
                 base_point: RationalLike = 0) -> "Jet":
        return cls.of(value, order=order, base_point=base_point)

    @classmethod
    def variable(cls, order: int = DEFAULT_ORDER, base_point: RationalLike = 0) -> "Jet":
        """The identity function x as a jet at the base point."""
        b = rat(base_point)
        return cls.of(b, 1, order=order, base_point=b)

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    def __getitem__(self, k: int) -> Fraction:
        return self.coeffs[k]

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coeffs)

    def is_constant(self) -> bool:
        return all(c == 0 for c in self.coeffs[1:])

    def truncate(self, order: int) -> "Jet":
        """Drop coefficients above `order` (which must not exceed self.order)."""
        if order > self.order:
            raise OrderExhaustedError(
                f"cannot extend a jet of order {self.order} to order {order}"
            )
        if order == self.order:
            return self
        return Jet(self.coeffs[: order + 1], self.base_point)

    def agrees(self, other: "Jet") -> bool:
        """Exact equality through the common tracked order."""
        if self.base_point != other.base_point:
            return False
        n = min(self.order, other.order)
        return self.coeffs[: n + 1] == other.coeffs[: n + 1]

    def _check_compatible(self, other: "Jet") -> None:
        if self.base_point != other.base_point:
            raise BasePointMismatchError(
                f"base points differ: {self.base_point} vs {other.base_point}"
            )

    def __add__(self, other: "Jet | RationalLike") -> "Jet":
        if isinstance(other, Jet):
            self._check_compatible(other)
            n = min(self.order, other.order)
            return Jet(tuple(self.coeffs[k] + other.coeffs[k] for k in range(n + 1)),
                       self.base_point)
        if not isinstance(other, (int, str, Fraction)):
            return NotImplemented
        c = rat(other)
        return Jet((self.coeffs[0] + c,) + self.coeffs[1:], self.base_point)

    __radd__ = __add__

    def __neg__(self) -> "Jet":
        return Jet(tuple(-c for c in self.coeffs), self.base_point)

    def __sub__(self, other: "Jet | RationalLike") -> "Jet":
        if isinstance(other, Jet):
            return self + (-other)
        if not isinstance(other, (int, str, Fraction)):
            return NotImplemented
        return self + (-rat(other))

    def __rsub__(self, other: RationalLike) -> "Jet":
        return (-self) + rat(other)

    def __mul__(self, other: "Jet | RationalLike") -> "Jet":
        if isinstance(other, Jet):
            self._check_compatible(other)
            n = min(self.order, other.order)
            # clear denominators once and convolve integers; much cheaper
            # than reducing a Fraction per partial product
            da = lcm(*(c.denominator for c in self.coeffs[: n + 1]))
            db = lcm(*(c.denominator for c in other.coeffs[: n + 1]))
            ia = [c.numerator * (da // c.denominator) for c in self.coeffs[: n + 1]]
            ib = [c.numerator * (db // c.denominator) for c in other.coeffs[: n + 1]]
            out = [0] * (n + 1)
            for i, a in enumerate(ia):
                if a:
                    for j in range(n + 1 - i):
                        if ib[j]:
                            out[i + j] += a * ib[j]
            d = da * db
            return Jet(tuple(Fraction(v, d) for v in out), self.base_point)
        if not isinstance(other, (int, str, Fraction)):
            return NotImplemented
        c = rat(other)
        return Jet(tuple(a * c for a in self.coeffs), self.base_point)

    __rmul__ = __mul__

    def __truediv__(self, other: "Jet | RationalLike") -> "Jet":
        if isinstance(other, Jet):
            return self * other.invert()
        return self * (1 / rat(other))

    def derive(self) -> "Jet":
        """Formal derivative; the tracked order drops by one."""
        if self.order == 0:
            raise OrderExhaustedError("derivative of an order-0 jet is untracked")
        return Jet(tuple((k + 1) * self.coeffs[k + 1] for k in range(self.order)),
                   self.base_point)

    def integrate(self) -> "Jet":
        """Antiderivative with constant term 0; the tracked order rises by one."""
        out = [Fraction(0)] + [self.coeffs[k] / (k + 1) for k in range(self.order + 1)]
        return Jet(tuple(out), self.base_point)

    def invert(self) -> "Jet":
        """Multiplicative inverse: self * result == 1 through the tracked order."""
        a0 = self.coeffs[0]
        if a0 == 0:
            raise NonUnitError("cannot invert a jet with zero constant term")
        inv0 = 1 / a0
        out = [inv0]
        for k in range(1, self.order + 1):
            acc = Fraction(0)
            for j in range(1, k + 1):
                acc += self.coeffs[j] * out[k - j]
            out.append(-inv0 * acc)
        return Jet(tuple(out), self.base_point)

    def sqrt(self) -> "Jet":
        """Series square root with positive rational constant term."""
        a0 = self.coeffs[0]
        if a0 <= 0:
            raise UnsupportedExtensionError(
                f"square root needs a positive constant term, got {a0}"
            )
        b0 = rational_sqrt(a0)
        out = [b0]
        for k in range(1, self.order + 1):
            acc = Fraction(0)
            for i in range(1, k):
                acc += out[i] * out[k - i]
            out.append((self.coeffs[k] - acc) / (2 * b0))
        return Jet(tuple(out), self.base_point)

    def pow(self, exponent: RationalLike) -> "Jet":
        """Integer or half-integer power, via inversion and one square root."""
        e = rat(exponent)
        if e.denominator not in (1, 2):
            raise UnsupportedExtensionError(f"exponent {e} is not a half-integer")
        base = self if e.denominator == 1 else self.sqrt()
        k = e.numerator
        if k < 0:
            base = base.invert()
            k = -k
        result = Jet.constant(1, order=base.order, base_point=self.base_point)
        acc = base
        while k:
            if k & 1:
                result = result * acc
            k >>= 1
            if k:
                acc = acc * acc
        return result

    def compose(self, inner: "Jet") -> "Jet":
        """Taylor coefficients of self(inner(z)) at inner's base point.

        Requires inner's constant term to equal self's base point, so the
        composite stays a formal series at inner's base point.
        """
        if inner.coeffs[0] != self.base_point:
            raise BasePointMismatchError(
                f"inner constant term {inner.coeffs[0]} != outer base point {self.base_point}"
            )
        n = min(self.order, inner.order)
        # Horner in the shifted inner series, whose constant term is 0.
        shifted = Jet((Fraction(0),) + inner.coeffs[1: n + 1], inner.base_point)
        result = Jet.constant(self.coeffs[n], order=n, base_point=inner.base_point)
        for k in range(n - 1, -1, -1):
            result = result * shifted + self.coeffs[k]
        return result

    def __call__(self, x: RationalLike) -> Fraction:
        """Exact polynomial evaluation at a rational point."""
        t = rat(x) - self.base_point
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * t + c
        return acc

    def evalf(self, x: float) -> float:
        """Floating-point Horner evaluation; coefficients convert to float
        only here, never inside the exact algebra."""
        t = x - float(self.base_point)
        acc = 0.0
        for c in reversed(self.coeffs):
            acc = acc * t + float(c)
        return acc

    def __str__(self) -> str:
        terms = []
        for k, c in enumerate(self.coeffs):
            if c == 0:
                continue
            if k == 0:
                terms.append(str(c))
            else:
                mag = "x" if k == 1 else f"x^{k}"
                if c == 1:
                    terms.append(mag)
                elif c == -1:
                    terms.append(f"-{mag}")
                else:
                    terms.append(f"{c}*{mag}")
        body = " + ".join(terms).replace("+ -", "- ") if terms else "0"
        return f"{body} + O(x^{self.order + 1})"


def _rat_identity(m: int) -> list[list[Fraction]]:
    return [[Fraction(1) if i == j else Fraction(0) for j in range(m)] for i in range(m)]


def _rat_mat_mul(a: Sequence[Sequence[Fraction]],
                 b: Sequence[Sequence[Fraction]]) -> list[list[Fraction]]:
    m = len(a)
    return [[sum((a[i][k] * b[k][j] for k in range(m)), Fraction(0))
             for j in range(m)] for i in range(m)]


def rational_matrix_inverse(rows: Sequence[Sequence[Fraction]]) -> list[list[Fraction]]:
    """Exact inverse by Gauss-Jordan elimination; raises on singular input."""
    m = len(rows)
    work = [list(r) for r in rows]
    inv = _rat_identity(m)
    for col in range(m):
        pivot = next((r for r in range(col, m) if work[r][col] != 0), None)
        if pivot is None:
            raise SingularMatrixError("matrix is singular over the rationals")
        work[col], work[pivot] = work[pivot], work[col]
        inv[col], inv[pivot] = inv[pivot], inv[col]
        scale = 1 / work[col][col]
        work[col] = [v * scale for v in work[col]]
        inv[col] = [v * scale for v in inv[col]]
        for r in range(m):
            if r != col and work[r][col] != 0:
                f = work[r][col]
                work[r] = [v - f * p for v, p in zip(work[r], work[col])]
                inv[r] = [v - f * p for v, p in zip(inv[r], inv[col])]
    return inv


@dataclass(frozen=True)
class MatrixJet:
    """Square matrix of jets sharing one base point and one truncation order.

    Construction truncates every entry to the common minimum order, which is
    the same propagation rule jet arithmetic uses.
    """

    entries: tuple[tuple[Jet, ...], ...]

    def __post_init__(self) -> None:
        m = len(self.entries)
        if m == 0 or any(len(row) != m for row in self.entries):
            raise DimensionMismatchError("matrix jets must be square and nonempty")
        base = self.entries[0][0].base_point
        order = min(e.order for row in self.entries for e in row)
        normalized = []
        for row in self.entries:
            cells = []
            for e in row:
                if e.base_point != base:
                    raise BasePointMismatchError("matrix entries at mixed base points")
                cells.append(e.truncate(order))
            normalized.append(tuple(cells))
        object.__setattr__(self, "entries", tuple(normalized))

    @classmethod
    def from_rows(cls, rows: Iterable[Iterable[Jet]]) -> "MatrixJet":
        return cls(tuple(tuple(row) for row in rows))

    @classmethod
    def identity(cls, dim: int, order: int = DEFAULT_ORDER,
                 base_point: RationalLike = 0) -> "MatrixJet":
        return cls.from_rows(
            [[Jet.constant(1 if i == j else 0, order, base_point) for j in range(dim)]
             for i in range(dim)])

    @classmethod
    def zero(cls, dim: int, order: int = DEFAULT_ORDER,
             base_point: RationalLike = 0) -> "MatrixJet":
        return cls.from_rows(
            [[Jet.constant(0, order, base_point) for _ in range(dim)] for _ in range(dim)])

    @classmethod
    def scalar_multiple(cls, jet: Jet, dim: int) -> "MatrixJet":
        """jet * identity."""
        zero = Jet.constant(0, jet.order, jet.base_point)
        return cls.from_rows([[jet if i == j else zero for j in range(dim)]
                              for i in range(dim)])

    @classmethod
    def from_constant_rows(cls, rows: Sequence[Sequence[RationalLike]],
                           order: int = DEFAULT_ORDER,
                           base_point: RationalLike = 0) -> "MatrixJet":
        return cls.from_rows(
            [[Jet.constant(v, order, base_point) for v in row] for row in rows])

    @property
    def dim(self) -> int:
        return len(self.entries)

    @property
    def order(self) -> int:
        return self.entries[0][0].order

    @property
    def base_point(self) -> Fraction:
        return self.entries[0][0].base_point

    def __getitem__(self, idx: tuple[int, int]) -> Jet:
        i, j = idx
        return self.entries[i][j]

    def _check_dim(self, other: "MatrixJet") -> None:
        if self.dim != other.dim:
            raise DimensionMismatchError(f"dims differ: {self.dim} vs {other.dim}")

    def __add__(self, other: "MatrixJet") -> "MatrixJet":
        self._check_dim(other)
        return MatrixJet.from_rows(
            [[a + b for a, b in zip(ra, rb)] for ra, rb in zip(self.entries, other.entries)])

    def __sub__(self, other: "MatrixJet") -> "MatrixJet":
        self._check_dim(other)
        return MatrixJet.from_rows(
            [[a - b for a, b in zip(ra, rb)] for ra, rb in zip(self.entries, other.entries)])

    def __neg__(self) -> "MatrixJet":
        return MatrixJet.from_rows([[-a for a in row] for row in self.entries])

    def __mul__(self, other: "MatrixJet | Jet | RationalLike") -> "MatrixJet":
        if isinstance(other, MatrixJet):
            self._check_dim(other)
            m = self.dim
            rows = []
            for i in range(m):
                row = []
                for j in range(m):
                    acc = self.entries[i][0] * other.entries[0][j]
                    for k in range(1, m):
                        acc = acc + self.entries[i][k] * other.entries[k][j]
                    row.append(acc)
                rows.append(row)
            return MatrixJet.from_rows(rows)
        return self.scale(other)

    def scale(self, factor: "Jet | RationalLike") -> "MatrixJet":
        return MatrixJet.from_rows([[e * factor for e in row] for row in self.entries])

    __rmul__ = scale

    def matvec(self, vec: Sequence[Jet]) -> tuple[Jet, ...]:
        if len(vec) != self.dim:
            raise DimensionMismatchError("vector length does not match matrix dim")
        out = []
        for i in range(self.dim):
            acc = self.entries[i][0] * vec[0]
            for k in range(1, self.dim):
                acc = acc + self.entries[i][k] * vec[k]
            out.append(acc)
        return tuple(out)

    def derive(self) -> "MatrixJet":
        return MatrixJet.from_rows([[e.derive() for e in row] for row in self.entries])

    def compose(self, inner: Jet) -> "MatrixJet":
        return MatrixJet.from_rows([[e.compose(inner) for e in row] for row in self.entries])

    def truncate(self, order: int) -> "MatrixJet":
        return MatrixJet.from_rows([[e.truncate(order) for e in row] for row in self.entries])

    def constant_matrix(self) -> list[list[Fraction]]:
        """The matrix of constant terms (the value at the base point)."""
        return [[e.coeffs[0] for e in row] for row in self.entries]

    def is_zero(self) -> bool:
        return all(e.is_zero() for row in self.entries for e in row)

    def agrees(self, other: "MatrixJet") -> bool:
        return (self.dim == other.dim
                and all(a.agrees(b) for ra, rb in zip(self.entries, other.entries)
                        for a, b in zip(ra, rb)))

    def invert(self) -> "MatrixJet":
        """Series inverse, solved coefficientwise from the constant-term inverse."""
        m, order = self.dim, self.order
        coeff_mats = [[[self.entries[i][j].coeffs[k] for j in range(m)] for i in range(m)]
                      for k in range(order + 1)]
        inv0 = rational_matrix_inverse(coeff_mats[0])
        out = [inv0]
        for k in range(1, order + 1):
            acc = [[Fraction(0)] * m for _ in range(m)]
            for j in range(1, k + 1):
                prod = _rat_mat_mul(coeff_mats[j], out[k - j])
                for i in range(m):
                    for c in range(m):
                        acc[i][c] += prod[i][c]
            out.append([[-sum(inv0[i][t] * acc[t][c] for t in range(m))
                         for c in range(m)] for i in range(m)])
        rows = [[Jet(tuple(out[k][i][j] for k in range(order + 1)), self.base_point)
                 for j in range(m)] for i in range(m)]
        return MatrixJet.from_rows(rows)

    def scalar_part(self) -> Jet | None:
        """The jet q with self == q * identity, or None if self is not scalar."""
        if self.first_non_scalar_cell() is not None:
            return None
        return self.entries[0][0]

    def first_non_scalar_cell(self) -> tuple[int, int] | None:
        """Lexicographically first (row, col) violating the scalar-matrix shape."""
        for i in range(self.dim):
            for j in range(self.dim):
                if i == j:
                    if not self.entries[i][j].agrees(self.entries[0][0]):
                        return (i, j)
                elif not self.entries[i][j].is_zero():
                    return (i, j)
        return None

    def commutes_with(self, other: "MatrixJet") -> bool:
        return (self * other).agrees(other * self)

    def __str__(self) -> str:
        return "[" + "; ".join(", ".join(str(e) for e in row) for row in self.entries) + "]"
