"""First-order matrix differential operators and their n-fold iteration.

An operator Psi = R*d/dx + S acts on a linear differential expression
sum_j K[j] y^(n-j) by the product rule,

    Psi[ sum_j K_j y^(n-j) ] = sum_j (R K_j' + S K_j) y^(n-j) + R K_j y^(n-j+1),

so iterating Psi n times from the identity yields the order-n expression
K_n^0 y^(n) + ... + K_n^n y with K_n^0 = R^n.  Left-multiplying by the
inverse of the leading coefficient gives the monic system form used by the
rest of the engine.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb

from .jets import (
    DimensionMismatchError,
    Jet,
    MatrixJet,
    OrderExhaustedError,
)


@dataclass(frozen=True)
class DiffOperator:
    """Psi = R*d/dx + S with R invertible at the base point."""

    R: MatrixJet
    S: MatrixJet

    def __post_init__(self) -> None:
        if self.R.dim != self.S.dim:
            raise DimensionMismatchError("R and S must have the same dimension")
        common = min(self.R.order, self.S.order)
        object.__setattr__(self, "R", self.R.truncate(common))
        object.__setattr__(self, "S", self.S.truncate(common))
        # invertibility at the base point is what iteration relies on
        from .jets import rational_matrix_inverse
        rational_matrix_inverse(self.R.constant_matrix())

    @classmethod
    def scalar(cls, r: Jet, s: Jet) -> "DiffOperator":
        return cls(MatrixJet.from_rows([[r]]), MatrixJet.from_rows([[s]]))

    @property
    def dim(self) -> int:
        return self.R.dim

    @property
    def order(self) -> int:
        return self.R.order


@dataclass(frozen=True)
class LinearForm:
    """K[0] y^(n) + K[1] y^(n-1) + ... + K[n] y, with n = len(K) - 1."""

    K: tuple[MatrixJet, ...]

    def __post_init__(self) -> None:
        dims = {M.dim for M in self.K}
        if len(dims) != 1:
            raise DimensionMismatchError("mixed dimensions in linear form")

    @property
    def n(self) -> int:
        return len(self.K) - 1

    @property
    def dim(self) -> int:
        return self.K[0].dim

    @classmethod
    def identity(cls, dim: int, order: int) -> "LinearForm":
        """The order-0 form representing y itself."""
        return cls((MatrixJet.identity(dim, order),))

    def agrees(self, other: "LinearForm") -> bool:
        return (self.n == other.n
                and all(a.agrees(b) for a, b in zip(self.K, other.K)))


@dataclass(frozen=True)
class LinearSystem:
    """Monic system y^(n) + B_1 y^(n-1) + ... + B_n y = 0.

    coefficient(k) returns B_k, the matrix multiplying y^(n-k), for k = 1..n.
    """

    B: tuple[MatrixJet, ...]

    def __post_init__(self) -> None:
        if not self.B:
            raise ValueError("a system needs at least order 1")
        dims = {M.dim for M in self.B}
        if len(dims) != 1:
            raise DimensionMismatchError("mixed dimensions in system coefficients")

    @property
    def order(self) -> int:
        return len(self.B)

    @property
    def dim(self) -> int:
        return self.B[0].dim

    @property
    def base_point(self) -> Fraction:
        return self.B[0].base_point

    def coefficient(self, k: int) -> MatrixJet:
        if not 1 <= k <= self.order:
            raise IndexError(f"coefficient index {k} outside 1..{self.order}")
        return self.B[k - 1]

    @classmethod
    def scalar(cls, coeffs: tuple[Jet, ...] | list[Jet]) -> "LinearSystem":
        return cls(tuple(MatrixJet.from_rows([[c]]) for c in coeffs))

    @classmethod
    def canonical(cls, n: int, dim: int, order: int) -> "LinearSystem":
        """y^(n) = 0."""
        return cls(tuple(MatrixJet.zero(dim, order) for _ in range(n)))

    def scalar_parts(self) -> list[Jet | None]:
        """scalar_part of each coefficient, index k-1 for B_k."""
        return [M.scalar_part() for M in self.B]

    def isotropic_scalar(self) -> "LinearSystem | None":
        """The m=1 system with the same scalar coefficients, if isotropic."""
        parts = self.scalar_parts()
        if any(p is None for p in parts):
            return None
        return LinearSystem.scalar(tuple(parts))  # type: ignore[arg-type]

    def agrees(self, other: "LinearSystem") -> bool:
        return (self.order == other.order
                and all(a.agrees(b) for a, b in zip(self.B, other.B)))

    def min_order(self) -> int:
        return min(M.order for M in self.B)


def apply(psi: DiffOperator, form: LinearForm) -> LinearForm:
    """One application of Psi to a linear form; output order rises by one."""
    if psi.dim != form.dim:
        raise DimensionMismatchError("operator and form dimensions differ")
    if min(M.order for M in form.K) < 1:
        raise OrderExhaustedError("form coefficients have no derivative order left")
    R, S = psi.R, psi.S
    n = form.n
    out: list[MatrixJet] = []
    for i in range(n + 2):
        term = None
        if i <= n:
            term = R * form.K[i]
        if i >= 1:
            shifted = R * form.K[i - 1].derive() + S * form.K[i - 1]
            term = shifted if term is None else term + shifted
        assert term is not None
        out.append(term)
    return LinearForm(tuple(out))


def iterate(psi: DiffOperator, n: int) -> LinearForm:
    """The n-fold iteration Psi^n as an order-n linear form, K[0] = R^n."""
    if n < 1:
        raise ValueError("iteration count must be positive")
    if psi.order < n:
        raise OrderExhaustedError(
            f"operator order {psi.order} cannot support {n} iterations"
        )
    form = LinearForm.identity(psi.dim, psi.order)
    for _ in range(n):
        form = apply(psi, form)
    return form


def scalar_K1(r: Jet, s: Jet, n: int) -> Jet:
    """Closed form r^(n-1) * (n s + C(n,2) r') for the y^(n-1) coefficient."""
    return r.pow(n - 1) * (n * s + comb(n, 2) * r.derive())


def scalar_K2(r: Jet, s: Jet, n: int) -> Jet:
    """Closed form for the y^(n-2) coefficient of the n-fold scalar iteration:

        r^(n-2) * [ C(n,2) (r s' + s^2)
                    + C(n,3) (3 s r' + r r'' + (3n-5)/4 r'^2) ]
    """
    rp = r.derive()
    psi_s = r * s.derive() + s * s
    inner = comb(n, 2) * psi_s + comb(n, 3) * (
        3 * (s * rp) + r * rp.derive() + Fraction(3 * n - 5, 4) * (rp * rp)
    )
    return r.pow(n - 2) * inner


def monicize(form: LinearForm) -> LinearSystem:
    """Left-multiply by K[0]^-1, producing the monic system."""
    lead_inv = form.K[0].invert()
    return LinearSystem(tuple(lead_inv * form.K[k] for k in range(1, form.n + 1)))
