"""Matrices over the exact polynomial ring: 2x2 in all public use, N x N
internally, with exact arithmetic, differentiation and structural queries.
"""
from __future__ import annotations

from fractions import Fraction

from .exactcore import NEG_INF, Poly, format_rational


class SingularMatrixError(ValueError):
    """Exact inversion was requested for a matrix with zero determinant."""


def _as_poly(value) -> Poly:
    if isinstance(value, Poly):
        return value
    return Poly.const(value) if value else Poly.zero()


class ConstMat:
    """Constant square matrix with exact scalar entries."""

    __slots__ = ("rows",)

    def __init__(self, rows):
        rows = tuple(tuple(r) for r in rows)
        n = len(rows)
        if any(len(r) != n for r in rows):
            raise ValueError("ConstMat must be square")
        object.__setattr__(self, "rows", rows)

    def __setattr__(self, name, value):
        raise AttributeError("ConstMat is immutable")

    @staticmethod
    def identity(n: int = 2) -> "ConstMat":
        return ConstMat(
            tuple(
                tuple(Fraction(1) if i == j else Fraction(0) for j in range(n))
                for i in range(n)
            )
        )

    @staticmethod
    def zero(n: int = 2) -> "ConstMat":
        return ConstMat(tuple(tuple(Fraction(0) for _ in range(n)) for _ in range(n)))

    @staticmethod
    def diag(*entries) -> "ConstMat":
        n = len(entries)
        return ConstMat(
            tuple(
                tuple(entries[i] if i == j else Fraction(0) for j in range(n))
                for i in range(n)
            )
        )

    @property
    def size(self) -> int:
        return len(self.rows)

    def __getitem__(self, idx):
        i, j = idx
        return self.rows[i][j]

    def __add__(self, other):
        if not isinstance(other, ConstMat):
            return NotImplemented
        return ConstMat(
            tuple(
                tuple(a + b for a, b in zip(ra, rb))
                for ra, rb in zip(self.rows, other.rows)
            )
        )

    def __sub__(self, other):
        if not isinstance(other, ConstMat):
            return NotImplemented
        return self + (-other)

    def __neg__(self):
        return ConstMat(tuple(tuple(-a for a in r) for r in self.rows))

    def __mul__(self, other):
        if isinstance(other, ConstMat):
            n = self.size
            return ConstMat(
                tuple(
                    tuple(
                        sum((self.rows[i][k] * other.rows[k][j] for k in range(n)),
                            Fraction(0))
                        for j in range(n)
                    )
                    for i in range(n)
                )
            )
        if isinstance(other, (MatPoly, Poly)):
            return self.to_matpoly() * other
        return ConstMat(tuple(tuple(a * other for a in r) for r in self.rows))

    def __rmul__(self, scalar):
        return ConstMat(tuple(tuple(scalar * a for a in r) for r in self.rows))

    @property
    def transpose(self) -> "ConstMat":
        n = self.size
        return ConstMat(tuple(tuple(self.rows[j][i] for j in range(n)) for i in range(n)))

    def det(self):
        n = self.size
        if n == 1:
            return self.rows[0][0]
        if n == 2:
            return self.rows[0][0] * self.rows[1][1] - self.rows[0][1] * self.rows[1][0]
        # Laplace expansion; only small sizes occur in practice
        total = self.rows[0][0] * 0
        for j in range(n):
            minor = ConstMat(
                tuple(
                    tuple(self.rows[i][k] for k in range(n) if k != j)
                    for i in range(1, n)
                )
            )
            term = self.rows[0][j] * minor.det()
            total = total + (term if j % 2 == 0 else -term)
        return total

    def inverse(self) -> "ConstMat":
        d = self.det()
        if not d:
            raise SingularMatrixError("matrix is singular")
        if self.size == 2:
            (a, b), (c, e) = self.rows
            inv_d = d ** -1
            return ConstMat(((e * inv_d, -b * inv_d), (-c * inv_d, a * inv_d)))
        # Gauss-Jordan for larger sizes
        n = self.size
        aug = [list(self.rows[i]) + [Fraction(1) if i == j else Fraction(0) for j in range(n)]
               for i in range(n)]
        for col in range(n):
            piv = next((r for r in range(col, n) if aug[r][col]), None)
            if piv is None:
                raise SingularMatrixError("matrix is singular")
            aug[col], aug[piv] = aug[piv], aug[col]
            inv_p = aug[col][col] ** -1
            aug[col] = [v * inv_p for v in aug[col]]
            for r in range(n):
                if r != col and aug[r][col]:
                    f = aug[r][col]
                    aug[r] = [v - f * w for v, w in zip(aug[r], aug[col])]
        return ConstMat(tuple(tuple(row[n:]) for row in aug))

    @property
    def is_zero(self) -> bool:
        return all(not a for r in self.rows for a in r)

    def is_diagonal(self) -> bool:
        return all(
            not a for i, r in enumerate(self.rows) for j, a in enumerate(r) if i != j
        )

    def is_scalar_multiple_of_identity(self) -> bool:
        return self.is_diagonal() and all(
            self.rows[i][i] == self.rows[0][0] for i in range(self.size)
        )

    def __eq__(self, other):
        if isinstance(other, ConstMat):
            return self.rows == other.rows
        return NotImplemented

    def __hash__(self):
        return hash(self.rows)

    def to_matpoly(self) -> "MatPoly":
        return MatPoly(tuple(tuple(_as_poly(a) for a in r) for r in self.rows))

    def to_json(self):
        return [[format_rational(a) for a in r] for r in self.rows]

    def __repr__(self):
        return f"ConstMat({self.rows!r})"


class MatPoly:
    """Square matrix with polynomial entries.

    Degree is the maximum entry degree (NEG_INF for the zero matrix).
    Products are the usual noncommutative matrix products.
    """

    __slots__ = ("rows",)

    def __init__(self, rows):
        rows = tuple(tuple(_as_poly(e) for e in r) for r in rows)
        n = len(rows)
        if any(len(r) != n for r in rows):
            raise ValueError("MatPoly must be square")
        object.__setattr__(self, "rows", rows)

    def __setattr__(self, name, value):
        raise AttributeError("MatPoly is immutable")

    @staticmethod
    def identity(n: int = 2) -> "MatPoly":
        return ConstMat.identity(n).to_matpoly()

    @staticmethod
    def zero(n: int = 2) -> "MatPoly":
        return MatPoly(tuple(tuple(Poly.zero() for _ in range(n)) for _ in range(n)))

    @staticmethod
    def from_const(mat: ConstMat) -> "MatPoly":
        return mat.to_matpoly()

    @staticmethod
    def scalar(poly: Poly, n: int = 2) -> "MatPoly":
        return MatPoly(
            tuple(
                tuple(poly if i == j else Poly.zero() for j in range(n))
                for i in range(n)
            )
        )

    @property
    def size(self) -> int:
        return len(self.rows)

    def __getitem__(self, idx):
        i, j = idx
        return self.rows[i][j]

    @property
    def degree(self):
        degs = [e.degree for r in self.rows for e in r]
        return max(degs) if degs else NEG_INF

    @property
    def is_zero(self) -> bool:
        return all(e.is_zero for r in self.rows for e in r)

    def coefficient(self, k: int) -> ConstMat:
        return ConstMat(tuple(tuple(e.coeff(k) for e in r) for r in self.rows))

    def leading_coefficient(self) -> ConstMat:
        if self.is_zero:
            raise ValueError("zero matrix polynomial has no leading coefficient")
        return self.coefficient(int(self.degree))

    def __add__(self, other):
        if not isinstance(other, MatPoly):
            return NotImplemented
        return MatPoly(
            tuple(
                tuple(a + b for a, b in zip(ra, rb))
                for ra, rb in zip(self.rows, other.rows)
            )
        )

    def __sub__(self, other):
        if not isinstance(other, MatPoly):
            return NotImplemented
        return self + (-other)

    def __neg__(self):
        return MatPoly(tuple(tuple(-a for a in r) for r in self.rows))

    def __mul__(self, other):
        if isinstance(other, MatPoly):
            n = self.size
            return MatPoly(
                tuple(
                    tuple(
                        _sum_polys(self.rows[i][k] * other.rows[k][j] for k in range(n))
                        for j in range(n)
                    )
                    for i in range(n)
                )
            )
        if isinstance(other, Poly):
            return MatPoly(tuple(tuple(e * other for e in r) for r in self.rows))
        if isinstance(other, ConstMat):
            return self * other.to_matpoly()
        # scalar
        return MatPoly(tuple(tuple(e * other for e in r) for r in self.rows))

    def __rmul__(self, other):
        if isinstance(other, ConstMat):
            return other.to_matpoly() * self
        if isinstance(other, Poly):
            return MatPoly(tuple(tuple(other * e for e in r) for r in self.rows))
        return MatPoly(tuple(tuple(other * e for e in r) for r in self.rows))

    def derivative(self, order: int = 1) -> "MatPoly":
        return MatPoly(tuple(tuple(e.derivative(order) for e in r) for r in self.rows))

    @property
    def transpose(self) -> "MatPoly":
        n = self.size
        return MatPoly(tuple(tuple(self.rows[j][i] for j in range(n)) for i in range(n)))

    def __call__(self, value) -> ConstMat:
        return ConstMat(tuple(tuple(e(value) for e in r) for r in self.rows))

    def __eq__(self, other):
        if isinstance(other, MatPoly):
            return self.rows == other.rows
        return NotImplemented

    def __hash__(self):
        return hash(self.rows)

    def to_json(self):
        return [[e.to_strings() for e in r] for r in self.rows]

    def __repr__(self):
        return f"MatPoly({self.rows!r})"


def _sum_polys(polys) -> Poly:
    acc = Poly.zero()
    for p in polys:
        acc = acc + p
    return acc


SIGMA = ConstMat(((Fraction(0), Fraction(1)), (Fraction(1), Fraction(0))))


def mat_arith(lhs: MatPoly, rhs: MatPoly, op: str) -> MatPoly:
    """Dispatch entrywise/matrix arithmetic by name: add, sub or mul."""
    if op == "add":
        return lhs + rhs
    if op == "sub":
        return lhs - rhs
    if op == "mul":
        return lhs * rhs
    raise ValueError(f"unknown op {op!r}")


def differentiate(P: MatPoly, order: int) -> MatPoly:
    """Entrywise exact derivative of the given order."""
    if order < 0:
        raise ValueError("derivative order must be nonnegative")
    return P.derivative(order)


def leading_coefficient(P: MatPoly) -> ConstMat:
    """Coefficient matrix of x^deg(P); rejects the zero matrix."""
    return P.leading_coefficient()
