"""The two-parameter matrix weight on (-1, 1), its normalized moments, the
exact reduced inner product, and the reduction/conjugation structure.

All inner products are taken relative to the scalar mass of (1-x^2)^alpha,
which makes every Gram matrix exactly rational for rational parameters.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .exactcore import Poly, format_rational
from .matpoly import ConstMat, MatPoly, SIGMA


class ParameterError(ValueError):
    """Parameters outside the admissible range 0 < p < n."""


@dataclass(frozen=True)
class Params:
    """Weight parameters, restricted to exact rationals with 0 < p < n."""

    p: Fraction
    n: Fraction

    def __post_init__(self):
        p, n = Fraction(self.p), Fraction(self.n)
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "n", n)
        if not (0 < p < n):
            raise ParameterError(f"need 0 < p < n, got p={p}, n={n}")

    @property
    def reducible(self) -> bool:
        return self.n == 2 * self.p

    @property
    def alpha(self) -> Fraction:
        return self.n / 2 - 1

    @property
    def complement(self) -> "Params":
        return Params(self.n - self.p, self.n)

    def label(self) -> str:
        return f"p={self.p}, n={self.n}"

    def to_json(self) -> dict:
        return {
            "p": format_rational(self.p),
            "n": format_rational(self.n),
            "alpha": format_rational(self.alpha),
            "reducible": self.reducible,
        }


def polynomial_part(params: Params) -> MatPoly:
    """The symmetric polynomial factor multiplying (1-x^2)^alpha."""
    p, n = params.p, params.n
    return MatPoly(
        (
            (Poly((n - p, Fraction(0), p)), Poly((Fraction(0), -n))),
            (Poly((Fraction(0), -n)), Poly((p, Fraction(0), n - p))),
        )
    )


@dataclass(frozen=True)
class Weight:
    """Pair (alpha, R) representing W(x) = (1-x^2)^alpha R(x)."""

    alpha: Fraction
    R: MatPoly
    params: Params

    @staticmethod
    def for_params(params: Params) -> "Weight":
        w = Weight(alpha=params.alpha, R=polynomial_part(params), params=params)
        w.validate()
        return w

    def validate(self) -> None:
        p, n = self.params.p, self.params.n
        if self.R != self.R.transpose:
            raise ValueError("polynomial part must be symmetric")
        det = (
            self.R[0, 0] * self.R[1, 1] - self.R[0, 1] * self.R[1, 0]
        )
        expected = Poly((p * (n - p), Fraction(0), p * p + (n - p) ** 2 - n * n,
                         Fraction(0), p * (n - p)))
        if det != expected:
            raise ValueError("determinant of the polynomial part is off")
        for x in (Fraction(0), Fraction(1, 2), Fraction(-1, 2),
                  Fraction(9, 10), Fraction(-9, 10)):
            if det(x) <= 0:
                raise ValueError(f"determinant not positive at x={x}")

    def to_json(self) -> dict:
        return {
            "p": format_rational(self.params.p),
            "n": format_rational(self.params.n),
            "alpha": format_rational(self.alpha),
            "R": self.R.to_json(),
        }


@lru_cache(maxsize=None)
def reduced_moment(k: int, n: Fraction) -> Fraction:
    """Normalized moment of x^k against (1-x^2)^{n/2-1} on (-1, 1).

    Odd moments vanish; the even ones follow the two-term Beta-ratio
    recurrence h_{2m} = h_{2m-2} (2m-1)/(n+2m-1) with h_0 = 1.
    """
    if k < 0:
        raise ValueError("moment index must be nonnegative")
    n = Fraction(n)
    if n <= 0:
        raise ParameterError("weight is not integrable for n <= 0")
    if k % 2:
        return Fraction(0)
    h = Fraction(1)
    m = 0
    while m < k:
        m += 2
        h *= Fraction(m - 1) / (n + m - 1)
    return h


def inner_product_reduced(P: MatPoly, Q: MatPoly, W: Weight) -> ConstMat:
    """Exact reduced Gram matrix of P against Q under the weight.

    Expands P R Q^T (real coefficients, so the conjugate transpose is the
    transpose) and integrates monomial by monomial.
    """
    n = W.params.n
    integrand = P * W.R * Q.transpose
    size = integrand.size
    total = ConstMat.zero(size)
    deg = integrand.degree
    k = 0
    while k <= deg:
        total = total + integrand.coefficient(k) * reduced_moment(k, n)
        k += 1
    return total


@dataclass(frozen=True)
class ReductionResult:
    reducible: bool
    witness: ConstMat | None
    # diagonal factors as polynomials multiplying 2p(1-x^2)^{n/2-1}
    factors: tuple[Poly, Poly] | None

    def to_json(self) -> dict:
        out = {"reducible": self.reducible}
        if self.reducible:
            out["witness"] = self.witness.to_json()
            out["factors"] = [f.to_strings() for f in self.factors]
        return out


def reduction_check(W: Weight) -> ReductionResult:
    """Decide reducibility: the weight splits exactly when n = 2p.

    At the reducible point the constant conjugation [[1,1],[-1,1]] is
    produced as a witness together with the two scalar factors; the
    splitting identity is re-verified exactly before returning.
    """
    params = W.params
    if not params.reducible:
        return ReductionResult(False, None, None)
    p = params.p
    witness = ConstMat(((Fraction(1), Fraction(1)), (Fraction(-1), Fraction(1))))
    conj = witness.to_matpoly() * W.R * witness.transpose.to_matpoly()
    minus = Poly((Fraction(1), Fraction(-1))) * Poly((Fraction(1), Fraction(-1)))
    plus = Poly((Fraction(1), Fraction(1))) * Poly((Fraction(1), Fraction(1)))
    expected = MatPoly(((minus * (2 * p), Poly.zero()), (Poly.zero(), plus * (2 * p))))
    if conj != expected:
        raise AssertionError("reduction witness failed exact verification")
    return ReductionResult(True, witness, (minus, plus))


def conjugation_check(p, n) -> bool:
    """Exact check that swapping rows and columns trades p for n - p."""
    params = Params(Fraction(p), Fraction(n))
    flipped = params.complement
    sigma = SIGMA.to_matpoly()
    lhs = sigma * polynomial_part(params) * sigma
    return lhs == polynomial_part(flipped)
