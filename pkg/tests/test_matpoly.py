from fractions import Fraction

import pytest

from conftest import GRID, family_cache
from mvop.exactcore import Poly
from mvop.families import leading_scale
from mvop.matpoly import (
    SIGMA,
    ConstMat,
    MatPoly,
    SingularMatrixError,
    differentiate,
    leading_coefficient,
    mat_arith,
)


def test_identity_is_neutral(base_family):
    q1 = base_family.Q(1)
    assert mat_arith(MatPoly.identity(), q1, "mul") == q1
    assert mat_arith(q1, MatPoly.identity(), "mul") == q1


def test_sigma_is_an_involution():
    sigma = SIGMA.to_matpoly()
    assert mat_arith(sigma, sigma, "mul") == MatPoly.identity()


def test_self_subtraction(base_family):
    q1 = base_family.Q(1)
    assert mat_arith(q1, q1, "sub").is_zero


def test_mat_arith_rejects_unknown_op(base_family):
    with pytest.raises(ValueError):
        mat_arith(base_family.Q(0), base_family.Q(0), "div")


def test_differentiate_constant_and_linear():
    assert differentiate(MatPoly.identity(), 1).is_zero
    x_id = MatPoly.scalar(Poly.x())
    assert differentiate(x_id, 1) == MatPoly.identity()


def test_second_derivative_of_monic_degree_two(base_family):
    two_id = ConstMat.diag(Fraction(2), Fraction(2)).to_matpoly()
    assert differentiate(base_family.Q(2), 2) == two_id


def test_derivative_composes(base_family):
    for w in range(13):
        P = base_family.P(w)
        assert differentiate(differentiate(P, 1), 1) == differentiate(P, 2)


def test_leading_coefficient_simple():
    m = MatPoly.scalar(Poly.x()) * SIGMA.to_matpoly() + MatPoly.identity()
    assert leading_coefficient(m) == SIGMA


def test_leading_coefficient_rejects_zero():
    with pytest.raises(ValueError):
        leading_coefficient(MatPoly.zero())


@pytest.mark.parametrize("params", GRID, ids=lambda p: p.label())
def test_family_leading_coefficients_scalar_nonsingular(params):
    cache = family_cache(params)
    for w in range(13):
        lead = leading_coefficient(cache.P(w))
        assert lead.is_scalar_multiple_of_identity()
        assert lead[0, 0] == leading_scale(w, params.n) != 0
        assert leading_coefficient(cache.Q(w)) == ConstMat.identity()


def test_degree_of_products(base_family):
    a, b = base_family.Q(3), base_family.Q(4)
    assert (a * b).degree == 7  # nonsingular leading coefficients
    nilpotent = MatPoly(((Poly.zero(), Poly.x()), (Poly.zero(), Poly.zero())))
    assert (nilpotent * nilpotent).degree <= nilpotent.degree * 2


class TestConstMat:
    def test_inverse_two_by_two(self):
        m = ConstMat(((Fraction(2), Fraction(1)), (Fraction(5), Fraction(3))))
        assert m * m.inverse() == ConstMat.identity()
        assert m.inverse() * m == ConstMat.identity()

    def test_singular_raises(self):
        m = ConstMat(((Fraction(1), Fraction(2)), (Fraction(2), Fraction(4))))
        with pytest.raises(SingularMatrixError):
            m.inverse()

    def test_inverse_three_by_three(self):
        m = ConstMat(
            (
                (Fraction(1), Fraction(2), Fraction(0)),
                (Fraction(0), Fraction(1), Fraction(4)),
                (Fraction(1), Fraction(0), Fraction(1)),
            )
        )
        assert m * m.inverse() == ConstMat.identity(3)

    def test_transpose_and_diag_queries(self):
        m = ConstMat.diag(Fraction(2), Fraction(2))
        assert m.is_diagonal()
        assert m.is_scalar_multiple_of_identity()
        assert SIGMA.transpose == SIGMA
        assert not SIGMA.is_diagonal()
