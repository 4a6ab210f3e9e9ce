from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mvop.exactcore import (
    NEG_INF,
    Poly,
    gegenbauer,
    gegenbauer_identity_suite,
    gegenbauer_series,
    parse_rational,
    format_rational,
    pochhammer,
)


def test_pochhammer_empty_product():
    assert pochhammer(Fraction(7, 3), 0) == 1
    assert pochhammer(0, 0) == 1


def test_pochhammer_integers():
    assert pochhammer(2, 3) == 24  # 2*3*4


def test_pochhammer_half():
    assert pochhammer(Fraction(1, 2), 2) == Fraction(3, 4)


def test_rational_strings_roundtrip():
    assert parse_rational("3/7") == Fraction(3, 7)
    assert parse_rational("5") == 5
    assert format_rational(Fraction(5)) == "5/1"


class TestPoly:
    def test_zero_degree_sentinel(self):
        assert Poly.zero().degree == NEG_INF
        assert Poly((Fraction(0),)).is_zero

    def test_trailing_zeros_trimmed(self):
        assert Poly((Fraction(1), Fraction(0))) == Poly.one()

    def test_eval_horner(self):
        p = Poly((Fraction(1), Fraction(-2), Fraction(3)))
        assert p(Fraction(2)) == 1 - 4 + 12

    def test_derivative(self):
        p = Poly((Fraction(5), Fraction(0), Fraction(1)))  # x^2 + 5
        assert p.derivative() == Poly((Fraction(0), Fraction(2)))
        assert p.derivative(3).is_zero

    def test_root_order(self):
        p = Poly((Fraction(1), Fraction(-1)))  # 1 - x
        cube = p * p * p
        assert cube.root_order(Fraction(1)) == 3
        assert cube.root_order(Fraction(-1)) == 0
        assert Poly.zero().root_order(Fraction(1)) == 0

    small = st.integers(min_value=-8, max_value=8)

    @given(st.lists(small, max_size=5), st.lists(small, max_size=5),
           st.lists(small, max_size=5))
    @settings(max_examples=60, deadline=None)
    def test_ring_laws(self, a, b, c):
        pa, pb, pc = (Poly([Fraction(v) for v in coeffs]) for coeffs in (a, b, c))
        assert pa * (pb + pc) == pa * pb + pa * pc
        assert pa * pb == pb * pa
        assert (pa + pb) + pc == pa + (pb + pc)

    @given(st.lists(small, min_size=1, max_size=6), st.lists(small, min_size=1, max_size=6))
    @settings(max_examples=60, deadline=None)
    def test_degree_of_product(self, a, b):
        pa = Poly([Fraction(v) for v in a])
        pb = Poly([Fraction(v) for v in b])
        prod = pa * pb
        if pa.is_zero or pb.is_zero:
            assert prod.is_zero
        else:
            assert prod.degree == pa.degree + pb.degree


class TestGegenbauer:
    def test_negative_index_is_zero(self):
        assert gegenbauer(-1, Fraction(5, 2)).is_zero
        assert gegenbauer(-3, Fraction(5, 2)).is_zero

    def test_index_zero_is_one(self):
        assert gegenbauer(0, Fraction(9, 4)) == Poly.one()

    def test_degree_two_lambda_one(self):
        assert gegenbauer(2, 1) == Poly((Fraction(-1), Fraction(0), Fraction(4)))

    def test_rejects_nonpositive_parameter(self):
        with pytest.raises(ValueError):
            gegenbauer(3, 0)
        with pytest.raises(ValueError):
            gegenbauer(3, Fraction(-1, 2))

    @pytest.mark.parametrize("lam", [Fraction(3, 2), Fraction(2), Fraction(5, 2), Fraction(7, 2)])
    def test_recurrence_matches_series_oracle(self, lam):
        for m in range(13):
            assert gegenbauer(m, lam) == gegenbauer_series(m, lam), (m, lam)

    @pytest.mark.parametrize("lam", [Fraction(3, 2), Fraction(2), Fraction(5, 2), Fraction(7, 2)])
    def test_degree_and_leading_coefficient(self, lam):
        from math import factorial

        for m in range(13):
            poly = gegenbauer(m, lam)
            assert poly.degree == m
            assert poly.leading_coefficient == Fraction(2) ** m * pochhammer(lam, m) / factorial(m)

    @pytest.mark.parametrize("lam", [Fraction(3, 2), Fraction(2), Fraction(5, 2), Fraction(7, 2)])
    def test_parity(self, lam):
        for m in range(13):
            poly = gegenbauer(m, lam)
            bad = [k for k, c in enumerate(poly.coeffs) if c and (k - m) % 2]
            assert not bad

    @pytest.mark.parametrize("lam", [Fraction(3, 2), Fraction(2), Fraction(5, 2), Fraction(7, 2)])
    def test_derivative_identity(self, lam):
        for m in range(13):
            lhs = gegenbauer(m, lam).derivative()
            rhs = gegenbauer(m - 1, lam + 1) * (2 * lam)
            assert lhs == rhs

    @pytest.mark.parametrize("lam", [Fraction(3, 2), Fraction(2), Fraction(5, 2), Fraction(7, 2)])
    def test_three_term_recurrence(self, lam):
        x = Poly.x()
        for m in range(13):
            lhs = (x * gegenbauer(m, lam)) * (2 * (m + lam))
            rhs = gegenbauer(m + 1, lam) * (m + 1) + gegenbauer(m - 1, lam) * (m + 2 * lam - 1)
            assert lhs == rhs


class TestIdentitySuite:
    def test_all_pass_at_standard_parameters(self):
        report = gegenbauer_identity_suite(6, Fraction(5, 2))
        assert report.passed
        assert not report.failures

    def test_degenerate_m_zero(self):
        report = gegenbauer_identity_suite(0, Fraction(2))
        assert report.passed

    def test_parameter_lowering_difference_holds(self):
        report = gegenbauer_identity_suite(4, Fraction(3))
        assert report.passed

    def test_rejects_lambda_at_most_one(self):
        with pytest.raises(ValueError):
            gegenbauer_identity_suite(4, Fraction(1))

    def test_report_json_shape(self):
        report = gegenbauer_identity_suite(2, Fraction(5, 2))
        data = report.to_json()
        assert data["passed"] is True
        assert set(data["identities"]) == set(report.checked)
