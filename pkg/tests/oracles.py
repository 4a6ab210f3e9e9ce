"""Independent oracles used by the tests.

These deliberately avoid the code paths they are checking: monic members
are re-derived by Gram-Schmidt against the inner product, and moments are
re-derived by adaptive numerical quadrature.
"""
from fractions import Fraction

import mpmath

from mvop.exactcore import Poly
from mvop.matpoly import MatPoly
from mvop.weight import Params, Weight, inner_product_reduced


def gram_schmidt_monic(w_max: int, params: Params) -> list[MatPoly]:
    """Monic orthogonal members by orthogonalizing the monomials x^k I."""
    weight = Weight.for_params(params)
    members: list[MatPoly] = []
    for w in range(w_max + 1):
        cand = MatPoly.scalar(Poly.monomial(Fraction(1), w))
        for prev in members:
            gram = inner_product_reduced(prev, prev, weight)
            overlap = inner_product_reduced(cand, prev, weight)
            cand = cand - (overlap * gram.inverse()) * prev
        members.append(cand)
    return members


def numeric_reduced_moment(k: int, n, dps: int = 40) -> mpmath.mpf:
    """Normalized moment by quadrature; the denominator is the mass."""
    with mpmath.workdps(dps):
        alpha = mpmath.mpf(n) / 2 - 1
        mass = mpmath.quad(lambda x: (1 - x * x) ** alpha, [-1, 1])
        val = mpmath.quad(lambda x: x**k * (1 - x * x) ** alpha, [-1, 1])
        return val / mass


def numeric_reduced_gram_entry(P: MatPoly, Q: MatPoly, params: Params,
                               i: int, j: int, dps: int = 40) -> mpmath.mpf:
    """One entry of the reduced Gram matrix by direct quadrature."""
    p, n = params.p, params.n
    with mpmath.workdps(dps):
        alpha = mpmath.mpf(n) / 2 - 1

        def r_mat(x):
            return mpmath.matrix(
                [
                    [mpmath.mpf(p) * x * x + mpmath.mpf(n - p), -mpmath.mpf(n) * x],
                    [-mpmath.mpf(n) * x, mpmath.mpf(n - p) * x * x + mpmath.mpf(p)],
                ]
            )

        def eval_mat(M, x):
            return mpmath.matrix(
                [[sum((mpmath.mpf(c) * x**t for t, c in enumerate(e.coeffs)),
                      mpmath.mpf(0)) for e in row] for row in M.rows]
            )

        def integrand(x):
            prod = eval_mat(P, x) * r_mat(x) * eval_mat(Q, x).T
            return (1 - x * x) ** alpha * prod[i, j]

        mass = mpmath.quad(lambda x: (1 - x * x) ** alpha, [-1, 1])
        return mpmath.quad(integrand, [-1, 1]) / mass
