"""Right-acting differential operators with matrix polynomial coefficients.

An operator is a finite sum over i of d^i/dx^i followed by right
multiplication with a coefficient matrix F_i.  The action on a matrix
polynomial P is  P |-> sum_i P^(i) F_i, so coefficient matrices always
multiply from the right.  Composition is fixed as: compose(D, E) applies D
first, which makes the eigenvalue map multiplicative in the same order.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import comb

from .exactcore import ONE_MINUS_X2, Poly, falling_factorial, format_rational
from .matpoly import ConstMat, MatPoly
from .weight import Params, Weight


class NotInAlgebraError(ValueError):
    """Operator fails the degree filtration or the eigenfunction property."""


class DiffOp:
    """Ordered coefficient list F_0 ... F_s; order is the top nonzero index."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs=()):
        coeffs = [c if isinstance(c, MatPoly) else c.to_matpoly() for c in coeffs]
        while coeffs and coeffs[-1].is_zero:
            coeffs.pop()
        object.__setattr__(self, "coeffs", tuple(coeffs))

    def __setattr__(self, name, value):
        raise AttributeError("DiffOp is immutable")

    @staticmethod
    def zero() -> "DiffOp":
        return DiffOp()

    @staticmethod
    def identity(n: int = 2) -> "DiffOp":
        return DiffOp((MatPoly.identity(n),))

    @property
    def order(self) -> int:
        """Largest index with a nonzero coefficient; -1 for the zero operator."""
        return len(self.coeffs) - 1

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    def coefficient(self, i: int) -> MatPoly:
        if 0 <= i < len(self.coeffs):
            return self.coeffs[i]
        return MatPoly.zero()

    def in_poly_class(self) -> bool:
        """Degree filtration membership: deg F_i <= i for every i."""
        return all(c.degree <= i for i, c in enumerate(self.coeffs))

    def eigenvalue(self, w: int) -> ConstMat:
        """Matrix eigenvalue on the degree-w monic member.

        Only meaningful inside the filtered class; the formula sums the
        falling factorial of w against the degree-i coefficient of F_i.
        """
        if not self.in_poly_class():
            raise NotInAlgebraError("operator violates the degree filtration")
        total = ConstMat.zero()
        for i, c in enumerate(self.coeffs):
            block = c.coefficient(i)
            if not block.is_zero:
                total = total + block * Fraction(falling_factorial(w, i))
        return total

    # -- algebra -----------------------------------------------------------
    def __add__(self, other):
        if not isinstance(other, DiffOp):
            return NotImplemented
        n = max(len(self.coeffs), len(other.coeffs))
        return DiffOp(tuple(self.coefficient(i) + other.coefficient(i) for i in range(n)))

    def __sub__(self, other):
        if not isinstance(other, DiffOp):
            return NotImplemented
        return self + (-other)

    def __neg__(self):
        return DiffOp(tuple(-c for c in self.coeffs))

    def __mul__(self, other):
        if isinstance(other, DiffOp):
            return compose(self, other)
        return DiffOp(tuple(c * other for c in self.coeffs))

    def __rmul__(self, other):
        if isinstance(other, MatPoly):
            return apply(other, self)
        return DiffOp(tuple(other * c for c in self.coeffs))

    def __eq__(self, other):
        if isinstance(other, DiffOp):
            return self.coeffs == other.coeffs
        return NotImplemented

    def __hash__(self):
        return hash(self.coeffs)

    def to_json(self) -> dict:
        return {
            "order": self.order,
            "coeffs": [c.to_json() for c in self.coeffs],
        }

    def __repr__(self):
        return f"DiffOp(order={self.order})"


def apply(P: MatPoly, D: DiffOp) -> MatPoly:
    """Right action: sum of the i-th derivative of P times F_i."""
    total = MatPoly.zero(P.size)
    for i, Fi in enumerate(D.coeffs):
        if not Fi.is_zero:
            total = total + P.derivative(i) * Fi
    return total


def compose(D: DiffOp, E: DiffOp) -> DiffOp:
    """Operator with P (D*E) = (P D) E, by the generalized Leibniz rule."""
    if D.is_zero or E.is_zero:
        return DiffOp.zero()
    out: dict[int, MatPoly] = {}
    for i, Fi in enumerate(D.coeffs):
        if Fi.is_zero:
            continue
        for j, Gj in enumerate(E.coeffs):
            if Gj.is_zero:
                continue
            for t in range(j + 1):
                term = (Fi.derivative(j - t) * Gj) * Fraction(comb(j, t))
                m = i + t
                out[m] = out.get(m, MatPoly.zero()) + term
    top = max(out) if out else -1
    return DiffOp(tuple(out.get(m, MatPoly.zero()) for m in range(top + 1)))


def eigenvalue_of(D: DiffOp, w: int) -> ConstMat:
    return D.eigenvalue(w)


# -- the distinguished operators --------------------------------------------

def hypergeometric_operator(params: Params) -> DiffOp:
    """The symmetric second-order operator the family diagonalizes."""
    p, n = params.p, params.n
    x = Poly.x()
    f2 = MatPoly.scalar(ONE_MINUS_X2)
    f1 = MatPoly(
        (
            (x * (-(n + 2)), Poly.const(Fraction(-2))),
            (Poly.const(Fraction(-2)), x * (-(n + 2))),
        )
    )
    f0 = ConstMat.diag(-p, -(n - p)).to_matpoly()
    return DiffOp((f0, f1, f2))


def hypergeometric_eigenvalue(w: int, params: Params) -> ConstMat:
    p, n = params.p, params.n
    base = -w * (w + n + 1)
    return ConstMat.diag(base - p, base - n + p)


def order2_operator(a11, a12, a21, a22, c, params: Params) -> DiffOp:
    """General order-two member of the algebra, parameterized by five scalars.

    The constant block of the leading coefficient enters with a minus sign;
    that sign is what the exact membership constraints force (see the
    nullspace solver), and it reproduces the four displayed generators.
    """
    p, n = params.p, params.n
    a11, a12, a21, a22, c = (Fraction(v) for v in (a11, a12, a21, a22, c))
    quad = ConstMat(((a11, a12), (a21, a22)))
    lin = ConstMat(((a12 - a21, a11 - a22), (a22 - a11, a21 - a12)))
    const = ConstMat(((a22, a21), (a12, a11)))
    x = Poly.x()
    x2 = x * x
    f2 = quad.to_matpoly() * x2 + lin.to_matpoly() * x - const.to_matpoly()
    b1 = ConstMat(
        (
            ((n + 2) * a11, 2 * (n - p + 1) * a12),
            (2 * (p + 1) * a21, (n + 2) * a22),
        )
    )
    b2 = ConstMat(
        (
            (-p * a21 + (n - p + 2) * a12, (n - p + 2) * a11 - (n - p) * a22),
            (-p * a11 + (p + 2) * a22, (p + 2) * a21 - (n - p) * a12),
        )
    )
    f1 = b1.to_matpoly() * x + b2.to_matpoly()
    f0 = ConstMat(
        (
            (p * (n - p + 1) * a11 + c, (n - p) * (n - p + 1) * a12),
            (p * (p + 1) * a21, (p + 1) * (n - p) * a22 + c),
        )
    )
    return DiffOp((f0.to_matpoly(), f1, f2))


def order2_eigenvalue(a11, a12, a21, a22, c, w: int, params: Params) -> ConstMat:
    """Closed-form eigenvalue of order2_operator on the degree-w member."""
    p, n = params.p, params.n
    a11, a12, a21, a22, c = (Fraction(v) for v in (a11, a12, a21, a22, c))
    return ConstMat(
        (
            ((w + p) * (w + n - p + 1) * a11 + c, (w + n - p) * (w + n - p + 1) * a12),
            ((w + p) * (w + p + 1) * a21, (w + n - p) * (w + p + 1) * a22 + c),
        )
    )


@dataclass(frozen=True)
class NamedBasis:
    """The identity, the four order-two generators, their symmetric
    combinations, and the distinguished hypergeometric-type operator."""

    params: Params
    identity: DiffOp
    d1: DiffOp
    d2: DiffOp
    d3: DiffOp
    d4: DiffOp
    e3: DiffOp
    e4_over_i: DiffOp  # real operator; the actual element is i times this
    hypergeom: DiffOp

    def generators(self) -> tuple[DiffOp, DiffOp, DiffOp, DiffOp]:
        return (self.d1, self.d2, self.d3, self.d4)

    def to_json(self) -> dict:
        return {
            "identity": self.identity.to_json(),
            "d1": self.d1.to_json(),
            "d2": self.d2.to_json(),
            "d3": self.d3.to_json(),
            "d4": self.d4.to_json(),
            "e3": self.e3.to_json(),
            "e4_over_i": self.e4_over_i.to_json(),
            "hypergeom": self.hypergeom.to_json(),
        }


def _matpoly(rows) -> MatPoly:
    return MatPoly(tuple(tuple(e if isinstance(e, Poly) else Poly.const(Fraction(e))
                               for e in r) for r in rows))


def named_basis(params: Params) -> NamedBasis:
    """Construct the named operators from their displayed coefficients.

    Internal consistency is validated on construction: the hypergeometric
    operator must equal -d1 - d2 + p(n-p) I, e3 must equal
    (n-p) d3 + p d4, and the i-companion must equal (n-p) d3 - p d4.
    """
    p, n = params.p, params.n
    x = Poly.x()
    x2 = x * x

    d1 = DiffOp(
        (
            _matpoly(((p * (n - p + 1), 0), (0, 0))),
            _matpoly(((x * (n + 2), n - p + 2), (-p, 0))),
            _matpoly(((x2, x), (-x, -1))),
        )
    )
    d2 = DiffOp(
        (
            _matpoly(((0, 0), (0, (p + 1) * (n - p)))),
            _matpoly(((0, p - n), (p + 2, x * (n + 2)))),
            _matpoly(((-1, -x), (x, x2))),
        )
    )
    d3 = DiffOp(
        (
            _matpoly(((0, 0), (p * (p + 1), 0))),
            _matpoly(((-p, 0), (x * (2 * (p + 1)), p + 2))),
            _matpoly(((-x, -1), (x2, x))),
        )
    )
    d4 = DiffOp(
        (
            _matpoly(((0, (n - p) * (n - p + 1)), (0, 0))),
            _matpoly(((n - p + 2, x * (2 * (n - p + 1))), (0, p - n))),
            _matpoly(((x, x2), (-1, -x))),
        )
    )
    e3 = DiffOp(
        (
            _matpoly(((0, p * (n - p) * (n - p + 1)), (p * (p + 1) * (n - p), 0))),
            _matpoly(
                (
                    (2 * p, x * (2 * p * (n - p + 1))),
                    (x * (2 * (p + 1) * (n - p)), 2 * (n - p)),
                )
            ),
            _matpoly(
                (
                    (x * (-(n - 2 * p)), x2 * p - n + p),
                    (x2 * (n - p) - p, x * (n - 2 * p)),
                )
            ),
        )
    )
    e4_over_i = DiffOp(
        (
            _matpoly(((0, -p * (n - p) * (n - p + 1)), (p * (p + 1) * (n - p), 0))),
            _matpoly(
                (
                    (-2 * p * (n - p + 1), x * (-2 * p * (n - p + 1))),
                    (x * (2 * (p + 1) * (n - p)), 2 * (n - p) * (p + 1)),
                )
            ),
            _matpoly(
                (
                    (x * (-n), x2 * (-p) - n + p),
                    (x2 * (n - p) + p, x * n),
                )
            ),
        )
    )
    identity = DiffOp.identity()
    hyper = hypergeometric_operator(params)

    if hyper != -d1 - d2 + identity * (p * (n - p)):
        raise AssertionError("hypergeometric operator fails its basis decomposition")
    if e3 != d3 * (n - p) + d4 * p:
        raise AssertionError("e3 display disagrees with (n-p) d3 + p d4")
    if e4_over_i != d3 * (n - p) - d4 * p:
        raise AssertionError("e4 display disagrees with (n-p) d3 - p d4")

    return NamedBasis(
        params=params,
        identity=identity,
        d1=d1,
        d2=d2,
        d3=d3,
        d4=d4,
        e3=e3,
        e4_over_i=e4_over_i,
        hypergeom=hyper,
    )


# -- symmetry ----------------------------------------------------------------

@dataclass(frozen=True)
class _Weighted:
    """A function (1-x^2)^(alpha-k) S(x) with S a matrix polynomial."""

    k: int
    S: MatPoly

    def derivative(self, alpha: Fraction) -> "_Weighted":
        # d/dx [(1-x^2)^exp S] = (1-x^2)^(exp-1) [-2 exp x S + (1-x^2) S']
        exp = alpha - self.k
        inner = self.S * (Poly.x() * (-2 * exp)) + self.S.derivative() * ONE_MINUS_X2
        return _Weighted(self.k + 1, inner)

    def lifted(self, k: int) -> MatPoly:
        """Polynomial part after raising to the common exponent alpha - k."""
        if k < self.k:
            raise ValueError("cannot lower the exponent")
        out = self.S
        for _ in range(k - self.k):
            out = out * ONE_MINUS_X2
        return out


@dataclass
class SymmetryResult:
    symmetric: bool
    failures: list[str] = field(default_factory=list)

    def to_json(self) -> dict:
        return {"symmetric": self.symmetric, "failures": self.failures}


def _boundary_ok(S: MatPoly, alpha: Fraction) -> bool:
    """(1-x^2)^alpha S(x) -> 0 at both endpoints, decided exactly.

    Entrywise: the vanishing order of the entry at x = +-1 plus alpha must
    be strictly positive.
    """
    for row in S.rows:
        for entry in row:
            if entry.is_zero:
                continue
            for endpoint in (Fraction(1), Fraction(-1)):
                if alpha + entry.root_order(endpoint) <= 0:
                    return False
    return True


def symmetry_check(D: DiffOp, W: Weight) -> SymmetryResult:
    """Exact symmetry test for operators of order at most two.

    The three defining identities are checked as polynomial identities
    after factoring the weight into (1-x^2)^alpha times its polynomial
    part and rewriting every derivative as (1-x^2)^(alpha-k) times a
    polynomial.  Boundary conditions are decided through exact vanishing
    orders, never numerically.
    """
    if D.order > 2:
        raise ValueError("symmetry test only covers order <= 2")
    alpha = Fraction(W.alpha)
    R = W.R
    F2 = D.coefficient(2)
    F1 = D.coefficient(1)
    F0 = D.coefficient(0)
    failures: list[str] = []

    A = F2 * R  # pairs with (1-x^2)^alpha
    first = A - R * F2.transpose
    if not first.is_zero:
        failures.append("order-2 coefficient identity")

    dA = _Weighted(0, A).derivative(alpha)
    B = F1 * R
    second = dA.S * 2 - _Weighted(0, B + R * F1.transpose).lifted(1)
    if not second.is_zero:
        failures.append("order-1 coefficient identity")

    ddA = dA.derivative(alpha)
    dB = _Weighted(0, B).derivative(alpha)
    zero_order = F0 * R - R * F0.transpose
    third = ddA.S - dB.lifted(2) + _Weighted(0, zero_order).lifted(2)
    if not third.is_zero:
        failures.append("order-0 coefficient identity")

    if not _boundary_ok(A, alpha):
        failures.append("boundary condition on the order-2 coefficient")
    if not _boundary_ok(B - R * F1.transpose, alpha):
        failures.append("boundary condition on the order-1 coefficient")

    return SymmetryResult(symmetric=not failures, failures=failures)


# -- adjoints ----------------------------------------------------------------

def adjoint(D: DiffOp, family) -> DiffOp:
    """Adjoint of an order <= 2 member, built from Gram matrices and
    eigenvalues; the construction is postcondition-checked against the
    similarity formula for w <= 6."""
    if D.order > 2:
        raise ValueError("adjoint construction only covers order <= 2")
    if not D.in_poly_class():
        raise NotInAlgebraError("operator violates the degree filtration")
    for w in range(5):
        lam = D.eigenvalue(w)
        if apply(family.Q(w), D) != lam.to_matpoly() * family.Q(w):
            raise NotInAlgebraError(f"eigen-equation fails at w={w}")

    g = [family.gram(w) for w in range(3)]
    lam = [D.eigenvalue(w) for w in range(3)]
    sim = [g[w] * lam[w].transpose * g[w].inverse() for w in range(3)]
    q1, q2 = family.Q(1), family.Q(2)
    G0 = sim[0].to_matpoly()
    G1 = sim[1].to_matpoly() * q1 - q1 * G0
    # the triangular system reads 2 G2 = ... because the second derivative
    # of a monic degree-2 member is twice the identity
    G2 = (sim[2].to_matpoly() * q2 - q2.derivative() * G1 - q2 * G0) * Fraction(1, 2)
    star = DiffOp((G0, G1, G2))
    if not star.in_poly_class():
        raise AssertionError("adjoint left the degree filtration")
    for w in range(7):
        gw = family.gram(w)
        if star.eigenvalue(w) != gw * D.eigenvalue(w).transpose * gw.inverse():
            raise AssertionError(f"adjoint eigenvalue similarity fails at w={w}")
    return star


# -- the relation table -------------------------------------------------------

@dataclass
class RelationReport:
    params: Params
    relations: list[tuple[str, bool]] = field(default_factory=list)
    noncommutative: bool = False

    @property
    def passed(self) -> bool:
        return all(ok for _, ok in self.relations) and self.noncommutative

    def to_json(self) -> dict:
        return {
            "params": self.params.to_json(),
            "relations": [{"name": name, "holds": ok} for name, ok in self.relations],
            "noncommutative": self.noncommutative,
            "passed": self.passed,
        }


def relation_suite(params: Params, basis: NamedBasis | None = None) -> RelationReport:
    """Check the twelve displayed product relations as exact operator
    identities, plus the noncommutativity witness d1*d3 != d3*d1."""
    basis = basis or named_basis(params)
    d1, d2, d3, d4 = basis.generators()
    shift = params.n - 2 * params.p
    zero = DiffOp.zero()
    pairs = [
        ("d1.d2 = 0", compose(d1, d2), zero),
        ("d2.d1 = 0", compose(d2, d1), zero),
        ("d1.d3 = 0", compose(d1, d3), zero),
        ("d4.d1 = 0", compose(d4, d1), zero),
        ("d2.d4 = 0", compose(d2, d4), zero),
        ("d3.d2 = 0", compose(d3, d2), zero),
        ("d3.d3 = 0", compose(d3, d3), zero),
        ("d4.d4 = 0", compose(d4, d4), zero),
        ("d3.d1 = d2.d3 - (n-2p) d3", compose(d3, d1), compose(d2, d3) - d3 * shift),
        ("d1.d4 = d4.d2 - (n-2p) d4", compose(d1, d4), compose(d4, d2) - d4 * shift),
        ("d3.d4 = d2.d2 - (n-2p) d2", compose(d3, d4), compose(d2, d2) - d2 * shift),
        ("d4.d3 = d1.d1 + (n-2p) d1", compose(d4, d3), compose(d1, d1) + d1 * shift),
    ]
    report = RelationReport(params=params)
    for name, lhs, rhs in pairs:
        report.relations.append((name, lhs == rhs))
    report.noncommutative = compose(d1, d3) != compose(d3, d1)
    return report


def format_eigenvalue(mat: ConstMat) -> list[list[str]]:
    return [[format_rational(v) for v in row] for row in mat.rows]
