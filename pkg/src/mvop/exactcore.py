"""Exact scalar layer: arbitrary-precision rationals, dense univariate
polynomials, and the Gegenbauer generator with its identity suite.

Every quantity in this package is an exact rational (or lives in a small
quadratic extension, see dwsolve).  Nothing here ever rounds.
"""
from __future__ import annotations

import os
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import factorial

ExactScalar = Fraction

NEG_INF = float("-inf")

_DEFAULT_BIT_LIMIT = 1_000_000


class BitBudgetExceeded(ArithmeticError):
    """A rational outgrew the MVOP_MAX_BITS runaway guard."""


def _read_bit_limit() -> int:
    raw = os.environ.get("MVOP_MAX_BITS")
    if raw is None:
        return _DEFAULT_BIT_LIMIT
    try:
        return max(1, int(raw))
    except ValueError:
        return _DEFAULT_BIT_LIMIT


_BIT_LIMIT = _read_bit_limit()


def refresh_bit_limit() -> int:
    """Re-read MVOP_MAX_BITS from the environment (used by the CLI)."""
    global _BIT_LIMIT
    _BIT_LIMIT = _read_bit_limit()
    return _BIT_LIMIT


def check_bits(value) -> None:
    """Raise BitBudgetExceeded if a rational exceeds the configured bit size."""
    num = getattr(value, "numerator", None)
    if num is None:
        return
    if num.bit_length() > _BIT_LIMIT or value.denominator.bit_length() > _BIT_LIMIT:
        raise BitBudgetExceeded(
            f"rational with {max(num.bit_length(), value.denominator.bit_length())} bits "
            f"exceeds MVOP_MAX_BITS={_BIT_LIMIT}"
        )


def parse_rational(text: str) -> Fraction:
    """Parse a "num/den" (or plain integer) string into an exact rational."""
    return Fraction(text.strip())


def format_rational(q) -> str:
    """Render a rational as a "num/den" string; the canonical wire format."""
    q = Fraction(q)
    return f"{q.numerator}/{q.denominator}"


def pochhammer(a, w: int) -> Fraction:
    """Rising factorial a(a+1)...(a+w-1), with the empty product equal to 1."""
    if w < 0:
        raise ValueError("pochhammer needs a nonnegative number of factors")
    result = Fraction(1)
    a = Fraction(a)
    for k in range(w):
        result *= a + k
    return result


def falling_factorial(w: int, i: int) -> int:
    """w(w-1)...(w-i+1); equals 1 for i = 0 and 0 once i exceeds w >= 0."""
    result = 1
    for k in range(i):
        result *= w - k
    return result


class Poly:
    """Dense univariate polynomial with exact coefficients.

    Coefficients are indexed by power of x and stored with no trailing
    zeros.  The zero polynomial has degree NEG_INF.  Instances are
    immutable; all arithmetic returns new objects.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs=()):
        coeffs = list(coeffs)
        while coeffs and not coeffs[-1]:
            coeffs.pop()
        for c in coeffs:
            check_bits(c)
        object.__setattr__(self, "coeffs", tuple(coeffs))

    def __setattr__(self, name, value):
        raise AttributeError("Poly is immutable")

    # -- constructors ------------------------------------------------------
    @staticmethod
    def zero() -> "Poly":
        return Poly()

    @staticmethod
    def one() -> "Poly":
        return Poly((Fraction(1),))

    @staticmethod
    def x() -> "Poly":
        return Poly((Fraction(0), Fraction(1)))

    @staticmethod
    def const(c) -> "Poly":
        return Poly((c,))

    @staticmethod
    def monomial(c, k: int) -> "Poly":
        return Poly((Fraction(0),) * k + (c,))

    # -- structure ---------------------------------------------------------
    @property
    def degree(self):
        return len(self.coeffs) - 1 if self.coeffs else NEG_INF

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    def coeff(self, k: int):
        if 0 <= k < len(self.coeffs):
            return self.coeffs[k]
        return Fraction(0)

    @property
    def leading_coefficient(self):
        if not self.coeffs:
            raise ValueError("zero polynomial has no leading coefficient")
        return self.coeffs[-1]

    # -- arithmetic (scalars auto-lift to constants) -------------------------
    def __add__(self, other):
        if not isinstance(other, Poly):
            other = Poly.const(other)
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, c in enumerate(b):
            out[i] = out[i] + c
        return Poly(out)

    __radd__ = __add__

    def __sub__(self, other):
        if not isinstance(other, Poly):
            other = Poly.const(other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __neg__(self):
        return Poly(tuple(-c for c in self.coeffs))

    def __mul__(self, other):
        if isinstance(other, Poly):
            if not self.coeffs or not other.coeffs:
                return Poly()
            out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
            for i, c in enumerate(self.coeffs):
                if not c:
                    continue
                for j, d in enumerate(other.coeffs):
                    if d:
                        out[i + j] = out[i + j] + c * d
            return Poly(out)
        if hasattr(other, "rows"):  # matrix types handle this product
            return NotImplemented
        return Poly(tuple(c * other for c in self.coeffs))

    def __rmul__(self, other):
        if hasattr(other, "rows"):
            return NotImplemented
        return Poly(tuple(other * c for c in self.coeffs))

    def __truediv__(self, scalar):
        return Poly(tuple(c / scalar for c in self.coeffs))

    def derivative(self, order: int = 1) -> "Poly":
        if order < 0:
            raise ValueError("derivative order must be nonnegative")
        cur = self.coeffs
        for _ in range(order):
            cur = tuple(k * cur[k] for k in range(1, len(cur)))
        return Poly(cur)

    def __call__(self, value):
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * value + c
        return acc

    def root_order(self, a) -> int:
        """Multiplicity of the root x = a (0 if a is not a root)."""
        cur = list(self.coeffs)
        order = 0
        while cur:
            # synthetic division by (x - a)
            quot = [Fraction(0)] * (len(cur) - 1)
            carry = cur[-1]
            for k in range(len(cur) - 2, -1, -1):
                quot[k] = carry
                carry = cur[k] + carry * a
            if carry:  # nonzero remainder: a no longer a root
                break
            order += 1
            cur = quot
            while cur and not cur[-1]:
                cur.pop()
        return order

    # -- comparisons / output ---------------------------------------------
    def __eq__(self, other):
        if isinstance(other, Poly):
            return self.coeffs == other.coeffs
        return NotImplemented

    def __hash__(self):
        return hash(self.coeffs)

    def __bool__(self):
        return bool(self.coeffs)

    def to_strings(self) -> list[str]:
        return [format_rational(c) for c in self.coeffs]

    def __repr__(self):
        if not self.coeffs:
            return "Poly(0)"
        terms = []
        for k, c in enumerate(self.coeffs):
            if not c:
                continue
            if k == 0:
                terms.append(str(c))
            elif k == 1:
                terms.append(f"{c}*x")
            else:
                terms.append(f"{c}*x^{k}")
        return "Poly(" + " + ".join(terms) + ")"


ONE_MINUS_X2 = Poly((Fraction(1), Fraction(0), Fraction(-1)))


@lru_cache(maxsize=None)
def _gegenbauer_cached(m: int, lam: Fraction) -> Poly:
    if m < 0:
        return Poly.zero()
    c_prev = Poly.one()
    if m == 0:
        return c_prev
    c_cur = Poly((Fraction(0), 2 * lam))
    # classical three-term recurrence:
    #   (k+1) C_{k+1} = 2(k+lam) x C_k - (k+2lam-1) C_{k-1}
    for k in range(1, m):
        nxt = (Poly.x() * c_cur) * (2 * (k + lam)) - c_prev * (k + 2 * lam - 1)
        c_prev, c_cur = c_cur, nxt / (k + 1)
    return c_cur


def gegenbauer(m: int, lam) -> Poly:
    """Ultraspherical polynomial of index m and parameter lam > 0.

    Negative m yields the zero polynomial; that convention is load-bearing
    for the degree-0 and degree-1 members of the matrix family.
    """
    lam = Fraction(lam)
    if lam <= 0:
        raise ValueError("gegenbauer parameter must be positive")
    return _gegenbauer_cached(m, lam)


def gegenbauer_series(m: int, lam) -> Poly:
    """Independent construction through the terminating hypergeometric sum.

    Kept deliberately separate from the recurrence generator so the two can
    be cross-checked coefficient by coefficient.
    """
    lam = Fraction(lam)
    if lam <= 0:
        raise ValueError("gegenbauer parameter must be positive")
    if m < 0:
        return Poly.zero()
    u = Poly((Fraction(1, 2), Fraction(-1, 2)))  # (1-x)/2
    acc = Poly.zero()
    u_pow = Poly.one()
    for k in range(m + 1):
        coef = (
            pochhammer(-m, k)
            * pochhammer(m + 2 * lam, k)
            / (pochhammer(lam + Fraction(1, 2), k) * factorial(k))
        )
        acc = acc + u_pow * coef
        u_pow = u_pow * u
    return acc * (pochhammer(2 * lam, m) / factorial(m))


@dataclass(frozen=True)
class IdentityFailure:
    identity: str
    m: int
    lam: Fraction
    residual: Poly


@dataclass
class GegenbauerIdentityReport:
    m_max: int
    lam: Fraction
    checked: tuple[str, ...]
    failures: list[IdentityFailure] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures

    def to_json(self) -> dict:
        return {
            "m_max": self.m_max,
            "lam": format_rational(self.lam),
            "identities": {
                name: [f.m for f in self.failures if f.identity == name]
                for name in self.checked
            },
            "passed": self.passed,
        }


_IDENTITY_NAMES = (
    "second_order_ode",
    "derivative_shift",
    "three_term",
    "parameter_lowering",
    "parameter_lowering_difference",
)


def gegenbauer_identity_suite(m_max: int, lam) -> GegenbauerIdentityReport:
    """Check the five classical ultraspherical identities exactly for m <= m_max.

    Requires lam > 1: the parameter-lowering identities involve lam - 1 both
    as a divisor and as the lowered parameter.
    """
    lam = Fraction(lam)
    if m_max < 0:
        raise ValueError("m_max must be nonnegative")
    if lam <= 1:
        raise ValueError("identity suite needs lam > 1")
    report = GegenbauerIdentityReport(m_max=m_max, lam=lam, checked=_IDENTITY_NAMES)
    x = Poly.x()
    for m in range(m_max + 1):
        c = gegenbauer(m, lam)
        residuals = {
            # (1-x^2) C'' - (2lam+1) x C' + m(m+2lam) C = 0
            "second_order_ode": ONE_MINUS_X2 * c.derivative(2)
            - (x * c.derivative()) * (2 * lam + 1)
            + c * (m * (m + 2 * lam)),
            # C' = 2lam C_{m-1}^{lam+1}
            "derivative_shift": c.derivative() - gegenbauer(m - 1, lam + 1) * (2 * lam),
            # 2(m+lam) x C_m = (m+1) C_{m+1} + (m+2lam-1) C_{m-1}
            "three_term": (x * c) * (2 * (m + lam))
            - gegenbauer(m + 1, lam) * (m + 1)
            - gegenbauer(m - 1, lam) * (m + 2 * lam - 1),
            # (m+2lam-1) C_{m+1}^{lam-1} = 2(lam-1)(C_{m+1} - x C_m)
            "parameter_lowering": gegenbauer(m + 1, lam - 1) * (m + 2 * lam - 1)
            - (gegenbauer(m + 1, lam) - x * c) * (2 * (lam - 1)),
            # (m+lam) C_{m+1}^{lam-1} = (lam-1)(C_{m+1} - C_{m-1})
            "parameter_lowering_difference": gegenbauer(m + 1, lam - 1) * (m + lam)
            - (gegenbauer(m + 1, lam) - gegenbauer(m - 1, lam)) * (lam - 1),
        }
        for name, res in residuals.items():
            if not res.is_zero:
                report.failures.append(IdentityFailure(name, m, lam, res))
    return report
