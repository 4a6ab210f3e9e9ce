"""Construction of the orthogonal family, its monic rescaling, the
three-term recursion coefficients, and the norm checks.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial

from .exactcore import Poly, format_rational, gegenbauer, pochhammer
from .matpoly import ConstMat, MatPoly
from .weight import Params, Weight, inner_product_reduced


def leading_scale(w: int, n: Fraction) -> Fraction:
    """Scalar leading coefficient of the degree-w family member."""
    return Fraction(2) ** w * pochhammer(Fraction(n + 1, 2), w) / ((n + 1) * factorial(w))


def monic_scale(w: int, n: Fraction) -> Fraction:
    """Scalar turning the degree-w member into its monic form."""
    return factorial(w) * (n + 1) / (Fraction(2) ** w * pochhammer(Fraction(n + 1, 2), w))


def build_P(w: int, params: Params) -> MatPoly:
    """Assemble the degree-w member from ultraspherical building blocks.

    Negative-index blocks are zero, which is what makes w = 0 and w = 1
    come out right.
    """
    if w < 0:
        raise ValueError("family index must be nonnegative")
    p, n = params.p, params.n
    lam_outer = Fraction(n + 1, 2)
    lam_inner = Fraction(n + 3, 2)
    diag_core = gegenbauer(w, lam_outer) / (n + 1)
    bump = gegenbauer(w - 2, lam_inner)
    off = gegenbauer(w - 1, lam_inner)
    return MatPoly(
        (
            (diag_core + bump / (p + w), off / (p + w)),
            (off / (n - p + w), diag_core + bump / (n - p + w)),
        )
    )


def build_Q(w: int, params: Params) -> MatPoly:
    """Monic member: the fixed scalar multiple of build_P."""
    return build_P(w, params) * monic_scale(w, params.n)


@dataclass(frozen=True)
class RecursionCoeffs:
    """Closed-form matrices for both three-term recursions at index w."""

    w: int
    A: ConstMat
    B: ConstMat
    C: ConstMat
    A_monic: ConstMat
    B_monic: ConstMat

    def to_json(self) -> dict:
        return {
            "w": self.w,
            "A": self.A.to_json(),
            "B": self.B.to_json(),
            "C": self.C.to_json(),
            "A_monic": self.A_monic.to_json(),
            "B_monic": self.B_monic.to_json(),
        }


def recursion_coeffs(w: int, params: Params) -> RecursionCoeffs:
    if w < 0:
        raise ValueError("family index must be nonnegative")
    p, n = params.p, params.n
    a11 = Fraction((n + w) * (p + w - 1) * (n - p + w + 1),
                   (p + w) * (n - p + w) * (2 * w + n + 1))
    a22 = Fraction((n + w) * (p + w + 1) * (n - p + w - 1),
                   (p + w) * (n - p + w) * (2 * w + n + 1))
    A = ConstMat.diag(a11, a22)
    B = ConstMat(
        (
            (Fraction(0), Fraction(-p, (p + w) * (p + w + 1))),
            (Fraction(-(n - p), (n - p + w) * (n - p + w + 1)), Fraction(0)),
        )
    )
    C = ConstMat.diag(Fraction(w + 1, 2 * w + n + 1), Fraction(w + 1, 2 * w + n + 1))
    scale = Fraction(w, n + 2 * w - 1) if w else Fraction(0)
    A_monic = ConstMat.diag(a11 * scale, a22 * scale)
    return RecursionCoeffs(w=w, A=A, B=B, C=C, A_monic=A_monic, B_monic=B)


class FamilyCache:
    """Sequentially built cache of family members and their Gram matrices."""

    def __init__(self, params: Params):
        self.params = params
        self.weight = Weight.for_params(params)
        self._P: dict[int, MatPoly] = {}
        self._Q: dict[int, MatPoly] = {}
        self._gram: dict[int, ConstMat] = {}

    def P(self, w: int) -> MatPoly:
        if w < 0:
            return MatPoly.zero()
        if w not in self._P:
            self._P[w] = build_P(w, self.params)
        return self._P[w]

    def Q(self, w: int) -> MatPoly:
        if w < 0:
            return MatPoly.zero()
        if w not in self._Q:
            self._Q[w] = build_Q(w, self.params)
        return self._Q[w]

    def gram(self, w: int) -> ConstMat:
        if w not in self._gram:
            self._gram[w] = inner_product_reduced(self.Q(w), self.Q(w), self.weight)
        return self._gram[w]


# -- reference values the verifier checks against ---------------------------

def reference_monic(w: int, params: Params) -> MatPoly:
    """Built-in table of expected low-degree monic members (w <= 3).

    The (2,2) constant of the degree-2 entry is stored exactly as printed
    in the reference table; the exact build is expected to disagree with
    it whenever p differs from n - p (see reference_check).
    """
    p, n = params.p, params.n
    x = Poly.x()
    if w == 0:
        return MatPoly.identity()
    if w == 1:
        return MatPoly(
            (
                (x, Poly.const(Fraction(1, p + 1))),
                (Poly.const(Fraction(1, n - p + 1)), x),
            )
        )
    if w == 2:
        return MatPoly(
            (
                (
                    x * x - Poly.const(p / ((n + 3) * (p + 2))),
                    x * Fraction(2, p + 2),
                ),
                (
                    x * Fraction(2, n - p + 2),
                    x * x - Poly.const(p / ((n + 3) * (n - p + 2))),
                ),
            )
        )
    if w == 3:
        x3 = x * x * x
        x2 = x * x
        return MatPoly(
            (
                (
                    x3 - x * (3 * (p + 1) / ((n + 5) * (p + 3))),
                    x2 * Fraction(3, p + 3) - Poly.const(Fraction(3, (n + 5) * (p + 3))),
                ),
                (
                    x2 * Fraction(3, n - p + 3)
                    - Poly.const(Fraction(3, (n + 5) * (n - p + 3))),
                    x3 - x * (3 * (n - p + 1) / ((n + 5) * (n - p + 3))),
                ),
            )
        )
    raise ValueError("reference table only covers w <= 3")


def certified_q2_corner(params: Params) -> Fraction:
    """Constant term of the (2,2) entry of the monic degree-2 member, as
    forced by orthogonality (it is the p <-> n-p mirror of the (1,1) one)."""
    p, n = params.p, params.n
    return -(n - p) / ((n + 3) * (n - p + 2))


def norm_diag_part(w: int, params: Params) -> ConstMat:
    """Diagonal matrix factor of the reference norm formula."""
    p, n = params.p, params.n
    return ConstMat.diag(
        p * (n - p + w + 1) / (p + w),
        (n - p) * (p + w + 1) / (n - p + w),
    )


def norm_scalar_profile_reference(w: int, n: Fraction) -> Fraction:
    """Scalar prefactor of the reference norm formula, relative to w = 0.

    All transcendental pieces cancel in the ratio: the Gamma quotient is a
    Pochhammer symbol and the pi and Gamma((n+3)/2) factors drop out.
    """
    half = w // 2
    r = Fraction(2) ** half * pochhammer(Fraction(n, 2) + 1, half)
    r *= Fraction(n + 1) / ((n + 2 * w + 1) * factorial(w))
    for k in range(1, (w - 1) // 2 + 1):
        r *= n + 2 * k + 1
    return r


@dataclass
class NormEntry:
    w: int
    gram: ConstMat
    diagonal_ok: bool
    ratio_ok: bool
    telescope_ok: bool
    profile_matches_reference: bool
    computed_profile: tuple[Fraction, Fraction]
    reference_profile: tuple[Fraction, Fraction]

    def to_json(self) -> dict:
        return {
            "w": self.w,
            "gram": self.gram.to_json(),
            "diagonal_ok": self.diagonal_ok,
            "ratio_ok": self.ratio_ok,
            "telescope_ok": self.telescope_ok,
            "profile_matches_reference": self.profile_matches_reference,
            "computed_profile": [format_rational(v) for v in self.computed_profile],
            "reference_profile": [format_rational(v) for v in self.reference_profile],
        }


@dataclass
class NormReport:
    params: Params
    w_max: int
    entries: list[NormEntry] = field(default_factory=list)
    errata: list[dict] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        """Certified checks only: diagonality, entry ratio, telescoping."""
        return all(e.diagonal_ok and e.ratio_ok and e.telescope_ok for e in self.entries)

    @property
    def profile_matches_reference(self) -> bool:
        return all(e.profile_matches_reference for e in self.entries)

    def to_json(self) -> dict:
        return {
            "params": self.params.to_json(),
            "w_max": self.w_max,
            "entries": [e.to_json() for e in self.entries],
            "errata": self.errata,
            "passed": self.passed,
            "profile_matches_reference": self.profile_matches_reference,
        }


def norm_report(w_max: int, params: Params, cache: FamilyCache | None = None) -> NormReport:
    """Check everything the norm formula pins down exactly.

    Per w: (i) diagonality of the Gram matrix, (ii) the (1,1)/(2,2) entry
    ratio, (iii) the w-profile relative to w = 0 against the reference
    prefactor, (iv) the monic identity A_monic_w gram_{w-1} = gram_w.
    A profile mismatch is recorded as an erratum finding, not raised: the
    reference prefactor carries no independent certification here, while
    (i), (ii) and (iv) are theorems the construction must satisfy.
    """
    if w_max < 1:
        raise ValueError("w_max must be at least 1")
    cache = cache or FamilyCache(params)
    p, n = params.p, params.n
    report = NormReport(params=params, w_max=w_max)
    g0 = cache.gram(0)
    d0 = norm_diag_part(0, params)
    for w in range(1, w_max + 1):
        gw = cache.gram(w)
        diagonal_ok = gw.is_diagonal()
        expected_ratio = (
            p * (n - p + w + 1) * (n - p + w)
            / ((n - p) * (p + w) * (p + w + 1))
        )
        ratio_ok = gw[0, 0] == expected_ratio * gw[1, 1]
        coeffs = recursion_coeffs(w, params)
        telescope_ok = coeffs.A_monic * cache.gram(w - 1) == gw
        scalar = norm_scalar_profile_reference(w, n)
        dw = norm_diag_part(w, params)
        reference = (
            scalar * dw[0, 0] / d0[0, 0],
            scalar * dw[1, 1] / d0[1, 1],
        )
        computed = (gw[0, 0] / g0[0, 0], gw[1, 1] / g0[1, 1])
        profile_ok = computed == reference
        report.entries.append(
            NormEntry(
                w=w,
                gram=gw,
                diagonal_ok=diagonal_ok,
                ratio_ok=ratio_ok,
                telescope_ok=telescope_ok,
                profile_matches_reference=profile_ok,
                computed_profile=computed,
                reference_profile=reference,
            )
        )
        if not profile_ok:
            report.errata.append(
                {
                    "kind": "norm_prefactor_profile",
                    "w": w,
                    "computed": [format_rational(v) for v in computed],
                    "reference": [format_rational(v) for v in reference],
                    "note": "reference scalar prefactor disagrees with the "
                    "exactly computed Gram profile; the diagonal matrix part "
                    "and the entry ratio are confirmed",
                }
            )
    return report


@dataclass
class ReferenceTableReport:
    params: Params
    matches: dict[int, bool] = field(default_factory=dict)
    errata: list[dict] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        """True when every entry matches up to the single flagged corner."""
        return all(self.matches.values())

    def to_json(self) -> dict:
        return {
            "params": self.params.to_json(),
            "matches": {str(k): v for k, v in self.matches.items()},
            "errata": self.errata,
            "passed": self.passed,
        }


def reference_check(params: Params, cache: FamilyCache | None = None) -> ReferenceTableReport:
    """Compare the exact build against the low-degree reference table.

    The degree-2 (2,2) constant is allowed to disagree: the build is
    certified by orthogonality, and a mismatch there is logged as an
    erratum finding.  Any other discrepancy counts as a failure.
    """
    cache = cache or FamilyCache(params)
    report = ReferenceTableReport(params=params)
    for w in range(4):
        built = cache.Q(w)
        ref = reference_monic(w, params)
        if built == ref:
            report.matches[w] = True
            continue
        if w == 2:
            # isolate the flagged corner
            patched_rows = [list(r) for r in ref.rows]
            corner = built[1, 1]
            patched_rows[1][1] = corner
            agrees_elsewhere = MatPoly(patched_rows) == built
            corner_certified = corner.coeff(0) == certified_q2_corner(params)
            report.matches[w] = agrees_elsewhere and corner_certified
            if agrees_elsewhere and corner_certified:
                report.errata.append(
                    {
                        "kind": "q2_corner_constant",
                        "reference": format_rational(ref[1, 1].coeff(0)),
                        "certified": format_rational(corner.coeff(0)),
                        "note": "reference table constant for the (2,2) entry "
                        "of the degree-2 monic member differs from the "
                        "orthogonality-certified value",
                    }
                )
            continue
        report.matches[w] = False
    return report


def family_records(w_max: int, params: Params, cache: FamilyCache | None = None) -> list[dict]:
    """Per-index JSON records for the CLI."""
    cache = cache or FamilyCache(params)
    records = []
    for w in range(w_max + 1):
        gram = cache.gram(w)
        records.append(
            {
                "w": w,
                "Q": cache.Q(w).to_json(),
                "gram_diag": [format_rational(gram[0, 0]), format_rational(gram[1, 1])],
                "recursion": recursion_coeffs(w, params).to_json(),
            }
        )
    return records


@dataclass
class FamilyVerification:
    params: Params
    w_max: int
    orthogonality_ok: bool
    gram_diagonal_ok: bool
    leading_ok: bool
    p_recursion_ok: bool
    monic_recursion_ok: bool
    eigenfunction_ok: bool
    norm: NormReport
    reference: ReferenceTableReport
    failures: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures and self.norm.passed and self.reference.passed

    @property
    def errata(self) -> list[dict]:
        return self.norm.errata + self.reference.errata

    def to_json(self) -> dict:
        return {
            "params": self.params.to_json(),
            "w_max": self.w_max,
            "orthogonality_ok": self.orthogonality_ok,
            "gram_diagonal_ok": self.gram_diagonal_ok,
            "leading_ok": self.leading_ok,
            "p_recursion_ok": self.p_recursion_ok,
            "monic_recursion_ok": self.monic_recursion_ok,
            "eigenfunction_ok": self.eigenfunction_ok,
            "norm": self.norm.to_json(),
            "reference_table": self.reference.to_json(),
            "failures": self.failures,
            "errata": self.errata,
            "passed": self.passed,
        }


def verify_family(w_max: int, params: Params, cache: FamilyCache | None = None) -> FamilyVerification:
    """Run every family-level identity check through index w_max."""
    from .diffop import apply, hypergeometric_operator, hypergeometric_eigenvalue

    cache = cache or FamilyCache(params)
    x = Poly.x()
    failures: list[str] = []

    orthogonality_ok = True
    gram_diagonal_ok = True
    for w in range(w_max + 1):
        if not cache.gram(w).is_diagonal():
            gram_diagonal_ok = False
            failures.append(f"gram not diagonal at w={w}")
        for v in range(w):
            cross = inner_product_reduced(cache.P(w), cache.P(v), cache.weight)
            if not cross.is_zero:
                orthogonality_ok = False
                failures.append(f"<P_{w}, P_{v}> nonzero")

    leading_ok = True
    for w in range(w_max + 1):
        lead = cache.P(w).leading_coefficient()
        if cache.P(w).degree != w or not lead.is_scalar_multiple_of_identity() \
                or lead[0, 0] != leading_scale(w, params.n):
            leading_ok = False
            failures.append(f"leading coefficient off at w={w}")
        if cache.Q(w).leading_coefficient() != ConstMat.identity():
            leading_ok = False
            failures.append(f"monic member not monic at w={w}")

    p_recursion_ok = True
    monic_recursion_ok = True
    for w in range(w_max):
        coeffs = recursion_coeffs(w, params)
        lhs = x * cache.P(w)
        rhs = coeffs.A * cache.P(w - 1) + coeffs.B * cache.P(w) + coeffs.C * cache.P(w + 1)
        if lhs != rhs:
            p_recursion_ok = False
            failures.append(f"three-term recursion fails at w={w}")
        lhs_m = x * cache.Q(w)
        rhs_m = coeffs.A_monic * cache.Q(w - 1) + coeffs.B_monic * cache.Q(w) + cache.Q(w + 1)
        if lhs_m != rhs_m:
            monic_recursion_ok = False
            failures.append(f"monic three-term recursion fails at w={w}")

    op = hypergeometric_operator(params)
    eigenfunction_ok = True
    for w in range(w_max + 1):
        lam = hypergeometric_eigenvalue(w, params)
        if apply(cache.P(w), op) != lam.to_matpoly() * cache.P(w):
            eigenfunction_ok = False
            failures.append(f"eigen-equation fails at w={w}")

    norm = norm_report(max(1, w_max), params, cache)
    reference = reference_check(params, cache)
    if not norm.passed:
        failures.append("certified norm checks failed")
    if not reference.passed:
        failures.append("reference table mismatch beyond the flagged corner")

    return FamilyVerification(
        params=params,
        w_max=w_max,
        orthogonality_ok=orthogonality_ok,
        gram_diagonal_ok=gram_diagonal_ok,
        leading_ok=leading_ok,
        p_recursion_ok=p_recursion_ok,
        monic_recursion_ok=monic_recursion_ok,
        eigenfunction_ok=eigenfunction_ok,
        norm=norm,
        reference=reference,
        failures=failures,
    )
