"""Elimination of the E-form system down to the single biquadratic equation.

Stage 1 removes ``E20, E02, E03, E30`` with polynomial back-substitution.
Stage 2 solves the two remaining linear equations for ``E21, E12`` (which
introduces the denominator ``E01^2 + E10^2``) and then folds every power of
``E11`` above the first using the biquadratic equation itself.

The intermediate equations are *derived* here; the displayed versions are
kept only for comparison.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

from gmpy2 import mpq

from .cuboid_system import eform_system, scalar_ratio
from .polyparse import parse_expression
from .polyring import EL, EL_WEIGHTS, Polynomial, lcm_of_denominators, render_rational, to_rational
from .report import VerificationReport

__all__ = [
    "EliminationMap",
    "LocalizedPolynomial",
    "LinearSolveResult",
    "LiftResult",
    "MidpointEquations",
    "LiftError",
    "elimination_map",
    "stage1_reduce",
    "derive_midpoint_equations",
    "compare_midpoint_equations",
    "solve_linear_e21_e12",
    "displayed_linear_solution",
    "derived_linear_solution",
    "solution_for",
    "stage2_substitute",
    "e11_square_rhs",
    "reduce_e11",
    "stage2_reduce",
    "verify_annihilation",
    "verify_linear_solve",
    "verify_e11_square",
    "weighted_scale",
    "lift_solution",
    "determinant",
]

STAGE1_VARS = ("E20", "E02", "E03", "E30")
STAGE2_VARS = ("E21", "E12")

# images of the four eliminated variables
ELIMINATION_SOURCES = {
    "E20": "1/2*E10^2-1/2*L^2",
    "E02": "1/2*E01^2-L^2",
    "E03": "-1/3*E21-1/6*E01*E10^2-5/6*E01*L^2+1/6*E01^3+1/3*E10*E11",
    "E30": "-1/3*E12-1/6*E10*E01^2-1/2*E10*L^2+1/6*E10^3+1/3*E01*E11",
}

# the four displayed intermediate equations, each moved to "LHS - RHS"
MIDPOINT_SOURCES = {
    "m410": "E10*E21+E01*E12-(1/4*E11*E10^2+1/4*E01^2*E11+3/4*E11*L^2-E10*E01*L^2)",
    "m411": "-E01*E21+E10*E12-(1/8*E10^4-1/8*E01^4-3/4*E10^2*L^2+E01^2*L^2-3/8*L^4)",
    "m412": "4*E11^2+E10^4+E01^4-2*E10^2*E01^2-2*L^2*E10^2-6*E01^2*L^2+L^4",
    "m413": "8*E10*E11*E21+8*E01*E11*E12-4*E21^2-4*E12^2-8*E10*E12*L^2"
    "-(2*E10^2*E11^2+2*E01^2*E10^2*L^2+2*E01^2*E11^2-E01^4*L^2-2*E10^4*L^2"
    "-8*E01*E10*E11*L^2+8*E10^2*L^4+6*E01^2*L^4-2*E11^2*L^2-2*L^6)",
}

# two-squares form of m412
HERON_SHAPE_SOURCE = "(2*E11)^2+(E01^2+L^2-E10^2)^2-8*E01^2*L^2"

# displayed solutions for E21, E12: numerators over 8*(E01^2+E10^2)
DISPLAYED_SOLUTION_SOURCES = {
    "E21": "2*E10^3*E11+2*E01^2*E10*E11-E01*E10^4+E01^5"
    "+6*E10*E11*L^2-2*E01*E10^2*L^2-8*E01^3*L^2+3*E01*L^4",
    "E12": "E01^4*E10-2*E01^3*E11-2*E01*E10^2*E11-E10^5"
    "+6*E10^3*L^2-6*E01*E11*L^2+3*E10*L^4",
}

# displayed E11^2 = R
E11_SQUARE_SOURCE = "1/2*E01^2*E10^2-1/4*E10^4-1/4*E01^4+1/2*E10^2*L^2+3/2*E01^2*L^2-1/4*L^4"

# (multiplier, E-form equation(s)) as stated in the text
MIDPOINT_RECIPES = {
    "m410": (mpq(-3, 2), "stage1(eq34)"),
    "m411": (mpq(1, 4), "stage1(eq35) - stage1(eq36)"),
    "m412": (mpq(-2), "stage1(eq35) + stage1(eq36)"),
    "m413": (mpq(4), "stage1(eq37)"),
}


def _el(text: str) -> Polynomial:
    return parse_expression(text, EL)


@lru_cache(maxsize=None)
def determinant() -> Polynomial:
    """``E01^2 + E10^2``, the common denominator of the linear solve."""
    return _el("E01^2+E10^2")


# -- stage 1 ------------------------------------------------------------------


@dataclass(frozen=True)
class EliminationMap:
    images: dict[str, Polynomial]

    def full_images(self) -> dict[str, Polynomial]:
        out = {v: EL.var(v) for v in EL.variables}
        out.update(self.images)
        return out


@lru_cache(maxsize=None)
def elimination_map() -> EliminationMap:
    return EliminationMap({k: _el(v) for k, v in ELIMINATION_SOURCES.items()})


def stage1_reduce(p: Polynomial) -> Polynomial:
    """Eliminate ``E20, E02, E03, E30``."""
    return p.substitute(elimination_map().full_images())


# -- midpoint equations -------------------------------------------------------


@dataclass(frozen=True)
class MidpointEquations:
    m410: Polynomial
    m411: Polynomial
    m412: Polynomial
    m413: Polynomial

    def as_dict(self) -> dict[str, Polynomial]:
        return {"m410": self.m410, "m411": self.m411, "m412": self.m412, "m413": self.m413}


@lru_cache(maxsize=None)
def derive_midpoint_equations() -> MidpointEquations:
    eqs = eform_system().eforms()
    s = {k: stage1_reduce(eqs[k]) for k in ("eq34", "eq35", "eq36", "eq37")}
    return MidpointEquations(
        m410=s["eq34"].scale(mpq(-3, 2)),
        m411=(s["eq35"] - s["eq36"]).scale(mpq(1, 4)),
        m412=(s["eq35"] + s["eq36"]).scale(-2),
        m413=s["eq37"].scale(4),
    )


@lru_cache(maxsize=None)
def transcribed_midpoint_equations() -> MidpointEquations:
    return MidpointEquations(**{k: _el(v) for k, v in MIDPOINT_SOURCES.items()})


def compare_midpoint_equations() -> VerificationReport:
    """Derived m410 .. m413 against the displayed forms.

    A check passes only on exact equality; a pure sign flip is reported as a
    failure with ``relation == "negated"``.
    """
    derived = derive_midpoint_equations().as_dict()
    shown = transcribed_midpoint_equations().as_dict()
    report = VerificationReport()
    for name, d in derived.items():
        c = scalar_ratio(d, shown[name])
        if c == 1:
            relation = "equal"
        elif c == -1:
            relation = "negated"
        elif c is not None:
            relation = f"scaled by {render_rational(c)}"
        else:
            relation = "different"
        mult, recipe = MIDPOINT_RECIPES[name]
        report.record(
            f"midpoint/{name}",
            d - shown[name],
            relation=relation,
            recipe=f"{render_rational(mult)} * ({recipe})",
            terms=len(d),
        )
    heron = _el(HERON_SHAPE_SOURCE)
    report.record("midpoint/m412~heron-shape", derived["m412"] - heron)
    return report


# -- localized polynomials ----------------------------------------------------


@dataclass(frozen=True)
class LocalizedPolynomial:
    """``scalar * numerator / (E01^2 + E10^2)**denom_power``."""

    numerator: Polynomial
    denom_power: int = 0
    scalar: mpq = field(default_factory=lambda: mpq(1))

    def __post_init__(self):
        if self.denom_power < 0:
            raise ValueError("denom_power must be non-negative")
        object.__setattr__(self, "scalar", to_rational(self.scalar))
        if not self.scalar:
            raise ValueError("scalar must be nonzero; use a zero numerator instead")

    @classmethod
    def from_polynomial(cls, p: Polynomial) -> "LocalizedPolynomial":
        return cls(p, 0, mpq(1))

    def is_zero(self) -> bool:
        return self.numerator.is_zero()

    def _lifted(self, k: int) -> Polynomial:
        # scalar*numerator*D^(k - own power), for a common denominator D^k
        return self.numerator.scale(self.scalar) * determinant() ** (k - self.denom_power)

    def __eq__(self, other) -> bool:
        if isinstance(other, Polynomial):
            other = LocalizedPolynomial.from_polynomial(other)
        if not isinstance(other, LocalizedPolynomial):
            return NotImplemented
        k = max(self.denom_power, other.denom_power)
        return self._lifted(k) == other._lifted(k)

    __hash__ = None

    def __add__(self, other) -> "LocalizedPolynomial":
        if isinstance(other, Polynomial):
            other = LocalizedPolynomial.from_polynomial(other)
        k = max(self.denom_power, other.denom_power)
        return LocalizedPolynomial(self._lifted(k) + other._lifted(k), k)

    __radd__ = __add__

    def __neg__(self) -> "LocalizedPolynomial":
        return LocalizedPolynomial(self.numerator, self.denom_power, -self.scalar)

    def __sub__(self, other) -> "LocalizedPolynomial":
        return self + (-other if isinstance(other, LocalizedPolynomial) else -other)

    def __mul__(self, other) -> "LocalizedPolynomial":
        if isinstance(other, LocalizedPolynomial):
            return LocalizedPolynomial(
                self.numerator * other.numerator,
                self.denom_power + other.denom_power,
                self.scalar * other.scalar,
            )
        if isinstance(other, Polynomial):
            return LocalizedPolynomial(self.numerator * other, self.denom_power, self.scalar)
        return LocalizedPolynomial(self.numerator, self.denom_power, self.scalar * to_rational(other))

    __rmul__ = __mul__

    def evaluate(self, point) -> mpq:
        den = determinant().evaluate(point)
        if self.denom_power and not den:
            raise ZeroDivisionError("E01^2 + E10^2 vanishes at this point")
        return self.scalar * self.numerator.evaluate(point) / den**self.denom_power


# -- linear solve for E21, E12 -------------------------------------------------


@dataclass(frozen=True)
class LinearSolveResult:
    e21: LocalizedPolynomial
    e12: LocalizedPolynomial
    determinant: Polynomial

    def images(self) -> dict[str, LocalizedPolynomial]:
        return {"E21": self.e21, "E12": self.e12}


def _linear_parts(p: Polynomial) -> tuple[Polynomial, Polynomial, Polynomial]:
    """``p == a*E21 + b*E12 + c`` with ``a, b, c`` free of both."""
    if p.degree_in("E21") > 1 or p.degree_in("E12") > 1:
        raise ValueError("equation is not linear in E21, E12")
    by21 = p.collect("E21")
    rest = by21.get(0, EL.zero())
    a = by21.get(1, EL.zero())
    by12 = rest.collect("E12")
    b = by12.get(1, EL.zero())
    c = by12.get(0, EL.zero())
    if "E12" in a.variables():
        raise ValueError("equation is not linear in E21, E12")
    return a, b, c


def solve_linear_e21_e12(eq_a: Polynomial | None = None, eq_b: Polynomial | None = None) -> LinearSolveResult:
    """Cramer's rule on two equations linear in ``E21, E12``.

    Defaults to the derived m410, m411.  The determinant is normalised to
    ``E01^2 + E10^2`` and the solutions carry the scalar ``1/8``.
    """
    if eq_a is None or eq_b is None:
        mids = derive_midpoint_equations()
        eq_a, eq_b = mids.m410, mids.m411
    a1, b1, c1 = _linear_parts(eq_a)
    a2, b2, c2 = _linear_parts(eq_b)
    det = a1 * b2 - b1 * a2
    ratio = scalar_ratio(det, determinant())
    if not ratio:
        raise ValueError(f"determinant {det} is not a constant multiple of E01^2+E10^2")
    num21 = (b1 * c2 - c1 * b2).scale(8 / ratio)
    num12 = (c1 * a2 - a1 * c2).scale(8 / ratio)
    return LinearSolveResult(
        e21=LocalizedPolynomial(num21, 1, mpq(1, 8)),
        e12=LocalizedPolynomial(num12, 1, mpq(1, 8)),
        determinant=det.scale(1 / ratio),
    )


@lru_cache(maxsize=None)
def derived_linear_solution() -> LinearSolveResult:
    return solve_linear_e21_e12()


@lru_cache(maxsize=None)
def displayed_linear_solution() -> LinearSolveResult:
    """The displayed solutions taken at face value."""
    return LinearSolveResult(
        e21=LocalizedPolynomial(_el(DISPLAYED_SOLUTION_SOURCES["E21"]), 1, mpq(1, 8)),
        e12=LocalizedPolynomial(_el(DISPLAYED_SOLUTION_SOURCES["E12"]), 1, mpq(1, 8)),
        determinant=determinant(),
    )


def solution_for(convention: str) -> LinearSolveResult:
    if convention == "derived":
        return derived_linear_solution()
    if convention in ("displayed", "paper"):
        return displayed_linear_solution()
    raise ValueError(f"unknown convention {convention!r}; expected 'derived' or 'displayed'")


# -- E11 folding ----------------------------------------------------------------


@lru_cache(maxsize=None)
def e11_square_rhs() -> Polynomial:
    """``R`` with ``m412 == 4*(E11^2 - R)``, derived from m412."""
    m412 = derive_midpoint_equations().m412
    parts = m412.collect("E11")
    if set(parts) != {0, 2} or parts[2] != EL.const(4):
        raise ValueError("m412 is not of the form 4*E11^2 + (E11-free part)")
    return parts[0].scale(mpq(-1, 4))


def reduce_e11(p: Polynomial, r: Polynomial | None = None) -> Polynomial:
    """Replace ``E11^k`` by ``E11^(k mod 2) * R^(k // 2)``."""
    r = e11_square_rhs() if r is None else r
    if "E11" in r.variables():
        raise ValueError("R must not contain E11")
    e11 = EL.var("E11")
    powers = {0: EL.one()}
    out = EL.zero()
    for k, coeff in p.collect("E11").items():
        half = k // 2
        if half not in powers:
            powers[half] = r**half
        term = coeff * powers[half]
        out = out + (term * e11 if k % 2 else term)
    return out


# -- stage 2 --------------------------------------------------------------------


def stage2_substitute(p: Polynomial, solution: LinearSolveResult | None = None) -> LocalizedPolynomial:
    """Replace ``E21, E12`` by the localized solution, clearing ``deg`` powers of the determinant."""
    bad = set(STAGE1_VARS) & p.variables()
    if bad:
        raise ValueError(f"stage-1 variables still present: {sorted(bad)}")
    sol = solution or derived_linear_solution()
    n21 = sol.e21.numerator.scale(sol.e21.scalar)
    n12 = sol.e12.numerator.scale(sol.e12.scalar)
    det = determinant()
    k = 0
    groups: dict[tuple[int, int], Polynomial] = {}
    for a, pa in p.collect("E21").items():
        for b, pab in pa.collect("E12").items():
            groups[(a, b)] = pab
            k = max(k, a + b)
    cache: dict = {}

    def power(base, name, e):
        if (name, e) not in cache:
            cache[(name, e)] = base**e
        return cache[(name, e)]

    numerator = EL.zero()
    for (a, b), coeff in groups.items():
        numerator = numerator + coeff * power(n21, "n21", a) * power(n12, "n12", b) * power(det, "d", k - a - b)
    return LocalizedPolynomial(numerator, k, mpq(1))


def stage2_reduce(
    p: Polynomial, solution: LinearSolveResult | None = None, r: Polynomial | None = None
) -> LocalizedPolynomial:
    """Eliminate ``E21, E12``, then fold powers of ``E11`` via ``R``."""
    loc = stage2_substitute(p, solution)
    return LocalizedPolynomial(reduce_e11(loc.numerator, r), loc.denom_power, loc.scalar)


def verify_linear_solve() -> VerificationReport:
    """Back-substitution, determinant, and comparison with the displayed solutions."""
    mids = derive_midpoint_equations()
    sol = derived_linear_solution()
    shown_sol = displayed_linear_solution()
    report = VerificationReport()
    report.record("linear/determinant", sol.determinant - determinant())
    for name, eq in (("m410", mids.m410), ("m411", mids.m411)):
        report.record(f"linear/back-substitution/{name}", stage2_substitute(eq, sol).numerator)
    for var, mine, shown in (("E21", sol.e21, shown_sol.e21), ("E12", sol.e12, shown_sol.e12)):
        c = scalar_ratio(mine.numerator, shown.numerator)
        relation = {1: "equal", -1: "negated"}.get(c, "different") if c is not None else "different"
        report.record(f"linear/{var}-vs-displayed", mine.numerator - shown.numerator, relation=relation)
    return report


def verify_e11_square() -> VerificationReport:
    """``4*(E11^2 - R) == m412`` and ``R`` against the display."""
    r = e11_square_rhs()
    report = VerificationReport()
    m412 = derive_midpoint_equations().m412
    report.record("e11-square/identity", (EL.var("E11") ** 2 - r).scale(4) - m412)
    report.record("e11-square/vs-displayed", r - _el(E11_SQUARE_SOURCE))
    return report


def verify_annihilation(convention: str = "derived", r: Polynomial | None = None) -> VerificationReport:
    """Stage-2 annihilation of m413 and all 14 stage-1-reduced kernel polynomials."""
    sol = solution_for(convention)
    r_poly = e11_square_rhs() if r is None else r
    targets = {"m413": derive_midpoint_equations().m413}
    for name, q in eform_system().kernel:
        targets[name] = stage1_reduce(q)
    report = VerificationReport()
    for name, s1 in targets.items():
        loc = stage2_substitute(s1, sol)
        folded = reduce_e11(loc.numerator, r_poly)
        report.record(
            f"annihilation/{convention}/{name}",
            folded,
            stage1_terms=len(s1),
            stage2_terms=len(loc.numerator),
            folded_terms=len(folded),
            denom_power=loc.denom_power,
        )
    return report


# -- lifting ----------------------------------------------------------------------


class LiftError(ValueError):
    """The point is not liftable (off the biquadratic, or on the excluded locus)."""


@dataclass(frozen=True)
class LiftResult:
    rational_point: dict[str, mpq]
    scale_alpha: int
    integer_point: dict[str, int]
    failed_equations: tuple[str, ...] = ()

    @property
    def verified(self) -> bool:
        return not self.failed_equations

    def to_dict(self) -> dict:
        return {
            "rational_point": {k: render_rational(v) for k, v in self.rational_point.items()},
            "scale_alpha": self.scale_alpha,
            "integer_point": dict(self.integer_point),
            "verified": self.verified,
            "failed_equations": list(self.failed_equations),
        }


def weighted_scale(point: dict[str, object], alpha) -> dict[str, mpq]:
    """Apply ``v -> alpha**weight(v) * v`` to every EL coordinate."""
    a = to_rational(alpha)
    return {v: to_rational(x) * a ** EL_WEIGHTS.weight(v) for v, x in point.items()}


def lift_solution(e10, e01, e11, l, convention: str = "derived") -> LiftResult:
    """Integer point of the full 22-equation system above a biquadratic solution."""
    base = {"E10": to_rational(e10), "E01": to_rational(e01), "E11": to_rational(e11), "L": to_rational(l)}
    if not base["E10"] ** 2 + base["E01"] ** 2:
        raise LiftError("E10^2 + E01^2 == 0: excluded locus")
    point = {v: mpq(0) for v in EL.variables}
    point.update(base)
    if derive_midpoint_equations().m412.evaluate(point):
        raise LiftError("point does not satisfy the biquadratic equation")
    sol = solution_for(convention)
    point["E21"] = sol.e21.evaluate(point)
    point["E12"] = sol.e12.evaluate(point)
    for var, img in elimination_map().images.items():
        point[var] = img.evaluate(point)
    rational = {v: point[v] for v in EL.variables}
    alpha = lcm_of_denominators(rational.values())
    scaled = weighted_scale(rational, alpha)
    integer = {v: int(x) for v, x in scaled.items()}
    assert all(x.denominator == 1 for x in scaled.values())
    failed = tuple(name for name, eq in eform_system().equations().items() if eq.evaluate(integer))
    return LiftResult(rational, alpha, integer, failed)

