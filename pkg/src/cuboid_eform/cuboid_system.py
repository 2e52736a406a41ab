"""Perfect-cuboid polynomials, their E-forms, and the identity checks tying them together.

Every displayed formula below is kept as text in the parser's format and is
validated against an independent construction rather than trusted.
"""
from __future__ import annotations

from dataclasses import dataclass, fields
from functools import lru_cache

from gmpy2 import mpq

from .polyparse import load_kernel_corpus, parse_expression
from .polyring import (
    EL,
    EL_WEIGHTS,
    MQL,
    Permutation,
    Polynomial,
    apply_permutation,
    substitute,
    weighted_degree,
)
from .report import Check, VerificationReport

# -- source transcriptions --------------------------------------------------

# p_0 .. p_3
GENERATOR_SOURCES = {
    "p0": "x1^2+x2^2+x3^2-L^2",
    "p1": "x2^2+x3^2-d1^2",
    "p2": "x3^2+x1^2-d2^2",
    "p3": "x1^2+x2^2-d3^2",
}

# displayed right-hand sides of tp1 .. tp8
FACTOR_SOURCES = {
    "tp1": "x1^2+x2^2+x3^2-L^2",
    "tp2": "(x2^2+x3^2-d1^2)+(x3^2+x1^2-d2^2)+(x1^2+x2^2-d3^2)",
    "tp3": "d1*(x2^2+x3^2-d1^2)+d2*(x3^2+x1^2-d2^2)+d3*(x1^2+x2^2-d3^2)",
    "tp4": "x1*(x2^2+x3^2-d1^2)+x2*(x3^2+x1^2-d2^2)+x3*(x1^2+x2^2-d3^2)",
    "tp5": "x1*d1*(x2^2+x3^2-d1^2)+x2*d2*(x3^2+x1^2-d2^2)+x3*d3*(x1^2+x2^2-d3^2)",
    "tp6": "x1^2*(x2^2+x3^2-d1^2)+x2^2*(x3^2+x1^2-d2^2)+x3^2*(x1^2+x2^2-d3^2)",
    "tp7": "d1^2*(x2^2+x3^2-d1^2)+d2^2*(x3^2+x1^2-d2^2)+d3^2*(x1^2+x2^2-d3^2)",
    "tp8": "x1^2*d1^2*(x2^2+x3^2-d1^2)+x2^2*d2^2*(x3^2+x1^2-d2^2)"
    "+x3^2*d3^2*(x1^2+x2^2-d3^2)",
}

# elementary multisymmetric polynomials; keys are the EL variables they replace
ELEMENTARY_SOURCES = {
    "E10": "x1+x2+x3",
    "E20": "x1*x2+x2*x3+x3*x1",
    "E30": "x1*x2*x3",
    "E01": "d1+d2+d3",
    "E02": "d1*d2+d2*d3+d3*d1",
    "E03": "d1*d2*d3",
    "E21": "x1*x2*d3+x2*x3*d1+x3*x1*d2",
    "E11": "x1*d2+d1*x2+x2*d3+d2*x3+x3*d1+d3*x1",
    "E12": "x1*d2*d3+x2*d3*d1+x3*d1*d2",
}

# left-hand sides of the eight E-form equations, each "= 0"
EFORM_SOURCES = {
    "eq31": "E10^2-2*E20-L^2",
    "eq32": "2*E02-4*E20-E01^2+2*E10^2",
    "eq33a": "E10*E11-3*E03-E21+3*E01*E02-E20*E01-E01^3",
    "eq33b": "E01*E11-E12-3*E30+E10*E02+E20*E10-E01^2*E10",
    "eq34": "-E10*E21-E01*E12-E01*E30-E01^3*E10+E01^2*E11"
    "-E02*E11+E11*E20-E10*E03+2*E10*E01*E02",
    "eq35": "4*E01*E10*E11-3*E01^2*E10^2+2*E10^2*E02+2*E20*E01^2-2*E10*E12"
    "-2*E02*E20-2*E01*E21-E11^2-12*E10*E30+6*E20^2",
    "eq36": "4*E01*E10*E11-4*E10^2*E02-4*E20*E01^2-2*E10*E12+10*E02*E20"
    "-2*E01*E21-E11^2-12*E01*E03-3*E01^4-6*E02^2+12*E01^2*E02",
    "eq37": "9*E01*E03*E20-7*E01^2*E02*E20+2*E02*E10*E12-2*E01^2*E10*E12"
    "+3*E03*E10*E11+4*E01^3*E10*E11-7*E01*E02*E10*E11-6*E01*E03*E10^2"
    "+8*E01^2*E02*E10^2+3*E01*E11*E30-2*E01*E20*E21+E10*E12*E20"
    "-E02*E10^2*E20+E01*E10*E11*E20+9*E02*E10*E30-2*E02*E20^2"
    "+2*E01^2*E20^2-E11^2*E20-3*E12*E30+E02*E11^2-E01^2*E11^2"
    "-2*E02^2*E10^2+2*E01^4*E20+2*E02^2*E20-3*E03*E21"
    "-2*E01^3*E21+5*E01*E02*E21-6*E01^2*E10*E30-3*E01^4*E10^2",
}

# E-form equation -> (factor polynomial, multiplier stated in the text)
EFORM_PAIRING = {
    "eq31": ("tp1", 1),
    "eq32": ("tp2", 1),
    "eq33a": ("tp3", 1),
    "eq33b": ("tp4", 1),
    "eq34": ("tp5", 1),
    "eq35": ("tp6", 3),
    "eq36": ("tp7", 3),
    "eq37": ("tp8", 3),
}


# -- domain types -----------------------------------------------------------


@dataclass(frozen=True)
class CuboidGenerators:
    p0: Polynomial
    p1: Polynomial
    p2: Polynomial
    p3: Polynomial

    def indexed(self) -> dict[int, Polynomial]:
        return {0: self.p0, 1: self.p1, 2: self.p2, 3: self.p3}


@dataclass(frozen=True)
class FactorGenerators:
    tp1: Polynomial
    tp2: Polynomial
    tp3: Polynomial
    tp4: Polynomial
    tp5: Polynomial
    tp6: Polynomial
    tp7: Polynomial
    tp8: Polynomial

    def as_dict(self) -> dict[str, Polynomial]:
        return {f.name: getattr(self, f.name) for f in fields(self)}


@dataclass(frozen=True)
class ElementaryBasis:
    e10: Polynomial
    e20: Polynomial
    e30: Polynomial
    e01: Polynomial
    e02: Polynomial
    e03: Polynomial
    e21: Polynomial
    e11: Polynomial
    e12: Polynomial

    def images(self) -> dict[str, Polynomial]:
        """The substitution ``E_ij -> e_[i,j]``, ``L -> L``."""
        out = {"E" + f.name[1:]: getattr(self, f.name) for f in fields(self)}
        out["L"] = MQL.var("L")
        return out


@dataclass(frozen=True)
class EFormSystem:
    eq31: Polynomial
    eq32: Polynomial
    eq33a: Polynomial
    eq33b: Polynomial
    eq34: Polynomial
    eq35: Polynomial
    eq36: Polynomial
    eq37: Polynomial
    kernel: tuple[tuple[str, Polynomial], ...]

    def eforms(self) -> dict[str, Polynomial]:
        return {f.name: getattr(self, f.name) for f in fields(self) if f.name != "kernel"}

    def equations(self) -> dict[str, Polynomial]:
        """All 22 polynomials, E-forms first, then ``~q1 .. ~q14``."""
        out = self.eforms()
        out.update(self.kernel)
        return out


# -- builders ---------------------------------------------------------------


@lru_cache(maxsize=None)
def generators() -> CuboidGenerators:
    return CuboidGenerators(**{k: parse_expression(v, MQL) for k, v in GENERATOR_SOURCES.items()})


def build_factor_generators(gens: CuboidGenerators | None = None) -> FactorGenerators:
    """The eight combinations assembled by ring arithmetic from ``p_0 .. p_3``."""
    g = gens or generators()
    x1, x2, x3, d1, d2, d3, _ = MQL.gens()
    ps = (g.p1, g.p2, g.p3)

    def combo(ws):
        return ws[0] * ps[0] + ws[1] * ps[1] + ws[2] * ps[2]

    one = MQL.one()
    return FactorGenerators(
        tp1=g.p0,
        tp2=combo((one, one, one)),
        tp3=combo((d1, d2, d3)),
        tp4=combo((x1, x2, x3)),
        tp5=combo((x1 * d1, x2 * d2, x3 * d3)),
        tp6=combo((x1**2, x2**2, x3**2)),
        tp7=combo((d1**2, d2**2, d3**2)),
        tp8=combo((x1**2 * d1**2, x2**2 * d2**2, x3**2 * d3**2)),
    )


@lru_cache(maxsize=None)
def factor_generators() -> FactorGenerators:
    return build_factor_generators()


@lru_cache(maxsize=None)
def transcribed_factors() -> dict[str, Polynomial]:
    return {k: parse_expression(v, MQL) for k, v in FACTOR_SOURCES.items()}


@lru_cache(maxsize=None)
def elementary_basis() -> ElementaryBasis:
    return ElementaryBasis(
        **{"e" + k[1:]: parse_expression(v, MQL) for k, v in ELEMENTARY_SOURCES.items()}
    )


@lru_cache(maxsize=None)
def eform_system() -> EFormSystem:
    eqs = {k: parse_expression(v, EL) for k, v in EFORM_SOURCES.items()}
    kernel = tuple(load_kernel_corpus().items())
    return EFormSystem(**eqs, kernel=kernel)


def phi(q: Polynomial) -> Polynomial:
    """Substitution homomorphism ``Q[E,L] -> Sym Q[M,L]``."""
    return substitute(q, elementary_basis().images())


def e_values(point: dict[str, object]) -> dict[str, object]:
    """Values of the ten EL coordinates at an MQL point."""
    return {name: img.evaluate(point) for name, img in elementary_basis().images().items()}


# -- verification suites ----------------------------------------------------


def verify_s3_invariance(gens: CuboidGenerators | None = None) -> VerificationReport:
    """``sigma(p0) == p0``, ``sigma(p_i) == p_sigma(i)``; factors and e-basis invariant."""
    g = gens or generators()
    ps = g.indexed()
    report = VerificationReport()
    perms = Permutation.all()
    for sigma in perms:
        report.record(f"s3/p0/{sigma}", apply_permutation(ps[0], sigma) - ps[0])
        for i in (1, 2, 3):
            report.record(
                f"s3/p{i}/{sigma}", apply_permutation(ps[i], sigma) - ps[sigma(i)], image=f"p{sigma(i)}"
            )
    tps = build_factor_generators(g).as_dict() if gens else factor_generators().as_dict()
    basis = {f"e{k[1:]}": v for k, v in elementary_basis().images().items() if k != "L"}
    for name, p in list(tps.items()) + list(basis.items()):
        for sigma in perms:
            report.record(f"s3/{name}/{sigma}", apply_permutation(p, sigma) - p)
    return report


def verify_factor_expansions(transcriptions: dict[str, Polynomial] | None = None) -> VerificationReport:
    """Ring-built ``tp1 .. tp8`` against the displayed right-hand sides."""
    tr = transcriptions if transcriptions is not None else transcribed_factors()
    report = VerificationReport()
    for name, built in factor_generators().as_dict().items():
        report.record(f"factor/{name}", built - tr[name], terms=len(built))
    return report


def scalar_ratio(p: Polynomial, q: Polynomial) -> mpq | None:
    """``c`` with ``p == c*q`` if such a rational exists, else ``None``."""
    if q.is_zero():
        return mpq(0) if p.is_zero() else None
    mono, lc = q.leading_term()
    c = p.coefficient(mono) / lc
    return c if (p - q.scale(c)).is_zero() else None


def verify_eform(eforms: dict[str, Polynomial] | None = None) -> VerificationReport:
    """``phi(eq) == c * tp`` with the multiplier discovered and compared to the text."""
    eqs = eforms if eforms is not None else eform_system().eforms()
    tps = factor_generators().as_dict()
    report = VerificationReport()
    for name, (tp_name, expected) in EFORM_PAIRING.items():
        image = phi(eqs[name])
        tp = tps[tp_name]
        c = scalar_ratio(image, tp)
        residue = image - tp.scale(expected)
        report.add(
            Check(
                f"eform/{name}~{tp_name}",
                residue.is_zero(),
                None if residue.is_zero() else str(residue),
                {
                    "factor": tp_name,
                    "expected_multiplier": expected,
                    "found_multiplier": None if c is None else str(c),
                },
            )
        )
    return report


def verify_kernel_membership(kernel: dict[str, Polynomial] | None = None) -> VerificationReport:
    """``phi(~q_i) == 0`` for each kernel polynomial."""
    ker = kernel if kernel is not None else dict(eform_system().kernel)
    report = VerificationReport()
    for name, q in ker.items():
        report.record(f"kernel/{name}", phi(q), terms=len(q), total_degree=q.total_degree())
    return report


def verify_weighted_homogeneity() -> VerificationReport:
    """Each of the 22 EL polynomials is weighted homogeneous."""
    report = VerificationReport()
    for name, p in eform_system().equations().items():
        deg = weighted_degree(p, EL_WEIGHTS)
        ok = isinstance(deg, int)
        report.add(
            Check(f"homogeneity/{name}", ok, None if ok else str(p), {"weighted_degree": deg if ok else deg.value})
        )
    return report


SUITES = {
    "s3": verify_s3_invariance,
    "factor": verify_factor_expansions,
    "eform": verify_eform,
    "kernel": verify_kernel_membership,
}


def verify_all() -> VerificationReport:
    report = VerificationReport()
    for suite in SUITES.values():
        report.extend(suite())
    return report
