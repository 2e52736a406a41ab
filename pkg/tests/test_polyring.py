from fractions import Fraction

import pytest
from gmpy2 import mpq
from hypothesis import given, settings
from hypothesis import strategies as st

from _oracles import fraction_eval, int_points, polynomials, to_sympy
from cuboid_eform.cuboid_system import e_values, elementary_basis, generators, phi
from cuboid_eform.polyparse import parse_expression
from cuboid_eform.polyring import (
    EL,
    EL_WEIGHTS,
    HERON,
    MQL,
    Homogeneity,
    Permutation,
    Polynomial,
    RingMismatchError,
    apply_permutation,
    evaluate,
    isqrt_exact,
    lcm_of_denominators,
    render_rational,
    substitute,
    weighted_degree,
)

M = lambda s: parse_expression(s, MQL)  # noqa: E731
E = lambda s: parse_expression(s, EL)  # noqa: E731

CASES = settings(max_examples=120, deadline=None)


# ring axioms against a sympy expansion oracle


@CASES
@given(polynomials(), polynomials())
def test_add_mul_match_sympy(p, q):
    assert to_sympy(p + q) == (to_sympy(p) + to_sympy(q)).expand()
    assert to_sympy(p * q) == (to_sympy(p) * to_sympy(q)).expand()


@CASES
@given(polynomials(), polynomials(), polynomials())
def test_ring_laws(p, q, r):
    z, one = MQL.zero(), MQL.one()
    assert p + q == q + p
    assert p * q == q * p
    assert (p + q) + r == p + (q + r)
    assert (p * q) * r == p * (q * r)
    assert p * (q + r) == p * q + p * r
    assert p + z == p and p * one == p and (p - p).is_zero()


def test_small_examples():
    x1 = MQL.var("x1")
    p0 = M("x1^2+x2^2+x3^2-L^2")
    assert (x1**2 + (-(x1**2))).is_zero()
    assert M("x1^2+x2^2") + M("x3^2-L^2") == p0
    assert M("(x1+x2+x3)^2") - M("2*(x1*x2+x2*x3+x3*x1)") == M("x1^2+x2^2+x3^2")
    g = generators()
    tp3 = M("d1*(x2^2+x3^2-d1^2)+d2*(x3^2+x1^2-d2^2)+d3*(x1^2+x2^2-d3^2)")
    assert M("d1") * g.p1 + M("d2") * g.p2 + M("d3") * g.p3 == tp3


def test_ring_mismatch():
    with pytest.raises(RingMismatchError):
        MQL.var("L") + EL.var("L")
    with pytest.raises(RingMismatchError):
        MQL.var("L") * HERON.var("a")


def test_zero_polynomial():
    z = MQL.zero()
    assert z.is_zero() and len(z) == 0 and z.total_degree() == -1
    assert evaluate(z, {v: 3 for v in MQL.variables}) == 0


# substitution


def test_identity_substitution_and_missing_image():
    p = M("x1*d2^3-7/3*L+1")
    assert substitute(p, {v: MQL.var(v) for v in MQL.variables}) == p
    with pytest.raises(KeyError):
        substitute(p, {"x1": MQL.var("x1")})


def test_substitution_example_gives_p0():
    imgs = elementary_basis().images()
    assert phi(E("E10^2-2*E20-L^2")) == generators().p0
    assert phi(E("L^2")) == M("L^2")
    assert substitute(E("E10"), imgs) == M("x1+x2+x3")


_IMAGES = {v: img for v, img in zip(MQL.variables, [M("x1+d1"), M("x2*L-1/2"), M("x3^2"), M("d1"), M("d1-d2"), M("3*d3"), M("L")])}


@CASES
@given(polynomials(max_terms=4, max_exp=2), polynomials(max_terms=4, max_exp=2))
def test_substitute_is_homomorphism(p, q):
    s = lambda f: substitute(f, _IMAGES)  # noqa: E731
    assert s(p * q + p) == s(p) * s(q) + s(p)


@CASES
@given(int_points(MQL))
def test_evaluate_after_phi_equals_evaluate_at_e_values(point):
    q = E("E10^2*E02-3*E21*E12+E30*L-1/7*E11^2+E03")
    assert evaluate(phi(q), point) == evaluate(q, e_values(point))


@CASES
@given(polynomials(), int_points(MQL))
def test_evaluate_matches_fraction_oracle(p, point):
    assert evaluate(p, point) == fraction_eval(p, point)


def test_evaluate_examples():
    m412 = E("4*E11^2+E10^4+E01^4-2*E10^2*E01^2-2*L^2*E10^2-6*E01^2*L^2+L^4")
    pt = {v: 0 for v in EL.variables} | {"E10": 2, "E01": 1, "E11": 1, "L": 1}
    assert evaluate(m412, pt) == 0
    heron = parse_expression("(4*S)^2+(a^2+b^2-c^2)^2-4*a^2*b^2", HERON)
    assert evaluate(heron, {"a": 3, "b": 4, "c": 5, "S": 6}) == 0
    with pytest.raises(KeyError):
        evaluate(m412, {"E10": 1})


# permutations


def test_group_action_on_generators():
    g = generators()
    gens = [g.p0, g.p1, g.p2, g.p3]
    perms = Permutation.all()
    assert len(perms) == 6
    pairs = 0
    for s in perms:
        for t in perms:
            for p in gens:
                assert apply_permutation(p, s * t) == apply_permutation(apply_permutation(p, t), s)
            pairs += 1
    assert pairs == 36


def test_permutation_examples():
    g = generators()
    assert apply_permutation(g.p1, Permutation.identity()) == g.p1
    assert apply_permutation(g.p1, Permutation.transposition(1, 2)) == g.p2
    for s in Permutation.all():
        assert apply_permutation(g.p0, s) == g.p0
        assert s * s.inverse() == Permutation.identity()
    with pytest.raises(RingMismatchError):
        apply_permutation(E("E10"), Permutation.identity())


# weights


def test_weighted_degree_examples():
    assert weighted_degree(E("E10^2-2*E20-L^2"), EL_WEIGHTS) == 2
    assert weighted_degree(E("4*E11^2+E10^4+E01^4-2*E10^2*E01^2-2*L^2*E10^2-6*E01^2*L^2+L^4")) == 4
    assert weighted_degree(E("E10+E20")) is Homogeneity.NOT_HOMOGENEOUS
    assert weighted_degree(EL.zero()) is Homogeneity.ZERO


@settings(max_examples=100, deadline=None)
@given(polynomials(EL, max_terms=5, max_exp=2))
def test_weighted_degree_agrees_with_scaling(p):
    # p(t^w x) == t^d p(x) exactly when p is weighted homogeneous of degree d
    deg = weighted_degree(p)
    pt = {v: Fraction(i + 2, 3) for i, v in enumerate(EL.variables)}
    scaled = {v: x * 2 ** EL_WEIGHTS.weight(v) for v, x in pt.items()}
    if isinstance(deg, int):
        assert fraction_eval(p, scaled) == 2**deg * fraction_eval(p, pt)


# helpers


def test_rational_helpers():
    assert render_rational(mpq(6, 3)) == "2"
    assert render_rational(Fraction(-3, 6)) == "-1/2"
    assert lcm_of_denominators([mpq(1, 4), mpq(5, 6), 3]) == 12
    assert isqrt_exact(49) == 7 and isqrt_exact(50) is None and isqrt_exact(-4) is None


def test_degree_overflow_guard():
    with pytest.raises(OverflowError):
        MQL.var("x1") ** 40000 * MQL.var("x1") ** 40000


@given(st.integers(-5, 5))
def test_const_and_scale(c):
    p = M("x1-2*L")
    assert p.scale(c) == MQL.const(c) * p
    assert isinstance(p.scale(c), Polynomial)
