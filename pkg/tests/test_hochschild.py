"""Bracket, Maurer-Cartan, cohomology and polyvector tests."""

import itertools
import json
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from opcalc.graded import GradedSpace
from opcalc.hochschild import (
    AInfinityStructure, Cochain, PolyvectorAlgebra, TruncatedPolynomialAlgebra,
    TruncationError, algebra_from_json, algebra_to_json, associative_structure,
    basis_cochain, cup, gerstenhaber_bracket, hkr_cochain,
    hkr_windowed_cocycle_check, hochschild_cohomology, identity_cochain,
    maurer_cartan_check, schouten_bracket, wedge, weighted_hochschild_dimension,
    zero_cochain,
)

from helpers import (
    corpus, degree_zero_corpus, dual_numbers, graded_line,
    normalized_hh_dimension, rationals, split_quadratic,
)


def brute_associator(ainf, a, b, c):
    """(ab)c - a(bc) computed without the bracket machinery."""
    m2 = ainf.component(2)
    out = {}
    for l, cf in m2.evaluate((a, b)).items():
        for l2, cf2 in m2.evaluate((l, c)).items():
            out[l2] = out.get(l2, Fraction(0)) + cf * cf2
    for l, cf in m2.evaluate((b, c)).items():
        for l2, cf2 in m2.evaluate((a, l)).items():
            out[l2] = out.get(l2, Fraction(0)) - cf * cf2
    return {l: c for l, c in out.items() if c != 0}


def test_bracket_of_product_with_itself_is_twice_associator():
    for ainf in degree_zero_corpus():
        m2 = ainf.m[2]
        br = gerstenhaber_bracket(m2, m2)
        for triple in itertools.product(ainf.space.labels, repeat=3):
            expected = brute_associator(ainf, *triple)
            got = br.evaluate(triple)
            assert got == {l: 2 * c for l, c in expected.items()}, triple


def test_bracket_antisymmetry_small():
    ainf = dual_numbers()
    space = ainf.space
    cochains = [basis_cochain(space, ins, out)
                for k in (0, 1, 2)
                for ins in itertools.product(space.labels, repeat=k)
                for out in space.labels]
    for p in cochains[:12]:
        for q in cochains[:12]:
            lhs = gerstenhaber_bracket(p, q)
            rhs = gerstenhaber_bracket(q, p)
            exp = (p.total_degree + 1) * (q.total_degree + 1)
            sign = -1 if exp % 2 else 1
            assert lhs.table == rhs.scale(-sign).table


def test_bracket_graded_jacobi_spot_checks():
    ainf = graded_line()
    space = ainf.space
    picks = [basis_cochain(space, ("e",), "1"),
             basis_cochain(space, ("1", "e"), "e"),
             basis_cochain(space, ("e", "e"), "1"),
             basis_cochain(space, (), "e")]
    for p, q, r in itertools.combinations(picks, 3):
        dp, dq, dr = (x.total_degree + 1 for x in (p, q, r))
        t1 = gerstenhaber_bracket(p, gerstenhaber_bracket(q, r))
        t2 = gerstenhaber_bracket(q, gerstenhaber_bracket(r, p)).scale(
            -1 if (dp * (dq + dr)) % 2 else 1)
        t3 = gerstenhaber_bracket(r, gerstenhaber_bracket(p, q)).scale(
            -1 if (dr * (dp + dq)) % 2 else 1)
        total = t1.add(t2).add(t3)
        assert total.is_zero(), (p, q, r)


def test_bracket_is_a_differential_under_mc():
    ainf = dual_numbers()
    for k in (0, 1, 2):
        for ins in itertools.product(ainf.space.labels, repeat=k):
            for out in ainf.space.labels:
                p = basis_cochain(ainf.space, ins, out)
                once = ainf.bracket_with(p)
                twice = {}
                for piece in once.values():
                    for arity, q in ainf.bracket_with(piece).items():
                        prev = twice.get(arity)
                        twice[arity] = q if prev is None else prev.add(q)
                for q in twice.values():
                    assert q.is_zero()


def test_mc_holds_on_corpus():
    for ainf in corpus():
        assert maurer_cartan_check(ainf, 4) == []


def test_mc_reports_exact_defect():
    space = GradedSpace("bad", [("1", 0), ("x", 0)])
    products = {("1", "1"): {"1": Fraction(1)},
                ("x", "x"): {"1": Fraction(1)}}
    ainf = associative_structure(space, products)
    bad = maurer_cartan_check(ainf, 3)
    assert bad
    r, inputs, label, coeff = bad[0]
    assert r == 3
    expected = brute_associator(ainf, *inputs)
    assert expected[label] * 2 == coeff


@settings(max_examples=60, deadline=None)
@given(st.lists(st.integers(min_value=-2, max_value=2), min_size=8, max_size=8))
def test_mc_iff_associativity_random_products(coeffs):
    space = GradedSpace("rand", [("a", 0), ("b", 0)])
    labels = ["a", "b"]
    products = {}
    idx = 0
    for l1 in labels:
        for l2 in labels:
            out = {}
            for l3 in labels:
                if coeffs[idx] != 0:
                    out[l3] = Fraction(coeffs[idx])
                idx += 1
            products[(l1, l2)] = out
    ainf = associative_structure(space, products)
    flat = maurer_cartan_check(ainf, 3) == []
    brute = all(not brute_associator(ainf, *t)
                for t in itertools.product(labels, repeat=3))
    assert flat == brute


FROZEN_HH = {
    "Q": {0: 1, 1: 0, 2: 0},
    "Q[x]/(x^2)": {0: 2, 1: 1, 2: 1, 3: 1},
    "Q[v]/(v^2-1)": {0: 2, 1: 0, 2: 0},
}


def test_hochschild_cohomology_matches_frozen_table():
    for ainf in degree_zero_corpus():
        table = FROZEN_HH[ainf.space.name]
        for n, want in table.items():
            dim, reps = hochschild_cohomology(ainf, n, max(n, 1))
            assert dim == want, (ainf.space.name, n)
            assert len(reps) == want


def test_hochschild_cohomology_agrees_with_normalized_oracle():
    for ainf in degree_zero_corpus():
        for n in (0, 1, 2):
            dim, _ = hochschild_cohomology(ainf, n, max(n, 1))
            assert dim == normalized_hh_dimension(ainf, "1", n)


def test_representatives_are_cocycles_not_coboundaries():
    ainf = dual_numbers()
    dim, reps = hochschild_cohomology(ainf, 1, 1)
    assert dim == 1
    rep = reps[0]
    image = ainf.bracket_with(rep)
    for piece in image.values():
        assert piece.is_zero()
    # the x d/dx class: entry (x,) -> x present, not a multiple of d(C^0)
    assert rep.evaluate(("x",))


def test_graded_complex_without_closure_raises():
    with pytest.raises(TruncationError):
        hochschild_cohomology(graded_line(), 1, 4)


def test_cup_leibniz_degree_zero():
    ainf = dual_numbers()
    space = ainf.space
    small = [basis_cochain(space, ins, out)
             for k in (1, 2)
             for ins in itertools.product(space.labels, repeat=k)
             for out in space.labels]

    def d(p):
        pieces = ainf.bracket_with(p)
        assert len(pieces) <= 1
        return list(pieces.values())[0] if pieces else zero_cochain(
            space, p.arity + 1, p.total_degree + 1)

    for f in small[:8]:
        for g in small[:8]:
            lhs = d(cup(f, g))
            sign = -1 if g.arity % 2 else 1
            rhs = cup(d(f), g).scale(sign).add(cup(f, d(g)))
            assert lhs.table == rhs.table, (f, g)


def test_identity_cochain_bracket_reproduces_product():
    ainf = dual_numbers()
    br = gerstenhaber_bracket(ainf.m[2], identity_cochain(ainf.space))
    assert br.table == ainf.m[2].table


# ---------------------------------------------------------------------------
# weighted strands of truncated polynomial algebras

FROZEN_WEIGHTED_HH = {
    (1, 3): {0: 4, 1: 3, 2: 0},
    (2, 3): {0: 10, 1: 18, 2: 7},
}


def test_weighted_hh_matches_windowed_polyvectors():
    for (d, D), table in FROZEN_WEIGHTED_HH.items():
        algebra = TruncatedPolynomialAlgebra(d, D)
        poly = PolyvectorAlgebra(d, D)
        for n, want in table.items():
            got = weighted_hochschild_dimension(algebra, n)
            assert got == want, (d, D, n)
            assert poly.windowed_dimension(n) == want


def test_polyvector_dimensions():
    poly = PolyvectorAlgebra(2, 3)
    assert poly.dimension(0) == 10
    assert poly.dimension(1) == 20
    assert poly.dimension(2) == 10
    assert poly.dimension(3) == 0


# ---------------------------------------------------------------------------
# Schouten bracket and HKR


def test_schouten_vector_fields_commutator():
    poly = PolyvectorAlgebra(2, 3)
    x_dx = poly.monomial((1, 0), (0,))
    dx = poly.monomial((0, 0), (0,))
    got = schouten_bracket(dx, x_dx)
    assert got == dx


def test_schouten_bivector_with_function():
    poly = PolyvectorAlgebra(2, 3)
    pi = poly.monomial((0, 0), (0, 1))
    f = poly.monomial((1, 1), ())
    got = schouten_bracket(pi, f)
    want = poly.monomial((1, 0), (0,)) - poly.monomial((0, 1), (1,))
    assert got == want


def test_schouten_self_bracket_of_vector_field_vanishes():
    poly = PolyvectorAlgebra(2, 3)
    gamma = poly.monomial((1, 0), (0,)) + poly.monomial((0, 2), (1,)).scale(3)
    assert schouten_bracket(gamma, gamma).is_zero()


def test_schouten_antisymmetry_and_jacobi():
    poly = PolyvectorAlgebra(2, 3)
    picks = [poly.monomial((1, 0), (0,)),
             poly.monomial((0, 1), (1,)),
             poly.monomial((0, 0), (0, 1)),
             poly.monomial((1, 1), ())]

    for p, q in itertools.product(picks, repeat=2):
        # antisymmetry: [p,q] = -(-1)^{(jp+1)(jq+1)} [q,p]
        jp = len(list(p.coeffs)[0][1])
        jq = len(list(q.coeffs)[0][1])
        sign = -1 if ((jp + 1) * (jq + 1)) % 2 else 1
        assert schouten_bracket(p, q) == schouten_bracket(q, p).scale(-sign)

    for p, q, r in itertools.combinations(picks, 3):
        jp = len(list(p.coeffs)[0][1]) + 1
        jq = len(list(q.coeffs)[0][1]) + 1
        jr = len(list(r.coeffs)[0][1]) + 1
        t1 = schouten_bracket(p, schouten_bracket(q, r))
        t2 = schouten_bracket(q, schouten_bracket(r, p)).scale(
            -1 if (jp * (jq + jr)) % 2 else 1)
        t3 = schouten_bracket(r, schouten_bracket(p, q)).scale(
            -1 if (jr * (jp + jq)) % 2 else 1)
        assert (t1 + t2 + t3).is_zero(), (p, q, r)


def test_schouten_leibniz_over_wedge():
    poly = PolyvectorAlgebra(2, 3)
    p = poly.monomial((0, 0), (0,))
    q = poly.monomial((1, 0), (1,))
    r = poly.monomial((0, 1), ())
    jp, jq = 1, 1
    lhs = schouten_bracket(p, wedge(q, r))
    sign = -1 if ((jp + 1) * jq) % 2 else 1
    rhs = wedge(schouten_bracket(p, q), r) + wedge(q, schouten_bracket(p, r)).scale(sign)
    assert lhs == rhs


def test_wedge_antisymmetry_and_truncation():
    poly = PolyvectorAlgebra(2, 2)
    dx = poly.monomial((0, 0), (0,))
    dy = poly.monomial((0, 0), (1,))
    assert wedge(dx, dy) == wedge(dy, dx).scale(-1)
    assert wedge(dx, dx).is_zero()
    big = poly.monomial((2, 0), ())
    assert wedge(big, poly.monomial((1, 0), ())).is_zero()


def test_hkr_euler_field():
    poly = PolyvectorAlgebra(1, 3)
    euler = poly.monomial((1,), (0,))
    f = hkr_cochain(euler)
    assert f.evaluate(("x",)) == {"x": Fraction(1)}
    assert f.evaluate(("x^2",)) == {"x^2": Fraction(2)}
    assert f.evaluate(("x^3",)) == {"x^3": Fraction(3)}
    assert f.evaluate(("1",)) == {}


def test_hkr_bivector_antisymmetrizes():
    poly = PolyvectorAlgebra(2, 3)
    pi = hkr_cochain(poly.monomial((0, 0), (0, 1)))
    assert pi.evaluate(("x", "y")) == {"1": Fraction(1)}
    assert pi.evaluate(("y", "x")) == {"1": Fraction(-1)}
    assert pi.evaluate(("x", "x")) == {}


def test_hkr_images_are_windowed_cocycles():
    for d, D in ((1, 3), (2, 3)):
        poly = PolyvectorAlgebra(d, D)
        algebra = poly.algebra
        for j in (1, 2):
            for alpha, dirs in poly.basis(j):
                gamma = poly.monomial(alpha, dirs)
                assert hkr_windowed_cocycle_check(algebra, gamma) == [], (alpha, dirs)


# ---------------------------------------------------------------------------
# JSON round trip


def test_algebra_json_roundtrip(tmp_path):
    ainf = dual_numbers()
    data = algebra_to_json(ainf)
    text = json.dumps(data, sort_keys=True)
    back = algebra_from_json(json.loads(text))
    assert back.space.basis == ainf.space.basis
    assert back.m[2].table == ainf.m[2].table
    assert json.dumps(algebra_to_json(back), sort_keys=True) == text
