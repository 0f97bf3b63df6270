"""Shared fixtures: small algebra corpus and independent cohomology oracles."""

import itertools
from fractions import Fraction

from opcalc.exactlinalg import SparseMatrix, cohomology_dimension
from opcalc.graded import GradedSpace
from opcalc.hochschild import associative_structure, dga_structure
from opcalc.transfer import Contraction, unit_class_structure


def rationals():
    """Q itself."""
    space = GradedSpace("Q", [("1", 0)])
    return associative_structure(space, {("1", "1"): {"1": Fraction(1)}})


def dual_numbers():
    """Q[x]/(x^2)."""
    space = GradedSpace("Q[x]/(x^2)", [("1", 0), ("x", 0)])
    products = {
        ("1", "1"): {"1": Fraction(1)},
        ("1", "x"): {"x": Fraction(1)},
        ("x", "1"): {"x": Fraction(1)},
        ("x", "x"): {},
    }
    return associative_structure(space, products)


def graded_line():
    """Q + Q*eps with |eps| = 1, eps^2 = 0."""
    space = GradedSpace("Q+Qeps", [("1", 0), ("e", 1)])
    products = {
        ("1", "1"): {"1": Fraction(1)},
        ("1", "e"): {"e": Fraction(1)},
        ("e", "1"): {"e": Fraction(1)},
        ("e", "e"): {},
    }
    return associative_structure(space, products)


def split_quadratic():
    """Q x Q presented as Q[v]/(v^2 - 1)."""
    space = GradedSpace("Q[v]/(v^2-1)", [("1", 0), ("v", 0)])
    products = {
        ("1", "1"): {"1": Fraction(1)},
        ("1", "v"): {"v": Fraction(1)},
        ("v", "1"): {"v": Fraction(1)},
        ("v", "v"): {"1": Fraction(1)},
    }
    return associative_structure(space, products)


def corpus():
    return [rationals(), dual_numbers(), graded_line(), split_quadratic()]


def _unital_products(space, extra):
    products = {}
    for l in space.labels:
        products[("1", l)] = {l: Fraction(1)}
        products[(l, "1")] = {l: Fraction(1)}
    products[("1", "1")] = {"1": Fraction(1)}
    products.update(extra)
    return products


def acyclic_extension():
    """Q.1 + Qu + Qw with du = w; all products with u, w vanish."""
    space = GradedSpace("Q+acyclic", [("1", 0), ("u", 0), ("w", 1)])
    products = _unital_products(space, {
        ("u", "u"): {}, ("u", "w"): {}, ("w", "u"): {}, ("w", "w"): {},
    })
    return dga_structure(space, products, {"u": {"w": Fraction(1)}},
                         cutoff=6)


def acyclic_transfer_fixture():
    """Unit-class structure over the extension with its contraction to Q."""
    big = acyclic_extension()
    q_prime = unit_class_structure(big, {"1": Fraction(1)}, vlabel="E")
    small_v = GradedSpace("V", [("e", 0)])
    small_a = GradedSpace("A", [("1", 0)])
    c = Contraction(small_v, small_a, q_prime.vspace, big.space,
                    iv={"e": {"E": Fraction(1)}},
                    pv={"E": {"e": Fraction(1)}}, hv={},
                    ia={"1": {"1": Fraction(1)}},
                    pa={"1": {"1": Fraction(1)}},
                    ha={"w": {"u": Fraction(-1)}})
    return big, q_prime, c


def massey_extension():
    """Nine-dimensional dga whose transfer has a nonzero triple product.

    al*be and be*de become exact, and x*de reaches the degree-two class,
    so the transferred m_3(al, be, de) lands on z.
    """
    space = GradedSpace("massey", [
        ("1", 0), ("al", 1), ("be", 1), ("de", 1), ("x", 1), ("y", 1),
        ("z", 2), ("w1", 2), ("w2", 2)])
    products = _unital_products(space, {
        ("al", "be"): {"w1": Fraction(1)},
        ("be", "de"): {"w2": Fraction(1)},
        ("x", "de"): {"z": Fraction(1)},
    })
    return dga_structure(space, products,
                         {"x": {"w1": Fraction(1)}, "y": {"w2": Fraction(1)}},
                         cutoff=6)


def massey_transfer_fixture():
    big = massey_extension()
    q_prime = unit_class_structure(big, {"1": Fraction(1)}, vlabel="E")
    small_v = GradedSpace("V", [("e", 0)])
    small_a = GradedSpace("H", [("1", 0), ("al", 1), ("be", 1), ("de", 1),
                                ("z", 2)])
    one = Fraction(1)
    c = Contraction(small_v, small_a, q_prime.vspace, big.space,
                    iv={"e": {"E": one}}, pv={"E": {"e": one}}, hv={},
                    ia={l: {l: one} for l in small_a.labels},
                    pa={l: {l: one} for l in small_a.labels},
                    ha={"w1": {"x": -one}, "w2": {"y": -one}})
    return big, q_prime, c


def degree_zero_corpus():
    return [rationals(), dual_numbers(), split_quadratic()]


# ---------------------------------------------------------------------------
# normalized-complex oracle (classical differential, unit label excluded)


def _normalized_basis(ainf, unit, j):
    labels = [l for l in ainf.space.labels if l != unit]
    out = []
    for inputs in itertools.product(labels, repeat=j):
        for label in ainf.space.labels:
            out.append((inputs, label))
    return out


def _product(ainf, l1, l2):
    m2 = ainf.m[2]
    return m2.evaluate((l1, l2))


def _normalized_matrix(ainf, unit, j):
    """Classical delta: C^j -> C^{j+1} on unit-normalized cochains."""
    src = _normalized_basis(ainf, unit, j)
    dst = _normalized_basis(ainf, unit, j + 1)
    src_index = {e: i for i, e in enumerate(src)}
    entries = {}

    def bump(r, c, v):
        if v:
            entries[(r, c)] = entries.get((r, c), Fraction(0)) + v

    for r, (tinputs, tlabel) in enumerate(dst):
        for c, (inputs, label) in enumerate(src):
            val = Fraction(0)
            if inputs == tinputs[1:]:
                val += _product(ainf, tinputs[0], label).get(tlabel, 0)
            for i in range(j):
                for ml, mc in _product(ainf, tinputs[i], tinputs[i + 1]).items():
                    if ml == unit:
                        continue
                    if inputs == tinputs[:i] + (ml,) + tinputs[i + 2:]:
                        val += (-1 if i % 2 == 0 else 1) * mc * (1 if label == tlabel else 0)
            if inputs == tinputs[:-1]:
                sgn = -1 if j % 2 == 0 else 1
                val += sgn * _product(ainf, label, tinputs[-1]).get(tlabel, 0)
            bump(r, c, val)
    return SparseMatrix(len(dst), len(src),
                        {k: v for k, v in entries.items() if v != 0})


def normalized_hh_dimension(ainf, unit, n):
    if n == 0:
        d_in = SparseMatrix(len(_normalized_basis(ainf, unit, 0)), 0)
    else:
        d_in = _normalized_matrix(ainf, unit, n - 1)
    d_out = _normalized_matrix(ainf, unit, n)
    return cohomology_dimension(d_in, d_out)
