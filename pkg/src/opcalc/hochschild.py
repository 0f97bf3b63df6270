"""Hochschild cochains of A-infinity algebras and polyvector fields.

A k-cochain with internal map degree d sits in total degree k + d; the
suspensions placing Hom(A^(x)k, A) in that degree make the Gerstenhaber
bracket a degree -1 Lie bracket, the Maurer-Cartan element (product +
differential + higher operations) has total degree 2, and [m, -] is a
degree +1 differential.

In the bracket signs the printed symbols k_1, k_2 are total degrees;
in summation ranges they are arities (the two agree for degree-0
algebras where the formulas are usually quoted).
"""

import itertools
import json
from fractions import Fraction

from .exactlinalg import SparseMatrix, cohomology_dimension
from .graded import GradedSpace


class TruncationError(Exception):
    """A computation left the configured truncation window."""


class Cochain(object):
    """Homogeneous multilinear map A^(x)k -> A stored on basis tuples.

    table: dict input-label-tuple -> dict output-label -> Fraction.
    """

    def __init__(self, space, arity, total_degree, table=None):
        assert arity >= 0
        self.space = space
        self.arity = arity
        self.total_degree = total_degree
        self.table = {}
        if table:
            for inputs, out in table.items():
                inputs = tuple(inputs)
                assert len(inputs) == arity, inputs
                cleaned = {}
                for label, c in out.items():
                    c = Fraction(c)
                    if c == 0:
                        continue
                    want = total_degree - arity + sum(space.degree[l] for l in inputs)
                    assert space.degree[label] == want, \
                        "entry %s -> %s breaks degree %d" % (inputs, label, total_degree)
                    cleaned[label] = c
                if cleaned:
                    self.table[inputs] = cleaned

    def evaluate(self, inputs):
        return dict(self.table.get(tuple(inputs), {}))

    def is_zero(self):
        return not self.table

    def __eq__(self, other):
        if not isinstance(other, Cochain):
            return NotImplemented
        return (self.space is other.space and self.arity == other.arity
                and self.table == other.table)

    def __ne__(self, other):
        return not self.__eq__(other)

    def add(self, other):
        assert self.space is other.space and self.arity == other.arity
        assert self.total_degree == other.total_degree or self.is_zero() or other.is_zero()
        table = {k: dict(v) for k, v in self.table.items()}
        for inputs, out in other.table.items():
            dst = table.setdefault(inputs, {})
            for label, c in out.items():
                dst[label] = dst.get(label, Fraction(0)) + c
        deg = self.total_degree if not self.is_zero() else other.total_degree
        return Cochain(self.space, self.arity, deg,
                       _strip(table))

    def scale(self, c):
        c = Fraction(c)
        if c == 0:
            return Cochain(self.space, self.arity, self.total_degree)
        return Cochain(self.space, self.arity, self.total_degree,
                       {k: {l: v * c for l, v in out.items()}
                        for k, out in self.table.items()})

    def internal_degree(self):
        return self.total_degree - self.arity

    def __repr__(self):
        return "Cochain(arity=%d, deg=%d, %d entries)" % (
            self.arity, self.total_degree, len(self.table))


def _strip(table):
    out = {}
    for inputs, val in table.items():
        val = {l: c for l, c in val.items() if c != 0}
        if val:
            out[inputs] = val
    return out


def zero_cochain(space, arity, total_degree):
    return Cochain(space, arity, total_degree)


def basis_cochain(space, inputs, output):
    """Indicator cochain e_{inputs -> output}."""
    inputs = tuple(inputs)
    deg = len(inputs) + space.degree[output] - sum(space.degree[l] for l in inputs)
    return Cochain(space, len(inputs), deg, {inputs: {output: Fraction(1)}})


def identity_cochain(space):
    """The identity 1-cochain (total degree 1)."""
    return Cochain(space, 1, 1, {(l,): {l: Fraction(1)} for l in space.labels})


def gerstenhaber_bracket(q1, q2):
    """[q1, q2]_G; result has arity k1+k2-1 and total degree d1+d2-1."""
    if q1.space is not q2.space:
        raise ValueError("cochains live on different spaces")
    d1, d2 = q1.total_degree, q2.total_degree
    first = _insertion_sum(q1, q2)
    second = _insertion_sum(q2, q1)
    sign = -1 if ((d1 + 1) * (d2 + 1)) % 2 else 1
    return first.add(second.scale(-sign))


def _insertion_sum(q1, q2):
    """Sum over insertion slots of q1(..., q2(...), ...) with Koszul signs."""
    space = q1.space
    k1, k2 = q1.arity, q2.arity
    arity = k1 + k2 - 1
    deg = q1.total_degree + q2.total_degree - 1
    if arity < 0 or k1 == 0:
        return Cochain(space, max(arity, 0), deg)
    table = {}
    opdeg2 = q2.total_degree + 1
    for inner_inputs, inner_out in q2.table.items():
        for prefix in itertools.product(space.labels, repeat=k1 - 1):
            for i in range(k1):
                head, tail = prefix[:i], prefix[i:]
                exp = opdeg2 * (sum(space.degree[l] for l in head) + i)
                sign = -1 if exp % 2 else 1
                for mid, c_mid in inner_out.items():
                    outer = q1.evaluate(head + (mid,) + tail)
                    if not outer:
                        continue
                    key = head + inner_inputs + tail
                    dst = table.setdefault(key, {})
                    for label, c in outer.items():
                        dst[label] = dst.get(label, Fraction(0)) + sign * c_mid * c
    return Cochain(space, arity, deg, _strip(table))


class AInfinityStructure(object):
    """Taylor coefficients m_k (arity k, total degree 2) up to cutoff."""

    def __init__(self, space, m, cutoff, weights=None):
        self.space = space
        self.m = {}
        self.cutoff = cutoff
        for k, coch in m.items():
            assert 1 <= k <= cutoff
            assert coch.arity == k
            if not coch.is_zero():
                assert coch.total_degree == 2, \
                    "m_%d must have total degree 2, got %d" % (k, coch.total_degree)
                self.m[k] = coch
        # optional extra grading (polynomial weight) used by windowed HH
        self.weights = weights

    def component(self, k):
        if k in self.m:
            return self.m[k]
        return zero_cochain(self.space, k, 2)

    def bracket_with(self, p):
        """[m, p]_G as a dict arity -> Cochain (homogeneous pieces)."""
        out = {}
        for k, mk in self.m.items():
            piece = gerstenhaber_bracket(mk, p)
            if not piece.is_zero():
                prev = out.get(piece.arity)
                out[piece.arity] = piece if prev is None else prev.add(piece)
        return {k: v for k, v in out.items() if not v.is_zero()}


def maurer_cartan_check(ainf, max_arity=None):
    """Violations of [m,m]_G = 0; empty list iff MC holds up to the cutoff."""
    if max_arity is None:
        max_arity = ainf.cutoff
    violations = []
    for r in range(1, max_arity + 1):
        defect = zero_cochain(ainf.space, r, 3)
        for i, mi in ainf.m.items():
            for j, mj in ainf.m.items():
                if i + j - 1 == r:
                    defect = defect.add(gerstenhaber_bracket(mi, mj))
        for inputs, out in sorted(defect.table.items()):
            for label, c in sorted(out.items()):
                violations.append((r, inputs, label, c))
    return violations


def hochschild_differential(ainf, p):
    """[m, p]_G for single-arity p; returns dict arity -> Cochain."""
    return ainf.bracket_with(p)


def _degree_n_basis(space, n, arity_cutoff):
    """All basis cochains of total degree n with arity <= cutoff."""
    out = []
    for k in range(0, arity_cutoff + 1):
        for inputs in itertools.product(space.labels, repeat=k):
            want = n - k + sum(space.degree[l] for l in inputs)
            for label in space.labels:
                if space.degree[label] == want:
                    out.append((inputs, label))
    return out


def _closure_possible(space, n, arity_cutoff):
    """True if no degree-n basis cochain exists above the arity cutoff."""
    degs = sorted({d for _, d in space.basis})
    if degs == [0]:
        # internal degree forced to 0: only arity n carries degree n
        return arity_cutoff >= n
    # mixed degrees: probe higher arities; a cochain of total degree n at
    # arity k needs an input-degree sum s with n - k + s among the basis
    # degrees.  Without an all-zero grading we refuse to certify closure.
    degset = set(degs)
    for k in range(arity_cutoff + 1, arity_cutoff + 65):
        sums = {0}
        for _ in range(k):
            sums = {s + d for s in sums for d in degset}
        if any(n - k + s in degset for s in sums):
            return False
    return False


def _differential_matrix(ainf, src_basis, dst_basis, src_n, arity_cutoff):
    dst_index = {bc: i for i, bc in enumerate(dst_basis)}
    entries = {}
    for c, (inputs, label) in enumerate(src_basis):
        p = basis_cochain(ainf.space, inputs, label)
        for arity, piece in ainf.bracket_with(p).items():
            if arity > arity_cutoff + 1:
                raise TruncationError("differential image at arity %d" % arity)
            for ins, out in piece.table.items():
                for lab, coeff in out.items():
                    key = (ins, lab)
                    if key not in dst_index:
                        raise TruncationError(
                            "image entry %s outside truncated complex" % (key,))
                    entries[(dst_index[key], c)] = \
                        entries.get((dst_index[key], c), Fraction(0)) + coeff
    return SparseMatrix(len(dst_basis), len(src_basis),
                        {k: v for k, v in entries.items() if v != 0})


def hochschild_cohomology(ainf, n, arity_cutoff):
    """(dim H^n, representative Cochains) of the truncated complex.

    Errors out when the truncation cannot close the complex at degree n.
    """
    space = ainf.space
    for deg in (n, n + 1):
        if not _closure_possible(space, deg, arity_cutoff + (1 if deg == n + 1 else 0)):
            raise TruncationError(
                "arity cutoff %d too small to close degree %d" % (arity_cutoff, n))
    basis_prev = _degree_n_basis(space, n - 1, arity_cutoff)
    basis_n = _degree_n_basis(space, n, arity_cutoff)
    basis_next = _degree_n_basis(space, n + 1, arity_cutoff + 1)
    d_in = _differential_matrix(ainf, basis_prev, basis_n, n - 1, arity_cutoff)
    d_out = _differential_matrix(ainf, basis_n, basis_next, n, arity_cutoff)
    dim = cohomology_dimension(d_in, d_out)
    reps = _representatives(d_in, d_out, basis_n, space, n)
    assert len(reps) == dim
    return dim, reps


def _representatives(d_in, d_out, basis_n, space, n):
    """Kernel vectors independent modulo the image, by RREF pivoting."""
    kernel = d_out.kernel_basis()
    image_cols = []
    for c in range(d_in.cols):
        col = d_in.column(c)
        if col:
            image_cols.append(col)
    cols = image_cols + kernel
    m = SparseMatrix.from_columns(cols, len(basis_n))
    _, pivots = m.rref()
    reps = []
    for p in pivots:
        if p >= len(image_cols):
            vec = kernel[p - len(image_cols)]
            table = {}
            for r, coeff in vec.items():
                inputs, label = basis_n[r]
                table.setdefault(inputs, {})[label] = coeff
            by_arity = {}
            for inputs, out in table.items():
                by_arity.setdefault(len(inputs), {})[inputs] = out
            for arity, tab in sorted(by_arity.items()):
                reps.append(Cochain(space, arity, n, tab))
    return reps


def cup(p, q):
    """Concatenation cup product (no auxiliary sign); arity adds."""
    assert p.space is q.space
    space = p.space
    table = {}
    for in1, out1 in p.table.items():
        for in2, out2 in q.table.items():
            key = in1 + in2
            dst = table.setdefault(key, {})
            for l1, c1 in out1.items():
                for l2, c2 in out2.items():
                    for lab, cm in _pairwise_product(space, l1, l2).items():
                        dst[lab] = dst.get(lab, Fraction(0)) + c1 * c2 * cm
    deg = p.total_degree + q.total_degree
    return Cochain(space, p.arity + q.arity, deg, _strip(table))


_PRODUCTS = {}


def register_product(space, products):
    """Attach a bilinear product table {(l1,l2): {label: coeff}} to a space."""
    _PRODUCTS[id(space)] = products


def _pairwise_product(space, l1, l2):
    prod = _PRODUCTS.get(id(space))
    assert prod is not None, "no product registered for %s" % space.name
    return prod.get((l1, l2), {})


def associative_structure(space, products, cutoff=4, weights=None):
    """Strict structure whose m_2 is the product with the suspension twist.

    m_2(a, b) = (-1)^{|a|} a*b; with this twist [m_2, m_2] = 0 holds
    exactly when the product is associative, also for graded products.
    """
    register_product(space, products)
    table = {}
    for (l1, l2), out in products.items():
        sgn = -1 if space.degree[l1] % 2 else 1
        table[(l1, l2)] = {lab: sgn * Fraction(c) for lab, c in out.items()}
    m2 = Cochain(space, 2, 2, table)
    return AInfinityStructure(space, {2: m2}, cutoff, weights=weights)


def dga_structure(space, products, differential, cutoff=4, weights=None):
    """Strict structure with a differential next to the twisted product.

    differential is {label: {label: coeff}} raising degree by one; the
    pair must satisfy the Leibniz rule for the bracket tests to vanish.
    """
    ainf = associative_structure(space, products, cutoff, weights=weights)
    table = {}
    for l, row in differential.items():
        row = {lab: Fraction(c) for lab, c in row.items() if c}
        if row:
            table[(l,)] = row
    m = dict(ainf.m)
    if table:
        m[1] = Cochain(space, 1, 2, table)
    return AInfinityStructure(space, m, cutoff, weights=weights)


# ---------------------------------------------------------------------------
# truncated polynomial algebras and polyvector fields


def _monomials(nvars, max_weight):
    out = []
    for w in range(max_weight + 1):
        for alpha in _compositions(w, nvars):
            out.append(alpha)
    return out


def _compositions(total, parts):
    if parts == 1:
        yield (total,)
        return
    for head in range(total + 1):
        for rest in _compositions(total - head, parts - 1):
            yield (head,) + rest


def monomial_label(alpha):
    if not any(alpha):
        return "1"
    names = ["x", "y", "z", "w"]
    bits = []
    for i, e in enumerate(alpha):
        if e == 1:
            bits.append(names[i])
        elif e > 1:
            bits.append("%s^%d" % (names[i], e))
    return "*".join(bits)


class TruncatedPolynomialAlgebra(object):
    """Q[x_1..x_d] with all monomials of weight > D set to zero."""

    def __init__(self, nvars, max_weight):
        assert 1 <= nvars <= 4
        self.nvars = nvars
        self.max_weight = max_weight
        self.alphas = _monomials(nvars, max_weight)
        self.by_label = {monomial_label(a): a for a in self.alphas}
        self.space = GradedSpace("Q[%d vars]/deg>%d" % (nvars, max_weight),
                                 [(monomial_label(a), 0) for a in self.alphas])
        products = {}
        for a in self.alphas:
            for b in self.alphas:
                c = tuple(x + y for x, y in zip(a, b))
                if sum(c) <= max_weight:
                    products[(monomial_label(a), monomial_label(b))] = \
                        {monomial_label(c): Fraction(1)}
        weights = {monomial_label(a): sum(a) for a in self.alphas}
        self.ainf = associative_structure(self.space, products,
                                          cutoff=4, weights=weights)

    def weight(self, label):
        return sum(self.by_label[label])


def weighted_hochschild_dimension(algebra, n):
    """dim HH^n of Q[x..] computed on the trusted strands of the truncation.

    Uses the normalized complex (inputs exclude 1) split by the weight
    w = |output| - sum |inputs|.  Strands with w >= 0 agree with the
    untruncated polynomial algebra entry by entry; strands above D - n are
    empty.  Returns the summed dimension over w in [0, D - n].
    """
    D = algebra.max_weight
    total = 0
    for w in range(0, max(D - n, -1) + 1):
        total += _strand_dimension(algebra, n, w)
    return total


def _strand_basis(algebra, j, w):
    """Normalized j-cochain entries of strand w as (inputs, output) pairs."""
    pos = [l for l in algebra.space.labels if algebra.weight(l) >= 1]
    out = []
    for inputs in itertools.product(pos, repeat=j):
        ow = sum(algebra.weight(l) for l in inputs) + w
        if 0 <= ow <= algebra.max_weight:
            for label in algebra.space.labels:
                if algebra.weight(label) == ow:
                    out.append((inputs, label))
    return out


def _strand_matrix(algebra, j, w):
    """Normalized Hochschild differential C^j_w -> C^{j+1}_w."""
    src = _strand_basis(algebra, j, w)
    dst = _strand_basis(algebra, j + 1, w)
    dst_index = {e: i for i, e in enumerate(dst)}
    space = algebra.space
    entries = {}

    def add(r, c, v):
        if v != 0:
            entries[(r, c)] = entries.get((r, c), Fraction(0)) + v

    for c, (inputs, label) in enumerate(src):
        f = basis_cochain(space, inputs, label)
        for tup_i, (tinputs, tlabel) in enumerate(dst):
            val = Fraction(0)
            # a_0 f(a_1..a_j)
            got = f.evaluate(tinputs[1:])
            for l, cf in got.items():
                val += cf * _pairwise_product(space, tinputs[0], l).get(tlabel, 0)
            # alternating inner merges
            for i in range(j):
                merged = _pairwise_product(space, tinputs[i], tinputs[i + 1])
                for ml, mc in merged.items():
                    if algebra.weight(ml) >= 1:
                        got = f.evaluate(tinputs[:i] + (ml,) + tinputs[i + 2:])
                        sgn = -1 if i % 2 == 0 else 1
                        val += sgn * mc * got.get(tlabel, 0)
                    # merge to 1 impossible for positive weights
            # last face f(a_0..a_{j-1}) a_j, sign (-1)^{j+1}
            got = f.evaluate(tinputs[:-1])
            for l, cf in got.items():
                sgn = -1 if j % 2 == 0 else 1
                val += sgn * cf * _pairwise_product(space, l, tinputs[-1]).get(tlabel, 0)
            add(tup_i, c, val)
    return SparseMatrix(len(dst), len(src), {k: v for k, v in entries.items() if v != 0})


def _strand_dimension(algebra, n, w):
    d_in = _strand_matrix(algebra, n - 1, w) if n >= 1 else \
        SparseMatrix(len(_strand_basis(algebra, 0, w)), 0)
    d_out = _strand_matrix(algebra, n, w)
    return cohomology_dimension(d_in, d_out)


class PolyvectorAlgebra(object):
    """Wedge powers of derivations of a truncated polynomial algebra.

    Basis: monomial * d_{i_1} ^ ... ^ d_{i_j} with i_1 < ... < i_j and
    monomial weight <= D; a j-vector has degree j.
    """

    def __init__(self, nvars, max_weight):
        self.nvars = nvars
        self.max_weight = max_weight
        self.algebra = TruncatedPolynomialAlgebra(nvars, max_weight)

    def basis(self, j):
        assert 0 <= j
        if j > self.nvars:
            return []
        out = []
        for dirs in itertools.combinations(range(self.nvars), j):
            for alpha in self.algebra.alphas:
                out.append((alpha, dirs))
        return out

    def dimension(self, j):
        return len(self.basis(j))

    def windowed_dimension(self, j):
        """j-vectors of weight >= 0 (weight of alpha,dirs is |alpha| - j)."""
        return len([1 for alpha, _ in self.basis(j) if sum(alpha) - j >= 0])

    def monomial(self, alpha, dirs, coeff=1):
        return Polyvector(self, {(tuple(alpha), tuple(dirs)): Fraction(coeff)})

    def zero(self):
        return Polyvector(self, {})


class Polyvector(object):
    def __init__(self, algebra, coeffs):
        self.algebra = algebra
        self.coeffs = {}
        for (alpha, dirs), c in coeffs.items():
            c = Fraction(c)
            if c == 0:
                continue
            assert list(dirs) == sorted(set(dirs)), dirs
            if sum(alpha) > algebra.max_weight:
                raise TruncationError("coefficient %s beyond weight cutoff" % (alpha,))
            self.coeffs[(tuple(alpha), tuple(dirs))] = c

    def __add__(self, other):
        out = dict(self.coeffs)
        for k, c in other.coeffs.items():
            out[k] = out.get(k, Fraction(0)) + c
        return Polyvector(self.algebra, out)

    def scale(self, c):
        return Polyvector(self.algebra, {k: v * Fraction(c) for k, v in self.coeffs.items()})

    def __sub__(self, other):
        return self + other.scale(-1)

    def is_zero(self):
        return not self.coeffs

    def __eq__(self, other):
        return self.algebra is other.algebra and self.coeffs == other.coeffs

    def __ne__(self, other):
        return not self.__eq__(other)

    def __repr__(self):
        if not self.coeffs:
            return "0"
        names = ["x", "y", "z", "w"]
        bits = []
        for (alpha, dirs), c in sorted(self.coeffs.items()):
            term = monomial_label(alpha)
            for i in dirs:
                term += "*d" + names[i]
            bits.append("%s*%s" % (c, term))
        return " + ".join(bits)


def wedge(g1, g2):
    """Exterior product; derivation slots anticommute."""
    assert g1.algebra is g2.algebra
    alg = g1.algebra
    D = alg.max_weight
    out = {}
    for (a1, d1), c1 in g1.coeffs.items():
        for (a2, d2), c2 in g2.coeffs.items():
            if set(d1) & set(d2):
                continue
            alpha = tuple(x + y for x, y in zip(a1, a2))
            if sum(alpha) > D:
                continue
            dirs = d1 + d2
            sign, sorted_dirs = _sort_dirs(dirs)
            key = (alpha, sorted_dirs)
            out[key] = out.get(key, Fraction(0)) + sign * c1 * c2
    return Polyvector(alg, out)


def _sort_dirs(dirs):
    sign = 1
    lst = list(dirs)
    for i in range(len(lst)):
        for j in range(len(lst) - 1 - i):
            if lst[j] > lst[j + 1]:
                lst[j], lst[j + 1] = lst[j + 1], lst[j]
                sign = -sign
    return sign, tuple(lst)


def _partial(alpha, i):
    """d/dx_i of a monomial: (coefficient, exponent tuple) or None."""
    if alpha[i] == 0:
        return None
    out = list(alpha)
    out[i] -= 1
    return Fraction(alpha[i]), tuple(out)


def schouten_bracket(g1, g2):
    """Schouten-Nijenhuis bracket extending [X,Y] = XY - YX on vector fields.

    For monomials P = a dI (p = |I|), Q = b dJ:
      [P,Q] = sum_r (-1)^{p-r} a d_{i_r}(b) dI\\r ^ dJ
            - (-1)^{(p+1)(q+1)} (same with P and Q swapped).
    The sign normalization makes the bracket a degree -1 Lie bracket for
    j-vectors in degree j, verified by the Jacobi/Leibniz test suite.
    """
    assert g1.algebra is g2.algebra
    alg = g1.algebra
    total = alg.zero()
    for (a1, d1), c1 in g1.coeffs.items():
        for (a2, d2), c2 in g2.coeffs.items():
            p, q = len(d1), len(d2)
            term = _half_schouten(alg, a1, d1, a2, d2)
            total = total + term.scale(c1 * c2)
            swap = _half_schouten(alg, a2, d2, a1, d1)
            sign = -1 if ((p + 1) * (q + 1)) % 2 else 1
            total = total - swap.scale(sign * c1 * c2)
    return total


def _half_schouten(alg, a1, d1, a2, d2):
    """sum_r (-1)^{p-r} a1 d_{i_r}(a2 monomial) (dI without i_r) ^ dJ."""
    out = alg.zero()
    p = len(d1)
    for r, i in enumerate(d1):
        der = _partial(a2, i)
        if der is None:
            continue
        coeff, beta = der
        alpha = tuple(x + y for x, y in zip(a1, beta))
        if sum(alpha) > alg.max_weight:
            continue
        rest = d1[:r] + d1[r + 1:]
        sign = -1 if (p - 1 - r) % 2 else 1
        merged = rest + d2
        if len(set(merged)) != len(merged):
            continue
        s2, dirs = _sort_dirs(merged)
        out = out + alg.monomial(alpha, dirs, sign * s2 * coeff)
    return out


def hkr_cochain(gamma):
    """Antisymmetrization cochain of a j-vector (no 1/j! normalization).

    (a_1..a_j) -> sum_{sigma} sgn(sigma) a * prod_i d_{sigma(i)} a_i.
    """
    alg = gamma.algebra
    space = alg.algebra.space
    js = {len(dirs) for _, dirs in gamma.coeffs}
    assert len(js) <= 1, "hkr_cochain needs a homogeneous j-vector"
    j = js.pop() if js else 0
    table = {}
    for (alpha, dirs), c in gamma.coeffs.items():
        for inputs in itertools.product(space.labels, repeat=j):
            for perm in itertools.permutations(range(j)):
                acc = Fraction(c) * _perm_sign(perm)
                beta = alpha
                for slot, which in enumerate(perm):
                    der = _partial(alg.algebra.by_label[inputs[slot]], dirs[which])
                    if der is None:
                        acc = Fraction(0)
                        break
                    cf, mono = der
                    acc *= cf
                    beta = tuple(x + y for x, y in zip(beta, mono))
                if acc == 0 or sum(beta) > alg.max_weight:
                    continue
                dst = table.setdefault(inputs, {})
                lab = monomial_label(beta)
                dst[lab] = dst.get(lab, Fraction(0)) + acc
    return Cochain(space, j, j, _strip(table))


def _perm_sign(perm):
    sign = 1
    for i in range(len(perm)):
        for j in range(i + 1, len(perm)):
            if perm[i] > perm[j]:
                sign = -sign
    return sign


def hkr_windowed_cocycle_check(algebra, gamma):
    """Check d(hkr(gamma)) vanishes on all tuples with total weight <= D.

    Beyond that rim the truncated differential is not trusted.
    """
    f = hkr_cochain(gamma)
    space = algebra.space
    j = f.arity
    bad = []
    for tinputs in itertools.product(space.labels, repeat=j + 1):
        if sum(algebra.weight(l) for l in tinputs) > algebra.max_weight:
            continue
        val = {}

        def acc(coeffs, sgn):
            for l, c in coeffs.items():
                val[l] = val.get(l, Fraction(0)) + sgn * c

        got = f.evaluate(tinputs[1:])
        for l, cf in got.items():
            acc(_pairwise_product(space, tinputs[0], l), cf)
        for i in range(j):
            merged = _pairwise_product(space, tinputs[i], tinputs[i + 1])
            for ml, mc in merged.items():
                got = f.evaluate(tinputs[:i] + (ml,) + tinputs[i + 2:])
                sgn = -1 if i % 2 == 0 else 1
                for l, cf in got.items():
                    acc({l: cf}, sgn * mc)
        got = f.evaluate(tinputs[:-1])
        for l, cf in got.items():
            sgn = -1 if j % 2 == 0 else 1
            prod = _pairwise_product(space, l, tinputs[-1])
            acc(prod, sgn * cf)
        val = {l: c for l, c in val.items() if c != 0}
        if val:
            bad.append((tinputs, val))
    return bad


# ---------------------------------------------------------------------------
# JSON interchange


def _frac_to_json(c):
    return {"coeff_num": str(c.numerator), "coeff_den": str(c.denominator)}


def _frac_from_json(d):
    if "coeff" in d:
        return Fraction(d["coeff"])
    return Fraction(int(d["coeff_num"]), int(d["coeff_den"]))


def algebra_to_json(ainf):
    data = {"basis": [{"label": l, "degree": d} for l, d in ainf.space.basis],
            "m": {}}
    for k, coch in sorted(ainf.m.items()):
        rows = []
        for inputs, out in sorted(coch.table.items()):
            rows.append({"inputs": list(inputs),
                         "output": [dict(label=l, **_frac_to_json(c))
                                    for l, c in sorted(out.items())]})
        data["m"][str(k)] = rows
    return data


def algebra_from_json(data, cutoff=4):
    space = GradedSpace("json", [(b["label"], int(b["degree"])) for b in data["basis"]])
    m = {}
    products = {}
    for k_str, rows in data.get("m", {}).items():
        k = int(k_str)
        table = {}
        for row in rows:
            out = {e["label"]: _frac_from_json(e) for e in row["output"]}
            table[tuple(row["inputs"])] = out
            if k == 2:
                products[tuple(row["inputs"])] = out
        m[k] = Cochain(space, k, 2, table)
    register_product(space, products)
    return AInfinityStructure(space, m, cutoff)


def dump_json(data, path):
    with open(path, "w") as fh:
        json.dump(data, fh, indent=2, sort_keys=True)
        fh.write("\n")
