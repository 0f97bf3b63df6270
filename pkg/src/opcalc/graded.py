"""Graded vector spaces, suspensions, and Koszul sign bookkeeping.

Conventions used throughout the package:
  - degrees are integers, reversed (cohomological) grading, suspension
    raises degree by +1;
  - permutations are 0-based "gather" tuples: perm[i] is the original
    position of the symbol standing at output position i;
  - o-colored slots enter all signs with shifted degree |a|+1 (the slot
    lives in a desuspended copy of A); the shift is applied by callers.
"""

from fractions import Fraction


class GradedSpace(object):
    """Finite list of labeled basis vectors with integer degrees."""

    def __init__(self, name, basis):
        self.name = name
        self.basis = list(basis)
        self.degree = {}
        for label, deg in self.basis:
            assert label not in self.degree, "duplicate label %r" % label
            assert isinstance(deg, int)
            self.degree[label] = deg
        self.labels = [label for label, _ in self.basis]
        self.index = {label: i for i, label in enumerate(self.labels)}

    def __len__(self):
        return len(self.basis)

    def __contains__(self, label):
        return label in self.degree

    def element(self, coeffs):
        return GradedElement(self, coeffs)

    def basis_element(self, label):
        assert label in self.degree, label
        return GradedElement(self, {label: Fraction(1)})

    def zero(self):
        return GradedElement(self, {})


class GradedElement(object):
    """Linear combination of basis labels; zero coefficients not stored."""

    def __init__(self, space, coeffs):
        self.space = space
        self.coeffs = {}
        for label, c in coeffs.items():
            assert label in space.degree, label
            c = Fraction(c)
            if c != 0:
                self.coeffs[label] = c

    def __add__(self, other):
        assert self.space is other.space
        out = dict(self.coeffs)
        for label, c in other.coeffs.items():
            out[label] = out.get(label, Fraction(0)) + c
        return GradedElement(self.space, out)

    def __sub__(self, other):
        return self + other.scale(-1)

    def scale(self, c):
        c = Fraction(c)
        return GradedElement(self.space, {l: v * c for l, v in self.coeffs.items()})

    def is_zero(self):
        return not self.coeffs

    def __eq__(self, other):
        return self.space is other.space and self.coeffs == other.coeffs

    def __ne__(self, other):
        return not self.__eq__(other)

    def homogeneous_degree(self):
        """Degree |v| of a homogeneous element; None for 0, error if mixed."""
        degs = {self.space.degree[l] for l in self.coeffs}
        if not degs:
            return None
        assert len(degs) == 1, "element not homogeneous: degrees %s" % sorted(degs)
        return degs.pop()

    def __repr__(self):
        if not self.coeffs:
            return "0"
        return " + ".join("%s*%s" % (c, l) for l, c in sorted(self.coeffs.items()))


class Suspension(object):
    """Degree shift s**shift; shift=+1 places V in degree +1."""

    def __init__(self, shift):
        assert isinstance(shift, int)
        self.shift = shift

    def apply_space(self, space):
        return GradedSpace("s^%d %s" % (self.shift, space.name),
                           [(l, d + self.shift) for l, d in space.basis])

    def apply_degree(self, deg):
        return deg + self.shift


def koszul_sign_exp(perm, degrees):
    """Koszul exponent of the gather permutation on symbols of given degrees.

    degrees are indexed by original position; the exponent is the sum of
    |v_a||v_b| over pairs that cross, which is what moving symbols one
    transposition at a time accumulates.
    """
    assert len(perm) == len(degrees), "length mismatch"
    assert sorted(perm) == list(range(len(perm))), perm
    exp = 0
    for i in range(len(perm)):
        for j in range(i + 1, len(perm)):
            if perm[i] > perm[j]:
                exp += degrees[perm[i]] * degrees[perm[j]]
    return exp


def koszul_sign(perm, degrees):
    """(-1)**koszul_sign_exp as +1/-1."""
    return -1 if koszul_sign_exp(perm, degrees) % 2 else 1


def koszul_sign_oracle(perm, degrees):
    """Brute-force oracle: apply adjacent transpositions one at a time."""
    assert len(perm) == len(degrees)
    word = list(perm)
    exp = 0
    # bubble sort back to identity, each adjacent swap crosses two symbols
    changed = True
    while changed:
        changed = False
        for i in range(len(word) - 1):
            if word[i] > word[i + 1]:
                exp += degrees[word[i]] * degrees[word[i + 1]]
                word[i], word[i + 1] = word[i + 1], word[i]
                changed = True
    return -1 if exp % 2 else 1


def shuffles(p, q):
    """All (p,q)-shuffles of 0..p+q-1 as gather tuples, lexicographic.

    A shuffle keeps positions 0..p-1 and p..p+q-1 internally increasing.
    """
    import itertools
    k = p + q
    out = []
    for left in itertools.combinations(range(k), p):
        left = list(left)
        right = [i for i in range(k) if i not in set(left)]
        out.append(tuple(left + right))
    return out


def is_shuffle(perm, p):
    k = len(perm)
    left, right = perm[:p], perm[p:]
    return list(left) == sorted(left) and list(right) == sorted(right)


def sign_eta(perm, p, t, v_degrees, a_degrees):
    """Sign of the (p,t) term of the o-coproduct on (v_1..v_k; a_1..a_n).

    Two-term exponent: the Koszul inversion sum of the v-shuffle plus the
    crossings of the right v-block with the first t o-slots (each o-slot
    weighted |a|+1).
    """
    k = len(v_degrees)
    assert len(perm) == k
    if not is_shuffle(perm, p):
        raise ValueError("not a (%d,%d)-shuffle: %s" % (p, k - p, perm))
    assert 0 <= t <= len(a_degrees)
    exp = koszul_sign_exp(perm, v_degrees)
    for i in range(t):
        for j in range(p, k):
            exp += v_degrees[perm[j]] * (a_degrees[i] + 1)
    return -1 if exp % 2 else 1


def sign_eps_tp(perm, t, p, v_degrees, a_degrees):
    """Sign attached to inserting an inner o-operation at slot t.

    Three-term exponent: degrees of the left v-block, crossings of the
    right v-block with the first t-1 o-slots, and the odd operation
    crossing those same o-slots.
    """
    k = len(v_degrees)
    assert len(perm) == k
    if not is_shuffle(perm, p):
        raise ValueError("not a (%d,%d)-shuffle: %s" % (p, k - p, perm))
    assert t >= 1
    exp = 0
    for j in range(p):
        exp += v_degrees[perm[j]]
    for j in range(p, k):
        for l in range(t - 1):
            exp += v_degrees[perm[j]] * (a_degrees[l] + 1)
    for l in range(t - 1):
        exp += a_degrees[l] + 1
    return -1 if exp % 2 else 1


def unshuffle_exp(chosen, degrees):
    """Exponent for extracting the sorted subset `chosen` to the front."""
    chosen_set = set(chosen)
    rest = [i for i in range(len(degrees)) if i not in chosen_set]
    perm = tuple(sorted(chosen)) + tuple(rest)
    return koszul_sign_exp(perm, degrees)


def sort_with_sign(items, degrees, key):
    """Stable-sort items, returning (sorted items, Koszul sign).

    degrees[i] is the degree of items[i]; equal keys keep input order.
    """
    order = sorted(range(len(items)), key=lambda i: (key(items[i]), i))
    perm = tuple(order)
    sign = koszul_sign(perm, degrees)
    return [items[i] for i in order], sign
