"""Two-colored coalgebra calculus for homotopy algebra structures.

The closed color carries the cofree coalgebra on a space V whose basis
monomials are products of left-normed bracket words (one word per block,
blocks unordered).  The open color carries mixed monomials (v-word; a-word)
with a symmetric v-part and an ordered a-part; all formulas live in the
desuspended picture where the letter parities are |v| for closed letters
and |a|+1 for open letters.

Coderivations are stored by their corestrictions (values on monomials in
the cogenerators) and extended by division sums; coalgebra morphisms are
stored the same way and extended by multi-divisions.
"""

import itertools
from fractions import Fraction

from .graded import GradedSpace, koszul_sign_exp, shuffles
from .hochschild import (Cochain, TruncationError, basis_cochain,
                         gerstenhaber_bracket, zero_cochain)


# ---------------------------------------------------------------------------
# free Gerstenhaber word calculus
#
# a word is a tuple of letter labels read left-normed: (a,b,c) = [[a,b],c].
# basis words start with a minimal label.  block parity is
# sum(|letters|) + length + 1; the shifted parity P = parity + 1 makes the
# bracket a plain graded Lie bracket.


def word_parity(word, deg):
    return (sum(deg[l] for l in word) + len(word) + 1) % 2


def _shifted(word, deg):
    return (word_parity(word, deg) + 1) % 2


_LIE_CACHE = {}


def lie_bracket_words(w1, w2, deg):
    """[w1, w2] expanded in the left-normed basis; dict word -> coeff.

    The left-normed min-first words span the free Lie part; on letter
    multisets with repeats inside a block they are degenerate, so block
    keys with repeated letters are reliable only where the structure's
    corestrictions vanish on them.
    """
    cache_key = (w1, w2, tuple(deg[l] % 2 for l in w1 + w2))
    cached = _LIE_CACHE.get(cache_key)
    if cached is not None:
        return cached
    result = _lie_bracket_words(w1, w2, deg)
    _LIE_CACHE[cache_key] = result
    return result


def _lie_bracket_words(w1, w2, deg):
    if len(w2) == 1:
        y = w2[0]
        if len(w1) == 1:
            x = w1[0]
            if y < x:
                sgn = -1 if (_shifted(w1, deg) * _shifted(w2, deg)) % 2 else 1
                return {(y, x): Fraction(-sgn)}
            if y == x and _shifted(w1, deg) % 2 == 0:
                return {}
            return {w1 + (y,): Fraction(1)}
        if y < w1[0]:
            out = {}
            sgn = -1 if (_shifted(w1, deg) * _shifted(w2, deg)) % 2 else 1
            for w, c in lie_bracket_words(w2, w1, deg).items():
                out[w] = out.get(w, Fraction(0)) - sgn * c
            return {w: c for w, c in out.items() if c != 0}
        return {w1 + (y,): Fraction(1)}
    # [x, [head, z]] = [[x, head], z] - (-1)^{P(head)P(z)} [[x, z], head]
    head, z = w2[:-1], w2[-1:]
    out = {}
    for w, c in lie_bracket_words(w1, head, deg).items():
        for w2_, c2 in lie_bracket_words(w, z, deg).items():
            out[w2_] = out.get(w2_, Fraction(0)) + c * c2
    sgn = -1 if (_shifted(head, deg) * _shifted(z, deg)) % 2 else 1
    for w, c in lie_bracket_words(w1, z, deg).items():
        for w2_, c2 in lie_bracket_words(w, head, deg).items():
            out[w2_] = out.get(w2_, Fraction(0)) - sgn * c * c2
    return {w: c for w, c in out.items() if c != 0}


def canon_blocks(blocks, deg):
    """Canonical form of a block multiset: (sign, sorted key) or None."""
    items = list(blocks)
    parities = {}
    sign_exp = 0
    # bubble sort with Koszul signs over block parities
    n = len(items)
    for i in range(n):
        for j in range(n - 1 - i):
            if items[j] > items[j + 1]:
                sign_exp += word_parity(items[j], deg) * word_parity(items[j + 1], deg)
                items[j], items[j + 1] = items[j + 1], items[j]
    for a, b in zip(items, items[1:]):
        if a == b and word_parity(a, deg) % 2:
            return None
    return (-1 if sign_exp % 2 else 1), tuple(items)


def ger_add(target, blocks, coeff, deg):
    if coeff == 0:
        return
    canon = canon_blocks(blocks, deg)
    if canon is None:
        return
    sign, key = canon
    target[key] = target.get(key, Fraction(0)) + sign * coeff
    if target[key] == 0:
        del target[key]


def ger_product(e1, e2, deg):
    out = {}
    for b1, c1 in e1.items():
        for b2, c2 in e2.items():
            ger_add(out, b1 + b2, c1 * c2, deg)
    return out


def _monomial_parity(blocks, deg):
    return sum(word_parity(b, deg) for b in blocks) % 2


def ger_bracket(e1, e2, deg):
    """Odd Poisson bracket extended by the Leibniz rule in both slots."""
    out = {}
    for b1, c1 in e1.items():
        for b2, c2 in e2.items():
            for key, c in _ger_bracket_mono(b1, b2, deg).items():
                out[key] = out.get(key, Fraction(0)) + c1 * c2 * c
    return {k: c for k, c in out.items() if c != 0}


def _ger_bracket_mono(m1, m2, deg):
    if len(m1) == 1 and len(m2) == 1:
        out = {}
        for w, c in lie_bracket_words(m1[0], m2[0], deg).items():
            ger_add(out, (w,), c, deg)
        return out
    if len(m2) >= 2:
        # [M, b N] = [M, b] N + (-1)^{(p(M)+1) p(b)} b [M, N]
        b, rest = m2[:1], m2[1:]
        out = ger_product(_ger_bracket_mono(m1, b, deg), {rest: Fraction(1)}, deg)
        sgn = -1 if ((_monomial_parity(m1, deg) + 1) * word_parity(b[0], deg)) % 2 else 1
        for key, c in ger_product({b: Fraction(1)},
                                  _ger_bracket_mono(m1, rest, deg), deg).items():
            out[key] = out.get(key, Fraction(0)) + sgn * c
        return {k: c for k, c in out.items() if c != 0}
    # len(m1) >= 2, single block on the right: flip
    p1, p2 = _monomial_parity(m1, deg), _monomial_parity(m2, deg)
    sgn = -1 if ((p1 + 1) * (p2 + 1)) % 2 else 1
    return {k: -sgn * c for k, c in _ger_bracket_mono(m2, m1, deg).items()}


def ger_eval(shape, assignment, deg):
    """Evaluate a block shape whose symbols map to elements.

    shape: tuple of symbol words; assignment: symbol -> element dict.
    Letters absent from the assignment stand for themselves.
    """

    def atom(sym):
        if sym in assignment:
            return assignment[sym]
        return {((sym,),): Fraction(1)}

    result = {(): Fraction(1)}
    for word in shape:
        acc = atom(word[0])
        for sym in word[1:]:
            acc = ger_bracket(acc, atom(sym), deg)
        result = ger_product(result, acc, deg)
    return result


def _set_partitions(positions):
    if not positions:
        yield []
        return
    first, rest = positions[0], positions[1:]
    for part in _set_partitions(rest):
        for i in range(len(part)):
            yield part[:i] + [[first] + part[i]] + part[i + 1:]
        yield [[first]] + part


_BASIS_CACHE = {}
_DIVISION_CACHE = {}


def basis_c_monomials(letters, deg):
    """Distinct canonical basis monomials on a letter multiset."""
    cache_key = (tuple(letters), tuple(deg[l] % 2 for l in letters))
    if cache_key in _BASIS_CACHE:
        return _BASIS_CACHE[cache_key]
    seen = {}
    positions = list(range(len(letters)))
    for part in _set_partitions(positions):
        word_choices = []
        for group in part:
            labels = sorted(letters[i] for i in group)
            first = labels[0]
            rest = labels[1:]
            words = {(first,) + p for p in itertools.permutations(rest)}
            word_choices.append(sorted(words))
        for combo in itertools.product(*word_choices):
            canon = canon_blocks(combo, deg)
            if canon is not None:
                seen[canon[1]] = True
    result = sorted(seen)
    _BASIS_CACHE[cache_key] = result
    return result


def c_monomial_degree(blocks, deg):
    k = sum(len(b) for b in blocks)
    b = len(blocks)
    return 2 - k - b + sum(deg[l] for w in blocks for l in w)


def c_monomial_parity(blocks, deg):
    return _monomial_parity(blocks, deg)


STAR = "*"


def c_divisions(blocks, deg, inner_sizes=None):
    """All ways to split a basis monomial as outer(inner).

    Returns (coeff, outer key containing STAR, inner key) triples with
    coeff the coefficient of the monomial in outer[STAR <- inner].
    """
    letters = tuple(l for w in blocks for l in w)
    k = len(letters)
    cache_key = (blocks, tuple(deg[l] % 2 for l in letters),
                 tuple(inner_sizes) if inner_sizes is not None else None)
    if cache_key in _DIVISION_CACHE:
        return _DIVISION_CACHE[cache_key]
    out = []
    sizes = inner_sizes if inner_sizes is not None else range(1, k + 1)
    for r in sizes:
        if r < 1 or r > k:
            continue
        for subset in sorted({tuple(sorted(c)) for c in
                              itertools.combinations(range(k), r)}):
            inner_letters = tuple(letters[i] for i in subset)
            rest = tuple(letters[i] for i in range(k) if i not in subset)
            for inner in basis_c_monomials(inner_letters, deg):
                star_deg = dict(deg)
                star_deg[STAR] = c_monomial_degree(inner, deg) % 2
                inner_elem = {inner: Fraction(1)}
                for outer in basis_c_monomials(rest + (STAR,), star_deg):
                    value = ger_eval(outer, {STAR: inner_elem}, star_deg)
                    coeff = value.get(blocks, 0)
                    if coeff:
                        out.append((coeff, outer, inner))
    # repeated letters: the same pair occurs once per position subset and
    # the contributions accumulate
    merged = {}
    for coeff, outer, inner in out:
        merged[(outer, inner)] = merged.get((outer, inner), 0) + coeff
    result = [(c, o, i)
              for (o, i), c in sorted(merged.items(), key=lambda t: t[0])
              if c != 0]
    _DIVISION_CACHE[cache_key] = result
    return result


def star_prefix_parity(outer, deg, star_parity):
    """Parity crossed by an odd operator reaching the STAR slot."""
    exp = 0
    star_deg = dict(deg)
    star_deg[STAR] = star_parity
    for word in outer:
        if STAR not in word:
            exp += word_parity(word, star_deg)
            continue
        t = word.index(STAR)
        exp += sum(star_deg[l] for l in word[:t])
        if t >= 1:
            exp += t
        return exp % 2
    return exp % 2


# ---------------------------------------------------------------------------
# open-color monomials


def canon_o(v, a, vdeg):
    """Canonical form of (v-word; a-word): (sign, key) or None."""
    items = list(v)
    exp = 0
    n = len(items)
    for i in range(n):
        for j in range(n - 1 - i):
            if items[j] > items[j + 1]:
                exp += vdeg[items[j]] * vdeg[items[j + 1]]
                items[j], items[j + 1] = items[j + 1], items[j]
    for x, y in zip(items, items[1:]):
        if x == y and vdeg[x] % 2:
            return None
    return (-1 if exp % 2 else 1), (tuple(items), tuple(a))


def o_add(target, v, a, coeff, vdeg):
    if coeff == 0:
        return
    canon = canon_o(v, a, vdeg)
    if canon is None:
        return
    sign, key = canon
    target[key] = target.get(key, Fraction(0)) + sign * coeff
    if target[key] == 0:
        del target[key]


def o_monomial_valid(v, a):
    return len(v) >= 1 or len(a) >= 1


def o_monomial_degree(v, a, vdeg, adeg):
    """Desuspended degree: sum|v| + sum|a| - 2k - n."""
    return (sum(vdeg[l] for l in v) + sum(adeg[l] for l in a)
            - 2 * len(v) - len(a))


class SMonomial(object):
    """Open-color basis monomial (v-word; a-word)."""

    def __init__(self, v, a):
        self.v = tuple(v)
        self.a = tuple(a)
        assert o_monomial_valid(self.v, self.a)

    def key(self):
        return (self.v, self.a)

    def degree(self, vdeg, adeg):
        return o_monomial_degree(self.v, self.a, vdeg, adeg)

    def weight(self):
        return 2 * len(self.v) + len(self.a) - 1

    def __repr__(self):
        return "(%s; %s)" % (",".join(self.v), ",".join(self.a))


class GerCoMonomial(object):
    """Closed-color basis monomial: multiset of left-normed words."""

    def __init__(self, blocks):
        self.blocks = tuple(tuple(w) for w in blocks)

    def key(self):
        return self.blocks

    def degree(self, vdeg):
        return c_monomial_degree(self.blocks, vdeg)

    def weight(self):
        k = sum(len(b) for b in self.blocks)
        return 2 * (k - 1)

    def __repr__(self):
        return ".".join("[" + ",".join(w) + "]" if len(w) > 1 else w[0]
                        for w in self.blocks)


# ---------------------------------------------------------------------------
# cooperations on the free coalgebra


def coproduct_o(v, a, vdeg, adeg):
    """Two-sided splitting of an open monomial.

    Returns (coeff, (v1, a1), (v2, a2)) with both sides nonempty; the sign
    is the v-unshuffle Koszul sign plus the crossings of right-side
    v-letters over left-side a-letters.
    """
    k, n = len(v), len(a)
    vdegs = [vdeg[l] for l in v]
    out = []
    for p in range(k + 1):
        for t in range(n + 1):
            if (p, t) == (0, 0) or (p, t) == (k, n):
                continue
            for lam in shuffles(p, k - p):
                exp = koszul_sign_exp(lam, vdegs)
                for j in range(p, k):
                    for l in range(t):
                        exp += vdegs[lam[j]] * (adeg[a[l]] + 1)
                left = (tuple(v[i] for i in lam[:p]), a[:t])
                right = (tuple(v[i] for i in lam[p:]), a[t:])
                out.append(((-1 if exp % 2 else 1) * Fraction(1), left, right))
    return out


def delta_c(blocks, deg, include_trivial=False):
    """Block unshuffles of a closed monomial: (coeff, left key, right key)."""
    b = len(blocks)
    out = []
    lo = 0 if include_trivial else 1
    hi = b if include_trivial else b - 1
    for r in range(lo, hi + 1):
        for subset in itertools.combinations(range(b), r):
            rest = tuple(i for i in range(b) if i not in subset)
            exp = 0
            for i in rest:
                for j in subset:
                    if i < j:
                        exp += (word_parity(blocks[i], deg)
                                * word_parity(blocks[j], deg))
            left = tuple(blocks[i] for i in subset)
            right = tuple(blocks[i] for i in rest)
            out.append(((-1 if exp % 2 else 1) * Fraction(1), left, right))
    return out


def rho_map(v, a, vdeg):
    """Closed-color anchor: nonzero only on (v-word; ) monomials."""
    if a:
        return {}
    if not v:
        return {}
    blocks = tuple((l,) for l in v)
    canon = canon_blocks(blocks, vdeg)
    if canon is None:
        return {}
    sign, key = canon
    return {key: Fraction(sign)}


def mu_left(v, a, vdeg, adeg):
    """(rho x id) after the open coproduct: dict (c-key, o-key) -> coeff."""
    out = {}
    for coeff, (v1, a1), (v2, a2) in coproduct_o(v, a, vdeg, adeg):
        for ckey, s in rho_map(v1, a1, vdeg).items():
            key = (ckey, (v2, a2))
            out[key] = out.get(key, Fraction(0)) + coeff * s
    return {k: c for k, c in out.items() if c != 0}


def mu_right(v, a, vdeg, adeg):
    """(id x rho) after the open coproduct, with the crossing sign."""
    out = {}
    for coeff, (v1, a1), (v2, a2) in coproduct_o(v, a, vdeg, adeg):
        rho = rho_map(v2, a2, vdeg)
        if not rho:
            continue
        # rho has odd degree; it crosses the left factor
        exp = (o_monomial_degree(v1, a1, vdeg, adeg) + 1) % 2
        for ckey, s in rho.items():
            key = ((v1, a1), ckey)
            val = coeff * s * (-1 if exp else 1)
            out[key] = out.get(key, Fraction(0)) + val
    return {k: c for k, c in out.items() if c != 0}


# ---------------------------------------------------------------------------
# coderivations


class Coderivation(object):
    """Coderivation given by corestrictions; extended on demand.

    c_rule(blocks) -> dict v-label -> coeff
    o_rule((v, a)) -> dict a-label -> coeff
    parity: 1 for differentials, 0 for gauge generators.
    """

    def __init__(self, vspace, aspace, c_rule=None, o_rule=None, parity=1,
                 name=""):
        self.vspace = vspace
        self.aspace = aspace
        self.vdeg = dict(vspace.degree)
        self.adeg = dict(aspace.degree)
        self._c_rule = c_rule
        self._o_rule = o_rule
        self.parity = parity
        self.name = name
        self._c_memo = {}
        self._o_memo = {}

    def corestrict_c(self, blocks):
        if blocks not in self._c_memo:
            val = self._c_rule(blocks) if self._c_rule else {}
            self._c_memo[blocks] = {l: Fraction(c) for l, c in val.items() if c}
        return self._c_memo[blocks]

    def corestrict_o(self, key):
        if key not in self._o_memo:
            val = self._o_rule(key) if self._o_rule else {}
            self._o_memo[key] = {l: Fraction(c) for l, c in val.items() if c}
        return self._o_memo[key]


def table_coderivation(vspace, aspace, c_tab, o_tab, parity=1, name=""):
    c_tab = dict(c_tab or {})
    o_tab = dict(o_tab or {})
    return Coderivation(vspace, aspace,
                        c_rule=lambda b: c_tab.get(b, {}),
                        o_rule=lambda k: o_tab.get(k, {}),
                        parity=parity, name=name)


def extend_on_c(R, elem):
    """Extension of R on a closed-color element."""
    deg = R.vdeg
    out = {}
    for blocks, coeff in elem.items():
        for dcoeff, outer, inner in c_divisions(blocks, deg):
            value = R.corestrict_c(inner)
            if not value:
                continue
            star_par = c_monomial_degree(inner, deg) % 2
            prefix = star_prefix_parity(outer, deg, star_par)
            sgn = -1 if (R.parity * prefix) % 2 else 1
            for vlab, vc in value.items():
                sub = ger_eval(outer, {STAR: {((vlab,),): Fraction(1)}}, deg)
                for key, c in sub.items():
                    tot = coeff * dcoeff * sgn * vc * c
                    out[key] = out.get(key, Fraction(0)) + tot
    return {k: c for k, c in out.items() if c != 0}


def _eps_parts(lam, t, p, vdegs, apar):
    """Crossing exponents for inserting a value at slot t.

    Returns (operator crossing, structural crossing): the first scales with
    the coderivation parity, the second does not.
    """
    cross = sum(vdegs[lam[j]] for j in range(p)) + sum(apar[:t - 1])
    struct = 0
    for j in range(p, len(lam)):
        struct += vdegs[lam[j]] * sum(apar[:t - 1])
    return cross % 2, struct % 2


def extend_on_o(R, elem):
    """Extension of R on an open-color element (three division sums)."""
    vdeg, adeg = R.vdeg, R.adeg
    out = {}
    for (v, a), coeff in elem.items():
        k, n = len(v), len(a)
        vdegs = [vdeg[l] for l in v]
        apar = [adeg[l] + 1 for l in a]
        # sum 1: closed corestriction on a leading sub-word
        for p in range(1, k + 1):
            for lam in shuffles(p, k - p):
                word = tuple((v[i],) for i in lam[:p])
                value = R.corestrict_c(word)
                if not value:
                    continue
                exp = koszul_sign_exp(lam, vdegs)
                rest = tuple(v[i] for i in lam[p:])
                for vlab, vc in value.items():
                    o_add(out, (vlab,) + rest, a,
                          coeff * vc * (-1 if exp % 2 else 1), vdeg)
        # sums 2 and 3: open corestriction on an inner monomial replacing
        # the letters a_t..a_s (s = t-1 consumes no open letters)
        for p in range(0, k + 1):
            for lam in shuffles(p, k - p):
                eps = koszul_sign_exp(lam, vdegs)
                inner_v = tuple(v[i] for i in lam[p:])
                outer_v = tuple(v[i] for i in lam[:p])
                for t in range(1, n + 2):
                    for s in range(t - 1, n + 1):
                        if s == t - 1 and not inner_v:
                            continue
                        inner_a = a[t - 1:s]
                        value = R.corestrict_o((inner_v, inner_a))
                        if not value:
                            continue
                        cross, struct = _eps_parts(lam, t, p, vdegs, apar)
                        exp = eps + R.parity * cross + struct
                        sgn = -1 if exp % 2 else 1
                        for alab, ac in value.items():
                            new_a = a[:t - 1] + (alab,) + a[s:]
                            o_add(out, outer_v, new_a,
                                  coeff * ac * sgn, vdeg)
    return {key: c for key, c in out.items() if c != 0}


def extend_coderivation(R, elem, color):
    if color == "c":
        return extend_on_c(R, elem)
    if color == "o":
        return extend_on_o(R, elem)
    raise ValueError("color must be 'c' or 'o'")


def q_square_check(Q, c_monomials=(), o_monomials=()):
    """Corestriction of Q-hat applied twice; empty list iff it vanishes."""
    defects = []
    for blocks in c_monomials:
        once = extend_on_c(Q, {blocks: Fraction(1)})
        total = {}
        for key, c in once.items():
            for vlab, vc in Q.corestrict_c(key).items():
                total[vlab] = total.get(vlab, Fraction(0)) + c * vc
        total = {l: c for l, c in total.items() if c != 0}
        if total:
            defects.append((("c", blocks), total))
    for key in o_monomials:
        once = extend_on_o(Q, {key: Fraction(1)})
        total = {}
        for k2, c in once.items():
            for alab, ac in Q.corestrict_o(k2).items():
                total[alab] = total.get(alab, Fraction(0)) + c * ac
        total = {l: c for l, c in total.items() if c != 0}
        if total:
            defects.append((("o", key), total))
    return defects


def validate_ocha_substructure(Q, c_monomials):
    """True iff the closed corestriction vanishes on monomials with a
    block of two or more letters."""
    for blocks in c_monomials:
        if any(len(w) >= 2 for w in blocks):
            if Q.corestrict_c(blocks):
                return False
    return True


# ---------------------------------------------------------------------------
# tautological open-closed structure on a cochain space


def cochain_label(inputs, output):
    return "P(" + ",".join(inputs) + "->" + output + ")"


class CochainLetterSpace(object):
    """Closed-color space whose letters are basis cochains on A.

    Letters exist up to the headroom arity; values that would need a
    letter beyond it raise TruncationError.
    """

    def __init__(self, aspace, headroom):
        self.aspace = aspace
        self.headroom = headroom
        basis = []
        self.io_of = {}
        for r in range(0, headroom + 1):
            for ins in itertools.product(aspace.labels, repeat=r):
                for out in aspace.labels:
                    lab = cochain_label(ins, out)
                    deg = r + aspace.degree[out] - sum(aspace.degree[l]
                                                      for l in ins)
                    basis.append((lab, deg))
                    self.io_of[lab] = (ins, out)
        self.space = GradedSpace("cochain-letters", basis)

    def letter_cochain(self, label):
        ins, out = self.io_of[label]
        return basis_cochain(self.aspace, ins, out)

    def cochain_to_letters(self, coch):
        out = {}
        for ins, row in coch.table.items():
            for lab, c in row.items():
                if c == 0:
                    continue
                if coch.arity > self.headroom:
                    raise TruncationError(
                        "cochain letter of arity %d beyond headroom %d"
                        % (coch.arity, self.headroom))
                out[cochain_label(ins, lab)] = c
        return out


def build_tautological_ocha(ainf, headroom=5):
    """Open-closed structure induced by a cochain complex over its algebra.

    The closed corestriction is supported on words of at most two
    single-letter blocks; the open corestriction evaluates a letter's
    cochain on the open arguments.  The pure-open part twists the input
    operations by (-1)^(n+1) so that the two-argument value is minus the
    product.
    """
    letters = CochainLetterSpace(ainf.space, headroom)
    aspace = ainf.space

    def o_rule(key):
        v, a = key
        if len(v) == 0:
            comp = ainf.component(len(a))
            val = comp.evaluate(a)
            sgn = 1 if (len(a) + 1) % 2 == 0 else -1
            return {l: sgn * c for l, c in val.items()}
        if len(v) == 1:
            coch = letters.letter_cochain(v[0])
            if coch.arity != len(a):
                return {}
            return coch.evaluate(a)
        return {}

    def c_rule(blocks):
        if any(len(w) >= 2 for w in blocks):
            return {}
        labs = tuple(w[0] for w in blocks)
        if len(labs) == 1:
            p = letters.letter_cochain(labs[0])
            total = {}
            for j, mj in sorted(ainf.m.items()):
                sgn = 1 if j % 2 == 0 else -1
                br = gerstenhaber_bracket(mj, p)
                for lab, c in letters.cochain_to_letters(br).items():
                    total[lab] = total.get(lab, Fraction(0)) + sgn * c
            return {l: c for l, c in total.items() if c != 0}
        if len(labs) == 2:
            p1 = letters.letter_cochain(labs[0])
            p2 = letters.letter_cochain(labs[1])
            br = gerstenhaber_bracket(p1, p2)
            sgn = -1 if p1.total_degree % 2 == 0 else 1
            return {l: sgn * c
                    for l, c in letters.cochain_to_letters(br).items()}
        return {}

    q = Coderivation(letters.space, aspace, c_rule=c_rule, o_rule=o_rule,
                     parity=1, name="tautological_ocha")
    q.letters = letters
    return q


def build_explicit_o_part(ainf, headroom=5):
    """Open corestriction written out directly for a strict algebra:
    the differential, minus the product, and cochain evaluation."""
    letters = CochainLetterSpace(ainf.space, headroom)

    def o_rule(key):
        v, a = key
        if len(v) == 0:
            if len(a) == 1:
                return ainf.component(1).evaluate(a)
            if len(a) == 2:
                val = ainf.component(2).evaluate(a)
                return {l: -c for l, c in val.items()}
            return {}
        if len(v) == 1:
            coch = letters.letter_cochain(v[0])
            if coch.arity != len(a):
                return {}
            return coch.evaluate(a)
        return {}

    q = Coderivation(letters.space, ainf.space, c_rule=None, o_rule=o_rule,
                     parity=1, name="explicit_o_part")
    q.letters = letters
    return q


def tautological_window(ainf, q, letter_arity=4, max_word=3,
                        mixed_pairs=((1, 3), (2, 1)), pure_a=4,
                        sum_arity_c=3, sum_arity_o=4):
    """Checked monomial sets for the square-zero test.

    Closed monomials use at most max_word letters with total cochain
    arity at most sum_arity_c; open monomials obey the (k, n) bounds in
    mixed_pairs and total letter arity sum_arity_o; pure-open words run
    to length pure_a.
    """
    letters = q.letters
    vdeg = q.vdeg
    labs = [l for l in letters.space.labels
            if len(letters.io_of[l][0]) <= letter_arity]

    def arity_of(lab):
        return len(letters.io_of[lab][0])

    c_monomials = []
    for size in range(1, max_word + 1):
        for combo in itertools.combinations_with_replacement(labs, size):
            if sum(arity_of(l) for l in combo) > sum_arity_c:
                continue
            for mono in basis_c_monomials(combo, vdeg):
                c_monomials.append(mono)
    o_monomials = []
    alabs = list(ainf.space.labels)
    for k, nmax in mixed_pairs:
        for combo in itertools.combinations_with_replacement(labs, k):
            if sum(arity_of(l) for l in combo) > sum_arity_o:
                continue
            canon = canon_o(combo, (), vdeg)
            if canon is None:
                continue
            for n in range(0, nmax + 1):
                for a in itertools.product(alabs, repeat=n):
                    o_monomials.append((canon[1][0], a))
    for n in range(1, pure_a + 1):
        for a in itertools.product(alabs, repeat=n):
            o_monomials.append(((), a))
    return c_monomials, o_monomials


# ---------------------------------------------------------------------------
# extraction of the induced one-sided structure


class LInfinityMorphism(object):
    """Closed-side operations with their action on open cochains.

    ell maps a closed word to a closed-letter combination; us maps a
    closed word to a family of open cochain tables; m is the pure-open
    part.  Tables fill lazily from the generating coderivation.
    """

    def __init__(self, q, max_n):
        self.q = q
        self.vspace = q.vspace
        self.aspace = q.aspace
        self.max_n = max_n
        self._ell = {}
        self._us = {}
        self._m = {}

    def ell(self, word):
        if word not in self._ell:
            blocks = tuple((l,) for l in word)
            self._ell[word] = self.q.corestrict_c(blocks)
        return self._ell[word]

    def u_value(self, word, a):
        key = (word, tuple(a))
        if key not in self._us:
            self._us[key] = self.q.corestrict_o(key)
        return self._us[key]

    def m_value(self, a):
        key = tuple(a)
        if key not in self._m:
            self._m[key] = self.q.corestrict_o(((), key))
        return self._m[key]

    def u_cochain(self, word, n):
        k = len(word)
        total = sum(self.q.vdeg[l] for l in word) - 2 * k + 2
        table = {}
        for a in itertools.product(self.aspace.labels, repeat=n):
            val = self.u_value(word, a)
            if val:
                table[a] = val
        return Cochain(self.aspace, n, total, table)

    def m_cochain(self, n):
        table = {}
        for a in itertools.product(self.aspace.labels, repeat=n):
            val = self.m_value(a)
            if val:
                table[a] = val
        return Cochain(self.aspace, n, 2, table)


def extract_linf(q, max_n=4):
    return LInfinityMorphism(q, max_n)


def linf_coherence_check(data, words, max_n=None):
    """Defect table of the transferred coherence identities.

    For each closed word the closed operations pushed through the action
    must match the differential of the action plus half the pairwise
    brackets.  Returns a list of (word, arity, inputs, label, coeff).
    """
    if max_n is None:
        max_n = data.max_n
    aspace = data.aspace
    vdeg = data.q.vdeg
    m_parts = {n: data.m_cochain(n) for n in range(0, max_n + 1)}
    defects = []
    for word in words:
        k = len(word)
        if k == 0:
            continue
        vdegs = [vdeg[l] for l in word]
        u_parts = {}

        def u_family(w, n):
            if (w, n) not in u_parts:
                u_parts[(w, n)] = data.u_cochain(w, n)
            return u_parts[(w, n)]

        for n in range(0, max_n + 1):
            total = sum(vdegs) - 2 * k + 2
            lhs = zero_cochain(aspace, n, total + 1)
            for p in range(1, k + 1):
                for lam in shuffles(p, k - p):
                    sub = tuple(word[i] for i in lam[:p])
                    rest = tuple(word[i] for i in lam[p:])
                    eps = koszul_sign_exp(lam, vdegs)
                    for vlab, vc in data.ell(sub).items():
                        canon = canon_o((vlab,) + rest, (), vdeg)
                        if canon is None:
                            continue
                        csign, ckey = canon
                        coch = u_family(ckey[0], n)
                        coeff = vc * csign * (-1 if eps % 2 else 1)
                        lhs = lhs.add(coch.scale(coeff))
            rhs = zero_cochain(aspace, n, total + 1)
            for i in sorted(m_parts):
                j = n + 1 - i
                if 0 <= j <= max_n:
                    br = gerstenhaber_bracket(m_parts[i], u_family(word, j))
                    rhs = rhs.add(br.scale(-1))
            for p in range(1, k):
                for lam in shuffles(p, k - p):
                    left = tuple(word[i] for i in lam[:p])
                    right = tuple(word[i] for i in lam[p:])
                    exp = koszul_sign_exp(lam, vdegs)
                    exp += sum(vdegs[lam[j]] for j in range(p))
                    half = Fraction(-1, 2) * (-1 if exp % 2 else 1)
                    for i in range(0, n + 2):
                        j = n + 1 - i
                        if i > max_n or j < 0 or j > max_n:
                            continue
                        br = gerstenhaber_bracket(u_family(left, i),
                                                 u_family(right, j))
                        rhs = rhs.add(br.scale(half))
            diff = lhs.add(rhs.scale(-1))
            for a in sorted(diff.table):
                for lab in sorted(diff.table[a]):
                    defects.append((word, n, a, lab, diff.table[a][lab]))
    return defects


def linf_to_gerplus(data, name="from_linf"):
    """Coderivation rebuilt from extracted one-sided data."""

    def c_rule(blocks):
        if any(len(w) >= 2 for w in blocks):
            return {}
        return data.ell(tuple(w[0] for w in blocks))

    def o_rule(key):
        v, a = key
        if len(v) == 0:
            return data.m_value(a)
        return data.u_value(v, a)

    return Coderivation(data.vspace, data.aspace, c_rule=c_rule,
                        o_rule=o_rule, parity=1, name=name)


# ---------------------------------------------------------------------------
# homotopies of the structure


def _commutator(a, b):
    """Coderivation commutator [a, b] given by corestrictions."""
    sgn = -1 if (a.parity * b.parity) % 2 else 1

    def c_rule(blocks):
        elem = {blocks: Fraction(1)}
        out = {}
        for key, c in extend_on_c(b, elem).items():
            for lab, vc in a.corestrict_c(key).items():
                out[lab] = out.get(lab, Fraction(0)) + c * vc
        for key, c in extend_on_c(a, elem).items():
            for lab, vc in b.corestrict_c(key).items():
                out[lab] = out.get(lab, Fraction(0)) - sgn * c * vc
        return {l: c for l, c in out.items() if c != 0}

    def o_rule(key):
        elem = {key: Fraction(1)}
        out = {}
        for k2, c in extend_on_o(b, elem).items():
            for lab, ac in a.corestrict_o(k2).items():
                out[lab] = out.get(lab, Fraction(0)) + c * ac
        for k2, c in extend_on_o(a, elem).items():
            for lab, ac in b.corestrict_o(k2).items():
                out[lab] = out.get(lab, Fraction(0)) - sgn * c * ac
        return {l: c for l, c in out.items() if c != 0}

    return Coderivation(a.vspace, a.aspace, c_rule=c_rule, o_rule=o_rule,
                        parity=(a.parity + b.parity) % 2)


def homotopy_conjugate(q, psi):
    """Conjugation of q by the flow of a degree-zero coderivation.

    psi must vanish on the closed color and on pure-open monomials; the
    series for exp(ad_psi) then stops once the closed letters of a
    monomial are exhausted.
    """
    ads = [q]

    def ad(r):
        while len(ads) <= r:
            ads.append(_commutator(psi, ads[-1]))
        return ads[r]

    def c_rule(blocks):
        out = {}
        fact = Fraction(1)
        for r in range(0, sum(len(w) for w in blocks) + 1):
            if r:
                fact /= r
            for lab, c in ad(r).corestrict_c(blocks).items():
                out[lab] = out.get(lab, Fraction(0)) + fact * c
        return {l: c for l, c in out.items() if c != 0}

    def o_rule(key):
        out = {}
        fact = Fraction(1)
        for r in range(0, len(key[0]) + 1):
            if r:
                fact /= r
            for lab, c in ad(r).corestrict_o(key).items():
                out[lab] = out.get(lab, Fraction(0)) + fact * c
        return {l: c for l, c in out.items() if c != 0}

    return Coderivation(q.vspace, q.aspace, c_rule=c_rule, o_rule=o_rule,
                        parity=q.parity, name="conjugate")


def family_coderivation(q_like, table, parity, vspace, aspace):
    """Coderivation supported on mixed open monomials only.

    table maps (word, a-tuple) to a value dict; q_like supplies nothing
    and may be None.
    """

    def o_rule(key):
        if len(key[0]) == 0:
            return {}
        return table.get(key, {})

    return Coderivation(vspace, aspace, c_rule=None, o_rule=o_rule,
                        parity=parity)


def linf_gauge_action(data, theta_table, words, max_n=None):
    """Gauge transform of the open action by a degree-zero generator.

    theta_table maps mixed (word, a-tuple) keys to value dicts.  The
    transformed action is exp(ad_theta) applied to the action plus the
    integrated flow of the split differential; the closed operations and
    the pure-open part do not move.  Returns {(word, a): value}.
    """
    if max_n is None:
        max_n = data.max_n
    vspace, aspace = data.vspace, data.aspace
    theta = family_coderivation(None, theta_table, 0, vspace, aspace)

    def u_rule(key):
        if len(key[0]) == 0:
            return {}
        return data.u_value(key[0], key[1])

    u_fam = Coderivation(vspace, aspace, c_rule=None, o_rule=u_rule, parity=1)

    def split_c(blocks):
        if any(len(w) >= 2 for w in blocks):
            return {}
        return data.ell(tuple(w[0] for w in blocks))

    def split_o(key):
        if len(key[0]) == 0:
            return data.m_value(key[1])
        return {}

    q_split = Coderivation(vspace, aspace, c_rule=split_c, o_rule=split_o,
                           parity=1)
    d_theta = _commutator(theta, q_split)

    def mixed(coder):
        def o_rule(key):
            if len(key[0]) == 0:
                return {}
            return coder.corestrict_o(key)
        return Coderivation(vspace, aspace, c_rule=None, o_rule=o_rule,
                            parity=coder.parity)

    d_theta = mixed(d_theta)

    def ad_chain(x):
        chain = [x]

        def term(r):
            while len(chain) <= r:
                chain.append(mixed(_commutator(theta, chain[-1])))
            return chain[r]
        return term

    exp_u = ad_chain(u_fam)
    flow = ad_chain(d_theta)
    out = {}
    for word in words:
        k = len(word)
        for n in range(0, max_n + 1):
            for a in itertools.product(aspace.labels, repeat=n):
                val = {}
                fact = Fraction(1)
                for r in range(0, k + 1):
                    if r:
                        fact /= r
                    for lab, c in exp_u(r).corestrict_o((word, a)).items():
                        val[lab] = val.get(lab, Fraction(0)) + fact * c
                fact = Fraction(1)
                for r in range(0, k + 1):
                    fact /= (r + 1)
                    for lab, c in flow(r).corestrict_o((word, a)).items():
                        val[lab] = val.get(lab, Fraction(0)) + fact * c
                val = {l: c for l, c in val.items() if c != 0}
                if val:
                    out[(word, a)] = val
    return out


# ---------------------------------------------------------------------------
# coalgebra morphisms


class SCoalgebraMorphism(object):
    """Morphism of free two-colored coalgebras by corestrictions.

    c_rule(blocks) -> dict over target closed letters
    o_rule((v, a)) -> dict over target open letters
    """

    def __init__(self, vsource, asource, vtarget, atarget,
                 c_rule=None, o_rule=None, name=""):
        self.vsource = vsource
        self.asource = asource
        self.vtarget = vtarget
        self.atarget = atarget
        self.vdeg_s = dict(vsource.degree)
        self.adeg_s = dict(asource.degree)
        self.vdeg_t = dict(vtarget.degree)
        self.adeg_t = dict(atarget.degree)
        self._c_rule = c_rule
        self._o_rule = o_rule
        self.name = name
        self._c_memo = {}
        self._o_memo = {}

    def corestrict_c(self, blocks):
        if blocks not in self._c_memo:
            val = self._c_rule(blocks) if self._c_rule else {}
            self._c_memo[blocks] = {l: Fraction(c) for l, c in val.items() if c}
        return self._c_memo[blocks]

    def corestrict_o(self, key):
        if key not in self._o_memo:
            val = self._o_rule(key) if self._o_rule else {}
            self._o_memo[key] = {l: Fraction(c) for l, c in val.items() if c}
        return self._o_memo[key]


def _grouped_partitions(positions):
    """Set partitions listed as groups sorted by least member."""
    for part in _set_partitions(list(positions)):
        yield sorted([sorted(g) for g in part], key=lambda g: g[0])


def morphism_image_c(t, blocks):
    """Full image of a closed basis monomial under the morphism."""
    deg_s = t.vdeg_s
    deg_t = t.vdeg_t
    letters = tuple(l for w in blocks for l in w)
    k = len(letters)
    out = {}
    for groups in _grouped_partitions(range(k)):
        r = len(groups)
        inner_sets = []
        for g in groups:
            labs = tuple(sorted(letters[i] for i in g))
            inner_sets.append(basis_c_monomials(labs, deg_s))
        symbols = ["@%d" % i for i in range(r)]
        for inners in itertools.product(*inner_sets):
            sym_deg_s = dict(deg_s)
            sym_deg_t = dict(deg_t)
            values = []
            ok = True
            for sym, inner in zip(symbols, inners):
                par = c_monomial_degree(inner, deg_s) % 2
                sym_deg_s[sym] = par
                sym_deg_t[sym] = par
                val = t.corestrict_c(inner)
                if not val:
                    ok = False
                    break
                values.append(val)
            if not ok:
                continue
            assign_s = {sym: {inner: Fraction(1)}
                        for sym, inner in zip(symbols, inners)}
            for outer in basis_c_monomials(tuple(symbols), sym_deg_s):
                coeff = ger_eval(outer, assign_s, sym_deg_s).get(blocks, 0)
                if not coeff:
                    continue
                assign_t = {}
                for sym, val in zip(symbols, values):
                    assign_t[sym] = {((lab,),): c for lab, c in val.items()}
                for key, c in ger_eval(outer, assign_t, sym_deg_t).items():
                    tot = coeff * c
                    out[key] = out.get(key, Fraction(0)) + tot
    return {key: c for key, c in out.items() if c != 0}


def _compositions(n, parts):
    if parts == 0:
        if n == 0:
            yield ()
        return
    for first in range(n + 1):
        for rest in _compositions(n - first, parts - 1):
            yield (first,) + rest


def _distributions(items, slots):
    if not items:
        yield [[] for _ in range(slots)]
        return
    first, rest = items[0], items[1:]
    for d in _distributions(rest, slots):
        for i in range(slots):
            yield d[:i] + [[first] + d[i]] + d[i + 1:]


def morphism_image_o(t, key):
    """Full image of an open basis monomial under the morphism."""
    v, a = key
    k, n = len(v), len(a)
    vpar = [t.vdeg_s[l] % 2 for l in v]
    apar = [(t.adeg_s[l] + 1) % 2 for l in a]
    out = {}
    positions = list(range(k))
    for csub in itertools.chain.from_iterable(
            itertools.combinations(positions, r) for r in range(k + 1)):
        vc = list(csub)
        vo = [i for i in positions if i not in csub]
        for cgroups in _grouped_partitions(vc):
            for nprime in range(0, len(vo) + n + 1):
                if nprime == 0 and (vo or n > 0 or not cgroups):
                    continue
                for vdist in _distributions(vo, nprime):
                    for cut in _compositions(n, nprime):
                        bounds = []
                        start = 0
                        for c_len in cut:
                            bounds.append((start, start + c_len))
                            start += c_len
                        inner_keys = []
                        valid = True
                        for j in range(nprime):
                            gv = tuple(v[i] for i in sorted(vdist[j]))
                            ga = a[bounds[j][0]:bounds[j][1]]
                            if not o_monomial_valid(gv, ga):
                                valid = False
                                break
                            inner_keys.append((gv, ga))
                        if not valid:
                            continue
                        # rearrangement sign over source letter parities
                        order = []
                        for g in cgroups:
                            order.extend(sorted(g))
                        for j in range(nprime):
                            order.extend(sorted(vdist[j]))
                            order.extend(k + i
                                         for i in range(bounds[j][0],
                                                        bounds[j][1]))
                        pars = vpar + apar
                        exp = 0
                        for x in range(len(order)):
                            for y in range(x + 1, len(order)):
                                if order[x] > order[y]:
                                    exp += pars[order[x]] * pars[order[y]]
                        cvals = []
                        ok = True
                        for g in cgroups:
                            word = tuple((v[i],) for i in sorted(g))
                            val = t.corestrict_c(word)
                            if not val:
                                ok = False
                                break
                            cvals.append(val)
                        if not ok:
                            continue
                        ovals = []
                        for ik in inner_keys:
                            val = t.corestrict_o(ik)
                            if not val:
                                ok = False
                                break
                            ovals.append(val)
                        if not ok:
                            continue
                        base = Fraction(-1 if exp % 2 else 1)
                        for vchoice in itertools.product(
                                *[sorted(val.items()) for val in cvals]):
                            for ochoice in itertools.product(
                                    *[sorted(val.items()) for val in ovals]):
                                coeff = base
                                for _, c in vchoice:
                                    coeff *= c
                                for _, c in ochoice:
                                    coeff *= c
                                new_v = tuple(lab for lab, _ in vchoice)
                                new_a = tuple(lab for lab, _ in ochoice)
                                o_add(out, new_v, new_a, coeff, t.vdeg_t)
    return {key2: c for key2, c in out.items() if c != 0}


def morphism_compatibility_check(t, q_source, q_target,
                                 c_monomials=(), o_monomials=()):
    """Defects of the chain-map condition through the morphism."""
    defects = []
    for blocks in c_monomials:
        total = {}
        for key, c in extend_on_c(q_source, {blocks: Fraction(1)}).items():
            for lab, vc in t.corestrict_c(key).items():
                total[lab] = total.get(lab, Fraction(0)) + c * vc
        for key, c in morphism_image_c(t, blocks).items():
            for lab, vc in q_target.corestrict_c(key).items():
                total[lab] = total.get(lab, Fraction(0)) - c * vc
        total = {l: c for l, c in total.items() if c != 0}
        if total:
            defects.append((("c", blocks), total))
    for key in o_monomials:
        total = {}
        for k2, c in extend_on_o(q_source, {key: Fraction(1)}).items():
            for lab, ac in t.corestrict_o(k2).items():
                total[lab] = total.get(lab, Fraction(0)) + c * ac
        for k2, c in morphism_image_o(t, key).items():
            for lab, ac in q_target.corestrict_o(k2).items():
                total[lab] = total.get(lab, Fraction(0)) - c * ac
        total = {l: c for l, c in total.items() if c != 0}
        if total:
            defects.append((("o", key), total))
    return defects
