"""Tree complexes over small two-colored cooperad tables.

The tables store, per arity and output color, a monomial basis together
with its splitting constants: every basis element is a closed-color block
monomial (for closed output) or a pair (block monomial; open word) (for
open output), and splitting an element into an outer and an inner part is
the block/word division calculus from the coalgebra layer.  Four tables
are built from the same machinery and differ only in which shapes are
admitted.

On top of a table sits the tree complex: vertices are decorated by table
basis elements whose letters are the direct inputs (leaves or subtrees),
and the differential splits one vertex into two along every admissible
division.  Vertex degrees are the table degrees raised by one; the
splitting signs live in the suspended world where every block and every
open slot counts one extra odd crossing.
"""

import itertools
import json
from fractions import Fraction

from .exactlinalg import SparseMatrix, cohomology_dimension
from .graded import koszul_sign_exp
from .hochschild import TruncationError
from .scoalgebra import (STAR, basis_c_monomials, c_monomial_degree,
                         canon_blocks, ger_eval, star_prefix_parity,
                         word_parity)


# ---------------------------------------------------------------------------
# tokens and degrees
#
# a tree is a nested token: leaves ("lc", i) / ("lo", j) of degree zero,
# vertices ("nc", blocks) / ("no", (blocks, word)) whose letters are the
# child tokens.  The tuple ordering lc < lo < nc < no makes token sorting
# deterministic.


class Token(tuple):
    """Tree token; orders after plain strings so the star placeholder and
    letter labels from the coalgebra layer can share containers."""

    __slots__ = ()

    def __lt__(self, other):
        if isinstance(other, str):
            return False
        return tuple.__lt__(self, other)

    def __le__(self, other):
        if isinstance(other, str):
            return False
        return tuple.__le__(self, other)

    def __gt__(self, other):
        if isinstance(other, str):
            return True
        return tuple.__gt__(self, other)

    def __ge__(self, other):
        if isinstance(other, str):
            return True
        return tuple.__ge__(self, other)


def c_leaf(i):
    return Token(("lc", i))


def o_leaf(j):
    return Token(("lo", j))


def c_node(key):
    return Token(("nc", key))


def o_node(key):
    return Token(("no", key))


_TOKDEG = {}


def token_degree(tok):
    if tok[0] in ("lc", "lo"):
        return 0
    cached = _TOKDEG.get(tok)
    if cached is not None:
        return cached
    if tok[0] == "nc":
        deg = c_key_degree(tok[1]) + 1
    else:
        blocks, word = tok[1]
        deg = o_key_degree(blocks, word) + 1
    _TOKDEG[tok] = deg
    return deg


def c_key_degree(blocks):
    k = sum(len(b) for b in blocks)
    return (2 - k - len(blocks)
            + sum(token_degree(t) for b in blocks for t in b))


def o_key_degree(blocks, word):
    return (c_key_degree(blocks) - 1 - len(word)
            + sum(token_degree(t) for t in word))


def degree_map(tokens):
    return {t: token_degree(t) for t in tokens}


def key_tokens(color, key):
    if color == "c":
        return tuple(t for b in key for t in b)
    blocks, word = key
    return tuple(t for b in blocks for t in b) + tuple(word)


def key_arity(color, key):
    """(closed inputs, open inputs) counting the star slot as one input."""
    if color == "c":
        return sum(len(b) for b in key), 0
    blocks, word = key
    return sum(len(b) for b in blocks), len(word)


def tree_degree(tok):
    if tok[0] in ("lc", "lo"):
        return 0
    return token_degree(tok)


def tree_leaves(tok):
    """(closed leaf set, open leaf set) of a nested token."""
    if tok[0] == "lc":
        return {tok[1]}, set()
    if tok[0] == "lo":
        return set(), {tok[1]}
    cset, oset = set(), set()
    if tok[0] == "nc":
        children = key_tokens("c", tok[1])
    else:
        children = key_tokens("o", tok[1])
    for child in children:
        cs, os_ = tree_leaves(child)
        cset |= cs
        oset |= os_
    return cset, oset


def render_token(tok):
    if tok[0] == "lc":
        return "c%s" % (tok[1],)
    if tok[0] == "lo":
        return "o%s" % (tok[1],)
    if tok[0] == "nc":
        return "s" + _render_blocks(tok[1])
    blocks, word = tok[1]
    return "s(%s;%s)" % (_render_blocks(blocks),
                         ",".join(render_token(t) for t in word))


def _render_blocks(blocks):
    parts = []
    for b in blocks:
        inner = ",".join(render_token(t) for t in b)
        parts.append("[" + inner + "]" if len(b) > 1 else inner)
    return ".".join(parts)


# ---------------------------------------------------------------------------
# cooperad tables


_TABLE_KINDS = ("GerVee", "S", "OCVee", "sc")


class CooperadTable(object):
    """Basis and splitting data for one of the four cooperad tables.

    components maps (k, n, color) to the list of canonical basis keys on
    the leaf slots; blocked holds shape patterns whose cocompositions are
    forced to zero (used to model damaged tables).  weight_of and
    cocompositions expose the generator-counting grading in the form the
    transfer layer checks.
    """

    def __init__(self, name, cutoff, has_o_sector, c_brackets, o_brackets):
        self.name = name
        self.cutoff = cutoff
        self.has_o_sector = has_o_sector
        self.c_brackets = c_brackets
        self.o_brackets = o_brackets
        self.blocked = set()
        self.components = {}
        self._build_components()
        self._cocompositions = None

    def _build_components(self):
        deg0 = {}
        for k in range(2, self.cutoff + 1):
            slots = tuple(c_leaf(i) for i in range(1, k + 1))
            for tok in slots:
                deg0[tok] = 0
            keys = [b for b in basis_c_monomials(slots, deg0)
                    if self.c_brackets or all(len(w) == 1 for w in b)]
            self.components[(k, 0, "c")] = keys
        if not self.has_o_sector:
            return
        for k in range(0, self.cutoff + 1):
            for n in range(0, self.cutoff + 1 - k):
                if 2 * k + n < 2:
                    continue
                cslots = tuple(c_leaf(i) for i in range(1, k + 1))
                oslots = tuple(o_leaf(j) for j in range(1, n + 1))
                for tok in cslots + oslots:
                    deg0[tok] = 0
                if k == 0:
                    shapes = [()]
                else:
                    shapes = [b for b in basis_c_monomials(cslots, deg0)
                              if self.o_brackets
                              or all(len(w) == 1 for w in b)]
                keys = [(b, w) for b in shapes
                        for w in itertools.permutations(oslots)]
                self.components[(k, n, "o")] = keys

    def degree_of(self, color, key):
        if color == "c":
            return c_key_degree(key)
        return o_key_degree(*key)

    def weight_of(self, element):
        color, key = element
        k, n = key_arity(color, key)
        if color == "c":
            return 2 * (k - 1)
        return 2 * k + n - 1

    def shape_pattern(self, color, key):
        """Slot-relabeled copy of a key, forgetting what the slots hold."""
        if color == "c":
            cmap = {t: c_leaf(i + 1)
                    for i, t in enumerate(sorted(key_tokens("c", key)))}
            pattern = tuple(tuple(cmap[t] for t in b) for b in key)
            deg0 = {s: 0 for s in cmap.values()}
            canon = canon_blocks(pattern, deg0)
            return ("c", canon[1] if canon else pattern)
        blocks, word = key
        cmap = {t: c_leaf(i + 1) for i, t in
                enumerate(sorted(t for b in blocks for t in b))}
        omap = {t: o_leaf(j + 1) for j, t in enumerate(word)}
        pb = tuple(tuple(cmap[t] for t in b) for b in blocks)
        deg0 = {s: 0 for s in cmap.values()}
        canon = canon_blocks(pb, deg0) if pb else (1, ())
        pb = canon[1] if canon else pb
        return ("o", (pb, tuple(omap[t] for t in word)))

    def admits(self, color, key):
        k, n = key_arity(color, key)
        if k + n > self.cutoff:
            raise TruncationError(
                "arity (%d,%d) exceeds table cutoff %d" % (k, n, self.cutoff))
        if color == "c":
            if n or k < 2:
                return False
            if not self.c_brackets and any(len(w) > 1 for w in key):
                return False
        else:
            if not self.has_o_sector or 2 * k + n < 2:
                return False
            if not self.o_brackets and any(len(w) > 1 for w in key[0]):
                return False
        return self.shape_pattern(color, key) not in self.blocked

    def block_shapes(self, color, k, n, predicate):
        """Copy of the table with matching component keys forced to zero."""
        twin = CooperadTable(self.name, self.cutoff, self.has_o_sector,
                             self.c_brackets, self.o_brackets)
        twin.blocked = set(self.blocked)
        for key in self.components.get((k, n, color), ()):
            if predicate(key):
                twin.blocked.add(self.shape_pattern(color, key))
        twin.components = {
            sig: [key for key in keys
                  if twin.shape_pattern(sig[2], key) not in twin.blocked]
            for sig, keys in self.components.items()}
        return twin

    @property
    def cocompositions(self):
        if self._cocompositions is None:
            entries = []
            for (k, n, color), keys in sorted(self.components.items()):
                for key in keys:
                    for lam, outer, inner, icolor in key_splits(color, key):
                        if not self.admits(icolor, inner):
                            continue
                        entries.append(((color, key), (color, outer),
                                        (icolor, inner), lam))
            self._cocompositions = entries
        return self._cocompositions


def build_cooperad_tables(which, cutoff=4):
    """Cooperad table for one of GerVee, S, OCVee, sc."""
    if which not in _TABLE_KINDS:
        raise ValueError("unknown table %r; expected one of %s"
                         % (which, ", ".join(_TABLE_KINDS)))
    if cutoff < 2 or cutoff > 4:
        raise TruncationError("table cutoff must lie in 2..4")
    has_o = which != "GerVee"
    c_brackets = which != "OCVee"
    o_brackets = which == "sc"
    return CooperadTable(which, cutoff, has_o, c_brackets, o_brackets)


# ---------------------------------------------------------------------------
# splittings
#
# block divisions live on degree zero slots: a pair (outer, inner)
# appears with the coefficient of the slot pattern in outer with inner
# substituted for the star.  Content parities never enter the division
# constants; they contribute only the Koszul sign of reordering the
# contents into outer-prefix, inner, outer-suffix order plus the move of
# the inner desuspension past the prefix.  Canonical form of a written
# key factors the same way, structural rewrite on slots times content
# permutation sign, so that the two stay compatible.


def slot(i):
    return Token(("sl", i))


class ShapeSplit(object):
    __slots__ = ("lam", "outer", "inner", "inner_color", "q",
                 "upre", "usuf", "vorder")

    def __init__(self, lam, outer, inner, inner_color, q, upre, usuf,
                 vorder):
        self.lam = lam
        self.outer = outer
        self.inner = inner
        self.inner_color = inner_color
        self.q = q
        self.upre = upre
        self.usuf = usuf
        self.vorder = vorder


def o_key_degree_with(blocks, word, degs):
    k = sum(len(b) for b in blocks)
    return (2 - k - len(blocks) - 1 - len(word)
            + sum(degs[t] for b in blocks for t in b)
            + sum(degs[t] for t in word))


def _c_linear(blocks):
    return tuple(t for b in blocks for t in b)


def _split_positions(outer_linear, inner_linear):
    """Slot indices before and after the star, and the inner order."""
    upre, usuf, seen_star = [], [], False
    for t in outer_linear:
        if t == STAR:
            seen_star = True
        elif seen_star:
            usuf.append(t[1])
        else:
            upre.append(t[1])
    return tuple(upre), tuple(usuf), tuple(t[1] for t in inner_linear)


_ABSTRACT_CACHE = {}
_CDIV_CACHE = {}


def _dual_c_divisions(blocks):
    """Block divisions read off from monomial compositions.

    A pair (outer, inner) appears with the coefficient of `blocks` in
    the expansion of outer with the inner monomial substituted for the
    star.  Computing the constants this way keeps the bracket rewriting
    honest where plain cut enumeration misses cross terms.
    """
    cached = _CDIV_CACHE.get(blocks)
    if cached is not None:
        return cached
    slots = _c_linear(blocks)
    k = len(slots)
    deg0 = {t: 0 for t in slots}
    out = []
    for r in range(2, k + 1):
        for picked in itertools.combinations(range(k), r):
            ss = tuple(slots[i] for i in picked)
            rest = tuple(slots[i] for i in range(k) if i not in picked)
            for inner in basis_c_monomials(ss, deg0):
                vdeg = c_monomial_degree(inner, deg0)
                stardeg = dict(deg0)
                stardeg[STAR] = vdeg
                for outer in basis_c_monomials((STAR,) + rest, stardeg):
                    exp = ger_eval(outer, {STAR: {inner: Fraction(1)}},
                                   stardeg)
                    lam = exp.get(blocks)
                    if lam:
                        out.append((lam, outer, inner))
    _CDIV_CACHE[blocks] = out
    return out


def _abstract_splits(color, shape):
    """All divisions of a slot shape with their slot bookkeeping."""
    cached = _ABSTRACT_CACHE.get((color, shape))
    if cached is not None:
        return cached
    if color == "c":
        blocks, word = shape, None
    else:
        blocks, word = shape
    deg0 = {t: 0 for t in _c_linear(blocks)}
    if word:
        for t in word:
            deg0[t] = 0
    star0 = dict(deg0)
    star0[STAR] = 0
    out = []
    if blocks:
        for lam, outer, inner in _dual_c_divisions(blocks):
            if len(inner) == 1 and len(inner[0]) == 1:
                continue
            if color == "c" and outer == ((STAR,),):
                continue
            v_deg = c_monomial_degree(inner, deg0)
            if color == "c":
                u_deg = c_monomial_degree(outer, star0)
                outer_shape = outer
                outer_linear = _c_linear(outer)
            else:
                u_deg = o_key_degree_with(outer, word, star0)
                outer_shape = (outer, word)
                outer_linear = _c_linear(outer) + tuple(word)
            q = {
                "v": v_deg % 2,
                "u": u_deg % 2,
                "p_node": (v_deg + 1) % 2,
                "prefix_h": star_prefix_parity(outer, deg0, v_deg % 2),
                "prefix_s": star_prefix_parity(outer, deg0,
                                               (v_deg + 1) % 2),
            }
            upre, usuf, vorder = _split_positions(outer_linear,
                                                  _c_linear(inner))
            out.append(ShapeSplit(Fraction(lam), outer_shape, inner, "c",
                                  q, upre, usuf, vorder))
    if color == "o":
        b = len(blocks)
        n = len(word)
        wp = [word_parity(bl, deg0) for bl in blocks]
        pp = [(wp[i] + len(blocks[i])) % 2 for i in range(b)]
        for r in range(0, b + 1):
            for sin in itertools.combinations(range(b), r):
                sout = tuple(i for i in range(b) if i not in sin)
                bin_ = tuple(blocks[i] for i in sin)
                bout = tuple(blocks[i] for i in sout)
                eps_s = sum(pp[i] * pp[j]
                            for i in sin for j in sout if i < j)
                eps_h = sum(wp[i] * wp[j]
                            for i in sin for j in sout if i < j)
                for t in range(1, n + 2):
                    for s in range(t - 1, n + 1):
                        w_in = word[t - 1:s]
                        if not bin_ and len(w_in) <= 1:
                            continue
                        if not bout and len(w_in) == n:
                            continue
                        v_deg = o_key_degree_with(bin_, w_in, deg0)
                        outer_word = word[:t - 1] + (STAR,) + word[s:]
                        u_deg = o_key_degree_with(bout, outer_word, star0)
                        q = {
                            "v": v_deg % 2,
                            "u": u_deg % 2,
                            "p_node": (v_deg + 1) % 2,
                            "eps_s": eps_s % 2,
                            "eps_h": eps_h % 2,
                            "pin_h": sum(wp[i] for i in sin) % 2,
                            "pin_s": sum(pp[i] for i in sin) % 2,
                            "pout_h": sum(wp[j] for j in sout) % 2,
                            "pout_s": sum(pp[j] for j in sout) % 2,
                            "a_pre_s": (t - 1) % 2,
                            "a_in_s": len(w_in) % 2,
                        }
                        outer_linear = (_c_linear(bout)
                                        + tuple(outer_word))
                        inner_linear = _c_linear(bin_) + tuple(w_in)
                        upre, usuf, vorder = _split_positions(
                            outer_linear, inner_linear)
                        out.append(ShapeSplit(
                            Fraction(1), (bout, outer_word), (bin_, w_in),
                            "o", q, upre, usuf, vorder))
    for idx, sp in enumerate(out):
        sp.q["sid"] = (color, shape, idx)
    _ABSTRACT_CACHE[(color, shape)] = out
    return out


def _shape_of_key(color, key):
    """Slot shape of a key plus its letters in slot order.

    Slots are numbered by the sorted order of the contents, so a
    canonical key is exactly a canonical degree zero pattern filled in
    with its sorted letters; word letters keep their positions.
    """
    if color == "c":
        order = tuple(sorted(_c_linear(key)))
        pos = {t: i for i, t in enumerate(order)}
        shape = tuple(tuple(slot(pos[t]) for t in b) for b in key)
        return shape, order
    blocks, word = key
    order = tuple(sorted(t for b in blocks for t in b))
    pos = {t: i for i, t in enumerate(order)}
    bshape = tuple(tuple(slot(pos[t]) for t in b) for b in blocks)
    wshape = tuple(slot(len(order) + i) for i in range(len(word)))
    return (bshape, wshape), order + tuple(word)


_DUAL_EXP = {}


def _transport(pattern, ranked):
    """Dual change of basis for a relabeled vertex pattern.

    ranked lists, per sorted content rank, the pattern slot holding that
    content.  A vertex labeled by the dual of `pattern` re-expands in the
    canonical key basis with the coefficient of K given by the pattern
    component of K pulled back along the assignment; the pull back runs
    in the even slot calculus.  The forward canon of the written form is
    wrong here: relabeling acts on Lie words through Jacobi, so the dual
    basis transforms by the inverse transpose, not the same matrix.
    """
    cached = _DUAL_EXP.get((pattern, ranked))
    if cached is not None:
        return cached
    rks = tuple(slot(i) for i in range(len(ranked)))
    rdeg = {s: 0 for s in rks}
    deg0 = {s: 0 for s in ranked}
    deg0[STAR] = 0
    out = {}
    for cand in basis_c_monomials(rks, rdeg):
        rel = tuple(tuple(ranked[s[1]] for s in w) for w in cand)
        c = ger_eval(rel, {}, deg0).get(pattern)
        if c:
            out[cand] = c
    _DUAL_EXP[(pattern, ranked)] = out
    return out


def _dual_blocks(pattern, assign, degs):
    """Written block part of one vertex as a canonical key -> coeff dict.

    assign maps the pattern slots (and the star) to distinct contents.
    The content permutation contributes its Koszul sign at the true
    degrees; the structural re-expansion happens at degree zero through
    the dual transport.
    """
    written = [assign[s] for w in pattern for s in w]
    order = tuple(sorted(written))
    pos = {t: i for i, t in enumerate(order)}
    perm = tuple(pos[t] for t in written)
    exp = koszul_sign_exp(perm, [degs[t] for t in order])
    sgn = -1 if exp % 2 else 1
    back = {v: s for s, v in assign.items()}
    ranked = tuple(back[t] for t in order)
    out = {}
    for cand, c in _transport(pattern, ranked).items():
        key = tuple(tuple(order[s[1]] for s in w) for w in cand)
        out[key] = sgn * c
    return out


_HOOK_BITS = {}


def _sign_c(q):
    """Exponent for a division whose inner part is a closed vertex."""
    return _HOOK_BITS.get(q["sid"], 0)


def _sign_o(q):
    """Exponent for a split whose inner part has open output."""
    return _HOOK_BITS.get(q["sid"], 0)


def key_splits(color, key):
    """Divisions of a degree zero basis key as (coeff, outer, inner) data.

    Exposed for the table constants; the differential drives the same
    abstract splits through the content re-insertion path.
    """
    shape, letters = _shape_of_key(color, key)
    back = {}
    for i, letter in enumerate(letters):
        back[slot(i)] = letter

    def remap_c(blocks):
        return tuple(tuple(back.get(t, t) for t in b) for b in blocks)

    out = []
    for sp in _abstract_splits(color, shape):
        if color == "c":
            outer = remap_c(sp.outer)
        else:
            outer = (remap_c(sp.outer[0]),
                     tuple(back.get(t, t) for t in sp.outer[1]))
        if sp.inner_color == "c":
            inner = remap_c(sp.inner)
        else:
            inner = (remap_c(sp.inner[0]),
                     tuple(back.get(t, t) for t in sp.inner[1]))
        out.append((sp.lam, outer, inner, sp.inner_color))
    return out


# ---------------------------------------------------------------------------
# operad elements and the differential


class OperadElement(object):
    """Rational combination of trees of one signature and degree."""

    def __init__(self, table, color, terms):
        self.table = table
        self.color = color
        self.terms = {t: Fraction(c) for t, c in terms.items() if c}
        sig = None
        deg = None
        for tok, _ in self.terms.items():
            cs, os_ = tree_leaves(tok)
            this_sig = (frozenset(cs), frozenset(os_))
            this_deg = tree_degree(tok)
            if sig is None:
                sig, deg = this_sig, this_deg
            elif sig != this_sig or deg != this_deg:
                raise ValueError("mixed signature or degree in element")
        self.signature = sig
        self.degree = deg if deg is not None else None

    def __add__(self, other):
        out = dict(self.terms)
        for tok, c in other.terms.items():
            out[tok] = out.get(tok, Fraction(0)) + c
        return OperadElement(self.table, self.color, out)

    def scale(self, c):
        return OperadElement(self.table, self.color,
                             {t: v * c for t, v in self.terms.items()})

    def __sub__(self, other):
        return self + other.scale(Fraction(-1))

    def is_zero(self):
        return not self.terms

    def __eq__(self, other):
        return (self.color == other.color and self.terms == other.terms)

    def __ne__(self, other):
        return not self == other

    def __repr__(self):
        if not self.terms:
            return "0"
        bits = []
        for tok in sorted(self.terms):
            bits.append("%s*%s" % (self.terms[tok], render_token(tok)))
        return " + ".join(bits)


def single_vertex(table, color, key):
    """One-vertex element on the canonical leaf slots of a component."""
    if not table.admits(color, key):
        raise ValueError("key not admitted by table %s" % table.name)
    tok = c_node(key) if color == "c" else o_node(key)
    return OperadElement(table, color, {tok: Fraction(1)})


def _substitute(color, key, target, value_terms, degs):
    """Replace one token of a key by each term of a tree-valued element.

    Returns a dict token-of-same-kind -> coefficient; block parts are
    re-expanded through the dual transport, the open word is positional.
    """
    out = {}
    shape, letters = _shape_of_key(color, key)
    if color == "c":
        bshape = shape
    else:
        bshape = shape[0]
    nblock = len(_c_linear(bshape))
    in_blocks = any(letters[i] == target for i in range(nblock))
    for new_tok, coeff in value_terms.items():
        local = dict(degs)
        local[new_tok] = tree_degree(new_tok)
        if in_blocks:
            assign = {slot(i): (new_tok if letters[i] == target
                                else letters[i]) for i in range(nblock)}
            for nb, c in _dual_blocks(bshape, assign, local).items():
                tok = c_node(nb) if color == "c" else o_node((nb, key[1]))
                out[tok] = out.get(tok, Fraction(0)) + coeff * c
        else:
            nw = tuple(new_tok if t == target else t for t in key[1])
            tok = o_node((key[0], nw))
            out[tok] = out.get(tok, Fraction(0)) + coeff
    return out


def _fill(shape_blocks, letters):
    return tuple(tuple(letters[s[1]] for s in b) for b in shape_blocks)


def _eval_inner(sp, letters, degs, table):
    """Inner vertex terms with contents filled in, as (token, sign).

    Slot patterns instantiated along the sorted letters are canonical
    already, so the inner vertex never needs rewriting.
    """
    out = []
    if sp.inner_color == "c":
        ikey = _fill(sp.inner, letters)
        if table.admits("c", ikey):
            out.append((c_node(ikey), Fraction(1)))
        return out
    bshape, wshape = sp.inner
    ikey = (_fill(bshape, letters), tuple(letters[s[1]] for s in wshape))
    if table.admits("o", ikey):
        out.append((o_node(ikey), Fraction(1)))
    return out


def _eval_outer(color, sp, letters, node, degs, table):
    """Root vertex terms around one inner node, as (token, sign)."""
    out = []

    def put(s):
        return node if s == STAR else letters[s[1]]

    if color == "c":
        assign = {s: put(s) for b in sp.outer for s in b}
        for nb, coeff in _dual_blocks(sp.outer, assign, degs).items():
            if table.admits("c", nb):
                out.append((c_node(nb), coeff))
        return out
    bshape, wshape = sp.outer
    word = tuple(put(s) for s in wshape)
    if STAR in wshape or not bshape:
        okey = (_fill(bshape, letters), word)
        if table.admits("o", okey):
            out.append((o_node(okey), Fraction(1)))
        return out
    assign = {s: put(s) for b in bshape for s in b}
    for nb, coeff in _dual_blocks(bshape, assign, degs).items():
        okey = (nb, word)
        if table.admits("o", okey):
            out.append((o_node(okey), coeff))
    return out


def _d_token(tok, table):
    """Differential of a single tree, as a token -> coefficient dict."""
    out = {}
    color = "c" if tok[0] == "nc" else "o"
    key = tok[1]
    tokens = key_tokens(color, key)
    degs = degree_map(tokens)
    # split the root vertex: contents reorder into outer-prefix, inner,
    # outer-suffix order with Koszul crossing signs, the inner
    # desuspension moves past the prefix contents, and each division
    # carries a frozen per-split sign bit on top.
    shape, letters = _shape_of_key(color, key)
    sus = [degs[t] for t in letters]
    cp = tuple(s % 2 for s in sus)
    for sp in _abstract_splits(color, shape):
        exp = koszul_sign_exp(sp.upre + sp.vorder + sp.usuf, sus)
        exp += sp.q["p_node"] * sum(sus[i] for i in sp.upre)
        q2 = dict(sp.q)
        q2["sid"] = sp.q["sid"] + (cp,)
        exp += _sign_c(q2) if sp.inner_color == "c" else _sign_o(q2)
        base = sp.lam * (-1 if exp % 2 else 1)
        for node, s_in in _eval_inner(sp, letters, degs, table):
            local = dict(degs)
            local[node] = token_degree(node)
            for otok, s_out in _eval_outer(color, sp, letters, node,
                                           local, table):
                c = base * s_in * s_out
                out[otok] = out.get(otok, Fraction(0)) + c
    # recurse into child vertices
    kk = key_arity(color, key)[0]
    if color == "c":
        own = (2 - kk - len(key)) % 2
    else:
        own = (1 - kk - len(key[0]) - len(key[1])) % 2
    prefix = (own + 1) % 2
    for child in tokens:
        if child[0] in ("nc", "no"):
            inner = _d_token(child, table)
            if inner:
                sgn = -1 if prefix % 2 else 1
                placed = _substitute(color, key, child, inner, degs)
                for ntok, c in placed.items():
                    out[ntok] = out.get(ntok, Fraction(0)) + sgn * c
        prefix = (prefix + tree_degree(child)) % 2
    return {t: c for t, c in out.items() if c != 0}


def cobar_differential(elem, table=None):
    """Degree one differential splitting each vertex along its divisions."""
    table = table or elem.table
    out = {}
    for tok, coeff in elem.terms.items():
        for ntok, c in _d_token(tok, table).items():
            out[ntok] = out.get(ntok, Fraction(0)) + coeff * c
    return OperadElement(table, elem.color, out)


# ---------------------------------------------------------------------------
# tree enumeration and cohomology


def _c_subtrees(table, leaves):
    """All closed-output trees on a sorted tuple of closed leaf labels."""
    if len(leaves) == 1:
        return [c_leaf(leaves[0])]
    out = []
    for parts in _partitions_into(leaves, None):
        if len(parts) < 2:
            continue
        choices = [_c_subtrees(table, g) for g in parts]
        for combo in itertools.product(*choices):
            degs = {t: tree_degree(t) for t in combo}
            for shape in basis_c_monomials(tuple(sorted(combo)), degs):
                if _admits_quiet(table, "c", shape):
                    out.append(c_node(shape))
    return out


def _o_subtrees(table, cleaves, oleaves):
    """All open-output trees on sorted closed and open leaf label tuples.

    Closed slots of the root hold closed subtrees on closed leaves only;
    open slots hold open subtrees and those may capture closed leaves (a
    one-closed-leaf open subtree is the anchor vertex).
    """
    if not cleaves and len(oleaves) == 1:
        return [o_leaf(oleaves[0])]
    out = []
    for kr in range(0, len(cleaves) + 1):
        for csub in itertools.combinations(cleaves, kr):
            rest = ([("c", i) for i in cleaves if i not in csub]
                    + [("o", j) for j in oleaves])
            max_nr = len(rest)
            for nr in range(0, max_nr + 1):
                if 2 * kr + nr < 2:
                    continue
                if kr == 0 and nr == 1:
                    continue
                for cparts in _partitions_into(csub, kr):
                    cchoices = [_c_subtrees(table, g) for g in cparts]
                    for oparts in _partitions_into(tuple(rest), nr):
                        ochoices = [_o_group(table, g) for g in oparts]
                        for ccombo in itertools.product(*cchoices):
                            for ocombo in itertools.product(*ochoices):
                                out.extend(_o_roots(table, ccombo, ocombo))
    return out


def _o_group(table, group):
    cl = tuple(sorted(l for kind, l in group if kind == "c"))
    ol = tuple(sorted(l for kind, l in group if kind == "o"))
    return _o_subtrees(table, cl, ol)


def _o_roots(table, ccombo, ocombo):
    out = []
    degs = {t: tree_degree(t) for t in ccombo + ocombo}
    if ccombo:
        shapes = basis_c_monomials(tuple(sorted(ccombo)), degs)
    else:
        shapes = [()]
    for shape in shapes:
        for w in itertools.permutations(ocombo):
            key = (shape, w)
            if _admits_quiet(table, "o", key):
                out.append(o_node(key))
    return out


def _admits_quiet(table, color, key):
    try:
        return table.admits(color, key)
    except TruncationError:
        return False


def _partitions_into(labels, parts):
    """Partitions of a label tuple into unordered nonempty groups.

    parts=None allows any number of groups; otherwise exactly parts.
    Groups come out ordered by first appearance, each sorted.
    """
    items = list(labels)
    if parts is not None and (len(items) < parts or parts == 0):
        if parts == 0 and not items:
            yield []
        return
    if not items:
        yield []
        return

    def rec(rest, bins, used):
        if not rest:
            if parts is None or used == parts:
                yield [tuple(sorted(b)) for b in bins]
            return
        first, tail = rest[0], rest[1:]
        limit = used + 1 if parts is None else min(used + 1, parts)
        for i in range(limit):
            if i == used:
                bins.append([first])
                for res in rec(tail, bins, used + 1):
                    yield res
                bins.pop()
            else:
                bins[i].append(first)
                for res in rec(tail, bins, used):
                    yield res
                bins[i].pop()
    for res in rec(items, [], 0):
        yield res


def enumerate_trees(table, signature):
    """Canonical trees of one signature (k, n, color)."""
    k, n, color = signature
    if k + n > table.cutoff:
        raise TruncationError(
            "signature (%d,%d) exceeds table cutoff %d"
            % (k, n, table.cutoff))
    if color == "c":
        if n:
            return []
        trees = [t for t in _c_subtrees(table, tuple(range(1, k + 1)))
                 if t[0] == "nc"]
    else:
        if not table.has_o_sector:
            return []
        trees = [t for t in _o_subtrees(table, tuple(range(1, k + 1)),
                                        tuple(range(1, n + 1)))
                 if t[0] == "no"]
    return sorted(set(trees))


def arity_cohomology(signature, degree, table):
    """Cohomology dimension and representatives at one tree degree."""
    trees = enumerate_trees(table, signature)
    by_deg = {}
    for t in trees:
        by_deg.setdefault(tree_degree(t), []).append(t)
    here = by_deg.get(degree, [])
    below = by_deg.get(degree - 1, [])
    above = by_deg.get(degree + 1, [])
    if not here:
        return 0, []
    d_in = _matrix_of_d(table, below, here)
    d_out = _matrix_of_d(table, here, above)
    dim = cohomology_dimension(d_in, d_out)
    reps = _representatives(below, here, d_in, d_out, dim)
    return dim, reps


def _matrix_of_d(table, source, target):
    index = {t: i for i, t in enumerate(target)}
    columns = []
    for t in source:
        col = {}
        for ntok, c in _d_token(t, table).items():
            col[index[ntok]] = c
        columns.append(col)
    return SparseMatrix.from_columns(columns, len(target))


def _representatives(below, here, d_in, d_out, dim):
    if dim == 0:
        return []
    kernel = d_out.kernel_basis()
    base = [c for c in (d_in.column(j) for j in range(len(below))) if c]
    reps = []
    for vec in kernel:
        probe = base + reps + [vec]
        m = SparseMatrix.from_columns(probe, len(here))
        if m.rank() == len(base) + len(reps) + 1:
            reps.append(vec)
        if len(reps) == dim:
            break
    out = []
    for vec in reps:
        out.append({render_token(here[i]): str(c) for i, c in vec.items()})
    return out


# ---------------------------------------------------------------------------
# distinguished elements and the certificate


def anchor_element(table):
    """One-vertex element with a single closed input and open output."""
    return single_vertex(table, "o", (((c_leaf(1),),), ()))


def mixed_element(table):
    """One-vertex element with one closed and one open input, degree -1."""
    return single_vertex(table, "o", (((c_leaf(1),),), (o_leaf(1),)))


def paired_anchor_element(table):
    """One-vertex element with two closed inputs and open output."""
    return single_vertex(table, "o", (((c_leaf(1),), (c_leaf(2),)), ()))


def anchored_pairing(table):
    """Two-vertex tree: anchor vertex over the two-block closed vertex."""
    inner = c_node(((c_leaf(1),), (c_leaf(2),)))
    return OperadElement(table, "o",
                         {o_node((((inner,),), ())): Fraction(1)})


def _mixed_insertions(table):
    """The two trees grafting an anchor vertex under the mixed element.

    The first tree puts the anchor over leaf 2, the second over leaf 1.
    """
    n1 = o_node((((c_leaf(1),),), ()))
    n2 = o_node((((c_leaf(2),),), ()))
    over_two = OperadElement(table, "o",
                             {o_node((((c_leaf(1),),), (n2,))): Fraction(1)})
    over_one = OperadElement(table, "o",
                             {o_node((((c_leaf(2),),), (n1,))): Fraction(1)})
    return over_two, over_one


def nonformality_witness(which="S", table=None, cutoff=3):
    """Certificate that the tree complex is not quasi-isomorphic to its
    cohomology with zero differential.

    The checks pin the one-dimensional mixed-arity degree -1 slot, its
    nonvanishing differential, the splitting identity of the two-anchor
    element, and the anchored pairing being a nontrivial cocycle.  A
    damaged table fails the squared-differential check and the conclusion
    reports the inconsistency.
    """
    if table is None:
        if which not in ("S", "sc"):
            raise ValueError("witness runs over the S or sc table")
        table = build_cooperad_tables(which, cutoff)
    checks = []

    dsq_bad = []
    for (k, n, color), keys in sorted(table.components.items()):
        if k + n > 3:
            continue
        for key in keys:
            elem = single_vertex(table, color, key)
            sq = cobar_differential(cobar_differential(elem, table), table)
            if not sq.is_zero():
                dsq_bad.append(render_token(next(iter(elem.terms))))
    checks.append({"name": "squared-differential-vanishes",
                   "pass": not dsq_bad,
                   "witness": {"failures": dsq_bad}})

    trees = enumerate_trees(table, (1, 1, "o"))
    deg_here = [t for t in trees if tree_degree(t) == -1]
    x = mixed_element(table)
    x_tok = next(iter(x.terms))
    span_ok = deg_here == [x_tok]
    checks.append({"name": "mixed-slot-one-dimensional",
                   "pass": span_ok,
                   "witness": {"basis": [render_token(t) for t in deg_here]}})

    dx = cobar_differential(x, table)
    checks.append({"name": "mixed-element-not-closed",
                   "pass": not dx.is_zero(),
                   "witness": {"differential": repr(dx)}})

    z = paired_anchor_element(table)
    over_two, over_one = _mixed_insertions(table)
    y = anchored_pairing(table)
    expected = over_two - over_one - y
    dz = cobar_differential(z, table)
    checks.append({"name": "two-anchor-splitting-identity",
                   "pass": dz == expected,
                   "witness": {"differential": repr(dz),
                               "expected": repr(expected)}})

    dy = cobar_differential(y, table)
    y_tok = next(iter(y.terms))
    cocycle = dy.is_zero()
    nontrivial = False
    if cocycle:
        t20 = enumerate_trees(table, (2, 0, "o"))
        by_deg = {}
        for t in t20:
            by_deg.setdefault(tree_degree(t), []).append(t)
        here = by_deg.get(-1, [])
        below = by_deg.get(-2, [])
        index = {t: i for i, t in enumerate(here)}
        image = [
            {index[ntok]: c for ntok, c in _d_token(t, table).items()}
            for t in below]
        image = [col for col in image if col]
        y_col = {index[y_tok]: Fraction(1)}
        base = SparseMatrix.from_columns(image, len(here))
        aug = SparseMatrix.from_columns(image + [y_col], len(here))
        nontrivial = aug.rank() == base.rank() + 1
    checks.append({"name": "anchored-pairing-nontrivial-cocycle",
                   "pass": cocycle and nontrivial,
                   "witness": {"closed": cocycle,
                               "independent-of-boundaries": nontrivial}})

    ok = all(c["pass"] for c in checks)
    if not checks[0]["pass"]:
        conclusion = "inconsistent-table"
    elif ok:
        conclusion = "nonformal"
    else:
        conclusion = "inconclusive"
    return {"operad": table.name, "checks": checks, "conclusion": conclusion}


def witness_json(cert):
    return json.dumps(cert, sort_keys=True, indent=2)
