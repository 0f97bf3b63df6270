"""Homotopy transfer of two-colored structures across a contraction.

The structure on the large pair (V', A') is pushed onto the small pair
(V, A) by induction on the generator weight.  Each weight step has a
closed-form particular solution through the homotopy, and the defining
equations are re-checked exactly at every step; an inconsistency aborts
with the offending weight and obstruction vector.

The open color alone is also transferred by an independent route, the
perturbation series on tensor coalgebras, which serves as an oracle for
the induction.
"""

import itertools
from fractions import Fraction

from .graded import GradedSpace
from .hochschild import AInfinityStructure, Cochain, TruncationError
from .scoalgebra import Coderivation, SCoalgebraMorphism, \
    basis_c_monomials, canon_o, morphism_compatibility_check, q_square_check, \
    table_coderivation


# ---------------------------------------------------------------------------
# linear maps as label dictionaries


def apply_map(m, vec):
    """Apply {src: {dst: c}} to {src: c}."""
    out = {}
    for lab, c in vec.items():
        for lab2, c2 in m.get(lab, {}).items():
            out[lab2] = out.get(lab2, Fraction(0)) + c * c2
    return {l: c for l, c in out.items() if c != 0}


def compose_maps(m2, m1):
    out = {}
    for lab, row in m1.items():
        val = apply_map(m2, row)
        if val:
            out[lab] = val
    return out


def map_difference(m1, m2):
    out = {}
    for lab in set(m1) | set(m2):
        row = dict(m1.get(lab, {}))
        for lab2, c in m2.get(lab, {}).items():
            row[lab2] = row.get(lab2, Fraction(0)) - c
        row = {l: c for l, c in row.items() if c != 0}
        if row:
            out[lab] = row
    return out


def identity_map(labels):
    return {l: {l: Fraction(1)} for l in labels}


# ---------------------------------------------------------------------------
# weight filtration on cogenerators


def c_weight(blocks):
    k = sum(len(w) for w in blocks)
    return 2 * (k - 1)


def o_weight(key):
    v, a = key
    return 2 * len(v) + len(a) - 1


def enumerate_source_keys(vspace, aspace, weight_limit):
    """Canonical cogenerator keys of the small pair, grouped by weight.

    Returns {weight: {"c": [...], "o": [...]}} with every list sorted.
    """
    vdeg = vspace.degree
    out = {w: {"c": [], "o": []} for w in range(weight_limit + 1)}
    vlabels = sorted(vspace.labels)
    alabels = sorted(aspace.labels)
    for k in range(1, weight_limit // 2 + 2):
        w = 2 * (k - 1)
        if w > weight_limit:
            break
        for multiset in itertools.combinations_with_replacement(vlabels, k):
            for blocks in basis_c_monomials(multiset, vdeg):
                out[w]["c"].append(blocks)
    for k in range(0, weight_limit // 2 + 2):
        for n in range(0, weight_limit + 2):
            if k == 0 and n == 0:
                continue
            w = 2 * k + n - 1
            if w < 0 or w > weight_limit:
                continue
            for vpart in itertools.combinations_with_replacement(vlabels, k):
                canon = canon_o(vpart, (), vdeg)
                if canon is None or canon[1][0] != vpart:
                    continue
                for apart in itertools.product(alabels, repeat=n):
                    out[w]["o"].append((vpart, apart))
    for w in out:
        out[w]["c"].sort()
        out[w]["o"].sort()
    return out


# ---------------------------------------------------------------------------
# contractions


class Contraction(object):
    """Inclusion i, projection p and homotopy h between colored pairs.

    i : (V, A) -> (V', A') and p backwards; h lives on (V', A') and has
    degree -1.  Each map is a dict label -> {label: coeff}; labels absent
    from the dict map to zero.
    """

    def __init__(self, vsource, asource, vtarget, atarget,
                 iv, pv, hv, ia, pa, ha):
        self.vsource = vsource
        self.asource = asource
        self.vtarget = vtarget
        self.atarget = atarget
        self.iv = dict(iv)
        self.pv = dict(pv)
        self.hv = dict(hv)
        self.ia = dict(ia)
        self.pa = dict(pa)
        self.ha = dict(ha)

    def color(self, which):
        if which == "v":
            return (self.iv, self.pv, self.hv,
                    self.vsource, self.vtarget)
        if which == "a":
            return (self.ia, self.pa, self.ha,
                    self.asource, self.atarget)
        raise ValueError("color must be 'v' or 'a'")


def trivial_contraction(vspace, aspace):
    return Contraction(vspace, aspace, vspace, aspace,
                       identity_map(vspace.labels),
                       identity_map(vspace.labels), {},
                       identity_map(aspace.labels),
                       identity_map(aspace.labels), {})


def linear_parts(q):
    """Differentials on the letters of a coderivation's pair."""
    dv = {}
    for lab in q.vspace.labels:
        val = q.corestrict_c(((lab,),))
        if val:
            dv[lab] = dict(val)
    da = {}
    for lab in q.aspace.labels:
        val = q.corestrict_o(((), (lab,)))
        if val:
            da[lab] = dict(val)
    return dv, da


def _check_degrees(maps, shift, src_deg, tgt_deg, name, defects):
    for lab, row in maps.items():
        for lab2, c in row.items():
            if c == 0:
                continue
            if tgt_deg[lab2] != src_deg[lab] + shift:
                defects.append((name, lab, lab2))


def validate_contraction(c, dv_prime, da_prime,
                         v_letters=None, a_letters=None):
    """Exact check of the contraction identities; empty list iff valid.

    dv_prime/da_prime are the differentials on the large pair.  The
    letter windows bound where the identities are evaluated; they default
    to the full bases.
    """
    defects = []
    for which in ("v", "a"):
        i, p, h, src, tgt = c.color(which)
        d_prime = dv_prime if which == "v" else da_prime
        src_letters = sorted(src.labels)
        letters = v_letters if which == "v" else a_letters
        if letters is None:
            letters = sorted(tgt.labels)
        _check_degrees(i, 0, src.degree, tgt.degree, which + ":i", defects)
        _check_degrees(p, 0, tgt.degree, src.degree, which + ":p", defects)
        _check_degrees(h, -1, tgt.degree, tgt.degree, which + ":h", defects)
        d_small = compose_maps(p, compose_maps(d_prime, i))
        for lab in src_letters:
            one = {lab: Fraction(1)}
            row = apply_map(p, apply_map(i, one))
            row[lab] = row.get(lab, Fraction(0)) - 1
            row = {l: v for l, v in row.items() if v != 0}
            if row:
                defects.append((which + ":pi", lab, row))
            row = apply_map(h, apply_map(i, one))
            if row:
                defects.append((which + ":hi", lab, row))
            row = apply_map(d_prime, apply_map(i, one))
            for l2, v in apply_map(i, apply_map(d_small, one)).items():
                row[l2] = row.get(l2, Fraction(0)) - v
            row = {l: v for l, v in row.items() if v != 0}
            if row:
                defects.append((which + ":chain-i", lab, row))
        for lab in letters:
            one = {lab: Fraction(1)}
            lhs = apply_map(i, apply_map(p, one))
            lhs[lab] = lhs.get(lab, Fraction(0)) - 1
            for l2, v in apply_map(d_prime, apply_map(h, one)).items():
                lhs[l2] = lhs.get(l2, Fraction(0)) - v
            for l2, v in apply_map(h, apply_map(d_prime, one)).items():
                lhs[l2] = lhs.get(l2, Fraction(0)) - v
            lhs = {l: v for l, v in lhs.items() if v != 0}
            if lhs:
                defects.append((which + ":iphd", lab, lhs))
            row = apply_map(h, apply_map(h, one))
            if row:
                defects.append((which + ":hh", lab, row))
            row = apply_map(p, apply_map(h, one))
            if row:
                defects.append((which + ":ph", lab, row))
            row = apply_map(d_small, apply_map(p, one))
            lhs = apply_map(p, apply_map(d_prime, one))
            for l2, v in row.items():
                lhs[l2] = lhs.get(l2, Fraction(0)) - v
            lhs = {l: v for l, v in lhs.items() if v != 0}
            if lhs:
                defects.append((which + ":chain-p", lab, lhs))
    return defects


# JSON layout: {"v": {"source": basis, "target": basis, "i": rows, ...}}
# with basis [{"label", "degree"}] and rows
# [{"input": label, "output": [{"label", "coeff_num", "coeff_den"}]}].


def _map_to_json(m):
    rows = []
    for lab, row in sorted(m.items()):
        rows.append({"input": lab,
                     "output": [{"label": l,
                                 "coeff_num": str(c.numerator),
                                 "coeff_den": str(c.denominator)}
                                for l, c in sorted(row.items())]})
    return rows


def _map_from_json(rows):
    out = {}
    for row in rows:
        val = {}
        for e in row["output"]:
            val[e["label"]] = Fraction(int(e["coeff_num"]),
                                       int(e["coeff_den"]))
        out[row["input"]] = val
    return out


def _basis_to_json(space):
    return [{"label": l, "degree": d} for l, d in space.basis]


def _basis_from_json(rows, name):
    return GradedSpace(name, [(b["label"], int(b["degree"])) for b in rows])


def contraction_to_json(c):
    return {"v": {"source": _basis_to_json(c.vsource),
                  "target": _basis_to_json(c.vtarget),
                  "i": _map_to_json(c.iv),
                  "p": _map_to_json(c.pv),
                  "h": _map_to_json(c.hv)},
            "a": {"source": _basis_to_json(c.asource),
                  "target": _basis_to_json(c.atarget),
                  "i": _map_to_json(c.ia),
                  "p": _map_to_json(c.pa),
                  "h": _map_to_json(c.ha)}}


def contraction_from_json(data):
    v, a = data["v"], data["a"]
    return Contraction(_basis_from_json(v["source"], "V"),
                       _basis_from_json(a["source"], "A"),
                       _basis_from_json(v["target"], "V'"),
                       _basis_from_json(a["target"], "A'"),
                       _map_from_json(v["i"]), _map_from_json(v["p"]),
                       _map_from_json(v["h"]),
                       _map_from_json(a["i"]), _map_from_json(a["p"]),
                       _map_from_json(a["h"]))


# ---------------------------------------------------------------------------
# minimal model condition: cocomposition must split weights additively


def check_minimal_model_condition(tables, weight_limit):
    """True iff every recorded cocomposition is weight additive.

    tables must provide weight_of(element) and an iterable
    cocompositions of (whole, left, right, coeff) entries.
    """
    for whole, left, right, coeff in tables.cocompositions:
        if coeff == 0:
            continue
        w = tables.weight_of(whole)
        if w > weight_limit:
            continue
        if w != tables.weight_of(left) + tables.weight_of(right):
            return False
    return True


# ---------------------------------------------------------------------------
# transfer by weight induction


class TransferObstruction(RuntimeError):
    """Defining equations inconsistent at a weight step."""

    def __init__(self, weight, defects):
        self.weight = weight
        self.defects = defects
        RuntimeError.__init__(
            self, "transfer obstructed at weight %d: %s"
            % (weight, defects[:3]))


class _LiveCoderivation(object):
    """Table-backed coderivation that sees table growth immediately."""

    def __init__(self, vspace, aspace, c_tab, o_tab):
        self.vspace = vspace
        self.aspace = aspace
        self.vdeg = dict(vspace.degree)
        self.adeg = dict(aspace.degree)
        self.parity = 1
        self._c = c_tab
        self._o = o_tab

    def corestrict_c(self, blocks):
        return self._c.get(blocks, {})

    def corestrict_o(self, key):
        return self._o.get(key, {})


class _LiveMorphism(object):
    def __init__(self, vsource, asource, vtarget, atarget, c_tab, o_tab):
        self.vdeg_s = dict(vsource.degree)
        self.adeg_s = dict(asource.degree)
        self.vdeg_t = dict(vtarget.degree)
        self.adeg_t = dict(atarget.degree)
        self._c = c_tab
        self._o = o_tab

    def corestrict_c(self, blocks):
        return self._c.get(blocks, {})

    def corestrict_o(self, key):
        return self._o.get(key, {})


def _single_defect(defects):
    if not defects:
        return {}
    return dict(defects[0][1])


def transfer_structure(q_prime, c, weight_limit, validate=True,
                       validate_v=None, validate_a=None):
    """Transferred coderivation and comparison morphism up to a weight.

    q_prime is the structure on the large pair of c.  Returns (Q, T)
    where Q lives on the small pair, T maps into the large pair, Q
    extends p d' i on letters and T extends i.  Raises
    TransferObstruction if a weight step is inconsistent.
    """
    dv_prime, da_prime = linear_parts(q_prime)
    if validate:
        bad = validate_contraction(c, dv_prime, da_prime,
                                   v_letters=validate_v,
                                   a_letters=validate_a)
        if bad:
            raise ValueError("contraction identities fail: %s" % bad[:3])
    vspace, aspace = c.vsource, c.asource
    keys = enumerate_source_keys(vspace, aspace, weight_limit)
    q_c, q_o, t_c, t_o = {}, {}, {}, {}
    live_q = _LiveCoderivation(vspace, aspace, q_c, q_o)
    live_t = _LiveMorphism(vspace, aspace, c.vtarget, c.atarget, t_c, t_o)

    dv_small = compose_maps(c.pv, compose_maps(dv_prime, c.iv))
    da_small = compose_maps(c.pa, compose_maps(da_prime, c.ia))
    for blocks in keys[0]["c"]:
        lab = blocks[0][0]
        t_c[blocks] = dict(c.iv.get(lab, {}))
        val = dv_small.get(lab, {})
        if val:
            q_c[blocks] = dict(val)
    for key in keys[0]["o"]:
        lab = key[1][0]
        t_o[key] = dict(c.ia.get(lab, {}))
        val = da_small.get(lab, {})
        if val:
            q_o[key] = dict(val)

    for w in range(1, weight_limit + 1):
        c_defs = {}
        o_defs = {}
        for blocks in keys[w]["c"]:
            c_defs[blocks] = _single_defect(morphism_compatibility_check(
                live_t, live_q, q_prime, c_monomials=[blocks]))
        for key in keys[w]["o"]:
            o_defs[key] = _single_defect(morphism_compatibility_check(
                live_t, live_q, q_prime, o_monomials=[key]))
        for blocks, defect in c_defs.items():
            val = apply_map(c.hv, defect)
            if val:
                t_c[blocks] = {l: -v for l, v in val.items()}
            val = apply_map(c.pv, defect)
            if val:
                q_c[blocks] = {l: -v for l, v in val.items()}
        for key, defect in o_defs.items():
            val = apply_map(c.ha, defect)
            if val:
                t_o[key] = {l: -v for l, v in val.items()}
            val = apply_map(c.pa, defect)
            if val:
                q_o[key] = {l: -v for l, v in val.items()}
        residual = (morphism_compatibility_check(
            live_t, live_q, q_prime,
            c_monomials=keys[w]["c"], o_monomials=keys[w]["o"])
            + q_square_check(live_q, c_monomials=keys[w]["c"],
                             o_monomials=keys[w]["o"]))
        if residual:
            raise TransferObstruction(w, residual)

    q = table_coderivation(vspace, aspace, q_c, q_o, parity=1,
                           name="transferred")
    t = SCoalgebraMorphism(vspace, aspace, c.vtarget, c.atarget,
                           c_rule=lambda b: t_c.get(b, {}),
                           o_rule=lambda k: t_o.get(k, {}),
                           name="transfer-inclusion")
    q.c_table = q_c
    q.o_table = q_o
    t.c_table = t_c
    t.o_table = t_o
    return q, t


def open_color_structure(q, arity_cutoff):
    """Operations read off the pure-open corestrictions of a coderivation.

    Inverts the (-1)^(n+1) twist between corestrictions and operations.
    """
    space = q.aspace
    m = {}
    for n in range(1, arity_cutoff + 1):
        sgn = 1 if (n + 1) % 2 == 0 else -1
        table = {}
        for word in itertools.product(space.labels, repeat=n):
            val = q.corestrict_o(((), word))
            if val:
                table[word] = {l: sgn * c for l, c in val.items()}
        coch = Cochain(space, n, 2, table)
        if not coch.is_zero():
            m[n] = coch
    return AInfinityStructure(space, m, arity_cutoff)


# ---------------------------------------------------------------------------
# perturbation oracle on tensor coalgebras

# bar-side vectors are dicts keyed by words (tuples of labels); operators
# cross a prefix letter with parity |letter| + 1


def _bar_coderivation(vec, m_family, adeg):
    out = {}
    for word, coeff in vec.items():
        r = len(word)
        for k, coch in m_family.items():
            if k > r:
                continue
            for j in range(r - k + 1):
                exp = sum(adeg[l] + 1 for l in word[:j])
                val = coch.evaluate(word[j:j + k])
                for lab, c in val.items():
                    new = word[:j] + (lab,) + word[j + k:]
                    tot = coeff * c * (-1 if exp % 2 else 1)
                    out[new] = out.get(new, Fraction(0)) + tot
    return {w: c for w, c in out.items() if c != 0}


def _bar_tensor_map(vec, m):
    """Letterwise degree-zero map on words."""
    out = {}
    for word, coeff in vec.items():
        rows = [m.get(l, {}) for l in word]
        for choice in itertools.product(*[sorted(r.items()) for r in rows]):
            new = tuple(l for l, _ in choice)
            c = coeff
            for _, v in choice:
                c *= v
            out[new] = out.get(new, Fraction(0)) + c
    return {w: c for w, c in out.items() if c != 0}


def _bar_homotopy(vec, c, adeg):
    """h on one letter, i p on the letters after it, prefix crossing."""
    ip = compose_maps(c.ia, c.pa)
    out = {}
    for word, coeff in vec.items():
        for j in range(len(word)):
            hval = c.ha.get(word[j], {})
            if not hval:
                continue
            exp = sum(adeg[l] + 1 for l in word[:j])
            tails = _bar_tensor_map({word[j + 1:]: Fraction(1)}, ip)
            for lab, hc in hval.items():
                for tail, tc in tails.items():
                    new = word[:j] + (lab,) + tail
                    tot = coeff * hc * tc * (-1 if exp % 2 else 1)
                    out[new] = out.get(new, Fraction(0)) + tot
    return {w: c2 for w, c2 in out.items() if c2 != 0}


def ainf_transfer_oracle(m_prime, c, arity_cutoff):
    """Transferred operations by the perturbation series.

    m_prime lives on the large open space of c.  The series applies the
    arity-lowering part of the bar differential, alternated with the
    tensor homotopy, between the coalgebra maps induced by i and p.
    """
    if arity_cutoff > m_prime.cutoff:
        raise TruncationError(
            "arity cutoff %d beyond the input cutoff %d"
            % (arity_cutoff, m_prime.cutoff))
    space = c.asource
    adeg_t = dict(c.atarget.degree)
    delta_family = {k: coch for k, coch in m_prime.m.items() if k >= 2}

    m1_small = compose_maps(c.pa, compose_maps(
        {l: m_prime.component(1).evaluate((l,)) for l in c.atarget.labels},
        c.ia))
    m = {}
    if any(m1_small.values()):
        m[1] = Cochain(space, 1, 2,
                       {(l,): dict(m1_small[l]) for l in m1_small
                        if m1_small[l]})

    for n in range(2, arity_cutoff + 1):
        table = {}
        for word in itertools.product(space.labels, repeat=n):
            vec = _bar_tensor_map({word: Fraction(1)}, c.ia)
            total = {}
            while vec:
                vec = _bar_coderivation(vec, delta_family, adeg_t)
                for w2, c2 in _bar_tensor_map(vec, c.pa).items():
                    total[w2] = total.get(w2, Fraction(0)) + c2
                vec = _bar_homotopy(vec, c, adeg_t)
            val = {}
            for w2, c2 in total.items():
                if len(w2) == 1:
                    val[w2[0]] = val.get(w2[0], Fraction(0)) + c2
            val = {l: c2 for l, c2 in val.items() if c2 != 0}
            if val:
                table[word] = val
        coch = Cochain(space, n, 2, table)
        if not coch.is_zero():
            m[n] = coch
    return AInfinityStructure(space, m, arity_cutoff)


# ---------------------------------------------------------------------------
# small closed color anchored on a unit


def unit_class_structure(ainf, unit, vlabel="e"):
    """Structure on a one-letter closed color anchored on a strict unit.

    The closed corestriction vanishes, the pure-open part is the usual
    twist of the operations, and the single closed letter maps to the
    given unit vector.  Squares to zero when the vector is a strict
    two-sided unit killed by the differential.
    """
    vspace = GradedSpace("V", [(vlabel, 0)])
    aspace = ainf.space
    unit = {l: Fraction(c) for l, c in unit.items()}

    def o_rule(key):
        v, a = key
        if len(v) == 0:
            comp = ainf.component(len(a))
            val = comp.evaluate(a)
            sgn = 1 if (len(a) + 1) % 2 == 0 else -1
            return {l: sgn * c for l, c in val.items()}
        if len(v) == 1 and len(a) == 0:
            return dict(unit)
        return {}

    q = Coderivation(vspace, aspace, c_rule=None, o_rule=o_rule,
                     parity=1, name="unit_class")
    return q
