"""Transfer across contractions: validation, weight induction, oracle."""

from fractions import Fraction

import pytest

from opcalc.graded import GradedSpace
from opcalc.hochschild import TruncationError, maurer_cartan_check
from opcalc.scoalgebra import SMonomial, GerCoMonomial, \
    morphism_compatibility_check, q_square_check
from opcalc.transfer import Contraction, TransferObstruction, \
    ainf_transfer_oracle, apply_map, check_minimal_model_condition, \
    contraction_from_json, contraction_to_json, c_weight, \
    enumerate_source_keys, linear_parts, o_weight, open_color_structure, \
    transfer_structure, trivial_contraction, unit_class_structure, \
    validate_contraction

from helpers import acyclic_extension, acyclic_transfer_fixture, \
    dual_numbers, massey_extension, massey_transfer_fixture, rationals


def all_keys(keys):
    cs, os = [], []
    for w in sorted(keys):
        cs.extend(keys[w]["c"])
        os.extend(keys[w]["o"])
    return cs, os


# ---------------------------------------------------------------------------
# weights and key enumeration


def test_weight_formulas():
    assert o_weight(((), ("a",))) == 0
    assert o_weight((("v",), ())) == 1
    assert o_weight((("v",), ("a", "b"))) == 3
    assert c_weight((("v",),)) == 0
    assert c_weight((("v",), ("w",))) == 2
    assert SMonomial(("v",), ("a", "b")).weight() == 3
    assert GerCoMonomial((("v",), ("w",))).weight() == 2


def test_enumeration_counts_over_one_letter_pair():
    vspace = GradedSpace("V", [("e", 0)])
    aspace = GradedSpace("A", [("1", 0)])
    keys = enumerate_source_keys(vspace, aspace, 4)
    counts = {w: (len(keys[w]["c"]), len(keys[w]["o"])) for w in keys}
    assert counts == {0: (1, 1), 1: (0, 2), 2: (2, 2), 3: (0, 3), 4: (3, 3)}


def test_enumeration_drops_odd_letter_repeats():
    vspace = GradedSpace("V", [("t", 1)])
    aspace = GradedSpace("A", [("1", 0)])
    keys = enumerate_source_keys(vspace, aspace, 4)
    # (t, t; -) degenerates, so weight 3 keeps only the pure-open key
    # and the single-block shapes surviving in the closed basis
    assert (("t", "t"), ()) not in keys[3]["o"]
    assert ((("t",), ("t",))) not in keys[2]["c"]
    assert (("t", "t"),) in keys[2]["c"]


# ---------------------------------------------------------------------------
# contraction validation and serialization


def test_acyclic_contraction_validates():
    big, q_prime, c = acyclic_transfer_fixture()
    dv, da = linear_parts(q_prime)
    assert validate_contraction(c, dv, da) == []


def test_validation_rejects_broken_homotopy():
    big, q_prime, c = acyclic_transfer_fixture()
    dv, da = linear_parts(q_prime)
    c.ha = {"w": {"u": Fraction(1)}}
    bad = validate_contraction(c, dv, da)
    assert any(name == "a:iphd" for name, _, _ in bad)
    with pytest.raises(ValueError):
        transfer_structure(q_prime, c, 2)


def test_validation_rejects_degree_shift():
    big, q_prime, c = acyclic_transfer_fixture()
    dv, da = linear_parts(q_prime)
    c.ha = {"u": {"w": Fraction(-1)}}
    bad = validate_contraction(c, dv, da)
    assert any(name == "a:h" for name, _, _ in bad)


def test_contraction_json_roundtrip():
    big, q_prime, c = acyclic_transfer_fixture()
    data = contraction_to_json(c)
    back = contraction_from_json(data)
    assert back.ia == c.ia and back.pa == c.pa and back.ha == c.ha
    assert back.iv == c.iv and back.pv == c.pv and back.hv == c.hv
    assert back.asource.basis == c.asource.basis
    assert back.atarget.basis == c.atarget.basis
    assert contraction_to_json(back) == data


# ---------------------------------------------------------------------------
# minimal model condition on cooperation tables


class _StubTable(object):
    def __init__(self, weights, cocompositions):
        self._w = weights
        self.cocompositions = cocompositions

    def weight_of(self, x):
        return self._w[x]


def test_minimal_model_condition_generators():
    weights = {"id_o": 0, "id_c": 0, "rho": 1, "co_o": 1, "co_c": 2,
               "codiff": 2}
    rows = [("rho", "rho", "id_c", 1), ("rho", "id_o", "rho", 1),
            ("co_o", "co_o", "id_o", 1), ("co_c", "co_c", "id_c", 1),
            ("codiff", "codiff", "id_c", 1)]
    assert check_minimal_model_condition(_StubTable(weights, rows), 4)


def test_minimal_model_condition_flags_corrupted_weight():
    # ternary = co_c over co_c has true weight 4; grading co_c as 1
    # breaks additivity against that entry
    weights = {"id_c": 0, "co_c": 1, "ternary": 4}
    rows = [("co_c", "co_c", "id_c", 1), ("ternary", "co_c", "co_c", 1)]
    table = _StubTable(weights, rows)
    assert check_minimal_model_condition(table, 4) is False
    # entries above the cutoff are not inspected
    assert check_minimal_model_condition(table, 2)


# ---------------------------------------------------------------------------
# sources square to zero


@pytest.mark.parametrize("maker", [acyclic_extension, dual_numbers,
                                   massey_extension])
def test_unit_class_structure_squares_to_zero(maker):
    ainf = maker()
    assert maurer_cartan_check(ainf, 4) == []
    q = unit_class_structure(ainf, {"1": Fraction(1)}, vlabel="E")
    keys = enumerate_source_keys(q.vspace, q.aspace, 3)
    cs, os = all_keys(keys)
    assert q_square_check(q, cs, os) == []


def test_unit_class_needs_a_unit():
    ainf = acyclic_extension()
    q = unit_class_structure(ainf, {"u": Fraction(1)}, vlabel="E")
    keys = enumerate_source_keys(q.vspace, q.aspace, 2)
    cs, os = all_keys(keys)
    assert q_square_check(q, cs, os) != []


# ---------------------------------------------------------------------------
# transfer: trivial and acyclic cases


def test_trivial_contraction_returns_input():
    ainf = dual_numbers()
    q_prime = unit_class_structure(ainf, {"1": Fraction(1)})
    c = trivial_contraction(q_prime.vspace, q_prime.aspace)
    q, t = transfer_structure(q_prime, c, 3)
    keys = enumerate_source_keys(q_prime.vspace, q_prime.aspace, 3)
    cs, os = all_keys(keys)
    for blocks in cs:
        assert q.corestrict_c(blocks) == q_prime.corestrict_c(blocks)
        expected = {blocks[0][0]: Fraction(1)} if len(blocks[0]) == 1 \
            and len(blocks) == 1 else {}
        assert t.corestrict_c(blocks) == expected
    for key in os:
        assert q.corestrict_o(key) == q_prime.corestrict_o(key)
        expected = {key[1][0]: Fraction(1)} \
            if key[0] == () and len(key[1]) == 1 else {}
        assert t.corestrict_o(key) == expected


def test_acyclic_transfer_equations_hold():
    big, q_prime, c = acyclic_transfer_fixture()
    q, t = transfer_structure(q_prime, c, 4)
    keys = enumerate_source_keys(c.vsource, c.asource, 4)
    cs, os = all_keys(keys)
    assert q_square_check(q, cs, os) == []
    assert morphism_compatibility_check(t, q, q_prime, cs, os) == []
    # the transferred anchor is the projected unit
    assert q.corestrict_o((("e",), ())) == {"1": Fraction(1)}
    # pure-open two-slot value keeps the twisted product
    assert q.corestrict_o(((), ("1", "1"))) == {"1": Fraction(-1)}


def test_rerun_with_larger_weight_extends():
    big, q_prime, c = acyclic_transfer_fixture()
    q2, t2 = transfer_structure(q_prime, c, 2)
    q4, t4 = transfer_structure(q_prime, c, 4)
    for blocks, val in q2.c_table.items():
        assert q4.c_table[blocks] == val
    for key, val in q2.o_table.items():
        assert q4.o_table[key] == val
    for key, val in t2.o_table.items():
        assert t4.o_table[key] == val
    assert set(q2.o_table) == {k for k in q4.o_table if o_weight(k) <= 2}


def test_obstruction_reports_weight():
    ainf = acyclic_extension()
    q_prime = unit_class_structure(ainf, {"u": Fraction(1)}, vlabel="E")
    small_v = GradedSpace("V", [("e", 0)])
    small_a = GradedSpace("A", [("1", 0)])
    c = Contraction(small_v, small_a, q_prime.vspace, ainf.space,
                    iv={"e": {"E": Fraction(1)}},
                    pv={"E": {"e": Fraction(1)}}, hv={},
                    ia={"1": {"1": Fraction(1)}},
                    pa={"1": {"1": Fraction(1)}},
                    ha={"w": {"u": Fraction(-1)}})
    with pytest.raises(TransferObstruction) as err:
        transfer_structure(q_prime, c, 3)
    assert err.value.weight >= 1
    assert err.value.defects


# ---------------------------------------------------------------------------
# the open-color oracle


def test_oracle_trivial_contraction_is_identity():
    ainf = dual_numbers()
    space = ainf.space
    c = trivial_contraction(GradedSpace("V", [("e", 0)]), space)
    out = ainf_transfer_oracle(ainf, c, 4)
    assert sorted(out.m) == sorted(ainf.m)
    for k in ainf.m:
        assert out.m[k].table == ainf.m[k].table


def test_oracle_h_zero_is_conjugation():
    # relabeling Q[v]/(v^2-1) onto Q x Q through e1 = (1+v)/2, e2 = (1-v)/2
    from helpers import split_quadratic
    ainf = split_quadratic()
    half = Fraction(1, 2)
    small = GradedSpace("QxQ", [("g1", 0), ("g2", 0)])
    c = Contraction(GradedSpace("V", [("e", 0)]), small,
                    GradedSpace("V'", [("E", 0)]), ainf.space,
                    iv={"e": {"E": Fraction(1)}},
                    pv={"E": {"e": Fraction(1)}}, hv={},
                    ia={"g1": {"1": half, "v": half},
                        "g2": {"1": half, "v": -half}},
                    pa={"1": {"g1": Fraction(1), "g2": Fraction(1)},
                        "v": {"g1": Fraction(1), "g2": Fraction(-1)}},
                    ha={})
    out = ainf_transfer_oracle(ainf, c, 4)
    assert sorted(out.m) == [2]
    assert out.m[2].table == {
        ("g1", "g1"): {"g1": Fraction(1)},
        ("g2", "g2"): {"g2": Fraction(1)},
    }
    assert maurer_cartan_check(out, 4) == []


def test_oracle_acyclic_extension_collapses_to_unit():
    big, q_prime, c = acyclic_transfer_fixture()
    out = ainf_transfer_oracle(big, c, 5)
    assert sorted(out.m) == [2]
    assert out.m[2].table == {("1", "1"): {"1": Fraction(1)}}
    assert maurer_cartan_check(out, 5) == []


def test_oracle_cutoff_overflow():
    big, q_prime, c = acyclic_transfer_fixture()
    with pytest.raises(TruncationError):
        ainf_transfer_oracle(big, c, big.cutoff + 1)


def test_oracle_sees_massey_triple_product():
    big, q_prime, c = massey_transfer_fixture()
    out = ainf_transfer_oracle(big, c, 4)
    assert maurer_cartan_check(out, 4) == []
    assert out.m[3].table == {("al", "be", "de"): {"z": Fraction(-1)}}
    assert 4 not in out.m


def test_open_color_matches_oracle_on_acyclic_extension():
    big, q_prime, c = acyclic_transfer_fixture()
    q, t = transfer_structure(q_prime, c, 4)
    got = open_color_structure(q, 5)
    want = ainf_transfer_oracle(big, c, 5)
    assert sorted(got.m) == sorted(want.m)
    for k in want.m:
        assert got.m[k].table == want.m[k].table


def test_open_color_matches_oracle_on_massey_fixture():
    big, q_prime, c = massey_transfer_fixture()
    q, t = transfer_structure(q_prime, c, 3)
    got = open_color_structure(q, 4)
    want = ainf_transfer_oracle(big, c, 4)
    assert sorted(got.m) == sorted(want.m)
    for k in want.m:
        assert got.m[k].table == want.m[k].table
