import itertools

import pytest

from smforge.fixtures import (
    one_sector_left_multiplier,
    toy_deleter,
    trivial_acceptor,
    two_sided_multiplier,
)
from smforge.machine import (
    AdmissibleWord,
    Hardware,
    Machine,
    MachineError,
    RulePart,
    StatePart,
    accept_configuration,
    cyclic_permute,
    input_configuration,
    invert_rule,
    make_rule,
    normalize_rules,
    parse_admissible,
    restrict,
    run,
)
from smforge.words import EMPTY, Word, atom, atoms


def W(text):
    return Word.from_tokens(text)


def small_words(alphabet, n):
    """All reduced words of length <= n over the alphabet."""
    from smforge.words import reduced_words
    return list(reduced_words(alphabet, n))


class TestHardware:
    def test_sector_count(self):
        with pytest.raises(MachineError):
            Hardware([StatePart("A", ["h1"]), StatePart("B", ["h2"])], [["y"], ["z"]])

    def test_letter_in_two_parts(self):
        with pytest.raises(MachineError):
            Hardware([StatePart("A", ["h3"]), StatePart("B", ["h3"])], [["y"]])

    def test_state_tape_clash(self):
        with pytest.raises(MachineError):
            Hardware([StatePart("A", ["h4"]), StatePart("B", ["h5"])], [["h4"]])

    def test_sector_neighbours(self):
        m = toy_deleter()
        assert m.hw.left_sector(0) is None
        assert m.hw.right_sector(0) == 0
        assert m.hw.left_sector(1) == 0
        assert m.hw.right_sector(1) is None

    def test_cyclic_neighbours(self):
        hw = Hardware([StatePart("CA", ["ca"]), StatePart("CB", ["cb"])],
                      [["cy"], ["cz"]], cyclic=True)
        assert hw.left_sector(0) == 1
        assert hw.right_sector(1) == 1
        assert hw.n_sectors == 2


class TestRuleValidation:
    def test_write_without_sector(self):
        m = toy_deleter()
        with pytest.raises(MachineError):
            make_rule(m.hw, "bad",
                      [RulePart("q0s", "q0s", left=W("y")), ("q1s", "q1s")])

    def test_write_outside_domain(self):
        m = toy_deleter()
        with pytest.raises(MachineError):
            make_rule(m.hw, "bad",
                      [("q0s", "q0s"),
                       RulePart("q1s", "q1s", left=W("y"))],
                      domains=[[]])

    def test_foreign_state_letter(self):
        m = toy_deleter()
        with pytest.raises(MachineError):
            make_rule(m.hw, "bad", [("q1s", "q1s"), ("q0s", "q0s")])

    def test_duplicate_rule_name(self):
        m = toy_deleter()
        with pytest.raises(MachineError):
            Machine("m", m.hw, [m.rule("del"), m.rule("del")])


class TestParseAdmissible:
    def test_configuration_roundtrip(self):
        m = toy_deleter()
        c = parse_admissible(m.hw, "q0s y y q1s")
        assert c.tokens() == "q0s y y q1s"
        assert c.base == ((0, 1), (1, 1))
        assert c.gap_sectors == (0,)
        assert c.tape_length() == 2

    def test_tapes_are_reduced(self):
        m = toy_deleter()
        c = AdmissibleWord(m.hw, [(atom("q0s"), 1), (atom("q1s"), 1)],
                           [W("y y^-1 y")])
        assert c.tokens() == "q0s y q1s"

    def test_all_four_shapes(self):
        m = toy_deleter()
        # (+,+), (+,-), (-,+), (-,-)
        parse_admissible(m.hw, "q0s y q1s")
        parse_admissible(m.hw, "q1s^-1 y q1s")
        parse_admissible(m.hw, "q0s y q0s^-1")
        parse_admissible(m.hw, "q1s^-1 y q0s^-1")

    def test_mixed_signs_need_same_letter(self):
        m = toy_deleter()
        with pytest.raises(MachineError, match="same state letter"):
            parse_admissible(m.hw, "q0s y q1s^-1")

    def test_positioned_errors(self):
        m = toy_deleter()
        with pytest.raises(MachineError, match="position 0"):
            parse_admissible(m.hw, "y q1s")
        with pytest.raises(MachineError, match="unknown"):
            parse_admissible(m.hw, "q0s nosuch q1s")
        with pytest.raises(MachineError, match="end with a state letter"):
            parse_admissible(m.hw, "q0s y")
        with pytest.raises(MachineError, match="do not bound"):
            parse_admissible(m.hw, "q1s y q0s")

    def test_letter_in_wrong_gap(self):
        m = two_sided_multiplier()
        with pytest.raises(MachineError, match="does not belong"):
            AdmissibleWord(m.hw, [(atom("Q0"), 1), (atom("Q1"), 1)], [W("y")])


class TestApply:
    def test_deleter_trace(self):
        m = toy_deleter()
        c = input_configuration(m, W("y y"))
        c = m.apply(c, m.rule("del"))
        assert c.tokens() == "q0s y q1s"
        c = m.apply(c, m.rule("del"))
        assert c.tokens() == "q0s q1s"
        c = m.apply(c, m.rule("acc"))
        assert c == accept_configuration(m)

    def test_locked_sector_blocks(self):
        m = toy_deleter()
        c = input_configuration(m, W("y"))
        out = m.apply_ex(c, m.rule("acc"))
        assert not out.ok
        assert "domain" in out.reason

    def test_state_mismatch_blocks(self):
        m = toy_deleter()
        c = accept_configuration(m)
        out = m.apply_ex(c, m.rule("del"))
        assert not out.ok and out.position == 0

    def test_left_and_right_multiplication(self):
        m = two_sided_multiplier()
        c = input_configuration(m, W("b"))
        c = m.apply(c, m.rule("lmul(a)"))
        assert c.tapes[0] == W("a b")
        c = m.apply(c, m.rule("rmul(a)"))
        assert c.tapes[0] == W("a b a")

    def test_free_reduction_on_write(self):
        m = two_sided_multiplier()
        c = input_configuration(m, W("a^-1 b"))
        c = m.apply(c, m.rule("lmul(a)"))
        assert c.tapes[0] == W("b")

    def test_rule_then_inverse_is_identity(self):
        # (W.t).t^-1 == W for every fixture rule on every small admissible
        # word where t applies.
        for m in [toy_deleter(), two_sided_multiplier()]:
            starts = set()
            for w in small_words(sorted(m.sector_alphabets[0], key=lambda a: a.name), 2):
                for text in ["q0s {} q1s", "q1s^-1 {} q1s", "q0s {} q0s^-1"]:
                    if m.name != "toy_deleter":
                        text = text.replace("q0s", "Q0").replace("q1s", "Q1")
                    try:
                        starts.add(parse_admissible(m.hw, text.format(w.tokens())))
                    except MachineError:
                        pass
            assert len(starts) > 10
            checked = 0
            for c in starts:
                for r in m.rules:
                    for sign in (1, -1):
                        out = m.apply_ex(c, r, sign)
                        if out.ok:
                            back = m.try_apply(out.result, r, -sign)
                            assert back == c
                            checked += 1
            assert checked > 20

    def test_trim_on_single_letter_base(self):
        m = toy_deleter()
        c = AdmissibleWord(m.hw, [(atom("q1s"), 1)], [])
        out = m.apply_ex(c, m.rule("del"))
        assert out.ok
        assert out.result.states == ((atom("q1s"), 1),)
        assert out.stripped_prefix == W("y^-1")
        assert out.stripped_suffix == EMPTY

    def test_conjugation_shape(self):
        # q w q^-1 with the same letter: the right word of that part acts
        # by conjugation.
        m = two_sided_multiplier()
        c = parse_admissible(m.hw, "Q0 b Q0^-1")
        out = m.apply_ex(c, m.rule("lmul(a)"))
        assert out.ok
        assert out.result.tokens() == "Q0 a b a^-1 Q0^-1"

    def test_inverted_base_application(self):
        m = toy_deleter()
        c = parse_admissible(m.hw, "q1s^-1 y q1s")
        out = m.apply_ex(c, m.rule("del"))
        assert out.ok
        # q1s^-1 emits (left word)^-1 = y to its right.
        assert out.result.tokens() == "q1s^-1 y y y^-1 q1s".replace("y y y^-1", "y")


class TestRun:
    def test_run_history_word(self):
        m = toy_deleter()
        c = input_configuration(m, W("y"))
        comp = run(m, c, W("del acc"))
        assert len(comp) == 2
        assert comp.end == accept_configuration(m)
        assert comp.history_word() == W("del acc")

    def test_run_signed_tokens(self):
        m = toy_deleter()
        c = input_configuration(m, EMPTY)
        comp = run(m, c, ["del^-1", "del"])
        assert comp.end == c

    def test_strict_raises(self):
        m = toy_deleter()
        c = input_configuration(m, W("y"))
        with pytest.raises(MachineError, match="step 0"):
            run(m, c, W("acc"))

    def test_lax_records_failure(self):
        m = toy_deleter()
        c = input_configuration(m, W("y"))
        comp = run(m, c, W("del acc acc"), strict=False)
        assert not comp.ok
        assert comp.failed_at == 2
        assert len(comp.configs) == 3

    def test_inverse_of_computation(self):
        m = two_sided_multiplier()
        c = input_configuration(m, W("a"))
        comp = run(m, c, W("lmul(a) rmul(b) lmul(b)^-1"))
        back = run(m, comp.end, comp.history_word().inverse())
        assert back.end == c


class TestConfigurations:
    def test_input_validates_sector(self):
        m = toy_deleter()
        with pytest.raises(MachineError, match="not an input sector"):
            input_configuration(m, {0: EMPTY, 1: EMPTY})

    def test_accept_configuration(self):
        m = trivial_acceptor()
        assert accept_configuration(m).tokens() == "p0 p1"
        assert input_configuration(m, EMPTY) == accept_configuration(m)


class TestCyclicPermute:
    def make(self):
        hw = Hardware([StatePart("CP0", ["cpA"]), StatePart("CP1", ["cpB"])],
                      [["cpy"], ["cpz"]], cyclic=True)
        return hw

    def test_rotation(self):
        hw = self.make()
        w = parse_admissible(hw, "cpA cpy cpB cpz cpA")
        r = cyclic_permute(w, 1)
        assert r.tokens() == "cpB cpz cpA cpy cpB"
        assert cyclic_permute(r, 1) == w
        assert cyclic_permute(w, 2) == w

    def test_preserves_tape_count(self):
        hw = self.make()
        w = parse_admissible(hw, "cpA cpy cpy cpB cpA")
        assert cyclic_permute(w, 1).tape_length() == w.tape_length()

    def test_rejects_non_circular(self):
        m = toy_deleter()
        w = parse_admissible(m.hw, "q0s y q1s")
        with pytest.raises(MachineError, match="base not circular"):
            cyclic_permute(w, 1)


class TestRestrict:
    def make_three_part(self):
        a, b = atoms(["a", "b"])
        hw = Hardware([StatePart("R0", ["r0"]), StatePart("R1", ["r1"]),
                       StatePart("R2", ["r2"])],
                      [[a], [b]], input_sectors=[0, 1])
        rule = make_rule(hw, "both",
                         [RulePart("r0", "r0", right=W("a")),
                          RulePart("r1", "r1", left=W("a"), right=W("b")),
                          RulePart("r2", "r2", left=W("b"))])
        return Machine("three", hw, [rule])

    def test_restriction_matches_subword_application(self):
        m = self.make_three_part()
        sub = restrict(m, 1, 2)
        full = input_configuration(m, [W("a"), EMPTY])
        piece = parse_admissible(sub.hw, "r1 r2")
        got = sub.apply(piece, sub.rule("both"))
        whole = m.apply(full, m.rule("both"))
        # the r1..r2 stretch of the full result
        assert got.tapes[0] == whole.tapes[1]
        assert got.states == whole.states[1:]

    def test_restriction_drops_boundary_writes(self):
        m = self.make_three_part()
        sub = restrict(m, 1, 2)
        rp = sub.rule("both").parts[0]
        assert rp.left == EMPTY and rp.right == W("b")

    def test_bad_range(self):
        with pytest.raises(MachineError):
            restrict(self.make_three_part(), 2, 1)


class TestNormalize:
    def make_wide(self):
        a, b = atoms(["a", "b"])
        hw = Hardware([StatePart("N0", ["n0", "n0e"], "n0", "n0e"),
                       StatePart("N1", ["n1", "n1e"], "n1", "n1e")],
                      [[a, b]], input_sectors=[0])
        rule = make_rule(hw, "wide",
                         [RulePart("n0", "n0e", right=W("a b a")),
                          RulePart("n1", "n1e", left=W("b b"))])
        return Machine("wide", hw, [rule])

    def test_chain_length_formula(self):
        m = self.make_wide()
        n = normalize_rules(m)
        # costs 3 and 2 -> 1 + 2 + 1 = 4 rules
        assert len(n.rules) == 4
        assert n.meta["normal_chains"]["wide"] == [f"wide%{j}" for j in range(1, 5)]

    def test_each_rule_writes_at_most_one_per_side(self):
        n = normalize_rules(self.make_wide())
        for r in n.rules:
            for p in r.parts:
                assert len(p.left) <= 1 and len(p.right) <= 1

    def test_chain_equals_original(self):
        m = self.make_wide()
        n = normalize_rules(m)
        for text in ["ε", "a", "b a^-1"]:
            c0 = input_configuration(m, W(text))
            want = m.apply(c0, m.rule("wide"))
            c = input_configuration(n, W(text))
            comp = run(n, c, n.meta["normal_chains"]["wide"])
            assert comp.end.tapes == want.tapes
            assert [a.name for a, _ in comp.end.states] == ["n0e", "n1e"]

    def test_short_rules_kept_verbatim(self):
        m = toy_deleter()
        n = normalize_rules(m)
        assert {r.name for r in n.rules} == {"del", "acc"}

    def test_start_end_preserved(self):
        n = normalize_rules(self.make_wide())
        assert input_configuration(n, EMPTY).tokens() == "n0 n1"
        assert accept_configuration(n).tokens() == "n0e n1e"


class TestSignedRules:
    def test_deterministic_order(self):
        m = toy_deleter()
        assert [(r.name, s) for r, s in m.signed_rules()] == [
            ("acc", 1), ("acc", -1), ("del", 1), ("del", -1)]
