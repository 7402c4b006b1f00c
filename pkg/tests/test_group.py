from fractions import Fraction

import pytest

from smforge.words import Word, atom, free_reduce
from smforge.machine import (AdmissibleWord, Hardware, Machine, RulePart,
                             StatePart, accept_configuration,
                             input_configuration, make_rule, run)
from smforge.encode import GroupPresentation, abelianized_trivial, area_oracle
from smforge.fixtures import (one_sector_left_multiplier, toy_deleter,
                              z2_presentation)
from smforge.group import (GroupError, Trapezium, computation_to_trapezium,
                           conjugator_from_accepting, dehn_cell_bound_check,
                           heisenberg_product, letter_types, machine_to_group,
                           modified_length, modified_length_from_types,
                           run_dichotomy, theta_atom, trapezium_dumps,
                           trapezium_to_computation, trapezium_to_dict,
                           trapezium_to_dot, validate_trapezium)
from smforge.primitive import (build_lr, home_configuration,
                               standard_lr_computation)


def W(text: str) -> Word:
    return Word.from_tokens(text)


def one_part_machine() -> Machine:
    hw = Hardware([StatePart("T", ["s", "f"])], [])
    return Machine("one_part", hw, [make_rule(hw, "go", [("s", "f")])])


def cyclic_emitter() -> Machine:
    """Two parts around a wrap sector; ``emit`` pushes z out past part 0
    whenever the word is read linearly."""
    hw = Hardware([StatePart("C0", ["u"]), StatePart("C1", ["v"])],
                  [["a0"], ["z"]], cyclic=True)
    r = make_rule(hw, "emit",
                  [RulePart("u", "u", left=Word.of("z")), ("v", "v")],
                  domains=["full", "full"])
    return Machine("cyclic_emitter", hw, [r])


class TestMPresentation:
    def test_lr_counts(self):
        mp = machine_to_group(build_lr(["y"]))
        assert len(mp.generators) == 17
        assert len(mp.theta_q) == 9
        assert len(mp.theta_a) == 5
        assert len(mp.relators) == 14

    def test_lr_strict_drops_part_zero(self):
        mp = machine_to_group(build_lr(["y"]), strict=True)
        assert len(mp.theta_q) == 6
        assert all(i != 0 for (_, i) in mp.theta_q)

    def test_deleter_counts(self):
        mp = machine_to_group(toy_deleter())
        # one tape letter, four state letters, two rules times two gaps
        assert len(mp.generators) == 1 + 4 + 4
        assert len(mp.theta_q) == 4
        assert len(mp.theta_a) == 1

    def test_theta_q_relator_shape(self):
        mp = machine_to_group(toy_deleter())
        assert mp.theta_q[("del", 1)] == W("q1s del.0 q1s^-1 y del.1^-1")
        assert mp.theta_q[("del", 0)] == W("q0s del.1 q0s^-1 del.0^-1")

    def test_theta_a_commutator(self):
        mp = machine_to_group(toy_deleter())
        assert mp.theta_a[("del", 0, "y")] == W("del.1 y del.1^-1 y^-1")

    def test_last_gap_wraps_to_zero(self):
        mp = machine_to_group(toy_deleter())
        # part 1 is the last part, so its right-hand theta has index 0
        w = mp.theta_q[("acc", 1)]
        assert w.letters[1] == (theta_atom("acc", 0), 1)

    def test_as_presentation_validates(self):
        p = machine_to_group(toy_deleter()).as_presentation()
        assert isinstance(p, GroupPresentation)
        assert p.name == "M(toy_deleter)"
        assert len(p.relators) == 5
        assert machine_to_group(
            toy_deleter(), strict=True).as_presentation().name.endswith(".strict")

    def test_theta_collision_refused(self):
        hw = Hardware([StatePart("P", ["r.0", "r.1"])], [])
        m = Machine("clash", hw, [make_rule(hw, "r", [("r.0", "r.1")])])
        with pytest.raises(GroupError):
            machine_to_group(m)

    def test_theta_accessor_wraps(self):
        mp = machine_to_group(toy_deleter())
        assert mp.theta("del", 2) == theta_atom("del", 0)


class TestModifiedLength:
    def test_singletons(self):
        assert modified_length_from_types("q", 2) == 1
        assert modified_length_from_types("t", 2) == 1
        assert modified_length_from_types("a", 2) == Fraction(1, 6)

    def test_delta_depends_on_parts(self):
        assert modified_length_from_types("a", 1) == Fraction(1, 4)
        assert modified_length_from_types("a", 4) == Fraction(1, 10)

    def test_pairing(self):
        assert modified_length_from_types("ta", 2) == 1
        assert modified_length_from_types("at", 2) == 1
        assert modified_length_from_types("tat", 2) == 2
        assert modified_length_from_types("aat", 2) == Fraction(7, 6)

    def test_matches_brute_force(self):
        def brute(types, n):
            delta = Fraction(1, 2 * n + 2)
            single = {"q": Fraction(1), "t": Fraction(1), "a": delta}
            if not types:
                return Fraction(0)
            best = single[types[0]] + brute(types[1:], n)
            if len(types) >= 2 and set(types[:2]) == {"a", "t"}:
                best = min(best, 1 + brute(types[2:], n))
            return best

        seqs = [""]
        for _ in range(4):
            seqs = [s + c for s in seqs for c in "qat"]
            for s in seqs:
                assert modified_length_from_types(s, 3) == brute(s, 3), s

    def test_reversal_invariant(self):
        for s in ["qat", "taat", "attat", "qqata"]:
            assert (modified_length_from_types(s, 2)
                    == modified_length_from_types(s[::-1], 2))

    def test_letter_types(self):
        m = toy_deleter()
        w = W("q0s y q1s del.0 acc.1^-1")
        assert letter_types(m, w) == "qaqtt"
        assert modified_length(m, w) == 2 + Fraction(1, 6) + 2

    def test_unknown_letter_refused(self):
        with pytest.raises(GroupError):
            letter_types(toy_deleter(), W("zebra"))


class TestTrapezium:
    def accepting(self):
        m = toy_deleter()
        start = input_configuration(m, W("y y"))
        return m, run(m, start, ["del", "del", "acc"])

    def test_cell_count(self):
        m, comp = self.accepting()
        trap = computation_to_trapezium(m, comp)
        # first row folds one y and squares the other; second folds the
        # last y; the acc row has only the two state cells
        assert trap.n_cells() == 3 + 2 + 2
        assert [c.kind for c in trap.cells].count("ta") == 1

    def test_validates(self):
        m, comp = self.accepting()
        assert validate_trapezium(computation_to_trapezium(m, comp))

    def test_boundary_word(self):
        m, comp = self.accepting()
        trap = computation_to_trapezium(m, comp)
        assert trap.boundary_word() == W(
            "q1s^-1 y^-1 y^-1 q0s^-1 del.0 del.0 acc.0 q0f q1f "
            "acc.0^-1 del.0^-1 del.0^-1")

    def test_labels_spell_configurations(self):
        m, comp = self.accepting()
        trap = computation_to_trapezium(m, comp)
        assert trap.path_word(trap.bottom) == comp.configs[0].to_word()
        assert trap.path_word(trap.top) == comp.end.to_word()
        for j, row in enumerate(trap.rows):
            assert trap.path_word(row.bottom) == comp.configs[j].to_word()

    def test_boundary_abelianized_trivial(self):
        m, comp = self.accepting()
        trap = computation_to_trapezium(m, comp)
        p = machine_to_group(m).as_presentation()
        assert abelianized_trivial(p, trap.boundary_word())

    def test_round_trip(self):
        m, comp = self.accepting()
        back = trapezium_to_computation(computation_to_trapezium(m, comp))
        assert back.history_word() == comp.history_word()
        assert back.end == comp.end

    def test_negative_steps(self):
        m = toy_deleter()
        start = input_configuration(m, W("y y"))
        comp = run(m, start, [("del", 1), ("del", -1), ("del", 1),
                              ("del", 1), ("acc", 1)])
        trap = computation_to_trapezium(m, comp)
        assert validate_trapezium(trap)
        assert trapezium_to_computation(trap).history_word() == comp.history_word()
        # the back-and-forth rows cancel in the side label
        assert trap.path_word(trap.left) == W(
            "del.0 del.0^-1 del.0 del.0 acc.0")

    def test_empty_history(self):
        m = toy_deleter()
        comp = run(m, input_configuration(m, W("y")), [])
        trap = computation_to_trapezium(m, comp)
        assert trap.n_cells() == 0
        assert validate_trapezium(trap)
        assert trap.boundary_word() == Word()

    def test_lr_standard_computation(self):
        lr = build_lr(["y"])
        u = W("y")
        comp = run(lr, home_configuration(lr, u), standard_lr_computation(lr, u))
        trap = computation_to_trapezium(lr, comp)
        assert trap.n_cells() == 10
        assert validate_trapezium(trap)
        assert abelianized_trivial(machine_to_group(lr).as_presentation(),
                                   trap.boundary_word())

    def test_emitting_row_hangs_edges(self):
        m = cyclic_emitter()
        start = AdmissibleWord(m.hw, [(atom("u"), 1), (atom("v"), 1)],
                               [Word.of("a0")])
        comp = run(m, start, ["emit", "emit"])
        trap = computation_to_trapezium(m, comp)
        assert validate_trapezium(trap)
        assert trap.path_word(trap.left) == W("emit.0 z emit.0 z")
        assert trap.path_word(trap.right) == W("emit.0 emit.0")

    def test_one_part_machine(self):
        m = one_part_machine()
        comp = run(m, input_configuration(m, ()), ["go"])
        trap = computation_to_trapezium(m, comp)
        assert trap.n_cells() == 1
        assert validate_trapezium(trap)
        assert trap.boundary_word() == W("s^-1 go.0 f go.0^-1")

    def test_non_standard_base_refused(self):
        m = toy_deleter()
        aw = AdmissibleWord(m.hw, [(atom("q0s"), 1), (atom("q0s"), -1)],
                            [W("y")])
        comp = run(m, aw, [])
        with pytest.raises(GroupError):
            computation_to_trapezium(m, comp)

    def test_failed_computation_refused(self):
        m = toy_deleter()
        comp = run(m, input_configuration(m), ["acc", "del"], strict=False)
        assert not comp.ok
        with pytest.raises(GroupError):
            computation_to_trapezium(m, comp)


class TestTrapeziumExport:
    def trap(self):
        m = toy_deleter()
        comp = run(m, input_configuration(m, W("y")), ["del", "acc"])
        return computation_to_trapezium(m, comp)

    def test_dict_shape(self):
        d = trapezium_to_dict(self.trap())
        assert d["schema_version"] == 1
        assert d["machine"] == "toy_deleter"
        assert d["history"] == "del acc"
        assert len(d["words"]) == 3
        assert {e["kind"] for e in d["edges"]} <= {"q", "a", "theta"}
        assert all(len(c["boundary"]) >= 4 for c in d["cells"])

    def test_dumps_deterministic(self):
        m = toy_deleter()
        comp = run(m, input_configuration(m, W("y")), ["del", "acc"])
        a = trapezium_dumps(computation_to_trapezium(m, comp))
        b = trapezium_dumps(computation_to_trapezium(m, comp))
        assert a == b
        assert a.endswith("\n")

    def test_dot_output(self):
        trap = self.trap()
        dot = trapezium_to_dot(trap)
        assert dot.startswith('graph "toy_deleter"')
        assert dot.count(" -- ") > 0
        for i in range(trap.n_cells()):
            assert f"c{i} [label=" in dot


class TestDichotomy:
    def test_short_runs(self):
        m = toy_deleter()
        comp = run(m, input_configuration(m, W("y y y")),
                   ["del"] * 3 + ["acc"])
        recs = run_dichotomy(m, comp)
        assert [r["status"] for r in recs] == ["short", "short"]
        assert recs[0]["length"] == 3

    def test_long_idle_run_is_periodic(self):
        m = one_sector_left_multiplier(["a", "b"], idle=True)
        comp = run(m, input_configuration(m, W("a a")), ["idle"] * 12)
        recs = run_dichotomy(m, comp)
        assert [r["status"] for r in recs] == ["periodic"]

    def test_growing_run_is_short(self):
        m = one_sector_left_multiplier(["a"])
        comp = run(m, input_configuration(m), ["mul(a)"] * 6)
        assert run_dichotomy(m, comp)[0]["status"] == "short"


class TestConjugator:
    def test_deleter(self):
        m = toy_deleter()
        start = input_configuration(m, W("y y"))
        comp = run(m, start, ["del", "del", "acc"])
        g = conjugator_from_accepting(m, comp)
        assert g == W("del.0 del.0 acc.0")
        assert len(g) == len(comp)

    def test_conjugation_abelianized(self):
        m = toy_deleter()
        start = input_configuration(m, W("y y"))
        comp = run(m, start, ["del", "del", "acc"])
        g = conjugator_from_accepting(m, comp)
        p = machine_to_group(m).as_presentation()
        claim = free_reduce(start.to_word().inverse() * g
                            * comp.end.to_word() * g.inverse())
        assert abelianized_trivial(p, claim)

    def test_exact_in_one_part_group(self):
        m = one_part_machine()
        comp = run(m, input_configuration(m, ()), ["go"])
        g = conjugator_from_accepting(m, comp)
        assert g == W("go.0")
        p = machine_to_group(m).as_presentation()
        claim = free_reduce(comp.configs[0].to_word().inverse() * g
                            * comp.end.to_word() * g.inverse())
        res = area_oracle(p, claim, max_area=1)
        assert res.found and res.area == 1

    def test_interior_writes_still_conjugate(self):
        m = one_sector_left_multiplier(["a", "b"])
        comp = run(m, input_configuration(m), ["mul(a)", "mul(b)"])
        assert conjugator_from_accepting(m, comp) == W("mul(a).0 mul(b).0")

    def test_emission_refused(self):
        m = cyclic_emitter()
        start = AdmissibleWord(m.hw, [(atom("u"), 1), (atom("v"), 1)],
                               [Word.of("a0")])
        comp = run(m, start, ["emit"])
        with pytest.raises(GroupError):
            conjugator_from_accepting(m, comp)


class TestHeisenberg:
    def test_product_shape(self):
        hp = heisenberg_product(z2_presentation())
        assert [g.name for g in hp.generators] == ["x", "a", "b", "c"]
        # one old relator, three Heisenberg ones, three cross-commutators
        assert len(hp.relators) == 1 + 3 + 3
        assert hp.name == "z2xH"

    def test_name_collision_uniquified(self):
        p = GroupPresentation([atom("a")], [W("a a")], name="za")
        hp = heisenberg_product(p)
        assert [g.name for g in hp.generators] == ["a", "a_", "b", "c"]

    def test_central_commutator_fills(self):
        hp = heisenberg_product(z2_presentation())
        res = area_oracle(hp, W("a b a^-1 b^-1 c^-1"), max_area=1)
        assert res.found and res.area == 1

    def test_cross_commutator_fills(self):
        hp = heisenberg_product(z2_presentation())
        res = area_oracle(hp, W("x c x^-1 c^-1"), max_area=1)
        assert res.found

    def test_dehn_cell_bound(self):
        assert dehn_cell_bound_check(1, 5)
        assert dehn_cell_bound_check(28, 8)  # 8^3/8 + 8^2/2 = 96
        assert not dehn_cell_bound_check(97, 8)
        assert not dehn_cell_bound_check(100, 5)
