import pytest

from smforge.machine import MachineError, run
from smforge.primitive import (
    build_lr,
    build_rl,
    home_configuration,
    standard_lr_computation,
    standard_rl_computation,
)
from smforge.search import meet_reach
from smforge.serialize import machine_dumps
from smforge.words import Word, atoms, reduced_words

Y = atoms(["a", "b"])


def W(text):
    return Word.from_tokens(text)


class TestStructure:
    def test_counts(self):
        m = build_lr(Y)
        assert m.n_parts == 3 and m.n_sectors == 2
        assert len(m.rules) == 2 * len(Y) + 1
        assert sorted(a.name for a in m.sector_alphabets[0]) == ["a#1", "b#1"]
        assert sorted(a.name for a in m.sector_alphabets[1]) == ["a#2", "b#2"]

    def test_connecting_rule_locks(self):
        assert build_lr(Y).rule("zeta").locked(0)
        assert build_rl(Y).rule("xi").locked(1)

    def test_input_sectors(self):
        assert build_lr(Y).input_sectors == (0,)
        assert build_rl(Y).input_sectors == (1,)

    def test_deterministic_build(self):
        assert machine_dumps(build_lr(Y)) == machine_dumps(build_lr(Y))

    def test_empty_alphabet_rejected(self):
        with pytest.raises(ValueError):
            build_lr([])


class TestStandardComputations:
    def test_lr_single_letter_trace(self):
        m = build_lr(Y)
        c = home_configuration(m, W("a"))
        h = standard_lr_computation(m, W("a"))
        comp = run(m, c, h)
        assert [x.tokens() for x in comp.configs] == [
            "p1 a#1 q1 r1", "p1 q1 a#2 r1", "p2 q2 a#2 r2", "p2 a#1 q2 r2"]

    def test_rl_single_letter_trace(self):
        m = build_rl(Y)
        c = home_configuration(m, W("a"))
        h = standard_rl_computation(m, W("a"))
        comp = run(m, c, h)
        assert [x.tokens() for x in comp.configs] == [
            "p1 q1 a#2 r1", "p1 a#1 q1 r1", "p2 a#1 q2 r2", "p2 q2 a#2 r2"]

    def test_all_small_words_lr(self):
        m = build_lr(Y)
        for u in reduced_words(Y, 3):
            h = standard_lr_computation(m, u)
            assert len(h) == 2 * len(u) + 1
            comp = run(m, home_configuration(m, u, 1), h)
            assert comp.end == home_configuration(m, u, 2)

    def test_all_small_words_rl(self):
        m = build_rl(Y)
        for u in reduced_words(Y, 3):
            h = standard_rl_computation(m, u)
            assert len(h) == 2 * len(u) + 1
            comp = run(m, home_configuration(m, u, 1), h)
            assert comp.end == home_configuration(m, u, 2)

    def test_connecting_rule_waits_for_empty_sector(self):
        m = build_lr(Y)
        c = home_configuration(m, W("a"))
        with pytest.raises(MachineError):
            run(m, c, ["zeta"])


class TestMinimality:
    def test_standard_length_is_minimal(self):
        # No shortcut between the two home configurations: minimal history
        # length is exactly 2|u| + 1 for every |u| <= 2.
        for build, std in [(build_lr, standard_lr_computation),
                           (build_rl, standard_rl_computation)]:
            m = build(Y)
            for u in reduced_words(Y, 2):
                res = meet_reach(m, home_configuration(m, u, 1),
                                 home_configuration(m, u, 2), 2 * len(u) + 1)
                assert res.found
                assert res.length == 2 * len(u) + 1

    def test_no_shorter_path_exists(self):
        # The bound in the previous test is tight: searching strictly below
        # it finds nothing.
        m = build_lr(Y)
        u = W("a b")
        res = meet_reach(m, home_configuration(m, u, 1),
                         home_configuration(m, u, 2), 2 * len(u))
        assert not res.found
