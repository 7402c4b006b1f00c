"""Small machines and presentations used across the test suite and the
demos."""
from __future__ import annotations

from smforge.encode import GroupPresentation
from smforge.machine import Hardware, Machine, RulePart, StatePart, make_rule
from smforge.words import Word, atom, atoms, copy_alphabet


def toy_deleter() -> Machine:
    """Two parts over one {y}-sector.  'del' erases a trailing y (its
    inverse erases a trailing y^-1), 'acc' locks the sector.  Accepts
    every reduced word y^k, with a shortest accepting computation of
    length |k| + 1."""
    y = atom("y")
    hw = Hardware(
        [StatePart("T0", ["q0s", "q0f"], "q0s", "q0f"),
         StatePart("T1", ["q1s", "q1f"], "q1s", "q1f")],
        [[y]], input_sectors=[0])
    rules = [
        make_rule(hw, "del",
                  [("q0s", "q0s"),
                   RulePart("q1s", "q1s", left=Word.of((y, -1)))]),
        make_rule(hw, "acc", [("q0s", "q0f"), ("q1s", "q1f")], domains=[[]]),
    ]
    return Machine("toy_deleter", hw, rules)


def trivial_acceptor() -> Machine:
    """One {y}-sector, singleton parts, no rules: accepts only the empty
    word, in zero steps."""
    y = atom("y")
    hw = Hardware([StatePart("A0", ["p0"]), StatePart("A1", ["p1"])],
                  [[y]], input_sectors=[0])
    return Machine("trivial_acceptor", hw, [])


def one_sector_left_multiplier(letters=("a", "b"), idle=False) -> Machine:
    """One sector; rule mul(x) turns the tape w into x.w.  With ``idle``,
    an extra rule that does nothing at all."""
    ab = atoms(letters)
    hw = Hardware([StatePart("M0", ["Q0"]), StatePart("M1", ["Q1"])],
                  [ab], input_sectors=[0])
    rules = [make_rule(hw, f"mul({x.name})",
                       [RulePart("Q0", "Q0", right=Word.of(x)), ("Q1", "Q1")])
             for x in ab]
    if idle:
        rules.append(make_rule(hw, "idle", [("Q0", "Q0"), ("Q1", "Q1")]))
    return Machine("left_multiplier", hw, rules)


def paired_multiplier(letters=("a", "b")) -> Machine:
    """One sector over two disjoint copies of the alphabet; rule mul(x)
    turns the tape w into x_l.w.x_r, both sides in one step."""
    base = atoms(letters)
    cl = copy_alphabet(base, "{}_l")
    cr = copy_alphabet(base, "{}_r")
    hw = Hardware([StatePart("M0", ["Q0"]), StatePart("M1", ["Q1"])],
                  [[cl[a] for a in base] + [cr[a] for a in base]],
                  input_sectors=[0])
    rules = [make_rule(hw, f"mul({a.name})",
                       [RulePart("Q0", "Q0", right=Word.of(cl[a])),
                        RulePart("Q1", "Q1", left=Word.of(cr[a]))])
             for a in base]
    return Machine("paired_multiplier", hw, rules)


def z2_presentation() -> GroupPresentation:
    """⟨x | x²⟩: a word is trivial exactly when its exponent sum is
    even."""
    return GroupPresentation(atoms(["x"]), [Word.from_tokens("x x")],
                             name="z2")


def commutator_presentation() -> GroupPresentation:
    """⟨x, y | xyx⁻¹y⁻¹⟩: the free abelian group of rank two."""
    return GroupPresentation(atoms(["x", "y"]),
                             [Word.from_tokens("x y x^-1 y^-1")],
                             name="zxz")


def two_sided_multiplier(letters=("a", "b")) -> Machine:
    """One sector; lmul(x): w -> x.w and rmul(x): w -> w.x."""
    ab = atoms(letters)
    hw = Hardware([StatePart("M0", ["Q0"]), StatePart("M1", ["Q1"])],
                  [ab], input_sectors=[0])
    rules = []
    for x in ab:
        rules.append(make_rule(hw, f"lmul({x.name})",
                               [RulePart("Q0", "Q0", right=Word.of(x)),
                                ("Q1", "Q1")]))
        rules.append(make_rule(hw, f"rmul({x.name})",
                               [("Q0", "Q0"),
                                RulePart("Q1", "Q1", left=Word.of(x))]))
    return Machine("two_sided_multiplier", hw, rules)
