"""
Building and running an S-machine
=================================

Hardware, rules, admissible words, and what a computation looks like.
"""
from smforge.machine import (Hardware, Machine, RulePart, StatePart,
                             accept_configuration, input_configuration,
                             make_rule, run)
from smforge.words import Word, atom

# An S-machine rewrites "admissible words": state letters q0 q1 ... with
# a tape word wedged into each gap.  Ours has two state parts and one
# tape sector over the single letter y.
y = atom("y")
hw = Hardware(
    [StatePart("T0", ["q0s", "q0f"], start="q0s", end="q0f"),
     StatePart("T1", ["q1s", "q1f"], start="q1s", end="q1f")],
    [[y]], input_sectors=[0])

# Rule 'del' keeps both states put but has the right one write y^-1 on
# its left, so a trailing y on the tape cancels; 'acc' flips both states
# to final, and its empty domain means it only fires on an empty tape.
rules = [
    make_rule(hw, "del", [("q0s", "q0s"),
                          RulePart("q1s", "q1s", left=Word.of((y, -1)))]),
    make_rule(hw, "acc", [("q0s", "q0f"), ("q1s", "q1f")], domains=[[]]),
]
m = Machine("toy_deleter", hw, rules)

start = input_configuration(m, (Word.from_tokens("y y"),))
print("start: ", start.tokens())
print("accept:", accept_configuration(m).tokens())

# A computation is just a history word over the rule names.  Negative
# letters run a rule backwards.
comp = run(m, start, Word.from_tokens("del del acc"))
for i, c in enumerate(comp.configs):
    print(f"  step {i}: {c.tokens()}")
print("accepted:", comp.ok and comp.end == accept_configuration(m))

# With strict=False, run() reports where and why a history fails
# instead of raising.
bad = run(m, start, Word.from_tokens("acc"), strict=False)
print("bad history:", bad.reason, "at step", bad.failed_at)

# Running a history and then its inverse is a round trip — rules are
# invertible, which is the whole point of the S in S-machine.
there = run(m, start, Word.from_tokens("del"))
back = run(m, there.end, Word.from_tokens("del^-1"))
print("round trip:", back.end == start)
