"""
Primitive machines and reachability search
==========================================

The LR machine, its standard computations, and the time function TM(n).
"""
from smforge import search
from smforge.primitive import build_lr, home_configuration, standard_lr_computation
from smforge.machine import run
from smforge.words import Word

# LR({y}) walks its middle state letter left through the tape word,
# flips a switch, and walks back right.  Three rules per letter side.
m = build_lr(["y"])
print(m.name, "has", len(m.rules), "rules:",
      [r.name for r in m.rules])

# The standard computation carries u from level 1 to level 2 in exactly
# 2|u| + 1 steps.
u = Word.from_tokens("y y")
h = standard_lr_computation(m, u)
print("standard history:", h.tokens(), f"({len(h)} steps)")
comp = run(m, home_configuration(m, u, level=1), h)
print("reaches level 2:", comp.ok
      and comp.end == home_configuration(m, u, level=2))

# BFS finds the same history — the standard computation is minimal.
res = search.bfs_reach(m, home_configuration(m, u, 1),
                       home_configuration(m, u, 2), max_steps=32)
print("bfs:", res.status, "length", res.length,
      "- matches:", res.history == h)

# meet_reach searches from both ends at once; same answers, fewer
# configurations touched on long instances.
res2 = search.meet_reach(m, home_configuration(m, u, 1),
                         home_configuration(m, u, 2), max_steps=32)
print("meet:", res2.status, "length", res2.length,
      f"(explored {res2.explored} vs {res.explored})")

# The time function of a machine: smallest accepting length over all
# inputs of each size, with a completeness flag per row.
from smforge.fixtures import toy_deleter
tf = search.time_function(toy_deleter(), n_max=3, bound=16)
for n in sorted(tf.values):
    print(f"  TM({n}) = {tf.values[n]}"
          + ("" if tf.complete[n] else "  (bound hit)"))
