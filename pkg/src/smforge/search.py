"""Reachability in the configuration graph of an S-machine.

Edges are applications of rules and their formal inverses, so the graph
is undirected in effect; a backward search from the target just applies
the opposite signs.  Searches are deterministic: rules are tried in
(name, sign) order and frontiers kept in insertion order, so the witness
history found for a given query never changes between runs.
"""
from __future__ import annotations

from typing import Callable, Iterator, Optional

from smforge.machine import (
    AdmissibleWord,
    Machine,
    accept_configuration,
    input_configuration,
)
from smforge.words import EMPTY, Word, atom, reduced_words

FOUND = "found"
UNREACHABLE = "unreachable"
BOUNDED = "bound-limited"


class ReachResult:
    """Outcome of a reachability query.

    status is one of FOUND / UNREACHABLE / BOUNDED.  UNREACHABLE is a
    certificate: the whole component of the start was enumerated within
    the step bound and the target is not in it.  BOUNDED means the bound
    was hit first and nothing is certified either way.
    """

    def __init__(self, status, history=None, length=None, explored=0):
        self.status = status
        self.history = history
        self.length = length
        self.explored = explored

    @property
    def found(self) -> bool:
        return self.status == FOUND

    def __repr__(self):
        if self.found:
            return f"ReachResult(found, length={self.length})"
        return f"ReachResult({self.status}, explored={self.explored})"


def _history_from_parents(parents, key) -> Word:
    steps = []
    while parents[key] is not None:
        pkey, rule, sign = parents[key]
        steps.append((atom(rule.name), sign))
        key = pkey
    return Word(reversed(steps))


def bfs_reach(m: Machine, start: AdmissibleWord, target: AdmissibleWord,
              max_steps: int) -> ReachResult:
    """Breadth-first search from start; shortest history to target."""
    if start == target:
        return ReachResult(FOUND, EMPTY, 0, 1)
    srules = m.signed_rules()
    tkey = target.key()
    parents = {start.key(): None}
    frontier = [start]
    for depth in range(1, max_steps + 1):
        nxt = []
        for c in frontier:
            ckey = c.key()
            for rule, sign in srules:
                res = m.try_apply(c, rule, sign)
                if res is None:
                    continue
                k = res.key()
                if k in parents:
                    continue
                parents[k] = (ckey, rule, sign)
                if k == tkey:
                    return ReachResult(FOUND, _history_from_parents(parents, k),
                                       depth, len(parents))
                nxt.append(res)
        if not nxt:
            return ReachResult(UNREACHABLE, explored=len(parents))
        frontier = nxt
    return ReachResult(BOUNDED, explored=len(parents))


def reachable_configs(m: Machine, start: AdmissibleWord,
                      max_steps: int) -> tuple[dict[AdmissibleWord, int], bool]:
    """All configurations within max_steps of start, with their distances.
    The flag reports whether the whole component was exhausted."""
    srules = m.signed_rules()
    dist = {start: 0}
    frontier = [start]
    for depth in range(1, max_steps + 1):
        nxt = []
        for c in frontier:
            for rule, sign in srules:
                res = m.try_apply(c, rule, sign)
                if res is not None and res not in dist:
                    dist[res] = depth
                    nxt.append(res)
        if not nxt:
            return dist, True
        frontier = nxt
    return dist, False


def meet_reach(m: Machine, start: AdmissibleWord, target: AdmissibleWord,
               max_steps: int) -> ReachResult:
    """Bidirectional layered search.  Finds the exact minimal history
    length whenever it is at most max_steps; the witness history is some
    minimal one (deterministic, but not necessarily the one bfs_reach
    would return)."""
    if start == target:
        return ReachResult(FOUND, EMPTY, 0, 1)
    srules = m.signed_rules()
    sides = {
        "f": {"parents": {start.key(): None}, "frontier": [start], "depth": 0},
        "b": {"parents": {target.key(): None}, "frontier": [target], "depth": 0},
    }
    best: Optional[tuple[int, ...]] = None
    best_len = None

    def reconstruct(meet_key):
        fw = _history_from_parents(sides["f"]["parents"], meet_key)
        bw = _history_from_parents(sides["b"]["parents"], meet_key)
        # bw leads target -> meet; invert it to continue meet -> target.
        return fw * bw.inverse()

    while True:
        f, b = sides["f"], sides["b"]
        if best_len is not None and f["depth"] + b["depth"] + 1 > best_len:
            explored = len(f["parents"]) + len(b["parents"])
            return ReachResult(FOUND, reconstruct(best), best_len, explored)
        if f["depth"] + b["depth"] >= max_steps or not f["frontier"] or not b["frontier"]:
            break
        side = f if len(f["frontier"]) <= len(b["frontier"]) else b
        other = b if side is f else f
        nxt = []
        for c in side["frontier"]:
            ckey = c.key()
            for rule, sign in srules:
                res = m.try_apply(c, rule, sign)
                if res is None:
                    continue
                k = res.key()
                if k in side["parents"]:
                    continue
                side["parents"][k] = (ckey, rule, sign)
                nxt.append(res)
                if k in other["parents"]:
                    total = side["depth"] + 1 + other["depth"]
                    # distance of k on the other side may be less than its
                    # frontier depth; recover it by walking the chain.
                    d = 0
                    kk = k
                    while other["parents"][kk] is not None:
                        kk = other["parents"][kk][0]
                        d += 1
                    total = side["depth"] + 1 + d
                    if best_len is None or total < best_len:
                        best_len, best = total, k
        side["frontier"] = nxt
        side["depth"] += 1
    explored = len(sides["f"]["parents"]) + len(sides["b"]["parents"])
    if best_len is not None:
        return ReachResult(FOUND, reconstruct(best), best_len, explored)
    if not sides["f"]["frontier"] or not sides["b"]["frontier"]:
        return ReachResult(UNREACHABLE, explored=explored)
    return ReachResult(BOUNDED, explored=explored)


# -- acceptance and time functions -----------------------------------------


def tm_of_config(m: Machine, config: AdmissibleWord, bound: int,
                 method: str = "bfs") -> ReachResult:
    """Length of a shortest computation from config to the accept
    configuration."""
    search = meet_reach if method == "meet" else bfs_reach
    return search(m, config, accept_configuration(m), bound)


def accepts(m: Machine, inputs, bound: int, method: str = "bfs") -> ReachResult:
    return tm_of_config(m, input_configuration(m, inputs), bound, method)


def enumerate_inputs(m: Machine, n: int, exact: bool = False) -> Iterator[tuple]:
    """Tuples of reduced input words, one per input sector, of total
    length <= n (== n if exact), in deterministic order."""
    alphabets = [sorted(m.sector_alphabets[s], key=lambda a: a._key())
                 for s in m.input_sectors]

    def rec(i, budget):
        if i == len(alphabets):
            if not exact or budget == 0:
                yield ()
            return
        for w in reduced_words(alphabets[i], budget):
            for rest in rec(i + 1, budget - len(w)):
                yield (w,) + rest

    yield from rec(0, n)


class TimeFunction:
    """TM(n) over all accepted inputs of length <= n.

    complete is False when some input search hit the bound without an
    answer, in which case value is only a lower estimate.
    """

    def __init__(self, values, complete, rejected):
        self.values = values          # n -> max minimal acceptance length
        self.complete = complete      # n -> bool
        self.rejected = rejected      # list of input tuples not accepted

    def __getitem__(self, n):
        return self.values[n]


def time_function(m: Machine, n_max: int, bound: int,
                  method: str = "bfs") -> TimeFunction:
    values, complete, rejected = {}, {}, []
    best = 0
    all_complete = True
    for n in range(n_max + 1):
        for inputs in enumerate_inputs(m, n, exact=True):
            res = tm_of_config(m, input_configuration(m, inputs), bound, method)
            if res.found:
                best = max(best, res.length)
            elif res.status == UNREACHABLE:
                rejected.append(inputs)
            else:
                all_complete = False
        values[n] = best
        complete[n] = all_complete
    return TimeFunction(values, complete, rejected)


def reduced_computations(m: Machine, start: AdmissibleWord, max_steps: int,
                         prune: Optional[Callable] = None
                         ) -> Iterator[tuple[tuple, AdmissibleWord]]:
    """Depth-first enumeration of every computation from start whose
    history is freely reduced, as (steps, end) pairs.  steps is a tuple
    of (rule, sign).  prune(config, depth) may cut a branch after it is
    yielded."""
    srules = m.signed_rules()

    def rec(c, steps, depth):
        yield steps, c
        if depth == max_steps or (prune is not None and prune(c, depth)):
            return
        last = steps[-1] if steps else None
        for rule, sign in srules:
            if last is not None and last[0] is rule and last[1] == -sign:
                continue
            res = m.try_apply(c, rule, sign)
            if res is not None:
                yield from rec(res, steps + ((rule, sign),), depth + 1)

    yield from rec(start, (), 0)
