"""From machines to groups: presentations, lengths, trapezia, conjugators.

A machine S determines a finitely presented group M(S) generated by its
tape letters, its state letters, and one letter per rule and gap index.
A rewriting step of S becomes a chain of relations in M(S), and a whole
computation flattens into a *trapezium*: a diagram over the presentation
whose bottom and top spell the first and last configurations and whose
sides record the history.
"""

from __future__ import annotations

from fractions import Fraction

from .words import Atom, EMPTY, Word, atom, free_reduce, symmetrized_closure
from .machine import AdmissibleWord, Computation, Machine, run
from .encode import GroupPresentation
from .serialize import dumps_canonical


class GroupError(ValueError):
    pass


# -- the group of a machine -------------------------------------------------

def theta_atom(rule_name: str, i: int) -> Atom:
    return atom(f"{rule_name}.{i}")


class MPresentation:
    """The presentation M(S) read off a machine.

    For a machine with n parts the gap left of part i carries the letter
    theta_i of each rule; the gap right of the last part wraps around to
    index 0.  Each rule contributes

        q_i theta_{i+1} = theta_i l_i q_i' r_i      (one per part)
        theta_{s+1} a = a theta_{s+1}               (a in the sector-s domain)

    where q_i -> l_i q_i' r_i is the rule's action on part i.  Strict
    mode drops the part-0 relations.
    """

    __slots__ = ("machine_name", "strict", "n_parts", "generators",
                 "relators", "theta_q", "theta_a")

    def __init__(self, machine_name, strict, n_parts, generators, relators,
                 theta_q, theta_a):
        self.machine_name = machine_name
        self.strict = bool(strict)
        self.n_parts = n_parts
        self.generators = tuple(generators)
        self.relators = tuple(relators)
        self.theta_q = dict(theta_q)
        self.theta_a = dict(theta_a)

    def theta(self, rule_name: str, i: int) -> Atom:
        return theta_atom(rule_name, i % self.n_parts)

    def as_presentation(self) -> GroupPresentation:
        name = f"M({self.machine_name})"
        if self.strict:
            name += ".strict"
        return GroupPresentation(self.generators, self.relators, name=name)

    def __repr__(self):
        return (f"MPresentation({self.machine_name}, "
                f"{len(self.generators)} generators, "
                f"{len(self.relators)} relators)")


def machine_to_group(m: Machine, strict: bool = False) -> MPresentation:
    K = m.n_parts
    gens: list[Atom] = []
    for ab in m.sector_alphabets:
        gens.extend(sorted(ab, key=lambda a: a.name))
    for p in m.parts:
        gens.extend(p.letters)
    seen = set(gens)
    rules = sorted(m.rules, key=lambda r: r.name)
    for r in rules:
        for i in range(K):
            th = theta_atom(r.name, i)
            if th in seen:
                raise GroupError(
                    f"theta letter {th.name!r} collides with another generator")
            seen.add(th)
            gens.append(th)

    theta_q = {}
    theta_a = {}
    relators: list[Word] = []
    for r in rules:
        for i in range(1 if strict else 0, K):
            rp = r.parts[i]
            w = (Word.of(rp.frm, theta_atom(r.name, (i + 1) % K))
                 * rp.right.inverse()
                 * Word.of((rp.to, -1))
                 * rp.left.inverse()
                 * Word.of((theta_atom(r.name, i), -1)))
            w = free_reduce(w)
            theta_q[(r.name, i)] = w
            relators.append(w)
    for r in rules:
        for s in range(m.n_sectors):
            th = theta_atom(r.name, (s + 1) % K)
            for a in sorted(r.domains[s], key=lambda a: a.name):
                w = Word.of(th, a, (th, -1), (a, -1))
                theta_a[(r.name, s, a.name)] = w
                relators.append(w)
    return MPresentation(m.name, strict, K, gens, relators, theta_q, theta_a)


# -- modified length --------------------------------------------------------

Q_TYPE, A_TYPE, THETA_TYPE = "q", "a", "t"


def letter_types(m: Machine, w: Word) -> str:
    """Classify each letter of a word over M(S) as q, a, or t(heta)."""
    theta_names = {theta_atom(r.name, i).name
                   for r in m.rules for i in range(m.n_parts)}
    out = []
    for a, _ in w:
        if a in m.hw.part_of:
            out.append(Q_TYPE)
        elif a in m.hw.sector_of:
            out.append(A_TYPE)
        elif a.name in theta_names:
            out.append(THETA_TYPE)
        else:
            raise GroupError(f"{a.name!r} is not a generator of M({m.name})")
    return "".join(out)


def modified_length_from_types(types: str, n_parts: int) -> Fraction:
    """Cheapest cost of a type sequence: q and theta letters cost 1, tape
    letters cost delta = 1/(2n+2), and an adjacent theta/tape pair may be
    bought together for 1."""
    delta = Fraction(1, 2 * n_parts + 2)
    single = {Q_TYPE: Fraction(1), THETA_TYPE: Fraction(1), A_TYPE: delta}
    dp = [Fraction(0)]
    for i, t in enumerate(types):
        best = dp[i] + single[t]
        if i and {types[i - 1], t} == {A_TYPE, THETA_TYPE}:
            best = min(best, dp[i - 1] + 1)
        dp.append(best)
    return dp[-1]


def modified_length(m: Machine, w: Word) -> Fraction:
    return modified_length_from_types(letter_types(m, w), m.n_parts)


# -- trapezia ---------------------------------------------------------------

class Edge:
    __slots__ = ("id", "atom", "kind")  # kind: "q" | "a" | "theta"

    def __init__(self, id, atom, kind):
        self.id = id
        self.atom = atom
        self.kind = kind

    def __repr__(self):
        return f"Edge({self.id}, {self.atom.name}, {self.kind})"


class Cell:
    """One cell: a (theta,q) rectangle or a (theta,a) square.  The
    boundary is read counterclockwise from the bottom-left corner, so it
    spells a relator of the default presentation."""

    __slots__ = ("kind", "boundary", "rule", "index", "row")  # kind "tq"|"ta"

    def __init__(self, kind, boundary, rule, index, row=None):
        self.kind = kind
        self.boundary = tuple(boundary)
        self.rule = rule
        self.index = index  # part index for tq, sector index for ta
        self.row = row

    def __repr__(self):
        return f"Cell({self.kind}, {self.rule}, {self.index}, row={self.row})"


class Row:
    """One band of cells.  Paths are tuples of (edge id, orientation);
    bottom and top are read left to right, the sides bottom to top."""

    __slots__ = ("rule", "sign", "bottom", "top", "left", "right")

    def __init__(self, rule, sign, bottom, top, left, right):
        self.rule = rule
        self.sign = sign
        self.bottom = tuple(bottom)
        self.top = tuple(top)
        self.left = tuple(left)
        self.right = tuple(right)


class Trapezium:
    __slots__ = ("machine", "rows", "cells", "edges", "words",
                 "bottom", "top", "left", "right")

    def __init__(self, machine, rows, cells, edges, words, degenerate=()):
        self.machine = machine
        self.rows = tuple(rows)
        self.cells = tuple(cells)
        self.edges = dict(edges)
        self.words = tuple(words)
        if rows:
            self.bottom = rows[0].bottom
            self.top = rows[-1].top
            self.left = tuple(x for r in rows for x in r.left)
            self.right = tuple(x for r in rows for x in r.right)
        else:
            # A zero-row trapezium is just its word, read twice.
            self.bottom = self.top = tuple(degenerate)
            self.left = self.right = ()

    def n_cells(self) -> int:
        return len(self.cells)

    def history(self) -> Word:
        return Word(tuple((atom(r.rule), r.sign) for r in self.rows))

    def path_word(self, path) -> Word:
        return Word(tuple((self.edges[e].atom, o) for e, o in path))

    def boundary_word(self) -> Word:
        """Label of the outer contour: bottom^-1 . left . top . right^-1."""
        return free_reduce(self.path_word(self.bottom).inverse()
                           * self.path_word(self.left)
                           * self.path_word(self.top)
                           * self.path_word(self.right).inverse())

    def __repr__(self):
        return (f"Trapezium({self.machine.name}, {len(self.rows)} rows, "
                f"{len(self.cells)} cells)")


class _Builder:
    def __init__(self):
        self.edges = {}
        self._next = 0

    def new_edge(self, a: Atom, kind: str) -> int:
        e = Edge(self._next, a, kind)
        self.edges[e.id] = e
        self._next += 1
        return e.id


def _spell_admissible(bld, aw):
    """Fresh edges spelling an admissible word; returns (path, state edge
    ids, per-sector tape edge ids)."""
    if bld is None:
        bld = _Builder()
    b_state = [bld.new_edge(a, "q") for a, _ in aw.states]
    b_tape = [[bld.new_edge(a, "a") for a, _ in w.letters] for w in aw.tapes]
    path = [(b_state[0], aw.states[0][1])]
    for j, w in enumerate(aw.tapes):
        path.extend((b_tape[j][k], e) for k, (_, e) in enumerate(w.letters))
        path.append((b_state[j + 1], aw.states[j + 1][1]))
    return tuple(path), b_state, b_tape


def _fold(rho: Word, w: Word, lam: Word):
    """Cancellation structure of rho.w.lam: tagged letters plus a pairing
    of the positions that cancel.  Survivors spell the reduced product."""
    entries = ([("r", j, l) for j, l in enumerate(rho.letters)]
               + [("w", j, l) for j, l in enumerate(w.letters)]
               + [("l", j, l) for j, l in enumerate(lam.letters)])
    partner = [None] * len(entries)
    stack = []
    for t, (_, _, (a, e)) in enumerate(entries):
        if stack and entries[stack[-1]][2] == (a, -e):
            s = stack.pop()
            partner[s] = t
            partner[t] = s
        else:
            stack.append(t)
    return entries, partner


def _check_standard_base(aw: AdmissibleWord):
    want = tuple((i, 1) for i in range(aw.hw.n_parts))
    if aw.base != want:
        raise GroupError("trapezia need the standard base q_0 ... q_{n-1}")


def _positive_row(bld: _Builder, m: Machine, aw: AdmissibleWord, rule):
    """Build one band for a positive application of ``rule`` to ``aw``.
    Returns (row, cells, resulting admissible word)."""
    _check_standard_base(aw)
    out = m.apply_ex(aw, rule, 1)
    if not out.ok:
        raise GroupError(f"cannot apply {rule.name!r}: {out.reason}")
    n = m.n_parts
    K = n
    rp = rule.parts

    bottom, b_state, b_tape = _spell_admissible(bld, aw)
    t_state = [bld.new_edge(rp[i].to, "q") for i in range(n)]

    # Per part: the l- and r-spans of its cell top; per sector: squares for
    # the surviving tape letters and the resulting top-path entries.
    pre = [None] * n
    post = [None] * n
    pre[0] = [(bld.new_edge(a, "a"), e) for a, e in out.stripped_prefix.letters]
    post[n - 1] = [(bld.new_edge(a, "a"), e)
                   for a, e in out.stripped_suffix.letters]
    squares = [[] for _ in range(n - 1)]
    sector_top = [[] for _ in range(n - 1)]
    for s in range(n - 1):
        entries, partner = _fold(rp[s].right, aw.tapes[s], rp[s + 1].left)
        spans = [None] * len(entries)
        for t, (tag, j, (a, e)) in enumerate(entries):
            if tag == "w":
                spans[t] = (b_tape[s][j], e)
        for t, (tag, j, (a, e)) in enumerate(entries):
            if spans[t] is not None:
                continue
            p = partner[t]
            if p is not None and spans[p] is not None:
                spans[t] = (spans[p][0], -spans[p][1])
            else:
                spans[t] = (bld.new_edge(a, "a"), e)
        rn = len(rp[s].right)
        post[s] = spans[:rn]
        pre[s + 1] = spans[rn + len(aw.tapes[s]):]
        for t, (tag, j, (a, e)) in enumerate(entries):
            if partner[t] is not None:
                continue
            if tag == "w":
                te = bld.new_edge(a, "a")
                squares[s].append((b_tape[s][j], e, te))
                sector_top[s].append((te, e))
            else:
                sector_top[s].append(spans[t])

    # Columns left to right; every vertical over sector s carries index
    # (s+1) mod K, and the outermost two carry index 0.
    cells = []
    left_v = bld.new_edge(theta_atom(rule.name, 0), "theta")
    v_first = left_v
    top = []
    for i in range(n):
        rv = bld.new_edge(theta_atom(rule.name, (i + 1) % K), "theta")
        span = list(pre[i]) + [(t_state[i], 1)] + list(post[i])
        boundary = ([(b_state[i], 1), (rv, 1)]
                    + [(e, -o) for e, o in reversed(span)]
                    + [(left_v, -1)])
        cells.append(Cell("tq", boundary, rule.name, i))
        left_v = rv
        top.append((t_state[i], 1))
        if i < n - 1:
            for be, e, te in squares[i]:
                rv = bld.new_edge(theta_atom(rule.name, (i + 1) % K), "theta")
                cells.append(Cell("ta", [(be, e), (rv, 1), (te, -e),
                                         (left_v, -1)], rule.name, i))
                left_v = rv
            top.extend(sector_top[i])

    row = Row(rule.name, 1, bottom, top,
              [(v_first, 1)] + pre[0],
              [(left_v, 1)] + [(e, -o) for e, o in reversed(post[n - 1])])
    word = Word(tuple((bld.edges[e].atom, o) for e, o in row.top))
    if word != out.result.to_word():
        raise GroupError("row top does not spell the resulting word")
    return row, cells, out.result


def _flip_path(path):
    return tuple((e, -o) for e, o in reversed(path))


def _flip_row(row: Row) -> Row:
    return Row(row.rule, -1, row.top, row.bottom,
               _flip_path(row.left), _flip_path(row.right))


def computation_to_trapezium(m: Machine, comp: Computation) -> Trapezium:
    """Flatten a computation into a trapezium over M(S).

    Every configuration must have the standard base; negative steps are
    built as their positive counterparts and mounted upside down."""
    if not comp.ok:
        raise GroupError("computation failed; nothing to flatten")
    for aw in comp.configs:
        _check_standard_base(aw)
    bld = _Builder()
    rows = []
    cells = []
    for t, (rule, sign) in enumerate(comp.steps):
        if sign > 0:
            row, rcells, got = _positive_row(bld, m, comp.configs[t], rule)
            want = comp.configs[t + 1]
        else:
            row, rcells, got = _positive_row(bld, m, comp.configs[t + 1], rule)
            want = comp.configs[t]
            row = _flip_row(row)
            # Mirrored cells are read the other way around.
            for c in rcells:
                c.boundary = _flip_path(c.boundary)
        if got != want:
            raise GroupError(f"step {t} does not replay")
        for c in rcells:
            c.row = t
        rows.append(row)
        cells.extend(rcells)

    if not rows:
        path, _, _ = _spell_admissible(bld, comp.configs[0])
        return Trapezium(m, [], [], bld.edges, comp.configs, degenerate=path)

    # Glue consecutive rows: the top of one and the bottom of the next
    # spell the same configuration edge for edge.
    parent = {}

    def find(x):
        while parent.get(x, x) != x:
            parent[x] = parent.get(parent[x], parent[x])
            x = parent[x]
        return x

    for t in range(len(rows) - 1):
        up, down = rows[t].top, rows[t + 1].bottom
        if len(up) != len(down):
            raise GroupError("interface paths differ in length")
        for (e1, o1), (e2, o2) in zip(up, down):
            r1, r2 = find(e1), find(e2)
            a1, a2 = bld.edges[r1], bld.edges[r2]
            if o1 != o2 or a1.atom is not a2.atom or a1.kind != a2.kind:
                raise GroupError("interface paths do not match")
            if r1 != r2:
                parent[max(r1, r2)] = min(r1, r2)

    def remap(path):
        return tuple((find(e), o) for e, o in path)

    rows = [Row(r.rule, r.sign, remap(r.bottom), remap(r.top),
                remap(r.left), remap(r.right)) for r in rows]
    for c in cells:
        c.boundary = remap(c.boundary)
    edges = {e: edge for e, edge in bld.edges.items() if find(e) == e}
    return Trapezium(m, rows, cells, edges, comp.configs)


def trapezium_to_computation(trap: Trapezium) -> Computation:
    """Re-run the stored interface words along the stored history."""
    m = trap.machine
    comp = run(m, trap.words[0], trap.history())
    for j, aw in enumerate(comp.configs):
        if aw != trap.words[j]:
            raise GroupError(f"stored word {j} does not replay")
    return comp


# -- validation -------------------------------------------------------------

def _outer_loop(trap: Trapezium):
    return (_flip_path(trap.bottom) + trap.left + trap.top
            + _flip_path(trap.right))


def validate_trapezium(trap: Trapezium) -> bool:
    """Check a trapezium cell by cell and edge by edge.

    Every cell must spell a relator of the default presentation of
    M(machine), every edge must be used exactly twice with opposite
    orientations (the outer contour counts as a face), the bottom and
    top must spell the stored end configurations, and each row's sides
    must read the theta letter followed by the emitted word."""
    m = trap.machine
    if len(trap.words) != len(trap.rows) + 1:
        raise GroupError("one more stored word than rows expected")

    closure = symmetrized_closure(machine_to_group(m).relators)
    for c in trap.cells:
        w = free_reduce(trap.path_word(c.boundary))
        if w not in closure:
            raise GroupError(f"cell {c!r} does not spell a relator")

    use = {}
    for c in trap.cells:
        for e, o in c.boundary:
            use.setdefault(e, []).append(o)
    for e, o in _outer_loop(trap):
        use.setdefault(e, []).append(o)
    for e in trap.edges:
        if sorted(use.get(e, ())) != [-1, 1]:
            raise GroupError(f"edge {e} used {use.get(e, ())!r}, "
                             "expected once each way")
    if set(use) != set(trap.edges):
        raise GroupError("a path mentions an unknown edge")

    for j, row in enumerate(trap.rows):
        rule = m.rule(row.rule)
        if row.sign > 0:
            out = m.apply_ex(trap.words[j], rule, 1)
        else:
            out = m.apply_ex(trap.words[j + 1], rule, 1)
        if not out.ok:
            raise GroupError(f"row {j} does not replay")
        th = Word.of((theta_atom(rule.name, 0), 1))
        left = th * out.stripped_prefix
        right = th * out.stripped_suffix.inverse()
        if row.sign < 0:
            left, right = left.inverse(), right.inverse()
        if trap.path_word(row.left) != left:
            raise GroupError(f"row {j} left side label is wrong")
        if trap.path_word(row.right) != right:
            raise GroupError(f"row {j} right side label is wrong")
        if trap.path_word(row.bottom) != trap.words[j].to_word():
            raise GroupError(f"row {j} bottom label is wrong")
        if trap.path_word(row.top) != trap.words[j + 1].to_word():
            raise GroupError(f"row {j} top label is wrong")

    if trap.path_word(trap.bottom) != trap.words[0].to_word():
        raise GroupError("bottom label is wrong")
    if trap.path_word(trap.top) != trap.words[-1].to_word():
        raise GroupError("top label is wrong")
    return True


def run_dichotomy(m: Machine, comp: Computation, L: int = None) -> list[dict]:
    """Split the history into maximal one-rule runs and check that each
    is short (at most |in| + |out| + 2L tape letters long) or advances
    the tape length by a constant in its interior.  Raises if a run is
    neither."""
    if L is None:
        L = max((sum(len(p.left) + len(p.right) for p in r.parts)
                 for r in m.rules), default=1) or 1
    records = []
    i = 0
    while i < len(comp.steps):
        j = i
        while j < len(comp.steps) and comp.steps[j] == comp.steps[i]:
            j += 1
        rule, sign = comp.steps[i]
        length = j - i
        bound = (comp.configs[i].tape_length()
                 + comp.configs[j].tape_length() + 2 * L)
        rec = {"rule": rule.name, "sign": sign, "length": length,
               "bound": bound}
        if length <= bound:
            rec["status"] = "short"
        else:
            deltas = [comp.configs[t + 1].tape_length()
                      - comp.configs[t].tape_length() for t in range(i, j)]
            mid = deltas[L:length - L] or deltas
            if len(set(mid)) > 1:
                raise GroupError(
                    f"run of {rule.name!r} (length {length}) is neither "
                    "short nor periodic")
            rec["status"] = "periodic"
        records.append(rec)
        i = j
    return records


# -- export -----------------------------------------------------------------

def trapezium_to_dict(trap: Trapezium) -> dict:
    return {
        "schema_version": 1,
        "machine": trap.machine.name,
        "history": trap.history().tokens(),
        "words": [aw.tokens() for aw in trap.words],
        "edges": [{"id": e.id, "atom": e.atom.name, "kind": e.kind}
                  for e in sorted(trap.edges.values(), key=lambda e: e.id)],
        "cells": [{"kind": c.kind, "rule": c.rule, "index": c.index,
                   "row": c.row, "boundary": [[e, o] for e, o in c.boundary]}
                  for c in trap.cells],
        "rows": [{"rule": r.rule, "sign": r.sign,
                  "bottom": [[e, o] for e, o in r.bottom],
                  "top": [[e, o] for e, o in r.top],
                  "left": [[e, o] for e, o in r.left],
                  "right": [[e, o] for e, o in r.right]}
                 for r in trap.rows],
        "boundary": {side: [[e, o] for e, o in getattr(trap, side)]
                     for side in ("bottom", "top", "left", "right")},
    }


def trapezium_dumps(trap: Trapezium) -> str:
    return dumps_canonical(trapezium_to_dict(trap))


def trapezium_to_dot(trap: Trapezium) -> str:
    """The cell-adjacency graph: one node per cell plus the outer face,
    one edge per shared diagram edge."""
    users = {}
    for i, c in enumerate(trap.cells):
        for e, _ in c.boundary:
            users.setdefault(e, []).append(f"c{i}")
    for e, _ in _outer_loop(trap):
        users.setdefault(e, []).append("outer")
    lines = [f'graph "{trap.machine.name}" {{']
    for i, c in enumerate(trap.cells):
        sign = "+" if trap.rows[c.row].sign > 0 else "-"
        lines.append(f'  c{i} [label="{c.kind} {c.rule}{sign} @{c.index}"];')
    lines.append('  outer [label="outer"];')
    for e in sorted(users):
        pair = users[e]
        if len(pair) == 2:
            lines.append(f'  {pair[0]} -- {pair[1]} '
                         f'[label="{trap.edges[e].atom.name}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"


# -- conjugators and products ----------------------------------------------

def conjugator_from_accepting(m: Machine, comp: Computation) -> Word:
    """A word g with  g . word(end) . g^-1 = word(start)  in M(S).

    Reads the side of the computation's trapezium; it exists when no step
    emits tape letters past the outer parts, and then its length equals
    the number of steps.  Needs the part-0 relations, so the default
    (non-strict) presentation."""
    trap = computation_to_trapezium(m, comp)
    for path in (trap.left, trap.right):
        for e, _ in path:
            if trap.edges[e].kind != "theta":
                raise GroupError(
                    "a step emits tape letters at the boundary; "
                    "the sides are not pure conjugators")
    g = trap.path_word(trap.left)
    if g != trap.path_word(trap.right):
        raise GroupError("side labels disagree")
    return g


def heisenberg_product(p: GroupPresentation,
                       names=("a", "b", "c")) -> GroupPresentation:
    """Direct product of the presented group with the integral Heisenberg
    group <a, b, c | [a,b]=c, [a,c]=[b,c]=1>."""
    taken = {g.name for g in p.generators}
    fresh = []
    for nm in names:
        while nm in taken:
            nm += "_"
        taken.add(nm)
        fresh.append(atom(nm))
    a, b, c = fresh
    relators = list(p.relators)
    relators.append(Word.of(a, b, (a, -1), (b, -1), (c, -1)))
    relators.append(Word.of(a, c, (a, -1), (c, -1)))
    relators.append(Word.of(b, c, (b, -1), (c, -1)))
    for g in p.generators:
        for h in fresh:
            relators.append(Word.of(g, h, (g, -1), (h, -1)))
    name = f"{p.name}xH" if p.name else "H"
    return GroupPresentation(tuple(p.generators) + tuple(fresh), relators,
                             name=name)


def dehn_cell_bound_check(cells: int, boundary_length: int) -> bool:
    """cells <= L^3/8 + L^2/2 for a contour of length L."""
    L = Fraction(boundary_length)
    return Fraction(cells) <= L ** 3 / 8 + L ** 2 / 2
