"""S-machines: rewriting systems whose configurations are group words.

Hardware interleaves state parts with tape sectors: sector ``i`` lies
between part ``i`` and part ``i + 1``.  A cyclic machine closes the
circle with the wrap sector ``n_parts - 1`` between the last part and
part 0; a non-cyclic machine simply has no sector there.

A rule acts on every part at once by the substitution

    q  ->  left . q' . right

so the sector between parts ``i`` and ``i + 1`` is rewritten to
``right_i . w . left_{i+1}`` followed by free reduction.  Application is
guarded by per-sector domains: the rule applies only when each tape word
is written in the domain alphabet.  A sector with empty domain is locked
by the rule (the tape must be empty, and nothing may be written there —
write words are themselves required to lie in the domains, which is
exactly what makes a rule and its formal inverse undo each other on
every admissible word).
"""
from __future__ import annotations

from typing import Iterable, Mapping, Optional, Sequence, Union

from smforge.words import EMPTY, Atom, Word, atom, free_reduce


class MachineError(ValueError):
    pass


def _atom(a) -> Atom:
    return a if isinstance(a, Atom) else atom(a)


class StatePart:
    """One state component: its letters and the designated start/end letters."""

    __slots__ = ("name", "letters", "start", "end")

    def __init__(self, name: str, letters, start=None, end=None):
        letters = tuple(_atom(a) for a in letters)
        if not letters:
            raise MachineError(f"part {name!r} has no letters")
        if len(set(letters)) != len(letters):
            raise MachineError(f"part {name!r} repeats a letter")
        self.name = name
        self.letters = letters
        self.start = _atom(start) if start is not None else letters[0]
        self.end = _atom(end) if end is not None else letters[-1]
        for a in (self.start, self.end):
            if a not in letters:
                raise MachineError(f"{a.name!r} is not a letter of part {name!r}")

    def __repr__(self):
        return f"StatePart({self.name}, {[a.name for a in self.letters]})"


class Hardware:
    """Parts and sectors of an S-machine, with letter lookups."""

    def __init__(self, parts: Sequence[StatePart], sector_alphabets,
                 input_sectors=(), cyclic: bool = False):
        self.parts = tuple(parts)
        self.cyclic = bool(cyclic)
        n = len(self.parts)
        if n == 0:
            raise MachineError("a machine needs at least one part")
        want = n if self.cyclic else n - 1
        alphabets = tuple(frozenset(_atom(a) for a in ab) for ab in sector_alphabets)
        if len(alphabets) != want:
            raise MachineError(
                f"expected {want} sector alphabets for {n} parts "
                f"({'cyclic' if self.cyclic else 'non-cyclic'}), got {len(alphabets)}")
        self.sector_alphabets = alphabets
        self.input_sectors = tuple(input_sectors)
        if len(set(self.input_sectors)) != len(self.input_sectors):
            raise MachineError("repeated input sector")
        for s in self.input_sectors:
            if not 0 <= s < want:
                raise MachineError(f"input sector {s} out of range")

        self.part_of: dict[Atom, int] = {}
        for i, p in enumerate(self.parts):
            for a in p.letters:
                if a in self.part_of:
                    raise MachineError(f"state letter {a.name!r} appears in two parts")
                self.part_of[a] = i
        self.sector_of: dict[Atom, int] = {}
        for s, ab in enumerate(alphabets):
            for a in ab:
                if a in self.sector_of:
                    raise MachineError(f"tape letter {a.name!r} appears in two sectors")
                if a in self.part_of:
                    raise MachineError(f"{a.name!r} is both a state and a tape letter")
                self.sector_of[a] = s

    @property
    def n_parts(self) -> int:
        return len(self.parts)

    @property
    def n_sectors(self) -> int:
        return len(self.sector_alphabets)

    def left_sector(self, i: int) -> Optional[int]:
        """Index of the sector to the left of part i, if any."""
        if i > 0:
            return i - 1
        return self.n_parts - 1 if self.cyclic else None

    def right_sector(self, i: int) -> Optional[int]:
        if i < self.n_parts - 1 or self.cyclic:
            return i
        return None

    def state_atoms(self) -> frozenset[Atom]:
        return frozenset(self.part_of)

    def tape_atoms(self) -> frozenset[Atom]:
        return frozenset(self.sector_of)


class RulePart:
    """The action of a rule on one part: frm -> left . to . right."""

    __slots__ = ("frm", "to", "left", "right")

    def __init__(self, frm, to, left: Word = EMPTY, right: Word = EMPTY):
        self.frm = _atom(frm)
        self.to = _atom(to)
        self.left = left
        self.right = right

    def is_identity(self) -> bool:
        return self.frm is self.to and not self.left and not self.right

    def __eq__(self, other):
        return (isinstance(other, RulePart) and self.frm is other.frm
                and self.to is other.to and self.left == other.left
                and self.right == other.right)

    def __hash__(self):
        return hash((self.frm, self.to, self.left, self.right))

    def __repr__(self):
        return (f"[{self.frm.name} -> {self.left.tokens()} . "
                f"{self.to.name} . {self.right.tokens()}]")


class SRule:
    """A rule: one RulePart per part plus one domain alphabet per sector."""

    __slots__ = ("name", "parts", "domains")

    def __init__(self, name: str, parts: Sequence[RulePart], domains):
        self.name = name
        self.parts = tuple(parts)
        self.domains = tuple(frozenset(d) for d in domains)

    def locked(self, sector: int) -> bool:
        return not self.domains[sector]

    def __repr__(self):
        return f"SRule({self.name})"


FULL = "full"


def make_rule(hw: Hardware, name: str, parts, domains=None) -> SRule:
    """Build and validate a rule against the hardware.

    ``parts`` entries may be RulePart instances or (frm, to) /
    (frm, to, left, right) tuples.  ``domains`` entries may be the string
    "full" (the whole sector alphabet), an iterable of letters, or the
    whole argument may be None for all-full.
    """
    rps = []
    for p in parts:
        if isinstance(p, RulePart):
            rps.append(p)
        else:
            rps.append(RulePart(*p))
    if domains is None:
        doms = [hw.sector_alphabets[s] for s in range(hw.n_sectors)]
    else:
        doms = []
        if len(domains) != hw.n_sectors:
            raise MachineError(f"rule {name!r}: expected {hw.n_sectors} domains")
        for s, d in enumerate(domains):
            if d == FULL:
                doms.append(hw.sector_alphabets[s])
            else:
                doms.append(frozenset(_atom(a) for a in d))
    rule = SRule(name, rps, doms)
    validate_rule(hw, rule)
    return rule


def validate_rule(hw: Hardware, rule: SRule) -> None:
    if len(rule.parts) != hw.n_parts:
        raise MachineError(f"rule {rule.name!r}: expected {hw.n_parts} parts")
    if len(rule.domains) != hw.n_sectors:
        raise MachineError(f"rule {rule.name!r}: expected {hw.n_sectors} domains")
    for s, d in enumerate(rule.domains):
        extra = d - hw.sector_alphabets[s]
        if extra:
            raise MachineError(
                f"rule {rule.name!r}: domain of sector {s} contains "
                f"{sorted(a.name for a in extra)} outside the sector alphabet")
    for i, rp in enumerate(rule.parts):
        part = hw.parts[i]
        for a in (rp.frm, rp.to):
            if a not in part.letters:
                raise MachineError(
                    f"rule {rule.name!r}: {a.name!r} is not a letter of part {i}")
        for side, w in (("left", rp.left), ("right", rp.right)):
            s = hw.left_sector(i) if side == "left" else hw.right_sector(i)
            if s is None:
                if w:
                    raise MachineError(
                        f"rule {rule.name!r}: part {i} writes on its {side}, "
                        f"but there is no sector there")
                continue
            for a, _ in w.letters:
                if a not in rule.domains[s]:
                    raise MachineError(
                        f"rule {rule.name!r}: part {i} writes {a.name!r} "
                        f"outside the domain of sector {s}")


def invert_rule(rule: SRule) -> SRule:
    """The formal inverse: to -> left^-1 . frm . right^-1, same domains."""
    parts = [RulePart(p.to, p.frm, p.left.inverse(), p.right.inverse())
             for p in rule.parts]
    return SRule(rule.name, parts, rule.domains)


class AdmissibleWord:
    """An alternating word  q_0 w_0 q_1 w_1 ... q_m  of state letters
    (possibly inverted) and tape words, with consistent shapes.

    Consecutive state letters with signs (e, e') must sit in parts (k, k')
    bounding a common sector:

        (+, +): k' = k + 1, gap sector k;
        (-, -): k' = k - 1, gap sector k - 1;
        (+, -) and (-, +): the same letter of part k on both ends,
                gap sector k resp. k - 1;

    indices mod n_parts when the hardware is cyclic.  Tapes are stored
    freely reduced.
    """

    __slots__ = ("hw", "states", "tapes", "gap_sectors", "_key")

    def __init__(self, hw: Hardware, states, tapes):
        states = tuple(states)
        tapes = tuple(free_reduce(w) for w in tapes)
        if not states:
            raise MachineError("admissible word needs at least one state letter")
        if len(tapes) != len(states) - 1:
            raise MachineError(
                f"{len(states)} state letters need {len(states) - 1} tapes, "
                f"got {len(tapes)}")
        for a, e in states:
            if a not in hw.part_of:
                raise MachineError(f"{a.name!r} is not a state letter")
            if e not in (1, -1):
                raise MachineError(f"bad sign {e!r}")
        sectors = []
        for j in range(len(tapes)):
            sectors.append(_gap_sector(hw, states[j], states[j + 1], j))
        for j, w in enumerate(tapes):
            s = sectors[j]
            for a, _ in w.letters:
                if hw.sector_of.get(a) != s:
                    raise MachineError(
                        f"letter {a.name!r} in gap {j} does not belong to "
                        f"sector {s}")
        object.__setattr__(self, "hw", hw)
        object.__setattr__(self, "states", states)
        object.__setattr__(self, "tapes", tapes)
        object.__setattr__(self, "gap_sectors", tuple(sectors))
        object.__setattr__(self, "_key", None)

    def __setattr__(self, *a):
        raise AttributeError("AdmissibleWord is immutable")

    @property
    def base(self):
        """Part indices with signs, one per state letter."""
        return tuple((self.hw.part_of[a], e) for a, e in self.states)

    def to_word(self) -> Word:
        letters = [self.states[0]]
        for w, q in zip(self.tapes, self.states[1:]):
            letters.extend(w.letters)
            letters.append(q)
        return Word(letters)

    def tokens(self) -> str:
        return self.to_word().tokens()

    def tape_length(self) -> int:
        return sum(len(w) for w in self.tapes)

    def key(self):
        k = self._key
        if k is None:
            k = self.to_word().key()
            object.__setattr__(self, "_key", k)
        return k

    def __eq__(self, other):
        return (isinstance(other, AdmissibleWord) and self.hw is other.hw
                and self.key() == other.key())

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        return f"AdmissibleWord({self.tokens()})"

    def is_circular(self) -> bool:
        return len(self.states) > 1 and self.states[0] == self.states[-1]


def _gap_sector(hw: Hardware, left, right, j: int) -> int:
    (a, e), (b, f) = left, right
    k, l = hw.part_of[a], hw.part_of[b]
    n = hw.n_parts
    if e > 0 and f > 0:
        s = hw.right_sector(k)
        if s is None or l != (k + 1) % n or (k + 1 == n and not hw.cyclic):
            raise MachineError(
                f"positions {j},{j + 1}: {a.name} {b.name} do not bound a sector")
        return s
    if e < 0 and f < 0:
        s = hw.left_sector(k)
        if s is None or l != (k - 1) % n or (k == 0 and not hw.cyclic):
            raise MachineError(
                f"positions {j},{j + 1}: {a.name}^-1 {b.name}^-1 do not bound a sector")
        return s
    if a is not b:
        raise MachineError(
            f"positions {j},{j + 1}: mixed signs need the same state letter, "
            f"got {a.name} and {b.name}")
    s = hw.right_sector(k) if e > 0 else hw.left_sector(k)
    if s is None:
        raise MachineError(f"positions {j},{j + 1}: no sector on that side of {a.name}")
    return s


def parse_admissible(hw: Hardware, w: Union[Word, str]) -> AdmissibleWord:
    """Split a flat word into the alternating form, with positioned errors."""
    if isinstance(w, str):
        w = Word.from_tokens(w)
    states, tapes, cur = [], [], []
    for pos, (a, e) in enumerate(w.letters):
        if a in hw.part_of:
            if states:
                tapes.append(Word(cur))
                cur = []
            elif cur:
                raise MachineError(
                    f"position 0: admissible word must start with a state letter")
            states.append((a, e))
        elif a in hw.sector_of:
            if not states:
                raise MachineError(
                    f"position {pos}: tape letter {a.name!r} before any state letter")
            cur.append((a, e))
        else:
            raise MachineError(f"position {pos}: unknown letter {a.name!r}")
    if not states:
        raise MachineError("no state letters")
    if cur:
        raise MachineError("admissible word must end with a state letter")
    return AdmissibleWord(hw, states, tapes)


class ApplyOutcome:
    """Result of applying one rule, with trim diagnostics.

    ``stripped_prefix``/``stripped_suffix`` are the emissions of the two
    end letters that fell off the ends of the word (always whole words;
    they never interact with reduction inside the gaps).
    """

    __slots__ = ("ok", "result", "stripped_prefix", "stripped_suffix",
                 "reason", "position")

    def __init__(self, ok, result=None, stripped_prefix=EMPTY,
                 stripped_suffix=EMPTY, reason=None, position=None):
        self.ok = ok
        self.result = result
        self.stripped_prefix = stripped_prefix
        self.stripped_suffix = stripped_suffix
        self.reason = reason
        self.position = position

    def __bool__(self):
        return self.ok


def _emissions(rp: RulePart, sign: int):
    if sign > 0:
        return rp.left, (rp.to, 1), rp.right
    return rp.right.inverse(), (rp.to, -1), rp.left.inverse()


class Machine:
    """Hardware plus a set of named rules (and a free-form meta dict)."""

    def __init__(self, name: str, hw: Hardware, rules: Sequence[SRule], meta=None):
        self.name = name
        self.hw = hw
        self.rules = tuple(rules)
        self.rule_by_name: dict[str, SRule] = {}
        for r in self.rules:
            validate_rule(hw, r)
            if r.name in self.rule_by_name:
                raise MachineError(f"two rules named {r.name!r}")
            self.rule_by_name[r.name] = r
        self.meta = dict(meta or {})

    # Hardware shortcuts.
    @property
    def parts(self):
        return self.hw.parts

    @property
    def sector_alphabets(self):
        return self.hw.sector_alphabets

    @property
    def n_parts(self):
        return self.hw.n_parts

    @property
    def n_sectors(self):
        return self.hw.n_sectors

    @property
    def cyclic(self):
        return self.hw.cyclic

    @property
    def input_sectors(self):
        return self.hw.input_sectors

    def rule(self, name: str) -> SRule:
        try:
            return self.rule_by_name[name]
        except KeyError:
            raise MachineError(f"no rule named {name!r}") from None

    def signed_rules(self):
        """All (rule, sign) pairs in deterministic order."""
        out = []
        for r in sorted(self.rules, key=lambda r: r.name):
            out.append((r, 1))
            out.append((r, -1))
        return out

    # -- application -------------------------------------------------------

    def apply_ex(self, aw: AdmissibleWord, rule: SRule, sign: int = 1) -> ApplyOutcome:
        r = rule if sign > 0 else invert_rule(rule)
        part_of = self.hw.part_of
        for j, (a, e) in enumerate(aw.states):
            if r.parts[part_of[a]].frm is not a:
                return ApplyOutcome(
                    False, reason=f"state letter {a.name!r} does not match "
                    f"rule {rule.name!r}", position=j)
        for j, w in enumerate(aw.tapes):
            dom = r.domains[aw.gap_sectors[j]]
            for a, _ in w.letters:
                if a not in dom:
                    return ApplyOutcome(
                        False, reason=f"letter {a.name!r} in gap {j} outside "
                        f"the domain of rule {rule.name!r}", position=j)
        trip = [_emissions(r.parts[part_of[a]], e) for a, e in aw.states]
        states = [t[1] for t in trip]
        tapes = [trip[j][2] * aw.tapes[j] * trip[j + 1][0]
                 for j in range(len(aw.tapes))]
        result = AdmissibleWord(self.hw, states, tapes)
        return ApplyOutcome(True, result, stripped_prefix=trip[0][0],
                            stripped_suffix=trip[-1][2])

    def try_apply(self, aw, rule, sign=1) -> Optional[AdmissibleWord]:
        out = self.apply_ex(aw, rule, sign)
        return out.result if out.ok else None

    def apply(self, aw, rule, sign=1) -> AdmissibleWord:
        out = self.apply_ex(aw, rule, sign)
        if not out.ok:
            raise MachineError(f"cannot apply {rule.name!r}: {out.reason}")
        return out.result


def _as_steps(m: Machine, history) -> list[tuple[SRule, int]]:
    if isinstance(history, Word):
        return [(m.rule(a.name), s) for a, s in history.letters]
    steps = []
    for item in history:
        if isinstance(item, str):
            if item.endswith("^-1"):
                steps.append((m.rule(item[:-3]), -1))
            else:
                steps.append((m.rule(item), 1))
        else:
            r, s = item
            steps.append((r if isinstance(r, SRule) else m.rule(r), s))
    return steps


class Computation:
    """A start word and the sequence of configurations along a history."""

    def __init__(self, machine, start, steps, configs, ok=True,
                 failed_at=None, reason=None):
        self.machine = machine
        self.start = start
        self.steps = tuple(steps)
        self.configs = tuple(configs)
        self.ok = ok
        self.failed_at = failed_at
        self.reason = reason

    @property
    def end(self) -> AdmissibleWord:
        return self.configs[-1]

    def __len__(self):
        return len(self.steps)

    def history_word(self) -> Word:
        return Word(tuple((atom(r.name), s) for r, s in self.steps))

    def __repr__(self):
        status = "ok" if self.ok else f"failed at {self.failed_at}"
        return f"Computation({len(self)} steps, {status})"


def run(m: Machine, start: AdmissibleWord, history, strict: bool = True) -> Computation:
    """Apply a history (a word in the rules) from a start word.

    In strict mode an inapplicable step raises; otherwise the computation
    stops there and records the failure.
    """
    steps = _as_steps(m, history)
    configs = [start]
    done = []
    for i, (rule, sign) in enumerate(steps):
        out = m.apply_ex(configs[-1], rule, sign)
        if not out.ok:
            if strict:
                raise MachineError(
                    f"step {i} ({rule.name}^{sign}): {out.reason}")
            return Computation(m, start, done, configs, ok=False,
                               failed_at=i, reason=out.reason)
        done.append((rule, sign))
        configs.append(out.result)
    return Computation(m, start, done, configs)


# -- configurations --------------------------------------------------------


def _check_wrap(m: Machine, what: str) -> None:
    if m.cyclic and m.hw.sector_alphabets[m.n_parts - 1]:
        raise MachineError(
            f"{what} of a cyclic machine needs an empty wrap-sector alphabet")


def input_configuration(m: Machine, inputs=EMPTY) -> AdmissibleWord:
    """Start letters, given words in the input sectors, empty elsewhere.

    ``inputs`` may be a single Word (one input sector), a sequence
    aligned with ``input_sectors``, or a mapping from sector index.
    """
    _check_wrap(m, "a configuration")
    if isinstance(inputs, Word):
        if len(m.input_sectors) != 1:
            raise MachineError(
                f"machine has {len(m.input_sectors)} input sectors; "
                f"pass one word per sector")
        given = {m.input_sectors[0]: inputs}
    elif isinstance(inputs, Mapping):
        given = dict(inputs)
    else:
        inputs = tuple(inputs)
        if len(inputs) != len(m.input_sectors):
            raise MachineError(f"expected {len(m.input_sectors)} input words")
        given = dict(zip(m.input_sectors, inputs))
    for s in given:
        if s not in m.input_sectors:
            raise MachineError(f"sector {s} is not an input sector")
    n = m.n_parts
    states = [(p.start, 1) for p in m.parts]
    tapes = [given.get(s, EMPTY) for s in range(n - 1)]
    return AdmissibleWord(m.hw, states, tapes)


def accept_configuration(m: Machine) -> AdmissibleWord:
    """End letters, all tapes empty."""
    _check_wrap(m, "a configuration")
    return AdmissibleWord(m.hw, [(p.end, 1) for p in m.parts],
                          [EMPTY] * (m.n_parts - 1))


def cyclic_permute(aw: AdmissibleWord, offset: int) -> AdmissibleWord:
    """Rotate a circular admissible word (equal first and last letter)
    to start ``offset`` state letters later.  Tape letter counts are
    preserved; only the duplicated end letter moves.
    """
    if not aw.is_circular():
        raise MachineError("base not circular")
    m = len(aw.states) - 1
    j = offset % m
    states = aw.states[j:] + aw.states[1:j + 1]
    tapes = aw.tapes[j:] + aw.tapes[:j]
    return AdmissibleWord(aw.hw, states, tapes)


# -- derived machines ------------------------------------------------------


def restrict(m: Machine, lo: int, hi: int) -> Machine:
    """The machine on parts lo..hi (inclusive): writes that would leave the
    window are dropped, exactly as rule application trims them off the
    ends of an admissible word with that base."""
    if not (0 <= lo < hi < m.n_parts):
        raise MachineError(f"bad part range {lo}..{hi}")
    parts = m.parts[lo:hi + 1]
    alphabets = m.sector_alphabets[lo:hi]
    inputs = tuple(s - lo for s in m.input_sectors if lo <= s < hi)
    hw = Hardware(parts, alphabets, inputs, cyclic=False)
    rules = []
    for r in m.rules:
        rps = []
        for i in range(lo, hi + 1):
            p = r.parts[i]
            rps.append(RulePart(p.frm, p.to,
                                p.left if i > lo else EMPTY,
                                p.right if i < hi else EMPTY))
        rules.append(SRule(r.name, rps, r.domains[lo:hi]))
    return Machine(f"{m.name}[{lo}:{hi}]", hw, rules)


def normalize_rules(m: Machine) -> Machine:
    """Split every rule into a chain of rules writing at most one letter
    per side per part.

    A rule whose parts write words of lengths giving costs
    c_i = max(1, |left_i|, |right_i|) becomes a chain of
    1 + sum_i max(0, c_i - 1) rules: part i is active on a window of c_i
    consecutive chain positions, consecutive windows overlapping in one
    position, and emits one left letter (in order) and one right letter
    (in reverse order, since right words prepend) per active position.
    Fresh intermediate state letters are named ``{rule}%{position}%{part}``.
    """
    new_rules = []
    extra: dict[int, list[Atom]] = {i: [] for i in range(m.n_parts)}
    chains: dict[str, list[str]] = {}
    for r in m.rules:
        costs = [max(1, len(p.left), len(p.right)) for p in r.parts]
        total = 1 + sum(c - 1 for c in costs)
        if total == 1:
            new_rules.append(r)
            chains[r.name] = [r.name]
            continue
        starts = []
        pos = 1
        for c in costs:
            starts.append(pos)
            pos += c - 1

        def st(i, j):
            # state of part i after j chain steps
            if j < starts[i]:
                return r.parts[i].frm
            if j >= starts[i] + costs[i] - 1:
                return r.parts[i].to
            a = atom(f"{r.name}%{j}%{i}")
            if a not in extra[i] and a not in m.hw.parts[i].letters:
                extra[i].append(a)
            return a

        names = []
        for j in range(1, total + 1):
            rps = []
            for i in range(m.n_parts):
                left = right = EMPTY
                if starts[i] <= j <= starts[i] + costs[i] - 1:
                    p = j - starts[i] + 1
                    rp = r.parts[i]
                    if p <= len(rp.left):
                        left = Word([rp.left.letters[p - 1]])
                    if p <= len(rp.right):
                        right = Word([rp.right.letters[len(rp.right) - p]])
                rps.append(RulePart(st(i, j - 1), st(i, j), left, right))
            names.append(f"{r.name}%{j}")
            new_rules.append(SRule(names[-1], rps, r.domains))
        chains[r.name] = names
    parts = [StatePart(p.name, p.letters + tuple(extra[i]), p.start, p.end)
             for i, p in enumerate(m.parts)]
    hw = Hardware(parts, m.sector_alphabets, m.input_sectors, m.cyclic)
    meta = dict(m.meta)
    meta["normal_chains"] = chains
    return Machine(f"{m.name}.normal", hw, new_rules, meta)
