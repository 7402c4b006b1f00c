"""Machines with positive rules built from finite group presentations.

A presentation ⟨X | R⟩ is compiled into a three-part machine over the
doubled alphabet Y = X ∪ X~ (x~ is a fresh positive letter standing for
x^-1).  The first sector carries the working word, the second a primed
service copy.  Every rule writes positive letters only:

  sigma(y)   append y to the working tape and y' to the service tape;
  tau1(y)    append the trivial pair y·bar(y), entering the y-state;
  tau2(y)    leave the y-state again;
  rho(i,j)   append the j-th letter of the i-th positivized relator,
             stepping through a chain of relator states, so a relator is
             always written out in full;
  omega      lock both sectors and move to the final states.

An input configuration holding w is taken to the accept configuration
exactly when w represents the identity of the presented group.  The
h-invariant below (working tape times a state-dependent suffix times the
mirrored service tape) moves inside a single conjugacy class of that
group along any computation, which is what makes the converse direction
certifiable rule by rule.
"""
from __future__ import annotations

import json
import re
from typing import Iterable, Optional, Sequence

import jsonschema
from sympy import Matrix
from sympy.matrices.normalforms import hermite_normal_form

from smforge.machine import (AdmissibleWord, Hardware, Machine, RulePart,
                             StatePart, make_rule)
from smforge.search import BOUNDED, FOUND
from smforge.serialize import SCHEMA_VERSION, dumps_canonical
from smforge.words import (EMPTY, Atom, Word, atom, cyclic_min, free_reduce,
                           is_cyclically_reduced, symmetrized_closure)

IMPOSSIBLE = "impossible"


class EncodeError(ValueError):
    pass


# -- presentations ---------------------------------------------------------

PRESENTATION_SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "required": ["schema_version", "generators", "relators"],
    "properties": {
        "schema_version": {"const": SCHEMA_VERSION},
        "name": {"type": "string"},
        "generators": {"type": "array", "items": {"type": "string"}},
        "relators": {"type": "array", "items": {"type": "string"}},
    },
}


class GroupPresentation:
    """Generator atoms plus cyclically reduced relator words over them."""

    __slots__ = ("name", "generators", "relators")

    def __init__(self, generators, relators, name: str = "G"):
        gens = tuple(a if isinstance(a, Atom) else atom(a) for a in generators)
        if len(set(gens)) != len(gens):
            raise EncodeError("repeated generator")
        gset = set(gens)
        rels = []
        for r in relators:
            w = r if isinstance(r, Word) else Word.from_tokens(r)
            if not w:
                raise EncodeError("empty relator")
            if not is_cyclically_reduced(w):
                raise EncodeError(
                    f"relator {w.tokens()!r} is not cyclically reduced")
            stray = {a for a, _ in w} - gset
            if stray:
                raise EncodeError(
                    f"relator {w.tokens()!r} uses non-generators "
                    f"{sorted(a.name for a in stray)}")
            rels.append(w)
        self.name = name
        self.generators = gens
        self.relators = tuple(rels)

    def symmetrized(self) -> frozenset[Word]:
        return symmetrized_closure(self.relators)

    def word_vector(self, w: Word) -> tuple[int, ...]:
        """Exponent sums of w, one entry per generator."""
        index = {a: i for i, a in enumerate(self.generators)}
        out = [0] * len(self.generators)
        for a, s in w:
            if a not in index:
                raise EncodeError(f"{a.name!r} is not a generator")
            out[index[a]] += s
        return tuple(out)

    def to_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "name": self.name,
            "generators": [a.name for a in self.generators],
            "relators": [r.tokens() for r in self.relators],
        }

    @staticmethod
    def from_dict(doc: dict) -> "GroupPresentation":
        try:
            jsonschema.validate(doc, PRESENTATION_SCHEMA)
        except jsonschema.ValidationError as e:
            where = "/".join(str(p) for p in e.absolute_path) or "top level"
            raise EncodeError(f"bad presentation document at {where}: "
                              f"{e.message}") from None
        return GroupPresentation(doc["generators"], doc["relators"],
                                 name=doc.get("name", "G"))

    def dumps(self) -> str:
        return dumps_canonical(self.to_dict())

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8") as f:
            f.write(self.dumps())

    @staticmethod
    def load(path) -> "GroupPresentation":
        with open(path, encoding="utf-8") as f:
            return GroupPresentation.from_dict(json.load(f))

    def __repr__(self):
        return (f"<presentation {self.name}: {len(self.generators)} "
                f"generators, {len(self.relators)} relators>")


class DoubledAlphabet:
    """X together with the formal-inverse letters x~ and the primed
    service copies y'.  bar swaps x and x~; positivize rewrites a word
    over X as a positive word over Y."""

    __slots__ = ("base", "letters", "_bar", "_prime", "_unprime")

    def __init__(self, base: Iterable[Atom]):
        self.base = tuple(base)
        bars = tuple(atom(f"{x.name}~") for x in self.base)
        self.letters = self.base + bars
        self._bar = {}
        for x, xb in zip(self.base, bars):
            self._bar[x] = xb
            self._bar[xb] = x
        self._prime = {y: atom(f"{y.name}'") for y in self.letters}
        self._unprime = {v: k for k, v in self._prime.items()}

    def bar(self, y: Atom) -> Atom:
        try:
            return self._bar[y]
        except KeyError:
            raise EncodeError(f"{y.name!r} is not a doubled letter") from None

    def prime(self, y: Atom) -> Atom:
        return self._prime[y]

    def positivize(self, w: Word) -> Word:
        """Letter for letter: x stays, x^-1 becomes x~."""
        out = []
        for a, s in w:
            if a not in self._prime or a not in self._bar:
                raise EncodeError(f"{a.name!r} is not a doubled letter")
            out.append((a, 1) if s > 0 else (self._bar[a], 1))
        return Word(out)

    def unbar(self, w: Word) -> Word:
        """Back from Y to X: x~ becomes x^-1 (not reduced)."""
        base = set(self.base)
        out = []
        for a, s in w:
            if a in base:
                out.append((a, s))
            elif a in self._bar:
                out.append((self._bar[a], -s))
            else:
                raise EncodeError(f"{a.name!r} is not a doubled letter")
        return Word(out)

    def unprime(self, w: Word) -> Word:
        try:
            return Word((self._unprime[a], s) for a, s in w)
        except KeyError:
            raise EncodeError("service-tape word expected") from None

    def mirror(self, w: Word) -> Word:
        """Service tape read back over X."""
        return self.unbar(self.unprime(w))


def stored_relators(p: GroupPresentation) -> tuple[Word, ...]:
    """The relators and their inverses, deduplicated up to rotation."""
    seen = set()
    out = []
    for r in p.relators:
        for s in (r, free_reduce(r.inverse())):
            k = cyclic_min(s).key()
            if k not in seen:
                seen.add(k)
                out.append(s)
    return tuple(out)


def build_tilde_presentation(p: GroupPresentation) -> GroupPresentation:
    """The same group presented over Y: positivized relators plus the
    cancellation relators x·x~."""
    d = DoubledAlphabet(p.generators)
    rels = [d.positivize(r) for r in stored_relators(p)]
    rels += [Word.of(x, d.bar(x)) for x in p.generators]
    return GroupPresentation(d.letters, rels, name=f"{p.name}~")


# -- the encoder machine ---------------------------------------------------

_RESERVED = re.compile(r"s|f|[0-9]+(\.[0-9]+)?")


def presentation_to_machine(p: GroupPresentation,
                            name: Optional[str] = None) -> Machine:
    for x in p.generators:
        if _RESERVED.fullmatch(x.name):
            raise EncodeError(f"generator name {x.name!r} collides with the "
                              "state naming scheme")
    d = DoubledAlphabet(p.generators)
    stored = stored_relators(p)
    positive = tuple(d.positivize(r) for r in stored)

    parts = []
    for i in range(3):
        letters = [f"q{i}.s", f"q{i}.f"]
        letters += [f"q{i}.{y.name}" for y in d.letters]
        for ri, pr in enumerate(positive):
            letters += [f"q{i}.{ri}.{j}" for j in range(1, len(pr))]
        parts.append(StatePart(f"Q{i}", letters, f"q{i}.s", f"q{i}.f"))
    hw = Hardware(parts,
                  [list(d.letters), [d.prime(y) for y in d.letters]],
                  input_sectors=[0])

    rules = []
    for y in d.letters:
        rules.append(make_rule(hw, f"sigma({y.name})", [
            ("q0.s", "q0.s"),
            RulePart("q1.s", "q1.s", left=Word.of(y)),
            RulePart("q2.s", "q2.s", left=Word.of(d.prime(y)))]))
        rules.append(make_rule(hw, f"tau1({y.name})", [
            ("q0.s", f"q0.{y.name}"),
            RulePart("q1.s", f"q1.{y.name}", left=Word.of(y, d.bar(y))),
            ("q2.s", f"q2.{y.name}")]))
        rules.append(make_rule(hw, f"tau2({y.name})", [
            (f"q0.{y.name}", "q0.s"),
            (f"q1.{y.name}", "q1.s"),
            (f"q2.{y.name}", "q2.s")]))
    for ri, pr in enumerate(positive):
        n = len(pr)

        def st(i, j, _ri=ri, _n=n):
            return f"q{i}.s" if j in (0, _n) else f"q{i}.{_ri}.{j}"

        for j in range(1, n + 1):
            rules.append(make_rule(hw, f"rho({ri},{j})", [
                (st(0, j - 1), st(0, j)),
                RulePart(st(1, j - 1), st(1, j), left=Word(pr.letters[j - 1:j])),
                (st(2, j - 1), st(2, j))]))
    rules.append(make_rule(hw, "omega",
                           [("q0.s", "q0.f"), ("q1.s", "q1.f"),
                            ("q2.s", "q2.f")],
                           domains=[[], []]))

    meta = {"kind": "encoder", "presentation": p, "doubled": d,
            "stored": stored, "positive": positive}
    return Machine(name or f"encode.{p.name}", hw, rules, meta)


def _encoder_meta(m: Machine) -> dict:
    if m.meta.get("kind") != "encoder":
        raise EncodeError(f"{m.name!r} is not an encoder machine")
    return m.meta


def _column(aw: AdmissibleWord) -> str:
    """The shared state column of a configuration ('s', 'f', a letter
    name, or 'ri.j'); the three parts must agree."""
    if aw.base != ((0, 1), (1, 1), (2, 1)):
        raise EncodeError("standard three-part configuration expected")
    cols = []
    for i, (a, _) in enumerate(aw.states):
        head = f"q{i}."
        if not a.name.startswith(head):
            raise EncodeError(f"unexpected state letter {a.name!r}")
        cols.append(a.name[len(head):])
    if len(set(cols)) != 1:
        raise EncodeError(f"state columns out of step: {cols}")
    return cols[0]


def _state_suffix(meta: dict, col: str) -> Word:
    d = meta["doubled"]
    if col in ("s", "f") or any(y.name == col for y in d.letters):
        return EMPTY
    ri, j = col.split(".")
    return Word(meta["positive"][int(ri)].letters[int(j):])


def h_ext(m: Machine, aw: AdmissibleWord) -> Word:
    """The h-invariant of a configuration, as a reduced word over X:
    working tape, then the unfinished part of a relator being written,
    then the mirrored service tape reversed.  Its image in the presented
    group is the same at every step of a computation."""
    meta = _encoder_meta(m)
    d = meta["doubled"]
    col = _column(aw)
    t, v = aw.tapes
    return free_reduce(d.unbar(t * _state_suffix(meta, col))
                       * d.mirror(v).inverse())


def rule_h_defect(m: Machine, rule) -> Word:
    """How a single rule application moves h_ext, independently of the
    configuration: empty for all rules except the chain-opening rho
    rules, whose defect is the relator itself."""
    meta = _encoder_meta(m)
    d = meta["doubled"]
    if isinstance(rule, str):
        rule = m.rule(rule)
    for i in (0, 1):
        if rule.parts[i].right:
            raise EncodeError(f"{rule.name}: unexpected right write")
    col_f = rule.parts[0].frm.name[3:]
    col_t = rule.parts[0].to.name[3:]
    w = (rule.parts[1].left * _state_suffix(meta, col_t)
         * d.unprime(rule.parts[2].left).inverse()
         * _state_suffix(meta, col_f).inverse())
    return free_reduce(d.unbar(w))


def certify_h_invariance(m: Machine, max_area: int = 2,
                         max_len: Optional[int] = None) -> dict:
    """One area certificate per rule: each defect must die in the group.
    Returns {rule name: AreaResult}; raises if any rule resists the
    bound.  Together with an abelianized obstruction for a given input
    this rules out acceptance at every bound, not just the searched
    ones."""
    meta = _encoder_meta(m)
    p = meta["presentation"]
    out = {}
    for r in m.rules:
        res = area_oracle(p, rule_h_defect(m, r), max_area=max_area,
                          max_len=max_len)
        if res.status != FOUND:
            raise EncodeError(
                f"defect of {r.name} not certified ({res.status})")
        out[r.name] = res
    return out


# -- word problem oracles --------------------------------------------------

def abelianized_trivial(p: GroupPresentation, w: Word) -> bool:
    """Necessary condition for w = 1: its exponent vector lies in the
    lattice spanned by the relator vectors (Hermite-form comparison)."""
    if not p.generators:
        return not free_reduce(w)
    v = Matrix(len(p.generators), 1, list(p.word_vector(w)))
    cols = [p.word_vector(r) for r in p.relators]
    mat = Matrix(len(p.generators), len(cols),
                 lambda i, j: cols[j][i])
    return hermite_normal_form(mat.row_join(v)) == hermite_normal_form(mat)


class AreaResult:
    """Outcome of the insertion search: ``found`` carries the cell count
    and the insertion path; ``impossible`` is an abelianized refutation;
    ``bound-limited`` is a shrug."""

    __slots__ = ("status", "area", "steps", "words", "explored")

    def __init__(self, status, area=None, steps=(), words=(), explored=0):
        self.status = status
        self.area = area
        self.steps = tuple(steps)
        self.words = tuple(words)
        self.explored = explored

    @property
    def found(self) -> bool:
        return self.status == FOUND

    def __repr__(self):
        extra = f" area={self.area}" if self.found else ""
        return f"<area {self.status}{extra} explored={self.explored}>"


def area_oracle(p: GroupPresentation, w: Word, max_area: int,
                max_len: Optional[int] = None,
                moves: str = "symmetrized") -> AreaResult:
    """Least number of relator insertions taking w to the empty word.

    Breadth-first from w: insert one relator (the symmetrized closure,
    or just the stored ones) at any position, reduce, repeat.  All three
    outcomes are sound; only ``found`` and ``impossible`` are
    conclusive."""
    w = free_reduce(w)
    if not w:
        return AreaResult(FOUND, 0, (), (w,))
    if not abelianized_trivial(p, w):
        return AreaResult(IMPOSSIBLE)
    if moves == "symmetrized":
        ins = sorted(p.symmetrized(), key=lambda v: v.sort_key())
    elif moves == "stored":
        ins = list(stored_relators(p))
    else:
        raise EncodeError(f"unknown move set {moves!r}")
    if max_len is None:
        max_len = len(w) + 2 * max((len(r) for r in p.relators), default=1)

    # parent map: key -> (parent key, inserted word, position, word)
    info = {w.key(): (None, None, None, w)}
    frontier = [w]
    explored = 0
    for depth in range(1, max_area + 1):
        new = []
        for u in frontier:
            for s in ins:
                # right-to-left: end-of-word insertions realize cheapest
                for pos in range(len(u), -1, -1):
                    v = free_reduce(Word(u.letters[:pos]) * s
                                    * Word(u.letters[pos:]))
                    explored += 1
                    if len(v) > max_len or v.key() in info:
                        continue
                    info[v.key()] = (u.key(), s, pos, v)
                    if not v:
                        steps, words = [], [v]
                        k = v.key()
                        while info[k][0] is not None:
                            parent, s_, p_, w_ = info[k]
                            steps.append((s_, p_))
                            words.append(info[parent][3])
                            k = parent
                        steps.reverse()
                        words.reverse()
                        return AreaResult(FOUND, depth, steps, words,
                                          explored)
                    new.append(v)
        frontier = new
        if not frontier:
            break
    return AreaResult(BOUNDED, explored=explored)


# -- canonical computations ------------------------------------------------

def _sig(name: str, sign: int):
    return (atom(name), sign)


def positivizing_computation(m: Machine, w: Word) -> Word:
    """History taking (w, ε) to (positivize(w), ε): peel the signed
    spelling off while writing the positive one.  Empty for positive w."""
    meta = _encoder_meta(m)
    d = meta["doubled"]
    base = set(d.base)
    pre, post = [], []
    for a, s in free_reduce(w):
        if a not in base:
            raise EncodeError(f"{a.name!r} is not an input letter")
        z = a if s > 0 else d.bar(a)
        post.append(_sig(f"sigma({z.name})", 1))
        if s > 0:
            block = [_sig(f"sigma({z.name})", -1)]
        else:
            block = [_sig(f"tau1({a.name})", 1), _sig(f"tau2({a.name})", 1),
                     _sig(f"sigma({z.name})", -1)]
        pre = block + pre
    return free_reduce(Word(pre + post))


def _mo(d: DoubledAlphabet, c: Atom):
    """Move the trailing positive letter c from the working tape onto the
    service stack (record bar(c))."""
    cb = d.bar(c)
    return [_sig(f"tau2({cb.name})", -1), _sig(f"tau1({cb.name})", -1),
            _sig(f"sigma({cb.name})", 1)]


def _mi_restore(d: DoubledAlphabet, rec: Atom):
    return [_sig(f"sigma({rec.name})", -1), _sig(f"tau1({rec.name})", 1),
            _sig(f"tau2({rec.name})", 1)]


def _mi_cancel(rec: Atom):
    return [_sig(f"sigma({rec.name})", -1)]


def _tau_del(y: Atom):
    return [_sig(f"tau2({y.name})", -1), _sig(f"tau1({y.name})", -1)]


def _rho_chain(ri: int, n: int, sign: int):
    names = [f"rho({ri},{j})" for j in range(1, n + 1)]
    if sign > 0:
        return [_sig(nm, 1) for nm in names]
    return [_sig(nm, -1) for nm in reversed(names)]


def _cancel_depth(a: Word, s: Word) -> int:
    k = 0
    la, ls = a.letters, s.letters
    while (k < len(la) and k < len(ls)
           and la[len(la) - 1 - k] == (ls[k][0], -ls[k][1])):
        k += 1
    return k


def _realize_insertion(meta: dict, u: Word, s: Word, pos: int) -> list:
    """History fragment realizing one insertion step u -> reduce(u[:pos]
    · s · u[pos:]) on the positive working tape.  Exactly one rho block
    per call."""
    d = meta["doubled"]
    index = {t.key(): i for i, t in enumerate(meta["stored"])}
    a, c = Word(u.letters[:pos]), Word(u.letters[pos:])
    tape = [x for x, _ in d.positivize(u)]
    out, stack = [], []

    def mo_last():
        x = tape.pop()
        out.extend(_mo(d, x))
        stack.append(d.bar(x))

    for _ in range(len(c)):
        mo_last()
    k = _cancel_depth(a, s)
    sinv = free_reduce(s.inverse())
    if k == len(s) and sinv.key() in index:
        # the whole relator cancels into a literal suffix: delete it
        ri = index[sinv.key()]
        out.extend(_rho_chain(ri, len(meta["positive"][ri]), -1))
        del tape[len(tape) - len(s):]
    else:
        if s.key() not in index:
            raise EncodeError(f"{s.tokens()!r} is not a stored relator")
        ri = index[s.key()]
        pr = meta["positive"][ri]
        out.extend(_rho_chain(ri, len(pr), 1))
        tape.extend(x for x, _ in pr)
        if k > 0:
            # expose the innermost cancelling pair, drop it, and let the
            # pop loop below cascade through the rest
            for _ in range(len(s) - 1):
                mo_last()
            y = tape[-2]
            assert tape[-1] == d.bar(y)
            out.extend(_tau_del(y))
            del tape[-2:]
    while stack:
        rec = stack.pop()
        if tape and tape[-1] == rec:
            out.extend(_mi_cancel(rec))
            tape.pop()
        else:
            out.extend(_mi_restore(d, rec))
            tape.append(d.bar(rec))
    expect = free_reduce(a * s * c)
    assert tape == [x for x, _ in meta["doubled"].positivize(expect)]
    return out


def emulation_history(m: Machine, w: Word,
                      steps: Optional[Sequence] = None,
                      max_area: int = 8,
                      max_len: Optional[int] = None) -> Word:
    """An accepting history for an input representing the identity:
    positivize, realize each insertion of the derivation, close with
    omega.  Raises when no derivation is found within the bounds."""
    meta = _encoder_meta(m)
    p = meta["presentation"]
    w = free_reduce(w)
    if steps is None:
        res = area_oracle(p, w, max_area=max_area, max_len=max_len,
                          moves="stored")
        if res.status != FOUND:
            raise EncodeError(f"no derivation of {w.tokens()!r} within "
                              f"bounds ({res.status})")
        steps = res.steps
    hist = list(positivizing_computation(m, w))
    u = w
    for s, pos in steps:
        hist.extend(_realize_insertion(meta, u, s, pos))
        u = free_reduce(Word(u.letters[:pos]) * s * Word(u.letters[pos:]))
    if u:
        raise EncodeError("derivation does not end at the empty word")
    hist.append(_sig("omega", 1))
    return free_reduce(Word(hist))


def history_block_count(m: Machine, h: Word) -> dict:
    """Completed blocks in a (freely reduced) history.  The state chains
    force tau and rho blocks to run to completion, so counting the
    opening rule of each suffices; the rho count is the number of
    relator applications."""
    meta = _encoder_meta(m)
    positive = meta["positive"]
    rho_open = {f"rho({ri},1)" for ri in range(len(positive))}
    rho_close = {f"rho({ri},{len(pr)})" for ri, pr in enumerate(positive)}
    counts = {"sigma": 0, "tau": 0, "rho": 0, "omega": 0}
    for a, s in free_reduce(h):
        n = a.name
        if n.startswith("sigma("):
            counts["sigma"] += 1
        elif n == "omega":
            counts["omega"] += 1
        elif n.startswith("tau1(") and s > 0:
            counts["tau"] += 1
        elif n.startswith("tau2(") and s < 0:
            counts["tau"] += 1
        elif s > 0 and n in rho_open:
            counts["rho"] += 1
        elif s < 0 and n in rho_close:
            counts["rho"] += 1
    return counts
