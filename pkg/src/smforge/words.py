"""Free-group words over interned atoms.

Atoms are the indivisible symbols everything else is built from: tape
letters, state letters, rule letters in presentations.  They are interned
globally by name, so two alphabets that mention the same name share the
same atom.  A Word is an immutable sequence of signed atoms; nothing here
reduces automatically, free reduction is always an explicit step.
"""
from __future__ import annotations

from typing import Iterable, Iterator, Mapping


class WordError(ValueError):
    pass


class Atom:
    """An interned symbol.  Compare and hash by identity."""

    __slots__ = ("id", "name")

    def __init__(self, id: int, name: str):
        self.id = id
        self.name = name

    def __repr__(self):
        return f"Atom({self.name})"

    def __hash__(self):
        return self.id

    def __eq__(self, other):
        return self is other

    # Deterministic ordering helper (by name, then id for safety).
    def _key(self):
        return (self.name, self.id)


_REGISTRY: dict[str, Atom] = {}


def atom(name: str) -> Atom:
    """Return the unique atom with this display name, creating it if new."""
    if not name:
        raise WordError("atom name must be nonempty")
    if any(c.isspace() for c in name) or "^" in name:
        raise WordError(f"atom name {name!r} may not contain whitespace or '^'")
    a = _REGISTRY.get(name)
    if a is None:
        a = Atom(len(_REGISTRY) + 1, name)
        _REGISTRY[name] = a
    return a


def atoms(names: Iterable[str]) -> tuple[Atom, ...]:
    return tuple(atom(n) for n in names)


Letter = tuple[Atom, int]

EMPTY_TOKEN = "ε"  # ε


class Word:
    """Immutable word in the free group on the atom registry.

    Letters are (atom, sign) pairs with sign in {+1, -1}.  Multiplication
    concatenates without reducing; use .reduced() or free_reduce().
    """

    __slots__ = ("letters",)

    def __init__(self, letters: Iterable[Letter] = ()):
        letters = tuple(letters)
        for a, s in letters:
            if not isinstance(a, Atom) or s not in (1, -1):
                raise WordError(f"bad letter {(a, s)!r}")
        object.__setattr__(self, "letters", letters)

    def __setattr__(self, *a):
        raise AttributeError("Word is immutable")

    # -- construction ------------------------------------------------------

    @staticmethod
    def of(*items) -> "Word":
        """Build a word from atoms, names, or (atom, sign) pairs."""
        letters = []
        for it in items:
            if isinstance(it, tuple):
                a, s = it
                letters.append((a if isinstance(a, Atom) else atom(a), s))
            elif isinstance(it, Atom):
                letters.append((it, 1))
            else:
                letters.append((atom(it), 1))
        return Word(letters)

    @staticmethod
    def from_tokens(text: str) -> "Word":
        """Parse the serialization format: space-separated tokens, each
        ``name`` or ``name^-1``; the single token ε denotes the empty word."""
        text = text.strip()
        if text == "" or text == EMPTY_TOKEN:
            return Word()
        letters = []
        for tok in text.split():
            if tok.endswith("^-1"):
                letters.append((atom(tok[:-3]), -1))
            elif "^" in tok:
                raise WordError(f"bad token {tok!r}")
            else:
                letters.append((atom(tok), 1))
        return Word(letters)

    def tokens(self) -> str:
        if not self.letters:
            return EMPTY_TOKEN
        return " ".join(a.name if s > 0 else f"{a.name}^-1" for a, s in self.letters)

    # -- algebra -----------------------------------------------------------

    def __mul__(self, other: "Word") -> "Word":
        return Word(self.letters + other.letters)

    def inverse(self) -> "Word":
        return Word(tuple((a, -s) for a, s in reversed(self.letters)))

    def reduced(self) -> "Word":
        return free_reduce(self)

    def is_reduced(self) -> bool:
        for i in range(len(self.letters) - 1):
            a, s = self.letters[i]
            b, t = self.letters[i + 1]
            if a is b and s == -t:
                return False
        return True

    def conjugate_by(self, g: "Word") -> "Word":
        return g * self * g.inverse()

    # -- views -------------------------------------------------------------

    def __len__(self):
        return len(self.letters)

    def __iter__(self) -> Iterator[Letter]:
        return iter(self.letters)

    def __getitem__(self, i):
        if isinstance(i, slice):
            return Word(self.letters[i])
        return self.letters[i]

    def __bool__(self):
        return bool(self.letters)

    def __eq__(self, other):
        return isinstance(other, Word) and self.letters == other.letters

    def __hash__(self):
        return hash(self.letters)

    def __repr__(self):
        return f"Word({self.tokens()})"

    def key(self) -> tuple[int, ...]:
        """Fast hashable key: signed atom ids."""
        return tuple(a.id * s for a, s in self.letters)

    def sort_key(self):
        return (len(self.letters), tuple((a.name, -s) for a, s in self.letters))


EMPTY = Word()


def free_reduce(w: Word) -> Word:
    """Free reduction by a single stack pass."""
    out: list[Letter] = []
    for a, s in w.letters:
        if out and out[-1][0] is a and out[-1][1] == -s:
            out.pop()
        else:
            out.append((a, s))
    return Word(out)


def rotations(w: Word) -> list[Word]:
    if not w:
        return [w]
    return [Word(w.letters[i:] + w.letters[:i]) for i in range(len(w))]


def is_cyclically_reduced(w: Word) -> bool:
    if not w.is_reduced():
        return False
    if len(w) >= 2:
        (a, s), (b, t) = w.letters[-1], w.letters[0]
        if a is b and s == -t:
            return False
    return True


def cyclic_min(w: Word) -> Word:
    """Canonical representative of the rotation class (lexicographic minimum)."""
    return min(rotations(w), key=lambda v: v.sort_key())


def symmetrized_closure(relators: Iterable[Word]) -> frozenset[Word]:
    """All cyclic permutations of the relators and their inverses.

    Every relator must be cyclically reduced and nonempty.
    """
    out = set()
    for r in relators:
        if not r:
            raise WordError("empty relator")
        if not is_cyclically_reduced(r):
            raise WordError(f"relator {r.tokens()!r} is not cyclically reduced")
        for v in (r, r.inverse()):
            out.update(rotations(v))
    return frozenset(out)


class AlphabetMorphism:
    """An injective atom-to-atom map, applied letterwise to words."""

    def __init__(self, mapping: Mapping[Atom, Atom]):
        self.mapping = dict(mapping)
        if len(set(self.mapping.values())) != len(self.mapping):
            raise WordError("alphabet morphism is not injective")

    def __getitem__(self, a: Atom) -> Atom:
        return self.mapping[a]

    def __call__(self, w: Word) -> Word:
        try:
            return Word(tuple((self.mapping[a], s) for a, s in w.letters))
        except KeyError as e:
            raise WordError(f"letter {e.args[0]!r} outside morphism domain") from None

    def inverse(self) -> "AlphabetMorphism":
        return AlphabetMorphism({v: k for k, v in self.mapping.items()})

    def domain(self) -> frozenset[Atom]:
        return frozenset(self.mapping)


def copy_alphabet(base: Iterable[Atom], fmt: str) -> AlphabetMorphism:
    """Deterministic renaming copy of an alphabet, e.g. fmt='{}#1'."""
    return AlphabetMorphism({a: atom(fmt.format(a.name)) for a in base})


def copy_word(w: Word, m: AlphabetMorphism) -> Word:
    return m(w)


def reduced_words(alphabet: Iterable[Atom], max_len: int) -> Iterator[Word]:
    """All reduced words of length <= max_len, in deterministic order."""
    sigs = []
    for a in sorted(alphabet, key=lambda x: x._key()):
        sigs.extend([(a, 1), (a, -1)])
    frontier = [()]
    yield Word()
    for _ in range(max_len):
        nxt = []
        for tup in frontier:
            for let in sigs:
                if tup and tup[-1][0] is let[0] and tup[-1][1] == -let[1]:
                    continue
                new = tup + (let,)
                nxt.append(new)
                yield Word(new)
        frontier = nxt
