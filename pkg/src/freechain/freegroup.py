"""Reduced words in a free group and enumeration of a-starting conjugacy classes.

Generators are indexed ``0 .. d-1`` and named ``a, b, c1, ..., c(d-2)``.  Words
are immutable tuples of :class:`Letter`, always kept freely reduced.  The total
letter order used for every lexicographic comparison is

    a < b < c1 < ... < a' < b' < c1' < ...

(all generators in index order, then all inverses in index order).
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Iterator, NamedTuple, Sequence

__all__ = [
    "Alphabet",
    "Letter",
    "Word",
    "ClassList",
    "reduce",
    "invert",
    "multiply",
    "cyclic_reduce",
    "conjugacy_key",
    "key_and_conjugator",
    "iter_reduced_words",
    "iter_a_class_reps",
    "enumerate_a_class_reps",
    "class_index",
]

A, B = 0, 1


def generator_name(index: int) -> str:
    if index == A:
        return "a"
    if index == B:
        return "b"
    return f"c{index - 1}"


class Letter(NamedTuple):
    generator: int
    inverted: bool = False

    @property
    def sort_key(self) -> tuple[bool, int]:
        return (self.inverted, self.generator)

    def inverse(self) -> "Letter":
        return Letter(self.generator, not self.inverted)

    def __str__(self) -> str:
        return generator_name(self.generator) + ("'" if self.inverted else "")


@dataclass(frozen=True)
class Alphabet:
    """The fixed generating set ``a, b, c1, ..., c(d-2)`` of ``F_d``."""

    d: int

    def __post_init__(self):
        if self.d < 2:
            raise ValueError(f"rank must be at least 2, got {self.d}")

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(generator_name(i) for i in range(self.d))

    @cached_property
    def letters(self) -> tuple[Letter, ...]:
        """All 2d letters in the fixed total order."""
        return tuple(Letter(g, False) for g in range(self.d)) + tuple(
            Letter(g, True) for g in range(self.d)
        )

    def letter_column(self, letter: Letter) -> int:
        """Position of ``letter`` in :attr:`letters` (generators, then inverses)."""
        return letter.generator + (self.d if letter.inverted else 0)

    def index_of(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise ValueError(f"unknown generator {name!r} for rank {self.d}") from None

    def parse(self, text: str) -> "Word":
        """Parse word text such as ``"a b c1' a"``; an apostrophe marks an inverse.

        The result is freely reduced.  Whitespace between tokens is optional.
        """
        letters = []
        pos = 0
        for m in _TOKEN.finditer(text):
            if text[pos:m.start()].strip():
                raise ValueError(f"cannot parse word {text!r} at offset {pos}")
            letters.append(Letter(self.index_of(m.group(1)), bool(m.group(2))))
            pos = m.end()
        if text[pos:].strip():
            raise ValueError(f"cannot parse word {text!r} at offset {pos}")
        return reduce(letters)

    def format(self, word: "Word") -> str:
        for letter in word:
            if letter.generator >= self.d:
                raise ValueError(f"letter {letter} outside alphabet of rank {self.d}")
        return str(word)


_TOKEN = re.compile(r"\s*(a|b|c\d+)('?)")


class Word:
    """An element of the free group, stored as a freely reduced letter tuple.

    Build words through :func:`reduce`, :meth:`Alphabet.parse` or the
    group operations; the constructor trusts its input to be reduced.
    """

    __slots__ = ("letters",)

    def __init__(self, letters: Iterable[Letter] = ()):
        object.__setattr__(self, "letters", tuple(letters))

    def __setattr__(self, name, value):
        raise AttributeError("Word is immutable")

    def __len__(self) -> int:
        return len(self.letters)

    def __iter__(self) -> Iterator[Letter]:
        return iter(self.letters)

    def __getitem__(self, item):
        if isinstance(item, slice):
            return Word(self.letters[item])
        return self.letters[item]

    def __eq__(self, other) -> bool:
        return isinstance(other, Word) and self.letters == other.letters

    def __hash__(self) -> int:
        return hash(self.letters)

    def __mul__(self, other: "Word") -> "Word":
        return multiply(self, other)

    def __invert__(self) -> "Word":
        return invert(self)

    def __pow__(self, n: int) -> "Word":
        base = self if n >= 0 else invert(self)
        out = Word()
        for _ in range(abs(n)):
            out = multiply(out, base)
        return out

    def __repr__(self) -> str:
        return f"Word({str(self)!r})"

    def __str__(self) -> str:
        return " ".join(str(letter) for letter in self.letters)

    @property
    def lex_key(self) -> tuple:
        return tuple(letter.sort_key for letter in self.letters)

    @property
    def length_lex_key(self) -> tuple:
        return (len(self.letters), self.lex_key)

    def is_identity(self) -> bool:
        return not self.letters

    def is_cyclically_reduced(self) -> bool:
        return len(self.letters) < 2 or self.letters[0] != self.letters[-1].inverse()


def reduce(tokens: Iterable[Letter]) -> Word:
    """Freely reduce a letter sequence."""
    stack: list[Letter] = []
    for letter in tokens:
        letter = Letter(*letter)
        if stack and stack[-1] == letter.inverse():
            stack.pop()
        else:
            stack.append(letter)
    return Word(stack)


def invert(w: Word) -> Word:
    return Word(letter.inverse() for letter in reversed(w.letters))


def multiply(u: Word, v: Word) -> Word:
    left, right = u.letters, v.letters
    i = 0
    n = min(len(left), len(right))
    while i < n and left[len(left) - 1 - i] == right[i].inverse():
        i += 1
    return Word(left[: len(left) - i] + right[i:])


def cyclic_reduce(w: Word) -> tuple[Word, Word]:
    """Split ``w`` as ``conjugator * core * conjugator^-1`` with ``core`` cyclically reduced."""
    letters = w.letters
    i, j = 0, len(letters) - 1
    while i < j and letters[i] == letters[j].inverse():
        i += 1
        j -= 1
    return Word(letters[i : j + 1]), Word(letters[:i])


def key_and_conjugator(w: Word) -> tuple[Word, Word]:
    """Return ``(key, g)`` with ``w == g * key * g^-1`` and ``key = conjugacy_key(w)``."""
    if w.is_identity():
        raise ValueError("no conjugacy key for identity")
    core, outer = cyclic_reduce(w)
    letters = core.letters
    best = min(range(len(letters)), key=lambda s: Word(letters[s:] + letters[:s]).lex_key)
    key = Word(letters[best:] + letters[:best])
    # core = head * key * head^-1 where head = letters[:best]
    return key, multiply(outer, Word(letters[:best]))


def conjugacy_key(w: Word) -> Word:
    """Canonical representative of the conjugacy class of ``w``.

    The lexicographically least cyclic rotation of the cyclic reduction of ``w``.
    """
    return key_and_conjugator(w)[0]


def iter_reduced_words(alphabet: Alphabet, length: int, prefix: Sequence[Letter] = ()) -> Iterator[Word]:
    """Reduced words of exactly ``length`` letters extending ``prefix``, in lex order."""
    prefix = tuple(prefix)
    if len(prefix) > length:
        return

    def extend(acc: list[Letter]) -> Iterator[Word]:
        if len(acc) == length:
            yield Word(acc)
            return
        for letter in alphabet.letters:
            if acc and acc[-1] == letter.inverse():
                continue
            acc.append(letter)
            yield from extend(acc)
            acc.pop()

    yield from extend(list(prefix))


def iter_words_up_to(alphabet: Alphabet, max_length: int, include_identity: bool = False) -> Iterator[Word]:
    """All reduced words of length at most ``max_length`` in length-lex order."""
    for length in range(0 if include_identity else 1, max_length + 1):
        yield from iter_reduced_words(alphabet, length)


@dataclass(frozen=True)
class ClassList:
    """Class representatives ``w_1, w_2, ...``; each starts with ``a``."""

    alphabet: Alphabet
    reps: tuple[Word, ...]

    @property
    def lengths(self) -> tuple[int, ...]:
        return tuple(len(w) for w in self.reps)

    @cached_property
    def keys(self) -> tuple[Word, ...]:
        return tuple(conjugacy_key(w) for w in self.reps)

    def __len__(self) -> int:
        return len(self.reps)

    def index_of_key(self, key: Word) -> int | None:
        """1-based position of the rep whose class key is ``key``, if present."""
        for i, k in enumerate(self.keys, start=1):
            if k == key:
                return i
        return None


def iter_a_class_reps(alphabet: Alphabet) -> Iterator[Word]:
    """Infinite stream of new-class a-starting words in length-lex order."""
    seen: set[Word] = set()
    length = 1
    start = (Letter(A, False),)
    while True:
        for w in iter_reduced_words(alphabet, length, start):
            key = conjugacy_key(w)
            if key not in seen:
                seen.add(key)
                yield w
        length += 1


def enumerate_a_class_reps(alphabet: Alphabet, count: int) -> ClassList:
    if count < 1:
        raise ValueError("count must be at least 1")
    reps = []
    for w in iter_a_class_reps(alphabet):
        reps.append(w)
        if len(reps) == count:
            break
    return ClassList(alphabet, tuple(reps))


def class_index(alphabet: Alphabet, w: Word, limit: int = 100_000) -> tuple[int, bool]:
    """Locate the rep conjugate to ``w`` or to ``w^-1``.

    Returns ``(m, inverted)``: the 1-based index of the first rep whose key
    matches, and whether the match was through ``w^-1``.  Every nontrivial
    class meets the list this way, since a cyclically reduced word, its
    inverse, or a conjugate ``a x a^-1`` starts with ``a``.
    """
    key = conjugacy_key(w)
    inv_key = conjugacy_key(invert(w))
    for m, rep in enumerate(iter_a_class_reps(alphabet), start=1):
        rk = conjugacy_key(rep)
        if rk == key:
            return m, False
        if rk == inv_key:
            return m, True
        if m >= limit:
            break
    raise LookupError(f"class of {w} not found among the first {limit} reps")
