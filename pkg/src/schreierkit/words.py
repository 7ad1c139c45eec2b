"""Reduced words in free products of copies of Z and Z/2Z.

A letter is a pair ``(symbol_index, sign)`` with ``sign`` in ``{1, -1}``.
Letters of order-2 symbols always carry ``sign == 1`` since such a symbol
is its own inverse.  A word is a tuple of letters.

Text form: whitespace separated letters, ``x^-1`` for a negative letter,
``x^k`` accepted on input as shorthand for ``k`` copies of ``x``.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from typing import Iterable, NamedTuple

INF = "inf"
ORDER2 = "2"


class MalformedInput(ValueError):
    """Raised on words, letters or alphabets that cannot be interpreted."""


class Letter(NamedTuple):
    index: int
    sign: int = 1

    def sort_key(self) -> tuple[int, int]:
        # positive letter before its inverse
        return (self.index, 0 if self.sign > 0 else 1)


Word = tuple  # tuple[Letter, ...]
EMPTY: Word = ()


@dataclass(frozen=True)
class Alphabet:
    """Ordered generating system ``X`` of a group of the form (*).

    ``symbols`` is a tuple of ``(name, order)`` with order ``"inf"`` or ``"2"``.
    Repeated generators are modelled as distinct symbols; give them distinct
    names (``a``, ``a#2``) so that words stay parseable.
    """

    symbols: tuple[tuple[str, str], ...]

    def __post_init__(self):
        names = [name for name, _ in self.symbols]
        if len(set(names)) != len(names):
            raise MalformedInput(f"duplicate symbol names in {names}")
        for name, order in self.symbols:
            if order not in (INF, ORDER2):
                raise MalformedInput(f"symbol {name!r}: order must be 'inf' or '2', got {order!r}")
            if not name or any(ch.isspace() for ch in name) or "^" in name:
                raise MalformedInput(f"bad symbol name {name!r}")

    @classmethod
    def of(cls, infinite: Iterable[str] = (), order2: Iterable[str] = ()) -> "Alphabet":
        """Infinite-order symbols first, then the involutions."""
        syms = [(n, INF) for n in infinite] + [(n, ORDER2) for n in order2]
        return cls(tuple(syms))

    def __len__(self) -> int:
        return len(self.symbols)

    @property
    def degree(self) -> int:
        """#order-2 symbols + 2 * #infinite symbols."""
        return sum(1 if order == ORDER2 else 2 for _, order in self.symbols)

    def is_order2(self, index: int) -> bool:
        return self.symbols[index][1] == ORDER2

    def name(self, index: int) -> str:
        return self.symbols[index][0]

    def index_of(self, name: str) -> int:
        for i, (n, _) in enumerate(self.symbols):
            if n == name:
                return i
        raise MalformedInput(f"unknown symbol {name!r}")

    def letters(self) -> list[Letter]:
        """The set X^{+-} in the global (index, sign) order."""
        out = []
        for i, (_, order) in enumerate(self.symbols):
            out.append(Letter(i, 1))
            if order == INF:
                out.append(Letter(i, -1))
        return out

    def letter(self, index: int, sign: int = 1) -> Letter:
        if not 0 <= index < len(self.symbols):
            raise MalformedInput(f"symbol index {index} out of range")
        if self.is_order2(index):
            return Letter(index, 1)
        return Letter(index, 1 if sign > 0 else -1)

    def inverse(self, letter: Letter) -> Letter:
        if self.is_order2(letter.index):
            return letter
        return Letter(letter.index, -letter.sign)

    # -- text / json -------------------------------------------------------

    def format_letter(self, letter: Letter) -> str:
        name = self.name(letter.index)
        return name if letter.sign > 0 else name + "^-1"

    def format_word(self, word: Word) -> str:
        return " ".join(self.format_letter(l) for l in word)

    def parse_letter(self, token: str) -> Letter:
        word = self.parse_word(token)
        if len(word) != 1:
            raise MalformedInput(f"{token!r} is not a single letter")
        return word[0]

    def parse_word(self, text: str) -> Word:
        """Parse ``"x a x^-1 x^-2"``.  The result is not normalized."""
        out = []
        for token in text.split():
            m = re.fullmatch(r"(.+?)(?:\^(-?\d+))?", token)
            name, exp = m.group(1), m.group(2)
            if name in ("1", "e", "ε"):
                continue
            i = self.index_of(name)
            k = 1 if exp is None else int(exp)
            if self.is_order2(i):
                out.extend([Letter(i, 1)] * abs(k))
            else:
                out.extend([Letter(i, 1 if k > 0 else -1)] * abs(k))
        return tuple(out)

    def to_json(self) -> dict:
        return {"symbols": [{"name": n, "order": o} for n, o in self.symbols]}

    @classmethod
    def from_json(cls, data) -> "Alphabet":
        if isinstance(data, str):
            data = json.loads(data)
        try:
            return cls(tuple((str(s["name"]), str(s["order"])) for s in data["symbols"]))
        except (KeyError, TypeError) as exc:
            raise MalformedInput(f"bad alphabet json: {exc}") from exc


def _check(A: Alphabet, word: Iterable[Letter]) -> None:
    for l in word:
        if not 0 <= l.index < len(A.symbols):
            raise MalformedInput(f"letter {l} references unknown symbol")
        if l.sign not in (1, -1) or (A.is_order2(l.index) and l.sign != 1):
            raise MalformedInput(f"letter {l} has invalid sign")


def normalize(A: Alphabet, word: Iterable[Letter]) -> Word:
    """Free reduction; ``y y`` cancels for an order-2 symbol ``y``."""
    word = [Letter(*l) for l in word]
    _check(A, word)
    stack: list[Letter] = []
    for l in word:
        if stack and stack[-1] == A.inverse(l):
            stack.pop()
        else:
            stack.append(l)
    return tuple(stack)


def is_reduced(A: Alphabet, word: Word) -> bool:
    return all(word[i + 1] != A.inverse(word[i]) for i in range(len(word) - 1))


def multiply(A: Alphabet, u: Word, v: Word) -> Word:
    return normalize(A, tuple(u) + tuple(v))


def invert(A: Alphabet, w: Word) -> Word:
    return tuple(A.inverse(Letter(*l)) for l in reversed(w))


def length(A: Alphabet, w: Word) -> int:
    return len(normalize(A, w))


def conjugate(A: Alphabet, w: Word, g: Word) -> Word:
    """``g^-1 w g``."""
    return normalize(A, invert(A, g) + tuple(w) + tuple(g))


def extensions(A: Alphabet, w: Word) -> list[Letter]:
    """Letters ``l`` for which ``w l`` is reduced, in global order."""
    if not w:
        return A.letters()
    bad = A.inverse(w[-1])
    return [l for l in A.letters() if l != bad]


def sphere(A: Alphabet, n: int) -> list[Word]:
    level = [EMPTY]
    for _ in range(n):
        level = [w + (l,) for w in level for l in extensions(A, w)]
    return level


def ball(A: Alphabet, R: int) -> list[Word]:
    """All reduced words of length <= R, by length then lexicographically."""
    out = [EMPTY]
    level = [EMPTY]
    for _ in range(R):
        level = [w + (l,) for w in level for l in extensions(A, w)]
        out.extend(level)
    return out


def word_sort_key(w: Word) -> tuple:
    return (len(w), tuple(Letter(*l).sort_key() for l in w))


def common_prefix_length(u: Word, v: Word) -> int:
    n = 0
    for a, b in zip(u, v):
        if a != b:
            break
        n += 1
    return n
