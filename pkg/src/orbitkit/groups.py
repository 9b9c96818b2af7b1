"""Acting groups with exact arithmetic.

Three kinds of group can act in this package: free groups on a finite
alphabet, the integers, and small finite groups given by an explicit
multiplication table.  Elements are immutable values tied to their
descriptor; mixing elements of different descriptors raises
DescriptorMismatch rather than silently computing nonsense.

Free group elements are kept in reduced form at all times: the letters of
a word are signed indices into the alphabet (index+1 for a generator,
-(index+1) for its inverse) and every constructor cancels adjacent inverse
pairs eagerly.  Equality of reduced tuples is then equality in the group.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from .errors import DescriptorMismatch, KindError

MAX_FINITE_ORDER = 64

_TOKEN_RE = re.compile(r"^([^\s.^]+)(?:\^(-?\d+))?$")


@dataclass(frozen=True)
class GroupElement:
    """An element of the group described by `group`.

    value is a reduced tuple of signed letters (free kind), an int
    (integer kind), or an element index (finite kind).
    """

    group: "GroupDescriptor"
    value: object

    def __mul__(self, other: "GroupElement") -> "GroupElement":
        return self.group.multiply(self, other)

    def inverse(self) -> "GroupElement":
        return self.group.inverse(self)

    def is_identity(self) -> bool:
        return self == self.group.identity()

    def __repr__(self):
        return f"<{self.group.kind}:{self.group.format_element(self)}>"


class GroupDescriptor:
    """Common interface of the three group kinds."""

    kind = "?"

    def identity(self) -> GroupElement:
        raise NotImplementedError

    def multiply(self, g: GroupElement, h: GroupElement) -> GroupElement:
        raise NotImplementedError

    def inverse(self, g: GroupElement) -> GroupElement:
        raise NotImplementedError

    def contains(self, g: GroupElement) -> bool:
        return isinstance(g, GroupElement) and g.group == self

    def check_element(self, g: GroupElement) -> GroupElement:
        if not isinstance(g, GroupElement) or g.group != self:
            raise DescriptorMismatch(f"element {g!r} does not belong to {self!r}")
        return g

    # Finite enumeration; only the finite kind can answer.
    def elements(self) -> list:
        raise KindError(f"cannot enumerate elements of kind {self.kind!r}")

    def format_element(self, g: GroupElement) -> str:
        raise NotImplementedError

    def parse_element(self, text: str) -> GroupElement:
        raise NotImplementedError


def _reduce_signed(letters: Iterable[int]) -> tuple:
    out: list = []
    for s in letters:
        if out and out[-1] == -s:
            out.pop()
        else:
            out.append(s)
    return tuple(out)


def _concat_reduced(u: tuple, v: tuple) -> tuple:
    # both inputs are reduced, so cancellation only happens at the junction
    i, j = len(u), 0
    while i > 0 and j < len(v) and u[i - 1] == -v[j]:
        i -= 1
        j += 1
    return u[:i] + v[j:]


@dataclass(frozen=True)
class FreeGroup(GroupDescriptor):
    """Free group on a finite, duplicate-free alphabet of symbols."""

    alphabet: tuple

    kind = "free"

    def __post_init__(self):
        if not self.alphabet:
            raise ValueError("free group needs a nonempty alphabet")
        if len(set(self.alphabet)) != len(self.alphabet):
            raise ValueError(f"duplicate symbols in alphabet {self.alphabet}")
        for sym in self.alphabet:
            if not isinstance(sym, str) or not sym or _TOKEN_RE.match(sym) is None:
                raise ValueError(f"bad generator symbol {sym!r}")

    def index(self, symbol: str) -> int:
        try:
            return self.alphabet.index(symbol)
        except ValueError:
            raise DescriptorMismatch(f"symbol {symbol!r} not in alphabet {self.alphabet}") from None

    def letter(self, symbol: str, power: int = 1) -> int:
        if power not in (1, -1):
            raise ValueError("a letter has power +1 or -1")
        return (self.index(symbol) + 1) * power

    def symbol_of(self, letter: int) -> str:
        return self.alphabet[abs(letter) - 1]

    def identity(self) -> GroupElement:
        return GroupElement(self, ())

    def word(self, letters: Iterable) -> GroupElement:
        """Build a reduced word.  Letters may be signed ints, symbols, or
        (symbol, power) pairs; powers beyond +-1 are expanded."""
        signed: list = []
        for item in letters:
            if isinstance(item, int):
                if item == 0 or abs(item) > len(self.alphabet):
                    raise DescriptorMismatch(f"signed letter {item} out of range")
                signed.append(item)
            elif isinstance(item, str):
                signed.extend(self._token_letters(item))
            else:
                sym, power = item
                base = self.index(sym) + 1
                signed.extend([base if power > 0 else -base] * abs(power))
        return GroupElement(self, _reduce_signed(signed))

    def _token_letters(self, token: str) -> list:
        m = _TOKEN_RE.match(token)
        if m is None:
            raise DescriptorMismatch(f"bad word token {token!r}")
        sym, pow_s = m.group(1), m.group(2)
        power = 1 if pow_s is None else int(pow_s)
        base = self.index(sym) + 1
        if power == 0:
            return []
        return [base if power > 0 else -base] * abs(power)

    def generator(self, symbol: str) -> GroupElement:
        return GroupElement(self, (self.index(symbol) + 1,))

    def multiply(self, g: GroupElement, h: GroupElement) -> GroupElement:
        self.check_element(g), self.check_element(h)
        return GroupElement(self, _concat_reduced(g.value, h.value))

    def inverse(self, g: GroupElement) -> GroupElement:
        self.check_element(g)
        return GroupElement(self, tuple(-s for s in reversed(g.value)))

    def format_element(self, g: GroupElement) -> str:
        self.check_element(g)
        if not g.value:
            return "e"
        parts = []
        for s in g.value:
            sym = self.symbol_of(s)
            parts.append(sym if s > 0 else f"{sym}^-1")
        return ".".join(parts)

    def parse_element(self, text: str) -> GroupElement:
        text = text.strip()
        if text in ("e", ""):
            return self.identity()
        return self.word(tok for tok in re.split(r"[.\s]+", text) if tok)


@dataclass(frozen=True)
class Integers(GroupDescriptor):
    """The integers under addition."""

    kind = "int"

    def identity(self) -> GroupElement:
        return GroupElement(self, 0)

    def element(self, n: int) -> GroupElement:
        if not isinstance(n, int):
            raise DescriptorMismatch(f"integer expected, got {n!r}")
        return GroupElement(self, n)

    def multiply(self, g: GroupElement, h: GroupElement) -> GroupElement:
        self.check_element(g), self.check_element(h)
        return GroupElement(self, g.value + h.value)

    def inverse(self, g: GroupElement) -> GroupElement:
        self.check_element(g)
        return GroupElement(self, -g.value)

    def format_element(self, g: GroupElement) -> str:
        self.check_element(g)
        return str(g.value)

    def parse_element(self, text: str) -> GroupElement:
        text = text.strip()
        if text == "e":
            return self.identity()
        try:
            return GroupElement(self, int(text))
        except ValueError:
            raise DescriptorMismatch(f"bad integer element {text!r}") from None


@dataclass(frozen=True)
class FiniteGroup(GroupDescriptor):
    """A finite group of order at most MAX_FINITE_ORDER, given by its
    multiplication table.  table[i][j] is the index of element i*j; the
    group axioms are verified at construction."""

    table: tuple
    identity_index: int = 0
    names: Optional[tuple] = None

    kind = "finite"

    def __post_init__(self):
        n = len(self.table)
        if n == 0:
            raise ValueError("empty multiplication table")
        if n > MAX_FINITE_ORDER:
            raise ValueError(f"finite group order {n} exceeds cap {MAX_FINITE_ORDER}")
        if any(len(row) != n for row in self.table):
            raise ValueError("multiplication table is not square")
        if any(not (0 <= v < n) for row in self.table for v in row):
            raise ValueError("multiplication table entry out of range")
        e = self.identity_index
        if not (0 <= e < n):
            raise ValueError("identity index out of range")
        for i in range(n):
            if self.table[e][i] != i or self.table[i][e] != i:
                raise ValueError(f"index {e} is not a two-sided identity")
        for i in range(n):
            if e not in [self.table[i][j] for j in range(n)]:
                raise ValueError(f"element {i} has no right inverse")
        for i in range(n):
            for j in range(n):
                for k in range(n):
                    if self.table[self.table[i][j]][k] != self.table[i][self.table[j][k]]:
                        raise ValueError(f"table is not associative at ({i},{j},{k})")
        if self.names is not None and len(self.names) != n:
            raise ValueError("names do not match table size")

    @property
    def order(self) -> int:
        return len(self.table)

    def identity(self) -> GroupElement:
        return GroupElement(self, self.identity_index)

    def element(self, i: int) -> GroupElement:
        if not (0 <= i < self.order):
            raise DescriptorMismatch(f"element index {i} out of range 0..{self.order - 1}")
        return GroupElement(self, i)

    def elements(self) -> list:
        return [GroupElement(self, i) for i in range(self.order)]

    def multiply(self, g: GroupElement, h: GroupElement) -> GroupElement:
        self.check_element(g), self.check_element(h)
        return GroupElement(self, self.table[g.value][h.value])

    def inverse(self, g: GroupElement) -> GroupElement:
        self.check_element(g)
        row = self.table[g.value]
        return GroupElement(self, row.index(self.identity_index))

    def format_element(self, g: GroupElement) -> str:
        self.check_element(g)
        if self.names is not None:
            return self.names[g.value]
        return str(g.value)

    def parse_element(self, text: str) -> GroupElement:
        text = text.strip()
        if self.names is not None and text in self.names:
            return GroupElement(self, self.names.index(text))
        if text == "e":
            return self.identity()
        try:
            return self.element(int(text))
        except ValueError:
            raise DescriptorMismatch(f"bad finite group element {text!r}") from None


def cyclic_group(n: int, names: Optional[tuple] = None) -> FiniteGroup:
    table = tuple(tuple((i + j) % n for j in range(n)) for i in range(n))
    return FiniteGroup(table=table, identity_index=0, names=names)


# ---------------------------------------------------------------------------
# free word operations


def _require_free(g: GroupElement) -> FreeGroup:
    if not isinstance(g.group, FreeGroup):
        raise KindError(f"free-word operation applied to kind {g.group.kind!r}")
    return g.group


def reduce_word(group: FreeGroup, letters: Iterable) -> GroupElement:
    """Reduced word from an arbitrary letter sequence."""
    if not isinstance(group, FreeGroup):
        raise KindError(f"reduce_word needs a free group, got {group.kind!r}")
    return group.word(letters)


def length(g: GroupElement) -> int:
    """Reduced word length |g|."""
    _require_free(g)
    return len(g.value)


def length_cocycle(g: GroupElement) -> int:
    """Sum of letter signs; the unique homomorphism to the integers sending
    every generator to 1."""
    _require_free(g)
    return sum(1 if s > 0 else -1 for s in g.value)


def is_positive(g: GroupElement) -> bool:
    _require_free(g)
    return all(s > 0 for s in g.value)


def factor_positive(g: GroupElement) -> Optional[tuple]:
    """Split g as alpha * beta^-1 with alpha, beta positive words, if the
    reduced form allows it (no inverse letter followed by a plain letter).
    Returns (alpha, beta) or None."""
    group = _require_free(g)
    word = g.value
    cut = len(word)
    for i, s in enumerate(word):
        if s < 0:
            cut = i
            break
    if any(s > 0 for s in word[cut:]):
        return None
    alpha = GroupElement(group, word[:cut])
    beta = GroupElement(group, tuple(-s for s in reversed(word[cut:])))
    return alpha, beta


def positive_letters(g: GroupElement) -> tuple:
    """Symbols of a positive word, in order."""
    group = _require_free(g)
    if not is_positive(g):
        raise ValueError(f"{group.format_element(g)} is not a positive word")
    return tuple(group.symbol_of(s) for s in g.value)


def free_to_integer(g: GroupElement) -> GroupElement:
    """Identify the free group on one generator with the integers."""
    group = _require_free(g)
    if len(group.alphabet) != 1:
        raise KindError("only a rank-1 free group converts to the integers")
    return Integers().element(length_cocycle(g))


def integer_to_free(group: FreeGroup, g: GroupElement) -> GroupElement:
    """Inverse of free_to_integer for a rank-1 free group."""
    if not isinstance(g.group, Integers):
        raise KindError(f"integer element expected, got kind {g.group.kind!r}")
    if len(group.alphabet) != 1:
        raise KindError("only a rank-1 free group converts to the integers")
    n = g.value
    sym = group.alphabet[0]
    return group.word([(sym, n)]) if n else group.identity()
