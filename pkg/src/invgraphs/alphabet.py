"""Involutive alphabets and words over them.

A word is a tuple of integer letter codes. Positive letter number ``i`` has
code ``2*i`` and its formal inverse has code ``2*i + 1``, so inversion of a
single letter is ``c ^ 1``. In text the inverse of ``a`` is written ``a'``
and words are whitespace-separated tokens; ``1`` (or ``ε``, or nothing)
denotes the empty word.
"""

from __future__ import annotations

import itertools
import numbers
import re
from typing import Iterable, Iterator, Sequence, Union

from . import kernels
from .errors import AlphabetError

Word = tuple[int, ...]
WordLike = Union[str, Sequence[int], Sequence[str]]

_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")
EMPTY_TOKENS = frozenset({"1", "ε"})


def inverse(code: int) -> int:
    return code ^ 1


def inverse_word(word: Sequence[int]) -> Word:
    return tuple(c ^ 1 for c in reversed(word))


def is_positive(code: int) -> bool:
    return code & 1 == 0


def free_reduce(word: Sequence[int]) -> Word:
    """Cancel every factor ``c c^-1`` until none is left."""
    return kernels.free_reduce(tuple(word))


def is_reduced(word: Sequence[int]) -> bool:
    return all(word[i] != word[i + 1] ^ 1 for i in range(len(word) - 1))


class InvolutiveAlphabet:
    """Positive letters ``A`` together with their formal inverses.

    >>> A = InvolutiveAlphabet("ab")
    >>> A.format(A.parse("a b' b a'"))
    "a b' b a'"
    """

    __slots__ = ("letters", "_index")

    def __init__(self, letters: Iterable[str]):
        letters = tuple(letters)
        if not letters:
            raise AlphabetError("an alphabet needs at least one letter")
        for name in letters:
            if not _IDENT.match(name):
                raise AlphabetError(f"invalid letter name {name!r}")
        if len(set(letters)) != len(letters):
            raise AlphabetError(f"duplicate letters in {letters}")
        self.letters = letters
        index = {}
        for i, name in enumerate(letters):
            index[name] = 2 * i
            index[name + "'"] = 2 * i + 1
        self._index = index

    # -- basic structure -------------------------------------------------
    @property
    def rank(self) -> int:
        return len(self.letters)

    @property
    def size(self) -> int:
        """Number of letter codes, i.e. ``|A ∪ A^-1|``."""
        return 2 * len(self.letters)

    @property
    def codes(self) -> range:
        return range(self.size)

    def __len__(self):
        return self.size

    def __eq__(self, other):
        return isinstance(other, InvolutiveAlphabet) and self.letters == other.letters

    def __hash__(self):
        return hash(self.letters)

    def __repr__(self):
        return f"InvolutiveAlphabet({list(self.letters)!r})"

    # -- letters ---------------------------------------------------------
    def code(self, token: str) -> int:
        try:
            return self._index[token]
        except KeyError:
            raise AlphabetError(f"unknown letter {token!r} (alphabet {' '.join(self.letters)})") from None

    def token(self, code: int) -> str:
        self.check_code(code)
        name = self.letters[code >> 1]
        return name + "'" if code & 1 else name

    def check_code(self, code: int) -> None:
        if not (isinstance(code, numbers.Integral) and 0 <= code < self.size):
            raise AlphabetError(f"letter code {code!r} outside alphabet of size {self.size}")

    # -- words -----------------------------------------------------------
    def parse(self, word: WordLike) -> Word:
        """Turn text, a token sequence or a code sequence into a word."""
        if isinstance(word, str):
            tokens = word.split()
            if len(tokens) == 1 and tokens[0] in EMPTY_TOKENS:
                return ()
            return tuple(self.code(t) for t in tokens)
        if type(word) is tuple and all(type(c) is int for c in word):
            if word and (min(word) < 0 or max(word) >= self.size):
                bad = next(c for c in word if not 0 <= c < self.size)
                raise AlphabetError(f"letter code {bad!r} outside alphabet of size {self.size}")
            return word
        out = []
        for item in word:
            if isinstance(item, str):
                out.append(self.code(item))
            else:
                self.check_code(item)
                out.append(int(item))
        return tuple(out)

    def format(self, word: Sequence[int], empty: str = "") -> str:
        if not word:
            return empty
        return " ".join(self.token(c) for c in word)

    def compact(self, word: Sequence[int]) -> str:
        """Space-free rendering used for vertex keys (``"1"`` for the empty word)."""
        if not word:
            return "1"
        return "".join(self.token(c) for c in word)

    def reduce(self, word: WordLike) -> Word:
        return free_reduce(self.parse(word))

    def words(self, max_len: int, min_len: int = 0) -> Iterator[Word]:
        """All words of length ``min_len..max_len`` in shortlex order."""
        for n in range(min_len, max_len + 1):
            yield from itertools.product(self.codes, repeat=n)

    def reduced_words(self, max_len: int) -> Iterator[Word]:
        """All freely reduced words of length at most ``max_len``, shortlex."""
        layer: list[Word] = [()]
        yield ()
        for _ in range(max_len):
            nxt = []
            for w in layer:
                for c in self.codes:
                    if w and w[-1] == c ^ 1:
                        continue
                    nxt.append(w + (c,))
            yield from nxt
            layer = nxt

    def involutive_permutations(self) -> list[tuple[int, ...]]:
        """Permutations of the codes that commute with inversion.

        Each is a tuple ``p`` with ``p[c ^ 1] == p[c] ^ 1``; there are
        ``rank! * 2**rank`` of them, the identity first.
        """
        perms = []
        n = self.rank
        for order in itertools.permutations(range(n)):
            for flips in itertools.product((0, 1), repeat=n):
                p = [0] * self.size
                for i in range(n):
                    p[2 * i] = 2 * order[i] + flips[i]
                    p[2 * i + 1] = (2 * order[i] + flips[i]) ^ 1
                perms.append(tuple(p))
        return perms
