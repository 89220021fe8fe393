"""Fibonacci generator words and the relation words built from them.

Indexed words are tuples of positive integers, the integer ``k`` standing for
the generator ``f_k``; ``f_1 = s``, ``f_2 = f`` and ``f_k = f_{k-2} f_{k-1}``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable

_LETTERS_RE = re.compile(r"[sf]+")
_TOKEN_RE = re.compile(r"f([1-9][0-9]*)")


class WordSyntaxError(ValueError):
    pass


@lru_cache(maxsize=None)
def fib(n: int) -> int:
    """Fibonacci number with fib(1) = fib(2) = 1 (and fib(0) = 0)."""
    if n < 0:
        raise ValueError("Fibonacci index must be >= 0")
    a, b = 0, 1
    for _ in range(n):
        a, b = b, a + b
    return a


@lru_cache(maxsize=None)
def fib_letters(n: int) -> str:
    if n < 1:
        raise ValueError(f"f_n is defined for n >= 1, got {n}")
    if n == 1:
        return "s"
    if n == 2:
        return "f"
    return fib_letters(n - 2) + fib_letters(n - 1)


def chain(a: int, b: int, step: int = 2) -> tuple[int, ...]:
    """Indices ``a, a+step, ...`` not exceeding ``b``; empty when ``a > b``."""
    return tuple(range(a, b + 1, step)) if a <= b else ()


@dataclass(frozen=True)
class GeneratorWord:
    """A product ``f_{i_1} ... f_{i_n}``.

    Equality is equality of index sequences; compare ``letters`` for
    letter-by-letter equality.
    """

    indices: tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "indices", tuple(int(i) for i in self.indices))
        if any(i < 1 for i in self.indices):
            raise WordSyntaxError("generator indices start at 1")

    @classmethod
    def from_letters(cls, letters: str) -> GeneratorWord:
        if letters == "e":
            return cls(())
        if letters and not _LETTERS_RE.fullmatch(letters):
            raise WordSyntaxError(f"not a word over s, f: {letters!r}")
        return cls(tuple(1 if c == "s" else 2 for c in letters))

    @classmethod
    def parse(cls, text: str) -> GeneratorWord:
        """Parse ``sffs``, ``e``, or whitespace separated ``f<k>`` tokens."""
        text = text.strip()
        tokens = text.split()
        if not tokens:
            return cls(())
        if _TOKEN_RE.fullmatch(tokens[0]):
            indices = []
            for tok in tokens:
                m = _TOKEN_RE.fullmatch(tok)
                if not m:
                    raise WordSyntaxError(f"bad generator token {tok!r}")
                indices.append(int(m.group(1)))
            return cls(tuple(indices))
        if len(tokens) > 1:
            raise WordSyntaxError(f"cannot parse word {text!r}")
        return cls.from_letters(tokens[0])

    @property
    def letters(self) -> str:
        return "".join(fib_letters(i) for i in self.indices)

    @property
    def length(self) -> int:
        """Length over {s, f}."""
        return sum(fib(i) for i in self.indices)

    def __len__(self):
        return len(self.indices)

    def __add__(self, other: GeneratorWord) -> GeneratorWord:
        return GeneratorWord(self.indices + other.indices)

    def __str__(self):
        return " ".join(f"f{i}" for i in self.indices) if self.indices else "e"


def as_indices(word) -> tuple[int, ...]:
    if isinstance(word, GeneratorWord):
        return word.indices
    if isinstance(word, str):
        return GeneratorWord.parse(word).indices
    return tuple(word)


def as_letters(word) -> str:
    if isinstance(word, str):
        return GeneratorWord.parse(word).letters
    return GeneratorWord(as_indices(word)).letters


def fib_word(n: int) -> GeneratorWord:
    return GeneratorWord.from_letters(fib_letters(n))


def relation_words(n: int) -> tuple[GeneratorWord, GeneratorWord]:
    """The pair ``(r_n, r'_n)``; for n >= 2 both are in indexed form."""
    if n < 1:
        raise ValueError(f"relations are indexed from 1, got {n}")
    if n == 1:
        return GeneratorWord((1, 1)), GeneratorWord(())
    r = (n + 1, n, n)
    parity = n % 2
    r_prime = (parity + 1,) + chain(parity + 5, n + 1) + (n,)
    return GeneratorWord(r), GeneratorWord(r_prime)


def z_indices(n: int) -> tuple[int, ...]:
    if n < 1:
        raise ValueError(f"z_n is defined for n >= 1, got {n}")
    return chain(3 if n % 2 else 4, n + 2)


def z_word(n: int) -> GeneratorWord:
    """``f_3 f_5 ... f_{n+2}`` for odd n, ``f_4 f_6 ... f_{n+2}`` for even n."""
    return GeneratorWord(z_indices(n))


def e_word(n: int) -> GeneratorWord:
    """``f_n`` with its first two letters deleted."""
    if n < 3:
        raise ValueError(f"e_n is defined for n >= 3, got {n}")
    return GeneratorWord.from_letters(fib_letters(n)[2:] or "e")


def lemma_prefix_identity(k: int, n: int) -> bool:
    """Check ``f_n == f_k f_{k+1} f_{k+3} ... f_{n-1}`` and
    ``f_{k+1}^2 == f_{k-1} f_{k+2}`` letter by letter."""
    if not (1 <= k <= n - 2 and (n - k) % 2 == 0):
        raise ValueError(f"need k <= n-2 and k = n mod 2, got k={k}, n={n}")
    expansion = GeneratorWord((k,) + chain(k + 1, n - 1)).letters
    ok = fib_letters(n) == expansion
    if k > 1:
        ok = ok and fib_letters(k + 1) * 2 == fib_letters(k - 1) + fib_letters(k + 2)
    return ok


def words_up_to(max_length: int, alphabet: str = "sf") -> Iterable[str]:
    """All words over ``alphabet`` of length at most ``max_length``, shortest first."""
    frontier = [""]
    yield ""
    for _ in range(max_length):
        frontier = [w + c for w in frontier for c in alphabet]
        yield from frontier
