"""Rewriting words over the generators f_1, f_2, ... to normal form.

Rules (written ``f_a`` as the integer ``a``)::

    N1   1 1             -> e
    N2   a a+1           -> a+2                               a >= 1
    N3   a a             -> a-2 a+1                           a >= 3
    N4   a 2 2           -> a                                 a >= 2
    N5   ^2              -> 1 3                               prefix only
    N6   a+1 a a+3       -> a+3 a+2                           a >= 1
    N7   a+2 a a+3       -> a a+3 a+2                         a >= 1
    N8   a+p a a+q       -> (a+p-2 ... a) (2 2 ... a-2 a-2) a-1 a+q
                                                  a >= 2, p >= 1, q >= 2 even
    N9   a+p a a+q       -> (a+p-2 ... a+2) (2 2 ... a a) a+q
                                                  a >= 1, p >= 3, q >= 3 odd
    N10  1+p 1 1+q       -> 1+p 2 4 ... q                     p >= 1, q >= 2 even
    N11  a+1 a a+q       -> (2 2 ... a a) a+1 a+4 a+6 ... a+q-1   a >= 1, q >= 5 odd
    N12  a+2 a a+q       -> a (2 2 ... a a) a+1 a+4 ... a+q-1     a >= 1, q >= 5 odd

Descending runs step by one, the squared runs step by one, and the runs in
N10-N12 step by two.  N1-N10 alone leave valleys ``a+p a a+q`` with p in {1, 2}
and odd q >= 5 irreducible (for example ``f_3 f_1 f_6``) and are not confluent
on such words (``f_7 f_1 f_7``).  N11 and N12 close that gap: expanding
``f_{a+q}`` as ``f_{a+1} f_{a+2} f_{a+4} ... f_{a+q-1}`` turns the valley into
``f_{a+3} f_{a+2} f_{a+4} ...``, on which N8 shortens the word by four letters.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterator, Sequence

from .words import GeneratorWord, as_indices, chain, fib


class NonTerminationError(RuntimeError):
    """The step guard tripped; the rule set is not terminating on this input."""


class RuleNotApplicable(ValueError):
    pass


@dataclass(frozen=True)
class RuleInstance:
    rule_id: str
    params: tuple[tuple[str, int], ...] = ()
    anchored: bool = False

    @property
    def width(self) -> int:
        return LHS_WIDTH[self.rule_id]

    def param(self, name: str) -> int:
        return dict(self.params)[name]

    def lhs(self) -> tuple[int, ...]:
        return rule_lhs(self.rule_id, dict(self.params))

    def rhs(self) -> tuple[int, ...]:
        return rule_rhs(self.rule_id, dict(self.params))

    def __str__(self):
        inner = ",".join(f"{k}={v}" for k, v in self.params)
        return f"{self.rule_id}({inner})" if inner else self.rule_id


LHS_WIDTH = {
    "N1": 2, "N2": 2, "N3": 2, "N4": 3, "N5": 1,
    "N6": 3, "N7": 3, "N8": 3, "N9": 3, "N10": 3, "N11": 3, "N12": 3,
}
RULE_IDS = tuple(LHS_WIDTH)


def _squares(lo: int, hi: int) -> tuple[int, ...]:
    return tuple(i for i in range(lo, hi + 1) for _ in range(2))


def _descending(hi: int, lo: int) -> tuple[int, ...]:
    return tuple(range(hi, lo - 1, -1))


def rule_lhs(rule_id: str, p: dict) -> tuple[int, ...]:
    a = p.get("a")
    if rule_id == "N1":
        return (1, 1)
    if rule_id == "N2":
        return (a, a + 1)
    if rule_id == "N3":
        return (a, a)
    if rule_id == "N4":
        return (a, 2, 2)
    if rule_id == "N5":
        return (2,)
    if rule_id == "N6":
        return (a + 1, a, a + 3)
    if rule_id == "N7":
        return (a + 2, a, a + 3)
    if rule_id in ("N8", "N9"):
        return (a + p["p"], a, a + p["q"])
    if rule_id == "N10":
        return (1 + p["p"], 1, 1 + p["q"])
    if rule_id == "N11":
        return (a + 1, a, a + p["q"])
    if rule_id == "N12":
        return (a + 2, a, a + p["q"])
    raise KeyError(rule_id)


def rule_rhs(rule_id: str, p: dict) -> tuple[int, ...]:
    a = p.get("a")
    if rule_id == "N1":
        return ()
    if rule_id == "N2":
        return (a + 2,)
    if rule_id == "N3":
        return (a - 2, a + 1)
    if rule_id == "N4":
        return (a,)
    if rule_id == "N5":
        return (1, 3)
    if rule_id == "N6":
        return (a + 3, a + 2)
    if rule_id == "N7":
        return (a, a + 3, a + 2)
    if rule_id == "N8":
        return _descending(a + p["p"] - 2, a) + _squares(2, a - 2) + (a - 1, a + p["q"])
    if rule_id == "N9":
        return _descending(a + p["p"] - 2, a + 2) + _squares(2, a) + (a + p["q"],)
    if rule_id == "N10":
        return (1 + p["p"],) + chain(2, p["q"])
    if rule_id == "N11":
        return _squares(2, a) + (a + 1,) + chain(a + 4, a + p["q"] - 1)
    if rule_id == "N12":
        return (a,) + _squares(2, a) + (a + 1,) + chain(a + 4, a + p["q"] - 1)
    raise KeyError(rule_id)


def _match_at(word: Sequence[int], pos: int) -> Iterator[RuleInstance]:
    """Rules whose left-hand side matches at ``pos``, by increasing rule number."""
    n = len(word)
    x = word[pos]
    y = word[pos + 1] if pos + 1 < n else None
    z = word[pos + 2] if pos + 2 < n else None
    if y is not None:
        if x == 1 and y == 1:
            yield RuleInstance("N1")
        if y == x + 1:
            yield RuleInstance("N2", (("a", x),))
        if x == y and x >= 3:
            yield RuleInstance("N3", (("a", x),))
    if z is not None and x >= 2 and y == 2 and z == 2:
        yield RuleInstance("N4", (("a", x),))
    if pos == 0 and x == 2:
        yield RuleInstance("N5", anchored=True)
    if z is None:
        return
    a, p, q = y, x - y, z - y
    if p < 1 or q < 2:
        return
    if p == 1 and q == 3:
        yield RuleInstance("N6", (("a", a),))
    if p == 2 and q == 3:
        yield RuleInstance("N7", (("a", a),))
    if a >= 2 and q % 2 == 0:
        yield RuleInstance("N8", (("a", a), ("p", p), ("q", q)))
    if p >= 3 and q >= 3 and q % 2 == 1:
        yield RuleInstance("N9", (("a", a), ("p", p), ("q", q)))
    if a == 1 and q % 2 == 0:
        yield RuleInstance("N10", (("p", p), ("q", q)))
    if p == 1 and q >= 5 and q % 2 == 1:
        yield RuleInstance("N11", (("a", a), ("q", q)))
    if p == 2 and q >= 5 and q % 2 == 1:
        yield RuleInstance("N12", (("a", a), ("q", q)))


def applicable_rules(word) -> list[tuple[int, RuleInstance]]:
    w = as_indices(word)
    return [(pos, rule) for pos in range(len(w)) for rule in _match_at(w, pos)]


def apply_rule(word, position: int, rule: RuleInstance) -> tuple[int, ...]:
    w = as_indices(word)
    lhs = rule.lhs()
    if rule.anchored and position != 0:
        raise RuleNotApplicable(f"{rule} only applies at the start of a word")
    if tuple(w[position : position + len(lhs)]) != lhs or rule not in _match_at(w, position):
        raise RuleNotApplicable(f"{rule} does not match at position {position} of {w}")
    return w[:position] + rule.rhs() + w[position + len(lhs) :]


def first_rule(w: Sequence[int]) -> tuple[int, RuleInstance] | None:
    for pos in range(len(w)):
        for rule in _match_at(w, pos):
            return pos, rule
    return None


# -- termination measure ----------------------------------------------------


@dataclass(frozen=True, order=True)
class TerminationMeasure:
    eta1: int
    eta2: int


def termination_measure(word) -> TerminationMeasure:
    w = as_indices(word)
    n = len(w)
    eta1 = sum(fib(i) for i in w)
    if n >= 2 and w[0] == 1 and w[1] >= 3 and w[1] % 2 == 1:
        eta1 -= 3
    eta2 = sum((n - j) * i for j, i in enumerate(w))
    return TerminationMeasure(eta1, eta2)


# -- normal forms -----------------------------------------------------------


@dataclass(frozen=True)
class NormalForm:
    """``s^epsilon f_{i_1} ... f_{i_n}`` with an ascending run of gaps at
    least two starting at 3 or more, then a strictly descending tail."""

    epsilon: int
    indices: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "indices", tuple(self.indices))
        if self.epsilon not in (0, 1):
            raise ValueError("epsilon is 0 or 1")
        if not is_normal_shape(self.indices):
            raise ValueError(f"{self.indices} does not have normal-form shape")

    @property
    def word(self) -> tuple[int, ...]:
        return (1,) * self.epsilon + self.indices

    @property
    def maximal_index(self) -> int | None:
        return max(self.indices) if self.indices else None

    @property
    def peak_position(self) -> int | None:
        if not self.indices:
            return None
        return self.indices.index(max(self.indices))

    @property
    def ascending(self) -> tuple[int, ...]:
        """Indices before the peak."""
        m = self.peak_position
        return () if m is None else self.indices[:m]

    @property
    def descending(self) -> tuple[int, ...]:
        """Indices after the peak."""
        m = self.peak_position
        return () if m is None else self.indices[m + 1 :]

    @property
    def length(self) -> int:
        return nf_length(self)

    @property
    def letters(self) -> str:
        return GeneratorWord(self.word).letters

    def minimal_letters(self) -> str:
        """The shortest {s, f}-word of this element."""
        letters = self.letters
        if self.epsilon and self.indices and self.indices[0] % 2 == 1:
            letters = letters[2:]
        return letters

    def __str__(self):
        return str(GeneratorWord(self.word))


def is_normal_shape(indices: Sequence[int]) -> bool:
    """Indices rise by steps of at least two from a start >= 3 up to the
    peak, then fall strictly."""
    if not indices:
        return True
    if indices[0] < 3:
        return False
    m = max(range(len(indices)), key=lambda j: indices[j])
    rising = all(indices[j] + 1 < indices[j + 1] for j in range(m))
    falling = all(indices[j] > indices[j + 1] for j in range(m, len(indices) - 1))
    return rising and falling


def split_epsilon(word: Sequence[int]) -> NormalForm:
    """Package a reduced word, reading a leading f_1 as epsilon."""
    w = tuple(word)
    if w and w[0] == 1:
        return NormalForm(1, w[1:])
    return NormalForm(0, w)


def nf_length(nf: NormalForm) -> int:
    if not nf.indices:
        return nf.epsilon
    sign = 1 if nf.indices[0] % 2 == 0 else -1
    return sign * nf.epsilon + sum(fib(i) for i in nf.indices)


@dataclass
class ReductionStep:
    position: int
    rule: RuleInstance
    before: tuple[int, ...]
    after: tuple[int, ...]


def _step_guard(w: Sequence[int]) -> int:
    m = termination_measure(w)
    return 64 + 4 * (m.eta1 + len(w)) ** 2


def reduce_word(word, trace: list | None = None) -> tuple[int, ...]:
    """Rewrite to an irreducible word, leftmost position and lowest rule first."""
    w = as_indices(word)
    guard = _step_guard(w)
    steps = 0
    while True:
        found = first_rule(w)
        if found is None:
            return w
        pos, rule = found
        new = apply_rule(w, pos, rule)
        if trace is not None:
            trace.append(ReductionStep(pos, rule, w, new))
        w = new
        steps += 1
        if steps > guard:
            raise NonTerminationError(f"no normal form after {steps} rewrites of {as_indices(word)}")


def normalize(word) -> NormalForm:
    """Normal form of a word given as letters, tokens, indices or GeneratorWord."""
    return split_epsilon(reduce_word(word))


def all_reducts(word, limit: int = 100_000) -> set[tuple[int, ...]]:
    """Every irreducible word reachable from ``word`` by any rewriting order."""
    start = as_indices(word)
    seen = {start}
    stack = [start]
    irreducible = set()
    while stack:
        w = stack.pop()
        rules = applicable_rules(w)
        if not rules:
            irreducible.add(w)
        for pos, rule in rules:
            nxt = apply_rule(w, pos, rule)
            if nxt not in seen:
                if len(seen) >= limit:
                    raise NonTerminationError(f"reduction graph of {start} exceeds {limit} words")
                seen.add(nxt)
                stack.append(nxt)
    return irreducible


# -- confluence -------------------------------------------------------------


@dataclass
class ConfluenceReport:
    alphabet_bound: int
    length_bound: int
    words: int = 0
    divergences: list = field(default_factory=list)
    misshapen: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.divergences and not self.misshapen


def confluence_probe(alphabet_bound: int, length_bound: int) -> ConfluenceReport:
    """Explore every reduction order of every word over f_1..f_B up to the
    given length; report words with several reducts and reducts that are not
    normal forms."""
    report = ConfluenceReport(alphabet_bound, length_bound)
    letters = range(1, alphabet_bound + 1)
    for n in range(length_bound + 1):
        for w in itertools.product(letters, repeat=n):
            report.words += 1
            reducts = all_reducts(w)
            if len(reducts) > 1:
                report.divergences.append((w, sorted(reducts)))
            for r in reducts:
                body = r[1:] if r and r[0] == 1 else r
                if not is_normal_shape(body):
                    report.misshapen.append((w, r))
    return report


# -- symbolic decomposition -------------------------------------------------

_SIGMA = (1, 0)
_ZETA = (0, 0)
_IDENTITY = (0, 1)


def generator_decomposition(i: int) -> tuple[tuple[int, ...], tuple[int, ...], tuple[int, int]]:
    """``phi(f_i)`` as (coordinate 0, coordinate 1, first-letter map)."""
    if i == 1:
        return (), (), _SIGMA
    if i == 2:
        return (1,), (2,), _ZETA
    if i == 3:
        return (2,), (1,), _ZETA
    if i == 4:
        return (3,), (2, 2), _ZETA
    if i % 2 == 0:
        return (i - 1,), chain(4, i - 2), _ZETA
    return (i - 1,), (2,) + chain(5, i - 2), _ZETA


def product_decomposition(word: Sequence[int]):
    """Multiply generator decompositions left to right:
    ``<g0,g1>p <h0,h1>q = <g0 h_p(0), g1 h_p(1)> pq``."""
    coords = [(), ()]
    letter_map = _IDENTITY
    for i in word:
        h0, h1, q = generator_decomposition(i)
        h = (h0, h1)
        coords = [coords[0] + h[letter_map[0]], coords[1] + h[letter_map[1]]]
        letter_map = (q[letter_map[0]], q[letter_map[1]])
    return coords[0], coords[1], letter_map


@dataclass(frozen=True)
class SymbolicDecomposition:
    u0: NormalForm
    u1: NormalForm
    letter_map: tuple[int, int]

    def __str__(self):
        names = {(1, 0): "sigma", (0, 0): "zeta", (1, 1): "one", (0, 1): "id"}
        return f"<{self.u0}, {self.u1}>{names[self.letter_map]}"


def symbolic_decompose(nf) -> SymbolicDecomposition:
    """Coordinates of a normal form, computed on indexed words and reduced.

    A normal form ending in f_1 has first-letter map ``one`` (constant 1)
    instead of zeta.
    """
    if not isinstance(nf, NormalForm):
        nf = normalize(nf)
    if not nf.indices:
        raise ValueError(f"{nf} is invertible and has no zeta decomposition")
    u0, u1, letter_map = product_decomposition(nf.word)
    return SymbolicDecomposition(normalize(u0), normalize(u1), letter_map)
