"""The finite quotients W_n (the action of F on words of length n), traces,
two-sided ideals and the left/right multipliers that carry an element to a
Fibonacci generator f_k.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterator

import mpmath
import numpy as np

from . import mealy
from .mealy import TransformationTable, check_level, image_size
from .rewrite import NormalForm, normalize
from .words import GeneratorWord, as_letters, fib, relation_words, words_up_to, z_indices

MAX_WN_LEVEL = 10


# -- dyadic rationals -------------------------------------------------------


@dataclass(frozen=True)
class DyadicRational:
    """``numerator / 2**exponent`` in lowest terms."""

    numerator: int
    exponent: int = 0

    def __post_init__(self):
        num, exp = self.numerator, self.exponent
        if num == 0:
            exp = 0
        while exp > 0 and num % 2 == 0:
            num //= 2
            exp -= 1
        while exp < 0:
            num *= 2
            exp += 1
        object.__setattr__(self, "numerator", num)
        object.__setattr__(self, "exponent", exp)

    @classmethod
    def from_fraction(cls, value: Fraction) -> DyadicRational:
        den = value.denominator
        if den & (den - 1):
            raise ValueError(f"{value} is not dyadic")
        return cls(value.numerator, den.bit_length() - 1)

    def to_fraction(self) -> Fraction:
        return Fraction(self.numerator, 2**self.exponent)

    def __float__(self):
        return self.numerator / 2**self.exponent

    def __lt__(self, other):
        return self.to_fraction() < DyadicRational._coerce(other)

    def __le__(self, other):
        return self.to_fraction() <= DyadicRational._coerce(other)

    @staticmethod
    def _coerce(other) -> Fraction:
        return other.to_fraction() if isinstance(other, DyadicRational) else Fraction(other)

    def __str__(self):
        if self.exponent == 0:
            return str(self.numerator)
        return f"{self.numerator}/{2 ** self.exponent}"


# -- W_n by closure -----------------------------------------------------------


@dataclass
class FiniteSemigroup:
    """Transformations of X^n realised by F, with a shortest {s, f}-word for
    each.  Row ``j`` of ``tables`` is element ``j``; row 0 is the identity."""

    level: int
    tables: np.ndarray
    parent: np.ndarray
    generator: np.ndarray
    index: dict[bytes, int] = field(repr=False)

    def __len__(self):
        return len(self.tables)

    def __contains__(self, t) -> bool:
        return self.key(t) in self.index

    def key(self, t) -> bytes:
        if isinstance(t, TransformationTable):
            t = t.entries
        return np.asarray(t, dtype=self.tables.dtype).tobytes()

    def find(self, t) -> int | None:
        return self.index.get(self.key(t))

    def element(self, j: int) -> TransformationTable:
        return TransformationTable(self.level, self.tables[j])

    def word(self, j: int) -> str:
        letters = []
        while j:
            letters.append("sf"[self.generator[j]])
            j = self.parent[j]
        return "".join(reversed(letters))

    def table_of(self, word) -> TransformationTable:
        return mealy.table(as_letters(word) if not isinstance(word, NormalForm) else word.letters, self.level)


def _dtype(level: int):
    return np.uint16 if level <= 16 else np.int64


def enumerate_Wn(n: int) -> FiniteSemigroup:
    """Breadth-first closure of {e} under right multiplication by s and f."""
    if n > MAX_WN_LEVEL:
        raise mealy.LevelCapError(f"W_n enumeration is limited to n <= {MAX_WN_LEVEL}")
    check_level(n)
    return _enumerate_Wn(n)


@lru_cache(maxsize=4)
def _enumerate_Wn(n: int) -> FiniteSemigroup:
    dtype = _dtype(n)
    gens = mealy.automaton_I().state_tables(n)
    gen_tables = [gens["s"].astype(dtype), gens["f"].astype(dtype)]
    rows = [np.arange(2**n, dtype=dtype)]
    parent = [0]
    generator = [-1]
    index = {rows[0].tobytes(): 0}
    frontier = [0]
    while frontier:
        nxt = []
        for j in frontier:
            t = rows[j]
            for g, gt in enumerate(gen_tables):
                u = gt[t]
                k = u.tobytes()
                if k not in index:
                    index[k] = len(rows)
                    rows.append(u)
                    parent.append(j)
                    generator.append(g)
                    nxt.append(index[k])
        frontier = nxt
    tables = np.stack(rows)
    tables.setflags(write=False)
    return FiniteSemigroup(n, tables, np.array(parent), np.array(generator), index)


def wn_order_formula(n: int) -> int:
    return sum(2 ** (k + 2) * fib(k) for k in range(1, n + 1)) - 2**n - 2 ** (n + 1) * fib(n) + 2


def quotient_FIn_order(n: int) -> int:
    """Order of F modulo the ideal generated by f_{n+3}."""
    if n < 2:
        raise ValueError("the F/I_n order formula needs n >= 2")
    return sum(2 ** (k + 2) * fib(k) for k in range(1, n + 1)) - 2 ** (n + 1) - 2 ** (n + 1) * fib(n) + 3


def constant_maps(W: FiniteSemigroup) -> int:
    """Number of elements of W with a single image point."""
    t = W.tables
    return int(np.count_nonzero((t == t[:, :1]).all(axis=1)))


def quotient_FIn_order_bfs(n: int) -> int:
    """|W_n| with all constant maps identified to one element."""
    W = enumerate_Wn(n)
    return len(W) - constant_maps(W) + 1


# -- normal-form patterns ---------------------------------------------------


def includes_z(nf: NormalForm, m: int) -> bool:
    """Whether the rising part of ``nf`` up to its peak is exactly z_m."""
    if m < 1 or not nf.indices:
        return False
    return nf.ascending + (nf.maximal_index,) == z_indices(m)


def includes_top_pair(nf: NormalForm) -> bool:
    """Whether the peak f_n is followed by f_{n-1}."""
    return bool(nf.descending) and nf.descending[0] == nf.maximal_index - 1


def normal_forms(max_peak: int) -> Iterator[NormalForm]:
    """Every normal form whose maximal index is at most ``max_peak``."""
    yield NormalForm(0, ())
    yield NormalForm(1, ())
    for peak in range(3, max_peak + 1):
        for nf in normal_forms_with_peak(peak):
            yield nf


def normal_forms_with_peak(peak: int) -> Iterator[NormalForm]:
    candidates = list(range(3, peak - 1))
    rising_sets = [()]
    for size in range(1, len(candidates) + 1):
        for combo in itertools.combinations(candidates, size):
            if all(b - a >= 2 for a, b in zip(combo, combo[1:])):
                rising_sets.append(combo)
    tails = []
    for size in range(peak):
        tails.extend(itertools.combinations(range(peak - 1, 0, -1), size))
    for rising in rising_sets:
        for tail in tails:
            for eps in (0, 1):
                yield NormalForm(eps, rising + (peak,) + tail)


def wn_normal_forms(n: int) -> Iterator[NormalForm]:
    """The normal forms that index the elements of W_n one to one."""
    for nf in normal_forms(n + 1):
        yield nf
    z = z_indices(n)
    for size in range(n + 1):
        for tail in itertools.combinations(range(n, 0, -1), size):
            yield NormalForm(0, z + tail)
    for nf in normal_forms_with_peak(n + 2):
        if not includes_z(nf, n) and not includes_top_pair(nf):
            yield nf


@dataclass
class CheckReport:
    name: str
    level: int
    cases: int = 0
    failures: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures

    def check(self, label, condition: bool):
        self.cases += 1
        if not condition:
            self.failures.append(label)


def wn_relation_check(n: int) -> CheckReport:
    """The defining relations of W_n, checked on level-n tables."""
    check_level(n)
    report = CheckReport("wn-relations", n)
    t = lambda w: mealy.table(as_letters(w) or "e", n)
    for k in range(1, n + 3):
        r, rp = relation_words(k)
        report.check(f"r_{k} = r'_{k}", t(r) == t(rp))
    z = GeneratorWord(z_indices(n))
    tz = t(z)
    report.check("s z_n = z_n", t(GeneratorWord((1,)) + z) == tz)
    report.check("f z_n = z_n", t(GeneratorWord((2,)) + z) == tz)
    report.check("f_{n+2} f_{n+1} = z_n", t(GeneratorWord((n + 2, n + 1))) == tz)
    report.check("z_n maps X^n to 0^n", bool(np.all(tz.entries == 0)))
    return report


def wn_census(n: int) -> CheckReport:
    """Compare the closure W_n with the normal forms that should index it."""
    W = enumerate_Wn(n)
    report = CheckReport("wn-census", n)
    seen = set()
    per_peak: dict[int, int] = {}
    for nf in wn_normal_forms(n):
        key = W.key(mealy.table(nf.letters or "e", n))
        report.check(f"{nf} lies in W_{n}", key in W.index)
        report.check(f"{nf} is distinct in W_{n}", key not in seen)
        seen.add(key)
        if nf.indices and nf.maximal_index <= n + 1:
            per_peak[nf.maximal_index] = per_peak.get(nf.maximal_index, 0) + 1
    report.check("normal forms exhaust W_n", len(seen) == len(W))
    for k in range(3, n + 2):
        report.check(f"peak {k} count", per_peak.get(k, 0) == 2 * fib(k - 2) * 2 ** (k - 1))
    return report


# -- traces -------------------------------------------------------------------


def trace_exact(nf) -> DyadicRational:
    if not isinstance(nf, NormalForm):
        nf = normalize(nf)
    n = nf.maximal_index
    if n is None or n < 3:
        raise ValueError("the trace formula needs maximal index >= 3")
    if includes_z(nf, n - 2) or includes_top_pair(nf):
        return DyadicRational(1, n - 2)
    return DyadicRational(1, n - 3)


def trace_empirical(word, levels) -> list[DyadicRational]:
    """``#g(X^n) / 2^n`` for each requested level."""
    letters = word.letters if isinstance(word, NormalForm) else as_letters(word)
    out = []
    for n in levels:
        out.append(DyadicRational(image_size(mealy.table(letters or "e", n)), n))
    return out


def stabilized_trace(word, max_level: int | None = None, window: int = 3) -> tuple[DyadicRational, int]:
    """Image ratio at ``max_level`` together with the lowest level from which
    the ratio stays unchanged; requires at least ``window`` equal levels."""
    max_level = mealy.level_cap() if max_level is None else max_level
    letters = word.letters if isinstance(word, NormalForm) else as_letters(word)
    t = mealy.table(letters or "e", max_level)
    ratios = {}
    while True:
        ratios[t.level] = DyadicRational(image_size(t), t.level)
        if t.level == 0:
            break
        t = t.truncate()
    stable = max_level
    while stable > 0 and ratios[stable - 1] == ratios[max_level]:
        stable -= 1
    if max_level - stable + 1 < window:
        raise mealy.LevelCapError(f"trace of {word} not stable below level {max_level}")
    return ratios[max_level], stable


def trace_consistency(n: int, extra_levels: int = 3) -> CheckReport:
    """trace_exact against the stabilised image ratio on every element of W_n
    with maximal index >= 3."""
    W = enumerate_Wn(n)
    report = CheckReport("trace-consistency", n)
    for j in range(len(W)):
        nf = normalize(W.word(j))
        if not nf.indices or nf.maximal_index < 3:
            continue
        level = min(mealy.level_cap(), nf.maximal_index + extra_levels)
        value, _ = stabilized_trace(nf, level)
        report.check(str(nf), value == trace_exact(nf))
    return report


# -- ideal witnesses ----------------------------------------------------------


class WitnessError(RuntimeError):
    """The construction did not produce the promised generator."""


def w_word(k: int, m: int) -> GeneratorWord:
    """A left multiplier with ``w(k, m) f_k f_m = f_m``."""
    if m < 6 or not 1 <= k <= m - 2:
        raise ValueError(f"w(k, m) needs m >= 6 and k <= m - 2, got ({k}, {m})")
    if (k, m) == (4, 6):
        raise ValueError("w(4, 6) is not provided by the construction")
    if m == 6:
        if k == 3:
            return GeneratorWord((4, 3, 1))
        raise ValueError(f"w({k}, 6) is only constructed for k = 3")
    if m == 7:
        table = {5: (5, 4, 1), 4: (5, 4, 2), 3: (5, 4)}
        if k not in table:
            raise ValueError(f"w({k}, 7) is only constructed for 3 <= k <= 5")
        return GeneratorWord(table[k])
    head = (m - 2, m - 3, m - 5, m - 7)
    head = tuple(i for i in head if i >= 1)
    # the descending run starts at f_{m-4}; starting at f_{m-3} overshoots to f_{m-1} f_m
    return GeneratorWord(head + tuple(range(m - 4, k - 2, -1)))


@dataclass(frozen=True)
class IdealWitness:
    left: GeneratorWord
    right: GeneratorWord
    target_index: int

    def product(self, g: NormalForm) -> GeneratorWord:
        return self.left + GeneratorWord(g.word) + self.right


def target_index(nf: NormalForm) -> int:
    n = nf.maximal_index
    if includes_z(nf, n - 2) or includes_top_pair(nf):
        return n + 1
    return n


def _right_reducer(nf: NormalForm) -> GeneratorWord:
    n = nf.maximal_index
    tail = set(nf.descending)
    return GeneratorWord(tuple(i for i in range(1, n - 1) if i in tail))


def _fibonacci_prefix(n: int) -> GeneratorWord:
    """Left factor sending f_n f_{n-1} to f_{n+1}: sffs for even n, fsfs for odd n."""
    return GeneratorWord.from_letters("sffs" if n % 2 == 0 else "fsfs")


def ideal_witnesses(nf, verify_level: int | None = None) -> IdealWitness:
    """Multipliers with ``left * g * right = f_k`` for k the peak or peak + 1."""
    if not isinstance(nf, NormalForm):
        nf = normalize(nf)
    n = nf.maximal_index
    if n is None or n < 3:
        raise ValueError("ideal witnesses need maximal index >= 3")
    witness = _construct(nf, depth=0)
    _verify(nf, witness, verify_level)
    return witness


def _construct(nf: NormalForm, depth: int) -> IdealWitness:
    if depth > 3:
        raise WitnessError(f"prefix reduction of {nf} did not terminate")
    n = nf.maximal_index
    eps = GeneratorWord((1,) * nf.epsilon)
    g2 = _right_reducer(nf)
    has_pair = includes_top_pair(nf)
    if includes_z(nf, n - 2):
        top = GeneratorWord((n - 1,)) if has_pair else GeneratorWord()
        return IdealWitness(GeneratorWord((3 - n % 2,)) + eps, g2 + top, n + 1)
    rising = nf.ascending
    if rising[:2] in ((3, 5), (4, 6)):
        lead = GeneratorWord((2,) if rising[0] == 3 else (3,))
        inner = normalize(lead + eps + GeneratorWord(nf.word))
        sub = _construct(inner, depth + 1)
        return IdealWitness(sub.left + lead + eps, sub.right, sub.target_index)
    g1 = GeneratorWord()
    steps = rising + (n,)
    for k, m in zip(steps, steps[1:]):
        g1 = w_word(k, m) + g1
    left = g1 + eps
    if has_pair:
        left = _fibonacci_prefix(n) + left
        return IdealWitness(left, g2, n + 1)
    return IdealWitness(left, g2, n)


def _verify(nf: NormalForm, witness: IdealWitness, verify_level: int | None) -> None:
    expected = target_index(nf)
    if witness.target_index != expected:
        raise WitnessError(f"{nf}: construction aimed at f_{witness.target_index}, expected f_{expected}")
    product = witness.product(nf)
    if normalize(product) != normalize(GeneratorWord((expected,))):
        raise WitnessError(f"{nf}: {witness.left} * g * {witness.right} is not f_{expected}")
    level = min(mealy.level_cap(), nf.maximal_index + 2) if verify_level is None else verify_level
    if mealy.table(product.letters or "e", level) != mealy.table(GeneratorWord((expected,)).letters, level):
        raise WitnessError(f"{nf}: product and f_{expected} differ at level {level}")


# -- ideals inside W_n --------------------------------------------------------


def two_sided_ideal(W: FiniteSemigroup, seed) -> set[int]:
    """Indices of ``W g W`` for the element with table ``seed``."""
    gens = mealy.automaton_I().state_tables(W.level)
    gen_tables = [gens["s"].astype(W.tables.dtype), gens["f"].astype(W.tables.dtype)]
    start = W.find(seed)
    if start is None:
        raise KeyError("seed is not an element of W")
    seen = {start}
    stack = [start]
    while stack:
        j = stack.pop()
        t = W.tables[j]
        for gt in gen_tables:
            for u in (gt[t], t[gt]):  # right and left multiples
                k = W.index[u.tobytes()]
                if k not in seen:
                    seen.add(k)
                    stack.append(k)
    return seen


def trace_ideal_check(n: int) -> CheckReport:
    """At level n+3: the elements of trace at most 2^-n are the ideal of f_{n+3}."""
    level = n + 3
    W = enumerate_Wn(level)
    report = CheckReport("trace-ideal", level)
    ideal = two_sided_ideal(W, mealy.table(GeneratorWord((n + 3,)).letters, level))
    bound = Fraction(1, 2**n)
    small = set()
    for nf in wn_normal_forms(level):
        if nf.indices and nf.maximal_index >= 3 and trace_exact(nf).to_fraction() <= bound:
            small.add(W.find(mealy.table(nf.letters, level)))
    report.check("trace-bounded set equals the ideal of f_{n+3}", small == ideal)
    return report


def ideal_index(nf: NormalForm) -> int:
    """k with F g F = F f_k F.  Equal to target_index except at peak 3, where
    f_3 = z_1 makes the witness aim at f_4 although g has trace 1/2."""
    return 3 if nf.maximal_index == 3 else target_index(nf)


def search_multipliers(nf: NormalForm, k: int, level: int, max_length: int = 3):
    """Shortest {s, f}-words (l, r) with l g r = f_k on X^level, or None."""
    g = mealy.table(nf.letters, level)
    goal = mealy.table(GeneratorWord((k,)).letters, level)
    words = [w or "e" for w in words_up_to(max_length)]
    tables = [mealy.table(w, level) for w in words]
    for lw, lt in zip(words, tables):
        lg = lt @ g
        for rw, rt in zip(words, tables):
            if lg @ rt == goal:
                return lw, rw
    return None


def ideal_chain_check(level: int, max_peak: int) -> CheckReport:
    """Inside W_level: the ideals J_k = W f_k W are nested, and every normal
    form g of peak <= max_peak has W g W = J_k for k = ideal_index(g), so
    any two of these ideals are comparable."""
    W = enumerate_Wn(level)
    report = CheckReport("ideal-chain", level)
    ks = range(3, max_peak + 2)
    ideals = {k: two_sided_ideal(W, mealy.table(GeneratorWord((k,)).letters, level)) for k in ks}
    for k in ks:
        if k + 1 in ideals:
            report.check(f"J_{k + 1} within J_{k}", ideals[k + 1] <= ideals[k])
    for nf in normal_forms(max_peak):
        if not nf.indices:
            continue
        k = ideal_index(nf)
        j = W.find(mealy.table(nf.letters, level))
        report.check(f"{nf} in J_{k}", j in ideals[k])
        if k == target_index(nf):
            product = mealy.table(_construct(nf, 0).product(nf).letters, level)
            found = W.find(product) == W.find(mealy.table(GeneratorWord((k,)).letters, level))
        else:
            found = search_multipliers(nf, k, level) is not None
        report.check(f"f_{k} in ideal of {nf}", found)
    return report


# -- Hausdorff dimension ------------------------------------------------------


def hausdorff_sequence(n_max: int, precision: int = 50) -> list[mpmath.mpf]:
    """``log #W_n / log #End(X^n)`` for n = 1..n_max, via the order formula."""
    if n_max > 40:
        raise ValueError("hausdorff_sequence is limited to n <= 40")
    with mpmath.workdps(precision):
        return [
            mpmath.log(wn_order_formula(n)) / ((2**n - 1) * mpmath.log(4))
            for n in range(1, n_max + 1)
        ]


def wn_upper_bound(n: int) -> mpmath.mpf:
    phi = (1 + mpmath.sqrt(5)) / 2
    return (2 * phi) ** (n + 1)
