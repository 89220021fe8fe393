"""Mealy machines acting on words, level-n transformation tables, wreath
decompositions, and the automaton I together with its action on the integers.

Actions are written on the right throughout: the product ``uv`` of two state
words first applies ``u`` and then ``v``.  A word ``x_1 ... x_n`` over the
alphabet ``{0, ..., d}`` is indexed big-endian, so the first letter is the most
significant digit and dropping the last letter is an integer division.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from typing import Iterable, Mapping, Sequence

import numpy as np

DEFAULT_LEVEL_CAP = 16
LEVEL_CAP_ENV = "FIBGROWTH_LEVEL_CAP"


class LevelCapError(ValueError):
    """Raised when a table would be built above the configured level cap."""


class MachineFormatError(ValueError):
    """Raised on malformed machine definitions or unknown states/letters."""


def level_cap() -> int:
    value = os.environ.get(LEVEL_CAP_ENV)
    if value is None:
        return DEFAULT_LEVEL_CAP
    try:
        cap = int(value)
    except ValueError:
        raise LevelCapError(f"{LEVEL_CAP_ENV}={value!r} is not an integer") from None
    if cap < 0:
        raise LevelCapError(f"{LEVEL_CAP_ENV} must be nonnegative, got {cap}")
    return cap


def check_level(level: int, cap: int | None = None) -> None:
    cap = level_cap() if cap is None else cap
    if level < 0:
        raise LevelCapError(f"level must be >= 0, got {level}")
    if level > cap:
        raise LevelCapError(f"level {level} exceeds the table level cap {cap}")


@dataclass(frozen=True, eq=False)
class MealyMachine:
    """A letter-to-letter transducer.

    ``transition[(i, q)]`` is the state reached from ``q`` on reading letter
    ``i`` and ``output[(i, q)]`` the letter written.  ``identity_states`` is
    computed when not given: the largest set of states that copy every letter
    and only move inside the set.
    """

    alphabet_size: int
    states: tuple[str, ...]
    transition: Mapping[tuple[int, str], str]
    output: Mapping[tuple[int, str], int]
    identity_states: frozenset[str] | None = None
    _tables: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        if self.alphabet_size < 2:
            raise MachineFormatError("alphabet must have at least two letters")
        object.__setattr__(self, "states", tuple(self.states))
        if len(set(self.states)) != len(self.states):
            raise MachineFormatError("duplicate state names")
        known = set(self.states)
        for q in self.states:
            for i in range(self.alphabet_size):
                if (i, q) not in self.transition or (i, q) not in self.output:
                    raise MachineFormatError(f"no edge for letter {i} at state {q!r}")
                if self.transition[(i, q)] not in known:
                    raise MachineFormatError(
                        f"edge from {q!r} leads to unknown state {self.transition[(i, q)]!r}"
                    )
                if not 0 <= self.output[(i, q)] < self.alphabet_size:
                    raise MachineFormatError(f"output letter out of range at state {q!r}")
        if self.identity_states is None:
            object.__setattr__(self, "identity_states", self._find_identity_states())
        else:
            object.__setattr__(self, "identity_states", frozenset(self.identity_states))

    def _find_identity_states(self) -> frozenset[str]:
        candidates = {
            q
            for q in self.states
            if all(self.output[(i, q)] == i for i in range(self.alphabet_size))
        }
        changed = True
        while changed:
            changed = False
            for q in list(candidates):
                if any(self.transition[(i, q)] not in candidates for i in range(self.alphabet_size)):
                    candidates.discard(q)
                    changed = True
        return frozenset(candidates)

    def edges(self) -> list[tuple[str, int, str, int]]:
        return [
            (q, i, self.transition[(i, q)], self.output[(i, q)])
            for q in self.states
            for i in range(self.alphabet_size)
        ]

    def state_word(self, word: str | Sequence[str]) -> tuple[str, ...]:
        """Split ``word`` into state names.

        Strings are read one character per state when every state name is a
        single character; otherwise they must be whitespace separated.
        """
        if isinstance(word, str):
            if all(len(q) == 1 for q in self.states) and " " not in word.strip():
                parts = tuple(word.strip())
            else:
                parts = tuple(word.split())
        else:
            parts = tuple(word)
        for q in parts:
            if q not in self.states:
                raise MachineFormatError(f"unknown state {q!r}")
        return parts

    def state_tables(self, level: int) -> dict[str, np.ndarray]:
        if level in self._tables:
            return self._tables[level]
        d = self.alphabet_size
        if level == 0:
            tables = {q: np.zeros(1, dtype=np.int64) for q in self.states}
        else:
            below = self.state_tables(level - 1)
            block = d ** (level - 1)
            tables = {}
            for q in self.states:
                parts = [
                    self.output[(i, q)] * block + below[self.transition[(i, q)]]
                    for i in range(d)
                ]
                arr = np.concatenate(parts)
                arr.setflags(write=False)
                tables[q] = arr
        self._tables[level] = tables
        return tables


@dataclass(frozen=True, eq=False)
class TransformationTable:
    """The map ``X^n -> X^n`` of one element, as a dense array of word indices."""

    level: int
    entries: np.ndarray
    alphabet_size: int = 2

    def __post_init__(self):
        entries = np.asarray(self.entries, dtype=np.int64)
        if entries.shape != (self.alphabet_size**self.level,):
            raise ValueError(
                f"a level-{self.level} table needs {self.alphabet_size ** self.level} entries"
            )
        if entries.flags.writeable:
            entries = entries.copy()
            entries.setflags(write=False)
        object.__setattr__(self, "entries", entries)

    def __eq__(self, other):
        if not isinstance(other, TransformationTable):
            return NotImplemented
        return (
            self.level == other.level
            and self.alphabet_size == other.alphabet_size
            and np.array_equal(self.entries, other.entries)
        )

    def __hash__(self):
        return hash((self.level, self.alphabet_size, self.key()))

    def key(self) -> bytes:
        return self.entries.tobytes()

    def __call__(self, index: int) -> int:
        return int(self.entries[index])

    def __matmul__(self, other: TransformationTable) -> TransformationTable:
        return compose(self, other)

    def truncate(self) -> TransformationTable:
        """The table one level down, read off through the first letters."""
        if self.level == 0:
            raise ValueError("cannot truncate a level-0 table")
        d = self.alphabet_size
        return TransformationTable(self.level - 1, self.entries[::d] // d, d)

    def power(self, k: int) -> TransformationTable:
        if k < 1:
            raise ValueError("powers start at 1")
        result = self
        for _ in range(k - 1):
            result = compose(result, self)
        return result

    def is_prefix_preserving(self) -> bool:
        t = self
        d = self.alphabet_size
        while t.level > 0:
            blocks = t.entries.reshape(-1, d) // d
            if not np.all(blocks == blocks[:, :1]):
                return False
            t = t.truncate()
        return True


def identity_table(level: int, alphabet_size: int = 2) -> TransformationTable:
    return TransformationTable(level, np.arange(alphabet_size**level), alphabet_size)


def compose(t1: TransformationTable, t2: TransformationTable) -> TransformationTable:
    """Apply ``t1`` then ``t2``."""
    if t1.level != t2.level or t1.alphabet_size != t2.alphabet_size:
        raise ValueError(f"cannot compose tables of levels {t1.level} and {t2.level}")
    return TransformationTable(t1.level, t2.entries[t1.entries], t1.alphabet_size)


def image_size(t: TransformationTable) -> int:
    return int(np.unique(t.entries).size)


def word_index(letters: Sequence[int], alphabet_size: int = 2) -> int:
    index = 0
    for x in letters:
        index = index * alphabet_size + x
    return index


def index_word(index: int, level: int, alphabet_size: int = 2) -> tuple[int, ...]:
    out = []
    for _ in range(level):
        index, r = divmod(index, alphabet_size)
        out.append(r)
    return tuple(reversed(out))


def _input_letters(machine: MealyMachine, word) -> tuple[int, ...]:
    letters = tuple(int(c) for c in word)
    for x in letters:
        if not 0 <= x < machine.alphabet_size:
            raise MachineFormatError(f"letter {x} out of range for alphabet size {machine.alphabet_size}")
    return letters


def act(machine: MealyMachine, state_word, input_word):
    """Image of ``input_word`` under the product of the states in ``state_word``."""
    states = machine.state_word(state_word)
    letters = list(_input_letters(machine, input_word))
    for q in states:
        current = q
        for pos, x in enumerate(letters):
            letters[pos] = machine.output[(x, current)]
            current = machine.transition[(x, current)]
    if isinstance(input_word, str):
        return "".join(str(x) for x in letters)
    return tuple(letters)


def transformation_table(
    machine: MealyMachine, state_word, level: int, cap: int | None = None
) -> TransformationTable:
    check_level(level, cap)
    states = machine.state_word(state_word)
    tables = machine.state_tables(level)
    entries = np.arange(machine.alphabet_size**level)
    for q in states:
        if q not in machine.identity_states:
            entries = tables[q][entries]
    return TransformationTable(level, entries, machine.alphabet_size)


def separating_level(machine: MealyMachine, w1, w2, max_level: int) -> int | None:
    """Smallest level at which ``w1`` and ``w2`` act differently, if any."""
    t1 = transformation_table(machine, w1, max_level)
    t2 = transformation_table(machine, w2, max_level)
    if t1 == t2:
        return None
    # differing at level n implies differing at every level above n
    while t1.level > 0:
        a, b = t1.truncate(), t2.truncate()
        if a == b:
            break
        t1, t2 = a, b
    return t1.level


# -- wreath decomposition ---------------------------------------------------

SIGMA = (1, 0)
ZETA = (0, 0)
ONE = (1, 1)
IDENTITY = (0, 1)
LETTER_MAP_NAMES = {SIGMA: "sigma", ZETA: "zeta", ONE: "one", IDENTITY: "id"}


@dataclass(frozen=True)
class Decomposition:
    """``<g_0, ..., g_d> pi``: coordinate state words and a first-letter map."""

    coords: tuple
    letter_map: tuple[int, ...]

    @property
    def letter_map_name(self) -> str:
        return LETTER_MAP_NAMES.get(self.letter_map, str(self.letter_map))

    def __str__(self):
        coords = ", ".join("".join(c) or "e" for c in self.coords)
        return f"<{coords}>{self.letter_map_name}"

    def table(self, machine: MealyMachine, level: int) -> TransformationTable:
        """Rebuild the level-n action letterwise from the decomposition."""
        check_level(level)
        d = machine.alphabet_size
        if level == 0:
            return identity_table(0, d)
        block = d ** (level - 1)
        parts = [
            self.letter_map[i] * block + transformation_table(machine, self.coords[i], level - 1).entries
            for i in range(d)
        ]
        return TransformationTable(level, np.concatenate(parts), d)


def decompose(state_word, machine: MealyMachine | None = None) -> Decomposition:
    """Wreath decomposition of a product of states, following each letter
    through the factors left to right.  Identity states are dropped from the
    coordinates."""
    machine = automaton_I() if machine is None else machine
    states = machine.state_word(state_word)
    coords = []
    images = []
    for i in range(machine.alphabet_size):
        letter = i
        coord = []
        for q in states:
            nxt = machine.transition[(letter, q)]
            letter = machine.output[(letter, q)]
            if nxt not in machine.identity_states:
                coord.append(nxt)
        images.append(letter)
        coords.append("".join(coord) if all(len(q) == 1 for q in machine.states) else tuple(coord))
    return Decomposition(tuple(coords), tuple(images))


# -- machine definition text format ---------------------------------------


def parse_machine(text: str) -> MealyMachine:
    alphabet = None
    states = None
    transition: dict = {}
    output: dict = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head, *rest = line.split()
        try:
            if head == "alphabet":
                (k,) = rest
                alphabet = int(k)
            elif head == "states":
                if not rest:
                    raise ValueError
                states = tuple(rest)
            elif head == "edge":
                src, letter_in, arrow, dst, letter_out = rest
                if arrow != "->":
                    raise ValueError
                key = (int(letter_in), src)
                if key in transition:
                    raise MachineFormatError(f"line {lineno}: duplicate edge {src} {letter_in}")
                transition[key] = dst
                output[key] = int(letter_out)
            else:
                raise MachineFormatError(f"line {lineno}: unknown directive {head!r}")
        except ValueError as exc:
            if isinstance(exc, MachineFormatError):
                raise
            raise MachineFormatError(f"line {lineno}: cannot parse {raw.strip()!r}") from None
    if alphabet is None or states is None:
        raise MachineFormatError("machine definition needs 'alphabet' and 'states' lines")
    for (i, q) in transition:
        if q not in states:
            raise MachineFormatError(f"edge from unknown state {q!r}")
        if not 0 <= i < alphabet:
            raise MachineFormatError(f"edge letter {i} out of range")
    return MealyMachine(alphabet, states, transition, output)


def format_machine(machine: MealyMachine) -> str:
    lines = [f"alphabet {machine.alphabet_size}", "states " + " ".join(machine.states)]
    lines += [f"edge {q} {i} -> {r} {o}" for q, i, r, o in machine.edges()]
    return "\n".join(lines) + "\n"


def load_machine(path: str | os.PathLike) -> MealyMachine:
    with open(path) as fh:
        return parse_machine(fh.read())


@lru_cache(maxsize=None)
def automaton_I() -> MealyMachine:
    text = resources.files("fibgrowth").joinpath("data/automaton_I.txt").read_text()
    return parse_machine(text)


def table(word, level: int) -> TransformationTable:
    """Level-n table of a word over {s, f} (or ``e``) in the automaton I."""
    return transformation_table(automaton_I(), word, level)


# -- action on the integers -------------------------------------------------


def int_action(letter: str, x: int) -> int:
    """The generators s and f as transformations of the integers."""
    if letter == "s":
        return x - 1 if x % 2 else x + 1
    if letter == "f":
        if x == 0:
            return -1
        n = (x & -x).bit_length() - 1
        if (x >> n) % 4 == 3:
            return x - 2**n - 1
        return x + 3 * 2**n - 1
    raise ValueError(f"unknown generator {letter!r}")


def theta(bits) -> int:
    """Read ``x_1 ... x_n`` as the residue of sum (1 - x_i) 2^(i-1) mod 2^n."""
    bits = tuple(int(c) for c in bits)
    if not bits:
        raise ValueError("theta needs at least one letter")
    return sum((1 - x) << i for i, x in enumerate(bits))


@dataclass
class ConjugacyReport:
    level: int
    checked: int
    violations: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


def check_theta_conjugacy(level: int, words: Iterable | None = None) -> ConjugacyReport:
    """Compare the automaton action with the integer action through theta.

    With ``words=None`` every word of length ``level`` is checked.
    """
    check_level(level)
    if level < 1:
        raise ValueError("theta conjugacy needs level >= 1")
    machine = automaton_I()
    modulus = 1 << level
    if words is None:
        words = (index_word(j, level) for j in range(modulus))
    tables = {g: transformation_table(machine, g, level) for g in "sf"}
    report = ConjugacyReport(level, 0)
    for x in words:
        x = tuple(int(c) for c in x)
        for g in "sf":
            image = index_word(tables[g](word_index(x)), level)
            lhs = theta(image)
            rhs = int_action(g, theta(x)) % modulus
            report.checked += 1
            if lhs != rhs:
                report.violations.append(("".join(map(str, x)), g, lhs, rhs))
    return report
