"""Verification suites.  Verdicts always come from transformation tables;
the rewriting engine is only used to enumerate elements."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import mealy
from .quotients import enumerate_Wn, normal_forms, w_word
from .rewrite import generator_decomposition, normalize, nf_length, symbolic_decompose
from .words import GeneratorWord, e_word, fib_letters, lemma_prefix_identity, relation_words, z_word

PASS, FAIL, INCONCLUSIVE = "pass", "fail", "inconclusive"

STRENGTHENING_WORDS = ("e", "s", "f", "fs", "ff", "ffs")


@dataclass
class VerificationReport:
    suite: str
    parameters: dict
    cases: int = 0
    failures: list = field(default_factory=list)
    inconclusive: list = field(default_factory=list)
    notes: list = field(default_factory=list)

    @property
    def verdict(self) -> str:
        if self.failures:
            return FAIL
        if self.inconclusive:
            return INCONCLUSIVE
        return PASS

    @property
    def ok(self) -> bool:
        return self.verdict == PASS

    def record(self, passed: bool, witness: str, level: int, detail: str = "") -> None:
        self.cases += 1
        if not passed:
            self.failures.append({"witness": witness, "level": level, "detail": detail})

    def summary(self) -> str:
        level = self.parameters.get("level")
        scope = f", verified up to level {level}" if level is not None else ""
        return (
            f"{self.suite}: {self.verdict} ({self.cases} cases, {len(self.failures)} failures, "
            f"{len(self.inconclusive)} inconclusive{scope})"
        )

    def to_dict(self) -> dict:
        return {
            "suite": self.suite,
            "parameters": self.parameters,
            "verdict": self.verdict,
            "cases": self.cases,
            "failures": self.failures,
            "inconclusive": self.inconclusive,
            "notes": self.notes,
        }


def _t(word, level: int) -> mealy.TransformationTable:
    letters = word.letters if isinstance(word, GeneratorWord) else word
    return mealy.table(letters or "e", level)


def _powers_equal(tables: np.ndarray, high: int, low: int) -> np.ndarray:
    """Row-wise test of g^high == g^low for a stack of tables."""
    powers = {1: tables}
    current = tables
    for k in range(2, high + 1):
        current = np.take_along_axis(tables, current, axis=1)
        powers[k] = current
    return (powers[high] == powers[low]).all(axis=1)


def _random_words(rng: np.random.Generator, count: int, max_len: int) -> list[str]:
    lengths = rng.integers(1, max_len + 1, size=count)
    return ["".join(rng.choice(["s", "f"], size=int(n))) for n in lengths]


def check_identity(
    level: int,
    mode: str = "all",
    count: int = 1000,
    max_len: int = 15,
    seed: int = 0,
    strengthened: bool = True,
) -> VerificationReport:
    """g^6 = g^4 on every element of W_level, or on random words; the random
    mode also checks g (w g)^5 = g (w g)^3 for the six words w."""
    report = VerificationReport("identity", {"level": level, "mode": mode})
    if mode == "all":
        W = enumerate_Wn(level)
        ok = _powers_equal(W.tables.astype(np.int64), 6, 4)
        for j in np.flatnonzero(~ok):
            report.record(False, W.word(int(j)) or "e", level, "g^6 != g^4")
        report.cases += int(ok.sum())
        return report
    if mode != "random":
        raise ValueError(f"unknown mode {mode!r}")
    mealy.check_level(level)
    report.parameters.update(count=count, max_len=max_len, seed=seed)
    rng = np.random.default_rng(seed)
    w_tables = {w: _t(w, level) for w in STRENGTHENING_WORDS}
    for g in _random_words(rng, count, max_len):
        tg = _t(g, level)
        report.record(tg.power(6) == tg.power(4), g, level, "g^6 != g^4")
        if strengthened:
            for w, tw in w_tables.items():
                wg = tw @ tg
                report.record(tg @ wg.power(5) == tg @ wg.power(3), f"{g} with w={w}", level, "g(wg)^5 != g(wg)^3")
    return report


def check_relations(n_max: int, level: int) -> VerificationReport:
    mealy.check_level(level)
    report = VerificationReport("relations", {"n_max": n_max, "level": level})
    for k in range(1, n_max + 1):
        r, rp = relation_words(k)
        report.record(_t(r, level) == _t(rp, level), f"r_{k}", level)
    return report


def check_no_solution(max_ball_length: int, level: int) -> VerificationReport:
    """No x of length <= max_ball_length solves sfsffx = fx, and none solves
    sfx = fsx; every x gets a separating level."""
    mealy.check_level(level)
    report = VerificationReport("no-solution", {"max_ball_length": max_ball_length, "level": level})
    machine = mealy.automaton_I()
    peak = 3
    while len(fib_letters(peak)) - 1 <= max_ball_length:
        peak += 1
    equations = (("sfsff", "f"), ("sf", "fs"))
    for nf in normal_forms(peak):
        if nf_length(nf) > max_ball_length:
            continue
        x = nf.minimal_letters()
        for lhs, rhs in equations:
            report.cases += 1
            if mealy.separating_level(machine, lhs + x, rhs + x, level) is None:
                report.inconclusive.append({"witness": x or "e", "level": level, "detail": f"{lhs}x = {rhs}x"})
    return report


def check_contraction(max_len: int) -> VerificationReport:
    """Both coordinates of g have length at most (2/3)(|g| + 2)."""
    if max_len > 14:
        raise ValueError("contraction sweep is limited to length 14")
    report = VerificationReport("contraction", {"max_len": max_len})
    peak = 3
    while len(fib_letters(peak)) - 1 <= max_len:
        peak += 1
    for nf in normal_forms(peak):
        length = nf_length(nf)
        if length > max_len:
            continue
        if not nf.indices:
            report.record(True, str(nf), 0)
            continue
        d = symbolic_decompose(nf)
        for coord in (d.u0, d.u1):
            report.record(3 * nf_length(coord) <= 2 * (length + 2), str(nf), 0, f"coordinate {coord}")
    return report


def check_lemma_suite(level: int, max_index: int = 10) -> VerificationReport:
    """Auxiliary identities on tables, for all parameters with indices <= max_index."""
    mealy.check_level(level)
    report = VerificationReport("lemmas", {"level": level, "max_index": max_index})
    G = GeneratorWord
    t = lambda w: _t(w, level)

    def same(lhs, rhs, label):
        report.record(t(lhs) == t(rhs), label, level)

    for a in range(3, max_index + 1):
        for b in range(1, a - 1):
            same(G((a, b, b)), G((a,)), f"f_{a} f_{b}^2 = f_{a}")
    for n in range(2, max_index + 1):
        squares = tuple(i for i in range(1, n - 1) for _ in (0, 1))
        same(relation_words(n)[1], G(squares + (n + 1,)), f"r'_{n} squares form")
    for n in range(1, max_index + 1):
        same(G((n,) * 5), G((n,) * 3), f"f_{n}^5 = f_{n}^3")
        if n <= 4:
            same(G((n,) * 4), G((n,) * 2), f"f_{n}^4 = f_{n}^2")
    for n in range(1, max_index - 2):
        same(G((n + 1, n, n, n + 2)), G((n + 3,)), f"f_{n + 1} f_{n}^2 f_{n + 2} = f_{n + 3}")
    for n in range(8, max_index + 1):
        same(G((n - 2, n - 3, n - 5, n - 7, n - 2, n)), G((n,)), f"reducer chain at {n}")
    for m in range(6, max_index + 1):
        for k in range(3 if m <= 7 else 2, m - 1):
            if (k, m) == (4, 6) or (m == 6 and k != 3) or (m == 7 and k < 3):
                continue
            same(w_word(k, m) + G((k, m)), G((m,)), f"w({k},{m}) f_{k} f_{m} = f_{m}")
    for n in range(4, max_index):
        prefix = "fsfs" if n % 2 == 0 else "sffs"
        if n >= 4 + n % 2:
            same(G((n, n - 1)), G.from_letters(prefix) + G((n + 1,)), f"f_{n} f_{n - 1} = {prefix} f_{n + 1}")
    for n in range(2, max_index - 2):
        same(z_word(n), G.from_letters("fs" if n % 2 == 0 else "sfs") + G((n + 3,)), f"z_{n} via f_{n + 3}")
    for n in range(5, max_index + 1):
        same(G((n,)), G.from_letters("f" if n % 2 == 0 else "sf") + z_word(n - 3), f"f_{n} via z_{n - 3}")
    for n in range(3, max_index + 1):
        for k in range(2 - n % 2, n - 1, 2):
            report.record(lemma_prefix_identity(k, n), f"prefix identity k={k} n={n}", 0)
    _decomposition_checks(report, level, max_index)
    return report


def _decomposition_checks(report: VerificationReport, level: int, max_index: int) -> None:
    """phi(f_n): the direct decomposition on tables against the closed forms.
    <f_{n-1}, e_{n-1}> zeta needs n >= 5; for n = 4 the second coordinate is f^2."""
    sub = level - 1
    for n in range(1, max_index + 1):
        direct = mealy.decompose(fib_letters(n))
        u0, u1, letter_map = generator_decomposition(n)
        coords = [mealy.transformation_table(mealy.automaton_I(), c or "e", sub) for c in direct.coords]
        ok = (
            coords[0] == _t(GeneratorWord(u0), sub)
            and coords[1] == _t(GeneratorWord(u1), sub)
            and tuple(direct.letter_map) == tuple(letter_map)
        )
        report.record(ok, f"decomposition of f_{n}", sub)
        if n >= 5:
            closed = coords[0] == _t(GeneratorWord((n - 1,)), sub) and coords[1] == _t(e_word(n - 1), sub)
            report.record(closed, f"phi(f_{n}) = <f_{n - 1}, e_{n - 1}> zeta", sub)
        # symbolic route agrees with the direct one
        nf = normalize(GeneratorWord((n,)))
        if nf.indices:
            d = symbolic_decompose(nf)
            report.record(
                coords[0] == _t(d.u0.letters, sub) and coords[1] == _t(d.u1.letters, sub),
                f"symbolic decomposition of f_{n}",
                sub,
            )
    if max_index >= 4:
        d4 = mealy.decompose(fib_letters(4))
        e3 = _t(e_word(3), sub)
        if mealy.transformation_table(mealy.automaton_I(), d4.coords[1] or "e", sub) != e3:
            report.notes.append("phi(f_4) has second coordinate f^2, not e_3 = e")


SUITES = {
    "identity": lambda level, max_len: check_identity(level or 6),
    "relations": lambda level, max_len: check_relations(12, level or 14),
    "no-solution": lambda level, max_len: check_no_solution(max_len or 10, level or 12),
    "contraction": lambda level, max_len: check_contraction(max_len or 14),
    "lemmas": lambda level, max_len: check_lemma_suite(level or 12),
}


def run_suite(name: str, level: int | None = None, max_len: int | None = None) -> VerificationReport:
    if name not in SUITES:
        raise KeyError(f"unknown suite {name!r}; choose from {', '.join(SUITES)}")
    return SUITES[name](level, max_len)
