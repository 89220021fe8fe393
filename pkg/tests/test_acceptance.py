"""Acceptance criteria, one test and one PASS/FAIL line each.

Run ``pytest tests/test_acceptance.py -v`` (lines appear in the summary) or
``python tests/test_acceptance.py`` (lines go straight to stdout).
"""

import random
import sys
import time
from functools import lru_cache
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).parent))

from conftest import ACCEPTANCE_LINES, ball  # noqa: E402
from fibgrowth import growth, mealy, quotients, verify  # noqa: E402
from fibgrowth.rewrite import (  # noqa: E402
    all_reducts,
    applicable_rules,
    apply_rule,
    nf_length,
    normalize,
    termination_measure,
)
from fibgrowth.words import GeneratorWord  # noqa: E402


def report(number: int, ok: bool, text: str) -> None:
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {text}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line


@lru_cache(maxsize=None)
def w8_normal_forms():
    W = quotients.enumerate_Wn(8)
    return [normalize(W.word(j)) for j in range(len(W))]


def test_criterion_01_reduction_diagram():
    start = time.perf_counter()
    nf = normalize("f4 f3 f3 f4")
    reducts = all_reducts((4, 3, 3, 4))
    elapsed = time.perf_counter() - start
    ok = str(nf) == "f1 f3 f5" and reducts == {(1, 3, 5)} and elapsed < 1
    report(1, ok, f"f4 f3^2 f4 -> {nf}; all reduction paths end in {sorted(reducts)}; {elapsed:.3f}s")


def test_criterion_02_relations():
    start = time.perf_counter()
    r = verify.check_relations(12, 14)
    elapsed = time.perf_counter() - start
    report(2, r.ok and elapsed < 60, f"r_k = r'_k at level 14 for k <= 12; {len(r.failures)} failures; {elapsed:.1f}s")


def test_criterion_03_normal_forms():
    by_table, by_nf = {}, {}
    clashes = 0
    words = ball(12, 14)
    for w, key in words:
        nf = normalize(w or "e")  # NormalForm rejects any misshapen reduct
        if by_table.setdefault(key, nf) != nf or by_nf.setdefault(nf, key) != key:
            clashes += 1
    minimal = {}
    for w, key in ball(10, 14):
        minimal.setdefault(key, len(w))
    length_bad = sum(1 for w, key in ball(10, 14) if nf_length(normalize(w or "e")) != minimal[key])
    ok = clashes == 0 and length_bad == 0
    report(
        3,
        ok,
        f"{len(words)} words of length <= 12 give {len(by_table)} tables and {len(by_nf)} normal forms; "
        f"{clashes} clashes; {length_bad} length mismatches on the radius-10 ball",
    )


def test_criterion_04_termination_measure():
    rng = random.Random(1)
    applications = 0
    failures = []
    for _ in range(10**4):
        w = tuple(rng.randint(1, 12) for _ in range(rng.randint(1, 20)))
        for pos, rule in applicable_rules(w):
            applications += 1
            if not termination_measure(apply_rule(w, pos, rule)) < termination_measure(w):
                failures.append((w[:3], pos, str(rule)))
    detail = "; ".join(f"{rule} at {pos} on prefix {pre}" for pre, pos, rule in failures[:3])
    report(
        4,
        not failures,
        f"eta strictly decreases in {applications - len(failures)}/{applications} rewrites"
        + (f"; increases: {detail}" if failures else ""),
    )


def test_criterion_05_growth():
    start = time.perf_counter()
    dp = growth.gamma_series(12)
    brute = [growth.gamma_bruteforce(ell) for ell in range(13)]
    r = growth.growth_report(10**5)
    sweep = r.sweep(10**3, 10**5)
    in_range = 0.195 <= sweep["min"] and sweep["max"] <= 0.215
    spread = sweep["max"] - sweep["min"]
    peaks = r.fibonacci_peaks(10**3, 10**5)
    at_fib = all(p["local_max"] for p in peaks)
    offsets = ", ".join(f"{p['argmax']}~{p['fib']}" for p in peaks[-3:])
    onset = r.onset()
    sandwich = onset <= 10**5
    elapsed = time.perf_counter() - start
    checks = {
        "dp=brute": dp == brute,
        "range": in_range,
        "spread": spread >= 0.002,
        "fib-maxima": at_fib,
        "sandwich": sandwich,
        "time": elapsed < 120,
    }
    failed = [k for k, v in checks.items() if not v]
    report(
        5,
        not failed,
        f"ratio in [{sweep['min']:.5f}, {sweep['max']:.5f}], spread {spread:.5f}, onset l0={onset}, "
        f"peaks (argmax~fib) {offsets}; failed sub-checks: {failed or 'none'}; {elapsed:.1f}s",
    )


def test_criterion_06_quotient_orders():
    start = time.perf_counter()
    sizes = [len(quotients.enumerate_Wn(n)) for n in range(1, 9)]
    formula = [quotients.wn_order_formula(n) for n in range(1, 9)]
    elapsed = time.perf_counter() - start
    report(6, sizes == formula and elapsed < 300, f"|W_1..W_8| = {sizes}; formula {formula}; {elapsed:.1f}s")


def test_criterion_07_identity():
    exhaustive = verify.check_identity(6)
    strengthened = verify.check_identity(12, mode="random", count=1000, max_len=15, seed=0)
    ok = exhaustive.ok and strengthened.ok
    report(
        7,
        ok,
        f"g^6 = g^4 on all {exhaustive.cases} elements of W_6; g(wg)^5 = g(wg)^3 on {strengthened.cases} "
        f"random checks at level 12; {len(exhaustive.failures) + len(strengthened.failures)} failures",
    )


def test_criterion_08_traces():
    consistency = quotients.CheckReport("trace-consistency", 8)
    for nf in w8_normal_forms():
        if nf.indices and nf.maximal_index >= 3:
            level = min(mealy.level_cap(), nf.maximal_index + 3)
            value, _ = quotients.stabilized_trace(nf, level)
            consistency.check(str(nf), value == quotients.trace_exact(nf))
    spots = [str(quotients.trace_exact(normalize(w))) for w in ("f3", "f5", "f5 f4")]
    ok = consistency.ok and spots == ["1/2", "1/4", "1/8"]
    report(8, ok, f"{consistency.cases} elements of W_8 agree with the stabilised image ratio; spots {spots}")


def test_criterion_09_ideals():
    refuted = []
    witnessed = 0
    for nf in set(w8_normal_forms()):
        if nf.indices and 3 <= nf.maximal_index <= 8:
            try:
                quotients.ideal_witnesses(nf)
                witnessed += 1
            except quotients.WitnessError as exc:
                refuted.append(str(exc))
    agreement = {n: quotients.trace_ideal_check(n).ok for n in range(1, 6)}
    ok = not refuted and all(agreement.values())
    bad_n = [n for n, v in agreement.items() if not v]
    report(
        9,
        ok,
        f"{witnessed} witnesses confirmed, {len(refuted)} refuted; I_n = F_(2^-n) holds for "
        f"n in {[n for n, v in agreement.items() if v]}" + (f", fails for n in {bad_n}" if bad_n else ""),
    )


def test_criterion_10_theta():
    violations = sum(len(mealy.check_theta_conjugacy(n).violations) for n in range(1, 13))
    edge = all(
        mealy.theta(mealy.act(mealy.automaton_I(), "f", "1" * n)) == mealy.int_action("f", 0) % 2**n
        for n in range(1, 13)
    )
    report(10, violations == 0 and edge, f"levels 1..12 exhaustive, {violations} violations; all-ones case ok={edge}")


def test_criterion_11_hausdorff():
    h = quotients.hausdorff_sequence(40)
    decreasing = all(h[n - 1] > h[n] for n in range(3, 40))
    ok = h[11] < 0.01 and decreasing
    report(11, ok, f"h_12 = {float(h[11]):.6f}; decreasing on 3..40: {decreasing}; h_40 = {float(h[39]):.3e}")


def test_criterion_12_fin_order():
    pairs = [(quotients.quotient_FIn_order(n), len(quotients.enumerate_Wn(n)) - 2**n + 1) for n in range(2, 7)]
    report(12, all(a == b for a, b in pairs), f"formula vs |W_n| - 2^n + 1 for n = 2..6: {pairs}")


if __name__ == "__main__":
    status = 0
    for name, fn in sorted(globals().items()):
        if name.startswith("test_criterion_"):
            try:
                fn()
            except AssertionError:
                status = 1
    sys.exit(status)
