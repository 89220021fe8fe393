from functools import lru_cache

import numpy as np

from fibgrowth import mealy


@lru_cache(maxsize=None)
def index_table(k: int, level: int) -> np.ndarray:
    """Entries of f_k at the given level, built from f_k = f_{k-2} f_{k-1}."""
    if k <= 2:
        return mealy.table("sf"[k - 1], level).entries
    left, right = index_table(k - 2, level), index_table(k - 1, level)
    return right[left]


def word_table(indices, level: int) -> np.ndarray:
    entries = np.arange(2**level)
    for k in indices:
        entries = index_table(k, level)[entries]
    return entries


def same_element(u, v, level: int) -> bool:
    return np.array_equal(word_table(u, level), word_table(v, level))


@lru_cache(maxsize=None)
def ball(max_len: int, level: int):
    """Every {s, f}-word of length <= max_len with its table key, breadth first."""
    gens = [mealy.table(c, level).entries for c in "sf"]
    out = [("", np.arange(2**level).tobytes())]
    frontier = [("", np.arange(2**level))]
    for _ in range(max_len):
        nxt = []
        for w, t in frontier:
            for c, g in zip("sf", gens):
                u = g[t]
                nxt.append((w + c, u))
                out.append((w + c, u.tobytes()))
        frontier = nxt
    return out


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
