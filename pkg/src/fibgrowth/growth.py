"""Ball growth of F: exact counts of normal forms by length, a brute-force
count over tables, and the polynomial bounds with exponent
alpha = 1 + log 2 / log phi.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import mpmath
import numpy as np

from .mealy import automaton_I, level_cap, LevelCapError
from .words import fib

PRECISION = 60
BRUTEFORCE_MAX_LENGTH = 14
# int64 headroom: every count below is bounded by gamma(max_length)
_INT64_LIMIT = 2**62


def constants() -> dict[str, mpmath.mpf]:
    with mpmath.workdps(PRECISION):
        phi = (1 + mpmath.sqrt(5)) / 2
        alpha = 1 + mpmath.log(2) / mpmath.log(phi)
        base = 2 * mpmath.sqrt(5) ** alpha / (mpmath.sqrt(5) * phi**2 * (2 * phi - 1))
        return {"phi": phi, "alpha": alpha, "C": base / (2 * phi) ** alpha, "D": base}


def _shift_add(dst: np.ndarray, src: np.ndarray, shift: int) -> None:
    """dst[x] += src[x - shift] within bounds."""
    if shift < len(dst):
        dst[shift:] += src[: len(dst) - shift]


def sphere_counts(max_length: int) -> np.ndarray:
    """Number of elements of each exact length 0..max_length."""
    if max_length < 0:
        raise ValueError("max_length must be >= 0")
    size = max_length + 2  # one slot of slack for the epsilon shift
    counts = np.zeros(size, dtype=np.int64)
    counts[0] += 1  # e
    if max_length >= 1:
        counts[1] += 1  # s
    # subset sums of fib(1..peak-1), grown one item per peak
    tail = np.zeros(size, dtype=np.int64)
    tail[0] = 1
    peak = 1
    while True:
        _shift_add(tail, tail.copy(), fib(peak))
        peak += 1
        if peak < 3:
            continue
        if fib(peak) - 1 > max_length:
            break
        base = np.zeros(size, dtype=np.int64)
        _shift_add(base, tail, fib(peak))
        # ascending part chosen from {3..peak-2}, no two consecutive, scanned
        # downwards; track whether the item just above was taken and the
        # parity of the smallest index taken so far
        none = base
        free = [np.zeros(size, dtype=np.int64), np.zeros(size, dtype=np.int64)]
        blocked = [np.zeros(size, dtype=np.int64), np.zeros(size, dtype=np.int64)]
        for j in range(peak - 2, 2, -1):
            par = j % 2
            taken = np.zeros(size, dtype=np.int64)
            _shift_add(taken, none, fib(j))
            _shift_add(taken, free[0], fib(j))
            _shift_add(taken, free[1], fib(j))
            free = [free[0] + blocked[0], free[1] + blocked[1]]
            blocked = [np.zeros(size, dtype=np.int64), np.zeros(size, dtype=np.int64)]
            blocked[par] = taken
        by_parity = [free[0] + blocked[0], free[1] + blocked[1]]
        by_parity[peak % 2] = by_parity[peak % 2] + none
        even, odd = by_parity
        counts += even + odd  # epsilon = 0
        counts[1:] += even[:-1]  # epsilon = 1, even first index: one longer
        counts[:-1] += odd[1:]  # epsilon = 1, odd first index: one shorter
    result = counts[: max_length + 1]
    if result.sum() >= _INT64_LIMIT:
        raise OverflowError("growth counts exceed the int64 range")
    return result


def gamma_series(max_length: int) -> list[int]:
    """gamma(0), ..., gamma(max_length)."""
    return [int(x) for x in np.cumsum(sphere_counts(max_length))]


def gamma(length: int) -> int:
    return gamma_series(length)[length]


def gamma_bruteforce(length: int, start_level: int = 1) -> int:
    """Count distinct transformations among all {s, f}-words of length at most
    ``length``, raising the level until the count is the same at two
    consecutive levels."""
    if length > BRUTEFORCE_MAX_LENGTH:
        raise ValueError(f"brute force is limited to length {BRUTEFORCE_MAX_LENGTH}")
    cap = level_cap()
    previous = None
    for level in range(start_level, cap + 1):
        count = len(_distinct_tables(length, level))
        if count == previous:
            return count
        previous = count
    raise LevelCapError(f"count did not stabilise below level cap {cap}")


def _distinct_tables(length: int, level: int) -> set[bytes]:
    gens = automaton_I().state_tables(level)
    s, f = gens["s"], gens["f"]
    frontier = [np.arange(2**level)]
    seen = {frontier[0].tobytes()}
    for _ in range(length):
        nxt = []
        for t in frontier:
            for g in (s, f):
                u = g[t]
                nxt.append(u)
                seen.add(u.tobytes())
        frontier = nxt
    return seen


@dataclass
class GrowthReport:
    max_length: int
    counts: list[int]
    alpha: mpmath.mpf
    C: mpmath.mpf
    D: mpmath.mpf
    checkpoints: list[int] = field(default_factory=list)

    def ratio(self, length: int) -> mpmath.mpf:
        with mpmath.workdps(PRECISION):
            return mpmath.mpf(self.counts[length]) / mpmath.mpf(length) ** self.alpha

    def lower_ok(self, length: int) -> bool:
        with mpmath.workdps(PRECISION):
            return self.C * mpmath.mpf(length) ** self.alpha <= self.counts[length]

    def upper_ok(self, length: int) -> bool:
        with mpmath.workdps(PRECISION):
            return self.counts[length] <= self.D * mpmath.mpf(length) ** self.alpha

    def rows(self):
        for length in self.checkpoints:
            yield length, self.counts[length], self.ratio(length), self.lower_ok(length), self.upper_ok(length)

    def onset(self) -> int:
        """Smallest l0 >= 1 such that both bounds hold on [l0, max_length]."""
        l0 = self.max_length + 1
        for length in range(self.max_length, 0, -1):
            if not (self.lower_ok(length) and self.upper_ok(length)):
                break
            l0 = length
        return l0

    def ratio_array(self, lo: int, hi: int) -> np.ndarray:
        """Ratios on [lo, hi] in double precision, for sweeps."""
        lengths = np.arange(lo, hi + 1, dtype=np.float64)
        counts = np.array(self.counts[lo : hi + 1], dtype=np.float64)
        return counts / lengths ** float(self.alpha)

    def sweep(self, lo: int, hi: int) -> dict:
        r = self.ratio_array(lo, hi)
        return {
            "min": float(r.min()),
            "max": float(r.max()),
            "argmin": lo + int(r.argmin()),
            "argmax": lo + int(r.argmax()),
        }

    def fibonacci_peaks(self, lo: int, hi: int, spread: float = 0.05) -> list[dict]:
        """For each Fibonacci number F in [lo, hi], the position of the largest
        ratio within F(1 +- spread), and whether F itself is a local maximum."""
        out = []
        k = 2
        while fib(k) <= hi:
            F = fib(k)
            k += 1
            if F < lo or F + 1 > self.max_length:
                continue
            a = max(1, int(F * (1 - spread)))
            b = min(self.max_length, int(F * (1 + spread)))
            r = self.ratio_array(a, b)
            at = r[F - a]
            out.append({
                "fib": F,
                "argmax": a + int(r.argmax()),
                "ratio_at_fib": float(at),
                "ratio_max": float(r.max()),
                "local_max": bool(at > r[F - a - 1] and at > r[F - a + 1]),
            })
        return out


def growth_report(max_length: int, checkpoints=None) -> GrowthReport:
    if max_length > 10**6:
        raise ValueError("max_length is limited to 10**6")
    c = constants()
    counts = gamma_series(max_length)
    if checkpoints is None:
        checkpoints = sorted({x for x in (1, 2, 3, 5, 10, 100, 1000, 10**4, 10**5, 10**6) if x <= max_length})
    return GrowthReport(max_length, counts, c["alpha"], c["C"], c["D"], list(checkpoints))
