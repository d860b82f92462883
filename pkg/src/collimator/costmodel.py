"""Cost recurrences and schedule construction.

With r = 2 the time to make a height-1 vector from ``k`` uncollimated bits is
roughly

    f(k) = min_m (2^m + 2 f(k - m)),

one collimation of length about ``2^m`` on top of two recursive calls. Taking
logs and replacing sums by max gives the tropical recurrence

    g(k) = min_m max(m, g(k - m) + 1),   g(0) = 0,

whose solution satisfies g(m(m+1)/2) = m, i.e. g(k) ~ sqrt(2k).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .phase import Level, Schedule


@dataclass(frozen=True)
class TropicalSolution:
    g: tuple[int, ...]
    argmin_m: tuple[int, ...]

    def path(self, k: int) -> list[int]:
        """Collimation sizes from the top level down, summing to ``k``."""
        out = []
        while k > 0:
            m = self.argmin_m[k]
            out.append(m)
            k -= m
        return out


def solve_tropical_recurrence(n: int) -> TropicalSolution:
    if n < 0:
        raise ValueError("n must be >= 0")
    g = [0] * (n + 1)
    arg = [0] * (n + 1)
    for k in range(1, n + 1):
        best, best_m = None, 0
        for m in range(1, k + 1):
            if best is not None and m > best:
                break  # max(m, .) >= m cannot beat best any more
            val = max(m, g[k - m] + 1)
            # ties go to the larger m
            if best is None or val <= best:
                best, best_m = val, m
        g[k], arg[k] = best, best_m
    return TropicalSolution(tuple(g), tuple(arg))


def solve_numeric_recurrence(n: int) -> tuple[list[float], list[int]]:
    """log2 f(k) and its minimizing m for f(k) = min_m (2^m + 2 f(k-m)), f(0) = 1."""
    f = [1.0] * (n + 1)
    arg = [0] * (n + 1)
    for k in range(1, n + 1):
        best, best_m = math.inf, 0
        for m in range(1, k + 1):
            val = 2.0**m + 2.0 * f[k - m]
            if val <= best:
                best, best_m = val, m
        f[k], arg[k] = best, best_m
    return [math.log2(x) for x in f], arg


def make_schedule(n: int, mode: str = "heuristic") -> Schedule:
    """Automatic sieve schedule for modulus 2^n.

    Heuristic and regev schedules follow the tropical optimum: the largest
    collimation sits at the root and sizes shrink by about one bit per level
    toward the leaves, which keeps lengths near 2^(m+1) at every level. The
    rigorous schedule uses a constant m = ceil(sqrt(n)) and a final
    single-vector measurement of the leftover bits.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if n == 1:
        return Schedule(1, (), 2, mode)
    if mode == "rigorous":
        return _rigorous_schedule(n)
    top_down = solve_tropical_recurrence(n - 1).path(n - 1)
    sizes = top_down[::-1]
    if mode == "regev":
        return Schedule(n, tuple(Level(m, m + 1) for m in sizes), 2, "regev")
    if mode != "heuristic":
        raise ValueError(f"unknown mode {mode!r}")
    return Schedule(n, tuple(Level(m, 2) for m in sizes), 1 << _leaf_bits(sizes), "heuristic")


def _leaf_bits(sizes: list[int]) -> int:
    """Smallest leaf length exponent, at least m_1 + 1, that feeds every level.

    Lengths follow log2 l' = 2 log2 l - m, capped at m_next + 2 by the length
    regulation; each level wants inputs of at least 2^(m+1). A size jump in
    the schedule needs a longer start than 2^(m_1 + 1).
    """
    x = sizes[0] + 1
    while True:
        length = x
        ok = True
        for k, m in enumerate(sizes):
            if length < m + 1:
                ok = False
                break
            length = 2 * length - m
            if k + 1 < len(sizes):
                length = min(length, sizes[k + 1] + 2)
        if ok:
            return x
        x += 1


def _rigorous_schedule(n: int) -> Schedule:
    m = max(2, math.isqrt(n - 1) + 1)  # ceil(sqrt(n))
    full = (n - 2) // m
    last = n - 1 - full * m
    levels = [Level(m, 2)] * full + [Level(last, 1)]
    return Schedule(n, tuple(levels), 1 << (m + 1), "rigorous")


def predict_cost(n: int) -> dict:
    """Predicted log2 costs and reference curves."""
    if n < 1:
        raise ValueError("n must be >= 1")
    log3 = math.log2(3)
    f_log2, _ = solve_numeric_recurrence(n)
    return {
        "n": n,
        "new": math.sqrt(2 * n),
        "old": math.sqrt(2 * n / log3) * log3,
        "numeric": f_log2[n],
        "tropical": solve_tropical_recurrence(n).g[n],
        "regev_space": "constant length 2 per register; arity m+1 per level",
    }
