"""Collimation of phase vectors.

Tensoring phase vectors ``b_1, ..., b_r`` of a common height ``h`` gives a
phase vector indexed by tuples with multiplier ``b_1(j_1) + ... + b_r(j_r)``.
Measuring that sum mod ``2^m`` keeps one congruence class ``c`` (the
bucket). Because every amplitude has the same magnitude, the Born rule picks
``c`` with probability ``|bucket(c)| / prod(l_i)``; sampling each ``j_i``
uniformly and reading off the class is therefore exact.

The surviving tuples are renumbered in lexicographic tuple order and then
stably sorted on the low bits the next collimation needs. Their multipliers
are ``(sum - c) / 2^m``, one global phase away from the literal quotient.
"""

from __future__ import annotations

import math
from collections import Counter, defaultdict
from dataclasses import dataclass
from typing import Sequence

from .phase import CostLedger, PhaseVector, canonical_order
from .rng import randbelow

DEFAULT_ENUM_BUDGET = 1 << 22


class CollimationBudgetError(RuntimeError):
    """Joint enumeration for r > 2 would exceed the configured budget."""


@dataclass(frozen=True)
class CollimationOutcome:
    c: int
    bucket_size: int


def _check_tables(tables: Sequence[Sequence[int]]) -> None:
    if not tables:
        raise ValueError("need at least one table")
    for t in tables:
        if len(t) == 0:
            raise ValueError("cannot collimate an empty table")


def _residue_histogram(table: Sequence[int], mask: int) -> Counter:
    return Counter(v & mask for v in table)


def bucket_size(tables: Sequence[Sequence[int]], m: int, c: int) -> int:
    """Number of joint indices whose multiplier sum is ``c`` mod ``2^m``."""
    _check_tables(tables)
    mask = (1 << m) - 1
    hists = [_residue_histogram(t, mask) for t in tables]
    acc = hists[0]
    for hist in hists[1:-1]:
        nxt: Counter = Counter()
        for a, x in acc.items():
            for b, y in hist.items():
                nxt[(a + b) & mask] += x * y
        acc = nxt
    if len(hists) == 1:
        return acc.get(c & mask, 0)
    last = hists[-1]
    return sum(x * last.get((c - a) & mask, 0) for a, x in acc.items())


def sample_class(tables: Sequence[Sequence[int]], m: int, rng) -> int:
    """Born-rule draw of the measured class: one uniform index per table."""
    return sum(t[randbelow(rng, len(t))] for t in tables) & ((1 << m) - 1)


def sample_collimation_outcome(tables: Sequence[Sequence[int]], m: int, rng) -> CollimationOutcome:
    _check_tables(tables)
    c = sample_class(tables, m, rng)
    return CollimationOutcome(c, bucket_size(tables, m, c))


def _joint_bucket(tables, m, c, budget, with_indices):
    """Sums (and tuples) of the bucket ``c``, in lexicographic tuple order."""
    mask = (1 << m) - 1
    *head, last = tables
    groups: dict[int, list[int]] = defaultdict(list)
    for j, v in enumerate(last):
        groups[v & mask].append(j)

    if head:
        size = math.prod(len(t) for t in head)
        if len(head) > 1 and size > budget:
            raise CollimationBudgetError(
                f"enumerating {size} partial tuples exceeds the budget of {budget}"
            )
    partials = [0]
    for t in head:
        partials = [a + b for a in partials for b in t]

    sums: list[int] = []
    hit_rows: list[tuple[int, int]] = []
    for row, partial in enumerate(partials):
        hits = groups.get((c - partial) & mask)
        if not hits:
            continue
        for j in hits:
            sums.append(partial + last[j])
            if with_indices:
                hit_rows.append((row, j))
    indices = [_unrank(row, head) + (j,) for row, j in hit_rows]
    return sums, indices


def _unrank(row: int, head) -> tuple[int, ...]:
    idx = []
    for t in reversed(head):
        row, j = divmod(row, len(t))
        idx.append(j)
    return tuple(reversed(idx))


def build_collimated_table(
    tables: Sequence[Sequence[int]],
    m: int,
    c: int,
    h: int,
    sort_bits: int | None = None,
    *,
    budget: int = DEFAULT_ENUM_BUDGET,
    return_indices: bool = False,
):
    """Multiplier table of the bucket ``c`` after dividing out ``2^m``.

    Returns ``(table, h - m)``; with ``return_indices`` the joint tuples that
    each new entry came from are returned as a third element (the inverse of
    the renumbering).
    """
    _check_tables(tables)
    if not 0 <= c < (1 << m):
        raise ValueError(f"class {c} outside [0, 2^{m})")
    if m > h:
        raise ValueError(f"cannot collimate {m} bits at height {h}")
    sums, indices = _joint_bucket(tables, m, c, budget, return_indices)
    if not sums:
        raise ValueError(f"bucket {c} is empty")
    new_h = h - m
    out_mask = (1 << new_h) - 1
    values = [((s - c) >> m) & out_mask for s in sums]
    if return_indices:
        order = _stable_order(values, sort_bits)
        return [values[i] for i in order], new_h, [indices[i] for i in order]
    return canonical_order(values, sort_bits), new_h


def _stable_order(values, sort_bits):
    if sort_bits is None:
        return sorted(range(len(values)), key=values.__getitem__)
    mask = (1 << sort_bits) - 1
    return sorted(range(len(values)), key=lambda i: values[i] & mask)


def collimate(
    vectors: Sequence[PhaseVector],
    m: int,
    ledger: CostLedger,
    rng,
    sort_bits: int | None = None,
    *,
    budget: int = DEFAULT_ENUM_BUDGET,
) -> PhaseVector:
    """Measure the joint multiplier mod ``2^m`` and return the collapsed vector.

    The caller keeps the inputs on the ledger until this returns; the output
    is acquired here so the gauges see inputs and output alive together.
    """
    if not vectors:
        raise ValueError("need at least one vector")
    h = vectors[0].height
    if any(v.height != h for v in vectors):
        raise ValueError("all vectors must share one height")
    if not 1 <= m < h:
        raise ValueError(f"need 1 <= m < h, got m={m}, h={h}")
    tables = [v.table for v in vectors]
    c = sample_class(tables, m, rng)
    table, new_h = build_collimated_table(tables, m, c, h, sort_bits, budget=budget)
    out = PhaseVector(new_h, tuple(table), sort_bits)

    lengths = [v.length for v in vectors]
    ledger.classical_ops += sum(lengths) + (1 << m) + out.length
    ledger.qtime_qracm += (sum(v.qubits for v in vectors) + m) ** 2
    ledger.qtime_noqracm += max(max(lengths), out.length)
    ledger.acquire(out)
    return out
