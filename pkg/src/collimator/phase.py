"""Phase vectors, sieve schedules and the resource ledger.

A phase vector of height ``h`` and length ``l`` stands for the state

    sum_j exp(2 pi i b(j) s / 2^h) |j>

and is described classically by its multiplier table ``b``. Tables are plain
tuples of Python ints so that heights well beyond 64 bits stay exact.
"""

from __future__ import annotations

from dataclasses import dataclass, field, fields
from typing import Sequence

MODES = ("heuristic", "rigorous", "regev")


def canonical_order(table: Sequence[int], sort_bits: int | None) -> list[int]:
    """Stable sort on the low ``sort_bits`` bits (``None``: on the full value).

    Entries sharing a residue keep their incoming order, so the ordering only
    ever depends on bits that the next collimation consumes.
    """
    if sort_bits is None:
        return sorted(table)
    if sort_bits <= 0:
        return list(table)
    mask = (1 << sort_bits) - 1
    return sorted(table, key=lambda v: v & mask)


@dataclass(frozen=True)
class PhaseVector:
    height: int
    table: tuple[int, ...]
    sort_bits: int | None = None

    def __post_init__(self):
        if self.height < 0:
            raise ValueError(f"height must be >= 0, got {self.height}")
        if not self.table:
            raise ValueError("phase vector must have length >= 1")
        bound = 1 << self.height
        for v in self.table:
            if not 0 <= v < bound:
                raise ValueError(f"entry {v} outside [0, 2^{self.height})")

    @property
    def length(self) -> int:
        return len(self.table)

    @property
    def qubits(self) -> int:
        """Register width ceil(log2 length)."""
        return (len(self.table) - 1).bit_length()

    @classmethod
    def build(cls, height: int, values, sort_bits: int | None = None) -> "PhaseVector":
        mask = (1 << height) - 1
        table = canonical_order([v & mask for v in values], sort_bits)
        return cls(height, tuple(table), sort_bits)


def normalize(v: PhaseVector) -> PhaseVector:
    """Shift the table so that its minimum is 0 (a global phase) and re-sort."""
    low = min(v.table)
    if low == 0:
        return v
    mask = (1 << v.height) - 1
    return PhaseVector.build(v.height, [(x - low) & mask for x in v.table], v.sort_bits)


@dataclass(frozen=True)
class Level:
    m: int
    r: int


@dataclass(frozen=True)
class Schedule:
    """Sieve parameters.

    ``levels`` is ordered from the leaves upward: ``levels[0]`` collimates the
    oracle-built leaf vectors and the last level produces height 1. In
    rigorous mode the last level may have ``r == 1``, which is the final
    single-vector measurement of the remaining low bits.
    """

    n: int
    levels: tuple[Level, ...]
    ell0: int
    mode: str = "heuristic"

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if self.mode not in MODES:
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.ell0 < 2:
            raise ValueError("ell0 must be >= 2")
        total = sum(lv.m for lv in self.levels)
        if total != self.n - 1:
            raise ValueError(f"level bits sum to {total}, need n-1 = {self.n - 1}")
        for k, lv in enumerate(self.levels):
            if lv.m < 1:
                raise ValueError(f"level {k}: m must be >= 1")
            last = k == len(self.levels) - 1
            if lv.r < 2 and not (lv.r == 1 and last and self.mode == "rigorous"):
                raise ValueError(f"level {k}: r must be >= 2")
        if self.mode == "regev" and self.ell0 != 2:
            raise ValueError("regev mode keeps length 2, so ell0 must be 2")

    def height_after(self, level: int) -> int:
        """Height of the vector produced at ``level`` (-1 means the leaves)."""
        return self.n - sum(lv.m for lv in self.levels[: level + 1])

    def sort_bits_after(self, level: int) -> int:
        """Low bits the consumer of a ``level`` output will collimate on."""
        if level + 1 < len(self.levels):
            return self.levels[level + 1].m
        # the final vector is split by its parity bit, except in rigorous mode
        # where the arbitrary pairing must not look at it
        return 0 if self.mode == "rigorous" else 1

    def as_dict(self) -> dict:
        return {
            "n": self.n,
            "mode": self.mode,
            "ell0": self.ell0,
            "levels": [{"m": lv.m, "r": lv.r} for lv in self.levels],
        }


_GAUGES = ("peak_classical_entries", "peak_qubits")


@dataclass
class CostLedger:
    """Resource counters for one or more sieve runs.

    Counters add up across runs, gauges combine by max. The ``live_*``
    fields track what is currently held on the depth-first path and feed the
    gauges; they are not part of the serialized ledger.
    """

    oracle_queries: int = 0
    classical_ops: int = 0
    qtime_qracm: int = 0
    qtime_noqracm: int = 0
    peak_classical_entries: int = 0
    peak_qubits: int = 0
    live_entries: int = field(default=0, repr=False, compare=False)
    live_qubits: int = field(default=0, repr=False, compare=False)

    def acquire(self, v: PhaseVector) -> None:
        self.live_entries += v.length
        self.live_qubits += v.qubits
        self.peak_classical_entries = max(self.peak_classical_entries, self.live_entries)
        self.peak_qubits = max(self.peak_qubits, self.live_qubits)

    def release(self, v: PhaseVector) -> None:
        self.live_entries -= v.length
        self.live_qubits -= v.qubits
        assert self.live_entries >= 0 and self.live_qubits >= 0

    def as_dict(self) -> dict[str, int]:
        return {f.name: getattr(self, f.name) for f in fields(self) if f.repr}

    def copy(self) -> "CostLedger":
        return CostLedger(**self.as_dict())


def merge_ledgers(a: CostLedger, b: CostLedger) -> CostLedger:
    out = {}
    for name, x in a.as_dict().items():
        y = getattr(b, name)
        out[name] = max(x, y) if name in _GAUGES else x + y
    return CostLedger(**out)
