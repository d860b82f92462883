"""Depth-first collimation sieve and parity extraction.

The sieve builds a tree of collimations. Leaves are tensor products of oracle
states; each internal node collimates ``r`` children produced one after the
other, so only the current root-to-leaf path (plus finished siblings waiting
for their collimation) is ever alive.

Three modes share the recursion:

* ``heuristic``: collimation outputs are used as they come.
* ``rigorous``: every intermediate output is cut down to exactly ``ell0``
  entries by a segment measurement; the last level measures the remaining low
  bits of a single vector and the residue is split into pairs.
* ``regev``: like rigorous trimming but with ``ell0 = 2`` and wide arity.

A failed measurement destroys the state, so the affected subtree is grown
again from fresh oracle queries. Every such rebuild or restart is charged to
a per-run retry budget.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

from .collimate import DEFAULT_ENUM_BUDGET, collimate
from .oracle import OracleSpec, adjudicate_plus_minus, sample_initial_vector
from .phase import CostLedger, PhaseVector, Schedule
from .rng import randbelow

DEFAULT_RETRY_BUDGET = 10_000


class RetryBudgetExceeded(RuntimeError):
    pass


@dataclass
class LevelStats:
    level: int
    m: int
    r: int
    height: int
    collimations: int = 0
    bucket_min: int = 0
    bucket_max: int = 0
    bucket_total: int = 0
    buckets_at_least_ell0: int = 0
    discards: int = 0
    kept_min: int = 0
    kept_max: int = 0

    def record_bucket(self, length: int, ell0: int) -> None:
        if self.collimations == 0:
            self.bucket_min = self.bucket_max = length
        self.bucket_min = min(self.bucket_min, length)
        self.bucket_max = max(self.bucket_max, length)
        self.collimations += 1
        self.bucket_total += length
        self.buckets_at_least_ell0 += length >= ell0

    def record_kept(self, length: int) -> None:
        kept = self.collimations - self.discards
        if kept == 1:
            self.kept_min = self.kept_max = length
        self.kept_min = min(self.kept_min, length)
        self.kept_max = max(self.kept_max, length)

    @property
    def bucket_mean(self) -> float:
        return self.bucket_total / self.collimations if self.collimations else 0.0


@dataclass
class ExtractionStats:
    attempts: int = 0
    empty_subset: int = 0
    membership_failures: int = 0
    short_residue: int = 0
    pairing_failures: int = 0
    adjudications: int = 0
    informative: int = 0


@dataclass
class RunReport:
    schedule: Schedule
    levels: list[LevelStats]
    leaf_count: int = 0
    leaf_length_max: int = 0
    extraction: ExtractionStats = field(default_factory=ExtractionStats)
    rebuilds: int = 0
    restarts: int = 0
    parity: int | None = None
    ledger: dict | None = None

    @property
    def max_length(self) -> int:
        """Longest vector seen anywhere in the run (leaves and buckets)."""
        return max([self.leaf_length_max] + [s.bucket_max for s in self.levels])

    def as_dict(self) -> dict:
        levels = []
        for s in self.levels:
            d = asdict(s)
            d["bucket_mean"] = round(s.bucket_mean, 6)
            levels.append(d)
        return {
            "schedule": self.schedule.as_dict(),
            "parity": self.parity,
            "leaf_count": self.leaf_count,
            "leaf_length_max": self.leaf_length_max,
            "levels": levels,
            "extraction": asdict(self.extraction),
            "rebuilds": self.rebuilds,
            "restarts": self.restarts,
            "ledger": self.ledger,
        }


def tensor_product(vectors: list[PhaseVector], sort_bits: int | None = None) -> PhaseVector:
    """Tensor phase vectors of one height; indices run in lexicographic order."""
    h = vectors[0].height
    sums = [0]
    for v in vectors:
        if v.height != h:
            raise ValueError("all vectors must share one height")
        sums = [a + b for a in sums for b in v.table]
    return PhaseVector.build(h, sums, sort_bits)


def leaf_vector(
    oracle: OracleSpec, ell0: int, ledger: CostLedger, rng, sort_bits: int | None = None
) -> PhaseVector:
    """Tensor enough oracle states to reach length ``ell0``."""
    if ell0 < 2:
        raise ValueError("ell0 must be >= 2")
    width = len(oracle.factors)
    count = 1
    while width**count < ell0:
        count += 1
    vectors = [sample_initial_vector(oracle, rng, ledger) for _ in range(count)]
    return tensor_product(vectors, sort_bits)


def trim_measurement(v: PhaseVector, ell0: int, rng) -> PhaseVector | None:
    """Measure which length-``ell0`` segment of the index set the state is in.

    Returns the segment on success, ``None`` when the short leftover segment
    was hit (or the vector was too short to measure at all).
    """
    if v.length < ell0:
        return None
    j = randbelow(rng, v.length)
    seg = j // ell0
    if (seg + 1) * ell0 > v.length:
        return None
    return PhaseVector(v.height, v.table[seg * ell0 : (seg + 1) * ell0], v.sort_bits)


def regulate_length(v: PhaseVector, cap: int, rng) -> PhaseVector:
    """Cut an over-long vector down to at most ``cap`` entries.

    The index set is split into ``ceil(l / cap)`` contiguous segments of
    near-equal size and the segment is measured; no outcome is discarded.
    """
    if v.length <= cap:
        return v
    k = -(-v.length // cap)
    j = randbelow(rng, v.length)
    seg = j * k // v.length
    # segment i covers [ceil(i*l/k), ceil((i+1)*l/k)), which contains j
    lo = -(-seg * v.length // k)
    hi = -(-(seg + 1) * v.length // k)
    return PhaseVector(v.height, v.table[lo:hi], v.sort_bits)


def extract_parity(
    v: PhaseVector, oracle: OracleSpec, rng, stats: ExtractionStats | None = None
) -> int | None:
    """Turn a height-1 vector into a parity bit, or ``None`` on failure.

    Measures membership in a balanced subset X (as many 0-entries as
    1-entries); on success the pair holding the collapsed index is a qubit
    |0> + (-1)^s |1>.
    """
    if v.height != 1:
        raise ValueError(f"parity extraction needs height 1, got {v.height}")
    stats = stats if stats is not None else ExtractionStats()
    stats.attempts += 1
    zeros = [j for j, b in enumerate(v.table) if b == 0]
    ones = [j for j, b in enumerate(v.table) if b == 1]
    k = min(len(zeros), len(ones))
    if k == 0:
        stats.empty_subset += 1
        return None
    j = randbelow(rng, v.length)
    pair = {x: i for i, x in enumerate(zeros[:k])}
    pair.update({x: i for i, x in enumerate(ones[:k])})
    if j not in pair:
        stats.membership_failures += 1
        return None
    i = pair[j]
    qubit = PhaseVector(1, (v.table[zeros[i]], v.table[ones[i]]))
    outcome = adjudicate_plus_minus(oracle, qubit)
    stats.adjudications += 1
    stats.informative += outcome.informative
    return outcome.bit


class _Sieve:
    def __init__(self, schedule, oracle, ledger, rng, report, retry_budget, enum_budget):
        if schedule.n != oracle.n:
            raise ValueError(f"schedule is for n={schedule.n}, oracle has n={oracle.n}")
        self.schedule = schedule
        self.oracle = oracle
        self.ledger = ledger
        self.rng = rng
        self.report = report
        self.retry_budget = retry_budget
        self.enum_budget = enum_budget

    def charge_retry(self) -> None:
        if self.report.rebuilds + self.report.restarts >= self.retry_budget:
            raise RetryBudgetExceeded(
                f"more than {self.retry_budget} rebuilds/restarts in one run"
            )

    def trims(self, level: int) -> bool:
        sched = self.schedule
        if sched.mode == "regev":
            return True
        if sched.mode == "rigorous":
            return level < len(sched.levels) - 1 or sched.levels[level].r > 1
        return False

    def produce(self, level: int) -> PhaseVector:
        sched = self.schedule
        sort_bits = sched.sort_bits_after(level)
        if level < 0:
            v = leaf_vector(self.oracle, sched.ell0, self.ledger, self.rng, sort_bits)
            self.ledger.acquire(v)
            self.report.leaf_count += 1
            self.report.leaf_length_max = max(self.report.leaf_length_max, v.length)
            return v

        lv = sched.levels[level]
        stats = self.report.levels[level]
        while True:
            children = [self.produce(level - 1) for _ in range(lv.r)]
            out = collimate(children, lv.m, self.ledger, self.rng, sort_bits, budget=self.enum_budget)
            for child in children:
                self.ledger.release(child)
            stats.record_bucket(out.length, sched.ell0)
            if not self.trims(level):
                if level + 1 < len(sched.levels):
                    regulated = regulate_length(out, 4 << sched.levels[level + 1].m, self.rng)
                    if regulated is not out:
                        self.ledger.release(out)
                        self.ledger.acquire(regulated)
                        out = regulated
                stats.record_kept(out.length)
                return out
            kept = trim_measurement(out, sched.ell0, self.rng)
            self.ledger.release(out)
            if kept is None:
                stats.discards += 1
                self.charge_retry()
                self.report.rebuilds += 1
                continue
            self.ledger.acquire(kept)
            stats.record_kept(kept.length)
            return kept


def _new_report(schedule: Schedule) -> RunReport:
    levels = [
        LevelStats(k, lv.m, lv.r, schedule.height_after(k))
        for k, lv in enumerate(schedule.levels)
    ]
    return RunReport(schedule, levels)


def sieve(
    level: int,
    schedule: Schedule,
    oracle: OracleSpec,
    ledger: CostLedger,
    rng,
    *,
    report: RunReport | None = None,
    retry_budget: int = DEFAULT_RETRY_BUDGET,
    enum_budget: int = DEFAULT_ENUM_BUDGET,
) -> PhaseVector:
    """Produce one vector of height ``n - sum(m_k for k <= level)``.

    The returned vector is still held on ``ledger``; release it once used.
    """
    report = report if report is not None else _new_report(schedule)
    runner = _Sieve(schedule, oracle, ledger, rng, report, retry_budget, enum_budget)
    return runner.produce(level)


def run_parity(
    schedule: Schedule,
    oracle: OracleSpec,
    rng,
    *,
    ledger: CostLedger | None = None,
    retry_budget: int = DEFAULT_RETRY_BUDGET,
    enum_budget: int = DEFAULT_ENUM_BUDGET,
) -> tuple[int, CostLedger, RunReport]:
    """Run the sieve until a parity bit of the secret comes out."""
    ledger = ledger if ledger is not None else CostLedger()
    report = _new_report(schedule)
    runner = _Sieve(schedule, oracle, ledger, rng, report, retry_budget, enum_budget)
    top = len(schedule.levels) - 1
    ext = report.extraction
    while True:
        v = runner.produce(top)
        if schedule.mode == "rigorous":
            bit = _rigorous_final(v, oracle, rng, ext)
        else:
            bit = extract_parity(v, oracle, rng, ext)
        ledger.release(v)
        if bit is not None:
            break
        runner.charge_retry()
        report.restarts += 1
    report.parity = bit
    report.ledger = ledger.as_dict()
    return bit, ledger, report


def _rigorous_final(v: PhaseVector, oracle, rng, ext: ExtractionStats) -> int | None:
    """Pair the residual qudit's indices in order and adjudicate the pair."""
    ext.attempts += 1
    if v.length < 2:
        ext.short_residue += 1
        return None
    qubit = trim_measurement(v, 2, rng)
    if qubit is None:
        ext.pairing_failures += 1
        return None
    outcome = adjudicate_plus_minus(oracle, qubit)
    ext.adjudications += 1
    if not outcome.informative:
        return None
    ext.informative += 1
    return outcome.bit


def expected_log2_length(schedule: Schedule) -> list[float]:
    """Length exponents predicted by l_new = 2^-m * prod(l_i), per level."""
    x = math.log2(schedule.ell0)
    out = []
    for lv in schedule.levels:
        x = lv.r * x - lv.m
        out.append(x)
    return out
