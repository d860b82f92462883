"""Full secret recovery, one bit at a time.

Once the parity of ``s`` is known, the instance on Z/2^n reduces to one on
Z/2^(n-1) with secret ``(s - parity) / 2``. Repeating down to n = 0 spells
out ``s`` from its lowest bit.
"""

from __future__ import annotations

from typing import Callable

from .costmodel import make_schedule
from .oracle import OracleSpec, adjudicate_plus_minus, reduce_oracle, sample_initial_vector
from .phase import CostLedger, PhaseVector, Schedule, merge_ledgers
from .rng import randbelow
from .sieve import DEFAULT_RETRY_BUDGET, RetryBudgetExceeded, run_parity

SMALL_CUTOFF = 3


def direct_parity(oracle: OracleSpec, rng, ledger: CostLedger, retry_budget: int = DEFAULT_RETRY_BUDGET) -> int:
    """Parity for tiny moduli without a sieve.

    Draws oracle states until two entries differ by exactly 2^(n-1); measuring
    membership in that pair leaves |0> + (-1)^s |1>.
    """
    half = 1 << (oracle.n - 1)
    mask = (1 << oracle.n) - 1
    for _ in range(retry_budget):
        v = sample_initial_vector(oracle, rng, ledger)
        pair = next(
            (
                (i, j)
                for i in range(v.length)
                for j in range(i + 1, v.length)
                if (v.table[j] - v.table[i]) & mask == half
            ),
            None,
        )
        if pair is None:
            continue
        if randbelow(rng, v.length) not in pair:
            continue
        qubit = PhaseVector(1, (0, 1))
        return adjudicate_plus_minus(oracle, qubit).bit
    raise RetryBudgetExceeded(f"no usable oracle state in {retry_budget} draws")


def recover_shift(
    oracle: OracleSpec,
    rng,
    schedule_family: Callable[[int], Schedule] | None = None,
    *,
    mode: str = "heuristic",
    retry_budget: int = DEFAULT_RETRY_BUDGET,
    reports: list | None = None,
) -> tuple[int, CostLedger]:
    """Recover the secret; returns it with the ledger summed over all bits."""
    if schedule_family is None:
        schedule_family = lambda k: make_schedule(k, mode)  # noqa: E731
    total = CostLedger()
    bits = []
    current = oracle
    while current.n > 0:
        ledger = CostLedger()
        if current.n <= SMALL_CUTOFF:
            bit = direct_parity(current, rng, ledger, retry_budget)
            report = None
        else:
            bit, ledger, report = run_parity(
                schedule_family(current.n), current, rng, retry_budget=retry_budget
            )
        if reports is not None:
            reports.append({"n": current.n, "bit": bit, "ledger": ledger.as_dict(), "report": report})
        total = merge_ledgers(total, ledger)
        bits.append(bit)
        current = reduce_oracle(current, bit)
    return sum(b << k for k, b in enumerate(bits)), total
