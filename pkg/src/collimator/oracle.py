"""Synthetic hidden-shift oracle.

The oracle hands out post-measurement states: after the Fourier mode ``b`` is
measured (uniformly at random), the index register holds

    sum_j exp(2 pi i r_j b s / 2^n) |j>

so we emit the multiplier table ``(r_j * b mod 2^n)_j`` directly. This is the
only module that looks at the secret.
"""

from __future__ import annotations

from dataclasses import dataclass

from .phase import CostLedger, PhaseVector, normalize
from .rng import randbits


def default_factors(count: int) -> tuple[int, ...]:
    """``(0, 1, 3, 5, ...)``: odd factors are invertible mod 2^n."""
    if count < 2:
        raise ValueError("need at least two shifts")
    return (0,) + tuple(2 * k - 1 for k in range(1, count))


@dataclass(frozen=True)
class OracleSpec:
    n: int
    secret: int
    factors: tuple[int, ...] = (0, 1)

    def __post_init__(self):
        if self.n < 0:
            raise ValueError("n must be >= 0")
        if not 0 <= self.secret < (1 << self.n):
            raise ValueError(f"secret {self.secret} outside [0, 2^{self.n})")
        if len(self.factors) < 2:
            raise ValueError("need at least two shift factors")
        if self.factors[0] != 0:
            raise ValueError("first shift factor must be 0")
        if any(not 0 <= r < (1 << self.n) for r in self.factors):
            raise ValueError("shift factors must lie in [0, 2^n)")


@dataclass(frozen=True)
class ParityOutcome:
    bit: int
    informative: bool


def sample_initial_vector(
    oracle: OracleSpec, rng, ledger: CostLedger | None = None, sort_bits: int | None = None
) -> PhaseVector:
    b = randbits(rng, oracle.n)
    if ledger is not None:
        ledger.oracle_queries += 1
    return initial_vector(oracle, b, sort_bits)


def initial_vector(oracle: OracleSpec, b: int, sort_bits: int | None = None) -> PhaseVector:
    """The state left behind when Fourier mode ``b`` was measured."""
    v = PhaseVector.build(oracle.n, [r * b for r in oracle.factors], sort_bits)
    return normalize(v)


def reduce_oracle(oracle: OracleSpec, parity: int) -> OracleSpec:
    """Peel off the lowest bit of the secret once its parity is known."""
    if oracle.n < 1:
        raise ValueError("cannot reduce a terminal instance")
    if parity != oracle.secret & 1:
        raise ValueError(
            f"parity {parity} does not match the secret; the sieve returned a wrong bit"
        )
    n = oracle.n - 1
    mask = (1 << n) - 1
    factors = (0,) + tuple(r & mask for r in oracle.factors[1:])
    return OracleSpec(n, (oracle.secret - parity) >> 1, factors)


def adjudicate_plus_minus(oracle: OracleSpec, qubit: PhaseVector) -> ParityOutcome:
    """Measure a height-1 qubit in the +/- basis.

    When the two multipliers differ the state is |0> + (-1)^s |1> up to a
    global phase, and the measurement returns the parity of ``s`` with
    certainty. Equal multipliers give |+>, which says nothing.
    """
    if qubit.length != 2 or qubit.height != 1:
        raise ValueError(
            f"expected a length-2 height-1 qubit, got length {qubit.length} height {qubit.height}"
        )
    a, b = qubit.table
    if a == b:
        return ParityOutcome(0, False)
    return ParityOutcome(oracle.secret & 1, True)
