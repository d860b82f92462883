import itertools
from collections import Counter

import numpy as np
import pytest
from scipy.stats import chisquare

from collimator.oracle import (
    OracleSpec,
    ParityOutcome,
    adjudicate_plus_minus,
    default_factors,
    initial_vector,
    reduce_oracle,
    sample_initial_vector,
)
from collimator.phase import CostLedger, PhaseVector
from collimator.statevec import phase_state


def test_initial_vector_two_shifts():
    v = initial_vector(OracleSpec(3, 0, (0, 1)), 5)
    assert v.table == (0, 5)
    assert v.height == 3


def test_initial_vector_three_shifts():
    assert initial_vector(OracleSpec(3, 0, (0, 1, 3)), 2).table == (0, 2, 6)


def test_default_factors_are_odd():
    assert default_factors(4) == (0, 1, 3, 5)


def test_sample_counts_queries(rng):
    ledger = CostLedger()
    oracle = OracleSpec(10, 17)
    for _ in range(7):
        v = sample_initial_vector(oracle, rng, ledger)
        assert v.height == 10 and v.length == 2 and v.table[0] == 0
    assert ledger.oracle_queries == 7


def _drawn_modes(rng, n, draws):
    oracle = OracleSpec(n, 0, (0, 1))
    # with factors (0, 1) the table is (0, b) sorted, so b is its maximum
    return [max(sample_initial_vector(oracle, rng).table) for _ in range(draws)]


def test_drawn_mode_frequencies(rng):
    counts = Counter(_drawn_modes(rng, 3, 80_000))
    for b in range(8):
        assert abs(counts[b] / 80_000 - 1 / 8) <= 0.01


def test_drawn_mode_chi_square(rng):
    n, draws = 4, 100_000
    counts = Counter(_drawn_modes(rng, n, draws))
    observed = [counts[b] for b in range(1 << n)]
    assert chisquare(observed).pvalue > 0.001


def test_reduce_oracle_example():
    reduced = reduce_oracle(OracleSpec(4, 13), 1)
    assert (reduced.n, reduced.secret) == (3, 6)


def test_reduce_to_terminal():
    reduced = reduce_oracle(OracleSpec(1, 0), 0)
    assert reduced.n == 0 and reduced.secret == 0
    with pytest.raises(ValueError):
        reduce_oracle(reduced, 0)


def test_reduce_rejects_wrong_parity():
    with pytest.raises(ValueError):
        reduce_oracle(OracleSpec(4, 13), 0)


def _peel(oracle):
    bits = []
    while oracle.n > 0:
        bits.append(oracle.secret & 1)
        oracle = reduce_oracle(oracle, bits[-1])
    return bits


def test_parity_stream_of_thirteen():
    bits = _peel(OracleSpec(4, 13))
    assert bits == [1, 0, 1, 1]
    assert sum(b << k for k, b in enumerate(bits)) == 13


def test_reduction_spells_binary_digits_exhaustively():
    for n in range(1, 13):
        for s in range(1 << n):
            bits = _peel(OracleSpec(n, s, (0, 1, 3) if n >= 2 else (0, 1)))
            assert bits == [(s >> k) & 1 for k in range(n)]


def test_reduce_masks_factors():
    reduced = reduce_oracle(OracleSpec(3, 5, (0, 1, 5)), 1)
    assert reduced.factors == (0, 1, 1)


def test_adjudicate_examples():
    assert adjudicate_plus_minus(OracleSpec(4, 6), PhaseVector(1, (0, 1))) == ParityOutcome(0, True)
    for s in (0, 5, 6):
        outcome = adjudicate_plus_minus(OracleSpec(4, s), PhaseVector(1, (0, 0)))
        assert outcome == ParityOutcome(0, False)
    assert adjudicate_plus_minus(OracleSpec(4, 13), PhaseVector(1, (0, 1))) == ParityOutcome(1, True)


def test_adjudicate_rejects_wrong_shape():
    with pytest.raises(ValueError):
        adjudicate_plus_minus(OracleSpec(4, 1), PhaseVector(1, (0, 1, 1)))
    with pytest.raises(ValueError):
        adjudicate_plus_minus(OracleSpec(4, 1), PhaseVector(2, (0, 1)))


def test_adjudicate_matches_dense_measurement():
    plus = np.array([1, 1]) / np.sqrt(2)
    for table in itertools.product((0, 1), repeat=2):
        for s in (0, 1, 2, 3):
            psi = phase_state([table], 1, s)
            p_plus = abs(np.vdot(plus, psi)) ** 2
            outcome = adjudicate_plus_minus(OracleSpec(2, s), PhaseVector(1, table))
            assert min(p_plus, 1 - p_plus) < 1e-12  # the measurement is deterministic
            measured = 0 if p_plus > 0.5 else 1
            if table[0] == table[1]:
                # |+> whatever s is: no information
                assert not outcome.informative and measured == 0
            else:
                assert outcome.informative and outcome.bit == measured == s & 1
