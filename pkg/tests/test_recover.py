import pytest

from collimator.oracle import OracleSpec
from collimator.phase import CostLedger
from collimator.recover import SMALL_CUTOFF, direct_parity, recover_shift
from collimator.rng import make_rng, randbits


def test_recover_fixed_secret():
    s, _ = recover_shift(OracleSpec(16, 48879), make_rng(3))
    assert s == 48879


@pytest.mark.parametrize("n", [1, 2, 5, 12])
def test_zero_secret(n):
    reports = []
    s, _ = recover_shift(OracleSpec(n, 0), make_rng(n), reports=reports)
    assert s == 0
    assert [r["bit"] for r in reports] == [0] * n


def test_twenty_random_secrets_at_n24():
    rng = make_rng(24)
    for _ in range(20):
        oracle = OracleSpec(24, randbits(rng, 24))
        s, _ = recover_shift(oracle, rng)
        assert s == oracle.secret


@pytest.mark.parametrize("mode", ["rigorous", "regev"])
def test_other_modes_recover(mode):
    rng = make_rng(7)
    oracle = OracleSpec(10, randbits(rng, 10))
    assert recover_shift(oracle, rng, mode=mode, retry_budget=10**6)[0] == oracle.secret


def test_more_shifts():
    rng = make_rng(8)
    oracle = OracleSpec(12, randbits(rng, 12), (0, 1, 3))
    assert recover_shift(oracle, rng)[0] == oracle.secret


def test_tiny_instances_bypass_the_sieve():
    for n in range(1, SMALL_CUTOFF + 1):
        for s in range(1 << n):
            for seed in range(10):
                bit = direct_parity(OracleSpec(n, s), make_rng(seed), CostLedger())
                assert bit == s & 1


def test_total_queries_bounded_by_largest_run():
    rng = make_rng(11)
    oracle = OracleSpec(20, randbits(rng, 20))
    reports = []
    _, total = recover_shift(oracle, rng, reports=reports)
    per_run = [r["ledger"]["oracle_queries"] for r in reports]
    assert total.oracle_queries == sum(per_run)
    assert total.oracle_queries <= oracle.n * max(per_run)
    assert [r["n"] for r in reports] == list(range(20, 0, -1))
