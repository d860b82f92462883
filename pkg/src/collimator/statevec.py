"""Dense state-vector cross-checks for single collimation steps.

These routines build the actual complex amplitudes of the tensor state, so
they only work for small joint dimensions. They enumerate joint indices on
their own and share nothing with the fast path except the functions under
test.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import product
from typing import Sequence

import numpy as np

from .collimate import build_collimated_table, sample_class
from .rng import randbelow, randbits

MAX_DISTRIBUTION_DIM = 1 << 16
MAX_DENSE_DIM = 1 << 12
TOLERANCE = 1e-9


def _joint_dim(tables: Sequence[Sequence[int]]) -> int:
    return math.prod(len(t) for t in tables)


def _joint_sums(tables: Sequence[Sequence[int]]) -> list[int]:
    return [sum(vals) for vals in product(*tables)]


def exact_outcome_distribution(tables: Sequence[Sequence[int]], m: int) -> dict[int, float]:
    """Born-rule distribution of the collimation class by full enumeration."""
    dim = _joint_dim(tables)
    if dim == 0:
        raise ValueError("cannot enumerate an empty table")
    if dim > MAX_DISTRIBUTION_DIM:
        raise ValueError(f"joint dimension {dim} exceeds {MAX_DISTRIBUTION_DIM}")
    mask = (1 << m) - 1
    counts: dict[int, int] = {}
    for s in _joint_sums(tables):
        counts[s & mask] = counts.get(s & mask, 0) + 1
    return {c: k / dim for c, k in sorted(counts.items())}


def empirical_distribution(tables, m: int, rng, draws: int) -> dict[int, float]:
    counts: dict[int, int] = {}
    for _ in range(draws):
        c = sample_class(tables, m, rng)
        counts[c] = counts.get(c, 0) + 1
    return {c: k / draws for c, k in sorted(counts.items())}


def tv_distance(p: dict[int, float], q: dict[int, float]) -> float:
    keys = set(p) | set(q)
    return 0.5 * sum(abs(p.get(k, 0.0) - q.get(k, 0.0)) for k in keys)


def phase_state(tables: Sequence[Sequence[int]], h: int, s: int) -> np.ndarray:
    """Normalized tensor state with amplitudes exp(2 pi i b(j) s / 2^h)."""
    modulus = 1 << h
    angles = np.array([((v * s) % modulus) / modulus for v in _joint_sums(tables)])
    return np.exp(2j * np.pi * angles) / math.sqrt(len(angles))


def bucket_projector(tables: Sequence[Sequence[int]], m: int, c: int) -> np.ndarray:
    """Diagonal of the projector onto joint indices with sum = c mod 2^m."""
    mask = (1 << m) - 1
    return np.array([(v & mask) == c for v in _joint_sums(tables)], dtype=float)


@dataclass(frozen=True)
class DenseCheck:
    passed: bool
    max_residual: float
    message: str = ""


def dense_collimation_check(
    tables: Sequence[Sequence[int]],
    m: int,
    c: int,
    s_test: int,
    h: int,
    sort_bits: int | None = None,
    tol: float = TOLERANCE,
) -> DenseCheck:
    """Compare the projected dense state with the collimated phase vector.

    Every surviving amplitude must have magnitude 1/sqrt(l_new) and equal the
    phase predicted by the new table, all up to one shared global phase.
    """
    dim = _joint_dim(tables)
    if dim > MAX_DENSE_DIM:
        raise ValueError(f"joint dimension {dim} exceeds {MAX_DENSE_DIM}")
    psi = phase_state(tables, h, s_test)
    proj = bucket_projector(tables, m, c)
    collapsed = proj * psi
    norm = np.linalg.norm(collapsed)
    if norm == 0:
        return DenseCheck(False, math.inf, f"bucket {c} has zero probability")
    collapsed = collapsed / norm

    new_table, new_h, joint = build_collimated_table(
        tables, m, c, h, sort_bits, return_indices=True
    )
    shape = tuple(len(t) for t in tables)
    flat = [int(np.ravel_multi_index(idx, shape)) for idx in joint]
    support = set(np.flatnonzero(proj).tolist())
    if len(flat) != len(support) or set(flat) != support:
        return DenseCheck(
            False, math.inf, f"index map covers {len(set(flat))} states, bucket has {len(support)}"
        )

    modulus = 1 << new_h
    predicted = np.exp(
        2j * np.pi * np.array([((b * s_test) % modulus) / modulus for b in new_table])
    ) / math.sqrt(len(new_table))
    actual = collapsed[flat]
    ratio = actual[0] / predicted[0]
    global_phase = ratio / abs(ratio)
    residual = np.abs(actual - global_phase * predicted)
    worst = int(np.argmax(residual))
    if residual[worst] > tol:
        return DenseCheck(
            False,
            float(residual[worst]),
            f"entry {worst} (joint index {joint[worst]}) off by {residual[worst]:.3e}",
        )
    return DenseCheck(True, float(residual.max()))


@dataclass(frozen=True)
class Instance:
    tables: tuple[tuple[int, ...], ...]
    h: int
    m: int


def random_instance(
    rng, max_dim: int = MAX_DENSE_DIM, max_len: int = 16, max_r: int = 3, max_m: int = 11
) -> Instance:
    """Random collimation input: r tables of a common height, joint dim <= max_dim."""
    while True:
        r = 2 + randbelow(rng, max_r - 1)
        h = 2 + randbelow(rng, 11)
        m = 1 + randbelow(rng, min(h - 1, max_m))
        lengths = [1 + randbelow(rng, max_len) for _ in range(r)]
        if math.prod(lengths) <= max_dim:
            break
    tables = tuple(tuple(randbits(rng, h) for _ in range(k)) for k in lengths)
    return Instance(tables, h, m)


@dataclass(frozen=True)
class SuiteResult:
    trials: int
    passed: int
    worst_residual: float
    failures: tuple[str, ...]

    def summary(self) -> str:
        return f"{self.passed}/{self.trials} dense checks passed"


def run_dense_suite(trials: int, rng, max_dim: int = MAX_DENSE_DIM) -> SuiteResult:
    """Random instances: sample a class by the Born rule, then check it densely."""
    passed, worst, failures = 0, 0.0, []
    for t in range(trials):
        inst = random_instance(rng, max_dim)
        c = sample_class(inst.tables, inst.m, rng)
        s_test = randbits(rng, inst.h)
        sort_bits = randbelow(rng, inst.h - inst.m + 1)
        res = dense_collimation_check(inst.tables, inst.m, c, s_test, inst.h, sort_bits)
        worst = max(worst, res.max_residual)
        if res.passed:
            passed += 1
        else:
            failures.append(f"trial {t}: {res.message}")
    return SuiteResult(trials, passed, worst, tuple(failures))
