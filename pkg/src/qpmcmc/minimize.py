"""Quantum minimum finding with warm starts and early stopping.

The outer loop keeps a threshold item ``x0``.  Each round prepares a marking
oracle for ``{x : score(x) < score(x0)}`` (``ceil(log2 N)`` time steps) and
runs a capped exponential search over it.  A verified hit becomes the new
threshold; a search that exhausts its cap is taken as evidence that ``x0`` is
minimal and ends the run.  Independently of that, the run stops once the
consumed time steps reach ``m0 / epsilon``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .exceptions import InvalidArgumentError
from .oracle import CostSnapshot, CountingOracle
from .search import QesaConfig, exponential_search


@lru_cache(maxsize=128)
def _capped_qesa(cap: int, rule: str) -> QesaConfig:
    return QesaConfig(max_grover_calls=cap, cap_rule=rule)


def default_inner_cap(n_items: int) -> int:
    return math.ceil(9 / 4 * math.sqrt(n_items))


@dataclass(frozen=True)
class QminConfig:
    epsilon: float = 0.1
    warm_start: int | None = None
    inner_cap: int | None = None
    cap_rule: str = "halt-after"

    def __post_init__(self) -> None:
        if not 0 < self.epsilon < 1:
            raise InvalidArgumentError(f"epsilon must lie in (0, 1), got {self.epsilon}")
        if self.inner_cap is not None and self.inner_cap < 1:
            raise InvalidArgumentError("inner_cap must be a positive integer")
        if self.warm_start is not None and self.warm_start < 0:
            raise InvalidArgumentError("warm_start must be a valid index")


@dataclass(frozen=True)
class QminResult:
    argmin_candidate: int
    is_true_min: bool
    cost: CostSnapshot
    threshold_updates: int


def qmin_budget(n_items: int) -> float:
    """Expected time to success without warm start, ``45/4 sqrt(N) + 7/10 log2(N)``."""
    if n_items < 1:
        raise InvalidArgumentError("n_items must be positive")
    return 45 / 4 * math.sqrt(n_items) + 0.7 * math.log2(n_items)


def warm_start_budget(n_items: int, start_rank: int) -> float:
    """Expected-time bound when only ``K-1`` items beat the starting threshold.

    ``(5/4 - 1/sqrt(K-1)) * 9 sqrt(N) + 7/10 log2(K) log2(N)``.
    """
    if start_rank < 2:
        raise InvalidArgumentError("warm-start bound needs K >= 2")
    if start_rank > n_items:
        raise InvalidArgumentError("start rank cannot exceed the number of items")
    return (5 / 4 - 1 / math.sqrt(start_rank - 1)) * 9 * math.sqrt(n_items) + 0.7 * math.log2(
        start_rank
    ) * math.log2(n_items)


def warm_start_budget_via_relation(n_items: int, start_rank: int) -> float:
    """The same bound written relative to :func:`qmin_budget`.

    ``m0 - 9 sqrt(N/(K-1)) + 7/10 log2(K/N) log2(N)``.  This differs from
    :func:`warm_start_budget` by ``0.7 log2(N) (1 - log2(N))``; see
    :func:`warm_start_relation_gap`.
    """
    if start_rank < 2:
        raise InvalidArgumentError("warm-start bound needs K >= 2")
    return (
        qmin_budget(n_items)
        - 9 * math.sqrt(n_items / (start_rank - 1))
        + 0.7 * math.log2(start_rank / n_items) * math.log2(n_items)
    )


def warm_start_relation_gap(n_items: int) -> float:
    """``relation - direct``; independent of ``K`` and zero only for ``N`` in {1, 2}."""
    log_n = math.log2(n_items)
    return 0.7 * log_n * (1.0 - log_n)


def true_argmin(score: np.ndarray) -> int:
    """Index of the minimum, smaller index winning ties."""
    return int(np.argmin(score))


def quantum_minimize(
    score,
    config: QminConfig | None = None,
    rng: np.random.Generator | None = None,
    simulator: str = "statevector",
) -> QminResult:
    """Minimize ``score`` over ``{0..N-1}``.

    ``score`` is either a real vector or a :class:`CountingOracle` carrying
    one; in the latter case the charges accumulate on that oracle and the
    returned cost is the increment for this call.
    """
    config = config or QminConfig()
    rng = rng if rng is not None else np.random.default_rng()
    if isinstance(score, CountingOracle):
        oracle = score
        if oracle.score is None:
            raise InvalidArgumentError("oracle has no score function")
    else:
        values = np.asarray(score, dtype=float)
        oracle = CountingOracle(values.size, score=values)
    values = oracle.score
    n = oracle.n_items

    if config.warm_start is not None:
        if config.warm_start >= n:
            raise InvalidArgumentError(f"warm_start {config.warm_start} outside 0..{n - 1}")
        x0 = int(config.warm_start)
    else:
        x0 = int(rng.integers(n))

    cap = config.inner_cap if config.inner_cap is not None else default_inner_cap(n)
    qesa = _capped_qesa(cap, config.cap_rule)
    budget = qmin_budget(n) / config.epsilon
    start = oracle.snapshot()
    updates = 0
    while oracle.time_steps - start.time_steps < budget:
        oracle.mark_below(values[x0])
        oracle.charge_marking()
        result = exponential_search(oracle, qesa, rng, simulator)
        if not result.found:
            break
        x0 = result.index
        updates += 1

    return QminResult(
        argmin_candidate=x0,
        is_true_min=x0 == true_argmin(values),
        cost=oracle.snapshot() - start,
        threshold_updates=updates,
    )
