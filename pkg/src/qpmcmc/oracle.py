"""Oracle-call accounting.

The simulator knows every marked item up front, but the counters charge what a
quantum device would pay:

* one ``grover_call`` (and one time step) per Grover iteration,
* one ``verify_call`` per classical check of a measured index,
* ``ceil(log2 N)`` time steps for preparing a new marking (threshold) oracle.

"Oracle evaluations" are ``grover_calls + verify_calls``; marking preparation
only shows up in ``time_steps``.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Callable

import numpy as np

from .amplitude import MarkSet
from .exceptions import InvalidArgumentError

COST_FIELDS = ("grover_calls", "verify_calls", "time_steps", "target_evals")


@dataclass(frozen=True)
class CostSnapshot:
    grover_calls: int = 0
    verify_calls: int = 0
    time_steps: int = 0
    target_evals: int = 0

    def __post_init__(self) -> None:
        if min(self.grover_calls, self.verify_calls, self.time_steps, self.target_evals) < 0:
            raise InvalidArgumentError("cost counters must be nonnegative")

    @property
    def oracle_evaluations(self) -> int:
        return self.grover_calls + self.verify_calls

    def __add__(self, other: "CostSnapshot") -> "CostSnapshot":
        return CostSnapshot(
            self.grover_calls + other.grover_calls,
            self.verify_calls + other.verify_calls,
            self.time_steps + other.time_steps,
            self.target_evals + other.target_evals,
        )

    def __sub__(self, other: "CostSnapshot") -> "CostSnapshot":
        return CostSnapshot(
            self.grover_calls - other.grover_calls,
            self.verify_calls - other.verify_calls,
            self.time_steps - other.time_steps,
            self.target_evals - other.target_evals,
        )

    def as_row(self) -> dict[str, int]:
        return asdict(self)


def marking_cost(n_items: int) -> int:
    """Time steps to prepare a marking oracle over ``n_items`` states."""
    if n_items < 1:
        raise InvalidArgumentError("n_items must be positive")
    return math.ceil(math.log2(n_items)) if n_items > 1 else 0


Predicate = Callable[[np.ndarray], np.ndarray]


class CountingOracle:
    """Marking predicate over ``{0..N-1}`` with quantum-consistent cost counters.

    ``predicate`` may be a boolean array, a :class:`MarkSet`, or a callable
    that is applied once to ``np.arange(N)`` and must return a boolean array.
    ``score`` is an optional real vector used by minimization to build
    threshold predicates via :meth:`mark_below`.

    ``listeners`` receive ``(kind, amount)`` for every charge; they exist so
    tests can audit the accounting independently of the counters.
    """

    def __init__(self, n_items: int, predicate=None, score=None):
        if n_items < 1:
            raise InvalidArgumentError("n_items must be positive")
        self.n_items = int(n_items)
        self.score = None if score is None else np.asarray(score, dtype=float)
        if self.score is not None and self.score.shape != (self.n_items,):
            raise InvalidArgumentError("score must have one entry per item")
        self.grover_calls = 0
        self.verify_calls = 0
        self.time_steps = 0
        self.listeners: list[Callable[[str, int], None]] = []
        self._marks = MarkSet(np.zeros(self.n_items, dtype=bool))
        if predicate is not None:
            self.set_predicate(predicate)

    # -- marking -------------------------------------------------------
    def set_predicate(self, predicate) -> MarkSet:
        if isinstance(predicate, MarkSet):
            marks = predicate
        elif callable(predicate):
            marks = MarkSet(np.asarray(predicate(np.arange(self.n_items)), dtype=bool))
        else:
            marks = MarkSet(np.asarray(predicate, dtype=bool))
        if marks.n_items != self.n_items:
            raise InvalidArgumentError("predicate covers the wrong number of items")
        self._marks = marks
        return marks

    def mark_below(self, threshold: float) -> MarkSet:
        """Mark every ``x`` with ``score(x) < threshold`` (strict)."""
        if self.score is None:
            raise InvalidArgumentError("oracle has no score function")
        return self.set_predicate(self.score < threshold)

    @property
    def marks(self) -> MarkSet:
        return self._marks

    # -- charges -------------------------------------------------------
    def _notify(self, kind: str, amount: int) -> None:
        for listener in self.listeners:
            listener(kind, amount)

    def charge_grover(self, iterations: int) -> None:
        if iterations < 0:
            raise InvalidArgumentError("iterations must be nonnegative")
        self.grover_calls += iterations
        self.time_steps += iterations
        self._notify("grover", iterations)

    def charge_marking(self, n_items: int | None = None) -> None:
        steps = marking_cost(self.n_items if n_items is None else n_items)
        self.time_steps += steps
        self._notify("marking", steps)

    def verify(self, x: int) -> bool:
        if not 0 <= x < self.n_items:
            raise InvalidArgumentError(f"index {x} outside 0..{self.n_items - 1}")
        self.verify_calls += 1
        self._notify("verify", 1)
        return bool(self._marks.marked[x])

    # -- reporting -----------------------------------------------------
    def oracle_evaluations(self) -> int:
        return self.grover_calls + self.verify_calls

    def snapshot(self) -> CostSnapshot:
        return CostSnapshot(
            grover_calls=self.grover_calls,
            verify_calls=self.verify_calls,
            time_steps=self.time_steps,
            target_evals=self.oracle_evaluations(),
        )

    def reset(self) -> None:
        self.grover_calls = self.verify_calls = self.time_steps = 0
