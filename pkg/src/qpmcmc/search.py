"""Quantum search over a :class:`~qpmcmc.oracle.CountingOracle`.

Three algorithms are provided:

* :func:`grover_search` -- a fixed number of standard Grover iterations,
  one measurement, one classical check;
* :func:`exponential_search` -- randomized iteration counts with
  multiplicative growth (robust to an unknown number of solutions);
* :func:`fixed_point_search` -- phase-generalized iterations with the
  Chebyshev phase schedule, success ``>= 1 - delta^2`` whenever the solution
  fraction is at least ``w``.

Two interchangeable simulators back the standard iterations.  ``"statevector"``
evolves all ``N`` amplitudes.  ``"subspace"`` uses the fact that from the
uniform state the register stays in a two-dimensional invariant plane and
evaluates the two amplitudes in closed form; the output distribution is the
same, at O(1) cost per round instead of O(jN).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .amplitude import (
    MarkSet,
    generalized_grover_iterate,
    grover_iterate,
    measure,
    success_probability,
    uniform_register,
)
from .exceptions import ConfigurationError, InvalidArgumentError
from .oracle import CostSnapshot, CountingOracle
from .rng import uniform_index

SIMULATORS = ("statevector", "subspace")
CAP_RULES = ("strict", "halt-after")


@dataclass(frozen=True)
class QesaConfig:
    """Exponential search tuning.

    ``cap_rule`` decides how ``max_grover_calls`` is enforced.  ``"strict"``
    never starts a round that would push the Grover count past the cap.
    ``"halt-after"`` stops once the count has reached the cap, so the last
    round may overshoot it by less than ``sqrt(N)``.
    """

    growth: float = 6 / 5
    max_grover_calls: int | None = None
    cap_rule: str = "strict"

    def __post_init__(self) -> None:
        if not self.growth > 1:
            raise InvalidArgumentError("growth factor must exceed 1")
        if self.cap_rule not in CAP_RULES:
            raise InvalidArgumentError(f"cap_rule must be one of {CAP_RULES}")
        if self.max_grover_calls is not None and self.max_grover_calls < 1:
            raise InvalidArgumentError("max_grover_calls must be at least 1")


def min_schedule_length(delta: float, w: float) -> int:
    """Smallest odd ``L`` with ``L >= ln(2/delta) / sqrt(w)``."""
    bound = math.log(2.0 / delta) / math.sqrt(w)
    length = max(1, math.ceil(bound - 1e-12))
    return length if length % 2 else length + 1


@dataclass(frozen=True)
class FixedPointConfig:
    """Fixed-point search tuning.

    ``delta`` is the square root of the error tolerance, ``w`` a lower bound on
    the solution fraction ``M/N``.  ``L`` defaults to the smallest admissible
    odd value.
    """

    delta: float
    w: float
    L: int | None = None

    def __post_init__(self) -> None:
        if not 0 < self.delta < 1:
            raise InvalidArgumentError(f"delta must lie in (0, 1), got {self.delta}")
        if not 0 < self.w <= 1:
            raise InvalidArgumentError(f"w must lie in (0, 1], got {self.w}")
        minimal = min_schedule_length(self.delta, self.w)
        if self.L is None:
            object.__setattr__(self, "L", minimal)
        elif self.L % 2 == 0 or self.L < minimal:
            raise InvalidArgumentError(f"L must be odd and at least {minimal}, got {self.L}")

    @property
    def n_iterations(self) -> int:
        return (self.L - 1) // 2


@dataclass(frozen=True)
class SearchResult:
    found: bool
    index: int | None
    cost: CostSnapshot


def grover_iteration_count(n_items: int, n_solutions: int) -> int:
    """``R = ceil(pi/4 * sqrt(N/M))``."""
    if n_solutions < 1:
        raise InvalidArgumentError("iteration count is undefined without solutions")
    if n_solutions > n_items:
        raise InvalidArgumentError("more solutions than items")
    return math.ceil(math.pi / 4 * math.sqrt(n_items / n_solutions))


def prepare_and_measure(
    marks: MarkSet, iterations: int, rng: np.random.Generator, simulator: str = "statevector"
) -> int:
    """Uniform state, ``iterations`` standard Grover iterations, one measurement."""
    if simulator == "statevector":
        reg = uniform_register(marks.n_items)
        for _ in range(iterations):
            grover_iterate(reg, marks)
        return measure(reg, rng)
    if simulator == "subspace":
        n, m = marks.n_items, marks.count
        if m and rng.random() < success_probability(n, m, iterations):
            return int(marks.indices[uniform_index(rng, m)])
        return int(marks.unmarked_indices[uniform_index(rng, n - m)])
    raise InvalidArgumentError(f"unknown simulator {simulator!r}; expected one of {SIMULATORS}")


def grover_search(
    oracle: CountingOracle,
    n_iterations: int,
    rng: np.random.Generator,
    simulator: str = "statevector",
) -> SearchResult:
    if n_iterations < 0:
        raise InvalidArgumentError("n_iterations must be nonnegative")
    start = oracle.snapshot()
    x = prepare_and_measure(oracle.marks, n_iterations, rng, simulator)
    oracle.charge_grover(n_iterations)
    found = oracle.verify(x)
    return SearchResult(found, x if found else None, oracle.snapshot() - start)


def exponential_search(
    oracle: CountingOracle,
    config: QesaConfig | None = None,
    rng: np.random.Generator | None = None,
    simulator: str = "statevector",
) -> SearchResult:
    """Search with unknown solution count.

    Each round draws ``j`` uniformly among the integers below ``m``, runs ``j``
    iterations from a fresh uniform register, measures and checks; on failure
    ``m <- min(growth*m, sqrt(N))``.  With ``max_grover_calls`` set, the search
    gives up per ``config.cap_rule`` and reports ``found=False``.
    """
    config = config or QesaConfig()
    rng = rng if rng is not None else np.random.default_rng()
    marks = oracle.marks
    cap = config.max_grover_calls
    if cap is None and marks.count == 0:
        raise ConfigurationError("exponential search without solutions never halts; set max_grover_calls")
    n = oracle.n_items
    start = oracle.snapshot()
    if n == 1:
        # j is always 0 here, so the loop could never exhaust a cap
        found = oracle.verify(0)
        return SearchResult(found, 0 if found else None, oracle.snapshot() - start)

    sqrt_n = math.sqrt(n)
    growth = config.growth
    # strict: stop before a round would overshoot; halt-after: stop once reached
    strict = cap is not None and config.cap_rule == "strict"
    limit = math.inf if cap is None or strict else cap
    empty = marks.count == 0
    m = 1.0
    used = 0
    while used < limit:
        j = uniform_index(rng, math.ceil(m))
        if strict and used + j > cap:
            break
        # with nothing marked the register stays uniform and every outcome fails
        # verification, so the outcome need not be simulated
        x = prepare_and_measure(marks, j, rng, simulator) if not empty else 0
        oracle.charge_grover(j)
        used += j
        if oracle.verify(x):
            return SearchResult(True, x, oracle.snapshot() - start)
        m = min(growth * m, sqrt_n)
    return SearchResult(False, None, oracle.snapshot() - start)


def fixed_point_phases(config: FixedPointConfig) -> list[tuple[float, float]]:
    """Chebyshev phase schedule ``[(alpha_1, beta_1), ..., (alpha_l, beta_l)]``.

    ``alpha_j = -beta_{l-j+1} = 2 arccot(tan(2 pi j / L) sqrt(1 - gamma^2))``
    with ``1/gamma = cosh(arccosh(1/delta) / L)``, the analytic continuation
    of ``cos(arccos(1/delta) / L)`` for ``1/delta > 1``.  arccot takes its
    principal value in ``(0, pi)``.
    """
    if not isinstance(config, FixedPointConfig):
        raise InvalidArgumentError("expected a FixedPointConfig")
    length = config.L
    l = config.n_iterations
    inv_gamma = math.cosh(math.acosh(1.0 / config.delta) / length)
    gamma = 1.0 / inv_gamma
    root = math.sqrt(max(0.0, 1.0 - gamma * gamma))
    alphas = [2.0 * math.atan2(1.0, math.tan(2.0 * math.pi * j / length) * root) for j in range(1, l + 1)]
    betas = [-alphas[l - j] for j in range(1, l + 1)]
    return list(zip(alphas, betas))


# Each phase oracle S_t(beta) is built from the bit oracle by compute/uncompute,
# giving the L-1 queries per schedule that the cost model charges.
FIXED_POINT_QUERIES_PER_ITERATION = 2


def fixed_point_register(marks: MarkSet, config: FixedPointConfig):
    reg = uniform_register(marks.n_items)
    for alpha, beta in fixed_point_phases(config):
        generalized_grover_iterate(reg, marks, alpha, beta)
    return reg


def fixed_point_search(
    oracle: CountingOracle,
    config: FixedPointConfig,
    rng: np.random.Generator,
) -> SearchResult:
    start = oracle.snapshot()
    reg = fixed_point_register(oracle.marks, config)
    oracle.charge_grover(FIXED_POINT_QUERIES_PER_ITERATION * config.n_iterations)
    x = measure(reg, rng)
    found = oracle.verify(x)
    return SearchResult(found, x if found else None, oracle.snapshot() - start)
