"""Multiproposal MCMC: the classical sampler and its quantum-selection variant.

Both samplers build ``P`` proposals around the current state and pick the next
state among all ``P+1`` with probability proportional to the target.  They
differ only in how that pick is made:

* ``classical`` draws from the normalized weights (inverse CDF), or, with
  ``classical_selector="gumbel"``, takes the Gumbel-max argmax;
* ``quantum`` minimizes ``f(p) = -(z_p + log pi(theta_p))`` with simulated
  quantum minimum finding, warm-started at the current state ``p = 0``.

Each chain consumes three independent streams split from its seed:
proposals, selection noise, and the minimizer's internal randomness.  A
classical Gumbel-max chain and a quantum chain with the same seed therefore
share proposals and noise, and their paths coincide for as long as every
quantum selection is correct.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field, replace

import numpy as np

from .exceptions import InvalidArgumentError, InvalidStateError
from .gumbel import exact_discrete_sample, gumbel_max_select, sample_gumbel
from .minimize import QminConfig, quantum_minimize
from .oracle import COST_FIELDS, CostSnapshot
from .rng import spawn
from .targets import (
    AdaptationState,
    IsingLattice,
    ProposalSet,
    Target,
    adapt_scale,
    centered_gaussian_proposals,
    single_flip_proposals,
    uniform_independence_proposals,
)

MODES = ("classical", "quantum")
CLASSICAL_SELECTORS = ("exact", "gumbel")


@dataclass(frozen=True)
class IterationRecord:
    cost: CostSnapshot
    selection_correct: bool
    accepted: bool
    log_density: float
    selected: int = 0


@dataclass(frozen=True)
class RunConfig:
    n_iterations: int
    n_proposals: int
    seed: int = 0
    adapt: bool = True
    epsilon: float = 0.1
    inner_cap: int | None = None
    cap_rule: str = "halt-after"
    burn_in: int = 0
    initial_scale: float = 1.0
    target_accept: float = 0.5
    classical_selector: str = "exact"
    simulator: str = "statevector"
    record_states: bool = True

    def __post_init__(self) -> None:
        if self.n_iterations < 1:
            raise InvalidArgumentError("n_iterations must be at least 1")
        if self.n_proposals < 1:
            raise InvalidArgumentError("n_proposals must be at least 1")
        if not 0 <= self.burn_in <= self.n_iterations:
            raise InvalidArgumentError("burn_in must lie in 0..n_iterations")
        if self.classical_selector not in CLASSICAL_SELECTORS:
            raise InvalidArgumentError(f"classical_selector must be one of {CLASSICAL_SELECTORS}")
        if not self.initial_scale > 0:
            raise InvalidArgumentError("initial_scale must be positive")

    def qmin_config(self) -> QminConfig:
        return QminConfig(
            epsilon=self.epsilon, warm_start=0, inner_cap=self.inner_cap, cap_rule=self.cap_rule
        )


# --------------------------------------------------------------------------
# selection


def _stable_weights(lp: np.ndarray) -> np.ndarray:
    top = np.max(lp)
    if not np.isfinite(top):
        raise InvalidStateError("no state has finite log-density")
    w = np.exp(lp - top)
    if not w.sum() > 0:
        raise InvalidStateError("all selection weights underflowed")
    return w


def _classical_select(lp, rng, selector, noise):
    if selector == "exact":
        return exact_discrete_sample(_stable_weights(lp), rng)
    if not np.isfinite(np.max(lp)):
        raise InvalidStateError("no state has finite log-density")
    return gumbel_max_select(lp, rng, noise)


def _quantum_select(lp, qmin_config, rng, noise, simulator):
    if not np.isfinite(np.max(lp)):
        raise InvalidStateError("no state has finite log-density")
    z = sample_gumbel(rng, lp.size) if noise is None else np.asarray(noise, dtype=float)
    scores = -(z + lp)
    if qmin_config.warm_start != 0:
        qmin_config = replace(qmin_config, warm_start=0)
    return quantum_minimize(scores, qmin_config, rng, simulator)


# --------------------------------------------------------------------------
# single steps


def _evaluate(target: Target, states: np.ndarray, current_log_density, counted: bool):
    evaluate = target.log_density if counted else target.log_density_uncounted
    if current_log_density is None:
        return np.asarray(evaluate(states), dtype=float), len(states)
    lp = np.empty(len(states))
    lp[0] = current_log_density
    lp[1:] = evaluate(states[1:])
    return lp, len(states) - 1


def pmcmc_step(
    target: Target,
    proposals: ProposalSet,
    rng: np.random.Generator,
    current_log_density: float | None = None,
    selector: str = "exact",
    noise=None,
):
    """One classical multiproposal step; returns ``(next_state, record)``.

    Evaluates the target on every proposal (and on the current state unless
    its log-density is supplied) and selects with weights ``pi(theta_p)``,
    max-shifted before exponentiation.
    """
    states = proposals.states
    lp, charged = _evaluate(target, states, current_log_density, counted=True)
    idx = _classical_select(lp, rng, selector, noise)
    record = IterationRecord(
        cost=CostSnapshot(target_evals=charged),
        selection_correct=True,
        accepted=idx != 0,
        log_density=float(lp[idx]),
        selected=idx,
    )
    return states[idx], record


def qpmcmc_step(
    target: Target,
    proposals: ProposalSet,
    qmin_config: QminConfig,
    rng: np.random.Generator,
    current_log_density: float | None = None,
    noise=None,
    simulator: str = "statevector",
):
    """One quantum-selection step; returns ``(next_state, record)``.

    The target is charged the minimizer's oracle evaluations rather than
    ``P+1``: each oracle query stands for one quantum-parallel evaluation.
    ``selection_correct`` compares against the exact Gumbel-max argmax, which
    the simulator can see without paying for it.
    """
    states = proposals.states
    lp, _ = _evaluate(target, states, current_log_density, counted=False)
    result = _quantum_select(lp, qmin_config, rng, noise, simulator)
    target.charge(result.cost.oracle_evaluations)
    idx = result.argmin_candidate
    record = IterationRecord(
        cost=result.cost,
        selection_correct=result.is_true_min,
        accepted=idx != 0,
        log_density=float(lp[idx]),
        selected=idx,
    )
    return states[idx], record


def _ising_scores(lattice: IsingLattice, sites: np.ndarray, current_log_density):
    lp0 = lattice.log_density() if current_log_density is None else current_log_density
    lp = np.empty(sites.size)
    lp[0] = lp0
    lp[1:] = lp0 + lattice.flip_deltas(sites[1:])
    return lp


def ising_pmcmc_step(
    lattice: IsingLattice,
    n_proposals: int,
    rng: np.random.Generator,
    current_log_density: float | None = None,
    selector: str = "exact",
    noise=None,
    proposals: ProposalSet | None = None,
):
    """Classical single-flip step on ``lattice`` (mutated in place)."""
    proposals = proposals or single_flip_proposals(lattice, n_proposals, rng)
    sites = proposals.states
    lp = _ising_scores(lattice, sites, current_log_density)
    idx = _classical_select(lp, rng, selector, noise)
    if idx:
        lattice.flip(int(sites[idx]))
    record = IterationRecord(
        cost=CostSnapshot(target_evals=sites.size - 1),
        selection_correct=True,
        accepted=idx != 0,
        log_density=float(lp[idx]),
        selected=idx,
    )
    return lattice, record


def ising_qpmcmc_step(
    lattice: IsingLattice,
    n_proposals: int,
    qmin_config: QminConfig,
    rng: np.random.Generator,
    current_log_density: float | None = None,
    noise=None,
    proposals: ProposalSet | None = None,
    simulator: str = "statevector",
):
    """Quantum-selection single-flip step on ``lattice`` (mutated in place).

    Proposal scores come from incremental flip deltas; the record charges the
    minimizer's oracle evaluations as target evaluations.
    """
    proposals = proposals or single_flip_proposals(lattice, n_proposals, rng)
    sites = proposals.states
    lp = _ising_scores(lattice, sites, current_log_density)
    result = _quantum_select(lp, qmin_config, rng, noise, simulator)
    idx = result.argmin_candidate
    if idx:
        lattice.flip(int(sites[idx]))
    record = IterationRecord(
        cost=result.cost,
        selection_correct=result.is_true_min,
        accepted=idx != 0,
        log_density=float(lp[idx]),
        selected=idx,
    )
    return lattice, record


# --------------------------------------------------------------------------
# traces


@dataclass
class ChainTrace:
    """Chain states plus one record per iteration, stored column-wise.

    Continuous (and full-configuration) chains keep ``states`` with one row
    per iteration.  Single-flip Ising chains keep the initial lattice and a
    flip log (``-1`` for "no move") instead; use :meth:`lattice_at`.
    """

    mode: str
    n_proposals: int
    n_iterations: int
    burn_in: int = 0
    states: np.ndarray | None = None
    initial_lattice: IsingLattice | None = None
    flips: np.ndarray | None = None
    selected: np.ndarray = field(default=None)
    accepted: np.ndarray = field(default=None)
    selection_correct: np.ndarray = field(default=None)
    log_density: np.ndarray = field(default=None)
    scale: np.ndarray = field(default=None)
    costs: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        n = self.n_iterations
        if self.selected is None:
            self.selected = np.zeros(n, dtype=np.int64)
            self.accepted = np.zeros(n, dtype=bool)
            self.selection_correct = np.zeros(n, dtype=bool)
            self.log_density = np.zeros(n)
            self.scale = np.full(n, np.nan)
            self.costs = {name: np.zeros(n, dtype=np.int64) for name in COST_FIELDS}

    def __len__(self) -> int:
        return self.n_iterations

    def store(self, i: int, record: IterationRecord, scale: float = np.nan) -> None:
        self.selected[i] = record.selected
        self.accepted[i] = record.accepted
        self.selection_correct[i] = record.selection_correct
        self.log_density[i] = record.log_density
        self.scale[i] = scale
        for name in COST_FIELDS:
            self.costs[name][i] = getattr(record.cost, name)

    def record(self, i: int) -> IterationRecord:
        cost = CostSnapshot(*(int(self.costs[name][i]) for name in COST_FIELDS))
        return IterationRecord(
            cost=cost,
            selection_correct=bool(self.selection_correct[i]),
            accepted=bool(self.accepted[i]),
            log_density=float(self.log_density[i]),
            selected=int(self.selected[i]),
        )

    def records(self):
        for i in range(self.n_iterations):
            yield self.record(i)

    @property
    def target_evals(self) -> np.ndarray:
        return self.costs["target_evals"]

    @property
    def oracle_evaluations(self) -> np.ndarray:
        return self.costs["grover_calls"] + self.costs["verify_calls"]

    def total_cost(self) -> CostSnapshot:
        return CostSnapshot(*(int(self.costs[name].sum()) for name in COST_FIELDS))

    def selection_correct_rate(self) -> float:
        return float(self.selection_correct.mean())

    def acceptance_rate(self) -> float:
        return float(self.accepted.mean())

    def eval_fraction(self) -> float:
        """Charged target evaluations relative to the classical ``S * P``."""
        return float(self.target_evals.sum()) / (self.n_iterations * self.n_proposals)

    def post_burn_in(self) -> np.ndarray:
        if self.states is None:
            raise InvalidArgumentError("trace holds no state matrix")
        return self.states[self.burn_in :]

    def lattice_at(self, i: int) -> IsingLattice:
        """Configuration after iteration ``i`` (``i = -1`` gives the start)."""
        if self.initial_lattice is None:
            raise InvalidArgumentError("trace is not a single-flip lattice chain")
        lattice = self.initial_lattice.copy()
        for site in self.flips[: i + 1]:
            if site >= 0:
                lattice.flip(int(site))
        return lattice

    def write_csv(self, handle, header: str | None = None) -> None:
        """Per-iteration export: state components (or log-density) plus costs."""
        if header:
            handle.write(header.rstrip("\n") + "\n")
        writer = csv.writer(handle, lineterminator="\n")
        tail = ["accepted", "selection_correct", "grover_calls", "verify_calls", "target_evals"]
        if self.states is not None:
            dim = self.states.shape[1]
            writer.writerow(["iter"] + [f"x{d}" for d in range(dim)] + tail)
        else:
            writer.writerow(["iter", "log_density"] + tail)
        for i in range(self.n_iterations):
            lead = [repr(float(v)) for v in self.states[i]] if self.states is not None else [
                repr(float(self.log_density[i]))
            ]
            writer.writerow(
                [i + 1]
                + lead
                + [
                    int(self.accepted[i]),
                    int(self.selection_correct[i]),
                    int(self.costs["grover_calls"][i]),
                    int(self.costs["verify_calls"][i]),
                    int(self.costs["target_evals"][i]),
                ]
            )


# --------------------------------------------------------------------------
# chains


def _streams(seed: int):
    return spawn(np.random.SeedSequence(int(seed) & ((1 << 64) - 1)), 3)


def run_chain(
    target,
    config: RunConfig,
    mode: str = "quantum",
    initial=None,
    proposal: str | None = None,
) -> ChainTrace:
    """Run a full chain; deterministic given ``config.seed``.

    ``target`` is a :class:`Target` (continuous, or :class:`IsingTarget` with
    ``proposal="uniform-independence"``) or an :class:`IsingLattice`, which is
    sampled with single-flip proposals starting from a copy of itself.
    Proposal-scale adaptation applies to centered Gaussian proposals only.
    """
    if mode not in MODES:
        raise InvalidArgumentError(f"mode must be one of {MODES}")
    if isinstance(target, IsingLattice):
        if proposal not in (None, "single-flip"):
            raise InvalidArgumentError("lattice chains use single-flip proposals")
        return _run_lattice_chain(target, config, mode)
    proposal = proposal or "centered-gaussian"
    if proposal not in ("centered-gaussian", "uniform-independence"):
        raise InvalidArgumentError(f"unsupported proposal {proposal!r} for a state-vector target")
    if initial is None:
        raise InvalidArgumentError("initial state required")
    return _run_vector_chain(target, config, mode, np.asarray(initial, dtype=float), proposal)


def iterate_chain(target: Target, config: RunConfig, mode: str, initial, proposal: str = "centered-gaussian"):
    """Yield ``(state, record, scale)`` for up to ``config.n_iterations`` steps.

    This is the engine behind :func:`run_chain` for state-vector targets; it
    lets callers stop early (e.g. once an ESS target is met) while keeping the
    exact path a full run would take.
    """
    if mode not in MODES:
        raise InvalidArgumentError(f"mode must be one of {MODES}")
    if proposal not in ("centered-gaussian", "uniform-independence"):
        raise InvalidArgumentError(f"unsupported proposal {proposal!r} for a state-vector target")
    current = np.asarray(initial, dtype=float)
    prop_rng, noise_rng, search_rng = _streams(config.seed)
    n_prop = config.n_proposals
    qmin_config = config.qmin_config()
    adaptation = AdaptationState(
        log_scale=float(np.log(config.initial_scale)), target_accept=config.target_accept
    )
    gaussian = proposal == "centered-gaussian"
    gumbel_classical = config.classical_selector == "gumbel"
    current_lp = None
    for _ in range(config.n_iterations):
        scale = adaptation.scale
        if gaussian:
            props = centered_gaussian_proposals(current, scale, n_prop, prop_rng)
        else:
            props = uniform_independence_proposals(current, n_prop, prop_rng)
        if mode == "classical":
            noise = sample_gumbel(noise_rng, n_prop + 1) if gumbel_classical else None
            current, record = pmcmc_step(
                target, props, noise_rng, current_lp, config.classical_selector, noise
            )
        else:
            noise = sample_gumbel(noise_rng, n_prop + 1)
            current, record = qpmcmc_step(
                target, props, qmin_config, search_rng, current_lp, noise, config.simulator
            )
        current_lp = record.log_density
        yield current, record, scale
        if config.adapt and gaussian:
            adaptation = adapt_scale(adaptation, record.accepted)


def _run_vector_chain(target: Target, config: RunConfig, mode: str, current, proposal: str) -> ChainTrace:
    trace = ChainTrace(
        mode=mode,
        n_proposals=config.n_proposals,
        n_iterations=config.n_iterations,
        burn_in=config.burn_in,
        states=np.empty((config.n_iterations, current.size)) if config.record_states else None,
    )
    for i, (state, record, scale) in enumerate(iterate_chain(target, config, mode, current, proposal)):
        if trace.states is not None:
            trace.states[i] = state
        trace.store(i, record, scale)
    return trace


def _run_lattice_chain(lattice: IsingLattice, config: RunConfig, mode: str) -> ChainTrace:
    prop_rng, noise_rng, search_rng = _streams(config.seed)
    n, n_prop = config.n_iterations, config.n_proposals
    work = lattice.copy()
    trace = ChainTrace(
        mode=mode,
        n_proposals=n_prop,
        n_iterations=n,
        burn_in=config.burn_in,
        initial_lattice=lattice.copy(),
        flips=np.full(n, -1, dtype=np.int64),
    )
    qmin_config = config.qmin_config()
    current_lp = work.log_density()
    for i in range(n):
        props = single_flip_proposals(work, n_prop, prop_rng)
        if mode == "classical":
            noise = sample_gumbel(noise_rng, n_prop + 1) if config.classical_selector == "gumbel" else None
            _, record = ising_pmcmc_step(
                work, n_prop, noise_rng, current_lp, config.classical_selector, noise, props
            )
        else:
            noise = sample_gumbel(noise_rng, n_prop + 1)
            _, record = ising_qpmcmc_step(
                work, n_prop, qmin_config, search_rng, current_lp, noise, props, config.simulator
            )
        current_lp = record.log_density
        if record.selected:
            trace.flips[i] = props.states[record.selected]
        trace.store(i, record)
    return trace
