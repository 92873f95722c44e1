"""Experiment drivers behind the ``qpmcmc-sim`` subcommands.

Each driver returns plain rows (dicts) in a deterministic order.  Replicate
``k`` of experiment ``name`` always runs on ``derive_seed(seed, name, ...ids)``,
so results do not depend on how many workers ran or in which order they
finished.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .amplitude import MarkSet, success_probability
from .diagnostics import central_qq_deviation, effective_sample_size, ess_report, qq_points, relative_ess_difference
from .exceptions import InvalidArgumentError
from .mcmc import RunConfig, iterate_chain, run_chain
from .minimize import QminConfig, quantum_minimize
from .oracle import CountingOracle
from .rng import derive_seed, make_rng
from .search import FixedPointConfig, QesaConfig, exponential_search, fixed_point_search
from .targets import GaussianMixtureTarget, IsingLattice, StandardNormal


def _map(fn, tasks, workers: int = 1):
    """Ordered map, optionally over a process pool."""
    tasks = list(tasks)
    if workers <= 1 or len(tasks) <= 1:
        return [fn(task) for task in tasks]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, tasks))


def _check_replicates(replicates: int) -> None:
    if replicates < 1:
        raise InvalidArgumentError("replicates must be at least 1")


# --------------------------------------------------------------------------
# Grover curves


def grover_curves(n_items: int, m_list, max_iters: int):
    """Exact success probability for ``j = 0..max_iters`` at each ``M``."""
    if max_iters < 0:
        raise InvalidArgumentError("max_iters must be nonnegative")
    rows = []
    for m in m_list:
        if not 0 <= m <= n_items:
            raise InvalidArgumentError(f"M={m} outside 0..{n_items}")
        for j in range(max_iters + 1):
            rows.append({"N": n_items, "M": m, "j": j, "success_prob": success_probability(n_items, m, j)})
    return rows


# --------------------------------------------------------------------------
# search benchmarks


def _search_task(task):
    algorithm, n, m, rep, seed, delta, w, simulator = task
    rng = make_rng(seed, "search-bench", algorithm, n, m, rep)
    oracle = CountingOracle(n, predicate=np.arange(n) < m)
    if algorithm == "qesa":
        cap = None if m else math.ceil(9 / 4 * math.sqrt(n))
        result = exponential_search(oracle, QesaConfig(max_grover_calls=cap), rng, simulator)
    else:
        result = fixed_point_search(oracle, FixedPointConfig(delta=delta, w=w), rng)
    row = {"algorithm": algorithm, "N": n, "M": m, "replicate": rep, "found": int(result.found)}
    row.update(result.cost.as_row())
    row["oracle_evals"] = result.cost.oracle_evaluations
    return row


def search_bench(
    algorithms=("qesa", "fpqs"),
    n_list=(4096,),
    m_list=(1, 2, 4),
    replicates: int = 500,
    seed: int = 0,
    delta: float = 0.1,
    w: float | None = None,
    simulator: str = "statevector",
    workers: int = 1,
):
    """Per-replicate cost rows.  FPQS uses ``w = 1/N`` unless ``w`` is given."""
    _check_replicates(replicates)
    for algorithm in algorithms:
        if algorithm not in ("qesa", "fpqs"):
            raise InvalidArgumentError(f"unknown algorithm {algorithm!r}")
    tasks = [
        (alg, n, m, rep, seed, delta, (1.0 / n if w is None else w), simulator)
        for alg in algorithms
        for n in n_list
        for m in m_list
        for rep in range(replicates)
    ]
    return _map(_search_task, tasks, workers)


def paired_differences(rows):
    """FPQS minus QESA oracle evaluations, matched on ``(N, M, replicate)``."""
    qesa = {(r["N"], r["M"], r["replicate"]): r["oracle_evals"] for r in rows if r["algorithm"] == "qesa"}
    out = []
    for r in rows:
        key = (r["N"], r["M"], r["replicate"])
        if r["algorithm"] == "fpqs" and key in qesa:
            out.append({"N": key[0], "M": key[1], "replicate": key[2], "fpqs_minus_qesa": r["oracle_evals"] - qesa[key]})
    return out


def fpqs_success_rate(n_items: int, n_marked: int, delta: float, w: float, replicates: int, seed: int) -> float:
    """Empirical success over ``replicates`` independent fixed-point searches."""
    rng = make_rng(seed, "fpqs-success", n_items, n_marked)
    config = FixedPointConfig(delta=delta, w=w)
    marks = MarkSet(np.arange(n_items) < n_marked)
    hits = 0
    for _ in range(replicates):
        oracle = CountingOracle(n_items, predicate=marks)
        hits += fixed_point_search(oracle, config, rng).found
    return hits / replicates


# --------------------------------------------------------------------------
# quantum minimization


def _qmin_task(task):
    n, rank, rep, seed, epsilon, simulator = task
    rng = make_rng(seed, "qmin-bench", n, str(rank), rep)
    score = rng.permutation(n).astype(float)
    warm = None if rank == "random" else int(np.flatnonzero(score == rank - 1)[0])
    result = quantum_minimize(score, QminConfig(epsilon=epsilon, warm_start=warm), rng, simulator)
    return {
        "N": n,
        "start_rank": rank,
        "replicate": rep,
        "oracle_evals": result.cost.oracle_evaluations,
        "success": int(result.is_true_min),
    }


def default_start_ranks(n_items: int):
    return [1, 2, 8, n_items // 2, "random"]


def qmin_bench(
    n_list=(256, 512, 1024, 2048, 4096),
    start_ranks=None,
    replicates: int = 500,
    epsilon: float = 0.1,
    seed: int = 0,
    simulator: str = "subspace",
    workers: int = 1,
):
    """Rows ``(N, start_rank, replicate, oracle_evals, success)``.

    Rank 1 starts at the minimum; ``"random"`` starts uniformly.  Scores are
    a fresh random permutation per replicate.
    """
    _check_replicates(replicates)
    tasks = []
    for n in n_list:
        ranks = default_start_ranks(n) if start_ranks is None else start_ranks
        for rank in ranks:
            if rank != "random" and not 1 <= int(rank) <= n:
                raise InvalidArgumentError(f"start rank {rank} outside 1..{n}")
            tasks.extend((n, rank if rank == "random" else int(rank), rep, seed, epsilon, simulator) for rep in range(replicates))
    return _map(_qmin_task, tasks, workers)


# --------------------------------------------------------------------------
# QPMCMC on Gaussian targets


@dataclass(frozen=True)
class NormalSummary:
    dim: int
    n_proposals: int
    n_iterations: int
    eval_fraction: float
    grover_fraction: float
    selection_correct_rate: float
    acceptance_rate: float
    mean_ess: float
    min_ess: float
    early_mean_oracle_evals: float
    post_burn_in_mean_oracle_evals: float
    qq_max_deviation: float

    def as_row(self):
        return dict(self.__dict__)


def _normal_task(task):
    dim, n_proposals, n_iterations, seed, start, burn_in, simulator = task
    config = RunConfig(
        n_iterations,
        n_proposals,
        seed=derive_seed(seed, "qpmcmc-normal", dim),
        burn_in=burn_in,
        simulator=simulator,
    )
    trace = run_chain(StandardNormal(dim), config, "quantum", np.full(dim, start))
    kept = trace.post_burn_in()
    evals = trace.oracle_evaluations
    early = max(1, n_iterations // 20)
    qq_dev = central_qq_deviation(qq_points(kept.ravel())) if kept.size >= 100 else float("nan")
    report = ess_report(kept) if len(kept) >= 10 else None
    summary = NormalSummary(
        dim=dim,
        n_proposals=n_proposals,
        n_iterations=n_iterations,
        eval_fraction=trace.eval_fraction(),
        grover_fraction=float(trace.costs["grover_calls"].sum()) / (n_iterations * n_proposals),
        selection_correct_rate=trace.selection_correct_rate(),
        acceptance_rate=trace.acceptance_rate(),
        mean_ess=report.mean_ess if report else float("nan"),
        min_ess=report.min_ess if report else float("nan"),
        early_mean_oracle_evals=float(evals[:early].mean()),
        post_burn_in_mean_oracle_evals=float(evals[burn_in:].mean()),
        qq_max_deviation=qq_dev,
    )
    return summary, trace


def qpmcmc_normal(
    dims=(1, 3, 10, 30, 100),
    n_proposals: int = 512,
    n_iterations: int = 2000,
    seed: int = 0,
    start: float = 100.0,
    burn_in: int | None = None,
    simulator: str = "subspace",
    workers: int = 1,
):
    """One quantum chain per dimension from ``(start, ..., start)``.

    Returns ``[(NormalSummary, ChainTrace), ...]`` in the order of ``dims``.
    Burn-in defaults to a tenth of the chain.
    """
    burn_in = n_iterations // 10 if burn_in is None else burn_in
    tasks = [(int(d), n_proposals, n_iterations, seed, start, burn_in, simulator) for d in dims]
    return _map(_normal_task, tasks, workers)


# --------------------------------------------------------------------------
# mixture race


@dataclass(frozen=True)
class RaceResult:
    iterations: int
    target_evals: int
    min_ess: float
    reached: bool


def race_to_ess(target, config: RunConfig, initial, ess_target: float, check_every: int = 1000, mode: str = "quantum"):
    """Run until the smallest per-coordinate ESS reaches ``ess_target``.

    ESS is checked every ``check_every`` iterations over the whole chain so
    far; ``config.n_iterations`` bounds the run.
    """
    if check_every < 10:
        raise InvalidArgumentError("check_every must be at least 10")
    states = np.empty((config.n_iterations, np.size(initial)))
    evals = 0
    min_ess = 0.0
    i = 0
    for i, (state, record, _) in enumerate(iterate_chain(target, config, mode, initial), start=1):
        states[i - 1] = state
        evals += record.cost.target_evals
        if i % check_every == 0:
            min_ess = min(effective_sample_size(states[:i, d]) for d in range(states.shape[1]))
            if min_ess >= ess_target:
                return RaceResult(i, evals, min_ess, True)
    return RaceResult(i, evals, min_ess, False)


def _mixture_task(task):
    n_modes, n_proposals, rep, ess_target, seed, check_every, max_iterations, simulator = task
    target = GaussianMixtureTarget.diagonal(n_modes)
    config = RunConfig(
        max_iterations,
        n_proposals,
        seed=derive_seed(seed, "qpmcmc-mixture", n_proposals, rep),
        simulator=simulator,
        record_states=False,
    )
    result = race_to_ess(target, config, np.zeros(2), ess_target, check_every)
    return {
        "P": n_proposals,
        "replicate": rep,
        "iterations": result.iterations,
        "target_evals": result.target_evals,
        "speedup": result.iterations * n_proposals / result.target_evals,
        "min_ess": result.min_ess,
        "reached": int(result.reached),
    }


def qpmcmc_mixture(
    n_modes: int = 100,
    p_list=(256, 1024),
    ess_target: float = 100.0,
    replicates: int = 3,
    seed: int = 0,
    check_every: int = 1000,
    max_iterations: int = 200_000,
    simulator: str = "subspace",
    workers: int = 1,
):
    """Race each proposal count to ``ess_target`` on the diagonal mixture.

    ``speedup = S * P / target_evals``; ``efficiency_gain`` divides the
    smallest-P run's target evaluations by this run's, replicate by replicate.
    """
    if n_modes < 2:
        raise InvalidArgumentError("need at least two modes")
    _check_replicates(replicates)
    p_list = sorted(int(p) for p in p_list)
    tasks = [
        (n_modes, p, rep, ess_target, seed, check_every, max_iterations, simulator)
        for p in p_list
        for rep in range(replicates)
    ]
    rows = _map(_mixture_task, tasks, workers)
    base = {r["replicate"]: r["target_evals"] for r in rows if r["P"] == p_list[0]}
    for r in rows:
        r["efficiency_gain"] = base[r["replicate"]] / r["target_evals"]
    return rows


# --------------------------------------------------------------------------
# Ising


def _ising_task(task):
    side, rho, n_proposals, n_iterations, rep, seed, simulator = task
    lattice = IsingLattice.checkerboard(side, side, rho=rho)
    config = RunConfig(
        n_iterations, n_proposals, seed=derive_seed(seed, "qpmcmc-ising", n_proposals, rep), simulator=simulator
    )
    trace = run_chain(lattice, config, "quantum")
    row = {
        "P": n_proposals,
        "replicate": rep,
        "initial_log_density": lattice.log_density(),
        "final_log_density": float(trace.log_density[-1]),
        "target_evals": int(trace.target_evals.sum()),
        "eval_fraction": trace.eval_fraction(),
        "selection_correct_rate": trace.selection_correct_rate(),
    }
    return row, trace.log_density


def qpmcmc_ising(
    side: int = 64,
    rho: float = 1.0,
    p_list=(4, 8, 16, 32, 64, 128, 256),
    n_iterations: int = 3000,
    replicates: int = 10,
    seed: int = 0,
    simulator: str = "subspace",
    workers: int = 1,
):
    """Single-flip QPMCMC from the checkerboard state for each ``P``.

    Returns ``(summary_rows, traces)`` where ``traces[(P, rep)]`` is the
    log-density path.
    """
    if side < 2:
        raise InvalidArgumentError("side must be at least 2")
    _check_replicates(replicates)
    tasks = [(side, rho, int(p), n_iterations, rep, seed, simulator) for p in p_list for rep in range(replicates)]
    results = _map(_ising_task, tasks, workers)
    rows = [row for row, _ in results]
    traces = {(row["P"], row["replicate"]): path for row, path in results}
    return rows, traces


def median_final_by_p(rows):
    by_p: dict[int, list[float]] = {}
    for r in rows:
        by_p.setdefault(r["P"], []).append(r["final_log_density"])
    return {p: float(np.median(v)) for p, v in sorted(by_p.items())}


# --------------------------------------------------------------------------
# classical vs quantum mixing


def _mixing_task(task):
    n_proposals, pair, n_iterations, dim, burn_in, seed, simulator, classical_selector = task
    chain_seed = derive_seed(seed, "mixing-compare", n_proposals, pair)
    reports = {}
    for mode in ("classical", "quantum"):
        config = RunConfig(
            n_iterations,
            n_proposals,
            seed=chain_seed,
            burn_in=burn_in,
            simulator=simulator,
            classical_selector=classical_selector,
        )
        trace = run_chain(StandardNormal(dim), config, mode, np.zeros(dim))
        reports[mode] = ess_report(trace.post_burn_in())
    mean_rel, min_rel = relative_ess_difference(reports["classical"], reports["quantum"])
    return {
        "P": n_proposals,
        "pair": pair,
        "classical_mean_ess": reports["classical"].mean_ess,
        "quantum_mean_ess": reports["quantum"].mean_ess,
        "classical_min_ess": reports["classical"].min_ess,
        "quantum_min_ess": reports["quantum"].min_ess,
        "mean_rel": mean_rel,
        "min_rel": min_rel,
    }


def mixing_compare(
    p_list=(16, 64, 256),
    chains: int = 20,
    n_iterations: int = 10_000,
    dim: int = 10,
    burn_in: int | None = None,
    seed: int = 0,
    simulator: str = "subspace",
    classical_selector: str = "exact",
    workers: int = 1,
):
    """Paired classical/quantum chains on a standard normal, one row per pair.

    Burn-in defaults to a tenth of the chain and both arms of a pair share a
    seed.  With the default exact classical selector the arms use different
    selection noise and are effectively independent; with
    ``classical_selector="gumbel"`` they share noise and coincide wherever the
    quantum selection is correct.
    """
    if chains < 2:
        raise InvalidArgumentError("need at least two chains per arm")
    burn_in = n_iterations // 10 if burn_in is None else burn_in
    tasks = [
        (int(p), pair, n_iterations, dim, burn_in, seed, simulator, classical_selector)
        for p in p_list
        for pair in range(chains)
    ]
    return _map(_mixing_task, tasks, workers)
