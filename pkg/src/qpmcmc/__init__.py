"""Simulated quantum search, quantum minimization and quantum-parallel MCMC."""

__version__ = "0.1.0"

from .amplitude import AmplitudeRegister, MarkSet, grover_iterate, measure, success_probability, uniform_register
from .diagnostics import EssReport, effective_sample_size, ess_report, qq_points, relative_ess_difference
from .exceptions import ConfigurationError, InvalidArgumentError, InvalidStateError
from .gumbel import exact_discrete_sample, gumbel_max_select, sample_gumbel
from .mcmc import ChainTrace, IterationRecord, RunConfig, run_chain
from .minimize import QminConfig, QminResult, quantum_minimize, warm_start_budget
from .oracle import CostSnapshot, CountingOracle
from .search import FixedPointConfig, QesaConfig, exponential_search, fixed_point_search, grover_search

__all__ = [
    "AmplitudeRegister",
    "ChainTrace",
    "ConfigurationError",
    "CostSnapshot",
    "CountingOracle",
    "EssReport",
    "FixedPointConfig",
    "InvalidArgumentError",
    "InvalidStateError",
    "IterationRecord",
    "MarkSet",
    "QesaConfig",
    "QminConfig",
    "QminResult",
    "RunConfig",
    "effective_sample_size",
    "ess_report",
    "exact_discrete_sample",
    "exponential_search",
    "fixed_point_search",
    "grover_iterate",
    "grover_search",
    "gumbel_max_select",
    "measure",
    "qq_points",
    "quantum_minimize",
    "relative_ess_difference",
    "run_chain",
    "sample_gumbel",
    "success_probability",
    "uniform_register",
    "warm_start_budget",
]
