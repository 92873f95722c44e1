"""``qpmcmc-sim``: command-line experiment drivers with CSV output.

Exit status is 0 on success, 2 for invalid arguments and 1 for any other
failure.  The seed comes from ``--seed``, else ``$QPMCMC_SEED``, else 0.
"""

from __future__ import annotations

import argparse
import csv
import os
import sys
from contextlib import contextmanager
from pathlib import Path

from . import __version__, experiments
from .diagnostics import qq_points, write_qq_csv
from .exceptions import ConfigurationError, InvalidArgumentError

SEED_ENV = "QPMCMC_SEED"


def header_line(subcommand: str) -> str:
    return f"# qpmcmc-sim v{__version__} {subcommand}"


def _format(value) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_rows(handle, subcommand: str, rows, columns=None) -> None:
    rows = list(rows)
    handle.write(header_line(subcommand) + "\n")
    if columns is None:
        columns = list(rows[0]) if rows else []
    writer = csv.writer(handle, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_format(row[c]) for c in columns])


@contextmanager
def _open_out(path: str | None):
    if path in (None, "-"):
        yield sys.stdout
    else:
        with open(path, "w", newline="") as handle:
            yield handle


def _int_or_random(text: str):
    return text if text == "random" else int(text)


def resolve_seed(seed: int | None) -> int:
    if seed is not None:
        return seed
    env = os.environ.get(SEED_ENV)
    if env is None or env == "":
        return 0
    try:
        return int(env)
    except ValueError as exc:
        raise InvalidArgumentError(f"{SEED_ENV} must be an integer, got {env!r}") from exc


# --------------------------------------------------------------------------
# subcommands


def cmd_grover_curves(args) -> None:
    n = args.n or (2**14)
    m_list = args.m or [1, 4, 64, 256]
    max_iters = args.iters if args.iters is not None else 250
    rows = experiments.grover_curves(n, m_list, max_iters)
    with _open_out(args.out) as out:
        write_rows(out, "grover-curves", rows, ["N", "M", "j", "success_prob"])


def cmd_search_bench(args) -> None:
    rows = experiments.search_bench(
        algorithms=args.algorithms,
        n_list=args.n_list or [4096],
        m_list=args.m or [1, 2, 4],
        replicates=args.replicates or 500,
        seed=args.seed,
        delta=args.delta,
        w=args.w,
        simulator=args.simulator,
        workers=args.workers,
    )
    columns = ["algorithm", "N", "M", "replicate", "found", "grover_calls", "verify_calls", "time_steps", "target_evals", "oracle_evals"]
    with _open_out(args.out) as out:
        write_rows(out, "search-bench", rows, columns)
    if args.paired_out and set(args.algorithms) == {"qesa", "fpqs"}:
        with _open_out(args.paired_out) as out:
            write_rows(out, "search-bench", experiments.paired_differences(rows))


def cmd_qmin_bench(args) -> None:
    n_list = args.n_list or [256, 512, 1024, 2048, 4096]
    rows = experiments.qmin_bench(
        n_list=n_list,
        start_ranks=args.start_ranks,
        replicates=args.replicates or 500,
        epsilon=args.epsilon,
        seed=args.seed,
        simulator=args.simulator,
        workers=args.workers,
    )
    with _open_out(args.out) as out:
        write_rows(out, "qmin-bench", rows, ["N", "start_rank", "replicate", "oracle_evals", "success"])


def cmd_qpmcmc_normal(args) -> None:
    full = args.full_scale
    results = experiments.qpmcmc_normal(
        dims=args.dims or [1, 3, 10, 30, 100],
        n_proposals=args.proposals or (2000 if full else 512),
        n_iterations=args.iters or 2000,
        seed=args.seed,
        simulator=args.simulator,
        workers=args.workers,
    )
    with _open_out(args.out) as out:
        write_rows(out, "qpmcmc-normal", [summary.as_row() for summary, _ in results])
    if args.trace_dir:
        directory = Path(args.trace_dir)
        directory.mkdir(parents=True, exist_ok=True)
        for summary, trace in results:
            with open(directory / f"trace_D{summary.dim}.csv", "w", newline="") as handle:
                trace.write_csv(handle, header_line("qpmcmc-normal"))
            with open(directory / f"qq_D{summary.dim}.csv", "w", newline="") as handle:
                write_qq_csv(handle, qq_points(trace.post_burn_in().ravel()), header_line("qpmcmc-normal"))


def cmd_qpmcmc_mixture(args) -> None:
    full = args.full_scale
    rows = experiments.qpmcmc_mixture(
        n_modes=args.modes or (1000 if full else 100),
        p_list=args.proposals_list or ([1000, 5000, 10000] if full else [256, 1024]),
        ess_target=args.ess_target,
        replicates=args.replicates or (5 if full else 3),
        seed=args.seed,
        simulator=args.simulator,
        workers=args.workers,
    )
    columns = ["P", "replicate", "iterations", "target_evals", "speedup", "efficiency_gain", "min_ess", "reached"]
    with _open_out(args.out) as out:
        write_rows(out, "qpmcmc-mixture", rows, columns)


def cmd_qpmcmc_ising(args) -> None:
    full = args.full_scale
    side = args.side or (500 if full else 64)
    p_list = args.proposals_list or ([2**k for k in range(1, 12)] if full else [4, 8, 16, 32, 64, 128, 256])
    rows, traces = experiments.qpmcmc_ising(
        side=side,
        rho=args.rho,
        p_list=p_list,
        n_iterations=args.iters or 3000,
        replicates=args.replicates or 10,
        seed=args.seed,
        simulator=args.simulator,
        workers=args.workers,
    )
    with _open_out(args.out) as out:
        write_rows(out, "qpmcmc-ising", rows)
    if args.trace_out:
        with _open_out(args.trace_out) as out:
            trace_rows = (
                {"P": p, "replicate": rep, "iter": i + 1, "log_density": float(v)}
                for (p, rep), path in sorted(traces.items())
                for i, v in enumerate(path)
            )
            write_rows(out, "qpmcmc-ising", trace_rows, ["P", "replicate", "iter", "log_density"])


def cmd_mixing_compare(args) -> None:
    full = args.full_scale
    rows = experiments.mixing_compare(
        p_list=args.proposals_list or [16, 64, 256],
        chains=args.replicates or (100 if full else 20),
        n_iterations=args.iters or 10_000,
        seed=args.seed,
        simulator=args.simulator,
        classical_selector=args.classical_selector,
        workers=args.workers,
    )
    with _open_out(args.out) as out:
        write_rows(out, "mixing-compare", rows)


# --------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None, help=f"64-bit seed (default ${SEED_ENV} or 0)")
    common.add_argument("--out", default="-", help="output CSV path; '-' for stdout")
    common.add_argument("--replicates", type=int, default=None)
    common.add_argument("--simulator", choices=["statevector", "subspace"], default="subspace")
    common.add_argument("--workers", type=int, default=1, help="process-pool size for replicates")
    common.add_argument("--full-scale", action="store_true", help="use much larger grids")

    parser = argparse.ArgumentParser(prog="qpmcmc-sim", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("grover-curves", parents=[common], help="exact Grover success curves")
    p.add_argument("--n", type=int)
    p.add_argument("--m", type=int, nargs="+")
    p.add_argument("--iters", "-S", type=int, help="largest iteration count j")
    p.set_defaults(func=cmd_grover_curves)

    p = sub.add_parser("search-bench", parents=[common], help="QESA and fixed-point search costs")
    p.add_argument("--algorithms", nargs="+", choices=["qesa", "fpqs"], default=["qesa", "fpqs"])
    p.add_argument("--n", dest="n_list", type=int, nargs="+")
    p.add_argument("--m", type=int, nargs="+")
    p.add_argument("--delta", type=float, default=0.1)
    p.add_argument("--w", type=float, default=None, help="fixed-point lower bound (default 1/N)")
    p.add_argument("--paired-out", default=None, help="CSV for FPQS minus QESA differences")
    p.set_defaults(func=cmd_search_bench)

    p = sub.add_parser("qmin-bench", parents=[common], help="quantum minimization with warm starts")
    p.add_argument("--n", dest="n_list", type=int, nargs="+")
    p.add_argument("--start-ranks", type=_int_or_random, nargs="+", default=None)
    p.add_argument("--epsilon", type=float, default=0.1)
    p.set_defaults(func=cmd_qmin_bench)

    p = sub.add_parser("qpmcmc-normal", parents=[common], help="QPMCMC on standard normals")
    p.add_argument("--dims", type=int, nargs="+")
    p.add_argument("--proposals", "-P", type=int)
    p.add_argument("--iters", "-S", type=int)
    p.add_argument("--trace-dir", default=None, help="directory for per-dimension trace and QQ CSVs")
    p.set_defaults(func=cmd_qpmcmc_normal)

    p = sub.add_parser("qpmcmc-mixture", parents=[common], help="race to ESS on a diagonal mixture")
    p.add_argument("--modes", type=int)
    p.add_argument("--proposals", "-P", dest="proposals_list", type=int, nargs="+")
    p.add_argument("--ess-target", type=float, default=100.0)
    p.set_defaults(func=cmd_qpmcmc_mixture)

    p = sub.add_parser("qpmcmc-ising", parents=[common], help="single-flip QPMCMC on an Ising lattice")
    p.add_argument("--side", type=int)
    p.add_argument("--rho", type=float, default=1.0)
    p.add_argument("--proposals", "-P", dest="proposals_list", type=int, nargs="+")
    p.add_argument("--iters", "-S", type=int)
    p.add_argument("--trace-out", default=None, help="CSV for log-density paths")
    p.set_defaults(func=cmd_qpmcmc_ising)

    p = sub.add_parser("mixing-compare", parents=[common], help="classical vs quantum ESS on a 10-D normal")
    p.add_argument("--proposals", "-P", dest="proposals_list", type=int, nargs="+")
    p.add_argument("--iters", "-S", type=int)
    p.add_argument("--classical-selector", choices=["exact", "gumbel"], default="exact")
    p.set_defaults(func=cmd_mixing_compare)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        args.seed = resolve_seed(args.seed)
        if args.replicates is not None and args.replicates < 1:
            raise InvalidArgumentError("--replicates must be at least 1")
        args.func(args)
    except (InvalidArgumentError, ConfigurationError) as exc:
        print(f"qpmcmc-sim: error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001 - top-level reporting
        print(f"qpmcmc-sim: failed: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
