"""Chain diagnostics: effective sample size, QQ quantiles, replicate summaries."""

from __future__ import annotations

import csv
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.stats import norm

from .exceptions import InvalidArgumentError

MIN_ESS_LENGTH = 10


class DegenerateSeriesWarning(UserWarning):
    """Raised (as a warning) when ESS is requested for a constant series."""


def autocovariance(x) -> np.ndarray:
    """Biased sample autocovariance at all lags, via zero-padded FFT."""
    x = np.asarray(x, dtype=float)
    n = x.size
    centered = x - x.mean()
    size = 1 << (2 * n - 1).bit_length()
    spectrum = np.fft.rfft(centered, size)
    return np.fft.irfft(spectrum * np.conj(spectrum), size)[:n] / n


def effective_sample_size(series) -> float:
    """Geyer's initial monotone sequence estimator.

    Sums of adjacent autocovariance pairs ``gamma_2m + gamma_(2m+1)`` are
    accumulated while positive and forced nonincreasing.  The estimate is not
    capped at the series length, so antithetic chains may report ESS > S.  A
    constant series returns its length and issues a
    :class:`DegenerateSeriesWarning`.
    """
    x = np.asarray(series, dtype=float)
    if x.ndim != 1:
        raise InvalidArgumentError("series must be one-dimensional")
    n = x.size
    if n < MIN_ESS_LENGTH:
        raise InvalidArgumentError(f"need at least {MIN_ESS_LENGTH} values, got {n}")
    if not np.all(np.isfinite(x)):
        raise InvalidArgumentError("series contains non-finite values")
    gamma = autocovariance(x)
    if not gamma[0] > 1e-300 or np.ptp(x) == 0:
        warnings.warn("constant series; ESS set to its length", DegenerateSeriesWarning, stacklevel=2)
        return float(n)

    n_pairs = n // 2
    pairs = gamma[: 2 * n_pairs].reshape(n_pairs, 2).sum(axis=1)
    nonpositive = np.flatnonzero(pairs <= 0)
    stop = nonpositive[0] if nonpositive.size else n_pairs
    monotone = np.minimum.accumulate(pairs[:stop])
    tau = (-gamma[0] + 2.0 * monotone.sum()) / gamma[0]
    # tau is at least 1/n for any positive initial pair; guard the empty case
    tau = max(tau, 1.0 / n)
    return float(n / tau)


@dataclass(frozen=True)
class EssReport:
    per_dimension: tuple[float, ...]

    @property
    def mean_ess(self) -> float:
        return float(np.mean(self.per_dimension))

    @property
    def min_ess(self) -> float:
        return float(np.min(self.per_dimension))

    def rows(self):
        for d, value in enumerate(self.per_dimension):
            yield {"dimension": d, "ess": value}


def ess_report(samples) -> EssReport:
    """Per-column ESS of an ``(S, D)`` sample matrix (a vector counts as D=1)."""
    arr = np.asarray(samples, dtype=float)
    if arr.ndim == 1:
        arr = arr[:, None]
    if arr.ndim != 2:
        raise InvalidArgumentError("samples must be a vector or an (S, D) matrix")
    return EssReport(tuple(effective_sample_size(arr[:, d]) for d in range(arr.shape[1])))


def relative_ess_difference(baseline: EssReport, other: EssReport) -> tuple[float, float]:
    """``|ESS_base - ESS_other| / ESS_base`` for the mean and the minimum."""
    if baseline.mean_ess <= 0 or baseline.min_ess <= 0:
        raise InvalidArgumentError("baseline ESS must be positive")
    mean_rel = abs(baseline.mean_ess - other.mean_ess) / baseline.mean_ess
    min_rel = abs(baseline.min_ess - other.min_ess) / baseline.min_ess
    return mean_rel, min_rel


def qq_points(samples) -> np.ndarray:
    """``(theoretical, empirical)`` standard-normal quantile pairs, shape ``(n, 2)``.

    Plotting positions are ``(i - 0.5) / n`` for ``i = 1..n``.
    """
    x = np.sort(np.asarray(samples, dtype=float).ravel())
    n = x.size
    if n < 100:
        raise InvalidArgumentError("QQ extraction needs at least 100 samples")
    theoretical = norm.ppf((np.arange(1, n + 1) - 0.5) / n)
    return np.column_stack([theoretical, x])


def central_qq_deviation(points: np.ndarray, coverage: float = 0.98) -> float:
    """Max ``|empirical - theoretical|`` over the central ``coverage`` of points."""
    n = len(points)
    cut = int(np.floor(n * (1 - coverage) / 2))
    core = points[cut : n - cut]
    return float(np.max(np.abs(core[:, 1] - core[:, 0])))


@dataclass(frozen=True)
class Summary:
    n: int
    mean: float
    sd: float
    sem: float
    median: float
    minimum: float
    maximum: float


def summarize(values) -> Summary:
    """Replicate summary; ``sd`` uses ``ddof=1`` (zero for a single value)."""
    v = np.asarray(values, dtype=float).ravel()
    if v.size == 0:
        raise InvalidArgumentError("nothing to summarize")
    sd = float(v.std(ddof=1)) if v.size > 1 else 0.0
    return Summary(
        n=int(v.size),
        mean=float(v.mean()),
        sd=sd,
        sem=sd / np.sqrt(v.size),
        median=float(np.median(v)),
        minimum=float(v.min()),
        maximum=float(v.max()),
    )


def write_ess_csv(handle, report: EssReport, header: str | None = None) -> None:
    if header:
        handle.write(header.rstrip("\n") + "\n")
    writer = csv.writer(handle, lineterminator="\n")
    writer.writerow(["dimension", "ess"])
    for row in report.rows():
        writer.writerow([row["dimension"], repr(row["ess"])])


def write_qq_csv(handle, points: np.ndarray, header: str | None = None) -> None:
    if header:
        handle.write(header.rstrip("\n") + "\n")
    writer = csv.writer(handle, lineterminator="\n")
    writer.writerow(["theoretical", "empirical"])
    for t, e in points:
        writer.writerow([repr(float(t)), repr(float(e))])
