"""Independent reference implementations used as test oracles.

Nothing here imports the package's algorithms; these are deliberately naive
(dense matrices, brute-force enumeration, high-precision closed forms).
"""

from __future__ import annotations

import itertools
import math

import mpmath as mp
import numpy as np

# --------------------------------------------------------------------------
# dense-matrix Grover


def dense_grover_matrix(marked: np.ndarray) -> np.ndarray:
    """``(2|h><h| - I) diag(1 - 2 marked)`` as an explicit matrix."""
    n = marked.size
    h = np.full(n, 1 / math.sqrt(n))
    return (2 * np.outer(h, h) - np.eye(n)) @ np.diag(1.0 - 2.0 * marked)


def dense_generalized_matrix(marked: np.ndarray, alpha: float, beta: float) -> np.ndarray:
    """``-S_s(alpha) S_t(beta)`` with ``S_t = I - (1 - e^{i beta}) P_T`` and
    ``S_s = I - (1 - e^{-i alpha}) |s><s|``."""
    n = marked.size
    s = np.full(n, 1 / math.sqrt(n))
    s_t = np.eye(n, dtype=complex) - (1 - np.exp(1j * beta)) * np.diag(marked.astype(float))
    s_s = np.eye(n, dtype=complex) - (1 - np.exp(-1j * alpha)) * np.outer(s, s)
    return -s_s @ s_t


def dense_success(marked: np.ndarray, iterations: int) -> float:
    n = marked.size
    g = dense_grover_matrix(marked)
    a = np.full(n, 1 / math.sqrt(n))
    for _ in range(iterations):
        a = g @ a
    return float(np.sum(np.abs(a[marked]) ** 2))


def mp_success(n: int, m: int, j: int, dps: int = 40) -> float:
    with mp.workdps(dps):
        return float(mp.sin((2 * j + 1) * mp.asin(mp.sqrt(mp.mpf(m) / n))) ** 2)


# --------------------------------------------------------------------------
# fixed-point search


def chebyshev_t(order: float, x: float) -> float:
    if abs(x) <= 1:
        return math.cos(order * math.acos(x))
    return math.cosh(order * math.acosh(x))


def fixed_point_success_closed_form(delta: float, length: int, lam: float) -> float:
    """``1 - delta^2 T_L(T_{1/L}(1/delta) sqrt(1 - lambda))^2``."""
    inner = chebyshev_t(1.0 / length, 1.0 / delta)
    return 1.0 - delta**2 * chebyshev_t(length, inner * math.sqrt(1.0 - lam)) ** 2


def mp_fixed_point_phases(delta: float, length: int):
    """Phases via mpmath's principal arccot, for comparison modulo 2 pi."""
    with mp.workdps(30):
        gamma = 1 / mp.cosh(mp.acosh(1 / mp.mpf(delta)) / length)
        l = (length - 1) // 2
        alphas = [2 * mp.acot(mp.tan(2 * mp.pi * j / length) * mp.sqrt(1 - gamma**2)) for j in range(1, l + 1)]
        return [float(a) for a in alphas], [float(-alphas[l - j]) for j in range(1, l + 1)]


# --------------------------------------------------------------------------
# budgets


def mp_qmin_budget(n: int) -> float:
    with mp.workdps(30):
        return float(mp.mpf(45) / 4 * mp.sqrt(n) + mp.mpf(7) / 10 * mp.log(n, 2))


def mp_warm_budget(n: int, k: int) -> float:
    with mp.workdps(30):
        return float((mp.mpf(5) / 4 - 1 / mp.sqrt(k - 1)) * 9 * mp.sqrt(n) + mp.mpf(7) / 10 * mp.log(k, 2) * mp.log(n, 2))


# --------------------------------------------------------------------------
# Ising and exact MCMC kernels


def brute_ising_log_density(spins: np.ndarray, rho: float) -> float:
    h, w = spins.shape
    total = 0
    for r in range(h):
        for c in range(w):
            if c + 1 < w:
                total += int(spins[r, c]) * int(spins[r, c + 1])
            if r + 1 < h:
                total += int(spins[r, c]) * int(spins[r + 1, c])
    return rho * total


def enumerate_states(h: int, w: int):
    for bits in itertools.product([-1, 1], repeat=h * w):
        yield np.array(bits, dtype=np.int8).reshape(h, w)


def boltzmann(h: int, w: int, rho: float) -> np.ndarray:
    lp = np.array([brute_ising_log_density(s, rho) for s in enumerate_states(h, w)])
    p = np.exp(lp - lp.max())
    return p / p.sum()


def state_index(spins: np.ndarray) -> int:
    """Index into :func:`enumerate_states` order (row-major, -1 before +1)."""
    idx = 0
    for v in spins.ravel():
        idx = 2 * idx + (1 if v > 0 else 0)
    return idx


def single_flip_kernel(h: int, w: int, rho: float, n_proposals: int) -> np.ndarray:
    """Exact transition matrix of the classical single-flip multiproposal step.

    A uniformly random ``P``-subset of sites is proposed; the next state is
    drawn from the current state and the ``P`` flips proportionally to the
    target.
    """
    states = list(enumerate_states(h, w))
    n_sites = h * w
    subsets = list(itertools.combinations(range(n_sites), n_proposals))
    kernel = np.zeros((len(states), len(states)))
    for i, s in enumerate(states):
        for subset in subsets:
            cands = [s]
            for site in subset:
                t = s.copy().ravel()
                t[site] = -t[site]
                cands.append(t.reshape(h, w))
            lp = np.array([brute_ising_log_density(c, rho) for c in cands])
            wts = np.exp(lp - lp.max())
            wts /= wts.sum()
            for c, p in zip(cands, wts):
                kernel[i, state_index(c)] += p / len(subsets)
    return kernel


def stationary(kernel: np.ndarray) -> np.ndarray:
    vals, vecs = np.linalg.eig(kernel.T)
    v = np.real(vecs[:, np.argmin(np.abs(vals - 1))])
    return v / v.sum()


# --------------------------------------------------------------------------
# time series


def ar1(phi: float, n: int, rng: np.random.Generator) -> np.ndarray:
    x = np.empty(n)
    x[0] = rng.standard_normal() / math.sqrt(1 - phi * phi)
    eps = rng.standard_normal(n)
    for t in range(1, n):
        x[t] = phi * x[t - 1] + eps[t]
    return x


def ar1_ess(phi: float, n: int) -> float:
    return n * (1 - phi) / (1 + phi)
