"""Gumbel-max selection and the exact discrete sampler it replaces.

Adding i.i.d. standard Gumbel noise to unnormalized log-probabilities and
taking the argmax yields an exact draw from the normalized distribution, with
no normalizing constant needed.  :func:`exact_discrete_sample` is the
classical inverse-CDF route to the same distribution.
"""

from __future__ import annotations

import math

import numpy as np

from .exceptions import InvalidArgumentError

_U_LOW = np.nextafter(0.0, 1.0)
_U_HIGH = np.nextafter(1.0, 0.0)


def gumbel_from_uniform(u):
    """Inverse CDF of ``G(z) = exp(-exp(-z))``."""
    u = np.clip(u, _U_LOW, _U_HIGH)
    return -np.log(-np.log(u))


def sample_gumbel(rng: np.random.Generator, size=None):
    """Standard Gumbel draws; a float when ``size`` is None."""
    if size is None:
        return -math.log(-math.log(max(rng.random(), _U_LOW)))
    # Generator.random never returns 1.0, so only the lower end needs a guard
    return -np.log(-np.log(np.maximum(rng.random(size), _U_LOW)))


def gumbel_max_select(lp, rng: np.random.Generator | None = None, noise=None, size: int | None = None):
    """``argmax_p (lp[p] + z[p])``, i.e. an exact draw from ``softmax(lp)``.

    ``-inf`` entries are legal and never chosen.  Pass ``noise`` to reuse a
    fixed Gumbel realization; otherwise fresh noise is drawn from ``rng``.
    Ties go to the smaller index.  With ``size`` set, returns that many
    independent draws as an integer array (``noise`` is then ignored).
    """
    lp = np.asarray(lp, dtype=float)
    if lp.ndim != 1 or lp.size == 0:
        raise InvalidArgumentError("log-probabilities must be a non-empty vector")
    if not np.any(np.isfinite(lp)):
        raise InvalidArgumentError("at least one log-probability must be finite")
    if np.any(np.isnan(lp)) or np.any(lp == np.inf):
        raise InvalidArgumentError("log-probabilities must be finite or -inf")
    if size is not None:
        if rng is None:
            raise InvalidArgumentError("batched draws need an rng")
        return np.argmax(lp + sample_gumbel(rng, (int(size), lp.size)), axis=1)
    if noise is None:
        if rng is None:
            raise InvalidArgumentError("need either rng or noise")
        noise = sample_gumbel(rng, lp.size)
    return int(np.argmax(lp + noise))


def exact_discrete_sample(weights, rng: np.random.Generator, size: int | None = None):
    """Index ``p`` with probability ``weights[p] / sum(weights)``.

    With ``size`` set, returns that many independent draws as an array.
    """
    w = np.asarray(weights, dtype=float)
    if w.ndim != 1 or w.size == 0:
        raise InvalidArgumentError("weights must be a non-empty vector")
    if np.any(w < 0) or not np.all(np.isfinite(w)):
        raise InvalidArgumentError("weights must be finite and nonnegative")
    cdf = np.cumsum(w)
    total = cdf[-1]
    if not total > 0:
        raise InvalidArgumentError("at least one weight must be positive")
    if size is not None:
        idx = np.searchsorted(cdf, rng.random(int(size)) * total, side="right")
        return np.where(idx >= w.size, np.flatnonzero(w)[-1], idx)
    idx = int(np.searchsorted(cdf, rng.random() * total, side="right"))
    if idx >= w.size:
        # u * total rounded up to total; fall back to the last positive weight
        idx = int(np.flatnonzero(w)[-1])
    return idx
