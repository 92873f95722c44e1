"""Target log-densities, proposal mechanisms and proposal-scale adaptation."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from scipy.special import logsumexp

from .exceptions import InvalidArgumentError


class Target:
    """Log-density with an evaluation counter.

    Subclasses implement ``_log_density`` on a 2-D batch (one state per row).
    :meth:`log_density` counts one evaluation per row; the uncounted path is
    for simulator-side bookkeeping whose cost is charged separately through
    :meth:`charge`.
    """

    def __init__(self, dim: int):
        if dim < 1:
            raise InvalidArgumentError("dimension must be positive")
        self.dim = int(dim)
        self.evaluations = 0

    def _log_density(self, x: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def _batch(self, x) -> tuple[np.ndarray, bool]:
        arr = np.asarray(x, dtype=float)
        single = arr.ndim == 1
        arr = np.atleast_2d(arr)
        if arr.shape[1] != self.dim:
            raise InvalidArgumentError(f"expected states of dimension {self.dim}, got {arr.shape[1]}")
        return arr, single

    def log_density(self, x):
        arr, single = self._batch(x)
        self.evaluations += arr.shape[0]
        out = self._log_density(arr)
        return float(out[0]) if single else out

    def log_density_uncounted(self, x):
        arr, single = self._batch(x)
        out = self._log_density(arr)
        return float(out[0]) if single else out

    def charge(self, n: int) -> None:
        self.evaluations += int(n)


class StandardNormal(Target):
    def _log_density(self, x):
        return -0.5 * np.einsum("ij,ij->i", x, x)


class IsotropicGaussian(Target):
    def __init__(self, mean, sd: float = 1.0):
        mean = np.atleast_1d(np.asarray(mean, dtype=float))
        super().__init__(mean.size)
        if sd <= 0:
            raise InvalidArgumentError("sd must be positive")
        self.mean, self.sd = mean, float(sd)

    def _log_density(self, x):
        d = (x - self.mean) / self.sd
        return -0.5 * np.einsum("ij,ij->i", d, d)


class GaussianMixtureTarget(Target):
    """Equal-weight mixture of isotropic Gaussians (unnormalized)."""

    def __init__(self, means, sd: float = 1.0):
        means = np.atleast_2d(np.asarray(means, dtype=float))
        super().__init__(means.shape[1])
        if sd <= 0:
            raise InvalidArgumentError("sd must be positive")
        if len(np.unique(means, axis=0)) != len(means):
            raise InvalidArgumentError("mixture means must be distinct")
        self.means = means
        self.sd = float(sd)
        self._mean_sq = np.einsum("ij,ij->i", means, means)

    @property
    def n_modes(self) -> int:
        return self.means.shape[0]

    @classmethod
    def diagonal(cls, n_modes: int, dim: int = 2, spacing: float = 10.0, sd: float = 1.0):
        """Modes at ``spacing * (k, ..., k)`` for ``k = 0..n_modes-1``."""
        if n_modes < 1:
            raise InvalidArgumentError("need at least one mode")
        ks = spacing * np.arange(n_modes, dtype=float)
        return cls(np.repeat(ks[:, None], dim, axis=1), sd)

    def _log_density(self, x):
        # |x - mu|^2 expanded so a (rows, modes) matrix product does the work
        sq = np.einsum("ij,ij->i", x, x)[:, None] - 2.0 * x @ self.means.T + self._mean_sq[None, :]
        return logsumexp(-0.5 * np.maximum(sq, 0.0) / self.sd**2, axis=1)


# --------------------------------------------------------------------------
# Ising lattice


@dataclass
class IsingLattice:
    """Free-boundary nearest-neighbour Ising configuration.

    Sites are addressed by flat index ``row * width + col``.  The
    log-density is ``rho * sum_{edges} s_d s_d'`` (unnormalized).
    """

    spins: np.ndarray
    rho: float = 1.0

    def __post_init__(self) -> None:
        self.spins = np.array(self.spins, dtype=np.int8)
        if self.spins.ndim != 2:
            raise InvalidArgumentError("spins must form a 2-D grid")
        if not np.all(np.abs(self.spins) == 1):
            raise InvalidArgumentError("every spin must be -1 or +1")
        if not self.rho > 0:
            raise InvalidArgumentError("interaction rho must be positive")

    @classmethod
    def checkerboard(cls, height: int, width: int | None = None, rho: float = 1.0) -> "IsingLattice":
        width = height if width is None else width
        rows, cols = np.indices((height, width))
        return cls(np.where((rows + cols) % 2 == 0, 1, -1), rho)

    @classmethod
    def uniform(cls, height: int, width: int | None = None, value: int = 1, rho: float = 1.0):
        width = height if width is None else width
        return cls(np.full((height, width), value), rho)

    @property
    def height(self) -> int:
        return self.spins.shape[0]

    @property
    def width(self) -> int:
        return self.spins.shape[1]

    @property
    def n_sites(self) -> int:
        return self.spins.size

    @property
    def n_edges(self) -> int:
        return self.height * (self.width - 1) + (self.height - 1) * self.width

    def copy(self) -> "IsingLattice":
        return IsingLattice(self.spins.copy(), self.rho)

    def log_density(self) -> float:
        return ising_log_density(self)

    def flip_delta(self, site: int) -> float:
        return ising_flip_delta(self, site)

    def flip_deltas(self, sites) -> np.ndarray:
        """Vectorized :meth:`flip_delta` over many sites."""
        sites = np.asarray(sites, dtype=np.int64)
        if sites.size <= 8:
            # numpy call overhead dominates for a handful of sites
            return np.array([ising_flip_delta(self, int(site)) for site in sites], dtype=float)
        if sites.min() < 0 or sites.max() >= self.n_sites:
            raise InvalidArgumentError("site index out of range")
        # padded flat view: neighbour slot n_sites reads a zero spin
        flat = np.append(self.spins.ravel(), np.int8(0))
        nb = flat[self._neighbours()[sites]].sum(axis=1, dtype=np.int64)
        return -2.0 * self.rho * (flat[sites] * nb)

    def _neighbours(self) -> np.ndarray:
        table = getattr(self, "_neighbour_table", None)
        if table is None or table.shape[0] != self.n_sites:
            h, w = self.height, self.width
            r, c = np.divmod(np.arange(h * w), w)
            pad = h * w
            table = np.stack(
                [
                    np.where(r > 0, (r - 1) * w + c, pad),
                    np.where(r < h - 1, (r + 1) * w + c, pad),
                    np.where(c > 0, r * w + c - 1, pad),
                    np.where(c < w - 1, r * w + c + 1, pad),
                ],
                axis=1,
            )
            self._neighbour_table = table
        return table

    def flip(self, site: int) -> None:
        r, c = divmod(self._check_site(site), self.width)
        self.spins[r, c] = -self.spins[r, c]

    def _check_site(self, site: int) -> int:
        if not 0 <= site < self.n_sites:
            raise InvalidArgumentError(f"site {site} outside 0..{self.n_sites - 1}")
        return int(site)

    def to_text(self) -> str:
        return "\n".join(" ".join("+1" if v > 0 else "-1" for v in row) for row in self.spins) + "\n"

    @classmethod
    def from_text(cls, text: str, rho: float = 1.0) -> "IsingLattice":
        rows = [[int(tok) for tok in line.split()] for line in text.strip().splitlines() if line.strip()]
        return cls(np.array(rows), rho)


def ising_log_density(lattice: IsingLattice) -> float:
    s = lattice.spins.astype(np.int64)
    total = int((s[:, :-1] * s[:, 1:]).sum() + (s[:-1, :] * s[1:, :]).sum())
    return lattice.rho * total


def ising_flip_delta(lattice: IsingLattice, site: int) -> float:
    """Change in log-density if ``site`` were flipped: ``-2 rho s_site sum(neighbours)``."""
    r, c = divmod(lattice._check_site(site), lattice.width)
    s = lattice.spins
    nb = 0
    if r > 0:
        nb += int(s[r - 1, c])
    if r < lattice.height - 1:
        nb += int(s[r + 1, c])
    if c > 0:
        nb += int(s[r, c - 1])
    if c < lattice.width - 1:
        nb += int(s[r, c + 1])
    return -2.0 * lattice.rho * int(s[r, c]) * nb


class IsingTarget(Target):
    """Ising log-density on flattened configurations, for full-state proposals."""

    def __init__(self, height: int, width: int | None = None, rho: float = 1.0):
        width = height if width is None else width
        super().__init__(height * width)
        if not rho > 0:
            raise InvalidArgumentError("interaction rho must be positive")
        self.height, self.width, self.rho = height, width, float(rho)

    def _log_density(self, x):
        grid = x.reshape(-1, self.height, self.width)
        horiz = (grid[:, :, :-1] * grid[:, :, 1:]).sum(axis=(1, 2))
        vert = (grid[:, :-1, :] * grid[:, 1:, :]).sum(axis=(1, 2))
        return self.rho * (horiz + vert)


# --------------------------------------------------------------------------
# proposals

PROPOSAL_KINDS = ("centered-gaussian", "single-flip", "uniform-independence")


@dataclass
class ProposalSet:
    """Current state (index 0) plus ``P`` proposals.

    ``states`` holds full states row-wise, except for ``single-flip`` sets,
    where it holds the flipped site per proposal and ``-1`` at index 0.
    """

    states: np.ndarray
    kind: str

    def __post_init__(self) -> None:
        if self.kind not in PROPOSAL_KINDS:
            raise InvalidArgumentError(f"unknown proposal kind {self.kind!r}")
        if len(self.states) < 2:
            raise InvalidArgumentError("a proposal set needs the current state and at least one proposal")

    @property
    def n_proposals(self) -> int:
        return len(self.states) - 1


def centered_gaussian_proposals(current, scale: float, n_proposals: int, rng: np.random.Generator) -> ProposalSet:
    """Draw a centre ``~ N(current, scale^2 I)``, then ``P`` proposals ``~ N(centre, scale^2 I)``.

    All ``P+1`` joint proposal densities coincide under this two-stage draw,
    which is what licenses selection weights proportional to the target alone.
    """
    if n_proposals < 1:
        raise InvalidArgumentError("need at least one proposal")
    if not scale > 0:
        raise InvalidArgumentError("scale must be positive")
    current = np.asarray(current, dtype=float)
    dim = current.size
    centre = current + scale * rng.standard_normal(dim)
    states = np.empty((n_proposals + 1, dim))
    states[0] = current
    states[1:] = centre + scale * rng.standard_normal((n_proposals, dim))
    return ProposalSet(states, "centered-gaussian")


def single_flip_proposals(lattice: IsingLattice, n_proposals: int, rng: np.random.Generator) -> ProposalSet:
    """``P`` distinct sites chosen uniformly; proposal ``p`` flips site ``p``.

    The pairwise rule (flip a site, flip it back) is an involution, so for
    ``P = 1`` the selection step is exact.  For ``P > 1`` the set is not
    re-generated from a proposal state, so proportional-to-target selection
    is only approximately stationary (see the README).
    """
    if n_proposals < 1:
        raise InvalidArgumentError("need at least one proposal")
    if n_proposals > lattice.n_sites:
        raise InvalidArgumentError(f"cannot flip {n_proposals} distinct sites of {lattice.n_sites}")
    sites = np.empty(n_proposals + 1, dtype=np.int64)
    sites[0] = -1
    if n_proposals == 1:
        sites[1] = rng.integers(lattice.n_sites)
    else:
        sites[1:] = rng.choice(lattice.n_sites, size=n_proposals, replace=False)
    return ProposalSet(sites, "single-flip")


def uniform_independence_proposals(current, n_proposals: int, rng: np.random.Generator) -> ProposalSet:
    """``P`` i.i.d. uniform spin configurations, independent of ``current``."""
    if n_proposals < 1:
        raise InvalidArgumentError("need at least one proposal")
    current = np.asarray(current, dtype=float).ravel()
    states = np.empty((n_proposals + 1, current.size))
    states[0] = current
    states[1:] = rng.choice(np.array([-1.0, 1.0]), size=(n_proposals, current.size))
    return ProposalSet(states, "uniform-independence")


# --------------------------------------------------------------------------
# adaptation


@dataclass(frozen=True)
class AdaptationState:
    log_scale: float = 0.0
    target_accept: float = 0.5
    iteration: int = 0
    decay: float = 0.6

    def __post_init__(self) -> None:
        if not 0 < self.target_accept < 1:
            raise InvalidArgumentError("target acceptance must lie in (0, 1)")

    @property
    def scale(self) -> float:
        return math.exp(self.log_scale)


def adapt_scale(state: AdaptationState, accepted: bool) -> AdaptationState:
    """Robbins-Monro step on the log scale with gain ``t^-decay``, ``t = iteration + 1``."""
    t = state.iteration + 1
    gain = t ** (-state.decay)
    return replace(
        state,
        log_scale=state.log_scale + gain * (float(accepted) - state.target_accept),
        iteration=t,
    )
