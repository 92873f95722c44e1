"""State-vector simulation of Grover-type search.

The data register over ``N`` basis states is held as a dense complex vector.
Oracle ancillas and phase kickback are not represented: the oracle acts
directly as a sign (or phase) flip on the marked amplitudes, and the
diffusion step reflects the register about the uniform state, i.e. about the
mean amplitude.  ``N`` does not have to be a power of two.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .exceptions import InvalidArgumentError

NORM_TOL = 1e-10


@dataclass
class AmplitudeRegister:
    """Complex amplitudes over ``n_items`` basis states."""

    amps: np.ndarray

    def __post_init__(self) -> None:
        self.amps = np.asarray(self.amps, dtype=np.complex128)
        if self.amps.ndim != 1 or self.amps.size < 1:
            raise InvalidArgumentError("amplitudes must be a non-empty 1-D sequence")

    @property
    def n_items(self) -> int:
        return self.amps.size

    def probabilities(self) -> np.ndarray:
        return self.amps.real**2 + self.amps.imag**2

    def norm_squared(self) -> float:
        return float(self.probabilities().sum())

    def copy(self) -> "AmplitudeRegister":
        return AmplitudeRegister(self.amps.copy())


@dataclass
class MarkSet:
    """Membership indicator of the marked (solution) states."""

    marked: np.ndarray
    count: int = field(init=False)

    def __post_init__(self) -> None:
        self.marked = np.asarray(self.marked, dtype=bool)
        if self.marked.ndim != 1:
            raise InvalidArgumentError("mark indicator must be 1-D")
        self.count = int(np.count_nonzero(self.marked))
        self._indices: np.ndarray | None = None
        self._unmarked: np.ndarray | None = None
        self._signs: np.ndarray | None = None

    @classmethod
    def from_indices(cls, n_items: int, indices) -> "MarkSet":
        marked = np.zeros(n_items, dtype=bool)
        idx = np.asarray(list(indices) if not isinstance(indices, np.ndarray) else indices, dtype=np.int64)
        if idx.size and (idx.min() < 0 or idx.max() >= n_items):
            raise InvalidArgumentError("marked index out of range")
        marked[idx] = True
        return cls(marked)

    @property
    def n_items(self) -> int:
        return self.marked.size

    @property
    def indices(self) -> np.ndarray:
        if self._indices is None:
            self._indices = np.flatnonzero(self.marked)
        return self._indices

    @property
    def unmarked_indices(self) -> np.ndarray:
        if self._unmarked is None:
            self._unmarked = np.flatnonzero(~self.marked)
        return self._unmarked

    @property
    def signs(self) -> np.ndarray:
        """``1 - 2*marks`` as floats; the standard oracle is a multiply by this."""
        if self._signs is None:
            self._signs = 1.0 - 2.0 * self.marked
        return self._signs


def uniform_register(n_items: int) -> AmplitudeRegister:
    """Uniform superposition ``|h>``: every amplitude equals ``1/sqrt(N)``."""
    if n_items < 1:
        raise InvalidArgumentError(f"register needs at least one state, got {n_items}")
    return AmplitudeRegister(np.full(n_items, 1.0 / np.sqrt(n_items), dtype=np.complex128))


def _check_dims(reg: AmplitudeRegister, marks: MarkSet) -> None:
    if marks.n_items != reg.n_items:
        raise InvalidArgumentError(
            f"mark set covers {marks.n_items} states but register has {reg.n_items}"
        )


def grover_iterate(reg: AmplitudeRegister, marks: MarkSet) -> AmplitudeRegister:
    """One standard Grover iteration, in place.

    Marked amplitudes are negated, then every amplitude is reflected about
    the mean (``a <- 2*mean(a) - a``).  Returns ``reg`` for chaining.
    """
    _check_dims(reg, marks)
    a = reg.amps
    if marks.count:
        np.multiply(a, marks.signs, out=a)
    mean = a.mean()
    np.negative(a, out=a)
    a += 2.0 * mean
    return reg


def generalized_grover_iterate(
    reg: AmplitudeRegister, marks: MarkSet, alpha: float, beta: float
) -> AmplitudeRegister:
    """Phase-generalized Grover iteration ``((1-e^{-i alpha})|h><h| - I)(I - (1-e^{i beta})P)``.

    ``P`` projects onto the marked states, so the oracle multiplies marked
    amplitudes by ``e^{i beta}``; the diffusion maps ``a`` to
    ``(1 - e^{-i alpha}) mean(a) - a``.  With ``alpha = beta = pi`` this is
    exactly :func:`grover_iterate`.  Operates in place.
    """
    _check_dims(reg, marks)
    if not (np.isfinite(alpha) and np.isfinite(beta)):
        raise InvalidArgumentError("phases must be finite")
    a = reg.amps
    if marks.count:
        a[marks.marked] *= np.exp(1j * beta)
    mean = a.mean()
    np.negative(a, out=a)
    a += (1.0 - np.exp(-1j * alpha)) * mean
    return reg


def measure(reg: AmplitudeRegister, rng: np.random.Generator) -> int:
    """Sample a basis index with probability ``|amp|^2``."""
    cdf = np.cumsum(reg.probabilities())
    total = cdf[-1]
    assert abs(total - 1.0) < 1e-8, f"register norm drifted to {total!r}"
    idx = int(np.searchsorted(cdf, rng.random() * total, side="right"))
    return min(idx, reg.n_items - 1)


def two_level_amplitudes(n_items: int, n_marked: int, iterations: int) -> tuple[float, float]:
    """Amplitudes ``(marked, unmarked)`` after standard iterations from ``|h>``.

    Starting from the uniform state the register never leaves the plane
    spanned by the normalized marked and unmarked superpositions, so it is
    fully described by ``sin((2j+1) theta)`` and ``cos((2j+1) theta)`` with
    ``sin^2 theta = M/N``.  Returns per-state amplitudes; an empty group gets 0.
    """
    if n_marked == 0:
        return 0.0, 1.0 / math.sqrt(n_items)
    if n_marked == n_items:
        # theta = pi/2; every iteration maps the all-marked uniform state to +-itself
        return (-1.0) ** iterations / math.sqrt(n_items), 0.0
    angle = (2 * iterations + 1) * math.asin(math.sqrt(n_marked / n_items))
    return math.sin(angle) / math.sqrt(n_marked), math.cos(angle) / math.sqrt(n_items - n_marked)


def success_probability(n_items: int, n_marked: int, iterations: int) -> float:
    """Closed-form ``sin^2((2j+1) arcsin sqrt(M/N))``."""
    if n_marked == 0:
        return 0.0
    return math.sin((2 * iterations + 1) * math.asin(math.sqrt(n_marked / n_items))) ** 2
