"""Relative entropy and discrete Fisher informations against the uniform law.

All sums are accumulated with math.fsum, and both functionals clamp tiny
negative rounding residue to 0 (each is nonnegative in exact arithmetic).

Zero-probability conventions for the Fisher informations: an edge whose two
endpoints both carry zero mass contributes 0; an edge with exactly one zero
endpoint makes the functional +inf and sets the vacuous flag. On these
connected graphs that means I is finite iff nu has full support.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .state_spaces import StateSpace

MASS_TOL = 1e-12


@dataclass(frozen=True)
class Distribution:
    """Probability vector over a StateSpace; validated at construction."""

    space: StateSpace
    weights: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        w = np.asarray(self.weights, dtype=np.float64).copy()
        if w.shape != (self.space.size,):
            raise ValueError(
                f"weights must have length {self.space.size} for {self.space}, "
                f"got shape {w.shape}"
            )
        if np.any(w < 0):
            raise ValueError("weights must be nonnegative")
        mass = math.fsum(w.tolist())
        if abs(mass - 1.0) > MASS_TOL:
            raise ValueError(f"weights must sum to 1 within {MASS_TOL}, got {mass!r}")
        object.__setattr__(self, "weights", w)


def uniform(space: StateSpace) -> Distribution:
    return Distribution(space, np.full(space.size, 1.0 / space.size))


def point_mass(space: StateSpace, x: int) -> Distribution:
    if not 0 <= x < space.size:
        raise ValueError(f"state index {x} out of range for {space}")
    w = np.zeros(space.size)
    w[x] = 1.0
    return Distribution(space, w)


@dataclass(frozen=True)
class FunctionalValue:
    """Extended nonnegative real; vacuous marks +inf from a support mismatch."""

    value: float
    vacuous: bool = False

    def __float__(self) -> float:
        return self.value

    @property
    def finite(self) -> bool:
        return math.isfinite(self.value)


def relative_entropy(nu: Distribution) -> FunctionalValue:
    """H(nu|mu) = sum nu(x) log(nu(x) * size), mu uniform, 0 log 0 = 0."""
    size = nu.space.size
    w = nu.weights
    pos = w > 0
    terms = w[pos] * np.log(w[pos] * size)
    value = math.fsum(terms.tolist())
    return FunctionalValue(max(value, 0.0), False)


def fisher_hypercube(nu: Distribution) -> FunctionalValue:
    """I(nu|mu) = (1/2) sum_i sum_x (rho(x^i)-rho(x))(log rho(x^i)-log rho(x)) mu(x)
    with rho = size * nu; the sum runs over all coordinates i."""
    if nu.space.kind != "hypercube":
        raise ValueError(f"fisher_hypercube needs a hypercube space, got {nu.space}")
    n = nu.space.n
    size = nu.space.size
    rho = nu.weights * size
    pos = rho > 0
    logs = np.zeros(size)
    np.log(rho, out=logs, where=pos)
    idx = np.arange(size)
    pieces: list[float] = []
    for i in range(n):
        flipped = idx ^ (1 << i)
        pos_f = pos[flipped]
        if np.any(pos != pos_f):
            return FunctionalValue(math.inf, True)
        mask = pos & pos_f
        terms = (rho[flipped][mask] - rho[mask]) * (logs[flipped][mask] - logs[mask])
        pieces.extend(terms.tolist())
    value = 0.5 * math.fsum(pieces) / size
    return FunctionalValue(max(value, 0.0), False)


def fisher_torus(nu: Distribution) -> FunctionalValue:
    """I(nu|mu) = sum_x (log nu(x+1) - log nu(x))(nu(x+1) - nu(x)) over Z/NZ."""
    if nu.space.kind != "torus":
        raise ValueError(f"fisher_torus needs a torus space, got {nu.space}")
    w = nu.weights
    w_next = np.roll(w, -1)  # w_next[x] = w[x+1 mod N]
    pos = w > 0
    pos_next = w_next > 0
    if np.any(pos != pos_next):
        return FunctionalValue(math.inf, True)
    mask = pos & pos_next
    logs = np.zeros(w.shape[0])
    np.log(w, out=logs, where=pos)
    logs_next = np.roll(logs, -1)
    terms = (logs_next[mask] - logs[mask]) * (w_next[mask] - w[mask])
    value = math.fsum(terms.tolist())
    return FunctionalValue(max(value, 0.0), False)
