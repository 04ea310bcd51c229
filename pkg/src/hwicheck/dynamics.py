"""Exact Markov semigroup evolution and coupling simulation.

Two clocks are in force and must not be mixed:

* evolve_hypercube re-randomizes each coordinate to uniform at rate 2, so
  every e^{-2t} formula (the Bernoulli mismatch parameter, Fisher decay,
  phi) holds at face value.
* evolve_torus runs the cycle walk at rate 1 per direction (generator
  eigenvalues 2 cos(2 pi k / N) - 2), which makes dH/dt = -I hold for the
  torus Fisher information exactly as defined. The integer-lattice walk of
  simulate_torus_lift instead jumps at total rate 1, the clock on which
  the transition law is e^{-t} I_n(t); callers translating between the two
  evolve for time t/2.

Both evolutions are exact (tensorized kernel / Fourier multiplier); no
time-stepping error enters any downstream inequality check.

Monte Carlo sampling draws per-batch substreams SeedSequence((seed, batch))
with a fixed batch size, so results are reproducible and independent of
execution order. Only the ring count and the final shared bit of each
coordinate affect time-t endpoints, so ring counts are drawn directly as
Poisson counts (the law is identical to accumulating exponential
interarrivals).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .functionals import (
    Distribution,
    FunctionalValue,
    fisher_hypercube,
    fisher_torus,
    relative_entropy,
)
from .state_spaces import StateSpace

_MC_BATCH = 1 << 16


def _renormalized(space: StateSpace, w: np.ndarray) -> Distribution:
    # spectral round-trips can leave residue of a few ulp; clip and rescale
    w = np.maximum(w, 0.0)
    total = w.sum()
    if abs(total - 1.0) > 1e-12:
        raise AssertionError(f"evolution drifted mass by {total - 1.0:.3e}")
    return Distribution(space, w / total)


def evolve_hypercube(nu: Distribution, t: float) -> Distribution:
    """Apply the product kernel K_t = [[1+q, 1-q], [1-q, 1+q]]/2, q = e^{-2t},
    independently to every coordinate."""
    if nu.space.kind != "hypercube":
        raise ValueError(f"evolve_hypercube needs a hypercube space, got {nu.space}")
    if t < 0:
        raise ValueError(f"time must be nonnegative, got {t}")
    half_q = 0.5 * math.exp(-2.0 * t)
    stay = 0.5 + half_q
    cross = 0.5 - half_q
    w = nu.weights.copy()
    idx = np.arange(nu.space.size)
    for i in range(nu.space.n):
        w = stay * w + cross * w[idx ^ (1 << i)]
    return _renormalized(nu.space, w)


def evolve_torus(nu: Distribution, t: float) -> Distribution:
    """Heat flow of Lf(x) = f(x+1) + f(x-1) - 2 f(x) via the Fourier basis."""
    if nu.space.kind != "torus":
        raise ValueError(f"evolve_torus needs a torus space, got {nu.space}")
    if t < 0:
        raise ValueError(f"time must be nonnegative, got {t}")
    n = nu.space.n
    k = np.arange(n // 2 + 1)
    eigenvalues = 2.0 * np.cos(2.0 * np.pi * k / n) - 2.0
    spectrum = np.fft.rfft(nu.weights) * np.exp(t * eigenvalues)
    w = np.fft.irfft(spectrum, n=n)
    return _renormalized(nu.space, w)


def _evolve(nu: Distribution, t: float) -> Distribution:
    if nu.space.kind == "hypercube":
        return evolve_hypercube(nu, t)
    return evolve_torus(nu, t)


def _fisher(nu: Distribution) -> FunctionalValue:
    if nu.space.kind == "hypercube":
        return fisher_hypercube(nu)
    return fisher_torus(nu)


@dataclass(frozen=True)
class FlowTrace:
    """Snapshots of nu_t with entropy and Fisher information per grid time."""

    times: list[float]
    states: list[Distribution] = field(repr=False)
    entropies: list[float]
    fishers: list[float]


def trace(nu: Distribution, time_grid) -> FlowTrace:
    times = [float(t) for t in time_grid]
    if any(t < 0 for t in times) or any(a > b for a, b in zip(times, times[1:])):
        raise ValueError("time_grid must be sorted and nonnegative")
    states = [_evolve(nu, t) for t in times]
    entropies = [relative_entropy(s).value for s in states]
    fishers = [_fisher(s).value for s in states]
    return FlowTrace(times=times, states=states, entropies=entropies, fishers=fishers)


def _adaptive_simpson(f, a, b, fa, fm, fb, whole, tol, depth):
    m = 0.5 * (a + b)
    lm = 0.5 * (a + m)
    rm = 0.5 * (m + b)
    flm = f(lm)
    frm = f(rm)
    left = (m - a) / 6.0 * (fa + 4.0 * flm + fm)
    right = (b - m) / 6.0 * (fm + 4.0 * frm + fb)
    delta = left + right - whole
    if depth <= 0 or abs(delta) <= 15.0 * tol:
        return left + right + delta / 15.0
    return _adaptive_simpson(
        f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1
    ) + _adaptive_simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)


def de_bruijn_residual(nu: Distribution, t: float, rtol: float = 1e-6) -> float:
    """Normalized defect of H(nu_0) - H(nu_t) = integral of I(nu_s) ds.

    Requires full support (otherwise I(nu_0) = +inf and the integrand is
    singular at 0). Returns |Delta H - integral| / max(H(nu_0), 1e-6).
    """
    if t <= 0:
        raise ValueError(f"horizon must be positive, got {t}")
    if np.any(nu.weights == 0.0):
        raise ValueError("de Bruijn quadrature requires a full-support start")

    def integrand(s: float) -> float:
        return _fisher(_evolve(nu, s)).value

    h0 = relative_entropy(nu).value
    ht = relative_entropy(_evolve(nu, t)).value
    fa = integrand(0.0)
    fm = integrand(0.5 * t)
    fb = integrand(t)
    whole = t / 6.0 * (fa + 4.0 * fm + fb)
    tol = rtol * max(abs(h0 - ht), 1e-12)
    integral = _adaptive_simpson(integrand, 0.0, t, fa, fm, fb, whole, tol, 40)
    return abs(h0 - ht - integral) / max(h0, 1e-6)


def _batch_rngs(seed: int, n_samples: int):
    start = 0
    batch = 0
    while start < n_samples:
        size = min(_MC_BATCH, n_samples - start)
        yield np.random.default_rng(np.random.SeedSequence((seed, batch))), size
        start += size
        batch += 1


@dataclass(frozen=True)
class CouplingStats:
    """Aggregates over coupled hypercube pairs at horizon t."""

    t: float
    n_samples: int
    agree_frequency: np.ndarray = field(repr=False)  # per coordinate
    x_marginal: np.ndarray = field(repr=False)
    y_marginal: np.ndarray = field(repr=False)


def simulate_hypercube_coupling(
    space: StateSpace, x0: int, y0: int, t: float, n_samples: int, seed: int
) -> CouplingStats:
    """Couple two walks started at x0 and y0: each coordinate rings at rate 2
    and both chains then set it to one shared uniform bit.

    Initially matched coordinates therefore stay matched, which is asserted
    on every sample; an initially mismatched coordinate agrees at time t iff
    its clock rang, probability 1 - e^{-2t}.
    """
    if space.kind != "hypercube":
        raise ValueError(f"needs a hypercube space, got {space}")
    if not (0 <= x0 < space.size and 0 <= y0 < space.size):
        raise ValueError("start states out of range")
    if t < 0:
        raise ValueError(f"time must be nonnegative, got {t}")
    if n_samples < 1:
        raise ValueError("n_samples must be positive")
    n = space.n
    coords = np.arange(n)
    x_bits0 = (x0 >> coords) & 1
    y_bits0 = (y0 >> coords) & 1
    matched0 = x_bits0 == y_bits0

    agree_counts = np.zeros(n, dtype=np.int64)
    x_counts = np.zeros(space.size, dtype=np.int64)
    y_counts = np.zeros(space.size, dtype=np.int64)
    for rng, size in _batch_rngs(seed, n_samples):
        rings = rng.poisson(2.0 * t, size=(size, n)) > 0
        shared = rng.integers(0, 2, size=(size, n), dtype=np.int64)
        x_bits = np.where(rings, shared, x_bits0)
        y_bits = np.where(rings, shared, y_bits0)
        agree = x_bits == y_bits
        if not np.all(agree[:, matched0]):
            raise AssertionError("coupling broke an initially matched coordinate")
        agree_counts += agree.sum(axis=0)
        x_counts += np.bincount(x_bits @ (1 << coords), minlength=space.size)
        y_counts += np.bincount(y_bits @ (1 << coords), minlength=space.size)
    return CouplingStats(
        t=t,
        n_samples=n_samples,
        agree_frequency=agree_counts / n_samples,
        x_marginal=x_counts / n_samples,
        y_marginal=y_counts / n_samples,
    )


@dataclass(frozen=True)
class LiftStats:
    """Empirical law of the integer-lattice walk endpoint at horizon t."""

    t: float
    n_samples: int
    displacement: int
    displacement_constant: bool
    values: np.ndarray = field(repr=False)  # sorted distinct endpoints
    counts: np.ndarray = field(repr=False)


def simulate_torus_lift(d: int, t: float, n_samples: int, seed: int) -> LiftStats:
    """Simulate the rate-1 walk on Z whose time-t law is e^{-t} I_n(t).

    The coupled partner walk uses identical increments, so the displacement
    d is constant along every path; the returned pmf is the law of the
    endpoint of the walk started at 0.
    """
    if d < 0:
        raise ValueError(f"displacement must be nonnegative, got {d}")
    if t < 0:
        raise ValueError(f"time must be nonnegative, got {t}")
    if n_samples < 1:
        raise ValueError("n_samples must be positive")
    chunks = []
    for rng, size in _batch_rngs(seed, n_samples):
        jumps = rng.poisson(t, size=size)
        ups = rng.binomial(jumps, 0.5)
        chunks.append(2 * ups - jumps)
    endpoints = np.concatenate(chunks)
    values, counts = np.unique(endpoints, return_counts=True)
    return LiftStats(
        t=t,
        n_samples=n_samples,
        displacement=d,
        displacement_constant=True,
        values=values.astype(np.int64),
        counts=counts.astype(np.int64),
    )
