"""Log-space modified Bessel functions and ratio-bound certificates.

Everything is computed as log I_n(t) so that order-200 values at small t
(far below the smallest positive double in linear scale) stay usable.
Two independent evaluation regimes cover the (n, t) plane:

* an ascending series in log space, summed with ``math.fsum`` after
  factoring out the largest term, used for small t relative to the order;
* a backward (Miller-type) three-term recurrence, also carried in log
  space via ``logaddexp`` so no rescaling passes are needed, normalized
  through the identity ``I_0(t) + 2 sum_{n>=1} I_n(t) = e^t``.

The recurrence start order is adapted upward until the table reproduces
itself to 1e-13, and the two regimes are required (by the test suite) to
agree to 1e-11 where both apply.  ``normalization_defect`` re-derives the
e^t identity from the series alone, so it is an honest cross-check of the
regime the recurrence is *not* anchored to.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

__all__ = [
    "BesselEvaluator",
    "FMonotonicityReport",
    "UnimodalSymmetricLaw",
    "binomial_law",
    "check_amos_bound",
    "check_f_monotonicity",
    "check_ratio_bound",
    "check_unimodal_expectation",
    "f_value",
    "h_oddness_residual",
    "log_bessel_i",
    "normalization_defect",
    "point_mass_law",
    "uniform_window_law",
]

# below this t the series is always cheap enough to be the scalar path
_SERIES_T_CAP = 256.0
# series applies when t <= this multiple of (n + 1)
_SERIES_RATIO = 4.0
# table self-agreement required when growing the recurrence start order
_MILLER_TOL = 1e-13


def _require_int(value, name: str) -> int:
    if not isinstance(value, (int, np.integer)) or isinstance(value, bool):
        raise ValueError(f"{name} must be an integer, got {value!r}")
    return int(value)


def _require_time(t) -> float:
    t = float(t)
    if math.isnan(t) or t < 0.0:
        raise ValueError(f"time must be >= 0, got {t}")
    return t


def _log_i_series(n: int, t: float) -> float:
    """Ascending series for log I_n(t), n >= 0, t > 0."""
    log_half_t = math.log(0.5 * t)
    # index of the largest term
    peak = 0.5 * (-(n + 1.0) + math.hypot(n + 1.0, t))
    terms = []
    best = -math.inf
    k = 0
    while True:
        term = (2 * k + n) * log_half_t - math.lgamma(k + 1) - math.lgamma(k + n + 1)
        terms.append(term)
        if term > best:
            best = term
        # past the peak the terms decay monotonically
        if k > peak and term < best - 60.0:
            break
        k += 1
        if k > 10_000_000:  # pragma: no cover
            raise RuntimeError("series failed to terminate")
    return best + math.log(math.fsum(math.exp(v - best) for v in terms))


def _miller_raw(t: float, n_max: int, start: int) -> np.ndarray:
    lp = np.empty(start + 2)
    lp[start + 1] = -math.inf
    lp[start] = 0.0
    for n in range(start, 0, -1):
        lp[n - 1] = np.logaddexp(lp[n + 1], math.log(2.0 * n / t) + lp[n])
    upper = lp[1:]
    m = float(upper.max())
    log_tail = m + math.log(math.fsum(math.exp(v - m) for v in upper))
    # I_0 + 2 sum_{n>=1} I_n = e^t pins the absolute scale
    log_total = float(np.logaddexp(lp[0], math.log(2.0) + log_tail))
    return lp[: n_max + 1] - log_total + t


@lru_cache(maxsize=32)
def _miller_cached(t: float, n_max: int) -> np.ndarray:
    start = max(n_max, int(1.36 * t)) + 40 + int(4.0 * math.sqrt(max(n_max, t) + 1.0))
    prev = _miller_raw(t, n_max, start)
    for _ in range(6):
        start += 64
        cur = _miller_raw(t, n_max, start)
        # log magnitudes reach ~1e3 at high order, so tolerate ulp drift
        # proportionally; 1e-13 in log space is 1e-13 relative in value
        if np.all(np.abs(cur - prev) <= _MILLER_TOL * np.maximum(1.0, np.abs(cur))):
            cur.setflags(write=False)
            return cur
        prev = cur
    raise RuntimeError(f"recurrence start order did not stabilize at t={t}")


def _miller_table(t: float, n_max: int) -> np.ndarray:
    """Table of log I_n(t) for n = 0..n_max (at least), read-only."""
    bucket = 256 * ((n_max + 1 + 255) // 256)
    return _miller_cached(float(t), bucket)


def log_bessel_i(n: int, t: float) -> float:
    """log I_n(t) for integer order n (symmetric in n) and t >= 0."""
    n = abs(_require_int(n, "n"))
    t = _require_time(t)
    if t == 0.0:
        return 0.0 if n == 0 else -math.inf
    if t <= _SERIES_T_CAP and t <= _SERIES_RATIO * (n + 1):
        return _log_i_series(n, t)
    return float(_miller_table(t, n)[n])


def normalization_defect(t: float) -> float:
    """e^{-t} sum_{n in Z} I_n(t) - 1, windowed by a certified tail bound.

    Built from the series regime only, so this is independent of the
    normalization used inside the recurrence table.
    """
    t = _require_time(t)
    if t == 0.0:
        return 0.0
    parts = [math.exp(_log_i_series(0, t) - t)]
    prev = parts[0]
    n = 0
    while True:
        n += 1
        v = math.exp(_log_i_series(n, t) - t)
        parts.append(2.0 * v)
        # I_n decreasing in n: once the ratio r < 1, tail <= v * r / (1 - r)
        r = v / prev if prev > 0 else 0.0
        if v < 1e-16 and r < 0.9 and 2.0 * v * r / (1.0 - r) < 1e-13:
            break
        prev = v
        if n > 10_000_000:  # pragma: no cover
            raise RuntimeError("tail bound never certified")
    return math.fsum(parts) - 1.0


@dataclass(frozen=True)
class BesselEvaluator:
    """Read-only table of log I_n(t) for n = 0..max_order at a fixed t."""

    max_order: int
    t: float
    _table: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        max_order = _require_int(self.max_order, "max_order")
        if max_order < 0:
            raise ValueError(f"max_order must be >= 0, got {max_order}")
        t = _require_time(self.t)
        object.__setattr__(self, "max_order", max_order)
        object.__setattr__(self, "t", t)
        if t == 0.0:
            table = np.full(max_order + 1, -math.inf)
            table[0] = 0.0
            table.setflags(write=False)
        else:
            table = _miller_table(t, max_order)
        object.__setattr__(self, "_table", table)

    def log_i(self, n: int) -> float:
        n = abs(_require_int(n, "n"))
        if n > self.max_order:
            raise ValueError(f"order {n} beyond table limit {self.max_order}")
        return float(self._table[n])


def _log_i(n: int, t: float, evaluator: BesselEvaluator | None) -> float:
    if evaluator is None:
        return log_bessel_i(n, t)
    if evaluator.t != t:
        raise ValueError(f"evaluator built at t={evaluator.t}, asked for t={t}")
    return evaluator.log_i(n)


def check_ratio_bound(
    n: int, d: int, t: float, evaluator: BesselEvaluator | None = None
) -> float:
    """Margin of log(I_n/I_{|n-d|}) >= (1+d)(d-2n)/(2t) for n >= d/2 >= 0.

    Returns lhs - rhs; nonnegative iff the bound holds.  At n = d/2 both
    sides are exactly zero.  At d = 0 the margin is n/t (the right side is
    -n/t while the log-ratio vanishes).
    """
    n = _require_int(n, "n")
    d = _require_int(d, "d")
    if d < 0:
        raise ValueError(f"d must be >= 0, got {d}")
    if 2 * n < d:
        raise ValueError(f"need n >= d/2, got n={n}, d={d}")
    t = _require_time(t)
    if t == 0.0:
        raise ValueError("need t > 0")
    lhs = _log_i(n, t, evaluator) - _log_i(abs(n - d), t, evaluator)
    rhs = (1 + d) * (d - 2 * n) / (2.0 * t)
    return lhs - rhs


def check_amos_bound(
    n: int, t: float, evaluator: BesselEvaluator | None = None
) -> float:
    """Margin of I_{n+1}/I_n >= sqrt(1 + ((n+1)/t)^2) - (n+1)/t, n >= 0.

    log(sqrt(1+s^2) - s) = -asinh(s), so the margin is evaluated without
    the cancellation the raw display would suffer at large s.
    """
    n = _require_int(n, "n")
    if n < 0:
        raise ValueError(f"n must be >= 0, got {n}")
    t = _require_time(t)
    if t == 0.0:
        raise ValueError("need t > 0")
    s = (n + 1) / t
    return _log_i(n + 1, t, evaluator) - _log_i(n, t, evaluator) + math.asinh(s)


def h_oddness_residual(d: int, t: float, k_max: int = 50) -> float:
    """max_k |h(d/2 + k) + h(d/2 - k)| for h(n) = rhs(n) - log(I_n/I_{n-d}).

    Orders are read through |.| so the reflection n -> d - n is the
    identity on the table; requires even d so the symmetry point is a
    lattice site.
    """
    d = _require_int(d, "d")
    if d < 2 or d % 2 != 0:
        raise ValueError(f"need even d >= 2, got {d}")
    t = _require_time(t)
    if t == 0.0:
        raise ValueError("need t > 0")
    k_max = _require_int(k_max, "k_max")

    def h(n: int) -> float:
        ratio = log_bessel_i(abs(n), t) - log_bessel_i(abs(n - d), t)
        return (1 + d) * (d - 2 * n) / (2.0 * t) - ratio

    half = d // 2
    return max(abs(h(half + k) + h(half - k)) for k in range(k_max + 1))


def f_value(t: float, x: float) -> float:
    """f(t, x) = log(sqrt(1+s^2) - s) - (x(x+1) - (x+1)(x+2)) / (2t).

    s = (x+1)/t.  The x^2/c(x) terms are used in the algebraically
    simplified form x(x+1)/2; the log factor is evaluated as -asinh(s).
    """
    t = _require_time(t)
    if t == 0.0:
        raise ValueError("need t > 0")
    x = float(x)
    # the simplified x(x+1)/2 form extends past 0; s stays positive
    if x <= -1.0:
        raise ValueError(f"x must be > -1, got {x}")
    s = (x + 1.0) / t
    bracket = (x * (x + 1.0)) / (2.0 * t) - ((x + 1.0) * (x + 2.0)) / (2.0 * t)
    return -math.asinh(s) - bracket


@dataclass(frozen=True)
class FMonotonicityReport:
    """Grid findings for f: derivative violations, extremes, t->inf limit."""

    dx_violations: list
    dt_violations: list
    min_f: float
    f_limit: float

    @property
    def passed(self) -> bool:
        return (
            not self.dx_violations
            and not self.dt_violations
            and self.min_f >= -1e-8
            and abs(self.f_limit) <= 1e-5
        )


def _central_difference(fun, z: float) -> float:
    h = 1e-5 * max(1.0, abs(z))
    d = (fun(z + h) - fun(z - h)) / (2.0 * h)
    h /= 8.0
    d_fine = (fun(z + h) - fun(z - h)) / (2.0 * h)
    # keep the coarse value only if refining stopped changing it
    return d if abs(d - d_fine) <= 1e-12 * max(1.0, abs(d_fine)) else d_fine

def check_f_monotonicity(t_grid, x_grid) -> FMonotonicityReport:
    """Certify f is nondecreasing in x, nonincreasing in t at x=0, and >= 0.

    Central differences with step refinement; a point is a violation only
    if the refined estimate still crosses the 1e-8 tolerance.
    """
    t_grid = np.asarray(t_grid, dtype=np.float64)
    x_grid = np.asarray(x_grid, dtype=np.float64)
    if t_grid.size == 0 or np.any(t_grid <= 0.0):
        raise ValueError("t grid must be positive and nonempty")
    if np.any(x_grid < 0.0):
        raise ValueError("x grid must be nonnegative")
    dx_violations = []
    dt_violations = []
    values = []
    for t in t_grid.tolist():
        values.append(f_value(t, 0.0))
        d_t = _central_difference(lambda s: f_value(s, 0.0), t)
        if d_t > 1e-8:
            dt_violations.append((t, 0.0, d_t))
        for x in x_grid.tolist():
            values.append(f_value(t, x))
            d_x = _central_difference(lambda z: f_value(t, z), x)
            if d_x < -1e-8:
                dx_violations.append((t, x, d_x))
    return FMonotonicityReport(
        dx_violations=dx_violations,
        dt_violations=dt_violations,
        min_f=min(values),
        f_limit=f_value(1e6, 0.0),
    )


@dataclass(frozen=True)
class UnimodalSymmetricLaw:
    """Law on a consecutive integer window, symmetric about 0, unimodal.

    Support must be -K..K; the pmf must satisfy p(m) = p(-m), be
    non-increasing in |m|, and sum to 1 within 1e-12.  Only finite
    supports are accepted, so no truncation bookkeeping is needed.
    """

    support: np.ndarray
    probabilities: np.ndarray

    def __post_init__(self):
        support = np.asarray(self.support, dtype=np.int64)
        probs = np.asarray(self.probabilities, dtype=np.float64)
        if support.ndim != 1 or probs.shape != support.shape:
            raise ValueError("support and probabilities must be matching 1-D arrays")
        k = (support.size - 1) // 2
        if not np.array_equal(support, np.arange(-k, k + 1)):
            raise ValueError("support must be a consecutive window -K..K")
        if np.any(probs < 0.0):
            raise ValueError("probabilities must be nonnegative")
        if np.max(np.abs(probs - probs[::-1]), initial=0.0) > 1e-15:
            raise ValueError("pmf must be symmetric about 0")
        upper = probs[k:]
        if np.max(np.diff(upper), initial=0.0) > 1e-15:
            raise ValueError("pmf must be non-increasing in |m|")
        if abs(math.fsum(probs.tolist()) - 1.0) > 1e-12:
            raise ValueError("pmf must sum to 1 within 1e-12")
        probs = probs.copy()
        probs.setflags(write=False)
        support = support.copy()
        support.setflags(write=False)
        object.__setattr__(self, "support", support)
        object.__setattr__(self, "probabilities", probs)


def point_mass_law() -> UnimodalSymmetricLaw:
    """The law concentrated at 0."""
    return UnimodalSymmetricLaw(np.array([0]), np.array([1.0]))


def uniform_window_law(k: int) -> UnimodalSymmetricLaw:
    """Uniform law on -k..k."""
    k = _require_int(k, "k")
    if k < 0:
        raise ValueError(f"k must be >= 0, got {k}")
    width = 2 * k + 1
    return UnimodalSymmetricLaw(np.arange(-k, k + 1), np.full(width, 1.0 / width))


def binomial_law(k: int) -> UnimodalSymmetricLaw:
    """Centered binomial: Binomial(2k, 1/2) - k, computed in log space."""
    k = _require_int(k, "k")
    if k < 0:
        raise ValueError(f"k must be >= 0, got {k}")
    ms = np.arange(-k, k + 1)
    log_norm = math.lgamma(2 * k + 1) - 2 * k * math.log(2.0)
    probs = np.array(
        [
            math.exp(log_norm - math.lgamma(k + m + 1) - math.lgamma(k - m + 1))
            for m in ms.tolist()
        ]
    )
    return UnimodalSymmetricLaw(ms, probs)


def check_unimodal_expectation(
    law: UnimodalSymmetricLaw, d: int, t: float
) -> float:
    """Margin of (d + d^2)/(2t) >= E[log(I_{|M|}/I_{|M-d|})] for unimodal M.

    Returns rhs - lhs; nonnegative iff the bound holds.
    """
    if not isinstance(law, UnimodalSymmetricLaw):
        raise ValueError("law must be a UnimodalSymmetricLaw")
    d = _require_int(d, "d")
    if d < 1:
        raise ValueError(f"d must be >= 1, got {d}")
    t = _require_time(t)
    if t == 0.0:
        raise ValueError("need t > 0")
    ms = law.support.tolist()
    top = max(max(abs(m) for m in ms), max(abs(m - d) for m in ms))
    ev = BesselEvaluator(max_order=top, t=t)
    expectation = math.fsum(
        p * (ev.log_i(abs(m)) - ev.log_i(abs(m - d)))
        for m, p in zip(ms, law.probabilities.tolist())
        if p > 0.0
    )
    return (d + d * d) / (2.0 * t) - expectation
