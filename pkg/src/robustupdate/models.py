"""Two applied models with closed-form updated sets.

Bernoulli nuisance model: each experiment produces outcome 1 with probability
(1 - delta) * theta + delta * psi_i, where theta is the persistent state of
interest and psi_i in [0, 1] is an arbitrary per-experiment nuisance weight.
The asymptotic and finite-sample state/prediction intervals all have closed
forms; the finite-sample versions run through the Wilson interval.

Gaussian signals: x_i ~ Normal(theta, sigma_i^2) with per-experiment sigma_i
known only to lie in [sigma_lo, sigma_hi].  The sample mean is sufficient, and
averaging-then-updating on it keeps the states within epsilon of the mean.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .dgp import (
    BoxFamily,
    OutcomeSpace,
    SampleData,
    SeedLike,
    UnionFamily,
    _rng_from,
    binary_space,
    empirical_distribution,
)
from .errors import EmptySampleError, InvalidDistributionError
from .stats import wilson_interval

INTERVAL_SLACK = 1e-12


@dataclass(frozen=True)
class Interval:
    """A real interval, optionally open at both ends.

    ``contains`` is the numeric test (closed endpoints, 1e-12 slack);
    ``strict_contains`` honors ``open_ends`` exactly.
    """

    lo: float
    hi: float
    open_ends: bool = False

    def __post_init__(self) -> None:
        if not (math.isfinite(self.lo) and math.isfinite(self.hi)):
            raise InvalidDistributionError("interval endpoints must be finite")
        if self.lo > self.hi:
            raise InvalidDistributionError(f"empty interval [{self.lo}, {self.hi}]")

    @property
    def width(self) -> float:
        return self.hi - self.lo

    @property
    def midpoint(self) -> float:
        return 0.5 * (self.lo + self.hi)

    def contains(self, x: float, slack: float = INTERVAL_SLACK) -> bool:
        return self.lo - slack <= x <= self.hi + slack

    def strict_contains(self, x: float) -> bool:
        if self.open_ends:
            return self.lo < x < self.hi
        return self.lo <= x <= self.hi

    def subset_of(self, other: "Interval", slack: float = INTERVAL_SLACK) -> bool:
        return other.lo - slack <= self.lo and self.hi <= other.hi + slack

    def as_tuple(self) -> tuple[float, float]:
        return (self.lo, self.hi)


# ======================================================================
# Bernoulli nuisance model
# ======================================================================

def _check_unit(x: float, name: str) -> float:
    x = float(x)
    if not 0.0 <= x <= 1.0:
        raise InvalidDistributionError(f"{name}={x} must lie in [0, 1]")
    return x


def bern_marginal(theta: float, delta: float, psi: float) -> float:
    """Probability of outcome 1: (1 - delta) theta + delta psi."""
    theta = _check_unit(theta, "theta")
    delta = _check_unit(delta, "delta")
    psi = _check_unit(psi, "psi")
    return (1.0 - delta) * theta + delta * psi


def bern_theta_asymptotic(phi1: float, delta: float) -> Interval:
    """States compatible with a limiting frequency phi1 of outcome 1.

    [max{(phi1 - delta)/(1 - delta), 0}, min{phi1/(1 - delta), 1}]; with
    delta = 1 the nuisance part swamps the state entirely and every theta
    in [0, 1] is compatible.
    """
    phi1 = _check_unit(phi1, "phi1")
    delta = _check_unit(delta, "delta")
    if delta == 1.0:
        return Interval(0.0, 1.0)
    lo = max((phi1 - delta) / (1.0 - delta), 0.0)
    hi = min(phi1 / (1.0 - delta), 1.0)
    return Interval(lo, hi)


def bern_prediction_asymptotic(phi1: float, delta: float) -> Interval:
    """Next-experiment probabilities of 1 compatible with frequency phi1:
    the delta-fattening [max{phi1 - delta, 0}, min{phi1 + delta, 1}]."""
    phi1 = _check_unit(phi1, "phi1")
    delta = _check_unit(delta, "delta")
    return Interval(max(phi1 - delta, 0.0), min(phi1 + delta, 1.0))


def bern_prediction_ml(phi1: float, delta: float) -> Interval:
    """Next-experiment probabilities kept by likelihood maximization:
    [max{phi1 - (1 - phi1) delta, 0}, min{phi1 + phi1 delta, 1}].

    Always a subinterval of :func:`bern_prediction_asymptotic`; in
    particular it misses the true next marginal phi1 - delta arising from
    theta = (phi1 - delta)/(1 - delta) with psi_{N+1} = 0.
    """
    phi1 = _check_unit(phi1, "phi1")
    delta = _check_unit(delta, "delta")
    lo = max(phi1 - (1.0 - phi1) * delta, 0.0)
    hi = min(phi1 + phi1 * delta, 1.0)
    return Interval(lo, hi)


def _phi1_of(data: SampleData) -> tuple[float, int]:
    if len(data) == 0:
        raise EmptySampleError("empty sample")
    if data.space.d != 2:
        raise InvalidDistributionError("the nuisance model is binary")
    return float(empirical_distribution(data)[0]), len(data)


def bern_theta_finite(data: SampleData, delta: float, alpha: float) -> Interval:
    """Finite-sample state interval: Wilson endpoints (W_lo, W_hi) at level
    1 - alpha, then [max{(W_lo - delta)/(1 - delta), 0}, min{W_hi/(1 - delta), 1}]."""
    phi1, n = _phi1_of(data)
    delta = _check_unit(delta, "delta")
    w_lo, w_hi = wilson_interval(phi1, n, alpha)
    if delta == 1.0:
        return Interval(0.0, 1.0)
    return Interval(max((w_lo - delta) / (1.0 - delta), 0.0),
                    min(w_hi / (1.0 - delta), 1.0))


def bern_prediction_finite(data: SampleData, delta: float, alpha: float) -> Interval:
    """Finite-sample prediction interval: the delta-fattening of the Wilson
    interval, [max{W_lo - delta, 0}, min{W_hi + delta, 1}]."""
    phi1, n = _phi1_of(data)
    delta = _check_unit(delta, "delta")
    w_lo, w_hi = wilson_interval(phi1, n, alpha)
    return Interval(max(w_lo - delta, 0.0), min(w_hi + delta, 1.0))


@dataclass(frozen=True)
class BernoulliNuisanceModel:
    """Convenience wrapper fixing the contamination weight delta."""

    delta: float
    theta_grid: tuple[float, ...] | None = None

    def __post_init__(self) -> None:
        _check_unit(self.delta, "delta")
        if self.theta_grid is not None:
            grid = tuple(_check_unit(t, "theta") for t in self.theta_grid)
            object.__setattr__(self, "theta_grid", grid)

    def marginal(self, theta: float, psi: float) -> float:
        return bern_marginal(theta, self.delta, psi)

    def theta_asymptotic(self, phi1: float) -> Interval:
        return bern_theta_asymptotic(phi1, self.delta)

    def prediction_asymptotic(self, phi1: float) -> Interval:
        return bern_prediction_asymptotic(phi1, self.delta)

    def prediction_ml(self, phi1: float) -> Interval:
        return bern_prediction_ml(phi1, self.delta)

    def theta_finite(self, data: SampleData, alpha: float) -> Interval:
        return bern_theta_finite(data, self.delta, alpha)

    def prediction_finite(self, data: SampleData, alpha: float) -> Interval:
        return bern_prediction_finite(data, self.delta, alpha)

    def state_family(self, theta: float,
                     space: OutcomeSpace | None = None) -> BoxFamily:
        """All DGPs for a fixed state: per-experiment probability of 1 in
        [(1 - delta) theta, (1 - delta) theta + delta]."""
        space = space if space is not None else binary_space()
        lo = (1.0 - self.delta) * _check_unit(theta, "theta")
        hi = lo + self.delta
        return BoxFamily(space, (np.array([[lo, hi], [1.0 - hi, 1.0 - lo]]),))

    def grid_family(self, space: OutcomeSpace | None = None) -> UnionFamily:
        """Union of the per-theta families over the configured grid."""
        if self.theta_grid is None:
            raise InvalidDistributionError("no theta_grid configured")
        space = space if space is not None else binary_space()
        return UnionFamily(space, tuple(self.state_family(t, space)
                                        for t in self.theta_grid))


# ======================================================================
# Gaussian signals
# ======================================================================

def gauss_sample(theta: float, sigmas: Sequence[float], n: int,
                 seed: SeedLike) -> np.ndarray:
    """n independent draws x_i ~ Normal(theta, sigma_i^2), the sigma list
    cycled; deterministic in the seed."""
    sigmas = np.asarray(sigmas, dtype=float)
    if sigmas.ndim != 1 or sigmas.size == 0:
        raise InvalidDistributionError("sigmas must be a nonempty 1-d sequence")
    if np.any(sigmas <= 0.0):
        raise InvalidDistributionError("sigmas must be positive")
    if n < 0:
        raise InvalidDistributionError("sample size must be >= 0")
    rng = _rng_from(seed)
    scale = sigmas[np.arange(n) % sigmas.size]
    return theta + scale * rng.standard_normal(n)


def gauss_atu_states(sample_mean: float, n: int, epsilon: float) -> Interval:
    """States within epsilon of the sample mean (open interval)."""
    if epsilon <= 0.0:
        raise InvalidDistributionError("epsilon must be positive")
    if n < 1:
        raise InvalidDistributionError("need n >= 1")
    return Interval(sample_mean - epsilon, sample_mean + epsilon, open_ends=True)


@dataclass(frozen=True)
class GaussianSignalsModel:
    """Gaussian location model with per-experiment variance ambiguity."""

    sigma_lo: float
    sigma_hi: float
    epsilon: float

    def __post_init__(self) -> None:
        if not 0.0 < self.sigma_lo <= self.sigma_hi:
            raise InvalidDistributionError("need 0 < sigma_lo <= sigma_hi")
        if self.epsilon <= 0.0:
            raise InvalidDistributionError("epsilon must be positive")

    def check_sigmas(self, sigmas: Sequence[float]) -> np.ndarray:
        arr = np.asarray(sigmas, dtype=float)
        if np.any(arr < self.sigma_lo) or np.any(arr > self.sigma_hi):
            raise InvalidDistributionError(
                f"sigmas must lie in [{self.sigma_lo}, {self.sigma_hi}]")
        return arr

    def sample(self, theta: float, sigmas: Sequence[float], n: int,
               seed: SeedLike) -> np.ndarray:
        return gauss_sample(theta, self.check_sigmas(sigmas), n, seed)

    def states(self, sample_mean: float, n: int) -> Interval:
        return gauss_atu_states(sample_mean, n, self.epsilon)
