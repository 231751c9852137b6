"""Covariance algebra and confidence machinery for multinomial averages.

For a multinomial marginal p on d outcomes, the covariance of the indicator
vector of the first d-1 outcomes is

    Sigma(p)_kk = p_k (1 - p_k),      Sigma(p)_kl = -p_k p_l   (k != l).

For an independent, possibly non-identical DGP, the scaled covariance of the
empirical distribution over the first d-1 outcomes is the average
Sigma_bar = (1/N) sum_i Sigma(P_i), while an i.i.d. model at the average
marginal p_bar has Sigma_hat = Sigma(p_bar).  Their difference is a Gram
matrix,

    N (Sigma_hat - Sigma_bar)_kl = sum_i (P_i,k - p_bar_k)(P_i,l - p_bar_l),

hence positive semidefinite: the i.i.d.-at-the-average model is always the
more dispersed one, which is what makes i.i.d. confidence ellipsoids valid
(conservative) under heterogeneity.

Quantiles are computed from first principles: the chi-square quantile inverts
the regularized incomplete gamma function (series / continued fraction) by
bisection, and the normal quantile inverts math.erf by bisection, both to
1e-10.  scipy equivalents are used only as independent oracles in the tests.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dgp import IndependentDgp, SUPPORT_FLOOR, average_sample_marginals
from .errors import InvalidDistributionError, SingularCovarianceError

QUANTILE_TOL = 1e-10
PSD_TOL = 1e-10
# Guard for dense matrix work; d above this is outside the supported regime.
MAX_MATRIX_DIM = 16


# ======================================================================
# Regularized incomplete gamma and quantiles
# ======================================================================

def _gamma_p_series(a: float, x: float) -> float:
    # P(a, x) by the standard power series, good for x < a + 1.
    term = 1.0 / a
    total = term
    k = a
    for _ in range(500):
        k += 1.0
        term *= x / k
        total += term
        if abs(term) < abs(total) * 1e-16:
            break
    return total * math.exp(-x + a * math.log(x) - math.lgamma(a))

def _gamma_q_contfrac(a: float, x: float) -> float:
    # Q(a, x) = 1 - P(a, x) by Lentz's continued fraction, good for x >= a + 1.
    tiny = 1e-300
    b = x + 1.0 - a
    c = 1.0 / tiny
    d = 1.0 / b
    h = d
    for i in range(1, 500):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < tiny:
            d = tiny
        c = b + an / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < 1e-16:
            break
    return h * math.exp(-x + a * math.log(x) - math.lgamma(a))

def regularized_gamma_p(a: float, x: float) -> float:
    """P(a, x) = gamma(a, x) / Gamma(a), the lower regularized incomplete gamma."""
    if a <= 0.0:
        raise InvalidDistributionError("gamma shape must be positive")
    if x < 0.0:
        raise InvalidDistributionError("gamma argument must be nonnegative")
    if x == 0.0:
        return 0.0
    if x < a + 1.0:
        return _gamma_p_series(a, x)
    return 1.0 - _gamma_q_contfrac(a, x)


def chi_square_cdf(x: float, df: int) -> float:
    if df < 1:
        raise InvalidDistributionError("degrees of freedom must be >= 1")
    if x <= 0.0:
        return 0.0
    return regularized_gamma_p(df / 2.0, x / 2.0)


def chi_square_quantile(df: int, alpha: float) -> float:
    """Upper-tail quantile: the q with P(X > q) = alpha for X ~ chi2(df).

    Solved by bisection on the cdf to within QUANTILE_TOL.
    """
    if not 0.0 < alpha < 1.0:
        raise InvalidDistributionError("alpha must be in (0, 1)")
    target = 1.0 - alpha
    lo, hi = 0.0, 1.0
    while chi_square_cdf(hi, df) < target:
        hi *= 2.0
        if hi > 1e8:
            raise InvalidDistributionError("quantile bracket failed to close")
    while hi - lo > QUANTILE_TOL:
        mid = 0.5 * (lo + hi)
        if chi_square_cdf(mid, df) < target:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def normal_cdf(z: float) -> float:
    return 0.5 * (1.0 + math.erf(z / math.sqrt(2.0)))


def normal_upper_quantile(p: float) -> float:
    """The z with P(Z > z) = p for standard normal Z, by bisection on erf."""
    if not 0.0 < p < 1.0:
        raise InvalidDistributionError("tail probability must be in (0, 1)")
    target = 1.0 - p
    lo, hi = -40.0, 40.0
    while hi - lo > QUANTILE_TOL:
        mid = 0.5 * (lo + hi)
        if normal_cdf(mid) < target:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


# ======================================================================
# Multinomial covariance algebra
# ======================================================================

def _check_dim(d: int) -> None:
    if d > MAX_MATRIX_DIM:
        raise InvalidDistributionError(
            f"matrix work is capped at d <= {MAX_MATRIX_DIM} outcomes (got d={d})")


def multinomial_covariance(p: np.ndarray) -> np.ndarray:
    """Covariance of the first d-1 outcome indicators for one draw from p.

    p is the full d-vector; the returned matrix is (d-1) x (d-1).
    """
    p = np.asarray(p, dtype=float)
    d = p.shape[0]
    if d < 2:
        raise InvalidDistributionError("need at least 2 outcomes")
    _check_dim(d)
    q = p[:-1]
    cov = -np.outer(q, q)
    cov[np.diag_indices(d - 1)] = q * (1.0 - q)
    return cov


def average_covariance(dgp: IndependentDgp, n: int) -> np.ndarray:
    """Sigma_bar_N = (1/n) sum_{i<=n} Sigma(P_i), shape (d-1, d-1)."""
    if n < 1:
        raise InvalidDistributionError("need n >= 1 experiments")
    _check_dim(dgp.space.d)
    mat = dgp.marginals_matrix(n)[:, :-1]
    # mean of (diag(q) - q q^T) over rows
    mean_q = mat.mean(axis=0)
    second = mat.T @ mat / n
    cov = np.diag(mean_q) - second
    return cov


def iid_average_covariance(dgp: IndependentDgp, n: int) -> np.ndarray:
    """Sigma_hat_N = Sigma(p_bar_N): covariance under i.i.d. at the average."""
    return multinomial_covariance(average_sample_marginals(dgp, n))


def gram_difference(dgp: IndependentDgp, n: int) -> np.ndarray:
    """Sigma_hat_N - Sigma_bar_N; a Gram matrix / n, hence PSD."""
    return iid_average_covariance(dgp, n) - average_covariance(dgp, n)


def psd_check(mat: np.ndarray, tol: float = PSD_TOL) -> bool:
    """Symmetric within tol and minimum eigenvalue >= -tol."""
    mat = np.asarray(mat, dtype=float)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise InvalidDistributionError("psd_check needs a square matrix")
    _check_dim(mat.shape[0] + 1)
    if not np.all(np.abs(mat - mat.T) <= tol):
        return False
    eigs = np.linalg.eigvalsh(0.5 * (mat + mat.T))
    return bool(eigs.min() >= -tol)


def min_eigenvalue(mat: np.ndarray) -> float:
    mat = np.asarray(mat, dtype=float)
    return float(np.linalg.eigvalsh(0.5 * (mat + mat.T)).min())


# ======================================================================
# Acceptance regions and tests
# ======================================================================

@dataclass(frozen=True, eq=False)
class EllipsoidRegion:
    """Region {x : (x - center)^T shape^{-1} (x - center) <= threshold}.

    For the i.i.d. acceptance region of a candidate average p_bar at sample
    size N and level alpha, center = p_bar[:-1], shape = Sigma(p_bar) and
    threshold = chi2_{d-1}(alpha) / N.
    """

    center: np.ndarray
    shape: np.ndarray
    threshold: float

    def __post_init__(self) -> None:
        center = np.asarray(self.center, dtype=float).copy()
        shape = np.asarray(self.shape, dtype=float).copy()
        if shape.shape != (center.size, center.size):
            raise InvalidDistributionError("shape matrix does not match center")
        _check_dim(center.size + 1)
        try:
            chol = np.linalg.cholesky(shape)
        except np.linalg.LinAlgError as exc:
            raise SingularCovarianceError(
                "shape matrix is not positive definite") from exc
        center.setflags(write=False)
        shape.setflags(write=False)
        object.__setattr__(self, "center", center)
        object.__setattr__(self, "shape", shape)
        object.__setattr__(self, "_chol", chol)

    def mahalanobis_sq(self, x: np.ndarray) -> float:
        """(x - center)^T shape^{-1} (x - center) via the Cholesky factor."""
        diff = np.asarray(x, dtype=float) - self.center
        y = np.linalg.solve(self._chol, diff)  # type: ignore[attr-defined]
        return float(y @ y)

    def contains(self, x: np.ndarray) -> bool:
        return self.mahalanobis_sq(x) <= self.threshold


def iid_acceptance_region(pbar: np.ndarray, n: int, alpha: float,
                          eta: float = SUPPORT_FLOOR) -> EllipsoidRegion:
    """Chi-square acceptance region for the empirical distribution under an
    i.i.d. model at marginal pbar (full d-vector, floored before inversion)."""
    pbar = np.asarray(pbar, dtype=float)
    d = pbar.shape[0]
    if n < 1:
        raise InvalidDistributionError("need n >= 1")
    floored = (1.0 - d * eta) * pbar + eta
    return EllipsoidRegion(
        center=floored[:-1],
        shape=multinomial_covariance(floored),
        threshold=chi_square_quantile(d - 1, alpha) / n,
    )


def test_statistic(phi: np.ndarray, pbar: np.ndarray, n: int,
                   eta: float = SUPPORT_FLOOR) -> float:
    """N (phi - pbar)^T Sigma(pbar)^{-1} (phi - pbar) on the first d-1 coords."""
    region = iid_acceptance_region(pbar, n, 0.5, eta)  # alpha irrelevant here
    return n * region.mahalanobis_sq(np.asarray(phi, dtype=float)[:-1])


def acceptance_test(phi: np.ndarray, pbar: np.ndarray, n: int, alpha: float,
                    eta: float = SUPPORT_FLOOR) -> bool:
    """True iff the observed frequencies phi fall inside the i.i.d. chi-square
    acceptance region of the candidate average pbar."""
    region = iid_acceptance_region(pbar, n, alpha, eta)
    return region.contains(np.asarray(phi, dtype=float)[:-1])


def score_interval(phi1: float, n: int, z: float) -> tuple[float, float]:
    """Closed-form solution of {p : n (phi1 - p)^2 <= z^2 p (1 - p)}.

    Returns the Wilson-style interval with center (n phi1 + z^2/2)/(n + z^2)
    and half-width z sqrt(n) / (n + z^2) * sqrt(phi1 (1-phi1) + z^2 / (4n)),
    clamped to [0, 1].
    """
    if n < 1:
        raise InvalidDistributionError("need n >= 1")
    if not 0.0 <= phi1 <= 1.0:
        raise InvalidDistributionError("frequency must lie in [0, 1]")
    z2 = z * z
    center = (n * phi1 + z2 / 2.0) / (n + z2)
    half = z * math.sqrt(n) / (n + z2) * math.sqrt(phi1 * (1.0 - phi1) + z2 / (4.0 * n))
    return (max(0.0, center - half), min(1.0, center + half))


def wilson_interval(phi1: float, n: int, alpha: float) -> tuple[float, float]:
    """Wilson score interval at confidence level 1 - alpha for a binary
    success probability given observed frequency phi1 of n draws."""
    return score_interval(phi1, n, normal_upper_quantile(alpha / 2.0))


def bonferroni_accept(phi: np.ndarray, pbar: np.ndarray, n: int,
                      alpha: float) -> bool:
    """Accept iff each of the first d-1 components of pbar lies in the
    per-outcome score interval around phi at level 1 - alpha/(d-1).

    Coincides with the chi-square test's Wilson inversion when d = 2.
    """
    phi = np.asarray(phi, dtype=float)
    pbar = np.asarray(pbar, dtype=float)
    d = phi.shape[0]
    _check_dim(d)
    z = normal_upper_quantile(alpha / (2.0 * (d - 1)))
    for j in range(d - 1):
        lo, hi = score_interval(float(phi[j]), n, z)
        if not lo <= pbar[j] <= hi:
            return False
    return True


def bonferroni_pbar_box(phi: np.ndarray, n: int,
                        alpha: float) -> tuple[np.ndarray, np.ndarray]:
    """Componentwise box of averages accepted by :func:`bonferroni_accept`.

    Exact for the first d-1 components; the last component's bounds are the
    simplex complement of the others.
    """
    phi = np.asarray(phi, dtype=float)
    d = phi.shape[0]
    z = normal_upper_quantile(alpha / (2.0 * (d - 1)))
    lo = np.empty(d)
    hi = np.empty(d)
    for j in range(d - 1):
        lo[j], hi[j] = score_interval(float(phi[j]), n, z)
    lo[d - 1] = max(0.0, 1.0 - hi[:-1].sum())
    hi[d - 1] = min(1.0, 1.0 - lo[:-1].sum())
    return lo, hi


def ellipsoid_pbar_box(phi: np.ndarray, n: int,
                       alpha: float) -> tuple[np.ndarray, np.ndarray]:
    """Outer componentwise box for the averages accepted by
    :func:`acceptance_test` (exactly the Wilson interval when d = 2).

    For d > 2 this projects the acceptance set on each axis using
    x_j^2 <= Sigma_jj x^T Sigma^{-1} x, i.e. per-component score intervals
    with z = sqrt(chi2_{d-1}(alpha)); a superset of the true region.
    """
    phi = np.asarray(phi, dtype=float)
    d = phi.shape[0]
    z = math.sqrt(chi_square_quantile(d - 1, alpha))
    lo = np.empty(d)
    hi = np.empty(d)
    for j in range(d - 1):
        lo[j], hi[j] = score_interval(float(phi[j]), n, z)
    lo[d - 1] = max(0.0, 1.0 - hi[:-1].sum())
    hi[d - 1] = min(1.0, 1.0 - lo[:-1].sum())
    return lo, hi


def cov_to_json(mat: np.ndarray) -> list[list[float]]:
    """Row-major nested-list serialization used by golden-file tests."""
    return np.asarray(mat, dtype=float).tolist()


def cov_from_json(obj: list[list[float]]) -> np.ndarray:
    return np.asarray(obj, dtype=float)
