"""Updating rules for families of independent DGPs.

Each rule maps (family, sample) to a subfamily of the input (never a larger
set), so the data-free and data-driven decisions are comparable:

* :func:`average_then_update` keeps the DGPs whose average sample marginal is
  within sup-norm epsilon of the observed frequencies;
* :func:`max_likelihood_update` keeps the likelihood maximizers;
* :func:`robust_iid_update` keeps the DGPs whose average passes the i.i.d.
  chi-square acceptance test at the observed frequencies, and
  :func:`bonferroni_update` is its per-outcome interval variant;
* :func:`full_bayesian_update` keeps everything (decisions then ride on the
  incumbent tie-break);
* :func:`bayesian_posterior` returns posterior weights over a finite support
  enumeration instead of a subfamily.

Explicit sets are filtered member by member (exact).  Box and vertex branches
record the acceptance predicate as a constraint and are dropped only when no
achievable average can satisfy it; for d > 2 (and for vertex branches) the
survival test intersects componentwise interval projections, which is an
outer approximation: surviving branches are then flagged ``survived_outer``
and decisions made from them are conservative.  Membership queries always
evaluate the exact predicate.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, replace

import numpy as np

from .dgp import (
    BoxFamily,
    DgpFamily,
    ExplicitSet,
    IndependentDgp,
    Marginal,
    SampleData,
    SUPPORT_FLOOR,
    UnionFamily,
    VertexFamily,
    average_sample_marginals,
    box_attainable_bounds,
    empirical_distribution,
    floored_log_likelihood,
)
from .errors import EmptySampleError, InvalidDistributionError, ZeroEvidenceError
from .stats import (
    acceptance_test,
    bonferroni_accept,
    bonferroni_pbar_box,
    ellipsoid_pbar_box,
)

LOGLIK_TIE_TOL = 1e-9


@dataclass(frozen=True)
class UpdateParams:
    """Tuning shared by the updating rules.

    epsilon: sup-norm radius for average-then-update (default 0.05).
    alpha:   test level for the statistical rules (default 0.05).
    bonferroni: use per-outcome intervals instead of the chi-square ellipsoid.
    support_floor: full-support floor applied before likelihoods / inversions.
    """

    epsilon: float = 0.05
    alpha: float = 0.05
    bonferroni: bool = False
    support_floor: float = SUPPORT_FLOOR

    def __post_init__(self) -> None:
        if self.epsilon <= 0.0:
            raise InvalidDistributionError("epsilon must be positive")
        if not 0.0 < self.alpha < 1.0:
            raise InvalidDistributionError("alpha must be in (0, 1)")


# ======================================================================
# Constraints on average sample marginals
# ======================================================================

@dataclass(frozen=True, eq=False)
class AverageBallConstraint:
    """sup-norm ball |pbar - phi| < epsilon (open); the region is a box, so
    the componentwise description is exact for every d."""

    phi: np.ndarray
    n: int
    epsilon: float

    def admits(self, pbar: np.ndarray) -> bool:
        return float(np.max(np.abs(np.asarray(pbar) - self.phi))) < self.epsilon

    def pbar_region(self) -> tuple[np.ndarray, np.ndarray, bool, bool]:
        lo = np.maximum(self.phi - self.epsilon, 0.0)
        hi = np.minimum(self.phi + self.epsilon, 1.0)
        return lo, hi, True, True


@dataclass(frozen=True, eq=False)
class IidAcceptanceConstraint:
    """Chi-square acceptance of phi under i.i.d. at pbar (closed region).

    The componentwise box is the Wilson interval for d = 2 (exact) and an
    outer projection for d > 2.
    """

    phi: np.ndarray
    n: int
    alpha: float
    support_floor: float = SUPPORT_FLOOR

    def admits(self, pbar: np.ndarray) -> bool:
        return acceptance_test(self.phi, pbar, self.n, self.alpha, self.support_floor)

    def pbar_region(self) -> tuple[np.ndarray, np.ndarray, bool, bool]:
        lo, hi = ellipsoid_pbar_box(self.phi, self.n, self.alpha)
        exact = self.phi.shape[0] == 2
        return lo, hi, False, exact


@dataclass(frozen=True, eq=False)
class BonferroniConstraint:
    """Per-outcome score intervals at level 1 - alpha/(d-1), closed; the
    region is a box, exact for every d."""

    phi: np.ndarray
    n: int
    alpha: float

    def admits(self, pbar: np.ndarray) -> bool:
        return bonferroni_accept(self.phi, pbar, self.n, self.alpha)

    def pbar_region(self) -> tuple[np.ndarray, np.ndarray, bool, bool]:
        lo, hi = bonferroni_pbar_box(self.phi, self.n, self.alpha)
        return lo, hi, False, True


# ======================================================================
# Achievable averages of a branch
# ======================================================================

def achievable_average_box(branch: BoxFamily | VertexFamily,
                           n: int) -> tuple[np.ndarray, np.ndarray, bool]:
    """Componentwise bounds on (1/n) sum_{i<=n} P_i over the branch.

    Returns (lo, hi, exact).  For a binary box family the set of achievable
    averages is exactly the interval; otherwise the box is an outer
    approximation (cross-component simplex coupling for d > 2, and the
    discreteness of vertex choices).
    """
    d = branch.space.d
    lo = np.zeros(d)
    hi = np.zeros(d)
    if isinstance(branch, BoxFamily):
        for i in range(1, n + 1):
            b_lo, b_hi = box_attainable_bounds(branch.box_at(i))
            lo += b_lo
            hi += b_hi
        exact = d == 2
    else:
        for i in range(1, n + 1):
            probs = np.array([c.probs for c in branch.choices_at(i)])
            lo += probs.min(axis=0)
            hi += probs.max(axis=0)
        exact = all(len(branch.choices_at(i)) == 1
                    for i in range(1, min(n, branch.prefix_len + branch.period) + 1))
    return lo / n, hi / n, exact


def _boxes_intersect(a_lo: np.ndarray, a_hi: np.ndarray,
                     b_lo: np.ndarray, b_hi: np.ndarray,
                     strict: bool, atol: float = 1e-12) -> bool:
    """Componentwise interval overlap, plus simplex feasibility of the
    intersection.  ``strict`` treats the second box as open."""
    lo = np.maximum(a_lo, b_lo)
    hi = np.minimum(a_hi, b_hi)
    if strict:
        if np.any(a_lo >= b_hi) or np.any(a_hi <= b_lo):
            return False
    elif np.any(lo > hi + atol):
        return False
    return lo.sum() <= 1.0 + atol and np.minimum(a_hi, b_hi).sum() >= 1.0 - atol


# ======================================================================
# Filter-style rules (ATU, robust i.i.d., Bonferroni)
# ======================================================================

def _filtered_update(family: DgpFamily, data: SampleData,
                     make_constraint) -> DgpFamily:
    if len(data) == 0:
        raise EmptySampleError("updating on an empty sample")
    constraint = make_constraint(empirical_distribution(data), len(data))

    def update_branch(branch: DgpFamily) -> DgpFamily | None:
        if isinstance(branch, ExplicitSet):
            kept = tuple(m for m in branch.members
                         if constraint.admits(average_sample_marginals(m, constraint.n)))
            return ExplicitSet(branch.space, kept) if kept else None
        if isinstance(branch, (BoxFamily, VertexFamily)):
            a_lo, a_hi, a_exact = achievable_average_box(branch, constraint.n)
            r_lo, r_hi, strict, r_exact = constraint.pbar_region()
            if not _boxes_intersect(a_lo, a_hi, r_lo, r_hi, strict):
                return None
            return replace(branch,
                           constraints=branch.constraints + (constraint,),
                           survived_outer=branch.survived_outer
                           or not (a_exact and r_exact))
        if isinstance(branch, UnionFamily):
            kept = tuple(b for b in (update_branch(m) for m in branch.members)
                         if b is not None)
            return UnionFamily(branch.space, kept)
        raise InvalidDistributionError(f"unsupported family type {type(branch)!r}")

    result = update_branch(family)
    if result is None:
        return UnionFamily(family.space, ())
    return result


def average_then_update(family: DgpFamily, data: SampleData,
                        params: UpdateParams = UpdateParams()) -> DgpFamily:
    """Keep the DGPs whose average sample marginal is within sup-norm
    ``params.epsilon`` of the empirical distribution (strict inequality)."""
    return _filtered_update(
        family, data,
        lambda phi, n: AverageBallConstraint(phi, n, params.epsilon))


def robust_iid_update(family: DgpFamily, data: SampleData,
                      params: UpdateParams = UpdateParams()) -> DgpFamily:
    """Keep the DGPs whose average passes the i.i.d. chi-square acceptance
    test at the observed frequencies (level ``params.alpha``)."""
    if params.bonferroni:
        return bonferroni_update(family, data, params)
    return _filtered_update(
        family, data,
        lambda phi, n: IidAcceptanceConstraint(phi, n, params.alpha,
                                               params.support_floor))


def bonferroni_update(family: DgpFamily, data: SampleData,
                      params: UpdateParams = UpdateParams()) -> DgpFamily:
    """Per-outcome interval variant of :func:`robust_iid_update`; coincides
    with it when d = 2."""
    return _filtered_update(
        family, data,
        lambda phi, n: BonferroniConstraint(phi, n, params.alpha))


# ======================================================================
# Maximum likelihood
# ======================================================================

def _box_observed_maxima(branch: BoxFamily, data: SampleData) -> np.ndarray:
    """Per-experiment maximum attainable probability of the observed outcome."""
    n = len(data)
    out = np.empty(n)
    for i in range(1, n + 1):
        _, hi_star = box_attainable_bounds(branch.box_at(i))
        out[i - 1] = hi_star[data.outcomes[i - 1]]
    return out


def _branch_sup_loglik(branch: DgpFamily, data: SampleData,
                       eta: float) -> float:
    if isinstance(branch, ExplicitSet):
        return max(floored_log_likelihood(m, data, eta) for m in branch.members)
    # The floor transform p -> (1 - d*eta) p + eta is strictly increasing, so
    # the maximizing marginals are the same with or without it; flooring the
    # attained maxima keeps branch suprema comparable with the ExplicitSet path.
    d = branch.space.d
    scale = 1.0 - d * eta
    if isinstance(branch, BoxFamily):
        probs = _box_observed_maxima(branch, data) * scale + eta
        if np.any(probs <= 0.0):
            return float("-inf")
        return float(np.log(probs).sum())
    if isinstance(branch, VertexFamily):
        total = 0.0
        for i in range(1, len(data) + 1):
            best = max(c.probs[data.outcomes[i - 1]] for c in branch.choices_at(i))
            best = best * scale + eta
            if best <= 0.0:
                return float("-inf")
            total += math.log(best)
        return total
    raise InvalidDistributionError(f"unsupported family type {type(branch)!r}")


def _pin_box_branch(branch: BoxFamily, data: SampleData) -> BoxFamily:
    """Restrict each sample experiment's box to the likelihood maximizers:
    the observed component is pinned at its attainable maximum, other
    components keep their bounds (the simplex then carries the slack)."""
    n = len(data)
    prefix = []
    for i in range(1, n + 1):
        box = np.array(branch.box_at(i))
        _, hi_star = box_attainable_bounds(branch.box_at(i))
        j = int(data.outcomes[i - 1])
        box[j, 0] = box[j, 1] = hi_star[j]
        prefix.append(box)
    for i in range(n + 1, branch.prefix_len + 1):
        prefix.append(np.array(branch.box_at(i)))
    return BoxFamily(branch.space, branch.cycle_boxes, tuple(prefix),
                     branch.constraints, branch.survived_outer)


def _pin_vertex_branch(branch: VertexFamily, data: SampleData) -> VertexFamily:
    n = len(data)
    prefix: list[tuple[Marginal, ...]] = []
    for i in range(1, n + 1):
        choices = branch.choices_at(i)
        probs = [c.probs[data.outcomes[i - 1]] for c in choices]
        best = max(probs)
        prefix.append(tuple(c for c, p in zip(choices, probs)
                            if p >= best - 1e-12))
    for i in range(n + 1, branch.prefix_len + 1):
        prefix.append(branch.choices_at(i))
    return VertexFamily(branch.space, branch.cycle_choices, tuple(prefix),
                        branch.constraints, branch.survived_outer)


def max_likelihood_update(family: DgpFamily, data: SampleData,
                          params: UpdateParams = UpdateParams()) -> DgpFamily:
    """Keep the DGPs attaining the supremum of the sample likelihood.

    Explicit members are compared by floored log-likelihood (so that zero
    probabilities never make the update ill-defined); box and vertex branches
    have closed-form suprema (each experiment's marginal maximizes the
    probability of its observed outcome) and the surviving branches are
    re-expressed with those per-experiment maximizer sets pinned.  Ties within
    1e-9 of the supremum are all retained.
    """
    if len(data) == 0:
        raise EmptySampleError("updating on an empty sample")
    branches = [b for b in family.branches() if not b.is_empty]
    if not branches:
        return UnionFamily(family.space, ())
    sups = [_branch_sup_loglik(b, data, params.support_floor) for b in branches]
    top = max(sups)
    if top == float("-inf"):
        raise ZeroEvidenceError("every candidate assigns zero likelihood to the data")
    survivors: list[DgpFamily] = []
    for branch, sup in zip(branches, sups):
        if sup < top - LOGLIK_TIE_TOL:
            continue
        if isinstance(branch, ExplicitSet):
            kept = tuple(m for m in branch.members
                         if floored_log_likelihood(m, data, params.support_floor)
                         >= top - LOGLIK_TIE_TOL)
            survivors.append(ExplicitSet(branch.space, kept))
        elif isinstance(branch, BoxFamily):
            survivors.append(_pin_box_branch(branch, data))
        else:
            survivors.append(_pin_vertex_branch(branch, data))
    if len(survivors) == 1 and not isinstance(family, UnionFamily):
        return survivors[0]
    return UnionFamily(family.space, tuple(survivors))


# ======================================================================
# Bayesian rules
# ======================================================================

def full_bayesian_update(family: DgpFamily, data: SampleData) -> DgpFamily:
    """The identity update: every prior-positive candidate stays relevant."""
    return family


@dataclass(frozen=True, eq=False)
class PosteriorAtom:
    """One unit of posterior support.

    kind "member": a single DGP (``dgp`` set).  kind "vertex": a whole vertex
    branch compressed by per-experiment sufficient statistics; ``conditionals``
    holds, per sample experiment, the posterior over that experiment's choices.
    ``log_size`` is the log of the number of elementary sample-window marginal
    sequences the atom stands for (0 for members).
    """

    label: str
    kind: str
    log_size: float
    dgp: IndependentDgp | None = None
    branch: VertexFamily | None = None
    conditionals: tuple[np.ndarray, ...] = ()

    def predictive_marginal(self, i: int, n: int) -> np.ndarray:
        """Posterior-mean marginal of experiment i under this atom."""
        if self.kind == "member":
            assert self.dgp is not None
            return self.dgp.marginal_at(i).probs
        assert self.branch is not None
        choices = np.array([c.probs for c in self.branch.choices_at(i)])
        if i <= n and i - 1 < len(self.conditionals):
            return self.conditionals[i - 1] @ choices
        # future experiments carry the uniform prior over choices
        return choices.mean(axis=0)


@dataclass(frozen=True, eq=False)
class PosteriorWeights:
    """Posterior over a finite support enumeration of the family.

    The prior is uniform over elementary sample-window marginal sequences:
    every explicit member counts once and a vertex branch with c choices per
    experiment counts as c^N sequences, so atom prior mass is proportional to
    exp(log_size).  Weights are the exact posterior atom masses.
    """

    atoms: tuple[PosteriorAtom, ...]
    weights: np.ndarray
    n: int

    def mass(self, label: str) -> float:
        total = 0.0
        for a, w in zip(self.atoms, self.weights):
            if a.label == label:
                total += float(w)
        return total

    def predictive_marginal(self, i: int) -> np.ndarray:
        out = np.zeros_like(self.atoms[0].predictive_marginal(i, self.n))
        for a, w in zip(self.atoms, self.weights):
            out += w * a.predictive_marginal(i, self.n)
        return out

    def posterior_expected_payoff(self, a) -> float:
        """Posterior expected payoff of an act on the next K experiments,
        averaging each atom's per-experiment predictive marginals."""
        total = 0.0
        for atom, w in zip(self.atoms, self.weights):
            table = a.payoffs
            for i in range(1, a.horizon + 1):
                table = np.tensordot(atom.predictive_marginal(self.n + i, self.n),
                                     table, axes=(0, 0))
            total += w * float(table)
        return float(total)

    def enumerate_support(self, cap: int = 4096) -> list[tuple[str, float]]:
        """Expand vertex atoms into elementary sequences when small enough.

        Each vertex branch of c_i choices at sample experiment i expands into
        prod c_i sequences with factorized weights; raises when the expansion
        would exceed ``cap`` entries.
        """
        out: list[tuple[str, float]] = []
        for atom, w in zip(self.atoms, self.weights):
            if atom.kind == "member":
                out.append((atom.label, float(w)))
                continue
            assert atom.branch is not None
            sizes = [len(atom.branch.choices_at(i)) for i in range(1, self.n + 1)]
            count = 1
            for s in sizes:
                count *= s
                if count > cap:
                    raise InvalidDistributionError(
                        f"support expansion exceeds cap {cap}")
            if self.n == 0:
                out.append((atom.label, float(w)))
                continue
            for combo in itertools.product(*[range(s) for s in sizes]):
                weight = float(w)
                for i, c in enumerate(combo):
                    weight *= float(atom.conditionals[i][c])
                name = atom.label + ":" + ",".join(str(c) for c in combo)
                out.append((name, weight))
        return out


def _logsumexp(vals: np.ndarray) -> float:
    top = vals.max()
    if top == float("-inf"):
        return float("-inf")
    return float(top + np.log(np.exp(vals - top).sum()))


def bayesian_posterior(family: DgpFamily, data: SampleData,
                       params: UpdateParams = UpdateParams()) -> PosteriorWeights:
    """Exact posterior over the family's finite support enumeration.

    Supports explicit sets, vertex families, and unions of them.  Vertex
    branches are compressed: with a uniform prior over choice sequences the
    posterior factorizes across experiments, so an atom stores one weight
    vector per sample experiment instead of the exponential enumeration.
    """
    n = len(data)
    eta = params.support_floor
    atoms: list[PosteriorAtom] = []
    log_terms: list[float] = []
    member_idx = 0
    branch_idx = 0
    for branch in family.branches():
        if isinstance(branch, ExplicitSet):
            for m in branch.members:
                atoms.append(PosteriorAtom(label=f"member{member_idx}",
                                           kind="member", log_size=0.0, dgp=m))
                log_terms.append(floored_log_likelihood(m, data, eta))
                member_idx += 1
        elif isinstance(branch, VertexFamily):
            conditionals: list[np.ndarray] = []
            log_avg = 0.0
            log_size = 0.0
            dead = False
            for i in range(1, n + 1):
                probs = np.array([c.probs[data.outcomes[i - 1]]
                                  for c in branch.choices_at(i)])
                s = probs.sum()
                log_size += math.log(len(probs))
                if s <= 0.0:
                    dead = True
                    break
                conditionals.append(probs / s)
                log_avg += math.log(s / len(probs))
            atoms.append(PosteriorAtom(label=f"branch{branch_idx}", kind="vertex",
                                       log_size=log_size, branch=branch,
                                       conditionals=tuple(conditionals)))
            log_terms.append(float("-inf") if dead else log_avg)
            branch_idx += 1
        else:
            raise InvalidDistributionError(
                "bayesian_posterior needs a finitely enumerable family "
                "(explicit sets, vertex families, or unions of them)")
    if not atoms:
        raise ZeroEvidenceError("the family has no support to weight")
    # posterior atom mass proportional to (atom size) * (average likelihood)
    logs = np.array([lt + a.log_size for lt, a in zip(log_terms, atoms)])
    norm = _logsumexp(logs)
    if norm == float("-inf"):
        raise ZeroEvidenceError("all likelihoods are zero")
    weights = np.exp(logs - norm)
    weights /= weights.sum()
    return PosteriorWeights(tuple(atoms), weights, n)
