"""Maxmin decisions over hulls of future marginals.

An act with horizon K is a payoff table in [0, 1] over the d^K joint outcomes
of the next K experiments.  A family of DGPs, seen from the end of the sample
at experiment N, induces the convex hull of the product measures of its
members' future marginals; max-min expected utility evaluates each act at its
worst point of that hull.

Hulls come in two representations:

* :class:`RectHull` - per-experiment boxes (from a single box family).  The
  extreme points of the induced set of product measures are the products of
  the per-experiment box-simplex vertices, so linear functionals are
  minimized exactly by enumerating vertex products (a multilinear function of
  the per-experiment marginals attains its extrema at per-experiment
  vertices).
* :class:`PointCloud` - a finite list of joint pmfs of dimension d^K whose
  convex hull is the decision-relevant set (explicit members, vertex-choice
  products, or the union of several branches' extreme points).

Enumerations are guarded by a size cap (default 10^5); exceeding it raises
HorizonTooLargeError.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import nnls

from .dgp import (
    BoxFamily,
    DgpFamily,
    ExplicitSet,
    IndependentDgp,
    OutcomeSpace,
    UnionFamily,
    VertexFamily,
    box_attainable_bounds,
)
from .errors import (
    EmptyFamilyError,
    HorizonTooLargeError,
    InvalidDistributionError,
)

SIZE_CAP = 100_000
PAYOFF_ATOL = 1e-12
HULL_ATOL = 1e-9


# ======================================================================
# Acts and decision problems
# ======================================================================

@dataclass(frozen=True, eq=False)
class Act:
    """Payoff table over the joint outcomes of the next ``horizon`` experiments.

    ``payoffs`` has shape (d,) * horizon, entries in [0, 1], C-order flattening
    (the first future experiment is the slowest-varying axis).
    """

    space: OutcomeSpace
    payoffs: np.ndarray

    def __post_init__(self) -> None:
        arr = np.asarray(self.payoffs, dtype=float)
        if arr.ndim < 1:
            raise InvalidDistributionError("payoffs must have at least one axis")
        if arr.shape != (self.space.d,) * arr.ndim:
            raise InvalidDistributionError(
                f"payoff table shape {arr.shape} is not (d,)*K for d={self.space.d}")
        if arr.size > SIZE_CAP:
            raise HorizonTooLargeError(
                f"payoff table with {arr.size} entries exceeds the cap {SIZE_CAP}")
        if not np.all(np.isfinite(arr)):
            raise InvalidDistributionError("payoffs must be finite")
        if arr.min() < -PAYOFF_ATOL or arr.max() > 1.0 + PAYOFF_ATOL:
            raise InvalidDistributionError("payoffs must lie in [0, 1]")
        arr = arr.copy()
        arr.setflags(write=False)
        object.__setattr__(self, "payoffs", arr)

    @property
    def horizon(self) -> int:
        return self.payoffs.ndim

    @property
    def flat(self) -> np.ndarray:
        return self.payoffs.reshape(-1)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Act):
            return NotImplemented
        return self.space == other.space and np.array_equal(self.payoffs, other.payoffs)

    __hash__ = None  # type: ignore[assignment]


def act(space: OutcomeSpace, payoffs) -> Act:
    return Act(space, np.asarray(payoffs, dtype=float))


def constant_act(space: OutcomeSpace, horizon: int, value: float) -> Act:
    """An act paying ``value`` at every joint outcome."""
    return Act(space, np.full((space.d,) * horizon, float(value)))


def act_to_json(a: Act) -> dict:
    return {"horizon": a.horizon, "payoffs": a.payoffs.tolist()}


def act_from_json(space: OutcomeSpace, obj: dict) -> Act:
    arr = np.asarray(obj["payoffs"], dtype=float)
    if arr.ndim != int(obj["horizon"]):
        raise InvalidDistributionError("payoff table does not match horizon")
    return Act(space, arr)


@dataclass(frozen=True)
class DecisionProblem:
    """A finite menu of acts sharing one horizon, faced at the end of a sample."""

    space: OutcomeSpace
    acts: tuple[Act, ...]

    def __post_init__(self) -> None:
        acts_t = tuple(self.acts)
        if not acts_t:
            raise InvalidDistributionError("a decision problem needs at least one act")
        k = acts_t[0].horizon
        for a in acts_t:
            if a.space != self.space:
                raise InvalidDistributionError("act on a different outcome space")
            if a.horizon != k:
                raise InvalidDistributionError("acts must share a horizon")
        object.__setattr__(self, "acts", acts_t)

    @property
    def horizon(self) -> int:
        return self.acts[0].horizon


def basic_problem(space: OutcomeSpace, f: Act, x: float) -> DecisionProblem:
    """A two-act problem {f, constant x}; the constant act has index 1."""
    return DecisionProblem(space, (f, constant_act(space, f.horizon, x)))


# ======================================================================
# Hulls of future marginals
# ======================================================================

def box_simplex_vertices(box: np.ndarray, atol: float = 1e-12) -> np.ndarray:
    """Vertices of {p : lo <= p <= hi, sum p = 1}, shape (m, d).

    Every vertex has at least d-1 components at a bound; enumerate the free
    component and the bound pattern of the others, then deduplicate.
    """
    lo, hi = box[:, 0], box[:, 1]
    d = lo.size
    if d * (1 << (d - 1)) > SIZE_CAP:
        raise HorizonTooLargeError(
            f"vertex enumeration for d={d} exceeds the cap {SIZE_CAP}")
    verts: list[np.ndarray] = []
    bounds = np.stack([lo, hi], axis=1)
    for free in range(d):
        others = [j for j in range(d) if j != free]
        for mask in itertools.product((0, 1), repeat=d - 1):
            v = np.empty(d)
            for j, m in zip(others, mask):
                v[j] = bounds[j, m]
            pf = 1.0 - sum(v[j] for j in others)
            if lo[free] - atol <= pf <= hi[free] + atol:
                v[free] = min(max(pf, lo[free]), hi[free])
                verts.append(v)
    if not verts:
        raise InvalidDistributionError("box does not intersect the simplex")
    arr = np.array(verts)
    arr = np.unique(np.round(arr, 12), axis=0)
    arr.setflags(write=False)
    return arr


def _product_points(per_experiment: list[np.ndarray], cap: int) -> np.ndarray:
    """All products v_1 x ... x v_K with v_i from the i-th array of marginals.

    Returns shape (prod m_i, d^K) in C-order (experiment 1 slowest axis).
    """
    count = 1
    size = 1
    for arr in per_experiment:
        count *= arr.shape[0]
        size *= arr.shape[1]
        if count > cap or size > cap:
            raise HorizonTooLargeError(
                f"hull enumeration ({count} points of dim {size}) exceeds the cap {cap}")
    points = np.ones((1, 1))
    for arr in per_experiment:
        points = (points[:, None, :, None] * arr[None, :, None, :]).reshape(
            points.shape[0] * arr.shape[0], points.shape[1] * arr.shape[1])
    return points


@dataclass(frozen=True, eq=False)
class RectHull:
    """Hull induced by one box family: per-experiment boxes for K experiments."""

    space: OutcomeSpace
    boxes: tuple[np.ndarray, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "boxes", tuple(np.asarray(b, float) for b in self.boxes))
        if not self.boxes:
            raise InvalidDistributionError("RectHull needs at least one box")

    @property
    def horizon(self) -> int:
        return len(self.boxes)

    def extreme_points(self, cap: int = SIZE_CAP) -> np.ndarray:
        per = [box_simplex_vertices(b) for b in self.boxes]
        return _product_points(per, cap)

    def contains_product(self, marginals: list[np.ndarray],
                         atol: float = HULL_ATOL) -> bool:
        """Membership of a product measure: factor-by-factor box membership.

        Exact because marginalizing any convex combination of in-box products
        onto experiment i yields a point of the i-th box.
        """
        for b, p in zip(self.boxes, marginals):
            if np.any(p < b[:, 0] - atol) or np.any(p > b[:, 1] + atol):
                return False
        return True


@dataclass(frozen=True, eq=False)
class PointCloud:
    """Finite set of joint pmfs (dimension d^K) whose convex hull is the
    decision-relevant set."""

    space: OutcomeSpace
    horizon: int
    points: np.ndarray

    def __post_init__(self) -> None:
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim != 2 or pts.shape[0] == 0:
            raise InvalidDistributionError("PointCloud needs a nonempty (m, d^K) array")
        if pts.shape[1] != self.space.d ** self.horizon:
            raise InvalidDistributionError(
                f"points have dimension {pts.shape[1]}, expected d^K = "
                f"{self.space.d ** self.horizon}")
        sums = pts.sum(axis=1)
        if np.any(np.abs(sums - 1.0) > 1e-9) or pts.min() < -1e-12:
            raise InvalidDistributionError("points must be probability vectors")
        pts = pts.copy()
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    def extreme_points(self, cap: int = SIZE_CAP) -> np.ndarray:
        return self.points


MarginalHull = RectHull | PointCloud


def _branch_extreme_marginals(branch: DgpFamily, i: int) -> np.ndarray:
    """Extreme candidate marginals of experiment i within one branch."""
    if isinstance(branch, BoxFamily):
        return box_simplex_vertices(branch.box_at(i))
    if isinstance(branch, ExplicitSet):
        return np.array([m.marginal_at(i).probs for m in branch.members])
    if isinstance(branch, VertexFamily):
        return np.array([c.probs for c in branch.choices_at(i)])
    raise InvalidDistributionError(f"unsupported branch type {type(branch)!r}")


def future_hull(family: DgpFamily, n: int, horizon: int,
                cap: int = SIZE_CAP) -> MarginalHull:
    """Hull of the family's product measures over experiments n+1 .. n+horizon.

    A single box branch yields a :class:`RectHull`; anything else yields a
    :class:`PointCloud` of extreme points (explicit members contribute their
    product pmfs, box/vertex branches contribute vertex/choice products).
    Recorded average constraints only restrict sample experiments, so they do
    not change the future hull of a surviving branch.
    """
    if horizon < 1:
        raise InvalidDistributionError("horizon must be >= 1")
    if family.is_empty:
        raise EmptyFamilyError("future hull of an empty family")
    d = family.space.d
    if d ** horizon > cap:
        raise HorizonTooLargeError(
            f"d^K = {d ** horizon} joint outcomes exceed the cap {cap}")
    branches = [b for b in family.branches() if not b.is_empty]
    if len(branches) == 1 and isinstance(branches[0], BoxFamily):
        box = branches[0]
        return RectHull(family.space,
                        tuple(box.box_at(n + i) for i in range(1, horizon + 1)))
    blocks: list[np.ndarray] = []
    for branch in branches:
        if isinstance(branch, ExplicitSet):
            for m in branch.members:
                per = [m.marginal_at(n + i).probs[None, :]
                       for i in range(1, horizon + 1)]
                blocks.append(_product_points(per, cap))
        else:
            per = [_branch_extreme_marginals(branch, n + i)
                   for i in range(1, horizon + 1)]
            blocks.append(_product_points(per, cap))
    points = np.vstack(blocks)
    if points.shape[0] > cap:
        raise HorizonTooLargeError(
            f"hull with {points.shape[0]} extreme points exceeds the cap {cap}")
    points = np.unique(np.round(points, 12), axis=0)
    return PointCloud(family.space, horizon, points)


# ======================================================================
# Expected utility, choices, payoffs
# ======================================================================

def min_expected_utility(a: Act, hull: MarginalHull, cap: int = SIZE_CAP) -> float:
    """min over the hull of E[a]; exact via extreme-point enumeration."""
    if a.horizon != hull.horizon:
        raise InvalidDistributionError("act horizon does not match the hull")
    pts = hull.extreme_points(cap)
    return float((pts @ a.flat).min())


def meu_values(problem: DecisionProblem, hull: MarginalHull,
               cap: int = SIZE_CAP) -> np.ndarray:
    pts = hull.extreme_points(cap)
    table = np.stack([a.flat for a in problem.acts])
    return (table @ pts.T).min(axis=1)


def meu_choice(problem: DecisionProblem, hull: MarginalHull,
               incumbent: Act | None = None, cap: int = SIZE_CAP,
               tol: float = PAYOFF_ATOL) -> Act:
    """Max-min choice with incumbent tie-breaking.

    Returns the act with the largest minimum expected utility.  Ties within
    ``tol`` go to the incumbent when it is among the winners, otherwise to the
    lowest index.
    """
    vals = meu_values(problem, hull, cap)
    best = float(vals.max())
    winners = [i for i, v in enumerate(vals) if v >= best - tol]
    if incumbent is not None:
        for i in winners:
            if problem.acts[i] == incumbent:
                return problem.acts[i]
    return problem.acts[winners[0]]


def objective_payoff(a: Act, dgp: IndependentDgp, n: int) -> float:
    """Expected payoff of the act under the true DGP's next K experiments."""
    table = a.payoffs
    for i in range(1, a.horizon + 1):
        table = np.tensordot(dgp.marginal_at(n + i).probs, table, axes=(0, 0))
    return float(table)


def certainty_equivalent(problem: DecisionProblem, family: DgpFamily, n: int,
                         cap: int = SIZE_CAP) -> float:
    """The max-min value max_f min_{P in hull} E[f] of the problem."""
    hull = future_hull(family, n, problem.horizon, cap)
    return float(meu_values(problem, hull, cap).max())


# ======================================================================
# Hull geometry: membership, accommodation, refinement
# ======================================================================

def in_convex_hull(points: np.ndarray, x: np.ndarray,
                   tol: float = HULL_ATOL) -> bool:
    """Is x a convex combination of the rows of ``points`` within tol?

    Solved as a nonnegative least-squares problem on the system augmented
    with the sum-to-one row; membership iff the residual is at most tol.
    """
    points = np.asarray(points, dtype=float)
    x = np.asarray(x, dtype=float)
    aug = np.vstack([points.T, np.ones(points.shape[0])])
    target = np.concatenate([x, [1.0]])
    _, residual = nnls(aug, target)
    return bool(residual <= tol)


def _joint_of(dgp: IndependentDgp, n: int, horizon: int) -> np.ndarray:
    per = [dgp.marginal_at(n + i).probs[None, :] for i in range(1, horizon + 1)]
    return _product_points(per, SIZE_CAP)[0]


def accommodates(updated: DgpFamily, truth: IndependentDgp, n: int,
                 horizon: int = 1, cap: int = SIZE_CAP,
                 tol: float = HULL_ATOL) -> bool | None:
    """Does the updated family's future hull contain the truth's product
    measure over the next ``horizon`` experiments?

    Returns True / False when decidable; None when the hull enumeration
    exceeds the size cap (unknown).
    """
    if updated.is_empty:
        return False
    try:
        hull = future_hull(updated, n, horizon, cap)
        if isinstance(hull, RectHull):
            margs = [truth.marginal_at(n + i).probs for i in range(1, horizon + 1)]
            return hull.contains_product(margs, tol)
        return in_convex_hull(hull.extreme_points(cap), _joint_of(truth, n, horizon), tol)
    except HorizonTooLargeError:
        return None


def refines(updated: DgpFamily, initial: DgpFamily, n: int,
            horizon: int = 1, cap: int = SIZE_CAP,
            tol: float = HULL_ATOL) -> bool:
    """Strict hull inclusion: updated hull inside the initial hull, and some
    initial extreme point outside the updated hull (by more than tol)."""
    if updated.is_empty:
        return not initial.is_empty
    upd_pts = future_hull(updated, n, horizon, cap).extreme_points(cap)
    init_pts = future_hull(initial, n, horizon, cap).extreme_points(cap)
    for p in upd_pts:
        if not in_convex_hull(init_pts, p, tol):
            return False
    return any(not in_convex_hull(upd_pts, q, tol) for q in init_pts)


# ======================================================================
# Minimax regret
# ======================================================================

def regret_values(problem: DecisionProblem, hull: MarginalHull,
                  cap: int = SIZE_CAP) -> np.ndarray:
    """Worst-case expected regret of each act over the hull.

    Regret is measured against the outcome-wise best act: with
    b(omega) = max_g g(omega), regret(f, P) = E_P[b - f], which is affine in P
    and therefore maximized at hull extreme points.
    """
    pts = hull.extreme_points(cap)
    table = np.stack([a.flat for a in problem.acts])
    best = table.max(axis=0)
    return ((best[None, :] - table) @ pts.T).max(axis=1)


def minimax_regret_choice(problem: DecisionProblem, hull: MarginalHull,
                          cap: int = SIZE_CAP,
                          tol: float = PAYOFF_ATOL) -> Act:
    """The act minimizing worst-case regret; ties go to the lowest index."""
    vals = regret_values(problem, hull, cap)
    best = float(vals.min())
    for i, v in enumerate(vals):
        if v <= best + tol:
            return problem.acts[i]
    return problem.acts[0]
