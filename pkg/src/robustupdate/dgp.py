"""Independent data-generating processes over finite outcome spaces.

A data-generating process (DGP) is a sequence of independent experiments, each
drawing one outcome from a finite outcome space.  The experiments need not be
identically distributed: a DGP is a finite prefix of explicit per-experiment
marginals followed by an infinite tail that is either i.i.d. or periodic.

Families of DGPs come in four finitely generated shapes:

* :class:`BoxFamily` - per-experiment interval constraints on each marginal
  component (prefix + periodic cycle of boxes);
* :class:`ExplicitSet` - a finite list of named DGPs;
* :class:`VertexFamily` - a finite set of candidate marginals per experiment
  (prefix + periodic cycle of choice sets);
* :class:`UnionFamily` - a finite union of the above (possibly empty, which is
  how updating rules report that every candidate was rejected).

Updating rules attach *constraints* to box/vertex branches: objects with an
``admits(pbar)`` predicate on the DGP's average sample marginal and a
``pbar_region()`` box description used for branch-survival tests.  Membership
queries evaluate the base geometry and every recorded constraint.

All objects are immutable and safe to share across threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterator, Protocol, Sequence

import numpy as np

from .errors import (
    EmptySampleError,
    InvalidDistributionError,
)

# Tolerance for "sums to one" checks on probability vectors.
SIMPLEX_ATOL = 1e-12
# Default full-support floor: floored marginals have every component >= eta.
SUPPORT_FLOOR = 1e-6
# Tolerance for structural equality of marginals / DGPs.
EQUALITY_ATOL = 1e-12


# ======================================================================
# Outcome spaces and marginals
# ======================================================================

@dataclass(frozen=True)
class OutcomeSpace:
    """Ordered finite set of outcome labels; component j refers to labels[j]."""

    labels: tuple[str, ...]

    def __post_init__(self) -> None:
        labels = tuple(str(s) for s in self.labels)
        object.__setattr__(self, "labels", labels)
        if len(labels) < 2:
            raise InvalidDistributionError("an outcome space needs at least 2 outcomes")
        if len(set(labels)) != len(labels):
            raise InvalidDistributionError("outcome labels must be distinct")

    @property
    def d(self) -> int:
        return len(self.labels)

    def index(self, label: str) -> int:
        return self.labels.index(label)


def binary_space(success: str = "1", failure: str = "0") -> OutcomeSpace:
    """Two-outcome space; component 0 is the success probability."""
    return OutcomeSpace((success, failure))


def _as_prob_vector(probs: Sequence[float] | np.ndarray, d: int) -> np.ndarray:
    arr = np.asarray(probs, dtype=float)
    if arr.shape != (d,):
        raise InvalidDistributionError(
            f"probability vector has shape {arr.shape}, expected ({d},)")
    if not np.all(np.isfinite(arr)):
        raise InvalidDistributionError("probability vector has non-finite entries")
    if np.any(arr < 0.0):
        raise InvalidDistributionError("probability vector has negative entries")
    if abs(float(arr.sum()) - 1.0) > SIMPLEX_ATOL:
        raise InvalidDistributionError(
            f"probabilities sum to {arr.sum()!r}, not 1 within {SIMPLEX_ATOL}")
    arr = arr.copy()
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class Marginal:
    """A single experiment's outcome distribution on an :class:`OutcomeSpace`.

    Invariants: nonnegative entries summing to one within ``SIMPLEX_ATOL``.
    Instances compare equal iff their spaces match and probabilities are
    bitwise equal; use :func:`marginals_close` for tolerance comparison.
    """

    space: OutcomeSpace
    probs: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "probs", _as_prob_vector(self.probs, self.space.d))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Marginal):
            return NotImplemented
        return self.space == other.space and np.array_equal(self.probs, other.probs)

    __hash__ = None  # type: ignore[assignment]

    def floored(self, eta: float = SUPPORT_FLOOR) -> "Marginal":
        """Full-support variant: mix with the uniform so each component >= eta.

        Uses p' = (1 - d*eta) p + eta, which keeps the simplex sum exact and
        moves each component by at most d*eta.
        """
        d = self.space.d
        if not 0.0 <= eta < 1.0 / d:
            raise InvalidDistributionError(f"support floor eta={eta} must be in [0, 1/d)")
        return Marginal(self.space, (1.0 - d * eta) * self.probs + eta)

    def is_full_support(self, eta: float = SUPPORT_FLOOR) -> bool:
        return bool(np.all(self.probs >= eta))


def marginal(space: OutcomeSpace, probs: Sequence[float]) -> Marginal:
    return Marginal(space, np.asarray(probs, dtype=float))


def binary_marginal(space: OutcomeSpace, p_success: float) -> Marginal:
    if space.d != 2:
        raise InvalidDistributionError("binary_marginal needs a 2-outcome space")
    return Marginal(space, np.array([p_success, 1.0 - p_success]))


def marginals_close(a: Marginal, b: Marginal, atol: float = EQUALITY_ATOL) -> bool:
    return a.space == b.space and bool(np.all(np.abs(a.probs - b.probs) <= atol))


# ======================================================================
# Independent DGPs: explicit prefix + iid or periodic tail
# ======================================================================

@dataclass(frozen=True)
class IidTail:
    marginal: Marginal

    @property
    def period(self) -> int:
        return 1

    def at(self, offset: int) -> Marginal:
        return self.marginal


@dataclass(frozen=True)
class PeriodicTail:
    cycle: tuple[Marginal, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "cycle", tuple(self.cycle))
        if not self.cycle:
            raise InvalidDistributionError("periodic tail needs a nonempty cycle")

    @property
    def period(self) -> int:
        return len(self.cycle)

    def at(self, offset: int) -> Marginal:
        return self.cycle[offset % len(self.cycle)]


@dataclass(frozen=True)
class IndependentDgp:
    """An independent, possibly non-identical DGP.

    Experiment indices are 1-based.  Experiment i has marginal ``prefix[i-1]``
    for i <= len(prefix) and tail marginal ``tail.at(i - len(prefix) - 1)``
    afterwards.
    """

    space: OutcomeSpace
    prefix: tuple[Marginal, ...]
    tail: IidTail | PeriodicTail

    def __post_init__(self) -> None:
        object.__setattr__(self, "prefix", tuple(self.prefix))
        for m in self.prefix:
            if m.space != self.space:
                raise InvalidDistributionError("prefix marginal on a different space")
        tail_marginals = (self.tail.marginal,) if isinstance(self.tail, IidTail) \
            else self.tail.cycle
        for m in tail_marginals:
            if m.space != self.space:
                raise InvalidDistributionError("tail marginal on a different space")

    @property
    def prefix_len(self) -> int:
        return len(self.prefix)

    @property
    def period(self) -> int:
        return self.tail.period

    def marginal_at(self, i: int) -> Marginal:
        """Marginal of experiment i (1-based)."""
        if i < 1:
            raise InvalidDistributionError(f"experiment index {i} must be >= 1")
        if i <= len(self.prefix):
            return self.prefix[i - 1]
        return self.tail.at(i - len(self.prefix) - 1)

    def marginals_matrix(self, n: int) -> np.ndarray:
        """Stack of the first n marginals, shape (n, d)."""
        if n < 0:
            raise InvalidDistributionError("n must be >= 0")
        d = self.space.d
        out = np.empty((n, d))
        m = min(n, len(self.prefix))
        for i in range(m):
            out[i] = self.prefix[i].probs
        if n > m:
            if isinstance(self.tail, IidTail):
                out[m:] = self.tail.marginal.probs
            else:
                cyc = np.stack([c.probs for c in self.tail.cycle])
                idx = (np.arange(n - m)) % len(self.tail.cycle)
                out[m:] = cyc[idx]
        out.setflags(write=False)
        return out


def iid_dgp(space: OutcomeSpace, probs: Sequence[float]) -> IndependentDgp:
    return IndependentDgp(space, (), IidTail(marginal(space, probs)))


def binary_iid(space: OutcomeSpace, p_success: float) -> IndependentDgp:
    return IndependentDgp(space, (), IidTail(binary_marginal(space, p_success)))


def periodic_dgp(space: OutcomeSpace,
                 cycle: Sequence[Sequence[float]]) -> IndependentDgp:
    return IndependentDgp(
        space, (), PeriodicTail(tuple(marginal(space, c) for c in cycle)))


def dgps_close(a: IndependentDgp, b: IndependentDgp,
               atol: float = EQUALITY_ATOL) -> bool:
    """Structural equality of two DGPs as marginal sequences.

    Compares experiment by experiment over the shared prefix plus one least
    common multiple of the tail periods, which determines the whole sequence.
    """
    if a.space != b.space:
        return False
    m = max(a.prefix_len, b.prefix_len)
    horizon = m + math.lcm(a.period, b.period)
    return all(
        marginals_close(a.marginal_at(i), b.marginal_at(i), atol)
        for i in range(1, horizon + 1)
    )


# ======================================================================
# Sample data and sample-path operations
# ======================================================================

@dataclass(frozen=True, eq=False)
class SampleData:
    """Observed outcomes omega_1..omega_N as indices into the outcome space."""

    space: OutcomeSpace
    outcomes: np.ndarray

    def __post_init__(self) -> None:
        arr = np.asarray(self.outcomes, dtype=np.int64)
        if arr.ndim != 1:
            raise InvalidDistributionError("outcomes must be a 1-d sequence")
        if arr.size and (arr.min() < 0 or arr.max() >= self.space.d):
            raise InvalidDistributionError(
                f"outcome indices must lie in [0, {self.space.d})")
        arr = arr.copy()
        arr.setflags(write=False)
        object.__setattr__(self, "outcomes", arr)

    def __len__(self) -> int:
        return int(self.outcomes.size)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SampleData):
            return NotImplemented
        return self.space == other.space and np.array_equal(self.outcomes, other.outcomes)

    __hash__ = None  # type: ignore[assignment]

    def counts(self) -> np.ndarray:
        return np.bincount(self.outcomes, minlength=self.space.d).astype(float)


SeedLike = int | Sequence[int] | np.random.SeedSequence | np.random.Generator


def _rng_from(seed: SeedLike) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def sample(dgp: IndependentDgp, n: int, seed: SeedLike) -> SampleData:
    """Draw omega_1..omega_n from the DGP.

    Deterministic: identical (dgp, n, seed) give bitwise-identical samples.
    Inverse-CDF on one uniform per experiment, so the draw for experiment i
    never depends on later experiments.
    """
    if n < 0:
        raise InvalidDistributionError("sample size must be >= 0")
    if n == 0:
        return SampleData(dgp.space, np.empty(0, dtype=np.int64))
    rng = _rng_from(seed)
    mat = dgp.marginals_matrix(n)
    cum = np.cumsum(mat, axis=1)
    u = rng.random(n)
    # outcome = number of interior cumulative boundaries at or below u
    idx = (u[:, None] >= cum[:, :-1]).sum(axis=1)
    return SampleData(dgp.space, idx.astype(np.int64))


def empirical_distribution(data: SampleData) -> np.ndarray:
    """Empirical outcome frequencies Phi(omega_N), shape (d,)."""
    n = len(data)
    if n == 0:
        raise EmptySampleError("empirical distribution of an empty sample")
    out = data.counts() / n
    out.setflags(write=False)
    return out


def average_sample_marginals(dgp: IndependentDgp, n: int) -> np.ndarray:
    """Average marginal (1/n) sum_{i<=n} P_i, computed exactly from counts."""
    if n < 1:
        raise EmptySampleError("average over zero experiments")
    d = dgp.space.d
    total = np.zeros(d)
    m = min(n, dgp.prefix_len)
    for i in range(m):
        total += dgp.prefix[i].probs
    rest = n - m
    if rest > 0:
        if isinstance(dgp.tail, IidTail):
            total += rest * dgp.tail.marginal.probs
        else:
            period = dgp.tail.period
            full, part = divmod(rest, period)
            if full:
                total += full * np.sum([c.probs for c in dgp.tail.cycle], axis=0)
            for k in range(part):
                total += dgp.tail.cycle[k].probs
    out = total / n
    out.setflags(write=False)
    return out


def log_likelihood(dgp: IndependentDgp, data: SampleData) -> float:
    """log prod_i P_i(omega_i); -inf when an observed outcome has probability 0."""
    if dgp.space != data.space:
        raise InvalidDistributionError("data and DGP live on different spaces")
    n = len(data)
    if n == 0:
        return 0.0
    mat = dgp.marginals_matrix(n)
    probs = mat[np.arange(n), data.outcomes]
    if np.any(probs <= 0.0):
        return float("-inf")
    return float(np.log(probs).sum())


def floored_log_likelihood(dgp: IndependentDgp, data: SampleData,
                           eta: float = SUPPORT_FLOOR) -> float:
    """Log-likelihood with each marginal floored to full support first."""
    if dgp.space != data.space:
        raise InvalidDistributionError("data and DGP live on different spaces")
    n = len(data)
    if n == 0:
        return 0.0
    d = dgp.space.d
    mat = dgp.marginals_matrix(n) * (1.0 - d * eta) + eta
    probs = mat[np.arange(n), data.outcomes]
    with np.errstate(divide="ignore"):  # eta=0 may hit log(0) -> -inf
        return float(np.log(probs).sum())


# ======================================================================
# Constraints recorded by updating rules
# ======================================================================

class AverageConstraint(Protocol):
    """Predicate on a DGP's average sample marginal, recorded by an update.

    ``n`` is the sample size the constraint refers to.  ``admits`` is the
    exact membership predicate.  ``pbar_region`` describes the admissible
    averages as a componentwise box (lo, hi, strict, exact): ``strict`` means
    open interval comparisons, and ``exact=False`` flags the box as an outer
    approximation of the true region.
    """

    n: int

    def admits(self, pbar: np.ndarray) -> bool: ...

    def pbar_region(self) -> tuple[np.ndarray, np.ndarray, bool, bool]: ...


# ======================================================================
# Families
# ======================================================================

def _as_box(box: Sequence[Sequence[float]] | np.ndarray, d: int) -> np.ndarray:
    arr = np.asarray(box, dtype=float)
    if arr.shape != (d, 2):
        raise InvalidDistributionError(
            f"box has shape {arr.shape}, expected ({d}, 2)")
    lo, hi = arr[:, 0], arr[:, 1]
    if not np.all(np.isfinite(arr)):
        raise InvalidDistributionError("box has non-finite bounds")
    if np.any(lo < -SIMPLEX_ATOL) or np.any(hi > 1.0 + SIMPLEX_ATOL):
        raise InvalidDistributionError("box bounds must lie in [0, 1]")
    if np.any(lo > hi + SIMPLEX_ATOL):
        raise InvalidDistributionError("box has lo > hi")
    # Feasibility of box-intersect-simplex: sum lo <= 1 <= sum hi.
    if lo.sum() > 1.0 + SIMPLEX_ATOL or hi.sum() < 1.0 - SIMPLEX_ATOL:
        raise InvalidDistributionError(
            "box does not intersect the probability simplex")
    arr = arr.copy()
    arr.setflags(write=False)
    return arr


def box_attainable_bounds(box: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Tightened per-component bounds attainable inside box-intersect-simplex.

    lo*_j = max(lo_j, 1 - sum_{k!=j} hi_k), hi*_j = min(hi_j, 1 - sum_{k!=j} lo_k).
    """
    lo, hi = box[:, 0], box[:, 1]
    d = box.shape[0]
    # per-component sums over k != j, computed directly: the subtract-the-total
    # shortcut loses exactness to cancellation (1 - (1.9 - 0.9) != 0.0)
    lo_star = np.empty(d)
    hi_star = np.empty(d)
    for j in range(d):
        mask = np.arange(d) != j
        lo_star[j] = max(lo[j], 1.0 - hi[mask].sum())
        hi_star[j] = min(hi[j], 1.0 - lo[mask].sum())
    return lo_star, hi_star


class DgpFamily:
    """Abstract base for families of independent DGPs."""

    space: OutcomeSpace

    @property
    def is_empty(self) -> bool:
        return False

    @property
    def outer_approx(self) -> bool:
        """True when a recorded update kept this family via an outer test."""
        return False

    def contains(self, dgp: IndependentDgp, atol: float = EQUALITY_ATOL) -> bool:
        raise NotImplementedError

    def branches(self) -> Iterator["DgpFamily"]:
        """Leaves of the union tree (self when not a union)."""
        yield self


def _check_constraints(constraints: Sequence[AverageConstraint],
                       dgp: IndependentDgp) -> bool:
    return all(c.admits(average_sample_marginals(dgp, c.n)) for c in constraints)


@dataclass(frozen=True)
class BoxFamily(DgpFamily):
    """All DGPs whose marginal at experiment i lies in the i-th box.

    Boxes follow a prefix + periodic cycle layout like :class:`IndependentDgp`.
    ``constraints`` are predicates on the average sample marginal recorded by
    updating rules; membership evaluates the base boxes and every constraint.
    """

    space: OutcomeSpace
    cycle_boxes: tuple[np.ndarray, ...]
    prefix_boxes: tuple[np.ndarray, ...] = ()
    constraints: tuple[AverageConstraint, ...] = ()
    survived_outer: bool = False

    def __post_init__(self) -> None:
        d = self.space.d
        cyc = tuple(_as_box(b, d) for b in self.cycle_boxes)
        pre = tuple(_as_box(b, d) for b in self.prefix_boxes)
        if not cyc:
            raise InvalidDistributionError("box family needs a nonempty cycle")
        object.__setattr__(self, "cycle_boxes", cyc)
        object.__setattr__(self, "prefix_boxes", pre)
        object.__setattr__(self, "constraints", tuple(self.constraints))

    @property
    def prefix_len(self) -> int:
        return len(self.prefix_boxes)

    @property
    def period(self) -> int:
        return len(self.cycle_boxes)

    @property
    def outer_approx(self) -> bool:
        return self.survived_outer

    def box_at(self, i: int) -> np.ndarray:
        """Box of experiment i (1-based)."""
        if i < 1:
            raise InvalidDistributionError(f"experiment index {i} must be >= 1")
        if i <= len(self.prefix_boxes):
            return self.prefix_boxes[i - 1]
        return self.cycle_boxes[(i - len(self.prefix_boxes) - 1) % self.period]

    def contains(self, dgp: IndependentDgp, atol: float = EQUALITY_ATOL) -> bool:
        if dgp.space != self.space:
            return False
        m = max(self.prefix_len, dgp.prefix_len)
        horizon = m + math.lcm(self.period, dgp.period)
        for i in range(1, horizon + 1):
            box = self.box_at(i)
            p = dgp.marginal_at(i).probs
            if np.any(p < box[:, 0] - atol) or np.any(p > box[:, 1] + atol):
                return False
        return _check_constraints(self.constraints, dgp)


@dataclass(frozen=True)
class ExplicitSet(DgpFamily):
    """A finite, nonempty list of DGPs."""

    space: OutcomeSpace
    members: tuple[IndependentDgp, ...]

    def __post_init__(self) -> None:
        members = tuple(self.members)
        if not members:
            raise InvalidDistributionError(
                "explicit set needs at least one member (an empty update result "
                "is a UnionFamily with no branches)")
        for m in members:
            if m.space != self.space:
                raise InvalidDistributionError("member on a different space")
        object.__setattr__(self, "members", members)

    def contains(self, dgp: IndependentDgp, atol: float = EQUALITY_ATOL) -> bool:
        return any(dgps_close(m, dgp, atol) for m in self.members)


@dataclass(frozen=True)
class VertexFamily(DgpFamily):
    """All DGPs whose marginal at experiment i is one of finitely many choices.

    Choice sets follow the prefix + periodic cycle layout.  Used for families
    like "each experiment's success probability is either a or b".
    """

    space: OutcomeSpace
    cycle_choices: tuple[tuple[Marginal, ...], ...]
    prefix_choices: tuple[tuple[Marginal, ...], ...] = ()
    constraints: tuple[AverageConstraint, ...] = ()
    survived_outer: bool = False

    def __post_init__(self) -> None:
        cyc = tuple(tuple(ch) for ch in self.cycle_choices)
        pre = tuple(tuple(ch) for ch in self.prefix_choices)
        if not cyc or any(not ch for ch in cyc) or any(not ch for ch in pre):
            raise InvalidDistributionError("every choice set must be nonempty")
        for ch in (*cyc, *pre):
            for m in ch:
                if m.space != self.space:
                    raise InvalidDistributionError("choice marginal on a different space")
        object.__setattr__(self, "cycle_choices", cyc)
        object.__setattr__(self, "prefix_choices", pre)
        object.__setattr__(self, "constraints", tuple(self.constraints))

    @property
    def prefix_len(self) -> int:
        return len(self.prefix_choices)

    @property
    def period(self) -> int:
        return len(self.cycle_choices)

    @property
    def outer_approx(self) -> bool:
        return self.survived_outer

    def choices_at(self, i: int) -> tuple[Marginal, ...]:
        if i < 1:
            raise InvalidDistributionError(f"experiment index {i} must be >= 1")
        if i <= len(self.prefix_choices):
            return self.prefix_choices[i - 1]
        return self.cycle_choices[(i - len(self.prefix_choices) - 1) % self.period]

    def contains(self, dgp: IndependentDgp, atol: float = EQUALITY_ATOL) -> bool:
        if dgp.space != self.space:
            return False
        m = max(self.prefix_len, dgp.prefix_len)
        horizon = m + math.lcm(self.period, dgp.period)
        for i in range(1, horizon + 1):
            p = dgp.marginal_at(i)
            if not any(marginals_close(c, p, atol) for c in self.choices_at(i)):
                return False
        return _check_constraints(self.constraints, dgp)


@dataclass(frozen=True)
class UnionFamily(DgpFamily):
    """Finite union of families.  Zero branches = the empty family."""

    space: OutcomeSpace
    members: tuple[DgpFamily, ...] = field(default=())

    def __post_init__(self) -> None:
        members = tuple(self.members)
        for b in members:
            if b.space != self.space:
                raise InvalidDistributionError("union branch on a different space")
        object.__setattr__(self, "members", members)

    @property
    def is_empty(self) -> bool:
        return all(b.is_empty for b in self.members)

    @property
    def outer_approx(self) -> bool:
        return any(b.outer_approx for b in self.members)

    def contains(self, dgp: IndependentDgp, atol: float = EQUALITY_ATOL) -> bool:
        return any(b.contains(dgp, atol) for b in self.members)

    def branches(self) -> Iterator[DgpFamily]:
        for b in self.members:
            yield from b.branches()


def family_contains(family: DgpFamily, dgp: IndependentDgp,
                    atol: float = EQUALITY_ATOL) -> bool:
    """Exact membership test, constraints included."""
    return family.contains(dgp, atol)


# ======================================================================
# JSON serialization
# ======================================================================

def space_to_json(space: OutcomeSpace) -> list[str]:
    return list(space.labels)


def space_from_json(obj: Sequence[str]) -> OutcomeSpace:
    return OutcomeSpace(tuple(obj))


def dgp_to_json(dgp: IndependentDgp) -> dict:
    out: dict = {"prefix": [m.probs.tolist() for m in dgp.prefix]}
    if isinstance(dgp.tail, IidTail):
        out["tail"] = {"iid": dgp.tail.marginal.probs.tolist()}
    else:
        out["tail"] = {"periodic": [m.probs.tolist() for m in dgp.tail.cycle]}
    return out


def dgp_from_json(space: OutcomeSpace, obj: dict) -> IndependentDgp:
    prefix = tuple(marginal(space, p) for p in obj.get("prefix", []))
    tail_obj = obj["tail"]
    if "iid" in tail_obj:
        tail: IidTail | PeriodicTail = IidTail(marginal(space, tail_obj["iid"]))
    elif "periodic" in tail_obj:
        tail = PeriodicTail(tuple(marginal(space, p) for p in tail_obj["periodic"]))
    else:
        raise InvalidDistributionError("tail must be {'iid': ...} or {'periodic': ...}")
    return IndependentDgp(space, prefix, tail)


def family_to_json(family: DgpFamily) -> dict:
    """Serialize the base geometry.  Recorded constraints are runtime artifacts
    of an update and are intentionally not serialized."""
    if isinstance(family, BoxFamily):
        return {"box": {
            "prefix": [b.tolist() for b in family.prefix_boxes],
            "cycle": [b.tolist() for b in family.cycle_boxes],
        }}
    if isinstance(family, ExplicitSet):
        return {"explicit": [dgp_to_json(m) for m in family.members]}
    if isinstance(family, VertexFamily):
        return {"vertex": {
            "prefix": [[m.probs.tolist() for m in ch] for ch in family.prefix_choices],
            "cycle": [[m.probs.tolist() for m in ch] for ch in family.cycle_choices],
        }}
    if isinstance(family, UnionFamily):
        return {"union": [family_to_json(b) for b in family.members]}
    raise InvalidDistributionError(f"cannot serialize family type {type(family)!r}")


def family_from_json(space: OutcomeSpace, obj: dict) -> DgpFamily:
    if "box" in obj:
        spec = obj["box"]
        return BoxFamily(space,
                         cycle_boxes=tuple(np.asarray(b, float) for b in spec["cycle"]),
                         prefix_boxes=tuple(np.asarray(b, float)
                                            for b in spec.get("prefix", [])))
    if "explicit" in obj:
        return ExplicitSet(space, tuple(dgp_from_json(space, m) for m in obj["explicit"]))
    if "vertex" in obj:
        spec = obj["vertex"]
        return VertexFamily(
            space,
            cycle_choices=tuple(tuple(marginal(space, p) for p in ch)
                                for ch in spec["cycle"]),
            prefix_choices=tuple(tuple(marginal(space, p) for p in ch)
                                 for ch in spec.get("prefix", [])))
    if "union" in obj:
        return UnionFamily(space, tuple(family_from_json(space, b) for b in obj["union"]))
    raise InvalidDistributionError(
        "family must be one of {'box': ...}, {'explicit': ...}, "
        "{'vertex': ...}, {'union': ...}")
