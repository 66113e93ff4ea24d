"""Clustering assignments as decision problems with conjoined welfare.

A cluster assignment is a single decision affecting everyone at once: an
individual's welfare depends on which other individuals share their
cluster.  Two welfare notions are provided.  *Balanced* welfare is the
own-group proportion of one's cluster (each individual counts themselves),
so parity at a threshold asks every group to be similarly well represented
inside its members' clusters.  *Representative* welfare scores an
individual's similarity to a summary of their cluster -- by default the
negative Euclidean distance to the member centroid -- which can flag
packed-but-unrepresentative clusterings that balanced welfare cannot see.

The induced decision space is all k**n assignments, so counterfactual
qualification is only available at toy sizes; threshold-parity audits
never enumerate it.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Any, Callable, Iterable, Mapping, Sequence

from .core import (
    DEFAULT_ENUMERATION_CAP,
    DEFAULT_EPSILON,
    DecisionSpace,
    Fdmp,
    Individual,
    Population,
    Thresholds,
    UtilityModel,
)
from .metrics import FairnessVerdict, dem_par_welf

# A similarity function scores an individual's features against a cluster summary.
SimilarityFn = Callable[[Sequence[float], Sequence[float]], float]


@dataclass(frozen=True)
class ClusteringProblem:
    """n individuals (feature vector, group id) to be split into k clusters."""

    points: tuple[tuple[tuple[float, ...], int], ...]
    k: int

    def __post_init__(self) -> None:
        if not self.points:
            raise ValueError("clustering problem needs at least one individual")
        if self.k < 1:
            raise ValueError("cluster count must be >= 1")

    @classmethod
    def from_rows(cls, rows: Iterable[tuple[Sequence[float], int]], k: int) -> "ClusteringProblem":
        return cls(points=tuple((tuple(f), g) for f, g in rows), k=k)

    @property
    def n(self) -> int:
        return len(self.points)


def check_assignment(problem: ClusteringProblem, assignment: Sequence[int]) -> tuple[int, ...]:
    assignment = tuple(assignment)
    if len(assignment) != problem.n:
        raise ValueError(f"assignment length {len(assignment)} != population size {problem.n}")
    if any(not 0 <= c < problem.k for c in assignment):
        raise ValueError(f"cluster ids must lie in [0, {problem.k})")
    return assignment


def balanced_welfare(problem: ClusteringProblem, assignment: Sequence[int], i: int) -> float:
    """Own-group proportion of individual i's cluster (i counts themselves)."""
    assignment = check_assignment(problem, assignment)
    cluster = assignment[i]
    group = problem.points[i][1]
    members = 0
    same_group = 0
    for j, (_, g) in enumerate(problem.points):
        if assignment[j] == cluster:
            members += 1
            if g == group:
                same_group += 1
    return same_group / members


def centroid(members: Sequence[Sequence[float]]) -> tuple[float, ...]:
    dim = len(members[0])
    return tuple(sum(m[d] for m in members) / len(members) for d in range(dim))


def negative_euclidean(features: Sequence[float], summary: Sequence[float]) -> float:
    return -math.dist(features, summary)


def representative_welfare(
    problem: ClusteringProblem,
    assignment: Sequence[int],
    i: int,
    sim: SimilarityFn = negative_euclidean,
    summarize: Callable[[Sequence[Sequence[float]]], Sequence[float]] = centroid,
) -> float:
    """Similarity of individual i to their cluster's summary (default: centroid)."""
    assignment = check_assignment(problem, assignment)
    cluster = assignment[i]
    members = [problem.points[j][0] for j in range(problem.n) if assignment[j] == cluster]
    return float(sim(problem.points[i][0], summarize(members)))


def _welfare_fn(
    problem: ClusteringProblem, welfare: Any, sim: SimilarityFn | None
) -> Callable[[Sequence[int], int], float]:
    if welfare == "balanced":
        return lambda assignment, i: balanced_welfare(problem, assignment, i)
    if welfare == "representative":
        chosen = sim or negative_euclidean
        return lambda assignment, i: representative_welfare(problem, assignment, i, sim=chosen)
    if callable(welfare):
        return lambda assignment, i: float(welfare(problem, assignment, i))
    raise ValueError(f"unknown welfare kind {welfare!r}")


@dataclass(frozen=True)
class ClusterMember:
    """Individual attrs for clustering populations."""

    index: int
    features: tuple[float, ...]


def clustering_to_fdmp(
    problem: ClusteringProblem,
    welfare: Any = "balanced",
    tau: float = 0.5,
    rho: float = 0.0,
    sim: SimilarityFn | None = None,
    enumeration_cap: int = DEFAULT_ENUMERATION_CAP,
) -> Fdmp:
    """Decision problem whose algorithms are the k**n cluster assignments.

    The population is uniform over the individuals.  No decision-maker
    cost is defined for clustering, so the cost function is identically 0
    and qualification reduces to welfare reachability.
    """
    entries = tuple(
        (Individual(attrs=ClusterMember(index=i, features=f), group=g), 1.0)
        for i, (f, g) in enumerate(problem.points)
    )
    population = Population.from_pairs(entries)
    welfare_of = _welfare_fn(problem, welfare, sim)

    def generate():
        for assignment in itertools.product(range(problem.k), repeat=problem.n):
            yield assignment

    def membership(m: Any) -> bool:
        try:
            check_assignment(problem, m)
        except (ValueError, TypeError):
            return False
        return True

    return Fdmp(
        population=population,
        decisions=DecisionSpace(
            generate=generate,
            size=problem.k**problem.n,
            enumeration_cap=enumeration_cap,
            membership=membership,
        ),
        utilities=UtilityModel(
            welfare=lambda ind, m: welfare_of(tuple(m), ind.attrs.index),
            cost=lambda ind, m: 0.0,
        ),
        thresholds=Thresholds(tau=tau, rho=rho),
    )


def clustering_dem_par(
    problem: ClusteringProblem,
    assignment: Sequence[int],
    welfare: Any = "balanced",
    tau: float = 0.5,
    *,
    sim: SimilarityFn | None = None,
    epsilon: float = DEFAULT_EPSILON,
) -> FairnessVerdict:
    """Welfare demographic parity of a cluster assignment.

    Compares P(welfare >= tau | group) under the chosen welfare notion,
    with each individual drawn uniformly from the dataset.
    """
    assignment = check_assignment(problem, assignment)
    fdmp = clustering_to_fdmp(problem, welfare=welfare, tau=tau, sim=sim)
    return dem_par_welf(fdmp, assignment, epsilon=epsilon)
