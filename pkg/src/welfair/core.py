"""Finite decision problems and exact probability computation.

Everything in this toolkit reduces to weighted counting over a finite
population: an audit never estimates, it sums.  This module provides the
shared vocabulary --

- ``Population``: a finite weighted support of ``Individual`` records, each
  tagged with a protected-group id (group 0 is always the reference group
  for pairwise comparisons);
- ``DecisionSpace``: a finite, cap-guarded, deterministically enumerable
  collection of decision-algorithm handles;
- ``UtilityModel``: per-(individual, algorithm) expected welfare and cost;
- ``Thresholds``: the minimum welfare ``tau`` and maximum cost ``rho`` that
  make an outcome "good" for the individual / the decision-maker;
- ``Fdmp``: the bundle of the four, over which every fairness metric in
  :mod:`welfair.metrics` is defined.

Probabilities are computed in double precision with plain left-to-right
summation over the population order; the scenarios this toolkit targets
have at most thousands of support points, so summation error is far below
the default comparison tolerance of 1e-9.

Randomized decision rules are not modeled as stochastic algorithm handles.
Instead an individual type is split into weighted deterministic-outcome
entries, keeping every probability an exact finite sum.  Welfare and cost
are *expectations* per (individual, algorithm); the event "welfare >= tau"
thresholds the expectation.

All types are immutable after construction and safe to share across
threads; the operations are pure functions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Callable, Iterable, Iterator

from .errors import EnumerationCapExceeded, UnknownAlgorithm, ZeroConditionMass

DEFAULT_EPSILON = 1e-9
DEFAULT_ENUMERATION_CAP = 1_000_000

# An event is a pure, total predicate over individuals.  It may close over a
# fixed algorithm and the utility model (e.g. "welfare under m >= tau").
EventPredicate = Callable[["Individual"], bool]


def always(_: "Individual") -> bool:
    """The trivially true event."""
    return True


@dataclass(frozen=True)
class Individual:
    """A population member: opaque non-sensitive attributes plus a group id.

    ``attrs`` must be treated as immutable after construction; adapters in
    this package use frozen dataclasses or plain tuples.
    """

    attrs: Any
    group: int


@dataclass(frozen=True)
class Population:
    """Finite weighted support over individuals.

    Invariants (checked at construction): total weight is positive, every
    entry weight is a finite non-negative real, every group id lies in
    ``range(group_count)``, and at least two groups are declared.
    """

    entries: tuple[tuple[Individual, float], ...]
    group_count: int

    def __post_init__(self) -> None:
        if self.group_count < 2:
            raise ValueError(f"population must declare >= 2 groups, got {self.group_count}")
        total = 0.0
        for ind, weight in self.entries:
            if not math.isfinite(weight) or weight < 0:
                raise ValueError(f"entry weight must be finite and >= 0, got {weight!r}")
            if not 0 <= ind.group < self.group_count:
                raise ValueError(
                    f"group id {ind.group} outside declared range [0, {self.group_count})"
                )
            total += weight
        if total <= 0:
            raise ValueError("population total weight must be positive")

    @classmethod
    def from_pairs(
        cls,
        pairs: Iterable[tuple[Individual, float]],
        group_count: int | None = None,
    ) -> "Population":
        """Build a population, inferring ``group_count`` from the data if omitted."""
        entries = tuple(pairs)
        if group_count is None:
            group_count = max((ind.group for ind, _ in entries), default=0) + 1
            group_count = max(group_count, 2)
        return cls(entries=entries, group_count=group_count)

    def total_mass(self, event: EventPredicate = always) -> float:
        """Left-to-right sum of weights of entries satisfying ``event``."""
        mass = 0.0
        for ind, weight in self.entries:
            if event(ind):
                mass += weight
        return mass

    def group_mass(self, group: int) -> float:
        return self.total_mass(lambda ind: ind.group == group)


@dataclass(frozen=True)
class DecisionSpace:
    """Finite collection of decision-algorithm handles.

    ``generate`` must yield the same elements in the same (deterministic)
    order on every call.  Iteration is guarded by ``enumeration_cap``:
    exceeding it raises ``overflow`` (an :class:`EnumerationCapExceeded`
    subclass) rather than silently truncating.

    ``membership`` recognizes audited algorithm handles without a full
    enumeration; when omitted, membership falls back to an equality scan.
    """

    generate: Callable[[], Iterable[Any]]
    size: int | None = None
    enumeration_cap: int = DEFAULT_ENUMERATION_CAP
    membership: Callable[[Any], bool] | None = None
    overflow: type = field(default=EnumerationCapExceeded)

    def __post_init__(self) -> None:
        if self.size is not None and self.size < 1:
            raise ValueError("decision space must be non-empty")
        if self.enumeration_cap < 1:
            raise ValueError("enumeration cap must be >= 1")

    @classmethod
    def of(cls, *algorithms: Any, enumeration_cap: int = DEFAULT_ENUMERATION_CAP) -> "DecisionSpace":
        """A decision space over an explicit, already-materialized tuple."""
        if not algorithms:
            raise ValueError("decision space must be non-empty")
        items = tuple(algorithms)
        return cls(
            generate=lambda: items,
            size=len(items),
            enumeration_cap=enumeration_cap,
            membership=lambda m: any(m is a or m == a for a in items),
        )

    def __iter__(self) -> Iterator[Any]:
        if self.size is not None and self.size > self.enumeration_cap:
            raise self.overflow(
                f"decision space has {self.size} elements, cap is {self.enumeration_cap}"
            )
        count = 0
        for algorithm in self.generate():
            count += 1
            if count > self.enumeration_cap:
                raise self.overflow(
                    f"decision space exceeded enumeration cap {self.enumeration_cap}"
                )
            yield algorithm

    def contains(self, algorithm: Any) -> bool:
        if self.membership is not None:
            return self.membership(algorithm)
        return any(algorithm is a or algorithm == a for a in self)


@dataclass(frozen=True)
class UtilityModel:
    """Expected welfare and cost per (individual, algorithm).

    Both callables must be deterministic (repeated evaluation of the same
    pair returns the identical value) and return finite reals.
    """

    welfare: Callable[[Individual, Any], float]
    cost: Callable[[Individual, Any], float]


@dataclass(frozen=True)
class Thresholds:
    """Minimum good welfare ``tau`` and maximum good cost ``rho``."""

    tau: float
    rho: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.tau) and math.isfinite(self.rho)):
            raise ValueError("thresholds must be finite")


@dataclass(frozen=True)
class Fdmp:
    """A population bound to a decision space, utilities, and thresholds.

    ``qualification_fn`` is an optional closed-form qualification rule
    supplied by adapters whose decision space is too large to enumerate
    (e.g. all classifiers over a large input support).  When present it
    must agree with exhaustive enumeration; the test suite cross-checks
    this on small instances.
    """

    population: Population
    decisions: DecisionSpace
    utilities: UtilityModel
    thresholds: Thresholds
    qualification_fn: Callable[[Individual], int] | None = None


def conditional_probability(
    pop: Population, event: EventPredicate, cond: EventPredicate
) -> float:
    """Exact P(event | cond) over the weighted population.

    Returns (sum of weights where event and cond) / (sum of weights where
    cond), both accumulated left-to-right in population order.

    Raises:
        ZeroConditionMass: the conditioning set has zero weight.
    """
    event_mass = 0.0
    cond_mass = 0.0
    for ind, weight in pop.entries:
        if cond(ind):
            cond_mass += weight
            if event(ind):
                event_mass += weight
    if cond_mass <= 0.0:
        raise ZeroConditionMass("conditioning set has zero weight")
    return event_mass / cond_mass


def welfare_of(fdmp: Fdmp, algorithm: Any, individual: Individual) -> float:
    """Expected welfare of ``individual`` under ``algorithm``.

    Raises:
        UnknownAlgorithm: ``algorithm`` is not in the decision space.
    """
    if not fdmp.decisions.contains(algorithm):
        raise UnknownAlgorithm(f"algorithm {algorithm!r} is not in the decision space")
    return float(fdmp.utilities.welfare(individual, algorithm))


def cost_of(fdmp: Fdmp, algorithm: Any, individual: Individual) -> float:
    """Expected cost of ``individual`` under ``algorithm``.

    Raises:
        UnknownAlgorithm: ``algorithm`` is not in the decision space.
    """
    if not fdmp.decisions.contains(algorithm):
        raise UnknownAlgorithm(f"algorithm {algorithm!r} is not in the decision space")
    return float(fdmp.utilities.cost(individual, algorithm))


def qualification(fdmp: Fdmp, individual: Individual) -> int:
    """1 iff some algorithm achieves welfare >= tau and cost <= rho for this individual.

    Quantifies over the whole decision space, independently of whichever
    algorithm is being audited.  Uses the adapter-supplied closed form when
    available, otherwise exhausts the decision space.

    Raises:
        EnumerationCapExceeded: the decision space exceeds its cap.
    """
    if fdmp.qualification_fn is not None:
        return 1 if fdmp.qualification_fn(individual) else 0
    tau = fdmp.thresholds.tau
    rho = fdmp.thresholds.rho
    welfare = fdmp.utilities.welfare
    cost = fdmp.utilities.cost
    for algorithm in fdmp.decisions:
        if welfare(individual, algorithm) >= tau and cost(individual, algorithm) <= rho:
            return 1
    return 0
