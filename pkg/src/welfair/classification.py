"""Supervised classification problems as finite decision problems.

Three adapters live here:

- ``slcp_to_fdmp``: the textbook static case (the target is not influenced
  by the prediction).  Welfare is the prediction itself, cost is the loss,
  tau = 1 and rho = 0, and the decision space is every classifier over the
  population's distinct (x, group) inputs.  Qualification has a closed
  form -- an individual is qualified iff predicting 1 for them is costless
  -- so the exponentially large classifier space never needs enumerating.

- Principal-strata populations for prediction-influenced outcomes (the
  observed target depends on the decision).  Each individual's stratum
  fixes their counterfactual outcome under either decision, which makes
  qualification decision-independent and closes the self-fulfilling
  prophecy loophole that observed-outcome metrics permit.

- A prediction-table pipeline that consumes externally produced
  predictions (CSV rows of features, target, group, prediction) and audits
  them under a configurable cost matrix; model training stays outside this
  toolkit.
"""

from __future__ import annotations

import csv
import enum
import itertools
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Callable, Iterable, Mapping

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
from .errors import SupportTooLarge, UnknownAlgorithm
from .metrics import FairnessVerdict, build_verdict, probability_clause


class Tabled:
    """Sentinel algorithm handle: use each individual's recorded decision."""

    def __repr__(self) -> str:  # pragma: no cover
        return "TABLED"


TABLED = Tabled()

# A classifier maps (features, group) to a binary prediction.
Classifier = Callable[[Any, int], int]


@dataclass(frozen=True)
class LabeledCase:
    """Individual attrs for classification: features, target, optional recorded prediction."""

    x: Any
    y: int
    yhat: int | None = None


def zero_one_loss(y: int, yhat: int) -> float:
    return 0.0 if y == yhat else 1.0


def german_credit_cost(y: int, yhat: int) -> float:
    """Loan-decision payoff: 0 for a correct prediction, 1 for a rejected
    good-risk applicant, 5 for a granted loan that defaults."""
    if yhat == y:
        return 0.0
    if yhat == 0 and y == 1:
        return 1.0
    return 5.0


@dataclass(frozen=True)
class Slcp:
    """A supervised classification problem over a finite weighted population.

    Population attrs must be :class:`LabeledCase`; the loss maps
    (target, prediction) to a real number and defaults to zero-one loss.
    """

    population: Population
    loss: Callable[[int, int], float] = zero_one_loss


def decide(individual: Individual, algorithm: Any) -> int:
    """Resolve an algorithm handle to this individual's binary prediction."""
    if algorithm is TABLED or isinstance(algorithm, Tabled):
        yhat = individual.attrs.yhat
        if yhat is None:
            raise UnknownAlgorithm("individual carries no recorded prediction")
        return int(yhat)
    if isinstance(algorithm, Mapping):
        return int(algorithm[(individual.attrs.x, individual.group)])
    if callable(algorithm):
        return int(algorithm(individual.attrs.x, individual.group))
    raise UnknownAlgorithm(f"cannot interpret algorithm handle {algorithm!r}")


def _distinct_inputs(population: Population) -> tuple[tuple[Any, int], ...]:
    seen: dict[tuple[Any, int], None] = {}
    for ind, _ in population.entries:
        seen.setdefault((ind.attrs.x, ind.group), None)
    return tuple(seen)


def _classifier_space(
    population: Population, enumeration_cap: int
) -> DecisionSpace:
    """Every deterministic classifier over the distinct (x, group) support.

    Enumeration yields prediction tables (mappings keyed by (x, group)) in
    lexicographic order; iterating a space larger than the cap raises
    :class:`SupportTooLarge`.  Membership accepts any callable, any table
    covering the support with binary values, and the TABLED sentinel.
    """
    support = _distinct_inputs(population)
    size = 2 ** len(support)

    def generate() -> Iterable[Mapping[tuple[Any, int], int]]:
        for bits in itertools.product((0, 1), repeat=len(support)):
            yield dict(zip(support, bits))

    def membership(m: Any) -> bool:
        if m is TABLED or isinstance(m, Tabled):
            return True
        if isinstance(m, Mapping):
            return all(key in m and m[key] in (0, 1) for key in support)
        return callable(m)

    return DecisionSpace(
        generate=generate,
        size=size,
        enumeration_cap=enumeration_cap,
        membership=membership,
        overflow=SupportTooLarge,
    )


def slcp_to_fdmp(slcp: Slcp, enumeration_cap: int = DEFAULT_ENUMERATION_CAP) -> Fdmp:
    """Instantiate the static classification case as a decision problem.

    Welfare is the prediction, cost is the loss, tau = 1 and rho = 0.
    Qualification is closed-form: predicting positive must be achievable at
    zero cost, i.e. loss(y, 1) <= 0 (equivalently y == 1 under zero-one
    loss), so the 2**n classifier space is never enumerated for it.
    """
    loss = slcp.loss

    def welfare(ind: Individual, m: Any) -> float:
        return float(decide(ind, m))

    def cost(ind: Individual, m: Any) -> float:
        return float(loss(ind.attrs.y, decide(ind, m)))

    return Fdmp(
        population=slcp.population,
        decisions=_classifier_space(slcp.population, enumeration_cap),
        utilities=UtilityModel(welfare=welfare, cost=cost),
        thresholds=Thresholds(tau=1.0, rho=0.0),
        qualification_fn=lambda ind: 1 if loss(ind.attrs.y, 1) <= 0.0 else 0,
    )


def classic_dem_par(
    slcp: Slcp, clf: Any, *, epsilon: float = DEFAULT_EPSILON
) -> FairnessVerdict:
    """Equal positive-prediction rates P(prediction = 1 | group) across groups."""
    clause = probability_clause(slcp.population, lambda ind: decide(ind, clf) == 1)
    return build_verdict("dem_par_clf", [clause], epsilon)


def classic_eq_opp(
    slcp: Slcp, clf: Any, *, epsilon: float = DEFAULT_EPSILON
) -> FairnessVerdict:
    """Equal true-positive rates P(prediction = 1 | y = 1, group) across groups.

    Conditions on the *observed* target, so on prediction-influenced
    populations the qualified set shifts with the audited decisions.
    """
    clause = probability_clause(
        slcp.population,
        lambda ind: decide(ind, clf) == 1,
        lambda ind: ind.attrs.y == 1,
        label="observed y=1",
    )
    return build_verdict("eq_opp_clf", [clause], epsilon)


# ---------------------------------------------------------------------------
# Principal strata for prediction-influenced outcomes
# ---------------------------------------------------------------------------

DETAIN = "detain"
RELEASE = "release"
DECISIONS = (DETAIN, RELEASE)


class Stratum(enum.Enum):
    """Counterfactual-outcome classes for the detain/release setting.

    Each stratum fixes whether the individual recidivates under either
    decision; the observed target y = 1 means "did not recidivate".
    """

    DANGEROUS = "Dangerous"      # recidivates under both decisions
    BACKLASH = "Backlash"        # recidivates only if detained
    PREVENTABLE = "Preventable"  # recidivates only if released
    SAFE = "Safe"                # never recidivates

    @property
    def recidivate_if_detained(self) -> bool:
        return self in (Stratum.DANGEROUS, Stratum.BACKLASH)

    @property
    def recidivate_if_released(self) -> bool:
        return self in (Stratum.DANGEROUS, Stratum.PREVENTABLE)

    def recidivates(self, decision: str) -> bool:
        if decision == DETAIN:
            return self.recidivate_if_detained
        if decision == RELEASE:
            return self.recidivate_if_released
        raise ValueError(f"unknown decision {decision!r}")

    @classmethod
    def from_outcomes(cls, recidivate_if_detained: bool, recidivate_if_released: bool) -> "Stratum":
        for stratum in cls:
            if (
                stratum.recidivate_if_detained == recidivate_if_detained
                and stratum.recidivate_if_released == recidivate_if_released
            ):
                return stratum
        raise AssertionError("unreachable: the four strata cover all outcome pairs")


def strata_outcome(stratum: Stratum, decision: str) -> tuple[int, float, float]:
    """(observed_y, welfare, cost) for an individual of ``stratum`` under ``decision``.

    Welfare is 1 iff released; cost is 1 iff the stratum recidivates under
    that decision; the observed target is 1 iff there is no recidivism.
    """
    recid = stratum.recidivates(decision)
    welfare = 1.0 if decision == RELEASE else 0.0
    cost = 1.0 if recid else 0.0
    return (0 if recid else 1), welfare, cost


@dataclass(frozen=True)
class StrataCase:
    """Individual attrs for strata populations: stratum plus the recorded decision."""

    stratum: Stratum
    decision: str

    @property
    def y(self) -> int:
        return strata_outcome(self.stratum, self.decision)[0]


@dataclass(frozen=True)
class StrataPopulation:
    """Counts per (stratum, group, recorded decision)."""

    counts: tuple[tuple[Stratum, int, str, float], ...]

    def __post_init__(self) -> None:
        total = 0.0
        for stratum, group, decision, count in self.counts:
            if decision not in DECISIONS:
                raise ValueError(f"unknown decision {decision!r}")
            if count < 0:
                raise ValueError("counts must be non-negative")
            if group < 0:
                raise ValueError("group ids must be non-negative")
            total += count
        if total <= 0:
            raise ValueError("strata population must have positive total count")

    @classmethod
    def from_mapping(cls, counts: Mapping[tuple[Stratum, int, str], float]) -> "StrataPopulation":
        rows = tuple(
            (stratum, group, decision, float(count))
            for (stratum, group, decision), count in counts.items()
        )
        return cls(counts=rows)

    @classmethod
    def from_csv(cls, path: str | Path) -> "StrataPopulation":
        """Load counts from a CSV with header stratum,group,decision,count."""
        rows = []
        with open(path, newline="", encoding="utf-8") as fh:
            reader = csv.DictReader(fh)
            required = {"stratum", "group", "decision", "count"}
            if reader.fieldnames is None or not required.issubset(reader.fieldnames):
                raise ValueError(f"strata CSV must have columns {sorted(required)}")
            for row in reader:
                rows.append(
                    (
                        Stratum(row["stratum"]),
                        int(row["group"]),
                        row["decision"],
                        float(row["count"]),
                    )
                )
        return cls(counts=tuple(rows))

    def to_population(self) -> Population:
        entries = tuple(
            (Individual(attrs=StrataCase(stratum=s, decision=d), group=g), count)
            for s, g, d, count in self.counts
        )
        return Population.from_pairs(entries)


def _strata_decision(individual: Individual, algorithm: Any) -> str:
    if algorithm is TABLED or isinstance(algorithm, Tabled):
        return individual.attrs.decision
    if algorithm in DECISIONS:
        return algorithm
    if callable(algorithm):
        return algorithm(individual.attrs, individual.group)
    raise UnknownAlgorithm(f"cannot interpret decision rule {algorithm!r}")


def strata_to_fdmp(pop: StrataPopulation, tau: float = 1.0, rho: float = 0.0) -> Fdmp:
    """Decision problem over a strata population.

    The decision space holds the two constant rules plus the recorded
    (tabled) rule; per-individual welfare and cost depend only on that
    individual's own decision, so the constants suffice for qualification.
    At tau = 1 and rho = 0, exactly the strata that do not recidivate when
    released qualify.
    """

    def welfare(ind: Individual, m: Any) -> float:
        return strata_outcome(ind.attrs.stratum, _strata_decision(ind, m))[1]

    def cost(ind: Individual, m: Any) -> float:
        return strata_outcome(ind.attrs.stratum, _strata_decision(ind, m))[2]

    return Fdmp(
        population=pop.to_population(),
        decisions=DecisionSpace.of(DETAIN, RELEASE, TABLED),
        utilities=UtilityModel(welfare=welfare, cost=cost),
        thresholds=Thresholds(tau=tau, rho=rho),
    )


def strata_to_slcp(pop: StrataPopulation) -> Slcp:
    """Observed-outcome view of a strata population for the classic metrics.

    The observed target follows the strata rules: an individual counts as
    y = 1 exactly when their stratum does not recidivate under their
    recorded decision.
    """
    entries = []
    for stratum, group, decision, count in pop.counts:
        y, _, _ = strata_outcome(stratum, decision)
        yhat = 1 if decision == RELEASE else 0
        case = LabeledCase(x=(stratum.value, decision), y=y, yhat=yhat)
        entries.append((Individual(attrs=case, group=group), count))
    return Slcp(population=Population.from_pairs(entries))


def principal_fairness(
    pop: StrataPopulation, decisions: Any = TABLED, *, epsilon: float = DEFAULT_EPSILON
) -> FairnessVerdict:
    """Equal release rates within every principal stratum, across groups.

    One comparison per stratum; all must hold.  Empty strata are skipped
    with a diagnostic.
    """
    population = pop.to_population()

    def released(ind: Individual) -> bool:
        return _strata_decision(ind, decisions) == RELEASE

    clauses = []
    for stratum in Stratum:
        clauses.append(
            probability_clause(
                population,
                released,
                lambda ind, s=stratum: ind.attrs.stratum is s,
                label=stratum.value,
            )
        )
    return build_verdict("principal_fairness", clauses, epsilon)


# ---------------------------------------------------------------------------
# Externally produced predictions (e.g. the German Credit pipeline)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PredictionRow:
    """One audited prediction: features, observed target, group, prediction, weight."""

    x: tuple
    y: int
    z: int
    yhat: int
    weight: float = 1.0


def prediction_rows_from_csv(path: str | Path) -> tuple[PredictionRow, ...]:
    """Read prediction rows from a CSV.

    The header must contain ``y``, ``z``, ``yhat`` and may contain
    ``weight`` (default 1); every other column is treated as a feature, in
    header order.
    """
    rows = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        fields = reader.fieldnames or []
        required = {"y", "z", "yhat"}
        if not required.issubset(fields):
            raise ValueError(f"prediction CSV must have columns {sorted(required)}")
        feature_cols = [c for c in fields if c not in required and c != "weight"]
        for row in reader:
            rows.append(
                PredictionRow(
                    x=tuple(row[c] for c in feature_cols),
                    y=int(row["y"]),
                    z=int(row["z"]),
                    yhat=int(row["yhat"]),
                    weight=float(row.get("weight") or 1.0),
                )
            )
    return tuple(rows)


def predictions_to_fdmp(
    rows: Iterable[PredictionRow],
    cost_fn: Callable[[int, int], float] = german_credit_cost,
    tau: float = -1.0,
    rho: float = 0.0,
    enumeration_cap: int = DEFAULT_ENUMERATION_CAP,
) -> Fdmp:
    """Audit a fixed prediction table under a cost matrix.

    Welfare is the negative cost (the applicant and the decision-maker
    share incentives here); the default tau = -1 counts every outcome
    short of a default as good.  The audited algorithm is ``TABLED``.
    Qualification is closed-form because only the individual's own
    prediction matters: some binary prediction must reach both thresholds.
    """
    entries = tuple(
        (Individual(attrs=LabeledCase(x=r.x, y=r.y, yhat=r.yhat), group=r.z), r.weight)
        for r in rows
    )
    population = Population.from_pairs(entries)

    def welfare(ind: Individual, m: Any) -> float:
        return -cost_fn(ind.attrs.y, decide(ind, m))

    def cost(ind: Individual, m: Any) -> float:
        return float(cost_fn(ind.attrs.y, decide(ind, m)))

    def qualified(ind: Individual) -> int:
        for yhat in (0, 1):
            c = cost_fn(ind.attrs.y, yhat)
            if -c >= tau and c <= rho:
                return 1
        return 0

    return Fdmp(
        population=population,
        decisions=_classifier_space(population, enumeration_cap),
        utilities=UtilityModel(welfare=welfare, cost=cost),
        thresholds=Thresholds(tau=tau, rho=rho),
        qualification_fn=qualified,
    )
