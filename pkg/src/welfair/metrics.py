"""Group-fairness verdicts over finite decision problems.

Every metric here has the same shape: a per-group statistic (usually a
conditional probability of clearing the welfare threshold, sometimes an
expectation or a ratio of probabilities) is computed exactly for each
group and compared against group 0.  A metric is *satisfied* when every
comparison agrees within an absolute tolerance ``epsilon``.

Vacuous strata: when a conditioning set is empty in some group the
comparison cannot be evaluated.  Such comparisons are skipped, the verdict
is flagged ``vacuous``, and a diagnostic names the empty stratum.  A
verdict whose comparisons were all skipped reports ``satisfied=True`` with
``vacuous=True`` -- auditors must read the warning, not a fabricated
number.

Besides the binary ``satisfied`` flag each verdict carries the largest
absolute difference and the smallest pairwise min-ratio so callers can
quantify the degree of unfairness on a continuous scale.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Any, Callable, Iterable, Mapping, Sequence

from .core import (
    DEFAULT_EPSILON,
    EventPredicate,
    Fdmp,
    Individual,
    Population,
    always,
    conditional_probability,
    qualification,
)
from .errors import UnknownAlgorithm, WelfairError


@dataclass(frozen=True)
class GroupStats:
    """Per-group side of one comparison.

    ``statistic`` is the group's left-hand-side value: a probability in
    [0, 1] for probabilistic metrics, an expectation for expected-welfare
    comparisons, or a false-negative/false-positive ratio for treatment
    equality.  It is ``None`` exactly when ``support_mass`` is zero (the
    stratum is empty for this group).  ``label`` tags the clause for
    metrics comprising several comparisons.
    """

    group: int
    statistic: float | None
    support_mass: float
    label: str = ""


@dataclass(frozen=True)
class FairnessVerdict:
    """Outcome of evaluating one fairness metric.

    ``satisfied`` holds iff every evaluated (non-vacuous) comparison
    against group 0 has absolute difference <= epsilon; a verdict with no
    evaluable comparison at all is satisfied *and* vacuous.
    ``max_abs_difference`` is infinite when a ratio comparison diverged.
    """

    metric: str
    per_group: tuple[GroupStats, ...]
    max_abs_difference: float
    min_ratio: float | None
    satisfied: bool
    vacuous: bool
    diagnostics: tuple[str, ...] = ()


@dataclass(frozen=True)
class MetricSpec:
    """A metric identifier plus the parameters it requires.

    ``conditional_dem_par`` needs a legitimate-attribute predicate
    (``legit``, optional ``value``); ``eq_opp_mdp_static`` needs ``alpha``
    and a per-individual qualification score extractor ``p0``.
    """

    kind: str
    params: Mapping[str, Any] = None  # type: ignore[assignment]

    def __post_init__(self) -> None:
        object.__setattr__(self, "params", dict(self.params or {}))


@dataclass(frozen=True)
class Clause:
    """One labeled family of per-group statistics, compared against group 0."""

    label: str
    stats: tuple[GroupStats, ...]
    diagnostics: tuple[str, ...] = ()


def min_ratio(a: float, b: float) -> float | None:
    """min(a/b, b/a) with the conventions used throughout this module.

    Equal values (including 0 == 0) give exactly 1.0; a zero on one side
    only gives 0.0; negative values make the ratio meaningless and give
    ``None``.
    """
    if a == b:
        return 1.0
    if a < 0 or b < 0:
        return None
    if a == 0 or b == 0:
        return 0.0
    return min(a / b, b / a)


def probability_clause(
    pop: Population,
    event: EventPredicate,
    cond: EventPredicate = always,
    label: str = "",
) -> Clause:
    """Per-group P(event | cond, group) with empty strata marked vacuous."""
    stats = []
    diags = []
    for z in range(pop.group_count):
        def in_stratum(ind: Individual, z: int = z) -> bool:
            return ind.group == z and cond(ind)

        mass = pop.total_mass(in_stratum)
        if mass <= 0.0:
            stats.append(GroupStats(group=z, statistic=None, support_mass=0.0, label=label))
            suffix = f" [{label}]" if label else ""
            diags.append(f"group {z}: empty conditioning set{suffix}")
        else:
            p = conditional_probability(pop, event, in_stratum)
            stats.append(GroupStats(group=z, statistic=p, support_mass=mass, label=label))
    return Clause(label=label, stats=tuple(stats), diagnostics=tuple(diags))


def expectation_clause(
    pop: Population,
    value: Callable[[Individual], float],
    cond: EventPredicate = always,
    label: str = "",
) -> Clause:
    """Per-group E[value | cond, group] with empty strata marked vacuous."""
    stats = []
    diags = []
    for z in range(pop.group_count):
        mass = 0.0
        weighted = 0.0
        for ind, weight in pop.entries:
            if ind.group == z and cond(ind):
                mass += weight
                weighted += weight * value(ind)
        if mass <= 0.0:
            stats.append(GroupStats(group=z, statistic=None, support_mass=0.0, label=label))
            suffix = f" [{label}]" if label else ""
            diags.append(f"group {z}: empty conditioning set{suffix}")
        else:
            stats.append(
                GroupStats(group=z, statistic=weighted / mass, support_mass=mass, label=label)
            )
    return Clause(label=label, stats=tuple(stats), diagnostics=tuple(diags))


def build_verdict(
    metric: str,
    clauses: Sequence[Clause],
    epsilon: float = DEFAULT_EPSILON,
    extra_diagnostics: Iterable[str] = (),
) -> FairnessVerdict:
    """Combine clauses into a verdict: every group-z-vs-group-0 comparison must hold."""
    per_group: list[GroupStats] = []
    diagnostics: list[str] = list(extra_diagnostics)
    differences: list[float] = []
    ratios: list[float] = []
    satisfied = True
    vacuous = False
    compared = False
    for clause in clauses:
        per_group.extend(clause.stats)
        diagnostics.extend(clause.diagnostics)
        base = clause.stats[0]
        for gs in clause.stats[1:]:
            if base.statistic is None or gs.statistic is None:
                vacuous = True
                continue
            compared = True
            diff = abs(gs.statistic - base.statistic)
            differences.append(diff)
            ratio = min_ratio(base.statistic, gs.statistic)
            if ratio is not None:
                ratios.append(ratio)
            if diff > epsilon:
                satisfied = False
                suffix = f" [{clause.label}]" if clause.label else ""
                diagnostics.append(
                    f"{metric}: group {gs.group} vs group 0{suffix}: "
                    f"|{gs.statistic:.6g} - {base.statistic:.6g}| = {diff:.6g} > {epsilon:g}"
                )
    if not compared:
        vacuous = True
    return FairnessVerdict(
        metric=metric,
        per_group=tuple(per_group),
        max_abs_difference=max(differences, default=0.0),
        min_ratio=min(ratios) if ratios else None,
        satisfied=satisfied,
        vacuous=vacuous,
        diagnostics=tuple(diagnostics),
    )


def ensure_member(fdmp: Fdmp, algorithm: Any) -> None:
    """Reject algorithms outside the decision space before evaluating a metric."""
    if not fdmp.decisions.contains(algorithm):
        raise UnknownAlgorithm(f"audited algorithm {algorithm!r} is not in the decision space")


def _welfare_fn(fdmp: Fdmp, m: Any) -> Callable[[Individual], float]:
    welfare = fdmp.utilities.welfare
    return lambda ind: float(welfare(ind, m))


def _meets_tau(fdmp: Fdmp, m: Any) -> EventPredicate:
    tau = fdmp.thresholds.tau
    welfare = fdmp.utilities.welfare
    return lambda ind: float(welfare(ind, m)) >= tau


def _below_tau(fdmp: Fdmp, m: Any) -> EventPredicate:
    tau = fdmp.thresholds.tau
    welfare = fdmp.utilities.welfare
    return lambda ind: float(welfare(ind, m)) < tau


def _qualified_event(fdmp: Fdmp) -> EventPredicate:
    # Qualification quantifies over the whole decision space, so compute it
    # once per distinct entry object instead of once per event evaluation.
    by_identity: dict[int, int] = {}
    for ind, _ in fdmp.population.entries:
        if id(ind) not in by_identity:
            by_identity[id(ind)] = qualification(fdmp, ind)
    return lambda ind: by_identity[id(ind)] == 1


def _negate(event: EventPredicate) -> EventPredicate:
    return lambda ind: not event(ind)


def _conjoin(a: EventPredicate, b: EventPredicate) -> EventPredicate:
    return lambda ind: a(ind) and b(ind)


# ---------------------------------------------------------------------------
# Threshold-welfare parity and counterfactual-qualification metrics
# ---------------------------------------------------------------------------


def dem_par_welf(fdmp: Fdmp, m: Any, *, epsilon: float = DEFAULT_EPSILON) -> FairnessVerdict:
    """Welfare demographic parity: equal P(welfare >= tau) across groups."""
    ensure_member(fdmp, m)
    clause = probability_clause(fdmp.population, _meets_tau(fdmp, m))
    return build_verdict("dem_par_welf", [clause], epsilon)


def eq_opp_cf_util(fdmp: Fdmp, m: Any, *, epsilon: float = DEFAULT_EPSILON) -> FairnessVerdict:
    """Counterfactual-utility equal opportunity.

    Compares P(welfare >= tau | qualified) across groups, where "qualified"
    means some algorithm in the decision space could have produced a good
    outcome for both sides (welfare >= tau and cost <= rho).  Unlike
    observed-outcome equal opportunity, the qualified set does not depend
    on the audited algorithm, which closes the self-fulfilling-prophecy
    loophole.
    """
    ensure_member(fdmp, m)
    qualified = _qualified_event(fdmp)
    clause = probability_clause(fdmp.population, _meets_tau(fdmp, m), qualified, label="qualified")
    return build_verdict("eq_opp_cf_util", [clause], epsilon)


def equalized_odds_cf_util(
    fdmp: Fdmp, m: Any, *, epsilon: float = DEFAULT_EPSILON
) -> FairnessVerdict:
    """Equal threshold-welfare rates within both the qualified and unqualified strata."""
    ensure_member(fdmp, m)
    meets = _meets_tau(fdmp, m)
    qualified = _qualified_event(fdmp)
    pop = fdmp.population
    clauses = [
        probability_clause(pop, meets, qualified, label="qualified"),
        probability_clause(pop, meets, _negate(qualified), label="unqualified"),
    ]
    return build_verdict("equalized_odds_cf_util", clauses, epsilon)


def predictive_parity_cf_util(
    fdmp: Fdmp, m: Any, *, epsilon: float = DEFAULT_EPSILON
) -> FairnessVerdict:
    """Equal P(qualified | welfare >= tau) across groups (inverse of equal opportunity)."""
    ensure_member(fdmp, m)
    qualified = _qualified_event(fdmp)
    clause = probability_clause(
        fdmp.population, qualified, _meets_tau(fdmp, m), label="welfare>=tau"
    )
    return build_verdict("predictive_parity_cf_util", [clause], epsilon)


def conditional_dem_par(
    fdmp: Fdmp,
    m: Any,
    legit: Callable[[Individual], Any],
    value: Any = True,
    *,
    epsilon: float = DEFAULT_EPSILON,
) -> FairnessVerdict:
    """Welfare demographic parity restricted to individuals where legit(ind) == value.

    ``legit`` is an arbitrary pure function of the individual; with the
    default ``value=True`` it acts as a plain predicate selecting the
    stratum in which the legitimate attribute is allowed to explain the
    outcome.
    """
    ensure_member(fdmp, m)
    clause = probability_clause(
        fdmp.population,
        _meets_tau(fdmp, m),
        lambda ind: legit(ind) == value,
        label="legitimate stratum",
    )
    return build_verdict("conditional_dem_par", [clause], epsilon)


def predictive_equality_cf_util(
    fdmp: Fdmp, m: Any, *, epsilon: float = DEFAULT_EPSILON
) -> FairnessVerdict:
    """Equal P(welfare >= tau | unqualified) across groups."""
    ensure_member(fdmp, m)
    qualified = _qualified_event(fdmp)
    clause = probability_clause(
        fdmp.population, _meets_tau(fdmp, m), _negate(qualified), label="unqualified"
    )
    return build_verdict("predictive_equality_cf_util", [clause], epsilon)


def conditional_use_accuracy_cf_util(
    fdmp: Fdmp, m: Any, *, epsilon: float = DEFAULT_EPSILON
) -> FairnessVerdict:
    """Equal P(qualified | welfare >= tau) and P(unqualified | welfare < tau) across groups."""
    ensure_member(fdmp, m)
    qualified = _qualified_event(fdmp)
    pop = fdmp.population
    clauses = [
        probability_clause(pop, qualified, _meets_tau(fdmp, m), label="welfare>=tau"),
        probability_clause(pop, _negate(qualified), _below_tau(fdmp, m), label="welfare<tau"),
    ]
    return build_verdict("conditional_use_accuracy_cf_util", clauses, epsilon)


def overall_accuracy_cf_util(
    fdmp: Fdmp, m: Any, *, epsilon: float = DEFAULT_EPSILON
) -> FairnessVerdict:
    """Equal within-group joint rates of (welfare >= tau, qualified) and (welfare < tau, unqualified).

    The joint events are normalized within each group, i.e. compared as
    P(event | group).
    """
    ensure_member(fdmp, m)
    qualified = _qualified_event(fdmp)
    pop = fdmp.population
    clauses = [
        probability_clause(
            pop, _conjoin(_meets_tau(fdmp, m), qualified), label="good outcome, qualified"
        ),
        probability_clause(
            pop,
            _conjoin(_below_tau(fdmp, m), _negate(qualified)),
            label="bad outcome, unqualified",
        ),
    ]
    return build_verdict("overall_accuracy_cf_util", clauses, epsilon)


def treatment_equality_cf_util(
    fdmp: Fdmp, m: Any, *, epsilon: float = DEFAULT_EPSILON
) -> FairnessVerdict:
    """Equal ratio P(welfare < tau | qualified) / P(welfare >= tau | unqualified) across groups.

    The ratio's denominator can legitimately be zero: a zero denominator
    with a positive numerator makes the group's ratio infinite, and a group
    with an infinite ratio compared against a group with a finite one is
    unsatisfied with a DivergentRatio diagnostic.  A 0/0 ratio is undefined
    and that group's comparison is vacuous.
    """
    ensure_member(fdmp, m)
    meets = _meets_tau(fdmp, m)
    below = _below_tau(fdmp, m)
    qualified = _qualified_event(fdmp)
    pop = fdmp.population

    num_clause = probability_clause(pop, below, qualified, label="fn-rate")
    den_clause = probability_clause(pop, meets, _negate(qualified), label="fp-rate")

    stats: list[GroupStats] = []
    diags: list[str] = []
    for z in range(pop.group_count):
        num = num_clause.stats[z].statistic
        den = den_clause.stats[z].statistic
        if num is None or den is None:
            stats.append(GroupStats(group=z, statistic=None, support_mass=0.0, label="fn/fp"))
            diags.append(f"group {z}: empty qualified or unqualified stratum")
        elif den == 0.0 and num == 0.0:
            stats.append(GroupStats(group=z, statistic=None, support_mass=0.0, label="fn/fp"))
            diags.append(f"group {z}: ratio 0/0 is undefined; comparison vacuous")
        else:
            mass = min(num_clause.stats[z].support_mass, den_clause.stats[z].support_mass)
            ratio = math.inf if den == 0.0 else num / den
            stats.append(GroupStats(group=z, statistic=ratio, support_mass=mass, label="fn/fp"))

    differences: list[float] = []
    ratios: list[float] = []
    satisfied = True
    vacuous = False
    compared = False
    base = stats[0].statistic
    for gs in stats[1:]:
        if base is None or gs.statistic is None:
            vacuous = True
            continue
        compared = True
        if math.isinf(base) and math.isinf(gs.statistic):
            differences.append(0.0)
            ratios.append(1.0)
            diags.append(f"group {gs.group} and group 0 ratios both diverge; treated as equal")
            continue
        if math.isinf(base) or math.isinf(gs.statistic):
            differences.append(math.inf)
            satisfied = False
            zero_side = gs.group if math.isinf(gs.statistic) else 0
            diags.append(
                f"DivergentRatio: group {zero_side} has zero false-positive rate "
                "with a positive false-negative rate while the other group's ratio is finite"
            )
            continue
        diff = abs(gs.statistic - base)
        differences.append(diff)
        ratio = min_ratio(base, gs.statistic)
        if ratio is not None:
            ratios.append(ratio)
        if diff > epsilon:
            satisfied = False
            diags.append(
                f"treatment_equality_cf_util: group {gs.group} vs group 0: "
                f"|{gs.statistic:.6g} - {base:.6g}| = {diff:.6g} > {epsilon:g}"
            )
    if not compared:
        vacuous = True
    return FairnessVerdict(
        metric="treatment_equality_cf_util",
        per_group=tuple(stats),
        max_abs_difference=max(differences, default=0.0),
        min_ratio=min(ratios) if ratios else None,
        satisfied=satisfied,
        vacuous=vacuous,
        diagnostics=tuple(diags),
    )


def test_fairness_cf_util(
    fdmp: Fdmp, m: Any, *, epsilon: float = DEFAULT_EPSILON
) -> FairnessVerdict:
    """Equal P(qualified | welfare == w) across groups, for every distinct welfare value.

    Welfare must have finite support over the population; values are
    compared exactly (the toolkit's welfare functions return exact
    expectations over finite tables).
    """
    ensure_member(fdmp, m)
    welfare = _welfare_fn(fdmp, m)
    qualified = _qualified_event(fdmp)
    pop = fdmp.population
    support = sorted({welfare(ind) for ind, _ in pop.entries})
    clauses = []
    for w in support:
        clauses.append(
            probability_clause(
                pop,
                qualified,
                lambda ind, w=w: welfare(ind) == w,
                label=f"welfare={w:.6g}",
            )
        )
    return build_verdict("test_fairness_cf_util", clauses, epsilon)


# Not a pytest test, despite the fairness literature's name for it.
test_fairness_cf_util.__test__ = False  # type: ignore[attr-defined]


# ---------------------------------------------------------------------------
# Ratio quantifications (1.0 = perfect parity, 0.0 = maximal disparity)
# ---------------------------------------------------------------------------


def _rate_ratio(pop: Population, event: EventPredicate, cond: EventPredicate, name: str) -> float:
    rates = []
    for z in range(pop.group_count):
        def in_stratum(ind: Individual, z: int = z) -> bool:
            return ind.group == z and cond(ind)

        rates.append(conditional_probability(pop, event, in_stratum))
    worst = 1.0
    for z, rate in enumerate(rates[1:], start=1):
        ratio = min_ratio(rates[0], rate)
        if ratio == 0.0:
            warnings.warn(
                f"{name}: group 0 rate {rates[0]:.6g} vs group {z} rate {rate:.6g}; "
                "one group has zero rate, ratio is 0",
                RuntimeWarning,
                stacklevel=3,
            )
        worst = min(worst, 0.0 if ratio is None else ratio)
    return worst


def dem_par_clf_ratio(fdmp: Fdmp, m: Any) -> float:
    """min-ratio of positive-prediction rates across groups.

    Expects a classification instantiation, where welfare equals the
    prediction and tau = 1, so the positive-prediction rate is
    P(welfare >= 1 | group).
    """
    ensure_member(fdmp, m)
    welfare = fdmp.utilities.welfare
    return _rate_ratio(
        fdmp.population,
        lambda ind: float(welfare(ind, m)) >= 1.0,
        always,
        "dem_par_clf_ratio",
    )


def eq_opp_clf_ratio(fdmp: Fdmp, m: Any) -> float:
    """min-ratio of true-positive rates across groups.

    Expects a classification instantiation whose individual attrs carry the
    observed binary target ``y``.
    """
    ensure_member(fdmp, m)
    welfare = fdmp.utilities.welfare
    return _rate_ratio(
        fdmp.population,
        lambda ind: float(welfare(ind, m)) >= 1.0,
        lambda ind: ind.attrs.y == 1,
        "eq_opp_clf_ratio",
    )


def dem_par_welf_ratio(fdmp: Fdmp, m: Any) -> float:
    """min-ratio of threshold-welfare rates P(welfare >= tau | group) across groups."""
    ensure_member(fdmp, m)
    return _rate_ratio(fdmp.population, _meets_tau(fdmp, m), always, "dem_par_welf_ratio")


# ---------------------------------------------------------------------------
# Threshold-free comparisons
# ---------------------------------------------------------------------------


def expected_welfare_parity(
    fdmp: Fdmp, m: Any, *, epsilon: float = DEFAULT_EPSILON
) -> FairnessVerdict:
    """Equal expected welfare E[welfare | group] across groups."""
    ensure_member(fdmp, m)
    clause = expectation_clause(fdmp.population, _welfare_fn(fdmp, m), label="expected welfare")
    return build_verdict("expected_welfare_parity", [clause], epsilon)


def distribution_parity(
    fdmp: Fdmp, m: Any, *, epsilon: float = DEFAULT_EPSILON
) -> FairnessVerdict:
    """Equality of the entire per-group welfare distribution.

    The finite welfare support is merged across groups (values closer than
    ``epsilon`` are treated as the same point) and the per-group mass at
    every support point must agree within ``epsilon``.  This is strictly
    stronger than expected-welfare parity, which in turn is stronger than
    threshold parity at any tau.
    """
    ensure_member(fdmp, m)
    welfare = _welfare_fn(fdmp, m)
    pop = fdmp.population
    values = sorted({welfare(ind) for ind, _ in pop.entries})
    clusters: list[float] = []
    for v in values:
        if not clusters or v - clusters[-1] > epsilon:
            clusters.append(v)
    clauses = []
    for v in clusters:
        clauses.append(
            probability_clause(
                pop,
                lambda ind, v=v: abs(welfare(ind) - v) <= epsilon,
                label=f"mass at {v:.6g}",
            )
        )
    return build_verdict("distribution_parity", clauses, epsilon)


def eq_opp_static_expected(
    fdmp: Fdmp,
    m: Any,
    alpha: float,
    p0: Callable[[Individual], float],
    *,
    epsilon: float = DEFAULT_EPSILON,
) -> FairnessVerdict:
    """Equal E[welfare | p0(ind) >= alpha] across groups.

    A static-qualification baseline: individuals qualify by clearing a
    fixed score threshold ``alpha`` on an externally supplied score
    ``p0``, and the comparison is of expected welfare rather than of a
    thresholded probability.
    """
    ensure_member(fdmp, m)
    clause = expectation_clause(
        fdmp.population,
        _welfare_fn(fdmp, m),
        lambda ind: p0(ind) >= alpha,
        label=f"score>={alpha:.6g}",
    )
    return build_verdict("eq_opp_mdp_static", [clause], epsilon)


# ---------------------------------------------------------------------------
# Dispatch
# ---------------------------------------------------------------------------

_SIMPLE_METRICS: dict[str, Callable[..., FairnessVerdict]] = {
    "dem_par_welf": dem_par_welf,
    "eq_opp_cf_util": eq_opp_cf_util,
    "equalized_odds_cf_util": equalized_odds_cf_util,
    "predictive_parity_cf_util": predictive_parity_cf_util,
    "predictive_equality_cf_util": predictive_equality_cf_util,
    "conditional_use_accuracy_cf_util": conditional_use_accuracy_cf_util,
    "overall_accuracy_cf_util": overall_accuracy_cf_util,
    "treatment_equality_cf_util": treatment_equality_cf_util,
    "test_fairness_cf_util": test_fairness_cf_util,
    "expected_welfare_parity": expected_welfare_parity,
    "distribution_parity": distribution_parity,
}

# Metric identifiers that need nothing beyond the decision problem itself.
SIMPLE_METRIC_NAMES = tuple(sorted(_SIMPLE_METRICS))


def evaluate_multi_group(
    fdmp: Fdmp, m: Any, spec: MetricSpec, *, epsilon: float = DEFAULT_EPSILON
) -> FairnessVerdict:
    """Evaluate ``spec`` comparing every group z >= 1 against group 0.

    All metrics in this module are natively multi-group (each clause
    compares each non-reference group against group 0), so with two groups
    this returns exactly the binary verdict.  Offending groups are named in
    the diagnostics.
    """
    if fdmp.population.group_count < 2:
        raise WelfairError("multi-group evaluation needs at least two groups")
    if spec.kind in _SIMPLE_METRICS:
        return _SIMPLE_METRICS[spec.kind](fdmp, m, epsilon=epsilon)
    if spec.kind == "conditional_dem_par":
        if "legit" not in spec.params:
            raise WelfairError("conditional_dem_par requires a 'legit' parameter")
        return conditional_dem_par(
            fdmp, m, spec.params["legit"], spec.params.get("value", True), epsilon=epsilon
        )
    if spec.kind == "eq_opp_mdp_static":
        missing = {"alpha", "p0"} - set(spec.params)
        if missing:
            raise WelfairError(f"eq_opp_mdp_static requires parameters {sorted(missing)}")
        return eq_opp_static_expected(
            fdmp, m, spec.params["alpha"], spec.params["p0"], epsilon=epsilon
        )
    raise WelfairError(f"unknown metric kind {spec.kind!r}")
