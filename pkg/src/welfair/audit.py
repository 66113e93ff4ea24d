"""Metric dispatch over validated scenarios.

``run_audit`` turns a scenario document into domain objects, evaluates each
requested metric, and collects the outcomes into a report.  A failing
metric becomes an error entry; the remaining metrics still run.  Results
keep the request order, so reports are deterministic.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources
from typing import Any, Callable, Mapping

from . import __version__, metrics as metrics_mod
from .classification import (
    TABLED,
    Slcp,
    StrataPopulation,
    Stratum,
    classic_dem_par,
    classic_eq_opp,
    german_credit_cost,
    PredictionRow,
    predictions_to_fdmp,
    principal_fairness,
    strata_to_fdmp,
    strata_to_slcp,
    zero_one_loss,
)
from .clustering import ClusteringProblem, clustering_to_fdmp
from .core import DEFAULT_EPSILON, Fdmp, Individual, Thresholds
from .errors import SchemaError, WelfairError
from .mdp import EpisodicMdp, MdpState, Policy, WelfareContribution, eq_opp_mdp_static
from .metrics import FairnessVerdict, MetricSpec, evaluate_multi_group
from .schemas import (
    AuditReport,
    ClassificationScenario,
    ClusteringScenario,
    MdpScenario,
    MetricRequest,
    MetricResult,
    Scenario,
    StrataScenario,
    validate_scenario,
    verdict_to_model,
)

DEMO_NAMES = ("recidivism", "two-stage-loan")

_DEFAULT_THRESHOLDS = {
    ("classification", "zero_one"): (1.0, 0.0),
    ("classification", "german_credit"): (-1.0, 0.0),
    "strata": (1.0, 0.0),
}


@dataclass(frozen=True)
class AuditContext:
    """Domain objects assembled from one scenario, ready for metric dispatch."""

    kind: str
    fdmp: Fdmp
    audited: Any
    slcp: Slcp | None = None
    strata: StrataPopulation | None = None
    mdp: EpisodicMdp | None = None
    welfare_contribution: WelfareContribution | None = None


def _resolve_thresholds(scenario: Scenario, tau: float | None, rho: float | None) -> Thresholds:
    if scenario.thresholds is not None:
        base_tau, base_rho = scenario.thresholds.tau, scenario.thresholds.rho
    elif isinstance(scenario, ClassificationScenario):
        base_tau, base_rho = _DEFAULT_THRESHOLDS[("classification", scenario.payload.loss)]
    elif isinstance(scenario, StrataScenario):
        base_tau, base_rho = _DEFAULT_THRESHOLDS["strata"]
    else:  # pragma: no cover - schema requires thresholds for mdp/clustering
        raise SchemaError("scenario requires explicit thresholds", field="thresholds")
    return Thresholds(
        tau=base_tau if tau is None else tau, rho=base_rho if rho is None else rho
    )


def build_context(
    scenario: Scenario, tau: float | None = None, rho: float | None = None
) -> AuditContext:
    """Assemble the population, decision space, and audited algorithm."""
    thresholds = _resolve_thresholds(scenario, tau, rho)
    if isinstance(scenario, StrataScenario):
        assert scenario.payload.counts is not None
        pop = StrataPopulation(
            counts=tuple(
                (Stratum(row.stratum), row.group, row.decision, row.count)
                for row in scenario.payload.counts
            )
        )
        fdmp = strata_to_fdmp(pop, tau=thresholds.tau, rho=thresholds.rho)
        return AuditContext(
            kind="strata", fdmp=fdmp, audited=TABLED, slcp=strata_to_slcp(pop), strata=pop
        )
    if isinstance(scenario, ClassificationScenario):
        assert scenario.payload.rows is not None
        cost_fn = zero_one_loss if scenario.payload.loss == "zero_one" else german_credit_cost
        rows = [
            PredictionRow(x=tuple(r.x), y=r.y, z=r.z, yhat=r.yhat, weight=r.weight)
            for r in scenario.payload.rows
        ]
        fdmp = predictions_to_fdmp(
            rows, cost_fn=cost_fn, tau=thresholds.tau, rho=thresholds.rho
        )
        slcp = Slcp(population=fdmp.population, loss=cost_fn)
        return AuditContext(kind="classification", fdmp=fdmp, audited=TABLED, slcp=slcp)
    if isinstance(scenario, MdpScenario):
        payload = scenario.payload
        mdp = EpisodicMdp(
            states=tuple(
                MdpState(id=s.id, group=s.group, attrs=dict(s.attrs), absorbing=s.absorbing)
                for s in payload.states
            ),
            actions=tuple(payload.actions),
            transitions=_nested_transitions(payload.transitions),
            rewards={(v.state, v.action): v.value for v in payload.rewards},
            gamma=payload.gamma,
            initial=dict(payload.initial),
            horizon=payload.horizon,
        )
        w = WelfareContribution(values={(v.state, v.action): v.value for v in payload.welfare})
        from .mdp import mdp_to_fdmp

        fdmp = mdp_to_fdmp(mdp, w, tau=thresholds.tau, rho=thresholds.rho)
        return AuditContext(
            kind="mdp",
            fdmp=fdmp,
            audited=Policy.from_mapping(payload.policy),
            mdp=mdp,
            welfare_contribution=w,
        )
    if isinstance(scenario, ClusteringScenario):
        payload = scenario.payload
        problem = ClusteringProblem.from_rows(
            [(tuple(p.features), p.group) for p in payload.points], k=payload.k
        )
        fdmp = clustering_to_fdmp(
            problem, welfare=payload.welfare, tau=thresholds.tau, rho=thresholds.rho
        )
        return AuditContext(kind="clustering", fdmp=fdmp, audited=tuple(payload.assignment))
    raise SchemaError(f"unknown scenario kind {scenario!r}")


def _nested_transitions(rows) -> dict[tuple[str, str], dict[str, float]]:
    nested: dict[tuple[str, str], dict[str, float]] = {}
    for row in rows:
        nested.setdefault((row.from_state, row.action), {})[row.to] = row.p
    return nested


def _attribute_extractor(ctx: AuditContext, attr: str) -> Callable[[Individual], Any]:
    """Declarative attribute access for scenario-provided metric parameters.

    ``x.<i>`` indexes classification feature vectors; other names resolve
    against the individual's attrs via key or attribute lookup.  MDP
    individuals expose their state's attrs mapping.
    """

    def extract(ind: Individual) -> Any:
        attrs = ind.attrs
        if ctx.kind == "mdp":
            attrs = attrs.attrs  # the state's domain attributes
        if attr.startswith("x."):
            return attrs.x[int(attr[2:])]
        if isinstance(attrs, Mapping):
            return attrs[attr]
        value = getattr(attrs, attr)
        if isinstance(value, Stratum):
            return value.value
        return value

    return extract


def _metric_spec(ctx: AuditContext, request: MetricRequest) -> MetricSpec:
    params = dict(request.params)
    if request.name == "conditional_dem_par":
        if "attr" not in params or "equals" not in params:
            raise WelfairError("conditional_dem_par needs params 'attr' and 'equals'")
        return MetricSpec(
            kind=request.name,
            params={
                "legit": _attribute_extractor(ctx, str(params["attr"])),
                "value": params["equals"],
            },
        )
    return MetricSpec(kind=request.name, params=params)


def _run_one(ctx: AuditContext, request: MetricRequest, epsilon: float) -> MetricResult:
    name = request.name
    if name in ("dem_par_clf", "eq_opp_clf"):
        if ctx.slcp is None:
            raise WelfairError(f"{name} needs a classification or strata scenario")
        fn = classic_dem_par if name == "dem_par_clf" else classic_eq_opp
        return _verdict_result(name, fn(ctx.slcp, ctx.audited, epsilon=epsilon))
    if name == "principal_fairness":
        if ctx.strata is None:
            raise WelfairError("principal_fairness needs a strata scenario")
        return _verdict_result(name, principal_fairness(ctx.strata, epsilon=epsilon))
    if name in ("dem_par_clf_ratio", "eq_opp_clf_ratio", "dem_par_welf_ratio"):
        fn = getattr(metrics_mod, name)
        return MetricResult(name=name, status="value", value=fn(ctx.fdmp, ctx.audited))
    if name == "eq_opp_mdp_static":
        if ctx.mdp is None or ctx.welfare_contribution is None:
            raise WelfairError("eq_opp_mdp_static needs an mdp scenario")
        params = dict(request.params)
        if "alpha" not in params or "p0" not in params:
            raise WelfairError("eq_opp_mdp_static needs params 'alpha' and 'p0'")
        verdict = eq_opp_mdp_static(
            ctx.mdp,
            ctx.welfare_contribution,
            ctx.audited,
            alpha=float(params["alpha"]),
            p0={str(k): float(v) for k, v in params["p0"].items()},
            epsilon=epsilon,
        )
        return _verdict_result(name, verdict)
    verdict = evaluate_multi_group(ctx.fdmp, ctx.audited, _metric_spec(ctx, request), epsilon=epsilon)
    return _verdict_result(name, verdict)


def _verdict_result(name: str, verdict: FairnessVerdict) -> MetricResult:
    return MetricResult(name=name, status="verdict", verdict=verdict_to_model(verdict))


def run_audit(
    scenario: Scenario,
    metrics: list[MetricRequest] | None = None,
    tau: float | None = None,
    rho: float | None = None,
    epsilon: float = DEFAULT_EPSILON,
) -> AuditReport:
    """Evaluate the scenario's metrics (or an explicit override list).

    Individual metric failures are captured as error results; the rest of
    the audit proceeds.
    """
    ctx = build_context(scenario, tau=tau, rho=rho)
    requested = scenario.metrics if metrics is None else metrics
    results = []
    for request in requested:
        try:
            results.append(_run_one(ctx, request, epsilon))
        except WelfairError as exc:
            results.append(MetricResult(name=request.name, status="error", error=str(exc)))
    return AuditReport(
        scenario_id=scenario.id,
        tool_version=__version__,
        epsilon=epsilon,
        results=results,
    )


def demo_scenario(name: str) -> Scenario:
    """One of the bundled, self-contained demo scenarios."""
    if name not in DEMO_NAMES:
        raise WelfairError(f"unknown demo {name!r}; available: {', '.join(DEMO_NAMES)}")
    resource = resources.files("welfair").joinpath(
        f"fixtures/{name.replace('-', '_')}.json"
    )
    document = json.loads(resource.read_text(encoding="utf-8"))
    return validate_scenario(document)


GENERIC_METRICS = metrics_mod.SIMPLE_METRIC_NAMES + (
    "conditional_dem_par",
    "dem_par_welf_ratio",
)

METRICS_BY_KIND: dict[str, tuple[str, ...]] = {
    "classification": GENERIC_METRICS
    + ("dem_par_clf", "eq_opp_clf", "dem_par_clf_ratio", "eq_opp_clf_ratio"),
    "strata": GENERIC_METRICS
    + ("dem_par_clf", "eq_opp_clf", "dem_par_clf_ratio", "eq_opp_clf_ratio", "principal_fairness"),
    "mdp": GENERIC_METRICS + ("eq_opp_mdp_static",),
    "clustering": GENERIC_METRICS,
}
