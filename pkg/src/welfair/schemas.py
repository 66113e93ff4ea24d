"""Scenario documents and audit reports: the toolkit's wire formats.

A scenario file is a JSON document with a ``kind`` discriminator
(classification, strata, mdp, or clustering), a kind-specific ``payload``,
optional ``thresholds``, and the list of metrics to evaluate.  The same
pydantic models validate files loaded by the CLI and request bodies posted
to the HTTP service, so both clients speak an identical dialect.

Report numbers are serialized with Python's shortest round-trip float
representation (lossless for doubles); infinities -- which arise only from
divergent treatment-equality ratios -- map to JSON null.
"""

from __future__ import annotations

import json
import math
from pathlib import Path
from typing import Annotated, Any, Literal, Union

from pydantic import (
    BaseModel,
    ConfigDict,
    Field,
    TypeAdapter,
    ValidationError,
    field_validator,
    model_validator,
)

from .errors import ParseError, SchemaError
from .metrics import FairnessVerdict

KINDS = ("classification", "strata", "mdp", "clustering")


class ThresholdsModel(BaseModel):
    tau: float
    rho: float = 0.0


class MetricRequest(BaseModel):
    """A metric name plus whatever parameters it needs (JSON-encodable only)."""

    name: str
    params: dict[str, Any] = Field(default_factory=dict)


def _normalize_metrics(metrics: list[Any]) -> list[Any]:
    return [{"name": m} if isinstance(m, str) else m for m in metrics]


class _ScenarioBase(BaseModel):
    model_config = ConfigDict(extra="forbid")

    id: str = "scenario"
    thresholds: ThresholdsModel | None = None
    metrics: list[MetricRequest] = Field(default_factory=list)

    @field_validator("metrics", mode="before")
    @classmethod
    def _metric_names_allowed(cls, v: Any) -> Any:
        if isinstance(v, list):
            return _normalize_metrics(v)
        return v


# -- classification ----------------------------------------------------------


class PredictionRowModel(BaseModel):
    x: list[Any] = Field(default_factory=list)
    y: Literal[0, 1]
    z: int = Field(ge=0)
    yhat: Literal[0, 1]
    weight: float = Field(default=1.0, ge=0.0)


class ClassificationPayload(BaseModel):
    model_config = ConfigDict(extra="forbid")

    rows: list[PredictionRowModel] | None = None
    predictions_csv: str | None = None
    loss: Literal["zero_one", "german_credit"] = "zero_one"

    @model_validator(mode="after")
    def _exactly_one_source(self) -> "ClassificationPayload":
        if (self.rows is None) == (self.predictions_csv is None):
            raise ValueError("provide exactly one of 'rows' or 'predictions_csv'")
        return self


class ClassificationScenario(_ScenarioBase):
    kind: Literal["classification"]
    payload: ClassificationPayload


# -- strata ------------------------------------------------------------------


class StrataCountRow(BaseModel):
    stratum: Literal["Dangerous", "Backlash", "Preventable", "Safe"]
    group: int = Field(ge=0)
    decision: Literal["detain", "release"]
    count: float = Field(ge=0.0)


class StrataPayload(BaseModel):
    model_config = ConfigDict(extra="forbid")

    counts: list[StrataCountRow] | None = None
    counts_csv: str | None = None

    @model_validator(mode="after")
    def _exactly_one_source(self) -> "StrataPayload":
        if (self.counts is None) == (self.counts_csv is None):
            raise ValueError("provide exactly one of 'counts' or 'counts_csv'")
        return self


class StrataScenario(_ScenarioBase):
    kind: Literal["strata"]
    payload: StrataPayload


# -- mdp ---------------------------------------------------------------------


class MdpStateModel(BaseModel):
    id: str
    group: int | None = None
    attrs: dict[str, Any] = Field(default_factory=dict)
    absorbing: bool = False


class TransitionModel(BaseModel):
    from_state: str = Field(alias="from")
    action: str
    to: str
    p: float = Field(ge=0.0)

    model_config = ConfigDict(populate_by_name=True)


class StateActionValue(BaseModel):
    state: str
    action: str
    value: float


class MdpPayload(BaseModel):
    model_config = ConfigDict(extra="forbid")

    states: list[MdpStateModel]
    actions: list[str]
    transitions: list[TransitionModel]
    rewards: list[StateActionValue]
    welfare: list[StateActionValue]
    gamma: float = Field(ge=0.0, le=1.0)
    initial: dict[str, float]
    horizon: int | None = Field(default=None, ge=1)
    policy: dict[str, str]


class MdpScenario(_ScenarioBase):
    kind: Literal["mdp"]
    payload: MdpPayload
    thresholds: ThresholdsModel


# -- clustering --------------------------------------------------------------


class ClusterPointModel(BaseModel):
    features: list[float]
    group: int = Field(ge=0)


class ClusteringPayload(BaseModel):
    model_config = ConfigDict(extra="forbid")

    points: list[ClusterPointModel]
    k: int = Field(ge=1)
    assignment: list[int]
    welfare: Literal["balanced", "representative"] = "balanced"


class ClusteringScenario(_ScenarioBase):
    kind: Literal["clustering"]
    payload: ClusteringPayload
    thresholds: ThresholdsModel


Scenario = Annotated[
    Union[ClassificationScenario, StrataScenario, MdpScenario, ClusteringScenario],
    Field(discriminator="kind"),
]

_scenario_adapter: TypeAdapter = TypeAdapter(Scenario)


def validate_scenario(document: Any) -> Scenario:
    """Validate an already-parsed scenario document.

    Raises:
        SchemaError: naming the first offending field.
    """
    try:
        return _scenario_adapter.validate_python(document)
    except ValidationError as exc:
        first = exc.errors()[0]
        field = ".".join(str(part) for part in first.get("loc", ())) or None
        raise SchemaError(first.get("msg", "invalid scenario"), field=field) from exc


def load_scenario(path: str | Path) -> Scenario:
    """Load and validate a scenario JSON file.

    Relative CSV references inside the payload are resolved against the
    scenario file's directory and inlined, so the returned scenario is
    self-contained.

    Raises:
        ParseError: the file is not valid JSON (with line/column).
        SchemaError: the JSON does not match the scenario schema.
    """
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    try:
        document = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, line=exc.lineno, column=exc.colno) from exc
    scenario = validate_scenario(document)
    return _inline_csv_payloads(scenario, path.parent)


def _inline_csv_payloads(scenario: Scenario, base_dir: Path) -> Scenario:
    from .classification import StrataPopulation, prediction_rows_from_csv

    if isinstance(scenario, StrataScenario) and scenario.payload.counts_csv is not None:
        csv_path = base_dir / scenario.payload.counts_csv
        try:
            loaded = StrataPopulation.from_csv(csv_path)
        except (OSError, ValueError) as exc:
            raise SchemaError(str(exc), field="payload.counts_csv") from exc
        counts = [
            StrataCountRow(stratum=s.value, group=g, decision=d, count=c)
            for s, g, d, c in loaded.counts
        ]
        payload = StrataPayload(counts=counts)
        return scenario.model_copy(update={"payload": payload})
    if isinstance(scenario, ClassificationScenario) and scenario.payload.predictions_csv is not None:
        csv_path = base_dir / scenario.payload.predictions_csv
        try:
            loaded_rows = prediction_rows_from_csv(csv_path)
        except (OSError, ValueError) as exc:
            raise SchemaError(str(exc), field="payload.predictions_csv") from exc
        rows = [
            PredictionRowModel(x=list(r.x), y=r.y, z=r.z, yhat=r.yhat, weight=r.weight)
            for r in loaded_rows
        ]
        payload = ClassificationPayload(rows=rows, loss=scenario.payload.loss)
        return scenario.model_copy(update={"payload": payload})
    return scenario


def dump_scenario(scenario: Scenario) -> str:
    return json.dumps(
        _scenario_adapter.dump_python(scenario, mode="json", by_alias=True), indent=2
    )


# -- audit reports -----------------------------------------------------------


class GroupStatsModel(BaseModel):
    group: int
    statistic: float | None
    support_mass: float
    label: str = ""


class VerdictModel(BaseModel):
    model_config = ConfigDict(ser_json_inf_nan="null")

    metric: str
    per_group: list[GroupStatsModel]
    max_abs_difference: float | None
    min_ratio: float | None
    satisfied: bool
    vacuous: bool
    diagnostics: list[str] = Field(default_factory=list)


class MetricResult(BaseModel):
    """Outcome of one requested metric: a verdict, a bare ratio value, or an error."""

    name: str
    status: Literal["verdict", "value", "error"]
    verdict: VerdictModel | None = None
    value: float | None = None
    error: str | None = None


class AuditReport(BaseModel):
    scenario_id: str
    tool_version: str
    epsilon: float
    results: list[MetricResult]

    def to_json(self, indent: int | None = 2) -> str:
        return self.model_dump_json(indent=indent)

    @classmethod
    def from_json(cls, text: str) -> "AuditReport":
        return cls.model_validate_json(text)


def verdict_to_model(verdict: FairnessVerdict) -> VerdictModel:
    return VerdictModel(
        metric=verdict.metric,
        per_group=[
            GroupStatsModel(
                group=g.group,
                statistic=None
                if g.statistic is not None and math.isinf(g.statistic)
                else g.statistic,
                support_mass=g.support_mass,
                label=g.label,
            )
            for g in verdict.per_group
        ],
        max_abs_difference=None
        if math.isinf(verdict.max_abs_difference)
        else verdict.max_abs_difference,
        min_ratio=verdict.min_ratio,
        satisfied=verdict.satisfied,
        vacuous=verdict.vacuous,
        diagnostics=list(verdict.diagnostics),
    )
