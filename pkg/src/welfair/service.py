"""HTTP facade over the audit engine.

Stateless by construction: every request carries (or names) a complete
scenario, and every response is a full audit report.  The CLI uses the
same request/response models, either in-process or against a running
instance of this app.
"""

from __future__ import annotations

from typing import Any

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel, Field

from . import __version__
from .audit import DEMO_NAMES, METRICS_BY_KIND, demo_scenario, run_audit
from .core import DEFAULT_EPSILON
from .errors import WelfairError
from .schemas import AuditReport, MetricRequest, Scenario, dump_scenario


class AuditOverrides(BaseModel):
    """Optional knobs shared by every audit entry point."""

    metrics: list[MetricRequest] | None = None
    tau: float | None = None
    rho: float | None = None
    epsilon: float = Field(default=DEFAULT_EPSILON, gt=0.0)

    @classmethod
    def none(cls) -> "AuditOverrides":
        return cls()


class AuditRequest(AuditOverrides):
    scenario: Scenario


class MetricsCatalog(BaseModel):
    metrics_by_kind: dict[str, list[str]]


class DemoList(BaseModel):
    demos: list[str]


class Health(BaseModel):
    status: str
    version: str


def execute_audit(scenario: Scenario, overrides: AuditOverrides) -> AuditReport:
    """Shared entry point for the HTTP handlers and the in-process CLI."""
    return run_audit(
        scenario,
        metrics=overrides.metrics,
        tau=overrides.tau,
        rho=overrides.rho,
        epsilon=overrides.epsilon,
    )


def create_app() -> FastAPI:
    app = FastAPI(
        title="welfair",
        version=__version__,
        description="Group-fairness audits over finite decision problems",
    )

    @app.get("/health", response_model=Health)
    def health() -> Health:
        return Health(status="ok", version=__version__)

    @app.get("/metrics", response_model=MetricsCatalog)
    def metrics_catalog() -> MetricsCatalog:
        return MetricsCatalog(
            metrics_by_kind={kind: list(names) for kind, names in METRICS_BY_KIND.items()}
        )

    @app.get("/demos", response_model=DemoList)
    def demos() -> DemoList:
        return DemoList(demos=list(DEMO_NAMES))

    @app.get("/demos/{name}")
    def demo_document(name: str) -> Any:
        import json

        if name not in DEMO_NAMES:
            raise HTTPException(status_code=404, detail=f"unknown demo {name!r}")
        return json.loads(dump_scenario(demo_scenario(name)))

    @app.post("/audit", response_model=AuditReport)
    def audit(request: AuditRequest) -> AuditReport:
        try:
            return execute_audit(request.scenario, request)
        except (WelfairError, ValueError) as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc

    @app.post("/demos/{name}/audit", response_model=AuditReport)
    def audit_demo(name: str, overrides: AuditOverrides | None = None) -> AuditReport:
        if name not in DEMO_NAMES:
            raise HTTPException(status_code=404, detail=f"unknown demo {name!r}")
        try:
            return execute_audit(demo_scenario(name), overrides or AuditOverrides.none())
        except (WelfairError, ValueError) as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc

    return app


app = create_app()
