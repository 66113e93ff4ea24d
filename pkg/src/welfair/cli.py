"""Command-line client for the audit service.

``eval`` and ``demo`` build the same request models the HTTP API accepts
and execute them in-process by default (no server or network needed);
``--server`` routes the identical request to a running instance instead.
Exit codes: 0 for a completed audit, 1 when ``--assert-fair`` finds an
unsatisfied metric, 3 for usage or input errors.
"""

from __future__ import annotations

import sys

import click

from . import __version__
from .audit import DEMO_NAMES, demo_scenario
from .errors import ScenarioError, WelfairError
from .schemas import AuditReport, MetricRequest, load_scenario
from .service import AuditOverrides, execute_audit

EXIT_OK = 0
EXIT_UNFAIR = 1
EXIT_INPUT_ERROR = 3


def _audit_options(command):
    for option in reversed(
        [
            click.option(
                "--metric",
                "metric_names",
                multiple=True,
                help="Metric to evaluate (repeatable); overrides the scenario's list.",
            ),
            click.option("--tau", type=float, default=None, help="Override the welfare threshold."),
            click.option("--rho", type=float, default=None, help="Override the cost threshold."),
            click.option(
                "--epsilon",
                type=float,
                default=1e-9,
                show_default=True,
                help="Absolute tolerance for probability comparisons.",
            ),
            click.option(
                "--format",
                "fmt",
                type=click.Choice(["json", "table"]),
                default="json",
                show_default=True,
                help="Report rendering.",
            ),
            click.option(
                "--assert-fair",
                is_flag=True,
                help="Exit 1 if any evaluated metric is unsatisfied.",
            ),
            click.option(
                "--server",
                default=None,
                metavar="URL",
                help="Send the audit to a running service instead of evaluating in-process.",
            ),
        ]
    ):
        command = option(command)
    return command


def _overrides(metric_names, tau, rho, epsilon) -> AuditOverrides:
    metrics = [MetricRequest(name=n) for n in metric_names] or None
    return AuditOverrides(metrics=metrics, tau=tau, rho=rho, epsilon=epsilon)


def _remote_audit(server: str, scenario, overrides: AuditOverrides) -> AuditReport:
    import httpx

    payload = {"scenario": scenario.model_dump(mode="json", by_alias=True)}
    payload.update(overrides.model_dump(mode="json", exclude_none=True))
    response = httpx.post(f"{server.rstrip('/')}/audit", json=payload, timeout=60.0)
    if response.status_code != 200:
        raise WelfairError(f"server returned {response.status_code}: {response.text}")
    return AuditReport.model_validate(response.json())


def _render_table(report: AuditReport) -> str:
    lines = [
        f"scenario: {report.scenario_id}   version: {report.tool_version}   "
        f"epsilon: {report.epsilon:g}",
        f"{'metric':<34} {'status':<8} {'satisfied':<10} {'vacuous':<8} "
        f"{'max|diff|':<10} {'min_ratio':<10}",
    ]
    for result in report.results:
        if result.status == "error":
            lines.append(f"{result.name:<34} {'error':<8} {result.error}")
            continue
        if result.status == "value":
            lines.append(
                f"{result.name:<34} {'value':<8} {'':<10} {'':<8} {'':<10} {result.value:.4f}"
            )
            continue
        verdict = result.verdict
        diff = "inf" if verdict.max_abs_difference is None else f"{verdict.max_abs_difference:.4f}"
        ratio = "-" if verdict.min_ratio is None else f"{verdict.min_ratio:.4f}"
        lines.append(
            f"{result.name:<34} {'ok':<8} {'yes' if verdict.satisfied else 'no':<10} "
            f"{'yes' if verdict.vacuous else 'no':<8} {diff:<10} {ratio:<10}"
        )
        for g in verdict.per_group:
            stat = "-" if g.statistic is None else f"{g.statistic:.4f}"
            label = f" [{g.label}]" if g.label else ""
            lines.append(
                f"    group {g.group}{label}: statistic={stat} mass={g.support_mass:.4f}"
            )
        for diag in verdict.diagnostics:
            lines.append(f"    ! {diag}")
    return "\n".join(lines)


def _emit(report: AuditReport, fmt: str, assert_fair: bool) -> int:
    click.echo(report.to_json() if fmt == "json" else _render_table(report))
    if assert_fair:
        unsatisfied = [
            r.name
            for r in report.results
            if r.status == "verdict" and r.verdict is not None and not r.verdict.satisfied
        ]
        if unsatisfied:
            click.echo(f"assert-fair: unsatisfied metrics: {', '.join(unsatisfied)}", err=True)
            return EXIT_UNFAIR
    return EXIT_OK


@click.group()
@click.version_option(version=__version__, prog_name="welfair")
def cli() -> None:
    """Group-fairness audits over finite decision problems."""


@cli.command("eval")
@click.argument("scenario_path", type=click.Path())
@_audit_options
def eval_command(scenario_path, metric_names, tau, rho, epsilon, fmt, assert_fair, server) -> int:
    """Audit a scenario JSON file."""
    scenario = load_scenario(scenario_path)
    overrides = _overrides(metric_names, tau, rho, epsilon)
    if server:
        report = _remote_audit(server, scenario, overrides)
    else:
        report = execute_audit(scenario, overrides)
    return _emit(report, fmt, assert_fair)


@cli.command("demo")
@click.argument("name", type=click.Choice(list(DEMO_NAMES)))
@_audit_options
def demo_command(name, metric_names, tau, rho, epsilon, fmt, assert_fair, server) -> int:
    """Audit one of the bundled demo scenarios."""
    scenario = demo_scenario(name)
    overrides = _overrides(metric_names, tau, rho, epsilon)
    if server:
        report = _remote_audit(server, scenario, overrides)
    else:
        report = execute_audit(scenario, overrides)
    return _emit(report, fmt, assert_fair)


@cli.command("serve")
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=8000, show_default=True)
def serve_command(host: str, port: int) -> int:
    """Run the HTTP service."""
    import uvicorn

    uvicorn.run("welfair.service:app", host=host, port=port)
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    """Entry point with the documented exit codes."""
    try:
        result = cli.main(args=argv, standalone_mode=False)
        return result if isinstance(result, int) else EXIT_OK
    except click.exceptions.Abort:
        click.echo("aborted", err=True)
        return EXIT_INPUT_ERROR
    except click.ClickException as exc:
        exc.show()
        return EXIT_INPUT_ERROR
    except (ScenarioError, WelfairError, ValueError) as exc:
        click.echo(f"error: {exc}", err=True)
        return EXIT_INPUT_ERROR
    except OSError as exc:
        click.echo(f"error: {exc}", err=True)
        return EXIT_INPUT_ERROR


if __name__ == "__main__":
    sys.exit(main())
