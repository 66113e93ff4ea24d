"""CLI contract: subcommands, flags, output formats, exit codes."""

import json

import pytest

from welfair.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestDemoCommand:
    def test_recidivism_json_contains_the_probabilities(self, capsys):
        code, out, _ = run(capsys, "demo", "recidivism", "--format", "json")
        assert code == 0
        assert "0.6923" in out and "0.75" in out
        report = json.loads(out)
        opp = next(r for r in report["results"] if r["name"] == "eq_opp_cf_util")
        stats = [g["statistic"] for g in opp["verdict"]["per_group"]]
        assert stats[0] == pytest.approx(180 / 260, abs=1e-12)
        assert stats[1] == pytest.approx(0.75, abs=1e-12)

    def test_loan_assert_fair_exits_one(self, capsys):
        code, _, err = run(capsys, "demo", "two-stage-loan", "--assert-fair")
        assert code == 1
        assert "unsatisfied" in err

    def test_fair_audit_passes_assert_fair(self, capsys):
        code, _, _ = run(
            capsys, "demo", "recidivism", "--metric", "eq_opp_clf", "--assert-fair"
        )
        assert code == 0

    def test_unknown_demo_is_usage_error(self, capsys):
        code, _, _ = run(capsys, "demo", "nope")
        assert code == 3


class TestEvalCommand:
    def test_missing_file_exits_three(self, capsys):
        code, _, err = run(capsys, "eval", "missing.json")
        assert code == 3
        assert "error" in err.lower() or "Error" in err

    def test_truncated_file_exits_three(self, capsys, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text('{"kind": "strata"', encoding="utf-8")
        code, _, err = run(capsys, "eval", str(path))
        assert code == 3

    def test_eval_scenario_file(self, capsys, tmp_path):
        scenario = {
            "id": "tiny",
            "kind": "clustering",
            "thresholds": {"tau": 0.6, "rho": 0.0},
            "metrics": ["dem_par_welf"],
            "payload": {
                "points": [
                    {"features": [0.0], "group": 0},
                    {"features": [1.0], "group": 0},
                    {"features": [2.0], "group": 1},
                    {"features": [3.0], "group": 1},
                ],
                "k": 2,
                "assignment": [0, 0, 0, 1],
            },
        }
        path = tmp_path / "scenario.json"
        path.write_text(json.dumps(scenario), encoding="utf-8")
        code, out, _ = run(capsys, "eval", str(path))
        assert code == 0
        report = json.loads(out)
        assert report["scenario_id"] == "tiny"
        assert report["results"][0]["verdict"]["satisfied"] is False

    def test_metric_and_threshold_flags(self, capsys, tmp_path):
        scenario = {
            "kind": "strata",
            "payload": {
                "counts": [
                    {"stratum": "Safe", "group": 0, "decision": "release", "count": 4},
                    {"stratum": "Safe", "group": 0, "decision": "detain", "count": 1},
                    {"stratum": "Safe", "group": 1, "decision": "release", "count": 4},
                    {"stratum": "Safe", "group": 1, "decision": "detain", "count": 1},
                ]
            },
            "metrics": ["eq_opp_clf"],
        }
        path = tmp_path / "scenario.json"
        path.write_text(json.dumps(scenario), encoding="utf-8")
        code, out, _ = run(
            capsys, "eval", str(path), "--metric", "dem_par_welf", "--tau", "0.0"
        )
        assert code == 0
        report = json.loads(out)
        assert [r["name"] for r in report["results"]] == ["dem_par_welf"]
        # tau = 0 means even detained individuals clear the welfare bar.
        assert [g["statistic"] for g in report["results"][0]["verdict"]["per_group"]] == [
            1.0,
            1.0,
        ]


class TestOutputFormats:
    def test_table_and_json_render_identical_numbers(self, capsys):
        code, json_out, _ = run(capsys, "demo", "recidivism", "--format", "json")
        assert code == 0
        code, table_out, _ = run(capsys, "demo", "recidivism", "--format", "table")
        assert code == 0
        report = json.loads(json_out)
        # Every per-group statistic, rounded to the table's 4 decimals, must
        # appear in the table output.
        for result in report["results"]:
            if result["verdict"] is None:
                continue
            for g in result["verdict"]["per_group"]:
                assert f"statistic={g['statistic']:.4f}" in table_out

    def test_table_mentions_diagnostics(self, capsys):
        _, out, _ = run(capsys, "demo", "recidivism", "--format", "table")
        assert "! " in out


class TestServerMode:
    def test_remote_audit_matches_local(self, capsys, monkeypatch):
        # Route the CLI's HTTP call into an in-process app instance.
        import httpx
        from fastapi.testclient import TestClient

        from welfair.service import create_app

        client = TestClient(create_app())

        def fake_post(url, json=None, timeout=None):
            assert url.endswith("/audit")
            return client.post("/audit", json=json)

        monkeypatch.setattr(httpx, "post", fake_post)
        code, remote_out, _ = run(
            capsys, "demo", "recidivism", "--server", "http://testserver"
        )
        assert code == 0
        code, local_out, _ = run(capsys, "demo", "recidivism")
        assert code == 0
        assert json.loads(remote_out) == json.loads(local_out)


class TestUsage:
    def test_no_arguments_is_usage_error(self, capsys):
        assert main([]) == 3

    def test_unknown_option_is_usage_error(self, capsys):
        code, _, _ = run(capsys, "demo", "recidivism", "--bogus")
        assert code == 3
