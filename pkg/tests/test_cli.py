"""Tests for the command-line interface."""

import json
import os
import sys

import pytest

# Add src directory to path
sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from cli import build_parser, load_replay, main, run  # noqa: E402
from config import config  # noqa: E402
from hierarchy import TheoremViolation  # noqa: E402
from reports import EXIT_BUDGET, EXIT_FAIL, EXIT_INPUT_ERROR, EXIT_OK, LawReport  # noqa: E402


def run_json(capsys, *argv):
    """Run the CLI with JSON output and return (exit code, report)."""
    code = main([*argv, "--format", "json"])
    out = capsys.readouterr().out
    return code, json.loads(out)


@pytest.fixture
def model_file(write_document):
    return write_document(
        {
            "frame": "dual-godel3",
            "domain": ["s", "t"],
            "atomic": {"a": ["1/2", "inf"], "b": ["inf"], "s in t": ["1/2", "inf"]},
        },
        "model.yaml",
    )


class TestAlgebraCommands:
    """Tests for check-algebra, enumerate-nuclei and quotient."""

    def test_check_catalog_algebra(self, capsys):
        code, report = run_json(capsys, "check-algebra", "godel3")
        assert code == EXIT_OK
        assert report["passed"] is True
        assert report["sections"][0]["data"] == {"size": 3, "elements": ["0", "1/2", "1"]}

    def test_check_algebra_file_with_nucleus_and_filter(self, capsys, write_document):
        path = write_document(
            {"chain": {"kind": "godel", "size": 3}, "nucleus": [0, 2, 2], "filter": [1, 2]}
        )
        code, report = run_json(capsys, "check-algebra", path)
        assert code == EXIT_OK
        section = report["sections"][0]
        assert section["data"]["quotient"] == {"[0]": ["0"], "[1/2]": ["1/2", "1"]}
        assert len(section["laws"]) == 4

    def test_check_algebra_bad_filter(self, capsys, write_document):
        path = write_document({"chain": {"kind": "godel", "size": 3}, "filter": [1]})
        code, report = run_json(capsys, "check-algebra", path)
        assert code == EXIT_INPUT_ERROR
        assert report["error"].startswith("Invalid algebra document")

    def test_check_algebra_non_nucleus_fails(self, capsys, write_document):
        path = write_document({"chain": {"kind": "godel", "size": 3}, "nucleus": [1, 1, 1]})
        code, _ = run_json(capsys, "check-algebra", path)
        assert code == EXIT_FAIL

    def test_missing_algebra(self, capsys):
        code, report = run_json(capsys, "check-algebra", "godel99")
        assert code == EXIT_INPUT_ERROR
        assert report["error"] == "Unknown quantale or missing file: godel99"

    def test_enumerate_nuclei(self, capsys):
        code, report = run_json(capsys, "enumerate-nuclei", "godel3")
        assert code == EXIT_OK
        assert report["sections"][0]["data"]["count"] == 4

    def test_quotient_default_double_negation(self, capsys):
        code, report = run_json(capsys, "quotient", "godel3")
        assert code == EXIT_OK
        data = report["sections"][0]["data"]
        assert data["classes"] == {"[0]": ["0"], "[1/2]": ["1/2", "1"]}
        assert data["algebra"]["names"] == ["[0]", "[1/2]"]

    def test_quotient_explicit_nucleus(self, capsys):
        code, report = run_json(capsys, "quotient", "godel3", "--nucleus", "identity")
        assert code == EXIT_OK
        assert len(report["sections"][0]["data"]["classes"]) == 3

    def test_quotient_invalid_nucleus(self, capsys):
        code, report = run_json(capsys, "quotient", "godel3", "--nucleus", "0,1,3")
        assert code == EXIT_INPUT_ERROR
        assert report["error"].startswith("Invalid nucleus")

    def test_quotient_not_a_nucleus(self, capsys):
        code, report = run_json(capsys, "quotient", "godel3", "--nucleus", "0,0,2")
        assert code == EXIT_INPUT_ERROR
        assert report["error"] == "Not a quantic nucleus: [0, 0, 2]"


class TestForcingCommands:
    """Tests for force and crosscheck."""

    def test_force_at_world(self, capsys, model_file):
        code, report = run_json(capsys, "force", model_file, "a -> b", "--at", "inf")
        assert code == EXIT_OK
        data = report["sections"][0]["data"]
        assert data == {
            "sentence": "a -> b",
            "forcing_set": "{inf}",
            "world": "inf",
            "forced": True,
        }

    def test_force_not_forced(self, capsys, model_file):
        code, report = run_json(capsys, "force", model_file, "a", "--at", "1")
        assert code == EXIT_OK
        assert report["sections"][0]["data"]["forced"] is False

    def test_force_quantified(self, capsys, model_file):
        code, report = run_json(capsys, "force", model_file, "exists x . s in x")
        assert code == EXIT_OK
        assert report["sections"][0]["data"]["forcing_set"] == "{inf,1/2}"

    def test_force_parse_error(self, capsys, model_file):
        code, report = run_json(capsys, "force", model_file, "a &")
        assert code == EXIT_INPUT_ERROR
        assert report["error"].startswith("FormulaParseError")

    def test_force_unknown_world(self, capsys, model_file):
        code, report = run_json(capsys, "force", model_file, "a", "--at", "nowhere")
        assert code == EXIT_INPUT_ERROR
        assert report["error"] == "Unknown world: nowhere"

    def test_force_world_index_out_of_range(self, capsys, write_document):
        path = write_document({"frame": "chain2", "atomic": {"a": [7]}})
        code, report = run_json(capsys, "force", path, "a")
        assert code == EXIT_INPUT_ERROR
        assert "out of range" in report["error"]

    def test_force_unknown_letter(self, capsys):
        code, report = run_json(capsys, "force", "chain2", "p")
        assert code == EXIT_INPUT_ERROR
        assert "No forcing set for letters: p" in report["error"]

    def test_crosscheck(self, capsys, model_file):
        code, report = run_json(capsys, "crosscheck", model_file, "--depth", "1", "--jobs", "1")
        assert code == EXIT_OK
        assert report["sections"][0]["data"]["depth"] == 1

    def test_crosscheck_unknown_connective(self, capsys):
        code, report = run_json(capsys, "crosscheck", "chain2", "--connectives", "&,=>")
        assert code == EXIT_INPUT_ERROR
        assert report["error"] == "Unknown connectives: =>"


class TestFrameCommands:
    """Tests for pstar and conuclei."""

    def test_pstar(self, capsys):
        code, report = run_json(capsys, "pstar", "dual-godel3")
        assert code == EXIT_OK
        data = report["sections"][0]["data"]
        assert data["size"] == 3
        assert data["sets"] == ["{inf}", "{inf,1/2}", "{inf,1/2,1}"]

    def test_pstar_unknown_frame(self, capsys):
        code, _ = run_json(capsys, "pstar", "dual-nothing")
        assert code == EXIT_INPUT_ERROR

    def test_conuclei(self, capsys):
        _, report = run_json(capsys, "conuclei", "dual-godel3")
        assert report["sections"][0]["data"]["count"] == 4

    def test_standard_conuclei(self, capsys):
        code, report = run_json(capsys, "conuclei", "dual-godel3", "--standard-only")
        assert code == EXIT_OK
        assert report["sections"][0]["data"]["count"] == 2

    def test_conucleus_from_file(self, capsys, write_document):
        path = write_document({"dual_of": "godel3", "conucleus": [0, 2, 2]})
        code, report = run_json(capsys, "conuclei", path)
        assert code == EXIT_OK
        assert report["sections"][0]["data"]["count"] == 1


class TestHierarchyCommands:
    """Tests for hierarchy, verify-translation and verify-corollary."""

    def test_hierarchy(self, capsys):
        code, report = run_json(capsys, "hierarchy", "chain2", "--levels", "2")
        assert code == EXIT_OK
        data = report["sections"][0]["data"]
        assert data["sizes"] == [0, 1, 3]
        assert data["heyting_sizes"] == [0, 1, 3]
        assert data["stabilized_at"] is None
        assert data["prime"] == {"v1_0": "w1_0", "v2_0": "w2_0", "v2_1": "w2_1"}

    def test_hierarchy_non_standard(self, capsys, write_document):
        path = write_document({"frame": "dual-godel3", "delta": [1, 1, 2]})
        code, report = run_json(capsys, "hierarchy", path, "--levels", "2")
        assert code == EXIT_OK
        statuses = [c["status"] for law in report["sections"][0]["laws"] for c in law["checks"]]
        assert "hypothesis-unmet" in statuses

    def test_hierarchy_budget(self, capsys):
        code, report = run_json(
            capsys, "hierarchy", "dual-godel3", "--levels", "3", "--budget", "4"
        )
        assert code == EXIT_BUDGET
        assert report["error"] == "Level needs 8 candidates, budget is 4"

    def test_verify_translation(self, capsys):
        code, report = run_json(
            capsys, "verify-translation", "dual-godel3", "--levels", "2", "--depth", "1"
        )
        assert code == EXIT_OK
        assert report["sections"][0]["data"] == {"sizes": [0, 1, 3], "depth": 1}

    def test_verify_translation_needs_standard_conucleus(self, capsys, write_document):
        path = write_document({"frame": "dual-godel3", "delta": [1, 1, 2]})
        code, report = run_json(capsys, "verify-translation", path)
        assert code == EXIT_OK
        check = report["sections"][0]["laws"][0]["checks"][0]
        assert check["name"] == "standard-conucleus"
        assert check["status"] == "hypothesis-unmet"

    def test_verify_corollary(self, capsys):
        code, _ = run_json(capsys, "verify-corollary", "chain2", "--levels", "2", "--depth", "1")
        assert code == EXIT_OK


class TestValidateAndCatalog:
    def test_catalog(self, capsys):
        code, report = run_json(capsys, "catalog")
        assert code == EXIT_OK
        data = report["sections"][0]["data"]
        assert data["frames"][0] == "chain2"
        assert "godel3" in data["quantales"]

    def test_validate_model(self, capsys, model_file):
        code, report = run_json(capsys, "validate", model_file)
        assert code == EXIT_OK
        assert report["sections"][0]["data"] == {"valid": True}

    def test_validate_algebra_kind(self, capsys, write_document):
        path = write_document({"chain": {"kind": "godel", "size": 1}})
        code, report = run_json(capsys, "validate", path, "--kind", "algebra")
        assert code == EXIT_INPUT_ERROR
        assert report["error"].startswith("Validation failed")

    def test_validate_missing_file(self, capsys):
        code, report = run_json(capsys, "validate", "absent.yaml")
        assert code == EXIT_INPUT_ERROR
        assert report["error"] == "File not found: absent.yaml"


class TestRunAndMain:
    """Tests for option handling, output and replay."""

    def test_text_output(self, capsys):
        assert main(["pstar", "chain2"]) == EXIT_OK
        out = capsys.readouterr().out
        assert out.startswith("$ qlab pstar chain2")
        assert "✅ P* of chain2" in out

    def test_json_is_deterministic(self, capsys):
        _, first = run_json(capsys, "check-algebra", "lukasiewicz3")
        _, second = run_json(capsys, "check-algebra", "lukasiewicz3")
        assert first == second

    def test_overrides_last_one_run(self):
        seed, equality = config.seed, config.equality
        report, fmt = run(["catalog", "--seed", "5", "--equality", "symmetric"])
        assert fmt == "text"
        assert report.config["seed"] == 5
        assert report.config["equality"] == "symmetric"
        assert (config.seed, config.equality) == (seed, equality)

        report, _ = run(["catalog"])
        assert report.config["seed"] == seed

    def test_invalid_configuration(self, capsys):
        jobs = config.jobs
        code, report = run_json(capsys, "catalog", "--jobs", "0")
        assert code == EXIT_INPUT_ERROR
        assert report["error"] == "Invalid configuration"
        assert config.jobs == jobs

    def test_no_command(self, capsys):
        assert main([]) == EXIT_INPUT_ERROR

    def test_usage_error(self, capsys):
        assert main(["hierarchy"]) == 2
        assert main(["catalog", "--equality", "loose"]) == 2

    def test_help(self, capsys):
        assert main(["--help"]) == 0

    def test_parser_lists_commands(self):
        parser = build_parser()
        args = parser.parse_args(["crosscheck", "chain2", "--no-membership"])
        assert args.no_membership is True
        assert args.depth == 2

    def test_replay(self, capsys, tmp_path):
        code, report = run_json(capsys, "pstar", "dual-godel3")
        path = tmp_path / "report.json"
        path.write_text(json.dumps(report), encoding="utf-8")
        assert load_replay(str(path)) == (["pstar", "dual-godel3", "--format", "json"], None)

        assert main(["--replay", str(path)]) == code
        replayed = json.loads(capsys.readouterr().out)
        assert replayed == report

    def test_replay_unreadable(self, tmp_path, capsys):
        path = tmp_path / "broken.json"
        path.write_text("{}", encoding="utf-8")
        assert main(["--replay", str(path)]) == EXIT_INPUT_ERROR
        assert "Cannot replay" in capsys.readouterr().out


class TestMockedInternals:
    """Tests that replace sweeps and constructions with mocks."""

    def test_crosscheck_passes_options(self, capsys, mocker):
        captured = {}

        def fake_cross_check(model, depth, connectives, membership):
            captured.update(
                depth=depth, connectives=connectives, membership=membership, jobs=config.jobs
            )
            return LawReport("cross-check")

        mocker.patch("cli.cross_check", side_effect=fake_cross_check)
        code, _ = run_json(
            capsys,
            "crosscheck",
            "chain2",
            "--depth",
            "1",
            "--connectives",
            "->,<>",
            "--no-membership",
            "--jobs",
            "2",
        )
        assert code == EXIT_OK
        assert captured == {"depth": 1, "connectives": ["->", "<>"], "membership": False, "jobs": 2}

    def test_bijection_violation_fails_report(self, capsys, mocker):
        mocker.patch("cli.build_bijection", side_effect=TheoremViolation("prime is not injective"))
        code, report = run_json(capsys, "hierarchy", "chain2", "--levels", "2")
        assert code == EXIT_FAIL
        laws = {law["subject"]: law for law in report["sections"][0]["laws"]}
        assert laws["bijection"]["checks"] == [
            {
                "name": "prime-is-bijection",
                "status": "fail",
                "counterexample": {"error": "prime is not injective"},
            }
        ]

    def test_hierarchy_uses_configured_cache(self, capsys, mocker, tmp_path):
        mocker.patch.object(config, "cache_dir", str(tmp_path))
        code, _ = run_json(capsys, "hierarchy", "dual-godel3", "--levels", "2")
        assert code == EXIT_OK
        assert len(list(tmp_path.glob("*.json"))) == 4
