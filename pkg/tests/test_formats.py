"""Tests for document models and report rendering."""

import json
import os
import sys

import pytest
from pydantic import ValidationError

# Add src directory to path
sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from formats import (  # noqa: E402
    AlgebraDocument,
    FrameDocument,
    ModelDocument,
    load_document,
    parse_text,
)
from reports import (  # noqa: E402
    EXIT_BUDGET,
    EXIT_FAIL,
    EXIT_OK,
    FAIL,
    INFO,
    PASS,
    CheckResult,
    LawReport,
    Report,
    check,
)


class TestAlgebraDocument:
    """Tests for the algebra file shape."""

    def test_chain_shorthand(self):
        doc = AlgebraDocument.model_validate({"chain": {"kind": "godel", "size": 3}})
        assert doc.chain.size == 3
        assert doc.names is None

    def test_chain_too_small(self):
        with pytest.raises(ValidationError):
            AlgebraDocument.model_validate({"chain": {"kind": "godel", "size": 1}})

    def test_chain_and_tables_conflict(self):
        with pytest.raises(ValidationError, match="either"):
            AlgebraDocument.model_validate(
                {"chain": {"kind": "godel", "size": 2}, "names": ["0", "1"]}
            )

    def test_missing_table(self):
        with pytest.raises(ValidationError, match="needs"):
            AlgebraDocument.model_validate(
                {"names": ["0", "1"], "leq": [[True, True], [False, True]]}
            )

    def test_non_square_table(self):
        with pytest.raises(ValidationError, match="2x2"):
            AlgebraDocument.model_validate(
                {"names": ["0", "1"], "leq": [[True, True]], "prod": [[0, 0], [0, 1]]}
            )

    def test_product_entry_out_of_range(self):
        with pytest.raises(ValidationError, match="not an element index"):
            AlgebraDocument.model_validate(
                {
                    "names": ["0", "1"],
                    "leq": [[True, True], [False, True]],
                    "prod": [[0, 0], [0, 2]],
                }
            )

    def test_unknown_field_rejected(self):
        with pytest.raises(ValidationError):
            AlgebraDocument.model_validate({"chain": {"kind": "godel", "size": 2}, "extra": 1})


class TestFrameAndModelDocuments:
    """Tests for frame and model file shapes."""

    def test_dual_of_name(self):
        doc = FrameDocument.model_validate({"dual_of": "godel3", "conucleus": [0, 1, 2]})
        assert doc.dual_of == "godel3"
        assert doc.conucleus == [0, 1, 2]

    def test_frame_needs_tables(self):
        with pytest.raises(ValidationError):
            FrameDocument.model_validate({"names": ["1", "inf"]})

    def test_model_defaults(self):
        doc = ModelDocument.model_validate({"frame": "chain2"})
        assert doc.delta == "identity"
        assert doc.domain == []
        assert doc.atomic == {}

    def test_model_duplicate_constants(self):
        with pytest.raises(ValidationError, match="distinct"):
            ModelDocument.model_validate({"frame": "chain2", "domain": ["a", "a"]})

    def test_model_constant_must_be_identifier(self):
        with pytest.raises(ValidationError, match="identifier"):
            ModelDocument.model_validate({"frame": "chain2", "domain": ["not a name"]})


class TestLoadDocument:
    """Tests for reading YAML/JSON files."""

    def test_load_yaml(self, write_document):
        path = write_document({"chain": {"kind": "lukasiewicz", "size": 4}})
        data, error = load_document(path)
        assert error is None
        assert data["chain"]["size"] == 4

    def test_load_json(self, tmp_path):
        path = tmp_path / "algebra.json"
        path.write_text(json.dumps({"chain": {"kind": "godel", "size": 2}}))
        data, error = load_document(str(path))
        assert error is None
        assert data["chain"]["kind"] == "godel"

    def test_missing_file(self, tmp_path):
        data, error = load_document(str(tmp_path / "absent.yaml"))
        assert data is None
        assert "File not found" in error

    def test_empty_file(self, tmp_path):
        path = tmp_path / "empty.yaml"
        path.write_text("")
        data, error = load_document(str(path))
        assert data is None
        assert error == "Empty document"

    def test_not_a_mapping(self):
        data, error = parse_text("- 1\n- 2\n")
        assert data is None
        assert "mapping" in error

    def test_invalid_yaml(self):
        data, error = parse_text("names: [0, 1\n")
        assert data is None
        assert "Invalid YAML" in error


class TestReports:
    """Tests for check results and report rendering."""

    def test_check_pass_drops_counterexample(self):
        result = check("law", True, {"x": "1"})
        assert result.status == PASS
        assert result.counterexample is None

    def test_check_fail_keeps_counterexample(self):
        result = check("law", False, {"x": "1"})
        assert result.status == FAIL
        assert result.counterexample == {"x": "1"}

    def test_observation_is_info(self):
        assert check("law", False, {"x": "0"}, asserted=False).status == INFO

    def test_unknown_status_rejected(self):
        with pytest.raises(ValueError, match="Unknown status"):
            CheckResult("law", "maybe")

    def test_info_does_not_fail_report(self):
        laws = LawReport("subject")
        laws.add(check("observed", False, asserted=False))
        assert laws.passed

    def test_merge_prefixes_names(self):
        first, second = LawReport("a"), LawReport("b")
        second.add(check("inner", True))
        first.merge(second, prefix="sub/")
        assert first.names() == ["sub/inner"]
        assert "sub/inner" in first
        assert first["sub/inner"].status == PASS

    def test_exit_codes(self):
        report = Report(["catalog"], {})
        assert report.exit_code == EXIT_OK

        section = report.section("s")
        laws = LawReport("x")
        laws.add(check("broken", False))
        section.laws.append(laws)
        assert report.exit_code == EXIT_FAIL

        refused = Report(["hierarchy"], {}).fail_input("too big", EXIT_BUDGET)
        assert refused.exit_code == EXIT_BUDGET

    def test_json_excludes_wall_time(self):
        first = Report(["catalog"], {"seed": 1}).finish()
        second = Report(["catalog"], {"seed": 1}).finish()
        assert first.to_json() == second.to_json()
        assert "wall" not in first.to_json()

    def test_text_rendering_marks_failures(self):
        report = Report(["check-algebra", "godel3"], {})
        laws = LawReport("godel3")
        laws.add(check("adjunction", False, {"x": "0"}))
        report.section("algebra godel3").laws.append(laws)
        text = report.finish().to_text()
        assert "❌ algebra godel3" in text
        assert "counterexample" in text
