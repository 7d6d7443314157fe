"""Check results, law reports and command reports.

Every verifier in qlab returns a LawReport instead of raising on a failed law.
The CLI wraps law reports into a Report that renders as text or as JSON.
"""

import json
import logging
import time
from dataclasses import dataclass, field
from typing import Any, Iterable, Optional

logger = logging.getLogger(__name__)

PASS = "pass"
FAIL = "fail"
HYPOTHESIS_UNMET = "hypothesis-unmet"
INFO = "info"

STATUSES = (PASS, FAIL, HYPOTHESIS_UNMET, INFO)

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_INPUT_ERROR = 2
EXIT_BUDGET = 3


@dataclass
class CheckResult:
    """Outcome of a single named check."""

    name: str
    status: str
    counterexample: Optional[dict] = None
    detail: str = ""

    def __post_init__(self):
        if self.status not in STATUSES:
            raise ValueError(f"Unknown status: {self.status}")

    @property
    def failed(self) -> bool:
        return self.status == FAIL

    def as_dict(self) -> dict:
        data: dict[str, Any] = {"name": self.name, "status": self.status}
        if self.counterexample is not None:
            data["counterexample"] = self.counterexample
        if self.detail:
            data["detail"] = self.detail
        return data


def check(
    name: str,
    holds: bool,
    counterexample: Optional[dict] = None,
    detail: str = "",
    asserted: bool = True,
) -> CheckResult:
    """Build a CheckResult from a boolean outcome.

    Args:
        name: Check name.
        holds: Whether the property held everywhere.
        counterexample: First witness of failure, if any.
        detail: Free-form note.
        asserted: False records the outcome as an observation only.

    Returns:
        CheckResult: pass/fail, or info for observations.
    """
    if not asserted:
        return CheckResult(name, INFO, None if holds else counterexample, detail)
    return CheckResult(name, PASS if holds else FAIL, None if holds else counterexample, detail)


@dataclass
class LawReport:
    """Per-law outcomes for one subject (an algebra, a nucleus, a model...)."""

    subject: str
    checks: list[CheckResult] = field(default_factory=list)

    def add(self, result: CheckResult) -> CheckResult:
        self.checks.append(result)
        if result.failed:
            logger.debug(f"{self.subject}: {result.name} failed at {result.counterexample}")
        return result

    def extend(self, results: Iterable[CheckResult]) -> None:
        for result in results:
            self.add(result)

    def merge(self, other: "LawReport", prefix: str = "") -> None:
        """Append another report's checks, optionally prefixing their names."""
        for result in other.checks:
            name = f"{prefix}{result.name}" if prefix else result.name
            self.add(CheckResult(name, result.status, result.counterexample, result.detail))

    @property
    def passed(self) -> bool:
        return not any(result.failed for result in self.checks)

    @property
    def failures(self) -> list[CheckResult]:
        return [result for result in self.checks if result.failed]

    @property
    def first_failure(self) -> Optional[CheckResult]:
        failures = self.failures
        return failures[0] if failures else None

    def names(self) -> list[str]:
        return [result.name for result in self.checks]

    def __getitem__(self, name: str) -> CheckResult:
        for result in self.checks:
            if result.name == name:
                return result
        raise KeyError(name)

    def __contains__(self, name: str) -> bool:
        return any(result.name == name for result in self.checks)

    def as_dict(self) -> dict:
        return {
            "subject": self.subject,
            "passed": self.passed,
            "checks": [result.as_dict() for result in self.checks],
        }


@dataclass
class Section:
    """A titled block of a command report: law reports plus free data."""

    title: str
    laws: list[LawReport] = field(default_factory=list)
    data: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(report.passed for report in self.laws)

    def as_dict(self) -> dict:
        return {
            "title": self.title,
            "passed": self.passed,
            "data": self.data,
            "laws": [report.as_dict() for report in self.laws],
        }


@dataclass
class Report:
    """Result of one CLI command.

    The structured form excludes wall time so that identical inputs,
    configuration and seed give byte-identical JSON.
    """

    command: list[str]
    config: dict
    sections: list[Section] = field(default_factory=list)
    error: Optional[str] = None
    error_code: int = EXIT_OK
    started: float = field(default_factory=time.perf_counter, compare=False)
    wall_time: float = field(default=0.0, compare=False)

    def section(self, title: str, data: Optional[dict] = None) -> Section:
        new = Section(title=title, data=data or {})
        self.sections.append(new)
        return new

    def fail_input(self, message: str, code: int = EXIT_INPUT_ERROR) -> "Report":
        """Mark the report as refused before any check ran."""
        self.error = message
        self.error_code = code
        return self

    def finish(self) -> "Report":
        self.wall_time = time.perf_counter() - self.started
        return self

    @property
    def passed(self) -> bool:
        return self.error is None and all(section.passed for section in self.sections)

    @property
    def exit_code(self) -> int:
        if self.error is not None:
            return self.error_code
        return EXIT_OK if self.passed else EXIT_FAIL

    def as_dict(self) -> dict:
        return {
            "command": self.command,
            "config": self.config,
            "passed": self.passed,
            "exit_code": self.exit_code,
            "error": self.error,
            "sections": [section.as_dict() for section in self.sections],
        }

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), indent=2, ensure_ascii=False)

    def to_text(self) -> str:
        lines = [f"$ qlab {' '.join(self.command)}"]
        if self.error is not None:
            lines.append(f"❌ {self.error}")
        for section in self.sections:
            mark = "✅" if section.passed else "❌"
            lines.append(f"{mark} {section.title}")
            for key, value in section.data.items():
                lines.append(f"    {key}: {_format_value(value)}")
            for report in section.laws:
                lines.append(f"  {report.subject}")
                for result in report.checks:
                    lines.append(f"    {_status_mark(result.status)} {result.name}")
                    if result.counterexample is not None:
                        lines.append(f"        counterexample: {result.counterexample}")
                    if result.detail:
                        lines.append(f"        {result.detail}")
        lines.append(f"({self.wall_time:.2f}s)")
        return "\n".join(lines)


def _status_mark(status: str) -> str:
    return {PASS: "✓", FAIL: "✗", HYPOTHESIS_UNMET: "-", INFO: "·"}[status]


def _format_value(value: Any) -> str:
    if isinstance(value, (list, dict)):
        return json.dumps(value, ensure_ascii=False)
    return str(value)
