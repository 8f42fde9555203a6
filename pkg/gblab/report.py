"""Check records and the reports the command line prints."""

import csv
import dataclasses
import io
import json
import logging
import math
from collections.abc import Iterable
from collections.abc import Mapping
from dataclasses import dataclass
from dataclasses import field
from datetime import datetime
from datetime import timezone
from typing import Any
from typing import Final

logger = logging.getLogger(__name__)

CSV_COLUMNS: Final[tuple[str, ...]] = ("suite", "name", "computed", "expected", "tolerance", "passed", "detail")
FLOAT_DIGITS: Final[int] = 17


def _number(value: float | None) -> float | str | None:
    """JSON has no NaN or infinity; those are written as strings."""
    if value is None:
        return None
    value = float(value)
    if math.isfinite(value):
        return float(f"{value:.{FLOAT_DIGITS}g}")
    return str(value)


@dataclass(frozen=True)
class Check:
    """One comparison of a computed value against an expected one.

    ``passed`` is decided by the caller, so a check may compare anything; :meth:`close`
    covers the common ``|computed - expected| <= tolerance`` case.
    """

    name: str
    computed: float | None
    expected: float | None
    tolerance: float | None
    passed: bool
    detail: str = ""

    @staticmethod
    def close(name: str, computed: float, expected: float, tolerance: float, detail: str = "") -> "Check":
        passed = math.isfinite(computed) and abs(computed - expected) <= tolerance
        return Check(name, computed, expected, tolerance, passed, detail)

    @staticmethod
    def at_most(name: str, computed: float, bound: float, detail: str = "") -> "Check":
        passed = math.isfinite(computed) and computed <= bound
        return Check(name, computed, 0.0, bound, passed, detail)

    @staticmethod
    def exact(name: str, computed: int, expected: int, detail: str = "") -> "Check":
        return Check(name, float(computed), float(expected), 0.0, computed == expected, detail)

    @staticmethod
    def failure(name: str, error: Exception) -> "Check":
        return Check(name, None, None, None, False, f"{type(error).__name__}: {error}")

    def as_dict(self) -> dict[str, Any]:
        return {
            "name": self.name,
            "computed": _number(self.computed),
            "expected": _number(self.expected),
            "tolerance": _number(self.tolerance),
            "passed": self.passed,
            "detail": self.detail,
        }


@dataclass
class Report:
    """The checks of one suite, or of several when aggregated."""

    suite: str
    checks: list[Check] = field(default_factory=list)
    seconds: float | None = None
    config: Mapping[str, Any] = field(default_factory=dict)
    timestamp: str | None = None

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)

    @property
    def failures(self) -> list[Check]:
        return [check for check in self.checks if not check.passed]

    def add(self, check: Check) -> Check:
        level = logging.DEBUG if check.passed else logging.WARNING
        logger.log(level, "%s: %s %s", self.suite, check.name, "ok" if check.passed else "FAILED")
        self.checks.append(check)
        return check

    def extend(self, checks: Iterable[Check]) -> None:
        for check in checks:
            self.add(check)

    def stamp(self, *, enabled: bool = True) -> "Report":
        """Set the UTC timestamp, or drop it together with the wall time."""
        if enabled:
            self.timestamp = datetime.now(timezone.utc).replace(microsecond=0).isoformat()
        else:
            self.timestamp = None
            self.seconds = None
        return self

    def as_dict(self) -> dict[str, Any]:
        payload: dict[str, Any] = {
            "suite": self.suite,
            "passed": self.passed,
            "checks": [check.as_dict() for check in self.checks],
            "config": dict(self.config),
        }
        if self.seconds is not None:
            payload["seconds"] = round(self.seconds, 3)
        if self.timestamp is not None:
            payload["timestamp"] = self.timestamp
        return payload

    @staticmethod
    def from_dict(payload: Mapping[str, Any]) -> "Report":
        checks = [
            Check(
                str(entry["name"]),
                _read_number(entry.get("computed")),
                _read_number(entry.get("expected")),
                _read_number(entry.get("tolerance")),
                bool(entry["passed"]),
                str(entry.get("detail", "")),
            )
            for entry in payload.get("checks", [])
        ]
        return Report(
            str(payload["suite"]),
            checks,
            payload.get("seconds"),
            dict(payload.get("config", {})),
            payload.get("timestamp"),
        )


def _read_number(value: Any) -> float | None:
    return None if value is None else float(value)


def merge(suite: str, reports: Iterable[Report]) -> Report:
    """One report holding the checks of several, each prefixed with its suite."""
    merged = Report(suite)
    seconds = 0.0
    timed = False
    for report in reports:
        merged.checks.extend(
            dataclasses.replace(check, name=f"{report.suite}.{check.name}") for check in report.checks
        )
        if report.seconds is not None:
            seconds += report.seconds
            timed = True
        merged.config = report.config
    merged.seconds = seconds if timed else None
    return merged


def render_json(report: Report) -> str:
    return json.dumps(report.as_dict(), sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def render_csv(report: Report) -> str:
    buffer = io.StringIO()
    writer = csv.DictWriter(buffer, fieldnames=CSV_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for check in report.checks:
        row = check.as_dict()
        writer.writerow({"suite": report.suite, **row})
    return buffer.getvalue()


def _cell(value: float | None) -> str:
    return "-" if value is None else f"{value:.6g}"


def render_text(report: Report) -> str:
    width = max((len(check.name) for check in report.checks), default=4)
    lines = [f"suite {report.suite}: {'PASS' if report.passed else 'FAIL'} ({len(report.checks)} checks)"]
    for check in report.checks:
        status = "ok  " if check.passed else "FAIL"
        line = (
            f"  {status} {check.name:<{width}}  computed={_cell(check.computed)}"
            f"  expected={_cell(check.expected)}  tol={_cell(check.tolerance)}"
        )
        if check.detail:
            line += f"  ({check.detail})"
        lines.append(line)
    if report.seconds is not None:
        lines.append(f"  {report.seconds:.2f} s")
    return "\n".join(lines) + "\n"


RENDERERS = {"json": render_json, "csv": render_csv, "text": render_text}


def render(report: Report, output_format: str) -> str:
    try:
        renderer = RENDERERS[output_format]
    except KeyError:
        raise ValueError(f"Unknown report format {output_format!r}") from None
    return renderer(report)
