import json
import logging
import math

import pytest

from gblab.errors import DomainError
from gblab.report import CSV_COLUMNS
from gblab.report import Check
from gblab.report import Report
from gblab.report import merge
from gblab.report import render
from gblab.report import render_csv
from gblab.report import render_json
from gblab.report import render_text


@pytest.fixture
def report():
    return Report(
        "thom",
        [Check.close("disk", 1.0, 1.0, 1e-6), Check.at_most("rays", 2e-3, 1e-8, "quadrature in t")],
        seconds=1.23456,
        config={"seed": 7},
    )


class TestCheck:
    """
    Tests for single check records.
    """

    @pytest.mark.parametrize(
        ("computed", "passed"),
        [
            pytest.param(1.0 + 1e-7, True, id="inside"),
            pytest.param(1.1, False, id="outside"),
            pytest.param(math.nan, False, id="nan"),
        ],
    )
    def test_close(self, computed, passed):
        """
        Test |computed - expected| <= tolerance.
        """
        assert Check.close("x", computed, 1.0, 1e-6).passed is passed

    def test_at_most(self):
        """
        Test one-sided bounds, which compare against zero.
        """
        check = Check.at_most("residual", 1e-9, 1e-8)

        assert check.passed
        assert check.expected == 0.0
        assert not Check.at_most("residual", math.inf, 1e-8).passed

    def test_exact(self):
        """
        Test integer comparisons.
        """
        assert Check.exact("betti", 3, 3).passed
        assert not Check.exact("betti", 3, 2).passed

    def test_failure(self):
        """
        Test that an exception becomes a failed check naming its type.
        """
        check = Check.failure("boundary", DomainError("bad chain"))

        assert not check.passed
        assert check.detail == "DomainError: bad chain"
        assert check.computed is None

    def test_non_finite_values(self):
        """
        Test that infinities are written as strings and missing values as null.
        """
        payload = Check("x", math.inf, None, 1e-3, False).as_dict()

        assert payload["computed"] == "inf"
        assert payload["expected"] is None
        assert payload["tolerance"] == 1e-3


class TestReport:
    """
    Tests for reports and their renderings.
    """

    def test_passed(self, report):
        """
        Test that one failed check fails the report.
        """
        assert not report.passed
        assert [check.name for check in report.failures] == ["rays"]

    def test_add_logs_failures(self, caplog):
        """
        Test that failed checks are logged as warnings.
        """
        report = Report("flatform")

        with caplog.at_level(logging.WARNING, logger="gblab.report"):
            report.add(Check.at_most("flatness_n3", 1.0, 1e-8))

        assert "flatness_n3 FAILED" in caplog.text

    def test_stamp(self, report):
        """
        Test that stamping sets a UTC time and unstamping drops the wall time too.
        """
        assert report.stamp().timestamp.endswith("+00:00")

        report.stamp(enabled=False)

        assert report.timestamp is None
        assert report.seconds is None
        assert sorted(report.as_dict()) == ["checks", "config", "passed", "suite"]

    def test_round_trip(self, report):
        """
        Test that a JSON report reads back into the same checks.
        """
        restored = Report.from_dict(json.loads(render_json(report)))

        assert restored.checks == report.checks
        assert restored.seconds == 1.235
        assert restored.config == {"seed": 7}

    def test_merge(self, report):
        """
        Test that merged checks carry their suite prefix.
        """
        other = Report("forms", [Check.close("stokes", 0.0, 0.0, 1e-10)], seconds=1.0)

        merged = merge("all", [report, other])

        assert [check.name for check in merged.checks] == ["thom.disk", "thom.rays", "forms.stokes"]
        assert merged.seconds == pytest.approx(2.23456)
        assert not merged.passed

    def test_csv(self, report):
        """
        Test the CSV header and one row per check.
        """
        lines = render_csv(report).splitlines()

        assert lines[0] == ",".join(CSV_COLUMNS)
        assert len(lines) == 3
        assert lines[2].startswith("thom,rays,")

    def test_text(self, report):
        """
        Test the human-readable rendering.
        """
        text = render_text(Report("complex", [Check.failure("homology", DomainError("n too large"))]))

        assert text.splitlines()[0] == "suite complex: FAIL (1 checks)"
        assert "computed=-" in text
        assert "(DomainError: n too large)" in text
        assert render(report, "text").splitlines()[0] == "suite thom: FAIL (2 checks)"

    def test_unknown_format(self, report):
        """
        Test that render refuses unknown formats.
        """
        with pytest.raises(ValueError, match="Unknown report format"):
            render(report, "xml")
