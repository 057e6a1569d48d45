#!/usr/bin/env python3
"""
Test report formatting and template rendering.

This test suite validates:
- key<TAB>value report lines, float formatting and NA fields
- Bench header, rows and failure rows
- Template rendering
"""

import sys
import os
from pathlib import Path

# Add parent directory to path
sys.path.insert(0, str(Path(__file__).parent.parent))

from hyperclus.config import REPORT_KEYS
from hyperclus.reports import (
    RunReport,
    bench_failure_row,
    bench_header,
    bench_row,
    format_float,
    format_report,
    render,
)


def sample_report(**overrides):
    values = dict(
        dataset="toy",
        method="hyperclus-g",
        k=2,
        strategy="largest",
        ncut=0.25,
        lambda2=0.2,
        relative_error=0.25,
        f1s=[1.0, 0.5],
        weighted_f1=0.75,
        seconds=None,
    )
    values.update(overrides)
    return RunReport(**values)


def test_format_float():
    assert format_float(None) == "NA"
    assert format_float(float("nan")) == "NA"
    assert format_float(1.0) == "1"
    assert format_float(1 / 3) == "0.3333333333"
    print("✓ Float formatting")


def test_format_report():
    """Test one line per key, in order, with NA for missing values"""
    lines = format_report(sample_report()).splitlines()
    assert [line.split("\t")[0] for line in lines] == REPORT_KEYS
    values = dict(line.split("\t") for line in lines)
    assert values["f1s"] == "1,0.5"
    assert values["seconds"] == "NA"

    values = sample_report(f1s=[], weighted_f1=None, seconds=1.23456).fields()
    assert values["f1s"] == "NA" and values["weighted_f1"] == "NA"
    assert values["seconds"] == "1.235"
    print("✓ Report lines")


def test_bench_rows():
    """Test bench rows line up with the header"""
    header = bench_header().rstrip("\n").split("\t")
    assert header == REPORT_KEYS + ["status"]
    row = bench_row(sample_report(), "OFF-TARGET expected 0.3").rstrip("\n").split("\t")
    assert len(row) == len(header)
    assert row[-1] == "OFF-TARGET expected 0.3"

    failure = bench_failure_row("car", "star", 2, "largest", "Graph is\ndisconnected").rstrip("\n").split("\t")
    assert len(failure) == len(header)
    assert failure[:4] == ["car", "star", "2", "largest"]
    assert failure[4] == "NA"
    assert failure[-1] == "FAILED: Graph is disconnected"
    print("✓ Bench rows")


def test_render_verify_summary():
    """Test the property suite summary lists every property and the failures"""
    rows = [{"name": "row-stochastic", "passed": 1, "failed": 1}, {"name": "cheeger", "passed": 2, "failed": 0}]
    failures = [{"seed": 8, "name": "row-stochastic", "detail": "max |row sum - 1| = 5.00e-01"}]
    text = render("verify_summary.txt.j2", trials=2, seed=7, n_max=6, rows=rows, failures=failures)
    assert "property suite: 2 trial(s), n <= 6, seeds 7..8" in text
    assert "FAIL  1/2" in text and "PASS  2/2" in text
    assert "seed 8  row-stochastic: max |row sum - 1| = 5.00e-01" in text
    assert "hyperclus verify --n-max 6 --trials 1 --seed <seed>" in text
    print("✓ Verify summary template")


def run_all_tests():
    """Run all report tests"""
    tests = [
        test_format_float,
        test_format_report,
        test_bench_rows,
        test_render_verify_summary,
    ]

    print("\nRunning Report Tests")
    print("=" * 50)

    failed = []
    for test in tests:
        try:
            test()
        except AssertionError as e:
            print(f"✗ {test.__name__}: {e}")
            failed.append(test.__name__)
        except Exception as e:
            print(f"✗ {test.__name__}: Unexpected error - {e}")
            failed.append(test.__name__)

    print("=" * 50)
    if not failed:
        print(f"✅ All {len(tests)} report tests passed!")
        return True
    else:
        print(f"❌ {len(failed)} tests failed: {', '.join(failed)}")
        return False


if __name__ == "__main__":
    os.chdir(Path(__file__).parent.parent)
    success = run_all_tests()
    sys.exit(0 if success else 1)
