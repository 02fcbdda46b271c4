"""Acceptance gates, one test per criterion, each at its stated tolerance and runtime bound.

Run ``python tests/test_acceptance.py`` for a plain pass/fail listing.
"""

import sys

import pytest

from localize import verify


@pytest.fixture
def report(capsys):
    def emit(result):
        with capsys.disabled():
            print(f"\n{result.line()}")
        return result
    return emit


@pytest.mark.parametrize("criterion", verify.CRITERIA, ids=lambda c: c.__name__)
def test_criterion(criterion, report):
    kwargs = {"workers": 1} if criterion in verify._MC else {}
    result = report(criterion(**kwargs))
    assert result.passed, result.line()
    assert result.runtime_ok, f"runtime {result.runtime:.2f}s exceeds {result.runtime_limit}s"


def test_reproducible_across_worker_counts_separately():
    for workers in (1, 3):
        assert verify.reproducibility(workers=workers).ok


if __name__ == "__main__":
    results = verify.run_all()
    for r in results:
        print(r.line())
    sys.exit(0 if all(r.ok for r in results) else 1)
