import math

import pytest


def within_stderr(estimate, truth, k=4.0, floor=0.0):
    """|mean - truth| <= k * stderr (+ floor for exact-hit cases)."""
    return abs(estimate.mean - truth) <= k * estimate.stderr + floor


def combined_z(a, b):
    se = math.hypot(a.stderr, b.stderr)
    if se == 0.0:
        return 0.0 if a.mean == b.mean else math.inf
    return (a.mean - b.mean) / se


@pytest.fixture(scope="session")
def gauss_law():
    from condwalk import IncrementLaw
    return IncrementLaw.gaussian(0.0, 1.0)
