import math
import warnings

import pytest

from condwalk import (CensoringExcess, DriftedLaw, IncrementLaw, TableParams,
                      build_harmonic_table, cramer_tilt, estimate_V_killed,
                      estimate_V_ladder, harmonicity_residual, kappa_constant,
                      kappa_extension_form, weighted_table_integral)
from condwalk.harmonic import default_grid

from conftest import within_stderr

UNIFORM = IncrementLaw.uniform(-1.0, 1.0)


@pytest.fixture(scope="module")
def gauss_table(gauss_law):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", CensoringExcess)
        return build_harmonic_table(gauss_law, params=TableParams(seed=10),
                                    threads=2)


@pytest.fixture(scope="module")
def uniform_table():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", CensoringExcess)
        return build_harmonic_table(UNIFORM, params=TableParams(seed=11),
                                    threads=2)


def test_ladder_value_at_zero_spitzer(gauss_law):
    est = estimate_V_ladder(gauss_law, 0.0, cap=10 ** 6, samples=10 ** 5, seed=1)
    assert est.mean == pytest.approx(2 ** -0.5, rel=0.02)
    assert est.censor_rate < 1e-3


def test_ladder_value_uniform_spitzer():
    est = estimate_V_ladder(UNIFORM, 0.0, cap=10 ** 6, samples=10 ** 5, seed=2)
    assert est.mean == pytest.approx(6 ** -0.5, rel=0.02)


def test_ladder_rejects_drifted_law():
    with pytest.raises(DriftedLaw):
        estimate_V_ladder(IncrementLaw.gaussian(-0.5, 1), 0.0, samples=10 ** 3)


def test_ladder_censoring_warning():
    law = IncrementLaw.gaussian(0, 1)
    with pytest.warns(CensoringExcess):
        estimate_V_ladder(law, 50.0, cap=10 ** 3, samples=2 * 10 ** 3, seed=3)


def test_killed_exact_small_cases():
    law = IncrementLaw.finite([-1.0, 1.0], [0.5, 0.5])
    for n, seed in ((1, 3), (2, 4)):
        est = estimate_V_killed(law, 0.0, n, 10 ** 5, seed)
        assert within_stderr(est, 0.5)


def test_killed_increases_towards_ladder(gauss_law):
    ests = [estimate_V_killed(gauss_law, 0.0, n, 2 * 10 ** 5, seed=20 + n)
            for n in (100, 1000, 10 ** 4)]
    means = [e.mean for e in ests]
    assert means[0] <= means[1] + 4 * ests[1].stderr
    assert means[1] <= means[2] + 4 * ests[2].stderr
    assert ests[-1].mean == pytest.approx(2 ** -0.5, rel=0.05)


def test_ladder_and_killed_agree(gauss_law, gauss_table):
    for x in (0.0, 1.0, 4.0):
        killed = estimate_V_killed(gauss_law, x, 10 ** 4, 10 ** 5, seed=31)
        ladder = gauss_table(x)
        tol = 4 * killed.stderr + 0.03 * max(1.0, ladder)
        assert abs(killed.mean - ladder) <= tol


# -- table invariants -----------------------------------------------------------


def test_table_lower_bound_and_monotone(gauss_table):
    for x, v in zip(gauss_table.grid, gauss_table.values):
        assert v.mean >= x - 4.0 * v.stderr
    means = [v.mean for v in gauss_table.values]
    errs = [v.stderr for v in gauss_table.values]
    for i in range(len(means) - 1):
        slack = 4.0 * math.hypot(errs[i], errs[i + 1])
        assert means[i] <= means[i + 1] + slack


def test_table_linear_growth_at_top(gauss_table):
    top = gauss_table.grid[-1]
    assert top >= 32.0
    assert 0.97 <= gauss_table(top) / top <= 1.08


def test_table_extrapolation_query(gauss_table):
    v64 = gauss_table(64.0)
    assert 64.0 <= v64 <= 66.0
    assert v64 == pytest.approx(64.0 + gauss_table.extrapolation_offset)


def test_default_grid_shape(gauss_law):
    g = default_grid(gauss_law.sigma)
    assert g[0] == 0.0 and g[-1] == pytest.approx(32.0)
    assert list(g) == sorted(g)


def test_tilted_table_matches_plain_gaussian(gauss_table):
    drifted = IncrementLaw.gaussian(-0.5, 1.0)
    tilt = cramer_tilt(drifted)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", CensoringExcess)
        tab = build_harmonic_table(drifted, params=TableParams(seed=10),
                                   tilt=tilt, threads=2)
    # the tilted law IS gaussian(0,1); same seeds give identical estimates
    assert tab.tilt == 0.5
    for a, b in zip(tab.values, gauss_table.values):
        assert a.mean == b.mean


# -- harmonicity ------------------------------------------------------------------


def test_harmonicity_residual_consistent_with_zero(gauss_law, gauss_table):
    for x in (0.0, 0.5, 1.0, 2.0, 5.0):
        r = harmonicity_residual(gauss_law, gauss_table, x, 2 * 10 ** 5, seed=71)
        assert abs(r.mean) <= 4.0 * (r.stderr + 0.02)


def test_harmonicity_residual_deep_extrapolation(gauss_law, gauss_table):
    r = harmonicity_residual(gauss_law, gauss_table, 50.0, 2 * 10 ** 5, seed=72)
    assert abs(r.mean) <= 0.05


def test_degenerate_zero_table_is_fixed_point(gauss_law, gauss_table):
    from condwalk import HarmonicTable, McEstimate
    zeros = tuple(McEstimate(0.0, 0.0, 1, 0) for _ in gauss_table.grid)
    ztab = HarmonicTable(gauss_table.grid, zeros, False, None, -1e9)
    r = harmonicity_residual(gauss_law, ztab, 1.0, 10 ** 4, seed=73)
    assert r.mean == 0.0


# -- kappa -----------------------------------------------------------------------


def test_kappa_gaussian(gauss_law, gauss_table):
    k = kappa_constant(gauss_law, gauss_table)
    assert k == pytest.approx(0.5, rel=0.05)
    k2 = kappa_extension_form(gauss_law, gauss_table)
    assert abs(k - k2) / k <= 0.03


def test_kappa_uniform(uniform_table):
    k = kappa_constant(UNIFORM, uniform_table)
    assert k == pytest.approx(1.0 / 6.0, rel=0.05)
    k2 = kappa_extension_form(UNIFORM, uniform_table)
    assert abs(k - k2) / k <= 0.03


def test_kappa_finite_support_forms_agree():
    law = IncrementLaw.finite([-1.0, 0.0, 1.0], [1 / 3, 1 / 3, 1 / 3])
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", CensoringExcess)
        tab = build_harmonic_table(law, params=TableParams(seed=12), threads=2)
    k = kappa_constant(law, tab)
    k2 = kappa_extension_form(law, tab)
    assert k > 0
    assert abs(k - k2) / k <= 0.02


def test_kappa_tilted_forms_agree():
    law = IncrementLaw.gaussian(-0.5, 1.0)
    tilt = cramer_tilt(law)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", CensoringExcess)
        tab = build_harmonic_table(law, params=TableParams(seed=13), dual=True,
                                   tilt=tilt, threads=2)
    k = kappa_constant(law, tab, tilt=tilt)
    k2 = kappa_extension_form(law, tab, tilt=tilt)
    assert k > 0
    assert abs(k - k2) / k <= 0.02


def test_weighted_table_integral_linear_oracle(gauss_table):
    # against the closed form for the fitted linear-plus-offset profile;
    # V deviates from it only near 0 where the weight is order one
    c = gauss_table.extrapolation_offset
    rate = 0.5
    linear = (c / rate + 1.0 / rate ** 2)
    got = weighted_table_integral(gauss_table, rate)
    assert got == pytest.approx(linear, rel=0.1)
    assert weighted_table_integral(gauss_table, 5.0) < got
