import math

import pytest

from condwalk import (Censored, IncrementLaw, MismatchedTilt, Statistic,
                      TargetFunction, cramer_tilt, mc_estimate, mc_estimates,
                      mc_scaled_cdf_curve, mc_tilted_survival,
                      mc_unconditioned, simulate_exit)
from condwalk.oracle import sparre_andersen_survival
from condwalk.rngstream import chunk_generator

from conftest import combined_z, within_stderr


def test_simulate_exit_deterministic_paths():
    down = IncrementLaw.finite([-1.0], [1.0])
    s = simulate_exit(down, 0.5, 10, chunk_generator(0, 0))
    assert s.exit_time == 1 and not s.survived and s.terminal == -0.5

    up = IncrementLaw.finite([1.0], [1.0])
    s = simulate_exit(up, 0.0, 10, chunk_generator(0, 0))
    assert s.survived and s.exit_time == Censored(10) and s.terminal == 10.0


def test_tie_at_zero_survives():
    law = IncrementLaw.finite([-1.0, 1.0], [0.5, 0.5])
    # path from x=1 taking -1 lands exactly on 0 and must survive
    est = mc_estimate(law, 1.0, 1, Statistic.survival(), 4096, seed=5)
    assert est.mean == 1.0 and est.stderr == 0.0


def test_survival_small_n_sparre_andersen(gauss_law):
    est = mc_estimate(gauss_law, 0.0, 3, Statistic.survival(), 10 ** 6, seed=42)
    assert within_stderr(est, 5.0 / 16.0)
    est = mc_estimate(gauss_law, 0.0, 10, Statistic.survival(), 10 ** 6, seed=43)
    assert within_stderr(est, sparre_andersen_survival(10))


def test_exit_at_two(gauss_law):
    est = mc_estimate(gauss_law, 0.0, 2, Statistic.exit_at_n(), 10 ** 6, seed=44)
    assert within_stderr(est, 0.125)


def test_unreachable_interval_is_zero(gauss_law):
    est = mc_estimate(gauss_law, 0.0, 5, Statistic.interval(1e9, 1.0),
                      10 ** 5, seed=4)
    assert est.mean == 0.0


def test_determinism_across_thread_counts(gauss_law):
    kw = dict(law=gauss_law, x=0.0, n=10, stat=Statistic.survival(),
              samples=3 * 10 ** 5, seed=99)
    assert mc_estimate(**kw, threads=1) == mc_estimate(**kw, threads=4)


def test_shared_paths_across_statistics(gauss_law):
    surv, killed = mc_estimates(
        gauss_law, 0.0, 8, [Statistic.survival(), Statistic.killed_position()],
        10 ** 5, seed=17)
    solo = mc_estimate(gauss_law, 0.0, 8, Statistic.survival(), 10 ** 5, seed=17)
    assert surv == solo
    assert killed.mean > 0.0


def test_survival_monotone_in_n_and_x(gauss_law):
    by_n = [mc_estimate(gauss_law, 0.0, n, Statistic.survival(), 2 * 10 ** 5,
                        seed=50 + n) for n in (5, 10, 20)]
    for a, b in zip(by_n, by_n[1:]):
        assert combined_z(b, a) <= 3.0
    by_x = [mc_estimate(gauss_law, x, 10, Statistic.survival(), 2 * 10 ** 5,
                        seed=60 + int(2 * x)) for x in (0.0, 1.0, 2.0)]
    for a, b in zip(by_x, by_x[1:]):
        assert combined_z(a, b) <= 3.0


def test_distribution_free_survival_at_zero():
    laws = [IncrementLaw.gaussian(0, 1), IncrementLaw.laplace(0, 1),
            IncrementLaw.uniform(-1, 1)]
    for n in (5, 10):
        ests = [mc_estimate(law, 0.0, n, Statistic.survival(), 4 * 10 ** 5,
                            seed=70 + n + i) for i, law in enumerate(laws)]
        exact = sparre_andersen_survival(n)
        for e in ests:
            assert within_stderr(e, exact)
        for a in ests:
            for b in ests:
                assert abs(combined_z(a, b)) <= 4.0


def test_exit_at_consistency_with_survival_differencing(gauss_law):
    n = 6
    exit_est = mc_estimate(gauss_law, 0.0, n, Statistic.exit_at_n(),
                           4 * 10 ** 5, seed=81)
    s_prev = mc_estimate(gauss_law, 0.0, n - 1, Statistic.survival(),
                         4 * 10 ** 5, seed=82)
    s_now = mc_estimate(gauss_law, 0.0, n, Statistic.survival(),
                        4 * 10 ** 5, seed=83)
    diff = s_prev.mean - s_now.mean
    se = math.sqrt(exit_est.stderr ** 2 + s_prev.stderr ** 2 + s_now.stderr ** 2)
    assert abs(exit_est.mean - diff) <= 4.0 * se


def test_dual_symmetry_for_symmetric_law(gauss_law):
    a = mc_estimate(gauss_law, 0.5, 8, Statistic.survival(), 3 * 10 ** 5, seed=91)
    b = mc_estimate(gauss_law, 0.5, 8, Statistic.survival(dual=True),
                    3 * 10 ** 5, seed=92)
    assert abs(combined_z(a, b)) <= 4.0


def test_target_statistic_matches_interval(gauss_law):
    f = TargetFunction.indicator(0.0, 1.0)
    a = mc_estimate(gauss_law, 0.0, 6, Statistic.target(f, y_shift=2.0),
                    10 ** 5, seed=33)
    b = mc_estimate(gauss_law, 0.0, 6, Statistic.interval(2.0, 1.0), 10 ** 5,
                    seed=33)
    # same paths, same event up to the half-open right endpoint (null set)
    assert a.mean == pytest.approx(b.mean, abs=1e-12)


# -- scaled cdf curve -----------------------------------------------------------


def test_scaled_cdf_reduces_to_survival(gauss_law):
    curve = mc_scaled_cdf_curve(gauss_law, 0.0, 10, [100.0], 10 ** 5, seed=5)
    surv = mc_estimate(gauss_law, 0.0, 10, Statistic.survival(), 10 ** 5, seed=5)
    assert curve[0] == surv


def test_scaled_cdf_at_zero_is_null_event(gauss_law):
    curve = mc_scaled_cdf_curve(gauss_law, 0.0, 10, [0.0], 10 ** 5, seed=6)
    assert curve[0].mean == 0.0


def test_scaled_cdf_conditional_shape(gauss_law):
    # the conditional law at n=400 still sits ~4.5% above the limit shape
    # at t=1; the band accommodates that finite-n offset plus noise
    curve = mc_scaled_cdf_curve(gauss_law, 0.0, 400, [1.0, 50.0],
                                2 * 10 ** 6, seed=9, threads=2)
    ratio = curve[0].mean / curve[1].mean
    assert 0.95 * (1 - math.exp(-0.5)) <= ratio <= 1.05 * (1 - math.exp(-0.5))


def test_scaled_cdf_requires_sorted_grid(gauss_law):
    with pytest.raises(ValueError):
        mc_scaled_cdf_curve(gauss_law, 0.0, 5, [1.0, 0.5], 10 ** 4, seed=1)


# -- tilted estimation -----------------------------------------------------------


def test_tilted_agrees_with_direct_at_small_n():
    law = IncrementLaw.gaussian(-0.5, 1.0)
    tilt = cramer_tilt(law)
    for n in (3, 5, 10):
        direct = mc_estimate(law, 0.0, n, Statistic.survival(), 10 ** 6,
                             seed=100 + n)
        tilted = mc_tilted_survival(law, tilt, 0.0, n, Statistic.survival(),
                                    10 ** 6, seed=200 + n)
        assert abs(combined_z(direct, tilted)) <= 4.0


def test_identity_tilt_reproduces_direct(gauss_law):
    tilt = cramer_tilt(gauss_law)
    a = mc_tilted_survival(gauss_law, tilt, 1.0, 10, Statistic.survival(),
                           10 ** 5, seed=9)
    b = mc_estimate(gauss_law, 1.0, 10, Statistic.survival(), 10 ** 5, seed=9)
    assert a == b


def test_mismatched_tilt_rejected(gauss_law):
    other = cramer_tilt(IncrementLaw.gaussian(-0.5, 1.0))
    with pytest.raises(MismatchedTilt):
        mc_tilted_survival(gauss_law, other, 0.0, 5, Statistic.survival(),
                           10 ** 4, seed=1)


def test_degenerate_law_cannot_be_tilted():
    from condwalk import NoTiltExists
    with pytest.raises(NoTiltExists):
        cramer_tilt(IncrementLaw.finite([-1.0], [1.0]))


# -- unconditioned ---------------------------------------------------------------


def test_unconditioned_interval_matches_normal_mass(gauss_law):
    from condwalk.special import norm_cdf
    n = 100
    est = mc_unconditioned(gauss_law, n, Statistic.interval(0.0, 5.0),
                           4 * 10 ** 5, seed=55)
    exact = float(norm_cdf(0.5) - norm_cdf(0.0))
    assert within_stderr(est, exact)
