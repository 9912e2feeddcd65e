"""Product-limit estimator used by the survival-overlay command."""

import numpy as np
import pytest

from bvf._km import kaplan_meier, km_survival_at


def test_no_censoring_matches_empirical_survival():
    times = np.array([1.0, 2.0, 3.0])
    events = np.array([True, True, True])
    ts, surv = kaplan_meier(times, events)
    assert ts.tolist() == [1.0, 2.0, 3.0]
    assert surv == pytest.approx([2 / 3, 1 / 3, 0.0])


def test_value_between_event_times():
    times = np.array([1.0, 2.0, 3.0])
    events = np.array([True, True, True])
    ts, surv = kaplan_meier(times, events)
    grid = km_survival_at(np.array([0.5, 1.5, 2.0, 9.0]), ts, surv)
    assert grid == pytest.approx([1.0, 2 / 3, 1 / 3, 0.0])


def test_hand_worked_censored_example():
    # risk sets: 5 at t=1 (1 death), 3 at t=3 (2 deaths); censored at 2, 5
    times = np.array([1.0, 2.0, 3.0, 3.0, 5.0])
    events = np.array([True, False, True, True, False])
    ts, surv = kaplan_meier(times, events)
    assert ts.tolist() == [1.0, 3.0]
    assert surv == pytest.approx([4 / 5, 4 / 15])


def test_death_and_censoring_at_same_time():
    # the censored-at-2 subject still sits in the risk set at 2
    times = np.array([2.0, 2.0])
    events = np.array([True, False])
    ts, surv = kaplan_meier(times, events)
    assert ts.tolist() == [2.0]
    assert surv == pytest.approx([0.5])


def test_all_censored_gives_flat_curve():
    times = np.array([1.0, 2.0])
    events = np.array([False, False])
    ts, surv = kaplan_meier(times, events)
    assert len(ts) == 0
    grid = km_survival_at(np.array([0.5, 5.0]), ts, surv)
    assert grid == pytest.approx([1.0, 1.0])


def test_monotone_and_bounded():
    rng = np.random.default_rng(3)
    times = rng.exponential(1.0, size=500)
    events = rng.random(500) < 0.7
    ts, surv = kaplan_meier(times, events)
    assert np.all(np.diff(surv) < 1e-15)
    assert np.all((surv >= 0) & (surv <= 1))
    assert np.all(np.diff(ts) > 0)


def test_step_function_is_right_continuous():
    times = np.array([1.0, 2.0])
    events = np.array([True, True])
    ts, surv = kaplan_meier(times, events)
    at = km_survival_at(np.array([1.0]), ts, surv)
    assert at[0] == pytest.approx(0.5)


def test_large_sample_tracks_true_survival():
    rng = np.random.default_rng(8)
    n = 20_000
    true_t = rng.weibull(1.3, size=n)
    cens = rng.uniform(0, 2.5, size=n)
    obs = np.minimum(true_t, cens)
    events = true_t <= cens
    ts, surv = kaplan_meier(obs, events)
    grid = np.array([0.2, 0.5, 1.0, 1.5])
    est = km_survival_at(grid, ts, surv)
    want = np.exp(-grid ** 1.3)
    assert np.max(np.abs(est - want)) < 0.02
