"""Kaplan-Meier product-limit estimator for the observed minimum lifetime.

Used by the CLI's model-vs-nonparametric comparison: the minimum T=min(X,Y)
ignores the failure cause, so delta in {0,1,2} counts as an event and
delta=3 as censored. At tied times, events are processed before censorings
(every record with t_i >= u is still at risk for an event at u).
"""

import numpy as np

from .errors import ValidationError

__all__ = ["kaplan_meier", "km_survival_at"]


def kaplan_meier(times, event_observed) -> tuple[np.ndarray, np.ndarray]:
    """Product-limit estimate of P(T > t).

    Parameters
    ----------
    times : array-like of float
        Observation times.
    event_observed : array-like of bool
        True where the record is an event, False where censored.

    Returns
    -------
    (event_times, survival)
        Distinct event times in increasing order and the estimate's value
        just after each (the step function is right-continuous; it is 1
        before the first event time).
    """
    t = np.asarray(times, dtype=np.float64)
    observed = np.asarray(event_observed, dtype=bool)
    if t.ndim != 1 or t.shape != observed.shape:
        raise ValidationError("times and event flags must be 1-D of equal length")
    if t.size == 0:
        raise ValidationError("no records")
    n = t.size
    order = np.argsort(t, kind="stable")
    t_sorted = t[order]
    obs_sorted = observed[order].astype(np.int64)
    uniq, start_idx = np.unique(t_sorted, return_index=True)
    deaths = np.add.reduceat(obs_sorted, start_idx)
    at_risk = n - start_idx
    has_event = deaths > 0
    factors = 1.0 - deaths[has_event] / at_risk[has_event]
    return uniq[has_event], np.cumprod(factors)


def km_survival_at(grid, event_times, survival) -> np.ndarray:
    """Evaluate the right-continuous KM step function on ``grid``."""
    grid = np.asarray(grid, dtype=np.float64)
    idx = np.searchsorted(event_times, grid, side="right") - 1
    out = np.ones_like(grid)
    inside = idx >= 0
    out[inside] = survival[idx[inside]]
    return out
