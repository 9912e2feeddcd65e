"""NumPy fallback for the profile-likelihood hot kernel.

Semantics must match ``_cykernels`` exactly; ``tests/test_kernels.py`` holds
the two backends to bitwise-comparable agreement.
"""

import numpy as np

BACKEND = "python"

# kind codes shared with the Cython backend
WEIBULL = 0
GOMPERTZ = 1
LOMAX = 2


def lehmann_sums(kind: int, lam: float, x_all, x_unc):
    """Accumulate the two lambda-dependent sums of the log-likelihood.

    Parameters
    ----------
    kind : int
        0 Weibull, 1 Gompertz, 2 Lomax.
    lam : float
        Baseline parameter, > 0.
    x_all : ndarray
        Per-record transform of every lifetime: log(t) for Weibull, t itself
        otherwise.
    x_unc : ndarray
        Same transform restricted to uncensored records. Only Lomax reads it.

    Returns
    -------
    (float, float)
        ``a`` with sum of log S0 = -a over all records, and ``b``, the
        Lomax-only sum of log(1 + lam*t) over uncensored records (0.0 for the
        other kinds). Overflow saturates to inf rather than raising.
    """
    with np.errstate(over="ignore"):
        if kind == WEIBULL:
            return float(np.sum(np.exp(lam * x_all))), 0.0
        if kind == GOMPERTZ:
            return float(np.sum(np.expm1(lam * x_all))), 0.0
        if kind == LOMAX:
            return float(np.sum(np.log1p(lam * x_all))), float(
                np.sum(np.log1p(lam * x_unc))
            )
    raise ValueError(f"unknown kind code {kind}")
