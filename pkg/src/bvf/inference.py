"""Maximum-likelihood estimation for the bivariate family.

The log-likelihood of competing-risks data (ignoring an additive constant) is

    sum_k m_k log alpha_k  +  (alpha0+alpha1+alpha2) * sum_i log S0(t_i)
                           +  sum_{uncensored} log h0(t_i)

which is maximized in two stages: for fixed lambda the alphas have the closed
form alpha_k = -m_k / sum_i log S0(t_i), and substituting them back leaves a
one-dimensional profile p(lambda) handled by bracketing plus Brent's method.

Confidence intervals come either from the observed information matrix
(negative Hessian, finite differences) or from a parametric percentile
bootstrap that refits resamples drawn at the MLE.
"""

import enum
import logging
import math
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np
from scipy.linalg import LinAlgError, cho_factor, cho_solve
from scipy.optimize import minimize_scalar
from scipy.stats import norm

from . import _kernels
from .baselines import BaselineKind, _check_lambda
from .bvf_model import BvfParams, sample
from .data_model import CompetingRisksData, FailureMode, from_bivariate
from .errors import (
    DegenerateDataError,
    DomainError,
    EstimationError,
    ResampleFailureError,
    SingularMatrixError,
    ValidationError,
)

__all__ = [
    "PARAM_NAMES",
    "FitStatus",
    "FitOptions",
    "FitResult",
    "CiMethod",
    "ConfidenceIntervalSet",
    "log_likelihood",
    "alphas_given_lambda",
    "profile_loglik",
    "fit_mle",
    "observed_fisher",
    "asymptotic_ci",
    "bootstrap_ci",
    "percentile_ranks",
]

_log = logging.getLogger("bvf")

PARAM_NAMES = ("alpha0", "alpha1", "alpha2", "lambda")

_KERNEL_CODE = {
    BaselineKind.WEIBULL: _kernels.WEIBULL,
    BaselineKind.GOMPERTZ: _kernels.GOMPERTZ,
    BaselineKind.LOMAX: _kernels.LOMAX,
}

_EMPTY = np.empty(0, dtype=np.float64)


class FitStatus(enum.Enum):
    CONVERGED = "Converged"
    NO_MLE_MONOTONE_PROFILE = "NoMleMonotoneProfile"
    BOUNDARY_ALPHA_ZERO = "BoundaryAlphaZero"


class CiMethod(enum.Enum):
    ASYMPTOTIC = "Asymptotic"
    BOOTSTRAP = "Bootstrap"


class _Workspace:
    """Precomputed per-(data, kind) arrays feeding the kernel.

    The kernel consumes a per-record transform x: log(t) for Weibull (so
    t**lam = exp(lam*log t)), t itself otherwise. Everything
    lambda-independent is reduced once here.
    """

    __slots__ = ("kind", "code", "n", "m0", "m1", "m2", "m", "x_all", "x_unc", "unc_const")

    def __init__(self, data: CompetingRisksData, kind: BaselineKind):
        self.kind = kind
        self.code = _KERNEL_CODE[kind]
        self.n = data.n
        self.m0 = data.m0
        self.m1 = data.m1
        self.m2 = data.m2
        self.m = data.n_failures
        t = data.t
        unc = data.delta != FailureMode.CENSORED
        if kind is BaselineKind.WEIBULL:
            self.x_all = np.log(t)
            self.x_unc = _EMPTY
            self.unc_const = float(np.sum(self.x_all[unc]))
        elif kind is BaselineKind.GOMPERTZ:
            self.x_all = t
            self.x_unc = _EMPTY
            self.unc_const = float(np.sum(t[unc]))
        else:
            self.x_all = t
            self.x_unc = np.ascontiguousarray(t[unc])
            self.unc_const = 0.0

    def sums(self, lam: float) -> tuple[float, float]:
        return _kernels.lehmann_sums(self.code, lam, self.x_all, self.x_unc)

    def _unc_log_h0(self, lam: float, b: float) -> float:
        if self.m == 0:
            return 0.0
        if self.kind is BaselineKind.WEIBULL:
            return self.m * math.log(lam) + (lam - 1.0) * self.unc_const
        if self.kind is BaselineKind.GOMPERTZ:
            return self.m * math.log(lam) + lam * self.unc_const
        return self.m * math.log(lam) - b

    def _log_a_overflow(self, lam: float) -> float:
        # The survival sum exceeded double range but its log is still finite.
        # Both exponential-form sums (Weibull: sum exp(lam*log t), Gompertz:
        # sum expm1(lam*t) where the -1 terms are negligible past overflow)
        # reduce to a logsumexp over lam * x_all.
        z = lam * self.x_all
        hi = float(np.max(z))
        if not math.isfinite(hi):
            return math.inf
        return hi + math.log(float(np.sum(np.exp(z - hi))))

    def profile(self, lam: float) -> float:
        a, b = self.sums(lam)
        if a <= 0.0 or math.isnan(a):
            return -math.inf
        if math.isinf(a):
            # Lomax sums grow logarithmically and cannot overflow; for the
            # other kinds keep the profile finite so a monotone rise is not
            # mistaken for an interior maximum.
            if self.kind is BaselineKind.LOMAX:
                return -math.inf
            log_a = self._log_a_overflow(lam)
            if math.isinf(log_a):
                return -math.inf
            return -self.m * log_a + self._unc_log_h0(lam, b)
        return -self.m * math.log(a) + self._unc_log_h0(lam, b)

    def alphas(self, lam: float) -> tuple[float, float, float]:
        a, _ = self.sums(lam)
        if not math.isfinite(a) or a <= 0.0:
            raise DegenerateDataError(
                f"sum of log S0 vanished or overflowed at lambda={lam!r}"
            )
        return (self.m0 / a, self.m1 / a, self.m2 / a)

    def loglik(self, alpha0: float, alpha1: float, alpha2: float, lam: float) -> float:
        a, b = self.sums(lam)
        if not math.isfinite(a):
            return -math.inf
        total = 0.0
        for m_k, alpha_k in ((self.m0, alpha0), (self.m1, alpha1), (self.m2, alpha2)):
            if m_k:
                if alpha_k <= 0.0:
                    return -math.inf
                total += m_k * math.log(alpha_k)
        total += -(alpha0 + alpha1 + alpha2) * a
        total += self._unc_log_h0(lam, b)
        return total


def _workspace(data: CompetingRisksData, kind: BaselineKind) -> _Workspace:
    key = ("workspace", kind)
    ws = data._cache.get(key)
    if ws is None:
        ws = _Workspace(data, kind)
        data._cache[key] = ws
    return ws


def log_likelihood(p: BvfParams, data: CompetingRisksData) -> float:
    """Log-likelihood of the data at parameters ``p`` (additive constant
    dropped).

    The survival sum runs over all n records, censored included; the hazard
    sum over uncensored records only. Returns ``-inf`` where the likelihood
    vanishes (e.g. a zero alpha against a nonzero count).
    """
    ws = _workspace(data, p.kind)
    return ws.loglik(p.alpha0, p.alpha1, p.alpha2, p.lam)


def alphas_given_lambda(
    lam: float, data: CompetingRisksData, kind: BaselineKind
) -> tuple[float, float, float]:
    """Closed-form alpha maximizers at fixed lambda:
    alpha_k = -m_k / sum_i log S0(t_i; lambda).

    Each component is >= 0, and equals 0 exactly when its count m_k is 0.
    """
    lam = _check_lambda(lam)
    return _workspace(data, kind).alphas(lam)


def profile_loglik(lam: float, data: CompetingRisksData, kind: BaselineKind) -> float:
    """Profile log-likelihood p(lambda): the log-likelihood with the alphas
    replaced by their closed forms, up to a lambda-free constant.

        p(lambda) = -(m0+m1+m2) * log(-sum_i log S0(t_i))
                    + sum_{uncensored} log h0(t_i)

    The difference log_likelihood(alphas(lambda), lambda) - p(lambda) equals
    sum_k m_k log m_k - (m0+m1+m2) for every lambda.
    """
    lam = _check_lambda(lam)
    ws = _workspace(data, kind)
    if ws.m == 0:
        raise EstimationError("no failures observed")
    return ws.profile(lam)


@dataclass(frozen=True)
class FitOptions:
    """Tuning knobs for :func:`fit_mle`.

    bracket : (float, float)
        Hard search range for lambda; expansion clamps here.
    tol : float
        Relative lambda tolerance handed to the 1-D optimizer.
    max_evals : int
        Budget of profile evaluations for the optimizer stage.
    lambda_init : float
        Starting rung of the geometric bracket expansion.
    keep_trace : bool
        Record every (lambda, p(lambda)) evaluation in the result.
    """

    bracket: tuple[float, float] = (1e-8, 1e8)
    tol: float = 1e-10
    max_evals: int = 500
    lambda_init: float = 1.0
    keep_trace: bool = False

    def __post_init__(self):
        lo, hi = self.bracket
        if not (0.0 < lo < hi) or math.isinf(hi):
            raise ValidationError(
                f"bracket must satisfy 0 < lo < hi < inf, got {self.bracket!r}"
            )
        if not (self.tol > 0.0):
            raise ValidationError("tol must be > 0")
        if self.max_evals < 10:
            raise ValidationError("max_evals must be >= 10")
        if not (self.lambda_init > 0.0) or math.isinf(self.lambda_init):
            raise ValidationError(
                f"lambda_init must be a positive finite real, got {self.lambda_init!r}"
            )
        if not (lo <= self.lambda_init <= hi):
            object.__setattr__(self, "lambda_init", min(max(self.lambda_init, lo), hi))


_DEFAULT_OPTIONS = FitOptions()

# Relative flatness below which a maximum adjacent to a bracket clamp is not
# distinguishable from a monotone profile's finite limit (float noise there
# would otherwise fabricate an interior MLE).
_FLATNESS_RTOL = 1e-8


@dataclass(frozen=True)
class FitResult:
    """Outcome of :func:`fit_mle`.

    ``params_hat``/``loglik_max`` are None exactly when no MLE exists
    (status NoMleMonotoneProfile).
    """

    kind: BaselineKind
    status: FitStatus
    params_hat: Optional[BvfParams]
    loglik_max: Optional[float]
    n_evals: int
    profile_trace: Optional[tuple[tuple[float, float], ...]] = None

    def to_json_dict(self) -> dict:
        p = self.params_hat
        return {
            "kind": self.kind.value,
            "status": self.status.value,
            "alpha0": None if p is None else p.alpha0,
            "alpha1": None if p is None else p.alpha1,
            "alpha2": None if p is None else p.alpha2,
            "lambda": None if p is None else p.lam,
            "loglik": self.loglik_max,
            "n_evals": self.n_evals,
        }


def _ladder(bracket: tuple[float, float], lam_init: float) -> list[float]:
    """Geometric rung grid: lam_init scaled by powers of 4, clamped ends."""
    lo, hi = bracket
    start = min(max(lam_init, lo), hi)
    rungs = {lo, hi, start}
    v = start / 4.0
    while v > lo:
        rungs.add(v)
        v /= 4.0
    v = start * 4.0
    while v < hi:
        rungs.add(v)
        v *= 4.0
    return sorted(rungs)


def fit_mle(
    data: CompetingRisksData,
    kind: BaselineKind,
    options: Optional[FitOptions] = None,
) -> FitResult:
    """Maximum-likelihood fit of the four parameters for one baseline kind.

    Strategy: evaluate the profile on a geometric ladder of lambda values
    expanding by factors of 4 from ``lambda_init``; climb to a local maximum.
    An interior maximum gives a three-point bracket refined by Brent's
    method; a maximum at a clamped end of the search range means the profile
    is monotone there and no MLE exists (status NoMleMonotoneProfile). The
    alphas then follow in closed form. Any failure mode absent from the data
    pins its alpha to 0 (status BoundaryAlphaZero).

    Raises
    ------
    EstimationError
        If the data contain no failures at all, or the profile is -inf over
        the entire bracket.
    """
    opts = options if options is not None else _DEFAULT_OPTIONS
    ws = _workspace(data, kind)
    if ws.m == 0:
        raise EstimationError("no failures observed")

    trace: Optional[list] = [] if opts.keep_trace else None
    evals = 0

    def prof(lam: float) -> float:
        nonlocal evals
        evals += 1
        value = ws.profile(lam)
        if trace is not None:
            trace.append((lam, value))
        return value

    rungs = _ladder(opts.bracket, opts.lambda_init)
    last = len(rungs) - 1
    start = rungs.index(min(max(opts.lambda_init, rungs[0]), rungs[-1]))
    vals: dict[int, float] = {}

    def ev(i: int) -> float:
        if i not in vals:
            vals[i] = prof(rungs[i])
        return vals[i]

    ev(start)
    cur = start
    if vals[cur] == -math.inf:
        for i in range(len(rungs)):
            ev(i)
        cur = max(vals, key=vals.get)
        if vals[cur] == -math.inf:
            raise EstimationError(
                "profile log-likelihood is -inf over the entire bracket"
            )

    while True:
        p_left = ev(cur - 1) if cur > 0 else None
        p_right = ev(cur + 1) if cur < last else None
        p_cur = vals[cur]
        nxt = cur
        best = p_cur
        if p_left is not None and p_left > best:
            nxt, best = cur - 1, p_left
        if p_right is not None and p_right > best:
            nxt, best = cur + 1, p_right
        if nxt == cur:
            break
        cur = nxt

    def finish_no_mle() -> FitResult:
        return FitResult(
            kind=kind,
            status=FitStatus.NO_MLE_MONOTONE_PROFILE,
            params_hat=None,
            loglik_max=None,
            n_evals=evals,
            profile_trace=_sorted_trace(trace),
        )

    if cur == 0 or cur == last:
        return finish_no_mle()

    strict = vals[cur - 1] < vals[cur] > vals[cur + 1]
    budget = max(10, opts.max_evals - evals)
    if strict:
        res = minimize_scalar(
            lambda lam: -prof(lam),
            bracket=(rungs[cur - 1], rungs[cur], rungs[cur + 1]),
            method="brent",
            options={"xtol": opts.tol, "maxiter": budget},
        )
    else:
        # exact plateau across rungs (degenerate); fall back to golden
        # section on the enclosing interval, which needs no strict bracket
        res = minimize_scalar(
            lambda lam: -prof(lam),
            bounds=(rungs[cur - 1], rungs[cur + 1]),
            method="bounded",
            options={"xatol": opts.tol * max(1.0, rungs[cur]), "maxiter": budget},
        )
    lam_hat = float(min(max(res.x, opts.bracket[0]), opts.bracket[1]))
    p_hat_value = -float(res.fun)

    # flatness guard: a "maximum" close to a clamp that barely beats the
    # clamp value is a monotone profile seen through float noise
    near_lo = rungs[cur] / rungs[0] <= 64.0
    near_hi = rungs[last] / rungs[cur] <= 64.0
    if near_lo or near_hi:
        clamp_idx = 0 if near_lo else last
        gap = p_hat_value - ev(clamp_idx)
        if gap < _FLATNESS_RTOL * (1.0 + abs(p_hat_value)):
            return finish_no_mle()

    alpha_hat = ws.alphas(lam_hat)
    params_hat = BvfParams(
        kind=kind,
        alpha0=alpha_hat[0],
        alpha1=alpha_hat[1],
        alpha2=alpha_hat[2],
        lam=lam_hat,
    )
    status = FitStatus.CONVERGED
    for k, (m_k, name) in enumerate(
        ((ws.m0, "alpha0"), (ws.m1, "alpha1"), (ws.m2, "alpha2"))
    ):
        if m_k == 0:
            status = FitStatus.BOUNDARY_ALPHA_ZERO
            _log.warning(
                "no failures of mode %d observed; %s estimated at the boundary 0",
                k,
                name,
            )
    return FitResult(
        kind=kind,
        status=status,
        params_hat=params_hat,
        loglik_max=log_likelihood(params_hat, data),
        n_evals=evals,
        profile_trace=_sorted_trace(trace),
    )


def _sorted_trace(trace) -> Optional[tuple[tuple[float, float], ...]]:
    if trace is None:
        return None
    seen: dict[float, float] = {}
    for lam, value in trace:
        seen.setdefault(lam, value)
    return tuple(sorted(seen.items()))


def observed_fisher(p_hat: BvfParams, data: CompetingRisksData) -> np.ndarray:
    """Observed information: negative Hessian of the log-likelihood at
    ``p_hat``, by symmetrized central finite differences in the parameter
    order (alpha0, alpha1, alpha2, lambda).

    Raises
    ------
    DomainError
        If any component of ``p_hat`` is on the boundary (zero).
    SingularMatrixError
        If the resulting matrix is not positive definite.
    """
    theta = np.array([p_hat.alpha0, p_hat.alpha1, p_hat.alpha2, p_hat.lam])
    if np.any(theta <= 0.0):
        raise DomainError("observed_fisher requires an interior estimate (all > 0)")
    ws = _workspace(data, p_hat.kind)

    def f(v: np.ndarray) -> float:
        return ws.loglik(v[0], v[1], v[2], v[3])

    eps = np.finfo(float).eps
    h = eps**0.25 * np.maximum(np.abs(theta), 1e-3)
    hessian = np.empty((4, 4))
    f_center = f(theta)
    for i in range(4):
        step = np.zeros(4)
        step[i] = h[i]
        hessian[i, i] = (f(theta + step) - 2.0 * f_center + f(theta - step)) / h[i] ** 2
    for i in range(4):
        for j in range(i + 1, 4):
            si = np.zeros(4)
            sj = np.zeros(4)
            si[i] = h[i]
            sj[j] = h[j]
            mixed = (
                f(theta + si + sj)
                - f(theta + si - sj)
                - f(theta - si + sj)
                + f(theta - si - sj)
            ) / (4.0 * h[i] * h[j])
            hessian[i, j] = mixed
            hessian[j, i] = mixed
    info = -0.5 * (hessian + hessian.T)
    try:
        np.linalg.cholesky(info)
    except np.linalg.LinAlgError:
        raise SingularMatrixError(
            "observed information matrix is not positive definite"
        ) from None
    return info


@dataclass(frozen=True)
class ConfidenceIntervalSet:
    """Per-parameter confidence intervals with their provenance.

    ``intervals`` maps parameter name -> (lower, upper); lower bounds may be
    negative for asymptotic intervals (deliberately not truncated).
    """

    level: float
    method: CiMethod
    intervals: dict[str, tuple[float, float]]
    variances: Optional[dict[str, float]] = None
    B: Optional[int] = None
    seed: Optional[int] = None
    n_failed: Optional[int] = None

    def to_json_dict(self) -> dict:
        out = {
            "method": self.method.value,
            "level": self.level,
            "intervals": {k: [lo, hi] for k, (lo, hi) in self.intervals.items()},
        }
        if self.variances is not None:
            out["variances"] = dict(self.variances)
        if self.method is CiMethod.BOOTSTRAP:
            out["B"] = self.B
            out["seed"] = self.seed
            out["n_failed"] = self.n_failed
        return out


def _require_converged(fit: FitResult, what: str) -> BvfParams:
    if fit.status is not FitStatus.CONVERGED or fit.params_hat is None:
        raise EstimationError(
            f"{what} requires a converged fit, got status {fit.status.value}"
        )
    return fit.params_hat


def _check_level(level: float) -> float:
    level = float(level)
    if not (0.0 < level < 1.0):
        raise DomainError(f"level must lie in (0, 1), got {level!r}")
    return level


def asymptotic_ci(
    fit: FitResult, data: CompetingRisksData, level: float = 0.95
) -> ConfidenceIntervalSet:
    """Wald intervals theta_j +/- z * sqrt([I^-1]_jj) from the observed
    information. Lower limits may be negative; they are reported as-is."""
    level = _check_level(level)
    p_hat = _require_converged(fit, "asymptotic_ci")
    info = observed_fisher(p_hat, data)
    try:
        factor = cho_factor(info)
        cov = cho_solve(factor, np.eye(4))
    except LinAlgError:
        raise SingularMatrixError(
            "observed information matrix is not invertible"
        ) from None
    variances = np.diag(cov)
    if np.any(variances <= 0.0) or not np.all(np.isfinite(variances)):
        raise SingularMatrixError("nonpositive variance estimate")
    z = float(norm.ppf(0.5 * (1.0 + level)))
    theta = (p_hat.alpha0, p_hat.alpha1, p_hat.alpha2, p_hat.lam)
    half = z * np.sqrt(variances)
    intervals = {
        name: (theta[j] - half[j], theta[j] + half[j])
        for j, name in enumerate(PARAM_NAMES)
    }
    return ConfidenceIntervalSet(
        level=level,
        method=CiMethod.ASYMPTOTIC,
        intervals=intervals,
        variances={name: float(variances[j]) for j, name in enumerate(PARAM_NAMES)},
    )


def percentile_ranks(b_effective: int, level: float) -> tuple[int, int]:
    """1-based order-statistic ranks (ceil(B*a/2), ceil(B*(1-a/2))) with
    a = 1 - level, clamped to [1, B]."""
    if b_effective < 1:
        raise DomainError("need at least one bootstrap estimate")
    level = _check_level(level)
    alpha = 1.0 - level
    lo = math.ceil(b_effective * alpha / 2.0)
    hi = math.ceil(b_effective * (1.0 - alpha / 2.0))
    lo = min(max(lo, 1), b_effective)
    hi = min(max(hi, 1), b_effective)
    return lo, hi


Seed = Union[int, None, np.random.SeedSequence]


def bootstrap_ci(
    fit: FitResult,
    data: CompetingRisksData,
    B: int = 500,
    level: float = 0.95,
    seed: Seed = None,
    options: Optional[FitOptions] = None,
) -> ConfidenceIntervalSet:
    """Parametric percentile bootstrap.

    Draws B datasets of size n from the fitted model (reusing the original
    censoring time, if any), refits each, and takes component-wise order
    statistics at the :func:`percentile_ranks` positions. Resamples whose
    profile has no maximum are dropped and counted; more than 5% of them is
    an error. Replicate RNG streams are spawned up front from ``seed``, so
    results are identical however the replicates are scheduled.

    B >= 100 is recommended for real use; smaller values are accepted (the
    rank arithmetic stays well-defined down to B = 1).
    """
    B = int(B)
    if B < 1:
        raise DomainError(f"B must be >= 1, got {B}")
    level = _check_level(level)
    p_hat = _require_converged(fit, "bootstrap_ci")
    n = data.n
    c = data.censoring_time
    ss = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
    children = ss.spawn(B)
    estimates = np.empty((B, 4))
    ok = np.zeros(B, dtype=bool)
    for b in range(B):
        rng = np.random.default_rng(children[b])
        pairs = sample(p_hat, n, rng)
        try:
            resample = from_bivariate(pairs, c)
            refit = fit_mle(resample, fit.kind, options)
        except (EstimationError, ValidationError, DomainError):
            continue
        if refit.params_hat is None:
            continue
        q = refit.params_hat
        estimates[b] = (q.alpha0, q.alpha1, q.alpha2, q.lam)
        ok[b] = True
    n_ok = int(ok.sum())
    n_failed = B - n_ok
    if n_failed > 0.05 * B:
        raise ResampleFailureError(
            f"{n_failed} of {B} bootstrap resamples failed to produce an estimate"
        )
    usable = np.sort(estimates[ok], axis=0)
    lo_rank, hi_rank = percentile_ranks(n_ok, level)
    intervals = {
        name: (float(usable[lo_rank - 1, j]), float(usable[hi_rank - 1, j]))
        for j, name in enumerate(PARAM_NAMES)
    }
    if isinstance(seed, (int, np.integer)):
        seed_out = int(seed)
    elif isinstance(seed, np.random.SeedSequence) and isinstance(seed.entropy, int):
        seed_out = seed.entropy
    else:
        seed_out = None
    return ConfidenceIntervalSet(
        level=level,
        method=CiMethod.BOOTSTRAP,
        intervals=intervals,
        B=B,
        seed=seed_out,
        n_failed=n_failed,
    )
