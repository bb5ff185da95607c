"""Single-threshold null distributions for trigger coincidence counts.

Both nulls treat the count as a binomial over the number of leading events;
they differ in the probability that a tolerance window contains an
exceedance.  The Bernoulli null derives that probability from the marginal
exceedance rate and is only adequate for serially independent series.  The
GEV null fits a generalized extreme value distribution to block maxima of
the series, which also covers smooth, serially dependent data.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize
from scipy.special import gammaln, logsumexp

from .series import EventSeries, TimeSeries

__all__ = [
    "GUMBEL_SHAPE_TOL",
    "GevParams",
    "GevFit",
    "GevFitError",
    "gev_cdf",
    "gev_sf",
    "block_maxima",
    "fit_gev_mle",
    "binom_logpmf",
    "binom_tail",
    "PointwiseTestResult",
    "bernoulli_null_pvalue",
    "gev_null_pvalue",
    "estimate_event_rate",
]

# Shape magnitudes below this are evaluated with the Gumbel limit form.
GUMBEL_SHAPE_TOL = 1e-9

_EULER_GAMMA = 0.5772156649015329


class GevFitError(RuntimeError):
    """GEV fitting failed: sample too small or degenerate, or no feasible likelihood."""


@dataclass(frozen=True)
class GevParams:
    """GEV parameters: shape (tail index), location, scale."""

    shape: float
    location: float
    scale: float

    def __post_init__(self):
        for name in ("shape", "location", "scale"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"GEV {name} must be finite")
        if self.scale <= 0:
            raise ValueError("GEV scale must be positive")


@dataclass(frozen=True)
class GevFit:
    """Fitted parameters plus optimizer diagnostics."""

    params: GevParams
    converged: bool
    nll: float
    n_samples: int


def gev_cdf(z: float, theta: GevParams) -> float:
    """GEV distribution function.

    For shape xi != 0 the value is exp(-(1 + xi*(z-mu)/sigma)^(-1/xi)) on the
    support 1 + xi*(z-mu)/sigma > 0; outside the support it is 0 (xi > 0) or
    1 (xi < 0).  Shapes within GUMBEL_SHAPE_TOL of zero use the Gumbel form
    exp(-exp(-(z-mu)/sigma)).
    """
    s = (z - theta.location) / theta.scale
    if abs(theta.shape) < GUMBEL_SHAPE_TOL:
        return math.exp(-math.exp(-s))
    w = 1.0 + theta.shape * s
    if w <= 0.0:
        return 0.0 if theta.shape > 0 else 1.0
    return math.exp(-(w ** (-1.0 / theta.shape)))


def gev_sf(z: float, theta: GevParams) -> float:
    """Exceedance probability 1 - gev_cdf(z, theta), computed without cancellation."""
    s = (z - theta.location) / theta.scale
    if abs(theta.shape) < GUMBEL_SHAPE_TOL:
        v = math.exp(-s)
    else:
        w = 1.0 + theta.shape * s
        if w <= 0.0:
            return 1.0 if theta.shape > 0 else 0.0
        v = w ** (-1.0 / theta.shape)
    return -math.expm1(-v)


def block_maxima(x: TimeSeries, delta: int) -> np.ndarray:
    """Maxima of consecutive disjoint blocks of ``delta + 1`` steps.

    A trailing partial block is dropped.  Raises when the series is shorter
    than a single block.
    """
    if delta < 0:
        raise ValueError("delta must be non-negative")
    size = delta + 1
    n_blocks = x.length // size
    if n_blocks == 0:
        raise ValueError(f"series of length {x.length} is shorter than one block of size {size}")
    return x.values[: n_blocks * size].reshape(n_blocks, size).max(axis=1)


def _gev_nll(xi: float, mu: float, sigma: float, z: np.ndarray) -> float:
    """Negative log-likelihood; +inf when any sample falls outside the support."""
    if sigma <= 0.0 or not math.isfinite(sigma):
        return math.inf
    s = (z - mu) / sigma
    n = z.size
    with np.errstate(over="ignore"):
        if abs(xi) < GUMBEL_SHAPE_TOL:
            val = n * math.log(sigma) + float(np.sum(s) + np.sum(np.exp(-s)))
        else:
            w = 1.0 + xi * s
            if np.any(w <= 0.0):
                return math.inf
            logw = np.log(w)
            val = (n * math.log(sigma)
                   + (1.0 + 1.0 / xi) * float(np.sum(logw))
                   + float(np.sum(np.exp(-logw / xi))))
    return val if math.isfinite(val) else math.inf


def _pwm_initializer(z: np.ndarray) -> tuple[float, float, float]:
    """Probability-weighted-moments starting point (shape, location, scale).

    Uses the usual rational approximation of the shape from the L-skewness;
    falls back to a Gumbel moment fit when the approximation degenerates.
    """
    zs = np.sort(z)
    n = zs.size
    j = np.arange(1, n + 1, dtype=float)
    b0 = float(zs.mean())
    b1 = float(np.sum((j - 1) / (n - 1) * zs) / n)
    b2 = float(np.sum((j - 1) * (j - 2) / ((n - 1) * (n - 2)) * zs) / n)
    l1, l2, l3 = b0, 2 * b1 - b0, 6 * b2 - 6 * b1 + b0

    def gumbel_init():
        sigma = l2 / math.log(2) if l2 > 0 else float(zs.std() or 1.0)
        return 0.0, l1 - _EULER_GAMMA * sigma, sigma

    if l2 <= 0:
        return gumbel_init()
    t3 = l3 / l2
    c = 2.0 / (3.0 + t3) - math.log(2) / math.log(3)
    k = 7.8590 * c + 2.9554 * c * c
    if abs(k) < 1e-6 or k <= -0.99:
        return gumbel_init()
    g = math.gamma(1.0 + k)
    sigma = l2 * k / ((1.0 - 2.0 ** (-k)) * g)
    mu = l1 - sigma * (1.0 - g) / k
    if not (sigma > 0 and math.isfinite(sigma) and math.isfinite(mu)):
        return gumbel_init()
    return -k, mu, sigma


def fit_gev_mle(maxima, min_samples: int = 20) -> GevFit:
    """Maximum-likelihood GEV fit to a sample of block maxima.

    Starts from a probability-weighted-moments estimate and refines with a
    simplex search over (shape, location, log scale).  Parameter points that
    would push any sample outside the support evaluate to +inf and are never
    accepted, so the fitted support always contains the whole sample, and the
    fitted likelihood is never worse than the initializer's.  The converged
    flag reflects the optimizer's own termination test (simplex NLL spread
    below 1e-10).
    """
    z = np.asarray(maxima, dtype=float).ravel()
    if z.size < min_samples:
        raise GevFitError(f"need at least {min_samples} block maxima, got {z.size}")
    if not np.all(np.isfinite(z)):
        raise GevFitError("block maxima must be finite")
    if np.ptp(z) == 0.0:
        raise GevFitError("degenerate sample: all block maxima are equal")

    xi0, mu0, sigma0 = _pwm_initializer(z)
    if not math.isfinite(_gev_nll(xi0, mu0, sigma0, z)):
        # Widen the scale until the whole sample fits inside the support.
        feasible = False
        for _ in range(80):
            sigma0 *= 1.5
            if math.isfinite(_gev_nll(xi0, mu0, sigma0, z)):
                feasible = True
                break
        if not feasible:
            xi0, mu0, sigma0 = 0.0, float(z.mean()), float(z.std() or 1.0)

    def objective(p):
        return _gev_nll(p[0], p[1], math.exp(p[2]), z)

    res = minimize(
        objective,
        x0=np.array([xi0, mu0, math.log(sigma0)]),
        method="Nelder-Mead",
        options={"maxiter": 20000, "maxfev": 20000, "xatol": 1e-9, "fatol": 1e-10},
    )
    nll = float(res.fun)
    if not math.isfinite(nll):
        raise GevFitError("GEV optimization found no feasible likelihood")
    xi, mu, log_sigma = (float(v) for v in res.x)
    params = GevParams(shape=xi, location=mu, scale=math.exp(log_sigma))
    return GevFit(params=params, converged=bool(res.success), nll=nll, n_samples=int(z.size))


def binom_logpmf(k, n, p: float):
    """Log of the binomial pmf, vectorized over k and n; p is a scalar in [0, 1].

    Entries with k outside [0, n] get -inf.
    """
    k = np.asarray(k, dtype=float)
    n = np.asarray(n, dtype=float)
    if not 0.0 <= p <= 1.0:
        raise ValueError("binomial success probability must lie in [0, 1]")
    valid = (k >= 0) & (k <= n)
    if p == 0.0:
        out = np.where(k == 0.0, 0.0, -np.inf)
    elif p == 1.0:
        out = np.where(k == n, 0.0, -np.inf)
    else:
        kk = np.where(valid, k, 0.0)
        nn = np.where(valid, n, 1.0)
        out = (gammaln(nn + 1.0) - gammaln(kk + 1.0) - gammaln(nn - kk + 1.0)
               + kk * math.log(p) + (nn - kk) * math.log1p(-p))
    return np.where(valid, out, -np.inf)


def binom_tail(k: int, n: int, p: float) -> float:
    """Upper-tail probability P(K >= k) for K ~ Binomial(n, p).

    Summed in log space (log-gamma pmf terms combined with log-sum-exp), so
    small tails keep their relative accuracy.  Exactly 1.0 for k <= 0.
    """
    if n < 0:
        raise ValueError("n must be non-negative")
    if k <= 0:
        return 1.0
    if k > n:
        return 0.0
    if p == 0.0:
        return 0.0
    if p == 1.0:
        return 1.0
    js = np.arange(k, n + 1)
    return float(min(1.0, math.exp(logsumexp(binom_logpmf(js, n, p)))))


@dataclass(frozen=True)
class PointwiseTestResult:
    """One-sided single-threshold test outcome."""

    k_observed: int
    n_events: int
    success_prob: float
    p_value: float


def bernoulli_null_pvalue(k: int, n_b: int, p_a: float, delta: int) -> PointwiseTestResult:
    """Upper-tail p-value for k trigger coincidences under an independence null.

    A tolerance window of delta+1 steps contains at least one event of
    marginal rate p_a with probability 1 - (1 - p_a)^(delta + 1); the
    coincidence count over n_b leading events is binomial with that success
    probability.
    """
    if n_b < 0 or not 0 <= k <= n_b:
        raise ValueError("need 0 <= k <= n_b")
    if not 0.0 <= p_a <= 1.0:
        raise ValueError("p_a must lie in [0, 1]")
    if delta < 0:
        raise ValueError("delta must be non-negative")
    if p_a == 1.0:
        pi = 1.0
    else:
        pi = -math.expm1((delta + 1) * math.log1p(-p_a))
    return PointwiseTestResult(k_observed=k, n_events=n_b, success_prob=pi,
                               p_value=binom_tail(k, n_b, pi))


def gev_null_pvalue(k: int, n_e: int, tau: float, theta: GevParams) -> PointwiseTestResult:
    """Upper-tail p-value with the window-exceedance probability taken from a fitted GEV.

    The GEV is understood as the distribution of the window maximum, so the
    success probability is its exceedance probability at ``tau``.
    """
    if n_e < 0 or not 0 <= k <= n_e:
        raise ValueError("need 0 <= k <= n_e")
    pi = gev_sf(tau, theta)
    return PointwiseTestResult(k_observed=k, n_events=n_e, success_prob=pi,
                               p_value=binom_tail(k, n_e, pi))


def estimate_event_rate(e: EventSeries) -> float:
    """Empirical per-step event probability, n_events / length."""
    return e.n_events / e.length
