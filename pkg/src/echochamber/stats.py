"""Empirical CCDFs and maximum-likelihood fits for heavy-tailed counts.

Families: poisson, lognormal, exponential and powerlaw. The power law is
fitted only on its tail ``x >= x_min`` with ``x_min`` picked by minimum
Kolmogorov-Smirnov distance; the other three use the full sample. Their
log-likelihoods are therefore not directly comparable, which is why
:func:`loglik_table` also refits every family on the power-law tail.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import gammaln

FAMILIES = ("poisson", "lognormal", "exponential", "powerlaw")
MIN_DISTINCT = 10
MIN_TAIL = 10


class FitError(ValueError):
    pass


@dataclass(frozen=True)
class FitResult:
    family: str
    params: dict[str, float]
    log_likelihood: float
    x_min: float = 1
    n_tail: int = 0
    ks: float | None = None
    small_tail: bool = False
    dropped_zeros: int = 0

    def as_dict(self) -> dict:
        return {
            "family": self.family,
            "params": dict(self.params),
            "log_likelihood": self.log_likelihood,
            "x_min": self.x_min,
            "n_tail": self.n_tail,
            "ks": self.ks,
            "small_tail": self.small_tail,
            "dropped_zeros": self.dropped_zeros,
        }


def as_sample(values) -> tuple[np.ndarray, int]:
    """Drop non-positive entries; return the sample and how many were dropped."""
    x = np.asarray(values, dtype=float).ravel()
    if np.any(~np.isfinite(x)) or np.any(x < 0):
        raise FitError("sample values must be finite and non-negative")
    keep = x > 0
    return x[keep], int(x.size - keep.sum())


def empirical_ccdf(values) -> tuple[np.ndarray, np.ndarray]:
    """P(X >= x) at each distinct value of the sample."""
    x = np.asarray(values, dtype=float).ravel()
    if x.size == 0:
        raise ValueError("CCDF of an empty sample")
    u, counts = np.unique(x, return_counts=True)
    at_least = np.cumsum(counts[::-1])[::-1]
    return u, at_least / x.size


def _poisson(x):
    lam = float(x.mean())
    if np.any(x != np.round(x)):
        raise FitError("poisson needs integer values")
    ll = float(np.sum(x * math.log(lam) - lam - gammaln(x + 1)))
    return {"lambda": lam}, ll


def _lognormal(x):
    logs = np.log(x)
    mu = float(logs.mean())
    var = float(np.mean((logs - mu) ** 2))
    if var <= 0:
        raise FitError("lognormal fit needs at least two distinct values")
    sigma = math.sqrt(var)
    ll = float(np.sum(-logs - math.log(sigma) - 0.5 * math.log(2 * math.pi)
                      - (logs - mu) ** 2 / (2 * var)))
    return {"mu": mu, "sigma": sigma}, ll


def _exponential(x):
    rate = 1.0 / float(x.mean())
    ll = float(x.size * math.log(rate) - rate * x.sum())
    return {"rate": rate}, ll


_CLOSED_FORM = {"poisson": _poisson, "lognormal": _lognormal, "exponential": _exponential}


def fit_family(values, family: str, discrete: bool = True) -> FitResult:
    """Maximum-likelihood fit of one family. Zeros are dropped first."""
    if family == "powerlaw":
        return fit_powerlaw(values, discrete=discrete)
    if family not in _CLOSED_FORM:
        raise ValueError(f"unknown family {family!r}; choose from {', '.join(FAMILIES)}")
    x, dropped = as_sample(values)
    if x.size == 0:
        raise FitError("no positive values to fit")
    params, ll = _CLOSED_FORM[family](x)
    return FitResult(family, params, ll, 1, int(x.size), dropped_zeros=dropped)


def powerlaw_alpha(tail: np.ndarray, x_min: float, discrete: bool = True) -> float:
    """Continuous MLE exponent; integer data use the x_min - 1/2 offset."""
    base = x_min - 0.5 if discrete else x_min
    return 1.0 + tail.size / float(np.sum(np.log(tail / base)))


def powerlaw_loglik(tail: np.ndarray, x_min: float, alpha: float, discrete: bool = True) -> float:
    base = x_min - 0.5 if discrete else x_min
    return float(tail.size * math.log((alpha - 1) / base) - alpha * np.sum(np.log(tail / base)))


def _scan_xmin(u: np.ndarray, counts: np.ndarray, discrete: bool):
    """Alpha and KS distance for every distinct value taken as x_min."""
    logu = np.log(u)
    n_tail = np.cumsum(counts[::-1])[::-1]
    sum_log = np.cumsum((counts * logu)[::-1])[::-1]
    cum = np.cumsum(counts)
    alphas = np.full(u.size, np.nan)
    ks = np.full(u.size, np.inf)
    for k in range(u.size):
        x_min = u[k]
        base = x_min - 0.5 if discrete else x_min
        denom = sum_log[k] - n_tail[k] * math.log(base)
        if denom <= 0:
            continue
        alpha = 1.0 + n_tail[k] / denom
        tail_u = u[k:]
        below = cum[k:] - (cum[k - 1] if k else 0)  # tail points <= each value
        emp_hi = below / n_tail[k]
        emp_lo = (below - counts[k:]) / n_tail[k]
        if discrete:
            # compare at each value and just below it, where the ECDF is flat
            fit = 1.0 - ((tail_u + 0.5) / base) ** (1.0 - alpha)
            fit_prev = 1.0 - ((tail_u - 0.5) / base) ** (1.0 - alpha)
            dist = max(np.max(np.abs(emp_hi - fit)), np.max(np.abs(emp_lo - fit_prev)))
        else:
            fit = 1.0 - (tail_u / x_min) ** (1.0 - alpha)
            dist = max(np.max(np.abs(emp_hi - fit)), np.max(np.abs(emp_lo - fit)))
        alphas[k] = alpha
        ks[k] = dist
    return alphas, ks, n_tail


def fit_powerlaw(values, discrete: bool = True) -> FitResult:
    """Power-law tail fit with x_min chosen by minimum KS distance.

    For each distinct value taken as x_min the exponent is
    ``1 + n_tail / sum(log(x / (x_min - 1/2)))`` (no offset when
    ``discrete=False``). Ties in KS go to the smaller x_min.
    """
    x, dropped = as_sample(values)
    u, counts = np.unique(x, return_counts=True)
    if u.size < MIN_DISTINCT:
        raise FitError(f"power-law fit needs at least {MIN_DISTINCT} distinct values, got {u.size}")
    alphas, ks, n_tail = _scan_xmin(u, counts, discrete)
    if not np.isfinite(ks).any():
        raise FitError("no admissible x_min")
    k = int(np.argmin(ks))
    x_min = float(u[k])
    alpha = float(alphas[k])
    tail = x[x >= x_min]
    ll = powerlaw_loglik(tail, x_min, alpha, discrete)
    return FitResult(
        "powerlaw",
        {"alpha": alpha},
        ll,
        x_min=int(x_min) if x_min == int(x_min) else x_min,
        n_tail=int(n_tail[k]),
        ks=float(ks[k]),
        small_tail=bool(n_tail[k] < MIN_TAIL),
        dropped_zeros=dropped,
    )


@dataclass(frozen=True)
class LoglikRow:
    family: str
    log_likelihood: float
    domain: str  # "full" or "tail"
    n: int
    x_min: float = 1
    tail_log_likelihood: float | None = None
    n_tail: int | None = None
    params: dict[str, float] = field(default_factory=dict)

    @property
    def per_point_tail(self) -> float | None:
        if self.tail_log_likelihood is None or not self.n_tail:
            return None
        return self.tail_log_likelihood / self.n_tail


def loglik_table(values, families=FAMILIES, discrete: bool = True) -> dict[str, LoglikRow]:
    """Log-likelihood per family.

    Non-power-law rows carry the full-sample value plus, when a power law was
    also requested, the value refit on the power-law tail ``x >= x_min`` so
    per-point comparisons on a common domain are possible.
    """
    families = list(families)
    unknown = set(families) - set(FAMILIES)
    if unknown:
        raise ValueError(f"unknown families: {sorted(unknown)}")
    x, _ = as_sample(values)
    out: dict[str, LoglikRow] = {}
    tail = None
    pl = None
    if "powerlaw" in families:
        pl = fit_powerlaw(x, discrete=discrete)
        tail = x[x >= pl.x_min]
    for fam in FAMILIES:
        if fam not in families:
            continue
        if fam == "powerlaw":
            out[fam] = LoglikRow(fam, pl.log_likelihood, "tail", pl.n_tail, pl.x_min,
                                 pl.log_likelihood, pl.n_tail, dict(pl.params))
            continue
        full = fit_family(x, fam)
        tail_ll = None
        if tail is not None:
            try:
                tail_ll = fit_family(tail, fam).log_likelihood
            except FitError:
                tail_ll = None
        out[fam] = LoglikRow(fam, full.log_likelihood, "full", int(x.size),
                             pl.x_min if pl else 1, tail_ll,
                             pl.n_tail if pl else None, dict(full.params))
    return out


def sample_discrete_powerlaw(rng: np.random.Generator, alpha: float, x_min: int, size: int) -> np.ndarray:
    """Approximate discrete power-law draws: round a continuous law on [x_min - 1/2, inf)."""
    r = rng.random(size)
    return np.floor((x_min - 0.5) * (1.0 - r) ** (-1.0 / (alpha - 1.0)) + 0.5).astype(np.int64)
