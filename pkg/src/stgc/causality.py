"""Data-driven Granger causality: local, average, cumulative, classic.

All values are log-ratios of restricted to full residual sums (nats).
Significance: the per-window statistic (n_k - 3) * (exp(G_k) - 1) follows
F(1, n_k - 3) under the null; the cumulative statistic scaled by
(T - 2m - 1)/m follows F(m, T - 2m - 1).  The average causality's null has
no closed form, so its p-value comes from seeded Monte Carlo draws of the
window-length-weighted average of independent F-derived variables.
"""

from __future__ import annotations

import numpy as np

from .core import (
    ChangePointSet,
    Direction,
    GcEstimate,
    GcKind,
    InsufficientData,
    TimeSeriesPair,
    validate_changepoints,
)
from .estimator import TvMvarFit, fit_tvmvar, standardize
from .stats import FDistParams, f_sf, seeded_rng

#: Monte Carlo draws for the average-causality null.
DEFAULT_MC_DRAWS = 100_000

#: A full-model RSS below this fraction of the restricted RSS marks a
#: deterministic (noiseless) fit; no significance test applies there.
_NOISELESS_RTOL = 1e-12


def _is_noiseless(rss_full: float, rss_restricted: float) -> bool:
    return rss_full <= _NOISELESS_RTOL * max(rss_restricted, 1e-300)


def _log_ratio(restricted: float, full: float) -> float:
    return float(np.log(restricted / full))


def local_gc(fit: TvMvarFit, k: int) -> GcEstimate:
    """Causality of window k: log(rss_restricted / rss_full) with F test.

    A zero full residual (noiseless deterministic data) yields a value with
    an absent p-value rather than an error.
    """
    n = int(fit.n_obs[k])
    rss_f = float(fit.rss_full[k])
    rss_r = float(fit.rss_restricted[k])
    if _is_noiseless(rss_f, rss_r):
        value = 0.0 if rss_r == 0.0 else float(np.log(np.finfo(float).max))
        if rss_f > 0.0:
            value = min(value, _log_ratio(rss_r, rss_f))
        return GcEstimate(value, GcKind.LOCAL, fit.direction, df=(1, n - 3))
    value = _log_ratio(rss_r, rss_f)
    d2 = n - 3
    if d2 <= 0:
        raise InsufficientData(f"window of {n} pairs leaves no residual dof")
    stat = (rss_r / rss_f - 1.0) * d2
    p = f_sf(stat, FDistParams(1, d2))
    return GcEstimate(value, GcKind.LOCAL, fit.direction, df=(1, d2), p_value=p)


def average_gc(
    fit: TvMvarFit,
    n_draws: int = DEFAULT_MC_DRAWS,
    seed: int = 0,
) -> GcEstimate:
    """Window-length-weighted mean of per-window causalities.

    The Monte Carlo p-value is the fraction of seeded null draws at least
    as large as the observed value; values beyond every draw report 0.
    """
    values = np.empty(fit.n_windows)
    noiseless = False
    for k in range(fit.n_windows):
        est = local_gc(fit, k)
        values[k] = est.value
        noiseless = noiseless or est.p_value is None
    lengths = fit.n_obs.astype(float)
    T = lengths.sum()
    value = float(np.dot(values, lengths) / T)
    dfs = tuple((1, int(n) - 3) for n in fit.n_obs)
    if noiseless:
        return GcEstimate(value, GcKind.AVERAGE, fit.direction, df=dfs)

    rng = seeded_rng(seed, stream=1)
    d2 = fit.n_obs - 3
    draws = rng.f(1.0, d2[None, :].repeat(n_draws, axis=0))
    null = np.log1p(draws / d2) @ lengths / T
    p = float(np.count_nonzero(null >= value) / n_draws)
    return GcEstimate(value, GcKind.AVERAGE, fit.direction, df=dfs, p_value=p)


def cumulative_gc(fit: TvMvarFit, kind: GcKind = GcKind.CUMULATIVE) -> GcEstimate:
    """Causality from residual sums pooled across all windows."""
    m = fit.n_windows
    T = fit.n_steps
    d2 = T - 2 * m - 1
    if d2 <= 0:
        raise InsufficientData(
            f"T - 2m - 1 = {d2} <= 0 for T={T}, m={m}"
        )
    rss_f = float(fit.rss_full.sum())
    rss_r = float(fit.rss_restricted.sum())
    if _is_noiseless(rss_f, rss_r):
        value = 0.0 if rss_r == 0.0 else float(np.log(np.finfo(float).max))
        if rss_f > 0.0:
            value = min(value, _log_ratio(rss_r, rss_f))
        return GcEstimate(value, kind, fit.direction, df=(m, d2))
    value = _log_ratio(rss_r, rss_f)
    stat = (rss_r / rss_f - 1.0) * d2 / m
    p = f_sf(stat, FDistParams(m, d2))
    return GcEstimate(value, kind, fit.direction, df=(m, d2), p_value=p)


def classic_gc(pair: TimeSeriesPair, direction: Direction) -> GcEstimate:
    """Single-window (static model) causality; standardizes internally."""
    T = pair.n_steps
    s = validate_changepoints([1, T + 1], T, l0=min(T, 4))
    fit = fit_tvmvar(standardize(pair), s, direction)
    return cumulative_gc(fit, kind=GcKind.CLASSIC)


def gc_for_partition(
    pair: TimeSeriesPair,
    s: ChangePointSet,
    direction: Direction,
    kind: GcKind,
    n_draws: int = DEFAULT_MC_DRAWS,
    seed: int = 0,
) -> GcEstimate:
    """Standardize, fit along ``s``, and evaluate the requested flavor."""
    fit = fit_tvmvar(standardize(pair), s, direction)
    if kind is GcKind.AVERAGE:
        return average_gc(fit, n_draws=n_draws, seed=seed)
    if kind in (GcKind.CUMULATIVE, GcKind.CLASSIC):
        return cumulative_gc(fit, kind=kind)
    raise ValueError(f"unsupported flavor {kind}")
