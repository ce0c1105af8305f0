"""Optimal time-window division.

The cost of a partition trades prediction accuracy (length-weighted mean of
per-window residual covariance determinants) against captured causal
information (mean of both-direction local causalities); a trade-off
parameter weights the two.  For each candidate window count m and trade-off
value the constrained cost minimum is located, and the winner across the
whole grid is the partition with the smallest BIC,

    BIC = -2 * sum_k LLF_k + 4 * m * log(T + 1),

where the penalty counts the four coefficients of the bivariate
first-order model per window.

The search is deterministic and derivative-free: exhaustive enumeration of
the stride-grid candidates when the feasible space is small enough, and
otherwise greedy insertion from the trivial partition followed by
coordinate-descent refinement.  At desk scale the two branches agree, which
is what the exhaustive-equivalence tests check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np

from .core import (
    ChangePointSet,
    Direction,
    GcEstimate,
    GcKind,
    InfeasibleConstraint,
    TimeSeriesPair,
    WindowTooShort,
    validate_changepoints,
)
from .estimator import WindowStats, fit_from_window_stats, standardize, window_stats
from . import causality

#: Partitions with agc below this are treated as having infinite cost.
_AGC_FLOOR = 1e-12
#: Max number of candidate partitions enumerated exactly per (m, lambda) cell.
_EXHAUSTIVE_CAP = 20_000


@dataclass(frozen=True)
class SearchConfig:
    """Grid and constraints for the partition search."""

    m0: int = 5
    lambda_grid: tuple[float, ...] = tuple(
        round(0.02 * i, 10) for i in range(1, 51)
    )
    l0: int = 10
    stride: int = 5

    def __post_init__(self) -> None:
        from .core import InvalidConfig

        if self.m0 < 1:
            raise InvalidConfig("m0 must be >= 1")
        if not self.lambda_grid or any(l <= 0 for l in self.lambda_grid):
            raise InvalidConfig("lambda_grid must be nonempty and positive")
        if self.l0 < 4:
            raise InvalidConfig("l0 must be >= 4 for a nontrivial fit")
        if self.stride < 1:
            raise InvalidConfig("stride must be >= 1")


@dataclass(frozen=True)
class SearchObjective:
    """One evaluated partition: cost terms, BIC, and the trade-off used."""

    err: float
    agc: float
    cost: float
    bic: float
    lam: float
    changepoints: ChangePointSet

    @property
    def m(self) -> int:
        return self.changepoints.n_windows


class PartitionEvaluator:
    """Caches per-window fits so partition objectives are cheap to compose.

    Operates on the standardized series; window summaries are keyed by the
    window boundaries, so every partition sharing a window reuses its fit.
    """

    def __init__(self, pair: TimeSeriesPair):
        self.pair = standardize(pair)
        self.T = pair.n_steps
        self._windows: dict[tuple[int, int], WindowStats] = {}
        self._objectives: dict[tuple[int, ...], tuple[float, float, float]] = {}

    def window(self, lo: int, hi: int) -> WindowStats:
        key = (lo, hi)
        w = self._windows.get(key)
        if w is None:
            w = window_stats(self.pair, lo, hi)
            self._windows[key] = w
        return w

    def objective(self, points: tuple[int, ...]) -> tuple[float, float, float]:
        """(err, agc, llf_sum) of the partition given by ``points``."""
        cached = self._objectives.get(points)
        if cached is not None:
            return cached
        m = len(points) - 1
        err = 0.0
        agc = 0.0
        llf = 0.0
        for lo, hi in zip(points, points[1:]):
            w = self.window(lo, hi)
            err += (hi - lo) * w.det_sigma
            agc += _local_value(w.rss_restricted_x, w.rss_full_x)
            agc += _local_value(w.rss_restricted_y, w.rss_full_y)
            llf += w.llf
        err /= m
        agc /= 2 * m
        result = (err, agc, llf)
        self._objectives[points] = result
        return result

    def cost(self, points: tuple[int, ...], lam: float) -> float:
        err, agc, _ = self.objective(points)
        if agc <= _AGC_FLOOR:
            return math.inf
        return err + lam / agc

    def describe(self, points: tuple[int, ...], lam: float) -> SearchObjective:
        err, agc, llf = self.objective(points)
        cost = math.inf if agc <= _AGC_FLOOR else err + lam / agc
        m = len(points) - 1
        bic = -2.0 * llf + 4.0 * m * math.log(self.T + 1)
        s = validate_changepoints(points, self.T, l0=1)
        return SearchObjective(
            err=err, agc=agc, cost=cost, bic=bic, lam=lam, changepoints=s
        )


def _local_value(rss_restricted: float, rss_full: float) -> float:
    if rss_full == 0.0:
        return 0.0 if rss_restricted == 0.0 else math.inf
    return math.log(rss_restricted / rss_full)


def partition_error(pair: TimeSeriesPair, s: ChangePointSet) -> float:
    """Length-weighted mean of per-window residual covariance determinants,
    divided by the window count."""
    ev = PartitionEvaluator(pair)
    return ev.objective(tuple(s.points))[0]


def partition_agc(pair: TimeSeriesPair, s: ChangePointSet) -> float:
    """Mean of both-direction local causalities over the windows."""
    ev = PartitionEvaluator(pair)
    return ev.objective(tuple(s.points))[1]


def _candidates(T: int, l0: int, stride: int) -> list[int]:
    """Interior grid candidates, spaced by ``stride``, endpoint-feasible."""
    return [c for c in range(1 + stride, T + 1, stride) if
            c - 1 >= l0 and T + 1 - c >= l0]


def _feasible(points: Sequence[int], l0: int) -> bool:
    return all(b - a >= l0 for a, b in zip(points, points[1:]))


def _enumerate_partitions(
    cands: list[int], T: int, m: int, l0: int, cap: int
) -> Iterator[tuple[int, ...]] | None:
    """All feasible m-window partitions from the candidate grid, or None
    when their number exceeds ``cap``."""
    k = m - 1
    if k == 0:
        return iter([(1, T + 1)])
    if math.comb(len(cands), k) > cap:
        return None

    def rec(start: int, prev: int, chosen: list[int]) -> Iterator[tuple[int, ...]]:
        if len(chosen) == k:
            if T + 1 - prev >= l0:
                yield (1, *chosen, T + 1)
            return
        for i in range(start, len(cands)):
            c = cands[i]
            if c - prev >= l0:
                yield from rec(i + 1, c, chosen + [c])

    return rec(0, 1, [])


def _greedy_partition(
    ev: PartitionEvaluator,
    cands: list[int],
    m: int,
    lam: float,
    l0: int,
    stride: int,
) -> tuple[int, ...] | None:
    """Greedy insertion to m windows, then coordinate-descent refinement."""
    T = ev.T
    points = [1, T + 1]
    while len(points) - 1 < m:
        best_cost = math.inf
        best_points: list[int] | None = None
        for c in cands:
            if c in points:
                continue
            trial = sorted(points + [c])
            if not _feasible(trial, l0):
                continue
            cost = ev.cost(tuple(trial), lam)
            if cost < best_cost:
                best_cost = cost
                best_points = trial
        if best_points is None:
            return None
        points = best_points

    # Refinement: slide each interior point by +/- stride while it helps.
    improved = True
    current_cost = ev.cost(tuple(points), lam)
    while improved:
        improved = False
        for i in range(1, len(points) - 1):
            for delta in (-stride, stride):
                trial = list(points)
                trial[i] = points[i] + delta
                if not (trial[i - 1] < trial[i] < trial[i + 1]):
                    continue
                if not _feasible(trial, l0):
                    continue
                cost = ev.cost(tuple(trial), lam)
                if cost < current_cost:
                    points = trial
                    current_cost = cost
                    improved = True
    return tuple(points)


def search_optimal_partition(
    pair: TimeSeriesPair, cfg: SearchConfig | None = None
) -> tuple[SearchObjective, list[SearchObjective]]:
    """BIC-selected optimal partition plus the full (m, lambda) table.

    For every grid cell the constrained cost minimum is located; each
    winner is scored by BIC and the global minimizer returned.
    Deterministic given (data, config).
    """
    cfg = cfg or SearchConfig()
    ev = PartitionEvaluator(pair)
    T = ev.T
    cands = _candidates(T, cfg.l0, cfg.stride)

    table: list[SearchObjective] = []
    best: SearchObjective | None = None
    for lam in cfg.lambda_grid:
        for m in range(1, cfg.m0 + 1):
            if T < m * cfg.l0:
                continue
            points = _solve_cell(ev, cands, m, lam, cfg)
            if points is None:
                continue
            obj = ev.describe(points, lam)
            table.append(obj)
            if best is None or obj.bic < best.bic:
                best = obj
    if best is None:
        raise InfeasibleConstraint(
            f"no feasible partition: T={T}, l0={cfg.l0}, m0={cfg.m0}"
        )
    return best, table


def _solve_cell(
    ev: PartitionEvaluator,
    cands: list[int],
    m: int,
    lam: float,
    cfg: SearchConfig,
) -> tuple[int, ...] | None:
    exact = _enumerate_partitions(cands, ev.T, m, cfg.l0, _EXHAUSTIVE_CAP)
    if exact is not None:
        best_cost = math.inf
        best_points: tuple[int, ...] | None = None
        for points in exact:
            cost = ev.cost(points, lam)
            if cost < best_cost:
                best_cost = cost
                best_points = points
        if best_points is not None and math.isfinite(best_cost):
            return best_points
        # Every enumerated partition degenerate; fall back to the trivial
        # one only for m == 1 (cost may still be infinite there).
        return best_points
    return _greedy_partition(ev, cands, m, lam, cfg.l0, cfg.stride)


@dataclass(frozen=True)
class EqualWindowResult:
    """BIC and causality measurements for one uniform window length."""

    length: int
    changepoints: ChangePointSet
    bic: float
    llf: tuple[float, ...]
    estimates: dict[tuple[Direction, GcKind], GcEstimate] = field(hash=False)


def uniform_partition(T: int, length: int, l0: int) -> ChangePointSet:
    """Uniform windows of ``length``; a short final remainder merges into
    the last window only when it stays >= l0, otherwise rejects."""
    points = list(range(1, T + 2, length))
    if points[-1] != T + 1:
        remainder = T + 1 - points[-1]
        if remainder < l0:
            raise WindowTooShort(
                f"final remainder window of {remainder} steps < l0={l0}"
            )
        points.append(T + 1)
    return validate_changepoints(points, T, l0=min(l0, length))


def equal_window_bic_scan(
    pair: TimeSeriesPair,
    lengths: Sequence[int],
    l0: int = 10,
    n_draws: int = causality.DEFAULT_MC_DRAWS,
    seed: int = 0,
) -> list[EqualWindowResult]:
    """Fit uniform partitions of the given lengths; report BIC and both
    average and cumulative causality for each direction."""
    ev = PartitionEvaluator(pair)
    out = []
    for length in lengths:
        s = uniform_partition(ev.T, int(length), l0)
        stats = [ev.window(lo, hi) for lo, hi in s.windows()]
        llf = tuple(w.llf for w in stats)
        bic = -2.0 * sum(llf) + 4.0 * s.n_windows * math.log(ev.T + 1)
        estimates: dict[tuple[Direction, GcKind], GcEstimate] = {}
        for direction in Direction:
            fit = fit_from_window_stats(s, direction, stats)
            estimates[(direction, GcKind.AVERAGE)] = causality.average_gc(
                fit, n_draws=n_draws, seed=seed
            )
            estimates[(direction, GcKind.CUMULATIVE)] = causality.cumulative_gc(fit)
        out.append(
            EqualWindowResult(
                length=int(length),
                changepoints=s,
                bic=bic,
                llf=llf,
                estimates=estimates,
            )
        )
    return out
