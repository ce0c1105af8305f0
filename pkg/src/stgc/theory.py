"""Closed-form (population) causality from a known coefficient schedule.

Assumes unit-variance, mutually uncorrelated channels, so the population
residual sums reduce to within-window squared deviations of the coefficient
trajectories plus the noise variances.  These calculators back the exact
monotonicity and comparison property tests.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import (
    ChangePointSet,
    CoefficientSchedule,
    Direction,
    GcEstimate,
    GcKind,
    LengthMismatch,
)


@dataclass(frozen=True)
class TheoreticalGcBreakdown:
    """Terms of the population cumulative causality ratio.

    ``u`` and ``v`` are the summed within-window squared deviations of the
    own and cross coefficient trajectories from their window means.
    """

    u: float
    v: float
    sum_b2: float
    sum_sigma2: float
    value: float


def _check(sched: CoefficientSchedule, s: ChangePointSet) -> None:
    if sched.n_steps != s.n_steps:
        raise LengthMismatch(
            f"schedule has {sched.n_steps} steps, partition covers {s.n_steps}"
        )


def schedule_window_means(
    sched: CoefficientSchedule, s: ChangePointSet
) -> tuple[np.ndarray, np.ndarray]:
    """Arithmetic means of a1 and b1 over each window of ``s``."""
    _check(sched, s)
    a_bar = np.empty(s.n_windows)
    b_bar = np.empty(s.n_windows)
    for k, (lo, hi) in enumerate(s.windows()):
        a_bar[k] = sched.a1[lo - 1 : hi - 1].mean()
        b_bar[k] = sched.b1[lo - 1 : hi - 1].mean()
    return a_bar, b_bar


def _window_deviations(
    sched: CoefficientSchedule, s: ChangePointSet
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Per-window (U_k, V_k, sum b^2, sum sigma^2)."""
    _check(sched, s)
    m = s.n_windows
    u = np.empty(m)
    v = np.empty(m)
    b2 = np.empty(m)
    s2 = np.empty(m)
    for k, (lo, hi) in enumerate(s.windows()):
        a = sched.a1[lo - 1 : hi - 1]
        b = sched.b1[lo - 1 : hi - 1]
        u[k] = np.sum((a - a.mean()) ** 2)
        v[k] = np.sum((b - b.mean()) ** 2)
        b2[k] = np.sum(b**2)
        s2[k] = np.sum(sched.sigma2[lo - 1 : hi - 1])
    return u, v, b2, s2


def theoretical_cumulative_gc(
    sched: CoefficientSchedule, s: ChangePointSet
) -> TheoreticalGcBreakdown:
    """Population cumulative causality over the partition ``s``.

    value = log((U + sum b^2 + sum sigma^2) / (U + V + sum sigma^2)).
    """
    u_k, v_k, b2_k, s2_k = _window_deviations(sched, s)
    u = float(u_k.sum())
    v = float(v_k.sum())
    sum_b2 = float(b2_k.sum())
    sum_s2 = float(s2_k.sum())
    value = float(np.log((u + sum_b2 + sum_s2) / (u + v + sum_s2)))
    return TheoreticalGcBreakdown(
        u=u, v=v, sum_b2=sum_b2, sum_sigma2=sum_s2, value=max(value, 0.0)
    )


def theoretical_average_gc(
    sched: CoefficientSchedule,
    s: ChangePointSet,
    direction: Direction = Direction.Y_TO_X,
) -> GcEstimate:
    """Window-length-weighted mean of per-window population causalities."""
    u_k, v_k, b2_k, s2_k = _window_deviations(sched, s)
    lengths = s.window_lengths.astype(float)
    per_window = np.log((u_k + b2_k + s2_k) / (u_k + v_k + s2_k))
    value = float(np.dot(per_window, lengths) / lengths.sum())
    return GcEstimate(value, GcKind.AVERAGE, direction)


def check_c1_condition(
    sched: CoefficientSchedule, s: ChangePointSet, tol: float = 1e-10
) -> bool:
    """True iff the per-window mean total variability is window-independent.

    The quantity is the window mean of the squared coefficient deviations
    plus the mean noise variance; when it is constant across windows, the
    population average causality cannot exceed the cumulative one.
    """
    u_k, v_k, _, s2_k = _window_deviations(sched, s)
    theta = (u_k + v_k + s2_k) / s.window_lengths
    return bool(theta.max() - theta.min() <= tol)
