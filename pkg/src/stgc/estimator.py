"""Per-window OLS fitting of the full and restricted first-order models.

The full model regresses the target channel's next value on both channels'
current values; the restricted model drops the cross channel.  Residual
variances are maximum-likelihood (RSS/n): the normalization cancels inside
the causality log-ratios and matches the likelihood term of the BIC.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import (
    ChangePointSet,
    DegenerateInput,
    Direction,
    NearCollinear,
    TimeSeriesPair,
)

_LOG_2PI = float(np.log(2.0 * np.pi))
#: Relative singular-value cutoff for rank-deficient window designs.
_SV_CUTOFF = 1e-10


def standardize(pair: TimeSeriesPair) -> TimeSeriesPair:
    """Rescale both channels to sample mean 0 and sample variance 1.

    Applied once, globally, before any windowing.
    """
    out = []
    for series in (pair.x, pair.y):
        mu = series.mean()
        var = series.var()
        if var == 0:
            raise DegenerateInput("cannot standardize a constant series")
        out.append((series - mu) / np.sqrt(var))
    return TimeSeriesPair(out[0], out[1], dt=pair.dt, labels=pair.labels)


def orthogonalize(pair: TimeSeriesPair, tol: float = 1e-9) -> TimeSeriesPair:
    """Replace the y channel by z = (y - c x) / sqrt(1 - c^2).

    Expects standardized input; ``c`` is the sample correlation.  The output
    y channel is uncorrelated with x and has unit sample variance.
    """
    c = float(np.dot(pair.x, pair.y) / len(pair.x))
    if abs(c) >= 1.0 - tol:
        raise NearCollinear(f"|corr| = {abs(c):.12g} too close to 1")
    z = (pair.y - c * pair.x) / np.sqrt(1.0 - c * c)
    return TimeSeriesPair(pair.x, z, dt=pair.dt, labels=pair.labels)


def _solve_2x2(g11, g12, g22, r1, r2):
    """Solve the 2x2 normal equations with a singular-value cutoff."""
    G = np.array([[g11, g12], [g12, g22]])
    rhs = np.array([r1, r2])
    scale = np.abs(G).max()
    if scale == 0:
        return 0.0, 0.0
    w, V = np.linalg.eigh(G)
    keep = w > _SV_CUTOFF * scale
    winv = np.where(keep, 1.0 / np.where(keep, w, 1.0), 0.0)
    coef = V @ (winv * (V.T @ rhs))
    return float(coef[0]), float(coef[1])


@dataclass(frozen=True)
class WindowStats:
    """OLS summaries of one window's full and restricted regressions.

    ``rss_*_x`` refer to the x-target equation (test of y driving x),
    ``rss_*_y`` to the y-target equation.  ``llf`` is the Gaussian
    log-likelihood of the bivariate full fit with ML residual covariance.
    """

    n_obs: int
    coef_x: tuple[float, float]  # (own, cross) for target x
    coef_y: tuple[float, float]  # (own, cross) for target y

    restricted_x: float
    restricted_y: float
    rss_full_x: float
    rss_full_y: float
    rss_restricted_x: float
    rss_restricted_y: float
    det_sigma: float
    llf: float


def window_stats(pair: TimeSeriesPair, start: int, end: int) -> WindowStats:
    """Fit both per-window equations on the 1-based window [start, end)."""
    i0, i1 = start - 1, end - 1
    u = pair.x[i0:i1]
    v = pair.y[i0:i1]
    xn = pair.x[i0 + 1 : i1 + 1]
    yn = pair.y[i0 + 1 : i1 + 1]
    n = i1 - i0

    suu = float(np.dot(u, u))
    svv = float(np.dot(v, v))
    suv = float(np.dot(u, v))
    sux = float(np.dot(u, xn))
    svx = float(np.dot(v, xn))
    suy = float(np.dot(u, yn))
    svy = float(np.dot(v, yn))
    sxx = float(np.dot(xn, xn))
    syy = float(np.dot(yn, yn))

    ax, bx = _solve_2x2(suu, suv, svv, sux, svx)
    by, ay = _solve_2x2(svv, suv, suu, svy, suy)

    rss_full_x = max(sxx - 2.0 * (ax * sux + bx * svx)
                     + ax * ax * suu + 2.0 * ax * bx * suv + bx * bx * svv, 0.0)
    rss_full_y = max(syy - 2.0 * (by * svy + ay * suy)
                     + by * by * svv + 2.0 * ay * by * suv + ay * ay * suu, 0.0)

    # Cross-covariance of the two equations' full residuals, for det(Sigma).
    sxy_resid = float(np.dot(xn, yn)) \
        - by * svx - ay * sux - ax * suy - bx * svy \
        + ax * by * suv + ax * ay * suu + bx * by * svv + bx * ay * suv

    rx = sux / suu if suu > 0 else 0.0
    ry = svy / svv if svv > 0 else 0.0
    rss_restricted_x = max(sxx - rx * sux, 0.0)
    rss_restricted_y = max(syy - ry * svy, 0.0)

    det_sigma = max(
        (rss_full_x * rss_full_y - sxy_resid * sxy_resid) / (n * n), 0.0
    )
    llf = -0.5 * n * (2.0 * _LOG_2PI + np.log(max(det_sigma, 1e-300)) + 2.0)

    return WindowStats(
        n_obs=n,
        coef_x=(ax, bx),
        coef_y=(by, ay),
        restricted_x=rx,
        restricted_y=ry,
        rss_full_x=rss_full_x,
        rss_full_y=rss_full_y,
        rss_restricted_x=rss_restricted_x,
        rss_restricted_y=rss_restricted_y,
        det_sigma=det_sigma,
        llf=float(llf),
    )


@dataclass(frozen=True)
class TvMvarFit:
    """Per-window coefficients and residual sums for one test direction.

    The direction fixes the target channel: Y_TO_X means the x equation is
    tested for an improvement from y's past.  ``a_bar``/``b_bar`` are the
    full model's own/cross coefficients, ``a_tilde`` the restricted model's
    own coefficient.  ``llf`` is the bivariate per-window log-likelihood,
    shared by both directions.
    """

    changepoints: ChangePointSet
    direction: Direction
    a_bar: np.ndarray
    b_bar: np.ndarray
    a_tilde: np.ndarray
    rss_full: np.ndarray
    rss_restricted: np.ndarray
    llf: np.ndarray
    n_obs: np.ndarray

    @property
    def n_windows(self) -> int:
        return self.changepoints.n_windows

    @property
    def n_steps(self) -> int:
        return int(self.n_obs.sum())


def fit_tvmvar(
    pair: TimeSeriesPair, s: ChangePointSet, direction: Direction
) -> TvMvarFit:
    """Windowed OLS fit of the full and restricted models along ``s``.

    The input series must carry T+1 samples for the T steps covered by the
    change-point set.  Deterministic; standardization, when wanted, is the
    caller's responsibility.
    """
    if s.n_steps != pair.n_steps:
        raise _length_error(pair, s)
    stats = [window_stats(pair, a, b) for a, b in s.windows()]
    return fit_from_window_stats(s, direction, stats)


def fit_from_window_stats(
    s: ChangePointSet, direction: Direction, stats: list[WindowStats]
) -> TvMvarFit:
    """Assemble a TvMvarFit from precomputed per-window summaries."""
    if direction is Direction.Y_TO_X:
        a_bar = np.array([w.coef_x[0] for w in stats])
        b_bar = np.array([w.coef_x[1] for w in stats])
        a_tilde = np.array([w.restricted_x for w in stats])
        rss_full = np.array([w.rss_full_x for w in stats])
        rss_restricted = np.array([w.rss_restricted_x for w in stats])
    else:
        a_bar = np.array([w.coef_y[0] for w in stats])
        b_bar = np.array([w.coef_y[1] for w in stats])
        a_tilde = np.array([w.restricted_y for w in stats])
        rss_full = np.array([w.rss_full_y for w in stats])
        rss_restricted = np.array([w.rss_restricted_y for w in stats])
    # Nested models: guard against roundoff making restricted < full.
    rss_restricted = np.maximum(rss_restricted, rss_full)
    return TvMvarFit(
        changepoints=s,
        direction=direction,
        a_bar=a_bar,
        b_bar=b_bar,
        a_tilde=a_tilde,
        rss_full=rss_full,
        rss_restricted=rss_restricted,
        llf=np.array([w.llf for w in stats]),
        n_obs=np.array([w.n_obs for w in stats]),
    )


def _length_error(pair: TimeSeriesPair, s: ChangePointSet):
    from .core import LengthMismatch

    return LengthMismatch(
        f"change-point set covers {s.n_steps} steps but the series has "
        f"{pair.n_steps}"
    )
