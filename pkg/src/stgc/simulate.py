"""Seeded generators for the synthetic regimes and the BOLD pipeline.

Innovation variances are unit throughout (coefficient magnitudes are taken
as printed), and the total noise injected along the BOLD pipeline is split
evenly between a physiological and an acquisition stage.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np
from scipy import stats as sps

from .core import (
    ChangePointSet,
    DelayTooLarge,
    Direction,
    InvalidConfig,
    TimeSeriesPair,
)
from .estimator import standardize
from .stats import seeded_rng


def _iterate_var(
    a11: np.ndarray, a12: np.ndarray, a21: np.ndarray, a22: np.ndarray,
    innovations: np.ndarray,
) -> tuple[np.ndarray, np.ndarray]:
    """Iterate the bivariate first-order system for len(a11) steps.

    ``innovations`` has shape (T + 1, 2); the first row seeds the state.
    Returns series of length T + 1.
    """
    T = len(a11)
    x = np.empty(T + 1)
    y = np.empty(T + 1)
    x[0], y[0] = innovations[0]
    for t in range(T):
        x[t + 1] = a11[t] * x[t] + a12[t] * y[t] + innovations[t + 1, 0]
        y[t + 1] = a21[t] * x[t] + a22[t] * y[t] + innovations[t + 1, 1]
    return x, y


def continuous_schedule(u1: float, u2: float, T: int = 1200):
    """Coefficient trajectories of the continuously varying regime.

    Returns (a12, a21) over t = 1..T: the cross coefficients ramp linearly
    and change sign at t = 600 and t = 400 respectively.
    """
    t = np.arange(1, T + 1, dtype=float)
    a12 = 0.5 * (t / 600.0 - 1.0) * u1
    a21 = 0.5 * (1.0 - t / 400.0) * u2
    return a12, a21


def simulate_continuous(
    seed: int, u1: float, u2: float, T: int = 1200
) -> TimeSeriesPair:
    """Bivariate system with continuously time-varying cross coefficients."""
    if not (0.0 <= u1 <= 1.0 and 0.0 <= u2 <= 1.0):
        raise InvalidConfig("u1, u2 must lie in [0, 1]")
    a12, a21 = continuous_schedule(u1, u2, T)
    rng = seeded_rng(seed, stream=0)
    innovations = rng.standard_normal((T + 1, 2))
    x, y = _iterate_var(
        np.full(T, 0.1), a12, a21, np.full(T, 0.1 * np.sqrt(2.0)), innovations
    )
    return TimeSeriesPair(x, y)


#: True switch times of the stepwise regime (coefficient active on
#: (0, 215], zero on (215, 415], negated on (415, 715], zero after).
STEPWISE_SWITCHES = (215, 415, 715)


def stepwise_schedule(u1: float, T: int = 1200) -> np.ndarray:
    """The stepwise cross-coefficient trajectory over t = 1..T."""
    t1, t2, t3 = STEPWISE_SWITCHES
    t = np.arange(1, T + 1)
    a21 = np.zeros(T)
    a21[t <= t1] = 0.5 * u1
    a21[(t > t2) & (t <= t3)] = -0.5 * u1
    return a21


def stepwise_true_changepoints(T: int = 1200) -> ChangePointSet:
    t1, t2, t3 = STEPWISE_SWITCHES
    return ChangePointSet((1, t1 + 1, t2 + 1, t3 + 1, T + 1))


def simulate_stepwise(
    seed: int, u1: float, T: int = 1200
) -> tuple[TimeSeriesPair, ChangePointSet]:
    """One-directional stepwise regime; returns the true change-point set.

    The cross influence runs x -> y only; its whole-record mean is close to
    zero, which is what defeats the single-window estimate.
    """
    if not (0.5 <= u1 <= 1.5):
        raise InvalidConfig("u1 must lie in [0.5, 1.5]")
    a21 = stepwise_schedule(u1, T)
    rng = seeded_rng(seed, stream=0)
    innovations = rng.standard_normal((T + 1, 2))
    x, y = _iterate_var(
        np.full(T, 0.1), np.zeros(T), a21, np.full(T, 0.1 * np.sqrt(2.0)),
        innovations,
    )
    return TimeSeriesPair(x, y), stepwise_true_changepoints(T)


@dataclass(frozen=True)
class HrfParams:
    """Double-gamma hemodynamic response parameters (seconds where timed)."""

    delay_response: float = 6.0
    delay_undershoot: float = 16.0
    dispersion_response: float = 1.0
    dispersion_undershoot: float = 1.0
    ratio: float = 6.0
    onset: float = 0.0
    kernel_length: float = 32.0

    def __post_init__(self) -> None:
        if self.dispersion_response <= 0 or self.dispersion_undershoot <= 0:
            raise InvalidConfig("dispersions must be positive")
        if self.kernel_length <= self.delay_undershoot:
            raise InvalidConfig("kernel_length must exceed delay_undershoot")


def canonical_hrf(params: HrfParams, dt: float) -> np.ndarray:
    """Double-gamma kernel sampled at dt, peak-normalized to 1.

    Response gamma minus undershoot gamma scaled by 1/ratio; zero before
    onset.
    """
    if dt <= 0:
        raise InvalidConfig("dt must be positive")
    t = np.arange(0.0, params.kernel_length + dt / 2, dt) - params.onset
    peak = sps.gamma.pdf(
        t,
        params.delay_response / params.dispersion_response,
        scale=params.dispersion_response,
    )
    undershoot = sps.gamma.pdf(
        t,
        params.delay_undershoot / params.dispersion_undershoot,
        scale=params.dispersion_undershoot,
    )
    kernel = peak - undershoot / params.ratio
    kernel[t < 0] = 0.0
    top = kernel.max()
    if top <= 0:
        raise InvalidConfig("kernel has no positive peak")
    return kernel / top


@dataclass(frozen=True)
class BoldSimConfig:
    """Configuration of the forward BOLD simulation."""

    lfp_steps: int = 40_000
    lfp_dt: float = 0.01
    flip_step: int = 18_000
    a11: float = 0.9
    a22: float = 0.9
    a21_magnitude: float = 0.5
    neuronal_shift_steps: int = 5
    sample_rates: tuple[float, ...] = (2.0, 1.0)
    noise_fraction_total: float = 0.20
    hrf_x: HrfParams = field(default_factory=HrfParams)
    hrf_y: HrfParams = field(default_factory=HrfParams)
    seed: int = 0

    def __post_init__(self) -> None:
        if not (0 < self.flip_step <= self.lfp_steps):
            raise InvalidConfig("flip_step must lie in (0, lfp_steps]")
        if not (0.0 <= self.noise_fraction_total < 1.0):
            raise InvalidConfig("noise_fraction_total must lie in [0, 1)")
        if self.lfp_dt <= 0 or self.lfp_steps <= 0:
            raise InvalidConfig("lfp grid must be positive")
        if self.neuronal_shift_steps < 0:
            raise InvalidConfig("neuronal_shift_steps must be >= 0")
        for rate in self.sample_rates:
            decim = 1.0 / (rate * self.lfp_dt)
            if abs(decim - round(decim)) > 1e-9 or decim < 1:
                raise InvalidConfig(
                    f"sample rate {rate} Hz incompatible with lfp_dt"
                )


def _standardized(arr: np.ndarray) -> np.ndarray:
    return (arr - arr.mean()) / arr.std()


def simulate_bold(
    cfg: BoldSimConfig,
) -> tuple[dict[float, TimeSeriesPair], Direction]:
    """Forward BOLD pipeline; returns per-rate pairs and the ground truth.

    Stages: neuronal iteration with a mid-record sign flip of the cross
    coefficient, neuronal delay of the effect channel, HRF convolution,
    physiological noise, decimation per requested rate, acquisition noise.
    The signals are renormalized to zero mean and unit variance after each
    stage.
    """
    rng_lfp = seeded_rng(cfg.seed, stream=0)
    rng_phys = seeded_rng(cfg.seed, stream=1)
    rng_acq = seeded_rng(cfg.seed, stream=2)

    shift = cfg.neuronal_shift_steps
    n_total = cfg.lfp_steps + shift
    t = np.arange(1, n_total + 1)
    a21 = np.where(t <= cfg.flip_step, cfg.a21_magnitude, -cfg.a21_magnitude)
    innovations = rng_lfp.standard_normal((n_total + 1, 2))
    x, y = _iterate_var(
        np.full(n_total, cfg.a11),
        np.zeros(n_total),
        a21,
        np.full(n_total, cfg.a22),
        innovations,
    )
    # Effect channel lags the cause channel by the neuronal delay.
    x = _standardized(x[shift : shift + cfg.lfp_steps])
    y = _standardized(y[:cfg.lfp_steps])

    per_injection = cfg.noise_fraction_total / 2.0
    channels = {}
    for name, sig, hrf in (("x", x, cfg.hrf_x), ("y", y, cfg.hrf_y)):
        kernel = canonical_hrf(hrf, cfg.lfp_dt)
        bold = _standardized(np.convolve(sig, kernel)[: cfg.lfp_steps])
        if per_injection > 0:
            bold = bold + rng_phys.normal(
                0.0, np.sqrt(per_injection), cfg.lfp_steps
            )
            bold = _standardized(bold)
        channels[name] = bold

    out: dict[float, TimeSeriesPair] = {}
    for rate in cfg.sample_rates:
        decim = round(1.0 / (rate * cfg.lfp_dt))
        xs = _standardized(channels["x"][::decim])
        ys = _standardized(channels["y"][::decim])
        if per_injection > 0:
            xs = _standardized(
                xs + rng_acq.normal(0.0, np.sqrt(per_injection), len(xs))
            )
            ys = _standardized(
                ys + rng_acq.normal(0.0, np.sqrt(per_injection), len(ys))
            )
        out[rate] = TimeSeriesPair(xs, ys, dt=1.0 / rate)
    return out, Direction.X_TO_Y


def bold_config_with_opposite_delay(
    base: BoldSimConfig, delay_seconds: float
) -> BoldSimConfig:
    """Slow the cause channel's response by ``delay_seconds``."""
    hrf_x = replace(
        base.hrf_x, delay_response=base.hrf_y.delay_response + delay_seconds
    )
    return replace(base, hrf_x=hrf_x)


def realign_bold(pair: TimeSeriesPair, delay_samples: int) -> TimeSeriesPair:
    """Shift one channel by ``delay_samples`` and truncate to the common
    support.

    Positive delay discards the first ``delay_samples`` points of x and the
    last ``delay_samples`` of y (x's response was the slower one); negative
    delay does the opposite.
    """
    d = int(delay_samples)
    if abs(d) >= pair.n_steps / 2:
        raise DelayTooLarge(f"|delay| = {abs(d)} >= T/2")
    if d == 0:
        return pair
    if d > 0:
        x, y = pair.x[d:], pair.y[:-d]
    else:
        x, y = pair.x[:d], pair.y[-d:]
    return TimeSeriesPair(x, y, dt=pair.dt, labels=pair.labels)
