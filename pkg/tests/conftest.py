"""Session-scoped simulation corpora shared across acceptance criteria."""

import dataclasses
import time

import numpy as np
import pytest

from stgc import (
    BoldSimConfig,
    Direction,
    DkfConfig,
    GcKind,
    bold_config_with_opposite_delay,
    dkf_gc,
    fit_tvmvar,
    gc_for_partition,
    search_optimal_partition,
    seeded_rng,
    simulate_bold,
    simulate_continuous,
    simulate_stepwise,
    standardize,
    uniform_partition,
)

MC_DRAWS = 100_000


def pytest_terminal_summary(terminalreporter):
    """Echo the per-criterion acceptance lines after the test summary."""
    try:
        from test_acceptance import RESULT_LINES
    except ImportError:
        return
    if RESULT_LINES:
        terminalreporter.section("acceptance criteria")
        for line in RESULT_LINES:
            terminalreporter.write_line(line)


def gc_values(std_pair, s, direction):
    """(average value, cumulative value) without significance machinery.

    Expects an already-standardized pair.
    """
    fit = fit_tvmvar(std_pair, s, direction)
    ratios = np.log(fit.rss_restricted / fit.rss_full)
    avg = float(np.dot(ratios, fit.n_obs) / fit.n_obs.sum())
    cum = float(np.log(fit.rss_restricted.sum() / fit.rss_full.sum()))
    return avg, cum


def measure(pair, s, direction, n_draws=MC_DRAWS):
    """Average and cumulative estimates (value + p) for one partition."""
    avg = gc_for_partition(
        pair, s, direction, GcKind.AVERAGE, n_draws=n_draws, seed=0
    )
    cum = gc_for_partition(pair, s, direction, GcKind.CUMULATIVE)
    return avg, cum


@pytest.fixture(scope="session")
def stepwise_corpus():
    """100 seeded stepwise-regime runs with classic, window-100, and
    optimal-partition measurements in both directions."""
    start = time.perf_counter()
    runs = []
    w100 = uniform_partition(1200, 100, l0=10)
    trivial = uniform_partition(1200, 1200, l0=10)
    for seed in range(100):
        u_rng = seeded_rng(seed, stream=7)
        u1 = float(u_rng.uniform(0.5, 1.5))
        pair, _ = simulate_stepwise(seed, u1)
        best, _ = search_optimal_partition(pair)
        run = {"seed": seed, "u1": u1, "opt_points": best.changepoints.points}
        for direction in Direction:
            tag = direction.value
            _, classic = measure(pair, trivial, direction, n_draws=100)
            run[f"classic_{tag}"] = classic
            avg, cum = measure(pair, w100, direction)
            run[f"w100_avg_{tag}"] = avg
            run[f"w100_cum_{tag}"] = cum
            avg, cum = measure(pair, best.changepoints, direction)
            run[f"opt_avg_{tag}"] = avg
            run[f"opt_cum_{tag}"] = cum
        runs.append(run)
    return {"runs": runs, "elapsed": time.perf_counter() - start}


@pytest.fixture(scope="session")
def continuous_corpus():
    """100 seeded continuous-regime runs measured on the three uniform
    window lengths 50, 200, 400 (finest to coarsest)."""
    start = time.perf_counter()
    partitions = {
        50: uniform_partition(1200, 50, l0=10),
        200: uniform_partition(1200, 200, l0=10),
        400: uniform_partition(1200, 400, l0=10),
    }
    runs = []
    for seed in range(100):
        u_rng = seeded_rng(seed, stream=8)
        u1 = float(u_rng.uniform(0.0, 1.0))
        u2 = float(u_rng.uniform(0.0, 1.0))
        std = standardize(simulate_continuous(seed, u1, u2))
        run = {}
        for direction in Direction:
            for length, s in partitions.items():
                avg, cum = gc_values(std, s, direction)
                run[(direction.value, "avg", length)] = avg
                run[(direction.value, "cum", length)] = cum
        runs.append(run)
    return {"runs": runs, "elapsed": time.perf_counter() - start}


@pytest.fixture(scope="session")
def bold_corpus():
    """100 seeded forward BOLD runs at 2 Hz: optimal average GC and the
    Kalman baseline in both directions."""
    runs = []
    dkf_cfg = DkfConfig(n_bootstrap=50)
    for seed in range(100):
        pairs, _ = simulate_bold(BoldSimConfig(seed=seed))
        pair = pairs[2.0]
        best, _ = search_optimal_partition(pair)
        run = {"seed": seed}
        for direction in Direction:
            tag = direction.value
            avg, _ = measure(pair, best.changepoints, direction)
            run[f"opt_avg_{tag}"] = avg
            run[f"dkf_{tag}"] = dkf_gc(pair, dkf_cfg, direction)
        runs.append(run)
    return runs


@pytest.fixture(scope="session")
def null_bold_corpus():
    """100 BOLD runs with no neuronal coupling and a 3 s opposite response
    delay: optimal-partition measurements in both directions."""
    base = bold_config_with_opposite_delay(
        BoldSimConfig(a21_magnitude=0.0), 3.0
    )
    runs = []
    for seed in range(100):
        cfg = dataclasses.replace(base, seed=seed)
        pairs, _ = simulate_bold(cfg)
        pair = pairs[2.0]
        best, _ = search_optimal_partition(pair)
        run = {"seed": seed}
        for direction in Direction:
            tag = direction.value
            avg, cum = measure(pair, best.changepoints, direction)
            run[f"avg_{tag}"] = avg
            run[f"cum_{tag}"] = cum
        runs.append(run)
    return runs
