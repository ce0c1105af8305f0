"""Partition objectives and the BIC-scored search."""

import math

import numpy as np
import pytest

from stgc import (
    Direction,
    GcKind,
    InvalidConfig,
    PartitionEvaluator,
    SearchConfig,
    TimeSeriesPair,
    WindowTooShort,
    equal_window_bic_scan,
    fit_tvmvar,
    partition_agc,
    partition_error,
    search_optimal_partition,
    seeded_rng,
    simulate_stepwise,
    standardize,
    uniform_partition,
    validate_changepoints,
    window_stats,
)


def noise_pair(seed, n=121):
    rng = seeded_rng(seed)
    return TimeSeriesPair(rng.standard_normal(n), rng.standard_normal(n))


class TestObjectives:
    def test_error_composes_from_window_determinants(self):
        pair = noise_pair(0)
        s = validate_changepoints([1, 41, 81, 121], T=120, l0=10)
        std = standardize(pair)
        expected = 0.0
        for lo, hi in s.windows():
            w = window_stats(std, lo, hi)
            expected += (hi - lo) * w.det_sigma
        expected /= s.n_windows
        assert partition_error(pair, s) == pytest.approx(expected, rel=1e-12)

    def test_agc_composes_from_local_values(self):
        pair = noise_pair(1)
        s = validate_changepoints([1, 61, 121], T=120, l0=10)
        std = standardize(pair)
        total = 0.0
        for direction in Direction:
            fit = fit_tvmvar(std, s, direction)
            total += float(
                np.sum(np.log(fit.rss_restricted / fit.rss_full))
            )
        expected = total / (2 * s.n_windows)
        assert partition_agc(pair, s) == pytest.approx(expected, rel=1e-10)

    def test_cost_identity(self):
        pair = noise_pair(2)
        s = validate_changepoints([1, 61, 121], T=120, l0=10)
        ev = PartitionEvaluator(pair)
        err = partition_error(pair, s)
        agc = partition_agc(pair, s)
        for lam in (0.02, 0.5, 1.0):
            assert ev.cost(tuple(s.points), lam) == pytest.approx(
                err + lam / agc, rel=1e-12
            )

    def test_bic_matches_hand_computation(self):
        pair = noise_pair(3)
        s = validate_changepoints([1, 61, 121], T=120, l0=10)
        ev = PartitionEvaluator(pair)
        obj = ev.describe(tuple(s.points), lam=0.1)
        std = standardize(pair)
        llf = sum(window_stats(std, lo, hi).llf for lo, hi in s.windows())
        expected = -2.0 * llf + 4.0 * s.n_windows * math.log(121)
        assert obj.bic == pytest.approx(expected, rel=1e-12)

    def test_evaluator_cache_consistency(self):
        pair = noise_pair(4)
        ev = PartitionEvaluator(pair)
        a = ev.objective((1, 61, 121))
        b = ev.objective((1, 61, 121))
        assert a == b
        fresh = PartitionEvaluator(pair).objective((1, 61, 121))
        assert a == pytest.approx(fresh, rel=1e-14)


def exhaustive_reference(pair, cfg):
    """Brute-force search over the same candidate grid (oracle)."""
    from itertools import combinations

    ev = PartitionEvaluator(pair)
    T = ev.T
    cands = [
        c for c in range(1 + cfg.stride, T + 1, cfg.stride)
        if c - 1 >= cfg.l0 and T + 1 - c >= cfg.l0
    ]
    best = None
    for lam in cfg.lambda_grid:
        for m in range(1, cfg.m0 + 1):
            best_cost = math.inf
            best_points = None
            for interior in combinations(cands, m - 1):
                points = (1, *interior, T + 1)
                if any(b - a < cfg.l0 for a, b in zip(points, points[1:])):
                    continue
                cost = ev.cost(points, lam)
                if cost < best_cost:
                    best_cost = cost
                    best_points = points
            if best_points is None:
                continue
            obj = ev.describe(best_points, lam)
            if best is None or obj.bic < best.bic:
                best = obj
    return best


class TestSearch:
    def test_equivalent_to_exhaustive_at_small_scale(self):
        cfg = SearchConfig(m0=3, lambda_grid=(0.1, 0.5, 1.0), l0=10, stride=1)
        for seed in range(4):
            pair = noise_pair(seed, n=61)
            best, _ = search_optimal_partition(pair, cfg)
            oracle = exhaustive_reference(pair, cfg)
            assert best.changepoints.points == oracle.changepoints.points
            assert best.bic == pytest.approx(oracle.bic, rel=1e-12)

    def test_deterministic(self):
        pair, _ = simulate_stepwise(0, 1.0)
        a, _ = search_optimal_partition(pair)
        b, _ = search_optimal_partition(pair)
        assert a.changepoints.points == b.changepoints.points
        assert a.bic == b.bic

    def test_winner_has_min_bic_in_table(self):
        pair = noise_pair(5, n=201)
        best, table = search_optimal_partition(pair)
        assert best.bic == min(row.bic for row in table)

    def test_table_covers_grid(self):
        cfg = SearchConfig(m0=2, lambda_grid=(0.2, 0.8), l0=10, stride=5)
        pair = noise_pair(6, n=101)
        _, table = search_optimal_partition(pair, cfg)
        cells = {(row.lam, row.m) for row in table}
        assert cells == {(0.2, 1), (0.2, 2), (0.8, 1), (0.8, 2)}

    def test_recovers_strong_single_changepoint(self):
        # Coupling switches sign mid-record; the search must place a point
        # near the switch.
        rng = seeded_rng(77)
        n = 400
        x = rng.standard_normal(n + 1)
        y = np.empty(n + 1)
        y[0] = 0.0
        for t in range(n):
            b = 0.9 if t < 200 else -0.9
            y[t + 1] = 0.2 * y[t] + b * x[t] + 0.4 * rng.standard_normal()
        pair = TimeSeriesPair(x, y)
        best, _ = search_optimal_partition(pair)
        interior = best.changepoints.points[1:-1]
        assert any(abs(p - 201) <= 30 for p in interior)

    def test_config_validation(self):
        with pytest.raises(InvalidConfig):
            SearchConfig(m0=0)
        with pytest.raises(InvalidConfig):
            SearchConfig(l0=3)
        with pytest.raises(InvalidConfig):
            SearchConfig(lambda_grid=())
        with pytest.raises(InvalidConfig):
            SearchConfig(stride=0)


class TestUniformPartition:
    def test_exact_division(self):
        s = uniform_partition(1200, 100, l0=10)
        assert s.points == tuple(range(1, 1202, 100))
        assert s.n_windows == 12

    def test_remainder_kept_when_long_enough(self):
        s = uniform_partition(120, 50, l0=10)
        assert s.points == (1, 51, 101, 121)

    def test_short_remainder_rejected(self):
        with pytest.raises(WindowTooShort):
            uniform_partition(105, 50, l0=10)


class TestEqualWindowScan:
    def test_scan_recomputes_consistently(self):
        pair, _ = simulate_stepwise(3, 1.0)
        results = equal_window_bic_scan(pair, [100, 200], n_draws=2000)
        assert [r.length for r in results] == [100, 200]
        for r in results:
            assert r.changepoints.n_windows == 1200 // r.length
            ev = PartitionEvaluator(pair)
            obj = ev.describe(tuple(r.changepoints.points), lam=1.0)
            assert r.bic == pytest.approx(obj.bic, rel=1e-12)
            for key, est in r.estimates.items():
                direction, kind = key
                assert est.direction is direction
                assert est.kind is kind
                assert est.value >= 0.0
