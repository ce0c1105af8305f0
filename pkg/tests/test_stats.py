"""Distribution functions against independent oracles, and RNG stability."""

import math

import numpy as np
import pytest
from scipy import integrate, special
from scipy import stats as sps

from stgc import (
    DegenerateInput,
    FDistParams,
    InvalidDof,
    LengthMismatch,
    f_cdf,
    f_sf,
    pearson_correlation,
    seeded_rng,
)


def f_density(x, d1, d2):
    """F(d1, d2) density written out from gamma functions (oracle)."""
    if x <= 0:
        return 0.0
    log_num = 0.5 * (d1 * math.log(d1 * x) + d2 * math.log(d2))
    log_den = 0.5 * (d1 + d2) * math.log(d1 * x + d2)
    log_beta = (
        special.gammaln(d1 / 2) + special.gammaln(d2 / 2)
        - special.gammaln((d1 + d2) / 2)
    )
    return math.exp(log_num - log_den - log_beta) / x


class TestFCdf:
    @pytest.mark.parametrize(
        "d1,d2,x",
        [
            (1, 5, 0.5), (1, 97, 2.0), (3, 10, 1.3), (5, 50, 0.9),
            (2, 2, 4.0), (12, 1188, 1.1), (1, 7, 10.0),
        ],
    )
    def test_matches_quadrature_oracle(self, d1, d2, x):
        oracle, err = integrate.quad(
            f_density, 0.0, x, args=(d1, d2), limit=200
        )
        assert err < 1e-6
        assert f_cdf(x, FDistParams(d1, d2)) == pytest.approx(oracle, abs=5e-3)

    def test_cdf_sf_sum_to_one(self):
        params = FDistParams(3, 40)
        for x in (0.1, 1.0, 2.5, 10.0):
            assert f_cdf(x, params) + f_sf(x, params) == pytest.approx(
                1.0, abs=1e-12
            )

    def test_squared_t_relation(self):
        # F(1, d) is the square of Student t(d).
        for d2 in (5, 30, 100):
            for x in (0.2, 1.0, 3.0):
                expected = 2.0 * sps.t.cdf(math.sqrt(x), d2) - 1.0
                assert f_cdf(x, FDistParams(1, d2)) == pytest.approx(
                    expected, abs=1e-10
                )

    def test_edge_cases(self):
        params = FDistParams(2, 8)
        assert f_cdf(0.0, params) == 0.0
        assert f_cdf(-1.0, params) == 0.0
        assert f_sf(0.0, params) == 1.0

    def test_sf_deep_tail_has_no_cancellation(self):
        # Far in the tail, 1 - cdf would round to 0; sf must not.
        p = f_sf(500.0, FDistParams(1, 200))
        assert 0.0 < p < 1e-30

    def test_monotone_in_x(self):
        params = FDistParams(4, 20)
        xs = np.linspace(0.01, 8.0, 50)
        cdf = [f_cdf(x, params) for x in xs]
        assert all(b >= a for a, b in zip(cdf, cdf[1:]))

    def test_invalid_dof_rejected(self):
        with pytest.raises(InvalidDof):
            FDistParams(0, 5)
        with pytest.raises(InvalidDof):
            FDistParams(1, -2)


class TestPearson:
    def test_matches_numpy(self):
        rng = np.random.default_rng(0)
        u = rng.normal(size=40)
        v = 0.3 * u + rng.normal(size=40)
        assert pearson_correlation(u, v) == pytest.approx(
            np.corrcoef(u, v)[0, 1], abs=1e-12
        )

    def test_perfect_correlation(self):
        u = np.arange(10.0)
        assert pearson_correlation(u, 3 * u + 2) == pytest.approx(1.0)
        assert pearson_correlation(u, -u) == pytest.approx(-1.0)

    def test_zero_variance_rejected(self):
        with pytest.raises(DegenerateInput):
            pearson_correlation(np.ones(5), np.arange(5.0))

    def test_length_checks(self):
        with pytest.raises(LengthMismatch):
            pearson_correlation(np.zeros(4), np.zeros(5))
        with pytest.raises(LengthMismatch):
            pearson_correlation([1.0, 2.0], [3.0, 4.0])


class TestSeededRng:
    def test_same_seed_same_stream_bit_identical(self):
        a = seeded_rng(42, stream=3).standard_normal(100)
        b = seeded_rng(42, stream=3).standard_normal(100)
        assert np.array_equal(a, b)

    def test_streams_differ(self):
        a = seeded_rng(42, stream=0).standard_normal(100)
        b = seeded_rng(42, stream=1).standard_normal(100)
        assert not np.array_equal(a, b)

    def test_seeds_differ(self):
        a = seeded_rng(1).standard_normal(100)
        b = seeded_rng(2).standard_normal(100)
        assert not np.array_equal(a, b)

    def test_draws_look_standard_normal(self):
        draws = seeded_rng(7).standard_normal(200_000)
        assert abs(draws.mean()) < 0.01
        assert abs(draws.std() - 1.0) < 0.01
