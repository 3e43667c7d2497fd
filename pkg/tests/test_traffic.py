import math

import numpy as np
import pytest
from scipy import stats

from pusense.errors import DomainError
from pusense.traffic import (
    DEFAULT_SHAPES,
    KINDS,
    HoldingDist,
    TrafficModel,
    cdf,
    change_pmf,
    from_mean,
    sample_holding,
    survival_beyond,
)


class TestCdf:
    def test_origin(self):
        assert cdf(from_mean("exponential", 5.0), 0.0) == 0.0

    def test_exponential_at_mean(self):
        assert cdf(from_mean("exponential", 5.0), 5.0) == pytest.approx(1 - math.exp(-1), abs=1e-15)

    def test_erlang_closed_form(self):
        d = from_mean("erlang", 5.0, 2)
        assert cdf(d, 5.0) == pytest.approx(1 - math.exp(-2) * 3, abs=1e-14)

    @pytest.mark.parametrize("kind", KINDS)
    def test_matches_scipy(self, kind):
        d = from_mean(kind, 5.0)
        ref = {
            "exponential": lambda: stats.expon(scale=5.0),
            "lognormal": lambda: stats.lognorm(s=d.params[1], scale=math.exp(d.params[0])),
            "gamma": lambda: stats.gamma(a=d.params[0], scale=d.params[1]),
            "erlang": lambda: stats.gamma(a=d.params[0], scale=1 / d.params[1]),
        }[kind]()
        ts = np.linspace(0, 40, 81)
        np.testing.assert_allclose(cdf(d, ts), ref.cdf(ts), atol=1e-12)

    @pytest.mark.parametrize("kind", KINDS)
    @pytest.mark.parametrize("mean", [0.5, 5.0, 20.0])
    def test_monotone_grid(self, kind, mean):
        vals = cdf(from_mean(kind, mean), np.linspace(0, 10 * mean, 1000))
        assert vals[0] == 0.0
        assert np.all((vals >= 0) & (vals <= 1))
        assert np.all(np.diff(vals) >= 0)

    def test_negative_time(self):
        with pytest.raises(DomainError):
            cdf(from_mean("exponential", 5.0), -1.0)


class TestChangePmf:
    def test_first_sample(self):
        d = from_mean("exponential", 5.0)
        assert change_pmf(d, 1, 1.0) == pytest.approx(1 - math.exp(-0.2), abs=1e-15)

    def test_second_sample(self):
        d = from_mean("exponential", 5.0)
        assert change_pmf(d, 2, 1.0) == pytest.approx(math.exp(-0.2) - math.exp(-0.4), abs=1e-15)

    @pytest.mark.parametrize("kind", KINDS)
    @pytest.mark.parametrize("horizon", [1, 7, 40])
    def test_telescoping(self, kind, horizon):
        d = from_mean(kind, 5.0)
        total = sum(change_pmf(d, g, 1.0) for g in range(1, horizon + 1))
        assert total + survival_beyond(d, horizon, 1.0) == pytest.approx(1.0, abs=1e-12)

    def test_gap_zero_rejected(self):
        with pytest.raises(DomainError):
            change_pmf(from_mean("exponential", 5.0), 0, 1.0)


class TestSurvival:
    def test_no_time(self):
        for kind in KINDS:
            assert survival_beyond(from_mean(kind, 5.0), 0, 1.0) == 1.0

    def test_exponential(self):
        d = from_mean("exponential", 5.0)
        assert survival_beyond(d, 20, 1.0) == pytest.approx(math.exp(-4), rel=1e-12)

    def test_erlang(self):
        d = from_mean("erlang", 5.0, 2)
        assert survival_beyond(d, 5, 1.0) == pytest.approx(math.exp(-2) * 3, abs=1e-13)

    def test_negative_gap(self):
        with pytest.raises(DomainError):
            survival_beyond(from_mean("exponential", 5.0), -1, 1.0)


class TestFromMean:
    def test_exponential_rate(self):
        assert from_mean("exponential", 5.0).params == (0.2,)

    def test_erlang_rate(self):
        d = from_mean("erlang", 5.0, 2)
        assert d.params == (2.0, 0.4)

    def test_lognormal_mu(self):
        d = from_mean("lognormal", 5.0, 0.5)
        assert d.params[0] == pytest.approx(math.log(5) - 0.125, abs=1e-15)
        assert d.params[0] == pytest.approx(1.48444, abs=1e-5)

    @pytest.mark.parametrize("kind", KINDS)
    @pytest.mark.parametrize("mean", [0.3, 5.0, 20.0, 123.4])
    def test_mean_roundtrip(self, kind, mean):
        assert from_mean(kind, mean).mean == pytest.approx(mean, abs=1e-12)

    def test_defaults(self):
        assert from_mean("gamma", 5.0).shape_param == DEFAULT_SHAPES["gamma"]
        assert from_mean("lognormal", 5.0).shape_param == DEFAULT_SHAPES["lognormal"]
        assert from_mean("erlang", 5.0).shape_param == DEFAULT_SHAPES["erlang"]

    @pytest.mark.parametrize("mean", [0.0, -2.0])
    def test_nonpositive_mean(self, mean):
        with pytest.raises(DomainError):
            from_mean("exponential", mean)

    def test_erlang_integer_shape(self):
        with pytest.raises(DomainError):
            from_mean("erlang", 5.0, 2.5)

    def test_bad_params(self):
        with pytest.raises(DomainError):
            HoldingDist("gamma", (2.0, -1.0))
        with pytest.raises(DomainError):
            HoldingDist("weibull", (1.0,))


def test_traffic_model_prior():
    law = from_mean("exponential", 5.0)
    m = TrafficModel(law, law, 0.3)
    assert m.p_e == pytest.approx(0.7)
    assert m.prior(True) == 0.3
    with pytest.raises(DomainError):
        TrafficModel(law, law, 1.5)


class TestSampling:
    def test_exponential_mean(self):
        rng = np.random.default_rng(11)
        draws = sample_holding(from_mean("exponential", 5.0), rng, 1_000_000)
        assert abs(draws.mean() - 5.0) < 0.05

    @pytest.mark.parametrize("kind", KINDS)
    def test_ks_distance(self, kind):
        d = from_mean(kind, 5.0)
        rng = np.random.default_rng(12)
        draws = sample_holding(d, rng, 100_000)
        result = stats.kstest(draws, lambda t: cdf(d, np.maximum(t, 0.0)))
        assert result.statistic < 0.01

    def test_erlang_positive(self):
        rng = np.random.default_rng(13)
        assert np.all(sample_holding(from_mean("erlang", 5.0, 2), rng, 10_000) > 0)

    def test_scalar_draw(self):
        rng = np.random.default_rng(14)
        assert float(sample_holding(from_mean("erlang", 5.0, 3), rng)) > 0
