from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from latdiff.correlations import (
    CorrelationQuery,
    NoValidPairsError,
    autocorr_coefficient,
    autocorr_table,
    correlation,
    correlation_convergence,
)
from latdiff.lattice import Rademacher, UniformCircle, WeightWindow
from latdiff.samplers import Bernoulli, Ledrappier, SamplerSpec, Times23, sample

lags = st.tuples(st.integers(-5, 5), st.integers(-5, 5))


def stripes(n=16):
    return WeightWindow.from_signs(np.tile((-1) ** np.arange(n), (n, 1)))


def test_constant_window():
    w = WeightWindow.constant(8, 8)
    assert autocorr_coefficient(w, (3, -2)) == 1
    table = autocorr_table(w, 2)
    assert np.allclose(table.values, 1, rtol=0, atol=1e-12)
    assert autocorr_table(w, 2, method="direct").values.tolist() == [[1] * 5] * 5


def test_stripes():
    w = stripes()
    assert autocorr_coefficient(w, (1, 0)) == -1
    assert autocorr_coefficient(w, (0, 1)) == 1


def test_no_pairs():
    with pytest.raises(NoValidPairsError):
        autocorr_coefficient(WeightWindow.constant(4, 4), (4, 0))
    with pytest.raises(NoValidPairsError):
        autocorr_table(WeightWindow.constant(4, 4), 4)


def test_ledrappier_coefficient_small():
    w = sample(SamplerSpec(Ledrappier(), 512, 512, 7))
    assert abs(autocorr_coefficient(w, (3, 1))) <= 0.02


def test_exact_coefficients():
    w = stripes(5)
    assert autocorr_coefficient(w, (1, 0), exact=True) == Fraction(-1)
    assert isinstance(autocorr_coefficient(w, (2, 2), exact=True), Fraction)


@given(lags)
@settings(max_examples=40, deadline=None)
def test_hermitian_symmetry(z):
    w = sample(SamplerSpec(Bernoulli(UniformCircle()), 24, 20, 4))
    a = autocorr_coefficient(w, z)
    b = autocorr_coefficient(w, (-z[0], -z[1]))
    assert a == pytest.approx(b.conjugate(), abs=1e-15)


@pytest.mark.parametrize("system", [Bernoulli(UniformCircle()), Ledrappier(), Times23()])
def test_fft_matches_direct(system):
    w = sample(SamplerSpec(system, 40, 33, 2))
    fft = autocorr_table(w, 6, method="fft")
    direct = autocorr_table(w, 6, method="direct")
    assert np.max(np.abs(fft.values - direct.values)) < 1e-10
    assert np.array_equal(fft.counts, direct.counts)
    assert fft.count((0, 0)) == 40 * 33 and fft.count((-6, 6)) == 34 * 27


def test_table_access():
    table = autocorr_table(WeightWindow.constant(6, 6), 1)
    assert len(table.entries) == 9
    assert table.count((1, 0)) == 30
    assert sum(table.sample_counts.values()) == int(table.counts.sum())
    with pytest.raises(KeyError):
        table[(2, 0)]


def test_triples_exact_on_ledrappier():
    w = sample(SamplerSpec(Ledrappier(), 200, 200, 1))
    for n in range(7):
        q = CorrelationQuery.points([(0, 0), (2**n, 0), (0, 2**n)])
        assert correlation(w, q, exact=True) == 1


def test_triples_small_on_bernoulli():
    w = sample(SamplerSpec(Bernoulli(Rademacher(0.5)), 512, 512, 1))
    for n in range(7):
        q = CorrelationQuery.points([(0, 0), (2**n, 0), (0, 2**n)])
        assert abs(correlation(w, q)) <= 0.02


def test_times23_identity():
    w = sample(SamplerSpec(Times23(), 64, 64, 5))
    q = CorrelationQuery.of(((0, 1), -2), ((1, 1), 1))
    assert abs(correlation(w, q) - 1) < 1e-6


def test_conjugate_term_gives_eta():
    w = sample(SamplerSpec(Bernoulli(UniformCircle()), 30, 30, 8))
    q = CorrelationQuery.of(((0, 0), -1), ((2, 1), 1))
    assert correlation(w, q) == pytest.approx(autocorr_coefficient(w, (2, 1)), abs=1e-15)


def test_power_reduction_on_signs():
    w = sample(SamplerSpec(Bernoulli(Rademacher(0.5)), 30, 30, 8))
    even = CorrelationQuery.of(((0, 0), 2), ((1, 0), 4))
    assert correlation(w, even, exact=True) == 1
    odd = CorrelationQuery.of(((0, 0), 3), ((1, 0), -1))
    assert correlation(w, odd) == pytest.approx(autocorr_coefficient(w, (1, 0)))


def test_all_zero_powers():
    q = CorrelationQuery.of(((0, 0), 0), ((1, 1), 0))
    for system in (Ledrappier(), Bernoulli(UniformCircle())):
        assert correlation(sample(SamplerSpec(system, 10, 10, 0)), q) == 1


@given(st.lists(lags, min_size=1, max_size=4), st.tuples(st.integers(-3, 3), st.integers(-3, 3)))
@settings(max_examples=30, deadline=None)
def test_translation_invariance(sites, t):
    # shifting every query site shifts the set of valid positions with it
    w = sample(SamplerSpec(Ledrappier(), 30, 30, 9))
    q = CorrelationQuery.points(sites)
    assert correlation(w, q, exact=True) == correlation(w, q.translated(t), exact=True)


def test_query_too_wide():
    w = WeightWindow.constant(4, 4)
    with pytest.raises(NoValidPairsError):
        correlation(w, CorrelationQuery.points([(0, 0), (4, 0)]))


def test_convergence_ledrappier_constant():
    q = CorrelationQuery.points([(0, 0), (1, 0), (0, 1)])
    series = correlation_convergence(SamplerSpec(Ledrappier(), 8, 8, 3), q, [16, 32, 64])
    assert [v for _, v in series] == [1, 1, 1]
    with pytest.raises(ValueError):
        correlation_convergence(SamplerSpec(Ledrappier(), 8, 8, 3), q, [32, 16])


def test_convergence_slope_bernoulli():
    # the window mean over n x n sites has rms 1/n; fit log rms against log n over 20 seeds
    sizes = [64, 128, 256, 512]
    q = CorrelationQuery.points([(0, 0)])
    squares = np.zeros(len(sizes))
    for seed in range(20):
        series = correlation_convergence(SamplerSpec(Bernoulli(Rademacher(0.5)), 8, 8, seed), q, sizes)
        squares += [abs(v) ** 2 for _, v in series]
    slope = np.polyfit(np.log(sizes), 0.5 * np.log(squares / 20), 1)[0]
    assert -1.3 <= slope <= -0.7
