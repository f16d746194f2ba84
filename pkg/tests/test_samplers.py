import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from latdiff.lattice import Alphabet, Rademacher, UniformCircle
from latdiff.samplers import (
    Bernoulli,
    Ledrappier,
    PhaseFixedPoint,
    RudinShapiro2D,
    SamplerSpec,
    Times23,
    derive_seed,
    ledrappier_from_row,
    ledrappier_rows,
    rudin_shapiro_1d,
    rudin_shapiro_signs,
    sample,
    sample_bernoulli,
    sample_ledrappier,
    sample_rudin_shapiro_2d,
    sample_times23,
    times23_anchor,
    times23_from_anchor,
    times23_precision,
)


def test_degenerate_rademacher_is_all_plus():
    w = sample_bernoulli(Rademacher(1.0), 17, 9, seed=5)
    assert np.all(w.data == 1)


def test_fair_coin_mean_small():
    w = sample_bernoulli(Rademacher(0.5), 512, 512, seed=11)
    assert abs(w.data.real.mean()) < 0.01
    assert w.alphabet is Alphabet.PLUS_MINUS_ONE


def test_uniform_circle_second_moment_small():
    w = sample_bernoulli(UniformCircle(), 512, 512, seed=11)
    assert abs(np.mean(w.data**2)) < 0.02
    assert w.alphabet is Alphabet.CIRCLE


def test_same_seed_same_window():
    spec = SamplerSpec(Bernoulli(UniformCircle()), 32, 16, 99)
    assert sample(spec) == sample(spec)
    assert sample(spec) != sample(spec.resized(32, 16, seed=100))


@pytest.mark.parametrize("system", [Bernoulli(UniformCircle()), Ledrappier(), Times23()])
def test_subwindow_agreement(system):
    big = sample(SamplerSpec(system, 64, 48, 3)).data
    small = sample(SamplerSpec(system, 20, 30, 3)).data
    assert np.max(np.abs(big[:30, :20] - small)) <= 1e-15


def test_ledrappier_row_example():
    rows = ledrappier_rows(np.array([1, -1, 1]), 2)
    assert list(rows[1][:2]) == [-1, -1]


def test_ledrappier_all_plus_row():
    w = ledrappier_from_row(np.ones(20, dtype=int), 10, 8)
    assert np.all(w.data == 1)


@given(st.integers(0, 2**64 - 1), st.integers(1, 40), st.integers(1, 40))
@settings(max_examples=30, deadline=None)
def test_ledrappier_constraint(seed, width, height):
    s = sample_ledrappier(width, height, seed).signs().astype(int)
    if width > 1 and height > 1:
        assert np.all(s[:-1, :-1] * s[:-1, 1:] * s[1:, :-1] == 1)


def test_ledrappier_short_row_rejected():
    with pytest.raises(ValueError):
        ledrappier_from_row(np.ones(5, dtype=int), 4, 4)


def test_times23_fixed_points():
    zero = times23_from_anchor(PhaseFixedPoint(0, 256), 8, 8)
    assert np.all(zero.data == 1)
    half = times23_from_anchor(PhaseFixedPoint(1 << 255, 256), 3, 2)
    assert half.lookup((0, 0)) == pytest.approx(-1)
    assert half.lookup((1, 0)) == 1


def test_phase_fixed_point_ops():
    p = PhaseFixedPoint(0b011, 3)  # 3/8
    assert p.doubled().numerator == 0b110
    assert p.tripled().numerator == 0b001  # 9/8 mod 1
    assert p.scaled(1, 1).numerator == (3 * 3 * 2) % 8
    assert p.to_float() == 0.375
    with pytest.raises(ValueError):
        PhaseFixedPoint(8, 3)


@given(st.integers(0, 2**63), st.integers(1, 12), st.integers(1, 12))
@settings(max_examples=40, deadline=None)
def test_times23_local_rules(seed, width, height):
    w = sample_times23(width, height, seed).data
    assert np.allclose(w[:, 1:], w[:, :-1] ** 2, atol=1e-12)
    assert np.allclose(w[1:, :], w[:-1, :] ** 3, atol=1e-12)


def test_times23_guard_bit_perturbation():
    # flipping bits below the guard region moves weights by a negligible amount
    width, height, guard = 24, 24, 64
    anchor = times23_anchor(width, height, 7, guard)
    flipped = PhaseFixedPoint(anchor.numerator ^ ((1 << (guard // 2)) - 1), anchor.bits)
    a = times23_from_anchor(anchor, width, height).data
    b = times23_from_anchor(flipped, width, height).data
    assert np.max(np.abs(a - b)) < 1e-9


def test_times23_precision_budget():
    bits = times23_precision(100, 50, 64)
    assert bits % 64 == 0 and bits >= 100 + (3**50).bit_length() + 64
    with pytest.raises(ValueError):
        times23_anchor(4, 4, 0, guard_bits=10)


def test_rudin_shapiro_values():
    assert rudin_shapiro_1d(0) == 1
    assert rudin_shapiro_1d(3) == -1
    assert rudin_shapiro_1d(7) == 1
    assert list(rudin_shapiro_signs(64)) == [rudin_shapiro_1d(n) for n in range(64)]


def test_rudin_shapiro_2d_sites():
    w = sample_rudin_shapiro_2d(8, 8)
    assert w.lookup((0, 0)) == 1
    assert w.lookup((3, 3)) == 1
    assert w.lookup((3, 0)) == -1
    assert sample(SamplerSpec(RudinShapiro2D(), 8, 8, 1)) == sample(SamplerSpec(RudinShapiro2D(), 8, 8, 2))


def test_seed_validation():
    with pytest.raises(ValueError):
        sample_ledrappier(4, 4, -1)
    with pytest.raises(ValueError):
        sample_ledrappier(0, 4, 1)


def test_derive_seed_is_deterministic():
    assert derive_seed(7, 64) == derive_seed(7, 64)
    assert derive_seed(7, 64) != derive_seed(7, 128)
