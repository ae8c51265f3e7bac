import csv
import random

import mpmath
import pytest
from hypothesis import given, strategies as st

from qdeform.qfourier import (LatticeFunction, double_transform_residual, gram_asymmetry, gram_residual,
                              normalization_nq, plancherel_residual, suggest_window, transform,
                              write_transform_csv)
from qdeform.qspecial import trig_lattice

Q0 = 1.1


def _random_g(seed, lo=-5, hi=5):
    rng = random.Random(seed)
    return LatticeFunction({n: complex(rng.uniform(-1, 1), rng.uniform(-1, 1)) for n in range(lo, hi + 1)}, Q0)


def test_normalization_frozen_and_oracle():
    with mpmath.workdps(40):
        q = mpmath.mpf(Q0)
        oracle = mpmath.nprod(lambda v: (1 - q ** (-2 * (2 * v + 1))) / (1 - q ** (-4 * (v + 1))), [0, mpmath.inf])
    assert normalization_nq(Q0) == pytest.approx(float(oracle), rel=1e-14)
    assert normalization_nq(Q0) == pytest.approx(0.3401547441454704, rel=1e-15)


def test_normalization_at_large_q():
    three = (1 - 1e-2) / (1 - 1e-4) * (1 - 1e-6) / (1 - 1e-8) * (1 - 1e-10) / (1 - 1e-12)
    assert normalization_nq(10) == pytest.approx(three, rel=1e-13)
    assert normalization_nq(10, tol=1e-12) / normalization_nq(10, tol=1e-16) == pytest.approx(1, abs=1e-12)


def test_normalization_needs_q_above_one():
    with pytest.raises(ValueError):
        normalization_nq(1.0)


def test_transform_of_zero_and_delta():
    assert all(v == 0 for v in transform("cos", LatticeFunction({}, Q0), (-5, 5)).samples.values())
    nq = normalization_nq(Q0)
    out = transform("cos", LatticeFunction.delta(0, Q0), (-10, 10))
    for nu, v in out.samples.items():
        assert v == pytest.approx(nq * trig_lattice("cos", 2 * nu, Q0), abs=1e-15)


@pytest.mark.parametrize("kind", ["cos", "sin"])
def test_gram_on_tail_sized_window(kind):
    w = suggest_window(kind, Q0, index_window=(-3, 3))
    assert gram_residual(kind, (-3, 3), w, Q0) < 1e-12
    assert gram_asymmetry(kind, (-3, 3), w, Q0) < 1e-12


def test_gram_sin_on_short_window():
    assert gram_residual("sin", (-3, 3), (-60, 60), Q0) < 1e-6


def test_gram_cos_short_window_truncation_is_visible():
    # the low tail of cos decays only like q^(2 nu); [-60, 60] leaves about 1e-5
    r = gram_residual("cos", (-3, 3), (-60, 60), Q0)
    assert 1e-6 < r < 1e-4


def test_empty_index_window():
    assert gram_residual("cos", (1, 0), (-10, 10), Q0) == 0


@pytest.mark.parametrize("kind", ["cos", "sin"])
def test_plancherel_and_inverse(kind):
    g = _random_g(3)
    w = suggest_window(kind, Q0, index_window=(-5, 5))
    assert plancherel_residual(kind, g, w) < 1e-8
    assert double_transform_residual(kind, g, w) < 1e-8


def test_plancherel_single_point_and_symmetric_pair():
    w = suggest_window("sin", Q0, index_window=(-5, 5))
    assert plancherel_residual("sin", LatticeFunction.delta(2, Q0), w) < 1e-8
    pair = LatticeFunction({-1: 1.0, 1: 1.0}, Q0)
    assert plancherel_residual("sin", pair, w) < 1e-8
    assert double_transform_residual("sin", LatticeFunction({}, Q0), w) == 0


@given(st.integers(0, 10 ** 6))
def test_transform_is_linear(seed):
    a, b = _random_g(seed, -2, 2), _random_g(seed + 1, -2, 2)
    w = (-8, 8)
    lhs = transform("sin", a.combine(2.0, b, -1j), w)
    ta, tb = transform("sin", a, w), transform("sin", b, w)
    for nu in range(-8, 9):
        assert lhs.samples[nu] == pytest.approx(2.0 * ta.samples[nu] - 1j * tb.samples[nu], abs=1e-12)


def test_transform_csv(tmp_path):
    p = tmp_path / "t.csv"
    write_transform_csv(p, transform("cos", LatticeFunction.delta(0, Q0), (-3, 3)))
    rows = list(csv.reader(open(p)))
    assert rows[0] == ["nu", "x", "re", "im"] and len(rows) == 8
