import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from seedmra import (BoxMomentum, Gaussian, PhaseSpec, PositivityError, RaisedCosineMomentum, c_weights,
                     expansion_weights, f_weights, filter_coefficients, filter_from_f, filter_via_convolution,
                     onc_residual, overlap_table, spectral_series, synthesize_H)
from seedmra.relevance import check_r1
from seedmra.seed import A
from seedmra.seqtools import POLY, classify_decay

# Gaussian reference values from 30-digit evaluations of the defining integrals
GAUSS_C = {0: 0.839332669730503, 1: -7.83705921465729e-4, 2: 1.0976433287e-6}
GAUSS_H = {0: 0.998140376197417, 1: 0.0430932820319859, 2: -9.28507796e-4}
GAUSS_H_SUM = 1.08239220028519


@pytest.fixture(scope="module")
def haar_series():
    return spectral_series(overlap_table(BoxMomentum(2), 2))


@pytest.fixture(scope="module")
def gauss_c(gaussian_series):
    return c_weights(gaussian_series, s_max=None)


@pytest.fixture(scope="module")
def gauss_H(gaussian, gauss_c):
    return filter_coefficients(gaussian, gauss_c)


def test_phase_parsing():
    assert PhaseSpec.parse(None) == PhaseSpec()
    assert PhaseSpec.parse("linear:3") == PhaseSpec("linear", k0=3)
    assert PhaseSpec.parse("quadratic:1.5").gamma == 1.5
    with pytest.raises(ValueError):
        PhaseSpec.parse("cubic:1")
    with pytest.raises(ValueError):
        PhaseSpec("quadratic", gamma=0.0)


def test_haar_weights_are_exact_delta(haar_series):
    c = c_weights(haar_series, s_max=4)
    assert c.method == "exact"
    expected = np.zeros(9)
    expected[4] = 1.0
    np.testing.assert_allclose(c.values, expected, atol=1e-14)


@given(st.integers(-6, 6))
@settings(max_examples=13)
def test_linear_phase_moves_the_delta(k0):
    series = spectral_series(overlap_table(BoxMomentum(2), 2))
    c = c_weights(series, PhaseSpec("linear", k0=k0), s_max=8)
    assert abs(c[k0] - 1.0) < 1e-14
    assert np.sum(np.abs(c.values)) == pytest.approx(1.0, abs=1e-14)


def test_gaussian_weights(gauss_c):
    for s, v in GAUSS_C.items():
        assert gauss_c[s].real == pytest.approx(v, rel=1e-9)
        assert gauss_c[-s].real == pytest.approx(v, rel=1e-9)
    assert gauss_c.tail_ok and gauss_c.converged
    json.dumps(gauss_c.to_dict())


def test_gaussian_expansion_weights(gaussian_series):
    crude = expansion_weights(gaussian_series, 0)
    assert crude.values.shape == (1,)
    assert crude[0] == pytest.approx(1 / math.sqrt(1.41949548808376612), abs=1e-12)
    first = expansion_weights(gaussian_series, 1)
    # first-order correction already gets c_1 to within a few percent
    assert first[1].real == pytest.approx(GAUSS_C[1], rel=5e-2)
    with pytest.raises(ValueError):
        expansion_weights(gaussian_series, 2)


@pytest.mark.parametrize("k", [2, 3, 5])
def test_even_width_box_is_not_positive(k):
    table = overlap_table(BoxMomentum(2 * k), 2 * k)
    series = spectral_series(table)
    assert series.min_value == pytest.approx(0.0, abs=1e-9)
    with pytest.raises(PositivityError) as err:
        c_weights(series)
    assert err.value.min_value < 1e-8
    with pytest.raises(PositivityError):
        f_weights(table, radius=2)


@pytest.mark.parametrize("width", [1, 2])
def test_one_and_two_cell_boxes(width):
    seed = BoxMomentum(width)
    table = overlap_table(seed, 2)
    f = f_weights(table, radius=2)
    delta = np.zeros((5, 5))
    delta[2, 2] = 1.0
    np.testing.assert_allclose(f.values, delta, atol=1e-12)
    # with delta weights the synthesized function is the seed itself
    P = np.linspace(-7, 7, 29)
    np.testing.assert_allclose(synthesize_H(seed, f, P), seed.h(P), atol=1e-12)
    H = filter_coefficients(seed, c_weights(spectral_series(table), s_max=4))
    assert H.tail_flag == "exact"
    expected = [1.0] if width == 1 else [2**-0.5, 2**-0.5]
    np.testing.assert_allclose(H.values, expected, atol=1e-12)
    assert H.n_min == 0


def test_gaussian_filter(gauss_H):
    for n, v in GAUSS_H.items():
        assert gauss_H[n].real == pytest.approx(v, rel=1e-8, abs=1e-14)
        assert gauss_H[-n].real == pytest.approx(v, rel=1e-8, abs=1e-14)
    assert np.sum(gauss_H.values).real == pytest.approx(GAUSS_H_SUM, abs=1e-11)
    assert gauss_H.tail_flag == "threshold"
    assert not gauss_H.meta["cap_hit"]


@pytest.mark.parametrize("width", [1, 2, 3, 7])
def test_routes_agree_on_boxes(width):
    seed = BoxMomentum(width)
    c = c_weights(spectral_series(overlap_table(seed, width + 1)), s_max=None)
    direct = filter_coefficients(seed, c)
    conv = filter_via_convolution(seed, c)
    assert np.max(np.abs(direct.values - conv.values)) < 1e-12


def test_routes_agree_on_gaussian(gaussian, gauss_c, gauss_H):
    conv = filter_via_convolution(gaussian, gauss_c)
    assert conv.n_min == gauss_H.n_min
    assert np.max(np.abs(conv.values - gauss_H.values)) < 1e-12


def test_two_dimensional_route(gaussian, gaussian_table, gauss_H):
    f = f_weights(gaussian_table, radius=16)
    from_f = filter_from_f(gaussian, f, (gauss_H.n_min, gauss_H.n_max))
    assert np.max(np.abs(from_f.values - gauss_H.values)) < 1e-8
    # column sums of f reproduce c
    c = c_weights(spectral_series(gaussian_table), s_max=16)
    np.testing.assert_allclose(f.column_sums(), c.values, atol=1e-10)


def test_orthonormality_integrals(gaussian, gaussian_table):
    f = f_weights(gaussian_table, radius=6)
    for l1, l2 in [(0, 0), (1, 0), (0, 1), (-1, 2)]:
        assert abs(onc_residual(gaussian, f, l1, l2)) < 1e-8


@pytest.mark.parametrize("k0", [-2, 1, 3])
def test_linear_phase_shifts_filter(gaussian_series, gaussian, gauss_H, k0):
    c = c_weights(gaussian_series, PhaseSpec("linear", k0=k0), s_max=None)
    H = filter_coefficients(gaussian, c)
    for n in range(-6, 7):
        assert abs(H[n - 2 * k0] - gauss_H[n]) < 1e-12


def test_linear_phase_haar_support(haar_series):
    c = c_weights(haar_series, PhaseSpec("linear", k0=3), s_max=None)
    H = filter_coefficients(BoxMomentum(2), c)
    assert (H.n_min, H.n_max) == (-6, -5)


def test_quadratic_phase_weights_decay_like_one_over_s(haar_series):
    c = c_weights(haar_series, PhaseSpec("quadratic", gamma=1.0), s_max=256)
    cls = classify_decay(c.as_sequence())
    assert cls.kind == POLY
    assert cls.exponent == pytest.approx(1.0, abs=0.2)
    assert np.sum(np.abs(c.values) ** 2) == pytest.approx(1.0, abs=5e-3)


@pytest.mark.parametrize("make_seed, radius", [(Gaussian, 8), (lambda: BoxMomentum(3), 4),
                                               (RaisedCosineMomentum, 2)])
def test_filters_orthonormal(make_seed, radius):
    seed = make_seed()
    c = c_weights(spectral_series(overlap_table(seed, radius)), s_max=None)
    H = filter_coefficients(seed, c)
    assert max(check_r1(H).values()) < 1e-8
