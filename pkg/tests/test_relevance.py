import json
import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from seedmra import (BoxMomentum, FilterSequence, Gaussian, PhaseSpec, Tabulated, c_weights, expansion_weights,
                     filter_coefficients, overlap_table, spectral_series)
from seedmra.relevance import (InsufficientTail, Tolerances, check_r1, check_r2, check_r3, check_r4,
                               corollary_check, criterion_r3, factorization_check, filter_symbol, lattice_sum,
                               relevance_report)
from seedmra.seed import A

SQRT2 = math.sqrt(2.0)
HAAR = FilterSequence(0, np.array([1.0, 1.0]) / SQRT2)
UNIT = FilterSequence(0, np.array([1.0]))


def pipeline_filter(seed, radius, phase=None, s_max=None):
    table = overlap_table(seed, radius)
    series = spectral_series(table)
    c = c_weights(series, phase, s_max=s_max)
    return table, series, c, filter_coefficients(seed, c)


@pytest.fixture(scope="module")
def gauss_run(gaussian, gaussian_table, gaussian_series):
    c = c_weights(gaussian_series, s_max=None)
    return c, filter_coefficients(gaussian, c)


# -- (r1) -----------------------------------------------------------------

def test_r1_haar_exact():
    # off-diagonal sums vanish identically; the diagonal is 2 * fl(1/sqrt 2)^2, one ulp from 1
    res = check_r1(HAAR)
    assert all(res[l] == 0.0 for l in res if l != 0)
    assert res[0] <= 2.3e-16


def test_r1_gaussian_crude_and_refined(gaussian, gaussian_series, gauss_run):
    crude = filter_coefficients(gaussian, expansion_weights(gaussian_series, 0))
    res = check_r1(crude)
    assert res[1] == pytest.approx(0.00186744273170799, abs=1e-10)
    assert res[-1] == pytest.approx(res[1], abs=1e-15)
    refined = check_r1(gauss_run[1])
    assert max(refined.values()) < 1e-10


# -- (r2) -----------------------------------------------------------------

def test_r2_classes(gauss_run):
    assert check_r2(HAAR)[0] is True
    verdict, cls = check_r2(gauss_run[1])
    assert verdict is True and cls.kind == "Superpolynomial"
    n = np.arange(-300, 301)
    slow = FilterSequence(-300, 1.0 / (1.0 + np.abs(n)), "threshold")
    verdict, cls = check_r2(slow)
    assert verdict is False and cls.exponent == pytest.approx(1.0, abs=0.1)


def test_r2_undetermined_at_cap():
    rng = np.random.default_rng(3)
    capped = FilterSequence(-100, rng.uniform(0.5, 1.0, 201), "cap")
    assert check_r2(capped)[0] is None
    with pytest.raises(InsufficientTail):
        check_r2(capped, strict_tail=True)


# -- (r3) and the lattice criterion -----------------------------------------

def test_r3_examples(gauss_run):
    total, res, ok = check_r3(HAAR)
    assert ok and abs(total - SQRT2) < 1e-15
    total, res, ok = check_r3(gauss_run[1])
    assert not ok and total.real == pytest.approx(1.08239220028519, abs=1e-10)
    total, res, ok = check_r3(UNIT)
    assert not ok and res == pytest.approx(SQRT2 - 1, abs=1e-15)


def test_criterion_haar():
    seed = BoxMomentum(2)
    table = overlap_table(seed, 2)
    crit = criterion_r3(seed, spectral_series(table), table)
    assert crit.lhs == pytest.approx(math.sqrt(2 / A), abs=1e-14)
    assert crit.verdict and crit.residual < 1e-12


def test_criterion_gaussian(gaussian, gaussian_table, gaussian_series):
    crit = criterion_r3(gaussian, gaussian_series, gaussian_table)
    assert crit.lhs.real == pytest.approx(0.816048939, abs=1e-8)
    assert crit.rhs == pytest.approx(1.066219321, abs=1e-8)
    assert crit.s0 == pytest.approx(1.42479714118212130, abs=1e-12)
    assert not crit.verdict


def test_lattice_sum_alternating():
    assert lattice_sum(BoxMomentum(2), alternating=True) == pytest.approx(0, abs=1e-15)
    assert lattice_sum(BoxMomentum(1), alternating=True) == pytest.approx(1 / math.sqrt(A), abs=1e-15)


# -- corollary ----------------------------------------------------------------

@pytest.mark.parametrize("width, expected_alt", [(2, 0.0), (1, 1 / math.sqrt(A)), (3, 1 / math.sqrt(3 * A))])
def test_corollary_boxes(width, expected_alt):
    cor = corollary_check(BoxMomentum(width))
    assert cor.compact
    assert abs(cor.alternating_sum) == pytest.approx(expected_alt, abs=1e-14)
    assert cor.necessary_ok == (expected_alt == 0.0)
    assert cor.identity_residual < 1e-10


def test_corollary_identity_noncompact_gaussian():
    cor = corollary_check(Gaussian())
    assert not cor.compact
    assert cor.identity_residual < 1e-10


@given(st.lists(st.floats(min_value=-2.0, max_value=2.0, allow_nan=False), min_size=3, max_size=40),
       st.floats(min_value=-3 * A, max_value=3 * A), st.floats(min_value=0.5, max_value=6.0))
@settings(max_examples=60)
def test_corollary_identity_on_random_compact_seeds(raw, start, width):
    vals = np.asarray(raw)
    if not np.any(vals != 0):
        vals[0] = 1.0
    # normalize the piecewise-linear interpolant exactly before construction
    p_min, p_max = start, start + width * A
    dp = (p_max - p_min) / (len(vals) - 1)
    norm2 = np.sum((vals[:-1] ** 2 + vals[1:] ** 2 + vals[:-1] * vals[1:]) / 3.0) * dp
    if norm2 < 1e-12:
        return
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        seed = Tabulated(p_min=p_min, p_max=p_max, values=tuple(vals / math.sqrt(norm2)))
    cor = corollary_check(seed)
    assert cor.identity_residual < 1e-10


# -- (r4) -----------------------------------------------------------------

def test_r4_closed_forms():
    m, w, ok = check_r4(HAAR)
    assert ok and m == pytest.approx(math.cos(math.pi / 4), abs=1e-12)
    assert abs(w) == pytest.approx(math.pi / 2)
    m, _, ok = check_r4(UNIT)
    assert ok and m == pytest.approx(1 / SQRT2, abs=1e-15)


def test_r4_gaussian(gauss_run):
    m, _, ok = check_r4(gauss_run[1])
    assert ok and m > 0.5
    # the half-band minimum of a quadrature-mirror filter is 1/sqrt(2)
    assert m == pytest.approx(1 / SQRT2, abs=1e-9)


def test_fft_grid_matches_direct_evaluation():
    rng = np.random.default_rng(7)
    H = FilterSequence(-37, rng.normal(size=150) + 1j * rng.normal(size=150), "threshold")
    fast = check_r4(H, grid_size=513)
    w = np.linspace(-np.pi / 2, np.pi / 2, 513)
    direct = np.min(np.abs(filter_symbol(H, w)))
    assert fast[0] == pytest.approx(direct, abs=1e-10)


@given(st.integers(-6, 6))
@settings(max_examples=13)
def test_r4_invariant_under_even_shift(k):
    rng = np.random.default_rng(11)
    vals = rng.normal(size=9)
    H = FilterSequence(0, vals, "threshold")
    shifted = FilterSequence(2 * k, vals, "threshold")
    assert check_r4(shifted)[0] == pytest.approx(check_r4(H)[0], abs=1e-12)
    assert check_r4(shifted)[2] == check_r4(H)[2]


# -- factorization ----------------------------------------------------------

def test_factorization_example1():
    seed = BoxMomentum(1)
    _, series, c, H = pipeline_filter(seed, 2, s_max=4)
    fr = factorization_check(H, c, seed, series)
    assert fr.product_residual < 1e-12 and fr.symbol_imag < 1e-12 and fr.branch_residual < 1e-12


def test_factorization_haar():
    seed = BoxMomentum(2)
    _, series, c, H = pipeline_filter(seed, 2, s_max=4)
    assert factorization_check(H, c, seed, series).product_residual < 1e-12


def test_factorization_three_cell_box():
    seed = BoxMomentum(3)
    _, series, c, H = pipeline_filter(seed, 4)
    fr = factorization_check(H, c, seed, series)
    assert fr.product_residual < 1e-8
    assert fr.symbol_imag < 1e-10
    assert fr.branch_residual < 1e-8
    assert fr.symbol_min > 0
    theta = np.linspace(0, 2 * np.pi, 101)
    np.testing.assert_allclose(c.symbol(theta).real, 1 / np.sqrt(1 + (2 / 3) * np.cos(theta)), atol=1e-8)


def test_factorization_gaussian(gaussian, gaussian_series, gauss_run):
    c, H = gauss_run
    fr = factorization_check(H, c, gaussian, gaussian_series)
    assert fr.product_residual < 1e-10 and fr.branch_residual < 1e-10


# -- report -------------------------------------------------------------------

def test_report_serializes_and_agrees(gaussian, gaussian_table, gaussian_series, gauss_run):
    rep = relevance_report(gauss_run[1], seed=gaussian, table=gaussian_table, series=gaussian_series)
    v = rep.verdicts
    assert v["r1"] and v["r2"] and not v["r3"] and v["r4"]
    assert rep.criterion.verdict == v["r3"]
    d = json.loads(json.dumps(rep.to_dict()))
    assert set(d["r1_residuals"]) == {str(k) for k in range(-5, 6)}
    assert rep.notes == []


def test_tolerances_are_honoured():
    loose = Tolerances(r3=0.5)
    assert relevance_report(UNIT, loose).verdicts["r3"]
    assert not relevance_report(UNIT).verdicts["r3"]


def test_linear_phase_keeps_verdicts():
    seed = BoxMomentum(2)
    _, _, _, H0 = pipeline_filter(seed, 2, s_max=4)
    _, _, _, H3 = pipeline_filter(seed, 2, PhaseSpec("linear", k0=3))
    assert relevance_report(H0).verdicts == relevance_report(H3).verdicts
