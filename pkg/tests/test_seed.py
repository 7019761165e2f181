import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate

from seedmra.seed import (A, BoxMomentum, BoxPosition, EvaluationError, Gaussian, LatticeConfig, LorentzianFT,
                          NormalizationError, RaisedCosineMomentum, Tabulated, eval_seed, eval_seed_ft,
                          lattice_samples, parse_seed)

PI_Q = math.pi**-0.25


def test_lattice_constant_fixed():
    assert LatticeConfig().a**2 == pytest.approx(2 * math.pi, abs=1e-14)
    with pytest.raises(ValueError):
        LatticeConfig(2.5)


def test_point_values():
    assert eval_seed(Gaussian(), 0.0).real == pytest.approx(0.7511255444649425, abs=1e-12)
    assert eval_seed_ft(Gaussian(), 0.0).real == pytest.approx(PI_Q, abs=1e-12)
    assert eval_seed(BoxPosition(1), -1.0) == 0
    assert eval_seed(BoxMomentum(1), 0.0).real == pytest.approx((2 * math.pi) ** -0.25, abs=1e-12)
    assert eval_seed_ft(BoxMomentum(2), 0.5 * A).real == pytest.approx(1 / math.sqrt(2 * A), abs=1e-12)
    assert eval_seed_ft(LorentzianFT(), 0.0).real == pytest.approx(2 / A, abs=1e-14)


def test_box_momentum_position_form_by_quadrature():
    # independent oracle: integrate the flat box directly
    x = 0.7
    w = 1.0
    re, _ = integrate.quad(lambda p: math.cos(p * x) / math.sqrt(w * A), 0, w * A)
    im, _ = integrate.quad(lambda p: math.sin(p * x) / math.sqrt(w * A), 0, w * A)
    assert eval_seed(BoxMomentum(w), x) == pytest.approx(complex(re, im) / math.sqrt(2 * math.pi), abs=1e-12)


def test_lattice_samples_half_open():
    s = lattice_samples(BoxMomentum(1), 2)
    np.testing.assert_allclose(s, [0, 0, 1 / math.sqrt(A), 0, 0], atol=0)
    s = lattice_samples(BoxMomentum(2), 1)
    np.testing.assert_allclose(s, [0, 1 / math.sqrt(2 * A), 1 / math.sqrt(2 * A)], atol=0)
    s = lattice_samples(Gaussian(), 1)
    np.testing.assert_allclose(s.real, [PI_Q * math.exp(-math.pi), PI_Q, PI_Q * math.exp(-math.pi)], rtol=1e-14)
    with pytest.raises(ValueError):
        lattice_samples(Gaussian(), -1)


@pytest.mark.parametrize("seed", [BoxMomentum(1), BoxMomentum(2.5), BoxPosition(1.5), Gaussian(), LorentzianFT(),
                                  RaisedCosineMomentum()])
def test_unit_norm_in_momentum_space(seed):
    cut = 400.0
    lo, hi = seed.momentum_support
    lo, hi = max(lo, -cut), min(hi, cut)
    knots = np.linspace(lo, hi, 801)
    total = sum(integrate.quad(lambda p: abs(complex(seed.ft(p))) ** 2, u, v, limit=200)[0]
                for u, v in zip(knots[:-1], knots[1:]))
    if isinstance(seed, BoxPosition):
        # |hat_h|^2 = 4 sin^2(pL/2) / (2 pi L p^2); sin^2 averages to 1/2 on both tails
        length = seed.d * A
        total += 2.0 / (math.pi * length * cut)
        tol = 1e-4
    else:
        tol = 1e-7
    assert total == pytest.approx(1.0, abs=tol)


def test_gaussian_round_trip():
    g = Gaussian()
    p = np.linspace(-4 * A, 4 * A, 17)
    numeric = g._quad_transform(p, forward=True)
    np.testing.assert_allclose(numeric, g.ft(p), atol=1e-8)


@given(st.floats(min_value=0.3, max_value=9.0))
@settings(max_examples=25)
def test_box_right_endpoint_is_zero(w):
    assert eval_seed_ft(BoxMomentum(w), w * A) == 0
    assert eval_seed(BoxPosition(w), w * A) == 0


@given(st.floats(min_value=0.3, max_value=9.0))
@settings(max_examples=25)
def test_box_families_normalized(w):
    assert BoxMomentum(w).norm == pytest.approx(1.0, abs=1e-10)
    assert BoxPosition(w).norm == pytest.approx(1.0, abs=1e-10)


def test_rescale_warning_and_hard_error(tmp_path):
    with pytest.warns(UserWarning, match="rescaling"):
        t = Tabulated(p_min=0.0, p_max=1.0, values=tuple([1.001] * 11))
    assert t.scale == pytest.approx(1 / 1.001)
    with pytest.raises(NormalizationError):
        Tabulated(p_min=0.0, p_max=1.0, values=tuple([2.0] * 11))


def test_tabulated_round_trip(tmp_path):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        t = Tabulated.from_function(lambda p: PI_Q * np.exp(-p * p / 2), -12, 12, 4001)
    assert t.norm == pytest.approx(1.0, abs=1e-5)
    path = tmp_path / "g.csv"
    t.save(path)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        t2 = Tabulated.load(path)
    assert t2.ft(0.3) == pytest.approx(t.ft(0.3), abs=1e-12)
    assert complex(t.h(0.5)).real == pytest.approx(float(Gaussian().h(0.5)), abs=1e-4)
    assert parse_seed(f"tabulated:{path}").label() == "Tabulated"


def test_tabulated_validation(tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("# domain 0 1 3\n0,1,0\n0.7,1,0\n1,1,0\n")
    with pytest.raises(ValueError, match="uniform"):
        Tabulated.load(bad)
    short = tmp_path / "short.csv"
    short.write_text("# domain 0 1 3\n0,1,0\n")
    with pytest.raises(ValueError, match="promises"):
        Tabulated.load(short)
    t = Tabulated(p_min=0.0, p_max=1.0, values=tuple([1.0] * 11))
    assert t.ft(1.0) == 0 and t.ft(-0.1) == 0


def test_coarse_tabulation_refuses_far_positions():
    t = Tabulated(p_min=0.0, p_max=1.0, values=tuple([1.0] * 3))
    with pytest.raises(EvaluationError) as err:
        t.h(100.0)
    assert err.value.error_bound > 0


def test_parse_seed_grammar():
    assert parse_seed("box-momentum:2k+1", k=3).width == 7
    assert parse_seed("box-momentum:2k", k=2).width == 4
    assert parse_seed("box-position:1.5").d == 1.5
    assert isinstance(parse_seed("lorentzian"), LorentzianFT)
    with pytest.raises(ValueError):
        parse_seed("box-momentum:2k+1")
    with pytest.raises(ValueError):
        parse_seed("nonsense")
