import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from smpe.analytic import oscillator_soliton
from smpe.params import ELECTRON_MASS, ModelParams
from smpe.spectrum import (
    L_max,
    SpectrumError,
    level_ratio,
    new_line,
    omega_creat,
    omega_crit,
    omega_crit_hz,
    subrelativistic_line,
    subrelativistic_line_from_oscillator,
)

SOL = ModelParams.natural(-1 / 8)
SI = ModelParams.si()


def test_critical_frequency_and_length():
    assert omega_crit(SOL) == pytest.approx(2.0, rel=1e-15)
    assert L_max(2.0, SOL) == pytest.approx(math.sqrt(1 / 8), rel=1e-15)


def test_L_max_gives_linear_ground_state():
    # the soliton of size L_max in its own oscillator has a = 0
    w = omega_crit(SOL)
    sol = oscillator_soliton(SOL, k=0.5 * w**2)
    # w^2/2 equals k_crit only up to rounding, and a is its square root
    assert sol.a == pytest.approx(0.0, abs=1e-7)
    assert sol.stationary_energy() == pytest.approx(0.5 * w, rel=1e-14)


def test_line_at_critical_frequency_merges():
    line = new_line(omega_crit(SOL), SOL)
    assert line.delta_E_new == 0.0
    assert line.ratio == 0.0
    assert level_ratio(1.0) == 0.0


def test_quarter_ratio():
    assert level_ratio(0.25) == 9 / 16


def test_line_example():
    line = new_line(math.sqrt(2.0), SOL)
    assert line.E_st == pytest.approx(0.75, rel=1e-14)
    assert line.delta_E_new == pytest.approx(0.75 - math.sqrt(2) / 2, rel=1e-13)
    assert line.E_st == pytest.approx(oscillator_soliton(SOL, k=1.0).stationary_energy(), rel=1e-14)


def test_line_rejects_supercritical():
    with pytest.raises(SpectrumError, match="no nonlinear nodeless state"):
        new_line(2.1, SOL)
    with pytest.raises(SpectrumError):
        new_line(1.0, ModelParams.natural(0.1))


def test_electron_critical_frequency():
    nu = omega_crit_hz(ELECTRON_MASS, 1.0, SI)
    assert 3.0e19 <= nu <= 3.2e19
    assert nu == pytest.approx(3.09e19, rel=2e-3)
    assert omega_crit_hz(2 * ELECTRON_MASS, 1.0, SI) == pytest.approx(2 * nu, rel=1e-15)
    assert omega_crit_hz(ELECTRON_MASS, 1 / 16, SI) == pytest.approx(4.94e20, rel=2e-3)


def test_hz_formula_matches_angular_frequency():
    p = SI.with_compton_quotient(0.3)
    assert omega_crit_hz(p.m, 0.3, p) == pytest.approx(omega_crit(p) / (2 * math.pi), rel=1e-13)


def test_subrelativistic_line():
    p = ModelParams.natural()
    E0, w_creat = subrelativistic_line(1e-9, p)
    assert E0 == pytest.approx(1.0, rel=1e-15)
    assert w_creat == pytest.approx(2 * math.sqrt(2))
    assert omega_creat(p) == w_creat
    E1, _ = subrelativistic_line(1.0, p)
    assert E1 == 1.0625
    with pytest.raises(SpectrumError, match="particle creation regime"):
        subrelativistic_line(3.0, p)


@pytest.mark.parametrize("omega", [0.1, 1.0, 2.5])
def test_subrelativistic_line_cross_check(omega):
    p = ModelParams.natural()
    E, _ = subrelativistic_line(omega, p)
    assert abs(E / subrelativistic_line_from_oscillator(omega, p) - 1) < 1e-14


def test_ratio_decreasing_and_unbounded():
    eta = np.logspace(-4, 0, 400)
    r = np.array([level_ratio(e) for e in eta])
    assert np.all(np.diff(r) < 0)
    assert r[0] > 2000


@given(st.floats(min_value=1e-3, max_value=1.0))
def test_line_consistency(eta):
    w = eta * omega_crit(SOL)
    line = new_line(w, SOL)
    assert line.delta_E_new >= 0
    assert line.E_st - 0.5 * w == pytest.approx(line.delta_E_new, rel=1e-12, abs=1e-15)
    assert line.ratio == pytest.approx(line.delta_E_new / w, rel=1e-10, abs=1e-15)
