import math

import numpy as np
import pytest

from smpe.analytic import CoherentState, FreeSoliton, ModifiedPacket, PlaneWave
from smpe.fields import (
    Grid1D,
    HydroState,
    NonNormalizableError,
    energy,
    gradient,
    laplacian,
    observables,
)
from smpe.params import ModelParams

SOL = ModelParams.natural(-1 / 8)


def test_grid_invariants():
    g = Grid1D(-1.0, 1.0, 21)
    assert g.dx == pytest.approx(0.1)
    assert g.x[0] == -1.0 and g.x[-1] == pytest.approx(1.0)
    with pytest.raises(ValueError):
        Grid1D(0.0, 1.0, 15)
    with pytest.raises(ValueError):
        Grid1D(1.0, 0.0, 32)
    assert Grid1D.centered(0.0, 1.0, 1 / 8).n == 17


def test_state_rejects_negative_density():
    with pytest.raises(ValueError):
        HydroState(0.0, np.array([1.0, -1.0]), np.zeros(2))
    with pytest.raises(ValueError):
        HydroState(0.0, np.ones(3), np.zeros(4))


def test_gradient_exact_cases():
    x = np.linspace(-1, 1, 21)
    assert np.allclose(gradient(3 * x, 0.1), 3.0, atol=1e-12)
    assert np.allclose(gradient(x**2, 0.1)[1:-1], 2 * x[1:-1], atol=1e-12)
    with pytest.raises(ValueError):
        gradient(np.ones(2), 0.1)


def test_laplacian_exact_cases():
    x = np.linspace(-1, 1, 21)
    assert np.allclose(laplacian(x**2, 0.1)[1:-1], 2.0, atol=1e-10)
    assert np.allclose(laplacian(np.full(21, 4.2), 0.1), 0.0, atol=1e-12)


def _max_err(op, f, df, n):
    x = np.linspace(0.0, 2.0, n)
    dx = x[1] - x[0]
    return np.max(np.abs(op(f(x), dx)[1:-1] - df(x)[1:-1]))


def test_gradient_richardson():
    e1 = _max_err(gradient, np.sin, np.cos, 101)
    e2 = _max_err(gradient, np.sin, np.cos, 201)
    assert e1 / e2 == pytest.approx(4.0, rel=0.2)


def test_laplacian_order():
    errs = [_max_err(laplacian, np.cos, lambda x: -np.cos(x), n) for n in (51, 101, 201)]
    dxs = [2.0 / 50, 2.0 / 100, 2.0 / 200]
    order = np.polyfit(np.log(dxs), np.log(errs), 1)[0]
    assert order == pytest.approx(2.0, abs=0.3)


def test_edge_stencils_second_order():
    x = np.linspace(0.0, 1.0, 41)
    assert gradient(x**2, x[1])[0] == pytest.approx(0.0, abs=1e-12)
    assert laplacian(x**3, x[1])[0] == pytest.approx(0.0, abs=1e-9)


def test_packet_mean_p2():
    pk = ModifiedPacket(ModelParams.natural(), 1.0)
    g = pk.default_grid(0.0, 1 / 256)
    obs = observables(pk.state(g, 0.0), g, pk.params)
    assert obs.mean_p2 == pytest.approx(0.5, rel=1e-6)
    assert obs.width**2 == pytest.approx(0.5, rel=1e-8)


def test_soliton_momentum_and_position():
    sol = FreeSoliton(SOL, 0.3)
    g = sol.default_grid(2.0, 1 / 128)
    obs = observables(sol.state(g, 2.0), g, SOL)
    assert obs.mean_p == pytest.approx(0.3, rel=1e-10)
    assert obs.mean_x == pytest.approx(0.6, rel=1e-10)
    assert obs.norm == pytest.approx(1.0, abs=1e-10)


def test_constant_phase_has_zero_momentum():
    g = Grid1D.centered(0.0, 6.0, 1 / 32)
    rho = np.exp(-g.x**2) / math.sqrt(math.pi)
    obs = observables(HydroState(0.0, rho, np.full(g.n, 0.7)), g, SOL)
    assert obs.mean_p == 0.0


def test_energy_examples():
    sol = FreeSoliton(SOL, 0.0)
    g = sol.default_grid(0.0, 1 / 512)
    assert energy(sol.state(g, 0.0), g, sol.potential, SOL) == pytest.approx(0.5, rel=1e-6)
    cs = CoherentState(ModelParams.natural(), 1.0, 0.0)
    g = cs.default_grid(0.0, 1 / 512)
    assert energy(cs.state(g, 0.0), g, cs.potential, cs.params) == pytest.approx(0.5, rel=1e-6)


@pytest.mark.parametrize("v", [0.1, 0.5, 1.0])
def test_energy_galilean_offset(v):
    E = []
    for vel in (0.0, v):
        sol = FreeSoliton(SOL, vel)
        g = sol.default_grid(0.0, 1 / 512)
        E.append(energy(sol.state(g, 0.0), g, sol.potential, SOL))
    assert E[1] - E[0] == pytest.approx(0.5 * v**2, abs=1e-8)


def test_tail_truncation_control():
    for fam in (FreeSoliton(SOL, 0.3), CoherentState(ModelParams.natural(), 1.0, 1.0),
                ModifiedPacket(ModelParams.natural(-1 / 16), 1.0)):
        vals = []
        for w in (8.0, 12.0):
            g = fam.default_grid(0.5, 1 / 128, widths=w)
            st_ = fam.state(g, 0.5)
            obs = observables(st_, g, fam.params)
            vals.append((obs.norm, obs.mean_p2, energy(st_, g, fam.potential, fam.params)))
        for a, b in zip(*vals):
            assert abs(a / b - 1) < 1e-8


def test_non_normalizable_rejected():
    pw = PlaneWave(ModelParams.natural(), 1.0, 2 * math.pi)
    g = pw.default_grid(0.0, 2 * math.pi / 64)
    st_ = pw.state(g, 0.0)
    with pytest.raises(NonNormalizableError):
        observables(st_, g, pw.params)
    with pytest.raises(NonNormalizableError):
        energy(st_, g, pw.potential, pw.params)
