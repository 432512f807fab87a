import math

import numpy as np
import pytest

from openstirap import _kernels
from openstirap.hamiltonians import BasisKind, ModelKind, build_generator
from openstirap.lindblad import (
    MASTER_HEADER,
    ReservoirSpec,
    adiabatic_rate_rhs,
    master_rhs,
    propagate_master,
    rates_at,
    system_hamiltonian,
)
from openstirap.propagator import SimOptions, propagate
from openstirap.pulses import PulseConfig, Sequence, eigenbasis, frame_at

RNG = np.random.default_rng(77)


def random_density(n=4):
    a = RNG.normal(size=(n, n)) + 1j * RNG.normal(size=(n, n))
    rho = a @ a.conj().T
    return rho / np.trace(rho)


class _Phi:
    def __init__(self, phi):
        self.phi = phi


def test_reservoir_validation():
    with pytest.raises(ValueError):
        ReservoirSpec(gamma=-1.0)
    with pytest.raises(ValueError):
        ReservoirSpec(gamma=1.0, n_plus=-0.1)


@pytest.mark.parametrize("phi", [0.0, 0.2, math.pi / 4, 1.3])
def test_zero_temperature_rates(phi):
    # Population rates are twice the amplitude damping of the generators.
    gp, gm, gpe, gme = rates_at(_Phi(phi), ReservoirSpec(gamma=0.8))
    assert gp + gm == pytest.approx(2 * 0.8, rel=1e-15)
    assert gp == pytest.approx(2 * 0.8 * math.cos(phi) ** 2, rel=1e-15)
    assert gpe == 0.0 and gme == 0.0


def test_symmetric_point_rates():
    gp, gm, _, _ = rates_at(_Phi(math.pi / 4), ReservoirSpec(gamma=1.0))
    assert gp == pytest.approx(gm, rel=1e-15)
    assert gp == pytest.approx(1.0, rel=1e-15)


def test_excitation_rates():
    gp, gm, gpe, gme = rates_at(_Phi(0.4), ReservoirSpec(gamma=1.0, n_plus=1.0, n_minus=3.0))
    assert gpe == pytest.approx(gp / 2, rel=1e-15)
    assert gme == pytest.approx(gm * 3 / 4, rel=1e-15)
    g0p, g0m, _, _ = rates_at(_Phi(0.4), ReservoirSpec(gamma=1.0))
    assert gp == pytest.approx(2 * g0p) and gm == pytest.approx(4 * g0m)


def test_level_four_static_at_zero_temperature(ci10):
    rho = np.zeros((4, 4), dtype=complex)
    rho[3, 3] = 1.0
    res = ReservoirSpec(gamma=3.0, omega4=-2.0)
    for t in (-1.0, 0.0, 2.0):
        h = system_hamiltonian(ci10, t, res.omega4)
        np.testing.assert_allclose(master_rhs(rho, t, ci10, res), -1j * (h @ rho - rho @ h), atol=1e-15)
        np.testing.assert_allclose(master_rhs(rho, t, ci10, res), 0.0, atol=1e-15)


def test_dark_state_has_no_dissipation(int10):
    res = ReservoirSpec(gamma=5.0)
    for t in np.linspace(-3, 3, 7):
        dark = np.zeros(4)
        dark[:3] = eigenbasis(frame_at(int10, t))[:, 1]
        rho = np.outer(dark, dark).astype(complex)
        h = system_hamiltonian(int10, t)
        coherent = -1j * (h @ rho - rho @ h)
        np.testing.assert_allclose(master_rhs(rho, t, int10, res), coherent, atol=1e-13)


@pytest.mark.parametrize("n", [0.0, 0.5])
def test_master_rhs_traceless_and_hermitian(n, ci10):
    res = ReservoirSpec(gamma=2.0, n_plus=n, n_minus=2 * n, omega4=-1.0)
    for _ in range(20):
        rho = random_density()
        d = master_rhs(rho, RNG.uniform(-5, 5), ci10, res)
        assert abs(np.trace(d)) < 1e-12
        np.testing.assert_allclose(d, d.conj().T, atol=1e-12)


@pytest.mark.parametrize("n", [0.0, 0.7])
def test_master_rhs_matches_kernel(n, int10):
    res = ReservoirSpec(gamma=1.5, n_plus=n, n_minus=n / 2, omega4=-0.3)
    params = (0, _kernels.INTUITIVE, 10.0, 1.0, 1.5, n, n / 2, -0.3)
    for t in (-2.0, 0.1, 3.0):
        rho = random_density()
        k = np.asarray(_kernels.rhs(_kernels.MASTER_4, params, t, rho.ravel())).reshape(4, 4)
        np.testing.assert_allclose(k, master_rhs(rho, t, int10, res), atol=1e-13)


def test_zero_temperature_matches_effective_model(ci10):
    opts = SimOptions(sampling=1001)
    m = propagate_master(ci10, ReservoirSpec(gamma=0.5), opts)
    e = propagate(ci10, 0.5, ModelKind.EFFECTIVE, opts=opts)
    for mp, ep in ((m.p1, e.p1), (m.p2, e.p2), (m.p3, e.p3)):
        np.testing.assert_allclose(mp, ep, rtol=0, atol=1e-6)
    np.testing.assert_allclose(m.p4, 1.0 - e.norm, atol=1e-6)


@pytest.mark.parametrize("res", [ReservoirSpec(gamma=1.0), ReservoirSpec(gamma=1.0, n_plus=0.5, n_minus=0.2),
                                 ReservoirSpec(gamma=20.0, n_plus=2.0, n_minus=2.0, omega4=-3.0)])
def test_master_trajectory_invariants(res, int10):
    tr = propagate_master(int10, res, SimOptions(sampling=401))
    np.testing.assert_allclose(tr.trace, 1.0, atol=1e-9)
    assert tr.hermiticity_error().max() < 1e-10
    assert tr.min_eigenvalue().min() >= -1e-8


def test_strong_damping_drains_to_level_four(int10):
    tr = propagate_master(int10, ReservoirSpec(gamma=500.0), SimOptions(sampling=201))
    assert tr.p4[-1] > 0.95


def test_level_four_energy_irrelevant_at_zero_temperature(ci10):
    opts = SimOptions(sampling=201)
    a = propagate_master(ci10, ReservoirSpec(gamma=1.0), opts)
    b = propagate_master(ci10, ReservoirSpec(gamma=1.0, omega4=-7.5), opts)
    for pa, pb in ((a.p1, b.p1), (a.p2, b.p2), (a.p3, b.p3), (a.p4, b.p4)):
        np.testing.assert_allclose(pa, pb, atol=1e-9)


def test_thermal_occupation_refills_system(ci10):
    opts = SimOptions(sampling=201)
    cold = propagate_master(ci10, ReservoirSpec(gamma=1.0), opts)
    warm = propagate_master(ci10, ReservoirSpec(gamma=1.0, n_plus=0.5, n_minus=0.5), opts)
    assert warm.p4[-1] < cold.p4[-1]


def test_master_csv(tmp_path, ci10):
    tr = propagate_master(ci10, ReservoirSpec(gamma=0.3), SimOptions(sampling=5))
    lines = tr.to_csv(tmp_path / "m.csv").read_text().splitlines()
    assert lines[0] == ",".join(MASTER_HEADER)
    assert len(lines) == 6
    assert float(lines[-1].split(",")[-1]) == pytest.approx(1.0, abs=1e-9)


def test_rate_equations_pure_dark_state(ci10):
    r = np.zeros((3, 3), dtype=complex)
    r[1, 1] = 1.0
    d = adiabatic_rate_rhs(r, frame_at(ci10, 0.3), ReservoirSpec(gamma=2.0))
    assert d[1, 1] == 0.0


def test_rate_equations_pure_plus_state(ci10):
    r = np.zeros((3, 3), dtype=complex)
    r[0, 0] = 1.0
    fr = frame_at(ci10, -0.6)
    res = ReservoirSpec(gamma=2.0)
    gp = rates_at(fr, res)[0]
    d = adiabatic_rate_rhs(r, fr, res)
    assert d[0, 0] == pytest.approx(-gp, abs=1e-15)


@pytest.mark.parametrize("seq", list(Sequence))
def test_rate_equations_equal_pseudo_liouville(seq):
    for _ in range(50):
        cfg = PulseConfig(alpha_t=RNG.uniform(2, 30), delta_t=RNG.uniform(0, 3), sequence=seq)
        fr = frame_at(cfg, RNG.uniform(-8, 8))
        gamma = RNG.uniform(0, 50)
        r = random_density(3)
        h = build_generator(fr, gamma, ModelKind.EFFECTIVE, BasisKind.ADIABATIC).entries
        expected = -1j * (h @ r - r @ h.conj().T)
        np.testing.assert_allclose(adiabatic_rate_rhs(r, fr, ReservoirSpec(gamma=gamma)), expected,
                                   rtol=0, atol=1e-12)
