import math

import numpy as np
import pytest

from openstirap.hamiltonians import (
    BasisKind,
    ModelKind,
    build_generator,
    doublet_restriction,
    zeno_eigenstates,
    zeno_split,
)
from openstirap.pulses import PulseConfig, Sequence, eigenbasis, eigenbasis_derivative, frame_at

MODELS = list(ModelKind)
RNG = np.random.default_rng(20240611)


def dagger(m):
    return np.conj(np.swapaxes(m, -1, -2))


def random_frames(n=100):
    for _ in range(n):
        seq = Sequence.INTUITIVE if RNG.random() < 0.5 else Sequence.COUNTERINTUITIVE
        cfg = PulseConfig(alpha_t=RNG.uniform(2, 30), delta_t=RNG.uniform(0, 5), sequence=seq)
        yield frame_at(cfg, RNG.uniform(-8, 8))


def test_models_coincide_without_damping(ci10):
    fr = frame_at(ci10, np.linspace(-10, 10, 201))
    for basis in BasisKind:
        eff = build_generator(fr, 0.0, ModelKind.EFFECTIVE, basis).entries
        phen = build_generator(fr, 0.0, ModelKind.PHENOMENOLOGICAL, basis).entries
        np.testing.assert_array_equal(eff, phen)
        np.testing.assert_allclose(eff, dagger(eff), atol=1e-14)


def test_adiabatic_corner_entries(int10):
    gamma = 0.7
    for t in (-2.0, 0.0, 1.5):
        fr = frame_at(int10, t)
        eff = build_generator(fr, gamma, "effective", "adiabatic").entries
        phen = build_generator(fr, gamma, "phenomenological", "adiabatic").entries
        assert eff[0, 2] == pytest.approx(1j * fr.phi_dot, abs=1e-15)
        assert phen[0, 2] == pytest.approx(1j * fr.phi_dot + 0.5j * gamma * math.sin(2 * fr.phi), abs=1e-15)


def test_difference_is_exactly_the_corner_coupling(ci10):
    gamma = 1.3
    fr = frame_at(ci10, np.linspace(-6, 6, 97))
    diff = (build_generator(fr, gamma, "phen", "adiabatic").entries
            - build_generator(fr, gamma, "eff", "adiabatic").entries)
    expected = np.zeros_like(diff)
    expected[:, 0, 2] = expected[:, 2, 0] = 0.5j * gamma * np.sin(2 * fr.phi)
    # identical up to the rounding of one addition
    np.testing.assert_allclose(diff, expected, rtol=0, atol=4 * np.finfo(float).eps * 10)


def test_bare_phenomenological_layout(ci10):
    fr = frame_at(ci10, 0.4)
    h = build_generator(fr, 0.9, ModelKind.PHENOMENOLOGICAL, BasisKind.BARE).entries
    expected = np.array([
        [0, fr.omega_p, 0],
        [fr.omega_p, 1.0 - 0.9j, fr.omega_s],
        [0, fr.omega_s, 0],
    ], dtype=complex)
    np.testing.assert_array_equal(h, expected)


@pytest.mark.parametrize("model", MODELS)
def test_frame_equivalence(model):
    # U^dagger H_bare U - i U^dagger dU/dt must reproduce the adiabatic generator.
    for fr in random_frames():
        gamma = RNG.uniform(0, 20)
        u, du = eigenbasis(fr), eigenbasis_derivative(fr)
        bare = build_generator(fr, gamma, model, BasisKind.BARE).entries
        adia = build_generator(fr, gamma, model, BasisKind.ADIABATIC).entries
        np.testing.assert_allclose(u.T @ bare @ u - 1j * u.T @ du, adia, atol=1e-8)
        # and back again
        np.testing.assert_allclose(u @ adia @ u.T + 1j * du @ u.T, bare, atol=1e-8)


def test_decay_part_spectra(int10):
    gamma = 2.0
    for t in np.linspace(-5, 5, 11):
        fr = frame_at(int10, t)
        g_eff = build_generator(fr, gamma, "effective", "adiabatic").decay_part()
        g_phen = build_generator(fr, gamma, "phenomenological", "adiabatic").decay_part()
        exp_eff = sorted([gamma * math.cos(fr.phi) ** 2, 0.0, gamma * math.sin(fr.phi) ** 2])
        np.testing.assert_allclose(np.linalg.eigvalsh(g_eff), exp_eff, atol=1e-13)
        np.testing.assert_allclose(np.linalg.eigvalsh(g_phen), [0.0, 0.0, gamma], atol=1e-13)


@pytest.mark.parametrize("model", MODELS)
@pytest.mark.parametrize("basis", list(BasisKind))
def test_decay_part_is_psd(model, basis):
    for fr in random_frames(50):
        gamma = RNG.uniform(0, 500)
        g = build_generator(fr, gamma, model, basis).decay_part()
        np.testing.assert_allclose(g, dagger(g), atol=1e-12 * max(gamma, 1))
        assert np.linalg.eigvalsh(g).min() >= -1e-12 * max(gamma, 1)


def test_hermitian_plus_decay_reconstructs(ci10):
    gm = build_generator(frame_at(ci10, 0.3), 4.0, "effective", "bare")
    np.testing.assert_allclose(gm.hermitian_part() - 1j * gm.decay_part(), gm.entries, atol=1e-14)


def test_negative_gamma_rejected(ci10):
    with pytest.raises(ValueError):
        build_generator(frame_at(ci10, 0.0), -1.0, "effective", "adiabatic")


def test_zeno_split_effective(ci10):
    gamma = 500.0
    fr = frame_at(ci10, 0.7)
    unpert, pert = zeno_split(fr, gamma, ModelKind.EFFECTIVE)
    cp2, sp2 = math.cos(fr.phi) ** 2, math.sin(fr.phi) ** 2
    np.testing.assert_allclose(unpert.entries, np.diag([-1j * gamma * cp2, 0, -1j * gamma * sp2]),
                               atol=1e-14 * gamma)
    full = build_generator(fr, gamma, ModelKind.EFFECTIVE, BasisKind.ADIABATIC).entries
    assert np.max(np.abs(unpert.entries + pert.entries - full)) < 1e-14 * gamma


@pytest.mark.parametrize("model", MODELS)
def test_zeno_split_sum_and_gamma_free_perturbation(model, int10):
    for t in np.linspace(-4, 4, 9):
        fr = frame_at(int10, t)
        u1, p1 = zeno_split(fr, 10.0, model)
        u2, p2 = zeno_split(fr, 1000.0, model)
        np.testing.assert_array_equal(p1.entries, p2.entries)
        np.testing.assert_allclose(u2.entries, 100.0 * u1.entries, rtol=1e-13, atol=1e-12)
        full = build_generator(fr, 1000.0, model, BasisKind.ADIABATIC).entries
        assert np.max(np.abs(u2.entries + p2.entries - full)) < 1e-14 * 1000.0


def test_zeno_split_rejects_bare(ci10):
    with pytest.raises(ValueError):
        zeno_split(frame_at(ci10, 0.0), 1.0, ModelKind.EFFECTIVE, basis=BasisKind.BARE)


@pytest.mark.parametrize("model", MODELS)
def test_zeno_eigenstates_are_eigenvectors(model, ci10):
    gamma = 50.0
    for t in (-3.0, 0.0, 2.0):
        fr = frame_at(ci10, t)
        unpert, _ = zeno_split(fr, gamma, model)
        values, vectors = zeno_eigenstates(fr, gamma, model)
        np.testing.assert_allclose(unpert.entries @ vectors, vectors * values, atol=1e-12 * gamma)
        np.testing.assert_allclose(dagger(vectors) @ vectors, np.eye(3), atol=1e-14)
    if model is ModelKind.PHENOMENOLOGICAL:
        np.testing.assert_allclose(values, [0, 0, -1j * gamma])


def test_doublet_restriction_matches_projection(ci10):
    for t in np.linspace(-5, 5, 21):
        fr = frame_at(ci10, t)
        _, pert = zeno_split(fr, 500.0, ModelKind.PHENOMENOLOGICAL)
        _, vectors = zeno_eigenstates(fr, 500.0, ModelKind.PHENOMENOLOGICAL)
        doublet = vectors[:, :2]
        projected = dagger(doublet) @ pert.entries @ doublet
        np.testing.assert_allclose(projected, doublet_restriction(fr), atol=1e-12)
        d = doublet_restriction(fr)
        np.testing.assert_allclose(np.linalg.eigvalsh(d), [-abs(fr.theta_dot), abs(fr.theta_dot)],
                                   atol=1e-15)


def test_doublet_rotation_angle_is_quarter_turn(ci10):
    t = np.linspace(-10, 10, 20001)
    area = np.trapezoid(frame_at(ci10, t).theta_dot, t)
    assert area == pytest.approx(math.pi / 2, abs=1e-3)
    assert area < math.pi / 2
