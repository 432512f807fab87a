"""Non-Hermitian 3x3 generators for the effective and phenomenological models.

Adiabatic-basis ordering is (|+>, |0>, |->); bare ordering is (|1>, |2>, |3>).
The two models differ only by the Gamma sin(2 phi) / 2 coupling between
|+> and |->, which the phenomenological model carries and the effective
(master-equation derived) model does not.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .pulses import AdiabaticFrame

__all__ = [
    "ModelKind",
    "BasisKind",
    "GeneratorMatrix",
    "build_generator",
    "zeno_split",
    "zeno_eigenstates",
    "doublet_restriction",
]


class ModelKind(enum.Enum):
    EFFECTIVE = "effective"
    PHENOMENOLOGICAL = "phenomenological"

    @classmethod
    def parse(cls, value: "ModelKind | str") -> "ModelKind":
        if isinstance(value, cls):
            return value
        key = str(value).strip().lower()
        return cls({"eff": "effective", "phen": "phenomenological"}.get(key, key))


class BasisKind(enum.Enum):
    ADIABATIC = "adiabatic"
    BARE = "bare"

    @classmethod
    def parse(cls, value: "BasisKind | str") -> "BasisKind":
        if isinstance(value, cls):
            return value
        return cls(str(value).strip().lower())


@dataclass(frozen=True)
class GeneratorMatrix:
    """A 3x3 (or stacked ``(..., 3, 3)``) complex generator ``i da/dt = H a``."""

    entries: np.ndarray
    basis: BasisKind
    model: ModelKind
    t: float

    def hermitian_part(self) -> np.ndarray:
        h = self.entries
        return 0.5 * (h + np.conj(np.swapaxes(h, -1, -2)))

    def decay_part(self) -> np.ndarray:
        """Hermitian matrix ``(i/2)(H - H^dagger)``; PSD for a norm-contracting H."""
        h = self.entries
        return 0.5j * (h - np.conj(np.swapaxes(h, -1, -2)))


def _off_diagonal_13(shape) -> np.ndarray:
    m = np.zeros(shape + (3, 3), dtype=complex)
    m[..., 0, 2] = 1.0
    m[..., 2, 0] = 1.0
    return m


def _adiabatic(frame: AdiabaticFrame, gamma: float, model: ModelKind) -> np.ndarray:
    sp, cp = np.sin(frame.phi), np.cos(frame.phi)
    td, pd = np.asarray(frame.theta_dot), np.asarray(frame.phi_dot)
    shape = np.shape(sp)
    h = np.zeros(shape + (3, 3), dtype=complex)
    # omega_plus and omega_minus stand in for Omega0 cot(phi) and -Omega0 tan(phi).
    h[..., 0, 0] = frame.omega_plus - 1j * gamma * cp**2
    h[..., 0, 1] = 1j * td * sp
    h[..., 0, 2] = 1j * pd
    h[..., 1, 0] = -1j * td * sp
    h[..., 1, 2] = -1j * td * cp
    h[..., 2, 0] = -1j * pd
    h[..., 2, 1] = 1j * td * cp
    h[..., 2, 2] = frame.omega_minus - 1j * gamma * sp**2
    if model is ModelKind.PHENOMENOLOGICAL:
        h = h + 0.5j * gamma * np.asarray(np.sin(2 * frame.phi))[..., None, None] * _off_diagonal_13(shape)
    return h


def _bare(frame: AdiabaticFrame, gamma: float, model: ModelKind) -> np.ndarray:
    shape = np.shape(frame.omega_p)
    h = np.zeros(shape + (3, 3), dtype=complex)
    h[..., 0, 1] = h[..., 1, 0] = frame.omega_p
    h[..., 1, 2] = h[..., 2, 1] = frame.omega_s
    h[..., 1, 1] = frame.delta - 1j * gamma
    if model is ModelKind.PHENOMENOLOGICAL:
        return h
    st, ct = np.sin(frame.theta), np.cos(frame.theta)
    phi = np.asarray(frame.phi)
    s2p, c2p = np.sin(2 * phi), np.cos(2 * phi)
    sc = np.sin(phi) * np.cos(phi)
    m = np.empty(shape + (3, 3), dtype=float)
    m[..., 0, 0] = 2 * sc * st**2
    m[..., 0, 1] = m[..., 1, 0] = c2p * st
    m[..., 0, 2] = m[..., 2, 0] = 2 * sc * st * ct
    m[..., 1, 1] = -s2p
    m[..., 1, 2] = m[..., 2, 1] = c2p * ct
    m[..., 2, 2] = 2 * sc * ct**2
    return h - 0.5j * gamma * np.asarray(s2p)[..., None, None] * m


def build_generator(frame: AdiabaticFrame, gamma: float,
                    model: ModelKind | str, basis: BasisKind | str) -> GeneratorMatrix:
    """Assemble H_eff or H_phen at ``frame`` in the requested basis."""
    if gamma < 0:
        raise ValueError(f"gamma must be >= 0, got {gamma}")
    model = ModelKind.parse(model)
    basis = BasisKind.parse(basis)
    build = _adiabatic if basis is BasisKind.ADIABATIC else _bare
    return GeneratorMatrix(entries=build(frame, gamma, model), basis=basis, model=model, t=frame.t)


def zeno_split(frame: AdiabaticFrame, gamma: float, model: ModelKind | str,
               basis: BasisKind | str = BasisKind.ADIABATIC):
    """Split the adiabatic generator into Gamma-proportional and remaining parts.

    Returns ``(unperturbed, perturbation)``; only defined in the adiabatic basis.
    """
    model = ModelKind.parse(model)
    if BasisKind.parse(basis) is not BasisKind.ADIABATIC:
        raise ValueError("the strong-damping split is defined in the adiabatic basis only")
    full = build_generator(frame, gamma, model, BasisKind.ADIABATIC)
    rest = build_generator(frame, 0.0, model, BasisKind.ADIABATIC)
    unperturbed = full.entries - rest.entries
    return (
        GeneratorMatrix(unperturbed, BasisKind.ADIABATIC, model, frame.t),
        GeneratorMatrix(rest.entries, BasisKind.ADIABATIC, model, frame.t),
    )


def zeno_eigenstates(frame: AdiabaticFrame, gamma: float, model: ModelKind | str):
    """Closed-form eigenvalues and eigenvectors of the unperturbed part.

    Eigenvectors are columns in adiabatic coordinates.  Effective: |+>, |0>,
    |-> with -i Gamma cos^2 phi, 0, -i Gamma sin^2 phi.  Phenomenological:
    |0_1> = |0>, |0_2> = sin phi |+> + cos phi |->, and
    cos phi |+> - sin phi |-> with 0, 0, -i Gamma.
    """
    model = ModelKind.parse(model)
    sp, cp = float(np.sin(frame.phi)), float(np.cos(frame.phi))
    if model is ModelKind.EFFECTIVE:
        values = np.array([-1j * gamma * cp**2, 0.0, -1j * gamma * sp**2])
        return values, np.eye(3, dtype=complex)
    values = np.array([0.0, 0.0, -1j * gamma])
    vectors = np.array([
        [0.0, sp, cp],
        [1.0, 0.0, 0.0],
        [0.0, cp, -sp],
    ], dtype=complex)
    return values, vectors


def doublet_restriction(frame: AdiabaticFrame) -> np.ndarray:
    """Perturbation restricted to the degenerate {|0_1>, |0_2>} doublet."""
    td = frame.theta_dot
    return np.array([[0.0, -1j * td], [1j * td, 0.0]], dtype=complex)
