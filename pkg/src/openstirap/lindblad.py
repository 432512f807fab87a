"""Four-level master equation with jumps between instantaneous eigenstates.

The density matrix is kept in the fixed bare basis (|1>, |2>, |3>, |4>), so
the coherent part is the plain commutator with the rotating-frame
Hamiltonian.  Dissipation moves population from the bright eigenstates
|+>, |-> to the auxiliary level |4> (and back, at finite temperature).

Rate convention: ``ReservoirSpec.gamma`` is the same Gamma that appears in
the non-Hermitian generators, where it damps *amplitudes*.  The matching
population decay rates are ``2 Gamma cos^2 phi`` and ``2 Gamma sin^2 phi``;
with that choice the zero-temperature master equation reproduces the
effective model exactly on the |1>, |2>, |3> block.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from ._io import write_csv
from .propagator import SimOptions, _codes, run_kernel
from .hamiltonians import ModelKind
from .pulses import AdiabaticFrame, PulseConfig, eigenbasis, eval_pulses, frame_at

__all__ = [
    "ReservoirSpec",
    "MasterTrajectory",
    "rates_at",
    "system_hamiltonian",
    "master_rhs",
    "propagate_master",
    "adiabatic_rate_rhs",
    "MASTER_HEADER",
]

MASTER_HEADER = ("t_over_T", "p1", "p2", "p3", "p4", "trace")


@dataclass(frozen=True)
class ReservoirSpec:
    """Flat-spectrum reservoir: decay constant, thermal occupations, level-4 energy."""

    gamma: float = 0.0
    n_plus: float = 0.0
    n_minus: float = 0.0
    omega4: float = 0.0

    def __post_init__(self):
        if self.gamma < 0:
            raise ValueError(f"gamma must be >= 0, got {self.gamma}")
        if self.n_plus < 0 or self.n_minus < 0:
            raise ValueError("thermal occupations must be >= 0")


def rates_at(frame: AdiabaticFrame, res: ReservoirSpec):
    """Return ``(gamma_plus, gamma_minus, gamma_plus_exc, gamma_minus_exc)``.

    Decay rates toward |4> scale as cos^2 phi (|+>) and sin^2 phi (|->) times
    ``N + 1``; excitation rates are ``gamma N / (N + 1)``.
    """
    cp2 = np.cos(frame.phi) ** 2
    sp2 = np.sin(frame.phi) ** 2
    g_plus = 2.0 * res.gamma * cp2 * (res.n_plus + 1.0)
    g_minus = 2.0 * res.gamma * sp2 * (res.n_minus + 1.0)
    g_plus_exc = g_plus * res.n_plus / (res.n_plus + 1.0)
    g_minus_exc = g_minus * res.n_minus / (res.n_minus + 1.0)
    return g_plus, g_minus, g_plus_exc, g_minus_exc


def system_hamiltonian(cfg: PulseConfig, t: float, omega4: float = 0.0) -> np.ndarray:
    """Rotating-frame 4x4 Hamiltonian."""
    op, os_ = eval_pulses(cfg, t)
    h = np.zeros((4, 4))
    h[0, 1] = h[1, 0] = op
    h[1, 2] = h[2, 1] = os_
    h[1, 1] = cfg.delta
    h[3, 3] = omega4
    return h


def _dissipator(rho, jump, rate):
    if rate == 0.0:
        return 0.0
    jd = jump.conj().T
    jj = jd @ jump
    return rate * (jump @ rho @ jd - 0.5 * (jj @ rho + rho @ jj))


def master_rhs(rho, t: float, cfg: PulseConfig, res: ReservoirSpec) -> np.ndarray:
    """Time derivative of the 4x4 density matrix at time ``t``."""
    rho = np.asarray(rho, dtype=complex)
    frame = frame_at(cfg, t)
    h = system_hamiltonian(cfg, t, res.omega4)
    u = eigenbasis(frame)
    plus = np.zeros(4)
    minus = np.zeros(4)
    plus[:3] = u[:, 0]
    minus[:3] = u[:, 2]
    four = np.array([0.0, 0.0, 0.0, 1.0])
    g_plus, g_minus, g_plus_exc, g_minus_exc = rates_at(frame, res)

    drho = -1j * (h @ rho - rho @ h)
    drho = drho + _dissipator(rho, np.outer(four, plus), g_plus)
    drho = drho + _dissipator(rho, np.outer(four, minus), g_minus)
    drho = drho + _dissipator(rho, np.outer(plus, four), g_plus_exc)
    drho = drho + _dissipator(rho, np.outer(minus, four), g_minus_exc)
    return drho


@dataclass
class MasterTrajectory:
    times: np.ndarray
    rho: np.ndarray = field(repr=False)
    t_scale: float = 1.0
    n_accepted: int = 0
    n_rejected: int = 0

    def population(self, level: int) -> np.ndarray:
        return self.rho[:, level - 1, level - 1].real

    @property
    def t_over_t(self):
        return self.times / self.t_scale

    @property
    def p1(self):
        return self.population(1)

    @property
    def p2(self):
        return self.population(2)

    @property
    def p3(self):
        return self.population(3)

    @property
    def p4(self):
        return self.population(4)

    @property
    def trace(self) -> np.ndarray:
        return np.trace(self.rho, axis1=1, axis2=2).real

    def hermiticity_error(self) -> np.ndarray:
        return np.max(np.abs(self.rho - np.conj(np.swapaxes(self.rho, 1, 2))), axis=(1, 2))

    def min_eigenvalue(self) -> np.ndarray:
        herm = 0.5 * (self.rho + np.conj(np.swapaxes(self.rho, 1, 2)))
        return np.linalg.eigvalsh(herm)[:, 0]

    def to_csv(self, path):
        rows = zip(self.t_over_t, self.p1, self.p2, self.p3, self.p4, self.trace)
        return write_csv(path, MASTER_HEADER, rows)


def propagate_master(cfg: PulseConfig, res: ReservoirSpec, opts: SimOptions | None = None,
                     backend: str | None = None) -> MasterTrajectory:
    """Integrate the master equation from ``|1><1|`` across the window.

    Raises :class:`~openstirap.propagator.StepSizeUnderflow` on controller failure.
    """
    opts = opts or SimOptions()
    t = cfg.t_scale
    gamma_t = res.gamma * t
    _, seq = _codes(cfg, ModelKind.EFFECTIVE)
    params = (0, seq, cfg.alpha_t, cfg.delta_t, gamma_t, res.n_plus, res.n_minus, res.omega4 * t)
    rho0 = np.zeros((4, 4), dtype=complex)
    rho0[0, 0] = 1.0
    # Population decay runs at up to 2 Gamma; size the controller for that.
    tau, out, n_acc, n_rej = run_kernel(_kernels.MASTER_4, params, rho0.ravel(), cfg,
                                        2.0 * gamma_t, opts, backend)
    return MasterTrajectory(times=tau * t, rho=out.reshape(-1, 4, 4), t_scale=t,
                            n_accepted=n_acc, n_rejected=n_rej)


def adiabatic_rate_rhs(coeffs, frame: AdiabaticFrame, res: ReservoirSpec) -> np.ndarray:
    """Zero-temperature rate equations for the adiabatic-basis coefficients.

    ``coeffs`` is the 3x3 matrix of rho_ij with ordering (+, 0, -).  The
    nine equations are written out term by term; they coincide with the
    pseudo-Liouville form generated by H_eff.
    """
    r = np.asarray(coeffs, dtype=complex)
    g_plus, g_minus, _, _ = rates_at(frame, ReservoirSpec(gamma=res.gamma))
    a = frame.theta_dot * np.sin(frame.phi)
    b = frame.theta_dot * np.cos(frame.phi)
    f = frame.phi_dot
    wp, wm = frame.omega_plus, frame.omega_minus
    P, Z, M = 0, 1, 2
    d = np.empty((3, 3), dtype=complex)

    d[Z, Z] = -a * (r[P, Z] + r[Z, P]) - b * (r[M, Z] + r[Z, M])
    d[P, P] = -g_plus * r[P, P] + a * (r[Z, P] + r[P, Z]) + f * (r[M, P] + r[P, M])
    d[M, M] = -g_minus * r[M, M] - f * (r[P, M] + r[M, P]) + b * (r[Z, M] + r[M, Z])

    d[P, Z] = ((-1j * wp - 0.5 * g_plus) * r[P, Z] + a * r[Z, Z] + f * r[M, Z]
               - a * r[P, P] - b * r[P, M])
    d[Z, P] = ((1j * wp - 0.5 * g_plus) * r[Z, P] + a * r[Z, Z] + f * r[Z, M]
               - a * r[P, P] - b * r[M, P])

    d[P, M] = ((-1j * (wp - wm) - 0.5 * (g_plus + g_minus)) * r[P, M] + a * r[Z, M]
               + f * r[M, M] + b * r[P, Z] - f * r[P, P])
    d[M, P] = ((1j * (wp - wm) - 0.5 * (g_plus + g_minus)) * r[M, P] + a * r[M, Z]
               + f * r[M, M] + b * r[Z, P] - f * r[P, P])

    d[Z, M] = ((1j * wm - 0.5 * g_minus) * r[Z, M] - a * r[P, M] - b * r[M, M]
               - f * r[Z, P] + b * r[Z, Z])
    d[M, Z] = ((-1j * wm - 0.5 * g_minus) * r[M, Z] - a * r[M, P] - b * r[M, M]
               - f * r[P, Z] + b * r[Z, Z])
    return d
