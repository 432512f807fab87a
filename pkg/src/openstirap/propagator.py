"""Amplitude propagation under the non-Hermitian generators.

``propagate`` integrates ``i da/dt = H(t) a`` over the truncated pulse window
with an adaptive Dormand-Prince 5(4) pair and reports bare-basis populations
on a uniform output grid.  ``reference_propagate`` is an independent
fixed-step RK4 integrator built on :mod:`openstirap.hamiltonians`; it exists
to check the adaptive kernel.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from ._io import write_csv
from .hamiltonians import BasisKind, ModelKind, build_generator
from .pulses import AdiabaticFrame, PulseConfig, Sequence, eigenbasis, frame_at

__all__ = [
    "StepSizeUnderflow",
    "SimOptions",
    "AmplitudeState",
    "Trajectory",
    "initial_state",
    "bare_populations",
    "propagate",
    "reference_propagate",
    "kernel_controls",
    "TRAJECTORY_HEADER",
]

TRAJECTORY_HEADER = ("t_over_T", "p1", "p2", "p3", "norm")

# Above this Gamma T the initial step is bounded by 0.1 / Gamma and step growth is capped.
STIFF_GAMMA_T = 50.0


class StepSizeUnderflow(RuntimeError):
    """The step controller could not meet the tolerance; ``t`` is where it stopped."""

    def __init__(self, t: float, detail: str = ""):
        self.t = t
        msg = f"step size underflow at t = {t:.6g}"
        if detail:
            msg = f"{msg} ({detail})"
        super().__init__(msg)


@dataclass(frozen=True)
class SimOptions:
    rel_tol: float = 1e-10
    abs_tol: float = 1e-12
    max_step: float = math.inf
    sampling: int = 2001
    max_steps: int = 5_000_000

    def __post_init__(self):
        for name in ("rel_tol", "abs_tol"):
            value = getattr(self, name)
            if not 0 < value <= 1e-3:
                raise ValueError(f"{name} must lie in (0, 1e-3], got {value}")
        if not self.max_step > 0:
            raise ValueError("max_step must be positive")
        if self.sampling < 2:
            raise ValueError("sampling needs at least 2 points")


@dataclass
class AmplitudeState:
    components: np.ndarray
    t: float
    basis: BasisKind

    @property
    def norm(self) -> float:
        return float(np.sum(np.abs(self.components) ** 2))


@dataclass
class Trajectory:
    """Sampled populations of |1>, |2>, |3> and the retained norm."""

    times: np.ndarray
    p1: np.ndarray
    p2: np.ndarray
    p3: np.ndarray
    norm: np.ndarray
    t_scale: float = 1.0
    amplitudes: np.ndarray | None = field(default=None, repr=False)
    basis: BasisKind | None = None
    n_accepted: int = 0
    n_rejected: int = 0

    @property
    def t_over_t(self) -> np.ndarray:
        return self.times / self.t_scale

    @property
    def p1_final(self) -> float:
        return float(self.p1[-1])

    @property
    def p3_final(self) -> float:
        return float(self.p3[-1])

    @property
    def norm_final(self) -> float:
        return float(self.norm[-1])

    def populations(self) -> np.ndarray:
        return np.column_stack([self.p1, self.p2, self.p3])

    def to_csv(self, path):
        rows = zip(self.t_over_t, self.p1, self.p2, self.p3, self.norm)
        return write_csv(path, TRAJECTORY_HEADER, rows)


def initial_state(cfg: PulseConfig, basis: BasisKind | str) -> AmplitudeState:
    """Bare |1> at the start of the window, expressed in ``basis``."""
    basis = BasisKind.parse(basis)
    t0 = -cfg.t_max
    bare = np.array([1.0, 0.0, 0.0], dtype=complex)
    if basis is BasisKind.BARE:
        return AmplitudeState(bare, t0, basis)
    u = eigenbasis(frame_at(cfg, t0))
    return AmplitudeState(u.T @ bare, t0, basis)


def bare_populations(frame: AdiabaticFrame, state: AmplitudeState):
    """Populations of |1>, |2>, |3> for an adiabatic-basis state."""
    if state.basis is not BasisKind.ADIABATIC:
        raise ValueError("state must be given in the adiabatic basis")
    bare = eigenbasis(frame) @ np.asarray(state.components)
    p = np.abs(bare) ** 2
    return float(p[0]), float(p[1]), float(p[2])


def kernel_controls(gamma_t: float) -> tuple[float, float]:
    """Initial step (in units of T) and maximum growth factor for the controller."""
    if gamma_t >= STIFF_GAMMA_T:
        return min(1e-2, 0.1 / gamma_t), 2.0
    return 1e-2, 5.0


def _codes(cfg: PulseConfig, model: ModelKind):
    seq = _kernels.INTUITIVE if cfg.sequence is Sequence.INTUITIVE else _kernels.COUNTERINTUITIVE
    mod = _kernels.PHENOMENOLOGICAL if model is ModelKind.PHENOMENOLOGICAL else _kernels.EFFECTIVE
    return mod, seq


def _sample_grid(cfg: PulseConfig, n: int) -> np.ndarray:
    return np.linspace(-cfg.t_max_over_t, cfg.t_max_over_t, n)


def run_kernel(system: int, params, y0, cfg: PulseConfig, gamma_t: float,
               opts: SimOptions, backend: str | None = None):
    """Integrate one kernel system over the window on the uniform sample grid.

    Works in units of T.  Raises :class:`StepSizeUnderflow` on controller failure.
    """
    kernel = _kernels.get_backend(backend)
    tau = _sample_grid(cfg, opts.sampling)
    h0, max_factor = kernel_controls(gamma_t)
    max_step = opts.max_step / cfg.t_scale
    out, n_acc, n_rej, status, t_fail = kernel.integrate(
        system, params, y0, tau[0], tau[-1], tau,
        opts.rel_tol, opts.abs_tol, max_step, h0, max_factor, opts.max_steps,
    )
    if status != _kernels.OK:
        reason = "step limit reached" if status == _kernels.TOO_MANY_STEPS else "tolerance not met"
        raise StepSizeUnderflow(t_fail * cfg.t_scale, reason)
    return tau, out, int(n_acc), int(n_rej)


def propagate(cfg: PulseConfig, gamma: float, model: ModelKind | str = ModelKind.EFFECTIVE,
              basis: BasisKind | str = BasisKind.ADIABATIC, opts: SimOptions | None = None,
              backend: str | None = None) -> Trajectory:
    """Propagate bare |1> through the pulse pair under H_eff or H_phen.

    Parameters
    ----------
    cfg : PulseConfig
    gamma : float
        Decay rate Gamma, in inverse units of ``cfg.t_scale``.
    model, basis :
        Which generator, and which basis to integrate in.  Populations are
        always reported in the bare basis.
    opts : SimOptions, optional
    backend : {"cython", "python"}, optional
        Kernel override; defaults to the one selected at import.

    Raises
    ------
    StepSizeUnderflow
        If the step controller cannot meet the tolerance.
    """
    if gamma < 0:
        raise ValueError(f"gamma must be >= 0, got {gamma}")
    opts = opts or SimOptions()
    model = ModelKind.parse(model)
    basis = BasisKind.parse(basis)
    gamma_t = gamma * cfg.t_scale
    mod, seq = _codes(cfg, model)
    system = _kernels.ADIABATIC_3 if basis is BasisKind.ADIABATIC else _kernels.BARE_3
    params = (mod, seq, cfg.alpha_t, cfg.delta_t, gamma_t, 0.0, 0.0, 0.0)
    y0 = initial_state(cfg, basis).components
    tau, amps, n_acc, n_rej = run_kernel(system, params, y0, cfg, gamma_t, opts, backend)
    times = tau * cfg.t_scale
    return _trajectory(cfg, times, amps, basis, n_acc, n_rej)


def _trajectory(cfg, times, amps, basis, n_acc=0, n_rej=0) -> Trajectory:
    if basis is BasisKind.ADIABATIC:
        u = eigenbasis(frame_at(cfg, times))
        bare = np.einsum("nij,nj->ni", u, amps)
    else:
        bare = amps
    pops = np.abs(bare) ** 2
    norm = np.sum(np.abs(amps) ** 2, axis=1)
    return Trajectory(times=times, p1=pops[:, 0], p2=pops[:, 1], p3=pops[:, 2], norm=norm,
                      t_scale=cfg.t_scale, amplitudes=amps, basis=basis,
                      n_accepted=n_acc, n_rejected=n_rej)


def reference_propagate(cfg: PulseConfig, gamma: float, model: ModelKind | str,
                        basis: BasisKind | str, n_steps: int) -> Trajectory:
    """Classical fixed-step RK4 over the window, sampled at every step.

    Uses :func:`build_generator` directly, so it shares no code with the
    adaptive kernels beyond the pulse definitions.
    """
    model = ModelKind.parse(model)
    basis = BasisKind.parse(basis)
    t0, t1 = cfg.window()
    h = (t1 - t0) / n_steps
    grid = np.linspace(t0, t1, 2 * n_steps + 1)
    gen = build_generator(frame_at(cfg, grid), gamma, model, basis).entries
    a = -1j * gen
    y = initial_state(cfg, basis).components.copy()
    out = np.empty((n_steps + 1, 3), dtype=complex)
    out[0] = y
    half = 0.5 * h
    for k in range(n_steps):
        a0, am, a1 = a[2 * k], a[2 * k + 1], a[2 * k + 2]
        k1 = a0 @ y
        k2 = am @ (y + half * k1)
        k3 = am @ (y + half * k2)
        k4 = a1 @ (y + h * k3)
        y = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        out[k + 1] = y
    return _trajectory(cfg, grid[::2], out, basis)
