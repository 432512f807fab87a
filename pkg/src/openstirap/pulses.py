"""Pump/Stokes pulse pair, mixing angles and instantaneous eigenvalues.

All quantities are evaluated for the sech-envelope pulse family

    Omega_1(t) = alpha / (T sqrt 2) sech(t/T) cos[pi/4 (tanh(t/T) + 1)]
    Omega_2(t) = alpha / (T sqrt 2) sech(t/T) sin[pi/4 (tanh(t/T) + 1)]

with the intuitive sequence driving the pump with Omega_1 and the
counterintuitive sequence driving it with Omega_2.  Functions accept scalar
or array times and broadcast.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

__all__ = [
    "Sequence",
    "PulseConfig",
    "AdiabaticFrame",
    "eval_pulses",
    "frame_at",
    "eigenbasis",
    "eigenbasis_derivative",
]


class Sequence(enum.Enum):
    INTUITIVE = "intuitive"
    COUNTERINTUITIVE = "counterintuitive"

    @classmethod
    def parse(cls, value: "Sequence | str") -> "Sequence":
        if isinstance(value, cls):
            return value
        key = str(value).strip().lower().replace("_", "-")
        aliases = {"ci": "counterintuitive", "counter-intuitive": "counterintuitive",
                   "i": "intuitive"}
        return cls(aliases.get(key, key))


@dataclass(frozen=True)
class PulseConfig:
    """Pulse and detuning parameters.

    ``alpha_t`` (alpha T) and ``delta_t`` (Delta T) are dimensionless; the
    integration window is ``[-t_max_over_t * T, t_max_over_t * T]``.
    """

    alpha_t: float = 10.0
    delta_t: float = 1.0
    sequence: Sequence = Sequence.COUNTERINTUITIVE
    t_scale: float = 1.0
    t_max_over_t: float = 10.0

    def __post_init__(self):
        object.__setattr__(self, "sequence", Sequence.parse(self.sequence))
        if not self.alpha_t > 0:
            raise ValueError(f"alpha_t must be positive, got {self.alpha_t}")
        if not self.t_scale > 0:
            raise ValueError(f"t_scale must be positive, got {self.t_scale}")
        if not self.t_max_over_t >= 5:
            raise ValueError(f"t_max_over_t must be >= 5, got {self.t_max_over_t}")
        if not self.delta_t >= 0:
            raise ValueError(f"delta_t must be >= 0, got {self.delta_t}")

    @property
    def alpha(self) -> float:
        return self.alpha_t / self.t_scale

    @property
    def delta(self) -> float:
        return self.delta_t / self.t_scale

    @property
    def t_max(self) -> float:
        return self.t_max_over_t * self.t_scale

    def window(self) -> tuple[float, float]:
        return -self.t_max, self.t_max


@dataclass(frozen=True)
class AdiabaticFrame:
    """Snapshot of the driving fields and adiabatic-basis parameters.

    Fields are floats, or equally shaped arrays when built from array times.
    Rates are in the same (inverse) time unit as ``t``.
    """

    t: float
    omega_p: float
    omega_s: float
    omega0: float
    theta: float
    phi: float
    theta_dot: float
    phi_dot: float
    omega_plus: float
    omega_minus: float
    delta: float


def _envelope(cfg: PulseConfig, t):
    x = np.asarray(t, dtype=float) / cfg.t_scale
    sech = 1.0 / np.cosh(np.clip(x, -700.0, 700.0))
    tanh = np.tanh(x)
    return x, sech, tanh, 0.25 * np.pi * (tanh + 1.0)


def eval_pulses(cfg: PulseConfig, t):
    """Return ``(omega_p, omega_s)`` at time(s) ``t``."""
    _, sech, _, v = _envelope(cfg, t)
    amp = cfg.alpha / np.sqrt(2.0) * sech
    first = amp * np.cos(v)
    second = amp * np.sin(v)
    if cfg.sequence is Sequence.INTUITIVE:
        return first, second
    return second, first


def frame_at(cfg: PulseConfig, t) -> AdiabaticFrame:
    """Evaluate pulses, mixing angles, their rates and eigenvalues at ``t``."""
    _, sech, tanh, _ = _envelope(cfg, t)
    omega_p, omega_s = eval_pulses(cfg, t)
    omega0 = cfg.alpha / np.sqrt(2.0) * sech
    omega0_dot = -omega0 * tanh / cfg.t_scale
    delta = cfg.delta

    theta = np.arctan2(omega_p, omega_s)
    theta_dot = 0.25 * np.pi * sech**2 / cfg.t_scale
    if cfg.sequence is Sequence.INTUITIVE:
        theta_dot = -theta_dot

    if delta == 0.0:
        phi = np.full_like(omega0, 0.25 * np.pi)
        phi_dot = np.zeros_like(omega0)
    else:
        phi = 0.5 * np.arctan2(2.0 * omega0, delta)
        phi_dot = omega0_dot * delta / (delta**2 + 4.0 * omega0**2)

    # Stable roots of w^2 - delta w - omega0^2 = 0 for delta >= 0.
    root = np.sqrt(delta**2 + 4.0 * omega0**2)
    omega_plus = 0.5 * (delta + root)
    denom = delta + root
    with np.errstate(divide="ignore", invalid="ignore"):
        omega_minus = np.where(denom > 0, -2.0 * omega0**2 / np.where(denom > 0, denom, 1.0), 0.0)

    def out(x):
        return float(x) if np.ndim(x) == 0 else x

    return AdiabaticFrame(
        t=out(np.asarray(t, dtype=float)),
        omega_p=out(omega_p),
        omega_s=out(omega_s),
        omega0=out(omega0),
        theta=out(theta),
        phi=out(phi),
        theta_dot=out(theta_dot),
        phi_dot=out(phi_dot),
        omega_plus=out(omega_plus),
        omega_minus=out(omega_minus),
        delta=delta,
    )


def eigenbasis(frame: AdiabaticFrame) -> np.ndarray:
    """Real orthogonal matrix whose columns are |+>, |0>, |->, in bare components.

    For array frames the result has shape ``(..., 3, 3)``.
    """
    st, ct = np.sin(frame.theta), np.cos(frame.theta)
    sp, cp = np.sin(frame.phi), np.cos(frame.phi)
    zero = np.zeros_like(st)
    cols = [
        (sp * st, cp, sp * ct),
        (ct, zero, -st),
        (cp * st, -sp, cp * ct),
    ]
    return np.stack([np.stack(c, axis=-1) for c in cols], axis=-1)


def eigenbasis_derivative(frame: AdiabaticFrame) -> np.ndarray:
    """Time derivative of :func:`eigenbasis`, from the closed-form angle rates."""
    st, ct = np.sin(frame.theta), np.cos(frame.theta)
    sp, cp = np.sin(frame.phi), np.cos(frame.phi)
    td, pd = frame.theta_dot, frame.phi_dot
    zero = np.zeros_like(st)
    cols = [
        (pd * cp * st + td * sp * ct, -pd * sp, pd * cp * ct - td * sp * st),
        (-td * st, zero, -td * ct),
        (-pd * sp * st + td * cp * ct, -pd * cp, -pd * sp * ct - td * cp * st),
    ]
    return np.stack([np.stack(c, axis=-1) for c in cols], axis=-1)
