"""Weak-damping closed forms and the strong-damping (Zeno) outcome table."""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .hamiltonians import ModelKind
from .pulses import AdiabaticFrame, PulseConfig, Sequence, frame_at

__all__ = [
    "DegenerateDenominator",
    "QuadratureError",
    "EliminationCoefficient",
    "ZenoOutcome",
    "ZenoPrediction",
    "adaptive_simpson",
    "elimination_coefficient",
    "dark_state_population",
    "weak_damping_p3",
    "weak_damping_exponent",
    "zeno_predict",
]


class DegenerateDenominator(ArithmeticError):
    """Adiabatic elimination breaks down (vanishing denominator)."""


class QuadratureError(ArithmeticError):
    def __init__(self, message: str, residual: float):
        super().__init__(f"{message} (residual estimate {residual:.3g})")
        self.residual = residual


def adaptive_simpson(f, a: float, b: float, tol: float = 1e-10, max_depth: int = 48,
                     panels: int = 8) -> tuple[float, float]:
    """Integrate ``f`` over ``[a, b]`` by adaptive Simpson with Richardson correction.

    Returns ``(value, error_estimate)``.  The interval is first cut into
    ``panels`` equal pieces so that narrow peaks are not missed.

    Raises
    ------
    QuadratureError
        If some sub-interval hits ``max_depth`` without meeting its share of
        the tolerance and the accumulated residual exceeds ``tol``.
    """
    if b == a:
        return 0.0, 0.0
    total = 0.0
    err_total = 0.0
    unresolved = 0.0
    edges = np.linspace(a, b, panels + 1)
    stack = []
    for lo, hi in zip(edges[:-1], edges[1:]):
        lo, hi = float(lo), float(hi)
        mid = 0.5 * (lo + hi)
        flo, fmid, fhi = f(lo), f(mid), f(hi)
        whole = (hi - lo) / 6.0 * (flo + 4.0 * fmid + fhi)
        stack.append((lo, hi, flo, fmid, fhi, whole, tol / panels, 0))
    while stack:
        lo, hi, flo, fmid, fhi, whole, eps, depth = stack.pop()
        mid = 0.5 * (lo + hi)
        lm, rm = 0.5 * (lo + mid), 0.5 * (mid + hi)
        flm, frm = f(lm), f(rm)
        left = (mid - lo) / 6.0 * (flo + 4.0 * flm + fmid)
        right = (hi - mid) / 6.0 * (fmid + 4.0 * frm + fhi)
        delta = left + right - whole
        if abs(delta) <= 15.0 * eps or depth >= max_depth:
            total += left + right + delta / 15.0
            err_total += abs(delta) / 15.0
            if depth >= max_depth and abs(delta) > 15.0 * eps:
                unresolved += abs(delta) / 15.0
            continue
        stack.append((mid, hi, fmid, frm, fhi, right, 0.5 * eps, depth + 1))
        stack.append((lo, mid, flo, flm, fmid, left, 0.5 * eps, depth + 1))
    if unresolved > tol:
        raise QuadratureError("adaptive Simpson did not converge", unresolved)
    return total, err_total


@dataclass(frozen=True)
class EliminationCoefficient:
    value: complex
    model: ModelKind
    t: float


def elimination_coefficient(frame: AdiabaticFrame, gamma: float,
                            model: ModelKind | str) -> EliminationCoefficient:
    """Decay coefficient A(t) of the dark-state amplitude, da0/dt = -A a0.

    Valid for the counterintuitive sequence with |+> and |-> weakly
    populated; the caller is responsible for that context.
    """
    model = ModelKind.parse(model)
    sp, cp = math.sin(frame.phi), math.cos(frame.phi)
    s2p = math.sin(2.0 * frame.phi)
    wp, wm = frame.omega_plus, frame.omega_minus
    # omega_plus = Omega0 cot(phi), -omega_minus = Omega0 tan(phi),
    # omega_plus + omega_minus = 2 Omega0 cot(2 phi).
    denom = (1j * wp + gamma * cp**2) * (1j * wm + gamma * sp**2) + frame.phi_dot**2
    if model is ModelKind.PHENOMENOLOGICAL:
        denom -= 0.25 * gamma**2 * s2p**2
        weight = 1.0
    else:
        weight = sp**4 + cp**4
    scale = frame.omega0**2 + gamma**2
    if denom == 0 or abs(denom) < 1e-14 * scale:
        raise DegenerateDenominator(
            f"elimination denominator {abs(denom):.3g} vanishes at t = {frame.t:.6g}")
    numer = frame.theta_dot**2 * (gamma * weight + 1j * (wp + wm))
    return EliminationCoefficient(value=complex(numer / denom), model=model, t=frame.t)


def dark_state_population(cfg: PulseConfig, gamma: float, model: ModelKind | str,
                          times, tol: float = 1e-10) -> np.ndarray:
    """exp(-2 int_{-t_max}^t Re A dt') at each of the ascending ``times``."""
    model = ModelKind.parse(model)

    def re_a(t):
        return elimination_coefficient(frame_at(cfg, t), gamma, model).value.real

    times = np.asarray(times, dtype=float)
    out = np.empty_like(times)
    acc = 0.0
    prev = -cfg.t_max
    for i, t in enumerate(times):
        if t > prev:
            piece, _ = adaptive_simpson(re_a, prev, float(t), tol=tol, panels=1)
            acc += piece
            prev = float(t)
        out[i] = math.exp(-2.0 * acc)
    return out


def _integrand(cfg: PulseConfig, model: ModelKind):
    if cfg.sequence is Sequence.INTUITIVE:
        def f(t):
            return math.sin(frame_at(cfg, t).phi) ** 2
        return f

    def f(t):
        fr = frame_at(cfg, t)
        denom = fr.omega0**2 + fr.phi_dot**2
        if denom == 0.0:
            return 0.0
        value = fr.theta_dot**2 / denom
        if model is ModelKind.EFFECTIVE:
            value *= math.sin(fr.phi) ** 4 + math.cos(fr.phi) ** 4
        return value
    return f


def weak_damping_exponent(cfg: PulseConfig, model: ModelKind | str, tol: float = 1e-10) -> float:
    """The integral I with P3 = exp(-2 Gamma I) to first order in Gamma.

    Intuitive sequence: I = int sin^2 phi dt for either model.
    Counterintuitive: I = int theta_dot^2 w / (Omega0^2 + phi_dot^2) dt with
    w = 1 (phenomenological) or sin^4 phi + cos^4 phi (effective).
    """
    model = ModelKind.parse(model)
    lo, hi = cfg.window()
    value, _ = adaptive_simpson(_integrand(cfg, model), lo, hi, tol=tol)
    return value


def weak_damping_p3(cfg: PulseConfig, gamma: float, model: ModelKind | str) -> float:
    """Post-pulse target population predicted for weak damping."""
    if gamma < 0:
        raise ValueError(f"gamma must be >= 0, got {gamma}")
    if gamma == 0:
        return 1.0
    return math.exp(-2.0 * gamma * weak_damping_exponent(cfg, model))


class ZenoOutcome(enum.Enum):
    COMPLETE_TRANSFER = "CompleteTransfer"
    REMAINS_IN_STATE_1 = "RemainsInState1"
    TOTAL_LOSS = "TotalLoss"


@dataclass(frozen=True)
class ZenoPrediction:
    outcome: ZenoOutcome
    rationale: str


_ZENO_TABLE = {
    (ModelKind.EFFECTIVE, Sequence.COUNTERINTUITIVE): (
        ZenoOutcome.COMPLETE_TRANSFER,
        "dark-state-isolated: |0> has zero decay and decouples from |+>, |->",
    ),
    (ModelKind.PHENOMENOLOGICAL, Sequence.COUNTERINTUITIVE): (
        ZenoOutcome.REMAINS_IN_STATE_1,
        "doublet-inversion: |0_1> -> |0_2>, which ends in |1>",
    ),
    (ModelKind.PHENOMENOLOGICAL, Sequence.INTUITIVE): (
        ZenoOutcome.REMAINS_IN_STATE_1,
        "doublet-inversion: |0_2> -> |0_1>, which ends in |1>",
    ),
    (ModelKind.EFFECTIVE, Sequence.INTUITIVE): (
        ZenoOutcome.TOTAL_LOSS,
        "bright-subspace-decay: |+>, |-> mix near phi = pi/4 and the whole subspace decays",
    ),
}


def zeno_predict(model: ModelKind | str, sequence: Sequence | str) -> ZenoPrediction:
    """Strong-damping outcome for a model/sequence pair."""
    outcome, why = _ZENO_TABLE[(ModelKind.parse(model), Sequence.parse(sequence))]
    return ZenoPrediction(outcome, why)
