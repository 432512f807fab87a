"""Open-system STIRAP: effective vs phenomenological non-Hermitian models.

Pulse shapes and the adiabatic frame live in :mod:`openstirap.pulses`,
generators in :mod:`openstirap.hamiltonians`, amplitude propagation in
:mod:`openstirap.propagator`, the four-level master equation in
:mod:`openstirap.lindblad`, closed forms in :mod:`openstirap.analysis` and
sweeps/figures in :mod:`openstirap.experiments`.
"""
from ._kernels import BACKEND, available_backends
from .analysis import (
    DegenerateDenominator,
    QuadratureError,
    ZenoOutcome,
    weak_damping_p3,
    zeno_predict,
)
from .hamiltonians import BasisKind, ModelKind, build_generator
from .lindblad import ReservoirSpec, propagate_master
from .propagator import SimOptions, StepSizeUnderflow, Trajectory, propagate
from .pulses import PulseConfig, Sequence, eigenbasis, frame_at

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "available_backends",
    "BasisKind",
    "DegenerateDenominator",
    "ModelKind",
    "PulseConfig",
    "QuadratureError",
    "ReservoirSpec",
    "Sequence",
    "SimOptions",
    "StepSizeUnderflow",
    "Trajectory",
    "ZenoOutcome",
    "build_generator",
    "eigenbasis",
    "frame_at",
    "propagate",
    "propagate_master",
    "weak_damping_p3",
    "zeno_predict",
]
