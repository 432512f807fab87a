import importlib

import numpy as np
import pytest

from openstirap import _kernels
from openstirap.hamiltonians import BasisKind, ModelKind
from openstirap.lindblad import ReservoirSpec, propagate_master
from openstirap.propagator import SimOptions, propagate
from openstirap.pulses import PulseConfig, Sequence

BACKENDS = _kernels.available_backends()
needs_cython = pytest.mark.skipif("cython" not in BACKENDS, reason="compiled kernel not built")


def test_python_backend_always_available():
    assert "python" in BACKENDS
    assert _kernels.get_backend("python") is not None
    with pytest.raises(ValueError):
        _kernels.get_backend("fortran")


def test_env_forces_pure_python(monkeypatch):
    monkeypatch.setenv("OPENSTIRAP_PURE_PYTHON", "1")
    mod = importlib.reload(_kernels)
    try:
        assert mod.BACKEND == "python"
    finally:
        monkeypatch.delenv("OPENSTIRAP_PURE_PYTHON")
        importlib.reload(_kernels)


@needs_cython
@pytest.mark.parametrize("system", [_kernels.ADIABATIC_3, _kernels.BARE_3, _kernels.MASTER_4])
def test_rhs_and_generator_agree(system):
    rng = np.random.default_rng(system)
    dim = 16 if system == _kernels.MASTER_4 else 3
    c, p = _kernels.get_backend("cython"), _kernels.get_backend("python")
    for model in (_kernels.EFFECTIVE, _kernels.PHENOMENOLOGICAL):
        for seq in (_kernels.COUNTERINTUITIVE, _kernels.INTUITIVE):
            params = (model, seq, 12.0, 1.5, 3.0, 0.4, 0.2, -1.0)
            for t in (-7.0, -0.3, 0.0, 2.2):
                y = rng.normal(size=dim) + 1j * rng.normal(size=dim)
                np.testing.assert_allclose(c.rhs(system, params, t, y), p.rhs(system, params, t, y),
                                           rtol=1e-13, atol=1e-13)
            if system != _kernels.MASTER_4:
                np.testing.assert_allclose(c.generator(system, params, 0.5), p.generator(system, params, 0.5),
                                           rtol=1e-13, atol=1e-14)


@needs_cython
@pytest.mark.parametrize("model", list(ModelKind))
@pytest.mark.parametrize("basis", list(BasisKind))
@pytest.mark.parametrize("gamma", [0.0, 0.7, 60.0])
def test_propagation_backends_agree(model, basis, gamma):
    cfg = PulseConfig(alpha_t=10.0, delta_t=1.0, sequence=Sequence.INTUITIVE)
    opts = SimOptions(sampling=101, rel_tol=1e-8, abs_tol=1e-10)
    a = propagate(cfg, gamma, model, basis, opts, backend="cython")
    b = propagate(cfg, gamma, model, basis, opts, backend="python")
    np.testing.assert_allclose(a.populations(), b.populations(), atol=1e-12)
    assert (a.n_accepted, a.n_rejected) == (b.n_accepted, b.n_rejected)


@needs_cython
def test_master_backends_agree():
    cfg = PulseConfig(alpha_t=10.0, delta_t=1.0)
    res = ReservoirSpec(gamma=1.0, n_plus=0.3, n_minus=0.1, omega4=-1.0)
    opts = SimOptions(sampling=51, rel_tol=1e-7, abs_tol=1e-9)
    a = propagate_master(cfg, res, opts, backend="cython")
    b = propagate_master(cfg, res, opts, backend="python")
    np.testing.assert_allclose(a.rho, b.rho, atol=1e-12)
