import os
import subprocess
import sys

import numpy as np
import pytest

import llgfrac
from llgfrac import _backend, _fallback

compiled_only = pytest.mark.skipif(_backend.compiled is None, reason="compiled kernels not built")


def test_env_var_forces_fallback():
    env = dict(os.environ, LLGFRAC_BACKEND="python")
    proc = subprocess.run([sys.executable, "-c", "import llgfrac; print(llgfrac.backend_name())"],
                          capture_output=True, text=True, env=env)
    assert proc.stdout.strip() == "python"


def test_use_rejects_unknown():
    with pytest.raises(ValueError):
        _backend.use("fortran")


def test_use_switches_and_restores():
    before = llgfrac.backend_name()
    _backend.use("python")
    assert llgfrac.backend_name() == "python"
    _backend.use(before)
    assert llgfrac.backend_name() == before


@compiled_only
class TestKernelParity:
    core = _backend.compiled

    @pytest.mark.parametrize("periodic", [False, True])
    def test_laplacian(self, rng, periodic):
        u1 = rng.standard_normal((37, 3))
        u3 = rng.standard_normal((6, 6, 6, 3))
        np.testing.assert_allclose(self.core.laplacian_1d(u1, 0.1, periodic),
                                   _fallback.laplacian_1d(u1, 0.1, periodic), rtol=1e-13, atol=1e-11)
        np.testing.assert_allclose(self.core.laplacian_3d(u3, 0.2, periodic),
                                   _fallback.laplacian_3d(u3, 0.2, periodic), rtol=1e-13, atol=1e-11)

    @pytest.mark.parametrize("periodic", [False, True])
    @pytest.mark.parametrize("cols", [1, 3, 8])
    def test_helmholtz(self, rng, periodic, cols):
        m = rng.standard_normal((41, cols))
        np.testing.assert_allclose(self.core.helmholtz_1d(m, 0.01, 1 / 40, periodic),
                                   _fallback.helmholtz_1d(m, 0.01, 1 / 40, periodic), rtol=1e-12, atol=1e-14)

    def test_cramer(self, rng):
        k, rhs = rng.standard_normal((2, 1000, 3)) * 4
        np.testing.assert_allclose(self.core.cramer_solve(k, rhs), _fallback.cramer_solve(k, rhs),
                                   rtol=1e-14, atol=1e-15)

    def test_fallback_has_no_fused_step(self):
        assert _fallback.fractional_step_1d is None
        assert callable(self.core.fractional_step_1d)
