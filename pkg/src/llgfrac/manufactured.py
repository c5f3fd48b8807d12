"""Exact LLG solutions with Neumann-compatible profiles and their forcing terms.

Both solutions share the form ``m = (cos(phi) sin t, sin(phi) sin t, cos t)``
with a scalar profile ``phi(x)``:

* 1D: ``phi = cos(pi x)``
* 3D: ``phi = X Y Z`` with ``X = x^2 (1 - x)^2`` (same for Y, Z)

so ``Lap m = sin t * (Lap(phi) * (-sin phi, cos phi, 0) - |grad phi|^2 * (cos phi, sin phi, 0))``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grid_field import Grid, NormTriple, VectorField, error_norms, make_grid
from .nodal import cross
from .schemes import SchemeConfig, integrate


def _profile(point, dim):
    """Return ``(phi, |grad phi|^2, Lap phi)`` evaluated at ``point``."""
    if dim == 1:
        x = np.asarray(point[0] if isinstance(point, (tuple, list)) else point, dtype=np.float64)
        phi = np.cos(np.pi * x)
        dphi = -np.pi * np.sin(np.pi * x)
        return phi, dphi * dphi, -np.pi**2 * phi
    x, y, z = (np.asarray(c, dtype=np.float64) for c in point)

    def poly(s):
        return s * s * (1 - s) ** 2, 2 * s * (1 - s) * (1 - 2 * s), 2 * (1 - 6 * s + 6 * s * s)

    X, dX, ddX = poly(x)
    Y, dY, ddY = poly(y)
    Z, dZ, ddZ = poly(z)
    phi = X * Y * Z
    grad2 = (dX * Y * Z) ** 2 + (X * dY * Z) ** 2 + (X * Y * dZ) ** 2
    lap = ddX * Y * Z + X * ddY * Z + X * Y * ddZ
    return phi, grad2, lap


def _stack(*comps):
    comps = np.broadcast_arrays(*comps)
    return np.stack(comps, axis=-1)


def exact_solution(point, t: float, dim: int) -> np.ndarray:
    phi, _, _ = _profile(point, dim)
    st, ct = np.sin(t), np.cos(t)
    return _stack(np.cos(phi) * st, np.sin(phi) * st, np.full_like(phi, ct))


def exact_time_derivative(point, t: float, dim: int) -> np.ndarray:
    phi, _, _ = _profile(point, dim)
    ct, st = np.cos(t), np.sin(t)
    return _stack(np.cos(phi) * ct, np.sin(phi) * ct, np.full_like(phi, -st))


def exact_laplacian(point, t: float, dim: int) -> np.ndarray:
    phi, grad2, lap = _profile(point, dim)
    st = np.sin(t)
    c, s = np.cos(phi), np.sin(phi)
    return _stack(
        st * (-lap * s - grad2 * c),
        st * (lap * c - grad2 * s),
        np.zeros_like(phi),
    )


def forcing(point, t: float, alpha: float, dim: int) -> np.ndarray:
    """``f = m_t + m x Lap m + alpha m x (m x Lap m)`` at the exact solution."""
    m = exact_solution(point, t, dim)
    torque = cross(m, exact_laplacian(point, t, dim))
    return exact_time_derivative(point, t, dim) + torque + alpha * cross(m, torque)


def initial_profile(point, dim: int, t0: float = 0.01) -> np.ndarray:
    """Unforced initial data of the norm studies: the exact profile frozen at ``t = t0``."""
    return exact_solution(point, t0, dim)


@dataclass(frozen=True)
class ManufacturedProblem:
    dim: int
    alpha: float
    final_time: float

    def sample(self, grid: Grid, t: float) -> VectorField:
        return VectorField(grid, exact_solution(grid.coords(), t, self.dim))

    def forcing_on(self, grid: Grid):
        """Forcing sampler ``t -> f(grid nodes, t)``.

        With ``P = (cos phi, sin phi, 0)``, ``e3 = (0, 0, 1)`` and the static part
        ``V`` of ``Lap m = sin(t) V``, the forcing is a fixed combination of
        time-independent node arrays with coefficients polynomial in sin t, cos t.
        """
        phi, grad2, lap = _profile(grid.coords(), self.dim)
        c, s = np.cos(phi), np.sin(phi)
        zero = np.zeros_like(phi)
        P = _stack(c, s, zero)
        e3 = _stack(zero, zero, np.ones_like(phi))
        V = _stack(-lap * s - grad2 * c, lap * c - grad2 * s, zero)
        A, B = cross(P, V), cross(e3, V)
        a = self.alpha
        basis = np.stack([P, e3, A, B, a * cross(P, A), a * (cross(P, B) + cross(e3, A)), a * cross(e3, B)])

        def f(t):
            st, ct = np.sin(t), np.cos(t)
            coef = np.array([ct, -st, st * st, st * ct, st**3, st * st * ct, st * ct * ct])
            return np.tensordot(coef, basis, axes=1)

        return f

    def grid(self, n: int) -> Grid:
        return make_grid(self.dim, n)


def evaluate_run(problem: ManufacturedProblem, grid: Grid, cfg: SchemeConfig,
                 n_steps: int, return_history: bool = False, forcing_offset: float = 0.5):
    """Integrate from the exact data at t = 0 to ``n_steps * dt`` and measure the error there."""
    t_end = n_steps * cfg.dt
    if n_steps > 0 and not np.isclose(t_end, problem.final_time, rtol=1e-9, atol=0.0):
        raise ValueError(f"n_steps * dt = {t_end} does not match final time {problem.final_time}")
    m0 = problem.sample(grid, 0.0)
    m, history = integrate(m0, cfg, n_steps, problem.forcing_on(grid), forcing_offset)
    norms = error_norms(m - problem.sample(grid, t_end))
    if return_history:
        return norms, m, history
    return norms
