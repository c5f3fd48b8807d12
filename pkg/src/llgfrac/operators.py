"""Discrete Laplacian and the regularising Helmholtz solve ``g = (I - dt*Lap)^{-1} m``."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _backend
from .errors import SolverError
from .grid_field import Grid, VectorField, node_weights


@dataclass(frozen=True)
class HelmholtzOptions:
    rel_tol: float = 1e-12
    max_iter: int | None = None  # defaults to 10 * nodes per axis

    def __post_init__(self):
        if not self.rel_tol > 0:
            raise ValueError("rel_tol must be positive")
        if self.max_iter is not None and self.max_iter < 1:
            raise ValueError("max_iter must be at least 1")


def laplacian_array(data: np.ndarray, grid: Grid) -> np.ndarray:
    """Apply the 2nd-order stencil to an array of shape ``grid.shape + (k,)``."""
    k = _backend.kernels
    if grid.dim == 1:
        return k.laplacian_1d(data, grid.h, grid.periodic)
    return k.laplacian_3d(data, grid.h, grid.periodic)


def laplacian(u: VectorField) -> VectorField:
    return VectorField(u.grid, laplacian_array(u.data, u.grid))


def offdiag_laplacian(u: VectorField) -> VectorField:
    """Neighbour-sum part of the stencil; the ``-2*dim/h**2`` centre term is dropped."""
    grid = u.grid
    return VectorField(grid, laplacian_array(u.data, grid) + (2.0 * grid.dim / grid.h**2) * u.data)


def _cg_helmholtz(b: np.ndarray, grid: Grid, dt: float, opts: HelmholtzOptions) -> np.ndarray:
    # The mirror-ghost operator is self-adjoint in the trapezoid-weighted inner
    # product, so CG runs with those weights.  Columns iterate independently.
    w = node_weights(grid)[..., None]
    ncol = b.shape[-1]
    axes = tuple(range(grid.dim))
    max_iter = opts.max_iter if opts.max_iter is not None else 10 * grid.n

    def apply(x):
        return x - dt * laplacian_array(x, grid)

    def wdot(u, v):
        return np.sum(w * u * v, axis=axes)

    x = b.copy()
    r = b - apply(x)
    bnorm = np.sqrt(wdot(b, b))
    scale = np.where(bnorm > 0, bnorm, 1.0)
    rr = wdot(r, r)
    p = r.copy()
    for _ in range(max_iter + 1):
        if np.all(np.sqrt(rr) <= opts.rel_tol * scale):
            return x
        q = apply(p)
        pq = wdot(p, q)
        active = rr > 0
        step = np.where(active, rr / np.where(active, pq, 1.0), 0.0)
        x += step * p
        r -= step * q
        rr_new = wdot(r, r)
        p = r + np.where(active, rr_new / np.where(active, rr, 1.0), 0.0) * p
        rr = rr_new
    residual = float(np.max(np.sqrt(rr) / scale))
    raise SolverError(
        f"Helmholtz CG did not reach rel_tol={opts.rel_tol:g} in {max_iter} iterations",
        residual=residual,
    )


def helmholtz_array(data: np.ndarray, grid: Grid, dt: float,
                    opts: HelmholtzOptions | None = None) -> np.ndarray:
    if dt < 0:
        raise ValueError("dt must be non-negative")
    if dt == 0:
        return np.array(data, dtype=np.float64, copy=True)
    if grid.dim == 1:
        return _backend.kernels.helmholtz_1d(data, dt, grid.h, grid.periodic)
    return _cg_helmholtz(np.asarray(data, dtype=np.float64), grid, dt, opts or HelmholtzOptions())


def helmholtz_solve(m: VectorField, dt: float, opts: HelmholtzOptions | None = None) -> VectorField:
    """Return g with ``(I - dt*Lap) g = m``, component-wise.

    1D uses a direct tridiagonal factorisation (mirror-Neumann or cyclic);
    3D uses conjugate gradients to relative residual ``opts.rel_tol``.
    Raises SolverError carrying the achieved residual if CG stalls.
    """
    return VectorField(m.grid, helmholtz_array(m.data, m.grid, dt, opts))
