"""Pure numpy/scipy kernels.  Same signatures as the compiled ``_core`` module."""

import numpy as np
from scipy.linalg import solve_banded

NAME = "python"


def laplacian_1d(u, h, periodic):
    u = np.asarray(u, dtype=np.float64)
    out = np.empty_like(u)
    if periodic:
        out[...] = np.roll(u, 1, axis=0) - 2.0 * u + np.roll(u, -1, axis=0)
    else:
        out[1:-1] = u[:-2] - 2.0 * u[1:-1] + u[2:]
        out[0] = 2.0 * (u[1] - u[0])
        out[-1] = 2.0 * (u[-2] - u[-1])
    out /= h * h
    return out


def _axis_second_difference(u, axis, periodic):
    if periodic:
        return np.roll(u, 1, axis=axis) - 2.0 * u + np.roll(u, -1, axis=axis)
    v = np.moveaxis(u, axis, 0)
    d = np.empty_like(v)
    d[1:-1] = v[:-2] - 2.0 * v[1:-1] + v[2:]
    d[0] = 2.0 * (v[1] - v[0])
    d[-1] = 2.0 * (v[-2] - v[-1])
    return np.moveaxis(d, 0, axis)


def laplacian_3d(u, h, periodic):
    u = np.asarray(u, dtype=np.float64)
    out = _axis_second_difference(u, 0, periodic)
    out += _axis_second_difference(u, 1, periodic)
    out += _axis_second_difference(u, 2, periodic)
    out /= h * h
    return np.ascontiguousarray(out)


def _neumann_bands(n, r):
    # banded storage for solve_banded((1, 1), ...): rows are super, main, sub diagonals
    ab = np.empty((3, n))
    ab[0, :] = -r
    ab[1, :] = 1.0 + 2.0 * r
    ab[2, :] = -r
    ab[0, 1] = -2.0 * r  # row 0 couples to the mirrored ghost
    ab[2, n - 2] = -2.0 * r
    return ab


def helmholtz_1d(m, dt, h, periodic):
    """Solve ``(I - dt*Lap) g = m`` column-wise on a 1D grid."""
    m = np.asarray(m, dtype=np.float64)
    if dt == 0.0:
        return m.copy()
    n = m.shape[0]
    r = dt / (h * h)
    if not periodic:
        return solve_banded((1, 1), _neumann_bands(n, r), m)
    # cyclic system via Sherman-Morrison on the corner entries
    diag = 1.0 + 2.0 * r
    gamma = -diag
    ab = np.empty((3, n))
    ab[0, :] = -r
    ab[1, :] = diag
    ab[2, :] = -r
    ab[1, 0] = diag - gamma
    ab[1, -1] = diag - r * r / gamma
    u = np.zeros(n)
    u[0] = gamma
    u[-1] = -r
    rhs = np.column_stack([m.reshape(n, -1), u])
    sol = solve_banded((1, 1), ab, rhs)
    y, z = sol[:, :-1], sol[:, -1]
    vz = z[0] + (-r / gamma) * z[-1]
    vy = y[0] + (-r / gamma) * y[-1]
    x = y - np.outer(z, vy / (1.0 + vz))
    return x.reshape(m.shape)


def cramer_solve(k, rhs):
    """Solve ``(I + K) x = rhs`` per node, K = [[0, c, -b], [-c, 0, a], [b, -a, 0]]."""
    k = np.asarray(k, dtype=np.float64)
    rhs = np.asarray(rhs, dtype=np.float64)
    a, b, c = k[..., 0], k[..., 1], k[..., 2]
    p, q, s = rhs[..., 0], rhs[..., 1], rhs[..., 2]
    det = 1.0 + a * a + b * b + c * c
    out = np.empty(np.broadcast_shapes(k.shape, rhs.shape))
    out[..., 0] = (p * (1.0 + a * a) - q * (c - a * b) + s * (a * c + b)) / det
    out[..., 1] = (p * (a * b + c) + q * (1.0 + b * b) - s * (a - b * c)) / det
    out[..., 2] = (p * (a * c - b) + q * (a + b * c) + s * (1.0 + c * c)) / det
    return out


fractional_step_1d = None
