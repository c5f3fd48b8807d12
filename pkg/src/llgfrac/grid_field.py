"""Structured grids, nodal 3-vector fields and the discrete norms used in the studies.

Fields are stored node-major: ``data`` has shape ``grid.shape + (3,)`` with the
component index last, so ``data.reshape(-1, 3)`` is the flat node list in
C (axis-ordered) linearization.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np


class Boundary(str, enum.Enum):
    NEUMANN = "neumann"
    PERIODIC = "periodic"


@dataclass(frozen=True)
class Grid:
    """Uniform node grid on the unit interval or unit cube.

    Neumann grids are node-centred with nodes on both faces, so ``h = 1/(n-1)``.
    Periodic grids omit the duplicate node at ``x = 1`` and use ``h = 1/n``.
    """

    dim: int
    n: int
    h: float
    bc: Boundary = Boundary.NEUMANN

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.n,) * self.dim

    @property
    def size(self) -> int:
        return self.n**self.dim

    @property
    def periodic(self) -> bool:
        return self.bc is Boundary.PERIODIC

    def axis_coords(self) -> np.ndarray:
        return np.arange(self.n) * self.h

    def coords(self) -> tuple[np.ndarray, ...]:
        """Node coordinates, one array of shape ``grid.shape`` per axis."""
        x = self.axis_coords()
        if self.dim == 1:
            return (x,)
        return tuple(np.meshgrid(x, x, x, indexing="ij"))


def make_grid(dim: int, n: int, bc: Boundary | str = Boundary.NEUMANN) -> Grid:
    if dim not in (1, 3):
        raise ValueError(f"dim must be 1 or 3, got {dim}")
    if int(n) != n or n < 3:
        raise ValueError(f"need at least 3 nodes per axis, got {n}")
    bc = Boundary(bc)
    n = int(n)
    h = 1.0 / n if bc is Boundary.PERIODIC else 1.0 / (n - 1)
    return Grid(dim=dim, n=n, h=h, bc=bc)


@dataclass
class VectorField:
    grid: Grid
    data: np.ndarray

    def __post_init__(self):
        self.data = np.ascontiguousarray(self.data, dtype=np.float64)
        expected = self.grid.shape + (3,)
        if self.data.shape != expected:
            raise ValueError(f"field data has shape {self.data.shape}, expected {expected}")

    @classmethod
    def zeros(cls, grid: Grid) -> "VectorField":
        return cls(grid, np.zeros(grid.shape + (3,)))

    @classmethod
    def constant(cls, grid: Grid, value) -> "VectorField":
        data = np.empty(grid.shape + (3,))
        data[...] = np.asarray(value, dtype=np.float64)
        return cls(grid, data)

    @property
    def flat(self) -> np.ndarray:
        return self.data.reshape(-1, 3)

    def copy(self) -> "VectorField":
        return VectorField(self.grid, self.data.copy())

    def is_finite(self) -> bool:
        return bool(np.isfinite(self.data).all())

    def __sub__(self, other: "VectorField") -> "VectorField":
        return VectorField(self.grid, self.data - other.data)


@dataclass(frozen=True)
class NormTriple:
    linf: float
    l2: float
    h1: float


def node_weights(grid: Grid) -> np.ndarray:
    """Trapezoid quadrature weights (without the ``h**dim`` factor).

    Boundary nodes of a Neumann grid get 1/2 per axis they sit on.  The mirror
    ghost Laplacian is self-adjoint in the inner product these weights define.
    """
    w1 = np.ones(grid.n)
    if not grid.periodic:
        w1[0] = w1[-1] = 0.5
    if grid.dim == 1:
        return w1
    return w1[:, None, None] * w1[None, :, None] * w1[None, None, :]


def weighted_inner(u: VectorField, v: VectorField) -> float:
    w = node_weights(u.grid)
    return float(np.sum(w[..., None] * u.data * v.data)) * u.grid.h**u.grid.dim


def weighted_l2(u: VectorField) -> float:
    return np.sqrt(weighted_inner(u, u))


def _forward_differences(data: np.ndarray, axis: int, periodic: bool) -> np.ndarray:
    if periodic:
        return np.roll(data, -1, axis=axis) - data
    return np.diff(data, axis=axis)


def error_norms(e: VectorField) -> NormTriple:
    grid = e.grid
    if not e.is_finite():
        raise ValueError("error field contains non-finite values")
    vol = grid.h**grid.dim
    sq = np.sum(e.data * e.data, axis=-1)
    linf = float(np.sqrt(sq.max()))
    l2sq = vol * float(np.sum(sq))
    semi = 0.0
    for axis in range(grid.dim):
        d = _forward_differences(e.data, axis, grid.periodic) / grid.h
        semi += float(np.sum(d * d))
    return NormTriple(linf=linf, l2=np.sqrt(l2sq), h1=np.sqrt(l2sq + vol * semi))


def max_unit_norm_deviation(m: VectorField) -> float:
    return float(np.max(np.abs(np.linalg.norm(m.flat, axis=1) - 1.0)))


def exchange_energy(m: VectorField) -> float:
    """Discrete exchange energy ``h**(dim-2) * sum |m_j - m_i|**2`` over stencil pairs."""
    grid = m.grid
    total = 0.0
    for axis in range(grid.dim):
        d = _forward_differences(m.data, axis, grid.periodic)
        total += float(np.sum(d * d))
    return grid.h ** (grid.dim - 2) * total
