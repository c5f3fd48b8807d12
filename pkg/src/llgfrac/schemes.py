"""Time integrators for ``m_t = -m x Lap m - alpha m x (m x Lap m) + f``.

All four schemes finish each step with a per-node solve of the form
``(I + K(dt/2 * H)) m' = rhs``.  For the explicit-regularised, fractional and
midpoint schemes the right-hand side is ``(I - K) m`` (plus ``dt*f``), which is a
Cayley rotation and keeps ``|m_i|`` fixed when unforced.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Callable, Optional, Union

import numpy as np

from . import _backend
from .errors import NonFiniteError, PicardError, StepError, LLGError
from .grid_field import VectorField, exchange_energy, max_unit_norm_deviation
from .nodal import cross, solve3_cramer
from .operators import HelmholtzOptions, helmholtz_array, laplacian_array


class SchemeKind(str, enum.Enum):
    EXPLICIT_REGULARIZED = "explicit"
    FRACTIONAL_GS = "fractional"
    CN_MIDPOINT = "cn-midpoint"
    CN_TRAPEZOIDAL = "cn-trapezoidal"


@dataclass(frozen=True)
class SchemeConfig:
    kind: SchemeKind
    dt: float
    alpha: float = 0.0
    picard_tol: float = 1e-12
    picard_max: int = 200
    helmholtz: HelmholtzOptions = field(default_factory=HelmholtzOptions)

    def __post_init__(self):
        object.__setattr__(self, "kind", SchemeKind(self.kind))
        if not self.dt > 0:
            raise ValueError(f"dt must be positive, got {self.dt}")
        if not self.alpha >= 0:
            raise ValueError(f"alpha must be non-negative, got {self.alpha}")


@dataclass(frozen=True)
class StepDiagnostics:
    norm_deviation: float
    energy: float
    picard_iters: Optional[int] = None


@dataclass
class DampedCoeffs:
    """Effective field ``h = Lap g + alpha m x Lap g`` and stage RHS ``b = (I - K(dt/2 h)) m + dt f``."""

    h: np.ndarray
    b: np.ndarray


def damped_coeffs(m: np.ndarray, lap_g: np.ndarray, alpha: float, dt: float,
                  f: np.ndarray | None = None) -> DampedCoeffs:
    h = lap_g + alpha * cross(m, lap_g) if alpha != 0.0 else lap_g.copy()
    b = m - 0.5 * dt * cross(m, h)
    if f is not None:
        b += dt * f
    return DampedCoeffs(h=h, b=b)


Forcing = Union[VectorField, np.ndarray, None]


def _forcing_array(f: Forcing) -> np.ndarray | None:
    if f is None:
        return None
    return f.data if isinstance(f, VectorField) else np.asarray(f, dtype=np.float64)


def _finish(m: VectorField, data: np.ndarray, picard_iters=None):
    out = VectorField(m.grid, data)
    if not out.is_finite():
        raise NonFiniteError("step produced non-finite values")
    diag = StepDiagnostics(
        norm_deviation=max_unit_norm_deviation(out),
        energy=exchange_energy(out),
        picard_iters=picard_iters,
    )
    return out, diag


def _regularised_lap(data: np.ndarray, m: VectorField, cfg: SchemeConfig) -> np.ndarray:
    g = helmholtz_array(data, m.grid, cfg.dt, cfg.helmholtz)
    return laplacian_array(g, m.grid)


def step_explicit_regularized(m: VectorField, cfg: SchemeConfig, f: Forcing = None):
    """Cayley step with the field ``Lap g^n``, ``g^n = (I - dt Lap)^{-1} m^n``, all at time n."""
    fa = _forcing_array(f)
    lg = _regularised_lap(m.data, m, cfg)
    c = damped_coeffs(m.data, lg, cfg.alpha, cfg.dt, fa)
    return _finish(m, solve3_cramer(0.5 * cfg.dt * c.h, c.b))


def fractional_step_array(m: VectorField, cfg: SchemeConfig, f: np.ndarray | None) -> np.ndarray:
    """Three-stage Gauss-Seidel update, composed from the generic operators."""
    beta = 0.5 * cfg.dt
    alpha = cfg.alpha
    md = m.data
    lg = _regularised_lap(md, m, cfg)

    # stage 1: only row 1 is coupled; rows 2, 3 copy the RHS
    s1 = damped_coeffs(md, lg, alpha, cfg.dt, f)
    h2, h3 = s1.h[..., 1], s1.h[..., 2]
    b = s1.b
    x1 = b[..., 0] - beta * h3 * b[..., 1] + beta * h2 * b[..., 2]
    lg_a = lg.copy()
    lg_a[..., 0] = _regularised_lap(x1[..., None], m, cfg)[..., 0]

    # stage 2: refreshed g1 enters the RHS and the (2, 3) entry; h2, h3 keep g^n
    s2 = damped_coeffs(md, lg_a, alpha, cfg.dt, f)
    b = s2.b
    x3 = b[..., 2]
    r1 = b[..., 0] + beta * h2 * x3
    r2 = b[..., 1] - beta * s2.h[..., 0] * x3
    x2 = (r2 + beta * h3 * r1) / (1.0 + (beta * h3) ** 2)
    lg_b = lg_a
    lg_b[..., 1] = _regularised_lap(x2[..., None], m, cfg)[..., 0]

    # stage 3: Cayley form with (g1^{n+1}, g2^{n+1}, g3^n)
    s3 = damped_coeffs(md, lg_b, alpha, cfg.dt, f)
    return solve3_cramer(beta * s3.h, s3.b)


def step_fractional(m: VectorField, cfg: SchemeConfig, f: Forcing = None):
    fa = _forcing_array(f)
    fused = getattr(_backend.kernels, "fractional_step_1d", None)
    if fused is not None and m.grid.dim == 1:
        data = fused(m.data, cfg.dt, cfg.alpha, m.grid.h, m.grid.periodic, fa)
    else:
        data = fractional_step_array(m, cfg, fa)
    return _finish(m, data)


def _picard(m: VectorField, cfg: SchemeConfig, update: Callable[[np.ndarray], np.ndarray]):
    current = m.data
    diff = np.inf
    for it in range(1, cfg.picard_max + 1):
        new = update(current)
        diff = float(np.max(np.abs(new - current)))
        current = new
        if not np.isfinite(diff):
            break
        if diff <= cfg.picard_tol:
            return current, it
    raise PicardError(f"Picard iteration did not converge in {cfg.picard_max} sweeps", residual=diff)


def step_cn_midpoint(m: VectorField, cfg: SchemeConfig, f: Forcing = None):
    """Implicit midpoint rule; the field ``Lap((m_hat + m)/2)`` is frozen at the latest iterate."""
    fa = _forcing_array(f)
    beta = 0.5 * cfg.dt

    def update(mh):
        mbar = 0.5 * (mh + m.data)
        c = damped_coeffs(mbar, laplacian_array(mbar, m.grid), cfg.alpha, cfg.dt)
        rhs = m.data - beta * cross(m.data, c.h)
        if fa is not None:
            rhs += cfg.dt * fa
        return solve3_cramer(beta * c.h, rhs)

    data, iters = _picard(m, cfg, update)
    return _finish(m, data, iters)


def step_cn_trapezoidal(m: VectorField, cfg: SchemeConfig, f: Forcing = None):
    """Trapezoidal CN ``m' + dt/2 T(m') = m - dt/2 T(m)`` with the torque T(m) = m x H(m).

    The implicit torque uses the neighbour-sum Laplacian: the centre terms of
    the stencil drop out of ``m_i x Lap m_i``.
    """
    fa = _forcing_array(f)
    beta = 0.5 * cfg.dt
    grid = m.grid
    explicit = damped_coeffs(m.data, laplacian_array(m.data, grid), cfg.alpha, cfg.dt, fa).b
    shift = 2.0 * grid.dim / grid.h**2

    def update(mh):
        lt = laplacian_array(mh, grid) + shift * mh
        h = lt + cfg.alpha * cross(mh, lt) if cfg.alpha != 0.0 else lt
        return solve3_cramer(beta * h, explicit)

    data, iters = _picard(m, cfg, update)
    return _finish(m, data, iters)


STEPPERS = {
    SchemeKind.EXPLICIT_REGULARIZED: step_explicit_regularized,
    SchemeKind.FRACTIONAL_GS: step_fractional,
    SchemeKind.CN_MIDPOINT: step_cn_midpoint,
    SchemeKind.CN_TRAPEZOIDAL: step_cn_trapezoidal,
}


def step(m: VectorField, cfg: SchemeConfig, f: Forcing = None):
    return STEPPERS[cfg.kind](m, cfg, f)


def integrate(m0: VectorField, cfg: SchemeConfig, n_steps: int,
              forcing: Callable[[float], Forcing] | None = None,
              forcing_offset: float = 0.5):
    """Advance ``n_steps`` steps from t = 0.

    Forcing is sampled at ``(n + forcing_offset) * dt``; the default 0.5 is the
    step midpoint.  ``forcing_offset=0`` samples at the left end of each step.
    Returns the final field and the list of per-step diagnostics.
    """
    if n_steps < 0:
        raise ValueError("n_steps must be non-negative")
    stepper = STEPPERS[cfg.kind]
    m = m0
    history = []
    for n in range(n_steps):
        f = forcing((n + forcing_offset) * cfg.dt) if forcing is not None else None
        try:
            m, diag = stepper(m, cfg, f)
        except LLGError as exc:
            raise StepError(n, exc) from exc
        history.append(diag)
    return m, history
