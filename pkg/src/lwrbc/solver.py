"""First-order Godunov finite-volume integrator with weak boundary data.

Boundary values enter through ghost cells, so each boundary interface is a
Riemann problem between the commanded density and the adjacent cell.  The
density actually attained at the boundary can therefore differ from the
commanded one (e.g. a free outflow ignores a low downstream command).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable

import numpy as np

from .flux import CLAMP_TOL, DomainError, FluxModel, flux_deriv, godunov_flux

DEFAULT_CFL = 0.9
WAVE_SPEED_FLOOR = 1e-12


class IntegrationError(RuntimeError):
    pass


@dataclass(frozen=True)
class BoundaryData:
    omega_a: float
    omega_b: float


@dataclass(frozen=True, eq=False)
class GridState:
    """Cell averages of density on a uniform grid over [a, b]."""

    a: float
    b: float
    cells: np.ndarray
    time: float = 0.0

    def __post_init__(self):
        if not self.b > self.a:
            raise DomainError(f"need a < b, got a={self.a}, b={self.b}")
        if self.cells.ndim != 1 or self.cells.size < 2:
            raise DomainError("need at least two cells")

    @property
    def n_cells(self) -> int:
        return self.cells.size

    @property
    def dx(self) -> float:
        return (self.b - self.a) / self.n_cells

    @property
    def centers(self) -> np.ndarray:
        return self.a + (np.arange(self.n_cells) + 0.5) * self.dx


def init_from_profile(
    m: FluxModel, a: float, b: float, n_cells: int, profile: Callable
) -> GridState:
    """Sample ``profile`` at cell midpoints.  ``profile`` must accept arrays."""
    if n_cells < 2:
        raise DomainError(f"n_cells must be >= 2, got {n_cells}")
    dx = (b - a) / n_cells
    x = a + (np.arange(n_cells) + 0.5) * dx
    cells = np.asarray(profile(x), dtype=float) * np.ones(n_cells)
    cells = m.check(cells, "initial profile")
    return GridState(a, b, cells.copy(), 0.0)


def max_wave_speed(m: FluxModel, state: GridState, bd: BoundaryData) -> float:
    speeds = np.abs(flux_deriv(m, state.cells))
    edge = max(abs(flux_deriv(m, bd.omega_a)), abs(flux_deriv(m, bd.omega_b)))
    return max(float(speeds.max()), float(edge))


def cfl_dt(
    m: FluxModel,
    state: GridState,
    bd: BoundaryData,
    cfl: float = DEFAULT_CFL,
    dt_max: float = math.inf,
) -> float:
    if not 0 < cfl <= 1:
        raise DomainError(f"cfl must lie in (0, 1], got {cfl}")
    speed = max(max_wave_speed(m, state, bd), WAVE_SPEED_FLOOR)
    return min(cfl * state.dx / speed, dt_max)


def interface_fluxes(m: FluxModel, state: GridState, bd: BoundaryData) -> np.ndarray:
    """All n+1 interface fluxes, including the two boundary interfaces."""
    padded = np.empty(state.n_cells + 2)
    padded[0] = m.check(bd.omega_a, "omega_a")
    padded[-1] = m.check(bd.omega_b, "omega_b")
    padded[1:-1] = state.cells
    return godunov_flux(m, padded[:-1], padded[1:])


def step(m: FluxModel, state: GridState, bd: BoundaryData, dt: float) -> GridState:
    """One conservative Godunov update of length ``dt``."""
    if dt <= 0:
        raise IntegrationError(f"non-positive time step {dt}")
    limit = state.dx / max(max_wave_speed(m, state, bd), WAVE_SPEED_FLOOR)
    if dt > limit * (1 + 1e-12):
        raise IntegrationError(f"CFL violated: dt={dt} > dx/max|f'|={limit}")
    fluxes = interface_fluxes(m, state, bd)
    cells = state.cells - (dt / state.dx) * np.diff(fluxes)
    lo, hi = cells.min(), cells.max()
    if lo < -CLAMP_TOL or hi > m.u_max + CLAMP_TOL:
        raise IntegrationError(f"maximum principle violated: range [{lo}, {hi}]")
    if lo < 0 or hi > m.u_max:
        cells = np.clip(cells, 0.0, m.u_max)
    return replace(state, cells=cells, time=state.time + dt)


def advance_interval(
    m: FluxModel,
    state: GridState,
    bd: BoundaryData,
    horizon: float,
    cfl: float = DEFAULT_CFL,
    dt_max: float = math.inf,
    on_step: Callable | None = None,
) -> GridState:
    """Integrate over ``horizon`` with boundary data held constant.

    ``on_step(old, new, dt, fluxes)`` is called after every substep, which
    lets callers audit mass balance without recomputing fluxes.
    """
    if horizon <= 0:
        raise DomainError(f"horizon must be positive, got {horizon}")
    t_end = state.time + horizon
    elapsed = 0.0
    while elapsed < horizon:
        dt = cfl_dt(m, state, bd, cfl, dt_max)
        last = elapsed + dt >= horizon * (1 - 1e-14)
        if last:
            dt = horizon - elapsed
        fluxes = interface_fluxes(m, state, bd) if on_step else None
        new = step(m, state, bd, dt)
        if on_step:
            on_step(state, new, dt, fluxes)
        state = new
        elapsed = horizon if last else elapsed + dt
    return replace(state, time=t_end)


def boundary_traces(state: GridState) -> tuple[float, float]:
    return float(state.cells[0]), float(state.cells[-1])


def total_mass(state: GridState) -> float:
    return state.dx * float(np.sum(state.cells))
