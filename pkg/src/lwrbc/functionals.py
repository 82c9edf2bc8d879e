"""Lyapunov and barrier functionals, boundary-rate functions and budgets.

The boundary terms of dV/dt and -dB/dt are differences of two scalar
potentials,

    h(s) = (s - u*) f(s) - F(s)      (stability)
    m(s) = s f(s) - F(s)             (invariance)

so ``g(s, z) = h(s) - h(z)`` and ``k(s, z) = m(s) - m(z)``.  Most of the
synthesis code works with the potentials directly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .flux import DomainError, FluxModel, flux_eval, flux_primitive
from .solver import GridState


@dataclass(frozen=True)
class FunctionalParams:
    u_star: float = 1 / 3
    u_bar: float = 1 / 4
    alpha_gain: float = 0.05
    beta_gain: float = 0.5
    c_cap: float = 3e-5
    d_cap: float = math.inf

    def validate(self, m: FluxModel) -> "FunctionalParams":
        for name in ("u_star", "u_bar"):
            value = getattr(self, name)
            if not 0 <= value <= m.u_max:
                raise DomainError(f"{name}={value} outside [0, {m.u_max}]")
        for name in ("alpha_gain", "beta_gain", "c_cap", "d_cap"):
            if not getattr(self, name) > 0:
                raise DomainError(f"{name} must be positive")
        return self

    def delta(self, m: FluxModel):
        return min(self.u_star, m.u_hat)

    def gamma(self, m: FluxModel):
        return max(self.u_star, m.u_hat)


def lyapunov_v(state: GridState, p: FunctionalParams) -> float:
    return 0.5 * state.dx * float(np.sum((state.cells - p.u_star) ** 2))


def barrier_b(state: GridState, p: FunctionalParams) -> float:
    return p.u_bar**2 - state.dx * float(np.sum(state.cells**2))


def stability_potential(s, p: FunctionalParams, m: FluxModel):
    """h(s) = (s - u*) f(s) - F(s)."""
    return (s - p.u_star) * flux_eval(m, s) - flux_primitive(m, s)


def barrier_potential(s, m: FluxModel):
    """m(s) = s f(s) - F(s)."""
    return s * flux_eval(m, s) - flux_primitive(m, s)


def g_eval(s, z, p: FunctionalParams, m: FluxModel):
    return (
        (s - p.u_star) * flux_eval(m, s)
        - (z - p.u_star) * flux_eval(m, z)
        - flux_primitive(m, s)
        + flux_primitive(m, z)
    )


def k_eval(s, z, m: FluxModel):
    return (
        s * flux_eval(m, s)
        - z * flux_eval(m, z)
        - flux_primitive(m, s)
        + flux_primitive(m, z)
    )


def budget_c(v: float, p: FunctionalParams) -> float:
    """C = alpha(V) with alpha saturated-linear."""
    if v < 0:
        raise DomainError(f"Lyapunov value must be non-negative, got {v}")
    return min(p.alpha_gain * v, p.c_cap)


def budget_d(b: float, p: FunctionalParams) -> float:
    """D = beta(B); negative B keeps the linear branch (odd extension)."""
    if b < 0:
        return p.beta_gain * b
    return min(p.beta_gain * b, p.d_cap)
