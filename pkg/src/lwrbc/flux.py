"""Greenshields flux for the LWR model and pointwise Riemann machinery.

Every function here accepts either Python scalars (including
``fractions.Fraction``, which keeps the arithmetic exact) or numpy arrays.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# Densities outside [0, u_max] by at most this much are clamped silently.
CLAMP_TOL = 1e-12


class DomainError(ValueError):
    """A density (or other argument) lies outside its admissible range."""


@dataclass(frozen=True)
class FluxModel:
    """Concave flux ``f(u) = u (1 - u/u_max)`` with critical density ``u_max/2``."""

    u_max: float = 1.0

    def __post_init__(self):
        if not self.u_max > 0:
            raise DomainError(f"u_max must be strictly positive, got {self.u_max}")

    @property
    def u_hat(self):
        return self.u_max / 2

    def check(self, u, name="density"):
        """Validate ``u`` against [0, u_max], clamping floating-point drift."""
        if isinstance(u, np.ndarray):
            lo, hi = u.min(initial=0.0), u.max(initial=0.0)
            if lo < -CLAMP_TOL or hi > self.u_max + CLAMP_TOL or np.isnan(u).any():
                raise DomainError(
                    f"{name} outside [0, {self.u_max}]: range [{lo}, {hi}]"
                )
            if lo < 0 or hi > self.u_max:
                return np.clip(u, 0.0, self.u_max)
            return u
        if not (-CLAMP_TOL <= u <= self.u_max + CLAMP_TOL):
            raise DomainError(f"{name}={u} outside [0, {self.u_max}]")
        if u < 0:
            return 0 * u
        if u > self.u_max:
            return self.u_max
        return u


def flux_eval(m: FluxModel, u):
    u = m.check(u)
    return u * (1 - u / m.u_max)


def flux_deriv(m: FluxModel, u):
    u = m.check(u)
    return 1 - 2 * u / m.u_max


def flux_primitive(m: FluxModel, u):
    """Antiderivative of the flux, normalised so that ``F(0) = 0``."""
    u = m.check(u)
    return u * u / 2 - u**3 / (3 * m.u_max)


def demand(m: FluxModel, u):
    """Sending function: the flux the upstream cell can emit."""
    u = m.check(u)
    if isinstance(u, np.ndarray):
        return flux_eval(m, np.minimum(u, m.u_hat))
    return flux_eval(m, min(u, m.u_hat))


def supply(m: FluxModel, u):
    """Receiving function: the flux the downstream cell can absorb."""
    u = m.check(u)
    if isinstance(u, np.ndarray):
        return flux_eval(m, np.maximum(u, m.u_hat))
    return flux_eval(m, max(u, m.u_hat))


def godunov_flux(m: FluxModel, uL, uR):
    """Godunov interface flux, in demand/supply form (exact for concave f)."""
    if isinstance(uL, np.ndarray) or isinstance(uR, np.ndarray):
        return np.minimum(demand(m, np.asarray(uL, float)), supply(m, np.asarray(uR, float)))
    return min(demand(m, uL), supply(m, uR))


def exact_riemann_sample(m: FluxModel, uL, uR, xi):
    """Entropy solution of the Riemann problem (uL, uR) at ``x/t = xi``.

    ``xi`` may be an array; ``uL``/``uR`` are scalars.
    """
    uL = m.check(uL, "uL")
    uR = m.check(uR, "uR")
    xi = np.asarray(xi, dtype=float)
    if uL == uR:
        out = np.full_like(xi, float(uL))
    elif uL < uR:
        s = (flux_eval(m, uR) - flux_eval(m, uL)) / (uR - uL)
        out = np.where(xi < s, float(uL), float(uR))
    else:
        fan = m.u_max * (1 - xi) / 2
        out = np.clip(fan, float(uR), float(uL))
    return out if out.ndim else float(out)
