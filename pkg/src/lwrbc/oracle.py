"""Grid brute-force oracles for the synthesis problems.

These evaluate g and k directly on dense grids (no potentials, no
root-finding) so they stay independent of the solvers they check.  Each
grid also contains the interval endpoints and interior critical points, so
the feasibility verdict is exact: the extreme of each constraint over the
admissible set is always sampled.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .flux import FluxModel
from .functionals import FunctionalParams, g_eval, k_eval
from .synthesis import Interval

GRID_POINTS = 2000
PARTNER_POINTS = 2000


@dataclass(frozen=True)
class OracleResult:
    feasible: bool
    value: float | tuple[float, float] | None
    objective: float | None


def _grid(box: Interval, n: int, extra=()) -> np.ndarray:
    pts = [np.linspace(float(box.lo), float(box.hi), n)]
    pts.append(np.array([float(x) for x in extra if box.contains(x, 0.0)], dtype=float))
    return np.unique(np.concatenate(pts))


def _crit(p: FunctionalParams, m: FluxModel):
    return (p.u_star, m.u_hat, p.delta(m), p.gamma(m))


def _first(grid, mask) -> OracleResult:
    if not mask.any():
        return OracleResult(False, None, None)
    x = float(grid[np.argmax(mask)])
    return OracleResult(True, x, x * x)


def _pair(S, Z, mask) -> OracleResult:
    if not mask.any():
        return OracleResult(False, None, None)
    norm = np.where(mask, S[:, None] ** 2 + Z[None, :] ** 2, np.inf)
    i, j = np.unravel_index(np.argmin(norm), norm.shape)
    return OracleResult(True, (float(S[i]), float(Z[j])), float(norm[i, j]))


def oracle_stab_left(u_b, C, p, m, n=GRID_POINTS) -> OracleResult:
    S = _grid(Interval.stability_left(p, m), n, _crit(p, m))
    return _first(S, g_eval(S, u_b, p, m) <= -C)


def oracle_stab_right(u_a, C, p, m, n=GRID_POINTS) -> OracleResult:
    Z = _grid(Interval.stability_right(p, m), n, _crit(p, m))
    return _first(Z, g_eval(u_a, Z, p, m) <= -C)


def oracle_inv_left(u_b, D, m, n=GRID_POINTS) -> OracleResult:
    S = _grid(Interval.invariance_left(m), n, (m.u_hat,))
    return _first(S, k_eval(S, u_b, m) <= D)


def oracle_inv_right(u_a, D, m, n=GRID_POINTS) -> OracleResult:
    Z = _grid(Interval.invariance_right(m), n, (m.u_hat,))
    return _first(Z, k_eval(u_a, Z, m) <= D)


def oracle_stab_both(C, p, m, n=GRID_POINTS) -> OracleResult:
    S = _grid(Interval.stability_left(p, m), n, _crit(p, m))
    Z = _grid(Interval.stability_right(p, m), n, _crit(p, m))
    return _pair(S, Z, g_eval(S[:, None], Z[None, :], p, m) <= -C)


def oracle_inv_both(D, m, n=GRID_POINTS) -> OracleResult:
    S = _grid(Interval.invariance_left(m), n, (m.u_hat,))
    Z = _grid(Interval.invariance_right(m), n, (m.u_hat,))
    return _pair(S, Z, k_eval(S[:, None], Z[None, :], m) <= D)


def oracle_compound_left(C, D, p, m, n=GRID_POINTS, n_partner=PARTNER_POINTS) -> OracleResult:
    S = _grid(Interval.stability_left(p, m), n, _crit(p, m))
    Z = _grid(Interval.invariance_right(m), n_partner, _crit(p, m))
    g_ok = (g_eval(S[:, None], Z[None, :], p, m) <= -C).any(axis=1)
    k_ok = (k_eval(S[:, None], Z[None, :], m) <= D).any(axis=1)
    return _first(S, g_ok & k_ok)


def oracle_compound_right(C, D, p, m, n=GRID_POINTS, n_partner=PARTNER_POINTS) -> OracleResult:
    Z = _grid(Interval.invariance_right(m), n, _crit(p, m))
    S = _grid(Interval.stability_left(p, m), n_partner, _crit(p, m))
    g_ok = (g_eval(S[:, None], Z[None, :], p, m) <= -C).any(axis=0)
    k_ok = (k_eval(S[:, None], Z[None, :], m) <= D).any(axis=0)
    return _first(Z, g_ok & k_ok)


ORACLES = {
    "solve_stab_left": (oracle_stab_left, ("u_b", "C"), True),
    "solve_stab_right": (oracle_stab_right, ("u_a", "C"), True),
    "solve_inv_left": (oracle_inv_left, ("u_b", "D"), False),
    "solve_inv_right": (oracle_inv_right, ("u_a", "D"), False),
    "solve_stab_both": (oracle_stab_both, ("C",), True),
    "solve_inv_both": (oracle_inv_both, ("D",), False),
    "solve_compound_left": (oracle_compound_left, ("C", "D"), True),
    "solve_compound_right": (oracle_compound_right, ("C", "D"), True),
}


def run_oracle(solver: str, instance: dict) -> OracleResult:
    """Run the oracle for ``solver`` on a JSON-style instance.

    ``u_star`` and ``u_max`` may be given in the instance; they default to
    1/3 and 1.
    """
    if solver not in ORACLES:
        raise KeyError(f"unknown solver {solver!r}; choose from {sorted(ORACLES)}")
    fn, names, needs_params = ORACLES[solver]
    m = FluxModel(float(instance.get("u_max", 1.0)))
    p = FunctionalParams(u_star=float(instance.get("u_star", m.u_max / 3))).validate(m)
    missing = [k for k in names if k not in instance]
    if missing:
        raise KeyError(f"instance is missing {', '.join(missing)}")
    args = [float(instance[k]) for k in names]
    n = int(instance.get("n", GRID_POINTS))
    if needs_params:
        return fn(*args, p, m, n=n)
    return fn(*args, m, n=n)
