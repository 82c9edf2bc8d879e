"""Shared fixtures-by-function for the test modules."""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from lwrbc import compound as co
from lwrbc import oracle as orc
from lwrbc import synthesis as sy
from lwrbc.flux import FluxModel
from lwrbc.functionals import FunctionalParams
from lwrbc.scenario import ProfileSpec

M = FluxModel(1.0)


def random_instance(rng) -> dict:
    return {
        "u_star": float(rng.uniform(0.05, 0.95)),
        "u_a": float(rng.uniform(0, 1)),
        "u_b": float(rng.uniform(0, 1)),
        "C": float(rng.uniform(0, 0.02)),
        "D": float(rng.uniform(-0.06, 0.06)),
    }


# name -> (solver call, oracle call); pair oracles run at n=1000 and compound
# partner grids at 400 points, both of which keep every critical point, so the
# feasibility verdict stays exact while runtime drops.
PAIRS = {
    "solve_stab_left": (
        lambda i, p: sy.solve_stab_left(i["u_b"], i["C"], p, M),
        lambda i, p, big: orc.oracle_stab_left(i["u_b"], i["C"], p, M),
    ),
    "solve_stab_right": (
        lambda i, p: sy.solve_stab_right(i["u_a"], i["C"], p, M),
        lambda i, p, big: orc.oracle_stab_right(i["u_a"], i["C"], p, M),
    ),
    "solve_inv_left": (
        lambda i, p: sy.solve_inv_left(i["u_b"], i["D"], M),
        lambda i, p, big: orc.oracle_inv_left(i["u_b"], i["D"], M),
    ),
    "solve_inv_right": (
        lambda i, p: sy.solve_inv_right(i["u_a"], i["D"], M),
        lambda i, p, big: orc.oracle_inv_right(i["u_a"], i["D"], M),
    ),
    "solve_stab_both": (
        lambda i, p: sy.solve_stab_both(i["C"], p, M),
        lambda i, p, big: orc.oracle_stab_both(i["C"], p, M, n=2000 if big else 1000),
    ),
    "solve_inv_both": (
        lambda i, p: sy.solve_inv_both(i["D"], M),
        lambda i, p, big: orc.oracle_inv_both(i["D"], M, n=2000 if big else 1000),
    ),
    "solve_compound_left": (
        lambda i, p: co.solve_compound_left(i["C"], i["D"], p, M),
        lambda i, p, big: orc.oracle_compound_left(
            i["C"], i["D"], p, M, n_partner=2000 if big else 400),
    ),
    "solve_compound_right": (
        lambda i, p: co.solve_compound_right(i["C"], i["D"], p, M),
        lambda i, p, big: orc.oracle_compound_right(
            i["C"], i["D"], p, M, n_partner=2000 if big else 400),
    ),
}


def objective(value) -> float:
    v = np.atleast_1d(np.asarray(value, dtype=float))
    return float(v @ v)


def compare_with_oracle(name: str, n: int, seed: int, big: bool = False):
    """Run ``n`` random instances; return (mismatches, n_feasible, solver_seconds)."""
    import time

    solve, oracle = PAIRS[name]
    rng = np.random.default_rng(seed)
    mismatches = []
    feasible = 0
    spent = 0.0
    for _ in range(n):
        inst = random_instance(rng)
        p = FunctionalParams(u_star=inst["u_star"])
        t0 = time.perf_counter()
        got = solve(inst, p)
        spent += time.perf_counter() - t0
        ref = oracle(inst, p, big)
        feasible += ref.feasible
        if got.feasible != ref.feasible:
            mismatches.append((inst, "status", got, ref))
            continue
        if not ref.feasible:
            continue
        obj = objective(got.value)
        # the solver must do at least as well as any grid point, and the
        # optimal objective must agree to 1e-3
        if obj > ref.objective + 1e-12 or abs(obj - ref.objective) > 1e-3:
            mismatches.append((inst, "value", got, ref))
    return mismatches, feasible, spent


def bisect(fn, lo, hi, target, tol=1e-12):
    """Textbook bisection, kept deliberately naive as an oracle."""
    flo = fn(lo) - target
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        fm = fn(mid) - target
        if (fm <= 0) == (flo <= 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)


def h_exact(s: Fraction, u_star=Fraction(1, 3), u_max=Fraction(1)) -> Fraction:
    f = s * (1 - s / u_max)
    F = s * s / 2 - s**3 / (3 * u_max)
    return (s - u_star) * f - F


def draw_profile(rng) -> ProfileSpec:
    """Random initial profile; used by the invariance acceptance check."""
    kind = ("constant", "sinusoid", "riemann")[rng.integers(3)]
    if kind == "constant":
        return ProfileSpec(kind="constant", value=float(rng.uniform(0, 1)))
    if kind == "sinusoid":
        c = float(rng.uniform(0, 1))
        return ProfileSpec(kind="sinusoid", offset=c,
                           amplitude=float(rng.uniform(0, min(c, 1 - c))),
                           frequency=float(rng.integers(1, 4)))
    return ProfileSpec(kind="riemann", uL=float(rng.uniform(0, 1)),
                       uR=float(rng.uniform(0, 1)), x_split=float(rng.uniform(0, 1)))


ACCEPTANCE: list[str] = []


def report(number: int, ok: bool, detail: str) -> None:
    line = f"criterion {number}: {'PASS' if ok else 'FAIL'}  {detail}"
    ACCEPTANCE.append(line)
    print(line)
