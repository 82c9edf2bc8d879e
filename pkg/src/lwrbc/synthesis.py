"""Minimum-norm boundary controls for stability or invariance.

Each problem minimises the squared boundary density subject to a single
constraint on the boundary rate.  The constraints are differences of the
potentials in :mod:`lwrbc.functionals`, whose monotone pieces are known in
closed form, so every solver is a short case analysis followed by at most
one bracketed root-find.  The two-boundary problems add a 1-D scan.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from .flux import DomainError, FluxModel
from .functionals import FunctionalParams, barrier_potential, stability_potential

ROOT_TOL = 1e-12
SCAN_POINTS = 512


class BracketError(ValueError):
    """The bracket passed to a root-finder does not straddle the target."""


class Status(str, Enum):
    ANCHOR = "optimal-at-interior-anchor"
    BOUNDARY = "optimal-at-constraint-boundary"
    INFEASIBLE = "infeasible"


@dataclass(frozen=True)
class Interval:
    lo: float
    hi: float

    def __post_init__(self):
        if self.lo > self.hi:
            raise DomainError(f"empty interval [{self.lo}, {self.hi}]")

    def contains(self, x, tol=1e-12) -> bool:
        return self.lo - tol <= x <= self.hi + tol

    def clip(self, x):
        return min(max(x, self.lo), self.hi)

    @classmethod
    def stability_left(cls, p: FunctionalParams, m: FluxModel) -> "Interval":
        return cls(0 * m.u_max, (2 * p.u_star + m.u_max) / 4)

    @classmethod
    def stability_right(cls, p: FunctionalParams, m: FluxModel) -> "Interval":
        return cls((2 * p.u_star + m.u_max) / 4, m.u_max)

    @classmethod
    def invariance_left(cls, m: FluxModel) -> "Interval":
        return cls(0 * m.u_max, m.u_max / 4)

    @classmethod
    def invariance_right(cls, m: FluxModel) -> "Interval":
        return cls(m.u_max / 4, m.u_max)


@dataclass(frozen=True)
class SynthesisOutcome:
    """Result of one boundary-control problem.

    ``residual`` is constraint-lhs minus constraint-rhs at ``value`` (so it is
    non-positive up to round-off when feasible).  Compound solvers also fill
    ``candidates`` (the materialised admissible set) and ``trace`` (the case
    tests in the order they were run).
    """

    value: float | tuple[float, float] | None
    status: Status
    case_label: str
    residual: float | None = None
    candidates: tuple = ()
    trace: tuple[str, ...] = field(default=())

    @property
    def feasible(self) -> bool:
        return self.status is not Status.INFEASIBLE


def root_on_monotone(
    fn: Callable[[float], float],
    bracket: Interval,
    target: float,
    tol: float = ROOT_TOL,
) -> float:
    """Solve ``fn(x) = target`` on a bracket where ``fn`` is monotone."""
    lo, hi = float(bracket.lo), float(bracket.hi)
    flo, fhi = fn(lo) - target, fn(hi) - target
    if flo == 0:
        return lo
    if fhi == 0:
        return hi
    if flo * fhi > 0:
        raise BracketError(
            f"bracket [{lo}, {hi}] does not straddle {target}: "
            f"values {flo + target}, {fhi + target}"
        )
    return brentq(lambda x: fn(x) - target, lo, hi, xtol=tol, rtol=4 * np.finfo(float).eps)


def _pieces(lo, hi, breaks: Sequence) -> list[tuple[float, float]]:
    pts = sorted({float(lo), float(hi), *(float(b) for b in breaks if lo < b < hi)})
    return list(zip(pts[:-1], pts[1:])) or [(float(lo), float(hi))]


def roots_on_pieces(fn, lo, hi, breaks, level, tol=ROOT_TOL) -> list[float]:
    """All roots of ``fn = level`` on [lo, hi], with ``fn`` monotone between breaks."""
    roots: list[float] = []
    for x0, x1 in _pieces(lo, hi, breaks):
        f0, f1 = fn(x0) - level, fn(x1) - level
        if f0 * f1 <= 0:
            r = root_on_monotone(fn, Interval(x0, x1), level, tol)
            if not roots or abs(r - roots[-1]) > 10 * tol:
                roots.append(r)
    return roots


def _same(x, y) -> bool:
    return math.isclose(x, y, rel_tol=0.0, abs_tol=1e-14)


def solve_stab_left(u_b, C, p: FunctionalParams, m: FluxModel) -> SynthesisOutcome:
    """min w^2 over C_a subject to g(w, u_b) <= -C."""
    u_b = m.check(u_b, "u_b")
    if C < 0:
        raise DomainError(f"C must be non-negative, got {C}")
    h = lambda s: stability_potential(s, p, m)
    hb = h(u_b)
    pfun = lambda s: h(s) - hb
    box = Interval.stability_left(p, m)
    # with u* = u_hat the valley of p collapses onto the right end of C_a
    valley = box.hi if _same(p.u_star, m.u_hat) else p.delta(m)
    if pfun(box.lo) <= -C:
        return SynthesisOutcome(box.lo, Status.ANCHOR, "a", pfun(box.lo) + C)
    if pfun(valley) <= -C:
        s = root_on_monotone(h, Interval(box.lo, valley), hb - C)
        return SynthesisOutcome(s, Status.BOUNDARY, "b", pfun(s) + C)
    return SynthesisOutcome(None, Status.INFEASIBLE, "c", pfun(valley) + C)


def solve_stab_right(u_a, C, p: FunctionalParams, m: FluxModel) -> SynthesisOutcome:
    """min w^2 over C_b subject to g(u_a, w) <= -C."""
    u_a = m.check(u_a, "u_a")
    if C < 0:
        raise DomainError(f"C must be non-negative, got {C}")
    h = lambda z: stability_potential(z, p, m)
    ha = h(u_a)
    q = lambda z: ha - h(z)
    box = Interval.stability_right(p, m)
    if q(box.lo) <= -C:
        return SynthesisOutcome(box.lo, Status.ANCHOR, "a", q(box.lo) + C)
    if _same(p.u_star, m.u_hat):
        # q is nondecreasing on C_b: nothing beyond the anchor can help
        return SynthesisOutcome(None, Status.INFEASIBLE, "b", q(box.lo) + C)
    peak = p.gamma(m)
    if q(peak) <= -C:
        z = root_on_monotone(h, Interval(box.lo, peak), ha + C)
        return SynthesisOutcome(z, Status.BOUNDARY, "b", q(z) + C)
    return SynthesisOutcome(None, Status.INFEASIBLE, "c", q(peak) + C)


def solve_inv_left(u_b, D, m: FluxModel) -> SynthesisOutcome:
    """min w^2 over I_a subject to k(w, u_b) <= D."""
    u_b = m.check(u_b, "u_b")
    ell0 = barrier_potential(0.0, m) - barrier_potential(u_b, m)
    if ell0 <= D:
        return SynthesisOutcome(0.0, Status.ANCHOR, "a", ell0 - D)
    return SynthesisOutcome(None, Status.INFEASIBLE, "c", ell0 - D)


def solve_inv_right(u_a, D, m: FluxModel) -> SynthesisOutcome:
    """min w^2 over I_b subject to k(u_a, w) <= D."""
    u_a = m.check(u_a, "u_a")
    mt = lambda z: barrier_potential(z, m)
    ma = mt(u_a)
    rho = lambda z: ma - mt(z)
    box = Interval.invariance_right(m)
    if rho(box.lo) <= D:
        return SynthesisOutcome(box.lo, Status.ANCHOR, "a", rho(box.lo) - D)
    if rho(m.u_hat) <= D:
        z = root_on_monotone(mt, Interval(box.lo, m.u_hat), ma - D)
        return SynthesisOutcome(z, Status.BOUNDARY, "b", rho(z) - D)
    return SynthesisOutcome(None, Status.INFEASIBLE, "c", rho(m.u_hat) - D)


def _min_norm_pair(
    P: Callable,
    s_box: Interval,
    s_breaks: Sequence,
    Q: Callable,
    z_box: Interval,
    z_peak: float,
    shift: float,
    scan: int,
) -> SynthesisOutcome:
    """min s^2 + z^2 subject to P(s) - Q(z) <= shift.

    Q must increase on [z_box.lo, z_peak] and decrease afterwards, so for a
    given s the admissible z form an interval whose left end is found by a
    single root-find.
    """
    residual = lambda s, z: P(s) - Q(z) - shift
    if residual(s_box.lo, z_box.lo) <= 0:
        pair = (float(s_box.lo), float(z_box.lo))
        return SynthesisOutcome(pair, Status.ANCHOR, "a", residual(*pair))

    q_top = Q(z_peak)

    def z_min(s):
        level = P(s) - shift
        if Q(z_box.lo) >= level:
            return float(z_box.lo)
        if q_top < level:
            return None
        return root_on_monotone(Q, Interval(z_box.lo, z_peak), level)

    # s admissible iff P(s) <= Q(z_peak) + shift: the edges of that set are
    # roots of P on its monotone pieces and must be in the scan.
    edges = roots_on_pieces(P, s_box.lo, s_box.hi, s_breaks, q_top + shift)
    grid = np.unique(np.concatenate([
        np.linspace(float(s_box.lo), float(s_box.hi), scan),
        np.asarray(edges, dtype=float),
        np.asarray([b for b in s_breaks if s_box.contains(b, 0.0)], dtype=float),
    ]))
    feasible = [(s, z) for s in grid if (z := z_min(s)) is not None]
    if not feasible:
        worst = min(P(s) for s in grid) - q_top - shift
        return SynthesisOutcome(None, Status.INFEASIBLE, "c", worst)

    norms = [s * s + z * z for s, z in feasible]
    i = int(np.argmin(norms))
    best_s, best_z = feasible[i]
    best = norms[i]

    # local refinement between the neighbouring feasible scan points
    lo_s = feasible[max(i - 1, 0)][0]
    hi_s = feasible[min(i + 1, len(feasible) - 1)][0]
    if hi_s > lo_s:
        def objective(s):
            z = z_min(s)
            return math.inf if z is None else s * s + z * z

        res = minimize_scalar(objective, bounds=(lo_s, hi_s), method="bounded",
                              options={"xatol": 1e-12})
        if res.fun < best - 1e-15:
            best_s, best_z = float(res.x), z_min(float(res.x))
    pair = (float(best_s), float(best_z))
    return SynthesisOutcome(pair, Status.BOUNDARY, "b", residual(*pair))


def solve_stab_both(C, p: FunctionalParams, m: FluxModel, scan: int = SCAN_POINTS) -> SynthesisOutcome:
    """min wa^2 + wb^2 over C_a x C_b subject to g(wa, wb) <= -C."""
    if C < 0:
        raise DomainError(f"C must be non-negative, got {C}")
    h = lambda s: stability_potential(s, p, m)
    return _min_norm_pair(
        h, Interval.stability_left(p, m), (p.delta(m), p.gamma(m)),
        h, Interval.stability_right(p, m), p.gamma(m),
        -C, scan,
    )


def solve_inv_both(D, m: FluxModel, scan: int = SCAN_POINTS) -> SynthesisOutcome:
    """min wa^2 + wb^2 over I_a x I_b subject to k(wa, wb) <= D."""
    mt = lambda s: barrier_potential(s, m)
    return _min_norm_pair(
        mt, Interval.invariance_left(m), (m.u_hat,),
        mt, Interval.invariance_right(m), m.u_hat,
        D, scan,
    )
