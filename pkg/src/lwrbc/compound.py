"""Relaxed compound problems: stability on one boundary, invariance on the other.

The left problem asks for the smallest ``s`` in C_a such that *some* partner
``z1`` in I_b gives ``g(s, z1) <= -C`` and *some* ``z2`` in I_b gives
``k(s, z2) <= D``; the right problem is the mirror image over I_b with
partners in C_a.  Because g and k are differences of cubic potentials with
known critical points, each existential condition is an exact min over a
handful of candidate points.

The admissible sets are built in the same order as the constructive
argument: anchor and constraint-boundary roots of the stability equation
first (V1 / V3), then of the invariance equation (V2 / V4).
"""

from __future__ import annotations

from dataclasses import dataclass

from .flux import DomainError, FluxModel
from .functionals import FunctionalParams, barrier_potential, stability_potential
from .synthesis import Interval, Status, SynthesisOutcome, _same, roots_on_pieces

REPLAY_TOL = 1e-10


@dataclass(frozen=True)
class Candidate:
    value: float
    case: str
    g_partner: float
    k_partner: float
    g_residual: float
    k_residual: float


@dataclass(frozen=True)
class CompoundOutcome:
    left: SynthesisOutcome
    right: SynthesisOutcome
    margins: tuple[float | None, float | None]

    @property
    def omega_a(self):
        return self.left.value

    @property
    def omega_b(self):
        return self.right.value

    @property
    def u_set(self) -> tuple[Candidate, ...]:
        return self.left.candidates

    @property
    def w_set(self) -> tuple[Candidate, ...]:
        return self.right.candidates


def _extreme(fn, points, pick):
    vals = [(fn(x), x) for x in points]
    return pick(vals, key=lambda t: t[0])


def _ib_points(p, m):
    box = Interval.invariance_right(m)
    return [box.lo, box.clip(p.delta(m)), box.clip(p.gamma(m)), box.hi]


def _ca_points(p, m):
    box = Interval.stability_left(p, m)
    return [box.lo, box.clip(p.delta(m)), box.clip(p.gamma(m)), box.clip(m.u_hat), box.hi]


def _max_h_on_ib(p, m):
    return _extreme(lambda z: stability_potential(z, p, m), _ib_points(p, m), max)


def _max_m_on_ib(m):
    box = Interval.invariance_right(m)
    return _extreme(lambda z: barrier_potential(z, m), [box.lo, m.u_hat, box.hi], max)


def _min_h_on_ca(p, m):
    return _extreme(lambda s: stability_potential(s, p, m), _ca_points(p, m), min)


def _min_m_on_ca(p, m):
    return _extreme(lambda s: barrier_potential(s, m), _ca_points(p, m), min)


def partner_min_g_over_Ib(s, p: FunctionalParams, m: FluxModel):
    """min over z in I_b of g(s, z)."""
    s = m.check(s, "s")
    top, _ = _max_h_on_ib(p, m)
    return stability_potential(s, p, m) - top


def partner_min_k_over_Ib(s, m: FluxModel):
    """min over z in I_b of k(s, z)."""
    s = m.check(s, "s")
    top, _ = _max_m_on_ib(m)
    return barrier_potential(s, m) - top


def partner_min_g_over_Ca(z, p: FunctionalParams, m: FluxModel):
    """min over s in C_a of g(s, z)."""
    z = m.check(z, "z")
    bottom, _ = _min_h_on_ca(p, m)
    return bottom - stability_potential(z, p, m)


def partner_min_k_over_Ca(z, m: FluxModel, p: FunctionalParams | None = None):
    """min over s in C_a of k(s, z).

    C_a depends on u*, but the barrier potential is non-negative on
    [0, 3 u_max / 4], which always contains C_a, so the minimum sits at s = 0
    whatever u* is.  ``p`` only selects the candidate points.
    """
    z = m.check(z, "z")
    p = p or FunctionalParams(u_star=m.u_max / 3)
    bottom, _ = _min_m_on_ca(p, m)
    return bottom - barrier_potential(z, m)


def feasibility_margin(p: FunctionalParams, m: FluxModel):
    """Largest C for which g(s, z) <= -C has a solution in C_a x I_b."""
    top, _ = _max_h_on_ib(p, m)
    bottom, _ = _min_h_on_ca(p, m)
    return top - bottom


def _branch(p, m) -> str:
    if _same(p.u_star, m.u_hat):
        return "u*=u_hat"
    return "u*!=u_hat"


def _pick(cands: list[Candidate]) -> Candidate | None:
    # minimal norm; equal norms resolve to the smaller density
    return min(cands, key=lambda c: (c.value * c.value, c.value), default=None)


def _finish(cands, trace, anchor) -> SynthesisOutcome:
    best = _pick(cands)
    if best is None:
        return SynthesisOutcome(None, Status.INFEASIBLE, "c", None, (), tuple(trace))
    status = Status.ANCHOR if best.value == anchor else Status.BOUNDARY
    residual = max(best.g_residual, best.k_residual)
    return SynthesisOutcome(best.value, status, best.case, residual, tuple(cands), tuple(trace))


def solve_compound_left(C, D, p: FunctionalParams, m: FluxModel) -> SynthesisOutcome:
    """Smallest s in C_a admitting stability and invariance partners in I_b."""
    if C < 0:
        raise DomainError(f"C must be non-negative, got {C}")
    box = Interval.stability_left(p, m)
    h = lambda s: stability_potential(s, p, m)
    mt = lambda s: barrier_potential(s, m)
    h_top, z_g = _max_h_on_ib(p, m)
    m_top, z_k = _max_m_on_ib(m)
    g_res = lambda s: h(s) - h_top + C
    k_res = lambda s: mt(s) - m_top - D

    def candidate(s, case):
        return Candidate(float(s), case, float(z_g), float(z_k), g_res(s), k_res(s))

    branch = _branch(p, m)
    trace = [branch]
    cands: list[Candidate] = []

    # (V1) stability constraint active or slack at the anchor
    trace.append("V1a")
    if g_res(box.lo) <= 0 and k_res(box.lo) <= 0:
        cands.append(candidate(box.lo, "V1a"))
    else:
        trace.append("V1b")
        h_breaks = (p.delta(m), p.gamma(m))
        roots = roots_on_pieces(h, box.lo, box.hi, h_breaks, h_top - C)
        kept = [s for s in roots if k_res(s) <= REPLAY_TOL]
        if kept:
            cands.append(candidate(min(kept), "V1b"))
        elif not roots:
            trace.append("V1c")

    # (V2) invariance constraint active or slack at the anchor
    trace.append("V2a")
    if k_res(box.lo) <= 0 and g_res(box.lo) <= 0:
        if not any(c.value == box.lo for c in cands):
            cands.append(candidate(box.lo, "V2a"))
    else:
        trace.append("V2b")
        # k(., z) increases on [0, u_hat); only when u* > u_hat does C_a reach
        # past u_hat and admit a second root.
        roots = roots_on_pieces(mt, box.lo, box.hi, (m.u_hat,), m_top + D)
        kept = [s for s in roots if g_res(s) <= REPLAY_TOL]
        if kept:
            cands.append(candidate(min(kept), "V2b"))

    return _finish(cands, trace, box.lo)


def solve_compound_right(C, D, p: FunctionalParams, m: FluxModel) -> SynthesisOutcome:
    """Smallest z in I_b admitting stability and invariance partners in C_a."""
    if C < 0:
        raise DomainError(f"C must be non-negative, got {C}")
    box = Interval.invariance_right(m)
    h = lambda z: stability_potential(z, p, m)
    mt = lambda z: barrier_potential(z, m)
    h_bot, s_g = _min_h_on_ca(p, m)
    m_bot, s_k = _min_m_on_ca(p, m)
    g_res = lambda z: h_bot - h(z) + C
    k_res = lambda z: m_bot - mt(z) - D

    def candidate(z, case):
        return Candidate(float(z), case, float(s_g), float(s_k), g_res(z), k_res(z))

    if _same(p.u_star, m.u_hat):
        branch = "u*=u_hat"
    elif p.u_star <= m.u_max / 4:
        branch = "u*<=u_max/4"
    else:
        branch = "u_max/4<u*!=u_hat"
    trace = [branch]
    cands: list[Candidate] = []

    # (V3)
    trace.append("V3a")
    if g_res(box.lo) <= 0 and k_res(box.lo) <= 0:
        cands.append(candidate(box.lo, "V3a"))
    else:
        trace.append("V3b")
        roots = roots_on_pieces(h, box.lo, box.hi, (p.delta(m), p.gamma(m)), h_bot + C)
        kept = [z for z in roots if k_res(z) <= REPLAY_TOL]
        if kept:
            cands.append(candidate(min(kept), "V3b"))
        elif not roots:
            trace.append("V3c")

    # (V4)
    trace.append("V4a")
    if k_res(box.lo) <= 0 and g_res(box.lo) <= 0:
        if not any(c.value == box.lo for c in cands):
            cands.append(candidate(box.lo, "V4a"))
    else:
        trace.append("V4b")
        roots = roots_on_pieces(mt, box.lo, box.hi, (m.u_hat,), m_bot - D)
        kept = [z for z in roots if g_res(z) <= REPLAY_TOL]
        if kept:
            cands.append(candidate(min(kept), "V4b"))
        elif not roots:
            trace.append("V4c")

    return _finish(cands, trace, box.lo)


def solve_compound(C, D, p: FunctionalParams, m: FluxModel) -> CompoundOutcome:
    """Solve both compound problems independently and report their margins."""
    left = solve_compound_left(C, D, p, m)
    right = solve_compound_right(C, D, p, m)
    stab = None if left.value is None else partner_min_g_over_Ib(left.value, p, m) + C
    inv = None if right.value is None else partner_min_k_over_Ca(right.value, m, p) - D
    return CompoundOutcome(left, right, (stab, inv))
