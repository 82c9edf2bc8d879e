"""Closed-loop scenarios: synthesise boundary controls, integrate, log.

At every control period the runner reads the boundary traces, evaluates the
functionals and budgets, asks the mode's solver(s) for boundary densities,
and holds them constant while the PDE is integrated over the period.
"""

from __future__ import annotations

import json
import logging
import math
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path
from typing import Callable

import numpy as np

from .compound import (
    partner_min_g_over_Ca,
    partner_min_g_over_Ib,
    partner_min_k_over_Ca,
    partner_min_k_over_Ib,
    solve_compound_left,
    solve_compound_right,
)
from .flux import DomainError, FluxModel
from .functionals import (
    FunctionalParams,
    barrier_b,
    budget_c,
    budget_d,
    g_eval,
    k_eval,
    lyapunov_v,
)
from .synthesis import (
    Interval,
    SynthesisOutcome,
    solve_inv_both,
    solve_inv_left,
    solve_inv_right,
    solve_stab_both,
    solve_stab_left,
    solve_stab_right,
)
from .solver import (
    BoundaryData,
    GridState,
    advance_interval,
    boundary_traces,
    init_from_profile,
    total_mass,
)

log = logging.getLogger(__name__)

MODES = (
    "uncontrolled",
    "stability-left",
    "stability-right",
    "stability-both",
    "invariance-left",
    "invariance-right",
    "invariance-both",
    "compound",
)
FALLBACKS = ("hold-previous", "best-effort", "error")
PROFILE_KINDS = ("constant", "sinusoid", "riemann")
DEFAULT_SNAPSHOTS = (0.3, 1.5, 3.0, 4.5, 15.0, 30.0)
BEST_EFFORT_POINTS = 2001


class ConfigError(ValueError):
    """Invalid scenario configuration; the message names the field."""


class SynthesisFailure(RuntimeError):
    def __init__(self, step: int, time: float, which: str):
        super().__init__(f"{which} synthesis infeasible at control step {step} (t={time:g})")
        self.step = step


@dataclass(frozen=True)
class ProfileSpec:
    kind: str = "sinusoid"
    value: float = 1 / 3
    offset: float | None = None  # sinusoid offset; None means u_star
    amplitude: float = 0.2
    frequency: float = 1.0
    uL: float = 0.1
    uR: float = 0.8
    x_split: float = 0.5

    def build(self, u_star: float) -> Callable[[np.ndarray], np.ndarray]:
        if self.kind == "constant":
            return lambda x: np.full_like(x, self.value)
        if self.kind == "sinusoid":
            c = u_star if self.offset is None else self.offset
            return lambda x: c + self.amplitude * np.sin(2 * np.pi * self.frequency * x)
        return lambda x: np.where(x < self.x_split, self.uL, self.uR)


@dataclass(frozen=True)
class ScenarioConfig:
    a: float = 0.0
    b: float = 1.0
    u_max: float = 1.0
    n_cells: int = 200
    t_final: float = 30.0
    control_dt: float = 0.015
    cfl: float = 0.9
    dt_max: float | None = None  # defaults to control_dt
    mode: str = "stability-left"
    u_star: float = 1 / 3
    u_bar: float = 1 / 4
    alpha_gain: float = 0.05
    beta_gain: float = 0.5
    c_cap: float = 3e-5
    d_cap: float = math.inf
    initial: ProfileSpec = field(default_factory=ProfileSpec)
    fallback: str = "best-effort"
    snapshot_times: tuple[float, ...] = DEFAULT_SNAPSHOTS
    out_dir: str | None = None
    prefix: str = "lwr"
    seed: int = 0

    @property
    def flux(self) -> FluxModel:
        return FluxModel(self.u_max)

    @property
    def params(self) -> FunctionalParams:
        return FunctionalParams(
            self.u_star, self.u_bar, self.alpha_gain, self.beta_gain, self.c_cap, self.d_cap
        )

    @property
    def n_steps(self) -> int:
        return int(round(self.t_final / self.control_dt))

    def validate(self) -> "ScenarioConfig":
        def need(ok, name, msg):
            if not ok:
                raise ConfigError(f"{name}: {msg}")

        need(self.b > self.a, "b", f"must exceed a={self.a}")
        need(self.u_max > 0, "u_max", "must be positive")
        need(self.n_cells >= 2, "n_cells", "must be at least 2")
        need(self.t_final > 0, "t_final", "must be positive")
        need(self.control_dt > 0, "control_dt", "must be positive")
        need(
            math.isclose(self.n_steps * self.control_dt, self.t_final, rel_tol=1e-9),
            "t_final", f"must be a whole number of control periods ({self.control_dt})",
        )
        need(0 < self.cfl <= 1, "cfl", "must lie in (0, 1]")
        need(self.dt_max is None or self.dt_max > 0, "dt_max", "must be positive")
        need(self.mode in MODES, "mode", f"must be one of {', '.join(MODES)}")
        need(self.fallback in FALLBACKS, "fallback", f"must be one of {', '.join(FALLBACKS)}")
        for name in ("u_star", "u_bar"):
            v = getattr(self, name)
            need(0 <= v <= self.u_max, name, f"{v} outside [0, u_max={self.u_max}]")
        for name in ("alpha_gain", "beta_gain", "c_cap", "d_cap"):
            need(getattr(self, name) > 0, name, "must be positive")
        prof = self.initial
        need(prof.kind in PROFILE_KINDS, "initial.kind", f"must be one of {', '.join(PROFILE_KINDS)}")
        need(all(t >= 0 for t in self.snapshot_times), "snapshot_times", "must be non-negative")
        try:
            init_from_profile(self.flux, self.a, self.b, self.n_cells, prof.build(self.u_star))
        except DomainError as exc:
            raise ConfigError(f"initial: {exc}") from None
        return self



def config_from_dict(data: dict) -> ScenarioConfig:
    """Build and validate a config from parsed JSON; omitted fields keep defaults."""
    if not isinstance(data, dict):
        raise ConfigError("config: top level must be a JSON object")
    kwargs = {}
    known = {f.name: f for f in fields(ScenarioConfig)}
    for key, value in data.items():
        if key not in known:
            raise ConfigError(f"{key}: unknown field")
        if key == "initial":
            if not isinstance(value, dict):
                raise ConfigError("initial: must be an object")
            pknown = {f.name for f in fields(ProfileSpec)}
            for pk in value:
                if pk not in pknown:
                    raise ConfigError(f"initial.{pk}: unknown field")
            try:
                kwargs[key] = ProfileSpec(**{
                    k: (v if k == "kind" or v is None else float(v)) for k, v in value.items()
                })
            except (TypeError, ValueError) as exc:
                raise ConfigError(f"initial: {exc}") from None
            continue
        kwargs[key] = _coerce(key, known[key].default, value)
    return ScenarioConfig(**kwargs).validate()


def _coerce(key, default, value):
    try:
        if key in ("mode", "fallback", "prefix"):
            if not isinstance(value, str):
                raise TypeError("expected a string")
            return value
        if key == "out_dir":
            return None if value is None else str(value)
        if key == "snapshot_times":
            return tuple(float(t) for t in value)
        if key in ("n_cells", "seed"):
            if isinstance(value, bool) or int(value) != value:
                raise TypeError("expected an integer")
            return int(value)
        if value is None and key in ("d_cap", "c_cap"):
            return math.inf
        if value is None and key == "dt_max":
            return None
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise TypeError("expected a number")
        return float(value)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{key}: {exc}") from None


def load_config(path) -> ScenarioConfig:
    path = Path(path)
    text = path.read_text()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: parse error at line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    return config_from_dict(data)


def config_to_dict(cfg: ScenarioConfig) -> dict:
    d = asdict(cfg)
    d["snapshot_times"] = list(cfg.snapshot_times)
    for key in ("c_cap", "d_cap"):
        if math.isinf(d[key]):
            d[key] = None
    return d


@dataclass(frozen=True)
class TimeSeriesRecord:
    time: float
    V: float
    B: float
    C: float
    D: float
    omega_a: float
    omega_b: float
    trace_a: float
    trace_b: float
    feasible_a: int
    feasible_b: int
    mass: float


@dataclass
class RunResult:
    config: ScenarioConfig
    records: list[TimeSeriesRecord]
    snapshots: dict[float, tuple[np.ndarray, np.ndarray]]
    initial_state: GridState
    final_state: GridState
    boundary_flux_integral: float
    fallback_steps: int = 0
    negative_budget_steps: int = 0

    def column(self, name: str) -> np.ndarray:
        return np.array([getattr(r, name) for r in self.records])


def _argmin_violation(grid: np.ndarray, violation: np.ndarray) -> float:
    # first index wins ties, and the grid is ascending: smallest density
    return float(grid[int(np.argmin(np.maximum(violation, 0.0)))])


def _grid(box: Interval, *extra) -> np.ndarray:
    pts = np.linspace(float(box.lo), float(box.hi), BEST_EFFORT_POINTS)
    more = [float(x) for x in extra if box.contains(x, 0.0)]
    return np.unique(np.concatenate([pts, more]))


class _Controller:
    """Mode dispatch plus fallback handling for one run."""

    def __init__(self, cfg: ScenarioConfig, initial_traces):
        self.cfg = cfg
        self.m = cfg.flux
        self.p = cfg.params
        self.last = list(initial_traces)
        self.crit = (self.p.u_star, self.m.u_hat, self.p.delta(self.m), self.p.gamma(self.m))

    def _resolve(self, side: int, outcome: SynthesisOutcome, best_effort, step, t) -> tuple[float, bool]:
        if outcome.feasible:
            self.last[side] = float(outcome.value)
            return self.last[side], True
        policy = self.cfg.fallback
        if policy == "error":
            raise SynthesisFailure(step, t, "left" if side == 0 else "right")
        if policy == "best-effort":
            self.last[side] = best_effort()
        return self.last[side], False

    def _resolve_pair(self, outcome, best_effort, step, t):
        if outcome.feasible:
            self.last = [float(v) for v in outcome.value]
            return tuple(self.last), True
        if self.cfg.fallback == "error":
            raise SynthesisFailure(step, t, "two-boundary")
        if self.cfg.fallback == "best-effort":
            self.last = list(best_effort())
        return tuple(self.last), False

    def decide(self, traces, C, D, step, t):
        """Return ((omega_a, omega_b), (feasible_a, feasible_b))."""
        m, p, mode = self.m, self.p, self.cfg.mode
        ta, tb = traces
        if mode == "uncontrolled":
            return tuple(self.last), (True, True)

        if mode == "stability-left":
            box = Interval.stability_left(p, m)
            wa, ok = self._resolve(0, solve_stab_left(tb, C, p, m), lambda: _argmin_violation(
                S := _grid(box, *self.crit), g_eval(S, tb, p, m) + C), step, t)
            return (wa, p.u_star), (ok, True)

        if mode == "stability-right":
            box = Interval.stability_right(p, m)
            wb, ok = self._resolve(1, solve_stab_right(ta, C, p, m), lambda: _argmin_violation(
                Z := _grid(box, *self.crit), g_eval(ta, Z, p, m) + C), step, t)
            return (p.u_star, wb), (True, ok)

        if mode == "invariance-left":
            box = Interval.invariance_left(m)
            wa, ok = self._resolve(0, solve_inv_left(tb, D, m), lambda: _argmin_violation(
                S := _grid(box, m.u_hat), k_eval(S, tb, m) - D), step, t)
            return (wa, self.last[1]), (ok, True)

        if mode == "invariance-right":
            box = Interval.invariance_right(m)
            wb, ok = self._resolve(1, solve_inv_right(ta, D, m), lambda: _argmin_violation(
                Z := _grid(box, m.u_hat), k_eval(ta, Z, m) - D), step, t)
            return (self.last[0], wb), (True, ok)

        if mode == "stability-both":
            boxes = Interval.stability_left(p, m), Interval.stability_right(p, m)
            pair, ok = self._resolve_pair(solve_stab_both(C, p, m), lambda: self._pair_effort(
                boxes, lambda S, Z: g_eval(S, Z, p, m) + C), step, t)
            return pair, (ok, ok)

        if mode == "invariance-both":
            boxes = Interval.invariance_left(m), Interval.invariance_right(m)
            pair, ok = self._resolve_pair(solve_inv_both(D, m), lambda: self._pair_effort(
                boxes, lambda S, Z: k_eval(S, Z, m) - D), step, t)
            return pair, (ok, ok)

        # compound: the two relaxed problems are independent; the right
        # (invariance) command is applied whatever happens on the left
        ca, ib = Interval.stability_left(p, m), Interval.invariance_right(m)
        wa, ok_a = self._resolve(0, solve_compound_left(C, D, p, m),
                                 lambda: self._compound_effort(ca, ib, C, D, left=True), step, t)
        wb, ok_b = self._resolve(1, solve_compound_right(C, D, p, m),
                                 lambda: self._compound_effort(ca, ib, C, D, left=False), step, t)
        return (wa, wb), (ok_a, ok_b)

    def _pair_effort(self, boxes, violation):
        S = _grid(boxes[0], *self.crit)[::8]
        Z = _grid(boxes[1], *self.crit)[::8]
        v = np.maximum(violation(S[:, None], Z[None, :]), 0.0)
        v = v + 1e-12 * (S[:, None] ** 2 + Z[None, :] ** 2)
        i, j = np.unravel_index(np.argmin(v), v.shape)
        return float(S[i]), float(Z[j])

    def _compound_effort(self, ca, ib, C, D, left):
        m, p = self.m, self.p
        if left:
            S = _grid(ca, *self.crit)
            g = partner_min_g_over_Ib(S, p, m) + C
            k = partner_min_k_over_Ib(S, m) - D
            return _argmin_violation(S, np.maximum(g, 0.0) + np.maximum(k, 0.0))
        Z = _grid(ib, *self.crit)
        g = partner_min_g_over_Ca(Z, p, m) + C
        k = partner_min_k_over_Ca(Z, m, p) - D
        return _argmin_violation(Z, np.maximum(g, 0.0) + np.maximum(k, 0.0))


def run_scenario(cfg: ScenarioConfig, on_step: Callable | None = None) -> RunResult:
    """Run the closed loop; one record per control step, t = 0 .. t_final."""
    cfg.validate()
    m, p = cfg.flux, cfg.params
    state = init_from_profile(m, cfg.a, cfg.b, cfg.n_cells, cfg.initial.build(cfg.u_star))
    initial = state
    controller = _Controller(cfg, boundary_traces(state))
    dt_max = cfg.dt_max if cfg.dt_max is not None else cfg.control_dt

    flux_integral = 0.0

    def audit(old, new, dt, fluxes):
        nonlocal flux_integral
        flux_integral += dt * (float(fluxes[0]) - float(fluxes[-1]))
        if on_step is not None:
            on_step(old, new, dt, fluxes)

    snap_steps = {int(round(t / cfg.control_dt)): t for t in cfg.snapshot_times
                  if t <= cfg.t_final + 1e-12}
    snapshots = {}
    records = []
    fallback_steps = negative_steps = 0
    for k in range(cfg.n_steps + 1):
        t = k * cfg.control_dt
        traces = boundary_traces(state)
        V, B = lyapunov_v(state, p), barrier_b(state, p)
        C, D = budget_c(V, p), budget_d(B, p)
        if D < 0:
            negative_steps += 1
        (wa, wb), (ok_a, ok_b) = controller.decide(traces, C, D, k, t)
        if not (ok_a and ok_b):
            fallback_steps += 1
        records.append(TimeSeriesRecord(
            t, V, B, C, D, wa, wb, traces[0], traces[1], int(ok_a), int(ok_b), total_mass(state)
        ))
        if k in snap_steps:
            snapshots[snap_steps[k]] = (state.centers, state.cells.copy())
        if k < cfg.n_steps:
            state = advance_interval(m, state, BoundaryData(wa, wb), cfg.control_dt,
                                     cfg.cfl, dt_max, on_step=audit)
            state = replace(state, time=(k + 1) * cfg.control_dt)
    if negative_steps:
        log.info("negative barrier budget active on %d of %d control steps",
                 negative_steps, len(records))
    if fallback_steps:
        log.info("fallback (%s) applied on %d of %d control steps",
                 cfg.fallback, fallback_steps, len(records))
    return RunResult(cfg, records, snapshots, initial, state, flux_integral,
                     fallback_steps, negative_steps)
