"""Classical RK4 integration of d theta_tilde/dt = F(theta_tilde) with a CFL step."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable, Optional

import numpy as np

from . import spectral as sp
from .errors import ConfigurationError, NumericalOverflowError
from .model import State, recover_theta, rhs, velocity

VELOCITY_FLOOR = 1e-12

# relative slack for landing on an event time instead of taking a sliver step
_LAND_SLACK = 1e-8

Callback = Callable[[float, State], None]


@dataclass(frozen=True)
class IntegratorConfig:
    t_end: float
    courant: float = 0.5
    dt_max: float = 1e-2
    dt_fixed: Optional[float] = None
    callback_interval: Optional[float] = None

    def __post_init__(self):
        if not (0.0 < self.courant <= 1.0):
            raise ConfigurationError(f"courant must lie in (0, 1], got {self.courant}")
        if not self.dt_max > 0:
            raise ConfigurationError(f"dt_max must be positive, got {self.dt_max}")
        if self.dt_fixed is not None and not self.dt_fixed > 0:
            raise ConfigurationError(f"dt_fixed must be positive, got {self.dt_fixed}")
        if self.callback_interval is not None and not self.callback_interval > 0:
            raise ConfigurationError(
                f"callback_interval must be positive, got {self.callback_interval}")
        if not math.isfinite(self.t_end):
            raise ConfigurationError(f"t_end must be finite, got {self.t_end}")


def max_speed(state: State) -> float:
    v1, v2 = velocity(recover_theta(state))
    u1 = sp.inverse(v1, check=False).values
    u2 = sp.inverse(v2, check=False).values
    return float(np.sqrt(np.max(u1**2 + u2**2)))


def cfl_dt(state: State, cfg: IntegratorConfig) -> float:
    vmax = max(max_speed(state), VELOCITY_FLOOR)
    return min(cfg.dt_max, cfg.courant * state.grid.dx / vmax)


def _stage(state, theta_tilde, t, index):
    try:
        k = rhs(state.with_theta_tilde(theta_tilde, t))
    except NumericalOverflowError as exc:
        raise NumericalOverflowError(f"RK4 stage {index} at t={t}: {exc}",
                                     t=state.t, stage=index) from exc
    if not k.is_finite():
        raise NumericalOverflowError(f"non-finite RK4 stage {index} at t={t}",
                                     t=state.t, stage=index)
    return k


def rk4_step(state: State, dt: float) -> State:
    if not dt > 0:
        raise ConfigurationError(f"dt must be positive, got {dt}")
    y, t = state.theta_tilde, state.t
    k1 = _stage(state, y, t, 1)
    k2 = _stage(state, y + (0.5 * dt) * k1, t + 0.5 * dt, 2)
    k3 = _stage(state, y + (0.5 * dt) * k2, t + 0.5 * dt, 3)
    k4 = _stage(state, y + dt * k3, t + dt, 4)
    y_new = y + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    if not y_new.is_finite():
        raise NumericalOverflowError(f"non-finite update at t={t}", t=t, stage=4)
    return state.with_theta_tilde(y_new, t + dt)


def _event_times(t0: float, t_end: float, interval: Optional[float]) -> list[float]:
    if interval is None:
        return []
    tol = _LAND_SLACK * interval
    first = math.ceil((t0 - tol) / interval)
    times = []
    k = first
    while k * interval <= t_end + tol:
        times.append(min(k * interval, t_end) if abs(k * interval - t_end) <= tol
                     else k * interval)
        k += 1
    return times


def integrate(state: State, cfg: IntegratorConfig,
              callbacks: Iterable[Callback] | Callback | None = None) -> State:
    """Advance ``state`` to ``cfg.t_end``.

    Callbacks are invoked with ``(t, state)`` at every multiple of
    ``cfg.callback_interval`` in ``[state.t, t_end]``; steps are shortened to hit
    those times and ``t_end`` exactly.
    """
    if callbacks is None:
        callbacks = []
    elif callable(callbacks):
        callbacks = [callbacks]
    else:
        callbacks = list(callbacks)
    if cfg.t_end < state.t:
        raise ConfigurationError(f"t_end={cfg.t_end} precedes state time {state.t}")

    events = _event_times(state.t, cfg.t_end, cfg.callback_interval)
    ev = 0
    while ev < len(events) and events[ev] <= state.t + _LAND_SLACK * (cfg.callback_interval or 1):
        for cb in callbacks:
            cb(state.t, state)
        ev += 1

    last_good = state.t
    while state.t < cfg.t_end:
        target = events[ev] if ev < len(events) else cfg.t_end
        target = min(target, cfg.t_end)
        try:
            dt = cfg.dt_fixed if cfg.dt_fixed is not None else _checked_cfl_dt(state, cfg)
            remaining = target - state.t
            landing = remaining <= dt * (1.0 + _LAND_SLACK)
            step = remaining if landing else dt
            new = rk4_step(state, step)
        except NumericalOverflowError as exc:
            raise NumericalOverflowError(
                f"{exc} (last good t={last_good})", t=exc.t, stage=exc.stage,
                last_good_t=last_good) from exc
        if landing:
            new = new.with_theta_tilde(new.theta_tilde, target)
        state = new
        last_good = state.t
        if landing and ev < len(events) and target == events[ev]:
            for cb in callbacks:
                cb(state.t, state)
            ev += 1
    return state


def _checked_cfl_dt(state: State, cfg: IntegratorConfig) -> float:
    dt = cfl_dt(state, cfg)
    if not (math.isfinite(dt) and dt > 0):
        raise NumericalOverflowError(f"non-finite CFL step at t={state.t}", t=state.t)
    return dt
