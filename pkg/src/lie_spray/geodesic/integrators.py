"""Runge-Kutta steppers and the shared stepping driver.

The driver integrates from t = 0 towards ``t_end`` (either sign), records
states on an output grid, halts with a blow-up record when the state norm
exceeds the cap or the adaptive step collapses while the norm grows, and
raises :class:`StepSizeUnderflowError` when the step collapses otherwise.
"""

from __future__ import annotations

import logging
from collections import deque
from dataclasses import dataclass
from typing import Callable, Literal, Sequence

import numpy as np
from numpy.typing import NDArray

from ..errors import IntegrationError, NonFiniteError, StepSizeUnderflowError
from ..models import IntegratorConfig

logger = logging.getLogger(__name__)

State = NDArray[np.float64]
RightHandSide = Callable[[float, State], State]
PostStep = Callable[[State], State]

SAFETY = 0.9
MIN_FACTOR = 0.2
MAX_FACTOR = 5.0
STEP_COLLAPSE = 1e-12
BLOWUP_FIT_POINTS = 10


def rk4_step(f: RightHandSide, t: float, y: State, h: float) -> State:
    k1 = f(t, y)
    k2 = f(t + h / 2.0, y + h / 2.0 * k1)
    k3 = f(t + h / 2.0, y + h / 2.0 * k2)
    k4 = f(t + h, y + h * k3)
    return y + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def rkf45_step(f: RightHandSide, t: float, y: State, h: float) -> tuple[State, State]:
    """One Fehlberg step; returns the fifth-order solution and the local error estimate."""
    k1 = f(t, y)
    k2 = f(t + h / 4.0, y + 0.25 * h * k1)
    k3 = f(t + 3.0 * h / 8.0, y + 3.0 * h * k1 / 32.0 + 9.0 * h * k2 / 32.0)
    k4 = f(t + 12.0 * h / 13.0, y + 1932.0 * h * k1 / 2197.0 - 7200.0 * h * k2 / 2197.0 + 7296.0 * h * k3 / 2197.0)
    k5 = f(t + h, y + 439.0 * h * k1 / 216.0 - 8.0 * h * k2 + 3680.0 * h * k3 / 513.0 - 845.0 * h * k4 / 4104.0)
    k6 = f(
        t + h / 2.0,
        y - 8.0 * h * k1 / 27.0 + 2.0 * h * k2 - 3544.0 * h * k3 / 2565.0 + 1859.0 * h * k4 / 4104.0 - 11.0 * h * k5 / 40.0,
    )
    y5 = y + h * (16.0 * k1 / 135.0 + 6656.0 * k3 / 12825.0 + 28561.0 * k4 / 56430.0 - 9.0 * k5 / 50.0 + 2.0 * k6 / 55.0)
    err = h * (k1 / 360.0 - 128.0 * k3 / 4275.0 - 2197.0 * k4 / 75240.0 + k5 / 50.0 + 2.0 * k6 / 55.0)
    return y5, np.abs(err)


@dataclass(frozen=True)
class BlowUp:
    time_estimate: float
    direction: Literal["forward", "backward"]
    last_time: float
    last_norm: float


@dataclass(frozen=True)
class Solution:
    """States recorded in integration order, starting with t = 0."""

    times: NDArray[np.float64]
    states: NDArray[np.float64]
    blowup: BlowUp | None
    accepted_steps: int
    rejected_steps: int


def output_grid(t_end: float, output_step: float | None) -> list[float] | None:
    """Uniform grid k·output_step from 0 towards t_end, ending exactly at t_end."""
    if output_step is None:
        return None
    count = int(np.floor(abs(t_end) / output_step + 1e-9))
    sign = 1.0 if t_end > 0 else -1.0
    grid = [sign * k * output_step for k in range(1, count + 1)]
    if not grid or abs(grid[-1] - t_end) > 1e-9 * output_step:
        grid.append(t_end)
    else:
        grid[-1] = t_end
    return grid


def fit_blowup_time(times: Sequence[float], norms: Sequence[float]) -> float:
    """Fit |y| ≈ C / (t* − t), i.e. 1/|y| linear in t, over the given samples and return t*."""
    t = np.asarray(times, dtype=float)
    inverse = 1.0 / np.asarray(norms, dtype=float)
    if t.shape[0] < 2:
        return float(t[-1])
    # times are taken relative to the last sample to keep the fit well conditioned
    slope, intercept = np.polyfit(t - t[-1], inverse, 1)
    if slope == 0.0:
        return float(t[-1])
    return float(t[-1] - intercept / slope)


def _state_norm(y: State) -> float:
    return float(np.linalg.norm(y))


def integrate(
    f: RightHandSide,
    y0: State,
    t_end: float,
    config: IntegratorConfig,
    output_times: Sequence[float] | None = None,
    post_step: PostStep | None = None,
    watch_blowup: bool = True,
) -> Solution:
    """Integrate ``ẏ = f(t, y)`` from ``(0, y0)`` to ``t_end``.

    Steps are clipped so every output time is hit exactly. Without output times
    (and no ``output_step`` in the config) every accepted step is recorded.
    """
    if t_end == 0.0:
        return Solution(np.zeros(1), np.asarray(y0, dtype=float)[None, ...], None, 0, 0)
    sign = 1.0 if t_end > 0 else -1.0
    targets = list(output_times) if output_times is not None else output_grid(t_end, config.output_step)
    if targets is not None and (not targets or abs(targets[-1] - t_end) > 0.0):
        targets = [*targets, t_end]
    y = np.array(y0, dtype=float)
    t = 0.0
    h = min(config.initial_step, abs(t_end))
    adaptive = config.method == "rk45_adaptive"
    times = [t]
    states = [y.copy()]
    initial_norm = _state_norm(y)
    history_t: deque[float] = deque([t], maxlen=BLOWUP_FIT_POINTS)
    history_norm: deque[float] = deque([initial_norm], maxlen=BLOWUP_FIT_POINTS)
    target_index = 0
    accepted = rejected = 0
    blowup: BlowUp | None = None

    while sign * (t_end - t) > 0.0:
        if accepted + rejected >= config.max_steps:
            raise IntegrationError(f"step budget of {config.max_steps} exhausted at t = {t:.6g}", last_time=t)
        target = targets[target_index] if targets is not None else t_end
        remaining = abs(target - t)
        clipped = h >= remaining * (1.0 - 1e-9)
        step = sign * (remaining if clipped else h)
        if adaptive:
            candidate, error = rkf45_step(f, t, y, step)
            scale = config.atol + config.rtol * np.maximum(np.abs(y), np.abs(candidate))
            ratio = float(np.max(error / scale)) if np.all(np.isfinite(error)) else np.inf
            factor = MAX_FACTOR if ratio == 0.0 else min(MAX_FACTOR, max(MIN_FACTOR, SAFETY * ratio ** -0.2))
            if ratio > 1.0 or not np.all(np.isfinite(candidate)):
                rejected += 1
                h = abs(step) * (factor if np.isfinite(factor) else MIN_FACTOR)
                if h < STEP_COLLAPSE * max(1.0, abs(t)):
                    grew = history_norm[-1] > initial_norm
                    if watch_blowup and grew:
                        blowup = _blowup(history_t, history_norm, sign, t)
                        break
                    raise StepSizeUnderflowError(f"step size underflow at t = {t:.6g} (h = {h:.3e})", last_time=t)
                continue
        else:
            candidate = rk4_step(f, t, y, step)
            factor = 1.0
        if not np.all(np.isfinite(candidate)):
            raise NonFiniteError(f"integration produced non-finite state at t = {t + step:.6g}")
        if post_step is not None:
            candidate = post_step(candidate)
        accepted += 1
        t = target if clipped else t + step
        y = candidate
        history_t.append(t)
        history_norm.append(_state_norm(y))
        if targets is None:
            times.append(t)
            states.append(y.copy())
        elif clipped:
            times.append(t)
            states.append(y.copy())
            target_index += 1
        if adaptive:
            grown = abs(step) * factor
            h = max(h, grown) if clipped else grown
        if watch_blowup and history_norm[-1] > config.blowup_norm_cap:
            blowup = _blowup(history_t, history_norm, sign, t)
            break

    if times[-1] != t:
        times.append(t)
        states.append(y.copy())
    return Solution(
        times=np.asarray(times),
        states=np.asarray(states),
        blowup=blowup,
        accepted_steps=accepted,
        rejected_steps=rejected,
    )


def _blowup(history_t: Sequence[float], history_norm: Sequence[float], sign: float, t: float) -> BlowUp:
    estimate = fit_blowup_time(list(history_t), list(history_norm))
    direction: Literal["forward", "backward"] = "forward" if sign > 0 else "backward"
    logger.info("%s blow-up near t* = %.6g (stopped at t = %.6g, |y| = %.3e)", direction, estimate, t, history_norm[-1])
    return BlowUp(time_estimate=estimate, direction=direction, last_time=t, last_norm=history_norm[-1])
