"""Alert escalation: Awake -> Stage1 (siren) -> Stage2 (siren + seat vibrator + SMS).

``step`` is a pure function of the previous :class:`AlertState`, the current
detector outputs and the configuration. A run folds it over the tick stream.

Rules, checked once per tick with at most one transition per tick:

* Awake -> Stage1 when the ongoing eye closure exceeds ``t_blink_ms``.
* Stage1 -> Stage2 when the same closure exceeds ``t_blink_ms + t_persist_ms``
  and the heart rate has slowed (or that requirement is waived, or the heart
  estimate has been invalid for longer than ``dropout_failsafe_ms``).
* Stage1/Stage2 -> Awake once the eyes have been open for ``t_recover_ms``.
"""

from __future__ import annotations

import enum
from collections.abc import Iterable
from dataclasses import dataclass, replace
from typing import NamedTuple

from .detect import HeartEstimate, VigilanceMetrics
from .device import DEFAULT_ALERT, GsmAlert
from .errors import ConfigError, TimeOrderError


class AlertLevel(enum.Enum):
    AWAKE = "awake"
    STAGE1 = "stage1"
    STAGE2 = "stage2"


@dataclass(frozen=True, slots=True)
class EscalationConfig:
    t_blink_ms: float = 400.0
    t_persist_ms: float = 3000.0
    t_recover_ms: float = 1000.0
    slowdown_required: bool = True
    dropout_failsafe_ms: float = 10_000.0
    vib_duty: int = 200
    gsm_alert: GsmAlert = DEFAULT_ALERT

    def __post_init__(self) -> None:
        for name in ("t_blink_ms", "t_persist_ms", "t_recover_ms", "dropout_failsafe_ms"):
            value = getattr(self, name)
            if not value > 0:
                raise ConfigError(name, f"must be > 0, got {value:g}")
        if not 1 <= self.vib_duty <= 255:
            raise ConfigError("vib_duty", f"must be in [1, 255], got {self.vib_duty}")
        problems = self.gsm_alert.problems()
        if problems:
            raise ConfigError("gsm_alert", "; ".join(problems))


@dataclass(frozen=True, slots=True)
class AlertState:
    level: AlertLevel = AlertLevel.AWAKE
    entered_at_ms: float = 0.0
    gsm_sent: bool = False
    last_ms: float | None = None
    open_since_ms: float | None = None
    heart_invalid_since_ms: float | None = None


@dataclass(frozen=True, slots=True)
class ActuatorCommand:
    buzzer_on: bool = False
    vibrator_duty: int = 0
    gsm: GsmAlert | None = None


class Transition(NamedTuple):
    t_ms: float
    from_level: AlertLevel
    to_level: AlertLevel


def step(
    state: AlertState,
    now_ms: float,
    vig: VigilanceMetrics,
    heart: HeartEstimate,
    cfg: EscalationConfig,
) -> tuple[AlertState, ActuatorCommand]:
    """Advance the alert state machine by one tick.

    Raises:
        TimeOrderError: if ``now_ms`` is earlier than the previous tick.
    """
    if state.last_ms is not None and now_ms < state.last_ms:
        raise TimeOrderError(now_ms, state.last_ms)

    eyes_open = vig.current_closure_ms <= 0
    if eyes_open:
        open_since = state.open_since_ms if state.open_since_ms is not None else now_ms
    else:
        open_since = None
    if heart.valid:
        invalid_since = None
    else:
        invalid_since = state.heart_invalid_since_ms if state.heart_invalid_since_ms is not None else now_ms

    closure = vig.current_closure_ms
    recovered = open_since is not None and now_ms - open_since >= cfg.t_recover_ms
    heart_ok = (
        not cfg.slowdown_required
        or (heart.valid and heart.slowdown)
        or (invalid_since is not None and now_ms - invalid_since > cfg.dropout_failsafe_ms)
    )

    level = state.level
    if level is AlertLevel.AWAKE:
        if closure > cfg.t_blink_ms:
            level = AlertLevel.STAGE1
    elif level is AlertLevel.STAGE1:
        if closure > cfg.t_blink_ms + cfg.t_persist_ms and heart_ok:
            level = AlertLevel.STAGE2
        elif recovered:
            level = AlertLevel.AWAKE
    elif recovered:
        level = AlertLevel.AWAKE

    gsm = None
    gsm_sent = state.gsm_sent
    if level is AlertLevel.STAGE2 and state.level is not AlertLevel.STAGE2 and not gsm_sent:
        gsm = cfg.gsm_alert
        gsm_sent = True
    if level is AlertLevel.AWAKE:
        gsm_sent = False

    new_state = replace(
        state,
        level=level,
        entered_at_ms=now_ms if level is not state.level else state.entered_at_ms,
        gsm_sent=gsm_sent,
        last_ms=now_ms,
        open_since_ms=open_since,
        heart_invalid_since_ms=invalid_since,
    )
    command = ActuatorCommand(
        buzzer_on=level is not AlertLevel.AWAKE,
        vibrator_duty=cfg.vib_duty if level is AlertLevel.STAGE2 else 0,
        gsm=gsm,
    )
    return new_state, command


def episode_log(
    levels: Iterable[tuple[float, AlertLevel]],
    initial: AlertLevel = AlertLevel.AWAKE,
) -> list[Transition]:
    """Collapse a per-tick ``(t_ms, level)`` trace into its level changes."""
    out = []
    current = initial
    for t_ms, level in levels:
        if level is not current:
            out.append(Transition(t_ms, current, level))
            current = level
    return out
