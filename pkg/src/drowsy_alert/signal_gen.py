"""Scripted driver scenarios and synthetic eye-IR / finger-PPG sample streams.

A scenario is a timeline of eye closures and heart-rate changes. ``generate``
turns it into a fixed-rate stream of :class:`SensorSample` values plus the
:class:`GroundTruth` the detectors are scored against.

Eye channel: the eyeball reflects IR, the eyelid does not, so the reflectance
sits at ``OPEN_LEVEL`` while the eye is open and drops to ``CLOSED_LEVEL``
while it is closed. Finger channel: a periodic pulse whose rate follows the
scripted heart rate.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from ._lines import iter_directives

OPEN_LEVEL = 0.85
CLOSED_LEVEL = 0.10

PPG_BASELINE = 0.2
PPG_PEAK = 0.8
PPG_LOBE_CENTER = 0.15
PPG_LOBE_WIDTH = 0.3

DEFAULT_RATE_HZ = 100.0
DEFAULT_BPM = 72.0
BPM_RANGE = (20.0, 250.0)


class ScenarioError(ValueError):
    """Invalid scenario text or values. ``line`` is 1-based, or None if not line-specific."""

    def __init__(self, message: str, line: int | None = None) -> None:
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


class EventKind(enum.Enum):
    BLINK = "blink"
    MICROSLEEP = "microsleep"
    EYES_CLOSED = "eyesclosed"
    SET_HEART_RATE = "sethr"
    SET_NOISE = "setnoise"
    # Finger sensor loses contact: the PPG channel flattens to its baseline.
    PPG_DROPOUT = "dropout"

    @property
    def is_eye_closure(self) -> bool:
        return self in _EYE_KINDS

    @property
    def has_duration(self) -> bool:
        return self in _EYE_KINDS or self is EventKind.PPG_DROPOUT


_EYE_KINDS = frozenset({EventKind.BLINK, EventKind.MICROSLEEP, EventKind.EYES_CLOSED})


@dataclass(frozen=True, slots=True)
class ScenarioEvent:
    """One scripted event.

    ``value`` holds the duration in ms for closures and dropouts, the heart
    rate in bpm for ``sethr`` and the noise sigma for ``setnoise``.
    """

    at_ms: float
    kind: EventKind
    value: float
    line: int | None = field(default=None, compare=False)

    @property
    def end_ms(self) -> float:
        return self.at_ms + self.value if self.kind.has_duration else self.at_ms


@dataclass(frozen=True, slots=True)
class Scenario:
    duration_ms: float
    sample_rate_hz: float = DEFAULT_RATE_HZ
    seed: int = 0
    events: tuple[ScenarioEvent, ...] = ()
    initial_bpm: float = DEFAULT_BPM

    @property
    def period_ms(self) -> float:
        return 1000.0 / self.sample_rate_hz

    @property
    def n_samples(self) -> int:
        return math.floor(self.duration_ms * self.sample_rate_hz / 1000.0)

    def with_seed(self, seed: int) -> Scenario:
        return Scenario(self.duration_ms, self.sample_rate_hz, seed, self.events, self.initial_bpm)


@dataclass(frozen=True, slots=True)
class SensorSample:
    t_ms: float
    eye_ir: float
    ppg_ir: float


@dataclass(frozen=True)
class GroundTruth:
    """Per-sample truth aligned with the generated stream.

    ``blink_events`` lists every scripted eye closure as ``(start_ms, end_ms)``,
    blinks and longer closures alike.
    """

    t_ms: np.ndarray
    eye_closed: np.ndarray
    true_bpm: np.ndarray
    ppg_dropout: np.ndarray
    blink_events: list[tuple[float, float]]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, GroundTruth):
            return NotImplemented
        return (
            np.array_equal(self.t_ms, other.t_ms)
            and np.array_equal(self.eye_closed, other.eye_closed)
            and np.array_equal(self.true_bpm, other.true_bpm)
            and np.array_equal(self.ppg_dropout, other.ppg_dropout)
            and self.blink_events == other.blink_events
        )


def validate_scenario(scenario: Scenario) -> Scenario:
    """Check scenario invariants and return it with events sorted by time."""
    if not scenario.sample_rate_hz > 0:
        raise ScenarioError(f"rate must be > 0, got {scenario.sample_rate_hz}")
    if scenario.duration_ms < 0:
        raise ScenarioError(f"duration must be >= 0, got {scenario.duration_ms}")
    if scenario.seed < 0:
        raise ScenarioError(f"seed must be a non-negative integer, got {scenario.seed}")
    _check_bpm(scenario.initial_bpm, None)

    events = sorted(scenario.events, key=lambda e: e.at_ms)
    for ev in events:
        if ev.at_ms < 0:
            raise ScenarioError(f"event time must be >= 0, got {ev.at_ms}", ev.line)
        if ev.kind.has_duration and not ev.value > 0:
            raise ScenarioError(f"{ev.kind.value} duration must be > 0, got {ev.value}", ev.line)
        if ev.kind is EventKind.SET_HEART_RATE:
            _check_bpm(ev.value, ev.line)
        if ev.kind is EventKind.SET_NOISE and not ev.value >= 0:
            raise ScenarioError(f"noise sigma must be >= 0, got {ev.value}", ev.line)
        if ev.end_ms > scenario.duration_ms:
            raise ScenarioError(
                f"{ev.kind.value} at {ev.at_ms:g} ends at {ev.end_ms:g}, "
                f"past duration {scenario.duration_ms:g}",
                ev.line,
            )

    eye = [e for e in events if e.kind.is_eye_closure]
    for prev, nxt in zip(eye, eye[1:]):
        if nxt.at_ms < prev.end_ms:
            raise ScenarioError(
                f"eye events overlap: line {prev.line} ({prev.kind.value} at {prev.at_ms:g}) "
                f"and line {nxt.line} ({nxt.kind.value} at {nxt.at_ms:g})",
                nxt.line,
            )

    return Scenario(
        scenario.duration_ms,
        scenario.sample_rate_hz,
        scenario.seed,
        tuple(events),
        scenario.initial_bpm,
    )


def _check_bpm(bpm: float, line: int | None) -> None:
    lo, hi = BPM_RANGE
    if not lo <= bpm <= hi:
        raise ScenarioError(f"bpm must be in [{lo:g}, {hi:g}], got {bpm:g}", line)


def _number(token: str, what: str, line: int) -> float:
    try:
        value = float(token)
    except ValueError:
        raise ScenarioError(f"{what}: expected a number, got {token!r}", line) from None
    if not math.isfinite(value):
        raise ScenarioError(f"{what}: expected a finite number, got {token!r}", line)
    return value


def parse_scenario(text: str) -> Scenario:
    """Parse scenario-file text into a validated :class:`Scenario`.

    Raises:
        ScenarioError: on syntax errors (with the offending line), overlapping
            eye events, out-of-range values or events past the duration.
    """
    header: dict[str, float] = {}
    events: list[ScenarioEvent] = []
    for lineno, tokens, _ in iter_directives(text):
        key = tokens[0]
        if key in ("duration", "rate", "seed", "bpm"):
            if len(tokens) != 2:
                raise ScenarioError(f"{key} takes exactly one value", lineno)
            if key in header:
                raise ScenarioError(f"duplicate key {key!r}", lineno)
            if key == "seed":
                if not tokens[1].isdigit():
                    raise ScenarioError(f"seed must be a non-negative integer, got {tokens[1]!r}", lineno)
                header[key] = int(tokens[1])
            else:
                header[key] = _number(tokens[1], key, lineno)
        elif key == "event":
            if len(tokens) != 4:
                raise ScenarioError("expected 'event <at_ms> <kind> <value>'", lineno)
            try:
                kind = EventKind(tokens[2].lower())
            except ValueError:
                raise ScenarioError(f"unknown event kind {tokens[2]!r}", lineno) from None
            at_ms = _number(tokens[1], "event time", lineno)
            value = _number(tokens[3], kind.value, lineno)
            events.append(ScenarioEvent(at_ms, kind, value, line=lineno))
        else:
            raise ScenarioError(f"unknown key {key!r}", lineno)

    for required in ("duration", "rate"):
        if required not in header:
            raise ScenarioError(f"missing required key {required!r}")

    scenario = Scenario(
        duration_ms=header["duration"],
        sample_rate_hz=header["rate"],
        seed=int(header.get("seed", 0)),
        events=tuple(events),
        initial_bpm=header.get("bpm", DEFAULT_BPM),
    )
    return validate_scenario(scenario)


def format_number(value: float) -> str:
    """Shortest text that parses back to exactly ``value``."""
    value = float(value)
    return str(int(value)) if value.is_integer() and abs(value) < 2**53 else repr(value)


def format_scenario(scenario: Scenario) -> str:
    """Render a scenario in the file grammar accepted by :func:`parse_scenario`."""
    lines = [
        f"duration {format_number(scenario.duration_ms)}",
        f"rate {format_number(scenario.sample_rate_hz)}",
        f"seed {scenario.seed}",
        f"bpm {format_number(scenario.initial_bpm)}",
    ]
    lines += [
        f"event {format_number(ev.at_ms)} {ev.kind.value} {format_number(ev.value)}"
        for ev in scenario.events
    ]
    return "\n".join(lines) + "\n"


def ppg_waveform(phase: float | np.ndarray) -> float | np.ndarray:
    """Pulse intensity at ``phase`` (cycles, in [0, 1)).

    A raised-cosine systolic lobe 0.3 cycle wide centred at 0.15, rising from
    a 0.2 baseline to a 0.8 peak.
    """
    ph = np.asarray(phase, dtype=float)
    offset = (ph - PPG_LOBE_CENTER) / PPG_LOBE_WIDTH
    lobe = 0.5 * (1.0 + np.cos(2.0 * np.pi * offset))
    out = np.where(np.abs(offset) <= 0.5, PPG_BASELINE + (PPG_PEAK - PPG_BASELINE) * lobe, PPG_BASELINE)
    return float(out) if out.ndim == 0 else out


def _piecewise(t: np.ndarray, initial: float, changes: list[ScenarioEvent]) -> np.ndarray:
    values = np.full(t.shape, initial, dtype=float)
    for ev in changes:
        values[t >= ev.at_ms] = ev.value
    return values


def _spans(t: np.ndarray, spans: list[tuple[float, float]]) -> np.ndarray:
    mask = np.zeros(t.shape, dtype=bool)
    for start, end in spans:
        mask |= (t >= start) & (t < end)
    return mask


def _ppg_phase(t: np.ndarray, initial_bpm: float, hr_events: list[ScenarioEvent]) -> np.ndarray:
    # Phase is anchored at every rate change so the pulse stays continuous.
    anchors = [(0.0, 0.0, initial_bpm)]
    for ev in hr_events:
        t0, ph0, bpm0 = anchors[-1]
        anchors.append((ev.at_ms, ph0 + (ev.at_ms - t0) * bpm0 / 60000.0, ev.value))
    phase = np.empty(t.shape, dtype=float)
    for i, (t0, ph0, bpm) in enumerate(anchors):
        end = anchors[i + 1][0] if i + 1 < len(anchors) else np.inf
        sel = (t >= t0) & (t < end)
        phase[sel] = ph0 + (t[sel] - t0) * bpm / 60000.0
    return np.mod(phase, 1.0)


def generate(scenario: Scenario) -> tuple[list[SensorSample], GroundTruth]:
    """Synthesize the sensor stream for ``scenario``.

    Noise is additive Gaussian drawn from a Philox (counter-based) generator
    keyed by the scenario seed, one independent draw per channel per sample,
    scaled by the sigma in force at that sample and clamped to [0, 1]. The
    same scenario always yields bit-identical output.
    """
    scenario = validate_scenario(scenario)
    n = scenario.n_samples
    t = np.arange(n, dtype=float) * 1000.0 / scenario.sample_rate_hz

    events = scenario.events
    closures = [(e.at_ms, e.end_ms) for e in events if e.kind.is_eye_closure]
    dropouts = [(e.at_ms, e.end_ms) for e in events if e.kind is EventKind.PPG_DROPOUT]
    hr_events = [e for e in events if e.kind is EventKind.SET_HEART_RATE]
    noise_events = [e for e in events if e.kind is EventKind.SET_NOISE]

    eye_closed = _spans(t, closures)
    dropout = _spans(t, dropouts)
    true_bpm = _piecewise(t, scenario.initial_bpm, hr_events)
    sigma = _piecewise(t, 0.0, noise_events)

    rng = np.random.Generator(np.random.Philox(scenario.seed))
    noise = rng.standard_normal((n, 2)) * sigma[:, None]

    eye = np.where(eye_closed, CLOSED_LEVEL, OPEN_LEVEL) + noise[:, 0]
    ppg = np.where(dropout, PPG_BASELINE, ppg_waveform(_ppg_phase(t, scenario.initial_bpm, hr_events)))
    ppg = ppg + noise[:, 1]
    eye = np.clip(eye, 0.0, 1.0)
    ppg = np.clip(ppg, 0.0, 1.0)

    samples = [SensorSample(float(a), float(b), float(c)) for a, b, c in zip(t, eye, ppg)]
    truth = GroundTruth(
        t_ms=t,
        eye_closed=eye_closed,
        true_bpm=true_bpm,
        ppg_dropout=dropout,
        blink_events=[(float(s), float(e)) for s, e in closures],
    )
    return samples, truth
