"""Seeded random scenarios for property and acceptance tests."""

from __future__ import annotations

import random

from drowsy_alert.detect import BlinkEvent, BlinkTracker, BlinkTrackerConfig, EyeClassifier, EyeClassifierConfig
from drowsy_alert.signal_gen import EventKind, Scenario, ScenarioEvent, SensorSample


def random_eye_scenario(
    rng: random.Random,
    *,
    duration_ms: int = 60_000,
    rate_hz: float = 100.0,
    sigma: float = 0.0,
    long_fraction: float = 0.25,
    bpm: float = 72.0,
) -> Scenario:
    """Blinks (100-350 ms) mixed with longer closures (500-4000 ms).

    Gaps between closures are at least 200 ms so debounced edges never merge,
    and every closure ends at least 500 ms before the end of the run.
    """
    events = [ScenarioEvent(0, EventKind.SET_NOISE, sigma)]
    t = rng.randint(200, 1500)
    while True:
        if rng.random() < long_fraction:
            kind, dur = rng.choice([EventKind.MICROSLEEP, EventKind.EYES_CLOSED]), rng.randint(500, 4000)
        else:
            kind, dur = EventKind.BLINK, rng.randint(100, 350)
        if t + dur > duration_ms - 500:
            break
        events.append(ScenarioEvent(t, kind, dur))
        t += dur + rng.randint(200, 4000)
    return Scenario(
        duration_ms=duration_ms,
        sample_rate_hz=rate_hz,
        seed=rng.getrandbits(32),
        events=tuple(events),
        initial_bpm=bpm,
    )


def random_blink_scenario(rng: random.Random, *, duration_ms: int = 60_000, sigma: float = 0.0) -> Scenario:
    """Ordinary blinks only (100-300 ms), 1-6 s apart."""
    events = [ScenarioEvent(0, EventKind.SET_NOISE, sigma)]
    t = rng.randint(500, 2000)
    while True:
        dur = rng.randint(100, 300)
        if t + dur > duration_ms - 500:
            break
        events.append(ScenarioEvent(t, EventKind.BLINK, dur))
        t += dur + rng.randint(1000, 6000)
    return Scenario(duration_ms, 100.0, rng.getrandbits(32), tuple(events), 72.0)


def recover_closures(
    samples: list[SensorSample],
    eye_cfg: EyeClassifierConfig | None = None,
    tracker_cfg: BlinkTrackerConfig | None = None,
):
    """Run classifier + tracker; return (closure events, last metrics)."""
    clf = EyeClassifier(eye_cfg)
    tracker = BlinkTracker(tracker_cfg)
    events: list[BlinkEvent] = []
    metrics = None
    for s in samples:
        ev, metrics = tracker.update(s.t_ms, clf.update(s))
        if ev is not None:
            events.append(ev)
    return events, metrics
