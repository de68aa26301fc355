"""Streaming detectors: eye state, blinks and PERCLOS, PPG peaks, heart rate.

Each detector is a small stateful object fed one sample (or timestamp) at a
time in strictly increasing time order. None of them share state, so a
pipeline is just the detectors stepped side by side.
"""

from __future__ import annotations

import enum
import math
import statistics
from collections import deque
from collections.abc import Sequence
from dataclasses import dataclass

from .errors import ConfigError, TimeOrderError
from .signal_gen import BPM_RANGE, SensorSample


class EyeState(enum.Enum):
    OPEN = "open"
    CLOSED = "closed"


@dataclass(frozen=True, slots=True)
class EyeClassifierConfig:
    close_threshold: float = 0.40
    open_threshold: float = 0.60
    debounce_ms: float = 30.0

    def __post_init__(self) -> None:
        if not 0 < self.close_threshold < self.open_threshold < 1:
            raise ConfigError(
                "close_threshold",
                f"need 0 < close_threshold < open_threshold < 1, got "
                f"{self.close_threshold:g} / {self.open_threshold:g}",
            )
        if self.debounce_ms < 0:
            raise ConfigError("debounce_ms", f"must be >= 0, got {self.debounce_ms:g}")


@dataclass(frozen=True, slots=True)
class BlinkTrackerConfig:
    window_ms: float = 60_000.0
    # Closures shorter than this are blinks; longer ones are closures.
    blink_max_ms: float = 400.0

    def __post_init__(self) -> None:
        if not self.window_ms > 0:
            raise ConfigError("window_ms", f"must be > 0, got {self.window_ms:g}")
        if not self.blink_max_ms > 0:
            raise ConfigError("blink_max_ms", f"must be > 0, got {self.blink_max_ms:g}")


@dataclass(frozen=True, slots=True)
class PeakDetectorConfig:
    refractory_ms: float = 250.0
    rel_threshold: float = 0.6
    max_window_ms: float = 2000.0

    def __post_init__(self) -> None:
        if not self.refractory_ms > 0:
            raise ConfigError("refractory_ms", f"must be > 0, got {self.refractory_ms:g}")
        if not 0 < self.rel_threshold < 1:
            raise ConfigError("rel_threshold", f"must be in (0, 1), got {self.rel_threshold:g}")
        if not self.max_window_ms > 0:
            raise ConfigError("max_window_ms", f"must be > 0, got {self.max_window_ms:g}")


@dataclass(frozen=True, slots=True)
class HeartConfig:
    bpm_window_ms: float = 10_000.0
    baseline_tau_ms: float = 60_000.0
    slowdown_ratio: float = 0.9
    min_peaks: int = 3

    def __post_init__(self) -> None:
        if not self.bpm_window_ms > 0:
            raise ConfigError("bpm_window_ms", f"must be > 0, got {self.bpm_window_ms:g}")
        if not self.baseline_tau_ms > 0:
            raise ConfigError("baseline_tau_ms", f"must be > 0, got {self.baseline_tau_ms:g}")
        if not 0 < self.slowdown_ratio < 1:
            raise ConfigError("slowdown_ratio", f"must be in (0, 1), got {self.slowdown_ratio:g}")
        if self.min_peaks < 3:
            raise ConfigError("min_peaks", f"must be >= 3, got {self.min_peaks}")


@dataclass(frozen=True, slots=True)
class BlinkEvent:
    start_ms: float
    end_ms: float

    @property
    def duration_ms(self) -> float:
        return self.end_ms - self.start_ms


@dataclass(frozen=True, slots=True)
class VigilanceMetrics:
    window_ms: float
    blink_count: int
    perclos: float
    current_closure_ms: float
    longest_closure_ms: float

    @property
    def eyes_open(self) -> bool:
        return self.current_closure_ms == 0


@dataclass(frozen=True, slots=True)
class HeartEstimate:
    bpm: float
    baseline_bpm: float
    slowdown: bool
    valid: bool


class _Clock:
    __slots__ = ("last",)

    def __init__(self) -> None:
        self.last: float | None = None

    def tick(self, t_ms: float) -> None:
        if self.last is not None and t_ms <= self.last:
            raise TimeOrderError(t_ms, self.last)
        self.last = t_ms


def compute_perclos(flags: Sequence[bool]) -> float:
    """Fraction of samples flagged closed.

    Raises:
        ValueError: if ``flags`` is empty.
    """
    if len(flags) == 0:
        raise ValueError("PERCLOS of an empty window is undefined")
    return sum(1 for f in flags if f) / len(flags)


class EyeClassifier:
    """Hysteresis + debounce open/closed classifier for the eye-IR channel.

    Open -> Closed needs ``eye_ir < close_threshold`` held for ``debounce_ms``;
    Closed -> Open needs ``eye_ir > open_threshold`` held for ``debounce_ms``.
    Values inside the band keep the current state. Each sample stands for one
    sample period, so a run of ``k`` samples has been held for ``k`` periods.
    """

    def __init__(self, config: EyeClassifierConfig | None = None) -> None:
        self.config = config or EyeClassifierConfig()
        self.state = EyeState.OPEN
        self._pending_since: float | None = None
        self._clock = _Clock()

    def update(self, sample: SensorSample) -> EyeState:
        t = sample.t_ms
        period = t - self._clock.last if self._clock.last is not None else 0.0
        self._clock.tick(t)
        cfg = self.config
        if self.state is EyeState.OPEN:
            crossing = sample.eye_ir < cfg.close_threshold
        else:
            crossing = sample.eye_ir > cfg.open_threshold

        if not crossing:
            self._pending_since = None
            return self.state
        if self._pending_since is None:
            self._pending_since = t
        if t - self._pending_since + period >= cfg.debounce_ms:
            self.state = EyeState.CLOSED if self.state is EyeState.OPEN else EyeState.OPEN
            self._pending_since = None
        return self.state


class BlinkTracker:
    """Turns the eye-state stream into closure events and sliding-window metrics.

    A closure runs from the first tick classified closed to the first tick
    classified open again. Every completed closure is returned as a
    :class:`BlinkEvent`; only those shorter than ``blink_max_ms`` count toward
    ``blink_count``. The window covers timestamps in ``(now - window_ms, now]``.
    """

    def __init__(self, config: BlinkTrackerConfig | None = None) -> None:
        self.config = config or BlinkTrackerConfig()
        self._clock = _Clock()
        self._samples: deque[tuple[float, bool]] = deque()
        self._closed_count = 0
        self._closures: deque[BlinkEvent] = deque()
        self._closure_start: float | None = None

    def update(self, t_ms: float, state: EyeState) -> tuple[BlinkEvent | None, VigilanceMetrics]:
        self._clock.tick(t_ms)
        cfg = self.config
        closed = state is EyeState.CLOSED

        event = None
        if closed and self._closure_start is None:
            self._closure_start = t_ms
        elif not closed and self._closure_start is not None:
            event = BlinkEvent(self._closure_start, t_ms)
            self._closures.append(event)
            self._closure_start = None

        self._samples.append((t_ms, closed))
        self._closed_count += closed
        horizon = t_ms - cfg.window_ms
        while self._samples[0][0] <= horizon:
            _, was_closed = self._samples.popleft()
            self._closed_count -= was_closed
        while self._closures and self._closures[0].end_ms <= horizon:
            self._closures.popleft()

        current = t_ms - self._closure_start if self._closure_start is not None else 0.0
        longest = max((c.duration_ms for c in self._closures), default=0.0)
        metrics = VigilanceMetrics(
            window_ms=cfg.window_ms,
            blink_count=sum(1 for c in self._closures if c.duration_ms < cfg.blink_max_ms),
            perclos=self._closed_count / len(self._samples),
            current_closure_ms=current,
            longest_closure_ms=max(longest, current),
        )
        return event, metrics


class PeakDetector:
    """Systolic peak picker for the PPG channel.

    A sample is a peak when it is a local maximum (strictly above the sample
    before, not below the sample after), exceeds ``rel_threshold`` times the
    maximum over the trailing ``max_window_ms``, and lies at least
    ``refractory_ms`` after the previous peak. Confirming a maximum needs the
    following sample, so peaks are reported one sample late, stamped with the
    peak's own time.
    """

    def __init__(self, config: PeakDetectorConfig | None = None) -> None:
        self.config = config or PeakDetectorConfig()
        self._clock = _Clock()
        self._window: deque[tuple[float, float]] = deque()  # monotonically decreasing values
        self._prev: list[tuple[float, float]] = []
        self.last_peak_ms: float | None = None

    def update(self, sample: SensorSample) -> float | None:
        t, v = sample.t_ms, sample.ppg_ir
        self._clock.tick(t)
        cfg = self.config

        while self._window and self._window[-1][1] <= v:
            self._window.pop()
        self._window.append((t, v))
        while self._window[0][0] <= t - cfg.max_window_ms:
            self._window.popleft()
        rolling_max = self._window[0][1]

        peak = None
        if len(self._prev) == 2:
            (_, v0), (t1, v1) = self._prev
            if (
                v0 < v1 >= v
                and v1 > cfg.rel_threshold * rolling_max
                and (self.last_peak_ms is None or t1 - self.last_peak_ms >= cfg.refractory_ms)
            ):
                peak = t1
                self.last_peak_ms = t1
        self._prev = [*self._prev[-1:], (t, v)]
        return peak


class HeartRateEstimator:
    """Heart rate, its slow baseline, and the slowdown flag.

    ``bpm`` is 60000 over the median inter-peak interval among peaks in the
    trailing ``bpm_window_ms``; the estimate is valid once that window holds at
    least ``min_peaks`` peaks and the rate is physiological. The baseline is a
    time-constant EMA of ``bpm`` that stops updating while slowdown is flagged,
    so a sustained drop cannot drag its own reference down.
    """

    def __init__(self, config: HeartConfig | None = None) -> None:
        self.config = config or HeartConfig()
        self._clock = _Clock()
        self._peaks: deque[float] = deque()
        self._bpm: float | None = None
        self._dirty = False
        self.baseline_bpm: float | None = None
        self._last_update: float | None = None

    def update(self, now_ms: float, peak_ms: float | None = None) -> HeartEstimate:
        self._clock.tick(now_ms)
        cfg = self.config
        if peak_ms is not None:
            if self._peaks and peak_ms <= self._peaks[-1]:
                raise TimeOrderError(peak_ms, self._peaks[-1])
            self._peaks.append(peak_ms)
            self._dirty = True
        while self._peaks and self._peaks[0] <= now_ms - cfg.bpm_window_ms:
            self._peaks.popleft()
            self._dirty = True
        if self._dirty:
            self._bpm = self._median_bpm()
            self._dirty = False

        dt = now_ms - self._last_update if self._last_update is not None else 0.0
        self._last_update = now_ms
        bpm = self._bpm
        lo, hi = BPM_RANGE
        if bpm is None or not lo <= bpm <= hi:
            return HeartEstimate(0.0, self.baseline_bpm or 0.0, slowdown=False, valid=False)

        if self.baseline_bpm is None:
            self.baseline_bpm = bpm
        slowdown = bpm < cfg.slowdown_ratio * self.baseline_bpm
        if not slowdown:
            alpha = 1.0 - math.exp(-dt / cfg.baseline_tau_ms)
            self.baseline_bpm += alpha * (bpm - self.baseline_bpm)
        return HeartEstimate(bpm, self.baseline_bpm, slowdown=slowdown, valid=True)

    def _median_bpm(self) -> float | None:
        if len(self._peaks) < self.config.min_peaks:
            return None
        p = self._peaks
        intervals = [b - a for a, b in zip(p, list(p)[1:])]
        return 60000.0 / statistics.median(intervals)
