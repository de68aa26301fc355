"""Run configuration, the fixed-tick simulation loop, reporting and CSV traces.

One tick per generated sample: classify the eye, update blink metrics, pick
PPG peaks, update the heart estimate, step the alert state machine, then
drive the outputs (siren pattern, vibrator duty, GSM bytes).

Config files use the scenario grammar's ``key value`` lines with one
namespaced key per tunable, e.g. ``escalate.t_blink_ms 400``. A relative
``scenario`` path is resolved against the config file's directory.
"""

from __future__ import annotations

import io
import logging
from dataclasses import dataclass, field
from pathlib import Path

from ._lines import iter_directives
from .detect import (
    BlinkTracker,
    BlinkTrackerConfig,
    EyeClassifier,
    EyeClassifierConfig,
    EyeState,
    HeartConfig,
    HeartRateEstimator,
    PeakDetector,
    PeakDetectorConfig,
)
from .device import GsmAlert, SirenPattern, buzzer_signal, encode_gsm_at
from .errors import ConfigError
from .escalate import AlertLevel, AlertState, EscalationConfig, Transition, episode_log, step
from .signal_gen import GroundTruth, Scenario, format_number, generate, parse_scenario

log = logging.getLogger(__name__)

CSV_HEADER = "t_ms,eye_ir,ppg_ir,eye_closed,perclos,bpm,slowdown,level,buzzer,vibrator_duty"

# config key -> (RunConfig section, field on that section's dataclass)
_KEYS: dict[str, tuple[str, str]] = {
    "detect.close_threshold": ("eye", "close_threshold"),
    "detect.open_threshold": ("eye", "open_threshold"),
    "detect.debounce_ms": ("eye", "debounce_ms"),
    "detect.perclos_window_ms": ("blink", "window_ms"),
    "detect.blink_max_ms": ("blink", "blink_max_ms"),
    "detect.refractory_ms": ("peaks", "refractory_ms"),
    "detect.rel_threshold": ("peaks", "rel_threshold"),
    "detect.peak_window_ms": ("peaks", "max_window_ms"),
    "detect.bpm_window_ms": ("heart", "bpm_window_ms"),
    "detect.baseline_tau_ms": ("heart", "baseline_tau_ms"),
    "detect.slowdown_ratio": ("heart", "slowdown_ratio"),
    "detect.min_peaks": ("heart", "min_peaks"),
    "escalate.t_blink_ms": ("escalation", "t_blink_ms"),
    "escalate.t_persist_ms": ("escalation", "t_persist_ms"),
    "escalate.t_recover_ms": ("escalation", "t_recover_ms"),
    "escalate.slowdown_required": ("escalation", "slowdown_required"),
    "escalate.dropout_failsafe_ms": ("escalation", "dropout_failsafe_ms"),
    "device.vib_duty": ("escalation", "vib_duty"),
    "device.siren_period_ms": ("siren", "period_ms"),
    "device.siren_duty": ("siren", "duty"),
}
_SECTION_TYPES = {
    "eye": EyeClassifierConfig,
    "blink": BlinkTrackerConfig,
    "peaks": PeakDetectorConfig,
    "heart": HeartConfig,
    "escalation": EscalationConfig,
    "siren": SirenPattern,
}
_INT_FIELDS = {"min_peaks", "vib_duty"}
_BOOL_FIELDS = {"slowdown_required"}


@dataclass(frozen=True)
class RunConfig:
    scenario_path: Path
    eye: EyeClassifierConfig = field(default_factory=EyeClassifierConfig)
    blink: BlinkTrackerConfig = field(default_factory=BlinkTrackerConfig)
    peaks: PeakDetectorConfig = field(default_factory=PeakDetectorConfig)
    heart: HeartConfig = field(default_factory=HeartConfig)
    escalation: EscalationConfig = field(default_factory=EscalationConfig)
    siren: SirenPattern = field(default_factory=SirenPattern)
    csv_path: Path | None = None
    seed: int | None = None

    def load_scenario(self) -> Scenario:
        scenario = parse_scenario(self.scenario_path.read_text(encoding="utf-8"))
        return scenario if self.seed is None else scenario.with_seed(self.seed)


def _parse_value(key: str, name: str, token: str, line: int):
    try:
        if name in _BOOL_FIELDS:
            lowered = token.lower()
            if lowered not in ("true", "false"):
                raise ValueError
            return lowered == "true"
        if name in _INT_FIELDS:
            return int(token)
        return float(token)
    except ValueError:
        raise ConfigError(key, f"cannot parse value {token!r}", line) from None


def parse_config(text: str, base_dir: Path | str = ".") -> RunConfig:
    """Parse config-file text. Raises :class:`ConfigError` naming the bad key."""
    base = Path(base_dir)
    sections: dict[str, dict[str, object]] = {name: {} for name in _SECTION_TYPES}
    key_lines: dict[str, int] = {}
    scenario_path = None
    csv_path = None
    recipient = body = None

    for lineno, tokens, rest in iter_directives(text):
        key = tokens[0]
        if key in key_lines:
            raise ConfigError(key, "duplicate key", lineno)
        key_lines[key] = lineno
        # Free-text values take the rest of the line.
        if key == "gsm.body":
            body = rest
            continue
        if key in ("scenario", "output.csv"):
            if not rest:
                raise ConfigError(key, "expects a path", lineno)
            if key == "scenario":
                scenario_path = base / rest
            else:
                csv_path = base / rest
            continue
        if len(tokens) != 2:
            raise ConfigError(key, "expects exactly one value", lineno)
        if key == "gsm.recipient":
            recipient = tokens[1]
        elif key in _KEYS:
            section, name = _KEYS[key]
            sections[section][name] = _parse_value(key, name, tokens[1], lineno)
        else:
            raise ConfigError(key, "unknown key", lineno)

    if scenario_path is None:
        raise ConfigError("scenario", "missing required key")

    default_alert = EscalationConfig().gsm_alert
    alert = GsmAlert(
        recipient if recipient is not None else default_alert.recipient,
        body if body is not None else default_alert.body,
    )
    for problem in alert.problems():
        key = "gsm.recipient" if "recipient" in problem else "gsm.body"
        raise ConfigError(key, problem, key_lines.get(key))
    sections["escalation"]["gsm_alert"] = alert

    built = {}
    for section, cls in _SECTION_TYPES.items():
        try:
            built[section] = cls(**sections[section])
        except ConfigError as exc:
            key = _key_for(section, exc.field)
            raise ConfigError(key, str(exc).split(": ", 1)[-1], key_lines.get(key)) from None
        except ValueError as exc:
            key = _key_for(section, None)
            raise ConfigError(key, str(exc), key_lines.get(key)) from None
    return RunConfig(scenario_path=scenario_path, csv_path=csv_path, **built)


def _key_for(section: str, name: str | None) -> str:
    for key, (sec, fld) in _KEYS.items():
        if sec == section and (name is None or fld == name):
            return key
    return f"{section}.{name}"


def load_config(path: Path | str) -> RunConfig:
    path = Path(path)
    return parse_config(path.read_text(encoding="utf-8"), base_dir=path.parent)


def format_config(config: RunConfig) -> str:
    """Write every tunable of ``config`` in the config grammar."""
    lines = [f"scenario {config.scenario_path.as_posix()}"]
    for key, (section, name) in _KEYS.items():
        value = getattr(getattr(config, section), name)
        if isinstance(value, bool):
            text = "true" if value else "false"
        elif isinstance(value, int):
            text = str(value)
        else:
            text = format_number(value)
        lines.append(f"{key} {text}")
    alert = config.escalation.gsm_alert
    lines.append(f"gsm.recipient {alert.recipient}")
    lines.append(f"gsm.body {alert.body}")
    if config.csv_path is not None:
        lines.append(f"output.csv {config.csv_path.as_posix()}")
    return "\n".join(lines) + "\n"


@dataclass(frozen=True, slots=True)
class TickRecord:
    t_ms: float
    eye_ir: float
    ppg_ir: float
    eye_closed: bool
    perclos: float
    bpm: float
    slowdown: bool
    level: AlertLevel
    buzzer: bool
    vibrator_duty: int
    siren: bool


@dataclass(frozen=True, slots=True)
class Episode:
    """One excursion from Awake. Times are None for stages never reached."""

    stage1_ms: float
    stage2_ms: float | None
    end_ms: float | None
    detection_latency_ms: float | None


@dataclass
class RunReport:
    transitions: list[Transition]
    episodes: list[Episode]
    false_alarm_count: int
    missed_count: int
    gsm_payloads: list[bytes]
    trace: list[TickRecord]
    truth: GroundTruth
    scenario: Scenario

    @property
    def detection_latencies_ms(self) -> list[float]:
        return [e.detection_latency_ms for e in self.episodes if e.detection_latency_ms is not None]

    def summary(self) -> dict[str, str]:
        lat = self.detection_latencies_ms
        return {
            "ticks": str(len(self.trace)),
            "episodes": str(len(self.episodes)),
            "false_alarms": str(self.false_alarm_count),
            "misses": str(self.missed_count),
            "gsm_alerts": str(len(self.gsm_payloads)),
            "mean_latency_ms": f"{sum(lat) / len(lat):.4f}" if lat else "na",
            "max_latency_ms": f"{max(lat):.4f}" if lat else "na",
        }


def run(config: RunConfig, scenario: Scenario | None = None) -> RunReport:
    """Simulate one scenario end to end.

    ``scenario`` overrides the one named in ``config`` (the seed override in
    ``config`` still applies).
    """
    if scenario is None:
        scenario = config.load_scenario()
    elif config.seed is not None:
        scenario = scenario.with_seed(config.seed)
    samples, truth = generate(scenario)
    log.debug("running %d ticks at %g Hz", len(samples), scenario.sample_rate_hz)

    eye_clf = EyeClassifier(config.eye)
    blinks = BlinkTracker(config.blink)
    peaks = PeakDetector(config.peaks)
    heart_est = HeartRateEstimator(config.heart)
    esc_cfg = config.escalation
    state = AlertState()

    trace: list[TickRecord] = []
    gsm_payloads: list[bytes] = []
    for sample in samples:
        t = sample.t_ms
        eye_state = eye_clf.update(sample)
        _, vig = blinks.update(t, eye_state)
        heart = heart_est.update(t, peaks.update(sample))
        state, cmd = step(state, t, vig, heart, esc_cfg)
        if cmd.gsm is not None:
            gsm_payloads.append(encode_gsm_at(cmd.gsm))
        trace.append(
            TickRecord(
                t_ms=t,
                eye_ir=sample.eye_ir,
                ppg_ir=sample.ppg_ir,
                eye_closed=eye_state is EyeState.CLOSED,
                perclos=vig.perclos,
                bpm=heart.bpm,
                slowdown=heart.slowdown,
                level=state.level,
                buzzer=cmd.buzzer_on,
                vibrator_duty=cmd.vibrator_duty,
                siren=cmd.buzzer_on and buzzer_signal(config.siren, t),
            )
        )

    transitions = episode_log((r.t_ms, r.level) for r in trace)
    episodes, false_alarms, missed = _score(transitions, truth, scenario, config)
    return RunReport(
        transitions=transitions,
        episodes=episodes,
        false_alarm_count=false_alarms,
        missed_count=missed,
        gsm_payloads=gsm_payloads,
        trace=trace,
        truth=truth,
        scenario=scenario,
    )


def _score(
    transitions: list[Transition],
    truth: GroundTruth,
    scenario: Scenario,
    config: RunConfig,
) -> tuple[list[Episode], int, int]:
    esc = config.escalation
    # Detected edges trail the true ones by the debounce plus sample quantization.
    slack = config.eye.debounce_ms + 2 * scenario.period_ms

    raw: list[dict] = []
    for tr in transitions:
        if tr.from_level is AlertLevel.AWAKE:
            raw.append({"stage1_ms": tr.t_ms, "stage2_ms": None, "end_ms": None})
        elif tr.to_level is AlertLevel.STAGE2:
            raw[-1]["stage2_ms"] = tr.t_ms
        elif tr.to_level is AlertLevel.AWAKE:
            raw[-1]["end_ms"] = tr.t_ms

    long_closures = [(s, e) for s, e in truth.blink_events if e - s >= esc.t_blink_ms]
    episodes = []
    false_alarms = 0
    for ep in raw:
        entry = ep["stage1_ms"]
        match = next((s for s, e in long_closures if s <= entry <= e + slack), None)
        if match is None:
            false_alarms += 1
            latency = None
        else:
            latency = entry - match - esc.t_blink_ms
        episodes.append(Episode(detection_latency_ms=latency, **ep))

    stage2_entries = [ep.stage2_ms for ep in episodes if ep.stage2_ms is not None]
    missed = sum(
        1
        for s, e in truth.blink_events
        if e - s >= esc.t_blink_ms + esc.t_persist_ms
        and not any(s <= t2 <= e + slack for t2 in stage2_entries)
    )
    return episodes, false_alarms, missed


def format_csv(report: RunReport) -> str:
    out = io.StringIO()
    out.write(CSV_HEADER + "\n")
    for r in report.trace:
        out.write(
            f"{r.t_ms:.4f},{r.eye_ir:.4f},{r.ppg_ir:.4f},{int(r.eye_closed)},{r.perclos:.4f},"
            f"{r.bpm:.4f},{int(r.slowdown)},{r.level.value},{int(r.buzzer)},{r.vibrator_duty}\n"
        )
    return out.getvalue()


def emit_csv(report: RunReport, path: Path | str) -> Path:
    """Write the per-tick trace as CSV with LF line endings."""
    path = Path(path)
    with open(path, "w", encoding="ascii", newline="") as fh:
        fh.write(format_csv(report))
    return path


__all__ = [
    "CSV_HEADER",
    "Episode",
    "RunConfig",
    "RunReport",
    "TickRecord",
    "emit_csv",
    "format_config",
    "format_csv",
    "load_config",
    "parse_config",
    "run",
]
