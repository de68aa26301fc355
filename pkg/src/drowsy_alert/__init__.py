"""Drowsy-driver sensing, detection and alert escalation simulator."""

from .detect import (
    BlinkEvent,
    BlinkTracker,
    BlinkTrackerConfig,
    EyeClassifier,
    EyeClassifierConfig,
    EyeState,
    HeartConfig,
    HeartEstimate,
    HeartRateEstimator,
    PeakDetector,
    PeakDetectorConfig,
    VigilanceMetrics,
    compute_perclos,
)
from .device import (
    BoardProfile,
    GsmAlert,
    GsmEncodeError,
    SirenPattern,
    buzzer_signal,
    decode_gsm_at,
    encode_gsm_at,
    validate_board,
)
from .errors import ConfigError, TimeOrderError
from .escalate import ActuatorCommand, AlertLevel, AlertState, EscalationConfig, Transition, episode_log, step
from .harness import RunConfig, RunReport, emit_csv, format_config, load_config, parse_config, run
from .signal_gen import (
    GroundTruth,
    Scenario,
    ScenarioError,
    ScenarioEvent,
    SensorSample,
    generate,
    parse_scenario,
    ppg_waveform,
)

__version__ = "0.1.0"
