"""Output encodings for the alert hardware and the Arduino Uno pin budget.

Covers the piezo siren on/off pattern, the GSM modem's SMS text-mode AT
command bytes, and a check that a pin assignment fits the Uno board.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

CR = b"\r"
CTRL_Z = b"\x1a"
SMS_MAX_CHARS = 160

UNO_DIGITAL_PINS = 14
UNO_ANALOG_PINS = 6
UNO_PWM_PINS = 6
UNO_CLOCK_HZ = 16_000_000

_RECIPIENT = re.compile(r"\+[0-9]{7,15}")
_PRINTABLE = re.compile(r"[\x20-\x7e]*")


class GsmEncodeError(ValueError):
    pass


@dataclass(frozen=True, slots=True)
class GsmAlert:
    recipient: str
    body: str

    def problems(self) -> list[str]:
        out = []
        if not _RECIPIENT.fullmatch(self.recipient):
            out.append(f"invalid recipient {self.recipient!r}: expected '+' followed by 7-15 digits")
        if not _PRINTABLE.fullmatch(self.body):
            out.append("body must be printable ASCII")
        if len(self.body) > SMS_MAX_CHARS:
            out.append(f"body too long: {len(self.body)} > {SMS_MAX_CHARS} characters")
        return out


DEFAULT_ALERT = GsmAlert("+15551234567", "DROWSY DRIVER ALERT")


def encode_gsm_at(alert: GsmAlert) -> bytes:
    """Encode ``alert`` as the AT command sequence that sends it as a text SMS.

    ``AT+CMGF=1<CR>AT+CMGS="<recipient>"<CR><body><Ctrl-Z>``; nothing else.

    Raises:
        GsmEncodeError: for a malformed recipient, a non-ASCII or
            non-printable body, or a body over 160 characters.
    """
    problems = alert.problems()
    if problems:
        raise GsmEncodeError("; ".join(problems))
    return (
        b"AT+CMGF=1" + CR
        + b'AT+CMGS="' + alert.recipient.encode("ascii") + b'"' + CR
        + alert.body.encode("ascii") + CTRL_Z
    )


_AT_FRAME = re.compile(rb'AT\+CMGF=1\rAT\+CMGS="(\+[0-9]{7,15})"\r([\x20-\x7e]{0,160})\x1a', re.DOTALL)


def decode_gsm_at(payload: bytes) -> GsmAlert:
    """Parse a text-mode send sequence back into its recipient and body."""
    m = _AT_FRAME.fullmatch(payload)
    if m is None:
        raise GsmEncodeError("payload is not a single text-mode CMGS send sequence")
    return GsmAlert(m.group(1).decode("ascii"), m.group(2).decode("ascii"))


@dataclass(frozen=True, slots=True)
class SirenPattern:
    period_ms: float = 500.0
    duty: float = 0.5

    def __post_init__(self) -> None:
        if not self.period_ms > 0:
            raise ValueError(f"siren period_ms must be > 0, got {self.period_ms:g}")
        if not 0 < self.duty <= 1:
            raise ValueError(f"siren duty must be in (0, 1], got {self.duty:g}")


def buzzer_signal(pattern: SirenPattern, t_ms: float) -> bool:
    """Whether the siren is sounding at ``t_ms`` while the buzzer is enabled."""
    return (t_ms % pattern.period_ms) < pattern.duty * pattern.period_ms


@dataclass(frozen=True)
class BoardProfile:
    digital_pins_used: frozenset[int] = field(default_factory=frozenset)
    analog_pins_used: frozenset[str] = field(default_factory=frozenset)
    pwm_pins_used: frozenset[int] = field(default_factory=frozenset)
    clock_hz: int = UNO_CLOCK_HZ


# IR LED drivers on D2/D3, buzzer on D8, vibrator motor-driver PWM on D9,
# eye and finger phototransistors on A0/A1.
DEFAULT_BOARD = BoardProfile(
    digital_pins_used=frozenset({2, 3, 8, 9}),
    analog_pins_used=frozenset({"A0", "A1"}),
    pwm_pins_used=frozenset({9}),
)


def validate_board(profile: BoardProfile) -> list[str]:
    """Every way ``profile`` exceeds the Uno's resources; empty when it fits."""
    violations = []
    n_dig = len(profile.digital_pins_used)
    n_ana = len(profile.analog_pins_used)
    n_pwm = len(profile.pwm_pins_used)
    if n_dig > UNO_DIGITAL_PINS:
        violations.append(f"digital {n_dig} > {UNO_DIGITAL_PINS}")
    if n_ana > UNO_ANALOG_PINS:
        violations.append(f"analog {n_ana} > {UNO_ANALOG_PINS}")
    if n_pwm > UNO_PWM_PINS:
        violations.append(f"pwm {n_pwm} > {UNO_PWM_PINS}")
    stray = profile.pwm_pins_used - profile.digital_pins_used
    if stray:
        violations.append(f"pwm pins not among digital pins: {sorted(stray)}")
    if profile.clock_hz != UNO_CLOCK_HZ:
        violations.append(f"clock {profile.clock_hz} != {UNO_CLOCK_HZ}")
    return violations
