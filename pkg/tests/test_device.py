import random
import string
from pathlib import Path

import pytest
from hypothesis import given
from hypothesis import strategies as st

from drowsy_alert.device import (
    DEFAULT_BOARD,
    BoardProfile,
    GsmAlert,
    GsmEncodeError,
    SirenPattern,
    buzzer_signal,
    decode_gsm_at,
    encode_gsm_at,
    validate_board,
)

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"

recipients = st.builds(lambda d: "+" + d, st.text(alphabet=string.digits, min_size=7, max_size=15))
bodies = st.text(alphabet=st.characters(min_codepoint=0x20, max_codepoint=0x7E), max_size=160)


class TestEncodeGsm:
    def test_example_bytes(self):
        out = encode_gsm_at(GsmAlert("+15551234567", "DROWSY DRIVER ALERT"))
        assert out == b'AT+CMGF=1\rAT+CMGS="+15551234567"\rDROWSY DRIVER ALERT\x1a'

    def test_matches_golden_file(self):
        golden = (FIXTURES / "gsm_alert.bin").read_bytes()
        assert encode_gsm_at(GsmAlert("+15551234567", "DROWSY DRIVER ALERT")) == golden

    def test_body_too_long(self):
        with pytest.raises(GsmEncodeError, match="too long"):
            encode_gsm_at(GsmAlert("+15551234567", "x" * 161))

    def test_body_at_limit(self):
        assert encode_gsm_at(GsmAlert("+15551234567", "x" * 160)).endswith(b"x\x1a")

    @pytest.mark.parametrize("recipient", ["12345", "+123456", "+1234567890123456", "+1555abc4567", "", "++15551234"])
    def test_invalid_recipient(self, recipient):
        with pytest.raises(GsmEncodeError, match="recipient"):
            encode_gsm_at(GsmAlert(recipient, "hi"))

    @pytest.mark.parametrize("body", ["café", "line\nbreak", "tab\there", "ctrl\x1a"])
    def test_non_printable_body(self, body):
        with pytest.raises(GsmEncodeError, match="ASCII"):
            encode_gsm_at(GsmAlert("+15551234567", body))

    @given(recipients, bodies)
    def test_round_trip(self, recipient, body):
        alert = GsmAlert(recipient, body)
        assert decode_gsm_at(encode_gsm_at(alert)) == alert

    @given(recipients, bodies)
    def test_exact_length(self, recipient, body):
        # "AT+CMGF=1\r" (10) + 'AT+CMGS="' + recipient + '"\r' (11 + R) + body + Ctrl-Z (1)
        assert len(encode_gsm_at(GsmAlert(recipient, body))) == 10 + (11 + len(recipient)) + len(body) + 1

    @pytest.mark.parametrize(
        "payload",
        [b"", b"AT+CMGF=1\r", b'AT+CMGF=0\rAT+CMGS="+15551234567"\rhi\x1a', b'AT+CMGF=1\rAT+CMGS="+15551234567"\rhi'],
    )
    def test_decoder_rejects_malformed(self, payload):
        with pytest.raises(GsmEncodeError):
            decode_gsm_at(payload)


class TestBuzzer:
    def test_on_in_first_half(self):
        assert buzzer_signal(SirenPattern(500, 0.5), 100) is True

    def test_off_in_second_half(self):
        assert buzzer_signal(SirenPattern(500, 0.5), 300) is False

    @given(st.floats(1, 5000), st.floats(0.01, 1.0), st.integers(0, 10**6), st.integers(0, 20))
    def test_periodic(self, period, duty, t, k):
        p = SirenPattern(round(period), duty)
        assert buzzer_signal(p, t) == buzzer_signal(p, t + k * p.period_ms)

    @given(st.integers(1, 2000), st.floats(0.001, 1.0))
    def test_on_fraction(self, period, duty):
        p = SirenPattern(period, duty)
        on = sum(buzzer_signal(p, t) for t in range(period))
        assert abs(on / period - duty) <= 1 / period

    @pytest.mark.parametrize("kwargs", [{"period_ms": 0}, {"duty": 0}, {"duty": 1.5}])
    def test_pattern_invariants(self, kwargs):
        with pytest.raises(ValueError):
            SirenPattern(**kwargs)


class TestBoard:
    def test_default_profile_fits(self):
        assert validate_board(DEFAULT_BOARD) == []

    def test_fifteen_digital_pins(self):
        profile = BoardProfile(digital_pins_used=frozenset(range(15)))
        assert validate_board(profile) == ["digital 15 > 14"]

    def test_seven_pwm_pins(self):
        profile = BoardProfile(digital_pins_used=frozenset(range(10)), pwm_pins_used=frozenset(range(7)))
        assert validate_board(profile) == ["pwm 7 > 6"]

    def test_pwm_must_be_digital(self):
        profile = BoardProfile(digital_pins_used=frozenset({2}), pwm_pins_used=frozenset({9}))
        assert validate_board(profile) == ["pwm pins not among digital pins: [9]"]

    def test_clock(self):
        assert validate_board(BoardProfile(clock_hz=8_000_000)) == ["clock 8000000 != 16000000"]

    def test_reports_every_violation(self):
        profile = BoardProfile(
            digital_pins_used=frozenset(range(16)),
            analog_pins_used=frozenset(f"A{i}" for i in range(8)),
            pwm_pins_used=frozenset(range(9)),
        )
        assert validate_board(profile) == ["digital 16 > 14", "analog 8 > 6", "pwm 9 > 6"]

    def test_random_profiles_within_limits_accepted(self):
        rng = random.Random(0)
        for _ in range(200):
            digital = frozenset(rng.sample(range(14), rng.randint(0, 14)))
            pwm = frozenset(rng.sample(sorted(digital), min(len(digital), rng.randint(0, 6))))
            analog = frozenset(rng.sample([f"A{i}" for i in range(6)], rng.randint(0, 6)))
            assert validate_board(BoardProfile(digital, analog, pwm)) == []
