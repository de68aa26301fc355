"""Canonical scenarios and the golden fixtures derived from them."""

from __future__ import annotations

import random
from pathlib import Path

from .device import DEFAULT_ALERT, encode_gsm_at
from .escalate import AlertLevel
from .harness import RunConfig, format_config, format_csv, run

A, S1, S2 = AlertLevel.AWAKE, AlertLevel.STAGE1, AlertLevel.STAGE2

GSM_GOLDEN = "gsm_alert.bin"
CSV_GOLDEN_SCENARIO = "closure_600ms"


def _alert_driver() -> str:
    # Ten minutes of ordinary blinking: 100-300 ms closures every 2.5-5.5 s.
    rng = random.Random(11)
    lines = [
        "# Alert driver: normal blinks only, steady heart rate, light sensor noise.",
        "duration 600000",
        "rate 100",
        "seed 11",
        "bpm 72",
        "event 0 setnoise 0.02",
    ]
    t = 2000
    while True:
        dur = rng.randrange(100, 301, 10)
        if t + dur > 598_000:
            break
        lines.append(f"event {t} blink {dur}")
        t += dur + rng.randrange(2500, 5501, 10)
    return "\n".join(lines) + "\n"


CANONICAL: dict[str, tuple[str, list[tuple[AlertLevel, AlertLevel]]]] = {
    "alert_driver": (_alert_driver(), []),
    "short_blink": (
        "# One ordinary blink.\n"
        "duration 10000\nrate 100\nseed 1\nbpm 72\n"
        "event 3000 blink 200\n",
        [],
    ),
    "closure_600ms": (
        "# A 600 ms closure with a steady heart rate: siren only, no escalation.\n"
        "duration 10000\nrate 100\nseed 2\nbpm 72\n"
        "event 3000 eyesclosed 600\n",
        [(A, S1), (S1, A)],
    ),
    "microsleep_slowdown": (
        "# Heart rate falls from 75 to 60 bpm, then a 5 s microsleep.\n"
        "duration 45000\nrate 100\nseed 3\nbpm 75\n"
        "event 20000 sethr 60\n"
        "event 30000 microsleep 5000\n",
        [(A, S1), (S1, S2), (S2, A)],
    ),
    "sensor_dropout": (
        "# Finger sensor drops out at 5 s; a 5 s microsleep at 25 s must still\n"
        "# escalate once the heart estimate has been invalid for over 10 s.\n"
        "duration 45000\nrate 100\nseed 4\nbpm 72\n"
        "event 5000 dropout 40000\n"
        "event 25000 microsleep 5000\n",
        [(A, S1), (S1, S2), (S2, A)],
    ),
}


def write_goldens(out_dir: Path | str) -> list[Path]:
    """Regenerate every fixture under ``out_dir`` and return the written paths."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    for name, (text, _) in CANONICAL.items():
        scn = out / f"{name}.scn"
        scn.write_text(text, encoding="utf-8", newline="\n")
        cfg = out / f"{name}.cfg"
        cfg.write_text(format_config(RunConfig(scenario_path=Path(scn.name))), encoding="utf-8", newline="\n")
        written += [scn, cfg]

    gsm = out / GSM_GOLDEN
    gsm.write_bytes(encode_gsm_at(DEFAULT_ALERT))
    written.append(gsm)

    csv_path = out / f"{CSV_GOLDEN_SCENARIO}.csv"
    report = run(RunConfig(scenario_path=out / f"{CSV_GOLDEN_SCENARIO}.scn"))
    csv_path.write_bytes(format_csv(report).encode("ascii"))
    written.append(csv_path)
    return written
