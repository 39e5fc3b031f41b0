"""Scenario files: INI-style sections of typed ``key = value`` pairs.

Angles are written in degrees (keys ending in ``_deg``) and converted to
radians on load; every other quantity is SI. Lists accept
``a, b, c``, ``linspace(start, stop, num)`` or ``logspace(start, stop, num)``.
"""

from __future__ import annotations

import configparser
import hashlib
import math
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable

import numpy as np

MODES = ("freefall", "eotvos", "cavendish", "montecarlo", "sweep")


class ConfigError(ValueError):
    """Invalid scenario file. ``kind`` is one of 'io', 'parse', 'unknown-key', 'invariant'."""

    def __init__(self, kind: str, message: str):
        super().__init__(f"[{kind}] {message}")
        self.kind = kind


_LIST_FUNC = re.compile(r"^(linspace|logspace)\(\s*([^,]+),\s*([^,]+),\s*([^,)]+)\)$")


def parse_float(text: str) -> float:
    value = float(text)
    if not math.isfinite(value):
        raise ValueError(f"non-finite number {text!r}")
    return value


def parse_int(text: str) -> int:
    value = float(text)
    if value != int(value):
        raise ValueError(f"expected an integer, got {text!r}")
    return int(value)


def parse_bool(text: str) -> bool:
    lowered = text.strip().lower()
    if lowered in ("true", "yes", "on", "1"):
        return True
    if lowered in ("false", "no", "off", "0"):
        return False
    raise ValueError(f"expected a boolean, got {text!r}")


def parse_list(text: str) -> np.ndarray:
    text = text.strip()
    m = _LIST_FUNC.match(text)
    if m:
        func, a, b, k = m.groups()
        num = parse_int(k)
        if num < 1:
            raise ValueError("list length must be >= 1")
        return getattr(np, func)(parse_float(a), parse_float(b), num)
    return np.array([parse_float(tok) for tok in text.split(",") if tok.strip()])


def parse_optional_float(text: str) -> float | None:
    return None if text.strip().lower() == "auto" else parse_float(text)


@dataclass(frozen=True)
class Key:
    parse: Callable[[str], Any]
    default: Any = None
    required: bool = False
    doc: str = ""


REAL = parse_float
LIST = parse_list

WEP_SECTION = {
    "r1": Key(REAL, 1.0),
    "r2": Key(REAL, 1.0),
    "r_abs": Key(REAL, 0.0),
    "phi_r_deg": Key(REAL, 0.0),
}

STATE_SECTION = {
    "n": Key(REAL, 1.0),
    "theta_deg": Key(REAL, 90.0),
    "phi_deg": Key(LIST, np.array([0.0])),
}


def _arm_section(count_default: int = 1) -> dict[str, Key]:
    return {
        "n": Key(REAL, 0.0),
        "theta_deg": Key(REAL, 0.0),
        "phi_deg": Key(REAL, 0.0),
        "count": Key(parse_int, count_default),
    }


EARTH_SECTION = {
    "latitude_deg": Key(LIST, np.array([45.0])),
    "tilt_deg": Key(REAL, 23.4),
    "omega": Key(REAL, 7.2921159e-5, doc="rad/s"),
    "omega_bar": Key(REAL, 1.99102e-7, doc="rad/s"),
    "earth_radius": Key(REAL, 6.371e6),
    "sun_distance": Key(REAL, 1.495978707e11),
    "g": Key(REAL, 9.81),
    "G_N": Key(REAL, 6.67430e-11),
    "sun_mass": Key(REAL, 1.98847e30),
    "orbital_phase_deg": Key(REAL, 0.0),
    "include_orbital": Key(parse_bool, True),
}

SCHEMA: dict[str, dict[str, dict[str, Key]]] = {
    "freefall": {
        "wep": WEP_SECTION,
        "state": STATE_SECTION,
        "freefall": {"g": Key(REAL, 9.81)},
    },
    "eotvos": {
        "wep": WEP_SECTION,
        "earth": EARTH_SECTION,
        "balance": {
            "ell": Key(REAL, 1.0),
            "theta_tilde_deg": Key(LIST, np.array([0.0])),
            "phi_tilde_deg": Key(parse_optional_float, None, doc="'auto' solves the equilibrium tilt"),
        },
        "masses": {"m_A": Key(REAL, 1.0), "m_B": Key(REAL, 1.0)},
        "arm_A": _arm_section(),
        "arm_B": _arm_section(),
        "time": {
            "start": Key(REAL, 0.0),
            "stop": Key(REAL, 86400.0),
            "points": Key(parse_int, 97),
        },
    },
    "cavendish": {
        "wep": WEP_SECTION,
        "state": STATE_SECTION,
        "cavendish": {
            "m_s": Key(REAL, 1.0),
            "R_s": Key(REAL, 0.2),
            "R_t": Key(REAL, 7.5e-3),
            "omega_rot": Key(REAL, 2.0 * math.pi * 50.0),
            "theta_deg": Key(REAL, 0.0),
            "m": Key(REAL, 5e-6),
            "N": Key(parse_int, 1),
            "G_N": Key(REAL, 6.67430e-11),
            "delta_alpha_cl": Key(REAL, 0.0, doc="absolute classical noise, rad/s^2"),
        },
        "time": {
            "start": Key(REAL, 0.0),
            "stop": Key(REAL, 0.02),
            "points": Key(parse_int, 101),
        },
        "budget": {
            "torque_asd": Key(REAL, 2e-17),
            "integration_time": Key(REAL, 9 * 3600.0),
            "signal_freq": Key(REAL, 2.0 * math.pi * 100.0),
            "I_moment": Key(REAL, 2e-10),
        },
    },
    "montecarlo": {
        "montecarlo": {
            "samples": Key(parse_int, 100_000),
            "bins": Key(parse_int, 50),
            "checkpoints": Key(LIST, np.array([])),
            "algorithm": Key(str, "pcg64"),
            "seed": Key(parse_int, 0),
        },
    },
    "sweep": {
        "sweep": {
            "N": Key(parse_int, 100_000),
            "rel_classical_noise": Key(REAL, 1e-5),
            "n": Key(LIST, np.array([1.0])),
            "theta_deg": Key(LIST, np.array([90.0])),
            "phi_deg": Key(LIST, np.array([0.0])),
            "r_abs": Key(LIST, np.array([1e-3])),
            "phi_r_deg": Key(LIST, np.array([0.0])),
        },
    },
}

# sections that must appear in the file; the rest fall back to defaults
REQUIRED_SECTIONS = {
    "freefall": (),
    "eotvos": (),
    "cavendish": ("cavendish",),
    "montecarlo": (),
    "sweep": ("sweep",),
}

OPTIONAL_ONLY_IF_PRESENT = {"cavendish": ("budget",)}


@dataclass
class ScenarioConfig:
    mode: str
    sections: dict[str, dict[str, Any]]
    present: set[str] = field(default_factory=set)
    digest: str = ""
    source: str = ""

    def __getitem__(self, section: str) -> dict[str, Any]:
        return self.sections[section]


def _to_radians(key: str, value):
    if key.endswith("_deg") and value is not None:
        return np.radians(value) if isinstance(value, np.ndarray) else math.radians(value)
    return value


def parse_config_text(text: str, mode: str, source: str = "<string>") -> ScenarioConfig:
    if mode not in MODES:
        raise ConfigError("parse", f"unknown mode {mode!r}; choose from {', '.join(MODES)}")
    parser = configparser.ConfigParser(
        strict=True, interpolation=None, default_section="\x00unused", empty_lines_in_values=False
    )
    parser.optionxform = str  # keys are case-sensitive (R_s vs r_s)
    try:
        parser.read_string(text, source=source)
    except configparser.Error as exc:
        raise ConfigError("parse", str(exc).replace("\n", " ")) from None

    schema = SCHEMA[mode]
    present = set(parser.sections())
    if "scenario" in present:
        extra = set(parser["scenario"]) - {"mode"}
        if extra:
            raise ConfigError("unknown-key", f"[scenario] unknown key(s): {', '.join(sorted(extra))}")
        declared = parser["scenario"].get("mode", mode).strip()
        if declared != mode:
            raise ConfigError("invariant", f"[scenario] mode = {declared!r} but CLI mode is {mode!r}")
        present.discard("scenario")
    unknown = present - set(schema)
    if unknown:
        raise ConfigError("unknown-key", f"unknown section(s) for mode {mode!r}: {', '.join(sorted(unknown))}")
    missing = set(REQUIRED_SECTIONS[mode]) - present
    if missing:
        raise ConfigError("invariant", f"missing required section(s): {', '.join(sorted(missing))}")

    sections: dict[str, dict[str, Any]] = {}
    for name, keys in schema.items():
        raw = parser[name] if name in present else {}
        extra = set(raw) - set(keys)
        if extra:
            raise ConfigError("unknown-key", f"[{name}] unknown key(s): {', '.join(sorted(extra))}")
        values = {}
        for key, spec in keys.items():
            if key in raw:
                try:
                    value = spec.parse(raw[key])
                except ValueError as exc:
                    raise ConfigError("parse", f"[{name}] {key} = {raw[key]!r}: {exc}") from None
            elif spec.required:
                raise ConfigError("invariant", f"[{name}] missing required key {key!r}")
            else:
                value = spec.default
            values[key] = _to_radians(key, value)
        sections[name] = values

    digest = hashlib.sha256(text.encode("utf-8")).hexdigest()
    return ScenarioConfig(mode, sections, present, digest, source)


def load_config(path, mode: str) -> ScenarioConfig:
    path = Path(path)
    try:
        text = path.read_bytes().decode("utf-8")
    except OSError as exc:
        raise ConfigError("io", f"cannot read {path}: {exc.strerror or exc}") from None
    except UnicodeDecodeError:
        raise ConfigError("parse", f"{path} is not valid UTF-8") from None
    cfg = parse_config_text(text, mode, str(path))
    # build every domain object once so invariant violations surface at load time
    from .scenarios import build_objects

    try:
        build_objects(cfg)
    except ValueError as exc:
        raise ConfigError("invariant", str(exc)) from None
    return cfg
