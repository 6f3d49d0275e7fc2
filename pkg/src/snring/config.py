"""Line-oriented configuration parsing.

Format: `key = value` lines, `#` comments, optional section headers
`[geometry] [params] [sweep] [output]`.  Keys are globally unique, so a
header only constrains which keys may follow it; an empty file resolves to
the full preset configuration.

List values: comma-separated entries, integer ranges `a..b` (inclusive),
float ranges `start:stop:step` (inclusive of stop up to half a step).
"""

from __future__ import annotations

import math
from typing import Callable, Optional

from .errors import ConfigError, SnRingError
from .sweeps import SweepConfig


def _parse_bool(raw: str) -> bool:
    lowered = raw.strip().lower()
    if lowered in ("true", "yes", "on", "1"):
        return True
    if lowered in ("false", "no", "off", "0"):
        return False
    raise ValueError(f"not a boolean: {raw!r}")


def _parse_float(raw: str) -> float:
    lowered = raw.strip().lower()
    if lowered in ("pi", "+pi"):
        return math.pi
    if lowered == "-pi":
        return -math.pi
    return float(raw)


def _parse_int_list(raw: str) -> tuple[int, ...]:
    values: list[int] = []
    for chunk in raw.split(","):
        chunk = chunk.strip()
        if not chunk:
            continue
        if ".." in chunk:
            lo_s, hi_s = chunk.split("..", 1)
            lo, hi = int(lo_s), int(hi_s)
            if hi < lo:
                raise ValueError(f"descending range {chunk!r}")
            values.extend(range(lo, hi + 1))
        else:
            values.append(int(chunk))
    if not values:
        raise ValueError("empty list")
    return tuple(values)


def _parse_float_list(raw: str) -> tuple[float, ...]:
    values: list[float] = []
    for chunk in raw.split(","):
        chunk = chunk.strip()
        if not chunk:
            continue
        if ":" in chunk:
            parts = chunk.split(":")
            if len(parts) != 3:
                raise ValueError(f"float range needs start:stop:step, got {chunk!r}")
            start, stop, step = (_parse_float(p) for p in parts)
            if step <= 0 or stop < start:
                raise ValueError(f"bad float range {chunk!r}")
            count = int(round((stop - start) / step)) + 1
            values.extend(start + k * step for k in range(count))
        else:
            values.append(_parse_float(chunk))
    if not values:
        raise ValueError("empty list")
    return tuple(values)


# key -> (section, parser); sections mirror the config file layout
KEY_TABLE: dict[str, tuple[str, Callable]] = {
    "n_ring": ("geometry", int),
    "mx": ("geometry", int),
    "my": ("geometry", int),
    "lead_rank": ("geometry", int),
    "lead_i_sites": ("geometry", _parse_int_list),
    "lead_ii_sites": ("geometry", _parse_int_list),
    "sc_sites": ("geometry", _parse_int_list),
    "ring_contact_sites": ("geometry", _parse_int_list),
    "eps_ring": ("params", _parse_float),
    "t_ring": ("params", _parse_float),
    "eps_spacer": ("params", _parse_float),
    "t_x": ("params", _parse_float),
    "t_y": ("params", _parse_float),
    "t_x_prime": ("params", _parse_float),
    "gamma_i": ("params", _parse_float),
    "gamma_ii": ("params", _parse_float),
    "delta_abs": ("params", _parse_float),
    "g": ("params", _parse_float),
    "t_ar": ("params", _parse_float),
    "experiment": ("sweep", str),
    "energy": ("sweep", _parse_float),
    "e_min": ("sweep", _parse_float),
    "e_max": ("sweep", _parse_float),
    "n_energies": ("sweep", int),
    "flux_a": ("sweep", _parse_float),
    "flux_b": ("sweep", _parse_float),
    "t_ar_values": ("sweep", _parse_float_list),
    "mx_values": ("sweep", _parse_int_list),
    "my_values": ("sweep", _parse_int_list),
    "workers": ("sweep", int),
    "format": ("output", str),
    "ldos": ("output", _parse_bool),
    "plot": ("output", _parse_bool),
    "out_dir": ("output", str),
}

SECTIONS = ("geometry", "params", "sweep", "output")

# config keys whose SweepConfig field is named differently
FIELD_NAME = {"format": "out_format"}


def _parse_value(key: str, raw: str, line_no: Optional[int] = None):
    section_parser = KEY_TABLE.get(key)
    if section_parser is None:
        raise ConfigError(f"unknown key {key!r}", line=line_no)
    try:
        return section_parser[1](raw.strip())
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"bad value for {key!r}: {exc}", line=line_no) from exc


def parse_config(text: str, overrides: Optional[list[str]] = None) -> SweepConfig:
    """Parse config text, apply `key=value` overrides, resolve to a SweepConfig.

    Override precedence: overrides > file > presets.
    """
    fields: dict[str, object] = {}
    seen_lines: dict[str, int] = {}
    section: Optional[str] = None
    for line_no, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("["):
            if not line.endswith("]"):
                raise ConfigError("unterminated section header", line=line_no)
            name = line[1:-1].strip()
            if name not in SECTIONS:
                raise ConfigError(f"unknown section {name!r}", line=line_no)
            section = name
            continue
        if "=" not in line:
            raise ConfigError(f"expected 'key = value', got {line!r}", line=line_no)
        key, raw_value = (part.strip() for part in line.split("=", 1))
        if key not in KEY_TABLE:
            raise ConfigError(f"unknown key {key!r}", line=line_no)
        if section is not None and KEY_TABLE[key][0] != section:
            raise ConfigError(
                f"key {key!r} belongs to section [{KEY_TABLE[key][0]}], "
                f"found under [{section}]",
                line=line_no,
            )
        if key in seen_lines:
            raise ConfigError(
                f"duplicate key {key!r} (first set on line {seen_lines[key]})",
                line=line_no,
            )
        seen_lines[key] = line_no
        fields[FIELD_NAME.get(key, key)] = _parse_value(key, raw_value, line_no)
    for item in overrides or []:
        if "=" not in item:
            raise ConfigError(f"override must be key=value, got {item!r}")
        key, raw_value = (part.strip() for part in item.split("=", 1))
        fields[FIELD_NAME.get(key, key)] = _parse_value(key, raw_value)
    try:
        return SweepConfig(**fields)
    except SnRingError:
        raise
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc
