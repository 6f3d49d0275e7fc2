"""Record serialization (CSV / JSON) and the run manifest.

Numbers are written with 17 significant digits so a parsed value is
bit-identical to the computed double.  Row order is grid order; output bytes
are a pure function of the records and configuration.
"""

from __future__ import annotations

import dataclasses
import json
import math
from datetime import datetime, timezone
from pathlib import Path
from typing import Optional, Sequence

from . import __version__
from .errors import SchemaError
from .observables import ObservableRecord
from .sweeps import SweepConfig

BASE_COLUMNS = (
    "energy", "flux_a", "flux_b", "t_ar", "mx", "my",
    "T_bare_a", "T_bare_b", "T_full_a", "T_full_b",
    "C_bare", "C_full", "dephasing_re", "dephasing_im", "rate", "error_flag",
)

_FIELD_OF_COLUMN = {
    "energy": "energy", "flux_a": "flux_a", "flux_b": "flux_b", "t_ar": "t_ar",
    "mx": "mx", "my": "my",
    "T_bare_a": "t_bare_a", "T_bare_b": "t_bare_b",
    "T_full_a": "t_full_a", "T_full_b": "t_full_b",
    "C_bare": "c_bare", "C_full": "c_full", "rate": "rate",
}


def format_float(value: float) -> str:
    return format(float(value), ".17g")


def record_value(record: ObservableRecord, column: str):
    """Numeric value of one schema column (site_k columns index the LDOS)."""
    if column.startswith("site_"):
        index = int(column[5:])
        if record.ldos is None or index >= len(record.ldos):
            raise SchemaError(f"record has no LDOS column {column!r}")
        return float(record.ldos[index])
    if column == "dephasing_re":
        return record.dephasing.real
    if column == "dephasing_im":
        return record.dephasing.imag
    if column == "error_flag":
        return record.error or ""
    field = _FIELD_OF_COLUMN.get(column)
    if field is None:
        raise SchemaError(f"unknown column {column!r}")
    return getattr(record, field)


def _ldos_width(records: Sequence[ObservableRecord], with_ldos: bool) -> int:
    if not with_ldos:
        return 0
    widths = {len(r.ldos) for r in records if r.ldos is not None}
    if not widths:
        raise SchemaError("LDOS output requested but no record carries an LDOS vector")
    if len(widths) > 1:
        raise SchemaError(f"LDOS vectors have mixed lengths {sorted(widths)}; "
                          "fixed-geometry sweeps only")
    return widths.pop()


def columns_for(records: Sequence[ObservableRecord], with_ldos: bool) -> tuple[str, ...]:
    width = _ldos_width(records, with_ldos)
    return BASE_COLUMNS + tuple(f"site_{k}" for k in range(width))


def write_records(records: Sequence[ObservableRecord], out_format: str, path,
                  with_ldos: bool = False) -> dict:
    """Write records, return a summary block for the manifest."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    columns = columns_for(records, with_ldos)
    if out_format == "csv":
        _write_csv(records, columns, path)
    elif out_format == "json":
        _write_json(records, columns, path)
    else:
        raise SchemaError(f"unknown output format {out_format!r}")
    return {
        "path": str(path),
        "format": out_format,
        "rows": len(records),
        "columns": len(columns),
        "error_count": sum(1 for r in records if r.error is not None),
    }


def _cell(record: ObservableRecord, column: str) -> str:
    if column == "error_flag":
        return record.error or ""
    value = record_value(record, column)
    if column in ("mx", "my"):
        return str(int(value))
    return format_float(value)


def _write_csv(records, columns, path: Path):
    lines = [",".join(columns)]
    for record in records:
        lines.append(",".join(_cell(record, c) for c in columns))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def _json_value(record: ObservableRecord, column: str):
    if column == "error_flag":
        return record.error
    value = record_value(record, column)
    if column in ("mx", "my"):
        return int(value)
    value = float(value)
    return value if math.isfinite(value) else None


def _write_json(records, columns, path: Path):
    rows = [{c: _json_value(r, c) for c in columns} for r in records]
    path.write_text(json.dumps(rows, indent=1), encoding="utf-8")


def config_echo(config: SweepConfig) -> dict:
    """Every resolved parameter, including derived site sets."""
    echo = {}
    for field in dataclasses.fields(config):
        value = getattr(config, field.name)
        if isinstance(value, tuple):
            value = list(value)
        echo[field.name] = value
    geometry = config.geometry()
    echo["resolved_lead_i_sites"] = list(geometry.lead_i_sites)
    echo["resolved_lead_ii_sites"] = list(geometry.lead_ii_sites)
    echo["resolved_sc_sites"] = list(geometry.sc_sites)
    echo["resolved_ring_contact_sites"] = list(geometry.ring_contact_sites)
    echo["resolved_n_total"] = geometry.n_total
    return echo


def write_manifest(config: SweepConfig, outputs: Sequence[dict], path,
                   grid_shape: dict, extra: Optional[dict] = None) -> dict:
    manifest = {
        "experiment": config.experiment,
        "version": __version__,
        "timestamp": datetime.now(timezone.utc).isoformat(),
        "grid": grid_shape,
        "error_count": sum(o.get("error_count", 0) for o in outputs),
        "outputs": list(outputs),
        "config": config_echo(config),
    }
    if extra:
        manifest.update(extra)
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(manifest, indent=1, sort_keys=False), encoding="utf-8")
    return manifest
