"""CSV / JSON output helpers shared by the emitters and the CLI.

Every file produced by this package starts with its run configuration:
CSV gets a single `# config: {...}` comment line above the header row,
JSON reports embed the same dict under the "config" key.  Numbers are
rendered with repr-faithful precision (%.17g) so runs can be diffed.
"""

from __future__ import annotations

import json
import math
import os
from typing import Iterable

FORMAT_VERSION = "lattice-orbits/1"


def fmt_number(x) -> str:
    if isinstance(x, bool):
        return str(x).lower()
    if isinstance(x, int):
        return str(x)
    if isinstance(x, float):
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        if math.isnan(x):
            return "nan"
        return format(x, ".17g")
    return str(x)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, float):
        if math.isinf(obj) or math.isnan(obj):
            return fmt_number(obj)
        return obj
    if isinstance(obj, (str, int, bool)) or obj is None:
        return obj
    if hasattr(obj, "value"):  # str-valued enums
        return obj.value
    return str(obj)


def config_line(config: dict | None) -> str:
    payload = {"format": FORMAT_VERSION}
    if config:
        payload.update(_jsonable(config))
    return "# config: " + json.dumps(payload, sort_keys=True)


def write_csv(path, header: list[str], rows: Iterable[Iterable], config: dict | None = None) -> None:
    """RFC-4180-style CSV with one leading config comment line."""
    with open(path, "w", newline="") as fh:
        fh.write(config_line(config) + "\n")
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(fmt_number(v) for v in row) + "\n")


def write_json(path, payload: dict, config: dict | None = None) -> None:
    doc = dict(_jsonable(payload))
    doc["config"] = _jsonable(config or {})
    doc.setdefault("format", FORMAT_VERSION)
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")


def ensure_dir(path) -> str:
    os.makedirs(path, exist_ok=True)
    return path
