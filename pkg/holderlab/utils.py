"""Shared serialization helpers for run manifests."""

from __future__ import annotations

import csv
from datetime import datetime
import json
import logging
import math
from pathlib import Path
from typing import Any

from dateutil import tz
from dateutil.parser import isoparse
import numpy as np

from .const import CSV_COLUMNS, FORMAT_BOTH, FORMAT_CSV, FORMAT_JSON, REPORT_CSV, REPORT_JSON
from .exceptions import HolderLabError, ParameterError
from .models import RunManifest

_LOGGER = logging.getLogger(__name__)

FORMATS = (FORMAT_JSON, FORMAT_CSV, FORMAT_BOTH)


def utcnow() -> datetime:
    return datetime.now(tz.tzutc())


def jsonable(value: Any) -> Any:
    """Convert ``value`` to plain JSON types.

    Complex numbers become ``[re, im]`` and non-finite floats become None.
    """
    if isinstance(value, dict):
        return {str(key): jsonable(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [jsonable(item) for item in value]
    if isinstance(value, np.ndarray):
        return jsonable(value.tolist())
    if isinstance(value, np.generic):
        return jsonable(value.item())
    if isinstance(value, bool) or value is None or isinstance(value, (int, str)):
        return value
    if isinstance(value, complex):
        return [jsonable(value.real), jsonable(value.imag)]
    if isinstance(value, float):
        return value if math.isfinite(value) else None
    if isinstance(value, datetime):
        return value.isoformat()
    return str(value)


def manifest_document(manifest: RunManifest) -> dict[str, Any]:
    return jsonable(manifest.as_dict())


def dumps(document: dict[str, Any]) -> str:
    # Python floats serialize with repr, the shortest string that parses back exactly
    return json.dumps(document, indent=2, ensure_ascii=False, allow_nan=False) + "\n"


def csv_rows(manifest: RunManifest) -> list[dict[str, Any]]:
    """Return one row per experiment, dimension and scale."""
    rows = []
    for report in manifest.reports:
        for cell in report.cells:
            values = {
                "experiment_id": report.experiment_id,
                "dim": cell.dim,
                "scale": cell.scale,
                "max_ratio": cell.max_ratio,
                "mean_ratio": cell.mean_ratio,
                "q95_ratio": cell.q95_ratio,
                "lhs_max": cell.lhs_max,
            }
            rows.append(
                {
                    key: "" if isinstance(value, float) and not math.isfinite(value) else value
                    for key, value in values.items()
                }
            )
    return rows


def check_format(output_format: str) -> str:
    if output_format not in FORMATS:
        raise ParameterError(
            f"Unsupported format {output_format!r}, expected one of {', '.join(FORMATS)}"
        )
    return output_format


def emit(manifest: RunManifest, output_format: str, out_path: str | Path) -> list[Path]:
    """Write the manifest as JSON, CSV or both into the directory ``out_path``."""
    check_format(output_format)
    directory = Path(out_path)
    written = []
    try:
        directory.mkdir(parents=True, exist_ok=True)
        if output_format in (FORMAT_JSON, FORMAT_BOTH):
            target = directory / REPORT_JSON
            target.write_text(dumps(manifest_document(manifest)), encoding="utf-8")
            written.append(target)
        if output_format in (FORMAT_CSV, FORMAT_BOTH):
            target = directory / REPORT_CSV
            with target.open("w", newline="", encoding="utf-8") as handle:
                writer = csv.DictWriter(handle, fieldnames=CSV_COLUMNS)
                writer.writeheader()
                writer.writerows(csv_rows(manifest))
            written.append(target)
    except OSError as err:
        raise HolderLabError(f"Cannot write reports to {directory}: {err}") from err
    for target in written:
        _LOGGER.info("Wrote %s", target)
    return written


def load_manifest(path: str | Path) -> dict[str, Any]:
    """Read an emitted JSON manifest back, with timestamps parsed."""
    from .schema import validate_manifest

    with Path(path).open(encoding="utf-8") as handle:
        document = validate_manifest(json.load(handle))
    for key in ("started", "finished"):
        if document.get(key):
            document[key] = isoparse(document[key])
    return document
