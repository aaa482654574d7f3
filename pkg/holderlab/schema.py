"""Published schema of the JSON run manifest."""

from __future__ import annotations

from typing import Any

import voluptuous as vol

from .const import REPORT_SCHEMA_VERSION
from .exceptions import HolderLabError


def _number(value: Any) -> int | float | None:
    if value is None or (isinstance(value, (int, float)) and not isinstance(value, bool)):
        return value
    raise vol.Invalid(f"expected a number or null, got {value!r}")


NUMBER = _number
# verdicts are tri-state: True, False or None when not evaluated
VERDICT = vol.Any(None, bool)
SUMMARY = {vol.Required(key): NUMBER for key in ("count", "max", "mean", "q50", "q95")}

CELL_SCHEMA = vol.Schema(
    {
        vol.Required("dim"): int,
        vol.Required("scale"): NUMBER,
        vol.Required("count"): int,
        vol.Required("max_ratio"): NUMBER,
        vol.Required("mean_ratio"): NUMBER,
        vol.Required("q50_ratio"): NUMBER,
        vol.Required("q95_ratio"): NUMBER,
        vol.Required("lhs_max"): NUMBER,
    }
)

STATISTICS_SCHEMA = vol.Schema(
    {
        vol.Required("cells"): [CELL_SCHEMA],
        vol.Required("per_dim"): {str: SUMMARY},
        vol.Required("per_scale"): {str: SUMMARY},
    }
)

CONSTANT_SCHEMA = vol.Schema(
    {
        vol.Required("value"): NUMBER,
        vol.Required("witness"): dict,
        vol.Required("search_trace"): [vol.All([NUMBER], vol.Length(min=2, max=2))],
    }
)

SKIPS_SCHEMA = vol.Schema(
    {
        vol.Required("count"): int,
        vol.Required("total"): int,
        vol.Required("rate"): NUMBER,
        vol.Required("reasons"): {str: int},
    }
)

EXPERIMENT_REPORT_SCHEMA = vol.Schema(
    {
        vol.Required("experiment_id"): str,
        vol.Required("config"): dict,
        vol.Required("statistics"): STATISTICS_SCHEMA,
        vol.Required("slope"): NUMBER,
        vol.Required("stderr"): NUMBER,
        vol.Required("constant_estimate"): CONSTANT_SCHEMA,
        vol.Required("verdicts"): {str: VERDICT},
        vol.Required("skips"): SKIPS_SCHEMA,
        vol.Required("trials"): int,
        vol.Required("flags"): [str],
        vol.Required("notes"): dict,
        vol.Required("extra"): dict,
        vol.Required("passed"): bool,
    }
)

REPORT_SCHEMA = vol.Schema(
    {
        vol.Required("version"): str,
        vol.Required("schema_version"): REPORT_SCHEMA_VERSION,
        vol.Required("config_digest"): vol.Match(r"^[0-9a-f]{64}$"),
        vol.Required("seed"): int,
        vol.Required("started"): str,
        vol.Required("finished"): vol.Any(None, str),
        vol.Required("configs"): [dict],
        vol.Required("reports"): [EXPERIMENT_REPORT_SCHEMA],
        vol.Required("passed"): bool,
    }
)


def validate_manifest(document: Any) -> dict[str, Any]:
    """Validate an emitted JSON document against REPORT_SCHEMA."""
    try:
        return REPORT_SCHEMA(document)
    except vol.Invalid as err:
        path = ".".join(str(part) for part in err.path)
        raise HolderLabError(f"Report does not match the schema at {path or 'top level'}: {err.msg}") from err
