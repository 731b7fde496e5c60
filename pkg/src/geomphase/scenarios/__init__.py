"""Config-driven scenario runner and report writers."""

from .config import KINDS, SCHEMA_VERSION, ScenarioConfig, load_config, parse_config
from .report import CSV_HEADER, Check, Row, RunReport, emit_report, from_json, to_csv, to_json
from .runner import PIPELINES, ScenarioAbort, run_scenario, self_check

__all__ = [
    "KINDS",
    "SCHEMA_VERSION",
    "ScenarioConfig",
    "load_config",
    "parse_config",
    "CSV_HEADER",
    "Check",
    "Row",
    "RunReport",
    "emit_report",
    "from_json",
    "to_csv",
    "to_json",
    "PIPELINES",
    "ScenarioAbort",
    "run_scenario",
    "self_check",
]
