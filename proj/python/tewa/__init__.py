"""Two-stage threat evaluation and weapon assignment engine."""

import json
import os

from . import _core
from ._core import (
    CorruptTrace,
    ParseError,
    ScenarioInvalid,
    Session,
    TewaError,
    ValidationError,
    VersionMismatch,
    circle_line_poi,
    deferred_acceptance,
    fnv1a_hex,
    kill_probability,
    select_mode,
    solve_intercept,
)

__all__ = [
    "CorruptTrace",
    "ParseError",
    "ScenarioInvalid",
    "Session",
    "TewaError",
    "ValidationError",
    "VersionMismatch",
    "circle_line_poi",
    "deferred_acceptance",
    "describe_scenario",
    "fnv1a_hex",
    "kill_probability",
    "replay_metrics",
    "run_scenario",
    "select_mode",
    "solve_intercept",
]


def describe_scenario(path):
    """Name, sizes and hash of a scenario file."""
    return json.loads(_core.describe_scenario_json(os.fspath(path)))


def run_scenario(path, seed=None):
    """Run a scenario file to completion.

    Returns a dict with the trace text, the metrics, the mode in force at the
    first decision and the slowest decision time in milliseconds.
    """
    return json.loads(_core.run_scenario_json(os.fspath(path), seed))


def replay_metrics(trace, path):
    """Recompute run metrics from trace text and the scenario it came from."""
    return json.loads(_core.replay_metrics_json(trace, os.fspath(path)))
