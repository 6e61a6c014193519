"""Python interface to the ghim marketplace sandbox.

The native module speaks JSON strings; this wrapper converts to and from
Python objects.
"""

import json

from ._core import GhimError, sha256_hex, select_winner
from . import _core

__all__ = [
    "GhimError",
    "Sandbox",
    "compare_baseline",
    "replay",
    "run_scenario",
    "select_winner",
    "sha256_hex",
    "sweep",
]


def _text(scenario):
    return scenario if isinstance(scenario, str) else json.dumps(scenario)


def run_scenario(scenario, base_dir=""):
    """Run a scenario (dict or JSON text); returns (report, events)."""
    report, log = _core.run_scenario(_text(scenario), base_dir)
    return json.loads(report), [json.loads(line) for line in log.splitlines() if line]


def compare_baseline(scenario, base_dir=""):
    return json.loads(_core.compare_baseline(_text(scenario), base_dir))


def sweep(scenario, param, values, base_dir=""):
    return json.loads(_core.sweep(_text(scenario), param, [float(v) for v in values], base_dir))


def replay(scenario, recordings, base_dir=""):
    """Replay recorded gateway sessions (NDJSON text); returns the event log."""
    log = _core.replay(_text(scenario), list(recordings), base_dir)
    return [json.loads(line) for line in log.splitlines() if line]


class Sandbox:
    """A live sandbox driven by the same operations as the CLI and gateway."""

    def __init__(self, seed=0, scenario=None, base_dir=""):
        text = None if scenario is None else _text(scenario)
        self._native = _core.Sandbox(seed, text, base_dir)

    def execute(self, op, args=None, actor="", role="admin"):
        return json.loads(self._native.execute(op, json.dumps(args or {}), actor, role))

    def run(self):
        self._native.run()

    def advance_to(self, t_ms):
        self._native.advance_to(t_ms)

    @property
    def now(self):
        return self._native.now()

    def events(self):
        return [json.loads(line) for line in self._native.log_ndjson().splitlines() if line]

    def log_ndjson(self):
        return self._native.log_ndjson()

    def report(self):
        return json.loads(self._native.report())
