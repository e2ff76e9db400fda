"""Report documents: the JSON contract of the command line tool.

A report is a plain dictionary with a fixed top-level shape, checked
against the schema shipped next to this module. Serialization is
canonical (sorted keys, two-space indent, trailing newline) so equal
inputs give byte-equal output.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .errors import InputError
from .geometry import Point

__all__ = ["Report", "plain", "schema_path", "load_schema", "validate_report"]


def plain(obj):
    """Recursively convert numpy scalars/arrays and Points to built-in
    types so the result is JSON-serializable."""
    if isinstance(obj, Point):
        return [float(v) for v in obj.coords]
    if isinstance(obj, np.ndarray):
        return [plain(v) for v in obj.tolist()]
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, dict):
        return {str(k): plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [plain(v) for v in obj]
    if isinstance(obj, float) or isinstance(obj, (int, str, bool)) or obj is None:
        return obj
    return str(obj)


@dataclass
class Report:
    command: str
    inputs: dict = field(default_factory=dict)
    results: dict = field(default_factory=dict)
    verdicts: dict = field(default_factory=dict)
    tolerances: dict = field(default_factory=dict)
    seed: int = 0
    tool_version: str = __version__
    artifacts: list = field(default_factory=list)

    def to_dict(self):
        doc = {
            "command": self.command,
            "inputs": plain(self.inputs),
            "results": plain(self.results),
            "verdicts": plain(self.verdicts),
            "tolerances": plain(self.tolerances),
            "seed": int(self.seed),
            "tool_version": self.tool_version,
        }
        if self.artifacts:
            doc["artifacts"] = [str(a) for a in self.artifacts]
        return doc

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True, indent=2) + "\n"

    def write(self, path):
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(self.to_json())


def schema_path():
    return os.path.join(os.path.dirname(__file__), "report_schema.json")


def load_schema():
    with open(schema_path(), "r", encoding="utf-8") as fh:
        return json.load(fh)


def validate_report(doc):
    """Check a report document against the shipped schema. Uses
    jsonschema when available; otherwise enforces the required keys and
    the closed key set by hand."""
    if isinstance(doc, Report):
        doc = doc.to_dict()
    schema = load_schema()
    try:
        import jsonschema
    except ImportError:
        required = set(schema["required"])
        allowed = set(schema["properties"])
        missing = required - set(doc)
        extra = set(doc) - allowed
        if missing:
            raise InputError("report is missing keys: %s" % sorted(missing))
        if extra:
            raise InputError("report has unknown keys: %s" % sorted(extra))
        if not isinstance(doc.get("seed"), int):
            raise InputError("report seed must be an integer")
        return True
    jsonschema.validate(doc, schema)
    return True
