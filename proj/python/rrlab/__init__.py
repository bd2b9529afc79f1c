"""Point-charge electrodynamics laboratory.

Scenario runs mirror the CLI contract: each returns a record with the exit
code, the decoded summary, the artifact file list, and the captured log.
"""

import json as _json

from ._core import (
    ConfigError,
    __version__,
    hyperbolic_point,
    larmor_rate,
    list_presets,
    minkowski_dot,
    sixd_rate,
    validate_config_text,
)
from . import _core as _c

__all__ = [
    "ConfigError",
    "__version__",
    "hyperbolic_point",
    "larmor_rate",
    "list_presets",
    "minkowski_dot",
    "run_config",
    "run_preset",
    "sixd_rate",
    "validate_config",
    "validate_config_text",
]


def _unpack(raw):
    raw["summary"] = _json.loads(raw.pop("summary_json"))
    return raw


def run_config(config, out_dir=None, seed=None, name=None):
    """Run a scenario given as a dict or JSON text."""
    text = config if isinstance(config, str) else _json.dumps(config)
    return _unpack(_c.run_config_text(text, out_dir, seed, name))


def run_preset(name, out_dir=None, seed=None):
    """Run a gallery preset by name."""
    return _unpack(_c.run_preset(name, out_dir, seed))


def validate_config(config):
    """Parse and validate a dict or JSON-text scenario without running it."""
    text = config if isinstance(config, str) else _json.dumps(config)
    validate_config_text(text)
