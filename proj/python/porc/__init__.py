"""Conformance checking for event logs with order uncertainty."""

import json

from ._porc import (
    EventLog,
    PetriNet,
    PorcError,
    __version__,
    fitness,
    read_log,
    read_pnml,
    wilson_interval,
    z_value,
)
from . import _porc


def check(log, net, model="2g", conf="fitness", approx=False, **kwargs):
    """Per-trace expected conformance and a log summary, as a dict."""
    return json.loads(_porc.check_json(log, net, model, conf, approx, **kwargs))


def resolve(log, model="2g", top=5, **kwargs):
    """Most probable resolutions per trace, as a dict."""
    return json.loads(_porc.resolve_json(log, model, top, **kwargs))


def measures(log, coverage_threshold=0.8):
    """Coverage and support measures with a recommended model, as a dict."""
    return json.loads(_porc.measures_json(log, coverage_threshold))


__all__ = [
    "EventLog",
    "PetriNet",
    "PorcError",
    "__version__",
    "check",
    "fitness",
    "measures",
    "read_log",
    "read_pnml",
    "resolve",
    "wilson_interval",
    "z_value",
]
