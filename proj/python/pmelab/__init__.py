"""Porous medium equation lab: solver, norms, oscillation cascades and checks."""

import json as _json

from . import _core
from ._core import (
    Error,
    barenblatt,
    derive_exponents,
    evolve_1d,
    marcinkiewicz_bounds,
    recursion_lemma,
    strong_lp_norm,
    weak_lp_norm,
)

__all__ = [
    "Error",
    "barenblatt",
    "derive_exponents",
    "evolve_1d",
    "marcinkiewicz_bounds",
    "recursion_lemma",
    "run",
    "strong_lp_norm",
    "verify",
    "weak_lp_norm",
]


def verify(suite="all", seed=None):
    """Run a property suite and return its report as a dict."""
    text = _core.verify(suite) if seed is None else _core.verify(suite, seed)
    return _json.loads(text)


def run(config, out=None, seed=None):
    """Run an experiment config file; returns (ok, checks)."""
    return _core.run(str(config), None if out is None else str(out), seed)
