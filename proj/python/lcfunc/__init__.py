"""Log-concave functions on grids: polar transforms, Steiner symmetrization, Santalo points."""

import json

from ._lcf import (
    GridSpec,
    LcfError,
    LogConcaveFn,
    conjugate,
    corpus,
    gaussian,
    polar,
    polar_mass,
    santalo_point,
    steiner_symmetrize,
)
from ._lcf import run_pipeline as _run_pipeline

__all__ = [
    "GridSpec",
    "LcfError",
    "LogConcaveFn",
    "conjugate",
    "corpus",
    "gaussian",
    "polar",
    "polar_mass",
    "run_pipeline",
    "santalo_point",
    "steiner_symmetrize",
]


def run_pipeline(f, axis=0, lambda_=0.5):
    """Runs the symmetrization pipeline and returns the report as a dict."""
    return json.loads(_run_pipeline(f, axis, lambda_))
