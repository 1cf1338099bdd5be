"""Lower bounds for subharmonic functions."""

import json

from ._core import (
    GeometryError,
    ScenarioError,
    __version__,
    ball_pair_distance,
    center_distance_formula,
    content_upper_bound,
    kernel_k,
    sphere_area,
)
from . import _core


def run_scenario(scenario, seed=0):
    """Run one scenario (a dict or JSON text) and return the parsed report."""
    text = scenario if isinstance(scenario, str) else json.dumps(scenario)
    return json.loads(_core.run_scenario_json(text, seed))


def verify(paths, seed=0):
    """Run scenario files and return the parsed report."""
    if isinstance(paths, str):
        paths = [paths]
    return json.loads(_core.verify_files_json(list(paths), seed))


__all__ = [
    "GeometryError",
    "ScenarioError",
    "__version__",
    "ball_pair_distance",
    "center_distance_formula",
    "content_upper_bound",
    "kernel_k",
    "run_scenario",
    "sphere_area",
    "verify",
]
