"""Line-limit screening for transmission-constrained unit commitment."""

import json as _json

from ._core import (
    ConstraintGenerationError,
    FormatError,
    PowerSystem,
    Scenario,
    generate_scenarios,
    generate_system,
    ptdf,
    read_scenarios,
    read_system,
    screen,
    system_from_json,
    three_bus,
    three_bus_scenario,
)
from . import _core

__all__ = [
    "ConstraintGenerationError",
    "FormatError",
    "PowerSystem",
    "Scenario",
    "classify",
    "compare",
    "constraint_generation",
    "generate_scenarios",
    "generate_system",
    "illustrative_milp",
    "ptdf",
    "read_scenarios",
    "read_system",
    "screen",
    "solve",
    "system_from_json",
    "three_bus",
    "three_bus_scenario",
]


def solve(system, scenario, removed=(), slack_penalty=-1.0, mip_gap=-1.0):
    """Solve the TC-UC with the 0-based lines in `removed` unmonitored."""
    return _json.loads(_core._solve(system, scenario, list(removed), slack_penalty, mip_gap))


def constraint_generation(system, scenario, removed=(), policy="most-violated", max_iterations=50):
    """Returns (solution dict, final removed lines, iterations)."""
    sol, final, iterations = _core._constraint_generation(system, scenario, list(removed), policy, max_iterations)
    return _json.loads(sol), final, iterations


def compare(system, training, test, methods, jobs=1, cg_policy="most-violated", timing=True):
    """Comparison report as a dict; line ids and periods are 1-based."""
    return _json.loads(_core._compare(system, list(training), list(test), list(methods), jobs, cg_policy, timing))


def illustrative_milp():
    return _json.loads(_core._illustrative_milp())


def classify(milp):
    """Classify each constraint of a MILP given as a dict or JSON text."""
    text = milp if isinstance(milp, str) else _json.dumps(milp)
    return _json.loads(_core._classify(text))
