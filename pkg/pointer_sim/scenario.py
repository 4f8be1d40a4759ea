"""
Scenario files: loading, dumping and conversion to domain objects.

Vectors are kept exactly as written in the file; they are renormalized
only when the domain objects are built, so a dumped scenario reloads to
an identical model.
"""

import json
import logging
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from pointer_sim.errors import ScenarioError
from pointer_sim.pointer import MeasurementConfig, PointerGrid, PointerWavefunction, gaussian_pointer
from pointer_sim.schemas import Scenario, pairs_to_vector
from pointer_sim.system import Projector, SystemState, make_projector_from_state

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class MeasurementSetup:
    """Domain objects for one scenario."""

    projector: Projector
    pre: SystemState
    post: SystemState | None
    grid: PointerGrid
    phi: PointerWavefunction
    cfg: MeasurementConfig


def load_scenario(path) -> Scenario:
    """
    Read and validate a scenario file.

    Raises:
        ScenarioError: file missing or not JSON
        pydantic.ValidationError: schema violations (with field paths)
    """
    path = Path(path)
    try:
        payload = json.loads(path.read_text(encoding="utf-8"))
    except FileNotFoundError as e:
        raise ScenarioError(f"scenario file not found: {path}") from e
    except json.JSONDecodeError as e:
        raise ScenarioError(f"{path}: invalid JSON at line {e.lineno}: {e.msg}") from e
    scenario = Scenario.model_validate(payload)
    logger.info("✓ Loaded scenario '%s' from %s", scenario.name, path)
    return scenario


def dump_scenario(scenario, path=None) -> str:
    """Serialize a scenario; writes it to `path` when given."""
    text = scenario.model_dump_json(indent=2) + "\n"
    if path is not None:
        Path(path).write_text(text, encoding="utf-8")
    return text


def build_setup(scenario) -> MeasurementSetup:
    """Turn a validated scenario into projector, states, pointer and config."""
    if scenario.projector.state is not None:
        vector = SystemState.normalized(pairs_to_vector(scenario.projector.state))
        projector = make_projector_from_state(vector)
    else:
        rows = [pairs_to_vector(row) for row in scenario.projector.matrix]
        projector = Projector(np.array(rows))

    pre = SystemState.normalized(pairs_to_vector(scenario.preselection))
    post = None
    if scenario.postselection is not None:
        post = SystemState.normalized(pairs_to_vector(scenario.postselection))

    spec = scenario.pointer
    grid = PointerGrid.from_bounds(spec.q_min, spec.q_max, spec.n)
    phi = gaussian_pointer(grid, center=spec.center, sigma=spec.sigma, wavenumber=spec.wavenumber)
    cfg = MeasurementConfig(gamma=scenario.gamma, hbar=scenario.hbar, shift_mode=scenario.shift_mode)
    return MeasurementSetup(projector, pre, post, grid, phi, cfg)


def with_parameter(scenario, param, value) -> Scenario:
    """
    Copy of `scenario` with one sweep parameter replaced.

    The copy is re-validated, so an out-of-range value raises
    pydantic.ValidationError with the field path, as on load.
    """
    payload = scenario.model_dump()
    if param in ("gamma", "hbar"):
        payload[param] = value
    elif param == "sigma":
        payload["pointer"] = {**payload["pointer"], "sigma": value}
    else:
        raise ScenarioError(f"cannot sweep parameter {param!r}")
    return Scenario.model_validate(payload)
