"""Pydantic schemas for scenario files and the JSON reports."""

from typing import Literal, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

SCENARIO_NORM_TOLERANCE = 1e-8

# Complex numbers are stored as [re, im] pairs.
ComplexPair = tuple[float, float]

OutputSelector = Literal[
    "ps_density",
    "pps_density",
    "weak_value",
    "interference",
    "oracle",
    "momentum",
    "position",
]
PPS_ONLY_OUTPUTS = ("pps_density", "weak_value")
ALL_OUTPUTS = (
    "ps_density",
    "pps_density",
    "weak_value",
    "interference",
    "oracle",
    "momentum",
    "position",
)


def to_pair(z) -> ComplexPair:
    z = complex(z)
    return (z.real, z.imag)


def pairs_to_vector(pairs) -> np.ndarray:
    return np.array([complex(re, im) for re, im in pairs], dtype=complex)


class ProjectorSpec(BaseModel):
    """Either an explicit d x d matrix or a state v giving |v><v|."""
    model_config = ConfigDict(extra="forbid")

    matrix: Optional[list[list[ComplexPair]]] = Field(None, description="Explicit projector matrix, rows of [re, im]")
    state: Optional[list[ComplexPair]] = Field(None, description="Vector v of the rank-1 projector |v><v|")

    @model_validator(mode="after")
    def exactly_one_form(self):
        if (self.matrix is None) == (self.state is None):
            raise ValueError("projector: give exactly one of 'matrix' or 'state'")
        return self


class PointerSpec(BaseModel):
    """Uniform grid on [q_min, q_max) and the initial Gaussian pointer."""
    model_config = ConfigDict(extra="forbid")

    q_min: float = Field(-20.0, description="Left grid edge")
    q_max: float = Field(20.0, description="Right grid edge (exclusive)")
    n: int = Field(1024, description="Number of grid points (power of two, >= 64)")
    sigma: float = Field(1.0, gt=0, description="Position spread of |phi|^2")
    center: float = Field(0.0, description="Initial pointer position")
    wavenumber: float = Field(0.0, description="Plane-wave boost of the initial pointer")


class SweepSpec(BaseModel):
    model_config = ConfigDict(extra="forbid")

    param: Literal["gamma", "sigma", "hbar"] = Field("gamma", description="Swept parameter")
    values: list[float] = Field(..., min_length=1, description="Values to run")


class Scenario(BaseModel):
    """Declarative description of one PS/PPS measurement."""
    model_config = ConfigDict(extra="forbid")

    name: str = Field(..., description="Scenario name, used in reports")
    description: str = Field("", description="Free text")
    system_dim: int = Field(..., ge=2, description="System dimension d")
    projector: ProjectorSpec
    preselection: list[ComplexPair] = Field(..., description="Preselected state")
    postselection: Optional[list[ComplexPair]] = Field(None, description="Postselected state (PPS only)")
    pointer: PointerSpec = Field(default_factory=PointerSpec)
    gamma: float = Field(..., description="Measurement interaction strength")
    hbar: float = Field(1.0, gt=0)
    shift_mode: Literal["auto", "roll", "spectral"] = "auto"
    outputs: Optional[list[OutputSelector]] = Field(None, description="Artifacts to produce; all applicable when omitted")
    sweep: Optional[SweepSpec] = None

    @model_validator(mode="after")
    def check_vectors(self):
        d = self.system_dim
        vectors = {"preselection": self.preselection, "postselection": self.postselection,
                   "projector.state": self.projector.state}
        for field, pairs in vectors.items():
            if pairs is None:
                continue
            if len(pairs) != d:
                raise ValueError(f"{field}: length {len(pairs)} does not match system_dim {d}")
            norm = float(np.linalg.norm(pairs_to_vector(pairs)))
            if abs(norm - 1.0) > SCENARIO_NORM_TOLERANCE:
                raise ValueError(f"{field}: norm {norm:.12g} is not 1 within {SCENARIO_NORM_TOLERANCE:g}")
        if self.projector.matrix is not None:
            rows = self.projector.matrix
            if len(rows) != d or any(len(row) != d for row in rows):
                raise ValueError(f"projector.matrix: expected a {d}x{d} matrix")
        if self.postselection is None and self.outputs:
            rejected = [o for o in self.outputs if o in PPS_ONLY_OUTPUTS]
            if rejected:
                raise ValueError(f"outputs: {', '.join(rejected)} need a postselection vector")
        return self

    def selected_outputs(self) -> list[str]:
        if self.outputs is not None:
            return list(self.outputs)
        if self.postselection is None:
            return [o for o in ALL_OUTPUTS if o not in PPS_ONLY_OUTPUTS]
        return list(ALL_OUTPUTS)


# Reports

class WeakValueSummary(BaseModel):
    weak_value: ComplexPair = Field(..., description="A_w")
    overlap: ComplexPair = Field(..., description="<psi_f|psi_i>")
    phase_chi: float = Field(..., description="Pancharatnam phase in (-pi, pi]")
    normalization: float = Field(..., description="N")
    shifted_overlap: ComplexPair = Field(..., description="<phi|S|phi>")
    postselection_probability: float


class InterferenceSummary(BaseModel):
    cross_l1: float
    cross_signed: float
    max_abs_cross: float


class OracleSummary(BaseModel):
    ps_max_deviation: float = Field(..., description="Closed form vs oracle, max amplitude difference")
    ps_norm_deviation: float
    operator_identity_deviation: float
    inverse_identity_deviation: float
    pps_max_residual: Optional[float] = Field(None, description="PPS pointer vs oracle-then-postselect")
    pps_phase: Optional[float] = Field(None, description="Global phase of the oracle pointer")
    pps_phase_error: Optional[float] = Field(None, description="|phase - chi|")
    pps_probability_error: Optional[float] = None
    passed: bool


class MomentumSummary(BaseModel):
    before: float = Field(..., description="<p> of the initial pointer")
    ps_shift: float
    pps_shift: Optional[float] = None


class PositionSummary(BaseModel):
    before: float = Field(..., description="<q> of the initial pointer")
    ps_shift: float
    ps_prediction: float = Field(..., description="gamma <psi|A|psi>")
    pps_shift: Optional[float] = None
    weak_limit_prediction: Optional[float] = Field(None, description="gamma Re(A_w)")


class RunReport(BaseModel):
    scenario: str
    system_dim: int
    gamma: float
    hbar: float
    expectation: float = Field(..., description="<psi_i|A|psi_i>")
    weak_value: Optional[WeakValueSummary] = None
    ps_interference: Optional[InterferenceSummary] = None
    pps_interference: Optional[InterferenceSummary] = None
    oracle: Optional[OracleSummary] = None
    momentum: Optional[MomentumSummary] = None
    position: Optional[PositionSummary] = None
    artifacts: list[str] = Field(default_factory=list)


class ComparisonReport(BaseModel):
    scenario: str
    gamma: float
    weak_value: ComplexPair
    ps_cross_l1: float
    pps_cross_l1: float
    ps_momentum_shift: float
    pps_momentum_shift: float
    ps_peak_weights: tuple[float, float] = Field(..., description="Mass left/right of center + gamma/2")
    pps_peak_weights: tuple[float, float]
    max_density_difference: float


class SweepRow(BaseModel):
    param: str
    value: float
    ps_cross_l1: float
    pps_cross_l1: Optional[float] = None
    weak_value_re: Optional[float] = None
    weak_value_im: Optional[float] = None
    normalization: Optional[float] = None
    postselection_probability: Optional[float] = None
    pps_momentum_shift: Optional[float] = None


class VerificationReport(BaseModel):
    trials: int
    ps_trials: int
    seed: int
    operator_identity_max: float
    inverse_identity_max: float
    oracle_norm_max: float
    ps_cross_max: float
    ps_cross_l1_max: float
    pps_residual_max: float
    pps_phase_error_max: float
    ps_momentum_max: float
    non_projector_momentum_max: float
    negative_control_deviation: float
    failures: list[str] = Field(default_factory=list)
    passed: bool
