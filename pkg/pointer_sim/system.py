"""
Finite-dimensional system states, projectors, weak values and the
Pancharatnam phase.

All values are immutable after construction and every function is pure.
"""

import logging
import math
from dataclasses import dataclass

import numpy as np

from pointer_sim.errors import (
    InvalidProjector,
    InvalidState,
    NumericalDegeneracy,
    OrthogonalPostselection,
    ShapeMismatch,
)

logger = logging.getLogger(__name__)

STATE_NORM_TOLERANCE = 1e-12
HERMITIAN_TOLERANCE = 1e-12
IDEMPOTENCY_TOLERANCE = 1e-10
SPECTRUM_TOLERANCE = 1e-8
OVERLAP_EPSILON = 1e-10
OVERLAP_BOUND_SLACK = 1e-10
NEGATIVE_SQUARE_TOLERANCE = 1e-10


def _frozen(array):
    array = np.array(array, dtype=complex)
    array.setflags(write=False)
    return array


def wrap_phase(angle):
    """Map an angle onto the principal branch (-pi, pi]."""
    wrapped = math.remainder(angle, 2 * math.pi)
    if wrapped <= -math.pi:
        wrapped += 2 * math.pi
    return wrapped


@dataclass(frozen=True, eq=False)
class SystemState:
    """Normalized complex amplitude vector of a d-level system."""

    amplitudes: np.ndarray

    def __post_init__(self):
        amplitudes = _frozen(self.amplitudes)
        if amplitudes.ndim != 1 or amplitudes.size < 2:
            raise InvalidState(f"state must be a vector with d >= 2, got shape {amplitudes.shape}")
        norm = np.linalg.norm(amplitudes)
        if abs(norm - 1.0) > STATE_NORM_TOLERANCE:
            raise InvalidState(f"state norm is {norm:.15g}, expected 1")
        object.__setattr__(self, "amplitudes", amplitudes)

    @classmethod
    def normalized(cls, vector):
        """Build a state from any non-zero vector by rescaling it to unit norm."""
        vector = np.asarray(vector, dtype=complex)
        norm = np.linalg.norm(vector)
        if norm == 0 or not np.isfinite(norm):
            raise InvalidState("cannot normalize a zero or non-finite vector")
        return cls(vector / norm)

    @classmethod
    def basis(cls, d, index):
        vector = np.zeros(d, dtype=complex)
        vector[index] = 1.0
        return cls(vector)

    @property
    def d(self):
        return self.amplitudes.size

    def with_global_phase(self, alpha):
        return SystemState(np.exp(1j * alpha) * self.amplitudes)


@dataclass(frozen=True)
class ProjectorValidation:
    """Residuals of the projector checks and the overall verdict."""

    hermiticity_residual: float
    idempotency_residual: float
    spectrum_residual: float
    passed: bool


@dataclass(frozen=True, eq=False)
class Projector:
    """
    Hermitian idempotent matrix.

    Construction validates the matrix; use `Projector.unchecked` to build
    deliberately broken operators for negative controls.
    """

    matrix: np.ndarray
    checked: bool = True

    def __post_init__(self):
        matrix = _frozen(self.matrix)
        object.__setattr__(self, "matrix", matrix)
        if not self.checked:
            return
        report = validate_projector(matrix)
        if not report.passed:
            raise InvalidProjector(
                "matrix is not a projector: "
                f"hermiticity {report.hermiticity_residual:.3g}, "
                f"idempotency {report.idempotency_residual:.3g}, "
                f"spectrum {report.spectrum_residual:.3g}"
            )

    @classmethod
    def unchecked(cls, matrix):
        return cls(matrix, checked=False)

    @property
    def d(self):
        return self.matrix.shape[0]

    @property
    def rank(self):
        return int(round(np.trace(self.matrix).real))


def make_projector_from_state(v):
    """
    Build the rank-1 projector |v><v|.

    Args:
        v: Normalized SystemState (a SystemState cannot be built otherwise).

    Returns:
        Projector onto v
    """
    if not isinstance(v, SystemState):
        raise InvalidState("make_projector_from_state expects a SystemState")
    return Projector(np.outer(v.amplitudes, v.amplitudes.conj()))


def validate_projector(matrix, tol=IDEMPOTENCY_TOLERANCE, hermitian_tol=HERMITIAN_TOLERANCE,
                       spectrum_tol=SPECTRUM_TOLERANCE):
    """
    Check Hermiticity, idempotency and the {0, 1} spectrum of a square matrix.

    Residuals are max-entry norms; the spectrum residual is the largest
    distance of an eigenvalue of the Hermitian part from {0, 1}.
    """
    matrix = np.asarray(matrix, dtype=complex)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise ShapeMismatch(f"projector must be square, got shape {matrix.shape}")
    hermiticity = float(np.max(np.abs(matrix - matrix.conj().T)))
    idempotency = float(np.max(np.abs(matrix @ matrix - matrix)))
    eigenvalues = np.linalg.eigvalsh((matrix + matrix.conj().T) / 2)
    spectrum = float(np.max(np.minimum(np.abs(eigenvalues), np.abs(eigenvalues - 1.0))))
    passed = hermiticity <= hermitian_tol and idempotency <= tol and spectrum <= spectrum_tol
    return ProjectorValidation(hermiticity, idempotency, spectrum, passed)


def complement(A):
    """Return 1 - A."""
    return Projector(np.eye(A.d) - A.matrix, checked=A.checked)


def _check_dims(A, *states):
    for state in states:
        if state.d != A.d:
            raise ShapeMismatch(f"operator has dimension {A.d}, state has dimension {state.d}")


def expectation(A, psi):
    """<psi|A|psi> for a projector A."""
    _check_dims(A, psi)
    return float(np.vdot(psi.amplitudes, A.matrix @ psi.amplitudes).real)


def _postselection_overlap(pre, post):
    if pre.d != post.d:
        raise ShapeMismatch(f"pre has dimension {pre.d}, post has dimension {post.d}")
    overlap = complex(np.vdot(post.amplitudes, pre.amplitudes))
    if abs(overlap) <= OVERLAP_EPSILON:
        raise OrthogonalPostselection(f"|<post|pre>| = {abs(overlap):.3g} is below {OVERLAP_EPSILON:g}")
    return overlap


def weak_value(A, pre, post):
    """
    Weak value A_w = <post|A|pre> / <post|pre>.

    The result may be complex and may lie outside the spectrum [0, 1].
    """
    _check_dims(A, pre, post)
    overlap = _postselection_overlap(pre, post)
    return complex(np.vdot(post.amplitudes, A.matrix @ pre.amplitudes)) / overlap


def pancharatnam_phase(pre, post):
    """
    Pancharatnam phase chi with e^{i chi} = <post|pre> / |<post|pre>|.

    Returns:
        (chi, overlap) with chi on the principal branch (-pi, pi]
    """
    overlap = _postselection_overlap(pre, post)
    return wrap_phase(float(np.angle(overlap))), overlap


def normalization_constant(A_w, shifted_overlap):
    """
    N = sqrt(|1 - A_w|^2 + |A_w|^2 + 2 Re[A_w (1 - A_w*) <phi|S|phi>]).

    Tiny negative rounding in N^2 is clamped to zero.
    """
    A_w = complex(A_w)
    shifted_overlap = complex(shifted_overlap)
    if abs(shifted_overlap) > 1.0 + OVERLAP_BOUND_SLACK:
        raise NumericalDegeneracy(f"|<phi|S|phi>| = {abs(shifted_overlap):.15g} exceeds 1")
    squared = (
        abs(1 - A_w) ** 2
        + abs(A_w) ** 2
        + 2 * (A_w * (1 - A_w.conjugate()) * shifted_overlap).real
    )
    if squared < -NEGATIVE_SQUARE_TOLERANCE:
        raise NumericalDegeneracy(f"N^2 = {squared:.3g} is negative")
    return math.sqrt(max(squared, 0.0))


@dataclass(frozen=True)
class WeakValueReport:
    """Weak value, postselection overlap, Pancharatnam phase and N."""

    weak_value: complex
    overlap: complex
    phase_chi: float
    normalization: float
    shifted_overlap: complex


def weak_value_report(A, pre, post, shifted_overlap):
    A_w = weak_value(A, pre, post)
    chi, overlap = pancharatnam_phase(pre, post)
    N = normalization_constant(A_w, shifted_overlap)
    logger.debug("A_w=%s chi=%.6f N=%.6f", A_w, chi, N)
    return WeakValueReport(A_w, overlap, chi, N, complex(shifted_overlap))


def random_state(d, rng):
    """Haar-random pure state of dimension d."""
    vector = rng.normal(size=d) + 1j * rng.normal(size=d)
    return SystemState.normalized(vector)


def random_projector(d, rank, rng):
    """
    Random orthogonal projector of the given rank (0 <= rank <= d).

    The range is spanned by the first `rank` columns of a QR factor of a
    complex Gaussian matrix.
    """
    if not 0 <= rank <= d:
        raise InvalidProjector(f"rank must be in [0, {d}], got {rank}")
    gaussian = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    q, _ = np.linalg.qr(gaussian)
    basis = q[:, :rank]
    matrix = basis @ basis.conj().T
    return Projector((matrix + matrix.conj().T) / 2)
