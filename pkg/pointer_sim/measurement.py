"""
Closed-form measurement engine for preselected (PS) and pre/postselected
(PPS) ensembles.

Idempotency of the projector A gives the exact finite expansion

    exp(-i gamma A p / hbar) = 1 - A + A S

which is the only identity used here. A acts on the system factor and S
on the pointer factor of a tensor product, so [A, S] = 0 holds by
construction.
"""

import logging
import math
from dataclasses import dataclass

import numpy as np

from pointer_sim.errors import NumericalDegeneracy, PostselectionImpossible, ShapeMismatch
from pointer_sim.pointer import (
    PointerGrid,
    PointerWavefunction,
    overlap,
    probability_density,
    shift_samples,
    translate,
)
from pointer_sim.system import (
    WeakValueReport,
    expectation,
    weak_value_report,
)

logger = logging.getLogger(__name__)

NORM_TOLERANCE = 1e-10
POSTSELECTION_FLOOR = 1e-20
NORMALIZATION_FLOOR = 1e-12


@dataclass(frozen=True, eq=False)
class EntangledState:
    """Joint system x pointer amplitudes c[j, k] (system index j, grid sample k)."""

    grid: PointerGrid
    amplitudes: np.ndarray

    def __post_init__(self):
        amplitudes = np.array(self.amplitudes, dtype=complex)
        if amplitudes.ndim != 2 or amplitudes.shape[1] != self.grid.n:
            raise ShapeMismatch(f"expected a (d, {self.grid.n}) array, got {amplitudes.shape}")
        amplitudes.setflags(write=False)
        object.__setattr__(self, "amplitudes", amplitudes)

    @property
    def d(self):
        return self.amplitudes.shape[0]

    def norm(self):
        return math.sqrt(float(np.sum(np.abs(self.amplitudes) ** 2)) * self.grid.dq)

    def marginal_density(self):
        """Pointer density with the system index traced out."""
        return np.sum(np.abs(self.amplitudes) ** 2, axis=0)


@dataclass(frozen=True)
class PpsResult:
    pointer: PointerWavefunction
    report: WeakValueReport
    postselection_probability: float


@dataclass(frozen=True, eq=False)
class DensityDecomposition:
    """
    Pointer density split into the unshifted, shifted and cross parts.

    For PS inputs `weak_value` is None and `cross` is the marginal minus
    the weighted sum of the two profiles.
    """

    grid: PointerGrid
    total: np.ndarray
    term_unshifted: np.ndarray
    term_shifted: np.ndarray
    cross: np.ndarray
    weak_value: complex | None
    shifted_overlap: complex


def _check_dims(A, *states):
    for state in states:
        if state.d != A.d:
            raise ShapeMismatch(f"operator has dimension {A.d}, state has dimension {state.d}")


def product_state(psi, phi):
    """|psi>|phi> as an EntangledState."""
    return EntangledState(phi.grid, np.outer(psi.amplitudes, phi.samples))


def apply_measurement_operator(A, state, cfg, adjoint=False):
    """
    Apply 1 - A + A S (or its adjoint 1 - A + A S^dagger) to a joint state.

    Args:
        A: Projector acting on the system index
        state: EntangledState
        cfg: MeasurementConfig (gamma, shift mode)
        adjoint: Use S^dagger, i.e. a shift by -gamma

    Returns:
        EntangledState
    """
    _check_dims(A, state)
    gamma = -cfg.gamma if adjoint else cfg.gamma
    projected = A.matrix @ state.amplitudes
    shifted = shift_samples(projected, state.grid, gamma, cfg.shift_mode)
    return EntangledState(state.grid, state.amplitudes - projected + shifted)


def ps_measure(A, psi, phi, cfg):
    """
    Exact post-measurement joint state (1 - A + A S)|psi>|phi>.

    Amplitudes are c[j, k] = [(1-A)psi]_j phi(q_k) + [A psi]_j phi(q_k - gamma).
    """
    _check_dims(A, psi)
    a_psi = A.matrix @ psi.amplitudes
    shifted = translate(phi, cfg.gamma, cfg.shift_mode)
    amplitudes = np.outer(psi.amplitudes - a_psi, phi.samples) + np.outer(a_psi, shifted.samples)
    state = EntangledState(phi.grid, amplitudes)
    norm = state.norm()
    if abs(norm - 1.0) > NORM_TOLERANCE:
        logger.warning("✗ PS state norm %.15g deviates from 1 (operator checked=%s)", norm, A.checked)
    return state


def ps_pointer_density(A, psi, phi, cfg):
    """Weighted sum (1 - <A>) |phi(q)|^2 + <A> |phi(q - gamma)|^2."""
    weight = expectation(A, psi)
    shifted = translate(phi, cfg.gamma, cfg.shift_mode)
    return (1 - weight) * probability_density(phi) + weight * probability_density(shifted)


def ps_density_decomposition(A, psi, phi, cfg):
    """PS marginal of ps_measure split into weighted profiles and the residual cross part."""
    weight = expectation(A, psi)
    shifted = translate(phi, cfg.gamma, cfg.shift_mode)
    total = ps_measure(A, psi, phi, cfg).marginal_density()
    term_unshifted = (1 - weight) * probability_density(phi)
    term_shifted = weight * probability_density(shifted)
    return DensityDecomposition(
        grid=phi.grid,
        total=total,
        term_unshifted=term_unshifted,
        term_shifted=term_shifted,
        cross=total - term_unshifted - term_shifted,
        weak_value=None,
        shifted_overlap=overlap(phi, shifted),
    )


def ps_cross_term(A, psi, phi, cfg):
    """
    Marginal density of ps_measure minus the weighted sum of profiles.

    Vanishes for every projector because <psi|A(1 - A)|psi> = 0.
    """
    return ps_density_decomposition(A, psi, phi, cfg).cross


def _pps_components(A, pre, post, phi, cfg):
    shifted = translate(phi, cfg.gamma, cfg.shift_mode)
    report = weak_value_report(A, pre, post, overlap(phi, shifted))
    if report.normalization < NORMALIZATION_FLOOR:
        raise NumericalDegeneracy(
            f"N = {report.normalization:.3g}: the postselected pointer vanishes "
            f"for A_w = {report.weak_value:.6g}",
            hint="change gamma or the postselected state",
        )
    return report, shifted


def pps_pointer_state(A, pre, post, phi, cfg):
    """
    Exact postselected pointer (e^{i chi} / N) [(1 - A_w) phi(q) + A_w phi(q - gamma)].

    Returns:
        PpsResult with the pointer, its weak-value report and the
        postselection probability N^2 |<post|pre>|^2
    """
    _check_dims(A, pre, post)
    report, shifted = _pps_components(A, pre, post, phi, cfg)
    A_w, N = report.weak_value, report.normalization
    samples = (np.exp(1j * report.phase_chi) / N) * ((1 - A_w) * phi.samples + A_w * shifted.samples)
    probability = min(max(N**2 * abs(report.overlap) ** 2, 0.0), 1.0)
    logger.debug("PPS pointer: A_w=%s N=%.6g P=%.6g", A_w, N, probability)
    return PpsResult(PointerWavefunction(phi.grid, samples), report, probability)


def pps_pointer_density(A, pre, post, phi, cfg):
    """
    Postselected pointer density and its three parts:

        |1-A_w|^2 |phi(q)|^2 / N^2
        |A_w|^2 |phi(q-gamma)|^2 / N^2
        2 Re[A_w (1-A_w*) phi*(q) phi(q-gamma)] / N^2
    """
    _check_dims(A, pre, post)
    report, shifted = _pps_components(A, pre, post, phi, cfg)
    A_w, N2 = report.weak_value, report.normalization**2
    term_unshifted = abs(1 - A_w) ** 2 * probability_density(phi) / N2
    term_shifted = abs(A_w) ** 2 * probability_density(shifted) / N2
    cross = 2 * (A_w * (1 - A_w.conjugate()) * phi.samples.conj() * shifted.samples).real / N2
    return DensityDecomposition(
        grid=phi.grid,
        total=term_unshifted + term_shifted + cross,
        term_unshifted=term_unshifted,
        term_shifted=term_shifted,
        cross=cross,
        weak_value=A_w,
        shifted_overlap=report.shifted_overlap,
    )


def postselect(state, post):
    """
    Project a joint state onto <post| and renormalize the pointer.

    Returns:
        (pointer, probability) with probability the squared norm of the
        unnormalized projected pointer
    """
    if post.d != state.d:
        raise ShapeMismatch(f"state has dimension {state.d}, postselection has dimension {post.d}")
    projected = post.amplitudes.conj() @ state.amplitudes
    probability = float(np.sum(np.abs(projected) ** 2)) * state.grid.dq
    if probability < POSTSELECTION_FLOOR:
        raise PostselectionImpossible(f"postselection probability {probability:.3g} vanishes")
    pointer = PointerWavefunction(state.grid, projected / math.sqrt(probability))
    return pointer, probability
