"""
Brute-force evolution oracle.

Applies exp(-i gamma M p / hbar) literally: the pointer is taken to the
momentum representation and, for every momentum sample, the d x d
matrix exponential is computed by scaling and squaring a truncated
Taylor series. Nothing here assumes M^2 = M, so agreement with the
closed form in `measurement` is an independent check of the expansion.
"""

import logging
import math
from dataclasses import dataclass

import numpy as np

from pointer_sim.errors import InvalidMatrix, ShapeMismatch, ToleranceBreach
from pointer_sim.measurement import EntangledState, apply_measurement_operator, product_state
from pointer_sim.pointer import check_shift_fits, gaussian_pointer
from pointer_sim.system import SystemState, random_state

logger = logging.getLogger(__name__)

EXPONENTIAL_RESIDUAL = 1e-9
MAX_TAYLOR_TERMS = 60


@dataclass(frozen=True)
class OracleConfig:
    """Taylor truncation bound and the norm above which the argument is halved."""

    series_tolerance: float = 1e-16
    scaling_threshold: float = 0.5

    def __post_init__(self):
        if not 0 < self.series_tolerance <= 1e-10:
            raise InvalidMatrix(f"series_tolerance must lie in (0, 1e-10], got {self.series_tolerance}")
        if not 0.25 <= self.scaling_threshold <= 1:
            raise InvalidMatrix(f"scaling_threshold must lie in [0.25, 1], got {self.scaling_threshold}")


def _operator_matrix(operator):
    matrix = getattr(operator, "matrix", operator)
    return np.asarray(matrix, dtype=complex)


def _taylor_exponential(stack, cfg):
    """exp of every matrix in a (..., d, d) stack by scaling and squaring."""
    norms = np.abs(stack).sum(axis=-1).max(axis=-1)
    largest = float(norms.max()) if norms.size else 0.0
    squarings = max(0, math.ceil(math.log2(largest / cfg.scaling_threshold))) if largest > 0 else 0
    scaled = stack / 2.0**squarings

    identity = np.broadcast_to(np.eye(stack.shape[-1], dtype=complex), stack.shape)
    result = identity.copy()
    term = identity.copy()
    for k in range(1, MAX_TAYLOR_TERMS + 1):
        term = term @ scaled / k
        result = result + term
        if np.abs(term).max() <= cfg.series_tolerance:
            break
    else:
        raise InvalidMatrix(f"Taylor series did not converge in {MAX_TAYLOR_TERMS} terms")

    for _ in range(squarings):
        result = result @ result
    return result


def matrix_exponential(M, cfg=OracleConfig()):
    """
    e^M by scaling and squaring with a truncated Taylor series.

    Accepts a single square matrix or a stack of shape (..., d, d). The
    result is checked against e^{-M}: ||e^M e^{-M} - 1||_max <= 1e-9.
    """
    M = np.asarray(M, dtype=complex)
    if M.ndim < 2 or M.shape[-1] != M.shape[-2]:
        raise ShapeMismatch(f"matrix exponential needs square matrices, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise InvalidMatrix("matrix has non-finite entries")
    forward = _taylor_exponential(M, cfg)
    backward = _taylor_exponential(-M, cfg)
    residual = float(np.abs(forward @ backward - np.eye(M.shape[-1])).max())
    if residual > EXPONENTIAL_RESIDUAL:
        raise ToleranceBreach(f"e^M e^-M deviates from identity by {residual:.3g}")
    return forward


def _check_oracle_fits(matrix, state, gamma):
    eigenvalues = np.linalg.eigvalsh((matrix + matrix.conj().T) / 2)
    for shift in {gamma * float(eigenvalues.min()), gamma * float(eigenvalues.max())}:
        check_shift_fits(state.amplitudes, state.grid, shift)


def evolve_state(operator, state, cfg, ocfg=OracleConfig()):
    """
    Apply exp(-i gamma M p / hbar) to a joint state for a Hermitian M.

    Args:
        operator: Projector or raw Hermitian matrix M
        state: EntangledState
        cfg: MeasurementConfig (gamma, hbar)
        ocfg: OracleConfig

    Returns:
        EntangledState
    """
    matrix = _operator_matrix(operator)
    if matrix.shape != (state.d, state.d):
        raise ShapeMismatch(f"operator shape {matrix.shape} does not match system dimension {state.d}")
    _check_oracle_fits(matrix, state, cfg.gamma)

    momenta = cfg.hbar * state.grid.wavenumbers()
    generators = (-1j * cfg.gamma / cfg.hbar) * momenta[:, None, None] * matrix[None, :, :]
    propagators = matrix_exponential(generators, ocfg)

    spectrum = np.fft.fft(state.amplitudes, axis=1)
    evolved = np.einsum("kij,jk->ik", propagators, spectrum)
    return EntangledState(state.grid, np.fft.ifft(evolved, axis=1))


def momentum_space_evolve(A, psi, phi, cfg, ocfg=OracleConfig()):
    """Oracle counterpart of measurement.ps_measure."""
    return evolve_state(A, product_state(psi, phi), cfg, ocfg)


def _probe_pointer(grid, gamma):
    """Unit Gaussian centred so that both it and its gamma-shift stay on the grid."""
    return gaussian_pointer(grid, center=-gamma / 2, sigma=1.0)


def operator_identity_check(A, cfg, grid, ocfg=OracleConfig(), phi=None):
    """
    Max deviation between the oracle and 1 - A + A S over system basis states.

    Each basis state |j> is paired with `phi` (a Gaussian probe centred
    at -gamma/2 by default); the deviation is the largest amplitude
    difference.
    """
    phi = phi if phi is not None else _probe_pointer(grid, cfg.gamma)
    deviation = 0.0
    for j in range(A.d):
        state = product_state(SystemState.basis(A.d, j), phi)
        oracle = evolve_state(A, state, cfg, ocfg)
        closed = apply_measurement_operator(A, state, cfg)
        deviation = max(deviation, float(np.abs(oracle.amplitudes - closed.amplitudes).max()))
    logger.debug("operator identity deviation %.3g (gamma=%g)", deviation, cfg.gamma)
    return deviation


def inverse_identity_check(A, cfg, grid, trials=8, seed=0, phi=None):
    """
    Apply 1 - A + A S then 1 - A + A S^dagger to random product states.

    System states are random; the pointer is `phi` when given, otherwise
    a random Gaussian wavepacket placed so that its gamma-shift fits.

    Returns:
        Largest amplitude deviation from the input state
    """
    rng = np.random.default_rng(seed)
    deviation = 0.0
    for _ in range(trials):
        psi = random_state(A.d, rng)
        pointer = phi
        if pointer is None:
            pointer = gaussian_pointer(
                grid,
                center=-cfg.gamma / 2 + rng.uniform(-1.0, 1.0),
                sigma=rng.uniform(0.5, 1.5),
                wavenumber=rng.uniform(-2.0, 2.0),
            )
        state = product_state(psi, pointer)
        forward = apply_measurement_operator(A, state, cfg)
        recovered = apply_measurement_operator(A, forward, cfg, adjoint=True)
        deviation = max(deviation, float(np.abs(recovered.amplitudes - state.amplitudes).max()))
    logger.debug("inverse identity deviation %.3g (gamma=%g)", deviation, cfg.gamma)
    return deviation
