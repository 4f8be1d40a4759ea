"""
Randomized verification battery run by the `verify` command.

Every case is drawn from a seeded generator, so a battery with the same
(trials, ps_trials, seed) always produces the same report.
"""

import logging

import numpy as np

from pointer_sim.analysis import global_phase_between, interference_report, momentum_shift
from pointer_sim.errors import NumericalDegeneracy
from pointer_sim.measurement import (
    postselect,
    pps_pointer_state,
    product_state,
    ps_density_decomposition,
    ps_measure,
)
from pointer_sim.oracle import (
    evolve_state,
    inverse_identity_check,
    momentum_space_evolve,
    operator_identity_check,
)
from pointer_sim.pointer import MeasurementConfig, PointerGrid, PointerWavefunction, gaussian_pointer
from pointer_sim.schemas import VerificationReport
from pointer_sim.system import Projector, random_projector, random_state, wrap_phase

logger = logging.getLogger(__name__)

DIMENSIONS = (2, 4, 8)
MAX_GAMMA = 8.0
ORACLE_TOLERANCE = 1e-9
INVERSE_TOLERANCE = 1e-10
PS_CROSS_TOLERANCE = 1e-10
PS_CROSS_L1_TOLERANCE = 1e-9
PS_MOMENTUM_TOLERANCE = 1e-10
NON_PROJECTOR_MOMENTUM_TOLERANCE = 1e-9
NEGATIVE_CONTROL_FLOOR = 1e-3
MIN_PPS_OVERLAP = 0.1
MIN_PPS_PROBABILITY = 1e-3
MAX_POSTSELECTION_DRAWS = 1000
NON_PROJECTOR_TRIALS = 20

NEGATIVE_CONTROL_MATRIX = np.diag([0.5, 0.25])
NEGATIVE_CONTROL_GAMMA = 2.0


def _random_case(rng, grid, max_gamma=MAX_GAMMA):
    d = int(rng.choice(DIMENSIONS))
    rank = int(rng.integers(1, d))
    A = random_projector(d, rank, rng)
    gamma = float(rng.uniform(-max_gamma, max_gamma))
    sigma = float(rng.uniform(0.7, 1.3))
    phi = gaussian_pointer(grid, center=-gamma / 2, sigma=sigma, wavenumber=float(rng.uniform(-1.0, 1.0)))
    return A, random_state(d, rng), phi, MeasurementConfig(gamma)


def _admissible_postselection(A, pre, phi, cfg, rng):
    """Draw postselected states until the overlap and probability are comfortably non-zero."""
    for _ in range(MAX_POSTSELECTION_DRAWS):
        post = random_state(A.d, rng)
        if abs(np.vdot(post.amplitudes, pre.amplitudes)) < MIN_PPS_OVERLAP:
            continue
        try:
            pps = pps_pointer_state(A, pre, post, phi, cfg)
        except NumericalDegeneracy:
            continue
        if pps.postselection_probability >= MIN_PPS_PROBABILITY:
            return post, pps
    raise NumericalDegeneracy(
        f"no admissible postselection in {MAX_POSTSELECTION_DRAWS} draws",
        hint="lower MIN_PPS_OVERLAP or MIN_PPS_PROBABILITY",
    )


def _random_hermitian(d, rng):
    """Hermitian matrix with spectrum in [-1, 1] and generally not a projector."""
    gaussian = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    hermitian = (gaussian + gaussian.conj().T) / 2
    return hermitian / np.abs(np.linalg.eigvalsh(hermitian)).max()


def run_verification_battery(trials=200, ps_trials=1000, seed=0, grid=None) -> VerificationReport:
    """
    Run the closed-form/oracle battery.

    Args:
        trials: Oracle cases (operator identity, PPS closed form, momentum law)
        ps_trials: Closed-form PS no-interference cases
        seed: Seed for numpy's default_rng
        grid: PointerGrid (defaults to [-20, 20) with 1024 points)

    Returns:
        VerificationReport; `passed` is False if any tolerance was exceeded
    """
    grid = grid or PointerGrid.from_bounds()
    rng = np.random.default_rng(seed)
    worst = {
        "operator_identity_max": 0.0,
        "inverse_identity_max": 0.0,
        "oracle_norm_max": 0.0,
        "ps_cross_max": 0.0,
        "ps_cross_l1_max": 0.0,
        "pps_residual_max": 0.0,
        "pps_phase_error_max": 0.0,
        "ps_momentum_max": 0.0,
        "non_projector_momentum_max": 0.0,
    }

    def record(key, value):
        worst[key] = max(worst[key], float(value))

    for case in range(trials):
        A, pre, phi, cfg = _random_case(rng, grid)
        closed = ps_measure(A, pre, phi, cfg)
        oracle = momentum_space_evolve(A, pre, phi, cfg)
        record("operator_identity_max", np.abs(oracle.amplitudes - closed.amplitudes).max())
        record("oracle_norm_max", abs(oracle.norm() - 1.0))
        record("inverse_identity_max", inverse_identity_check(A, cfg, grid, trials=1, seed=seed + case))
        record("ps_momentum_max", abs(momentum_shift(phi, closed)))

        post, pps = _admissible_postselection(A, pre, phi, cfg, rng)
        oracle_pointer, _ = postselect(oracle, post)
        chi = pps.report.phase_chi
        stripped = PointerWavefunction(grid, pps.pointer.samples * np.exp(-1j * chi))
        theta, _ = global_phase_between(stripped, oracle_pointer)
        _, residual = global_phase_between(pps.pointer, oracle_pointer)
        record("pps_residual_max", residual)
        record("pps_phase_error_max", abs(wrap_phase(theta - chi)))
    logger.info("✓ Oracle cases done: %d", trials)

    for _ in range(ps_trials):
        # Mostly overlapping branches (|gamma| <= sigma), some well separated.
        max_gamma = 1.0 if rng.random() < 0.7 else MAX_GAMMA
        A, pre, phi, cfg = _random_case(rng, grid, max_gamma)
        parts = ps_density_decomposition(A, pre, phi, cfg)
        record("ps_cross_max", np.abs(parts.cross).max())
        record("ps_cross_l1_max", interference_report(parts).cross_l1)
    logger.info("✓ PS no-interference cases done: %d", ps_trials)

    for _ in range(NON_PROJECTOR_TRIALS):
        d = int(rng.choice(DIMENSIONS))
        gamma = float(rng.uniform(-4.0, 4.0))
        phi = gaussian_pointer(grid, center=0.0, sigma=1.0, wavenumber=float(rng.uniform(-1.0, 1.0)))
        state = product_state(random_state(d, rng), phi)
        evolved = evolve_state(_random_hermitian(d, rng), state, MeasurementConfig(gamma))
        record("non_projector_momentum_max", abs(momentum_shift(phi, evolved)))

    negative_control = operator_identity_check(
        Projector.unchecked(NEGATIVE_CONTROL_MATRIX), MeasurementConfig(NEGATIVE_CONTROL_GAMMA), grid
    )

    limits = {
        "operator_identity_max": ORACLE_TOLERANCE,
        "inverse_identity_max": INVERSE_TOLERANCE,
        "oracle_norm_max": ORACLE_TOLERANCE,
        "ps_cross_max": PS_CROSS_TOLERANCE,
        "ps_cross_l1_max": PS_CROSS_L1_TOLERANCE,
        "pps_residual_max": ORACLE_TOLERANCE,
        "pps_phase_error_max": ORACLE_TOLERANCE,
        "ps_momentum_max": PS_MOMENTUM_TOLERANCE,
        "non_projector_momentum_max": NON_PROJECTOR_MOMENTUM_TOLERANCE,
    }
    failures = [
        f"{key} = {worst[key]:.3g} exceeds {limit:g}"
        for key, limit in limits.items()
        if worst[key] > limit
    ]
    if negative_control <= NEGATIVE_CONTROL_FLOOR:
        failures.append(f"negative control deviation {negative_control:.3g} is not above {NEGATIVE_CONTROL_FLOOR:g}")
    for failure in failures:
        logger.error("✗ %s", failure)

    return VerificationReport(
        trials=trials,
        ps_trials=ps_trials,
        seed=seed,
        negative_control_deviation=negative_control,
        failures=failures,
        passed=not failures,
        **worst,
    )
