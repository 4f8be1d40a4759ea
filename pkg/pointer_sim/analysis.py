"""
Diagnostics that put numbers on interference, which-path tagging and
momentum conservation.
"""

import logging
from dataclasses import dataclass

import numpy as np

from pointer_sim.errors import DegenerateOverlap, ShapeMismatch
from pointer_sim.measurement import EntangledState
from pointer_sim.pointer import PointerWavefunction, momentum_moment, overlap
from pointer_sim.system import wrap_phase

logger = logging.getLogger(__name__)

PHASE_OVERLAP_FLOOR = 1e-12
SPLIT_POINT_TOLERANCE = 1e-9


@dataclass(frozen=True)
class InterferenceReport:
    """
    Integrated cross component of a density decomposition.

    cross_l1 is the interference strength: the L1 mass of the cross term,
    which does not cancel between positive and negative fringes.
    """

    cross_l1: float
    cross_signed: float
    max_abs_cross: float
    weak_value: complex | None
    shifted_overlap: complex


@dataclass(frozen=True, eq=False)
class WhichPathTags:
    """System-side tags (1 - A)|psi> and A|psi> of the two pointer branches."""

    unshifted: np.ndarray
    shifted: np.ndarray
    tag_overlap: complex


def interference_report(parts):
    """
    Integrate the cross part of a DensityDecomposition.

    Args:
        parts: Output of pps_pointer_density or ps_density_decomposition

    Returns:
        InterferenceReport
    """
    n = parts.grid.n
    for name in ("total", "term_unshifted", "term_shifted", "cross"):
        if np.shape(getattr(parts, name)) != (n,):
            raise ShapeMismatch(f"component {name} does not match a grid of {n} points")
    dq = parts.grid.dq
    cross = np.asarray(parts.cross, dtype=float)
    return InterferenceReport(
        cross_l1=float(np.sum(np.abs(cross)) * dq),
        cross_signed=float(np.sum(cross) * dq),
        max_abs_cross=float(np.max(np.abs(cross))),
        weak_value=parts.weak_value,
        shifted_overlap=parts.shifted_overlap,
    )


def _mean_momentum(state, hbar):
    if isinstance(state, EntangledState):
        return momentum_moment(state.amplitudes, state.grid, hbar)
    if isinstance(state, PointerWavefunction):
        return momentum_moment(state.samples, state.grid, hbar)
    raise ShapeMismatch(f"cannot take the momentum of {type(state).__name__}")


def momentum_shift(before, after, hbar=1.0):
    """
    <p>_after - <p>_before.

    `after` may be a pointer wavefunction or a joint state; for a joint
    state the momentum density is traced over the system index.
    """
    if before.grid != after.grid:
        raise ShapeMismatch("momentum_shift needs both states on the same grid")
    return _mean_momentum(after, hbar) - _mean_momentum(before, hbar)


def global_phase_between(a, b):
    """
    Global phase theta with b ~ e^{i theta} a.

    Returns:
        (theta, residual) where theta = arg<a|b> on (-pi, pi] and
        residual = max_k |b_k - e^{i theta} a_k|
    """
    inner = overlap(a, b)
    if abs(inner) < PHASE_OVERLAP_FLOOR:
        raise DegenerateOverlap(f"|<a|b>| = {abs(inner):.3g} is too small to fix a phase")
    theta = wrap_phase(float(np.angle(inner)))
    residual = float(np.max(np.abs(b.samples - np.exp(1j * theta) * a.samples)))
    return theta, residual


def which_path_tags(A, psi):
    """
    Tags attached to the unshifted and shifted pointer branches.

    For a projector the tags are orthogonal, so the branches stay
    distinguishable and the PS density carries no cross term.
    """
    if psi.d != A.d:
        raise ShapeMismatch(f"operator has dimension {A.d}, state has dimension {psi.d}")
    shifted = A.matrix @ psi.amplitudes
    unshifted = psi.amplitudes - shifted
    return WhichPathTags(unshifted, shifted, complex(np.vdot(unshifted, shifted)))


def peak_weights(density, grid, split_at):
    """
    Probability mass left and right of `split_at`.

    A sample lying on the split point contributes half its weight to
    each side.
    """
    density = np.asarray(density, dtype=float)
    if density.shape != (grid.n,):
        raise ShapeMismatch(f"density does not match a grid of {grid.n} points")
    q = grid.positions
    on_split = np.abs(q - split_at) <= SPLIT_POINT_TOLERANCE * grid.dq
    left = (q < split_at) & ~on_split
    right = (q > split_at) & ~on_split
    edge = 0.5 * float(np.sum(density[on_split]))
    return (
        (float(np.sum(density[left])) + edge) * grid.dq,
        (float(np.sum(density[right])) + edge) * grid.dq,
    )
