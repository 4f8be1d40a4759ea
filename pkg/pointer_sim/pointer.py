"""
Grid-discretized pointer wavefunctions, the translation operator S and
position/momentum observables.

The grid is periodic (FFT-based), so every shift is guarded against
amplitude wrapping across the edges.
"""

import logging
import math
from dataclasses import dataclass

import numpy as np

from pointer_sim.errors import (
    GridOverflow,
    GridTooSmall,
    IncommensurateShift,
    InvalidGrid,
    ShapeMismatch,
)

logger = logging.getLogger(__name__)

MIN_POINTS = 64
DEFAULT_Q_MIN = -20.0
DEFAULT_Q_MAX = 20.0
DEFAULT_POINTS = 1024
DEFAULT_SIGMA = 1.0
GAUSSIAN_EXTENT = 6.0
BOUNDARY_DECAY = 1e-8
COMMENSURATE_TOLERANCE = 1e-9
SHIFT_MODES = ("auto", "roll", "spectral")


@dataclass(frozen=True)
class PointerGrid:
    """Uniform periodic grid q_k = q_min + k*dq, k = 0..n-1."""

    q_min: float
    dq: float
    n: int

    def __post_init__(self):
        if self.dq <= 0 or not math.isfinite(self.dq):
            raise InvalidGrid(f"grid spacing must be positive, got {self.dq}")
        if self.n < MIN_POINTS or self.n & (self.n - 1):
            raise InvalidGrid(f"grid size must be a power of two >= {MIN_POINTS}, got {self.n}")

    @classmethod
    def from_bounds(cls, q_min=DEFAULT_Q_MIN, q_max=DEFAULT_Q_MAX, n=DEFAULT_POINTS):
        """Grid covering [q_min, q_max) with n points."""
        if q_max <= q_min:
            raise InvalidGrid(f"q_max ({q_max}) must exceed q_min ({q_min})")
        return cls(float(q_min), (q_max - q_min) / n, int(n))

    @property
    def positions(self):
        return self.q_min + self.dq * np.arange(self.n)

    @property
    def q_last(self):
        return self.q_min + self.dq * (self.n - 1)

    def wavenumbers(self):
        """Angular wavenumbers k in numpy FFT order."""
        return 2 * np.pi * np.fft.fftfreq(self.n, d=self.dq)


@dataclass(frozen=True)
class MeasurementConfig:
    """Interaction strength gamma, hbar and the shift implementation."""

    gamma: float
    hbar: float = 1.0
    shift_mode: str = "auto"

    def __post_init__(self):
        if self.hbar <= 0:
            raise InvalidGrid(f"hbar must be positive, got {self.hbar}")
        if self.shift_mode not in SHIFT_MODES:
            raise InvalidGrid(f"unknown shift mode {self.shift_mode!r}")


@dataclass(frozen=True, eq=False)
class PointerWavefunction:
    """Complex samples of a pointer wavefunction on a PointerGrid."""

    grid: PointerGrid
    samples: np.ndarray

    def __post_init__(self):
        samples = np.array(self.samples, dtype=complex)
        if samples.shape != (self.grid.n,):
            raise ShapeMismatch(f"expected {self.grid.n} samples, got shape {samples.shape}")
        samples.setflags(write=False)
        object.__setattr__(self, "samples", samples)

    def norm(self):
        return math.sqrt(float(np.sum(np.abs(self.samples) ** 2)) * self.grid.dq)

    def normalized(self):
        return PointerWavefunction(self.grid, self.samples / self.norm())

    def edge_ratio(self):
        """Largest edge magnitude relative to the peak magnitude."""
        magnitude = np.abs(self.samples)
        peak = magnitude.max()
        if peak == 0:
            return 0.0
        return float(max(magnitude[0], magnitude[-1]) / peak)


def gaussian_pointer(grid, center=0.0, sigma=DEFAULT_SIGMA, wavenumber=0.0):
    """
    Normalized Gaussian pointer proportional to exp(-(q-center)^2 / 4 sigma^2).

    Args:
        grid: PointerGrid to sample on
        center: Mean position
        sigma: Position standard deviation of |phi|^2
        wavenumber: Optional plane-wave boost e^{i k q}

    Returns:
        PointerWavefunction with unit discrete norm
    """
    if sigma <= 0:
        raise GridTooSmall(f"sigma must be positive, got {sigma}")
    low = center - GAUSSIAN_EXTENT * sigma
    high = center + GAUSSIAN_EXTENT * sigma
    if low < grid.q_min or high > grid.q_last:
        raise GridTooSmall(
            f"Gaussian support [{low:g}, {high:g}] exceeds grid [{grid.q_min:g}, {grid.q_last:g}]"
        )
    q = grid.positions
    samples = np.exp(-((q - center) ** 2) / (4 * sigma**2)).astype(complex)
    if wavenumber:
        samples = samples * np.exp(1j * wavenumber * q)
    return PointerWavefunction(grid, samples).normalized()


def _support_bounds(samples, grid):
    """Positions of the first and last sample above the boundary-decay level."""
    magnitude = np.abs(samples)
    if magnitude.ndim > 1:
        magnitude = magnitude.max(axis=0)
    peak = magnitude.max()
    if peak == 0:
        return None
    significant = np.nonzero(magnitude >= BOUNDARY_DECAY * peak)[0]
    q = grid.positions
    return q[significant[0]], q[significant[-1]]


def check_shift_fits(samples, grid, gamma):
    """Raise GridOverflow if shifting by gamma moves significant amplitude off the grid."""
    bounds = _support_bounds(samples, grid)
    if bounds is None:
        return
    low, high = bounds[0] + gamma, bounds[1] + gamma
    if low < grid.q_min or high > grid.q_last:
        raise GridOverflow(
            f"shift by {gamma:g} moves support to [{low:g}, {high:g}], "
            f"outside grid [{grid.q_min:g}, {grid.q_last:g}]"
        )


def shift_samples(samples, grid, gamma, mode="auto"):
    """
    Apply S = exp(-i gamma p / hbar) along the last axis of `samples`.

    Roll mode shifts indices exactly and needs gamma to be a whole number
    of grid steps; spectral mode multiplies by exp(-i k gamma) in Fourier
    space (hbar cancels since p = hbar k). Auto picks roll when it can.
    """
    samples = np.asarray(samples, dtype=complex)
    steps = gamma / grid.dq
    commensurate = abs(steps - round(steps)) <= COMMENSURATE_TOLERANCE
    if mode == "roll" and not commensurate:
        raise IncommensurateShift(f"gamma/dq = {steps:.12g} is not an integer")
    check_shift_fits(samples, grid, gamma)
    if mode == "roll" or (mode == "auto" and commensurate):
        return np.roll(samples, int(round(steps)), axis=-1)
    phase = np.exp(-1j * grid.wavenumbers() * gamma)
    return np.fft.ifft(np.fft.fft(samples, axis=-1) * phase, axis=-1)


def translate(phi, gamma, mode="auto"):
    """Return S|phi>, i.e. samples of phi(q - gamma)."""
    return PointerWavefunction(phi.grid, shift_samples(phi.samples, phi.grid, gamma, mode))


def _check_same_grid(a, b):
    if a.grid != b.grid:
        raise ShapeMismatch(f"pointer grids differ: {a.grid} vs {b.grid}")


def overlap(a, b):
    """<a|b> = sum_k a_k* b_k dq."""
    _check_same_grid(a, b)
    return complex(np.vdot(a.samples, b.samples)) * a.grid.dq


def probability_density(phi):
    return np.abs(phi.samples) ** 2


def position_expectation(phi):
    density = probability_density(phi)
    return float(np.sum(phi.grid.positions * density) / np.sum(density))


def momentum_moment(samples, grid, hbar=1.0):
    """
    Mean momentum of one or more stacked pointer rows.

    Rows are Fourier transformed and the momentum density is summed over
    all leading axes (for a joint state this is the system trace).
    """
    spectrum = np.abs(np.fft.fft(np.asarray(samples, dtype=complex), axis=-1)) ** 2
    density = spectrum.reshape(-1, grid.n).sum(axis=0)
    return float(hbar * np.sum(grid.wavenumbers() * density) / np.sum(density))


def momentum_expectation(phi, hbar=1.0):
    """<p> of phi computed from its momentum-space density."""
    return momentum_moment(phi.samples, phi.grid, hbar)
