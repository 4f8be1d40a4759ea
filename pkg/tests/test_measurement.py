import math

import numpy as np
import pytest

from pointer_sim.analysis import global_phase_between, interference_report, momentum_shift, peak_weights
from pointer_sim.errors import PostselectionImpossible, ShapeMismatch
from pointer_sim.measurement import (
    apply_measurement_operator,
    postselect,
    pps_pointer_density,
    pps_pointer_state,
    product_state,
    ps_cross_term,
    ps_density_decomposition,
    ps_measure,
    ps_pointer_density,
)
from pointer_sim.oracle import momentum_space_evolve
from pointer_sim.pointer import (
    MeasurementConfig,
    PointerWavefunction,
    gaussian_pointer,
    overlap,
    position_expectation,
    translate,
)
from pointer_sim.scenario import build_setup, load_scenario, with_parameter
from pointer_sim.system import (
    Projector,
    SystemState,
    normalization_constant,
    random_projector,
    random_state,
    weak_value_report,
)

SCENARIOS = [
    "eigenstate.json",
    "symmetric_superposition.json",
    "anomalous_weak_value.json",
    "complex_weak_value.json",
    "gamma_sweep.json",
]


def _integral(density, grid):
    return float(np.sum(density) * grid.dq)


class TestPsMeasure:
    def test_eigenvalue_zero_leaves_pointer(self, qubit_projector, ket1, phi):
        state = ps_measure(qubit_projector, ket1, phi, MeasurementConfig(gamma=3.0))
        assert np.abs(state.amplitudes - product_state(ket1, phi).amplitudes).max() <= 1e-15

    def test_eigenvalue_one_shifts_pointer(self, qubit_projector, ket0, phi):
        state = ps_measure(qubit_projector, ket0, phi, MeasurementConfig(gamma=3.0))
        expected = product_state(ket0, translate(phi, 3.0))
        assert np.abs(state.amplitudes - expected.amplitudes).max() <= 1e-15

    def test_superposition_is_normalized(self, qubit_projector, plus, phi):
        state = ps_measure(qubit_projector, plus, phi, MeasurementConfig(gamma=5.0))
        assert state.norm() == pytest.approx(1, abs=1e-12)

    def test_matches_oracle(self, grid):
        rng = np.random.default_rng(7)
        A = random_projector(4, 2, rng)
        psi = random_state(4, rng)
        phi = gaussian_pointer(grid, center=-1.5)
        cfg = MeasurementConfig(gamma=3.0)
        closed = ps_measure(A, psi, phi, cfg)
        oracle = momentum_space_evolve(A, psi, phi, cfg)
        assert np.abs(closed.amplitudes - oracle.amplitudes).max() <= 1e-9

    def test_dimension_mismatch(self, qubit_projector, phi):
        with pytest.raises(ShapeMismatch):
            ps_measure(qubit_projector, SystemState.basis(3, 0), phi, MeasurementConfig(gamma=1.0))

    def test_adjoint_undoes_operator(self, qubit_projector, plus, phi, cfg2):
        state = product_state(plus, phi)
        forward = apply_measurement_operator(qubit_projector, state, cfg2)
        back = apply_measurement_operator(qubit_projector, forward, cfg2, adjoint=True)
        assert np.abs(back.amplitudes - state.amplitudes).max() <= 1e-10


class TestPsPointerDensity:
    def test_equals_marginal(self, qubit_projector, plus, phi, cfg2):
        marginal = ps_measure(qubit_projector, plus, phi, cfg2).marginal_density()
        assert np.abs(ps_pointer_density(qubit_projector, plus, phi, cfg2) - marginal).max() <= 1e-10

    def test_eigenstate_gives_shifted_profile(self, qubit_projector, ket0, phi):
        cfg = MeasurementConfig(gamma=3.0)
        expected = np.abs(translate(phi, 3.0).samples) ** 2
        assert np.abs(ps_pointer_density(qubit_projector, ket0, phi, cfg) - expected).max() <= 1e-15

    def test_two_equal_peaks(self, qubit_projector, plus, grid):
        phi = gaussian_pointer(grid, center=-3.0)
        density = ps_pointer_density(qubit_projector, plus, phi, MeasurementConfig(gamma=6.0))
        left, right = peak_weights(density, grid, split_at=0.0)
        assert left == pytest.approx(0.5, abs=1e-8)
        assert right == pytest.approx(0.5, abs=1e-8)
        assert _integral(density, grid) == pytest.approx(1, abs=1e-12)

    def test_position_shift_is_gamma_times_expectation(self, qubit_projector, plus, grid, phi):
        density = ps_pointer_density(qubit_projector, plus, phi, MeasurementConfig(gamma=2.0))
        mean = float(np.sum(grid.positions * density) * grid.dq)
        assert mean == pytest.approx(1.0, abs=1e-6)


class TestPsCrossTerm:
    def test_eigenstate(self, qubit_projector, ket0, phi, cfg2):
        assert np.abs(ps_cross_term(qubit_projector, ket0, phi, cfg2)).max() <= 1e-15

    def test_overlapping_branches(self, qubit_projector, plus, phi):
        cross = ps_cross_term(qubit_projector, plus, phi, MeasurementConfig(gamma=0.5))
        assert np.abs(cross).max() <= 1e-10

    def test_non_projector_interferes(self, plus, phi, cfg2):
        broken = Projector.unchecked(np.diag([0.9, 0.0]))
        assert np.abs(ps_cross_term(broken, plus, phi, cfg2)).max() > 1e-3

    def test_randomized_projectors(self, grid):
        rng = np.random.default_rng(2024)
        worst_max, worst_l1 = 0.0, 0.0
        for _ in range(1000):
            d = int(rng.choice([2, 4, 8]))
            A = random_projector(d, int(rng.integers(1, d)), rng)
            gamma = float(rng.uniform(-1.0, 1.0)) if rng.random() < 0.7 else float(rng.uniform(-8.0, 8.0))
            phi = gaussian_pointer(grid, center=-gamma / 2, sigma=float(rng.uniform(0.7, 1.3)))
            parts = ps_density_decomposition(A, random_state(d, rng), phi, MeasurementConfig(gamma))
            worst_max = max(worst_max, float(np.abs(parts.cross).max()))
            worst_l1 = max(worst_l1, interference_report(parts).cross_l1)
        assert worst_max <= 1e-10
        assert worst_l1 <= 1e-9


class TestPpsPointerState:
    def test_eigenstate(self, qubit_projector, ket0, phi):
        result = pps_pointer_state(qubit_projector, ket0, ket0, phi, MeasurementConfig(gamma=3.0))
        assert result.report.weak_value == pytest.approx(1, abs=1e-12)
        assert result.report.normalization == pytest.approx(1, abs=1e-12)
        assert result.report.phase_chi == 0
        assert np.abs(result.pointer.samples - translate(phi, 3.0).samples).max() <= 1e-12

    def test_anomalous_matches_oracle(self, qubit_projector, plus, anomalous_post, phi, cfg2):
        result = pps_pointer_state(qubit_projector, plus, anomalous_post, phi, cfg2)
        oracle = momentum_space_evolve(qubit_projector, plus, phi, cfg2)
        pointer, probability = postselect(oracle, anomalous_post)
        _, residual = global_phase_between(result.pointer, pointer)
        assert residual <= 1e-9
        assert probability == pytest.approx(result.postselection_probability, abs=1e-10)

    def test_probability(self, qubit_projector, plus, anomalous_post, phi, cfg2):
        result = pps_pointer_state(qubit_projector, plus, anomalous_post, phi, cfg2)
        N = normalization_constant(result.report.weak_value, math.exp(-0.5))
        overlap = abs(np.vdot(anomalous_post.amplitudes, plus.amplitudes))
        assert result.postselection_probability == pytest.approx(N**2 * overlap**2, abs=1e-9)
        assert 0 <= result.postselection_probability <= 1

    def test_report_matches_weak_value_report(self, qubit_projector, plus, anomalous_post, phi, cfg2):
        result = pps_pointer_state(qubit_projector, plus, anomalous_post, phi, cfg2)
        expected = weak_value_report(qubit_projector, plus, anomalous_post, overlap(phi, translate(phi, 2.0)))
        assert result.report == expected

    def test_pointer_is_normalized(self, qubit_projector, plus, complex_post, phi, cfg2):
        result = pps_pointer_state(qubit_projector, plus, complex_post, phi, cfg2)
        assert result.pointer.norm() == pytest.approx(1, abs=1e-12)
        # A_w (1 - A_w*) = i/2 is imaginary against a real overlap
        assert result.report.normalization == pytest.approx(1, abs=1e-12)

    @pytest.mark.parametrize("seed", range(20))
    def test_phase_is_pancharatnam(self, grid, seed):
        rng = np.random.default_rng(seed)
        d = int(rng.choice([2, 4, 8]))
        A = random_projector(d, int(rng.integers(1, d)), rng)
        gamma = float(rng.uniform(-6.0, 6.0))
        phi = gaussian_pointer(grid, center=-gamma / 2)
        cfg = MeasurementConfig(gamma)
        pre = random_state(d, rng)
        post = random_state(d, rng)
        while abs(np.vdot(post.amplitudes, pre.amplitudes)) < 0.1:
            post = random_state(d, rng)

        result = pps_pointer_state(A, pre, post, phi, cfg)
        oracle_pointer, _ = postselect(momentum_space_evolve(A, pre, phi, cfg), post)
        chi = result.report.phase_chi
        stripped = PointerWavefunction(grid, result.pointer.samples * np.exp(-1j * chi))
        theta, residual = global_phase_between(stripped, oracle_pointer)
        assert residual <= 1e-9
        assert abs(math.remainder(theta - chi, 2 * math.pi)) <= 1e-9


class TestPpsPointerDensity:
    def test_components_sum_to_total(self, qubit_projector, plus, anomalous_post, phi, cfg2):
        parts = pps_pointer_density(qubit_projector, plus, anomalous_post, phi, cfg2)
        recombined = parts.term_unshifted + parts.term_shifted + parts.cross
        assert np.abs(parts.total - recombined).max() <= 1e-15

    def test_integrates_to_one(self, grid, qubit_projector, plus, anomalous_post, phi, cfg2):
        parts = pps_pointer_density(qubit_projector, plus, anomalous_post, phi, cfg2)
        assert _integral(parts.total, grid) == pytest.approx(1, abs=1e-12)

    def test_matches_pointer_state(self, qubit_projector, plus, complex_post, phi, cfg2):
        parts = pps_pointer_density(qubit_projector, plus, complex_post, phi, cfg2)
        pointer = pps_pointer_state(qubit_projector, plus, complex_post, phi, cfg2).pointer
        assert np.abs(parts.total - np.abs(pointer.samples) ** 2).max() <= 1e-12

    def test_unit_weak_value_has_no_cross_term(self, qubit_projector, ket0, phi, cfg2):
        parts = pps_pointer_density(qubit_projector, ket0, ket0, phi, cfg2)
        assert np.abs(parts.cross).max() <= 1e-15

    def test_separated_branches(self, grid, qubit_projector, plus, anomalous_post):
        phi = gaussian_pointer(grid, center=-8.0)
        parts = pps_pointer_density(qubit_projector, plus, anomalous_post, phi, MeasurementConfig(gamma=16.0))
        assert interference_report(parts).cross_l1 < 1e-8

    def test_anomalous_interference_dip(self, grid, qubit_projector, plus, anomalous_post, phi, cfg2):
        parts = pps_pointer_density(qubit_projector, plus, anomalous_post, phi, cfg2)
        midpoint = int(np.argmin(np.abs(grid.positions - 1.0)))
        incoherent = parts.term_unshifted[midpoint] + parts.term_shifted[midpoint]
        assert incoherent - parts.total[midpoint] > 0.01 * parts.total.max()
        assert interference_report(parts).cross_l1 > 0.05


class TestPostselect:
    def test_identical_selection_is_trivial(self, qubit_projector, plus, phi, cfg2):
        state = ps_measure(qubit_projector, plus, phi, cfg2)
        pointer, probability = postselect(state, plus)
        expected = pps_pointer_state(qubit_projector, plus, plus, phi, cfg2)
        assert probability == pytest.approx(expected.postselection_probability, abs=1e-12)
        assert np.abs(pointer.samples - expected.pointer.samples).max() <= 1e-12

    def test_product_state(self, ket0, phi):
        pointer, probability = postselect(product_state(ket0, phi), ket0)
        assert probability == pytest.approx(1, abs=1e-12)
        assert np.abs(pointer.samples - phi.samples).max() <= 1e-12

    def test_impossible(self, ket0, ket1, phi):
        with pytest.raises(PostselectionImpossible):
            postselect(product_state(ket0, phi), ket1)

    def test_dimension_mismatch(self, ket0, phi):
        with pytest.raises(ShapeMismatch):
            postselect(product_state(ket0, phi), SystemState.basis(3, 0))

    def test_closed_form_equals_postselected_state(self, qubit_projector, plus, anomalous_post, phi, cfg2):
        pointer, probability = postselect(ps_measure(qubit_projector, plus, phi, cfg2), anomalous_post)
        result = pps_pointer_state(qubit_projector, plus, anomalous_post, phi, cfg2)
        assert np.abs(pointer.samples - result.pointer.samples).max() <= 1e-12
        assert probability == pytest.approx(result.postselection_probability, abs=1e-12)


class TestMomentumLaw:
    @pytest.mark.parametrize("gamma", [0.5, 2.0, 6.0])
    def test_ps_marginal_keeps_momentum(self, grid, qubit_projector, plus, gamma):
        phi = gaussian_pointer(grid, center=-gamma / 2, wavenumber=0.7)
        state = ps_measure(qubit_projector, plus, phi, MeasurementConfig(gamma))
        assert abs(momentum_shift(phi, state)) <= 1e-10

    def test_pps_pointer_gains_momentum(self, qubit_projector, plus, complex_post, phi, cfg2):
        result = pps_pointer_state(qubit_projector, plus, complex_post, phi, cfg2)
        shift = momentum_shift(phi, result.pointer)
        assert abs(shift) > 1e-3

        oracle_pointer, _ = postselect(momentum_space_evolve(qubit_projector, plus, phi, cfg2), complex_post)
        assert momentum_shift(phi, oracle_pointer) == pytest.approx(shift, abs=1e-9)

    def test_identical_selection_keeps_momentum(self, qubit_projector, plus, phi, cfg2):
        result = pps_pointer_state(qubit_projector, plus, plus, phi, cfg2)
        assert abs(momentum_shift(phi, result.pointer)) <= 1e-9


@pytest.mark.parametrize("name", SCENARIOS)
def test_weak_limit_shift(scenario_dir, name):
    scenario = with_parameter(load_scenario(scenario_dir / name), "gamma", 1e-3)
    setup = build_setup(scenario)
    result = pps_pointer_state(setup.projector, setup.pre, setup.post, setup.phi, setup.cfg)
    shift = position_expectation(result.pointer) - position_expectation(setup.phi)
    expected = setup.cfg.gamma * result.report.weak_value.real
    assert shift == pytest.approx(expected, rel=1e-2)
