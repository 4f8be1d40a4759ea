"""
Scenario pipelines behind the `run`, `compare` and `sweep` commands.

Each pipeline writes its artifacts into an output directory and returns
the report model it wrote.
"""

import logging
from pathlib import Path

import numpy as np

from pointer_sim.analysis import global_phase_between, interference_report, momentum_shift, peak_weights
from pointer_sim.errors import ScenarioError, ToleranceBreach
from pointer_sim.export import write_density_csv, write_report_json, write_rows_csv
from pointer_sim.measurement import (
    pps_pointer_density,
    pps_pointer_state,
    postselect,
    ps_density_decomposition,
    ps_measure,
)
from pointer_sim.oracle import inverse_identity_check, momentum_space_evolve, operator_identity_check
from pointer_sim.pointer import PointerWavefunction, momentum_expectation, position_expectation
from pointer_sim.scenario import build_setup, with_parameter
from pointer_sim.schemas import (
    ComparisonReport,
    InterferenceSummary,
    MomentumSummary,
    OracleSummary,
    PositionSummary,
    RunReport,
    SweepRow,
    WeakValueSummary,
    to_pair,
)
from pointer_sim.system import expectation, wrap_phase

logger = logging.getLogger(__name__)

ORACLE_TOLERANCE = 1e-9
INVERSE_TOLERANCE = 1e-10
NORM_TOLERANCE = 1e-10


def _interference_summary(parts):
    report = interference_report(parts)
    return InterferenceSummary(
        cross_l1=report.cross_l1,
        cross_signed=report.cross_signed,
        max_abs_cross=report.max_abs_cross,
    )


def _weak_value_summary(pps):
    report = pps.report
    return WeakValueSummary(
        weak_value=to_pair(report.weak_value),
        overlap=to_pair(report.overlap),
        phase_chi=report.phase_chi,
        normalization=report.normalization,
        shifted_overlap=to_pair(report.shifted_overlap),
        postselection_probability=pps.postselection_probability,
    )


def _oracle_summary(setup, ps_state, pps):
    A, cfg = setup.projector, setup.cfg
    oracle_state = momentum_space_evolve(A, setup.pre, setup.phi, cfg)
    summary = {
        "ps_max_deviation": float(np.abs(oracle_state.amplitudes - ps_state.amplitudes).max()),
        "ps_norm_deviation": abs(oracle_state.norm() - 1.0),
        "operator_identity_deviation": operator_identity_check(A, cfg, setup.grid, phi=setup.phi),
        "inverse_identity_deviation": inverse_identity_check(A, cfg, setup.grid, phi=setup.phi),
    }
    passed = (
        summary["ps_max_deviation"] <= ORACLE_TOLERANCE
        and summary["ps_norm_deviation"] <= ORACLE_TOLERANCE
        and summary["operator_identity_deviation"] <= ORACLE_TOLERANCE
        and summary["inverse_identity_deviation"] <= INVERSE_TOLERANCE
    )
    if pps is not None:
        oracle_pointer, probability = postselect(oracle_state, setup.post)
        chi = pps.report.phase_chi
        stripped = PointerWavefunction(setup.grid, pps.pointer.samples * np.exp(-1j * chi))
        theta, _ = global_phase_between(stripped, oracle_pointer)
        _, residual = global_phase_between(pps.pointer, oracle_pointer)
        summary["pps_max_residual"] = residual
        summary["pps_phase"] = theta
        summary["pps_phase_error"] = abs(wrap_phase(theta - chi))
        summary["pps_probability_error"] = abs(probability - pps.postselection_probability)
        passed = (
            passed
            and residual <= ORACLE_TOLERANCE
            and summary["pps_phase_error"] <= ORACLE_TOLERANCE
            and summary["pps_probability_error"] <= NORM_TOLERANCE
        )
    return OracleSummary(**summary, passed=passed)


def run_scenario(scenario, out_dir) -> RunReport:
    """
    Execute the PS (and, with a postselection vector, PPS) pipeline.

    Writes the selected densities as CSV and a `report.json`. Raises
    ToleranceBreach after writing the report if an oracle contract fails.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    outputs = scenario.selected_outputs()
    setup = build_setup(scenario)
    A, pre, post, phi, cfg = setup.projector, setup.pre, setup.post, setup.phi, setup.cfg
    logger.info("Running scenario '%s' (d=%d, gamma=%g)", scenario.name, A.d, cfg.gamma)

    ps_state = ps_measure(A, pre, phi, cfg)
    ps_parts = ps_density_decomposition(A, pre, phi, cfg)
    pps = pps_pointer_state(A, pre, post, phi, cfg) if post is not None else None
    pps_parts = pps_pointer_density(A, pre, post, phi, cfg) if post is not None else None

    report = RunReport(
        scenario=scenario.name,
        system_dim=A.d,
        gamma=cfg.gamma,
        hbar=cfg.hbar,
        expectation=expectation(A, pre),
    )
    artifacts = []
    if "ps_density" in outputs:
        write_density_csv(out_dir / "ps_density.csv", setup.grid, {
            "total": ps_parts.total,
            "term_unshifted": ps_parts.term_unshifted,
            "term_shifted": ps_parts.term_shifted,
            "cross": ps_parts.cross,
        })
        artifacts.append("ps_density.csv")
    if "pps_density" in outputs and pps_parts is not None:
        write_density_csv(out_dir / "pps_density.csv", setup.grid, {
            "total": pps_parts.total,
            "term_unshifted": pps_parts.term_unshifted,
            "term_shifted": pps_parts.term_shifted,
            "cross": pps_parts.cross,
        })
        artifacts.append("pps_density.csv")
    if "weak_value" in outputs and pps is not None:
        report.weak_value = _weak_value_summary(pps)
    if "interference" in outputs:
        report.ps_interference = _interference_summary(ps_parts)
        if pps_parts is not None:
            report.pps_interference = _interference_summary(pps_parts)
    if "oracle" in outputs:
        report.oracle = _oracle_summary(setup, ps_state, pps)
    if "momentum" in outputs:
        report.momentum = MomentumSummary(
            before=momentum_expectation(phi, cfg.hbar),
            ps_shift=momentum_shift(phi, ps_state, cfg.hbar),
            pps_shift=momentum_shift(phi, pps.pointer, cfg.hbar) if pps is not None else None,
        )
    if "position" in outputs:
        q0 = position_expectation(phi)
        ps_mean = float(np.sum(setup.grid.positions * ps_state.marginal_density()) * setup.grid.dq)
        report.position = PositionSummary(
            before=q0,
            ps_shift=ps_mean - q0,
            ps_prediction=cfg.gamma * report.expectation,
            pps_shift=position_expectation(pps.pointer) - q0 if pps is not None else None,
            weak_limit_prediction=cfg.gamma * pps.report.weak_value.real if pps is not None else None,
        )

    artifacts.append("report.json")
    report.artifacts = artifacts
    write_report_json(out_dir / "report.json", report)
    if report.oracle is not None and not report.oracle.passed:
        raise ToleranceBreach(f"oracle checks failed for scenario '{scenario.name}': {report.oracle}")
    return report


def compare_mode(scenario, out_dir) -> ComparisonReport:
    """
    Run PS and PPS on the same (A, psi_i, phi, gamma) and write the
    side-by-side densities (`compare.csv`) and delta table (`compare.json`).
    """
    if scenario.postselection is None:
        raise ScenarioError("compare needs a scenario with a postselection vector")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    setup = build_setup(scenario)
    A, pre, post, phi, cfg = setup.projector, setup.pre, setup.post, setup.phi, setup.cfg

    ps_parts = ps_density_decomposition(A, pre, phi, cfg)
    pps_parts = pps_pointer_density(A, pre, post, phi, cfg)
    pps = pps_pointer_state(A, pre, post, phi, cfg)
    ps_state = ps_measure(A, pre, phi, cfg)
    split_at = scenario.pointer.center + cfg.gamma / 2

    write_density_csv(out_dir / "compare.csv", setup.grid, {
        "ps_total": ps_parts.total,
        "ps_cross": ps_parts.cross,
        "pps_total": pps_parts.total,
        "pps_cross": pps_parts.cross,
    })
    report = ComparisonReport(
        scenario=scenario.name,
        gamma=cfg.gamma,
        weak_value=to_pair(pps.report.weak_value),
        ps_cross_l1=interference_report(ps_parts).cross_l1,
        pps_cross_l1=interference_report(pps_parts).cross_l1,
        ps_momentum_shift=momentum_shift(phi, ps_state, cfg.hbar),
        pps_momentum_shift=momentum_shift(phi, pps.pointer, cfg.hbar),
        ps_peak_weights=peak_weights(ps_parts.total, setup.grid, split_at),
        pps_peak_weights=peak_weights(pps_parts.total, setup.grid, split_at),
        max_density_difference=float(np.abs(ps_parts.total - pps_parts.total).max()),
    )
    write_report_json(out_dir / "compare.json", report)
    return report


def run_sweep(scenario, param, values, out_dir) -> list[SweepRow]:
    """Run the pipelines once per parameter value and write `sweep.csv`."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    rows = []
    for value in values:
        setup = build_setup(with_parameter(scenario, param, value))
        A, pre, post, phi, cfg = setup.projector, setup.pre, setup.post, setup.phi, setup.cfg
        row = SweepRow(
            param=param,
            value=value,
            ps_cross_l1=interference_report(ps_density_decomposition(A, pre, phi, cfg)).cross_l1,
        )
        if post is not None:
            pps = pps_pointer_state(A, pre, post, phi, cfg)
            row.pps_cross_l1 = interference_report(pps_pointer_density(A, pre, post, phi, cfg)).cross_l1
            row.weak_value_re = pps.report.weak_value.real
            row.weak_value_im = pps.report.weak_value.imag
            row.normalization = pps.report.normalization
            row.postselection_probability = pps.postselection_probability
            row.pps_momentum_shift = momentum_shift(phi, pps.pointer, cfg.hbar)
        logger.debug("sweep %s=%g: %s", param, value, row)
        rows.append(row)
    write_rows_csv(out_dir / "sweep.csv", rows)
    return rows
