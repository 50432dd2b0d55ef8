"""Decentralized excitable integral reinforcement learning toolkit.

Symmetric Kronecker product and sum algebra with its svec/smat
vectorization, Lyapunov and Riccati solvers built on it, model-based
policy iteration, closed-loop data collection, the per-loop learning
regression with conditioning diagnostics, state-modulation conditioning
fixes, and benchmark studies reproducing the reference conditioning
table.
"""

from .algebra import documented_examples, run_property_suite
from .eirl import (LearningRecord, LearningStep, RegressionProblem,
                   assemble_regression, run_eirl, solve_regression,
                   stability_margins, update_gain)
from .kleinman import KleinmanRun, kleinman_iterate, verify_monotonicity
from .lyapunov import (ale_unique_solvable, check_stabilizable_detectable,
                       hurwitz_margin, is_hurwitz, solve_ale_integral,
                       solve_ale_svec, solve_care_reference)
from .mee import (DEG2RAD, ModulationSpec, back_transform,
                  degree_to_radian_modulation, diagonal_modulation,
                  identity_modulation, modulate_dataset, modulate_problem,
                  modulated_regression, modulation_spec, run_eirl_mee,
                  verify_ale_modulation_invariance)
from .plants import (DecentralizedPlant, lin2d_plant, linear_plant,
                     synthetic2loop_plant, validate_plant)
from .reporting import emit_report, load_report, report_to_dict
from .simulate import (ProbingSignal, TrajectoryDataset, apply_pair_transform,
                       dataset_from_json, dataset_to_json, delta_matrix,
                       evaluate_lqr_cost, integral_matrix, lin2d_probing,
                       simulate_closed_loop, uniform_samples)
from .studies import (StudyConfig, StudyReport, check_study, config_from_dict,
                      lin2d_config, load_config, run_study, run_study_lin2d,
                      run_study_synthetic2loop, synthetic2loop_config)
from .symkron import (build_scheme, eig_multisets_match, skron, skron_entry,
                      skron_exp_identity_check, skron_pow_identity_check,
                      skron_sum, smat, spectrum_check_skron,
                      spectrum_check_skron_sum, svec, sym_basis, sym_project)

__version__ = "0.1.0"

__all__ = [
    "DEG2RAD", "DecentralizedPlant", "KleinmanRun", "LearningRecord",
    "LearningStep", "ModulationSpec", "ProbingSignal", "RegressionProblem",
    "StudyConfig", "StudyReport", "TrajectoryDataset",
    "ale_unique_solvable", "apply_pair_transform", "assemble_regression",
    "back_transform", "build_scheme", "check_stabilizable_detectable",
    "check_study", "config_from_dict", "dataset_from_json", "dataset_to_json",
    "degree_to_radian_modulation", "delta_matrix", "diagonal_modulation",
    "documented_examples", "eig_multisets_match", "emit_report",
    "evaluate_lqr_cost", "hurwitz_margin", "identity_modulation",
    "integral_matrix", "is_hurwitz", "kleinman_iterate", "lin2d_config",
    "lin2d_plant", "lin2d_probing", "linear_plant", "load_config",
    "load_report", "modulate_dataset", "modulate_problem",
    "modulated_regression", "modulation_spec", "report_to_dict",
    "run_eirl", "run_eirl_mee", "run_property_suite", "run_study",
    "run_study_lin2d", "run_study_synthetic2loop", "simulate_closed_loop",
    "skron", "skron_entry", "skron_exp_identity_check",
    "skron_pow_identity_check", "skron_sum", "smat", "solve_ale_integral",
    "solve_ale_svec", "solve_care_reference", "solve_regression",
    "spectrum_check_skron", "spectrum_check_skron_sum", "stability_margins",
    "svec", "sym_basis", "sym_project", "synthetic2loop_config",
    "synthetic2loop_plant", "uniform_samples", "update_gain",
    "validate_plant", "verify_ale_modulation_invariance",
    "verify_monotonicity",
]
