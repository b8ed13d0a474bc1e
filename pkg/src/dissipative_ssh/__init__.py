"""Dissipative extensions of the SSH chain.

Builds PT-symmetric effective Hamiltonians and quadratic Liouvilleans for
Su-Schrieffer-Heeger lattices with balanced gain and loss, computes their
spectra, rapidities, steady-state and maximally-broken-state occupations,
and complex Zak phases, with a dense Fock-space oracle for validation.
"""

from .effective import (ModeSelection, SpectrumResult, bloch_band_energies,
                        build_bloch_hamiltonian, build_real_space_hamiltonian,
                        check_lambda_symmetry, classify_pt, complex_spectrum,
                        construct_mbs, continue_spectra, lambda_operator,
                        mbs_occupation)
from .fock import (SteadyStateError, Trajectory, dense_liouvillean,
                   fit_decay_rate, fock_hamiltonian, oracle_steady_state,
                   oracle_time_evolution, site_occupations, trace_distance)
from .lattice import (ConfigError, DisorderRealization, ModelConfig,
                      apply_disorder, critical_disorder_strengths, gain_sites,
                      hopping_amplitudes, hopping_matrix, loss_sites,
                      ring_momenta, sample_symmetric_disorder)
from .thirdq import (PairingError, RapiditySpectrum, ShapeMatrix,
                     analytic_rapidities_u2_ring, build_bloch_liouvillean,
                     build_shape_matrix, ness_covariance, ness_occupation,
                     rapidities)
from .validate import ValidationCheck, format_report, run_validation
from .zak import (BlochBand, BranchError, DefectiveFrameError, GaplessError,
                  PhaseDiagram, ZakPhaseResult, discrete_zak_phase,
                  effective_zak_phase, liouvillean_zak_phase, nmm_band_index,
                  phase_diagram, quantize_real_part, track_band)

__version__ = "0.1.0"

__all__ = [
    "BlochBand", "BranchError", "ConfigError", "DefectiveFrameError",
    "DisorderRealization", "GaplessError", "ModeSelection", "ModelConfig",
    "PairingError", "PhaseDiagram", "RapiditySpectrum", "ShapeMatrix",
    "SpectrumResult", "SteadyStateError", "Trajectory", "ValidationCheck",
    "ZakPhaseResult", "analytic_rapidities_u2_ring", "apply_disorder",
    "bloch_band_energies", "build_bloch_hamiltonian",
    "build_bloch_liouvillean", "build_real_space_hamiltonian",
    "build_shape_matrix", "check_lambda_symmetry", "classify_pt",
    "complex_spectrum", "construct_mbs", "continue_spectra",
    "critical_disorder_strengths", "dense_liouvillean", "discrete_zak_phase",
    "effective_zak_phase", "fit_decay_rate", "fock_hamiltonian",
    "format_report", "gain_sites", "hopping_amplitudes",
    "hopping_matrix", "lambda_operator", "loss_sites",
    "liouvillean_zak_phase", "mbs_occupation", "ness_covariance",
    "ness_occupation", "nmm_band_index", "oracle_steady_state",
    "oracle_time_evolution", "phase_diagram", "quantize_real_part",
    "rapidities", "ring_momenta", "run_validation", "sample_symmetric_disorder",
    "site_occupations", "trace_distance", "track_band",
]
