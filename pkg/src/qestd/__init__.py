"""Exact solutions of a quasi-exactly solvable time-dependent sextic oscillator, with numerical cross-checks."""
from .algebra import (
    EvenPolynomial,
    ModelParams,
    SpectralData,
    TridiagonalMatrix,
    apply_generator,
    build_h0_matrix,
    eigen_residual,
    eigensolve,
    spectrum,
)
from .model import SuperpositionSpec, WaveField, mod_prefactor, potential, psi_closed_form, sigma
from .propagator import PropagationConfig, fidelity, propagate, stationary_eigs_fd
from .pump import PumpProfile, PumpSample, eval_pump, h_of_t
from .verify import ResidualReport, inner, norm, orthogonality_matrix, pde_residual

__version__ = "0.1.0"
