//! Uncertainty functionals, explicit constants and inequality checkers.

pub mod checks;
pub mod constants;
pub mod functionals;
pub mod report;

pub use checks::*;
pub use constants::{
    corollary_grid_minimum, heisenberg_constant, local_uncertainty_constant, local_uncertainty_corollary_constant, CorollaryConstant,
    HeisenbergConstant, LocalConstant,
};
pub use functionals::{ball_measure, dispersion, entropy_k, lattice_count, mass_on, moment};
pub use report::{InequalityReport, Status, Witness};
