//! Exact evolution of squeezed coherent states under time-dependent quadratic
//! Hamiltonians, together with the hydrodynamic and thermodynamic observables of the
//! evolving Gaussian and independent numerical oracles.

pub mod coefficient;
pub mod distributions;
pub mod constants;
pub mod error;
pub mod hamiltonian;
pub mod iwasawa;
pub mod linalg;
pub mod oracle;
pub mod runner;
pub mod scenario;
pub mod state;
pub mod symplectic;
pub mod thermo;

pub use coefficient::{CoefficientFunction, Harmonic};
pub use constants::{Constants, DEFAULT_TOL};
pub use error::{Error, Result};
pub use hamiltonian::{generator_at, hamiltonian_value, HamiltonianGenerator, HamiltonianSpec};
pub use iwasawa::{alpha_unwrap, iwasawa, Complex64, IwasawaFactors};
pub use state::{
    amplitude_at, covariance, evolve_state, evolve_state_with, flow_state, gamma_matrix,
    phase_at, psi_at, state_rates, StateRates, wigner_density, wigner_matrix, ComplexSymmetricMatrix, CovarianceMatrix,
    GaussianState, Trajectory, TrajectoryPoint, WignerMatrix,
};
pub use symplectic::{
    flow, propagate, propagate_with, symplecticity_defect, Stepper, SymplecticMatrix,
};
