//! Independent numerical ground truth for the closed forms: a split-step Fourier
//! Schrödinger solver, a direct matrix-Riccati integrator and Gauss–Hermite quadrature.

pub mod quadrature;
pub mod riccati;
pub mod splitstep;

pub use quadrature::{gauss_hermite, gauss_hermite_expect, QuadratureRule};
pub use riccati::riccati_integrate;
pub use splitstep::{
    compare_to_analytic, default_grid, splitstep_evolve, GridSpec, GridWavefunction,
};
