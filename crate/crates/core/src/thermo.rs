//! Entropies, temperature, pressure, quantum potential, internal energies, virial
//! relation and Maslov index of a squeezed coherent state.

use std::f64::consts::{E, PI};

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::constants::Constants;
use crate::distributions::{conditional_distribution, marginal_distribution};
use crate::error::{Error, Result};
use crate::hamiltonian::{generator_at, hamiltonian_value, HamiltonianSpec};
use crate::linalg;
use crate::state::{covariance, GaussianState};

fn half_log_det(m: &DMatrix<f64>) -> Result<f64> {
    let ch = linalg::symmetrize(m)
        .cholesky()
        .ok_or(Error::NotPositiveDefinite("covariance"))?;
    Ok(ch.l_dirty().diagonal().iter().map(|x| x.ln()).sum())
}

/// `k_B n (1 + ln πħ)`, the value every pure Gaussian state attains.
pub fn joint_entropy_closed_form(n: usize, constants: &Constants) -> f64 {
    constants.kb * n as f64 * (1.0 + (PI * constants.hbar).ln())
}

/// `½ k_B ln det(2πe Σ)`.
pub fn joint_entropy(state: &GaussianState) -> Result<f64> {
    let sigma = covariance(state)?.full() * (2.0 * PI * E);
    Ok(state.constants.kb * half_log_det(&sigma)?)
}

/// `½ k_B ln det(2πe (ħ/2) s²)`.
pub fn marginal_entropy(state: &GaussianState) -> Result<f64> {
    let m = &state.s2 * (PI * E * state.hbar());
    Ok(state.constants.kb * half_log_det(&m)?)
}

/// `½ k_B ln det(2πe (ħ/2) s⁻²)`.
pub fn conditional_entropy(state: &GaussianState) -> Result<f64> {
    let m = state.s_inv2()? * (PI * E * state.hbar());
    Ok(state.constants.kb * half_log_det(&m)?)
}

/// Rate of change of the marginal entropy, `k_B Tr(b − g c)`.
pub fn entropy_production(state: &GaussianState, spec: &HamiltonianSpec) -> Result<f64> {
    let (_, b, c) = spec.blocks_at(state.t)?;
    Ok(state.constants.kb * (b - &state.g * c).trace())
}

/// Temperature matrix `𝒯 = c (ħ/2) s⁻² / k_B` and scalar `𝕋 = Tr 𝒯`.
pub fn temperature(state: &GaussianState, spec: &HamiltonianSpec) -> Result<(DMatrix<f64>, f64)> {
    let c = spec.c_at(state.t)?;
    let tm = c * state.s_inv2()? * (0.5 * state.hbar() / state.constants.kb);
    let scalar = tm.trace();
    Ok((tm, scalar))
}

/// Pressure tensor `𝒫 = −(ħ²/4) c ∇∇ᵀρ_q` and its trace.
pub fn pressure(
    state: &GaussianState,
    spec: &HamiltonianSpec,
    q: &DVector<f64>,
) -> Result<(DMatrix<f64>, f64)> {
    let c = spec.c_at(state.t)?;
    let hess = marginal_distribution(state)?.hessian(q)?;
    let hbar = state.hbar();
    let p = c * hess * (-0.25 * hbar * hbar);
    let tr = p.trace();
    Ok((p, tr))
}

/// `s⁻² c s⁻²`, the curvature of the quantum potential.
fn potential_kernel(state: &GaussianState, spec: &HamiltonianSpec) -> Result<DMatrix<f64>> {
    let c = spec.c_at(state.t)?;
    let si2 = state.s_inv2()?;
    Ok(linalg::symmetrize(&(&si2 * c * &si2)))
}

/// `Q(q) = (ħ/2) Tr(c s⁻²) − ½ (q − ⟨q⟩)ᵀ s⁻² c s⁻² (q − ⟨q⟩)`.
pub fn quantum_potential(state: &GaussianState, spec: &HamiltonianSpec, q: &DVector<f64>) -> Result<f64> {
    if q.len() != state.n {
        return Err(Error::Shape {
            expected: state.n,
            got: q.len(),
        });
    }
    let c = spec.c_at(state.t)?;
    let k = potential_kernel(state, spec)?;
    let d = q - &state.mean_q;
    Ok(0.5 * state.hbar() * (c * state.s_inv2()?).trace() - 0.5 * d.dot(&(k * &d)))
}

/// `∇Q(q) = −s⁻² c s⁻² (q − ⟨q⟩)`.
pub fn quantum_potential_gradient(
    state: &GaussianState,
    spec: &HamiltonianSpec,
    q: &DVector<f64>,
) -> Result<DVector<f64>> {
    let k = potential_kernel(state, spec)?;
    Ok(-(k * (q - &state.mean_q)))
}

/// `⟨Q⟩ = (ħ/4) Tr(c s⁻²)`, equal to the kinetic internal energy and to `k_B𝕋/2`.
pub fn mean_quantum_potential(state: &GaussianState, spec: &HamiltonianSpec) -> Result<f64> {
    let c = spec.c_at(state.t)?;
    Ok(0.25 * state.hbar() * (c * state.s_inv2()?).trace())
}

/// `k_B² ([Tr 𝒯]² + 2 Tr 𝒯²)`.
///
/// By Isserlis' theorem this is the second moment `⟨((q − ⟨q⟩)ᵀ∇Q)²⟩ = 4⟨(Q − Q_max)²⟩`
/// over ρ_q. The central variance of Q is [`quantum_potential_central_variance`].
pub fn quantum_potential_variance(state: &GaussianState, spec: &HamiltonianSpec) -> Result<f64> {
    let (tm, tr) = temperature(state, spec)?;
    let kb = state.constants.kb;
    Ok(kb * kb * (tr * tr + 2.0 * (&tm * &tm).trace()))
}

/// The same quantity through the eigenvalues of 𝒯: `3k_B²𝕋² − 4k_B² Σ_{i<j} λ_i λ_j`.
pub fn quantum_potential_variance_eigen(state: &GaussianState, spec: &HamiltonianSpec) -> Result<f64> {
    let (tm, tr) = temperature(state, spec)?;
    let lambda = tm.complex_eigenvalues();
    let mut cross = 0.0;
    for i in 0..lambda.len() {
        for j in (i + 1)..lambda.len() {
            cross += (lambda[i] * lambda[j]).re;
        }
    }
    let kb = state.constants.kb;
    Ok(3.0 * kb * kb * tr * tr - 4.0 * kb * kb * cross)
}

/// `⟨(Q − ⟨Q⟩)²⟩ = ½ k_B² Tr 𝒯²`.
pub fn quantum_potential_central_variance(state: &GaussianState, spec: &HamiltonianSpec) -> Result<f64> {
    let (tm, _) = temperature(state, spec)?;
    let kb = state.constants.kb;
    Ok(0.5 * kb * kb * (&tm * &tm).trace())
}

/// `𝕌_(p|q) = H(q, ⟨p⟩_(p|q), t) + ½ k_B𝕋`.
pub fn conditional_internal_energy(
    state: &GaussianState,
    spec: &HamiltonianSpec,
    q: &DVector<f64>,
) -> Result<f64> {
    let p = state.phase_gradient(q)?;
    let gen = generator_at(spec, state.t)?;
    let (_, temp) = temperature(state, spec)?;
    Ok(hamiltonian_value(&gen, &linalg::concat(q, &p))? + 0.5 * state.constants.kb * temp)
}

/// `𝕌_(q,p) = H(⟨z⟩) + 𝕌_kin + (ħ/4) Tr(a s²) − (ħ/4) Tr(2 b g s² − c g s² g)`.
pub fn phase_space_internal_energy(state: &GaussianState, spec: &HamiltonianSpec) -> Result<f64> {
    let (a, b, c) = spec.blocks_at(state.t)?;
    let gen = generator_at(spec, state.t)?;
    let s2 = &state.s2;
    let g = &state.g;
    let k = 0.25 * state.hbar();
    let h_mean = hamiltonian_value(&gen, &state.mean_z())?;
    let u_kin = mean_quantum_potential(state, spec)?;
    let cross = (&b * g * s2 * 2.0 - &c * g * s2 * g).trace();
    Ok(h_mean + u_kin + k * (a * s2).trace() - k * cross)
}

/// `2𝕌_kin + ⟨(q − ⟨q⟩)ᵀ∇Q⟩`, evaluated in closed form.
pub fn virial_residual(state: &GaussianState, spec: &HamiltonianSpec) -> Result<f64> {
    let u_kin = mean_quantum_potential(state, spec)?;
    let k = potential_kernel(state, spec)?;
    let sigma_qq = &state.s2 * (0.5 * state.hbar());
    Ok(2.0 * u_kin - (k * sigma_qq).trace())
}

/// Maslov index `(α_end − α_start)/π` for an unwrapped rotation phase.
pub fn maslov_index(alpha_start: f64, alpha_end: f64) -> f64 {
    (alpha_end - alpha_start) / PI
}

/// Conditional momentum density written with the kernel `𝒯⁻¹c / k_B`.
///
/// Returns `None` when `c` is singular or the kernel is not symmetric within tolerance.
pub fn maxwellian_conditional_density(
    state: &GaussianState,
    spec: &HamiltonianSpec,
    q: &DVector<f64>,
    p: &DVector<f64>,
) -> Result<Option<f64>> {
    let c = spec.c_at(state.t)?;
    let (tm, _) = temperature(state, spec)?;
    let kb = state.constants.kb;
    let Some(tm_inv) = tm.try_inverse() else {
        return Ok(None);
    };
    let kernel = tm_inv * c / kb;
    let asym = linalg::asymmetry(&kernel);
    if !asym.is_finite() || asym > state.constants.tol * (1.0 + linalg::max_abs(&kernel)) {
        return Ok(None);
    }
    let kernel = linalg::symmetrize(&kernel);
    let u = p - state.phase_gradient(q)?;
    let norm = (kernel.determinant() / (2.0 * PI).powi(state.n as i32)).sqrt();
    Ok(Some(norm * (-0.5 * u.dot(&(kernel * &u))).exp()))
}

/// All scalar thermodynamic observables at one instant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThermoReport {
    pub t: f64,
    pub joint_entropy: f64,
    pub marginal_entropy: f64,
    pub conditional_entropy: f64,
    pub entropy_production_q: f64,
    pub temperature_scalar: f64,
    pub pressure_scalar_at_mean: f64,
    pub mean_quantum_potential: f64,
    pub quantum_potential_variance: f64,
    pub quantum_potential_central_variance: f64,
    pub u_kinetic: f64,
    pub u_conditional_at_mean: f64,
    pub u_phase_space: f64,
    pub virial_residual: f64,
}

impl ThermoReport {
    pub const COLUMNS: [&'static str; 14] = [
        "t",
        "joint_entropy",
        "marginal_entropy",
        "conditional_entropy",
        "entropy_production_q",
        "temperature_scalar",
        "pressure_scalar_at_mean",
        "mean_quantum_potential",
        "quantum_potential_variance",
        "quantum_potential_central_variance",
        "u_kinetic",
        "u_conditional_at_mean",
        "u_phase_space",
        "virial_residual",
    ];

    pub fn values(&self) -> [f64; 14] {
        [
            self.t,
            self.joint_entropy,
            self.marginal_entropy,
            self.conditional_entropy,
            self.entropy_production_q,
            self.temperature_scalar,
            self.pressure_scalar_at_mean,
            self.mean_quantum_potential,
            self.quantum_potential_variance,
            self.quantum_potential_central_variance,
            self.u_kinetic,
            self.u_conditional_at_mean,
            self.u_phase_space,
            self.virial_residual,
        ]
    }

    /// Check entropy additivity, `⟨Q⟩ = 𝕌_kin = k_B𝕋/2` and the virial relation.
    pub fn check(&self, kb: f64, tol: f64) -> Result<()> {
        let scale = |x: f64| tol * x.abs().max(1.0);
        let additivity = (self.marginal_entropy + self.conditional_entropy - self.joint_entropy).abs();
        if additivity > scale(self.joint_entropy) {
            return Err(Error::Validation(format!(
                "entropy additivity violated by {additivity:.3e}"
            )));
        }
        let kin = (self.mean_quantum_potential - 0.5 * kb * self.temperature_scalar).abs();
        if kin > scale(self.u_kinetic) || self.u_kinetic != self.mean_quantum_potential {
            return Err(Error::Validation(format!(
                "mean quantum potential differs from k_B T / 2 by {kin:.3e}"
            )));
        }
        if self.virial_residual.abs() > scale(self.u_kinetic) {
            return Err(Error::Validation(format!(
                "virial residual {:.3e}",
                self.virial_residual
            )));
        }
        Ok(())
    }
}

pub fn thermo_report(state: &GaussianState, spec: &HamiltonianSpec) -> Result<ThermoReport> {
    let (_, temp) = temperature(state, spec)?;
    let u_kin = mean_quantum_potential(state, spec)?;
    let report = ThermoReport {
        t: state.t,
        joint_entropy: joint_entropy(state)?,
        marginal_entropy: marginal_entropy(state)?,
        conditional_entropy: conditional_entropy(state)?,
        entropy_production_q: entropy_production(state, spec)?,
        temperature_scalar: temp,
        pressure_scalar_at_mean: pressure(state, spec, &state.mean_q)?.1,
        mean_quantum_potential: u_kin,
        quantum_potential_variance: quantum_potential_variance(state, spec)?,
        quantum_potential_central_variance: quantum_potential_central_variance(state, spec)?,
        u_kinetic: u_kin,
        u_conditional_at_mean: conditional_internal_energy(state, spec, &state.mean_q)?,
        u_phase_space: phase_space_internal_energy(state, spec)?,
        virial_residual: virial_residual(state, spec)?,
    };
    report.check(state.constants.kb, state.constants.tol)?;
    Ok(report)
}

/// `ρ_q(q)·ρ_(p|q)(p)`, the factorized joint density.
pub fn factorized_joint_density(state: &GaussianState, q: &DVector<f64>, p: &DVector<f64>) -> Result<f64> {
    Ok(marginal_distribution(state)?.density(q)? * conditional_distribution(state, q)?.density(p)?)
}
