//! Joint, marginal and conditional Gaussian distributions of a squeezed coherent state,
//! their drift/diffusion coefficients, Fokker–Planck residuals and probability fluxes.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::hamiltonian::HamiltonianSpec;
use crate::linalg;
use crate::state::{covariance, flow_state, state_rates, GaussianState};
use crate::symplectic::Stepper;

/// `N(x | mean, cov)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianDistribution {
    pub dim: usize,
    pub mean: DVector<f64>,
    pub cov: DMatrix<f64>,
    precision: DMatrix<f64>,
    log_norm: f64,
}

impl GaussianDistribution {
    pub fn new(mean: DVector<f64>, cov: DMatrix<f64>) -> Result<Self> {
        let dim = mean.len();
        if cov.nrows() != dim || cov.ncols() != dim {
            return Err(Error::Shape {
                expected: dim,
                got: cov.nrows(),
            });
        }
        let cov = linalg::symmetrize(&cov);
        let chol = cov
            .clone()
            .cholesky()
            .ok_or(Error::NotPositiveDefinite("covariance"))?;
        let log_det: f64 = chol.l_dirty().diagonal().iter().map(|x| 2.0 * x.ln()).sum();
        let precision = linalg::symmetrize(&chol.inverse());
        Ok(Self {
            dim,
            mean,
            cov,
            precision,
            log_norm: -0.5 * (dim as f64 * (2.0 * PI).ln() + log_det),
        })
    }

    pub fn precision(&self) -> &DMatrix<f64> {
        &self.precision
    }

    pub fn log_density(&self, x: &DVector<f64>) -> Result<f64> {
        if x.len() != self.dim {
            return Err(Error::Shape {
                expected: self.dim,
                got: x.len(),
            });
        }
        let d = x - &self.mean;
        Ok(self.log_norm - 0.5 * d.dot(&(&self.precision * &d)))
    }

    pub fn density(&self, x: &DVector<f64>) -> Result<f64> {
        Ok(self.log_density(x)?.exp())
    }

    /// `∇ρ = −ρ M⁻¹ (x − μ)`.
    pub fn gradient(&self, x: &DVector<f64>) -> Result<DVector<f64>> {
        let rho = self.density(x)?;
        Ok(-(&self.precision * (x - &self.mean)) * rho)
    }

    /// `∇∇ᵀρ = ρ (M⁻¹ddᵀM⁻¹ − M⁻¹)`, `d = x − μ`.
    pub fn hessian(&self, x: &DVector<f64>) -> Result<DMatrix<f64>> {
        let rho = self.density(x)?;
        let v = &self.precision * (x - &self.mean);
        Ok((&v * v.transpose() - &self.precision) * rho)
    }

    /// Differential entropy `½ ln det(2πe M)` in nats.
    pub fn entropy(&self) -> f64 {
        0.5 * self.dim as f64 - self.log_norm
    }
}

/// Drift `β` and diffusion `𝒟 = ½ dM/dt` of a moving Gaussian.
#[derive(Debug, Clone, PartialEq)]
pub struct DriftDiffusion {
    pub drift: DVector<f64>,
    pub diffusion: DMatrix<f64>,
}

/// Which of the three distributions of a state. The conditional one is over momenta at
/// the fixed position carried here.
#[derive(Debug, Clone, PartialEq)]
pub enum DistributionKind {
    Joint,
    Marginal,
    Conditional(DVector<f64>),
}

/// `ρ_(q,p) = N(⟨z⟩, Σ)`.
pub fn joint_distribution(state: &GaussianState) -> Result<GaussianDistribution> {
    GaussianDistribution::new(state.mean_z(), covariance(state)?.full())
}

/// `ρ_q = N(⟨q⟩, (ħ/2) s²)`.
pub fn marginal_distribution(state: &GaussianState) -> Result<GaussianDistribution> {
    GaussianDistribution::new(state.mean_q.clone(), &state.s2 * (0.5 * state.hbar()))
}

/// `ρ_(p|q) = N(⟨p⟩ − g(q − ⟨q⟩), (ħ/2) s⁻²)`.
pub fn conditional_distribution(
    state: &GaussianState,
    q: &DVector<f64>,
) -> Result<GaussianDistribution> {
    let mean = state.phase_gradient(q)?;
    GaussianDistribution::new(mean, state.s_inv2()? * (0.5 * state.hbar()))
}

pub fn distribution(state: &GaussianState, which: &DistributionKind) -> Result<GaussianDistribution> {
    match which {
        DistributionKind::Joint => joint_distribution(state),
        DistributionKind::Marginal => marginal_distribution(state),
        DistributionKind::Conditional(q) => conditional_distribution(state, q),
    }
}

/// Closed-form drift and diffusion. For the conditional distribution the drift is the
/// rate of change of the conditional mean momentum at fixed position.
pub fn drift_diffusion(
    state: &GaussianState,
    spec: &HamiltonianSpec,
    which: &DistributionKind,
) -> Result<DriftDiffusion> {
    let k = 0.5 * state.hbar();
    let r = state_rates(state, spec)?;
    Ok(match which {
        DistributionKind::Joint => {
            let gen = crate::hamiltonian::generator_at(spec, state.t)?;
            let sigma = covariance(state)?.full();
            let l = &gen.matrix;
            DriftDiffusion {
                drift: l * state.mean_z(),
                diffusion: linalg::symmetrize(&(l * &sigma + &sigma * l.transpose())) * 0.5,
            }
        }
        DistributionKind::Marginal => DriftDiffusion {
            drift: r.mean_q,
            diffusion: r.s2 * (0.5 * k),
        },
        DistributionKind::Conditional(q) => {
            if q.len() != state.n {
                return Err(Error::Shape {
                    expected: state.n,
                    got: q.len(),
                });
            }
            let d = q - &state.mean_q;
            DriftDiffusion {
                drift: &r.mean_p - &r.g * d + &state.g * &r.mean_q,
                diffusion: r.s_inv2 * (0.5 * k),
            }
        }
    })
}

/// Right-hand side `−∇·(βρ) + ∇∇ᵀ:(𝒟ρ)` of the Fokker–Planck equation with constant
/// coefficients.
pub fn fokker_planck_rhs(
    dist: &GaussianDistribution,
    coeffs: &DriftDiffusion,
    x: &DVector<f64>,
) -> Result<f64> {
    let rho = dist.density(x)?;
    let v = dist.precision() * (x - &dist.mean);
    let quad = v.dot(&(&coeffs.diffusion * &v));
    let tr = (&coeffs.diffusion * dist.precision()).trace();
    Ok(rho * (coeffs.drift.dot(&v) + quad - tr))
}

/// Options for the finite-difference time derivative in [`fokker_planck_residual_with`].
#[derive(Debug, Clone, Copy)]
pub struct ResidualOptions {
    pub h: f64,
    pub substeps: usize,
    pub stepper: Stepper,
}

impl Default for ResidualOptions {
    fn default() -> Self {
        Self {
            h: 1e-3,
            substeps: 1,
            stepper: Stepper::Magnus4,
        }
    }
}

/// `max |∂ρ/∂t − RHS|` over the samples, `∂ρ/∂t` by central differences over states
/// evolved by ±h.
pub fn fokker_planck_residual(
    state: &GaussianState,
    spec: &HamiltonianSpec,
    which: &DistributionKind,
    samples: &[DVector<f64>],
) -> Result<f64> {
    fokker_planck_residual_with(state, spec, which, samples, ResidualOptions::default())
}

pub fn fokker_planck_residual_with(
    state: &GaussianState,
    spec: &HamiltonianSpec,
    which: &DistributionKind,
    samples: &[DVector<f64>],
    opts: ResidualOptions,
) -> Result<f64> {
    if !(opts.h > 0.0) || opts.substeps == 0 {
        return Err(Error::InvalidArgument("h must be > 0 and substeps >= 1".into()));
    }
    let fwd = flow_state(spec, state, opts.h, opts.substeps, opts.stepper)?;
    let bwd = flow_state(spec, state, -opts.h, opts.substeps, opts.stepper)?;
    let d0 = distribution(state, which)?;
    let dp = distribution(&fwd, which)?;
    let dm = distribution(&bwd, which)?;
    let coeffs = drift_diffusion(state, spec, which)?;
    let mut worst = 0.0_f64;
    for x in samples {
        let dt = (dp.density(x)? - dm.density(x)?) / (2.0 * opts.h);
        let rhs = fokker_planck_rhs(&d0, &coeffs, x)?;
        worst = worst.max((dt - rhs).abs());
    }
    Ok(worst)
}

/// Tensor grid over mean ± 3 standard deviations per coordinate, `per_axis` points each.
pub fn sample_grid(dist: &GaussianDistribution, per_axis: usize) -> Vec<DVector<f64>> {
    let dim = dist.dim;
    let axes: Vec<Vec<f64>> = (0..dim)
        .map(|i| {
            let sd = dist.cov[(i, i)].sqrt();
            let mu = dist.mean[i];
            (0..per_axis)
                .map(|k| {
                    let u = if per_axis == 1 {
                        0.0
                    } else {
                        -3.0 + 6.0 * k as f64 / (per_axis - 1) as f64
                    };
                    mu + u * sd
                })
                .collect()
        })
        .collect();
    let total = per_axis.pow(dim as u32);
    (0..total)
        .map(|idx| {
            let mut rest = idx;
            DVector::from_iterator(
                dim,
                axes.iter().map(|ax| {
                    let v = ax[rest % per_axis];
                    rest /= per_axis;
                    v
                }),
            )
        })
        .collect()
}

/// The standard residual grid: 21 points per axis over ± 3 standard deviations.
pub fn standard_sample_grid(state: &GaussianState, which: &DistributionKind) -> Result<Vec<DVector<f64>>> {
    Ok(sample_grid(&distribution(state, which)?, 21))
}

/// Marginal probability flux `j = [bᵀ⟨q⟩ + c⟨p⟩ + ½ (ds²/dt) s⁻² (q − ⟨q⟩)] ρ_q(q)`.
pub fn marginal_flux(
    state: &GaussianState,
    spec: &HamiltonianSpec,
    q: &DVector<f64>,
) -> Result<DVector<f64>> {
    let rho = marginal_distribution(state)?.density(q)?;
    let r = state_rates(state, spec)?;
    let d = q - &state.mean_q;
    let si2 = state.s_inv2()?;
    Ok((r.mean_q + (r.s2 * si2 * d) * 0.5) * rho)
}

/// Divergence of the marginal flux, in closed form.
pub fn marginal_flux_divergence(
    state: &GaussianState,
    spec: &HamiltonianSpec,
    q: &DVector<f64>,
) -> Result<f64> {
    let dist = marginal_distribution(state)?;
    let rho = dist.density(q)?;
    let grad = dist.gradient(q)?;
    let r = state_rates(state, spec)?;
    let si2 = state.s_inv2()?;
    let k = &r.s2 * &si2 * 0.5;
    let v = &r.mean_q + &k * (q - &state.mean_q);
    Ok(v.dot(&grad) + rho * k.trace())
}

/// Irrotational `ρ_q c ⟨p⟩_(p|q)` and rotational `ρ_q bᵀq` parts of the marginal flux.
/// Defined only when `bᵀs²` and `cgs²` are symmetric.
pub fn flux_split(
    state: &GaussianState,
    spec: &HamiltonianSpec,
    q: &DVector<f64>,
) -> Result<(DVector<f64>, DVector<f64>)> {
    let (_, b, c) = spec.blocks_at(state.t)?;
    let tol = state.constants.tol;
    let bs2 = b.transpose() * &state.s2;
    let cgs2 = &c * &state.g * &state.s2;
    let r1 = linalg::asymmetry(&bs2);
    if r1 > tol * (1.0 + linalg::max_abs(&bs2)) {
        return Err(Error::SplitUndefined("bᵀs²", r1));
    }
    let r2 = linalg::asymmetry(&cgs2);
    if r2 > tol * (1.0 + linalg::max_abs(&cgs2)) {
        return Err(Error::SplitUndefined("cgs²", r2));
    }
    let rho = marginal_distribution(state)?.density(q)?;
    let irrot = &c * state.phase_gradient(q)? * rho;
    let rot = b.transpose() * q * rho;
    Ok((irrot, rot))
}
