//! Strang-split spectral solver for `iħ ∂ψ/∂t = [½ a(t) x² + ½ c(t) p²] ψ` on a periodic grid.

use std::f64::consts::PI;

use nalgebra::DVector;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::hamiltonian::HamiltonianSpec;
use crate::iwasawa::Complex64;
use crate::state::{psi_at, GaussianState, Trajectory};
use crate::symplectic::Stepper;

/// Largest probability allowed in the boundary cells.
pub const BOUNDARY_MASS_LIMIT: f64 = 1e-12;
/// Fraction of the grid (per side) treated as boundary.
pub const BOUNDARY_FRACTION: f64 = 0.02;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub x_min: f64,
    pub x_max: f64,
    pub points: usize,
}

impl GridSpec {
    pub fn new(x_min: f64, x_max: f64, points: usize) -> Result<Self> {
        if !(x_max > x_min) || !x_min.is_finite() || !x_max.is_finite() {
            return Err(Error::InvalidArgument(format!("bad grid interval [{x_min}, {x_max}]")));
        }
        if points < 2 || !points.is_power_of_two() {
            return Err(Error::InvalidArgument(format!(
                "grid points must be a power of two >= 2, got {points}"
            )));
        }
        Ok(Self { x_min, x_max, points })
    }

    pub fn dx(&self) -> f64 {
        (self.x_max - self.x_min) / self.points as f64
    }

    pub fn x(&self, j: usize) -> f64 {
        self.x_min + j as f64 * self.dx()
    }

    /// Angular wavenumbers in FFT order.
    pub fn wavenumbers(&self) -> Vec<f64> {
        let n = self.points;
        let dk = 2.0 * PI / (self.x_max - self.x_min);
        (0..n)
            .map(|j| if j < n / 2 { j as f64 } else { j as f64 - n as f64 } * dk)
            .collect()
    }
}

/// A sampled one-dimensional wave function.
#[derive(Debug, Clone, PartialEq)]
pub struct GridWavefunction {
    pub x_min: f64,
    pub x_max: f64,
    pub points: usize,
    pub values: Vec<Complex64>,
    pub t: f64,
    pub hbar: f64,
}

impl GridWavefunction {
    pub fn grid(&self) -> GridSpec {
        GridSpec {
            x_min: self.x_min,
            x_max: self.x_max,
            points: self.points,
        }
    }

    /// Sample the analytic wave function of a one-dimensional state.
    pub fn from_state(state: &GaussianState, grid: GridSpec) -> Result<Self> {
        if state.n != 1 {
            return Err(Error::UnsupportedCoupling);
        }
        let values = (0..grid.points)
            .map(|j| psi_at(state, &DVector::from_element(1, grid.x(j))))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            x_min: grid.x_min,
            x_max: grid.x_max,
            points: grid.points,
            values,
            t: state.t,
            hbar: state.hbar(),
        })
    }

    pub fn norm(&self) -> f64 {
        let dx = self.grid().dx();
        (self.values.iter().map(|z| z.norm_sqr()).sum::<f64>() * dx).sqrt()
    }

    /// Probability in the outer [`BOUNDARY_FRACTION`] of cells on each side.
    pub fn boundary_mass(&self) -> f64 {
        let dx = self.grid().dx();
        let edge = ((self.points as f64 * BOUNDARY_FRACTION).ceil() as usize).max(1);
        let left: f64 = self.values[..edge].iter().map(|z| z.norm_sqr()).sum();
        let right: f64 = self.values[self.points - edge..].iter().map(|z| z.norm_sqr()).sum();
        (left + right) * dx
    }

    /// Mean and variance of `|ψ|²`.
    pub fn position_moments(&self) -> (f64, f64) {
        let g = self.grid();
        let dx = g.dx();
        let mass: f64 = self.values.iter().map(|z| z.norm_sqr()).sum::<f64>() * dx;
        let mean = (0..self.points)
            .map(|j| g.x(j) * self.values[j].norm_sqr())
            .sum::<f64>()
            * dx
            / mass;
        let var = (0..self.points)
            .map(|j| (g.x(j) - mean).powi(2) * self.values[j].norm_sqr())
            .sum::<f64>()
            * dx
            / mass;
        (mean, var)
    }

    /// `|⟨self|other⟩|` on the shared grid.
    pub fn overlap(&self, other: &GridWavefunction) -> f64 {
        let dx = self.grid().dx();
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a.conj() * b)
            .sum::<Complex64>()
            .norm()
            * dx
    }

    fn check_boundary(&self) -> Result<()> {
        let mass = self.boundary_mass();
        if mass > BOUNDARY_MASS_LIMIT {
            return Err(Error::GridTooSmall {
                mass,
                limit: BOUNDARY_MASS_LIMIT,
            });
        }
        Ok(())
    }
}

/// Default grid: 4096 points over the range of ⟨q⟩ along the trajectory from the state's
/// time to `t1`, padded by 12 of the widest marginal standard deviations.
pub fn default_grid(spec: &HamiltonianSpec, state: &GaussianState, t1: f64) -> Result<GridSpec> {
    const SAMPLES: usize = 256;
    if state.n != 1 {
        return Err(Error::UnsupportedCoupling);
    }
    let sd = |s: &GaussianState| (0.5 * state.hbar() * s.s2[(0, 0)]).sqrt();
    let mut lo = state.mean_q[0];
    let mut hi = lo;
    let mut widest = sd(state);
    if t1 != state.t {
        for point in Trajectory::new(spec, state, t1, SAMPLES, Stepper::Magnus4)? {
            let s = point?.state;
            lo = lo.min(s.mean_q[0]);
            hi = hi.max(s.mean_q[0]);
            widest = widest.max(sd(&s));
        }
    }
    GridSpec::new(lo - 12.0 * widest, hi + 12.0 * widest, 4096)
}

/// Evolve `psi0` to `t1` with `steps` Strang steps (half potential, full kinetic, half
/// potential), sampling `a` and `c` at each step's midpoint.
pub fn splitstep_evolve(
    spec: &HamiltonianSpec,
    psi0: &GridWavefunction,
    t1: f64,
    steps: usize,
) -> Result<GridWavefunction> {
    if spec.n() != 1 || !spec.b_is_zero() {
        return Err(Error::UnsupportedCoupling);
    }
    psi0.check_boundary()?;
    if t1 == psi0.t {
        return Ok(psi0.clone());
    }
    if steps == 0 {
        return Err(Error::InvalidArgument("steps must be >= 1".into()));
    }
    let grid = psi0.grid();
    let n = grid.points;
    let hbar = psi0.hbar;
    let dt = (t1 - psi0.t) / steps as f64;
    let xs: Vec<f64> = (0..n).map(|j| grid.x(j)).collect();
    let ks = grid.wavenumbers();
    let mut planner = FftPlanner::<f64>::new();
    let forward = planner.plan_fft_forward(n);
    let inverse = planner.plan_fft_inverse(n);
    let inv_n = 1.0 / n as f64;
    let mut psi = psi0.values.clone();
    for k in 0..steps {
        let tm = psi0.t + (k as f64 + 0.5) * dt;
        let a = spec.a_at(tm)?[(0, 0)];
        let c = spec.c_at(tm)?[(0, 0)];
        let half_potential = |psi: &mut [Complex64]| {
            for (z, x) in psi.iter_mut().zip(&xs) {
                *z *= Complex64::from_polar(1.0, -a * x * x * dt / (4.0 * hbar));
            }
        };
        half_potential(&mut psi);
        forward.process(&mut psi);
        for (z, kk) in psi.iter_mut().zip(&ks) {
            *z *= Complex64::from_polar(inv_n, -c * hbar * kk * kk * dt / 2.0);
        }
        inverse.process(&mut psi);
        half_potential(&mut psi);
        if psi.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Divergence {
                step: k,
                t: tm + 0.5 * dt,
            });
        }
    }
    let out = GridWavefunction {
        values: psi,
        t: t1,
        ..psi0.clone()
    };
    out.check_boundary()?;
    Ok(out)
}

/// Discrete L² distance between `grid_psi` and the analytic wave function of `state`,
/// after aligning the global phase at the grid point nearest ⟨q⟩.
pub fn compare_to_analytic(grid_psi: &GridWavefunction, state: &GaussianState) -> Result<f64> {
    if state.n != 1 {
        return Err(Error::UnsupportedCoupling);
    }
    if (grid_psi.t - state.t).abs() > 1e-9 * state.t.abs().max(1.0) {
        return Err(Error::InvalidArgument(format!(
            "time mismatch: grid at {}, state at {}",
            grid_psi.t, state.t
        )));
    }
    let grid = grid_psi.grid();
    let analytic = GridWavefunction::from_state(state, grid)?;
    let peak = ((state.mean_q[0] - grid.x_min) / grid.dx()).round();
    let j = (peak.max(0.0) as usize).min(grid.points - 1);
    let rot = if grid_psi.values[j].norm() > 0.0 && analytic.values[j].norm() > 0.0 {
        Complex64::from_polar(1.0, analytic.values[j].arg() - grid_psi.values[j].arg())
    } else {
        Complex64::new(1.0, 0.0)
    };
    let sum: f64 = grid_psi
        .values
        .iter()
        .zip(&analytic.values)
        .map(|(g, a)| (g * rot - a).norm_sqr())
        .sum();
    Ok((sum * grid.dx()).sqrt())
}
