//! Squeezed coherent states: exact evolution under quadratic Hamiltonians and pointwise
//! evaluation of the wave function and Wigner function.

use std::f64::consts::{FRAC_PI_2, PI};

use nalgebra::{Complex, DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::constants::Constants;
use crate::error::{Error, Result};
use crate::hamiltonian::{generator_at, HamiltonianSpec};
use crate::iwasawa::{iwasawa, wrap_to_pi, Complex64, IwasawaFactors};
use crate::linalg;
use crate::symplectic::{step_matrix, Stepper, SymplecticMatrix};

/// Snapshot of a squeezed coherent state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussianState {
    pub t: f64,
    pub n: usize,
    pub mean_q: DVector<f64>,
    pub mean_p: DVector<f64>,
    /// Squared magnification `s²`.
    pub s2: DMatrix<f64>,
    /// Shear `g`.
    pub g: DMatrix<f64>,
    /// Unwrapped rotation phase.
    pub alpha: f64,
    /// Action phase accumulated along the mean trajectory.
    pub gamma: f64,
    pub constants: Constants,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WignerMatrix {
    pub n: usize,
    pub matrix: DMatrix<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceMatrix {
    pub n: usize,
    pub sigma_qq: DMatrix<f64>,
    pub sigma_qp: DMatrix<f64>,
    pub sigma_pq: DMatrix<f64>,
    pub sigma_pp: DMatrix<f64>,
}

impl CovarianceMatrix {
    pub fn full(&self) -> DMatrix<f64> {
        linalg::from_blocks(&self.sigma_qq, &self.sigma_qp, &self.sigma_pq, &self.sigma_pp)
    }

    pub fn determinant(&self) -> f64 {
        self.full().determinant()
    }
}

/// `Γ = real_part + i·imag_part`, a point of the Siegel upper half-space.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexSymmetricMatrix {
    pub n: usize,
    pub real_part: DMatrix<f64>,
    pub imag_part: DMatrix<f64>,
}

impl ComplexSymmetricMatrix {
    pub fn new(real_part: DMatrix<f64>, imag_part: DMatrix<f64>) -> Result<Self> {
        let n = real_part.nrows();
        if imag_part.nrows() != n || real_part.ncols() != n || imag_part.ncols() != n {
            return Err(Error::Shape {
                expected: n,
                got: imag_part.nrows(),
            });
        }
        if !linalg::is_positive_definite(&imag_part) {
            return Err(Error::NotPositiveDefinite("imaginary part of Γ"));
        }
        Ok(Self {
            n,
            real_part,
            imag_part,
        })
    }

    pub fn from_complex(m: &DMatrix<Complex64>) -> Result<Self> {
        Self::new(m.map(|z| z.re), m.map(|z| z.im))
    }

    pub fn to_complex(&self) -> DMatrix<Complex64> {
        DMatrix::from_fn(self.n, self.n, |i, j| {
            Complex::new(self.real_part[(i, j)], self.imag_part[(i, j)])
        })
    }

    /// Largest elementwise modulus of the difference.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        (self.to_complex() - other.to_complex())
            .iter()
            .fold(0.0, |acc, z| acc.max(z.norm()))
    }
}

fn check_len(expected: usize, got: usize) -> Result<()> {
    if expected != got {
        return Err(Error::Shape { expected, got });
    }
    Ok(())
}

impl GaussianState {
    /// Ground-state width (`s = I`, `g = 0`) displaced to the given means, at t = 0.
    pub fn initial_ground(n: usize, mean_q: &[f64], mean_p: &[f64]) -> Result<Self> {
        Self::initial_ground_with(Constants::default(), n, mean_q, mean_p)
    }

    pub fn initial_ground_with(
        constants: Constants,
        n: usize,
        mean_q: &[f64],
        mean_p: &[f64],
    ) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("n must be positive".into()));
        }
        check_len(n, mean_q.len())?;
        check_len(n, mean_p.len())?;
        constants.validate()?;
        Ok(Self {
            t: 0.0,
            n,
            mean_q: DVector::from_column_slice(mean_q),
            mean_p: DVector::from_column_slice(mean_p),
            s2: DMatrix::identity(n, n),
            g: DMatrix::zeros(n, n),
            alpha: 0.0,
            gamma: 0.0,
            constants,
        })
    }

    /// Build a state from explicit width data; `s2` must be symmetric positive definite
    /// and `g` symmetric.
    #[allow(clippy::too_many_arguments)]
    pub fn from_parts(
        constants: Constants,
        t: f64,
        mean_q: DVector<f64>,
        mean_p: DVector<f64>,
        s2: DMatrix<f64>,
        g: DMatrix<f64>,
        alpha: f64,
        gamma: f64,
    ) -> Result<Self> {
        let n = mean_q.len();
        check_len(n, mean_p.len())?;
        check_len(n, s2.nrows())?;
        check_len(n, s2.ncols())?;
        check_len(n, g.nrows())?;
        check_len(n, g.ncols())?;
        constants.validate()?;
        if linalg::asymmetry(&s2) > 1e-12 * (1.0 + linalg::max_abs(&s2)) {
            return Err(Error::Validation("s2: not symmetric".into()));
        }
        if linalg::asymmetry(&g) > 1e-12 * (1.0 + linalg::max_abs(&g)) {
            return Err(Error::Validation("g: not symmetric".into()));
        }
        if !linalg::is_positive_definite(&s2) {
            return Err(Error::NotPositiveDefinite("s2"));
        }
        Ok(Self {
            t,
            n,
            mean_q,
            mean_p,
            s2: linalg::symmetrize(&s2),
            g: linalg::symmetrize(&g),
            alpha,
            gamma,
            constants,
        })
    }

    pub fn hbar(&self) -> f64 {
        self.constants.hbar
    }

    pub fn mean_z(&self) -> DVector<f64> {
        linalg::concat(&self.mean_q, &self.mean_p)
    }

    /// Magnification `s = (s²)^{1/2}`.
    pub fn s(&self) -> Result<DMatrix<f64>> {
        linalg::sqrt_spd(&self.s2).map_err(|_| Error::SingularState)
    }

    /// `s⁻²`.
    pub fn s_inv2(&self) -> Result<DMatrix<f64>> {
        linalg::inv_spd(&self.s2, "s2").map_err(|_| Error::SingularState)
    }

    /// A representative propagator `l(g) m(s)` that maps the ground state at the origin
    /// onto this state's widths.
    pub fn implicit_propagator(&self) -> Result<DMatrix<f64>> {
        let n = self.n;
        let id = DMatrix::<f64>::identity(n, n);
        let zero = DMatrix::<f64>::zeros(n, n);
        let s = self.s()?;
        let s_inv = linalg::inv_spd(&s, "s").map_err(|_| Error::SingularState)?;
        let l = linalg::from_blocks(&id, &zero, &(-&self.g), &id);
        let m = linalg::from_blocks(&s, &zero, &zero, &s_inv);
        Ok(l * m)
    }

    /// Conditional mean momentum `⟨p⟩ − g (q − ⟨q⟩)`, also the gradient of the phase.
    pub fn phase_gradient(&self, q: &DVector<f64>) -> Result<DVector<f64>> {
        check_len(self.n, q.len())?;
        Ok(&self.mean_p - &self.g * (q - &self.mean_q))
    }
}

pub fn wigner_matrix(state: &GaussianState) -> Result<WignerMatrix> {
    let s2 = &state.s2;
    let g = &state.g;
    let si2 = state.s_inv2()?;
    let tl = linalg::symmetrize(&(si2 + g * s2 * g));
    let tr = g * s2;
    let bl = tr.transpose();
    Ok(WignerMatrix {
        n: state.n,
        matrix: linalg::from_blocks(&tl, &tr, &bl, s2),
    })
}

pub fn covariance(state: &GaussianState) -> Result<CovarianceMatrix> {
    let k = 0.5 * state.hbar();
    let s2 = &state.s2;
    let g = &state.g;
    let si2 = state.s_inv2()?;
    let qp = -(s2 * g) * k;
    Ok(CovarianceMatrix {
        n: state.n,
        sigma_qq: s2 * k,
        sigma_pq: qp.transpose(),
        sigma_qp: qp,
        sigma_pp: linalg::symmetrize(&(si2 + g * s2 * g)) * k,
    })
}

/// `Γ = −g + i s⁻²`.
pub fn gamma_matrix(state: &GaussianState) -> Result<ComplexSymmetricMatrix> {
    ComplexSymmetricMatrix::new(-state.g.clone(), state.s_inv2()?)
}

/// Real amplitude `R(q)` of the polar decomposition.
pub fn amplitude_at(state: &GaussianState, q: &DVector<f64>) -> Result<f64> {
    check_len(state.n, q.len())?;
    let hbar = state.hbar();
    let d = q - &state.mean_q;
    let si2 = state.s_inv2()?;
    let det_s = state.s2.determinant().sqrt();
    let n = state.n as f64;
    Ok((PI * hbar).powf(-n / 4.0) / det_s.sqrt() * (-(d.dot(&(si2 * &d))) / (2.0 * hbar)).exp())
}

/// Phase function `𝒮(q)` of the polar decomposition.
pub fn phase_at(state: &GaussianState, q: &DVector<f64>) -> Result<f64> {
    check_len(state.n, q.len())?;
    let d = q - &state.mean_q;
    Ok(state.gamma - 0.5 * state.hbar() * state.alpha + state.mean_p.dot(q)
        - 0.5 * state.mean_p.dot(&state.mean_q)
        - 0.5 * d.dot(&(&state.g * &d)))
}

/// `ψ(q) = R(q) exp(i 𝒮(q)/ħ)`.
pub fn psi_at(state: &GaussianState, q: &DVector<f64>) -> Result<Complex64> {
    let r = amplitude_at(state, q)?;
    let phi = phase_at(state, q)? / state.hbar();
    Ok(Complex64::from_polar(r, phi))
}

pub fn wigner_density(state: &GaussianState, z: &DVector<f64>) -> Result<f64> {
    check_len(2 * state.n, z.len())?;
    let hbar = state.hbar();
    let w = wigner_matrix(state)?;
    let d = z - state.mean_z();
    Ok((PI * hbar).powi(-(state.n as i32)) * (-(d.dot(&(w.matrix * &d))) / hbar).exp())
}

/// Instantaneous time derivatives of a state's data under a Hamiltonian.
#[derive(Debug, Clone, PartialEq)]
pub struct StateRates {
    pub mean_q: DVector<f64>,
    pub mean_p: DVector<f64>,
    /// `d(s²)/dt = bᵀs² + s²b − s²gc − cgs²`.
    pub s2: DMatrix<f64>,
    /// `d(s⁻²)/dt = −s⁻²bᵀ − bs⁻² + s⁻²cg + gcs⁻²`.
    pub s_inv2: DMatrix<f64>,
    /// `dg/dt = a − bg − gbᵀ − s⁻²cs⁻² + gcg`.
    pub g: DMatrix<f64>,
    /// `dα/dt = Tr(c s⁻²)`.
    pub alpha: f64,
}

pub fn state_rates(state: &GaussianState, spec: &HamiltonianSpec) -> Result<StateRates> {
    check_len(spec.n(), state.n)?;
    let (a, b, c) = spec.blocks_at(state.t)?;
    let s2 = &state.s2;
    let g = &state.g;
    let si2 = state.s_inv2()?;
    let bt = b.transpose();
    let ds2 = &bt * s2 + s2 * &b - s2 * g * &c - &c * g * s2;
    let dsi2 = -(&si2 * &bt) - &b * &si2 + &si2 * &c * g + g * &c * &si2;
    let dg = &a - &b * g - g * &bt - &si2 * &c * &si2 + g * &c * g;
    Ok(StateRates {
        mean_q: &bt * &state.mean_q + &c * &state.mean_p,
        mean_p: -(&a * &state.mean_q) - &b * &state.mean_p,
        s2: linalg::symmetrize(&ds2),
        s_inv2: linalg::symmetrize(&dsi2),
        g: linalg::symmetrize(&dg),
        alpha: (&c * &si2).trace(),
    })
}

/// One point along a trajectory: the state and the flow accumulated since the start.
#[derive(Debug, Clone)]
pub struct TrajectoryPoint {
    pub state: GaussianState,
    pub flow: SymplecticMatrix,
    /// Iwasawa factors of the composed propagator `flow · l(g₀) m(s₀)`, with unwrapped alpha.
    pub factors: IwasawaFactors,
}

const MAX_HALVINGS: usize = 24;

/// Step-by-step evolution of a state on a uniform time grid. Yields one point per step.
pub struct Trajectory<'a> {
    spec: &'a HamiltonianSpec,
    state0: GaussianState,
    stepper: Stepper,
    p0: DMatrix<f64>,
    z0: DVector<f64>,
    flow: DMatrix<f64>,
    factors: Option<IwasawaFactors>,
    beta: f64,
    gamma: f64,
    t0: f64,
    h: f64,
    k: usize,
    steps: usize,
    failed: bool,
}

impl<'a> Trajectory<'a> {
    /// Evolve `state0` from its time to `t1` in `steps` equal steps. `t1` may precede the
    /// state's time (backward evolution).
    pub fn new(
        spec: &'a HamiltonianSpec,
        state0: &GaussianState,
        t1: f64,
        steps: usize,
        stepper: Stepper,
    ) -> Result<Self> {
        if steps == 0 {
            return Err(Error::InvalidArgument("steps must be >= 1".into()));
        }
        check_len(spec.n(), state0.n)?;
        if !t1.is_finite() {
            return Err(Error::InvalidArgument("t1 must be finite".into()));
        }
        let n = state0.n;
        Ok(Self {
            spec,
            stepper,
            p0: state0.implicit_propagator()?,
            z0: state0.mean_z(),
            flow: DMatrix::identity(2 * n, 2 * n),
            factors: None,
            beta: 0.0,
            gamma: 0.0,
            t0: state0.t,
            h: (t1 - state0.t) / steps as f64,
            k: 0,
            steps,
            failed: false,
            state0: state0.clone(),
        })
    }

    fn lagrangian(&self, t: f64, z: &DVector<f64>) -> Result<f64> {
        let gen = generator_at(self.spec, t)?;
        let zdot = &gen.matrix * z;
        let n = self.state0.n;
        let (q, p) = (z.rows(0, n), z.rows(n, n));
        let (qd, pd) = (zdot.rows(0, n), zdot.rows(n, n));
        let h = 0.5 * z.dot(&(gen.hessian() * z));
        Ok(0.5 * (p.dot(&qd) - q.dot(&pd)) - h)
    }

    fn advance(&mut self, t: f64, h: f64, depth: usize, step: usize) -> Result<()> {
        let e = step_matrix(self.spec, t, h, self.stepper)
            .map_err(|_| Error::Divergence { step, t })?;
        let flow_new = e * &self.flow;
        if !linalg::all_finite(&flow_new) {
            return Err(Error::Divergence { step, t });
        }
        let composed = SymplecticMatrix::from_matrix(&flow_new * &self.p0)?;
        let mut f = iwasawa(&composed).map_err(|_| Error::Divergence { step, t })?;
        let jump = wrap_to_pi(f.alpha - self.beta);
        if jump.abs() > FRAC_PI_2 && depth < MAX_HALVINGS {
            self.advance(t, 0.5 * h, depth + 1, step)?;
            return self.advance(t + 0.5 * h, 0.5 * h, depth + 1, step);
        }
        let z_old = &self.flow * &self.z0;
        let z_new = &flow_new * &self.z0;
        self.gamma += 0.5 * h * (self.lagrangian(t, &z_old)? + self.lagrangian(t + h, &z_new)?);
        self.beta += jump;
        f.alpha = self.state0.alpha + self.beta;
        self.flow = flow_new;
        self.factors = Some(f);
        Ok(())
    }

    fn current(&self, t: f64) -> Result<TrajectoryPoint> {
        let n = self.state0.n;
        let factors = self.factors.clone().expect("at least one step taken");
        let composed = &self.flow * &self.p0;
        let (a, b, _, _) = linalg::blocks(&composed);
        let s2 = linalg::symmetrize(&(&a * a.transpose() + &b * b.transpose()));
        let z = &self.flow * &self.z0;
        let (q, p) = linalg::split(&z);
        let state = GaussianState {
            t,
            n,
            mean_q: q,
            mean_p: p,
            s2,
            g: factors.g.clone(),
            alpha: factors.alpha,
            gamma: self.state0.gamma + self.gamma,
            constants: self.state0.constants,
        };
        Ok(TrajectoryPoint {
            state,
            flow: SymplecticMatrix {
                n,
                matrix: self.flow.clone(),
            },
            factors,
        })
    }
}

impl Iterator for Trajectory<'_> {
    type Item = Result<TrajectoryPoint>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.failed || self.k >= self.steps {
            return None;
        }
        let t = self.t0 + self.k as f64 * self.h;
        let step = self.k;
        self.k += 1;
        let t_next = if self.k == self.steps {
            self.t0 + self.steps as f64 * self.h
        } else {
            self.t0 + self.k as f64 * self.h
        };
        let out = self
            .advance(t, self.h, 0, step)
            .and_then(|_| self.current(t_next));
        if out.is_err() {
            self.failed = true;
        }
        Some(out)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let left = self.steps - self.k;
        (left, Some(left))
    }
}

/// Evolve to `t1 >= state0.t` using the default midpoint stepper.
pub fn evolve_state(
    spec: &HamiltonianSpec,
    state0: &GaussianState,
    t1: f64,
    steps: usize,
) -> Result<GaussianState> {
    evolve_state_with(spec, state0, t1, steps, Stepper::Midpoint)
}

pub fn evolve_state_with(
    spec: &HamiltonianSpec,
    state0: &GaussianState,
    t1: f64,
    steps: usize,
    stepper: Stepper,
) -> Result<GaussianState> {
    if !(t1 >= state0.t) {
        return Err(Error::InvalidArgument(format!(
            "evolution requires t1 >= t0 (t0 = {}, t1 = {t1})",
            state0.t
        )));
    }
    flow_state(spec, state0, t1 - state0.t, steps, stepper)
}

/// Evolve by a signed time increment `dt` in `steps` equal steps.
pub fn flow_state(
    spec: &HamiltonianSpec,
    state0: &GaussianState,
    dt: f64,
    steps: usize,
    stepper: Stepper,
) -> Result<GaussianState> {
    if steps == 0 {
        return Err(Error::InvalidArgument("steps must be >= 1".into()));
    }
    check_len(spec.n(), state0.n)?;
    if dt == 0.0 {
        return Ok(state0.clone());
    }
    let mut last = None;
    for point in Trajectory::new(spec, state0, state0.t + dt, steps, stepper)? {
        last = Some(point?.state);
    }
    Ok(last.expect("steps >= 1"))
}
