//! Symplectic propagators `S(t)` solving `dS/dt = L_H(t) S` by Magnus-type exponential steps.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hamiltonian::{generator_at, HamiltonianSpec};
use crate::linalg;

/// A 2n×2n real matrix viewed in `[[A, B], [C, D]]` block form.
#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticMatrix {
    pub n: usize,
    pub matrix: DMatrix<f64>,
}

impl SymplecticMatrix {
    pub fn identity(n: usize) -> Self {
        Self {
            n,
            matrix: DMatrix::identity(2 * n, 2 * n),
        }
    }

    /// Wrap a square matrix of even size. Symplecticity is not enforced here;
    /// use [`symplecticity_defect`] to measure it.
    pub fn from_matrix(matrix: DMatrix<f64>) -> Result<Self> {
        let dim = matrix.nrows();
        if dim != matrix.ncols() || dim % 2 != 0 || dim == 0 {
            return Err(Error::InvalidArgument(format!(
                "symplectic matrix must be 2n x 2n, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        Ok(Self { n: dim / 2, matrix })
    }

    pub fn from_blocks(
        a: &DMatrix<f64>,
        b: &DMatrix<f64>,
        c: &DMatrix<f64>,
        d: &DMatrix<f64>,
    ) -> Result<Self> {
        Self::from_matrix(linalg::from_blocks(a, b, c, d))
    }

    pub fn a(&self) -> DMatrix<f64> {
        self.matrix.view((0, 0), (self.n, self.n)).into_owned()
    }

    pub fn b(&self) -> DMatrix<f64> {
        self.matrix.view((0, self.n), (self.n, self.n)).into_owned()
    }

    pub fn c(&self) -> DMatrix<f64> {
        self.matrix.view((self.n, 0), (self.n, self.n)).into_owned()
    }

    pub fn d(&self) -> DMatrix<f64> {
        self.matrix.view((self.n, self.n), (self.n, self.n)).into_owned()
    }

    pub fn determinant(&self) -> f64 {
        self.matrix.determinant()
    }

    pub fn compose(&self, rhs: &SymplecticMatrix) -> SymplecticMatrix {
        SymplecticMatrix {
            n: self.n,
            matrix: &self.matrix * &rhs.matrix,
        }
    }

    /// Exact inverse `-ω Sᵀ ω` (valid for symplectic input).
    pub fn symplectic_inverse(&self) -> SymplecticMatrix {
        let w = linalg::omega(self.n);
        SymplecticMatrix {
            n: self.n,
            matrix: -(&w * self.matrix.transpose() * &w),
        }
    }

    /// Largest violation of the block conditions: AᵀC, BᵀD, ABᵀ, CDᵀ symmetric and AᵀD − CᵀB = I.
    pub fn block_defect(&self) -> f64 {
        let (a, b, c, d) = (self.a(), self.b(), self.c(), self.d());
        let id = DMatrix::<f64>::identity(self.n, self.n);
        [
            linalg::asymmetry(&(a.transpose() * &c)),
            linalg::asymmetry(&(b.transpose() * &d)),
            linalg::asymmetry(&(&a * b.transpose())),
            linalg::asymmetry(&(&c * d.transpose())),
            linalg::max_abs(&(a.transpose() * &d - c.transpose() * &b - id)),
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

/// Max-norm of `SᵀωS − ω`.
pub fn symplecticity_defect(s: &SymplecticMatrix) -> f64 {
    let w = linalg::omega(s.n);
    linalg::max_abs(&(s.matrix.transpose() * &w * &s.matrix - w))
}

/// One-step exponential integrators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Stepper {
    /// `exp(h L(t + h/2))`, second order.
    #[default]
    Midpoint,
    /// Two-point Gauss–Legendre Magnus expansion, fourth order.
    Magnus4,
}

const GAUSS_OFFSET: f64 = 0.288_675_134_594_812_9; // √3/6

/// Propagator over a single step `[t, t + h]`; `h` may be negative.
pub fn step_matrix(spec: &HamiltonianSpec, t: f64, h: f64, stepper: Stepper) -> Result<DMatrix<f64>> {
    let omega = match stepper {
        Stepper::Midpoint => generator_at(spec, t + 0.5 * h)?.matrix * h,
        Stepper::Magnus4 => {
            let a1 = generator_at(spec, t + (0.5 - GAUSS_OFFSET) * h)?.matrix;
            let a2 = generator_at(spec, t + (0.5 + GAUSS_OFFSET) * h)?.matrix;
            let comm = &a2 * &a1 - &a1 * &a2;
            (&a1 + &a2) * (0.5 * h) + comm * (3f64.sqrt() / 12.0 * h * h)
        }
    };
    linalg::expm(&omega)
}

/// `S(t1)` with `S(t0) = I`, using the default midpoint stepper.
pub fn propagate(spec: &HamiltonianSpec, t0: f64, t1: f64, steps: usize) -> Result<SymplecticMatrix> {
    propagate_with(spec, t0, t1, steps, Stepper::Midpoint)
}

pub fn propagate_with(
    spec: &HamiltonianSpec,
    t0: f64,
    t1: f64,
    steps: usize,
    stepper: Stepper,
) -> Result<SymplecticMatrix> {
    if steps == 0 {
        return Err(Error::InvalidArgument("steps must be >= 1".into()));
    }
    if !(t1 >= t0) {
        return Err(Error::InvalidArgument(format!(
            "propagation requires t1 >= t0 (t0 = {t0}, t1 = {t1})"
        )));
    }
    flow(spec, t0, t1, steps, stepper)
}

/// Like [`propagate_with`] but allows `t1 < t0` (backward flow).
pub fn flow(
    spec: &HamiltonianSpec,
    t0: f64,
    t1: f64,
    steps: usize,
    stepper: Stepper,
) -> Result<SymplecticMatrix> {
    let n = spec.n();
    let mut s = DMatrix::identity(2 * n, 2 * n);
    if t1 == t0 {
        return Ok(SymplecticMatrix { n, matrix: s });
    }
    let h = (t1 - t0) / steps as f64;
    for k in 0..steps {
        let t = t0 + k as f64 * h;
        let e = step_matrix(spec, t, h, stepper).map_err(|e| match e {
            Error::InvalidArgument(_) => Error::Divergence { step: k, t },
            other => other,
        })?;
        s = e * s;
        if !linalg::all_finite(&s) {
            return Err(Error::Divergence { step: k, t });
        }
    }
    Ok(SymplecticMatrix { n, matrix: s })
}
