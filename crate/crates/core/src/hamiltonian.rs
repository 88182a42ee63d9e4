//! Quadratic Hamiltonians `H = ½ qᵀa q + qᵀb p + ½ pᵀc p` with time-dependent blocks,
//! and their Hamiltonian-matrix generators.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::coefficient::CoefficientFunction;
use crate::error::{Error, Result};
use crate::linalg;

/// Times at which symmetry and positivity of the blocks are sampled.
const SAMPLE_TIMES: usize = 41;
const SAMPLE_DT: f64 = 0.25;
const SYMMETRY_TOL: f64 = 1e-9;

type CoefficientMatrix = Vec<Vec<CoefficientFunction>>;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpec {
    n: usize,
    a: CoefficientMatrix,
    b: CoefficientMatrix,
    c: CoefficientMatrix,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSpec", into = "RawSpec")]
pub struct HamiltonianSpec {
    n: usize,
    a: CoefficientMatrix,
    b: CoefficientMatrix,
    c: CoefficientMatrix,
    warnings: Vec<String>,
}

impl TryFrom<RawSpec> for HamiltonianSpec {
    type Error = Error;
    fn try_from(r: RawSpec) -> Result<Self> {
        HamiltonianSpec::new(r.n, r.a, r.b, r.c)
    }
}

impl From<HamiltonianSpec> for RawSpec {
    fn from(h: HamiltonianSpec) -> Self {
        RawSpec {
            n: h.n,
            a: h.a,
            b: h.b,
            c: h.c,
        }
    }
}

fn check_shape(name: &str, n: usize, m: &CoefficientMatrix) -> Result<()> {
    if m.len() != n || m.iter().any(|row| row.len() != n) {
        return Err(Error::Validation(format!(
            "{name}: expected a {n}x{n} matrix of coefficients"
        )));
    }
    for (i, row) in m.iter().enumerate() {
        for (j, f) in row.iter().enumerate() {
            if !f.is_finite() {
                return Err(Error::Validation(format!("{name}[{i}][{j}]: non-finite parameter")));
            }
        }
    }
    Ok(())
}

fn eval_matrix(name: &'static str, m: &CoefficientMatrix, t: f64) -> Result<DMatrix<f64>> {
    let n = m.len();
    let mut out = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let v = m[i][j].eval(t);
            if !v.is_finite() {
                return Err(Error::Evaluation {
                    matrix: name,
                    row: i,
                    col: j,
                    t,
                });
            }
            out[(i, j)] = v;
        }
    }
    Ok(out)
}

fn average(f: &CoefficientFunction, g: &CoefficientFunction) -> CoefficientFunction {
    if f == g {
        return f.clone();
    }
    let mut out = CoefficientFunction::constant(0.5 * (f.constant + g.constant));
    for h in f.harmonics.iter().chain(g.harmonics.iter()) {
        out = out.with_harmonic(0.5 * h.amplitude, h.angular_frequency, h.phase);
    }
    out
}

fn symmetrize_coefficients(name: &str, m: &CoefficientMatrix) -> Result<CoefficientMatrix> {
    let n = m.len();
    let mut worst = 0.0_f64;
    for k in 0..SAMPLE_TIMES {
        let t = k as f64 * SAMPLE_DT;
        for i in 0..n {
            for j in (i + 1)..n {
                worst = worst.max((m[i][j].eval(t) - m[j][i].eval(t)).abs());
            }
        }
    }
    if worst > SYMMETRY_TOL {
        return Err(Error::Validation(format!(
            "{name}: matrix is not symmetric (max asymmetry {worst:.3e})"
        )));
    }
    let mut out = m.clone();
    for i in 0..n {
        for j in (i + 1)..n {
            let avg = average(&m[i][j], &m[j][i]);
            out[i][j] = avg.clone();
            out[j][i] = avg;
        }
    }
    Ok(out)
}

impl HamiltonianSpec {
    /// Build a validated spec. `a` and `c` must be symmetric at all sampled times and are
    /// stored symmetrized. Positivity violations only produce warnings.
    pub fn new(
        n: usize,
        a: CoefficientMatrix,
        b: CoefficientMatrix,
        c: CoefficientMatrix,
    ) -> Result<Self> {
        if n == 0 {
            return Err(Error::Validation("n: must be positive".into()));
        }
        check_shape("a", n, &a)?;
        check_shape("b", n, &b)?;
        check_shape("c", n, &c)?;
        let a = symmetrize_coefficients("a", &a)?;
        let c = symmetrize_coefficients("c", &c)?;
        let mut spec = Self {
            n,
            a,
            b,
            c,
            warnings: Vec::new(),
        };
        spec.warnings = spec.positivity_warnings()?;
        for w in &spec.warnings {
            log::warn!("{w}");
        }
        Ok(spec)
    }

    /// Constant-coefficient spec from real matrices.
    pub fn constant(a: &DMatrix<f64>, b: &DMatrix<f64>, c: &DMatrix<f64>) -> Result<Self> {
        let n = a.nrows();
        let lift = |m: &DMatrix<f64>| -> CoefficientMatrix {
            (0..m.nrows())
                .map(|i| {
                    (0..m.ncols())
                        .map(|j| CoefficientFunction::constant(m[(i, j)]))
                        .collect()
                })
                .collect()
        };
        if [b.nrows(), b.ncols(), c.nrows(), c.ncols(), a.ncols()]
            .iter()
            .any(|&d| d != n)
        {
            return Err(Error::Validation("a, b, c must all be n x n".into()));
        }
        Self::new(n, lift(a), lift(b), lift(c))
    }

    /// One-dimensional `½ a(t) q² + b(t) q p + ½ c(t) p²`.
    pub fn scalar(a: CoefficientFunction, b: CoefficientFunction, c: CoefficientFunction) -> Result<Self> {
        Self::new(1, vec![vec![a]], vec![vec![b]], vec![vec![c]])
    }

    pub fn harmonic_oscillator() -> Self {
        Self::scalar(1.0.into(), 0.0.into(), 1.0.into()).expect("valid preset")
    }

    pub fn free_particle() -> Self {
        Self::scalar(0.0.into(), 0.0.into(), 1.0.into()).expect("valid preset")
    }

    /// Unit-mass oscillator with `a(t) = 1 + ½ cos t`.
    pub fn parametric_oscillator() -> Self {
        Self::scalar(
            CoefficientFunction::constant(1.0).with_harmonic(0.5, 1.0, 0.0),
            0.0.into(),
            1.0.into(),
        )
        .expect("valid preset")
    }

    /// Two coupled modes with a symmetric q·p coupling and a driven stiffness entry.
    pub fn coupled_2d() -> Self {
        let k = CoefficientFunction::constant;
        Self::new(
            2,
            vec![
                vec![k(1.0).with_harmonic(0.3, 1.3, 0.0), k(0.2)],
                vec![k(0.2), k(1.5)],
            ],
            vec![vec![k(0.1), k(0.05)], vec![k(0.05), k(-0.1)]],
            vec![vec![k(1.0), k(0.1)], vec![k(0.1), k(0.8)]],
        )
        .expect("valid preset")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn a(&self) -> &CoefficientMatrix {
        &self.a
    }

    pub fn b(&self) -> &CoefficientMatrix {
        &self.b
    }

    pub fn c(&self) -> &CoefficientMatrix {
        &self.c
    }

    /// Diagnostics raised at construction (e.g. `a` not positive definite).
    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    pub fn a_at(&self, t: f64) -> Result<DMatrix<f64>> {
        Ok(linalg::symmetrize(&eval_matrix("a", &self.a, t)?))
    }

    pub fn b_at(&self, t: f64) -> Result<DMatrix<f64>> {
        eval_matrix("b", &self.b, t)
    }

    pub fn c_at(&self, t: f64) -> Result<DMatrix<f64>> {
        Ok(linalg::symmetrize(&eval_matrix("c", &self.c, t)?))
    }

    /// `(a(t), b(t), c(t))`, with `a` and `c` exactly symmetric.
    pub fn blocks_at(&self, t: f64) -> Result<(DMatrix<f64>, DMatrix<f64>, DMatrix<f64>)> {
        Ok((self.a_at(t)?, self.b_at(t)?, self.c_at(t)?))
    }

    pub fn b_is_zero(&self) -> bool {
        self.b.iter().flatten().all(|f| f.is_identically_zero())
    }

    pub fn is_time_independent(&self) -> bool {
        [&self.a, &self.b, &self.c]
            .iter()
            .all(|m| m.iter().flatten().all(|f| f.is_constant()))
    }

    /// Freeze the coefficients at time `t`.
    pub fn frozen_at(&self, t: f64) -> Result<Self> {
        let (a, b, c) = self.blocks_at(t)?;
        Self::constant(&a, &b, &c)
    }

    fn positivity_warnings(&self) -> Result<Vec<String>> {
        let mut out = Vec::new();
        let mut flagged = [false; 3];
        for k in 0..SAMPLE_TIMES {
            let t = k as f64 * SAMPLE_DT;
            let (a, b, c) = self.blocks_at(t)?;
            if !flagged[0] && !linalg::is_positive_definite(&a) {
                flagged[0] = true;
                out.push(format!("a(t) is not positive definite at t = {t}"));
            }
            if !flagged[1] && !linalg::is_positive_definite(&c) {
                flagged[1] = true;
                out.push(format!("c(t) is not positive definite at t = {t}"));
            }
            let hess = linalg::from_blocks(&a, &b, &b.transpose(), &c);
            if !flagged[2] && !linalg::is_positive_definite(&hess) {
                flagged[2] = true;
                out.push(format!(
                    "phase-space Hessian [[a, b], [bᵀ, c]] is not positive definite at t = {t}"
                ));
            }
        }
        Ok(out)
    }
}

/// The Hamiltonian matrix `L_H = [[bᵀ, c], [-a, -b]]` at a fixed time.
#[derive(Debug, Clone, PartialEq)]
pub struct HamiltonianGenerator {
    pub n: usize,
    pub matrix: DMatrix<f64>,
}

impl HamiltonianGenerator {
    /// Phase-space Hessian `ωᵀ L_H = [[a, b], [bᵀ, c]]`.
    pub fn hessian(&self) -> DMatrix<f64> {
        linalg::omega(self.n).transpose() * &self.matrix
    }
}

pub fn generator_at(spec: &HamiltonianSpec, t: f64) -> Result<HamiltonianGenerator> {
    let (a, b, c) = spec.blocks_at(t)?;
    Ok(HamiltonianGenerator {
        n: spec.n,
        matrix: linalg::from_blocks(&b.transpose(), &c, &(-&a), &(-&b)),
    })
}

/// `½ zᵀ ωᵀ L_H z`.
pub fn hamiltonian_value(gen: &HamiltonianGenerator, z: &DVector<f64>) -> Result<f64> {
    if z.len() != 2 * gen.n {
        return Err(Error::Shape {
            expected: 2 * gen.n,
            got: z.len(),
        });
    }
    Ok(0.5 * z.dot(&(gen.hessian() * z)))
}
