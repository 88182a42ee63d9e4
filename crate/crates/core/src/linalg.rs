//! Small dense linear-algebra helpers on top of nalgebra.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// The standard symplectic form `[[0, I], [-I, 0]]` of size 2n.
pub fn omega(n: usize) -> DMatrix<f64> {
    let mut w = DMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        w[(i, n + i)] = 1.0;
        w[(n + i, i)] = -1.0;
    }
    w
}

pub fn symmetrize(m: &DMatrix<f64>) -> DMatrix<f64> {
    (m + m.transpose()) * 0.5
}

pub fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0_f64, |acc, x| acc.max(x.abs()))
}

/// Largest elementwise |m - mᵀ|.
pub fn asymmetry(m: &DMatrix<f64>) -> f64 {
    max_abs(&(m - m.transpose()))
}

pub fn all_finite(m: &DMatrix<f64>) -> bool {
    m.iter().all(|x| x.is_finite())
}

/// Assemble a 2n×2n matrix from four n×n blocks.
pub fn from_blocks(
    a: &DMatrix<f64>,
    b: &DMatrix<f64>,
    c: &DMatrix<f64>,
    d: &DMatrix<f64>,
) -> DMatrix<f64> {
    let n = a.nrows();
    let mut m = DMatrix::zeros(2 * n, 2 * n);
    m.view_mut((0, 0), (n, n)).copy_from(a);
    m.view_mut((0, n), (n, n)).copy_from(b);
    m.view_mut((n, 0), (n, n)).copy_from(c);
    m.view_mut((n, n), (n, n)).copy_from(d);
    m
}

/// Split a 2n×2n matrix into its (top-left, top-right, bottom-left, bottom-right) blocks.
pub fn blocks(m: &DMatrix<f64>) -> (DMatrix<f64>, DMatrix<f64>, DMatrix<f64>, DMatrix<f64>) {
    let n = m.nrows() / 2;
    (
        m.view((0, 0), (n, n)).into_owned(),
        m.view((0, n), (n, n)).into_owned(),
        m.view((n, 0), (n, n)).into_owned(),
        m.view((n, n), (n, n)).into_owned(),
    )
}

pub fn concat(q: &DVector<f64>, p: &DVector<f64>) -> DVector<f64> {
    let n = q.len();
    let mut z = DVector::zeros(n + p.len());
    z.rows_mut(0, n).copy_from(q);
    z.rows_mut(n, p.len()).copy_from(p);
    z
}

pub fn split(z: &DVector<f64>) -> (DVector<f64>, DVector<f64>) {
    let n = z.len() / 2;
    (z.rows(0, n).into_owned(), z.rows(n, n).into_owned())
}

fn norm1(m: &DMatrix<f64>) -> f64 {
    m.column_iter()
        .map(|c| c.iter().map(|x| x.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

const PADE13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];

const THETA13: f64 = 5.371920351148152;

/// Matrix exponential by scaling and squaring with the degree-13 diagonal Padé approximant.
///
/// A diagonal Padé approximant maps Hamiltonian matrices to symplectic ones exactly,
/// so the result is symplectic to rounding for Hamiltonian input.
pub fn expm(a: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    if !all_finite(a) {
        return Err(Error::InvalidArgument("expm of non-finite matrix".into()));
    }
    let dim = a.nrows();
    let id = DMatrix::<f64>::identity(dim, dim);
    let nrm = norm1(a);
    let s = if nrm > THETA13 {
        (nrm / THETA13).log2().ceil().max(0.0) as i32
    } else {
        0
    };
    let a = a * 2f64.powi(-s);
    let b = &PADE13;
    let a2 = &a * &a;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;
    let inner_u = &a6 * (&a6 * b[13] + &a4 * b[11] + &a2 * b[9]);
    let u = &a * (inner_u + &a6 * b[7] + &a4 * b[5] + &a2 * b[3] + &id * b[1]);
    let inner_v = &a6 * (&a6 * b[12] + &a4 * b[10] + &a2 * b[8]);
    let v = inner_v + &a6 * b[6] + &a4 * b[4] + &a2 * b[2] + &id * b[0];
    let p = &v + &u;
    let q = &v - &u;
    let mut r = q
        .lu()
        .solve(&p)
        .ok_or_else(|| Error::Factorization("Padé denominator singular".into()))?;
    for _ in 0..s {
        r = &r * &r;
    }
    Ok(r)
}

/// Principal square root of a symmetric positive-definite matrix, returned exactly symmetric.
/// Eigenvalues below `1e-12` are rejected.
pub fn sqrt_spd(m: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let eig = symmetrize(m).symmetric_eigen();
    if let Some(&lo) = eig
        .eigenvalues
        .iter()
        .min_by(|x, y| x.partial_cmp(y).unwrap_or(std::cmp::Ordering::Equal))
    {
        if !(lo >= 1e-12) {
            return Err(Error::Factorization(format!(
                "eigenvalue {lo:.3e} below 1e-12 in square root"
            )));
        }
    }
    let v = &eig.eigenvectors;
    let d = DMatrix::from_diagonal(&eig.eigenvalues.map(f64::sqrt));
    Ok(symmetrize(&(v * d * v.transpose())))
}

/// Inverse of a symmetric positive-definite matrix through Cholesky, symmetrized.
pub fn inv_spd(m: &DMatrix<f64>, what: &'static str) -> Result<DMatrix<f64>> {
    let ch = symmetrize(m)
        .cholesky()
        .ok_or(Error::NotPositiveDefinite(what))?;
    Ok(symmetrize(&ch.inverse()))
}

pub fn is_positive_definite(m: &DMatrix<f64>) -> bool {
    symmetrize(m).cholesky().is_some()
}

pub fn min_eigenvalue(m: &DMatrix<f64>) -> f64 {
    symmetrize(m)
        .symmetric_eigenvalues()
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}
