//! Modified Iwasawa factorization `S = l(g) · m(s) · f(u)` of a symplectic matrix.

use std::f64::consts::PI;

use nalgebra::{Complex, DMatrix};

use crate::error::{Error, Result};
use crate::linalg;
use crate::symplectic::SymplecticMatrix;

pub type Complex64 = Complex<f64>;

#[derive(Debug, Clone, PartialEq)]
pub struct IwasawaFactors {
    /// Shear (lens) matrix, symmetric.
    pub g: DMatrix<f64>,
    /// Magnification, symmetric positive definite.
    pub s: DMatrix<f64>,
    /// Rotation, unitary.
    pub u: DMatrix<Complex64>,
    /// Phase of `det u`. Principal value from [`iwasawa`]; unwrapped when tracked along a path.
    pub alpha: f64,
}

impl IwasawaFactors {
    pub fn n(&self) -> usize {
        self.g.nrows()
    }

    /// `l(g) m(s) f(u)` as a real 2n×2n matrix.
    pub fn reconstruct(&self) -> Result<DMatrix<f64>> {
        let n = self.n();
        let id = DMatrix::<f64>::identity(n, n);
        let zero = DMatrix::<f64>::zeros(n, n);
        let s_inv = self
            .s
            .clone()
            .try_inverse()
            .ok_or(Error::SingularState)?;
        let l = linalg::from_blocks(&id, &zero, &(-&self.g), &id);
        let m = linalg::from_blocks(&self.s, &zero, &zero, &s_inv);
        let x = self.u.map(|z| z.re);
        let y = self.u.map(|z| z.im);
        let f = linalg::from_blocks(&x, &y, &(-&y), &x);
        Ok(l * m * f)
    }

    /// Max-norm of `u†u − I`.
    pub fn unitarity_defect(&self) -> f64 {
        let n = self.n();
        let e = self.u.adjoint() * &self.u - DMatrix::<Complex64>::identity(n, n);
        e.iter().fold(0.0, |acc, z| acc.max(z.norm()))
    }

    pub fn det_u(&self) -> Complex64 {
        self.u.determinant()
    }
}

/// Factor `S` into shear, magnification and rotation. `alpha` is the principal value of
/// `arg det u` in (−π, π].
pub fn iwasawa(s: &SymplecticMatrix) -> Result<IwasawaFactors> {
    let (a, b, c, d) = (s.a(), s.b(), s.c(), s.d());
    let m = &a * a.transpose() + &b * b.transpose();
    let mag = linalg::sqrt_spd(&m)?;
    let m_inv = linalg::inv_spd(&m, "AAᵀ + BBᵀ")
        .map_err(|_| Error::Factorization("AAᵀ + BBᵀ is singular".into()))?;
    let g = linalg::symmetrize(&(-(&c * a.transpose() + &d * b.transpose()) * m_inv));
    let mag_inv = linalg::inv_spd(&mag, "s")
        .map_err(|_| Error::Factorization("magnification is singular".into()))?;
    let ua = &mag_inv * &a;
    let ub = &mag_inv * &b;
    let u = DMatrix::from_fn(s.n, s.n, |i, j| Complex64::new(ua[(i, j)], ub[(i, j)]));
    let alpha = u.determinant().arg();
    Ok(IwasawaFactors { g, s: mag, u, alpha })
}

/// The representative of `arg det u` (mod 2π) lying within π of `prev_alpha`.
pub fn alpha_unwrap(prev_alpha: f64, u: &DMatrix<Complex64>) -> f64 {
    unwrap_angle(prev_alpha, u.determinant().arg())
}

/// The representative of `angle` (mod 2π) closest to `prev`.
pub fn unwrap_angle(prev: f64, angle: f64) -> f64 {
    let k = ((prev - angle) / (2.0 * PI)).round();
    angle + 2.0 * PI * k
}

/// Principal representative of `x` in (−π, π].
pub fn wrap_to_pi(x: f64) -> f64 {
    let y = x - 2.0 * PI * (x / (2.0 * PI)).round();
    if y <= -PI {
        y + 2.0 * PI
    } else {
        y
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::{FRAC_PI_4, SQRT_2};

    fn one_by_one(u: Complex64) -> DMatrix<Complex64> {
        DMatrix::from_element(1, 1, u)
    }

    #[test]
    fn identity_factors() {
        let f = iwasawa(&SymplecticMatrix::identity(2)).unwrap();
        assert_eq!(f.g, DMatrix::zeros(2, 2));
        assert_eq!(f.s, DMatrix::identity(2, 2));
        assert_eq!(f.alpha, 0.0);
        assert_eq!(f.unitarity_defect(), 0.0);
    }

    #[test]
    fn free_particle_factors() {
        let s = SymplecticMatrix::from_matrix(DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 0.0, 1.0])).unwrap();
        let f = iwasawa(&s).unwrap();
        assert_relative_eq!(f.g[(0, 0)], -0.5, epsilon = 1e-15);
        assert_relative_eq!(f.s[(0, 0)], SQRT_2, epsilon = 1e-15);
        assert_relative_eq!(f.u[(0, 0)].re, 1.0 / SQRT_2, epsilon = 1e-15);
        assert_relative_eq!(f.u[(0, 0)].im, 1.0 / SQRT_2, epsilon = 1e-15);
        assert_relative_eq!(f.alpha, FRAC_PI_4, epsilon = 1e-15);
        assert_relative_eq!(f.reconstruct().unwrap(), s.matrix, epsilon = 1e-14);
    }

    #[test]
    fn rotation_factors() {
        let t: f64 = 0.3;
        let s = SymplecticMatrix::from_matrix(DMatrix::from_row_slice(
            2,
            2,
            &[t.cos(), t.sin(), -t.sin(), t.cos()],
        ))
        .unwrap();
        let f = iwasawa(&s).unwrap();
        assert_relative_eq!(f.g[(0, 0)], 0.0, epsilon = 1e-15);
        assert_relative_eq!(f.s[(0, 0)], 1.0, epsilon = 1e-15);
        assert_relative_eq!(f.alpha, 0.3, epsilon = 1e-15);
    }

    #[test]
    fn unwrap_examples() {
        assert_relative_eq!(alpha_unwrap(0.0, &one_by_one(Complex64::from_polar(1.0, 0.1))), 0.1, epsilon = 1e-15);
        let u = one_by_one(Complex64::from_polar(1.0, 3.3 - 2.0 * PI));
        assert_relative_eq!(alpha_unwrap(3.0, &u), 3.3, epsilon = 1e-14);
        let prev = 2.0 * PI * 5.0;
        assert_relative_eq!(alpha_unwrap(prev, &one_by_one(Complex64::new(1.0, 0.0))), prev, epsilon = 1e-14);
    }

    #[test]
    fn wrap_range() {
        assert_relative_eq!(wrap_to_pi(3.3), 3.3 - 2.0 * PI, epsilon = 1e-15);
        assert_eq!(wrap_to_pi(PI), PI);
        assert_eq!(wrap_to_pi(-PI), PI);
    }
}
