//! Direct RK4 integration of `dΓ/dt = −a − Γbᵀ − bΓ − ΓcΓ`.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::hamiltonian::HamiltonianSpec;
use crate::iwasawa::Complex64;
use crate::linalg;
use crate::state::ComplexSymmetricMatrix;

fn rhs(spec: &HamiltonianSpec, t: f64, gamma: &DMatrix<Complex64>) -> Result<DMatrix<Complex64>> {
    let (a, b, c) = spec.blocks_at(t)?;
    let cx = |m: DMatrix<f64>| m.map(|x| Complex64::new(x, 0.0));
    let (a, b, c) = (cx(a), cx(b), cx(c));
    Ok(-a - gamma * b.transpose() - &b * gamma - gamma * c * gamma)
}

/// Integrate Γ from `t0` to `t1` with `steps` classical RK4 steps.
pub fn riccati_integrate(
    spec: &HamiltonianSpec,
    gamma0: &ComplexSymmetricMatrix,
    t0: f64,
    t1: f64,
    steps: usize,
) -> Result<ComplexSymmetricMatrix> {
    if steps == 0 {
        return Err(Error::InvalidArgument("steps must be >= 1".into()));
    }
    if gamma0.n != spec.n() {
        return Err(Error::Shape {
            expected: spec.n(),
            got: gamma0.n,
        });
    }
    let h = (t1 - t0) / steps as f64;
    let hc = Complex64::new(h, 0.0);
    let mut g = gamma0.to_complex();
    for k in 0..steps {
        let t = t0 + k as f64 * h;
        let k1 = rhs(spec, t, &g)?;
        let k2 = rhs(spec, t + 0.5 * h, &(&g + &k1 * (hc * 0.5)))?;
        let k3 = rhs(spec, t + 0.5 * h, &(&g + &k2 * (hc * 0.5)))?;
        let k4 = rhs(spec, t + h, &(&g + &k3 * hc))?;
        g += (&k1 + &k2 + &k2 + &k3 + &k3 + k4) * (hc / 6.0);
        let im = g.map(|z| z.im);
        if g.iter().any(|z| !z.re.is_finite() || !z.im.is_finite())
            || !linalg::is_positive_definite(&im)
        {
            return Err(Error::RiccatiBlowUp { step: k, t: t + h });
        }
    }
    let re = linalg::symmetrize(&g.map(|z| z.re));
    let im = linalg::symmetrize(&g.map(|z| z.im));
    ComplexSymmetricMatrix::new(re, im)
}
