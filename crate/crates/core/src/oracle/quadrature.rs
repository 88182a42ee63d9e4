//! Gauss–Hermite rules (weight `e^{−x²}`) and tensor-product expectations over
//! multivariate Gaussians.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};

use crate::distributions::GaussianDistribution;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    pub order: usize,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

/// Orthonormal Hermite values `p̃_{order-1}(x)`, `p̃_order(x)` and `Σ_{k<order} p̃_k(x)²`.
fn orthonormal_hermite(order: usize, x: f64) -> (f64, f64, f64) {
    let mut prev = 0.0;
    let mut cur = PI.powf(-0.25);
    let mut sum_sq = 0.0;
    for k in 0..order {
        sum_sq += cur * cur;
        let kf = k as f64;
        let next = (2.0 / (kf + 1.0)).sqrt() * x * cur - (kf / (kf + 1.0)).sqrt() * prev;
        prev = cur;
        cur = next;
    }
    (prev, cur, sum_sq)
}

/// `order`-point Gauss–Hermite rule: Golub–Welsch eigenvalues polished by Newton steps on
/// the orthonormal recurrence, Christoffel weights.
pub fn gauss_hermite(order: usize) -> Result<QuadratureRule> {
    if order == 0 {
        return Err(Error::InvalidArgument("quadrature order must be >= 1".into()));
    }
    let mut jacobi = DMatrix::<f64>::zeros(order, order);
    for k in 1..order {
        let off = (k as f64 / 2.0).sqrt();
        jacobi[(k, k - 1)] = off;
        jacobi[(k - 1, k)] = off;
    }
    let mut nodes: Vec<f64> = jacobi.symmetric_eigenvalues().iter().copied().collect();
    nodes.sort_by(|a, b| a.partial_cmp(b).expect("finite nodes"));
    let nf = order as f64;
    let mut weights = Vec::with_capacity(order);
    for x in nodes.iter_mut() {
        for _ in 0..3 {
            let (pm1, p, _) = orthonormal_hermite(order, *x);
            let dp = (2.0 * nf).sqrt() * pm1;
            if dp == 0.0 {
                break;
            }
            *x -= p / dp;
        }
        let (_, _, sum_sq) = orthonormal_hermite(order, *x);
        weights.push(1.0 / sum_sq);
    }
    Ok(QuadratureRule {
        order,
        nodes,
        weights,
    })
}

/// `E[f(X)]` for `X ~ dist`, by whitening `x = μ + √2 L y` with the Cholesky factor `L`
/// of the covariance and a tensor-product rule in `y`.
pub fn gauss_hermite_expect<F>(dist: &GaussianDistribution, f: F, order: usize) -> Result<f64>
where
    F: Fn(&DVector<f64>) -> f64,
{
    let dim = dist.dim;
    if dim == 0 || dim > 4 {
        return Err(Error::InvalidArgument(format!(
            "tensor quadrature supports 1..=4 dimensions, got {dim}"
        )));
    }
    let l = dist
        .cov
        .clone()
        .cholesky()
        .ok_or(Error::NotPositiveDefinite("covariance"))?
        .unpack();
    let rule = gauss_hermite(order)?;
    let scale = l * 2f64.sqrt();
    let total = order.pow(dim as u32);
    let mut y = DVector::<f64>::zeros(dim);
    let mut acc = 0.0;
    for idx in 0..total {
        let mut rest = idx;
        let mut w = 1.0;
        for i in 0..dim {
            let k = rest % order;
            rest /= order;
            y[i] = rule.nodes[k];
            w *= rule.weights[k];
        }
        let x = &dist.mean + &scale * &y;
        acc += w * f(&x);
    }
    Ok(acc * PI.powf(-(dim as f64) / 2.0))
}
