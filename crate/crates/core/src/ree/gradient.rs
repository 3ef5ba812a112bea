use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math;
use crate::matrix::CMatrix;
use crate::operator::{HermitianOperator, RANK_FLOOR};

/// Divided difference of `ln`: `(ln a - ln b) / (a - b)`, `1/a` on the diagonal.
#[inline]
pub(crate) fn log_divided_difference(a: f64, b: f64) -> f64 {
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    if hi == lo {
        return 1.0 / hi;
    }
    math::ln_1p((hi - lo) / lo) / (hi - lo)
}

/// Second divided difference of `ln` at three points.
pub(crate) fn log_second_difference(a: f64, b: f64, c: f64) -> f64 {
    let mut v = [a, b, c];
    v.sort_by(f64::total_cmp);
    let [x, y, z] = v;
    if z - x <= 1e-5 * x {
        let m = (x + y + z) / 3.0;
        return -0.5 / (m * m);
    }
    (log_divided_difference(z, y) - log_divided_difference(y, x)) / (z - x)
}

/// `sigma -> H(rho || sigma)` and its gradient at one point.
pub(crate) struct Evaluation {
    pub value: f64,
    /// `G = -U T U^dagger`.
    pub grad: CMatrix,
    /// Eigenbasis, clipped eigenvalues of `sigma` and `U^dagger rho U`.
    pub u: CMatrix,
    pub mu: Vec<f64>,
    pub rho_tilde: CMatrix,
}

impl Evaluation {
    /// `Re Tr(X G)`.
    pub fn pair(&self, x: &CMatrix) -> f64 {
        x.trace_product(&self.grad).re
    }
}

/// Evaluates `H(rho || sigma)` (Lindblad form, both operators positive) and
/// its Frechet gradient. `neg_entropy` is `Tr rho ln rho`.
pub(crate) fn evaluate(
    rho: &HermitianOperator,
    neg_entropy: f64,
    sigma: &HermitianOperator,
) -> Evaluation {
    let e = sigma.eig();
    let n = sigma.dim();
    let mu: Vec<f64> = e.values.iter().map(|&m| m.max(f64::MIN_POSITIVE)).collect();
    let u = e.vectors;
    let rt = u.adjoint_matmul(rho.matrix()).matmul(&u);

    let mut value = neg_entropy + e.values.iter().sum::<f64>() - rho.trace();
    for (j, &m) in mu.iter().enumerate() {
        value -= rt.get(j, j).re * math::ln(m);
    }

    let t = CMatrix::from_fn(n, n, |j, k| {
        rt.get(j, k) * log_divided_difference(mu[j], mu[k])
    });
    let mut grad = u.matmul(&t).matmul_adjoint(&u);
    grad.scale_mut(-1.0);
    Evaluation {
        value,
        grad,
        u,
        mu,
        rho_tilde: rt,
    }
}

/// Gradient `G = -U T U^dagger` of `sigma -> H(rho || sigma)`, where
/// `T_jk = rho~_jk f(mu_j, mu_k)` in the eigenbasis of `sigma` and `f` is the
/// divided difference of `ln`.
pub fn rel_entropy_gradient(
    rho: &HermitianOperator,
    sigma: &HermitianOperator,
) -> Result<HermitianOperator> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            found: sigma.dim(),
        });
    }
    let e = sigma.eig();
    let max = e.values.first().copied().unwrap_or(0.0);
    let min = e.values.last().copied().unwrap_or(0.0);
    if !(min > RANK_FLOOR * max.abs()) {
        return Err(Error::Domain {
            what: "minimal eigenvalue of a singular sigma",
            value: min,
        });
    }
    let ev = evaluate(rho, 0.0, sigma);
    Ok(HermitianOperator::from_hermitian_unchecked(ev.grad))
}
