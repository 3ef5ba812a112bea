//! Entropy functionals in nats.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::layout::SubsystemLayout;
use crate::math::{self, xlnx};
use crate::operator::{
    marginals, partial_trace, tensor, tensor_all, HermitianOperator, DENSITY_TOL, RANK_FLOOR,
};

/// Squared overlap of a `rho` eigenvector with the kernel of `sigma` above
/// which the support condition counts as violated.
const SUPPORT_TOL: f64 = 1e-10;

/// Value of a relative entropy: finite or `+inf`. Consumers must branch.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RelEntropy {
    Finite(f64),
    Infinite,
}

impl RelEntropy {
    pub fn finite(self) -> Option<f64> {
        match self {
            RelEntropy::Finite(v) => Some(v),
            RelEntropy::Infinite => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, RelEntropy::Infinite)
    }

    /// Maps `Infinite` to `f64::INFINITY`.
    pub fn to_f64(self) -> f64 {
        self.finite().unwrap_or(f64::INFINITY)
    }
}

/// `eta(p) + eta(1 - p)` for `p` in `[0, 1]`.
pub fn binary_entropy(p: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Domain {
            what: "binary entropy argument",
            value: p,
        });
    }
    Ok(h2(p))
}

/// `g(x) = (1 + x) h2(x / (1 + x)) = (x + 1) ln(x + 1) - x ln x` for `x >= 0`.
pub fn g_func(x: f64) -> Result<f64> {
    if !(x >= 0.0) {
        return Err(Error::Domain {
            what: "g argument",
            value: x,
        });
    }
    Ok(g(x))
}

pub(crate) fn h2(p: f64) -> f64 {
    -xlnx(p) - xlnx(1.0 - p)
}

pub(crate) fn g(x: f64) -> f64 {
    if x == f64::INFINITY {
        return f64::INFINITY;
    }
    xlnx(x + 1.0) - xlnx(x)
}

/// Shannon entropy of a spectrum with the rank-floor convention.
pub(crate) fn spectral_entropy(values: &[f64]) -> f64 {
    let scale = values.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let floor = RANK_FLOOR * scale;
    values
        .iter()
        .filter(|&&v| v > floor)
        .map(|&v| -xlnx(v))
        .sum()
}

/// `H(rho) = -Tr rho ln rho`.
pub fn von_neumann_entropy(rho: &HermitianOperator) -> Result<f64> {
    let e = rho.eig();
    let min = e.values.last().copied().unwrap_or(0.0);
    let tr: f64 = e.values.iter().sum();
    if min < -DENSITY_TOL || (tr - 1.0).abs() > DENSITY_TOL {
        return Err(Error::NotDensity {
            min_eigenvalue: min,
            trace: tr,
        });
    }
    Ok(spectral_entropy(&e.values).max(0.0))
}

/// Relative entropy of positive operators, evaluated in the eigenbasis of
/// `rho`:
/// `sum_i <i| rho ln rho - rho ln sigma |i> + Tr sigma - Tr rho`.
///
/// Infinite when some eigenvector of `rho` (above the rank floor) has weight
/// on the numerical kernel of `sigma`.
pub fn relative_entropy(rho: &HermitianOperator, sigma: &HermitianOperator) -> Result<RelEntropy> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            found: sigma.dim(),
        });
    }
    let er = rho.eig();
    let es = sigma.eig();
    for e in [&er, &es] {
        let scale = e.values.iter().sum::<f64>().abs().max(1.0);
        if let Some(&min) = e.values.last() {
            if min < -DENSITY_TOL * scale {
                return Err(Error::NotDensity {
                    min_eigenvalue: min,
                    trace: e.values.iter().sum(),
                });
            }
        }
    }
    let rho_floor = er.floor();
    let sigma_floor = es.floor();
    let tr_rho: f64 = er.values.iter().sum();
    let tr_sigma: f64 = es.values.iter().sum();

    // overlap[k * n + i] = |<k_sigma | i_rho>|^2
    let w = es.vectors.adjoint_matmul(&er.vectors);
    let n = rho.dim();
    let ln_mu: Vec<f64> = es
        .values
        .iter()
        .map(|&m| {
            if m > sigma_floor {
                math::ln(m)
            } else {
                f64::NEG_INFINITY
            }
        })
        .collect();

    let mut value = 0.0;
    for (i, &lambda) in er.values.iter().enumerate() {
        if !(lambda > rho_floor) {
            continue;
        }
        let mut cross = 0.0;
        let mut kernel_weight = 0.0;
        for (k, &l) in ln_mu.iter().enumerate() {
            let o = w.get(k, i).norm_sqr();
            if l.is_finite() {
                cross += o * l;
            } else {
                kernel_weight += o;
            }
        }
        if kernel_weight > SUPPORT_TOL {
            return Ok(RelEntropy::Infinite);
        }
        value += xlnx(lambda) - lambda * cross;
    }
    debug_assert_eq!(w.rows(), n);
    Ok(RelEntropy::Finite(value + tr_sigma - tr_rho))
}

/// Extended conditional entropy `H(A|B) = H(rho_A) - H(rho || rho_A ⊗ rho_B)`
/// on a two-party layout.
pub fn conditional_entropy_ext(rho: &HermitianOperator, layout: &SubsystemLayout) -> Result<f64> {
    layout.check_dim(rho.dim())?;
    if layout.parties() != 2 {
        return Err(Error::TooFewParties {
            required: 2,
            found: layout.parties(),
        });
    }
    let ra = partial_trace(rho, layout, &[0])?;
    let rb = partial_trace(rho, layout, &[1])?;
    let ha = von_neumann_entropy(&ra)?;
    let d = relative_entropy(rho, &tensor(&ra, &rb))?;
    // supp rho lies inside supp(rho_A ⊗ rho_B), so the value is finite
    Ok(ha - d.to_f64())
}

/// `H(A|B)` through `H(rho) - H(rho_B)`; the finite-dimensional cross-check.
pub fn conditional_entropy_direct(
    rho: &HermitianOperator,
    layout: &SubsystemLayout,
) -> Result<f64> {
    layout.check_dim(rho.dim())?;
    if layout.parties() != 2 {
        return Err(Error::TooFewParties {
            required: 2,
            found: layout.parties(),
        });
    }
    let rb = partial_trace(rho, layout, &[1])?;
    Ok(von_neumann_entropy(rho)? - von_neumann_entropy(&rb)?)
}

/// Multipartite mutual information `H(rho || rho_{A_1} ⊗ ... ⊗ rho_{A_n})`.
pub fn mutual_information(rho: &HermitianOperator, layout: &SubsystemLayout) -> Result<f64> {
    layout.check_dim(rho.dim())?;
    if layout.parties() < 2 {
        return Err(Error::TooFewParties {
            required: 2,
            found: layout.parties(),
        });
    }
    let m = marginals(rho, layout)?;
    let product = tensor_all(&m);
    Ok(relative_entropy(rho, &product)?.to_f64().max(0.0))
}

/// `sum_s H(rho_{A_s}) - H(rho)`; equals [`mutual_information`] in finite dimensions.
pub fn mutual_information_from_entropies(
    rho: &HermitianOperator,
    layout: &SubsystemLayout,
) -> Result<f64> {
    layout.check_dim(rho.dim())?;
    if layout.parties() < 2 {
        return Err(Error::TooFewParties {
            required: 2,
            found: layout.parties(),
        });
    }
    let mut s = 0.0;
    for m in marginals(rho, layout)? {
        s += von_neumann_entropy(&m)?;
    }
    Ok(s - von_neumann_entropy(rho)?)
}

/// Entropies of all single-party marginals.
pub fn marginal_entropies(rho: &HermitianOperator, layout: &SubsystemLayout) -> Result<Vec<f64>> {
    marginals(rho, layout)?
        .iter()
        .map(von_neumann_entropy)
        .collect()
}
