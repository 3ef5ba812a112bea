//! Spectral truncation `Lambda_r(rho) = Q_r rho Q_r / Tr Q_r rho` with
//! `Q_r = P_r^{s_1} ⊗ ... ⊗ P_r^{s_l} ⊗ I`, and the error bounds it admits.

use alloc::vec::Vec;

use crate::energy::{max_entropy_f_bar, HamiltonianSpec, SUM_SPECTRUM_CAP};
use crate::entropic::{
    conditional_entropy_ext, g, mutual_information_from_entropies, von_neumann_entropy,
};
use crate::error::{Error, Result};
use crate::layout::SubsystemLayout;
use crate::math;
use crate::operator::{marginals, tensor_all, HermitianOperator};
use crate::ree::{estimate_ree, SolveOptions};

/// Output of [`approx_map`].
#[derive(Debug, Clone, PartialEq)]
pub struct TruncationResult {
    /// The renormalised state `Lambda_r(rho)`.
    pub state: HermitianOperator,
    /// `Tr Q_r rho`.
    pub c_r: f64,
    /// Truncated parties (0-based, sorted).
    pub subset: Vec<usize>,
    pub r: usize,
    /// `sqrt(sum_j Tr Pbar_r^{s_j} rho_{s_j})`.
    pub delta_r: f64,
}

/// Projector onto the eigenvectors of the `r` largest eigenvalues.
pub fn spectral_projector(marginal: &HermitianOperator, r: usize) -> Result<HermitianOperator> {
    let dim = marginal.dim();
    if r == 0 || r > dim {
        return Err(Error::InvalidRank { rank: r, dim });
    }
    if r == dim {
        return Ok(HermitianOperator::identity(dim));
    }
    Ok(marginal.eig().top_projector(r))
}

/// Applies the truncation map. Parties with `d_s <= r` are left untouched.
pub fn approx_map(
    rho: &HermitianOperator,
    layout: &SubsystemLayout,
    subset: &[usize],
    r: usize,
) -> Result<TruncationResult> {
    layout.check_dim(rho.dim())?;
    rho.check_density()?;
    let subset = layout.normalize_subset(subset)?;
    if r == 0 {
        return Err(Error::InvalidRank {
            rank: 0,
            dim: layout.max_local_dim(),
        });
    }
    let margs = marginals(rho, layout)?;
    let mut tail = 0.0;
    let mut factors: Vec<HermitianOperator> = layout
        .dims()
        .iter()
        .map(|&d| HermitianOperator::identity(d))
        .collect();
    let mut identity = true;
    for &s in &subset {
        let d = layout.dim(s);
        if r >= d {
            continue;
        }
        let e = margs[s].eig();
        tail += e.values[r..].iter().map(|v| v.max(0.0)).sum::<f64>();
        factors[s] = e.top_projector(r);
        identity = false;
    }
    let delta_r = math::sqrt(tail.max(0.0));
    if identity {
        return Ok(TruncationResult {
            state: rho.clone(),
            c_r: 1.0,
            subset,
            r,
            delta_r,
        });
    }
    let q = tensor_all(&factors);
    let projected = rho.conjugate(q.matrix());
    let c_r = projected.trace();
    if !(c_r > 1e-14) {
        return Err(Error::FullyTruncated);
    }
    Ok(TruncationResult {
        state: projected.scale(1.0 / c_r),
        c_r,
        subset,
        r,
        delta_r,
    })
}

/// `g_i = ln^3 i` for `i = 1..dim`.
pub fn default_fa_weights(dim: usize) -> Vec<f64> {
    (1..=dim)
        .map(|i| {
            let l = math::ln(i as f64);
            l * l * l
        })
        .collect()
}

/// `G = sum_i g_i |phi_i><phi_i|` in the eigenbasis of a marginal.
#[derive(Debug, Clone, PartialEq)]
pub struct FaHamiltonian {
    pub spectrum: HamiltonianSpec,
    pub operator: HermitianOperator,
    /// `Tr G rho = sum_i lambda_i g_i`.
    pub energy: f64,
}

pub fn build_fa_hamiltonian(
    marginal: &HermitianOperator,
    weights: &[f64],
) -> Result<FaHamiltonian> {
    let dim = marginal.dim();
    if weights.len() != dim {
        return Err(Error::LengthMismatch {
            expected: dim,
            found: weights.len(),
        });
    }
    if weights[0] != 0.0 {
        return Err(Error::InvalidWeights("first weight must be 0"));
    }
    if weights.iter().any(|w| !w.is_finite()) || weights.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::InvalidWeights(
            "weights must be finite and nondecreasing",
        ));
    }
    let e = marginal.eig();
    let energy = e.values.iter().zip(weights).map(|(l, w)| l * w).sum();
    Ok(FaHamiltonian {
        spectrum: HamiltonianSpec::new(weights.to_vec())?,
        operator: e.with_diagonal(weights),
        energy,
    })
}

/// Both variants of the truncation error bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncationBound {
    /// Bound for functions of the `L` classes (uses `delta_r`).
    pub l_class: f64,
    /// Bound for functions of the `N` classes (uses `sqrt(delta_r (2 - delta_r))`).
    pub n_class: f64,
}

/// `C sqrt(2 delta) Fbar(4 E_S / (3 delta)) + D g(sqrt(2 delta))` for `delta`
/// in `[0, 1/2]`; `delta = 0` gives `0`.
pub fn theorem1_bound(
    delta_r: f64,
    e_s: f64,
    c: f64,
    d: f64,
    f_bar: impl Fn(f64) -> Result<f64>,
) -> Result<TruncationBound> {
    if !(0.0..=0.5).contains(&delta_r) {
        return Err(Error::Domain {
            what: "delta_r",
            value: delta_r,
        });
    }
    if !(e_s >= 0.0 && e_s.is_finite()) {
        return Err(Error::Domain {
            what: "energy E_S",
            value: e_s,
        });
    }
    if !(c >= 0.0 && d >= 0.0) {
        return Err(Error::Domain {
            what: "class constant",
            value: c.min(d),
        });
    }
    if delta_r == 0.0 {
        return Ok(TruncationBound {
            l_class: 0.0,
            n_class: 0.0,
        });
    }
    let term = |delta: f64| -> Result<f64> {
        let x = math::sqrt(2.0 * delta);
        Ok(c * x * f_bar(4.0 * e_s / (3.0 * delta))? + d * g(x))
    };
    let l_class = term(delta_r)?;
    let n_class = term(math::sqrt(delta_r * (2.0 - delta_r)))?;
    Ok(TruncationBound { l_class, n_class })
}

/// Functional evaluated along the truncation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Functional {
    Entropy,
    /// Multipartite mutual information.
    Qmi,
    /// `H(A_1..A_{n-1} | A_n)`.
    CondEntropy,
    /// Relative entropy of entanglement estimate.
    Ree(SolveOptions),
}

impl Functional {
    /// `(m, C, D)`: the function lies in `L^m_n(C, D)`.
    pub fn class_constants(&self, parties: usize) -> (usize, f64, f64) {
        let n = parties;
        match self {
            Functional::Entropy => (n, 1.0, 1.0),
            Functional::Qmi => (n - 1, 2.0, n as f64),
            Functional::CondEntropy => (n - 1, 2.0, 1.0),
            Functional::Ree(_) => (n - 1, 1.0, 1.0),
        }
    }

    /// Value and, for `E_R`, the certificate gap.
    pub fn evaluate(
        &self,
        rho: &HermitianOperator,
        layout: &SubsystemLayout,
    ) -> Result<(f64, Option<f64>)> {
        Ok(match self {
            Functional::Entropy => (von_neumann_entropy(rho)?, None),
            Functional::Qmi => (mutual_information_from_entropies(rho, layout)?, None),
            Functional::CondEntropy => (
                conditional_entropy_ext(rho, &layout.bipartition(layout.parties() - 1)?)?,
                None,
            ),
            Functional::Ree(opts) => {
                let r = estimate_ree(rho, layout, opts)?;
                (r.value, Some(r.gap))
            }
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TruncationRow {
    pub r: usize,
    pub c_r: f64,
    pub delta_r: f64,
    pub value: f64,
    /// Solver gap when the functional is `E_R`.
    pub gap: Option<f64>,
    /// L-class bound on `|f(Lambda_r rho) - f(rho)|`; absent when `delta_r > 1/2`.
    pub bound: Option<f64>,
    pub valid_regime: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TruncationTable {
    pub functional: Functional,
    pub subset: Vec<usize>,
    /// `f(rho)`.
    pub reference: f64,
    /// Smallest `r` from which `delta_r <= 1/2`.
    pub r0: usize,
    /// `E_S` of the default FA Hamiltonians on the first `m` parties.
    pub e_s: f64,
    pub rows: Vec<TruncationRow>,
}

/// Evaluates `f(Lambda_r(rho))` and the truncation bound for each `r`.
///
/// The bound uses FA Hamiltonians with the default weights on the first `m`
/// parties, `m` being the class index of `f`.
pub fn truncation_experiment(
    rho: &HermitianOperator,
    layout: &SubsystemLayout,
    subset: &[usize],
    f: &Functional,
    r_values: &[usize],
) -> Result<TruncationTable> {
    layout.check_dim(rho.dim())?;
    rho.check_density()?;
    let subset = layout.normalize_subset(subset)?;
    let n = layout.parties();
    if n < 2 && !matches!(f, Functional::Entropy) {
        return Err(Error::TooFewParties {
            required: 2,
            found: n,
        });
    }
    let (m, c, d) = f.class_constants(n);
    let margs = marginals(rho, layout)?;
    let mut parts = Vec::with_capacity(m);
    let mut e_s = 0.0;
    for marginal in &margs[..m] {
        let h = build_fa_hamiltonian(marginal, &default_fa_weights(marginal.dim()))?;
        e_s += h.energy;
        parts.push(h.spectrum);
    }
    let (sum, _) = HamiltonianSpec::sum(&parts, SUM_SPECTRUM_CAP)?;
    let f_bar = |e: f64| max_entropy_f_bar(&sum, e);

    let delta_at = |r: usize| -> f64 {
        let tail: f64 = subset
            .iter()
            .map(|&s| {
                margs[s]
                    .eig()
                    .values
                    .iter()
                    .skip(r)
                    .map(|v| v.max(0.0))
                    .sum::<f64>()
            })
            .sum();
        math::sqrt(tail.max(0.0))
    };
    let top = layout.max_local_dim();
    let r0 = (1..=top).find(|&r| delta_at(r) <= 0.5).unwrap_or(top);

    let (reference, reference_gap) = f.evaluate(rho, layout)?;
    let mut sorted: Vec<usize> = r_values.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    let mut rows = Vec::with_capacity(sorted.len());
    for r in sorted {
        let t = approx_map(rho, layout, &subset, r)?;
        // every projector is the identity: nothing to recompute
        let (value, gap) = if t.state == *rho {
            (reference, reference_gap)
        } else {
            f.evaluate(&t.state, layout)?
        };
        let valid_regime = t.delta_r <= 0.5;
        let bound = if valid_regime {
            Some(theorem1_bound(t.delta_r, e_s, c, d, f_bar)?.l_class)
        } else {
            None
        };
        rows.push(TruncationRow {
            r,
            c_r: t.c_r,
            delta_r: t.delta_r,
            value,
            gap,
            bound,
            valid_regime,
        });
    }
    Ok(TruncationTable {
        functional: *f,
        subset,
        reference,
        r0,
        e_s,
        rows,
    })
}
