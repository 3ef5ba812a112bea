//! Relative entropy of entanglement `E_R(rho) = min_{sigma separable} H(rho || sigma)`.

mod audit;
mod fw;
mod gradient;
mod lmo;
mod newton;
mod refine;

use alloc::vec;
use alloc::vec::Vec;

pub use audit::{audit_state, AuditOptions, AuditRecord, AuditReport};
pub use gradient::rel_entropy_gradient;
pub use lmo::{lmo_product, ProductLmo};

use fw::{Atom, Constraint, Solver, FLOOR};

use crate::energy::HamiltonianSpec;
use crate::entropic::von_neumann_entropy;
use crate::error::{Error, Result};
use crate::layout::SubsystemLayout;
use crate::operator::{marginals, HermitianOperator};
use crate::separable::{LocalSupports, ProductAtom, ProductEnsemble};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveOptions {
    pub tol: f64,
    pub max_iter: usize,
    pub restarts: usize,
    pub seed: u64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            tol: 1e-3,
            max_iter: 1000,
            restarts: 16,
            seed: 0,
        }
    }
}

impl SolveOptions {
    fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(Error::Domain {
                what: "solver tolerance",
                value: self.tol,
            });
        }
        if self.restarts == 0 {
            return Err(Error::Domain {
                what: "number of restarts",
                value: 0.0,
            });
        }
        Ok(())
    }
}

/// Certified estimate: the true value lies in `[value - gap, value]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SolveResult {
    pub value: f64,
    pub gap: f64,
    /// Separable state attaining `value`.
    pub ensemble: ProductEnsemble,
    pub iterations: usize,
    pub converged: bool,
}

impl SolveResult {
    pub fn lower(&self) -> f64 {
        self.value - self.gap
    }
}

fn check_input(
    rho: &HermitianOperator,
    layout: &SubsystemLayout,
    opts: &SolveOptions,
) -> Result<()> {
    layout.check_dim(rho.dim())?;
    if layout.parties() < 2 {
        return Err(Error::TooFewParties {
            required: 2,
            found: layout.parties(),
        });
    }
    rho.check_density()?;
    opts.validate()
}

fn finish(out: fw::Outcome, layout: &SubsystemLayout) -> (f64, f64, ProductEnsemble, usize, bool) {
    let mut atoms: Vec<ProductAtom> = out
        .atoms
        .into_iter()
        .map(|a| a.into_product(1.0 - FLOOR))
        .collect();
    atoms.push(ProductAtom {
        weight: FLOOR,
        parties: layout
            .dims()
            .iter()
            .map(|&d| HermitianOperator::maximally_mixed(d))
            .collect(),
    });
    let ensemble = ProductEnsemble::from_parts_unchecked(layout.clone(), atoms);
    (out.value, out.gap, ensemble, out.iterations, out.converged)
}

/// Frank–Wolfe estimate of `E_R(rho)` with a duality-gap certificate.
///
/// The problem is first restricted to the tensor product of the marginal
/// supports, which contains an optimal separable state.
pub fn estimate_ree(
    rho: &HermitianOperator,
    layout: &SubsystemLayout,
    opts: &SolveOptions,
) -> Result<SolveResult> {
    check_input(rho, layout, opts)?;
    let supports = LocalSupports::of(rho, layout)?;
    let trivial = supports.is_trivial();
    let (work, work_layout) = if trivial {
        (rho.clone(), layout.clone())
    } else {
        (
            supports.compress(rho).normalized()?,
            supports.reduced.clone(),
        )
    };
    let init = Atom::mixed(1.0, marginals(&work, &work_layout)?);
    let out = Solver::new(&work, &work_layout, opts.restarts, opts.seed, None).run(
        vec![init],
        opts.tol,
        opts.max_iter,
    )?;
    let (value, gap, ensemble, iterations, converged) = finish(out, &work_layout);
    let ensemble = if trivial {
        ensemble
    } else {
        supports.expand_ensemble(&ensemble, layout)
    };
    Ok(SolveResult {
        value,
        gap,
        ensemble,
        iterations,
        converged,
    })
}

/// `E_R` restricted to separable states with `Tr H sigma <= energy`, where
/// `H = sum_s H_s` and each `H_s` is diagonal in the computational basis
/// (first `d_s` levels of the given spectrum). `energy = +inf` removes the
/// constraint.
pub fn energy_constrained_ree(
    rho: &HermitianOperator,
    layout: &SubsystemLayout,
    hamiltonians: &[HamiltonianSpec],
    energy: f64,
    opts: &SolveOptions,
) -> Result<SolveResult> {
    check_input(rho, layout, opts)?;
    if hamiltonians.len() != layout.parties() {
        return Err(Error::LengthMismatch {
            expected: layout.parties(),
            found: hamiltonians.len(),
        });
    }
    if energy.is_nan() {
        return Err(Error::Domain {
            what: "energy bound",
            value: energy,
        });
    }
    let mut local = Vec::with_capacity(layout.parties());
    for (h, &d) in hamiltonians.iter().zip(layout.dims()) {
        if h.dim() < d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: h.dim(),
            });
        }
        local.push(h.eigenvalues()[..d].to_vec());
    }
    let minimum: f64 = local.iter().map(|e| e[0]).sum();
    if energy < minimum - 1e-12 * minimum.abs().max(1.0) {
        return Err(Error::InfeasibleEnergy { energy, minimum });
    }
    if energy == f64::INFINITY {
        return estimate_ree(rho, layout, opts);
    }
    let mean: f64 = local
        .iter()
        .map(|e| e.iter().sum::<f64>() / e.len() as f64)
        .sum();
    let budget = ((energy - FLOOR * mean) / (1.0 - FLOOR)).max(minimum);

    let margs = marginals(rho, layout)?;
    let e_marg: f64 = margs
        .iter()
        .zip(&local)
        .map(|(m, e)| {
            e.iter()
                .enumerate()
                .map(|(k, x)| m.get(k, k).re * x)
                .sum::<f64>()
        })
        .sum();
    let constraint = Constraint { local, budget };
    let ground = constraint.ground();
    let init = if e_marg <= budget {
        vec![Atom::mixed(1.0, margs)]
    } else {
        let q = (e_marg - budget) / (e_marg - minimum);
        if q >= 1.0 {
            vec![Atom::pure(1.0, ground)]
        } else {
            vec![Atom::mixed(1.0 - q, margs), Atom::pure(q, ground)]
        }
    };
    let out = Solver::new(rho, layout, opts.restarts, opts.seed, Some(constraint)).run(
        init,
        opts.tol,
        opts.max_iter,
    )?;
    let (value, gap, ensemble, iterations, converged) = finish(out, layout);
    Ok(SolveResult {
        value,
        gap,
        ensemble,
        iterations,
        converged,
    })
}

/// `max(0, -H(A|B), -H(B|A))` for a bipartite state; `0` for more parties.
pub fn ree_lower_bounds(rho: &HermitianOperator, layout: &SubsystemLayout) -> Result<f64> {
    layout.check_dim(rho.dim())?;
    rho.check_density()?;
    if layout.parties() != 2 {
        return Ok(0.0);
    }
    let joint = von_neumann_entropy(rho)?;
    let m = marginals(rho, layout)?;
    let (ha, hb) = (von_neumann_entropy(&m[0])?, von_neumann_entropy(&m[1])?);
    Ok((ha - joint).max(hb - joint).max(0.0))
}

/// [`ree_lower_bounds`] across the cut `A_1..A_cut | A_{cut+1}..A_n`.
pub fn ree_lower_bounds_cut(
    rho: &HermitianOperator,
    layout: &SubsystemLayout,
    cut: usize,
) -> Result<f64> {
    ree_lower_bounds(rho, &layout.bipartition(cut)?)
}
