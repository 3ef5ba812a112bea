use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use super::{estimate_ree, SolveOptions, SolveResult};
use crate::entropic::{
    h2, marginal_entropies, mutual_information_from_entropies, von_neumann_entropy,
};
use crate::error::Result;
use crate::layout::SubsystemLayout;
use crate::operator::{partial_trace, HermitianOperator};
use crate::random::random_density;

#[derive(Debug, Clone, PartialEq)]
pub struct AuditRecord {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    /// `rhs - lhs`.
    pub slack: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AuditReport {
    pub value: f64,
    pub gap: f64,
    pub tolerance: f64,
    pub records: Vec<AuditRecord>,
}

impl AuditReport {
    pub fn all_pass(&self) -> bool {
        self.records.iter().all(|r| r.pass)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AuditOptions {
    pub solver: SolveOptions,
    pub tolerance: f64,
    /// Mixing weight of the random partner state in the `RE-LAA` check.
    pub mix: f64,
}

impl Default for AuditOptions {
    fn default() -> Self {
        AuditOptions {
            solver: SolveOptions::default(),
            tolerance: 1e-9,
            mix: 0.5,
        }
    }
}

struct Builder {
    tolerance: f64,
    records: Vec<AuditRecord>,
}

impl Builder {
    fn push(&mut self, name: String, lhs: f64, rhs: f64) {
        let slack = rhs - lhs;
        self.records.push(AuditRecord {
            name,
            lhs,
            rhs,
            slack,
            pass: slack >= -self.tolerance,
        });
    }
}

/// Checks the entropic inequalities satisfied by `E_R` on `rho`.
///
/// Upper bounds on `E_R` are compared against the lower end of the solver
/// bracket and lower bounds against its upper end, so a record fails only
/// when the certified bracket refutes the inequality.
pub fn audit_state(
    rho: &HermitianOperator,
    layout: &SubsystemLayout,
    opts: &AuditOptions,
) -> Result<AuditReport> {
    let solve = |x: &HermitianOperator, l: &SubsystemLayout| estimate_ree(x, l, &opts.solver);
    let er = solve(rho, layout)?;
    let n = layout.parties();
    let h = marginal_entropies(rho, layout)?;
    let total: f64 = h.iter().sum();
    let mut b = Builder {
        tolerance: opts.tolerance,
        records: Vec::new(),
    };

    for omit in 0..n {
        b.push(
            format!("ER-UB[omit {}]", omit + 1),
            er.lower(),
            total - h[omit],
        );
    }
    b.push(
        String::from("ER-UB+"),
        er.lower(),
        (n - 1) as f64 / n as f64 * total,
    );

    let info = mutual_information_from_entropies(rho, layout)?;
    for omit in 0..n {
        b.push(
            format!("nMI-UB[omit {}]", omit + 1),
            info,
            2.0 * (total - h[omit]),
        );
    }

    if n == 2 {
        let joint = von_neumann_entropy(rho)?;
        b.push(String::from("LB-1[A|B]"), h[1] - joint, er.value);
        b.push(String::from("LB-1[B|A]"), h[0] - joint, er.value);
    }

    let purity = rho.matrix().trace_product(rho.matrix()).re;
    if n == 3 && (purity - 1.0).abs() <= 1e-9 {
        for (i, j) in [(0, 1), (1, 2), (0, 2)] {
            let pair = partial_trace(rho, layout, &[i, j])?;
            let pair_layout = layout.restrict(&[i, j]);
            let sub: SolveResult = solve(&pair, &pair_layout)?;
            let lhs = sub.lower() + von_neumann_entropy(&pair)?;
            b.push(format!("LB-2[{}{}]", i + 1, j + 1), lhs, er.value);
        }
    }

    let p = opts.mix;
    let partner = random_density(layout, layout.total_dim(), opts.solver.seed ^ 0x5eed)?;
    let mixed = rho.mix(p, &partner);
    let er_partner = solve(&partner, layout)?;
    let er_mixed = solve(&mixed, layout)?;
    b.push(
        String::from("RE-LAA"),
        p * er.lower() + (1.0 - p) * er_partner.lower(),
        er_mixed.value + h2(p),
    );

    Ok(AuditReport {
        value: er.value,
        gap: er.gap,
        tolerance: opts.tolerance,
        records: b.records,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::random_pure;
    use crate::separable::random_separable;
    use num_complex::Complex64;

    #[test]
    fn ghz_passes() {
        let layout = SubsystemLayout::uniform(2, 3).unwrap();
        let s = core::f64::consts::FRAC_1_SQRT_2;
        let mut v = alloc::vec![Complex64::new(0.0, 0.0); 8];
        v[0] = Complex64::new(s, 0.0);
        v[7] = Complex64::new(s, 0.0);
        let report = audit_state(
            &HermitianOperator::projector(&v),
            &layout,
            &AuditOptions::default(),
        )
        .unwrap();
        assert!(report.all_pass(), "{report:?}");
        assert!((report.value - core::f64::consts::LN_2).abs() < 1e-3);
        let ub = report
            .records
            .iter()
            .find(|r| r.name == "ER-UB[omit 3]")
            .unwrap();
        assert!((ub.rhs - 2.0 * core::f64::consts::LN_2).abs() < 1e-9);
        assert!(report.records.iter().any(|r| r.name.starts_with("LB-2")));
    }

    #[test]
    fn separable_and_random_pure_pass() {
        let two = SubsystemLayout::uniform(2, 2).unwrap();
        let sep = random_separable(&two, 3, 1).unwrap().assemble();
        let report = audit_state(&sep, &two, &AuditOptions::default()).unwrap();
        assert!(report.all_pass(), "{report:?}");
        let lb = report.records.iter().filter(|r| r.name.starts_with("LB-1"));
        for r in lb {
            assert!(r.lhs <= 1e-3);
        }
        let tri = SubsystemLayout::uniform(2, 3).unwrap();
        let psi = random_pure(&tri, 9).density();
        let report = audit_state(&psi, &tri, &AuditOptions::default()).unwrap();
        assert_eq!(
            report
                .records
                .iter()
                .filter(|r| r.name.starts_with("LB-2"))
                .count(),
            3
        );
        assert!(report.all_pass(), "{report:?}");
    }
}
