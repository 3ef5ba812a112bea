//! Hamiltonian spectra, Gibbs states, entropy caps under an energy
//! constraint, and the continuity bounds built from them.

mod bounds;
mod fa;

use alloc::collections::BinaryHeap;
use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::entropic::spectral_entropy;
use crate::error::{Error, Result};
use crate::math;
use crate::operator::HermitianOperator;

pub use bounds::{
    cb_energy, cb_energy_hat, cb_energy_iid, cb_finite_dim, cb_oscillator, optimize_t, BoundReport,
};
pub use fa::{fa_check, FaReport, HcondSample, SpectrumModel, Verdict, WeightModel};

/// Default cap on the number of levels of a sum (Minkowski) spectrum.
pub const SUM_SPECTRUM_CAP: usize = 100_000;

/// Multimode oscillator `sum_i hbar omega_i (a_i^* a_i + 1/2)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Oscillator {
    pub omegas: Vec<f64>,
    pub hbar: f64,
}

impl Oscillator {
    pub fn new(omegas: Vec<f64>, hbar: f64) -> Result<Self> {
        if omegas.is_empty() {
            return Err(Error::InvalidSpectrum("oscillator needs at least one mode"));
        }
        if let Some(&w) = omegas.iter().find(|&&w| !(w > 0.0 && w.is_finite())) {
            return Err(Error::Domain {
                what: "oscillator frequency",
                value: w,
            });
        }
        if !(hbar > 0.0 && hbar.is_finite()) {
            return Err(Error::Domain {
                what: "hbar",
                value: hbar,
            });
        }
        Ok(Oscillator { omegas, hbar })
    }

    pub fn modes(&self) -> usize {
        self.omegas.len()
    }

    /// Ground energy `E0 = (1/2) sum_i hbar omega_i`.
    pub fn ground_energy(&self) -> f64 {
        0.5 * self.hbar * self.omegas.iter().sum::<f64>()
    }

    /// Geometric mean `E* = (prod_i hbar omega_i)^(1/l)`.
    pub fn e_star(&self) -> f64 {
        let l = self.modes() as f64;
        let mean_ln = self
            .omegas
            .iter()
            .map(|w| math::ln(self.hbar * w))
            .sum::<f64>()
            / l;
        math::exp(mean_ln)
    }

    /// `F_{l,omega}(E) = l ln((E + E0) / (l E*)) + l`.
    pub fn f(&self, e: f64) -> f64 {
        let l = self.modes() as f64;
        l * math::ln((e + self.ground_energy()) / (l * self.e_star())) + l
    }

    /// `Fbar_{l,omega}(E) = F_{l,omega}(E + E0)`.
    pub fn f_bar(&self, e: f64) -> f64 {
        self.f(e + self.ground_energy())
    }
}

/// Finite, nondecreasing Hamiltonian spectrum `g_1 <= g_2 <= ...`.
#[derive(Debug, Clone, PartialEq)]
pub struct HamiltonianSpec {
    eigenvalues: Vec<f64>,
    oscillator: Option<Oscillator>,
}

impl HamiltonianSpec {
    pub fn new(eigenvalues: Vec<f64>) -> Result<Self> {
        if eigenvalues.is_empty() {
            return Err(Error::InvalidSpectrum("empty spectrum"));
        }
        if eigenvalues.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidSpectrum("non-finite eigenvalue"));
        }
        if eigenvalues.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::InvalidSpectrum("eigenvalues must be nondecreasing"));
        }
        Ok(HamiltonianSpec {
            eigenvalues,
            oscillator: None,
        })
    }

    /// Lowest `levels` eigenvalues of a multimode oscillator.
    pub fn oscillator(osc: Oscillator, levels: usize) -> Result<Self> {
        if levels == 0 {
            return Err(Error::ZeroDimension);
        }
        let e0 = osc.ground_energy();
        let mut spectrum = alloc::vec![e0];
        for &w in &osc.omegas {
            let quantum = osc.hbar * w;
            let ladder: Vec<f64> = (0..levels).map(|k| k as f64 * quantum).collect();
            spectrum = minkowski_lowest(&spectrum, &ladder, levels);
        }
        Ok(HamiltonianSpec {
            eigenvalues: spectrum,
            oscillator: Some(osc),
        })
    }

    /// Spectrum of `H_1 ⊗ I ⊗ ... + ... + I ⊗ ... ⊗ H_m`, keeping the lowest
    /// `cap` levels. The flag reports whether levels were dropped.
    pub fn sum(parts: &[HamiltonianSpec], cap: usize) -> Result<(HamiltonianSpec, bool)> {
        if parts.is_empty() {
            return Err(Error::InvalidSpectrum("empty list of Hamiltonians"));
        }
        let mut spectrum = alloc::vec![0.0];
        let mut truncated = false;
        for p in parts {
            let full = spectrum.len().saturating_mul(p.dim());
            truncated |= full > cap;
            spectrum = minkowski_lowest(&spectrum, &p.eigenvalues, cap);
        }
        let osc = match parts {
            [only] => only.oscillator.clone(),
            _ => None,
        };
        Ok((
            HamiltonianSpec {
                eigenvalues: spectrum,
                oscillator: osc,
            },
            truncated,
        ))
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn oscillator_descriptor(&self) -> Option<&Oscillator> {
        self.oscillator.as_ref()
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn ground_energy(&self) -> f64 {
        self.eigenvalues[0]
    }

    /// Mean energy of the maximally mixed state on the truncation.
    pub fn uniform_mean(&self) -> f64 {
        self.eigenvalues.iter().sum::<f64>() / self.dim() as f64
    }

    /// Diagonal operator in the computational basis.
    pub fn operator(&self) -> HermitianOperator {
        HermitianOperator::from_real_diagonal(&self.eigenvalues)
    }
}

#[derive(Clone, Copy)]
struct Candidate {
    value: f64,
    i: usize,
    j: usize,
}

impl PartialEq for Candidate {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Candidate {}
impl PartialOrd for Candidate {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Candidate {
    // reversed: BinaryHeap is a max-heap
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .value
            .total_cmp(&self.value)
            .then_with(|| other.i.cmp(&self.i))
            .then_with(|| other.j.cmp(&self.j))
    }
}

/// Smallest `cap` pairwise sums of two sorted lists, sorted.
fn minkowski_lowest(a: &[f64], b: &[f64], cap: usize) -> Vec<f64> {
    let total = a.len().saturating_mul(b.len());
    let want = total.min(cap);
    let mut out = Vec::with_capacity(want);
    let mut heap = BinaryHeap::new();
    for i in 0..a.len().min(want) {
        heap.push(Candidate {
            value: a[i] + b[0],
            i,
            j: 0,
        });
    }
    while out.len() < want {
        let Some(c) = heap.pop() else { break };
        out.push(c.value);
        if c.j + 1 < b.len() {
            heap.push(Candidate {
                value: a[c.i] + b[c.j + 1],
                i: c.i,
                j: c.j + 1,
            });
        }
    }
    out
}

/// Gibbs state `exp(-beta G) / Tr exp(-beta G)` with mean energy `E`.
#[derive(Debug, Clone, PartialEq)]
pub struct GibbsState {
    pub weights: Vec<f64>,
    pub beta: f64,
    /// `E` exceeded the uniform mean, so the state is maximally mixed.
    pub clamped: bool,
}

impl GibbsState {
    pub fn entropy(&self) -> f64 {
        spectral_entropy(&self.weights)
    }

    pub fn mean_energy(&self, h: &HamiltonianSpec) -> f64 {
        self.weights
            .iter()
            .zip(h.eigenvalues())
            .map(|(p, g)| p * g)
            .sum()
    }
}

fn gibbs_weights(shifted: &[f64], beta: f64) -> Vec<f64> {
    let mut w: Vec<f64> = shifted.iter().map(|&g| math::exp(-beta * g)).collect();
    let z: f64 = w.iter().sum();
    for x in &mut w {
        *x /= z;
    }
    w
}

fn shifted_mean(shifted: &[f64], beta: f64) -> f64 {
    let mut z = 0.0;
    let mut m = 0.0;
    for &g in shifted {
        let p = math::exp(-beta * g);
        z += p;
        m += p * g;
    }
    m / z
}

/// Solves `Tr G exp(-beta G) = E Tr exp(-beta G)` for `beta` by bisection.
pub fn gibbs_state(h: &HamiltonianSpec, energy: f64) -> Result<GibbsState> {
    let e0 = h.ground_energy();
    if !(energy > e0) {
        return Err(Error::Domain {
            what: "energy at or below the ground energy",
            value: energy,
        });
    }
    let n = h.dim();
    if energy >= h.uniform_mean() {
        return Ok(GibbsState {
            weights: alloc::vec![1.0 / n as f64; n],
            beta: 0.0,
            clamped: true,
        });
    }
    let shifted: Vec<f64> = h.eigenvalues().iter().map(|g| g - e0).collect();
    let target = energy - e0;
    let width = shifted[n - 1].max(f64::MIN_POSITIVE);

    let mut lo = 0.0;
    let mut hi = 50.0 / width;
    while shifted_mean(&shifted, hi) > target {
        lo = hi;
        hi *= 2.0;
        if !hi.is_finite() {
            break;
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if shifted_mean(&shifted, mid) > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let beta = 0.5 * (lo + hi);
    Ok(GibbsState {
        weights: gibbs_weights(&shifted, beta),
        beta,
        clamped: false,
    })
}

/// `F_H(E) = sup { H(rho) : Tr H rho <= E }`, the Gibbs entropy at `E`.
///
/// At `E = E0` the value is the log-multiplicity of the ground level.
pub fn max_entropy_f(h: &HamiltonianSpec, energy: f64) -> Result<f64> {
    let e0 = h.ground_energy();
    if energy < e0 || energy.is_nan() {
        return Err(Error::Domain {
            what: "energy below the ground energy",
            value: energy,
        });
    }
    if energy == e0 {
        let mult = h.eigenvalues().iter().take_while(|&&g| g == e0).count();
        return Ok(math::ln(mult as f64));
    }
    Ok(gibbs_state(h, energy)?.entropy())
}

/// `Fbar_H(E) = F_H(E + E0)` for `E >= 0`.
pub fn max_entropy_f_bar(h: &HamiltonianSpec, energy: f64) -> Result<f64> {
    if energy < 0.0 || energy.is_nan() {
        return Err(Error::Domain {
            what: "shifted energy",
            value: energy,
        });
    }
    max_entropy_f(h, energy + h.ground_energy())
}

/// Variant selector for [`oscillator_f`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OscillatorVariant {
    F,
    FBar,
}

/// Closed-form oscillator entropy caps `F_{l,omega}` and `Fbar_{l,omega}`.
pub fn oscillator_f(
    omegas: &[f64],
    hbar: f64,
    energy: f64,
    variant: OscillatorVariant,
) -> Result<f64> {
    let osc = Oscillator::new(omegas.to_vec(), hbar)?;
    if !(energy >= 0.0) {
        return Err(Error::Domain {
            what: "energy",
            value: energy,
        });
    }
    Ok(match variant {
        OscillatorVariant::F => osc.f(energy),
        OscillatorVariant::FBar => osc.f_bar(energy),
    })
}

/// An upper bound `Fhat >= Fbar` used in the continuity bounds.
#[derive(Debug, Clone, PartialEq)]
pub enum FFunction {
    /// `Fbar_H` of a (truncated) spectrum, computed through the Gibbs state.
    NumericGibbs(HamiltonianSpec),
    /// `Fbar_{l,omega}` of an oscillator.
    OscillatorClosedForm(Oscillator),
}

impl FFunction {
    /// Evaluates the function at a shifted energy `E >= 0`.
    pub fn eval(&self, energy: f64) -> Result<f64> {
        match self {
            FFunction::NumericGibbs(h) => max_entropy_f_bar(h, energy),
            FFunction::OscillatorClosedForm(o) => {
                if !(energy >= 0.0) {
                    return Err(Error::Domain {
                        what: "shifted energy",
                        value: energy,
                    });
                }
                Ok(o.f_bar(energy))
            }
        }
    }

    /// Ground energy of the underlying single-party Hamiltonian.
    pub fn ground_energy(&self) -> f64 {
        match self {
            FFunction::NumericGibbs(h) => h.ground_energy(),
            FFunction::OscillatorClosedForm(o) => o.ground_energy(),
        }
    }

    /// Checks monotonicity, concavity and `F(E)/sqrt(E)` nonincreasing on a grid.
    pub fn check_conditions(&self, grid: &[f64]) -> Result<FConditions> {
        let values: Vec<f64> = grid.iter().map(|&e| self.eval(e)).collect::<Result<_>>()?;
        let tol = 1e-9;
        let nondecreasing = values.windows(2).all(|w| w[1] >= w[0] - tol);
        let concave = grid.windows(3).zip(values.windows(3)).all(|(x, y)| {
            let s1 = (y[1] - y[0]) / (x[1] - x[0]);
            let s2 = (y[2] - y[1]) / (x[2] - x[1]);
            s2 <= s1 + 1e-8
        });
        let sqrt_ratio_nonincreasing = grid
            .iter()
            .zip(&values)
            .filter(|(&e, _)| e > 0.0)
            .map(|(&e, &v)| v / math::sqrt(e))
            .collect::<Vec<_>>()
            .windows(2)
            .all(|w| w[1] <= w[0] + tol);
        Ok(FConditions {
            nondecreasing,
            concave,
            sqrt_ratio_nonincreasing,
        })
    }
}

/// Outcome of [`FFunction::check_conditions`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FConditions {
    pub nondecreasing: bool,
    pub concave: bool,
    pub sqrt_ratio_nonincreasing: bool,
}

#[cfg(test)]
mod tests {
    use super::*;

    const LN2: f64 = core::f64::consts::LN_2;

    fn qubit() -> HamiltonianSpec {
        HamiltonianSpec::new(alloc::vec![0.0, 1.0]).unwrap()
    }

    fn bosonic(n: f64) -> f64 {
        (n + 1.0) * math::ln(n + 1.0) - n * math::ln(n)
    }

    #[test]
    fn gibbs_qubit() {
        let g = gibbs_state(&qubit(), 0.5).unwrap();
        assert_eq!(g.beta, 0.0);
        assert!((g.weights[0] - 0.5).abs() < 1e-15);
        let g = gibbs_state(&qubit(), 0.25).unwrap();
        assert!((g.beta - math::ln(3.0)).abs() < 1e-9);
        assert!((g.weights[0] - 0.75).abs() < 1e-12);
        assert!((g.mean_energy(&qubit()) - 0.25).abs() < 1e-12);
        let g = gibbs_state(&qubit(), 1e-9).unwrap();
        assert!(g.entropy() < 1e-6);
        assert!(gibbs_state(&qubit(), 0.0).is_err());
    }

    #[test]
    fn residual_on_oscillator() {
        let h = HamiltonianSpec::oscillator(Oscillator::new(alloc::vec![1.0], 1.0).unwrap(), 60)
            .unwrap();
        for e in [0.51, 0.8, 1.5, 2.5, 7.0] {
            let g = gibbs_state(&h, e).unwrap();
            assert!((g.mean_energy(&h) - e).abs() < 1e-9, "{e}");
        }
    }

    #[test]
    fn oscillator_matches_bosonic_entropy() {
        let osc = Oscillator::new(alloc::vec![1.0], 1.0).unwrap();
        let h = HamiltonianSpec::oscillator(osc.clone(), 60).unwrap();
        assert_eq!(h.dim(), 60);
        assert_eq!(h.eigenvalues()[3], 3.5);
        let f = max_entropy_f(&h, 1.5).unwrap();
        assert!((f - 2.0 * LN2).abs() < 1e-6);
        assert!((f - bosonic(1.0)).abs() < 1e-6);
        for e in [1.0, 2.0, 5.0, 10.0] {
            assert!(max_entropy_f(&h, e).unwrap() <= osc.f(e) + 1e-12);
        }
    }

    #[test]
    fn oscillator_closed_forms() {
        let f = oscillator_f(&[1.0], 1.0, 1.5, OscillatorVariant::F).unwrap();
        assert!((f - (LN2 + 1.0)).abs() < 1e-15);
        let fb = oscillator_f(&[1.0], 1.0, 1.5, OscillatorVariant::FBar).unwrap();
        assert!((fb - (math::ln(2.5) + 1.0)).abs() < 1e-15);
        assert!(oscillator_f(&[0.0], 1.0, 1.5, OscillatorVariant::F).is_err());
        let osc = Oscillator::new(alloc::vec![1.0, 4.0], 1.0).unwrap();
        assert_eq!(osc.ground_energy(), 2.5);
        assert!((osc.e_star() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn qubit_cap() {
        for e in [0.5, 0.7, 3.0] {
            assert!((max_entropy_f(&qubit(), e).unwrap() - LN2).abs() < 1e-15);
        }
        assert_eq!(max_entropy_f(&qubit(), 0.0).unwrap(), 0.0);
    }

    #[test]
    fn sum_spectrum() {
        let (s, truncated) = HamiltonianSpec::sum(&[qubit(), qubit()], 100).unwrap();
        assert_eq!(s.eigenvalues(), &[0.0, 1.0, 1.0, 2.0]);
        assert!(!truncated);
        let (s, truncated) = HamiltonianSpec::sum(&[qubit(), qubit(), qubit()], 5).unwrap();
        assert_eq!(s.eigenvalues(), &[0.0, 1.0, 1.0, 1.0, 2.0]);
        assert!(truncated);
        let two_mode =
            HamiltonianSpec::oscillator(Oscillator::new(alloc::vec![1.0, 1.0], 1.0).unwrap(), 6)
                .unwrap();
        assert_eq!(two_mode.eigenvalues(), &[1.0, 2.0, 2.0, 3.0, 3.0, 3.0]);
    }

    #[test]
    fn f_conditions() {
        let grid: Vec<f64> = (0..200)
            .map(|k| 0.1 * math::powf(1e4, k as f64 / 199.0))
            .collect();
        let f = FFunction::OscillatorClosedForm(Oscillator::new(alloc::vec![1.0], 1.0).unwrap());
        let c = f.check_conditions(&grid).unwrap();
        assert!(c.nondecreasing && c.concave && c.sqrt_ratio_nonincreasing);
        let h = HamiltonianSpec::oscillator(Oscillator::new(alloc::vec![1.0], 1.0).unwrap(), 200)
            .unwrap();
        let grid: Vec<f64> = (1..60).map(|k| 0.1 * k as f64).collect();
        let c = FFunction::NumericGibbs(h).check_conditions(&grid).unwrap();
        assert!(c.nondecreasing && c.concave);
    }
}
