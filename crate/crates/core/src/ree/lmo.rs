use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::layout::SubsystemLayout;
use crate::matrix::CMatrix;
use crate::operator::HermitianOperator;
use crate::pure::{product_vector, PureState};
use crate::random::Sampler;

const MAX_SWEEPS: usize = 200;
const SWEEP_TOL: f64 = 1e-12;

/// Minimiser of `<phi|G|phi>` over product vectors found by the oracle.
#[derive(Debug, Clone)]
pub struct ProductLmo {
    pub parts: Vec<Vec<Complex64>>,
    pub value: f64,
}

impl ProductLmo {
    pub fn state(&self) -> PureState {
        PureState::product(
            &self
                .parts
                .iter()
                .map(|p| PureState::normalize(p.clone()).unwrap())
                .collect::<Vec<_>>(),
        )
    }

    pub fn vector(&self) -> Vec<Complex64> {
        join(&self.parts)
    }
}

pub(crate) fn join(parts: &[Vec<Complex64>]) -> Vec<Complex64> {
    let refs: Vec<&[Complex64]> = parts.iter().map(|p| p.as_slice()).collect();
    product_vector(&refs)
}

/// Heuristic minimisation of `<phi|G|phi>` over product vectors by
/// alternating local minimal eigenvectors from `restarts` random starts.
pub fn lmo_product(
    g: &HermitianOperator,
    layout: &SubsystemLayout,
    restarts: usize,
    seed: u64,
) -> Result<ProductLmo> {
    layout.check_dim(g.dim())?;
    if restarts == 0 {
        return Err(Error::Domain {
            what: "number of restarts",
            value: 0.0,
        });
    }
    let mut oracle = Oracle::new(layout);
    let mut sampler = Sampler::new(seed);
    Ok(oracle.minimize(g.matrix(), restarts, &mut sampler, &[]))
}

/// Reusable scratch state: the digit table of the layout.
pub(crate) struct Oracle {
    pub dims: Vec<usize>,
    pub digits: Vec<Vec<usize>>,
}

impl Oracle {
    pub fn new(layout: &SubsystemLayout) -> Self {
        let digits = (0..layout.total_dim()).map(|x| layout.digits(x)).collect();
        Oracle {
            dims: layout.dims().to_vec(),
            digits,
        }
    }

    pub fn minimize(
        &mut self,
        g: &CMatrix,
        restarts: usize,
        sampler: &mut Sampler,
        warm: &[Vec<Vec<Complex64>>],
    ) -> ProductLmo {
        let mut best: Option<ProductLmo> = None;
        let starts = warm
            .iter()
            .cloned()
            .map(Some)
            .chain((0..restarts).map(|_| None));
        for start in starts {
            let parts = start
                .unwrap_or_else(|| self.dims.iter().map(|&d| sampler.unit_vector(d)).collect());
            let run = self.descend(g, parts);
            if best.as_ref().is_none_or(|b| run.value < b.value) {
                best = Some(run);
            }
        }
        best.expect("at least one start")
    }

    fn descend(&self, g: &CMatrix, mut parts: Vec<Vec<Complex64>>) -> ProductLmo {
        let mut value = f64::INFINITY;
        for _ in 0..MAX_SWEEPS {
            let previous = value;
            for s in 0..self.dims.len() {
                let m = self.contraction(g, &parts, s);
                let e = m.eig();
                let last = e.dim() - 1;
                parts[s] = e.vector(last);
                value = e.values[last];
            }
            if (previous - value).abs() <= SWEEP_TOL * value.abs().max(1.0) {
                break;
            }
        }
        let value = g.sandwich(&join(&parts), &join(&parts)).re;
        ProductLmo { parts, value }
    }

    /// `M_ab = sum_{x_s = a, y_s = b} conj(w_x) G_xy w_y` with `w` the product
    /// of the other parties' amplitudes.
    fn contraction(&self, g: &CMatrix, parts: &[Vec<Complex64>], s: usize) -> HermitianOperator {
        let ds = self.dims[s];
        let w: Vec<Complex64> = self
            .digits
            .iter()
            .map(|dig| {
                dig.iter()
                    .enumerate()
                    .filter(|&(t, _)| t != s)
                    .fold(Complex64::new(1.0, 0.0), |acc, (t, &k)| acc * parts[t][k])
            })
            .collect();
        let total = w.len();
        let (re, im) = (g.re(), g.im());
        let mut m = vec![Complex64::new(0.0, 0.0); ds * ds];
        let mut bucket = vec![Complex64::new(0.0, 0.0); ds];
        for x in 0..total {
            bucket
                .iter_mut()
                .for_each(|b| *b = Complex64::new(0.0, 0.0));
            let row = x * total;
            for y in 0..total {
                let gxy = Complex64::new(re[row + y], im[row + y]);
                bucket[self.digits[y][s]] += gxy * w[y];
            }
            let a = self.digits[x][s];
            let cw = w[x].conj();
            for (b, v) in bucket.iter().enumerate() {
                m[a * ds + b] += cw * v;
            }
        }
        let mut out = CMatrix::from_fn(ds, ds, |a, b| m[a * ds + b]);
        out.hermitize();
        HermitianOperator::from_hermitian_unchecked(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bell_projector() -> HermitianOperator {
        let s = core::f64::consts::FRAC_1_SQRT_2;
        let v = [s, 0.0, 0.0, s].map(|x| Complex64::new(x, 0.0));
        HermitianOperator::projector(&v)
    }

    #[test]
    fn bell_overlap_is_one_half() {
        let layout = SubsystemLayout::uniform(2, 2).unwrap();
        let g = bell_projector().scale(-1.0);
        let r = lmo_product(&g, &layout, 16, 3).unwrap();
        assert!((r.value + 0.5).abs() < 1e-10, "{}", r.value);
        let v = r.vector();
        assert!((g.expectation(&v) - r.value).abs() < 1e-12);
    }

    #[test]
    fn diagonal_picks_minimal_basis_state() {
        let layout = SubsystemLayout::new(vec![2, 3]).unwrap();
        let g = HermitianOperator::from_real_diagonal(&[3.0, 1.0, 2.0, 5.0, -1.0, 4.0]);
        let r = lmo_product(&g, &layout, 4, 1).unwrap();
        assert!((r.value + 1.0).abs() < 1e-12);
        assert!((r.parts[0][1].norm() - 1.0).abs() < 1e-9);
        assert!((r.parts[1][1].norm() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn never_below_the_global_minimum() {
        let layout = SubsystemLayout::uniform(2, 3).unwrap();
        let mut s = Sampler::new(5);
        for seed in 0..5 {
            let g = s.density(8, 8).unwrap().sub(&s.density(8, 8).unwrap());
            let r = lmo_product(&g, &layout, 8, seed).unwrap();
            assert!(r.value >= g.min_eigenvalue() - 1e-12);
            assert!((r.state().density().inner(&g) - r.value).abs() < 1e-10);
        }
    }

    #[test]
    fn rejects_bad_input() {
        let layout = SubsystemLayout::uniform(2, 2).unwrap();
        assert!(lmo_product(&HermitianOperator::identity(3), &layout, 4, 0).is_err());
        assert!(lmo_product(&HermitianOperator::identity(4), &layout, 0, 0).is_err());
    }
}
