//! Seeded generators for random states, unitaries and ensembles.

use alloc::vec::Vec;

use num_complex::Complex64;
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::error::{Error, Result};
use crate::layout::SubsystemLayout;
use crate::math;
use crate::matrix::{vec_norm, CMatrix};
use crate::operator::HermitianOperator;
use crate::pure::PureState;

/// Deterministic sampler; every random object in the crate flows from one of these.
#[derive(Debug, Clone)]
pub struct Sampler {
    rng: ChaCha8Rng,
    spare: Option<f64>,
}

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Sampler {
            rng: ChaCha8Rng::seed_from_u64(seed),
            spare: None,
        }
    }

    /// Uniform in `[0, 1)` with 53 random bits.
    pub fn uniform(&mut self) -> f64 {
        (self.rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    /// Standard normal deviate (Box-Muller).
    pub fn normal(&mut self) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        let u1 = 1.0 - self.uniform();
        let u2 = self.uniform();
        let r = math::sqrt(-2.0 * math::ln(u1));
        let phi = 2.0 * core::f64::consts::PI * u2;
        self.spare = Some(r * math::sin(phi));
        r * math::cos(phi)
    }

    pub fn complex_normal(&mut self) -> Complex64 {
        let re = self.normal();
        let im = self.normal();
        Complex64::new(re, im)
    }

    /// Haar-random unit vector.
    pub fn unit_vector(&mut self, dim: usize) -> Vec<Complex64> {
        loop {
            let v: Vec<Complex64> = (0..dim).map(|_| self.complex_normal()).collect();
            let n = vec_norm(&v);
            if n > 1e-150 {
                return v.into_iter().map(|z| z / n).collect();
            }
        }
    }

    /// Induced-measure density operator `G G^dagger / Tr(G G^dagger)` with a
    /// `dim x rank` Ginibre matrix `G`.
    pub fn density(&mut self, dim: usize, rank: usize) -> Result<HermitianOperator> {
        if rank == 0 || rank > dim {
            return Err(Error::InvalidRank { rank, dim });
        }
        if rank == 1 {
            return Ok(HermitianOperator::projector(&self.unit_vector(dim)));
        }
        let g = CMatrix::from_fn(dim, rank, |_, _| self.complex_normal());
        let gg = HermitianOperator::from_hermitian_unchecked(g.matmul_adjoint(&g));
        let tr = gg.trace();
        Ok(gg.scale(1.0 / tr))
    }

    /// Haar-ish random unitary: orthonormalized Ginibre columns.
    pub fn unitary(&mut self, dim: usize) -> CMatrix {
        let mut cols: Vec<Vec<Complex64>> = Vec::with_capacity(dim);
        while cols.len() < dim {
            let mut v: Vec<Complex64> = (0..dim).map(|_| self.complex_normal()).collect();
            for _ in 0..2 {
                for c in &cols {
                    let proj: Complex64 = c.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
                    for (x, y) in v.iter_mut().zip(c) {
                        *x -= proj * y;
                    }
                }
            }
            let n = vec_norm(&v);
            if n > 1e-8 {
                cols.push(v.into_iter().map(|z| z / n).collect());
            }
        }
        CMatrix::from_fn(dim, dim, |i, j| cols[j][i])
    }
}

/// Random density operator of the given rank on the layout's total space.
pub fn random_density(
    layout: &SubsystemLayout,
    rank: usize,
    seed: u64,
) -> Result<HermitianOperator> {
    Sampler::new(seed).density(layout.total_dim(), rank)
}

/// Random pure state on the layout's total space.
pub fn random_pure(layout: &SubsystemLayout, seed: u64) -> PureState {
    let amps = Sampler::new(seed).unit_vector(layout.total_dim());
    PureState::from_normalized(amps)
}
