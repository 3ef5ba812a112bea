//! Pure states, Schmidt decompositions and purifications.

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::layout::SubsystemLayout;
use crate::math;
use crate::matrix::{kron_vec, vec_norm, CMatrix};
use crate::operator::HermitianOperator;

const NORM_TOL: f64 = 1e-10;

/// Unit vector in a finite-dimensional Hilbert space.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    amplitudes: Vec<Complex64>,
}

impl PureState {
    /// Accepts amplitudes whose norm is within `1e-10` of one and renormalizes
    /// them exactly.
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::ZeroDimension);
        }
        let n = vec_norm(&amplitudes);
        if !((n - 1.0).abs() <= NORM_TOL) {
            return Err(Error::NotNormalized { norm: n });
        }
        Ok(Self::from_normalized(amplitudes))
    }

    /// Normalizes arbitrary nonzero amplitudes.
    pub fn normalize(amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::ZeroDimension);
        }
        let n = vec_norm(&amplitudes);
        if !(n > 0.0) {
            return Err(Error::NotNormalized { norm: n });
        }
        Ok(PureState {
            amplitudes: amplitudes.into_iter().map(|z| z / n).collect(),
        })
    }

    pub(crate) fn from_normalized(amplitudes: Vec<Complex64>) -> Self {
        let n = vec_norm(&amplitudes);
        PureState {
            amplitudes: amplitudes.into_iter().map(|z| z / n).collect(),
        }
    }

    /// Computational basis vector `|index>`.
    pub fn basis(dim: usize, index: usize) -> Self {
        let mut a = alloc::vec![Complex64::new(0.0, 0.0); dim];
        a[index] = Complex64::new(1.0, 0.0);
        PureState { amplitudes: a }
    }

    /// Tensor product of local pure states in party order.
    pub fn product(parts: &[PureState]) -> Self {
        let mut amps = alloc::vec![Complex64::new(1.0, 0.0)];
        for p in parts {
            amps = kron_vec(&amps, &p.amplitudes);
        }
        PureState { amplitudes: amps }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    #[inline]
    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn density(&self) -> HermitianOperator {
        HermitianOperator::projector(&self.amplitudes)
    }

    /// Extracts the state vector of a rank-one density operator.
    pub fn from_density(rho: &HermitianOperator) -> Result<Self> {
        rho.check_density()?;
        let e = rho.eig();
        let purity = rho.inner(rho);
        if (e.values[0] - 1.0).abs() > 1e-8 {
            return Err(Error::NotPure { purity });
        }
        Ok(Self::from_normalized(e.vector(0)))
    }
}

/// `psi = sum_j c_j |u_j> ⊗ |v_j>` across a bipartite cut.
#[derive(Debug, Clone)]
pub struct SchmidtDecomposition {
    /// Nonincreasing, strictly above the numerical rank floor.
    pub coefficients: Vec<f64>,
    pub left_vectors: Vec<Vec<Complex64>>,
    pub right_vectors: Vec<Vec<Complex64>>,
}

impl SchmidtDecomposition {
    pub fn rank(&self) -> usize {
        self.coefficients.len()
    }

    pub fn reconstruct(&self) -> Vec<Complex64> {
        let dim = self.left_vectors.first().map_or(0, |u| u.len())
            * self.right_vectors.first().map_or(0, |v| v.len());
        let mut out = alloc::vec![Complex64::new(0.0, 0.0); dim];
        for ((c, u), v) in self
            .coefficients
            .iter()
            .zip(&self.left_vectors)
            .zip(&self.right_vectors)
        {
            for (o, z) in out.iter_mut().zip(kron_vec(u, v)) {
                *o += z * *c;
            }
        }
        out
    }
}

/// Schmidt decomposition of a vector on `left_dim ⊗ right_dim`.
pub fn schmidt_bipartite(
    amplitudes: &[Complex64],
    left_dim: usize,
) -> Result<SchmidtDecomposition> {
    if left_dim == 0 || amplitudes.len() % left_dim != 0 {
        return Err(Error::DimensionMismatch {
            expected: left_dim,
            found: amplitudes.len(),
        });
    }
    let right_dim = amplitudes.len() / left_dim;
    let m = CMatrix::from_fn(left_dim, right_dim, |i, k| amplitudes[i * right_dim + k]);
    let reduced = HermitianOperator::from_hermitian_unchecked(m.matmul_adjoint(&m));
    let e = reduced.eig();
    let floor = e.floor();

    let mut sd = SchmidtDecomposition {
        coefficients: Vec::new(),
        left_vectors: Vec::new(),
        right_vectors: Vec::new(),
    };
    for (j, &lambda) in e.values.iter().enumerate() {
        if !(lambda > floor) {
            break;
        }
        let c = math::sqrt(lambda);
        let u = e.vector(j);
        let v: Vec<Complex64> = (0..right_dim)
            .map(|k| {
                (0..left_dim)
                    .map(|i| u[i].conj() * m.get(i, k))
                    .sum::<Complex64>()
                    / c
            })
            .collect();
        sd.coefficients.push(c);
        sd.left_vectors.push(u);
        sd.right_vectors.push(v);
    }
    Ok(sd)
}

/// Schmidt decomposition across the cut between parties `1..cut` and
/// `cut+1..n` (so `1 <= cut < n`).
pub fn schmidt_decompose(
    psi: &PureState,
    layout: &SubsystemLayout,
    cut: usize,
) -> Result<SchmidtDecomposition> {
    layout.check_dim(psi.dim())?;
    let grouped = layout.bipartition(cut)?;
    schmidt_bipartite(psi.amplitudes(), grouped.dim(0))
}

/// Purification `sum_i sqrt(lambda_i) |i> ⊗ |i_R>` with a reference system of
/// dimension `rank(rho)` placed after the system.
pub fn purify(rho: &HermitianOperator) -> Result<PureState> {
    rho.check_density()?;
    let e = rho.eig();
    let rank = e.numerical_rank();
    let d = rho.dim();
    let mut amps = alloc::vec![Complex64::new(0.0, 0.0); d * rank];
    for j in 0..rank {
        let w = math::sqrt(e.values[j].max(0.0));
        for i in 0..d {
            amps[i * rank + j] = e.vectors.get(i, j) * w;
        }
    }
    Ok(PureState::from_normalized(amps))
}

/// Reference dimension of a purification produced by [`purify`].
pub fn purification_reference_dim(rho: &HermitianOperator, psi: &PureState) -> usize {
    psi.dim() / rho.dim()
}

/// `|v> ⊗ |w>` for raw amplitude vectors.
pub fn product_vector(parts: &[&[Complex64]]) -> Vec<Complex64> {
    let mut amps = alloc::vec![Complex64::new(1.0, 0.0)];
    for p in parts {
        amps = kron_vec(&amps, p);
    }
    amps
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::partial_trace;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn bell_schmidt_coefficients() {
        let s = 1.0 / math::sqrt(2.0);
        let psi = PureState::new(alloc::vec![c(s), c(0.0), c(0.0), c(s)]).unwrap();
        let l = SubsystemLayout::uniform(2, 2).unwrap();
        let sd = schmidt_decompose(&psi, &l, 1).unwrap();
        assert_eq!(sd.rank(), 2);
        for coeff in &sd.coefficients {
            assert!((coeff - s).abs() < 1e-15);
        }
        assert!(schmidt_decompose(&psi, &l, 2).is_err());
        assert!(schmidt_decompose(&psi, &l, 0).is_err());
    }

    #[test]
    fn product_has_single_coefficient() {
        let s = 1.0 / math::sqrt(2.0);
        let plus = PureState::new(alloc::vec![c(s), c(s)]).unwrap();
        let psi = PureState::product(&[PureState::basis(2, 0), plus]);
        let l = SubsystemLayout::uniform(2, 2).unwrap();
        let sd = schmidt_decompose(&psi, &l, 1).unwrap();
        assert_eq!(sd.rank(), 1);
        assert!((sd.coefficients[0] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn purify_pure_and_mixed() {
        let p = purify(&HermitianOperator::from_real_diagonal(&[1.0, 0.0])).unwrap();
        assert_eq!(p.dim(), 2);
        assert_eq!(p.amplitudes()[0], c(1.0));
        let mixed = HermitianOperator::maximally_mixed(2);
        let p = purify(&mixed).unwrap();
        assert_eq!(p.dim(), 4);
        let l = SubsystemLayout::new(alloc::vec![2, 2]).unwrap();
        let back = partial_trace(&p.density(), &l, &[0]).unwrap();
        assert!(back.sub(&mixed).matrix().max_abs() < 1e-15);
    }

    #[test]
    fn rejects_unnormalized() {
        assert!(matches!(
            PureState::new(alloc::vec![c(1.0), c(1.0)]),
            Err(Error::NotNormalized { .. })
        ));
    }
}
