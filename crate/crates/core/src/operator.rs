//! Hermitian operators on small tensor-product spaces and their spectral
//! decomposition.

use alloc::vec::Vec;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::layout::SubsystemLayout;
use crate::matrix::CMatrix;

/// Eigenvalues below `RANK_FLOOR * max|eigenvalue|` are treated as zero
/// when deciding supports, ranks and Schmidt coefficients.
pub const RANK_FLOOR: f64 = 1e-12;

/// Tolerance on negative eigenvalues and trace deviation for density operators.
pub const DENSITY_TOL: f64 = 1e-10;

/// Dense complex Hermitian matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianOperator {
    m: CMatrix,
}

impl HermitianOperator {
    /// Validates Hermiticity (relative tolerance `1e-10`) and symmetrizes exactly.
    pub fn new(mut m: CMatrix) -> Result<Self> {
        if m.rows() != m.cols() {
            return Err(Error::DimensionMismatch {
                expected: m.rows(),
                found: m.cols(),
            });
        }
        if m.rows() == 0 {
            return Err(Error::ZeroDimension);
        }
        let dev = m.hermitian_deviation();
        if !(dev <= 1e-10 * m.max_abs().max(1.0)) {
            return Err(Error::NotHermitian { deviation: dev });
        }
        m.hermitize();
        Ok(HermitianOperator { m })
    }

    /// Wraps a matrix known to be Hermitian up to rounding.
    pub(crate) fn from_hermitian_unchecked(mut m: CMatrix) -> Self {
        m.hermitize();
        HermitianOperator { m }
    }

    pub fn zeros(dim: usize) -> Self {
        HermitianOperator {
            m: CMatrix::zeros(dim, dim),
        }
    }

    pub fn identity(dim: usize) -> Self {
        HermitianOperator {
            m: CMatrix::identity(dim),
        }
    }

    /// `I/d`
    pub fn maximally_mixed(dim: usize) -> Self {
        HermitianOperator {
            m: CMatrix::identity(dim).scale(1.0 / dim as f64),
        }
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        HermitianOperator {
            m: CMatrix::from_real_diagonal(diag),
        }
    }

    /// Rank-one projector `|v><v|` (no normalization is applied).
    pub fn projector(v: &[Complex64]) -> Self {
        Self::from_hermitian_unchecked(CMatrix::outer(v))
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.m.rows()
    }

    #[inline]
    pub fn matrix(&self) -> &CMatrix {
        &self.m
    }

    pub fn into_matrix(self) -> CMatrix {
        self.m
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.m.get(i, j)
    }

    pub fn trace(&self) -> f64 {
        self.m.trace().re
    }

    /// Real part of `Tr(self * other)` (exactly real for Hermitian pairs).
    pub fn inner(&self, other: &HermitianOperator) -> f64 {
        self.m.trace_product(&other.m).re
    }

    /// `<v|self|v>`
    pub fn expectation(&self, v: &[Complex64]) -> f64 {
        self.m.sandwich(v, v).re
    }

    pub fn scale(&self, s: f64) -> Self {
        HermitianOperator { m: self.m.scale(s) }
    }

    pub fn add(&self, other: &Self) -> Self {
        HermitianOperator {
            m: self.m.add(&other.m),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        HermitianOperator {
            m: self.m.sub(&other.m),
        }
    }

    /// `self += alpha * other`
    pub fn axpy(&mut self, alpha: f64, other: &Self) {
        self.m.axpy(alpha, &other.m);
    }

    /// `p * self + (1 - p) * other`
    pub fn mix(&self, p: f64, other: &Self) -> Self {
        let mut out = self.scale(p);
        out.axpy(1.0 - p, other);
        out
    }

    /// `U self U^dagger` for a square (typically unitary) `U`.
    pub fn conjugate(&self, u: &CMatrix) -> Self {
        Self::from_hermitian_unchecked(u.matmul(&self.m).matmul_adjoint(u))
    }

    /// `U^dagger self U`
    pub fn conjugate_adjoint(&self, u: &CMatrix) -> Self {
        Self::from_hermitian_unchecked(u.adjoint_matmul(&self.m).matmul(u))
    }

    /// Partial transpose on the given party.
    pub fn partial_transpose(&self, layout: &SubsystemLayout, party: usize) -> Result<Self> {
        layout.check_dim(self.dim())?;
        if party >= layout.parties() {
            return Err(Error::IndexOutOfRange {
                index: party,
                len: layout.parties(),
            });
        }
        let n = self.dim();
        let mut out = CMatrix::zeros(n, n);
        for i in 0..n {
            let mut di = layout.digits(i);
            for j in 0..n {
                let mut dj = layout.digits(j);
                core::mem::swap(&mut di[party], &mut dj[party]);
                let (ii, jj) = (layout.flat_index(&di), layout.flat_index(&dj));
                core::mem::swap(&mut di[party], &mut dj[party]);
                out.set(ii, jj, self.m.get(i, j));
            }
        }
        Ok(HermitianOperator { m: out })
    }

    pub fn eig(&self) -> Eigen {
        hermitian_eig(self)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eig().values.last().copied().unwrap_or(0.0)
    }

    /// Positive semidefinite up to `DENSITY_TOL` (relative to the trace).
    pub fn check_positive(&self) -> Result<()> {
        let tr = self.trace();
        let min = self.min_eigenvalue();
        if min < -DENSITY_TOL * tr.abs().max(1.0) {
            return Err(Error::NotDensity {
                min_eigenvalue: min,
                trace: tr,
            });
        }
        Ok(())
    }

    /// Positive semidefinite with unit trace.
    pub fn check_density(&self) -> Result<()> {
        let tr = self.trace();
        let min = self.min_eigenvalue();
        if min < -DENSITY_TOL || (tr - 1.0).abs() > DENSITY_TOL {
            return Err(Error::NotDensity {
                min_eigenvalue: min,
                trace: tr,
            });
        }
        Ok(())
    }

    /// Positive operator normalized to unit trace; fails on zero trace.
    pub fn normalized(&self) -> Result<Self> {
        let tr = self.trace();
        if !(tr > 0.0) {
            return Err(Error::EmptySupport);
        }
        Ok(self.scale(1.0 / tr))
    }
}

/// Spectral decomposition `M = V diag(values) V^dagger` with eigenvalues
/// nonincreasing.
#[derive(Debug, Clone)]
pub struct Eigen {
    pub values: Vec<f64>,
    /// Eigenvectors as columns.
    pub vectors: CMatrix,
}

impl Eigen {
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn vector(&self, j: usize) -> Vec<Complex64> {
        self.vectors.column(j)
    }

    /// Absolute threshold below which eigenvalues count as zero.
    pub fn floor(&self) -> f64 {
        let scale = self.values.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        RANK_FLOOR * scale
    }

    pub fn numerical_rank(&self) -> usize {
        let floor = self.floor();
        self.values.iter().filter(|&&v| v > floor).count()
    }

    /// `V diag(f(values)) V^dagger`
    pub fn apply(&self, f: impl FnMut(f64) -> f64) -> HermitianOperator {
        let diag: Vec<f64> = self.values.iter().copied().map(f).collect();
        self.with_diagonal(&diag)
    }

    /// `V diag(d) V^dagger`
    pub fn with_diagonal(&self, d: &[f64]) -> HermitianOperator {
        let n = self.dim();
        let scaled = CMatrix::from_fn(n, n, |i, j| self.vectors.get(i, j) * d[j]);
        HermitianOperator::from_hermitian_unchecked(scaled.matmul_adjoint(&self.vectors))
    }

    /// Projector onto the first `r` eigenvectors.
    pub fn top_projector(&self, r: usize) -> HermitianOperator {
        let d: Vec<f64> = (0..self.dim())
            .map(|j| if j < r { 1.0 } else { 0.0 })
            .collect();
        self.with_diagonal(&d)
    }
}

/// Hermitian eigensolver (Householder tridiagonalisation and implicit QR).
///
/// Eigenpairs are sorted by eigenvalue, descending; exact ties keep the
/// solver's column order.
pub fn hermitian_eig(op: &HermitianOperator) -> Eigen {
    let n = op.dim();
    let m = op.matrix();
    let e = SymmetricEigen::new(DMatrix::from_fn(n, n, |i, j| m.get(i, j)));
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| e.eigenvalues[y].total_cmp(&e.eigenvalues[x]));
    let values = order.iter().map(|&i| e.eigenvalues[i]).collect();
    let vectors = CMatrix::from_fn(n, n, |i, j| e.eigenvectors[(i, order[j])]);
    Eigen { values, vectors }
}

/// Kronecker product `a ⊗ b` with `a` on the slower-varying index.
pub fn tensor(a: &HermitianOperator, b: &HermitianOperator) -> HermitianOperator {
    HermitianOperator { m: a.m.kron(&b.m) }
}

/// Tensor product of a list of operators in order.
pub fn tensor_all<'a>(ops: impl IntoIterator<Item = &'a HermitianOperator>) -> HermitianOperator {
    let mut it = ops.into_iter();
    let first = it
        .next()
        .cloned()
        .unwrap_or_else(|| HermitianOperator::identity(1));
    it.fold(first, |acc, op| tensor(&acc, op))
}

/// Reduced operator on the parties in `keep` (any order; the result follows
/// ascending party order).
pub fn partial_trace(
    rho: &HermitianOperator,
    layout: &SubsystemLayout,
    keep: &[usize],
) -> Result<HermitianOperator> {
    layout.check_dim(rho.dim())?;
    let keep = layout.normalize_subset(keep)?;
    if keep.len() == layout.parties() {
        return Ok(rho.clone());
    }
    let traced = layout.complement(&keep);
    let kept_layout = layout.restrict(&keep);
    let traced_layout = layout.restrict(&traced);
    let (dk, dt) = (kept_layout.total_dim(), traced_layout.total_dim());

    // full[ki * dt + ti] = flat index of (kept digits ki, traced digits ti)
    let mut full = alloc::vec![0usize; dk * dt];
    let mut digits = alloc::vec![0usize; layout.parties()];
    for ki in 0..dk {
        let kd = kept_layout.digits(ki);
        for ti in 0..dt {
            let td = traced_layout.digits(ti);
            for (slot, &party) in kd.iter().zip(&keep) {
                digits[party] = *slot;
            }
            for (slot, &party) in td.iter().zip(&traced) {
                digits[party] = *slot;
            }
            full[ki * dt + ti] = layout.flat_index(&digits);
        }
    }

    let n = rho.dim();
    let (re, im) = (rho.m.re(), rho.m.im());
    let mut out = CMatrix::zeros(dk, dk);
    for i in 0..dk {
        for j in 0..dk {
            let (mut sr, mut si) = (0.0, 0.0);
            for t in 0..dt {
                let k = full[i * dt + t] * n + full[j * dt + t];
                sr += re[k];
                si += im[k];
            }
            out.set(i, j, Complex64::new(sr, si));
        }
    }
    Ok(HermitianOperator::from_hermitian_unchecked(out))
}

/// All single-party marginals `rho_{A_1}, ..., rho_{A_n}`.
pub fn marginals(
    rho: &HermitianOperator,
    layout: &SubsystemLayout,
) -> Result<Vec<HermitianOperator>> {
    (0..layout.parties())
        .map(|s| partial_trace(rho, layout, &[s]))
        .collect()
}

/// Half trace norm `||rho - sigma||_1 / 2`.
pub fn trace_distance(rho: &HermitianOperator, sigma: &HermitianOperator) -> Result<f64> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            found: sigma.dim(),
        });
    }
    let diff = rho.sub(sigma);
    Ok(0.5 * diff.eig().values.iter().map(|v| v.abs()).sum::<f64>())
}
