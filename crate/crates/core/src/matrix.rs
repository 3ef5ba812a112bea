//! Dense complex matrices stored as split real/imaginary row-major arrays.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::math;

/// Dense complex matrix, row-major, real and imaginary parts kept in
/// separate arrays.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    re: Vec<f64>,
    im: Vec<f64>,
}

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        CMatrix {
            rows,
            cols,
            re: vec![0.0; rows * cols],
            im: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.re[i * n + i] = 1.0;
        }
        m
    }

    /// Builds a matrix from split parts. Panics if the lengths disagree with the shape.
    pub fn from_parts(rows: usize, cols: usize, re: Vec<f64>, im: Vec<f64>) -> Self {
        assert_eq!(re.len(), rows * cols, "real part has wrong length");
        assert_eq!(im.len(), rows * cols, "imaginary part has wrong length");
        CMatrix { rows, cols, re, im }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                let z = f(i, j);
                m.re[i * cols + j] = z.re;
                m.im[i * cols + j] = z.im;
            }
        }
        m
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        let mut m = Self::zeros(n, n);
        for (i, &d) in diag.iter().enumerate() {
            m.re[i * n + i] = d;
        }
        m
    }

    /// `|v><v|`
    pub fn outer(v: &[Complex64]) -> Self {
        Self::outer2(v, v)
    }

    /// `|u><v|`
    pub fn outer2(u: &[Complex64], v: &[Complex64]) -> Self {
        let mut m = Self::zeros(u.len(), v.len());
        m.add_outer(Complex64::new(1.0, 0.0), u, v);
        m
    }

    /// `self += alpha |u><v|`
    pub fn add_outer(&mut self, alpha: Complex64, u: &[Complex64], v: &[Complex64]) {
        debug_assert_eq!(u.len(), self.rows);
        debug_assert_eq!(v.len(), self.cols);
        for (i, ui) in u.iter().enumerate() {
            let a = alpha * ui;
            if a.re == 0.0 && a.im == 0.0 {
                continue;
            }
            let row = i * self.cols;
            for (j, vj) in v.iter().enumerate() {
                // a * conj(vj)
                self.re[row + j] += a.re * vj.re + a.im * vj.im;
                self.im[row + j] += a.im * vj.re - a.re * vj.im;
            }
        }
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn re(&self) -> &[f64] {
        &self.re
    }

    #[inline]
    pub fn im(&self) -> &[f64] {
        &self.im
    }

    #[inline]
    pub(crate) fn parts_mut(&mut self) -> (&mut [f64], &mut [f64]) {
        (&mut self.re, &mut self.im)
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        let k = i * self.cols + j;
        Complex64::new(self.re[k], self.im[k])
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, z: Complex64) {
        let k = i * self.cols + j;
        self.re[k] = z.re;
        self.im[k] = z.im;
    }

    pub fn column(&self, j: usize) -> Vec<Complex64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn row(&self, i: usize) -> Vec<Complex64> {
        (0..self.cols).map(|j| self.get(i, j)).collect()
    }

    pub fn adjoint(&self) -> Self {
        let mut m = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m.re[j * self.rows + i] = self.re[i * self.cols + j];
                m.im[j * self.rows + i] = -self.im[i * self.cols + j];
            }
        }
        m
    }

    pub fn transpose(&self) -> Self {
        let mut m = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m.re[j * self.rows + i] = self.re[i * self.cols + j];
                m.im[j * self.rows + i] = self.im[i * self.cols + j];
            }
        }
        m
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "inner dimensions differ");
        let (n, k_dim, m) = (self.rows, self.cols, other.cols);
        let mut out = Self::zeros(n, m);
        for i in 0..n {
            let orow = i * m;
            for k in 0..k_dim {
                let ar = self.re[i * k_dim + k];
                let ai = self.im[i * k_dim + k];
                if ar == 0.0 && ai == 0.0 {
                    continue;
                }
                let brow = k * m;
                let (bre, bim) = (&other.re[brow..brow + m], &other.im[brow..brow + m]);
                let (ore, oim) = (&mut out.re[orow..orow + m], &mut out.im[orow..orow + m]);
                for j in 0..m {
                    ore[j] += ar * bre[j] - ai * bim[j];
                    oim[j] += ar * bim[j] + ai * bre[j];
                }
            }
        }
        out
    }

    /// `self^dagger * other`
    pub fn adjoint_matmul(&self, other: &Self) -> Self {
        assert_eq!(self.rows, other.rows, "inner dimensions differ");
        let (n, k_dim, m) = (self.cols, self.rows, other.cols);
        let mut out = Self::zeros(n, m);
        for k in 0..k_dim {
            let brow = k * m;
            for i in 0..n {
                let ar = self.re[k * n + i];
                let ai = -self.im[k * n + i];
                if ar == 0.0 && ai == 0.0 {
                    continue;
                }
                let orow = i * m;
                for j in 0..m {
                    let (br, bi) = (other.re[brow + j], other.im[brow + j]);
                    out.re[orow + j] += ar * br - ai * bi;
                    out.im[orow + j] += ar * bi + ai * br;
                }
            }
        }
        out
    }

    /// `self * other^dagger`
    pub fn matmul_adjoint(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.cols, "inner dimensions differ");
        let (n, k_dim, m) = (self.rows, self.cols, other.rows);
        let mut out = Self::zeros(n, m);
        for i in 0..n {
            let arow = i * k_dim;
            for j in 0..m {
                let brow = j * k_dim;
                let (mut sr, mut si) = (0.0, 0.0);
                for k in 0..k_dim {
                    let (ar, ai) = (self.re[arow + k], self.im[arow + k]);
                    let (br, bi) = (other.re[brow + k], -other.im[brow + k]);
                    sr += ar * br - ai * bi;
                    si += ar * bi + ai * br;
                }
                out.re[i * m + j] = sr;
                out.im[i * m + j] = si;
            }
        }
        out
    }

    pub fn matvec(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(
            self.cols,
            v.len(),
            "vector length differs from column count"
        );
        (0..self.rows)
            .map(|i| {
                let row = i * self.cols;
                let (mut sr, mut si) = (0.0, 0.0);
                for (j, x) in v.iter().enumerate() {
                    let (ar, ai) = (self.re[row + j], self.im[row + j]);
                    sr += ar * x.re - ai * x.im;
                    si += ar * x.im + ai * x.re;
                }
                Complex64::new(sr, si)
            })
            .collect()
    }

    /// `<u|self|v>`
    pub fn sandwich(&self, u: &[Complex64], v: &[Complex64]) -> Complex64 {
        let mv = self.matvec(v);
        u.iter().zip(&mv).map(|(a, b)| a.conj() * b).sum()
    }

    pub fn kron(&self, other: &Self) -> Self {
        let (r1, c1, r2, c2) = (self.rows, self.cols, other.rows, other.cols);
        let mut out = Self::zeros(r1 * r2, c1 * c2);
        let oc = c1 * c2;
        for i1 in 0..r1 {
            for j1 in 0..c1 {
                let (ar, ai) = (self.re[i1 * c1 + j1], self.im[i1 * c1 + j1]);
                if ar == 0.0 && ai == 0.0 {
                    continue;
                }
                for i2 in 0..r2 {
                    let orow = (i1 * r2 + i2) * oc + j1 * c2;
                    for j2 in 0..c2 {
                        let (br, bi) = (other.re[i2 * c2 + j2], other.im[i2 * c2 + j2]);
                        out.re[orow + j2] = ar * br - ai * bi;
                        out.im[orow + j2] = ar * bi + ai * br;
                    }
                }
            }
        }
        out
    }

    pub fn trace(&self) -> Complex64 {
        let n = self.rows.min(self.cols);
        (0..n).map(|i| self.get(i, i)).sum()
    }

    /// `Tr(self * other)` without forming the product.
    pub fn trace_product(&self, other: &Self) -> Complex64 {
        assert_eq!(self.cols, other.rows);
        assert_eq!(self.rows, other.cols);
        let (mut sr, mut si) = (0.0, 0.0);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let (ar, ai) = (self.re[i * self.cols + k], self.im[i * self.cols + k]);
                let (br, bi) = (other.re[k * other.cols + i], other.im[k * other.cols + i]);
                sr += ar * br - ai * bi;
                si += ar * bi + ai * br;
            }
        }
        Complex64::new(sr, si)
    }

    pub fn scale(&self, s: f64) -> Self {
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            re: self.re.iter().map(|x| x * s).collect(),
            im: self.im.iter().map(|x| x * s).collect(),
        }
    }

    pub fn scale_mut(&mut self, s: f64) {
        self.re.iter_mut().for_each(|x| *x *= s);
        self.im.iter_mut().for_each(|x| *x *= s);
    }

    /// `self += alpha * other` for real `alpha`.
    pub fn axpy(&mut self, alpha: f64, other: &Self) {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        for (a, b) in self.re.iter_mut().zip(&other.re) {
            *a += alpha * b;
        }
        for (a, b) in self.im.iter_mut().zip(&other.im) {
            *a += alpha * b;
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut m = self.clone();
        m.axpy(1.0, other);
        m
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut m = self.clone();
        m.axpy(-1.0, other);
        m
    }

    pub fn frobenius_norm(&self) -> f64 {
        let s: f64 = self.re.iter().chain(&self.im).map(|x| x * x).sum();
        math::sqrt(s)
    }

    pub fn max_abs(&self) -> f64 {
        self.re
            .iter()
            .zip(&self.im)
            .map(|(a, b)| math::hypot(*a, *b))
            .fold(0.0, f64::max)
    }

    /// Largest `|M[j,k] - conj(M[k,j])|`; infinite for non-square input.
    pub fn hermitian_deviation(&self) -> f64 {
        if self.rows != self.cols {
            return f64::INFINITY;
        }
        let n = self.rows;
        let mut dev: f64 = 0.0;
        for j in 0..n {
            for k in j..n {
                let dr = self.re[j * n + k] - self.re[k * n + j];
                let di = self.im[j * n + k] + self.im[k * n + j];
                dev = dev.max(math::hypot(dr, di));
            }
        }
        dev
    }

    /// Replaces the matrix by `(M + M^dagger)/2`.
    pub(crate) fn hermitize(&mut self) {
        let n = self.rows;
        for j in 0..n {
            self.im[j * n + j] = 0.0;
            for k in (j + 1)..n {
                let r = 0.5 * (self.re[j * n + k] + self.re[k * n + j]);
                let i = 0.5 * (self.im[j * n + k] - self.im[k * n + j]);
                self.re[j * n + k] = r;
                self.re[k * n + j] = r;
                self.im[j * n + k] = i;
                self.im[k * n + j] = -i;
            }
        }
    }
}

pub(crate) fn vec_norm(v: &[Complex64]) -> f64 {
    math::sqrt(v.iter().map(|z| z.norm_sqr()).sum())
}

pub(crate) fn inner(u: &[Complex64], v: &[Complex64]) -> Complex64 {
    u.iter().zip(v).map(|(a, b)| a.conj() * b).sum()
}

pub(crate) fn kron_vec(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(a.len() * b.len());
    for x in a {
        for y in b {
            out.push(x * y);
        }
    }
    out
}
