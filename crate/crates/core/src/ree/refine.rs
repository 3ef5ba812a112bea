//! Joint smooth refinement of pure product atoms (local vectors and weights).

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use super::fw::FLOOR;
use super::gradient::evaluate;
use super::lmo::join;
use crate::math;
use crate::matrix::CMatrix;
use crate::operator::HermitianOperator;

const MEMORY: usize = 8;

/// Pure product atoms `(weight, parts)`.
pub(crate) type PureAtoms = Vec<(f64, Vec<Vec<Complex64>>)>;

pub(crate) struct Refiner<'a> {
    rho: &'a HermitianOperator,
    neg_entropy: f64,
    dims: &'a [usize],
    digits: &'a [Vec<usize>],
}

impl<'a> Refiner<'a> {
    pub fn new(
        rho: &'a HermitianOperator,
        neg_entropy: f64,
        dims: &'a [usize],
        digits: &'a [Vec<usize>],
    ) -> Self {
        Refiner {
            rho,
            neg_entropy,
            dims,
            digits,
        }
    }

    fn stride(&self) -> usize {
        1 + 2 * self.dims.iter().sum::<usize>()
    }

    fn pack(&self, atoms: &PureAtoms) -> Vec<f64> {
        let mut x = Vec::with_capacity(atoms.len() * self.stride());
        for (w, parts) in atoms {
            x.push(math::ln(w.max(1e-300)));
            for p in parts {
                for z in p {
                    x.push(z.re);
                    x.push(z.im);
                }
            }
        }
        x
    }

    fn unpack(&self, x: &[f64]) -> PureAtoms {
        let stride = self.stride();
        let k = x.len() / stride;
        let top = (0..k)
            .map(|i| x[i * stride])
            .fold(f64::NEG_INFINITY, f64::max);
        let raw: Vec<f64> = (0..k).map(|i| math::exp(x[i * stride] - top)).collect();
        let total: f64 = raw.iter().sum();
        (0..k)
            .map(|i| {
                let mut off = i * stride + 1;
                let parts = self
                    .dims
                    .iter()
                    .map(|&d| {
                        let v: Vec<Complex64> = (0..d)
                            .map(|a| Complex64::new(x[off + 2 * a], x[off + 2 * a + 1]))
                            .collect();
                        off += 2 * d;
                        let n = math::sqrt(v.iter().map(|z| z.norm_sqr()).sum());
                        v.into_iter().map(|z| z / n).collect()
                    })
                    .collect();
                (raw[i] / total, parts)
            })
            .collect()
    }

    /// Value and gradient with respect to the packed parameters.
    fn value_grad(&self, x: &[f64]) -> (f64, Vec<f64>) {
        let atoms = self.unpack(x);
        let stride = self.stride();
        let d = self.rho.dim();
        let psis: Vec<Vec<Complex64>> = atoms.iter().map(|(_, p)| join(p)).collect();
        let mut sigma = CMatrix::zeros(d, d);
        for ((w, _), psi) in atoms.iter().zip(&psis) {
            sigma.add_outer(Complex64::new(w * (1.0 - FLOOR), 0.0), psi, psi);
        }
        {
            let (re, _) = sigma.parts_mut();
            for j in 0..d {
                re[j * d + j] += FLOOR / d as f64;
            }
        }
        let ev = evaluate(
            self.rho,
            self.neg_entropy,
            &HermitianOperator::from_hermitian_unchecked(sigma),
        );
        let c = 1.0 - FLOOR;
        let mut grad = vec![0.0; x.len()];
        let ys: Vec<Vec<Complex64>> = psis.iter().map(|p| ev.grad.matvec(p)).collect();
        let scores: Vec<f64> = psis
            .iter()
            .zip(&ys)
            .map(|(p, y)| c * p.iter().zip(y).map(|(a, b)| (a.conj() * b).re).sum::<f64>())
            .collect();
        let mean: f64 = atoms.iter().zip(&scores).map(|((w, _), s)| w * s).sum();
        for (i, (w, parts)) in atoms.iter().enumerate() {
            grad[i * stride] = w * (scores[i] - mean);
            let mut off = i * stride + 1;
            for (s, phi) in parts.iter().enumerate() {
                let ds = self.dims[s];
                // v = M_s phi: contraction of G psi against the other parties
                let mut v = vec![Complex64::new(0.0, 0.0); ds];
                for (xi, dig) in self.digits.iter().enumerate() {
                    let mut other = Complex64::new(1.0, 0.0);
                    for (t, &k) in dig.iter().enumerate() {
                        if t != s {
                            other *= parts[t][k];
                        }
                    }
                    v[dig[s]] += other.conj() * ys[i][xi];
                }
                let norm = math::sqrt(
                    (0..ds)
                        .map(|a| {
                            x[off + 2 * a] * x[off + 2 * a]
                                + x[off + 2 * a + 1] * x[off + 2 * a + 1]
                        })
                        .sum(),
                );
                let rq: Complex64 = phi.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
                for a in 0..ds {
                    let g = (v[a] - phi[a] * rq) * (2.0 * w * c / norm);
                    grad[off + 2 * a] = g.re;
                    grad[off + 2 * a + 1] = g.im;
                }
                off += 2 * ds;
            }
        }
        (ev.value, grad)
    }

    /// Limited-memory BFGS with Armijo backtracking; returns the refined
    /// atoms and their value.
    pub fn refine(&self, atoms: &PureAtoms, iterations: usize) -> (PureAtoms, f64) {
        let mut x = self.pack(atoms);
        let (mut f, mut g) = self.value_grad(&x);
        let mut hist: Vec<(Vec<f64>, Vec<f64>, f64)> = Vec::new();
        for _ in 0..iterations {
            let mut q = g.clone();
            let mut alpha = Vec::with_capacity(hist.len());
            for (s, y, rho) in hist.iter().rev() {
                let a = rho * dot(s, &q);
                axpy(&mut q, -a, y);
                alpha.push(a);
            }
            if let Some((s, y, _)) = hist.last() {
                let gamma = dot(s, y) / dot(y, y);
                q.iter_mut().for_each(|v| *v *= gamma);
            } else {
                let n = math::sqrt(dot(&g, &g)).max(1e-300);
                q.iter_mut().for_each(|v| *v *= 1e-2 / n);
            }
            for ((s, y, rho), a) in hist.iter().zip(alpha.iter().rev()) {
                let b = rho * dot(y, &q);
                axpy(&mut q, a - b, s);
            }
            let mut slope = -dot(&g, &q);
            if !(slope < 0.0) {
                hist.clear();
                q = g.clone();
                slope = -dot(&g, &q);
            }
            let mut t = 1.0;
            let mut accepted = None;
            for _ in 0..30 {
                let xn: Vec<f64> = x.iter().zip(&q).map(|(a, b)| a - t * b).collect();
                let (fnew, gnew) = self.value_grad(&xn);
                if fnew <= f + 1e-4 * t * slope {
                    accepted = Some((xn, fnew, gnew));
                    break;
                }
                t *= 0.5;
            }
            let Some((xn, fnew, gnew)) = accepted else {
                break;
            };
            let s: Vec<f64> = xn.iter().zip(&x).map(|(a, b)| a - b).collect();
            let y: Vec<f64> = gnew.iter().zip(&g).map(|(a, b)| a - b).collect();
            let sy = dot(&s, &y);
            if sy > 1e-300 {
                hist.push((s, y, 1.0 / sy));
                if hist.len() > MEMORY {
                    hist.remove(0);
                }
            }
            let done = f - fnew <= 1e-14 * f.abs().max(1e-3);
            x = xn;
            f = fnew;
            g = gnew;
            if done {
                break;
            }
        }
        (self.unpack(&x), f)
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn axpy(y: &mut [f64], a: f64, x: &[f64]) {
    for (u, v) in y.iter_mut().zip(x) {
        *u += a * v;
    }
}
