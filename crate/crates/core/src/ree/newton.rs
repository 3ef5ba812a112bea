//! Newton steps on the weights of the active atoms.

use alloc::vec;
use alloc::vec::Vec;

use super::gradient::{log_second_difference, Evaluation};
use crate::matrix::CMatrix;

/// Hessian of `w -> -Tr rho ln(sum_i w_i A_i)` (before the floor scaling),
/// from second divided differences of `ln` in the eigenbasis of `sigma`.
pub(crate) fn weight_hessian(ev: &Evaluation, atoms: &[&CMatrix]) -> Vec<f64> {
    let d = ev.mu.len();
    let k = atoms.len();
    let mut f2 = vec![0.0; d * d * d];
    for a in 0..d {
        for b in a..d {
            for c in b..d {
                let v = log_second_difference(ev.mu[a], ev.mu[b], ev.mu[c]);
                for (x, y, z) in [
                    (a, b, c),
                    (a, c, b),
                    (b, a, c),
                    (b, c, a),
                    (c, a, b),
                    (c, b, a),
                ] {
                    f2[(x * d + y) * d + z] = v;
                }
            }
        }
    }
    let tilde: Vec<CMatrix> = atoms
        .iter()
        .map(|m| ev.u.adjoint_matmul(m).matmul(&ev.u))
        .collect();
    let (rr, ri) = (ev.rho_tilde.re(), ev.rho_tilde.im());
    let mut h = vec![0.0; k * k];
    let mut wr = vec![0.0; d * d];
    let mut wi = vec![0.0; d * d];
    for (j, y) in tilde.iter().enumerate() {
        let (yr, yi) = (y.re(), y.im());
        // W_ab = sum_c f2(a,b,c) (rho_ca Y_bc + rho_bc Y_ca)
        for a in 0..d {
            for b in 0..d {
                let (mut sr, mut si) = (0.0, 0.0);
                let base = (a * d + b) * d;
                for c in 0..d {
                    let f = f2[base + c];
                    let (p, q) = (rr[c * d + a], ri[c * d + a]);
                    let (s, t) = (yr[b * d + c], yi[b * d + c]);
                    let (p2, q2) = (rr[b * d + c], ri[b * d + c]);
                    let (s2, t2) = (yr[c * d + a], yi[c * d + a]);
                    sr += f * (p * s - q * t + p2 * s2 - q2 * t2);
                    si += f * (p * t + q * s + p2 * t2 + q2 * s2);
                }
                wr[a * d + b] = sr;
                wi[a * d + b] = si;
            }
        }
        for (i, x) in tilde.iter().enumerate().skip(j) {
            let (xr, xi) = (x.re(), x.im());
            let mut acc = 0.0;
            for ab in 0..d * d {
                acc += xr[ab] * wr[ab] - xi[ab] * wi[ab];
            }
            h[i * k + j] = -acc;
            h[j * k + i] = -acc;
        }
    }
    h
}

/// Minimiser of `g.x + x.H.x / 2` subject to `sum x = 0` (H lightly
/// regularised). `None` when the system is singular.
pub(crate) fn simplex_newton(g: &[f64], h: &[f64]) -> Option<Vec<f64>> {
    let k = g.len();
    let n = k + 1;
    let scale = (0..k)
        .map(|i| h[i * k + i].abs())
        .fold(0.0, f64::max)
        .max(1e-300);
    let mut m = vec![0.0; n * (n + 1)];
    for i in 0..k {
        for j in 0..k {
            m[i * (n + 1) + j] = h[i * k + j];
        }
        m[i * (n + 1) + i] += 1e-10 * scale;
        m[i * (n + 1) + k] = 1.0;
        m[k * (n + 1) + i] = 1.0;
        m[i * (n + 1) + n] = -g[i];
    }
    let x = solve_augmented(&mut m, n)?;
    Some(x[..k].to_vec())
}

/// Gaussian elimination with partial pivoting on an `n x (n+1)` system.
fn solve_augmented(m: &mut [f64], n: usize) -> Option<Vec<f64>> {
    let w = n + 1;
    for col in 0..n {
        let piv =
            (col..n).max_by(|&a, &b| m[a * w + col].abs().total_cmp(&m[b * w + col].abs()))?;
        if m[piv * w + col] == 0.0 || !m[piv * w + col].is_finite() {
            return None;
        }
        if piv != col {
            for c in 0..w {
                m.swap(piv * w + c, col * w + c);
            }
        }
        let p = m[col * w + col];
        for r in col + 1..n {
            let f = m[r * w + col] / p;
            if f != 0.0 {
                for c in col..w {
                    m[r * w + c] -= f * m[col * w + c];
                }
            }
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let mut s = m[r * w + n];
        for c in r + 1..n {
            s -= m[r * w + c] * x[c];
        }
        x[r] = s / m[r * w + r];
    }
    x.iter().all(|v| v.is_finite()).then_some(x)
}
