//! Pairwise Frank–Wolfe over finite product ensembles.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use super::gradient::{evaluate, Evaluation};
use super::lmo::{join, Oracle, ProductLmo};
use super::newton::{simplex_newton, weight_hessian};
use super::refine::{PureAtoms, Refiner};
use crate::error::Result;
use crate::layout::SubsystemLayout;
use crate::matrix::{inner, CMatrix};
use crate::operator::{tensor_all, HermitianOperator};
use crate::random::Sampler;
use crate::separable::ProductAtom;

/// Weight of the white product noise mixed into every iterate.
pub(crate) const FLOOR: f64 = 1e-9;
const DROP: f64 = 1e-15;
const REBUILD_EVERY: usize = 20;
const MAX_SEARCH: usize = 60;
/// Newton steps are skipped once `atoms * D^3` exceeds this.
const NEWTON_BUDGET: usize = 4_000_000;
const NEWTON_MAX_STEP: f64 = 4.0;
/// Smallest dimension refined before the first oracle call.
const REFINE_DIM: usize = 8;
const REFINE_EVERY: usize = 10;
const REFINE_ITERS: usize = 200;
const ATOMS_PER_DIM: usize = 4;
/// Total weight given to fresh random atoms before a refinement.
const PAD_WEIGHT: f64 = 1e-2;

#[derive(Clone)]
pub(crate) enum Shape {
    Pure(Vec<Vec<Complex64>>),
    Mixed(Vec<HermitianOperator>),
}

#[derive(Clone)]
pub(crate) struct Atom {
    pub weight: f64,
    pub shape: Shape,
    full: CMatrix,
}

impl Atom {
    pub fn pure(weight: f64, parts: Vec<Vec<Complex64>>) -> Self {
        let full = CMatrix::outer(&join(&parts));
        Atom {
            weight,
            shape: Shape::Pure(parts),
            full,
        }
    }

    pub fn mixed(weight: f64, parts: Vec<HermitianOperator>) -> Self {
        let full = tensor_all(&parts).into_matrix();
        Atom {
            weight,
            shape: Shape::Mixed(parts),
            full,
        }
    }

    fn same_pure(&self, parts: &[Vec<Complex64>]) -> bool {
        match &self.shape {
            Shape::Pure(mine) => mine
                .iter()
                .zip(parts)
                .all(|(a, b)| inner(a, b).norm_sqr() >= 1.0 - 1e-12),
            Shape::Mixed(_) => false,
        }
    }

    pub fn into_product(self, scale: f64) -> ProductAtom {
        let parties = match self.shape {
            Shape::Pure(parts) => parts
                .iter()
                .map(|p| HermitianOperator::projector(p))
                .collect(),
            Shape::Mixed(parts) => parts,
        };
        ProductAtom {
            weight: self.weight * scale,
            parties,
        }
    }
}

/// Diagonal local Hamiltonians and the energy budget of the non-floor part.
pub(crate) struct Constraint {
    pub local: Vec<Vec<f64>>,
    pub budget: f64,
}

impl Constraint {
    fn diagonal(&self, layout: &SubsystemLayout) -> Vec<f64> {
        (0..layout.total_dim())
            .map(|x| {
                layout
                    .digits(x)
                    .iter()
                    .zip(&self.local)
                    .map(|(&k, e)| e[k])
                    .sum()
            })
            .collect()
    }

    fn pure_energy(&self, parts: &[Vec<Complex64>]) -> f64 {
        parts
            .iter()
            .zip(&self.local)
            .map(|(p, e)| p.iter().zip(e).map(|(a, x)| a.norm_sqr() * x).sum::<f64>())
            .sum()
    }

    pub fn ground(&self) -> Vec<Vec<Complex64>> {
        self.local
            .iter()
            .map(|e| {
                let mut v = vec![Complex64::new(0.0, 0.0); e.len()];
                let k = (0..e.len()).fold(0, |b, k| if e[k] < e[b] { k } else { b });
                v[k] = Complex64::new(1.0, 0.0);
                v
            })
            .collect()
    }
}

pub(crate) struct Outcome {
    pub value: f64,
    pub gap: f64,
    pub atoms: Vec<Atom>,
    pub iterations: usize,
    pub converged: bool,
}

pub(crate) struct Solver<'a> {
    rho: &'a HermitianOperator,
    neg_entropy: f64,
    oracle: Oracle,
    sampler: Sampler,
    restarts: usize,
    constraint: Option<(Constraint, Vec<f64>)>,
    warm: Vec<Vec<Vec<Complex64>>>,
}

impl<'a> Solver<'a> {
    pub fn new(
        rho: &'a HermitianOperator,
        layout: &'a SubsystemLayout,
        restarts: usize,
        seed: u64,
        constraint: Option<Constraint>,
    ) -> Self {
        let neg_entropy = rho
            .eig()
            .values
            .iter()
            .map(|&l| crate::math::xlnx(l.max(0.0)))
            .sum();
        let constraint = constraint.map(|c| {
            let diag = c.diagonal(layout);
            (c, diag)
        });
        Solver {
            rho,
            neg_entropy,
            oracle: Oracle::new(layout),
            sampler: Sampler::new(seed),
            restarts,
            constraint,
            warm: Vec::new(),
        }
    }

    fn effective(&self, sigma: &CMatrix) -> HermitianOperator {
        let d = sigma.rows();
        let mut m = sigma.scale(1.0 - FLOOR);
        let (re, _) = m.parts_mut();
        for j in 0..d {
            re[j * d + j] += FLOOR / d as f64;
        }
        HermitianOperator::from_hermitian_unchecked(m)
    }

    fn eval_at(&self, sigma: &CMatrix) -> Evaluation {
        evaluate(self.rho, self.neg_entropy, &self.effective(sigma))
    }

    fn energy(&self, x: &CMatrix) -> f64 {
        let (_, diag) = self.constraint.as_ref().expect("constrained");
        let d = x.rows();
        diag.iter()
            .enumerate()
            .map(|(j, e)| e * x.re()[j * d + j])
            .sum()
    }

    /// Returns the direction atoms (convex coefficients) and a lower bound
    /// on `min <tau, G>` over the feasible product states.
    fn lmo(&mut self, ev: &Evaluation) -> (Vec<(Vec<Vec<Complex64>>, f64)>, f64) {
        let base = self
            .oracle
            .minimize(&ev.grad, self.restarts, &mut self.sampler, &self.warm);
        let Some((c, diag)) = &self.constraint else {
            self.warm = vec![base.parts.clone()];
            return (vec![(base.parts, 1.0)], base.value);
        };
        let slack = 1e-12 * c.budget.abs().max(1.0);
        let e0 = c.pure_energy(&base.parts);
        if e0 <= c.budget + slack {
            self.warm = vec![base.parts.clone()];
            return (vec![(base.parts, 1.0)], base.value);
        }
        let diag = diag.clone();
        let shifted = |lambda: f64| {
            let mut g = ev.grad.clone();
            let d = g.rows();
            let (re, _) = g.parts_mut();
            for (j, e) in diag.iter().enumerate() {
                re[j * d + j] += lambda * e;
            }
            g
        };
        let inner = (self.restarts / 4).max(1);
        let lambda_max = 1e6 * (1.0 + ev.grad.frobenius_norm());
        let ground = c.ground();
        let mut hi = self.oracle.minimize(
            &shifted(lambda_max),
            inner,
            &mut self.sampler,
            core::slice::from_ref(&ground),
        );
        if c.pure_energy(&hi.parts) > c.budget + slack {
            let v = join(&ground);
            hi = ProductLmo {
                value: shifted(lambda_max).sandwich(&v, &v).re,
                parts: ground,
            };
        }
        let (mut l_lo, mut l_hi) = (0.0, lambda_max);
        let mut lower = base.value;
        let mut lo = base;
        for _ in 0..60 {
            let mid = 0.5 * (l_lo + l_hi);
            let warm = [lo.parts.clone(), hi.parts.clone()];
            let m = self
                .oracle
                .minimize(&shifted(mid), inner, &mut self.sampler, &warm);
            lower = lower.max(m.value - mid * c.budget);
            if c.pure_energy(&m.parts) <= c.budget + slack {
                l_hi = mid;
                hi = m;
            } else {
                l_lo = mid;
                lo = m;
            }
        }
        let e_lo = c.pure_energy(&lo.parts);
        let e_hi = c.pure_energy(&hi.parts);
        let p = if e_lo > e_hi {
            ((c.budget - e_hi) / (e_lo - e_hi)).clamp(0.0, 1.0)
        } else {
            0.0
        };
        let lo_g = ev.grad.sandwich(&join(&lo.parts), &join(&lo.parts)).re;
        let hi_g = ev.grad.sandwich(&join(&hi.parts), &join(&hi.parts)).re;
        let attained = p * lo_g + (1.0 - p) * hi_g;
        self.warm = vec![lo.parts.clone(), hi.parts.clone()];
        let mut dirs = vec![(hi.parts, 1.0 - p)];
        if p > 0.0 {
            dirs.push((lo.parts, p));
        }
        (dirs, lower.min(attained))
    }

    pub fn run(&mut self, mut atoms: Vec<Atom>, tol: f64, max_iter: usize) -> Result<Outcome> {
        let d = self.rho.dim();
        let rebuild = |atoms: &[Atom]| {
            let mut s = CMatrix::zeros(d, d);
            for a in atoms {
                s.axpy(a.weight, &a.full);
            }
            s
        };
        let mut sigma = rebuild(&atoms);
        let mut ev = self.eval_at(&sigma);
        let mut last_step: f64 = 0.5;
        let mut iterations = 0;
        let mut converged = false;
        let floor_term = -crate::math::ln_1p(-FLOOR);
        let mut gap;
        // Last Frank–Wolfe gap; local steps run while the active set alone
        // offers at least half of it.
        let mut phi = f64::INFINITY;
        let mut stalled = false;
        let mut oracle_calls = 0usize;
        loop {
            let scores: Vec<f64> = atoms.iter().map(|a| ev.pair(&a.full)).collect();
            let (vi, vmax) = argmax(scores.iter().copied());
            let (si, smin) = argmax(scores.iter().map(|s| -s));
            let local_gap = (1.0 - FLOOR) * (vmax + smin);
            if atoms.len() > 1 && !stalled && local_gap > 0.5 * phi && iterations < max_iter {
                let step = self
                    .newton_direction(&ev, &atoms, &scores)
                    .or_else(|| self.pairwise_direction(&atoms, si, vi));
                if let Some((delta, dir, gmax)) = step {
                    let gmax = self.energy_cap(&sigma, &dir, gmax);
                    if gmax > DROP {
                        iterations += 1;
                        let d0 = (1.0 - FLOOR) * ev.pair(&dir);
                        let (gamma, next) =
                            self.line_search(&sigma, &dir, gmax, d0, gmax.min(1.0), ev);
                        ev = next;
                        stalled = gamma <= 0.0;
                        for (a, x) in atoms.iter_mut().zip(&delta) {
                            a.weight += gamma * x;
                        }
                        atoms.retain(|a| a.weight > DROP.max(1e-12 * gamma));
                        sigma.axpy(gamma, &dir);
                        if iterations % REBUILD_EVERY == 0 {
                            normalize(&mut atoms);
                            sigma = rebuild(&atoms);
                        }
                        continue;
                    }
                }
            }
            stalled = false;

            let due = if oracle_calls == 0 {
                d >= REFINE_DIM
            } else {
                oracle_calls % REFINE_EVERY == 0
            };
            if due && self.constraint.is_none() && iterations < max_iter {
                if let Some(refined) = self.refine(&atoms, ev.value) {
                    iterations += 1;
                    atoms = refined;
                    sigma = rebuild(&atoms);
                    ev = self.eval_at(&sigma);
                }
            }
            oracle_calls += 1;
            let (dirs, lower) = self.lmo(&ev);
            let sigma_score = ev.pair(&sigma);
            gap = ((1.0 - FLOOR) * (sigma_score - lower)).max(0.0) + floor_term;
            phi = gap - floor_term;
            if gap <= tol {
                converged = true;
                break;
            }
            if iterations >= max_iter {
                break;
            }
            iterations += 1;

            let mut s_full = CMatrix::zeros(d, d);
            for (parts, coef) in &dirs {
                s_full.axpy(*coef, &CMatrix::outer(&join(parts)));
            }
            let mut pairwise = atoms.len() > 1;
            let (mut dir, mut gmax) = if pairwise {
                (s_full.sub(&atoms[vi].full), atoms[vi].weight)
            } else {
                (s_full.sub(&sigma), 1.0)
            };
            gmax = self.energy_cap(&sigma, &dir, gmax);
            if gmax <= DROP {
                pairwise = false;
                dir = s_full.sub(&sigma);
                gmax = 1.0;
            }
            let d0 = (1.0 - FLOOR) * ev.pair(&dir);
            if !(d0 < 0.0) {
                break;
            }
            let (gamma, next) =
                self.line_search(&sigma, &dir, gmax, d0, (2.0 * last_step).min(gmax), ev);
            ev = next;
            last_step = gamma.max(1e-8);

            if pairwise {
                atoms[vi].weight = if gamma >= gmax {
                    0.0
                } else {
                    atoms[vi].weight - gamma
                };
            } else {
                for a in atoms.iter_mut() {
                    a.weight *= 1.0 - gamma;
                }
            }
            for (parts, coef) in dirs {
                let w = gamma * coef;
                match atoms.iter_mut().find(|a| a.same_pure(&parts)) {
                    Some(a) => a.weight += w,
                    None => atoms.push(Atom::pure(w, parts)),
                }
            }
            atoms.retain(|a| a.weight > DROP);
            sigma.axpy(gamma, &dir);
            if iterations % REBUILD_EVERY == 0 {
                normalize(&mut atoms);
                sigma = rebuild(&atoms);
            }
        }
        normalize(&mut atoms);
        Ok(Outcome {
            value: ev.value,
            gap,
            atoms,
            iterations,
            converged,
        })
    }

    /// Joint smooth descent on weights and local vectors over an
    /// over-complete set of pure product atoms. `None` unless it improves.
    fn refine(&mut self, atoms: &[Atom], value: f64) -> Option<Vec<Atom>> {
        let d = self.rho.dim();
        let mut pure: PureAtoms = Vec::new();
        for a in atoms {
            match &a.shape {
                Shape::Pure(parts) => pure.push((a.weight, parts.clone())),
                Shape::Mixed(ops) => {
                    let eigs: Vec<_> = ops.iter().map(|m| m.eig()).collect();
                    for x in 0..d {
                        let dig = &self.oracle.digits[x];
                        let w: f64 = dig
                            .iter()
                            .zip(&eigs)
                            .map(|(&k, e)| e.values[k].max(0.0))
                            .product();
                        if w > DROP {
                            pure.push((
                                a.weight * w,
                                dig.iter().zip(&eigs).map(|(&k, e)| e.vector(k)).collect(),
                            ));
                        }
                    }
                }
            }
        }
        let pad = (ATOMS_PER_DIM * d).saturating_sub(pure.len());
        if pad > 0 {
            pure.iter_mut().for_each(|a| a.0 *= 1.0 - PAD_WEIGHT);
            for _ in 0..pad {
                let parts = self
                    .oracle
                    .dims
                    .iter()
                    .map(|&k| self.sampler.unit_vector(k))
                    .collect();
                pure.push((PAD_WEIGHT / pad as f64, parts));
            }
        }
        let refiner = Refiner::new(
            self.rho,
            self.neg_entropy,
            &self.oracle.dims,
            &self.oracle.digits,
        );
        let (refined, new_value) = refiner.refine(&pure, REFINE_ITERS);
        if !(new_value < value) {
            return None;
        }
        let mut out: Vec<Atom> = refined
            .into_iter()
            .filter(|a| a.0 > DROP)
            .map(|(w, p)| Atom::pure(w, p))
            .collect();
        normalize(&mut out);
        Some(out)
    }

    /// Newton step on the active weights: `(delta, sum_i delta_i A_i, max step)`.
    fn newton_direction(
        &self,
        ev: &Evaluation,
        atoms: &[Atom],
        scores: &[f64],
    ) -> Option<(Vec<f64>, CMatrix, f64)> {
        let d = self.rho.dim();
        if atoms.len() * d * d * d > NEWTON_BUDGET {
            return None;
        }
        let c = 1.0 - FLOOR;
        let refs: Vec<&CMatrix> = atoms.iter().map(|a| &a.full).collect();
        let mut h = weight_hessian(ev, &refs);
        h.iter_mut().for_each(|x| *x *= c * c);
        let g: Vec<f64> = scores.iter().map(|s| c * s).collect();
        let delta = simplex_newton(&g, &h)?;
        let slope: f64 = g.iter().zip(&delta).map(|(a, b)| a * b).sum();
        if !(slope < 0.0) {
            return None;
        }
        let gmax = atoms
            .iter()
            .zip(&delta)
            .filter(|(_, &x)| x < 0.0)
            .map(|(a, &x)| a.weight / -x)
            .fold(NEWTON_MAX_STEP, f64::min);
        let dir = combine(atoms, &delta);
        Some((delta, dir, gmax))
    }

    fn pairwise_direction(
        &self,
        atoms: &[Atom],
        toward: usize,
        away: usize,
    ) -> Option<(Vec<f64>, CMatrix, f64)> {
        if toward == away {
            return None;
        }
        let mut delta = vec![0.0; atoms.len()];
        delta[toward] = 1.0;
        delta[away] = -1.0;
        Some((
            delta,
            atoms[toward].full.sub(&atoms[away].full),
            atoms[away].weight,
        ))
    }

    /// Largest step along `dir` keeping the energy within budget.
    fn energy_cap(&self, sigma: &CMatrix, dir: &CMatrix, gmax: f64) -> f64 {
        let Some((c, _)) = &self.constraint else {
            return gmax;
        };
        let e_dir = self.energy(dir);
        if e_dir > 0.0 {
            gmax.min(((c.budget - self.energy(sigma)) / e_dir).max(0.0))
        } else {
            gmax
        }
    }

    /// Root of the directional derivative of `gamma -> F(sigma + gamma dir)`
    /// on `[0, gmax]`: expanding bracket, then Illinois false position.
    fn line_search(
        &self,
        sigma: &CMatrix,
        dir: &CMatrix,
        gmax: f64,
        d0: f64,
        guess: f64,
        ev0: Evaluation,
    ) -> (f64, Evaluation) {
        let at = |t: f64| {
            let mut s = sigma.clone();
            s.axpy(t, dir);
            let ev = self.eval_at(&s);
            let slope = (1.0 - FLOOR) * ev.pair(dir);
            (ev, slope)
        };
        let stop = 1e-9 * d0.abs();
        let mut lo = (0.0, d0, ev0);
        let mut t = guess.max(1e-12 * gmax).min(gmax);
        let mut hi;
        let mut evals = 0;
        loop {
            let (ev, slope) = at(t);
            evals += 1;
            if slope <= 0.0 {
                lo = (t, slope, ev);
                if t >= gmax || slope.abs() <= stop || evals >= MAX_SEARCH {
                    return (lo.0, lo.2);
                }
                t = (4.0 * t).min(gmax);
            } else {
                hi = (t, slope, ev);
                break;
            }
        }
        let (mut fa, mut fb) = (lo.1, hi.1);
        let mut side = 0;
        while evals < MAX_SEARCH && hi.0 - lo.0 > 1e-12 * gmax.max(1e-300) {
            if lo.1.abs() <= stop || hi.1.abs() <= stop {
                break;
            }
            let mut c = (lo.0 * fb - hi.0 * fa) / (fb - fa);
            if !(c > lo.0 && c < hi.0) {
                c = 0.5 * (lo.0 + hi.0);
            }
            let (ev, slope) = at(c);
            evals += 1;
            if slope <= 0.0 {
                lo = (c, slope, ev);
                fa = slope;
                if side == -1 {
                    fb *= 0.5;
                }
                side = -1;
            } else {
                hi = (c, slope, ev);
                fb = slope;
                if side == 1 {
                    fa *= 0.5;
                }
                side = 1;
            }
        }
        if lo.0 > 0.0 && lo.1.abs() <= hi.1.abs() {
            (lo.0, lo.2)
        } else if hi.2.value <= lo.2.value {
            (hi.0, hi.2)
        } else {
            (lo.0, lo.2)
        }
    }
}

fn argmax(values: impl Iterator<Item = f64>) -> (usize, f64) {
    values.enumerate().fold(
        (0, f64::NEG_INFINITY),
        |b, (i, v)| if v > b.1 { (i, v) } else { b },
    )
}

fn combine(atoms: &[Atom], delta: &[f64]) -> CMatrix {
    let d = atoms[0].full.rows();
    let mut out = CMatrix::zeros(d, d);
    for (a, x) in atoms.iter().zip(delta) {
        out.axpy(*x, &a.full);
    }
    out
}

fn normalize(atoms: &mut [Atom]) {
    let total: f64 = atoms.iter().map(|a| a.weight).sum();
    atoms.iter_mut().for_each(|a| a.weight /= total);
}
