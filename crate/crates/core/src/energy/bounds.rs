use alloc::vec::Vec;

use super::{
    gibbs_state, max_entropy_f_bar, FFunction, HamiltonianSpec, Oscillator, SUM_SPECTRUM_CAP,
};
use crate::entropic::{g, h2};
use crate::error::{Error, Result};
use crate::math;

/// A bound value with its additive terms.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub value: f64,
    pub terms: Vec<(&'static str, f64)>,
    /// Estimated error from truncating an infinite spectrum; `0` when exact,
    /// `inf` when the truncation cannot resolve the energy at all.
    pub uncertainty: f64,
}

impl BoundReport {
    fn from_terms(terms: Vec<(&'static str, f64)>, uncertainty: f64) -> Self {
        BoundReport {
            value: terms.iter().map(|t| t.1).sum(),
            terms,
            uncertainty,
        }
    }
}

fn check_epsilon(eps: f64) -> Result<()> {
    if !(eps >= 0.0 && eps.is_finite()) {
        return Err(Error::Domain {
            what: "epsilon",
            value: eps,
        });
    }
    Ok(())
}

fn check_parties(m: usize, n: usize) -> Result<f64> {
    if n < 2 {
        return Err(Error::TooFewParties {
            required: 2,
            found: n,
        });
    }
    if m + 1 != n && m != n {
        return Err(Error::Domain {
            what: "m (must be n - 1 or n)",
            value: m as f64,
        });
    }
    Ok((n - 1) as f64 / m as f64)
}

/// `eps ln(dim A_1..A_{n-1}) + g(eps)` for a trace distance `eps`.
pub fn cb_finite_dim(eps: f64, dims: &[usize]) -> Result<f64> {
    check_epsilon(eps)?;
    if dims.contains(&0) {
        return Err(Error::ZeroDimension);
    }
    let ln_dim: f64 = dims.iter().map(|&d| math::ln(d as f64)).sum();
    Ok(eps * ln_dim + g(eps))
}

/// `C_m sqrt(2 eps) Fbar_{H_{A^m}}(m Ebar / eps) + g(sqrt(2 eps))` with the
/// sum Hamiltonian of the `m` given parties and `Ebar = E - E0^{A^m} / m`.
///
/// `Fbar` is evaluated on the sum spectrum truncated to
/// [`SUM_SPECTRUM_CAP`] levels; the neglected tail is reported as
/// uncertainty.
pub fn cb_energy(
    eps: f64,
    energy: f64,
    m: usize,
    n: usize,
    hams: &[HamiltonianSpec],
) -> Result<BoundReport> {
    check_epsilon(eps)?;
    if eps > 1.0 {
        return Err(Error::Domain {
            what: "epsilon above 1 (use cb_energy_hat)",
            value: eps,
        });
    }
    let c = check_parties(m, n)?;
    if hams.len() != m {
        return Err(Error::LengthMismatch {
            expected: m,
            found: hams.len(),
        });
    }
    let (sum, truncated) = HamiltonianSpec::sum(hams, SUM_SPECTRUM_CAP)?;
    let e_bar = energy - sum.ground_energy() / m as f64;
    if !(e_bar >= 0.0) {
        return Err(Error::Domain {
            what: "energy below the mean ground energy",
            value: energy,
        });
    }
    if eps == 0.0 {
        return Ok(BoundReport::from_terms(
            alloc::vec![("entropy", 0.0), ("g", 0.0)],
            0.0,
        ));
    }
    let arg = m as f64 * e_bar / eps;
    let f = max_entropy_f_bar(&sum, arg)?;
    let scale = c * math::sqrt(2.0 * eps);
    let mut uncertainty = 0.0;
    if truncated && arg > 0.0 {
        let gibbs = gibbs_state(&sum, arg + sum.ground_energy())?;
        uncertainty = if gibbs.clamped {
            f64::INFINITY
        } else {
            let k = sum.dim() as f64;
            let tail = (k * gibbs.weights[sum.dim() - 1]).min(0.5);
            scale * (h2(tail) + tail * math::ln(k))
        };
    }
    Ok(BoundReport::from_terms(
        alloc::vec![("entropy", scale * f), ("g", g(math::sqrt(2.0 * eps)))],
        uncertainty,
    ))
}

/// [`cb_energy`] with `Fbar_{H_{A^m}}` replaced by an upper bound `Fhat` of
/// the sum system; valid for every `eps > 0`.
pub fn cb_energy_hat(
    eps: f64,
    energy: f64,
    m: usize,
    n: usize,
    f_hat: &FFunction,
) -> Result<BoundReport> {
    check_epsilon(eps)?;
    let c = check_parties(m, n)?;
    let e_bar = energy - f_hat.ground_energy() / m as f64;
    if !(e_bar >= 0.0) {
        return Err(Error::Domain {
            what: "energy below the mean ground energy",
            value: energy,
        });
    }
    if eps == 0.0 {
        return Ok(BoundReport::from_terms(
            alloc::vec![("entropy", 0.0), ("g", 0.0)],
            0.0,
        ));
    }
    let scale = c * math::sqrt(2.0 * eps);
    let f = f_hat.eval(m as f64 * e_bar / eps)?;
    Ok(BoundReport::from_terms(
        alloc::vec![("entropy", scale * f), ("g", g(math::sqrt(2.0 * eps)))],
        0.0,
    ))
}

fn check_t(eps: f64, t: f64) -> Result<()> {
    if !(t > 0.0 && t * eps < 1.0) {
        return Err(Error::Domain {
            what: "t (must lie in (0, 1/epsilon))",
            value: t,
        });
    }
    Ok(())
}

/// Continuity bound for identical parties:
///
/// `m C_m [(eps + eps^2 t^2) Fhat(m Ebar / (eps t)^2) + 2 sqrt(2 eps t) Fhat(Ebar / (eps t))]
///  + g(eps + eps^2 t^2) + 2 g(sqrt(2 eps t))`, `Ebar = E - E0`.
pub fn cb_energy_iid(
    eps: f64,
    energy: f64,
    m: usize,
    n: usize,
    t: f64,
    f_hat: &FFunction,
) -> Result<BoundReport> {
    check_epsilon(eps)?;
    let c = check_parties(m, n)?;
    let e_bar = energy - f_hat.ground_energy();
    if !(e_bar >= 0.0) {
        return Err(Error::Domain {
            what: "energy below the ground energy",
            value: energy,
        });
    }
    if eps == 0.0 {
        return Ok(zero_iid());
    }
    check_t(eps, t)?;
    let mf = m as f64;
    let et = eps * t;
    let a = eps + et * et;
    let b = math::sqrt(2.0 * et);
    Ok(BoundReport::from_terms(
        alloc::vec![
            (
                "quadratic",
                mf * c * a * f_hat.eval(mf * e_bar / (et * et))?
            ),
            ("root", mf * c * 2.0 * b * f_hat.eval(e_bar / et)?),
            ("g_quadratic", g(a)),
            ("g_root", 2.0 * g(b)),
        ],
        0.0,
    ))
}

fn zero_iid() -> BoundReport {
    BoundReport::from_terms(
        alloc::vec![
            ("quadratic", 0.0),
            ("root", 0.0),
            ("g_quadratic", 0.0),
            ("g_root", 0.0)
        ],
        0.0,
    )
}

/// Closed-form bound for `l`-mode oscillators written with
/// `ln[(x + 2 E0) / (e^{-1} l E*)]`.
pub fn cb_oscillator(
    eps: f64,
    energy: f64,
    t: f64,
    osc: &Oscillator,
    m: usize,
    n: usize,
) -> Result<BoundReport> {
    check_epsilon(eps)?;
    let c = check_parties(m, n)?;
    let e0 = osc.ground_energy();
    if !(energy > e0) {
        return Err(Error::Domain {
            what: "energy at or below E0",
            value: energy,
        });
    }
    if eps == 0.0 {
        return Ok(zero_iid());
    }
    check_t(eps, t)?;
    let e_bar = energy - e0;
    let l = osc.modes() as f64;
    let denom = math::exp(-1.0) * l * osc.e_star();
    let log_term = |x: f64| l * math::ln((x + 2.0 * e0) / denom);
    let mf = m as f64;
    let et = eps * t;
    let a = eps + et * et;
    let b = math::sqrt(2.0 * et);
    Ok(BoundReport::from_terms(
        alloc::vec![
            ("quadratic", mf * c * a * log_term(mf * e_bar / (et * et))),
            ("root", 2.0 * mf * c * b * log_term(e_bar / et)),
            ("g_quadratic", g(a)),
            ("g_root", 2.0 * g(b)),
        ],
        0.0,
    ))
}

/// Minimizes `bound(t)` over 200 log-spaced points in `[1e-4/eps, 0.9999/eps]`.
/// Returns `(t, value)`; ties keep the smallest `t`.
pub fn optimize_t(eps: f64, mut bound: impl FnMut(f64) -> Result<f64>) -> Result<(f64, f64)> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::Domain {
            what: "epsilon",
            value: eps,
        });
    }
    const POINTS: usize = 200;
    let lo = math::ln(1e-4 / eps);
    let hi = math::ln(0.9999 / eps);
    let mut best = (f64::NAN, f64::INFINITY);
    for k in 0..POINTS {
        let t = math::exp(lo + (hi - lo) * k as f64 / (POINTS - 1) as f64);
        let v = bound(t)?;
        if v < best.1 {
            best = (t, v);
        }
    }
    Ok(best)
}
