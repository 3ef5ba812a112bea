//! Heuristic checks of the finite-approximation property of a spectrum:
//! finite mean weight `sum_i lambda_i g_i` and
//! `lim_{beta -> 0+} [sum_i exp(-beta g_i)]^beta = 1`.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math;

const PARTIAL_TERMS: usize = 100_000;
const BETA_EXPONENTS: core::ops::RangeInclusive<i32> = 1..=20;
const FIT_POINTS: usize = 8;
const SLOPE_TOL: f64 = 0.05;

/// Nonincreasing probability spectrum `lambda_1 >= lambda_2 >= ...`.
#[derive(Debug, Clone, PartialEq)]
pub enum SpectrumModel {
    /// `(1 - q) q^(i-1)`.
    Geometric { q: f64 },
    /// Proportional to `i^-alpha`.
    PowerLaw { alpha: f64 },
    /// Proportional to `1 / ((i+1)^alpha ln^q(i+1))`.
    LogCorrected { alpha: f64, q: f64 },
    /// Finite list; zero beyond its end.
    Explicit(Vec<f64>),
}

/// Nondecreasing weights `g_1 <= g_2 <= ...`.
#[derive(Debug, Clone, PartialEq)]
pub enum WeightModel {
    /// `scale * ln^q(i)`.
    LogPower { scale: f64, q: f64 },
    /// `scale * i^p`.
    Power { scale: f64, p: f64 },
    /// Finite list: the spectrum of a finite-dimensional Hamiltonian.
    Explicit(Vec<f64>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Holds,
    Fails,
    Inconclusive,
}

/// Bracket on `y(beta) = beta ln sum_i exp(-beta g_i)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HcondSample {
    pub beta: f64,
    pub y_lo: f64,
    pub y_hi: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FaReport {
    /// `sum_i lambda_i g_i`; `inf` when the series diverges.
    pub energy: f64,
    /// Tail estimate included in `energy`.
    pub energy_remainder: f64,
    pub hcond_plus: Verdict,
    pub samples: Vec<HcondSample>,
    /// Fitted exponent `kappa` in `y ~ beta^kappa` as `beta -> 0`.
    pub slope: f64,
    pub verdict: Verdict,
}

impl SpectrumModel {
    fn validate(&self) -> Result<()> {
        match *self {
            SpectrumModel::Geometric { q } if !(q > 0.0 && q < 1.0) => {
                Err(Error::InvalidSpectrum("geometric ratio must lie in (0, 1)"))
            }
            SpectrumModel::PowerLaw { alpha } if !(alpha > 1.0 && alpha.is_finite()) => {
                Err(Error::InvalidSpectrum("power-law exponent must exceed 1"))
            }
            SpectrumModel::LogCorrected { alpha, q }
                if !(alpha.is_finite()
                    && q.is_finite()
                    && (alpha > 1.0 || (alpha == 1.0 && q > 1.0))) =>
            {
                Err(Error::InvalidSpectrum("log-corrected tail is not summable"))
            }
            SpectrumModel::Explicit(ref v) => {
                if v.is_empty() || v.iter().any(|x| !(*x >= 0.0)) {
                    return Err(Error::InvalidSpectrum("entries must be nonnegative"));
                }
                if v.windows(2).any(|w| w[1] > w[0]) {
                    return Err(Error::InvalidSpectrum("entries must be nonincreasing"));
                }
                if (v.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
                    return Err(Error::InvalidSpectrum("entries must sum to 1"));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    /// Unnormalized term at index `i >= 1`.
    fn term(&self, i: f64) -> f64 {
        match *self {
            SpectrumModel::Geometric { q } => (1.0 - q) * math::powf(q, i - 1.0),
            SpectrumModel::PowerLaw { alpha } => math::powf(i, -alpha),
            SpectrumModel::LogCorrected { alpha, q } => {
                1.0 / (math::powf(i + 1.0, alpha) * math::powf(math::ln(i + 1.0), q))
            }
            SpectrumModel::Explicit(ref v) => v.get(i as usize - 1).copied().unwrap_or(0.0),
        }
    }

    /// `(alpha, q)` of the asymptotic tail `x^-alpha ln^-q x`; `None` for
    /// tails that decay faster than any power.
    fn tail(&self) -> Option<(f64, f64)> {
        match *self {
            SpectrumModel::PowerLaw { alpha } => Some((alpha, 0.0)),
            SpectrumModel::LogCorrected { alpha, q } => Some((alpha, q)),
            _ => None,
        }
    }
}

impl WeightModel {
    fn validate(&self) -> Result<()> {
        match *self {
            WeightModel::LogPower { scale, q }
                if !(scale > 0.0 && q > 0.0 && scale.is_finite() && q.is_finite()) =>
            {
                Err(Error::InvalidWeights(
                    "log-power scale and exponent must be positive",
                ))
            }
            WeightModel::Power { scale, p }
                if !(scale > 0.0 && p > 0.0 && scale.is_finite() && p.is_finite()) =>
            {
                Err(Error::InvalidWeights(
                    "power scale and exponent must be positive",
                ))
            }
            WeightModel::Explicit(ref v) => {
                if v.is_empty() || v.iter().any(|x| !(x.is_finite() && *x >= 0.0)) {
                    return Err(Error::InvalidWeights(
                        "entries must be finite and nonnegative",
                    ));
                }
                if v.windows(2).any(|w| w[1] < w[0]) {
                    return Err(Error::InvalidWeights("entries must be nondecreasing"));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    fn term(&self, i: f64) -> f64 {
        match *self {
            WeightModel::LogPower { scale, q } => scale * math::powf(math::ln(i), q),
            WeightModel::Power { scale, p } => scale * math::powf(i, p),
            WeightModel::Explicit(ref v) => v[(i as usize - 1).min(v.len() - 1)],
        }
    }

    /// `(p, q)` of the growth `x^p ln^q x`.
    fn growth(&self) -> (f64, f64) {
        match *self {
            WeightModel::LogPower { q, .. } => (0.0, q),
            WeightModel::Power { p, .. } => (p, 0.0),
            WeightModel::Explicit(_) => (0.0, 0.0),
        }
    }

    fn scale(&self) -> f64 {
        match *self {
            WeightModel::LogPower { scale, .. } | WeightModel::Power { scale, .. } => scale,
            WeightModel::Explicit(ref v) => *v.last().unwrap(),
        }
    }
}

/// Partial sum over `i <= N` plus an integral estimate of the tail.
fn series(
    spectrum: &SpectrumModel,
    weight: impl Fn(f64) -> f64,
    growth: (f64, f64),
    scale: f64,
) -> (f64, f64) {
    let n = match spectrum {
        SpectrumModel::Explicit(v) => v.len(),
        _ => PARTIAL_TERMS,
    };
    let mut partial = 0.0;
    for i in (1..=n).rev() {
        let x = i as f64;
        partial += spectrum.term(x) * weight(x);
    }
    let remainder = match spectrum {
        SpectrumModel::Explicit(_) => 0.0,
        SpectrumModel::Geometric { q } => {
            // sum_{i > N} (1-q) q^(i-1) g(i) with g evaluated on a geometric grid
            let mut r = 0.0;
            let mut i = n as f64 + 1.0;
            loop {
                let t = spectrum.term(i) * weight(i);
                r += t;
                if t <= 1e-300 || t < 1e-18 * (partial + r) || i > n as f64 + 1e7 {
                    break;
                }
                i += 1.0;
            }
            let _ = q;
            r
        }
        _ => {
            let (alpha, qs) = spectrum.tail().unwrap();
            let (p, qw) = growth;
            let decay = alpha - p - 1.0;
            let u0 = math::ln(n as f64);
            if decay > 0.0 {
                log_window_integral(
                    |u| {
                        let x = math::exp(u);
                        spectrum.term(x) * weight(x) * x
                    },
                    u0,
                    60.0 / decay,
                )
            } else {
                let s = qs - qw;
                scale * math::powf(u0, 1.0 - s) / (s - 1.0)
            }
        }
    };
    (partial + remainder, remainder)
}

/// Composite Simpson integral of `f` over `[a, a + len]`.
fn log_window_integral(f: impl Fn(f64) -> f64, a: f64, len: f64) -> f64 {
    const PANELS: usize = 4000;
    let h = len / PANELS as f64;
    let mut s = f(a) + f(a + len);
    for k in 1..PANELS {
        let w = if k % 2 == 1 { 4.0 } else { 2.0 };
        s += w * f(a + k as f64 * h);
    }
    s * h / 3.0
}

fn series_converges(spectrum: &SpectrumModel, weights: &WeightModel) -> bool {
    let Some((alpha, qs)) = spectrum.tail() else {
        return true;
    };
    let (p, qw) = weights.growth();
    let decay = alpha - p;
    decay > 1.0 || (decay == 1.0 && qs - qw > 1.0)
}

/// `ln Z(beta)` bracket for `Z = sum_i exp(-beta g_i)`; `None` if divergent.
fn log_partition(weights: &WeightModel, beta: f64) -> Option<(f64, f64)> {
    match *weights {
        WeightModel::Explicit(ref v) => {
            let z = math::log_sum_exp(v.iter().map(|g| -beta * g));
            Some((z, z))
        }
        WeightModel::LogPower { scale, q } => {
            if q < 1.0 || (q == 1.0 && beta * scale <= 1.0) {
                return None;
            }
            let bs = beta * scale;
            let phi = |u: f64| u - bs * math::powf(u, q);
            let peak = if q == 1.0 {
                0.0
            } else {
                math::powf(1.0 / (bs * q), 1.0 / (q - 1.0))
            };
            let ln_i = log_concave_integral(phi, peak);
            Some((ln_i.max(0.0), log_add(0.0, ln_i)))
        }
        WeightModel::Power { scale, p } => {
            let bs = beta * scale;
            let phi = |u: f64| u - bs * math::exp(p * u);
            let peak = (math::ln(1.0 / (bs * p)) / p).max(0.0);
            let ln_i = log_concave_integral(phi, peak);
            let first = -bs;
            Some((ln_i.max(first), log_add(first, ln_i)))
        }
    }
}

fn log_add(a: f64, b: f64) -> f64 {
    let (hi, lo) = if a > b { (a, b) } else { (b, a) };
    hi + math::ln_1p(math::exp(lo - hi))
}

/// `ln int_0^inf exp(phi(u)) du` for concave `phi` maximized at `peak >= 0`.
fn log_concave_integral(phi: impl Fn(f64) -> f64, peak: f64) -> f64 {
    let top = phi(peak);
    let drop = 60.0;
    let mut right = 1.0;
    while phi(peak + right) > top - drop {
        right *= 2.0;
    }
    let mut left = 0.0;
    if peak > 0.0 {
        left = 1.0_f64.min(peak);
        while left < peak && phi(peak - left) > top - drop {
            left = (2.0 * left).min(peak);
        }
    }
    let a = peak - left;
    let integral = log_window_integral(|u| math::exp(phi(u) - top), a, left + right);
    top + math::ln(integral)
}

/// Evaluates the FA-property on declared tail models.
pub fn fa_check(spectrum: &SpectrumModel, weights: &WeightModel) -> Result<FaReport> {
    spectrum.validate()?;
    weights.validate()?;
    if let WeightModel::Explicit(w) = weights {
        let fits = matches!(spectrum, SpectrumModel::Explicit(s) if s.len() <= w.len());
        if !fits {
            return Err(Error::InvalidWeights(
                "explicit weights require an explicit spectrum of at most the same length",
            ));
        }
    }

    let (energy, energy_remainder) = if series_converges(spectrum, weights) {
        let (norm, norm_rem) = series(spectrum, |_| 1.0, (0.0, 0.0), 1.0);
        let (raw, rem) = series(
            spectrum,
            |x| weights.term(x),
            weights.growth(),
            weights.scale(),
        );
        let _ = norm_rem;
        (raw / norm, rem / norm)
    } else {
        (f64::INFINITY, f64::INFINITY)
    };

    let mut samples = Vec::new();
    let mut divergent = false;
    for k in BETA_EXPONENTS {
        let beta = math::powf(2.0, -(k as f64));
        match log_partition(weights, beta) {
            Some((lo, hi)) => samples.push(HcondSample {
                beta,
                y_lo: beta * lo,
                y_hi: beta * hi,
            }),
            None => {
                divergent = true;
                samples.push(HcondSample {
                    beta,
                    y_lo: f64::INFINITY,
                    y_hi: f64::INFINITY,
                });
            }
        }
    }

    let (hcond_plus, slope) = if divergent {
        (Verdict::Fails, f64::NAN)
    } else {
        hcond_verdict(&samples)
    };
    let verdict = match (energy.is_finite(), hcond_plus) {
        (false, _) | (_, Verdict::Fails) => Verdict::Fails,
        (true, Verdict::Holds) => Verdict::Holds,
        _ => Verdict::Inconclusive,
    };
    Ok(FaReport {
        energy,
        energy_remainder,
        hcond_plus,
        samples,
        slope,
        verdict,
    })
}

fn hcond_verdict(samples: &[HcondSample]) -> (Verdict, f64) {
    let tail = &samples[samples.len() - FIT_POINTS..];
    let mid = |s: &HcondSample| 0.5 * (s.y_lo + s.y_hi);
    if tail.iter().any(|s| !(mid(s) > 0.0)) {
        return (Verdict::Inconclusive, f64::NAN);
    }
    let xs: Vec<f64> = tail.iter().map(|s| math::ln(s.beta)).collect();
    let ys: Vec<f64> = tail.iter().map(|s| math::ln(mid(s))).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let slope = sxy / sxx;
    let decreasing = tail
        .windows(2)
        .all(|w| mid(&w[1]) <= mid(&w[0]) * (1.0 + 1e-9));
    let tight = tail.iter().all(|s| s.y_hi - s.y_lo <= 0.1 * mid(s));
    let verdict = if slope > SLOPE_TOL && decreasing && tight {
        Verdict::Holds
    } else if slope.abs() <= SLOPE_TOL && tight {
        Verdict::Fails
    } else {
        Verdict::Inconclusive
    };
    (verdict, slope)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn geometric_with_cubic_logs_holds() {
        let r = fa_check(
            &SpectrumModel::Geometric { q: 0.5 },
            &WeightModel::LogPower { scale: 1.0, q: 3.0 },
        )
        .unwrap();
        assert!(r.energy.is_finite() && r.energy > 0.0);
        // direct sum oracle
        let direct: f64 = (1..200)
            .map(|i| math::powf(0.5, i as f64) * math::powf(math::ln(i as f64), 3.0))
            .sum();
        assert!((r.energy - direct).abs() < 1e-12);
        assert_eq!(r.hcond_plus, Verdict::Holds);
        assert_eq!(r.verdict, Verdict::Holds);
        assert!((r.slope - 0.5).abs() < 0.1);
    }

    #[test]
    fn logarithmic_weights_fail() {
        let r = fa_check(
            &SpectrumModel::Geometric { q: 0.5 },
            &WeightModel::LogPower { scale: 1.0, q: 1.0 },
        )
        .unwrap();
        assert_eq!(r.hcond_plus, Verdict::Fails);
        assert_eq!(r.verdict, Verdict::Fails);
        let r = fa_check(
            &SpectrumModel::Geometric { q: 0.5 },
            &WeightModel::LogPower { scale: 1.0, q: 2.0 },
        )
        .unwrap();
        assert_eq!(r.hcond_plus, Verdict::Fails);
    }

    #[test]
    fn heavy_tail_energy_diverges() {
        let s = SpectrumModel::LogCorrected { alpha: 1.0, q: 2.5 };
        let r = fa_check(
            &s,
            &WeightModel::LogPower {
                scale: 1.0,
                q: 2.25,
            },
        )
        .unwrap();
        assert!(r.energy.is_infinite());
        assert_eq!(r.verdict, Verdict::Fails);
        let r = fa_check(&s, &WeightModel::LogPower { scale: 1.0, q: 1.2 }).unwrap();
        assert!(r.energy.is_finite());
    }

    #[test]
    fn power_law_tail_remainder() {
        let s = SpectrumModel::PowerLaw { alpha: 3.0 };
        let r = fa_check(&s, &WeightModel::Power { scale: 1.0, p: 1.0 }).unwrap();
        // zeta(2) / zeta(3)
        let expected = core::f64::consts::PI.powi(2) / 6.0 / 1.2020569031595942;
        assert!((r.energy - expected).abs() < 1e-8, "{}", r.energy);
        assert_eq!(r.verdict, Verdict::Holds);
        assert!(fa_check(&s, &WeightModel::Power { scale: 1.0, p: 2.0 })
            .unwrap()
            .energy
            .is_infinite());
    }

    #[test]
    fn finite_dimensional_explicit() {
        let r = fa_check(
            &SpectrumModel::Explicit(alloc::vec![0.7, 0.2, 0.1]),
            &WeightModel::Explicit(alloc::vec![0.0, 1.0, 2.0]),
        )
        .unwrap();
        assert!((r.energy - 0.4).abs() < 1e-15);
        assert_eq!(r.verdict, Verdict::Holds);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(fa_check(
            &SpectrumModel::Explicit(alloc::vec![0.2, 0.8]),
            &WeightModel::Power { scale: 1.0, p: 1.0 }
        )
        .is_err());
        assert!(fa_check(
            &SpectrumModel::Geometric { q: 1.5 },
            &WeightModel::Power { scale: 1.0, p: 1.0 }
        )
        .is_err());
        assert!(fa_check(
            &SpectrumModel::PowerLaw { alpha: 1.0 },
            &WeightModel::Power { scale: 1.0, p: 1.0 }
        )
        .is_err());
    }
}
