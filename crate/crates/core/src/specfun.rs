//! Gamma, Beta and Pochhammer utilities plus plain-summation hypergeometric
//! series.
//!
//! `₂F₁` and `ₚF_q` share one summation loop. `hyp_pfq` first cancels
//! numerator/denominator parameters that coincide exactly, so a `₄F₃` whose
//! extra pair cancels gives the same bits as the corresponding `₂F₁`.

use std::f64::consts::PI;

use crate::error::{domain, param, Error, Result};

/// Terms below `tol · |sum|` on this many consecutive steps end the summation.
const QUIET_TERMS: usize = 3;
/// Hard cap on the number of series terms.
pub const MAX_TERMS: usize = 10_000;

// Lanczos approximation, g = 7, nine coefficients.
const LANCZOS_G: f64 = 7.0;
#[allow(clippy::excessive_precision)]
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

fn lanczos_sum(z: f64) -> f64 {
    // z is the shifted argument x − 1.
    let mut acc = LANCZOS[0];
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        acc += c / (z + i as f64);
    }
    acc
}

/// Γ(x) for real `x`; infinite at the poles `0, −1, −2, …`.
pub fn gamma(x: f64) -> f64 {
    if x <= 0.0 && x == x.floor() {
        return f64::INFINITY;
    }
    if x < 0.5 {
        return PI / ((PI * x).sin() * gamma(1.0 - x));
    }
    let z = x - 1.0;
    let t = z + LANCZOS_G + 0.5;
    (2.0 * PI).sqrt() * t.powf(z + 0.5) * (-t).exp() * lanczos_sum(z)
}

/// ln Γ(x) for `x > 0`.
pub fn ln_gamma(x: f64) -> f64 {
    if x < 0.5 {
        return (PI / (PI * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let z = x - 1.0;
    let t = z + LANCZOS_G + 0.5;
    0.5 * (2.0 * PI).ln() + (z + 0.5) * t.ln() - t + lanczos_sum(z).ln()
}

/// Rising factorial `(a)_k = a (a+1) ⋯ (a+k−1)`.
pub fn pochhammer(a: f64, k: usize) -> f64 {
    (0..k).map(|i| a + i as f64).product()
}

/// B(p, q) = Γ(p)Γ(q)/Γ(p+q) for `p, q > 0`.
pub fn beta_fn(p: f64, q: f64) -> Result<f64> {
    if !(p > 0.0 && q > 0.0) {
        return Err(param(format!("beta requires positive arguments, got ({p}, {q})")));
    }
    if p + q > 60.0 {
        return Ok((ln_gamma(p) + ln_gamma(q) - ln_gamma(p + q)).exp());
    }
    Ok(gamma(p) * gamma(q) / gamma(p + q))
}

/// Normalising factor `Γ(n/2) / (√π Γ((n−1)/2))` that turns
/// `∫₀^π h(θ) sin^{n−2}θ dθ` into an integral against the normalised
/// surface measure of `S^{n−1}` for axially symmetric `h`.
pub fn zonal_normalizer(n: usize) -> f64 {
    // 1 / B((n−1)/2, 1/2)
    let half = (n as f64 - 1.0) / 2.0;
    1.0 / (gamma(half) * PI.sqrt() / gamma(half + 0.5))
}

/// Outcome of a truncated series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesResult {
    pub value: f64,
    pub terms_used: usize,
    pub converged: bool,
    /// Relative estimate of the neglected tail.
    pub est_error: f64,
}

impl SeriesResult {
    /// The value, or a non-convergence error.
    pub fn value_checked(&self) -> Result<f64> {
        if self.converged {
            Ok(self.value)
        } else {
            Err(Error::NonConvergence { terms: self.terms_used, last_term: self.est_error })
        }
    }
}

fn nonpositive_integer(v: f64) -> bool {
    v <= 0.0 && v == v.floor()
}

/// Number of terms after which the series terminates, if a numerator
/// parameter is a nonpositive integer.
fn termination(a: &[f64]) -> Option<usize> {
    a.iter().filter(|&&v| nonpositive_integer(v)).map(|&v| (-v) as usize + 1).min()
}

fn sum_series(a: &[f64], b: &[f64], t: f64, tol: f64) -> SeriesResult {
    let stop = termination(a);
    let cap = stop.map_or(MAX_TERMS, |s| s.min(MAX_TERMS));
    let mut term = 1.0f64;
    let mut sum = 1.0f64;
    let mut quiet = 0usize;
    let mut k = 0usize;
    while k + 1 < cap {
        let kf = k as f64;
        let num: f64 = a.iter().map(|ai| ai + kf).product();
        let den: f64 = b.iter().map(|bj| bj + kf).product::<f64>() * (kf + 1.0);
        let ratio = num / den * t;
        term *= ratio;
        sum += term;
        k += 1;
        if stop.is_some() {
            continue;
        }
        let rel = (term / sum).abs();
        if rel <= tol {
            quiet += 1;
        } else {
            quiet = 0;
        }
        if quiet >= QUIET_TERMS {
            let q = ratio.abs().max(t.abs());
            let tail = if q < 1.0 { rel * q / (1.0 - q) } else { f64::INFINITY };
            if tail <= tol {
                return SeriesResult { value: sum, terms_used: k + 1, converged: true, est_error: tail };
            }
        }
    }
    match stop {
        Some(s) if s <= MAX_TERMS => {
            SeriesResult { value: sum, terms_used: k + 1, converged: true, est_error: 0.0 }
        }
        _ => SeriesResult {
            value: sum,
            terms_used: k + 1,
            converged: false,
            est_error: (term / sum).abs(),
        },
    }
}

fn check_series(a: &[f64], b: &[f64], t: f64) -> Result<()> {
    if let Some(bad) = b.iter().find(|&&v| nonpositive_integer(v)) {
        return Err(param(format!("denominator parameter {bad} is a nonpositive integer")));
    }
    if !t.is_finite() {
        return Err(domain("non-finite argument"));
    }
    if termination(a).is_none() {
        let p = a.len();
        let q = b.len();
        if p > q + 1 && t != 0.0 {
            return Err(domain(format!("{p}F{q} diverges for t != 0")));
        }
        if p == q + 1 && t.abs() >= 1.0 {
            return Err(domain(format!("{p}F{q} series requires |t| < 1, got t = {t}")));
        }
    }
    Ok(())
}

/// Gauss hypergeometric `₂F₁(a, b; c; t)` by direct summation.
pub fn hyp2f1(a: f64, b: f64, c: f64, t: f64, tol: f64) -> Result<SeriesResult> {
    let num = [a, b];
    let den = [c];
    check_series(&num, &den, t)?;
    Ok(sum_series(&num, &den, t, tol))
}

/// Generalised hypergeometric `ₚF_q(a; b; t)`.
pub fn hyp_pfq(a: &[f64], b: &[f64], t: f64, tol: f64) -> Result<SeriesResult> {
    let mut num = a.to_vec();
    let mut den = Vec::with_capacity(b.len());
    for &bj in b {
        if let Some(pos) = num.iter().position(|&ai| ai == bj) {
            num.remove(pos);
        } else {
            den.push(bj);
        }
    }
    check_series(&num, &den, t)?;
    Ok(sum_series(&num, &den, t, tol))
}

/// `∫₀^π sin^{μ₁−1}t / (1 + r² − 2r cos t)^{μ₂} dt`
/// `= B(μ₁/2, ½) · ₂F₁(μ₂, μ₂ + (1−μ₁)/2; (1+μ₁)/2; r²)`.
pub fn axis_integral(mu1: f64, mu2: f64, r: f64) -> Result<f64> {
    if !(mu1 > 1.0) || !(mu2 > 0.0) {
        return Err(param(format!("axis integral needs mu1 > 1 and mu2 > 0, got ({mu1}, {mu2})")));
    }
    if !(0.0..1.0).contains(&r) {
        return Err(domain(format!("axis integral needs r in [0, 1), got {r}")));
    }
    let b = beta_fn(mu1 / 2.0, 0.5)?;
    let f = hyp2f1(mu2, mu2 + (1.0 - mu1) / 2.0, (1.0 + mu1) / 2.0, r * r, 1e-16)?;
    Ok(b * f.value_checked()?)
}
