//! Closed-form kernels of the representation formula and their x-gradients.
//!
//! Notation in this module: `s = 1 − |x|²`, `d = |x − ζ|`, `a = |x − y|²`,
//! `b = [x, y]²`, `t = x ⊗ y`.

use std::f64::consts::PI;

use crate::error::{domain, param, Error, Result};
use crate::geometry::{bracket_sq_unchecked, check_dims, dist_sq, norm_sq};
use crate::specfun::gamma;

/// Surface area of `S^{n−1}` and the Green-function constant `c_n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DimensionalConstants {
    pub n: usize,
    pub surface_area: f64,
    pub green_const: f64,
}

impl DimensionalConstants {
    pub fn new(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(param(format!("dimension must be at least 2, got {n}")));
        }
        let nf = n as f64;
        let surface_area = 2.0 * PI.powf(nf / 2.0) / gamma(nf / 2.0);
        let green_const = if uses_log_branch(n) {
            let sign = if (n / 2) % 2 == 1 { 1.0 } else { -1.0 };
            1.0 / (8.0 * sign * surface_area)
        } else {
            1.0 / (2.0 * (4.0 - nf) * (2.0 - nf) * surface_area)
        };
        Ok(Self { n, surface_area, green_const })
    }

    /// Lebesgue volume of the unit ball.
    pub fn ball_volume(&self) -> f64 {
        self.surface_area / self.n as f64
    }
}

/// True for the dimensions whose Green function has the logarithmic form.
pub fn uses_log_branch(n: usize) -> bool {
    n == 2 || n == 4
}

fn check_inner(x: &[f64]) -> Result<f64> {
    let r2 = norm_sq(x);
    if !(r2 < 1.0) {
        return Err(domain(format!("point must lie in the open unit ball, |x| = {}", r2.sqrt())));
    }
    Ok(r2)
}

fn check_kernel_args(n: usize, x: &[f64], zeta: &[f64]) -> Result<f64> {
    if x.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: x.len() });
    }
    check_dims(x, zeta)?;
    let z2 = norm_sq(zeta);
    if (z2 - 1.0).abs() > 1e-10 {
        return Err(domain(format!("boundary point must be a unit vector, |zeta| = {}", z2.sqrt())));
    }
    check_inner(x)
}

/// `H_n` from `s` and `d²`.
#[inline]
pub(crate) fn kernel_h_profile(n: usize, s: f64, d2: f64) -> f64 {
    0.5 * s * s / d2.powf(n as f64 / 2.0)
}

/// `K_n` from `s` and `d²`.
#[inline]
pub(crate) fn kernel_k_profile(n: usize, s: f64, d2: f64) -> f64 {
    let nf = n as f64;
    0.25 * s * s / d2.powf(nf / 2.0 + 1.0) * (nf * s - (nf - 4.0) * d2)
}

/// `H_n(x, ζ) = ½ (1−|x|²)² / |x−ζ|ⁿ`.
pub fn kernel_h(n: usize, x: &[f64], zeta: &[f64]) -> Result<f64> {
    let r2 = check_kernel_args(n, x, zeta)?;
    Ok(kernel_h_profile(n, 1.0 - r2, dist_sq(x, zeta)))
}

/// `K_n(x, ζ) = ¼ (1−|x|²)² / |x−ζ|^{n+2} · (n(1−|x|²) − (n−4)|x−ζ|²)`.
///
/// Changes sign for `n ≥ 5` wherever `n(1−|x|²) < (n−4)|x−ζ|²`.
pub fn kernel_k(n: usize, x: &[f64], zeta: &[f64]) -> Result<f64> {
    let r2 = check_kernel_args(n, x, zeta)?;
    Ok(kernel_k_profile(n, 1.0 - r2, dist_sq(x, zeta)))
}

/// Gradient of `H_n` in `x`.
pub fn grad_h(n: usize, x: &[f64], zeta: &[f64]) -> Result<Vec<f64>> {
    let r2 = check_kernel_args(n, x, zeta)?;
    let nf = n as f64;
    let s = 1.0 - r2;
    let d2 = dist_sq(x, zeta);
    let dn = d2.powf(nf / 2.0);
    let dn2 = dn * d2;
    Ok((0..n)
        .map(|k| -2.0 * s * x[k] / dn - 0.5 * nf * s * s * (x[k] - zeta[k]) / dn2)
        .collect())
}

/// Gradient of `K_n` in `x`.
pub fn grad_k(n: usize, x: &[f64], zeta: &[f64]) -> Result<Vec<f64>> {
    let r2 = check_kernel_args(n, x, zeta)?;
    let nf = n as f64;
    let s = 1.0 - r2;
    let d2 = dist_sq(x, zeta);
    let dn = d2.powf(nf / 2.0);
    let dn2 = dn * d2;
    let dn4 = dn2 * d2;
    Ok((0..n)
        .map(|k| {
            let u = x[k] - zeta[k];
            0.25 * (-6.0 * nf * s * s * x[k] / dn2 - nf * (nf + 2.0) * s.powi(3) * u / dn4
                + 4.0 * (nf - 4.0) * s * x[k] / dn
                + (nf - 4.0) * nf * s * s * u / dn2)
        })
        .collect())
}

fn check_green_args(n: usize, x: &[f64], y: &[f64]) -> Result<()> {
    if x.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: x.len() });
    }
    check_dims(x, y)?;
    check_inner(x)?;
    check_inner(y)?;
    Ok(())
}

/// `G(x, y)` from `a = |x−y|²`, `b = [x,y]²`, `t = x ⊗ y`; `a > 0`.
#[inline]
fn green_from_parts(n: usize, c: f64, a: f64, b: f64, t: f64) -> f64 {
    let nf = n as f64;
    let p = (4.0 - nf) / 2.0;
    if uses_log_branch(n) {
        c * (a.powf(p) * (a / b).ln() + t * b.powf(p - 1.0))
    } else {
        c * (a.powf(p) - b.powf(p) - (nf - 4.0) / 2.0 * t * b.powf(p - 1.0))
    }
}

/// Biharmonic Green function of the unit ball.
///
/// On the diagonal the value is the finite limit for `n = 2` and `n = 3`;
/// for `n ≥ 4` the diagonal is singular and an error is returned.
pub fn green_g(n: usize, x: &[f64], y: &[f64]) -> Result<f64> {
    check_green_args(n, x, y)?;
    let c = DimensionalConstants::new(n)?.green_const;
    let a = dist_sq(x, y);
    let b = bracket_sq_unchecked(x, y);
    let t = (1.0 - norm_sq(x)) * (1.0 - norm_sq(y));
    if a == 0.0 {
        return match n {
            2 => Ok(c * t),
            3 => Ok(c * (-b.sqrt() + 0.5 * t / b.sqrt())),
            _ => Err(Error::Singular(format!("Green function diagonal x = y is singular for n = {n}"))),
        };
    }
    Ok(green_from_parts(n, c, a, b, t))
}

/// Gradient of the Green function in its first argument; `x ≠ y`.
pub fn grad_g(n: usize, x: &[f64], y: &[f64]) -> Result<Vec<f64>> {
    check_green_args(n, x, y)?;
    let c = DimensionalConstants::new(n)?.green_const;
    let nf = n as f64;
    let p = (4.0 - nf) / 2.0;
    let a = dist_sq(x, y);
    if a == 0.0 {
        return Err(Error::Singular("Green gradient is undefined on the diagonal".into()));
    }
    let b = bracket_sq_unchecked(x, y);
    let y2 = norm_sq(y);
    let t = (1.0 - norm_sq(x)) * (1.0 - y2);
    let bp1 = b.powf(p - 1.0);
    let bp2 = bp1 / b;
    Ok((0..n)
        .map(|k| {
            let da = 2.0 * (x[k] - y[k]);
            let db = 2.0 * (x[k] * y2 - y[k]);
            let dt = -2.0 * x[k] * (1.0 - y2);
            let tail = dt * bp1 + t * (p - 1.0) * bp2 * db;
            if uses_log_branch(n) {
                let ap = a.powf(p);
                c * (p * ap / a * da * (a / b).ln() + ap * (da / a - db / b) + tail)
            } else {
                c * (p * a.powf(p - 1.0) * da - p * b.powf(p - 1.0) * db - (nf - 4.0) / 2.0 * tail)
            }
        })
        .collect())
}

/// Radial profile of the Green function after the substitution `y = φ_x(z)`:
/// `G(x, φ_x(z)) = c_n (s/[x,z])^{4−n} · profile(|z|)`.
///
/// `ρ^{4−n} − 1 − (n−4)/2 (1−ρ²)` in the power case and
/// `ρ^{4−n} log ρ² + 1 − ρ²` in the logarithmic case; both have a double
/// zero at `ρ = 1`.
pub fn green_profile(n: usize, rho: f64) -> f64 {
    let nf = n as f64;
    let q = 1.0 - rho * rho;
    if uses_log_branch(n) {
        let lead = if rho == 0.0 {
            if n == 2 {
                0.0
            } else {
                f64::NEG_INFINITY
            }
        } else {
            rho.powf(4.0 - nf) * (rho * rho).ln()
        };
        lead + q
    } else {
        rho.powf(4.0 - nf) - 1.0 - (nf - 4.0) / 2.0 * q
    }
}

/// `G(x, φ_x(z))` evaluated through the Möbius form.
pub fn green_pullback(n: usize, x: &[f64], z: &[f64]) -> Result<f64> {
    check_green_args(n, x, z)?;
    let c = DimensionalConstants::new(n)?.green_const;
    let s = 1.0 - norm_sq(x);
    let bxz = bracket_sq_unchecked(x, z).sqrt();
    Ok(c * (s / bxz).powf(4.0 - n as f64) * green_profile(n, norm_sq(z).sqrt()))
}
