//! The Heinz–Schwarz-type estimate: recentering coefficients, the axis
//! profiles `U` and `U*`, their closed forms and series, and the exact Green
//! mass.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{domain, param, Result};
use crate::geometry::norm;
use crate::quadrature::gauss::graded_angle_breaks;
use crate::quadrature::integrate_adaptive;
use crate::solver::{potential_h, potential_k, solve_eval, Problem, SupNorms};
use crate::specfun::{gamma, hyp_pfq, zonal_normalizer};

/// Recentering coefficients `(δ₁(r), δ₂(r))`.
pub fn delta_coeffs(n: usize, r: f64) -> (f64, f64) {
    let nf = n as f64;
    let q = 1.0 - r * r;
    let p = 1.0 + r * r;
    let d1 = nf / 4.0 * q.powi(3) / p.powf((nf + 2.0) / 2.0) - (nf - 4.0) / 4.0 * q * q / p.powf(nf / 2.0);
    let d2 = q * q / p.powf(nf / 2.0);
    (d1, d2)
}

/// The radius where `δ₁` changes sign: `√(2/(n−2))` for `n ≥ 5`, none for
/// `n ≤ 4`.
pub fn delta1_sign_change(n: usize) -> Option<f64> {
    (n >= 5).then(|| (2.0 / (n as f64 - 2.0)).sqrt())
}

/// Sign change of `δ₁` located numerically by a grid scan and bisection.
pub fn delta1_sign_change_numeric(n: usize, grid: usize) -> Option<f64> {
    let f = |r: f64| delta_coeffs(n, r).0;
    let h = 1.0 / grid as f64;
    for i in 0..grid - 1 {
        let (a, b) = (i as f64 * h, (i + 1) as f64 * h);
        if f(a) > 0.0 && f(b) <= 0.0 {
            let (mut lo, mut hi) = (a, b);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if f(mid) > 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            return Some(0.5 * (lo + hi));
        }
    }
    None
}

/// Axis profile selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Profile {
    /// `U = P[χ₊ − χ₋]` with the harmonic Poisson kernel.
    U,
    /// `U*` with the kernel `(1−|x|²)³/|x−ζ|^{n+2}`.
    UStar,
}

/// `U(r e_n)` or `U*(r e_n)` by adaptive quadrature of the polar reduction.
/// `level` sets the number of initial panels per graded interval.
pub fn u_eval(n: usize, r: f64, which: Profile, level: usize) -> Result<f64> {
    if n < 2 {
        return Err(param(format!("dimension must be at least 2, got {n}")));
    }
    if !(0.0..1.0).contains(&r) {
        return Err(domain(format!("axis profile needs r in [0, 1), got {r}")));
    }
    let nf = n as f64;
    let q = 1.0 - r * r;
    let kernel = move |t: f64| {
        let d2 = 1.0 + r * r - 2.0 * r * t.cos();
        match which {
            Profile::U => q / d2.powf(nf / 2.0),
            Profile::UStar => q.powi(3) / d2.powf(nf / 2.0 + 1.0),
        }
    };
    let power = n as i32 - 2;
    let integrand = |t: f64| kernel(t) * t.sin().powi(power);
    let mut breaks = Vec::new();
    for w in graded_angle_breaks(1.0 - r).windows(2) {
        let k = level.max(1);
        breaks.extend((0..k).map(|i| w[0] + (w[1] - w[0]) * i as f64 / k as f64));
    }
    breaks.retain(|&t| t > 0.0);
    let half = std::f64::consts::FRAC_PI_2;
    let upper: Vec<f64> = breaks.iter().copied().filter(|&t| t < half).collect();
    let lower: Vec<f64> = breaks.iter().copied().filter(|&t| t > half).collect();
    let plus = integrate_adaptive(integrand, 0.0, half, &upper, 1e-15, 1e-14);
    let minus = integrate_adaptive(integrand, half, PI, &lower, 1e-15, 1e-14);
    Ok(zonal_normalizer(n) * (plus.value - minus.value))
}

/// Below this radius the `0/0` closed forms switch to their Taylor series.
pub const SMALL_R: f64 = 0.01;

/// Closed forms of `U(r e_n)` and `U*(r e_n)` for `n ∈ {2, 3, 4}`.
pub fn table1_closed(n: usize, r: f64, which: Profile) -> Result<f64> {
    if !(0.0..1.0).contains(&r) {
        return Err(domain(format!("closed forms need r in [0, 1), got {r}")));
    }
    let r2 = r * r;
    let p = 1.0 + r2;
    let v = match (n, which) {
        (2, Profile::U) => 4.0 * r.atan() / PI,
        (2, Profile::UStar) => 2.0 / PI * (2.0 * r * (1.0 - r2) / p + p * (2.0 * r / p).asin()),
        (3, Profile::U) if r < SMALL_R => series(r, &[1.5, -7.0 / 8.0, 11.0 / 16.0, -75.0 / 128.0, 133.0 / 256.0, -483.0 / 1024.0]),
        (3, Profile::U) => (r2 - 1.0 + p.sqrt()) / (r * p.sqrt()),
        (3, Profile::UStar) if r < SMALL_R => series(
            r,
            &[2.5, -25.0 / 8.0, 71.0 / 16.0, -689.0 / 128.0, 1581.0 / 256.0, -21119.0 / 3072.0],
        ),
        (3, Profile::UStar) => {
            ((1.0 + 4.0 * r2 + 3.0 * r2 * r2) * p.sqrt() + r2.powi(3) - 3.0 * r2 * r2 + 3.0 * r2 - 1.0)
                / (3.0 * r * p.powf(1.5))
        }
        (4, Profile::U) if r < SMALL_R => {
            series(
                r,
                &[16.0 / 3.0, -64.0 / 15.0, 144.0 / 35.0, -256.0 / 63.0, 400.0 / 99.0, -576.0 / 143.0],
            ) / PI
        }
        (4, Profile::U) => (2.0 * r * (r2 - 1.0) + 2.0 * p * p * r.atan()) / (PI * r2 * p),
        (4, Profile::UStar) => 2.0 / PI * (2.0 * r * (1.0 - r2) / (p * p) + (2.0 * r / p).asin()),
        _ => return Err(param(format!("closed forms exist only for n in {{2, 3, 4}}, got {n}"))),
    };
    Ok(v)
}

/// `Σ c_j r^{2j+1}`.
fn series(r: f64, coeffs: &[f64]) -> f64 {
    let r2 = r * r;
    coeffs.iter().rev().fold(0.0, |acc, c| acc * r2 + c) * r
}

/// Largest radius accepted by [`ustar_series`].
pub const SERIES_MAX_R: f64 = 0.95;

/// `U*(r e_n)` through its hypergeometric series.
pub fn ustar_series(n: usize, r: f64) -> Result<f64> {
    if n < 2 {
        return Err(param(format!("dimension must be at least 2, got {n}")));
    }
    if !(0.0..=SERIES_MAX_R).contains(&r) {
        return Err(domain(format!("series evaluation needs r in [0, {SERIES_MAX_R}], got {r}")));
    }
    if r == 0.0 {
        return Ok(0.0);
    }
    let nf = n as f64;
    let p = 1.0 + r * r;
    let t = 4.0 * r * r / (p * p);
    let f = hyp_pfq(&[1.0, 1.0 + nf / 4.0, 1.5 + nf / 4.0], &[1.5, 0.5 + nf / 2.0], t, 1e-16)?;
    let pref = gamma(nf / 2.0) * 2.0 * (2.0 + nf) * r * (1.0 - r * r).powi(3)
        / (PI.sqrt() * gamma((nf - 1.0) / 2.0) * (nf - 1.0) * p.powf(2.0 + nf / 2.0));
    Ok(pref * f.value_checked()?)
}

/// `U(r e_n)` and `U*(r e_n)` at the default quadrature level.
pub fn axis_profiles(n: usize, r: f64) -> Result<(f64, f64)> {
    Ok((u_eval(n, r, Profile::U, 4)?, u_eval(n, r, Profile::UStar, 4)?))
}

/// One row of the axis-profile table. Closed-form columns are `None` for
/// `n ∉ {2, 3, 4}`, the series column above [`SERIES_MAX_R`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Table1Row {
    pub n: usize,
    pub r: f64,
    pub u_closed: Option<f64>,
    pub u_quad: f64,
    pub ustar_closed: Option<f64>,
    pub ustar_series: Option<f64>,
    pub ustar_quad: f64,
    /// Largest pairwise difference among the available `U` values and among
    /// the available `U*` values.
    pub max_abs_disagreement: f64,
}

/// The default radii `0.1, 0.2, …, 0.9`.
pub fn default_radii() -> Vec<f64> {
    (1..=9).map(|i| i as f64 / 10.0).collect()
}

fn spread(vals: &[f64]) -> f64 {
    let mut worst: f64 = 0.0;
    for (i, a) in vals.iter().enumerate() {
        for b in &vals[i + 1..] {
            worst = worst.max((a - b).abs());
        }
    }
    worst
}

/// Closed form, series and quadrature values of `U` and `U*` at each radius.
pub fn table1_rows(n: usize, radii: &[f64], level: usize) -> Result<Vec<Table1Row>> {
    radii
        .iter()
        .map(|&r| {
            let has_closed = (2..=4).contains(&n);
            let u_closed = if has_closed { Some(table1_closed(n, r, Profile::U)?) } else { None };
            let ustar_closed = if has_closed { Some(table1_closed(n, r, Profile::UStar)?) } else { None };
            let ustar_series = if r <= SERIES_MAX_R { Some(ustar_series(n, r)?) } else { None };
            let u_quad = u_eval(n, r, Profile::U, level)?;
            let ustar_quad = u_eval(n, r, Profile::UStar, level)?;
            let us: Vec<f64> = u_closed.into_iter().chain([u_quad]).collect();
            let uss: Vec<f64> = ustar_closed.into_iter().chain(ustar_series).chain([ustar_quad]).collect();
            Ok(Table1Row {
                n,
                r,
                u_closed,
                u_quad,
                ustar_closed,
                ustar_series,
                ustar_quad,
                max_abs_disagreement: spread(&us).max(spread(&uss)),
            })
        })
        .collect()
}

/// `∫ |G(x, y)| dV(y) = (1−|x|²)² / (8n(n+2))` at `|x| = r`.
pub fn green_mass(n: usize, r: f64) -> f64 {
    let nf = n as f64;
    (1.0 - r * r).powi(2) / (8.0 * nf * (nf + 2.0))
}

/// The four right-hand-side terms at `|x| = r`, given the norms and the
/// axis profiles.
pub fn schwarz_rhs_with(n: usize, norms: &SupNorms, r: f64, u: f64, ustar: f64) -> [f64; 4] {
    let nf = n as f64;
    let q = 1.0 - r * r;
    [
        (nf - 4.0).abs() / 4.0 * norms.phi1 * q * u,
        nf / 4.0 * norms.phi1 * ustar,
        norms.phi2 / 2.0 * q * u,
        norms.g / (8.0 * nf * (nf + 2.0)) * q * q,
    ]
}

/// The four right-hand-side terms at `|x| = r`.
pub fn schwarz_rhs(n: usize, norms: &SupNorms, r: f64) -> Result<[f64; 4]> {
    let (u, ustar) = axis_profiles(n, r)?;
    Ok(schwarz_rhs_with(n, norms, r, u, ustar))
}

/// Fixed part of the comparison tolerance.
pub const BOUND_TOL: f64 = 1e-6;

/// Comparison tolerance: `1e−6` plus a quadrature budget scaled by the data.
pub fn error_budget(n: usize, norms: &SupNorms) -> f64 {
    let nf = n as f64;
    BOUND_TOL + 1e-6 * (1.0 + norms.phi1 + norms.phi2 + norms.g / (8.0 * nf * (nf + 2.0)))
}

/// Both sides of the estimate at one point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub x: Vec<f64>,
    pub lhs: f64,
    pub rhs_terms: [f64; 4],
    pub tolerance: f64,
    pub satisfied: bool,
}

impl BoundReport {
    pub fn rhs(&self) -> f64 {
        self.rhs_terms.iter().sum()
    }
}

/// The centre values `K[φ₁](0)` and `H[φ₂](0)` used for recentering.
#[derive(Debug, Clone, PartialEq)]
pub struct CentreValues {
    pub k0: Vec<f64>,
    pub h0: Vec<f64>,
}

impl CentreValues {
    pub fn compute(problem: &Problem) -> Result<Self> {
        let origin = vec![0.0; problem.n()];
        Ok(Self { k0: potential_k(problem, &origin)?.value, h0: potential_h(problem, &origin)?.value })
    }
}

/// Check the estimate at `x` with precomputed norms and centre values.
pub fn schwarz_check_with(problem: &Problem, x: &[f64], norms: &SupNorms, centre: &CentreValues) -> Result<BoundReport> {
    let n = problem.n();
    let r = norm(x);
    let f = solve_eval(problem, x)?.value;
    let (d1, d2) = delta_coeffs(n, r);
    let diff: Vec<f64> = f
        .iter()
        .zip(&centre.k0)
        .zip(&centre.h0)
        .map(|((fi, k), h)| fi - d1 * k - d2 * h)
        .collect();
    let lhs = norm(&diff);
    let rhs_terms = schwarz_rhs(n, norms, r)?;
    let tolerance = error_budget(n, norms);
    let satisfied = lhs <= rhs_terms.iter().sum::<f64>() + tolerance;
    Ok(BoundReport { x: x.to_vec(), lhs, rhs_terms, tolerance, satisfied })
}

/// Check the estimate at `x`, estimating the data norms by sampling.
pub fn schwarz_check(problem: &Problem, x: &[f64]) -> Result<BoundReport> {
    let norms = SupNorms::estimate(problem);
    let centre = CentreValues::compute(problem)?;
    schwarz_check_with(problem, x, &norms, &centre)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::ProblemSpec;

    #[test]
    fn delta_endpoints() {
        for n in 2..=7 {
            let (a, b) = delta_coeffs(n, 0.0);
            assert!((a - 1.0).abs() < 1e-15 && (b - 1.0).abs() < 1e-15);
            assert_eq!(delta_coeffs(n, 1.0), (0.0, 0.0));
            for i in 0..=100 {
                assert!(delta_coeffs(n, i as f64 / 100.0).1 >= 0.0);
            }
        }
    }

    #[test]
    fn delta1_sign_change_threshold() {
        for n in 2..=4 {
            assert_eq!(delta1_sign_change(n), None);
            assert_eq!(delta1_sign_change_numeric(n, 1000), None);
        }
        for n in 5..=10 {
            let exact = delta1_sign_change(n).unwrap();
            let found = delta1_sign_change_numeric(n, 1000).unwrap();
            assert!((exact - found).abs() < 1e-12, "n={n}");
            assert!(delta_coeffs(n, 0.5 * (exact + 1.0)).0 < 0.0);
        }
        assert!(delta_coeffs(6, 0.8).0 < 0.0);
    }

    #[test]
    fn axis_profile_examples() {
        for n in 2..=5 {
            assert!(u_eval(n, 0.0, Profile::U, 4).unwrap().abs() < 1e-15);
        }
        let u = u_eval(2, 0.5, Profile::U, 4).unwrap();
        assert!((u - 4.0 * 0.5f64.atan() / PI).abs() < 1e-12);
        assert!((u - 0.590_334_5).abs() < 1e-7);
        let us = u_eval(3, 0.6, Profile::UStar, 4).unwrap();
        assert!((us - table1_closed(3, 0.6, Profile::UStar).unwrap()).abs() < 1e-8);
        assert!(u_eval(3, 1.0, Profile::U, 4).is_err());
    }

    #[test]
    fn closed_form_examples() {
        let r: f64 = 0.25;
        assert!((table1_closed(2, r, Profile::U).unwrap() - 4.0 * r.atan() / PI).abs() < 1e-16);
        let v = table1_closed(4, 0.5, Profile::UStar).unwrap();
        let expect = 2.0 / PI * (2.0 * 0.5 * 0.75 / 1.25f64.powi(2) + (1.0f64 / 1.25).asin());
        assert!((v - expect).abs() < 1e-15);
        assert!(table1_closed(5, 0.5, Profile::U).is_err());
        assert!((table1_closed(2, 0.999, Profile::U).unwrap() - 1.0).abs() < 1e-2);
    }

    #[test]
    fn small_radius_series_join_the_closed_forms() {
        for (n, which) in [(3, Profile::U), (3, Profile::UStar), (4, Profile::U)] {
            let below = table1_closed(n, SMALL_R * (1.0 - 1e-12), which).unwrap();
            let above = table1_closed(n, SMALL_R, which).unwrap();
            assert!((below - above).abs() < 1e-12, "n={n} {which:?}");
            let quad = u_eval(n, 0.005, which, 4).unwrap();
            assert!((table1_closed(n, 0.005, which).unwrap() - quad).abs() < 1e-13);
            assert_eq!(table1_closed(n, 0.0, which).unwrap(), 0.0);
        }
    }

    #[test]
    fn series_route_examples() {
        assert_eq!(ustar_series(3, 0.0).unwrap(), 0.0);
        let s = ustar_series(2, 0.4).unwrap();
        assert!((s - table1_closed(2, 0.4, Profile::UStar).unwrap()).abs() < 1e-8);
        let s = ustar_series(5, 0.3).unwrap();
        assert!((s - u_eval(5, 0.3, Profile::UStar, 4).unwrap()).abs() < 1e-7);
        assert!(ustar_series(3, 0.96).is_err());
    }

    #[test]
    fn profiles_are_monotone() {
        for n in 2..=5 {
            let vals: Vec<f64> = (0..50).map(|i| u_eval(n, 0.95 * i as f64 / 49.0, Profile::U, 4).unwrap()).collect();
            assert!(vals.windows(2).all(|w| w[1] > w[0]), "n={n}");
        }
    }

    #[test]
    fn table_rows_agree() {
        for n in 2..=4 {
            let rows = table1_rows(n, &default_radii(), 4).unwrap();
            assert_eq!(rows.len(), 9);
            assert!(rows.iter().all(|r| r.max_abs_disagreement < 1e-7), "n={n}");
        }
        let rows = table1_rows(5, &default_radii(), 4).unwrap();
        assert!(rows.iter().all(|r| r.u_closed.is_none() && r.max_abs_disagreement < 1e-6));
    }

    #[test]
    fn rhs_examples() {
        let n2 = SupNorms { phi1: 0.0, phi2: 0.0, g: 64.0 };
        let t = schwarz_rhs(2, &n2, 0.0).unwrap();
        assert!((t[3] - 1.0).abs() < 1e-15 && t[0] == 0.0 && t[1] == 0.0 && t[2] == 0.0);
        let n4 = SupNorms { phi1: 1.0, phi2: 0.0, g: 0.0 };
        for r in [0.1, 0.5, 0.9] {
            assert_eq!(schwarz_rhs(4, &n4, r).unwrap()[0], 0.0);
        }
        // Near the sphere the U* term tends to ‖φ₁‖ (U* → 4/n); the other terms vanish.
        let all = SupNorms { phi1: 1.0, phi2: 1.0, g: 1.0 };
        for n in 2..=5 {
            let t = schwarz_rhs(n, &all, 0.999).unwrap();
            assert!(t[0] < 1e-2 && t[2] < 1e-2 && t[3] < 1e-5);
            assert!((t[1] - 1.0).abs() < 1e-2, "n={n}: {}", t[1]);
        }
    }

    #[test]
    fn green_mass_values() {
        assert_eq!(green_mass(2, 0.0), 1.0 / 64.0);
        assert_eq!(green_mass(4, 0.0), 1.0 / 192.0);
        assert!((green_mass(3, 0.0) - 1.0 / 120.0).abs() < 1e-18);
    }

    #[test]
    fn sharp_example_is_an_equality_at_the_centre() {
        for n in 2..=5 {
            let p = Problem::new(ProblemSpec::sharp_example(n, 2)).unwrap();
            let rep = schwarz_check(&p, &vec![0.0; n]).unwrap();
            assert!(rep.satisfied);
            assert!((rep.lhs - 1.0).abs() < 1e-4 && (rep.rhs() - 1.0).abs() < 1e-4, "n={n}: {rep:?}");
        }
    }
}
