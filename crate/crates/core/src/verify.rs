//! Verification suites: each check recomputes an identity or inequality by
//! an independent route and reports the observed error against a tolerance.

use std::str::FromStr;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::bounds::{
    default_radii, delta1_sign_change, delta1_sign_change_numeric, error_budget, green_mass, schwarz_check_with,
    table1_rows, CentreValues, SERIES_MAX_R,
};
use crate::error::{param, Error, Result};
use crate::geometry::{bracket, dist_sq, mobius, mobius_jacobian, norm, norm_sq};
use crate::kernels::{grad_g, grad_h, grad_k, green_g, kernel_h, kernel_k};
use crate::lipschitz::{lipschitz_estimate, solution_bound, Majorant};
use crate::par::map_indexed;
use crate::quadrature::gauss::graded_angle_breaks;
use crate::quadrature::{integrate_adaptive, integrate_ball_about, integrate_green_mobius, ZonalRule};
use crate::solver::{solve_many, Problem, ProblemSpec, SupNorms, DEFAULT_LEVEL};
use crate::specfun::axis_integral;

/// One verified statement.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    /// The identity or inequality under test, written out.
    pub anchor: String,
    pub error: f64,
    pub tolerance: f64,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl Check {
    fn new(name: impl Into<String>, anchor: impl Into<String>, error: f64, tolerance: f64) -> Self {
        Self { name: name.into(), anchor: anchor.into(), error, tolerance, passed: error <= tolerance, detail: None }
    }

    fn with_detail(mut self, d: impl Into<String>) -> Self {
        self.detail = Some(d.into());
        self
    }

    fn failed(name: impl Into<String>, anchor: impl Into<String>, tolerance: f64, e: &Error) -> Self {
        Self {
            name: name.into(),
            anchor: anchor.into(),
            error: f64::INFINITY,
            tolerance,
            passed: false,
            detail: Some(e.to_string()),
        }
    }

    /// A one-line human-readable summary.
    pub fn line(&self) -> String {
        let status = if self.passed { "PASS" } else { "FAIL" };
        let mut s = format!("{status} {} [{}] error={:.3e} tol={:.1e}", self.name, self.anchor, self.error, self.tolerance);
        if let Some(d) = &self.detail {
            s.push_str(" (");
            s.push_str(d);
            s.push(')');
        }
        s
    }
}

/// Named groups of checks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Identities,
    Bounds,
    Green,
    Table1,
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "identities" => Ok(Suite::Identities),
            "bounds" => Ok(Suite::Bounds),
            "green" => Ok(Suite::Green),
            "table1" => Ok(Suite::Table1),
            _ => Err(param(format!("unknown suite {s:?}; expected identities, bounds, green or table1"))),
        }
    }
}

/// Options shared by all suites.
#[derive(Debug, Clone, PartialEq)]
pub struct VerifyConfig {
    /// Restrict to one dimension; otherwise the suite's default set.
    pub n: Option<usize>,
    pub seed: u64,
    pub level: usize,
    /// Replaces every check's tolerance.
    pub tolerance: Option<f64>,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self { n: None, seed: 1, level: DEFAULT_LEVEL, tolerance: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub checks: Vec<Check>,
}

impl SuiteReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

/// Run a suite. Evaluation failures become failed checks.
pub fn run_suite(suite: Suite, cfg: &VerifyConfig) -> Result<SuiteReport> {
    let dims: Vec<usize> = match cfg.n {
        Some(n) if n < 2 => return Err(param(format!("dimension must be at least 2, got {n}"))),
        Some(n) => vec![n],
        None if suite == Suite::Table1 => vec![2, 3, 4],
        None => vec![2, 3, 4, 5],
    };
    let mut checks = Vec::new();
    for &n in &dims {
        match suite {
            Suite::Identities => {
                checks.push(kernel_normalization(n, &[0.0, 0.25, 0.5, 0.75, 0.9], cfg.level));
                checks.push(poisson_moment(n, &[0.0, 0.25, 0.5, 0.75, 0.9], cfg.level));
                checks.extend(mobius_identities(n, 10_000, cfg.seed));
                checks.extend(kernel_gradients(n, 100, cfg.seed));
            }
            Suite::Green => {
                checks.push(green_mass_direct(n, &[0.0, 0.2, 0.4, 0.6, 0.8], cfg.level));
                checks.push(green_mass_mobius(n, &[0.0, 0.2, 0.4, 0.6, 0.8], cfg.level));
                checks.push(sharp_solution(n, 10, cfg.seed));
            }
            Suite::Table1 => checks.push(table1_agreement(n, &default_radii(), cfg.level)),
            Suite::Bounds => {
                checks.push(delta1_threshold(n));
                checks.push(sharp_equality(n));
                checks.push(schwarz_sweep(n, 10, 10, cfg.seed));
                checks.push(lipschitz_mechanism(n, 3, 200, cfg.seed));
                checks.push(lipschitz_linear(n, 200));
            }
        }
    }
    if suite == Suite::Identities {
        checks.push(axis_integral_check(20, cfg.seed));
        checks.extend(manufactured_solutions(20, cfg.seed));
    }
    if let Some(t) = cfg.tolerance {
        for c in &mut checks {
            c.tolerance = t;
            c.passed = c.error <= t;
        }
    }
    Ok(SuiteReport { suite, checks })
}

/// Point with radius at most `rmax`, uniform in volume.
pub fn random_ball_point(rng: &mut impl Rng, n: usize, rmax: f64) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let r2 = norm_sq(&v);
        if r2 > 1e-12 && r2 <= 1.0 {
            return v.into_iter().map(|c| c * rmax).collect();
        }
    }
}

fn random_unit(rng: &mut impl Rng, n: usize) -> Vec<f64> {
    let v = random_ball_point(rng, n, 1.0);
    let r = norm(&v);
    v.into_iter().map(|c| c / r).collect()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1.0)
}

/// `∫ K_n(x, ζ) dσ(ζ) = 1` along `e₁`.
pub fn kernel_normalization(n: usize, radii: &[f64], level: usize) -> Check {
    let name = format!("kernel_normalization n={n}");
    let anchor = "∫ K_n(x,ζ) dσ(ζ) = 1";
    let run = || -> Result<f64> {
        let mut worst: f64 = 0.0;
        for &r in radii {
            let mut x = vec![0.0; n];
            x[0] = r;
            let rule = ZonalRule::new(&x, level)?;
            let q = rule.integrate(1, |_| 1.0, |z, o| o[0] = kernel_k(n, &x, z).unwrap_or(f64::NAN))?[0];
            worst = worst.max((q - 1.0).abs());
        }
        Ok(worst)
    };
    match run() {
        Ok(e) => Check::new(name, anchor, e, 1e-8),
        Err(e) => Check::failed(name, anchor, 1e-8, &e),
    }
}

/// `∫ |x−ζ|^{−n−2} dσ = (1/(1−r²)²)(1 + 4r²/(n(1−r²)))`, and the mean of the
/// `H` kernel, `∫ H_n dσ = (1−r²)/2`.
pub fn poisson_moment(n: usize, radii: &[f64], level: usize) -> Check {
    let name = format!("poisson_moment n={n}");
    let anchor = "∫ dσ/|x−ζ|^{n+2} = (n/(1−|x|²)² + 4|x|²/(1−|x|²)³)/n";
    let nf = n as f64;
    let run = || -> Result<f64> {
        let mut worst: f64 = 0.0;
        for &r in radii {
            let mut x = vec![0.0; n];
            x[0] = r;
            let rule = ZonalRule::new(&x, level)?;
            let q = rule.integrate(1, |_| 1.0, |z, o| o[0] = dist_sq(&x, z).powf(-(nf + 2.0) / 2.0))?[0];
            let s = 1.0 - r * r;
            worst = worst.max(rel(q, (nf / (s * s) + 4.0 * r * r / s.powi(3)) / nf));
            let h = rule.integrate(1, |_| 1.0, |z, o| o[0] = kernel_h(n, &x, z).unwrap_or(f64::NAN))?[0];
            worst = worst.max(rel(h, s / 2.0));
        }
        Ok(worst)
    };
    match run() {
        Ok(e) => Check::new(name, anchor, e, 1e-10),
        Err(e) => Check::failed(name, anchor, 1e-10, &e),
    }
}

/// Jacobian matrix of `y ↦ φ_x(y)` by the quotient rule, independent of the
/// closed-form determinant.
fn mobius_derivative(x: &[f64], y: &[f64]) -> DMatrix<f64> {
    let n = x.len();
    let d2 = dist_sq(x, y);
    let s = 1.0 - norm_sq(x);
    let x2 = norm_sq(x);
    let b2 = 1.0 - 2.0 * crate::geometry::dot(x, y) + x2 * norm_sq(y);
    let phi: Vec<f64> = (0..n).map(|k| (d2 * x[k] - s * (y[k] - x[k])) / b2).collect();
    DMatrix::from_fn(n, n, |k, j| {
        let dd2 = -2.0 * (x[j] - y[j]);
        let db2 = -2.0 * x[j] + 2.0 * x2 * y[j];
        let dnum = dd2 * x[k] - if j == k { s } else { 0.0 };
        dnum / b2 - phi[k] * db2 / b2
    })
}

/// Möbius identities and bracket symmetry over random pairs (relative errors).
pub fn mobius_identities(n: usize, pairs: usize, seed: u64) -> Vec<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x6d6f_6269 ^ n as u64);
    let mut worst = [0.0f64; 4];
    let mut failure = None;
    for _ in 0..pairs {
        let x = random_ball_point(&mut rng, n, 0.95);
        let y = random_ball_point(&mut rng, n, 0.95);
        let run = || -> Result<[f64; 4]> {
            let p = mobius(&x, &y)?;
            let b = bracket(&x, &y)?;
            let norm_id = rel(norm(&p), dist_sq(&x, &y).sqrt() / b);
            let comp_id = rel(1.0 - norm_sq(&p), (1.0 - norm_sq(&x)) * (1.0 - norm_sq(&y)) / (b * b));
            let det = mobius_derivative(&x, &y).determinant().abs();
            let jac = mobius_jacobian(&x, &y)?;
            let jac_id = (det - jac).abs() / jac.max(1.0);
            let disp = rel(dist_sq(&x, &p).sqrt(), norm(&y) * (1.0 - norm_sq(&x)) / b);
            let back = mobius(&x, &p)?;
            let inv = dist_sq(&back, &y).sqrt();
            let sym = (b - bracket(&y, &x)?).abs().max(inv);
            Ok([norm_id.max(comp_id), jac_id, disp, sym])
        };
        match run() {
            Ok(v) => {
                for i in 0..4 {
                    worst[i] = worst[i].max(v[i]);
                }
            }
            Err(e) => failure = Some(e),
        }
    }
    let tol = 1e-12;
    let mk = |name: &str, anchor: &str, e: f64| match &failure {
        Some(err) => Check::failed(format!("{name} n={n}"), anchor, tol, err),
        None => Check::new(format!("{name} n={n}"), anchor, e, tol),
    };
    vec![
        mk("mobius_modulus", "|φ_x(y)| = |x−y|/[x,y], 1−|φ_x(y)|² = (1−|x|²)(1−|y|²)/[x,y]²", worst[0]),
        mk("mobius_jacobian", "|J_{φ_x}(y)| = (1−|x|²)ⁿ/[x,y]^{2n}", worst[1]),
        mk("mobius_displacement", "|x−φ_x(z)| = |z|(1−|x|²)/[x,z]", worst[2]),
        mk("bracket_symmetry", "[x,y] = [y,x], φ_x∘φ_x = id", worst[3]),
    ]
}

fn central_gradient(f: impl Fn(&[f64]) -> Result<f64>, x: &[f64], h: f64) -> Result<Vec<f64>> {
    let mut p = x.to_vec();
    let mut out = Vec::with_capacity(x.len());
    for j in 0..x.len() {
        p[j] = x[j] + h;
        let a = f(&p)?;
        p[j] = x[j] - h;
        let b = f(&p)?;
        p[j] = x[j];
        out.push((a - b) / (2.0 * h));
    }
    Ok(out)
}

/// Analytic gradients of `K_n`, `H_n` and `G` against central differences,
/// relative to `max(1, |∇|)`.
pub fn kernel_gradients(n: usize, configs: usize, seed: u64) -> Vec<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x6772_6164 ^ n as u64);
    let mut worst = [0.0f64; 3];
    let mut failure = None;
    let h = 1e-5;
    let err = |a: &[f64], b: &[f64]| {
        let scale = norm(a).max(1.0);
        dist_sq(a, b).sqrt() / scale
    };
    for _ in 0..configs {
        let x = random_ball_point(&mut rng, n, 0.8);
        let zeta = random_unit(&mut rng, n);
        let y = loop {
            let y = random_ball_point(&mut rng, n, 0.95);
            if dist_sq(&x, &y) > 0.01 {
                break y;
            }
        };
        let run = || -> Result<[f64; 3]> {
            let gk = grad_k(n, &x, &zeta)?;
            let fk = central_gradient(|p| kernel_k(n, p, &zeta), &x, h)?;
            let gh = grad_h(n, &x, &zeta)?;
            let fh = central_gradient(|p| kernel_h(n, p, &zeta), &x, h)?;
            let gg = grad_g(n, &x, &y)?;
            let fg = central_gradient(|p| green_g(n, p, &y), &x, h)?;
            Ok([err(&gk, &fk), err(&gh, &fh), err(&gg, &fg)])
        };
        match run() {
            Ok(v) => {
                for i in 0..3 {
                    worst[i] = worst[i].max(v[i]);
                }
            }
            Err(e) => failure = Some(e),
        }
    }
    let tol = 1e-6;
    ["K", "H", "G"]
        .iter()
        .zip(worst)
        .map(|(k, e)| {
            let name = format!("gradient_{k} n={n}");
            let anchor = format!("∇_x {k} analytic = central differences");
            match &failure {
                Some(f) => Check::failed(name, anchor, tol, f),
                None => Check::new(name, anchor, e, tol).with_detail(format!("{configs} configurations")),
            }
        })
        .collect()
}

/// The beta/₂F₁ axis integral against adaptive quadrature.
pub fn axis_integral_check(count: usize, seed: u64) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x6178_6973);
    let mut worst: f64 = 0.0;
    let anchor = "∫₀^π sin^{μ₁−1}t/(1+r²−2r cos t)^{μ₂} dt = B(μ₁/2,½)·₂F₁(μ₂, μ₂+(1−μ₁)/2; (1+μ₁)/2; r²)";
    for _ in 0..count {
        let mu1 = rng.gen_range(1.2..6.0);
        let mu2 = rng.gen_range(0.2..4.0);
        let r: f64 = rng.gen_range(0.0..0.9);
        let formula = match axis_integral(mu1, mu2, r) {
            Ok(v) => v,
            Err(e) => return Check::failed("axis_integral", anchor, 1e-10, &e),
        };
        let f = |t: f64| t.sin().powf(mu1 - 1.0) / (1.0 + r * r - 2.0 * r * t.cos()).powf(mu2);
        let breaks = graded_angle_breaks(1.0 - r);
        let q = integrate_adaptive(f, 0.0, std::f64::consts::PI, &breaks, 1e-14, 1e-14);
        worst = worst.max(rel(q.value, formula));
    }
    Check::new("axis_integral", anchor, worst, 1e-10).with_detail(format!("{count} random triples"))
}

/// `f = x₁` in three dimensions and `f = |x|²` in two from their data.
pub fn manufactured_solutions(points: usize, seed: u64) -> Vec<Check> {
    type Exact = fn(&[f64]) -> f64;
    let cases: [(ProblemSpec, &str, Exact); 2] = [
        (ProblemSpec::linear_example(3), "f = x₁ (n=3)", |x| x[0]),
        (ProblemSpec::quadratic_example(2), "f = |x|² (n=2)", norm_sq),
    ];
    cases
        .into_iter()
        .map(|(spec, label, exact)| {
            let n = spec.n;
            let name = format!("manufactured {label}");
            let anchor = "f = K[φ₁] + H[φ₂] + G[g]";
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x6d61_6e75 ^ n as u64);
            let pts: Vec<Vec<f64>> = (0..points).map(|_| random_ball_point(&mut rng, n, 0.95)).collect();
            let run = || -> Result<f64> {
                let p = Problem::new(spec)?;
                let mut worst: f64 = 0.0;
                for (x, v) in pts.iter().zip(solve_many(&p, &pts)) {
                    worst = worst.max((v?.value[0] - exact(x)).abs());
                }
                Ok(worst)
            };
            match run() {
                Ok(e) => Check::new(name, anchor, e, 1e-6).with_detail(format!("{points} points")),
                Err(e) => Check::failed(name, anchor, 1e-6, &e),
            }
        })
        .collect()
}

/// Green mass by direct evaluation of `G` in polar coordinates about `x`.
pub fn green_mass_direct(n: usize, radii: &[f64], level: usize) -> Check {
    let name = format!("green_mass_direct n={n}");
    let anchor = "∫ |G(x,y)| dV(y) = (1−|x|²)²/(8n(n+2))";
    let run = || -> Result<f64> {
        let mut worst: f64 = 0.0;
        for &r in radii {
            let mut x = vec![0.0; n];
            x[0] = r;
            let q = integrate_ball_about(&x, level, 1, |y, t, o| {
                o[0] = if t == 0.0 { 0.0 } else { green_g(n, &x, y).map_or(f64::NAN, f64::abs) };
            })?[0];
            let exact = green_mass(n, r);
            worst = worst.max((q - exact).abs() / exact);
        }
        Ok(worst)
    };
    match run() {
        Ok(e) => Check::new(name, anchor, e, 1e-4).with_detail("relative"),
        Err(e) => Check::failed(name, anchor, 1e-4, &e),
    }
}

/// Green mass through the Möbius pullback used by the solver.
pub fn green_mass_mobius(n: usize, radii: &[f64], level: usize) -> Check {
    let name = format!("green_mass_mobius n={n}");
    let anchor = "∫ G(x,φ_x(z)) |J_{φ_x}(z)| dV(z) = (1−|x|²)²/(8n(n+2))";
    let run = || -> Result<f64> {
        let mut worst: f64 = 0.0;
        for &r in radii {
            let mut x = vec![0.0; n];
            x[0] = r;
            let q = integrate_green_mobius(&x, level, 1, |_, o| o[0] = 1.0)?[0];
            let exact = green_mass(n, r);
            worst = worst.max((q - exact).abs() / exact);
        }
        Ok(worst)
    };
    match run() {
        Ok(e) => Check::new(name, anchor, e, 1e-4).with_detail("relative"),
        Err(e) => Check::failed(name, anchor, 1e-4, &e),
    }
}

/// The extremal solution `(1−|x|²)² e₁` reproduced at random points.
pub fn sharp_solution(n: usize, points: usize, seed: u64) -> Check {
    let name = format!("sharp_solution n={n}");
    let anchor = "g = 8n(n+2)e₁ ⇒ f = (1−|x|²)² e₁";
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x7368_6172 ^ n as u64);
    let pts: Vec<Vec<f64>> = (0..points).map(|_| random_ball_point(&mut rng, n, 0.95)).collect();
    let run = || -> Result<f64> {
        let p = Problem::new(ProblemSpec::sharp_example(n, 2))?;
        let mut worst: f64 = 0.0;
        for (x, v) in pts.iter().zip(solve_many(&p, &pts)) {
            let v = v?.value;
            worst = worst.max((v[0] - (1.0 - norm_sq(x)).powi(2)).abs()).max(v[1].abs());
        }
        Ok(worst)
    };
    match run() {
        Ok(e) => Check::new(name, anchor, e, 1e-4),
        Err(e) => Check::failed(name, anchor, 1e-4, &e),
    }
}

/// Equality of both sides of the estimate at the centre for the extremal
/// data.
pub fn sharp_equality(n: usize) -> Check {
    let name = format!("sharp_equality n={n}");
    let anchor = "LHS = RHS at x = 0 for g = 8n(n+2)e₁";
    let run = || -> Result<f64> {
        let p = Problem::new(ProblemSpec::sharp_example(n, 2))?;
        let norms = SupNorms::estimate(&p);
        let rep = schwarz_check_with(&p, &vec![0.0; n], &norms, &CentreValues::compute(&p)?)?;
        Ok((rep.lhs - rep.rhs()).abs().max((rep.lhs - 1.0).abs()))
    };
    match run() {
        Ok(e) => Check::new(name, anchor, e, 1e-4),
        Err(e) => Check::failed(name, anchor, 1e-4, &e),
    }
}

/// Closed form, series and quadrature of the axis profiles agree.
pub fn table1_agreement(n: usize, radii: &[f64], level: usize) -> Check {
    let name = format!("table1 n={n}");
    let anchor = "U, U* closed form = series = quadrature";
    let tol = if (2..=4).contains(&n) { 1e-7 } else { 1e-6 };
    match table1_rows(n, radii, level) {
        Ok(rows) => {
            let e = rows.iter().map(|r| r.max_abs_disagreement).fold(0.0, f64::max);
            let series = rows.iter().filter(|r| r.r <= SERIES_MAX_R).count();
            Check::new(name, anchor, e, tol).with_detail(format!("{} radii, {series} with series", rows.len()))
        }
        Err(e) => Check::failed(name, anchor, tol, &e),
    }
}

/// The sign change of `δ₁`: at `√(2/(n−2))` for `n ≥ 5`, none otherwise.
pub fn delta1_threshold(n: usize) -> Check {
    let name = format!("delta1_sign n={n}");
    let anchor = "δ₁(r) = 0 ⇔ r² = 2/(n−2)";
    let (exact, found) = (delta1_sign_change(n), delta1_sign_change_numeric(n, 4096));
    match (exact, found) {
        (None, None) => Check::new(name, anchor, 0.0, 1e-12).with_detail("no sign change"),
        (Some(a), Some(b)) => Check::new(name, anchor, (a - b).abs(), 1e-12),
        _ => Check::new(name, anchor, f64::INFINITY, 1e-12).with_detail("numeric and exact disagree"),
    }
}

/// The estimate at random interior points of random catalog problems.
/// The error is the largest excess `LHS − RHS − budget` (≤ 0 passes).
pub fn schwarz_sweep(n: usize, problems: usize, points: usize, seed: u64) -> Check {
    let name = format!("schwarz_sweep n={n}");
    let anchor = "|f(x) − δ₁K[φ₁](0) − δ₂H[φ₂](0)| ≤ RHS(|x|)";
    let results = map_indexed(problems, |i| -> Result<(f64, usize, f64)> {
        let s = seed.wrapping_mul(1_000_003).wrapping_add((n * 10_007 + i) as u64);
        let p = Problem::new(ProblemSpec::random(n, 2, s))?;
        let norms = SupNorms::estimate(&p);
        let centre = CentreValues::compute(&p)?;
        let mut rng = ChaCha8Rng::seed_from_u64(s ^ 0x70_7473);
        let mut worst = f64::NEG_INFINITY;
        let mut bad = 0;
        let mut slack = f64::INFINITY;
        for _ in 0..points {
            let x = random_ball_point(&mut rng, n, 0.95);
            let rep = schwarz_check_with(&p, &x, &norms, &centre)?;
            let excess = rep.lhs - rep.rhs() - error_budget(n, &norms);
            worst = worst.max(excess);
            slack = slack.min(rep.rhs() - rep.lhs);
            if !rep.satisfied {
                bad += 1;
            }
        }
        Ok((worst, bad, slack))
    });
    let mut worst = f64::NEG_INFINITY;
    let mut bad = 0;
    let mut slack = f64::INFINITY;
    for r in results {
        match r {
            Ok((w, b, s)) => {
                worst = worst.max(w);
                bad += b;
                slack = slack.min(s);
            }
            Err(e) => return Check::failed(name, anchor, 0.0, &e),
        }
    }
    Check::new(name, anchor, worst, 0.0)
        .with_detail(format!("{bad} violations in {} points, min RHS−LHS = {slack:.3e}", problems * points))
}

/// Sampled Lipschitz constants (ω(t) = t) against the explicit gradient
/// bound, for random problems plus the harmonic solution `x₁`.
/// The error is the largest `estimate − bound` (≤ 0 passes).
pub fn lipschitz_mechanism(n: usize, problems: usize, pairs: usize, seed: u64) -> Check {
    let name = format!("lipschitz_mechanism n={n}");
    let anchor = "sup |f(a)−f(b)|/ω(|a−b|) ≤ (M_K + M_H + M_G)·2/ω(2)";
    let w = Majorant::identity();
    let mut specs: Vec<ProblemSpec> = (0..problems)
        .map(|i| ProblemSpec::random(n, 2, seed.wrapping_mul(7_919).wrapping_add((n * 101 + i) as u64)))
        .collect();
    specs.push(ProblemSpec::linear_example(n));
    specs.push(ProblemSpec::sharp_example(n, 1));
    let mut worst = f64::NEG_INFINITY;
    let mut ratio: f64 = 0.0;
    for spec in specs {
        let run = || -> Result<(f64, f64)> {
            let p = Problem::new(spec)?;
            let est = lipschitz_estimate(&p, &w, pairs)?;
            let bound = solution_bound(&p, &w)?.constant;
            Ok((est, bound))
        };
        match run() {
            Ok((est, bound)) => {
                worst = worst.max(est - bound);
                ratio = ratio.max(est / bound);
            }
            Err(e) => return Check::failed(name, anchor, 0.0, &e),
        }
    }
    Check::new(name, anchor, worst, 0.0).with_detail(format!("largest estimate/bound = {ratio:.3}"))
}

/// Sampled Lipschitz constant of `f = x₁`, which is exactly 1.
pub fn lipschitz_linear(n: usize, pairs: usize) -> Check {
    let name = format!("lipschitz_linear n={n}");
    let anchor = "|x₁ − y₁| ≤ |x − y|";
    let run = || -> Result<f64> {
        let p = Problem::new(ProblemSpec::linear_example(n))?;
        lipschitz_estimate(&p, &Majorant::identity(), pairs)
    };
    match run() {
        Ok(est) => Check::new(name, anchor, est - 1.0, 1e-4).with_detail(format!("estimate {est:.8}")),
        Err(e) => Check::failed(name, anchor, 1e-4, &e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_names_parse() {
        assert_eq!("green".parse::<Suite>().unwrap(), Suite::Green);
        assert!("everything".parse::<Suite>().is_err());
    }

    #[test]
    fn quotient_rule_derivative_matches_differences() {
        let x = [0.3, -0.2, 0.4];
        let y = [-0.1, 0.5, 0.2];
        let d = mobius_derivative(&x, &y);
        let h = 1e-6;
        for j in 0..3 {
            let mut p = y;
            p[j] += h;
            let a = mobius(&x, &p).unwrap();
            p[j] -= 2.0 * h;
            let b = mobius(&x, &p).unwrap();
            for k in 0..3 {
                assert!(((a[k] - b[k]) / (2.0 * h) - d[(k, j)]).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn tolerance_override_replaces_thresholds() {
        let cfg = VerifyConfig { n: Some(2), tolerance: Some(0.0), ..Default::default() };
        let rep = run_suite(Suite::Table1, &cfg).unwrap();
        assert_eq!(rep.checks.len(), 1);
        assert_eq!(rep.checks[0].tolerance, 0.0);
        assert!(!rep.all_passed());
    }

    #[test]
    fn identities_pass_in_three_dimensions() {
        let rep = run_suite(Suite::Identities, &VerifyConfig { n: Some(3), ..Default::default() }).unwrap();
        for c in &rep.checks {
            assert!(c.passed, "{}", c.line());
        }
    }
}
