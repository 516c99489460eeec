//! Evaluation of `f = K[φ₁] + H[φ₂] + G[g]` for catalog data.

pub mod data;
mod norms;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub use data::{ConstValue, FnSpec, Poly, Term};
pub use norms::{sphere_sample, sup_norm_ball, sup_norm_sphere, SupNorms};

use crate::error::{domain, param, Error, Result};
use crate::geometry::norm_sq;
use crate::kernels::{kernel_h_profile, kernel_k_profile};
use crate::par::{map_indexed, map_indexed_sequential};
use crate::quadrature::{integrate_green_mobius, ZonalRule};

/// Default quadrature level.
pub const DEFAULT_LEVEL: usize = 4;
/// Radius above which the level is escalated until the kernel self-test passes.
pub const ESCALATION_RADIUS: f64 = 0.95;
/// Highest level reached by escalation.
pub const MAX_LEVEL: usize = 64;
/// Accepted deviation of `∫ K dσ` from 1 in the escalation self-test.
pub const SELF_TEST_TOL: f64 = 1e-10;

fn default_level() -> usize {
    DEFAULT_LEVEL
}

/// Problem file contents.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemSpec {
    pub n: usize,
    pub m: usize,
    pub phi1: FnSpec,
    pub phi2: FnSpec,
    pub g: FnSpec,
    #[serde(default = "default_level")]
    pub quad_level: usize,
}

impl ProblemSpec {
    /// Parse a problem file; syntax and schema errors carry line and column.
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Schema(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("problem specs always serialise")
    }

    /// `g = (8n(n+2), 0, …)`, zero boundary data; the solution is
    /// `(1−|x|²)² e₁`.
    pub fn sharp_example(n: usize, m: usize) -> Self {
        let mut v = vec![0.0; m.max(1)];
        v[0] = 8.0 * n as f64 * (n as f64 + 2.0);
        Self { n, m, phi1: FnSpec::zero(), phi2: FnSpec::zero(), g: FnSpec::constant(v), quad_level: DEFAULT_LEVEL }
    }

    /// Data of the harmonic solution `f(x) = x₁`.
    pub fn linear_example(n: usize) -> Self {
        Self {
            n,
            m: 1,
            phi1: FnSpec::coordinate(1),
            phi2: FnSpec::scaled(FnSpec::coordinate(1), -1.0),
            g: FnSpec::zero(),
            quad_level: DEFAULT_LEVEL,
        }
    }

    /// Data of the biharmonic solution `f(x) = |x|²`.
    pub fn quadratic_example(n: usize) -> Self {
        Self {
            n,
            m: 1,
            phi1: FnSpec::scalar(1.0),
            phi2: FnSpec::scaled(FnSpec::scalar(1.0), -2.0),
            g: FnSpec::zero(),
            quad_level: DEFAULT_LEVEL,
        }
    }

    /// Seeded random catalog problem: each datum is a sum of a few monomials
    /// of degree at most 4 with coefficients in `[−1, 1]` (`g` scaled by
    /// `8n(n+2)` so that all three potentials matter).
    pub fn random(n: usize, m: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let poly = |rng: &mut ChaCha8Rng, scale: f64| {
            let count = rng.gen_range(1..=4);
            let terms = (0..count)
                .map(|_| {
                    let degree = rng.gen_range(0..=data::MAX_DEGREE);
                    let mut powers = vec![0usize; n];
                    for _ in 0..degree {
                        powers[rng.gen_range(0..n)] += 1;
                    }
                    Term { coeff: (0..m).map(|_| scale * rng.gen_range(-1.0..1.0)).collect(), powers }
                })
                .collect();
            FnSpec::polynomial(terms)
        };
        let phi1 = poly(&mut rng, 1.0);
        let phi2 = poly(&mut rng, 1.0);
        let g = poly(&mut rng, 8.0 * n as f64 * (n as f64 + 2.0));
        Self { n, m, phi1, phi2, g, quad_level: DEFAULT_LEVEL }
    }
}

/// A validated problem with compiled data.
#[derive(Debug, Clone, PartialEq)]
pub struct Problem {
    spec: ProblemSpec,
    phi1: Poly,
    phi2: Poly,
    g: Poly,
}

impl Problem {
    pub fn new(spec: ProblemSpec) -> Result<Self> {
        if spec.n < 2 {
            return Err(Error::Schema(format!("n must be at least 2, got {}", spec.n)));
        }
        if spec.m < 1 {
            return Err(Error::Schema("m must be at least 1".into()));
        }
        if spec.quad_level < 1 || spec.quad_level > MAX_LEVEL {
            return Err(Error::Schema(format!("quad_level must lie in 1..={MAX_LEVEL}, got {}", spec.quad_level)));
        }
        let phi1 = spec.phi1.compile(spec.n, spec.m)?;
        let phi2 = spec.phi2.compile(spec.n, spec.m)?;
        let g = spec.g.compile(spec.n, spec.m)?;
        Ok(Self { spec, phi1, phi2, g })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Self::new(ProblemSpec::from_json(text)?)
    }

    pub fn spec(&self) -> &ProblemSpec {
        &self.spec
    }

    pub fn n(&self) -> usize {
        self.spec.n
    }

    pub fn m(&self) -> usize {
        self.spec.m
    }

    pub fn level(&self) -> usize {
        self.spec.quad_level
    }

    pub fn phi1(&self) -> &Poly {
        &self.phi1
    }

    pub fn phi2(&self) -> &Poly {
        &self.phi2
    }

    pub fn g(&self) -> &Poly {
        &self.g
    }

    /// Same data at a different quadrature level.
    pub fn with_level(&self, level: usize) -> Result<Self> {
        Self::new(ProblemSpec { quad_level: level, ..self.spec.clone() })
    }
}

/// A vector value with the quadrature level it was computed at and an
/// optional escalation warning.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Evaluation {
    pub value: Vec<f64>,
    pub level: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub warning: Option<String>,
}

/// Level used at `x`: the base level, doubled for `|x| > 0.95` until the
/// `∫ K dσ = 1` self-test passes or `MAX_LEVEL` is reached.
pub fn choose_level(x: &[f64], base: usize) -> Result<(usize, Option<String>)> {
    let r2 = check_point(x)?;
    if r2.sqrt() <= ESCALATION_RADIUS {
        return Ok((base, None));
    }
    let n = x.len();
    let r = r2.sqrt();
    let s = 1.0 - r2;
    let mut level = base;
    loop {
        let rule = ZonalRule::new(x, level)?;
        let q = rule.integrate_profile(|c| kernel_k_profile(n, s, 1.0 - 2.0 * r * c + r2))?;
        let dev = (q - 1.0).abs();
        if dev <= SELF_TEST_TOL {
            return Ok((level, None));
        }
        if level >= MAX_LEVEL {
            return Ok((
                level,
                Some(format!("kernel self-test failed at level {level} (|x| = {r}): deviation {dev:e}")),
            ));
        }
        level = (level * 2).min(MAX_LEVEL);
    }
}

fn check_point(x: &[f64]) -> Result<f64> {
    let r2 = norm_sq(x);
    if x.iter().any(|v| !v.is_finite()) {
        return Err(domain("point has non-finite coordinates"));
    }
    if !(r2 < 1.0) {
        return Err(domain(format!("point {x:?} is not inside the open unit ball (|x| = {})", r2.sqrt())));
    }
    Ok(r2)
}

fn check_problem_point(problem: &Problem, x: &[f64]) -> Result<f64> {
    if x.len() != problem.n() {
        return Err(Error::DimensionMismatch { expected: problem.n(), found: x.len() });
    }
    check_point(x)
}

fn sphere_kernel_potential(
    x: &[f64],
    level: usize,
    data: &Poly,
    profile: impl Fn(usize, f64, f64) -> f64,
) -> Result<Vec<f64>> {
    let n = x.len();
    let m = data.components();
    if data.is_zero() {
        return Ok(vec![0.0; m]);
    }
    let r2 = norm_sq(x);
    let r = r2.sqrt();
    let s = 1.0 - r2;
    let rule = ZonalRule::new(x, level)?;
    rule.integrate(m, |c| profile(n, s, 1.0 - 2.0 * r * c + r2), |z, out| data.eval_into(z, out))
}

fn k_at(problem: &Problem, x: &[f64], level: usize) -> Result<Vec<f64>> {
    sphere_kernel_potential(x, level, &problem.phi1, kernel_k_profile)
}

fn h_at(problem: &Problem, x: &[f64], level: usize) -> Result<Vec<f64>> {
    sphere_kernel_potential(x, level, &problem.phi2, kernel_h_profile)
}

fn g_at(problem: &Problem, x: &[f64], level: usize) -> Result<Vec<f64>> {
    if problem.g.is_zero() {
        return Ok(vec![0.0; problem.m()]);
    }
    integrate_green_mobius(x, level, problem.m(), |y, out| problem.g.eval_into(y, out))
}

fn evaluate(
    problem: &Problem,
    x: &[f64],
    f: impl Fn(&Problem, &[f64], usize) -> Result<Vec<f64>>,
) -> Result<Evaluation> {
    check_problem_point(problem, x)?;
    let (level, warning) = choose_level(x, problem.level())?;
    Ok(Evaluation { value: f(problem, x, level)?, level, warning })
}

/// `K[φ₁](x) = ∫ K_n(x, ζ) φ₁(ζ) dσ(ζ)`.
pub fn potential_k(problem: &Problem, x: &[f64]) -> Result<Evaluation> {
    evaluate(problem, x, k_at)
}

/// `H[φ₂](x) = ∫ H_n(x, ζ) φ₂(ζ) dσ(ζ)`.
pub fn potential_h(problem: &Problem, x: &[f64]) -> Result<Evaluation> {
    evaluate(problem, x, h_at)
}

/// `G[g](x) = ∫ G(x, y) g(y) dV(y)`.
pub fn potential_g(problem: &Problem, x: &[f64]) -> Result<Evaluation> {
    evaluate(problem, x, g_at)
}

/// The solution `f(x) = K[φ₁](x) + H[φ₂](x) + G[g](x)`.
pub fn solve_eval(problem: &Problem, x: &[f64]) -> Result<Evaluation> {
    evaluate(problem, x, |p, x, level| {
        let k = k_at(p, x, level)?;
        let h = h_at(p, x, level)?;
        let g = g_at(p, x, level)?;
        Ok(k.iter().zip(&h).zip(&g).map(|((a, b), c)| a + b + c).collect())
    })
}

/// `solve_eval` at many points on the data-parallel backend, in input order.
pub fn solve_many(problem: &Problem, points: &[Vec<f64>]) -> Vec<Result<Evaluation>> {
    map_indexed(points.len(), |i| solve_eval(problem, &points[i]))
}

/// `solve_eval` at many points on the calling thread.
pub fn solve_many_sequential(problem: &Problem, points: &[Vec<f64>]) -> Vec<Result<Evaluation>> {
    map_indexed_sequential(points.len(), |i| solve_eval(problem, &points[i]))
}

/// `d/dr f(rζ)` at radius `r` by the one-sided second-order stencil
/// `(3f(r) − 4f(r−h) + f(r−2h)) / (2h)`.
pub fn radial_derivative<F>(f: F, zeta: &[f64], r: f64, h: f64) -> Result<Vec<f64>>
where
    F: Fn(&[f64]) -> Result<Vec<f64>>,
{
    if !(h > 0.0 && h < 0.1) {
        return Err(param(format!("finite-difference step must lie in (0, 0.1), got {h}")));
    }
    let at = |t: f64| f(&zeta.iter().map(|z| t * z).collect::<Vec<_>>());
    let (f0, f1, f2) = (at(r)?, at(r - h)?, at(r - 2.0 * h)?);
    Ok(f0.iter().zip(&f1).zip(&f2).map(|((a, b), c)| (3.0 * a - 4.0 * b + c) / (2.0 * h)).collect())
}

/// Inward normal derivative `∂f/∂n = −d/dr f(rζ)` at `r = 1⁻`.
pub fn normal_derivative<F>(f: F, zeta: &[f64], h: f64) -> Result<Vec<f64>>
where
    F: Fn(&[f64]) -> Result<Vec<f64>>,
{
    Ok(radial_derivative(f, zeta, 1.0, h)?.into_iter().map(|v| -v).collect())
}

/// One row of [`boundary_convergence`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundaryRow {
    pub r: f64,
    /// `sup_ζ |f(rζ) − φ₁(ζ)|`.
    pub trace_deviation: f64,
    /// `sup_ζ |r ∂f/∂n(rζ) − φ₂(ζ)|`.
    pub normal_deviation: f64,
}

/// Default step of the normal-derivative stencil in boundary diagnostics.
pub const NORMAL_STEP: f64 = 1e-3;

/// Deviation of the solution's trace and normal derivative on the sphere of
/// radius `r` from the boundary data, over a fixed sphere sample.
pub fn boundary_convergence(problem: &Problem, radii: &[f64]) -> Result<Vec<BoundaryRow>> {
    if radii.windows(2).any(|w| w[0] >= w[1]) || radii.iter().any(|&r| !(r > 0.0 && r < 1.0)) {
        return Err(param("radii must be increasing and lie in (0, 1)"));
    }
    let sample = sphere_sample(problem.n(), 16, 0x5eed);
    let solve = |y: &[f64]| solve_eval(problem, y).map(|e| e.value);
    radii
        .iter()
        .map(|&r| {
            let devs = map_indexed(sample.len(), |i| -> Result<(f64, f64)> {
                let zeta = &sample[i];
                let y: Vec<f64> = zeta.iter().map(|z| r * z).collect();
                let f = solve(&y)?;
                let dr = radial_derivative(solve, zeta, r, NORMAL_STEP)?;
                let p1 = problem.phi1.eval(zeta);
                let p2 = problem.phi2.eval(zeta);
                let trace = f.iter().zip(&p1).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
                let normal = dr.iter().zip(&p2).map(|(d, b)| (-r * d - b).abs()).fold(0.0, f64::max);
                Ok((trace, normal))
            });
            let mut row = BoundaryRow { r, trace_deviation: 0.0, normal_deviation: 0.0 };
            for d in devs {
                let (t, nrm) = d?;
                row.trace_deviation = row.trace_deviation.max(t);
                row.normal_deviation = row.normal_deviation.max(nrm);
            }
            Ok(row)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Point;

    fn pt(n: usize, r: f64) -> Vec<f64> {
        Point::axis(n, 0, r).into_inner()
    }

    #[test]
    fn constant_data_potentials() {
        for n in 2..=5 {
            let spec = ProblemSpec {
                n,
                m: 1,
                phi1: FnSpec::scalar(1.0),
                phi2: FnSpec::scalar(1.0),
                g: FnSpec::zero(),
                quad_level: 4,
            };
            let p = Problem::new(spec).unwrap();
            for r in [0.0, 0.3, 0.6, 0.9] {
                let x = pt(n, r);
                assert!((potential_k(&p, &x).unwrap().value[0] - 1.0).abs() < 1e-8);
                let h = potential_h(&p, &x).unwrap().value[0];
                assert!((h - 0.5 * (1.0 - r * r)).abs() < 1e-8, "n={n} r={r}: {h}");
            }
        }
    }

    #[test]
    fn sharp_example_potential() {
        for n in 2..=5 {
            let p = Problem::new(ProblemSpec::sharp_example(n, 1)).unwrap();
            for r in [0.0, 0.5, 0.8] {
                let v = potential_g(&p, &pt(n, r)).unwrap().value[0];
                assert!((v - (1.0 - r * r).powi(2)).abs() < 1e-4);
            }
        }
        let p = Problem::new(ProblemSpec::sharp_example(2, 2)).unwrap();
        let f = solve_eval(&p, &[0.0, 0.0]).unwrap().value;
        assert!((f[0] - 1.0).abs() < 1e-4 && f[1].abs() < 1e-12);
    }

    #[test]
    fn manufactured_solutions() {
        let lin = Problem::new(ProblemSpec::linear_example(3)).unwrap();
        let f = solve_eval(&lin, &[0.3, 0.0, 0.0]).unwrap().value[0];
        assert!((f - 0.3).abs() < 1e-7);
        let quad = Problem::new(ProblemSpec::quadratic_example(2)).unwrap();
        assert!(solve_eval(&quad, &[0.0, 0.0]).unwrap().value[0].abs() < 1e-7);
        let f = solve_eval(&quad, &[0.3, -0.5]).unwrap().value[0];
        assert!((f - 0.34).abs() < 1e-7);
    }

    #[test]
    fn normal_derivative_examples() {
        let h = 1e-3;
        let e1 = [1.0, 0.0, 0.0];
        let d = normal_derivative(|x| Ok(vec![x[0]]), &e1, h).unwrap();
        assert!((d[0] + 1.0).abs() < 1e-10);
        let z = [0.6, 0.8];
        let d = normal_derivative(|x| Ok(vec![norm_sq(x)]), &z, h).unwrap();
        assert!((d[0] + 2.0).abs() < 1e-10);
        let d = normal_derivative(|x| Ok(vec![(1.0 - norm_sq(x)).powi(2)]), &z, h).unwrap();
        assert!(d[0].abs() < 1e-5);
        assert!(normal_derivative(|x| Ok(vec![x[0]]), &e1, 0.2).is_err());
    }

    #[test]
    fn boundary_convergence_of_manufactured_problems() {
        let lin = Problem::new(ProblemSpec::linear_example(3)).unwrap();
        let rows = boundary_convergence(&lin, &[0.9]).unwrap();
        // f = x₁: f(rζ) − ζ₁ = (r−1)ζ₁ and r·(−ζ₁) + ζ₁ = (1−r)ζ₁; the sample contains ±e₁.
        assert!((rows[0].trace_deviation - 0.1).abs() < 1e-6);
        assert!((rows[0].normal_deviation - 0.1).abs() < 1e-6);
        let sharp = Problem::new(ProblemSpec::sharp_example(2, 1)).unwrap();
        let rows = boundary_convergence(&sharp, &[0.8, 0.9, 0.95]).unwrap();
        assert!(rows.windows(2).all(|w| w[1].trace_deviation < w[0].trace_deviation));
        assert!(boundary_convergence(&sharp, &[0.9, 0.8]).is_err());
    }

    #[test]
    fn linearity_in_the_data() {
        let a = ProblemSpec::random(3, 2, 1);
        let b = ProblemSpec::random(3, 2, 2);
        let sum_spec = |s: &ProblemSpec, t: &ProblemSpec, c: f64| ProblemSpec {
            n: 3,
            m: 2,
            phi1: merge(&s.phi1, &t.phi1, c),
            phi2: merge(&s.phi2, &t.phi2, c),
            g: merge(&s.g, &t.g, c),
            quad_level: 4,
        };
        fn merge(f: &FnSpec, g: &FnSpec, c: f64) -> FnSpec {
            let terms = |h: &FnSpec, s: f64| match h {
                FnSpec::Polynomial(p) => p
                    .terms
                    .iter()
                    .map(|t| Term { coeff: t.coeff.iter().map(|v| s * v).collect(), powers: t.powers.clone() })
                    .collect::<Vec<_>>(),
                _ => unreachable!("random problems are polynomials"),
            };
            let mut all = terms(f, 1.0);
            all.extend(terms(g, c));
            FnSpec::polynomial(all)
        }
        let pa = Problem::new(a.clone()).unwrap();
        let pb = Problem::new(b.clone()).unwrap();
        let pc = Problem::new(sum_spec(&a, &b, -2.5)).unwrap();
        let x = [0.2, -0.3, 0.4];
        let fa = solve_eval(&pa, &x).unwrap().value;
        let fb = solve_eval(&pb, &x).unwrap().value;
        let fc = solve_eval(&pc, &x).unwrap().value;
        for i in 0..2 {
            let expect = fa[i] - 2.5 * fb[i];
            assert!((fc[i] - expect).abs() < 1e-12 * (1.0 + expect.abs()), "{} vs {expect}", fc[i]);
        }
    }

    #[test]
    fn problem_schema() {
        let spec = ProblemSpec::sharp_example(3, 2);
        let back = ProblemSpec::from_json(&spec.to_json()).unwrap();
        assert_eq!(back, spec);
        let missing = r#"{"n":2,"m":1,"phi1":{"kind":"constant","params":{"value":0}},
            "g":{"kind":"constant","params":{"value":0}},"quad_level":4}"#;
        match ProblemSpec::from_json(missing) {
            Err(Error::Schema(msg)) => assert!(msg.contains("phi2") && msg.contains("line")),
            other => panic!("expected schema error, got {other:?}"),
        }
        let extra = r#"{"n":2,"m":1,"phi1":{"kind":"constant","params":{"value":0}},
            "phi2":{"kind":"constant","params":{"value":0}},
            "g":{"kind":"constant","params":{"value":0}},"quad_level":4,"tol":1}"#;
        assert!(ProblemSpec::from_json(extra).is_err());
        assert!(matches!(Problem::new(ProblemSpec { n: 1, ..ProblemSpec::sharp_example(2, 1) }), Err(Error::Schema(_))));
    }

    #[test]
    fn domain_errors_and_escalation() {
        let p = Problem::new(ProblemSpec::sharp_example(3, 1)).unwrap();
        assert!(matches!(solve_eval(&p, &[1.0, 0.0, 0.0]), Err(Error::Domain(_))));
        assert!(matches!(solve_eval(&p, &[0.1, 0.0]), Err(Error::DimensionMismatch { .. })));
        let e = solve_eval(&p, &[0.97, 0.0, 0.0]).unwrap();
        assert!(e.warning.is_none());
        assert!((e.value[0] - (1.0 - 0.97f64 * 0.97).powi(2)).abs() < 1e-6);
        let (level, warn) = choose_level(&[0.999_999, 0.0], 1).unwrap();
        assert!((1..=MAX_LEVEL).contains(&level));
        if level == MAX_LEVEL {
            assert!(warn.is_some());
        }
    }

    #[test]
    fn parallel_and_sequential_solves_agree() {
        let p = Problem::new(ProblemSpec::random(4, 2, 9)).unwrap();
        let pts: Vec<Vec<f64>> = (0..6).map(|i| vec![0.1 * i as f64, -0.05 * i as f64, 0.02, 0.0]).collect();
        let a: Vec<_> = solve_many(&p, &pts).into_iter().map(|r| r.unwrap()).collect();
        let b: Vec<_> = solve_many_sequential(&p, &pts).into_iter().map(|r| r.unwrap()).collect();
        assert_eq!(a, b);
    }
}
