//! Moduli of continuity: majorant validation, explicit gradient-bound
//! constants for the three potentials, and empirical estimators.

use std::str::FromStr;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{domain, param, Error, Result};
use crate::geometry::{dist_sq, norm, norm_sq, operator_norm};
use crate::kernels::{grad_h, grad_k, DimensionalConstants};
use crate::quadrature::ZonalRule;
use crate::solver::{choose_level, solve_eval, solve_many, sphere_sample, Poly, Problem, SupNorms};

/// A modulus function `ω`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Majorant {
    /// `ω(t) = t^α`.
    Power { alpha: f64 },
    /// `ω(t) = slope · t`.
    Linear { slope: f64 },
    /// Piecewise linear through `(0, 0)` and the tabulated `(t, ω(t))`,
    /// continued past the last point with constant ratio `ω(t)/t`.
    Custom { points: Vec<[f64; 2]> },
}

impl Majorant {
    /// `ω(t) = t`.
    pub fn identity() -> Self {
        Majorant::Power { alpha: 1.0 }
    }

    pub fn custom(points: Vec<[f64; 2]>) -> Result<Self> {
        let w = Majorant::Custom { points };
        w.validate()?;
        Ok(w)
    }

    /// Structural checks on the parameters (not the majorant properties).
    pub fn validate(&self) -> Result<()> {
        match self {
            Majorant::Power { alpha } if !(alpha.is_finite() && *alpha > 0.0) => {
                Err(param(format!("power majorant needs alpha > 0, got {alpha}")))
            }
            Majorant::Linear { slope } if !(slope.is_finite() && *slope > 0.0) => {
                Err(param(format!("linear majorant needs slope > 0, got {slope}")))
            }
            Majorant::Custom { points } => {
                if points.is_empty() {
                    return Err(param("custom majorant needs at least one point"));
                }
                let mut prev = 0.0;
                for &[t, v] in points {
                    if !(t.is_finite() && v.is_finite() && t > prev) {
                        return Err(param("custom majorant abscissae must be positive and strictly increasing"));
                    }
                    prev = t;
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        match self {
            Majorant::Power { alpha } => t.powf(*alpha),
            Majorant::Linear { slope } => slope * t,
            Majorant::Custom { points } => {
                let mut prev = [0.0, 0.0];
                for &p in points {
                    if t <= p[0] {
                        return prev[1] + (p[1] - prev[1]) * (t - prev[0]) / (p[0] - prev[0]);
                    }
                    prev = p;
                }
                t * prev[1] / prev[0]
            }
        }
    }

    /// `lim_{t→0⁺} ω(t)/t` where it is known in closed form.
    pub fn ratio_limit(&self) -> f64 {
        match self {
            Majorant::Power { alpha } if *alpha < 1.0 => f64::INFINITY,
            Majorant::Power { alpha } if *alpha > 1.0 => 0.0,
            Majorant::Power { .. } => 1.0,
            Majorant::Linear { slope } => *slope,
            Majorant::Custom { points } => points[0][1] / points[0][0],
        }
    }

    /// `ω(2)`, the value entering the boundary-data term of the `K` bound.
    pub fn at_two(&self) -> f64 {
        self.eval(2.0)
    }
}

impl FromStr for Majorant {
    type Err = Error;

    /// `t`, `power:α`, `linear:s`, or a JSON object.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let w = if s == "t" {
            Majorant::identity()
        } else if s.starts_with('{') {
            serde_json::from_str(s).map_err(|e| Error::Schema(format!("majorant: {e}")))?
        } else {
            let (kind, val) = s
                .split_once(':')
                .ok_or_else(|| param(format!("unrecognised majorant {s:?}")))?;
            let v: f64 = val.trim().parse().map_err(|_| param(format!("bad majorant parameter {val:?}")))?;
            match kind.trim() {
                "power" => Majorant::Power { alpha: v },
                "linear" => Majorant::Linear { slope: v },
                other => return Err(param(format!("unknown majorant kind {other:?}"))),
            }
        };
        w.validate()?;
        Ok(w)
    }
}

/// Outcome of [`majorant_check`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MajorantReport {
    pub zero_at_origin: bool,
    pub increasing: bool,
    pub ratio_non_increasing: bool,
    /// `ω(t)/t` at the smallest grid point, or infinity when the ratio is
    /// still growing like a power there.
    pub c_estimate: f64,
    pub valid: bool,
    /// Valid and with finite `c`.
    pub admissible: bool,
}

/// Log-spaced grid on `[1e−8, 2]`.
pub fn default_grid() -> Vec<f64> {
    (0..=200).map(|i| 1e-8 * (2e8f64).powf(i as f64 / 200.0)).collect()
}

/// Check the majorant properties on a grid. Non-positive or non-finite grid
/// points are dropped and the rest sorted.
pub fn majorant_check(w: &Majorant, grid: &[f64]) -> MajorantReport {
    let mut g: Vec<f64> = grid.iter().copied().filter(|t| t.is_finite() && *t > 0.0).collect();
    g.sort_by(f64::total_cmp);
    g.dedup();
    let vals: Vec<f64> = g.iter().map(|&t| w.eval(t)).collect();
    let ratios: Vec<f64> = g.iter().zip(&vals).map(|(t, v)| v / t).collect();
    let slack = |a: f64| 1e-12 * a.abs().max(1e-300);
    let zero_at_origin = w.eval(0.0) == 0.0;
    let increasing = vals.windows(2).all(|p| p[1] > p[0]) && vals.first().is_none_or(|v| *v > 0.0);
    let ratio_non_increasing = ratios.windows(2).all(|p| p[1] <= p[0] + slack(p[0]));
    let c_estimate = match g.len() {
        0 => f64::NAN,
        1 => ratios[0],
        _ => {
            // Local exponent of the ratio; a power-law blow-up means c = ∞.
            let beta = (ratios[0] / ratios[1]).ln() / (g[1] / g[0]).ln();
            if beta > 1e-3 {
                f64::INFINITY
            } else {
                ratios[0]
            }
        }
    };
    let valid = zero_at_origin && increasing && ratio_non_increasing;
    MajorantReport {
        zero_at_origin,
        increasing,
        ratio_non_increasing,
        c_estimate,
        valid,
        admissible: valid && c_estimate.is_finite(),
    }
}

/// Bound on `sup_x |D K[φ₁](x)|` from the first-order kernel estimates,
/// split into the four kernel parts.
///
/// The first part is `sup_{r<1} 3nLc·r·(1−r²+4r²/n)^{1/2}`. For `n < 8` the
/// supremum is at `r → 1`, which gives `6√n·Lc`; from `n = 8` on it is
/// interior and equals `(3n/2)·Lc·√(n/(n−4))`.
pub fn k_bound_parts(n: usize, l: f64, c: f64, w2: f64) -> [f64; 4] {
    let nf = n as f64;
    let lc = l * c;
    let m1 = if n < 8 { 6.0 * nf.sqrt() * lc } else { 1.5 * nf * lc * (nf / (nf - 4.0)).sqrt() };
    let m2 = if n <= 4 { 2.0 * (nf + 2.0) * lc } else { nf * (nf + 2.0) * lc / 2.0 };
    let a = (nf - 4.0).abs();
    [m1, m2, a * l * w2, nf * a * lc / 2.0]
}

/// `M₃(n)`, the factor of `‖φ₂‖∞` in the `H` bound.
pub fn h_bound_factor(n: usize) -> f64 {
    let nf = n as f64;
    if n <= 4 {
        2.0 + nf.sqrt()
    } else {
        (4.0 + nf) / 2.0
    }
}

/// Factor of `‖g‖∞` in the Green-gradient bound.
pub fn g_bound_factor(n: usize) -> Result<f64> {
    let nf = n as f64;
    Ok(match n {
        2 => 19.0 / 32.0,
        4 => 0.5,
        _ => {
            let k = DimensionalConstants::new(n)?;
            k.green_const.abs() * (4.0 - nf).abs() * k.surface_area * (2.5 + (nf - 2.0) / 4.0)
        }
    })
}

/// Explicit bounds on the operator norms of the three potential gradients.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GradientBound {
    pub k: f64,
    pub h: f64,
    pub g: f64,
}

impl GradientBound {
    /// Bound on `sup_x |D f(x)|`.
    pub fn total(&self) -> f64 {
        self.k + self.h + self.g
    }
}

/// Gradient bounds from the Lipschitz-space constant `L` of `φ₁`, the ratio
/// limit `c`, the sup norms of `φ₂` and `g`, and `ω(2)`.
pub fn gradient_bound(n: usize, l: f64, c: f64, phi2_norm: f64, g_norm: f64, w2: f64) -> Result<GradientBound> {
    if n < 2 {
        return Err(param(format!("dimension must be at least 2, got {n}")));
    }
    if [l, c, phi2_norm, g_norm, w2].iter().any(|v| v.is_nan() || *v < 0.0) {
        return Err(param("gradient bound inputs must be nonnegative"));
    }
    Ok(GradientBound {
        k: k_bound_parts(n, l, c, w2).iter().sum(),
        h: h_bound_factor(n) * phi2_norm,
        g: g_bound_factor(n)? * g_norm,
    })
}

/// Upper estimate of `sup_{ball} |Dp|`: sampled and inflated by 1%, exact 0
/// for constants.
pub fn jacobian_sup(p: &Poly) -> f64 {
    if p.is_constant() {
        return 0.0;
    }
    let n = p.dim();
    let dirs = sphere_sample(n, 2048, 0x6a61_6362);
    let mut best: f64 = 0.0;
    let mut consider = |x: &[f64]| {
        let rows = p.jacobian(x);
        let a = DMatrix::from_fn(rows.len(), n, |i, j| rows[i][j]);
        if let Ok(v) = operator_norm(&a) {
            best = best.max(v);
        }
    };
    consider(&vec![0.0; n]);
    for r in [0.25, 0.5, 0.75, 0.9, 1.0] {
        for d in &dirs {
            let x: Vec<f64> = d.iter().map(|c| r * c).collect();
            consider(&x);
        }
    }
    1.01 * best
}

/// The Lipschitz-space constant `L` of `φ₁` for `ω`, bounded through its
/// Euclidean Lipschitz constant: since `t/ω(t)` is non-decreasing,
/// `|φ(a)−φ(b)| ≤ Lip·|a−b| ≤ Lip·(2/ω(2))·ω(|a−b|)` on the sphere.
pub fn data_constant(phi1: &Poly, w: &Majorant) -> f64 {
    let lip = jacobian_sup(phi1);
    if lip == 0.0 {
        0.0
    } else {
        lip * 2.0 / w.at_two()
    }
}

/// Everything that enters the final Lipschitz constant of a solution.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolutionBound {
    pub l: f64,
    pub c: f64,
    pub omega_at_two: f64,
    pub norms: SupNorms,
    pub components: GradientBound,
    /// `|f(a)−f(b)| ≤ constant · ω(|a−b|)`.
    pub constant: f64,
}

/// Explicit constant `C` with `|f(a)−f(b)| ≤ C ω(|a−b|)`, namely
/// `(bound on sup|Df|) · 2/ω(2)`.
pub fn solution_bound(problem: &Problem, w: &Majorant) -> Result<SolutionBound> {
    w.validate()?;
    let c = w.ratio_limit();
    if !c.is_finite() {
        return Err(param("majorant has infinite limsup of ω(t)/t; no gradient bound is available"));
    }
    let norms = SupNorms::estimate(problem);
    let l = data_constant(problem.phi1(), w);
    let w2 = w.at_two();
    let components = gradient_bound(problem.n(), l, c, norms.phi2, norms.g, w2)?;
    Ok(SolutionBound { l, c, omega_at_two: w2, norms, constant: components.total() * 2.0 / w2, components })
}

/// Central-difference Jacobian of the solution at `x`, as an `m × n` matrix.
/// The step is clipped to half the distance to the sphere.
pub fn jacobian_estimate(problem: &Problem, x: &[f64], h: f64) -> Result<DMatrix<f64>> {
    let n = problem.n();
    if x.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: x.len() });
    }
    let r = norm(x);
    if !(r < 1.0) {
        return Err(domain(format!("finite differences need |x| < 1, got {r}")));
    }
    if !(h > 0.0) {
        return Err(param(format!("step must be positive, got {h}")));
    }
    let h = h.min(0.5 * (1.0 - r));
    let mut jac = DMatrix::zeros(problem.m(), n);
    let mut p = x.to_vec();
    for j in 0..n {
        p[j] = x[j] + h;
        let fp = solve_eval(problem, &p)?.value;
        p[j] = x[j] - h;
        let fm = solve_eval(problem, &p)?.value;
        p[j] = x[j];
        for i in 0..problem.m() {
            jac[(i, j)] = (fp[i] - fm[i]) / (2.0 * h);
        }
    }
    Ok(jac)
}

/// Which boundary potential to differentiate analytically.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundaryPotential {
    K,
    H,
}

/// Jacobian of `K[φ₁]` or `H[φ₂]` at `x`, by integrating the analytic kernel
/// gradient against the data.
pub fn potential_jacobian(problem: &Problem, x: &[f64], which: BoundaryPotential) -> Result<DMatrix<f64>> {
    let n = problem.n();
    if x.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: x.len() });
    }
    let (level, _) = choose_level(x, problem.level())?;
    type KernelGrad = fn(usize, &[f64], &[f64]) -> Result<Vec<f64>>;
    let (data, grad): (&Poly, KernelGrad) = match which {
        BoundaryPotential::K => (problem.phi1(), grad_k),
        BoundaryPotential::H => (problem.phi2(), grad_h),
    };
    let m = problem.m();
    let rule = ZonalRule::new(x, level)?;
    let flat = rule.integrate(
        m * n,
        |_| 1.0,
        |z, out| {
            let vals = data.eval(z);
            match grad(n, x, z) {
                Ok(gk) => {
                    for i in 0..m {
                        for j in 0..n {
                            out[i * n + j] = vals[i] * gk[j];
                        }
                    }
                }
                Err(_) => out.iter_mut().for_each(|o| *o = f64::NAN),
            }
        },
    )?;
    Ok(DMatrix::from_row_slice(m, n, &flat))
}

/// Radius of the region where pairs are sampled.
pub const PAIR_RADIUS: f64 = 0.9;
const PAIR_SCALES: usize = 10;

fn primes(k: usize) -> Vec<u64> {
    let mut out = Vec::with_capacity(k);
    let mut c = 2u64;
    while out.len() < k {
        if out.iter().all(|p| !c.is_multiple_of(*p)) {
            out.push(c);
        }
        c += 1;
    }
    out
}

fn radical_inverse(mut i: u64, base: u64) -> f64 {
    let mut f = 1.0;
    let mut v = 0.0;
    while i > 0 {
        f /= base as f64;
        v += f * (i % base) as f64;
        i /= base;
    }
    v
}

/// Deterministic pairs in `|x| ≤ 0.9`: base points from a Halton sequence,
/// partners at distances `0.9·2^{−j}` for `j = 0, …, 9` in turn, so that
/// both short and long secants are represented.
pub fn sample_pairs(n: usize, pairs: usize) -> Vec<(Vec<f64>, Vec<f64>)> {
    let bases = primes(2 * n);
    let mut out = Vec::with_capacity(pairs);
    let mut idx = 1u64;
    while out.len() < pairs {
        let u: Vec<f64> = bases.iter().map(|&b| 2.0 * radical_inverse(idx, b) - 1.0).collect();
        idx += 1;
        let a: Vec<f64> = u[..n].iter().map(|v| PAIR_RADIUS * v).collect();
        let dir = &u[n..];
        let dn = norm(dir);
        if norm_sq(&a) > PAIR_RADIUS * PAIR_RADIUS || dn < 1e-3 {
            continue;
        }
        let mut t = PAIR_RADIUS * 0.5f64.powi((out.len() % PAIR_SCALES) as i32);
        let inside = |t: f64, s: f64| {
            let b: Vec<f64> = a.iter().zip(dir).map(|(ai, di)| ai + s * t * di / dn).collect();
            (norm_sq(&b) <= PAIR_RADIUS * PAIR_RADIUS).then_some(b)
        };
        let b = loop {
            if let Some(b) = inside(t, 1.0).or_else(|| inside(t, -1.0)) {
                break b;
            }
            t *= 0.5;
        };
        out.push((a, b));
    }
    out
}

/// `max |f(a)−f(b)| / ω(|a−b|)` over [`sample_pairs`].
pub fn lipschitz_estimate(problem: &Problem, w: &Majorant, pairs: usize) -> Result<f64> {
    w.validate()?;
    if !w.ratio_limit().is_finite() {
        return Err(param("majorant has infinite limsup of ω(t)/t"));
    }
    let pts = sample_pairs(problem.n(), pairs);
    let flat: Vec<Vec<f64>> = pts.iter().flat_map(|(a, b)| [a.clone(), b.clone()]).collect();
    let vals = solve_many(problem, &flat).into_iter().map(|r| r.map(|e| e.value)).collect::<Result<Vec<_>>>()?;
    let mut best: f64 = 0.0;
    for (k, (a, b)) in pts.iter().enumerate() {
        let diff = dist_sq(&vals[2 * k], &vals[2 * k + 1]).sqrt();
        best = best.max(diff / w.eval(dist_sq(a, b).sqrt()));
    }
    Ok(best)
}

/// `sup_{r<1} 3n·r·(1−r²+4r²/n)^{1/2}` by a dense scan, the quantity the
/// first `K` part bounds per unit `Lc`.
pub fn k_first_part_scan(n: usize) -> f64 {
    let nf = n as f64;
    (0..=100_000)
        .map(|i| {
            let r = i as f64 / 100_000.0;
            3.0 * nf * r * (1.0 - r * r + 4.0 * r * r / nf).sqrt()
        })
        .fold(0.0, f64::max)
}
