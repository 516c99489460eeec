//! Sup-norm estimates of catalog data by sampling plus local ascent.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::data::Poly;
use super::Problem;
use crate::geometry::{norm, norm_sq};
use crate::quadrature::sphere_design;

/// Safety factor applied to sampled sup norms.
pub const NORM_INFLATION: f64 = 1.01;

const SAMPLE_SIZE: usize = 4096;
const ASCENT_STARTS: usize = 8;
const ASCENT_STEPS: usize = 80;
const NORM_SEED: u64 = 0x6e6f726d;

/// Deterministic sample of `S^{n−1}`: the points `±e_k`, a degree-5 design
/// and `extra` seeded random directions.
pub fn sphere_sample(n: usize, extra: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut pts: Vec<Vec<f64>> = Vec::new();
    for k in 0..n {
        for s in [1.0, -1.0] {
            let mut e = vec![0.0; n];
            e[k] = s;
            pts.push(e);
        }
    }
    for (p, _) in sphere_design(n) {
        if !pts.contains(&p) {
            pts.push(p);
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    while pts.len() < 2 * n + extra + (1 << n) {
        let v: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let r = norm(&v);
        if r > 0.1 && r <= 1.0 {
            pts.push(v.iter().map(|c| c / r).collect());
        }
    }
    pts
}

fn magnitude(p: &Poly, x: &[f64]) -> f64 {
    norm(&p.eval(x))
}

/// Projected gradient ascent of `|p|` from `start`; `project` maps back
/// onto the admissible set.
fn ascend(p: &Poly, start: &[f64], project: impl Fn(&mut Vec<f64>)) -> f64 {
    let mut x = start.to_vec();
    let mut best = magnitude(p, &x);
    let mut step = 0.1;
    for _ in 0..ASCENT_STEPS {
        let v = p.eval(&x);
        let jac = p.jacobian(&x);
        let grad: Vec<f64> =
            (0..x.len()).map(|k| jac.iter().zip(&v).map(|(row, vi)| row[k] * vi).sum()).collect();
        let gn = norm(&grad);
        if gn == 0.0 {
            break;
        }
        let mut trial: Vec<f64> = x.iter().zip(&grad).map(|(a, g)| a + step * g / gn).collect();
        project(&mut trial);
        let val = magnitude(p, &trial);
        if val > best {
            best = val;
            x = trial;
            step *= 1.5;
        } else {
            step *= 0.5;
            if step < 1e-12 {
                break;
            }
        }
    }
    best
}

fn refine(p: &Poly, sample: &[Vec<f64>], project: impl Fn(&mut Vec<f64>) + Copy) -> f64 {
    let mut scored: Vec<(f64, usize)> = sample.iter().enumerate().map(|(i, x)| (magnitude(p, x), i)).collect();
    scored.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
    let mut best = scored.first().map_or(0.0, |s| s.0);
    for &(_, i) in scored.iter().take(ASCENT_STARTS) {
        best = best.max(ascend(p, &sample[i], project));
    }
    best
}

/// Estimate of `sup_{S^{n−1}} |p|` (not inflated).
pub fn sup_norm_sphere(p: &Poly) -> f64 {
    if p.is_zero() {
        return 0.0;
    }
    if p.is_constant() {
        return magnitude(p, &vec![0.0; p.dim()]);
    }
    let sample = sphere_sample(p.dim(), SAMPLE_SIZE, NORM_SEED);
    refine(p, &sample, |x: &mut Vec<f64>| {
        let r = norm(x);
        if r > 0.0 {
            x.iter_mut().for_each(|c| *c /= r);
        }
    })
}

/// Estimate of `sup_{closed ball} |p|` (not inflated).
pub fn sup_norm_ball(p: &Poly) -> f64 {
    if p.is_zero() {
        return 0.0;
    }
    if p.is_constant() {
        return magnitude(p, &vec![0.0; p.dim()]);
    }
    let dirs = sphere_sample(p.dim(), SAMPLE_SIZE / 4, NORM_SEED);
    let mut sample = vec![vec![0.0; p.dim()]];
    for r in [0.25, 0.5, 0.75, 1.0] {
        sample.extend(dirs.iter().map(|d| d.iter().map(|c| r * c).collect::<Vec<_>>()));
    }
    refine(p, &sample, |x: &mut Vec<f64>| {
        let r2 = norm_sq(x);
        if r2 > 1.0 {
            let r = r2.sqrt();
            x.iter_mut().for_each(|c| *c /= r);
        }
    })
}

/// Sup-norm estimates `(‖φ₁‖∞, ‖φ₂‖∞, ‖g‖∞)` of a problem's data. Sampled
/// values are inflated by [`NORM_INFLATION`]; constants are exact and kept.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SupNorms {
    pub phi1: f64,
    pub phi2: f64,
    pub g: f64,
}

impl SupNorms {
    pub fn estimate(problem: &Problem) -> Self {
        Self {
            phi1: inflate(problem.phi1(), sup_norm_sphere(problem.phi1())),
            phi2: inflate(problem.phi2(), sup_norm_sphere(problem.phi2())),
            g: inflate(problem.g(), sup_norm_ball(problem.g())),
        }
    }
}

fn inflate(p: &Poly, v: f64) -> f64 {
    if p.is_constant() {
        v
    } else {
        NORM_INFLATION * v
    }
}
