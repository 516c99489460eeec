//! Product rules on `S^{n−1}` and `Bⁿ` in spherical coordinates.
//!
//! Nodes are generated on the fly in lexicographic order of the angle
//! indices (θ₁ outermost); a rule stores only its one-dimensional factors.

use std::f64::consts::PI;

use super::gauss::{composite, gauss_legendre};
use crate::error::{param, Error, Result};
use crate::kernels::DimensionalConstants;
use crate::par::map_indexed;
use crate::sum::{Compensated, CompensatedVec};

/// Gauss–Legendre nodes per polar angle at level 1.
pub const POLAR_NODES_PER_LEVEL: usize = 16;
/// Trapezoid nodes in the azimuth at level 1.
pub const AZIMUTH_NODES_PER_LEVEL: usize = 32;
/// Radial Gauss–Legendre nodes per panel at level 1.
pub const RADIAL_NODES_PER_LEVEL: usize = 4;
/// Radial panel breaks of the ball rule, graded toward the sphere.
pub const RADIAL_BREAKS: [f64; 5] = [0.0, 0.5, 0.75, 0.875, 1.0];

#[derive(Debug, Clone, PartialEq)]
struct Factor {
    cos: Vec<f64>,
    sin: Vec<f64>,
    weight: Vec<f64>,
}

impl Factor {
    fn from_angles(theta: &[f64], weight: Vec<f64>) -> Self {
        Self {
            cos: theta.iter().map(|t| t.cos()).collect(),
            sin: theta.iter().map(|t| t.sin()).collect(),
            weight,
        }
    }
}

/// Product rule for the normalised surface measure `dσ` on `S^{n−1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct SphereRule {
    n: usize,
    level: usize,
    /// θ₁ … θ_{n−2} (Gauss–Legendre, Jacobian power folded in), then θ_{n−1}.
    factors: Vec<Factor>,
}

impl SphereRule {
    pub fn new(n: usize, level: usize) -> Result<Self> {
        if n < 2 {
            return Err(param(format!("sphere rule needs n >= 2, got {n}")));
        }
        if level < 1 {
            return Err(param("quadrature level must be at least 1"));
        }
        let area = DimensionalConstants::new(n)?.surface_area;
        let mut factors = Vec::with_capacity(n - 1);
        let (x, w) = gauss_legendre(POLAR_NODES_PER_LEVEL * level);
        for j in 0..n.saturating_sub(2) {
            let power = (n - 2 - j) as i32;
            let theta: Vec<f64> = x.iter().map(|xi| 0.5 * PI * (xi + 1.0)).collect();
            let weight = theta
                .iter()
                .zip(&w)
                .map(|(t, wi)| 0.5 * PI * wi * t.sin().powi(power))
                .collect();
            factors.push(Factor::from_angles(&theta, weight));
        }
        let k = AZIMUTH_NODES_PER_LEVEL * level;
        let phi: Vec<f64> = (0..k).map(|i| 2.0 * PI * i as f64 / k as f64).collect();
        factors.push(Factor::from_angles(&phi, vec![2.0 * PI / k as f64; k]));
        // Fold the normalisation into the outermost factor.
        for w in &mut factors[0].weight {
            *w /= area;
        }
        Ok(Self { n, level, factors })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn len(&self) -> usize {
        self.factors.iter().map(|f| f.weight.len()).product()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Visit every node of the sub-rule whose first index is `i0`, in order.
    fn walk_outer(&self, i0: usize, visit: &mut impl FnMut(&[f64], f64)) {
        let mut zeta = vec![0.0; self.n];
        let f0 = &self.factors[0];
        zeta[0] = f0.cos[i0];
        if self.n == 2 {
            zeta[1] = f0.sin[i0];
            visit(&zeta, f0.weight[i0]);
            return;
        }
        self.walk(1, f0.sin[i0], f0.weight[i0], &mut zeta, visit);
    }

    fn walk(&self, depth: usize, sin_prod: f64, weight: f64, zeta: &mut [f64], visit: &mut impl FnMut(&[f64], f64)) {
        let f = &self.factors[depth];
        let last = depth + 1 == self.factors.len();
        for i in 0..f.weight.len() {
            zeta[depth] = sin_prod * f.cos[i];
            let w = weight * f.weight[i];
            if last {
                zeta[depth + 1] = sin_prod * f.sin[i];
                visit(zeta, w);
            } else {
                self.walk(depth + 1, sin_prod * f.sin[i], w, zeta, visit);
            }
        }
    }

    /// Visit all nodes in order with their weights.
    pub fn for_each(&self, mut visit: impl FnMut(&[f64], f64)) {
        for i0 in 0..self.factors[0].weight.len() {
            self.walk_outer(i0, &mut visit);
        }
    }

    /// Materialised node and weight lists; intended for small rules.
    pub fn nodes_and_weights(&self) -> (Vec<Vec<f64>>, Vec<f64>) {
        let mut nodes = Vec::with_capacity(self.len());
        let mut weights = Vec::with_capacity(self.len());
        self.for_each(|z, w| {
            nodes.push(z.to_vec());
            weights.push(w);
        });
        (nodes, weights)
    }

    fn inner_len(&self) -> usize {
        self.len() / self.factors[0].weight.len()
    }
}

/// Partial result of one outer slice: compensated sums or the first bad node.
type Slice = std::result::Result<Vec<f64>, usize>;

fn reduce(parts: Vec<Slice>, m: usize) -> Result<Vec<f64>> {
    let mut acc = vec![Compensated::new(); m];
    for part in parts {
        match part {
            Ok(v) => acc.iter_mut().zip(&v).for_each(|(a, x)| a.add(*x)),
            Err(index) => return Err(Error::NonFinite { index }),
        }
    }
    Ok(acc.iter().map(Compensated::value).collect())
}

/// `∫ f dσ` for an `ℝ^m`-valued integrand written into its output slice.
pub fn integrate_sphere<F>(rule: &SphereRule, m: usize, f: F) -> Result<Vec<f64>>
where
    F: Fn(&[f64], &mut [f64]) + Sync,
{
    let inner = rule.inner_len();
    let parts = map_indexed(rule.factors[0].weight.len(), |i0| {
        let mut out = vec![0.0; m];
        let mut acc = CompensatedVec::new(m);
        let mut bad = None;
        let mut idx = i0 * inner;
        rule.walk_outer(i0, &mut |z: &[f64], w: f64| {
            if bad.is_some() {
                return;
            }
            f(z, &mut out);
            if out.iter().any(|v| !v.is_finite()) {
                bad = Some(idx);
            }
            acc.add_scaled(&out, w);
            idx += 1;
        });
        match bad {
            Some(i) => Err(i),
            None => Ok(acc.values()),
        }
    });
    reduce(parts, m)
}

/// Product rule for Lebesgue volume on `Bⁿ`: graded radial Gauss–Legendre
/// panels times a sphere rule.
#[derive(Debug, Clone, PartialEq)]
pub struct BallRule {
    sphere: SphereRule,
    radius: Vec<f64>,
    /// Includes `ρ^{n−1}` and the surface area.
    radial_weight: Vec<f64>,
}

impl BallRule {
    pub fn new(n: usize, level: usize) -> Result<Self> {
        let sphere = SphereRule::new(n, level)?;
        let area = DimensionalConstants::new(n)?.surface_area;
        let (radius, w) = composite(&RADIAL_BREAKS, RADIAL_NODES_PER_LEVEL * level);
        let radial_weight =
            radius.iter().zip(&w).map(|(r, wi)| area * wi * r.powi(n as i32 - 1)).collect();
        Ok(Self { sphere, radius, radial_weight })
    }

    pub fn dim(&self) -> usize {
        self.sphere.n
    }

    pub fn len(&self) -> usize {
        self.radius.len() * self.sphere.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn sphere(&self) -> &SphereRule {
        &self.sphere
    }

    /// Materialised nodes and weights; intended for small rules.
    pub fn nodes_and_weights(&self) -> (Vec<Vec<f64>>, Vec<f64>) {
        let (zeta, ws) = self.sphere.nodes_and_weights();
        let mut nodes = Vec::with_capacity(self.len());
        let mut weights = Vec::with_capacity(self.len());
        for (r, wr) in self.radius.iter().zip(&self.radial_weight) {
            for (z, w) in zeta.iter().zip(&ws) {
                nodes.push(z.iter().map(|c| r * c).collect());
                weights.push(wr * w);
            }
        }
        (nodes, weights)
    }
}

/// `∫ f dV` over the unit ball.
pub fn integrate_ball<F>(rule: &BallRule, m: usize, f: F) -> Result<Vec<f64>>
where
    F: Fn(&[f64], &mut [f64]) + Sync,
{
    let n = rule.dim();
    let per_shell = rule.sphere.len();
    let parts = map_indexed(rule.radius.len(), |ir| {
        let r = rule.radius[ir];
        let wr = rule.radial_weight[ir];
        let mut y = vec![0.0; n];
        let mut out = vec![0.0; m];
        let mut acc = CompensatedVec::new(m);
        let mut bad = None;
        let mut idx = ir * per_shell;
        rule.sphere.for_each(|z, w| {
            if bad.is_some() {
                return;
            }
            for (yi, zi) in y.iter_mut().zip(z) {
                *yi = r * zi;
            }
            f(&y, &mut out);
            if out.iter().any(|v| !v.is_finite()) {
                bad = Some(idx);
            }
            acc.add_scaled(&out, wr * w);
            idx += 1;
        });
        match bad {
            Some(i) => Err(i),
            None => Ok(acc.values()),
        }
    });
    reduce(parts, m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{dot, norm_sq};

    fn scalar_sphere(rule: &SphereRule, f: impl Fn(&[f64]) -> f64 + Sync) -> f64 {
        integrate_sphere(rule, 1, |z, out| out[0] = f(z)).unwrap()[0]
    }

    #[test]
    fn weights_sum_to_one_and_nodes_are_unit() {
        for n in 2..=5 {
            let rule = SphereRule::new(n, 1).unwrap();
            let (nodes, weights) = rule.nodes_and_weights();
            assert_eq!(nodes.len(), rule.len());
            assert!((crate::sum::sum(&weights) - 1.0).abs() < 1e-13, "n = {n}");
            assert!(weights.iter().all(|&w| w > 0.0));
            assert!(nodes.iter().all(|z| (norm_sq(z) - 1.0).abs() < 1e-14));
        }
    }

    #[test]
    fn low_moments() {
        for n in 2..=5 {
            let rule = SphereRule::new(n, 1).unwrap();
            assert!((scalar_sphere(&rule, |_| 1.0) - 1.0).abs() < 1e-13);
            for k in 0..n {
                assert!(scalar_sphere(&rule, |z| z[k]).abs() < 1e-14);
                let q = scalar_sphere(&rule, |z| z[k] * z[k]);
                assert!((q - 1.0 / n as f64).abs() < 1e-12, "n={n} k={k}");
            }
        }
    }

    #[test]
    fn c20v_closed_form_at_level_four() {
        let rule = SphereRule::new(3, 4).unwrap();
        let x = [0.5, 0.0, 0.0];
        let q = scalar_sphere(&rule, |z| {
            let d2 = 1.0 - 2.0 * dot(&x, z) + 0.25;
            d2.powf(-2.5)
        });
        let r2: f64 = 0.25;
        let exact = (3.0 / (1.0 - r2).powi(2) + 4.0 * r2 / (1.0 - r2).powi(3)) / 3.0;
        assert!((q - exact).abs() < 1e-9, "{q} vs {exact}");
    }

    #[test]
    fn rules_are_reproducible() {
        let a = SphereRule::new(4, 1).unwrap().nodes_and_weights();
        let b = SphereRule::new(4, 1).unwrap().nodes_and_weights();
        assert_eq!(a, b);
        let a = BallRule::new(3, 1).unwrap().nodes_and_weights();
        let b = BallRule::new(3, 1).unwrap().nodes_and_weights();
        assert_eq!(a, b);
    }

    #[test]
    fn ball_volumes_and_moments() {
        for n in 2..=5 {
            let rule = BallRule::new(n, 1).unwrap();
            let (_, w) = rule.nodes_and_weights();
            let vol = DimensionalConstants::new(n).unwrap().ball_volume();
            assert!(((crate::sum::sum(&w) - vol) / vol).abs() < 1e-12, "n = {n}");
            assert!(w.iter().all(|&wi| wi > 0.0));
        }
        let rule = BallRule::new(2, 4).unwrap();
        let one = integrate_ball(&rule, 1, |_, o| o[0] = 1.0).unwrap()[0];
        assert!((one - PI).abs() < 1e-12);
        let q = integrate_ball(&rule, 1, |y, o| o[0] = 1.0 - norm_sq(y)).unwrap()[0];
        assert!((q - PI / 2.0).abs() < 1e-10);
    }

    #[test]
    fn bracket_integral_in_four_dimensions() {
        // The inner mean of |ρx − ζ|⁻² over S³ is 1 (shell theorem), so the
        // integral is A₃(1/4 − |x|²/6); it is bounded by A₃/4 with equality at 0.
        let rule = BallRule::new(4, 2).unwrap();
        let a3 = 2.0 * PI * PI;
        for r in [0.0, 0.5, 0.8] {
            let x = [r, 0.0, 0.0, 0.0];
            let q = integrate_ball(&rule, 1, |y, o| {
                let b2 = crate::geometry::bracket_sq_unchecked(&x, y);
                o[0] = (1.0 - r * r * norm_sq(y)) / b2;
            })
            .unwrap()[0];
            let exact = a3 * (0.25 - r * r / 6.0);
            assert!((q - exact).abs() < 1e-6, "r={r}: {q} vs {exact}");
            assert!(q <= a3 / 4.0 + 1e-12);
        }
    }

    #[test]
    fn non_finite_values_report_their_node() {
        let rule = SphereRule::new(3, 1).unwrap();
        let err = integrate_sphere(&rule, 1, |z, o| o[0] = if z[0] > 0.99 { f64::NAN } else { 0.0 });
        match err {
            Err(Error::NonFinite { index }) => {
                let (nodes, _) = rule.nodes_and_weights();
                assert!(nodes[index][0] > 0.99);
                assert!(nodes[..index].iter().all(|z| z[0] <= 0.99));
            }
            other => panic!("expected a non-finite error, got {other:?}"),
        }
    }
}
