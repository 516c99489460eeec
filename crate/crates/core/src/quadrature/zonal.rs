//! Rules adapted to integrands that are axially symmetric about a point's
//! direction up to a low-degree polynomial factor.
//!
//! A direction is written `ζ = cos θ · e + sin θ · Qω` with `e = x/|x|`,
//! `Q` an orthonormal basis of `e^⊥` and `ω ∈ S^{n−2}`. The polar angle uses
//! composite Gauss–Legendre panels graded toward `θ = 0` at the scale
//! `1 − |x|`; the `ω`-sphere uses a rule exact for polynomials of degree 5.
//! Kernels depend on `θ` only and catalog data are polynomials of degree at
//! most 4, so the `ω` integration is exact.

use super::gauss::{composite, graded_angle_breaks};
use crate::error::{param, Error, Result};
use crate::geometry::{norm, AlignedFrame};
use crate::specfun::zonal_normalizer;
use crate::sum::{Compensated, CompensatedVec};

/// Gauss–Legendre nodes per polar panel at level 1.
pub const ZONAL_NODES_PER_LEVEL: usize = 4;

/// Points and weights on `S^{d−1}` exact for polynomials of degree ≤ 5.
pub fn sphere_design(d: usize) -> Vec<(Vec<f64>, f64)> {
    if d == 1 {
        return vec![(vec![1.0], 0.5), (vec![-1.0], 0.5)];
    }
    let df = d as f64;
    let mut out = Vec::with_capacity(2 * d + (1 << d));
    let w_axis = 1.0 / (df * (df + 2.0));
    for i in 0..d {
        for s in [1.0, -1.0] {
            let mut p = vec![0.0; d];
            p[i] = s;
            out.push((p, w_axis));
        }
    }
    let w_corner = df / (2f64.powi(d as i32) * (df + 2.0));
    let c = 1.0 / df.sqrt();
    for mask in 0..(1usize << d) {
        let p = (0..d).map(|i| if mask >> i & 1 == 1 { -c } else { c }).collect();
        out.push((p, w_corner));
    }
    out
}

/// Polar-angle rule on `[0, π]` for the normalised measure: weights include
/// `Γ(n/2)/(√π Γ((n−1)/2)) sin^{n−2}θ`.
#[derive(Debug, Clone, PartialEq)]
pub struct PolarRule {
    pub cos: Vec<f64>,
    pub sin: Vec<f64>,
    pub weight: Vec<f64>,
}

impl PolarRule {
    /// Panels graded at scale `h` with `per_panel` nodes each.
    pub fn graded(n: usize, h: f64, per_panel: usize) -> Self {
        let (theta, w) = composite(&graded_angle_breaks(h), per_panel);
        let pref = zonal_normalizer(n);
        let power = n as i32 - 2;
        let weight = theta.iter().zip(&w).map(|(t, wi)| pref * wi * t.sin().powi(power)).collect();
        Self { cos: theta.iter().map(|t| t.cos()).collect(), sin: theta.iter().map(|t| t.sin()).collect(), weight }
    }

    pub fn len(&self) -> usize {
        self.weight.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weight.is_empty()
    }
}

/// Sphere rule aligned with a centre point `x`.
#[derive(Debug, Clone)]
pub struct ZonalRule {
    n: usize,
    level: usize,
    frame: AlignedFrame,
    polar: PolarRule,
    /// `Qω` for each design point, with its weight.
    ring: Vec<(Vec<f64>, f64)>,
}

impl ZonalRule {
    pub fn new(x: &[f64], level: usize) -> Result<Self> {
        let n = x.len();
        if n < 2 {
            return Err(param(format!("zonal rule needs n >= 2, got {n}")));
        }
        if level < 1 {
            return Err(param("quadrature level must be at least 1"));
        }
        let frame = AlignedFrame::toward(x);
        let polar = PolarRule::graded(n, 1.0 - norm(x).min(1.0), ZONAL_NODES_PER_LEVEL * level);
        let ring = sphere_design(n - 1)
            .into_iter()
            .map(|(w, wt)| {
                let mut v = vec![0.0; n];
                frame.embed_complement(&w, &mut v);
                (v, wt)
            })
            .collect();
        Ok(Self { n, level, frame, polar, ring })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn axis(&self) -> &[f64] {
        self.frame.axis()
    }

    pub fn polar(&self) -> &PolarRule {
        &self.polar
    }

    /// Directions `Qω` of the secondary rule and their weights.
    pub fn ring(&self) -> &[(Vec<f64>, f64)] {
        &self.ring
    }

    pub fn len(&self) -> usize {
        self.polar.len() * self.ring.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// `∫ profile(cos θ) dσ` over the sphere (polar rule only).
    pub fn integrate_profile(&self, profile: impl Fn(f64) -> f64) -> Result<f64> {
        let mut acc = Compensated::new();
        for (i, (&c, &w)) in self.polar.cos.iter().zip(&self.polar.weight).enumerate() {
            let p = profile(c);
            if !p.is_finite() {
                return Err(Error::NonFinite { index: i * self.ring.len() });
            }
            acc.add(w * p);
        }
        Ok(acc.value())
    }

    /// `∫ profile(cos θ) · data(ζ) dσ(ζ)` for `ℝ^m`-valued data.
    pub fn integrate(
        &self,
        m: usize,
        profile: impl Fn(f64) -> f64,
        data: impl Fn(&[f64], &mut [f64]),
    ) -> Result<Vec<f64>> {
        let n = self.n;
        let e = self.frame.axis();
        let mut zeta = vec![0.0; n];
        let mut out = vec![0.0; m];
        let mut acc = CompensatedVec::new(m);
        let mut slice = vec![0.0; m];
        for i in 0..self.polar.len() {
            let (c, s, w) = (self.polar.cos[i], self.polar.sin[i], self.polar.weight[i]);
            let p = profile(c);
            if !p.is_finite() {
                return Err(Error::NonFinite { index: i * self.ring.len() });
            }
            slice.iter_mut().for_each(|v| *v = 0.0);
            for (j, (v, wj)) in self.ring.iter().enumerate() {
                for k in 0..n {
                    zeta[k] = c * e[k] + s * v[k];
                }
                data(&zeta, &mut out);
                if out.iter().any(|o| !o.is_finite()) {
                    return Err(Error::NonFinite { index: i * self.ring.len() + j });
                }
                for (sl, o) in slice.iter_mut().zip(&out) {
                    *sl += wj * o;
                }
            }
            acc.add_scaled(&slice, w * p);
        }
        Ok(acc.values())
    }
}
