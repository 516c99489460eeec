//! Vector algebra on ℝⁿ and the unit-ball machinery used by every kernel:
//! the bracket `[x, y]`, the product `x ⊗ y`, Möbius automorphisms, and
//! hyperspherical coordinates.

use std::f64::consts::PI;
use std::ops::Deref;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{domain, param, Error, Result};

/// A point of ℝⁿ, `n ≥ 2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Point(Vec<f64>);

impl Point {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.len() < 2 {
            return Err(param(format!("points need dimension n >= 2, got {}", coords.len())));
        }
        Ok(Self(coords))
    }

    pub fn origin(n: usize) -> Self {
        Self(vec![0.0; n])
    }

    /// `s · e_k` with `k` zero-based.
    pub fn axis(n: usize, k: usize, s: f64) -> Self {
        let mut c = vec![0.0; n];
        c[k] = s;
        Self(c)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn norm(&self) -> f64 {
        norm(&self.0)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl Deref for Point {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl From<Point> for Vec<f64> {
    fn from(p: Point) -> Self {
        p.0
    }
}

#[inline]
pub fn dot(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

#[inline]
pub fn norm_sq(x: &[f64]) -> f64 {
    dot(x, x)
}

#[inline]
pub fn norm(x: &[f64]) -> f64 {
    norm_sq(x).sqrt()
}

#[inline]
pub fn dist_sq(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum()
}

pub(crate) fn check_dims(x: &[f64], y: &[f64]) -> Result<()> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch { expected: x.len(), found: y.len() });
    }
    Ok(())
}

fn interior(x: &[f64], what: &str) -> Result<()> {
    let r = norm(x);
    if !(r < 1.0) {
        return Err(domain(format!("{what} requires |x| < 1, got |x| = {r}")));
    }
    Ok(())
}

/// `[x, y]² = 1 − 2⟨x, y⟩ + |x|²|y|²`, no dimension check.
#[inline]
pub(crate) fn bracket_sq_unchecked(x: &[f64], y: &[f64]) -> f64 {
    1.0 - 2.0 * dot(x, y) + norm_sq(x) * norm_sq(y)
}

/// The bracket `[x, y] = |y|x| − x*|`.
///
/// Evaluated through the algebraic form `√(1 − 2⟨x,y⟩ + |x|²|y|²)`, which is
/// symmetric and extends continuously to `x = 0` or `y = 0` (value 1).
pub fn bracket(x: &[f64], y: &[f64]) -> Result<f64> {
    check_dims(x, y)?;
    Ok(bracket_sq_unchecked(x, y).max(0.0).sqrt())
}

/// `x ⊗ y = (1 − |x|²)(1 − |y|²)`.
pub fn tensor(x: &[f64], y: &[f64]) -> f64 {
    (1.0 - norm_sq(x)) * (1.0 - norm_sq(y))
}

#[inline]
pub(crate) fn mobius_into(x: &[f64], y: &[f64], out: &mut [f64]) {
    let d2 = dist_sq(x, y);
    let s = 1.0 - norm_sq(x);
    let b2 = bracket_sq_unchecked(x, y);
    for ((o, &xi), &yi) in out.iter_mut().zip(x).zip(y) {
        *o = (d2 * xi - s * (yi - xi)) / b2;
    }
}

/// The ball automorphism `φ_x(y) = (|x−y|² x − (1−|x|²)(y−x)) / [x,y]²`.
///
/// Swaps `0` and `x`, is an involution, and maps the unit sphere onto itself,
/// so boundary inputs `|y| = 1` are accepted.
pub fn mobius(x: &[f64], y: &[f64]) -> Result<Point> {
    check_dims(x, y)?;
    interior(x, "mobius")?;
    if norm(y) > 1.0 + 1e-12 {
        return Err(domain(format!("mobius requires |y| <= 1, got |y| = {}", norm(y))));
    }
    let mut out = vec![0.0; x.len()];
    mobius_into(x, y, &mut out);
    Ok(Point(out))
}

/// `|J_{φ_x}(y)| = (1 − |x|²)ⁿ / [x, y]^{2n}`.
pub fn mobius_jacobian(x: &[f64], y: &[f64]) -> Result<f64> {
    check_dims(x, y)?;
    interior(x, "mobius_jacobian")?;
    let n = x.len() as i32;
    Ok((1.0 - norm_sq(x)).powi(n) / bracket_sq_unchecked(x, y).powi(n))
}

/// Hyperspherical angles `θ₁..θ_{n−1}`: the first `n − 2` in `[0, π]`, the
/// last in `[0, 2π]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SphericalAngles {
    theta: Vec<f64>,
}

impl SphericalAngles {
    pub fn new(theta: Vec<f64>) -> Result<Self> {
        if theta.is_empty() {
            return Err(param("need at least one angle (n >= 2)"));
        }
        let last = theta.len() - 1;
        for (i, &t) in theta.iter().enumerate() {
            let hi = if i == last { 2.0 * PI } else { PI };
            if !(0.0..=hi).contains(&t) {
                return Err(domain(format!("angle θ{} = {t} outside [0, {hi}]", i + 1)));
            }
        }
        Ok(Self { theta })
    }

    pub fn dim(&self) -> usize {
        self.theta.len() + 1
    }

    pub fn angles(&self) -> &[f64] {
        &self.theta
    }

    /// `ζ_k = sinθ₁⋯sinθ_{k−1} cosθ_k` for `k < n`, `ζ_n = sinθ₁⋯sinθ_{n−1}`.
    pub fn to_cartesian(&self) -> Point {
        let mut out = Vec::with_capacity(self.dim());
        let mut prefix = 1.0;
        for &t in &self.theta {
            out.push(prefix * t.cos());
            prefix *= t.sin();
        }
        out.push(prefix);
        Point(out)
    }

    /// `J_Q = sin^{n−2}θ₁ · sin^{n−3}θ₂ ⋯ sinθ_{n−2}`.
    pub fn sphere_jacobian(&self) -> f64 {
        let polar = self.theta.len() - 1;
        self.theta[..polar]
            .iter()
            .enumerate()
            .map(|(i, t)| t.sin().powi((polar - i) as i32))
            .product()
    }

    /// Recover angles from a unit vector; the last angle is taken from
    /// `atan2` and mapped into `[0, 2π)`.
    pub fn from_cartesian(zeta: &[f64]) -> Result<Self> {
        let n = zeta.len();
        if n < 2 {
            return Err(param("need n >= 2"));
        }
        let r = norm(zeta);
        if (r - 1.0).abs() > 1e-9 {
            return Err(domain(format!("expected a unit vector, |ζ| = {r}")));
        }
        let mut theta = Vec::with_capacity(n - 1);
        for k in 0..n - 2 {
            let tail = norm(&zeta[k + 1..]);
            theta.push(tail.atan2(zeta[k]));
        }
        let mut last = zeta[n - 1].atan2(zeta[n - 2]);
        if last < 0.0 {
            last += 2.0 * PI;
        }
        theta.push(last);
        Ok(Self { theta })
    }
}

/// `|A| = sup_{x≠0} |Ax|/|x|`, the largest singular value.
pub fn operator_norm(a: &DMatrix<f64>) -> Result<f64> {
    if a.nrows() == 0 || a.ncols() == 0 {
        return Err(param("operator norm of an empty matrix"));
    }
    if a.iter().any(|v| !v.is_finite()) {
        return Err(param("matrix has non-finite entries"));
    }
    Ok(a.singular_values().max())
}

/// Orthonormal frame `{e, b₂, …, b_n}` whose first vector is a prescribed
/// unit axis, built from one Householder reflection.
#[derive(Debug, Clone)]
pub struct AlignedFrame {
    axis: Vec<f64>,
    complement: Vec<Vec<f64>>,
}

impl AlignedFrame {
    /// Frame aligned with `x / |x|`, or with `e₁` when `x = 0`.
    pub fn toward(x: &[f64]) -> Self {
        let n = x.len();
        let r = norm(x);
        let axis: Vec<f64> = if r > 0.0 {
            x.iter().map(|v| v / r).collect()
        } else {
            let mut e = vec![0.0; n];
            e[0] = 1.0;
            e
        };
        // v = e₁ ∓ axis, sign chosen so |v|² ≥ 2.
        let sign = if axis[0] > 0.0 { 1.0 } else { -1.0 };
        let mut v: Vec<f64> = axis.iter().map(|a| sign * a).collect();
        v[0] += 1.0;
        let vv = norm_sq(&v);
        let complement = (1..n)
            .map(|j| {
                let mut col: Vec<f64> = v.iter().map(|vi| -2.0 * vi * v[j] / vv).collect();
                col[j] += 1.0;
                col
            })
            .collect();
        Self { axis, complement }
    }

    pub fn axis(&self) -> &[f64] {
        &self.axis
    }

    /// Orthonormal basis of the complement of the axis.
    pub fn complement(&self) -> &[Vec<f64>] {
        &self.complement
    }

    /// Embed a vector of the complement coordinates into ℝⁿ.
    pub fn embed_complement(&self, w: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|o| *o = 0.0);
        for (wj, col) in w.iter().zip(&self.complement) {
            for (o, c) in out.iter_mut().zip(col) {
                *o += wj * c;
            }
        }
    }
}
