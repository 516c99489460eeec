//! Volume integrals against the biharmonic Green function.
//!
//! `integrate_green_mobius` substitutes `y = φ_x(z)`. In those coordinates
//! `G(x, y) |J_{φ_x}(z)| = c_n (1−|x|²)⁴ [x, z]^{−(n+4)} R(|z|)` with the
//! radial profile `R` of [`green_profile`], whose singularity at `z = 0` is
//! absorbed by the volume factor `|z|^{n−1}`. `integrate_ball_about` uses
//! polar coordinates centred at `x` and serves as an independent route.

use super::gauss::composite;
use super::zonal::{sphere_design, PolarRule, ZONAL_NODES_PER_LEVEL};
use crate::error::{domain, param, Error, Result};
use crate::geometry::{norm, AlignedFrame};
use crate::kernels::{green_profile, DimensionalConstants};
use crate::sum::CompensatedVec;

/// Radial Gauss–Legendre nodes per panel at level 1.
pub const GREEN_RADIAL_NODES_PER_LEVEL: usize = 4;

fn check_centre(x: &[f64], level: usize) -> Result<f64> {
    if x.len() < 2 {
        return Err(param(format!("dimension must be at least 2, got {}", x.len())));
    }
    if level < 1 {
        return Err(param("quadrature level must be at least 1"));
    }
    let r = norm(x);
    if !(r < 1.0) {
        return Err(domain(format!("centre must lie in the open unit ball, |x| = {r}")));
    }
    Ok(r)
}

fn ring(frame: &AlignedFrame, n: usize) -> Vec<(Vec<f64>, f64)> {
    sphere_design(n - 1)
        .into_iter()
        .map(|(w, wt)| {
            let mut v = vec![0.0; n];
            frame.embed_complement(&w, &mut v);
            (v, wt)
        })
        .collect()
}

/// Radial breaks on `[0, 1]`: fixed grading plus geometric refinement
/// toward 1 at scale `h`.
fn radial_breaks(h: f64) -> Vec<f64> {
    let mut b = vec![0.0, 0.125, 0.5, 0.75, 0.875];
    let mut refine: Vec<f64> = Vec::new();
    let mut t = h;
    while 1.0 - t > 0.875 {
        refine.push(1.0 - t);
        t *= 3.0;
    }
    refine.reverse();
    b.extend(refine);
    b.push(1.0);
    b
}

/// `∫_{Bⁿ} G(x, y) h(y) dV(y)` through the Möbius substitution.
pub fn integrate_green_mobius<F>(x: &[f64], level: usize, m: usize, h: F) -> Result<Vec<f64>>
where
    F: Fn(&[f64], &mut [f64]),
{
    let r = check_centre(x, level)?;
    let n = x.len();
    let nf = n as f64;
    let consts = DimensionalConstants::new(n)?;
    let s = 1.0 - r * r;
    let scale = consts.green_const * s.powi(4) * consts.surface_area;
    let frame = AlignedFrame::toward(x);
    let e = frame.axis().to_vec();
    let ring = ring(&frame, n);
    let gap = 1.0 - r;
    let polar = PolarRule::graded(n, gap, ZONAL_NODES_PER_LEVEL * level);
    let (rho, wrho) = composite(&radial_breaks(gap), GREEN_RADIAL_NODES_PER_LEVEL * level);

    let mut y = vec![0.0; n];
    let mut out = vec![0.0; m];
    let mut slice = vec![0.0; m];
    let mut acc = CompensatedVec::new(m);
    let per_shell = polar.len() * ring.len();
    for (ir, (&p, &wp)) in rho.iter().zip(&wrho).enumerate() {
        let radial = wp * p.powi(n as i32 - 1) * green_profile(n, p);
        for it in 0..polar.len() {
            let (c, sn, wt) = (polar.cos[it], polar.sin[it], polar.weight[it]);
            let zc = p * c;
            let zp = p * sn;
            let b = 1.0 - 2.0 * r * zc + r * r * p * p;
            let d2 = r * r - 2.0 * r * zc + p * p;
            let alpha = (d2 * r - s * (zc - r)) / b;
            let beta = -s * zp / b;
            let weight = scale * radial * wt * b.powf(-(nf + 4.0) / 2.0);
            if !weight.is_finite() {
                return Err(Error::NonFinite { index: ir * per_shell + it * ring.len() });
            }
            slice.iter_mut().for_each(|v| *v = 0.0);
            for (j, (v, wj)) in ring.iter().enumerate() {
                for k in 0..n {
                    y[k] = alpha * e[k] + beta * v[k];
                }
                h(&y, &mut out);
                if out.iter().any(|o| !o.is_finite()) {
                    return Err(Error::NonFinite { index: ir * per_shell + it * ring.len() + j });
                }
                for (sl, o) in slice.iter_mut().zip(&out) {
                    *sl += wj * o;
                }
            }
            acc.add_scaled(&slice, weight);
        }
    }
    Ok(acc.values())
}

/// `∫_{Bⁿ} f(y) dV(y)` in polar coordinates `y = x + t u` centred at `x`.
///
/// The integrand receives `y` and `t = |y − x|`; the Jacobian `t^{n−1}` is
/// applied by the rule, so integrable singularities of order `t^{−(n−1)+ε}`
/// at `x` are handled.
pub fn integrate_ball_about<F>(x: &[f64], level: usize, m: usize, f: F) -> Result<Vec<f64>>
where
    F: Fn(&[f64], f64, &mut [f64]),
{
    let r = check_centre(x, level)?;
    let n = x.len();
    let area = DimensionalConstants::new(n)?.surface_area;
    let frame = AlignedFrame::toward(x);
    let e = frame.axis().to_vec();
    let ring = ring(&frame, n);
    let polar = PolarRule::graded(n, 1.0 - r, ZONAL_NODES_PER_LEVEL * level);
    let (tu, wu) = composite(&[0.0, 0.125, 0.25, 0.5, 1.0], GREEN_RADIAL_NODES_PER_LEVEL * level);

    let mut y = vec![0.0; n];
    let mut out = vec![0.0; m];
    let mut slice = vec![0.0; m];
    let mut acc = CompensatedVec::new(m);
    let mut index = 0usize;
    for it in 0..polar.len() {
        let (c, sn, wt) = (polar.cos[it], polar.sin[it], polar.weight[it]);
        let t_max = -r * c + (r * r * c * c + 1.0 - r * r).sqrt();
        for (&u, &wu) in tu.iter().zip(&wu) {
            let t = u * t_max;
            let weight = area * wt * wu * t_max * t.powi(n as i32 - 1);
            slice.iter_mut().for_each(|v| *v = 0.0);
            for (v, wj) in &ring {
                for k in 0..n {
                    y[k] = x[k] + t * (c * e[k] + sn * v[k]);
                }
                f(&y, t, &mut out);
                if out.iter().any(|o| !o.is_finite()) {
                    return Err(Error::NonFinite { index });
                }
                for (sl, o) in slice.iter_mut().zip(&out) {
                    *sl += wj * o;
                }
                index += 1;
            }
            acc.add_scaled(&slice, weight);
        }
    }
    Ok(acc.values())
}
