//! Deterministic quadrature on the sphere, the ball and intervals.

pub mod gauss;
pub mod green;
pub mod line;
pub mod sphere;
pub mod zonal;

pub use gauss::{composite, gauss_legendre};
pub use green::{integrate_ball_about, integrate_green_mobius};
pub use line::{integrate_adaptive, AdaptiveResult};
pub use sphere::{integrate_ball, integrate_sphere, BallRule, SphereRule};
pub use zonal::{sphere_design, PolarRule, ZonalRule};
