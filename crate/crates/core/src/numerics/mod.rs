//! Numerical building blocks shared by the solvers.

pub mod ode;
pub mod quadrature;
pub mod roots;

pub use ode::Dopri5;
pub use quadrature::{cumulative_simpson, integrate_adaptive_gl, simpson_weights, GaussLegendre};
pub use roots::{bisect_predicate, brent};

/// Four-point Lagrange interpolation on equally spaced samples `ys` at
/// fractional index `t` (0 <= t <= len-1).
pub fn lagrange4(ys: &[f64], t: f64) -> f64 {
    let n = ys.len();
    assert!(n >= 4, "need at least four samples");
    let i = (t.floor() as isize - 1).clamp(0, n as isize - 4) as usize;
    let u = t - i as f64;
    let (y0, y1, y2, y3) = (ys[i], ys[i + 1], ys[i + 2], ys[i + 3]);
    let l0 = -(u - 1.0) * (u - 2.0) * (u - 3.0) / 6.0;
    let l1 = u * (u - 2.0) * (u - 3.0) / 2.0;
    let l2 = -u * (u - 1.0) * (u - 3.0) / 2.0;
    let l3 = u * (u - 1.0) * (u - 2.0) / 6.0;
    y0 * l0 + y1 * l1 + y2 * l2 + y3 * l3
}
