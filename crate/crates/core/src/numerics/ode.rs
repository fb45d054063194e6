//! Adaptive Dormand–Prince 5(4) integrator for small fixed-size systems.

use crate::error::{Error, Result};

// Butcher tableau (Dormand & Prince 1980).
const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

// 5th-order minus embedded 4th-order weights.
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

/// Step-size controlled explicit Runge–Kutta integrator.
#[derive(Clone, Copy, Debug)]
pub struct Dopri5 {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
}

impl Default for Dopri5 {
    fn default() -> Self {
        Self { rtol: 1e-12, atol: 1e-14, max_steps: 2_000_000 }
    }
}

fn axpy<const N: usize>(y: &[f64; N], h: f64, terms: &[(f64, &[f64; N])]) -> [f64; N] {
    let mut out = *y;
    for (c, k) in terms {
        for i in 0..N {
            out[i] += h * c * k[i];
        }
    }
    out
}

impl Dopri5 {
    pub fn with_tolerances(rtol: f64, atol: f64) -> Self {
        Self { rtol, atol, ..Self::default() }
    }

    /// Integrates from `x0` to `x_end` (either direction).
    pub fn integrate<const N: usize, F>(&self, f: F, x0: f64, y0: [f64; N], x_end: f64) -> Result<[f64; N]>
    where
        F: FnMut(f64, &[f64; N]) -> [f64; N],
    {
        let out = self.integrate_through(f, x0, y0, &[x_end])?;
        Ok(out[0])
    }

    /// Integrates from `x0` and records the state at every abscissa in
    /// `outputs`, which must be monotone in the direction of integration.
    pub fn integrate_through<const N: usize, F>(
        &self,
        mut f: F,
        x0: f64,
        y0: [f64; N],
        outputs: &[f64],
    ) -> Result<Vec<[f64; N]>>
    where
        F: FnMut(f64, &[f64; N]) -> [f64; N],
    {
        let mut result = Vec::with_capacity(outputs.len());
        let Some(&last) = outputs.last() else {
            return Ok(result);
        };
        let span = (last - x0).abs();
        let dir = if last >= x0 { 1.0 } else { -1.0 };
        let h_floor = 1e-13 * span.max(f64::MIN_POSITIVE) + 1e-300;

        let mut x = x0;
        let mut y = y0;
        let mut k1 = f(x, &y);
        let mut h = dir * initial_step(span, outputs.len());
        let mut steps = 0usize;

        for &target in outputs {
            if (target - x) * dir < 0.0 {
                return Err(Error::Numerical(format!("ODE output abscissa {target} lies behind current position {x}")));
            }
            while (target - x) * dir > 0.0 {
                let remaining = target - x;
                let last_step = h.abs() >= remaining.abs();
                let h_try = if last_step { remaining } else { h };

                let k2 = f(x + C2 * h_try, &axpy(&y, h_try, &[(A21, &k1)]));
                let k3 = f(x + C3 * h_try, &axpy(&y, h_try, &[(A31, &k1), (A32, &k2)]));
                let k4 = f(x + C4 * h_try, &axpy(&y, h_try, &[(A41, &k1), (A42, &k2), (A43, &k3)]));
                let k5 = f(x + C5 * h_try, &axpy(&y, h_try, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]));
                let k6 = f(x + h_try, &axpy(&y, h_try, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]));
                let y_new = axpy(&y, h_try, &[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)]);
                let k7 = f(x + h_try, &y_new);

                let mut err_sq = 0.0;
                for i in 0..N {
                    let e = h_try * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
                    let scale = self.atol + self.rtol * y[i].abs().max(y_new[i].abs());
                    err_sq += (e / scale).powi(2);
                }
                let err = (err_sq / N as f64).sqrt();

                steps += 1;
                if steps > self.max_steps {
                    return Err(Error::StepUnderflow { x, stage: "step budget exhausted" });
                }

                if err.is_finite() && err <= 1.0 {
                    x = if last_step { target } else { x + h_try };
                    y = y_new;
                    k1 = k7;
                    let grow = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
                    // Keep the proposed size when the step was truncated to hit an output.
                    if !last_step {
                        h = h_try * grow;
                    } else if grow < 1.0 {
                        h *= grow;
                    }
                } else {
                    let shrink = if err.is_finite() { (0.9 * err.powf(-0.2)).clamp(0.1, 0.9) } else { 0.1 };
                    h = h_try * shrink;
                    if h.abs() < h_floor {
                        return Err(Error::StepUnderflow { x, stage: "adaptive step below floor" });
                    }
                }
            }
            result.push(y);
        }
        Ok(result)
    }
}

fn initial_step(span: f64, n_outputs: usize) -> f64 {
    (span / (n_outputs.max(1) as f64 * 16.0)).max(span * 1e-6).max(1e-12)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_decay_matches_closed_form() {
        let y = Dopri5::default().integrate(|_, y: &[f64; 1]| [-y[0]], 0.0, [1.0], 3.0).unwrap();
        assert!((y[0] - (-3.0f64).exp()).abs() < 1e-12);
    }

    #[test]
    fn harmonic_oscillator_backwards_with_outputs() {
        let xs: Vec<f64> = (1..=20).map(|i| -0.25 * i as f64).collect();
        let ys = Dopri5::default().integrate_through(|_, y: &[f64; 2]| [y[1], -y[0]], 0.0, [0.0, 1.0], &xs).unwrap();
        for (x, y) in xs.iter().zip(&ys) {
            assert!((y[0] - x.sin()).abs() < 1e-11, "x={x}");
            assert!((y[1] - x.cos()).abs() < 1e-11);
        }
    }

    #[test]
    fn rejects_out_of_order_outputs() {
        let r = Dopri5::default().integrate_through(|_, y: &[f64; 1]| [y[0]], 0.0, [1.0], &[1.0, 0.5]);
        assert!(r.is_err());
    }
}
