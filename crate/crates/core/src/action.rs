//! Classical action quadrature, WKB root-finding and the residual R.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::formulas::{max_action, residual_closed};
use crate::numerics::{brent, integrate_adaptive_gl};
use crate::potentials::{PotentialModel, TurningPair};

const ACTION_RTOL: f64 = 1e-13;

/// I(E) = ∫ p dx over the classically allowed interval.
///
/// Uses x = x1 + (x2 - x1) sin²t, which removes the square-root endpoint
/// behaviour at both turning points and the r^(-1/2) singularity at the
/// Coulomb origin.
pub fn classical_action(model: &PotentialModel, energy: f64) -> Result<f64> {
    let tp = model.turning_points(energy)?;
    Ok(action_between(model, energy, &tp))
}

pub(crate) fn action_between(model: &PotentialModel, energy: f64, tp: &TurningPair) -> f64 {
    let w = tp.width();
    let f = |t: f64| {
        let s = t.sin();
        let x = tp.x1 + w * s * s;
        model.momentum_clamped(energy, x) * w * (2.0 * t).sin()
    };
    integrate_adaptive_gl(f, 0.0, 0.5 * PI, ACTION_RTOL)
}

/// I(E) extended by zero below the bottom of the well.
fn action_or_zero(model: &PotentialModel, energy: f64) -> Result<f64> {
    let (lo, _) = model.bound_energy_range();
    if energy <= lo {
        return Ok(0.0);
    }
    classical_action(model, energy)
}

/// Finds E with I(E) = `target`.
pub fn energy_for_action_numeric(model: &PotentialModel, target: f64) -> Result<f64> {
    if !target.is_finite() || target <= 0.0 {
        return Err(Error::InvalidParameter(format!("action target must be positive, got {target}")));
    }
    if let Some(max) = max_action(model) {
        if target >= max {
            return Err(Error::ScanExhausted(format!("action {target} exceeds the bound-range maximum {max}")));
        }
    }
    let (lo, hi) = model.bound_energy_range();
    let f = |e: f64| action_or_zero(model, e).map(|i| i - target);

    let (a, b) = match (lo.is_finite(), hi.is_finite()) {
        (true, false) => {
            let mut step = 1.0;
            let mut b = lo + step;
            while f(b)? < 0.0 {
                step *= 2.0;
                b = lo + step;
                if step > 1e300 {
                    return Err(Error::ScanExhausted("no upper energy bracket".into()));
                }
            }
            (lo, b)
        }
        (true, true) => {
            // approach the threshold geometrically; Morse is bounded above by max_action
            let mut gap = 0.5 * (hi - lo);
            let mut b = hi - gap;
            while f(b)? < 0.0 {
                gap *= 0.5;
                b = hi - gap;
                if gap < 1e-300 {
                    return Err(Error::ScanExhausted("no energy bracket below threshold".into()));
                }
            }
            (lo, b)
        }
        (false, true) => {
            let mut b = -1.0;
            while f(b)? < 0.0 {
                b *= 0.5;
                if b > -1e-300 {
                    return Err(Error::ScanExhausted("no energy bracket below threshold".into()));
                }
            }
            let mut a = b;
            while f(a)? > 0.0 {
                a *= 2.0;
                if a < -1e300 {
                    return Err(Error::ScanExhausted("no lower energy bracket".into()));
                }
            }
            (a, b)
        }
        (false, false) => unreachable!("every family is bounded on at least one side"),
    };
    let scale = a.abs().max(b.abs());
    brent(f, a, b, 1e-15 * scale, 300)
}

/// Root of I(E) = (n + 1/2)πħ.
pub fn wkb_energy(model: &PotentialModel, n: u32) -> Result<f64> {
    corrected_energy(model, n, 0.0)
}

/// Root of I(E) = (n + 1/2)πħ + R.
pub fn corrected_energy(model: &PotentialModel, n: u32, r: f64) -> Result<f64> {
    let target = (n as f64 + 0.5) * PI * model.hbar + r;
    if let Some(max) = max_action(model) {
        if target >= max {
            return Err(Error::NoSuchLevel { family: model.name(), n });
        }
    }
    energy_for_action_numeric(model, target)
}

/// R = I(E) − (n + 1/2)πħ at the exact level `energy`.
pub fn residual_route_b(model: &PotentialModel, n: u32, energy: f64) -> Result<f64> {
    Ok(classical_action(model, energy)? - (n as f64 + 0.5) * PI * model.hbar)
}

/// How R behaves across levels.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CaseTag {
    Zero,
    NIndependent,
    NDependent,
}

impl CaseTag {
    pub fn as_str(&self) -> &'static str {
        match self {
            CaseTag::Zero => "zero",
            CaseTag::NIndependent => "n_independent",
            CaseTag::NDependent => "n_dependent",
        }
    }
}

pub const CASE_TOLERANCE: f64 = 1e-4;

pub fn classify_residuals(rs: &[f64]) -> CaseTag {
    if rs.iter().all(|r| r.abs() < CASE_TOLERANCE) {
        return CaseTag::Zero;
    }
    let max = rs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let min = rs.iter().cloned().fold(f64::INFINITY, f64::min);
    if max - min < CASE_TOLERANCE {
        CaseTag::NIndependent
    } else {
        CaseTag::NDependent
    }
}

/// One row of residual output.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ResidualReport {
    pub family: String,
    pub params: String,
    pub n: u32,
    #[serde(rename = "E")]
    pub energy: f64,
    #[serde(rename = "I_classical")]
    pub i_classical: f64,
    pub quantum_integral: Option<f64>,
    #[serde(rename = "R_A")]
    pub r_a: Option<f64>,
    #[serde(rename = "R_B")]
    pub r_b: f64,
    #[serde(rename = "R_closed")]
    pub r_closed: Option<f64>,
    pub case: Option<CaseTag>,
}

impl ResidualReport {
    /// Route-B report at a known exact level.
    pub fn at_level(model: &PotentialModel, n: u32, energy: f64) -> Result<Self> {
        let i_classical = classical_action(model, energy)?;
        Ok(Self {
            family: model.name().to_string(),
            params: model.params_string(),
            n,
            energy,
            i_classical,
            quantum_integral: None,
            r_a: None,
            r_b: i_classical - (n as f64 + 0.5) * PI * model.hbar,
            r_closed: residual_closed(model),
            case: None,
        })
    }
}

/// Route-B residuals over a range of levels plus their classification.
/// `energy_of` supplies the exact level for each n.
pub fn classify_case<F>(model: &PotentialModel, ns: &[u32], mut energy_of: F) -> Result<(CaseTag, Vec<ResidualReport>)>
where
    F: FnMut(u32) -> Result<f64>,
{
    if ns.is_empty() {
        return Err(Error::InvalidParameter("empty level range".into()));
    }
    let mut rows = ns.iter().map(|&n| ResidualReport::at_level(model, n, energy_of(n)?)).collect::<Result<Vec<_>>>()?;
    let tag = classify_residuals(&rows.iter().map(|r| r.r_b).collect::<Vec<_>>());
    for r in &mut rows {
        r.case = Some(tag);
    }
    Ok((tag, rows))
}
