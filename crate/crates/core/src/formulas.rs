//! Closed-form energies, residuals and classical actions for the benchmark families.
//!
//! The public index is always the node count `n`. Hydrogen takes `n` as the
//! radial number and reports the principal number alongside; the
//! cotangent-squared exact formula uses the shifted index `n + 1`.

use std::f64::consts::PI;
use std::sync::OnceLock;

use serde::Serialize;
use statrs::function::gamma::gamma;

use crate::error::{Error, Result};
use crate::potentials::{centrifugal_strength, Family, PotentialModel};

/// Quantum-number bookkeeping for one level.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LevelIndices {
    /// interior node count
    pub n: u32,
    /// hydrogen only: (n_r, l, principal)
    pub radial: Option<u32>,
    pub l: Option<u32>,
    pub principal: Option<u32>,
    /// cotangent-squared only: index of the exact formula, counted from 1
    pub exact_index: Option<u32>,
}

/// WKB, corrected and exact energies of one level.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FormulaTriple {
    pub indices: LevelIndices,
    pub e_wkb: f64,
    pub e_corrected: Option<f64>,
    pub e_exact: Option<f64>,
}

/// ∫₀¹ √(1 − u⁴) du = Γ(1/4)√π / (8 Γ(7/4)).
pub fn quartic_action_constant() -> f64 {
    static J: OnceLock<f64> = OnceLock::new();
    *J.get_or_init(|| gamma(0.25) * PI.sqrt() / (8.0 * gamma(1.75)))
}

fn level_indices(model: &PotentialModel, n: u32) -> LevelIndices {
    let mut idx = LevelIndices { n, radial: None, l: None, principal: None, exact_index: None };
    match model.family {
        Family::CoulombCentrifugal { l, .. } => {
            idx.radial = Some(n);
            idx.l = Some(l);
            idx.principal = Some(n + l + 1);
        }
        Family::CotSquared { .. } => idx.exact_index = Some(n + 1),
        _ => {}
    }
    idx
}

/// Largest classical action on the bound range, if finite.
pub fn max_action(model: &PotentialModel) -> Option<f64> {
    match model.family {
        Family::Morse { depth, range } => Some(PI / range * (2.0 * model.mass * depth).sqrt()),
        _ => None,
    }
}

/// Inverts the closed-form action: the energy at which I(E) = `action`.
pub fn energy_for_action(model: &PotentialModel, action: f64) -> Result<f64> {
    let (hbar, m) = (model.hbar, model.mass);
    if action < 0.0 || !action.is_finite() {
        return Err(Error::InvalidParameter(format!("action must be non-negative, got {action}")));
    }
    let no_level = || Error::NoTurningPoints { family: model.name(), energy: f64::NAN };
    Ok(match model.family {
        Family::Harmonic { omega } => action * omega / PI,
        Family::Morse { depth, range } => {
            let s = depth.sqrt() - range * action / (PI * (2.0 * m).sqrt());
            if s <= 0.0 {
                return Err(no_level());
            }
            -s * s
        }
        Family::CoulombCentrifugal { charge_sq, l } => {
            let lf = l as f64;
            let d = action / PI + hbar * (lf * (lf + 1.0)).sqrt();
            if d <= 0.0 {
                return Err(no_level());
            }
            -m * charge_sq * charge_sq / (2.0 * d * d)
        }
        Family::CotSquared { depth, width } => {
            let p = action / width + (2.0 * m * depth).sqrt();
            p * p / (2.0 * m) - depth
        }
        Family::Quartic { a } => {
            let c = 2.0 * (2.0 * m).sqrt() * a.powf(0.25) * quartic_action_constant();
            (action / c).powf(4.0 / 3.0)
        }
    })
}

/// Analytic I(E) = ∫ p dx between the turning points.
pub fn classical_action_closed(model: &PotentialModel, energy: f64) -> Result<f64> {
    // validates that E lies in the bound range
    model.turning_points(energy)?;
    let (hbar, m) = (model.hbar, model.mass);
    Ok(match model.family {
        Family::Harmonic { omega } => PI * energy / omega,
        Family::Morse { depth, range } => PI / range * (2.0 * m).sqrt() * (depth.sqrt() - (-energy).sqrt()),
        Family::CoulombCentrifugal { charge_sq, l } => {
            let lf = l as f64;
            PI * (charge_sq * (m / (-2.0 * energy)).sqrt() - hbar * (lf * (lf + 1.0)).sqrt())
        }
        Family::CotSquared { depth, width } => width * ((2.0 * m * (energy + depth)).sqrt() - (2.0 * m * depth).sqrt()),
        Family::Quartic { a } => 2.0 * (2.0 * m).sqrt() * a.powf(0.25) * energy.powf(0.75) * quartic_action_constant(),
    })
}

/// The printed WKB formula for level `n`.
pub fn wkb_energy_closed(model: &PotentialModel, n: u32) -> Result<f64> {
    corrected_energy_closed(model, n, 0.0)
}

/// The printed corrected formula: WKB with (n + 1/2)πħ replaced by (n + 1/2)πħ + R.
pub fn corrected_energy_closed(model: &PotentialModel, n: u32, r: f64) -> Result<f64> {
    let target = (n as f64 + 0.5) * PI * model.hbar + r;
    if let Some(max) = max_action(model) {
        if target >= max {
            return Err(Error::NoSuchLevel { family: model.name(), n });
        }
    }
    energy_for_action(model, target).map_err(|e| match e {
        Error::NoTurningPoints { .. } | Error::InvalidParameter(_) => Error::NoSuchLevel { family: model.name(), n },
        other => other,
    })
}

/// Exact quantum level with `n` nodes where a closed form is known.
pub fn exact_energy(model: &PotentialModel, n: u32) -> Option<f64> {
    let (hbar, m) = (model.hbar, model.mass);
    match model.family {
        Family::Harmonic { omega } => Some((n as f64 + 0.5) * hbar * omega),
        Family::Morse { .. } => wkb_energy_closed(model, n).ok(),
        Family::CoulombCentrifugal { charge_sq, l } => {
            let principal = (n + l + 1) as f64;
            Some(-m * charge_sq * charge_sq / (2.0 * hbar * hbar * principal * principal))
        }
        Family::CotSquared { width, .. } => {
            let lambda = cot_squared_lambda(model)?;
            let k = (n + 1) as f64;
            Some((k * k + 4.0 * k * lambda - 2.0 * lambda) * PI * PI * hbar * hbar / (2.0 * m * width * width))
        }
        Family::Quartic { .. } => None,
    }
}

/// λ of the cotangent-squared exact spectrum.
pub fn cot_squared_lambda(model: &PotentialModel) -> Option<f64> {
    match model.family {
        Family::CotSquared { depth, width } => {
            let g = 8.0 * model.mass * depth * width * width / (PI * PI * model.hbar * model.hbar);
            Some(0.25 * ((g + 1.0).sqrt() - 1.0))
        }
        _ => None,
    }
}

/// R = πħ(l + 1/2 − √(l(l+1))) for the Coulomb problem with unit ħ.
pub fn hydrogen_r_closed(l: u32) -> f64 {
    let lf = l as f64;
    PI * (lf + 0.5 - (lf * (lf + 1.0)).sqrt())
}

/// Residual implied by the exact spectrum, for families where it is known.
pub fn residual_closed(model: &PotentialModel) -> Option<f64> {
    let hbar = model.hbar;
    match model.family {
        Family::Harmonic { .. } | Family::Morse { .. } => Some(0.0),
        Family::CoulombCentrifugal { l, .. } => Some(hbar * hydrogen_r_closed(l)),
        Family::CotSquared { .. } => {
            // same structure as the Coulomb expression with l replaced by 2λ
            let s = 2.0 * cot_squared_lambda(model)?;
            Some(PI * hbar * (s + 0.5 - (s * (s + 1.0)).sqrt()))
        }
        Family::Quartic { .. } => None,
    }
}

/// Evaluates the family's WKB, corrected and exact formulas for level `n`.
pub fn closed_form_energies(model: &PotentialModel, n: u32, r: Option<f64>) -> Result<FormulaTriple> {
    let e_wkb = wkb_energy_closed(model, n)?;
    let e_corrected = match r {
        Some(0.0) => Some(e_wkb),
        Some(r) => Some(corrected_energy_closed(model, n, r)?),
        None => None,
    };
    Ok(FormulaTriple { indices: level_indices(model, n), e_wkb, e_corrected, e_exact: exact_energy(model, n) })
}

/// Number of bound levels, if finite.
pub fn level_count(model: &PotentialModel) -> Option<u32> {
    max_action(model).map(|max| {
        let x = max / (PI * model.hbar) - 0.5;
        if x <= 0.0 {
            0
        } else {
            x.ceil() as u32
        }
    })
}

/// Minimum of the effective potential for the Coulomb family, used when
/// sizing grids.
pub(crate) fn coulomb_well_bottom(model: &PotentialModel) -> Option<(f64, f64)> {
    match model.family {
        Family::CoulombCentrifugal { charge_sq, l } if l > 0 => {
            let g = centrifugal_strength(l, model.hbar, model.mass);
            let r = 2.0 * g / charge_sq;
            Some((r, -charge_sq * charge_sq / (4.0 * g)))
        }
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quartic_constant() {
        assert!((quartic_action_constant() - 0.874019).abs() < 1e-6, "{}", quartic_action_constant());
    }

    #[test]
    fn harmonic_triple() {
        let h = PotentialModel::harmonic(1.0).unwrap();
        let t = closed_form_energies(&h, 2, Some(0.0)).unwrap();
        assert_eq!(t.e_wkb, 2.5);
        assert_eq!(t.e_corrected, Some(2.5));
        assert_eq!(t.e_exact, Some(2.5));
    }

    #[test]
    fn morse_levels() {
        let m = PotentialModel::morse(32.0, 1.0).unwrap();
        assert!((wkb_energy_closed(&m, 2).unwrap() + 15.125).abs() < 1e-12);
        assert!((wkb_energy_closed(&m, 0).unwrap() + 28.125).abs() < 1e-12);
        assert_eq!(level_count(&m), Some(8));
        assert!(matches!(wkb_energy_closed(&m, 8), Err(Error::NoSuchLevel { .. })));
    }

    #[test]
    fn hydrogen_corrected_hits_exact() {
        let h = PotentialModel::hydrogen(1.0, 1).unwrap();
        let t = closed_form_energies(&h, 2, Some(0.269506)).unwrap();
        assert_eq!(t.indices.principal, Some(4));
        assert!((t.e_corrected.unwrap() + 0.03125).abs() < 1e-7);
        assert_eq!(t.e_exact, Some(-0.03125));
        assert!((wkb_energy_closed(&h, 0).unwrap() + 0.1364549).abs() < 1e-7);
    }

    #[test]
    fn hydrogen_r_values() {
        assert!((hydrogen_r_closed(0) - PI / 2.0).abs() < 1e-15);
        assert!((hydrogen_r_closed(1) - 0.269506).abs() < 5e-7);
        assert!((hydrogen_r_closed(5) - 0.071548).abs() < 5e-7);
    }

    #[test]
    fn cot_squared_formulas_agree() {
        let c = PotentialModel::cot_squared(1.0, PI).unwrap();
        assert!((cot_squared_lambda(&c).unwrap() - 0.5).abs() < 1e-15);
        let r = residual_closed(&c).unwrap();
        assert!((r - 0.269506).abs() < 5e-7);
        assert!((exact_energy(&c, 2).unwrap() - 7.0).abs() < 1e-12);
        for n in 0..6 {
            let t = closed_form_energies(&c, n, Some(r)).unwrap();
            let exact = t.e_exact.unwrap();
            assert!((t.e_corrected.unwrap() - exact).abs() < 1e-12);
            let k = (n + 2) as f64;
            assert!((exact - (k * k / 2.0 - 1.0)).abs() < 1e-12);
        }
    }

    #[test]
    fn cot_squared_general_parameters() {
        let c = PotentialModel::cot_squared(2.3, 1.7).unwrap();
        let r = residual_closed(&c).unwrap();
        for n in 0..4 {
            let t = closed_form_energies(&c, n, Some(r)).unwrap();
            assert!((t.e_corrected.unwrap() - t.e_exact.unwrap()).abs() < 1e-10 * t.e_exact.unwrap());
        }
    }

    #[test]
    fn quartic_table_values_from_corrected_formula() {
        let q = PotentialModel::quartic(1.0).unwrap();
        let rows = [(0, 0.667986, 0.255796), (1, 2.393644, 0.044912), (4, 10.244308, 0.018422)];
        for (n, e, r) in rows {
            let got = corrected_energy_closed(&q, n, r).unwrap();
            assert!((got - e).abs() < 5e-6, "n={n}: {got}");
        }
        assert!(closed_form_energies(&q, 0, None).unwrap().e_exact.is_none());
    }

    #[test]
    fn closed_action_inverts_energy() {
        for model in [
            PotentialModel::harmonic(1.3).unwrap(),
            PotentialModel::morse(32.0, 1.0).unwrap(),
            PotentialModel::hydrogen(1.0, 2).unwrap(),
            PotentialModel::cot_squared(1.0, PI).unwrap(),
            PotentialModel::quartic(2.0).unwrap(),
        ] {
            let e = wkb_energy_closed(&model, 1).unwrap();
            let i = classical_action_closed(&model, e).unwrap();
            assert!((i - 1.5 * PI).abs() < 1e-12, "{model}");
        }
    }
}
