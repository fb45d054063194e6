//! The five benchmark potential families.
//!
//! Every model carries explicit `hbar` and `mass` (both 1 unless changed),
//! so the closed-form expressions elsewhere stay dimensionally consistent.

use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Family tag plus its parameters.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Family {
    /// V(x) = m ω² x² / 2
    Harmonic { omega: f64 },
    /// V(x) = V0 (exp(-2ax) - 2 exp(-ax))
    Morse { depth: f64, range: f64 },
    /// V(r) = -e²/r + l(l+1) ħ² / (2 m r²), radial coordinate r > 0
    CoulombCentrifugal { charge_sq: f64, l: u32 },
    /// V(x) = V0 cot²(π x / a), 0 < x < a
    CotSquared { depth: f64, width: f64 },
    /// V(x) = x⁴ / a
    Quartic { a: f64 },
}

/// Leading behaviour ψ ≈ d^ν (1 + c1 d + c2 d²) of the regular solution at a
/// singular wall, d being the distance to the wall.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WallBehavior {
    pub nu: f64,
    pub c1: f64,
    pub c2: f64,
}

impl WallBehavior {
    pub fn value(&self, d: f64) -> f64 {
        d.powf(self.nu) * (1.0 + d * (self.c1 + self.c2 * d))
    }

    pub fn log_derivative(&self, d: f64) -> f64 {
        self.nu / d + (self.c1 + 2.0 * self.c2 * d) / (1.0 + d * (self.c1 + self.c2 * d))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PotentialModel {
    #[serde(flatten)]
    pub family: Family,
    pub hbar: f64,
    pub mass: f64,
}

/// Classical turning points at a given energy.
///
/// For the s-wave Coulomb problem the left end is the origin, which is a
/// domain boundary rather than a root of V(x) = E; `left_is_boundary` flags it.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TurningPair {
    pub x1: f64,
    pub x2: f64,
    pub left_is_boundary: bool,
}

impl TurningPair {
    pub fn width(&self) -> f64 {
        self.x2 - self.x1
    }
}

impl PotentialModel {
    pub fn new(family: Family) -> Result<Self> {
        Self::with_units(family, 1.0, 1.0)
    }

    pub fn with_units(family: Family, hbar: f64, mass: f64) -> Result<Self> {
        let positive = |name: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::InvalidParameter(format!("{name} must be positive and finite, got {v}")))
            }
        };
        positive("hbar", hbar)?;
        positive("mass", mass)?;
        match family {
            Family::Harmonic { omega } => positive("omega", omega)?,
            Family::Morse { depth, range } => {
                positive("V0", depth)?;
                positive("a", range)?;
            }
            Family::CoulombCentrifugal { charge_sq, .. } => positive("e2", charge_sq)?,
            Family::CotSquared { depth, width } => {
                positive("V0", depth)?;
                positive("a", width)?;
            }
            Family::Quartic { a } => positive("a", a)?,
        }
        Ok(Self { family, hbar, mass })
    }

    pub fn harmonic(omega: f64) -> Result<Self> {
        Self::new(Family::Harmonic { omega })
    }

    pub fn morse(depth: f64, range: f64) -> Result<Self> {
        Self::new(Family::Morse { depth, range })
    }

    pub fn hydrogen(charge_sq: f64, l: u32) -> Result<Self> {
        Self::new(Family::CoulombCentrifugal { charge_sq, l })
    }

    pub fn cot_squared(depth: f64, width: f64) -> Result<Self> {
        Self::new(Family::CotSquared { depth, width })
    }

    pub fn quartic(a: f64) -> Result<Self> {
        Self::new(Family::Quartic { a })
    }

    /// Builds a model from a family name ("harmonic", "morse", "hydrogen",
    /// "cot2", "quartic") and `key=value` pairs. Missing keys take the
    /// benchmark defaults.
    pub fn from_name(name: &str, params: &[(String, f64)]) -> Result<Self> {
        let lookup = |keys: &[&str], default: f64| -> f64 {
            params.iter().rev().find(|(k, _)| keys.contains(&k.as_str())).map(|(_, v)| *v).unwrap_or(default)
        };
        let allowed: &[&str] = match name {
            "harmonic" => &["omega"],
            "morse" => &["V0", "v0", "a"],
            "hydrogen" => &["e2", "l"],
            "cot2" => &["V0", "v0", "a"],
            "quartic" => &["a"],
            other => {
                return Err(Error::InvalidParameter(format!(
                    "unknown family '{other}' (expected harmonic, morse, hydrogen, cot2 or quartic)"
                )))
            }
        };
        for (k, _) in params {
            if !allowed.contains(&k.as_str()) && !["hbar", "m", "mass"].contains(&k.as_str()) {
                return Err(Error::InvalidParameter(format!("parameter '{k}' does not apply to {name}")));
            }
        }
        let family = match name {
            "harmonic" => Family::Harmonic { omega: lookup(&["omega"], 1.0) },
            "morse" => Family::Morse { depth: lookup(&["V0", "v0"], 32.0), range: lookup(&["a"], 1.0) },
            "hydrogen" => {
                let l = lookup(&["l"], 0.0);
                if l < 0.0 || l.fract() != 0.0 {
                    return Err(Error::InvalidParameter(format!("l must be a non-negative integer, got {l}")));
                }
                Family::CoulombCentrifugal { charge_sq: lookup(&["e2"], 1.0), l: l as u32 }
            }
            "cot2" => Family::CotSquared { depth: lookup(&["V0", "v0"], 1.0), width: lookup(&["a"], PI) },
            _ => Family::Quartic { a: lookup(&["a"], 1.0) },
        };
        Self::with_units(family, lookup(&["hbar"], 1.0), lookup(&["m", "mass"], 1.0))
    }

    /// Parses `name` or `name:key=value,key=value`.
    pub fn parse(spec: &str) -> Result<Self> {
        let (name, rest) = spec.split_once(':').unwrap_or((spec, ""));
        Self::from_name(name.trim(), &parse_params(rest)?)
    }

    pub fn name(&self) -> &'static str {
        match self.family {
            Family::Harmonic { .. } => "harmonic",
            Family::Morse { .. } => "morse",
            Family::CoulombCentrifugal { .. } => "hydrogen",
            Family::CotSquared { .. } => "cot2",
            Family::Quartic { .. } => "quartic",
        }
    }

    pub fn params_string(&self) -> String {
        let mut s = match self.family {
            Family::Harmonic { omega } => format!("omega={omega}"),
            Family::Morse { depth, range } => format!("V0={depth};a={range}"),
            Family::CoulombCentrifugal { charge_sq, l } => format!("e2={charge_sq};l={l}"),
            Family::CotSquared { depth, width } => format!("V0={depth};a={width}"),
            Family::Quartic { a } => format!("a={a}"),
        };
        if self.hbar != 1.0 || self.mass != 1.0 {
            s.push_str(&format!(";hbar={};m={}", self.hbar, self.mass));
        }
        s
    }

    /// Open interval on which V is defined.
    pub fn domain(&self) -> (f64, f64) {
        match self.family {
            Family::CoulombCentrifugal { .. } => (0.0, f64::INFINITY),
            Family::CotSquared { width, .. } => (0.0, width),
            _ => (f64::NEG_INFINITY, f64::INFINITY),
        }
    }

    pub fn in_domain(&self, x: f64) -> bool {
        let (lo, hi) = self.domain();
        x.is_finite() && x > lo && x < hi
    }

    pub fn evaluate(&self, x: f64) -> Result<f64> {
        if !self.in_domain(x) {
            return Err(Error::Domain { family: self.name(), x });
        }
        Ok(self.value(x))
    }

    /// V(x) without the domain check.
    pub fn value(&self, x: f64) -> f64 {
        let (m, hbar) = (self.mass, self.hbar);
        match self.family {
            Family::Harmonic { omega } => 0.5 * m * omega * omega * x * x,
            Family::Morse { depth, range } => {
                let y = (-range * x).exp();
                depth * (y * y - 2.0 * y)
            }
            Family::CoulombCentrifugal { charge_sq, l } => {
                let g = centrifugal_strength(l, hbar, m);
                -charge_sq / x + g / (x * x)
            }
            Family::CotSquared { depth, width } => {
                let t = (PI * x / width).tan();
                depth / (t * t)
            }
            Family::Quartic { a } => x.powi(4) / a,
        }
    }

    /// dV/dx.
    pub fn derivative(&self, x: f64) -> f64 {
        let (m, hbar) = (self.mass, self.hbar);
        match self.family {
            Family::Harmonic { omega } => m * omega * omega * x,
            Family::Morse { depth, range } => {
                let y = (-range * x).exp();
                depth * range * (-2.0 * y * y + 2.0 * y)
            }
            Family::CoulombCentrifugal { charge_sq, l } => {
                let g = centrifugal_strength(l, hbar, m);
                charge_sq / (x * x) - 2.0 * g / (x * x * x)
            }
            Family::CotSquared { depth, width } => {
                let k = PI / width;
                let c = 1.0 / (k * x).tan();
                // d/dx cot² = -2 cot csc² k
                -2.0 * depth * k * c * (1.0 + c * c)
            }
            Family::Quartic { a } => 4.0 * x.powi(3) / a,
        }
    }

    /// 2m(E - V(x))/ħ², the local wave number squared.
    pub fn k_squared(&self, energy: f64, x: f64) -> f64 {
        2.0 * self.mass * (energy - self.value(x)) / (self.hbar * self.hbar)
    }

    pub fn classical_momentum(&self, energy: f64, x: f64) -> Result<f64> {
        let v = self.evaluate(x)?;
        let kinetic = energy - v;
        // rounding at a turning point is not a forbidden region
        if kinetic < -1e-12 * energy.abs().max(v.abs()).max(f64::MIN_POSITIVE) {
            return Err(Error::Forbidden { x, energy, potential: v });
        }
        Ok((2.0 * self.mass * kinetic.max(0.0)).sqrt())
    }

    /// Classical momentum clamped to zero where rounding makes E - V
    /// marginally negative.
    pub fn momentum_clamped(&self, energy: f64, x: f64) -> f64 {
        (2.0 * self.mass * (energy - self.value(x))).max(0.0).sqrt()
    }

    /// Energies admitting a finite classically allowed interval: (lowest, threshold).
    pub fn bound_energy_range(&self) -> (f64, f64) {
        match self.family {
            Family::Harmonic { .. } | Family::Quartic { .. } | Family::CotSquared { .. } => (0.0, f64::INFINITY),
            Family::Morse { depth, .. } => (-depth, 0.0),
            Family::CoulombCentrifugal { charge_sq, l } => {
                if l == 0 {
                    (f64::NEG_INFINITY, 0.0)
                } else {
                    let g = centrifugal_strength(l, self.hbar, self.mass);
                    (-charge_sq * charge_sq / (4.0 * g), 0.0)
                }
            }
        }
    }

    pub fn turning_points(&self, energy: f64) -> Result<TurningPair> {
        let none = || Error::NoTurningPoints { family: self.name(), energy };
        let (lo, hi) = self.bound_energy_range();
        if !energy.is_finite() || energy <= lo || energy >= hi {
            return Err(none());
        }
        let m = self.mass;
        let pair = match self.family {
            Family::Harmonic { omega } => {
                let x = (2.0 * energy / (m * omega * omega)).sqrt();
                TurningPair { x1: -x, x2: x, left_is_boundary: false }
            }
            Family::Quartic { a } => {
                let x = (a * energy).powf(0.25);
                TurningPair { x1: -x, x2: x, left_is_boundary: false }
            }
            Family::Morse { depth, range } => {
                let s = (1.0 + energy / depth).sqrt();
                TurningPair { x1: -(1.0 + s).ln() / range, x2: -(1.0 - s).ln() / range, left_is_boundary: false }
            }
            Family::CotSquared { depth, width } => {
                let x1 = width / PI * (depth / energy).sqrt().atan();
                TurningPair { x1, x2: width - x1, left_is_boundary: false }
            }
            Family::CoulombCentrifugal { charge_sq, l } => {
                let g = centrifugal_strength(l, self.hbar, m);
                let b = -energy;
                if l == 0 {
                    TurningPair { x1: 0.0, x2: charge_sq / b, left_is_boundary: true }
                } else {
                    // b r² - e² r + g = 0
                    let disc = (charge_sq * charge_sq - 4.0 * b * g).max(0.0).sqrt();
                    let q = charge_sq + disc;
                    TurningPair { x1: 2.0 * g / q, x2: q / (2.0 * b), left_is_boundary: false }
                }
            }
        };
        if pair.x1.is_nan() || pair.x2.is_nan() || pair.x1 >= pair.x2 {
            return Err(none());
        }
        Ok(pair)
    }

    /// Abscissa of the potential minimum inside [x1, x2], or the midpoint when
    /// the minimum sits on the boundary.
    pub fn well_center(&self, tp: &TurningPair) -> f64 {
        let candidate = match self.family {
            Family::Harmonic { .. } | Family::Quartic { .. } | Family::Morse { .. } => 0.0,
            Family::CotSquared { width, .. } => 0.5 * width,
            Family::CoulombCentrifugal { charge_sq, l } => {
                if l == 0 {
                    f64::NAN
                } else {
                    2.0 * centrifugal_strength(l, self.hbar, self.mass) / charge_sq
                }
            }
        };
        if candidate > tp.x1 && candidate < tp.x2 {
            candidate
        } else {
            0.5 * (tp.x1 + tp.x2)
        }
    }

    /// Regular-solution behaviour at the left wall, if the domain has one.
    pub fn left_wall(&self, energy: f64) -> Option<WallBehavior> {
        let hb2 = self.hbar * self.hbar;
        match self.family {
            Family::CoulombCentrifugal { charge_sq, l } => {
                let lf = l as f64;
                Some(WallBehavior { nu: lf + 1.0, c1: -self.mass * charge_sq / (hb2 * (lf + 1.0)), c2: 0.0 })
            }
            Family::CotSquared { depth, width } => {
                let g = 2.0 * self.mass * depth * width * width / (PI * PI * hb2);
                let nu = 0.5 * (1.0 + (1.0 + 4.0 * g).sqrt());
                let beta = 2.0 * self.mass * (energy + 2.0 * depth / 3.0) / hb2;
                Some(WallBehavior { nu, c1: 0.0, c2: -beta / (4.0 * nu + 2.0) })
            }
            _ => None,
        }
    }

    /// Regular-solution behaviour at the right wall (distance measured from it).
    pub fn right_wall(&self, energy: f64) -> Option<WallBehavior> {
        match self.family {
            Family::CotSquared { .. } => self.left_wall(energy),
            _ => None,
        }
    }
}

impl fmt::Display for PotentialModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({})", self.name(), self.params_string())
    }
}

pub(crate) fn centrifugal_strength(l: u32, hbar: f64, mass: f64) -> f64 {
    let lf = l as f64;
    lf * (lf + 1.0) * hbar * hbar / (2.0 * mass)
}

/// Parses `key=value` pairs separated by commas or semicolons.
pub fn parse_params(s: &str) -> Result<Vec<(String, f64)>> {
    s.split([',', ';'])
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .map(|p| {
            let (k, v) =
                p.split_once('=').ok_or_else(|| Error::InvalidParameter(format!("expected key=value, got '{p}'")))?;
            let v: f64 = v.trim().parse().map_err(|_| Error::InvalidParameter(format!("bad number in '{p}'")))?;
            Ok((k.trim().to_string(), v))
        })
        .collect()
}
