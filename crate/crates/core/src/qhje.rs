//! Quantum Hamilton–Jacobi fields in phase–amplitude form.
//!
//! The real part of the quantum momentum is written X' = ħ/ρ², where the
//! amplitude obeys ρ'' + k²ρ = 1/ρ³ and the phase θ' = 1/ρ² gives X = ħθ.
//! Any solution of the amplitude equation solves the third-order real-part
//! equation, so the physics lies in picking the solution. Here the amplitude
//! is fixed by requiring the exact left solution to carry phase π/4 at the
//! left turning point and the exact right solution phase −π/4 at the right
//! one, which is the connection rule that turns the wave function into
//! A/√X'·sin(X/ħ + π/4). Among the frames meeting both conditions the one
//! with the smallest trace is kept; it varies continuously through each
//! eigenvalue.

use std::f64::consts::PI;

use serde::Serialize;

use crate::action::classical_action;
use crate::eigensolver::EigenState;
use crate::error::{Error, Result};
use crate::formulas::wkb_energy_closed;
use crate::numerics::{brent, cumulative_simpson, integrate_adaptive_gl, simpson_weights, Dopri5};
use crate::potentials::{Family, PotentialModel, TurningPair};

/// ∫κ dx from the start of a Riccati integration to the turning point.
const RICCATI_DECAY: f64 = 30.0;
/// Left cut-off of the s-wave Coulomb problem, relative to the outer turning point.
pub const COULOMB_ORIGIN_CUT: f64 = 1e-6;
pub const DEFAULT_PANELS: usize = 4000;

fn dopri() -> Dopri5 {
    Dopri5::with_tolerances(1e-12, 1e-13)
}

/// Interval on which the fields live. For the s-wave Coulomb problem the
/// left end is moved off the origin to a pseudo turning point.
pub fn field_interval(model: &PotentialModel, energy: f64) -> Result<TurningPair> {
    let tp = model.turning_points(energy)?;
    if tp.left_is_boundary {
        Ok(TurningPair { x1: COULOMB_ORIGIN_CUT * tp.x2, ..tp })
    } else {
        Ok(tp)
    }
}

/// Classical action between the true left end and the pseudo turning point.
fn origin_action(model: &PotentialModel, energy: f64, cut: f64) -> f64 {
    // r = cut·u² removes the r^(-1/2) endpoint behaviour
    integrate_adaptive_gl(|u| model.momentum_clamped(energy, cut * u * u) * 2.0 * cut * u, 0.0, 1.0, 1e-13)
}

/// Walks outward from `start` until ∫κ dx reaches `target` or the domain ends.
fn decay_point(model: &PotentialModel, energy: f64, start: f64, dir: f64, scale: f64, target: f64) -> f64 {
    let mut x = start;
    let mut acc = 0.0;
    let mut dx = 1e-3 * scale;
    let mut steps = 0;
    while acc < target {
        let next = x + dir * dx;
        if !model.in_domain(next) {
            break;
        }
        acc += (-model.k_squared(energy, x + dir * 0.5 * dx)).max(0.0).sqrt() * dx;
        x = next;
        steps += 1;
        if steps % 2000 == 0 {
            dx *= 2.0;
        }
    }
    x
}

/// Log-derivatives ψ'/ψ of the left-regular and right-regular exact
/// solutions, evaluated at the two ends of `tp`.
pub fn boundary_log_derivatives(model: &PotentialModel, energy: f64, tp: &TurningPair) -> Result<(f64, f64)> {
    let k2 = |x: f64| model.k_squared(energy, x);
    let riccati = |x: f64, l: &[f64; 1]| [-k2(x) - l[0] * l[0]];
    let w = tp.width();
    let solver = dopri();

    let left = match model.family {
        Family::CoulombCentrifugal { l: 0, .. } => model.left_wall(energy).expect("Coulomb wall").log_derivative(tp.x1),
        Family::CoulombCentrifugal { .. } | Family::CotSquared { .. } => {
            let wall = model.left_wall(energy).expect("wall behaviour");
            let d0 = 1e-3 * tp.x1;
            solver.integrate(riccati, d0, [wall.log_derivative(d0)], tp.x1)?[0]
        }
        _ => {
            let x0 = decay_point(model, energy, tp.x1, -1.0, w, RICCATI_DECAY);
            solver.integrate(riccati, x0, [decay_log_derivative(model, energy, x0, 1.0)], tp.x1)?[0]
        }
    };
    let right = match model.family {
        Family::CotSquared { width, .. } => {
            let wall = model.right_wall(energy).expect("wall behaviour");
            let d0 = 1e-3 * (width - tp.x2);
            solver.integrate(riccati, width - d0, [-wall.log_derivative(d0)], tp.x2)?[0]
        }
        _ => {
            let x0 = decay_point(model, energy, tp.x2, 1.0, w, RICCATI_DECAY);
            solver.integrate(riccati, x0, [decay_log_derivative(model, energy, x0, -1.0)], tp.x2)?[0]
        }
    };
    Ok((left, right))
}

/// WKB log-derivative ±κ − κ'/(2κ) of the solution decaying away from the well.
fn decay_log_derivative(model: &PotentialModel, energy: f64, x: f64, sign: f64) -> f64 {
    let hb2 = model.hbar * model.hbar;
    let kappa = (-model.k_squared(energy, x)).max(1e-300).sqrt();
    let dkappa = model.mass * model.derivative(x) / (hb2 * kappa);
    sign * kappa - dkappa / (2.0 * kappa)
}

/// Solves y'' = −k² y for the cosine-like and sine-like solutions started at
/// `x0`, returning (c, c', s, s') at `x`.
fn fundamental(model: &PotentialModel, energy: f64, x0: f64, x: f64) -> Result<[f64; 4]> {
    dopri().integrate(
        |t, y: &[f64; 4]| {
            let k2 = model.k_squared(energy, t);
            [y[1], -k2 * y[0], y[3], -k2 * y[2]]
        },
        x0,
        [1.0, 0.0, 0.0, 1.0],
        x,
    )
}

/// Amplitude/phase initial data of one energy.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct MilneFrame {
    pub model: PotentialModel,
    pub energy: f64,
    /// ends of the field interval (pseudo turning point on the left for s-wave Coulomb)
    pub interval: TurningPair,
    /// starting abscissa of the amplitude integration
    pub x_m: f64,
    pub rho_m: f64,
    pub drho_m: f64,
    /// ∫p dx from the domain boundary to the pseudo turning point (zero otherwise)
    pub origin_action: f64,
}

impl MilneFrame {
    pub fn solve(model: &PotentialModel, energy: f64) -> Result<Self> {
        let tp = field_interval(model, energy)?;
        let (l1, l2) = boundary_log_derivatives(model, energy, &tp)?;
        let x_m = model.well_center(&tp);

        let row = |x: f64, l: f64| -> Result<[f64; 3]> {
            let [c, cp, s, sp] = fundamental(model, energy, x_m, x)?;
            Ok([c * c * l - c * cp, 2.0 * c * s * l - (c * sp + cp * s), s * s * l - s * sp])
        };
        let a = row(tp.x1, l1)?;
        let b = row(tp.x2, l2)?;
        let m = frame_matrix(a, b, [1.0, -1.0]).ok_or(Error::NoMilneFrame { energy })?;
        let rho_m = m[0].sqrt();
        let origin =
            if model.turning_points(energy)?.left_is_boundary { origin_action(model, energy, tp.x1) } else { 0.0 };
        Ok(Self { model: *model, energy, interval: tp, x_m, rho_m, drho_m: m[1] / rho_m, origin_action: origin })
    }

    fn rhs(&self) -> impl Fn(f64, &[f64; 3]) -> [f64; 3] + '_ {
        move |x, y| {
            let r2 = y[0] * y[0];
            [y[1], 1.0 / (r2 * y[0]) - self.model.k_squared(self.energy, x) * y[0], 1.0 / r2]
        }
    }

    /// (ρ, ρ', θ) at `x`, with θ(x_m) = 0.
    pub fn state_at(&self, x: f64) -> Result<[f64; 3]> {
        dopri().integrate(self.rhs(), self.x_m, [self.rho_m, self.drho_m, 0.0], x).map_err(|e| relabel(e, "amplitude"))
    }

    /// States at many abscissas (any order).
    pub fn states_at(&self, xs: &[f64]) -> Result<Vec<[f64; 3]>> {
        let mut left: Vec<(usize, f64)> = xs.iter().copied().enumerate().filter(|(_, x)| *x < self.x_m).collect();
        let mut right: Vec<(usize, f64)> = xs.iter().copied().enumerate().filter(|(_, x)| *x >= self.x_m).collect();
        left.sort_by(|a, b| b.1.total_cmp(&a.1));
        right.sort_by(|a, b| a.1.total_cmp(&b.1));
        let mut out = vec![[0.0; 3]; xs.len()];
        let y0 = [self.rho_m, self.drho_m, 0.0];
        for side in [left, right] {
            if side.is_empty() {
                continue;
            }
            let points: Vec<f64> = side.iter().map(|(_, x)| *x).collect();
            let states =
                dopri().integrate_through(self.rhs(), self.x_m, y0, &points).map_err(|e| relabel(e, "amplitude"))?;
            for ((i, _), s) in side.iter().zip(states) {
                out[*i] = s;
            }
        }
        Ok(out)
    }

    /// θ(x2) − θ(x1); equals (n + 1/2)π exactly at the n-th eigenvalue.
    pub fn phase_span(&self) -> Result<f64> {
        let s = self.states_at(&[self.interval.x1, self.interval.x2])?;
        Ok(s[1][2] - s[0][2])
    }

    /// Pointwise quantities at `x`.
    pub fn point(&self, x: f64) -> Result<FieldPoint> {
        let [rho, drho, theta] = self.state_at(x)?;
        Ok(FieldPoint::new(&self.model, self.energy, x, rho, drho, theta))
    }
}

fn relabel(e: Error, stage: &'static str) -> Error {
    match e {
        Error::StepUnderflow { x, .. } => Error::StepUnderflow { x, stage },
        other => other,
    }
}

/// Symmetric M = [[p, q], [q, r]] with det M = 1, p > 0, satisfying the two
/// linear boundary rows; the smallest-trace solution.
fn frame_matrix(a: [f64; 3], b: [f64; 3], rhs: [f64; 2]) -> Option<[f64; 3]> {
    let dot = |u: &[f64; 3], v: &[f64; 3]| u[0] * v[0] + u[1] * v[1] + u[2] * v[2];
    // minimum-norm particular solution m0 = Aᵀ (A Aᵀ)⁻¹ rhs
    let (g11, g12, g22) = (dot(&a, &a), dot(&a, &b), dot(&b, &b));
    let det = g11 * g22 - g12 * g12;
    if det.abs() <= 1e-300 {
        return None;
    }
    let c1 = (g22 * rhs[0] - g12 * rhs[1]) / det;
    let c2 = (g11 * rhs[1] - g12 * rhs[0]) / det;
    let m0 = [c1 * a[0] + c2 * b[0], c1 * a[1] + c2 * b[1], c1 * a[2] + c2 * b[2]];
    let mut m1 = [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]];
    let n1 = dot(&m1, &m1).sqrt();
    m1.iter_mut().for_each(|v| *v /= n1);

    let (p0, q0, r0) = (m0[0], m0[1], m0[2]);
    let (p1, q1, r1) = (m1[0], m1[1], m1[2]);
    let a2 = p1 * r1 - q1 * q1;
    let a1 = p0 * r1 + p1 * r0 - 2.0 * q0 * q1;
    let a0 = p0 * r0 - q0 * q0 - 1.0;
    let roots: Vec<f64> = if a2.abs() < 1e-14 * (a1.abs() + a0.abs()) {
        if a1 == 0.0 {
            vec![]
        } else {
            vec![-a0 / a1]
        }
    } else {
        let disc = a1 * a1 - 4.0 * a2 * a0;
        if disc < 0.0 {
            vec![]
        } else {
            let q = -0.5 * (a1 + disc.sqrt().copysign(a1));
            if q == 0.0 {
                vec![0.0]
            } else {
                vec![q / a2, a0 / q]
            }
        }
    };
    roots
        .into_iter()
        .map(|t| [p0 + t * p1, q0 + t * q1, r0 + t * r1])
        .filter(|m| m[0] > 0.0 && m[2] > 0.0 && m.iter().all(|v| v.is_finite()))
        .min_by(|x, y| (x[0] + x[2]).total_cmp(&(y[0] + y[2])))
}

/// All field quantities at one abscissa.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct FieldPoint {
    pub x: f64,
    pub rho: f64,
    pub drho: f64,
    pub theta: f64,
    pub xp: f64,
    pub xpp: f64,
    pub xppp: f64,
    pub p_c: f64,
    pub f: f64,
    /// magnitude of the two terms that make up F, for rounding estimates
    pub f_scale: f64,
}

impl FieldPoint {
    fn new(model: &PotentialModel, energy: f64, x: f64, rho: f64, drho: f64, theta: f64) -> Self {
        let hbar = model.hbar;
        let k2 = model.k_squared(energy, x);
        let ddrho = 1.0 / (rho * rho * rho) - k2 * rho;
        let xp = hbar / (rho * rho);
        let xpp = -2.0 * hbar * drho / rho.powi(3);
        let xppp = hbar * (6.0 * drho * drho / rho.powi(4) - 2.0 * ddrho / rho.powi(3));
        let t1 = -3.0 * hbar * hbar * xpp * xpp / (4.0 * xp.powi(4));
        let t2 = hbar * hbar * xppp / (2.0 * xp.powi(3));
        let f = t1 + t2;
        Self {
            x,
            rho,
            drho,
            theta,
            xp,
            xpp,
            xppp,
            p_c: model.momentum_clamped(energy, x),
            f,
            f_scale: t1.abs() + t2.abs(),
        }
    }

    /// G = √(1+F) − 1 where 1 + F ≥ 0. Values below zero within the rounding
    /// of F's two terms (at a turning point) count as zero.
    pub fn g(&self) -> Option<f64> {
        let s = 1.0 + self.f;
        if s >= 0.0 {
            Some(s.sqrt() - 1.0)
        } else if s > -1e-10 * (1.0 + self.f_scale) {
            Some(-1.0)
        } else {
            None
        }
    }

    /// X'² − 3ħ²X''²/(4X'²) + ħ²X'''/(2X'), which should equal p_c².
    pub fn qhj_lhs(&self, hbar: f64) -> f64 {
        self.xp * self.xp - 3.0 * hbar * hbar * self.xpp * self.xpp / (4.0 * self.xp * self.xp)
            + hbar * hbar * self.xppp / (2.0 * self.xp)
    }
}

/// Quadrature nodes on the field interval: one or two segments, each
/// uniform in its own parameter, with Simpson weights that include the
/// Jacobian.
#[derive(Clone, Debug, Serialize)]
pub struct FieldGrid {
    pub x: Vec<f64>,
    pub weights: Vec<f64>,
    segments: Vec<Segment>,
}

#[derive(Clone, Debug, Serialize)]
struct Segment {
    start: usize,
    h: f64,
    /// dx/dt at the segment's own nodes
    jac: Vec<f64>,
}

impl FieldGrid {
    /// sin² clustering at both ends; for s-wave Coulomb an additional
    /// logarithmic segment resolves the region next to the origin.
    pub fn new(interval: &TurningPair, left_log_segment: bool, panels: usize) -> Result<Self> {
        if panels < 8 {
            return Err(Error::InvalidParameter(format!("need at least 8 panels, got {panels}")));
        }
        let panels = panels + panels % 2;
        let mut x: Vec<f64> = Vec::new();
        let mut segments = Vec::new();
        let mut x_start = interval.x1;
        if left_log_segment {
            let x_b = 1e-2 * interval.x2;
            let h = (x_b / interval.x1).ln() / panels as f64;
            let nodes: Vec<f64> =
                (0..=panels).map(|j| if j == panels { x_b } else { interval.x1 * (j as f64 * h).exp() }).collect();
            segments.push(Segment { start: 0, h, jac: nodes.clone() });
            x.extend(nodes);
            x_start = x_b;
        }
        let w = interval.x2 - x_start;
        let h = 0.5 * PI / panels as f64;
        let start = x.len().saturating_sub(1);
        let mut jac = Vec::with_capacity(panels + 1);
        for j in 0..=panels {
            let t = j as f64 * h;
            let s = t.sin();
            jac.push(w * (2.0 * t).sin());
            if j == 0 && !x.is_empty() {
                continue;
            }
            x.push(if j == panels { interval.x2 } else { x_start + w * s * s });
        }
        segments.push(Segment { start, h, jac });

        let mut weights = vec![0.0; x.len()];
        for seg in &segments {
            let sw = simpson_weights(seg.jac.len(), seg.h);
            for (j, (w, d)) in sw.iter().zip(&seg.jac).enumerate() {
                weights[seg.start + j] += w * d;
            }
        }
        Ok(Self { x, weights, segments })
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    pub fn integrate(&self, f: &[f64]) -> f64 {
        f.iter().zip(&self.weights).map(|(a, w)| a * w).sum()
    }

    /// Running integral from the left end.
    pub fn cumulative(&self, f: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.x.len()];
        let mut offset = 0.0;
        for seg in &self.segments {
            let local: Vec<f64> = seg.jac.iter().enumerate().map(|(j, d)| f[seg.start + j] * d).collect();
            for (j, v) in cumulative_simpson(&local, seg.h).iter().enumerate() {
                out[seg.start + j] = offset + v;
            }
            offset = out[seg.start + seg.jac.len() - 1];
        }
        out
    }
}

/// X, X', Y, F, G and companions on the field interval at one energy.
#[derive(Clone, Debug, Serialize)]
pub struct QhjFields {
    pub model: PotentialModel,
    pub energy: f64,
    pub frame: MilneFrame,
    pub grid: FieldGrid,
    pub rho: Vec<f64>,
    pub drho: Vec<f64>,
    /// real part of the quantum action, X(x1) = 0
    pub x_action: Vec<f64>,
    pub xp: Vec<f64>,
    pub xpp: Vec<f64>,
    pub xppp: Vec<f64>,
    /// imaginary part, ħ ln √X'
    pub y: Vec<f64>,
    pub f: Vec<f64>,
    pub g: Vec<Option<f64>>,
    pub p_c: Vec<f64>,
    /// ∫ p_c dx from the left end of the domain
    pub w_classical: Vec<f64>,
}

/// Amplitude ρ on the nodes of `grid`.
pub fn milne_amplitude(model: &PotentialModel, energy: f64, grid: &FieldGrid) -> Result<Vec<f64>> {
    let frame = MilneFrame::solve(model, energy)?;
    Ok(frame.states_at(&grid.x)?.iter().map(|s| s[0]).collect())
}

pub fn qhj_fields(model: &PotentialModel, energy: f64) -> Result<QhjFields> {
    qhj_fields_with(model, energy, DEFAULT_PANELS)
}

pub fn qhj_fields_with(model: &PotentialModel, energy: f64, panels: usize) -> Result<QhjFields> {
    let frame = MilneFrame::solve(model, energy)?;
    let left_log = model.turning_points(energy)?.left_is_boundary;
    let grid = FieldGrid::new(&frame.interval, left_log, panels)?;
    let states = frame.states_at(&grid.x)?;
    let points: Vec<FieldPoint> =
        grid.x.iter().zip(&states).map(|(x, s)| FieldPoint::new(model, energy, *x, s[0], s[1], s[2])).collect();
    let hbar = model.hbar;
    let theta0 = points[0].theta;
    let xp: Vec<f64> = points.iter().map(|p| p.xp).collect();
    let p_c: Vec<f64> = points.iter().map(|p| p.p_c).collect();
    let w_classical = grid.cumulative(&p_c).into_iter().map(|v| v + frame.origin_action).collect();
    Ok(QhjFields {
        model: *model,
        energy,
        frame,
        rho: points.iter().map(|p| p.rho).collect(),
        drho: points.iter().map(|p| p.drho).collect(),
        x_action: points.iter().map(|p| hbar * (p.theta - theta0)).collect(),
        y: xp.iter().map(|v| hbar * v.sqrt().ln()).collect(),
        xpp: points.iter().map(|p| p.xpp).collect(),
        xppp: points.iter().map(|p| p.xppp).collect(),
        f: points.iter().map(|p| p.f).collect(),
        g: points.iter().map(|p| p.g()).collect(),
        xp,
        p_c,
        w_classical,
        grid,
    })
}

impl QhjFields {
    pub fn x1(&self) -> f64 {
        self.frame.interval.x1
    }

    pub fn x2(&self) -> f64 {
        self.frame.interval.x2
    }

    /// X(x2) − X(x1) = ∫X' dx, taken from the integrated phase.
    pub fn quantum_action_integral(&self) -> f64 {
        *self.x_action.last().expect("non-empty field grid")
    }

    /// ∫X' dx by Simpson quadrature on the field grid, a cross-check of the phase.
    pub fn quantum_action_quadrature(&self) -> f64 {
        self.grid.integrate(&self.xp)
    }

    /// R = ∫X'G dx.
    pub fn residual_route_a(&self) -> Result<f64> {
        let mut integrand = Vec::with_capacity(self.xp.len());
        for (i, g) in self.g.iter().enumerate() {
            match g {
                Some(g) => integrand.push(self.xp[i] * g),
                None => return Err(Error::GUndefined { x: self.grid.x[i], one_plus_f: 1.0 + self.f[i] }),
            }
        }
        Ok(self.frame.origin_action + self.grid.integrate(&integrand))
    }

    /// ∫(p_c − X') dx, equal to route A by X'(1 + G) = p_c.
    pub fn residual_momentum_form(&self) -> f64 {
        let d: Vec<f64> = self.p_c.iter().zip(&self.xp).map(|(p, x)| p - x).collect();
        self.frame.origin_action + self.grid.integrate(&d)
    }

    /// Abscissas where F changes sign, refined to machine precision.
    pub fn f_zeros(&self) -> Result<Vec<FieldPoint>> {
        let mut out = Vec::new();
        for i in 0..self.f.len() - 1 {
            let (a, b) = (self.f[i], self.f[i + 1]);
            if a == 0.0 {
                out.push(self.frame.point(self.grid.x[i])?);
            } else if a * b < 0.0 {
                let (xa, xb) = (self.grid.x[i], self.grid.x[i + 1]);
                let x0 = brent(|x| Ok(self.frame.point(x)?.f), xa, xb, 1e-14 * (xb - xa).abs().max(xa.abs()), 200)?;
                out.push(self.frame.point(x0)?);
            }
        }
        Ok(out)
    }

    /// Largest |lhs − p_c²| / p_c² of the third-order real-part equation on
    /// the inner fraction `keep` of the interval, with X''' from a five-point
    /// difference of X'' rather than from the amplitude equation.
    pub fn qhj_residual(&self, keep: f64, samples: usize) -> Result<f64> {
        let (x1, x2) = (self.x1(), self.x2());
        let w = x2 - x1;
        let lo = x1 + 0.5 * (1.0 - keep) * w;
        let hi = x2 - 0.5 * (1.0 - keep) * w;
        let hbar = self.model.hbar;
        let h = 1e-4 * w;
        let mut worst: f64 = 0.0;
        for j in 0..samples {
            let x = lo + (hi - lo) * (j as f64 + 0.5) / samples as f64;
            let xs = [x - 2.0 * h, x - h, x, x + h, x + 2.0 * h];
            let pts: Vec<FieldPoint> = self
                .frame
                .states_at(&xs)?
                .iter()
                .zip(xs)
                .map(|(s, xx)| FieldPoint::new(&self.model, self.energy, xx, s[0], s[1], s[2]))
                .collect();
            let xppp_fd = (pts[0].xpp - 8.0 * pts[1].xpp + 8.0 * pts[3].xpp - pts[4].xpp) / (12.0 * h);
            let p = FieldPoint { xppp: xppp_fd, ..pts[2] };
            let lhs = p.qhj_lhs(hbar);
            let pc2 = p.p_c * p.p_c;
            worst = worst.max((lhs - pc2).abs() / pc2);
        }
        Ok(worst)
    }

    /// ψ = A/√X'·sin(X/ħ + π/4) with A = 1.
    pub fn reconstruct_unscaled(&self) -> Vec<f64> {
        let hbar = self.model.hbar;
        self.xp.iter().zip(&self.x_action).map(|(xp, x)| (x / hbar + 0.25 * PI).sin() / xp.sqrt()).collect()
    }
}

/// Reconstructed wave function scaled onto a reference state.
#[derive(Clone, Debug, Serialize)]
pub struct Reconstruction {
    pub amplitude: f64,
    pub psi: Vec<f64>,
    /// reference values on the field grid
    pub reference: Vec<f64>,
    /// max |ψ_rec − ψ_ref| over the inner 90% of the interval
    pub max_abs_deviation: f64,
}

/// Fits A by least squares against `reference` on the inner 90% of [x1, x2].
pub fn reconstruct_wavefunction(fields: &QhjFields, reference: &EigenState) -> Reconstruction {
    let raw = fields.reconstruct_unscaled();
    let refs: Vec<f64> = fields.grid.x.iter().map(|x| reference.value_at(*x)).collect();
    let (x1, x2) = (fields.x1(), fields.x2());
    let margin = 0.05 * (x2 - x1);
    let inner = |x: f64| x >= x1 + margin && x <= x2 - margin;
    let (mut num, mut den) = (0.0, 0.0);
    for ((x, r), p) in fields.grid.x.iter().zip(&raw).zip(&refs) {
        if inner(*x) {
            num += r * p;
            den += r * r;
        }
    }
    let amplitude = if den > 0.0 { num / den } else { 0.0 };
    let psi: Vec<f64> = raw.iter().map(|v| amplitude * v).collect();
    let max_abs_deviation = fields
        .grid
        .x
        .iter()
        .zip(psi.iter().zip(&refs))
        .filter(|(x, _)| inner(**x))
        .map(|(_, (a, b))| (a - b).abs())
        .fold(0.0, f64::max);
    Reconstruction { amplitude, psi, reference: refs, max_abs_deviation }
}

/// Energy at which ∫X' dx = (n + 1/2)πħ.
///
/// Not available for the s-wave Coulomb problem: with the pseudo turning
/// point next to the origin, frames meeting both end conditions exist only
/// in a sliver of energy around each level, too narrow to bracket.
pub fn quantize_via_qhj(model: &PotentialModel, n: u32) -> Result<f64> {
    if let Family::CoulombCentrifugal { l: 0, .. } = model.family {
        return Err(Error::Unsupported("phase-amplitude quantization of the s-wave Coulomb problem".into()));
    }
    let e_wkb = wkb_energy_closed(model, n)?;
    let spacing = match wkb_energy_closed(model, n + 1) {
        Ok(e) => e - e_wkb,
        Err(_) if n > 0 => e_wkb - wkb_energy_closed(model, n - 1)?,
        Err(_) => (model.bound_energy_range().1 - e_wkb).abs(),
    };
    let target = (n as f64 + 0.5) * PI;
    let h = |e: f64| MilneFrame::solve(model, e).and_then(|f| f.phase_span()).map(|t| t - target);
    let (range_lo, range_hi) = model.bound_energy_range();
    let lo = (e_wkb - 0.5 * spacing).max(range_lo + 1e-9 * spacing.abs());
    let hi = (e_wkb + spacing).min(range_hi - 1e-9 * spacing.abs());
    let steps = 96;
    let samples: Vec<(f64, Option<f64>)> = (0..=steps)
        .map(|j| {
            let e = lo + (hi - lo) * j as f64 / steps as f64;
            (e, h(e).ok())
        })
        .collect();
    let mut best: Option<(f64, f64, f64)> = None;
    for pair in samples.windows(2) {
        if let ((ea, Some(ha)), (eb, Some(hb))) = (pair[0], pair[1]) {
            if ha * hb <= 0.0 && ha.abs() < 1.0 && hb.abs() < 1.0 {
                let score = ha.abs() + hb.abs();
                if best.is_none_or(|(_, _, s)| score < s) {
                    best = Some((ea, eb, score));
                }
            }
        }
    }
    let (a, b, _) = best
        .ok_or_else(|| Error::ScanExhausted(format!("no sign change of the phase condition for n = {n} of {model}")))?;
    brent(h, a, b, 1e-12 * e_wkb.abs().max(spacing.abs()), 200)
}

/// Convenience: classical action at the fields' energy minus ∫X' dx.
pub fn action_difference(fields: &QhjFields) -> Result<f64> {
    Ok(classical_action(&fields.model, fields.energy)? - fields.quantum_action_integral())
}
