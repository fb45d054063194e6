//! Numerov shooting for bound states.
//!
//! Levels are bracketed by a Sturm node count of a full left-to-right sweep
//! and refined with Brent's method on the discrete Wronskian of the left and
//! right sweeps at a matching point next to the outer turning point.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::formulas::{coulomb_well_bottom, level_count, wkb_energy_closed};
use crate::numerics::{bisect_predicate, brent, lagrange4};
use crate::potentials::{Family, PotentialModel, WallBehavior};

pub const DEFAULT_POINTS: usize = 20_001;
pub const MIN_POINTS: usize = 2_001;

/// Decay length, in units of ∫κ dx, kept beyond each turning point.
const MARGIN_ACTION: f64 = 36.0;
const RESCALE: f64 = 1e150;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GridKind {
    /// equally spaced in x
    Uniform,
    /// equally spaced in s = ln r
    Logarithmic,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Grid {
    pub x_min: f64,
    pub x_max: f64,
    pub n_points: usize,
    pub kind: GridKind,
}

impl Grid {
    pub fn uniform(x_min: f64, x_max: f64, n_points: usize) -> Result<Self> {
        Self::checked(x_min, x_max, n_points, GridKind::Uniform)
    }

    pub fn logarithmic(r_min: f64, r_max: f64, n_points: usize) -> Result<Self> {
        if r_min.is_nan() || r_min <= 0.0 {
            return Err(Error::InvalidParameter(format!("logarithmic grid needs r_min > 0, got {r_min}")));
        }
        Self::checked(r_min, r_max, n_points, GridKind::Logarithmic)
    }

    fn checked(x_min: f64, x_max: f64, n_points: usize, kind: GridKind) -> Result<Self> {
        if n_points < 5 || !x_min.is_finite() || !x_max.is_finite() || x_max <= x_min {
            return Err(Error::InvalidParameter(format!("bad grid [{x_min}, {x_max}] with {n_points} points")));
        }
        Ok(Self { x_min, x_max, n_points, kind })
    }

    fn t_range(&self) -> (f64, f64) {
        match self.kind {
            GridKind::Uniform => (self.x_min, self.x_max),
            GridKind::Logarithmic => (self.x_min.ln(), self.x_max.ln()),
        }
    }

    /// Spacing in the grid's own coordinate.
    pub fn spacing(&self) -> f64 {
        let (a, b) = self.t_range();
        (b - a) / (self.n_points - 1) as f64
    }

    /// Physical abscissa of node `i`.
    pub fn coord(&self, i: usize) -> f64 {
        let (a, _) = self.t_range();
        let t = a + i as f64 * self.spacing();
        match self.kind {
            GridKind::Uniform => {
                if i == self.n_points - 1 {
                    self.x_max
                } else {
                    t
                }
            }
            GridKind::Logarithmic => t.exp(),
        }
    }

    pub fn coords(&self) -> Vec<f64> {
        (0..self.n_points).map(|i| self.coord(i)).collect()
    }

    /// Fractional node index of the physical abscissa `x`.
    pub fn fractional_index(&self, x: f64) -> f64 {
        let (a, _) = self.t_range();
        let t = match self.kind {
            GridKind::Uniform => x,
            GridKind::Logarithmic => x.ln(),
        };
        (t - a) / self.spacing()
    }

    /// dx/dt at node `i` (1 for a uniform grid, r for a logarithmic one).
    pub fn jacobian(&self, i: usize) -> f64 {
        match self.kind {
            GridKind::Uniform => 1.0,
            GridKind::Logarithmic => self.coord(i),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    LeftToRight,
    RightToLeft,
}

/// A normalized bound state on its Numerov grid.
#[derive(Clone, Debug, Serialize)]
pub struct EigenState {
    pub n: u32,
    pub energy: f64,
    pub grid: Grid,
    pub x: Vec<f64>,
    pub psi: Vec<f64>,
}

impl EigenState {
    /// ψ at an arbitrary abscissa inside the grid (four-point Lagrange in the
    /// grid coordinate; the logarithmic grid interpolates u/√r).
    pub fn value_at(&self, x: f64) -> f64 {
        let t = self.grid.fractional_index(x).clamp(0.0, (self.grid.n_points - 1) as f64);
        match self.grid.kind {
            GridKind::Uniform => lagrange4(&self.psi, t),
            GridKind::Logarithmic => {
                let i = (t.floor() as usize).saturating_sub(1).min(self.x.len() - 4);
                let local: Vec<f64> = (i..i + 4).map(|j| self.psi[j] / self.x[j].sqrt()).collect();
                lagrange4(&local, t - i as f64) * x.sqrt()
            }
        }
    }

    /// ∫ψ² dx as a plain Riemann sum on the grid.
    pub fn norm(&self) -> f64 {
        let h = self.grid.spacing();
        (0..self.psi.len()).map(|i| self.psi[i] * self.psi[i] * self.grid.jacobian(i) * h).sum()
    }
}

/// Tunables of the shooting solver.
#[derive(Clone, Copy, Debug)]
pub struct EigenConfig {
    pub n_points: usize,
    /// absolute energy tolerance, relative to max(|E|, level spacing)
    pub energy_rtol: f64,
}

impl Default for EigenConfig {
    fn default() -> Self {
        Self { n_points: DEFAULT_POINTS, energy_rtol: 1e-13 }
    }
}

/// Discretized radial or linear Schrödinger problem w'' = Q(E) w on one grid,
/// with Q_i(E) = base_i − E·slope_i.
struct Problem<'a> {
    model: &'a PotentialModel,
    grid: Grid,
    base: Vec<f64>,
    slope: Vec<f64>,
    left_wall: bool,
    right_wall: bool,
}

impl<'a> Problem<'a> {
    fn new(model: &'a PotentialModel, grid: Grid) -> Self {
        let n = grid.n_points;
        let b = 2.0 * model.mass / (model.hbar * model.hbar);
        let (left_wall, right_wall) = match model.family {
            Family::CotSquared { .. } => (true, true),
            Family::CoulombCentrifugal { .. } => (true, false),
            _ => (false, false),
        };
        let mut base = vec![0.0; n];
        let mut slope = vec![0.0; n];
        for i in 0..n {
            let x = grid.coord(i);
            if !model.in_domain(x) {
                // hard wall node, never used by the recursion
                continue;
            }
            let v = model.value(x);
            match grid.kind {
                GridKind::Uniform => {
                    base[i] = b * v;
                    slope[i] = b;
                }
                GridKind::Logarithmic => {
                    base[i] = x * x * b * v + 0.25;
                    slope[i] = x * x * b;
                }
            }
        }
        Self { model, grid, base, slope, left_wall, right_wall }
    }

    fn q(&self, i: usize, energy: f64) -> f64 {
        self.base[i] - energy * self.slope[i]
    }

    /// Starting samples for the sweep from one end: (index, value) pairs.
    fn start(&self, energy: f64, dir: Direction) -> [(usize, f64); 2] {
        let n = self.grid.n_points;
        let h = self.grid.spacing();
        let idx = |k: usize| match dir {
            Direction::LeftToRight => k,
            Direction::RightToLeft => n - 1 - k,
        };
        let wall = match dir {
            Direction::LeftToRight if self.left_wall => self.model.left_wall(energy),
            Direction::RightToLeft if self.right_wall => self.model.right_wall(energy),
            _ => None,
        };
        match (wall, self.grid.kind) {
            (Some(w), GridKind::Uniform) => [(idx(1), w.value(h)), (idx(2), w.value(2.0 * h))],
            (Some(w), GridKind::Logarithmic) => {
                let (r0, r1) = (self.grid.coord(0), self.grid.coord(1));
                [(0, log_start_ratio(&w, r0, r1)), (1, 1.0)]
            }
            (None, _) => [(idx(0), 0.0), (idx(1), 1e-30)],
        }
    }

    fn sweep(&self, energy: f64, dir: Direction) -> Vec<f64> {
        let n = self.grid.n_points;
        let h2 = self.grid.spacing().powi(2) / 12.0;
        let mut w = vec![0.0; n];
        let [(i0, w0), (i1, w1)] = self.start(energy, dir);
        w[i0] = w0;
        w[i1] = w1;
        let c = |i: usize| 1.0 - h2 * self.q(i, energy);
        match dir {
            Direction::LeftToRight => {
                let stop = if self.right_wall { n - 1 } else { n };
                for i in i1..stop - 1 {
                    let next = (2.0 * (1.0 + 5.0 * h2 * self.q(i, energy)) * w[i] - c(i - 1) * w[i - 1]) / c(i + 1);
                    w[i + 1] = next;
                    if next.abs() > RESCALE {
                        w[..=i + 1].iter_mut().for_each(|v| *v /= RESCALE);
                    }
                }
            }
            Direction::RightToLeft => {
                let stop = if self.left_wall && self.grid.kind == GridKind::Uniform { 1 } else { 0 };
                for i in (stop + 1..=i1).rev() {
                    let next = (2.0 * (1.0 + 5.0 * h2 * self.q(i, energy)) * w[i] - c(i + 1) * w[i + 1]) / c(i - 1);
                    w[i - 1] = next;
                    if next.abs() > RESCALE {
                        w[i - 1..].iter_mut().for_each(|v| *v /= RESCALE);
                    }
                }
            }
        }
        w
    }

    /// Number of eigenvalues of the truncated problem below `energy`.
    fn sturm_count(&self, energy: f64) -> usize {
        strict_sign_changes(&self.sweep(energy, Direction::LeftToRight))
    }

    fn wronskian(&self, energy: f64, m: usize) -> f64 {
        let l = self.sweep(energy, Direction::LeftToRight);
        let r = self.sweep(energy, Direction::RightToLeft);
        let lmax = l[..=m + 1].iter().fold(0.0f64, |a, v| a.max(v.abs()));
        let rmax = r[m..].iter().fold(0.0f64, |a, v| a.max(v.abs()));
        (l[m] * r[m + 1] - l[m + 1] * r[m]) / (lmax * rmax)
    }
}

fn log_start_ratio(w: &WallBehavior, r0: f64, r1: f64) -> f64 {
    // w = u/√r, scaled so that the second sample is one
    (w.value(r0) / r0.sqrt()) / (w.value(r1) / r1.sqrt())
}

fn strict_sign_changes(samples: &[f64]) -> usize {
    let mut count = 0;
    let mut last = 0.0f64;
    for &v in samples {
        if v != 0.0 && v.is_finite() {
            if last != 0.0 && v.signum() != last.signum() {
                count += 1;
            }
            last = v;
        }
    }
    count
}

/// Interior sign changes, ignoring the two endpoints and samples below
/// 1e-12 of the peak magnitude.
pub fn count_nodes(samples: &[f64]) -> u32 {
    if samples.len() < 3 {
        return 0;
    }
    let peak = samples.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let floor = 1e-12 * peak;
    let interior = &samples[1..samples.len() - 1];
    let mut count = 0;
    let mut last = 0.0f64;
    for &v in interior {
        if v.abs() > floor {
            if last != 0.0 && v.signum() != last.signum() {
                count += 1;
            }
            last = v;
        }
    }
    count
}

/// Integrates the Numerov recursion across `grid` at fixed `energy`, starting
/// from the decaying (or regular) solution at the chosen end.
pub fn numerov_sweep(model: &PotentialModel, energy: f64, grid: &Grid, direction: Direction) -> Vec<f64> {
    let problem = Problem::new(model, *grid);
    let w = problem.sweep(energy, direction);
    match grid.kind {
        GridKind::Uniform => w,
        GridKind::Logarithmic => w.iter().enumerate().map(|(i, v)| v * grid.coord(i).sqrt()).collect(),
    }
}

/// Accumulates ∫κ dx outward from `start` until it reaches `target`.
fn decay_margin(model: &PotentialModel, energy: f64, start: f64, dir: f64, step: f64, floor: f64) -> f64 {
    let mut x = start;
    let mut acc = 0.0;
    let mut travelled = 0.0;
    let mut dx = step;
    while acc < MARGIN_ACTION || travelled < floor {
        let mid = x + dir * 0.5 * dx;
        if !model.in_domain(mid) {
            break;
        }
        acc += (-model.k_squared(energy, mid)).max(0.0).sqrt() * dx;
        x += dir * dx;
        travelled += dx;
        if travelled > 1e4 * step {
            dx *= 2.0;
        }
        if travelled > 1e12 {
            break;
        }
    }
    travelled
}

/// Reference energy used to size the grid for level `n`: the WKB estimate of
/// the next level, or the midpoint to the threshold when there is none.
fn reference_energy(model: &PotentialModel, n: u32) -> Result<(f64, f64)> {
    let e_n = wkb_energy_closed(model, n)?;
    match wkb_energy_closed(model, n + 1) {
        Ok(e_next) => Ok((e_next, e_next - e_n)),
        Err(_) => {
            let (_, hi) = model.bound_energy_range();
            let spacing = if n > 0 { e_n - wkb_energy_closed(model, n - 1)? } else { hi - e_n };
            Ok((0.5 * (e_n + hi), spacing))
        }
    }
}

/// Grid covering the classically allowed region at `e_ref` plus decay margins.
pub fn grid_for_energy(model: &PotentialModel, e_ref: f64, n_points: usize) -> Result<Grid> {
    if n_points < MIN_POINTS {
        return Err(Error::InvalidParameter(format!("at least {MIN_POINTS} grid points required, got {n_points}")));
    }
    let n_points = n_points | 1;
    let tp = model.turning_points(e_ref)?;
    let w = tp.width();
    match model.family {
        Family::CotSquared { width, .. } => Grid::uniform(0.0, width, n_points),
        Family::CoulombCentrifugal { .. } => {
            let r2 = tp.x2;
            let right = decay_margin(model, e_ref, r2, 1.0, 1e-3 * w, 0.0);
            let mut r_min = 1e-6 * r2;
            if let Some((r_bottom, _)) = coulomb_well_bottom(model) {
                r_min = r_min.min(1e-3 * r_bottom);
            }
            Grid::logarithmic(r_min, (r2 + right).max(3.0 * r2), n_points)
        }
        Family::Harmonic { .. } | Family::Quartic { .. } => {
            let left = decay_margin(model, e_ref, tp.x1, -1.0, 1e-3 * w, 0.4 * w);
            let right = decay_margin(model, e_ref, tp.x2, 1.0, 1e-3 * w, 0.4 * w);
            Grid::uniform(tp.x1 - left, tp.x2 + right, n_points)
        }
        Family::Morse { .. } => {
            let left = decay_margin(model, e_ref, tp.x1, -1.0, 1e-3 * w, 0.0);
            let right = decay_margin(model, e_ref, tp.x2, 1.0, 1e-3 * w, 0.0);
            Grid::uniform(tp.x1 - left, tp.x2 + right, n_points)
        }
    }
}

fn check_level_exists(model: &PotentialModel, n: u32) -> Result<()> {
    if let Some(count) = level_count(model) {
        if n >= count {
            return Err(Error::NoSuchLevel { family: model.name(), n });
        }
    }
    Ok(())
}

/// The energy of the bound state with `n` nodes.
pub fn eigenvalue(model: &PotentialModel, n: u32) -> Result<f64> {
    solve(model, n, &EigenConfig::default()).map(|(e, _)| e)
}

pub fn eigenstate(model: &PotentialModel, n: u32) -> Result<EigenState> {
    eigenstate_with(model, n, &EigenConfig::default())
}

pub fn eigenstate_with(model: &PotentialModel, n: u32, config: &EigenConfig) -> Result<EigenState> {
    let (energy, grid) = solve(model, n, config)?;
    let problem = Problem::new(model, grid);
    let m = matching_index(model, &grid, energy);
    let l = problem.sweep(energy, Direction::LeftToRight);
    let r = problem.sweep(energy, Direction::RightToLeft);
    let scale = if r[m] != 0.0 { l[m] / r[m] } else { l[m + 1] / r[m + 1] };
    let mut psi: Vec<f64> = (0..grid.n_points).map(|i| if i <= m { l[i] } else { r[i] * scale }).collect();
    if grid.kind == GridKind::Logarithmic {
        for (i, v) in psi.iter_mut().enumerate() {
            *v *= grid.coord(i).sqrt();
        }
    }
    let h = grid.spacing();
    let norm: f64 = psi.iter().enumerate().map(|(i, v)| v * v * grid.jacobian(i) * h).sum();
    let first = psi.iter().copied().find(|v| v.abs() > 1e-6 * norm.sqrt()).unwrap_or(1.0);
    let s = first.signum() / norm.sqrt();
    psi.iter_mut().for_each(|v| *v *= s);
    Ok(EigenState { n, energy, grid, x: grid.coords(), psi })
}

fn matching_index(model: &PotentialModel, grid: &Grid, energy: f64) -> usize {
    let n = grid.n_points;
    let x2 = model.turning_points(energy).map(|tp| tp.x2).unwrap_or(0.5 * (grid.x_min + grid.x_max));
    (grid.fractional_index(x2).round() as isize).clamp(3, n as isize - 5) as usize
}

fn solve(model: &PotentialModel, n: u32, config: &EigenConfig) -> Result<(f64, Grid)> {
    check_level_exists(model, n)?;
    let e_guess = wkb_energy_closed(model, n)?;
    let (e_ref, spacing) = reference_energy(model, n)?;
    let grid = grid_for_energy(model, e_ref, config.n_points)?;
    let problem = Problem::new(model, grid);
    let target = n as usize;
    let (range_lo, range_hi) = model.bound_energy_range();
    let step = 0.25 * spacing;

    let mut lo = e_guess;
    let mut guard = 0;
    while problem.sturm_count(lo) > target {
        lo -= step;
        if lo <= range_lo {
            lo = range_lo;
            break;
        }
        guard += 1;
        if guard > 4000 {
            return Err(Error::ScanExhausted(format!("no lower bracket for n = {n} of {model}")));
        }
    }
    let mut hi = e_guess;
    guard = 0;
    while problem.sturm_count(hi) <= target {
        hi += step;
        if hi >= range_hi {
            hi = range_hi - 1e-12 * spacing;
            if problem.sturm_count(hi) <= target {
                return Err(Error::NoSuchLevel { family: model.name(), n });
            }
            break;
        }
        guard += 1;
        if guard > 4000 {
            return Err(Error::ScanExhausted(format!("no upper bracket for n = {n} of {model}")));
        }
    }
    // narrow to the single jump of the node count
    let (lo, hi) = bisect_predicate(|e| Ok(problem.sturm_count(e) > target), lo, hi, 1e-6 * spacing)?;

    let m = matching_index(model, &grid, 0.5 * (lo + hi));
    let xtol = config.energy_rtol * e_guess.abs().max(spacing);
    let energy = match brent(|e| Ok(problem.wronskian(e, m)), lo, hi, xtol, 200) {
        Ok(e) => e,
        // the Wronskian can vanish at a bracket end only when the bracket is already tight
        Err(_) => bisect_predicate(|e| Ok(problem.sturm_count(e) > target), lo, hi, xtol)?.1,
    };
    Ok((energy, grid))
}
