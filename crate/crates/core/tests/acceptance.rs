//! Acceptance suite. One PASS/FAIL line per criterion; exits nonzero if any fail.

use std::f64::consts::PI;
use std::process::ExitCode;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qhj_core::eigensolver::{eigenstate, eigenvalue};
use qhj_core::formulas::{
    classical_action_closed, corrected_energy_closed, cot_squared_lambda, energy_for_action, exact_energy,
    hydrogen_r_closed, max_action, residual_closed,
};
use qhj_core::qhje::{qhj_fields, quantize_via_qhj, reconstruct_wavefunction};
use qhj_core::tables::{hydrogen_table, quartic_table};
use qhj_core::{classical_action, residual_route_b, PotentialModel, Result};

type Check = fn() -> Result<Outcome>;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Result<Outcome> {
    Ok(Outcome { pass, detail })
}

fn max_abs(it: impl IntoIterator<Item = f64>) -> f64 {
    it.into_iter().map(f64::abs).fold(0.0, f64::max)
}

fn harmonic() -> Result<Outcome> {
    let model = PotentialModel::harmonic(1.0)?;
    let mut e_err: f64 = 0.0;
    let mut r_err: f64 = 0.0;
    for n in 0..=10 {
        let e = eigenvalue(&model, n)?;
        e_err = e_err.max((e - (n as f64 + 0.5)).abs());
        r_err = r_err.max(residual_route_b(&model, n, e)?.abs());
    }
    outcome(e_err < 1e-8 && r_err < 1e-8, format!("max |E - (n+1/2)| = {e_err:.2e}, max |R| = {r_err:.2e}"))
}

fn morse() -> Result<Outcome> {
    let model = PotentialModel::morse(32.0, 1.0)?;
    let mut e_err: f64 = 0.0;
    let mut r_err: f64 = 0.0;
    for n in 0..=5 {
        let exact = exact_energy(&model, n).expect("Morse levels are closed form");
        e_err = e_err.max((eigenvalue(&model, n)? - exact).abs());
        r_err = r_err.max(residual_route_b(&model, n, exact)?.abs());
    }
    outcome(e_err < 1e-6 && r_err < 1e-5, format!("max |E - exact| = {e_err:.2e}, max |R| = {r_err:.2e}"))
}

/// Half a unit in the last printed decimal of `v`.
fn printed_half_ulp(v: f64) -> f64 {
    let s = format!("{v}");
    let decimals = s.split_once('.').map_or(0, |(_, d)| d.len());
    0.5 * 10f64.powi(-(decimals as i32))
}

fn hydrogen() -> Result<Outcome> {
    let rows = hydrogen_table()?;
    let mut ok = rows.len() == 16;
    let (mut row_err, mut closed_err, mut energy_err): (f64, f64, f64) = (0.0, 0.0, 0.0);
    for r in &rows {
        let tol = if r.l == 0 { 1e-6 } else { 1e-5 };
        ok &= r.diff.abs() < tol;
        row_err = row_err.max(r.diff.abs());
        let closed = hydrogen_r_closed(r.l);
        let printed_tol = if r.l == 0 { 1e-12 } else { printed_half_ulp(r.r_published) };
        ok &= (closed - r.r_published).abs() <= printed_tol;
        closed_err = closed_err.max((closed - r.r_published).abs());
        let model = PotentialModel::hydrogen(1.0, r.l)?;
        let e = corrected_energy_closed(&model, r.n - r.l - 1, r.r_computed)?;
        let exact = -0.5 / (r.n * r.n) as f64;
        ok &= (e - exact).abs() < 1e-6;
        energy_err = energy_err.max((e - exact).abs());
    }
    outcome(
        ok,
        format!(
            "{} rows, max |R - table| = {row_err:.2e}, max |R_closed - table| = {closed_err:.2e}, max |E_corrected - exact| = {energy_err:.2e}",
            rows.len()
        ),
    )
}

fn cot_squared() -> Result<Outcome> {
    let model = PotentialModel::cot_squared(1.0, PI)?;
    let mut rs = Vec::new();
    let mut formula_err: f64 = 0.0;
    for n in 0..=5 {
        let exact = exact_energy(&model, n).expect("closed form");
        rs.push(residual_route_b(&model, n, exact)?);
        let closed_r = residual_closed(&model).expect("closed form");
        formula_err = formula_err.max((corrected_energy_closed(&model, n, closed_r)? - exact).abs());
    }
    let r_err = max_abs(rs.iter().map(|r| r - 0.269506));
    let spread = rs.iter().cloned().fold(f64::MIN, f64::max) - rs.iter().cloned().fold(f64::MAX, f64::min);
    let lambda = cot_squared_lambda(&model).unwrap_or(f64::NAN);
    let e7 = exact_energy(&model, 2).unwrap_or(f64::NAN);
    let e7_numerov = eigenvalue(&model, 2)?;
    let ok = r_err < 1e-5
        && spread < 1e-4
        && formula_err < 1e-9
        && (lambda - 0.5).abs() < 1e-12
        && (e7 - 7.0).abs() < 1e-7
        && (e7_numerov - 7.0).abs() < 1e-7;
    outcome(
        ok,
        format!(
            "max |R - 0.269506| = {r_err:.2e}, spread = {spread:.2e}, corrected vs exact = {formula_err:.2e}, lambda = {lambda}, E(3) = {e7_numerov:.9}"
        ),
    )
}

fn quartic() -> Result<Outcome> {
    let model = PotentialModel::quartic(1.0)?;
    let rows = quartic_table()?;
    let e_err = max_abs(rows.iter().map(|r| r.e_diff));
    let r_err = max_abs(rows.iter().map(|r| r.r_diff));
    let mut trip: f64 = 0.0;
    for r in &rows {
        trip = trip.max((corrected_energy_closed(&model, r.n, r.r_computed)? - r.e_computed).abs());
    }
    outcome(
        rows.len() == 5 && e_err < 5e-6 && r_err < 1e-4 && trip < 1e-6,
        format!("max |E - table| = {e_err:.2e}, max |R - table| = {r_err:.2e}, round trip = {trip:.2e}"),
    )
}

fn benchmark_states() -> Result<Vec<(PotentialModel, u32)>> {
    let mut states = Vec::new();
    let h = PotentialModel::harmonic(1.0)?;
    states.extend((0..=10).map(|n| (h, n)));
    let m = PotentialModel::morse(32.0, 1.0)?;
    states.extend((0..=5).map(|n| (m, n)));
    for &(n, l, _) in qhj_core::tables::HYDROGEN_ROWS.iter() {
        states.push((PotentialModel::hydrogen(1.0, l)?, n - l - 1));
    }
    let c = PotentialModel::cot_squared(1.0, PI)?;
    states.extend((0..=5).map(|n| (c, n)));
    let q = PotentialModel::quartic(1.0)?;
    states.extend((0..=4).map(|n| (q, n)));
    Ok(states)
}

fn qhje_consistency() -> Result<Outcome> {
    let states = benchmark_states()?;
    let (mut phase, mut routes, mut eq15, mut recon, mut zero_dev): (f64, f64, f64, f64, f64) =
        (0.0, 0.0, 0.0, 0.0, 0.0);
    let mut min_zeros = usize::MAX;
    for (model, n) in &states {
        let state = eigenstate(model, *n)?;
        let fields = qhj_fields(model, state.energy)?;
        phase = phase.max((fields.quantum_action_integral() - (*n as f64 + 0.5) * PI).abs());
        let r_b = residual_route_b(model, *n, state.energy)?;
        routes = routes.max((fields.residual_route_a()? - r_b).abs());
        eq15 = eq15.max(fields.qhj_residual(0.96, 400)?);
        recon = recon.max(reconstruct_wavefunction(&fields, &state).max_abs_deviation);
        let zeros = fields.f_zeros()?;
        min_zeros = min_zeros.min(zeros.len());
        zero_dev = zero_dev.max(max_abs(zeros.iter().map(|z| z.xp - z.p_c)));
    }
    outcome(
        phase < 1e-3 && routes < 2e-3 && eq15 < 1e-6 && recon < 1e-3 && min_zeros >= 1 && zero_dev < 1e-6,
        format!(
            "{} states: |int X' - (n+1/2)pi| <= {phase:.1e}, |R_A - R_B| <= {routes:.1e}, QHJ residual <= {eq15:.1e}, psi deviation <= {recon:.1e}, F zeros >= {min_zeros}, |X' - p_c| at zeros <= {zero_dev:.1e}",
            states.len()
        ),
    )
}

fn phase_quantization() -> Result<Outcome> {
    let mut err: f64 = 0.0;
    let h = PotentialModel::harmonic(1.0)?;
    let q = PotentialModel::quartic(1.0)?;
    for (model, top) in [(h, 5), (q, 3)] {
        for n in 0..=top {
            err = err.max((quantize_via_qhj(&model, n)? - eigenvalue(&model, n)?).abs());
        }
    }
    outcome(err < 1e-4, format!("max |E_qhj - E_numerov| = {err:.2e} over 10 levels"))
}

fn oracle_agreement() -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let models = [
        PotentialModel::harmonic(1.0)?,
        PotentialModel::morse(32.0, 1.0)?,
        PotentialModel::hydrogen(1.0, 0)?,
        PotentialModel::hydrogen(1.0, 2)?,
        PotentialModel::cot_squared(1.0, PI)?,
        PotentialModel::quartic(1.0)?,
    ];
    let mut worst: f64 = 0.0;
    for model in &models {
        let top = max_action(model).map_or(30.0 * PI, |m| (0.99 * m).min(30.0 * PI));
        let lo = energy_for_action(model, 0.01)?;
        let hi = energy_for_action(model, top)?;
        for _ in 0..20 {
            let e = rng.gen_range(lo..hi);
            let closed = classical_action_closed(model, e)?;
            let quad = classical_action(model, e)?;
            worst = worst.max(((quad - closed) / closed).abs());
        }
    }
    outcome(worst < 1e-8, format!("max relative |I_quad - I_closed| = {worst:.2e} over {} energies", 20 * models.len()))
}

fn main() -> ExitCode {
    let criteria: [(&str, Check); 8] = [
        ("harmonic spectrum and zero residual", harmonic),
        ("Morse spectrum and zero residual", morse),
        ("hydrogen residual table", hydrogen),
        ("cotangent-squared residual and spectrum", cot_squared),
        ("quartic energies and residuals", quartic),
        ("phase-amplitude field consistency", qhje_consistency),
        ("phase-integral quantization", phase_quantization),
        ("action quadrature vs closed form", oracle_agreement),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = std::time::Instant::now();
        let (pass, detail) = match check() {
            Ok(o) => (o.pass, o.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        if !pass {
            failed += 1;
        }
        println!(
            "criterion {}: {} [{name}] {detail} ({:.2?})",
            i + 1,
            if pass { "PASS" } else { "FAIL" },
            start.elapsed()
        );
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
