use std::f64::consts::PI;

use qhj_core::eigensolver::{count_nodes, eigenstate, eigenvalue};
use qhj_core::qhje::{
    action_difference, milne_amplitude, qhj_fields, quantize_via_qhj, reconstruct_wavefunction, FieldGrid, MilneFrame,
};
use qhj_core::{classical_action, Error, PotentialModel};

fn fields_at_level(model: &PotentialModel, n: u32) -> qhj_core::qhje::QhjFields {
    let e = eigenvalue(model, n).unwrap();
    qhj_fields(model, e).unwrap()
}

#[test]
fn ground_state_amplitude_integrates_to_half_pi() {
    let model = PotentialModel::harmonic(1.0).unwrap();
    let interval = model.turning_points(0.5).unwrap();
    let grid = FieldGrid::new(&interval, false, 2000).unwrap();
    let rho = milne_amplitude(&model, 0.5, &grid).unwrap();
    let xp: Vec<f64> = rho.iter().map(|r| 1.0 / (r * r)).collect();
    assert!((grid.integrate(&xp) - 0.5 * PI).abs() < 1e-3);
}

#[test]
fn quantum_momentum_peaks_sit_on_nodes_and_grow() {
    let model = PotentialModel::quartic(1.0).unwrap();
    let state = eigenstate(&model, 4).unwrap();
    assert!((state.energy - 10.244308).abs() < 5e-6);
    let f = qhj_fields(&model, state.energy).unwrap();
    let x = &f.grid.x;
    let peaks: Vec<usize> = (1..x.len() - 1).filter(|&i| f.xp[i] > f.xp[i - 1] && f.xp[i] >= f.xp[i + 1]).collect();
    assert_eq!(peaks.len(), 4, "one X' peak per node");
    let psi: Vec<f64> = x.iter().map(|&xi| state.value_at(xi)).collect();
    let nodes: Vec<f64> = (1..x.len()).filter(|&i| psi[i - 1] * psi[i] < 0.0).map(|i| x[i]).collect();
    assert_eq!(nodes.len(), 4);
    let spacing = x[1] - x[0];
    for (p, z) in peaks.iter().zip(&nodes) {
        assert!((x[*p] - z).abs() < 20.0 * spacing.max(1e-3), "peak at {} vs node at {z}", x[*p]);
    }
    let lower = fields_at_level(&model, 2);
    let top = |f: &qhj_core::qhje::QhjFields| f.xp.iter().cloned().fold(0.0, f64::max);
    assert!(top(&f) > top(&lower));
}

#[test]
fn action_runs_over_half_integer_multiples_of_pi() {
    let cases = [
        (PotentialModel::harmonic(1.0).unwrap(), 2, 2.5 * PI),
        (PotentialModel::quartic(1.0).unwrap(), 4, 4.5 * PI),
        (PotentialModel::hydrogen(1.0, 1).unwrap(), 2, 2.5 * PI),
    ];
    for (model, n, expected) in cases {
        let f = fields_at_level(&model, n);
        assert!((f.quantum_action_integral() - expected).abs() < 1e-3, "{model}");
        let last = *f.x_action.last().unwrap();
        assert!((last - f.x_action[0] - expected).abs() < 1e-3);
    }
}

#[test]
fn hydrogen_two_radial_nodes_phase_and_shift() {
    // principal n = 4, l = 1 has two radial nodes
    let model = PotentialModel::hydrogen(1.0, 1).unwrap();
    let f = qhj_fields(&model, -1.0 / 32.0).unwrap();
    assert!((f.quantum_action_integral() - 2.5 * PI).abs() < 1e-3);
    let shift = f.w_classical.last().unwrap() - f.x_action.last().unwrap();
    assert!((shift - 0.269506).abs() < 2e-3);
}

#[test]
fn imaginary_part_is_log_of_root_momentum() {
    let model = PotentialModel::harmonic(1.0).unwrap();
    let f = fields_at_level(&model, 2);
    for (y, xp) in f.y.iter().zip(&f.xp) {
        assert!((y - xp.sqrt().ln()).abs() < 1e-14);
    }
}

#[test]
fn route_a_examples() {
    let h = PotentialModel::harmonic(1.0).unwrap();
    for n in [0, 3, 6] {
        assert!(fields_at_level(&h, n).residual_route_a().unwrap().abs() < 2e-3);
    }
    let m = PotentialModel::morse(32.0, 1.0).unwrap();
    assert!(fields_at_level(&m, 2).residual_route_a().unwrap().abs() < 2e-3);
    let c = PotentialModel::cot_squared(1.0, PI).unwrap();
    let f = qhj_fields(&c, 7.0).unwrap();
    assert!((f.residual_route_a().unwrap() - 0.269506).abs() < 2e-3);
}

#[test]
fn identity_chain_and_action_variation() {
    for model in [PotentialModel::harmonic(1.0).unwrap(), PotentialModel::morse(32.0, 1.0).unwrap()] {
        for n in 0..4 {
            let f = fields_at_level(&model, n);
            let ra = f.residual_route_a().unwrap();
            let chain = classical_action(&model, f.energy).unwrap() - f.quantum_action_integral();
            assert!((ra - chain).abs() < 1e-6);
            // R = 0 families: X and the classical action end in the same place
            assert!(action_difference(&f).unwrap().abs() < 2e-3);
        }
    }
}

#[test]
fn field_interval_pins_f_zeros_to_classical_momentum() {
    for (model, n) in [
        (PotentialModel::harmonic(1.0).unwrap(), 3),
        (PotentialModel::quartic(1.0).unwrap(), 1),
        (PotentialModel::cot_squared(1.0, PI).unwrap(), 2),
        (PotentialModel::hydrogen(1.0, 2).unwrap(), 1),
    ] {
        let f = fields_at_level(&model, n);
        let zeros = f.f_zeros().unwrap();
        assert!(!zeros.is_empty(), "{model}");
        for z in zeros {
            assert!(z.x > f.x1() && z.x < f.x2());
            assert!(z.f.abs() < 1e-8);
            assert!((z.xp - z.p_c).abs() < 1e-6 * z.p_c.max(1.0));
        }
    }
}

/// G − F'(x0)(x − x0)/2 vanishes quadratically at a zero of F.
#[test]
fn g_is_half_f_to_first_order() {
    let model = PotentialModel::quartic(1.0).unwrap();
    let f = fields_at_level(&model, 3);
    let frame = &f.frame;
    let width = f.x2() - f.x1();
    for z in f.f_zeros().unwrap() {
        let d = 1e-4 * width;
        let slope = (frame.point(z.x + d).unwrap().f - frame.point(z.x - d).unwrap().f) / (2.0 * d);
        let err = |h: f64| {
            let p = frame.point(z.x + h).unwrap();
            (p.g().unwrap() - 0.5 * slope * h).abs()
        };
        // least-squares slope of log err against log h
        let pts: Vec<(f64, f64)> = [4e-3, 2e-3, 1e-3, 5e-4]
            .iter()
            .map(|r| (r * width, err(r * width)))
            .map(|(h, e)| (h.ln(), e.ln()))
            .collect();
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / pts.len() as f64;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / pts.len() as f64;
        let order = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>()
            / pts.iter().map(|p| (p.0 - mx).powi(2)).sum::<f64>();
        assert!(order >= 1.9, "order {order} at x0 = {}", z.x);
    }
}

/// Averaged over the gap between neighbouring nodes, X' follows p_c.
#[test]
fn averaged_quantum_momentum_tracks_classical() {
    for (model, n) in [
        (PotentialModel::harmonic(1.0).unwrap(), 6),
        (PotentialModel::quartic(1.0).unwrap(), 4),
        (PotentialModel::morse(32.0, 1.0).unwrap(), 4),
    ] {
        let f = fields_at_level(&model, n);
        let x = &f.grid.x;
        let psi = f.reconstruct_unscaled();
        let nodes: Vec<usize> = (1..x.len()).filter(|&i| psi[i - 1] * psi[i] < 0.0).collect();
        assert_eq!(nodes.len() as u32, n, "{model}");
        let xa = &f.x_action;
        let wc = &f.w_classical;
        for w in nodes.windows(2) {
            let (a, b) = (w[0], w[1]);
            let quantum = xa[b] - xa[a];
            let classical = wc[b] - wc[a];
            assert!((quantum - classical).abs() < 0.05 * classical, "{model}: {quantum} vs {classical}");
        }
    }
}

#[test]
fn quantum_hamilton_jacobi_residual_is_small() {
    for (model, n) in [
        (PotentialModel::harmonic(1.0).unwrap(), 5),
        (PotentialModel::morse(32.0, 1.0).unwrap(), 3),
        (PotentialModel::cot_squared(1.0, PI).unwrap(), 4),
    ] {
        assert!(fields_at_level(&model, n).qhj_residual(0.96, 400).unwrap() < 1e-6);
    }
}

#[test]
fn reconstruction_matches_numerov() {
    let model = PotentialModel::harmonic(1.0).unwrap();
    let s0 = eigenstate(&model, 0).unwrap();
    let f0 = qhj_fields(&model, s0.energy).unwrap();
    let r0 = reconstruct_wavefunction(&f0, &s0);
    assert!(r0.max_abs_deviation < 1e-3);
    // boundary value of the phase form at X = 0
    let expected = r0.amplitude * (0.25 * PI).sin() / f0.xp[0].sqrt();
    assert!((r0.psi[0] - expected).abs() < 1e-12);

    let s2 = eigenstate(&model, 2).unwrap();
    let f2 = qhj_fields(&model, s2.energy).unwrap();
    let r2 = reconstruct_wavefunction(&f2, &s2);
    assert_eq!(count_nodes(&r2.psi), 2);
    let x = &f2.grid.x;
    let zero_at = |v: &[f64]| -> Vec<f64> { (1..v.len()).filter(|&i| v[i - 1] * v[i] < 0.0).map(|i| x[i]).collect() };
    let spacing = (x[x.len() / 2 + 1] - x[x.len() / 2]).abs();
    for (a, b) in zero_at(&r2.psi).iter().zip(zero_at(&r2.reference)) {
        assert!((a - b).abs() <= 2.0 * spacing);
    }
}

#[test]
fn phase_quantization_examples() {
    let h = PotentialModel::harmonic(1.0).unwrap();
    assert!((quantize_via_qhj(&h, 3).unwrap() - 3.5).abs() < 1e-4);
    let q = PotentialModel::quartic(1.0).unwrap();
    assert!((quantize_via_qhj(&q, 1).unwrap() - 2.393644).abs() < 1e-3);
    let m = PotentialModel::morse(32.0, 1.0).unwrap();
    assert!((quantize_via_qhj(&m, 0).unwrap() + 28.125).abs() < 1e-3);
    let c = PotentialModel::cot_squared(1.0, PI).unwrap();
    assert!((quantize_via_qhj(&c, 2).unwrap() - 7.0).abs() < 1e-4);
    let hy = PotentialModel::hydrogen(1.0, 1).unwrap();
    assert!((quantize_via_qhj(&hy, 1).unwrap() + 1.0 / 18.0).abs() < 1e-4);
}

#[test]
fn s_wave_phase_quantization_is_refused() {
    let model = PotentialModel::hydrogen(1.0, 0).unwrap();
    assert!(matches!(quantize_via_qhj(&model, 0), Err(Error::Unsupported(_))));
}

#[test]
fn frame_needs_turning_points() {
    let model = PotentialModel::morse(32.0, 1.0).unwrap();
    assert!(MilneFrame::solve(&model, 1.0).is_err());
    assert!(qhj_fields(&PotentialModel::harmonic(1.0).unwrap(), -1.0).is_err());
}
