//! Acceptance suite: one test per release criterion, each printing a
//! PASS/FAIL line. Run with `cargo test --test acceptance -- --nocapture`.

use std::time::Instant;

use dimwit_core::classical::classical_bound;
use dimwit_core::photonic::{
    analytic_i4, ensemble_preset, gamma_of_delay, gamma_quadrature_oracle, measurement_preset,
    prepare_signal_state, purity_formula, purity_of, simulate_counts, GammaMode, GridSpec,
    PhysicalParams, PreparationSetting, Scenario, ScenarioKind, DEFAULT_DL_FS, QUART_I4,
};
use dimwit_core::seesaw::{seesaw_bound, SeesawConfig};
use dimwit_core::stats::{certify, witness_with_error, BoundsTable};
use dimwit_core::witness::{eval_witness, i4_spec, probs_from_quantum};
use dimwit_core::Realization;

fn report(number: usize, name: &str, pass: bool) {
    println!(
        "ACCEPTANCE {number} {name}: {}",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass, "acceptance criterion {number} ({name}) failed");
}

/// Independent oracle for C_1: with a single dit, every measurement answers
/// with a constant sign, so the maximum is over the 2^m constant-response
/// strategies.
fn c1_brute_force(c: &[[f64; 3]; 4]) -> f64 {
    let mut best = f64::NEG_INFINITY;
    for mask in 0..1u32 << 3 {
        let mut v = 0.0;
        for y in 0..3 {
            let sign = if mask >> y & 1 == 0 { 1.0 } else { -1.0 };
            for row in c {
                v += sign * row[y];
            }
        }
        best = best.max(v);
    }
    best
}

#[test]
fn criterion_1_classical_bounds_exact() {
    let spec = i4_spec();
    let coeffs = [
        [1.0, 1.0, 1.0],
        [1.0, 1.0, -1.0],
        [1.0, -1.0, 0.0],
        [-1.0, 0.0, 0.0],
    ];
    let expected = [(1, c1_brute_force(&coeffs)), (2, 5.0), (3, 7.0), (4, 9.0)];
    let mut pass = c1_brute_force(&coeffs) == 3.0;
    for (d, want) in expected {
        let start = Instant::now();
        let got = classical_bound(&spec, d).unwrap().value;
        let elapsed = start.elapsed().as_secs_f64();
        pass &= got == want && elapsed < 5.0;
        if got != want {
            eprintln!("C_{d} = {got}, expected {want}");
        }
    }
    report(1, "classical bounds 3/5/7/9 exact, each < 5 s", pass);
}

#[test]
fn criterion_2_quantum_bounds_heuristic() {
    let spec = i4_spec();
    let start = Instant::now();
    let mut pass = true;
    for (d, check) in [
        (
            2usize,
            Box::new(|v: f64| v >= 6.0 - 1e-3) as Box<dyn Fn(f64) -> bool>,
        ),
        (3, Box::new(|v: f64| (v - 7.97).abs() <= 1e-2)),
        (4, Box::new(|v: f64| v >= 9.0 - 1e-6)),
    ] {
        let config = SeesawConfig {
            restarts: 100,
            seed: 7,
            ..Default::default()
        };
        let result = seesaw_bound(&spec, d, &config).unwrap();
        let ok = check(result.value);
        if !ok {
            eprintln!("Q_{d} estimate {} out of tolerance", result.value);
        }
        let Realization::Quantum(q) = &result.argmax else {
            panic!("quantum bound must return a realization");
        };
        let reeval = q.witness_value(&spec).unwrap();
        pass &= ok && (reeval - result.value).abs() <= 1e-9;
    }
    let elapsed = start.elapsed().as_secs_f64();
    pass &= elapsed < 60.0;
    report(2, "see-saw reaches 6 / 7.97 / 9 in < 60 s", pass);
}

#[test]
fn criterion_3_analytic_matrix_agreement() {
    let spec = i4_spec();
    let steps = 50usize;
    let phi_step_deg = 45.0 / (steps - 1) as f64;
    let mut pass = true;
    for (kind, base) in [(ScenarioKind::Qubit, 3.0), (ScenarioKind::Qutrit, 5.0)] {
        for gi in 0..steps {
            let gamma = gi as f64 / (steps - 1) as f64;
            let mut grid_max = f64::NEG_INFINITY;
            let mut grid_argmax_phi = 0.0;
            for pi in 0..steps {
                let phi = pi as f64 * phi_step_deg;
                let ensemble = ensemble_preset(kind, phi, gamma).unwrap();
                let probs = probs_from_quantum(&ensemble, &measurement_preset(kind)).unwrap();
                let pipeline = eval_witness(&spec, &probs).unwrap();
                let analytic = analytic_i4(kind, phi, gamma).unwrap();
                pass &= (pipeline - analytic).abs() <= 1e-9;
                if analytic > grid_max {
                    grid_max = analytic;
                    grid_argmax_phi = phi;
                }
            }
            // grid maximum vs closed form: second-order in the phi step
            let expect_max = base + 2.0 * (1.0 + gamma * gamma).sqrt();
            let half_step_rad = (phi_step_deg / 2.0).to_radians();
            let value_slack = 4.0 * (1.0 + gamma * gamma).sqrt() * half_step_rad * half_step_rad;
            pass &= (grid_max - expect_max).abs() <= value_slack;
            let tan2phi = (2.0 * grid_argmax_phi.to_radians()).tan();
            pass &= (tan2phi - gamma).abs() <= 4.0 * 2.0 * half_step_rad;
        }
    }
    // reported maxima at gamma = 1
    pass &= (analytic_i4(ScenarioKind::Qubit, 22.5, 1.0).unwrap() - 5.8284).abs() < 1e-3;
    pass &= (analytic_i4(ScenarioKind::Qutrit, 22.5, 1.0).unwrap() - 7.8284).abs() < 1e-3;
    report(3, "pipeline = analytic to 1e-9; maxima 5.8284/7.8284", pass);
}

#[test]
fn criterion_4_decoherence_kernel() {
    let dl = DEFAULT_DL_FS;
    let grid = GridSpec::default();
    let mut pass = true;
    for i in 0..=100 {
        let tau = 2.0 * dl * i as f64 / 100.0;
        let params = PhysicalParams::new(dl, tau).unwrap();
        let oracle = gamma_quadrature_oracle(&params, &grid).unwrap();
        pass &= (oracle - gamma_of_delay(&params)).abs() <= 1e-3;
    }
    pass &= gamma_of_delay(&PhysicalParams::new(dl, dl / 2.0).unwrap()) == 1.0;
    for tau in [-dl, -1.0, 0.0, dl, 1.5 * dl] {
        pass &= gamma_of_delay(&PhysicalParams::new(dl, tau).unwrap()) == 0.0;
    }
    report(4, "triangle kernel matches quadrature oracle to 1e-3", pass);
}

#[test]
fn criterion_5_purity() {
    let mut pass = true;
    for alpha in 0u8..=1 {
        for pi in 0..=72 {
            let phi_deg = pi as f64 * 5.0;
            for gi in 0..=20 {
                let gamma = gi as f64 / 20.0;
                let rho =
                    prepare_signal_state(&PreparationSetting { alpha, phi_deg }, gamma).unwrap();
                pass &= (purity_of(&rho) - purity_formula(phi_deg, gamma)).abs() <= 1e-12;
            }
        }
    }
    report(5, "purity formula vs tr(rho^2) within 1e-12", pass);
}

#[test]
fn criterion_6_delay_curve_shape() {
    let dl = DEFAULT_DL_FS;
    let grid: Vec<f64> = (0..=200).map(|i| 2.0 * dl * i as f64 / 200.0).collect();
    let mut pass = true;

    let qubit = Scenario::preset(ScenarioKind::Qubit);
    for pt in dimwit_core::photonic::scan_delay(&qubit, dl, &grid).unwrap() {
        pass &= pt.i4 <= 6.0 + 1e-9;
        if pt.delta_fs.abs() >= dl / 2.0 {
            pass &= pt.i4 < 5.0;
        }
    }

    let qutrit = Scenario::preset(ScenarioKind::Qutrit);
    let above_six = dimwit_core::photonic::scan_delay(&qutrit, dl, &grid)
        .unwrap()
        .iter()
        .filter(|pt| pt.i4 > 6.0)
        .count();
    pass &= above_six > 0;

    // classical trit limit with phi optimized reaches exactly 7 (at phi = 0)
    let mut trit_max = f64::NEG_INFINITY;
    for pi in 0..=900 {
        let phi = pi as f64 * 0.05;
        let scenario = Scenario {
            kind: ScenarioKind::Qutrit,
            gamma_mode: GammaMode::Forced(0.0),
            phi_deg: phi,
            visibility: 1.0,
        };
        let pt = dimwit_core::photonic::i4_at_delay(&scenario, dl, dl / 2.0).unwrap();
        trit_max = trit_max.max(pt.i4);
    }
    pass &= (trit_max - 7.0).abs() <= 1e-9;

    let quart = Scenario::preset(ScenarioKind::Quart);
    for pt in dimwit_core::photonic::scan_delay(&quart, dl, &grid).unwrap() {
        pass &= (pt.i4 - QUART_I4).abs() <= 1e-9;
    }
    report(
        6,
        "delay-curve shapes: qubit <= 6, qutrit > 6, quart = 9",
        pass,
    );
}

#[test]
fn criterion_7_certification_conclusions() {
    let bounds = BoundsTable::builtin_i4();
    let mut pass = true;

    let r = certify(5.66, 0.15, 0.0, &bounds).unwrap();
    pass &= r.min_quantum_dim == Some(2) && r.min_classical_dim == Some(3);

    let r = certify(7.57, 0.13, 0.0, &bounds).unwrap();
    pass &= r.min_quantum_dim == Some(3);

    let r = certify(8.57, 0.06, 0.0, &bounds).unwrap();
    pass &= r.min_quantum_dim == Some(4);
    pass &= r.sigmas_above("quantum", 3).unwrap() >= 10.0;

    report(7, "measured-value certification conclusions reproduced", pass);
}

#[test]
fn criterion_8_end_to_end_statistics() {
    let spec = i4_spec();
    let ensemble = ensemble_preset(ScenarioKind::Qutrit, 22.5, 1.0).unwrap();
    let probs = probs_from_quantum(&ensemble, &measurement_preset(ScenarioKind::Qutrit)).unwrap();
    let ideal = 5.0 + 2.0 * (2.0_f64).sqrt();
    let mut hits = 0;
    for seed in 0..100u64 {
        let counts = simulate_counts(&probs, 10_000, seed).unwrap();
        let (value, sigma) = witness_with_error(&spec, &counts).unwrap();
        if (value - ideal).abs() <= 4.0 * sigma {
            hits += 1;
        }
    }
    report(
        8,
        &format!("simulated qutrit within 4 sigma of 7.8284 in {hits}/100 seeds (need >= 95)"),
        hits >= 95,
    );
}
