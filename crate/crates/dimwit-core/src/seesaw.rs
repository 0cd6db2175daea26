//! Heuristic quantum bounds Q_d by see-saw alternation.
//!
//! With measurements fixed, the best preparation for x is the projector onto
//! a top eigenvector of A_x = sum_y c_xy M_y; with preparations fixed, the
//! best observable for y is the eigenvalue-sign function of
//! B_y = sum_x c_xy rho_x. Each half-step is an eigenproblem and never
//! decreases the witness, so every restart converges to a local maximum and
//! the best over random restarts is a certified lower bound on Q_d.

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde_json::{json, Value};

use crate::bounds::{cmatrix_to_json, BoundResult, Model, Realization};
use crate::error::Error;
use crate::linalg::CMatrix;
use crate::witness::{eval_witness, probs_from_quantum, DensityMatrix, Observable, WitnessSpec};

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Debug, Clone, Copy)]
pub struct SeesawConfig {
    pub restarts: usize,
    pub max_iters: usize,
    /// Relative improvement below which a restart is declared converged.
    pub tol: f64,
    pub seed: u64,
}

impl Default for SeesawConfig {
    fn default() -> Self {
        SeesawConfig {
            restarts: 50,
            max_iters: 500,
            tol: 1e-10,
            seed: 0,
        }
    }
}

impl SeesawConfig {
    fn validate(&self) -> Result<(), Error> {
        if self.restarts == 0 {
            return Err(Error::InvalidParameter("restarts must be >= 1".into()));
        }
        if !self.tol.is_finite() || self.tol <= 0.0 {
            return Err(Error::InvalidParameter("tol must be positive".into()));
        }
        Ok(())
    }
}

/// The (rank-1 ensemble, observables) pair attaining a see-saw value.
#[derive(Debug, Clone)]
pub struct QuantumRealization {
    pub dimension: usize,
    pub ensemble: Vec<DensityMatrix>,
    pub observables: Vec<Observable>,
}

impl QuantumRealization {
    /// Independent re-evaluation through the Born-rule pipeline.
    pub fn witness_value(&self, spec: &WitnessSpec) -> Result<f64, Error> {
        eval_witness(
            spec,
            &probs_from_quantum(&self.ensemble, &self.observables)?,
        )
    }

    pub fn to_json(&self) -> Value {
        json!({
            "dimension": self.dimension,
            "ensemble": self
                .ensemble
                .iter()
                .map(|r| cmatrix_to_json(r.matrix()))
                .collect::<Vec<_>>(),
            "observables": self
                .observables
                .iter()
                .map(|o| cmatrix_to_json(o.matrix()))
                .collect::<Vec<_>>(),
        })
    }
}

/// Full trajectory of one restart; `values` holds the witness value after
/// every half-step, which tests use to assert monotone ascent.
#[derive(Debug, Clone)]
pub struct RestartTrace {
    pub values: Vec<f64>,
    pub converged: bool,
    pub realization: QuantumRealization,
}

/// State half-step: projectors onto top eigenvectors of A_x = sum_y c_xy M_y.
/// A vanishing A_x leaves the objective indifferent; the first basis
/// projector is returned for determinism.
pub fn optimal_states_for_observables(
    spec: &WitnessSpec,
    observables: &[Observable],
) -> Result<Vec<DensityMatrix>, Error> {
    require_correlator_form(spec)?;
    if observables.len() != spec.m() {
        return Err(Error::ShapeMismatch(format!(
            "{} observables for {} measurements",
            observables.len(),
            spec.m()
        )));
    }
    let d = observables[0].dim();
    let mut states = Vec::with_capacity(spec.n());
    for x in 0..spec.n() {
        let mut a = CMatrix::zeros(d);
        for (y, obs) in observables.iter().enumerate() {
            a.add_scaled(spec.corr_coeff(x, y).unwrap(), obs.matrix());
        }
        if a.frobenius_norm() < 1e-14 {
            states.push(DensityMatrix::basis_state(d, 0));
            continue;
        }
        let eig = a.eigh()?;
        states.push(DensityMatrix::pure(&eig.eigenvectors[0])?);
    }
    Ok(states)
}

/// Measurement half-step: M_y flips to the eigenvalue-sign function of
/// B_y = sum_x c_xy rho_x, making y's contribution sum_i |lambda_i|.
/// Zero eigenvalues are assigned +1.
pub fn optimal_observables_for_states(
    spec: &WitnessSpec,
    ensemble: &[DensityMatrix],
) -> Result<Vec<Observable>, Error> {
    require_correlator_form(spec)?;
    if ensemble.len() != spec.n() {
        return Err(Error::ShapeMismatch(format!(
            "{} states for {} preparations",
            ensemble.len(),
            spec.n()
        )));
    }
    let d = ensemble[0].dim();
    let mut observables = Vec::with_capacity(spec.m());
    for y in 0..spec.m() {
        let mut b = CMatrix::zeros(d);
        for (x, rho) in ensemble.iter().enumerate() {
            b.add_scaled(spec.corr_coeff(x, y).unwrap(), rho.matrix());
        }
        let eig = b.eigh()?;
        let mut m = CMatrix::zeros(d);
        for (lambda, v) in eig.eigenvalues.iter().zip(eig.eigenvectors.iter()) {
            let sign = if *lambda >= 0.0 { 1.0 } else { -1.0 };
            m.add_scaled(sign, &CMatrix::projector(v));
        }
        observables.push(Observable::new(m)?);
    }
    Ok(observables)
}

fn require_correlator_form(spec: &WitnessSpec) -> Result<(), Error> {
    if !spec.has_correlator_form() {
        return Err(Error::NotDichotomic(format!(
            "see-saw requires a correlator-form witness, \"{}\" has none",
            spec.name()
        )));
    }
    Ok(())
}

/// Direct correlator value sum_xy c_xy tr(rho_x M_y) of a candidate pair.
fn correlator_value(
    spec: &WitnessSpec,
    ensemble: &[DensityMatrix],
    observables: &[Observable],
) -> f64 {
    let mut acc = 0.0;
    for (x, rho) in ensemble.iter().enumerate() {
        for (y, obs) in observables.iter().enumerate() {
            acc += spec.corr_coeff(x, y).unwrap() * obs.expectation(rho);
        }
    }
    acc
}

/// Random dichotomic observable: M = V diag(s) V* with V the Gram-Schmidt
/// orthonormalization of a complex Gaussian matrix and s a random +/-1
/// pattern, excluding the all-equal patterns (for d >= 2) so every rank
/// split is reachable.
fn random_observable(d: usize, rng: &mut ChaCha8Rng) -> Result<Observable, Error> {
    let mut cols: Vec<Vec<Complex64>> = (0..d)
        .map(|_| {
            (0..d)
                .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
                .collect()
        })
        .collect();
    // modified Gram-Schmidt
    for j in 0..d {
        for i in 0..j {
            let proj: Complex64 = cols[i]
                .iter()
                .zip(cols[j].iter())
                .map(|(a, b)| a.conj() * b)
                .sum();
            let (head, tail) = cols.split_at_mut(j);
            for (v, a) in tail[0].iter_mut().zip(head[i].iter()) {
                *v -= proj * a;
            }
        }
        let norm: f64 = cols[j].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for v in cols[j].iter_mut() {
            *v /= norm;
        }
    }
    let signs: Vec<f64> = loop {
        let s: Vec<f64> = (0..d)
            .map(|_| if rng.gen::<bool>() { 1.0 } else { -1.0 })
            .collect();
        if d == 1 || s.iter().any(|&v| v != s[0]) {
            break s;
        }
    };
    let mut m = CMatrix::zeros(d);
    for (col, sign) in cols.iter().zip(signs.iter()) {
        m.add_scaled(*sign, &CMatrix::projector(col));
    }
    Observable::new(m)
}

/// One see-saw restart from a fresh random initialization.
pub fn run_restart(
    spec: &WitnessSpec,
    d: usize,
    rng: &mut ChaCha8Rng,
    max_iters: usize,
    tol: f64,
) -> Result<RestartTrace, Error> {
    let mut observables: Vec<Observable> = (0..spec.m())
        .map(|_| random_observable(d, rng))
        .collect::<Result<_, _>>()?;
    let mut ensemble = optimal_states_for_observables(spec, &observables)?;
    let mut values = vec![correlator_value(spec, &ensemble, &observables)];
    let mut converged = false;
    for _ in 0..max_iters {
        observables = optimal_observables_for_states(spec, &ensemble)?;
        values.push(correlator_value(spec, &ensemble, &observables));
        ensemble = optimal_states_for_observables(spec, &observables)?;
        let v = correlator_value(spec, &ensemble, &observables);
        values.push(v);
        let before_iteration = values[values.len() - 3];
        if (v - before_iteration).abs() / v.abs().max(1.0) < tol {
            converged = true;
            break;
        }
    }
    Ok(RestartTrace {
        values,
        converged,
        realization: QuantumRealization {
            dimension: d,
            ensemble,
            observables,
        },
    })
}

/// Best see-saw value over `config.restarts` independent restarts: a lower
/// bound on Q_d. Restart r uses the derived seed `config.seed + r`, so the
/// result is reproducible and independent of scheduling.
pub fn seesaw_bound(
    spec: &WitnessSpec,
    d: usize,
    config: &SeesawConfig,
) -> Result<BoundResult, Error> {
    config.validate()?;
    #[cfg(feature = "parallel")]
    let traces: Vec<(usize, RestartTrace)> = (0..config.restarts)
        .into_par_iter()
        .map(|r| run_seeded_restart(spec, d, config, r).map(|t| (r, t)))
        .collect::<Result<_, _>>()?;
    #[cfg(not(feature = "parallel"))]
    let traces: Vec<(usize, RestartTrace)> = (0..config.restarts)
        .map(|r| run_seeded_restart(spec, d, config, r).map(|t| (r, t)))
        .collect::<Result<_, _>>()?;
    combine_restarts(spec, d, traces)
}

/// Sequential variant for benches and determinism cross-checks.
pub fn seesaw_bound_seq(
    spec: &WitnessSpec,
    d: usize,
    config: &SeesawConfig,
) -> Result<BoundResult, Error> {
    config.validate()?;
    let traces: Vec<(usize, RestartTrace)> = (0..config.restarts)
        .map(|r| run_seeded_restart(spec, d, config, r).map(|t| (r, t)))
        .collect::<Result<_, _>>()?;
    combine_restarts(spec, d, traces)
}

fn run_seeded_restart(
    spec: &WitnessSpec,
    d: usize,
    config: &SeesawConfig,
    restart: usize,
) -> Result<RestartTrace, Error> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed.wrapping_add(restart as u64));
    run_restart(spec, d, &mut rng, config.max_iters, config.tol)
}

fn combine_restarts(
    spec: &WitnessSpec,
    d: usize,
    traces: Vec<(usize, RestartTrace)>,
) -> Result<BoundResult, Error> {
    let (_, best) = traces
        .into_iter()
        .fold(None::<(usize, RestartTrace)>, |acc, (r, t)| match acc {
            None => Some((r, t)),
            Some((br, bt)) => {
                let (bv, v) = (*bt.values.last().unwrap(), *t.values.last().unwrap());
                // ties keep the lower restart index: deterministic under any
                // execution order
                if v > bv || (v == bv && r < br) {
                    Some((r, t))
                } else {
                    Some((br, bt))
                }
            }
        })
        .expect("restarts >= 1");
    let value = *best.values.last().unwrap();
    Ok(BoundResult {
        witness_name: spec.name().to_string(),
        model: Model::Quantum,
        d,
        value,
        converged: Some(best.converged),
        argmax: Realization::Quantum(best.realization),
    })
}
