//! Simulation of the photonic prepare-and-measure experiment: signal-photon
//! density matrices parameterized by idler polarizer angle, OAM projection
//! and a delay-dependent coherence factor, with ensemble and measurement
//! presets for the qubit, qutrit and quart scenarios and their classical
//! limits.
//!
//! The 4-dimensional signal space is ordered {|H,+1>, |H,-1>, |V,+1>,
//! |V,-1>} throughout.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};

use crate::error::Error;
use crate::linalg::CMatrix;
use crate::stats::CountsRecord;
use crate::witness::{
    eval_witness, i4_spec, probs_from_quantum, DensityMatrix, Observable, ProbabilityTable,
};

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Ideal witness value of the quart scenario; every correlator saturates, so
/// it is delay-independent.
pub const QUART_I4: f64 = 9.0;

/// Default D*L product in femtoseconds: group-velocity mismatch times
/// crystal length, chosen so decoherence completes 255 fs past the point of
/// maximal coherence.
pub const DEFAULT_DL_FS: f64 = 510.0;

/// Group-velocity-mismatch/delay parameters, both in femtoseconds.
#[derive(Debug, Clone, Copy)]
pub struct PhysicalParams {
    pub dl: f64,
    pub tau: f64,
}

impl PhysicalParams {
    pub fn new(dl: f64, tau: f64) -> Result<Self, Error> {
        if !dl.is_finite() || dl <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "DL must be positive, got {dl}"
            )));
        }
        Ok(PhysicalParams { dl, tau })
    }
}

/// One preparation: idler OAM projection selector and polarizer angle.
#[derive(Debug, Clone, Copy)]
pub struct PreparationSetting {
    /// 1 if the idler is projected onto m = -1 (signal keeps m = +1),
    /// 0 for the opposite projection.
    pub alpha: u8,
    pub phi_deg: f64,
}

impl PreparationSetting {
    pub fn new(alpha: u8, phi_deg: f64) -> Result<Self, Error> {
        if alpha > 1 {
            return Err(Error::InvalidParameter(format!(
                "alpha must be 0 or 1, got {alpha}"
            )));
        }
        Ok(PreparationSetting { alpha, phi_deg })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScenarioKind {
    Qubit,
    Qutrit,
    Quart,
}

impl ScenarioKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ScenarioKind::Qubit => "qubit",
            ScenarioKind::Qutrit => "qutrit",
            ScenarioKind::Quart => "quart",
        }
    }
}

/// How the coherence factor is obtained during a scan.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GammaMode {
    /// Triangle function of the temporal delay.
    FromDelay,
    /// Fixed value; 0 gives the classical bit/trit limits.
    Forced(f64),
}

#[derive(Debug, Clone, Copy)]
pub struct Scenario {
    pub kind: ScenarioKind,
    pub gamma_mode: GammaMode,
    /// Polarizer half-angle of the first two preparations, degrees.
    pub phi_deg: f64,
    /// Global multiplier on off-diagonal coherences, modeling imperfect
    /// interference visibility.
    pub visibility: f64,
}

impl Scenario {
    pub fn preset(kind: ScenarioKind) -> Self {
        Scenario {
            kind,
            gamma_mode: GammaMode::FromDelay,
            phi_deg: 22.5,
            visibility: 1.0,
        }
    }
}

/// Coherence factor gamma(tau) = tri((tau - DL/2) / (DL/2)) with
/// tri(t) = max(1 - |t|, 0).
pub fn gamma_of_delay(params: &PhysicalParams) -> f64 {
    let half = params.dl / 2.0;
    (1.0 - ((params.tau - half) / half).abs()).max(0.0)
}

/// Integration grid for the quadrature oracle, in units of the sinc
/// argument DL*Omega/2.
#[derive(Debug, Clone, Copy)]
pub struct GridSpec {
    pub half_width: f64,
    pub points: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            half_width: 4000.0,
            points: 400_001,
        }
    }
}

/// Frequency-domain oracle for the coherence factor: composite-Simpson
/// evaluation of (DL/2pi) * integral of sinc^2(DL*Omega/2) exp(i Omega
/// (2tau - DL)). Independent of the closed triangle form and used to
/// cross-check it. Errors out when the grid's estimated error exceeds 1e-3.
pub fn gamma_quadrature_oracle(params: &PhysicalParams, grid: &GridSpec) -> Result<f64, Error> {
    const TOLERANCE: f64 = 1e-3;
    if grid.points < 5 || grid.half_width <= 0.0 {
        return Err(Error::InvalidParameter(
            "degenerate integration grid".into(),
        ));
    }
    // substitute t = DL*Omega/2: gamma = (1/pi) int sinc^2(t) e^{i t u} dt
    // with u = 4 tau / DL - 2
    let u = 4.0 * params.tau / params.dl - 2.0;
    let coarse = simpson_gamma(u, grid.half_width, ((grid.points - 1) / 2) | 1);
    let fine = simpson_gamma(u, grid.half_width, grid.points);
    // truncation tail is bounded by 2/(pi T); add the Richardson-style
    // refinement difference as the discretization estimate
    let estimate = 2.0 / (std::f64::consts::PI * grid.half_width) + (fine - coarse).norm();
    if estimate > TOLERANCE {
        return Err(Error::QuadratureTooCoarse {
            estimate,
            tolerance: TOLERANCE,
        });
    }
    if fine.im.abs() > 1e-6 {
        return Err(Error::QuadratureTooCoarse {
            estimate: fine.im.abs(),
            tolerance: 1e-6,
        });
    }
    Ok(fine.re)
}

fn simpson_gamma(u: f64, half_width: f64, points: usize) -> Complex64 {
    let points = if points.is_multiple_of(2) {
        points + 1
    } else {
        points
    };
    let h = 2.0 * half_width / (points - 1) as f64;
    let integrand = |t: f64| -> Complex64 {
        let sinc = if t.abs() < 1e-8 { 1.0 } else { t.sin() / t };
        sinc * sinc * Complex64::new(0.0, t * u).exp()
    };
    let mut acc = integrand(-half_width) + integrand(half_width);
    for i in 1..points - 1 {
        let t = -half_width + i as f64 * h;
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * integrand(t);
    }
    acc * h / 3.0 / std::f64::consts::PI
}

/// Signal-photon density matrix for one preparation setting, with the
/// coherence carried as a complex slot (presets use real gamma).
pub fn signal_state_complex(
    setting: &PreparationSetting,
    gamma: Complex64,
) -> Result<DensityMatrix, Error> {
    if gamma.norm() > 1.0 + 1e-12 {
        return Err(Error::InvalidParameter(format!(
            "|gamma| = {} exceeds 1",
            gamma.norm()
        )));
    }
    let a = setting.alpha as f64;
    let phi = setting.phi_deg.to_radians();
    let (c2, s2) = (phi.cos() * phi.cos(), phi.sin() * phi.sin());
    let off = (2.0 * phi).sin() / 2.0;
    let mut m = CMatrix::zeros(4);
    m[(0, 0)] = Complex64::new(a * c2, 0.0);
    m[(1, 1)] = Complex64::new((1.0 - a) * c2, 0.0);
    m[(2, 2)] = Complex64::new(a * s2, 0.0);
    m[(3, 3)] = Complex64::new((1.0 - a) * s2, 0.0);
    m[(0, 2)] = a * gamma * off;
    m[(2, 0)] = a * gamma.conj() * off;
    m[(1, 3)] = (1.0 - a) * gamma * off;
    m[(3, 1)] = (1.0 - a) * gamma.conj() * off;
    DensityMatrix::new(m)
}

/// Real-gamma entry point used by all presets.
pub fn prepare_signal_state(
    setting: &PreparationSetting,
    gamma: f64,
) -> Result<DensityMatrix, Error> {
    signal_state_complex(setting, Complex64::new(gamma, 0.0))
}

/// Closed-form purity 1 - (1 - gamma^2)/2 * sin^2(2 phi) of the prepared
/// signal states.
pub fn purity_formula(phi_deg: f64, gamma: f64) -> f64 {
    let s = (2.0 * phi_deg.to_radians()).sin();
    1.0 - (1.0 - gamma * gamma) / 2.0 * s * s
}

/// tr(rho^2) of an arbitrary state.
pub fn purity_of(rho: &DensityMatrix) -> f64 {
    rho.purity()
}

/// Preparation settings of a scenario: the qutrit flips the third state's
/// OAM relative to the qubit, the quart uses the four orthogonal
/// basis-state settings.
pub fn preparation_settings(kind: ScenarioKind, phi_deg: f64) -> [PreparationSetting; 4] {
    match kind {
        ScenarioKind::Qutrit => [
            PreparationSetting { alpha: 1, phi_deg },
            PreparationSetting {
                alpha: 1,
                phi_deg: -phi_deg,
            },
            PreparationSetting {
                alpha: 0,
                phi_deg: 0.0,
            },
            PreparationSetting {
                alpha: 1,
                phi_deg: 90.0,
            },
        ],
        ScenarioKind::Qubit => [
            PreparationSetting { alpha: 1, phi_deg },
            PreparationSetting {
                alpha: 1,
                phi_deg: -phi_deg,
            },
            PreparationSetting {
                alpha: 1,
                phi_deg: 0.0,
            },
            PreparationSetting {
                alpha: 1,
                phi_deg: 90.0,
            },
        ],
        ScenarioKind::Quart => [
            PreparationSetting {
                alpha: 1,
                phi_deg: 0.0,
            },
            PreparationSetting {
                alpha: 0,
                phi_deg: 0.0,
            },
            PreparationSetting {
                alpha: 1,
                phi_deg: 90.0,
            },
            PreparationSetting {
                alpha: 0,
                phi_deg: 90.0,
            },
        ],
    }
}

/// The four preparations of a scenario at a given coherence. Classical
/// bit/trit limits are the same presets with gamma forced to 0.
pub fn ensemble_preset(
    kind: ScenarioKind,
    phi_deg: f64,
    gamma: f64,
) -> Result<Vec<DensityMatrix>, Error> {
    preparation_settings(kind, phi_deg)
        .iter()
        .map(|s| prepare_signal_state(s, gamma))
        .collect()
}

/// The three dichotomic observables of a scenario.
pub fn measurement_preset(kind: ScenarioKind) -> Vec<Observable> {
    let hv = Observable::diagonal(&[1.0, 1.0, -1.0, -1.0]).expect("static");
    let oam = Observable::diagonal(&[1.0, -1.0, 1.0, -1.0]).expect("static");
    match kind {
        ScenarioKind::Qubit | ScenarioKind::Qutrit => {
            // +/-45 degree polarization: couples |H,m> and |V,m>
            let mut m = CMatrix::zeros(4);
            let one = Complex64::new(1.0, 0.0);
            m[(0, 2)] = one;
            m[(2, 0)] = one;
            m[(1, 3)] = one;
            m[(3, 1)] = one;
            let diag45 = Observable::new(m).expect("static");
            vec![hv, oam, diag45]
        }
        ScenarioKind::Quart => {
            let single_out = Observable::diagonal(&[1.0, 1.0, 1.0, -1.0]).expect("static");
            vec![single_out, hv, oam]
        }
    }
}

/// Closed-form witness value for the qubit and qutrit presets. The quart
/// value is the constant `QUART_I4`.
pub fn analytic_i4(kind: ScenarioKind, phi_deg: f64, gamma: f64) -> Result<f64, Error> {
    let base = match kind {
        ScenarioKind::Qutrit => 5.0,
        ScenarioKind::Qubit => 3.0,
        ScenarioKind::Quart => {
            return Err(Error::InvalidParameter(
                "quart witness value is the constant QUART_I4 = 9".into(),
            ))
        }
    };
    let two_phi = 2.0 * phi_deg.to_radians();
    Ok(base + 2.0 * two_phi.cos() + 2.0 * gamma * two_phi.sin())
}

/// One point of a delay scan. `delta_fs` = tau - DL/2, so 0 marks maximal
/// coherence.
#[derive(Debug, Clone, Copy)]
pub struct ScanPoint {
    pub delta_fs: f64,
    pub gamma: f64,
    pub i4: f64,
}

/// The full matrix pipeline at a single delay.
pub fn i4_at_delay(scenario: &Scenario, dl: f64, tau: f64) -> Result<ScanPoint, Error> {
    let gamma = match scenario.gamma_mode {
        GammaMode::FromDelay => gamma_of_delay(&PhysicalParams::new(dl, tau)?),
        GammaMode::Forced(g) => g,
    } * scenario.visibility;
    let ensemble = ensemble_preset(scenario.kind, scenario.phi_deg, gamma)?;
    let observables = measurement_preset(scenario.kind);
    let probs = probs_from_quantum(&ensemble, &observables)?;
    let i4 = eval_witness(&i4_spec(), &probs)?;
    Ok(ScanPoint {
        delta_fs: tau - dl / 2.0,
        gamma,
        i4,
    })
}

/// Witness-vs-delay curve over a grid of temporal delays.
pub fn scan_delay(scenario: &Scenario, dl: f64, tau_grid: &[f64]) -> Result<Vec<ScanPoint>, Error> {
    #[cfg(feature = "parallel")]
    {
        tau_grid
            .par_iter()
            .map(|&tau| i4_at_delay(scenario, dl, tau))
            .collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        scan_delay_seq(scenario, dl, tau_grid)
    }
}

/// Sequential variant for benches and determinism cross-checks.
pub fn scan_delay_seq(
    scenario: &Scenario,
    dl: f64,
    tau_grid: &[f64],
) -> Result<Vec<ScanPoint>, Error> {
    tau_grid
        .iter()
        .map(|&tau| i4_at_delay(scenario, dl, tau))
        .collect()
}

/// Evenly spaced delay grid, inclusive of both endpoints.
pub fn tau_grid(tau_min: f64, tau_max: f64, steps: usize) -> Vec<f64> {
    if steps <= 1 {
        return vec![tau_min];
    }
    let h = (tau_max - tau_min) / (steps - 1) as f64;
    (0..steps).map(|i| tau_min + i as f64 * h).collect()
}

/// Draw binomial counts for every setting of a dichotomic table. Each
/// setting (x, y) uses its own RNG stream derived from the seed, so the
/// record is reproducible and independent of evaluation order.
pub fn simulate_counts(
    p: &ProbabilityTable,
    shots_per_setting: u64,
    seed: u64,
) -> Result<CountsRecord, Error> {
    if p.k() != 2 {
        return Err(Error::NotDichotomic(format!("k = {}", p.k())));
    }
    if shots_per_setting == 0 {
        return Err(Error::InvalidParameter("shots must be >= 1".into()));
    }
    let (n, m) = (p.n(), p.m());
    let mut plus = vec![0u64; n * m];
    for x in 0..n {
        for y in 0..m {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream((x * m + y + 1) as u64);
            let prob = p.get(0, x, y).clamp(0.0, 1.0);
            let dist = Binomial::new(shots_per_setting, prob)
                .map_err(|e| Error::InvalidParameter(e.to_string()))?;
            plus[x * m + y] = dist.sample(&mut rng);
        }
    }
    let minus: Vec<u64> = plus.iter().map(|&c| shots_per_setting - c).collect();
    CountsRecord::new(n, m, vec![shots_per_setting; n * m], plus, minus)
}
