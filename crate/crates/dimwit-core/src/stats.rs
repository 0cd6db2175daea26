//! Counts -> probabilities with binomial uncertainties, propagation to the
//! witness value, and dimension/quantumness certification against a bounds
//! table.

use serde_json::{json, Value};

use crate::error::Error;
use crate::witness::{correlators_from_probs, ProbabilityTable, WitnessSpec};

/// Raw dichotomic counts N(b|x,y) with per-setting shot totals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountsRecord {
    n: usize,
    m: usize,
    shots: Vec<u64>,
    plus: Vec<u64>,
    minus: Vec<u64>,
}

impl CountsRecord {
    pub fn new(
        n: usize,
        m: usize,
        shots: Vec<u64>,
        plus: Vec<u64>,
        minus: Vec<u64>,
    ) -> Result<Self, Error> {
        if shots.len() != n * m || plus.len() != n * m || minus.len() != n * m {
            return Err(Error::ShapeMismatch("counts arrays must be n x m".into()));
        }
        for i in 0..n * m {
            if plus[i] + minus[i] != shots[i] {
                return Err(Error::InvalidTable(format!(
                    "counts at setting {i} sum to {}, expected {}",
                    plus[i] + minus[i],
                    shots[i]
                )));
            }
        }
        Ok(CountsRecord {
            n,
            m,
            shots,
            plus,
            minus,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }
    pub fn m(&self) -> usize {
        self.m
    }
    pub fn shots(&self, x: usize, y: usize) -> u64 {
        self.shots[x * self.m + y]
    }
    pub fn plus(&self, x: usize, y: usize) -> u64 {
        self.plus[x * self.m + y]
    }
    pub fn minus(&self, x: usize, y: usize) -> u64 {
        self.minus[x * self.m + y]
    }

    /// `{"shots":N,"counts":{"+1":[[..]],"-1":[[..]]}}`; shots collapses to a
    /// single number when uniform across settings.
    pub fn to_json(&self) -> Value {
        let grid = |v: &Vec<u64>| -> Vec<Vec<u64>> {
            (0..self.n)
                .map(|x| (0..self.m).map(|y| v[x * self.m + y]).collect())
                .collect()
        };
        let uniform = self.shots.windows(2).all(|w| w[0] == w[1]);
        let shots = if uniform {
            json!(self.shots[0])
        } else {
            json!(grid(&self.shots))
        };
        json!({
            "shots": shots,
            "counts": {"+1": grid(&self.plus), "-1": grid(&self.minus)},
        })
    }

    pub fn from_json(doc: &Value) -> Result<Self, Error> {
        let counts = doc
            .get("counts")
            .and_then(Value::as_object)
            .ok_or_else(|| Error::InvalidTable("missing \"counts\" object".into()))?;
        let plus = u64_grid(counts.get("+1"))?;
        let minus = u64_grid(counts.get("-1"))?;
        let n = plus.len();
        let m = plus.first().map(Vec::len).unwrap_or(0);
        if n == 0 || m == 0 || minus.len() != n || minus.iter().any(|r| r.len() != m) {
            return Err(Error::InvalidTable(
                "counts grids empty or mismatched".into(),
            ));
        }
        let flat = |g: Vec<Vec<u64>>| g.into_iter().flatten().collect::<Vec<_>>();
        let (plus, minus) = (flat(plus), flat(minus));
        let shots = match doc.get("shots") {
            Some(Value::Number(num)) => {
                let s = num
                    .as_u64()
                    .ok_or_else(|| Error::InvalidTable("negative shots".into()))?;
                vec![s; n * m]
            }
            Some(other) => flat(u64_grid(Some(other))?),
            None => plus.iter().zip(minus.iter()).map(|(a, b)| a + b).collect(),
        };
        CountsRecord::new(n, m, shots, plus, minus)
    }
}

fn u64_grid(v: Option<&Value>) -> Result<Vec<Vec<u64>>, Error> {
    v.and_then(Value::as_array)
        .and_then(|rows| {
            rows.iter()
                .map(|row| {
                    row.as_array()
                        .map(|r| r.iter().filter_map(Value::as_u64).collect::<Vec<_>>())
                })
                .collect::<Option<Vec<_>>>()
        })
        .ok_or_else(|| Error::InvalidTable("counts grid is not a nested integer array".into()))
}

/// Estimated table plus per-setting standard errors of the correlators.
#[derive(Debug, Clone)]
pub struct CountStats {
    pub probs: ProbabilityTable,
    /// Binomial MLE standard error of E(x,y): 2 sqrt(p (1-p) / shots).
    /// Zero at boundary counts (p in {0, 1}).
    pub se_e: Vec<f64>,
    /// Wilson-interval half-width alternative, reported alongside rather
    /// than replacing the MLE value at boundaries.
    pub wilson_se_e: Vec<f64>,
}

impl CountStats {
    pub fn se(&self, x: usize, y: usize) -> f64 {
        self.se_e[x * self.probs.m() + y]
    }
}

/// Relative frequencies and correlator standard errors from raw counts.
pub fn probs_from_counts(c: &CountsRecord) -> Result<CountStats, Error> {
    let (n, m) = (c.n(), c.m());
    let mut p = vec![0.0; 2 * n * m];
    let mut se_e = vec![0.0; n * m];
    let mut wilson_se_e = vec![0.0; n * m];
    for x in 0..n {
        for y in 0..m {
            let shots = c.shots(x, y);
            if shots == 0 {
                return Err(Error::InvalidTable(format!(
                    "zero shots at setting (x={}, y={})",
                    x + 1,
                    y + 1
                )));
            }
            let shots_f = shots as f64;
            let freq = c.plus(x, y) as f64 / shots_f;
            p[x * m + y] = freq;
            p[(n + x) * m + y] = 1.0 - freq;
            se_e[x * m + y] = 2.0 * (freq * (1.0 - freq) / shots_f).sqrt();
            // Wilson at z = 1
            let center_denom = 1.0 + 1.0 / shots_f;
            let half = ((freq * (1.0 - freq) / shots_f) + 1.0 / (4.0 * shots_f * shots_f)).sqrt()
                / center_denom;
            wilson_se_e[x * m + y] = 2.0 * half;
        }
    }
    Ok(CountStats {
        probs: ProbabilityTable::new(n, m, 2, p)?,
        se_e,
        wilson_se_e,
    })
}

/// Witness value and its quadrature-propagated standard error, assuming
/// independent settings.
pub fn witness_with_error(spec: &WitnessSpec, c: &CountsRecord) -> Result<(f64, f64), Error> {
    if !spec.has_correlator_form() {
        return Err(Error::NotDichotomic(format!(
            "witness \"{}\" has no correlator form",
            spec.name()
        )));
    }
    if (spec.n(), spec.m()) != (c.n(), c.m()) {
        return Err(Error::ShapeMismatch(format!(
            "witness ({}x{}) vs counts ({}x{})",
            spec.n(),
            spec.m(),
            c.n(),
            c.m()
        )));
    }
    let stats = probs_from_counts(c)?;
    let e = correlators_from_probs(&stats.probs)?;
    let mut value = 0.0;
    let mut var = 0.0;
    for x in 0..spec.n() {
        for y in 0..spec.m() {
            let coeff = spec.corr_coeff(x, y).unwrap();
            value += coeff * e.get(x, y);
            var += coeff * coeff * stats.se(x, y) * stats.se(x, y);
        }
    }
    Ok((value, var.sqrt()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    Builtin,
    Enumerated,
    Seesaw,
}

impl Provenance {
    pub fn as_str(&self) -> &'static str {
        match self {
            Provenance::Builtin => "builtin",
            Provenance::Enumerated => "enumerated",
            Provenance::Seesaw => "seesaw",
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct BoundsRow {
    pub d: usize,
    pub classical: f64,
    pub quantum: f64,
    pub classical_provenance: Provenance,
    pub quantum_provenance: Provenance,
}

/// Per-dimension classical and quantum thresholds the certifier compares
/// against. Rows must be sorted by dimension with C_d <= Q_d and both
/// non-decreasing.
#[derive(Debug, Clone)]
pub struct BoundsTable {
    rows: Vec<BoundsRow>,
}

impl BoundsTable {
    pub fn new(rows: Vec<BoundsRow>) -> Result<Self, Error> {
        if rows.is_empty() {
            return Err(Error::InvalidParameter("empty bounds table".into()));
        }
        for w in rows.windows(2) {
            if w[1].d <= w[0].d {
                return Err(Error::InvalidParameter(
                    "bounds rows must be sorted by d".into(),
                ));
            }
            if w[1].classical < w[0].classical || w[1].quantum < w[0].quantum {
                return Err(Error::InvalidParameter(
                    "bounds must be non-decreasing in d".into(),
                ));
            }
        }
        if let Some(bad) = rows.iter().find(|r| r.classical > r.quantum) {
            return Err(Error::InvalidParameter(format!(
                "C_{0} = {1} exceeds Q_{0} = {2}",
                bad.d, bad.classical, bad.quantum
            )));
        }
        Ok(BoundsTable { rows })
    }

    /// The published thresholds for the four-preparation witness.
    pub fn builtin_i4() -> Self {
        let row = |d, classical, quantum| BoundsRow {
            d,
            classical,
            quantum,
            classical_provenance: Provenance::Builtin,
            quantum_provenance: Provenance::Builtin,
        };
        BoundsTable::new(vec![
            row(1, 3.0, 3.0),
            row(2, 5.0, 6.0),
            row(3, 7.0, 7.97),
            row(4, 9.0, 9.0),
        ])
        .expect("static table")
    }

    pub fn rows(&self) -> &[BoundsRow] {
        &self.rows
    }

    pub fn to_json(&self) -> Value {
        json!(self
            .rows
            .iter()
            .map(|r| {
                json!({
                    "d": r.d,
                    "classical": r.classical,
                    "quantum": r.quantum,
                    "classical_provenance": r.classical_provenance.as_str(),
                    "quantum_provenance": r.quantum_provenance.as_str(),
                })
            })
            .collect::<Vec<_>>())
    }
}

/// Minimum dimensions and quantumness conclusions for a measured witness
/// value.
#[derive(Debug, Clone)]
pub struct CertificationReport {
    pub value: f64,
    pub sigma: f64,
    pub k: f64,
    /// Smallest tabulated d whose classical bound covers value - k sigma;
    /// `None` means even the largest tabulated dimension is ruled out.
    pub min_classical_dim: Option<usize>,
    pub min_quantum_dim: Option<usize>,
    /// d -> whether value - k sigma strictly exceeds C_d, certifying
    /// quantumness under a d-dimensional assumption.
    pub quantum_certified_given_dim: Vec<(usize, bool)>,
    /// (model, d) -> (value - bound) / sigma; empty when sigma = 0.
    pub sigmas_above: Vec<(&'static str, usize, f64)>,
    pub bounds: BoundsTable,
}

/// Compare a witness value (with uncertainty sigma and confidence multiplier
/// k) against a bounds table.
pub fn certify(
    value: f64,
    sigma: f64,
    k: f64,
    bounds: &BoundsTable,
) -> Result<CertificationReport, Error> {
    if k < 0.0 {
        return Err(Error::InvalidParameter("k must be non-negative".into()));
    }
    if sigma < 0.0 {
        return Err(Error::InvalidParameter("sigma must be non-negative".into()));
    }
    let threshold = value - k * sigma;
    let min_dim = |pick: fn(&BoundsRow) -> f64| {
        bounds
            .rows()
            .iter()
            .find(|r| pick(r) >= threshold)
            .map(|r| r.d)
    };
    let quantum_certified_given_dim = bounds
        .rows()
        .iter()
        .map(|r| (r.d, threshold > r.classical))
        .collect();
    let mut sigmas_above = Vec::new();
    if sigma > 0.0 {
        for r in bounds.rows() {
            sigmas_above.push(("classical", r.d, (value - r.classical) / sigma));
            sigmas_above.push(("quantum", r.d, (value - r.quantum) / sigma));
        }
    }
    Ok(CertificationReport {
        value,
        sigma,
        k,
        min_classical_dim: min_dim(|r| r.classical),
        min_quantum_dim: min_dim(|r| r.quantum),
        quantum_certified_given_dim,
        sigmas_above,
        bounds: bounds.clone(),
    })
}

impl CertificationReport {
    pub fn sigmas_above(&self, model: &str, d: usize) -> Option<f64> {
        self.sigmas_above
            .iter()
            .find(|(m, dim, _)| *m == model && *dim == d)
            .map(|(_, _, v)| *v)
    }

    pub fn to_json(&self) -> Value {
        let dim_json = |v: Option<usize>| match v {
            Some(d) => json!(d),
            None => json!(format!("> {}", self.bounds.rows().last().unwrap().d)),
        };
        let mut certified = serde_json::Map::new();
        for (d, flag) in &self.quantum_certified_given_dim {
            certified.insert(d.to_string(), json!(flag));
        }
        let mut sigmas = serde_json::Map::new();
        for model in ["classical", "quantum"] {
            let mut per_model = serde_json::Map::new();
            for (m, d, v) in &self.sigmas_above {
                if *m == model {
                    per_model.insert(d.to_string(), json!(v));
                }
            }
            if !per_model.is_empty() {
                sigmas.insert(model.to_string(), json!(per_model));
            }
        }
        json!({
            "value": self.value,
            "sigma": self.sigma,
            "k": self.k,
            "min_classical_dim": dim_json(self.min_classical_dim),
            "min_quantum_dim": dim_json(self.min_quantum_dim),
            "quantum_certified_given_dim": certified,
            "sigmas_above": sigmas,
            "bounds": self.bounds.to_json(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::witness::i4_spec;
    use approx::assert_abs_diff_eq;

    fn uniform_counts(n: usize, m: usize, shots: u64, plus: u64) -> CountsRecord {
        CountsRecord::new(
            n,
            m,
            vec![shots; n * m],
            vec![plus; n * m],
            vec![shots - plus; n * m],
        )
        .unwrap()
    }

    #[test]
    fn balanced_counts_give_half_and_expected_se() {
        let stats = probs_from_counts(&uniform_counts(1, 1, 100, 50)).unwrap();
        assert_eq!(stats.probs.get(0, 0, 0), 0.5);
        assert_abs_diff_eq!(stats.se(0, 0), 0.1, epsilon = 1e-15);
    }

    #[test]
    fn boundary_counts_have_zero_mle_se_but_nonzero_wilson() {
        let stats = probs_from_counts(&uniform_counts(1, 1, 100, 100)).unwrap();
        assert_eq!(stats.probs.get(0, 0, 0), 1.0);
        assert_eq!(stats.se(0, 0), 0.0);
        assert!(stats.wilson_se_e[0] > 0.0);
    }

    #[test]
    fn zero_shots_rejected() {
        let c = CountsRecord::new(1, 1, vec![0], vec![0], vec![0]).unwrap();
        assert!(probs_from_counts(&c).is_err());
    }

    #[test]
    fn witness_error_is_quadrature_of_nine_terms() {
        // all-saturating table: value 9, sigma 0
        let spec = i4_spec();
        // counts that saturate every correlator at the coefficient's sign
        let mut plus = Vec::new();
        let mut minus = Vec::new();
        for x in 0..4 {
            for y in 0..3 {
                let s = spec.corr_coeff(x, y).unwrap();
                plus.push(if s >= 0.0 { 100 } else { 0 });
                minus.push(if s >= 0.0 { 0 } else { 100 });
            }
        }
        let c = CountsRecord::new(4, 3, vec![100; 12], plus, minus).unwrap();
        let (v, sigma) = witness_with_error(&spec, &c).unwrap();
        assert_abs_diff_eq!(v, 9.0, epsilon = 1e-12);
        assert_eq!(sigma, 0.0);

        // equal SE s on all nine active terms -> sigma = 3 s
        let c = uniform_counts(4, 3, 100, 50);
        let (_, sigma) = witness_with_error(&spec, &c).unwrap();
        assert_abs_diff_eq!(sigma, 3.0 * 0.1, epsilon = 1e-12);
    }

    #[test]
    fn builtin_table_is_consistent() {
        let t = BoundsTable::builtin_i4();
        for r in t.rows() {
            assert!(r.classical <= r.quantum);
        }
    }

    #[test]
    fn inconsistent_tables_rejected() {
        let row = |d, c, q| BoundsRow {
            d,
            classical: c,
            quantum: q,
            classical_provenance: Provenance::Builtin,
            quantum_provenance: Provenance::Builtin,
        };
        assert!(BoundsTable::new(vec![row(1, 4.0, 3.0)]).is_err());
        assert!(BoundsTable::new(vec![row(1, 3.0, 3.0), row(2, 2.0, 6.0)]).is_err());
    }

    #[test]
    fn measured_value_conclusions() {
        let bounds = BoundsTable::builtin_i4();
        let r = certify(5.66, 0.15, 0.0, &bounds).unwrap();
        assert_eq!(r.min_classical_dim, Some(3));
        assert_eq!(r.min_quantum_dim, Some(2));
        assert!(r
            .quantum_certified_given_dim
            .iter()
            .any(|&(d, f)| d == 2 && f));

        let r = certify(7.57, 0.13, 0.0, &bounds).unwrap();
        assert_eq!(r.min_quantum_dim, Some(3));

        let r = certify(8.57, 0.06, 0.0, &bounds).unwrap();
        assert_eq!(r.min_quantum_dim, Some(4));
        assert_abs_diff_eq!(r.sigmas_above("quantum", 3).unwrap(), 10.0, epsilon = 1e-9);

        let r = certify(4.9, 0.2, 0.0, &bounds).unwrap();
        assert_eq!(r.min_classical_dim, Some(2));
    }

    #[test]
    fn k_shifts_the_point_estimate() {
        let bounds = BoundsTable::builtin_i4();
        let with_k = certify(7.2, 0.5, 3.0, &bounds).unwrap();
        let shifted = certify(7.2 - 1.5, 0.0, 0.0, &bounds).unwrap();
        assert_eq!(with_k.min_classical_dim, shifted.min_classical_dim);
        assert_eq!(with_k.min_quantum_dim, shifted.min_quantum_dim);
    }

    #[test]
    fn counts_json_round_trip() {
        let c = uniform_counts(4, 3, 1000, 600);
        let doc = c.to_json();
        assert_eq!(doc["shots"], 1000);
        assert_eq!(CountsRecord::from_json(&doc).unwrap(), c);
    }
}
