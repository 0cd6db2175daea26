//! Probability/correlator data model, witness functionals, and evaluation of
//! prepare-and-measure statistics from quantum ensembles.
//!
//! Conventions: preparations x, measurements y and outcomes b are 1-based in
//! all user-facing I/O and 0-based internally. Dichotomic outcomes map index
//! 0 to the +1 result and index 1 to the -1 result.

use num_complex::Complex64;
use serde_json::{json, Value};

use crate::error::Error;
use crate::linalg::CMatrix;

/// Normalization slack accepted when ingesting externally measured tables.
pub const INGEST_TOL: f64 = 1e-9;
/// Normalization slack for tables this crate generates itself.
pub const GENERATED_TOL: f64 = 1e-12;

/// Observed or derived P(b|x,y) over n preparations, m measurements and k
/// outcomes.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityTable {
    n: usize,
    m: usize,
    k: usize,
    /// Flat (b, x, y) row-major.
    p: Vec<f64>,
}

impl ProbabilityTable {
    pub fn new(n: usize, m: usize, k: usize, p: Vec<f64>) -> Result<Self, Error> {
        Self::with_tolerance(n, m, k, p, INGEST_TOL)
    }

    pub fn with_tolerance(
        n: usize,
        m: usize,
        k: usize,
        p: Vec<f64>,
        tol: f64,
    ) -> Result<Self, Error> {
        if n == 0 || m == 0 || k == 0 {
            return Err(Error::InvalidTable("n, m, k must be positive".into()));
        }
        if p.len() != n * m * k {
            return Err(Error::ShapeMismatch(format!(
                "expected {} entries, got {}",
                n * m * k,
                p.len()
            )));
        }
        let table = ProbabilityTable { n, m, k, p };
        for (idx, &v) in table.p.iter().enumerate() {
            if !(-tol..=1.0 + tol).contains(&v) {
                return Err(Error::InvalidTable(format!(
                    "entry {idx} = {v} outside [0, 1]"
                )));
            }
        }
        for x in 0..n {
            for y in 0..m {
                let total: f64 = (0..k).map(|b| table.get(b, x, y)).sum();
                if (total - 1.0).abs() > tol {
                    return Err(Error::InvalidTable(format!(
                        "P(.|x={},y={}) sums to {total}, not 1",
                        x + 1,
                        y + 1
                    )));
                }
            }
        }
        Ok(table)
    }

    pub fn n(&self) -> usize {
        self.n
    }
    pub fn m(&self) -> usize {
        self.m
    }
    pub fn k(&self) -> usize {
        self.k
    }

    /// P(b|x,y), all indices 0-based.
    pub fn get(&self, b: usize, x: usize, y: usize) -> f64 {
        self.p[(b * self.n + x) * self.m + y]
    }

    /// Convex mixture of two tables of identical shape.
    pub fn mix(&self, other: &ProbabilityTable, lambda: f64) -> Result<ProbabilityTable, Error> {
        if (self.n, self.m, self.k) != (other.n, other.m, other.k) {
            return Err(Error::ShapeMismatch(
                "cannot mix tables of different shape".into(),
            ));
        }
        let p = self
            .p
            .iter()
            .zip(other.p.iter())
            .map(|(a, b)| lambda * a + (1.0 - lambda) * b)
            .collect();
        ProbabilityTable::with_tolerance(self.n, self.m, self.k, p, INGEST_TOL)
    }

    /// Serialize to the `{"n":..,"m":..,"k":..,"p":{"+1":[[..]],"-1":[[..]]}}`
    /// document. Outcome keys are "+1"/"-1" for k = 2 and "1".."k" otherwise.
    pub fn to_json(&self) -> Value {
        let mut p = serde_json::Map::new();
        for b in 0..self.k {
            let rows: Vec<Vec<f64>> = (0..self.n)
                .map(|x| (0..self.m).map(|y| self.get(b, x, y)).collect())
                .collect();
            p.insert(outcome_label(b, self.k), json!(rows));
        }
        json!({"n": self.n, "m": self.m, "k": self.k, "p": p})
    }

    pub fn from_json(doc: &Value) -> Result<Self, Error> {
        let n = field_usize(doc, "n")?;
        let m = field_usize(doc, "m")?;
        let k = field_usize(doc, "k")?;
        let pmap = doc
            .get("p")
            .and_then(Value::as_object)
            .ok_or_else(|| Error::InvalidTable("missing \"p\" object".into()))?;
        let mut p = vec![0.0; n * m * k];
        for b in 0..k {
            let label = outcome_label(b, k);
            let rows = pmap
                .get(&label)
                .ok_or_else(|| Error::InvalidTable(format!("missing outcome \"{label}\"")))?;
            let rows = nested_f64(rows, n, m).ok_or_else(|| {
                Error::InvalidTable(format!("outcome \"{label}\" is not an {n}x{m} array"))
            })?;
            for x in 0..n {
                for y in 0..m {
                    p[(b * n + x) * m + y] = rows[x][y];
                }
            }
        }
        ProbabilityTable::new(n, m, k, p)
    }
}

fn outcome_label(b: usize, k: usize) -> String {
    if k == 2 {
        if b == 0 {
            "+1".into()
        } else {
            "-1".into()
        }
    } else {
        format!("{}", b + 1)
    }
}

fn field_usize(doc: &Value, key: &str) -> Result<usize, Error> {
    doc.get(key)
        .and_then(Value::as_u64)
        .map(|v| v as usize)
        .ok_or_else(|| Error::InvalidTable(format!("missing or non-integer \"{key}\"")))
}

fn nested_f64(v: &Value, n: usize, m: usize) -> Option<Vec<Vec<f64>>> {
    let rows = v.as_array()?;
    if rows.len() != n {
        return None;
    }
    let mut out = Vec::with_capacity(n);
    for row in rows {
        let row = row.as_array()?;
        if row.len() != m {
            return None;
        }
        out.push(row.iter().map(Value::as_f64).collect::<Option<Vec<_>>>()?);
    }
    Some(out)
}

/// Dichotomic correlators E(x,y) = P(+1|x,y) - P(-1|x,y).
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelatorTable {
    n: usize,
    m: usize,
    e: Vec<f64>,
}

impl CorrelatorTable {
    pub fn new(n: usize, m: usize, e: Vec<f64>) -> Result<Self, Error> {
        if e.len() != n * m {
            return Err(Error::ShapeMismatch(format!(
                "expected {} correlators, got {}",
                n * m,
                e.len()
            )));
        }
        if let Some(bad) = e.iter().find(|v| v.abs() > 1.0 + INGEST_TOL) {
            return Err(Error::InvalidTable(format!(
                "correlator {bad} outside [-1, 1]"
            )));
        }
        Ok(CorrelatorTable { n, m, e })
    }

    pub fn n(&self) -> usize {
        self.n
    }
    pub fn m(&self) -> usize {
        self.m
    }
    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.e[x * self.m + y]
    }
}

/// E(x,y) from a dichotomic probability table.
pub fn correlators_from_probs(p: &ProbabilityTable) -> Result<CorrelatorTable, Error> {
    if p.k() != 2 {
        return Err(Error::NotDichotomic(format!("k = {}", p.k())));
    }
    let e = (0..p.n())
        .flat_map(|x| (0..p.m()).map(move |y| (x, y)))
        .map(|(x, y)| p.get(0, x, y) - p.get(1, x, y))
        .collect();
    CorrelatorTable::new(p.n(), p.m(), e)
}

/// A linear witness: coefficient tensor D indexed (b, x, y), with an optional
/// correlator-form shortcut c indexed (x, y) for dichotomic witnesses.
#[derive(Debug, Clone, PartialEq)]
pub struct WitnessSpec {
    name: String,
    n: usize,
    m: usize,
    k: usize,
    coeffs: Vec<f64>,
    corr: Option<Vec<f64>>,
}

impl WitnessSpec {
    /// Build a dichotomic witness from its correlator coefficients c(x,y).
    /// The equivalent D tensor is D(+1,x,y) = c(x,y), D(-1,x,y) = -c(x,y).
    pub fn from_correlators(name: &str, c: &[Vec<f64>]) -> Result<Self, Error> {
        let n = c.len();
        if n == 0 {
            return Err(Error::ShapeMismatch("empty coefficient matrix".into()));
        }
        let m = c[0].len();
        if c.iter().any(|row| row.len() != m) {
            return Err(Error::ShapeMismatch("ragged coefficient matrix".into()));
        }
        let corr: Vec<f64> = c.iter().flatten().copied().collect();
        let mut coeffs = vec![0.0; 2 * n * m];
        for x in 0..n {
            for y in 0..m {
                coeffs[(x) * m + y] = corr[x * m + y];
                coeffs[(n + x) * m + y] = -corr[x * m + y];
            }
        }
        Ok(WitnessSpec {
            name: name.to_string(),
            n,
            m,
            k: 2,
            coeffs,
            corr: Some(corr),
        })
    }

    /// Build a general witness from its full D tensor (b, x, y).
    pub fn from_tensor(
        name: &str,
        n: usize,
        m: usize,
        k: usize,
        coeffs: Vec<f64>,
    ) -> Result<Self, Error> {
        if coeffs.len() != n * m * k {
            return Err(Error::ShapeMismatch(format!(
                "expected {} coefficients, got {}",
                n * m * k,
                coeffs.len()
            )));
        }
        Ok(WitnessSpec {
            name: name.to_string(),
            n,
            m,
            k,
            coeffs,
            corr: None,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }
    pub fn n(&self) -> usize {
        self.n
    }
    pub fn m(&self) -> usize {
        self.m
    }
    pub fn k(&self) -> usize {
        self.k
    }

    /// D(b,x,y), 0-based.
    pub fn coeff(&self, b: usize, x: usize, y: usize) -> f64 {
        self.coeffs[(b * self.n + x) * self.m + y]
    }

    /// c(x,y) when the correlator form is present.
    pub fn corr_coeff(&self, x: usize, y: usize) -> Option<f64> {
        self.corr.as_ref().map(|c| c[x * self.m + y])
    }

    pub fn has_correlator_form(&self) -> bool {
        self.corr.is_some()
    }

    /// Sum of |c(x,y)|: an unconditional ceiling on the witness value since
    /// every correlator is bounded by 1 in magnitude.
    pub fn abs_corr_sum(&self) -> Option<f64> {
        self.corr.as_ref().map(|c| c.iter().map(|v| v.abs()).sum())
    }

    pub fn to_json(&self) -> Value {
        match &self.corr {
            Some(c) => {
                let rows: Vec<Vec<f64>> = (0..self.n)
                    .map(|x| (0..self.m).map(|y| c[x * self.m + y]).collect())
                    .collect();
                json!({"name": self.name, "c": rows})
            }
            None => {
                let tensor: Vec<Vec<Vec<f64>>> = (0..self.k)
                    .map(|b| {
                        (0..self.n)
                            .map(|x| (0..self.m).map(|y| self.coeff(b, x, y)).collect())
                            .collect()
                    })
                    .collect();
                json!({"name": self.name, "n": self.n, "m": self.m, "k": self.k, "d": tensor})
            }
        }
    }

    pub fn from_json(doc: &Value) -> Result<Self, Error> {
        let name = doc
            .get("name")
            .and_then(Value::as_str)
            .ok_or_else(|| Error::InvalidParameter("witness file missing \"name\"".into()))?;
        if let Some(c) = doc.get("c") {
            let rows = c
                .as_array()
                .ok_or_else(|| Error::InvalidParameter("\"c\" is not an array".into()))?;
            let mat: Vec<Vec<f64>> = rows
                .iter()
                .map(|row| {
                    row.as_array()
                        .map(|r| r.iter().filter_map(Value::as_f64).collect::<Vec<_>>())
                })
                .collect::<Option<_>>()
                .ok_or_else(|| {
                    Error::InvalidParameter("\"c\" rows must be numeric arrays".into())
                })?;
            WitnessSpec::from_correlators(name, &mat)
        } else {
            Err(Error::InvalidParameter(
                "witness file must carry a correlator matrix \"c\"".into(),
            ))
        }
    }
}

/// The four-preparation, three-measurement witness preset.
pub fn i4_spec() -> WitnessSpec {
    WitnessSpec::from_correlators(
        "i4",
        &[
            vec![1.0, 1.0, 1.0],
            vec![1.0, 1.0, -1.0],
            vec![1.0, -1.0, 0.0],
            vec![-1.0, 0.0, 0.0],
        ],
    )
    .expect("static coefficients")
}

/// Witness value via the full D tensor.
pub fn eval_witness(spec: &WitnessSpec, p: &ProbabilityTable) -> Result<f64, Error> {
    if (spec.n(), spec.m(), spec.k()) != (p.n(), p.m(), p.k()) {
        return Err(Error::ShapeMismatch(format!(
            "witness ({},{},{}) vs table ({},{},{})",
            spec.n(),
            spec.m(),
            spec.k(),
            p.n(),
            p.m(),
            p.k()
        )));
    }
    let mut acc = 0.0;
    for b in 0..spec.k() {
        for x in 0..spec.n() {
            for y in 0..spec.m() {
                acc += spec.coeff(b, x, y) * p.get(b, x, y);
            }
        }
    }
    Ok(acc)
}

/// Witness value via the correlator shortcut; must agree with `eval_witness`
/// for any dichotomic table.
pub fn eval_witness_correlators(spec: &WitnessSpec, e: &CorrelatorTable) -> Result<f64, Error> {
    if !spec.has_correlator_form() {
        return Err(Error::NotDichotomic(format!(
            "witness \"{}\" has no correlator form",
            spec.name()
        )));
    }
    if (spec.n(), spec.m()) != (e.n(), e.m()) {
        return Err(Error::ShapeMismatch("witness vs correlator table".into()));
    }
    let mut acc = 0.0;
    for x in 0..spec.n() {
        for y in 0..spec.m() {
            acc += spec.corr_coeff(x, y).unwrap() * e.get(x, y);
        }
    }
    Ok(acc)
}

/// d x d Hermitian, unit-trace, positive operator representing a preparation.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    mat: CMatrix,
}

impl DensityMatrix {
    pub fn new(mat: CMatrix) -> Result<Self, Error> {
        if !mat.is_hermitian(crate::linalg::HERMITICITY_TOL) {
            return Err(Error::InvalidOperator(format!(
                "density matrix not Hermitian (defect {:.3e})",
                mat.hermiticity_defect()
            )));
        }
        let tr = mat.trace();
        if (tr.re - 1.0).abs() > 1e-12 || tr.im.abs() > 1e-12 {
            return Err(Error::InvalidOperator(format!("trace {tr} is not 1")));
        }
        let eig = mat.eigh()?;
        let min = eig.eigenvalues.last().copied().unwrap_or(0.0);
        if min < -1e-10 {
            return Err(Error::InvalidOperator(format!(
                "negative eigenvalue {min:.3e}"
            )));
        }
        Ok(DensityMatrix { mat })
    }

    /// Pure state |v><v| (v is normalized internally).
    pub fn pure(v: &[Complex64]) -> Result<Self, Error> {
        let norm_sq: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        if norm_sq == 0.0 {
            return Err(Error::InvalidOperator("zero state vector".into()));
        }
        DensityMatrix::new(CMatrix::projector(v))
    }

    pub fn basis_state(d: usize, i: usize) -> Self {
        DensityMatrix {
            mat: CMatrix::basis_projector(d, i),
        }
    }

    pub fn maximally_mixed(d: usize) -> Self {
        let mut m = CMatrix::zeros(d);
        for i in 0..d {
            m[(i, i)] = Complex64::new(1.0 / d as f64, 0.0);
        }
        DensityMatrix { mat: m }
    }

    pub fn dim(&self) -> usize {
        self.mat.dim()
    }
    pub fn matrix(&self) -> &CMatrix {
        &self.mat
    }

    pub fn purity(&self) -> f64 {
        self.mat.trace_product(&self.mat).re
    }
}

/// d x d Hermitian observable with spectrum in {-1, +1}.
#[derive(Debug, Clone, PartialEq)]
pub struct Observable {
    mat: CMatrix,
}

impl Observable {
    pub fn new(mat: CMatrix) -> Result<Self, Error> {
        if !mat.is_hermitian(crate::linalg::HERMITICITY_TOL) {
            return Err(Error::InvalidOperator(format!(
                "observable not Hermitian (defect {:.3e})",
                mat.hermiticity_defect()
            )));
        }
        let sq = mat.matmul(&mat);
        let mut defect = 0.0_f64;
        let d = mat.dim();
        for i in 0..d {
            for j in 0..d {
                let expect = if i == j { 1.0 } else { 0.0 };
                defect = defect.max((sq[(i, j)] - Complex64::new(expect, 0.0)).norm());
            }
        }
        if defect > 1e-9 {
            return Err(Error::InvalidOperator(format!(
                "M^2 differs from identity by {defect:.3e}; spectrum is not +/-1"
            )));
        }
        Ok(Observable { mat })
    }

    /// Diagonal observable from a +/-1 pattern.
    pub fn diagonal(signs: &[f64]) -> Result<Self, Error> {
        let d = signs.len();
        let mut m = CMatrix::zeros(d);
        for (i, &s) in signs.iter().enumerate() {
            m[(i, i)] = Complex64::new(s, 0.0);
        }
        Observable::new(m)
    }

    pub fn dim(&self) -> usize {
        self.mat.dim()
    }
    pub fn matrix(&self) -> &CMatrix {
        &self.mat
    }

    /// tr(rho M), the correlator of this observable on a state.
    pub fn expectation(&self, rho: &DensityMatrix) -> f64 {
        rho.matrix().trace_product(&self.mat).re
    }
}

/// Born-rule table P(+/-1|x,y) = tr(rho_x (I +/- M_y)/2) for an ensemble and a
/// set of dichotomic observables.
pub fn probs_from_quantum(
    ensemble: &[DensityMatrix],
    observables: &[Observable],
) -> Result<ProbabilityTable, Error> {
    if ensemble.is_empty() || observables.is_empty() {
        return Err(Error::ShapeMismatch(
            "empty ensemble or observable list".into(),
        ));
    }
    let d = ensemble[0].dim();
    if ensemble.iter().any(|r| r.dim() != d) || observables.iter().any(|o| o.dim() != d) {
        return Err(Error::ShapeMismatch(
            "all states and observables must share one dimension".into(),
        ));
    }
    let n = ensemble.len();
    let m = observables.len();
    let mut p = vec![0.0; 2 * n * m];
    for (x, rho) in ensemble.iter().enumerate() {
        for (y, obs) in observables.iter().enumerate() {
            let e = obs.expectation(rho).clamp(-1.0, 1.0);
            p[(x) * m + y] = 0.5 * (1.0 + e);
            p[(n + x) * m + y] = 0.5 * (1.0 - e);
        }
    }
    ProbabilityTable::with_tolerance(n, m, 2, p, GENERATED_TOL)
}
