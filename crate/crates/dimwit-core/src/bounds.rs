//! Shared result type for classical and quantum bound computations.

use serde_json::{json, Value};

use crate::classical::ClassicalStrategy;
use crate::linalg::CMatrix;
use crate::seesaw::QuantumRealization;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Model {
    Classical,
    Quantum,
}

impl Model {
    pub fn as_str(&self) -> &'static str {
        match self {
            Model::Classical => "classical",
            Model::Quantum => "quantum",
        }
    }
}

/// The strategy or quantum realization attaining a reported bound.
#[derive(Debug, Clone)]
pub enum Realization {
    Classical(ClassicalStrategy),
    Quantum(QuantumRealization),
}

/// Maximum witness value over d-dimensional systems of one model, together
/// with an argmax that re-evaluates to the same value through the witness
/// machinery.
#[derive(Debug, Clone)]
pub struct BoundResult {
    pub witness_name: String,
    pub model: Model,
    pub d: usize,
    pub value: f64,
    /// Present for see-saw results: whether the best restart converged
    /// before hitting its iteration cap.
    pub converged: Option<bool>,
    pub argmax: Realization,
}

impl BoundResult {
    pub fn to_json(&self) -> Value {
        let mut doc = json!({
            "witness": self.witness_name,
            "model": self.model.as_str(),
            "d": self.d,
            "value": self.value,
        });
        if let Some(flag) = self.converged {
            doc["converged"] = json!(flag);
        }
        doc["argmax"] = match &self.argmax {
            Realization::Classical(s) => s.to_json(),
            Realization::Quantum(r) => r.to_json(),
        };
        doc
    }
}

/// Nested `[re, im]` pairs, the wire format for operator matrices.
pub fn cmatrix_to_json(m: &CMatrix) -> Value {
    let d = m.dim();
    let rows: Vec<Vec<[f64; 2]>> = (0..d)
        .map(|i| (0..d).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
        .collect();
    json!(rows)
}
