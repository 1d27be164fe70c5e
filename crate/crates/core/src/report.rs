use leibniz_scalar::Scalar;
use serde_json::{json, Value};

/// Where a residual was observed: a frame index tuple or a tuple of sample
/// sections, rendered as strings.
#[derive(Clone, Debug, PartialEq)]
pub struct Residual {
    pub at: Vec<String>,
    pub value: Scalar,
}

/// Verdict of one identity. `pass` holds exactly when no nonzero residual
/// was recorded.
#[derive(Clone, Debug, PartialEq)]
pub struct CheckReport {
    pub identity: String,
    pub pass: bool,
    pub residuals: Vec<Residual>,
    pub assumptions: Vec<String>,
}

impl CheckReport {
    pub fn new(identity: impl Into<String>) -> Self {
        CheckReport {
            identity: identity.into(),
            pass: true,
            residuals: Vec::new(),
            assumptions: Vec::new(),
        }
    }

    /// Records `value` as a residual if it is not identically zero.
    pub fn record(&mut self, at: Vec<String>, value: Scalar) {
        if !value.is_zero() {
            self.pass = false;
            self.residuals.push(Residual { at, value });
        }
    }

    /// Records every component of a residual section.
    pub fn record_all(&mut self, at: &[String], values: &[Scalar]) {
        for (k, v) in values.iter().enumerate() {
            let mut a = at.to_vec();
            a.push(format!("comp={}", k + 1));
            self.record(a, v.clone());
        }
    }

    /// Marks the report failed without a scalar witness.
    pub fn fail(&mut self, note: impl Into<String>) {
        self.pass = false;
        self.assumptions.push(note.into());
    }

    pub fn assume(&mut self, note: impl Into<String>) {
        self.assumptions.push(note.into());
    }

    pub fn to_json(&self, coords: &[String]) -> Value {
        json!({
            "identity": self.identity,
            "pass": self.pass,
            "residuals": self
                .residuals
                .iter()
                .map(|r| json!({"at": r.at, "value": r.value.to_expr(coords)}))
                .collect::<Vec<_>>(),
            "assumptions": self.assumptions,
        })
    }
}

/// Renders 0-based frame indices as 1-based labels.
pub fn frame_at(idx: &[usize]) -> Vec<String> {
    idx.iter().map(|i| (i + 1).to_string()).collect()
}

/// Labels for sample sections.
pub fn sample_at(idx: &[usize]) -> Vec<String> {
    idx.iter().map(|i| format!("s{i}")).collect()
}
