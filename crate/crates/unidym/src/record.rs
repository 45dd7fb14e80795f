//! The result-record schema shared by every experiment.

use serde::{Deserialize, Serialize};

/// Outcome status of one record.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    /// The checked inequality or equality held.
    Pass,
    /// It did not hold.
    Fail,
    /// The case could not be decided (hypothesis failure, numeric trouble);
    /// details are in `flags`.
    Flag,
}

impl Status {
    /// Lower-case text form used in CSV output.
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Flag => "flag",
        }
    }
}

/// One experiment parameter value.
///
/// `Int` precedes `Float` so untagged deserialization keeps integers exact.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ParamValue {
    /// An integer parameter (grid index, period, stage count …).
    Int(i64),
    /// A real parameter.
    Float(f64),
    /// A textual parameter (family name, orbit label …).
    Text(String),
}

impl ParamValue {
    /// Plain text form used in the CSV `params` column.
    pub fn render(&self) -> String {
        match self {
            ParamValue::Int(v) => format!("{v}"),
            ParamValue::Float(v) => format!("{v:.16e}"),
            ParamValue::Text(v) => v.clone(),
        }
    }
}

/// One row of experiment output: a measured value against a bound.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRecord {
    /// The experiment that produced the record.
    pub experiment: String,
    /// Row kind within the experiment (one experiment can emit several).
    pub kind: String,
    /// Ordered parameters identifying the case.
    pub params: Vec<(String, ParamValue)>,
    /// The measured quantity.
    pub measured: f64,
    /// The bound it is compared against.
    pub bound: f64,
    /// Signed margin; its orientation is fixed per kind such that
    /// non-negative (up to the stated tolerance) means the check holds.
    pub margin: f64,
    /// Pass / fail / flag.
    pub status: Status,
    /// Explicit hypothesis failures and diagnostics.
    pub flags: Vec<String>,
}

impl ResultRecord {
    /// Starts a record with zeroed values and `Pass` status.
    pub fn new(experiment: &str, kind: &str) -> Self {
        ResultRecord {
            experiment: experiment.to_string(),
            kind: kind.to_string(),
            params: Vec::new(),
            measured: 0.0,
            bound: 0.0,
            margin: 0.0,
            status: Status::Pass,
            flags: Vec::new(),
        }
    }

    /// Appends an integer parameter.
    pub fn with_i(mut self, key: &str, v: i64) -> Self {
        self.params.push((key.to_string(), ParamValue::Int(v)));
        self
    }

    /// Appends a real parameter.
    pub fn with_f(mut self, key: &str, v: f64) -> Self {
        self.params.push((key.to_string(), ParamValue::Float(v)));
        self
    }

    /// Appends a textual parameter.
    pub fn with_s(mut self, key: &str, v: &str) -> Self {
        self.params
            .push((key.to_string(), ParamValue::Text(v.to_string())));
        self
    }

    /// Sets measured / bound / margin, replacing non-finite values by zero
    /// (with a flag) so the emitted files stay parseable.
    pub fn values(mut self, measured: f64, bound: f64, margin: f64) -> Self {
        let mut clean = |label: &str, v: f64, slot: &mut f64| {
            if v.is_finite() {
                *slot = v;
            } else {
                *slot = 0.0;
                self.flags.push(format!("non-finite {label} ({v})"));
                self.status = Status::Flag;
            }
        };
        let mut m = self.measured;
        let mut b = self.bound;
        let mut g = self.margin;
        clean("measured", measured, &mut m);
        clean("bound", bound, &mut b);
        clean("margin", margin, &mut g);
        self.measured = m;
        self.bound = b;
        self.margin = g;
        self
    }

    /// Sets the status from a boolean check (unless already flagged).
    pub fn check(mut self, ok: bool) -> Self {
        if self.status != Status::Flag {
            self.status = if ok { Status::Pass } else { Status::Fail };
        }
        self
    }

    /// Marks the record flagged with a reason.
    pub fn flagged(mut self, reason: &str) -> Self {
        self.status = Status::Flag;
        self.flags.push(reason.to_string());
        self
    }

    /// Looks up a parameter by name.
    pub fn param(&self, key: &str) -> Option<&ParamValue> {
        self.params.iter().find(|(k, _)| k == key).map(|(_, v)| v)
    }

    /// Looks up a numeric parameter (int or float) by name.
    pub fn param_f64(&self, key: &str) -> Option<f64> {
        match self.param(key)? {
            ParamValue::Int(v) => Some(*v as f64),
            ParamValue::Float(v) => Some(*v),
            ParamValue::Text(_) => None,
        }
    }
}
