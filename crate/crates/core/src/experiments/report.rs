use super::config::ExperimentId;
use serde::Serialize;
use std::collections::BTreeMap;
use std::fmt;

/// Acceptance rule for one measured value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Tolerance {
    /// `|x - target| ≤ abs`.
    Abs { target: f64, abs: f64 },
    /// `|x / target - 1| ≤ rel`.
    Rel { target: f64, rel: f64 },
    AtMost { bound: f64 },
    AtLeast { bound: f64 },
    /// Strictly above.
    Above { bound: f64 },
    Range { lo: f64, hi: f64 },
}

impl Tolerance {
    pub fn check(&self, x: f64) -> bool {
        if !x.is_finite() {
            return false;
        }
        match *self {
            Self::Abs { target, abs } => (x - target).abs() <= abs,
            Self::Rel { target, rel } => (x / target - 1.0).abs() <= rel,
            Self::AtMost { bound } => x <= bound,
            Self::AtLeast { bound } => x >= bound,
            Self::Above { bound } => x > bound,
            Self::Range { lo, hi } => (lo..=hi).contains(&x),
        }
    }
}

impl fmt::Display for Tolerance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Self::Abs { target, abs } => write!(f, "|x - {target:.6}| <= {abs:e}"),
            Self::Rel { target, rel } => write!(f, "|x/{target:.6} - 1| <= {rel}"),
            Self::AtMost { bound } => write!(f, "x <= {bound}"),
            Self::AtLeast { bound } => write!(f, "x >= {bound}"),
            Self::Above { bound } => write!(f, "x > {bound}"),
            Self::Range { lo, hi } => write!(f, "{lo} <= x <= {hi}"),
        }
    }
}

/// A measured value with the rule it was checked against.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Criterion {
    pub name: String,
    pub measured: f64,
    pub tolerance: Tolerance,
    pub pass: bool,
}

impl Criterion {
    pub fn new(name: impl Into<String>, measured: f64, tolerance: Tolerance) -> Self {
        Self { name: name.into(), measured, pass: tolerance.check(measured), tolerance }
    }
}

/// Machine-readable outcome of one experiment.
#[derive(Debug, Clone, Serialize)]
pub struct ExperimentReport {
    pub id: ExperimentId,
    pub title: String,
    pub inputs: BTreeMap<String, String>,
    pub criteria: Vec<Criterion>,
    pub runtime_s: f64,
    pub artifacts: Vec<String>,
    pub pass: bool,
}

impl ExperimentReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn failures(&self) -> impl Iterator<Item = &Criterion> {
        self.criteria.iter().filter(|c| !c.pass)
    }

    /// One line per criterion.
    pub fn summary(&self) -> String {
        let mut s = format!(
            "{} {} ({}): {}\n",
            self.id,
            self.title,
            if self.pass { "PASS" } else { "FAIL" },
            format_args!("{:.2} s", self.runtime_s)
        );
        for c in &self.criteria {
            s.push_str(&format!(
                "  [{}] {}: {:.6e}  ({})\n",
                if c.pass { "pass" } else { "FAIL" },
                c.name,
                c.measured,
                c.tolerance
            ));
        }
        s
    }
}
