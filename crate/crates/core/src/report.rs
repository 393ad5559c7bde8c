//! Check reports: one entry per executed check, with machine (JSON) and
//! human renderings. Reports contain no timestamps, hostnames or absolute
//! paths, so identical runs serialize byte-identically.

use serde::Serialize;

/// How a check's measured value relates to its threshold.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckKind {
    /// Pass iff `measured <= threshold`.
    UpperBound,
    /// Pass iff `measured >= threshold`.
    LowerBound,
    /// Recorded value with no gate; always passes.
    Info,
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub kind: CheckKind,
    pub measured: f64,
    pub threshold: Option<f64>,
    pub pass: bool,
}

/// Aggregated result of one command run. `overall_pass` is the conjunction
/// of the gated checks; info entries never fail.
#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub scenario: String,
    pub command: String,
    pub seed: u64,
    pub overall_pass: bool,
    pub checks: Vec<Check>,
    pub notes: Vec<String>,
}

impl Report {
    pub fn new(scenario: &str, command: &str, seed: u64) -> Self {
        Report {
            scenario: scenario.to_string(),
            command: command.to_string(),
            seed,
            overall_pass: true,
            checks: Vec::new(),
            notes: Vec::new(),
        }
    }

    /// Gated check: pass iff `measured <= threshold`.
    pub fn push_upper(&mut self, name: &str, measured: f64, threshold: f64) {
        let pass = measured <= threshold;
        self.overall_pass &= pass;
        self.checks.push(Check {
            name: name.to_string(),
            kind: CheckKind::UpperBound,
            measured,
            threshold: Some(threshold),
            pass,
        });
    }

    /// Gated check: pass iff `measured >= threshold`.
    pub fn push_lower(&mut self, name: &str, measured: f64, threshold: f64) {
        let pass = measured >= threshold;
        self.overall_pass &= pass;
        self.checks.push(Check {
            name: name.to_string(),
            kind: CheckKind::LowerBound,
            measured,
            threshold: Some(threshold),
            pass,
        });
    }

    /// Ungated recorded value.
    pub fn push_info(&mut self, name: &str, measured: f64) {
        self.checks.push(Check {
            name: name.to_string(),
            kind: CheckKind::Info,
            measured,
            threshold: None,
            pass: true,
        });
    }

    pub fn push_note(&mut self, note: impl Into<String>) {
        self.notes.push(note.into());
    }

    pub fn find(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serialization");
        s.push('\n');
        s
    }

    /// Human-readable rendering, one line per check plus a verdict line.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("scenario: {}  command: {}  seed: {}\n", self.scenario, self.command, self.seed));
        for check in &self.checks {
            match check.kind {
                CheckKind::UpperBound => out.push_str(&format!(
                    "[{}] {}: {:.3e} <= {:.3e}\n",
                    if check.pass { "PASS" } else { "FAIL" },
                    check.name,
                    check.measured,
                    check.threshold.unwrap_or(f64::NAN),
                )),
                CheckKind::LowerBound => out.push_str(&format!(
                    "[{}] {}: {:.3e} >= {:.3e}\n",
                    if check.pass { "PASS" } else { "FAIL" },
                    check.name,
                    check.measured,
                    check.threshold.unwrap_or(f64::NAN),
                )),
                CheckKind::Info => {
                    out.push_str(&format!("[info] {}: {:.3e}\n", check.name, check.measured))
                }
            }
        }
        for note in &self.notes {
            out.push_str(&format!("note: {note}\n"));
        }
        out.push_str(&format!("overall: {}\n", if self.overall_pass { "PASS" } else { "FAIL" }));
        out
    }
}
