use serde::Serialize;
use serde_json::{Map, Value};

use dgbv_core::dgbv::{AxiomReport, CheckStatus};
use dgbv_core::error::Error;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Core(#[from] Error),
}

impl CliError {
    /// Malformed input exits 2; everything the mathematics rejects exits 1.
    pub fn is_input(&self) -> bool {
        match self {
            CliError::Input(_) => true,
            CliError::Core(e) => matches!(
                e,
                Error::Parse(_)
                    | Error::Invalid(_)
                    | Error::SpaceMismatch(_)
                    | Error::Shape(_)
                    | Error::Grading(_)
                    | Error::OutOfRange(_)
            ),
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

/// A command's outcome: JSON fields plus the `--human` rendering.
pub struct Report {
    command: &'static str,
    pass: bool,
    fields: Map<String, Value>,
    lines: Vec<String>,
}

impl Report {
    pub fn new(command: &'static str) -> Self {
        Report { command, pass: true, fields: Map::new(), lines: Vec::new() }
    }

    pub fn passed(&self) -> bool {
        self.pass
    }

    pub fn fail(&mut self) {
        self.pass = false;
    }

    pub fn require(&mut self, ok: bool) {
        self.pass &= ok;
    }

    pub fn set(&mut self, key: &str, v: impl Serialize) {
        let v = serde_json::to_value(v).expect("report field serializes");
        self.fields.insert(key.to_string(), v);
    }

    pub fn line(&mut self, s: impl Into<String>) {
        self.lines.push(s.into());
    }

    pub fn axioms(&mut self, key: &str, title: &str, r: &AxiomReport) {
        self.require(r.all_pass());
        self.set(key, r);
        for c in &r.checks {
            let status = match c.status {
                CheckStatus::Pass => "pass".to_string(),
                CheckStatus::NotApplicable => "not applicable".to_string(),
                CheckStatus::Fail => format!("FAIL ({} violations)", c.violations),
            };
            self.line(format!("{title} {}: {status}", c.name));
            if let Some(w) = &c.witness {
                self.line(format!("  at ({}): {}", w.basis.join(", "), w.residual));
            }
        }
    }

    pub fn render(&self, human: bool) -> String {
        let status = if self.pass { "pass" } else { "fail" };
        if human {
            let mut out = format!("{}: {}\n", self.command, status.to_uppercase());
            for l in &self.lines {
                out.push_str(l);
                out.push('\n');
            }
            out
        } else {
            let mut m = Map::new();
            m.insert("command".into(), Value::from(self.command));
            m.insert("status".into(), Value::from(status));
            for (k, v) in &self.fields {
                m.insert(k.clone(), v.clone());
            }
            dgbv_core::io::to_json_rows(&Value::Object(m))
        }
    }
}
