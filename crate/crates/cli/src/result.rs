use qpreserve::{Error, ToleranceConfig};
use serde::Serialize;
use serde_json::{json, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Ok,
    Violated,
    Error,
}

impl Status {
    pub fn exit_code(self) -> u8 {
        match self {
            Status::Ok => 0,
            Status::Violated => 1,
            Status::Error => 2,
        }
    }
}

/// Envelope printed by every subcommand.
#[derive(Debug, Clone, Serialize)]
pub struct CommandResult {
    pub status: Status,
    pub report: Value,
    pub diagnostics: Vec<String>,
    pub tolerances: ToleranceConfig,
}

impl CommandResult {
    pub fn new(status: Status, report: Value, tol: &ToleranceConfig) -> Self {
        Self {
            status,
            report,
            diagnostics: Vec::new(),
            tolerances: *tol,
        }
    }

    pub fn ok(report: Value, tol: &ToleranceConfig) -> Self {
        Self::new(Status::Ok, report, tol)
    }

    /// `ok` when `holds`, `violated` otherwise.
    pub fn verdict(holds: bool, report: Value, tol: &ToleranceConfig) -> Self {
        Self::new(if holds { Status::Ok } else { Status::Violated }, report, tol)
    }

    pub fn note(mut self, line: impl Into<String>) -> Self {
        self.diagnostics.push(line.into());
        self
    }

    pub fn error(err: &Error, tol: &ToleranceConfig) -> Self {
        Self::new(Status::Error, error_report(err), tol).note(err.to_string())
    }
}

/// Machine-readable payload for an error, carrying its residuals where it has any.
fn error_report(err: &Error) -> Value {
    let message = err.to_string();
    match err {
        Error::NotBistochastic {
            trace_residual,
            unital_residual,
        } => json!({
            "error": "not_bistochastic",
            "trace_residual": trace_residual,
            "unital_residual": unital_residual,
            "message": message,
        }),
        Error::NotStochastic(r) => json!({ "error": "not_stochastic", "trace_residual": r, "message": message }),
        Error::StructureMismatch { check, residual } => json!({
            "error": "structure_mismatch",
            "check": check,
            "residual": residual,
            "message": message,
        }),
        Error::AmbiguousGrouping(attempts) => {
            json!({ "error": "ambiguous_grouping", "attempts": attempts, "message": message })
        }
        Error::NotAnAlgebra(r) => json!({ "error": "not_an_algebra", "residual": r, "message": message }),
        Error::SupportViolation(r) => {
            json!({ "error": "support_violation", "residual": r, "message": message })
        }
        _ => json!({ "error": "invalid_input", "message": message }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes() {
        assert_eq!(Status::Ok.exit_code(), 0);
        assert_eq!(Status::Violated.exit_code(), 1);
        assert_eq!(Status::Error.exit_code(), 2);
    }

    #[test]
    fn error_payload_carries_residuals() {
        let tol = ToleranceConfig::default();
        let r = CommandResult::error(
            &Error::NotBistochastic {
                trace_residual: 0.0,
                unital_residual: 0.25,
            },
            &tol,
        );
        assert_eq!(r.status, Status::Error);
        assert_eq!(r.report["error"], "not_bistochastic");
        assert_eq!(r.report["unital_residual"], 0.25);
        assert_eq!(r.diagnostics.len(), 1);
        let v = serde_json::to_value(&r).unwrap();
        assert_eq!(v["status"], "error");
    }

    #[test]
    fn verdict_maps_to_status() {
        let tol = ToleranceConfig::default();
        assert_eq!(CommandResult::verdict(true, Value::Null, &tol).status, Status::Ok);
        assert_eq!(CommandResult::verdict(false, Value::Null, &tol).status, Status::Violated);
    }
}
