//! Text and JSON renderings of check reports, verdicts and parse errors.
//!
//! The JSON documents are described by `docs/report.schema.json`.

use serde::Serialize;

use crate::consistency::{Consistency, Finding};
use crate::dsl::{ErrorCode, ParseErrors};
use crate::net::Diagnostic;
use crate::pipeline::{ArtifactResult, CheckOutcome, RunOutcome};
use crate::sim::{FailureKind, Outcome};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
pub struct FindingJson {
    pub condition: String,
    pub subjects: Vec<String>,
    pub message: String,
    pub file: String,
    pub line: u32,
}

impl From<&Finding> for FindingJson {
    fn from(f: &Finding) -> Self {
        FindingJson {
            condition: f.condition.to_string(),
            subjects: f.subjects.clone(),
            message: f.message.clone(),
            file: f.span.file.to_string(),
            line: f.span.line,
        }
    }
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
pub struct DiagnosticJson {
    pub rule: String,
    pub path: String,
    pub message: String,
    pub file: String,
    pub line: u32,
}

impl From<&Diagnostic> for DiagnosticJson {
    fn from(d: &Diagnostic) -> Self {
        DiagnosticJson {
            rule: d.rule.as_str().to_string(),
            path: d.path.clone(),
            message: d.message.clone(),
            file: d.span.file.to_string(),
            line: d.span.line,
        }
    }
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ArtifactJson {
    pub kind: String,
    pub name: String,
    pub verdict: Consistency,
    pub findings: Vec<FindingJson>,
    pub diagnostics: Vec<DiagnosticJson>,
    pub notes: Vec<String>,
    pub error: Option<String>,
}

fn verdict_of(consistent: bool) -> Consistency {
    if consistent {
        Consistency::Consistent
    } else {
        Consistency::Inconsistent
    }
}

impl From<&ArtifactResult> for ArtifactJson {
    fn from(a: &ArtifactResult) -> Self {
        ArtifactJson {
            kind: a.kind.to_string(),
            name: a.name.clone(),
            verdict: verdict_of(a.is_consistent()),
            findings: a.report.findings.iter().map(FindingJson::from).collect(),
            diagnostics: a.diagnostics.iter().map(DiagnosticJson::from).collect(),
            notes: a.report.notes.clone(),
            error: a.error.clone(),
        }
    }
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
pub struct CheckJson {
    pub schema_version: u32,
    pub command: &'static str,
    pub verdict: Consistency,
    pub findings: Vec<FindingJson>,
    pub artifacts: Vec<ArtifactJson>,
}

pub fn check_json(outcome: &CheckOutcome) -> CheckJson {
    CheckJson {
        schema_version: SCHEMA_VERSION,
        command: "check",
        verdict: verdict_of(outcome.is_consistent()),
        findings: outcome
            .artifacts
            .iter()
            .flat_map(|a| a.report.findings.iter().map(FindingJson::from))
            .collect(),
        artifacts: outcome.artifacts.iter().map(ArtifactJson::from).collect(),
    }
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
pub struct RunJson {
    pub schema_version: u32,
    pub command: &'static str,
    pub scenario: String,
    pub outcome: Outcome,
    pub reason: String,
    pub failure: Option<FailureKind>,
    pub failing_step: Option<u64>,
    pub matched: usize,
    pub total: usize,
    pub events: usize,
}

pub fn run_json(run: &RunOutcome) -> RunJson {
    let v = &run.verdict;
    RunJson {
        schema_version: SCHEMA_VERSION,
        command: "run",
        scenario: run.scenario.clone(),
        outcome: v.outcome,
        reason: v.reason.clone(),
        failure: v.failure,
        failing_step: v.failing_step,
        matched: v.matched,
        total: v.total,
        events: run.trace.len(),
    }
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ParseErrorJson {
    pub code: ErrorCode,
    pub message: String,
    pub file: String,
    pub line: u32,
    pub column: u32,
    pub expected: Vec<String>,
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ErrorJson {
    pub schema_version: u32,
    pub command: String,
    pub error: &'static str,
    pub message: String,
    pub errors: Vec<ParseErrorJson>,
}

pub fn parse_errors_json(command: &str, errors: &ParseErrors) -> ErrorJson {
    ErrorJson {
        schema_version: SCHEMA_VERSION,
        command: command.to_string(),
        error: "parse",
        message: format!("{} parse error(s)", errors.0.len()),
        errors: errors
            .0
            .iter()
            .map(|e| ParseErrorJson {
                code: e.code,
                message: e.message.clone(),
                file: e.span.file.to_string(),
                line: e.span.line,
                column: e.span.column,
                expected: e.expected.clone(),
            })
            .collect(),
    }
}

pub fn usage_error_json(command: &str, message: &str) -> ErrorJson {
    ErrorJson {
        schema_version: SCHEMA_VERSION,
        command: command.to_string(),
        error: "usage",
        message: message.to_string(),
        errors: Vec::new(),
    }
}

/// Colors for terminal output. `plain` leaves text untouched.
#[derive(Clone, Copy)]
pub struct Style {
    pub color: bool,
}

impl Style {
    pub fn plain() -> Self {
        Style { color: false }
    }

    fn paint(self, code: &str, text: &str) -> String {
        if self.color {
            format!("\x1b[{code}m{text}\x1b[0m")
        } else {
            text.to_string()
        }
    }

    pub fn good(self, text: &str) -> String {
        self.paint("32", text)
    }

    pub fn bad(self, text: &str) -> String {
        self.paint("31", text)
    }

    pub fn warn(self, text: &str) -> String {
        self.paint("33", text)
    }
}

fn location(file: &str, line: u32) -> String {
    if file.is_empty() {
        format!("line {line}")
    } else {
        format!("{file}:{line}")
    }
}

pub fn check_text(outcome: &CheckOutcome, style: Style) -> String {
    let mut out = String::new();
    for a in &outcome.artifacts {
        let verdict = if a.is_consistent() {
            style.good("CONSISTENT")
        } else {
            style.bad("INCONSISTENT")
        };
        out.push_str(&format!("{} {}: {verdict}\n", a.kind, a.name));
        if let Some(e) = &a.error {
            out.push_str(&format!("  error: {e}\n"));
        }
        for d in &a.diagnostics {
            out.push_str(&format!(
                "  {} {} ({}): {}\n",
                d.rule.as_str(),
                d.path,
                location(&d.span.file, d.span.line),
                d.message
            ));
        }
        for f in &a.report.findings {
            out.push_str(&format!(
                "  {} [{}] ({}): {}\n",
                f.condition,
                f.subjects.join(", "),
                location(&f.span.file, f.span.line),
                f.message
            ));
        }
        for n in &a.report.notes {
            out.push_str(&format!("  note: {n}\n"));
        }
    }
    let failing = outcome.artifacts.iter().filter(|a| !a.is_consistent()).count();
    if failing == 0 {
        out.push_str(&format!(
            "{} ({} artifacts)\n",
            style.good("CONSISTENT"),
            outcome.artifacts.len()
        ));
    } else {
        out.push_str(&format!(
            "{} ({failing} of {} artifacts)\n",
            style.bad("INCONSISTENT"),
            outcome.artifacts.len()
        ));
    }
    out
}

pub fn run_text(run: &RunOutcome, style: Style) -> String {
    let v = &run.verdict;
    let outcome = match v.outcome {
        Outcome::Pass => style.good("PASS"),
        Outcome::Fail => style.bad("FAIL"),
        Outcome::Inconclusive => style.warn("INCONCLUSIVE"),
    };
    let mut out = format!(
        "scenario {}: {outcome} ({} of {} interactions matched, {} events)\n  {}\n",
        run.scenario,
        v.matched,
        v.total,
        run.trace.len(),
        v.reason
    );
    if let Some(step) = v.failing_step {
        out.push_str(&format!("  failing step: {step}\n"));
    }
    out
}

pub fn parse_errors_text(errors: &ParseErrors) -> String {
    let mut out = String::new();
    for e in &errors.0 {
        out.push_str(&format!("error: {e}\n"));
        if !e.expected.is_empty() {
            out.push_str(&format!("  expected: {}\n", e.expected.join(", ")));
        }
    }
    out
}
