//! Whole-model checking and scenario runs, as used by the command line.

use std::collections::HashMap;

use thiserror::Error;

use crate::consistency::{check_specialization, check_view, CheckError, ConsistencyReport};
use crate::dsl::{Element, Model};
use crate::model::ViewKind;
use crate::modes::{check_mode_machine, check_variants};
use crate::net::{Diagnostic, ResolvedNet};
use crate::scenario::{check_scenario, compile_monitor, MonitorError};
use crate::sim::{run_monitor, run_simulation, SimError, StubRule, Trace, Verdict};

/// The result of checking one artifact of a model.
#[derive(Debug, Clone)]
pub struct ArtifactResult {
    pub kind: &'static str,
    pub name: String,
    pub report: ConsistencyReport,
    pub diagnostics: Vec<Diagnostic>,
    /// Set when the artifact could not be checked at all.
    pub error: Option<String>,
}

impl ArtifactResult {
    fn new(kind: &'static str, name: String) -> Self {
        ArtifactResult {
            kind,
            name,
            report: ConsistencyReport::default(),
            diagnostics: Vec::new(),
            error: None,
        }
    }

    pub fn is_consistent(&self) -> bool {
        self.report.is_consistent() && self.diagnostics.is_empty() && self.error.is_none()
    }
}

#[derive(Debug, Clone, Default)]
pub struct CheckOutcome {
    pub artifacts: Vec<ArtifactResult>,
}

impl CheckOutcome {
    pub fn is_consistent(&self) -> bool {
        self.artifacts.iter().all(ArtifactResult::is_consistent)
    }
}

/// Resolved nets of a model, keyed by name.
pub struct Nets(HashMap<String, ResolvedNet>);

impl Nets {
    pub fn new(model: &Model) -> Self {
        Nets(
            model
                .nets()
                .map(|n| (n.name.to_string(), ResolvedNet::new(n)))
                .collect(),
        )
    }

    pub fn get(&self, name: &str) -> Option<&ResolvedNet> {
        self.0.get(name)
    }

    fn for_element(&self, model: &Model, e: &Element) -> Option<&ResolvedNet> {
        model.base_net(e).and_then(|n| self.get(n.name.as_str()))
    }
}

fn settle(
    result: &mut ArtifactResult,
    report: Result<ConsistencyReport, CheckError>,
) {
    match report {
        Ok(mut r) => {
            r.normalize();
            result.report = r;
        }
        Err(e) => result.error = Some(e.to_string()),
    }
}

/// Validates every net and checks every view, declared specialization,
/// scenario, mode machine, variant set and stub set of a scoped model.
pub fn check_model(model: &Model) -> CheckOutcome {
    let nets = Nets::new(model);
    let mut out = CheckOutcome::default();
    for e in model.elements() {
        let name = e.name().to_string();
        let net = nets.for_element(model, e);
        let Some(net) = net else {
            let mut r = ArtifactResult::new(e.keyword(), name);
            r.error = Some("no base net".to_string());
            out.artifacts.push(r);
            continue;
        };
        match e {
            Element::Net(_) => {
                let mut r = ArtifactResult::new("net", name);
                r.diagnostics = net.diagnostics().to_vec();
                out.artifacts.push(r);
            }
            Element::View(v) => {
                let mut r = ArtifactResult::new("view", name.clone());
                settle(&mut r, check_view(v, net));
                out.artifacts.push(r);
                if let Some(ViewKind::Variant { of }) = &v.kind {
                    let mut r = ArtifactResult::new("specialization", format!("{name} of {of}"));
                    match model.view(of.as_str()) {
                        Some(base) => settle(&mut r, check_specialization(v, base, net)),
                        None => r.error = Some(format!("no view named `{of}`")),
                    }
                    out.artifacts.push(r);
                }
            }
            Element::Scenario(s) => {
                let mut r = ArtifactResult::new("scenario", name);
                match model.view(s.base.as_str()) {
                    Some(base) => settle(&mut r, check_scenario(s, base, net)),
                    None => r.error = Some(format!("no view named `{}`", s.base)),
                }
                out.artifacts.push(r);
            }
            Element::Modes(m) => {
                let mut r = ArtifactResult::new("modes", name);
                settle(&mut r, check_mode_machine(m, model, net));
                out.artifacts.push(r);
            }
            Element::Variants(vs) => {
                let mut r = ArtifactResult::new("variants", name);
                settle(&mut r, check_variants(vs, model, net));
                out.artifacts.push(r);
            }
            Element::Stubs(s) => {
                let mut r = ArtifactResult::new("stubs", name);
                if let Err(err) = run_simulation(net, &s.rules, &[], 0) {
                    r.error = Some(err.to_string());
                }
                out.artifacts.push(r);
            }
        }
    }
    out
}

pub enum RunInput {
    /// A recorded trace, replayed as is.
    Trace(Trace),
    /// Stimuli driving a simulation of the scenario's net.
    Stimuli { stimuli: Trace, horizon: u64 },
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub scenario: String,
    pub verdict: Verdict,
    /// The trace the monitor saw, with qualified endpoints.
    pub trace: Trace,
}

#[derive(Debug, Error)]
pub enum RunError {
    #[error("no scenario named `{0}`")]
    UnknownScenario(String),
    #[error("scenario `{name}` is not consistent with its base view")]
    Inconsistent {
        name: String,
        report: ConsistencyReport,
    },
    #[error("{0}")]
    Check(#[from] CheckError),
    #[error("{0}")]
    Monitor(#[from] MonitorError),
    #[error("{0}")]
    Sim(#[from] SimError),
}

/// Stub rules of every stub set declared on `net`.
pub fn stubs_for(model: &Model, net: &str) -> Vec<StubRule> {
    model
        .stub_sets()
        .filter(|s| s.base == net)
        .flat_map(|s| s.rules.iter().cloned())
        .collect()
}

/// Checks the scenario, compiles its monitor and replays the input.
pub fn run(model: &Model, scenario: &str, input: RunInput) -> Result<RunOutcome, RunError> {
    let sc = model
        .scenario(scenario)
        .ok_or_else(|| RunError::UnknownScenario(scenario.to_string()))?;
    let base_view = model
        .view(sc.base.as_str())
        .ok_or_else(|| RunError::UnknownScenario(scenario.to_string()))?;
    let net_model = model
        .net(base_view.base.as_str())
        .ok_or_else(|| RunError::UnknownScenario(scenario.to_string()))?;
    let net = ResolvedNet::new(net_model);
    let report = check_scenario(sc, base_view, &net)?;
    if !report.is_consistent() {
        return Err(RunError::Inconsistent {
            name: scenario.to_string(),
            report,
        });
    }
    let monitor = compile_monitor(sc, base_view, &net)?;
    let trace = match input {
        RunInput::Trace(t) => t.qualified(&net),
        RunInput::Stimuli { stimuli, horizon } => run_simulation(
            &net,
            &stubs_for(model, net.name().as_str()),
            &stimuli.events,
            horizon,
        )?,
    };
    let verdict = run_monitor(&monitor, &trace);
    Ok(RunOutcome {
        scenario: scenario.to_string(),
        verdict,
        trace,
    })
}
