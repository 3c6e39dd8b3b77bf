//! Mode machines whose states name views, variant sets, and mode timelines
//! over traces.

use std::collections::HashMap;

use crate::consistency::{
    check_specialization, check_view, CheckError, ConditionId, ConsistencyReport, Finding,
};
use crate::dsl::Model;
use crate::model::{Identifier, Span, View};
use crate::net::ResolvedNet;
use crate::scenario::{eval_condition, Condition};
use crate::sim::Trace;
use crate::value::Value;

#[derive(Debug, Clone, PartialEq)]
pub struct ModeState {
    pub name: Identifier,
    pub view: Identifier,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModeTransition {
    pub from: Identifier,
    pub to: Identifier,
    pub signal: Identifier,
    pub condition: Condition,
    pub span: Span,
}

/// A flat statechart. Transitions are tried in declaration order.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeMachine {
    pub name: Identifier,
    /// A view or a net.
    pub base: Identifier,
    pub states: Vec<ModeState>,
    pub transitions: Vec<ModeTransition>,
    pub initial: Identifier,
    pub initial_span: Span,
    pub span: Span,
}

impl ModeMachine {
    pub fn state(&self, name: &Identifier) -> Option<&ModeState> {
        self.states.iter().find(|s| s.name == *name)
    }
}

impl ModeTransition {
    pub fn label(&self) -> String {
        format!("{} -> {}", self.from, self.to)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Variant {
    pub name: Identifier,
    pub view: Identifier,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VariantSet {
    pub name: Identifier,
    pub feature: Identifier,
    pub variants: Vec<Variant>,
    pub span: Span,
}

fn view_on<'m>(
    model: &'m Model,
    name: &Identifier,
    artifact: &Identifier,
    net: &ResolvedNet,
) -> Result<&'m View, CheckError> {
    let view = model.view(name.as_str()).ok_or_else(|| CheckError::BaseMismatch {
        artifact: artifact.to_string(),
        expected: format!("a view on {}", net.name()),
        found: name.to_string(),
    })?;
    if view.base != *net.name() {
        return Err(CheckError::BaseMismatch {
            artifact: artifact.to_string(),
            expected: net.name().to_string(),
            found: view.base.to_string(),
        });
    }
    Ok(view)
}

/// Checks every mode view against `net` and that transitions watch signals
/// of the net. Findings name the mode machine and the mode or transition.
pub fn check_mode_machine(
    mm: &ModeMachine,
    model: &Model,
    net: &ResolvedNet,
) -> Result<ConsistencyReport, CheckError> {
    if mm.base != *net.name() {
        view_on(model, &mm.base, &mm.name, net)?;
    }
    let mut report = ConsistencyReport::default();
    for state in &mm.states {
        let view = view_on(model, &state.view, &mm.name, net)?;
        report.absorb(check_view(view, net)?.scoped(state.name.as_str()));
    }
    for t in &mm.transitions {
        if !net.carries_signal(&t.signal) {
            report.findings.push(Finding {
                condition: ConditionId::C4,
                subjects: vec![t.label()],
                message: format!(
                    "transition `{}` watches `{}`, which no connector of `{}` carries",
                    t.label(),
                    t.signal,
                    net.name()
                ),
                span: t.span.clone(),
            });
        }
    }
    let mut report = report.scoped(mm.name.as_str());
    report.normalize();
    Ok(report)
}

/// Checks every variant view as a specialization of the feature view.
pub fn check_variants(
    vs: &VariantSet,
    model: &Model,
    net: &ResolvedNet,
) -> Result<ConsistencyReport, CheckError> {
    let feature = view_on(model, &vs.feature, &vs.name, net)?;
    let mut report = ConsistencyReport::default();
    for v in &vs.variants {
        let view = view_on(model, &v.view, &vs.name, net)?;
        report.absorb(check_specialization(view, feature, net)?.scoped(v.name.as_str()));
    }
    let mut report = report.scoped(vs.name.as_str());
    report.normalize();
    Ok(report)
}

/// Mode changes over a trace, starting with the initial mode at step 0.
///
/// A signal's sample at a step is the last value it was given at or before
/// that step. From step 1 to the last step of the trace, the first outgoing
/// transition of the current mode whose condition holds on the watched
/// signal's (previous, current) samples fires. Conditions that cannot be
/// evaluated do not hold.
pub fn mode_timeline(mm: &ModeMachine, trace: &Trace) -> Vec<(u64, Identifier)> {
    let mut timeline = vec![(0, mm.initial.clone())];
    let Some(last) = trace.events.last().map(|e| e.step) else {
        return timeline;
    };
    let mut current = mm.initial.clone();
    let mut samples: HashMap<&Identifier, &Value> = HashMap::new();
    let mut next = 0;
    for step in 0..=last {
        let previous = samples.clone();
        while let Some(e) = trace.events.get(next).filter(|e| e.step <= step) {
            samples.insert(&e.signal, &e.value);
            next += 1;
        }
        if step == 0 {
            continue;
        }
        let fired = mm.transitions.iter().find(|t| {
            t.from == current
                && samples.get(&t.signal).is_some_and(|curr| {
                    eval_condition(&t.condition, previous.get(&t.signal).copied(), curr)
                        .unwrap_or(false)
                })
        });
        if let Some(t) = fired {
            if t.to != current {
                current = t.to.clone();
                timeline.push((step, current.clone()));
            }
        }
    }
    timeline
}
