//! Scenarios drawn as communication diagrams over a view, the signal
//! condition language, and compilation of scenarios into monitors.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::consistency::{check_view, CheckError, ConsistencyReport, ViewIndex};
use crate::model::{BlockPath, Connector, Identifier, LinkKind, Marker, Span, View, ViewBlock};
use crate::net::ResolvedNet;
use crate::value::Value;

/// One comparison of the condition language.
#[derive(Debug, Clone, PartialEq)]
pub enum Atom {
    /// `> v`
    Greater(Value),
    /// `>> v`: the signal crosses above `v` at this sample.
    BecomesGreater(Value),
    /// `== v`
    Equals(Value),
    /// `= v`: the signal changes to `v` at this sample.
    BecomesEqual(Value),
    /// `< v`
    Less(Value),
    /// `<< v`: the signal crosses below `v` at this sample.
    BecomesLess(Value),
    /// `: v -> w`
    Transition(Value, Value),
    /// `invalid`
    IsInvalid,
}

/// A single atom or a disjunction of at least two atoms.
#[derive(Debug, Clone, PartialEq)]
pub enum Condition {
    Atom(Atom),
    Or(Vec<Atom>),
}

impl Condition {
    /// Builds a condition from its atoms; one atom stays a plain atom.
    pub fn any(mut atoms: Vec<Atom>) -> Condition {
        assert!(!atoms.is_empty(), "condition needs an atom");
        if atoms.len() == 1 {
            Condition::Atom(atoms.pop().unwrap())
        } else {
            Condition::Or(atoms)
        }
    }

    pub fn atoms(&self) -> &[Atom] {
        match self {
            Condition::Atom(a) => std::slice::from_ref(a),
            Condition::Or(atoms) => atoms,
        }
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Atom::Greater(v) => write!(f, "> {v}"),
            Atom::BecomesGreater(v) => write!(f, ">> {v}"),
            Atom::Equals(v) => write!(f, "== {v}"),
            Atom::BecomesEqual(v) => write!(f, "= {v}"),
            Atom::Less(v) => write!(f, "< {v}"),
            Atom::BecomesLess(v) => write!(f, "<< {v}"),
            Atom::Transition(v, w) => write!(f, ": {v} -> {w}"),
            Atom::IsInvalid => f.write_str("invalid"),
        }
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, atom) in self.atoms().iter().enumerate() {
            if i > 0 {
                f.write_str(" | ")?;
            }
            write!(f, "{atom}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("cannot compare symbolic value `{value}` with a numeric operator")]
    TypeMismatch { value: String },
}

fn ordering(x: &Value, v: &Value) -> Result<Option<Ordering>, EvalError> {
    for side in [x, v] {
        if side.is_symbolic() {
            return Err(EvalError::TypeMismatch {
                value: side.to_string(),
            });
        }
    }
    Ok(x.numeric_cmp(v))
}

fn same_value(a: &Value, b: &Value) -> bool {
    match a.numeric_cmp(b) {
        Some(o) => o == Ordering::Equal,
        None => a == b && !a.is_numeric(),
    }
}

fn eval_atom(atom: &Atom, prev: Option<&Value>, curr: &Value) -> Result<bool, EvalError> {
    use Ordering::{Equal, Greater, Less};
    Ok(match atom {
        Atom::Greater(v) => ordering(curr, v)? == Some(Greater),
        Atom::Less(v) => ordering(curr, v)? == Some(Less),
        Atom::BecomesGreater(v) => {
            let now = ordering(curr, v)? == Some(Greater);
            match prev {
                Some(p) => now && matches!(ordering(p, v)?, Some(Less | Equal)),
                None => false,
            }
        }
        Atom::BecomesLess(v) => {
            let now = ordering(curr, v)? == Some(Less);
            match prev {
                Some(p) => now && matches!(ordering(p, v)?, Some(Greater | Equal)),
                None => false,
            }
        }
        Atom::Equals(v) => same_value(curr, v),
        Atom::BecomesEqual(v) => {
            prev.is_some_and(|p| !same_value(p, v)) && same_value(curr, v)
        }
        Atom::Transition(v, w) => prev.is_some_and(|p| same_value(p, v)) && same_value(curr, w),
        Atom::IsInvalid => *curr == Value::Invalid,
    })
}

/// Evaluates a condition on two successive samples of one signal. `prev` is
/// `None` at the first sample, where no "becomes" form can hold.
///
/// Ordering comparisons against `invalid` or a number with a different unit
/// tag are false. Ordering comparisons involving a symbolic value are a
/// type error.
pub fn eval_condition(
    cond: &Condition,
    prev: Option<&Value>,
    curr: &Value,
) -> Result<bool, EvalError> {
    let mut error = None;
    for atom in cond.atoms() {
        match eval_atom(atom, prev, curr) {
            Ok(true) => return Ok(true),
            Ok(false) => {}
            Err(e) => {
                error.get_or_insert(e);
            }
        }
    }
    match error {
        Some(e) => Err(e),
        None => Ok(false),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Policy {
    /// Every observed communication must be in the diagram.
    Complete,
    /// Communication between blocks of the diagram must be in the diagram.
    Visible,
    /// Anything else may happen in between.
    Free,
}

impl Policy {
    pub fn keyword(self) -> &'static str {
        match self {
            Policy::Complete => "complete",
            Policy::Visible => "visible",
            Policy::Free => "free",
        }
    }

    pub const ALL: [Policy; 3] = [Policy::Complete, Policy::Visible, Policy::Free];
}

#[derive(Debug, Clone, PartialEq)]
pub struct Interaction {
    pub seq: u32,
    pub trigger: bool,
    pub source: BlockPath,
    pub target: BlockPath,
    pub signal: Identifier,
    pub condition: Condition,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: Identifier,
    pub base: Identifier,
    pub policy: Policy,
    /// Sorted by sequence number.
    pub interactions: Vec<Interaction>,
    pub span: Span,
}

/// A scenario participant, identified through the base view when it is
/// shown there and through the net otherwise.
struct Participant {
    reference: BlockPath,
    marker: Marker,
    /// The reference used to reach the net (the view block's reference when
    /// the participant is shown in the base view).
    net_reference: BlockPath,
    in_base_view: bool,
    span: Span,
}

fn participants(sc: &Scenario, base_view: &View, net: &ResolvedNet) -> Vec<Participant> {
    let index = ViewIndex::new(base_view, net);
    let mut out: Vec<Participant> = Vec::new();
    for inter in &sc.interactions {
        for end in [&inter.source, &inter.target] {
            if out.iter().any(|p| p.reference == *end) {
                continue;
            }
            let participant = match index.lookup(end) {
                Some(i) => {
                    let block = index.blocks[i].block;
                    Participant {
                        reference: end.clone(),
                        marker: block.marker,
                        net_reference: block.reference.clone(),
                        in_base_view: true,
                        span: inter.span.clone(),
                    }
                }
                None => Participant {
                    reference: end.clone(),
                    marker: Marker::Plain,
                    net_reference: end.clone(),
                    in_base_view: false,
                    span: inter.span.clone(),
                },
            };
            out.push(participant);
        }
    }
    out
}

fn check_bases(sc: &Scenario, base_view: &View, net: &ResolvedNet) -> Result<(), CheckError> {
    if sc.base != base_view.name {
        return Err(CheckError::BaseMismatch {
            artifact: sc.name.to_string(),
            expected: base_view.name.to_string(),
            found: sc.base.to_string(),
        });
    }
    if base_view.base != *net.name() {
        return Err(CheckError::BaseMismatch {
            artifact: base_view.name.to_string(),
            expected: net.name().to_string(),
            found: base_view.base.to_string(),
        });
    }
    Ok(())
}

/// The view a scenario draws: its participants, nested as in the net, and
/// one signal link per interaction. Also returns notes on participants that
/// the base view does not show.
pub fn induced_view(
    sc: &Scenario,
    base_view: &View,
    net: &ResolvedNet,
) -> Result<(View, Vec<String>), CheckError> {
    check_bases(sc, base_view, net)?;
    let parts = participants(sc, base_view, net);
    let mut notes = Vec::new();
    for p in &parts {
        if !p.in_base_view {
            notes.push(format!(
                "`{}` is not shown in `{}`; resolved against `{}`",
                p.reference,
                base_view.name,
                net.name()
            ));
        }
    }

    // Participants form a forest under the net's containment: the parent of
    // a participant is its deepest participant ancestor.
    let resolved: Vec<Option<BlockPath>> = parts
        .iter()
        .map(|p| match p.marker {
            Marker::Env => None,
            _ => net.resolve(&p.net_reference).ok(),
        })
        .collect();
    let closure = net.closure();
    let parent_of: Vec<Option<usize>> = (0..parts.len())
        .map(|i| {
            let me = resolved[i].as_ref()?;
            (0..parts.len())
                .filter(|&j| j != i)
                .filter_map(|j| resolved[j].as_ref().map(|pj| (j, pj)))
                .filter(|(_, pj)| closure.contains(pj, me))
                .max_by_key(|(_, pj)| pj.len())
                .map(|(j, _)| j)
        })
        .collect();

    fn build(
        parts: &[Participant],
        parent_of: &[Option<usize>],
        parent: Option<usize>,
    ) -> Vec<ViewBlock> {
        (0..parts.len())
            .filter(|&i| parent_of[i] == parent)
            .map(|i| {
                let mut b = ViewBlock::new(parts[i].marker, parts[i].net_reference.clone());
                b.span = parts[i].span.clone();
                b.children = build(parts, parent_of, Some(i));
                b
            })
            .collect()
    }
    let blocks = build(&parts, &parent_of, None);

    let label_of = |r: &BlockPath| -> BlockPath {
        parts
            .iter()
            .find(|p| p.reference == *r)
            .map(|p| p.net_reference.clone())
            .expect("participant")
    };
    let connectors = sc
        .interactions
        .iter()
        .map(|i| Connector {
            kind: LinkKind::Signal,
            signals: vec![i.signal.clone()],
            source: label_of(&i.source),
            target: label_of(&i.target),
            span: i.span.clone(),
        })
        .collect();
    let view = View {
        name: sc.name.clone(),
        kind: None,
        base: net.name().clone(),
        blocks,
        connectors,
        span: sc.span.clone(),
    };
    Ok((view, notes))
}

/// Checks a scenario as a view on the net: every participant must exist
/// and every interaction's signal must be carried by a matching connector.
pub fn check_scenario(
    sc: &Scenario,
    base_view: &View,
    net: &ResolvedNet,
) -> Result<ConsistencyReport, CheckError> {
    let (view, notes) = induced_view(sc, base_view, net)?;
    let mut report = check_view(&view, net)?;
    report.notes.splice(0..0, notes);
    report.normalize();
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MonitorError {
    #[error("scenario `{0}` has no interactions")]
    EmptyScenario(String),
    #[error("scenario `{0}` has no trigger interaction")]
    MissingTrigger(String),
    #[error("scenario participant `{0}` does not identify a block")]
    Unresolved(String),
    #[error(transparent)]
    Base(#[from] CheckError),
}

/// Interaction as seen by a monitor, with endpoints as net paths.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpectedInteraction {
    pub seq: u32,
    pub trigger: bool,
    pub source: BlockPath,
    pub target: BlockPath,
    pub signal: Identifier,
    pub condition: Condition,
}

/// Progress automaton for one scenario.
///
/// State `i` (for `i` in `0..=n`) means the first `i` interactions have been
/// observed in order; state `n` is the only accepting state.
#[derive(Debug, Clone, PartialEq)]
pub struct Monitor {
    pub scenario: Identifier,
    pub policy: Policy,
    pub expected: Vec<ExpectedInteraction>,
    /// Blocks that appear in some interaction.
    pub scope: BTreeSet<BlockPath>,
    /// Index of the first trigger interaction.
    pub first_trigger: usize,
}

impl Monitor {
    pub fn state_count(&self) -> usize {
        self.expected.len() + 1
    }

    pub fn accepting_state(&self) -> usize {
        self.expected.len()
    }

    /// Interaction expected in `state`, if it is not accepting.
    pub fn expected_at(&self, state: usize) -> Option<&ExpectedInteraction> {
        self.expected.get(state)
    }

    /// Is `endpoint` compatible with the expected `view_end`: equal, or
    /// below it when the exact block is not itself a participant.
    pub fn endpoint_matches(&self, view_end: &BlockPath, endpoint: &BlockPath) -> bool {
        view_end == endpoint
            || (view_end.is_strict_prefix_of(endpoint) && !self.scope.contains(endpoint))
    }

    /// True when `endpoint` is a participant or lies inside one.
    pub fn in_scope(&self, endpoint: &BlockPath) -> bool {
        self.scope
            .iter()
            .any(|s| s == endpoint || s.is_strict_prefix_of(endpoint))
    }

    pub fn matches(
        &self,
        expected: &ExpectedInteraction,
        source: &BlockPath,
        target: &BlockPath,
        signal: &Identifier,
        prev: Option<&Value>,
        value: &Value,
    ) -> bool {
        expected.signal == *signal
            && self.endpoint_matches(&expected.source, source)
            && self.endpoint_matches(&expected.target, target)
            && eval_condition(&expected.condition, prev, value).unwrap_or(false)
    }
}

/// Derives the monitor for a scenario. Participants are resolved through the
/// base view, then the net.
pub fn compile_monitor(
    sc: &Scenario,
    base_view: &View,
    net: &ResolvedNet,
) -> Result<Monitor, MonitorError> {
    check_bases(sc, base_view, net)?;
    if sc.interactions.is_empty() {
        return Err(MonitorError::EmptyScenario(sc.name.to_string()));
    }
    let first_trigger = sc
        .interactions
        .iter()
        .position(|i| i.trigger)
        .ok_or_else(|| MonitorError::MissingTrigger(sc.name.to_string()))?;

    let parts = participants(sc, base_view, net);
    let path_of = |r: &BlockPath| -> Result<BlockPath, MonitorError> {
        let p = parts.iter().find(|p| p.reference == *r).expect("participant");
        match p.marker {
            Marker::Env => Ok(p.net_reference.clone()),
            _ => net
                .resolve(&p.net_reference)
                .map_err(|_| MonitorError::Unresolved(r.to_string())),
        }
    };
    let mut expected = Vec::with_capacity(sc.interactions.len());
    let mut scope = BTreeSet::new();
    for inter in &sc.interactions {
        let source = path_of(&inter.source)?;
        let target = path_of(&inter.target)?;
        scope.insert(source.clone());
        scope.insert(target.clone());
        expected.push(ExpectedInteraction {
            seq: inter.seq,
            trigger: inter.trigger,
            source,
            target,
            signal: inter.signal.clone(),
            condition: inter.condition.clone(),
        });
    }
    Ok(Monitor {
        scenario: sc.name.clone(),
        policy: sc.policy,
        expected,
        scope,
        first_trigger,
    })
}
