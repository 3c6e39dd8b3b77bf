//! Traces, a synchronous executor for nets with rule-based block stubs, and
//! the monitor runner.

use std::collections::HashMap;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::model::{BlockPath, Identifier, Span};
use crate::net::{ResolvedConnector, ResolvedNet};
use crate::scenario::{eval_condition, Condition, Monitor, Policy};
use crate::value::Value;

/// Source name of stimuli injected by the environment.
pub const ENV_SOURCE: &str = "ENV";

#[derive(Debug, Clone, PartialEq)]
pub struct TraceEvent {
    pub step: u64,
    pub source: BlockPath,
    pub target: BlockPath,
    pub signal: Identifier,
    pub value: Value,
}

impl TraceEvent {
    /// Convenience constructor; panics on malformed names.
    pub fn new(step: u64, source: &str, target: &str, signal: &str, value: Value) -> Self {
        TraceEvent {
            step,
            source: source.parse().expect("source path"),
            target: target.parse().expect("target path"),
            signal: Identifier::new(signal).expect("signal name"),
            value,
        }
    }
}

impl fmt::Display for TraceEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {} -> {} {} {}",
            self.step, self.source, self.target, self.signal, self.value
        )
    }
}

/// Events ordered by non-decreasing step.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Trace {
    pub events: Vec<TraceEvent>,
}

impl Trace {
    pub fn new(events: Vec<TraceEvent>) -> Self {
        Trace { events }
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    /// Rewrites endpoints to qualified net paths where they resolve.
    /// Unresolvable endpoints (such as `ENV`) are kept as written.
    pub fn qualified(&self, net: &ResolvedNet) -> Trace {
        let q = |p: &BlockPath| net.resolve(p).unwrap_or_else(|_| p.clone());
        Trace {
            events: self
                .events
                .iter()
                .map(|e| TraceEvent {
                    source: q(&e.source),
                    target: q(&e.target),
                    ..e.clone()
                })
                .collect(),
        }
    }
}

impl fmt::Display for Trace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for e in &self.events {
            writeln!(f, "{e}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum TraceErrorCode {
    Syntax,
    NonMonotonicStep,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {message}")]
pub struct TraceError {
    pub line: usize,
    pub code: TraceErrorCode,
    pub message: String,
}

/// Parses the line format `STEP SOURCE -> TARGET SIGNAL VALUE`. `#` starts a
/// comment.
pub fn load_trace(text: &str) -> Result<Trace, TraceError> {
    let mut events = Vec::new();
    let mut last_step = 0;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let syntax = |message: String| TraceError {
            line,
            code: TraceErrorCode::Syntax,
            message,
        };
        let fields: Vec<&str> = content.split_whitespace().collect();
        let [step, source, arrow, target, signal, value] = fields[..] else {
            return Err(syntax(format!(
                "expected `STEP SOURCE -> TARGET SIGNAL VALUE`, found {} fields",
                fields.len()
            )));
        };
        if arrow != "->" {
            return Err(syntax(format!("expected `->`, found `{arrow}`")));
        }
        let step: u64 = step
            .parse()
            .map_err(|_| syntax(format!("`{step}` is not a step number")))?;
        let path = |s: &str| {
            s.parse::<BlockPath>()
                .map_err(|_| syntax(format!("`{s}` is not a block path")))
        };
        let event = TraceEvent {
            step,
            source: path(source)?,
            target: path(target)?,
            signal: Identifier::new(signal)
                .map_err(|_| syntax(format!("`{signal}` is not a signal name")))?,
            value: value.parse().map_err(|e| syntax(format!("{e}")))?,
        };
        if step < last_step {
            return Err(TraceError {
                line,
                code: TraceErrorCode::NonMonotonicStep,
                message: format!("step {step} follows step {last_step}"),
            });
        }
        last_step = step;
        events.push(event);
    }
    Ok(Trace { events })
}

/// Behaviour stub for one block: when the guard holds on the named input
/// signal, the block emits the listed values.
#[derive(Debug, Clone, PartialEq)]
pub struct StubRule {
    pub owner: BlockPath,
    pub signal: Identifier,
    pub guard: Condition,
    pub emissions: Vec<(Identifier, Value)>,
    pub span: Span,
}

/// A named collection of stub rules for one net.
#[derive(Debug, Clone, PartialEq)]
pub struct StubSet {
    pub name: Identifier,
    pub base: Identifier,
    pub rules: Vec<StubRule>,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SimError {
    #[error("unknown block `{0}`")]
    UnknownBlock(String),
    #[error("unknown signal `{signal}`: {context}")]
    UnknownSignal { signal: String, context: String },
}

struct Delivery<'n> {
    connectors: Vec<&'n ResolvedConnector>,
    signal: Identifier,
    value: Value,
}

struct BlockRules<'a> {
    owner: BlockPath,
    rules: Vec<(&'a StubRule, Vec<Vec<&'a ResolvedConnector>>)>,
}

type InputKey = (BlockPath, Identifier);

/// Runs the net for `horizon` steps.
///
/// Each step first applies the stimuli of that step: a stimulus from `ENV`
/// makes its target block emit the signal on all of its outgoing connectors
/// carrying it; any other stimulus is delivered on the connectors from its
/// source to its target. Stimuli are visible to blocks in the same step.
/// Every stubbed block then fires its first rule whose guard holds on its
/// inputs; those emissions are recorded at this step, ordered by connector
/// declaration, and become visible from the next step on. Inputs keep their
/// last value.
pub fn run_simulation(
    net: &ResolvedNet,
    stubs: &[StubRule],
    stimuli: &[TraceEvent],
    horizon: u64,
) -> Result<Trace, SimError> {
    let resolve = |p: &BlockPath| {
        net.resolve(p)
            .map_err(|_| SimError::UnknownBlock(p.to_string()))
    };
    let outgoing = |from: &BlockPath, signal: &Identifier| -> Vec<&ResolvedConnector> {
        net.connectors()
            .iter()
            .filter(|c| c.source == *from && c.signals.contains(signal))
            .collect()
    };

    let mut blocks: Vec<BlockRules> = Vec::new();
    for rule in stubs {
        let owner = resolve(&rule.owner)?;
        let feeds = net
            .connectors()
            .iter()
            .any(|c| c.target == owner && c.signals.contains(&rule.signal));
        if !feeds {
            return Err(SimError::UnknownSignal {
                signal: rule.signal.to_string(),
                context: format!("no connector delivers it to `{owner}`"),
            });
        }
        let mut routes = Vec::with_capacity(rule.emissions.len());
        for (signal, _) in &rule.emissions {
            let out = outgoing(&owner, signal);
            if out.is_empty() {
                return Err(SimError::UnknownSignal {
                    signal: signal.to_string(),
                    context: format!("`{owner}` has no outgoing connector carrying it"),
                });
            }
            routes.push(out);
        }
        match blocks.iter_mut().find(|b| b.owner == owner) {
            Some(b) => b.rules.push((rule, routes)),
            None => blocks.push(BlockRules {
                owner,
                rules: vec![(rule, routes)],
            }),
        }
    }

    let mut deliveries: Vec<(u64, Delivery)> = Vec::new();
    for st in stimuli {
        let connectors: Vec<&ResolvedConnector> = if st.source.to_string() == ENV_SOURCE {
            let emitter = resolve(&st.target)?;
            outgoing(&emitter, &st.signal)
        } else {
            let source = resolve(&st.source)?;
            let target = resolve(&st.target)?;
            outgoing(&source, &st.signal)
                .into_iter()
                .filter(|c| c.target == target)
                .collect()
        };
        if connectors.is_empty() {
            return Err(SimError::UnknownSignal {
                signal: st.signal.to_string(),
                context: format!("no connector carries the stimulus `{st}`"),
            });
        }
        deliveries.push((
            st.step,
            Delivery {
                connectors,
                signal: st.signal.clone(),
                value: st.value.clone(),
            },
        ));
    }
    deliveries.sort_by_key(|(step, _)| *step);

    let mut events = Vec::new();
    let mut inputs: HashMap<InputKey, Value> = HashMap::new();
    let mut previous: HashMap<InputKey, Value> = HashMap::new();
    let mut next_delivery = 0;
    for step in 0..horizon {
        while next_delivery < deliveries.len() && deliveries[next_delivery].0 < step {
            next_delivery += 1;
        }
        while next_delivery < deliveries.len() && deliveries[next_delivery].0 == step {
            let d = &deliveries[next_delivery].1;
            for c in &d.connectors {
                events.push(TraceEvent {
                    step,
                    source: c.source.clone(),
                    target: c.target.clone(),
                    signal: d.signal.clone(),
                    value: d.value.clone(),
                });
                inputs.insert((c.target.clone(), d.signal.clone()), d.value.clone());
            }
            next_delivery += 1;
        }

        let mut emitted: Vec<(usize, usize, TraceEvent)> = Vec::new();
        for block in &blocks {
            for (rule, routes) in &block.rules {
                let key = (block.owner.clone(), rule.signal.clone());
                let Some(curr) = inputs.get(&key) else { continue };
                let holds =
                    eval_condition(&rule.guard, previous.get(&key), curr).unwrap_or(false);
                if !holds {
                    continue;
                }
                for (k, ((signal, value), route)) in
                    rule.emissions.iter().zip(routes).enumerate()
                {
                    for c in route {
                        emitted.push((
                            c.index,
                            k,
                            TraceEvent {
                                step,
                                source: c.source.clone(),
                                target: c.target.clone(),
                                signal: signal.clone(),
                                value: value.clone(),
                            },
                        ));
                    }
                }
                break;
            }
        }
        emitted.sort_by_key(|(c, k, _)| (*c, *k));

        previous = inputs.clone();
        for (_, _, e) in emitted {
            inputs.insert((e.target.clone(), e.signal.clone()), e.value.clone());
            events.push(e);
        }
    }
    Ok(Trace { events })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Outcome {
    Pass,
    Fail,
    Inconclusive,
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Outcome::Pass => "PASS",
            Outcome::Fail => "FAIL",
            Outcome::Inconclusive => "INCONCLUSIVE",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum FailureKind {
    /// An event the policy forbids was observed.
    Violation,
    /// The trace ended after the trigger without completing the scenario.
    Incomplete,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict {
    pub outcome: Outcome,
    pub reason: String,
    pub failure: Option<FailureKind>,
    pub failing_step: Option<u64>,
    pub matched: usize,
    pub total: usize,
}

/// Replays `trace` against `mon`. Endpoints are compared as qualified net
/// paths (see [`Trace::qualified`]).
///
/// Nothing is judged before the first trigger interaction has matched.
/// Afterwards an event that is not the next expected interaction is judged
/// by the policy. An event repeating an already consumed trigger is
/// ignored. The run stops at the first verdict.
pub fn run_monitor(mon: &Monitor, trace: &Trace) -> Verdict {
    let total = mon.expected.len();
    let mut values: HashMap<&Identifier, &Value> = HashMap::new();
    let mut progress = 0;
    let mut last_step = None;
    for ev in &trace.events {
        last_step = Some(ev.step);
        let prev = values.get(&ev.signal).copied();
        let hit = |i: usize| {
            mon.matches(
                &mon.expected[i],
                &ev.source,
                &ev.target,
                &ev.signal,
                prev,
                &ev.value,
            )
        };
        let triggered = progress > mon.first_trigger;
        if progress < total && hit(progress) {
            progress += 1;
            if progress == total {
                return Verdict {
                    outcome: Outcome::Pass,
                    reason: format!("all {total} interactions observed in order"),
                    failure: None,
                    failing_step: None,
                    matched: total,
                    total,
                };
            }
        } else if triggered {
            let retrigger = (0..progress).any(|i| mon.expected[i].trigger && hit(i));
            let forbidden = match mon.policy {
                Policy::Complete => true,
                Policy::Visible => mon.in_scope(&ev.source) && mon.in_scope(&ev.target),
                Policy::Free => false,
            };
            if forbidden && !retrigger {
                let next = &mon.expected[progress];
                return Verdict {
                    outcome: Outcome::Fail,
                    reason: format!(
                        "unexpected `{ev}` under policy {} while waiting for interaction {} ({} -> {} : {} {})",
                        mon.policy.keyword(),
                        next.seq,
                        next.source,
                        next.target,
                        next.signal,
                        next.condition
                    ),
                    failure: Some(FailureKind::Violation),
                    failing_step: Some(ev.step),
                    matched: progress,
                    total,
                };
            }
        }
        values.insert(&ev.signal, &ev.value);
    }
    if progress > mon.first_trigger {
        let next = &mon.expected[progress];
        Verdict {
            outcome: Outcome::Fail,
            reason: format!(
                "trace ended after {progress} of {total} interactions; interaction {} never observed",
                next.seq
            ),
            failure: Some(FailureKind::Incomplete),
            failing_step: last_step,
            matched: progress,
            total,
        }
    } else {
        Verdict {
            outcome: Outcome::Inconclusive,
            reason: "the trigger interaction was never observed".to_string(),
            failure: None,
            failing_step: None,
            matched: progress,
            total,
        }
    }
}
