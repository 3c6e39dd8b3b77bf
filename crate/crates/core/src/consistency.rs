//! Consistency of views against their complete function net, and
//! specialization between views.
//!
//! Conditions:
//!
//! * **C1** every plain or ext block shown in a view exists in the net.
//! * **C2** nesting shown in a view is a (possibly transitive) whole-part
//!   relationship of the net.
//! * **C3** two shown blocks that are in a whole-part relationship in the net
//!   are nested in the view as well.
//! * **C4** signal links between net blocks exist in the net, on one
//!   connector carrying every labelled signal.
//! * **C5** a link may be drawn to a superblock of the real endpoint, but
//!   only when the real endpoint is not shown.
//! * **C6** a specialization's blocks and links are a subset of the base
//!   view's.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::model::{BlockPath, Identifier, LinkKind, Marker, Span, View, ViewBlock};
use crate::net::{AncestorRelation, ResolveError, ResolvedNet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum ConditionId {
    C1,
    C2,
    C3,
    C4,
    C5,
    C6,
}

impl fmt::Display for ConditionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ConditionId::C1 => "C1",
            ConditionId::C2 => "C2",
            ConditionId::C3 => "C3",
            ConditionId::C4 => "C4",
            ConditionId::C5 => "C5",
            ConditionId::C6 => "C6",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Finding {
    pub condition: ConditionId,
    pub subjects: Vec<String>,
    pub message: String,
    pub span: Span,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Consistency {
    Consistent,
    Inconsistent,
}

impl fmt::Display for Consistency {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Consistency::Consistent => "CONSISTENT",
            Consistency::Inconsistent => "INCONSISTENT",
        })
    }
}

/// Findings of one check. Notes are informational and never affect the
/// verdict.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConsistencyReport {
    pub findings: Vec<Finding>,
    pub notes: Vec<String>,
}

impl ConsistencyReport {
    pub fn verdict(&self) -> Consistency {
        if self.findings.is_empty() {
            Consistency::Consistent
        } else {
            Consistency::Inconsistent
        }
    }

    pub fn is_consistent(&self) -> bool {
        self.findings.is_empty()
    }

    pub fn conditions(&self) -> BTreeSet<ConditionId> {
        self.findings.iter().map(|f| f.condition).collect()
    }

    /// Merges another report into this one.
    pub fn absorb(&mut self, other: ConsistencyReport) {
        self.findings.extend(other.findings);
        self.notes.extend(other.notes);
    }

    /// Prepends `subject` to the subjects of every finding.
    pub fn scoped(mut self, subject: &str) -> ConsistencyReport {
        for f in &mut self.findings {
            f.subjects.insert(0, subject.to_string());
        }
        for n in &mut self.notes {
            *n = format!("{subject}: {n}");
        }
        self
    }

    /// Sorts by condition, then subjects, and drops exact duplicates.
    pub fn normalize(&mut self) {
        self.findings.sort_by(|a, b| {
            (a.condition, &a.subjects, &a.message).cmp(&(b.condition, &b.subjects, &b.message))
        });
        self.findings.dedup();
        let mut seen = BTreeSet::new();
        self.notes.retain(|n| seen.insert(n.clone()));
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CheckError {
    #[error("`{artifact}` refers to `{found}` but was checked against `{expected}`")]
    BaseMismatch {
        artifact: String,
        expected: String,
        found: String,
    },
}

/// How a view endpoint relates to the net connector it matched.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Lifting {
    Exact,
    /// The view endpoint is a superblock of `actual`.
    Lifted { actual: BlockPath },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConnectorMatch {
    /// Declaration index of the matched net connector.
    pub connector: usize,
    pub source: Lifting,
    pub target: Lifting,
}

/// `None` when no net connector matches.
pub type MatchResult = Option<ConnectorMatch>;

/// A signal link between two view endpoints resolved into the net.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResolvedLink {
    pub source: BlockPath,
    pub target: BlockPath,
    pub signals: BTreeSet<Identifier>,
}

fn endpoint_lifting(
    view_end: &BlockPath,
    net_end: &BlockPath,
    closure: &AncestorRelation,
    shown: &BTreeSet<BlockPath>,
    honor_presence: bool,
) -> Option<Lifting> {
    if view_end == net_end {
        Some(Lifting::Exact)
    } else if closure.contains(view_end, net_end) && !(honor_presence && shown.contains(net_end))
    {
        Some(Lifting::Lifted {
            actual: net_end.clone(),
        })
    } else {
        None
    }
}

fn signals_covered(link: &BTreeSet<Identifier>, net_signals: &BTreeSet<Identifier>) -> bool {
    if link.is_empty() {
        !net_signals.is_empty()
    } else {
        link.is_subset(net_signals)
    }
}

/// First net connector, in declaration order, whose signals cover the
/// link's labels and whose endpoints equal the link's endpoints or lie below
/// them. Lifting to a superblock is refused when the real endpoint is in
/// `shown`.
pub fn match_connector(
    link: &ResolvedLink,
    net: &ResolvedNet,
    closure: &AncestorRelation,
    shown: &BTreeSet<BlockPath>,
) -> MatchResult {
    net.connectors()
        .iter()
        .filter(|c| c.kind == LinkKind::Signal && signals_covered(&link.signals, &c.signals))
        .find_map(|c| {
            let source = endpoint_lifting(&link.source, &c.source, closure, shown, true)?;
            let target = endpoint_lifting(&link.target, &c.target, closure, shown, true)?;
            Some(ConnectorMatch {
                connector: c.index,
                source,
                target,
            })
        })
}

/// Which condition an unmatched link violates. Labelled links whose signals
/// exist on some connector, and unlabelled links that would match if
/// lifting ignored the shown blocks, are endpoint problems (C5); anything
/// else is missing communication (C4).
fn classify_unmatched(
    link: &ResolvedLink,
    net: &ResolvedNet,
    closure: &AncestorRelation,
    shown: &BTreeSet<BlockPath>,
) -> ConditionId {
    let candidates = net
        .connectors()
        .iter()
        .filter(|c| c.kind == LinkKind::Signal && signals_covered(&link.signals, &c.signals));
    let endpoint_problem = if link.signals.is_empty() {
        candidates.into_iter().any(|c| {
            endpoint_lifting(&link.source, &c.source, closure, shown, false).is_some()
                && endpoint_lifting(&link.target, &c.target, closure, shown, false).is_some()
        })
    } else {
        candidates.into_iter().next().is_some()
    };
    if endpoint_problem {
        ConditionId::C5
    } else {
        ConditionId::C4
    }
}

/// A view block flattened with its view parent and resolution.
#[derive(Debug)]
pub(crate) struct ShownBlock<'v> {
    pub block: &'v ViewBlock,
    pub parent: Option<usize>,
    pub nest_path: String,
    pub resolved: Option<Result<BlockPath, ResolveError>>,
}

impl ShownBlock<'_> {
    pub fn label(&self) -> String {
        self.block.reference.to_string()
    }

    pub fn net_path(&self) -> Option<&BlockPath> {
        match &self.resolved {
            Some(Ok(p)) => Some(p),
            _ => None,
        }
    }
}

/// Flattened view with its blocks resolved against a net.
pub(crate) struct ViewIndex<'v> {
    pub blocks: Vec<ShownBlock<'v>>,
    by_label: HashMap<String, usize>,
}

impl<'v> ViewIndex<'v> {
    pub fn new(view: &'v View, net: &ResolvedNet) -> Self {
        fn go<'v>(
            blocks: &'v [ViewBlock],
            parent: Option<usize>,
            prefix: &str,
            net: &ResolvedNet,
            out: &mut Vec<ShownBlock<'v>>,
        ) {
            for b in blocks {
                let label = b.reference.to_string();
                let nest_path = if prefix.is_empty() {
                    label
                } else {
                    format!("{prefix}.{label}")
                };
                let resolved = match b.marker {
                    Marker::Env => None,
                    Marker::Plain | Marker::Ext => Some(net.resolve(&b.reference)),
                };
                let idx = out.len();
                out.push(ShownBlock {
                    block: b,
                    parent,
                    nest_path: nest_path.clone(),
                    resolved,
                });
                go(&b.children, Some(idx), &nest_path, net, out);
            }
        }
        let mut blocks = Vec::new();
        go(&view.blocks, None, "", net, &mut blocks);
        let mut by_label = HashMap::new();
        for (i, b) in blocks.iter().enumerate() {
            by_label.entry(b.label()).or_insert(i);
        }
        for (i, b) in blocks.iter().enumerate() {
            by_label.entry(b.nest_path.clone()).or_insert(i);
        }
        ViewIndex { blocks, by_label }
    }

    pub fn lookup(&self, reference: &BlockPath) -> Option<usize> {
        self.by_label.get(&reference.to_string()).copied()
    }

    /// True when `a` is a (transitive) view ancestor of `b`.
    pub fn is_view_ancestor(&self, a: usize, b: usize) -> bool {
        let mut up = self.blocks[b].parent;
        while let Some(p) = up {
            if p == a {
                return true;
            }
            up = self.blocks[p].parent;
        }
        false
    }

    /// Nearest view ancestor that is shown as a resolved net block.
    fn nearest_net_ancestor(&self, b: usize) -> Option<usize> {
        let mut up = self.blocks[b].parent;
        while let Some(p) = up {
            if self.blocks[p].net_path().is_some() {
                return Some(p);
            }
            up = self.blocks[p].parent;
        }
        None
    }

    pub fn shown_paths(&self) -> BTreeSet<BlockPath> {
        self.blocks
            .iter()
            .filter_map(|b| b.net_path().cloned())
            .collect()
    }

    /// Identity of a block for subset comparison between views.
    pub fn key(&self, idx: usize) -> BlockKey {
        let b = &self.blocks[idx];
        match (&b.block.marker, b.net_path()) {
            (Marker::Env, _) => BlockKey::Env(b.label()),
            (_, Some(p)) => BlockKey::Net(p.clone()),
            (_, None) => BlockKey::Unresolved(b.label()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub(crate) enum BlockKey {
    Net(BlockPath),
    Env(String),
    Unresolved(String),
}

impl fmt::Display for BlockKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BlockKey::Net(p) => write!(f, "{p}"),
            BlockKey::Env(l) => write!(f, "env {l}"),
            BlockKey::Unresolved(l) => f.write_str(l),
        }
    }
}

fn finding(condition: ConditionId, subjects: Vec<String>, message: String, span: &Span) -> Finding {
    Finding {
        condition,
        subjects,
        message,
        span: span.clone(),
    }
}

fn link_text(kind: LinkKind, signals: &[Identifier], source: &BlockPath, target: &BlockPath) -> String {
    let labels = signals
        .iter()
        .map(|s| s.as_str())
        .collect::<Vec<_>>()
        .join(", ");
    if labels.is_empty() {
        format!("{} {} -> {}", kind.keyword(), source, target)
    } else {
        format!("{} {} : {} -> {}", kind.keyword(), labels, source, target)
    }
}

/// Checks conditions C1 to C5 for `view` against `net`.
pub fn check_view(view: &View, net: &ResolvedNet) -> Result<ConsistencyReport, CheckError> {
    if view.base != *net.name() {
        return Err(CheckError::BaseMismatch {
            artifact: view.name.to_string(),
            expected: net.name().to_string(),
            found: view.base.to_string(),
        });
    }
    let index = ViewIndex::new(view, net);
    let mut report = ConsistencyReport::default();
    let closure = net.closure();

    // C1
    for b in &index.blocks {
        match &b.resolved {
            Some(Err(ResolveError::NotFound(_))) => report.findings.push(finding(
                ConditionId::C1,
                vec![b.label()],
                format!(
                    "{} block `{}` is not part of the logical architecture",
                    b.block.marker.keyword(),
                    b.label()
                ),
                &b.block.span,
            )),
            Some(Err(err @ ResolveError::Ambiguous { .. })) => report.findings.push(finding(
                ConditionId::C1,
                vec![b.label()],
                format!("cannot identify block in the logical architecture: {err}"),
                &b.block.span,
            )),
            _ => {}
        }
    }

    // C2: each resolved block against its nearest resolved view ancestor.
    // Transitivity of the closure makes this equivalent to checking every
    // ancestor pair.
    for (i, b) in index.blocks.iter().enumerate() {
        let Some(child) = b.net_path() else { continue };
        let Some(a) = index.nearest_net_ancestor(i) else { continue };
        let parent = index.blocks[a].net_path().expect("resolved ancestor");
        if !closure.contains(parent, child) {
            report.findings.push(finding(
                ConditionId::C2,
                vec![parent.to_string(), child.to_string()],
                format!("view nests `{child}` inside `{parent}`, which is not a whole-part relationship of the net"),
                &b.block.span,
            ));
        }
    }

    // C3
    for (i, a) in index.blocks.iter().enumerate() {
        let Some(pa) = a.net_path() else { continue };
        for (j, b) in index.blocks.iter().enumerate() {
            let Some(pb) = b.net_path() else { continue };
            if i == j || !closure.contains(pa, pb) {
                continue;
            }
            if !index.is_view_ancestor(i, j) {
                report.findings.push(finding(
                    ConditionId::C3,
                    vec![pa.to_string(), pb.to_string()],
                    format!("`{pb}` is part of `{pa}` in the net but the view does not nest it there"),
                    &b.block.span,
                ));
            }
        }
    }

    // C4 and C5
    let shown = index.shown_paths();
    for conn in &view.connectors {
        let text = link_text(conn.kind, &conn.signals, &conn.source, &conn.target);
        let mut ends = Vec::with_capacity(2);
        for end in [&conn.source, &conn.target] {
            match index.lookup(end) {
                Some(i) => ends.push(i),
                None => report.findings.push(finding(
                    ConditionId::C1,
                    vec![end.to_string()],
                    format!("`{text}` ends at `{end}`, which is not a block of the view"),
                    &conn.span,
                )),
            }
        }
        let [s, t] = match <[usize; 2]>::try_from(ends) {
            Ok(pair) => pair,
            Err(_) => continue,
        };
        let (sb, tb) = (&index.blocks[s], &index.blocks[t]);
        let touches_env = sb.block.marker == Marker::Env || tb.block.marker == Marker::Env;
        if conn.kind != LinkKind::Signal {
            if !touches_env && !conn.signals.is_empty() {
                report.findings.push(finding(
                    ConditionId::C4,
                    vec![sb.label(), tb.label()],
                    format!("`{text}` is a non-signal link between net blocks and must not carry signals"),
                    &conn.span,
                ));
            }
            continue;
        }
        if touches_env {
            continue;
        }
        let (Some(source), Some(target)) = (sb.net_path(), tb.net_path()) else {
            continue;
        };
        let link = ResolvedLink {
            source: source.clone(),
            target: target.clone(),
            signals: conn.signals.iter().cloned().collect(),
        };
        match match_connector(&link, net, closure, &shown) {
            Some(m) => {
                let lifted: Vec<String> = [(&m.source, source), (&m.target, target)]
                    .into_iter()
                    .filter_map(|(l, v)| match l {
                        Lifting::Lifted { actual } => Some(format!("`{v}` stands for `{actual}`")),
                        Lifting::Exact => None,
                    })
                    .collect();
                if !lifted.is_empty() {
                    report
                        .notes
                        .push(format!("`{text}` drawn to superblock: {}", lifted.join(", ")));
                }
            }
            None => {
                let condition = classify_unmatched(&link, net, closure, &shown);
                let message = match (condition, link.signals.is_empty()) {
                    (ConditionId::C4, true) => format!(
                        "`{text}`: no signal flows from `{source}` to `{target}` in the logical architecture"
                    ),
                    (ConditionId::C4, false) => format!(
                        "`{text}`: no net connector from `{source}` to `{target}` carries all of the labelled signals"
                    ),
                    _ => format!(
                        "`{text}`: the communication exists in the net but not at these endpoints; links may only be drawn to a superblock of an endpoint that is not shown"
                    ),
                };
                report.findings.push(finding(
                    condition,
                    vec![source.to_string(), target.to_string()],
                    message,
                    &conn.span,
                ));
            }
        }
    }

    report.normalize();
    Ok(report)
}

/// Checks that `spec` specializes `base`: both views are consistent with
/// `net` and the blocks and links of `spec` are a subset of those of `base`.
pub fn check_specialization(
    spec: &View,
    base: &View,
    net: &ResolvedNet,
) -> Result<ConsistencyReport, CheckError> {
    if spec.base != base.base {
        return Err(CheckError::BaseMismatch {
            artifact: spec.name.to_string(),
            expected: base.base.to_string(),
            found: spec.base.to_string(),
        });
    }
    let mut report = check_view(spec, net)?.scoped(spec.name.as_str());
    if spec.name != base.name {
        report.absorb(check_view(base, net)?.scoped(base.name.as_str()));
    }

    let spec_index = ViewIndex::new(spec, net);
    let base_index = ViewIndex::new(base, net);
    let base_blocks: BTreeSet<(BlockKey, Marker)> = (0..base_index.blocks.len())
        .map(|i| (base_index.key(i), base_index.blocks[i].block.marker))
        .collect();
    for (i, b) in spec_index.blocks.iter().enumerate() {
        let key = spec_index.key(i);
        if !base_blocks.contains(&(key.clone(), b.block.marker)) {
            let shown_otherwise = base_blocks.iter().any(|(k, _)| *k == key);
            let message = if shown_otherwise {
                format!(
                    "`{key}` is shown as `{}` but `{}` shows it with a different marker",
                    b.block.marker.keyword(),
                    base.name
                )
            } else {
                format!("`{key}` is not shown in `{}`", base.name)
            };
            report.findings.push(finding(
                ConditionId::C6,
                vec![spec.name.to_string(), key.to_string()],
                message,
                &b.block.span,
            ));
        }
    }

    let endpoint_key = |index: &ViewIndex, end: &BlockPath| -> BlockKey {
        match index.lookup(end) {
            Some(i) => index.key(i),
            None => BlockKey::Unresolved(end.to_string()),
        }
    };
    let base_links: Vec<(BlockKey, BlockKey, LinkKind, BTreeSet<&Identifier>)> = base
        .connectors
        .iter()
        .map(|c| {
            (
                endpoint_key(&base_index, &c.source),
                endpoint_key(&base_index, &c.target),
                c.kind,
                c.signals.iter().collect(),
            )
        })
        .collect();
    for c in &spec.connectors {
        let s = endpoint_key(&spec_index, &c.source);
        let t = endpoint_key(&spec_index, &c.target);
        let labels: BTreeSet<&Identifier> = c.signals.iter().collect();
        let covered = base_links
            .iter()
            .any(|(bs, bt, kind, bl)| *bs == s && *bt == t && *kind == c.kind && labels.is_subset(bl));
        if !covered {
            report.findings.push(finding(
                ConditionId::C6,
                vec![spec.name.to_string(), s.to_string(), t.to_string()],
                format!(
                    "`{}` has no counterpart in `{}`",
                    link_text(c.kind, &c.signals, &c.source, &c.target),
                    base.name
                ),
                &c.span,
            ));
        }
    }

    // Nesting is not part of the subset condition; divergence is only noted.
    let base_nesting: BTreeSet<(BlockKey, BlockKey)> = nesting_pairs(&base_index);
    for (a, b) in nesting_pairs(&spec_index) {
        if !base_nesting.contains(&(a.clone(), b.clone())) {
            report.notes.push(format!(
                "`{}` nests `{b}` inside `{a}` but `{}` does not",
                spec.name, base.name
            ));
        }
    }

    report.normalize();
    Ok(report)
}

fn nesting_pairs(index: &ViewIndex) -> BTreeSet<(BlockKey, BlockKey)> {
    let mut out = BTreeSet::new();
    for j in 0..index.blocks.len() {
        for i in 0..index.blocks.len() {
            if index.is_view_ancestor(i, j) {
                out.insert((index.key(i), index.key(j)));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::{parse_model, Model};

    const FIG1: &str = include_str!("../tests/data/figure1.fnet");
    const FIG2: &str = include_str!("../tests/data/figure2.fnet");
    const FIG4: &str = include_str!("../tests/data/figure4.fnet");

    fn load(extra: &str) -> (Model, ResolvedNet) {
        let src = format!("{FIG1}\n{extra}");
        let model = parse_model(&src).unwrap_or_else(|e| panic!("{e:?}"));
        let net = ResolvedNet::new(model.net("CarComfort").unwrap());
        (model, net)
    }

    fn check(extra: &str, view: &str) -> ConsistencyReport {
        let (model, net) = load(extra);
        check_view(model.view(view).unwrap(), &net).unwrap()
    }

    fn p(s: &str) -> BlockPath {
        s.parse().unwrap()
    }

    #[test]
    fn figure2_view_is_consistent() {
        let report = check(FIG2, "AutoLock");
        assert_eq!(report.verdict(), Consistency::Consistent, "{report:#?}");
    }

    #[test]
    fn identity_view_is_consistent() {
        let report = check(
            "view Full on CarComfort {
                block CarComfort {
                    block CLSwitch
                    block CLRequestProc { block ButtonOn block ButtonOff block EvalSpeed block Arbiter }
                    block CentralSettingsUnit
                    block VehicleState
                    block left { block left.LockCtrl }
                    block right { block right.LockCtrl }
                }
                connect DriverRequestCL : CLSwitch -> ButtonOn
                connect DriverRequestCL : CLSwitch -> ButtonOff
                connect OpenRequest : ButtonOn -> Arbiter
                connect CloseRequest : ButtonOff -> Arbiter
                connect AutoLockStatus : CentralSettingsUnit -> Arbiter
                connect VehicleSpeed : VehicleState -> EvalSpeed
                connect LockRequest : EvalSpeed -> Arbiter
                connect CmdOpenClose : Arbiter -> left.LockCtrl
                connect CmdOpenClose : Arbiter -> right.LockCtrl
            }",
            "Full",
        );
        assert!(report.is_consistent(), "{report:#?}");
    }

    #[test]
    fn inverted_nesting_is_c2() {
        let report = check(
            "view Bad on CarComfort { block left { block Arbiter } }",
            "Bad",
        );
        assert_eq!(report.conditions(), BTreeSet::from([ConditionId::C2]));
    }

    #[test]
    fn flattened_pair_is_c3() {
        let report = check(
            "view Bad on CarComfort { block CarComfort block ButtonOn }",
            "Bad",
        );
        assert_eq!(report.conditions(), BTreeSet::from([ConditionId::C3]));
        assert_eq!(
            report.findings[0].subjects,
            vec!["CarComfort", "CarComfort.CLRequestProc.ButtonOn"]
        );
    }

    #[test]
    fn phantom_signal_is_c4() {
        let report = check(
            "view Bad on CarComfort { block EvalSpeed block Arbiter connect Ghost : EvalSpeed -> Arbiter }",
            "Bad",
        );
        assert_eq!(report.conditions(), BTreeSet::from([ConditionId::C4]));
    }

    #[test]
    fn c4_requires_one_connector_for_all_labels() {
        // both signals flow from A to B, but on different connectors
        let model = parse_model(
            "net N { block A {} block B {} connect S : A -> B connect T : A -> B }
             view Split on N { block A block B connect S, T : A -> B }
             view One on N { block A block B connect T : A -> B }",
        )
        .unwrap();
        let net = ResolvedNet::new(model.net("N").unwrap());
        let split = check_view(model.view("Split").unwrap(), &net).unwrap();
        assert_eq!(split.conditions(), BTreeSet::from([ConditionId::C4]));
        assert_eq!(split.findings.len(), 1);
        assert!(check_view(model.view("One").unwrap(), &net).unwrap().is_consistent());
    }

    #[test]
    fn env_blocks_are_exempt() {
        let report = check(
            "view V on CarComfort { block left env LockActuator env Road
                mech : left -> LockActuator
                connect Anything : Road -> left }",
            "V",
        );
        assert!(report.is_consistent(), "{report:#?}");
    }

    #[test]
    fn nonsignal_link_with_signals_between_net_blocks() {
        let report = check(
            "view V on CarComfort { block left block right mech Force : left -> right }",
            "V",
        );
        assert_eq!(report.conditions(), BTreeSet::from([ConditionId::C4]));
    }

    #[test]
    fn missing_block_is_c1() {
        let report = check("view V on CarComfort { block Wiper ext VehicleState }", "V");
        assert_eq!(report.conditions(), BTreeSet::from([ConditionId::C1]));
        let report = check("view V on CarComfort { ext Door }", "V");
        assert_eq!(report.conditions(), BTreeSet::from([ConditionId::C1]));
        assert!(report.findings[0].message.contains("ambiguous"));
    }

    #[test]
    fn match_examples() {
        let (_, net) = load("");
        let closure = net.closure();
        let shown = BTreeSet::new();
        let exact = ResolvedLink {
            source: p("CarComfort.VehicleState"),
            target: p("CarComfort.CLRequestProc.EvalSpeed"),
            signals: [Identifier::new("VehicleSpeed").unwrap()].into(),
        };
        let m = match_connector(&exact, &net, closure, &shown).unwrap();
        assert_eq!(m.source, Lifting::Exact);
        assert_eq!(m.target, Lifting::Exact);

        let lifted = ResolvedLink {
            source: p("CarComfort.CentralSettingsUnit"),
            target: p("CarComfort.CLRequestProc"),
            signals: [Identifier::new("AutoLockStatus").unwrap()].into(),
        };
        let m = match_connector(&lifted, &net, closure, &shown).unwrap();
        assert_eq!(
            m.target,
            Lifting::Lifted {
                actual: p("CarComfort.CLRequestProc.Arbiter")
            }
        );

        let unlabeled = ResolvedLink {
            source: p("CarComfort.CLSwitch"),
            target: p("CarComfort.CLRequestProc.ButtonOn"),
            signals: BTreeSet::new(),
        };
        let m = match_connector(&unlabeled, &net, closure, &shown).unwrap();
        assert_eq!(net.connectors()[m.connector].signals.len(), 1);

        // lifting is refused when the real endpoint is shown
        let shown: BTreeSet<BlockPath> = [p("CarComfort.CLRequestProc.Arbiter")].into();
        assert!(match_connector(&lifted, &net, closure, &shown).is_none());
        assert_eq!(
            classify_unmatched(&lifted, &net, closure, &shown),
            ConditionId::C5
        );
    }

    #[test]
    fn specialization_examples() {
        let (model, net) = load(&format!("{FIG2}\n{FIG4}"));
        let feature = model.view("AutoLock").unwrap();
        let variant = model.view("AutoLockSpeed").unwrap();
        let r = check_specialization(feature, feature, &net).unwrap();
        assert!(r.is_consistent(), "{r:#?}");
        let r = check_specialization(variant, feature, &net).unwrap();
        assert!(r.is_consistent(), "{r:#?}");
        // the feature view is not a specialization of the variant
        let r = check_specialization(feature, variant, &net).unwrap();
        assert_eq!(r.conditions(), BTreeSet::from([ConditionId::C6]));
    }

    #[test]
    fn base_mismatch() {
        let (model, _) = load("view V on Other { }\nnet Other { }");
        let other = ResolvedNet::new(model.net("Other").unwrap());
        let fig = check_view(model.view("V").unwrap(), &other);
        assert!(fig.is_ok());
        let car = ResolvedNet::new(model.net("CarComfort").unwrap());
        assert!(matches!(
            check_view(model.view("V").unwrap(), &car),
            Err(CheckError::BaseMismatch { .. })
        ));
    }
}
