//! Instance expansion, well-formedness, containment closure, and name
//! resolution for function nets.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::model::{BlockItem, BlockPath, FunctionNet, Identifier, LinkKind, Span};

/// Structural rule violated by a net.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Rule {
    DanglingEndpoint,
    AmbiguousEndpoint,
    CyclicHierarchy,
    DuplicateChild,
    DuplicateDefinition,
    UnknownDefinition,
    SelfLoop,
    MissingSignal,
    NonSignalConnector,
}

impl Rule {
    pub fn as_str(self) -> &'static str {
        match self {
            Rule::DanglingEndpoint => "DANGLING_ENDPOINT",
            Rule::AmbiguousEndpoint => "AMBIGUOUS_ENDPOINT",
            Rule::CyclicHierarchy => "CYCLIC_HIERARCHY",
            Rule::DuplicateChild => "DUPLICATE_CHILD",
            Rule::DuplicateDefinition => "DUPLICATE_DEFINITION",
            Rule::UnknownDefinition => "UNKNOWN_DEFINITION",
            Rule::SelfLoop => "SELF_LOOP",
            Rule::MissingSignal => "MISSING_SIGNAL",
            Rule::NonSignalConnector => "NON_SIGNAL_CONNECTOR",
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub rule: Rule,
    pub path: String,
    pub message: String,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ResolveError {
    #[error("no block named `{0}`")]
    NotFound(String),
    #[error("`{name}` is ambiguous: {}", join_paths(candidates))]
    Ambiguous {
        name: String,
        candidates: Vec<BlockPath>,
    },
}

fn join_paths(paths: &[BlockPath]) -> String {
    paths
        .iter()
        .map(|p| p.to_string())
        .collect::<Vec<_>>()
        .join(", ")
}

/// One block occurrence after instance expansion.
#[derive(Debug, Clone)]
pub struct Occurrence {
    pub path: BlockPath,
    /// Definition name when the occurrence is an instance.
    pub definition: Option<Identifier>,
    pub parent: Option<usize>,
    pub children: Vec<usize>,
    pub span: Span,
}

/// A net connector with both endpoints resolved to occurrence paths.
#[derive(Debug, Clone)]
pub struct ResolvedConnector {
    /// Position of the connector in the net's declaration order.
    pub index: usize,
    pub kind: LinkKind,
    pub source: BlockPath,
    pub target: BlockPath,
    pub signals: BTreeSet<Identifier>,
    pub span: Span,
}

/// Ancestor/descendant pairs of the block hierarchy, closed under
/// transitivity.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AncestorRelation {
    pairs: BTreeSet<(BlockPath, BlockPath)>,
}

impl AncestorRelation {
    pub fn from_pairs(pairs: impl IntoIterator<Item = (BlockPath, BlockPath)>) -> Self {
        AncestorRelation {
            pairs: pairs.into_iter().collect(),
        }
    }

    pub fn contains(&self, ancestor: &BlockPath, descendant: &BlockPath) -> bool {
        self.pairs
            .contains(&(ancestor.clone(), descendant.clone()))
    }

    pub fn iter(&self) -> impl Iterator<Item = &(BlockPath, BlockPath)> {
        self.pairs.iter()
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Transitive closure of an arbitrary relation. On a relation that is
    /// already closed this returns an equal relation.
    pub fn transitive_closure(&self) -> AncestorRelation {
        let mut succ: BTreeMap<&BlockPath, BTreeSet<&BlockPath>> = BTreeMap::new();
        for (a, b) in &self.pairs {
            succ.entry(a).or_default().insert(b);
        }
        let mut out = BTreeSet::new();
        for &start in succ.keys() {
            let mut stack: Vec<&BlockPath> = succ[start].iter().copied().collect();
            let mut seen = BTreeSet::new();
            while let Some(n) = stack.pop() {
                if !seen.insert(n) {
                    continue;
                }
                out.insert((start.clone(), n.clone()));
                if let Some(next) = succ.get(n) {
                    stack.extend(next.iter().copied());
                }
            }
        }
        AncestorRelation { pairs: out }
    }
}

/// A net after instance expansion, with resolved connectors, its
/// containment closure, and the structural diagnostics found on the way.
#[derive(Debug, Clone)]
pub struct ResolvedNet {
    pub net: FunctionNet,
    occurrences: Vec<Occurrence>,
    by_path: HashMap<BlockPath, usize>,
    connectors: Vec<ResolvedConnector>,
    closure: AncestorRelation,
    diagnostics: Vec<Diagnostic>,
}

struct Expander<'a> {
    definitions: HashMap<&'a Identifier, &'a crate::model::BlockDef>,
    cyclic: BTreeSet<&'a Identifier>,
    occurrences: Vec<Occurrence>,
    diagnostics: Vec<Diagnostic>,
}

impl<'a> Expander<'a> {
    fn expand_children(&mut self, parent: usize, items: &'a [BlockItem]) {
        let mut seen: BTreeSet<&Identifier> = BTreeSet::new();
        for item in items {
            let (name, span) = match item {
                BlockItem::Block(b) => (&b.name, &b.span),
                BlockItem::Instance(i) => (&i.name, &i.span),
                BlockItem::Definition(_) => continue,
            };
            let path = self.occurrences[parent].path.child(name.clone());
            if !seen.insert(name) {
                self.diagnostics.push(Diagnostic {
                    rule: Rule::DuplicateChild,
                    path: path.to_string(),
                    message: format!(
                        "`{}` already has a child named `{}`",
                        self.occurrences[parent].path, name
                    ),
                    span: span.clone(),
                });
                continue;
            }
            match item {
                BlockItem::Block(b) => {
                    let idx = self.push(path, None, parent, b.span.clone());
                    self.expand_children(idx, &b.children);
                }
                BlockItem::Instance(inst) => {
                    let idx = self.push(
                        path.clone(),
                        Some(inst.definition.clone()),
                        parent,
                        inst.span.clone(),
                    );
                    if self.cyclic.contains(&inst.definition) {
                        self.diagnostics.push(Diagnostic {
                            rule: Rule::CyclicHierarchy,
                            path: path.to_string(),
                            message: format!(
                                "instance `{}` of `{}` is not expanded: the definition contains itself",
                                inst.name, inst.definition
                            ),
                            span: inst.span.clone(),
                        });
                        continue;
                    }
                    match self.definitions.get(&inst.definition) {
                        Some(def) => {
                            let children = &def.children;
                            self.expand_children(idx, children);
                        }
                        None => self.diagnostics.push(Diagnostic {
                            rule: Rule::UnknownDefinition,
                            path: path.to_string(),
                            message: format!("unknown block definition `{}`", inst.definition),
                            span: inst.span.clone(),
                        }),
                    }
                }
                BlockItem::Definition(_) => unreachable!(),
            }
        }
    }

    fn push(
        &mut self,
        path: BlockPath,
        definition: Option<Identifier>,
        parent: usize,
        span: Span,
    ) -> usize {
        let idx = self.occurrences.len();
        self.occurrences.push(Occurrence {
            path,
            definition,
            parent: Some(parent),
            children: Vec::new(),
            span,
        });
        self.occurrences[parent].children.push(idx);
        idx
    }
}

fn collect_definitions<'a>(
    items: &'a [BlockItem],
    out: &mut Vec<&'a crate::model::BlockDef>,
) {
    for item in items {
        match item {
            BlockItem::Block(b) => collect_definitions(&b.children, out),
            BlockItem::Definition(d) => {
                out.push(d);
                collect_definitions(&d.children, out);
            }
            BlockItem::Instance(_) => {}
        }
    }
}

/// Definitions instantiated anywhere inside `items`, excluding nested
/// definitions (those are only reached through their own instances).
fn instantiated<'a>(items: &'a [BlockItem], out: &mut BTreeSet<&'a Identifier>) {
    for item in items {
        match item {
            BlockItem::Block(b) => instantiated(&b.children, out),
            BlockItem::Instance(i) => {
                out.insert(&i.definition);
            }
            BlockItem::Definition(_) => {}
        }
    }
}

/// Definitions that reach themselves through instances.
fn cyclic_definitions<'a>(
    definitions: &HashMap<&'a Identifier, &'a crate::model::BlockDef>,
) -> BTreeSet<&'a Identifier> {
    let mut edges: BTreeMap<&Identifier, BTreeSet<&Identifier>> = BTreeMap::new();
    for (&name, def) in definitions {
        let mut uses = BTreeSet::new();
        instantiated(&def.children, &mut uses);
        edges.insert(name, uses);
    }
    let mut cyclic = BTreeSet::new();
    for &start in edges.keys() {
        let mut stack: Vec<&Identifier> = edges[start].iter().copied().collect();
        let mut seen = BTreeSet::new();
        while let Some(n) = stack.pop() {
            if n == start {
                cyclic.insert(start);
                break;
            }
            if !seen.insert(n) {
                continue;
            }
            if let Some(next) = edges.get(n) {
                stack.extend(next.iter().copied());
            }
        }
    }
    cyclic
}

impl ResolvedNet {
    pub fn new(net: &FunctionNet) -> ResolvedNet {
        let mut all_defs = Vec::new();
        collect_definitions(&net.items, &mut all_defs);

        let mut diagnostics = Vec::new();
        let mut definitions: HashMap<&Identifier, &crate::model::BlockDef> = HashMap::new();
        for def in all_defs {
            if definitions.contains_key(&def.name) {
                diagnostics.push(Diagnostic {
                    rule: Rule::DuplicateDefinition,
                    path: def.name.to_string(),
                    message: format!("block definition `{}` is declared twice", def.name),
                    span: def.span.clone(),
                });
            } else {
                definitions.insert(&def.name, def);
            }
        }

        let cyclic = cyclic_definitions(&definitions);
        for name in &cyclic {
            let def = definitions[name];
            diagnostics.push(Diagnostic {
                rule: Rule::CyclicHierarchy,
                path: name.to_string(),
                message: format!("block definition `{name}` contains itself through instances"),
                span: def.span.clone(),
            });
        }

        let root = Occurrence {
            path: BlockPath::single(net.name.clone()),
            definition: None,
            parent: None,
            children: Vec::new(),
            span: net.span.clone(),
        };
        let mut expander = Expander {
            definitions,
            cyclic,
            occurrences: vec![root],
            diagnostics,
        };
        expander.expand_children(0, &net.items);
        let Expander {
            occurrences,
            mut diagnostics,
            ..
        } = expander;

        let by_path = occurrences
            .iter()
            .enumerate()
            .map(|(i, o)| (o.path.clone(), i))
            .collect();

        let mut closure = BTreeSet::new();
        for occ in &occurrences {
            let mut up = occ.parent;
            while let Some(p) = up {
                closure.insert((occurrences[p].path.clone(), occ.path.clone()));
                up = occurrences[p].parent;
            }
        }

        let mut resolved = ResolvedNet {
            net: net.clone(),
            occurrences,
            by_path,
            connectors: Vec::new(),
            closure: AncestorRelation { pairs: closure },
            diagnostics: Vec::new(),
        };

        for (index, conn) in net.connectors.iter().enumerate() {
            let label = format!("{} -> {}", conn.source, conn.target);
            if conn.kind != LinkKind::Signal {
                diagnostics.push(Diagnostic {
                    rule: Rule::NonSignalConnector,
                    path: label.clone(),
                    message: format!(
                        "`{}` links are only allowed in views",
                        conn.kind.keyword()
                    ),
                    span: conn.span.clone(),
                });
            }
            if conn.signals.is_empty() {
                diagnostics.push(Diagnostic {
                    rule: Rule::MissingSignal,
                    path: label.clone(),
                    message: "connectors in a complete net must carry at least one signal"
                        .to_string(),
                    span: conn.span.clone(),
                });
            }
            let mut endpoints = Vec::with_capacity(2);
            for end in [&conn.source, &conn.target] {
                match resolved.resolve(end) {
                    Ok(p) => endpoints.push(p),
                    Err(ResolveError::NotFound(_)) => diagnostics.push(Diagnostic {
                        rule: Rule::DanglingEndpoint,
                        path: end.to_string(),
                        message: format!("connector endpoint `{end}` does not name a block"),
                        span: conn.span.clone(),
                    }),
                    Err(err @ ResolveError::Ambiguous { .. }) => diagnostics.push(Diagnostic {
                        rule: Rule::AmbiguousEndpoint,
                        path: end.to_string(),
                        message: err.to_string(),
                        span: conn.span.clone(),
                    }),
                }
            }
            let [source, target]: [BlockPath; 2] = match endpoints.try_into() {
                Ok(pair) => pair,
                Err(_) => continue,
            };
            if source == target {
                diagnostics.push(Diagnostic {
                    rule: Rule::SelfLoop,
                    path: source.to_string(),
                    message: "connector source and target are the same block".to_string(),
                    span: conn.span.clone(),
                });
                continue;
            }
            resolved.connectors.push(ResolvedConnector {
                index,
                kind: conn.kind,
                source,
                target,
                signals: conn.signals.iter().cloned().collect(),
                span: conn.span.clone(),
            });
        }
        resolved.diagnostics = diagnostics;
        resolved
    }

    pub fn name(&self) -> &Identifier {
        &self.net.name
    }

    pub fn root(&self) -> &BlockPath {
        &self.occurrences[0].path
    }

    pub fn occurrences(&self) -> &[Occurrence] {
        &self.occurrences
    }

    pub fn occurrence(&self, path: &BlockPath) -> Option<&Occurrence> {
        self.by_path.get(path).map(|&i| &self.occurrences[i])
    }

    pub fn contains_block(&self, path: &BlockPath) -> bool {
        self.by_path.contains_key(path)
    }

    pub fn connectors(&self) -> &[ResolvedConnector] {
        &self.connectors
    }

    pub fn closure(&self) -> &AncestorRelation {
        &self.closure
    }

    pub fn diagnostics(&self) -> &[Diagnostic] {
        &self.diagnostics
    }

    /// True when some net connector carries the signal.
    pub fn carries_signal(&self, signal: &Identifier) -> bool {
        self.connectors.iter().any(|c| c.signals.contains(signal))
    }

    /// Does the `index`-th path segment of `occ` match `name`? Instances also
    /// answer to their definition name.
    fn segment_matches(&self, occ: &Occurrence, depth_from_end: usize, name: &Identifier) -> bool {
        let segs = occ.path.segments();
        let seg = &segs[segs.len() - 1 - depth_from_end];
        if seg == name {
            return true;
        }
        // walk up to the occurrence at that depth to see its definition
        let mut idx = self.by_path[&occ.path];
        for _ in 0..depth_from_end {
            idx = match self.occurrences[idx].parent {
                Some(p) => p,
                None => return false,
            };
        }
        self.occurrences[idx].definition.as_ref() == Some(name)
    }

    /// Resolves a reference as written in a model to an occurrence path.
    ///
    /// Multi-segment references are tried as an absolute path, then as a
    /// path relative to the net root. Otherwise, and always for single
    /// names, the reference must match the trailing segments of exactly one
    /// occurrence.
    pub fn resolve(&self, reference: &BlockPath) -> Result<BlockPath, ResolveError> {
        if reference.len() > 1 {
            if self.by_path.contains_key(reference) {
                return Ok(reference.clone());
            }
            let mut relative = self.root().clone();
            for seg in reference.segments() {
                relative = relative.child(seg.clone());
            }
            if self.by_path.contains_key(&relative) {
                return Ok(relative);
            }
        }
        let wanted = reference.segments();
        let candidates: Vec<BlockPath> = self
            .occurrences
            .iter()
            .filter(|occ| occ.path.len() >= wanted.len())
            .filter(|occ| {
                wanted
                    .iter()
                    .rev()
                    .enumerate()
                    .all(|(depth, name)| self.segment_matches(occ, depth, name))
            })
            .map(|occ| occ.path.clone())
            .collect();
        match candidates.len() {
            0 => Err(ResolveError::NotFound(reference.to_string())),
            1 => Ok(candidates.into_iter().next().unwrap()),
            _ => Err(ResolveError::Ambiguous {
                name: reference.to_string(),
                candidates,
            }),
        }
    }
}

/// Structural diagnostics of a net; empty iff the net is well-formed.
pub fn validate_net(net: &FunctionNet) -> Vec<Diagnostic> {
    ResolvedNet::new(net).diagnostics
}

/// Transitive closure of the direct child relation after instance expansion.
pub fn containment_closure(net: &FunctionNet) -> AncestorRelation {
    ResolvedNet::new(net).closure
}

pub fn resolve_reference(name: &BlockPath, net: &ResolvedNet) -> Result<BlockPath, ResolveError> {
    net.resolve(name)
}
