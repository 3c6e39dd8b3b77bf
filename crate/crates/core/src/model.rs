//! Structural model of function nets and views.
//!
//! These are the syntax-level values produced by the parser. Name resolution,
//! instance expansion and the containment relation live in [`crate::net`].

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use thiserror::Error;

/// Location of a parsed element. Lines and columns are 1-based.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Span {
    pub file: Arc<str>,
    pub line: u32,
    pub column: u32,
    pub len: u32,
}

impl Span {
    pub fn new(file: Arc<str>, line: u32, column: u32, len: u32) -> Self {
        Span {
            file,
            line,
            column,
            len,
        }
    }
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.file.is_empty() {
            write!(f, "{}:{}", self.line, self.column)
        } else {
            write!(f, "{}:{}:{}", self.file, self.line, self.column)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IdentifierError {
    #[error("identifier is empty")]
    Empty,
    #[error("identifier `{0}` contains an invalid character")]
    InvalidChar(String),
}

/// A single block, signal, or element name.
///
/// Names start with a letter or `_` and continue with letters, digits, or
/// `_`. They never contain whitespace or the `.` path separator.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Identifier(String);

impl Identifier {
    pub fn new(text: impl Into<String>) -> Result<Self, IdentifierError> {
        let text = text.into();
        let mut chars = text.chars();
        match chars.next() {
            None => return Err(IdentifierError::Empty),
            Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
            Some(_) => return Err(IdentifierError::InvalidChar(text)),
        }
        if !chars.all(|c| c.is_ascii_alphanumeric() || c == '_') {
            return Err(IdentifierError::InvalidChar(text));
        }
        Ok(Identifier(text))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Identifier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl FromStr for Identifier {
    type Err = IdentifierError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Identifier::new(s)
    }
}

impl AsRef<str> for Identifier {
    fn as_ref(&self) -> &str {
        &self.0
    }
}

impl PartialEq<str> for Identifier {
    fn eq(&self, other: &str) -> bool {
        self.0 == other
    }
}

impl PartialEq<&str> for Identifier {
    fn eq(&self, other: &&str) -> bool {
        self.0 == *other
    }
}

/// A dot-separated sequence of names.
///
/// Used both for references as written in a model (`CLRequestProc.ButtonOn`,
/// `left`) and for fully qualified occurrence paths, which always start with
/// the net name.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BlockPath(Vec<Identifier>);

impl BlockPath {
    pub fn new(segments: Vec<Identifier>) -> Self {
        assert!(!segments.is_empty(), "block path must have a segment");
        BlockPath(segments)
    }

    pub fn single(name: Identifier) -> Self {
        BlockPath(vec![name])
    }

    pub fn segments(&self) -> &[Identifier] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn last(&self) -> &Identifier {
        self.0.last().expect("non-empty path")
    }

    pub fn first(&self) -> &Identifier {
        &self.0[0]
    }

    pub fn child(&self, name: Identifier) -> BlockPath {
        let mut segments = self.0.clone();
        segments.push(name);
        BlockPath(segments)
    }

    pub fn parent(&self) -> Option<BlockPath> {
        if self.0.len() < 2 {
            None
        } else {
            Some(BlockPath(self.0[..self.0.len() - 1].to_vec()))
        }
    }

    /// True when `self` is a proper ancestor of `other`.
    pub fn is_strict_prefix_of(&self, other: &BlockPath) -> bool {
        self.0.len() < other.0.len() && other.0[..self.0.len()] == self.0[..]
    }

    pub fn ends_with(&self, suffix: &[Identifier]) -> bool {
        self.0.len() >= suffix.len() && self.0[self.0.len() - suffix.len()..] == *suffix
    }
}

impl fmt::Display for BlockPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, seg) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(".")?;
            }
            f.write_str(seg.as_str())?;
        }
        Ok(())
    }
}

impl FromStr for BlockPath {
    type Err = IdentifierError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let segments = s
            .split('.')
            .map(Identifier::new)
            .collect::<Result<Vec<_>, _>>()?;
        Ok(BlockPath(segments))
    }
}

/// Kind of a communication link.
///
/// Complete nets only carry signal links. Views may add mechanical,
/// hydraulic, and electrical links (M/H/E ports).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LinkKind {
    Signal,
    Mechanical,
    Hydraulic,
    Electrical,
}

impl LinkKind {
    pub fn keyword(self) -> &'static str {
        match self {
            LinkKind::Signal => "connect",
            LinkKind::Mechanical => "mech",
            LinkKind::Hydraulic => "hydr",
            LinkKind::Electrical => "elec",
        }
    }

    pub fn port_letter(self) -> Option<char> {
        match self {
            LinkKind::Signal => None,
            LinkKind::Mechanical => Some('M'),
            LinkKind::Hydraulic => Some('H'),
            LinkKind::Electrical => Some('E'),
        }
    }
}

/// Port on a view block. Complete nets attach connectors to blocks directly,
/// so explicit ports only arise from non-signal view links.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Port {
    pub kind: LinkKind,
    pub block: BlockPath,
}

/// A directed connector. Signals keep declaration order for printing but are
/// compared as a set by the checks.
#[derive(Debug, Clone, PartialEq)]
pub struct Connector {
    pub kind: LinkKind,
    pub signals: Vec<Identifier>,
    pub source: BlockPath,
    pub target: BlockPath,
    pub span: Span,
}

impl Connector {
    pub fn signal(signals: Vec<Identifier>, source: BlockPath, target: BlockPath) -> Self {
        Connector {
            kind: LinkKind::Signal,
            signals,
            source,
            target,
            span: Span::default(),
        }
    }
}

/// A block occurrence declared inline (`block X { ... }`).
#[derive(Debug, Clone, PartialEq)]
pub struct BlockDecl {
    pub name: Identifier,
    pub children: Vec<BlockItem>,
    pub span: Span,
}

/// A reusable definition (`blockdef X { ... }`). Definitions are not
/// occurrences; they only appear in the hierarchy through instances.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockDef {
    pub name: Identifier,
    pub children: Vec<BlockItem>,
    pub span: Span,
}

/// A named instance of a definition (`instance left : Door`).
#[derive(Debug, Clone, PartialEq)]
pub struct InstanceRef {
    pub name: Identifier,
    pub definition: Identifier,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq)]
pub enum BlockItem {
    Block(BlockDecl),
    Instance(InstanceRef),
    Definition(BlockDef),
}

/// The complete logical architecture. The net itself is the root block.
#[derive(Debug, Clone, PartialEq)]
pub struct FunctionNet {
    pub name: Identifier,
    pub items: Vec<BlockItem>,
    pub connectors: Vec<Connector>,
    pub span: Span,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Marker {
    Plain,
    Ext,
    Env,
}

impl Marker {
    pub fn keyword(self) -> &'static str {
        match self {
            Marker::Plain => "block",
            Marker::Ext => "ext",
            Marker::Env => "env",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ViewKind {
    Feature,
    Variant { of: Identifier },
    Mode,
    ScenarioBase,
}

/// A block shown in a view. `reference` names a net block for plain and ext
/// blocks; for env blocks it is only a label.
#[derive(Debug, Clone, PartialEq)]
pub struct ViewBlock {
    pub marker: Marker,
    pub reference: BlockPath,
    pub children: Vec<ViewBlock>,
    pub span: Span,
}

impl ViewBlock {
    pub fn new(marker: Marker, reference: BlockPath) -> Self {
        ViewBlock {
            marker,
            reference,
            children: Vec::new(),
            span: Span::default(),
        }
    }

    pub fn with_children(mut self, children: Vec<ViewBlock>) -> Self {
        self.children = children;
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct View {
    pub name: Identifier,
    pub kind: Option<ViewKind>,
    pub base: Identifier,
    pub blocks: Vec<ViewBlock>,
    pub connectors: Vec<Connector>,
    pub span: Span,
}

impl View {
    /// Visits every view block depth-first, parents before children.
    pub fn walk_blocks(&self) -> Vec<&ViewBlock> {
        fn go<'a>(blocks: &'a [ViewBlock], out: &mut Vec<&'a ViewBlock>) {
            for b in blocks {
                out.push(b);
                go(&b.children, out);
            }
        }
        let mut out = Vec::new();
        go(&self.blocks, &mut out);
        out
    }

    /// Ports implied by the non-signal links of this view.
    pub fn ports(&self) -> Vec<Port> {
        let mut ports: Vec<Port> = self
            .connectors
            .iter()
            .filter(|c| c.kind != LinkKind::Signal)
            .flat_map(|c| {
                [
                    Port {
                        kind: c.kind,
                        block: c.source.clone(),
                    },
                    Port {
                        kind: c.kind,
                        block: c.target.clone(),
                    },
                ]
            })
            .collect();
        ports.sort();
        ports.dedup();
        ports
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identifier_rejects_separators_and_whitespace() {
        assert!(Identifier::new("CLRequestProc").is_ok());
        assert!(Identifier::new("_x1").is_ok());
        assert_eq!(Identifier::new(""), Err(IdentifierError::Empty));
        assert!(Identifier::new("a.b").is_err());
        assert!(Identifier::new("a b").is_err());
        assert!(Identifier::new("1a").is_err());
    }

    #[test]
    fn path_prefix() {
        let a: BlockPath = "CarComfort.CLRequestProc".parse().unwrap();
        let b: BlockPath = "CarComfort.CLRequestProc.ButtonOn".parse().unwrap();
        assert!(a.is_strict_prefix_of(&b));
        assert!(!b.is_strict_prefix_of(&a));
        assert!(!a.is_strict_prefix_of(&a));
        assert_eq!(b.parent(), Some(a));
        assert_eq!(b.to_string(), "CarComfort.CLRequestProc.ButtonOn");
    }
}
