//! Textual syntax for nets, views, mode machines, variant sets, scenarios and
//! simulation stubs.
//!
//! Elements are keyword-led and brace-delimited; layout is insignificant and
//! `//` starts a line comment. Comments directly above a top-level element
//! are kept with it; comments inside an element are not part of the model.

mod lexer;
mod parser;
mod render;

use std::collections::HashMap;
use std::fmt;
use std::path::Path;
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::model::{BlockItem, FunctionNet, Identifier, Span, View, ViewBlock};
use crate::modes::{ModeMachine, VariantSet};
use crate::scenario::{Condition, Scenario};
use crate::sim::StubSet;

pub use render::render_model;

/// Words that cannot be used as names.
pub const KEYWORDS: &[&str] = &[
    "net", "block", "instance", "blockdef", "connect", "mech", "hydr", "elec", "view", "feature",
    "variant", "of", "mode", "scenariobase", "on", "ext", "env", "scenario", "policy", "complete",
    "visible", "free", "trigger", "invalid", "modes", "state", "from", "to", "when", "initial",
    "variants", "stubs", "rule", "emit",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ErrorCode {
    Syntax,
    ReservedWord,
    NonNumericOperand,
    BadSequence,
    DuplicateName,
    UnknownBase,
    UnknownView,
    UnknownMode,
}

impl ErrorCode {
    pub fn as_str(self) -> &'static str {
        match self {
            ErrorCode::Syntax => "SYNTAX",
            ErrorCode::ReservedWord => "RESERVED_WORD",
            ErrorCode::NonNumericOperand => "NON_NUMERIC_OPERAND",
            ErrorCode::BadSequence => "BAD_SEQUENCE",
            ErrorCode::DuplicateName => "DUPLICATE_NAME",
            ErrorCode::UnknownBase => "UNKNOWN_BASE",
            ErrorCode::UnknownView => "UNKNOWN_VIEW",
            ErrorCode::UnknownMode => "UNKNOWN_MODE",
        }
    }
}

impl fmt::Display for ErrorCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{span}: {code}: {message}")]
pub struct ParseError {
    pub span: Span,
    pub code: ErrorCode,
    pub message: String,
    pub expected: Vec<String>,
}

impl ParseError {
    pub(crate) fn new(span: Span, code: ErrorCode, message: String) -> Self {
        ParseError {
            span,
            code,
            message,
            expected: Vec::new(),
        }
    }

    pub(crate) fn expecting(mut self, expected: Vec<String>) -> Self {
        self.expected = expected;
        self
    }
}

/// All errors of one rejected input, in source order. Never empty.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub struct ParseErrors(pub Vec<ParseError>);

impl fmt::Display for ParseErrors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{e}")?;
        }
        Ok(())
    }
}

impl From<ParseError> for ParseErrors {
    fn from(e: ParseError) -> Self {
        ParseErrors(vec![e])
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Element {
    Net(FunctionNet),
    View(View),
    Modes(ModeMachine),
    Variants(VariantSet),
    Scenario(Scenario),
    Stubs(StubSet),
}

impl Element {
    pub fn name(&self) -> &Identifier {
        match self {
            Element::Net(e) => &e.name,
            Element::View(e) => &e.name,
            Element::Modes(e) => &e.name,
            Element::Variants(e) => &e.name,
            Element::Scenario(e) => &e.name,
            Element::Stubs(e) => &e.name,
        }
    }

    pub fn span(&self) -> &Span {
        match self {
            Element::Net(e) => &e.span,
            Element::View(e) => &e.span,
            Element::Modes(e) => &e.span,
            Element::Variants(e) => &e.span,
            Element::Scenario(e) => &e.span,
            Element::Stubs(e) => &e.span,
        }
    }

    pub fn keyword(&self) -> &'static str {
        match self {
            Element::Net(_) => "net",
            Element::View(_) => "view",
            Element::Modes(_) => "modes",
            Element::Variants(_) => "variants",
            Element::Scenario(_) => "scenario",
            Element::Stubs(_) => "stubs",
        }
    }
}

/// A top-level element with the comment lines written above it.
#[derive(Debug, Clone, PartialEq)]
pub struct Item {
    pub comments: Vec<String>,
    pub element: Element,
}

impl Item {
    pub fn new(element: Element) -> Self {
        Item {
            comments: Vec::new(),
            element,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Model {
    pub items: Vec<Item>,
    /// Comments after the last element.
    pub trailing_comments: Vec<String>,
}

macro_rules! accessors {
    ($iter:ident, $get:ident, $variant:ident, $ty:ty) => {
        pub fn $iter(&self) -> impl Iterator<Item = &$ty> + '_ {
            self.items.iter().filter_map(|i| match &i.element {
                Element::$variant(x) => Some(x),
                _ => None,
            })
        }

        pub fn $get(&self, name: &str) -> Option<&$ty> {
            self.$iter().find(|x| x.name == name)
        }
    };
}

impl Model {
    pub fn from_elements(elements: Vec<Element>) -> Self {
        Model {
            items: elements.into_iter().map(Item::new).collect(),
            trailing_comments: Vec::new(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn elements(&self) -> impl Iterator<Item = &Element> + '_ {
        self.items.iter().map(|i| &i.element)
    }

    pub fn element(&self, name: &str) -> Option<&Element> {
        self.elements().find(|e| *e.name() == name)
    }

    accessors!(nets, net, Net, FunctionNet);
    accessors!(views, view, View, View);
    accessors!(mode_machines, mode_machine, Modes, ModeMachine);
    accessors!(variant_sets, variant_set, Variants, VariantSet);
    accessors!(scenarios, scenario, Scenario, Scenario);
    accessors!(stub_sets, stub_set, Stubs, StubSet);

    /// The net a view, scenario, mode machine or variant set finally rests on.
    pub fn base_net<'a>(&'a self, element: &'a Element) -> Option<&'a FunctionNet> {
        let mut current = element;
        for _ in 0..=self.items.len() {
            let next = match current {
                Element::Net(n) => return Some(n),
                Element::View(v) => &v.base,
                Element::Modes(m) => &m.base,
                Element::Variants(v) => &v.feature,
                Element::Scenario(s) => &s.base,
                Element::Stubs(s) => &s.base,
            };
            current = self.element(next.as_str())?;
        }
        None
    }

    /// A copy with every span reset, for structural comparison.
    pub fn without_spans(&self) -> Model {
        let mut m = self.clone();
        for item in &mut m.items {
            strip_element(&mut item.element);
        }
        m
    }
}

fn strip_items(items: &mut [BlockItem]) {
    for item in items {
        match item {
            BlockItem::Block(b) => {
                b.span = Span::default();
                strip_items(&mut b.children);
            }
            BlockItem::Definition(d) => {
                d.span = Span::default();
                strip_items(&mut d.children);
            }
            BlockItem::Instance(i) => i.span = Span::default(),
        }
    }
}

fn strip_view_blocks(blocks: &mut [ViewBlock]) {
    for b in blocks {
        b.span = Span::default();
        strip_view_blocks(&mut b.children);
    }
}

fn strip_element(e: &mut Element) {
    match e {
        Element::Net(n) => {
            n.span = Span::default();
            strip_items(&mut n.items);
            n.connectors.iter_mut().for_each(|c| c.span = Span::default());
        }
        Element::View(v) => {
            v.span = Span::default();
            strip_view_blocks(&mut v.blocks);
            v.connectors.iter_mut().for_each(|c| c.span = Span::default());
        }
        Element::Modes(m) => {
            m.span = Span::default();
            m.initial_span = Span::default();
            m.states.iter_mut().for_each(|s| s.span = Span::default());
            m.transitions.iter_mut().for_each(|t| t.span = Span::default());
        }
        Element::Variants(v) => {
            v.span = Span::default();
            v.variants.iter_mut().for_each(|x| x.span = Span::default());
        }
        Element::Scenario(s) => {
            s.span = Span::default();
            s.interactions.iter_mut().for_each(|i| i.span = Span::default());
        }
        Element::Stubs(s) => {
            s.span = Span::default();
            s.rules.iter_mut().for_each(|r| r.span = Span::default());
        }
    }
}

/// Parses without checking names across elements.
pub fn parse_unresolved(text: &str, file: &str) -> Result<Model, ParseErrors> {
    let file: Arc<str> = Arc::from(file);
    let lexed = lexer::lex(text, &file)?;
    let mut p = parser::Parser::new(&lexed.tokens);
    let mut parsed = Vec::new();
    while !p.at_eof() {
        let element = p.element()?;
        let first_line = element.span().line;
        let last_line = p.last_span().line;
        parsed.push((element, first_line, last_line));
    }

    let mut items: Vec<Item> = Vec::with_capacity(parsed.len());
    let mut trailing_comments = Vec::new();
    let mut comments = lexed.comments.into_iter().peekable();
    for (element, first, last) in parsed {
        let mut above = Vec::new();
        while let Some(c) = comments.next_if(|c| c.line < first) {
            above.push(c.text);
        }
        while comments.next_if(|c| c.line < last).is_some() {}
        items.push(Item {
            comments: above,
            element,
        });
    }
    trailing_comments.extend(comments.map(|c| c.text));
    Ok(Model {
        items,
        trailing_comments,
    })
}

/// Number of `//` comments in `text`, or `None` if it does not lex.
pub fn comment_count(text: &str) -> Option<usize> {
    lexer::lex(text, &Arc::from("")).ok().map(|l| l.comments.len())
}

pub fn parse_model(text: &str) -> Result<Model, ParseErrors> {
    parse_model_named(text, "")
}

/// Like [`parse_model`], recording `file` in every span.
pub fn parse_model_named(text: &str, file: &str) -> Result<Model, ParseErrors> {
    let model = parse_unresolved(text, file)?;
    resolve_scopes(&model)?;
    Ok(model)
}

pub fn parse_model_file(path: &Path) -> Result<Model, LoadError> {
    let text = std::fs::read_to_string(path).map_err(|source| LoadError::Io {
        path: path.display().to_string(),
        source,
    })?;
    Ok(parse_model_named(&text, &path.display().to_string())?)
}

#[derive(Debug, Error)]
pub enum LoadError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("{0}")]
    Parse(#[from] ParseErrors),
}

/// Joins separately parsed files into one namespace and checks it.
pub fn merge(models: Vec<Model>) -> Result<Model, ParseErrors> {
    let mut merged = Model::default();
    for m in models {
        merged.items.extend(m.items);
        merged.trailing_comments.extend(m.trailing_comments);
    }
    resolve_scopes(&merged)?;
    Ok(merged)
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Kind {
    Net,
    View,
    Other,
}

/// Checks that names are unique and every cross-element reference names an
/// element of the right kind.
pub fn resolve_scopes(model: &Model) -> Result<(), ParseErrors> {
    let mut errors = Vec::new();
    let mut kinds: HashMap<&str, (Kind, &'static str)> = HashMap::new();
    for e in model.elements() {
        let kind = match e {
            Element::Net(_) => Kind::Net,
            Element::View(_) => Kind::View,
            _ => Kind::Other,
        };
        if let Some((_, first)) = kinds.get(e.name().as_str()) {
            errors.push(ParseError::new(
                e.span().clone(),
                ErrorCode::DuplicateName,
                format!("`{}` is already declared as a {first}", e.name()),
            ));
        } else {
            kinds.insert(e.name().as_str(), (kind, e.keyword()));
        }
    }

    let want = |errors: &mut Vec<ParseError>,
                name: &Identifier,
                allowed: &[Kind],
                span: &Span,
                code: ErrorCode,
                what: &str| {
        let found = kinds.get(name.as_str());
        if !found.is_some_and(|(k, _)| allowed.contains(k)) {
            let detail = match found {
                Some((_, kw)) => format!("`{name}` is a {kw}, not a {what}"),
                None => format!("no {what} named `{name}`"),
            };
            errors.push(ParseError::new(span.clone(), code, detail).expecting(vec![what.to_string()]));
        }
    };

    for e in model.elements() {
        match e {
            Element::Net(_) => {}
            Element::View(v) => {
                want(&mut errors, &v.base, &[Kind::Net], &v.span, ErrorCode::UnknownBase, "net");
                if let Some(crate::model::ViewKind::Variant { of }) = &v.kind {
                    want(&mut errors, of, &[Kind::View], &v.span, ErrorCode::UnknownBase, "view");
                }
            }
            Element::Scenario(s) => {
                want(&mut errors, &s.base, &[Kind::View], &s.span, ErrorCode::UnknownBase, "view");
            }
            Element::Stubs(s) => {
                want(&mut errors, &s.base, &[Kind::Net], &s.span, ErrorCode::UnknownBase, "net");
            }
            Element::Variants(vs) => {
                want(&mut errors, &vs.feature, &[Kind::View], &vs.span, ErrorCode::UnknownBase, "view");
                let mut seen: Vec<&Identifier> = Vec::new();
                for v in &vs.variants {
                    if seen.contains(&&v.name) {
                        errors.push(ParseError::new(
                            v.span.clone(),
                            ErrorCode::DuplicateName,
                            format!("variant `{}` is declared twice", v.name),
                        ));
                    }
                    seen.push(&v.name);
                    want(&mut errors, &v.view, &[Kind::View], &v.span, ErrorCode::UnknownView, "view");
                }
            }
            Element::Modes(m) => {
                want(
                    &mut errors,
                    &m.base,
                    &[Kind::View, Kind::Net],
                    &m.span,
                    ErrorCode::UnknownBase,
                    "view or net",
                );
                let mut seen: Vec<&Identifier> = Vec::new();
                for s in &m.states {
                    if seen.contains(&&s.name) {
                        errors.push(ParseError::new(
                            s.span.clone(),
                            ErrorCode::DuplicateName,
                            format!("mode `{}` is declared twice", s.name),
                        ));
                    }
                    seen.push(&s.name);
                    want(&mut errors, &s.view, &[Kind::View], &s.span, ErrorCode::UnknownView, "view");
                }
                let mut mode = |name: &Identifier, span: &Span| {
                    if !seen.contains(&name) {
                        errors.push(ParseError::new(
                            span.clone(),
                            ErrorCode::UnknownMode,
                            format!("`{name}` is not a mode of `{}`", m.name),
                        ));
                    }
                };
                for t in &m.transitions {
                    mode(&t.from, &t.span);
                    mode(&t.to, &t.span);
                }
                mode(&m.initial, &m.initial_span);
            }
        }
    }

    if errors.is_empty() {
        Ok(())
    } else {
        errors.sort_by_key(|a| (a.span.line, a.span.column));
        Err(ParseErrors(errors))
    }
}

/// Parses a stand-alone condition such as `invalid | > 200`.
pub fn parse_condition(text: &str) -> Result<Condition, ParseError> {
    let lexed = lexer::lex(text, &Arc::from(""))?;
    let mut p = parser::Parser::new(&lexed.tokens);
    let c = p.condition()?;
    p.expect_eof()?;
    Ok(c)
}
