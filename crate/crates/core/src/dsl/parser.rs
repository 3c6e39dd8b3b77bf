use std::mem::discriminant;

use crate::model::{
    BlockDecl, BlockDef, BlockItem, BlockPath, Connector, FunctionNet, Identifier, InstanceRef,
    LinkKind, Marker, Span, View, ViewBlock, ViewKind,
};
use crate::modes::{ModeMachine, ModeState, ModeTransition, Variant, VariantSet};
use crate::scenario::{Atom, Condition, Interaction, Policy, Scenario};
use crate::sim::{StubRule, StubSet};
use crate::value::Value;

use super::lexer::{Tok, Token};
use super::{Element, ErrorCode, ParseError, KEYWORDS};

type PResult<T> = Result<T, ParseError>;

pub(crate) struct Parser<'a> {
    toks: &'a [Token],
    pos: usize,
}

const ATOM_START: [&str; 8] = ["`>`", "`>>`", "`==`", "`=`", "`<`", "`<<`", "`:`", "`invalid`"];

impl<'a> Parser<'a> {
    pub(crate) fn new(toks: &'a [Token]) -> Self {
        Parser { toks, pos: 0 }
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn span(&self) -> Span {
        self.toks[self.pos].span.clone()
    }

    fn bump(&mut self) -> &Token {
        let t = &self.toks[self.pos];
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    pub(crate) fn at_eof(&self) -> bool {
        matches!(self.peek(), Tok::Eof)
    }

    fn at_kw(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    fn unexpected(&self, expected: &[&str]) -> ParseError {
        let found = self.peek().describe();
        let message = match expected {
            [] => format!("unexpected {found}"),
            [one] => format!("expected {one}, found {found}"),
            many => format!("expected one of {}, found {found}", many.join(", ")),
        };
        ParseError::new(self.span(), ErrorCode::Syntax, message)
            .expecting(expected.iter().map(|s| s.to_string()).collect())
    }

    fn expect_kw(&mut self, kw: &str) -> PResult<Span> {
        if self.at_kw(kw) {
            Ok(self.bump().span.clone())
        } else {
            Err(self.unexpected(&[&format!("`{kw}`")]))
        }
    }

    fn expect(&mut self, tok: Tok) -> PResult<Span> {
        if discriminant(self.peek()) == discriminant(&tok) {
            Ok(self.bump().span.clone())
        } else {
            Err(self.unexpected(&[&format!("`{}`", tok.symbol())]))
        }
    }

    fn eat(&mut self, tok: Tok) -> bool {
        if discriminant(self.peek()) == discriminant(&tok) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn ident(&mut self, what: &str) -> PResult<Identifier> {
        match self.peek() {
            Tok::Ident(s) if KEYWORDS.contains(&s.as_str()) => Err(ParseError::new(
                self.span(),
                ErrorCode::ReservedWord,
                format!("`{s}` is a reserved word and cannot be used as {what}"),
            )
            .expecting(vec![what.to_string()])),
            Tok::Ident(s) => {
                let id = Identifier::new(s.clone()).expect("lexer yields identifiers");
                self.bump();
                Ok(id)
            }
            _ => Err(self.unexpected(&[what])),
        }
    }

    fn path(&mut self, what: &str) -> PResult<BlockPath> {
        let mut segments = vec![self.ident(what)?];
        while self.eat(Tok::Dot) {
            segments.push(self.ident("a block name")?);
        }
        Ok(BlockPath::new(segments))
    }

    pub(crate) fn element(&mut self) -> PResult<Element> {
        let what = ["`net`", "`view`", "`modes`", "`variants`", "`scenario`", "`stubs`"];
        let Tok::Ident(kw) = self.peek() else {
            return Err(self.unexpected(&what));
        };
        match kw.as_str() {
            "net" => self.net().map(Element::Net),
            "view" => self.view().map(Element::View),
            "modes" => self.modes().map(Element::Modes),
            "variants" => self.variants().map(Element::Variants),
            "scenario" => self.scenario().map(Element::Scenario),
            "stubs" => self.stubs().map(Element::Stubs),
            _ => Err(self.unexpected(&what)),
        }
    }

    fn net(&mut self) -> PResult<FunctionNet> {
        let span = self.expect_kw("net")?;
        let name = self.ident("a net name")?;
        self.expect(Tok::LBrace)?;
        let items = self.block_items(&["`block`", "`instance`", "`blockdef`", "`connect`", "`}`"])?;
        let mut connectors = Vec::new();
        while self.at_kw("connect") {
            connectors.push(self.connector()?);
        }
        if !self.eat(Tok::RBrace) {
            return Err(self.unexpected(&["`connect`", "`}`"]));
        }
        Ok(FunctionNet {
            name,
            items,
            connectors,
            span,
        })
    }

    fn block_items(&mut self, expected: &[&str]) -> PResult<Vec<BlockItem>> {
        let mut items = Vec::new();
        loop {
            let span = self.span();
            if self.at_kw("block") || self.at_kw("blockdef") {
                let def = self.at_kw("blockdef");
                self.bump();
                let name = self.ident("a block name")?;
                self.expect(Tok::LBrace)?;
                let children = self.block_items(&["`block`", "`instance`", "`blockdef`", "`}`"])?;
                if !self.eat(Tok::RBrace) {
                    return Err(self.unexpected(&["`block`", "`instance`", "`blockdef`", "`}`"]));
                }
                items.push(if def {
                    BlockItem::Definition(BlockDef {
                        name,
                        children,
                        span,
                    })
                } else {
                    BlockItem::Block(BlockDecl {
                        name,
                        children,
                        span,
                    })
                });
            } else if self.at_kw("instance") {
                self.bump();
                let name = self.ident("an instance name")?;
                self.expect(Tok::Colon)?;
                let definition = self.ident("a definition name")?;
                items.push(BlockItem::Instance(InstanceRef {
                    name,
                    definition,
                    span,
                }));
            } else if matches!(self.peek(), Tok::RBrace) || self.at_kw("connect") {
                return Ok(items);
            } else {
                return Err(self.unexpected(expected));
            }
        }
    }

    fn link_kind(&self) -> Option<LinkKind> {
        [
            LinkKind::Signal,
            LinkKind::Mechanical,
            LinkKind::Hydraulic,
            LinkKind::Electrical,
        ]
        .into_iter()
        .find(|k| self.at_kw(k.keyword()))
    }

    fn connector(&mut self) -> PResult<Connector> {
        let span = self.span();
        let kind = self.link_kind().ok_or_else(|| self.unexpected(&["`connect`"]))?;
        self.bump();
        let mut signals = Vec::new();
        if !matches!(self.peek(), Tok::Colon) {
            signals.push(self.ident("a signal name")?);
            while self.eat(Tok::Comma) {
                signals.push(self.ident("a signal name")?);
            }
        }
        self.expect(Tok::Colon)?;
        let source = self.path("a source block")?;
        self.expect(Tok::Arrow)?;
        let target = self.path("a target block")?;
        Ok(Connector {
            kind,
            signals,
            source,
            target,
            span,
        })
    }

    fn view(&mut self) -> PResult<View> {
        let span = self.expect_kw("view")?;
        let name = self.ident("a view name")?;
        let kind = if self.at_kw("feature") {
            self.bump();
            Some(ViewKind::Feature)
        } else if self.at_kw("variant") {
            self.bump();
            self.expect_kw("of")?;
            Some(ViewKind::Variant {
                of: self.ident("a view name")?,
            })
        } else if self.at_kw("mode") {
            self.bump();
            Some(ViewKind::Mode)
        } else if self.at_kw("scenariobase") {
            self.bump();
            Some(ViewKind::ScenarioBase)
        } else {
            None
        };
        if !self.at_kw("on") {
            return Err(self.unexpected(&[
                "`feature`",
                "`variant`",
                "`mode`",
                "`scenariobase`",
                "`on`",
            ]));
        }
        self.bump();
        let base = self.ident("a net name")?;
        self.expect(Tok::LBrace)?;
        let blocks = self.view_blocks()?;
        let mut connectors = Vec::new();
        while self.link_kind().is_some() {
            connectors.push(self.connector()?);
        }
        if !self.eat(Tok::RBrace) {
            return Err(self.unexpected(&["`connect`", "`mech`", "`hydr`", "`elec`", "`}`"]));
        }
        Ok(View {
            name,
            kind,
            base,
            blocks,
            connectors,
            span,
        })
    }

    fn marker(&self) -> Option<Marker> {
        [Marker::Plain, Marker::Ext, Marker::Env]
            .into_iter()
            .find(|m| self.at_kw(m.keyword()))
    }

    fn view_blocks(&mut self) -> PResult<Vec<ViewBlock>> {
        let mut blocks = Vec::new();
        while let Some(marker) = self.marker() {
            let span = self.bump().span.clone();
            let reference = self.path("a block name")?;
            let mut children = Vec::new();
            if self.eat(Tok::LBrace) {
                children = self.view_blocks()?;
                if !self.eat(Tok::RBrace) {
                    return Err(self.unexpected(&["`block`", "`ext`", "`env`", "`}`"]));
                }
            }
            blocks.push(ViewBlock {
                marker,
                reference,
                children,
                span,
            });
        }
        Ok(blocks)
    }

    fn value(&mut self) -> PResult<Value> {
        match self.peek().clone() {
            Tok::Number { value, unit, .. } => {
                self.bump();
                Ok(Value::Number { value, unit })
            }
            Tok::Ident(s) if s == "invalid" => {
                self.bump();
                Ok(Value::Invalid)
            }
            Tok::Ident(_) => Ok(Value::Symbol(self.ident("a value")?)),
            _ => Err(self.unexpected(&["a value"])),
        }
    }

    fn numeric_value(&mut self) -> PResult<Value> {
        let span = self.span();
        let v = self.value()?;
        if v.is_numeric() {
            Ok(v)
        } else {
            Err(ParseError::new(
                span,
                ErrorCode::NonNumericOperand,
                format!("ordering operators need a number, found `{v}`"),
            )
            .expecting(vec!["a number".to_string()]))
        }
    }

    fn atom(&mut self) -> PResult<Atom> {
        let op = self.peek().clone();
        match op {
            Tok::Gt | Tok::GtGt | Tok::Lt | Tok::LtLt => {
                self.bump();
                let v = self.numeric_value()?;
                Ok(match op {
                    Tok::Gt => Atom::Greater(v),
                    Tok::GtGt => Atom::BecomesGreater(v),
                    Tok::Lt => Atom::Less(v),
                    _ => Atom::BecomesLess(v),
                })
            }
            Tok::EqEq => {
                self.bump();
                Ok(Atom::Equals(self.value()?))
            }
            Tok::Eq => {
                self.bump();
                Ok(Atom::BecomesEqual(self.value()?))
            }
            Tok::Colon => {
                self.bump();
                let from = self.value()?;
                self.expect(Tok::Arrow)?;
                Ok(Atom::Transition(from, self.value()?))
            }
            Tok::Ident(s) if s == "invalid" => {
                self.bump();
                Ok(Atom::IsInvalid)
            }
            _ => Err(self.unexpected(&ATOM_START)),
        }
    }

    pub(crate) fn condition(&mut self) -> PResult<Condition> {
        let mut atoms = vec![self.atom()?];
        while self.eat(Tok::Pipe) {
            atoms.push(self.atom()?);
        }
        Ok(Condition::any(atoms))
    }

    fn scenario(&mut self) -> PResult<Scenario> {
        let span = self.expect_kw("scenario")?;
        let name = self.ident("a scenario name")?;
        self.expect_kw("on")?;
        let base = self.ident("a view name")?;
        self.expect_kw("policy")?;
        let policy = Policy::ALL
            .into_iter()
            .find(|p| self.at_kw(p.keyword()))
            .ok_or_else(|| self.unexpected(&["`complete`", "`visible`", "`free`"]))?;
        self.bump();
        self.expect(Tok::LBrace)?;
        let mut interactions = Vec::new();
        while let Tok::Number { text, .. } = self.peek().clone() {
            let span = self.span();
            let expected = interactions.len() as u32 + 1;
            let seq: u32 = match text.parse() {
                Ok(n) => n,
                Err(_) => {
                    return Err(ParseError::new(
                        span,
                        ErrorCode::Syntax,
                        format!("`{text}` is not a sequence number"),
                    ))
                }
            };
            if seq != expected {
                return Err(ParseError::new(
                    span,
                    ErrorCode::BadSequence,
                    format!("interaction {seq} out of order: expected {expected}"),
                )
                .expecting(vec![format!("`{expected}`")]));
            }
            self.bump();
            let trigger = self.at_kw("trigger");
            if trigger {
                self.bump();
            }
            let source = self.path("a source block")?;
            self.expect(Tok::Arrow)?;
            let target = self.path("a target block")?;
            self.expect(Tok::Colon)?;
            let signal = self.ident("a signal name")?;
            let condition = self.condition()?;
            interactions.push(Interaction {
                seq,
                trigger,
                source,
                target,
                signal,
                condition,
                span,
            });
        }
        if !self.eat(Tok::RBrace) {
            return Err(self.unexpected(&["an interaction number", "`}`"]));
        }
        Ok(Scenario {
            name,
            base,
            policy,
            interactions,
            span,
        })
    }

    fn modes(&mut self) -> PResult<ModeMachine> {
        let span = self.expect_kw("modes")?;
        let name = self.ident("a mode machine name")?;
        self.expect_kw("on")?;
        let base = self.ident("a view or net name")?;
        self.expect(Tok::LBrace)?;
        let mut states = Vec::new();
        loop {
            let span = self.span();
            if states.is_empty() {
                self.expect_kw("state")?;
            } else if !self.at_kw("state") {
                break;
            } else {
                self.bump();
            }
            let name = self.ident("a mode name")?;
            self.expect_kw("view")?;
            let view = self.ident("a view name")?;
            states.push(ModeState { name, view, span });
        }
        let mut transitions = Vec::new();
        while self.at_kw("from") {
            let span = self.bump().span.clone();
            let from = self.ident("a mode name")?;
            self.expect_kw("to")?;
            let to = self.ident("a mode name")?;
            self.expect_kw("when")?;
            let signal = self.ident("a signal name")?;
            let condition = self.condition()?;
            transitions.push(ModeTransition {
                from,
                to,
                signal,
                condition,
                span,
            });
        }
        if !self.at_kw("initial") {
            return Err(self.unexpected(&["`state`", "`from`", "`initial`"]));
        }
        let initial_span = self.bump().span.clone();
        let initial = self.ident("a mode name")?;
        self.expect(Tok::RBrace)?;
        Ok(ModeMachine {
            name,
            base,
            states,
            transitions,
            initial,
            initial_span,
            span,
        })
    }

    fn variants(&mut self) -> PResult<VariantSet> {
        let span = self.expect_kw("variants")?;
        let name = self.ident("a variant set name")?;
        self.expect_kw("of")?;
        let feature = self.ident("a view name")?;
        self.expect(Tok::LBrace)?;
        let mut variants = Vec::new();
        loop {
            let span = self.span();
            if variants.is_empty() {
                self.expect_kw("variant")?;
            } else if self.eat(Tok::RBrace) {
                break;
            } else if self.at_kw("variant") {
                self.bump();
            } else {
                return Err(self.unexpected(&["`variant`", "`}`"]));
            }
            let name = self.ident("a variant name")?;
            self.expect_kw("view")?;
            let view = self.ident("a view name")?;
            variants.push(Variant { name, view, span });
        }
        Ok(VariantSet {
            name,
            feature,
            variants,
            span,
        })
    }

    fn stubs(&mut self) -> PResult<StubSet> {
        let span = self.expect_kw("stubs")?;
        let name = self.ident("a stub set name")?;
        self.expect_kw("on")?;
        let base = self.ident("a net name")?;
        self.expect(Tok::LBrace)?;
        let mut rules = Vec::new();
        while self.at_kw("rule") {
            let span = self.bump().span.clone();
            let owner = self.path("a block name")?;
            self.expect_kw("when")?;
            let signal = self.ident("a signal name")?;
            let guard = self.condition()?;
            self.expect_kw("emit")?;
            let mut emissions = Vec::new();
            loop {
                let out = self.ident("a signal name")?;
                self.expect(Tok::Eq)?;
                emissions.push((out, self.value()?));
                if !self.eat(Tok::Comma) {
                    break;
                }
            }
            rules.push(StubRule {
                owner,
                signal,
                guard,
                emissions,
                span,
            });
        }
        if !self.eat(Tok::RBrace) {
            return Err(self.unexpected(&["`rule`", "`}`"]));
        }
        Ok(StubSet {
            name,
            base,
            rules,
            span,
        })
    }

    /// Span of the closing token of the previously parsed element.
    pub(crate) fn last_span(&self) -> Span {
        self.toks[self.pos.saturating_sub(1)].span.clone()
    }

    pub(crate) fn expect_eof(&self) -> PResult<()> {
        if self.at_eof() {
            Ok(())
        } else {
            Err(self.unexpected(&["`|`", "end of input"]))
        }
    }
}
