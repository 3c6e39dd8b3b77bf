use std::fmt::Write;

use crate::model::{BlockItem, Connector, FunctionNet, View, ViewBlock, ViewKind};
use crate::modes::{ModeMachine, VariantSet};
use crate::scenario::Scenario;
use crate::sim::StubSet;

use super::{Element, Model};

const INDENT: &str = "  ";

/// Canonical text of a model: declaration order, one declaration per line,
/// two-space indentation, a blank line between top-level elements.
pub fn render_model(model: &Model) -> String {
    let mut out = String::new();
    for (i, item) in model.items.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        for c in &item.comments {
            writeln!(out, "//{c}").unwrap();
        }
        match &item.element {
            Element::Net(n) => net(&mut out, n),
            Element::View(v) => view(&mut out, v),
            Element::Modes(m) => modes(&mut out, m),
            Element::Variants(v) => variants(&mut out, v),
            Element::Scenario(s) => scenario(&mut out, s),
            Element::Stubs(s) => stubs(&mut out, s),
        }
    }
    if !model.trailing_comments.is_empty() {
        if !model.items.is_empty() {
            out.push('\n');
        }
        for c in &model.trailing_comments {
            writeln!(out, "//{c}").unwrap();
        }
    }
    if out.is_empty() {
        out.push('\n');
    }
    out
}

fn open(out: &mut String, header: String, empty: bool) {
    if empty {
        writeln!(out, "{header} {{}}").unwrap();
    } else {
        writeln!(out, "{header} {{").unwrap();
    }
}

fn close(out: &mut String, empty: bool) {
    if !empty {
        out.push_str("}\n");
    }
}

fn pad(out: &mut String, depth: usize) {
    for _ in 0..depth {
        out.push_str(INDENT);
    }
}

fn connector(out: &mut String, c: &Connector) {
    pad(out, 1);
    out.push_str(c.kind.keyword());
    for (i, s) in c.signals.iter().enumerate() {
        out.push_str(if i == 0 { " " } else { ", " });
        out.push_str(s.as_str());
    }
    writeln!(out, " : {} -> {}", c.source, c.target).unwrap();
}

fn block_items(out: &mut String, items: &[BlockItem], depth: usize) {
    for item in items {
        pad(out, depth);
        let (kw, name, children) = match item {
            BlockItem::Instance(i) => {
                writeln!(out, "instance {} : {}", i.name, i.definition).unwrap();
                continue;
            }
            BlockItem::Block(b) => ("block", &b.name, &b.children),
            BlockItem::Definition(d) => ("blockdef", &d.name, &d.children),
        };
        if children.is_empty() {
            writeln!(out, "{kw} {name} {{}}").unwrap();
        } else {
            writeln!(out, "{kw} {name} {{").unwrap();
            block_items(out, children, depth + 1);
            pad(out, depth);
            out.push_str("}\n");
        }
    }
}

fn net(out: &mut String, n: &FunctionNet) {
    let empty = n.items.is_empty() && n.connectors.is_empty();
    open(out, format!("net {}", n.name), empty);
    block_items(out, &n.items, 1);
    for c in &n.connectors {
        connector(out, c);
    }
    close(out, empty);
}

fn view_blocks(out: &mut String, blocks: &[ViewBlock], depth: usize) {
    for b in blocks {
        pad(out, depth);
        write!(out, "{} {}", b.marker.keyword(), b.reference).unwrap();
        if b.children.is_empty() {
            out.push('\n');
        } else {
            out.push_str(" {\n");
            view_blocks(out, &b.children, depth + 1);
            pad(out, depth);
            out.push_str("}\n");
        }
    }
}

fn view(out: &mut String, v: &View) {
    let mut header = format!("view {}", v.name);
    match &v.kind {
        None => {}
        Some(ViewKind::Feature) => header.push_str(" feature"),
        Some(ViewKind::Variant { of }) => write!(header, " variant of {of}").unwrap(),
        Some(ViewKind::Mode) => header.push_str(" mode"),
        Some(ViewKind::ScenarioBase) => header.push_str(" scenariobase"),
    }
    write!(header, " on {}", v.base).unwrap();
    let empty = v.blocks.is_empty() && v.connectors.is_empty();
    open(out, header, empty);
    view_blocks(out, &v.blocks, 1);
    for c in &v.connectors {
        connector(out, c);
    }
    close(out, empty);
}

fn scenario(out: &mut String, s: &Scenario) {
    let empty = s.interactions.is_empty();
    open(
        out,
        format!("scenario {} on {} policy {}", s.name, s.base, s.policy.keyword()),
        empty,
    );
    for i in &s.interactions {
        pad(out, 1);
        write!(out, "{} ", i.seq).unwrap();
        if i.trigger {
            out.push_str("trigger ");
        }
        writeln!(out, "{} -> {} : {} {}", i.source, i.target, i.signal, i.condition).unwrap();
    }
    close(out, empty);
}

fn modes(out: &mut String, m: &ModeMachine) {
    open(out, format!("modes {} on {}", m.name, m.base), false);
    for s in &m.states {
        pad(out, 1);
        writeln!(out, "state {} view {}", s.name, s.view).unwrap();
    }
    for t in &m.transitions {
        pad(out, 1);
        writeln!(out, "from {} to {} when {} {}", t.from, t.to, t.signal, t.condition).unwrap();
    }
    pad(out, 1);
    writeln!(out, "initial {}", m.initial).unwrap();
    close(out, false);
}

fn variants(out: &mut String, vs: &VariantSet) {
    open(out, format!("variants {} of {}", vs.name, vs.feature), false);
    for v in &vs.variants {
        pad(out, 1);
        writeln!(out, "variant {} view {}", v.name, v.view).unwrap();
    }
    close(out, false);
}

fn stubs(out: &mut String, s: &StubSet) {
    let empty = s.rules.is_empty();
    open(out, format!("stubs {} on {}", s.name, s.base), empty);
    for r in &s.rules {
        pad(out, 1);
        write!(out, "rule {} when {} {} emit ", r.owner, r.signal, r.guard).unwrap();
        for (i, (sig, v)) in r.emissions.iter().enumerate() {
            if i > 0 {
                out.push_str(", ");
            }
            write!(out, "{sig} = {v}").unwrap();
        }
        out.push('\n');
    }
    close(out, empty);
}
