//! Random model generators and a brute-force consistency oracle shared by
//! the integration tests.
#![allow(dead_code)]

use std::collections::BTreeSet;
use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::Rng;

pub const FIG1: &str = include_str!("../data/figure1.fnet");
pub const FIG2: &str = include_str!("../data/figure2.fnet");
pub const FIG4: &str = include_str!("../data/figure4.fnet");

pub fn figures() -> String {
    format!("{FIG1}\n{FIG2}\n{FIG4}")
}

pub const SIGNALS: &[&str] = &["S0", "S1", "S2", "S3"];

/// A generated net. Block 0 is the root and carries the net's name.
#[derive(Debug, Clone)]
pub struct GenNet {
    pub names: Vec<String>,
    pub parent: Vec<Option<usize>>,
    pub connectors: Vec<(usize, usize, Vec<String>)>,
}

impl GenNet {
    pub fn name(&self) -> &str {
        &self.names[0]
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn children(&self, i: usize) -> Vec<usize> {
        (0..self.len()).filter(|&j| self.parent[j] == Some(i)).collect()
    }

    /// Path below the root, as written inside the net.
    pub fn relative(&self, i: usize) -> String {
        let mut segs = vec![self.names[i].clone()];
        let mut up = self.parent[i];
        while let Some(p) = up {
            if p == 0 {
                break;
            }
            segs.push(self.names[p].clone());
            up = self.parent[p];
        }
        segs.reverse();
        segs.join(".")
    }

    pub fn qualified(&self, i: usize) -> String {
        if i == 0 {
            self.names[0].clone()
        } else {
            format!("{}.{}", self.names[0], self.relative(i))
        }
    }

    /// Strict descendant test by depth-first search over child edges.
    pub fn reaches(&self, a: usize, b: usize) -> bool {
        let mut stack = self.children(a);
        let mut seen = vec![false; self.len()];
        while let Some(x) = stack.pop() {
            if x == b {
                return true;
            }
            if !seen[x] {
                seen[x] = true;
                stack.extend(self.children(x));
            }
        }
        false
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn text(&self) -> String {
        fn blocks(net: &GenNet, at: usize, depth: usize, out: &mut String) {
            for c in net.children(at) {
                let pad = "  ".repeat(depth);
                let kids = net.children(c);
                if kids.is_empty() {
                    let _ = writeln!(out, "{pad}block {} {{}}", net.names[c]);
                } else {
                    let _ = writeln!(out, "{pad}block {} {{", net.names[c]);
                    blocks(net, c, depth + 1, out);
                    let _ = writeln!(out, "{pad}}}");
                }
            }
        }
        let mut out = format!("net {} {{\n", self.name());
        blocks(self, 0, 1, &mut out);
        for (s, t, sig) in &self.connectors {
            let _ = writeln!(
                out,
                "  connect {} : {} -> {}",
                sig.join(", "),
                self.relative(*s),
                self.relative(*t)
            );
        }
        out.push_str("}\n");
        out
    }
}

fn some_signals<R: Rng>(rng: &mut R, max: usize) -> Vec<String> {
    let k = rng.gen_range(1..=max);
    let mut s: Vec<String> = SIGNALS
        .choose_multiple(rng, k)
        .map(|s| s.to_string())
        .collect();
    s.sort();
    s
}

/// A valid net with at most `max_blocks` blocks, root included.
pub fn gen_net<R: Rng>(rng: &mut R, name: &str, max_blocks: usize) -> GenNet {
    let n = rng.gen_range(2..=max_blocks.max(2));
    let mut names = vec![name.to_string()];
    let mut parent = vec![None];
    for i in 1..n {
        names.push(format!("B{i}"));
        parent.push(Some(rng.gen_range(0..i)));
    }
    let mut connectors = Vec::new();
    if n > 2 {
        for _ in 0..rng.gen_range(0..=6) {
            let s = rng.gen_range(1..n);
            let t = rng.gen_range(1..n);
            if s != t {
                connectors.push((s, t, some_signals(rng, 2)));
            }
        }
    }
    GenNet {
        names,
        parent,
        connectors,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GMarker {
    Plain,
    Ext,
    Env,
}

impl GMarker {
    fn keyword(self) -> &'static str {
        match self {
            GMarker::Plain => "block",
            GMarker::Ext => "ext",
            GMarker::Env => "env",
        }
    }
}

#[derive(Debug, Clone)]
pub struct GViewBlock {
    pub marker: GMarker,
    pub name: String,
    pub parent: Option<usize>,
}

#[derive(Debug, Clone)]
pub struct GViewConn {
    pub kind: &'static str,
    pub labels: Vec<String>,
    pub source: String,
    pub target: String,
}

/// A generated view. Parents always precede their children.
#[derive(Debug, Clone, Default)]
pub struct GenView {
    pub blocks: Vec<GViewBlock>,
    pub connectors: Vec<GViewConn>,
}

impl GenView {
    pub fn text(&self, name: &str, kind: &str, base: &str) -> String {
        fn blocks(v: &GenView, at: Option<usize>, depth: usize, out: &mut String) {
            for (i, b) in v.blocks.iter().enumerate().filter(|(_, b)| b.parent == at) {
                let pad = "  ".repeat(depth);
                let has_kids = v.blocks.iter().any(|c| c.parent == Some(i));
                if has_kids {
                    let _ = writeln!(out, "{pad}{} {} {{", b.marker.keyword(), b.name);
                    blocks(v, Some(i), depth + 1, out);
                    let _ = writeln!(out, "{pad}}}");
                } else {
                    let _ = writeln!(out, "{pad}{} {}", b.marker.keyword(), b.name);
                }
            }
        }
        let kind = if kind.is_empty() {
            String::new()
        } else {
            format!(" {kind}")
        };
        let mut out = format!("view {name}{kind} on {base} {{\n");
        blocks(self, None, 1, &mut out);
        for c in &self.connectors {
            if c.labels.is_empty() {
                let _ = writeln!(out, "  {} : {} -> {}", c.kind, c.source, c.target);
            } else {
                let _ = writeln!(
                    out,
                    "  {} {} : {} -> {}",
                    c.kind,
                    c.labels.join(", "),
                    c.source,
                    c.target
                );
            }
        }
        out.push_str("}\n");
        out
    }

    pub fn position(&self, name: &str) -> Option<usize> {
        self.blocks.iter().position(|b| b.name == name)
    }

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

    /// Removes block `i`; its children move to its parent and its links go.
    pub fn remove_block(&mut self, i: usize) {
        let name = self.blocks[i].name.clone();
        let up = self.blocks[i].parent;
        for b in &mut self.blocks {
            if b.parent == Some(i) {
                b.parent = up;
            }
        }
        self.blocks.remove(i);
        for b in &mut self.blocks {
            if let Some(p) = b.parent {
                if p > i {
                    b.parent = Some(p - 1);
                }
            }
        }
        self.connectors.retain(|c| c.source != name && c.target != name);
    }
}

fn lift(net: &GenNet, chosen: &[usize], mut at: usize) -> Option<usize> {
    loop {
        if chosen.contains(&at) {
            return Some(at);
        }
        at = net.parent[at]?;
    }
}

fn random_labels<R: Rng>(rng: &mut R) -> Vec<String> {
    match rng.gen_range(0..4) {
        0 => Vec::new(),
        1 => vec!["Ghost".to_string()],
        _ => some_signals(rng, 2),
    }
}

/// A view that follows the net, with a faithful nesting and lifted links.
pub fn faithful_view<R: Rng>(rng: &mut R, net: &GenNet, max_blocks: usize) -> GenView {
    let k = rng.gen_range(1..=max_blocks.min(net.len()));
    let mut pool: Vec<usize> = (1..net.len()).collect();
    if rng.gen_bool(0.1) {
        pool.push(0);
    }
    let mut chosen: Vec<usize> = pool.choose_multiple(rng, k.min(pool.len())).copied().collect();
    chosen.sort();
    let mut view = GenView::default();
    for (vi, &b) in chosen.iter().enumerate() {
        let parent = (0..vi).rev().find(|&j| net.reaches(chosen[j], b));
        let marker = if rng.gen_bool(0.2) {
            GMarker::Ext
        } else {
            GMarker::Plain
        };
        view.blocks.push(GViewBlock {
            marker,
            name: net.names[b].clone(),
            parent,
        });
    }
    for (s, t, sig) in &net.connectors {
        if !rng.gen_bool(0.6) {
            continue;
        }
        let (Some(ls), Some(lt)) = (lift(net, &chosen, *s), lift(net, &chosen, *t)) else {
            continue;
        };
        if ls == lt {
            continue;
        }
        let labels = match rng.gen_range(0..3) {
            0 => Vec::new(),
            1 => sig.clone(),
            _ => vec![sig.choose(rng).unwrap().clone()],
        };
        view.connectors.push(GViewConn {
            kind: "connect",
            labels,
            source: net.names[ls].clone(),
            target: net.names[lt].clone(),
        });
    }
    if view.blocks.len() < max_blocks && rng.gen_bool(0.3) {
        let anchor = view.blocks.choose(rng).unwrap().name.clone();
        view.blocks.push(GViewBlock {
            marker: GMarker::Env,
            name: "Env1".into(),
            parent: None,
        });
        view.connectors.push(GViewConn {
            kind: ["mech", "hydr", "elec", "connect"].choose(rng).unwrap(),
            labels: random_labels(rng),
            source: anchor,
            target: "Env1".into(),
        });
    }
    view
}

/// A view of arbitrary net and invented block names, nesting and links.
pub fn random_view<R: Rng>(rng: &mut R, net: &GenNet, max_blocks: usize) -> GenView {
    let k = rng.gen_range(1..=max_blocks);
    let mut pool: Vec<String> = net.names.clone();
    pool.extend(["Ghost1".to_string(), "Env1".to_string(), "Env2".to_string()]);
    let picked: Vec<String> = pool.choose_multiple(rng, k).cloned().collect();
    let mut view = GenView::default();
    for (i, name) in picked.into_iter().enumerate() {
        let marker = if name.starts_with("Env") {
            GMarker::Env
        } else if rng.gen_bool(0.2) {
            GMarker::Ext
        } else {
            GMarker::Plain
        };
        let parent = if i > 0 && rng.gen_bool(0.5) {
            Some(rng.gen_range(0..i))
        } else {
            None
        };
        view.blocks.push(GViewBlock {
            marker,
            name,
            parent,
        });
    }
    for _ in 0..rng.gen_range(0..=4) {
        let s = view.blocks.choose(rng).unwrap().name.clone();
        let t = view.blocks.choose(rng).unwrap().name.clone();
        let kind = if rng.gen_bool(0.85) {
            "connect"
        } else {
            ["mech", "hydr", "elec"].choose(rng).unwrap()
        };
        view.connectors.push(GViewConn {
            kind,
            labels: random_labels(rng),
            source: s,
            target: t,
        });
    }
    view
}

/// Applies one random edit that usually breaks a condition.
pub fn mutate_view<R: Rng>(rng: &mut R, net: &GenNet, view: &mut GenView) {
    let n = view.blocks.len();
    match rng.gen_range(0..7) {
        0 => view.blocks.push(GViewBlock {
            marker: GMarker::Plain,
            name: "Ghost1".into(),
            parent: if n > 0 && rng.gen_bool(0.5) { Some(rng.gen_range(0..n)) } else { None },
        }),
        1 if n > 1 => {
            let i = rng.gen_range(1..n);
            view.blocks[i].parent = Some(rng.gen_range(0..i));
        }
        2 if n > 0 => {
            let i = rng.gen_range(0..n);
            view.blocks[i].parent = None;
        }
        3 if n > 0 => {
            let s = view.blocks.choose(rng).unwrap().name.clone();
            let t = view.blocks.choose(rng).unwrap().name.clone();
            view.connectors.push(GViewConn {
                kind: "connect",
                labels: random_labels(rng),
                source: s,
                target: t,
            });
        }
        4 if n > 0 => {
            let s = view.blocks.choose(rng).unwrap().name.clone();
            view.connectors.push(GViewConn {
                kind: "connect",
                labels: Vec::new(),
                source: s,
                target: "Nowhere".into(),
            });
        }
        5 if n > 1 => {
            let a = view.blocks[0].name.clone();
            let b = view.blocks[n - 1].name.clone();
            view.connectors.push(GViewConn {
                kind: "mech",
                labels: vec!["S0".into()],
                source: a,
                target: b,
            });
        }
        6 if n > 0 => {
            let i = rng.gen_range(0..n);
            if net.index_of(&view.blocks[i].name).is_some() {
                view.remove_block(i);
            }
        }
        _ => {}
    }
}

/// Generated (net, view) pair as one model text.
pub fn gen_pair<R: Rng>(rng: &mut R) -> (GenNet, GenView, String) {
    let net = gen_net(rng, "Net", 8);
    let mut view = if rng.gen_bool(0.6) {
        faithful_view(rng, &net, 6)
    } else {
        random_view(rng, &net, 6)
    };
    if rng.gen_bool(0.4) {
        mutate_view(rng, &net, &mut view);
    }
    view.blocks.truncate(view.blocks.len().min(6));
    let keep: Vec<String> = view.blocks.iter().map(|b| b.name.clone()).collect();
    view.connectors
        .retain(|c| c.source == "Nowhere" || c.target == "Nowhere" || (keep.contains(&c.source) && keep.contains(&c.target)));
    let text = format!("{}{}", net.text(), view.text("V", "", net.name()));
    (net, view, text)
}

/// Conditions violated by `view` against `net`, computed by enumerating
/// block pairs and net connectors directly on the generated structures.
pub fn oracle(net: &GenNet, view: &GenView) -> BTreeSet<String> {
    let mut found = BTreeSet::new();
    let resolved: Vec<Option<usize>> = view
        .blocks
        .iter()
        .map(|b| match b.marker {
            GMarker::Env => None,
            _ => net.index_of(&b.name),
        })
        .collect();
    for (b, r) in view.blocks.iter().zip(&resolved) {
        if b.marker != GMarker::Env && r.is_none() {
            found.insert("C1".to_string());
        }
    }
    for i in 0..view.blocks.len() {
        for j in 0..view.blocks.len() {
            let (Some(a), Some(b)) = (resolved[i], resolved[j]) else {
                continue;
            };
            if i == j {
                continue;
            }
            let nested = view.is_view_ancestor(i, j);
            if nested && !net.reaches(a, b) {
                found.insert("C2".to_string());
            }
            if net.reaches(a, b) && !nested {
                found.insert("C3".to_string());
            }
        }
    }
    let shown: BTreeSet<usize> = resolved.iter().flatten().copied().collect();
    let compatible = |v: usize, n: usize, honor: bool| {
        v == n || (net.reaches(v, n) && !(honor && shown.contains(&n)))
    };
    for c in &view.connectors {
        let s = view.position(&c.source);
        let t = view.position(&c.target);
        if s.is_none() || t.is_none() {
            found.insert("C1".to_string());
            continue;
        }
        let (s, t) = (s.unwrap(), t.unwrap());
        let env = view.blocks[s].marker == GMarker::Env || view.blocks[t].marker == GMarker::Env;
        if c.kind != "connect" {
            if !env && !c.labels.is_empty() {
                found.insert("C4".to_string());
            }
            continue;
        }
        if env {
            continue;
        }
        let (Some(vs), Some(vt)) = (resolved[s], resolved[t]) else {
            continue;
        };
        let covers = |sig: &Vec<String>| c.labels.iter().all(|l| sig.contains(l));
        let matched = net
            .connectors
            .iter()
            .any(|(ns, nt, sig)| covers(sig) && compatible(vs, *ns, true) && compatible(vt, *nt, true));
        if matched {
            continue;
        }
        let endpoint_problem = if c.labels.is_empty() {
            net.connectors
                .iter()
                .any(|(ns, nt, _)| compatible(vs, *ns, false) && compatible(vt, *nt, false))
        } else {
            net.connectors.iter().any(|(_, _, sig)| covers(sig))
        };
        found.insert(if endpoint_problem { "C5" } else { "C4" }.to_string());
    }
    found
}

const SYMBOLS: &[&str] = &["Open", "Close", "Idle"];

pub fn gen_number<R: Rng>(rng: &mut R) -> String {
    let unit = if rng.gen_bool(0.3) { "km/h" } else { "" };
    match rng.gen_range(0..5) {
        0 => format!("-{}{unit}", rng.gen_range(1..20)),
        1 => format!("{}.5{unit}", rng.gen_range(0..20)),
        _ => format!("{}{unit}", rng.gen_range(0..30)),
    }
}

pub fn gen_value<R: Rng>(rng: &mut R) -> String {
    if rng.gen_bool(0.5) {
        gen_number(rng)
    } else {
        SYMBOLS.choose(rng).unwrap().to_string()
    }
}

pub fn gen_condition<R: Rng>(rng: &mut R) -> String {
    let n = if rng.gen_bool(0.7) { 1 } else { rng.gen_range(2..=3) };
    (0..n)
        .map(|_| match rng.gen_range(0..8) {
            0 => format!("> {}", gen_number(rng)),
            1 => format!(">> {}", gen_number(rng)),
            2 => format!("< {}", gen_number(rng)),
            3 => format!("<< {}", gen_number(rng)),
            4 => format!("== {}", gen_value(rng)),
            5 => format!("= {}", if rng.gen_bool(0.2) { "invalid".into() } else { gen_value(rng) }),
            6 => format!(": {} -> {}", gen_value(rng), gen_value(rng)),
            _ => "invalid".to_string(),
        })
        .collect::<Vec<_>>()
        .join(" | ")
}

fn comment<R: Rng>(rng: &mut R, out: &mut String) {
    if rng.gen_bool(0.3) {
        let _ = writeln!(out, "// note {}", rng.gen_range(0..100));
    }
}

/// A model with every element kind that parses and resolves. Layout and
/// comments above elements vary.
pub fn gen_model_text<R: Rng>(rng: &mut R) -> String {
    let mut out = String::new();
    let net = gen_net(rng, "Net", 6);
    comment(rng, &mut out);
    let mut net_text = net.text();
    if rng.gen_bool(0.5) {
        net_text = net_text.replacen(
            "{\n",
            "{\n  blockdef Def {\n    block Inner {}\n  }\n  instance d1 : Def\n  instance d2 : Def\n",
            1,
        );
        if rng.gen_bool(0.5) {
            let tail = net_text.rfind('}').unwrap();
            net_text.insert_str(tail, "  connect S3 : d1.Inner -> d2.Inner\n");
        }
    }
    out.push_str(&net_text);

    let views = rng.gen_range(1..=3);
    let mut view_names = Vec::new();
    for k in 0..views {
        let v = random_view(rng, &net, 5);
        let name = format!("View{k}");
        let kind = match rng.gen_range(0..5) {
            0 => String::new(),
            1 => "feature".into(),
            2 => "mode".into(),
            3 => "scenariobase".into(),
            _ if k > 0 => format!("variant of View{}", rng.gen_range(0..k)),
            _ => String::new(),
        };
        comment(rng, &mut out);
        out.push_str(&v.text(&name, &kind, net.name()));
        view_names.push((name, v));
    }

    let (vname, v) = view_names.choose(rng).unwrap();
    if rng.gen_bool(0.8) {
        comment(rng, &mut out);
        let policy = ["complete", "visible", "free"].choose(rng).unwrap();
        let _ = writeln!(out, "scenario Sc1 on {vname} policy {policy} {{");
        for seq in 1..=rng.gen_range(0..=4) {
            let s = &v.blocks.choose(rng).unwrap().name;
            let t = &v.blocks.choose(rng).unwrap().name;
            let trig = if rng.gen_bool(0.4) { "trigger " } else { "" };
            let sig = SIGNALS.choose(rng).unwrap();
            let _ = writeln!(out, "  {seq} {trig}{s} -> {t} : {sig} {}", gen_condition(rng));
        }
        out.push_str("}\n");
    }
    if rng.gen_bool(0.7) {
        comment(rng, &mut out);
        let base = if rng.gen_bool(0.5) { vname.as_str() } else { net.name() };
        let _ = writeln!(out, "modes Md1 on {base} {{");
        let states = rng.gen_range(1..=3);
        for q in 0..states {
            let (view, _) = view_names.choose(rng).unwrap();
            let _ = writeln!(out, "  state Q{q} view {view}");
        }
        for _ in 0..rng.gen_range(0..=3) {
            let a = rng.gen_range(0..states);
            let b = rng.gen_range(0..states);
            let sig = SIGNALS.choose(rng).unwrap();
            let _ = writeln!(out, "  from Q{a} to Q{b} when {sig} {}", gen_condition(rng));
        }
        let _ = writeln!(out, "  initial Q{}", rng.gen_range(0..states));
        out.push_str("}\n");
    }
    if rng.gen_bool(0.6) {
        comment(rng, &mut out);
        let _ = writeln!(out, "variants Vs1 of {vname} {{");
        for k in 0..rng.gen_range(1..=2) {
            let (view, _) = view_names.choose(rng).unwrap();
            let _ = writeln!(out, "  variant Var{k} view {view}");
        }
        out.push_str("}\n");
    }
    if rng.gen_bool(0.6) {
        comment(rng, &mut out);
        let _ = writeln!(out, "stubs St1 on {} {{", net.name());
        for _ in 0..rng.gen_range(0..=3) {
            let owner = net.relative(rng.gen_range(1..net.len()));
            let sig = SIGNALS.choose(rng).unwrap();
            let emits: Vec<String> = (0..rng.gen_range(1..=2))
                .map(|_| format!("{} = {}", SIGNALS.choose(rng).unwrap(), gen_value(rng)))
                .collect();
            let _ = writeln!(
                out,
                "  rule {owner} when {sig} {} emit {}",
                gen_condition(rng),
                emits.join(", ")
            );
        }
        out.push_str("}\n");
    }
    if rng.gen_bool(0.2) {
        out.push_str("// the end\n");
    }
    relayout(rng, &out)
}

/// Shuffles insignificant whitespace outside comments.
pub fn relayout<R: Rng>(rng: &mut R, text: &str) -> String {
    let mut out = String::new();
    for line in text.lines() {
        if line.trim_start().starts_with("//") {
            out.push_str(line);
            out.push('\n');
            continue;
        }
        for (i, word) in line.split(' ').filter(|w| !w.is_empty()).enumerate() {
            if i > 0 {
                out.push_str(match rng.gen_range(0..10) {
                    0 => "  ",
                    1 => "\n    ",
                    2 => "\t",
                    _ => " ",
                });
            }
            out.push_str(word);
        }
        out.push_str(if rng.gen_bool(0.1) { "\n\n" } else { "\n" });
    }
    out
}
