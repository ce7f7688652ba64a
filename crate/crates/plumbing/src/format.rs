//! Text and structured formats for graphs, cycles, classes and descriptors.
//!
//! Graph text: statements `<id>: <euler>` and `edge <id> <id>`, separated by
//! newlines or `;`, with `#` comments. The structured form is a JSON object
//! `{"vertices": [{"id", "euler"}], "edges": [[id, id]]}`.
//!
//! Cycles: whitespace or comma separated `<id>:<value>` tokens; omitted
//! vertices are zero and `0` alone is the zero cycle.
//!
//! Descriptors: `trivial`, `natural(<class>)`, `genpic(<class>)`,
//! `genim(<class>)` or `table(<key>)`, optionally followed by
//! `twist(<class>)`.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::str::FromStr;

use plumbing_core::{BundleDescriptor, BundleKind, Cycle, PlumbingGraph, RatCycle, Q};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

fn is_zero(q: &Q) -> bool {
    *q == Q::from_integer(0.into())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VertexDoc {
    pub id: String,
    pub euler: i64,
}

/// Structured graph document.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphDoc {
    pub vertices: Vec<VertexDoc>,
    pub edges: Vec<[String; 2]>,
}

impl GraphDoc {
    pub fn of(g: &PlumbingGraph) -> Self {
        GraphDoc {
            vertices: (0..g.n()).map(|v| VertexDoc { id: g.id(v).into(), euler: g.euler()[v] }).collect(),
            edges: g.edges().iter().map(|&(a, b)| [g.id(a).into(), g.id(b).into()]).collect(),
        }
    }

    pub fn build(&self) -> Result<PlumbingGraph> {
        let vertices = self.vertices.iter().map(|v| (v.id.clone(), v.euler)).collect();
        let edges = self.edges.iter().map(|[a, b]| (a.clone(), b.clone())).collect();
        Ok(PlumbingGraph::new(vertices, edges)?)
    }
}

fn valid_id(id: &str) -> bool {
    !id.is_empty() && !id.chars().any(|c| c.is_whitespace() || matches!(c, ':' | ';' | '#' | ',' | '(' | ')'))
}

/// Parses a graph in either the text or the structured form.
pub fn parse_graph(text: &str) -> Result<PlumbingGraph> {
    if text.trim_start().starts_with('{') {
        let doc: GraphDoc = serde_json::from_str(text)?;
        return doc.build();
    }
    let mut vertices = Vec::new();
    let mut edges = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("");
        for stmt in content.split(';').map(str::trim).filter(|s| !s.is_empty()) {
            if let Some(rest) = stmt.strip_prefix("edge").filter(|r| r.starts_with(char::is_whitespace)) {
                let ends: Vec<&str> = rest.split_whitespace().collect();
                if ends.len() != 2 || !ends.iter().all(|e| valid_id(e)) {
                    return Err(Error::syntax(line, format!("expected `edge <id> <id>`, found `{stmt}`")));
                }
                edges.push((ends[0].to_string(), ends[1].to_string()));
            } else {
                let (id, e) = stmt
                    .split_once(':')
                    .ok_or_else(|| Error::syntax(line, format!("expected `<id>: <euler>`, found `{stmt}`")))?;
                let id = id.trim();
                if !valid_id(id) {
                    return Err(Error::syntax(line, format!("invalid vertex id `{id}`")));
                }
                let e = e
                    .trim()
                    .parse::<i64>()
                    .map_err(|_| Error::syntax(line, format!("invalid Euler number `{}`", e.trim())))?;
                vertices.push((id.to_string(), e));
            }
        }
    }
    Ok(PlumbingGraph::new(vertices, edges)?)
}

pub fn graph_to_text(g: &PlumbingGraph) -> String {
    let mut out = String::new();
    for v in 0..g.n() {
        let _ = writeln!(out, "{}: {}", g.id(v), g.euler()[v]);
    }
    for &(a, b) in g.edges() {
        let _ = writeln!(out, "edge {} {}", g.id(a), g.id(b));
    }
    out
}

/// Coefficients by vertex id, zero entries dropped.
pub type SymClass = BTreeMap<String, Q>;

fn parse_q(tok: &str) -> Option<Q> {
    Q::from_str(tok.trim()).ok()
}

/// Parses `<id>:<rational>` tokens without reference to a graph.
pub fn parse_sym(text: &str) -> Result<SymClass> {
    let mut out = SymClass::new();
    let t = text.trim();
    if t.is_empty() || t == "0" {
        return Ok(out);
    }
    for tok in t.split(|c: char| c.is_whitespace() || c == ',').filter(|s| !s.is_empty()) {
        let (id, v) = tok
            .split_once(':')
            .ok_or_else(|| Error::syntax(1, format!("expected `<id>:<value>`, found `{tok}`")))?;
        if !valid_id(id) {
            return Err(Error::syntax(1, format!("invalid vertex id `{id}`")));
        }
        let q = parse_q(v).ok_or_else(|| Error::syntax(1, format!("invalid coefficient `{v}`")))?;
        if out.insert(id.to_string(), q).is_some() {
            return Err(Error::syntax(1, format!("vertex `{id}` appears twice")));
        }
    }
    out.retain(|_, q| !is_zero(q));
    Ok(out)
}

pub fn sym_to_string(c: &SymClass) -> String {
    let parts: Vec<String> = c.iter().filter(|(_, q)| !is_zero(q)).map(|(id, q)| format!("{id}:{q}")).collect();
    if parts.is_empty() {
        "0".into()
    } else {
        parts.join(" ")
    }
}

fn sym_of(g: &PlumbingGraph, x: &RatCycle) -> SymClass {
    (0..g.n()).filter(|&v| !is_zero(&x[v])).map(|v| (g.id(v).to_string(), x[v].clone())).collect()
}

fn resolve(g: &PlumbingGraph, c: &SymClass) -> Result<RatCycle> {
    let mut x = RatCycle::zero(g.n());
    for (id, q) in c {
        x[g.index_of(id)?] = q.clone();
    }
    Ok(x)
}

pub fn parse_ratcycle(g: &PlumbingGraph, text: &str) -> Result<RatCycle> {
    resolve(g, &parse_sym(text)?)
}

pub fn parse_cycle(g: &PlumbingGraph, text: &str) -> Result<Cycle> {
    let x = parse_ratcycle(g, text)?;
    x.to_integral().ok_or_else(|| Error::syntax(1, format!("cycle `{}` has non-integral coefficients", text.trim())))
}

pub fn format_ratcycle(g: &PlumbingGraph, x: &RatCycle) -> String {
    sym_to_string(&sym_of(g, x))
}

pub fn format_cycle(g: &PlumbingGraph, c: &Cycle) -> String {
    format_ratcycle(g, &c.to_rational())
}

/// Coordinates of Chern class input.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Coords {
    /// Rational `E`-coefficients of the class itself.
    E,
    /// Integers `a_v` with `-l' = Σ a_v E*_v`.
    Estar,
}

/// Parses a Chern class `l'` in the given coordinates.
pub fn parse_class(g: &PlumbingGraph, text: &str, coords: Coords) -> Result<RatCycle> {
    match coords {
        Coords::E => parse_ratcycle(g, text),
        Coords::Estar => {
            let a = parse_cycle(g, text)?;
            let neg: Vec<i64> = a.0.iter().map(|x| -x).collect();
            Ok(g.from_estar(&neg)?)
        }
    }
}

/// `E*`-coordinates `a_v` of `-l'`.
pub fn format_class_estar(g: &PlumbingGraph, l: &RatCycle) -> Result<String> {
    let a = g.estar_coords(l)?;
    let neg = Cycle(a.iter().map(|x| -x).collect());
    Ok(format_cycle(g, &neg))
}

/// Descriptor with classes keyed by vertex id.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymDescriptor {
    pub kind: String,
    pub class: SymClass,
    pub key: Option<String>,
    pub twist: Option<SymClass>,
}

fn sym_sub(a: &SymClass, b: &SymClass) -> SymClass {
    let mut out = a.clone();
    for (id, q) in b {
        let e = out.entry(id.clone()).or_insert_with(|| Q::from_integer(0.into()));
        *e -= q;
    }
    out.retain(|_, q| !is_zero(q));
    out
}

impl SymDescriptor {
    /// Same folding rules as [`BundleDescriptor::normalized`].
    pub fn normalized(&self) -> Self {
        let mut d = self.clone();
        d.twist = d.twist.filter(|t| !t.is_empty());
        if let Some(t) = d.twist.clone() {
            match d.kind.as_str() {
                "trivial" => {
                    d.kind = "natural".into();
                    d.class = sym_sub(&SymClass::new(), &t);
                    d.twist = None;
                }
                "natural" | "genpic" => {
                    d.class = sym_sub(&d.class, &t);
                    d.twist = None;
                }
                _ => {}
            }
        }
        if d.kind == "natural" && d.class.is_empty() {
            d.kind = "trivial".into();
        }
        d
    }
}

impl std::fmt::Display for SymDescriptor {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.kind.as_str() {
            "trivial" => write!(f, "trivial")?,
            "table" => write!(f, "table({})", self.key.as_deref().unwrap_or(""))?,
            k => write!(f, "{k}({})", sym_to_string(&self.class))?,
        }
        if let Some(t) = &self.twist {
            write!(f, " twist({})", sym_to_string(t))?;
        }
        Ok(())
    }
}

fn take_call<'a>(s: &'a str, name: &str) -> Result<Option<(&'a str, &'a str)>> {
    let Some(rest) = s.strip_prefix(name) else { return Ok(None) };
    let Some(rest) = rest.trim_start().strip_prefix('(') else { return Ok(None) };
    let close = rest.find(')').ok_or_else(|| Error::syntax(1, format!("missing `)` after `{name}(`")))?;
    Ok(Some((&rest[..close], rest[close + 1..].trim_start())))
}

pub fn parse_sym_descriptor(text: &str) -> Result<SymDescriptor> {
    let s = text.trim();
    let (mut d, rest) = if let Some(rest) = s.strip_prefix("trivial") {
        (SymDescriptor { kind: "trivial".into(), class: SymClass::new(), key: None, twist: None }, rest.trim_start())
    } else if let Some((key, rest)) = take_call(s, "table")? {
        let key = key.trim();
        if key.is_empty() {
            return Err(Error::syntax(1, "empty table key"));
        }
        (SymDescriptor { kind: "table".into(), class: SymClass::new(), key: Some(key.into()), twist: None }, rest)
    } else {
        let mut found = None;
        for kind in ["natural", "genpic", "genim"] {
            if let Some((inner, rest)) = take_call(s, kind)? {
                found = Some((SymDescriptor { kind: kind.into(), class: parse_sym(inner)?, key: None, twist: None }, rest));
                break;
            }
        }
        found.ok_or_else(|| Error::syntax(1, format!("unknown descriptor `{s}`")))?
    };
    if !rest.is_empty() {
        let (inner, tail) =
            take_call(rest, "twist")?.ok_or_else(|| Error::syntax(1, format!("unexpected `{rest}` in descriptor")))?;
        if !tail.is_empty() {
            return Err(Error::syntax(1, format!("unexpected `{tail}` in descriptor")));
        }
        d.twist = Some(parse_sym(inner)?);
    }
    Ok(d)
}

pub fn parse_descriptor(g: &PlumbingGraph, text: &str) -> Result<BundleDescriptor> {
    let d = parse_sym_descriptor(text)?;
    let class = resolve(g, &d.class)?;
    let kind = match d.kind.as_str() {
        "trivial" => BundleKind::Trivial,
        "natural" => BundleKind::Natural(class),
        "genpic" => BundleKind::GenericPic(class),
        "genim" => BundleKind::GenericAbelImage(class),
        _ => BundleKind::Table(d.key.clone().unwrap_or_default()),
    };
    let twist = d.twist.as_ref().map(|t| resolve(g, t)).transpose()?;
    Ok(BundleDescriptor { kind, twist })
}

pub fn sym_descriptor(g: &PlumbingGraph, d: &BundleDescriptor) -> SymDescriptor {
    let (kind, class, key) = match &d.kind {
        BundleKind::Trivial => ("trivial", SymClass::new(), None),
        BundleKind::Natural(c) => ("natural", sym_of(g, c), None),
        BundleKind::GenericPic(c) => ("genpic", sym_of(g, c), None),
        BundleKind::GenericAbelImage(c) => ("genim", sym_of(g, c), None),
        BundleKind::RelativeGeneric { c1, .. } => ("relgen", sym_of(g, c1), None),
        BundleKind::Table(k) => ("table", SymClass::new(), Some(k.clone())),
    };
    SymDescriptor { kind: kind.into(), class, key, twist: d.twist.as_ref().map(|t| sym_of(g, t)) }
}

pub fn format_descriptor(g: &PlumbingGraph, d: &BundleDescriptor) -> String {
    sym_descriptor(g, d).to_string()
}
