//! Oracle backed by a file of tabulated values.
//!
//! Each non-empty line (after stripping `#` comments) is either
//! `h1 <cycle> | <descriptor> = <integer>` or
//! `h0nz <cycle> | <descriptor> = <true|false>`. Cycles and descriptors use
//! vertex ids, so one file can serve several base components.

use std::collections::{BTreeSet, HashMap};
use std::sync::Mutex;

use plumbing_core::{AnalyticOracle, BundleDescriptor, Cycle, Error as CoreError, GenericOracle, PlumbingGraph};

use crate::error::{Error, Result};
use crate::format::{format_cycle, parse_sym, parse_sym_descriptor, sym_descriptor, sym_to_string};

/// Canonical lookup key of a query.
pub fn query_key(graph: &PlumbingGraph, cycle: &Cycle, bundle: &BundleDescriptor) -> String {
    format!("{} | {}", format_cycle(graph, cycle), sym_descriptor(graph, &bundle.normalized()))
}

fn parse_key(cycle: &str, desc: &str, line: usize) -> Result<String> {
    let c = parse_sym(cycle).map_err(|e| relocate(e, line))?;
    if c.values().any(|q| !q.is_integer()) {
        return Err(Error::syntax(line, "table cycles must be integral"));
    }
    let d = parse_sym_descriptor(desc).map_err(|e| relocate(e, line))?;
    Ok(format!("{} | {}", sym_to_string(&c), d.normalized()))
}

fn relocate(e: Error, line: usize) -> Error {
    match e {
        Error::Syntax { msg, .. } => Error::Syntax { line, msg },
        e => e,
    }
}

#[derive(Debug, Default)]
pub struct TableOracle {
    h1: HashMap<String, i64>,
    h0nz: HashMap<String, bool>,
    fallback: Option<GenericOracle>,
    misses: Mutex<BTreeSet<String>>,
}

impl TableOracle {
    pub fn parse(text: &str) -> Result<Self> {
        let mut t = TableOracle::default();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (head, rest) = content
                .split_once(char::is_whitespace)
                .ok_or_else(|| Error::syntax(line, format!("incomplete entry `{content}`")))?;
            let (query, value) =
                rest.rsplit_once('=').ok_or_else(|| Error::syntax(line, "expected `= <value>` at the end"))?;
            let (cycle, desc) = query.split_once('|').ok_or_else(|| Error::syntax(line, "expected `<cycle> | <descriptor>`"))?;
            let key = parse_key(cycle, desc, line)?;
            let value = value.trim();
            let dup = match head {
                "h1" => {
                    let v: i64 = value.parse().map_err(|_| Error::syntax(line, format!("invalid integer `{value}`")))?;
                    if v < 0 {
                        return Err(Error::syntax(line, "h1 values are nonnegative"));
                    }
                    t.h1.insert(key.clone(), v).is_some()
                }
                "h0nz" => {
                    let v = match value {
                        "true" => true,
                        "false" => false,
                        _ => return Err(Error::syntax(line, format!("expected true or false, found `{value}`"))),
                    };
                    t.h0nz.insert(key.clone(), v).is_some()
                }
                _ => return Err(Error::syntax(line, format!("unknown entry kind `{head}`"))),
            };
            if dup {
                return Err(Error::syntax(line, format!("duplicate entry for `{key}`")));
            }
        }
        Ok(t)
    }

    /// Answers queries absent from the table with the generic formulas.
    pub fn with_fallback(mut self, generic: GenericOracle) -> Self {
        self.fallback = Some(generic);
        self
    }

    pub fn len(&self) -> usize {
        self.h1.len() + self.h0nz.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Queries that were not found in the table, in the table's line syntax.
    pub fn misses(&self) -> Vec<String> {
        self.misses.lock().expect("misses lock").iter().cloned().collect()
    }

    fn miss(&self, kind: &str, key: &str) {
        self.misses.lock().expect("misses lock").insert(format!("{kind} {key}"));
    }
}

impl AnalyticOracle for TableOracle {
    fn h1(&self, graph: &PlumbingGraph, cycle: &Cycle, bundle: &BundleDescriptor) -> plumbing_core::Result<i64> {
        if cycle.is_zero() {
            return Ok(0);
        }
        let key = query_key(graph, cycle, bundle);
        if let Some(&v) = self.h1.get(&key) {
            return Ok(v);
        }
        self.miss("h1", &key);
        match &self.fallback {
            Some(g) => g.h1(graph, cycle, bundle),
            None => Err(CoreError::MissingEntry(format!("h1 {key}"))),
        }
    }

    fn has_section_without_fixed_component(
        &self,
        graph: &PlumbingGraph,
        cycle: &Cycle,
        bundle: &BundleDescriptor,
    ) -> plumbing_core::Result<Option<bool>> {
        if cycle.is_zero() {
            return Ok(Some(true));
        }
        let key = query_key(graph, cycle, bundle);
        if let Some(&v) = self.h0nz.get(&key) {
            return Ok(Some(v));
        }
        self.miss("h0nz", &key);
        match &self.fallback {
            Some(g) => g.has_section_without_fixed_component(graph, cycle, bundle),
            None => Ok(None),
        }
    }
}
