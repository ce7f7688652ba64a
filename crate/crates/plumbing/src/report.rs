//! Serializable views of core results.

use plumbing_core::abel::BReport;
use plumbing_core::relative::{Dominance, RelH1};
use plumbing_core::tower::{TowerResult, TowerSpec};
use plumbing_core::{AbelReport, Cycle, OptResult, PlumbingGraph};
use serde::{Deserialize, Serialize};

use crate::format::format_cycle;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OptOut {
    pub value: String,
    pub count: u64,
    /// All optimizers when `count` is within the cap, else the least one.
    pub optimizers: Vec<String>,
    pub truncated: bool,
}

impl OptOut {
    pub fn of(g: &PlumbingGraph, r: &OptResult) -> Self {
        OptOut {
            value: r.value.to_string(),
            count: r.count,
            optimizers: r.optimizers.iter().map(|c| format_cycle(g, c)).collect(),
            truncated: r.is_truncated(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComponentOut {
    pub cycle: String,
    pub g: i64,
    pub d: i64,
    pub t: i64,
}

fn components(g: &PlumbingGraph, cs: &[plumbing_core::ComponentInvariants]) -> Vec<ComponentOut> {
    cs.iter().map(|c| ComponentOut { cycle: format_cycle(g, &c.cycle), g: c.g, d: c.d, t: c.t }).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AbelOut {
    pub dimension: i64,
    pub h1_structure: i64,
    pub b: Option<i64>,
    pub optimal_cycle: String,
    pub components: Vec<ComponentOut>,
    pub optimizer_count: u64,
    pub optimizers: Vec<String>,
    pub eca_dimension: Option<i64>,
    pub warnings: Vec<String>,
}

impl AbelOut {
    pub fn of(g: &PlumbingGraph, r: &AbelReport) -> Self {
        AbelOut {
            dimension: r.dimension,
            h1_structure: r.h1_structure,
            b: r.b,
            optimal_cycle: format_cycle(g, &r.optimal_cycle),
            components: components(g, &r.components),
            optimizer_count: r.optimizer_count,
            optimizers: r.optimizers.iter().map(|c| format_cycle(g, c)).collect(),
            eca_dimension: r.eca_dimension,
            warnings: r.warnings.clone(),
        }
    }

    pub fn human(&self) -> String {
        let mut s = format!("{}\nh1(O_Z): {}\n", self.dimension, self.h1_structure);
        if let Some(b) = self.b {
            s += &format!("b: {b}\n");
        }
        s += &format!("optimal cycle: {} ({} optimizers)\n", self.optimal_cycle, self.optimizer_count);
        for c in &self.components {
            s += &format!("  component {}: g={} D={} T={}\n", c.cycle, c.g, c.d, c.t);
        }
        if let Some(e) = self.eca_dimension {
            s += &format!("divisor space dimension: {e}\n");
        }
        for w in &self.warnings {
            s += &format!("warning: {w}\n");
        }
        s
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BOut {
    pub value: i64,
    pub optimal: String,
    pub components: Vec<ComponentOut>,
    pub maximizers: OptOut,
}

impl BOut {
    pub fn of(g: &PlumbingGraph, r: &BReport) -> Self {
        BOut {
            value: r.value,
            optimal: format_cycle(g, &r.optimal),
            components: components(g, &r.components),
            maximizers: OptOut::of(g, &r.maximizers),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelH1Out {
    pub value: i64,
    pub minimizers: OptOut,
}

impl RelH1Out {
    pub fn of(g: &PlumbingGraph, r: &RelH1) -> Self {
        RelH1Out { value: r.value, minimizers: OptOut::of(g, &r.minimizers) }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DominanceOut {
    pub dominant: bool,
    pub witness: Option<String>,
}

impl DominanceOut {
    pub fn of(g: &PlumbingGraph, d: &Dominance) -> Self {
        DominanceOut { dominant: d.dominant, witness: d.witness.as_ref().map(|w| format_cycle(g, w)) }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainOut {
    pub vertex: String,
    pub k: u32,
    pub len: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TowerOut {
    pub size: u64,
    pub m: String,
    pub chains: Vec<ChainOut>,
    pub d0: i64,
    pub h1: i64,
    /// Node coordinates along a descent realizing `d0`.
    pub path: Vec<Vec<u32>>,
    pub violations: Vec<String>,
}

impl TowerOut {
    pub fn of(spec: &TowerSpec, r: &TowerResult) -> Self {
        let g = &spec.graph;
        TowerOut {
            size: spec.size,
            m: format_cycle(g, &Cycle(spec.m.clone())),
            chains: spec
                .chains
                .iter()
                .map(|c| ChainOut { vertex: g.id(c.vertex).into(), k: c.k, len: c.len })
                .collect(),
            d0: r.d0,
            h1: r.h1,
            path: r.path.iter().map(|&i| r.nodes[i].s.clone()).collect(),
            violations: r.violations.clone(),
        }
    }
}

/// Node table as text: a header naming the chains, then `s e d` per node.
pub fn tower_table(spec: &TowerSpec, r: &TowerResult) -> String {
    let g = &spec.graph;
    let names: Vec<String> = spec.chains.iter().map(|c| format!("{}#{}", g.id(c.vertex), c.k)).collect();
    let mut out = format!("# s=({}) e d\n", names.join(","));
    for node in &r.nodes {
        let s: Vec<String> = node.s.iter().map(u32::to_string).collect();
        out += &format!("({}) {} {}\n", s.join(","), node.e, node.d);
    }
    out
}
