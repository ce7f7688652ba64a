//! Cross-checks of the independent dimension formulas on random instances.

use std::collections::BTreeMap;

use plumbing_core::abel::{dim_abel_generic, dim_abel_section5, dim_abel_via_h1};
use plumbing_core::tower::{build_tower, d_recursion};
use plumbing_core::{
    Error as CoreError, GenericOracle, GenericStructure, HypothesisMode, Limits, PlumbingGraph, RelativeContext,
    SubgraphEmbedding,
};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::format::{format_cycle, Coords, GraphDoc};
use crate::generate::{random_instance, Instance, InstanceParams};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FuzzConfig {
    pub seed: u64,
    pub count: u64,
    pub params: InstanceParams,
    /// Towers with more nodes are skipped.
    pub tower_cap: u64,
}

impl Default for FuzzConfig {
    fn default() -> Self {
        FuzzConfig { seed: 1, count: 50, params: InstanceParams::default(), tower_cap: 10_000 }
    }
}

/// An instance in replayable form.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceDoc {
    pub graph: GraphDoc,
    pub cycle: String,
    /// `E*`-coordinates of `-l'`.
    pub class: String,
    pub coords: Coords,
}

impl InstanceDoc {
    pub fn of(inst: &Instance) -> Self {
        let g = &inst.graph;
        InstanceDoc {
            graph: GraphDoc::of(g),
            cycle: format_cycle(g, &inst.z),
            class: format_cycle(g, &plumbing_core::Cycle(inst.a.clone())),
            coords: Coords::Estar,
        }
    }
}

/// Values of the formulas on one instance, `None` where skipped.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Comparison {
    pub generic: Option<i64>,
    pub via_h1: Option<i64>,
    pub section5: Option<i64>,
    pub tower: Option<i64>,
    pub tower_size: Option<u64>,
    /// Errors and failed tower checks, keyed by formula.
    pub errors: BTreeMap<String, String>,
}

impl Comparison {
    pub fn agrees(&self) -> bool {
        let vals: Vec<i64> = [self.generic, self.via_h1, self.section5, self.tower].into_iter().flatten().collect();
        self.errors.is_empty() && vals.windows(2).all(|w| w[0] == w[1])
    }
}

fn record<T>(errors: &mut BTreeMap<String, String>, key: &str, r: plumbing_core::Result<T>) -> Option<T> {
    match r {
        Ok(v) => Some(v),
        Err(e) => {
            errors.insert(key.into(), format!("{}: {e}", e.name()));
            None
        }
    }
}

/// Runs every formula on `(graph, Z, l')`.
pub fn compare(
    graph: &PlumbingGraph,
    z: &plumbing_core::Cycle,
    lprime: &plumbing_core::RatCycle,
    limits: &Limits,
    tower_cap: u64,
) -> Comparison {
    let mut errors = BTreeMap::new();
    let generic = record(&mut errors, "generic", dim_abel_generic(graph, z, lprime, limits).map(|r| r.dimension));
    let structure = GenericStructure { limits: limits.clone() };
    let via_h1 = record(&mut errors, "via_h1", dim_abel_via_h1(graph, z, lprime, &structure, limits).map(|r| r.dimension));
    let oracle = GenericOracle { limits: limits.clone(), ..GenericOracle::default() };
    let section5 = SubgraphEmbedding::new(graph, &vec![false; graph.n()])
        .and_then(|emb| RelativeContext::new(graph, emb, &oracle, HypothesisMode::Warn, limits.clone()))
        .and_then(|ctx| dim_abel_section5(&ctx, z, lprime));
    let section5 = record(&mut errors, "section5", section5.map(|r| r.dimension));
    let (mut tower, mut tower_size) = (None, None);
    match build_tower(graph, z, lprime, tower_cap) {
        Ok(spec) => {
            tower_size = Some(spec.size);
            if let Some(r) = record(&mut errors, "tower", d_recursion(&spec, &structure)) {
                if !r.violations.is_empty() {
                    errors.insert("tower".into(), r.violations.join("; "));
                }
                tower = Some(r.d0);
            }
        }
        Err(CoreError::TowerTooLarge { size, .. }) => tower_size = Some(size),
        Err(e) => {
            errors.insert("tower".into(), format!("{}: {e}", e.name()));
        }
    }
    Comparison { generic, via_h1, section5, tower, tower_size, errors }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Disagreement {
    pub index: u64,
    pub instance: InstanceDoc,
    pub values: Comparison,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FuzzReport {
    pub count: u64,
    pub agreements: u64,
    /// Instances whose tower was within the cap and checked.
    pub towers_checked: u64,
    pub disagreements: Vec<Disagreement>,
}

impl FuzzReport {
    pub fn ok(&self) -> bool {
        self.disagreements.is_empty()
    }
}

/// Compares the formulas on `count` seeded instances. The report depends only
/// on the configuration, not on the number of worker threads.
pub fn fuzz_coincidence(cfg: &FuzzConfig, limits: &Limits) -> FuzzReport {
    let results: Vec<(u64, Instance, Comparison)> = (0..cfg.count)
        .into_par_iter()
        .map(|i| {
            let inst = random_instance(cfg.seed, i, &cfg.params);
            let c = compare(&inst.graph, &inst.z, &inst.lprime, limits, cfg.tower_cap);
            (i, inst, c)
        })
        .collect();
    let mut report = FuzzReport { count: cfg.count, agreements: 0, towers_checked: 0, disagreements: Vec::new() };
    for (index, inst, values) in results {
        if values.tower.is_some() {
            report.towers_checked += 1;
        }
        if values.agrees() {
            report.agreements += 1;
        } else {
            report.disagreements.push(Disagreement { index, instance: InstanceDoc::of(&inst), values });
        }
    }
    report
}
