//! Dimension of the Abel image through a tower of blow-ups.
//!
//! For `-l' = Σ a_v E*_v`, every vertex `v` carries `a_v` chains
//! `E_v - F_1 - .. - F_s` of length `s <= m_v`, where `m_v` is the coefficient
//! of `max(0, ⌊Z_K⌋)`. A node `s` of the tower records the chain lengths; its
//! graph is obtained by successive blow-ups, its cycle is the pullback of `Z`
//! and the tips of the chains form the set `I_s`.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::{Signed, ToPrimitive};

use crate::abel::StructureSheaf;
use crate::blowup::blow_up_graph;
use crate::cycle::{Cycle, RatCycle};
use crate::error::{Error, Result};
use crate::graph::PlumbingGraph;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Chain {
    /// Vertex of the original graph the chain starts from.
    pub vertex: usize,
    /// Index among the chains at the same vertex.
    pub k: u32,
    /// Maximal length `m_v`.
    pub len: u32,
}

#[derive(Debug, Clone)]
pub struct TowerSpec {
    pub graph: PlumbingGraph,
    pub z: Cycle,
    /// `E*`-coefficients of `-l'`.
    pub a: Vec<i64>,
    pub m: Vec<i64>,
    pub chains: Vec<Chain>,
    /// Number of nodes.
    pub size: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TowerNode {
    pub s: Vec<u32>,
    pub e: i64,
    pub d: i64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TowerResult {
    pub d0: i64,
    /// `h¹(O_Z)`, equal to `h¹(O_{Z_s})` at every node.
    pub h1: i64,
    /// Nodes in mixed-radix order, chain 0 most significant.
    pub nodes: Vec<TowerNode>,
    /// Indices of a descent from the root along which `d` drops by one per
    /// step, ending at a node where `d = e`.
    pub path: Vec<usize>,
    /// Failed post-hoc checks; empty on consistent input.
    pub violations: Vec<String>,
}

/// Sets up the tower for `(Z, l')`, refusing more than `cap` nodes.
pub fn build_tower(graph: &PlumbingGraph, z: &Cycle, lprime: &RatCycle, cap: u64) -> Result<TowerSpec> {
    graph.check_len(z)?;
    if let Some(v) = (0..graph.n()).find(|&v| z[v] < 1) {
        return Err(Error::CycleBelowE(graph.id(v).into()));
    }
    let a = graph.require_neg_lipman(lprime)?;
    let m: Vec<i64> = graph
        .zk()
        .floor()
        .iter()
        .map(|f| if f.is_positive() { f.to_i64().unwrap_or(i64::MAX) } else { 0 })
        .collect();
    let mut chains = Vec::new();
    let mut size: u64 = 1;
    for v in 0..graph.n() {
        for k in 0..a[v] {
            let len = u32::try_from(m[v]).map_err(|_| Error::Overflow("chain length".into()))?;
            chains.push(Chain { vertex: v, k: k as u32, len });
            size = size.saturating_mul(u64::from(len) + 1);
            if size > cap {
                return Err(Error::TowerTooLarge { size, cap });
            }
        }
    }
    Ok(TowerSpec { graph: graph.clone(), z: z.clone(), a, m, chains, size })
}

fn chain_id(spec: &TowerSpec, c: usize, t: u32) -> String {
    let ch = &spec.chains[c];
    if t == 0 {
        spec.graph.id(ch.vertex).into()
    } else {
        format!("{}#{}.{}", spec.graph.id(ch.vertex), ch.k, t)
    }
}

#[derive(Clone)]
struct State {
    graph: PlumbingGraph,
    z: Cycle,
}

fn extend_chain(spec: &TowerSpec, st: &State, c: usize, s: u32) -> Result<State> {
    let mut graph = st.graph.clone();
    let mut z = st.z.clone();
    for t in 1..=s {
        let center = graph.index_of(&chain_id(spec, c, t - 1))?;
        let new_id = chain_id(spec, c, t);
        if graph.index_of(&new_id).is_ok() {
            return Err(Error::DuplicateVertex(new_id));
        }
        let target = blow_up_graph(&graph, center, &new_id);
        let pos = target.index_of(&new_id)?;
        let coeff = z[center];
        z.0.insert(pos, coeff);
        graph = target;
    }
    Ok(State { graph, z })
}

fn digits(spec: &TowerSpec, mut idx: u64) -> Vec<u32> {
    let mut s = vec![0u32; spec.chains.len()];
    for c in (0..spec.chains.len()).rev() {
        let r = u64::from(spec.chains[c].len) + 1;
        s[c] = (idx % r) as u32;
        idx /= r;
    }
    s
}

/// Computes `e_s` at every node and runs the recursion for `d_s`:
/// `d_m = 0` at the top node; otherwise, over the children in non-saturated
/// directions, `d_s` is their maximum when they differ, and for a common
/// value `c` it is `c` if `c = e_s` and `c + 1` if not. A tower with a single
/// node has `d_0 = e_0`.
pub fn d_recursion(spec: &TowerSpec, provider: &dyn StructureSheaf) -> Result<TowerResult> {
    let k = spec.chains.len();
    let size = spec.size as usize;
    let h1 = provider.h1_o(&spec.graph, &spec.z)?;
    let mut violations = Vec::new();
    let mut nodes = Vec::with_capacity(size);
    let mut states: Vec<State> = vec![State { graph: spec.graph.clone(), z: spec.z.clone() }];
    let mut prev: Option<Vec<u32>> = None;
    for idx in 0..size {
        let s = digits(spec, idx as u64);
        let c0 = match &prev {
            None => 0,
            Some(p) => (0..k).find(|&c| p[c] != s[c]).unwrap_or(k),
        };
        states.truncate(c0 + 1);
        for c in c0..k {
            let next = extend_chain(spec, &states[c], c, s[c])?;
            states.push(next);
        }
        let st = &states[k];
        let mut tips = vec![false; st.graph.n()];
        for c in 0..k {
            tips[st.graph.index_of(&chain_id(spec, c, s[c]))?] = true;
        }
        let hs = provider.h1_o(&st.graph, &st.z)?;
        if hs != h1 {
            violations.push(format!("h1 of the pulled-back cycle at {s:?} is {hs}, expected {h1}"));
        }
        let off: Vec<bool> = tips.iter().map(|t| !t).collect();
        let e = hs - provider.h1_o(&st.graph, &st.z.masked(&off))?;
        nodes.push(TowerNode { s: s.clone(), e, d: 0 });
        prev = Some(s);
    }

    let mut strides = vec![1usize; k];
    for c in (0..k.saturating_sub(1)).rev() {
        strides[c] = strides[c + 1] * (spec.chains[c + 1].len as usize + 1);
    }
    let children = |idx: usize, s: &[u32]| -> Vec<usize> {
        (0..k).filter(|&c| s[c] < spec.chains[c].len).map(|c| idx + strides[c]).collect()
    };
    if size == 1 {
        nodes[0].d = nodes[0].e;
    } else {
        for idx in (0..size).rev() {
            let ch = children(idx, &nodes[idx].s);
            if ch.is_empty() {
                nodes[idx].d = 0;
                if nodes[idx].e != 0 {
                    violations.push(format!("e at the top node is {}, expected 0", nodes[idx].e));
                }
                continue;
            }
            let vals: Vec<i64> = ch.iter().map(|&j| nodes[j].d).collect();
            let hi = *vals.iter().max().unwrap_or(&0);
            let lo = *vals.iter().min().unwrap_or(&0);
            nodes[idx].d = if hi != lo || hi == nodes[idx].e { hi } else { hi + 1 };
        }
    }

    for idx in 0..size {
        let (e, d) = (nodes[idx].e, nodes[idx].d);
        if d > e {
            violations.push(format!("d = {d} exceeds e = {e} at {:?}", nodes[idx].s));
        }
        for j in children(idx, &nodes[idx].s) {
            let step = d - nodes[j].d;
            if !(0..=1).contains(&step) {
                violations.push(format!("d drops by {step} from {:?} to {:?}", nodes[idx].s, nodes[j].s));
            }
            if nodes[j].e > e {
                violations.push(format!("e increases from {:?} to {:?}", nodes[idx].s, nodes[j].s));
            }
        }
    }

    let mut path = vec![0usize];
    loop {
        let cur = *path.last().unwrap_or(&0);
        let next = children(cur, &nodes[cur].s).into_iter().find(|&j| nodes[j].d == nodes[cur].d - 1);
        match next {
            Some(j) => path.push(j),
            None => break,
        }
    }
    let end = *path.last().unwrap_or(&0);
    if nodes[end].d != nodes[end].e {
        violations.push(format!("descent ends at {:?} with d != e", nodes[end].s));
    }
    Ok(TowerResult { d0: nodes[0].d, h1, nodes, path, violations })
}
