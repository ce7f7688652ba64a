use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use num_traits::One;

use crate::cycle::{Cycle, RatCycle};
use crate::error::{Error, Result};
use crate::graph::PlumbingGraph;
use crate::Q;

/// Blow-up of a generic point of one exceptional curve.
///
/// The centre's Euler number drops by one and a new `-1` vertex is attached
/// to it.
#[derive(Debug, Clone)]
pub struct BlowupMap {
    pub source: PlumbingGraph,
    pub target: PlumbingGraph,
    /// Centre, as an index of the source graph.
    pub center: usize,
    /// Index of the new vertex in the target graph.
    pub new_vertex: usize,
    /// Target index of every source vertex.
    pub index_map: Vec<usize>,
}

/// Fresh id derived from `base` that is not used in `graph`.
pub fn fresh_id(graph: &PlumbingGraph, base: &str) -> String {
    let mut k = 1usize;
    loop {
        let cand = format!("{base}^{k}");
        if graph.index_of(&cand).is_err() {
            return cand;
        }
        k += 1;
    }
}

/// Blows up `graph` at the curve `center` (by id). The new vertex gets
/// `new_id`, or a fresh id derived from the centre.
pub fn blow_up(graph: &PlumbingGraph, center: &str, new_id: Option<&str>) -> Result<BlowupMap> {
    let c = graph.index_of(center)?;
    let new_id: String = match new_id {
        Some(id) => {
            if graph.index_of(id).is_ok() {
                return Err(Error::DuplicateVertex(id.into()));
            }
            id.into()
        }
        None => fresh_id(graph, center),
    };
    let target = blow_up_graph(graph, c, &new_id);
    let new_vertex = target.index_of(&new_id)?;
    let index_map = (0..graph.n()).map(|v| if v < new_vertex { v } else { v + 1 }).collect();
    Ok(BlowupMap { source: graph.clone(), target, center: c, new_vertex, index_map })
}

/// Target graph of a blow-up, with the derived data updated in place of a
/// fresh elimination: `π*E*_w = E*_w`, `E*_new = π*E*_c + E_new`,
/// `Z_K' = π*Z_K - E_new` and the determinant changes sign.
pub(crate) fn blow_up_graph(graph: &PlumbingGraph, c: usize, new_id: &str) -> PlumbingGraph {
    let n = graph.n();
    let pos = graph.ids().partition_point(|x| x.as_str() < new_id);
    let map = |v: usize| if v < pos { v } else { v + 1 };

    let mut ids: Vec<String> = graph.ids().to_vec();
    ids.insert(pos, new_id.into());
    let mut euler: Vec<i64> = graph.euler().to_vec();
    euler[c] -= 1;
    euler.insert(pos, -1);
    let mut edges: Vec<(usize, usize)> = graph.edges().iter().map(|&(a, b)| (map(a), map(b))).collect();
    edges.push((map(c), pos));

    let lift = |x: &RatCycle| -> RatCycle {
        let mut v: Vec<Q> = x.0.clone();
        v.insert(pos, x.0[c].clone());
        RatCycle(v)
    };
    let mut dual: Vec<RatCycle> = graph.dual_all().iter().map(lift).collect();
    let mut extra = dual[c].clone();
    extra.0[pos] += Q::one();
    dual.insert(pos, extra);
    let mut zk = lift(graph.zk());
    zk.0[pos] -= Q::one();
    let det = -graph.det().clone();
    debug_assert_eq!(dual.len(), n + 1);
    PlumbingGraph::from_parts(ids, euler, edges, det, dual, zk)
}

impl BlowupMap {
    /// Pullback of a rational cycle: the new coefficient copies the centre's.
    pub fn pullback(&self, x: &RatCycle) -> Result<RatCycle> {
        if x.len() != self.source.n() {
            return Err(Error::GraphMismatch);
        }
        let mut out = RatCycle::zero(self.target.n());
        for (v, &t) in self.index_map.iter().enumerate() {
            out.0[t] = x.0[v].clone();
        }
        out.0[self.new_vertex] = x.0[self.center].clone();
        Ok(out)
    }

    pub fn pullback_int(&self, x: &Cycle) -> Result<Cycle> {
        if x.len() != self.source.n() {
            return Err(Error::GraphMismatch);
        }
        let mut out = Cycle::zero(self.target.n());
        for (v, &t) in self.index_map.iter().enumerate() {
            out.0[t] = x.0[v];
        }
        out.0[self.new_vertex] = x.0[self.center];
        Ok(out)
    }

    /// Target-indexed 0/1 mask of a source-indexed mask; the new vertex is
    /// outside.
    pub fn lift_mask(&self, mask: &[bool]) -> Vec<bool> {
        let mut out = alloc::vec![false; self.target.n()];
        for (v, &t) in self.index_map.iter().enumerate() {
            out[t] = mask[v];
        }
        out
    }
}
