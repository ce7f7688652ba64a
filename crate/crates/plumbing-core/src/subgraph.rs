use alloc::vec;
use alloc::vec::Vec;

use crate::cycle::{Cycle, RatCycle};
use crate::error::{Error, Result};
use crate::graph::PlumbingGraph;

/// Connected components of the subgraph induced by `mask`, each sorted, listed
/// by smallest vertex.
pub fn components(graph: &PlumbingGraph, mask: &[bool]) -> Vec<Vec<usize>> {
    let n = graph.n();
    let mut seen = vec![false; n];
    let mut out = Vec::new();
    for s in 0..n {
        if !mask[s] || seen[s] {
            continue;
        }
        let mut comp = Vec::new();
        let mut stack = vec![s];
        seen[s] = true;
        while let Some(v) = stack.pop() {
            comp.push(v);
            for &w in graph.neighbors(v) {
                if mask[w] && !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        comp.sort_unstable();
        out.push(comp);
    }
    out
}

/// Splits a cycle along the connected components of its support.
pub fn split_cycle(graph: &PlumbingGraph, z: &Cycle) -> Vec<Cycle> {
    components(graph, &z.support_mask())
        .into_iter()
        .map(|comp| {
            let mut c = Cycle::zero(z.len());
            for v in comp {
                c.0[v] = z.0[v];
            }
            c
        })
        .collect()
}

/// True when the support of `z` is nonempty and connected.
pub fn is_connected_cycle(graph: &PlumbingGraph, z: &Cycle) -> bool {
    components(graph, &z.support_mask()).len() == 1
}

/// One connected component of an induced subgraph, as a standalone graph.
#[derive(Debug, Clone)]
pub struct Component {
    pub graph: PlumbingGraph,
    /// Parent index of every component vertex, increasing.
    pub to_parent: Vec<usize>,
}

impl Component {
    pub fn restrict(&self, c: &Cycle) -> Cycle {
        Cycle(self.to_parent.iter().map(|&p| c.0[p]).collect())
    }

    pub fn restrict_rat(&self, c: &RatCycle) -> RatCycle {
        RatCycle(self.to_parent.iter().map(|p| c.0[*p].clone()).collect())
    }

    /// Adds the component cycle into a parent-indexed cycle.
    pub fn extend_into(&self, c: &Cycle, out: &mut Cycle) {
        for (i, &p) in self.to_parent.iter().enumerate() {
            out.0[p] = c.0[i];
        }
    }

    pub fn extend_rat_into(&self, c: &RatCycle, out: &mut RatCycle) {
        for (i, &p) in self.to_parent.iter().enumerate() {
            out.0[p] = c.0[i].clone();
        }
    }
}

/// Embedding of the subgraph induced by a vertex subset `V_1`.
///
/// The subgraph may be disconnected or empty; each connected component is a
/// validated graph of its own.
#[derive(Debug, Clone)]
pub struct SubgraphEmbedding {
    parent_n: usize,
    mask: Vec<bool>,
    components: Vec<Component>,
    owner: Vec<Option<usize>>,
}

impl SubgraphEmbedding {
    pub fn new(graph: &PlumbingGraph, mask: &[bool]) -> Result<Self> {
        if mask.len() != graph.n() {
            return Err(Error::GraphMismatch);
        }
        let mut owner = vec![None; graph.n()];
        let mut comps = Vec::new();
        for (ci, comp) in components(graph, mask).into_iter().enumerate() {
            let ids = comp.iter().map(|&v| graph.id(v).into()).collect();
            let euler = comp.iter().map(|&v| graph.euler()[v]).collect();
            let local = |v: usize| comp.binary_search(&v).ok();
            let edges = graph
                .edges()
                .iter()
                .filter_map(|&(a, b)| Some((local(a)?, local(b)?)))
                .collect();
            for &v in &comp {
                owner[v] = Some(ci);
            }
            let sub = PlumbingGraph::from_indexed(ids, euler, edges)?;
            comps.push(Component { graph: sub, to_parent: comp });
        }
        Ok(SubgraphEmbedding { parent_n: graph.n(), mask: mask.to_vec(), components: comps, owner })
    }

    /// Embedding of the vertices with the given ids.
    pub fn from_ids<S: AsRef<str>>(graph: &PlumbingGraph, ids: &[S]) -> Result<Self> {
        let mut mask = vec![false; graph.n()];
        for id in ids {
            mask[graph.index_of(id.as_ref())?] = true;
        }
        Self::new(graph, &mask)
    }

    pub fn parent_n(&self) -> usize {
        self.parent_n
    }

    pub fn mask(&self) -> &[bool] {
        &self.mask
    }

    pub fn contains(&self, v: usize) -> bool {
        self.mask[v]
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn components(&self) -> &[Component] {
        &self.components
    }

    /// Component holding parent vertex `v`.
    pub fn owner(&self, v: usize) -> Option<usize> {
        self.owner[v]
    }

    /// Parent-indexed cycle with coefficients outside `V_1` set to zero.
    pub fn restrict(&self, c: &Cycle) -> Cycle {
        c.masked(&self.mask)
    }
}
