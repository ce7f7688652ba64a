use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::hash::{Hash, Hasher};

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use crate::cycle::{q_from_i64, Cycle, RatCycle};
use crate::error::{Error, Result};
use crate::linalg;
use crate::Q;

/// Negative-definite plumbing tree with its derived lattice data.
///
/// Vertices are stored in lexicographic order of their ids; every cycle on
/// this graph is indexed by that order.
#[derive(Debug, Clone)]
pub struct PlumbingGraph {
    ids: Vec<String>,
    euler: Vec<i64>,
    neighbors: Vec<Vec<usize>>,
    edges: Vec<(usize, usize)>,
    det: BigInt,
    /// `dual[u]` holds the E-coordinates of `E*_u`.
    dual: Vec<RatCycle>,
    zk: RatCycle,
}

impl PartialEq for PlumbingGraph {
    fn eq(&self, other: &Self) -> bool {
        self.ids == other.ids && self.euler == other.euler && self.edges == other.edges
    }
}

impl Eq for PlumbingGraph {}

impl Hash for PlumbingGraph {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.ids.hash(state);
        self.euler.hash(state);
        self.edges.hash(state);
    }
}

impl PlumbingGraph {
    /// Builds and validates a graph from `(id, euler)` pairs and id edges.
    pub fn new(vertices: Vec<(String, i64)>, edges: Vec<(String, String)>) -> Result<Self> {
        if vertices.is_empty() {
            return Err(Error::EmptyGraph);
        }
        let mut vertices = vertices;
        vertices.sort_by(|a, b| a.0.cmp(&b.0));
        for w in vertices.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(Error::DuplicateVertex(w[0].0.clone()));
            }
        }
        let index: BTreeMap<&str, usize> = vertices.iter().enumerate().map(|(i, (id, _))| (id.as_str(), i)).collect();
        let mut idx_edges = Vec::with_capacity(edges.len());
        for (a, b) in &edges {
            let ia = *index.get(a.as_str()).ok_or_else(|| Error::UnknownVertex(a.clone()))?;
            let ib = *index.get(b.as_str()).ok_or_else(|| Error::UnknownVertex(b.clone()))?;
            idx_edges.push((ia, ib));
        }
        let ids: Vec<String> = vertices.iter().map(|(id, _)| id.clone()).collect();
        let euler: Vec<i64> = vertices.iter().map(|(_, e)| *e).collect();
        Self::from_indexed(ids, euler, idx_edges)
    }

    /// Builds from already sorted ids and index edges.
    pub(crate) fn from_indexed(ids: Vec<String>, euler: Vec<i64>, edges: Vec<(usize, usize)>) -> Result<Self> {
        let n = ids.len();
        if n == 0 {
            return Err(Error::EmptyGraph);
        }
        let mut norm: Vec<(usize, usize)> = Vec::with_capacity(edges.len());
        for (a, b) in edges {
            if a == b {
                return Err(Error::NotATree(format!("loop at `{}`", ids[a])));
            }
            norm.push((a.min(b), a.max(b)));
        }
        norm.sort_unstable();
        for w in norm.windows(2) {
            if w[0] == w[1] {
                return Err(Error::NotATree(format!("repeated edge `{}`-`{}`", ids[w[0].0], ids[w[0].1])));
            }
        }
        if norm.len() + 1 != n {
            return Err(Error::NotATree(format!("{} vertices but {} edges", n, norm.len())));
        }
        let mut neighbors = vec![Vec::new(); n];
        for &(a, b) in &norm {
            neighbors[a].push(b);
            neighbors[b].push(a);
        }
        for nb in &mut neighbors {
            nb.sort_unstable();
        }
        let mut seen = vec![false; n];
        let mut stack = vec![0usize];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for &w in &neighbors[v] {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        if let Some(v) = seen.iter().position(|s| !s) {
            return Err(Error::NotATree(format!("`{}` is not connected to `{}`", ids[v], ids[0])));
        }

        let matrix = intersection_matrix(&euler, &norm);
        match linalg::leading_minors(&matrix) {
            Ok(minors) => {
                for (k, m) in minors.iter().enumerate() {
                    if !linalg::negative_definite_sign_ok(k + 1, m) {
                        return Err(Error::NotNegativeDefinite { order: k + 1 });
                    }
                }
            }
            Err(order) => return Err(Error::NotNegativeDefinite { order }),
        }
        let (det, adj) = linalg::det_adjugate(&matrix);
        // I^{-1} = adj / det and E*_u = -sum_w (I^{-1})_{wu} E_w.
        let dual: Vec<RatCycle> = (0..n)
            .map(|u| RatCycle((0..n).map(|w| Q::new(-adj[w][u].clone(), det.clone())).collect()))
            .collect();
        // (Z_K, E_v) = e_v + 2, so Z_K = -sum_v (e_v + 2) E*_v.
        let mut zk = RatCycle::zero(n);
        for v in 0..n {
            let c = q_from_i64(-(euler[v] + 2));
            if c.is_zero() {
                continue;
            }
            for w in 0..n {
                zk.0[w] += &c * &dual[v].0[w];
            }
        }
        Ok(PlumbingGraph { ids, euler, neighbors, edges: norm, det, dual, zk })
    }

    pub fn n(&self) -> usize {
        self.ids.len()
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn id(&self, v: usize) -> &str {
        &self.ids[v]
    }

    pub fn index_of(&self, id: &str) -> Result<usize> {
        self.ids.binary_search_by(|x| x.as_str().cmp(id)).map_err(|_| Error::UnknownVertex(id.to_string()))
    }

    pub fn euler(&self) -> &[i64] {
        &self.euler
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.neighbors[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.neighbors[v].len()
    }

    /// Edges as sorted index pairs `(a, b)` with `a < b`.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// Signed determinant of the intersection matrix.
    pub fn det(&self) -> &BigInt {
        &self.det
    }

    /// Order of the discriminant group `H = L'/L`.
    pub fn discriminant_order(&self) -> BigInt {
        self.det.abs()
    }

    pub fn intersection_matrix(&self) -> Vec<Vec<i64>> {
        intersection_matrix(&self.euler, &self.edges)
    }

    /// E-coordinates of the dual basis element `E*_v`.
    pub fn dual_basis(&self, v: usize) -> &RatCycle {
        &self.dual[v]
    }

    /// Canonical cycle `Z_K`.
    pub fn zk(&self) -> &RatCycle {
        &self.zk
    }

    /// The reduced cycle `E` of the whole graph.
    pub fn reduced_cycle(&self) -> Cycle {
        Cycle(vec![1; self.n()])
    }

    /// `(E_v, x)` for a rational cycle.
    pub fn pair_basis(&self, v: usize, x: &RatCycle) -> Q {
        let mut s = &x.0[v] * q_from_i64(self.euler[v]);
        for &w in &self.neighbors[v] {
            s += &x.0[w];
        }
        s
    }

    /// `(E_v, l)` for an integral cycle.
    pub fn pair_basis_int(&self, v: usize, l: &Cycle) -> i64 {
        let mut s = self.euler[v] * l.0[v];
        for &w in &self.neighbors[v] {
            s += l.0[w];
        }
        s
    }

    /// Intersection pairing on `L ⊗ Q`.
    pub fn pair(&self, x: &RatCycle, y: &RatCycle) -> Q {
        let mut s = Q::zero();
        for v in 0..self.n() {
            if !x.0[v].is_zero() && !y.0[v].is_zero() {
                s += &x.0[v] * &y.0[v] * q_from_i64(self.euler[v]);
            }
        }
        for &(a, b) in &self.edges {
            s += &x.0[a] * &y.0[b] + &x.0[b] * &y.0[a];
        }
        s
    }

    /// Intersection pairing on `L`.
    pub fn pair_int(&self, x: &Cycle, y: &Cycle) -> i64 {
        let mut s: i64 = 0;
        for v in 0..self.n() {
            s += self.euler[v] * x.0[v] * y.0[v];
        }
        for &(a, b) in &self.edges {
            s += x.0[a] * y.0[b] + x.0[b] * y.0[a];
        }
        s
    }

    /// `(x, l)` for rational `x` and integral `l`.
    pub fn pair_mixed(&self, x: &RatCycle, l: &Cycle) -> Q {
        let mut s = Q::zero();
        for v in 0..self.n() {
            if l.0[v] != 0 {
                s += self.pair_basis(v, x) * q_from_i64(l.0[v]);
            }
        }
        s
    }

    /// Riemann-Roch expression `χ(x) = -(x, x - Z_K)/2`.
    pub fn chi(&self, x: &RatCycle) -> Q {
        let diff = x - &self.zk;
        -self.pair(x, &diff) / q_from_i64(2)
    }

    /// `χ(l)` on integral cycles, evaluated in integer arithmetic.
    pub fn chi_int(&self, l: &Cycle) -> i64 {
        chi_int_raw(&self.euler, &self.edges, &l.0)
    }

    /// Degrees `d_v = (x, E_v)`, which must all be integers for `x ∈ L'`.
    pub fn degrees(&self, x: &RatCycle) -> Result<Vec<i64>> {
        self.check_len_rat(x)?;
        (0..self.n())
            .map(|v| {
                let d = self.pair_basis(v, x);
                crate::cycle::q_to_i64(&d).ok_or_else(|| Error::NotInLprime(self.ids[v].clone()))
            })
            .collect()
    }

    /// Coefficients `a_v` with `x = Σ a_v E*_v`, i.e. `a_v = -(x, E_v)`.
    pub fn estar_coords(&self, x: &RatCycle) -> Result<Vec<i64>> {
        Ok(self.degrees(x)?.into_iter().map(|d| -d).collect())
    }

    /// The class `Σ a_v E*_v` in E-coordinates.
    pub fn from_estar(&self, a: &[i64]) -> Result<RatCycle> {
        if a.len() != self.n() {
            return Err(Error::GraphMismatch);
        }
        let mut x = RatCycle::zero(self.n());
        for (v, &c) in a.iter().enumerate() {
            if c == 0 {
                continue;
            }
            let qc = q_from_i64(c);
            for w in 0..self.n() {
                x.0[w] += &qc * &self.dual[v].0[w];
            }
        }
        Ok(x)
    }

    /// `x ∈ L'` with `(x, E_v) ≥ 0` for every vertex.
    pub fn in_neg_lipman(&self, x: &RatCycle) -> Result<bool> {
        Ok(self.degrees(x)?.iter().all(|&d| d >= 0))
    }

    /// Like [`in_neg_lipman`](Self::in_neg_lipman) but reports the first
    /// offending vertex as an error.
    pub fn require_neg_lipman(&self, x: &RatCycle) -> Result<Vec<i64>> {
        let d = self.degrees(x)?;
        if let Some(v) = d.iter().position(|&d| d < 0) {
            return Err(Error::NotNegLipman(self.ids[v].clone()));
        }
        Ok(d)
    }

    /// Minimal nonzero element of the Lipman cone, by Laufer's descent from `E`.
    pub fn minimal_cycle(&self) -> Cycle {
        self.minimal_cycle_by(&mut |c: &[usize]| c[0])
    }

    /// Laufer descent where `pick` chooses which violating vertex to raise.
    pub fn minimal_cycle_by(&self, pick: &mut dyn FnMut(&[usize]) -> usize) -> Cycle {
        let mut l = self.reduced_cycle();
        loop {
            let bad: Vec<usize> = (0..self.n()).filter(|&v| self.pair_basis_int(v, &l) > 0).collect();
            if bad.is_empty() {
                return l;
            }
            let v = pick(&bad);
            debug_assert!(bad.contains(&v));
            l.0[v] += 1;
        }
    }

    /// Representative of the class of `x` in `H` inside the unit cube.
    pub fn cube_representative(&self, x: &RatCycle) -> Result<RatCycle> {
        self.degrees(x)?;
        Ok(x.fractional_part())
    }

    pub(crate) fn check_len(&self, c: &Cycle) -> Result<()> {
        if c.len() == self.n() {
            Ok(())
        } else {
            Err(Error::GraphMismatch)
        }
    }

    pub(crate) fn check_len_rat(&self, c: &RatCycle) -> Result<()> {
        if c.len() == self.n() {
            Ok(())
        } else {
            Err(Error::GraphMismatch)
        }
    }

    /// Raw pieces for incremental construction by blow-up.
    pub(crate) fn from_parts(
        ids: Vec<String>,
        euler: Vec<i64>,
        edges: Vec<(usize, usize)>,
        det: BigInt,
        dual: Vec<RatCycle>,
        zk: RatCycle,
    ) -> Self {
        let n = ids.len();
        let mut edges = edges;
        for e in &mut edges {
            *e = (e.0.min(e.1), e.0.max(e.1));
        }
        edges.sort_unstable();
        let mut neighbors = vec![Vec::new(); n];
        for &(a, b) in &edges {
            neighbors[a].push(b);
            neighbors[b].push(a);
        }
        for nb in &mut neighbors {
            nb.sort_unstable();
        }
        PlumbingGraph { ids, euler, neighbors, edges, det, dual, zk }
    }

    pub(crate) fn dual_all(&self) -> &[RatCycle] {
        &self.dual
    }
}

fn intersection_matrix(euler: &[i64], edges: &[(usize, usize)]) -> Vec<Vec<i64>> {
    let n = euler.len();
    let mut m = vec![vec![0i64; n]; n];
    for v in 0..n {
        m[v][v] = euler[v];
    }
    for &(a, b) in edges {
        m[a][b] = 1;
        m[b][a] = 1;
    }
    m
}

/// `χ(l) = Σ_v [l_v - e_v l_v (l_v - 1)/2] - Σ_{edges} l_u l_w`.
pub(crate) fn chi_int_raw(euler: &[i64], edges: &[(usize, usize)], l: &[i64]) -> i64 {
    let mut s = 0i64;
    for (v, &x) in l.iter().enumerate() {
        s += x - euler[v] * (x * (x - 1) / 2);
    }
    for &(a, b) in edges {
        s -= l[a] * l[b];
    }
    s
}
