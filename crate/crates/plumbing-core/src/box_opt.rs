//! Exact optimization of χ-type objectives over integer boxes `lo <= l <= hi`.
//!
//! Enumeration order is lexicographic with vertex 0 most significant, so the
//! first optimizer met is the lexicographically least one.

use alloc::collections::VecDeque;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::cycle::{q_from_i64, Cycle, RatCycle};
use crate::error::{Error, Result};
use crate::graph::PlumbingGraph;
use crate::subgraph::split_cycle;
use crate::Q;

const MAX_ABS_BOUND: i64 = 1 << 16;
const MAX_ABS_EULER: i64 = 1 << 16;
const MAX_ABS_LINEAR: i64 = 1 << 30;
const MAX_VERTICES: usize = 1 << 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Strategy {
    /// Visit every lattice point of the box.
    Exhaustive,
    /// Tree dynamic programming with exact cost-to-go bounds. Used only for
    /// objectives without an oracle callback.
    Pruned,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Limits {
    pub volume_cap: u64,
    pub optimizer_cap: usize,
    pub strategy: Strategy,
}

impl Default for Limits {
    fn default() -> Self {
        Limits { volume_cap: 10_000_000, optimizer_cap: 4096, strategy: Strategy::Pruned }
    }
}

impl Limits {
    pub fn with_strategy(&self, strategy: Strategy) -> Limits {
        Limits { strategy, ..self.clone() }
    }
}

/// `constant + chi_coeff * χ(l) + Σ_v linear[v] * l_v`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Objective {
    pub constant: Q,
    pub chi_coeff: i64,
    pub linear: Vec<i64>,
}

impl Objective {
    pub fn zero(n: usize) -> Self {
        Objective { constant: q_from_i64(0), chi_coeff: 0, linear: vec![0; n] }
    }

    /// `χ(l)`.
    pub fn chi(n: usize) -> Self {
        Objective { chi_coeff: 1, ..Objective::zero(n) }
    }

    /// `χ(base + l) = χ(base) + χ(l) - (base, l)`, for `base ∈ L'`.
    pub fn chi_at(graph: &PlumbingGraph, base: &RatCycle) -> Result<Self> {
        let deg = graph.degrees(base)?;
        Ok(Objective { constant: graph.chi(base), chi_coeff: 1, linear: deg.into_iter().map(|d| -d).collect() })
    }

    /// Adds `coeff * (w, l)`, for `w ∈ L'`.
    pub fn add_pairing(mut self, graph: &PlumbingGraph, w: &RatCycle, coeff: i64) -> Result<Self> {
        let deg = graph.degrees(w)?;
        for (c, d) in self.linear.iter_mut().zip(deg) {
            *c += coeff * d;
        }
        Ok(self)
    }

    pub fn negated(&self) -> Self {
        Objective {
            constant: -self.constant.clone(),
            chi_coeff: -self.chi_coeff,
            linear: self.linear.iter().map(|c| -c).collect(),
        }
    }

    /// Integer part of the objective at `l`.
    pub fn eval_int(&self, graph: &PlumbingGraph, l: &Cycle) -> i64 {
        let mut s = 0;
        if self.chi_coeff != 0 {
            s += self.chi_coeff * graph.chi_int(l);
        }
        for (c, x) in self.linear.iter().zip(&l.0) {
            s += c * x;
        }
        s
    }

    pub fn eval(&self, graph: &PlumbingGraph, l: &Cycle) -> Q {
        &self.constant + q_from_i64(self.eval_int(graph, l))
    }
}

#[derive(Debug, Clone)]
pub struct BoxProblem<'g> {
    pub graph: &'g PlumbingGraph,
    pub lower: Cycle,
    pub upper: Cycle,
    pub objective: Objective,
}

impl<'g> BoxProblem<'g> {
    pub fn new(graph: &'g PlumbingGraph, lower: Cycle, upper: Cycle, objective: Objective) -> Self {
        BoxProblem { graph, lower, upper, objective }
    }

    /// Number of lattice points, saturating at `u64::MAX`.
    pub fn volume(&self) -> u64 {
        self.lower
            .0
            .iter()
            .zip(&self.upper.0)
            .map(|(a, b)| (b - a + 1).max(0) as u64)
            .fold(1u64, |acc, r| acc.saturating_mul(r))
    }

    fn validate(&self) -> Result<()> {
        let n = self.graph.n();
        if self.lower.len() != n || self.upper.len() != n || self.objective.linear.len() != n {
            return Err(Error::GraphMismatch);
        }
        if n > MAX_VERTICES {
            return Err(Error::Overflow(format!("{n} vertices")));
        }
        for v in 0..n {
            if self.lower[v] > self.upper[v] {
                return Err(Error::InvalidBox(format!(
                    "lower bound {} above upper bound {} at `{}`",
                    self.lower[v],
                    self.upper[v],
                    self.graph.id(v)
                )));
            }
            if self.lower[v].abs() > MAX_ABS_BOUND || self.upper[v].abs() > MAX_ABS_BOUND {
                return Err(Error::Overflow(format!("box bound at `{}`", self.graph.id(v))));
            }
            if self.graph.euler()[v].abs() > MAX_ABS_EULER {
                return Err(Error::Overflow(format!("Euler number at `{}`", self.graph.id(v))));
            }
            if self.objective.linear[v].abs() > MAX_ABS_LINEAR {
                return Err(Error::Overflow(format!("linear coefficient at `{}`", self.graph.id(v))));
            }
        }
        if self.objective.chi_coeff.abs() > 1 {
            return Err(Error::Overflow("χ coefficient".into()));
        }
        Ok(())
    }
}

/// Optimal value with the optimizer set.
///
/// `optimizers` lists every optimizer in lexicographic order when `count` is
/// at most the cap, and only the lexicographically least one otherwise.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OptResult {
    pub value: Q,
    pub optimizers: Vec<Cycle>,
    pub count: u64,
}

impl OptResult {
    pub fn is_truncated(&self) -> bool {
        self.count > self.optimizers.len() as u64
    }

    /// The optimal value as an integer.
    pub fn int_value(&self) -> Result<i64> {
        crate::cycle::q_to_i64(&self.value).ok_or_else(|| Error::InvariantViolated("non-integral optimum".into()))
    }

    /// Lexicographically least optimizer.
    pub fn first(&self) -> &Cycle {
        &self.optimizers[0]
    }

    /// True when `l` is the only optimizer.
    pub fn is_unique_at(&self, l: &Cycle) -> bool {
        self.count == 1 && self.optimizers[0] == *l
    }

    /// Combines minimization results over two disjoint boxes, where every
    /// point of `self`'s box precedes every point of `other`'s box.
    pub fn merge_min(self, other: OptResult, cap: usize) -> OptResult {
        use core::cmp::Ordering;
        match self.value.cmp(&other.value) {
            Ordering::Less => self,
            Ordering::Greater => other,
            Ordering::Equal => {
                let count = self.count.saturating_add(other.count);
                let mut optimizers = self.optimizers;
                if count <= cap as u64 {
                    optimizers.extend(other.optimizers);
                } else {
                    optimizers.truncate(1);
                }
                OptResult { value: self.value, optimizers, count }
            }
        }
    }

    /// As [`merge_min`](Self::merge_min) for maximization results.
    pub fn merge_max(self, other: OptResult, cap: usize) -> OptResult {
        let neg = |r: OptResult| OptResult { value: -r.value, ..r };
        let m = neg(self).merge_min(neg(other), cap);
        neg(m)
    }
}

/// Callback adding an integer term to the objective at each box point.
pub type Extra<'a> = dyn FnMut(&Cycle) -> Result<i64> + 'a;

fn check_volume(p: &BoxProblem, limits: &Limits) -> Result<u64> {
    let volume = p.volume();
    if volume > limits.volume_cap {
        return Err(Error::BoxTooLarge { volume, cap: limits.volume_cap });
    }
    Ok(volume)
}

/// Minimizes a pure objective with the configured strategy.
pub fn minimize_box(p: &BoxProblem, limits: &Limits) -> Result<OptResult> {
    p.validate()?;
    match limits.strategy {
        Strategy::Exhaustive => {
            check_volume(p, limits)?;
            exhaustive(p, limits, None)
        }
        Strategy::Pruned => pruned(p, limits),
    }
}

/// Maximizes a pure objective with the configured strategy.
pub fn maximize_box(p: &BoxProblem, limits: &Limits) -> Result<OptResult> {
    let neg = BoxProblem { objective: p.objective.negated(), ..p.clone() };
    let r = minimize_box(&neg, limits)?;
    Ok(OptResult { value: -r.value, ..r })
}

/// Minimizes the objective plus a callback term, by exhaustive enumeration.
pub fn minimize_box_with(p: &BoxProblem, limits: &Limits, extra: &mut Extra<'_>) -> Result<OptResult> {
    p.validate()?;
    check_volume(p, limits)?;
    exhaustive(p, limits, Some(extra))
}

/// Maximizes the objective plus a callback term, by exhaustive enumeration.
pub fn maximize_box_with(p: &BoxProblem, limits: &Limits, extra: &mut Extra<'_>) -> Result<OptResult> {
    let neg = BoxProblem { objective: p.objective.negated(), ..p.clone() };
    let mut negated = |l: &Cycle| extra(l).map(|v| -v);
    let r = minimize_box_with(&neg, limits, &mut negated)?;
    Ok(OptResult { value: -r.value, ..r })
}

/// Advances `l` to the lexicographic successor inside the box; false at the end.
pub(crate) fn next_point(l: &mut Cycle, lower: &Cycle, upper: &Cycle) -> bool {
    let mut i = l.len();
    while i > 0 {
        i -= 1;
        if l.0[i] < upper.0[i] {
            l.0[i] += 1;
            for j in i + 1..l.len() {
                l.0[j] = lower.0[j];
            }
            return true;
        }
    }
    false
}

fn exhaustive(p: &BoxProblem, limits: &Limits, mut extra: Option<&mut Extra<'_>>) -> Result<OptResult> {
    let cap = limits.optimizer_cap.max(1);
    let mut l = p.lower.clone();
    let mut best = i64::MAX;
    let mut count = 0u64;
    let mut optimizers: Vec<Cycle> = Vec::new();
    loop {
        let mut val = p.objective.eval_int(p.graph, &l);
        if let Some(cb) = extra.as_mut() {
            val += cb(&l)?;
        }
        if val < best {
            best = val;
            count = 1;
            optimizers.clear();
            optimizers.push(l.clone());
        } else if val == best {
            count += 1;
            if optimizers.len() < cap {
                optimizers.push(l.clone());
            }
        }
        if !next_point(&mut l, &p.lower, &p.upper) {
            break;
        }
    }
    if count > cap as u64 {
        optimizers.truncate(1);
    }
    Ok(OptResult { value: &p.objective.constant + q_from_i64(best), optimizers, count })
}

/// Tables of the min-sum dynamic program on the tree rooted at vertex 0.
struct Dp {
    order: Vec<usize>,
    parent: Vec<usize>,
    /// `cost[v][x - lo_v]`: best subtree value with `l_v = x`.
    cost: Vec<Vec<i64>>,
    count: Vec<Vec<u64>>,
    /// `up[v][xp - lo_p]`: best value of v's subtree given the parent value,
    /// edge term included. Empty for the root.
    up: Vec<Vec<i64>>,
}

struct Rooting {
    order: Vec<usize>,
    parent: Vec<usize>,
    children: Vec<Vec<usize>>,
}

fn rooting(graph: &PlumbingGraph) -> Rooting {
    let n = graph.n();
    let mut parent = vec![usize::MAX; n];
    let mut children = vec![Vec::new(); n];
    let mut order = Vec::with_capacity(n);
    let mut seen = vec![false; n];
    let mut queue = VecDeque::from([0usize]);
    seen[0] = true;
    while let Some(v) = queue.pop_front() {
        order.push(v);
        for &w in graph.neighbors(v) {
            if !seen[w] {
                seen[w] = true;
                parent[w] = v;
                children[v].push(w);
                queue.push_back(w);
            }
        }
    }
    Rooting { order, parent, children }
}

fn unary(p: &BoxProblem, v: usize, x: i64) -> i64 {
    let e = p.graph.euler()[v];
    p.objective.chi_coeff * (x - e * (x * (x - 1) / 2)) + p.objective.linear[v] * x
}

fn run_dp(p: &BoxProblem, r: &Rooting, lo: &[i64], hi: &[i64]) -> Dp {
    let n = p.graph.n();
    let mut cost = vec![Vec::new(); n];
    let mut count = vec![Vec::new(); n];
    let mut up = vec![Vec::new(); n];
    let mut up_count = vec![Vec::new(); n];
    let c = p.objective.chi_coeff;
    for &v in r.order.iter().rev() {
        let range = (hi[v] - lo[v] + 1) as usize;
        let mut cv = Vec::with_capacity(range);
        let mut nv = Vec::with_capacity(range);
        for i in 0..range {
            let x = lo[v] + i as i64;
            let mut s = unary(p, v, x);
            let mut k = 1u64;
            for &ch in &r.children[v] {
                s += up[ch][i];
                k = k.saturating_mul(up_count[ch][i]);
            }
            cv.push(s);
            nv.push(k);
        }
        if r.parent[v] != usize::MAX {
            let pv = r.parent[v];
            let prange = (hi[pv] - lo[pv] + 1) as usize;
            let mut uv = Vec::with_capacity(prange);
            let mut uc = Vec::with_capacity(prange);
            for j in 0..prange {
                let xp = lo[pv] + j as i64;
                let mut best = i64::MAX;
                let mut k = 0u64;
                for i in 0..range {
                    let y = lo[v] + i as i64;
                    let val = cv[i] - c * xp * y;
                    if val < best {
                        best = val;
                        k = nv[i];
                    } else if val == best {
                        k = k.saturating_add(nv[i]);
                    }
                }
                uv.push(best);
                uc.push(k);
            }
            up[v] = uv;
            up_count[v] = uc;
        }
        cost[v] = cv;
        count[v] = nv;
    }
    Dp { order: r.order.clone(), parent: r.parent.clone(), cost, count, up }
}

fn dp_min(dp: &Dp) -> (i64, u64) {
    let root = dp.order[0];
    let mut best = i64::MAX;
    let mut k = 0u64;
    for (i, &c) in dp.cost[root].iter().enumerate() {
        if c < best {
            best = c;
            k = dp.count[root][i];
        } else if c == best {
            k = k.saturating_add(dp.count[root][i]);
        }
    }
    (best, k)
}

fn pruned(p: &BoxProblem, limits: &Limits) -> Result<OptResult> {
    let cap = limits.optimizer_cap.max(1);
    let r = rooting(p.graph);
    let lo = p.lower.0.clone();
    let hi = p.upper.0.clone();
    let dp = run_dp(p, &r, &lo, &hi);
    let (best, count) = dp_min(&dp);
    let optimizers = if count <= cap as u64 {
        let mut all = enumerate_optimal(p, &dp, &lo, best);
        all.sort();
        all
    } else {
        vec![lex_least(p, &r, lo, hi, best)]
    };
    debug_assert!(optimizers.iter().all(|o| p.objective.eval_int(p.graph, o) == best));
    Ok(OptResult { value: &p.objective.constant + q_from_i64(best), optimizers, count })
}

/// All optimal assignments, following the argmin structure of the tables.
fn enumerate_optimal(p: &BoxProblem, dp: &Dp, lo: &[i64], best: i64) -> Vec<Cycle> {
    let n = p.graph.n();
    let c = p.objective.chi_coeff;
    let root = dp.order[0];
    let mut out = Vec::new();
    let mut cur = Cycle::zero(n);
    // Values of the vertex at position `pos` that keep the subtree optimal.
    fn rec(
        pos: usize,
        dp: &Dp,
        lo: &[i64],
        c: i64,
        cur: &mut Cycle,
        out: &mut Vec<Cycle>,
    ) {
        if pos == dp.order.len() {
            out.push(cur.clone());
            return;
        }
        let v = dp.order[pos];
        let pv = dp.parent[v];
        let xp = cur.0[pv];
        let target = dp.up[v][(xp - lo[pv]) as usize];
        for (i, &cv) in dp.cost[v].iter().enumerate() {
            let y = lo[v] + i as i64;
            if cv - c * xp * y == target {
                cur.0[v] = y;
                rec(pos + 1, dp, lo, c, cur, out);
            }
        }
    }
    for (i, &cv) in dp.cost[root].iter().enumerate() {
        if cv == best {
            cur.0[root] = lo[root] + i as i64;
            rec(1, dp, lo, c, &mut cur, &mut out);
        }
    }
    out
}

/// Lexicographically least optimizer by fixing coordinates one at a time.
fn lex_least(p: &BoxProblem, r: &Rooting, mut lo: Vec<i64>, mut hi: Vec<i64>, best: i64) -> Cycle {
    for v in 0..p.graph.n() {
        let (a, b) = (lo[v], hi[v]);
        let mut found = false;
        for x in a..=b {
            lo[v] = x;
            hi[v] = x;
            if dp_min(&run_dp(p, r, &lo, &hi)).0 == best {
                found = true;
                break;
            }
        }
        debug_assert!(found);
    }
    Cycle(lo)
}

/// `h¹(O_Z)` of a generic analytic structure: for each connected component
/// `Z_i` of `Z`, `1 - min { χ(l) : E_{|Z_i|} <= l <= Z_i }`, summed.
pub fn h1_o_generic(graph: &PlumbingGraph, z: &Cycle, limits: &Limits) -> Result<i64> {
    graph.check_len(z)?;
    if !z.is_effective() {
        return Err(Error::InvalidBox("cycle has a negative coefficient".into()));
    }
    let mut total = 0;
    for comp in split_cycle(graph, z) {
        let p = BoxProblem::new(graph, comp.support_cycle(), comp, Objective::chi(graph.n()));
        total += 1 - minimize_box(&p, limits)?.int_value()?;
    }
    Ok(total)
}

/// `h¹(Z, L)` of a generic line bundle with Chern class `l'`:
/// `max { -χ(l) - (l', l) : 0 <= l <= Z }`.
pub fn h1_pic_generic(graph: &PlumbingGraph, z: &Cycle, lprime: &RatCycle, limits: &Limits) -> Result<OptResult> {
    graph.check_len(z)?;
    if !z.is_effective() {
        return Err(Error::InvalidBox("cycle has a negative coefficient".into()));
    }
    let mut obj = Objective::zero(graph.n()).add_pairing(graph, lprime, -1)?;
    obj.chi_coeff = -1;
    let p = BoxProblem::new(graph, Cycle::zero(graph.n()), z.clone(), obj);
    maximize_box(&p, limits)
}
