//! Seeded random graphs and instances.

use plumbing_core::{Cycle, PlumbingGraph, RatCycle};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum GenMode {
    /// Euler numbers `e_v <= -deg(v) - 1`: always negative definite, always rational.
    Dominant,
    /// Euler numbers uniform in the range, resampled until negative definite.
    Free,
    /// Star-shaped: a centre with Euler number -1 or -2 and chains of legs
    /// with Euler numbers in the range (capped at -2), resampled until
    /// negative definite. Produces many non-rational graphs.
    Star,
}

/// Parameters of the graph generator.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphParams {
    pub n: usize,
    /// Most negative Euler number.
    pub euler_min: i64,
    /// Least negative Euler number.
    pub euler_max: i64,
    pub mode: GenMode,
}

impl Default for GraphParams {
    fn default() -> Self {
        GraphParams { n: 4, euler_min: -4, euler_max: -2, mode: GenMode::Dominant }
    }
}

fn vertex_id(v: usize) -> String {
    format!("v{v}")
}

/// Uniform labelled tree on `n` vertices via a Prüfer sequence.
fn random_tree(rng: &mut ChaCha8Rng, n: usize) -> Vec<(usize, usize)> {
    if n < 2 {
        return Vec::new();
    }
    let seq: Vec<usize> = (0..n - 2).map(|_| rng.gen_range(0..n)).collect();
    let mut degree = vec![1usize; n];
    for &s in &seq {
        degree[s] += 1;
    }
    let mut edges = Vec::with_capacity(n - 1);
    for &s in &seq {
        let leaf = (0..n).find(|&v| degree[v] == 1).expect("Prüfer leaf");
        edges.push((leaf, s));
        degree[leaf] -= 1;
        degree[s] -= 1;
    }
    let rest: Vec<usize> = (0..n).filter(|&v| degree[v] == 1).collect();
    edges.push((rest[0], rest[1]));
    edges
}

/// Centre 0 with `min(n - 1, 3..=5)` legs; the remaining vertices extend
/// random legs into chains.
fn random_star(rng: &mut ChaCha8Rng, n: usize) -> Vec<(usize, usize)> {
    if n < 4 {
        return random_tree(rng, n);
    }
    let legs = rng.gen_range(3..=5).min(n - 1);
    let mut ends: Vec<usize> = (1..=legs).collect();
    let mut edges: Vec<(usize, usize)> = ends.iter().map(|&v| (0, v)).collect();
    for v in legs + 1..n {
        let k = rng.gen_range(0..legs);
        edges.push((ends[k], v));
        ends[k] = v;
    }
    edges
}

fn build(n: usize, euler: &[i64], edges: &[(usize, usize)]) -> plumbing_core::Result<PlumbingGraph> {
    PlumbingGraph::new(
        (0..n).map(|v| (vertex_id(v), euler[v])).collect(),
        edges.iter().map(|&(a, b)| (vertex_id(a), vertex_id(b))).collect(),
    )
}

/// Random graph drawn from `rng`.
///
/// # Panics
/// If `n == 0` or the Euler range is empty or nonnegative.
pub fn random_graph_with(rng: &mut ChaCha8Rng, p: &GraphParams) -> PlumbingGraph {
    assert!(p.n >= 1, "at least one vertex");
    assert!(p.euler_min <= p.euler_max && p.euler_max <= -1, "Euler range must be negative and nonempty");
    let n = p.n;
    loop {
        let edges = match p.mode {
            GenMode::Star => random_star(rng, n),
            _ => random_tree(rng, n),
        };
        let mut deg = vec![0i64; n];
        for &(a, b) in &edges {
            deg[a] += 1;
            deg[b] += 1;
        }
        let euler: Vec<i64> = match p.mode {
            GenMode::Dominant => (0..n)
                .map(|v| {
                    let hi = p.euler_max.min(-deg[v] - 1);
                    let lo = p.euler_min.min(hi);
                    rng.gen_range(lo..=hi)
                })
                .collect(),
            GenMode::Free => (0..n).map(|_| rng.gen_range(p.euler_min..=p.euler_max)).collect(),
            GenMode::Star => {
                let hi = p.euler_max.min(-2);
                let lo = p.euler_min.min(hi);
                (0..n).map(|v| if v == 0 { rng.gen_range(-2..=-1) } else { rng.gen_range(lo..=hi) }).collect()
            }
        };
        if let Ok(g) = build(n, &euler, &edges) {
            return g;
        }
    }
}

/// Random graph determined by `seed`.
pub fn random_graph(seed: u64, p: &GraphParams) -> PlumbingGraph {
    random_graph_with(&mut ChaCha8Rng::seed_from_u64(seed), p)
}

/// Parameters of random `(graph, Z, l')` instances.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceParams {
    pub min_n: usize,
    pub max_n: usize,
    pub euler_min: i64,
    pub euler_max: i64,
    pub mode: GenMode,
    /// `Z` lies between `Z_min` and `Z_min + z_extra * E`.
    pub z_extra: i64,
    /// `-l' = Σ a_v E*_v` with `0 <= a_v <= a_max`.
    pub a_max: i64,
    /// At most this many nonzero `a_v` (no limit when 0).
    #[serde(default)]
    pub a_support: usize,
    /// Instances whose box `[0, Z]` has more points are redrawn.
    pub max_volume: u64,
}

impl Default for InstanceParams {
    fn default() -> Self {
        InstanceParams {
            min_n: 1,
            max_n: 5,
            euler_min: -7,
            euler_max: -1,
            mode: GenMode::Star,
            z_extra: 2,
            a_max: 2,
            a_support: 0,
            max_volume: 2000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    pub graph: PlumbingGraph,
    pub z: Cycle,
    /// `E*`-coordinates of `-l'`.
    pub a: Vec<i64>,
    pub lprime: RatCycle,
}

pub fn box_volume(z: &Cycle) -> u64 {
    z.0.iter().fold(1u64, |acc, &c| acc.saturating_mul(c.max(0) as u64 + 1))
}

/// Random instance drawn from `rng`; deterministic per generator state.
pub fn random_instance_with(rng: &mut ChaCha8Rng, p: &InstanceParams) -> Instance {
    loop {
        let n = rng.gen_range(p.min_n.max(1)..=p.max_n.max(p.min_n.max(1)));
        let gp = GraphParams { n, euler_min: p.euler_min, euler_max: p.euler_max, mode: p.mode };
        let graph = random_graph_with(rng, &gp);
        let mut z = graph.minimal_cycle();
        for v in 0..n {
            z.0[v] += rng.gen_range(0..=p.z_extra.max(0));
        }
        if box_volume(&z) > p.max_volume {
            continue;
        }
        let mut a: Vec<i64> = (0..n).map(|_| rng.gen_range(0..=p.a_max.max(0))).collect();
        if p.a_support > 0 {
            let keep = rng.gen_range(0..=p.a_support.min(n));
            for &v in &random_order(rng, n)[keep..] {
                a[v] = 0;
            }
        }
        let neg: Vec<i64> = a.iter().map(|x| -x).collect();
        let lprime = graph.from_estar(&neg).expect("dual basis combination");
        return Instance { graph, z, a, lprime };
    }
}

/// Instance number `index` of the stream determined by `seed`; independent
/// of how many other instances are drawn.
pub fn random_instance(seed: u64, index: u64, p: &InstanceParams) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    random_instance_with(&mut rng, p)
}

/// Random subset mask with each vertex included with probability `p`.
pub fn random_mask(rng: &mut ChaCha8Rng, n: usize, p: f64) -> Vec<bool> {
    (0..n).map(|_| rng.gen_bool(p)).collect()
}

/// Shuffled vertex order, for order-independence checks.
pub fn random_order(rng: &mut ChaCha8Rng, n: usize) -> Vec<usize> {
    let mut v: Vec<usize> = (0..n).collect();
    v.shuffle(rng);
    v
}
