#![allow(dead_code)]

use num_bigint::BigInt;
use plumbing_core::{Cycle, PlumbingGraph, RatCycle, Q};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn graph(vertices: &[(&str, i64)], edges: &[(&str, &str)]) -> PlumbingGraph {
    PlumbingGraph::new(
        vertices.iter().map(|(id, e)| (id.to_string(), *e)).collect(),
        edges.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect(),
    )
    .unwrap()
}

/// Single -2 vertex.
pub fn g1() -> PlumbingGraph {
    graph(&[("v", -2)], &[])
}

/// Single -3 vertex.
pub fn g2() -> PlumbingGraph {
    graph(&[("v", -3)], &[])
}

pub fn a2() -> PlumbingGraph {
    graph(&[("v1", -2), ("v2", -2)], &[("v1", "v2")])
}

/// Minimally elliptic star: -1 centre with legs -2, -3, -7.
pub fn elliptic() -> PlumbingGraph {
    graph(&[("c", -1), ("a", -2), ("b", -3), ("d", -7)], &[("c", "a"), ("c", "b"), ("c", "d")])
}

/// Star with a -2 centre and legs -2, -3, -3, -5: not rational.
pub fn star4() -> PlumbingGraph {
    graph(
        &[("c", -2), ("a", -2), ("b", -3), ("d", -3), ("f", -5)],
        &[("c", "a"), ("c", "b"), ("c", "d"), ("c", "f")],
    )
}

pub fn q(a: i64, b: i64) -> Q {
    Q::new(BigInt::from(a), BigInt::from(b))
}

pub fn rat(v: &[(i64, i64)]) -> RatCycle {
    RatCycle(v.iter().map(|&(a, b)| q(a, b)).collect())
}

pub fn cyc(v: &[i64]) -> Cycle {
    Cycle(v.to_vec())
}

/// Uniform labelled tree by Prüfer code, Euler numbers in `[lo, -1]`,
/// resampled until negative definite.
pub fn random_graph(rng: &mut ChaCha8Rng, n: usize, lo: i64) -> PlumbingGraph {
    loop {
        let edges = random_tree(rng, n);
        let vertices: Vec<(String, i64)> = (0..n).map(|i| (format!("v{i}"), rng.gen_range(lo..=-1))).collect();
        let edges = edges.into_iter().map(|(a, b)| (format!("v{a}"), format!("v{b}"))).collect();
        if let Ok(g) = PlumbingGraph::new(vertices, edges) {
            return g;
        }
    }
}

pub fn random_tree(rng: &mut ChaCha8Rng, n: usize) -> Vec<(usize, usize)> {
    if n < 2 {
        return Vec::new();
    }
    if n == 2 {
        return vec![(0, 1)];
    }
    let code: Vec<usize> = (0..n - 2).map(|_| rng.gen_range(0..n)).collect();
    let mut degree = vec![1usize; n];
    for &c in &code {
        degree[c] += 1;
    }
    let mut edges = Vec::new();
    for &c in &code {
        let leaf = (0..n).find(|&v| degree[v] == 1).unwrap();
        edges.push((leaf, c));
        degree[leaf] -= 1;
        degree[c] -= 1;
    }
    let rest: Vec<usize> = (0..n).filter(|&v| degree[v] == 1).collect();
    edges.push((rest[0], rest[1]));
    edges
}

/// `-Σ a_v E*_v`.
pub fn from_a(g: &PlumbingGraph, a: &[i64]) -> RatCycle {
    let neg: Vec<i64> = a.iter().map(|x| -x).collect();
    g.from_estar(&neg).unwrap()
}

pub fn random_rat(rng: &mut ChaCha8Rng, n: usize) -> RatCycle {
    RatCycle((0..n).map(|_| q(rng.gen_range(-6..=6), rng.gen_range(1..=4))).collect())
}

pub fn random_a(rng: &mut ChaCha8Rng, n: usize, max: i64) -> Vec<i64> {
    (0..n).map(|_| rng.gen_range(0..=max)).collect()
}

/// Random `Z` with `Z_min <= Z <= Z_min + extra * E`.
pub fn random_z(rng: &mut ChaCha8Rng, g: &PlumbingGraph, extra: i64) -> Cycle {
    let zmin = g.minimal_cycle();
    Cycle(zmin.0.iter().map(|c| c + rng.gen_range(0..=extra)).collect())
}

pub fn volume(z: &Cycle) -> u64 {
    z.0.iter().map(|&c| (c + 1) as u64).product()
}
