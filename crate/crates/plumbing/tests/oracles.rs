use std::sync::Arc;

use plumbing::format::{parse_descriptor, parse_graph};
use plumbing::generate::{random_graph_with, random_instance, GenMode, GraphParams, InstanceParams};
use plumbing::memo::MemoOracle;
use plumbing::parallel::{par_maximize_box, par_minimize_box, pool};
use plumbing::table::{query_key, TableOracle};
use plumbing_core::box_opt::{maximize_box, minimize_box};
use plumbing_core::{
    AnalyticOracle, BoxProblem, BundleDescriptor, Cycle, Error as CoreError, GenericOracle, HypothesisMode, Limits,
    Objective, PlumbingGraph, RatCycle, RelativeContext, SubgraphEmbedding, Q,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn q(a: i64, b: i64) -> Q {
    Q::new(a.into(), b.into())
}

fn elliptic() -> PlumbingGraph {
    parse_graph("c: -1; a: -2; b: -3; d: -7\nedge c a; edge c b; edge c d").unwrap()
}

#[test]
fn table_lookups_and_precedence() {
    let g = elliptic();
    let z = g.minimal_cycle();
    let table = "# values of a special analytic structure\nh1 a:3 b:2 c:6 d:1 | trivial = 2\nh0nz a:3 b:2 c:6 d:1 | trivial = false\nh1 c:1 | natural(c:-1) = 0\n";
    let t = TableOracle::parse(table).unwrap();
    assert_eq!(t.len(), 3);
    // The table overrides the generic value 1.
    assert_eq!(GenericOracle::default().h1(&g, &z, &BundleDescriptor::trivial()).unwrap(), 1);
    assert_eq!(t.h1(&g, &z, &BundleDescriptor::trivial()).unwrap(), 2);
    assert_eq!(t.has_section_without_fixed_component(&g, &z, &BundleDescriptor::trivial()).unwrap(), Some(false));
    // Equivalent descriptors hit the same entry after normalization.
    let twisted = BundleDescriptor::trivial().twisted(&Cycle::unit(4, 2).to_rational());
    assert_eq!(t.h1(&g, &Cycle::unit(4, 2), &twisted).unwrap(), 0);
    assert_eq!(t.h1(&g, &Cycle::zero(4), &BundleDescriptor::trivial()).unwrap(), 0);
    assert!(t.misses().is_empty());
}

#[test]
fn table_misses_are_reported() {
    let g = elliptic();
    let t = TableOracle::parse("").unwrap();
    assert!(t.is_empty());
    let d = BundleDescriptor::generic_pic(RatCycle(vec![q(0, 1), q(0, 1), q(-1, 1), q(0, 1)]));
    let e = t.h1(&g, &Cycle::unit(4, 2), &d).unwrap_err();
    assert_eq!(e, CoreError::MissingEntry("h1 c:1 | genpic(c:-1)".into()));
    assert_eq!(t.has_section_without_fixed_component(&g, &Cycle::unit(4, 2), &d).unwrap(), None);
    assert_eq!(t.misses(), ["h0nz c:1 | genpic(c:-1)", "h1 c:1 | genpic(c:-1)"]);
    let f = TableOracle::parse("").unwrap().with_fallback(GenericOracle::default());
    assert_eq!(f.h1(&g, &g.minimal_cycle(), &BundleDescriptor::trivial()).unwrap(), 1);
    assert_eq!(f.misses().len(), 1);
}

#[test]
fn table_keys_match_query_keys() {
    let g = elliptic();
    let d = parse_descriptor(&g, "genim(d:-1) twist(c:1)").unwrap();
    let key = query_key(&g, &Cycle(vec![1, 0, 2, 0]), &d);
    assert_eq!(key, "a:1 c:2 | genim(d:-1) twist(c:1)");
    let t = TableOracle::parse(&format!("h1 {key} = 4")).unwrap();
    assert_eq!(t.h1(&g, &Cycle(vec![1, 0, 2, 0]), &d).unwrap(), 4);
}

#[test]
fn table_syntax_errors() {
    let line = |t: &str| match TableOracle::parse(t) {
        Err(plumbing::Error::Syntax { line, .. }) => line,
        other => panic!("expected a syntax error, got {other:?}"),
    };
    assert_eq!(line("h1 v:1 | trivial = x"), 1);
    assert_eq!(line("\nh1 v:1 trivial = 1"), 2);
    assert_eq!(line("h2 v:1 | trivial = 1"), 1);
    assert_eq!(line("h1 v:1/2 | trivial = 1"), 1);
    assert_eq!(line("h1 v:1 | trivial = -1"), 1);
    assert_eq!(line("h0nz v:1 | trivial = yes"), 1);
    assert_eq!(line("h1 v:1 | trivial = 1\nh1 v:1 | natural(0) = 2"), 2);
    assert_eq!(line("h1 v:1 | bogus = 1"), 1);
}

#[test]
fn table_oracle_drives_relative_computations() {
    // Base {c} with a tabulated non-generic value on E_c.
    let g = elliptic();
    let emb = SubgraphEmbedding::new(&g, &[false, false, true, false]).unwrap();
    let t = TableOracle::parse("").unwrap().with_fallback(GenericOracle::default());
    let ctx = RelativeContext::new(&g, emb, &t, HypothesisMode::Warn, Limits::default()).unwrap();
    let z = g.minimal_cycle();
    let generic = GenericOracle::default();
    let emb = SubgraphEmbedding::new(&g, &[false, false, true, false]).unwrap();
    let gctx = RelativeContext::new(&g, emb, &generic, HypothesisMode::Warn, Limits::default()).unwrap();
    assert_eq!(ctx.h1_o_relgen(&z).unwrap(), gctx.h1_o_relgen(&z).unwrap());
    assert!(!t.misses().is_empty());
}

fn random_queries(seed: u64) -> Vec<(PlumbingGraph, Cycle, BundleDescriptor)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let p = InstanceParams { max_n: 4, max_volume: 300, ..InstanceParams::default() };
    let pool: Vec<_> = (0..6).map(|i| random_instance(seed, i, &p)).collect();
    (0..120)
        .map(|_| {
            let inst = &pool[rng.gen_range(0..pool.len())];
            let n = inst.graph.n();
            let z = Cycle((0..n).map(|v| rng.gen_range(0..=inst.z[v])).collect());
            let d = match rng.gen_range(0..4) {
                0 => BundleDescriptor::trivial(),
                1 => BundleDescriptor::generic_pic(inst.lprime.clone()),
                2 => BundleDescriptor::generic_abel_image(inst.lprime.clone()),
                _ => BundleDescriptor::trivial().twisted(&Cycle::unit(n, rng.gen_range(0..n)).to_rational()),
            };
            (inst.graph.clone(), z, d)
        })
        .collect()
}

#[test]
fn memoized_answers_equal_direct_answers() {
    for seed in 0..4 {
        let direct = GenericOracle::default();
        let memo = MemoOracle::new(GenericOracle::default());
        for (g, z, d) in random_queries(seed) {
            assert_eq!(memo.h1(&g, &z, &d), direct.h1(&g, &z, &d));
            assert_eq!(
                memo.has_section_without_fixed_component(&g, &z, &d),
                direct.has_section_without_fixed_component(&g, &z, &d)
            );
        }
        assert!(memo.cached() > 0);
    }
}

#[test]
fn memo_is_safe_under_concurrent_identical_queries() {
    let memo = Arc::new(MemoOracle::new(GenericOracle::default()));
    let queries = Arc::new(random_queries(9));
    let direct: Vec<_> = queries.iter().map(|(g, z, d)| GenericOracle::default().h1(g, z, d)).collect();
    let handles: Vec<_> = (0..4)
        .map(|_| {
            let memo = Arc::clone(&memo);
            let queries = Arc::clone(&queries);
            std::thread::spawn(move || queries.iter().map(|(g, z, d)| memo.h1(g, z, d)).collect::<Vec<_>>())
        })
        .collect();
    for h in handles {
        assert_eq!(h.join().unwrap(), direct);
    }
}

#[test]
fn parallel_box_optimization_matches_serial() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let workers = pool(Some(3));
    for _ in 0..200 {
        let n = rng.gen_range(1..=5);
        let g = random_graph_with(&mut rng, &GraphParams { n, euler_min: -6, euler_max: -1, mode: GenMode::Free });
        let lower = Cycle((0..n).map(|_| rng.gen_range(-2..=1)).collect());
        let upper = Cycle(lower.0.iter().map(|&a| a + rng.gen_range(0..=3)).collect());
        let obj = Objective {
            constant: q(rng.gen_range(-3..=3), 2),
            chi_coeff: rng.gen_range(-1..=1),
            linear: (0..n).map(|_| rng.gen_range(-2..=2)).collect(),
        };
        let p = BoxProblem::new(&g, lower, upper, obj);
        let limits = Limits { optimizer_cap: rng.gen_range(1..=40), ..Limits::default() };
        let (a, b) = workers.install(|| (par_minimize_box(&p, &limits), par_maximize_box(&p, &limits)));
        assert_eq!(a, minimize_box(&p, &limits));
        assert_eq!(b, maximize_box(&p, &limits));
    }
    let g = parse_graph("v: -2").unwrap();
    let p = BoxProblem::new(&g, Cycle(vec![0]), Cycle(vec![100]), Objective::chi(1));
    let tight = Limits { volume_cap: 50, ..Limits::default() };
    assert_eq!(par_minimize_box(&p, &tight).unwrap_err(), CoreError::BoxTooLarge { volume: 101, cap: 50 });
}
