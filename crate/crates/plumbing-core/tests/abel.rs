mod common;

use common::*;
use plumbing_core::abel::{
    b_invariant, component_invariants, dim_abel_generic, dim_abel_section5, dim_abel_via_h1, dim_rel_abel, e_support,
    h1_twisted_genim, BaseFamily,
};
use plumbing_core::blowup::blow_up;
use plumbing_core::box_opt::h1_o_generic;
use plumbing_core::{
    BundleDescriptor, Cycle, Error, GenericOracle, GenericStructure, HypothesisMode, Limits, PlumbingGraph, RatCycle,
    RelativeContext, SubgraphEmbedding,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn lim() -> Limits {
    Limits::default()
}

fn gen() -> GenericStructure {
    GenericStructure::default()
}

fn ctx<'a>(g: &'a PlumbingGraph, mask: &[bool], o: &'a GenericOracle) -> RelativeContext<'a> {
    let emb = SubgraphEmbedding::new(g, mask).unwrap();
    RelativeContext::new(g, emb, o, HypothesisMode::Warn, Limits::default()).unwrap()
}

#[test]
fn abel_dimension_examples() {
    let g = g1();
    let l = -g.dual_basis(0);
    assert_eq!(dim_abel_via_h1(&g, &cyc(&[2]), &l, &gen(), &lim()).unwrap().dimension, 0);
    assert_eq!(dim_abel_generic(&g, &cyc(&[2]), &l, &lim()).unwrap().dimension, 0);
    assert_eq!(dim_abel_via_h1(&g, &cyc(&[2]), &RatCycle::zero(1), &gen(), &lim()).unwrap().dimension, 0);
    let g = a2();
    let l = -g.dual_basis(0);
    let r = dim_abel_via_h1(&g, &cyc(&[1, 1]), &l, &gen(), &lim()).unwrap();
    assert_eq!(r.dimension, 0);
    assert_eq!(dim_abel_generic(&g, &cyc(&[1, 1]), &l, &lim()).unwrap().dimension, 0);
}

#[test]
fn elliptic_abel_dimensions() {
    // On the minimal cycle of a minimally elliptic graph h¹(O_Z) = 1; a class
    // of positive degree somewhere fills the Jacobian, zero degree gives a point.
    let g = elliptic();
    let z = g.minimal_cycle();
    let zero = RatCycle::zero(4);
    assert_eq!(dim_abel_generic(&g, &z, &zero, &lim()).unwrap().dimension, 0);
    let l = -g.dual_basis(3);
    assert_eq!(dim_abel_generic(&g, &z, &l, &lim()).unwrap().dimension, 1);
    assert_eq!(dim_abel_via_h1(&g, &z, &l, &gen(), &lim()).unwrap().dimension, 1);
}

#[test]
fn input_errors() {
    let g = a2();
    let l = -g.dual_basis(0);
    assert_eq!(dim_abel_generic(&g, &cyc(&[1, 0]), &l, &lim()).unwrap_err(), Error::CycleBelowE("v2".into()));
    let bad = g.dual_basis(0).clone();
    assert!(matches!(dim_abel_generic(&g, &cyc(&[1, 1]), &bad, &lim()), Err(Error::NotNegLipman(_))));
}

#[test]
fn twisted_abel_image_examples() {
    let g = g1();
    let l = -g.dual_basis(0);
    let mut h = |w: &Cycle| h1_o_generic(&g, w, &lim());
    assert_eq!(h1_twisted_genim(&g, &cyc(&[2]), &l, &mut h, &lim()).unwrap().value, q(0, 1));
    let g = elliptic();
    let z = g.minimal_cycle();
    let mut h = |w: &Cycle| h1_o_generic(&g, w, &lim());
    assert_eq!(h1_twisted_genim(&g, &z, &RatCycle::zero(4), &mut h, &lim()).unwrap().value, q(1, 1));
    let mut h = |w: &Cycle| h1_o_generic(&g, w, &lim());
    assert_eq!(h1_twisted_genim(&g, &Cycle::zero(4), &RatCycle::zero(4), &mut h, &lim()).unwrap().value, q(0, 1));
}

#[test]
fn support_dimension_examples() {
    let g = g1();
    assert_eq!(e_support(&g, &cyc(&[1]), &[false], &gen()).unwrap(), 0);
    assert_eq!(e_support(&g, &cyc(&[1]), &[true], &gen()).unwrap(), 0);
    let g = a2();
    assert_eq!(e_support(&g, &cyc(&[1, 1]), &[true, false], &gen()).unwrap(), 0);
    let g = elliptic();
    let z = g.minimal_cycle();
    assert_eq!(e_support(&g, &z, &[true; 4], &gen()).unwrap(), 1);
    assert_eq!(e_support(&g, &z, &[false, false, true, false], &gen()).unwrap(), 1);
}

#[test]
fn component_and_b_examples() {
    let o = GenericOracle::default();
    let g = g1();
    let c = ctx(&g, &[false], &o);
    let l = -g.dual_basis(0);
    let fam = BaseFamily::Fixed(BundleDescriptor::trivial());
    let ci = component_invariants(&c, &cyc(&[1]), &l, &fam).unwrap();
    assert_eq!((ci.g, ci.d, ci.t), (0, 0, 0));
    assert_eq!(b_invariant(&c, &cyc(&[1]), &l, &fam).unwrap().value, 0);
    assert_eq!(b_invariant(&c, &cyc(&[0]), &l, &fam).unwrap().value, 0);
    let g = a2();
    let c = ctx(&g, &[false, false], &o);
    let l = from_a(&g, &[1, 1]);
    let ci = component_invariants(&c, &cyc(&[1, 1]), &l, &fam).unwrap();
    assert_eq!((ci.g, ci.d), (0, 0));
    let b = b_invariant(&c, &cyc(&[1, 1]), &l, &fam).unwrap();
    assert_eq!(b.value, 0);
    assert_eq!(b.maximizers.count, 4);
    assert_eq!(b.optimal, cyc(&[0, 0]));
    let chain = graph(&[("v1", -2), ("v2", -2), ("v3", -2)], &[("v1", "v2"), ("v2", "v3")]);
    let c = ctx(&chain, &[false; 3], &o);
    assert_eq!(
        component_invariants(&c, &cyc(&[1, 0, 1]), &RatCycle::zero(3), &fam).unwrap_err(),
        Error::DisconnectedInput
    );
}

#[test]
fn relative_dimension_examples() {
    let o = GenericOracle::default();
    let g = g1();
    let c = ctx(&g, &[false], &o);
    let l = -g.dual_basis(0);
    let r = dim_rel_abel(&c, &cyc(&[1]), &l, &BundleDescriptor::trivial(), None).unwrap();
    assert_eq!(r.dimension, 0);
    assert!(r.warnings.is_empty());
    // Whole graph as base: the fiber is a point.
    let g = elliptic();
    let c = ctx(&g, &[true; 4], &o);
    let l = -g.dual_basis(3);
    let base = BundleDescriptor::generic_pic(c.restrict_chern(&l).unwrap());
    let r = dim_rel_abel(&c, &g.minimal_cycle(), &l, &base, None).unwrap();
    assert_eq!(r.dimension, 0);
}

#[test]
fn empty_eca_is_reported() {
    let o = GenericOracle::default();
    let g = elliptic();
    let c = ctx(&g, &[true; 4], &o);
    let l = RatCycle::zero(4);
    let base = BundleDescriptor::generic_pic(RatCycle::zero(4));
    let z = g.minimal_cycle();
    assert_eq!(dim_rel_abel(&c, &z, &l, &base, None).unwrap_err(), Error::EmptyEca);
}

#[test]
fn section5_examples() {
    let o = GenericOracle::default();
    let g = g1();
    let c = ctx(&g, &[false], &o);
    assert_eq!(dim_abel_section5(&c, &cyc(&[2]), &-g.dual_basis(0)).unwrap().dimension, 0);
    assert_eq!(dim_abel_section5(&c, &cyc(&[2]), &RatCycle::zero(1)).unwrap().dimension, 0);
    let g = a2();
    let c = ctx(&g, &[false, false], &o);
    assert_eq!(dim_abel_section5(&c, &cyc(&[1, 1]), &-g.dual_basis(0)).unwrap().dimension, 0);
}

fn random_instance(rng: &mut ChaCha8Rng, max_n: usize, max_volume: u64) -> (PlumbingGraph, Cycle, RatCycle) {
    loop {
        let n = rng.gen_range(1..=max_n);
        let g = random_graph(rng, n, -4);
        let z = random_z(rng, &g, 2);
        if volume(&z) > max_volume {
            continue;
        }
        let l = from_a(&g, &random_a(rng, n, 2));
        return (g, z, l);
    }
}

#[test]
fn h1_formula_matches_closed_formula() {
    let mut rng = ChaCha8Rng::seed_from_u64(51);
    for _ in 0..60 {
        let (g, z, l) = random_instance(&mut rng, 5, 1500);
        let a = dim_abel_via_h1(&g, &z, &l, &gen(), &lim()).unwrap();
        let b = dim_abel_generic(&g, &z, &l, &lim()).unwrap();
        assert_eq!(a.dimension, b.dimension);
        assert!(a.dimension >= 0 && a.dimension <= a.h1_structure);
    }
}

#[test]
fn empty_base_section5_matches_closed_formula() {
    let mut rng = ChaCha8Rng::seed_from_u64(52);
    let o = GenericOracle::default();
    for _ in 0..30 {
        let (g, z, l) = random_instance(&mut rng, 4, 300);
        let c = ctx(&g, &vec![false; g.n()], &o);
        let a = dim_abel_section5(&c, &z, &l).unwrap();
        let b = dim_abel_generic(&g, &z, &l, &lim()).unwrap();
        assert_eq!(a.dimension, b.dimension);
    }
}

#[test]
fn b_is_monotone_in_z() {
    let mut rng = ChaCha8Rng::seed_from_u64(53);
    let o = GenericOracle::default();
    for _ in 0..30 {
        let (g, z, l) = random_instance(&mut rng, 4, 200);
        let mask: Vec<bool> = (0..g.n()).map(|_| rng.gen_bool(0.3)).collect();
        let c = ctx(&g, &mask, &o);
        let fam = BaseFamily::GenericAbelImage;
        let v = rng.gen_range(0..g.n());
        let mut smaller = z.clone();
        smaller.0[v] -= 1;
        let big = b_invariant(&c, &z, &l, &fam).unwrap().value;
        let small = b_invariant(&c, &smaller, &l, &fam).unwrap().value;
        assert!(small <= big);
    }
}

#[test]
fn b_is_invariant_under_blow_up_off_base() {
    let mut rng = ChaCha8Rng::seed_from_u64(54);
    let o = GenericOracle::default();
    let mut done = 0;
    while done < 20 {
        let (g, z, l) = random_instance(&mut rng, 4, 150);
        let mask: Vec<bool> = (0..g.n()).map(|_| rng.gen_bool(0.3)).collect();
        let Some(centre) = (0..g.n()).find(|&v| !mask[v]) else { continue };
        let m = blow_up(&g, g.id(centre), None).unwrap();
        let pz = m.pullback_int(&z).unwrap();
        if volume(&pz) > 600 {
            continue;
        }
        let pl = m.pullback(&l).unwrap();
        let pmask = m.lift_mask(&mask);
        let c = ctx(&g, &mask, &o);
        let pc = ctx(&m.target, &pmask, &o);
        let base = BundleDescriptor::generic_pic(c.restrict_chern(&l).unwrap());
        let pbase = BundleDescriptor::generic_pic(pc.restrict_chern(&pl).unwrap());
        let before = b_invariant(&c, &z, &l, &BaseFamily::Fixed(base)).unwrap().value;
        let after = b_invariant(&pc, &pz, &pl, &BaseFamily::Fixed(pbase)).unwrap().value;
        assert_eq!(before, after);
        done += 1;
    }
}
