//! Acceptance suite: one line per criterion with its verdict and timing.
//! Exits nonzero if any criterion fails.

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use plumbing::cli::{run, CommandName, RunConfig, Sinks};
use plumbing::fuzz::FuzzConfig;
use plumbing::generate::{random_graph_with, random_instance, random_mask, GenMode, GraphParams, Instance, InstanceParams};
use plumbing::parallel::pool;
use plumbing_core::abel::{b_invariant, dim_abel_generic, dim_abel_section5, dim_abel_via_h1, BaseFamily};
use plumbing_core::blowup::blow_up;
use plumbing_core::box_opt::{h1_o_generic, h1_pic_generic, minimize_box};
use plumbing_core::tower::{build_tower, d_recursion};
use plumbing_core::{
    BoxProblem, BundleDescriptor, Cycle, GenericOracle, GenericStructure, HypothesisMode, Limits, Objective,
    PlumbingGraph, RatCycle, RelativeContext, Strategy, SubgraphEmbedding, Q,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

macro_rules! check {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn q(a: i64, b: i64) -> Q {
    Q::new(a.into(), b.into())
}

fn lim() -> Limits {
    Limits::default()
}

fn graph_stream(seed: u64, max_n: usize) -> impl FnMut() -> PlumbingGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    move || {
        let n = rng.gen_range(1..=max_n);
        let mode = [GenMode::Dominant, GenMode::Free, GenMode::Star][rng.gen_range(0..3)];
        random_graph_with(&mut rng, &GraphParams { n, euler_min: -7, euler_max: -1, mode })
    }
}

/// Instance `i` of a stream alternating star-shaped and free graphs.
/// Every third instance has a class supported on at most one vertex.
fn mixed(seed: u64, i: u64, p: &InstanceParams) -> Instance {
    let mode = if i.is_multiple_of(2) { GenMode::Star } else { GenMode::Free };
    let a_support = if i.is_multiple_of(3) { 1 } else { p.a_support };
    random_instance(seed, i, &InstanceParams { mode, a_support, ..p.clone() })
}

fn instances(seed: u64, count: u64, p: &InstanceParams) -> impl Iterator<Item = Instance> + '_ {
    (0..count).map(move |i| mixed(seed, i, p))
}

/// Intersection matrix applied to a rational vector.
fn apply(m: &[Vec<i64>], x: &RatCycle) -> Vec<Q> {
    m.iter().map(|row| row.iter().zip(&x.0).map(|(&a, b)| b * Q::from_integer(a.into())).sum()).collect()
}

fn pair(m: &[Vec<i64>], x: &RatCycle, y: &RatCycle) -> Q {
    apply(m, x).iter().zip(&y.0).map(|(a, b)| a * b).sum()
}

/// `χ(x) = -(x, x - Z_K) / 2`.
fn chi(m: &[Vec<i64>], zk: &RatCycle, x: &RatCycle) -> Q {
    -pair(m, x, &(x - zk)) / q(2, 1)
}

/// Leading principal minors by fraction-free elimination.
fn leading_minors(m: &[Vec<i64>]) -> Vec<i128> {
    let n = m.len();
    let mut a: Vec<Vec<i128>> = m.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect();
    let mut out = Vec::with_capacity(n);
    let mut prev = 1i128;
    for k in 0..n {
        out.push(a[k][k]);
        if a[k][k] == 0 {
            break;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i][j] = (a[k][k] * a[i][j] - a[i][k] * a[k][j]) / prev;
            }
        }
        prev = a[k][k];
    }
    out
}

fn component_count(g: &PlumbingGraph, mask: &[bool]) -> usize {
    let mut parent: Vec<usize> = (0..g.n()).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        p[x] = r;
        r
    }
    for &(a, b) in g.edges() {
        if mask[a] && mask[b] {
            let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
            parent[ra] = rb;
        }
    }
    (0..g.n()).filter(|&v| mask[v] && find(&mut parent, v) == v).count()
}

fn random_rat(rng: &mut ChaCha8Rng, n: usize) -> RatCycle {
    RatCycle((0..n).map(|_| q(rng.gen_range(-9..=9), rng.gen_range(1..=6))).collect())
}

fn criterion_1() -> Outcome {
    let mut next = graph_stream(101, 9);
    let mut rng = ChaCha8Rng::seed_from_u64(102);
    for i in 0..500 {
        let g = next();
        let n = g.n();
        let m = g.intersection_matrix();
        for u in 0..n {
            let col = apply(&m, g.dual_basis(u));
            for (w, x) in col.iter().enumerate() {
                check!(*x == q(if u == w { -1 } else { 0 }, 1), "graph {i}: dual basis identity fails at ({u},{w})");
            }
        }
        let zk = g.zk();
        let kz = apply(&m, zk);
        for v in 0..n {
            check!(-&kz[v] + q(m[v][v] + 2, 1) == q(0, 1), "graph {i}: adjunction residual at {v}");
        }
        let minors = leading_minors(&m);
        check!(minors.len() == n, "graph {i}: singular leading minor");
        for (k, d) in minors.iter().enumerate() {
            let sign = if k % 2 == 0 { -1 } else { 1 };
            check!(d.signum() == sign, "graph {i}: leading minor {} has sign {}", k + 1, d.signum());
        }
        for _ in 0..4 {
            let x = random_rat(&mut rng, n);
            let y = random_rat(&mut rng, n);
            let lhs = chi(&m, zk, &(&x + &y));
            let rhs = chi(&m, zk, &x) + chi(&m, zk, &y) - pair(&m, &x, &y);
            check!(lhs == rhs, "graph {i}: χ additivity");
            check!(g.chi(&x) == chi(&m, zk, &x), "graph {i}: χ disagrees with the matrix formula");
        }
        for _ in 0..4 {
            let mask = random_mask(&mut rng, n, 0.5);
            if !mask.iter().any(|&b| b) {
                continue;
            }
            let e = Cycle::reduced(n, (0..n).filter(|&v| mask[v]));
            let c = component_count(&g, &mask) as i64;
            check!(g.chi_int(&e) == c, "graph {i}: χ(E_I) = {} but I has {c} components", g.chi_int(&e));
        }
    }
    Ok("500 graphs".into())
}

fn criterion_2() -> Outcome {
    let mut next = graph_stream(201, 6);
    let mut rng = ChaCha8Rng::seed_from_u64(202);
    let exhaustive = lim().with_strategy(Strategy::Exhaustive);
    let mut cases = 0;
    while cases < 1000 {
        let g = next();
        let n = g.n();
        let lower = Cycle((0..n).map(|_| rng.gen_range(-2..=1)).collect());
        let upper = Cycle(lower.0.iter().map(|&a| a + rng.gen_range(0..=3)).collect());
        let p = BoxProblem::new(&g, lower.clone(), upper.clone(), Objective::zero(n));
        if p.volume() > 4096 {
            continue;
        }
        let obj = Objective {
            constant: q(rng.gen_range(-5..=5), rng.gen_range(1..=3)),
            chi_coeff: rng.gen_range(-1..=1),
            linear: (0..n).map(|_| rng.gen_range(-3..=3)).collect(),
        };
        let p = BoxProblem::new(&g, lower, upper, obj);
        let cap = rng.gen_range(1..=64);
        let pruned = minimize_box(&p, &Limits { optimizer_cap: cap, ..lim() }).map_err(|e| e.to_string())?;
        let full = minimize_box(&p, &Limits { optimizer_cap: cap, ..exhaustive.clone() }).map_err(|e| e.to_string())?;
        check!(pruned == full, "box {cases}: pruned {pruned:?} vs exhaustive {full:?}");
        cases += 1;
    }
    Ok("1000 boxes".into())
}

fn abel_params() -> InstanceParams {
    InstanceParams { min_n: 1, max_n: 6, euler_min: -7, euler_max: -1, z_extra: 2, a_max: 2, max_volume: 3000, ..Default::default() }
}

fn criterion_3() -> Outcome {
    let (mut nonzero, mut partial) = (0, 0);
    for (i, inst) in instances(301, 300, &abel_params()).enumerate() {
        let s = GenericStructure::default();
        let a = dim_abel_via_h1(&inst.graph, &inst.z, &inst.lprime, &s, &lim()).map_err(|e| e.to_string())?;
        let b = dim_abel_generic(&inst.graph, &inst.z, &inst.lprime, &lim()).map_err(|e| e.to_string())?;
        check!(a.dimension == b.dimension, "instance {i}: {} vs {}", a.dimension, b.dimension);
        nonzero += usize::from(a.dimension > 0);
        partial += usize::from(a.dimension > 0 && a.dimension < a.h1_structure);
    }
    Ok(format!("300 instances, {nonzero} of positive dimension, {partial} strictly below h1(O_Z)"))
}

fn criterion_4() -> Outcome {
    let o = GenericOracle::default();
    let mut nonzero = 0;
    for (i, inst) in instances(401, 200, &abel_params()).enumerate() {
        let g = &inst.graph;
        let emb = SubgraphEmbedding::new(g, &vec![false; g.n()]).map_err(|e| e.to_string())?;
        let ctx = RelativeContext::new(g, emb, &o, HypothesisMode::Warn, lim()).map_err(|e| e.to_string())?;
        let a = dim_abel_section5(&ctx, &inst.z, &inst.lprime).map_err(|e| e.to_string())?;
        let b = dim_abel_generic(g, &inst.z, &inst.lprime, &lim()).map_err(|e| e.to_string())?;
        check!(a.dimension == b.dimension, "instance {i}: {} vs {}", a.dimension, b.dimension);
        nonzero += usize::from(a.dimension > 0);
    }
    Ok(format!("200 instances, {nonzero} of positive dimension"))
}

fn criterion_5() -> Outcome {
    let (mut checked, mut nontrivial, mut skipped) = (0, 0, 0);
    let s = GenericStructure::default();
    for (i, inst) in instances(501, 400, &abel_params()).enumerate() {
        let spec = match build_tower(&inst.graph, &inst.z, &inst.lprime, 10_000) {
            Ok(spec) => spec,
            Err(plumbing_core::Error::TowerTooLarge { .. }) => {
                skipped += 1;
                continue;
            }
            Err(e) => return Err(format!("instance {i}: {e}")),
        };
        let r = d_recursion(&spec, &s).map_err(|e| e.to_string())?;
        let k = spec.chains.len();
        for (j, node) in r.nodes.iter().enumerate() {
            check!(node.d <= node.e, "instance {i}: d > e at node {j}");
            for c in 0..k {
                if node.s[c] < spec.chains[c].len {
                    let mut t = node.s.clone();
                    t[c] += 1;
                    let child = r.nodes.iter().find(|x| x.s == t).ok_or("missing child node")?;
                    check!((0..=1).contains(&(node.d - child.d)), "instance {i}: d drops by {}", node.d - child.d);
                    check!(child.e <= node.e, "instance {i}: e not monotone");
                }
            }
        }
        if spec.size > 1 {
            let top = r.nodes.last().ok_or("empty tower")?;
            check!(top.e == 0 && top.d == 0, "instance {i}: top node has e={} d={}", top.e, top.d);
            nontrivial += 1;
        }
        let b = dim_abel_generic(&inst.graph, &inst.z, &inst.lprime, &lim()).map_err(|e| e.to_string())?;
        check!(r.d0 == b.dimension, "instance {i}: d0 {} vs {}", r.d0, b.dimension);
        check!(r.violations.is_empty(), "instance {i}: {:?}", r.violations);
        checked += 1;
    }
    Ok(format!("{checked} towers ({nontrivial} with more than one node), {skipped} above the size cap"))
}

struct RelInstance {
    inst: Instance,
    mask: Vec<bool>,
}

fn rel_instances(seed: u64, count: usize, p: &InstanceParams) -> Vec<RelInstance> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|i| {
            let inst = mixed(seed, i as u64, p);
            let mask = random_mask(&mut rng, inst.graph.n(), 0.4);
            RelInstance { inst, mask }
        })
        .collect()
}

fn ctx<'a>(g: &'a PlumbingGraph, mask: &[bool], o: &'a GenericOracle) -> Result<RelativeContext<'a>, String> {
    let emb = SubgraphEmbedding::new(g, mask).map_err(|e| e.to_string())?;
    RelativeContext::new(g, emb, o, HypothesisMode::Warn, lim()).map_err(|e| e.to_string())
}

fn rel_params() -> InstanceParams {
    InstanceParams { max_n: 5, z_extra: 1, max_volume: 600, ..abel_params() }
}

fn criterion_6() -> Outcome {
    let o = GenericOracle::default();
    let mut dominant = 0;
    for (i, r) in rel_instances(601, 200, &rel_params()).iter().enumerate() {
        let g = &r.inst.graph;
        let c = ctx(g, &r.mask, &o)?;
        let z1 = c.embedding().restrict(&r.inst.z);
        let r1 = c.restrict_chern(&r.inst.lprime).map_err(|e| e.to_string())?;
        let base = BundleDescriptor::generic_pic(r1.clone());
        let d = c.rel_dominant(&r.inst.z, &z1, &r.inst.lprime, &base).map_err(|e| e.to_string())?;
        if !d.dominant {
            continue;
        }
        dominant += 1;
        let h = c.h1_rel_generic(&r.inst.z, &z1, &r.inst.lprime, &base).map_err(|e| e.to_string())?;
        // Base value computed component by component from the closed formula.
        let mut expect = 0i64;
        for comp in c.embedding().components() {
            let zc = comp.restrict(&z1);
            let lc = comp.restrict_rat(&r1);
            let v = h1_pic_generic(&comp.graph, &zc, &lc, &lim()).map_err(|e| e.to_string())?;
            expect += v.int_value().map_err(|e| e.to_string())?;
        }
        check!(h.value == expect, "instance {i}: relative h1 {} vs base {}", h.value, expect);
    }
    check!(dominant > 0, "no dominant instance drawn");
    Ok(format!("200 instances, {dominant} dominant"))
}

fn criterion_7() -> Outcome {
    let o = GenericOracle::default();
    let mut rng = ChaCha8Rng::seed_from_u64(702);
    let mut done = 0;
    let mut index = 0u64;
    let p = InstanceParams { max_n: 4, max_volume: 200, ..rel_params() };
    while done < 100 {
        let inst = mixed(701, index, &p);
        index += 1;
        let g = &inst.graph;
        let mask = random_mask(&mut rng, g.n(), 0.35);
        let Some(centre) = (0..g.n()).find(|&v| !mask[v]) else { continue };
        let blowups = rng.gen_range(1..=2);
        let mut tg = g.clone();
        let mut tz = inst.z.clone();
        let mut tl = inst.lprime.clone();
        let mut tmask = mask.clone();
        let mut at = g.id(centre).to_string();
        for step in 0..blowups {
            if step > 0 {
                let off: Vec<usize> = (0..tg.n()).filter(|&v| !tmask[v]).collect();
                at = tg.id(off[rng.gen_range(0..off.len())]).to_string();
            }
            let m = blow_up(&tg, &at, None).map_err(|e| e.to_string())?;
            tz = m.pullback_int(&tz).map_err(|e| e.to_string())?;
            tl = m.pullback(&tl).map_err(|e| e.to_string())?;
            tmask = m.lift_mask(&tmask);
            tg = m.target;
        }
        if plumbing::generate::box_volume(&tz) > 1500 {
            continue;
        }
        let c = ctx(g, &mask, &o)?;
        let tc = ctx(&tg, &tmask, &o)?;
        let (fam, tfam) = if done % 2 == 0 {
            let b = BundleDescriptor::generic_pic(c.restrict_chern(&inst.lprime).map_err(|e| e.to_string())?);
            let tb = BundleDescriptor::generic_pic(tc.restrict_chern(&tl).map_err(|e| e.to_string())?);
            (BaseFamily::Fixed(b), BaseFamily::Fixed(tb))
        } else {
            (BaseFamily::GenericAbelImage, BaseFamily::GenericAbelImage)
        };
        let before = b_invariant(&c, &inst.z, &inst.lprime, &fam).map_err(|e| e.to_string())?.value;
        let after = b_invariant(&tc, &tz, &tl, &tfam).map_err(|e| e.to_string())?.value;
        check!(before == after, "instance {index}: b = {before} before and {after} after {blowups} blow-ups");
        done += 1;
    }
    Ok("100 instances".into())
}

fn criterion_8() -> Outcome {
    let o = GenericOracle::default();
    let mut runs = 0;
    let mut multi = 0;
    let mut index = 0usize;
    let all = rel_instances(801, 400, &rel_params());
    while runs < 100 {
        let r = all.get(index).ok_or("ran out of instances under the optimizer cap")?;
        index += 1;
        let g = &r.inst.graph;
        let c = ctx(g, &r.mask, &o)?;
        let z1 = c.embedding().restrict(&r.inst.z);
        let base = BundleDescriptor::generic_pic(c.restrict_chern(&r.inst.lprime).map_err(|e| e.to_string())?);
        let h = c.h1_rel_generic(&r.inst.z, &z1, &r.inst.lprime, &base).map_err(|e| e.to_string())?;
        let m = &h.minimizers;
        if m.is_truncated() {
            continue;
        }
        runs += 1;
        multi += usize::from(m.count > 1);
        let top = m.optimizers.iter().skip(1).fold(m.optimizers[0].clone(), |a, b| a.join(b));
        check!(m.optimizers.contains(&top), "instance {index}: join of minimizers is not a minimizer");
        let off: Vec<bool> = r.mask.iter().map(|b| !b).collect();
        let parts: Vec<Cycle> = m.optimizers.iter().map(|l| l.masked(&off)).collect();
        let bottom = parts.iter().skip(1).fold(parts[0].clone(), |a, b| a.meet(b));
        check!(parts.contains(&bottom), "instance {index}: meet of projections is not a projection");
    }
    Ok(format!("100 runs, {multi} with several minimizers"))
}

fn criterion_9() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(902);
    let p = InstanceParams { max_n: 5, max_volume: 1500, ..abel_params() };
    for (i, inst) in instances(901, 200, &p).enumerate() {
        let g = &inst.graph;
        let v = rng.gen_range(0..g.n());
        let m = blow_up(g, g.id(v), None).map_err(|e| e.to_string())?;
        let x = random_rat(&mut rng, g.n());
        let px = m.pullback(&x).map_err(|e| e.to_string())?;
        check!(m.target.chi(&px) == g.chi(&x), "instance {i}: χ changed under pullback");
        let pl = m.pullback(&inst.lprime).map_err(|e| e.to_string())?;
        let a = g.in_neg_lipman(&inst.lprime).map_err(|e| e.to_string())?;
        let b = m.target.in_neg_lipman(&pl).map_err(|e| e.to_string())?;
        check!(a && b, "instance {i}: -S' membership {a} before, {b} after");
        let pz = m.pullback_int(&inst.z).map_err(|e| e.to_string())?;
        let h = h1_o_generic(g, &inst.z, &lim()).map_err(|e| e.to_string())?;
        let ph = h1_o_generic(&m.target, &pz, &lim()).map_err(|e| e.to_string())?;
        check!(h == ph, "instance {i}: h1(O_Z) {h} before, {ph} after pullback");
    }
    Ok("200 instances".into())
}

fn criterion_10() -> Outcome {
    let mut cfg = RunConfig::new(CommandName::Fuzz);
    cfg.fuzz = Some(FuzzConfig { seed: 1001, count: 40, ..FuzzConfig::default() });
    let doc = |jobs| -> Result<String, String> {
        let out = pool(Some(jobs)).install(|| run(&cfg, &Sinks::default())).map_err(|e| e.to_string())?;
        out.document(&cfg).map_err(|e| e.to_string())
    };
    let a = doc(1)?;
    let b = doc(4)?;
    check!(a == b, "in-process fuzz documents differ between runs");
    let graphs = |seed| {
        let p = GraphParams { n: 7, euler_min: -5, euler_max: -1, mode: GenMode::Free };
        plumbing::generate::random_graph(seed, &p)
    };
    check!(graphs(5) == graphs(5), "graph generator is not deterministic");
    let bin = env!("CARGO_BIN_EXE_plumbing");
    let invoke = || -> Result<Vec<u8>, String> {
        let o = Command::new(bin)
            .args(["fuzz", "--seed", "1002", "--count", "25", "--format", "json"])
            .output()
            .map_err(|e| e.to_string())?;
        check!(o.status.success(), "fuzz run failed: {}", String::from_utf8_lossy(&o.stderr));
        Ok(o.stdout)
    };
    let first = invoke()?;
    check!(first == invoke()?, "command line fuzz outputs differ between runs");
    Ok(format!("{} + {} bytes reproduced", a.len(), first.len()))
}

type Criterion = (&'static str, fn() -> Outcome, Duration);

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("lattice exactness", criterion_1, Duration::from_secs(30)),
        ("pruned vs exhaustive boxes", criterion_2, Duration::from_secs(60)),
        ("h1 formula vs closed formula", criterion_3, Duration::from_secs(120)),
        ("empty-base relative formula vs closed formula", criterion_4, Duration::from_secs(180)),
        ("blow-up tower vs closed formula", criterion_5, Duration::from_secs(600)),
        ("dominance forces the base value", criterion_6, Duration::from_secs(600)),
        ("b invariant under blow-ups off the base", criterion_7, Duration::from_secs(600)),
        ("minimizer join and projection meet", criterion_8, Duration::from_secs(600)),
        ("pullback invariance", criterion_9, Duration::from_secs(600)),
        ("determinism of structured output", criterion_10, Duration::from_secs(600)),
    ];
    let start = Instant::now();
    let mut failed = 0;
    for (i, (name, f, budget)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let r = std::panic::catch_unwind(f).unwrap_or_else(|_| Err("panicked".into()));
        let dt = t.elapsed();
        let r = match r {
            Ok(detail) if dt > *budget => Err(format!("{detail}; over the {}s budget", budget.as_secs())),
            r => r,
        };
        match r {
            Ok(detail) => println!("PASS  criterion {:>2}: {name} ({detail}) [{:.2}s]", i + 1, dt.as_secs_f64()),
            Err(msg) => {
                failed += 1;
                println!("FAIL  criterion {:>2}: {name}: {msg} [{:.2}s]", i + 1, dt.as_secs_f64());
            }
        }
    }
    println!("acceptance: {} of 10 passed in {:.2}s", 10 - failed, start.elapsed().as_secs_f64());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
