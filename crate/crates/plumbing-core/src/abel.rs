//! Dimensions of images of Abel maps.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::cell::RefCell;

use crate::box_opt::{self, h1_o_generic, BoxProblem, Limits, Objective, OptResult};
use crate::cycle::{q_to_i64, Cycle, RatCycle};
use crate::error::{Error, Result};
use crate::graph::PlumbingGraph;
use crate::oracle::{AnalyticOracle, BundleDescriptor, HypothesisMode};
use crate::relative::RelativeContext;
use crate::subgraph::{is_connected_cycle, split_cycle, SubgraphEmbedding};

/// Source of `h¹(O_Z)` for cycles on a given graph.
pub trait StructureSheaf {
    fn h1_o(&self, graph: &PlumbingGraph, z: &Cycle) -> Result<i64>;
}

/// Generic analytic structure.
#[derive(Debug, Clone, Default)]
pub struct GenericStructure {
    pub limits: Limits,
}

impl StructureSheaf for GenericStructure {
    fn h1_o(&self, graph: &PlumbingGraph, z: &Cycle) -> Result<i64> {
        h1_o_generic(graph, z, &self.limits)
    }
}

impl StructureSheaf for RelativeContext<'_> {
    fn h1_o(&self, graph: &PlumbingGraph, z: &Cycle) -> Result<i64> {
        if graph != self.graph() {
            return Err(Error::GraphMismatch);
        }
        self.h1_o_relgen(z)
    }
}

/// Relatively generic structure over the vertices with the given ids, usable
/// on any graph containing them (for instance blow-ups of the original one).
pub struct RelGenericStructure<'a> {
    pub base_ids: Vec<String>,
    pub oracle: &'a dyn AnalyticOracle,
    pub hypothesis: HypothesisMode,
    pub limits: Limits,
    warnings: RefCell<Vec<String>>,
}

impl<'a> RelGenericStructure<'a> {
    pub fn new(base_ids: Vec<String>, oracle: &'a dyn AnalyticOracle, hypothesis: HypothesisMode, limits: Limits) -> Self {
        RelGenericStructure { base_ids, oracle, hypothesis, limits, warnings: RefCell::new(Vec::new()) }
    }

    pub fn warnings(&self) -> Vec<String> {
        let mut w = self.warnings.borrow().clone();
        w.sort();
        w.dedup();
        w
    }
}

impl StructureSheaf for RelGenericStructure<'_> {
    fn h1_o(&self, graph: &PlumbingGraph, z: &Cycle) -> Result<i64> {
        let emb = SubgraphEmbedding::from_ids(graph, &self.base_ids)?;
        let ctx = RelativeContext::new(graph, emb, self.oracle, self.hypothesis, self.limits.clone())?;
        let r = ctx.h1_o_relgen(z);
        self.warnings.borrow_mut().extend(ctx.take_warnings());
        r
    }
}

/// Invariants of one connected cycle `B` in the maximization defining `b`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComponentInvariants {
    pub cycle: Cycle,
    /// `h¹(B, L)` for `L` relatively generic over the base bundle.
    pub g: i64,
    /// 1 when the relative Abel map of `B` is not dominant.
    pub d: i64,
    pub t: i64,
}

/// Result of a dimension computation with its optimal decomposition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AbelReport {
    pub dimension: i64,
    /// `h¹(O_Z)` used by the formula.
    pub h1_structure: i64,
    pub b: Option<i64>,
    /// Optimal cycle of the outer optimization (lexicographically least).
    pub optimal_cycle: Cycle,
    /// Nontrivial components of the optimal cycle, for `b`-type formulas.
    pub components: Vec<ComponentInvariants>,
    pub optimizers: Vec<Cycle>,
    pub optimizer_count: u64,
    /// Dimension of the space of divisors, when known.
    pub eca_dimension: Option<i64>,
    pub warnings: Vec<String>,
}

fn require_above_e(graph: &PlumbingGraph, z: &Cycle) -> Result<()> {
    graph.check_len(z)?;
    if let Some(v) = (0..graph.n()).find(|&v| z[v] < 1) {
        return Err(Error::CycleBelowE(graph.id(v).into()));
    }
    Ok(())
}

fn pairing_int(graph: &PlumbingGraph, lprime: &RatCycle, z: &Cycle) -> Result<i64> {
    q_to_i64(&graph.pair_mixed(lprime, z)).ok_or_else(|| Error::NotInLprime("class".into()))
}

/// `dim Im c^{l'}(Z) = h¹(O_Z) - max_{0 <= Z_1 <= Z} [h¹(O_{Z_1}) - (l', Z_1)]`.
pub fn dim_abel_via_h1(
    graph: &PlumbingGraph,
    z: &Cycle,
    lprime: &RatCycle,
    provider: &dyn StructureSheaf,
    limits: &Limits,
) -> Result<AbelReport> {
    require_above_e(graph, z)?;
    graph.require_neg_lipman(lprime)?;
    let h = provider.h1_o(graph, z)?;
    let obj = Objective::zero(graph.n()).add_pairing(graph, lprime, 1)?;
    let p = BoxProblem::new(graph, Cycle::zero(graph.n()), z.clone(), obj);
    let mut extra = |z1: &Cycle| provider.h1_o(graph, z1).map(|v| -v);
    let r = box_opt::minimize_box_with(&p, limits, &mut extra)?;
    let dimension = h + r.int_value()?;
    Ok(report_from(dimension, h, None, r, Some(pairing_int(graph, lprime, z)?)))
}

fn report_from(dimension: i64, h: i64, b: Option<i64>, r: OptResult, eca: Option<i64>) -> AbelReport {
    AbelReport {
        dimension,
        h1_structure: h,
        b,
        optimal_cycle: r.first().clone(),
        components: Vec::new(),
        optimizers: r.optimizers,
        optimizer_count: r.count,
        eca_dimension: eca,
        warnings: Vec::new(),
    }
}

/// Closed formula for generic analytic structures:
/// `1 - min_{E <= l <= Z} χ(l) + min_{0 <= Z_1 <= Z} [(l', Z_1) + min_{E_{|Z_1|} <= l <= Z_1} χ(l) - χ(E_{|Z_1|})]`,
/// where the `Z_1 = 0` term is zero.
pub fn dim_abel_generic(graph: &PlumbingGraph, z: &Cycle, lprime: &RatCycle, limits: &Limits) -> Result<AbelReport> {
    require_above_e(graph, z)?;
    graph.require_neg_lipman(lprime)?;
    let n = graph.n();
    let min_chi = |lo: Cycle, hi: Cycle| -> Result<i64> {
        box_opt::minimize_box(&BoxProblem::new(graph, lo, hi, Objective::chi(n)), limits)?.int_value()
    };
    let h = 1 - min_chi(graph.reduced_cycle(), z.clone())?;
    let obj = Objective::zero(n).add_pairing(graph, lprime, 1)?;
    let p = BoxProblem::new(graph, Cycle::zero(n), z.clone(), obj);
    let mut extra = |z1: &Cycle| -> Result<i64> {
        if z1.is_zero() {
            return Ok(0);
        }
        let e = z1.support_cycle();
        Ok(min_chi(e.clone(), z1.clone())? - graph.chi_int(&e))
    };
    let r = box_opt::minimize_box_with(&p, limits, &mut extra)?;
    let dimension = h + r.int_value()?;
    Ok(report_from(dimension, h, None, r, Some(pairing_int(graph, lprime, z)?)))
}

/// `h¹(Z, L)` for `L = L_0 ⊗ (generic element of Im c^{l'}(Z))`:
/// `max_{0 <= Z_1 <= Z} [h¹(Z_1, L_0) - (l', Z_1)]`.
pub fn h1_twisted_genim(
    graph: &PlumbingGraph,
    z: &Cycle,
    lprime: &RatCycle,
    h1_l0: &mut dyn FnMut(&Cycle) -> Result<i64>,
    limits: &Limits,
) -> Result<OptResult> {
    graph.check_len(z)?;
    graph.require_neg_lipman(lprime)?;
    let obj = Objective::zero(graph.n()).add_pairing(graph, lprime, -1)?;
    let p = BoxProblem::new(graph, Cycle::zero(graph.n()), z.clone(), obj);
    box_opt::maximize_box_with(&p, limits, h1_l0)
}

/// `e_Z(I) = h¹(O_Z) - h¹(O_{Z|_{V∖I}})`.
pub fn e_support(graph: &PlumbingGraph, z: &Cycle, i_mask: &[bool], provider: &dyn StructureSheaf) -> Result<i64> {
    graph.check_len(z)?;
    if i_mask.len() != graph.n() {
        return Err(Error::GraphMismatch);
    }
    let off: Vec<bool> = i_mask.iter().map(|b| !b).collect();
    Ok(provider.h1_o(graph, z)? - provider.h1_o(graph, &z.masked(&off))?)
}

/// Base bundle used for the cycles `B` in the definition of `b`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BaseFamily {
    /// A fixed bundle on the base (parent-indexed classes).
    Fixed(BundleDescriptor),
    /// A generic element of `Im c^{R_1(l')}(B_1)`.
    GenericAbelImage,
}

impl BaseFamily {
    fn resolve(&self, ctx: &RelativeContext, lprime: &RatCycle) -> Result<BundleDescriptor> {
        match self {
            BaseFamily::Fixed(b) => Ok(b.clone()),
            BaseFamily::GenericAbelImage => Ok(BundleDescriptor::generic_abel_image(ctx.restrict_chern(lprime)?)),
        }
    }
}

/// `g`, `d` and `t = g + d` of a connected nonzero cycle `B`, from a single
/// minimization: `d = 0` exactly when `l = 0` is the unique minimizer.
pub fn component_invariants(
    ctx: &RelativeContext,
    b: &Cycle,
    lprime: &RatCycle,
    family: &BaseFamily,
) -> Result<ComponentInvariants> {
    let graph = ctx.graph();
    graph.check_len(b)?;
    if !b.is_effective() || !is_connected_cycle(graph, b) {
        return Err(Error::DisconnectedInput);
    }
    graph.require_neg_lipman(lprime)?;
    component_invariants_unchecked(ctx, b, lprime, family)
}

fn component_invariants_unchecked(
    ctx: &RelativeContext,
    b: &Cycle,
    lprime: &RatCycle,
    family: &BaseFamily,
) -> Result<ComponentInvariants> {
    let bundle = family.resolve(ctx, lprime)?;
    let b1 = ctx.embedding().restrict(b);
    let r = ctx.h1_rel_unchecked(b, &b1, lprime, &bundle)?;
    let d = i64::from(!r.minimizers.is_unique_at(&Cycle::zero(b.len())));
    Ok(ComponentInvariants { cycle: b.clone(), g: r.value, d, t: r.value + d })
}

pub fn g_invariant(ctx: &RelativeContext, b: &Cycle, lprime: &RatCycle, family: &BaseFamily) -> Result<i64> {
    Ok(component_invariants(ctx, b, lprime, family)?.g)
}

pub fn d_invariant(ctx: &RelativeContext, b: &Cycle, lprime: &RatCycle, family: &BaseFamily) -> Result<i64> {
    Ok(component_invariants(ctx, b, lprime, family)?.d)
}

pub fn t_invariant(ctx: &RelativeContext, b: &Cycle, lprime: &RatCycle, family: &BaseFamily) -> Result<i64> {
    Ok(component_invariants(ctx, b, lprime, family)?.t)
}

/// Value of `b` with its optimal cycle.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BReport {
    pub value: i64,
    /// Lexicographically least maximizer `Z'`.
    pub optimal: Cycle,
    /// Components of `Z'`, without single base-free vertices of `t = 0`.
    pub components: Vec<ComponentInvariants>,
    pub maximizers: OptResult,
}

/// `b = max_{0 <= Z' <= Z} Σ_i t(Z'_i)` over the connected components `Z'_i`.
pub fn b_invariant(ctx: &RelativeContext, z: &Cycle, lprime: &RatCycle, family: &BaseFamily) -> Result<BReport> {
    let graph = ctx.graph();
    graph.check_len(z)?;
    if !z.is_effective() {
        return Err(Error::InvalidBox("cycle has a negative coefficient".into()));
    }
    graph.require_neg_lipman(lprime)?;
    if let BaseFamily::Fixed(bundle) = family {
        ctx.check_chern(lprime, bundle)?;
    }
    let mut memo: BTreeMap<Cycle, ComponentInvariants> = BTreeMap::new();
    let invariants = |c: &Cycle, memo: &mut BTreeMap<Cycle, ComponentInvariants>| -> Result<ComponentInvariants> {
        if let Some(ci) = memo.get(c) {
            return Ok(ci.clone());
        }
        let ci = component_invariants_unchecked(ctx, c, lprime, family)?;
        memo.insert(c.clone(), ci.clone());
        Ok(ci)
    };
    let p = BoxProblem::new(graph, Cycle::zero(graph.n()), z.clone(), Objective::zero(graph.n()));
    let r = {
        let mut extra = |zp: &Cycle| -> Result<i64> {
            let mut s = 0;
            for c in split_cycle(graph, zp) {
                s += invariants(&c, &mut memo)?.t;
            }
            Ok(s)
        };
        box_opt::maximize_box_with(&p, &ctx.limits, &mut extra)?
    };
    let optimal = r.first().clone();
    let mut components = Vec::new();
    for c in split_cycle(graph, &optimal) {
        let ci = invariants(&c, &mut memo)?;
        let support = c.support();
        let lone_free = support.len() == 1 && !ctx.embedding().contains(support[0]);
        if lone_free && ci.t == 0 {
            continue;
        }
        components.push(ci);
    }
    Ok(BReport { value: r.int_value()?, optimal, components, maximizers: r })
}

/// Dimension of the image of the relative Abel map for a fixed base bundle.
///
/// `dim = h¹(Z_1, 𝓛) + h¹(O_Z) - h¹(O_{Z_1}) - b`, with `Z_1 = Z|_{V_1}`.
pub fn dim_rel_abel(
    ctx: &RelativeContext,
    z: &Cycle,
    lprime: &RatCycle,
    bundle: &BundleDescriptor,
    provider: Option<&dyn StructureSheaf>,
) -> Result<AbelReport> {
    let graph = ctx.graph();
    require_above_e(graph, z)?;
    graph.require_neg_lipman(lprime)?;
    ctx.check_chern(lprime, bundle)?;
    let z1 = ctx.embedding().restrict(z);
    let mut warnings = Vec::new();
    match ctx.base_has_regular_section(&z1, bundle)? {
        Some(false) => return Err(Error::EmptyEca),
        Some(true) => {}
        None => warnings.push(String::from("oracle cannot decide whether the base bundle has a section without fixed components")),
    }
    let h1_l = ctx.base_h1(&z1, bundle)?;
    let (hz, hz1) = match provider {
        Some(p) => (p.h1_o(graph, z)?, p.h1_o(graph, &z1)?),
        None => (ctx.h1_o_relgen(z)?, ctx.h1_o_relgen(&z1)?),
    };
    let b = b_invariant(ctx, z, lprime, &BaseFamily::Fixed(bundle.clone()))?;
    let dimension = h1_l + hz - hz1 - b.value;
    let eca = h1_l - hz1 + pairing_int(graph, lprime, z)?;
    if dimension < 0 || dimension > hz - hz1 || dimension > eca {
        warnings.push(alloc::format!(
            "inconsistent oracle data: dimension {dimension} outside [0, min({}, {eca})]",
            hz - hz1
        ));
    }
    warnings.extend(ctx.take_warnings());
    Ok(AbelReport {
        dimension,
        h1_structure: hz,
        b: Some(b.value),
        optimal_cycle: b.optimal,
        components: b.components,
        optimizers: b.maximizers.optimizers,
        optimizer_count: b.maximizers.count,
        eca_dimension: Some(eca),
        warnings,
    })
}

/// `dim Im c^{l'}(Z) = h¹(O_Z) - b` for a relatively generic structure, with
/// the base bundles generic in the images of the base Abel maps.
pub fn dim_abel_section5(ctx: &RelativeContext, z: &Cycle, lprime: &RatCycle) -> Result<AbelReport> {
    let graph = ctx.graph();
    graph.check_len(z)?;
    graph.require_neg_lipman(lprime)?;
    let h = ctx.h1_o_relgen(z)?;
    let b = b_invariant(ctx, z, lprime, &BaseFamily::GenericAbelImage)?;
    let dimension = h - b.value;
    let mut warnings = ctx.take_warnings();
    if dimension < 0 {
        warnings.push(alloc::format!("inconsistent oracle data: negative dimension {dimension}"));
    }
    Ok(AbelReport {
        dimension,
        h1_structure: h,
        b: Some(b.value),
        optimal_cycle: b.optimal,
        components: b.components,
        optimizers: b.maximizers.optimizers,
        optimizer_count: b.maximizers.count,
        eca_dimension: Some(pairing_int(graph, lprime, z)?),
        warnings,
    })
}
