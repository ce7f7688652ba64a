//! Line bundle descriptors and the analytic oracle interface.

use alloc::boxed::Box;
use alloc::format;
use alloc::string::String;

use num_traits::Signed;

use crate::box_opt::{self, h1_o_generic, BoxProblem, Limits, Objective};
use crate::cycle::{Cycle, RatCycle};
use crate::error::{Error, Result};
use crate::graph::PlumbingGraph;
use crate::subgraph::Component;

/// How violated hypotheses of the natural-bundle formulas are handled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum HypothesisMode {
    /// Fail with [`Error::HypothesisViolation`].
    Strict,
    /// Compute anyway and record a warning.
    Warn,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum BundleKind {
    Trivial,
    /// Natural line bundle with the given Chern class.
    Natural(RatCycle),
    /// Generic element of `Pic^c`.
    GenericPic(RatCycle),
    /// Generic element of the image of the Abel map `c^c`.
    GenericAbelImage(RatCycle),
    /// Relatively generic bundle over a fixed bundle on a subgraph.
    RelativeGeneric { base: Box<BundleDescriptor>, c1: RatCycle },
    /// Opaque bundle known only through tabulated values.
    Table(String),
}

/// `kind ⊗ O(-twist)`. Chern class payloads are E-coordinates on the graph the
/// descriptor is used with.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BundleDescriptor {
    pub kind: BundleKind,
    pub twist: Option<RatCycle>,
}

impl BundleDescriptor {
    pub fn trivial() -> Self {
        BundleDescriptor { kind: BundleKind::Trivial, twist: None }
    }

    pub fn natural(c: RatCycle) -> Self {
        BundleDescriptor { kind: BundleKind::Natural(c), twist: None }.normalized()
    }

    pub fn generic_pic(c: RatCycle) -> Self {
        BundleDescriptor { kind: BundleKind::GenericPic(c), twist: None }
    }

    pub fn generic_abel_image(c: RatCycle) -> Self {
        BundleDescriptor { kind: BundleKind::GenericAbelImage(c), twist: None }
    }

    pub fn table(key: impl Into<String>) -> Self {
        BundleDescriptor { kind: BundleKind::Table(key.into()), twist: None }
    }

    /// `self ⊗ O(-t)`, normalized.
    pub fn twisted(&self, t: &RatCycle) -> Self {
        let twist = match &self.twist {
            Some(old) => old + t,
            None => t.clone(),
        };
        BundleDescriptor { kind: self.kind.clone(), twist: Some(twist) }.normalized()
    }

    /// Normal form: twists are folded into the class wherever the kind allows
    /// it, zero twists are dropped and `Natural(0)` becomes `Trivial`.
    pub fn normalized(&self) -> Self {
        let twist = self.twist.clone().filter(|t| !t.is_zero());
        let (kind, twist) = match (&self.kind, twist) {
            (k, None) => (k.clone(), None),
            (BundleKind::Trivial, Some(t)) => (BundleKind::Natural(-&t), None),
            (BundleKind::Natural(c), Some(t)) => (BundleKind::Natural(c - &t), None),
            (BundleKind::GenericPic(c), Some(t)) => (BundleKind::GenericPic(c - &t), None),
            (k, Some(t)) => (k.clone(), Some(t)),
        };
        let kind = match kind {
            BundleKind::Natural(c) if c.is_zero() => BundleKind::Trivial,
            k => k,
        };
        BundleDescriptor { kind, twist }
    }

    /// First Chern class, unless the bundle is opaque.
    pub fn c1(&self) -> Option<RatCycle> {
        let base = match &self.kind {
            BundleKind::Trivial => None,
            BundleKind::Natural(c)
            | BundleKind::GenericPic(c)
            | BundleKind::GenericAbelImage(c)
            | BundleKind::RelativeGeneric { c1: c, .. } => Some(c.clone()),
            BundleKind::Table(_) => return None,
        };
        match (base, &self.twist) {
            (Some(c), Some(t)) => Some(&c - t),
            (Some(c), None) => Some(c),
            (None, Some(t)) => Some(-t),
            (None, None) => Some(RatCycle::zero(self.dim().unwrap_or(0))),
        }
    }

    /// Length of the class payloads, if any.
    pub fn dim(&self) -> Option<usize> {
        match &self.kind {
            BundleKind::Natural(c)
            | BundleKind::GenericPic(c)
            | BundleKind::GenericAbelImage(c)
            | BundleKind::RelativeGeneric { c1: c, .. } => Some(c.len()),
            _ => self.twist.as_ref().map(RatCycle::len),
        }
    }

    /// Applies `f` to every class payload.
    pub fn map_classes(&self, f: &dyn Fn(&RatCycle) -> RatCycle) -> Self {
        let kind = match &self.kind {
            BundleKind::Trivial => BundleKind::Trivial,
            BundleKind::Natural(c) => BundleKind::Natural(f(c)),
            BundleKind::GenericPic(c) => BundleKind::GenericPic(f(c)),
            BundleKind::GenericAbelImage(c) => BundleKind::GenericAbelImage(f(c)),
            BundleKind::RelativeGeneric { base, c1 } => {
                BundleKind::RelativeGeneric { base: Box::new(base.map_classes(f)), c1: f(c1) }
            }
            BundleKind::Table(k) => BundleKind::Table(k.clone()),
        };
        BundleDescriptor { kind, twist: self.twist.as_ref().map(f) }
    }

    /// The descriptor on one component of a subgraph, from parent indexing.
    pub fn restrict_to(&self, comp: &Component) -> Self {
        self.map_classes(&|c| comp.restrict_rat(c)).normalized()
    }

    fn check_dim(&self, graph: &PlumbingGraph) -> Result<()> {
        match self.dim() {
            Some(d) if d != graph.n() => Err(Error::GraphMismatch),
            _ => Ok(()),
        }
    }
}

/// Source of analytic invariants of line bundles on cycles of a connected
/// graph.
pub trait AnalyticOracle {
    /// `h¹(Z, L)` for an effective cycle `Z`.
    fn h1(&self, graph: &PlumbingGraph, cycle: &Cycle, bundle: &BundleDescriptor) -> Result<i64>;

    /// Whether `H⁰(Z, L)` has a section without fixed components; `None`
    /// when the oracle cannot tell.
    fn has_section_without_fixed_component(
        &self,
        _graph: &PlumbingGraph,
        _cycle: &Cycle,
        _bundle: &BundleDescriptor,
    ) -> Result<Option<bool>> {
        Ok(None)
    }
}

/// First vertex of `|cycle|` where the natural-bundle hypothesis fails: the
/// class `m = -Σ a_v E_v` needs `a_v > 0` on the support.
pub fn natural_hypothesis_violation(graph: &PlumbingGraph, cycle: &Cycle, m: &RatCycle) -> Option<String> {
    (0..graph.n())
        .find(|&v| cycle[v] != 0 && !m[v].is_negative())
        .map(|v| format!("E-coefficient of the class at `{}` is {}, expected negative", graph.id(v), m[v]))
}

/// Oracle answering from the combinatorial formulas valid for generic
/// analytic structures.
#[derive(Debug, Clone)]
pub struct GenericOracle {
    pub limits: Limits,
    pub hypothesis: HypothesisMode,
    /// Allows twisted Abel-image queries by assuming the base bundle has a
    /// section without fixed components.
    pub assume_regular_section: bool,
}

impl Default for GenericOracle {
    fn default() -> Self {
        GenericOracle { limits: Limits::default(), hypothesis: HypothesisMode::Warn, assume_regular_section: true }
    }
}

impl GenericOracle {
    /// Exhaustive enumeration throughout, for cross-checking the pruned code.
    pub fn verification() -> Self {
        GenericOracle {
            limits: Limits::default().with_strategy(box_opt::Strategy::Exhaustive),
            ..GenericOracle::default()
        }
    }

    /// `χ(-c) - min { χ(-c + l) : 0 <= l <= Z }`.
    fn h1_by_chi_shift(&self, graph: &PlumbingGraph, cycle: &Cycle, c: &RatCycle) -> Result<i64> {
        let base = -c;
        let obj = Objective::chi_at(graph, &base)?;
        let p = BoxProblem::new(graph, Cycle::zero(graph.n()), cycle.clone(), obj);
        let r = box_opt::minimize_box(&p, &self.limits)?;
        let v = graph.chi(&base) - r.value;
        crate::cycle::q_to_i64(&v).ok_or_else(|| Error::NotInLprime("class".into()))
    }

    fn natural_check(&self, graph: &PlumbingGraph, cycle: &Cycle, m: &RatCycle) -> Result<()> {
        if self.hypothesis == HypothesisMode::Strict {
            if let Some(msg) = natural_hypothesis_violation(graph, cycle, m) {
                return Err(Error::HypothesisViolation(msg));
            }
        }
        Ok(())
    }

    fn unique_zero_minimizer(&self, graph: &PlumbingGraph, cycle: &Cycle, c: &RatCycle) -> Result<bool> {
        let obj = Objective::chi_at(graph, &-c)?;
        let p = BoxProblem::new(graph, Cycle::zero(graph.n()), cycle.clone(), obj);
        let r = box_opt::minimize_box(&p, &self.limits)?;
        Ok(r.is_unique_at(&Cycle::zero(graph.n())))
    }
}

impl AnalyticOracle for GenericOracle {
    fn h1(&self, graph: &PlumbingGraph, cycle: &Cycle, bundle: &BundleDescriptor) -> Result<i64> {
        graph.check_len(cycle)?;
        bundle.check_dim(graph)?;
        if !cycle.is_effective() {
            return Err(Error::InvalidBox("cycle has a negative coefficient".into()));
        }
        if cycle.is_zero() {
            return Ok(0);
        }
        let b = bundle.normalized();
        match (&b.kind, &b.twist) {
            (BundleKind::Trivial, None) => h1_o_generic(graph, cycle, &self.limits),
            (BundleKind::Natural(m), None) => {
                self.natural_check(graph, cycle, m)?;
                self.h1_by_chi_shift(graph, cycle, m)
            }
            (BundleKind::GenericPic(c), None) => self.h1_by_chi_shift(graph, cycle, c),
            (BundleKind::GenericAbelImage(c), twist) => {
                graph.require_neg_lipman(c)?;
                let l0 = match twist {
                    None => BundleDescriptor::trivial(),
                    Some(t) if self.assume_regular_section => BundleDescriptor::natural(-t),
                    Some(_) => {
                        return Err(Error::UnsupportedDescriptor(
                            "twisted Abel image without a regular-section assumption".into(),
                        ))
                    }
                };
                let obj = Objective::zero(graph.n()).add_pairing(graph, c, -1)?;
                let p = BoxProblem::new(graph, Cycle::zero(graph.n()), cycle.clone(), obj);
                let mut inner = |w: &Cycle| self.h1(graph, w, &l0);
                box_opt::maximize_box_with(&p, &self.limits, &mut inner)?.int_value()
            }
            (BundleKind::RelativeGeneric { .. }, _) => {
                Err(Error::UnsupportedDescriptor("relatively generic bundle on a base graph".into()))
            }
            (BundleKind::Table(k), _) => Err(Error::UnsupportedDescriptor(format!("table bundle `{k}`"))),
            (_, Some(_)) => Err(Error::UnsupportedDescriptor("twisted descriptor".into())),
        }
    }

    fn has_section_without_fixed_component(
        &self,
        graph: &PlumbingGraph,
        cycle: &Cycle,
        bundle: &BundleDescriptor,
    ) -> Result<Option<bool>> {
        graph.check_len(cycle)?;
        bundle.check_dim(graph)?;
        if cycle.is_zero() {
            return Ok(Some(true));
        }
        let b = bundle.normalized();
        match (&b.kind, &b.twist) {
            (BundleKind::Trivial, None) => Ok(Some(true)),
            (BundleKind::Natural(m), None) => {
                self.natural_check(graph, cycle, m)?;
                Ok(Some(self.unique_zero_minimizer(graph, cycle, m)?))
            }
            (BundleKind::GenericPic(c), None) => Ok(Some(self.unique_zero_minimizer(graph, cycle, c)?)),
            (BundleKind::GenericAbelImage(c), None) => {
                let deg = graph.degrees(c)?;
                Ok(Some((0..graph.n()).all(|v| cycle[v] == 0 || deg[v] >= 0)))
            }
            _ => Ok(None),
        }
    }
}
