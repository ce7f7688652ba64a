//! Relatively generic analytic structures over a fixed structure on the
//! subgraph induced by `V_1`.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::cell::RefCell;

use crate::box_opt::{self, next_point, BoxProblem, Limits, Objective, OptResult};
use crate::cycle::{Cycle, RatCycle};
use crate::error::{Error, Result};
use crate::graph::PlumbingGraph;
use crate::oracle::{natural_hypothesis_violation, AnalyticOracle, BundleDescriptor, BundleKind, HypothesisMode};
use crate::subgraph::{split_cycle, SubgraphEmbedding};

/// `min(Z - l, Z_1)`, the cycle on the base seen by the `l`-th term.
pub fn truncate(z: &Cycle, l: &Cycle, z1: &Cycle) -> Cycle {
    (z - l).meet(z1)
}

/// Outcome of a dominance test.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dominance {
    pub dominant: bool,
    /// First violating cycle in enumeration order, when not dominant.
    pub witness: Option<Cycle>,
}

/// `h¹` value of a relatively generic bundle with the minimizer set of
/// `l ↦ χ(-l' + l) - h¹((Z - l)_1, 𝔏(-R_1(l)))`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelH1 {
    pub value: i64,
    pub minimizers: OptResult,
}

/// Ambient graph, base subgraph and the oracle describing the base structure.
pub struct RelativeContext<'a> {
    graph: &'a PlumbingGraph,
    embedding: SubgraphEmbedding,
    oracle: &'a dyn AnalyticOracle,
    pub hypothesis: HypothesisMode,
    pub limits: Limits,
    warnings: RefCell<BTreeSet<String>>,
}

impl<'a> RelativeContext<'a> {
    pub fn new(
        graph: &'a PlumbingGraph,
        embedding: SubgraphEmbedding,
        oracle: &'a dyn AnalyticOracle,
        hypothesis: HypothesisMode,
        limits: Limits,
    ) -> Result<Self> {
        if embedding.parent_n() != graph.n() {
            return Err(Error::GraphMismatch);
        }
        Ok(RelativeContext { graph, embedding, oracle, hypothesis, limits, warnings: RefCell::new(BTreeSet::new()) })
    }

    pub fn graph(&self) -> &'a PlumbingGraph {
        self.graph
    }

    pub fn embedding(&self) -> &SubgraphEmbedding {
        &self.embedding
    }

    pub fn oracle(&self) -> &'a dyn AnalyticOracle {
        self.oracle
    }

    /// Warnings recorded so far, sorted and deduplicated.
    pub fn warnings(&self) -> Vec<String> {
        self.warnings.borrow().iter().cloned().collect()
    }

    pub fn take_warnings(&self) -> Vec<String> {
        core::mem::take(&mut *self.warnings.borrow_mut()).into_iter().collect()
    }

    pub(crate) fn warn(&self, msg: String) {
        self.warnings.borrow_mut().insert(msg);
    }

    /// `R_1(x) = Σ_{v ∈ V_1} a_v E*_v(Γ_1)` with `a_v = -(x, E_v)`, as a
    /// parent-indexed class vanishing off `V_1`.
    pub fn restrict_chern(&self, x: &RatCycle) -> Result<RatCycle> {
        let deg = self.graph.degrees(x)?;
        let mut out = RatCycle::zero(self.graph.n());
        for comp in self.embedding.components() {
            let a: Vec<i64> = comp.to_parent.iter().map(|&p| -deg[p]).collect();
            let local = comp.graph.from_estar(&a)?;
            comp.extend_rat_into(&local, &mut out);
        }
        Ok(out)
    }

    fn restrict_chern_int(&self, l: &Cycle) -> Result<RatCycle> {
        self.restrict_chern(&l.to_rational())
    }

    fn check_base_cycle(&self, c: &Cycle) -> Result<()> {
        self.graph.check_len(c)?;
        if !c.is_effective() {
            return Err(Error::InvalidBox("cycle has a negative coefficient".into()));
        }
        if let Some(v) = (0..c.len()).find(|&v| c[v] != 0 && !self.embedding.contains(v)) {
            return Err(Error::InvalidBox(format!("base cycle is nonzero at `{}` outside V_1", self.graph.id(v))));
        }
        Ok(())
    }

    /// `h¹(C, 𝔏)` on the base, summed over components of `Γ_1`. Both the cycle
    /// and the descriptor are parent-indexed.
    pub fn base_h1(&self, cycle: &Cycle, bundle: &BundleDescriptor) -> Result<i64> {
        self.check_base_cycle(cycle)?;
        let mut total = 0;
        for comp in self.embedding.components() {
            let c = comp.restrict(cycle);
            if c.is_zero() {
                continue;
            }
            let d = bundle.restrict_to(comp);
            if let BundleKind::Natural(m) = &d.kind {
                if let Some(msg) = natural_hypothesis_violation(&comp.graph, &c, m) {
                    match self.hypothesis {
                        HypothesisMode::Strict => return Err(Error::HypothesisViolation(format!("base query: {msg}"))),
                        HypothesisMode::Warn => self.warn(format!("base query: {msg}")),
                    }
                }
            }
            total += self.oracle.h1(&comp.graph, &c, &d)?;
        }
        Ok(total)
    }

    /// Whether the base bundle has a section without fixed components on
    /// every component of `cycle`; `None` if the oracle cannot tell.
    pub fn base_has_regular_section(&self, cycle: &Cycle, bundle: &BundleDescriptor) -> Result<Option<bool>> {
        self.check_base_cycle(cycle)?;
        let mut unknown = false;
        for comp in self.embedding.components() {
            let c = comp.restrict(cycle);
            if c.is_zero() {
                continue;
            }
            match self.oracle.has_section_without_fixed_component(&comp.graph, &c, &bundle.restrict_to(comp))? {
                Some(false) => return Ok(Some(false)),
                Some(true) => {}
                None => unknown = true,
            }
        }
        Ok(if unknown { None } else { Some(true) })
    }

    /// Fails with [`Error::ChernMismatch`] unless `c_1(𝔏) = R_1(l')` on `V_1`.
    pub fn check_chern(&self, lprime: &RatCycle, bundle: &BundleDescriptor) -> Result<()> {
        let Some(c) = bundle.c1() else { return Ok(()) };
        if c.len() != self.graph.n() {
            if bundle.dim().is_none() && c.is_zero() {
                // trivial bundle without payload
            } else {
                return Err(Error::GraphMismatch);
            }
        }
        let r = self.restrict_chern(lprime)?;
        let ok = (0..self.graph.n()).filter(|&v| self.embedding.contains(v)).all(|v| {
            let cv = c.0.get(v).cloned().unwrap_or_default();
            cv == r[v]
        });
        if ok {
            Ok(())
        } else {
            Err(Error::ChernMismatch)
        }
    }

    fn check_rel_inputs(&self, z: &Cycle, z1: &Cycle, lprime: &RatCycle, bundle: &BundleDescriptor) -> Result<()> {
        self.graph.check_len(z)?;
        if !z.is_effective() {
            return Err(Error::InvalidBox("cycle has a negative coefficient".into()));
        }
        self.check_base_cycle(z1)?;
        if !z1.le(z) {
            return Err(Error::InvalidBox("base cycle is not below Z".into()));
        }
        self.graph.require_neg_lipman(lprime)?;
        self.check_chern(lprime, bundle)
    }

    /// `χ(-l' + l) - χ(-l') - h¹((Z - l)_1, 𝔏(-R_1(l)))`.
    fn psi(&self, z: &Cycle, z1: &Cycle, deg: &[i64], bundle: &BundleDescriptor, l: &Cycle) -> Result<i64> {
        let lin: i64 = deg.iter().zip(&l.0).map(|(d, x)| d * x).sum();
        let t = truncate(z, l, z1);
        let h = if t.is_zero() {
            0
        } else if l.is_zero() {
            self.base_h1(&t, bundle)?
        } else {
            self.base_h1(&t, &bundle.twisted(&self.restrict_chern_int(l)?))?
        };
        Ok(self.graph.chi_int(l) + lin - h)
    }

    /// Dominance of the relative Abel map: every `0 < l <= Z` has
    /// `χ(-l') - h¹(Z_1, 𝔏) < χ(-l' + l) - h¹((Z - l)_1, 𝔏(-R_1(l)))`.
    /// Stops at the first violation.
    pub fn rel_dominant(&self, z: &Cycle, z1: &Cycle, lprime: &RatCycle, bundle: &BundleDescriptor) -> Result<Dominance> {
        self.check_rel_inputs(z, z1, lprime, bundle)?;
        let deg = self.graph.degrees(lprime)?;
        let zero = Cycle::zero(self.graph.n());
        let p = BoxProblem::new(self.graph, zero.clone(), z.clone(), Objective::zero(self.graph.n()));
        let volume = p.volume();
        if volume > self.limits.volume_cap {
            return Err(Error::BoxTooLarge { volume, cap: self.limits.volume_cap });
        }
        let base = self.psi(z, z1, &deg, bundle, &zero)?;
        let mut l = zero.clone();
        while next_point(&mut l, &zero, z) {
            if self.psi(z, z1, &deg, bundle, &l)? <= base {
                return Ok(Dominance { dominant: false, witness: Some(l) });
            }
        }
        Ok(Dominance { dominant: true, witness: None })
    }

    /// `h¹(Z, 𝔏)` for `𝔏` relatively generic in `r^{-1}(𝔏_1)`:
    /// `χ(-l') - min_{0 <= l <= Z} [χ(-l' + l) - h¹((Z - l)_1, 𝔏_1(-R_1(l)))]`.
    pub fn h1_rel_generic(&self, z: &Cycle, z1: &Cycle, lprime: &RatCycle, bundle: &BundleDescriptor) -> Result<RelH1> {
        self.check_rel_inputs(z, z1, lprime, bundle)?;
        self.h1_rel_unchecked(z, z1, lprime, bundle)
    }

    pub(crate) fn h1_rel_unchecked(
        &self,
        z: &Cycle,
        z1: &Cycle,
        lprime: &RatCycle,
        bundle: &BundleDescriptor,
    ) -> Result<RelH1> {
        let n = self.graph.n();
        let deg = self.graph.degrees(lprime)?;
        let obj = Objective { linear: deg.clone(), ..Objective::chi(n) };
        let p = BoxProblem::new(self.graph, Cycle::zero(n), z.clone(), obj);
        let minimizers = if z1.is_zero() {
            box_opt::minimize_box(&p, &self.limits)?
        } else {
            let mut extra = |l: &Cycle| -> Result<i64> {
                let t = truncate(z, l, z1);
                if t.is_zero() {
                    return Ok(0);
                }
                let b = if l.is_zero() { bundle.clone() } else { bundle.twisted(&self.restrict_chern_int(l)?) };
                Ok(-self.base_h1(&t, &b)?)
            };
            box_opt::minimize_box_with(&p, &self.limits, &mut extra)?
        };
        let value = -minimizers.int_value()?;
        Ok(RelH1 { value, minimizers })
    }

    /// `h¹(Z, O(l'))` of the natural bundle on a relatively generic structure.
    /// Needs `l' = -Σ a_v E_v` with `a_v > 0` on `V_2 ∩ |Z|`.
    pub fn h1_natural_relgen(&self, z: &Cycle, lprime: &RatCycle) -> Result<RelH1> {
        self.graph.check_len(z)?;
        self.graph.check_len_rat(lprime)?;
        if !z.is_effective() {
            return Err(Error::InvalidBox("cycle has a negative coefficient".into()));
        }
        let off_base: Vec<bool> = (0..self.graph.n()).map(|v| !self.embedding.contains(v)).collect();
        if let Some(msg) = natural_hypothesis_violation(self.graph, &z.masked(&off_base), lprime) {
            match self.hypothesis {
                HypothesisMode::Strict => return Err(Error::HypothesisViolation(msg)),
                HypothesisMode::Warn => self.warn(msg),
            }
        }
        let z1 = self.embedding.restrict(z);
        let bundle = BundleDescriptor::natural(self.restrict_chern(lprime)?);
        self.h1_rel_unchecked(z, &z1, lprime, &bundle)
    }

    /// `h¹(O_Z)` of a relatively generic structure: base components go to the
    /// oracle, the others through `h¹(O_{C - E_I}(-E_I))` with `I = |C|`.
    pub fn h1_o_relgen(&self, z: &Cycle) -> Result<i64> {
        self.graph.check_len(z)?;
        if !z.is_effective() {
            return Err(Error::InvalidBox("cycle has a negative coefficient".into()));
        }
        let mut total = 0;
        for comp in split_cycle(self.graph, z) {
            let support = comp.support();
            if support.iter().all(|&v| self.embedding.contains(v)) {
                total += self.base_h1(&comp, &BundleDescriptor::trivial())?;
            } else {
                let e = comp.support_cycle();
                let rest = &comp - &e;
                if rest.is_zero() {
                    continue;
                }
                total += self.h1_natural_relgen(&rest, &(-&e).to_rational())?.value;
            }
        }
        Ok(total)
    }
}
