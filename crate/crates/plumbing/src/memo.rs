//! Thread-safe memoization of oracle answers.

use std::collections::HashMap;
use std::sync::Mutex;

use plumbing_core::{AnalyticOracle, BundleDescriptor, Cycle, PlumbingGraph, Result};

type Key = (PlumbingGraph, Cycle, BundleDescriptor);

/// Caches successful answers of an inner oracle, keyed by graph, cycle and
/// normalized descriptor. Errors are not cached.
pub struct MemoOracle<O> {
    inner: O,
    h1: Mutex<HashMap<Key, i64>>,
    h0nz: Mutex<HashMap<Key, Option<bool>>>,
}

impl<O: AnalyticOracle> MemoOracle<O> {
    pub fn new(inner: O) -> Self {
        MemoOracle { inner, h1: Mutex::new(HashMap::new()), h0nz: Mutex::new(HashMap::new()) }
    }

    pub fn inner(&self) -> &O {
        &self.inner
    }

    /// Number of cached `h¹` answers.
    pub fn cached(&self) -> usize {
        self.h1.lock().expect("memo lock").len()
    }
}

impl<O: AnalyticOracle> AnalyticOracle for MemoOracle<O> {
    fn h1(&self, graph: &PlumbingGraph, cycle: &Cycle, bundle: &BundleDescriptor) -> Result<i64> {
        let key = (graph.clone(), cycle.clone(), bundle.normalized());
        if let Some(&v) = self.h1.lock().expect("memo lock").get(&key) {
            return Ok(v);
        }
        let v = self.inner.h1(graph, cycle, bundle)?;
        self.h1.lock().expect("memo lock").insert(key, v);
        Ok(v)
    }

    fn has_section_without_fixed_component(
        &self,
        graph: &PlumbingGraph,
        cycle: &Cycle,
        bundle: &BundleDescriptor,
    ) -> Result<Option<bool>> {
        let key = (graph.clone(), cycle.clone(), bundle.normalized());
        if let Some(&v) = self.h0nz.lock().expect("memo lock").get(&key) {
            return Ok(v);
        }
        let v = self.inner.has_section_without_fixed_component(graph, cycle, bundle)?;
        self.h0nz.lock().expect("memo lock").insert(key, v);
        Ok(v)
    }
}
