//! Box optimization split over a thread pool.

use plumbing_core::box_opt::{maximize_box, minimize_box};
use plumbing_core::{BoxProblem, Limits, OptResult, Result};
use rayon::prelude::*;

/// Thread pool with at most `jobs` workers (all cores when `None`).
pub fn pool(jobs: Option<usize>) -> rayon::ThreadPool {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Some(j) = jobs {
        b = b.num_threads(j.max(1));
    }
    b.build().expect("thread pool")
}

fn slices<'g>(p: &BoxProblem<'g>) -> Vec<BoxProblem<'g>> {
    if p.lower.is_empty() || p.lower[0] > p.upper[0] {
        return vec![p.clone()];
    }
    (p.lower[0]..=p.upper[0])
        .map(|k| {
            let mut lo = p.lower.clone();
            let mut hi = p.upper.clone();
            lo[0] = k;
            hi[0] = k;
            BoxProblem::new(p.graph, lo, hi, p.objective.clone())
        })
        .collect()
}

fn split(p: &BoxProblem, limits: &Limits, maximize: bool) -> Result<OptResult> {
    // Validation and the volume cap apply to the whole box.
    let v = p.volume();
    if v > limits.volume_cap {
        return Err(plumbing_core::Error::BoxTooLarge { volume: v, cap: limits.volume_cap });
    }
    let run = |q: &BoxProblem| if maximize { maximize_box(q, limits) } else { minimize_box(q, limits) };
    let parts: Vec<Result<OptResult>> = slices(p).par_iter().map(run).collect();
    let cap = limits.optimizer_cap;
    let mut acc: Option<OptResult> = None;
    for r in parts {
        let r = r?;
        acc = Some(match acc {
            None => r,
            Some(a) if maximize => a.merge_max(r, cap),
            Some(a) => a.merge_min(r, cap),
        });
    }
    match acc {
        Some(r) => Ok(r),
        None => run(p),
    }
}

/// Same result as [`minimize_box`], with the slices along the first
/// coordinate solved in parallel on the current pool.
pub fn par_minimize_box(p: &BoxProblem, limits: &Limits) -> Result<OptResult> {
    split(p, limits, false)
}

/// Parallel counterpart of [`maximize_box`].
pub fn par_maximize_box(p: &BoxProblem, limits: &Limits) -> Result<OptResult> {
    split(p, limits, true)
}
