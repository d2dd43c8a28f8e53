use rayon::prelude::*;
use serde::Serialize;

use super::{Criterion, Model, Objective};
use crate::error::SolveError;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ParetoPoint {
    pub lex_index: u128,
    pub memory_bits: u64,
    pub time_seconds: f64,
    pub distance: f64,
    pub on_front: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ParetoScatter {
    pub points: Vec<ParetoPoint>,
    /// Every `stride`-th placement was evaluated; 1 means all of them.
    pub stride: u128,
    pub total: u128,
}

impl ParetoScatter {
    pub fn front(&self) -> impl Iterator<Item = &ParetoPoint> {
        self.points.iter().filter(|p| p.on_front)
    }

    pub fn subsampled(&self) -> bool {
        self.stride > 1
    }
}

/// Evaluates placements and marks the non-dominated (memory, time) pairs.
///
/// Beyond `cap` placements every k-th one in lexicographic order is used,
/// with k chosen so that at most `cap` are evaluated.
pub fn pareto_front(model: &Model, objective: &Objective, cap: u64, threads: usize) -> Result<ParetoScatter, SolveError> {
    let total = model.placement_count();
    let cap = cap.max(1) as u128;
    let stride = total.div_ceil(cap).max(1);
    let count = total.div_ceil(stride);
    let criterion = Criterion::Ours(*objective);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build()
        .map_err(|e| SolveError::Invalid(format!("thread pool: {e}")))?;
    let mut points: Vec<ParetoPoint> = pool.install(|| {
        (0..count as u64)
            .into_par_iter()
            .map(|i| {
                let lex_index = i as u128 * stride;
                let assign = model.assignment_at(lex_index);
                let (_, cost) = model.key(&criterion, &assign, model.hops());
                ParetoPoint {
                    lex_index,
                    memory_bits: cost.memory_bits,
                    time_seconds: cost.time_seconds,
                    distance: cost.distance,
                    on_front: false,
                }
            })
            .collect()
    });
    let pairs: Vec<(u64, f64)> = points.iter().map(|p| (p.memory_bits, p.time_seconds)).collect();
    for (p, on) in points.iter_mut().zip(pareto_mask(&pairs)) {
        p.on_front = on;
    }
    Ok(ParetoScatter { points, stride, total })
}

/// `true` for pairs no other pair dominates; equal pairs share the verdict.
pub fn pareto_mask(pairs: &[(u64, f64)]) -> Vec<bool> {
    let mut order: Vec<usize> = (0..pairs.len()).collect();
    order.sort_by(|&a, &b| pairs[a].0.cmp(&pairs[b].0).then(pairs[a].1.total_cmp(&pairs[b].1)));
    let mut mask = vec![false; pairs.len()];
    let mut best_before = f64::INFINITY;
    let mut i = 0;
    while i < order.len() {
        let memory = pairs[order[i]].0;
        let mut j = i;
        while j < order.len() && pairs[order[j]].0 == memory {
            j += 1;
        }
        let group_min = pairs[order[i]].1;
        if group_min < best_before {
            for &k in &order[i..j] {
                mask[k] = pairs[k].1 == group_min;
            }
            best_before = group_min;
        }
        i = j;
    }
    mask
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::lattice::DEFAULT_FLOW_CAP;
    use proptest::prelude::*;

    fn dominated(pairs: &[(u64, f64)], i: usize) -> bool {
        pairs.iter().any(|q| {
            q.0 <= pairs[i].0 && q.1 <= pairs[i].1 && (q.0 < pairs[i].0 || q.1 < pairs[i].1)
        })
    }

    proptest! {
        #[test]
        fn mask_matches_quadratic_definition(raw in prop::collection::vec((0u64..6, 0u32..6), 0..40)) {
            let pairs: Vec<(u64, f64)> = raw.iter().map(|&(m, t)| (m, t as f64)).collect();
            let mask = pareto_mask(&pairs);
            for i in 0..pairs.len() {
                prop_assert_eq!(mask[i], !dominated(&pairs, i));
            }
        }
    }

    #[test]
    fn table4_scatter_contains_the_optimum() {
        let m = Model::new(&fixtures::table4(2.0), DEFAULT_FLOW_CAP).unwrap();
        let o = Objective::distance(m.instance());
        let s = pareto_front(&m, &o, 1_000, 2).unwrap();
        assert_eq!(s.points.len(), 81);
        let best = super::super::solve_bruteforce(&m, &o, 1_000, 1).unwrap();
        let idx = m.lex_index(&m.assignment(&best.placement).unwrap());
        assert!(s.points[idx as usize].on_front);
    }

    #[test]
    fn subsampling_respects_cap() {
        let m = Model::new(&fixtures::table4(2.0), DEFAULT_FLOW_CAP).unwrap();
        let o = Objective::distance(m.instance());
        let s = pareto_front(&m, &o, 10, 1).unwrap();
        assert!(s.points.len() <= 10);
        assert_eq!(s.stride, 9);
        assert!(s.front().count() >= 1);
    }
}
