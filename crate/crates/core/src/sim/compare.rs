//! Monte-Carlo comparison of our placement against the baseline under
//! random link delays.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::baseline::solve_baseline;
use crate::comm::LinkTimes;
use crate::error::SolveError;
use crate::optimizer::{solve_branch_bound, CostPoint, Model, Objective};
use crate::time::Placement;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MonteCarloConfig {
    pub trials: u32,
    pub seed: u64,
    pub threads: usize,
    /// Re-solve both methods on every sampled realization.
    pub resolve_per_trial: bool,
}

impl MonteCarloConfig {
    pub fn new(trials: u32, seed: u64) -> Self {
        MonteCarloConfig {
            trials,
            seed,
            threads: 1,
            resolve_per_trial: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MethodStats {
    pub placement: Placement,
    pub mean_distance: f64,
    /// Unbiased estimate; absent for a single trial.
    pub std_distance: Option<f64>,
    pub mean_time: f64,
    pub mean_memory_bytes: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonStats {
    pub trials: u32,
    pub seed: u64,
    pub ours: MethodStats,
    pub baseline: MethodStats,
    /// Fraction of trials where our distance is at most the baseline's.
    pub win_rate: f64,
}

/// RNG for trial `trial` under `seed`.
pub fn trial_rng(seed: u64, trial: u32) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial as u64);
    rng
}

/// Both placements are fixed on expected delays, then re-evaluated on one
/// sampled delay per link and trial.
pub fn monte_carlo_compare(model: &Model, objective: &Objective, config: &MonteCarloConfig) -> Result<ComparisonStats, SolveError> {
    if config.trials == 0 {
        return Err(SolveError::Invalid("at least one trial is required".into()));
    }
    let ours = model.assignment(&solve_branch_bound(model, objective, None)?.placement)?;
    let base = model.assignment(&solve_baseline(model)?.placement)?;

    let trial = |t: &u32| -> Result<(CostPoint, CostPoint, Placement, Placement), SolveError> {
        let mut rng = trial_rng(config.seed, *t);
        let times = LinkTimes::sample(model.graph().links(), &mut rng);
        if config.resolve_per_trial {
            let realized = model.with_link_times(&times);
            let o = realized.assignment(&solve_branch_bound(&realized, objective, None)?.placement)?;
            let b = realized.assignment(&solve_baseline(&realized)?.placement)?;
            let hops = realized.hops();
            Ok((
                crate::optimizer::evaluate_with(&realized, &o, objective, hops),
                crate::optimizer::evaluate_with(&realized, &b, objective, hops),
                realized.placement(&o),
                realized.placement(&b),
            ))
        } else {
            let hops = model.hops_for(&times);
            Ok((
                crate::optimizer::evaluate_with(model, &ours, objective, &hops),
                crate::optimizer::evaluate_with(model, &base, objective, &hops),
                model.placement(&ours),
                model.placement(&base),
            ))
        }
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.threads.max(1))
        .build()
        .map_err(|e| SolveError::Invalid(format!("thread pool: {e}")))?;
    let trials: Vec<u32> = (0..config.trials).collect();
    let results: Vec<_> = pool.install(|| trials.par_iter().map(trial).collect::<Result<Vec<_>, _>>())?;

    let ours_costs: Vec<CostPoint> = results.iter().map(|r| r.0).collect();
    let base_costs: Vec<CostPoint> = results.iter().map(|r| r.1).collect();
    let wins = ours_costs
        .iter()
        .zip(&base_costs)
        .filter(|(o, b)| o.distance <= b.distance)
        .count();
    Ok(ComparisonStats {
        trials: config.trials,
        seed: config.seed,
        ours: stats(&ours_costs, results[0].2.clone()),
        baseline: stats(&base_costs, results[0].3.clone()),
        win_rate: wins as f64 / config.trials as f64,
    })
}

fn stats(costs: &[CostPoint], placement: Placement) -> MethodStats {
    let distances: Vec<f64> = costs.iter().map(|c| c.distance).collect();
    MethodStats {
        placement,
        mean_distance: mean(&distances),
        std_distance: sample_std(&distances),
        mean_time: mean(&costs.iter().map(|c| c.time_seconds).collect::<Vec<_>>()),
        mean_memory_bytes: mean(&costs.iter().map(|c| c.memory_bytes()).collect::<Vec<_>>()),
    }
}

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Standard deviation with the `n - 1` denominator.
pub fn sample_std(xs: &[f64]) -> Option<f64> {
    if xs.len() < 2 {
        return None;
    }
    let m = mean(xs);
    let ss: f64 = xs.iter().map(|x| (x - m) * (x - m)).sum();
    Some((ss / (xs.len() - 1) as f64).sqrt())
}
