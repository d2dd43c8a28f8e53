//! Completion-time baseline: minimizes the largest flow completion time at
//! the executing node, ignoring memory and the final hop to the robot.

use crate::error::SolveError;
use crate::optimizer::search::{branch_bound, bruteforce};
use crate::optimizer::{AllocationResult, Criterion, Model};
use crate::time::Placement;

/// Baseline placement. `cost.time_seconds` is its end time.
pub fn solve_baseline(model: &Model) -> Result<AllocationResult, SolveError> {
    branch_bound(model, Criterion::Baseline, None)
}

/// Exhaustive form of [`solve_baseline`], for cross-checking.
pub fn solve_baseline_bruteforce(model: &Model, cap: u64, threads: usize) -> Result<AllocationResult, SolveError> {
    bruteforce(model, Criterion::Baseline, cap, threads)
}

/// Round-trip time of a placement under the instance aggregate, including
/// the final hop back to the robot.
pub fn baseline_overall(model: &Model, placement: &Placement) -> Result<f64, SolveError> {
    let assign = model.assignment(placement)?;
    Ok(model.overall_time(&assign, model.hops(), model.instance().options.time_aggregate, true))
}

/// End time of a placement as the baseline sees it.
pub fn baseline_end_time(model: &Model, placement: &Placement) -> Result<f64, SolveError> {
    let assign = model.assignment(placement)?;
    Ok(model.overall_time(&assign, model.hops(), crate::model::TimeAggregate::MaxFlow, false))
}
