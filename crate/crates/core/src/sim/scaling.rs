//! Solver run time against instance size, with a log-log fit.

use std::time::{Duration, Instant};

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::generate::{random_instance, RandomParams};
use crate::error::SolveError;
use crate::lattice::DEFAULT_FLOW_CAP;
use crate::model::ProblemInstance;
use crate::optimizer::{solve_branch_bound, Model, Objective};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScalingPoint {
    pub n: usize,
    pub mean_seconds: f64,
    pub mean_explored: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LogLogFit {
    pub slope: f64,
    pub intercept: f64,
    /// Absent when the fit is degenerate.
    pub r2: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalingReport {
    pub points: Vec<ScalingPoint>,
    pub fit: Option<LogLogFit>,
}

/// Ordinary least squares of `ln y` on `ln x`.
pub fn fit_loglog(xy: &[(f64, f64)]) -> Option<LogLogFit> {
    let pts: Vec<(f64, f64)> = xy.iter().map(|&(x, y)| (x.ln(), y.ln())).collect();
    let n = pts.len() as f64;
    if pts.len() < 2 {
        return None;
    }
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = pts.iter().map(|p| (p.1 - my) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return None;
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r2 = if syy == 0.0 {
        None
    } else {
        let sse: f64 = pts.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum();
        Some(1.0 - sse / syy)
    };
    Some(LogLogFit { slope, intercept, r2 })
}

fn instance_seed(seed: u64, n: usize, rep: u32) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((n as u64) << 32) | rep as u64);
    rng.next_u64()
}

/// Each solve is repeated until this much time has passed, and the mean
/// over the repetitions is recorded.
const MIN_SAMPLE: Duration = Duration::from_millis(5);

fn timed_solve(inst: &ProblemInstance) -> Result<(f64, u64), SolveError> {
    let start = Instant::now();
    let mut iterations = 0u32;
    let mut explored;
    loop {
        let model = Model::new(inst, DEFAULT_FLOW_CAP)?;
        explored = solve_branch_bound(&model, &Objective::distance(inst), None)?.explored_nodes;
        iterations += 1;
        if start.elapsed() >= MIN_SAMPLE {
            break;
        }
    }
    Ok((start.elapsed().as_secs_f64() / iterations as f64, explored))
}

/// Mean branch-and-bound time (including model compilation) over `reps`
/// random instances per size.
pub fn scaling_benchmark(sizes: &[usize], reps: u32, seed: u64, params: &RandomParams) -> Result<ScalingReport, SolveError> {
    if sizes.is_empty() || reps == 0 {
        return Err(SolveError::Invalid("sizes must be non-empty and reps positive".into()));
    }
    timed_solve(&random_instance(sizes[0], params, seed))?;
    let mut points = Vec::with_capacity(sizes.len());
    for &n in sizes {
        let mut seconds = 0.0;
        let mut explored = 0.0;
        for rep in 0..reps {
            let (s, e) = timed_solve(&random_instance(n, params, instance_seed(seed, n, rep)))?;
            seconds += s;
            explored += e as f64;
        }
        points.push(ScalingPoint {
            n,
            mean_seconds: seconds / reps as f64,
            mean_explored: explored / reps as f64,
        });
    }
    let xy: Vec<(f64, f64)> = points.iter().map(|p| (p.n as f64, p.mean_seconds)).collect();
    Ok(ScalingReport {
        fit: fit_loglog(&xy),
        points,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_power_law_is_recovered() {
        let xy: Vec<(f64, f64)> = [4.0, 6.0, 8.0, 12.0, 20.0].iter().map(|&n: &f64| (n, 0.003 * n.powf(2.5))).collect();
        let fit = fit_loglog(&xy).unwrap();
        assert!((fit.slope - 2.5).abs() < 1e-9);
        assert!((fit.intercept - 0.003f64.ln()).abs() < 1e-9);
        assert!((fit.r2.unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn single_size_has_no_fit() {
        assert_eq!(fit_loglog(&[(4.0, 1.0)]), None);
        let r = scaling_benchmark(&[3], 1, 1, &RandomParams::default()).unwrap();
        assert!(r.fit.is_none());
    }
}
