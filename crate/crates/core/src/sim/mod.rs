//! Delay sampling, Monte-Carlo comparison, random instances and the
//! scaling benchmark.

pub mod compare;
pub mod delay;
pub mod generate;
pub mod scaling;

pub use compare::{monte_carlo_compare, ComparisonStats, MethodStats, MonteCarloConfig};
pub use delay::{folded_normal_mean, folded_normal_variance, sample_folded_normal};
pub use generate::{random_instance, RandomParams};
pub use scaling::{fit_loglog, scaling_benchmark, LogLogFit, ScalingPoint, ScalingReport};
