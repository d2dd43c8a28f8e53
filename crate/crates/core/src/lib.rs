//! Placement of robot algorithms on edge, fog and cloud nodes, trading
//! robot memory against response time.

pub mod baseline;
pub mod comm;
pub mod error;
pub mod fixtures;
pub mod lattice;
pub mod memory;
pub mod model;
pub mod optimizer;
pub mod sim;
pub mod time;
pub mod validate;

pub use baseline::{baseline_end_time, baseline_overall, solve_baseline, solve_baseline_bruteforce};
pub use comm::{resolve_comm, CommGraph, DelayMode, HopTable, LinkTimes};
pub use error::{CommError, LatticeError, ModelError, SolveError};
pub use lattice::{all_flows, build_semilattice, connected_components, layer, Dag, ExecutionFlow, Layering, SemiLattice, DEFAULT_FLOW_CAP};
pub use memory::{
    classify_boundedness, combine_memory, location_memory, robot_memory, step_partition_for, Bits, Boundedness,
    BoundednessVerdict, MemoryTriple, StepPartition,
};
pub use model::{
    parse_problem, serialize_problem, AlgorithmSpec, DelaySpec, ExecTime, Link, LocationNode, MemoryProfile,
    MemoryRegion, Options, ProblemInstance, Tier, TimeAggregate,
};
pub use optimizer::{
    evaluate, pareto_front, solve_branch_bound, solve_bruteforce, AllocationResult, CostPoint, Model, Objective,
    ObjectiveKind, DEFAULT_ENUMERATION_CAP,
};
pub use sim::{monte_carlo_compare, random_instance, scaling_benchmark, ComparisonStats, MonteCarloConfig, RandomParams};
pub use time::{combine_time, flow_time, overall_time, response_time, FlowTiming, Placement, Relation};
pub use validate::{validate, ValidationReport, Violation};

/// Flow-enumeration cap, overridable through `ALLOCFLOW_FLOW_CAP`.
pub fn flow_cap_from_env() -> u64 {
    std::env::var("ALLOCFLOW_FLOW_CAP")
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(DEFAULT_FLOW_CAP)
}
