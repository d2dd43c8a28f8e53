//! Placement search: exhaustive enumeration, branch-and-bound and the
//! memory/time scatter.

mod model;
mod pareto;
pub(crate) mod search;

use serde::{Deserialize, Serialize};

use crate::comm::HopTable;
use crate::error::SolveError;
use crate::memory::Bits;
use crate::model::{ProblemInstance, TimeAggregate};
use crate::time::{FlowTiming, Placement};

pub use model::{Assignment, Model};
pub use pareto::{pareto_front, pareto_mask, ParetoPoint, ParetoScatter};
pub use search::{partial_bound, solve_branch_bound, solve_bruteforce, PartialBound};

/// Default limit on exhaustive enumeration.
pub const DEFAULT_ENUMERATION_CAP: u64 = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ObjectiveKind {
    #[default]
    Distance,
    TimeMax,
    TimeTotal,
    Memory,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Objective {
    pub kind: ObjectiveKind,
    pub memory_weight: f64,
    pub time_weight: f64,
    /// Aggregate used for the time coordinate.
    pub aggregate: TimeAggregate,
}

impl Objective {
    pub fn new(kind: ObjectiveKind, instance: &ProblemInstance) -> Self {
        let o = &instance.options;
        let aggregate = match kind {
            ObjectiveKind::TimeMax => TimeAggregate::MaxFlow,
            ObjectiveKind::TimeTotal => TimeAggregate::TotalFlows,
            ObjectiveKind::Distance | ObjectiveKind::Memory => o.time_aggregate,
        };
        Objective {
            kind,
            memory_weight: o.memory_weight,
            time_weight: o.time_weight,
            aggregate,
        }
    }

    /// Distance to the origin, the instance default.
    pub fn distance(instance: &ProblemInstance) -> Self {
        Self::new(ObjectiveKind::Distance, instance)
    }

    pub fn distance_of(&self, memory: Bits, time_seconds: f64) -> f64 {
        let m = self.memory_weight * memory.megabytes();
        let t = self.time_weight * time_seconds;
        (m * m + t * t).sqrt()
    }

    /// The scalar being minimized.
    pub fn primary(&self, memory: Bits, time_seconds: f64) -> f64 {
        match self.kind {
            ObjectiveKind::Distance => self.distance_of(memory, time_seconds),
            ObjectiveKind::TimeMax | ObjectiveKind::TimeTotal => time_seconds,
            ObjectiveKind::Memory => memory.megabytes(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CostPoint {
    pub memory_bits: u64,
    pub time_seconds: f64,
    pub distance: f64,
}

impl CostPoint {
    pub fn memory(&self) -> Bits {
        Bits(self.memory_bits)
    }

    pub fn memory_bytes(&self) -> f64 {
        self.memory().bytes()
    }

    pub fn memory_mb(&self) -> f64 {
        self.memory().megabytes()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct AllocationResult {
    pub placement: Placement,
    pub cost: CostPoint,
    pub per_flow: Vec<FlowTiming>,
    pub explored_nodes: u64,
    pub optimal: bool,
}

/// Ours or the completion-time baseline.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum Criterion {
    Ours(Objective),
    Baseline,
}

impl Criterion {
    pub(crate) fn include_return(&self) -> bool {
        matches!(self, Criterion::Ours(_))
    }

    pub(crate) fn aggregate(&self) -> TimeAggregate {
        match self {
            Criterion::Ours(o) => o.aggregate,
            Criterion::Baseline => TimeAggregate::MaxFlow,
        }
    }

    pub(crate) fn uses_memory(&self) -> bool {
        matches!(self, Criterion::Ours(_))
    }

    pub(crate) fn primary(&self, memory: Bits, time_seconds: f64) -> f64 {
        match self {
            Criterion::Ours(o) => o.primary(memory, time_seconds),
            Criterion::Baseline => time_seconds,
        }
    }
}

/// Primary costs closer than 1e-9 count as ties.
pub(crate) fn quantize(x: f64) -> i64 {
    if x.is_nan() || x == f64::INFINITY {
        i64::MAX
    } else {
        let q = (x * 1e9).round();
        if q >= i64::MAX as f64 { i64::MAX } else { q as i64 }
    }
}

/// Quantized lower bound. The slack absorbs rounding differences between
/// the bound and the exact cost, so `quantize_bound(lb) <= quantize(c)`
/// whenever `lb <= c` in exact arithmetic, while exact ties stay ties.
pub(crate) fn quantize_bound(lb: f64) -> i64 {
    if lb.is_nan() || lb == f64::INFINITY {
        return i64::MAX;
    }
    quantize(lb - 1e-13 - lb.abs() * 1e-13)
}

/// Total order used to pick among placements: primary cost, then robot
/// memory, then the number of distinct nodes used, then the node digits.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub(crate) struct SearchKey {
    pub primary: i64,
    pub memory: u64,
    pub nodes_used: u32,
    pub digits: Vec<u32>,
}

impl Model {
    pub(crate) fn key(&self, criterion: &Criterion, assign: &[usize], hops: &HopTable) -> (SearchKey, CostPoint) {
        let memory = self.robot_memory(assign);
        let time = self.overall_time(assign, hops, criterion.aggregate(), criterion.include_return());
        let distance = match criterion {
            Criterion::Ours(o) => o.distance_of(memory, time),
            Criterion::Baseline => Objective::distance(self.instance()).distance_of(memory, time),
        };
        let key = SearchKey {
            primary: quantize(criterion.primary(memory, time)),
            memory: if criterion.uses_memory() { memory.0 } else { 0 },
            nodes_used: self.nodes_used(assign),
            digits: assign.iter().map(|&n| self.node_rank(n)).collect(),
        };
        (
            key,
            CostPoint {
                memory_bits: memory.0,
                time_seconds: time,
                distance,
            },
        )
    }

    pub(crate) fn result(&self, criterion: &Criterion, assign: &[usize], explored: u64, optimal: bool) -> AllocationResult {
        let (_, cost) = self.key(criterion, assign, self.hops());
        AllocationResult {
            placement: self.placement(assign),
            cost,
            per_flow: self.flow_timings(assign, self.hops(), criterion.include_return()),
            explored_nodes: explored,
            optimal,
        }
    }
}

/// Cost of a given placement under expected delays.
pub fn evaluate(model: &Model, placement: &Placement, objective: &Objective) -> Result<CostPoint, SolveError> {
    let assign = model.assignment(placement)?;
    Ok(model.key(&Criterion::Ours(*objective), &assign, model.hops()).1)
}

/// Cost of a placement under a specific hop realization.
pub fn evaluate_with(model: &Model, assign: &[usize], objective: &Objective, hops: &HopTable) -> CostPoint {
    model.key(&Criterion::Ours(*objective), assign, hops).1
}
