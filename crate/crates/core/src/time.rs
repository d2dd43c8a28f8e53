//! Response times of execution flows under a placement, and the
//! serial/parallel time algebra.
//!
//! A flow starts with a request from the robot to the first algorithm's
//! node, passes intermediate results node to node, and ends when the last
//! result reaches the robot again.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::comm::{resolve_comm, DelayMode};
use crate::error::SolveError;
use crate::lattice::ExecutionFlow;
use crate::model::{AlgorithmSpec, ProblemInstance, TimeAggregate};

/// Mapping from algorithm id to location node id.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Placement(pub BTreeMap<String, String>);

impl Placement {
    pub fn get(&self, algorithm: &str) -> Option<&str> {
        self.0.get(algorithm).map(String::as_str)
    }

    pub fn insert(&mut self, algorithm: impl Into<String>, node: impl Into<String>) {
        self.0.insert(algorithm.into(), node.into());
    }

    /// Every algorithm of `instance` on `node`.
    pub fn uniform(instance: &ProblemInstance, node: &str) -> Self {
        Placement(
            instance
                .algorithms
                .iter()
                .map(|a| (a.id.clone(), node.to_string()))
                .collect(),
        )
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Serial,
    Parallel,
}

/// Serial composition adds, parallel composition takes the maximum.
pub fn combine_time(t1: f64, t2: f64, relation: Relation) -> f64 {
    match relation {
        Relation::Serial => t1 + t2,
        Relation::Parallel => t1.max(t2),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SegmentKind {
    RequestHop,
    Exec,
    InterHop,
    ReturnHop,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Segment {
    pub kind: SegmentKind,
    pub seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FlowTiming {
    pub flow: ExecutionFlow,
    pub total_seconds: f64,
    pub breakdown: Vec<Segment>,
}

impl FlowTiming {
    /// Sum of the segments of one kind.
    pub fn seconds_of(&self, kind: SegmentKind) -> f64 {
        self.breakdown
            .iter()
            .filter(|s| s.kind == kind)
            .fold(0.0, |acc, s| combine_time(acc, s.seconds, Relation::Serial))
    }
}

pub(crate) fn region_bits(instance: &ProblemInstance, ids: &[String]) -> u64 {
    ids.iter()
        .filter_map(|r| instance.region_index(r))
        .map(|r| instance.regions[r].size_bits)
        .sum()
}

fn exec_at(instance: &ProblemInstance, alg: &AlgorithmSpec, node: &str) -> Result<f64, SolveError> {
    let n = instance
        .node(node)
        .ok_or_else(|| SolveError::Infeasible(format!("unknown node `{node}` for `{}`", alg.id)))?;
    alg.exec_time
        .at(n)
        .ok_or_else(|| SolveError::Infeasible(format!("`{}` has no execution time on `{node}`", alg.id)))
}

/// Request hop, execution and result hop of a single algorithm.
pub fn response_time(
    instance: &ProblemInstance,
    alg: &AlgorithmSpec,
    at: &str,
    requester: &str,
    mode: DelayMode<'_>,
) -> Result<f64, SolveError> {
    let exec = exec_at(instance, alg, at)?;
    let input = region_bits(instance, &alg.memory.inputs);
    let output = region_bits(instance, &alg.memory.outputs);
    Ok(match mode {
        DelayMode::Mean => {
            let there = resolve_comm(instance, requester, at, input, DelayMode::Mean)?;
            let back = resolve_comm(instance, at, requester, output, DelayMode::Mean)?;
            combine_time(combine_time(there, exec, Relation::Serial), back, Relation::Serial)
        }
        DelayMode::Sample(rng) => {
            let there = resolve_comm(instance, requester, at, input, DelayMode::Sample(&mut *rng))?;
            let back = resolve_comm(instance, at, requester, output, DelayMode::Sample(rng))?;
            combine_time(combine_time(there, exec, Relation::Serial), back, Relation::Serial)
        }
    })
}

/// Timing of one flow. With `include_return == false` the final hop back
/// to the robot is left out (completion time at the executing node).
pub fn flow_time_with(
    instance: &ProblemInstance,
    flow: &ExecutionFlow,
    placement: &Placement,
    mut mode: DelayMode<'_>,
    include_return: bool,
) -> Result<FlowTiming, SolveError> {
    let edge = instance
        .edge_node()
        .ok_or_else(|| SolveError::Invalid("no edge-tier node".into()))?
        .id
        .clone();
    let mut breakdown = Vec::with_capacity(2 * flow.len() + 1);
    let hop = |from: &str, to: &str, bits: u64, mode: &mut DelayMode<'_>| -> Result<f64, SolveError> {
        Ok(match mode {
            DelayMode::Mean => resolve_comm(instance, from, to, bits, DelayMode::Mean)?,
            DelayMode::Sample(rng) => resolve_comm(instance, from, to, bits, DelayMode::Sample(&mut **rng))?,
        })
    };
    let mut prev_node = edge.clone();
    let mut prev_payload = 0;
    for (i, id) in flow.ids().iter().enumerate() {
        let alg = instance
            .algorithm(id)
            .ok_or_else(|| SolveError::Infeasible(format!("unknown algorithm `{id}` in flow")))?;
        let node = placement
            .get(id)
            .ok_or_else(|| SolveError::Infeasible(format!("`{id}` is not placed")))?;
        let (kind, payload) = if i == 0 {
            (SegmentKind::RequestHop, region_bits(instance, &alg.memory.inputs))
        } else {
            (SegmentKind::InterHop, prev_payload)
        };
        breakdown.push(Segment {
            kind,
            seconds: hop(&prev_node, node, payload, &mut mode)?,
        });
        breakdown.push(Segment {
            kind: SegmentKind::Exec,
            seconds: exec_at(instance, alg, node)?,
        });
        prev_node = node.to_string();
        prev_payload = region_bits(instance, &alg.memory.outputs);
    }
    if include_return && !flow.is_empty() {
        breakdown.push(Segment {
            kind: SegmentKind::ReturnHop,
            seconds: hop(&prev_node, &edge, prev_payload, &mut mode)?,
        });
    }
    let total_seconds = breakdown
        .iter()
        .fold(0.0, |acc, s| combine_time(acc, s.seconds, Relation::Serial));
    Ok(FlowTiming {
        flow: flow.clone(),
        total_seconds,
        breakdown,
    })
}

/// Round-trip timing of one flow.
pub fn flow_time(
    instance: &ProblemInstance,
    flow: &ExecutionFlow,
    placement: &Placement,
    mode: DelayMode<'_>,
) -> Result<FlowTiming, SolveError> {
    flow_time_with(instance, flow, placement, mode, true)
}

/// Aggregates flow totals; an empty set of flows takes zero time.
pub fn overall_time(totals: &[f64], aggregate: TimeAggregate) -> f64 {
    if totals.is_empty() {
        return 0.0;
    }
    match aggregate {
        TimeAggregate::MaxFlow => totals
            .iter()
            .fold(0.0, |acc, &t| combine_time(acc, t, Relation::Parallel)),
        TimeAggregate::TotalFlows => totals.iter().fold(0.0, |acc, &t| acc + t),
        TimeAggregate::MeanFlows => totals.iter().fold(0.0, |acc, &t| acc + t) / totals.len() as f64,
    }
}
