//! Memory triples and their serial/parallel algebra, step partitioning,
//! boundedness classification and per-location totals.
//!
//! Inputs and outputs are sets of shared regions, so a region read by two
//! algorithms is counted once. Processing memory is private to each
//! algorithm and modelled as a multiset of sized blocks; the disjoint union
//! adds sizes.

use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;

use crate::error::SolveError;
use crate::lattice::{Dag, ExecutionFlow};
use crate::model::{AlgorithmSpec, ProblemInstance, Tier};
use crate::time::{Placement, Relation};

/// A memory amount in bits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize)]
pub struct Bits(pub u64);

/// Bytes per megabyte for reporting (binary megabyte).
pub const BYTES_PER_MB: f64 = 1_048_576.0;

impl Bits {
    pub fn bytes(self) -> f64 {
        self.0 as f64 / 8.0
    }

    pub fn megabytes(self) -> f64 {
        self.bytes() / BYTES_PER_MB
    }
}

impl fmt::Display for Bits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} bytes", self.bytes())
    }
}

/// `(inputs, processing, outputs)` for one algorithm or a group of them.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct MemoryTriple {
    /// Region indices.
    pub inputs: BTreeSet<usize>,
    /// Sizes of private processing blocks.
    pub processing: Vec<u64>,
    /// Region indices.
    pub outputs: BTreeSet<usize>,
}

impl MemoryTriple {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn of(spec: &AlgorithmSpec, instance: &ProblemInstance) -> Self {
        let regions = |ids: &[String]| ids.iter().filter_map(|r| instance.region_index(r)).collect();
        MemoryTriple {
            inputs: regions(&spec.memory.inputs),
            processing: vec![spec.memory.processing_bits],
            outputs: regions(&spec.memory.outputs),
        }
    }

    pub fn processing_bits(&self) -> u64 {
        self.processing.iter().sum()
    }

    pub fn input_bits(&self, sizes: &[u64]) -> u64 {
        self.inputs.iter().map(|&r| sizes[r]).sum()
    }

    pub fn output_bits(&self, sizes: &[u64]) -> u64 {
        self.outputs.iter().map(|&r| sizes[r]).sum()
    }

    /// `|inputs ∪ outputs| + |processing|`.
    pub fn total_bits(&self, sizes: &[u64]) -> u64 {
        let shared: u64 = self.inputs.union(&self.outputs).map(|&r| sizes[r]).sum();
        shared + self.processing_bits()
    }
}

/// Memory of two algorithms running on one platform.
///
/// Parallel: union of inputs and outputs, disjoint union of processing.
/// Serial: union of inputs and outputs, processing of the larger operand
/// (left operand on ties).
pub fn combine_memory(m1: &MemoryTriple, m2: &MemoryTriple, relation: Relation) -> MemoryTriple {
    let inputs = m1.inputs.union(&m2.inputs).copied().collect();
    let outputs = m1.outputs.union(&m2.outputs).copied().collect();
    let processing = match relation {
        Relation::Parallel => m1.processing.iter().chain(&m2.processing).copied().collect(),
        Relation::Serial => {
            if m2.processing_bits() > m1.processing_bits() {
                m2.processing.clone()
            } else {
                m1.processing.clone()
            }
        }
    };
    MemoryTriple {
        inputs,
        processing,
        outputs,
    }
}

/// Steps `S_1..S_z` of mutually non-serial algorithms.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StepPartition {
    pub steps: Vec<Vec<String>>,
}

impl StepPartition {
    pub fn step_of(&self, id: &str) -> Option<usize> {
        self.steps.iter().position(|s| s.iter().any(|x| x == id))
    }
}

/// Groups algorithms by readiness and minimal space rank.
///
/// Each round looks at the first not-yet-removed algorithm of every flow
/// whose prerequisites are all removed, keeps those of minimal rank as the
/// next step and removes them.
pub fn step_partition(flows: &[ExecutionFlow], dag: &Dag, space_rank: &[u32]) -> Result<StepPartition, SolveError> {
    let flows: Vec<Vec<usize>> = flows
        .iter()
        .map(|f| f.ids().iter().filter_map(|id| dag.index_of(id)).collect())
        .collect();
    let mut removed = vec![false; dag.len()];
    let mut heads = vec![0usize; flows.len()];
    let mut left = dag.len();
    let mut steps = Vec::new();
    while left > 0 {
        let mut candidates = BTreeSet::new();
        for (f, flow) in flows.iter().enumerate() {
            while heads[f] < flow.len() && removed[flow[heads[f]]] {
                heads[f] += 1;
            }
            if let Some(&v) = flow.get(heads[f]) {
                if dag.predecessors(v).iter().all(|&p| removed[p]) {
                    candidates.insert(v);
                }
            }
        }
        let Some(min_rank) = candidates.iter().map(|&v| space_rank[v]).min() else {
            return Err(SolveError::PartitionStall { remaining: left });
        };
        let mut step: Vec<String> = candidates
            .into_iter()
            .filter(|&v| space_rank[v] == min_rank)
            .inspect(|&v| removed[v] = true)
            .map(|v| dag.id(v).to_string())
            .collect();
        left -= step.len();
        step.sort();
        steps.push(step);
    }
    Ok(StepPartition { steps })
}

/// Convenience wrapper reading ranks from the instance.
pub fn step_partition_for(instance: &ProblemInstance, flows: &[ExecutionFlow]) -> Result<StepPartition, SolveError> {
    let dag = Dag::from_instance(instance);
    let ranks: Vec<u32> = instance.algorithms.iter().map(|a| a.space_rank).collect();
    step_partition(flows, &dag, &ranks)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Restriction {
    Input,
    Processing,
    Output,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Boundedness {
    Bounded,
    Unbounded(Restriction),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BoundednessVerdict {
    pub algorithm: String,
    pub verdict: Boundedness,
}

/// Memory of each restriction at steps `1..=horizon`, growing linearly
/// from `base` and floored at zero.
pub fn step_memory(base: [u64; 3], growth: [i64; 3], horizon: u32) -> Vec<[u64; 3]> {
    (1..=horizon.max(1))
        .map(|s| {
            let mut m = [0u64; 3];
            for r in 0..3 {
                let v = base[r] as i128 + growth[r] as i128 * (s as i128 - 1);
                m[r] = v.clamp(0, u64::MAX as i128) as u64;
            }
            m
        })
        .collect()
}

fn base_memory(spec: &AlgorithmSpec, instance: Option<&ProblemInstance>) -> [u64; 3] {
    let Some(inst) = instance else {
        return [0, spec.memory.processing_bits, 0];
    };
    let size = |ids: &[String]| -> u64 {
        ids.iter()
            .filter_map(|r| inst.region_index(r))
            .map(|r| inst.regions[r].size_bits)
            .sum()
    };
    [size(&spec.memory.inputs), spec.memory.processing_bits, size(&spec.memory.outputs)]
}

/// Unbounded when any restriction keeps growing over the horizon; the
/// first growing restriction in input, processing, output order is reported.
pub fn classify_boundedness(spec: &AlgorithmSpec, horizon: u32) -> BoundednessVerdict {
    classify_with_base(spec, base_memory(spec, None), horizon)
}

pub(crate) fn classify_with_base(spec: &AlgorithmSpec, base: [u64; 3], horizon: u32) -> BoundednessVerdict {
    let series = step_memory(base, spec.memory.growth_per_step, horizon);
    let first = series[0];
    let restrictions = [Restriction::Input, Restriction::Processing, Restriction::Output];
    let mut verdict = Boundedness::Bounded;
    'outer: for (r, restriction) in restrictions.into_iter().enumerate() {
        let mut prev = first[r];
        for m in &series[1..] {
            if m[r] > prev {
                verdict = Boundedness::Unbounded(restriction);
                break 'outer;
            }
            prev = m[r];
        }
    }
    BoundednessVerdict {
        algorithm: spec.id.clone(),
        verdict,
    }
}

/// Verdicts for every algorithm of an instance, in declaration order.
pub fn classify_all(instance: &ProblemInstance) -> Vec<BoundednessVerdict> {
    let h = instance.options.boundedness_horizon;
    instance
        .algorithms
        .iter()
        .map(|a| classify_with_base(a, base_memory(a, Some(instance)), h))
        .collect()
}

/// Allowed node ids after forcing unbounded algorithms onto cloud nodes.
pub fn effective_locations(instance: &ProblemInstance, spec: &AlgorithmSpec, verdict: &BoundednessVerdict) -> Vec<String> {
    instance
        .nodes
        .iter()
        .filter(|n| spec.allows(&n.id))
        .filter(|n| verdict.verdict == Boundedness::Bounded || n.tier == Tier::Cloud)
        .map(|n| n.id.clone())
        .collect()
}

fn region_sizes(instance: &ProblemInstance) -> Vec<u64> {
    instance.regions.iter().map(|r| r.size_bits).collect()
}

/// Per-step groups `L_i` at `loc`, each folded with the parallel rule.
fn step_groups(instance: &ProblemInstance, placement: &Placement, partition: &StepPartition, loc: &str) -> Vec<MemoryTriple> {
    partition
        .steps
        .iter()
        .map(|step| {
            step.iter()
                .filter(|id| placement.get(id) == Some(loc))
                .filter_map(|id| instance.algorithm(id))
                .map(|a| MemoryTriple::of(a, instance))
                .fold(MemoryTriple::empty(), |acc, m| combine_memory(&acc, &m, Relation::Parallel))
        })
        .collect()
}

/// Memory needed at `loc`: `|∪ (in ∪ out)| + |⊍ processing|` over the steps.
///
/// With `peak`, the processing term is the largest single step instead of
/// the disjoint union over all steps.
pub fn location_memory(
    instance: &ProblemInstance,
    placement: &Placement,
    partition: &StepPartition,
    loc: &str,
    peak: bool,
) -> Bits {
    let groups = step_groups(instance, placement, partition, loc);
    location_total(instance, &groups, &BTreeSet::new(), peak)
}

fn location_total(instance: &ProblemInstance, groups: &[MemoryTriple], extra_shared: &BTreeSet<usize>, peak: bool) -> Bits {
    let sizes = region_sizes(instance);
    let mut shared: BTreeSet<usize> = extra_shared.clone();
    for g in groups {
        shared.extend(g.inputs.iter().chain(&g.outputs));
    }
    let shared_bits: u64 = shared.iter().map(|&r| sizes[r]).sum();
    let processing = if peak {
        groups.iter().map(MemoryTriple::processing_bits).max().unwrap_or(0)
    } else {
        groups.iter().map(MemoryTriple::processing_bits).sum()
    };
    Bits(shared_bits + processing)
}

/// Robot memory: the edge total with every algorithm's outputs added to the
/// shared term, wherever the algorithm runs.
pub fn robot_memory(instance: &ProblemInstance, placement: &Placement, partition: &StepPartition, peak: bool) -> Bits {
    let Some(edge) = instance.edge_node() else {
        return Bits(0);
    };
    let groups = step_groups(instance, placement, partition, &edge.id);
    let all_outputs: BTreeSet<usize> = instance
        .algorithms
        .iter()
        .flat_map(|a| a.memory.outputs.iter())
        .filter_map(|r| instance.region_index(r))
        .collect();
    location_total(instance, &groups, &all_outputs, peak)
}

/// Sum of the sizes of all distinct output regions.
pub fn all_outputs_bits(instance: &ProblemInstance) -> Bits {
    let set: BTreeSet<usize> = instance
        .algorithms
        .iter()
        .flat_map(|a| a.memory.outputs.iter())
        .filter_map(|r| instance.region_index(r))
        .collect();
    Bits(set.iter().map(|&r| instance.regions[r].size_bits).sum())
}
