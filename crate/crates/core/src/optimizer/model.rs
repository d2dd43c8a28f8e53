//! Index-based form of an instance used by every solver.

use crate::comm::{CommGraph, HopTable, LinkTimes};
use crate::error::SolveError;
use crate::lattice::{all_flows, layer, Dag, ExecutionFlow, Layering};
use crate::memory::{classify_all, effective_locations, step_partition, Bits, BoundednessVerdict, StepPartition};
use crate::model::{ProblemInstance, Tier, TimeAggregate};
use crate::time::{combine_time, region_bits, FlowTiming, Placement, Relation, Segment, SegmentKind};
use crate::validate::validate;

/// Node index per algorithm, in declaration order.
pub type Assignment = Vec<usize>;

#[derive(Debug, Clone)]
pub struct Model {
    instance: ProblemInstance,
    /// Node indices in tie-breaking order: cloud nodes, fog nodes, edge.
    node_order: Vec<usize>,
    node_rank: Vec<u32>,
    edge: usize,
    allowed: Vec<Vec<usize>>,
    exec: Vec<Vec<f64>>,
    flows: Vec<Vec<usize>>,
    flow_ids: Vec<ExecutionFlow>,
    flows_of: Vec<Vec<(usize, usize)>>,
    in_class: Vec<usize>,
    out_class: Vec<usize>,
    graph: CommGraph,
    hops: HopTable,
    region_size: Vec<u64>,
    shared_regions: Vec<Vec<usize>>,
    is_output: Vec<bool>,
    outputs_bits: u64,
    processing: Vec<u64>,
    verdicts: Vec<BoundednessVerdict>,
    partition: StepPartition,
    layering: Layering,
    branch_order: Vec<usize>,
}

impl Model {
    /// Validates and compiles an instance.
    pub fn new(instance: &ProblemInstance, flow_cap: u64) -> Result<Self, SolveError> {
        let report = validate(instance);
        if !report.is_empty() {
            return Err(SolveError::Invalid(report.to_string()));
        }
        let n_nodes = instance.nodes.len();
        let mut node_order: Vec<usize> = (0..n_nodes).collect();
        let tier_rank = |t: Tier| match t {
            Tier::Cloud => 0,
            Tier::Fog => 1,
            Tier::Edge => 2,
        };
        node_order.sort_by(|&a, &b| {
            let (na, nb) = (&instance.nodes[a], &instance.nodes[b]);
            tier_rank(na.tier).cmp(&tier_rank(nb.tier)).then_with(|| na.id.cmp(&nb.id))
        });
        let mut node_rank = vec![0u32; n_nodes];
        for (r, &n) in node_order.iter().enumerate() {
            node_rank[n] = r as u32;
        }
        let edge = instance
            .edge_node()
            .and_then(|e| instance.node_index(&e.id))
            .unwrap_or(0);

        let verdicts = classify_all(instance);
        let mut allowed = Vec::with_capacity(instance.algorithms.len());
        let mut exec = Vec::with_capacity(instance.algorithms.len());
        for (alg, verdict) in instance.algorithms.iter().zip(&verdicts) {
            let mut locs: Vec<usize> = effective_locations(instance, alg, verdict)
                .iter()
                .filter_map(|id| instance.node_index(id))
                .collect();
            locs.sort_by_key(|&n| node_rank[n]);
            allowed.push(locs);
            exec.push(
                instance
                    .nodes
                    .iter()
                    .map(|n| alg.exec_time.at(n).unwrap_or(f64::NAN))
                    .collect(),
            );
        }

        let dag = Dag::from_instance(instance);
        let flow_ids = all_flows(&dag, flow_cap)?;
        let flows: Vec<Vec<usize>> = flow_ids
            .iter()
            .map(|f| f.ids().iter().map(|id| dag.index_of(id).expect("flow member")).collect())
            .collect();
        let mut flows_of = vec![Vec::new(); instance.algorithms.len()];
        for (fi, flow) in flows.iter().enumerate() {
            for (pos, &a) in flow.iter().enumerate() {
                flows_of[a].push((fi, pos));
            }
        }

        let in_bits: Vec<u64> = instance.algorithms.iter().map(|a| region_bits(instance, &a.memory.inputs)).collect();
        let out_bits: Vec<u64> = instance.algorithms.iter().map(|a| region_bits(instance, &a.memory.outputs)).collect();
        let mut payloads: Vec<u64> = in_bits.iter().chain(&out_bits).copied().collect();
        payloads.push(0);
        payloads.sort_unstable();
        payloads.dedup();
        let class = |bits: u64| payloads.binary_search(&bits).expect("payload class");
        let in_class = in_bits.iter().map(|&b| class(b)).collect();
        let out_class = out_bits.iter().map(|&b| class(b)).collect();

        let graph = CommGraph::new(instance);
        let hops = HopTable::build(&graph, payloads.clone(), &LinkTimes::mean(graph.links()));

        let region_size: Vec<u64> = instance.regions.iter().map(|r| r.size_bits).collect();
        let mut is_output = vec![false; region_size.len()];
        for a in &instance.algorithms {
            for r in &a.memory.outputs {
                if let Some(i) = instance.region_index(r) {
                    is_output[i] = true;
                }
            }
        }
        let outputs_bits = region_size
            .iter()
            .zip(&is_output)
            .filter(|(_, &o)| o)
            .map(|(&s, _)| s)
            .sum();
        let shared_regions = instance
            .algorithms
            .iter()
            .map(|a| {
                let mut v: Vec<usize> = a
                    .memory
                    .inputs
                    .iter()
                    .chain(&a.memory.outputs)
                    .filter_map(|r| instance.region_index(r))
                    .collect();
                v.sort_unstable();
                v.dedup();
                v
            })
            .collect();
        let processing = instance.algorithms.iter().map(|a| a.memory.processing_bits).collect();

        let ranks: Vec<u32> = instance.algorithms.iter().map(|a| a.space_rank).collect();
        let partition = step_partition(&flow_ids, &dag, &ranks)?;
        let layering = layer(&dag)?;
        let mut branch_order = Vec::with_capacity(dag.len());
        for l in &layering.layers {
            for id in l {
                branch_order.push(dag.index_of(id).expect("layer member"));
            }
        }

        Ok(Model {
            instance: instance.clone(),
            node_order,
            node_rank,
            edge,
            allowed,
            exec,
            flows,
            flow_ids,
            flows_of,
            in_class,
            out_class,
            graph,
            hops,
            region_size,
            shared_regions,
            is_output,
            outputs_bits,
            processing,
            verdicts,
            partition,
            layering,
            branch_order,
        })
    }

    pub fn instance(&self) -> &ProblemInstance {
        &self.instance
    }

    pub fn algorithm_count(&self) -> usize {
        self.allowed.len()
    }

    pub fn edge(&self) -> usize {
        self.edge
    }

    pub fn node_order(&self) -> &[usize] {
        &self.node_order
    }

    /// Position of `node` in the tie-breaking order.
    pub fn node_rank(&self, node: usize) -> u32 {
        self.node_rank[node]
    }

    /// Admissible nodes of algorithm `a`, in tie-breaking order.
    pub fn allowed(&self, a: usize) -> &[usize] {
        &self.allowed[a]
    }

    pub fn exec(&self, a: usize, node: usize) -> f64 {
        self.exec[a][node]
    }

    pub fn flows(&self) -> &[Vec<usize>] {
        &self.flows
    }

    pub fn flow_ids(&self) -> &[ExecutionFlow] {
        &self.flow_ids
    }

    pub(crate) fn flows_of(&self, a: usize) -> &[(usize, usize)] {
        &self.flows_of[a]
    }

    pub fn verdicts(&self) -> &[BoundednessVerdict] {
        &self.verdicts
    }

    pub fn partition(&self) -> &StepPartition {
        &self.partition
    }

    pub fn layering(&self) -> &Layering {
        &self.layering
    }

    /// Algorithms in layer order; every flow is assigned front to back.
    pub fn branch_order(&self) -> &[usize] {
        &self.branch_order
    }

    pub fn hops(&self) -> &HopTable {
        &self.hops
    }

    pub fn graph(&self) -> &CommGraph {
        &self.graph
    }

    /// Hop costs for a given realization of link times.
    pub fn hops_for(&self, times: &LinkTimes) -> HopTable {
        self.hops.realized(self.graph.links(), times)
    }

    /// Copy of the model whose expected costs are replaced by `times`.
    pub fn with_link_times(&self, times: &LinkTimes) -> Model {
        let mut m = self.clone();
        m.hops = self.hops_for(times);
        m
    }

    /// Payload class of the hop that enters position `pos` of flow `f`.
    #[inline]
    pub(crate) fn entry_class(&self, f: usize, pos: usize) -> usize {
        let flow = &self.flows[f];
        if pos == 0 {
            self.in_class[flow[0]]
        } else {
            self.out_class[flow[pos - 1]]
        }
    }

    #[inline]
    pub(crate) fn return_class(&self, f: usize) -> usize {
        self.out_class[*self.flows[f].last().expect("flows are non-empty")]
    }

    pub fn placement(&self, assign: &[usize]) -> Placement {
        Placement(
            self.instance
                .algorithms
                .iter()
                .zip(assign)
                .map(|(a, &n)| (a.id.clone(), self.instance.nodes[n].id.clone()))
                .collect(),
        )
    }

    /// Resolves a placement and checks it against the admissible locations.
    pub fn assignment(&self, placement: &Placement) -> Result<Assignment, SolveError> {
        let mut assign = Vec::with_capacity(self.algorithm_count());
        for (a, alg) in self.instance.algorithms.iter().enumerate() {
            let node_id = placement
                .get(&alg.id)
                .ok_or_else(|| SolveError::Infeasible(format!("`{}` is not placed", alg.id)))?;
            let n = self
                .instance
                .node_index(node_id)
                .ok_or_else(|| SolveError::Infeasible(format!("unknown node `{node_id}`")))?;
            if !self.allowed[a].contains(&n) {
                return Err(SolveError::Infeasible(format!(
                    "`{}` may not run on `{node_id}`",
                    alg.id
                )));
            }
            assign.push(n);
        }
        if placement.0.len() != assign.len() {
            let extra = placement
                .0
                .keys()
                .find(|k| self.instance.algorithm_index(k).is_none())
                .cloned()
                .unwrap_or_default();
            return Err(SolveError::Infeasible(format!("unknown algorithm `{extra}` in placement")));
        }
        Ok(assign)
    }

    /// Segments of flow `f`, summed front to back.
    pub fn flow_segments(&self, f: usize, assign: &[usize], hops: &HopTable, include_return: bool) -> Vec<Segment> {
        let flow = &self.flows[f];
        let mut out = Vec::with_capacity(2 * flow.len() + 1);
        let mut prev = self.edge;
        for (pos, &a) in flow.iter().enumerate() {
            let n = assign[a];
            out.push(Segment {
                kind: if pos == 0 { SegmentKind::RequestHop } else { SegmentKind::InterHop },
                seconds: hops.cost(self.entry_class(f, pos), prev, n),
            });
            out.push(Segment {
                kind: SegmentKind::Exec,
                seconds: self.exec[a][n],
            });
            prev = n;
        }
        if include_return {
            out.push(Segment {
                kind: SegmentKind::ReturnHop,
                seconds: hops.cost(self.return_class(f), prev, self.edge),
            });
        }
        out
    }

    pub fn flow_total(&self, f: usize, assign: &[usize], hops: &HopTable, include_return: bool) -> f64 {
        let flow = &self.flows[f];
        let mut t = 0.0;
        let mut prev = self.edge;
        for (pos, &a) in flow.iter().enumerate() {
            let n = assign[a];
            t = combine_time(t, hops.cost(self.entry_class(f, pos), prev, n), Relation::Serial);
            t = combine_time(t, self.exec[a][n], Relation::Serial);
            prev = n;
        }
        if include_return {
            t = combine_time(t, hops.cost(self.return_class(f), prev, self.edge), Relation::Serial);
        }
        t
    }

    pub fn flow_timings(&self, assign: &[usize], hops: &HopTable, include_return: bool) -> Vec<FlowTiming> {
        (0..self.flows.len())
            .map(|f| {
                let breakdown = self.flow_segments(f, assign, hops, include_return);
                let total_seconds = breakdown
                    .iter()
                    .fold(0.0, |acc, s| combine_time(acc, s.seconds, Relation::Serial));
                FlowTiming {
                    flow: self.flow_ids[f].clone(),
                    total_seconds,
                    breakdown,
                }
            })
            .collect()
    }

    pub fn overall_time(&self, assign: &[usize], hops: &HopTable, aggregate: TimeAggregate, include_return: bool) -> f64 {
        let totals: Vec<f64> = (0..self.flows.len())
            .map(|f| self.flow_total(f, assign, hops, include_return))
            .collect();
        crate::time::overall_time(&totals, aggregate)
    }

    /// Robot memory: all outputs, plus edge-resident inputs and processing.
    pub fn robot_memory(&self, assign: &[usize]) -> Bits {
        let mut seen = self.is_output.clone();
        let mut bits = self.outputs_bits;
        for (a, &n) in assign.iter().enumerate() {
            if n != self.edge {
                continue;
            }
            bits += self.processing[a];
            for &r in &self.shared_regions[a] {
                if !seen[r] {
                    seen[r] = true;
                    bits += self.region_size[r];
                }
            }
        }
        Bits(bits)
    }

    pub(crate) fn outputs_bits(&self) -> u64 {
        self.outputs_bits
    }

    pub(crate) fn processing_bits(&self, a: usize) -> u64 {
        self.processing[a]
    }

    pub(crate) fn shared_regions(&self, a: usize) -> &[usize] {
        &self.shared_regions[a]
    }

    pub(crate) fn region_size(&self, r: usize) -> u64 {
        self.region_size[r]
    }

    pub(crate) fn is_output(&self, r: usize) -> bool {
        self.is_output[r]
    }

    pub(crate) fn region_count(&self) -> usize {
        self.region_size.len()
    }

    /// Number of complete placements.
    pub fn placement_count(&self) -> u128 {
        self.allowed
            .iter()
            .fold(1u128, |acc, a| acc.saturating_mul(a.len() as u128))
    }

    /// Decodes a lexicographic index (first algorithm most significant).
    pub fn assignment_at(&self, mut index: u128) -> Assignment {
        let mut assign = vec![0; self.algorithm_count()];
        for a in (0..self.algorithm_count()).rev() {
            let k = self.allowed[a].len() as u128;
            assign[a] = self.allowed[a][(index % k) as usize];
            index /= k;
        }
        assign
    }

    /// Inverse of [`Model::assignment_at`].
    pub fn lex_index(&self, assign: &[usize]) -> u128 {
        assign.iter().enumerate().fold(0u128, |acc, (a, &n)| {
            let digit = self.allowed[a].iter().position(|&x| x == n).unwrap_or(0) as u128;
            acc * self.allowed[a].len() as u128 + digit
        })
    }

    /// Distinct nodes hosting at least one algorithm.
    pub fn nodes_used(&self, assign: &[usize]) -> u32 {
        let mut used = vec![false; self.instance.nodes.len()];
        assign.iter().for_each(|&n| used[n] = true);
        used.iter().filter(|&&u| u).count() as u32
    }
}
