use std::cmp::Ordering;

use rayon::prelude::*;

use super::{quantize_bound, AllocationResult, Criterion, Model, Objective, SearchKey};
use crate::error::SolveError;
use crate::memory::Bits;
use crate::model::TimeAggregate;
use crate::time::Placement;

const UNSET: usize = usize::MAX;
const CHUNK: u128 = 4096;

/// Exhaustive search over every admissible placement.
pub fn solve_bruteforce(model: &Model, objective: &Objective, cap: u64, threads: usize) -> Result<AllocationResult, SolveError> {
    bruteforce(model, Criterion::Ours(*objective), cap, threads)
}

pub(crate) fn bruteforce(model: &Model, criterion: Criterion, cap: u64, threads: usize) -> Result<AllocationResult, SolveError> {
    let total = model.placement_count();
    if total > cap as u128 {
        return Err(SolveError::CapExceeded { count: total, cap });
    }
    let chunks: Vec<u128> = (0..total.div_ceil(CHUNK)).collect();
    let scan = |c: &u128| -> (SearchKey, Vec<usize>) {
        let start = c * CHUNK;
        let end = (start + CHUNK).min(total);
        let mut assign = model.assignment_at(start);
        let mut best = model.key(&criterion, &assign, model.hops()).0;
        let mut best_assign = assign.clone();
        for _ in start + 1..end {
            advance(model, &mut assign);
            let key = model.key(&criterion, &assign, model.hops()).0;
            if key < best {
                best = key;
                best_assign.clone_from(&assign);
            }
        }
        (best, best_assign)
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build()
        .map_err(|e| SolveError::Invalid(format!("thread pool: {e}")))?;
    let best = pool.install(|| {
        chunks
            .par_iter()
            .map(scan)
            .reduce_with(|a, b| if b.0 < a.0 { b } else { a })
    });
    let (_, assign) = best.expect("at least one placement");
    Ok(model.result(&criterion, &assign, total as u64, true))
}

/// Next placement in lexicographic order; the last algorithm varies fastest.
pub(crate) fn advance(model: &Model, assign: &mut [usize]) {
    for a in (0..assign.len()).rev() {
        let allowed = model.allowed(a);
        let pos = allowed.iter().position(|&n| n == assign[a]).unwrap_or(0);
        if pos + 1 < allowed.len() {
            assign[a] = allowed[pos + 1];
            return;
        }
        assign[a] = allowed[0];
    }
}

/// Branch-and-bound over algorithms in layer order.
///
/// The incumbent starts from `initial_guess`, or from the all-robot
/// placement where admissible.
pub fn solve_branch_bound(
    model: &Model,
    objective: &Objective,
    initial_guess: Option<&Placement>,
) -> Result<AllocationResult, SolveError> {
    branch_bound(model, Criterion::Ours(*objective), initial_guess)
}

pub(crate) fn branch_bound(
    model: &Model,
    criterion: Criterion,
    initial_guess: Option<&Placement>,
) -> Result<AllocationResult, SolveError> {
    let guess = match initial_guess {
        Some(p) => model.assignment(p)?,
        None => default_guess(model),
    };
    let mut search = Search::new(model, criterion);
    let key = model.key(&criterion, &guess, model.hops()).0;
    search.best = Some((key, guess));
    search.descend(0);
    let (_, assign) = search.best.take().expect("incumbent");
    Ok(model.result(&criterion, &assign, search.explored, true))
}

fn default_guess(model: &Model) -> Vec<usize> {
    (0..model.algorithm_count())
        .map(|a| {
            let allowed = model.allowed(a);
            if allowed.contains(&model.edge()) {
                model.edge()
            } else {
                allowed[0]
            }
        })
        .collect()
}

/// Lower bounds for a partial placement.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PartialBound {
    pub time_seconds: f64,
    pub memory_bits: u64,
}

/// Bounds after placing `prefix[i]` on the i-th algorithm of the branching
/// order.
pub fn partial_bound(model: &Model, objective: &Objective, prefix: &[usize]) -> PartialBound {
    let mut search = Search::new(model, Criterion::Ours(*objective));
    for (depth, &n) in prefix.iter().enumerate() {
        search.apply(model.branch_order()[depth], n);
    }
    PartialBound {
        time_seconds: search.time_bound(),
        memory_bits: search.memory_bound(),
    }
}

struct Search<'a> {
    model: &'a Model,
    criterion: Criterion,
    /// `rest[f][pos][m]`: cheapest completion of flow `f` from position
    /// `pos` when the previous hop leaves node `m`.
    rest: Vec<Vec<Vec<f64>>>,
    assign: Vec<usize>,
    flow_len: Vec<usize>,
    flow_time: Vec<f64>,
    flow_last: Vec<usize>,
    region_refs: Vec<u32>,
    extra_bits: u64,
    edge_processing: u64,
    node_refs: Vec<u32>,
    used: u32,
    min_digit: Vec<u32>,
    undo: Vec<(usize, f64, usize)>,
    best: Option<(SearchKey, Vec<usize>)>,
    explored: u64,
}

impl<'a> Search<'a> {
    fn new(model: &'a Model, criterion: Criterion) -> Self {
        let nodes = model.instance().nodes.len();
        let hops = model.hops();
        let include_return = criterion.include_return();
        let rest = model
            .flows()
            .iter()
            .enumerate()
            .map(|(f, flow)| {
                let k = flow.len();
                let mut table = vec![vec![0.0; nodes]; k + 1];
                if include_return {
                    for (m, slot) in table[k].iter_mut().enumerate() {
                        *slot = hops.cost(model.return_class(f), m, model.edge());
                    }
                }
                for pos in (0..k).rev() {
                    let a = flow[pos];
                    let class = model.entry_class(f, pos);
                    for m in 0..nodes {
                        table[pos][m] = model
                            .allowed(a)
                            .iter()
                            .map(|&n| hops.cost(class, m, n) + model.exec(a, n) + table[pos + 1][n])
                            .fold(f64::INFINITY, f64::min);
                    }
                }
                table
            })
            .collect();
        let algs = model.algorithm_count();
        Search {
            model,
            criterion,
            rest,
            assign: vec![UNSET; algs],
            flow_len: vec![0; model.flows().len()],
            flow_time: vec![0.0; model.flows().len()],
            flow_last: vec![model.edge(); model.flows().len()],
            region_refs: vec![0; model.region_count()],
            extra_bits: 0,
            edge_processing: 0,
            node_refs: vec![0; nodes],
            used: 0,
            min_digit: (0..algs).map(|a| model.node_rank(model.allowed(a)[0])).collect(),
            undo: Vec::new(),
            best: None,
            explored: 0,
        }
    }

    fn apply(&mut self, a: usize, n: usize) {
        let m = self.model;
        self.assign[a] = n;
        for &(f, pos) in m.flows_of(a) {
            debug_assert_eq!(self.flow_len[f], pos);
            self.undo.push((f, self.flow_time[f], self.flow_last[f]));
            let hop = m.hops().cost(m.entry_class(f, pos), self.flow_last[f], n);
            self.flow_time[f] += hop;
            self.flow_time[f] += m.exec(a, n);
            self.flow_last[f] = n;
            self.flow_len[f] = pos + 1;
        }
        if n == m.edge() {
            self.edge_processing += m.processing_bits(a);
            for &r in m.shared_regions(a) {
                if !m.is_output(r) {
                    if self.region_refs[r] == 0 {
                        self.extra_bits += m.region_size(r);
                    }
                    self.region_refs[r] += 1;
                }
            }
        }
        if self.node_refs[n] == 0 {
            self.used += 1;
        }
        self.node_refs[n] += 1;
    }

    fn revert(&mut self, a: usize) {
        let m = self.model;
        let n = self.assign[a];
        for &(_, pos) in m.flows_of(a).iter().rev() {
            let (f, time, last) = self.undo.pop().expect("undo record");
            self.flow_time[f] = time;
            self.flow_last[f] = last;
            self.flow_len[f] = pos;
        }
        if n == m.edge() {
            self.edge_processing -= m.processing_bits(a);
            for &r in m.shared_regions(a) {
                if !m.is_output(r) {
                    self.region_refs[r] -= 1;
                    if self.region_refs[r] == 0 {
                        self.extra_bits -= m.region_size(r);
                    }
                }
            }
        }
        self.node_refs[n] -= 1;
        if self.node_refs[n] == 0 {
            self.used -= 1;
        }
        self.assign[a] = UNSET;
    }

    fn flow_bound(&self, f: usize) -> f64 {
        self.flow_time[f] + self.rest[f][self.flow_len[f]][self.flow_last[f]]
    }

    fn time_bound(&self) -> f64 {
        let flows = self.model.flows().len();
        if flows == 0 {
            return 0.0;
        }
        let bounds = (0..flows).map(|f| self.flow_bound(f));
        match self.criterion.aggregate() {
            TimeAggregate::MaxFlow => bounds.fold(0.0, f64::max),
            TimeAggregate::TotalFlows => bounds.sum(),
            TimeAggregate::MeanFlows => bounds.sum::<f64>() / flows as f64,
        }
    }

    fn memory_bound(&self) -> u64 {
        self.model.outputs_bits() + self.extra_bits + self.edge_processing
    }

    fn primary_bound(&self) -> f64 {
        self.criterion.primary(Bits(self.memory_bound()), self.time_bound())
    }

    fn pruned(&self, primary_lb: f64) -> bool {
        let Some((best, _)) = &self.best else {
            return false;
        };
        let q = quantize_bound(primary_lb);
        if q != best.primary {
            return q > best.primary;
        }
        let memory = if self.criterion.uses_memory() { self.memory_bound() } else { 0 };
        let digits: Vec<u32> = self
            .assign
            .iter()
            .enumerate()
            .map(|(a, &n)| if n == UNSET { self.min_digit[a] } else { self.model.node_rank(n) })
            .collect();
        (memory, self.used, digits).cmp(&(best.memory, best.nodes_used, best.digits.clone())) == Ordering::Greater
    }

    fn descend(&mut self, depth: usize) {
        self.explored += 1;
        let model = self.model;
        if depth == model.algorithm_count() {
            let (key, _) = model.key(&self.criterion, &self.assign, model.hops());
            if self.best.as_ref().is_none_or(|(b, _)| key < *b) {
                self.best = Some((key, self.assign.clone()));
            }
            return;
        }
        let a = model.branch_order()[depth];
        let mut children: Vec<(f64, usize)> = model
            .allowed(a)
            .iter()
            .map(|&n| {
                self.apply(a, n);
                let lb = self.primary_bound();
                self.revert(a);
                (lb, n)
            })
            .collect();
        children.sort_by(|x, y| x.0.total_cmp(&y.0));
        for (_, n) in children {
            self.apply(a, n);
            if !self.pruned(self.primary_bound()) {
                self.descend(depth + 1);
            }
            self.revert(a);
        }
    }
}
