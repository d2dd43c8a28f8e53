//! Dependency graph structure: layering, weak components, the virtual
//! top/bottom augmentation and execution-flow enumeration.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::LatticeError;
use crate::model::ProblemInstance;

/// Default cap on the number of materialized execution flows.
pub const DEFAULT_FLOW_CAP: u64 = 1_000_000;

/// Directed graph over algorithm ids. Adjacency lists are sorted by id.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dag {
    ids: Vec<String>,
    succ: Vec<Vec<usize>>,
    pred: Vec<Vec<usize>>,
}

impl Dag {
    /// Builds a graph; edges naming unknown ids are ignored.
    pub fn new(ids: Vec<String>, edges: &[(String, String)]) -> Self {
        let index: BTreeMap<&str, usize> = ids.iter().enumerate().map(|(i, s)| (s.as_str(), i)).collect();
        let mut succ = vec![Vec::new(); ids.len()];
        let mut pred = vec![Vec::new(); ids.len()];
        for (a, b) in edges {
            if let (Some(&u), Some(&v)) = (index.get(a.as_str()), index.get(b.as_str())) {
                if !succ[u].contains(&v) {
                    succ[u].push(v);
                    pred[v].push(u);
                }
            }
        }
        for list in succ.iter_mut().chain(pred.iter_mut()) {
            list.sort_by(|&x, &y| ids[x].cmp(&ids[y]));
        }
        Dag { ids, succ, pred }
    }

    pub fn from_instance(instance: &ProblemInstance) -> Self {
        Dag::new(
            instance.algorithms.iter().map(|a| a.id.clone()).collect(),
            &instance.edges,
        )
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn id(&self, v: usize) -> &str {
        &self.ids[v]
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.ids.iter().position(|s| s == id)
    }

    pub fn successors(&self, v: usize) -> &[usize] {
        &self.succ[v]
    }

    pub fn predecessors(&self, v: usize) -> &[usize] {
        &self.pred[v]
    }

    pub fn in_degree(&self, v: usize) -> usize {
        self.pred[v].len()
    }

    pub fn out_degree(&self, v: usize) -> usize {
        self.succ[v].len()
    }

    pub fn edges(&self) -> Vec<(String, String)> {
        let mut out = Vec::new();
        for (u, list) in self.succ.iter().enumerate() {
            for &v in list {
                out.push((self.ids[u].clone(), self.ids[v].clone()));
            }
        }
        out
    }

    /// Sources sorted by id.
    pub fn sources(&self) -> Vec<usize> {
        self.sorted((0..self.len()).filter(|&v| self.in_degree(v) == 0).collect())
    }

    /// Sinks sorted by id.
    pub fn sinks(&self) -> Vec<usize> {
        self.sorted((0..self.len()).filter(|&v| self.out_degree(v) == 0).collect())
    }

    fn sorted(&self, mut v: Vec<usize>) -> Vec<usize> {
        v.sort_by(|&a, &b| self.ids[a].cmp(&self.ids[b]));
        v
    }

    /// Induced subgraph on `members`, kept in the given order.
    pub fn subgraph(&self, members: &[usize]) -> Dag {
        let ids: Vec<String> = members.iter().map(|&v| self.ids[v].clone()).collect();
        let edges: Vec<(String, String)> = members
            .iter()
            .flat_map(|&u| self.succ[u].iter().map(move |&v| (u, v)))
            .filter(|(_, v)| members.contains(v))
            .map(|(u, v)| (self.ids[u].clone(), self.ids[v].clone()))
            .collect();
        Dag::new(ids, &edges)
    }

    /// Kahn topological order, or the vertices left on cycles.
    pub fn topological_order(&self) -> Result<Vec<usize>, Vec<usize>> {
        let mut indeg: Vec<usize> = (0..self.len()).map(|v| self.in_degree(v)).collect();
        let mut ready: std::collections::BTreeSet<(&str, usize)> = (0..self.len())
            .filter(|&v| indeg[v] == 0)
            .map(|v| (self.ids[v].as_str(), v))
            .collect();
        let mut order = Vec::with_capacity(self.len());
        while let Some(first) = ready.pop_first() {
            let u = first.1;
            order.push(u);
            for &v in &self.succ[u] {
                indeg[v] -= 1;
                if indeg[v] == 0 {
                    ready.insert((self.ids[v].as_str(), v));
                }
            }
        }
        if order.len() == self.len() {
            Ok(order)
        } else {
            Err((0..self.len()).filter(|&v| indeg[v] > 0).collect())
        }
    }

    /// Vertices that lie on a directed cycle, grouped by strongly connected component.
    pub fn cycles(&self) -> Vec<Vec<String>> {
        let Err(_) = self.topological_order() else {
            return Vec::new();
        };
        // Tarjan over the whole graph; keep SCCs of size > 1
        let n = self.len();
        let mut index = vec![usize::MAX; n];
        let mut low = vec![0; n];
        let mut on_stack = vec![false; n];
        let mut stack = Vec::new();
        let mut counter = 0;
        let mut out = Vec::new();

        fn strong(
            g: &Dag,
            v: usize,
            counter: &mut usize,
            index: &mut [usize],
            low: &mut [usize],
            on_stack: &mut [bool],
            stack: &mut Vec<usize>,
            out: &mut Vec<Vec<String>>,
        ) {
            index[v] = *counter;
            low[v] = *counter;
            *counter += 1;
            stack.push(v);
            on_stack[v] = true;
            for &w in &g.succ[v] {
                if index[w] == usize::MAX {
                    strong(g, w, counter, index, low, on_stack, stack, out);
                    low[v] = low[v].min(low[w]);
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            }
            if low[v] == index[v] {
                let mut comp = Vec::new();
                loop {
                    let w = stack.pop().expect("tarjan stack");
                    on_stack[w] = false;
                    comp.push(g.ids[w].clone());
                    if w == v {
                        break;
                    }
                }
                if comp.len() > 1 {
                    comp.sort();
                    out.push(comp);
                }
            }
        }

        for v in 0..n {
            if index[v] == usize::MAX {
                strong(self, v, &mut counter, &mut index, &mut low, &mut on_stack, &mut stack, &mut out);
            }
        }
        out.sort();
        out
    }
}

/// Ordered layers; layer 0 holds the in-degree-0 vertices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Layering {
    pub layers: Vec<Vec<String>>,
}

impl Layering {
    /// Layer index of every vertex, in graph order.
    pub fn depth_of(&self, dag: &Dag) -> Vec<usize> {
        let mut depth = vec![0; dag.len()];
        for (k, layer) in self.layers.iter().enumerate() {
            for id in layer {
                if let Some(v) = dag.index_of(id) {
                    depth[v] = k;
                }
            }
        }
        depth
    }
}

/// Longest-path layering: each vertex sits one layer below its deepest predecessor.
pub fn layer(dag: &Dag) -> Result<Layering, LatticeError> {
    let order = dag
        .topological_order()
        .map_err(|rest| LatticeError::Cycle(rest.into_iter().map(|v| dag.id(v).to_string()).collect()))?;
    let mut depth = vec![0usize; dag.len()];
    for &v in &order {
        depth[v] = dag.predecessors(v).iter().map(|&p| depth[p] + 1).max().unwrap_or(0);
    }
    let count = depth.iter().copied().max().map_or(0, |d| d + 1);
    let mut layers = vec![Vec::new(); count];
    for v in 0..dag.len() {
        layers[depth[v]].push(dag.id(v).to_string());
    }
    for l in &mut layers {
        l.sort();
    }
    Ok(Layering { layers })
}

/// Weakly connected components, ordered by their smallest member id.
pub fn connected_components(dag: &Dag) -> Vec<Dag> {
    let n = dag.len();
    let mut comp = vec![usize::MAX; n];
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for start in 0..n {
        if comp[start] != usize::MAX {
            continue;
        }
        let c = groups.len();
        let mut members = vec![start];
        comp[start] = c;
        let mut i = 0;
        while i < members.len() {
            let v = members[i];
            i += 1;
            for &w in dag.successors(v).iter().chain(dag.predecessors(v)) {
                if comp[w] == usize::MAX {
                    comp[w] = c;
                    members.push(w);
                }
            }
        }
        members.sort_unstable();
        groups.push(members);
    }
    let mut subs: Vec<Dag> = groups.iter().map(|g| dag.subgraph(g)).collect();
    subs.sort_by(|a, b| min_id(a).cmp(min_id(b)));
    subs
}

fn min_id(d: &Dag) -> &str {
    d.ids().iter().map(String::as_str).min().unwrap_or("")
}

/// A weak component closed by a virtual top above its sources and a
/// virtual bottom below its sinks. Both virtual vertices live on the edge
/// node with zero cost.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SemiLattice {
    pub component: Dag,
    pub top_edges: Vec<String>,
    pub bottom_edges: Vec<String>,
}

pub fn build_semilattice(component: Dag) -> SemiLattice {
    let top_edges = component.sources().into_iter().map(|v| component.id(v).to_string()).collect();
    let bottom_edges = component.sinks().into_iter().map(|v| component.id(v).to_string()).collect();
    SemiLattice {
        component,
        top_edges,
        bottom_edges,
    }
}

/// A maximal source-to-sink path; the virtual endpoints are implicit.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct ExecutionFlow(pub Vec<String>);

impl ExecutionFlow {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn ids(&self) -> &[String] {
        &self.0
    }
}

/// Number of maximal source-to-sink paths, by dynamic programming.
pub fn count_flows(dag: &Dag) -> Result<u128, LatticeError> {
    let order = dag
        .topological_order()
        .map_err(|rest| LatticeError::Cycle(rest.into_iter().map(|v| dag.id(v).to_string()).collect()))?;
    let mut paths_to_sink = vec![0u128; dag.len()];
    for &v in order.iter().rev() {
        paths_to_sink[v] = if dag.out_degree(v) == 0 {
            1
        } else {
            dag.successors(v)
                .iter()
                .fold(0u128, |acc, &w| acc.saturating_add(paths_to_sink[w]))
        };
    }
    Ok(dag
        .sources()
        .into_iter()
        .fold(0u128, |acc, s| acc.saturating_add(paths_to_sink[s])))
}

/// All execution flows of a semi-lattice in lexicographic order.
pub fn execution_flows(sl: &SemiLattice, cap: u64) -> Result<Vec<ExecutionFlow>, LatticeError> {
    let dag = &sl.component;
    let count = count_flows(dag)?;
    if count > cap as u128 {
        return Err(LatticeError::FlowExplosion { count, cap });
    }
    let mut flows = Vec::with_capacity(count as usize);
    let mut path = Vec::new();
    for s in dag.sources() {
        walk(dag, s, &mut path, &mut flows);
    }
    Ok(flows)
}

fn walk(dag: &Dag, v: usize, path: &mut Vec<usize>, out: &mut Vec<ExecutionFlow>) {
    path.push(v);
    if dag.out_degree(v) == 0 {
        out.push(ExecutionFlow(path.iter().map(|&u| dag.id(u).to_string()).collect()));
    } else {
        for &w in dag.successors(v) {
            walk(dag, w, path, out);
        }
    }
    path.pop();
}

/// Flows of every component, pooled in component order.
pub fn all_flows(dag: &Dag, cap: u64) -> Result<Vec<ExecutionFlow>, LatticeError> {
    let total = count_flows(dag)?;
    if total > cap as u128 {
        return Err(LatticeError::FlowExplosion { count: total, cap });
    }
    let mut out = Vec::new();
    for comp in connected_components(dag) {
        out.extend(execution_flows(&build_semilattice(comp), cap)?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dag(ids: &[&str], edges: &[(&str, &str)]) -> Dag {
        Dag::new(
            ids.iter().map(|s| s.to_string()).collect(),
            &edges.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect::<Vec<_>>(),
        )
    }

    fn fig7() -> Dag {
        dag(&["Data", "A1", "A2", "A3"], &[("Data", "A1"), ("A1", "A3"), ("Data", "A2")])
    }

    fn face_pipeline() -> Dag {
        dag(
            &["A1", "A2", "A3", "A4", "A5", "A6", "A7"],
            &[("A1", "A2"), ("A2", "A3"), ("A2", "A4"), ("A3", "A6"), ("A4", "A5"), ("A5", "A6"), ("A6", "A7")],
        )
    }

    fn strings(v: &[&[&str]]) -> Vec<Vec<String>> {
        v.iter().map(|l| l.iter().map(|s| s.to_string()).collect()).collect()
    }

    #[test]
    fn layering_examples() {
        assert_eq!(layer(&fig7()).unwrap().layers, strings(&[&["Data"], &["A1", "A2"], &["A3"]]));
        assert_eq!(layer(&dag(&["v"], &[])).unwrap().layers, strings(&[&["v"]]));
        assert_eq!(
            layer(&face_pipeline()).unwrap().layers,
            strings(&[&["A1"], &["A2"], &["A3", "A4"], &["A5"], &["A6"], &["A7"]])
        );
    }

    #[test]
    fn layering_rejects_cycle() {
        let g = dag(&["A", "B", "C"], &[("A", "B"), ("B", "C"), ("C", "A")]);
        assert!(matches!(layer(&g), Err(LatticeError::Cycle(_))));
        assert_eq!(g.cycles(), strings(&[&["A", "B", "C"]]));
    }

    #[test]
    fn components() {
        assert_eq!(connected_components(&fig7()).len(), 1);
        let two = dag(&["a", "b", "x", "y"], &[("x", "y"), ("a", "b")]);
        let comps = connected_components(&two);
        assert_eq!(comps.len(), 2);
        assert_eq!(comps[0].ids(), &["a".to_string(), "b".to_string()]);
    }

    #[test]
    fn semilattice_endpoints() {
        let sl = build_semilattice(fig7());
        assert_eq!(sl.top_edges, vec!["Data".to_string()]);
        assert_eq!(sl.bottom_edges, vec!["A2".to_string(), "A3".to_string()]);
        let sl = build_semilattice(dag(&["v"], &[]));
        assert_eq!(sl.top_edges, sl.bottom_edges);
        let sl = build_semilattice(face_pipeline());
        assert_eq!((sl.top_edges.as_slice(), sl.bottom_edges.as_slice()), (&["A1".to_string()][..], &["A7".to_string()][..]));
    }

    #[test]
    fn flow_examples() {
        let f = execution_flows(&build_semilattice(fig7()), DEFAULT_FLOW_CAP).unwrap();
        assert_eq!(
            f.iter().map(|x| x.0.clone()).collect::<Vec<_>>(),
            strings(&[&["Data", "A1", "A3"], &["Data", "A2"]])
        );
        let f = execution_flows(&build_semilattice(face_pipeline()), DEFAULT_FLOW_CAP).unwrap();
        assert_eq!(
            f.iter().map(|x| x.0.clone()).collect::<Vec<_>>(),
            strings(&[&["A1", "A2", "A3", "A6", "A7"], &["A1", "A2", "A4", "A5", "A6", "A7"]])
        );
        let diamond = dag(&["a", "b", "c", "d"], &[("a", "b"), ("a", "c"), ("b", "d"), ("c", "d")]);
        assert_eq!(execution_flows(&build_semilattice(diamond), 10).unwrap().len(), 2);
    }

    #[test]
    fn flow_cap() {
        let diamond = dag(&["a", "b", "c", "d"], &[("a", "b"), ("a", "c"), ("b", "d"), ("c", "d")]);
        assert_eq!(
            execution_flows(&build_semilattice(diamond), 1),
            Err(LatticeError::FlowExplosion { count: 2, cap: 1 })
        );
    }
}
