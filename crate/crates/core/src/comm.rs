//! Communication times between location nodes.
//!
//! Only declared links carry traffic; any other pair is reached along the
//! path of least expected time. Path choice always uses expected times, a
//! sampled realization only changes the cost of the chosen hops.

use rand::RngCore;

use crate::error::CommError;
use crate::model::{Link, ProblemInstance};
use crate::sim::delay::{folded_normal_mean, sample_folded_normal};

/// How link delays are turned into seconds.
pub enum DelayMode<'a> {
    /// Expected delay of every link.
    Mean,
    /// One folded-normal draw per traversed hop.
    Sample(&'a mut dyn RngCore),
}

/// Bits rounded up to whole bytes.
pub fn payload_bytes(payload_bits: u64) -> u64 {
    payload_bits.div_ceil(8)
}

/// Expected seconds for one traversal of `link`.
pub fn expected_link_seconds(link: &Link, payload_bits: u64) -> f64 {
    let delay = link.delay.map_or(0.0, |d| folded_normal_mean(d.mu, d.sigma));
    link.base_seconds + delay + link.per_byte_seconds * payload_bytes(payload_bits) as f64
}

/// Adjacency over declared links, indexed by node position in the instance.
#[derive(Debug, Clone)]
pub struct CommGraph {
    links: Vec<Link>,
    out: Vec<Vec<(usize, usize)>>,
}

impl CommGraph {
    pub fn new(instance: &ProblemInstance) -> Self {
        let mut out = vec![Vec::new(); instance.nodes.len()];
        for (li, link) in instance.comm.iter().enumerate() {
            let (Some(f), Some(t)) = (instance.node_index(&link.from), instance.node_index(&link.to)) else {
                continue;
            };
            out[f].push((t, li));
        }
        CommGraph {
            links: instance.comm.clone(),
            out,
        }
    }

    pub fn links(&self) -> &[Link] {
        &self.links
    }

    pub fn node_count(&self) -> usize {
        self.out.len()
    }

    /// Link indices along the cheapest expected path, `Some(vec![])` when `from == to`.
    pub fn cheapest_path(&self, from: usize, to: usize, payload_bits: u64) -> Option<Vec<usize>> {
        if from == to {
            return Some(Vec::new());
        }
        let n = self.out.len();
        let mut dist = vec![f64::INFINITY; n];
        let mut via: Vec<Option<(usize, usize)>> = vec![None; n];
        let mut done = vec![false; n];
        dist[from] = 0.0;
        loop {
            let mut best: Option<usize> = None;
            for v in 0..n {
                if !done[v] && dist[v].is_finite() && best.is_none_or(|b| dist[v] < dist[b]) {
                    best = Some(v);
                }
            }
            let Some(u) = best else { break };
            if u == to {
                break;
            }
            done[u] = true;
            for &(v, li) in &self.out[u] {
                let cand = dist[u] + expected_link_seconds(&self.links[li], payload_bits);
                if cand < dist[v] {
                    dist[v] = cand;
                    via[v] = Some((u, li));
                }
            }
        }
        if !dist[to].is_finite() {
            return None;
        }
        let mut path = Vec::new();
        let mut cur = to;
        while let Some((prev, li)) = via[cur] {
            path.push(li);
            cur = prev;
        }
        path.reverse();
        Some(path)
    }
}

/// Communication seconds from `from` to `to` carrying `payload_bits`.
pub fn resolve_comm(
    instance: &ProblemInstance,
    from: &str,
    to: &str,
    payload_bits: u64,
    mode: DelayMode<'_>,
) -> Result<f64, CommError> {
    let f = instance
        .node_index(from)
        .ok_or_else(|| CommError::UnknownNode(from.to_string()))?;
    let t = instance
        .node_index(to)
        .ok_or_else(|| CommError::UnknownNode(to.to_string()))?;
    let graph = CommGraph::new(instance);
    let path = graph
        .cheapest_path(f, t, payload_bits)
        .ok_or_else(|| CommError::Unreachable {
            from: from.to_string(),
            to: to.to_string(),
        })?;
    let bytes = payload_bytes(payload_bits) as f64;
    Ok(match mode {
        DelayMode::Mean => path
            .iter()
            .map(|&li| expected_link_seconds(&graph.links[li], payload_bits))
            .sum(),
        DelayMode::Sample(rng) => path
            .iter()
            .map(|&li| {
                let link = &graph.links[li];
                let delay = link.delay.map_or(0.0, |d| sample_folded_normal(d, rng));
                link.base_seconds + delay + link.per_byte_seconds * bytes
            })
            .sum(),
    })
}

/// Seconds per declared link for one scenario, excluding the per-byte term.
#[derive(Debug, Clone, PartialEq)]
pub struct LinkTimes(pub Vec<f64>);

impl LinkTimes {
    pub fn mean(links: &[Link]) -> Self {
        LinkTimes(links.iter().map(|l| expected_link_seconds(l, 0)).collect())
    }

    /// Draws one delay per declared link, in declaration order.
    pub fn sample(links: &[Link], rng: &mut dyn RngCore) -> Self {
        LinkTimes(
            links
                .iter()
                .map(|l| l.base_seconds + l.delay.map_or(0.0, |d| sample_folded_normal(d, rng)))
                .collect(),
        )
    }
}

/// Dense hop costs for every node pair and each payload class in use.
///
/// Paths are fixed from expected times, costs come from a [`LinkTimes`]
/// realization. Unreachable pairs cost `+inf`.
#[derive(Debug, Clone)]
pub struct HopTable {
    nodes: usize,
    payloads: Vec<u64>,
    paths: Vec<Option<Vec<usize>>>,
    costs: Vec<f64>,
}

impl HopTable {
    pub fn build(graph: &CommGraph, payloads: Vec<u64>, times: &LinkTimes) -> Self {
        let n = graph.node_count();
        let mut paths = Vec::with_capacity(payloads.len() * n * n);
        for &p in &payloads {
            for from in 0..n {
                for to in 0..n {
                    paths.push(graph.cheapest_path(from, to, p));
                }
            }
        }
        let mut table = HopTable {
            nodes: n,
            payloads,
            paths,
            costs: Vec::new(),
        };
        table.realize(graph.links(), times);
        table
    }

    /// Recomputes every cost along the stored paths.
    pub fn realize(&mut self, links: &[Link], times: &LinkTimes) {
        let n2 = self.nodes * self.nodes;
        self.costs = self
            .paths
            .iter()
            .enumerate()
            .map(|(i, path)| match path {
                None => f64::INFINITY,
                Some(path) => {
                    let bytes = payload_bytes(self.payloads[i / n2.max(1)]) as f64;
                    path.iter()
                        .map(|&li| times.0[li] + links[li].per_byte_seconds * bytes)
                        .sum()
                }
            })
            .collect();
    }

    pub fn realized(&self, links: &[Link], times: &LinkTimes) -> Self {
        let mut t = self.clone();
        t.realize(links, times);
        t
    }

    pub fn class_of(&self, payload_bits: u64) -> Option<usize> {
        self.payloads.iter().position(|&p| p == payload_bits)
    }

    #[inline]
    pub fn cost(&self, class: usize, from: usize, to: usize) -> f64 {
        self.costs[(class * self.nodes + from) * self.nodes + to]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{DelaySpec, LocationNode, Options, Tier};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn link(from: &str, to: &str, base: f64) -> Link {
        Link {
            from: from.into(),
            to: to.into(),
            base_seconds: base,
            delay: None,
            per_byte_seconds: 0.0,
        }
    }

    fn three_tier(x: f64) -> ProblemInstance {
        ProblemInstance {
            nodes: vec![
                LocationNode { id: "E".into(), tier: Tier::Edge },
                LocationNode { id: "F".into(), tier: Tier::Fog },
                LocationNode { id: "C".into(), tier: Tier::Cloud },
            ],
            regions: vec![],
            algorithms: vec![],
            edges: vec![],
            comm: vec![link("E", "F", x), link("F", "E", x), link("F", "C", x), link("C", "F", x)],
            options: Options::default(),
        }
    }

    #[test]
    fn composed_path_through_fog() {
        let inst = three_tier(1.5);
        assert_eq!(resolve_comm(&inst, "E", "C", 0, DelayMode::Mean).unwrap(), 3.0);
        assert_eq!(resolve_comm(&inst, "C", "E", 0, DelayMode::Mean).unwrap(), 3.0);
        assert_eq!(resolve_comm(&inst, "F", "F", 0, DelayMode::Mean).unwrap(), 0.0);
    }

    #[test]
    fn direct_link_loses_to_cheaper_detour() {
        let mut inst = three_tier(1.0);
        inst.comm.push(link("E", "C", 5.0));
        assert_eq!(resolve_comm(&inst, "E", "C", 0, DelayMode::Mean).unwrap(), 2.0);
        inst.comm.push(link("E", "C", 1.5));
        assert_eq!(resolve_comm(&inst, "E", "C", 0, DelayMode::Mean).unwrap(), 1.5);
    }

    #[test]
    fn unreachable_pair() {
        let mut inst = three_tier(1.0);
        inst.comm.retain(|l| l.to != "E");
        assert_eq!(
            resolve_comm(&inst, "C", "E", 0, DelayMode::Mean),
            Err(CommError::Unreachable { from: "C".into(), to: "E".into() })
        );
        assert!(matches!(
            resolve_comm(&inst, "C", "Q", 0, DelayMode::Mean),
            Err(CommError::UnknownNode(_))
        ));
    }

    #[test]
    fn payload_term_uses_whole_bytes() {
        let mut inst = three_tier(1.0);
        inst.comm[0].per_byte_seconds = 0.5;
        // 9 bits round up to 2 bytes
        assert_eq!(resolve_comm(&inst, "E", "F", 9, DelayMode::Mean).unwrap(), 2.0);
    }

    #[test]
    fn sampled_without_spread_equals_mean() {
        let mut inst = three_tier(1.0);
        for l in &mut inst.comm {
            l.delay = Some(DelaySpec { mu: 0.25, sigma: 0.0 });
        }
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let s = resolve_comm(&inst, "E", "C", 0, DelayMode::Sample(&mut rng)).unwrap();
        let m = resolve_comm(&inst, "E", "C", 0, DelayMode::Mean).unwrap();
        assert_eq!(s, m);
        assert_eq!(m, 2.5);
    }

    #[test]
    fn hop_table_matches_resolve() {
        let inst = three_tier(0.75);
        let graph = CommGraph::new(&inst);
        let table = HopTable::build(&graph, vec![0], &LinkTimes::mean(graph.links()));
        for (i, a) in inst.nodes.iter().enumerate() {
            for (j, b) in inst.nodes.iter().enumerate() {
                let r = resolve_comm(&inst, &a.id, &b.id, 0, DelayMode::Mean).unwrap();
                assert_eq!(table.cost(0, i, j), r);
            }
        }
    }
}
