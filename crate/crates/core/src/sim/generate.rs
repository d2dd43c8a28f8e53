//! Seeded random layered instances.

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::model::{
    AlgorithmSpec, ExecTime, Link, LocationNode, MemoryProfile, MemoryRegion, Options, ProblemInstance, Tier,
};

#[derive(Debug, Clone, PartialEq)]
pub struct RandomParams {
    /// Number of layers; `None` uses `ceil(sqrt(n))`.
    pub layers: Option<usize>,
    /// Probability of each extra edge from the previous layer.
    pub edge_prob: f64,
    /// Range of every execution time draw, in seconds.
    pub exec_seconds: (f64, f64),
    /// Keep cloud <= fog <= edge for each algorithm.
    pub ordered_times: bool,
    /// Range of region sizes in bits.
    pub region_bits: (u64, u64),
    /// Range of processing memory in bits.
    pub processing_bits: (u64, u64),
    /// Range of link times in seconds.
    pub link_seconds: (f64, f64),
    pub fog_nodes: usize,
    pub cloud_nodes: usize,
}

impl Default for RandomParams {
    fn default() -> Self {
        RandomParams {
            layers: None,
            edge_prob: 0.3,
            exec_seconds: (0.1, 5.0),
            ordered_times: true,
            region_bits: (8 * 1024, 8 * 1024 * 1024),
            processing_bits: (8 * 1024 * 1024, 80 * 1024 * 1024),
            link_seconds: (0.05, 1.0),
            fog_nodes: 1,
            cloud_nodes: 1,
        }
    }
}

fn round_ms(x: f64) -> f64 {
    (x * 1000.0).round() / 1000.0
}

/// Layered DAG with `n` algorithms; every vertex outside the first layer
/// has at least one predecessor in the layer above.
pub fn random_instance(n: usize, params: &RandomParams, seed: u64) -> ProblemInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let layers = params
        .layers
        .unwrap_or_else(|| (n as f64).sqrt().ceil() as usize)
        .clamp(1, n.max(1));

    let mut layer_of: Vec<usize> = (0..n).map(|i| if i < layers { i } else { rng.random_range(0..layers) }).collect();
    layer_of.sort_unstable();
    let width = n.to_string().len();
    let ids: Vec<String> = (1..=n).map(|i| format!("A{i:0width$}")).collect();
    let mut by_layer: Vec<Vec<usize>> = vec![Vec::new(); layers];
    for (v, &l) in layer_of.iter().enumerate() {
        by_layer[l].push(v);
    }

    let mut preds: Vec<Vec<usize>> = vec![Vec::new(); n];
    for l in 1..layers {
        let above = &by_layer[l - 1];
        for &v in &by_layer[l] {
            let forced = *above.choose(&mut rng).expect("layers are non-empty");
            for &u in above {
                if u == forced || rng.random_bool(params.edge_prob) {
                    preds[v].push(u);
                }
            }
        }
    }

    let mut regions = Vec::new();
    let mut algorithms = Vec::new();
    let (lo, hi) = params.exec_seconds;
    for v in 0..n {
        let mut t = [0.0; 3].map(|_: f64| round_ms(rng.random_range(lo..=hi)));
        if params.ordered_times {
            t.sort_by(|a, b| b.total_cmp(a));
        }
        let out = format!("{}_out", ids[v]);
        regions.push(MemoryRegion {
            id: out.clone(),
            size_bits: rng.random_range(params.region_bits.0..=params.region_bits.1),
        });
        let inputs = if preds[v].is_empty() {
            let input = format!("{}_in", ids[v]);
            regions.push(MemoryRegion {
                id: input.clone(),
                size_bits: rng.random_range(params.region_bits.0..=params.region_bits.1),
            });
            vec![input]
        } else {
            preds[v].iter().map(|&u| format!("{}_out", ids[u])).collect()
        };
        let rank = rng.random_range(0..4u32);
        algorithms.push(AlgorithmSpec {
            id: ids[v].clone(),
            exec_time: ExecTime::uniform(t[0], t[1], t[2]),
            memory: MemoryProfile {
                inputs,
                outputs: vec![out],
                processing_bits: rng.random_range(params.processing_bits.0..=params.processing_bits.1),
                growth_per_step: [0, 0, 0],
            },
            space_rank: rank,
            space_label: None,
            allowed_locations: None,
        });
    }
    let edges = (0..n)
        .flat_map(|v| preds[v].iter().map(move |&u| (u, v)))
        .map(|(u, v)| (ids[u].clone(), ids[v].clone()))
        .collect();

    let mut nodes = vec![LocationNode { id: "edge".into(), tier: Tier::Edge }];
    let fogs: Vec<String> = (1..=params.fog_nodes).map(|i| format!("fog{i}")).collect();
    let clouds: Vec<String> = (1..=params.cloud_nodes).map(|i| format!("cloud{i}")).collect();
    nodes.extend(fogs.iter().map(|id| LocationNode { id: id.clone(), tier: Tier::Fog }));
    nodes.extend(clouds.iter().map(|id| LocationNode { id: id.clone(), tier: Tier::Cloud }));

    let mut comm = Vec::new();
    let mut connect = |a: &str, b: &str, rng: &mut ChaCha8Rng| {
        let s = round_ms(rng.random_range(params.link_seconds.0..=params.link_seconds.1));
        for (from, to) in [(a, b), (b, a)] {
            comm.push(Link {
                from: from.into(),
                to: to.into(),
                base_seconds: s,
                delay: None,
                per_byte_seconds: 0.0,
            });
        }
    };
    for f in &fogs {
        connect("edge", f, &mut rng);
        for c in &clouds {
            connect(f, c, &mut rng);
        }
    }
    for c in &clouds {
        connect("edge", c, &mut rng);
    }

    ProblemInstance {
        nodes,
        regions,
        algorithms,
        edges,
        comm,
        options: Options::default(),
    }
}
