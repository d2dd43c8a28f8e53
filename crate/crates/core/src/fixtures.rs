//! Bundled instances used by the examples, the golden tests and
//! `allocflow examples`.

use crate::model::{
    AlgorithmSpec, DelaySpec, ExecTime, Link, LocationNode, MemoryProfile, MemoryRegion, Options, ProblemInstance, Tier,
};

const MB_BITS: u64 = 8 * 1_048_576;

fn node(id: &str, tier: Tier) -> LocationNode {
    LocationNode { id: id.into(), tier }
}

fn link(from: &str, to: &str, base: f64) -> Link {
    Link {
        from: from.into(),
        to: to.into(),
        base_seconds: base,
        delay: None,
        per_byte_seconds: 0.0,
    }
}

fn noisy(from: &str, to: &str, base: f64, mu: f64, sigma: f64) -> Link {
    Link {
        delay: Some(DelaySpec { mu, sigma }),
        ..link(from, to, base)
    }
}

fn both_ways(a: &str, b: &str, seconds: f64) -> [Link; 2] {
    [link(a, b, seconds), link(b, a, seconds)]
}

fn algorithm(id: &str, exec: ExecTime, inputs: &[&str], outputs: &[&str], processing_bits: u64, rank: u32, label: &str) -> AlgorithmSpec {
    AlgorithmSpec {
        id: id.into(),
        exec_time: exec,
        memory: MemoryProfile {
            inputs: inputs.iter().map(|s| s.to_string()).collect(),
            outputs: outputs.iter().map(|s| s.to_string()).collect(),
            processing_bits,
            growth_per_step: [0, 0, 0],
        },
        space_rank: rank,
        space_label: Some(label.into()),
        allowed_locations: None,
    }
}

fn three_nodes() -> Vec<LocationNode> {
    vec![node("edge", Tier::Edge), node("fog", Tier::Fog), node("cloud", Tier::Cloud)]
}

/// A robot sorting a list: 5 s locally, fog 1.5x and cloud 5x faster;
/// shipping the list takes 1.5 s to the fog and 3 s to the cloud.
pub fn example1() -> ProblemInstance {
    let mut comm = Vec::new();
    comm.extend(both_ways("edge", "fog", 1.5));
    comm.extend(both_ways("edge", "cloud", 3.0));
    ProblemInstance {
        nodes: three_nodes(),
        regions: vec![],
        algorithms: vec![algorithm("sort", ExecTime::uniform(5.0, 5.0 / 1.5, 1.0), &[], &[], 0, 0, "O(n)")],
        edges: vec![],
        comm,
        options: Options::default(),
    }
}

/// The sorting robot with edge/fog/cloud times 5/2/1 s and a link time `x`
/// between edge and fog and between fog and cloud.
pub fn example2(x: f64) -> ProblemInstance {
    let mut comm = Vec::new();
    comm.extend(both_ways("edge", "fog", x));
    comm.extend(both_ways("fog", "cloud", x));
    ProblemInstance {
        nodes: three_nodes(),
        regions: vec![],
        algorithms: vec![algorithm("sort", ExecTime::uniform(5.0, 2.0, 1.0), &[], &[], 0, 0, "O(n)")],
        edges: vec![],
        comm,
        options: Options::default(),
    }
}

/// Dataset loader feeding A1 and A2, with A3 consuming A1's output; link
/// time `d` between edge and fog and between fog and cloud.
///
/// Output region sizes are not given by the source experiment and are
/// fixed at 1 MB each here.
pub fn table4(d: f64) -> ProblemInstance {
    let mut comm = Vec::new();
    comm.extend(both_ways("edge", "fog", d));
    comm.extend(both_ways("fog", "cloud", d));
    ProblemInstance {
        nodes: three_nodes(),
        regions: vec![
            MemoryRegion { id: "dataset".into(), size_bits: 500 * MB_BITS },
            MemoryRegion { id: "A1_out".into(), size_bits: MB_BITS },
            MemoryRegion { id: "A2_out".into(), size_bits: MB_BITS },
            MemoryRegion { id: "A3_out".into(), size_bits: MB_BITS },
        ],
        algorithms: vec![
            algorithm("Data", ExecTime::uniform(0.0, 0.0, 0.0), &["dataset"], &[], 0, 0, "O(1)"),
            algorithm("A1", ExecTime::uniform(2.0, 1.0, 0.5), &["dataset"], &["A1_out"], 300 * MB_BITS, 3, "O(n^2)"),
            algorithm("A2", ExecTime::uniform(4.0, 2.0, 1.0), &["dataset"], &["A2_out"], 50 * MB_BITS, 1, "O(n)"),
            algorithm("A3", ExecTime::uniform(6.0, 3.0, 1.5), &["A1_out"], &["A3_out"], 100 * MB_BITS, 2, "O(n log n)"),
        ],
        edges: vec![
            ("Data".into(), "A1".into()),
            ("A1".into(), "A3".into()),
            ("Data".into(), "A2".into()),
        ],
        comm,
        options: Options::default(),
    }
}

/// Face-recognition pipeline measured on a Raspberry Pi edge node, three
/// fog workstations and two cloud VMs.
pub fn realworld() -> ProblemInstance {
    let fogs = ["fog1", "fog2", "fog3"];
    let clouds = ["cloud1", "cloud2"];
    let mut nodes = vec![node("edge", Tier::Edge)];
    nodes.extend(fogs.iter().map(|f| node(f, Tier::Fog)));
    nodes.extend(clouds.iter().map(|c| node(c, Tier::Cloud)));

    let mut comm = Vec::new();
    for f in fogs {
        comm.push(noisy("edge", f, 0.447, 0.182, 0.111));
        comm.push(noisy(f, "edge", 0.475, 0.187, 0.397));
    }
    for c in clouds {
        comm.push(noisy("edge", c, 0.175, 0.188, 0.015));
        comm.push(noisy(c, "edge", 0.116, 0.182, 0.024));
    }
    for f in fogs {
        for c in clouds {
            comm.push(noisy(f, c, 0.417, 0.367, 0.365));
            comm.push(noisy(c, f, 0.439, 0.188, 0.087));
        }
    }
    for a in fogs {
        for b in fogs {
            if a != b {
                comm.push(noisy(a, b, 0.115, 0.047, 0.025));
            }
        }
    }
    comm.push(noisy("cloud1", "cloud2", 0.112, 0.030, 0.018));
    comm.push(noisy("cloud2", "cloud1", 0.112, 0.030, 0.018));

    // (id, edge s, fog s, cloud s, input bits, output bits, processing bytes, rank, label)
    let table: [(&str, f64, f64, f64, u64, u64, u64, u32, &str); 7] = [
        ("A1", 0.445, 0.153, 0.047, 4_718_592, 1_120, 14_619_367, 3, "O(nm)"),
        ("A2", 4.475, 1.538, 0.470, 47_185_920, 11_200, 11_683_901, 1, "O(n)"),
        ("A3", 7.2e-4, 4.1e-4, 1.5e-4, 11_200, 11_200, 11_684_220, 1, "O(n)"),
        ("A4", 2.0e-4, 7.74e-5, 3.46e-5, 11_200, 0, 7_799_083, 2, "O(m)"),
        ("A5", 6.61e-5, 1.94e-5, 9.96e-6, 11_200, 11_200, 11_253_700, 2, "O(m)"),
        ("A6", 2.1e-4, 1.3e-4, 4.75e-5, 11_200, 1_120, 11_261_700, 3, "O(nm)"),
        ("A7", 1.09e-3, 4.01e-3, 2.7e-4, 4_718_592, 4_718_592, 8_010_779, 1, "O(n)"),
    ];
    let mut regions = Vec::new();
    let mut algorithms = Vec::new();
    for (id, e, f, c, input, output, processing, rank, label) in table {
        let in_id = format!("{id}_in");
        let out_id = format!("{id}_out");
        regions.push(MemoryRegion { id: in_id.clone(), size_bits: input });
        regions.push(MemoryRegion { id: out_id.clone(), size_bits: output });
        algorithms.push(algorithm(id, ExecTime::uniform(e, f, c), &[&in_id], &[&out_id], processing * 8, rank, label));
    }
    let edges = [("A1", "A2"), ("A2", "A3"), ("A2", "A4"), ("A3", "A6"), ("A4", "A5"), ("A5", "A6"), ("A6", "A7")]
        .iter()
        .map(|(a, b)| (a.to_string(), b.to_string()))
        .collect();
    ProblemInstance {
        nodes,
        regions,
        algorithms,
        edges,
        comm,
        options: Options::default(),
    }
}

/// Three algorithms depending on each other in a ring.
pub fn cycle() -> ProblemInstance {
    let mut inst = example2(1.0);
    inst.algorithms = ["A", "B", "C"]
        .iter()
        .map(|id| algorithm(id, ExecTime::uniform(1.0, 1.0, 1.0), &[], &[], 0, 0, "O(1)"))
        .collect();
    inst.edges = vec![("A".into(), "B".into()), ("B".into(), "C".into()), ("C".into(), "A".into())];
    inst
}

/// Link times of the parametric sorting example used for the threshold sweep.
pub const EXAMPLE2_SWEEP: [f64; 5] = [0.25, 0.75, 1.25, 2.0, 3.5];
/// Link times of the loader experiment.
pub const TABLE4_SWEEP: [f64; 4] = [1.0, 2.0, 4.0, 6.0];

/// Every bundled instance with its file name.
pub fn bundled() -> Vec<(String, ProblemInstance)> {
    let mut out = vec![("example1.json".to_string(), example1())];
    for x in EXAMPLE2_SWEEP {
        out.push((format!("example2_x{x}.json"), example2(x)));
    }
    for d in TABLE4_SWEEP {
        out.push((format!("table4_d{d}.json"), table4(d)));
    }
    out.push(("realworld.json".to_string(), realworld()));
    out.push(("cycle.json".to_string(), cycle()));
    out
}
