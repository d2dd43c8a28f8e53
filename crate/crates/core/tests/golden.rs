use std::collections::BTreeMap;
use std::path::PathBuf;

use allocflow_core::*;

fn fixture_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

fn check(name: &str, text: &str) {
    let path = fixture_dir().join(name);
    if std::env::var_os("ALLOCFLOW_BLESS").is_some() {
        std::fs::create_dir_all(fixture_dir()).unwrap();
        std::fs::write(&path, text).unwrap();
    }
    let stored = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    assert_eq!(stored, text, "{name} drifted from its generator");
}

#[test]
fn bundled_fixtures_match_generators() {
    for (name, inst) in fixtures::bundled() {
        let text = serialize_problem(&inst);
        check(&name, &text);
        assert_eq!(parse_problem(&text).unwrap(), inst, "{name} round trip");
    }
}

#[test]
fn random_instance_n12_seed7() {
    let inst = random_instance(12, &RandomParams::default(), 7);
    check("random_n12_seed7.json", &serialize_problem(&inst));

    // Independent longest-path layering straight from the edge list.
    let mut depth: BTreeMap<&str, usize> = inst.algorithms.iter().map(|a| (a.id.as_str(), 0)).collect();
    for _ in 0..inst.algorithms.len() {
        for (u, v) in &inst.edges {
            let d = depth[u.as_str()] + 1;
            if depth[v.as_str()] < d {
                depth.insert(v, d);
            }
        }
    }
    let layers = depth.values().max().unwrap() + 1;
    let computed = layer(&Dag::from_instance(&inst)).unwrap();
    assert_eq!(computed.layers.len(), layers);
    assert!(layers <= 4);
    assert_eq!(inst.edges.len(), Dag::from_instance(&inst).edges().len());
}
