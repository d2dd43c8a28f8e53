//! Domain types for a placement problem and the JSON instance format.
//!
//! An instance document has the top-level keys `nodes`, `regions`,
//! `algorithms`, `edges`, `comm` and `options`. Unknown keys are rejected,
//! times are in seconds and sizes in bits.

use std::collections::{BTreeMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::ModelError;

/// Execution tier of a location node.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Tier {
    Edge,
    Fog,
    Cloud,
}

impl fmt::Display for Tier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Tier::Edge => "edge",
            Tier::Fog => "fog",
            Tier::Cloud => "cloud",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LocationNode {
    pub id: String,
    pub tier: Tier,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MemoryRegion {
    pub id: String,
    pub size_bits: u64,
}

/// Per-step growth of the input, processing and output restrictions.
pub type Growth = [i64; 3];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MemoryProfile {
    pub inputs: Vec<String>,
    pub outputs: Vec<String>,
    pub processing_bits: u64,
    pub growth_per_step: Growth,
}

/// Tier-keyed execution times with optional per-node overrides.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct ExecTime {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub edge: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fog: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cloud: Option<f64>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub overrides: BTreeMap<String, f64>,
}

impl ExecTime {
    pub fn uniform(edge: f64, fog: f64, cloud: f64) -> Self {
        ExecTime {
            edge: Some(edge),
            fog: Some(fog),
            cloud: Some(cloud),
            overrides: BTreeMap::new(),
        }
    }

    pub fn for_tier(&self, tier: Tier) -> Option<f64> {
        match tier {
            Tier::Edge => self.edge,
            Tier::Fog => self.fog,
            Tier::Cloud => self.cloud,
        }
    }

    /// Seconds on `node`, preferring a node override over the tier value.
    pub fn at(&self, node: &LocationNode) -> Option<f64> {
        self.overrides
            .get(&node.id)
            .copied()
            .or_else(|| self.for_tier(node.tier))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AlgorithmSpec {
    pub id: String,
    pub exec_time: ExecTime,
    pub memory: MemoryProfile,
    pub space_rank: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub space_label: Option<String>,
    /// `None` means every node.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub allowed_locations: Option<Vec<String>>,
}

impl AlgorithmSpec {
    pub fn allows(&self, node_id: &str) -> bool {
        match &self.allowed_locations {
            None => true,
            Some(list) => list.iter().any(|n| n == node_id),
        }
    }
}

/// Folded-normal delay parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DelaySpec {
    pub mu: f64,
    pub sigma: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Link {
    pub from: String,
    pub to: String,
    pub base_seconds: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delay: Option<DelaySpec>,
    pub per_byte_seconds: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum TimeAggregate {
    #[default]
    MaxFlow,
    TotalFlows,
    MeanFlows,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Options {
    pub time_aggregate: TimeAggregate,
    pub memory_weight: f64,
    pub time_weight: f64,
    pub boundedness_horizon: u32,
}

impl Default for Options {
    fn default() -> Self {
        Options {
            time_aggregate: TimeAggregate::MaxFlow,
            memory_weight: 1.0,
            time_weight: 1.0,
            boundedness_horizon: 16,
        }
    }
}

/// A fully resolved placement problem.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProblemInstance {
    pub nodes: Vec<LocationNode>,
    pub regions: Vec<MemoryRegion>,
    pub algorithms: Vec<AlgorithmSpec>,
    pub edges: Vec<(String, String)>,
    pub comm: Vec<Link>,
    pub options: Options,
}

impl ProblemInstance {
    pub fn node(&self, id: &str) -> Option<&LocationNode> {
        self.nodes.iter().find(|n| n.id == id)
    }

    pub fn node_index(&self, id: &str) -> Option<usize> {
        self.nodes.iter().position(|n| n.id == id)
    }

    pub fn algorithm(&self, id: &str) -> Option<&AlgorithmSpec> {
        self.algorithms.iter().find(|a| a.id == id)
    }

    pub fn algorithm_index(&self, id: &str) -> Option<usize> {
        self.algorithms.iter().position(|a| a.id == id)
    }

    pub fn region_index(&self, id: &str) -> Option<usize> {
        self.regions.iter().position(|r| r.id == id)
    }

    /// The first edge-tier node, if any.
    pub fn edge_node(&self) -> Option<&LocationNode> {
        self.nodes.iter().find(|n| n.tier == Tier::Edge)
    }
}

/// Parses an instance document and checks references, uniqueness and signs.
pub fn parse_problem(text: &str) -> Result<ProblemInstance, ModelError> {
    let raw: raw::Instance = serde_json::from_str(text).map_err(|e| ModelError::Syntax {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    raw.resolve()
}

/// Serializes an instance to the document format, with every default written out.
pub fn serialize_problem(instance: &ProblemInstance) -> String {
    serde_json::to_string_pretty(instance).expect("instance serialization is infallible")
}

mod raw {
    use super::*;

    #[derive(Deserialize)]
    #[serde(deny_unknown_fields)]
    pub struct Instance {
        #[serde(default)]
        nodes: Vec<LocationNode>,
        #[serde(default)]
        regions: Vec<Region>,
        #[serde(default)]
        algorithms: Vec<Algorithm>,
        #[serde(default)]
        edges: Vec<(String, String)>,
        #[serde(default)]
        comm: Vec<RawLink>,
        #[serde(default)]
        options: RawOptions,
    }

    #[derive(Deserialize)]
    #[serde(deny_unknown_fields)]
    struct Region {
        id: String,
        size_bits: i64,
    }

    #[derive(Deserialize)]
    #[serde(deny_unknown_fields)]
    struct Algorithm {
        id: String,
        #[serde(default)]
        exec_time: RawExec,
        memory: RawMemory,
        #[serde(default)]
        space_rank: i64,
        #[serde(default)]
        space_label: Option<String>,
        #[serde(default)]
        allowed_locations: Option<Vec<String>>,
    }

    #[derive(Deserialize, Default)]
    #[serde(deny_unknown_fields)]
    struct RawExec {
        edge: Option<f64>,
        fog: Option<f64>,
        cloud: Option<f64>,
        #[serde(default)]
        overrides: BTreeMap<String, f64>,
    }

    #[derive(Deserialize)]
    #[serde(deny_unknown_fields)]
    struct RawMemory {
        #[serde(default)]
        inputs: Vec<String>,
        #[serde(default)]
        outputs: Vec<String>,
        #[serde(default)]
        processing_bits: i64,
        #[serde(default)]
        growth_per_step: Growth,
    }

    #[derive(Deserialize)]
    #[serde(deny_unknown_fields)]
    struct RawLink {
        from: String,
        to: String,
        base_seconds: f64,
        #[serde(default)]
        delay: Option<RawDelay>,
        #[serde(default)]
        per_byte_seconds: f64,
    }

    #[derive(Deserialize)]
    #[serde(deny_unknown_fields)]
    struct RawDelay {
        mu: f64,
        sigma: f64,
    }

    #[derive(Deserialize)]
    #[serde(deny_unknown_fields, default)]
    struct RawOptions {
        time_aggregate: TimeAggregate,
        memory_weight: f64,
        time_weight: f64,
        boundedness_horizon: i64,
    }

    impl Default for RawOptions {
        fn default() -> Self {
            let o = Options::default();
            RawOptions {
                time_aggregate: o.time_aggregate,
                memory_weight: o.memory_weight,
                time_weight: o.time_weight,
                boundedness_horizon: o.boundedness_horizon as i64,
            }
        }
    }

    fn non_negative(field: impl Into<String>, value: f64) -> Result<f64, ModelError> {
        if value < 0.0 || value.is_nan() {
            return Err(ModelError::Negative {
                field: field.into(),
                value,
            });
        }
        Ok(value)
    }

    fn non_negative_int(field: impl Into<String>, value: i64) -> Result<u64, ModelError> {
        u64::try_from(value).map_err(|_| ModelError::Negative {
            field: field.into(),
            value: value as f64,
        })
    }

    fn unique<'a>(kind: &'static str, ids: impl Iterator<Item = &'a str>) -> Result<HashSet<String>, ModelError> {
        let mut seen = HashSet::new();
        for id in ids {
            if !seen.insert(id.to_string()) {
                return Err(ModelError::DuplicateId {
                    kind,
                    id: id.to_string(),
                });
            }
        }
        Ok(seen)
    }

    fn known(kind: &'static str, set: &HashSet<String>, id: &str, context: &str) -> Result<(), ModelError> {
        if set.contains(id) {
            Ok(())
        } else {
            Err(ModelError::UnknownId {
                kind,
                id: id.to_string(),
                context: context.to_string(),
            })
        }
    }

    impl Instance {
        pub fn resolve(self) -> Result<ProblemInstance, ModelError> {
            let node_ids = unique("node", self.nodes.iter().map(|n| n.id.as_str()))?;
            let region_ids = unique("region", self.regions.iter().map(|r| r.id.as_str()))?;
            let alg_ids = unique("algorithm", self.algorithms.iter().map(|a| a.id.as_str()))?;

            let mut regions = Vec::with_capacity(self.regions.len());
            for r in &self.regions {
                regions.push(MemoryRegion {
                    id: r.id.clone(),
                    size_bits: non_negative_int(format!("region {} size_bits", r.id), r.size_bits)?,
                });
            }

            let mut algorithms = Vec::with_capacity(self.algorithms.len());
            for a in self.algorithms {
                let ctx = format!("algorithm {}", a.id);
                for (tier, v) in [("edge", a.exec_time.edge), ("fog", a.exec_time.fog), ("cloud", a.exec_time.cloud)] {
                    if let Some(v) = v {
                        non_negative(format!("{ctx} exec_time.{tier}"), v)?;
                    }
                }
                for (node, &v) in &a.exec_time.overrides {
                    known("node", &node_ids, node, &ctx)?;
                    non_negative(format!("{ctx} exec_time.overrides.{node}"), v)?;
                }
                for r in a.memory.inputs.iter().chain(&a.memory.outputs) {
                    known("region", &region_ids, r, &ctx)?;
                }
                if let Some(list) = &a.allowed_locations {
                    for n in list {
                        known("node", &node_ids, n, &ctx)?;
                    }
                }
                let processing_bits = non_negative_int(format!("{ctx} processing_bits"), a.memory.processing_bits)?;
                let space_rank = u32::try_from(a.space_rank).map_err(|_| ModelError::Negative {
                    field: format!("{ctx} space_rank"),
                    value: a.space_rank as f64,
                })?;
                algorithms.push(AlgorithmSpec {
                    id: a.id,
                    exec_time: ExecTime {
                        edge: a.exec_time.edge,
                        fog: a.exec_time.fog,
                        cloud: a.exec_time.cloud,
                        overrides: a.exec_time.overrides,
                    },
                    memory: MemoryProfile {
                        inputs: a.memory.inputs,
                        outputs: a.memory.outputs,
                        processing_bits,
                        growth_per_step: a.memory.growth_per_step,
                    },
                    space_rank,
                    space_label: a.space_label,
                    allowed_locations: a.allowed_locations,
                });
            }

            for (from, to) in &self.edges {
                known("algorithm", &alg_ids, from, "edge list")?;
                known("algorithm", &alg_ids, to, "edge list")?;
                if from == to {
                    return Err(ModelError::SelfLoop(from.clone()));
                }
            }

            let mut comm = Vec::with_capacity(self.comm.len());
            for l in self.comm {
                let ctx = format!("link {}->{}", l.from, l.to);
                known("node", &node_ids, &l.from, &ctx)?;
                known("node", &node_ids, &l.to, &ctx)?;
                non_negative(format!("{ctx} base_seconds"), l.base_seconds)?;
                non_negative(format!("{ctx} per_byte_seconds"), l.per_byte_seconds)?;
                let delay = match l.delay {
                    Some(d) => {
                        non_negative(format!("{ctx} delay.sigma"), d.sigma)?;
                        if !d.mu.is_finite() {
                            return Err(ModelError::BadOption {
                                field: "delay.mu",
                                reason: format!("{ctx}: not finite"),
                            });
                        }
                        Some(DelaySpec { mu: d.mu, sigma: d.sigma })
                    }
                    None => None,
                };
                comm.push(Link {
                    from: l.from,
                    to: l.to,
                    base_seconds: l.base_seconds,
                    delay,
                    per_byte_seconds: l.per_byte_seconds,
                });
            }

            let o = self.options;
            if !(o.memory_weight > 0.0 && o.memory_weight.is_finite()) {
                return Err(ModelError::BadOption {
                    field: "memory_weight",
                    reason: format!("must be positive, got {}", o.memory_weight),
                });
            }
            if !(o.time_weight > 0.0 && o.time_weight.is_finite()) {
                return Err(ModelError::BadOption {
                    field: "time_weight",
                    reason: format!("must be positive, got {}", o.time_weight),
                });
            }
            let boundedness_horizon = u32::try_from(o.boundedness_horizon)
                .ok()
                .filter(|&h| h >= 1)
                .ok_or_else(|| ModelError::BadOption {
                    field: "boundedness_horizon",
                    reason: format!("must be a positive integer, got {}", o.boundedness_horizon),
                })?;

            Ok(ProblemInstance {
                nodes: self.nodes,
                regions,
                algorithms,
                edges: self.edges,
                comm,
                options: Options {
                    time_aggregate: o.time_aggregate,
                    memory_weight: o.memory_weight,
                    time_weight: o.time_weight,
                    boundedness_horizon,
                },
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{
        "nodes": [{"id": "robot", "tier": "edge"}, {"id": "f", "tier": "fog"}],
        "regions": [{"id": "r", "size_bits": 64}],
        "algorithms": [
            {"id": "a", "exec_time": {"edge": 1, "fog": 0.5}, "memory": {"inputs": ["r"], "outputs": [], "processing_bits": 8}, "space_rank": 1},
            {"id": "b", "exec_time": {"edge": 2}, "memory": {"processing_bits": 0}}
        ],
        "edges": [["a", "b"]],
        "comm": [{"from": "robot", "to": "f", "base_seconds": 0.1}]
    }"#;

    #[test]
    fn parses_and_applies_defaults() {
        let inst = parse_problem(MINIMAL).unwrap();
        assert_eq!(inst.algorithms.len(), 2);
        assert_eq!(inst.options, Options::default());
        assert_eq!(inst.comm[0].per_byte_seconds, 0.0);
        assert_eq!(inst.algorithms[1].memory.growth_per_step, [0, 0, 0]);
        assert!(inst.algorithms[0].allows("f"));
    }

    #[test]
    fn empty_document_is_an_empty_instance() {
        let inst = parse_problem("{}").unwrap();
        assert!(inst.algorithms.is_empty());
        assert!(inst.nodes.is_empty());
    }

    #[test]
    fn self_loop_rejected() {
        let text = MINIMAL.replace(r#"[["a", "b"]]"#, r#"[["b", "b"]]"#);
        let err = parse_problem(&text).unwrap_err();
        assert!(matches!(err, ModelError::SelfLoop(ref id) if id == "b"));
        assert!(err.to_string().contains("self-loop"));
    }

    #[test]
    fn syntax_error_reports_position() {
        let err = parse_problem("{\n  \"nodes\": [,]\n}").unwrap_err();
        match err {
            ModelError::Syntax { line, .. } => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn unknown_keys_rejected() {
        let err = parse_problem(r#"{"nodez": []}"#).unwrap_err();
        assert!(matches!(err, ModelError::Syntax { .. }));
    }

    #[test]
    fn reference_errors() {
        let text = MINIMAL.replace(r#""inputs": ["r"]"#, r#""inputs": ["nope"]"#);
        assert!(matches!(parse_problem(&text), Err(ModelError::UnknownId { kind: "region", .. })));

        let text = MINIMAL.replace(r#"[["a", "b"]]"#, r#"[["a", "zz"]]"#);
        assert!(matches!(parse_problem(&text), Err(ModelError::UnknownId { kind: "algorithm", .. })));

        let text = MINIMAL.replace(r#""id": "b""#, r#""id": "a""#);
        assert!(matches!(parse_problem(&text), Err(ModelError::DuplicateId { kind: "algorithm", .. })));
    }

    #[test]
    fn negative_values_rejected() {
        let text = MINIMAL.replace(r#""edge": 1,"#, r#""edge": -1,"#);
        assert!(matches!(parse_problem(&text), Err(ModelError::Negative { .. })));
        let text = MINIMAL.replace(r#""size_bits": 64"#, r#""size_bits": -64"#);
        assert!(matches!(parse_problem(&text), Err(ModelError::Negative { .. })));
        let text = MINIMAL.replace(r#""base_seconds": 0.1"#, r#""base_seconds": -0.1"#);
        assert!(matches!(parse_problem(&text), Err(ModelError::Negative { .. })));
    }

    #[test]
    fn exec_override_wins_over_tier() {
        let mut e = ExecTime::uniform(3.0, 2.0, 1.0);
        e.overrides.insert("f2".into(), 0.25);
        let f1 = LocationNode { id: "f1".into(), tier: Tier::Fog };
        let f2 = LocationNode { id: "f2".into(), tier: Tier::Fog };
        assert_eq!(e.at(&f1), Some(2.0));
        assert_eq!(e.at(&f2), Some(0.25));
    }
}
