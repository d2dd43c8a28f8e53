//! Admissibility checks run before any solver operation.

use std::fmt;

use serde::Serialize;

use crate::comm::CommGraph;
use crate::lattice::Dag;
use crate::memory::{classify_all, effective_locations};
use crate::model::{ProblemInstance, Tier};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    Cycle { members: Vec<String> },
    NoEdgeNode,
    SingleRobot { edge_nodes: Vec<String> },
    MissingExecTime { algorithm: String, node: String },
    NoAllowedLocation { algorithm: String },
    UnreachableLocation { algorithm: String, node: String },
    UnreachableDependency { from: String, to: String },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Cycle { members } => write!(f, "cycle among {{{}}}", members.join(", ")),
            Violation::NoEdgeNode => write!(f, "no edge-tier node"),
            Violation::SingleRobot { edge_nodes } => {
                write!(f, "single-robot violation: edge-tier nodes {}", edge_nodes.join(", "))
            }
            Violation::MissingExecTime { algorithm, node } => {
                write!(f, "missing execution time for `{algorithm}` on `{node}`")
            }
            Violation::NoAllowedLocation { algorithm } => write!(f, "`{algorithm}` has no admissible location"),
            Violation::UnreachableLocation { algorithm, node } => {
                write!(f, "allowed location `{node}` of `{algorithm}` cannot exchange data with the robot")
            }
            Violation::UnreachableDependency { from, to } => {
                write!(f, "no allowed locations of `{from}` and `{to}` are connected")
            }
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_empty(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for v in &self.violations {
            writeln!(f, "{v}")?;
        }
        Ok(())
    }
}

/// Lists every violation; an empty report means the instance is admissible.
pub fn validate(instance: &ProblemInstance) -> ValidationReport {
    let mut violations = Vec::new();

    let dag = Dag::from_instance(instance);
    for members in dag.cycles() {
        violations.push(Violation::Cycle { members });
    }

    let edges: Vec<&str> = instance
        .nodes
        .iter()
        .filter(|n| n.tier == Tier::Edge)
        .map(|n| n.id.as_str())
        .collect();
    match edges.len() {
        0 if !instance.algorithms.is_empty() => violations.push(Violation::NoEdgeNode),
        0 | 1 => {}
        _ => violations.push(Violation::SingleRobot {
            edge_nodes: edges.iter().map(|s| s.to_string()).collect(),
        }),
    }

    let graph = CommGraph::new(instance);
    let edge_index = instance.edge_node().and_then(|e| instance.node_index(&e.id));
    let verdicts = classify_all(instance);
    let mut locations = Vec::with_capacity(instance.algorithms.len());
    for (alg, verdict) in instance.algorithms.iter().zip(&verdicts) {
        let locs = effective_locations(instance, alg, verdict);
        if locs.is_empty() {
            violations.push(Violation::NoAllowedLocation {
                algorithm: alg.id.clone(),
            });
        }
        for id in &locs {
            let node = instance.node(id).expect("effective locations are declared nodes");
            if alg.exec_time.at(node).is_none() {
                violations.push(Violation::MissingExecTime {
                    algorithm: alg.id.clone(),
                    node: id.clone(),
                });
            }
            if let Some(e) = edge_index {
                let n = instance.node_index(id).expect("declared node");
                if graph.cheapest_path(e, n, 0).is_none() || graph.cheapest_path(n, e, 0).is_none() {
                    violations.push(Violation::UnreachableLocation {
                        algorithm: alg.id.clone(),
                        node: id.clone(),
                    });
                }
            }
        }
        locations.push(locs);
    }

    for (from, to) in &instance.edges {
        let (Some(u), Some(v)) = (instance.algorithm_index(from), instance.algorithm_index(to)) else {
            continue;
        };
        let connected = locations[u].iter().any(|a| {
            locations[v].iter().any(|b| {
                let (ia, ib) = (instance.node_index(a).unwrap(), instance.node_index(b).unwrap());
                graph.cheapest_path(ia, ib, 0).is_some()
            })
        });
        if !connected && !locations[u].is_empty() && !locations[v].is_empty() {
            violations.push(Violation::UnreachableDependency {
                from: from.clone(),
                to: to.clone(),
            });
        }
    }

    ValidationReport { violations }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::model::LocationNode;

    #[test]
    fn bundled_instances_are_admissible() {
        for (name, inst) in fixtures::bundled() {
            if name == "cycle.json" {
                continue;
            }
            assert!(validate(&inst).is_empty(), "{name}: {}", validate(&inst));
        }
    }

    #[test]
    fn reports_cycle() {
        let r = validate(&fixtures::cycle());
        assert_eq!(
            r.violations,
            vec![Violation::Cycle {
                members: vec!["A".into(), "B".into(), "C".into()]
            }]
        );
    }

    #[test]
    fn two_robots() {
        let mut inst = fixtures::example2(1.0);
        inst.nodes.push(LocationNode { id: "edge2".into(), tier: Tier::Edge });
        let r = validate(&inst);
        assert!(r.to_string().contains("single-robot violation"));
    }

    #[test]
    fn missing_time_and_unreachable_node() {
        let mut inst = fixtures::example2(1.0);
        inst.algorithms[0].exec_time.cloud = None;
        inst.nodes.push(LocationNode { id: "island".into(), tier: Tier::Fog });
        let r = validate(&inst);
        assert!(r.violations.contains(&Violation::MissingExecTime {
            algorithm: "sort".into(),
            node: "cloud".into()
        }));
        assert!(r.violations.contains(&Violation::UnreachableLocation {
            algorithm: "sort".into(),
            node: "island".into()
        }));
    }

    #[test]
    fn unbounded_without_cloud() {
        let mut inst = fixtures::example2(1.0);
        inst.algorithms[0].memory.growth_per_step = [0, 0, 1024];
        inst.algorithms[0].allowed_locations = Some(vec!["edge".into(), "fog".into()]);
        assert_eq!(
            validate(&inst).violations,
            vec![Violation::NoAllowedLocation { algorithm: "sort".into() }]
        );
    }
}
