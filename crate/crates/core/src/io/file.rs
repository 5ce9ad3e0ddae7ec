//! Problem file: UTF-8 JSON document (schema version 1), see
//! `docs/problem-format.md`.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::FormatError;
use crate::graph::{validate_problem, Edge, NodeKind, NodeRecord, Problem, ProblemMeta};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ProblemFile {
    schema: u32,
    #[serde(default)]
    name: String,
    #[serde(default)]
    source: String,
    nodes: Vec<NodeEntry>,
    edges: Vec<EdgeEntry>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct NodeEntry {
    id: u64,
    x: f64,
    y: f64,
    weight: f64,
    kind: NodeKind,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EdgeEntry {
    u: u64,
    v: u64,
    cost: f64,
}

/// Parses and validates a problem file. Node ids may be arbitrary unique
/// integers; nodes are renumbered densely in file order.
pub fn load_problem(bytes: &[u8]) -> Result<Problem, FormatError> {
    let file: ProblemFile = serde_json::from_slice(bytes).map_err(|e| FormatError::Schema {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    if file.schema != SCHEMA_VERSION {
        return Err(FormatError::Field {
            field: "schema".into(),
            message: format!("unsupported schema version {} (expected {SCHEMA_VERSION})", file.schema),
        });
    }
    let mut index = HashMap::with_capacity(file.nodes.len());
    let mut nodes = Vec::with_capacity(file.nodes.len());
    for (i, n) in file.nodes.iter().enumerate() {
        if index.insert(n.id, i).is_some() {
            return Err(FormatError::Field {
                field: format!("nodes[{i}].id"),
                message: format!("duplicate node id {}", n.id),
            });
        }
        nodes.push(NodeRecord::new(n.x, n.y, n.weight, n.kind));
    }
    let mut edges = Vec::with_capacity(file.edges.len());
    for (i, e) in file.edges.iter().enumerate() {
        let lookup = |id: u64, end: &str| {
            index.get(&id).copied().ok_or_else(|| FormatError::Field {
                field: format!("edges[{i}].{end}"),
                message: format!("unknown node id {id}"),
            })
        };
        edges.push(Edge::new(lookup(e.u, "u")?, lookup(e.v, "v")?, e.cost));
    }
    let problem = Problem::from_parts(nodes, edges)?.with_meta(ProblemMeta {
        name: file.name,
        source: file.source,
    });
    let report = validate_problem(&problem);
    if !report.is_valid() {
        return Err(FormatError::Invalid(report));
    }
    Ok(problem)
}

/// Serializes a problem; ids are the dense node indices.
pub fn save_problem(p: &Problem) -> Vec<u8> {
    let file = ProblemFile {
        schema: SCHEMA_VERSION,
        name: p.meta().name.clone(),
        source: p.meta().source.clone(),
        nodes: p
            .nodes()
            .iter()
            .enumerate()
            .map(|(i, n)| NodeEntry {
                id: i as u64,
                x: n.position.x,
                y: n.position.y,
                weight: n.weight,
                kind: n.kind,
            })
            .collect(),
        edges: p
            .edges()
            .iter()
            .map(|e| EdgeEntry {
                u: e.u as u64,
                v: e.v as u64,
                cost: e.cost,
            })
            .collect(),
    };
    let mut out = serde_json::to_vec_pretty(&file).expect("problem file serializes");
    out.push(b'\n');
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sample() -> Problem {
        Problem::new(
            vec![
                NodeRecord::terminal(0.0, 0.0),
                NodeRecord::waypoint(1.0, 0.5, 0.25),
                NodeRecord::new(2.0, 0.0, 0.0, NodeKind::Distributor),
            ],
            vec![Edge::new(0, 1, 0.125), Edge::new(1, 2, 1.0 / 3.0)],
        )
        .unwrap()
        .with_meta(ProblemMeta {
            name: "sample".into(),
            source: "unit".into(),
        })
    }

    #[test]
    fn round_trip_is_identity() {
        let p = sample();
        let bytes = save_problem(&p);
        let q = load_problem(&bytes).unwrap();
        assert_eq!(p, q);
        assert_eq!(save_problem(&q), bytes);
    }

    #[test]
    fn unknown_node_reference_is_a_schema_error() {
        let text = r#"{"schema":1,"nodes":[{"id":7,"x":0,"y":0,"weight":0,"kind":"terminal"}],
            "edges":[{"u":7,"v":9,"cost":1}]}"#;
        match load_problem(text.as_bytes()) {
            Err(FormatError::Field { field, message }) => {
                assert_eq!(field, "edges[0].v");
                assert!(message.contains("9"));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn negative_cost_is_a_validation_error() {
        let text = r#"{"schema":1,"nodes":[
            {"id":0,"x":0,"y":0,"weight":0,"kind":"terminal"},
            {"id":1,"x":1,"y":0,"weight":0,"kind":"terminal"}],
            "edges":[{"u":0,"v":1,"cost":-2}]}"#;
        assert!(matches!(load_problem(text.as_bytes()), Err(FormatError::Invalid(_))));
    }

    #[test]
    fn malformed_json_reports_line() {
        let text = "{\n\"schema\": 1,\n\"nodes\": [,]\n}";
        match load_problem(text.as_bytes()) {
            Err(FormatError::Schema { line, .. }) => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
    }

    proptest! {
        #[test]
        fn save_load_is_byte_stable(
            n in 2usize..8,
            weights in proptest::collection::vec(0.0f64..10.0, 8),
            costs in proptest::collection::vec(0.0f64..100.0, 8),
        ) {
            let nodes = (0..n)
                .map(|i| if i % 3 == 0 {
                    NodeRecord::terminal(i as f64 * 1.5, -(i as f64))
                } else {
                    NodeRecord::waypoint(i as f64 * 1.5, i as f64 / 7.0, weights[i])
                })
                .collect();
            let edges = (1..n).map(|i| Edge::new(i - 1, i, costs[i])).collect();
            let p = Problem::new(nodes, edges).unwrap();
            let once = save_problem(&load_problem(&save_problem(&p)).unwrap());
            prop_assert_eq!(&once, &save_problem(&p));
            prop_assert_eq!(load_problem(&once).unwrap(), p);
        }
    }
}
