use super::{edge_subproblem, SimplifiedProblem, SimplifyError};
use crate::graph::{connect_terminals, EdgeId, Problem, UnionFind};
use crate::rng::stage_rng;
use crate::solvers::physarum::{run_dynamics, PhysarumParams};

/// Runs the Physarum dynamics once and keeps the edges whose conductivity is
/// at least `keep_threshold` (default `α·ε`, the smallest conductivity an
/// uncut edge can have with μ = 1). Terminals cut off by the threshold are
/// reconnected along shortest paths; fragments without terminals are dropped.
pub fn physarum_simplify(p: &Problem, params: &PhysarumParams, keep_threshold: Option<f64>) -> Result<SimplifiedProblem, SimplifyError> {
    let threshold = keep_threshold.unwrap_or(params.alpha * params.epsilon);
    let kept: Vec<EdgeId> = if p.terminals().len() < 2 {
        Vec::new()
    } else {
        let mut rng = stage_rng(params.seed, "physarum-simplify", 0);
        let dynamics = run_dynamics(p, params, &mut rng, 0, false)?;
        (0..p.edge_count()).filter(|&e| dynamics.state.conductivity[e] >= threshold).collect()
    };
    let joined = connect_terminals(p, &kept)?;
    let mut uf = UnionFind::new(p.node_count());
    for &e in &joined {
        uf.union(p.edge(e).u, p.edge(e).v);
    }
    let root = uf.find(p.terminals()[0]);
    let edges: Vec<EdgeId> = joined.into_iter().filter(|&e| uf.find(p.edge(e).u) == root).collect();
    edge_subproblem(p, &edges)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{Edge, NodeRecord};

    fn ladder() -> Problem {
        let mut nodes = Vec::new();
        for i in 0..10 {
            let (x, y) = ((i % 5) as f64, (i / 5) as f64);
            nodes.push(if i == 0 || i == 9 || i == 4 { NodeRecord::terminal(x, y) } else { NodeRecord::waypoint(x, y, 1.0) });
        }
        let mut edges = Vec::new();
        for i in 0..4 {
            edges.push(Edge::new(i, i + 1, 1.0 + 0.1 * i as f64));
            edges.push(Edge::new(i + 5, i + 6, 0.8));
        }
        for i in 0..5 {
            edges.push(Edge::new(i, i + 5, 1.0));
        }
        Problem::new(nodes, edges).unwrap()
    }

    #[test]
    fn zero_threshold_keeps_the_whole_graph() {
        let p = ladder();
        let sp = physarum_simplify(&p, &PhysarumParams::default(), Some(0.0)).unwrap();
        assert_eq!(sp.problem, p.clone().with_meta(p.meta().clone()));
        assert_eq!(sp.node_map, (0..p.node_count()).collect::<Vec<_>>());
    }

    #[test]
    fn infinite_threshold_leaves_the_reconnection_skeleton() {
        let p = ladder();
        let sp = physarum_simplify(&p, &PhysarumParams::default(), Some(f64::INFINITY)).unwrap();
        let skeleton = edge_subproblem(&p, &connect_terminals(&p, &[]).unwrap()).unwrap();
        assert_eq!(sp, skeleton);
    }

    #[test]
    fn default_threshold_output_spans_terminals() {
        let p = ladder();
        let params = PhysarumParams {
            iterations: 60,
            seed: 4,
            ..Default::default()
        };
        let sp = physarum_simplify(&p, &params, None).unwrap();
        assert_eq!(sp.problem.terminals().len(), 3);
        assert!(sp.problem.edge_count() < p.edge_count());
        assert_eq!(sp, physarum_simplify(&p, &params, None).unwrap());
    }
}
