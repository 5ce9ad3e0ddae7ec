//! Steiner tree solvers: metric-closure baseline, exhaustive oracle,
//! evolutionary algorithm, simulated annealing, Physarum dynamics and the
//! depth-indexed QUBO formulation.

mod baseline;
mod ea;
pub mod physarum;
pub mod qubo;
mod sa;

use thiserror::Error;

use crate::graph::{GraphError, NodeId, PathCache, SteinerTree};
use crate::rng::StageRng;

pub use baseline::{solve_baseline, solve_exact, EXACT_GUARD};
pub use ea::{ea_crossover, ea_mutate, solve_ea, EaParams, PopulationStats};
pub use physarum::{solve_physarum, PhysarumParams};
pub use qubo::{solve_qubo, QuboParams};
pub use sa::{sa_accept, sa_propose, solve_sa, SaParams, SaState};

#[derive(Debug, Error)]
pub enum SolverError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("{nonterminals} non-terminals exceed the enumeration guard of {limit}")]
    GuardExceeded { nonterminals: usize, limit: usize },
    #[error(transparent)]
    Physarum(#[from] physarum::PhysarumError),
    #[error(transparent)]
    Qubo(#[from] qubo::QuboError),
}

/// Each non-terminal is selected independently with probability `p_select`;
/// the tree spans terminals plus the selection.
pub(crate) fn random_tree(
    cache: &mut PathCache<'_>,
    steiner: &[NodeId],
    p_select: f64,
    rng: &mut StageRng,
) -> Result<SteinerTree, GraphError> {
    use rand::Rng;
    let extra: Vec<NodeId> = steiner.iter().copied().filter(|_| rng.random_bool(p_select)).collect();
    crate::graph::tree_from_keys(cache, &extra)
}

/// Probability used when drawing random selections.
pub const RANDOM_SELECT_P: f64 = 0.3;
