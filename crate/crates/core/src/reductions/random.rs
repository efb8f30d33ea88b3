use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{RapError, Result};
use crate::graph::BipartiteMultigraph;
use crate::instance::{check_feasible_any, RapInstance};

#[derive(Debug, Clone, PartialEq)]
pub struct RandomParams {
    pub n_r: usize,
    pub n_t: usize,
    pub edge_prob: f64,
    pub vuln_prob: f64,
    /// Inclusive range of integer costs.
    pub cost_range: (u32, u32),
    pub seed: u64,
}

const MAX_ATTEMPTS: usize = 100;

/// A feasible random instance: each of the `n_r * n_t` pairs becomes an edge
/// with probability `edge_prob` (in row-major order), each edge is
/// vulnerable with probability `vuln_prob`, and costs are uniform integers.
/// Draws are repeated from the same stream until the instance is feasible.
pub fn random_instance(p: &RandomParams) -> Result<RapInstance> {
    if !(0.0..=1.0).contains(&p.edge_prob) || !(0.0..=1.0).contains(&p.vuln_prob) || p.cost_range.0 > p.cost_range.1 {
        return Err(RapError::InvalidInstance(format!("bad random parameters {p:?}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    for _ in 0..MAX_ATTEMPTS {
        let mut edges = Vec::new();
        let mut vulnerable = Vec::new();
        let mut costs = Vec::new();
        for r in 0..p.n_r {
            for t in 0..p.n_t {
                if rng.random_bool(p.edge_prob) {
                    if rng.random_bool(p.vuln_prob) {
                        vulnerable.push(edges.len());
                    }
                    costs.push(rng.random_range(p.cost_range.0..=p.cost_range.1) as f64);
                    edges.push((r, t));
                }
            }
        }
        let g = BipartiteMultigraph::from_edges(p.n_r, p.n_t, edges)?;
        let inst = RapInstance::new(g, vulnerable, costs)?;
        if check_feasible_any(&inst)? {
            return Ok(inst);
        }
    }
    Err(RapError::GenerationFailed(MAX_ATTEMPTS))
}
