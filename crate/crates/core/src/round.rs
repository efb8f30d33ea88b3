//! Randomized LP rounding.
//!
//! The relaxation is solved once. Starting from the empty set, each round
//! picks the lowest uncovered scenario, samples a perfect matching from the
//! decomposition of that scenario's LP block, and adds the sampled edges
//! that join two different components of the current selection. Instances
//! with invulnerable edges are first made uniform by doubling those edges.

use std::fmt::{self, Write as _};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::decompose::birkhoff_decompose;
use crate::error::{RapError, Result, Scenario};
use crate::graph::{components_with_flags, EdgeId};
use crate::instance::{first_failure, prune_to_minimal, uniformize, verify_solution, InstanceMapping, RapInstance, Solution};
use crate::lp::{build_lp, solve_lp, FractionalSolution, Tolerances};
use crate::unionfind::UnionFind;

#[derive(Debug, Clone)]
pub struct RoundConfig {
    pub tol: Tolerances,
    /// Support threshold for the decomposition.
    pub eps: f64,
    /// Recheck after every round that each component of the selection is
    /// matching-covered and that the fast uncovered-edge test agrees with
    /// the direct one.
    pub check_invariants: bool,
    /// Skip the final minimality pass.
    pub skip_prune: bool,
}

impl Default for RoundConfig {
    fn default() -> Self {
        RoundConfig { tol: Tolerances::default(), eps: 1e-9, check_invariants: cfg!(debug_assertions), skip_prune: false }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IterationRecord {
    pub scenario: Scenario,
    /// Index of the sampled term and the number of terms.
    pub term: usize,
    pub terms: usize,
    pub added: Vec<EdgeId>,
    pub components_before: usize,
    pub components_after: usize,
}

/// What the rounding loop did. Edge ids refer to the working instance,
/// which is the uniformized one when the input was not uniform.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RoundTrace {
    pub seed: u64,
    pub lp_objective: f64,
    pub lp_iterations: usize,
    pub working_edges: usize,
    pub uniformized: bool,
    pub iterations: Vec<IterationRecord>,
    /// Selection size before decoding and pruning.
    pub rounded_size: usize,
}

impl fmt::Display for RoundTrace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "# seed {}", self.seed)?;
        writeln!(f, "# lp objective {} after {} pivots", self.lp_objective, self.lp_iterations)?;
        writeln!(f, "# working edges {} uniformized {}", self.working_edges, self.uniformized)?;
        for (i, it) in self.iterations.iter().enumerate() {
            let mut ids = String::new();
            for (j, e) in it.added.iter().enumerate() {
                let _ = write!(ids, "{}{e}", if j == 0 { "" } else { "," });
            }
            if ids.is_empty() {
                ids.push('-');
            }
            writeln!(
                f,
                "iter {i} scenario {} term {}/{} added {ids} components {} -> {}",
                it.scenario,
                it.term + 1,
                it.terms,
                it.components_before,
                it.components_after
            )?;
        }
        writeln!(f, "# rounded size {}", self.rounded_size)
    }
}

/// Lowest-id vulnerable edge `f` such that `x` minus `f` has no perfect
/// matching, or `None` if `x` survives every failure.
pub fn uncovered_vulnerable_edge(inst: &RapInstance, x: &[EdgeId]) -> Option<EdgeId> {
    let mut mask = vec![false; inst.num_edges()];
    for &e in x {
        mask[e] = true;
    }
    first_failure(inst, &mask).and_then(Scenario::edge)
}

/// Disjoint sets of the unified node numbering joined along `mask`.
fn components_of(inst: &RapInstance, mask: &[bool]) -> UnionFind {
    let g = inst.graph();
    let mut uf = UnionFind::new(g.num_nodes());
    for e in (0..g.num_edges()).filter(|&e| mask[e]) {
        let (a, b) = g.edge_nodes(e);
        uf.union(a, b);
    }
    uf
}

/// Sampled edges to add: those joining two different components of `uf`,
/// plus those parallel to the failed edge (which alone can cover an
/// isolated edge in a multigraph).
fn crossing_edges(
    inst: &RapInstance,
    uf: &mut UnionFind,
    frac: &FractionalSolution,
    scenario: Scenario,
    eps: f64,
    rng: &mut ChaCha8Rng,
) -> Result<(Vec<EdgeId>, usize, usize)> {
    let g = inst.graph();
    let block = frac.block(scenario).expect("the LP has a block for every scenario");
    let cc = birkhoff_decompose(g, scenario.edge(), block, eps)?;
    let term = cc.sample_index(rng);
    let added = cc.terms()[term]
        .1
        .edges()
        .iter()
        .copied()
        .filter(|&e| {
            let (a, b) = g.edge_nodes(e);
            !uf.same(a, b) || scenario.edge().is_some_and(|f| g.parallel(e, f))
        })
        .collect();
    Ok((added, term, cc.len()))
}

/// One round for the uncovered scenario `f`: the sampled edges that would be
/// added to the selection `x_set`.
pub fn rounding_iteration(
    inst: &RapInstance,
    x_set: &[EdgeId],
    frac: &FractionalSolution,
    f: Scenario,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<EdgeId>> {
    let mut mask = vec![false; inst.num_edges()];
    for &e in x_set {
        mask[e] = true;
    }
    let mut uf = components_of(inst, &mask);
    crossing_edges(inst, &mut uf, frac, f, 1e-9, rng).map(|(added, _, _)| added)
}

/// The uncovered scenario of a selection whose components are all
/// matching-covered: any scenario if some node is uncovered, otherwise the
/// lowest vulnerable edge forming a component on its own.
fn uncovered_fast(inst: &RapInstance, mask: &[bool], uf: &mut UnionFind) -> Option<Scenario> {
    let g = inst.graph();
    let mut degree = vec![0usize; g.num_nodes()];
    let mut comp_edges = vec![0usize; g.num_nodes()];
    for e in (0..g.num_edges()).filter(|&e| mask[e]) {
        let (a, b) = g.edge_nodes(e);
        degree[a] += 1;
        degree[b] += 1;
        comp_edges[uf.find(a)] += 1;
    }
    if degree.contains(&0) {
        return inst.scenarios().first().copied();
    }
    (0..g.num_edges())
        .filter(|&e| mask[e] && inst.is_vulnerable(e))
        .find(|&e| {
            let root = uf.find(g.edge_nodes(e).0);
            uf.set_size(root) == 2 && comp_edges[root] == 1
        })
        .map(Scenario::Edge)
}

/// Solves the relaxation once and rounds it for any number of seeds.
#[derive(Debug, Clone)]
pub struct LpRounder {
    original: RapInstance,
    mapping: Option<InstanceMapping>,
    frac: FractionalSolution,
    cfg: RoundConfig,
}

impl LpRounder {
    pub fn new(inst: &RapInstance, cfg: RoundConfig) -> Result<Self> {
        inst.require_balanced()?;
        let mapping = if inst.vulnerable_edges().is_empty() || inst.is_uniform() { None } else { Some(uniformize(inst)?) };
        let working = mapping.as_ref().map_or(inst, |m| &m.instance);
        let lp = build_lp(working)?;
        let frac = solve_lp(&lp, cfg.tol)?;
        Ok(LpRounder { original: inst.clone(), mapping, frac, cfg })
    }

    pub fn fractional(&self) -> &FractionalSolution {
        &self.frac
    }

    /// The instance the rounding loop runs on.
    pub fn working(&self) -> &RapInstance {
        self.mapping.as_ref().map_or(&self.original, |m| &m.instance)
    }

    pub fn run(&self, seed: u64) -> Result<(Solution, RoundTrace)> {
        let inst = self.working();
        let g = inst.graph();
        let m = g.num_edges();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut mask = vec![false; m];
        let mut uf = UnionFind::new(g.num_nodes());
        let mut trace = RoundTrace {
            seed,
            lp_objective: self.frac.objective,
            lp_iterations: self.frac.iterations,
            working_edges: m,
            uniformized: self.mapping.is_some(),
            ..RoundTrace::default()
        };
        loop {
            let next = if mask.iter().any(|&b| b) && !inst.vulnerable_edges().is_empty() {
                uncovered_fast(inst, &mask, &mut uf)
            } else {
                first_failure(inst, &mask)
            };
            if self.cfg.check_invariants {
                let direct = first_failure(inst, &mask);
                if direct != next {
                    return Err(RapError::InvalidInstance(format!(
                        "uncovered-edge shortcut disagrees: fast {next:?}, direct {direct:?}"
                    )));
                }
            }
            let Some(scenario) = next else { break };
            if trace.iterations.len() > m {
                return Err(RapError::IterationLimit(trace.iterations.len()));
            }
            let before = uf.count();
            let (added, term, terms) = crossing_edges(inst, &mut uf, &self.frac, scenario, self.cfg.eps, &mut rng)?;
            for &e in &added {
                mask[e] = true;
                let (a, b) = g.edge_nodes(e);
                uf.union(a, b);
            }
            if self.cfg.check_invariants {
                if let Some(c) = components_with_flags(g, &mask).iter().find(|c| !c.edges.is_empty() && !c.matching_covered)
                {
                    return Err(RapError::InvalidInstance(format!(
                        "selection component on nodes {:?} is not matching-covered",
                        c.nodes
                    )));
                }
            }
            trace.iterations.push(IterationRecord {
                scenario,
                term,
                terms,
                added,
                components_before: before,
                components_after: uf.count(),
            });
        }
        let rounded = Solution::from_mask(inst, &mask);
        trace.rounded_size = rounded.len();
        let decoded = match &self.mapping {
            Some(map) => map.decode(&self.original, &rounded),
            None => rounded,
        };
        let out = if self.cfg.skip_prune { decoded } else { prune_to_minimal(&self.original, &decoded)? };
        verify_solution(&self.original, &out)?;
        Ok((out, trace))
    }
}

/// Rounds the relaxation of `inst` with the given seed.
pub fn solve_lp_round(inst: &RapInstance, seed: u64) -> Result<(Solution, RoundTrace)> {
    LpRounder::new(inst, RoundConfig::default())?.run(seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::BipartiteMultigraph;

    fn c4() -> RapInstance {
        RapInstance::uniform_unit(BipartiteMultigraph::from_edges(2, 2, [(0, 0), (1, 0), (1, 1), (0, 1)]).unwrap())
    }

    #[test]
    fn uncovered_examples() {
        let inst = c4();
        assert_eq!(uncovered_vulnerable_edge(&inst, &[]), Some(0));
        assert_eq!(uncovered_vulnerable_edge(&inst, &[0, 2]), Some(0));
        assert_eq!(uncovered_vulnerable_edge(&inst, &[0, 1, 2, 3]), None);
    }

    #[test]
    fn c4_rounds_to_all_edges() {
        let inst = c4();
        for seed in 0..5 {
            let (x, trace) = solve_lp_round(&inst, seed).unwrap();
            assert_eq!(x.edges(), &[0, 1, 2, 3]);
            assert_eq!(trace.iterations.len(), 2);
            assert_eq!(trace.iterations[1].added.len(), 2);
        }
    }

    #[test]
    fn iteration_on_perfect_matching_adds_complement() {
        let inst = c4();
        let rounder = LpRounder::new(&inst, RoundConfig::default()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let added = rounding_iteration(&inst, &[0, 2], rounder.fractional(), Scenario::Edge(0), &mut rng).unwrap();
        assert_eq!(added, vec![1, 3]);
        let none = rounding_iteration(&inst, &[0, 1, 2, 3], rounder.fractional(), Scenario::Edge(0), &mut rng).unwrap();
        assert!(none.is_empty());
    }

    #[test]
    fn nominal_gives_min_cost_matching() {
        let g = BipartiteMultigraph::from_edges(2, 2, [(0, 0), (1, 0), (1, 1), (0, 1)]).unwrap();
        let inst = RapInstance::new(g, [], vec![1.0, 5.0, 2.0, 4.0]).unwrap();
        let (x, trace) = solve_lp_round(&inst, 3).unwrap();
        assert_eq!(x.edges(), &[0, 2]);
        assert_eq!(trace.iterations.len(), 1);
    }

    #[test]
    fn invulnerable_parallel_pair_terminates() {
        // One vulnerable edge with an invulnerable parallel partner.
        let g = BipartiteMultigraph::from_edges(1, 1, [(0, 0), (0, 0)]).unwrap();
        let inst = RapInstance::new(g, [0], vec![1.0, 1.0]).unwrap();
        for seed in 0..4 {
            let (x, _) = solve_lp_round(&inst, seed).unwrap();
            assert_eq!(x.edges(), &[1]);
        }
    }

    #[test]
    fn trace_lines() {
        let (_, trace) = solve_lp_round(&c4(), 1).unwrap();
        let text = trace.to_string();
        assert!(text.contains("iter 0 scenario e0 term 1/1 added "));
        assert!(text.contains("components 4 -> 2"));
    }
}
