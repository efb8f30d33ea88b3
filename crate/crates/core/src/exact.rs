//! Exact optima by branch and bound, and simple lower bounds.
//!
//! The search only ever excludes edges while the remaining set stays
//! feasible, so every leaf is feasible. A first pass finds the optimum
//! cost; a second pass, walking edge ids in ascending order, returns the
//! lexicographically smallest optimal edge set.

use std::time::{Duration, Instant};

use crate::error::{RapError, Result};
use crate::graph::EdgeId;
use crate::instance::{balanced_completion, first_failure, mask_feasible, RapInstance, Solution};
use crate::lp::{build_lp, solve_lp, Tolerances};

const COST_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct BnbConfig {
    /// Largest number of (original) edges accepted.
    pub max_edges: usize,
    /// Search nodes over both passes.
    pub node_limit: Option<u64>,
    pub time_limit: Option<Duration>,
}

impl Default for BnbConfig {
    fn default() -> Self {
        BnbConfig { max_edges: 26, node_limit: None, time_limit: None }
    }
}

impl BnbConfig {
    pub fn with_max_edges(max_edges: usize) -> Self {
        BnbConfig { max_edges, ..Self::default() }
    }
}

/// Search statistics of one [`solve_exact_with_stats`] call.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct BnbStats {
    pub nodes: u64,
    pub feasibility_checks: u64,
}

pub fn solve_exact(inst: &RapInstance, cfg: &BnbConfig) -> Result<Solution> {
    solve_exact_with_stats(inst, cfg).map(|(x, _)| x)
}

/// Minimum-cost solution. Unbalanced instances are solved on their balanced
/// completion with every dummy edge fixed in.
pub fn solve_exact_with_stats(inst: &RapInstance, cfg: &BnbConfig) -> Result<(Solution, BnbStats)> {
    let m = inst.num_edges();
    if m > cfg.max_edges {
        return Err(RapError::TooLarge { edges: m, limit: cfg.max_edges });
    }
    let map = balanced_completion(inst);
    let work = &map.instance;
    if let Some(s) = first_failure(work, &vec![true; work.num_edges()]) {
        return Err(RapError::InfeasibleInstance(s));
    }
    let mut search = Search::new(work, m, cfg);

    let mut by_cost: Vec<EdgeId> = (0..m).collect();
    by_cost.sort_by(|&a, &b| inst.cost(b).total_cmp(&inst.cost(a)).then(a.cmp(&b)));
    search.best = work.cost_of(&(0..m).collect::<Vec<_>>()) + COST_TOL;
    search.optimize(&by_cost, 0, 0.0)?;
    let optimum = search.best;

    let by_id: Vec<EdgeId> = (0..m).collect();
    search.reset_decisions();
    let found = search.smallest_optimal(&by_id, 0, 0.0, optimum + COST_TOL)?;
    let mask = found.expect("an optimal set exists");
    let edges = (0..m).filter(|&e| mask[e]).collect();
    Ok((Solution::new(inst, edges)?, search.stats))
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Decision {
    Open,
    In,
    Out,
}

struct Search<'a> {
    inst: &'a RapInstance,
    /// Edges at or above this id are dummies and always present.
    decided_edges: usize,
    decision: Vec<Decision>,
    /// Current candidate set: everything not excluded.
    present: Vec<bool>,
    best: f64,
    stats: BnbStats,
    node_limit: Option<u64>,
    deadline: Option<Instant>,
}

impl<'a> Search<'a> {
    fn new(inst: &'a RapInstance, decided_edges: usize, cfg: &BnbConfig) -> Self {
        Search {
            inst,
            decided_edges,
            decision: vec![Decision::Open; inst.num_edges()],
            present: vec![true; inst.num_edges()],
            best: f64::INFINITY,
            stats: BnbStats::default(),
            node_limit: cfg.node_limit,
            deadline: cfg.time_limit.map(|d| Instant::now() + d),
        }
    }

    fn reset_decisions(&mut self) {
        self.decision.fill(Decision::Open);
        self.present.fill(true);
    }

    fn tick(&mut self) -> Result<()> {
        self.stats.nodes += 1;
        if self.node_limit.is_some_and(|limit| self.stats.nodes > limit) {
            return Err(RapError::SearchLimit(format!("node limit of {} reached", self.stats.nodes - 1)));
        }
        if self.stats.nodes.is_multiple_of(256) && self.deadline.is_some_and(|d| Instant::now() > d) {
            return Err(RapError::SearchLimit("time limit reached".into()));
        }
        Ok(())
    }

    fn feasible(&mut self) -> bool {
        self.stats.feasibility_checks += 1;
        mask_feasible(self.inst, &self.present)
    }

    /// Tries to drop `e`; restores it when the rest becomes infeasible.
    fn try_exclude(&mut self, e: EdgeId) -> bool {
        self.present[e] = false;
        if self.feasible() {
            self.decision[e] = Decision::Out;
            true
        } else {
            self.present[e] = true;
            false
        }
    }

    fn undo_exclude(&mut self, e: EdgeId) {
        self.present[e] = true;
        self.decision[e] = Decision::Open;
    }

    /// Cost still to be paid by any completion of the current decisions.
    /// Every node needs one edge, and two if none of its remaining edges is
    /// invulnerable; the cheapest open edges pay the shortfall, summed over
    /// one side at a time.
    fn degree_bound(&self) -> f64 {
        let g = self.inst.graph();
        let mut sides = [0.0, 0.0];
        let mut open_costs = Vec::new();
        for v in 0..g.num_nodes() {
            let mut have = 0;
            let mut sturdy = false;
            open_costs.clear();
            for &e in g.incident(v) {
                if !self.present[e] {
                    continue;
                }
                sturdy |= !self.inst.is_vulnerable(e);
                match self.decision.get(e) {
                    Some(Decision::Open) if e < self.decided_edges => open_costs.push(self.inst.cost(e)),
                    _ => have += 1,
                }
            }
            let need: usize = if sturdy { 1 } else { 2 };
            let short = need.saturating_sub(have);
            if short > 0 {
                open_costs.sort_by(f64::total_cmp);
                sides[usize::from(v >= g.n_r())] += open_costs.iter().take(short).sum::<f64>();
            }
        }
        sides[0].max(sides[1])
    }

    /// Depth-first over `order`, exclude first; keeps the cheapest leaf.
    fn optimize(&mut self, order: &[EdgeId], depth: usize, included: f64) -> Result<()> {
        self.tick()?;
        if included + self.degree_bound() > self.best - COST_TOL {
            return Ok(());
        }
        let Some(&e) = order.get(depth) else {
            self.best = included;
            return Ok(());
        };
        if self.try_exclude(e) {
            self.optimize(order, depth + 1, included)?;
            self.undo_exclude(e);
        }
        self.decision[e] = Decision::In;
        let res = self.optimize(order, depth + 1, included + self.inst.cost(e));
        self.decision[e] = Decision::Open;
        res
    }

    /// First set in lexicographic order of sorted ids whose cost is within
    /// `budget`. At each edge, stopping here (dropping every later edge) is
    /// smallest, then including the edge, then excluding it.
    fn smallest_optimal(
        &mut self,
        order: &[EdgeId],
        depth: usize,
        included: f64,
        budget: f64,
    ) -> Result<Option<Vec<bool>>> {
        self.tick()?;
        if included + self.degree_bound() > budget {
            return Ok(None);
        }
        let rest = &order[depth..];
        if rest.is_empty() {
            return Ok(Some(self.present.clone()));
        }
        let saved = self.present.clone();
        for &e in rest {
            self.present[e] = false;
        }
        let stop_here = self.feasible();
        self.present = saved;
        if stop_here {
            let mut mask = self.present.clone();
            for &e in rest {
                mask[e] = false;
            }
            return Ok(Some(mask));
        }
        let e = rest[0];
        self.decision[e] = Decision::In;
        let found = self.smallest_optimal(order, depth + 1, included + self.inst.cost(e), budget)?;
        self.decision[e] = Decision::Open;
        if found.is_some() {
            return Ok(found);
        }
        if self.try_exclude(e) {
            let found = self.smallest_optimal(order, depth + 1, included, budget)?;
            self.undo_exclude(e);
            return Ok(found);
        }
        Ok(None)
    }
}

/// Lower bounds on the optimum cost.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LowerBounds {
    /// `2|T|` with every edge vulnerable, `|T|` otherwise; unit costs only.
    /// `T` is the smaller side.
    pub degree: Option<f64>,
    pub lp: f64,
}

impl LowerBounds {
    pub fn value(&self) -> f64 {
        self.degree.map_or(self.lp, |d| d.max(self.lp))
    }
}

pub fn lower_bounds(inst: &RapInstance) -> Result<LowerBounds> {
    let g = inst.graph();
    let tasks = g.n_r().min(g.n_t()) as f64;
    let degree = inst.has_unit_costs().then(|| {
        if inst.is_uniform() && inst.num_edges() > 0 {
            2.0 * tasks
        } else {
            tasks
        }
    });
    let completed = balanced_completion(inst);
    let lp = solve_lp(&build_lp(&completed.instance)?, Tolerances::default())?.objective;
    Ok(LowerBounds { degree, lp })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::BipartiteMultigraph;
    use crate::instance::verify_solution_any;
    use crate::reductions::gk_family;

    fn c4() -> BipartiteMultigraph {
        BipartiteMultigraph::from_edges(2, 2, [(0, 0), (1, 0), (1, 1), (0, 1)]).unwrap()
    }

    #[test]
    fn c4_uniform_needs_everything() {
        let inst = RapInstance::uniform_unit(c4());
        let x = solve_exact(&inst, &BnbConfig::default()).unwrap();
        assert_eq!(x.cost(), 4.0);
        assert_eq!(lower_bounds(&inst).unwrap().value(), 4.0);
    }

    #[test]
    fn g3_optimum_is_hamiltonian() {
        let inst = gk_family(3).unwrap();
        let x = solve_exact(&inst, &BnbConfig::default()).unwrap();
        assert_eq!(x.len(), 8);
        let lb = lower_bounds(&inst).unwrap();
        assert_eq!(lb.degree, Some(8.0));
    }

    #[test]
    fn nominal_is_min_cost_matching() {
        let inst = RapInstance::new(c4(), [], vec![3.0, 1.0, 5.0, 1.0]).unwrap();
        let x = solve_exact(&inst, &BnbConfig::default()).unwrap();
        assert_eq!(x.edges(), &[1, 3]);
        assert!((lower_bounds(&inst).unwrap().lp - 2.0).abs() < 1e-9);
    }

    #[test]
    fn ties_pick_smallest_ids() {
        // Two parallel pairs; any two parallel edges on each side tie.
        let g = BipartiteMultigraph::from_edges(1, 1, [(0, 0), (0, 0), (0, 0)]).unwrap();
        let inst = RapInstance::uniform_unit(g);
        assert_eq!(solve_exact(&inst, &BnbConfig::default()).unwrap().edges(), &[0, 1]);
    }

    #[test]
    fn guards() {
        let inst = gk_family(6).unwrap();
        let err = solve_exact(&inst, &BnbConfig::default()).unwrap_err();
        assert_eq!(err.to_string(), "instance too large for exact solver: 27 edges exceeds limit 26");
        let cfg = BnbConfig { node_limit: Some(3), ..BnbConfig::with_max_edges(40) };
        assert!(matches!(solve_exact(&inst, &cfg), Err(RapError::SearchLimit(_))));
    }

    #[test]
    fn unbalanced_keeps_dummies_out_of_answer() {
        let g = BipartiteMultigraph::from_edges(3, 2, [(0, 0), (1, 0), (1, 1), (2, 1), (2, 0)]).unwrap();
        let inst = RapInstance::uniform_unit(g);
        let x = solve_exact(&inst, &BnbConfig::default()).unwrap();
        verify_solution_any(&inst, &x).unwrap();
        assert_eq!(x.len(), 4);
    }

    #[test]
    fn infeasible_rejected() {
        let g = BipartiteMultigraph::from_edges(1, 1, [(0, 0)]).unwrap();
        assert!(matches!(
            solve_exact(&RapInstance::uniform_unit(g), &BnbConfig::default()),
            Err(RapError::InfeasibleInstance(_))
        ));
    }
}
