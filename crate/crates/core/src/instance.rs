//! Robust assignment instances, solutions and feasibility certificates.
//!
//! An instance is a bipartite multigraph, a set of vulnerable edges and a
//! non-negative cost per edge. An edge set `X` is feasible when, for every
//! vulnerable edge `f`, `X \ {f}` still contains a perfect matching of the
//! graph (and, if nothing is vulnerable, when `X` contains a perfect
//! matching at all).

use std::collections::BTreeMap;

use crate::error::{RapError, Result, Scenario};
use crate::graph::{BipartiteMultigraph, EdgeId, MatchState, Matching};

#[derive(Debug, Clone, PartialEq)]
pub struct RapInstance {
    graph: BipartiteMultigraph,
    vulnerable: Vec<bool>,
    costs: Vec<f64>,
}

impl RapInstance {
    pub fn new<I>(graph: BipartiteMultigraph, vulnerable: I, costs: Vec<f64>) -> Result<Self>
    where
        I: IntoIterator<Item = EdgeId>,
    {
        let m = graph.num_edges();
        if costs.len() != m {
            return Err(RapError::InvalidInstance(format!("{} costs for {m} edges", costs.len())));
        }
        if let Some((e, c)) = costs.iter().enumerate().find(|(_, c)| !(c.is_finite() && **c >= 0.0)) {
            return Err(RapError::InvalidInstance(format!("edge e{e} has invalid cost {c}")));
        }
        let mut mask = vec![false; m];
        for f in vulnerable {
            if f >= m {
                return Err(RapError::InvalidInstance(format!("vulnerable edge e{f} does not exist")));
            }
            mask[f] = true;
        }
        Ok(RapInstance { graph, vulnerable: mask, costs })
    }

    /// Every edge vulnerable, unit costs.
    pub fn uniform_unit(graph: BipartiteMultigraph) -> Self {
        let m = graph.num_edges();
        RapInstance { graph, vulnerable: vec![true; m], costs: vec![1.0; m] }
    }

    pub fn graph(&self) -> &BipartiteMultigraph {
        &self.graph
    }

    pub fn num_edges(&self) -> usize {
        self.graph.num_edges()
    }

    pub fn costs(&self) -> &[f64] {
        &self.costs
    }

    pub fn cost(&self, e: EdgeId) -> f64 {
        self.costs[e]
    }

    pub fn is_vulnerable(&self, e: EdgeId) -> bool {
        self.vulnerable[e]
    }

    pub fn vulnerable_mask(&self) -> &[bool] {
        &self.vulnerable
    }

    /// Vulnerable edge ids, ascending.
    pub fn vulnerable_edges(&self) -> Vec<EdgeId> {
        (0..self.num_edges()).filter(|&e| self.vulnerable[e]).collect()
    }

    /// True iff every edge is vulnerable.
    pub fn is_uniform(&self) -> bool {
        self.vulnerable.iter().all(|&v| v)
    }

    pub fn has_unit_costs(&self) -> bool {
        self.costs.iter().all(|&c| c == 1.0)
    }

    /// The failure scenarios to guard against: one per vulnerable edge, or
    /// the single nominal scenario when nothing is vulnerable.
    pub fn scenarios(&self) -> Vec<Scenario> {
        let v: Vec<Scenario> = self.vulnerable_edges().into_iter().map(Scenario::Edge).collect();
        if v.is_empty() {
            vec![Scenario::Nominal]
        } else {
            v
        }
    }

    pub fn cost_of(&self, edges: &[EdgeId]) -> f64 {
        edges.iter().map(|&e| self.costs[e]).sum()
    }

    pub(crate) fn require_balanced(&self) -> Result<()> {
        if self.graph.is_balanced() {
            Ok(())
        } else {
            Err(RapError::NeedsCompletion { n_r: self.graph.n_r(), n_t: self.graph.n_t() })
        }
    }
}

/// A chosen edge set with its cached cost.
#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    edges: Vec<EdgeId>,
    cost: f64,
}

impl Solution {
    pub fn new(inst: &RapInstance, mut edges: Vec<EdgeId>) -> Result<Self> {
        edges.sort_unstable();
        edges.dedup();
        if let Some(&e) = edges.iter().find(|&&e| e >= inst.num_edges()) {
            return Err(RapError::InvalidInstance(format!("solution edge e{e} does not exist")));
        }
        let cost = inst.cost_of(&edges);
        Ok(Solution { edges, cost })
    }

    pub(crate) fn from_mask(inst: &RapInstance, mask: &[bool]) -> Self {
        let edges: Vec<EdgeId> = (0..mask.len()).filter(|&e| mask[e]).collect();
        let cost = inst.cost_of(&edges);
        Solution { edges, cost }
    }

    pub fn all_edges(inst: &RapInstance) -> Self {
        Solution::from_mask(inst, &vec![true; inst.num_edges()])
    }

    pub fn edges(&self) -> &[EdgeId] {
        &self.edges
    }

    pub fn cost(&self) -> f64 {
        self.cost
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn contains(&self, e: EdgeId) -> bool {
        self.edges.binary_search(&e).is_ok()
    }

    pub fn mask(&self, m: usize) -> Vec<bool> {
        let mut mask = vec![false; m];
        for &e in &self.edges {
            mask[e] = true;
        }
        mask
    }
}

/// Feasibility witness: for every scenario, a perfect matching inside the
/// solution that avoids the failed edge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Certificate {
    matchings: BTreeMap<Scenario, Matching>,
}

impl Certificate {
    pub fn get(&self, s: Scenario) -> Option<&Matching> {
        self.matchings.get(&s)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Scenario, &Matching)> {
        self.matchings.iter()
    }

    pub fn len(&self) -> usize {
        self.matchings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.matchings.is_empty()
    }
}

/// Runs every scenario against the edge mask `usable`. One maximum matching
/// is computed up front; a scenario whose edge is in it is repaired with a
/// single augmenting-path search. Returns the first failing scenario
/// (ascending id) or, when `collect` is set, all witnesses.
pub(crate) fn scenario_check(
    inst: &RapInstance,
    usable: &[bool],
    collect: bool,
) -> std::result::Result<BTreeMap<Scenario, Matching>, Scenario> {
    let g = inst.graph();
    let mut out = BTreeMap::new();
    let base = MatchState::maximum(g, |e| usable[e]);
    let scenarios = inst.scenarios();
    if !base.is_perfect(g) {
        return Err(scenarios[0]);
    }
    for s in scenarios {
        let witness = match s {
            Scenario::Nominal => Some(base.clone()),
            Scenario::Edge(f) => {
                let (r, _) = g.endpoints(f);
                if base.mate_r[r] != Some(f) {
                    Some(base.clone())
                } else {
                    let mut st = base.clone();
                    st.unmatch(g, f);
                    st.augment_from(g, |e| usable[e] && e != f, r).then_some(st)
                }
            }
        };
        match witness {
            Some(st) => {
                if collect {
                    out.insert(s, st.to_matching());
                }
            }
            None => return Err(s),
        }
    }
    Ok(out)
}

/// Feasibility of an edge mask; `None` when feasible.
pub(crate) fn first_failure(inst: &RapInstance, usable: &[bool]) -> Option<Scenario> {
    scenario_check(inst, usable, false).err()
}

pub(crate) fn mask_feasible(inst: &RapInstance, usable: &[bool]) -> bool {
    first_failure(inst, usable).is_none()
}

/// Whether the whole edge set is feasible. Feasibility is monotone, so this
/// decides whether the instance has any feasible solution.
pub fn check_feasible(inst: &RapInstance) -> Result<bool> {
    inst.require_balanced()?;
    Ok(mask_feasible(inst, &vec![true; inst.num_edges()]))
}

/// Like [`check_feasible`] but accepts unbalanced instances by checking
/// their balanced completion.
pub fn check_feasible_any(inst: &RapInstance) -> Result<bool> {
    if inst.graph().is_balanced() {
        check_feasible(inst)
    } else {
        check_feasible(&balanced_completion(inst).instance)
    }
}

/// Certificate for `x`, or the first scenario (ascending edge id) for which
/// `x` minus the failed edge contains no perfect matching.
pub fn verify_solution(inst: &RapInstance, x: &Solution) -> Result<Certificate> {
    inst.require_balanced()?;
    let mask = x.mask(inst.num_edges());
    scenario_check(inst, &mask, true)
        .map(|matchings| Certificate { matchings })
        .map_err(RapError::InfeasibleAt)
}

/// Like [`verify_solution`] but accepts unbalanced instances; the
/// certificate then refers to the balanced completion, with every dummy
/// edge added to `x`.
pub fn verify_solution_any(inst: &RapInstance, x: &Solution) -> Result<Certificate> {
    if inst.graph().is_balanced() {
        return verify_solution(inst, x);
    }
    let map = balanced_completion(inst);
    verify_solution(&map.instance, &map.encode(x))
}

/// Removes edges from a feasible solution until no single edge can go.
/// Candidates are tried once each, by descending cost then descending id;
/// monotonicity makes one pass sufficient.
pub fn prune_to_minimal(inst: &RapInstance, x: &Solution) -> Result<Solution> {
    inst.require_balanced()?;
    let mut mask = x.mask(inst.num_edges());
    if let Some(s) = first_failure(inst, &mask) {
        return Err(RapError::InfeasibleAt(s));
    }
    let mut order = x.edges().to_vec();
    order.sort_by(|&a, &b| inst.cost(b).total_cmp(&inst.cost(a)).then(b.cmp(&a)));
    for e in order {
        mask[e] = false;
        if !mask_feasible(inst, &mask) {
            mask[e] = true;
        }
    }
    Ok(Solution::from_mask(inst, &mask))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MappingKind {
    Identity,
    BalancedCompletion,
    Uniformize,
}

/// An instance transformation carried as data: the transformed instance plus
/// id maps for translating solutions in both directions.
#[derive(Debug, Clone, PartialEq)]
pub struct InstanceMapping {
    pub kind: MappingKind,
    pub instance: RapInstance,
    /// The R and T sides were exchanged before completing.
    pub swapped: bool,
    /// New edge ids an original edge expands to when encoding.
    forward: Vec<Vec<EdgeId>>,
    /// New edge ids added to every encoded solution.
    always: Vec<EdgeId>,
    /// Original edge a new edge decodes to; `None` for added structure.
    back: Vec<Option<EdgeId>>,
}

impl InstanceMapping {
    fn identity(inst: &RapInstance) -> Self {
        let m = inst.num_edges();
        InstanceMapping {
            kind: MappingKind::Identity,
            instance: inst.clone(),
            swapped: false,
            forward: (0..m).map(|e| vec![e]).collect(),
            always: Vec::new(),
            back: (0..m).map(Some).collect(),
        }
    }

    pub fn added_edges(&self) -> usize {
        self.instance.num_edges() - self.forward.len()
    }

    /// Edges added unconditionally on encoding (the dummy edges of a
    /// balanced completion).
    pub fn fixed_edges(&self) -> &[EdgeId] {
        &self.always
    }

    pub fn decode_edge(&self, new: EdgeId) -> Option<EdgeId> {
        self.back[new]
    }

    /// Original-instance solution to transformed-instance solution.
    pub fn encode(&self, x: &Solution) -> Solution {
        let mut edges: Vec<EdgeId> = x.edges().iter().flat_map(|&e| self.forward[e].iter().copied()).collect();
        edges.extend_from_slice(&self.always);
        Solution::new(&self.instance, edges).expect("mapped ids exist")
    }

    /// Transformed-instance solution back to the original instance.
    pub fn decode(&self, original: &RapInstance, x: &Solution) -> Solution {
        let edges = x.edges().iter().filter_map(|&e| self.back[e]).collect();
        Solution::new(original, edges).expect("mapped ids exist")
    }
}

/// Pads the smaller side with dummy nodes joined to every node of the other
/// side by zero-cost invulnerable edges. If `T` is the larger side the sides
/// are exchanged first. Original edges keep their ids; dummy edges follow.
pub fn balanced_completion(inst: &RapInstance) -> InstanceMapping {
    let g = inst.graph();
    if g.is_balanced() {
        let mut map = InstanceMapping::identity(inst);
        map.kind = MappingKind::BalancedCompletion;
        return map;
    }
    let swapped = g.n_t() > g.n_r();
    let (n_big, n_small) = if swapped { (g.n_t(), g.n_r()) } else { (g.n_r(), g.n_t()) };
    let mut edges: Vec<(usize, usize)> = g
        .edges()
        .iter()
        .map(|&(r, t)| if swapped { (t, r) } else { (r, t) })
        .collect();
    let m = edges.len();
    for d in n_small..n_big {
        for r in 0..n_big {
            edges.push((r, d));
        }
    }
    let m2 = edges.len();
    let graph = BipartiteMultigraph::from_edges(n_big, n_big, edges).expect("completion is in range");
    let mut costs = inst.costs().to_vec();
    costs.resize(m2, 0.0);
    let instance = RapInstance::new(graph, inst.vulnerable_edges(), costs).expect("completion is valid");
    InstanceMapping {
        kind: MappingKind::BalancedCompletion,
        instance,
        swapped,
        forward: (0..m).map(|e| vec![e]).collect(),
        always: (m..m2).collect(),
        back: (0..m2).map(|e| (e < m).then_some(e)).collect(),
    }
}

/// Adds a parallel copy of every invulnerable edge (same cost) and makes
/// every edge vulnerable. Copies are appended in id order of their
/// originals. Decoding maps each copy onto its original, so a decoded
/// solution never costs more and stays feasible.
pub fn uniformize(inst: &RapInstance) -> Result<InstanceMapping> {
    inst.require_balanced()?;
    if inst.is_uniform() {
        let mut map = InstanceMapping::identity(inst);
        map.kind = MappingKind::Uniformize;
        return Ok(map);
    }
    let g = inst.graph();
    let m = g.num_edges();
    let mut edges = g.edges().to_vec();
    let mut costs = inst.costs().to_vec();
    let mut forward: Vec<Vec<EdgeId>> = (0..m).map(|e| vec![e]).collect();
    let mut back: Vec<Option<EdgeId>> = (0..m).map(Some).collect();
    for e in 0..m {
        if !inst.is_vulnerable(e) {
            let copy = edges.len();
            edges.push(g.endpoints(e));
            costs.push(inst.cost(e));
            forward[e].push(copy);
            back.push(Some(e));
        }
    }
    let n = edges.len();
    let graph = BipartiteMultigraph::from_edges(g.n_r(), g.n_t(), edges)?;
    let instance = RapInstance::new(graph, 0..n, costs)?;
    Ok(InstanceMapping {
        kind: MappingKind::Uniformize,
        instance,
        swapped: false,
        forward,
        always: Vec::new(),
        back,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c4_graph() -> BipartiteMultigraph {
        BipartiteMultigraph::from_edges(2, 2, [(0, 0), (1, 0), (1, 1), (0, 1)]).unwrap()
    }

    fn c4() -> RapInstance {
        RapInstance::uniform_unit(c4_graph())
    }

    #[test]
    fn c4_uniform_feasible_and_certified() {
        let inst = c4();
        assert!(check_feasible(&inst).unwrap());
        let cert = verify_solution(&inst, &Solution::all_edges(&inst)).unwrap();
        assert_eq!(cert.len(), 4);
        assert_eq!(cert.get(Scenario::Edge(0)).unwrap().edges(), &[1, 3]);
        assert_eq!(cert.get(Scenario::Edge(1)).unwrap().edges(), &[0, 2]);
        assert_eq!(cert.get(Scenario::Edge(2)).unwrap().edges(), &[1, 3]);
        assert_eq!(cert.get(Scenario::Edge(3)).unwrap().edges(), &[0, 2]);
    }

    #[test]
    fn perfect_matching_alone_fails_first_scenario() {
        let inst = c4();
        let x = Solution::new(&inst, vec![0, 2]).unwrap();
        let err = verify_solution(&inst, &x).unwrap_err();
        assert!(matches!(err, RapError::InfeasibleAt(Scenario::Edge(0))));
        assert_eq!(err.to_string(), "infeasible at scenario e0");
    }

    #[test]
    fn single_vulnerable_edge_infeasible() {
        let g = BipartiteMultigraph::from_edges(1, 1, [(0, 0)]).unwrap();
        assert!(!check_feasible(&RapInstance::uniform_unit(g)).unwrap());
    }

    #[test]
    fn unbalanced_check_asks_for_completion() {
        let g = BipartiteMultigraph::from_edges(2, 1, [(0, 0), (1, 0)]).unwrap();
        let inst = RapInstance::new(g, [], vec![1.0, 1.0]).unwrap();
        let err = check_feasible(&inst).unwrap_err();
        assert!(err.to_string().contains("apply balanced_completion first"));
        assert!(check_feasible_any(&inst).unwrap());
    }

    #[test]
    fn invalid_costs_and_ids_rejected() {
        assert!(RapInstance::new(c4_graph(), [], vec![1.0; 3]).is_err());
        assert!(RapInstance::new(c4_graph(), [], vec![1.0, -1.0, 1.0, 1.0]).is_err());
        assert!(RapInstance::new(c4_graph(), [9], vec![1.0; 4]).is_err());
        assert!(Solution::new(&c4(), vec![7]).is_err());
    }

    #[test]
    fn nominal_certificate_uses_sentinel() {
        let inst = RapInstance::new(c4_graph(), [], vec![1.0; 4]).unwrap();
        let cert = verify_solution(&inst, &Solution::all_edges(&inst)).unwrap();
        assert_eq!(cert.len(), 1);
        assert!(cert.get(Scenario::Nominal).unwrap().is_perfect_in(inst.graph()));
    }

    #[test]
    fn prune_keeps_minimal_c4() {
        let inst = c4();
        let x = prune_to_minimal(&inst, &Solution::all_edges(&inst)).unwrap();
        assert_eq!(x.edges(), &[0, 1, 2, 3]);
    }

    #[test]
    fn prune_nominal_to_single_matching() {
        let inst = RapInstance::new(c4_graph(), [], vec![1.0; 4]).unwrap();
        let x = prune_to_minimal(&inst, &Solution::all_edges(&inst)).unwrap();
        assert_eq!(x.len(), 2);
        // Descending id removal order drops e3 first, then e2 stays needed.
        assert_eq!(x.edges(), &[0, 2]);
    }

    #[test]
    fn prune_rejects_infeasible_input() {
        let inst = c4();
        let x = Solution::new(&inst, vec![0, 2]).unwrap();
        assert!(prune_to_minimal(&inst, &x).is_err());
    }

    #[test]
    fn completion_adds_dummy_column() {
        let g = BipartiteMultigraph::from_edges(3, 2, [(0, 0), (1, 1), (2, 0)]).unwrap();
        let inst = RapInstance::new(g, [0], vec![2.0, 3.0, 4.0]).unwrap();
        let map = balanced_completion(&inst);
        assert_eq!(map.added_edges(), 3);
        assert_eq!(map.instance.graph().n_t(), 3);
        assert!(map.fixed_edges().iter().all(|&e| map.instance.cost(e) == 0.0));
        assert!(map.fixed_edges().iter().all(|&e| !map.instance.is_vulnerable(e)));
        let x = Solution::new(&inst, vec![0, 1]).unwrap();
        let enc = map.encode(&x);
        assert_eq!(enc.cost(), x.cost());
        assert_eq!(map.decode(&inst, &enc), x);
    }

    #[test]
    fn completion_swaps_when_t_larger() {
        let g = BipartiteMultigraph::from_edges(1, 2, [(0, 0), (0, 1)]).unwrap();
        let inst = RapInstance::new(g, [], vec![1.0, 1.0]).unwrap();
        let map = balanced_completion(&inst);
        assert!(map.swapped);
        assert_eq!(map.instance.graph().endpoints(1), (1, 0));
        assert!(check_feasible(&map.instance).unwrap());
    }

    #[test]
    fn completion_of_balanced_is_identity() {
        let map = balanced_completion(&c4());
        assert_eq!(map.added_edges(), 0);
        assert!(!map.swapped);
    }

    #[test]
    fn uniformize_adds_copies_of_invulnerable_edges() {
        let inst = RapInstance::new(c4_graph(), [1, 2], vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        let map = uniformize(&inst).unwrap();
        assert_eq!(map.instance.num_edges(), 6);
        assert!(map.instance.is_uniform());
        assert_eq!(map.instance.graph().endpoints(4), (0, 0));
        assert_eq!(map.instance.cost(5), 4.0);
        let x = Solution::all_edges(&inst);
        let enc = map.encode(&x);
        assert!(enc.cost() <= 2.0 * x.cost());
        assert!(verify_solution(&map.instance, &enc).is_ok());
        assert_eq!(map.decode(&inst, &enc), x);
    }

    #[test]
    fn uniformize_decode_projects_copies() {
        // Dropping copies instead of projecting them would leave {e1,e2,e3},
        // which fails scenario e1 on the original instance.
        let inst = RapInstance::new(c4_graph(), [1, 2, 3], vec![1.0; 4]).unwrap();
        let map = uniformize(&inst).unwrap();
        let xp = Solution::new(&map.instance, vec![4, 1, 2, 3]).unwrap();
        assert!(verify_solution(&map.instance, &xp).is_ok());
        let x = map.decode(&inst, &xp);
        assert_eq!(x.edges(), &[0, 1, 2, 3]);
        assert!(x.cost() <= xp.cost());
        assert!(verify_solution(&inst, &x).is_ok());
    }

    #[test]
    fn uniformize_of_uniform_is_identity() {
        let map = uniformize(&c4()).unwrap();
        assert_eq!(map.added_edges(), 0);
    }
}
