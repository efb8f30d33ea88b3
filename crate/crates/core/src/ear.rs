//! Ear decompositions of matching-covered bipartite graphs and the
//! cardinality approximation built on them.
//!
//! A decomposition is found through the digraph obtained by contracting the
//! pairs of a perfect matching: every non-matching edge `(r, t)` becomes an
//! arc from the pair of `r` to the pair of `t`. Directed ears of that
//! digraph expand to odd ears of the graph, interleaving matched edges.

use std::collections::VecDeque;
use std::fmt;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{RapError, Result};
use crate::graph::{allowed_edges, connected_components, perfect_matching_in, BipartiteMultigraph, EdgeId};
use crate::instance::{balanced_completion, check_feasible, first_failure, verify_solution_any, RapInstance, Solution};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ear {
    /// Edge ids in path order.
    pub edges: Vec<EdgeId>,
    pub trivial: bool,
}

/// `ears[0]` is a single edge; every later ear is an odd path attached to
/// the graph built so far at two nodes on opposite sides.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EarDecomposition {
    ears: Vec<Ear>,
}

impl EarDecomposition {
    pub fn ears(&self) -> &[Ear] {
        &self.ears
    }

    pub fn len(&self) -> usize {
        self.ears.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ears.is_empty()
    }

    /// The first ear and every non-trivial one.
    pub fn kept_edges(&self) -> Vec<EdgeId> {
        self.ears.iter().filter(|ear| !ear.trivial).flat_map(|ear| ear.edges.iter().copied()).collect()
    }

    pub fn nontrivial_count(&self) -> usize {
        self.ears.iter().skip(1).filter(|ear| !ear.trivial).count()
    }

    /// Checks the prefix property and that the ears cover `g` exactly.
    pub fn validate(&self, g: &BipartiteMultigraph) -> Result<()> {
        let bad = |msg: String| Err(RapError::InvalidInstance(format!("invalid ear decomposition: {msg}")));
        let Some(first) = self.ears.first() else { return bad("no ears".into()) };
        if first.edges.len() != 1 || first.trivial {
            return bad("first ear must be one non-trivial edge".into());
        }
        let mut in_graph = vec![false; g.num_nodes()];
        let mut used = vec![false; g.num_edges()];
        let (a, b) = g.edge_nodes(first.edges[0]);
        in_graph[a] = true;
        in_graph[b] = true;
        used[first.edges[0]] = true;
        for (j, ear) in self.ears.iter().enumerate().skip(1) {
            if ear.edges.len() % 2 == 0 {
                return bad(format!("ear {j} has even length"));
            }
            if ear.trivial != (ear.edges.len() == 1) {
                return bad(format!("ear {j} has a wrong trivial flag"));
            }
            // Walk the path; it must start on an R node of the graph so far
            // (orientation is free, so try both ends).
            let walk = |start: usize| -> Option<Vec<usize>> {
                let mut nodes = vec![start];
                for &e in &ear.edges {
                    let (x, y) = g.edge_nodes(e);
                    let cur = *nodes.last().expect("non-empty");
                    nodes.push(if x == cur { y } else if y == cur { x } else { return None });
                }
                Some(nodes)
            };
            let (x0, y0) = g.edge_nodes(ear.edges[0]);
            let Some(nodes) = walk(x0).or_else(|| walk(y0)) else {
                return bad(format!("ear {j} is not a path"));
            };
            let (s, t) = (nodes[0], *nodes.last().expect("non-empty"));
            if !in_graph[s] || !in_graph[t] || (s < g.n_r()) == (t < g.n_r()) {
                return bad(format!("ear {j} is not attached at two nodes on opposite sides"));
            }
            for &v in &nodes[1..nodes.len() - 1] {
                if in_graph[v] {
                    return bad(format!("ear {j} revisits node {v}"));
                }
                in_graph[v] = true;
            }
            for &e in &ear.edges {
                if used[e] {
                    return bad(format!("edge {e} appears twice"));
                }
                used[e] = true;
            }
        }
        if let Some(e) = used.iter().position(|&u| !u) {
            return bad(format!("edge {e} is in no ear"));
        }
        if let Some(v) = in_graph.iter().position(|&u| !u) {
            return bad(format!("node {v} is in no ear"));
        }
        Ok(())
    }
}

/// Which edges the construction prefers when it has a choice.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EarOrder {
    /// Lowest edge id first.
    #[default]
    Lowest,
    /// A seeded random priority over edge ids.
    Random(u64),
}

impl fmt::Display for EarOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EarOrder::Lowest => f.write_str("lowest"),
            EarOrder::Random(seed) => write!(f, "random:{seed}"),
        }
    }
}

impl std::str::FromStr for EarOrder {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.split_once(':') {
            None if s == "lowest" => Ok(EarOrder::Lowest),
            Some(("random", seed)) => {
                seed.parse().map(EarOrder::Random).map_err(|_| format!("bad seed in ear order '{s}'"))
            }
            _ => Err(format!("unknown ear order '{s}' (lowest or random:<seed>)")),
        }
    }
}

impl EarOrder {
    /// Priority rank of each edge id; lower ranks are preferred.
    fn ranks(self, m: usize) -> Vec<usize> {
        match self {
            EarOrder::Lowest => (0..m).collect(),
            EarOrder::Random(seed) => {
                let mut order: Vec<usize> = (0..m).collect();
                order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
                let mut rank = vec![0; m];
                for (i, e) in order.into_iter().enumerate() {
                    rank[e] = i;
                }
                rank
            }
        }
    }
}

pub fn ear_decomposition(g: &BipartiteMultigraph) -> Result<EarDecomposition> {
    ear_decomposition_with(g, EarOrder::Lowest)
}

/// Ear decomposition of a connected matching-covered graph. The first ear
/// is the preferred edge, which also fixes the perfect matching used for
/// contraction; ears are then grown from the preferred unused arc leaving
/// the part built so far, closed by a shortest path back.
pub fn ear_decomposition_with(g: &BipartiteMultigraph, order: EarOrder) -> Result<EarDecomposition> {
    let m = g.num_edges();
    if m == 0 || !g.is_balanced() {
        return Err(RapError::NotMatchingCovered);
    }
    let rank = order.ranks(m);
    let mut by_rank: Vec<EdgeId> = (0..m).collect();
    by_rank.sort_by_key(|&e| rank[e]);
    let first = by_rank[0];
    let (r0, t0) = g.endpoints(first);
    let usable: Vec<bool> = (0..m)
        .map(|e| {
            let (r, t) = g.endpoints(e);
            e == first || (r != r0 && t != t0)
        })
        .collect();
    let pm = perfect_matching_in(g, &usable).ok_or(RapError::NotMatchingCovered)?;
    let n = g.n_r();
    let mut mate_r = vec![usize::MAX; n];
    let mut pair_of_t = vec![usize::MAX; n];
    for &e in pm.edges() {
        let (r, t) = g.endpoints(e);
        mate_r[r] = e;
        pair_of_t[t] = r;
    }
    // Arcs of the contracted digraph, per tail in rank order.
    let mut out_arcs: Vec<Vec<EdgeId>> = vec![Vec::new(); n];
    for &e in &by_rank {
        let (r, _) = g.endpoints(e);
        if mate_r[r] != e {
            out_arcs[r].push(e);
        }
    }
    let head = |e: EdgeId| pair_of_t[g.endpoints(e).1];
    let mut visited = vec![false; n];
    let mut used = vec![false; m];
    visited[r0] = true;
    for &e in pm.edges() {
        used[e] = true;
    }
    let mut ears = vec![Ear { edges: vec![first], trivial: false }];
    // The preferred unused arc leaving the visited part starts the next ear.
    while let Some(arc) = by_rank.iter().copied().find(|&e| !used[e] && visited[g.endpoints(e).0]) {
        ears.push(grow_from(g, &out_arcs, &mate_r, &head, &mut visited, &mut used, arc)?);
    }
    if used.iter().any(|&u| !u) || visited.iter().any(|&v| !v) {
        return Err(RapError::NotMatchingCovered);
    }
    Ok(EarDecomposition { ears })
}

/// The ear started by `arc`: a single edge if its head is already visited,
/// otherwise the arc followed by a shortest path through unvisited pairs
/// back to the visited part, expanded with the matched edges in between.
fn grow_from(
    g: &BipartiteMultigraph,
    out_arcs: &[Vec<EdgeId>],
    mate_r: &[EdgeId],
    head: &dyn Fn(EdgeId) -> usize,
    visited: &mut [bool],
    used: &mut [bool],
    arc: EdgeId,
) -> Result<Ear> {
    used[arc] = true;
    let start = head(arc);
    if visited[start] {
        return Ok(Ear { edges: vec![arc], trivial: true });
    }
    // BFS over unvisited pairs from `start` until an arc reaches the
    // visited part.
    let n = visited.len();
    let mut parent: Vec<Option<EdgeId>> = vec![None; n];
    let mut seen = vec![false; n];
    seen[start] = true;
    let mut queue = VecDeque::from([start]);
    let mut closing = None;
    'bfs: while let Some(u) = queue.pop_front() {
        for &a in &out_arcs[u] {
            let v = head(a);
            if visited[v] {
                closing = Some(a);
                break 'bfs;
            }
            if !seen[v] {
                seen[v] = true;
                parent[v] = Some(a);
                queue.push_back(v);
            }
        }
    }
    let closing = closing.ok_or(RapError::NotMatchingCovered)?;
    let mut arcs = vec![closing];
    let mut cur = g.endpoints(closing).0;
    while cur != start {
        let a = parent[cur].expect("BFS tree reaches start");
        arcs.push(a);
        cur = g.endpoints(a).0;
    }
    arcs.push(arc);
    arcs.reverse();
    let mut edges = Vec::with_capacity(2 * arcs.len() - 1);
    for (i, &a) in arcs.iter().enumerate() {
        edges.push(a);
        if i + 1 < arcs.len() {
            let pair = head(a);
            edges.push(mate_r[pair]);
            visited[pair] = true;
        }
    }
    for &a in &arcs {
        used[a] = true;
    }
    Ok(Ear { edges, trivial: false })
}

/// Per-component decompositions behind an ear-based solution, in ids of the
/// (balanced) instance the algorithm ran on.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EarReport {
    pub components: Vec<EarDecomposition>,
    /// Edges removed as dispensable.
    pub dispensable: usize,
    /// Dummy nodes added to balance the graph.
    pub dummy_nodes: usize,
    /// Parallel edges kept beside a vulnerable first ear of a two-node
    /// component.
    pub backups: Vec<EdgeId>,
}

impl fmt::Display for EarReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (c, dec) in self.components.iter().enumerate() {
            for (j, ear) in dec.ears().iter().enumerate() {
                let kind = if j == 0 {
                    "first"
                } else if ear.trivial {
                    "trivial"
                } else {
                    "ear"
                };
                write!(f, "component {c} ear {j} {kind}")?;
                for e in &ear.edges {
                    write!(f, " {e}")?;
                }
                writeln!(f)?;
            }
        }
        for e in &self.backups {
            writeln!(f, "backup {e}")?;
        }
        Ok(())
    }
}

pub fn solve_ear(inst: &RapInstance) -> Result<Solution> {
    solve_ear_with(inst, EarOrder::Lowest).map(|(x, _)| x)
}

/// Keeps the first ear and every non-trivial ear of a decomposition of each
/// component of the allowed subgraph. Costs are ignored. Unbalanced inputs
/// are completed with invulnerable dummy edges, which are dropped again
/// from the answer.
pub fn solve_ear_with(inst: &RapInstance, order: EarOrder) -> Result<(Solution, EarReport)> {
    let map = balanced_completion(inst);
    let work = &map.instance;
    if !check_feasible(work)? {
        let s = first_failure(work, &vec![true; work.num_edges()]).expect("infeasible has a failure");
        return Err(RapError::InfeasibleInstance(s));
    }
    let g = work.graph();
    let mut allowed = vec![false; g.num_edges()];
    for e in allowed_edges(g)? {
        allowed[e] = true;
    }
    let mut kept = Vec::new();
    let mut components = Vec::new();
    let mut backups = Vec::new();
    for (_, edges) in connected_components(g, &allowed) {
        if edges.is_empty() {
            continue;
        }
        let sub = g.edge_subgraph(&edges);
        let dec = ear_decomposition_with(&sub.graph, order)?;
        debug_assert!(dec.validate(&sub.graph).is_ok());
        let ears = dec
            .ears()
            .iter()
            .map(|ear| Ear { edges: ear.edges.iter().map(|&e| sub.edge_orig[e]).collect(), trivial: ear.trivial })
            .collect();
        let dec = EarDecomposition { ears };
        kept.extend(dec.kept_edges());
        // Two nodes joined by parallel edges: every ear after the first is
        // trivial, and a vulnerable first ear cannot cover its own failure.
        let first = dec.ears()[0].edges[0];
        if sub.graph.num_nodes() == 2 && work.is_vulnerable(first) {
            if let Some(ear) = dec.ears().get(1) {
                kept.push(ear.edges[0]);
                backups.push(ear.edges[0]);
            }
        }
        components.push(dec);
    }
    let x = map.decode(inst, &Solution::new(work, kept)?);
    verify_solution_any(inst, &x)?;
    let report = EarReport {
        components,
        dispensable: allowed.iter().filter(|&&a| !a).count(),
        dummy_nodes: g.n_r() - inst.graph().n_r().min(inst.graph().n_t()),
        backups,
    };
    Ok((x, report))
}
