//! Bipartite multigraphs and the matching primitives everything else is
//! built on.
//!
//! Nodes live on two sides, `R` (indices `0..n_r`) and `T` (indices
//! `0..n_t`). Where a single node numbering is convenient the graph uses
//! `0..n_r` for `R` followed by `n_r..n_r + n_t` for `T`.
//!
//! Edges are identified by their position in the edge list. Parallel edges
//! are kept as distinct ids, and every adjacency list is in ascending edge-id
//! order, which is what makes the matching routines deterministic.

use std::collections::VecDeque;

use crate::error::{RapError, Result};
use crate::unionfind::UnionFind;

pub type EdgeId = usize;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BipartiteMultigraph {
    n_r: usize,
    n_t: usize,
    edges: Vec<(usize, usize)>,
    r_adj: Vec<Vec<EdgeId>>,
    t_adj: Vec<Vec<EdgeId>>,
}

impl BipartiteMultigraph {
    /// Builds a graph from `(r_index, t_index)` pairs; the i-th pair becomes
    /// edge `i`.
    pub fn from_edges<I>(n_r: usize, n_t: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let edges: Vec<(usize, usize)> = edges.into_iter().collect();
        let mut r_adj = vec![Vec::new(); n_r];
        let mut t_adj = vec![Vec::new(); n_t];
        for (id, &(r, t)) in edges.iter().enumerate() {
            if r >= n_r || t >= n_t {
                return Err(RapError::InvalidInstance(format!(
                    "edge {id} = ({r}, {t}) out of range for {n_r}x{n_t} graph"
                )));
            }
            r_adj[r].push(id);
            t_adj[t].push(id);
        }
        Ok(BipartiteMultigraph { n_r, n_t, edges, r_adj, t_adj })
    }

    pub fn n_r(&self) -> usize {
        self.n_r
    }

    pub fn n_t(&self) -> usize {
        self.n_t
    }

    pub fn num_nodes(&self) -> usize {
        self.n_r + self.n_t
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn is_balanced(&self) -> bool {
        self.n_r == self.n_t
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// `(r_index, t_index)` of an edge.
    pub fn endpoints(&self, e: EdgeId) -> (usize, usize) {
        self.edges[e]
    }

    /// Endpoints in the unified node numbering.
    pub fn edge_nodes(&self, e: EdgeId) -> (usize, usize) {
        let (r, t) = self.edges[e];
        (r, self.n_r + t)
    }

    pub fn r_edges(&self, r: usize) -> &[EdgeId] {
        &self.r_adj[r]
    }

    pub fn t_edges(&self, t: usize) -> &[EdgeId] {
        &self.t_adj[t]
    }

    /// Incident edges of a node in the unified numbering.
    pub fn incident(&self, node: usize) -> &[EdgeId] {
        if node < self.n_r {
            &self.r_adj[node]
        } else {
            &self.t_adj[node - self.n_r]
        }
    }

    /// Edges `e` and `e2` share both endpoints.
    pub fn parallel(&self, e: EdgeId, e2: EdgeId) -> bool {
        self.edges[e] == self.edges[e2]
    }

    /// The subgraph on the given edge ids, with nodes relabelled to those
    /// touched by at least one edge (ascending original index per side).
    pub fn edge_subgraph(&self, edge_ids: &[EdgeId]) -> Subgraph {
        let mut r_map = vec![usize::MAX; self.n_r];
        let mut t_map = vec![usize::MAX; self.n_t];
        for &e in edge_ids {
            let (r, t) = self.edges[e];
            r_map[r] = 0;
            t_map[t] = 0;
        }
        let mut r_orig = Vec::new();
        for (r, slot) in r_map.iter_mut().enumerate() {
            if *slot == 0 {
                *slot = r_orig.len();
                r_orig.push(r);
            }
        }
        let mut t_orig = Vec::new();
        for (t, slot) in t_map.iter_mut().enumerate() {
            if *slot == 0 {
                *slot = t_orig.len();
                t_orig.push(t);
            }
        }
        let mut sorted: Vec<EdgeId> = edge_ids.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        let graph = BipartiteMultigraph::from_edges(
            r_orig.len(),
            t_orig.len(),
            sorted.iter().map(|&e| {
                let (r, t) = self.edges[e];
                (r_map[r], t_map[t])
            }),
        )
        .expect("relabelled endpoints are in range");
        Subgraph { graph, edge_orig: sorted, r_orig, t_orig }
    }
}

/// A subgraph with the maps back to the parent graph's ids.
#[derive(Debug, Clone)]
pub struct Subgraph {
    pub graph: BipartiteMultigraph,
    /// `edge_orig[new_id]` is the parent edge id.
    pub edge_orig: Vec<EdgeId>,
    pub r_orig: Vec<usize>,
    pub t_orig: Vec<usize>,
}

/// A set of pairwise non-adjacent edges, stored sorted by id.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Matching {
    edges: Vec<EdgeId>,
}

impl Matching {
    /// Wraps an edge list, checking that no two edges share an endpoint.
    pub fn new(g: &BipartiteMultigraph, mut edges: Vec<EdgeId>) -> Result<Self> {
        edges.sort_unstable();
        edges.dedup();
        let mut r_used = vec![false; g.n_r()];
        let mut t_used = vec![false; g.n_t()];
        for &e in &edges {
            let (r, t) = g.endpoints(e);
            if r_used[r] || t_used[t] {
                return Err(RapError::InvalidInstance(format!(
                    "edge e{e} shares an endpoint with another matching edge"
                )));
            }
            r_used[r] = true;
            t_used[t] = true;
        }
        Ok(Matching { edges })
    }

    pub(crate) fn from_sorted_unchecked(edges: Vec<EdgeId>) -> Self {
        debug_assert!(edges.windows(2).all(|w| w[0] < w[1]));
        Matching { edges }
    }

    pub fn edges(&self) -> &[EdgeId] {
        &self.edges
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

    pub fn is_perfect_in(&self, g: &BipartiteMultigraph) -> bool {
        g.is_balanced() && self.edges.len() == g.n_r()
    }
}

/// Matching state of a Hopcroft–Karp run restricted to a set of usable edges.
#[derive(Debug, Clone)]
pub(crate) struct MatchState {
    pub mate_r: Vec<Option<EdgeId>>,
    pub mate_t: Vec<Option<EdgeId>>,
    pub size: usize,
}

impl MatchState {
    pub fn empty(g: &BipartiteMultigraph) -> Self {
        MatchState { mate_r: vec![None; g.n_r()], mate_t: vec![None; g.n_t()], size: 0 }
    }

    /// Maximum matching over edges for which `usable` holds.
    pub fn maximum<F: Fn(EdgeId) -> bool>(g: &BipartiteMultigraph, usable: F) -> Self {
        let mut st = MatchState::empty(g);
        st.hopcroft_karp(g, &usable);
        st
    }

    fn hopcroft_karp<F: Fn(EdgeId) -> bool>(&mut self, g: &BipartiteMultigraph, usable: &F) {
        const INF: usize = usize::MAX;
        let n_r = g.n_r();
        let mut dist = vec![INF; n_r];
        let mut queue = VecDeque::with_capacity(n_r);
        loop {
            // BFS layering from free R nodes.
            queue.clear();
            for r in 0..n_r {
                if self.mate_r[r].is_none() {
                    dist[r] = 0;
                    queue.push_back(r);
                } else {
                    dist[r] = INF;
                }
            }
            let mut found = false;
            while let Some(r) = queue.pop_front() {
                for &e in g.r_edges(r) {
                    if !usable(e) {
                        continue;
                    }
                    let (_, t) = g.endpoints(e);
                    match self.mate_t[t] {
                        None => found = true,
                        Some(me) => {
                            let r2 = g.endpoints(me).0;
                            if dist[r2] == INF {
                                dist[r2] = dist[r] + 1;
                                queue.push_back(r2);
                            }
                        }
                    }
                }
            }
            if !found {
                break;
            }
            let mut cursor = vec![0usize; n_r];
            for r in 0..n_r {
                if self.mate_r[r].is_none() && self.layered_dfs(g, usable, r, &mut dist, &mut cursor) {
                    self.size += 1;
                }
            }
        }
    }

    fn layered_dfs<F: Fn(EdgeId) -> bool>(
        &mut self,
        g: &BipartiteMultigraph,
        usable: &F,
        r: usize,
        dist: &mut [usize],
        cursor: &mut [usize],
    ) -> bool {
        let adj = g.r_edges(r);
        while cursor[r] < adj.len() {
            let e = adj[cursor[r]];
            cursor[r] += 1;
            if !usable(e) {
                continue;
            }
            let (_, t) = g.endpoints(e);
            let ok = match self.mate_t[t] {
                None => true,
                Some(me) => {
                    let r2 = g.endpoints(me).0;
                    dist[r2] == dist[r] + 1 && self.layered_dfs(g, usable, r2, dist, cursor)
                }
            };
            if ok {
                self.mate_r[r] = Some(e);
                self.mate_t[t] = Some(e);
                return true;
            }
        }
        dist[r] = usize::MAX;
        false
    }

    /// Drops edge `e` from the matching if present.
    pub fn unmatch(&mut self, g: &BipartiteMultigraph, e: EdgeId) {
        let (r, t) = g.endpoints(e);
        if self.mate_r[r] == Some(e) {
            self.mate_r[r] = None;
            self.mate_t[t] = None;
            self.size -= 1;
        }
    }

    /// Single augmenting-path search from the free R node `root` (BFS,
    /// ascending edge ids). Returns whether the matching grew.
    pub fn augment_from<F: Fn(EdgeId) -> bool>(&mut self, g: &BipartiteMultigraph, usable: F, root: usize) -> bool {
        debug_assert!(self.mate_r[root].is_none());
        let mut via: Vec<Option<EdgeId>> = vec![None; g.n_t()];
        let mut seen_r = vec![false; g.n_r()];
        seen_r[root] = true;
        let mut queue = VecDeque::new();
        queue.push_back(root);
        while let Some(r) = queue.pop_front() {
            for &e in g.r_edges(r) {
                if !usable(e) {
                    continue;
                }
                let (_, t) = g.endpoints(e);
                if via[t].is_some() {
                    continue;
                }
                via[t] = Some(e);
                match self.mate_t[t] {
                    None => {
                        // Flip the alternating path ending at t.
                        let mut t_cur = t;
                        loop {
                            let e_in = via[t_cur].unwrap();
                            let r_cur = g.endpoints(e_in).0;
                            let prev = self.mate_r[r_cur];
                            self.mate_r[r_cur] = Some(e_in);
                            self.mate_t[t_cur] = Some(e_in);
                            match prev {
                                None => break,
                                Some(pe) => t_cur = g.endpoints(pe).1,
                            }
                        }
                        self.size += 1;
                        return true;
                    }
                    Some(me) => {
                        let r2 = g.endpoints(me).0;
                        if !seen_r[r2] {
                            seen_r[r2] = true;
                            queue.push_back(r2);
                        }
                    }
                }
            }
        }
        false
    }

    pub fn to_matching(&self) -> Matching {
        let mut edges: Vec<EdgeId> = self.mate_r.iter().flatten().copied().collect();
        edges.sort_unstable();
        Matching::from_sorted_unchecked(edges)
    }

    pub fn is_perfect(&self, g: &BipartiteMultigraph) -> bool {
        g.is_balanced() && self.size == g.n_r()
    }
}

/// Maximum-cardinality matching avoiding the `forbidden` edges.
pub fn max_matching(g: &BipartiteMultigraph, forbidden: &[EdgeId]) -> Matching {
    let mut blocked = vec![false; g.num_edges()];
    for &e in forbidden {
        blocked[e] = true;
    }
    MatchState::maximum(g, |e| !blocked[e]).to_matching()
}

/// A perfect matching using only edges with `usable[e]`, if one exists.
pub fn perfect_matching_in(g: &BipartiteMultigraph, usable: &[bool]) -> Option<Matching> {
    if !g.is_balanced() {
        return None;
    }
    let st = MatchState::maximum(g, |e| usable[e]);
    st.is_perfect(g).then(|| st.to_matching())
}

/// Whether `g` has a perfect matching that does not use `f`.
pub fn has_pm_avoiding(g: &BipartiteMultigraph, f: EdgeId) -> Result<bool> {
    if !g.is_balanced() {
        return Err(RapError::NotBalanced { n_r: g.n_r(), n_t: g.n_t() });
    }
    let st = MatchState::maximum(g, |e| e != f);
    Ok(st.is_perfect(g))
}

/// Strongly connected components of a digraph given by adjacency lists.
/// Returns the component index of each vertex (iterative Tarjan).
pub(crate) fn strongly_connected_components(adj: &[Vec<usize>]) -> Vec<usize> {
    let n = adj.len();
    const UNSEEN: usize = usize::MAX;
    let mut index = vec![UNSEEN; n];
    let mut low = vec![0usize; n];
    let mut on_stack = vec![false; n];
    let mut comp = vec![UNSEEN; n];
    let mut stack = Vec::new();
    let mut next_index = 0;
    let mut next_comp = 0;
    let mut call: Vec<(usize, usize)> = Vec::new();
    for start in 0..n {
        if index[start] != UNSEEN {
            continue;
        }
        call.push((start, 0));
        index[start] = next_index;
        low[start] = next_index;
        next_index += 1;
        stack.push(start);
        on_stack[start] = true;
        while let Some(&mut (v, ref mut i)) = call.last_mut() {
            if *i < adj[v].len() {
                let w = adj[v][*i];
                *i += 1;
                if index[w] == UNSEEN {
                    index[w] = next_index;
                    low[w] = next_index;
                    next_index += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            } else {
                call.pop();
                if let Some(&(parent, _)) = call.last() {
                    low[parent] = low[parent].min(low[v]);
                }
                if low[v] == index[v] {
                    loop {
                        let w = stack.pop().unwrap();
                        on_stack[w] = false;
                        comp[w] = next_comp;
                        if w == v {
                            break;
                        }
                    }
                    next_comp += 1;
                }
            }
        }
    }
    comp
}

/// Allowed-edge mask relative to a known perfect matching `pm` (given as
/// `mate_r`). Matched pairs are contracted to one vertex per R node; a
/// non-matching edge `(r, t)` becomes the arc `r -> mate(t)` and is allowed
/// iff both ends share a strongly connected component.
pub(crate) fn allowed_mask_from(g: &BipartiteMultigraph, usable: &[bool], mate_r: &[Option<EdgeId>]) -> Vec<bool> {
    let mut pair_of_t = vec![usize::MAX; g.n_t()];
    for (r, m) in mate_r.iter().enumerate() {
        let e = m.expect("perfect matching");
        pair_of_t[g.endpoints(e).1] = r;
    }
    let mut adj = vec![Vec::new(); g.n_r()];
    for (e, &(r, t)) in g.edges().iter().enumerate() {
        if usable[e] && mate_r[r] != Some(e) {
            adj[r].push(pair_of_t[t]);
        }
    }
    let comp = strongly_connected_components(&adj);
    let mut allowed = vec![false; g.num_edges()];
    for (e, &(r, t)) in g.edges().iter().enumerate() {
        if usable[e] {
            allowed[e] = mate_r[r] == Some(e) || comp[r] == comp[pair_of_t[t]];
        }
    }
    allowed
}

/// Edges lying in at least one perfect matching of `g`, ascending.
pub fn allowed_edges(g: &BipartiteMultigraph) -> Result<Vec<EdgeId>> {
    if !g.is_balanced() {
        return Err(RapError::NotBalanced { n_r: g.n_r(), n_t: g.n_t() });
    }
    let st = MatchState::maximum(g, |_| true);
    if !st.is_perfect(g) {
        return Err(RapError::NoPerfectMatching);
    }
    let usable = vec![true; g.num_edges()];
    let mask = allowed_mask_from(g, &usable, &st.mate_r);
    Ok((0..g.num_edges()).filter(|&e| mask[e]).collect())
}

/// A connected component: node ids in the unified numbering and its edges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Component {
    pub nodes: Vec<usize>,
    pub edges: Vec<EdgeId>,
    pub matching_covered: bool,
}

impl Component {
    /// A component made of exactly one edge.
    pub fn is_isolated_edge(&self) -> bool {
        self.edges.len() == 1 && self.nodes.len() == 2
    }
}

/// Connected components by union-find, in order of their smallest node.
pub(crate) fn connected_components(g: &BipartiteMultigraph, usable: &[bool]) -> Vec<(Vec<usize>, Vec<EdgeId>)> {
    let mut uf = UnionFind::new(g.num_nodes());
    for e in 0..g.num_edges() {
        if usable[e] {
            let (a, b) = g.edge_nodes(e);
            uf.union(a, b);
        }
    }
    let mut slot = vec![usize::MAX; g.num_nodes()];
    let mut out: Vec<(Vec<usize>, Vec<EdgeId>)> = Vec::new();
    for v in 0..g.num_nodes() {
        let root = uf.find(v);
        if slot[root] == usize::MAX {
            slot[root] = out.len();
            out.push((Vec::new(), Vec::new()));
        }
        out[slot[root]].0.push(v);
    }
    for e in 0..g.num_edges() {
        if usable[e] {
            let root = uf.find(g.edge_nodes(e).0);
            out[slot[root]].1.push(e);
        }
    }
    out
}

/// Connected components of `g`, each flagged matching-covered when it is
/// perfectly matchable and every one of its edges is allowed within it.
/// An isolated node forms its own (not matching-covered) component.
pub fn matching_covered_components(g: &BipartiteMultigraph) -> Vec<Component> {
    let usable = vec![true; g.num_edges()];
    components_with_flags(g, &usable)
}

pub(crate) fn components_with_flags(g: &BipartiteMultigraph, usable: &[bool]) -> Vec<Component> {
    connected_components(g, usable)
        .into_iter()
        .map(|(nodes, edges)| {
            let matching_covered = !edges.is_empty() && {
                let sub = g.edge_subgraph(&edges);
                sub.graph.num_nodes() == nodes.len()
                    && allowed_edges(&sub.graph).is_ok_and(|a| a.len() == sub.graph.num_edges())
            };
            Component { nodes, edges, matching_covered }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn c4() -> BipartiteMultigraph {
        // e0 = r0-t0, e1 = r1-t0, e2 = r1-t1, e3 = r0-t1
        BipartiteMultigraph::from_edges(2, 2, [(0, 0), (1, 0), (1, 1), (0, 1)]).unwrap()
    }

    fn p4() -> BipartiteMultigraph {
        // r0 - t0 - r1 - t1 : e0 = r0-t0, e1 = r1-t0 (middle), e2 = r1-t1
        BipartiteMultigraph::from_edges(2, 2, [(0, 0), (1, 0), (1, 1)]).unwrap()
    }

    #[test]
    fn out_of_range_edge_rejected() {
        assert!(BipartiteMultigraph::from_edges(1, 1, [(0, 1)]).is_err());
    }

    #[test]
    fn c4_matchings() {
        let g = c4();
        assert_eq!(max_matching(&g, &[]).len(), 2);
        assert_eq!(max_matching(&g, &[0]).edges(), &[1, 3]);
        assert!(has_pm_avoiding(&g, 0).unwrap());
    }

    #[test]
    fn single_edge() {
        let g = BipartiteMultigraph::from_edges(1, 1, [(0, 0)]).unwrap();
        assert!(max_matching(&g, &[0]).is_empty());
        assert!(!has_pm_avoiding(&g, 0).unwrap());
    }

    #[test]
    fn p4_middle_edge_dispensable() {
        let g = p4();
        // The unique perfect matching uses both end edges.
        assert!(has_pm_avoiding(&g, 1).unwrap());
        assert!(!has_pm_avoiding(&g, 0).unwrap());
        assert_eq!(allowed_edges(&g).unwrap(), vec![0, 2]);
        let comps = matching_covered_components(&g);
        assert_eq!(comps.len(), 1);
        assert!(!comps[0].matching_covered);
    }

    #[test]
    fn unbalanced_queries_error() {
        let g = BipartiteMultigraph::from_edges(2, 1, [(0, 0), (1, 0)]).unwrap();
        assert!(matches!(has_pm_avoiding(&g, 0), Err(RapError::NotBalanced { .. })));
        assert!(allowed_edges(&g).is_err());
    }

    #[test]
    fn no_perfect_matching_error() {
        let g = BipartiteMultigraph::from_edges(2, 2, [(0, 0), (1, 0)]).unwrap();
        assert!(matches!(allowed_edges(&g), Err(RapError::NoPerfectMatching)));
    }

    #[test]
    fn c4_plus_isolated_edge_components() {
        let g = BipartiteMultigraph::from_edges(3, 3, [(0, 0), (1, 0), (1, 1), (0, 1), (2, 2)]).unwrap();
        let comps = matching_covered_components(&g);
        assert_eq!(comps.len(), 2);
        assert!(comps.iter().all(|c| c.matching_covered));
        assert!(comps[1].is_isolated_edge());
        assert_eq!(allowed_edges(&g).unwrap().len(), 5);
    }

    #[test]
    fn isolated_node_is_not_matchable() {
        let g = BipartiteMultigraph::from_edges(2, 2, [(0, 0)]).unwrap();
        assert!(perfect_matching_in(&g, &[true]).is_none());
        let comps = matching_covered_components(&g);
        assert_eq!(comps.len(), 3);
        assert!(comps.iter().all(|c| c.nodes.len() == 1 || c.matching_covered));
    }

    #[test]
    fn parallel_edges_are_both_allowed() {
        let g = BipartiteMultigraph::from_edges(1, 1, [(0, 0), (0, 0)]).unwrap();
        assert_eq!(allowed_edges(&g).unwrap(), vec![0, 1]);
        assert!(has_pm_avoiding(&g, 0).unwrap());
        assert!(g.parallel(0, 1));
    }

    #[test]
    fn augment_repairs_after_unmatch() {
        let g = c4();
        let mut st = MatchState::maximum(&g, |_| true);
        let e = st.mate_r[0].unwrap();
        st.unmatch(&g, e);
        assert!(st.augment_from(&g, |x| x != e, 0));
        assert!(st.is_perfect(&g));
        assert!(!st.to_matching().contains(e));
    }

    #[test]
    fn scc_on_small_digraph() {
        let adj = vec![vec![1], vec![2], vec![0, 3], vec![]];
        let c = strongly_connected_components(&adj);
        assert_eq!(c[0], c[1]);
        assert_eq!(c[1], c[2]);
        assert_ne!(c[2], c[3]);
    }
}
