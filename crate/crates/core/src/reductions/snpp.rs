//! Shortest nice path to robust assignment with two vulnerable edges.
//!
//! The terminal `s` is an R node and `t` a T node of `h`. Two nodes are
//! added, `x` as the last T node and `y` as the last R node, with edges
//! `f1 = {s, x}`, `f2 = {y, x}` and `g = {y, t}`; only `f1` and `f2` are
//! vulnerable and all costs are 1.

use crate::error::{RapError, Result};
use crate::graph::{perfect_matching_in, BipartiteMultigraph, EdgeId};
use crate::instance::RapInstance;

#[derive(Debug, Clone)]
pub struct SnppInstance {
    pub rap: RapInstance,
    pub f1: EdgeId,
    pub f2: EdgeId,
    pub g: EdgeId,
}

impl SnppInstance {
    /// Optimal value predicted from a nice path with `path_nodes` nodes in
    /// a host graph with `host_nodes` nodes.
    pub fn predicted_optimum(host_nodes: usize, path_nodes: usize) -> usize {
        host_nodes / 2 + path_nodes / 2 + 2
    }
}

pub fn from_snpp(h: &BipartiteMultigraph, s: usize, t: usize) -> Result<SnppInstance> {
    if !h.is_balanced() {
        return Err(RapError::NotBalanced { n_r: h.n_r(), n_t: h.n_t() });
    }
    if s >= h.n_r() || t >= h.n_t() {
        return Err(RapError::InvalidInstance(format!(
            "terminals ({s}, {t}) must be an R node and a T node of a {}x{} graph",
            h.n_r(),
            h.n_t()
        )));
    }
    let (x, y) = (h.n_t(), h.n_r());
    let mut edges = h.edges().to_vec();
    let f1 = edges.len();
    edges.extend([(s, x), (y, x), (y, t)]);
    let graph = BipartiteMultigraph::from_edges(h.n_r() + 1, h.n_t() + 1, edges)?;
    let m = graph.num_edges();
    let rap = RapInstance::new(graph, [f1, f1 + 1], vec![1.0; m])?;
    Ok(SnppInstance { rap, f1, f2: f1 + 1, g: f1 + 2 })
}

/// A shortest `s`-`t` path of `h` whose removal leaves a perfectly matchable
/// graph, as unified node ids, by exhaustive search over simple paths.
/// Refuses graphs with more than 12 nodes.
pub fn shortest_nice_path(h: &BipartiteMultigraph, s: usize, t: usize) -> Result<Option<Vec<usize>>> {
    const LIMIT: usize = 12;
    if h.num_nodes() > LIMIT {
        return Err(RapError::TooLarge { edges: h.num_nodes(), limit: LIMIT });
    }
    let n = h.num_nodes();
    let (start, goal) = (s, h.n_r() + t);
    let other = |e: EdgeId, v: usize| {
        let (a, b) = h.edge_nodes(e);
        if a == v {
            b
        } else {
            a
        }
    };
    let mut best: Option<Vec<usize>> = None;
    let mut path = vec![start];
    let mut on_path = vec![false; n];
    on_path[start] = true;
    // Depth-first over simple paths; each frame holds the next incident index.
    let mut frames: Vec<usize> = vec![0];
    while let Some(&i) = frames.last() {
        let v = *path.last().expect("path non-empty");
        if v == goal {
            let shorter = best.as_ref().is_none_or(|b| path.len() < b.len());
            if shorter {
                let usable: Vec<bool> = (0..h.num_edges())
                    .map(|e| {
                        let (a, b) = h.edge_nodes(e);
                        !on_path[a] && !on_path[b]
                    })
                    .collect();
                if complement_matchable(h, &on_path, &usable) {
                    best = Some(path.clone());
                }
            }
        }
        let incident = h.incident(v);
        let prune = v == goal || best.as_ref().is_some_and(|b| path.len() + 1 >= b.len());
        if prune || i >= incident.len() {
            frames.pop();
            on_path[v] = false;
            path.pop();
            continue;
        }
        *frames.last_mut().expect("frame") += 1;
        let w = other(incident[i], v);
        if !on_path[w] {
            on_path[w] = true;
            path.push(w);
            frames.push(0);
        }
    }
    Ok(best)
}

fn complement_matchable(h: &BipartiteMultigraph, on_path: &[bool], usable: &[bool]) -> bool {
    let r_left = (0..h.n_r()).filter(|&r| !on_path[r]).count();
    let t_left = (0..h.n_t()).filter(|&t| !on_path[h.n_r() + t]).count();
    if r_left != t_left {
        return false;
    }
    if r_left == 0 {
        return true;
    }
    let kept: Vec<EdgeId> = (0..h.num_edges()).filter(|&e| usable[e]).collect();
    let sub = h.edge_subgraph(&kept);
    // Every remaining node must be touched by a kept edge and matched.
    sub.graph.n_r() == r_left
        && sub.graph.n_t() == t_left
        && perfect_matching_in(&sub.graph, &vec![true; sub.graph.num_edges()]).is_some()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_edge_host_gives_four_cycle() {
        let h = BipartiteMultigraph::from_edges(1, 1, [(0, 0)]).unwrap();
        let inst = from_snpp(&h, 0, 0).unwrap();
        assert_eq!(inst.rap.num_edges(), 4);
        assert_eq!(inst.rap.vulnerable_edges(), vec![1, 2]);
        let path = shortest_nice_path(&h, 0, 0).unwrap().unwrap();
        assert_eq!(path, vec![0, 1]);
        assert_eq!(SnppInstance::predicted_optimum(2, path.len()), 4);
    }

    #[test]
    fn nice_path_must_leave_matchable_rest() {
        // K_{2,2}: the direct edge R0-T1 leaves R1, T0, joined by (1, 0).
        let k22 = BipartiteMultigraph::from_edges(2, 2, [(0, 0), (1, 0), (1, 1), (0, 1)]).unwrap();
        assert_eq!(shortest_nice_path(&k22, 0, 1).unwrap().unwrap(), vec![0, 3]);
        // A path R0-T0-R1-T1: only the whole path is nice.
        let p4 = BipartiteMultigraph::from_edges(2, 2, [(0, 0), (1, 0), (1, 1)]).unwrap();
        assert_eq!(shortest_nice_path(&p4, 0, 1).unwrap().unwrap(), vec![0, 2, 1, 3]);
        // R0-T1 directly, but R1 and T0 are not adjacent.
        let h = BipartiteMultigraph::from_edges(2, 2, [(0, 0), (1, 1), (0, 1)]).unwrap();
        assert_eq!(shortest_nice_path(&h, 0, 1).unwrap(), None);
    }

    #[test]
    fn wrong_sides_rejected() {
        let h = BipartiteMultigraph::from_edges(1, 1, [(0, 0)]).unwrap();
        assert!(from_snpp(&h, 1, 0).is_err());
    }
}
