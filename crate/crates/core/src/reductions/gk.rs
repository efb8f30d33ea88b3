//! The family `G_k` on which ear-based solutions can be 1.5 times optimal.
//!
//! Nodes are `0..=2k+1`. Even labels other than 0 and odd label 1 are task
//! nodes, the rest resources: label 0 is `r0`, label `2i+1` is `r_i`,
//! label 1 is `t0` and label `2i` is `t_i`.

use crate::error::{RapError, Result};
use crate::graph::BipartiteMultigraph;
use crate::instance::RapInstance;

/// Side and index of a `G_k` node label.
pub fn gk_node(label: usize) -> (char, usize) {
    match label {
        0 => ('R', 0),
        1 => ('T', 0),
        l if l % 2 == 1 => ('R', l / 2),
        l => ('T', l / 2),
    }
}

/// Edges of `G_k` as label pairs, in id order: `{0,1}`; each path
/// `0 - i - i+1 - 1` for even `i` in `2..=2k`; then each 4-cycle's two
/// chords `{j+2, j+1}` and `{j+3, j}` for even `j` in `4..=2k-2`.
pub fn gk_edge_labels(k: usize) -> Vec<(usize, usize)> {
    let mut out = vec![(0, 1)];
    for i in (2..=2 * k).step_by(2) {
        out.extend([(0, i), (i, i + 1), (i + 1, 1)]);
    }
    for j in (4..=2 * k - 2).step_by(2) {
        out.extend([(j + 2, j + 1), (j + 3, j)]);
    }
    out
}

/// `G_k` with every edge vulnerable and unit costs.
pub fn gk_family(k: usize) -> Result<RapInstance> {
    if k < 3 {
        return Err(RapError::InvalidInstance(format!("G_k needs k >= 3, got {k}")));
    }
    let edges = gk_edge_labels(k).into_iter().map(|(a, b)| {
        let (sa, ia) = gk_node(a);
        let ib = gk_node(b).1;
        if sa == 'R' {
            (ia, ib)
        } else {
            (ib, ia)
        }
    });
    Ok(RapInstance::uniform_unit(BipartiteMultigraph::from_edges(k + 1, k + 1, edges)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{check_feasible, verify_solution, Solution};

    #[test]
    fn sizes() {
        for k in 3..=6 {
            let inst = gk_family(k).unwrap();
            assert_eq!(inst.graph().num_nodes(), 2 * k + 2);
            assert_eq!(inst.num_edges(), 5 * k - 3);
            assert!(check_feasible(&inst).unwrap());
        }
        assert!(gk_family(2).is_err());
    }

    #[test]
    fn g3_chords_match_figure() {
        let labels = gk_edge_labels(3);
        assert_eq!(&labels[10..], &[(6, 5), (7, 4)]);
    }

    #[test]
    fn hamiltonian_cycle_is_feasible() {
        // 0-2-3-1-5-6-7-4-0 for k = 3
        let inst = gk_family(3).unwrap();
        let labels = gk_edge_labels(3);
        let cycle = [(0, 2), (2, 3), (3, 1), (5, 1), (6, 5), (6, 7), (7, 4), (0, 4)];
        let ids: Vec<usize> = cycle
            .iter()
            .map(|&(a, b)| labels.iter().position(|&p| p == (a, b) || p == (b, a)).unwrap())
            .collect();
        verify_solution(&inst, &Solution::new(&inst, ids).unwrap()).unwrap();
    }
}
