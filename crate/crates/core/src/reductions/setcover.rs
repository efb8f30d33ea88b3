//! Set Cover to robust assignment.
//!
//! Node layout (each side numbered in construction order):
//!
//! | side | block                     |
//! |------|---------------------------|
//! | T    | `u_s` for each element    |
//! | T    | `vbar_S` for each set     |
//! | T    | `w_S` for each set        |
//! | T    | gadget nodes `x1`, `y1`, `z1` |
//! | R    | `v_S` for each set        |
//! | R    | `ubar_s` for each element |
//! | R    | `vtilde_S` for each set   |
//! | R    | gadget nodes `x2`, `y2`, `z2` |
//!
//! Edges are emitted class by class, `E1` through `E6`; a class replaced by
//! a gadget contributes the gadget edges in its place.

use std::fmt;

use crate::error::{RapError, Result};
use crate::graph::{BipartiteMultigraph, EdgeId};
use crate::instance::{verify_solution, RapInstance, Solution};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SetCoverInstance {
    k: usize,
    sets: Vec<Vec<usize>>,
}

impl SetCoverInstance {
    /// Elements are `1..=k`. Sets are sorted and deduplicated; the union
    /// must be the whole ground set.
    pub fn new(k: usize, sets: Vec<Vec<usize>>) -> Result<Self> {
        let mut covered = vec![false; k + 1];
        let mut clean = Vec::with_capacity(sets.len());
        for (i, mut s) in sets.into_iter().enumerate() {
            s.sort_unstable();
            s.dedup();
            if let Some(&bad) = s.iter().find(|&&x| x == 0 || x > k) {
                return Err(RapError::InvalidInstance(format!("set {} has element {bad} outside 1..={k}", i + 1)));
            }
            for &x in &s {
                covered[x] = true;
            }
            clean.push(s);
        }
        if let Some(x) = (1..=k).find(|&x| !covered[x]) {
            return Err(RapError::InvalidInstance(format!("set cover infeasible: element {x} is in no set")));
        }
        Ok(SetCoverInstance { k, sets: clean })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn sets(&self) -> &[Vec<usize>] {
        &self.sets
    }

    /// Whether the sets with the given indices cover `1..=k`.
    pub fn is_cover(&self, chosen: &[usize]) -> bool {
        let mut covered = vec![false; self.k + 1];
        for &i in chosen {
            for &x in &self.sets[i] {
                covered[x] = true;
            }
        }
        covered[1..].iter().all(|&c| c)
    }

    /// Size of a smallest cover, by enumeration.
    pub fn min_cover_size(&self) -> usize {
        let l = self.sets.len();
        assert!(l <= 24, "enumeration over {l} sets is too large");
        (0u32..1 << l)
            .filter(|mask| {
                let chosen: Vec<usize> = (0..l).filter(|i| mask >> i & 1 == 1).collect();
                self.is_cover(&chosen)
            })
            .map(|mask| mask.count_ones() as usize)
            .min()
            .expect("the full collection is a cover")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Variant {
    /// Steps T1–T4; only `E1` vulnerable, cost 1 on `E4`.
    Basic,
    /// Adds T5; every edge vulnerable, cost 1 on `E4`.
    UniformWeighted,
    /// Adds T5 and T6; every edge vulnerable, unit costs.
    UniformCard,
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Variant::Basic => "basic",
            Variant::UniformWeighted => "uniform_weighted",
            Variant::UniformCard => "uniform_card",
        })
    }
}

impl std::str::FromStr for Variant {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "basic" => Ok(Variant::Basic),
            "uniform_weighted" | "uniform-weighted" => Ok(Variant::UniformWeighted),
            "uniform_card" | "uniform-card" => Ok(Variant::UniformCard),
            _ => Err(format!("unknown variant '{s}' (basic, uniform_weighted, uniform_card)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EdgeClass {
    E1,
    E2,
    E3,
    E4,
    E5,
    E6,
}

/// Class of an edge plus a readable description of its endpoints.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeRole {
    pub class: EdgeClass,
    pub label: String,
}

#[derive(Debug, Clone)]
pub struct ReducedInstance {
    pub rap: RapInstance,
    pub variant: Variant,
    pub cover: SetCoverInstance,
    pub roles: Vec<EdgeRole>,
    /// The `E4` edge `{vbar_S, vtilde_S}` of each set.
    pub indicators: Vec<EdgeId>,
    pub r_labels: Vec<String>,
    pub t_labels: Vec<String>,
}

impl ReducedInstance {
    pub fn edges_of(&self, class: EdgeClass) -> Vec<EdgeId> {
        self.roles.iter().enumerate().filter(|(_, r)| r.class == class).map(|(e, _)| e).collect()
    }

    /// Number of edges in classes `E1`, `E3` and `E5`.
    pub fn q(&self) -> usize {
        self.roles.iter().filter(|r| matches!(r.class, EdgeClass::E1 | EdgeClass::E3 | EdgeClass::E5)).count()
    }

    /// Every edge outside `E4` plus the indicators of the chosen sets.
    pub fn solution_for_cover(&self, chosen: &[usize]) -> Solution {
        let mut edges: Vec<EdgeId> = (0..self.rap.num_edges()).filter(|&e| self.roles[e].class != EdgeClass::E4).collect();
        edges.extend(chosen.iter().map(|&i| self.indicators[i]));
        Solution::new(&self.rap, edges).expect("ids exist")
    }

    /// Header comments and per-edge notes for the instance dump.
    pub fn annotations(&self) -> (Vec<String>, Vec<String>) {
        let mut header = vec![format!(
            "set cover reduction, variant {}, k = {}, {} sets",
            self.variant,
            self.cover.k(),
            self.cover.sets().len()
        )];
        let names = |labels: &[String]| labels.iter().enumerate().map(|(i, l)| format!("{i}={l}")).collect::<Vec<_>>().join(" ");
        header.push(format!("R: {}", names(&self.r_labels)));
        header.push(format!("T: {}", names(&self.t_labels)));
        let notes = self.roles.iter().map(|r| format!("{:?} {}", r.class, r.label)).collect();
        (header, notes)
    }
}

struct Builder {
    r_labels: Vec<String>,
    t_labels: Vec<String>,
    edges: Vec<(usize, usize)>,
    roles: Vec<EdgeRole>,
}

impl Builder {
    fn r_node(&mut self, label: String) -> usize {
        self.r_labels.push(label);
        self.r_labels.len() - 1
    }

    fn t_node(&mut self, label: String) -> usize {
        self.t_labels.push(label);
        self.t_labels.len() - 1
    }

    fn edge(&mut self, r: usize, t: usize, class: EdgeClass) -> EdgeId {
        let label = format!("{}-{}", self.r_labels[r], self.t_labels[t]);
        self.edges.push((r, t));
        self.roles.push(EdgeRole { class, label });
        self.edges.len() - 1
    }

    /// Replaces `{r, t}` by two parallel paths of length three.
    fn six_cycle(&mut self, r: usize, t: usize, class: EdgeClass, tag: &str) {
        for side in ["x", "y"] {
            let t1 = self.t_node(format!("{side}1[{tag}]"));
            let r2 = self.r_node(format!("{side}2[{tag}]"));
            self.edge(r, t1, class);
            self.edge(r2, t1, class);
            self.edge(r2, t, class);
        }
    }
}

pub fn from_set_cover(sc: &SetCoverInstance, variant: Variant) -> Result<ReducedInstance> {
    let k = sc.k();
    let l = sc.sets().len();
    let mut b = Builder { r_labels: Vec::new(), t_labels: Vec::new(), edges: Vec::new(), roles: Vec::new() };
    let u: Vec<usize> = (1..=k).map(|s| b.t_node(format!("u_{s}"))).collect();
    let vbar: Vec<usize> = (1..=l).map(|i| b.t_node(format!("vbar_S{i}"))).collect();
    let w: Vec<usize> = (1..=l).map(|i| b.t_node(format!("w_S{i}"))).collect();
    let v: Vec<usize> = (1..=l).map(|i| b.r_node(format!("v_S{i}"))).collect();
    let ubar: Vec<usize> = (1..=k).map(|s| b.r_node(format!("ubar_{s}"))).collect();
    let vtilde: Vec<usize> = (1..=l).map(|i| b.r_node(format!("vtilde_S{i}"))).collect();
    let gadgets = variant != Variant::Basic;

    for s in 0..k {
        if variant == Variant::UniformCard {
            let z1 = b.t_node(format!("z1[{}]", s + 1));
            let z2 = b.r_node(format!("z2[{}]", s + 1));
            b.edge(ubar[s], z1, EdgeClass::E1);
            b.edge(z2, z1, EdgeClass::E1);
            b.edge(z2, u[s], EdgeClass::E1);
        } else {
            b.edge(ubar[s], u[s], EdgeClass::E1);
        }
    }
    for (i, set) in sc.sets().iter().enumerate() {
        for &x in set {
            b.edge(v[i], u[x - 1], EdgeClass::E2);
        }
    }
    for i in 0..l {
        if gadgets {
            b.six_cycle(v[i], vbar[i], EdgeClass::E3, &format!("E3,S{}", i + 1));
        } else {
            b.edge(v[i], vbar[i], EdgeClass::E3);
        }
    }
    let indicators: Vec<EdgeId> = (0..l).map(|i| b.edge(vtilde[i], vbar[i], EdgeClass::E4)).collect();
    for i in 0..l {
        if gadgets {
            b.six_cycle(vtilde[i], w[i], EdgeClass::E5, &format!("E5,S{}", i + 1));
        } else {
            b.edge(vtilde[i], w[i], EdgeClass::E5);
        }
    }
    for (i, set) in sc.sets().iter().enumerate() {
        for &x in set {
            b.edge(ubar[x - 1], w[i], EdgeClass::E6);
        }
    }

    let m = b.edges.len();
    let graph = BipartiteMultigraph::from_edges(b.r_labels.len(), b.t_labels.len(), b.edges)?;
    let costs: Vec<f64> = b
        .roles
        .iter()
        .map(|r| match variant {
            Variant::UniformCard => 1.0,
            _ if r.class == EdgeClass::E4 => 1.0,
            _ => 0.0,
        })
        .collect();
    let vulnerable: Vec<EdgeId> = match variant {
        Variant::Basic => (0..m).filter(|&e| b.roles[e].class == EdgeClass::E1).collect(),
        _ => (0..m).collect(),
    };
    let rap = RapInstance::new(graph, vulnerable, costs)?;
    Ok(ReducedInstance {
        rap,
        variant,
        cover: sc.clone(),
        roles: b.roles,
        indicators,
        r_labels: b.r_labels,
        t_labels: b.t_labels,
    })
}

/// The sets (0-based indices) whose indicator edge is in the feasible
/// solution `x`. Adding the edges outside `E4` would keep `x` feasible and
/// leave the indicators unchanged, so any feasible `x` must decode to a
/// cover; a non-cover is reported as a broken reduction.
pub fn decode_cover(ri: &ReducedInstance, x: &Solution) -> Result<Vec<usize>> {
    verify_solution(&ri.rap, x)?;
    let chosen: Vec<usize> = (0..ri.indicators.len()).filter(|&i| x.contains(ri.indicators[i])).collect();
    if !ri.cover.is_cover(&chosen) {
        return Err(RapError::ReductionViolated(format!(
            "feasible solution decodes to non-cover {:?}",
            chosen.iter().map(|i| i + 1).collect::<Vec<_>>()
        )));
    }
    Ok(chosen)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::check_feasible;

    fn one_set() -> SetCoverInstance {
        SetCoverInstance::new(2, vec![vec![1, 2]]).unwrap()
    }

    #[test]
    fn basic_sizes() {
        let ri = from_set_cover(&one_set(), Variant::Basic).unwrap();
        let g = ri.rap.graph();
        assert_eq!((g.n_r(), g.n_t()), (4, 4));
        assert_eq!(g.num_edges(), 9);
        assert_eq!(ri.rap.vulnerable_edges(), ri.edges_of(EdgeClass::E1));
        assert_eq!(ri.rap.vulnerable_edges().len(), 2);
        assert!(check_feasible(&ri.rap).unwrap());
    }

    #[test]
    fn uniform_card_sizes() {
        let sc = SetCoverInstance::new(2, vec![vec![1], vec![2]]).unwrap();
        let ri = from_set_cover(&sc, Variant::UniformCard).unwrap();
        assert_eq!(ri.rap.num_edges(), 36);
        assert_eq!(ri.q(), 3 * 2 + 12 * 2);
        assert!(ri.rap.is_uniform() && ri.rap.has_unit_costs());
        assert!(ri.rap.graph().is_balanced());
    }

    #[test]
    fn decode_indicator_solution() {
        let ri = from_set_cover(&one_set(), Variant::Basic).unwrap();
        assert_eq!(decode_cover(&ri, &ri.solution_for_cover(&[0])).unwrap(), vec![0]);
        assert_eq!(decode_cover(&ri, &Solution::all_edges(&ri.rap)).unwrap(), vec![0]);
        assert!(decode_cover(&ri, &ri.solution_for_cover(&[])).is_err());
    }

    #[test]
    fn rejects_uncovered_element() {
        assert!(SetCoverInstance::new(3, vec![vec![1, 2]]).is_err());
        assert!(SetCoverInstance::new(2, vec![vec![0, 1, 2]]).is_err());
    }

    #[test]
    fn min_cover() {
        let sc = SetCoverInstance::new(4, vec![vec![1, 2], vec![3], vec![2, 3, 4], vec![1]]).unwrap();
        assert_eq!(sc.min_cover_size(), 2);
    }
}
