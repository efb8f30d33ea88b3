//! Brute-force oracles that share no code with the library's matching and
//! search routines.
#![allow(dead_code)]

use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use robust_assignment::graph::BipartiteMultigraph;
use robust_assignment::instance::RapInstance;
use robust_assignment::reductions::{random_instance, RandomParams};

/// Writes straight to stderr so the line shows up even under captured
/// test output.
pub fn report(line: &str) {
    let mut err = std::io::stderr().lock();
    let _ = writeln!(err, "{line}");
}

/// Size of a maximum matching using only edges with `usable[e]`, by simple
/// augmenting paths from every R node.
pub fn kuhn_matching_size(g: &BipartiteMultigraph, usable: &[bool]) -> usize {
    fn augment(
        g: &BipartiteMultigraph,
        usable: &[bool],
        r: usize,
        seen: &mut [bool],
        owner: &mut [Option<usize>],
    ) -> bool {
        for (e, &(er, t)) in g.edges().iter().enumerate() {
            if er != r || !usable[e] || seen[t] {
                continue;
            }
            seen[t] = true;
            if owner[t].is_none() || augment(g, usable, owner[t].unwrap(), seen, owner) {
                owner[t] = Some(r);
                return true;
            }
        }
        false
    }
    let mut owner = vec![None; g.n_t()];
    (0..g.n_r()).filter(|&r| augment(g, usable, r, &mut vec![false; g.n_t()], &mut owner)).count()
}

pub fn has_perfect_matching(g: &BipartiteMultigraph, usable: &[bool]) -> bool {
    g.n_r() == g.n_t() && kuhn_matching_size(g, usable) == g.n_r()
}

/// Feasibility straight from the definition: for every vulnerable `f`, the
/// selection minus `f` has a perfect matching; with no vulnerable edge the
/// selection itself must have one. Unbalanced graphs need a matching
/// covering the smaller side.
pub fn feasible(inst: &RapInstance, selected: &[bool]) -> bool {
    let g = inst.graph();
    let need = g.n_r().min(g.n_t());
    let ok = |mask: &[bool]| kuhn_matching_size(g, mask) == need;
    let vulnerable: Vec<usize> = (0..inst.num_edges()).filter(|&e| inst.is_vulnerable(e)).collect();
    if vulnerable.is_empty() {
        return ok(selected);
    }
    vulnerable.iter().all(|&f| {
        let mut mask = selected.to_vec();
        mask[f] = false;
        ok(&mask)
    })
}

pub fn feasible_ids(inst: &RapInstance, ids: &[usize]) -> bool {
    let mut mask = vec![false; inst.num_edges()];
    for &e in ids {
        mask[e] = true;
    }
    feasible(inst, &mask)
}

/// Cheapest feasible subset over all `2^m` subsets; ties go to the first
/// subset in lexicographic order of sorted ids.
pub fn brute_force_optimum(inst: &RapInstance) -> Option<(f64, Vec<usize>)> {
    let m = inst.num_edges();
    assert!(m <= 22, "brute force over 2^{m} subsets");
    let mut best: Option<(f64, Vec<usize>)> = None;
    for bits in 0u32..(1 << m) {
        let ids: Vec<usize> = (0..m).filter(|&e| bits >> e & 1 == 1).collect();
        let cost: f64 = ids.iter().map(|&e| inst.cost(e)).sum();
        if best.as_ref().is_some_and(|(c, b)| cost > *c + 1e-9 || (cost > *c - 1e-9 && ids >= *b)) {
            continue;
        }
        if feasible_ids(inst, &ids) {
            best = Some((cost, ids));
        }
    }
    best
}

/// Minimum-cost perfect matching value over all permutations.
pub fn min_cost_perfect_matching(inst: &RapInstance) -> Option<f64> {
    let g = inst.graph();
    let n = g.n_r();
    // cheapest edge per (r, t)
    let mut cheapest = vec![vec![f64::INFINITY; n]; n];
    for (e, &(r, t)) in g.edges().iter().enumerate() {
        cheapest[r][t] = cheapest[r][t].min(inst.cost(e));
    }
    let mut perm: Vec<usize> = (0..n).collect();
    let mut best = f64::INFINITY;
    permute(&mut perm, 0, &mut |p| {
        let c: f64 = p.iter().enumerate().map(|(r, &t)| cheapest[r][t]).sum();
        best = best.min(c);
    });
    best.is_finite().then_some(best)
}

fn permute(p: &mut Vec<usize>, k: usize, visit: &mut dyn FnMut(&[usize])) {
    if k == p.len() {
        visit(p);
        return;
    }
    for i in k..p.len() {
        p.swap(k, i);
        permute(p, k + 1, visit);
        p.swap(k, i);
    }
}

/// Node count of a shortest simple path from R node `s` to T node `t`
/// whose removal leaves a perfectly matchable graph.
pub fn nice_path_nodes(h: &BipartiteMultigraph, s: usize, t: usize) -> Option<usize> {
    let n = h.num_nodes();
    let node = |side_t: bool, i: usize| if side_t { h.n_r() + i } else { i };
    let mut adj = vec![Vec::new(); n];
    for &(r, tt) in h.edges() {
        adj[node(false, r)].push(node(true, tt));
        adj[node(true, tt)].push(node(false, r));
    }
    let goal = node(true, t);
    let mut best: Option<usize> = None;
    let mut on_path = vec![false; n];
    fn dfs(
        h: &BipartiteMultigraph,
        adj: &[Vec<usize>],
        v: usize,
        goal: usize,
        len: usize,
        on_path: &mut [bool],
        best: &mut Option<usize>,
    ) {
        on_path[v] = true;
        if v == goal {
            let usable: Vec<bool> = h
                .edges()
                .iter()
                .map(|&(r, t)| !on_path[r] && !on_path[h.n_r() + t])
                .collect();
            // The rest must be balanced and perfectly matchable.
            let rest_r = (0..h.n_r()).filter(|&r| !on_path[r]).count();
            let rest_t = (0..h.n_t()).filter(|&t| !on_path[h.n_r() + t]).count();
            if rest_r == rest_t && kuhn_matching_size(h, &usable) == rest_r && best.is_none_or(|b| len < b) {
                *best = Some(len);
            }
        } else {
            for &w in &adj[v] {
                if !on_path[w] {
                    dfs(h, adj, w, goal, len + 1, on_path, best);
                }
            }
        }
        on_path[v] = false;
    }
    dfs(h, &adj, node(false, s), goal, 1, &mut on_path, &mut best);
    best
}

/// Seeded random feasible balanced instance with `n` nodes per side and at
/// most `max_edges` edges.
pub fn random_suite_instance(seed: u64, n: usize, max_edges: usize, vuln_prob: f64, costs: (u32, u32)) -> RapInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let params = RandomParams {
            n_r: n,
            n_t: n,
            edge_prob: rng.random_range(0.35..0.6),
            vuln_prob,
            cost_range: costs,
            seed: rng.random(),
        };
        if let Ok(inst) = random_instance(&params) {
            if inst.num_edges() <= max_edges {
                return inst;
            }
        }
    }
}

/// Same graph and vulnerability with every cost set to one.
pub fn with_unit_costs(inst: &RapInstance) -> RapInstance {
    RapInstance::new(inst.graph().clone(), inst.vulnerable_edges(), vec![1.0; inst.num_edges()]).unwrap()
}
