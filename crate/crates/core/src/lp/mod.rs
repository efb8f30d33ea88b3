//! The linear relaxation of the robust assignment formulation.
//!
//! Variables are a capacity `y_e` per edge and, per scenario, a fractional
//! perfect matching `x^s` that avoids the failed edge and stays below `y`.
//! For bipartite graphs the degree equalities describe the perfect matching
//! polytope exactly, so no odd-set rows are needed.

mod simplex;

use std::fmt::Write as _;

pub use simplex::RevisedSimplex;

use crate::error::{RapError, Result, Scenario};
use crate::graph::EdgeId;
use crate::instance::{check_feasible, RapInstance};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Primal feasibility of returned points.
    pub feasibility: f64,
    /// Reduced-cost threshold for optimality.
    pub optimality: f64,
    /// Smallest pivot element accepted.
    pub pivot: f64,
    /// Values below this are reported as zero.
    pub zero: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { feasibility: 1e-9, optimality: 1e-7, pivot: 1e-9, zero: 1e-9 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowKind {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinearRow {
    pub name: String,
    pub coeffs: Vec<(usize, f64)>,
    pub kind: RowKind,
    pub rhs: f64,
}

/// `min objective·x` subject to `rows`, `0 <= x_j <= upper_j`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct LinearProgram {
    pub num_vars: usize,
    pub objective: Vec<f64>,
    pub upper: Vec<Option<f64>>,
    pub rows: Vec<LinearRow>,
    /// Optional column names for dumps; `x{j}` is used when empty.
    pub var_names: Vec<String>,
}

impl LinearProgram {
    fn var_name(&self, j: usize) -> String {
        self.var_names.get(j).cloned().unwrap_or_else(|| format!("x{j}"))
    }

    /// CPLEX LP text of the program.
    pub fn to_lp_format(&self) -> String {
        let mut out = String::from("Minimize\n obj:");
        let terms = |out: &mut String, coeffs: &mut dyn Iterator<Item = (usize, f64)>| {
            let mut any = false;
            for (j, a) in coeffs {
                if a == 0.0 {
                    continue;
                }
                let sign = if a < 0.0 { '-' } else { '+' };
                let _ = write!(out, " {sign} {} {}", a.abs(), self.var_name(j));
                any = true;
            }
            if !any {
                out.push_str(" 0");
            }
        };
        terms(&mut out, &mut self.objective.iter().copied().enumerate());
        out.push_str("\nSubject To\n");
        for (i, row) in self.rows.iter().enumerate() {
            let name = if row.name.is_empty() { format!("c{i}") } else { row.name.clone() };
            let _ = write!(out, " {name}:");
            terms(&mut out, &mut row.coeffs.iter().copied());
            let op = match row.kind {
                RowKind::Le => "<=",
                RowKind::Ge => ">=",
                RowKind::Eq => "=",
            };
            let _ = writeln!(out, " {op} {}", row.rhs);
        }
        out.push_str("Bounds\n");
        for j in 0..self.num_vars {
            match self.upper.get(j).copied().flatten() {
                Some(u) => {
                    let _ = writeln!(out, " 0 <= {} <= {u}", self.var_name(j));
                }
                None => {
                    let _ = writeln!(out, " {} >= 0", self.var_name(j));
                }
            }
        }
        out.push_str("End\n");
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub values: Vec<f64>,
    pub objective: f64,
    pub iterations: usize,
}

/// A linear programming backend. Implementations return an optimal point
/// of `lp` or an error; they must be deterministic for a given program.
pub trait LpSolver {
    fn solve(&self, lp: &LinearProgram) -> Result<LpSolution>;
}

/// The relaxation of one instance together with its variable layout.
#[derive(Debug, Clone)]
pub struct RapLp {
    program: LinearProgram,
    scenarios: Vec<Scenario>,
    num_edges: usize,
    degree_rows: usize,
}

impl RapLp {
    pub fn program(&self) -> &LinearProgram {
        &self.program
    }

    /// Scenario blocks in order; a single nominal block when there are no
    /// vulnerable edges.
    pub fn scenarios(&self) -> &[Scenario] {
        &self.scenarios
    }

    pub fn num_vars(&self) -> usize {
        self.program.num_vars
    }

    pub fn num_degree_rows(&self) -> usize {
        self.degree_rows
    }

    pub fn y_var(&self, e: EdgeId) -> usize {
        e
    }

    pub fn x_var(&self, block: usize, e: EdgeId) -> usize {
        self.num_edges * (block + 1) + e
    }
}

pub fn build_lp(inst: &RapInstance) -> Result<RapLp> {
    if !check_feasible(inst)? {
        let s = crate::instance::first_failure(inst, &vec![true; inst.num_edges()]).unwrap_or(Scenario::Nominal);
        return Err(RapError::InfeasibleInstance(s));
    }
    let g = inst.graph();
    let m = g.num_edges();
    let scenarios = inst.scenarios();
    let num_vars = m * (scenarios.len() + 1);
    let mut objective = vec![0.0; num_vars];
    objective[..m].copy_from_slice(inst.costs());
    let mut upper = vec![None; num_vars];
    for u in upper.iter_mut().take(m) {
        *u = Some(1.0);
    }
    let mut var_names: Vec<String> = (0..m).map(|e| format!("y_{e}")).collect();
    let mut rows = Vec::new();
    let mut degree_rows = 0;
    for (b, s) in scenarios.iter().enumerate() {
        let tag = match s {
            Scenario::Nominal => "nom".to_string(),
            Scenario::Edge(f) => format!("f{f}"),
        };
        let base = m * (b + 1);
        var_names.extend((0..m).map(|e| format!("x_{tag}_{e}")));
        for v in 0..g.num_nodes() {
            rows.push(LinearRow {
                name: format!("deg_{tag}_{v}"),
                coeffs: g.incident(v).iter().map(|&e| (base + e, 1.0)).collect(),
                kind: RowKind::Eq,
                rhs: 1.0,
            });
            degree_rows += 1;
        }
        if let Scenario::Edge(f) = s {
            rows.push(LinearRow {
                name: format!("fail_{tag}"),
                coeffs: vec![(base + f, 1.0)],
                kind: RowKind::Eq,
                rhs: 0.0,
            });
        }
        for e in 0..m {
            rows.push(LinearRow {
                name: format!("cap_{tag}_{e}"),
                coeffs: vec![(base + e, 1.0), (e, -1.0)],
                kind: RowKind::Le,
                rhs: 0.0,
            });
        }
    }
    Ok(RapLp {
        program: LinearProgram { num_vars, objective, upper, rows, var_names },
        scenarios,
        num_edges: m,
        degree_rows,
    })
}

/// An optimal point of the relaxation, split into its blocks.
#[derive(Debug, Clone, PartialEq)]
pub struct FractionalSolution {
    pub y: Vec<f64>,
    /// One vector per scenario block, aligned with [`RapLp::scenarios`].
    pub x: Vec<Vec<f64>>,
    pub scenarios: Vec<Scenario>,
    pub objective: f64,
    pub iterations: usize,
}

impl FractionalSolution {
    /// The block of scenario `s`, if the LP has one.
    pub fn block(&self, s: Scenario) -> Option<&[f64]> {
        self.scenarios.iter().position(|&t| t == s).map(|i| self.x[i].as_slice())
    }

    /// Largest violation of any constraint of `lp` by this point.
    pub fn max_violation(&self, inst: &RapInstance) -> f64 {
        let g = inst.graph();
        let mut worst: f64 = 0.0;
        for y in &self.y {
            worst = worst.max(-y).max(y - 1.0);
        }
        for (s, x) in self.scenarios.iter().zip(&self.x) {
            for v in 0..g.num_nodes() {
                let sum: f64 = g.incident(v).iter().map(|&e| x[e]).sum();
                worst = worst.max((sum - 1.0).abs());
            }
            if let Some(f) = s.edge() {
                worst = worst.max(x[f]);
            }
            for (xe, ye) in x.iter().zip(&self.y) {
                worst = worst.max(xe - ye).max(-xe);
            }
        }
        worst
    }
}

pub fn solve_lp_with(lp: &RapLp, solver: &dyn LpSolver, tol: Tolerances) -> Result<FractionalSolution> {
    let sol = solver.solve(&lp.program)?;
    let m = lp.num_edges;
    let clean = |v: f64| if v < tol.zero { 0.0 } else { v };
    let y: Vec<f64> = sol.values[..m].iter().map(|&v| clean(v).min(1.0)).collect();
    let x = (0..lp.scenarios.len())
        .map(|b| sol.values[m * (b + 1)..m * (b + 2)].iter().map(|&v| clean(v)).collect())
        .collect();
    let objective = y.iter().zip(&lp.program.objective).map(|(a, c)| a * c).sum();
    Ok(FractionalSolution { y, x, scenarios: lp.scenarios.clone(), objective, iterations: sol.iterations })
}

/// Solves the relaxation with the built-in simplex.
pub fn solve_lp(lp: &RapLp, tol: Tolerances) -> Result<FractionalSolution> {
    let solver = RevisedSimplex { tol, ..RevisedSimplex::default() };
    solve_lp_with(lp, &solver, tol)
}
