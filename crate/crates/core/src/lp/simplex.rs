//! Revised primal simplex in product form.
//!
//! The basis inverse is kept as a file of eta vectors on top of an identity
//! start and rebuilt from scratch every few dozen pivots. Two phases with
//! artificial variables. Pricing is Dantzig's rule; after a run of
//! degenerate pivots the solver falls back to Bland's rule until the
//! objective moves again, which rules out cycling.

use super::{LinearProgram, LpSolution, LpSolver, RowKind, Tolerances};
use crate::error::{RapError, Result};

#[derive(Debug, Clone)]
pub struct RevisedSimplex {
    pub tol: Tolerances,
    /// Iteration cap; `None` picks a size-dependent default.
    pub max_iterations: Option<usize>,
    /// Consecutive degenerate pivots tolerated before switching to Bland.
    pub degenerate_run: usize,
    /// Pivots between reinversions of the basis.
    pub refactor_every: usize,
}

impl Default for RevisedSimplex {
    fn default() -> Self {
        RevisedSimplex { tol: Tolerances::default(), max_iterations: None, degenerate_run: 50, refactor_every: 64 }
    }
}

impl LpSolver for RevisedSimplex {
    fn solve(&self, lp: &LinearProgram) -> Result<LpSolution> {
        let mut model = StandardForm::new(lp);
        model.run(self)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum VarKind {
    Structural,
    Slack,
    Artificial,
}

/// Elementary column transform: pivot on `row` of the transformed column
/// `col`.
#[derive(Debug, Clone)]
struct Eta {
    row: usize,
    pivot: f64,
    /// Off-pivot entries of the transformed column.
    col: Vec<(usize, f64)>,
}

/// `min c x  s.t.  A x = b, x >= 0, b >= 0` with an identity starting basis.
struct StandardForm<'a> {
    lp: &'a LinearProgram,
    /// Structural variable j is pinned to zero by a singleton row.
    fixed: Vec<bool>,
    cols: Vec<Vec<(usize, f64)>>,
    kind: Vec<VarKind>,
    /// Structural index for structural columns.
    origin: Vec<usize>,
    cost: Vec<f64>,
    b: Vec<f64>,
    rows: usize,
    /// The `+1` unit column of each row (slack or artificial).
    unit_of_row: Vec<usize>,
    basis: Vec<usize>,
    pos: Vec<Option<usize>>,
    etas: Vec<Eta>,
    xb: Vec<f64>,
    iterations: usize,
}

impl<'a> StandardForm<'a> {
    fn new(lp: &'a LinearProgram) -> Self {
        let n = lp.num_vars;
        let is_fixing =
            |row: &super::LinearRow| row.kind == RowKind::Eq && row.rhs == 0.0 && row.coeffs.len() == 1 && row.coeffs[0].1 != 0.0;
        let mut fixed = vec![false; n];
        for row in lp.rows.iter().filter(|r| is_fixing(r)) {
            fixed[row.coeffs[0].0] = true;
        }
        // Rows: original rows except singleton fixings, then upper bounds.
        let mut rows: Vec<(Vec<(usize, f64)>, RowKind, f64)> = Vec::new();
        for row in lp.rows.iter().filter(|r| !is_fixing(r)) {
            let coeffs = row.coeffs.iter().copied().filter(|&(j, a)| !fixed[j] && a != 0.0).collect();
            rows.push((coeffs, row.kind, row.rhs));
        }
        for (j, u) in lp.upper.iter().enumerate() {
            if let Some(u) = *u {
                if !fixed[j] {
                    rows.push((vec![(j, 1.0)], RowKind::Le, u));
                }
            }
        }
        let m = rows.len();
        let mut cols: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
        let mut b = vec![0.0; m];
        let mut kind = vec![VarKind::Structural; n];
        let mut origin: Vec<usize> = (0..n).collect();
        let mut cost: Vec<f64> = lp.objective.clone();
        let mut basis = vec![usize::MAX; m];
        for (i, (coeffs, rk, rhs)) in rows.into_iter().enumerate() {
            let sign = if rhs < 0.0 { -1.0 } else { 1.0 };
            let rk = match (rk, sign < 0.0) {
                (RowKind::Le, true) => RowKind::Ge,
                (RowKind::Ge, true) => RowKind::Le,
                (k, _) => k,
            };
            b[i] = rhs * sign;
            for (j, a) in coeffs {
                cols[j].push((i, a * sign));
            }
            let mut add = |col: Vec<(usize, f64)>, k: VarKind| {
                cols.push(col);
                kind.push(k);
                origin.push(usize::MAX);
                cost.push(0.0);
                cols.len() - 1
            };
            match rk {
                RowKind::Le => basis[i] = add(vec![(i, 1.0)], VarKind::Slack),
                RowKind::Ge => {
                    add(vec![(i, -1.0)], VarKind::Slack);
                    basis[i] = add(vec![(i, 1.0)], VarKind::Artificial);
                }
                RowKind::Eq => basis[i] = add(vec![(i, 1.0)], VarKind::Artificial),
            }
        }
        let unit_of_row = basis.clone();
        let mut pos = vec![None; cols.len()];
        for (i, &v) in basis.iter().enumerate() {
            pos[v] = Some(i);
        }
        let xb = b.clone();
        StandardForm {
            lp,
            fixed,
            cols,
            kind,
            origin,
            cost,
            b,
            rows: m,
            unit_of_row,
            basis,
            pos,
            etas: Vec::new(),
            xb,
            iterations: 0,
        }
    }

    fn run(&mut self, cfg: &RevisedSimplex) -> Result<LpSolution> {
        let limit = cfg.max_iterations.unwrap_or(50 * (self.rows + self.cols.len()) + 1000);
        let tol = cfg.tol;
        let has_artificial = self.basis.iter().any(|&v| self.kind[v] == VarKind::Artificial);
        if has_artificial {
            let phase1: Vec<f64> =
                self.kind.iter().map(|&k| if k == VarKind::Artificial { 1.0 } else { 0.0 }).collect();
            self.optimize(&phase1, true, cfg, limit)?;
            let infeas: f64 = self.basis.iter().zip(&self.xb).map(|(&v, &x)| phase1[v] * x).sum();
            if infeas > tol.optimality.max(1e-7) {
                return Err(RapError::LpInfeasible);
            }
            self.drive_out_artificials(tol);
        }
        let costs = self.cost.clone();
        self.optimize(&costs, false, cfg, limit)?;
        if self.max_residual() > tol.feasibility {
            self.reinvert();
            self.optimize(&costs, false, cfg, limit)?;
        }
        Ok(self.extract())
    }

    fn usable(&self, j: usize) -> bool {
        !(self.kind[j] == VarKind::Structural && self.fixed[self.origin[j]])
    }

    fn col_dot(&self, pi: &[f64], j: usize) -> f64 {
        self.cols[j].iter().map(|&(i, a)| pi[i] * a).sum()
    }

    /// `B^{-1} a` in place.
    fn ftran(&self, a: &mut [f64]) {
        for eta in &self.etas {
            let v = a[eta.row];
            if v != 0.0 {
                let v = v / eta.pivot;
                for &(i, x) in &eta.col {
                    a[i] -= x * v;
                }
                a[eta.row] = v;
            }
        }
    }

    /// `c^T B^{-1}` in place.
    fn btran(&self, c: &mut [f64]) {
        for eta in self.etas.iter().rev() {
            let s: f64 = eta.col.iter().map(|&(i, x)| x * c[i]).sum();
            c[eta.row] = (c[eta.row] - s) / eta.pivot;
        }
    }

    fn duals(&self, c: &[f64]) -> Vec<f64> {
        let mut pi: Vec<f64> = self.basis.iter().map(|&v| c[v]).collect();
        self.btran(&mut pi);
        pi
    }

    fn column(&self, q: usize) -> Vec<f64> {
        let mut alpha = vec![0.0; self.rows];
        for &(k, a) in &self.cols[q] {
            alpha[k] = a;
        }
        self.ftran(&mut alpha);
        alpha
    }

    fn push_eta(&mut self, r: usize, alpha: &[f64]) {
        let col = alpha.iter().enumerate().filter(|&(i, &x)| i != r && x.abs() > 1e-14).map(|(i, &x)| (i, x)).collect();
        self.etas.push(Eta { row: r, pivot: alpha[r], col });
    }

    fn recompute_xb(&mut self) {
        let mut x = self.b.clone();
        self.ftran(&mut x);
        self.xb = x;
    }

    fn pivot(&mut self, r: usize, q: usize, alpha: &[f64]) {
        let theta = self.xb[r] / alpha[r];
        for (i, x) in self.xb.iter_mut().enumerate() {
            if i != r && alpha[i] != 0.0 {
                *x -= alpha[i] * theta;
            }
        }
        self.xb[r] = theta;
        self.push_eta(r, alpha);
        let leaving = self.basis[r];
        self.pos[leaving] = None;
        self.basis[r] = q;
        self.pos[q] = Some(r);
        self.iterations += 1;
    }

    fn optimize(&mut self, c: &[f64], phase1: bool, cfg: &RevisedSimplex, limit: usize) -> Result<()> {
        let tol = cfg.tol;
        let mut degenerate = 0usize;
        let mut bland = false;
        let mut since_refactor = 0usize;
        loop {
            if self.iterations >= limit {
                return Err(RapError::IterationLimit(self.iterations));
            }
            if since_refactor >= cfg.refactor_every {
                self.reinvert();
                since_refactor = 0;
            }
            let pi = self.duals(c);
            let mut entering: Option<(usize, f64)> = None;
            for j in 0..self.cols.len() {
                if self.pos[j].is_some() || (!phase1 && self.kind[j] == VarKind::Artificial) || !self.usable(j) {
                    continue;
                }
                let d = c[j] - self.col_dot(&pi, j);
                if d < -tol.optimality {
                    match entering {
                        None => entering = Some((j, d)),
                        Some((_, best)) if !bland && d < best => entering = Some((j, d)),
                        _ => {}
                    }
                    if bland {
                        break;
                    }
                }
            }
            let Some((q, _)) = entering else {
                if since_refactor > 0 {
                    // Confirm optimality on a fresh factorization.
                    self.reinvert();
                    since_refactor = 0;
                    continue;
                }
                return Ok(());
            };
            let alpha = self.column(q);
            // Ratio test; basic artificials are held at zero from both sides.
            let mut leave: Option<(usize, f64)> = None;
            for (i, &a) in alpha.iter().enumerate() {
                let art = !phase1 && self.kind[self.basis[i]] == VarKind::Artificial;
                let denom = if art { a.abs() } else { a };
                if denom <= tol.pivot {
                    continue;
                }
                let ratio = self.xb[i].max(0.0) / denom;
                let better = match leave {
                    None => true,
                    Some((li, lr)) => {
                        if ratio < lr - 1e-12 {
                            true
                        } else if ratio <= lr + 1e-12 {
                            if bland {
                                self.basis[i] < self.basis[li]
                            } else {
                                denom > alpha[li].abs()
                            }
                        } else {
                            false
                        }
                    }
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
            let Some((r, ratio)) = leave else {
                return Err(RapError::LpUnbounded);
            };
            if self.xb[r] < 0.0 || (!phase1 && self.kind[self.basis[r]] == VarKind::Artificial) {
                self.xb[r] = if ratio == 0.0 { 0.0 } else { self.xb[r].max(0.0) };
            }
            if alpha[r] < 0.0 {
                // An artificial leaving through a negative entry stays at zero.
                self.xb[r] = 0.0;
            }
            self.pivot(r, q, &alpha);
            since_refactor += 1;
            if ratio <= 1e-12 {
                degenerate += 1;
                if degenerate >= cfg.degenerate_run {
                    bland = true;
                }
            } else {
                degenerate = 0;
                bland = false;
            }
        }
    }

    /// Pivots basic artificials (all at zero) out on any usable column; an
    /// artificial that cannot leave sits on a redundant row.
    fn drive_out_artificials(&mut self, tol: Tolerances) {
        let m = self.rows;
        for r in 0..m {
            if self.kind[self.basis[r]] != VarKind::Artificial {
                continue;
            }
            let mut row = vec![0.0; m];
            row[r] = 1.0;
            self.btran(&mut row);
            let candidate = (0..self.cols.len()).find(|&j| {
                self.pos[j].is_none()
                    && self.kind[j] != VarKind::Artificial
                    && self.usable(j)
                    && self.col_dot(&row, j).abs() > tol.pivot.max(1e-7)
            });
            if let Some(q) = candidate {
                let alpha = self.column(q);
                self.xb[r] = 0.0;
                self.pivot(r, q, &alpha);
            }
        }
        self.reinvert();
    }

    fn primal(&self) -> Vec<f64> {
        let mut x = vec![0.0; self.lp.num_vars];
        for (i, &v) in self.basis.iter().enumerate() {
            if self.kind[v] == VarKind::Structural {
                x[self.origin[v]] = self.xb[i].max(0.0);
            }
        }
        x
    }

    fn max_residual(&self) -> f64 {
        let x = self.primal();
        let mut worst: f64 = 0.0;
        for row in &self.lp.rows {
            let lhs: f64 = row.coeffs.iter().map(|&(j, a)| a * x[j]).sum();
            let viol = match row.kind {
                RowKind::Eq => (lhs - row.rhs).abs(),
                RowKind::Le => (lhs - row.rhs).max(0.0),
                RowKind::Ge => (row.rhs - lhs).max(0.0),
            };
            worst = worst.max(viol);
        }
        for (j, u) in self.lp.upper.iter().enumerate() {
            if let Some(u) = u {
                worst = worst.max(x[j] - u);
            }
        }
        worst
    }

    /// Rebuilds the eta file for the current basis. Unit columns go straight
    /// to their rows; the rest are pivoted in sparsest first, each on the
    /// largest available entry. A column that turns out dependent is
    /// replaced by the unit column of a free row.
    fn reinvert(&mut self) {
        let m = self.rows;
        self.etas.clear();
        let mut taken = vec![false; m];
        let mut placed = vec![usize::MAX; m];
        let mut rest = Vec::new();
        for &v in &self.basis {
            let col = &self.cols[v];
            if col.len() == 1 && col[0].1 == 1.0 && !taken[col[0].0] {
                taken[col[0].0] = true;
                placed[col[0].0] = v;
            } else {
                rest.push(v);
            }
        }
        rest.sort_by_key(|&v| (self.cols[v].len(), v));
        let mut dropped = Vec::new();
        for v in rest {
            let alpha = self.column(v);
            let best = (0..m)
                .filter(|&i| !taken[i] && alpha[i].abs() > 1e-11)
                .max_by(|&a, &b| alpha[a].abs().total_cmp(&alpha[b].abs()).then(b.cmp(&a)));
            match best {
                Some(r) => {
                    self.push_eta(r, &alpha);
                    taken[r] = true;
                    placed[r] = v;
                }
                None => dropped.push(v),
            }
        }
        for (r, slot) in placed.iter_mut().enumerate() {
            if *slot == usize::MAX {
                *slot = self.unit_of_row[r];
            }
        }
        for v in dropped {
            self.pos[v] = None;
        }
        self.basis = placed;
        for (i, &v) in self.basis.iter().enumerate() {
            self.pos[v] = Some(i);
        }
        self.recompute_xb();
    }

    fn extract(&self) -> LpSolution {
        let values = self.primal();
        let objective = values.iter().zip(&self.lp.objective).map(|(x, c)| x * c).sum();
        LpSolution { values, objective, iterations: self.iterations }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lp::LinearRow;

    fn row(coeffs: &[(usize, f64)], kind: RowKind, rhs: f64) -> LinearRow {
        LinearRow { name: String::new(), coeffs: coeffs.to_vec(), kind, rhs }
    }

    #[test]
    fn textbook_maximisation() {
        // max 3x + 5y s.t. x <= 4, 2y <= 12, 3x + 2y <= 18  ->  36 at (2, 6)
        let lp = LinearProgram {
            num_vars: 2,
            objective: vec![-3.0, -5.0],
            upper: vec![None, None],
            var_names: vec![],
            rows: vec![
                row(&[(0, 1.0)], RowKind::Le, 4.0),
                row(&[(1, 2.0)], RowKind::Le, 12.0),
                row(&[(0, 3.0), (1, 2.0)], RowKind::Le, 18.0),
            ],
        };
        let sol = RevisedSimplex::default().solve(&lp).unwrap();
        assert!((sol.objective + 36.0).abs() < 1e-9);
        assert!((sol.values[0] - 2.0).abs() < 1e-9);
        assert!((sol.values[1] - 6.0).abs() < 1e-9);
    }

    #[test]
    fn equality_and_ge_rows() {
        // min x + 2y s.t. x + y = 3, x - y >= -1 (i.e. y <= x + 1), x <= 1.5  ->  x = 1.5, y = 1.5
        let lp = LinearProgram {
            num_vars: 2,
            objective: vec![1.0, 2.0],
            upper: vec![Some(1.5), None],
            var_names: vec![],
            rows: vec![row(&[(0, 1.0), (1, 1.0)], RowKind::Eq, 3.0), row(&[(0, 1.0), (1, -1.0)], RowKind::Ge, -1.0)],
        };
        let sol = RevisedSimplex::default().solve(&lp).unwrap();
        assert!((sol.objective - 4.5).abs() < 1e-9, "{sol:?}");
    }

    #[test]
    fn detects_infeasible() {
        let lp = LinearProgram {
            num_vars: 1,
            objective: vec![1.0],
            upper: vec![Some(1.0)],
            var_names: vec![],
            rows: vec![row(&[(0, 1.0)], RowKind::Ge, 2.0)],
        };
        assert!(matches!(RevisedSimplex::default().solve(&lp), Err(RapError::LpInfeasible)));
    }

    #[test]
    fn detects_unbounded() {
        let lp = LinearProgram {
            num_vars: 2,
            objective: vec![-1.0, 0.0],
            upper: vec![None, None],
            var_names: vec![],
            rows: vec![row(&[(0, 1.0), (1, -1.0)], RowKind::Le, 1.0)],
        };
        assert!(matches!(RevisedSimplex::default().solve(&lp), Err(RapError::LpUnbounded)));
    }

    #[test]
    fn fixed_variables_and_redundant_rows() {
        // x0 fixed at 0; the two equalities are identical.
        let lp = LinearProgram {
            num_vars: 3,
            objective: vec![-5.0, 1.0, 2.0],
            upper: vec![None, None, None],
            var_names: vec![],
            rows: vec![
                row(&[(0, 1.0)], RowKind::Eq, 0.0),
                row(&[(0, 1.0), (1, 1.0), (2, 1.0)], RowKind::Eq, 1.0),
                row(&[(0, 1.0), (1, 1.0), (2, 1.0)], RowKind::Eq, 1.0),
            ],
        };
        let sol = RevisedSimplex::default().solve(&lp).unwrap();
        assert_eq!(sol.values[0], 0.0);
        assert!((sol.objective - 1.0).abs() < 1e-9);
    }

    #[test]
    fn iteration_limit_reported() {
        let lp = LinearProgram {
            num_vars: 2,
            objective: vec![-1.0, -1.0],
            upper: vec![Some(1.0), Some(1.0)],
            var_names: vec![],
            rows: vec![],
        };
        let solver = RevisedSimplex { max_iterations: Some(1), ..Default::default() };
        assert!(matches!(solver.solve(&lp), Err(RapError::IterationLimit(_))));
    }
}
