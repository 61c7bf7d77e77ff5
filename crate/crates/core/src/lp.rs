//! Dense two-phase tableau simplex with Bland's anti-cycling rule.
//!
//! Programs with many more rows than variables are solved through their dual.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LpError {
    #[error("linear program is infeasible (phase one residual {residual})")]
    Infeasible { residual: f64 },
    #[error("linear program is unbounded")]
    Unbounded,
    #[error("simplex exceeded {limit} pivots")]
    IterationLimit { limit: usize },
    #[error("malformed linear program: {0}")]
    Malformed(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Minimize,
    Maximize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    /// Sparse row as `(variable, coefficient)` pairs; repeated variables add up.
    pub coeffs: Vec<(usize, f64)>,
    pub relation: Relation,
    pub rhs: f64,
}

/// `optimize c.x` subject to linear rows. Variables are nonnegative unless marked free.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearProgram {
    pub sense: Sense,
    pub objective: Vec<f64>,
    pub free: Vec<bool>,
    pub constraints: Vec<Constraint>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub value: f64,
    pub x: Vec<f64>,
    pub pivots: usize,
}

const PIVOT_EPS: f64 = 1e-9;
const COST_EPS: f64 = 1e-9;
const DEGENERATE_RUN: usize = 50;

impl LinearProgram {
    pub fn new(num_vars: usize, sense: Sense) -> Self {
        LinearProgram {
            sense,
            objective: vec![0.0; num_vars],
            free: vec![false; num_vars],
            constraints: Vec::new(),
        }
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn set_objective(&mut self, var: usize, coeff: f64) {
        self.objective[var] = coeff;
    }

    pub fn set_free(&mut self, var: usize) {
        self.free[var] = true;
    }

    pub fn add_constraint(&mut self, coeffs: Vec<(usize, f64)>, relation: Relation, rhs: f64) {
        self.constraints.push(Constraint { coeffs, relation, rhs });
    }

    pub fn solve(&self) -> Result<LpSolution, LpError> {
        let n = self.num_vars();
        if self.free.len() != n {
            return Err(LpError::Malformed("free flags do not match variable count".into()));
        }
        // Many rows over few variables: the dual has a much smaller tableau.
        let rows: usize = self
            .constraints
            .iter()
            .map(|c| if c.relation == Relation::Eq { 2 } else { 1 })
            .sum::<usize>()
            + self.free.iter().filter(|f| !**f).count();
        if n > 0 && rows > 2 * n {
            if let Ok(sol) = self.solve_by_dual() {
                return Ok(sol);
            }
        }
        self.solve_tableau().map(|(sol, _)| sol)
    }

    /// Largest violation of the constraints (and sign restrictions) at `x`, relative to the row scale.
    pub fn max_violation(&self, x: &[f64]) -> f64 {
        let mut worst = 0.0f64;
        for c in &self.constraints {
            let lhs: f64 = c.coeffs.iter().map(|&(v, a)| a * x[v]).sum();
            let scale = c.coeffs.iter().map(|&(v, a)| (a * x[v]).abs()).fold(c.rhs.abs(), f64::max).max(1.0);
            let gap = match c.relation {
                Relation::Le => lhs - c.rhs,
                Relation::Ge => c.rhs - lhs,
                Relation::Eq => (lhs - c.rhs).abs(),
            };
            worst = worst.max(gap / scale);
        }
        for (v, &f) in self.free.iter().enumerate() {
            if !f {
                worst = worst.max(-x[v]);
            }
        }
        worst
    }

    /// Solves `min b.y, A'^T y = -c, y >= 0` for the rows `A' x <= b` of the
    /// minimization form and reads `x` off the simplex multipliers.
    fn solve_by_dual(&self) -> Result<LpSolution, LpError> {
        let n = self.num_vars();
        let flip = if self.sense == Sense::Maximize { -1.0 } else { 1.0 };
        let mut rows: Vec<(Vec<(usize, f64)>, f64)> = Vec::new();
        for c in &self.constraints {
            let neg: Vec<(usize, f64)> = c.coeffs.iter().map(|&(v, a)| (v, -a)).collect();
            match c.relation {
                Relation::Le => rows.push((c.coeffs.clone(), c.rhs)),
                Relation::Ge => rows.push((neg, -c.rhs)),
                Relation::Eq => {
                    rows.push((c.coeffs.clone(), c.rhs));
                    rows.push((neg, -c.rhs));
                }
            }
        }
        for (v, &f) in self.free.iter().enumerate() {
            if !f {
                rows.push((vec![(v, -1.0)], 0.0));
            }
        }
        let mut dual = LinearProgram::new(rows.len(), Sense::Minimize);
        let mut columns: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
        for (k, (coeffs, b)) in rows.iter().enumerate() {
            dual.set_objective(k, *b);
            for &(v, a) in coeffs {
                if v >= n {
                    return Err(LpError::Malformed(format!("variable {v} out of range")));
                }
                columns[v].push((k, a));
            }
        }
        for (v, col) in columns.into_iter().enumerate() {
            dual.add_constraint(col, Relation::Eq, -flip * self.objective[v]);
        }
        let (sol, x) = dual.solve_tableau()?;
        if self.max_violation(&x) > 1e-7 {
            return Err(LpError::Malformed("dual route lost primal feasibility".into()));
        }
        let value = self.objective.iter().zip(&x).map(|(c, x)| c * x).sum();
        Ok(LpSolution { value, x, pivots: sol.pivots })
    }

    /// Two-phase tableau simplex. Also returns the simplex multipliers of the rows.
    fn solve_tableau(&self) -> Result<(LpSolution, Vec<f64>), LpError> {
        let n = self.num_vars();
        // Column layout: structural (free vars split into +/-), slack/surplus, artificial.
        let mut col_of = Vec::with_capacity(n);
        let mut n_struct = 0;
        for &f in &self.free {
            col_of.push(n_struct);
            n_struct += if f { 2 } else { 1 };
        }
        let m = self.constraints.len();
        let n_slack = self
            .constraints
            .iter()
            .filter(|c| c.relation != Relation::Eq)
            .count();
        let n_art = m;
        let width = n_struct + n_slack + n_art + 1;
        let rhs_col = width - 1;
        let art0 = n_struct + n_slack;

        let mut tab = vec![0.0; m * width];
        let mut basis = vec![0usize; m];
        let mut unit_col = vec![0usize; m];
        let mut row_sign = vec![1.0; m];
        let mut slack = n_struct;
        for (i, c) in self.constraints.iter().enumerate() {
            if !c.rhs.is_finite() {
                return Err(LpError::Malformed(format!("row {i} has a non-finite right-hand side")));
            }
            let sign = if c.rhs < 0.0 { -1.0 } else { 1.0 };
            row_sign[i] = sign;
            let row = &mut tab[i * width..(i + 1) * width];
            for &(v, a) in &c.coeffs {
                if v >= n || !a.is_finite() {
                    return Err(LpError::Malformed(format!("bad coefficient in row {i}")));
                }
                row[col_of[v]] += sign * a;
                if self.free[v] {
                    row[col_of[v] + 1] -= sign * a;
                }
            }
            match c.relation {
                Relation::Le => {
                    row[slack] = sign;
                    slack += 1;
                }
                Relation::Ge => {
                    row[slack] = -sign;
                    slack += 1;
                }
                Relation::Eq => {}
            }
            row[rhs_col] = sign * c.rhs;
            // Rows whose slack is already a unit column start with it in the basis.
            let slack_col = slack.wrapping_sub(1);
            if c.relation != Relation::Eq && row[slack_col] == 1.0 {
                basis[i] = slack_col;
            } else {
                row[art0 + i] = 1.0;
                basis[i] = art0 + i;
            }
            unit_col[i] = basis[i];
        }

        let mut cost = vec![0.0; width];
        let flip = if self.sense == Sense::Maximize { -1.0 } else { 1.0 };
        for (v, &c) in self.objective.iter().enumerate() {
            if !c.is_finite() {
                return Err(LpError::Malformed(format!("objective coefficient {v} is not finite")));
            }
            cost[col_of[v]] = flip * c;
            if self.free[v] {
                cost[col_of[v] + 1] = -flip * c;
            }
        }

        let scale = tab
            .chunks(width)
            .map(|r| r[rhs_col].abs())
            .fold(1.0f64, f64::max);
        let mut t = Tableau { tab, width, m, basis, pivots: 0, limit: 50_000 + 200 * (m + width) };

        // Phase one: minimize the sum of artificials in the basis.
        let mut phase1 = vec![0.0; width];
        for i in 0..m {
            if t.basis[i] >= art0 {
                phase1[t.basis[i]] = 1.0;
            }
        }
        let mut obj1 = t.reduced_row(&phase1);
        let mut obj2 = t.reduced_row(&cost);
        t.optimize(&mut obj1, &mut [&mut obj2], art0 + n_art)?;
        let residual = obj1[rhs_col];
        if residual.abs() > 1e-9 * scale {
            return Err(LpError::Infeasible { residual: residual.abs() });
        }

        // Drive artificials out of the basis, dropping redundant rows.
        let mut i = 0;
        while i < t.m {
            if t.basis[i] >= art0 {
                let row = &t.tab[i * width..(i + 1) * width];
                let pick = (0..art0)
                    .filter(|&j| row[j].abs() > 1e-9)
                    .max_by(|&a, &b| row[a].abs().total_cmp(&row[b].abs()));
                match pick {
                    Some(j) => t.pivot(i, j, &mut [&mut obj1, &mut obj2]),
                    None => {
                        t.remove_row(i);
                        continue;
                    }
                }
            }
            i += 1;
        }

        let mut none: [&mut Vec<f64>; 0] = [];
        t.optimize(&mut obj2, &mut none, art0)?;

        let mut xs = vec![0.0; n_struct];
        for i in 0..t.m {
            let b = t.basis[i];
            if b < n_struct {
                xs[b] = t.tab[i * width + rhs_col];
            }
        }
        let x: Vec<f64> = (0..n)
            .map(|v| {
                let c = col_of[v];
                if self.free[v] {
                    xs[c] - xs[c + 1]
                } else {
                    xs[c]
                }
            })
            .collect();
        let value = self.objective.iter().zip(&x).map(|(c, x)| c * x).sum();
        // The reduced cost of a unit column e_i is its cost minus the multiplier of row i.
        let duals = (0..m)
            .map(|i| row_sign[i] * flip * (cost[unit_col[i]] - obj2[unit_col[i]]))
            .collect();
        Ok((LpSolution { value, x, pivots: t.pivots }, duals))
    }
}

struct Tableau {
    tab: Vec<f64>,
    width: usize,
    m: usize,
    basis: Vec<usize>,
    pivots: usize,
    limit: usize,
}

impl Tableau {
    /// Reduced costs `c - c_B B^-1 A` for the current basis; the last entry is `-c_B b`.
    fn reduced_row(&self, cost: &[f64]) -> Vec<f64> {
        let w = self.width;
        let mut r = cost.to_vec();
        r[w - 1] = 0.0;
        for i in 0..self.m {
            let cb = cost[self.basis[i]];
            if cb != 0.0 {
                let row = &self.tab[i * w..(i + 1) * w];
                for j in 0..w {
                    r[j] -= cb * row[j];
                }
            }
        }
        r
    }

    fn pivot(&mut self, r: usize, c: usize, objs: &mut [&mut Vec<f64>]) {
        let w = self.width;
        let p = self.tab[r * w + c];
        for j in 0..w {
            self.tab[r * w + j] /= p;
        }
        self.tab[r * w + c] = 1.0;
        let (before, rest) = self.tab.split_at_mut(r * w);
        let (prow, after) = rest.split_at_mut(w);
        for row in before.chunks_mut(w).chain(after.chunks_mut(w)) {
            let f = row[c];
            if f != 0.0 {
                for j in 0..w {
                    row[j] -= f * prow[j];
                }
                row[c] = 0.0;
            }
        }
        for obj in objs.iter_mut() {
            let f = obj[c];
            if f != 0.0 {
                for j in 0..w {
                    obj[j] -= f * prow[j];
                }
                obj[c] = 0.0;
            }
        }
        self.basis[r] = c;
        self.pivots += 1;
    }

    fn remove_row(&mut self, r: usize) {
        let w = self.width;
        self.tab.drain(r * w..(r + 1) * w);
        self.basis.remove(r);
        self.m -= 1;
    }

    /// Minimizes `obj` over columns `< ncols`, carrying `extra` rows along.
    ///
    /// Prices by the most negative reduced cost and switches to Bland's rule
    /// after a run of degenerate pivots, until the objective moves again.
    fn optimize(&mut self, obj: &mut Vec<f64>, extra: &mut [&mut Vec<f64>], ncols: usize) -> Result<(), LpError> {
        let w = self.width;
        let mut degenerate_run = 0usize;
        loop {
            let bland = degenerate_run >= DEGENERATE_RUN;
            let entering = if bland {
                (0..ncols).find(|&j| obj[j] < -COST_EPS)
            } else {
                (0..ncols)
                    .filter(|&j| obj[j] < -COST_EPS)
                    .min_by(|&a, &b| obj[a].total_cmp(&obj[b]))
            };
            let Some(c) = entering else {
                return Ok(());
            };
            let mut best: Option<(usize, f64)> = None;
            for i in 0..self.m {
                let a = self.tab[i * w + c];
                if a <= PIVOT_EPS {
                    continue;
                }
                let ratio = self.tab[i * w + w - 1].max(0.0) / a;
                best = match best {
                    None => Some((i, ratio)),
                    Some((bi, br)) => {
                        let slack = 1e-12 * br.abs().max(1.0);
                        let better_tie = if bland {
                            self.basis[i] < self.basis[bi]
                        } else {
                            a > self.tab[bi * w + c]
                        };
                        if ratio < br - slack || (ratio <= br + slack && better_tie) {
                            Some((i, ratio))
                        } else {
                            Some((bi, br))
                        }
                    }
                };
            }
            let Some((r, ratio)) = best else {
                return Err(LpError::Unbounded);
            };
            if self.pivots >= self.limit {
                return Err(LpError::IterationLimit { limit: self.limit });
            }
            if ratio <= 1e-12 {
                degenerate_run += 1;
            } else {
                degenerate_run = 0;
            }
            let mut objs: Vec<&mut Vec<f64>> = Vec::with_capacity(extra.len() + 1);
            objs.push(obj);
            for e in extra.iter_mut() {
                objs.push(e);
            }
            self.pivot(r, c, &mut objs);
        }
    }
}
