//! Dense two-phase primal simplex with Bland's rule over an exact ordered field.

use crate::error::{Error, Result};
use crate::lp::model::{ColumnId, LinearProgram, LpSolution, Relation, RowId, Sense};
use crate::ring::Field;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Route {
    /// Pick whichever tableau is smaller.
    #[default]
    Auto,
    /// Solve the LP as given.
    Direct,
    /// Solve the dual LP (needs a minimization with nonnegative costs) and
    /// read the primal solution off its final basis.
    Dual,
}

#[derive(Clone, Copy, Debug)]
pub struct SolveOptions {
    pub route: Route,
    pub max_pivots: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions { route: Route::Auto, max_pivots: 2_000_000 }
    }
}

pub fn solve_exact<F: Field>(lp: &LinearProgram<F>) -> Result<LpSolution<F>> {
    solve_with(lp, SolveOptions::default())
}

pub fn solve_with<F: Field>(lp: &LinearProgram<F>, options: SolveOptions) -> Result<LpSolution<F>> {
    let dual_ok = lp.sense == Sense::Minimize && lp.objective.iter().all(|c| !c.negative());
    let route = match options.route {
        Route::Auto if dual_ok => {
            let m = lp.num_rows();
            let n = lp.num_columns();
            let extra = lp.rows.iter().filter(|r| r.relation != Relation::Le).count();
            let eqs = lp.rows.iter().filter(|r| r.relation == Relation::Eq).count();
            let direct = m * (n + m + extra);
            let dual = n * (m + eqs + n);
            if dual < direct {
                Route::Dual
            } else {
                Route::Direct
            }
        }
        Route::Auto => Route::Direct,
        Route::Dual if !dual_ok => {
            return Err(Error::Invalid("dual route needs a minimization with nonnegative costs".into()))
        }
        r => r,
    };
    let solution = match route {
        Route::Dual => solve_via_dual(lp, options.max_pivots)?,
        _ => Tableau::solve(lp, options.max_pivots)?,
    };
    let verified = lp.verify_optimal_pair(&solution.primal, &solution.dual)?;
    if verified != solution.objective {
        return Err(Error::VerificationFailed("reported objective differs from substitution".into()));
    }
    Ok(solution)
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Kind {
    Structural,
    Slack,
    Artificial,
}

struct Tableau<F> {
    /// m rows of width `width + 1`; the last entry is the right-hand side.
    rows: Vec<Vec<F>>,
    objective: Vec<F>,
    basis: Vec<usize>,
    kinds: Vec<Kind>,
    width: usize,
    pivots: usize,
    max_pivots: usize,
}

impl<F: Field> Tableau<F> {
    fn solve(lp: &LinearProgram<F>, max_pivots: usize) -> Result<LpSolution<F>> {
        let n = lp.num_columns();
        let m = lp.num_rows();
        let mut kinds = vec![Kind::Structural; n];
        let mut sign = vec![true; m];
        let mut relations = Vec::with_capacity(m);
        for (i, row) in lp.rows.iter().enumerate() {
            let flip = row.rhs.negative();
            sign[i] = !flip;
            relations.push(match (row.relation, flip) {
                (Relation::Le, false) | (Relation::Ge, true) => Relation::Le,
                (Relation::Ge, false) | (Relation::Le, true) => Relation::Ge,
                (Relation::Eq, _) => Relation::Eq,
            });
        }
        // column layout: structural, then per row its slack/surplus, then per row its artificial
        let mut slack_of = vec![usize::MAX; m];
        for i in 0..m {
            if relations[i] != Relation::Eq {
                slack_of[i] = kinds.len();
                kinds.push(Kind::Slack);
            }
        }
        let mut artificial_of = vec![usize::MAX; m];
        for i in 0..m {
            if relations[i] != Relation::Le {
                artificial_of[i] = kinds.len();
                kinds.push(Kind::Artificial);
            }
        }
        let width = kinds.len();
        let mut rows = vec![vec![F::zero_value(); width + 1]; m];
        let mut basis = vec![0; m];
        for (i, row) in lp.rows.iter().enumerate() {
            let t = &mut rows[i];
            for (j, a) in &row.coeffs {
                t[*j] = if sign[i] { a.clone() } else { a.negated() };
            }
            t[width] = if sign[i] { row.rhs.clone() } else { row.rhs.negated() };
            match relations[i] {
                Relation::Le => {
                    t[slack_of[i]] = F::one_value();
                    basis[i] = slack_of[i];
                }
                Relation::Ge => {
                    t[slack_of[i]] = F::one_value().negated();
                    t[artificial_of[i]] = F::one_value();
                    basis[i] = artificial_of[i];
                }
                Relation::Eq => {
                    t[artificial_of[i]] = F::one_value();
                    basis[i] = artificial_of[i];
                }
            }
        }
        let mut tab = Tableau { rows, objective: Vec::new(), basis, kinds, width, pivots: 0, max_pivots };

        if tab.kinds.contains(&Kind::Artificial) {
            let costs: Vec<F> = tab
                .kinds
                .iter()
                .map(|k| if *k == Kind::Artificial { F::one_value() } else { F::zero_value() })
                .collect();
            tab.price(&costs);
            tab.optimize(true)?;
            if tab.objective[width].negated().positive() {
                return Err(Error::Infeasible);
            }
            tab.expel_artificials();
        }

        let mut costs = vec![F::zero_value(); width];
        for j in 0..n {
            costs[j] = match lp.sense {
                Sense::Minimize => lp.objective[j].clone(),
                Sense::Maximize => lp.objective[j].negated(),
            };
        }
        tab.price(&costs);
        tab.optimize(false)?;

        let mut primal = vec![F::zero_value(); n];
        for (i, &b) in tab.basis.iter().enumerate() {
            if b < n {
                primal[b] = tab.rows[i][width].clone();
            }
        }
        // y_i = c_unit - d_unit with c_unit = 0 for the row's initial identity column
        let dual = (0..m)
            .map(|i| {
                let unit = if relations[i] == Relation::Le { slack_of[i] } else { artificial_of[i] };
                let y = tab.objective[unit].negated();
                let y = if sign[i] { y } else { y.negated() };
                if lp.sense == Sense::Maximize {
                    y.negated()
                } else {
                    y
                }
            })
            .collect();
        let objective = lp.objective_value(&primal);
        Ok(LpSolution { primal, dual, objective, pivots: tab.pivots })
    }

    /// Sets the objective row to reduced costs `c_j - c_B B^-1 A_j`; the last
    /// entry holds `-c_B B^-1 b`.
    fn price(&mut self, costs: &[F]) {
        let mut obj: Vec<F> = costs.to_vec();
        obj.push(F::zero_value());
        for (i, &b) in self.basis.iter().enumerate() {
            let cb = &costs[b];
            if cb.is_zero_value() {
                continue;
            }
            for (j, t) in self.rows[i].iter().enumerate() {
                if !t.is_zero_value() {
                    obj[j] = obj[j].minus(&cb.times(t));
                }
            }
        }
        self.objective = obj;
    }

    fn optimize(&mut self, phase_one: bool) -> Result<()> {
        loop {
            let entering = (0..self.width).find(|&j| {
                (phase_one || self.kinds[j] != Kind::Artificial) && self.objective[j].negative()
            });
            let Some(q) = entering else { return Ok(()) };
            let mut leave: Option<(usize, F)> = None;
            for (i, row) in self.rows.iter().enumerate() {
                let a = &row[q];
                if !a.positive() {
                    continue;
                }
                let ratio = row[self.width].over(a);
                let better = match &leave {
                    None => true,
                    Some((l, best)) => ratio < *best || (ratio == *best && self.basis[i] < self.basis[*l]),
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
            let Some((p, _)) = leave else {
                return Err(if phase_one { Error::Infeasible } else { Error::Unbounded });
            };
            self.pivot(p, q)?;
        }
    }

    /// Pivots zero-valued artificial variables out of the basis where possible.
    fn expel_artificials(&mut self) {
        for i in 0..self.rows.len() {
            if self.kinds[self.basis[i]] != Kind::Artificial {
                continue;
            }
            let q = (0..self.width).find(|&j| self.kinds[j] != Kind::Artificial && !self.rows[i][j].is_zero_value());
            if let Some(q) = q {
                self.pivot(i, q).expect("degenerate pivot within budget");
            }
        }
    }

    fn pivot(&mut self, p: usize, q: usize) -> Result<()> {
        self.pivots += 1;
        if self.pivots > self.max_pivots {
            return Err(Error::CapExceeded { what: "simplex pivots", actual: self.pivots, limit: self.max_pivots });
        }
        let inv = F::one_value().over(&self.rows[p][q]);
        let nonzero: Vec<usize> = (0..=self.width).filter(|&j| !self.rows[p][j].is_zero_value()).collect();
        for &j in &nonzero {
            self.rows[p][j] = self.rows[p][j].times(&inv);
        }
        let pivot_row = std::mem::take(&mut self.rows[p]);
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == p || row[q].is_zero_value() {
                continue;
            }
            let f = row[q].clone();
            for &j in &nonzero {
                row[j] = row[j].minus(&f.times(&pivot_row[j]));
            }
        }
        if !self.objective[q].is_zero_value() {
            let f = self.objective[q].clone();
            for &j in &nonzero {
                self.objective[j] = self.objective[j].minus(&f.times(&pivot_row[j]));
            }
        }
        self.rows[p] = pivot_row;
        self.basis[p] = q;
        Ok(())
    }
}

/// Solves `min c.x, Ax (rel) b, x >= 0` with `c >= 0` through its dual
/// `max b.y, A^T y <= c`, whose slack basis is feasible from the start.
fn solve_via_dual<F: Field>(lp: &LinearProgram<F>, max_pivots: usize) -> Result<LpSolution<F>> {
    let n = lp.num_columns();
    let mut dual_lp = LinearProgram::<F>::new(Sense::Maximize);
    // per primal row: list of (dual column, sign)
    let mut pieces: Vec<Vec<(usize, bool)>> = Vec::with_capacity(lp.num_rows());
    for (i, row) in lp.rows.iter().enumerate() {
        let mut cols = Vec::new();
        let plus = row.rhs.clone();
        match row.relation {
            Relation::Ge => cols.push((dual_lp.add_column(ColumnId::Variable(i), plus), true)),
            Relation::Le => cols.push((dual_lp.add_column(ColumnId::Variable(i), plus.negated()), false)),
            Relation::Eq => {
                cols.push((dual_lp.add_column(ColumnId::Variable(i), plus.clone()), true));
                cols.push((dual_lp.add_column(ColumnId::Variable(i), plus.negated()), false));
            }
        }
        pieces.push(cols);
    }
    let mut by_column: Vec<Vec<(usize, F)>> = vec![Vec::new(); n];
    for (i, row) in lp.rows.iter().enumerate() {
        for (j, a) in &row.coeffs {
            for &(col, positive) in &pieces[i] {
                by_column[*j].push((col, if positive { a.clone() } else { a.negated() }));
            }
        }
    }
    for (j, coeffs) in by_column.into_iter().enumerate() {
        dual_lp.add_row(RowId::Constraint(j), coeffs, Relation::Le, lp.objective[j].clone());
    }
    let inner = Tableau::solve(&dual_lp, max_pivots).map_err(|e| match e {
        Error::Unbounded => Error::Infeasible,
        Error::Infeasible => Error::Unbounded,
        other => other,
    })?;
    let primal: Vec<F> = inner.dual.clone();
    let dual: Vec<F> = pieces
        .iter()
        .map(|cols| {
            cols.iter().fold(F::zero_value(), |acc, &(c, positive)| {
                if positive {
                    acc.plus(&inner.primal[c])
                } else {
                    acc.minus(&inner.primal[c])
                }
            })
        })
        .collect();
    let objective = lp.objective_value(&primal);
    Ok(LpSolution { primal, dual, objective, pivots: inner.pivots })
}
