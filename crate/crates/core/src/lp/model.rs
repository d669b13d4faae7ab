use std::collections::HashMap;
use std::fmt;

use crate::bits::Mask;
use crate::error::{Error, Result};
use crate::partition::Partition;
use crate::ring::Field;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sense {
    Minimize,
    Maximize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Relation::Le => "<=",
            Relation::Ge => ">=",
            Relation::Eq => "=",
        })
    }
}

/// What a column stands for. Terminal sets are masks over terminal positions,
/// vertex sets masks over vertex indices.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ColumnId {
    Hyperedge(Mask),
    DirectedHyperedge { terminals: Mask, head: usize },
    Arc { tail: usize, head: usize },
    Variable(usize),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RowId {
    Partition(Partition),
    RankEquality,
    Subtour(Mask),
    ValidTerminalSet(Mask),
    ValidVertexSet(Mask),
    Constraint(usize),
}

impl fmt::Display for ColumnId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ColumnId::Hyperedge(k) => write!(f, "x_K{k:x}"),
            ColumnId::DirectedHyperedge { terminals, head } => write!(f, "x_K{terminals:x}_h{head}"),
            ColumnId::Arc { tail, head } => write!(f, "x_a{tail}_{head}"),
            ColumnId::Variable(i) => write!(f, "x{i}"),
        }
    }
}

impl fmt::Display for RowId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RowId::Partition(p) => write!(f, "part{}", p.to_string().replace(['{', '}'], "").replace(['|', ','], "_")),
            RowId::RankEquality => write!(f, "rank"),
            RowId::Subtour(s) => write!(f, "sub{s:x}"),
            RowId::ValidTerminalSet(u) => write!(f, "cut_r{u:x}"),
            RowId::ValidVertexSet(u) => write!(f, "cut_v{u:x}"),
            RowId::Constraint(i) => write!(f, "c{i}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Row<F> {
    pub id: RowId,
    /// Sparse `(column, coefficient)` pairs with nonzero coefficients.
    pub coeffs: Vec<(usize, F)>,
    pub relation: Relation,
    pub rhs: F,
}

/// An explicit LP over nonnegative variables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearProgram<F> {
    pub sense: Sense,
    pub columns: Vec<ColumnId>,
    pub objective: Vec<F>,
    pub rows: Vec<Row<F>>,
}

impl<F: Field> LinearProgram<F> {
    pub fn new(sense: Sense) -> LinearProgram<F> {
        LinearProgram { sense, columns: Vec::new(), objective: Vec::new(), rows: Vec::new() }
    }

    pub fn add_column(&mut self, id: ColumnId, cost: F) -> usize {
        self.columns.push(id);
        self.objective.push(cost);
        self.columns.len() - 1
    }

    pub fn add_row(&mut self, id: RowId, coeffs: Vec<(usize, F)>, relation: Relation, rhs: F) {
        let coeffs = coeffs.into_iter().filter(|(_, a)| !a.is_zero_value()).collect();
        self.rows.push(Row { id, coeffs, relation, rhs });
    }

    pub fn num_columns(&self) -> usize {
        self.columns.len()
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn column_index(&self) -> HashMap<ColumnId, usize> {
        self.columns.iter().cloned().enumerate().map(|(i, c)| (c, i)).collect()
    }

    pub fn row_activity(&self, row: &Row<F>, x: &[F]) -> F {
        row.coeffs.iter().fold(F::zero_value(), |acc, (j, a)| acc.plus(&a.times(&x[*j])))
    }

    /// `lhs - rhs` for every row.
    pub fn row_slacks(&self, x: &[F]) -> Vec<F> {
        self.rows.iter().map(|r| self.row_activity(r, x).minus(&r.rhs)).collect()
    }

    pub fn objective_value(&self, x: &[F]) -> F {
        self.objective.iter().zip(x).fold(F::zero_value(), |acc, (c, v)| acc.plus(&c.times(v)))
    }

    /// First violated constraint (including nonnegativity), if any.
    pub fn first_violation(&self, x: &[F]) -> Option<String> {
        if x.len() != self.num_columns() {
            return Some(format!("expected {} values, got {}", self.num_columns(), x.len()));
        }
        if let Some(j) = x.iter().position(|v| v.negative()) {
            return Some(format!("column {} is negative", self.columns[j]));
        }
        for row in &self.rows {
            let lhs = self.row_activity(row, x);
            let ok = match row.relation {
                Relation::Le => lhs <= row.rhs,
                Relation::Ge => lhs >= row.rhs,
                Relation::Eq => lhs == row.rhs,
            };
            if !ok {
                return Some(format!("row {} has activity {} {} {} violated", row.id, lhs, row.relation, row.rhs));
            }
        }
        None
    }

    pub fn is_feasible(&self, x: &[F]) -> bool {
        self.first_violation(x).is_none()
    }

    /// Checks that `(x, y)` is a primal-dual optimal pair by substitution.
    pub fn verify_optimal_pair(&self, x: &[F], y: &[F]) -> Result<F> {
        let fail = |m: String| Err(Error::VerificationFailed(m));
        if let Some(v) = self.first_violation(x) {
            return fail(format!("primal: {v}"));
        }
        if y.len() != self.num_rows() {
            return fail("dual has the wrong length".into());
        }
        // Lagrangian sign conventions for min (flipped for max).
        let flip = self.sense == Sense::Maximize;
        for (row, yi) in self.rows.iter().zip(y) {
            let ok = match (row.relation, flip) {
                (Relation::Eq, _) => true,
                (Relation::Ge, false) | (Relation::Le, true) => !yi.negative(),
                (Relation::Le, false) | (Relation::Ge, true) => !yi.positive(),
            };
            if !ok {
                return fail(format!("dual of row {} has the wrong sign ({yi})", row.id));
            }
        }
        let mut reduced = self.objective.clone();
        for (row, yi) in self.rows.iter().zip(y) {
            if yi.is_zero_value() {
                continue;
            }
            for (j, a) in &row.coeffs {
                reduced[*j] = reduced[*j].minus(&a.times(yi));
            }
        }
        for (j, d) in reduced.iter().enumerate() {
            if (!flip && d.negative()) || (flip && d.positive()) {
                return fail(format!("reduced cost of column {} is {d}", self.columns[j]));
            }
        }
        let primal = self.objective_value(x);
        let dual = self.rows.iter().zip(y).fold(F::zero_value(), |acc, (r, yi)| acc.plus(&r.rhs.times(yi)));
        if primal != dual {
            return fail(format!("primal objective {primal} differs from dual objective {dual}"));
        }
        Ok(primal)
    }
}

/// Optimal basic solution and its dual.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LpSolution<F> {
    pub primal: Vec<F>,
    pub dual: Vec<F>,
    pub objective: F,
    pub pivots: usize,
}

impl<F: Field> LpSolution<F> {
    pub fn support(&self) -> Vec<usize> {
        (0..self.primal.len()).filter(|&j| !self.primal[j].is_zero_value()).collect()
    }
}
