//! Explicit LP models of the relaxations, an exact simplex solver, and the
//! structural tools built on top of optimal solutions.

pub mod builders;
pub mod dual;
pub mod dump;
pub mod model;
pub mod simplex;
pub mod structure;
pub mod suite;

pub use model::{ColumnId, LinearProgram, LpSolution, Relation, Row, RowId, Sense};
pub use simplex::{solve_exact, solve_with, Route, SolveOptions};
pub use suite::{Caps, LpKind, Prepared, Solved};
