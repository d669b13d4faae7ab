//! Exact hypergraphic and bidirected-cut LP relaxations for the Steiner tree
//! problem, partition uncrossing, dual lifting, and LP-certified heuristics.
//!
//! All arithmetic is exact: costs are rationals, and reduced cost functions
//! live in a real quadratic field (see [`ring::Surd`]).

pub mod algos;
pub mod bits;
pub mod error;
pub mod hyper;
pub mod instance;
pub mod lp;
pub mod oracle;
pub mod partition;
pub mod ring;
pub mod verify;

pub use error::{Error, Result};
pub use instance::{mtst, reduce_terminal_costs, CostFunction, Instance, InstanceClass, Tree};
pub use ring::{Rational, Surd};
