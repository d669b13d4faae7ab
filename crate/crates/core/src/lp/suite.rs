//! One entry point for the five relaxations of an instance.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::hyper::{enumerate_full_components, FullComponent, DEFAULT_COMPONENT_CAP};
use crate::instance::{CostFunction, Instance};
use crate::lp::builders::{
    build_bidirected_lp, build_bounded_partition_lp, build_directed_hyper_lp, build_partition_lp, build_subtour_lp,
};
use crate::lp::model::{LinearProgram, LpSolution};
use crate::lp::simplex::solve_exact;
use crate::ring::Rational;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LpKind {
    Partition,
    BoundedPartition,
    Subtour,
    DirectedHyper,
    Bidirected,
}

impl LpKind {
    pub const ALL: [LpKind; 5] =
        [LpKind::Partition, LpKind::BoundedPartition, LpKind::Subtour, LpKind::DirectedHyper, LpKind::Bidirected];

    pub fn name(&self) -> &'static str {
        match self {
            LpKind::Partition => "P",
            LpKind::BoundedPartition => "P2",
            LpKind::Subtour => "S",
            LpKind::DirectedHyper => "D",
            LpKind::Bidirected => "B",
        }
    }
}

impl fmt::Display for LpKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for LpKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<LpKind> {
        LpKind::ALL
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Invalid(format!("unknown relaxation {s:?}; expected one of P, P2, S, D, B")))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Caps {
    pub partitions: usize,
    pub bidirected: usize,
}

impl Default for Caps {
    fn default() -> Caps {
        Caps {
            partitions: crate::partition::DEFAULT_PARTITION_CAP,
            bidirected: crate::lp::builders::DEFAULT_BIDIRECTED_CAP,
        }
    }
}

/// An instance with its metric closure and the full components of the closure.
#[derive(Clone, Debug)]
pub struct Prepared {
    pub graph: Instance,
    pub closure: Instance,
    pub components: Vec<FullComponent>,
}

impl Prepared {
    pub fn new(graph: &Instance) -> Result<Prepared> {
        let closure = graph.metric_closure()?;
        let k = closure.num_terminals();
        let components = if k >= 2 {
            enumerate_full_components(&closure, &CostFunction::original(&closure), k.min(DEFAULT_COMPONENT_CAP))?
        } else {
            Vec::new()
        };
        Ok(Prepared { graph: graph.clone(), closure, components })
    }

    pub fn num_terminals(&self) -> usize {
        self.closure.num_terminals()
    }

    /// Builds the relaxation; the bidirected cut LP uses the graph as given.
    pub fn build(&self, kind: LpKind, caps: &Caps) -> Result<LinearProgram<Rational>> {
        let k = self.num_terminals();
        match kind {
            LpKind::Partition => build_partition_lp(&self.components, k, caps.partitions),
            LpKind::BoundedPartition => build_bounded_partition_lp(&self.components, k, caps.partitions),
            LpKind::Subtour => build_subtour_lp(&self.components, k),
            LpKind::DirectedHyper => build_directed_hyper_lp(&self.components, k, self.closure.root_position()),
            LpKind::Bidirected => build_bidirected_lp(&self.graph, caps.bidirected),
        }
    }

    pub fn solve(&self, kind: LpKind, caps: &Caps) -> Result<Solved> {
        let lp = self.build(kind, caps)?;
        let solution = solve_exact(&lp)?;
        Ok(Solved { kind, lp, solution })
    }
}

#[derive(Clone, Debug)]
pub struct Solved {
    pub kind: LpKind,
    pub lp: LinearProgram<Rational>,
    pub solution: LpSolution<Rational>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::integer;

    #[test]
    fn names_round_trip() {
        for k in LpKind::ALL {
            assert_eq!(k.name().parse::<LpKind>().unwrap(), k);
        }
        assert!("Q".parse::<LpKind>().is_err());
    }

    #[test]
    fn star_all_three() {
        let inst = Instance::new(4, vec![(0, 1, integer(1)), (0, 2, integer(1)), (0, 3, integer(1))], vec![1, 2, 3]).unwrap();
        let prep = Prepared::new(&inst).unwrap();
        for k in LpKind::ALL {
            assert_eq!(prep.solve(k, &Caps::default()).unwrap().solution.objective, integer(3), "{k}");
        }
    }
}
