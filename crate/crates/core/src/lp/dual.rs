//! Set-family duals: extraction from the directed hypergraph LP, uncrossing to
//! a laminar support, and lifting to a bidirected cut dual on quasibipartite
//! graphs.

use std::collections::BTreeMap;


use crate::bits::{self, Mask};
use crate::error::{Error, Result};
use crate::hyper::FullComponent;
use crate::instance::Instance;
use crate::lp::model::{ColumnId, LinearProgram, LpSolution, Relation, RowId, Sense};
use crate::lp::simplex::solve_exact;
use crate::ring::{Field, Rational};

/// Nonnegative values on vertex (or terminal) sets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SetFamilyDual {
    pub values: BTreeMap<Mask, Rational>,
    pub laminar: bool,
}

impl SetFamilyDual {
    pub fn new(values: BTreeMap<Mask, Rational>) -> SetFamilyDual {
        let mut dual = SetFamilyDual { values, laminar: false };
        dual.values.retain(|_, v| !Field::is_zero_value(v));
        dual.laminar = dual.is_laminar();
        dual
    }

    pub fn value(&self) -> Rational {
        self.values.values().sum()
    }

    pub fn support(&self) -> Vec<Mask> {
        self.values.keys().copied().collect()
    }

    pub fn is_laminar(&self) -> bool {
        let sets = self.support();
        sets.iter().enumerate().all(|(i, &a)| sets[i + 1..].iter().all(|&b| !crosses(a, b)))
    }
}

fn crosses(a: Mask, b: Mask) -> bool {
    a & b != 0 && a & !b != 0 && b & !a != 0
}

/// Row duals of a solved directed hypergraph LP, keyed by terminal set.
pub fn directed_dual(lp: &LinearProgram<Rational>, solution: &LpSolution<Rational>) -> SetFamilyDual {
    let values = lp
        .rows
        .iter()
        .zip(&solution.dual)
        .filter_map(|(row, y)| match row.id {
            RowId::ValidTerminalSet(u) => Some((u, y.clone())),
            _ => None,
        })
        .collect();
    SetFamilyDual::new(values)
}

/// Checks feasibility for the dual of the directed hypergraph LP and returns its value.
pub fn check_directed_dual(z: &SetFamilyDual, components: &[FullComponent], k: usize, root_position: usize) -> Result<Rational> {
    let fail = |m: String| Err(Error::VerificationFailed(m));
    let free = bits::full(k) & !bits::bit(root_position);
    for (&u, v) in &z.values {
        if u == 0 || u & !free != 0 {
            return fail(format!("set {u:#b} is not a valid terminal set"));
        }
        if v.negative() {
            return fail(format!("negative value on {u:#b}"));
        }
    }
    for fc in components {
        let cost = fc.cost.to_rational().ok_or(Error::IrrationalCoefficient)?;
        for head in bits::elements(fc.terminals) {
            let load: Rational = z
                .values
                .iter()
                .filter(|(&u, _)| u & fc.terminals != 0 && !bits::contains(u, head))
                .map(|(_, v)| v)
                .sum();
            if load > cost {
                return fail(format!("hyperedge {:#b} with head {head} overloaded: {load} > {cost}", fc.terminals));
            }
        }
    }
    Ok(z.value())
}

#[derive(Clone, Debug)]
pub struct LaminarizeReport {
    pub dual: SetFamilyDual,
    pub uncross_steps: usize,
}

/// Uncrosses the support: a crossing pair `U, U'` loses `δ = min(z_U, z_U')`
/// each, and `U ∩ U'`, `U ∪ U'` gain `δ`. Feasibility and value are re-checked.
pub fn laminarize_dual(
    z: &SetFamilyDual,
    components: &[FullComponent],
    k: usize,
    root_position: usize,
) -> Result<LaminarizeReport> {
    let before = check_directed_dual(z, components, k, root_position)?;
    let mut values = z.values.clone();
    let mut steps = 0usize;
    let cap = 1_000_000;
    loop {
        let sets: Vec<Mask> = values.keys().copied().collect();
        let pair = sets
            .iter()
            .enumerate()
            .find_map(|(i, &a)| sets[i + 1..].iter().find(|&&b| crosses(a, b)).map(|&b| (a, b)));
        let Some((a, b)) = pair else { break };
        steps += 1;
        if steps > cap {
            return Err(Error::CapExceeded { what: "uncrossing steps", actual: steps, limit: cap });
        }
        let delta = values[&a].clone().min(values[&b].clone());
        for s in [a, b] {
            let v = &values[&s] - &delta;
            if Field::is_zero_value(&v) {
                values.remove(&s);
            } else {
                values.insert(s, v);
            }
        }
        *values.entry(a & b).or_default() += &delta;
        *values.entry(a | b).or_default() += &delta;
    }
    let dual = SetFamilyDual::new(values);
    let after = check_directed_dual(&dual, components, k, root_position)?;
    if after != before {
        return Err(Error::Invariant(format!("uncrossing changed the dual value from {before} to {after}")));
    }
    if !dual.laminar {
        return Err(Error::Invariant("uncrossing left a crossing pair".into()));
    }
    Ok(LaminarizeReport { dual, uncross_steps: steps })
}

/// Checks a bidirected cut dual (values on vertex sets) on the given graph
/// and returns its value.
pub fn check_bidirected_dual(inst: &Instance, z: &BTreeMap<Mask, Rational>) -> Result<Rational> {
    let fail = |m: String| Err(Error::VerificationFailed(m));
    let terminals = bits::from_elements(inst.terminals().iter().copied());
    for (&w, v) in z {
        if w & terminals == 0 || bits::contains(w, inst.root()) || w & !bits::full(inst.num_vertices()) != 0 {
            return fail(format!("vertex set {w:#b} is not valid"));
        }
        if v.negative() {
            return fail(format!("negative value on {w:#b}"));
        }
    }
    for e in inst.edges() {
        for (tail, head) in [(e.u, e.v), (e.v, e.u)] {
            let load: Rational = z
                .iter()
                .filter(|(&w, _)| bits::contains(w, tail) && !bits::contains(w, head))
                .map(|(_, v)| v)
                .sum();
            if load > e.cost {
                return fail(format!("arc ({tail}, {head}) overloaded: {load} > {}", e.cost));
            }
        }
    }
    Ok(z.values().sum())
}

#[derive(Clone, Debug)]
pub struct LiftReport {
    /// Values on vertex sets of the quasibipartite graph.
    pub dual: BTreeMap<Mask, Rational>,
    pub value: Rational,
    pub lifted_vertices: usize,
}

/// Lifts a laminar directed-hypergraph dual (terminal sets) to a bidirected
/// cut dual on the quasibipartite graph `inst`, one Steiner vertex at a time:
/// at `v`, an amount `x_W` moves from `W` to `W + v` for the sets `W` meeting
/// the neighbourhood of `v`, subject to
/// `x_W <= z_W`, `Σ_{W ∋ u} (z_W - x_W) <= c_uv` and `Σ_{W ∌ u} x_W <= c_uv`.
pub fn lift_dual(inst: &Instance, z: &SetFamilyDual) -> Result<LiftReport> {
    if !inst.classify().is_quasibipartite() {
        return Err(Error::WrongClass("quasibipartite"));
    }
    if !z.is_laminar() {
        return Err(Error::Invalid("lifting needs a laminar dual".into()));
    }
    let mut current: BTreeMap<Mask, Rational> = z
        .values
        .iter()
        .map(|(&u, v)| (bits::from_elements(inst.terminal_mask_vertices(u)), v.clone()))
        .collect();
    let mut lifted = 0;
    for v in inst.steiner_vertices() {
        let gamma = inst.neighbors(v);
        let gamma_mask = bits::from_elements(gamma.iter().copied());
        let family: Vec<(Mask, Rational)> =
            current.iter().filter(|(&w, _)| w & gamma_mask != 0).map(|(&w, val)| (w, val.clone())).collect();
        if family.is_empty() {
            continue;
        }
        let mut lp = LinearProgram::<Rational>::new(Sense::Minimize);
        for (i, _) in family.iter().enumerate() {
            lp.add_column(ColumnId::Variable(i), Rational::zero_value());
        }
        let mut row = 0;
        let mut next_row = || {
            row += 1;
            RowId::Constraint(row - 1)
        };
        for (i, (_, zw)) in family.iter().enumerate() {
            lp.add_row(next_row(), vec![(i, Rational::one_value())], Relation::Le, zw.clone());
        }
        for &u in &gamma {
            let c = inst.cost_between(u, v).expect("neighbour edge").clone();
            let containing: Vec<usize> = (0..family.len()).filter(|&i| bits::contains(family[i].0, u)).collect();
            let held: Rational = containing.iter().map(|&i| &family[i].1).sum();
            lp.add_row(
                next_row(),
                containing.iter().map(|&i| (i, Rational::one_value())).collect(),
                Relation::Ge,
                held - &c,
            );
            let avoiding: Vec<(usize, Rational)> = (0..family.len())
                .filter(|&i| !bits::contains(family[i].0, u))
                .map(|i| (i, Rational::one_value()))
                .collect();
            lp.add_row(next_row(), avoiding, Relation::Le, c);
        }
        let solution = solve_exact(&lp).map_err(|e| match e {
            Error::Infeasible => Error::Invariant(format!("lifting system infeasible at Steiner vertex {v}")),
            other => other,
        })?;
        for ((w, _), x) in family.iter().zip(&solution.primal) {
            if Field::is_zero_value(x) {
                continue;
            }
            let rest = &current[w] - x;
            if Field::is_zero_value(&rest) {
                current.remove(w);
            } else {
                current.insert(*w, rest);
            }
            *current.entry(w | bits::bit(v)).or_default() += x;
        }
        lifted += 1;
    }
    let value = check_bidirected_dual(inst, &current)?;
    if value != z.value() {
        return Err(Error::Invariant(format!("lifting changed the dual value from {} to {value}", z.value())));
    }
    Ok(LiftReport { dual: current, value, lifted_vertices: lifted })
}
