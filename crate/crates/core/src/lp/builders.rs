//! Builders for the partition, bounded partition, subtour, directed hypergraph
//! and bidirected cut relaxations.

use crate::bits::{self, Mask};
use crate::error::{Error, Result};
use crate::hyper::FullComponent;
use crate::instance::Instance;
use crate::lp::model::{ColumnId, LinearProgram, Relation, RowId, Sense};
use crate::partition::{enumerate_partitions, set_rank};
use crate::ring::Field;

pub const DEFAULT_BIDIRECTED_CAP: usize = 14;

fn cost_of<F: Field>(fc: &FullComponent) -> Result<F> {
    F::from_surd(&fc.cost).ok_or(Error::IrrationalCoefficient)
}

fn hyperedge_columns<F: Field>(lp: &mut LinearProgram<F>, components: &[FullComponent]) -> Result<()> {
    for fc in components {
        lp.add_column(ColumnId::Hyperedge(fc.terminals), cost_of(fc)?);
    }
    Ok(())
}

/// `min Σ C_K x_K` s.t. `Σ_K rc_K^π x_K >= r(π) - 1` for every partition of
/// rank at least two, `x >= 0`.
pub fn build_partition_lp<F: Field>(components: &[FullComponent], k: usize, cap: usize) -> Result<LinearProgram<F>> {
    let partitions = enumerate_partitions(k, cap)?;
    let mut lp = LinearProgram::new(Sense::Minimize);
    hyperedge_columns(&mut lp, components)?;
    for p in partitions {
        if p.rank() < 2 {
            continue;
        }
        let coeffs = components
            .iter()
            .enumerate()
            .map(|(j, fc)| (j, F::from_i64(p.rank_contribution(fc.terminals) as i64)))
            .collect();
        let rhs = F::from_i64(p.rank() as i64 - 1);
        lp.add_row(RowId::Partition(p), coeffs, Relation::Ge, rhs);
    }
    Ok(lp)
}

/// The partition LP plus `Σ_K (|K| - 1) x_K = |R| - 1`.
pub fn build_bounded_partition_lp<F: Field>(
    components: &[FullComponent],
    k: usize,
    cap: usize,
) -> Result<LinearProgram<F>> {
    let mut lp = build_partition_lp(components, k, cap)?;
    lp.add_row(RowId::RankEquality, rank_coefficients(components, bits::full(k)), Relation::Eq, F::from_i64(k as i64 - 1));
    Ok(lp)
}

fn rank_coefficients<F: Field>(components: &[FullComponent], within: Mask) -> Vec<(usize, F)> {
    components
        .iter()
        .enumerate()
        .map(|(j, fc)| (j, F::from_i64(set_rank(fc.terminals & within) as i64)))
        .collect()
}

/// `Σ x_K ρ(K) = ρ(R)` and `Σ x_K ρ(K ∩ S) <= ρ(S)` for proper subsets `S`
/// with at least two terminals.
pub fn build_subtour_lp<F: Field>(components: &[FullComponent], k: usize) -> Result<LinearProgram<F>> {
    if k > 20 {
        return Err(Error::CapExceeded { what: "|R|", actual: k, limit: 20 });
    }
    let mut lp = LinearProgram::new(Sense::Minimize);
    hyperedge_columns(&mut lp, components)?;
    let all = bits::full(k);
    lp.add_row(RowId::RankEquality, rank_coefficients(components, all), Relation::Eq, F::from_i64(set_rank(all) as i64));
    for s in bits::colex(k) {
        if s == all || bits::count(s) < 2 {
            continue;
        }
        lp.add_row(RowId::Subtour(s), rank_coefficients(components, s), Relation::Le, F::from_i64(set_rank(s) as i64));
    }
    Ok(lp)
}

/// Columns `x_{K^i}` for every component and head `i ∈ K`; one covering row per
/// nonempty terminal set avoiding the root.
pub fn build_directed_hyper_lp<F: Field>(
    components: &[FullComponent],
    k: usize,
    root_position: usize,
) -> Result<LinearProgram<F>> {
    if k > 20 {
        return Err(Error::CapExceeded { what: "|R|", actual: k, limit: 20 });
    }
    let mut lp = LinearProgram::new(Sense::Minimize);
    let mut heads = Vec::new();
    for fc in components {
        let c: F = cost_of(fc)?;
        for i in bits::elements(fc.terminals) {
            lp.add_column(ColumnId::DirectedHyperedge { terminals: fc.terminals, head: i }, c.clone());
            heads.push((fc.terminals, i));
        }
    }
    let free = bits::full(k) & !bits::bit(root_position);
    for u in bits::colex(k) {
        if u == 0 || u & !free != 0 {
            continue;
        }
        let coeffs = heads
            .iter()
            .enumerate()
            .filter(|(_, (kk, i))| kk & u != 0 && !bits::contains(u, *i))
            .map(|(j, _)| (j, F::one_value()))
            .collect();
        lp.add_row(RowId::ValidTerminalSet(u), coeffs, Relation::Ge, F::one_value());
    }
    Ok(lp)
}

/// Two opposite arcs per edge; one row per vertex set that contains a
/// terminal and avoids the root, requiring an outgoing arc.
pub fn build_bidirected_lp<F: Field>(inst: &Instance, cap: usize) -> Result<LinearProgram<F>> {
    let n = inst.num_vertices();
    if n > cap {
        return Err(Error::CapExceeded { what: "|V|", actual: n, limit: cap });
    }
    let mut lp = LinearProgram::new(Sense::Minimize);
    let mut arcs = Vec::new();
    for e in inst.edges() {
        for (tail, head) in [(e.u, e.v), (e.v, e.u)] {
            lp.add_column(ColumnId::Arc { tail, head }, F::from_rational(&e.cost));
            arcs.push((tail, head));
        }
    }
    let terminal_mask = bits::from_elements(inst.terminals().iter().copied());
    let root = inst.root();
    for u in bits::colex(n) {
        if u & terminal_mask == 0 || bits::contains(u, root) {
            continue;
        }
        let coeffs = arcs
            .iter()
            .enumerate()
            .filter(|(_, (t, h))| bits::contains(u, *t) && !bits::contains(u, *h))
            .map(|(j, _)| (j, F::one_value()))
            .collect();
        lp.add_row(RowId::ValidVertexSet(u), coeffs, Relation::Ge, F::one_value());
    }
    Ok(lp)
}
