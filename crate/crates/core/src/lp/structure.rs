//! Structure of optimal partition-LP solutions: tight partitions, their
//! meet/join closure, chains certifying uniqueness, and shrinking.

use std::collections::{BTreeMap, HashSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::bits::{self, Mask};
use crate::error::{Error, Result};
use crate::hyper::FullComponent;
use crate::lp::model::{LinearProgram, RowId};
use crate::lp::simplex::solve_exact;
use crate::partition::{enumerate_partitions, Partition};
use crate::ring::{integer, Field, Rational};

/// Partitions (of rank at least two) whose row is satisfied with equality.
pub fn tight_partitions<F: Field>(lp: &LinearProgram<F>, x: &[F]) -> Vec<Partition> {
    lp.rows
        .iter()
        .filter_map(|row| match &row.id {
            RowId::Partition(p) if lp.row_activity(row, x) == row.rhs => Some(p.clone()),
            _ => None,
        })
        .collect()
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct ClosureReport {
    pub tight: usize,
    pub crossing_pairs: usize,
    /// Crossing pairs whose meet or join is not tight.
    pub violations: Vec<(Partition, Partition)>,
}

impl ClosureReport {
    pub fn closed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks that the meet and join of every crossing pair of tight partitions
/// are tight; the one-block partition counts as tight.
pub fn verify_meet_join_closure(tight: &[Partition]) -> ClosureReport {
    let set: HashSet<&Partition> = tight.iter().collect();
    let is_tight = |p: &Partition| p.rank() <= 1 || set.contains(p);
    let mut report = ClosureReport { tight: tight.len(), ..Default::default() };
    for (i, a) in tight.iter().enumerate() {
        for b in &tight[i + 1..] {
            if a.refines(b) || b.refines(a) {
                continue;
            }
            report.crossing_pairs += 1;
            if !is_tight(&a.meet(b)) || !is_tight(&a.join(b)) {
                report.violations.push((a.clone(), b.clone()));
            }
        }
    }
    report
}

#[derive(Clone, Debug, Serialize)]
pub struct ChainReport {
    pub chain: Vec<Partition>,
    pub support: Vec<usize>,
    pub system_rank: usize,
    pub unique: bool,
    pub sparse: bool,
}

impl ChainReport {
    pub fn verdict(&self) -> bool {
        self.unique && self.sparse
    }
}

/// Greedy maximal chain among tight partitions (coarsest-rank first), and
/// whether its rows pin down the support values uniquely.
pub fn extract_chain_and_verify(
    components: &[FullComponent],
    x: &[Rational],
    tight: &[Partition],
    k: usize,
) -> ChainReport {
    let mut ordered: Vec<&Partition> = tight.iter().filter(|p| p.rank() >= 2).collect();
    ordered.sort_by(|a, b| b.rank().cmp(&a.rank()).then(a.cmp(b)));
    let mut chain: Vec<Partition> = Vec::new();
    for p in ordered {
        if chain.iter().all(|c| c.refines(p) || p.refines(c)) {
            chain.push(p.clone());
        }
    }
    let support: Vec<usize> = (0..x.len()).filter(|&j| !Field::is_zero_value(&x[j])).collect();
    let matrix: Vec<Vec<Rational>> = chain
        .iter()
        .map(|p| support.iter().map(|&j| integer(p.rank_contribution(components[j].terminals) as i64)).collect())
        .collect();
    let system_rank = matrix_rank(matrix);
    ChainReport {
        unique: system_rank == support.len(),
        sparse: support.len() + 1 <= k.max(1),
        chain,
        support,
        system_rank,
    }
}

/// Rank by exact Gaussian elimination.
pub fn matrix_rank<F: Field>(mut rows: Vec<Vec<F>>) -> usize {
    let width = rows.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for col in 0..width {
        let Some(p) = (rank..rows.len()).find(|&r| !rows[r][col].is_zero_value()) else { continue };
        rows.swap(rank, p);
        let pivot = rows[rank][col].clone();
        for r in 0..rows.len() {
            if r == rank || rows[r][col].is_zero_value() {
                continue;
            }
            let f = rows[r][col].over(&pivot);
            for c in col..width {
                let v = rows[r][c].minus(&f.times(&rows[rank][c]));
                rows[r][c] = v;
            }
        }
        rank += 1;
    }
    rank
}

/// Moves `delta` of weight from hyperedge `from` to its subset `to` with one
/// fewer terminal.
pub fn shrink(x: &mut BTreeMap<Mask, Rational>, from: Mask, to: Mask, delta: &Rational) -> Result<()> {
    let current = x.get(&from).cloned().unwrap_or_default();
    if !delta.positive() || *delta > current {
        return Err(Error::Invalid(format!("shrink amount {delta} outside (0, {current}]")));
    }
    if to & !from != 0 || bits::count(to) + 1 != bits::count(from) {
        return Err(Error::Invalid("target must drop exactly one terminal of the source".into()));
    }
    let rest = &current - delta;
    if rest.is_zero_value() {
        x.remove(&from);
    } else {
        x.insert(from, rest);
    }
    *x.entry(to).or_default() += delta;
    Ok(())
}

#[derive(Clone, Debug, Serialize)]
pub struct ShrinkReport {
    pub steps: usize,
    pub reached_equality: bool,
    pub always_feasible: bool,
    pub cost_nonincreasing: bool,
    pub initial_cost: String,
    pub final_cost: String,
}

/// Replays the shrinking argument on a feasible point of the partition LP:
/// repeatedly shrink a hyperedge `K` to `K - r` where no tight partition
/// distinguishes them, by the largest amount keeping all rows feasible.
/// Singleton hyperedges act as zero-cost placeholders.
pub fn shrink_replay(components: &[FullComponent], x: &[Rational], k: usize, cap: usize) -> Result<ShrinkReport> {
    let cost: BTreeMap<Mask, Rational> = components
        .iter()
        .map(|fc| Ok((fc.terminals, fc.cost.to_rational().ok_or(Error::IrrationalCoefficient)?)))
        .collect::<Result<_>>()?;
    let cost_of = |m: Mask| -> Option<Rational> {
        if bits::count(m) == 1 {
            Some(integer(0))
        } else {
            cost.get(&m).cloned()
        }
    };
    let partitions: Vec<Partition> = enumerate_partitions(k, cap)?.into_iter().filter(|p| p.rank() >= 2).collect();
    let mut sol: BTreeMap<Mask, Rational> = components
        .iter()
        .zip(x)
        .filter(|(_, v)| !Field::is_zero_value(*v))
        .map(|(fc, v)| (fc.terminals, v.clone()))
        .collect();
    let total_cost = |s: &BTreeMap<Mask, Rational>| -> Rational {
        s.iter().map(|(m, v)| cost_of(*m).unwrap_or_default() * v).sum()
    };
    let target = integer(k as i64 - 1);
    let rank_sum = |s: &BTreeMap<Mask, Rational>| -> Rational {
        s.iter().map(|(m, v)| integer(bits::count(*m) as i64 - 1) * v).sum()
    };
    let initial_cost = total_cost(&sol);
    let mut previous_cost = initial_cost.clone();
    let mut report = ShrinkReport {
        steps: 0,
        reached_equality: false,
        always_feasible: true,
        cost_nonincreasing: true,
        initial_cost: initial_cost.to_string(),
        final_cost: String::new(),
    };
    let step_cap = 10_000;
    loop {
        let slacks: Vec<Rational> = partitions
            .iter()
            .map(|p| {
                let lhs: Rational = sol.iter().map(|(m, v)| integer(p.rank_contribution(*m) as i64) * v).sum();
                lhs - integer(p.rank() as i64 - 1)
            })
            .collect();
        if slacks.iter().any(|s| s.negative()) {
            report.always_feasible = false;
        }
        if rank_sum(&sol) == target {
            report.reached_equality = true;
            break;
        }
        if report.steps >= step_cap {
            break;
        }
        let tight: Vec<usize> = (0..partitions.len()).filter(|&i| slacks[i].is_zero_value()).collect();
        let mut chosen = None;
        'search: for (&m, _) in sol.iter().filter(|(m, _)| bits::count(**m) >= 2) {
            for r in bits::elements(m) {
                let sub = m & !bits::bit(r);
                if cost_of(sub).is_none() {
                    continue;
                }
                let same = tight
                    .iter()
                    .all(|&i| partitions[i].rank_contribution(m) == partitions[i].rank_contribution(sub));
                if same {
                    chosen = Some((m, sub));
                    break 'search;
                }
            }
        }
        let Some((m, sub)) = chosen else { break };
        let mut delta = sol[&m].clone();
        for (i, p) in partitions.iter().enumerate() {
            let diff = p.rank_contribution(m) - p.rank_contribution(sub);
            if diff > 0 && !slacks[i].is_zero_value() {
                let bound = &slacks[i] / integer(diff as i64);
                if bound < delta {
                    delta = bound;
                }
            }
        }
        shrink(&mut sol, m, sub, &delta)?;
        report.steps += 1;
        let now = total_cost(&sol);
        if now > previous_cost {
            report.cost_nonincreasing = false;
        }
        previous_cost = now;
    }
    report.final_cost = total_cost(&sol).to_string();
    Ok(report)
}

/// Optimal vertices of `lp` under random positive objectives.
pub fn sample_vertices(lp: &LinearProgram<Rational>, count: usize, seed: u64) -> Result<Vec<Vec<Rational>>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let mut probe = lp.clone();
        for c in probe.objective.iter_mut() {
            *c = integer(rng.gen_range(1..=30));
        }
        out.push(solve_exact(&probe)?.primal);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hyper::enumerate_full_components;
    use crate::instance::{CostFunction, Instance};
    use crate::lp::builders::build_partition_lp;
    use crate::partition::Partition;

    #[test]
    fn crossing_tight_pair_needs_meet_and_join() {
        let labels = [1, 2, 3, 4];
        let a = Partition::parse_with("{1,2|3,4}", &labels).unwrap();
        let b = Partition::parse_with("{1,3|2,4}", &labels).unwrap();
        let report = verify_meet_join_closure(&[a.clone(), b.clone()]);
        assert_eq!(report.crossing_pairs, 1);
        assert!(!report.closed());
        let closed = verify_meet_join_closure(&[a, b, Partition::singletons(4)]);
        assert!(closed.closed());
        assert!(verify_meet_join_closure(&[Partition::singletons(4)]).closed());
    }

    #[test]
    fn rank_of_small_matrices() {
        let m = vec![vec![integer(1), integer(2)], vec![integer(2), integer(4)], vec![integer(0), integer(1)]];
        assert_eq!(matrix_rank(m), 2);
        assert_eq!(matrix_rank::<Rational>(vec![]), 0);
    }

    #[test]
    fn shrink_preconditions() {
        let mut x = BTreeMap::from([(0b111, integer(1))]);
        assert!(shrink(&mut x, 0b111, 0b011, &integer(0)).is_err());
        assert!(shrink(&mut x, 0b111, 0b001, &integer(1)).is_err());
        shrink(&mut x, 0b111, 0b011, &integer(1)).unwrap();
        assert_eq!(x, BTreeMap::from([(0b011, integer(1))]));
    }

    #[test]
    fn integral_tree_tight_sets_and_chain() {
        // path of terminals 0-1-2-3 with unit costs: the mtst solution is integral
        let inst = Instance::new(4, vec![(0, 1, integer(1)), (1, 2, integer(1)), (2, 3, integer(1))], vec![0, 1, 2, 3])
            .unwrap()
            .metric_closure()
            .unwrap();
        let comps = enumerate_full_components(&inst, &CostFunction::original(&inst), 4).unwrap();
        let lp = build_partition_lp::<Rational>(&comps, 4, 9).unwrap();
        let sol = solve_exact(&lp).unwrap();
        assert_eq!(sol.objective, integer(3));
        let tight = tight_partitions(&lp, &sol.primal);
        // removing any subset of the three tree edges induces a tight partition
        for removed in 1u64..8 {
            let mut labels = vec![0usize; 4];
            let mut block = 0;
            for v in 1..4 {
                if bits::contains(removed, v - 1) {
                    block += 1;
                }
                labels[v] = block;
            }
            assert!(tight.contains(&Partition::from_labels(&labels)));
        }
        assert!(verify_meet_join_closure(&tight).closed());
        let chain = extract_chain_and_verify(&comps, &sol.primal, &tight, 4);
        assert!(chain.verdict());
        assert_eq!(chain.support.len(), 3);
        let replay = shrink_replay(&comps, &sol.primal, 4, 9).unwrap();
        assert!(replay.reached_equality && replay.always_feasible);
    }
}
