use crate::algos::PartitionDual;
use crate::error::{Error, Result};
use crate::hyper::{enumerate_full_components, FullComponent};
use crate::instance::{CostFunction, Instance, InstanceClass};
use crate::partition::Partition;
use crate::ring::{integer, rational, Rational, Surd};

#[derive(Clone, Debug)]
pub struct RatioGreedyResult {
    /// Components of the hyper-spanning tree, in the order they were picked.
    pub chosen: Vec<FullComponent>,
    pub cost: Rational,
    /// `θ(1), θ(2), ...`: the ratio of each pick.
    pub theta: Vec<Rational>,
    pub dual: PartitionDual,
    /// Components the greedy choice ranged over (those of the input graph).
    pub components: Vec<FullComponent>,
}

impl RatioGreedyResult {
    pub fn theta_nondecreasing(&self) -> bool {
        self.theta.windows(2).all(|w| w[0] <= w[1])
    }

    /// Tree edges, as edge ids of the input graph.
    pub fn edges(&self) -> Vec<usize> {
        let mut out: Vec<usize> = self.chosen.iter().flat_map(|fc| fc.witness.iter().copied()).collect();
        out.sort_unstable();
        out.dedup();
        out
    }
}

/// Repeatedly adds the component `L` minimizing `C_L / (|L| - 1)` among those
/// whose terminals lie in distinct parts of the current partition. The dual
/// puts `θ(i+1) - θ(i)` on the partition current before pick `i + 1`.
///
/// `inst` is the uniformly quasibipartite graph before metric closure, so its
/// components with three or more terminals are stars.
pub fn ratio_greedy(inst: &Instance) -> Result<RatioGreedyResult> {
    if inst.classify() != InstanceClass::UniformlyQuasibipartite {
        return Err(Error::WrongClass("uniformly quasibipartite"));
    }
    let k = inst.num_terminals();
    let cost = CostFunction::original(inst);
    let components = enumerate_full_components(inst, &cost, k)?;
    let rational_costs: Vec<Rational> = components.iter().map(|fc| fc.cost.to_rational().expect("rational costs")).collect();
    let mut current = Partition::singletons(k);
    let mut chosen = Vec::new();
    let mut theta: Vec<Rational> = Vec::new();
    let mut values = Vec::new();
    let mut total = integer(0);
    while current.rank() > 1 {
        let mut best: Option<(usize, Rational)> = None;
        for (i, fc) in components.iter().enumerate() {
            let size = fc.size();
            if current.rank_contribution(fc.terminals) + 1 != size {
                continue;
            }
            let ratio = &rational_costs[i] / integer(size as i64 - 1);
            if best.as_ref().map_or(true, |(_, b)| ratio < *b) {
                best = Some((i, ratio));
            }
        }
        let (i, ratio) = best.ok_or(Error::TerminalsDisconnected)?;
        let previous = theta.last().cloned().unwrap_or_else(|| integer(0));
        values.push((current.clone(), Surd::from(&ratio - &previous)));
        theta.push(ratio);
        total += &rational_costs[i];
        current = current.merge(components[i].terminals);
        chosen.push(components[i].clone());
    }
    values.retain(|(_, y)| !y.is_zero());
    Ok(RatioGreedyResult { chosen, cost: total, theta, dual: PartitionDual { values }, components })
}

/// `H(n) = 1 + 1/2 + ... + 1/n`.
pub fn harmonic(n: usize) -> Rational {
    (1..=n).map(|i| rational(1, i as i64)).sum()
}

/// Per-row bound on the greedy dual for a star with `k` terminals and spoke
/// cost `c`: `c (k - 1 + H(k - 1))`.
pub fn star_row_bound(spoke: &Rational, k: usize) -> Rational {
    spoke * (integer(k as i64 - 1) + harmonic(k - 1))
}

/// `max_{2 <= k <= kmax} (k - 1 + H(k - 1)) / k` and the first `k` attaining it.
pub fn ratio_greedy_constant(kmax: usize) -> (Rational, usize) {
    let mut best = (integer(0), 0);
    for k in 2..=kmax {
        let v = (integer(k as i64 - 1) + harmonic(k - 1)) / integer(k as i64);
        if v > best.0 {
            best = (v, k);
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_is_attained_at_five() {
        let (value, k) = ratio_greedy_constant(64);
        assert_eq!(value, rational(73, 60));
        assert_eq!(k, 5);
    }

    #[test]
    fn star_picks_the_triple() {
        let inst = Instance::new(4, vec![(0, 1, integer(1)), (0, 2, integer(1)), (0, 3, integer(1))], vec![1, 2, 3]).unwrap();
        let out = ratio_greedy(&inst).unwrap();
        assert_eq!(out.chosen.len(), 1);
        assert_eq!(out.chosen[0].vertices, vec![1, 2, 3]);
        assert_eq!(out.cost, integer(3));
        assert_eq!(out.theta, vec![rational(3, 2)]);
        assert_eq!(out.dual.objective(), Surd::from_integer(3));
    }

    #[test]
    fn two_terminals() {
        let inst = Instance::new(2, vec![(0, 1, integer(7))], vec![0, 1]).unwrap();
        let out = ratio_greedy(&inst).unwrap();
        assert_eq!(out.cost, integer(7));
        assert_eq!(out.dual.values, vec![(Partition::singletons(2), Surd::from_integer(7))]);
    }

    #[test]
    fn refuses_non_uniform() {
        let inst = Instance::new(4, vec![(0, 1, integer(1)), (0, 2, integer(1)), (0, 3, integer(2))], vec![1, 2, 3]).unwrap();
        assert!(matches!(ratio_greedy(&inst), Err(Error::WrongClass(_))));
    }
}
