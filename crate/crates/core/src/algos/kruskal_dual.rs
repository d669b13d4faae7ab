use crate::algos::PartitionDual;
use crate::bits;
use crate::error::{Error, Result};
use crate::instance::{kruskal_order, terminal_edges, CostFunction, Instance, Tree};
use crate::partition::Partition;
use crate::ring::Surd;

#[derive(Clone, Debug)]
pub struct KruskalDual {
    pub dual: PartitionDual,
    pub tree: Tree,
}

/// Runs Kruskal on the terminal-induced subgraph and gives each intermediate
/// partition of the terminals the length of the cost interval during which
/// it was current. Zero-length partitions are dropped.
pub fn kruskal_dual(inst: &Instance, cost: &CostFunction) -> Result<KruskalDual> {
    let k = inst.num_terminals();
    let mut current = Partition::singletons(k);
    let mut values = Vec::new();
    let mut last = Surd::zero();
    let mut edges = Vec::new();
    let mut total = Surd::zero();
    for i in kruskal_order(inst, cost, terminal_edges(inst)) {
        if current.rank() <= 1 {
            break;
        }
        let e = inst.edge(i);
        let (pu, pv) = (inst.terminal_position(e.u).unwrap(), inst.terminal_position(e.v).unwrap());
        if current.block_of(pu) == current.block_of(pv) {
            continue;
        }
        let c = cost.get(i);
        let duration = c - &last;
        if duration.is_positive() {
            values.push((current.clone(), duration));
        }
        last = c.clone();
        current = current.merge(bits::bit(pu) | bits::bit(pv));
        total = &total + c;
        edges.push(i);
    }
    if current.rank() > 1 {
        return Err(Error::TerminalsDisconnected);
    }
    let dual = PartitionDual { values };
    debug_assert_eq!(dual.objective(), total);
    Ok(KruskalDual { dual, tree: Tree { edges, cost: total } })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hyper::{drop_value, enumerate_full_components};
    use crate::instance::{mtst, reduce_terminal_costs};
    use crate::ring::integer;

    fn star_closure() -> Instance {
        Instance::new(4, vec![(0, 1, integer(1)), (0, 2, integer(1)), (0, 3, integer(1))], vec![1, 2, 3])
            .unwrap()
            .metric_closure()
            .unwrap()
    }

    #[test]
    fn star_under_original_costs() {
        let inst = star_closure();
        let c = CostFunction::original(&inst);
        let kd = kruskal_dual(&inst, &c).unwrap();
        assert_eq!(kd.dual.objective(), Surd::from_integer(4));
        assert_eq!(kd.dual.values, vec![(Partition::singletons(3), Surd::from_integer(2))]);
        let comps = enumerate_full_components(&inst, &c, 3).unwrap();
        let bad = kd.dual.violations(&comps);
        assert_eq!(bad.len(), 1);
        assert_eq!(bad[0].component, 3);
        assert_eq!(&bad[0].load - &bad[0].cost, Surd::one());
        for fc in &comps {
            assert_eq!(kd.dual.load(fc.terminals), drop_value(&inst, &c, &fc.vertices).unwrap());
        }
    }

    #[test]
    fn star_under_reduced_costs_is_feasible() {
        let inst = star_closure();
        let c = reduce_terminal_costs(&inst, &Surd::sqrt(2)).unwrap();
        let kd = kruskal_dual(&inst, &c).unwrap();
        let comps = enumerate_full_components(&inst, &c, 3).unwrap();
        assert!(kd.dual.is_feasible(&comps));
        assert_eq!(kd.dual.objective(), mtst(&inst, &c).unwrap().cost);
        assert_eq!(kd.dual.objective(), "2*sqrt(2)".parse().unwrap());
    }

    #[test]
    fn ties_produce_no_zero_entries() {
        let inst = Instance::new(3, vec![(0, 1, integer(1)), (1, 2, integer(1)), (0, 2, integer(1))], vec![0, 1, 2]).unwrap();
        let kd = kruskal_dual(&inst, &CostFunction::original(&inst)).unwrap();
        assert_eq!(kd.dual.values.len(), 1);
        assert_eq!(kd.dual.objective(), Surd::from_integer(2));
    }
}
