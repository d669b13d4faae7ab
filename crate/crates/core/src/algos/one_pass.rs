use crate::algos::{kruskal_dual, HeuristicTrace, PartitionDual, ScanOrder, TraceStep};
use crate::error::{Error, Result};
use crate::hyper::{drop_against, enumerate_full_components, FullComponent, DEFAULT_COMPONENT_CAP};
use crate::instance::{mtst, reduce_terminal_costs, CostFunction, Instance, Tree};
use crate::ring::Surd;

#[derive(Clone, Debug)]
pub struct OnePassResult {
    pub trace: HeuristicTrace,
    /// Fired components, as components of the input under reduced costs.
    pub fired: Vec<FullComponent>,
    /// Original cost of each fired component's witness.
    pub fired_costs: Vec<Surd>,
    /// The input with every fired component contracted.
    pub final_instance: Instance,
    /// Minimum terminal spanning tree of the final instance under original costs.
    pub final_tree: Tree,
    /// Its cost under reduced costs.
    pub final_tree_reduced: Surd,
    /// Kruskal dual of the final instance under reduced costs.
    pub dual: PartitionDual,
    /// Components of the final instance under reduced costs.
    pub final_components: Vec<FullComponent>,
    /// `c(T_f) + Σ C_K` over fired components.
    pub cost: Surd,
    /// Edge ids of the input forming a Steiner tree.
    pub edges: Vec<usize>,
}

/// Scans the components of the metric instance `closure` once, under costs
/// with terminal-terminal edges divided by `√2`, contracting each component
/// whose gain against the current instance is positive.
pub fn one_pass_reduced(closure: &Instance, order: ScanOrder) -> Result<OnePassResult> {
    let reduced = reduce_terminal_costs(closure, &Surd::sqrt(2))?;
    let original = CostFunction::original(closure);
    let k = closure.num_terminals();
    let components = enumerate_full_components(closure, &reduced, k.min(DEFAULT_COMPONENT_CAP))?;
    let mut current = closure.clone();
    let mut class_of: Vec<usize> = (0..closure.num_vertices()).collect();
    let mut current_mtst = mtst(&current, &reduced)?.cost;
    let mut trace = HeuristicTrace::default();
    let mut fired = Vec::new();
    let mut fired_costs = Vec::new();
    for (iteration, idx) in order.order(components.len()).into_iter().enumerate() {
        let fc = &components[idx];
        let mapped: Vec<usize> = fc.vertices.iter().map(|&v| class_of[v]).collect();
        let current_cost = reduced.reapply(&current);
        let drop = drop_against(&current, &current_cost, &current_mtst, &mapped)?;
        let gain = &drop - &fc.cost;
        let fires = gain.is_positive();
        let before = current_mtst.clone();
        if fires {
            let contraction = current.contract_vertices(&mapped);
            for c in class_of.iter_mut() {
                *c = contraction.class_of[*c];
            }
            current = contraction.instance;
            current_mtst = mtst(&current, &reduced.reapply(&current))?.cost;
            fired.push(fc.clone());
            fired_costs.push(original.total(&fc.witness));
        }
        trace.steps.push(TraceStep {
            iteration,
            component: fc.vertices.clone(),
            drop,
            gain,
            threshold: Surd::zero(),
            fired: fires,
            mtst_before: before,
            mtst_after: current_mtst.clone(),
            loss: None,
        });
    }
    let final_cost = CostFunction::original(&current);
    let final_tree = mtst(&current, &final_cost)?;
    let final_reduced_cost = reduced.reapply(&current);
    let final_tree_reduced = final_reduced_cost.total(&final_tree.edges);
    if &final_tree_reduced * &Surd::sqrt(2) != final_tree.cost {
        return Err(Error::Invariant("final tree cost is not √2 times its reduced cost".into()));
    }
    let kd = kruskal_dual(&current, &final_reduced_cost)?;
    let kf = current.num_terminals();
    let final_components = if kf >= 2 {
        enumerate_full_components(&current, &final_reduced_cost, kf.min(DEFAULT_COMPONENT_CAP))?
    } else {
        Vec::new()
    };
    let cost = &final_tree.cost + &fired_costs.iter().sum::<Surd>();
    let mut edges: Vec<usize> = fired.iter().flat_map(|fc| fc.witness.iter().copied()).collect();
    for &i in &final_tree.edges {
        let (u, v) = current.edge(i).origin;
        edges.push(closure.edge_between(u, v).expect("closure is complete"));
    }
    edges.sort_unstable();
    edges.dedup();
    Ok(OnePassResult {
        trace,
        fired,
        fired_costs,
        final_instance: current,
        final_tree,
        final_tree_reduced,
        dual: kd.dual,
        final_components,
        cost,
        edges,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::integer;

    fn star_closure() -> Instance {
        Instance::new(4, vec![(0, 1, integer(1)), (0, 2, integer(1)), (0, 3, integer(1))], vec![1, 2, 3])
            .unwrap()
            .metric_closure()
            .unwrap()
    }

    #[test]
    fn star_is_gainless_under_reduced_costs() {
        let inst = star_closure();
        let out = one_pass_reduced(&inst, ScanOrder::Colex).unwrap();
        assert!(out.fired.is_empty());
        assert_eq!(out.cost, Surd::from_integer(4));
        assert_eq!(out.final_tree_reduced, "2*sqrt(2)".parse().unwrap());
        assert!(out.dual.is_feasible(&out.final_components));
        let tree = Tree { edges: out.edges.clone(), cost: out.cost.clone() };
        assert!(tree.spans(&inst, inst.terminals()));
    }

    #[test]
    fn cheap_spokes_fire() {
        let tenth = crate::ring::rational(1, 10);
        let edges = (1..=4).map(|t| (0, t, tenth.clone())).collect();
        let inst = Instance::new(5, edges, vec![1, 2, 3, 4]).unwrap().metric_closure().unwrap();
        let out = one_pass_reduced(&inst, ScanOrder::Colex).unwrap();
        assert!(!out.fired.is_empty());
        assert!(out.fired.iter().any(|fc| fc.size() >= 3));
        assert!(out.cost <= Surd::from(crate::ring::rational(4, 10)));
        assert!(out.dual.is_feasible(&out.final_components));
    }

    #[test]
    fn trace_covers_every_component() {
        let inst = star_closure();
        let out = one_pass_reduced(&inst, ScanOrder::Shuffle(7)).unwrap();
        assert_eq!(out.trace.steps.len(), 4);
        for s in &out.trace.steps {
            assert_eq!(s.fired, s.gain.is_positive());
        }
        assert!(out.fired.is_empty());
        assert_eq!(out.trace.to_json_lines().lines().count(), 4);
    }
}
