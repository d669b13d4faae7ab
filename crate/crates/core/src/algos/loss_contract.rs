use crate::algos::{HeuristicTrace, ScanOrder, TraceStep};
use crate::bits::UnionFind;
use crate::error::{Error, Result};
use crate::hyper::{drop_against, enumerate_full_components, loss, FullComponent, DEFAULT_COMPONENT_CAP};
use crate::instance::{mtst, CostFunction, Instance, Tree};
use crate::ring::Surd;

#[derive(Clone, Debug)]
pub struct LossContractResult {
    pub trace: HeuristicTrace,
    pub fired: Vec<FullComponent>,
    /// Loss of each fired component.
    pub losses: Vec<Surd>,
    /// Loss edges of all fired components, as edge ids of the input.
    pub loss_edges: Vec<usize>,
    pub final_instance: Instance,
    /// Minimum terminal spanning tree of the final instance.
    pub final_tree: Tree,
    /// `c(T_f) + Σ loss`.
    pub cost: Surd,
    /// Edge ids of the input forming a Steiner tree.
    pub edges: Vec<usize>,
}

/// Scans the components of the metric instance `closure` once and contracts
/// the loss of each component whose gain exceeds `(alpha - 1)` times its loss.
/// Components with empty loss are skipped.
pub fn loss_contracting(closure: &Instance, alpha: &Surd, order: ScanOrder) -> Result<LossContractResult> {
    if *alpha < Surd::one() {
        return Err(Error::Invalid(format!("alpha {alpha} must be at least 1")));
    }
    let cost = CostFunction::original(closure);
    let k = closure.num_terminals();
    let components = enumerate_full_components(closure, &cost, k.min(DEFAULT_COMPONENT_CAP))?;
    let factor = alpha - &Surd::one();
    let mut current = closure.clone();
    let mut class_of: Vec<usize> = (0..closure.num_vertices()).collect();
    let mut current_mtst = mtst(&current, &cost)?.cost;
    let mut trace = HeuristicTrace::default();
    let mut fired = Vec::new();
    let mut losses = Vec::new();
    let mut loss_edges = Vec::new();
    for (iteration, idx) in order.order(components.len()).into_iter().enumerate() {
        let fc = &components[idx];
        let lost = loss(closure, &cost, fc);
        if &lost.cost + &lost.cost > fc.cost {
            return Err(Error::Invariant(format!("loss of {:?} exceeds half its cost", fc.vertices)));
        }
        let mapped: Vec<usize> = fc.vertices.iter().map(|&v| class_of[v]).collect();
        let current_cost = CostFunction::original(&current);
        let drop = drop_against(&current, &current_cost, &current_mtst, &mapped)?;
        let gain = &drop - &fc.cost;
        let threshold = &factor * &lost.cost;
        let fires = !lost.edges.is_empty() && gain > threshold;
        let before = current_mtst.clone();
        if fires {
            let groups: Vec<Vec<usize>> = lost
                .edges
                .iter()
                .map(|&i| vec![class_of[closure.edge(i).u], class_of[closure.edge(i).v]])
                .collect();
            let contraction = current.contract_groups(&groups);
            for c in class_of.iter_mut() {
                *c = contraction.class_of[*c];
            }
            current = contraction.instance;
            current_mtst = mtst(&current, &CostFunction::original(&current))?.cost;
            if &before - &current_mtst < &gain + &lost.cost {
                return Err(Error::Invariant(format!(
                    "contracting the loss of {:?} lowered the mtst by less than gain plus loss",
                    fc.vertices
                )));
            }
            fired.push(fc.clone());
            losses.push(lost.cost.clone());
            loss_edges.extend(lost.edges.iter().copied());
        }
        trace.steps.push(TraceStep {
            iteration,
            component: fc.vertices.clone(),
            drop,
            gain,
            threshold,
            fired: fires,
            mtst_before: before,
            mtst_after: current_mtst.clone(),
            loss: Some(lost.cost),
        });
    }
    let final_tree = mtst(&current, &CostFunction::original(&current))?;
    let mut edges = loss_edges.clone();
    for &i in &final_tree.edges {
        let (u, v) = current.edge(i).origin;
        edges.push(closure.edge_between(u, v).expect("closure is complete"));
    }
    edges.sort_unstable();
    edges.dedup();
    let cost = &final_tree.cost + &losses.iter().sum::<Surd>();
    let mut uf = UnionFind::new(closure.num_vertices());
    for &i in &edges {
        uf.union(closure.edge(i).u, closure.edge(i).v);
    }
    let root = closure.root();
    if closure.terminals().iter().any(|&t| !uf.same(t, root)) {
        return Err(Error::Invariant("loss edges and final tree do not connect the terminals".into()));
    }
    Ok(LossContractResult { trace, fired, losses, loss_edges, final_instance: current, final_tree, cost, edges })
}
