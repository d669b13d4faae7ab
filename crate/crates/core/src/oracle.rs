//! Ground truth: exact Steiner trees, seeded instance generation and
//! integrality-gap reports.

use std::collections::BTreeMap;
use std::ops::RangeInclusive;

use num_traits::Zero;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::algos::{loss_contracting, one_pass_reduced, ratio_greedy, ScanOrder};
use crate::bits::{self, Mask, UnionFind};
use crate::error::{Error, Result};
use crate::hyper::tidy_tree;
use crate::instance::{mtst, CostFunction, Instance, InstanceClass, Tree};
use crate::lp::{Caps, ColumnId, LinearProgram, LpKind, Prepared};
use crate::ring::{fraction_string, integer, Rational, Surd};

pub const EXACT_TERMINAL_CAP: usize = 10;
pub const EXACT_VERTEX_CAP: usize = 16;

#[derive(Clone, Copy, Debug)]
enum Back {
    Unset,
    Base,
    Merge(Mask),
    Edge { from: usize, edge: usize },
}

/// Minimum Steiner tree by the Dreyfus-Wagner subset recursion: `best[S][v]`
/// is the cheapest tree containing the terminals `S` and the vertex `v`.
pub fn exact_steiner_tree(inst: &Instance) -> Result<Tree> {
    let n = inst.num_vertices();
    let k = inst.num_terminals();
    if k > EXACT_TERMINAL_CAP {
        return Err(Error::CapExceeded { what: "|R|", actual: k, limit: EXACT_TERMINAL_CAP });
    }
    if n > EXACT_VERTEX_CAP {
        return Err(Error::CapExceeded { what: "|V|", actual: n, limit: EXACT_VERTEX_CAP });
    }
    if k <= 1 {
        return Ok(Tree { edges: Vec::new(), cost: Surd::zero() });
    }
    let adjacency: Vec<Vec<(usize, usize)>> = (0..n)
        .map(|v| {
            inst.neighbors(v).into_iter().map(|u| (u, inst.edge_between(u, v).expect("neighbor edge"))).collect()
        })
        .collect();
    let full = bits::full(k);
    let size = 1usize << k;
    let mut best: Vec<Option<Rational>> = vec![None; size * n];
    let mut back = vec![Back::Unset; size * n];
    for mask in 1..=full {
        let m = mask as usize;
        if bits::count(mask) == 1 {
            let t = inst.terminals()[mask.trailing_zeros() as usize];
            best[m * n + t] = Some(integer(0));
            back[m * n + t] = Back::Base;
        } else {
            let low = mask & mask.wrapping_neg();
            for v in 0..n {
                for sub in bits::proper_submasks(mask) {
                    if sub & low == 0 {
                        continue;
                    }
                    let (Some(a), Some(b)) = (&best[sub as usize * n + v], &best[(mask ^ sub) as usize * n + v]) else {
                        continue;
                    };
                    let cand = a + b;
                    if best[m * n + v].as_ref().map_or(true, |cur| cand < *cur) {
                        best[m * n + v] = Some(cand);
                        back[m * n + v] = Back::Merge(sub);
                    }
                }
            }
        }
        let mut settled = vec![false; n];
        loop {
            let next = (0..n)
                .filter(|&v| !settled[v])
                .filter_map(|v| best[m * n + v].as_ref().map(|d| (d, v)))
                .min()
                .map(|(_, v)| v);
            let Some(u) = next else { break };
            settled[u] = true;
            let du = best[m * n + u].clone().expect("settled vertex has a value");
            for &(v, edge) in &adjacency[u] {
                if settled[v] {
                    continue;
                }
                let cand = &du + &inst.edge(edge).cost;
                if best[m * n + v].as_ref().map_or(true, |cur| cand < *cur) {
                    best[m * n + v] = Some(cand);
                    back[m * n + v] = Back::Edge { from: u, edge };
                }
            }
        }
    }
    let root = inst.root();
    let value = best[full as usize * n + root].clone().ok_or(Error::TerminalsDisconnected)?;
    let mut edges = Vec::new();
    let mut stack = vec![(full, root)];
    while let Some((mask, v)) = stack.pop() {
        match back[mask as usize * n + v] {
            Back::Unset => return Err(Error::Invariant("broken back pointer in subset recursion".into())),
            Back::Base => {}
            Back::Merge(sub) => {
                stack.push((sub, v));
                stack.push((mask ^ sub, v));
            }
            Back::Edge { from, edge } => {
                edges.push(edge);
                stack.push((mask, from));
            }
        }
    }
    let cost = CostFunction::original(inst);
    let edges = tidy_tree(inst, &cost, edges);
    let tree = Tree { cost: cost.total(&edges), edges };
    if tree.cost != Surd::from(value) || !tree.spans(inst, inst.terminals()) {
        return Err(Error::Invariant("reconstructed tree disagrees with the subset recursion".into()));
    }
    Ok(tree)
}

/// Minimum Steiner tree cost by trying every set of Steiner vertices and
/// taking a minimum spanning tree of the induced subgraph.
pub fn steiner_by_enumeration(inst: &Instance) -> Result<Rational> {
    let steiner = inst.steiner_vertices();
    if steiner.len() > EXACT_VERTEX_CAP {
        return Err(Error::CapExceeded { what: "Steiner vertices", actual: steiner.len(), limit: EXACT_VERTEX_CAP });
    }
    let mut edges: Vec<usize> = (0..inst.edges().len()).collect();
    edges.sort_by(|&a, &b| inst.edge(a).cost.cmp(&inst.edge(b).cost));
    let mut best: Option<Rational> = None;
    for chosen in 0..(1u64 << steiner.len()) {
        let mut inside = vec![false; inst.num_vertices()];
        for &t in inst.terminals() {
            inside[t] = true;
        }
        for (j, &s) in steiner.iter().enumerate() {
            inside[s] = bits::contains(chosen, j);
        }
        let wanted = inside.iter().filter(|&&b| b).count();
        let mut uf = UnionFind::new(inst.num_vertices());
        let mut total = integer(0);
        let mut used = 0;
        for &i in &edges {
            let e = inst.edge(i);
            if inside[e.u] && inside[e.v] && uf.union(e.u, e.v) {
                total += &e.cost;
                used += 1;
            }
        }
        if used + 1 == wanted && best.as_ref().map_or(true, |b| total < *b) {
            best = Some(total);
        }
    }
    best.ok_or(Error::TerminalsDisconnected)
}

/// A Steiner tree split at its terminals: terminal positions and cost of each
/// full component, ordered by mask.
pub fn split_into_full_components(inst: &Instance, tree: &Tree) -> Vec<(Mask, Rational)> {
    let m = tree.edges.len();
    let mut uf = UnionFind::new(m);
    let mut at: BTreeMap<usize, usize> = BTreeMap::new();
    for (j, &i) in tree.edges.iter().enumerate() {
        let e = inst.edge(i);
        for v in [e.u, e.v] {
            if inst.is_terminal(v) {
                continue;
            }
            match at.get(&v) {
                Some(&other) => {
                    uf.union(j, other);
                }
                None => {
                    at.insert(v, j);
                }
            }
        }
    }
    let mut pieces: BTreeMap<usize, (Mask, Rational)> = BTreeMap::new();
    for (j, &i) in tree.edges.iter().enumerate() {
        let e = inst.edge(i);
        let entry = pieces.entry(uf.find(j)).or_insert_with(|| (0, integer(0)));
        entry.1 += &e.cost;
        for v in [e.u, e.v] {
            if let Some(p) = inst.terminal_position(v) {
                entry.0 |= bits::bit(p);
            }
        }
    }
    let mut out: Vec<(Mask, Rational)> = pieces.into_values().collect();
    out.sort();
    out
}

/// Indicator vector of a set of hyperedges over the columns of `lp`, or
/// `None` if some hyperedge has no column.
pub fn hyperedge_indicator(lp: &LinearProgram<Rational>, masks: &[Mask]) -> Option<Vec<Rational>> {
    let index = lp.column_index();
    let mut x = vec![integer(0); lp.num_columns()];
    for &m in masks {
        x[*index.get(&ColumnId::Hyperedge(m))?] += integer(1);
    }
    Some(x)
}

/// Seeded instance with integer costs drawn from `costs`, built so that it
/// belongs to `class` (quasibipartite classes never join two Steiner vertices).
pub fn random_instance(
    seed: u64,
    n: usize,
    k: usize,
    costs: RangeInclusive<i64>,
    class: InstanceClass,
) -> Result<Instance> {
    if k == 0 || k > n || n > 64 {
        return Err(Error::Invalid(format!("need 1 <= |R| <= |V| <= 64, got |V|={n}, |R|={k}")));
    }
    if *costs.start() < 1 || costs.start() > costs.end() {
        return Err(Error::Invalid("cost range must be a nonempty range of positive integers".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut vertices: Vec<usize> = (0..n).collect();
    vertices.shuffle(&mut rng);
    let mut terminals = vertices[..k].to_vec();
    terminals.sort_unstable();
    let is_terminal = |v: usize| terminals.binary_search(&v).is_ok();
    let steiner: Vec<usize> = (0..n).filter(|&v| !is_terminal(v)).collect();
    let mut edges: BTreeMap<(usize, usize), Rational> = BTreeMap::new();
    let draw = |rng: &mut ChaCha8Rng| integer(rng.gen_range(costs.clone()));
    let mut uf = UnionFind::new(n);
    match class {
        InstanceClass::General => {
            for i in 1..n {
                let j = rng.gen_range(0..i);
                let (u, v) = (vertices[i].min(vertices[j]), vertices[i].max(vertices[j]));
                edges.insert((u, v), draw(&mut rng));
            }
            for u in 0..n {
                for v in u + 1..n {
                    if !edges.contains_key(&(u, v)) && rng.gen_bool(0.3) {
                        edges.insert((u, v), draw(&mut rng));
                    }
                }
            }
        }
        InstanceClass::Quasibipartite | InstanceClass::UniformlyQuasibipartite => {
            for &s in &steiner {
                let degree = if k >= 2 { rng.gen_range(2..=k.min(4)) } else { 1 };
                let spoke = draw(&mut rng);
                for &t in terminals.choose_multiple(&mut rng, degree) {
                    let c = if class == InstanceClass::UniformlyQuasibipartite { spoke.clone() } else { draw(&mut rng) };
                    edges.insert((s.min(t), s.max(t)), c);
                    uf.union(s, t);
                }
            }
            for (a, &u) in terminals.iter().enumerate() {
                for &v in &terminals[a + 1..] {
                    if rng.gen_bool(0.3) {
                        edges.insert((u, v), draw(&mut rng));
                        uf.union(u, v);
                    }
                }
            }
            let mut order = terminals.clone();
            order.shuffle(&mut rng);
            for a in 1..order.len() {
                let (u, v) = (order[a - 1], order[a]);
                if uf.union(u, v) {
                    edges.insert((u.min(v), u.max(v)), draw(&mut rng));
                }
            }
        }
    }
    let list = edges.into_iter().map(|((u, v), c)| (u, v, c)).collect();
    Instance::new(n, list, terminals)
}

/// Integral and fractional optima of one instance, with heuristic costs.
#[derive(Clone, Debug)]
pub struct GapReport {
    pub id: String,
    pub class: InstanceClass,
    pub num_vertices: usize,
    pub num_terminals: usize,
    pub opt_integral: Rational,
    /// `None` when the relaxation exceeds its size cap.
    pub optima: BTreeMap<LpKind, Option<Rational>>,
    pub mtst: Rational,
    pub gap_p: Rational,
    pub gap_b: Option<Rational>,
    pub one_pass: Surd,
    pub loss_contracting: Surd,
    pub ratio_greedy: Option<Rational>,
}

impl GapReport {
    pub fn optimum(&self, kind: LpKind) -> Option<&Rational> {
        self.optima.get(&kind).and_then(|v| v.as_ref())
    }

    pub fn to_json(&self) -> Value {
        let optima: serde_json::Map<String, Value> = self
            .optima
            .iter()
            .map(|(k, v)| (k.name().to_string(), v.as_ref().map_or(Value::Null, |q| Value::from(fraction_string(q)))))
            .collect();
        json!({
            "id": self.id,
            "class": self.class.name(),
            "vertices": self.num_vertices,
            "terminals": self.num_terminals,
            "opt_integral": fraction_string(&self.opt_integral),
            "optima": optima,
            "mtst": fraction_string(&self.mtst),
            "gap_P": fraction_string(&self.gap_p),
            "gap_B": self.gap_b.as_ref().map(fraction_string),
            "heuristics": {
                "one_pass": self.one_pass.to_string(),
                "loss_contracting": self.loss_contracting.to_string(),
                "ratio_greedy": self.ratio_greedy.as_ref().map(fraction_string),
            },
        })
    }
}

/// Solves all five relaxations and the exact problem; fails if the gap of
/// the partition LP leaves `[1, √3]` or `OPT(B) > OPT(P)`.
pub fn gap_report(id: &str, graph: &Instance, caps: &Caps) -> Result<GapReport> {
    let prep = Prepared::new(graph)?;
    let mut optima = BTreeMap::new();
    for kind in LpKind::ALL {
        let value = match prep.solve(kind, caps) {
            Ok(s) => Some(s.solution.objective),
            Err(Error::CapExceeded { .. }) if kind == LpKind::Bidirected => None,
            Err(e) => return Err(e),
        };
        optima.insert(kind, value);
    }
    let opt_p = optima[&LpKind::Partition].clone().ok_or(Error::Infeasible)?;
    let opt_integral = exact_steiner_tree(graph)?.cost.to_rational().expect("rational costs");
    let closure_cost = CostFunction::original(&prep.closure);
    let mtst_cost = mtst(&prep.closure, &closure_cost)?.cost.to_rational().expect("rational costs");
    let ratio = |opt: &Rational| if opt.is_zero() { integer(1) } else { &opt_integral / opt };
    let gap_p = ratio(&opt_p);
    let gap_b = optima[&LpKind::Bidirected].as_ref().map(ratio);
    if gap_p < integer(1) || &gap_p * &gap_p > integer(3) {
        return Err(Error::VerificationFailed(format!("{id}: OPT/OPT(P) = {gap_p} outside [1, sqrt(3)]")));
    }
    if let Some(b) = &optima[&LpKind::Bidirected] {
        if *b > opt_p {
            return Err(Error::VerificationFailed(format!("{id}: OPT(B) = {b} exceeds OPT(P) = {opt_p}")));
        }
    }
    let class = graph.classify();
    let (one_pass, loss) = if prep.num_terminals() >= 2 {
        (
            one_pass_reduced(&prep.closure, ScanOrder::Colex)?.cost,
            loss_contracting(&prep.closure, &Surd::sqrt(3), ScanOrder::Colex)?.cost,
        )
    } else {
        (Surd::zero(), Surd::zero())
    };
    let greedy = if class == InstanceClass::UniformlyQuasibipartite && prep.num_terminals() >= 2 {
        Some(ratio_greedy(graph)?.cost)
    } else {
        None
    };
    Ok(GapReport {
        id: id.to_string(),
        class,
        num_vertices: graph.num_vertices(),
        num_terminals: graph.num_terminals(),
        opt_integral,
        optima,
        mtst: mtst_cost,
        gap_p,
        gap_b,
        one_pass,
        loss_contracting: loss,
        ratio_greedy: greedy,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn star() -> Instance {
        Instance::new(4, vec![(0, 1, integer(1)), (0, 2, integer(1)), (0, 3, integer(1))], vec![1, 2, 3]).unwrap()
    }

    #[test]
    fn star_tree() {
        let t = exact_steiner_tree(&star()).unwrap();
        assert_eq!(t.cost, Surd::from_integer(3));
        assert_eq!(t.edges.len(), 3);
        assert_eq!(steiner_by_enumeration(&star()).unwrap(), integer(3));
        assert_eq!(split_into_full_components(&star(), &t), vec![(0b111, integer(3))]);
    }

    #[test]
    fn two_terminals_take_the_shortest_path() {
        let inst =
            Instance::new(4, vec![(0, 1, integer(2)), (1, 3, integer(2)), (0, 2, integer(1)), (2, 3, integer(2))], vec![0, 3])
                .unwrap();
        assert_eq!(exact_steiner_tree(&inst).unwrap().cost, Surd::from_integer(3));
    }

    #[test]
    fn split_at_internal_terminal() {
        // path 1 - 0 - 2 - 3 with 2 a terminal: pieces {1,2} via 0 and {2,3}
        let inst = Instance::new(4, vec![(0, 1, integer(1)), (0, 2, integer(1)), (2, 3, integer(1))], vec![1, 2, 3]).unwrap();
        let t = exact_steiner_tree(&inst).unwrap();
        assert_eq!(split_into_full_components(&inst, &t), vec![(0b011, integer(2)), (0b110, integer(1))]);
    }

    #[test]
    fn generator_is_deterministic_and_respects_class() {
        for class in [InstanceClass::General, InstanceClass::Quasibipartite, InstanceClass::UniformlyQuasibipartite] {
            for seed in 0..20 {
                let a = random_instance(seed, 9, 4, 1..=20, class).unwrap();
                assert_eq!(a, random_instance(seed, 9, 4, 1..=20, class).unwrap());
                assert!(a.is_connected());
                match class {
                    InstanceClass::General => {}
                    InstanceClass::Quasibipartite => assert!(a.classify().is_quasibipartite()),
                    InstanceClass::UniformlyQuasibipartite => {
                        assert_eq!(a.classify(), InstanceClass::UniformlyQuasibipartite)
                    }
                }
            }
        }
        let all = random_instance(3, 6, 6, 1..=20, InstanceClass::General).unwrap();
        assert!(all.steiner_vertices().is_empty());
    }

    #[test]
    fn dynamic_program_matches_enumeration() {
        for seed in 0..40 {
            let class = [InstanceClass::General, InstanceClass::Quasibipartite][seed as usize % 2];
            let inst = random_instance(seed, 7, 3 + seed as usize % 3, 1..=20, class).unwrap();
            let t = exact_steiner_tree(&inst).unwrap();
            assert_eq!(t.cost, Surd::from(steiner_by_enumeration(&inst).unwrap()), "seed {seed}");
        }
    }

    #[test]
    fn star_gap_report() {
        let r = gap_report("star", &star(), &Caps::default()).unwrap();
        assert_eq!(r.gap_p, integer(1));
        assert!(r.optima.values().all(|v| v.as_ref() == Some(&integer(3))));
        assert_eq!(r.ratio_greedy, Some(integer(3)));
        assert_eq!(r.to_json()["optima"]["B"], "3");
    }
}
