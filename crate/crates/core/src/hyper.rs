//! Full components (hyperedges), loss, drop and gain.

use serde::Serialize;

use crate::bits::{self, Mask, UnionFind};
use crate::error::{Error, Result};
use crate::instance::{kruskal_order, mtst, Contraction, CostFunction, Instance};
use crate::ring::Surd;

pub const DEFAULT_COMPONENT_CAP: usize = 12;

/// A minimum-cost tree whose leaves are exactly the terminals of `terminals`
/// and whose internal vertices are Steiner vertices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FullComponent {
    /// Terminal positions (bit `p` is `inst.terminals()[p]`).
    pub terminals: Mask,
    pub vertices: Vec<usize>,
    pub witness: Vec<usize>,
    pub cost: Surd,
}

impl FullComponent {
    pub fn size(&self) -> usize {
        bits::count(self.terminals)
    }

    /// Witness vertices that are not terminals.
    pub fn steiner_vertices(&self, inst: &Instance) -> Vec<usize> {
        let mut out: Vec<usize> = self
            .witness
            .iter()
            .flat_map(|&i| [inst.edge(i).u, inst.edge(i).v])
            .filter(|&v| !inst.is_terminal(v))
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Checks that the witness is a tree with the component's terminals as its
    /// leaves and only Steiner vertices inside.
    pub fn check_structure(&self, inst: &Instance, cost: &CostFunction) -> Result<()> {
        let fail = |m: String| Err(Error::Invariant(format!("component {:?}: {m}", self.vertices)));
        let n = inst.num_vertices();
        let mut degree = vec![0usize; n];
        let mut uf = UnionFind::new(n);
        for &i in &self.witness {
            let e = inst.edge(i);
            degree[e.u] += 1;
            degree[e.v] += 1;
            if !uf.union(e.u, e.v) {
                return fail("witness has a cycle".into());
            }
        }
        for v in 0..n {
            if degree[v] == 0 {
                continue;
            }
            if inst.is_terminal(v) {
                if !self.vertices.contains(&v) {
                    return fail(format!("terminal {v} not in the component"));
                }
                if degree[v] != 1 {
                    return fail(format!("terminal {v} is not a leaf"));
                }
            } else if degree[v] < 2 {
                return fail(format!("Steiner vertex {v} is a leaf"));
            }
        }
        if self.vertices.iter().any(|&t| degree[t] != 1) {
            return fail("terminal missing from witness".into());
        }
        let r = uf.find(self.vertices[0]);
        if self.vertices.iter().any(|&t| uf.find(t) != r) {
            return fail("witness disconnected".into());
        }
        if cost.total(&self.witness) != self.cost {
            return fail("cost differs from witness total".into());
        }
        Ok(())
    }
}

type Key = (Surd, usize);

fn add(a: &Key, b: &Key) -> Key {
    (&a.0 + &b.0, a.1 + b.1)
}

#[derive(Clone, Copy, Debug)]
enum Step {
    /// Terminal `p` hangs off Steiner vertex `at`, then a Steiner path to the state vertex.
    Attach { p: usize, at: usize },
    /// Merge node `from`, then a Steiner path to the state vertex.
    Grow { from: usize },
    Split { part: Mask },
}

/// Subset dynamic program shared by all terminal subsets of one instance.
struct ComponentTable<'a> {
    inst: &'a Instance,
    cost: &'a CostFunction,
    steiner: Vec<usize>,
    /// Steiner-only shortest paths, (cost, hops).
    dist: Vec<Option<Key>>,
    next: Vec<usize>,
    /// best tree rooted at a Steiner vertex containing the mask's terminals as leaves
    grown: Vec<Option<(Key, Step)>>,
    /// same, restricted to trees where the root has degree >= 2
    split: Vec<Option<(Key, Step)>>,
}

impl<'a> ComponentTable<'a> {
    fn build(inst: &'a Instance, cost: &'a CostFunction, max_size: usize) -> ComponentTable<'a> {
        let steiner = inst.steiner_vertices();
        let s = steiner.len();
        let k = inst.num_terminals();
        let mut dist: Vec<Option<Key>> = vec![None; s * s];
        let mut next = vec![usize::MAX; s * s];
        for a in 0..s {
            dist[a * s + a] = Some((Surd::zero(), 0));
            next[a * s + a] = a;
            for b in 0..s {
                if let Some(i) = inst.edge_between(steiner[a], steiner[b]) {
                    dist[a * s + b] = Some((cost.get(i).clone(), 1));
                    next[a * s + b] = b;
                }
            }
        }
        for m in 0..s {
            for a in 0..s {
                let Some(am) = dist[a * s + m].clone() else { continue };
                for b in 0..s {
                    let Some(mb) = &dist[m * s + b] else { continue };
                    let through = add(&am, mb);
                    if dist[a * s + b].as_ref().map_or(true, |d| through < *d) {
                        dist[a * s + b] = Some(through);
                        next[a * s + b] = next[a * s + m];
                    }
                }
            }
        }
        let size = 1usize << k;
        let mut table = ComponentTable {
            inst,
            cost,
            steiner,
            dist,
            next,
            grown: vec![None; size * s],
            split: vec![None; size * s],
        };
        if s == 0 {
            return table;
        }
        for mask in 1..size as Mask {
            let count = bits::count(mask);
            if count > max_size {
                continue;
            }
            let m = mask as usize;
            if count == 1 {
                let p = mask.trailing_zeros() as usize;
                let t = inst.terminals()[p];
                let attach: Vec<Option<(Key, Step)>> = (0..s)
                    .map(|u| {
                        inst.edge_between(t, table.steiner[u]).map(|i| ((cost.get(i).clone(), 1), Step::Attach { p, at: u }))
                    })
                    .collect();
                table.relax_paths(m, &attach);
                continue;
            }
            let low = mask & mask.wrapping_neg();
            for v in 0..s {
                let mut best: Option<(Key, Step)> = None;
                for part in bits::proper_submasks(mask) {
                    if part & low == 0 {
                        continue;
                    }
                    let (Some((ka, _)), Some((kb, _))) =
                        (&table.grown[part as usize * s + v], &table.grown[(mask ^ part) as usize * s + v])
                    else {
                        continue;
                    };
                    let key = add(ka, kb);
                    if best.as_ref().map_or(true, |(b, _)| key < *b) {
                        best = Some((key, Step::Split { part }));
                    }
                }
                table.split[m * s + v] = best;
            }
            let seeds: Vec<Option<(Key, Step)>> = (0..s)
                .map(|u| table.split[m * s + u].as_ref().map(|(key, _)| (key.clone(), Step::Grow { from: u })))
                .collect();
            table.relax_paths(m, &seeds);
        }
        table
    }

    fn relax_paths(&mut self, m: usize, seeds: &[Option<(Key, Step)>]) {
        let s = self.steiner.len();
        for v in 0..s {
            let mut best: Option<(Key, Step)> = None;
            for u in 0..s {
                let (Some((seed, step)), Some(d)) = (&seeds[u], &self.dist[u * s + v]) else { continue };
                let key = add(seed, d);
                if best.as_ref().map_or(true, |(b, _)| key < *b) {
                    best = Some((key, *step));
                }
            }
            self.grown[m * s + v] = best;
        }
    }

    fn path_edges(&self, from: usize, to: usize, out: &mut Vec<usize>) {
        let s = self.steiner.len();
        let mut cur = from;
        while cur != to {
            let nxt = self.next[cur * s + to];
            out.push(self.inst.edge_between(self.steiner[cur], self.steiner[nxt]).expect("path edge"));
            cur = nxt;
        }
    }

    fn collect_grown(&self, mask: Mask, v: usize, out: &mut Vec<usize>) {
        let s = self.steiner.len();
        let (_, step) = self.grown[mask as usize * s + v].as_ref().expect("reachable state");
        match *step {
            Step::Attach { p, at } => {
                let t = self.inst.terminals()[p];
                out.push(self.inst.edge_between(t, self.steiner[at]).expect("attach edge"));
                self.path_edges(at, v, out);
            }
            Step::Grow { from } => {
                self.collect_split(mask, from, out);
                self.path_edges(from, v, out);
            }
            Step::Split { .. } => unreachable!("grown states never split directly"),
        }
    }

    fn collect_split(&self, mask: Mask, v: usize, out: &mut Vec<usize>) {
        let s = self.steiner.len();
        let Some((_, Step::Split { part })) = self.split[mask as usize * s + v] else {
            unreachable!("split state recorded")
        };
        self.collect_grown(part, v, out);
        self.collect_grown(mask ^ part, v, out);
    }

    fn component(&self, mask: Mask) -> Option<FullComponent> {
        let inst = self.inst;
        let s = self.steiner.len();
        let vertices = inst.terminal_mask_vertices(mask);
        let mut best: Option<(Key, Option<usize>)> = None;
        if vertices.len() == 2 {
            if let Some(i) = inst.edge_between(vertices[0], vertices[1]) {
                best = Some(((self.cost.get(i).clone(), 1), None));
            }
        }
        for v in 0..s {
            if let Some((key, _)) = &self.split[mask as usize * s + v] {
                if best.as_ref().map_or(true, |(b, _)| key < b) {
                    best = Some((key.clone(), Some(v)));
                }
            }
        }
        let (key, center) = best?;
        let mut edges = Vec::new();
        match center {
            None => edges.push(inst.edge_between(vertices[0], vertices[1]).unwrap()),
            Some(v) => self.collect_split(mask, v, &mut edges),
        }
        edges.sort_unstable();
        edges.dedup();
        let witness = tidy_tree(inst, self.cost, edges);
        let fc = FullComponent { terminals: mask, vertices, cost: self.cost.total(&witness), witness };
        debug_assert!(fc.cost <= key.0);
        Some(fc)
    }
}

/// Turns a connected edge set into a tree: spanning forest, then repeatedly
/// drop Steiner leaves.
pub(crate) fn tidy_tree(inst: &Instance, cost: &CostFunction, edges: Vec<usize>) -> Vec<usize> {
    let n = inst.num_vertices();
    let mut vertices = std::collections::BTreeSet::new();
    for &i in &edges {
        vertices.insert(inst.edge(i).u);
        vertices.insert(inst.edge(i).v);
    }
    let mut kept = if edges.len() + 1 == vertices.len() {
        edges
    } else {
        let mut uf = UnionFind::new(n);
        kruskal_order(inst, cost, edges).into_iter().filter(|&i| uf.union(inst.edge(i).u, inst.edge(i).v)).collect()
    };
    loop {
        let mut degree = vec![0usize; n];
        for &i in &kept {
            degree[inst.edge(i).u] += 1;
            degree[inst.edge(i).v] += 1;
        }
        let before = kept.len();
        kept.retain(|&i| {
            let e = inst.edge(i);
            !((degree[e.u] == 1 && !inst.is_terminal(e.u)) || (degree[e.v] == 1 && !inst.is_terminal(e.v)))
        });
        if kept.len() == before {
            break;
        }
    }
    kept.sort_unstable();
    kept
}

fn check_size(inst: &Instance) -> Result<()> {
    let k = inst.num_terminals();
    if k > DEFAULT_COMPONENT_CAP {
        return Err(Error::CapExceeded { what: "|R|", actual: k, limit: DEFAULT_COMPONENT_CAP });
    }
    Ok(())
}

/// Minimum full component on the terminal positions `set`, or `None` when no
/// full component spans them.
pub fn min_full_component(inst: &Instance, cost: &CostFunction, set: Mask) -> Result<Option<FullComponent>> {
    check_size(inst)?;
    if set & !bits::full(inst.num_terminals()) != 0 || bits::count(set) < 2 {
        return Err(Error::Invalid("component must be a subset of R with at least two terminals".into()));
    }
    let table = ComponentTable::build(inst, cost, bits::count(set));
    Ok(table.component(set))
}

/// One minimum full component per terminal subset of size `2..=max_size`, in
/// colex order; subsets without a full component are omitted.
pub fn enumerate_full_components(inst: &Instance, cost: &CostFunction, max_size: usize) -> Result<Vec<FullComponent>> {
    check_size(inst)?;
    let table = ComponentTable::build(inst, cost, max_size);
    let k = inst.num_terminals();
    Ok(bits::colex(k)
        .filter(|&m| (2..=max_size).contains(&bits::count(m)))
        .filter_map(|m| table.component(m))
        .collect())
}

/// Witness edges connecting every Steiner vertex of the component to its terminals as cheaply as possible.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LossSet {
    pub edges: Vec<usize>,
    pub cost: Surd,
}

pub fn loss(inst: &Instance, cost: &CostFunction, fc: &FullComponent) -> LossSet {
    let mut uf = UnionFind::new(inst.num_vertices());
    for w in fc.vertices.windows(2) {
        uf.union(w[0], w[1]);
    }
    let mut edges: Vec<usize> = kruskal_order(inst, cost, fc.witness.iter().copied())
        .into_iter()
        .filter(|&i| uf.union(inst.edge(i).u, inst.edge(i).v))
        .collect();
    edges.sort_unstable();
    let cost = cost.total(&edges);
    LossSet { edges, cost }
}

/// Merges the terminals of the component (and nothing else) into one terminal.
pub fn contract_component(inst: &Instance, vertices: &[usize]) -> Contraction {
    inst.contract_vertices(vertices)
}

/// `c(T) - mtst(G/K)` where `T = mtst(G)` and `G/K` merges the terminals `vertices`.
pub fn drop_value(inst: &Instance, cost: &CostFunction, vertices: &[usize]) -> Result<Surd> {
    let before = mtst(inst, cost)?.cost;
    drop_against(inst, cost, &before, vertices)
}

/// Same as [`drop_value`] with the current mtst cost supplied.
pub fn drop_against(inst: &Instance, cost: &CostFunction, mtst_cost: &Surd, vertices: &[usize]) -> Result<Surd> {
    let mut distinct = vertices.to_vec();
    distinct.sort_unstable();
    distinct.dedup();
    if distinct.len() < 2 {
        return Ok(Surd::zero());
    }
    let merged = contract_component(inst, &distinct).instance;
    let after = mtst(&merged, &cost.reapply(&merged))?.cost;
    Ok(mtst_cost - &after)
}

pub fn gain(inst: &Instance, cost: &CostFunction, fc: &FullComponent) -> Result<Surd> {
    Ok(&drop_value(inst, cost, &fc.vertices)? - &fc.cost)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GainlessReport {
    pub gainless: bool,
    /// Index of a component with maximum gain, and that gain.
    #[serde(skip)]
    pub worst: Option<(usize, Surd)>,
}

pub fn is_gainless(inst: &Instance, cost: &CostFunction, components: &[FullComponent]) -> Result<GainlessReport> {
    let base = mtst(inst, cost)?.cost;
    let mut worst: Option<(usize, Surd)> = None;
    for (i, fc) in components.iter().enumerate() {
        let g = &drop_against(inst, cost, &base, &fc.vertices)? - &fc.cost;
        if worst.as_ref().map_or(true, |(_, w)| g > *w) {
            worst = Some((i, g));
        }
    }
    let gainless = worst.as_ref().map_or(true, |(_, g)| !g.is_positive());
    Ok(GainlessReport { gainless, worst })
}

/// `K={1,2,3} cost=3 witness=[(0,1),(0,2),(0,3)] loss=1`
pub fn dump_line(inst: &Instance, fc: &FullComponent, loss: &LossSet) -> String {
    let ks: Vec<String> = fc.vertices.iter().map(|v| v.to_string()).collect();
    let ws: Vec<String> = fc.witness.iter().map(|&i| format!("({},{})", inst.edge(i).u, inst.edge(i).v)).collect();
    format!("K={{{}}} cost={} witness=[{}] loss={}", ks.join(","), fc.cost, ws.join(","), loss.cost)
}
