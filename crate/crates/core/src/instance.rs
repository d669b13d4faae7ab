//! Steiner tree instances, metric closure, terminal spanning trees and contraction.

use std::fmt::Write as _;

use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::bits::UnionFind;
use crate::error::{Error, Result};
use crate::ring::{parse_rational, Rational, Surd};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Edge {
    /// Smaller endpoint.
    pub u: usize,
    pub v: usize,
    pub cost: Rational,
    /// Endpoints in the instance this one was derived from by contraction.
    pub origin: (usize, usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum InstanceClass {
    General,
    Quasibipartite,
    UniformlyQuasibipartite,
}

impl InstanceClass {
    pub fn is_quasibipartite(&self) -> bool {
        !matches!(self, InstanceClass::General)
    }

    pub fn name(&self) -> &'static str {
        match self {
            InstanceClass::General => "general",
            InstanceClass::Quasibipartite => "quasibipartite",
            InstanceClass::UniformlyQuasibipartite => "uniformly_quasibipartite",
        }
    }
}

/// Undirected graph with nonnegative rational costs, a terminal set and a root terminal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Instance {
    labels: Vec<usize>,
    edges: Vec<Edge>,
    index: Vec<Option<usize>>,
    terminals: Vec<usize>,
    is_terminal: Vec<bool>,
    position: Vec<Option<usize>>,
    root: usize,
}

impl Instance {
    /// `terminals` lists the root first; the stored terminal list is sorted.
    pub fn new(n: usize, edges: Vec<(usize, usize, Rational)>, terminals: Vec<usize>) -> Result<Instance> {
        let labels = (0..n).collect();
        let edges = edges
            .into_iter()
            .map(|(u, v, cost)| {
                let (u, v) = (u.min(v), u.max(v));
                Edge { u, v, cost, origin: (u, v) }
            })
            .collect();
        Instance::assemble(labels, edges, terminals)
    }

    fn assemble(labels: Vec<usize>, edges: Vec<Edge>, terminals: Vec<usize>) -> Result<Instance> {
        let n = labels.len();
        if n > 64 {
            return Err(Error::CapExceeded { what: "|V|", actual: n, limit: 64 });
        }
        let root = *terminals.first().ok_or_else(|| Error::Invalid("terminal set is empty".into()))?;
        let mut index = vec![None; n * n];
        for (i, e) in edges.iter().enumerate() {
            if e.u >= n || e.v >= n {
                return Err(Error::Invalid(format!("edge ({}, {}) has an endpoint outside 0..{n}", e.u, e.v)));
            }
            if e.u == e.v {
                return Err(Error::Invalid(format!("self-loop at vertex {}", e.u)));
            }
            if e.cost.is_negative() {
                return Err(Error::Invalid(format!("edge ({}, {}) has negative cost", e.u, e.v)));
            }
            if index[e.u * n + e.v].is_some() {
                return Err(Error::Invalid(format!("duplicate edge ({}, {})", e.u, e.v)));
            }
            index[e.u * n + e.v] = Some(i);
            index[e.v * n + e.u] = Some(i);
        }
        let mut is_terminal = vec![false; n];
        for &t in &terminals {
            if t >= n {
                return Err(Error::Invalid(format!("terminal {t} outside 0..{n}")));
            }
            if is_terminal[t] {
                return Err(Error::Invalid(format!("terminal {t} listed twice")));
            }
            is_terminal[t] = true;
        }
        let mut sorted = terminals;
        sorted.sort_unstable();
        let mut position = vec![None; n];
        for (p, &t) in sorted.iter().enumerate() {
            position[t] = Some(p);
        }
        Ok(Instance { labels, edges, index, terminals: sorted, is_terminal, position, root })
    }

    pub fn num_vertices(&self) -> usize {
        self.labels.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, i: usize) -> &Edge {
        &self.edges[i]
    }

    pub fn edge_between(&self, u: usize, v: usize) -> Option<usize> {
        self.index[u * self.num_vertices() + v]
    }

    pub fn cost_between(&self, u: usize, v: usize) -> Option<&Rational> {
        self.edge_between(u, v).map(|i| &self.edges[i].cost)
    }

    /// Sorted terminal list; bit `p` of a terminal mask refers to `terminals()[p]`.
    pub fn terminals(&self) -> &[usize] {
        &self.terminals
    }

    pub fn num_terminals(&self) -> usize {
        self.terminals.len()
    }

    pub fn is_terminal(&self, v: usize) -> bool {
        self.is_terminal[v]
    }

    pub fn terminal_position(&self, v: usize) -> Option<usize> {
        self.position[v]
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn root_position(&self) -> usize {
        self.position[self.root].expect("root is a terminal")
    }

    pub fn steiner_vertices(&self) -> Vec<usize> {
        (0..self.num_vertices()).filter(|&v| !self.is_terminal[v]).collect()
    }

    /// Original vertex id represented by `v` (the minimum id of its contraction class).
    pub fn label(&self, v: usize) -> usize {
        self.labels[v]
    }

    pub fn neighbors(&self, v: usize) -> Vec<usize> {
        (0..self.num_vertices()).filter(|&u| self.edge_between(v, u).is_some()).collect()
    }

    pub fn terminal_mask_vertices(&self, mask: u64) -> Vec<usize> {
        crate::bits::elements(mask).map(|p| self.terminals[p]).collect()
    }

    /// Copy of the instance with a different root terminal.
    pub fn with_root(&self, root: usize) -> Result<Instance> {
        if !self.is_terminal(root) {
            return Err(Error::Invalid(format!("vertex {root} is not a terminal")));
        }
        let mut copy = self.clone();
        copy.root = root;
        Ok(copy)
    }

    pub fn is_connected(&self) -> bool {
        let n = self.num_vertices();
        let mut uf = UnionFind::new(n);
        let mut parts = n;
        for e in &self.edges {
            if uf.union(e.u, e.v) {
                parts -= 1;
            }
        }
        parts <= 1
    }

    /// Parses the `steiner <|V|> <|E|> <|R|>` text format.
    pub fn parse(text: &str) -> Result<Instance> {
        let perr = |line: usize, message: String| Error::Parse { line, message };
        let mut header: Option<(usize, usize, usize, usize)> = None;
        let mut edges = Vec::new();
        let mut terminals: Option<Vec<usize>> = None;
        for (lineno, raw) in text.lines().enumerate() {
            let line = lineno + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let tokens: Vec<&str> = content.split_whitespace().collect();
            let number = |tok: &str| -> Result<usize> {
                tok.parse::<usize>().map_err(|_| perr(line, format!("expected a nonnegative integer, found {tok:?}")))
            };
            match tokens[0] {
                "steiner" => {
                    if header.is_some() {
                        return Err(perr(line, "duplicate header".into()));
                    }
                    if tokens.len() != 4 {
                        return Err(perr(line, "header must be `steiner <|V|> <|E|> <|R|>`".into()));
                    }
                    header = Some((number(tokens[1])?, number(tokens[2])?, number(tokens[3])?, line));
                }
                "e" => {
                    let (n, _, _, _) = header.ok_or_else(|| perr(line, "edge before header".into()))?;
                    if tokens.len() != 4 {
                        return Err(perr(line, "edge line must be `e u v cost`".into()));
                    }
                    let (u, v) = (number(tokens[1])?, number(tokens[2])?);
                    if u >= n || v >= n {
                        return Err(perr(line, format!("vertex out of range 0..{n}")));
                    }
                    if u == v {
                        return Err(perr(line, "self-loop".into()));
                    }
                    let cost = parse_rational(tokens[3])
                        .ok_or_else(|| perr(line, format!("bad cost {:?}", tokens[3])))?;
                    if cost.is_negative() {
                        return Err(perr(line, "negative cost".into()));
                    }
                    edges.push((u, v, cost, line));
                }
                "terminals" => {
                    let (n, _, _, _) = header.ok_or_else(|| perr(line, "terminals before header".into()))?;
                    if terminals.is_some() {
                        return Err(perr(line, "duplicate terminals line".into()));
                    }
                    let list = tokens[1..].iter().map(|t| number(t)).collect::<Result<Vec<_>>>()?;
                    if let Some(&bad) = list.iter().find(|&&t| t >= n) {
                        return Err(perr(line, format!("terminal {bad} out of range 0..{n}")));
                    }
                    terminals = Some(list);
                }
                other => return Err(perr(line, format!("unknown record {other:?}"))),
            }
        }
        let (n, m, k, header_line) = header.ok_or_else(|| perr(1, "missing `steiner` header".into()))?;
        if edges.len() != m {
            return Err(perr(header_line, format!("header declares {m} edges, found {}", edges.len())));
        }
        let terminals = terminals.ok_or_else(|| perr(header_line, "missing `terminals` line".into()))?;
        if terminals.len() != k {
            return Err(perr(header_line, format!("header declares {k} terminals, found {}", terminals.len())));
        }
        if k == 0 {
            return Err(perr(header_line, "terminal set is empty".into()));
        }
        let mut seen = std::collections::HashMap::new();
        for (u, v, _, line) in &edges {
            if let Some(first) = seen.insert((*u.min(v), *u.max(v)), *line) {
                return Err(perr(*line, format!("duplicate edge ({u}, {v}), first on line {first}")));
            }
        }
        Instance::new(n, edges.into_iter().map(|(u, v, c, _)| (u, v, c)).collect(), terminals)
    }

    /// Serializes in the text format; the root is listed first.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        writeln!(out, "steiner {} {} {}", self.num_vertices(), self.edges.len(), self.terminals.len()).unwrap();
        for e in &self.edges {
            writeln!(out, "e {} {} {}", e.u, e.v, e.cost).unwrap();
        }
        let mut ids = vec![self.root];
        ids.extend(self.terminals.iter().copied().filter(|&t| t != self.root));
        let ids: Vec<String> = ids.iter().map(|t| t.to_string()).collect();
        writeln!(out, "terminals {}", ids.join(" ")).unwrap();
        out
    }

    /// Complete graph whose costs are shortest-path distances.
    pub fn metric_closure(&self) -> Result<Instance> {
        let n = self.num_vertices();
        let mut dist: Vec<Option<Rational>> = vec![None; n * n];
        for v in 0..n {
            dist[v * n + v] = Some(Rational::zero());
        }
        for e in &self.edges {
            let slot = &mut dist[e.u * n + e.v];
            if slot.as_ref().map_or(true, |d| e.cost < *d) {
                *slot = Some(e.cost.clone());
                dist[e.v * n + e.u] = Some(e.cost.clone());
            }
        }
        for k in 0..n {
            for i in 0..n {
                let Some(dik) = dist[i * n + k].clone() else { continue };
                for j in 0..n {
                    let Some(dkj) = &dist[k * n + j] else { continue };
                    let through = &dik + dkj;
                    let slot = &mut dist[i * n + j];
                    if slot.as_ref().map_or(true, |d| through < *d) {
                        *slot = Some(through);
                    }
                }
            }
        }
        let mut edges = Vec::with_capacity(n * (n - 1) / 2);
        for u in 0..n {
            for v in u + 1..n {
                let cost = dist[u * n + v].clone().ok_or(Error::Disconnected)?;
                edges.push(Edge { u, v, cost, origin: (u, v) });
            }
        }
        let mut terminals = vec![self.root];
        terminals.extend(self.terminals.iter().copied().filter(|&t| t != self.root));
        Instance::assemble(self.labels.clone(), edges, terminals)
    }

    /// Classification of the graph as given (call before metric closure).
    pub fn classify(&self) -> InstanceClass {
        let mut spoke_cost: Vec<Option<&Rational>> = vec![None; self.num_vertices()];
        let mut uniform = true;
        for e in &self.edges {
            let (su, sv) = (!self.is_terminal[e.u], !self.is_terminal[e.v]);
            if su && sv {
                return InstanceClass::General;
            }
            let s = if su { e.u } else if sv { e.v } else { continue };
            match spoke_cost[s] {
                None => spoke_cost[s] = Some(&e.cost),
                Some(c) if *c != e.cost => uniform = false,
                _ => {}
            }
        }
        if uniform {
            InstanceClass::UniformlyQuasibipartite
        } else {
            InstanceClass::Quasibipartite
        }
    }

    /// Merges every group of vertices into one vertex.
    ///
    /// A merged vertex is a terminal iff some member is; parallel edges keep
    /// the cheapest copy and self-loops disappear.
    pub fn contract_groups(&self, groups: &[Vec<usize>]) -> Contraction {
        let n = self.num_vertices();
        let mut uf = UnionFind::new(n);
        for g in groups {
            for w in g.windows(2) {
                uf.union(w[0], w[1]);
            }
        }
        let mut min_label = vec![usize::MAX; n];
        for v in 0..n {
            let r = uf.find(v);
            min_label[r] = min_label[r].min(self.labels[v]);
        }
        let mut reps: Vec<usize> = (0..n).filter(|&v| uf.find(v) == v).collect();
        reps.sort_by_key(|&r| min_label[r]);
        let mut new_id = vec![0; n];
        for (i, &r) in reps.iter().enumerate() {
            new_id[r] = i;
        }
        let class_of: Vec<usize> = (0..n).map(|v| new_id[uf.find(v)]).collect();
        let m = reps.len();
        let labels: Vec<usize> = reps.iter().map(|&r| min_label[r]).collect();
        let mut best: Vec<Option<usize>> = vec![None; m * m];
        for (i, e) in self.edges.iter().enumerate() {
            let (a, b) = (class_of[e.u], class_of[e.v]);
            if a == b {
                continue;
            }
            let slot = &mut best[a.min(b) * m + a.max(b)];
            let better = match *slot {
                None => true,
                Some(j) => {
                    let f = &self.edges[j];
                    (&e.cost, e.origin) < (&f.cost, f.origin)
                }
            };
            if better {
                *slot = Some(i);
            }
        }
        let mut edges = Vec::new();
        for a in 0..m {
            for b in a + 1..m {
                if let Some(i) = best[a * m + b] {
                    let e = &self.edges[i];
                    edges.push(Edge { u: a, v: b, cost: e.cost.clone(), origin: e.origin });
                }
            }
        }
        let mut terminal_classes = vec![class_of[self.root]];
        for &t in &self.terminals {
            let c = class_of[t];
            if !terminal_classes.contains(&c) {
                terminal_classes.push(c);
            }
        }
        let instance = Instance::assemble(labels, edges, terminal_classes).expect("contraction preserves validity");
        Contraction { instance, class_of }
    }

    /// Merges the given vertex set into a single vertex.
    pub fn contract_vertices(&self, vertices: &[usize]) -> Contraction {
        self.contract_groups(&[vertices.to_vec()])
    }

    /// Contracts the listed edges.
    pub fn contract_edges(&self, edge_ids: &[usize]) -> Contraction {
        let groups: Vec<Vec<usize>> = edge_ids.iter().map(|&i| vec![self.edges[i].u, self.edges[i].v]).collect();
        self.contract_groups(&groups)
    }
}

/// Result of a contraction: the new instance and the class of every old vertex.
#[derive(Clone, Debug)]
pub struct Contraction {
    pub instance: Instance,
    pub class_of: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum CostKind {
    Original,
    /// Terminal-terminal edges divided by the given ring element.
    Reduced { divisor: String },
}

/// Per-edge costs over an instance, possibly irrational.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CostFunction {
    pub values: Vec<Surd>,
    pub divisor: Option<Surd>,
}

impl CostFunction {
    pub fn original(inst: &Instance) -> CostFunction {
        CostFunction { values: inst.edges.iter().map(|e| Surd::from(&e.cost)).collect(), divisor: None }
    }

    pub fn kind(&self) -> CostKind {
        match &self.divisor {
            None => CostKind::Original,
            Some(d) => CostKind::Reduced { divisor: d.to_string() },
        }
    }

    /// The same rule evaluated on another instance (for example a contraction).
    pub fn reapply(&self, inst: &Instance) -> CostFunction {
        match &self.divisor {
            None => CostFunction::original(inst),
            Some(d) => reduce_terminal_costs(inst, d).expect("divisor already validated"),
        }
    }

    pub fn get(&self, edge: usize) -> &Surd {
        &self.values[edge]
    }

    pub fn total(&self, edges: &[usize]) -> Surd {
        edges.iter().map(|&i| &self.values[i]).sum()
    }
}

/// `c'` with every terminal-terminal edge divided by `divisor`.
pub fn reduce_terminal_costs(inst: &Instance, divisor: &Surd) -> Result<CostFunction> {
    if *divisor <= Surd::one() {
        return Err(Error::Invalid(format!("divisor {divisor} must exceed 1")));
    }
    let inverse = divisor.recip();
    let values = inst
        .edges
        .iter()
        .map(|e| {
            let c = Surd::from(&e.cost);
            if inst.is_terminal(e.u) && inst.is_terminal(e.v) {
                &c * &inverse
            } else {
                c
            }
        })
        .collect();
    Ok(CostFunction { values, divisor: Some(divisor.clone()) })
}

/// Edge subset of an instance with its total cost under some cost function.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tree {
    pub edges: Vec<usize>,
    pub cost: Surd,
}

impl Tree {
    pub fn endpoints(&self, inst: &Instance) -> Vec<(usize, usize)> {
        self.edges.iter().map(|&i| (inst.edge(i).u, inst.edge(i).v)).collect()
    }

    /// True iff the edges form a tree whose vertex set contains `required`.
    pub fn spans(&self, inst: &Instance, required: &[usize]) -> bool {
        let n = inst.num_vertices();
        let mut uf = UnionFind::new(n);
        let mut touched = vec![false; n];
        for &i in &self.edges {
            let e = inst.edge(i);
            if !uf.union(e.u, e.v) {
                return false;
            }
            touched[e.u] = true;
            touched[e.v] = true;
        }
        if self.edges.is_empty() {
            return required.len() <= 1;
        }
        let comp = uf.find(inst.edge(self.edges[0]).u);
        required.iter().all(|&v| touched[v])
            && (0..n).filter(|&v| touched[v]).all(|v| uf.find(v) == comp)
    }
}

/// Kruskal order: cost, then smaller endpoint, then larger endpoint.
pub fn kruskal_order(inst: &Instance, cost: &CostFunction, edge_ids: impl IntoIterator<Item = usize>) -> Vec<usize> {
    let mut ids: Vec<usize> = edge_ids.into_iter().collect();
    ids.sort_by(|&a, &b| {
        let (ea, eb) = (inst.edge(a), inst.edge(b));
        cost.get(a).cmp(cost.get(b)).then((ea.u, ea.v).cmp(&(eb.u, eb.v)))
    });
    ids
}

pub fn terminal_edges(inst: &Instance) -> impl Iterator<Item = usize> + '_ {
    inst.edges.iter().enumerate().filter(|(_, e)| inst.is_terminal(e.u) && inst.is_terminal(e.v)).map(|(i, _)| i)
}

/// Minimum spanning tree of the terminal-induced subgraph.
pub fn mtst(inst: &Instance, cost: &CostFunction) -> Result<Tree> {
    let order = kruskal_order(inst, cost, terminal_edges(inst));
    let mut uf = UnionFind::new(inst.num_vertices());
    let mut edges = Vec::new();
    let mut total = Surd::zero();
    for i in order {
        let e = inst.edge(i);
        if uf.union(e.u, e.v) {
            total = &total + cost.get(i);
            edges.push(i);
        }
    }
    if edges.len() + 1 != inst.num_terminals() {
        return Err(Error::TerminalsDisconnected);
    }
    Ok(Tree { edges, cost: total })
}

/// Minimum spanning forest over an arbitrary edge subset, Kruskal order.
pub fn spanning_forest(inst: &Instance, cost: &CostFunction, edge_ids: &[usize]) -> Vec<usize> {
    let mut uf = UnionFind::new(inst.num_vertices());
    kruskal_order(inst, cost, edge_ids.iter().copied())
        .into_iter()
        .filter(|&i| uf.union(inst.edge(i).u, inst.edge(i).v))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::integer;

    pub(crate) fn star() -> Instance {
        // Steiner vertex 0, terminals 1, 2, 3.
        Instance::new(4, vec![(0, 1, integer(1)), (0, 2, integer(1)), (0, 3, integer(1))], vec![1, 2, 3]).unwrap()
    }

    /// All-pairs shortest paths by repeated relaxation, independent of Floyd-Warshall.
    fn bellman_distances(inst: &Instance, source: usize) -> Vec<Option<Rational>> {
        let n = inst.num_vertices();
        let mut d = vec![None; n];
        d[source] = Some(Rational::zero());
        for _ in 0..n {
            for e in inst.edges() {
                for (a, b) in [(e.u, e.v), (e.v, e.u)] {
                    if let Some(da) = d[a].clone() {
                        let cand = da + &e.cost;
                        if d[b].as_ref().map_or(true, |x| cand < *x) {
                            d[b] = Some(cand);
                        }
                    }
                }
            }
        }
        d
    }

    #[test]
    fn closure_of_path_adds_shortcut() {
        let path = Instance::new(3, vec![(0, 1, integer(1)), (1, 2, integer(1))], vec![0, 2]).unwrap();
        let c = path.metric_closure().unwrap();
        assert_eq!(c.cost_between(0, 2), Some(&integer(2)));
        assert_eq!(c.metric_closure().unwrap(), c);
    }

    #[test]
    fn closure_of_star_matches_shortest_paths() {
        let s = star();
        let c = s.metric_closure().unwrap();
        for u in 0..4 {
            let d = bellman_distances(&s, u);
            for v in 0..4 {
                if u != v {
                    assert_eq!(c.cost_between(u, v), d[v].as_ref());
                }
            }
        }
        assert_eq!(c.cost_between(1, 2), Some(&integer(2)));
    }

    #[test]
    fn disconnected_closure_fails() {
        let inst = Instance::new(4, vec![(0, 1, integer(1)), (2, 3, integer(1))], vec![0, 3]).unwrap();
        assert_eq!(inst.metric_closure(), Err(Error::Disconnected));
    }

    #[test]
    fn classification() {
        assert_eq!(star().classify(), InstanceClass::UniformlyQuasibipartite);
        let two_steiner = Instance::new(4, vec![(0, 1, integer(1)), (1, 2, integer(1)), (2, 3, integer(1))], vec![0, 3]).unwrap();
        assert_eq!(two_steiner.classify(), InstanceClass::General);
        let uneven = Instance::new(4, vec![(0, 1, integer(1)), (0, 2, integer(1)), (0, 3, integer(2))], vec![1, 2, 3]).unwrap();
        assert_eq!(uneven.classify(), InstanceClass::Quasibipartite);
    }

    #[test]
    fn mtst_on_star_closure() {
        let c = star().metric_closure().unwrap();
        let t = mtst(&c, &CostFunction::original(&c)).unwrap();
        assert_eq!(t.cost, Surd::from_integer(4));
        assert_eq!(t.endpoints(&c), vec![(1, 2), (1, 3)]);
        let unit_path = Instance::new(
            4,
            vec![(0, 1, integer(1)), (1, 2, integer(1)), (2, 3, integer(1))],
            vec![0, 1, 2, 3],
        )
        .unwrap()
        .metric_closure()
        .unwrap();
        let t = mtst(&unit_path, &CostFunction::original(&unit_path)).unwrap();
        assert_eq!(t.cost, Surd::from_integer(3));
        assert_eq!(t.endpoints(&unit_path), vec![(0, 1), (1, 2), (2, 3)]);
    }

    #[test]
    fn contraction_merges_and_keeps_cheapest() {
        let c = star().metric_closure().unwrap();
        let all = c.contract_vertices(&[1, 2, 3]);
        assert_eq!(all.instance.num_terminals(), 1);
        let t = mtst(&all.instance, &CostFunction::original(&all.instance)).unwrap();
        assert_eq!(t.cost, Surd::zero());
        let spoke = c.contract_edges(&[c.edge_between(0, 1).unwrap()]);
        assert_eq!(spoke.instance.num_terminals(), 3);
        assert_eq!(spoke.instance.num_vertices(), 3);
        assert!(spoke.instance.steiner_vertices().is_empty());
        // merged {0,1} is adjacent to 2 with min(1, 2) = 1
        assert_eq!(spoke.instance.cost_between(spoke.class_of[1], spoke.class_of[2]), Some(&integer(1)));
        let none = c.contract_groups(&[]);
        assert_eq!(none.instance, c);
    }

    #[test]
    fn reduced_costs_touch_only_terminal_edges() {
        let c = star().metric_closure().unwrap();
        let r = reduce_terminal_costs(&c, &Surd::sqrt(2)).unwrap();
        assert_eq!(r.get(c.edge_between(1, 2).unwrap()), &Surd::sqrt(2));
        assert_eq!(r.get(c.edge_between(0, 1).unwrap()), &Surd::one());
        let alpha = Surd::sqrt(3);
        let d = &(&Surd::one() + &alpha) / &Surd::from_integer(2);
        let r = reduce_terminal_costs(&c, &d).unwrap();
        let expected = &Surd::from_integer(4) / &(&Surd::one() + &alpha);
        assert_eq!(r.get(c.edge_between(1, 2).unwrap()), &expected);
        assert!(reduce_terminal_costs(&c, &Surd::one()).is_err());
    }

    #[test]
    fn parse_round_trip_and_errors() {
        let text = "# star\nsteiner 4 3 3\ne 0 1 1\ne 0 2 1/2\ne 0 3 1\nterminals 2 1 3\n";
        let inst = Instance::parse(text).unwrap();
        assert_eq!(inst.root(), 2);
        assert_eq!(Instance::parse(&inst.to_text()).unwrap(), inst);
        let bad = "steiner 3 1 2\ne 0 1 x\nterminals 0 1\n";
        assert_eq!(Instance::parse(bad).unwrap_err(), Error::Parse { line: 2, message: "bad cost \"x\"".into() });
        let wrong_count = "steiner 3 2 2\ne 0 1 1\nterminals 0 1\n";
        assert!(matches!(Instance::parse(wrong_count), Err(Error::Parse { line: 1, .. })));
    }
}
