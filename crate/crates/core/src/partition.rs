//! Partitions of a small ground set `{0, .., n-1}` (terminal positions) and the
//! lattice operations used by the partition LP.

use std::fmt;

use serde::Serialize;

use crate::bits::{self, Mask, UnionFind};
use crate::error::{Error, Result};

pub const DEFAULT_PARTITION_CAP: usize = 9;

/// A set partition in canonical form: blocks as bit masks ordered by their
/// smallest element.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Partition {
    n: usize,
    blocks: Vec<Mask>,
}

impl Partition {
    pub fn new(n: usize, mut blocks: Vec<Mask>) -> Result<Partition> {
        let mut seen: Mask = 0;
        for &b in &blocks {
            if b == 0 {
                return Err(Error::Invalid("empty block".into()));
            }
            if b & seen != 0 {
                return Err(Error::Invalid("blocks overlap".into()));
            }
            seen |= b;
        }
        if seen != bits::full(n) {
            return Err(Error::Invalid(format!("blocks do not cover 0..{n}")));
        }
        blocks.sort_by_key(|b| b.trailing_zeros());
        Ok(Partition { n, blocks })
    }

    fn from_sorted(n: usize, mut blocks: Vec<Mask>) -> Partition {
        blocks.sort_by_key(|b| b.trailing_zeros());
        Partition { n, blocks }
    }

    /// All singletons.
    pub fn singletons(n: usize) -> Partition {
        Partition { n, blocks: (0..n).map(bits::bit).collect() }
    }

    /// The one-block partition.
    pub fn whole(n: usize) -> Partition {
        Partition { n, blocks: if n == 0 { vec![] } else { vec![bits::full(n)] } }
    }

    /// Builds the partition whose block labels are given by a restricted growth string.
    pub fn from_labels(labels: &[usize]) -> Partition {
        let count = labels.iter().copied().max().map_or(0, |m| m + 1);
        let mut blocks = vec![0; count];
        for (i, &l) in labels.iter().enumerate() {
            blocks[l] |= bits::bit(i);
        }
        Partition::from_sorted(labels.len(), blocks.into_iter().filter(|&b| b != 0).collect())
    }

    pub fn ground_size(&self) -> usize {
        self.n
    }

    pub fn blocks(&self) -> &[Mask] {
        &self.blocks
    }

    pub fn rank(&self) -> usize {
        self.blocks.len()
    }

    pub fn block_of(&self, i: usize) -> usize {
        self.blocks.iter().position(|&b| bits::contains(b, i)).expect("element in ground set")
    }

    /// True iff every block of `self` lies inside a block of `other`.
    pub fn refines(&self, other: &Partition) -> bool {
        self.blocks.iter().all(|&b| other.blocks.iter().any(|&c| b & !c == 0))
    }

    /// Coarsest common refinement.
    pub fn meet(&self, other: &Partition) -> Partition {
        let mut blocks = Vec::new();
        for &a in &self.blocks {
            for &b in &other.blocks {
                if a & b != 0 {
                    blocks.push(a & b);
                }
            }
        }
        Partition::from_sorted(self.n, blocks)
    }

    /// Finest common coarsening.
    pub fn join(&self, other: &Partition) -> Partition {
        let mut uf = UnionFind::new(self.n);
        for &b in self.blocks.iter().chain(&other.blocks) {
            let first = b.trailing_zeros() as usize;
            for i in bits::elements(b) {
                uf.union(first, i);
            }
        }
        let mut by_root = vec![0; self.n];
        for i in 0..self.n {
            let r = uf.find(i);
            by_root[r] |= bits::bit(i);
        }
        Partition::from_sorted(self.n, by_root.into_iter().filter(|&b| b != 0).collect())
    }

    /// Merges all blocks that meet `set`.
    pub fn merge(&self, set: Mask) -> Partition {
        let (hit, rest): (Vec<Mask>, Vec<Mask>) = self.blocks.iter().partition(|&&b| b & set != 0);
        if hit.len() <= 1 {
            return self.clone();
        }
        let mut blocks = rest;
        blocks.push(hit.iter().fold(0, |acc, b| acc | b));
        Partition::from_sorted(self.n, blocks)
    }

    /// Number of blocks met by `set`, minus one (0 for the empty set).
    pub fn rank_contribution(&self, set: Mask) -> usize {
        let hit = self.blocks.iter().filter(|&&b| b & set != 0).count();
        let rc = hit.saturating_sub(1);
        debug_assert_eq!(rc, self.rank() - self.merge(set).rank());
        rc
    }

    /// Formats with element `i` printed as `labels[i]`.
    pub fn format_with(&self, labels: &[usize]) -> String {
        let blocks: Vec<String> = self
            .blocks
            .iter()
            .map(|&b| bits::elements(b).map(|i| labels[i].to_string()).collect::<Vec<_>>().join(","))
            .collect();
        format!("{{{}}}", blocks.join("|"))
    }

    /// Parses a literal such as `{1,2|3|4,5}` whose entries are `labels` values.
    pub fn parse_with(text: &str, labels: &[usize]) -> Result<Partition> {
        let bad = |m: &str| Error::Invalid(format!("partition literal {text:?}: {m}"));
        let inner = text
            .trim()
            .strip_prefix('{')
            .and_then(|t| t.strip_suffix('}'))
            .ok_or_else(|| bad("expected braces"))?;
        let mut blocks = Vec::new();
        for block in inner.split('|') {
            let mut mask = 0;
            for item in block.split(',') {
                let id: usize = item.trim().parse().map_err(|_| bad("expected integers"))?;
                let pos = labels.iter().position(|&l| l == id).ok_or_else(|| bad("unknown element"))?;
                mask |= bits::bit(pos);
            }
            blocks.push(mask);
        }
        Partition::new(labels.len(), blocks).map_err(|e| bad(&e.to_string()))
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let labels: Vec<usize> = (0..self.n).collect();
        f.write_str(&self.format_with(&labels))
    }
}

impl Serialize for Partition {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// `max(0, |X| - 1)`.
pub fn set_rank(set: Mask) -> usize {
    bits::count(set).saturating_sub(1)
}

/// Every partition of `{0..n}`, in restricted-growth-string order.
pub fn enumerate_partitions(n: usize, cap: usize) -> Result<Vec<Partition>> {
    if n > cap {
        return Err(Error::CapExceeded { what: "|R|", actual: n, limit: cap });
    }
    if n == 0 {
        return Ok(vec![Partition::whole(0)]);
    }
    let mut out = Vec::new();
    let mut labels = vec![0usize; n];
    // prefix_max[i] = max(labels[0..=i])
    let mut prefix_max = vec![0usize; n];
    loop {
        out.push(Partition::from_labels(&labels));
        // advance to the next restricted growth string
        let mut i = n - 1;
        loop {
            if i == 0 {
                return Ok(out);
            }
            if labels[i] <= prefix_max[i - 1] {
                labels[i] += 1;
                prefix_max[i] = prefix_max[i - 1].max(labels[i]);
                for j in i + 1..n {
                    labels[j] = 0;
                    prefix_max[j] = prefix_max[i];
                }
                break;
            }
            i -= 1;
        }
    }
}

/// Both sides of the two uncrossing relations for a triple `(π, π', K)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct UncrossingReport {
    pub rank_lhs: i64,
    pub rank_rhs: i64,
    pub contribution_lhs: i64,
    pub contribution_rhs: i64,
}

impl UncrossingReport {
    /// Zero exactly when the rank identity holds.
    pub fn rank_residual(&self) -> i64 {
        self.rank_lhs - self.rank_rhs
    }

    /// Nonnegative exactly when the rank-contribution inequality holds.
    pub fn contribution_slack(&self) -> i64 {
        self.contribution_lhs - self.contribution_rhs
    }

    pub fn holds(&self) -> bool {
        self.rank_residual() == 0 && self.contribution_slack() >= 0
    }
}

/// Evaluates
/// `r(π)(r(π')-1) + (r(π)-1) = (r(π∧π')-1) + Σ_i (r(m(π',π_i))-1)` and
/// `r(π) rc_K^{π'} + rc_K^π >= rc_K^{π∧π'} + Σ_i rc_K^{m(π',π_i)}`.
pub fn check_uncrossing(pi: &Partition, pi2: &Partition, k: Mask) -> UncrossingReport {
    let r = pi.rank() as i64;
    let meet = pi.meet(pi2);
    let merged: Vec<Partition> = pi.blocks().iter().map(|&b| pi2.merge(b)).collect();
    let rank_lhs = r * (pi2.rank() as i64 - 1) + (r - 1);
    let rank_rhs = (meet.rank() as i64 - 1) + merged.iter().map(|m| m.rank() as i64 - 1).sum::<i64>();
    let contribution_lhs = r * pi2.rank_contribution(k) as i64 + pi.rank_contribution(k) as i64;
    let contribution_rhs =
        meet.rank_contribution(k) as i64 + merged.iter().map(|m| m.rank_contribution(k) as i64).sum::<i64>();
    UncrossingReport { rank_lhs, rank_rhs, contribution_lhs, contribution_rhs }
}
