//! Small helpers for subsets encoded as `u64` bit masks.

pub type Mask = u64;

pub fn bit(i: usize) -> Mask {
    1u64 << i
}

pub fn contains(mask: Mask, i: usize) -> bool {
    mask >> i & 1 == 1
}

pub fn count(mask: Mask) -> usize {
    mask.count_ones() as usize
}

pub fn full(n: usize) -> Mask {
    if n == 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

pub fn elements(mask: Mask) -> impl Iterator<Item = usize> {
    let mut rest = mask;
    std::iter::from_fn(move || {
        if rest == 0 {
            return None;
        }
        let i = rest.trailing_zeros() as usize;
        rest &= rest - 1;
        Some(i)
    })
}

pub fn from_elements<I: IntoIterator<Item = usize>>(items: I) -> Mask {
    items.into_iter().fold(0, |m, i| m | bit(i))
}

/// Nonempty proper submasks of `mask`, in decreasing numeric order.
pub fn proper_submasks(mask: Mask) -> impl Iterator<Item = Mask> {
    let mut sub = mask;
    std::iter::from_fn(move || {
        sub = (sub.wrapping_sub(1)) & mask;
        (sub != 0).then_some(sub)
    })
}

/// All subsets of `{0..n}` in colex order, which for bit masks is numeric order.
pub fn colex(n: usize) -> impl Iterator<Item = Mask> {
    0..=full(n)
}

#[derive(Clone, Debug)]
pub struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl UnionFind {
    pub fn new(n: usize) -> UnionFind {
        UnionFind { parent: (0..n).collect(), size: vec![1; n] }
    }

    pub fn find(&mut self, x: usize) -> usize {
        let mut root = x;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        let mut cur = x;
        while self.parent[cur] != root {
            let next = self.parent[cur];
            self.parent[cur] = root;
            cur = next;
        }
        root
    }

    /// Returns false when `a` and `b` were already joined.
    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        if self.size[ra] < self.size[rb] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra;
        self.size[ra] += self.size[rb];
        true
    }

    pub fn same(&mut self, a: usize, b: usize) -> bool {
        self.find(a) == self.find(b)
    }
}
