//! All non-isomorphic simple graphs on up to seven nodes.

use std::collections::BTreeSet;

use crate::graph::Graph;

const MAX_NODES: usize = 7;

/// Adjacency as bit rows.
#[derive(Clone, Copy)]
struct Small {
    n: usize,
    rows: [u8; MAX_NODES],
}

impl Small {
    fn degree(&self, v: usize) -> u32 {
        self.rows[v].count_ones()
    }

    fn has(&self, u: usize, v: usize) -> bool {
        self.rows[u] >> v & 1 == 1
    }

    /// Upper-triangle bit code under relabelling `perm` (new -> old).
    fn code(&self, perm: &[usize]) -> u32 {
        let mut code = 0u32;
        let mut bit = 0;
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                if self.has(perm[i], perm[j]) {
                    code |= 1 << bit;
                }
                bit += 1;
            }
        }
        code
    }

    /// Canonical code: minimum over relabellings that list vertices by
    /// non-decreasing degree. Isomorphic graphs share it.
    fn canonical(&self) -> u32 {
        let mut order: Vec<usize> = (0..self.n).collect();
        order.sort_by_key(|&v| self.degree(v));
        let mut classes: Vec<(usize, usize)> = Vec::new();
        let mut start = 0;
        for i in 1..=self.n {
            if i == self.n || self.degree(order[i]) != self.degree(order[start]) {
                classes.push((start, i));
                start = i;
            }
        }
        let mut best = u32::MAX;
        permute_classes(self, &mut order, &classes, 0, &mut best);
        best
    }

    fn from_code(n: usize, code: u32) -> Small {
        let mut rows = [0u8; MAX_NODES];
        let mut bit = 0;
        for i in 0..n {
            for j in (i + 1)..n {
                if code >> bit & 1 == 1 {
                    rows[i] |= 1 << j;
                    rows[j] |= 1 << i;
                }
                bit += 1;
            }
        }
        Small { n, rows }
    }

    fn to_graph(self) -> Graph {
        let edges = (0..self.n).flat_map(|i| {
            ((i + 1)..self.n)
                .filter(move |&j| self.has(i, j))
                .map(move |j| (i as u64 + 1, j as u64 + 1))
        });
        Graph::new(1..=self.n as u64, edges).expect("valid small graph")
    }
}

fn permute_classes(g: &Small, order: &mut Vec<usize>, classes: &[(usize, usize)], c: usize, best: &mut u32) {
    if c == classes.len() {
        *best = (*best).min(g.code(order));
        return;
    }
    let (lo, hi) = classes[c];
    permute_range(g, order, classes, c, lo, hi, best);
}

fn permute_range(
    g: &Small,
    order: &mut Vec<usize>,
    classes: &[(usize, usize)],
    c: usize,
    i: usize,
    hi: usize,
    best: &mut u32,
) {
    if i + 1 >= hi {
        permute_classes(g, order, classes, c + 1, best);
        return;
    }
    for j in i..hi {
        order.swap(i, j);
        permute_range(g, order, classes, c, i + 1, hi, best);
        order.swap(i, j);
    }
}

/// One representative per isomorphism class with `min_n <= n <= max_n`
/// nodes (`max_n <= 7`), ordered by size then canonical code. Labels are
/// `1..=n`.
///
/// Counts per size are 1, 2, 4, 11, 34, 156, 1044 for n = 1..7.
pub fn small_graph_corpus(min_n: usize, max_n: usize) -> Vec<Graph> {
    assert!(max_n <= MAX_NODES, "corpus is limited to {MAX_NODES} nodes");
    let mut out = Vec::new();
    let mut current: BTreeSet<u32> = BTreeSet::from([0]);
    for n in 1..=max_n {
        if n > 1 {
            let mut next = BTreeSet::new();
            for &code in &current {
                let base = Small::from_code(n - 1, code);
                for mask in 0u8..(1 << (n - 1)) {
                    let mut g = base;
                    g.n = n;
                    g.rows[n - 1] = mask;
                    for v in 0..(n - 1) {
                        if mask >> v & 1 == 1 {
                            g.rows[v] |= 1 << (n - 1);
                        }
                    }
                    next.insert(g.canonical());
                }
            }
            current = next;
        }
        if n >= min_n {
            out.extend(current.iter().map(|&code| Small::from_code(n, code).to_graph()));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn class_counts() {
        let counts: Vec<usize> = (1..=6).map(|n| small_graph_corpus(n, n).len()).collect();
        assert_eq!(counts, vec![1, 2, 4, 11, 34, 156]);
    }

    #[test]
    fn canonical_is_label_invariant() {
        // path 1-2-3-4 and path 2-4-1-3 are the same class
        let a = Small::from_code(4, 0);
        let mut p = a;
        p.rows = [0b0010, 0b0101, 0b1010, 0b0100, 0, 0, 0];
        let mut q = a;
        // edges 2-4, 4-1, 1-3 on 0-based 1-3, 3-0, 0-2
        q.rows = [0b1100, 0b1000, 0b0001, 0b0011, 0, 0, 0];
        assert_eq!(p.canonical(), q.canonical());
    }
}
