//! Observed labeled graphs and cluster assignments.

use crate::error::{Error, Result};

/// Sparse record of the non-zero labels observed between items.
///
/// Label 0 is never stored: any pair absent from the graph carries label 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelGraph {
    n: usize,
    labels: usize,
    /// Per label `1..=L` (stored at index `l - 1`), sorted pairs `(u, v)` with `u < v`.
    edges: Vec<Vec<(u32, u32)>>,
    offsets: Vec<usize>,
    /// `(neighbor, label)` sorted by neighbor within each item's slice.
    adjacency: Vec<(u32, u32)>,
}

impl LabelGraph {
    /// Builds a graph from `(u, v, label)` triples. Pairs may be given in
    /// either orientation; self-loops, labels outside `1..=L` and repeated
    /// pairs are rejected.
    pub fn from_edges(n: usize, labels: usize, edges: impl IntoIterator<Item = (usize, usize, usize)>) -> Result<Self> {
        if n > u32::MAX as usize {
            return Err(Error::InvalidGraph(format!("n = {n} exceeds the index range")));
        }
        let mut per_label = vec![Vec::new(); labels];
        let mut degree = vec![0usize; n];
        for (u, v, l) in edges {
            if u >= n || v >= n {
                return Err(Error::InvalidGraph(format!("pair ({u},{v}) outside 0..{n}")));
            }
            if u == v {
                return Err(Error::InvalidGraph(format!("self-loop on item {u}")));
            }
            if l == 0 || l > labels {
                return Err(Error::InvalidGraph(format!("label {l} outside 1..={labels}")));
            }
            let (a, b) = if u < v { (u, v) } else { (v, u) };
            per_label[l - 1].push((a as u32, b as u32));
            degree[a] += 1;
            degree[b] += 1;
        }
        for list in &mut per_label {
            list.sort_unstable();
        }

        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0);
        for d in &degree {
            offsets.push(offsets.last().unwrap() + d);
        }
        let mut fill = offsets[..n].to_vec();
        let mut adjacency = vec![(0u32, 0u32); offsets[n]];
        for (idx, list) in per_label.iter().enumerate() {
            let l = (idx + 1) as u32;
            for &(a, b) in list {
                adjacency[fill[a as usize]] = (b, l);
                fill[a as usize] += 1;
                adjacency[fill[b as usize]] = (a, l);
                fill[b as usize] += 1;
            }
        }
        for v in 0..n {
            let slice = &mut adjacency[offsets[v]..offsets[v + 1]];
            slice.sort_unstable();
            if let Some(w) = slice.windows(2).find(|w| w[0].0 == w[1].0) {
                return Err(Error::InvalidGraph(format!("pair ({v},{}) carries two labels", w[0].0)));
            }
        }
        Ok(Self { n, labels, edges: per_label, offsets, adjacency })
    }

    /// A graph with no labeled pairs.
    pub fn empty(n: usize, labels: usize) -> Self {
        Self::from_edges(n, labels, std::iter::empty()).expect("empty graph is valid")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of non-zero labels `L`.
    pub fn labels(&self) -> usize {
        self.labels
    }

    /// Total number of labeled pairs.
    pub fn edge_count(&self) -> usize {
        self.adjacency.len() / 2
    }

    /// Sorted pairs carrying label `l` (`1..=L`).
    pub fn edges(&self, l: usize) -> &[(u32, u32)] {
        &self.edges[l - 1]
    }

    /// All labeled pairs as `(u, v, label)` with `u < v`, grouped by label.
    pub fn iter_edges(&self) -> impl Iterator<Item = (usize, usize, usize)> + '_ {
        self.edges
            .iter()
            .enumerate()
            .flat_map(|(i, list)| list.iter().map(move |&(u, v)| (u as usize, v as usize, i + 1)))
    }

    /// Labeled neighbors of `v` as `(neighbor, label)`, sorted by neighbor.
    pub fn neighbors(&self, v: usize) -> &[(u32, u32)] {
        &self.adjacency[self.offsets[v]..self.offsets[v + 1]]
    }

    /// Number of labeled pairs containing `v`, i.e. `e(v, V)`.
    pub fn degree(&self, v: usize) -> usize {
        self.offsets[v + 1] - self.offsets[v]
    }

    /// Observed label of the pair `(u, v)`; 0 when unlabeled.
    pub fn label(&self, u: usize, v: usize) -> usize {
        let nb = self.neighbors(u);
        match nb.binary_search_by_key(&(v as u32), |&(w, _)| w) {
            Ok(i) => nb[i].1 as usize,
            Err(_) => 0,
        }
    }

    /// The graph with items renamed by `perm` (item `v` becomes `perm[v]`).
    pub fn relabel_items(&self, perm: &[usize]) -> Result<Self> {
        Self::from_edges(self.n, self.labels, self.iter_edges().map(|(u, v, l)| (perm[u], perm[v], l)))
    }
}

/// Assignment of `n` items to clusters `0..k_hat`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    assignment: Vec<usize>,
    k_hat: usize,
}

impl Partition {
    pub fn new(assignment: Vec<usize>, k_hat: usize) -> Result<Self> {
        if k_hat == 0 && !assignment.is_empty() {
            return Err(Error::InvalidPartition("k_hat must be positive".into()));
        }
        if let Some((v, &k)) = assignment.iter().enumerate().find(|(_, &k)| k >= k_hat) {
            return Err(Error::InvalidPartition(format!("item {v} in cluster {k} >= k_hat {k_hat}")));
        }
        Ok(Self { assignment, k_hat })
    }

    /// Partition whose cluster count is one more than the largest index used.
    pub fn from_assignment(assignment: Vec<usize>) -> Self {
        let k_hat = assignment.iter().max().map_or(1, |m| m + 1);
        Self { assignment, k_hat }
    }

    pub fn n(&self) -> usize {
        self.assignment.len()
    }

    pub fn k_hat(&self) -> usize {
        self.k_hat
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    pub fn cluster_of(&self, v: usize) -> usize {
        self.assignment[v]
    }

    pub fn sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.k_hat];
        for &k in &self.assignment {
            sizes[k] += 1;
        }
        sizes
    }

    pub fn members(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.k_hat];
        for (v, &k) in self.assignment.iter().enumerate() {
            out[k].push(v);
        }
        out
    }

    /// True when some cluster index in `0..k_hat` has no member.
    pub fn is_degenerate(&self) -> bool {
        self.sizes().contains(&0)
    }

    /// Renames cluster `k` to `map[k]`.
    pub fn relabel(&self, map: &[usize]) -> Result<Self> {
        let k_hat = map.iter().max().map_or(0, |m| m + 1).max(self.k_hat);
        Self::new(self.assignment.iter().map(|&k| map[k]).collect(), k_hat)
    }

    /// Drops empty clusters, keeping the relative order of the others.
    pub fn compact(&self) -> Self {
        let sizes = self.sizes();
        let mut map = vec![0; self.k_hat];
        let mut next = 0;
        for (k, &s) in sizes.iter().enumerate() {
            if s > 0 {
                map[k] = next;
                next += 1;
            }
        }
        Self {
            assignment: self.assignment.iter().map(|&k| map[k]).collect(),
            k_hat: next.max(1),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn adjacency_and_labels() {
        let g = LabelGraph::from_edges(5, 2, [(0, 1, 1), (3, 1, 2), (2, 4, 1)]).unwrap();
        assert_eq!(g.edge_count(), 3);
        assert_eq!(g.neighbors(1), &[(0, 1), (3, 2)]);
        assert_eq!(g.label(1, 3), 2);
        assert_eq!(g.label(3, 1), 2);
        assert_eq!(g.label(0, 4), 0);
        assert_eq!(g.edges(2), &[(1, 3)]);
        assert_eq!(g.degree(1), 2);
    }

    #[test]
    fn rejects_malformed_edges() {
        assert!(LabelGraph::from_edges(3, 1, [(1, 1, 1)]).is_err());
        assert!(LabelGraph::from_edges(3, 1, [(0, 3, 1)]).is_err());
        assert!(LabelGraph::from_edges(3, 1, [(0, 1, 2)]).is_err());
        assert!(LabelGraph::from_edges(3, 1, [(0, 1, 0)]).is_err());
        assert!(LabelGraph::from_edges(3, 2, [(0, 1, 1), (1, 0, 2)]).is_err());
    }

    #[test]
    fn partition_basics() {
        let p = Partition::new(vec![0, 2, 2, 0], 3).unwrap();
        assert!(p.is_degenerate());
        assert_eq!(p.sizes(), vec![2, 0, 2]);
        let c = p.compact();
        assert_eq!(c.assignment(), &[0, 1, 1, 0]);
        assert_eq!(c.k_hat(), 2);
        assert!(Partition::new(vec![0, 3], 3).is_err());
    }
}
