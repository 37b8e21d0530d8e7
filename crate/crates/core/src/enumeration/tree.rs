//! Rooted plane trees with vertex labels.

use serde::{Deserialize, Serialize};

use crate::partitions::Partition;

/// A rooted plane tree in preorder, with one label in `1..=ℓ` per vertex.
///
/// `child_counts[v]` is the number of children of the `v`-th vertex in
/// depth-first (preorder) order; `labels[v]` is its label.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LabelledPlaneTree {
    child_counts: Vec<usize>,
    labels: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TreeError {
    #[error("a tree needs at least one vertex")]
    Empty,
    #[error("{counts} child counts but {labels} labels")]
    LengthMismatch { counts: usize, labels: usize },
    #[error("child-count sequence does not describe a single rooted plane tree")]
    BadStructure,
    #[error("label {label} at vertex {vertex} is outside 1..={max}")]
    LabelOutOfRange { vertex: usize, label: usize, max: usize },
    #[error("edge between vertices {parent} and {child} has labels ({a}, {b}) outside the diagram")]
    BadEdge {
        parent: usize,
        child: usize,
        a: usize,
        b: usize,
    },
}

/// True when `counts` is the preorder child-count sequence of one rooted tree.
pub fn is_valid_structure(counts: &[usize]) -> bool {
    if counts.is_empty() {
        return false;
    }
    // number of vertices still waiting to be visited
    let mut pending: usize = 1;
    for (v, &c) in counts.iter().enumerate() {
        if pending == 0 {
            return false;
        }
        pending = pending - 1 + c;
        if pending == 0 && v + 1 != counts.len() {
            return false;
        }
    }
    pending == 0
}

/// Parent index of every vertex (the root maps to itself).
pub fn parents_of(counts: &[usize]) -> Vec<usize> {
    let mut parents = vec![0; counts.len()];
    // (vertex, children still to attach)
    let mut stack: Vec<(usize, usize)> = Vec::new();
    for (v, &c) in counts.iter().enumerate() {
        if let Some(top) = stack.last_mut() {
            parents[v] = top.0;
            top.1 -= 1;
        }
        while matches!(stack.last(), Some(&(_, 0))) {
            stack.pop();
        }
        if c > 0 {
            stack.push((v, c));
        }
    }
    parents
}

/// The contour walk `w_0, …, w_{2k}` of the tree as preorder vertex indices.
pub fn contour_walk(counts: &[usize]) -> Vec<usize> {
    let n = counts.len();
    let mut walk = Vec::with_capacity(2 * n - 1);
    // Preorder makes the first child of v equal to v + 1, and each next
    // sibling start right after the previous sibling's subtree.
    let sizes = subtree_sizes(counts);
    fn visit(v: usize, counts: &[usize], sizes: &[usize], walk: &mut Vec<usize>) {
        walk.push(v);
        let mut child = v + 1;
        for _ in 0..counts[v] {
            visit(child, counts, sizes, walk);
            walk.push(v);
            child += sizes[child];
        }
    }
    visit(0, counts, &sizes, &mut walk);
    walk
}

fn subtree_sizes(counts: &[usize]) -> Vec<usize> {
    let parents = parents_of(counts);
    let mut sizes = vec![1; counts.len()];
    for v in (1..counts.len()).rev() {
        sizes[parents[v]] += sizes[v];
    }
    sizes
}

/// Calls `f` on every preorder child-count sequence of a plane tree with
/// `n` vertices, in lexicographic order.
pub fn for_each_structure(n: usize, mut f: impl FnMut(&[usize])) {
    fn rec(n: usize, pending: usize, cur: &mut Vec<usize>, f: &mut impl FnMut(&[usize])) {
        let placed = cur.len();
        if placed == n {
            if pending == 0 {
                f(cur);
            }
            return;
        }
        // every pending vertex still needs a slot, and the walk may not close early
        let remaining = n - placed;
        if pending == 0 || pending > remaining {
            return;
        }
        let max_c = remaining - pending;
        for c in 0..=max_c {
            let next = pending - 1 + c;
            if next == 0 && placed + 1 != n {
                continue;
            }
            cur.push(c);
            rec(n, next, cur, f);
            cur.pop();
        }
    }
    if n == 0 {
        return;
    }
    rec(n, 1, &mut Vec::with_capacity(n), &mut f);
}

impl LabelledPlaneTree {
    /// Builds a tree, checking only the shape and label-length consistency.
    pub fn new(child_counts: Vec<usize>, labels: Vec<usize>) -> Result<Self, TreeError> {
        if child_counts.is_empty() {
            return Err(TreeError::Empty);
        }
        if child_counts.len() != labels.len() {
            return Err(TreeError::LengthMismatch {
                counts: child_counts.len(),
                labels: labels.len(),
            });
        }
        if !is_valid_structure(&child_counts) {
            return Err(TreeError::BadStructure);
        }
        Ok(Self {
            child_counts,
            labels,
        })
    }

    pub fn child_counts(&self) -> &[usize] {
        &self.child_counts
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn num_vertices(&self) -> usize {
        self.labels.len()
    }

    /// Number of edges k.
    pub fn num_edges(&self) -> usize {
        self.labels.len() - 1
    }

    pub fn parents(&self) -> Vec<usize> {
        parents_of(&self.child_counts)
    }

    /// `(parent, child)` pairs in preorder of the child.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let parents = self.parents();
        (1..self.num_vertices()).map(|v| (parents[v], v)).collect()
    }

    /// Checks every label is in range and every edge's label pair is a cell of λ.
    pub fn check_labels(&self, lambda: &Partition) -> Result<(), TreeError> {
        let ell = lambda.len();
        for (v, &c) in self.labels.iter().enumerate() {
            if c == 0 || c > ell {
                return Err(TreeError::LabelOutOfRange {
                    vertex: v,
                    label: c,
                    max: ell,
                });
            }
        }
        for (u, v) in self.edges() {
            let (a, b) = (self.labels[u], self.labels[v]);
            if !lambda.has_cell(a, b) {
                return Err(TreeError::BadEdge {
                    parent: u,
                    child: v,
                    a,
                    b,
                });
            }
        }
        Ok(())
    }

    /// Whether this is a λ-plane tree.
    pub fn is_lambda_plane_tree(&self, lambda: &Partition) -> bool {
        self.check_labels(lambda).is_ok()
    }

    pub fn contour_walk(&self) -> Vec<usize> {
        contour_walk(&self.child_counts)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn structures_are_counted_by_catalan() {
        let catalan = [1, 1, 2, 5, 14, 42, 132, 429];
        for (k, &c) in catalan.iter().enumerate() {
            let mut seen = Vec::new();
            for_each_structure(k + 1, |s| {
                assert!(is_valid_structure(s));
                seen.push(s.to_vec());
            });
            assert_eq!(seen.len(), c, "k = {k}");
            let mut sorted = seen.clone();
            sorted.sort();
            assert_eq!(sorted, seen, "lexicographic order");
        }
    }

    #[test]
    fn structure_validation() {
        assert!(is_valid_structure(&[0]));
        assert!(is_valid_structure(&[2, 0, 0]));
        assert!(is_valid_structure(&[1, 1, 0]));
        assert!(!is_valid_structure(&[]));
        assert!(!is_valid_structure(&[0, 0]));
        assert!(!is_valid_structure(&[2, 0]));
        assert!(!is_valid_structure(&[1, 0, 0]));
    }

    #[test]
    fn contour_of_cherry_and_path() {
        assert_eq!(contour_walk(&[2, 0, 0]), vec![0, 1, 0, 2, 0]);
        assert_eq!(contour_walk(&[1, 1, 0]), vec![0, 1, 2, 1, 0]);
        assert_eq!(contour_walk(&[0]), vec![0]);
        // root with children {a (one child), b}
        assert_eq!(contour_walk(&[2, 1, 0, 0]), vec![0, 1, 2, 1, 0, 3, 0]);
        assert_eq!(parents_of(&[2, 1, 0, 0]), vec![0, 0, 1, 0]);
    }

    #[test]
    fn rejects_bad_input() {
        assert_eq!(LabelledPlaneTree::new(vec![], vec![]), Err(TreeError::Empty));
        assert!(matches!(
            LabelledPlaneTree::new(vec![0], vec![1, 1]),
            Err(TreeError::LengthMismatch { .. })
        ));
        assert_eq!(LabelledPlaneTree::new(vec![0, 0], vec![1, 1]), Err(TreeError::BadStructure));
        let lam = Partition::new(vec![2, 1]).unwrap();
        let t = LabelledPlaneTree::new(vec![1, 0], vec![2, 2]).unwrap();
        assert!(matches!(t.check_labels(&lam), Err(TreeError::BadEdge { .. })));
        let t = LabelledPlaneTree::new(vec![1, 0], vec![1, 3]).unwrap();
        assert!(matches!(t.check_labels(&lam), Err(TreeError::LabelOutOfRange { .. })));
    }
}
