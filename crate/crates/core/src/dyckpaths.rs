//! λ-Dyck paths and the contour-walk bijection with λ-plane trees.
//!
//! A λ-Dyck path of length `2k` is a sequence of triples `(i_t, j_t, h_t)`:
//! the location `(i_t, j_t)` moves inside λ, keeping the row fixed on odd
//! steps and the column fixed on even steps, while the height `h_t` is a
//! Dyck path whose every excursion starts and ends pointing at the same cell.
//!
//! The length-0 path for a single vertex labelled `c` is stored as the one
//! triple `(c, 1, 0)`; column 1 is a cell of every row.

use std::fmt;

use num_bigint::BigUint;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::enumeration::{catalan, LabelledPlaneTree, TreeError};
use crate::partitions::{Partition, PartitionError};

/// One `(i, j, h)` triple; serialized as a JSON array `[i, j, h]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PathStep(pub i64, pub i64, pub i64);

impl PathStep {
    pub fn location(&self) -> (i64, i64) {
        (self.0, self.1)
    }

    pub fn height(&self) -> i64 {
        self.2
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LambdaDyckPath {
    pub steps: Vec<PathStep>,
}

impl LambdaDyckPath {
    pub fn new(steps: Vec<PathStep>) -> Self {
        Self { steps }
    }

    /// Half-length k (number of up-steps).
    pub fn half_length(&self) -> usize {
        self.steps.len().saturating_sub(1) / 2
    }

    pub fn heights(&self) -> Vec<i64> {
        self.steps.iter().map(|s| s.2).collect()
    }
}

/// Clauses of the λ-Dyck path definition, in reporting priority.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Violation {
    /// `(i_t, j_t)` is not a cell of λ.
    OutsideDiagram,
    /// Row changed on an odd step.
    RowMoved,
    /// Column changed on an even step.
    ColumnMoved,
    /// Height negative, or not 0 at either end.
    NotDyck,
    /// Start and end locations differ.
    NotClosed,
    /// Excursion `[a, b]` with `(i_{a+1}, j_{a+1}) ≠ (i_b, j_b)`.
    UnbalancedExcursion { start: usize, end: usize },
    /// Length-0 path other than the canonical `(c, 1, 0)`.
    NonCanonicalEmpty,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::OutsideDiagram => f.write_str("location outside the diagram"),
            Violation::RowMoved => f.write_str("row changed on an odd step"),
            Violation::ColumnMoved => f.write_str("column changed on an even step"),
            Violation::NotDyck => f.write_str("height is not a Dyck path"),
            Violation::NotClosed => f.write_str("start and end locations differ"),
            Violation::UnbalancedExcursion { start, end } => {
                write!(f, "unbalanced excursion at [{start},{end}]")
            }
            Violation::NonCanonicalEmpty => f.write_str("length-0 path must be (c, 1, 0)"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PathError {
    #[error("empty step list")]
    Empty,
    #[error("path has {steps} triples; a path of length 2k has 2k+1")]
    OddLength { steps: usize },
    #[error("height increment at time {time} is not ±1")]
    NonUnitHeight { time: usize },
    #[error("{violation} at time {time}")]
    Invalid { violation: Violation, time: usize },
    #[error(transparent)]
    Partition(#[from] PartitionError),
    #[error(transparent)]
    Tree(#[from] TreeError),
    #[error("search bound {bound} exceeds the budget {budget}")]
    BudgetExceeded { bound: BigUint, budget: u64 },
}

impl PathError {
    /// True for structural problems, false for semantic violations.
    pub fn is_malformed(&self) -> bool {
        matches!(
            self,
            PathError::Empty | PathError::OddLength { .. } | PathError::NonUnitHeight { .. }
        )
    }
}

fn in_diagram(lambda: &Partition, (i, j): (i64, i64)) -> bool {
    i >= 1 && j >= 1 && (i as usize) <= lambda.len() && (j as usize) <= lambda.row(i as usize)
}

/// Height excursions `[a, b]`: one per up-step at `a + 1`, closed at the
/// first later return to `h_a`. Assumes a well-formed Dyck height.
pub fn excursions(path: &LambdaDyckPath) -> Vec<(usize, usize)> {
    let h = path.heights();
    let mut open: Vec<usize> = Vec::new();
    let mut out = Vec::new();
    for t in 1..h.len() {
        if h[t] > h[t - 1] {
            open.push(t - 1);
        } else if let Some(a) = open.pop() {
            out.push((a, t));
        }
    }
    out.sort_unstable();
    out
}

/// Checks every clause of the λ-Dyck path definition.
///
/// Malformed input (empty, even number of triples, non-unit height steps) is
/// reported before any semantic check. Otherwise the violation with the
/// earliest time index is reported.
pub fn validate_path(lambda: &Partition, path: &LambdaDyckPath) -> Result<(), PathError> {
    if !lambda.is_self_conjugate() {
        return Err(PartitionError::NotSelfConjugate.into());
    }
    let steps = &path.steps;
    if steps.is_empty() {
        return Err(PathError::Empty);
    }
    if steps.len().is_multiple_of(2) {
        return Err(PathError::OddLength { steps: steps.len() });
    }
    for t in 1..steps.len() {
        if (steps[t].2 - steps[t - 1].2).abs() != 1 {
            return Err(PathError::NonUnitHeight { time: t });
        }
    }

    let mut found: Vec<(usize, Violation)> = Vec::new();
    let last = steps.len() - 1;
    for (t, s) in steps.iter().enumerate() {
        if !in_diagram(lambda, s.location()) {
            found.push((t, Violation::OutsideDiagram));
        }
        if t > 0 {
            if t % 2 == 1 && s.0 != steps[t - 1].0 {
                found.push((t, Violation::RowMoved));
            }
            if t % 2 == 0 && s.1 != steps[t - 1].1 {
                found.push((t, Violation::ColumnMoved));
            }
        }
        if s.2 < 0 || ((t == 0 || t == last) && s.2 != 0) {
            found.push((t, Violation::NotDyck));
        }
    }
    if steps[0].location() != steps[last].location() {
        found.push((last, Violation::NotClosed));
    }
    if last == 0 {
        if steps[0].1 != 1 {
            found.push((0, Violation::NonCanonicalEmpty));
        }
    } else {
        for (a, b) in excursions(path) {
            if steps[a + 1].location() != steps[b].location() {
                found.push((b, Violation::UnbalancedExcursion { start: a, end: b }));
            }
        }
    }
    match found.into_iter().min_by_key(|&(t, v)| (t, v)) {
        None => Ok(()),
        Some((time, violation)) => Err(PathError::Invalid { violation, time }),
    }
}

pub fn is_valid_path(lambda: &Partition, path: &LambdaDyckPath) -> bool {
    validate_path(lambda, path).is_ok()
}

/// Maps a λ-plane tree to its λ-Dyck path via the contour walk.
///
/// With `c_t` the label at contour time `t`, the location is `(c_{t−1}, c_t)`
/// at odd `t`, `(c_t, c_{t−1})` at even `t`, and `(c_0, c_{2k−1})` at `t = 0`.
pub fn tree_to_path(lambda: &Partition, tree: &LabelledPlaneTree) -> Result<LambdaDyckPath, PathError> {
    if !lambda.is_self_conjugate() {
        return Err(PartitionError::NotSelfConjugate.into());
    }
    tree.check_labels(lambda)?;
    let labels = tree.labels();
    if tree.num_edges() == 0 {
        return Ok(LambdaDyckPath::new(vec![PathStep(labels[0] as i64, 1, 0)]));
    }
    let walk = tree.contour_walk();
    let c: Vec<i64> = walk.iter().map(|&v| labels[v] as i64).collect();
    let two_k = walk.len() - 1;
    let mut steps = Vec::with_capacity(walk.len());
    let mut h = 0i64;
    let parents = tree.parents();
    for t in 0..=two_k {
        if t > 0 {
            // w_t is a child of w_{t-1} exactly when stepping away from the root
            h += if t > 0 && parents[walk[t]] == walk[t - 1] && walk[t] != 0 {
                1
            } else {
                -1
            };
        }
        let (i, j) = match t {
            0 => (c[0], c[two_k - 1]),
            t if t % 2 == 1 => (c[t - 1], c[t]),
            t => (c[t], c[t - 1]),
        };
        steps.push(PathStep(i, j, h));
    }
    Ok(LambdaDyckPath::new(steps))
}

/// Inverse of [`tree_to_path`]: rebuilds the plane tree from the heights and
/// reads each vertex label off any visit (`j_t` at odd `t`, `i_t` at even `t`).
pub fn path_to_tree(lambda: &Partition, path: &LambdaDyckPath) -> Result<LabelledPlaneTree, PathError> {
    validate_path(lambda, path)?;
    let steps = &path.steps;
    let label_at = |t: usize| -> usize {
        let s = steps[t];
        (if t % 2 == 1 { s.1 } else { s.0 }) as usize
    };
    let mut child_counts = vec![0usize];
    let mut labels = vec![label_at(0)];
    let mut stack = vec![0usize];
    for t in 1..steps.len() {
        if steps[t].2 > steps[t - 1].2 {
            let parent = *stack.last().unwrap();
            child_counts[parent] += 1;
            let v = child_counts.len();
            child_counts.push(0);
            labels.push(label_at(t));
            stack.push(v);
        } else {
            stack.pop();
            debug_assert_eq!(labels[*stack.last().unwrap()], label_at(t));
        }
    }
    Ok(LabelledPlaneTree::new(child_counts, labels)?)
}

/// Upper bound on the path search: start cell, ℓ choices per up-step.
pub fn path_search_bound(lambda: &Partition, k: usize) -> BigUint {
    BigUint::from(lambda.size()) * BigUint::from(lambda.len()).pow(k as u32) * catalan(k)
}

/// Number of λ-Dyck paths of length `2k`, by depth-first search over steps.
///
/// Up-steps branch over every cell reachable under the parity rule; a
/// down-step is forced to the location that opened its excursion. Heights
/// above `2k − t` are pruned.
pub fn count_paths(lambda: &Partition, k: usize, budget: u64) -> Result<BigUint, PathError> {
    if !lambda.is_self_conjugate() {
        return Err(PartitionError::NotSelfConjugate.into());
    }
    let bound = path_search_bound(lambda, k);
    if bound > BigUint::from(budget) {
        return Err(PathError::BudgetExceeded { bound, budget });
    }
    if k == 0 {
        return Ok(BigUint::from(lambda.len()));
    }
    let cells: Vec<(usize, usize)> = (1..=lambda.len())
        .flat_map(|i| (1..=lambda.row(i)).map(move |j| (i, j)))
        .collect();
    let total: u64 = cells
        .par_iter()
        .map(|&start| {
            let mut search = PathSearch {
                lambda,
                two_k: 2 * k,
                start,
                open: Vec::with_capacity(k),
            };
            search.run(1, start, 0)
        })
        .sum();
    Ok(BigUint::from(total))
}

struct PathSearch<'a> {
    lambda: &'a Partition,
    two_k: usize,
    start: (usize, usize),
    // location at time a+1 for every excursion opened at a
    open: Vec<(usize, usize)>,
}

impl PathSearch<'_> {
    fn run(&mut self, t: usize, loc: (usize, usize), h: usize) -> u64 {
        if t > self.two_k {
            return u64::from(h == 0 && loc == self.start);
        }
        let odd = t % 2 == 1;
        let mut total = 0;
        if h < self.two_k - t {
            let candidates: Vec<(usize, usize)> = if odd {
                (1..=self.lambda.row(loc.0)).map(|j| (loc.0, j)).collect()
            } else {
                (1..=self.lambda.row(loc.1)).map(|i| (i, loc.1)).collect()
            };
            for next in candidates {
                self.open.push(next);
                total += self.run(t + 1, next, h + 1);
                self.open.pop();
            }
        }
        if h > 0 {
            let next = self.open.pop().expect("open excursion");
            let allowed = if odd { next.0 == loc.0 } else { next.1 == loc.1 };
            if allowed {
                total += self.run(t + 1, next, h - 1);
            }
            self.open.push(next);
        }
        total
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::enumeration::{count_recurrence, enumerate_brute, DEFAULT_BRUTE_BUDGET};

    fn lam(parts: &[usize]) -> Partition {
        Partition::new(parts.to_vec()).unwrap()
    }

    fn fig_tree() -> LabelledPlaneTree {
        LabelledPlaneTree::new(
            vec![3, 1, 0, 2, 2, 0, 0, 0, 0],
            vec![1, 3, 2, 1, 2, 3, 2, 4, 6],
        )
        .unwrap()
    }

    // Location table and heights read off the 16-step illustration.
    fn fig_path() -> LambdaDyckPath {
        let locs = [
            (1, 6), (1, 3), (2, 3), (2, 3), (1, 3), (1, 1), (2, 1), (2, 3), (2, 3),
            (2, 2), (2, 2), (2, 1), (4, 1), (4, 1), (1, 1), (1, 6), (1, 6),
        ];
        let hs = [0, 1, 2, 1, 0, 1, 2, 3, 2, 3, 2, 1, 2, 1, 0, 1, 0];
        LambdaDyckPath::new(
            locs.iter()
                .zip(hs)
                .map(|(&(i, j), h)| PathStep(i, j, h))
                .collect(),
        )
    }

    #[test]
    fn figure_path_is_valid_and_matches_tree() {
        let fig = lam(&[6, 3, 3, 1, 1, 1]);
        validate_path(&fig, &fig_path()).unwrap();
        assert_eq!(tree_to_path(&fig, &fig_tree()).unwrap(), fig_path());
        assert_eq!(path_to_tree(&fig, &fig_path()).unwrap(), fig_tree());
        assert_eq!(excursions(&fig_path()).len(), 8);
    }

    #[test]
    fn single_cell_paths_stay_put() {
        let one = lam(&[1]);
        let path = LambdaDyckPath::new(
            [0, 1, 2, 1, 2, 1, 0].iter().map(|&h| PathStep(1, 1, h)).collect(),
        );
        validate_path(&one, &path).unwrap();
        let tree = path_to_tree(&one, &path).unwrap();
        assert_eq!(tree.child_counts(), &[1, 2, 0, 0]);
        assert!(tree.labels().iter().all(|&c| c == 1));
    }

    #[test]
    fn unbalanced_excursion_is_reported() {
        // λ = (2,1): excursion [1,3] opens toward (1,2) and closes at (1,1)
        let stair = lam(&[2, 1]);
        let path = LambdaDyckPath::new(vec![
            PathStep(1, 1, 0),
            PathStep(1, 2, 1),
            PathStep(1, 2, 2),
            PathStep(1, 1, 1),
            PathStep(1, 1, 0),
        ]);
        let err = validate_path(&stair, &path).unwrap_err();
        assert_eq!(
            err,
            PathError::Invalid {
                violation: Violation::UnbalancedExcursion { start: 1, end: 3 },
                time: 3
            }
        );
        assert!(err.to_string().contains("unbalanced excursion at [1,3]"));
        assert!(!err.is_malformed());
    }

    #[test]
    fn malformed_paths() {
        let stair = lam(&[2, 1]);
        assert_eq!(validate_path(&stair, &LambdaDyckPath::new(vec![])), Err(PathError::Empty));
        let even = LambdaDyckPath::new(vec![PathStep(1, 1, 0), PathStep(1, 1, 1)]);
        assert_eq!(validate_path(&stair, &even), Err(PathError::OddLength { steps: 2 }));
        let jump = LambdaDyckPath::new(vec![PathStep(1, 1, 0), PathStep(1, 1, 0), PathStep(1, 1, 0)]);
        let err = validate_path(&stair, &jump).unwrap_err();
        assert_eq!(err, PathError::NonUnitHeight { time: 1 });
        assert!(err.is_malformed());
    }

    #[test]
    fn semantic_violations() {
        let stair = lam(&[2, 1]);
        let outside = LambdaDyckPath::new(vec![PathStep(2, 2, 0), PathStep(2, 2, 1), PathStep(2, 2, 0)]);
        assert!(matches!(
            validate_path(&stair, &outside),
            Err(PathError::Invalid { violation: Violation::OutsideDiagram, time: 0 })
        ));
        let row_moves = LambdaDyckPath::new(vec![PathStep(1, 1, 0), PathStep(2, 1, 1), PathStep(1, 1, 0)]);
        assert!(matches!(
            validate_path(&stair, &row_moves),
            Err(PathError::Invalid { violation: Violation::RowMoved, time: 1 })
        ));
        let negative = LambdaDyckPath::new(vec![PathStep(1, 1, 0), PathStep(1, 1, -1), PathStep(1, 1, 0)]);
        assert!(matches!(
            validate_path(&stair, &negative),
            Err(PathError::Invalid { violation: Violation::NotDyck, time: 1 })
        ));
        let open = LambdaDyckPath::new(vec![PathStep(1, 2, 0), PathStep(1, 1, 1), PathStep(1, 1, 0)]);
        assert!(matches!(
            validate_path(&stair, &open),
            Err(PathError::Invalid { violation: Violation::NotClosed, time: 2 })
        ));
        let empty_bad = LambdaDyckPath::new(vec![PathStep(1, 2, 0)]);
        assert!(matches!(
            validate_path(&stair, &empty_bad),
            Err(PathError::Invalid { violation: Violation::NonCanonicalEmpty, time: 0 })
        ));
    }

    #[test]
    fn two_vertex_trees() {
        let lam = lam(&[3, 3, 2]);
        for tree in enumerate_brute(&lam, 1, DEFAULT_BRUTE_BUDGET).unwrap() {
            let (x, y) = (tree.labels()[0] as i64, tree.labels()[1] as i64);
            let path = tree_to_path(&lam, &tree).unwrap();
            assert_eq!(path.steps, vec![PathStep(x, y, 0), PathStep(x, y, 1), PathStep(x, y, 0)]);
            assert_eq!(path_to_tree(&lam, &path).unwrap(), tree);
        }
    }

    #[test]
    fn single_vertex_convention() {
        let lam = lam(&[3, 3, 2]);
        for c in 1..=3 {
            let tree = LabelledPlaneTree::new(vec![0], vec![c]).unwrap();
            let path = tree_to_path(&lam, &tree).unwrap();
            assert_eq!(path.steps, vec![PathStep(c as i64, 1, 0)]);
            assert_eq!(path_to_tree(&lam, &path).unwrap(), tree);
        }
    }

    #[test]
    fn path_counts() {
        let u = |x: u64| BigUint::from(x);
        assert_eq!(count_paths(&lam(&[2, 1]), 2, u64::MAX).unwrap(), u(10));
        assert_eq!(count_paths(&lam(&[1]), 3, u64::MAX).unwrap(), u(5));
        assert_eq!(count_paths(&lam(&[3, 3, 2]), 2, u64::MAX).unwrap(), u(44));
        let table = count_recurrence(&lam(&[3, 3, 2]), 4).unwrap();
        for k in 0..=4 {
            assert_eq!(count_paths(&lam(&[3, 3, 2]), k, u64::MAX).unwrap(), table.counts[k]);
        }
        assert!(matches!(
            count_paths(&lam(&[3, 3, 2]), 4, 10),
            Err(PathError::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn rejects_invalid_tree() {
        let stair = lam(&[2, 1]);
        let bad = LabelledPlaneTree::new(vec![1, 0], vec![2, 2]).unwrap();
        assert!(matches!(tree_to_path(&stair, &bad), Err(PathError::Tree(_))));
    }

    #[test]
    fn json_format() {
        let path = LambdaDyckPath::new(vec![PathStep(1, 2, 0), PathStep(1, 2, 1), PathStep(1, 2, 0)]);
        let text = serde_json::to_string(&path).unwrap();
        assert_eq!(text, "[[1,2,0],[1,2,1],[1,2,0]]");
        assert_eq!(serde_json::from_str::<LambdaDyckPath>(&text).unwrap(), path);
    }
}
