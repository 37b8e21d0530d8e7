//! Young diagrams in part-list and multirectangular form.
//!
//! A [`Partition`] stores its parts together with the multirectangular
//! coordinates `a × b = (b_1^{a_1}, …, b_r^{a_r})` and a row → block table,
//! all computed once at construction. Rows, columns and block indices are
//! 1-based in the public API, matching the usual diagram conventions.

use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PartitionError {
    #[error("empty partition")]
    Empty,
    #[error("cannot parse {text:?} at index {index} as a positive integer")]
    Parse { index: usize, text: String },
    #[error("part at index {index} is not positive")]
    NonPositive { index: usize },
    #[error("increasing at index {index}")]
    Increasing { index: usize },
    #[error("height vector must be nonempty")]
    EmptyHeights,
    #[error("height at index {index} is zero")]
    ZeroHeight { index: usize },
    #[error("partition is not self-conjugate")]
    NotSelfConjugate,
    #[error("cell ({row}, {col}) is out of range")]
    OutOfRange { row: usize, col: usize },
    #[error("dilation factor must be positive")]
    ZeroDilation,
}

/// A partition with cached multirectangular coordinates and block map.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Partition {
    parts: Vec<usize>,
    heights: Vec<usize>,
    bases: Vec<usize>,
    // 0-based block index of each 0-based row.
    block_of_row: Vec<usize>,
    size: usize,
}

impl Partition {
    /// Builds a partition from a non-increasing list of positive parts.
    pub fn new(parts: Vec<usize>) -> Result<Self, PartitionError> {
        if parts.is_empty() {
            return Err(PartitionError::Empty);
        }
        for (idx, &p) in parts.iter().enumerate() {
            if p == 0 {
                return Err(PartitionError::NonPositive { index: idx + 1 });
            }
            if idx > 0 && p > parts[idx - 1] {
                return Err(PartitionError::Increasing { index: idx + 1 });
            }
        }

        let mut heights = Vec::new();
        let mut bases = Vec::new();
        let mut block_of_row = Vec::with_capacity(parts.len());
        for &p in &parts {
            if bases.last() != Some(&p) {
                bases.push(p);
                heights.push(0);
            }
            *heights.last_mut().unwrap() += 1;
            block_of_row.push(bases.len() - 1);
        }
        let size = parts.iter().sum();
        Ok(Self {
            parts,
            heights,
            bases,
            block_of_row,
            size,
        })
    }

    /// Builds `a × b = (b_1^{a_1}, …, b_r^{a_r})`.
    pub fn from_multirectangular(heights: &[usize], bases: &[usize]) -> Result<Self, PartitionError> {
        if heights.is_empty() || heights.len() != bases.len() {
            return Err(PartitionError::EmptyHeights);
        }
        if let Some(idx) = heights.iter().position(|&a| a == 0) {
            return Err(PartitionError::ZeroHeight { index: idx + 1 });
        }
        if let Some(idx) = bases.windows(2).position(|w| w[1] >= w[0]) {
            return Err(PartitionError::Increasing { index: idx + 2 });
        }
        let parts = heights
            .iter()
            .zip(bases)
            .flat_map(|(&a, &b)| std::iter::repeat_n(b, a))
            .collect();
        Self::new(parts)
    }

    /// The self-conjugate partition `((a_1+…+a_r)^{a_1}, (a_1+…+a_{r-1})^{a_2}, …, a_1^{a_r})`.
    pub fn self_conjugate_from_heights(heights: &[usize]) -> Result<Self, PartitionError> {
        if heights.is_empty() {
            return Err(PartitionError::EmptyHeights);
        }
        if let Some(idx) = heights.iter().position(|&a| a == 0) {
            return Err(PartitionError::ZeroHeight { index: idx + 1 });
        }
        let r = heights.len();
        let bases: Vec<usize> = (0..r).map(|j| heights[..r - j].iter().sum()).collect();
        Self::from_multirectangular(heights, &bases)
    }

    pub fn parts(&self) -> &[usize] {
        &self.parts
    }

    /// Block heights `a`.
    pub fn heights(&self) -> &[usize] {
        &self.heights
    }

    /// Block bases `b`, strictly decreasing.
    pub fn bases(&self) -> &[usize] {
        &self.bases
    }

    /// Number of parts ℓ.
    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    /// Number of boxes |λ|.
    pub fn size(&self) -> usize {
        self.size
    }

    /// Number of rectangular blocks r.
    pub fn num_blocks(&self) -> usize {
        self.heights.len()
    }

    /// Length of row `i` (1-based); 0 beyond the last row.
    pub fn row(&self, i: usize) -> usize {
        if i == 0 {
            return 0;
        }
        self.parts.get(i - 1).copied().unwrap_or(0)
    }

    /// Block map f_λ: 1-based row to 1-based block.
    ///
    /// Panics if `row` is not in `1..=ℓ`.
    #[inline]
    pub fn block_of(&self, row: usize) -> usize {
        self.block_of_row[row - 1] + 1
    }

    /// The full block map as a 1-based table of length ℓ.
    pub fn block_map(&self) -> Vec<usize> {
        self.block_of_row.iter().map(|b| b + 1).collect()
    }

    pub fn conjugate(&self) -> Partition {
        let parts = (1..=self.parts[0])
            .map(|j| self.parts.iter().take_while(|&&p| p >= j).count())
            .collect();
        Partition::new(parts).expect("conjugate of a valid partition is valid")
    }

    pub fn is_self_conjugate(&self) -> bool {
        self.conjugate() == *self
    }

    fn require_self_conjugate(&self) -> Result<(), PartitionError> {
        if self.is_self_conjugate() {
            Ok(())
        } else {
            Err(PartitionError::NotSelfConjugate)
        }
    }

    /// Whether the cell `(i, j)` belongs to the diagram (1-based).
    ///
    /// For self-conjugate partitions the answer is cross-checked against the
    /// block-map criterion `f(i) + f(j) ≤ r + 1`.
    pub fn contains_cell(&self, i: usize, j: usize) -> Result<bool, PartitionError> {
        let max_col = self.parts[0].max(self.len());
        if i == 0 || i > self.len() || j == 0 || j > max_col {
            return Err(PartitionError::OutOfRange { row: i, col: j });
        }
        let inside = j <= self.parts[i - 1];
        if self.is_self_conjugate() {
            debug_assert_eq!(inside, self.block_criterion_unchecked(i, j));
        }
        Ok(inside)
    }

    /// The block-map test `f(i) + f(j) ≤ r + 1`; only meaningful for
    /// self-conjugate partitions.
    pub fn block_criterion(&self, i: usize, j: usize) -> Result<bool, PartitionError> {
        self.require_self_conjugate()?;
        if i == 0 || i > self.len() || j == 0 || j > self.len() {
            return Err(PartitionError::OutOfRange { row: i, col: j });
        }
        Ok(self.block_criterion_unchecked(i, j))
    }

    #[inline]
    fn block_criterion_unchecked(&self, i: usize, j: usize) -> bool {
        self.block_of(i) + self.block_of(j) <= self.num_blocks() + 1
    }

    /// Fast membership test for labels already known to lie in `1..=ℓ`.
    #[inline]
    pub(crate) fn has_cell(&self, i: usize, j: usize) -> bool {
        j <= self.parts[i - 1]
    }

    /// The dilation Nλ: every box replaced by an N×N grid.
    pub fn dilate(&self, n: usize) -> Result<Partition, PartitionError> {
        if n == 0 {
            return Err(PartitionError::ZeroDilation);
        }
        let parts = self
            .parts
            .iter()
            .flat_map(|&p| std::iter::repeat_n(p * n, n))
            .collect();
        Partition::new(parts)
    }

    /// True when λ is not a proper dilation, i.e. `gcd(a, b) = 1`.
    pub fn is_minimal(&self) -> bool {
        self.heights
            .iter()
            .chain(&self.bases)
            .fold(0usize, |g, &x| g.gcd(&x))
            == 1
    }

    /// Almost-sure kernel dimension of a λ-shaped matrix with continuous
    /// entries: `#{i : λ_i < ℓ − i + 1}`.
    ///
    /// Also evaluates the block form
    /// `Σ_{j=2}^r max{0, min{a_{≥j} − a_{≤r−j+1}, a_j}}` and checks agreement.
    pub fn null_space_dim(&self) -> Result<usize, PartitionError> {
        self.require_self_conjugate()?;
        let rows = self.null_space_dim_rows();
        debug_assert_eq!(rows, self.null_space_dim_blocks());
        Ok(rows)
    }

    /// Kernel dimension of a generic matrix supported on the diagram, from
    /// its term rank: rows are matched greedily from the shortest up, each to
    /// the first free column it covers.
    pub fn generic_kernel_dim(&self) -> usize {
        let mut rank = 0;
        for &p in self.parts.iter().rev() {
            if p > rank {
                rank += 1;
            }
        }
        self.len() - rank
    }

    /// Row form of the kernel dimension, without the self-conjugacy check.
    pub fn null_space_dim_rows(&self) -> usize {
        let ell = self.len();
        self.parts
            .iter()
            .enumerate()
            .filter(|&(idx, &p)| p < ell - idx)
            .count()
    }

    /// Block form of the kernel dimension, without the self-conjugacy check.
    pub fn null_space_dim_blocks(&self) -> usize {
        let a = &self.heights;
        let r = a.len();
        (2..=r)
            .map(|j| {
                let tail: i64 = a[j - 1..].iter().sum::<usize>() as i64;
                let head: i64 = a[..r - j + 1].iter().sum::<usize>() as i64;
                (tail - head).min(a[j - 1] as i64).max(0) as usize
            })
            .sum()
    }
}

impl TryFrom<Vec<usize>> for Partition {
    type Error = PartitionError;

    fn try_from(parts: Vec<usize>) -> Result<Self, Self::Error> {
        Partition::new(parts)
    }
}

impl From<Partition> for Vec<usize> {
    fn from(p: Partition) -> Self {
        p.parts
    }
}

/// Parses a comma-separated list of positive integers; spaces are tolerated.
fn parse_list(text: &str) -> Result<Vec<usize>, PartitionError> {
    if text.trim().is_empty() {
        return Err(PartitionError::Empty);
    }
    text.split(',')
        .enumerate()
        .map(|(idx, tok)| {
            let tok = tok.trim();
            match tok.parse::<i64>() {
                Ok(v) if v <= 0 => Err(PartitionError::NonPositive { index: idx + 1 }),
                Ok(v) => Ok(v as usize),
                Err(_) => Err(PartitionError::Parse {
                    index: idx + 1,
                    text: tok.to_string(),
                }),
            }
        })
        .collect()
}

/// Parses a partition in the `p1,p2,…,pk` text format.
pub fn parse_partition(text: &str) -> Result<Partition, PartitionError> {
    Partition::new(parse_list(text)?)
}

/// Parses a height vector `a1,…,ar` and builds the self-conjugate partition.
pub fn parse_heights(text: &str) -> Result<Partition, PartitionError> {
    let heights = parse_list(text).map_err(|e| match e {
        PartitionError::NonPositive { index } => PartitionError::ZeroHeight { index },
        PartitionError::Empty => PartitionError::EmptyHeights,
        other => other,
    })?;
    Partition::self_conjugate_from_heights(&heights)
}

impl FromStr for Partition {
    type Err = PartitionError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_partition(s)
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (idx, p) in self.parts.iter().enumerate() {
            if idx > 0 {
                f.write_str(",")?;
            }
            write!(f, "{p}")?;
        }
        Ok(())
    }
}

/// All compositions (ordered, positive) of every `n ≤ max_total`, as height
/// vectors. Each one is a distinct self-conjugate partition of length `n`.
pub fn height_vectors_up_to(max_total: usize) -> Vec<Vec<usize>> {
    fn rec(rem: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if !cur.is_empty() {
            out.push(cur.clone());
        }
        for a in 1..=rem {
            cur.push(a);
            rec(rem - a, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(max_total, &mut Vec::new(), &mut out);
    out
}
