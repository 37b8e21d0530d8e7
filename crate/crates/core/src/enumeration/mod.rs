//! Counting λ-plane trees.
//!
//! `C_k^λ`, the number of λ-plane trees on `k + 1` vertices, is computed four
//! ways: the rooted-count recurrence over block variables, the composition
//! sum over refined r-plane-tree counts, the terminating hypergeometric sum
//! for fat hooks, and exhaustive enumeration. All arithmetic is exact.

pub mod tree;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use thiserror::Error;

use crate::partitions::{Partition, PartitionError};
pub use tree::{for_each_structure, LabelledPlaneTree, TreeError};

/// Default cap on `ℓ^{k+1}·Catalan(k)` for exhaustive enumeration.
pub const DEFAULT_BRUTE_BUDGET: u64 = 100_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EnumerationError {
    #[error(transparent)]
    Partition(#[from] PartitionError),
    #[error("enumeration bound {bound} exceeds the budget {budget}")]
    BudgetExceeded { bound: BigUint, budget: u64 },
    #[error("composition must have total at least 2, got {total}")]
    CompositionTooSmall { total: usize },
    #[error("heights must be positive")]
    BadHeights,
}

/// Exact counts `C_0^λ … C_K^λ` and the moments `C_k^λ / ℓ`.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentTable {
    pub partition: Partition,
    pub counts: Vec<BigUint>,
    pub moments: Vec<BigRational>,
}

impl MomentTable {
    fn from_counts(partition: Partition, counts: Vec<BigUint>) -> Self {
        let ell = BigInt::from(partition.len());
        let moments = counts
            .iter()
            .map(|c| BigRational::new(BigInt::from(c.clone()), ell.clone()))
            .collect();
        Self {
            partition,
            counts,
            moments,
        }
    }

    pub fn kmax(&self) -> usize {
        self.counts.len() - 1
    }
}

/// `binom(n, m)`: 1 when `m = 0` for every `n`, and 0 when `m < 0`,
/// `n < 0 < m` or `m > n`.
pub fn binom(n: i64, m: i64) -> BigUint {
    if m == 0 {
        return BigUint::one();
    }
    if n < 0 || m < 0 || m > n {
        return BigUint::zero();
    }
    let m = m.min(n - m);
    let mut acc = BigUint::one();
    for i in 0..m {
        acc *= BigUint::from((n - i) as u64);
        acc /= BigUint::from((i + 1) as u64);
    }
    acc
}

pub fn catalan(k: usize) -> BigUint {
    binom(2 * k as i64, k as i64) / BigUint::from(k + 1)
}

/// Number of r-plane trees on `k + 1` vertices, `r/(k+1) · binom((r+1)k, k)`.
pub fn staircase_count(r: usize, k: usize) -> BigUint {
    binom(((r + 1) * k) as i64, k as i64) * BigUint::from(r) / BigUint::from(k + 1)
}

/// `C_k^λ` for `k ≤ kmax` from the rooted-count recurrence.
///
/// Rows in the same block have equal rooted counts, so the recurrence runs
/// over one variable per block: with `c_j[k]` the number of trees whose root
/// lies in block `j`,
/// `c_j[k] = Σ_{n<k} c_j[n] · Σ_{i ≤ r−j+1} a_i c_i[k−1−n]`.
pub fn count_recurrence(lambda: &Partition, kmax: usize) -> Result<MomentTable, EnumerationError> {
    if !lambda.is_self_conjugate() {
        return Err(PartitionError::NotSelfConjugate.into());
    }
    let a: Vec<BigUint> = lambda.heights().iter().map(|&x| BigUint::from(x)).collect();
    let r = a.len();
    let mut rooted: Vec<Vec<BigUint>> = vec![Vec::with_capacity(kmax + 1); r];
    // subtree[j][m] = Σ_{i ≤ r−j} a_i c_i[m] (0-based j): trees that may hang below block j
    let mut subtree: Vec<Vec<BigUint>> = vec![Vec::with_capacity(kmax + 1); r];
    for k in 0..=kmax {
        for j in 0..r {
            let value = if k == 0 {
                BigUint::one()
            } else {
                (0..k)
                    .map(|n| &rooted[j][n] * &subtree[j][k - 1 - n])
                    .sum()
            };
            rooted[j].push(value);
        }
        for j in 0..r {
            let s: BigUint = (0..r - j).map(|i| &a[i] * &rooted[i][k]).sum();
            subtree[j].push(s);
        }
    }
    let counts = (0..=kmax)
        .map(|k| (0..r).map(|j| &a[j] * &rooted[j][k]).sum())
        .collect();
    Ok(MomentTable::from_counts(lambda.clone(), counts))
}

/// Limiting moments `C_k^λ / ℓ` for `k ≤ kmax`.
pub fn moments(lambda: &Partition, kmax: usize) -> Result<Vec<BigRational>, EnumerationError> {
    Ok(count_recurrence(lambda, kmax)?.moments)
}

fn prefix_sums(ls: &[usize]) -> Vec<i64> {
    let mut out = vec![0i64; ls.len() + 1];
    for (i, &x) in ls.iter().enumerate() {
        out[i + 1] = out[i] + x as i64;
    }
    out
}

/// `Π_{j=1}^r binom(ℓ_{≥j} + ℓ_{≤r−j+1} − 1 − [j ≤ ⌈r/2⌉], ℓ_j)`, i.e. `k·t`.
pub fn t_product_single(ls: &[usize]) -> BigUint {
    let r = ls.len();
    let pre = prefix_sums(ls);
    let total = pre[r];
    let half_up = r.div_ceil(2);
    (1..=r)
        .map(|j| {
            let ge_j = total - pre[j - 1];
            let le = pre[r - j + 1];
            let shift = if j <= half_up { 2 } else { 1 };
            binom(ge_j + le - shift, ls[j - 1] as i64)
        })
        .product()
}

/// The two-product form
/// `Π_{j≤⌈r/2⌉} binom(ℓ_{≥j}+ℓ_{≤r−j+1}−2, ℓ_j) · Π_{j≤⌊r/2⌋} binom(ℓ_{≤j}+ℓ_{≥r−j+1}−1, ℓ_{r−j+1})`.
pub fn t_product_two(ls: &[usize]) -> BigUint {
    let r = ls.len();
    let pre = prefix_sums(ls);
    let total = pre[r];
    let first: BigUint = (1..=r.div_ceil(2))
        .map(|j| binom(total - pre[j - 1] + pre[r - j + 1] - 2, ls[j - 1] as i64))
        .product();
    let second: BigUint = (1..=r / 2)
        .map(|j| {
            let ge = total - pre[r - j];
            binom(pre[j] + ge - 1, ls[r - j] as i64)
        })
        .product();
    first * second
}

/// `t(ℓ_1, …, ℓ_r)`: the number of r-plane trees with exactly `ℓ_i` vertices
/// labelled `i`, where `Σ ℓ_i = k + 1` and `k ≥ 1`.
///
/// Both product forms are evaluated and must agree; the `1/k` prefactor must
/// divide exactly. See [`binom`] for out-of-range arguments.
pub fn refined_count(composition: &[usize]) -> Result<BigUint, EnumerationError> {
    let total: usize = composition.iter().sum();
    if total < 2 {
        return Err(EnumerationError::CompositionTooSmall { total });
    }
    let k = BigUint::from(total - 1);
    let single = t_product_single(composition);
    let two = t_product_two(composition);
    assert_eq!(single, two, "t product forms disagree at {composition:?}");
    assert!(
        (&single % &k).is_zero(),
        "t is not integral at {composition:?}"
    );
    Ok(single / k)
}

/// Calls `f` on every weak composition of `n` into `parts` parts.
fn for_each_weak_composition(n: usize, parts: usize, f: &mut impl FnMut(&[usize])) {
    fn rec(rem: usize, slot: usize, cur: &mut [usize], f: &mut impl FnMut(&[usize])) {
        if slot + 1 == cur.len() {
            cur[slot] = rem;
            f(cur);
            return;
        }
        for x in (0..=rem).rev() {
            cur[slot] = x;
            rec(rem - x, slot + 1, cur, f);
        }
    }
    let mut cur = vec![0; parts];
    rec(n, 0, &mut cur, f);
}

/// `C_k^λ = Σ_{ℓ_1+…+ℓ_r = k+1} t(ℓ) · a_1^{ℓ_1} ⋯ a_r^{ℓ_r}`.
///
/// `k = 0` is handled directly as `Σ a_i = ℓ`.
pub fn count_summation(heights: &[usize], k: usize) -> Result<BigUint, EnumerationError> {
    if heights.is_empty() || heights.contains(&0) {
        return Err(EnumerationError::BadHeights);
    }
    if k == 0 {
        return Ok(BigUint::from(heights.iter().sum::<usize>()));
    }
    let a: Vec<BigUint> = heights.iter().map(|&x| BigUint::from(x)).collect();
    let kk = BigUint::from(k);
    let mut total = BigUint::zero();
    for_each_weak_composition(k + 1, heights.len(), &mut |ls| {
        let t = t_product_single(ls);
        if t.is_zero() {
            return;
        }
        let weight: BigUint = ls
            .iter()
            .zip(&a)
            .map(|(&e, base)| base.pow(e as u32))
            .product();
        total += t * weight;
    });
    debug_assert!((&total % &kk).is_zero());
    Ok(total / kk)
}

/// Rising Pochhammer symbol `(x)_j`.
fn pochhammer(x: i64, j: usize) -> BigInt {
    (0..j as i64).map(|i| BigInt::from(x + i)).product()
}

/// `C_k^λ` for the fat hook `((a1+a2)^{a1}, a1^{a2})` as
/// `Catalan(k) · a1^{k+1} · ₂F₁(−k−1, −k; k; a2/a1)`, summed exactly.
pub fn count_fat_hook(a1: usize, a2: usize, k: usize) -> Result<BigUint, EnumerationError> {
    if a1 == 0 || a2 == 0 {
        return Err(EnumerationError::BadHeights);
    }
    if k == 0 {
        return Ok(BigUint::from(a1 + a2));
    }
    let x = BigRational::new(BigInt::from(a2), BigInt::from(a1));
    let (alpha, beta, gamma) = (-(k as i64) - 1, -(k as i64), k as i64);
    let mut sum = BigRational::zero();
    let mut x_pow = BigRational::one();
    let mut fact = BigInt::one();
    // (−k)_j vanishes for j > k, which terminates the series
    for j in 0..=k {
        if j > 0 {
            x_pow *= &x;
            fact *= BigInt::from(j);
        }
        let num = pochhammer(alpha, j) * pochhammer(beta, j);
        let den = pochhammer(gamma, j) * &fact;
        sum += BigRational::new(num, den) * &x_pow;
    }
    let scale = BigInt::from(catalan(k)) * BigInt::from(a1).pow(k as u32 + 1);
    let value = sum * BigRational::from_integer(scale);
    assert!(value.is_integer(), "hypergeometric count is not an integer");
    Ok(value
        .to_integer()
        .to_biguint()
        .expect("tree counts are nonnegative"))
}

/// Upper bound `ℓ^{k+1}·Catalan(k)` on the number of λ-plane trees.
pub fn brute_bound(lambda: &Partition, k: usize) -> BigUint {
    BigUint::from(lambda.len()).pow(k as u32 + 1) * catalan(k)
}

/// Visits every λ-plane tree on `k + 1` vertices in lexicographic order of
/// (structure, labels). Labels are assigned in preorder; a child's candidates
/// are `1..=λ_{c(parent)}`.
pub fn for_each_brute(
    lambda: &Partition,
    k: usize,
    budget: u64,
    mut f: impl FnMut(&[usize], &[usize]),
) -> Result<(), EnumerationError> {
    if !lambda.is_self_conjugate() {
        return Err(PartitionError::NotSelfConjugate.into());
    }
    let bound = brute_bound(lambda, k);
    if bound > BigUint::from(budget) {
        return Err(EnumerationError::BudgetExceeded { bound, budget });
    }
    let ell = lambda.len();
    let n = k + 1;
    let mut labels = vec![0usize; n];
    for_each_structure(n, |counts| {
        let parents = tree::parents_of(counts);
        label_rec(lambda, ell, counts, &parents, 0, &mut labels, &mut f);
    });
    Ok(())
}

fn label_rec(
    lambda: &Partition,
    ell: usize,
    counts: &[usize],
    parents: &[usize],
    v: usize,
    labels: &mut [usize],
    f: &mut impl FnMut(&[usize], &[usize]),
) {
    if v == labels.len() {
        f(counts, labels);
        return;
    }
    let max = if v == 0 { ell } else { lambda.row(labels[parents[v]]) };
    for c in 1..=max {
        labels[v] = c;
        label_rec(lambda, ell, counts, parents, v + 1, labels, f);
    }
}

/// All λ-plane trees on `k + 1` vertices.
pub fn enumerate_brute(
    lambda: &Partition,
    k: usize,
    budget: u64,
) -> Result<Vec<LabelledPlaneTree>, EnumerationError> {
    let mut out = Vec::new();
    for_each_brute(lambda, k, budget, |counts, labels| {
        out.push(
            LabelledPlaneTree::new(counts.to_vec(), labels.to_vec())
                .expect("generated structures are valid"),
        );
    })?;
    Ok(out)
}

/// Number of λ-plane trees on `k + 1` vertices by exhaustive enumeration.
pub fn count_brute(lambda: &Partition, k: usize, budget: u64) -> Result<BigUint, EnumerationError> {
    let mut n: u64 = 0;
    for_each_brute(lambda, k, budget, |_, _| n += 1)?;
    Ok(BigUint::from(n))
}

/// Convenience: `C_k^λ` as `f64` (lossy for large counts).
pub fn count_as_f64(c: &BigUint) -> f64 {
    c.to_f64().unwrap_or(f64::INFINITY)
}
