//! Seeded Monte Carlo sampling of λ-shaped random matrices.
//!
//! Trial `t` of an experiment with master seed `s` draws from
//! `ChaCha20Rng::seed_from_u64(s)` on stream `t`, so every trial owns an
//! independent reproducible stream and results do not depend on the thread
//! count. [`sample_matrix`] uses stream 0.

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::partitions::{Partition, PartitionError};
use crate::spectral_analytic::fat_hook_support;

/// Default cap on the matrix dimension `Nℓ`.
pub const DEFAULT_DIMENSION_CAP: usize = 2000;
/// Relative rank tolerance for kernel counts.
pub const RANK_TOLERANCE: f64 = 1e-8;
/// Maximum QR sweeps granted to the eigensolver.
const EIGEN_MAX_ITERATIONS: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MonteCarloError {
    #[error(transparent)]
    Partition(#[from] PartitionError),
    #[error("matrix dimension {dimension} exceeds the cap {cap}")]
    DimensionCap { dimension: usize, cap: usize },
    #[error("N and trials must be positive")]
    ZeroSize,
    #[error("eigensolver did not converge within {iterations} iterations")]
    EigenNonConvergence { iterations: usize },
    #[error("eigenvalue {quantity} check failed: {got} vs {expected}")]
    Accuracy {
        quantity: &'static str,
        got: f64,
        expected: f64,
    },
    #[error("fat hook blocks must be positive")]
    BadBlocks,
}

/// Distribution of the nonzero entries, both centred with `E|X|² = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum EntryLaw {
    /// Real and imaginary parts independent `N(0, 1/2)`.
    #[default]
    ComplexGaussian,
    /// `e^{iθ}` with `θ` uniform on `[0, 2π)`.
    UniformPhase,
}

impl EntryLaw {
    fn draw(self, rng: &mut ChaCha20Rng) -> Complex64 {
        match self {
            EntryLaw::ComplexGaussian => {
                let s = std::f64::consts::FRAC_1_SQRT_2;
                let re: f64 = rng.sample(StandardNormal);
                let im: f64 = rng.sample(StandardNormal);
                Complex64::new(s * re, s * im)
            }
            EntryLaw::UniformPhase => {
                let theta = rng.random_range(0.0..std::f64::consts::TAU);
                Complex64::from_polar(1.0, theta)
            }
        }
    }
}

impl fmt::Display for EntryLaw {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EntryLaw::ComplexGaussian => "gaussian",
            EntryLaw::UniformPhase => "phase",
        })
    }
}

impl FromStr for EntryLaw {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "gaussian" | "complex-gaussian" => Ok(EntryLaw::ComplexGaussian),
            "phase" | "uniform-phase" => Ok(EntryLaw::UniformPhase),
            _ => Err(format!("unknown entry law {s:?}, expected gaussian or phase")),
        }
    }
}

/// The `(Nℓ)×(Nℓ)` matrix `X_N`, nonzero exactly on the cells of `Nλ`.
#[derive(Debug, Clone, PartialEq)]
pub struct ShapedMatrix {
    pub shape: Partition,
    pub n: usize,
    pub seed: u64,
    pub law: EntryLaw,
    pub entries: DMatrix<Complex64>,
}

impl ShapedMatrix {
    pub fn dimension(&self) -> usize {
        self.entries.nrows()
    }

    /// `W_N = X X^* / N`.
    pub fn gram(&self) -> DMatrix<Complex64> {
        let mut w = &self.entries * self.entries.adjoint();
        w.unscale_mut(self.n as f64);
        w
    }
}

fn trial_rng(seed: u64, trial: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

fn check_dimension(dimension: usize) -> Result<(), MonteCarloError> {
    if dimension > DEFAULT_DIMENSION_CAP {
        return Err(MonteCarloError::DimensionCap {
            dimension,
            cap: DEFAULT_DIMENSION_CAP,
        });
    }
    Ok(())
}

fn dilated(p: &Partition, n: usize) -> Result<Partition, MonteCarloError> {
    if n == 0 {
        return Err(MonteCarloError::ZeroSize);
    }
    if !p.is_self_conjugate() {
        return Err(PartitionError::NotSelfConjugate.into());
    }
    check_dimension(n * p.len())?;
    Ok(p.dilate(n)?)
}

fn fill(shape: &Partition, law: EntryLaw, rng: &mut ChaCha20Rng) -> DMatrix<Complex64> {
    let dim = shape.len();
    let mut x = DMatrix::zeros(dim, dim);
    // row-major draw order keeps streams stable
    for i in 0..dim {
        for j in 0..shape.parts()[i] {
            x[(i, j)] = law.draw(rng);
        }
    }
    x
}

pub fn sample_matrix(p: &Partition, n: usize, seed: u64, law: EntryLaw) -> Result<ShapedMatrix, MonteCarloError> {
    sample_trial(p, n, seed, 0, law)
}

fn sample_trial(p: &Partition, n: usize, seed: u64, trial: u64, law: EntryLaw) -> Result<ShapedMatrix, MonteCarloError> {
    let shape = dilated(p, n)?;
    let entries = fill(&shape, law, &mut trial_rng(seed, trial));
    Ok(ShapedMatrix {
        shape,
        n,
        seed,
        law,
        entries,
    })
}

/// Sorted eigenvalues of a Hermitian matrix, checked against `tr W` and
/// `tr W² = ‖W‖_F²` to `1e−10·(1 + |trace|)`.
pub fn hermitian_eigenvalues(w: &DMatrix<Complex64>) -> Result<Vec<f64>, MonteCarloError> {
    let trace: f64 = w.diagonal().iter().map(|c| c.re).sum();
    let trace_sq: f64 = w.iter().map(|c| c.norm_sqr()).sum();
    let eig = SymmetricEigen::try_new(w.clone(), f64::EPSILON, EIGEN_MAX_ITERATIONS).ok_or(
        MonteCarloError::EigenNonConvergence {
            iterations: EIGEN_MAX_ITERATIONS,
        },
    )?;
    let mut vals: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    vals.sort_by(f64::total_cmp);
    let sum: f64 = vals.iter().sum();
    let sum_sq: f64 = vals.iter().map(|v| v * v).sum();
    if (sum - trace).abs() > 1e-10 * (1.0 + trace.abs()) {
        return Err(MonteCarloError::Accuracy {
            quantity: "trace",
            got: sum,
            expected: trace,
        });
    }
    if (sum_sq - trace_sq).abs() > 1e-10 * (1.0 + trace_sq.abs()) {
        return Err(MonteCarloError::Accuracy {
            quantity: "trace-square",
            got: sum_sq,
            expected: trace_sq,
        });
    }
    Ok(vals)
}

/// Eigenvalues of `W_N`, ascending.
pub fn gram_eigenvalues(x: &ShapedMatrix) -> Result<Vec<f64>, MonteCarloError> {
    hermitian_eigenvalues(&x.gram())
}

/// Bin edges and the fraction of eigenvalues falling in each bin.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub edges: Vec<f64>,
    pub masses: Vec<f64>,
}

impl Histogram {
    /// Equal-width bins on `[lo, hi]`; values outside are clamped into the
    /// first or last bin.
    pub fn new(values: &[f64], lo: f64, hi: f64, bins: usize) -> Self {
        let bins = bins.max(1);
        let width = (hi - lo) / bins as f64;
        let edges = (0..=bins).map(|i| lo + width * i as f64).collect();
        let mut counts = vec![0usize; bins];
        for &v in values {
            let idx = ((v - lo) / width).floor();
            let idx = if idx.is_nan() { 0 } else { (idx.max(0.0) as usize).min(bins - 1) };
            counts[idx] += 1;
        }
        let total = values.len().max(1) as f64;
        Self {
            edges,
            masses: counts.into_iter().map(|c| c as f64 / total).collect(),
        }
    }

    pub fn bins(&self) -> usize {
        self.masses.len()
    }

    pub fn width(&self) -> f64 {
        self.edges[1] - self.edges[0]
    }
}

/// Across-trial mean of `m_{k,N}` and its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentEstimate {
    pub k: usize,
    pub mean: f64,
    pub stderr: f64,
}

/// Aggregated eigenvalues of `W_N` over all trials.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralSample {
    pub n: usize,
    pub trials: usize,
    pub dimension: usize,
    /// All `Nℓ·trials` eigenvalues, ascending.
    pub eigenvalues: Vec<f64>,
    pub histogram: Histogram,
    /// `m_{k,N}` for `k = 0..=kmax`.
    pub moments: Vec<MomentEstimate>,
    /// Per-trial `m_{k,N}`, `trial_moments[t][k]`, for joint error estimates.
    pub trial_moments: Vec<Vec<f64>>,
    /// Eigenvalues below `RANK_TOLERANCE·λ_max`, summed over trials.
    pub kernel_dim: usize,
}

impl SpectralSample {
    pub fn near_zero_fraction(&self) -> f64 {
        self.kernel_dim as f64 / self.eigenvalues.len() as f64
    }

    /// Eigenvalues above the per-trial rank tolerance.
    pub fn continuous_part(&self) -> &[f64] {
        let start = self.kernel_dim.min(self.eigenvalues.len());
        &self.eigenvalues[start..]
    }
}

/// Moments to aggregate in experiments.
pub const DEFAULT_KMAX: usize = 4;

fn kernel_count(eigs: &[f64]) -> usize {
    let top = eigs.last().copied().unwrap_or(0.0).max(0.0);
    eigs.iter().filter(|&&v| v < RANK_TOLERANCE * top).count()
}

fn aggregate(
    per_trial: Vec<Vec<f64>>,
    n: usize,
    kmax: usize,
    bins: usize,
    support_hi: Option<f64>,
) -> SpectralSample {
    let trials = per_trial.len();
    let dimension = per_trial[0].len();
    let trial_moments: Vec<Vec<f64>> = per_trial
        .iter()
        .map(|eigs| {
            (0..=kmax)
                .map(|k| eigs.iter().map(|v| v.powi(k as i32)).sum::<f64>() / eigs.len() as f64)
                .collect()
        })
        .collect();
    let moments = (0..=kmax)
        .map(|k| {
            let xs: Vec<f64> = trial_moments.iter().map(|m| m[k]).collect();
            let (mean, se) = mean_stderr(&xs);
            MomentEstimate { k, mean, stderr: se }
        })
        .collect();
    let kernel_dim = per_trial.iter().map(|e| kernel_count(e)).sum();
    let mut eigenvalues: Vec<f64> = per_trial.into_iter().flatten().collect();
    eigenvalues.sort_by(f64::total_cmp);
    let max = eigenvalues.last().copied().unwrap_or(0.0);
    // the analytic range is widened if a finite-N eigenvalue escapes it
    let hi = support_hi.map_or(max, |z| (1.1 * z).max(max));
    let hi = if hi > 0.0 { hi } else { 1.0 };
    let histogram = Histogram::new(&eigenvalues, 0.0, hi, bins);
    SpectralSample {
        n,
        trials,
        dimension,
        eigenvalues,
        histogram,
        moments,
        trial_moments,
        kernel_dim,
    }
}

/// Sample mean and standard error of the mean.
pub fn mean_stderr(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Standard error of the mean of the paired differences `x_t − y_t`.
pub fn paired_stderr(xs: &[f64], ys: &[f64]) -> f64 {
    let d: Vec<f64> = xs.iter().zip(ys).map(|(x, y)| x - y).collect();
    mean_stderr(&d).1
}

fn fat_hook_upper(p: &Partition) -> Option<f64> {
    match p.heights() {
        &[a1, a2] => fat_hook_support(a1, a2).ok().map(|s| s.z_plus),
        &[_] => Some(4.0),
        _ => None,
    }
}

fn run_trials<F>(trials: usize, f: F) -> Result<Vec<Vec<f64>>, MonteCarloError>
where
    F: Fn(u64) -> Result<Vec<f64>, MonteCarloError> + Sync + Send,
{
    if trials == 0 {
        return Err(MonteCarloError::ZeroSize);
    }
    // collect preserves trial order, so aggregation is deterministic
    (0..trials as u64).into_par_iter().map(f).collect()
}

/// Runs `trials` independent samples of `W_N` for the shape `p`.
pub fn run_experiment(
    p: &Partition,
    n: usize,
    trials: usize,
    seed: u64,
    bins: usize,
    law: EntryLaw,
) -> Result<SpectralSample, MonteCarloError> {
    dilated(p, n)?;
    let per_trial = run_trials(trials, |t| gram_eigenvalues(&sample_trial(p, n, seed, t, law)?))?;
    Ok(aggregate(per_trial, n, DEFAULT_KMAX, bins, fat_hook_upper(p)))
}

/// Numeric kernel dimension of one sample of `W_N`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelCheck {
    pub numeric: usize,
    /// `null_space_dim(Nλ)`, the row-count formula.
    pub expected: usize,
    /// Term-rank deficiency of `Nλ`, the generic kernel dimension.
    pub generic: usize,
    /// Smallest eigenvalue counted as nonzero over the largest counted as
    /// zero is within a factor 10 of the tolerance.
    pub ambiguous: bool,
}

impl KernelCheck {
    pub fn agrees(&self) -> bool {
        self.numeric == self.expected && !self.ambiguous
    }
}

pub fn kernel_dim_check(p: &Partition, n: usize, seed: u64) -> Result<KernelCheck, MonteCarloError> {
    let x = sample_matrix(p, n, seed, EntryLaw::ComplexGaussian)?;
    let eigs = gram_eigenvalues(&x)?;
    let top = eigs.last().copied().unwrap_or(0.0).max(0.0);
    let tol = RANK_TOLERANCE * top;
    let numeric = kernel_count(&eigs);
    let zero_max = if numeric > 0 { eigs[numeric - 1].max(0.0) } else { 0.0 };
    let ambiguous = eigs.get(numeric).is_some_and(|&v| v - zero_max < 10.0 * tol);
    Ok(KernelCheck {
        numeric,
        expected: x.shape.null_space_dim()?,
        generic: x.shape.generic_kernel_dim(),
        ambiguous,
    })
}

/// The mask `(0^{a1} 1^{a2})` repeated `N` times.
pub fn freeness_mask(a1: usize, a2: usize, n: usize) -> Vec<bool> {
    (0..n)
        .flat_map(|_| std::iter::repeat_n(false, a1).chain(std::iter::repeat_n(true, a2)))
        .collect()
}

fn freeness_eigenvalues(
    mask: &[bool],
    cols: usize,
    n: usize,
    seed: u64,
    trial: u64,
    law: EntryLaw,
) -> Result<Vec<f64>, MonteCarloError> {
    let rows = mask.len();
    let mut rng = trial_rng(seed, trial);
    let mut a = DMatrix::zeros(rows, cols);
    let mut b = DMatrix::zeros(rows, cols);
    for m in [&mut a, &mut b] {
        for i in 0..rows {
            for j in 0..cols {
                m[(i, j)] = law.draw(&mut rng);
            }
        }
    }
    for (i, &keep) in mask.iter().enumerate() {
        if !keep {
            b.row_mut(i).fill(Complex64::new(0.0, 0.0));
        }
    }
    let mut w = &a * a.adjoint() + &b * b.adjoint();
    w.unscale_mut(n as f64);
    hermitian_eigenvalues(&w)
}

/// Samples `(A A^* + D B (D B)^*)/N` with `A, B` of size `Nℓ × N a1` and
/// `D` the diagonal projection given by `mask` (length `Nℓ`).
pub fn freeness_model_with_mask(
    mask: &[bool],
    a1: usize,
    n: usize,
    trials: usize,
    seed: u64,
    bins: usize,
    law: EntryLaw,
    support_hi: Option<f64>,
) -> Result<SpectralSample, MonteCarloError> {
    if n == 0 || a1 == 0 {
        return Err(MonteCarloError::ZeroSize);
    }
    check_dimension(mask.len())?;
    let per_trial = run_trials(trials, |t| freeness_eigenvalues(mask, n * a1, n, seed, t, law))?;
    Ok(aggregate(per_trial, n, DEFAULT_KMAX, bins, support_hi))
}

/// Asymptotically free model whose limit is the fat-hook law `F^λ` for
/// `a = (a1, a2)`.
pub fn freeness_model(
    a1: usize,
    a2: usize,
    n: usize,
    trials: usize,
    seed: u64,
    bins: usize,
) -> Result<SpectralSample, MonteCarloError> {
    let support = fat_hook_support(a1, a2).map_err(|_| MonteCarloError::BadBlocks)?;
    freeness_model_with_mask(
        &freeness_mask(a1, a2, n),
        a1,
        n,
        trials,
        seed,
        bins,
        EntryLaw::ComplexGaussian,
        Some(support.z_plus),
    )
}
