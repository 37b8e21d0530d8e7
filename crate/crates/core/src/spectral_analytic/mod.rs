//! Algebraic equations for the limiting Cauchy transform, fat-hook closed
//! forms, and numerical Stieltjes inversion.

use thiserror::Error;

use crate::partitions::PartitionError;
use crate::powerseries::SeriesError;

pub mod elimination;
pub mod fathook;
pub mod numeric;
pub mod poly;
pub mod stieltjes;

pub use elimination::{
    cauchy_equation, cauchy_polynomial, eliminate, h_system_series, r_equation_residual,
    series_residual, HSystemSeries, MAX_ELIMINATION_BLOCKS,
};
pub use fathook::{
    fat_hook_cubic, fat_hook_density, fat_hook_density_closed, fat_hook_density_continuation,
    fat_hook_discriminant, fat_hook_r, fat_hook_r_series, fat_hook_support, DensityRoute,
    DensityValue, FatHookSpectrum, QuadraticSurd,
};
pub use numeric::{
    tanh_sinh, tanh_sinh_scalar, BoundaryValue, ContinuationOptions, LimitMethod, NewtonOptions,
};
pub use poly::{BivariatePoly, IntPoly};
pub use stieltjes::{
    numeric_moments, spectrum, stieltjes_density, stieltjes_density_grid, NumericMoments,
    Spectrum,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalyticError {
    #[error("heights must be a nonempty list of positive integers")]
    BadHeights,
    #[error("elimination supports at most {max} blocks, got {blocks}")]
    DegreeGuard { blocks: usize, max: usize },
    #[error("Newton iteration did not converge after {iterations} steps (residual {residual:e})")]
    NonConvergence { iterations: usize, residual: f64 },
    #[error("branch jump near x = {x} at height {height:e} persisted after refinement")]
    BranchJump { x: f64, height: f64 },
    #[error("evaluation at the singular point z = {z}")]
    Singular { z: f64 },
    #[error("z = {z} is outside the domain of this evaluation")]
    OutsideDomain { z: f64 },
    #[error("the ε-ladder must contain at least one positive value")]
    EmptyLadder,
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error(transparent)]
    Partition(#[from] PartitionError),
}

impl AnalyticError {
    /// True for failures of an iterative numerical method.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            AnalyticError::NonConvergence { .. } | AnalyticError::BranchJump { .. }
        )
    }
}
