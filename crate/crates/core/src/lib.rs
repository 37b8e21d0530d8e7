//! Limiting spectral theory of random matrices shaped like self-conjugate
//! Young diagrams.
//!
//! - [`partitions`]: Young diagram algebra, block maps, kernel dimensions.
//! - [`enumeration`]: exact counts of λ-plane trees (the limiting moments).
//! - [`dyckpaths`]: λ-Dyck paths and their bijection with λ-plane trees.
//! - [`powerseries`]: exact truncated series and Cauchy/R/S transforms.
//! - [`spectral_analytic`]: algebraic equations, fat-hook closed forms and
//!   numerical Stieltjes inversion.
//! - [`matrix_mc`]: seeded Monte Carlo sampling of shaped random matrices.

pub mod dyckpaths;
pub mod enumeration;
pub mod matrix_mc;
pub mod partitions;
pub mod powerseries;
pub mod spectral_analytic;

pub use partitions::{parse_heights, parse_partition, Partition, PartitionError};
