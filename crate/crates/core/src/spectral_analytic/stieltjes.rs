//! Numerical Stieltjes inversion for general self-conjugate shapes, by
//! continuation of the block system toward the real axis.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use super::elimination::cauchy_equation;
use super::numeric::{boundary_value, tanh_sinh, BoundaryValue, ComplexSystem, ContinuationOptions};
use super::AnalyticError;
use crate::partitions::Partition;

/// `y_j = w + y_j Σ_{i ≤ r−j+1} a_i y_i` with `w = 1/z` and
/// `G(z) = (1/ℓ) Σ a_j y_j`.
pub struct HSystem {
    a: Vec<f64>,
    ell: f64,
}

impl HSystem {
    pub fn new(heights: &[usize]) -> Result<Self, AnalyticError> {
        if heights.is_empty() || heights.contains(&0) {
            return Err(AnalyticError::BadHeights);
        }
        Ok(Self {
            a: heights.iter().map(|&x| x as f64).collect(),
            ell: heights.iter().sum::<usize>() as f64,
        })
    }

    fn sums(&self, y: &[Complex64]) -> Vec<Complex64> {
        let r = self.a.len();
        let mut prefix = Vec::with_capacity(r);
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..r {
            acc += y[i] * self.a[i];
            prefix.push(acc);
        }
        // S_j = prefix over i ≤ r−j+1, i.e. prefix[r−1−j] in 0-based indices
        (0..r).map(|j| prefix[r - 1 - j]).collect()
    }
}

impl ComplexSystem for HSystem {
    fn dim(&self) -> usize {
        self.a.len()
    }

    fn residual(&self, z: Complex64, y: &[Complex64]) -> Vec<Complex64> {
        let w = z.inv();
        let s = self.sums(y);
        (0..y.len()).map(|j| y[j] - w - y[j] * s[j]).collect()
    }

    fn scaled_residual(&self, z: Complex64, y: &[Complex64]) -> Vec<Complex64> {
        let w = z.inv();
        let s = self.sums(y);
        (0..y.len())
            .map(|j| {
                let scale = y[j].norm() + w.norm() + (y[j] * s[j]).norm();
                (y[j] - w - y[j] * s[j]) / scale.max(1e-300)
            })
            .collect()
    }

    fn jacobian(&self, _z: Complex64, y: &[Complex64]) -> DMatrix<Complex64> {
        let r = self.a.len();
        let s = self.sums(y);
        DMatrix::from_fn(r, r, |j, k| {
            let diag = if j == k { Complex64::new(1.0, 0.0) - s[j] } else { Complex64::new(0.0, 0.0) };
            if k < r - j {
                diag - y[j] * self.a[k]
            } else {
                diag
            }
        })
    }

    fn seed(&self, z: Complex64) -> Vec<Complex64> {
        vec![z.inv(); self.a.len()]
    }

    fn cauchy(&self, y: &[Complex64]) -> Complex64 {
        y.iter().zip(&self.a).map(|(yi, ai)| yi * ai).sum::<Complex64>() / self.ell
    }
}

/// Density of the continuous part at `x > 0`.
pub fn stieltjes_density(
    heights: &[usize],
    x: f64,
    opts: &ContinuationOptions,
) -> Result<BoundaryValue, AnalyticError> {
    if !(x > 0.0) {
        return Err(AnalyticError::OutsideDomain { z: x });
    }
    boundary_value(&HSystem::new(heights)?, x, opts)
}

/// Densities on a grid, evaluated in parallel; output order follows `xs`.
pub fn stieltjes_density_grid(
    heights: &[usize],
    xs: &[f64],
    opts: &ContinuationOptions,
) -> Result<Vec<BoundaryValue>, AnalyticError> {
    let sys = HSystem::new(heights)?;
    xs.par_iter()
        .map(|&x| {
            if !(x > 0.0) {
                return Err(AnalyticError::OutsideDomain { z: x });
            }
            boundary_value(&sys, x, opts)
        })
        .collect()
}

/// Atom at zero and support intervals of the continuous part.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub heights: Vec<usize>,
    /// Generic kernel dimension over ℓ.
    pub atom: f64,
    /// Real roots of the discriminant of `L^λ` in `G`, nonnegative only.
    pub critical_points: Vec<f64>,
    pub intervals: Vec<(f64, f64)>,
}

/// Locates the support from the discriminant of `L^λ(G, z)` in `G`: the
/// density can only switch on or off at its real roots, so each gap between
/// consecutive nonnegative roots is tested at its midpoint.
pub fn spectrum(heights: &[usize], opts: &ContinuationOptions) -> Result<Spectrum, AnalyticError> {
    let lambda = Partition::self_conjugate_from_heights(heights)?;
    let ell = lambda.len() as f64;
    let atom = lambda.generic_kernel_dim() as f64 / ell;
    let l = cauchy_equation(heights)?;
    let mut pts: Vec<f64> = l
        .discriminant_x()
        .real_roots()
        .into_iter()
        .filter(|&z| z >= 0.0)
        .collect();
    if pts.first() != Some(&0.0) {
        pts.insert(0, 0.0);
    }
    let mut intervals: Vec<(f64, f64)> = Vec::new();
    for w in pts.windows(2) {
        let mid = 0.5 * (w[0] + w[1]);
        let d = stieltjes_density(heights, mid, opts)?.density;
        if d > 1e-9 {
            match intervals.last_mut() {
                Some(last) if last.1 == w[0] => last.1 = w[1],
                _ => intervals.push((w[0], w[1])),
            }
        }
    }
    Ok(Spectrum {
        heights: heights.to_vec(),
        atom,
        critical_points: pts,
        intervals,
    })
}

/// `∫ x^k f(x) dx` for `k ≤ kmax` over the support, plus the atom at `k = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct NumericMoments {
    pub moments: Vec<f64>,
    pub quadrature_error: f64,
    pub spectrum: Spectrum,
}

pub fn numeric_moments(
    heights: &[usize],
    kmax: usize,
    tol: f64,
    opts: &ContinuationOptions,
) -> Result<NumericMoments, AnalyticError> {
    let spec = spectrum(heights, opts)?;
    let sys = HSystem::new(heights)?;
    let mut moments = vec![0.0; kmax + 1];
    moments[0] = spec.atom;
    let mut err = 0.0f64;
    let failure = std::sync::Mutex::new(None);
    for &(lo, hi) in &spec.intervals {
        let q = tanh_sinh(
            |x| {
                let f = match boundary_value(&sys, x, opts) {
                    Ok(bv) => bv.density,
                    Err(e) => {
                        failure.lock().unwrap().get_or_insert(e);
                        0.0
                    }
                };
                (0..=kmax).map(|k| f * x.powi(k as i32)).collect()
            },
            lo,
            hi,
            tol,
            8,
        );
        for (m, v) in moments.iter_mut().zip(&q.values) {
            *m += v;
        }
        err = err.max(q.error);
    }
    if let Some(e) = failure.into_inner().unwrap() {
        return Err(e);
    }
    Ok(NumericMoments {
        moments,
        quadrature_error: err,
        spectrum: spec,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::enumeration::staircase_count;
    use crate::spectral_analytic::fathook::{fat_hook_density_closed, fat_hook_support};
    use num_traits::ToPrimitive;

    #[test]
    fn single_block_is_marchenko_pastur() {
        let opts = ContinuationOptions::default();
        for i in 1..40 {
            let x = 4.0 * i as f64 / 40.0;
            let d = stieltjes_density(&[1], x, &opts).unwrap().density;
            let exact = (x * (4.0 - x)).sqrt() / (2.0 * std::f64::consts::PI * x);
            assert!((d - exact).abs() < 1e-4, "x={x}: {d} vs {exact}");
        }
    }

    #[test]
    fn two_equal_blocks_match_closed_form() {
        let opts = ContinuationOptions::default();
        let zp = fat_hook_support(1, 1).unwrap().z_plus;
        let xs: Vec<f64> = (0..50).map(|i| 0.1 + (zp - 0.2) * i as f64 / 49.0).collect();
        let vals = stieltjes_density_grid(&[1, 1], &xs, &opts).unwrap();
        for (x, v) in xs.iter().zip(vals) {
            let exact = fat_hook_density_closed(1, 1, *x);
            assert!((v.density - exact).abs() < 1e-4, "x={x}");
        }
    }

    #[test]
    fn staircase_support_and_moments() {
        let opts = ContinuationOptions::default();
        let m = numeric_moments(&[1, 1, 1], 4, 1e-9, &opts).unwrap();
        assert_eq!(m.spectrum.intervals.len(), 1);
        let (lo, hi) = m.spectrum.intervals[0];
        assert_eq!(lo, 0.0);
        assert!((hi - 256.0 / 27.0).abs() < 1e-9, "{hi}");
        for k in 0..=4 {
            let exact = staircase_count(3, k).to_f64().unwrap() / 3.0;
            assert!((m.moments[k] - exact).abs() <= 1e-3 * exact, "k={k}: {}", m.moments[k]);
        }
    }

    #[test]
    fn hook_atom_and_gap() {
        let opts = ContinuationOptions::default();
        let s = spectrum(&[1, 2], &opts).unwrap();
        assert!((s.atom - 1.0 / 3.0).abs() < 1e-15);
        let fh = fat_hook_support(1, 2).unwrap();
        assert_eq!(s.intervals.len(), 1);
        assert!((s.intervals[0].0 - fh.z_minus).abs() < 1e-9);
        assert!((s.intervals[0].1 - fh.z_plus).abs() < 1e-9);
    }
}
