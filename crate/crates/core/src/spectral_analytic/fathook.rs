//! Closed forms for fat hooks `λ = ((a1+a2)^{a1}, a1^{a2})`.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use super::numeric::{boundary_value, BoundaryValue, ComplexSystem, ContinuationOptions};
use super::poly::{BivariatePoly, IntPoly};
use super::AnalyticError;
use crate::powerseries::TruncatedSeries;

fn check(a1: usize, a2: usize) -> Result<(), AnalyticError> {
    if a1 == 0 || a2 == 0 {
        Err(AnalyticError::BadHeights)
    } else {
        Ok(())
    }
}

/// `ℓ³z²G³ + (a1 − a2 − 2z)ℓ²zG² + (2a2 + z)ℓzG + (a1² − ℓz)`, unnormalized.
pub fn fat_hook_cubic(a1: usize, a2: usize) -> Result<BivariatePoly, AnalyticError> {
    check(a1, a2)?;
    let (a1, a2) = (a1 as i64, a2 as i64);
    let l = a1 + a2;
    Ok(BivariatePoly::from_terms(&[
        ((3, 2), l.pow(3)),
        ((2, 1), (a1 - a2) * l * l),
        ((2, 2), -2 * l * l),
        ((1, 1), 2 * a2 * l),
        ((1, 2), l),
        ((0, 0), a1 * a1),
        ((0, 1), -l),
    ]))
}

/// `z³ℓ⁶a1²(4a2z² + (a1² − 20a1a2 − 8a2²)z − 4(a1 − a2)³)`.
pub fn fat_hook_discriminant(a1: usize, a2: usize) -> Result<IntPoly, AnalyticError> {
    check(a1, a2)?;
    let (a1, a2) = (BigInt::from(a1), BigInt::from(a2));
    let l: BigInt = &a1 + &a2;
    let pre = l.pow(6) * &a1 * &a1;
    let diff = &a1 - &a2;
    let quad = [
        -BigInt::from(4) * diff.pow(3),
        &a1 * &a1 - BigInt::from(20) * &a1 * &a2 - BigInt::from(8) * &a2 * &a2,
        BigInt::from(4) * &a2,
    ];
    let mut c = vec![BigInt::zero(); 3];
    c.extend(quad.iter().map(|q| q * &pre));
    Ok(IntPoly::new(c))
}

/// R-transform as a series of the given order:
/// `a1/(1 − ℓz) + (√((1 − (a2−a1)²z/ℓ)/(1 − ℓz)) − 1)/(2z)`.
pub fn fat_hook_r_series(a1: usize, a2: usize, order: usize) -> Result<TruncatedSeries, AnalyticError> {
    check(a1, a2)?;
    let k = order + 1;
    let l = (a1 + a2) as i64;
    let d = a2 as i64 - a1 as i64;
    let geometric = TruncatedSeries::from_ints(&[1, -l], k).inverse()?;
    let num = TruncatedSeries::new(
        vec![
            BigRational::from_integer(1.into()),
            -BigRational::new((d * d).into(), l.into()),
        ],
        k,
    );
    let root = (&num * &geometric).sqrt()?;
    let second = (&root - &TruncatedSeries::one(k))
        .shift_down(1)?
        .scale(&BigRational::new(1.into(), 2.into()));
    let first = geometric.truncate(order).scale(&BigRational::from_integer(a1.into()));
    Ok(&first + &second)
}

/// R-transform at a real `z < 1/ℓ`, on the branch analytic at `z = 0`.
pub fn fat_hook_r(a1: usize, a2: usize, z: f64) -> Result<f64, AnalyticError> {
    check(a1, a2)?;
    let l = (a1 + a2) as f64;
    let d2 = (a2 as f64 - a1 as f64).powi(2);
    let pole = 1.0 / l;
    if (z - pole).abs() <= 1e-12 * pole {
        return Err(AnalyticError::Singular { z });
    }
    if d2 > 0.0 && (z - l / d2).abs() <= 1e-12 * (l / d2) {
        return Err(AnalyticError::Singular { z });
    }
    if z.abs() < 1e-4 / l {
        return Ok(fat_hook_r_series(a1, a2, 12)?.eval_f64(z));
    }
    // beyond the pole the real branch through 0 is not defined
    let ratio = (1.0 - d2 * z / l) / (1.0 - l * z);
    if z > pole || ratio < 0.0 {
        return Err(AnalyticError::OutsideDomain { z });
    }
    Ok(a1 as f64 / (1.0 - l * z) + (ratio.sqrt() - 1.0) / (2.0 * z))
}

/// `(A ± B√C) / D` with integer data.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QuadraticSurd {
    pub a: i64,
    pub b: i64,
    pub c: i64,
    pub d: i64,
}

impl QuadraticSurd {
    pub fn minus(&self) -> f64 {
        (self.a as f64 - self.b as f64 * (self.c as f64).sqrt()) / self.d as f64
    }

    pub fn plus(&self) -> f64 {
        (self.a as f64 + self.b as f64 * (self.c as f64).sqrt()) / self.d as f64
    }
}

impl std::fmt::Display for QuadraticSurd {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({} ± {}√{})/{}", self.a, self.b, self.c, self.d)
    }
}

/// Atom at zero and the support of the continuous part for a fat hook.
#[derive(Debug, Clone, PartialEq)]
pub struct FatHookSpectrum {
    pub a1: usize,
    pub a2: usize,
    pub ell: usize,
    /// `max{a2 − a1, 0} / ℓ`.
    pub atom_mass: BigRational,
    /// Roots of the quadratic factor of the discriminant.
    pub z_minus: f64,
    pub z_plus: f64,
    pub surd: QuadraticSurd,
}

impl FatHookSpectrum {
    /// Support of the density, `[z−, z+] ∩ [0, ∞)`.
    pub fn support(&self) -> (f64, f64) {
        (self.z_minus.max(0.0), self.z_plus)
    }

    pub fn atom(&self) -> f64 {
        self.atom_mass.to_f64().unwrap_or(0.0)
    }

    pub fn has_gap(&self) -> bool {
        self.z_minus > 0.0
    }
}

/// Roots of `4a2z² + (a1² − 20a1a2 − 8a2²)z − 4(a1 − a2)³`:
/// `z± = (8a2² + 20a1a2 − a1² ± (a1 + 8a2)√(a1² + 8a1a2)) / (8a2)`.
pub fn fat_hook_support(a1: usize, a2: usize) -> Result<FatHookSpectrum, AnalyticError> {
    check(a1, a2)?;
    let (x, y) = (a1 as i64, a2 as i64);
    let surd = QuadraticSurd {
        a: 8 * y * y + 20 * x * y - x * x,
        b: x + 8 * y,
        c: x * x + 8 * x * y,
        d: 8 * y,
    };
    let ell = a1 + a2;
    // when a1 = a2 the smaller root is exactly 0
    let z_minus = if a1 == a2 { 0.0 } else { surd.minus() };
    Ok(FatHookSpectrum {
        a1,
        a2,
        ell,
        atom_mass: BigRational::new(BigInt::from((y - x).max(0)), BigInt::from(ell)),
        z_minus,
        z_plus: surd.plus(),
        surd,
    })
}

/// Which evaluation produced a density value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DensityRoute {
    ClosedForm,
    Continuation,
    /// `x` outside the support; the value is 0.
    Outside,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityValue {
    pub x: f64,
    pub value: f64,
    pub route: DensityRoute,
}

/// Coefficients of `2(a2 − x)³ − 6a1(a2 − x)(a2 + 2x) + 3a1²(2a2 − 5x) − 2a1³`.
fn p_inner(a1: i128, a2: i128) -> [i128; 4] {
    [
        2 * (a2 - a1).pow(3),
        -6 * a2 * a2 - 6 * a1 * a2 - 15 * a1 * a1,
        6 * a2 + 12 * a1,
        -2,
    ]
}

/// `27(P² + D) / (ℓ⁶x²)` as a polynomial in `x`, expanded exactly so that
/// the cancellation between `P` and `√(−D)` near the edges happens in
/// integer arithmetic.
fn rationalized(a1: i128, a2: i128) -> [i128; 7] {
    let p = p_inner(a1, a2);
    let mut out = [0i128; 7];
    for i in 0..4 {
        for j in 0..4 {
            out[i + j] += p[i] * p[j];
        }
    }
    let quad = [
        -4 * (a1 - a2).pow(3),
        a1 * a1 - 20 * a1 * a2 - 8 * a2 * a2,
        4 * a2,
    ];
    for (k, q) in quad.iter().enumerate() {
        out[k + 1] += 27 * a1 * a1 * q;
    }
    out
}

fn horner(c: &[i128], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &ci| acc * x + ci as f64)
}

/// Closed-form density (route A), from `P_λ(x)` and the discriminant.
/// Returns 0 where `D(x) ≥ 0`.
pub fn fat_hook_density_closed(a1: usize, a2: usize, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    let (i1, i2) = (a1 as i128, a2 as i128);
    let (a1, a2) = (a1 as f64, a2 as f64);
    let l = a1 + a2;
    let quad = 4.0 * a2 * x * x + (a1 * a1 - 20.0 * a1 * a2 - 8.0 * a2 * a2) * x
        - 4.0 * (a1 - a2).powi(3);
    let d = x.powi(3) * l.powi(6) * a1 * a1 * quad;
    if d >= 0.0 {
        return 0.0;
    }
    let p = 3f64.powf(-1.5) * l.powi(3) * x * horner(&p_inner(i1, i2), x);
    let root = (-d).sqrt();
    // P + √(−D), rationalized when the two terms cancel
    let s = if p >= 0.0 {
        p + root
    } else {
        l.powi(6) * x * x * horner(&rationalized(i1, i2), x) / 27.0 / (p - root)
    };
    let w = s.abs().cbrt();
    let diff = a2 - a1;
    let q = 2f64.powf(2.0 / 3.0) / 3.0
        * x.powf(2.0 / 3.0)
        * l
        * l
        * (-diff * diff + (6.0 * a2 - 4.0 * diff) * x - x * x);
    (w + q / w).abs() / (PI * l * l * 2f64.powf(4.0 / 3.0) * x.powf(4.0 / 3.0))
}

/// The cubic `L(G, z) = 0` as a one-unknown system for continuation.
pub struct CubicSystem {
    coeffs: [[f64; 3]; 4],
}

impl CubicSystem {
    pub fn new(l: &BivariatePoly) -> Self {
        let mut coeffs = [[0.0; 3]; 4];
        for ((i, j), c) in l.terms() {
            coeffs[i][j] = c.to_f64().unwrap_or(f64::NAN);
        }
        Self { coeffs }
    }

    fn g_coeffs(&self, z: Complex64) -> [Complex64; 4] {
        self.coeffs
            .map(|row| row.iter().rev().fold(Complex64::zero(), |acc, c| acc * z + c))
    }
}

impl ComplexSystem for CubicSystem {
    fn dim(&self) -> usize {
        1
    }

    fn residual(&self, z: Complex64, y: &[Complex64]) -> Vec<Complex64> {
        let c = self.g_coeffs(z);
        vec![c.iter().rev().fold(Complex64::zero(), |acc, ci| acc * y[0] + ci)]
    }

    fn scaled_residual(&self, z: Complex64, y: &[Complex64]) -> Vec<Complex64> {
        let c = self.g_coeffs(z);
        let g = y[0].norm();
        let s: f64 = c.iter().enumerate().map(|(i, ci)| ci.norm() * g.powi(i as i32)).sum();
        vec![self.residual(z, y)[0] / s.max(1e-300)]
    }

    fn jacobian(&self, z: Complex64, y: &[Complex64]) -> DMatrix<Complex64> {
        let c = self.g_coeffs(z);
        let d = c[1] + c[2] * y[0] * 2.0 + c[3] * y[0] * y[0] * 3.0;
        DMatrix::from_element(1, 1, d)
    }

    fn seed(&self, z: Complex64) -> Vec<Complex64> {
        vec![z.inv()]
    }

    fn cauchy(&self, y: &[Complex64]) -> Complex64 {
        y[0]
    }
}

/// Density by continuation of the physical root of the cubic (route B).
pub fn fat_hook_density_continuation(
    a1: usize,
    a2: usize,
    x: f64,
    opts: &ContinuationOptions,
) -> Result<BoundaryValue, AnalyticError> {
    let sys = CubicSystem::new(&fat_hook_cubic(a1, a2)?);
    boundary_value(&sys, x, opts)
}

/// Relative distance to an endpoint below which only route B is used.
pub const ENDPOINT_GUARD: f64 = 1e-6;

/// Density of the continuous part at `x`. Outside the support the value
/// is 0 with [`DensityRoute::Outside`].
pub fn fat_hook_density(a1: usize, a2: usize, x: f64) -> Result<DensityValue, AnalyticError> {
    let spec = fat_hook_support(a1, a2)?;
    let (lo, hi) = spec.support();
    if !(x > lo && x < hi) {
        return Ok(DensityValue {
            x,
            value: 0.0,
            route: DensityRoute::Outside,
        });
    }
    let guard = ENDPOINT_GUARD * (hi - lo);
    if x - lo < guard || hi - x < guard {
        let bv = fat_hook_density_continuation(a1, a2, x, &ContinuationOptions::default())?;
        return Ok(DensityValue {
            x,
            value: bv.density,
            route: DensityRoute::Continuation,
        });
    }
    Ok(DensityValue {
        x,
        value: fat_hook_density_closed(a1, a2, x),
        route: DensityRoute::ClosedForm,
    })
}
