//! Exact truncated power series over the rationals, and the Cauchy, R and S
//! transforms of compactly supported measures as series computations.
//!
//! Conventions:
//! - `G` is stored as a series in `w = 1/z`: `G = Σ m_k w^{k+1}`.
//! - `R(z) = Σ R_{k+1} z^k` is the power-series part only; the `1/z` term is
//!   handled inside [`g_to_r`].
//! - `S` is the ordinary series with `S(z) R(z S(z)) = 1`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

/// Default truncation order.
pub const DEFAULT_ORDER: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SeriesError {
    #[error("division by a series with zero constant term")]
    ZeroConstantDivisor,
    #[error("constant term {0} is not the square of a rational")]
    NotSquare(String),
    #[error("reversion needs a zero constant term")]
    ReversionConstant,
    #[error("reversion needs a nonzero linear coefficient")]
    ReversionLinear,
    #[error("composition needs an inner series with zero constant term")]
    ComposeConstant,
    #[error("moment sequence must start with m_0 = 1")]
    MomentsNotNormalized,
    #[error("G must have the form w + O(w^2)")]
    GNotNormalized,
    #[error("transform needs a nonzero mean (constant term)")]
    ZeroMean,
    #[error("order {order} is too small for this operation")]
    OrderTooSmall { order: usize },
}

/// `c_0 + c_1 z + … + c_K z^K + O(z^{K+1})`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TruncatedSeries {
    coeffs: Vec<BigRational>,
}

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

fn sqrt_rational(q: &BigRational) -> Option<BigRational> {
    if q.is_negative() {
        return None;
    }
    let (n, d) = (q.numer(), q.denom());
    let (sn, sd) = (n.sqrt(), d.sqrt());
    (&sn * &sn == *n && &sd * &sd == *d).then(|| BigRational::new(sn, sd))
}

impl TruncatedSeries {
    /// Series with the given leading coefficients, padded with zeros or
    /// truncated to `order`.
    pub fn new(mut coeffs: Vec<BigRational>, order: usize) -> Self {
        coeffs.resize(order + 1, BigRational::zero());
        Self { coeffs }
    }

    pub fn from_ints(coeffs: &[i64], order: usize) -> Self {
        Self::new(coeffs.iter().map(|&c| rat(c)).collect(), order)
    }

    pub fn zero(order: usize) -> Self {
        Self::new(Vec::new(), order)
    }

    pub fn constant(c: BigRational, order: usize) -> Self {
        Self::new(vec![c], order)
    }

    pub fn one(order: usize) -> Self {
        Self::constant(BigRational::one(), order)
    }

    /// The variable `z` itself.
    pub fn var(order: usize) -> Self {
        Self::new(vec![BigRational::zero(), BigRational::one()], order)
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn coeff(&self, n: usize) -> BigRational {
        self.coeffs.get(n).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn truncate(&self, order: usize) -> Self {
        assert!(order <= self.order(), "cannot raise the order by truncation");
        Self::new(self.coeffs[..=order].to_vec(), order)
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|x| x * c).collect(),
        }
    }

    /// Multiplication by `z^n`; the order grows by `n`.
    pub fn shift_up(&self, n: usize) -> Self {
        let mut coeffs = vec![BigRational::zero(); n];
        coeffs.extend(self.coeffs.iter().cloned());
        Self { coeffs }
    }

    /// Division by `z^n`; the first `n` coefficients must vanish.
    pub fn shift_down(&self, n: usize) -> Result<Self, SeriesError> {
        if self.order() < n {
            return Err(SeriesError::OrderTooSmall { order: self.order() });
        }
        assert!(
            self.coeffs[..n].iter().all(Zero::is_zero),
            "shift_down would drop nonzero coefficients"
        );
        Ok(Self {
            coeffs: self.coeffs[n..].to_vec(),
        })
    }

    /// Multiplicative inverse; needs a nonzero constant term.
    pub fn inverse(&self) -> Result<Self, SeriesError> {
        let c0 = &self.coeffs[0];
        if c0.is_zero() {
            return Err(SeriesError::ZeroConstantDivisor);
        }
        let inv0 = c0.recip();
        let k = self.order();
        let mut out = vec![inv0.clone()];
        for n in 1..=k {
            let s: BigRational = (1..=n).map(|i| &self.coeffs[i] * &out[n - i]).sum();
            out.push(-s * &inv0);
        }
        Ok(Self { coeffs: out })
    }

    pub fn div(&self, other: &Self) -> Result<Self, SeriesError> {
        Ok(self * &other.inverse()?)
    }

    /// Square root with the positive rational root of the constant term.
    pub fn sqrt(&self) -> Result<Self, SeriesError> {
        let c0 = &self.coeffs[0];
        let s0 = sqrt_rational(c0).ok_or_else(|| SeriesError::NotSquare(c0.to_string()))?;
        if s0.is_zero() {
            return Err(SeriesError::NotSquare(c0.to_string()));
        }
        let two_s0 = &s0 * rat(2);
        let mut out = vec![s0];
        for n in 1..=self.order() {
            let s: BigRational = (1..n).map(|i| &out[i] * &out[n - i]).sum();
            out.push((&self.coeffs[n] - s) / &two_s0);
        }
        Ok(Self { coeffs: out })
    }

    /// `self(inner(z))`; `inner` must have zero constant term.
    pub fn compose(&self, inner: &Self) -> Result<Self, SeriesError> {
        if !inner.coeffs[0].is_zero() {
            return Err(SeriesError::ComposeConstant);
        }
        let order = self.order().min(inner.order());
        let inner = inner.truncate(order);
        let mut acc = Self::constant(self.coeffs[order].clone(), order);
        for c in self.coeffs[..order].iter().rev() {
            acc = &acc * &inner;
            acc.coeffs[0] += c;
        }
        Ok(acc)
    }

    /// Compositional inverse `g` with `self(g(z)) = z = g(self(z))`.
    pub fn reversion(&self) -> Result<Self, SeriesError> {
        if !self.coeffs[0].is_zero() {
            return Err(SeriesError::ReversionConstant);
        }
        let k = self.order();
        if k < 1 || self.coeffs[1].is_zero() {
            return Err(SeriesError::ReversionLinear);
        }
        let inv1 = self.coeffs[1].recip();
        let mut g = Self::new(vec![BigRational::zero(), inv1.clone()], k);
        // Fix one coefficient per pass: adding δz^n to g changes self(g) by c_1 δ z^n.
        for n in 2..=k {
            let e = self.compose(&g)?.coeffs[n].clone();
            g.coeffs[n] -= e * &inv1;
        }
        Ok(g)
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.coeffs
            .iter()
            .map(|c| c.to_f64().unwrap_or(f64::NAN))
            .collect()
    }

    /// Value at a real point from the truncated sum.
    pub fn eval_f64(&self, z: f64) -> f64 {
        self.to_f64().iter().rev().fold(0.0, |acc, c| acc * z + c)
    }
}

impl fmt::Display for TruncatedSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (n, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                f.write_str(if c.is_negative() { " - " } else { " + " })?;
            } else if c.is_negative() {
                f.write_str("-")?;
            }
            first = false;
            let a = c.abs();
            match n {
                0 => write!(f, "{a}")?,
                _ if a.is_one() => {}
                _ if a.is_integer() => write!(f, "{a}*")?,
                _ => write!(f, "({a})*")?,
            }
            match n {
                0 => {}
                1 => f.write_str("z")?,
                _ => write!(f, "z^{n}")?,
            }
        }
        if first {
            f.write_str("0")?;
        }
        write!(f, " + O(z^{})", self.order() + 1)
    }
}

impl Add for &TruncatedSeries {
    type Output = TruncatedSeries;
    fn add(self, rhs: Self) -> TruncatedSeries {
        let k = self.order().min(rhs.order());
        TruncatedSeries {
            coeffs: (0..=k).map(|i| &self.coeffs[i] + &rhs.coeffs[i]).collect(),
        }
    }
}

impl Sub for &TruncatedSeries {
    type Output = TruncatedSeries;
    fn sub(self, rhs: Self) -> TruncatedSeries {
        let k = self.order().min(rhs.order());
        TruncatedSeries {
            coeffs: (0..=k).map(|i| &self.coeffs[i] - &rhs.coeffs[i]).collect(),
        }
    }
}

impl Neg for &TruncatedSeries {
    type Output = TruncatedSeries;
    fn neg(self) -> TruncatedSeries {
        TruncatedSeries {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

impl Mul for &TruncatedSeries {
    type Output = TruncatedSeries;
    fn mul(self, rhs: Self) -> TruncatedSeries {
        let k = self.order().min(rhs.order());
        let mut coeffs = vec![BigRational::zero(); k + 1];
        for (i, a) in self.coeffs[..=k].iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs[..=k - i].iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        TruncatedSeries { coeffs }
    }
}

/// `G = Σ m_k w^{k+1}`, known through `w^{min(K, len m)}`.
pub fn moments_to_g(moments: &[BigRational], order: usize) -> Result<TruncatedSeries, SeriesError> {
    if moments.first().is_none_or(|m0| !m0.is_one()) {
        return Err(SeriesError::MomentsNotNormalized);
    }
    let order = order.min(moments.len());
    let mut coeffs = vec![BigRational::zero()];
    coeffs.extend(moments.iter().take(order).cloned());
    Ok(TruncatedSeries::new(coeffs, order))
}

/// R-transform from `G(w)`: with `G(g(z)) = z`, `R(z) = 1/g(z) − 1/z`.
///
/// The result has order `K − 2` when `G` has order `K`.
pub fn g_to_r(g: &TruncatedSeries) -> Result<TruncatedSeries, SeriesError> {
    if g.order() < 2 || !g.coeff(0).is_zero() || !g.coeff(1).is_one() {
        return Err(SeriesError::GNotNormalized);
    }
    let ginv = g.reversion().map_err(|_| SeriesError::GNotNormalized)?;
    let q = ginv.shift_down(1)?;
    let recip = q.inverse()?;
    (&recip - &TruncatedSeries::one(recip.order())).shift_down(1)
}

/// S-transform from R by the fixed point `S = 1/R(z S)`.
pub fn r_to_s(r: &TruncatedSeries) -> Result<TruncatedSeries, SeriesError> {
    if r.coeff(0).is_zero() {
        return Err(SeriesError::ZeroMean);
    }
    let k = r.order();
    let mut s = TruncatedSeries::constant(r.coeff(0).recip(), k);
    // Each pass fixes one more coefficient.
    for _ in 0..=k {
        let inner = s.shift_up(1).truncate(k);
        s = r.compose(&inner)?.inverse()?;
    }
    Ok(s)
}

/// R-transform from S: with `φ(z) = z S(z)`, `R(y) = 1/S(φ^{-1}(y))`.
pub fn s_to_r(s: &TruncatedSeries) -> Result<TruncatedSeries, SeriesError> {
    if s.coeff(0).is_zero() {
        return Err(SeriesError::ZeroMean);
    }
    let phi_inv = s.shift_up(1).reversion()?;
    s.compose(&phi_inv)?.truncate(s.order()).inverse()
}

/// Additive free convolution: R-transforms add.
pub fn free_add(r1: &TruncatedSeries, r2: &TruncatedSeries) -> TruncatedSeries {
    r1 + r2
}

/// Multiplicative free convolution: S-transforms multiply.
pub fn free_mul(s1: &TruncatedSeries, s2: &TruncatedSeries) -> TruncatedSeries {
    s1 * s2
}

/// Residual `S(z) R(z S(z)) − 1` of the S-transform identity.
pub fn s_identity_residual(
    r: &TruncatedSeries,
    s: &TruncatedSeries,
) -> Result<TruncatedSeries, SeriesError> {
    let k = r.order().min(s.order());
    let inner = s.shift_up(1).truncate(k);
    let lhs = s * &r.compose(&inner)?;
    Ok(&lhs - &TruncatedSeries::one(k))
}

/// Moments of the Marchenko–Pastur law MP(α, β):
/// `m_k = β^k Σ_j N(k, j) α^j` with Narayana numbers `N(k, j)`.
pub fn mp_moments(alpha: &BigRational, beta: &BigRational, kmax: usize) -> Vec<BigRational> {
    (0..=kmax)
        .map(|k| {
            if k == 0 {
                return BigRational::one();
            }
            let sum: BigRational = (1..=k)
                .map(|j| {
                    let n = crate::enumeration::binom(k as i64, j as i64)
                        * crate::enumeration::binom(k as i64, j as i64 - 1)
                        / k;
                    BigRational::from_integer(n.into()) * alpha.pow(j as i32)
                })
                .sum();
            sum * beta.pow(k as i32)
        })
        .collect()
}

/// `R_MP(z) = αβ / (1 − βz)`.
pub fn mp_r(alpha: &BigRational, beta: &BigRational, order: usize) -> TruncatedSeries {
    let ab = alpha * beta;
    TruncatedSeries::new(
        (0..=order).map(|k| &ab * beta.pow(k as i32)).collect(),
        order,
    )
}

/// `S_MP(z) = 1 / (β(α + z))`.
pub fn mp_s(alpha: &BigRational, beta: &BigRational, order: usize) -> TruncatedSeries {
    let lead = (alpha * beta).recip();
    let ratio = -alpha.recip();
    TruncatedSeries::new(
        (0..=order).map(|k| &lead * ratio.pow(k as i32)).collect(),
        order,
    )
}

/// Moments of Ber(p) = (1 − p)δ_0 + pδ_1.
pub fn bernoulli_moments(p: &BigRational, kmax: usize) -> Vec<BigRational> {
    (0..=kmax)
        .map(|k| if k == 0 { BigRational::one() } else { p.clone() })
        .collect()
}

/// `R_Ber(z) = (z − 1 + √(1 − 2(1 − 2p)z + z²)) / (2z)`.
pub fn bernoulli_r(p: &BigRational, order: usize) -> TruncatedSeries {
    let k = order + 1;
    let b = -(BigRational::one() - p * rat(2)) * rat(2);
    let radicand = TruncatedSeries::new(vec![BigRational::one(), b, BigRational::one()], k);
    let root = radicand.sqrt().expect("constant term 1");
    let num = &(&root + &TruncatedSeries::from_ints(&[-1, 1], k)).scale(&BigRational::new(1.into(), 2.into()));
    num.shift_down(1).expect("numerator vanishes at 0")
}

/// `S_Ber(z) = (1 + z) / (p + z)`; needs `p ≠ 0`.
pub fn bernoulli_s(p: &BigRational, order: usize) -> Result<TruncatedSeries, SeriesError> {
    let den = TruncatedSeries::new(vec![p.clone(), BigRational::one()], order);
    TruncatedSeries::from_ints(&[1, 1], order).div(&den)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::enumeration::moments;
    use crate::partitions::Partition;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn ints(v: &[i64]) -> Vec<BigRational> {
        v.iter().map(|&x| rat(x)).collect()
    }

    #[test]
    fn reversion_gives_catalan() {
        let f = TruncatedSeries::from_ints(&[0, 1, -1], 4);
        let g = f.reversion().unwrap();
        assert_eq!(g.coeffs(), ints(&[0, 1, 1, 2, 5]).as_slice());
        assert_eq!(f.compose(&g).unwrap(), TruncatedSeries::var(4));
        assert_eq!(g.compose(&f).unwrap(), TruncatedSeries::var(4));
    }

    #[test]
    fn sqrt_binomial() {
        let s = TruncatedSeries::from_ints(&[1, 1], 3).sqrt().unwrap();
        assert_eq!(s.coeffs(), &[q(1, 1), q(1, 2), q(-1, 8), q(1, 16)]);
        let s4 = TruncatedSeries::new(vec![q(9, 4), q(3, 1)], 3).sqrt().unwrap();
        assert_eq!(&s4 * &s4, TruncatedSeries::new(vec![q(9, 4), q(3, 1)], 3));
        assert!(matches!(
            TruncatedSeries::from_ints(&[2, 1], 3).sqrt(),
            Err(SeriesError::NotSquare(_))
        ));
    }

    #[test]
    fn compose_with_zero() {
        let f = TruncatedSeries::from_ints(&[7, 3, 2], 4);
        assert_eq!(
            f.compose(&TruncatedSeries::zero(4)).unwrap(),
            TruncatedSeries::from_ints(&[7], 4)
        );
    }

    #[test]
    fn distinct_errors() {
        let c = TruncatedSeries::from_ints(&[1, 1], 4);
        let z = TruncatedSeries::var(4);
        assert_eq!(c.div(&z), Err(SeriesError::ZeroConstantDivisor));
        assert_eq!(c.reversion(), Err(SeriesError::ReversionConstant));
        assert_eq!(
            TruncatedSeries::from_ints(&[0, 0, 1], 4).reversion(),
            Err(SeriesError::ReversionLinear)
        );
        assert_eq!(c.compose(&c), Err(SeriesError::ComposeConstant));
        assert_eq!(moments_to_g(&ints(&[2, 1]), 4), Err(SeriesError::MomentsNotNormalized));
        assert_eq!(r_to_s(&z), Err(SeriesError::ZeroMean));
    }

    #[test]
    fn orders_are_tracked() {
        let a = TruncatedSeries::from_ints(&[1, 2], 3);
        let b = TruncatedSeries::from_ints(&[1, 2], 5);
        assert_eq!((&a * &b).order(), 3);
        assert_eq!((&a + &b).order(), 3);
        assert_eq!(a.compose(&TruncatedSeries::var(2)).unwrap().order(), 2);
    }

    #[test]
    fn cauchy_transform_series() {
        let cat = ints(&[1, 1, 2, 5, 14]);
        let g = moments_to_g(&cat, 4).unwrap();
        assert_eq!(g.coeffs(), ints(&[0, 1, 1, 2, 5]).as_slice());

        let stair = Partition::new(vec![2, 1]).unwrap();
        let m = moments(&stair, 3).unwrap();
        let g = moments_to_g(&m, 4).unwrap();
        assert_eq!(g.coeffs(), &[q(0, 1), q(1, 1), q(3, 2), q(5, 1), q(21, 1)]);

        let point = moments_to_g(&ints(&[1, 0, 0, 0]), 4).unwrap();
        assert_eq!(point, TruncatedSeries::var(4));
        assert!(g_to_r(&point).unwrap().is_zero());
    }

    #[test]
    fn mp_transforms() {
        for (a, b) in [(q(1, 1), q(1, 1)), (q(1, 3), q(3, 1)), (q(5, 2), q(2, 7))] {
            let g = moments_to_g(&mp_moments(&a, &b, 18), 18).unwrap();
            let r = g_to_r(&g).unwrap();
            assert_eq!(r.order(), 16);
            assert_eq!(r, mp_r(&a, &b, 16));
            let s = r_to_s(&r).unwrap();
            assert_eq!(s, mp_s(&a, &b, 16));
            assert!(s_identity_residual(&r, &s).unwrap().is_zero());
            assert_eq!(s_to_r(&s).unwrap(), r);
        }
    }

    #[test]
    fn bernoulli_transforms() {
        for p in [q(1, 2), q(1, 3), q(3, 4), q(1, 1)] {
            let g = moments_to_g(&bernoulli_moments(&p, 14), 14).unwrap();
            let r = g_to_r(&g).unwrap();
            assert_eq!(r, bernoulli_r(&p, 12));
            let s = r_to_s(&r).unwrap();
            assert_eq!(s, bernoulli_s(&p, 12).unwrap());
        }
    }

    #[test]
    fn constant_r_is_point_mass() {
        let r = TruncatedSeries::constant(q(5, 3), 8);
        assert_eq!(r_to_s(&r).unwrap(), TruncatedSeries::constant(q(3, 5), 8));
    }

    #[test]
    fn convolution_identities() {
        let r = mp_r(&q(1, 2), &q(2, 1), 10);
        assert_eq!(free_add(&r, &TruncatedSeries::zero(10)), r);
        let s = mp_s(&q(1, 2), &q(2, 1), 10);
        assert_eq!(free_mul(&bernoulli_s(&q(1, 1), 10).unwrap(), &s), s);
    }

    /// R of the fat-hook limit equals R_MP + R(MP ⊠ Ber), both sides exact.
    #[test]
    fn fat_hook_decomposition() {
        for (a1, a2) in [(1usize, 1usize), (2, 1), (1, 3)] {
            let ell = (a1 + a2) as i64;
            let lambda = Partition::self_conjugate_from_heights(&[a1, a2]).unwrap();
            let g = moments_to_g(&moments(&lambda, 14).unwrap(), 14).unwrap();
            let lhs = g_to_r(&g).unwrap();
            assert_eq!(lhs.order(), 12);

            let alpha = q(a1 as i64, ell);
            let beta = rat(ell);
            let s2 = free_mul(
                &mp_s(&alpha, &beta, 12),
                &bernoulli_s(&q(a2 as i64, ell), 12).unwrap(),
            );
            // ℓ(1 + z) / (a1 a2 + ℓ² z + ℓ² z²), symmetric in a1, a2
            let closed = TruncatedSeries::from_ints(&[ell, ell], 12)
                .div(&TruncatedSeries::from_ints(
                    &[(a1 * a2) as i64, ell * ell, ell * ell],
                    12,
                ))
                .unwrap();
            assert_eq!(s2, closed);
            let swapped = free_mul(
                &mp_s(&q(a2 as i64, ell), &beta, 12),
                &bernoulli_s(&q(a1 as i64, ell), 12).unwrap(),
            );
            assert_eq!(swapped, closed);

            let rhs = free_add(&mp_r(&alpha, &beta, 12), &s_to_r(&s2).unwrap());
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn display() {
        let s = TruncatedSeries::new(vec![q(1, 1), q(-1, 2), q(0, 1), q(3, 1)], 3);
        assert_eq!(s.to_string(), "1 - (1/2)*z + 3*z^3 + O(z^4)");
    }
}
