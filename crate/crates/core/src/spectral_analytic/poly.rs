//! Dense polynomials over an exact gcd domain, nested to get `Z[z]` and
//! `Z[z][G]`, with primitive-PRS gcds, fraction-free determinants,
//! resultants and discriminants.

use std::fmt::{self, Debug};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::powerseries::TruncatedSeries;

/// The exact arithmetic needed by [`Poly`].
pub trait Ring: Clone + PartialEq + Debug {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;
    /// Division known to be exact; panics otherwise.
    fn div_exact(&self, divisor: &Self) -> Self;
    /// Greatest common divisor, normalized by [`Ring::normalize`].
    fn gcd(&self, other: &Self) -> Self;
    /// True if the innermost leading coefficient is negative.
    fn lead_negative(&self) -> bool;

    fn normalize(&self) -> Self {
        if self.lead_negative() {
            self.neg()
        } else {
            self.clone()
        }
    }
}

impl Ring for BigInt {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn neg(&self) -> Self {
        -self
    }
    fn div_exact(&self, divisor: &Self) -> Self {
        let (q, r) = self.div_rem(divisor);
        assert!(Zero::is_zero(&r), "inexact integer division");
        q
    }
    fn gcd(&self, other: &Self) -> Self {
        Integer::gcd(self, other)
    }
    fn lead_negative(&self) -> bool {
        self.is_negative()
    }
}

/// `c[0] + c[1] x + …`, never with a zero leading coefficient.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Poly<R: Ring> {
    c: Vec<R>,
}

pub type IntPoly = Poly<BigInt>;

impl<R: Ring> Poly<R> {
    pub fn new(mut c: Vec<R>) -> Self {
        while c.last().is_some_and(Ring::is_zero) {
            c.pop();
        }
        Self { c }
    }

    pub fn constant(r: R) -> Self {
        Self::new(vec![r])
    }

    /// `x^n`.
    pub fn monomial(r: R, n: usize) -> Self {
        let mut c = vec![R::zero(); n];
        c.push(r);
        Self::new(c)
    }

    pub fn var() -> Self {
        Self::monomial(R::one(), 1)
    }

    pub fn coeffs(&self) -> &[R] {
        &self.c
    }

    pub fn coeff(&self, i: usize) -> R {
        self.c.get(i).cloned().unwrap_or_else(R::zero)
    }

    /// Degree, with `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.c.len().checked_sub(1)
    }

    pub fn lead(&self) -> R {
        self.c.last().cloned().unwrap_or_else(R::zero)
    }

    pub fn scale(&self, r: &R) -> Self {
        Self::new(self.c.iter().map(|x| x.mul(r)).collect())
    }

    pub fn shift(&self, n: usize) -> Self {
        if self.c.is_empty() {
            return self.clone();
        }
        let mut c = vec![R::zero(); n];
        c.extend(self.c.iter().cloned());
        Self { c }
    }

    pub fn pow(&self, n: usize) -> Self {
        (0..n).fold(Self::one(), |acc, _| acc.mul(self))
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.c
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, x)| (0..i).fold(R::zero(), |acc, _| acc.add(x)))
                .collect(),
        )
    }

    /// gcd of the coefficients.
    pub fn content(&self) -> R {
        let mut g = R::zero();
        for x in &self.c {
            g = g.gcd(x);
            if g == R::one() {
                break;
            }
        }
        if self.lead().lead_negative() != g.lead_negative() && !g.is_zero() {
            g = g.neg();
        }
        g
    }

    /// The polynomial divided by its content; leading coefficient normalized.
    pub fn primitive_part(&self) -> Self {
        if self.c.is_empty() {
            return self.clone();
        }
        let g = self.content();
        Self::new(self.c.iter().map(|x| x.div_exact(&g)).collect())
    }

    /// Pseudo-remainder of `self` by `d`: `lead(d)^{deg−deg d+1} self mod d`.
    pub fn pseudo_rem(&self, d: &Self) -> Self {
        let dd = d.degree().expect("pseudo-division by zero");
        let ld = d.lead();
        let mut r = self.clone();
        let mut steps = match self.degree() {
            Some(n) if n >= dd => n - dd + 1,
            _ => 0,
        };
        while let Some(n) = r.degree() {
            if n < dd {
                break;
            }
            let lr = r.lead();
            let t = d.scale(&lr).shift(n - dd);
            r = r.scale(&ld).sub(&t);
            steps -= 1;
        }
        (0..steps).fold(r, |acc, _| acc.scale(&ld))
    }

    /// Exact quotient; panics if `d` does not divide `self`.
    pub fn div_exact_poly(&self, d: &Self) -> Self {
        let dd = d.degree().expect("division by zero polynomial");
        let ld = d.lead();
        let mut r = self.clone();
        let Some(n) = r.degree() else {
            return Self::zero();
        };
        if n < dd {
            panic!("inexact polynomial division");
        }
        let mut q = vec![R::zero(); n - dd + 1];
        while let Some(n) = r.degree() {
            if n < dd {
                panic!("inexact polynomial division");
            }
            let t = r.lead().div_exact(&ld);
            r = r.sub(&d.scale(&t).shift(n - dd));
            q[n - dd] = t;
        }
        Self::new(q)
    }

    fn gcd_poly(&self, other: &Self) -> Self {
        if other.c.is_empty() {
            return self.normalize_poly();
        }
        if self.c.is_empty() {
            return other.normalize_poly();
        }
        let c = self.content().gcd(&other.content());
        let (mut a, mut b) = (self.primitive_part(), other.primitive_part());
        if a.degree() < b.degree() {
            std::mem::swap(&mut a, &mut b);
        }
        loop {
            let r = a.pseudo_rem(&b);
            match r.degree() {
                None => return b.primitive_part().normalize_poly().scale(&c),
                Some(0) => return Self::constant(c),
                Some(_) => {
                    a = b;
                    b = r.primitive_part();
                }
            }
        }
    }

    fn normalize_poly(&self) -> Self {
        if self.lead().lead_negative() {
            self.neg()
        } else {
            self.clone()
        }
    }

    /// Horner evaluation with a caller-supplied embedding of coefficients.
    pub fn eval_with<T>(&self, x: &T, embed: impl Fn(&R) -> T, zero: T) -> T
    where
        T: Clone + std::ops::Mul<Output = T> + std::ops::Add<Output = T>,
    {
        self.c
            .iter()
            .rev()
            .fold(zero, |acc, ci| acc * x.clone() + embed(ci))
    }
}

impl<R: Ring> Ring for Poly<R> {
    fn zero() -> Self {
        Self { c: Vec::new() }
    }
    fn one() -> Self {
        Self::constant(R::one())
    }
    fn is_zero(&self) -> bool {
        self.c.is_empty()
    }
    fn add(&self, other: &Self) -> Self {
        let n = self.c.len().max(other.c.len());
        Self::new((0..n).map(|i| self.coeff(i).add(&other.coeff(i))).collect())
    }
    fn sub(&self, other: &Self) -> Self {
        let n = self.c.len().max(other.c.len());
        Self::new((0..n).map(|i| self.coeff(i).sub(&other.coeff(i))).collect())
    }
    fn mul(&self, other: &Self) -> Self {
        if self.c.is_empty() || other.c.is_empty() {
            return Self::zero();
        }
        let mut c = vec![R::zero(); self.c.len() + other.c.len() - 1];
        for (i, a) in self.c.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.c.iter().enumerate() {
                c[i + j] = c[i + j].add(&a.mul(b));
            }
        }
        Self::new(c)
    }
    fn neg(&self) -> Self {
        Self {
            c: self.c.iter().map(Ring::neg).collect(),
        }
    }
    fn div_exact(&self, divisor: &Self) -> Self {
        self.div_exact_poly(divisor)
    }
    fn gcd(&self, other: &Self) -> Self {
        self.gcd_poly(other)
    }
    fn lead_negative(&self) -> bool {
        self.lead().lead_negative()
    }
}

impl<R: Ring> Debug for Poly<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly{:?}", self.c)
    }
}

impl IntPoly {
    pub fn from_i64(c: &[i64]) -> Self {
        Self::new(c.iter().map(|&x| BigInt::from(x)).collect())
    }

    pub fn eval_rational(&self, x: &BigRational) -> BigRational {
        self.eval_with(
            x,
            |c| BigRational::from_integer(c.clone()),
            BigRational::zero(),
        )
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        self.eval_with(&x, |c| c.to_f64().unwrap_or(f64::NAN), 0.0)
    }

    pub fn eval_complex(&self, x: Complex64) -> Complex64 {
        self.eval_with(
            &x,
            |c| Complex64::new(c.to_f64().unwrap_or(f64::NAN), 0.0),
            Complex64::zero(),
        )
    }

    /// Square-free part `p / gcd(p, p')`, made primitive.
    pub fn square_free(&self) -> Self {
        let g = self.gcd(&self.derivative());
        if g.degree().unwrap_or(0) == 0 {
            return self.primitive_part();
        }
        self.div_exact_poly(&g).primitive_part()
    }

    /// Real roots in increasing order, each listed once.
    pub fn real_roots(&self) -> Vec<f64> {
        let mut p = self.square_free();
        let mut roots = Vec::new();
        while Zero::is_zero(&p.coeff(0)) && p.degree().unwrap_or(0) > 0 {
            roots.push(0.0);
            p = p.div_exact_poly(&Self::var());
        }
        let Some(n) = p.degree() else {
            return roots;
        };
        if n >= 1 {
            let c: Vec<f64> = {
                // scale by a power of two so the largest coefficient is O(1)
                let bits = p.c.iter().map(|x| x.bits()).max().unwrap_or(0) as i32;
                let s = 2f64.powi(-bits);
                p.c.iter()
                    .map(|x| x.to_f64().unwrap_or(f64::NAN) * s)
                    .collect()
            };
            let lead = c[n];
            let mut companion = nalgebra::DMatrix::<f64>::zeros(n, n);
            for i in 1..n {
                companion[(i, i - 1)] = 1.0;
            }
            for i in 0..n {
                companion[(i, n - 1)] = -c[i] / lead;
            }
            let pf = |x: f64| c.iter().rev().fold(0.0, |acc, ci| acc * x + ci);
            let dc: Vec<f64> = (1..=n).map(|i| c[i] * i as f64).collect();
            let dpf = |x: f64| dc.iter().rev().fold(0.0, |acc, ci| acc * x + ci);
            for ev in companion.complex_eigenvalues().iter() {
                if ev.im.abs() > 1e-7 * (1.0 + ev.re.abs()) {
                    continue;
                }
                let mut x = ev.re;
                for _ in 0..50 {
                    let d = dpf(x);
                    if d == 0.0 {
                        break;
                    }
                    let step = pf(x) / d;
                    x -= step;
                    if step.abs() <= 1e-16 * (1.0 + x.abs()) {
                        break;
                    }
                }
                roots.push(x);
            }
        }
        roots.sort_by(f64::total_cmp);
        roots.dedup_by(|a, b| (*a - *b).abs() <= 1e-9 * (1.0 + b.abs()));
        roots
    }
}

impl fmt::Display for IntPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.c.is_empty() {
            return f.write_str("0");
        }
        let mut first = true;
        for (i, x) in self.c.iter().enumerate().rev() {
            if Zero::is_zero(x) {
                continue;
            }
            let neg = x.is_negative();
            if first {
                if neg {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if neg { " - " } else { " + " })?;
            }
            first = false;
            let a = x.abs();
            let show = i == 0 || !a.is_one();
            if show {
                write!(f, "{a}")?;
            }
            match i {
                0 => {}
                1 => f.write_str(if show { "*z" } else { "z" })?,
                _ => write!(f, "{}z^{i}", if show { "*" } else { "" })?,
            }
        }
        Ok(())
    }
}

/// Determinant by Bareiss fraction-free elimination.
pub fn determinant<R: Ring>(mut m: Vec<Vec<R>>) -> R {
    let n = m.len();
    if n == 0 {
        return R::one();
    }
    let mut sign_flip = false;
    let mut prev = R::one();
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&i| !m[i][k].is_zero()) {
                Some(i) => {
                    m.swap(k, i);
                    sign_flip = !sign_flip;
                }
                None => return R::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let t = m[i][j].mul(&m[k][k]).sub(&m[i][k].mul(&m[k][j]));
                m[i][j] = t.div_exact(&prev);
            }
        }
        prev = m[k][k].clone();
    }
    let d = m[n - 1][n - 1].clone();
    if sign_flip {
        d.neg()
    } else {
        d
    }
}

/// Resultant of two polynomials via the Sylvester matrix.
pub fn resultant<R: Ring>(p: &Poly<R>, q: &Poly<R>) -> R {
    let (Some(m), Some(n)) = (p.degree(), q.degree()) else {
        return R::zero();
    };
    let size = m + n;
    if size == 0 {
        return R::one();
    }
    let mut rows = Vec::with_capacity(size);
    for i in 0..n {
        let mut row = vec![R::zero(); size];
        for (j, c) in p.coeffs().iter().rev().enumerate() {
            row[i + j] = c.clone();
        }
        rows.push(row);
    }
    for i in 0..m {
        let mut row = vec![R::zero(); size];
        for (j, c) in q.coeffs().iter().rev().enumerate() {
            row[i + j] = c.clone();
        }
        rows.push(row);
    }
    determinant(rows)
}

/// `(−1)^{n(n−1)/2} Res(p, p') / lead(p)`.
pub fn discriminant<R: Ring>(p: &Poly<R>) -> R {
    let n = p.degree().expect("discriminant of zero");
    let r = resultant(p, &p.derivative()).div_exact(&p.lead());
    if (n * n.saturating_sub(1) / 2) % 2 == 1 {
        r.neg()
    } else {
        r
    }
}

/// Polynomial in an outer variable (`G` or `M`) over `Z[z]`.
/// Coefficient `(i, j)` multiplies `X^i z^j`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BivariatePoly {
    pub(crate) p: Poly<IntPoly>,
}

impl BivariatePoly {
    pub fn new(p: Poly<IntPoly>) -> Self {
        Self { p }
    }

    pub fn from_terms(terms: &[((usize, usize), i64)]) -> Self {
        let mut outer: Vec<IntPoly> = Vec::new();
        for &((i, j), c) in terms {
            if outer.len() <= i {
                outer.resize(i + 1, IntPoly::zero());
            }
            outer[i] = outer[i].add(&IntPoly::monomial(BigInt::from(c), j));
        }
        Self::new(Poly::new(outer))
    }

    pub fn inner(&self) -> &Poly<IntPoly> {
        &self.p
    }

    pub fn coeff(&self, i: usize, j: usize) -> BigInt {
        self.p.coeff(i).coeff(j)
    }

    /// Nonzero coefficients keyed by `(deg_X, deg_z)`, in increasing order.
    pub fn terms(&self) -> Vec<((usize, usize), BigInt)> {
        let mut out = Vec::new();
        for (i, ci) in self.p.coeffs().iter().enumerate() {
            for (j, c) in ci.coeffs().iter().enumerate() {
                if !Zero::is_zero(c) {
                    out.push(((i, j), c.clone()));
                }
            }
        }
        out
    }

    pub fn deg_x(&self) -> usize {
        self.p.degree().unwrap_or(0)
    }

    pub fn deg_z(&self) -> usize {
        self.p
            .coeffs()
            .iter()
            .filter_map(|c| c.degree())
            .max()
            .unwrap_or(0)
    }

    /// Integer content 1 and positive leading coefficient in `X`.
    pub fn normalized(&self) -> Self {
        let mut g = <BigInt as Zero>::zero();
        for (_, c) in self.terms() {
            g = Integer::gcd(&g, &c);
        }
        if Zero::is_zero(&g) {
            return self.clone();
        }
        if self.p.lead().lead().is_negative() {
            g = -g;
        }
        Self::new(Poly::new(
            self.p
                .coeffs()
                .iter()
                .map(|ci| Poly::new(ci.coeffs().iter().map(|c| c / &g).collect()))
                .collect(),
        ))
    }

    /// The coefficient of `X^i` as a polynomial in `z`.
    pub fn x_coeff(&self, i: usize) -> IntPoly {
        self.p.coeff(i)
    }

    /// The polynomial in `X` with `z` fixed.
    pub fn eval_z_complex(&self, z: Complex64) -> Vec<Complex64> {
        self.p.coeffs().iter().map(|c| c.eval_complex(z)).collect()
    }

    pub fn eval_complex(&self, x: Complex64, z: Complex64) -> Complex64 {
        self.eval_z_complex(z)
            .iter()
            .rev()
            .fold(Complex64::zero(), |acc, c| acc * x + c)
    }

    /// `∂/∂X` evaluated at `(x, z)`.
    pub fn eval_dx_complex(&self, x: Complex64, z: Complex64) -> Complex64 {
        let c = self.eval_z_complex(z);
        c.iter()
            .enumerate()
            .skip(1)
            .rev()
            .fold(Complex64::zero(), |acc, (i, ci)| acc * x + ci * i as f64)
    }

    /// Substitutes a power series for `X`, with `z` the series variable.
    pub fn eval_series(&self, x: &TruncatedSeries) -> TruncatedSeries {
        let k = x.order();
        let as_series = |c: &IntPoly| {
            TruncatedSeries::new(
                c.coeffs()
                    .iter()
                    .take(k + 1)
                    .map(|v| BigRational::from_integer(v.clone()))
                    .collect(),
                k,
            )
        };
        self.p
            .coeffs()
            .iter()
            .rev()
            .fold(TruncatedSeries::zero(k), |acc, c| &(&acc * x) + &as_series(c))
    }

    /// Discriminant in `X`, a polynomial in `z`.
    pub fn discriminant_x(&self) -> IntPoly {
        discriminant(&self.p)
    }
}

impl Debug for BivariatePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BivariatePoly{:?}", self.terms())
    }
}

impl fmt::Display for BivariatePoly {
    /// `c*X^i*z^j` terms, highest power of `X` first.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut terms = self.terms();
        terms.sort_by(|a, b| b.0.cmp(&a.0));
        if terms.is_empty() {
            return f.write_str("0");
        }
        for (n, ((i, j), c)) in terms.iter().enumerate() {
            if n == 0 {
                if c.is_negative() {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if c.is_negative() { " - " } else { " + " })?;
            }
            let a = c.abs();
            let mut parts = Vec::new();
            if !a.is_one() || (*i == 0 && *j == 0) {
                parts.push(a.to_string());
            }
            match i {
                0 => {}
                1 => parts.push("X".into()),
                _ => parts.push(format!("X^{i}")),
            }
            match j {
                0 => {}
                1 => parts.push("z".into()),
                _ => parts.push(format!("z^{j}")),
            }
            f.write_str(&parts.join("*"))?;
        }
        Ok(())
    }
}
