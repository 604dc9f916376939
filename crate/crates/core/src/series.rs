//! Truncated power and Laurent series with complex coefficients, and the
//! normal-form map `h` for a holomorphic function with a simple zero.
//!
//! A [`PowerSeries`] of order `N` stores `c_0..c_N` around its center and
//! never reads past `N`. Products and compositions are truncated at the
//! smaller of the operand orders.
//!
//! The normal form of `f(w) = f_1 (w - w0) + f_2 (w - w0)^2 + ...` is the map
//! `h(ζ) = w0 + ζ + ζ H(ζ)` with `f_1 ζ h'(ζ) = f(h(ζ))`. Writing
//! `f = f_1 (w - w0 + g(w))`, the correction `H` solves `H' = F(ζ, H)`,
//! `H(0) = 0`, where
//!
//! ```text
//! F(W1, W2) = sum_{j>=2} (f_j / f_1) W1^(j-2) (1 + W2)^j .
//! ```

use alloc::vec;
use alloc::vec::Vec;

use crate::math::cabs;
use crate::{Error, Result, C64};

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

/// Default truncation order.
pub const DEFAULT_ORDER: usize = 16;

/// `sum_{j=0}^{N} c_j (w - center)^j`.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerSeries {
    pub center: C64,
    coeffs: Vec<C64>,
}

impl PowerSeries {
    /// Series with coefficients `coeffs[0..=N]`; at least one coefficient is
    /// required.
    pub fn new(center: C64, coeffs: Vec<C64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::Domain("a power series needs at least one coefficient"));
        }
        Ok(Self { center, coeffs })
    }

    pub fn zero(center: C64, order: usize) -> Self {
        Self { center, coeffs: vec![ZERO; order + 1] }
    }

    /// Monomial `(w - center)^k`, truncated at `order`.
    pub fn monomial(center: C64, k: usize, order: usize) -> Self {
        let mut s = Self::zero(center, order);
        if k <= order {
            s.coeffs[k] = ONE;
        }
        s
    }

    /// Truncation order `N`.
    #[inline]
    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    #[inline]
    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    /// `c_j`, or zero past the truncation order.
    #[inline]
    pub fn coeff(&self, j: usize) -> C64 {
        self.coeffs.get(j).copied().unwrap_or(ZERO)
    }

    /// Same coefficients cut (or zero-padded) to order `n`.
    pub fn truncated(&self, n: usize) -> Self {
        let coeffs = (0..=n).map(|j| self.coeff(j)).collect();
        Self { center: self.center, coeffs }
    }

    /// Index of the first nonzero coefficient, `None` for the zero series.
    pub fn order_of_vanishing(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| *c != ZERO)
    }

    /// Largest coefficient modulus.
    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|c| cabs(*c)).fold(0.0, f64::max)
    }

    /// Horner evaluation of the truncated polynomial.
    pub fn eval(&self, w: C64) -> C64 {
        let d = w - self.center;
        self.coeffs.iter().rev().fold(ZERO, |acc, c| acc * d + c)
    }

    /// Derivative of the truncated polynomial (order `N - 1`, or a single
    /// zero coefficient when `N = 0`).
    pub fn differentiate(&self) -> Self {
        if self.order() == 0 {
            return Self::zero(self.center, 0);
        }
        let coeffs = (1..self.coeffs.len()).map(|j| self.coeffs[j] * j as f64).collect();
        Self { center: self.center, coeffs }
    }

    fn same_center(&self, other: &Self) -> Result<()> {
        if self.center == other.center {
            Ok(())
        } else {
            Err(Error::CenterMismatch(self.center, other.center))
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_center(other)?;
        let n = self.order().min(other.order());
        Ok(Self { center: self.center, coeffs: (0..=n).map(|j| self.coeffs[j] + other.coeffs[j]).collect() })
    }

    pub fn scale(&self, s: C64) -> Self {
        Self { center: self.center, coeffs: self.coeffs.iter().map(|c| c * s).collect() }
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.same_center(other)?;
        let n = self.order().min(other.order());
        Ok(Self { center: self.center, coeffs: mul_trunc(&self.coeffs, &other.coeffs, n) })
    }

    /// `self(other(z))`, centered at `other.center`.
    ///
    /// The constant term of `other` must equal `self.center` (to a relative
    /// `1e-14`), so that the inner series maps its center to ours.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        let offset = other.coeffs[0] - self.center;
        if cabs(offset) > 1e-14 * cabs(self.center).max(1.0) {
            return Err(Error::NonzeroConstantTerm(offset));
        }
        let n = self.order().min(other.order());
        let mut inner = other.coeffs[..=n].to_vec();
        inner[0] = ZERO;
        let mut acc = vec![ZERO; n + 1];
        acc[0] = self.coeffs[n];
        for j in (0..n).rev() {
            acc = mul_trunc(&acc, &inner, n);
            acc[0] += self.coeffs[j];
        }
        Ok(Self { center: other.center, coeffs: acc })
    }

    pub fn to_laurent(&self) -> LaurentSeries {
        LaurentSeries::new(self.center, 0, self.coeffs.clone())
    }
}

fn mul_trunc(a: &[C64], b: &[C64], n: usize) -> Vec<C64> {
    let mut out = vec![ZERO; n + 1];
    for (i, ai) in a.iter().enumerate().take(n + 1) {
        if *ai == ZERO {
            continue;
        }
        for (j, bj) in b.iter().enumerate().take(n + 1 - i) {
            out[i + j] += ai * bj;
        }
    }
    out
}

/// `sum_{i=min_index}^{top} c_i (w - center)^i`.
///
/// Leading zeros are stripped on construction, so `coeffs[0] != 0` unless
/// the series is identically zero, in which case `min_index == 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct LaurentSeries {
    pub center: C64,
    min_index: i64,
    coeffs: Vec<C64>,
}

impl LaurentSeries {
    /// Builds and normalises a Laurent series whose first stored coefficient
    /// sits at exponent `min_index`. The top exponent is kept.
    pub fn new(center: C64, min_index: i64, coeffs: Vec<C64>) -> Self {
        let top = min_index + coeffs.len() as i64 - 1;
        match coeffs.iter().position(|c| *c != ZERO) {
            Some(lead) => Self { center, min_index: min_index + lead as i64, coeffs: coeffs[lead..].to_vec() },
            None => {
                let len = (top + 1).max(1) as usize;
                Self { center, min_index: 0, coeffs: vec![ZERO; len] }
            }
        }
    }

    #[inline]
    pub fn min_index(&self) -> i64 {
        self.min_index
    }

    /// Highest stored exponent.
    #[inline]
    pub fn top_index(&self) -> i64 {
        self.min_index + self.coeffs.len() as i64 - 1
    }

    #[inline]
    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| *c == ZERO)
    }

    /// Coefficient of `(w - center)^i`: zero below `min_index`, `None` past
    /// the truncation.
    pub fn coeff(&self, i: i64) -> Option<C64> {
        if i > self.top_index() {
            None
        } else if i < self.min_index {
            Some(ZERO)
        } else {
            Some(self.coeffs[(i - self.min_index) as usize])
        }
    }

    /// Coefficient of `(w - center)^-1`.
    pub fn residue(&self) -> C64 {
        self.coeff(-1).unwrap_or(ZERO)
    }

    pub fn eval(&self, w: C64) -> C64 {
        let d = w - self.center;
        let poly = self.coeffs.iter().rev().fold(ZERO, |acc, c| acc * d + c);
        poly * d.powi(self.min_index as i32)
    }

    /// Term-wise derivative; the top exponent drops by one.
    pub fn differentiate(&self) -> Self {
        let coeffs: Vec<C64> =
            self.coeffs.iter().enumerate().map(|(k, c)| c * (self.min_index + k as i64) as f64).collect();
        Self::new(self.center, self.min_index - 1, coeffs)
    }

    /// Product truncated where either factor stops being known.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.center != other.center {
            return Err(Error::CenterMismatch(self.center, other.center));
        }
        let lo = self.min_index + other.min_index;
        let top = (self.top_index() + other.min_index).min(other.top_index() + self.min_index);
        let n = (top - lo).max(0) as usize;
        Ok(Self::new(self.center, lo, mul_trunc(&self.coeffs, &other.coeffs, n)))
    }
}

/// Tolerance below which a residue counts as zero, relative to the largest
/// coefficient.
pub const RESIDUE_TOL: f64 = 1e-12;

/// Laurent expansion `(w - w0)^(-k) (1/f_k + sum_{l>=1} q_l (w - w0)^l)` of
/// `1/f`, where `f` vanishes to exact order `k` at its center.
///
/// `f` is read as the polynomial given by its coefficients, and `q_0..q_N`
/// are produced (`q_0 = 1/f_k`), so `f * (1/f) = 1` through degree `N`. The
/// coefficient `q_l` sits at exponent `l - k`.
pub fn reciprocal_laurent(f: &PowerSeries, k: usize) -> Result<LaurentSeries> {
    let actual = f.order_of_vanishing().ok_or(Error::ZeroSeries)?;
    if actual != k {
        return Err(Error::WrongOrder { stated: k, actual });
    }
    let n = f.order();
    let a: Vec<C64> = (0..=n).map(|j| f.coeff(j + k)).collect();
    let inv0 = ONE / a[0];
    let mut q = vec![ZERO; n + 1];
    q[0] = inv0;
    for l in 1..=n {
        let s: C64 = (1..=l).map(|i| a[i] * q[l - i]).sum();
        q[l] = -s * inv0;
    }
    Ok(LaurentSeries::new(f.center, -(k as i64), q))
}

/// Term-wise antiderivative with zero constant of integration.
///
/// Fails with [`Error::NonzeroResidue`] when the `(w - w0)^-1` coefficient
/// exceeds [`RESIDUE_TOL`] times the largest coefficient; below that it is
/// dropped.
pub fn primitive_laurent(l: &LaurentSeries) -> Result<LaurentSeries> {
    let q = l.residue();
    let scale = l.coeffs.iter().map(|c| cabs(*c)).fold(0.0, f64::max);
    if cabs(q) > RESIDUE_TOL * scale {
        return Err(Error::NonzeroResidue(q));
    }
    let coeffs: Vec<C64> = l
        .coeffs
        .iter()
        .enumerate()
        .map(|(k, c)| {
            let e = l.min_index + k as i64;
            if e == -1 {
                ZERO
            } else {
                c / (e + 1) as f64
            }
        })
        .collect();
    Ok(LaurentSeries::new(l.center, l.min_index + 1, coeffs))
}

/// Triangle of coefficients `F[a][l]` of `W1^a W2^l`, `a + l <= N`.
#[derive(Debug, Clone, PartialEq)]
pub struct BiSeries {
    rows: Vec<Vec<C64>>,
}

impl BiSeries {
    pub fn zero(order: usize) -> Self {
        Self { rows: (0..=order).map(|a| vec![ZERO; order - a + 1]).collect() }
    }

    pub fn order(&self) -> usize {
        self.rows.len() - 1
    }

    /// `F[a][l]`, zero outside the stored triangle.
    pub fn coeff(&self, a: usize, l: usize) -> C64 {
        self.rows.get(a).and_then(|r| r.get(l)).copied().unwrap_or(ZERO)
    }

    pub fn eval(&self, w1: C64, w2: C64) -> C64 {
        let mut acc = ZERO;
        let mut p1 = ONE;
        for row in &self.rows {
            acc += p1 * row.iter().rev().fold(ZERO, |s, c| s * w2 + c);
            p1 *= w1;
        }
        acc
    }

    pub fn is_zero(&self) -> bool {
        self.rows.iter().flatten().all(|c| *c == ZERO)
    }
}

fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut c: u128 = 1;
    for i in 0..k {
        c = c * (n - i) as u128 / (i + 1) as u128;
    }
    c as f64
}

/// Checks that `f` has a simple zero at its center and returns `f_1`.
fn simple_zero_slope(f: &PowerSeries) -> Result<C64> {
    let f0 = f.coeff(0);
    if cabs(f0) > 1e-12 * f.max_abs().max(1.0) {
        return Err(Error::NotAZero(f0));
    }
    let f1 = f.coeff(1);
    if f1 == ZERO || f.order() < 1 {
        return Err(Error::NotSimpleZero);
    }
    Ok(f1)
}

/// `F[a][l] = (f_{a+2} / f_1) * binomial(a + 2, l)` for `a + l <= N`.
///
/// Entries outside the triangle never reach `H_1..H_N`: the degree `n - 1`
/// coefficient of `F(ζ, H(ζ))` only involves `ζ^a H^l` with `a + l <= n - 1`
/// because `H(0) = 0`.
pub fn build_bivariate_f(f: &PowerSeries) -> Result<BiSeries> {
    let f1 = simple_zero_slope(f)?;
    let n = f.order();
    let mut out = BiSeries::zero(n);
    for (a, row) in out.rows.iter_mut().enumerate() {
        let r = f.coeff(a + 2) / f1;
        if r == ZERO {
            continue;
        }
        for (l, c) in row.iter_mut().enumerate() {
            *c = r * binomial(a + 2, l);
        }
    }
    Ok(out)
}

/// Formal solution `H_0 = 0, H_1..H_N` of `H' = F(ζ, H)`.
///
/// Degree by degree, `n H_n` is the degree `n - 1` coefficient of
/// `F(ζ, H(ζ))`, which only depends on `H_1..H_{n-1}`. Each step works on
/// data truncated at its own degree, so the first `N` coefficients do not
/// depend on the requested order. Entries of `F` outside its triangle are
/// treated as zero.
pub fn solve_h_recursion(f: &BiSeries, order: usize) -> PowerSeries {
    let mut h = vec![ZERO; order + 1];
    for n in 1..=order {
        let d = n - 1;
        // powers[l][m] = [ζ^m] H^l for m <= d
        let mut power = vec![ZERO; d + 1];
        power[0] = ONE;
        let known = &h[..n];
        let mut acc = ZERO;
        for l in 0..=d {
            if l > 0 {
                power = mul_trunc(&power, known, d);
            }
            for a in 0..=d - l {
                let c = f.coeff(a, l);
                if c != ZERO {
                    acc += c * power[d - a];
                }
            }
        }
        h[n] = acc / n as f64;
    }
    PowerSeries { center: ZERO, coeffs: h }
}

/// Normal-form map `h(ζ) = w0 + ζ + ζ H(ζ)` through order `N`, centered at 0.
pub fn normal_form_h(f: &PowerSeries, order: usize) -> Result<PowerSeries> {
    let big_f = build_bivariate_f(f)?;
    let mut coeffs = vec![ZERO; order + 1];
    coeffs[0] = f.center;
    if order >= 1 {
        coeffs[1] = ONE;
        let hh = solve_h_recursion(&big_f, order - 1);
        coeffs[2..=order].copy_from_slice(&hh.coeffs[1..order]);
    }
    Ok(PowerSeries { center: ZERO, coeffs })
}

/// Largest coefficient of `f_1 ζ h'(ζ) - f(h(ζ))` through degree
/// `min(N, order f, order h)`.
pub fn verify_normal_form(f: &PowerSeries, h: &PowerSeries, order: usize) -> Result<f64> {
    let f1 = f.coeff(1);
    let n = order.min(f.order()).min(h.order());
    let fh = f.truncated(n).compose(&h.truncated(n))?;
    Ok((0..=n)
        .map(|j| cabs(f1 * h.coeff(j) * j as f64 - fh.coeff(j)))
        .fold(0.0, f64::max))
}
