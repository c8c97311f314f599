//! Exact Laurent-polynomial arithmetic.
//!
//! [`LaurentPoly<T>`] stores a contiguous coefficient window starting at an
//! arbitrary (possibly negative) exponent. The coefficient ring is chosen per
//! instantiation: exact big integers for the Rudin-Shapiro identities, exact
//! rationals for walk probabilities, complex doubles for representation
//! products. Exact variants never round and equality is coefficientwise.

use std::fmt;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Products whose shorter operand has at most this many stored terms use
/// schoolbook convolution; anything longer goes through Karatsuba splitting.
pub const KARATSUBA_THRESHOLD: usize = 64;

/// Coefficient ring expected by [`LaurentPoly`]. By-reference ops keep the
/// big-integer paths allocation-light.
pub trait Coeff: Clone + PartialEq {
    fn zero() -> Self;
    fn is_zero(&self) -> bool;
    fn add_assign_ref(&mut self, rhs: &Self);
    fn sub_assign_ref(&mut self, rhs: &Self);
    fn mul_ref(lhs: &Self, rhs: &Self) -> Self;
    fn neg(self) -> Self;
}

macro_rules! impl_coeff_ops {
    ($t:ty) => {
        impl Coeff for $t {
            fn zero() -> Self {
                Zero::zero()
            }
            fn is_zero(&self) -> bool {
                Zero::is_zero(self)
            }
            fn add_assign_ref(&mut self, rhs: &Self) {
                *self += rhs;
            }
            fn sub_assign_ref(&mut self, rhs: &Self) {
                *self -= rhs;
            }
            fn mul_ref(lhs: &Self, rhs: &Self) -> Self {
                lhs * rhs
            }
            fn neg(self) -> Self {
                -self
            }
        }
    };
}

impl_coeff_ops!(i64);
impl_coeff_ops!(i128);
impl_coeff_ops!(BigInt);
impl_coeff_ops!(BigRational);
impl_coeff_ops!(Complex64);

/// A Laurent polynomial `sum_j coeffs[j] * z^(low + j)` in canonical form:
/// the first and last stored coefficients are nonzero, except for the zero
/// polynomial which stores nothing and has `low = 0`.
#[derive(Clone, PartialEq, Eq)]
pub struct LaurentPoly<T> {
    low: i64,
    coeffs: Vec<T>,
}

impl<T: Coeff> LaurentPoly<T> {
    /// Canonicalizes by trimming zero coefficients at both ends.
    pub fn new(low: i64, coeffs: Vec<T>) -> Self {
        let mut p = LaurentPoly { low, coeffs };
        p.canonicalize();
        p
    }

    pub fn zero() -> Self {
        LaurentPoly { low: 0, coeffs: Vec::new() }
    }

    pub fn constant(c: T) -> Self {
        Self::new(0, vec![c])
    }

    pub fn monomial(c: T, exponent: i64) -> Self {
        Self::new(exponent, vec![c])
    }

    fn canonicalize(&mut self) {
        while self.coeffs.last().is_some_and(Coeff::is_zero) {
            self.coeffs.pop();
        }
        let lead = self.coeffs.iter().take_while(|c| c.is_zero()).count();
        if lead > 0 {
            self.coeffs.drain(..lead);
            self.low += lead as i64;
        }
        if self.coeffs.is_empty() {
            self.low = 0;
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Exponent of the first stored coefficient (0 for the zero polynomial).
    pub fn low(&self) -> i64 {
        self.low
    }

    /// Exponent of the last stored coefficient.
    pub fn high(&self) -> i64 {
        self.low + self.coeffs.len() as i64 - 1
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    /// Stored coefficient at exponent `j`, zero outside the span.
    pub fn coefficient(&self, j: i64) -> T {
        if self.is_zero() || j < self.low || j > self.high() {
            T::zero()
        } else {
            self.coeffs[(j - self.low) as usize].clone()
        }
    }

    pub fn constant_term(&self) -> T {
        self.coefficient(0)
    }

    /// Iterate `(exponent, coefficient)` over stored terms.
    pub fn iter(&self) -> impl Iterator<Item = (i64, &T)> {
        let low = self.low;
        self.coeffs.iter().enumerate().map(move |(i, c)| (low + i as i64, c))
    }

    pub fn add(&self, other: &Self) -> Self {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        let low = self.low.min(other.low);
        let high = self.high().max(other.high());
        let mut coeffs = vec![T::zero(); (high - low + 1) as usize];
        for (e, c) in self.iter() {
            coeffs[(e - low) as usize].add_assign_ref(c);
        }
        for (e, c) in other.iter() {
            coeffs[(e - low) as usize].add_assign_ref(c);
        }
        Self::new(low, coeffs)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.clone().negate())
    }

    pub fn negate(mut self) -> Self {
        for c in &mut self.coeffs {
            *c = std::mem::replace(c, T::zero()).neg();
        }
        self
    }

    /// Multiply every coefficient by `s`.
    pub fn scale(&self, s: &T) -> Self {
        Self::new(self.low, self.coeffs.iter().map(|c| T::mul_ref(c, s)).collect())
    }

    /// Multiply by the monomial `z^e`.
    pub fn shift(&self, e: i64) -> Self {
        if self.is_zero() {
            Self::zero()
        } else {
            LaurentPoly { low: self.low + e, coeffs: self.coeffs.clone() }
        }
    }

    /// Exact product. Short operands convolve directly; long ones go through
    /// Karatsuba with results identical to schoolbook convolution.
    pub fn multiply(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let coeffs = convolve(&self.coeffs, &other.coeffs);
        Self::new(self.low + other.low, coeffs)
    }

    /// Substitution `z -> z^(-1)`: the coefficient sequence reversed, with
    /// `low` mapped to `-high`.
    pub fn reverse(&self) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut coeffs = self.coeffs.clone();
        coeffs.reverse();
        LaurentPoly { low: -self.high(), coeffs }
    }

    /// Substitution `z -> z^s` for `s >= 1`.
    pub fn substitute_power(&self, s: u32) -> Result<Self> {
        if s == 0 {
            return Err(Error::invalid("substitute_power requires s >= 1"));
        }
        if s == 1 || self.is_zero() {
            return Ok(self.clone());
        }
        let s64 = s as i64;
        let len = (self.coeffs.len() - 1) * s as usize + 1;
        let mut coeffs = vec![T::zero(); len];
        for (i, c) in self.coeffs.iter().enumerate() {
            coeffs[i * s as usize] = c.clone();
        }
        Ok(LaurentPoly { low: self.low * s64, coeffs })
    }

    /// Even-part extraction: `coefficient(result, j) = coefficient(self, 2j)`.
    pub fn halve(&self) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let j_low = div_ceil(self.low, 2);
        let j_high = div_floor(self.high(), 2);
        if j_low > j_high {
            return Self::zero();
        }
        let coeffs = (j_low..=j_high).map(|j| self.coefficient(2 * j)).collect();
        Self::new(j_low, coeffs)
    }
}

// `pow` needs a multiplicative identity; supply it for rings with One.
impl<T: Coeff + num_traits::One> LaurentPoly<T> {
    pub fn one() -> Self {
        Self::constant(T::one())
    }

    /// `n`-th power by repeated squaring.
    pub fn power(&self, n: u64) -> Self {
        let mut result = Self::one();
        let mut base = self.clone();
        let mut exp = n;
        while exp > 0 {
            if exp & 1 == 1 {
                result = result.multiply(&base);
            }
            exp >>= 1;
            if exp > 0 {
                base = base.multiply(&base);
            }
        }
        result
    }
}

fn div_floor(a: i64, b: i64) -> i64 {
    let (q, r) = (a / b, a % b);
    if r != 0 && (r < 0) != (b < 0) {
        q - 1
    } else {
        q
    }
}

fn div_ceil(a: i64, b: i64) -> i64 {
    -div_floor(-a, b)
}

/// Dense convolution dispatch shared by every coefficient variant.
pub fn convolve<T: Coeff>(a: &[T], b: &[T]) -> Vec<T> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    if a.len().min(b.len()) <= KARATSUBA_THRESHOLD {
        schoolbook(a, b)
    } else {
        karatsuba(a, b)
    }
}

fn schoolbook<T: Coeff>(a: &[T], b: &[T]) -> Vec<T> {
    let mut out = vec![T::zero(); a.len() + b.len() - 1];
    for (i, ai) in a.iter().enumerate() {
        if ai.is_zero() {
            continue;
        }
        for (j, bj) in b.iter().enumerate() {
            if bj.is_zero() {
                continue;
            }
            out[i + j].add_assign_ref(&T::mul_ref(ai, bj));
        }
    }
    out
}

fn karatsuba<T: Coeff>(a: &[T], b: &[T]) -> Vec<T> {
    if a.len().min(b.len()) <= KARATSUBA_THRESHOLD {
        return schoolbook(a, b);
    }
    // split at half the shorter length so both high halves are nonempty
    let m = a.len().min(b.len()).div_ceil(2);
    let (a0, a1) = a.split_at(m);
    let (b0, b1) = b.split_at(m);

    let z0 = karatsuba(a0, b0);
    let z2 = karatsuba(a1, b1);
    let a01 = slice_sum(a0, a1);
    let b01 = slice_sum(b0, b1);
    let mut z1 = karatsuba(&a01, &b01);
    sub_in_place(&mut z1, &z0, 0);
    sub_in_place(&mut z1, &z2, 0);

    let mut out = vec![T::zero(); a.len() + b.len() - 1];
    add_in_place(&mut out, &z0, 0);
    add_in_place(&mut out, &z1, m);
    add_in_place(&mut out, &z2, 2 * m);
    out
}

fn slice_sum<T: Coeff>(a: &[T], b: &[T]) -> Vec<T> {
    let (long, short) = if a.len() >= b.len() { (a, b) } else { (b, a) };
    let mut out = long.to_vec();
    for (o, s) in out.iter_mut().zip(short.iter()) {
        o.add_assign_ref(s);
    }
    out
}

fn add_in_place<T: Coeff>(target: &mut [T], src: &[T], offset: usize) {
    for (i, s) in src.iter().enumerate() {
        target[offset + i].add_assign_ref(s);
    }
}

fn sub_in_place<T: Coeff>(target: &mut [T], src: &[T], offset: usize) {
    for (i, s) in src.iter().enumerate() {
        target[offset + i].sub_assign_ref(s);
    }
}

impl<T: Coeff + fmt::Display> fmt::Display for LaurentPoly<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in self.iter() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match e {
                0 => write!(f, "{c}")?,
                1 => write!(f, "({c})*z")?,
                _ => write!(f, "({c})*z^{e}")?,
            }
        }
        Ok(())
    }
}

impl<T: Coeff + fmt::Display> fmt::Debug for LaurentPoly<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LaurentPoly[{self}]")
    }
}

/// Integer-coefficient polynomial used by the Rudin-Shapiro pipeline.
pub type IntPoly = LaurentPoly<BigInt>;
/// Rational-coefficient polynomial (walk probabilities).
pub type RatPoly = LaurentPoly<BigRational>;
/// Complex-coefficient polynomial (representation-theoretic products).
pub type CxPoly = LaurentPoly<Complex64>;

impl IntPoly {
    pub fn from_i64(low: i64, coeffs: &[i64]) -> Self {
        Self::new(low, coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    /// Evaluate at a complex point (used by diagnostics; big coefficients are
    /// converted through f64).
    pub fn eval_complex(&self, z: Complex64) -> Complex64 {
        let mut acc = Complex64::ZERO;
        for c in self.coeffs.iter().rev() {
            acc = acc * z + Complex64::new(c.to_f64().unwrap_or(f64::NAN), 0.0);
        }
        acc * z.powi(self.low as i32)
    }
}
