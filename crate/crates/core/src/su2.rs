//! Irreducible representations of SU(2) by exact coefficient extraction.
//!
//! A representation label is a semi-integer `l = 1/2, 1, 3/2, ...` stored
//! through its doubled value. The matrix coefficient formula
//!
//! `t^l_{m,n}(g) = sqrt((l-m)!(l+m)!/((l-n)!(l+n)!)) *
//!     [z^(l-m)] (alpha z + gamma)^(l-n) (beta z + delta)^(l+n)`
//!
//! realizes the circle contour integral as the coefficient of `z^(l-m)`;
//! `(gamma, delta)` are the bottom-row entries `(-conj(beta), conj(alpha))`
//! of `g`. The constant unitary `tau^l` is this matrix at `g = g(1)` and
//! carries the prefactor `i^(2l)/2^l`, so for integer `l` all entries are
//! real while for half-integer `l` they are purely imaginary.

use nalgebra::{DMatrix, Matrix2};
use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};

/// A semi-integer stored through its doubled value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct HalfInt {
    doubled: i64,
}

impl HalfInt {
    pub fn from_doubled(doubled: i64) -> Self {
        HalfInt { doubled }
    }

    pub fn from_int(v: i64) -> Self {
        HalfInt { doubled: 2 * v }
    }

    pub fn doubled(self) -> i64 {
        self.doubled
    }

    pub fn is_integer(self) -> bool {
        self.doubled % 2 == 0
    }

    pub fn to_f64(self) -> f64 {
        self.doubled as f64 / 2.0
    }
}

impl std::fmt::Display for HalfInt {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.doubled / 2)
        } else {
            write!(f, "{}/2", self.doubled)
        }
    }
}

/// The `(2l+1) x (2l+1)` matrix of a representation, rows indexed by `m`
/// and columns by `n`, both running over `-l, -l+1, ..., l`.
#[derive(Clone, Debug, PartialEq)]
pub struct RepMatrix {
    two_ell: i64,
    mat: DMatrix<Complex64>,
}

impl RepMatrix {
    pub fn two_ell(&self) -> i64 {
        self.two_ell
    }

    pub fn dim(&self) -> usize {
        (self.two_ell + 1) as usize
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.mat
    }

    pub fn into_matrix(self) -> DMatrix<Complex64> {
        self.mat
    }

    /// Row/column index of the doubled index value `2m`.
    pub fn index_of_doubled(&self, dm: i64) -> usize {
        debug_assert!((dm + self.two_ell) % 2 == 0 && dm.abs() <= self.two_ell);
        ((dm + self.two_ell) / 2) as usize
    }

    /// Entry `t_{m,n}` addressed by doubled indices.
    pub fn entry(&self, dm: i64, dn: i64) -> Complex64 {
        self.mat[(self.index_of_doubled(dm), self.index_of_doubled(dn))]
    }

    /// `max_{i,j} |(M^H M - I)_{i,j}|`.
    pub fn unitarity_residual(&self) -> f64 {
        let n = self.dim();
        let gram = self.mat.adjoint() * &self.mat;
        let residual = gram - DMatrix::<Complex64>::identity(n, n);
        max_abs(&residual)
    }
}

pub fn max_abs(m: &DMatrix<Complex64>) -> f64 {
    m.iter().map(|c| c.norm()).fold(0.0, f64::max)
}

/// `g(z) = (1/sqrt 2) [[i/z, iz], [i/z, -iz]]`, an element of SU(2) for
/// `|z| = 1`.
pub fn g_of(z: Complex64) -> Matrix2<Complex64> {
    let i = Complex64::i();
    let s = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let zi = z.inv();
    Matrix2::new(i * zi * s, i * z * s, i * zi * s, -i * z * s)
}

/// `G(w) = (1/sqrt 2) [[1, w], [1, -w]]`, unitary with determinant `-w`.
pub fn big_g_of(w: Complex64) -> Matrix2<Complex64> {
    let s = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    Matrix2::new(s, w * s, s, -w * s)
}

fn factorial(n: i64) -> BigInt {
    let mut acc = BigInt::one();
    for i in 2..=n {
        acc *= i;
    }
    acc
}

/// Exact coefficients of `(z+1)^a (z-1)^b`, lowest power first.
fn plus_minus_poly(a: i64, b: i64) -> Vec<BigInt> {
    let row_plus = binomial_row(a);
    let mut row_minus = binomial_row(b);
    for (q, c) in row_minus.iter_mut().enumerate() {
        if (b as usize - q) % 2 == 1 {
            *c = -std::mem::take(c);
        }
    }
    let mut out = vec![BigInt::zero(); (a + b + 1) as usize];
    for (p, cp) in row_plus.iter().enumerate() {
        for (q, cq) in row_minus.iter().enumerate() {
            out[p + q] += cp * cq;
        }
    }
    out
}

fn binomial_row(n: i64) -> Vec<BigInt> {
    let mut row = vec![BigInt::one()];
    for k in 0..n {
        let next = &row[row.len() - 1] * (n - k) / (k + 1);
        row.push(next);
    }
    row
}

pub(crate) fn i_power(e: i64) -> Complex64 {
    match e.rem_euclid(4) {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

/// The constant unitary `tau^l`: the representation matrix of `g(1)`,
/// computed exactly (integer coefficient extraction and exact factorial
/// ratios, with a single square root per entry taken last).
pub fn tau_matrix(two_ell: i64) -> Result<RepMatrix> {
    if two_ell < 1 {
        return Err(Error::invalid(format!(
            "representation label must satisfy 2l >= 1, got {two_ell}"
        )));
    }
    let n = (two_ell + 1) as usize;
    let phase = i_power(two_ell);
    let mut mat = DMatrix::<Complex64>::zeros(n, n);
    for col in 0..n {
        let dn = -two_ell + 2 * col as i64;
        let a = (two_ell - dn) / 2; // l - n
        let b = (two_ell + dn) / 2; // l + n
        let poly = plus_minus_poly(a, b);
        let denom = factorial(a) * factorial(b);
        for row in 0..n {
            let dm = -two_ell + 2 * row as i64;
            let e = ((two_ell - dm) / 2) as usize; // l - m
            let c = &poly[e];
            if c.is_zero() {
                continue;
            }
            // |entry|^2 = c^2 (l-m)!(l+m)! / ((l-n)!(l+n)! 2^(2l))
            let numer = c * c * factorial((two_ell - dm) / 2) * factorial((two_ell + dm) / 2);
            let ratio = BigRational::new(numer, &denom * (BigInt::one() << two_ell));
            let mag = ratio.to_f64().unwrap().sqrt();
            let sign = if c.is_negative() { -1.0 } else { 1.0 };
            mat[(row, col)] = phase * Complex64::new(sign * mag, 0.0);
        }
    }
    Ok(RepMatrix { two_ell, mat })
}

fn check_unitary_2x2(g: &Matrix2<Complex64>, tol: f64) -> Result<()> {
    let gram = g.adjoint() * g;
    let residual = gram - Matrix2::identity();
    let max = residual.iter().map(|c| c.norm()).fold(0.0, f64::max);
    if max > tol {
        return Err(Error::invalid(format!(
            "input matrix is not unitary: max |g^H g - I| = {max:.3e} > {tol:.1e}"
        )));
    }
    Ok(())
}

/// Representation matrix `t^l(g)` of an explicit SU(2) element.
pub fn rep_matrix(two_ell: i64, g: &Matrix2<Complex64>) -> Result<RepMatrix> {
    if two_ell < 1 {
        return Err(Error::invalid(format!(
            "representation label must satisfy 2l >= 1, got {two_ell}"
        )));
    }
    check_unitary_2x2(g, 1e-10)?;
    let det = g[(0, 0)] * g[(1, 1)] - g[(0, 1)] * g[(1, 0)];
    if (det - Complex64::ONE).norm() > 1e-9 {
        return Err(Error::invalid(format!(
            "input matrix is not in SU(2): det = {det}"
        )));
    }
    let (alpha, beta) = (g[(0, 0)], g[(0, 1)]);
    let (gamma, delta) = (g[(1, 0)], g[(1, 1)]);

    let n = (two_ell + 1) as usize;
    let mut mat = DMatrix::<Complex64>::zeros(n, n);
    let mut scratch = vec![Complex64::ZERO; n];
    for col in 0..n {
        let dn = -two_ell + 2 * col as i64;
        let a = (two_ell - dn) / 2;
        let b = (two_ell + dn) / 2;
        complex_product_coeffs(alpha, gamma, a, beta, delta, b, &mut scratch);
        let denom = factorial(a) * factorial(b);
        for row in 0..n {
            let dm = -two_ell + 2 * row as i64;
            let e = ((two_ell - dm) / 2) as usize;
            let numer = factorial((two_ell - dm) / 2) * factorial((two_ell + dm) / 2);
            let ratio = BigRational::new(numer, denom.clone()).to_f64().unwrap();
            mat[(row, col)] = scratch[e] * ratio.sqrt();
        }
    }
    Ok(RepMatrix { two_ell, mat })
}

/// Coefficients of `(alpha z + gamma)^a (beta z + delta)^b` into `out`
/// (length `a + b + 1`).
fn complex_product_coeffs(
    alpha: Complex64,
    gamma: Complex64,
    a: i64,
    beta: Complex64,
    delta: Complex64,
    b: i64,
    out: &mut [Complex64],
) {
    debug_assert_eq!(out.len(), (a + b + 1) as usize);
    let pa = binomial_expand(alpha, gamma, a);
    let pb = binomial_expand(beta, delta, b);
    for o in out.iter_mut() {
        *o = Complex64::ZERO;
    }
    for (p, cp) in pa.iter().enumerate() {
        for (q, cq) in pb.iter().enumerate() {
            out[p + q] += cp * cq;
        }
    }
}

/// Coefficients of `(x z + y)^n`, lowest power first.
fn binomial_expand(x: Complex64, y: Complex64, n: i64) -> Vec<Complex64> {
    let row = binomial_row(n);
    let mut out = Vec::with_capacity((n + 1) as usize);
    let mut xp = vec![Complex64::ONE];
    let mut yp = vec![Complex64::ONE];
    for p in 1..=n as usize {
        xp.push(xp[p - 1] * x);
        yp.push(yp[p - 1] * y);
    }
    for p in 0..=n as usize {
        let c = row[p].to_f64().unwrap();
        out.push(xp[p] * yp[n as usize - p] * c);
    }
    out
}

/// `t^l(g(w))`: column `n` of `tau^l` scaled by `w^(2n)`.
pub fn rep_of_g_omega(two_ell: i64, omega: Complex64) -> Result<RepMatrix> {
    if (omega.norm() - 1.0).abs() > 1e-12 {
        return Err(Error::invalid(format!(
            "evaluation point must lie on the unit circle, |w| = {}",
            omega.norm()
        )));
    }
    let tau = tau_matrix(two_ell)?;
    let n = tau.dim();
    let mut mat = tau.mat;
    for col in 0..n {
        let dn = -two_ell + 2 * col as i64; // doubled n, i.e. the exponent 2n
        let scale = omega.powi(dn as i32);
        for row in 0..n {
            mat[(row, col)] *= scale;
        }
    }
    Ok(RepMatrix { two_ell, mat })
}

/// Margins and rank facts about `tau^l` that drive the spectral argument:
/// invertibility, the strict contraction of the diagonal entries that can
/// survive constant-coefficient extraction, and full column rank of the four
/// constrained half-support patterns.
#[derive(Clone, Debug, Serialize)]
pub struct PropertyReport {
    pub two_ell: i64,
    pub dim: usize,
    pub unitarity_residual: f64,
    /// Smallest singular value of the full matrix (invertibility margin).
    pub sigma_min: f64,
    /// `|tau_{-l,-l}|` and `|tau_{l,l}|`.
    pub corner_low_abs: f64,
    pub corner_high_abs: f64,
    /// `|tau_{0,0}|` for integer `l`.
    pub center_abs: Option<f64>,
    /// Smallest singular value of the four submatrices
    /// (rows forced to vanish) x (support columns), ordered
    /// (neg cols, odd rows), (neg, even), (pos, odd), (pos, even).
    pub pattern_sigma_min: [f64; 4],
    pub contractions_ok: bool,
    pub patterns_full_rank: bool,
}

const CONTRACTION_MARGIN: f64 = 1e-6;
const PATTERN_RANK_FLOOR: f64 = 1e-8;

/// Smallest singular value of an arbitrary complex matrix.
pub fn sigma_min(m: &DMatrix<Complex64>) -> f64 {
    m.clone()
        .singular_values()
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}

fn submatrix(m: &DMatrix<Complex64>, rows: &[usize], cols: &[usize]) -> DMatrix<Complex64> {
    DMatrix::from_fn(rows.len(), cols.len(), |i, j| m[(rows[i], cols[j])])
}

pub fn verify_propositions(two_ell: i64) -> Result<PropertyReport> {
    let tau = tau_matrix(two_ell)?;
    let n = tau.dim();
    let m = tau.matrix();

    let half = n / 2; // l for odd n (integer l), (2l+1)/2 for even n
    let cols_neg: Vec<usize> = (0..half).collect();
    let cols_pos: Vec<usize> = (n - half..n).collect();
    let rows_even: Vec<usize> = (0..n).step_by(2).collect();
    let rows_odd: Vec<usize> = (1..n).step_by(2).collect();

    let pattern_sigma_min = [
        sigma_min(&submatrix(m, &rows_odd, &cols_neg)),
        sigma_min(&submatrix(m, &rows_even, &cols_neg)),
        sigma_min(&submatrix(m, &rows_odd, &cols_pos)),
        sigma_min(&submatrix(m, &rows_even, &cols_pos)),
    ];

    let corner_low_abs = m[(0, 0)].norm();
    let corner_high_abs = m[(n - 1, n - 1)].norm();
    let center_abs = if two_ell % 2 == 0 {
        Some(m[(n / 2, n / 2)].norm())
    } else {
        None
    };

    let contractions_ok = corner_low_abs <= 1.0 - CONTRACTION_MARGIN
        && corner_high_abs <= 1.0 - CONTRACTION_MARGIN
        && center_abs.is_none_or(|c| c <= 1.0 - CONTRACTION_MARGIN);
    let patterns_full_rank = pattern_sigma_min.iter().all(|&s| s > PATTERN_RANK_FLOOR);

    Ok(PropertyReport {
        two_ell,
        dim: n,
        unitarity_residual: tau.unitarity_residual(),
        sigma_min: sigma_min(m),
        corner_low_abs,
        corner_high_abs,
        center_abs,
        pattern_sigma_min,
        contractions_ok,
        patterns_full_rank,
    })
}

/// Haar-random SU(2) element (normalized Gaussian quaternion).
pub fn random_su2<R: rand::Rng>(rng: &mut R) -> Matrix2<Complex64> {
    loop {
        let v: [f64; 4] = [gaussian(rng), gaussian(rng), gaussian(rng), gaussian(rng)];
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm < 1e-6 {
            continue;
        }
        let alpha = Complex64::new(v[0] / norm, v[1] / norm);
        let beta = Complex64::new(v[2] / norm, v[3] / norm);
        return Matrix2::new(alpha, beta, -beta.conj(), alpha.conj());
    }
}

fn gaussian<R: rand::Rng>(rng: &mut R) -> f64 {
    // Box-Muller from two uniforms
    let u1: f64 = rng.random::<f64>().max(f64::MIN_POSITIVE);
    let u2: f64 = rng.random();
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}
