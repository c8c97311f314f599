//! Even-part halving operators on vectors of Laurent polynomials.
//!
//! For integer `l`, `S_l` acts on `(P_l)^(2l+1)` with
//! `P_l = span{w^(-(l-1)), ..., w^(l-1)}`: apply
//! `T^l(w) = tau^l diag(w^(-l), ..., w^l)`, keep even powers of `w`, halve
//! the exponent. On basis vectors (component `h`, monomial `w^j`) the rule is
//!
//! `(h, j) -> sum_m tau_{m,h} (m, (h+j)/2)` when `h + j` is even, else `0`.
//!
//! `S_{l,lambda}` is the same with the twist `w^(lambda/2)` in front, acting
//! on the shifted span `{w^(lambda/2-l+1), ..., w^(lambda/2+l-1)}`; it exists
//! in the interior case `0 in (lambda/2-l, lambda/2+l)` for parity-matched
//! `(l, lambda)`. Spectral radii strictly below 1 are what push every
//! expected representation of the lacunary matrix products to zero.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::poly::CxPoly;
use crate::su2::{tau_matrix, HalfInt};

/// Dense matrix of `S_l` or `S_{l,lambda}` together with its basis
/// bookkeeping.
#[derive(Clone, Debug)]
pub struct HalvingOperator {
    two_ell: i64,
    lambda: Option<i64>,
    n_comp: usize,
    j_count: usize,
    j_low: i64,
    matrix: DMatrix<Complex64>,
}

impl HalvingOperator {
    pub fn two_ell(&self) -> i64 {
        self.two_ell
    }

    pub fn lambda(&self) -> Option<i64> {
        self.lambda
    }

    /// `(2l+1)(2l-1)`.
    pub fn dim(&self) -> usize {
        self.n_comp * self.j_count
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    /// Lowest monomial exponent of the invariant span.
    pub fn j_low(&self) -> i64 {
        self.j_low
    }

    /// Flat index of basis vector (component index, exponent `j`).
    pub fn index(&self, comp: usize, j: i64) -> usize {
        debug_assert!(j >= self.j_low && j < self.j_low + self.j_count as i64);
        comp * self.j_count + (j - self.j_low) as usize
    }

    /// Basis description: `(component m as a half-integer, exponent j)` per
    /// flat index.
    pub fn index_map(&self) -> Vec<(HalfInt, i64)> {
        (0..self.dim())
            .map(|i| {
                let comp = i / self.j_count;
                let j = self.j_low + (i % self.j_count) as i64;
                (HalfInt::from_doubled(-self.two_ell + 2 * comp as i64), j)
            })
            .collect()
    }

    /// Largest deviation of a nonzero column norm from 1 (each nonzero
    /// column is a re-embedded column of the unitary `tau^l`).
    pub fn max_column_norm_deviation(&self) -> f64 {
        let mut worst = 0.0f64;
        for col in self.matrix.column_iter() {
            let norm = col.norm();
            if norm > 1e-12 {
                worst = worst.max((norm - 1.0).abs());
            }
        }
        worst
    }
}

fn assemble(two_ell: i64, lambda: i64, label: Option<i64>) -> Result<HalvingOperator> {
    let tau = tau_matrix(two_ell)?;
    let n_comp = (two_ell + 1) as usize;
    let j_count = (two_ell - 1) as usize;
    debug_assert!(j_count >= 1);
    let j_low = (lambda - two_ell) / 2 + 1;
    let dim = n_comp * j_count;
    let mut matrix = DMatrix::<Complex64>::zeros(dim, dim);
    for h_idx in 0..n_comp {
        let dh = -two_ell + 2 * h_idx as i64;
        let half_sum = (lambda + dh) / 2; // lambda/2 + h, an integer by parity
        for j_idx in 0..j_count {
            let j = j_low + j_idx as i64;
            let e = half_sum + j;
            if e.rem_euclid(2) != 0 {
                continue; // odd exponent: no even part survives
            }
            let j_img = e / 2;
            // closure: the image exponent stays inside the span
            debug_assert!(j_img >= j_low && j_img < j_low + j_count as i64);
            let col = h_idx * j_count + j_idx;
            let img_idx = (j_img - j_low) as usize;
            for m_idx in 0..n_comp {
                matrix[(m_idx * j_count + img_idx, col)] = tau.matrix()[(m_idx, h_idx)];
            }
        }
    }
    Ok(HalvingOperator { two_ell, lambda: label, n_comp, j_count, j_low, matrix })
}

/// The operator `S_l` for integer `l >= 1`.
pub fn build_s(two_ell: i64) -> Result<HalvingOperator> {
    if two_ell < 2 || two_ell % 2 != 0 {
        return Err(Error::invalid(format!(
            "S_l is defined for integer l >= 1 (even doubled label >= 2), got 2l = {two_ell}"
        )));
    }
    assemble(two_ell, 0, None)
}

/// Whether `(l, lambda)` have matching parity (even `lambda` with integer
/// `l`, odd `lambda` with half-integer `l`).
pub fn parity_valid(two_ell: i64, lambda: i64) -> bool {
    (lambda - two_ell).rem_euclid(2) == 0
}

/// Whether `0` lies strictly inside `[lambda/2 - l, lambda/2 + l]`; for
/// parity-matched pairs this is `|lambda| <= 2l - 2`.
pub fn interior(two_ell: i64, lambda: i64) -> bool {
    lambda.abs() < two_ell
}

/// The twisted operator `S_{l,lambda}` in the interior case.
pub fn build_s_lambda(two_ell: i64, lambda: i64) -> Result<HalvingOperator> {
    if two_ell < 1 {
        return Err(Error::invalid(format!("need 2l >= 1, got {two_ell}")));
    }
    if !parity_valid(two_ell, lambda) {
        return Err(Error::invalid(format!(
            "parity mismatch: lambda = {lambda} with 2l = {two_ell}; the expected product \
             vanishes identically, use independence_moment"
        )));
    }
    if !interior(two_ell, lambda) || two_ell < 2 {
        return Err(Error::invalid(format!(
            "(l, lambda) = ({two_ell}/2, {lambda}) is not interior; boundary and exterior \
             cases have closed forms in independence_moment"
        )));
    }
    assemble(two_ell, lambda, Some(lambda))
}

/// Full spectrum of a halving operator.
#[derive(Clone, Debug, Serialize)]
pub struct SpectrumReport {
    pub two_ell: i64,
    pub lambda: Option<i64>,
    pub dim: usize,
    /// All eigenvalues, ordered by decreasing modulus.
    pub eigenvalues: Vec<Complex64>,
    pub spectral_radius: f64,
    /// `1 - spectral_radius`.
    pub margin: f64,
}

/// Dense eigenvalues of a real matrix through the QR algorithm.
fn real_eigenvalues(m: DMatrix<f64>) -> Result<Vec<Complex64>> {
    if m.nrows() == 0 {
        return Ok(Vec::new());
    }
    let schur = nalgebra::linalg::Schur::try_new(m, f64::EPSILON, 100_000)
        .ok_or_else(|| Error::numerical("Schur decomposition did not converge"))?;
    Ok(schur.complex_eigenvalues().iter().copied().collect())
}

/// All eigenvalues of the operator via a dense nonsymmetric
/// eigen-decomposition.
///
/// Operator matrices are exactly real (integer `l`) or exactly `i` times a
/// real matrix (half-integer `l`, where `tau^l` is purely imaginary); both
/// cases reduce to a real Schur decomposition without losing the spectrum.
pub fn spectral_radius(op: &HalvingOperator) -> Result<SpectrumReport> {
    let m = op.matrix();
    let all_real = m.iter().all(|c| c.im == 0.0);
    let all_imag = m.iter().all(|c| c.re == 0.0);
    let mut eigenvalues = if all_real {
        real_eigenvalues(m.map(|c| c.re))?
    } else if all_imag {
        real_eigenvalues(m.map(|c| c.im))?
            .into_iter()
            .map(|e| e * Complex64::i())
            .collect()
    } else {
        return Err(Error::numerical(
            "operator matrix is neither real nor purely imaginary; no dense complex \
             eigensolver is wired up for this case",
        ));
    };
    eigenvalues.sort_by(|a, b| b.norm().total_cmp(&a.norm()));
    let spectral_radius = eigenvalues.first().map_or(0.0, |e| e.norm());
    Ok(SpectrumReport {
        two_ell: op.two_ell,
        lambda: op.lambda,
        dim: op.dim(),
        eigenvalues,
        spectral_radius,
        margin: 1.0 - spectral_radius,
    })
}

/// `E T^l(w^(2^k)) ... T^l(w) = E (S_l)^(k+1)` read off on the embedded
/// standard basis: exactly zero for half-integer `l` (only odd powers of `w`
/// appear), and the constant-coefficient projection of `(S_l)^(k+1)` for
/// integer `l`.
pub fn expected_rep(two_ell: i64, k: u32) -> Result<DMatrix<Complex64>> {
    if two_ell < 1 {
        return Err(Error::invalid(format!("need 2l >= 1, got {two_ell}")));
    }
    let n = (two_ell + 1) as usize;
    if two_ell % 2 != 0 {
        return Ok(DMatrix::zeros(n, n));
    }
    let op = build_s(two_ell)?;
    Ok(project_operator_power(&op, k))
}

/// Embed each standard basis vector at exponent 0, apply the operator
/// `k + 1` times, read back the constant coefficients.
fn project_operator_power(op: &HalvingOperator, k: u32) -> DMatrix<Complex64> {
    let n = op.n_comp;
    let j0 = op.index(0, 0) % op.j_count; // offset of exponent 0 in a component
    let mut out = DMatrix::<Complex64>::zeros(n, n);
    for col in 0..n {
        let mut v = DVector::<Complex64>::zeros(op.dim());
        v[col * op.j_count + j0] = Complex64::ONE;
        for _ in 0..=k {
            v = &op.matrix * v;
        }
        for row in 0..n {
            out[(row, col)] = v[row * op.j_count + j0];
        }
    }
    out
}

/// `E (w^(2^(k+1)-1))^lambda t^l(g(w^(2^k))) ... t^l(g(w))`, the joint
/// moment of the phase and the matrix product, in the four-way case split:
/// parity mismatch or `|lambda| > 2l` give exact zero; `lambda = +-2l`
/// give the geometric corner forms; interior pairs project
/// `(S_{l,lambda})^(k+1)`.
pub fn independence_moment(two_ell: i64, lambda: i64, k: u32) -> Result<DMatrix<Complex64>> {
    if two_ell < 1 {
        return Err(Error::invalid(format!("need 2l >= 1, got {two_ell}")));
    }
    let n = (two_ell + 1) as usize;
    if !parity_valid(two_ell, lambda) || lambda.abs() > two_ell {
        return Ok(DMatrix::zeros(n, n));
    }
    if lambda == two_ell {
        // 0 = lambda/2 - l: only the n = -l column survives expectation,
        // scaled by tau_{-l,-l}^k
        let tau = tau_matrix(two_ell)?;
        let c = tau.matrix()[(0, 0)].powu(k);
        let mut out = DMatrix::<Complex64>::zeros(n, n);
        for row in 0..n {
            out[(row, 0)] = tau.matrix()[(row, 0)] * c;
        }
        return Ok(out);
    }
    if lambda == -two_ell {
        // mirrored last-column form with tau_{l,l}^k
        let tau = tau_matrix(two_ell)?;
        let c = tau.matrix()[(n - 1, n - 1)].powu(k);
        let mut out = DMatrix::<Complex64>::zeros(n, n);
        for row in 0..n {
            out[(row, n - 1)] = tau.matrix()[(row, n - 1)] * c;
        }
        return Ok(out);
    }
    let op = build_s_lambda(two_ell, lambda)?;
    Ok(project_operator_power(&op, k))
}

/// Brute-force validation of the halving shortcut.
#[derive(Clone, Debug, Serialize)]
pub struct CrossCheckReport {
    pub two_ell: i64,
    pub lambda: i64,
    pub k: u32,
    /// Max entrywise distance between the symbolic constant-term matrix and
    /// `independence_moment`.
    pub max_residual: f64,
    pub min_exponent: i64,
    pub max_exponent: i64,
    /// Whether every symbolic exponent stayed inside the predicted span.
    pub support_ok: bool,
}

/// Forms the full symbolic product
/// `w^(lambda 2^k) T^l(w^(2^(k+1))) ... w^lambda T^l(w^2)` (in the
/// un-halved variable, so all exponents are integers for every parity),
/// extracts constant terms and compares against [`independence_moment`].
pub fn cross_check_symbolic(two_ell: i64, lambda: i64, k: u32) -> Result<CrossCheckReport> {
    if two_ell < 1 {
        return Err(Error::invalid(format!("need 2l >= 1, got {two_ell}")));
    }
    if k > 4 || two_ell > 8 || lambda.abs() > 64 {
        return Err(Error::resource(format!(
            "symbolic product for (2l, lambda, k) = ({two_ell}, {lambda}, {k}) exceeds the \
             small-instance budget (k <= 4, 2l <= 8)"
        )));
    }
    let tau = tau_matrix(two_ell)?;
    let n = (two_ell + 1) as usize;

    let factor = |j: u32| -> Vec<Vec<CxPoly>> {
        (0..n)
            .map(|row| {
                (0..n)
                    .map(|col| {
                        let dn = -two_ell + 2 * col as i64;
                        let exponent = (1i64 << j) * (lambda + dn);
                        CxPoly::monomial(tau.matrix()[(row, col)], exponent)
                    })
                    .collect()
            })
            .collect()
    };

    let mut product = factor(k);
    for j in (0..k).rev() {
        product = poly_mat_mul(&product, &factor(j));
    }

    let target = independence_moment(two_ell, lambda, k)?;
    let mut max_residual = 0.0f64;
    let mut min_exponent = i64::MAX;
    let mut max_exponent = i64::MIN;
    for row in 0..n {
        for col in 0..n {
            let entry = &product[row][col];
            if !entry.is_zero() {
                min_exponent = min_exponent.min(entry.low());
                max_exponent = max_exponent.max(entry.high());
            }
            let diff = (entry.constant_term() - target[(row, col)]).norm();
            max_residual = max_residual.max(diff);
        }
    }
    let span = (1i64 << (k + 1)) - 1;
    let support_ok = min_exponent == i64::MAX
        || (min_exponent >= span * (lambda - two_ell) && max_exponent <= span * (lambda + two_ell));
    Ok(CrossCheckReport {
        two_ell,
        lambda,
        k,
        max_residual,
        min_exponent,
        max_exponent,
        support_ok,
    })
}

fn poly_mat_mul(a: &[Vec<CxPoly>], b: &[Vec<CxPoly>]) -> Vec<Vec<CxPoly>> {
    let n = a.len();
    (0..n)
        .map(|row| {
            (0..n)
                .map(|col| {
                    let mut acc = CxPoly::zero();
                    for p in 0..n {
                        acc = acc.add(&a[row][p].multiply(&b[p][col]));
                    }
                    acc
                })
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::su2::max_abs;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha12Rng;

    const SQRT_HALF: f64 = std::f64::consts::FRAC_1_SQRT_2;

    #[test]
    fn s1_structure_is_the_hand_assembled_matrix() {
        let op = build_s(2).unwrap();
        assert_eq!(op.dim(), 3);
        let m = op.matrix();
        // only the (h = 0, j = 0) column is nonzero: (-1/sqrt2, 0, 1/sqrt2)
        for row in 0..3 {
            assert_eq!(m[(row, 0)], Complex64::ZERO);
            assert_eq!(m[(row, 2)], Complex64::ZERO);
        }
        assert!((m[(0, 1)] - Complex64::new(-SQRT_HALF, 0.0)).norm() <= 1e-15);
        assert_eq!(m[(1, 1)], Complex64::ZERO);
        assert!((m[(2, 1)] - Complex64::new(SQRT_HALF, 0.0)).norm() <= 1e-15);
        // nilpotent of order 2
        let sq = m * m;
        assert!(max_abs(&sq) <= 1e-15);
    }

    #[test]
    fn s1_spectrum_is_zero() {
        let report = spectral_radius(&build_s(2).unwrap()).unwrap();
        assert!(report.spectral_radius <= 1e-12);
        assert_eq!(report.eigenvalues.len(), 3);
    }

    #[test]
    fn nonzero_columns_are_unit_vectors() {
        for two_ell in [2, 4, 6, 8] {
            let op = build_s(two_ell).unwrap();
            assert!(op.max_column_norm_deviation() <= 1e-12, "2l = {two_ell}");
        }
        for (two_ell, lambda) in [(3, 1), (3, -1), (5, 3), (7, 1), (6, 2)] {
            let op = build_s_lambda(two_ell, lambda).unwrap();
            assert!(op.max_column_norm_deviation() <= 1e-12);
        }
    }

    #[test]
    fn closure_of_the_invariant_span() {
        // re-derive every image exponent and check it lies in the span
        for (two_ell, lambda) in [(2i64, 0i64), (4, 0), (3, 1), (5, -3), (9, 7)] {
            let op = if lambda == 0 {
                build_s(two_ell).unwrap()
            } else {
                build_s_lambda(two_ell, lambda).unwrap()
            };
            let map = op.index_map();
            for (col, &(h, j)) in map.iter().enumerate() {
                let doubled_exp = lambda + h.doubled() + 2 * j;
                let col_is_zero = op.matrix().column(col).iter().all(|c| c.norm() == 0.0);
                if doubled_exp.rem_euclid(4) == 0 {
                    let j_img = doubled_exp / 4;
                    assert!(
                        j_img >= op.j_low() && j_img < op.j_low() + (two_ell - 1),
                        "2l = {two_ell}, lambda = {lambda}, col {col}"
                    );
                    assert!(!col_is_zero);
                } else {
                    assert!(col_is_zero);
                }
            }
        }
    }

    #[test]
    fn rejects_wrong_labels() {
        assert!(build_s(3).is_err());
        assert!(build_s(0).is_err());
        assert!(build_s_lambda(3, 2).is_err()); // parity
        assert!(build_s_lambda(3, 3).is_err()); // boundary
        assert!(build_s_lambda(3, 5).is_err()); // exterior
        assert!(build_s_lambda(1, 1).is_err()); // l = 1/2 has no interior lambda
    }

    #[test]
    fn lambda_zero_equals_plain_operator() {
        for two_ell in [2, 4, 6] {
            let plain = build_s(two_ell).unwrap();
            let twisted = build_s_lambda(two_ell, 0).unwrap();
            assert_eq!(plain.matrix(), twisted.matrix());
        }
    }

    #[test]
    fn spectral_radii_stay_below_one() {
        for two_ell in (4..=16).step_by(2) {
            let report = spectral_radius(&build_s(two_ell).unwrap()).unwrap();
            assert!(
                report.spectral_radius < 1.0 - 1e-6,
                "2l = {two_ell}: rho = {}",
                report.spectral_radius
            );
            assert!(report.eigenvalues.iter().all(|e| e.norm() <= 1.0 + 1e-9));
        }
        let report = spectral_radius(&build_s_lambda(3, 1).unwrap()).unwrap();
        assert_eq!(report.dim, 8);
        assert!(report.spectral_radius < 1.0 - 1e-6);
    }

    #[test]
    fn expected_rep_vanishing_cases() {
        for k in 0..4 {
            let half = expected_rep(1, k).unwrap();
            assert_eq!(max_abs(&half), 0.0);
            let three_half = expected_rep(3, k).unwrap();
            assert_eq!(max_abs(&three_half), 0.0);
        }
        for k in 1..6 {
            let one = expected_rep(2, k).unwrap();
            assert!(max_abs(&one) <= 1e-12, "k = {k}");
        }
    }

    #[test]
    fn expected_rep_decays_beyond_transient() {
        let report = spectral_radius(&build_s(4).unwrap()).unwrap();
        let rho = report.spectral_radius;
        let dim = report.dim;
        let mut norms = Vec::new();
        for k in 0..=24 {
            norms.push(max_abs(&expected_rep(4, k).unwrap()));
        }
        // exponential envelope with a constant fitted over the observed range
        let c = norms
            .iter()
            .enumerate()
            .map(|(k, m)| m / rho.powi(k as i32 + 1))
            .fold(0.0f64, f64::max);
        assert!(c < 10.0, "envelope constant blew up: {c}");
        for (k, m) in norms.iter().enumerate() {
            assert!(*m <= c * rho.powi(k as i32 + 1) + 1e-15);
        }
        // the leading eigenvalue is negative, so the norm oscillates with
        // period 2; decay is monotone at stride 2 beyond the transient
        for k in dim..norms.len() - 2 {
            assert!(norms[k + 2] < norms[k], "k = {k}");
        }
        assert!(norms[24] < 1e-2 && norms[24] < norms[dim]);
    }

    #[test]
    fn independence_moment_cases() {
        // parity mismatch: odd lambda with integer l
        let z = independence_moment(2, 1, 3).unwrap();
        assert_eq!(max_abs(&z), 0.0);
        // exterior
        let z = independence_moment(2, 4, 3).unwrap();
        assert_eq!(max_abs(&z), 0.0);
        // boundary l = 1/2, lambda = 1: norm decays exactly like 2^(-k/2)
        for k in 0..10u32 {
            let m = independence_moment(1, 1, k).unwrap();
            let expect = SQRT_HALF.powi(k as i32);
            let frob = m.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
            assert!((frob - expect).abs() <= 1e-12, "k = {k}");
        }
        // lambda = 0 reduces to the plain expected representation
        for k in 0..4u32 {
            let a = independence_moment(4, 0, k).unwrap();
            let b = expected_rep(4, k).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn symbolic_cross_check_small_grid() {
        for two_ell in 1..=4i64 {
            for lambda in -3..=3i64 {
                for k in 0..=3u32 {
                    let report = cross_check_symbolic(two_ell, lambda, k).unwrap();
                    assert!(
                        report.max_residual <= 1e-10,
                        "(2l, lambda, k) = ({two_ell}, {lambda}, {k}): {}",
                        report.max_residual
                    );
                    assert!(report.support_ok);
                }
            }
        }
    }

    #[test]
    fn cross_check_budget() {
        assert!(matches!(
            cross_check_symbolic(2, 0, 9),
            Err(Error::ResourceLimit(_))
        ));
    }

    #[test]
    fn energy_identity_on_random_polynomial_vectors() {
        // mean squared norm of A equals even-part plus odd-part energy of
        // T^l(w) A, because T^l(w) is pointwise unitary
        let mut rng = ChaCha12Rng::seed_from_u64(23);
        for two_ell in [2i64, 4, 6] {
            let tau = tau_matrix(two_ell).unwrap();
            let n = (two_ell + 1) as usize;
            let ell = two_ell / 2;
            for _ in 0..5 {
                let comps: Vec<CxPoly> = (0..n)
                    .map(|_| {
                        let coeffs: Vec<Complex64> = (0..(two_ell - 1) as usize)
                            .map(|_| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
                            .collect();
                        CxPoly::new(-(ell - 1), coeffs)
                    })
                    .collect();
                let total: f64 = comps
                    .iter()
                    .flat_map(|p| p.coeffs().iter())
                    .map(|c| c.norm_sqr())
                    .sum();
                // B_m = sum_h tau_{m,h} w^h A_h
                let mut even = 0.0;
                let mut odd = 0.0;
                for m_idx in 0..n {
                    let mut b = CxPoly::zero();
                    for h_idx in 0..n {
                        let h = -ell + h_idx as i64;
                        let term = comps[h_idx]
                            .shift(h)
                            .scale(&tau.matrix()[(m_idx, h_idx)]);
                        b = b.add(&term);
                    }
                    for (e, c) in b.iter() {
                        if e.rem_euclid(2) == 0 {
                            even += c.norm_sqr();
                        } else {
                            odd += c.norm_sqr();
                        }
                    }
                }
                assert!((total - (even + odd)).abs() <= 1e-10);
            }
        }
    }

    #[test]
    fn operator_matrices_are_real_or_purely_imaginary() {
        let op = build_s_lambda(5, 1).unwrap();
        assert!(op.matrix().iter().all(|c| c.re == 0.0));
        let op = build_s(6).unwrap();
        assert!(op.matrix().iter().all(|c| c.im == 0.0));
    }
}
