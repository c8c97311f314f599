//! Rudin-Shapiro pairs and their exact identities and moments.
//!
//! The pair is defined by `P_0 = Q_0 = 1` and
//! `P_{k+1}(z) = P_k(z) + z^(2^k) Q_k(z)`,
//! `Q_{k+1}(z) = P_k(z) - z^(2^k) Q_k(z)`,
//! so both have all coefficients in {+1, -1} and length `2^k`. Moments of
//! `|P_k|` over the unit circle are computed exactly as constant terms of
//! big-integer Laurent products, never by sampling.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::poly::IntPoly;

/// Largest recursion depth generated by default (memory bound: `2^24`
/// coefficients per polynomial).
pub const DEFAULT_MAX_K: u32 = 24;

/// Default budget for the number of stored terms in any intermediate
/// moment product.
pub const DEFAULT_TERM_BUDGET: u64 = 1 << 21;

/// The coefficient pair `(P_k, Q_k)` at recursion depth `k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RudinShapiroPair {
    k: u32,
    p: Vec<i8>,
    q: Vec<i8>,
}

impl RudinShapiroPair {
    pub fn generate(k: u32) -> Result<Self> {
        Self::generate_with_limit(k, DEFAULT_MAX_K)
    }

    pub fn generate_with_limit(k: u32, max_k: u32) -> Result<Self> {
        if k > max_k {
            return Err(Error::resource(format!(
                "recursion depth k = {k} exceeds the configured maximum {max_k}"
            )));
        }
        let mut p: Vec<i8> = vec![1];
        let mut q: Vec<i8> = vec![1];
        for _ in 0..k {
            // P' = P ++ Q, Q' = P ++ (-Q)
            let mut p_next = p.clone();
            p_next.extend(q.iter().copied());
            let mut q_next = p;
            q_next.extend(q.iter().map(|&c| -c));
            p = p_next;
            q = q_next;
        }
        Ok(RudinShapiroPair { k, p, q })
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn p(&self) -> &[i8] {
        &self.p
    }

    pub fn q(&self) -> &[i8] {
        &self.q
    }

    pub fn len(&self) -> usize {
        self.p.len()
    }

    pub fn is_empty(&self) -> bool {
        self.p.is_empty()
    }

    pub fn p_poly(&self) -> IntPoly {
        IntPoly::new(0, self.p.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn q_poly(&self) -> IntPoly {
        IntPoly::new(0, self.q.iter().map(|&c| BigInt::from(c)).collect())
    }

    /// Exact value of `P_k(-1)`.
    pub fn p_at_minus_one(&self) -> i64 {
        self.p
            .iter()
            .enumerate()
            .map(|(i, &c)| if i % 2 == 0 { c as i64 } else { -(c as i64) })
            .sum()
    }
}

/// Outcome of the exact identity `P(z)P(1/z) + Q(z)Q(1/z) = 2^(k+1)`.
#[derive(Clone, Debug)]
pub struct ParsevalCheck {
    pub k: u32,
    pub holds: bool,
    /// `P(z)P(1/z) + Q(z)Q(1/z) - 2^(k+1)`, identically zero when the
    /// identity holds; kept for diagnostics.
    pub residual: IntPoly,
}

/// Verifies `|P_k|^2 + |Q_k|^2 = 2^(k+1)` as an exact Laurent identity
/// (coefficients are real, so `|P(z)|^2 = P(z)P(1/z)` on the circle).
pub fn parseval_identity_check(k: u32) -> Result<ParsevalCheck> {
    let pair = RudinShapiroPair::generate(k)?;
    let p = pair.p_poly();
    let q = pair.q_poly();
    let sum = p.multiply(&p.reverse()).add(&q.multiply(&q.reverse()));
    let expected = IntPoly::constant(BigInt::one() << (k + 1));
    let residual = sum.sub(&expected);
    Ok(ParsevalCheck { k, holds: residual.is_zero(), residual })
}

/// Verifies the second-order recursion
/// `P_{k+2}(z) = (1 - z^(2^(k+1))) P_{k+1}(z) + 2 z^(2^(k+1)) P_k(z)`
/// exactly, together with `P_j(-1) = 0` for every odd `j <= k+2`.
pub fn alt_recursion_check(k: u32) -> Result<bool> {
    if k + 2 > DEFAULT_MAX_K {
        return Err(Error::resource(format!(
            "k + 2 = {} exceeds the generation bound {DEFAULT_MAX_K}",
            k + 2
        )));
    }
    let p_k = RudinShapiroPair::generate(k)?.p_poly();
    let p_k1 = RudinShapiroPair::generate(k + 1)?.p_poly();
    let p_k2 = RudinShapiroPair::generate(k + 2)?.p_poly();

    let step = 1i64 << (k + 1);
    let factor = IntPoly::new(0, vec![BigInt::one()]).sub(&IntPoly::monomial(BigInt::one(), step));
    let rhs = factor
        .multiply(&p_k1)
        .add(&p_k.scale(&BigInt::from(2)).shift(step));
    if rhs != p_k2 {
        return Ok(false);
    }
    for j in (1..=k + 2).step_by(2) {
        if RudinShapiroPair::generate(j)?.p_at_minus_one() != 0 {
            return Ok(false);
        }
    }
    Ok(true)
}

/// An exactly represented normalized moment
/// `value = constant_term / 2^(log2_denom_doubled / 2)`.
///
/// Even moments always have an even denominator exponent and therefore an
/// exact rational value; mixed moments with `n + m` odd pick up a factor
/// `sqrt(2)` in the denominator and are kept in this split form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactMoment {
    pub k: u32,
    pub n: u32,
    pub m: u32,
    pub constant_term: BigInt,
    /// `(n + m) * (k + 1)`: twice the base-2 logarithm of the normalization.
    pub log2_denom_doubled: u64,
}

impl ExactMoment {
    pub fn is_rational(&self) -> bool {
        self.log2_denom_doubled.is_multiple_of(2) || self.constant_term.is_zero()
    }

    /// Exact rational value, when one exists.
    pub fn as_rational(&self) -> Option<BigRational> {
        if self.constant_term.is_zero() {
            return Some(BigRational::zero());
        }
        if !self.log2_denom_doubled.is_multiple_of(2) {
            return None;
        }
        let denom = BigInt::one() << (self.log2_denom_doubled / 2);
        Some(BigRational::new(self.constant_term.clone(), denom))
    }

    pub fn to_f64(&self) -> f64 {
        let c = self.constant_term.to_f64().unwrap_or(f64::NAN);
        c / 2f64.powf(self.log2_denom_doubled as f64 / 2.0)
    }

    /// Canonical string: a reduced fraction when the value is rational,
    /// otherwise `c/2^(e/2)` with both parts exact.
    pub fn value_string(&self) -> String {
        match self.as_rational() {
            Some(r) => format_rational(&r),
            None => format!(
                "{}/2^({}/2)",
                self.constant_term, self.log2_denom_doubled
            ),
        }
    }
}

pub fn format_rational(r: &BigRational) -> String {
    if r.denom().is_one() {
        format!("{}", r.numer())
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Exact normalized even moment
/// `E |P_k(w)/sqrt(2^(k+1))|^(2n) = constant_term((P P~)^n) / 2^(n(k+1))`
/// where `P~(z) = P(1/z)`.
pub fn exact_even_moment(k: u32, n: u32) -> Result<ExactMoment> {
    exact_even_moment_with_budget(k, n, DEFAULT_TERM_BUDGET)
}

pub fn exact_even_moment_with_budget(k: u32, n: u32, budget: u64) -> Result<ExactMoment> {
    let moment = exact_mixed_moment_with_budget(k, n, n, budget)?;
    let value = moment
        .as_rational()
        .expect("even moments always have even denominator exponent");
    // normalized even moments lie in [0, 1]
    debug_assert!(!value.is_negative() && value <= BigRational::one());
    Ok(moment)
}

/// Exact mixed moment
/// `E [conj P_k(w)]^n [P_k(w)]^m / 2^((n+m)(k+1)/2)`, real because the
/// coefficients are real, computed as the constant term of
/// `P(1/z)^n P(z)^m`.
pub fn exact_mixed_moment(k: u32, n: u32, m: u32) -> Result<ExactMoment> {
    exact_mixed_moment_with_budget(k, n, m, DEFAULT_TERM_BUDGET)
}

pub fn exact_mixed_moment_with_budget(k: u32, n: u32, m: u32, budget: u64) -> Result<ExactMoment> {
    let span = (1u64 << (k + 1)) - 1; // stored terms of P(z)P(1/z) and of P^2
    let total = (n as u64 + m as u64).max(1) * span;
    if total > budget {
        return Err(Error::resource(format!(
            "moment product would hold ~{total} terms, over the budget {budget}"
        )));
    }
    let pair = RudinShapiroPair::generate(k)?;
    let p = pair.p_poly();
    let constant_term = if n == m {
        // |P|^(2n): power of the autocorrelation polynomial
        p.multiply(&p.reverse()).power(n as u64).constant_term()
    } else {
        let rev_pow = p.reverse().power(n as u64);
        let fwd_pow = p.power(m as u64);
        rev_pow.multiply(&fwd_pow).constant_term()
    };
    Ok(ExactMoment {
        k,
        n,
        m,
        constant_term,
        log2_denom_doubled: (n as u64 + m as u64) * (k as u64 + 1),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn base_pair_is_all_ones() {
        let pair = RudinShapiroPair::generate(0).unwrap();
        assert_eq!(pair.p(), &[1]);
        assert_eq!(pair.q(), &[1]);
    }

    #[test]
    fn first_two_levels() {
        let pair = RudinShapiroPair::generate(1).unwrap();
        assert_eq!(pair.p(), &[1, 1]);
        assert_eq!(pair.q(), &[1, -1]);
        let pair = RudinShapiroPair::generate(2).unwrap();
        assert_eq!(pair.p(), &[1, 1, 1, -1]);
        assert_eq!(pair.q(), &[1, 1, -1, 1]);
    }

    #[test]
    fn prefix_property() {
        for k in 1..=10u32 {
            let lo = RudinShapiroPair::generate(k - 1).unwrap();
            let hi = RudinShapiroPair::generate(k).unwrap();
            assert_eq!(&hi.p()[..lo.len()], lo.p());
            assert_eq!(&hi.q()[..lo.len()], lo.p());
        }
    }

    #[test]
    fn generation_bound_is_enforced() {
        assert!(matches!(
            RudinShapiroPair::generate(DEFAULT_MAX_K + 1),
            Err(Error::ResourceLimit(_))
        ));
    }

    #[test]
    fn parseval_small_k() {
        for k in 0..=12u32 {
            let check = parseval_identity_check(k).unwrap();
            assert!(check.holds, "k = {k}: residual {}", check.residual);
        }
    }

    #[test]
    fn parseval_constant_at_k3_is_16() {
        let pair = RudinShapiroPair::generate(3).unwrap();
        let p = pair.p_poly();
        let q = pair.q_poly();
        let sum = p.multiply(&p.reverse()).add(&q.multiply(&q.reverse()));
        assert_eq!(sum, IntPoly::constant(BigInt::from(16)));
    }

    #[test]
    fn alt_recursion_direct_expansion_at_k0() {
        // P_2 = (1 - z^2)(1 + z) + 2 z^2
        assert!(alt_recursion_check(0).unwrap());
        let lhs = RudinShapiroPair::generate(2).unwrap().p_poly();
        assert_eq!(lhs, IntPoly::from_i64(0, &[1, 1, 1, -1]));
    }

    #[test]
    fn alt_recursion_mid_range() {
        for k in 0..=10u32 {
            assert!(alt_recursion_check(k).unwrap(), "k = {k}");
        }
    }

    #[test]
    fn p_at_minus_one_vanishes_for_odd_k() {
        for k in (1..=13u32).step_by(2) {
            assert_eq!(RudinShapiroPair::generate(k).unwrap().p_at_minus_one(), 0);
        }
    }

    /// Independent oracle: moments via naive convolution over i64, written
    /// without the LaurentPoly machinery.
    fn oracle_even_moment_constant(k: u32, n: u32) -> i64 {
        let pair = RudinShapiroPair::generate(k).unwrap();
        let coeffs: Vec<i64> = pair.p().iter().map(|&c| c as i64).collect();
        let len = coeffs.len();
        // autocorrelation a[t] for t = -(len-1)..=(len-1)
        let mut auto = vec![0i64; 2 * len - 1];
        for i in 0..len {
            for j in 0..len {
                auto[i + (len - 1) - j] += coeffs[i] * coeffs[j];
            }
        }
        // n-th power by repeated naive convolution; track the constant term
        let mut acc = vec![1i64];
        for _ in 0..n {
            let mut next = vec![0i64; acc.len() + auto.len() - 1];
            for (i, &x) in acc.iter().enumerate() {
                if x == 0 {
                    continue;
                }
                for (j, &y) in auto.iter().enumerate() {
                    next[i + j] += x * y;
                }
            }
            acc = next;
        }
        acc[acc.len() / 2]
    }

    #[test]
    fn even_moment_matches_brute_force_oracle() {
        // frozen oracle outputs for n = 2: 1, 6, 20, 88 at k = 0..3
        assert_eq!(oracle_even_moment_constant(0, 2), 1);
        assert_eq!(oracle_even_moment_constant(1, 2), 6);
        assert_eq!(oracle_even_moment_constant(2, 2), 20);
        assert_eq!(oracle_even_moment_constant(3, 2), 88);
        for k in 0..=5u32 {
            for n in 0..=4u32 {
                let m = exact_even_moment(k, n).unwrap();
                assert_eq!(
                    m.constant_term,
                    BigInt::from(oracle_even_moment_constant(k, n)),
                    "k = {k}, n = {n}"
                );
            }
        }
    }

    #[test]
    fn even_moment_values() {
        for k in 0..=10u32 {
            let m = exact_even_moment(k, 1).unwrap();
            assert_eq!(m.as_rational().unwrap(), BigRational::new(1.into(), 2.into()));
        }
        assert_eq!(exact_even_moment(1, 2).unwrap().value_string(), "3/8");
        assert_eq!(exact_even_moment(2, 2).unwrap().value_string(), "5/16");
        assert_eq!(exact_even_moment(3, 2).unwrap().value_string(), "11/32"); // 88/256
        assert_eq!(exact_even_moment(7, 0).unwrap().value_string(), "1");
    }

    #[test]
    fn second_moment_closed_form() {
        // 3 * 4^(k+1) * m_2(k) = 4^(k+1) - (-2)^k, fitted to the oracle
        // values 1, 6, 20, 88 above.
        for k in 0..=10u32 {
            let m = exact_even_moment(k, 2).unwrap().as_rational().unwrap();
            let four_pow = BigRational::from(BigInt::one() << (2 * (k + 1)));
            let neg_two_pow = BigRational::from(BigInt::from(-2).pow(k));
            let lhs = m * BigRational::from(BigInt::from(3)) * four_pow.clone();
            assert_eq!(lhs, four_pow - neg_two_pow, "k = {k}");
        }
    }

    #[test]
    fn even_moments_lie_in_unit_interval() {
        for k in 0..=8u32 {
            for n in 1..=4u32 {
                let v = exact_even_moment(k, n).unwrap().as_rational().unwrap();
                assert!(v > BigRational::zero() && v <= BigRational::one());
            }
        }
    }

    #[test]
    fn mixed_moment_symmetry_and_special_cases() {
        for k in 0..=5u32 {
            for n in 0..=3u32 {
                for m in 0..=3u32 {
                    let a = exact_mixed_moment(k, n, m).unwrap();
                    let b = exact_mixed_moment(k, m, n).unwrap();
                    assert_eq!(a.constant_term, b.constant_term);
                }
                assert_eq!(
                    exact_mixed_moment(k, n, n).unwrap().constant_term,
                    exact_even_moment(k, n).unwrap().constant_term
                );
            }
            // mean of P_k over the circle is its constant coefficient, 1
            let mean = exact_mixed_moment(k, 1, 0).unwrap();
            assert_eq!(mean.constant_term, BigInt::one());
            assert_eq!(mean.log2_denom_doubled, (k as u64) + 1);
        }
        let unit = exact_mixed_moment(5, 0, 0).unwrap();
        assert_eq!(unit.value_string(), "1");
    }

    #[test]
    fn moment_budget_is_enforced() {
        assert!(matches!(
            exact_even_moment_with_budget(12, 4, 1 << 10),
            Err(Error::ResourceLimit(_))
        ));
    }
}
