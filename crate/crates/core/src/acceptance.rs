//! End-to-end acceptance checks, shared by the `acceptance` integration test
//! target and the `rswalk accept` subcommand.
//!
//! Every tolerance is pinned here. The fast level trims grid sizes and
//! recursion depths; the full level runs the complete budgets.

use std::time::Instant;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed};
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use serde::Serialize;

use crate::circle;
use crate::halving;
use crate::rudin_shapiro::{self, RudinShapiroPair};
use crate::su2;
use crate::walk::{self, DyadicStepFunction, FiniteGroup};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Level {
    Fast,
    Full,
}

impl std::str::FromStr for Level {
    type Err = crate::Error;
    fn from_str(s: &str) -> crate::Result<Self> {
        match s {
            "fast" => Ok(Level::Fast),
            "full" => Ok(Level::Full),
            other => Err(crate::Error::invalid(format!("unknown level '{other}'"))),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CriterionResult {
    pub id: u32,
    pub name: &'static str,
    pub passed: bool,
    pub details: Vec<String>,
    pub seconds: f64,
}

impl CriterionResult {
    pub fn summary_line(&self) -> String {
        format!(
            "criterion {} [{}]: {} ({:.2}s) {}",
            self.id,
            self.name,
            if self.passed { "PASS" } else { "FAIL" },
            self.seconds,
            self.details.join("; ")
        )
    }
}

struct Checker {
    passed: bool,
    details: Vec<String>,
}

impl Checker {
    fn new() -> Self {
        Checker { passed: true, details: Vec::new() }
    }

    fn require(&mut self, ok: bool, what: impl Into<String>) {
        let what = what.into();
        if ok {
            self.details.push(what);
        } else {
            self.passed = false;
            self.details.push(format!("FAILED: {what}"));
        }
    }

    fn note(&mut self, what: impl Into<String>) {
        self.details.push(what.into());
    }

    fn fail(&mut self, what: impl Into<String>) {
        self.passed = false;
        self.details.push(format!("FAILED: {}", what.into()));
    }
}

pub const CRITERION_COUNT: u32 = 8;

pub fn run_all(level: Level) -> Vec<CriterionResult> {
    (1..=CRITERION_COUNT).map(|id| run_criterion(id, level)).collect()
}

pub fn run_criterion(id: u32, level: Level) -> CriterionResult {
    let (name, body): (&'static str, fn(Level, &mut Checker)) = match id {
        1 => ("exact-identities", criterion_identities),
        2 => ("saffari-moments", criterion_moments),
        3 => ("representation-correctness", criterion_representations),
        4 => ("proposition-margins", criterion_propositions),
        5 => ("spectral-radii", criterion_spectral_radii),
        6 => ("weyl-sum-decay", criterion_weyl_decay),
        7 => ("five-eighths-counterexample", criterion_counterexample),
        8 => ("empirical-equidistribution", criterion_equidistribution),
        other => {
            let mut c = Checker::new();
            c.fail(format!("unknown criterion id {other}"));
            return CriterionResult {
                id,
                name: "unknown",
                passed: false,
                details: c.details,
                seconds: 0.0,
            };
        }
    };
    let mut checker = Checker::new();
    let start = Instant::now();
    body(level, &mut checker);
    CriterionResult {
        id,
        name,
        passed: checker.passed,
        details: checker.details,
        seconds: start.elapsed().as_secs_f64(),
    }
}

/// Criterion 1: the recursion identities hold exactly.
fn criterion_identities(level: Level, c: &mut Checker) {
    let (parseval_max, alt_max, odd_max) = match level {
        Level::Full => (16u32, 14u32, 15u32),
        Level::Fast => (10, 8, 11),
    };
    for k in 0..=parseval_max {
        match rudin_shapiro::parseval_identity_check(k) {
            Ok(check) if check.holds => {}
            Ok(_) => return c.fail(format!("parseval identity broken at k = {k}")),
            Err(e) => return c.fail(format!("parseval at k = {k}: {e}")),
        }
    }
    c.require(true, format!("parseval identity exact for k <= {parseval_max}"));
    for k in 0..=alt_max {
        match rudin_shapiro::alt_recursion_check(k) {
            Ok(true) => {}
            Ok(false) => return c.fail(format!("second-order recursion broken at k = {k}")),
            Err(e) => return c.fail(format!("second-order recursion at k = {k}: {e}")),
        }
    }
    c.require(true, format!("second-order recursion exact for k <= {alt_max}"));
    for k in (1..=odd_max).step_by(2) {
        let v = RudinShapiroPair::generate(k).unwrap().p_at_minus_one();
        if v != 0 {
            return c.fail(format!("P_{k}(-1) = {v} != 0"));
        }
    }
    c.require(true, format!("P_k(-1) = 0 exactly for odd k <= {odd_max}"));
}

fn rational_abs(r: BigRational) -> BigRational {
    if r.is_negative() {
        -r
    } else {
        r
    }
}

/// Criterion 2: exact moment values and monotone convergence of the
/// normalized even moments toward `1/(n+1)`.
fn criterion_moments(level: Level, c: &mut Checker) {
    let (unit_max, mono_ks) = match level {
        Level::Full => (16u32, [4u32, 8, 12]),
        Level::Fast => (10, [2, 4, 6]),
    };
    for k in 0..=unit_max {
        let m = rudin_shapiro::exact_even_moment(k, 1).unwrap();
        if m.as_rational().unwrap() != BigRational::new(BigInt::one(), BigInt::from(2)) {
            return c.fail(format!("first moment at k = {k} is {}", m.value_string()));
        }
    }
    c.require(true, format!("m_1(k) = 1/2 exactly for k <= {unit_max}"));

    let anchors = [(1u32, 2u32, (3, 8)), (2, 2, (5, 16)), (3, 2, (88, 256))];
    for (k, n, (num, den)) in anchors {
        let m = rudin_shapiro::exact_even_moment(k, n).unwrap();
        let expect = BigRational::new(BigInt::from(num), BigInt::from(den));
        if m.as_rational().unwrap() != expect {
            return c.fail(format!(
                "m_{n}({k}) = {} instead of {num}/{den}",
                m.value_string()
            ));
        }
    }
    c.require(true, "anchor values 3/8, 5/16, 88/256 reproduced".to_string());

    for n in 2..=4u32 {
        let limit = BigRational::new(BigInt::one(), BigInt::from(n + 1));
        let mut gaps = Vec::new();
        for &k in &mono_ks {
            let m = rudin_shapiro::exact_even_moment(k, n).unwrap().as_rational().unwrap();
            gaps.push(rational_abs(m - limit.clone()));
        }
        let monotone = gaps.windows(2).all(|w| w[1] < w[0]);
        let shown: Vec<String> = gaps
            .iter()
            .map(|g| format!("{:.3e}", g.to_f64_lossy()))
            .collect();
        c.require(
            monotone,
            format!("|m_{n}(k) - 1/{}| decreasing over k = {mono_ks:?}: {shown:?}", n + 1),
        );
    }
}

trait LossyF64 {
    fn to_f64_lossy(&self) -> f64;
}

impl LossyF64 for BigRational {
    fn to_f64_lossy(&self) -> f64 {
        use num_traits::ToPrimitive;
        self.to_f64().unwrap_or(f64::NAN)
    }
}

/// Criterion 3: representation matrices are correct.
fn criterion_representations(level: Level, c: &mut Checker) {
    let mut worst_unitarity = 0.0f64;
    for two_ell in 1..=16 {
        let tau = su2::tau_matrix(two_ell).unwrap();
        worst_unitarity = worst_unitarity.max(tau.unitarity_residual());
    }
    c.require(
        worst_unitarity <= 1e-12,
        format!("tau unitarity residual {worst_unitarity:.2e} <= 1e-12 for 2l <= 16"),
    );

    let tau_half = su2::tau_matrix(1).unwrap();
    let g1 = su2::g_of(Complex64::ONE);
    let mut diff = 0.0f64;
    for i in 0..2 {
        for j in 0..2 {
            diff = diff.max((tau_half.matrix()[(i, j)] - g1[(i, j)]).norm());
        }
    }
    c.require(diff <= 1e-14, format!("tau at 2l = 1 equals g(1) to {diff:.2e}"));

    let pairs = match level {
        Level::Full => 100,
        Level::Fast => 25,
    };
    let mut rng = ChaCha12Rng::seed_from_u64(0x5eed);
    let mut worst_hom = 0.0f64;
    for two_ell in 1..=8 {
        for _ in 0..pairs {
            let g = su2::random_su2(&mut rng);
            let h = su2::random_su2(&mut rng);
            let lhs = su2::rep_matrix(two_ell, &g).unwrap().into_matrix()
                * su2::rep_matrix(two_ell, &h).unwrap().into_matrix();
            let rhs = su2::rep_matrix(two_ell, &(g * h)).unwrap().into_matrix();
            worst_hom = worst_hom.max(su2::max_abs(&(lhs - rhs)));
        }
    }
    c.require(
        worst_hom <= 1e-9,
        format!("homomorphism residual {worst_hom:.2e} <= 1e-9 over {pairs} pairs per 2l <= 8"),
    );
}

/// Criterion 4: invertibility, diagonal contraction, and full rank of the
/// four constrained patterns.
fn criterion_propositions(_level: Level, c: &mut Checker) {
    let mut min_sigma = f64::INFINITY;
    let mut max_diag = 0.0f64;
    let mut min_pattern = f64::INFINITY;
    for two_ell in 1..=16 {
        let report = su2::verify_propositions(two_ell).unwrap();
        min_sigma = min_sigma.min(report.sigma_min);
        max_diag = max_diag.max(report.corner_low_abs.max(report.corner_high_abs));
        if let Some(center) = report.center_abs {
            max_diag = max_diag.max(center);
        }
        for s in report.pattern_sigma_min {
            min_pattern = min_pattern.min(s);
        }
    }
    c.require(
        min_sigma >= 1.0 - 1e-9,
        format!("smallest singular value of tau is {min_sigma:.12} >= 1 - 1e-9"),
    );
    c.require(
        max_diag <= 1.0 - 1e-6,
        format!("surviving diagonal entries bounded by {max_diag:.6} <= 1 - 1e-6"),
    );
    c.require(
        min_pattern > 1e-8,
        format!("constrained-pattern singular values >= {min_pattern:.3e} > 1e-8"),
    );
}

/// Criterion 5: the spectral radii that drive everything.
fn criterion_spectral_radii(level: Level, c: &mut Checker) {
    let (plain_max, grid_max) = match level {
        Level::Full => (16i64, 9i64),
        Level::Fast => (10, 7),
    };
    let s1 = halving::spectral_radius(&halving::build_s(2).unwrap()).unwrap();
    c.require(
        s1.spectral_radius <= 1e-12,
        format!("rho(S_1) = {:.2e} <= 1e-12", s1.spectral_radius),
    );

    let mut worst_margin = f64::INFINITY;
    let mut worst_eig = 0.0f64;
    for two_ell in (4..=plain_max).step_by(2) {
        let report = halving::spectral_radius(&halving::build_s(two_ell).unwrap()).unwrap();
        worst_margin = worst_margin.min(report.margin);
        worst_eig = worst_eig.max(report.spectral_radius);
        if report.spectral_radius > 1.0 - 1e-6 {
            return c.fail(format!(
                "rho(S_l) = {} at 2l = {two_ell}",
                report.spectral_radius
            ));
        }
    }
    c.require(
        true,
        format!("rho(S_l) <= 1 - 1e-6 for 2 <= l <= {}, smallest margin {worst_margin:.4}", plain_max / 2),
    );

    let mut grid_count = 0;
    let mut grid_worst = 0.0f64;
    for two_ell in 2..=grid_max {
        for lambda in -(two_ell - 1)..=(two_ell - 1) {
            if !halving::parity_valid(two_ell, lambda) || !halving::interior(two_ell, lambda) {
                continue;
            }
            let op = halving::build_s_lambda(two_ell, lambda).unwrap();
            let report = halving::spectral_radius(&op).unwrap();
            grid_count += 1;
            grid_worst = grid_worst.max(report.spectral_radius);
            if report.spectral_radius > 1.0 - 1e-6 {
                return c.fail(format!(
                    "rho(S_(l,lambda)) = {} at (2l, lambda) = ({two_ell}, {lambda})",
                    report.spectral_radius
                ));
            }
            if report.eigenvalues.iter().any(|e| e.norm() > 1.0 + 1e-9) {
                return c.fail(format!(
                    "eigenvalue above 1 at (2l, lambda) = ({two_ell}, {lambda})"
                ));
            }
        }
    }
    c.require(
        grid_worst <= 1.0 - 1e-6,
        format!(
            "rho(S_(l,lambda)) <= 1 - 1e-6 on all {grid_count} interior pairs with 2l <= {grid_max}, max rho {grid_worst:.4}"
        ),
    );
}

/// Criterion 6: expected representations match the brute-force symbolic
/// product, and the boundary case contracts at exactly `2^(-1/2)` per step.
fn criterion_weyl_decay(_level: Level, c: &mut Checker) {
    let mut worst = 0.0f64;
    for two_ell in 1..=4i64 {
        for lambda in -3..=3i64 {
            for k in 0..=3u32 {
                let report = halving::cross_check_symbolic(two_ell, lambda, k).unwrap();
                worst = worst.max(report.max_residual);
                if !report.support_ok {
                    return c.fail(format!(
                        "exponent support out of range at (2l, lambda, k) = ({two_ell}, {lambda}, {k})"
                    ));
                }
            }
        }
    }
    c.require(
        worst <= 1e-10,
        format!("symbolic cross-check residual {worst:.2e} <= 1e-10 on the (2l <= 4, |lambda| <= 3, k <= 3) grid"),
    );

    for two_ell in [2i64, 4] {
        for k in 0..=3u32 {
            let a = halving::expected_rep(two_ell, k).unwrap();
            let b = halving::independence_moment(two_ell, 0, k).unwrap();
            if su2::max_abs(&(a - b)) > 1e-15 {
                return c.fail(format!("expected_rep disagrees with lambda = 0 moment at 2l = {two_ell}, k = {k}"));
            }
        }
    }
    c.note("expected_rep equals the lambda = 0 joint moment".to_string());

    let target = std::f64::consts::FRAC_1_SQRT_2;
    let mut worst_ratio = 0.0f64;
    let mut prev = frobenius(&halving::independence_moment(1, 1, 0).unwrap());
    for k in 1..=10u32 {
        let cur = frobenius(&halving::independence_moment(1, 1, k).unwrap());
        worst_ratio = worst_ratio.max((cur / prev - target).abs());
        prev = cur;
    }
    c.require(
        worst_ratio <= 1e-10,
        format!("boundary (l, lambda) = (1/2, 1) decay ratio within {worst_ratio:.2e} of 2^(-1/2)"),
    );
}

fn frobenius(m: &nalgebra::DMatrix<Complex64>) -> f64 {
    m.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

/// Criterion 7: the 5/8 counterexample, exactly.
fn criterion_counterexample(level: Level, c: &mut Checker) {
    let (k_max, random_instances) = match level {
        Level::Full => (12u32, 50u32),
        Level::Fast => (8, 15),
    };
    let (group, f) = DyadicStepFunction::five_eighths();
    let five_eighths = BigRational::new(BigInt::from(5), BigInt::from(8));
    let half = BigRational::new(BigInt::one(), BigInt::from(2));

    let at0 = walk::exact_product_distribution(&group, &f, 0).unwrap();
    c.require(at0.mass(0) == &half, format!("k = 0 mass {}", at0.mass(0)));
    for k in 1..=k_max {
        let dist = walk::exact_product_distribution(&group, &f, k).unwrap();
        if dist.mass(0) != &five_eighths {
            return c.fail(format!("mass at k = {k} is {}", dist.mass(0)));
        }
        if dist.total() != BigRational::one() {
            return c.fail(format!("masses at k = {k} sum to {}", dist.total()));
        }
    }
    c.require(true, format!("P(0) = 5/8 exactly for 1 <= k <= {k_max}"));

    for k in 0..=6u32 {
        let fast = walk::exact_product_distribution(&group, &f, k).unwrap();
        let slow = walk::brute_force_distribution(&group, &f, k).unwrap();
        if fast != slow {
            return c.fail(format!("chain and brute force disagree at k = {k}"));
        }
    }
    c.require(true, "chain equals brute force on the preset for k <= 6".to_string());

    let mut state = 0xace5u64;
    let mut next = move || {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        state
    };
    for case in 0..random_instances {
        let order = 2 + (next() % 5) as usize;
        let group = FiniteGroup::cyclic(order);
        let r = 1 + (next() % 4) as u32;
        let table: Vec<usize> =
            (0..1usize << r).map(|_| (next() % order as u64) as usize).collect();
        let f = DyadicStepFunction::new(r, table).unwrap();
        let k = (next() % 7) as u32;
        let fast = walk::exact_product_distribution(&group, &f, k).unwrap();
        let slow = walk::brute_force_distribution(&group, &f, k).unwrap();
        if fast != slow {
            return c.fail(format!("random instance {case} disagrees (order {order}, r {r}, k {k})"));
        }
    }
    c.require(true, format!("chain equals brute force on {random_instances} random instances"));
}

/// Criterion 8: empirical equidistribution improves with k, and the
/// matrix-product factorization of the pair holds to near machine precision.
fn criterion_equidistribution(level: Level, c: &mut Checker) {
    let (n_points, ks, mont_pair, link_max, link_samples) = match level {
        Level::Full => (1usize << 20, vec![4u32, 8, 12, 16], (8u32, 16u32), 12u32, 1000u64),
        Level::Fast => (1 << 16, vec![4, 8, 12], (8, 12), 8, 300),
    };
    let mut ks_values = Vec::new();
    for &k in &ks {
        let report = circle::saffari_report(k, n_points, 16).unwrap();
        ks_values.push(report.ks_statistic);
    }
    let monotone = ks_values.windows(2).all(|w| w[1] < w[0]);
    c.require(
        monotone,
        format!("KS statistics strictly decrease along k = {ks:?}: {ks_values:?}"),
    );

    let coarse = circle::montgomery_report(mont_pair.0, n_points, 8).unwrap();
    let fine = circle::montgomery_report(mont_pair.1, n_points, 8).unwrap();
    let dev_coarse = coarse.disc_grid.unwrap().max_deviation;
    let dev_fine = fine.disc_grid.unwrap().max_deviation;
    c.require(
        dev_fine < dev_coarse,
        format!(
            "disc-grid max deviation {dev_fine:.5} at k = {} below {dev_coarse:.5} at k = {}",
            mont_pair.1, mont_pair.0
        ),
    );

    let mut worst = 0.0f64;
    for k in 0..=link_max {
        let report = circle::link_check(k, link_samples, 0xfeed).unwrap();
        worst = worst.max(report.max_residual);
    }
    c.require(
        worst <= 1e-10,
        format!("factorization residual {worst:.2e} <= 1e-10 for k <= {link_max} over {link_samples} samples"),
    );
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fast_suite_passes() {
        for result in run_all(Level::Fast) {
            assert!(result.passed, "{}", result.summary_line());
        }
    }

    #[test]
    fn unknown_criterion_fails_cleanly() {
        let result = run_criterion(99, Level::Fast);
        assert!(!result.passed);
    }

    #[test]
    fn failure_injection_is_detected() {
        // perturbing a tau entry by 1e-3 must break the unitarity gate
        let tau = su2::tau_matrix(4).unwrap();
        let mut m = tau.matrix().clone();
        m[(0, 0)] += Complex64::new(1e-3, 0.0);
        let gram = m.adjoint() * &m;
        let residual = su2::max_abs(&(gram - nalgebra::DMatrix::identity(5, 5)));
        assert!(residual > 1e-12, "perturbation must be visible: {residual:.2e}");
    }
}
