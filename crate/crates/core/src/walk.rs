//! Lacunary products of dyadic step functions into finite groups, exactly,
//! plus Monte Carlo statistics of the 2x2 matrix walks.
//!
//! For `t = 0.b1 b2 b3 ...` with i.i.d. uniform bits and a step function of
//! resolution `2^r`, the factor `f(2^j t)` depends only on the bit window
//! `(b_{j+1}, ..., b_{j+r})`. The distribution of the ordered product
//! `f(2^k t) ... f(t)` (new factors joining on the left) is therefore the
//! output of a finite Markov chain over (window, accumulated product) pairs,
//! with exact dyadic transition probabilities.

use std::collections::BTreeMap;

use nalgebra::Matrix2;
use num_bigint::{BigInt, BigUint};
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use serde::{Deserialize, Serialize};

use crate::circle::ks_statistic_uniform01;
use crate::error::{Error, Result};
use crate::su2::{big_g_of, g_of};

/// Default cap on the sliding-window Markov chain state space.
pub const DEFAULT_STATE_BUDGET: usize = 1 << 20;

/// A finite group given by its Cayley table (`cayley[a][b] = a * b`).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiniteGroup {
    order: usize,
    cayley: Vec<Vec<usize>>,
    identity: usize,
    labels: Vec<String>,
}

impl FiniteGroup {
    pub fn new(cayley: Vec<Vec<usize>>, identity: usize, labels: Vec<String>) -> Result<Self> {
        let group = FiniteGroup { order: cayley.len(), cayley, identity, labels };
        group.validate()?;
        Ok(group)
    }

    /// The cyclic group of order `n` with labels `"0" ... "n-1"`.
    pub fn cyclic(n: usize) -> Self {
        let cayley = (0..n).map(|a| (0..n).map(|b| (a + b) % n).collect()).collect();
        FiniteGroup {
            order: n,
            cayley,
            identity: 0,
            labels: (0..n).map(|i| i.to_string()).collect(),
        }
    }

    fn validate(&self) -> Result<()> {
        let n = self.order;
        if n == 0 {
            return Err(Error::invalid("group must be nonempty"));
        }
        if self.cayley.len() != n || self.cayley.iter().any(|row| row.len() != n) {
            return Err(Error::invalid("Cayley table is not square"));
        }
        if self.labels.len() != n {
            return Err(Error::invalid("need one label per element"));
        }
        if self.identity >= n {
            return Err(Error::invalid("identity index out of range"));
        }
        for row in &self.cayley {
            if row.iter().any(|&e| e >= n) {
                return Err(Error::invalid("Cayley entry out of range"));
            }
        }
        // Latin square: every row and column is a permutation
        for i in 0..n {
            let mut row_seen = vec![false; n];
            let mut col_seen = vec![false; n];
            for j in 0..n {
                row_seen[self.cayley[i][j]] = true;
                col_seen[self.cayley[j][i]] = true;
            }
            if row_seen.iter().any(|&s| !s) || col_seen.iter().any(|&s| !s) {
                return Err(Error::invalid(format!(
                    "Cayley table row/column {i} is not a permutation"
                )));
            }
        }
        for a in 0..n {
            if self.cayley[self.identity][a] != a || self.cayley[a][self.identity] != a {
                return Err(Error::invalid("identity element does not act trivially"));
            }
        }
        if n <= 24 {
            for a in 0..n {
                for b in 0..n {
                    for c in 0..n {
                        if self.cayley[self.cayley[a][b]][c] != self.cayley[a][self.cayley[b][c]] {
                            return Err(Error::invalid(format!(
                                "associativity fails at ({a}, {b}, {c})"
                            )));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.cayley[a][b]
    }
}

/// A step function of resolution `2^r` into a finite group:
/// `f(t) = table[floor(t 2^r)]` on `[0, 1)`, extended periodically.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DyadicStepFunction {
    resolution: u32,
    table: Vec<usize>,
}

impl DyadicStepFunction {
    pub fn new(resolution: u32, table: Vec<usize>) -> Result<Self> {
        if resolution == 0 || resolution > 20 {
            return Err(Error::invalid("resolution must be in 1..=20"));
        }
        if table.len() != 1usize << resolution {
            return Err(Error::invalid(format!(
                "table length {} does not match resolution 2^{resolution}",
                table.len()
            )));
        }
        Ok(DyadicStepFunction { resolution, table })
    }

    pub fn resolution(&self) -> u32 {
        self.resolution
    }

    pub fn table(&self) -> &[usize] {
        &self.table
    }

    pub fn validate_for(&self, group: &FiniteGroup) -> Result<()> {
        if self.table.iter().any(|&v| v >= group.order()) {
            return Err(Error::invalid("step table refers to elements outside the group"));
        }
        Ok(())
    }

    /// The resolution-8 step map into Z/2Z whose lacunary products stabilize
    /// at P(product = 0) = 5/8 instead of equidistributing: value 0 on
    /// [0,1/8) u [1/2,5/8) u [3/4,1), value 1 on [1/8,1/2) u [5/8,3/4).
    pub fn five_eighths() -> (FiniteGroup, DyadicStepFunction) {
        (
            FiniteGroup::cyclic(2),
            DyadicStepFunction { resolution: 3, table: vec![0, 1, 1, 1, 0, 1, 0, 0] },
        )
    }
}

/// Serialized form of a walk instance: group and step function in one JSON
/// document.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct WalkInstance {
    pub order: usize,
    pub cayley: Vec<Vec<usize>>,
    pub identity: usize,
    pub labels: Vec<String>,
    pub resolution: u32,
    pub table: Vec<usize>,
}

impl WalkInstance {
    pub fn from_parts(group: &FiniteGroup, f: &DyadicStepFunction) -> Self {
        WalkInstance {
            order: group.order(),
            cayley: group.cayley.clone(),
            identity: group.identity(),
            labels: group.labels().to_vec(),
            resolution: f.resolution(),
            table: f.table().to_vec(),
        }
    }

    pub fn split(self) -> Result<(FiniteGroup, DyadicStepFunction)> {
        if self.cayley.len() != self.order {
            return Err(Error::invalid("order field disagrees with the Cayley table"));
        }
        let group = FiniteGroup::new(self.cayley, self.identity, self.labels)?;
        let f = DyadicStepFunction::new(self.resolution, self.table)?;
        f.validate_for(&group)?;
        Ok((group, f))
    }
}

/// An exact probability distribution on a finite group; every mass is a
/// dyadic rational and the masses sum to exactly 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactDistribution {
    masses: Vec<BigRational>,
}

impl ExactDistribution {
    fn from_counts(counts: Vec<BigUint>, denom_log2: u64) -> Self {
        let denom = BigInt::one() << denom_log2;
        let masses = counts
            .into_iter()
            .map(|c| BigRational::new(BigInt::from(c), denom.clone()))
            .collect();
        ExactDistribution { masses }
    }

    pub fn masses(&self) -> &[BigRational] {
        &self.masses
    }

    pub fn mass(&self, element: usize) -> &BigRational {
        &self.masses[element]
    }

    pub fn total(&self) -> BigRational {
        self.masses.iter().sum()
    }

    /// `(1/2) sum_g |mass(g) - 1/order|`, exactly.
    pub fn tv_distance_to_uniform(&self) -> BigRational {
        let order = self.masses.len();
        let uniform = BigRational::new(BigInt::one(), BigInt::from(order));
        let sum: BigRational = self
            .masses
            .iter()
            .map(|m| {
                let d = m - &uniform;
                if d < BigRational::zero() {
                    -d
                } else {
                    d
                }
            })
            .sum();
        sum / BigRational::from(BigInt::from(2))
    }

    /// Support indices with nonzero mass.
    pub fn support(&self) -> Vec<usize> {
        self.masses
            .iter()
            .enumerate()
            .filter(|(_, m)| !m.is_zero())
            .map(|(i, _)| i)
            .collect()
    }

    /// Label -> exact fraction string, for JSON output.
    pub fn to_string_map(&self, labels: &[String]) -> BTreeMap<String, String> {
        self.masses
            .iter()
            .enumerate()
            .map(|(i, m)| (labels[i].clone(), crate::rudin_shapiro::format_rational(m)))
            .collect()
    }
}

/// Exact distribution of `f(2^k t) f(2^(k-1) t) ... f(t)` via the
/// sliding-window chain.
pub fn exact_product_distribution(
    group: &FiniteGroup,
    f: &DyadicStepFunction,
    k: u32,
) -> Result<ExactDistribution> {
    exact_product_distribution_with_budget(group, f, k, DEFAULT_STATE_BUDGET)
}

pub fn exact_product_distribution_with_budget(
    group: &FiniteGroup,
    f: &DyadicStepFunction,
    k: u32,
    state_budget: usize,
) -> Result<ExactDistribution> {
    f.validate_for(group)?;
    let r = f.resolution();
    let windows = 1usize << r;
    let states = windows
        .checked_mul(group.order())
        .filter(|&s| s <= state_budget)
        .ok_or_else(|| {
            Error::resource(format!(
                "state space 2^{r} * {} exceeds the budget {state_budget}",
                group.order()
            ))
        })?;

    // counts[window * order + product] with implicit denominator 2^(r + step)
    let mut counts = vec![BigUint::zero(); states];
    for w in 0..windows {
        counts[w * group.order() + f.table()[w]] += 1u32;
    }
    let mask = windows - 1;
    for _ in 0..k {
        let mut next = vec![BigUint::zero(); states];
        for w in 0..windows {
            for q in 0..group.order() {
                let c = &counts[w * group.order() + q];
                if c.is_zero() {
                    continue;
                }
                for bit in 0..2usize {
                    let w_next = ((w << 1) | bit) & mask;
                    // the new factor f(2^(j)t) = table[w_next] multiplies on
                    // the left
                    let q_next = group.mul(f.table()[w_next], q);
                    next[w_next * group.order() + q_next] += c;
                }
            }
        }
        counts = next;
    }
    let mut by_element = vec![BigUint::zero(); group.order()];
    for w in 0..windows {
        for q in 0..group.order() {
            by_element[q] += &counts[w * group.order() + q];
        }
    }
    Ok(ExactDistribution::from_counts(by_element, r as u64 + k as u64))
}

/// Oracle: enumerate all `2^(k+r)` leading bit patterns of `t` (the product
/// is constant on each corresponding dyadic interval).
pub fn brute_force_distribution(
    group: &FiniteGroup,
    f: &DyadicStepFunction,
    k: u32,
) -> Result<ExactDistribution> {
    f.validate_for(group)?;
    let r = f.resolution();
    let total_bits = k + r;
    if total_bits > 24 {
        return Err(Error::resource(format!(
            "brute force enumerates 2^{total_bits} intervals, over the 2^24 cap"
        )));
    }
    let mask = (1usize << r) - 1;
    let mut counts = vec![0u64; group.order()];
    for pattern in 0..(1usize << total_bits) {
        // bit b_1 is the most significant; window j is bits b_{j+1}..b_{j+r}
        let mut q = f.table()[(pattern >> k) & mask];
        for j in 1..=k {
            let w = (pattern >> (k - j)) & mask;
            q = group.mul(f.table()[w], q);
        }
        counts[q] += 1;
    }
    Ok(ExactDistribution::from_counts(
        counts.into_iter().map(BigUint::from).collect(),
        total_bits as u64,
    ))
}

/// Which 2x2 matrix walk to sample.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum WalkKind {
    /// `g(w^(2^k)) ... g(w)` in SU(2).
    #[serde(rename = "su2-g")]
    Su2G,
    /// `G(w^(2^k)) ... G(w)` in U(2).
    #[serde(rename = "u2-g")]
    U2G,
}

impl std::str::FromStr for WalkKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "su2-g" | "su2_g" | "su2" => Ok(WalkKind::Su2G),
            "u2-g" | "u2_g" | "u2" => Ok(WalkKind::U2G),
            other => Err(Error::invalid(format!("unknown walk kind '{other}'"))),
        }
    }
}

/// Monte Carlo summary of a matrix walk. Bitwise reproducible for a fixed
/// `(kind, k, samples, seed)`.
#[derive(Clone, Debug, Serialize)]
pub struct WalkStatistics {
    pub kind: WalkKind,
    pub k: u32,
    pub samples: u64,
    pub seed: u64,
    /// Largest `max |M^H M - I|` over all sampled products.
    pub max_unitarity_residual: f64,
    /// KS distance of `|<e1, M e1>|^2` from uniform [0,1].
    pub overlap_ks: f64,
    /// 16-bin histogram of the overlap statistic.
    pub overlap_hist: Vec<f64>,
    /// For the SU(2) walk: per doubled label 1..=4, the largest entrywise
    /// modulus of the empirical mean of the representation matrix.
    pub rep_mean_max_abs: Vec<(i64, f64)>,
    /// Largest correlation between the phase `w^(2^(k+1)-1)` and an entry of
    /// the product.
    pub phase_correlation_max: f64,
    /// For the U(2) walk: KS distance of the determinant phase from uniform.
    pub det_phase_ks: Option<f64>,
}

const OVERLAP_BINS: usize = 16;
const REP_LABELS: [i64; 4] = [1, 2, 3, 4];

pub fn monte_carlo_matrix_walk(
    kind: WalkKind,
    k: u32,
    samples: u64,
    seed: u64,
) -> Result<WalkStatistics> {
    if samples == 0 {
        return Err(Error::invalid("need at least one sample"));
    }
    if k > 40 {
        return Err(Error::invalid("walk length capped at k = 40"));
    }
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut overlaps = Vec::with_capacity(samples as usize);
    let mut det_phases = if kind == WalkKind::U2G {
        Vec::with_capacity(samples as usize)
    } else {
        Vec::new()
    };
    let mut max_unitarity = 0.0f64;

    let mut rep = RepMeanAccumulator::new();

    // phase/entry correlation accumulators
    let mut sum_x = Complex64::ZERO;
    let mut sum_y = [Complex64::ZERO; 4];
    let mut sum_xy = [Complex64::ZERO; 4];
    let mut sum_y2 = [0.0f64; 4];

    for _ in 0..samples {
        let theta = std::f64::consts::TAU * rng.random::<f64>();
        let omega = Complex64::from_polar(1.0, theta);
        let mut m = match kind {
            WalkKind::Su2G => g_of(omega),
            WalkKind::U2G => big_g_of(omega),
        };
        let mut wp = omega;
        for _ in 1..=k {
            wp *= wp;
            m = match kind {
                WalkKind::Su2G => g_of(wp),
                WalkKind::U2G => big_g_of(wp),
            } * m;
        }
        let gram = m.adjoint() * m;
        let residual = (gram - Matrix2::identity())
            .iter()
            .map(|c| c.norm())
            .fold(0.0, f64::max);
        max_unitarity = max_unitarity.max(residual);

        overlaps.push(m[(0, 0)].norm_sqr());

        let phase = wp * wp * omega.conj(); // w^(2^(k+1) - 1)
        sum_x += phase;
        for (idx, &(i, j)) in [(0, 0), (0, 1), (1, 0), (1, 1)].iter().enumerate() {
            let y = m[(i, j)];
            sum_y[idx] += y;
            sum_xy[idx] += phase * y.conj();
            sum_y2[idx] += y.norm_sqr();
        }

        match kind {
            WalkKind::Su2G => rep.accumulate(&m),
            WalkKind::U2G => {
                let det = m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)];
                det_phases.push((det.arg() / std::f64::consts::TAU).rem_euclid(1.0));
            }
        }
    }

    let n = samples as f64;
    let overlap_ks = ks_statistic_uniform01(&overlaps);
    let mut overlap_hist = vec![0.0f64; OVERLAP_BINS];
    for &x in &overlaps {
        let idx = ((x * OVERLAP_BINS as f64) as usize).min(OVERLAP_BINS - 1);
        overlap_hist[idx] += 1.0 / n;
    }

    let mean_x = sum_x / n;
    let var_x = (1.0 - mean_x.norm_sqr()).max(0.0); // |phase| = 1 exactly
    let mut phase_correlation_max = 0.0f64;
    for idx in 0..4 {
        let mean_y = sum_y[idx] / n;
        let cov = sum_xy[idx] / n - mean_x * mean_y.conj();
        let var_y = (sum_y2[idx] / n - mean_y.norm_sqr()).max(0.0);
        if var_x > 1e-12 && var_y > 1e-12 {
            phase_correlation_max =
                phase_correlation_max.max(cov.norm() / (var_x * var_y).sqrt());
        }
    }

    let rep_mean_max_abs = match kind {
        WalkKind::Su2G => rep.finish(samples),
        WalkKind::U2G => Vec::new(),
    };
    let det_phase_ks = match kind {
        WalkKind::U2G => Some(ks_statistic_uniform01(&det_phases)),
        WalkKind::Su2G => None,
    };

    Ok(WalkStatistics {
        kind,
        k,
        samples,
        seed,
        max_unitarity_residual: max_unitarity,
        overlap_ks,
        overlap_hist,
        rep_mean_max_abs,
        phase_correlation_max,
        det_phase_ks,
    })
}

/// Allocation-free accumulator of representation-matrix means for the small
/// labels `2l = 1..=4`: expands
/// `(alpha z + gamma)^(l-n) (beta z + delta)^(l+n)` per column with
/// stack-resident buffers and precomputed binomial and factorial-ratio
/// tables.
struct RepMeanAccumulator {
    sums: Vec<Vec<Complex64>>, // per label, row-major (2l+1)^2 entries
    ratio_sqrt: Vec<Vec<f64>>, // sqrt((l-m)!(l+m)!/((l-n)!(l+n)!))
}

impl RepMeanAccumulator {
    fn new() -> Self {
        let mut sums = Vec::new();
        let mut ratio_sqrt = Vec::new();
        for &two_ell in REP_LABELS.iter() {
            let n = (two_ell + 1) as usize;
            sums.push(vec![Complex64::ZERO; n * n]);
            let fact = |v: i64| -> f64 { (1..=v).map(|x| x as f64).product::<f64>().max(1.0) };
            let mut ratios = vec![0.0; n * n];
            for row in 0..n {
                let dm = -two_ell + 2 * row as i64;
                for col in 0..n {
                    let dn = -two_ell + 2 * col as i64;
                    let num = fact((two_ell - dm) / 2) * fact((two_ell + dm) / 2);
                    let den = fact((two_ell - dn) / 2) * fact((two_ell + dn) / 2);
                    ratios[row * n + col] = (num / den).sqrt();
                }
            }
            ratio_sqrt.push(ratios);
        }
        RepMeanAccumulator { sums, ratio_sqrt }
    }

    fn accumulate(&mut self, m: &Matrix2<Complex64>) {
        let (alpha, beta) = (m[(0, 0)], m[(0, 1)]);
        let (gamma, delta) = (m[(1, 0)], m[(1, 1)]);
        let mut pa = [Complex64::ZERO; 5];
        let mut pb = [Complex64::ZERO; 5];
        let mut conv = [Complex64::ZERO; 5];
        for (li, &two_ell) in REP_LABELS.iter().enumerate() {
            let n = (two_ell + 1) as usize;
            for col in 0..n {
                let dn = -two_ell + 2 * col as i64;
                let a = ((two_ell - dn) / 2) as usize;
                let b = ((two_ell + dn) / 2) as usize;
                binomial_fill(alpha, gamma, a, &mut pa);
                binomial_fill(beta, delta, b, &mut pb);
                for c in conv.iter_mut().take(a + b + 1) {
                    *c = Complex64::ZERO;
                }
                for p in 0..=a {
                    for q in 0..=b {
                        conv[p + q] += pa[p] * pb[q];
                    }
                }
                for row in 0..n {
                    let dm = -two_ell + 2 * row as i64;
                    let e = ((two_ell - dm) / 2) as usize;
                    self.sums[li][row * n + col] +=
                        conv[e] * self.ratio_sqrt[li][row * n + col];
                }
            }
        }
    }

    fn finish(self, samples: u64) -> Vec<(i64, f64)> {
        let n = samples as f64;
        REP_LABELS
            .iter()
            .zip(self.sums)
            .map(|(&two_ell, sums)| {
                let max = sums.iter().map(|c| (c / n).norm()).fold(0.0, f64::max);
                (two_ell, max)
            })
            .collect()
    }
}

/// Coefficients of `(x z + y)^n` into `out[..=n]`, binomials hard-coded for
/// `n <= 4`.
fn binomial_fill(x: Complex64, y: Complex64, n: usize, out: &mut [Complex64; 5]) {
    const BINOM: [[f64; 5]; 5] = [
        [1.0, 0.0, 0.0, 0.0, 0.0],
        [1.0, 1.0, 0.0, 0.0, 0.0],
        [1.0, 2.0, 1.0, 0.0, 0.0],
        [1.0, 3.0, 3.0, 1.0, 0.0],
        [1.0, 4.0, 6.0, 4.0, 1.0],
    ];
    let mut xp = Complex64::ONE;
    let mut yp = [Complex64::ONE; 5];
    for p in 1..=n {
        yp[p] = yp[p - 1] * y;
    }
    for p in 0..=n {
        out[p] = xp * yp[n - p] * BINOM[n][p];
        xp *= x;
    }
}
