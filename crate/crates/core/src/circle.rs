//! Evaluation of Rudin-Shapiro polynomials at roots of unity and the
//! empirical distribution statistics built on top of it.
//!
//! Values are computed by a zero-padded inverse FFT (so `values[j] =
//! P_k(exp(2 pi i j / N))` exactly up to double-precision transform error),
//! deterministic for a fixed grid size.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rustfft::FftPlanner;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::rudin_shapiro::RudinShapiroPair;
use crate::su2::g_of;

/// Hard cap on evaluation grids.
pub const MAX_GRID_POINTS: usize = 1 << 22;

/// Values of `P_k` at the `N`-th roots of unity.
#[derive(Clone, Debug)]
pub struct EvaluationGrid {
    pub k: u32,
    pub n_points: usize,
    pub values: Vec<Complex64>,
}

fn validate_grid(k: u32, n_points: usize) -> Result<()> {
    if !n_points.is_power_of_two() {
        return Err(Error::invalid(format!(
            "grid size must be a power of two, got {n_points}"
        )));
    }
    if n_points > MAX_GRID_POINTS {
        return Err(Error::invalid(format!(
            "grid size {n_points} exceeds the cap {MAX_GRID_POINTS}"
        )));
    }
    if (n_points as u64) < (1u64 << k) {
        return Err(Error::invalid(format!(
            "grid size {n_points} does not resolve a degree-2^{k} polynomial"
        )));
    }
    Ok(())
}

/// `sum_i coeffs[i] exp(2 pi i * i j / N)` for every `j`, via inverse FFT.
pub fn eval_real_coeffs_at_roots(coeffs: &[f64], n_points: usize) -> Result<Vec<Complex64>> {
    if coeffs.len() > n_points {
        return Err(Error::invalid("more coefficients than grid points"));
    }
    let mut buffer: Vec<Complex64> = coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect();
    buffer.resize(n_points, Complex64::ZERO);
    let fft = FftPlanner::<f64>::new().plan_fft_inverse(n_points);
    fft.process(&mut buffer);
    Ok(buffer)
}

pub fn eval_at_roots(pair: &RudinShapiroPair, n_points: usize) -> Result<EvaluationGrid> {
    validate_grid(pair.k(), n_points)?;
    let coeffs: Vec<f64> = pair.p().iter().map(|&c| c as f64).collect();
    Ok(EvaluationGrid {
        k: pair.k(),
        n_points,
        values: eval_real_coeffs_at_roots(&coeffs, n_points)?,
    })
}

/// One-sample Kolmogorov-Smirnov statistic against the uniform law on
/// `[0, 1]`.
pub fn ks_statistic_uniform01(samples: &[f64]) -> f64 {
    let mut xs: Vec<f64> = samples.iter().map(|&x| x.clamp(0.0, 1.0)).collect();
    xs.sort_unstable_by(|a, b| a.total_cmp(b));
    let n = xs.len() as f64;
    let mut d = 0.0f64;
    for (i, &x) in xs.iter().enumerate() {
        d = d.max(x - i as f64 / n);
        d = d.max((i + 1) as f64 / n - x);
    }
    d
}

#[derive(Clone, Debug, Serialize)]
pub struct HistBin {
    pub low: f64,
    pub high: f64,
    pub mass: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct DiscGrid {
    pub grid_size: usize,
    /// Row-major cell frequencies over `[-1,1]^2`.
    pub masses: Vec<f64>,
    /// `max_cells |frequency - area(cell in disc)/pi|`.
    pub max_deviation: f64,
    /// Total frequency of values inside the closed unit disc (up to 1e-9).
    pub in_disc_mass: f64,
}

/// Distribution evidence for one grid evaluation: empirical CDF distance of
/// the normalized squared modulus from uniform, histogram masses, and the
/// in-disc cell frequencies when requested.
#[derive(Clone, Debug, Serialize)]
pub struct DistributionReport {
    pub k: u32,
    pub n_points: usize,
    pub ks_statistic: f64,
    pub bins: Vec<HistBin>,
    pub disc_grid: Option<DiscGrid>,
    pub min_modulus: f64,
    pub max_modulus: f64,
}

fn normalized_squares(grid: &EvaluationGrid) -> Vec<f64> {
    let scale = 1.0 / 2f64.powi(grid.k as i32 + 1);
    grid.values.iter().map(|v| v.norm_sqr() * scale).collect()
}

/// Empirical law of `|P_k / sqrt(2^(k+1))|^2` against uniform `[0,1]`.
pub fn saffari_report(k: u32, n_points: usize, bins: usize) -> Result<DistributionReport> {
    if bins < 2 {
        return Err(Error::invalid("need at least 2 bins"));
    }
    let grid = eval_at_roots(&RudinShapiroPair::generate(k)?, n_points)?;
    let xs = normalized_squares(&grid);
    let ks_statistic = ks_statistic_uniform01(&xs);
    let mut masses = vec![0.0f64; bins];
    let mut min_sq = f64::INFINITY;
    let mut max_sq = 0.0f64;
    for &x in &xs {
        min_sq = min_sq.min(x);
        max_sq = max_sq.max(x);
        let idx = ((x * bins as f64) as usize).min(bins - 1);
        masses[idx] += 1.0;
    }
    let n = xs.len() as f64;
    let hist = masses
        .iter()
        .enumerate()
        .map(|(i, &m)| HistBin {
            low: i as f64 / bins as f64,
            high: (i + 1) as f64 / bins as f64,
            mass: m / n,
        })
        .collect();
    Ok(DistributionReport {
        k,
        n_points,
        ks_statistic,
        bins: hist,
        disc_grid: None,
        min_modulus: min_sq.sqrt(),
        max_modulus: max_sq.sqrt(),
    })
}

/// Cell frequencies of `P_k / sqrt(2^(k+1))` over an axis-aligned partition
/// of `[-1,1]^2`, compared against `area(cell in disc) / pi`.
pub fn montgomery_report(k: u32, n_points: usize, grid_size: usize) -> Result<DistributionReport> {
    if grid_size < 2 {
        return Err(Error::invalid("need grid_size >= 2"));
    }
    let grid = eval_at_roots(&RudinShapiroPair::generate(k)?, n_points)?;
    let scale = 1.0 / 2f64.powf((k as f64 + 1.0) / 2.0);
    let g = grid_size;
    let mut masses = vec![0.0f64; g * g];
    let mut in_disc = 0u64;
    let mut min_mod = f64::INFINITY;
    let mut max_mod = 0.0f64;
    let mut squares = Vec::with_capacity(grid.values.len());
    for v in &grid.values {
        let w = v * scale;
        let r = w.norm();
        min_mod = min_mod.min(r);
        max_mod = max_mod.max(r);
        squares.push(r * r);
        if r <= 1.0 + 1e-9 {
            in_disc += 1;
        }
        let ix = (((w.re + 1.0) * g as f64 / 2.0) as usize).min(g - 1);
        let iy = (((w.im + 1.0) * g as f64 / 2.0) as usize).min(g - 1);
        masses[iy * g + ix] += 1.0;
    }
    let n = grid.values.len() as f64;
    let mut max_deviation = 0.0f64;
    for iy in 0..g {
        for ix in 0..g {
            masses[iy * g + ix] /= n;
            let x0 = -1.0 + 2.0 * ix as f64 / g as f64;
            let x1 = -1.0 + 2.0 * (ix + 1) as f64 / g as f64;
            let y0 = -1.0 + 2.0 * iy as f64 / g as f64;
            let y1 = -1.0 + 2.0 * (iy + 1) as f64 / g as f64;
            let expected = disc_cell_area(x0, x1, y0, y1) / std::f64::consts::PI;
            max_deviation = max_deviation.max((masses[iy * g + ix] - expected).abs());
        }
    }
    Ok(DistributionReport {
        k,
        n_points,
        ks_statistic: ks_statistic_uniform01(&squares),
        bins: Vec::new(),
        disc_grid: Some(DiscGrid {
            grid_size: g,
            masses,
            max_deviation,
            in_disc_mass: in_disc as f64 / n,
        }),
        min_modulus: min_mod,
        max_modulus: max_mod,
    })
}

/// Exact area of `[x0,x1] x [y0,y1]` intersected with the closed unit disc.
pub fn disc_cell_area(x0: f64, x1: f64, y0: f64, y1: f64) -> f64 {
    quadrant_integral(x1, y1) - quadrant_integral(x0, y1) - quadrant_integral(x1, y0)
        + quadrant_integral(x0, y0)
}

/// Signed area of `[0,x] x [0,y]` intersected with the unit disc.
fn quadrant_integral(x: f64, y: f64) -> f64 {
    let sign = x.signum() * y.signum();
    sign * positive_quadrant_area(x.abs(), y.abs())
}

fn positive_quadrant_area(x: f64, y: f64) -> f64 {
    let xc = x.min(1.0);
    if xc <= 0.0 || y <= 0.0 {
        return 0.0;
    }
    let yc = y.min(1.0);
    // u below c: the horizontal line y is under the arc; above: the arc caps
    let c = (1.0 - yc * yc).max(0.0).sqrt();
    let flat = yc * xc.min(c);
    let curved = if xc > c {
        circle_segment_integral(xc) - circle_segment_integral(c)
    } else {
        0.0
    };
    flat + curved
}

/// `int_0^a sqrt(1 - u^2) du`.
fn circle_segment_integral(a: f64) -> f64 {
    let a = a.clamp(0.0, 1.0);
    0.5 * (a * (1.0 - a * a).sqrt() + a.asin())
}

/// Minimum of the normalized modulus over the grid.
#[derive(Clone, Debug, Serialize)]
pub struct MinModulusReport {
    pub k: u32,
    pub n_points: usize,
    pub min_modulus: f64,
    pub argmin_index: usize,
    pub argmin_re: f64,
    pub argmin_im: f64,
}

pub fn min_modulus_report(k: u32, n_points: usize) -> Result<MinModulusReport> {
    let grid = eval_at_roots(&RudinShapiroPair::generate(k)?, n_points)?;
    let scale = 1.0 / 2f64.powf((k as f64 + 1.0) / 2.0);
    let (argmin_index, value) = grid
        .values
        .iter()
        .enumerate()
        .map(|(i, v)| (i, v.norm() * scale))
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("grid is nonempty");
    let theta = std::f64::consts::TAU * argmin_index as f64 / n_points as f64;
    Ok(MinModulusReport {
        k,
        n_points,
        min_modulus: value,
        argmin_index,
        argmin_re: theta.cos(),
        argmin_im: theta.sin(),
    })
}

/// Residuals of the matrix-product factorization of the pair: for random
/// `z` on the circle,
/// `g(z^(2^k)) ... g(z) e_1 = i^(k+1) z^-(2^(k+1)-1)
///  (P_k(z^4), Q_k(z^4))^T / sqrt(2^(k+1))`.
#[derive(Clone, Debug, Serialize)]
pub struct LinkReport {
    pub k: u32,
    pub samples: u64,
    pub seed: u64,
    pub max_residual: f64,
    /// Largest deviation of the product column norm from 1.
    pub max_norm_deviation: f64,
}

pub fn link_check(k: u32, samples: u64, seed: u64) -> Result<LinkReport> {
    if k > 12 {
        return Err(Error::invalid("factorization check supports k <= 12"));
    }
    if samples == 0 {
        return Err(Error::invalid("need at least one sample"));
    }
    let pair = RudinShapiroPair::generate(k)?;
    let scale = 1.0 / 2f64.powf((k as f64 + 1.0) / 2.0);
    let phase_i = crate::su2::i_power(k as i64 + 1);
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut max_residual = 0.0f64;
    let mut max_norm_deviation = 0.0f64;
    for _ in 0..samples {
        let theta = std::f64::consts::TAU * rng.random::<f64>();
        let z = Complex64::from_polar(1.0, theta);
        // ordered product applied to e_1, lowest power first
        let mut v = nalgebra::Vector2::new(Complex64::ONE, Complex64::ZERO);
        let mut zp = z;
        let mut top_power = z;
        for j in 0..=k {
            v = g_of(zp) * v;
            top_power = zp;
            if j < k {
                zp *= zp;
            }
        }
        // z^(2^(k+1) - 1) = (z^(2^k))^2 / z
        let z_big = top_power * top_power * z.conj();
        let phase = phase_i * z_big.conj();
        let w = z * z * z * z;
        let (p, q) = horner_pair(&pair, w);
        let lhs0 = phase * p * scale;
        let lhs1 = phase * q * scale;
        let residual = ((v[0] - lhs0).norm_sqr() + (v[1] - lhs1).norm_sqr()).sqrt();
        max_residual = max_residual.max(residual);
        max_norm_deviation = max_norm_deviation.max((v.norm() - 1.0).abs());
    }
    Ok(LinkReport { k, samples, seed, max_residual, max_norm_deviation })
}

fn horner_pair(pair: &RudinShapiroPair, w: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::ZERO;
    let mut q = Complex64::ZERO;
    for (&cp, &cq) in pair.p().iter().rev().zip(pair.q().iter().rev()) {
        p = p * w + Complex64::new(cp as f64, 0.0);
        q = q * w + Complex64::new(cq as f64, 0.0);
    }
    (p, q)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eval_matches_direct_evaluation_at_small_sizes() {
        let pair = RudinShapiroPair::generate(1).unwrap();
        let grid = eval_at_roots(&pair, 2).unwrap();
        assert!((grid.values[0] - Complex64::new(2.0, 0.0)).norm() <= 1e-12); // P_1(1)
        assert!(grid.values[1].norm() <= 1e-12); // P_1(-1)
    }

    #[test]
    fn value_at_one_follows_the_recursion() {
        // P_k(1) = 2^(ceil(k/2)), from P(1), Q(1) alternating doubling
        for k in 1..=10u32 {
            let pair = RudinShapiroPair::generate(k).unwrap();
            let n = 1usize << k;
            let grid = eval_at_roots(&pair, n).unwrap();
            let expect = 2f64.powi(((k + 1) / 2) as i32);
            assert!(
                (grid.values[0].re - expect).abs() <= 1e-9 * expect,
                "k = {k}: {} vs {expect}",
                grid.values[0].re
            );
        }
    }

    #[test]
    fn value_at_minus_one_vanishes_for_odd_k() {
        for k in (1..=11u32).step_by(2) {
            let pair = RudinShapiroPair::generate(k).unwrap();
            let n = 1usize << (k + 1);
            let grid = eval_at_roots(&pair, n).unwrap();
            assert!(grid.values[n / 2].norm() <= 1e-8, "k = {k}");
        }
    }

    #[test]
    fn grid_parseval_and_pair_identity() {
        for k in [3u32, 6, 9] {
            let pair = RudinShapiroPair::generate(k).unwrap();
            let n = 1usize << (k + 1);
            let p = eval_at_roots(&pair, n).unwrap();
            let q_coeffs: Vec<f64> = pair.q().iter().map(|&c| c as f64).collect();
            let q = eval_real_coeffs_at_roots(&q_coeffs, n).unwrap();
            let mean_sq: f64 = p.values.iter().map(|v| v.norm_sqr()).sum::<f64>() / n as f64;
            assert!((mean_sq - 2f64.powi(k as i32)).abs() <= 1e-6 * mean_sq);
            let target = 2f64.powi(k as i32 + 1);
            for j in 0..n {
                let total = p.values[j].norm_sqr() + q[j].norm_sqr();
                assert!((total - target).abs() <= 1e-8 * target, "k = {k}, j = {j}");
            }
        }
    }

    #[test]
    fn grid_validation() {
        let pair = RudinShapiroPair::generate(4).unwrap();
        assert!(eval_at_roots(&pair, 24).is_err()); // not a power of two
        assert!(eval_at_roots(&pair, 8).is_err()); // under-resolved
        assert!(matches!(
            eval_at_roots(&pair, 1 << 23),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn saffari_at_k0_is_a_point_mass() {
        let report = saffari_report(0, 16, 4).unwrap();
        assert!((report.ks_statistic - 0.5).abs() <= 1e-12);
        assert!((report.min_modulus - std::f64::consts::FRAC_1_SQRT_2).abs() <= 1e-12);
        assert!((report.max_modulus - std::f64::consts::FRAC_1_SQRT_2).abs() <= 1e-12);
        let total: f64 = report.bins.iter().map(|b| b.mass).sum();
        assert!((total - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn saffari_converges_and_respects_conjugation_symmetry() {
        let coarse = saffari_report(8, 1 << 14, 16).unwrap();
        let fine = saffari_report(12, 1 << 14, 16).unwrap();
        assert!(fine.ks_statistic < coarse.ks_statistic);
        // |P(conj w)| = |P(w)|: the value multiset on the symmetric grid is
        // conjugation-invariant, so bin masses are reproducible across the
        // two half-circles
        let pair = RudinShapiroPair::generate(8).unwrap();
        let grid = eval_at_roots(&pair, 1 << 12).unwrap();
        for j in 1..(1 << 11) {
            let a = grid.values[j].norm();
            let b = grid.values[(1 << 12) - j].norm();
            assert!((a - b).abs() <= 1e-8);
        }
    }

    #[test]
    fn saffari_bin_masses_near_uniform_at_deep_recursion() {
        let report = saffari_report(16, 1 << 18, 16).unwrap();
        for bin in &report.bins {
            assert!(
                (bin.mass - 1.0 / 16.0).abs() <= 0.05,
                "bin [{}, {}) holds {}",
                bin.low,
                bin.high,
                bin.mass
            );
        }
    }

    #[test]
    fn disc_areas_tile_to_pi() {
        for g in [2usize, 5, 8, 13] {
            let mut total = 0.0;
            for iy in 0..g {
                for ix in 0..g {
                    let x0 = -1.0 + 2.0 * ix as f64 / g as f64;
                    let x1 = -1.0 + 2.0 * (ix + 1) as f64 / g as f64;
                    let y0 = -1.0 + 2.0 * iy as f64 / g as f64;
                    let y1 = -1.0 + 2.0 * (iy + 1) as f64 / g as f64;
                    total += disc_cell_area(x0, x1, y0, y1);
                }
            }
            assert!((total - std::f64::consts::PI).abs() <= 1e-12, "g = {g}");
        }
        // fully inside and fully outside cells
        assert!((disc_cell_area(-0.1, 0.1, -0.1, 0.1) - 0.04).abs() <= 1e-14);
        assert_eq!(disc_cell_area(0.9, 1.0, 0.9, 1.0), 0.0);
    }

    #[test]
    fn montgomery_reports_cover_the_disc() {
        let report = montgomery_report(10, 1 << 14, 8).unwrap();
        let grid = report.disc_grid.as_ref().unwrap();
        let total: f64 = grid.masses.iter().sum();
        assert!((total - 1.0).abs() <= 1e-12);
        assert!((grid.in_disc_mass - 1.0).abs() <= 1e-9);
        assert!(report.max_modulus <= 1.0 + 1e-9);
        // reflection symmetry (x, y) -> (x, -y) from real coefficients
        let g = grid.grid_size;
        for iy in 0..g {
            for ix in 0..g {
                let a = grid.masses[iy * g + ix];
                let b = grid.masses[(g - 1 - iy) * g + ix];
                assert!((a - b).abs() <= 2e-3, "cell ({ix},{iy})");
            }
        }
    }

    #[test]
    fn montgomery_at_k0_is_a_point_mass() {
        let report = montgomery_report(0, 16, 4).unwrap();
        let grid = report.disc_grid.unwrap();
        // P_0 = 1: the single normalized value 1/sqrt(2)
        let occupied: Vec<f64> = grid.masses.iter().copied().filter(|&m| m > 0.0).collect();
        assert_eq!(occupied, vec![1.0]);
    }

    #[test]
    fn min_modulus_facts() {
        let zero = min_modulus_report(0, 16).unwrap();
        assert!((zero.min_modulus - std::f64::consts::FRAC_1_SQRT_2).abs() <= 1e-12);
        for k in [5u32, 7, 9] {
            let report = min_modulus_report(k, 1 << (k + 1)).unwrap();
            assert!(report.min_modulus <= 1e-10, "odd k = {k}");
            assert_eq!(report.argmin_index, 1 << k); // omega = -1
        }
        for k in [8u32, 10, 12] {
            let report = min_modulus_report(k, 1 << 16).unwrap();
            assert!(report.min_modulus < 0.05, "even k = {k}: {}", report.min_modulus);
        }
    }

    #[test]
    fn link_identity_holds_numerically() {
        // analytic anchor at z = 1: both sides are (i/sqrt2)(1,1)
        let pair = RudinShapiroPair::generate(0).unwrap();
        let (p, q) = horner_pair(&pair, Complex64::ONE);
        assert_eq!((p, q), (Complex64::ONE, Complex64::ONE));
        let v = g_of(Complex64::ONE) * nalgebra::Vector2::new(Complex64::ONE, Complex64::ZERO);
        let expect = Complex64::new(0.0, std::f64::consts::FRAC_1_SQRT_2);
        assert!((v[0] - expect).norm() <= 1e-15);
        assert!((v[1] - expect).norm() <= 1e-15);

        for k in 0..=8u32 {
            let report = link_check(k, 200, 42).unwrap();
            assert!(report.max_residual <= 1e-10, "k = {k}: {}", report.max_residual);
            assert!(report.max_norm_deviation <= 1e-10);
        }
    }

    #[test]
    fn link_rejects_large_k() {
        assert!(link_check(13, 10, 1).is_err());
    }
}
