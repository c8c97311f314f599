//! Python bindings: the main types and operations of `rswalk-core` as a
//! `rswalk` extension module.

use num_bigint::BigInt;
use num_complex::Complex64;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyModule};
use pyo3::IntoPyObjectExt;

use rswalk_core::nalgebra::{DMatrix, Matrix2};
use rswalk_core::poly::{CxPoly, IntPoly, LaurentPoly as CorePoly, RatPoly};
use rswalk_core::rudin_shapiro::{self, format_rational};
use rswalk_core::{circle, halving, su2, walk};

fn err(e: rswalk_core::Error) -> PyErr {
    use rswalk_core::Error::*;
    match e {
        InvalidArgument(_) | VariantMismatch(_) => PyValueError::new_err(e.to_string()),
        ResourceLimit(_) | NumericalFailure(_) => PyRuntimeError::new_err(e.to_string()),
    }
}

fn matrix_to_lists(m: &DMatrix<Complex64>) -> Vec<Vec<Complex64>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect())
        .collect()
}

fn lists_to_matrix2(rows: Vec<Vec<Complex64>>) -> PyResult<Matrix2<Complex64>> {
    if rows.len() != 2 || rows.iter().any(|r| r.len() != 2) {
        return Err(PyValueError::new_err("expected a 2x2 matrix"));
    }
    Ok(Matrix2::new(rows[0][0], rows[0][1], rows[1][0], rows[1][1]))
}

/// Exact Laurent polynomial over one of three coefficient variants:
/// big integers, exact rationals, or complex doubles. Mixing variants in
/// an operation raises ValueError.
#[pyclass]
struct LaurentPoly {
    inner: PolyVariant,
}

#[derive(Clone)]
enum PolyVariant {
    Int(IntPoly),
    Rat(RatPoly),
    Cx(CxPoly),
}

impl PolyVariant {
    fn name(&self) -> &'static str {
        match self {
            PolyVariant::Int(_) => "integer",
            PolyVariant::Rat(_) => "rational",
            PolyVariant::Cx(_) => "complex",
        }
    }
}

fn parse_rational(s: &str) -> PyResult<num_rational::BigRational> {
    let parse_int = |t: &str| -> PyResult<BigInt> {
        t.trim()
            .parse::<BigInt>()
            .map_err(|_| PyValueError::new_err(format!("bad integer '{t}'")))
    };
    match s.split_once('/') {
        Some((num, den)) => {
            let den = parse_int(den)?;
            if den == BigInt::from(0) {
                return Err(PyValueError::new_err("zero denominator"));
            }
            Ok(num_rational::BigRational::new(parse_int(num)?, den))
        }
        None => Ok(num_rational::BigRational::from(parse_int(s)?)),
    }
}

macro_rules! same_variant {
    ($a:expr, $b:expr, $op:ident) => {
        match (&$a, &$b) {
            (PolyVariant::Int(x), PolyVariant::Int(y)) => Ok(PolyVariant::Int(x.$op(y))),
            (PolyVariant::Rat(x), PolyVariant::Rat(y)) => Ok(PolyVariant::Rat(x.$op(y))),
            (PolyVariant::Cx(x), PolyVariant::Cx(y)) => Ok(PolyVariant::Cx(x.$op(y))),
            (a, b) => Err(PyValueError::new_err(format!(
                "coefficient variant mismatch: {} vs {}",
                a.name(),
                b.name()
            ))),
        }
    };
}

macro_rules! map_variant {
    ($v:expr, $x:ident => $body:expr) => {
        match &$v {
            PolyVariant::Int($x) => PolyVariant::Int($body),
            PolyVariant::Rat($x) => PolyVariant::Rat($body),
            PolyVariant::Cx($x) => PolyVariant::Cx($body),
        }
    };
}

#[pymethods]
impl LaurentPoly {
    /// Big-integer coefficients starting at exponent `low`.
    #[staticmethod]
    fn integers(low: i64, coeffs: Vec<BigInt>) -> Self {
        LaurentPoly { inner: PolyVariant::Int(CorePoly::new(low, coeffs)) }
    }

    /// Exact rational coefficients, each given as "p/q" or "p".
    #[staticmethod]
    fn rationals(low: i64, coeffs: Vec<String>) -> PyResult<Self> {
        let parsed: PyResult<Vec<_>> = coeffs.iter().map(|s| parse_rational(s)).collect();
        Ok(LaurentPoly { inner: PolyVariant::Rat(CorePoly::new(low, parsed?)) })
    }

    /// Complex double-precision coefficients.
    #[staticmethod]
    fn complexes(low: i64, coeffs: Vec<Complex64>) -> Self {
        LaurentPoly { inner: PolyVariant::Cx(CorePoly::new(low, coeffs)) }
    }

    fn variant(&self) -> &'static str {
        self.inner.name()
    }

    fn low(&self) -> i64 {
        match &self.inner {
            PolyVariant::Int(p) => p.low(),
            PolyVariant::Rat(p) => p.low(),
            PolyVariant::Cx(p) => p.low(),
        }
    }

    fn __len__(&self) -> usize {
        match &self.inner {
            PolyVariant::Int(p) => p.len(),
            PolyVariant::Rat(p) => p.len(),
            PolyVariant::Cx(p) => p.len(),
        }
    }

    fn multiply(&self, other: &LaurentPoly) -> PyResult<LaurentPoly> {
        Ok(LaurentPoly { inner: same_variant!(self.inner, other.inner, multiply)? })
    }

    fn add(&self, other: &LaurentPoly) -> PyResult<LaurentPoly> {
        Ok(LaurentPoly { inner: same_variant!(self.inner, other.inner, add)? })
    }

    fn reverse(&self) -> LaurentPoly {
        LaurentPoly { inner: map_variant!(self.inner, p => p.reverse()) }
    }

    fn substitute_power(&self, s: u32) -> PyResult<LaurentPoly> {
        let inner = match &self.inner {
            PolyVariant::Int(p) => PolyVariant::Int(p.substitute_power(s).map_err(err)?),
            PolyVariant::Rat(p) => PolyVariant::Rat(p.substitute_power(s).map_err(err)?),
            PolyVariant::Cx(p) => PolyVariant::Cx(p.substitute_power(s).map_err(err)?),
        };
        Ok(LaurentPoly { inner })
    }

    fn halve(&self) -> LaurentPoly {
        LaurentPoly { inner: map_variant!(self.inner, p => p.halve()) }
    }

    fn power(&self, n: u64) -> LaurentPoly {
        LaurentPoly { inner: map_variant!(self.inner, p => p.power(n)) }
    }

    /// Coefficient at exponent `j`: int, "p/q" string, or complex,
    /// depending on the variant.
    fn coefficient(&self, py: Python<'_>, j: i64) -> PyResult<Py<PyAny>> {
        match &self.inner {
            PolyVariant::Int(p) => p.coefficient(j).into_py_any(py),
            PolyVariant::Rat(p) => format_rational(&p.coefficient(j)).into_py_any(py),
            PolyVariant::Cx(p) => p.coefficient(j).into_py_any(py),
        }
    }

    fn constant_term(&self, py: Python<'_>) -> PyResult<Py<PyAny>> {
        self.coefficient(py, 0)
    }

    fn __eq__(&self, other: &LaurentPoly) -> bool {
        match (&self.inner, &other.inner) {
            (PolyVariant::Int(a), PolyVariant::Int(b)) => a == b,
            (PolyVariant::Rat(a), PolyVariant::Rat(b)) => a == b,
            (PolyVariant::Cx(a), PolyVariant::Cx(b)) => a == b,
            _ => false,
        }
    }

    fn __repr__(&self) -> String {
        match &self.inner {
            PolyVariant::Int(p) => format!("LaurentPoly[{p}]"),
            PolyVariant::Rat(p) => format!("LaurentPoly[{p}]"),
            PolyVariant::Cx(p) => format!("LaurentPoly[{p}]"),
        }
    }
}

/// The coefficient pair (P_k, Q_k).
#[pyclass]
struct RudinShapiroPair {
    inner: rudin_shapiro::RudinShapiroPair,
}

#[pymethods]
impl RudinShapiroPair {
    #[staticmethod]
    fn generate(k: u32) -> PyResult<Self> {
        Ok(RudinShapiroPair { inner: rudin_shapiro::RudinShapiroPair::generate(k).map_err(err)? })
    }

    fn k(&self) -> u32 {
        self.inner.k()
    }

    fn p(&self) -> Vec<i8> {
        self.inner.p().to_vec()
    }

    fn q(&self) -> Vec<i8> {
        self.inner.q().to_vec()
    }

    /// P_k as an integer-variant LaurentPoly.
    fn p_poly(&self) -> LaurentPoly {
        LaurentPoly { inner: PolyVariant::Int(self.inner.p_poly()) }
    }

    fn q_poly(&self) -> LaurentPoly {
        LaurentPoly { inner: PolyVariant::Int(self.inner.q_poly()) }
    }
}

#[pyfunction]
fn parseval_check(k: u32) -> PyResult<bool> {
    Ok(rudin_shapiro::parseval_identity_check(k).map_err(err)?.holds)
}

#[pyfunction]
fn alt_recursion_check(k: u32) -> PyResult<bool> {
    rudin_shapiro::alt_recursion_check(k).map_err(err)
}

/// Exact value of E |P_k/sqrt(2^(k+1))|^(2n) as a reduced fraction string.
#[pyfunction]
fn exact_even_moment(k: u32, n: u32) -> PyResult<String> {
    Ok(rudin_shapiro::exact_even_moment(k, n).map_err(err)?.value_string())
}

#[pyfunction]
fn exact_mixed_moment(k: u32, n: u32, m: u32) -> PyResult<String> {
    Ok(rudin_shapiro::exact_mixed_moment(k, n, m).map_err(err)?.value_string())
}

#[pyfunction]
fn eval_at_roots(k: u32, n_points: usize) -> PyResult<Vec<Complex64>> {
    let pair = rudin_shapiro::RudinShapiroPair::generate(k).map_err(err)?;
    Ok(circle::eval_at_roots(&pair, n_points).map_err(err)?.values)
}

#[pyfunction]
#[pyo3(signature = (k, n_points, bins=16))]
fn saffari_report(py: Python<'_>, k: u32, n_points: usize, bins: usize) -> PyResult<Py<PyAny>> {
    let r = circle::saffari_report(k, n_points, bins).map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("k", r.k)?;
    d.set_item("n_points", r.n_points)?;
    d.set_item("ks_statistic", r.ks_statistic)?;
    d.set_item(
        "bins",
        r.bins.iter().map(|b| (b.low, b.high, b.mass)).collect::<Vec<_>>(),
    )?;
    d.set_item("min_modulus", r.min_modulus)?;
    d.set_item("max_modulus", r.max_modulus)?;
    d.into_py_any(py)
}

#[pyfunction]
#[pyo3(signature = (k, n_points, grid_size=8))]
fn montgomery_report(py: Python<'_>, k: u32, n_points: usize, grid_size: usize) -> PyResult<Py<PyAny>> {
    let r = circle::montgomery_report(k, n_points, grid_size).map_err(err)?;
    let grid = r.disc_grid.expect("disc grid present");
    let d = PyDict::new(py);
    d.set_item("k", r.k)?;
    d.set_item("n_points", r.n_points)?;
    d.set_item("ks_statistic", r.ks_statistic)?;
    d.set_item("grid_size", grid.grid_size)?;
    d.set_item("masses", grid.masses)?;
    d.set_item("max_deviation", grid.max_deviation)?;
    d.set_item("in_disc_mass", grid.in_disc_mass)?;
    d.set_item("min_modulus", r.min_modulus)?;
    d.set_item("max_modulus", r.max_modulus)?;
    d.into_py_any(py)
}

#[pyfunction]
fn min_modulus(k: u32, n_points: usize) -> PyResult<(f64, usize)> {
    let r = circle::min_modulus_report(k, n_points).map_err(err)?;
    Ok((r.min_modulus, r.argmin_index))
}

/// Max residual of the matrix-product factorization over random circle
/// points, plus the worst column-norm deviation.
#[pyfunction]
#[pyo3(signature = (k, samples=1000, seed=0))]
fn link_check(k: u32, samples: u64, seed: u64) -> PyResult<(f64, f64)> {
    let r = circle::link_check(k, samples, seed).map_err(err)?;
    Ok((r.max_residual, r.max_norm_deviation))
}

#[pyfunction]
fn tau_matrix(two_ell: i64) -> PyResult<Vec<Vec<Complex64>>> {
    Ok(matrix_to_lists(su2::tau_matrix(two_ell).map_err(err)?.matrix()))
}

#[pyfunction]
fn rep_matrix(two_ell: i64, g: Vec<Vec<Complex64>>) -> PyResult<Vec<Vec<Complex64>>> {
    let g = lists_to_matrix2(g)?;
    Ok(matrix_to_lists(su2::rep_matrix(two_ell, &g).map_err(err)?.matrix()))
}

#[pyfunction]
fn rep_of_g_omega(two_ell: i64, omega: Complex64) -> PyResult<Vec<Vec<Complex64>>> {
    Ok(matrix_to_lists(su2::rep_of_g_omega(two_ell, omega).map_err(err)?.matrix()))
}

/// `g(z)` itself, for driving rep_matrix from Python.
#[pyfunction]
fn g_of(z: Complex64) -> Vec<Vec<Complex64>> {
    let g = su2::g_of(z);
    vec![vec![g[(0, 0)], g[(0, 1)]], vec![g[(1, 0)], g[(1, 1)]]]
}

#[pyfunction]
fn verify_propositions(py: Python<'_>, two_ell: i64) -> PyResult<Py<PyAny>> {
    let r = su2::verify_propositions(two_ell).map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("two_ell", r.two_ell)?;
    d.set_item("dim", r.dim)?;
    d.set_item("unitarity_residual", r.unitarity_residual)?;
    d.set_item("sigma_min", r.sigma_min)?;
    d.set_item("corner_low_abs", r.corner_low_abs)?;
    d.set_item("corner_high_abs", r.corner_high_abs)?;
    d.set_item("center_abs", r.center_abs)?;
    d.set_item("pattern_sigma_min", r.pattern_sigma_min.to_vec())?;
    d.set_item("contractions_ok", r.contractions_ok)?;
    d.set_item("patterns_full_rank", r.patterns_full_rank)?;
    d.into_py_any(py)
}

/// Spectrum of S_l (lambda omitted) or S_{l,lambda}.
#[pyfunction]
#[pyo3(signature = (two_ell, lambda=None))]
fn spectral_radius(py: Python<'_>, two_ell: i64, lambda: Option<i64>) -> PyResult<Py<PyAny>> {
    let op = match lambda {
        None => halving::build_s(two_ell),
        Some(l) => halving::build_s_lambda(two_ell, l),
    }
    .map_err(err)?;
    let r = halving::spectral_radius(&op).map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("two_ell", r.two_ell)?;
    d.set_item("lambda", r.lambda)?;
    d.set_item("dim", r.dim)?;
    d.set_item("spectral_radius", r.spectral_radius)?;
    d.set_item("margin", r.margin)?;
    d.set_item("eigenvalues", r.eigenvalues)?;
    d.into_py_any(py)
}

#[pyfunction]
fn expected_rep(two_ell: i64, k: u32) -> PyResult<Vec<Vec<Complex64>>> {
    Ok(matrix_to_lists(&halving::expected_rep(two_ell, k).map_err(err)?))
}

#[pyfunction]
fn independence_moment(two_ell: i64, lambda: i64, k: u32) -> PyResult<Vec<Vec<Complex64>>> {
    Ok(matrix_to_lists(&halving::independence_moment(two_ell, lambda, k).map_err(err)?))
}

/// Brute-force symbolic validation: (max_residual, support_ok).
#[pyfunction]
fn cross_check_symbolic(two_ell: i64, lambda: i64, k: u32) -> PyResult<(f64, bool)> {
    let r = halving::cross_check_symbolic(two_ell, lambda, k).map_err(err)?;
    Ok((r.max_residual, r.support_ok))
}

/// A finite group given by its Cayley table.
#[pyclass]
struct FiniteGroup {
    inner: walk::FiniteGroup,
}

#[pymethods]
impl FiniteGroup {
    #[staticmethod]
    fn cyclic(n: usize) -> Self {
        FiniteGroup { inner: walk::FiniteGroup::cyclic(n) }
    }

    #[new]
    fn new(cayley: Vec<Vec<usize>>, identity: usize, labels: Vec<String>) -> PyResult<Self> {
        Ok(FiniteGroup { inner: walk::FiniteGroup::new(cayley, identity, labels).map_err(err)? })
    }

    fn order(&self) -> usize {
        self.inner.order()
    }

    fn labels(&self) -> Vec<String> {
        self.inner.labels().to_vec()
    }

    fn mul(&self, a: usize, b: usize) -> usize {
        self.inner.mul(a, b)
    }
}

/// A dyadic step function into a finite group.
#[pyclass]
struct StepFunction {
    inner: walk::DyadicStepFunction,
}

#[pymethods]
impl StepFunction {
    #[new]
    fn new(resolution: u32, table: Vec<usize>) -> PyResult<Self> {
        Ok(StepFunction { inner: walk::DyadicStepFunction::new(resolution, table).map_err(err)? })
    }

    /// The Z/2 instance whose products stabilize at P(0) = 5/8, with its
    /// group.
    #[staticmethod]
    fn five_eighths() -> (FiniteGroup, StepFunction) {
        let (group, f) = walk::DyadicStepFunction::five_eighths();
        (FiniteGroup { inner: group }, StepFunction { inner: f })
    }

    fn resolution(&self) -> u32 {
        self.inner.resolution()
    }

    fn table(&self) -> Vec<usize> {
        self.inner.table().to_vec()
    }
}

fn dist_to_dict(
    py: Python<'_>,
    group: &walk::FiniteGroup,
    dist: &walk::ExactDistribution,
) -> PyResult<Py<PyAny>> {
    let d = PyDict::new(py);
    for (label, mass) in dist.to_string_map(group.labels()) {
        d.set_item(label, mass)?;
    }
    d.into_py_any(py)
}

/// Exact distribution of f(2^k t) ... f(t) as {label: "num/den"}.
#[pyfunction]
fn exact_distribution(
    py: Python<'_>,
    group: &FiniteGroup,
    f: &StepFunction,
    k: u32,
) -> PyResult<Py<PyAny>> {
    let dist = walk::exact_product_distribution(&group.inner, &f.inner, k).map_err(err)?;
    dist_to_dict(py, &group.inner, &dist)
}

#[pyfunction]
fn brute_force_distribution(
    py: Python<'_>,
    group: &FiniteGroup,
    f: &StepFunction,
    k: u32,
) -> PyResult<Py<PyAny>> {
    let dist = walk::brute_force_distribution(&group.inner, &f.inner, k).map_err(err)?;
    dist_to_dict(py, &group.inner, &dist)
}

#[pyfunction]
fn tv_distance_to_uniform(group: &FiniteGroup, f: &StepFunction, k: u32) -> PyResult<String> {
    let dist = walk::exact_product_distribution(&group.inner, &f.inner, k).map_err(err)?;
    Ok(format_rational(&dist.tv_distance_to_uniform()))
}

/// Monte Carlo statistics of the su2-g or u2-g matrix walk.
#[pyfunction]
#[pyo3(signature = (kind, k, samples=100_000, seed=0))]
fn monte_carlo_walk(
    py: Python<'_>,
    kind: &str,
    k: u32,
    samples: u64,
    seed: u64,
) -> PyResult<Py<PyAny>> {
    let kind: walk::WalkKind = kind.parse().map_err(err)?;
    let stats = walk::monte_carlo_matrix_walk(kind, k, samples, seed).map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("k", stats.k)?;
    d.set_item("samples", stats.samples)?;
    d.set_item("seed", stats.seed)?;
    d.set_item("max_unitarity_residual", stats.max_unitarity_residual)?;
    d.set_item("overlap_ks", stats.overlap_ks)?;
    d.set_item("overlap_hist", stats.overlap_hist)?;
    d.set_item("rep_mean_max_abs", stats.rep_mean_max_abs)?;
    d.set_item("phase_correlation_max", stats.phase_correlation_max)?;
    d.set_item("det_phase_ks", stats.det_phase_ks)?;
    d.into_py_any(py)
}

/// Run one acceptance criterion; returns (passed, summary_line).
#[pyfunction]
#[pyo3(signature = (id, level="fast"))]
fn run_acceptance_criterion(id: u32, level: &str) -> PyResult<(bool, String)> {
    let level: rswalk_core::acceptance::Level = level.parse().map_err(err)?;
    let result = rswalk_core::acceptance::run_criterion(id, level);
    Ok((result.passed, result.summary_line()))
}

#[pymodule]
fn rswalk(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<LaurentPoly>()?;
    m.add_class::<RudinShapiroPair>()?;
    m.add_class::<FiniteGroup>()?;
    m.add_class::<StepFunction>()?;
    m.add_function(wrap_pyfunction!(parseval_check, m)?)?;
    m.add_function(wrap_pyfunction!(alt_recursion_check, m)?)?;
    m.add_function(wrap_pyfunction!(exact_even_moment, m)?)?;
    m.add_function(wrap_pyfunction!(exact_mixed_moment, m)?)?;
    m.add_function(wrap_pyfunction!(eval_at_roots, m)?)?;
    m.add_function(wrap_pyfunction!(saffari_report, m)?)?;
    m.add_function(wrap_pyfunction!(montgomery_report, m)?)?;
    m.add_function(wrap_pyfunction!(min_modulus, m)?)?;
    m.add_function(wrap_pyfunction!(link_check, m)?)?;
    m.add_function(wrap_pyfunction!(tau_matrix, m)?)?;
    m.add_function(wrap_pyfunction!(rep_matrix, m)?)?;
    m.add_function(wrap_pyfunction!(rep_of_g_omega, m)?)?;
    m.add_function(wrap_pyfunction!(g_of, m)?)?;
    m.add_function(wrap_pyfunction!(verify_propositions, m)?)?;
    m.add_function(wrap_pyfunction!(spectral_radius, m)?)?;
    m.add_function(wrap_pyfunction!(expected_rep, m)?)?;
    m.add_function(wrap_pyfunction!(independence_moment, m)?)?;
    m.add_function(wrap_pyfunction!(cross_check_symbolic, m)?)?;
    m.add_function(wrap_pyfunction!(exact_distribution, m)?)?;
    m.add_function(wrap_pyfunction!(brute_force_distribution, m)?)?;
    m.add_function(wrap_pyfunction!(tv_distance_to_uniform, m)?)?;
    m.add_function(wrap_pyfunction!(monte_carlo_walk, m)?)?;
    m.add_function(wrap_pyfunction!(run_acceptance_criterion, m)?)?;
    Ok(())
}
