//! Python bindings for the choikit toolkit.
//!
//! Exposes the Hermitian map type with its Choi-matrix analysis (CP distance,
//! minimal lift, diamond bound, decompositions), density states, witness
//! reports, and the randomized property checkers. Matrices cross the boundary
//! as nested lists of Python complex numbers.

use num_complex::Complex64;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use choikit::decompose as core_decompose;
use choikit::distance as core_distance;
use choikit::distance::MapProperty;
use choikit::linalg::{ComplexMatrix, HermitianMatrix};
use choikit::map::{HermitianMap as CoreMap, OrderInvariant};
use choikit::witness as core_witness;
use choikit::witness::DensityState as CoreState;

fn pyerr(err: choikit::Error) -> PyErr {
    PyValueError::new_err(err.to_string())
}

fn matrix_to_rows(mat: &ComplexMatrix) -> Vec<Vec<Complex64>> {
    (0..mat.rows())
        .map(|r| (0..mat.cols()).map(|c| mat.entry(r, c)).collect())
        .collect()
}

fn rows_to_matrix(rows: &[Vec<Complex64>]) -> PyResult<ComplexMatrix> {
    ComplexMatrix::from_rows(rows).map_err(pyerr)
}

fn rows_to_hermitian(rows: &[Vec<Complex64>]) -> PyResult<HermitianMatrix> {
    HermitianMatrix::new(rows_to_matrix(rows)?).map_err(pyerr)
}

/// Hermitian linear map between matrix algebras, stored by its Choi matrix.
#[pyclass(skip_from_py_object)]
#[derive(Clone)]
struct HermitianMap {
    inner: CoreMap,
}

impl HermitianMap {
    fn wrap(inner: CoreMap) -> Self {
        Self { inner }
    }
}

#[pymethods]
impl HermitianMap {
    #[staticmethod]
    fn transpose(dim: usize) -> PyResult<Self> {
        CoreMap::transpose(dim).map(Self::wrap).map_err(pyerr)
    }

    #[staticmethod]
    fn identity(dim: usize) -> PyResult<Self> {
        CoreMap::identity(dim).map(Self::wrap).map_err(pyerr)
    }

    #[staticmethod]
    fn trace(input_dim: usize, output_dim: usize) -> PyResult<Self> {
        CoreMap::trace_map(input_dim, output_dim)
            .map(Self::wrap)
            .map_err(pyerr)
    }

    #[staticmethod]
    fn depolarizing(dim: usize, p: f64) -> PyResult<Self> {
        CoreMap::depolarizing(dim, p).map(Self::wrap).map_err(pyerr)
    }

    #[staticmethod]
    #[pyo3(signature = (input_dim, output_dim, seed=0))]
    fn random_hermitian(input_dim: usize, output_dim: usize, seed: u64) -> PyResult<Self> {
        CoreMap::random_hermitian(input_dim, output_dim, seed)
            .map(Self::wrap)
            .map_err(pyerr)
    }

    #[staticmethod]
    #[pyo3(signature = (input_dim, output_dim, seed=0))]
    fn random_cp(input_dim: usize, output_dim: usize, seed: u64) -> PyResult<Self> {
        CoreMap::random_cp(input_dim, output_dim, seed)
            .map(Self::wrap)
            .map_err(pyerr)
    }

    #[staticmethod]
    #[pyo3(signature = (input_dim, output_dim, seed=0))]
    fn random_positive_noncp(input_dim: usize, output_dim: usize, seed: u64) -> PyResult<Self> {
        CoreMap::random_positive_noncp(input_dim, output_dim, seed)
            .map(Self::wrap)
            .map_err(pyerr)
    }

    /// Builds a map from its Choi matrix, given as nested complex lists.
    #[staticmethod]
    fn from_choi(input_dim: usize, output_dim: usize, choi: Vec<Vec<Complex64>>) -> PyResult<Self> {
        CoreMap::from_choi(input_dim, output_dim, rows_to_hermitian(&choi)?)
            .map(Self::wrap)
            .map_err(pyerr)
    }

    #[getter]
    fn input_dim(&self) -> usize {
        self.inner.input_dim()
    }

    #[getter]
    fn output_dim(&self) -> usize {
        self.inner.output_dim()
    }

    fn choi(&self) -> Vec<Vec<Complex64>> {
        matrix_to_rows(self.inner.choi().matrix())
    }

    fn apply(&self, x: Vec<Vec<Complex64>>) -> PyResult<Vec<Vec<Complex64>>> {
        let image = self.inner.apply(&rows_to_matrix(&x)?).map_err(pyerr)?;
        Ok(matrix_to_rows(&image))
    }

    fn conjugate(&self) -> Self {
        Self::wrap(self.inner.conjugate())
    }

    fn add(&self, other: &Self) -> PyResult<Self> {
        self.inner.add(&other.inner).map(Self::wrap).map_err(pyerr)
    }

    fn scale(&self, factor: f64) -> Self {
        Self::wrap(self.inner.scale(factor))
    }

    fn is_cp(&self) -> PyResult<bool> {
        self.inner.is_cp().map_err(pyerr)
    }

    fn cp_distance(&self) -> PyResult<f64> {
        core_distance::cp_distance(&self.inner).map_err(pyerr)
    }

    /// Minimal CP lift; returns `(shift, lifted_map)`.
    fn cp_lift(&self) -> PyResult<(f64, Self)> {
        let lift = core_distance::cp_lift(&self.inner).map_err(pyerr)?;
        Ok((lift.shift, Self::wrap(lift.lifted)))
    }

    fn lift_minimality_witness(&self, epsilon: f64) -> PyResult<f64> {
        core_distance::lift_minimality_witness(&self.inner, epsilon).map_err(pyerr)
    }

    fn diamond_bound(&self) -> PyResult<f64> {
        Ok(core_distance::diamond_bound(&self.inner).map_err(pyerr)?.bound)
    }

    #[pyo3(signature = (trials=20, seed=0))]
    fn sampled_diamond_lower(&self, trials: usize, seed: u64) -> PyResult<f64> {
        core_distance::sampled_diamond_lower(&self.inner, trials, seed).map_err(pyerr)
    }

    /// Samples rank-one inputs; returns one of `CP_CERTIFIED`,
    /// `POSITIVE_SAMPLED`, or `NOT_POSITIVE`.
    #[pyo3(signature = (trials=200, seed=0))]
    fn sample_positivity(&self, trials: usize, seed: u64) -> PyResult<&'static str> {
        Ok(self.inner.sample_positivity(trials, seed).map_err(pyerr)?.label())
    }

    /// Splits by eigenvalue sign; returns `(plus, minus, residual)`.
    fn jordan_decompose(&self) -> PyResult<(Self, Self, f64)> {
        let pair = core_decompose::jordan_decompose(&self.inner).map_err(pyerr)?;
        Ok((Self::wrap(pair.plus), Self::wrap(pair.minus), pair.residual))
    }

    /// Splits with block-diagonal sum; returns `(plus, minus, residual)`.
    fn block_diagonal_decompose(&self) -> PyResult<(Self, Self, f64)> {
        let pair = core_decompose::block_diagonal_decompose(&self.inner).map_err(pyerr)?;
        Ok((Self::wrap(pair.plus), Self::wrap(pair.minus), pair.residual))
    }

    fn __repr__(&self) -> String {
        format!(
            "HermitianMap(input_dim={}, output_dim={})",
            self.inner.input_dim(),
            self.inner.output_dim()
        )
    }
}

/// Density matrix: positive semidefinite with unit trace.
#[pyclass(skip_from_py_object)]
#[derive(Clone)]
struct DensityState {
    inner: CoreState,
}

#[pymethods]
impl DensityState {
    #[staticmethod]
    fn singlet() -> Self {
        Self { inner: CoreState::singlet() }
    }

    /// Equal mixture of |00><00| and |11><11| on C^2 x C^2.
    #[staticmethod]
    fn classically_correlated() -> PyResult<Self> {
        let ensemble = core_witness::SeparableEnsemble::classically_correlated_pair();
        Ok(Self { inner: ensemble.assemble().map_err(pyerr)? })
    }

    #[staticmethod]
    #[pyo3(signature = (dim, rank, seed=0))]
    fn random(dim: usize, rank: usize, seed: u64) -> PyResult<Self> {
        CoreState::random_density(dim, rank, seed)
            .map(|inner| Self { inner })
            .map_err(pyerr)
    }

    #[staticmethod]
    fn from_matrix(rows: Vec<Vec<Complex64>>) -> PyResult<Self> {
        CoreState::new(rows_to_hermitian(&rows)?)
            .map(|inner| Self { inner })
            .map_err(pyerr)
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn matrix(&self) -> Vec<Vec<Complex64>> {
        matrix_to_rows(self.inner.matrix().matrix())
    }

    fn __repr__(&self) -> String {
        format!("DensityState(dim={})", self.inner.dim())
    }
}

/// Tests a state against the Choi witness of `map`; returns
/// `(value, bound, detected, saturated)`.
#[pyfunction]
#[pyo3(signature = (map, state, trials=200, seed=0))]
fn witness_report(
    map: &HermitianMap,
    state: &DensityState,
    trials: usize,
    seed: u64,
) -> PyResult<(f64, f64, bool, bool)> {
    let evidence = map.inner.sample_positivity(trials, seed).map_err(pyerr)?;
    let report =
        core_witness::detection_bound_check(&map.inner, &evidence, &state.inner).map_err(pyerr)?;
    Ok((report.value, report.bound, report.detected, report.saturated))
}

/// State saturating the detection bound of a non-CP map.
#[pyfunction]
fn extremal_detection_state(map: &HermitianMap) -> PyResult<DensityState> {
    core_witness::extremal_detection_state(&map.inner)
        .map(|inner| DensityState { inner })
        .map_err(pyerr)
}

/// Runs a randomized checker; returns `(max_violation, pass)`. Names:
/// subadditivity, homogeneity, convexity, unitary-invariance,
/// conjugate-order, restriction-monotonicity, norm-monotonicity.
#[pyfunction]
#[pyo3(signature = (name, input_dim, output_dim, trials=500, seed=0))]
fn check_property(
    name: &str,
    input_dim: usize,
    output_dim: usize,
    trials: usize,
    seed: u64,
) -> PyResult<(f64, bool)> {
    let property = match name {
        "subadditivity" => Some(MapProperty::Subadditivity),
        "homogeneity" => Some(MapProperty::Homogeneity),
        "convexity" => Some(MapProperty::Convexity),
        "unitary-invariance" => Some(MapProperty::UnitaryInvariance),
        _ => None,
    };
    if let Some(property) = property {
        let report = core_distance::verify_property(property, input_dim, output_dim, trials, seed)
            .map_err(pyerr)?;
        return Ok((report.max_violation, report.pass));
    }
    let invariant = match name {
        "conjugate-order" => OrderInvariant::ConjugateOrder,
        "restriction-monotonicity" => OrderInvariant::RestrictionMonotonicity,
        "norm-monotonicity" => OrderInvariant::NormMonotonicity,
        other => return Err(PyValueError::new_err(format!("unknown property '{other}'"))),
    };
    let report =
        choikit::map::verify_order_invariant(invariant, input_dim, output_dim, trials, seed)
            .map_err(pyerr)?;
    Ok((report.max_violation, report.pass))
}

#[pymodule]
fn pychoi(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<HermitianMap>()?;
    m.add_class::<DensityState>()?;
    m.add_function(wrap_pyfunction!(witness_report, m)?)?;
    m.add_function(wrap_pyfunction!(extremal_detection_state, m)?)?;
    m.add_function(wrap_pyfunction!(check_property, m)?)?;
    Ok(())
}
