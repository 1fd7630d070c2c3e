//! Entanglement witnesses carved from Choi matrices of positive non-CP maps.
//!
//! When `Φ` is positive but not completely positive, its Choi matrix `W = C_Φ`
//! has nonnegative expectation on every separable state yet a negative
//! expectation on some entangled state, and the detectable violation is bounded
//! by the distance from complete positivity: `-tr(W rho) <= d(Φ) ||rho||_1`.
//! The bound is saturated by the projector onto a lowest Choi eigenvector.

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;

use crate::distance::cp_distance;
use crate::linalg::{
    matrix_unit, outer_product, random_gaussian_matrix, tensor_product, ComplexMatrix,
    HermitianMatrix,
};
use crate::map::{HermitianMap, PositivityStatus};
use crate::{tol, Error, Result};

/// Density matrix: Hermitian, positive semidefinite within slack, unit trace.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityState {
    matrix: HermitianMatrix,
}

impl DensityState {
    /// Validates positive semidefiniteness (scale-aware slack) and unit trace.
    pub fn new(matrix: HermitianMatrix) -> Result<Self> {
        let spec = matrix.eig()?;
        let slack = tol::psd_tol(spec.spectral_radius());
        if spec.lambda_min() < -slack {
            return Err(Error::NotDensity(format!(
                "smallest eigenvalue {:.3e} below -{slack:.3e}",
                spec.lambda_min()
            )));
        }
        let trace = matrix.trace_real();
        if (trace - 1.0).abs() > tol::TRACE_ONE_TOL {
            return Err(Error::NotDensity(format!("trace {trace} is not 1")));
        }
        Ok(Self { matrix })
    }

    /// Rank-one state `vv*` from a nonzero vector, normalized internally.
    pub fn from_pure(v: &[Complex64]) -> Result<Self> {
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::NotDensity("pure state vector must be nonzero and finite".into()));
        }
        let unit: Vec<Complex64> = v.iter().map(|z| z / norm).collect();
        Self::new(HermitianMatrix::new(outer_product(&unit, &unit))?)
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn matrix(&self) -> &HermitianMatrix {
        &self.matrix
    }

    /// Projector onto the antisymmetric unit vector `(e1 ⊗ e2 - e2 ⊗ e1)/sqrt(2)`;
    /// the canonical maximally entangled two-qubit state.
    pub fn singlet() -> Self {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let psi = [
            Complex64::new(0.0, 0.0),
            Complex64::new(s, 0.0),
            Complex64::new(-s, 0.0),
            Complex64::new(0.0, 0.0),
        ];
        Self::from_pure(&psi).expect("singlet projector is a valid state")
    }

    /// Haar-random pure state.
    pub fn random_pure(dim: usize, seed: u64) -> Result<Self> {
        Self::random_pure_with(dim, &mut ChaCha8Rng::seed_from_u64(seed))
    }

    pub fn random_pure_with(dim: usize, rng: &mut impl Rng) -> Result<Self> {
        Self::from_pure(&crate::linalg::random_unit_vector(dim, rng))
    }

    /// Random mixed state `GG*/tr(GG*)` with `G` of shape `dim x rank`;
    /// almost surely of the requested rank.
    pub fn random_density(dim: usize, rank: usize, seed: u64) -> Result<Self> {
        Self::random_density_with(dim, rank, &mut ChaCha8Rng::seed_from_u64(seed))
    }

    pub fn random_density_with(dim: usize, rank: usize, rng: &mut impl Rng) -> Result<Self> {
        if dim == 0 || rank == 0 {
            return Err(Error::InvalidArgument(
                "state dimension and rank must be positive".into(),
            ));
        }
        let g = random_gaussian_matrix(dim, rank, rng);
        let gram = ComplexMatrix::from_dmatrix(g.as_dmatrix() * g.as_dmatrix().adjoint())?;
        let trace = gram.trace().re;
        Self::new(HermitianMatrix::new(gram.scale(1.0 / trace))?)
    }
}

/// Convex mixture of product states `sum_k p_k sigma_k ⊗ tau_k`; separable by
/// construction, with strictly positive weights summing to one.
#[derive(Clone, Debug)]
pub struct SeparableEnsemble {
    weights: Vec<f64>,
    factors: Vec<(DensityState, DensityState)>,
}

impl SeparableEnsemble {
    pub fn new(weights: Vec<f64>, factors: Vec<(DensityState, DensityState)>) -> Result<Self> {
        if weights.is_empty() || weights.len() != factors.len() {
            return Err(Error::InvalidArgument(
                "ensemble needs matching, nonempty weights and factors".into(),
            ));
        }
        if weights.iter().any(|p| !(*p > 0.0) || !p.is_finite()) {
            return Err(Error::InvalidArgument(
                "ensemble weights must be strictly positive".into(),
            ));
        }
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() > tol::TRACE_ONE_TOL {
            return Err(Error::InvalidArgument(format!(
                "ensemble weights sum to {sum}, not 1"
            )));
        }
        let (m, n) = (factors[0].0.dim(), factors[0].1.dim());
        if factors.iter().any(|(a, b)| a.dim() != m || b.dim() != n) {
            return Err(Error::DimensionMismatch {
                context: "ensemble factors",
                expected: m * n,
                got: 0,
            });
        }
        Ok(Self { weights, factors })
    }

    pub fn first_dim(&self) -> usize {
        self.factors[0].0.dim()
    }

    pub fn second_dim(&self) -> usize {
        self.factors[0].1.dim()
    }

    pub fn terms(&self) -> impl Iterator<Item = (f64, &DensityState, &DensityState)> {
        self.weights
            .iter()
            .zip(&self.factors)
            .map(|(p, (a, b))| (*p, a, b))
    }

    /// The mixture as a single density matrix on the tensor product space.
    pub fn assemble(&self) -> Result<DensityState> {
        let dim = self.first_dim() * self.second_dim();
        let mut acc = ComplexMatrix::zeros(dim, dim);
        for (p, a, b) in self.terms() {
            acc = &acc + &tensor_product(a.matrix().matrix(), b.matrix().matrix()).scale(p);
        }
        DensityState::new(HermitianMatrix::new(acc)?)
    }

    /// Equal mixture of the aligned product basis states
    /// `(E_11 ⊗ E_11 + E_22 ⊗ E_22)/2`: classically correlated, separable.
    pub fn classically_correlated_pair() -> Self {
        let e0 = DensityState::new(
            HermitianMatrix::new(matrix_unit(2, 0, 0)).expect("projector"),
        )
        .expect("valid state");
        let e1 = DensityState::new(
            HermitianMatrix::new(matrix_unit(2, 1, 1)).expect("projector"),
        )
        .expect("valid state");
        Self::new(
            vec![0.5, 0.5],
            vec![(e0.clone(), e0), (e1.clone(), e1)],
        )
        .expect("valid ensemble")
    }

    /// Random ensemble with Dirichlet(1,..,1) weights (normalized exponentials)
    /// and independent random factor states of random rank.
    pub fn random(m: usize, n: usize, terms: usize, seed: u64) -> Result<Self> {
        Self::random_with(m, n, terms, &mut ChaCha8Rng::seed_from_u64(seed))
    }

    pub fn random_with(m: usize, n: usize, terms: usize, rng: &mut impl Rng) -> Result<Self> {
        if terms == 0 {
            return Err(Error::InvalidArgument("ensemble needs at least one term".into()));
        }
        let mut weights: Vec<f64> = (0..terms)
            .map(|_| {
                let u: f64 = rng.random_range(f64::MIN_POSITIVE..1.0);
                -u.ln()
            })
            .collect();
        let total: f64 = weights.iter().sum();
        for w in &mut weights {
            *w /= total;
        }
        let factors = (0..terms)
            .map(|_| {
                let ra = rng.random_range(1..=m);
                let rb = rng.random_range(1..=n);
                Ok((
                    DensityState::random_density_with(m, ra, rng)?,
                    DensityState::random_density_with(n, rb, rng)?,
                ))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(weights, factors)
    }
}

/// Entanglement witness associated with a positive, non-CP map: its Choi matrix.
///
/// Requires evidence that does not refute positivity of the map (a refuted map
/// yields no witness) and rejects completely positive maps, whose Choi matrix
/// is PSD and therefore detects nothing.
pub fn witness_from_map(
    phi: &HermitianMap,
    evidence: &PositivityStatus,
) -> Result<HermitianMatrix> {
    if evidence.is_not_positive() {
        return Err(Error::NotPositiveEvidence);
    }
    if phi.is_cp()? {
        return Err(Error::CompletelyPositive(
            "the Choi matrix of a completely positive map is PSD and detects no state".into(),
        ));
    }
    Ok(phi.choi().clone())
}

/// Expectation `tr(W rho)`; real because both operators are Hermitian.
pub fn witness_value(witness: &HermitianMatrix, rho: &DensityState) -> Result<f64> {
    if witness.dim() != rho.dim() {
        return Err(Error::DimensionMismatch {
            context: "witness expectation",
            expected: witness.dim(),
            got: rho.dim(),
        });
    }
    let dim = witness.dim();
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..dim {
        for j in 0..dim {
            acc += witness.entry(i, j) * rho.matrix().entry(j, i);
        }
    }
    Ok(acc.re)
}

/// Witness expectation of a separable mixture, computed along two routes.
#[derive(Clone, Copy, Debug)]
pub struct SeparableExpectation {
    /// `tr(C_Φ sigma)` on the assembled mixture.
    pub via_witness: f64,
    /// `sum_k p_k tr(Φ(sigma_k^T) tau_k)`, using only the map action.
    pub via_action: f64,
}

/// Evaluates `tr(C_Φ sigma)` for separable `sigma` both directly and through
/// the factor identity `tr(C_Φ (a ⊗ b)) = tr(Φ(a^T) b)`; for positive maps both
/// are nonnegative, and they agree up to arithmetic rounding always.
pub fn separable_expectation(
    phi: &HermitianMap,
    ensemble: &SeparableEnsemble,
) -> Result<SeparableExpectation> {
    if ensemble.first_dim() != phi.input_dim() || ensemble.second_dim() != phi.output_dim() {
        return Err(Error::DimensionMismatch {
            context: "separable expectation",
            expected: phi.input_dim() * phi.output_dim(),
            got: ensemble.first_dim() * ensemble.second_dim(),
        });
    }
    let via_witness = witness_value(phi.choi(), &ensemble.assemble()?)?;
    let mut via_action = 0.0;
    for (p, a, b) in ensemble.terms() {
        let image = phi.apply(&a.matrix().matrix().transpose())?;
        via_action += p * (&image * b.matrix().matrix()).trace().re;
    }
    Ok(SeparableExpectation {
        via_witness,
        via_action,
    })
}

/// Outcome of testing a state against the witness of a map.
#[derive(Clone, Copy, Debug)]
pub struct WitnessReport {
    /// `tr(W rho)`.
    pub value: f64,
    /// `d(Φ) * ||rho||_1`, the largest violation any state of this trace norm can show.
    pub bound: f64,
    /// Whether the expectation is genuinely negative (beyond the detection margin).
    pub detected: bool,
    /// Whether the violation reaches the bound within tolerance.
    pub saturated: bool,
}

/// Checks `-tr(W rho) <= d(Φ) ||rho||_1` for one state and reports how close the
/// violation comes to the bound.
pub fn detection_bound_check(
    phi: &HermitianMap,
    evidence: &PositivityStatus,
    rho: &DensityState,
) -> Result<WitnessReport> {
    let witness = witness_from_map(phi, evidence)?;
    let value = witness_value(&witness, rho)?;
    let bound = cp_distance(phi)? * rho.matrix().trace_norm()?;
    Ok(WitnessReport {
        value,
        bound,
        detected: value < -tol::DETECTION_MARGIN,
        saturated: -value >= bound - tol::PROPERTY_PASS_TOL * bound.max(1.0),
    })
}

/// State achieving the detection bound: the projector onto the eigenvector at
/// the lowest index of the Choi spectrum, for which `tr(W rho) = -d(Φ)` exactly.
pub fn extremal_detection_state(phi: &HermitianMap) -> Result<DensityState> {
    if phi.is_cp()? {
        return Err(Error::CompletelyPositive(
            "a completely positive map admits no detecting state".into(),
        ));
    }
    let spec = phi.choi_spectrum()?;
    DensityState::from_pure(&spec.vector(0))
}
