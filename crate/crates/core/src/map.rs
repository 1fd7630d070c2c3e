//! Hermitian linear maps `Φ: M_m -> M_n` represented by their Choi matrices.
//!
//! The Choi matrix is the `mn x mn` Hermitian block matrix with `(j,k)` block
//! `Φ(E_jk)`, stored first-factor major: `C[(j,a),(k,b)] = Φ(E_jk)[a,b]` at row
//! `j*n + a`, column `k*n + b`. Complete positivity is exactly positive
//! semidefiniteness of this matrix; positivity of the map itself has no finite
//! certificate here and is only ever sampled or asserted, which is why order
//! checks return evidence-carrying certificates instead of bare booleans.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::linalg::{
    matrix_unit, outer_product, random_gaussian_matrix, random_unit_vector, random_unitary,
    random_hermitian_contraction, ComplexMatrix, HermitianMatrix, SpectralDecomposition,
};
use crate::{tol, Error, Result};

/// Largest supported algebra dimension per tensor factor; Choi side stays <= 256.
pub const MAX_DIM: usize = 16;

/// Deterministic RNG for trial `index` of a sampling loop seeded with `seed`.
///
/// Each trial gets its own ChaCha8 stream, so results are bit-reproducible and
/// independent of how many draws earlier trials consumed.
pub fn trial_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Hermitian (adjoint-preserving) linear map `M_m -> M_n`, stored as its Choi matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianMap {
    input_dim: usize,
    output_dim: usize,
    choi: HermitianMatrix,
}

fn check_dim(context: &'static str, dim: usize) -> Result<()> {
    if dim == 0 || dim > MAX_DIM {
        return Err(Error::InvalidArgument(format!(
            "{context}: dimension {dim} outside supported range 1..={MAX_DIM}"
        )));
    }
    Ok(())
}

impl HermitianMap {
    /// Wraps an `mn x mn` Hermitian matrix as the Choi matrix of a map `M_m -> M_n`.
    pub fn from_choi(input_dim: usize, output_dim: usize, choi: HermitianMatrix) -> Result<Self> {
        check_dim("input", input_dim)?;
        check_dim("output", output_dim)?;
        if choi.dim() != input_dim * output_dim {
            return Err(Error::DimensionMismatch {
                context: "Choi matrix side",
                expected: input_dim * output_dim,
                got: choi.dim(),
            });
        }
        Ok(Self {
            input_dim,
            output_dim,
            choi,
        })
    }

    /// Builds a map from its action on matrix units; `action(j, k)` must return
    /// `Φ(E_jk)` as an `n x n` matrix, and the table must be adjoint-consistent
    /// (`Φ(E_kj) = Φ(E_jk)*` within the Hermitian tolerance).
    pub fn from_action(
        input_dim: usize,
        output_dim: usize,
        mut action: impl FnMut(usize, usize) -> ComplexMatrix,
    ) -> Result<Self> {
        check_dim("input", input_dim)?;
        check_dim("output", output_dim)?;
        let (m, n) = (input_dim, output_dim);
        let mut data = ComplexMatrix::zeros(m * n, m * n).as_dmatrix().clone();
        for j in 0..m {
            for k in 0..m {
                let block = action(j, k);
                if block.rows() != n || block.cols() != n {
                    return Err(Error::DimensionMismatch {
                        context: "action table block",
                        expected: n,
                        got: block.rows().max(block.cols()),
                    });
                }
                for a in 0..n {
                    for b in 0..n {
                        data[(j * n + a, k * n + b)] = block.entry(a, b);
                    }
                }
            }
        }
        // Adjoint consistency of the table is exactly hermiticity of the
        // assembled matrix, checked (and symmetrized) by the constructor.
        let choi = HermitianMatrix::new(ComplexMatrix::from_dmatrix(data)?)?;
        Self::from_choi(m, n, choi)
    }

    /// Completely positive map `X -> sum_i A_i X A_i*` from Kraus operators of shape `n x m`.
    pub fn from_kraus(input_dim: usize, output_dim: usize, ops: &[ComplexMatrix]) -> Result<Self> {
        for op in ops {
            if op.rows() != output_dim || op.cols() != input_dim {
                return Err(Error::DimensionMismatch {
                    context: "Kraus operator shape",
                    expected: output_dim,
                    got: op.rows(),
                });
            }
        }
        let col = |op: &ComplexMatrix, j: usize| -> Vec<Complex64> {
            (0..output_dim).map(|a| op.entry(a, j)).collect()
        };
        Self::from_action(input_dim, output_dim, |j, k| {
            let mut acc = ComplexMatrix::zeros(output_dim, output_dim);
            for op in ops {
                acc = &acc + &outer_product(&col(op, j), &col(op, k));
            }
            acc
        })
    }

    pub fn input_dim(&self) -> usize {
        self.input_dim
    }

    pub fn output_dim(&self) -> usize {
        self.output_dim
    }

    pub fn choi(&self) -> &HermitianMatrix {
        &self.choi
    }

    /// Block `Φ(E_jk)` of the Choi matrix.
    pub fn choi_block(&self, j: usize, k: usize) -> ComplexMatrix {
        let n = self.output_dim;
        ComplexMatrix::from_fn(n, n, |a, b| self.choi.entry(j * n + a, k * n + b))
            .expect("block of a valid Choi matrix")
    }

    /// Applies the map: `Φ(X)[a,b] = sum_jk X[j,k] C[(j,a),(k,b)]`.
    pub fn apply(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        if x.rows() != self.input_dim || x.cols() != self.input_dim {
            return Err(Error::DimensionMismatch {
                context: "map application",
                expected: self.input_dim,
                got: x.rows().max(x.cols()),
            });
        }
        let n = self.output_dim;
        ComplexMatrix::from_fn(n, n, |a, b| {
            let mut acc = Complex64::new(0.0, 0.0);
            for j in 0..self.input_dim {
                for k in 0..self.input_dim {
                    acc += x.entry(j, k) * self.choi.entry(j * n + a, k * n + b);
                }
            }
            acc
        })
    }

    /// Image of the identity, `Φ(I_m)`, symmetrized into a Hermitian matrix.
    pub fn apply_identity(&self) -> Result<HermitianMatrix> {
        HermitianMatrix::new(self.apply(&ComplexMatrix::identity(self.input_dim))?)
    }

    /// Applies `id_ext ⊗ Φ` to a square matrix on `C^ext ⊗ C^m`: the `(i,j)`
    /// block of the output is `Φ` applied to the `(i,j)` block of the input.
    pub fn apply_extended(&self, extension_dim: usize, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        if extension_dim == 0 {
            return Err(Error::InvalidArgument(
                "extension dimension must be positive".into(),
            ));
        }
        let (m, n) = (self.input_dim, self.output_dim);
        if x.rows() != extension_dim * m || x.cols() != extension_dim * m {
            return Err(Error::DimensionMismatch {
                context: "extended map application",
                expected: extension_dim * m,
                got: x.rows().max(x.cols()),
            });
        }
        let mut out = ComplexMatrix::zeros(extension_dim * n, extension_dim * n)
            .as_dmatrix()
            .clone();
        for i in 0..extension_dim {
            for j in 0..extension_dim {
                let block =
                    ComplexMatrix::from_fn(m, m, |r, s| x.entry(i * m + r, j * m + s))?;
                let image = self.apply(&block)?;
                for a in 0..n {
                    for b in 0..n {
                        out[(i * n + a, j * n + b)] = image.entry(a, b);
                    }
                }
            }
        }
        ComplexMatrix::from_dmatrix(out)
    }

    /// Adjoint map for the trace pairing: `tr(Φ(X)* Y) = tr(X* Φ#(Y))`.
    ///
    /// Its Choi matrix is the entrywise conjugate with tensor factors swapped:
    /// `C#[(a,j),(b,k)] = conj(C[(j,a),(k,b)])`; conjugation is an involution.
    pub fn conjugate(&self) -> HermitianMap {
        let (m, n) = (self.input_dim, self.output_dim);
        let data = ComplexMatrix::from_fn(m * n, m * n, |row, col| {
            let (a, j) = (row / m, row % m);
            let (b, k) = (col / m, col % m);
            self.choi.entry(j * n + a, k * n + b).conj()
        })
        .expect("conjugate Choi matrix is finite");
        HermitianMap {
            input_dim: n,
            output_dim: m,
            choi: HermitianMatrix::wrap(data),
        }
    }

    /// Verified eigendecomposition of the Choi matrix.
    pub fn choi_spectrum(&self) -> Result<SpectralDecomposition> {
        self.choi.eig()
    }

    /// Scale-aware slack under which the Choi matrix counts as positive semidefinite.
    pub fn psd_slack(&self) -> Result<f64> {
        Ok(tol::psd_tol(self.choi.operator_norm()?))
    }

    /// Complete positivity at the default scale-aware slack.
    pub fn is_cp(&self) -> Result<bool> {
        let spec = self.choi_spectrum()?;
        Ok(spec.lambda_min() >= -tol::psd_tol(spec.spectral_radius()))
    }

    /// Complete positivity at an explicit slack: `lambda_min(C) >= -slack`.
    pub fn is_cp_within(&self, slack: f64) -> Result<bool> {
        Ok(self.choi.lambda_min()? >= -slack)
    }

    /// Searches for a violation of positivity on sampled rank-one projectors.
    ///
    /// A PSD Choi matrix certifies complete positivity, hence positivity. A
    /// found counterexample refutes positivity. Otherwise the result is the
    /// evidence-only `PositiveSampled`; absence of a counterexample is not a proof.
    pub fn sample_positivity(&self, trials: usize, seed: u64) -> Result<PositivityStatus> {
        if trials == 0 {
            return Err(Error::InvalidArgument(
                "positivity sampling needs at least one trial".into(),
            ));
        }
        let spec = self.choi_spectrum()?;
        if spec.lambda_min() >= -tol::psd_tol(spec.spectral_radius()) {
            return Ok(PositivityStatus::CpCertified {
                lambda_min: spec.lambda_min(),
            });
        }
        for t in 0..trials {
            let mut rng = trial_rng(seed, t as u64);
            let x = random_unit_vector(self.input_dim, &mut rng);
            let image = HermitianMatrix::new(self.apply(&outer_product(&x, &x))?)?;
            let image_spec = image.eig()?;
            if image_spec.lambda_min() < -tol::pos_tol(image_spec.spectral_radius()) {
                return Ok(PositivityStatus::NotPositive {
                    counterexample: x,
                    output_lambda_min: image_spec.lambda_min(),
                    samples_used: t + 1,
                });
            }
        }
        Ok(PositivityStatus::PositiveSampled {
            samples_used: trials,
        })
    }

    /// Quadratic form of the diagonal Choi block: `<w, Φ(E_ii) w>` for the
    /// standard basis index `i` (zero-based) and a vector `w` in the output space.
    pub fn restriction_form(&self, basis_index: usize, w: &[Complex64]) -> Result<f64> {
        if basis_index >= self.input_dim {
            return Err(Error::InvalidArgument(format!(
                "basis index {basis_index} out of range for input dimension {}",
                self.input_dim
            )));
        }
        if w.len() != self.output_dim {
            return Err(Error::DimensionMismatch {
                context: "restriction vector",
                expected: self.output_dim,
                got: w.len(),
            });
        }
        let n = self.output_dim;
        let i = basis_index;
        let mut acc = Complex64::new(0.0, 0.0);
        for a in 0..n {
            for b in 0..n {
                acc += w[a].conj() * self.choi.entry(i * n + a, i * n + b) * w[b];
            }
        }
        Ok(acc.re)
    }

    /// Pointwise sum; both maps must share dimensions.
    pub fn add(&self, other: &HermitianMap) -> Result<HermitianMap> {
        self.check_same_shape(other)?;
        Ok(HermitianMap {
            input_dim: self.input_dim,
            output_dim: self.output_dim,
            choi: &self.choi + &other.choi,
        })
    }

    /// Pointwise difference.
    pub fn sub(&self, other: &HermitianMap) -> Result<HermitianMap> {
        self.check_same_shape(other)?;
        Ok(HermitianMap {
            input_dim: self.input_dim,
            output_dim: self.output_dim,
            choi: &self.choi - &other.choi,
        })
    }

    /// Real scaling; negative factors flip the sign of the map.
    pub fn scale(&self, factor: f64) -> HermitianMap {
        HermitianMap {
            input_dim: self.input_dim,
            output_dim: self.output_dim,
            choi: self.choi.scale(factor),
        }
    }

    fn check_same_shape(&self, other: &HermitianMap) -> Result<()> {
        if self.input_dim != other.input_dim || self.output_dim != other.output_dim {
            return Err(Error::DimensionMismatch {
                context: "map arithmetic",
                expected: self.input_dim * self.output_dim,
                got: other.input_dim * other.output_dim,
            });
        }
        Ok(())
    }

    // ---- stock maps ----

    /// Transposition `X -> X^T` on `M_dim`; the canonical positive non-CP map.
    pub fn transpose(dim: usize) -> Result<Self> {
        Self::from_action(dim, dim, |j, k| matrix_unit(dim, k, j))
    }

    /// Identity map on `M_dim`.
    pub fn identity(dim: usize) -> Result<Self> {
        Self::from_action(dim, dim, |j, k| matrix_unit(dim, j, k))
    }

    /// `X -> tr(X) I_n` from `M_m` to `M_n`; its Choi matrix is the identity.
    pub fn trace_map(input_dim: usize, output_dim: usize) -> Result<Self> {
        Self::from_action(input_dim, output_dim, |j, k| {
            if j == k {
                ComplexMatrix::identity(output_dim)
            } else {
                ComplexMatrix::zeros(output_dim, output_dim)
            }
        })
    }

    /// Depolarizing family `X -> (1-p) X + p tr(X) I/dim`; completely positive
    /// for `0 <= p <= dim^2/(dim^2 - 1)`.
    pub fn depolarizing(dim: usize, p: f64) -> Result<Self> {
        if !p.is_finite() {
            return Err(Error::InvalidArgument("depolarizing weight must be finite".into()));
        }
        Self::from_action(dim, dim, |j, k| {
            let direct = matrix_unit(dim, j, k).scale(1.0 - p);
            if j == k {
                &direct + &ComplexMatrix::identity(dim).scale(p / dim as f64)
            } else {
                direct
            }
        })
    }

    /// Zero map.
    pub fn zero(input_dim: usize, output_dim: usize) -> Result<Self> {
        check_dim("input", input_dim)?;
        check_dim("output", output_dim)?;
        Ok(Self {
            input_dim,
            output_dim,
            choi: HermitianMatrix::zeros(input_dim * output_dim),
        })
    }

    /// Random Hermitian map: Choi matrix `(G + G*)/2` for a complex Gaussian `G`.
    pub fn random_hermitian(input_dim: usize, output_dim: usize, seed: u64) -> Result<Self> {
        Self::random_hermitian_with(input_dim, output_dim, &mut ChaCha8Rng::seed_from_u64(seed))
    }

    /// As [`Self::random_hermitian`], drawing from a caller-supplied generator.
    pub fn random_hermitian_with(
        input_dim: usize,
        output_dim: usize,
        rng: &mut impl Rng,
    ) -> Result<Self> {
        check_dim("input", input_dim)?;
        check_dim("output", output_dim)?;
        let side = input_dim * output_dim;
        let g = random_gaussian_matrix(side, side, rng);
        let sym = ComplexMatrix::from_dmatrix(
            (g.as_dmatrix() + g.as_dmatrix().adjoint()).map(|z| z * 0.5),
        )?;
        Self::from_choi(input_dim, output_dim, HermitianMatrix::new(sym)?)
    }

    /// Random completely positive map: Choi matrix `G G*` (Wishart, almost surely full rank).
    pub fn random_cp(input_dim: usize, output_dim: usize, seed: u64) -> Result<Self> {
        Self::random_cp_with(input_dim, output_dim, &mut ChaCha8Rng::seed_from_u64(seed))
    }

    /// As [`Self::random_cp`], drawing from a caller-supplied generator.
    pub fn random_cp_with(
        input_dim: usize,
        output_dim: usize,
        rng: &mut impl Rng,
    ) -> Result<Self> {
        check_dim("input", input_dim)?;
        check_dim("output", output_dim)?;
        let side = input_dim * output_dim;
        let g = random_gaussian_matrix(side, side, rng);
        let gram = ComplexMatrix::from_dmatrix(g.as_dmatrix() * g.as_dmatrix().adjoint())?;
        Self::from_choi(input_dim, output_dim, HermitianMatrix::new(gram)?)
    }

    /// Random positive map that is certainly not completely positive.
    ///
    /// Built as `X -> W X^T W* + c tr(X)(I - WW*) + k tr(X) I` with an isometry
    /// `W: C^m -> C^n`, `c in [0,1)` and `k in [0, 0.9)`: a sum of positive maps
    /// whose Choi matrix has smallest eigenvalue exactly `k - 1 < 0`.
    /// Requires `2 <= input_dim <= output_dim`.
    pub fn random_positive_noncp(input_dim: usize, output_dim: usize, seed: u64) -> Result<Self> {
        Self::random_positive_noncp_with(
            input_dim,
            output_dim,
            &mut ChaCha8Rng::seed_from_u64(seed),
        )
    }

    /// As [`Self::random_positive_noncp`], drawing from a caller-supplied generator.
    pub fn random_positive_noncp_with(
        input_dim: usize,
        output_dim: usize,
        rng: &mut impl Rng,
    ) -> Result<Self> {
        check_dim("input", input_dim)?;
        check_dim("output", output_dim)?;
        if input_dim < 2 || input_dim > output_dim {
            return Err(Error::InvalidArgument(
                "positive non-CP sampler needs 2 <= input_dim <= output_dim".into(),
            ));
        }
        let (m, n) = (input_dim, output_dim);
        let u = random_unitary(n, rng);
        let c: f64 = rng.random_range(0.0..1.0);
        let k: f64 = rng.random_range(0.0..0.9);
        let iso_col = |j: usize| -> Vec<Complex64> { (0..n).map(|a| u.entry(a, j)).collect() };
        // Projector onto the orthogonal complement of the isometry range.
        let mut complement = ComplexMatrix::identity(n);
        for j in 0..m {
            let w = iso_col(j);
            complement = &complement - &outer_product(&w, &w);
        }
        Self::from_action(m, n, |j, k_idx| {
            let swapped = outer_product(&iso_col(k_idx), &iso_col(j));
            if j == k_idx {
                &(&swapped + &complement.scale(c)) + &ComplexMatrix::identity(n).scale(k)
            } else {
                swapped
            }
        })
    }
}

/// Outcome of positivity analysis for a Hermitian map.
#[derive(Clone, Debug)]
pub enum PositivityStatus {
    /// Choi matrix is PSD within slack: completely positive, hence positive.
    CpCertified { lambda_min: f64 },
    /// No sampled rank-one input produced a negative output; evidence, not proof.
    PositiveSampled { samples_used: usize },
    /// Witnessed violation: `Φ(xx*)` has a genuinely negative eigenvalue.
    NotPositive {
        counterexample: Vec<Complex64>,
        output_lambda_min: f64,
        samples_used: usize,
    },
    /// Positivity asserted by the caller without evidence.
    Indeterminate,
}

impl PositivityStatus {
    pub fn is_not_positive(&self) -> bool {
        matches!(self, PositivityStatus::NotPositive { .. })
    }

    /// Stable uppercase tag for reports and machine-readable output.
    pub fn label(&self) -> &'static str {
        match self {
            PositivityStatus::CpCertified { .. } => "CP_CERTIFIED",
            PositivityStatus::PositiveSampled { .. } => "POSITIVE_SAMPLED",
            PositivityStatus::NotPositive { .. } => "NOT_POSITIVE",
            PositivityStatus::Indeterminate => "INDETERMINATE",
        }
    }
}

/// Which order relation a certificate speaks about.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OrderRelation {
    /// `Φ <= Ψ` in the positive-map order: `Ψ - Φ` positive.
    LeqPositive,
    /// `Φ <= Ψ` in the CP order: `Ψ - Φ` completely positive.
    LeqCp,
}

/// Evidence backing an order verdict.
#[derive(Clone, Debug)]
pub enum OrderEvidence {
    /// Sampled positivity status of the difference map.
    Positivity(PositivityStatus),
    /// Smallest Choi eigenvalue of the difference map (exact CP criterion).
    ChoiLambdaMin(f64),
}

/// Verdict plus the evidence that produced it; `LeqCp` verdicts are exact
/// spectral facts, `LeqPositive` verdicts are only as strong as the sampling.
#[derive(Clone, Debug)]
pub struct OrderCertificate {
    pub relation: OrderRelation,
    pub holds: bool,
    pub evidence: OrderEvidence,
}

/// Tests `phi <= psi` in the positive-map order by sampling the difference.
pub fn leq_positive(
    phi: &HermitianMap,
    psi: &HermitianMap,
    trials: usize,
    seed: u64,
) -> Result<OrderCertificate> {
    let diff = psi.sub(phi)?;
    let status = diff.sample_positivity(trials, seed)?;
    Ok(OrderCertificate {
        relation: OrderRelation::LeqPositive,
        holds: !status.is_not_positive(),
        evidence: OrderEvidence::Positivity(status),
    })
}

/// Tests `phi <= psi` in the CP order through the Choi spectrum of the difference.
pub fn leq_cp(phi: &HermitianMap, psi: &HermitianMap) -> Result<OrderCertificate> {
    let diff = psi.sub(phi)?;
    let spec = diff.choi_spectrum()?;
    let lambda_min = spec.lambda_min();
    Ok(OrderCertificate {
        relation: OrderRelation::LeqCp,
        holds: lambda_min >= -tol::psd_tol(spec.spectral_radius()),
        evidence: OrderEvidence::ChoiLambdaMin(lambda_min),
    })
}

/// How to evaluate the operator norm `||Φ|| = sup { ||Φ(X)|| : ||X|| <= 1 }`.
#[derive(Clone, Copy, Debug)]
pub enum MapNormMode<'a> {
    /// Exact for positive maps, where the supremum is attained at the identity:
    /// `||Φ|| = ||Φ(I)||`. Requires evidence that does not refute positivity.
    PositiveExact(&'a PositivityStatus),
    /// Monte-Carlo lower bound: max of `||Φ(X)||` over random Hermitian contractions.
    SampledLower { trials: usize, seed: u64 },
}

/// Operator norm of a map, exact under positivity evidence or as a sampled lower bound.
pub fn map_norm(phi: &HermitianMap, mode: MapNormMode) -> Result<f64> {
    match mode {
        MapNormMode::PositiveExact(evidence) => {
            if evidence.is_not_positive() {
                return Err(Error::NotPositiveEvidence);
            }
            phi.apply_identity()?.operator_norm()
        }
        MapNormMode::SampledLower { trials, seed } => {
            if trials == 0 {
                return Err(Error::InvalidArgument(
                    "norm sampling needs at least one trial".into(),
                ));
            }
            let mut best: f64 = 0.0;
            for t in 0..trials {
                let mut rng = trial_rng(seed, t as u64);
                let x = random_hermitian_contraction(phi.input_dim(), &mut rng);
                let image = HermitianMatrix::new(phi.apply(x.matrix())?)?;
                best = best.max(image.operator_norm()?);
            }
            Ok(best)
        }
    }
}

/// Order-compatibility invariants checked by randomized verification.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OrderInvariant {
    /// `Φ <= Ψ` in CP order implies `Φ# <= Ψ#` in CP order.
    ConjugateOrder,
    /// Diagonal-block quadratic forms are monotone under the CP order.
    RestrictionMonotonicity,
    /// `||Φ(I)|| <= ||Ψ(I)||` when `Φ <= Ψ` with both completely positive.
    NormMonotonicity,
}

impl OrderInvariant {
    pub fn label(&self) -> &'static str {
        match self {
            OrderInvariant::ConjugateOrder => "CONJUGATE_ORDER",
            OrderInvariant::RestrictionMonotonicity => "RESTRICTION_MONOTONICITY",
            OrderInvariant::NormMonotonicity => "NORM_MONOTONICITY",
        }
    }
}

/// Worst observed violation of an order invariant over randomized trials.
#[derive(Clone, Debug)]
pub struct OrderInvariantReport {
    pub invariant: OrderInvariant,
    pub input_dim: usize,
    pub output_dim: usize,
    pub trials: usize,
    pub max_violation: f64,
    pub pass: bool,
}

/// Samples CP-ordered pairs `Φ <= Φ + Δ` (both completely positive) and
/// measures the largest violation of the requested invariant.
pub fn verify_order_invariant(
    invariant: OrderInvariant,
    input_dim: usize,
    output_dim: usize,
    trials: usize,
    seed: u64,
) -> Result<OrderInvariantReport> {
    if trials == 0 {
        return Err(Error::InvalidArgument(
            "invariant verification needs at least one trial".into(),
        ));
    }
    let mut max_violation: f64 = 0.0;
    for t in 0..trials {
        let mut rng = trial_rng(seed, t as u64);
        let phi = HermitianMap::random_cp_with(input_dim, output_dim, &mut rng)?;
        let delta = HermitianMap::random_cp_with(input_dim, output_dim, &mut rng)?;
        let psi = phi.add(&delta)?;
        let violation = match invariant {
            OrderInvariant::ConjugateOrder => {
                let cert = leq_cp(&phi.conjugate(), &psi.conjugate())?;
                match cert.evidence {
                    OrderEvidence::ChoiLambdaMin(l) => (-l).max(0.0),
                    OrderEvidence::Positivity(_) => unreachable!("leq_cp yields spectral evidence"),
                }
            }
            OrderInvariant::RestrictionMonotonicity => {
                let mut worst: f64 = 0.0;
                for _ in 0..20 {
                    let i = rng.random_range(0..input_dim);
                    let w = random_unit_vector(output_dim, &mut rng);
                    let gap = phi.restriction_form(i, &w)? - psi.restriction_form(i, &w)?;
                    worst = worst.max(gap.max(0.0));
                }
                worst
            }
            OrderInvariant::NormMonotonicity => {
                let lo = phi.apply_identity()?.operator_norm()?;
                let hi = psi.apply_identity()?.operator_norm()?;
                (lo - hi).max(0.0)
            }
        };
        max_violation = max_violation.max(violation);
    }
    Ok(OrderInvariantReport {
        invariant,
        input_dim,
        output_dim,
        trials,
        max_violation,
        pass: max_violation <= tol::PROPERTY_PASS_TOL,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random_matrix(dim: usize, seed: u64) -> ComplexMatrix {
        random_gaussian_matrix(dim, dim, &mut ChaCha8Rng::seed_from_u64(seed))
    }

    #[test]
    fn transpose_choi_is_the_swap_operator() {
        let t = HermitianMap::transpose(2).unwrap();
        // Swap entries: C[(j,a),(k,b)] = delta_{a,k} delta_{j,b}.
        for j in 0..2 {
            for a in 0..2 {
                for k in 0..2 {
                    for b in 0..2 {
                        let want = if a == k && j == b { 1.0 } else { 0.0 };
                        assert_eq!(t.choi().entry(j * 2 + a, k * 2 + b), c(want, 0.0));
                    }
                }
            }
        }
        let x = random_matrix(2, 5);
        let tx = t.apply(&x).unwrap();
        assert!((&tx - &x.transpose()).frobenius_norm() < 1e-12);
    }

    #[test]
    fn identity_map_choi_has_rank_one_spectrum() {
        let id = HermitianMap::identity(2).unwrap();
        let expected = [0.0, 0.0, 0.0, 2.0];
        let spec = id.choi_spectrum().unwrap();
        for (got, want) in spec.eigenvalues().iter().zip(expected) {
            assert!((got - want).abs() < 1e-12);
        }
        let x = random_matrix(2, 9);
        assert!((&id.apply(&x).unwrap() - &x).frobenius_norm() < 1e-12);
    }

    #[test]
    fn trace_map_choi_is_identity_and_acts_by_trace() {
        let tr = HermitianMap::trace_map(2, 2).unwrap();
        assert_eq!(
            tr.choi().matrix(),
            &ComplexMatrix::identity(4),
            "Choi of the trace map is the identity"
        );
        let off = tr.apply(&matrix_unit(2, 0, 1)).unwrap();
        assert_eq!(off.frobenius_norm(), 0.0);
        let diag = ComplexMatrix::from_rows(&[
            vec![c(2.0, 0.0), c(0.0, 0.0)],
            vec![c(0.0, 0.0), c(3.0, 0.0)],
        ])
        .unwrap();
        let out = tr.apply(&diag).unwrap();
        assert!((&out - &ComplexMatrix::identity(2).scale(5.0)).frobenius_norm() < 1e-12);
    }

    #[test]
    fn depolarizing_spectrum_crosses_zero_past_the_cp_threshold() {
        // Choi eigenvalues are (1-p)m + p/m once and p/m with multiplicity m^2-1.
        assert!(HermitianMap::depolarizing(2, 1.0).unwrap().is_cp().unwrap());
        let beyond = HermitianMap::depolarizing(2, 1.5).unwrap();
        assert!(!beyond.is_cp().unwrap());
        let lmin = beyond.choi().lambda_min().unwrap();
        assert!((lmin - (-0.25)).abs() < 1e-12, "2 - 1.5p at p = 1.5");
    }

    #[test]
    fn apply_matches_block_reconstruction_from_choi() {
        let phi = HermitianMap::random_hermitian(2, 3, 17).unwrap();
        let x = random_matrix(2, 23);
        // Phi(X) = sum_jk X[j,k] * block(j,k).
        let mut acc = ComplexMatrix::zeros(3, 3);
        for j in 0..2 {
            for k in 0..2 {
                acc = &acc + &phi.choi_block(j, k).scale_complex(x.entry(j, k));
            }
        }
        assert!((&phi.apply(&x).unwrap() - &acc).frobenius_norm() < 1e-12);
    }

    #[test]
    fn from_action_rejects_inconsistent_tables() {
        // Table with Phi(E_01) = E_00 but Phi(E_10) = 0 is not adjoint-consistent.
        let result = HermitianMap::from_action(2, 2, |j, k| {
            if (j, k) == (0, 1) {
                matrix_unit(2, 0, 0)
            } else {
                ComplexMatrix::zeros(2, 2)
            }
        });
        assert!(matches!(result, Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn from_choi_validates_dimensions() {
        let c4 = HermitianMatrix::identity(4);
        assert!(HermitianMap::from_choi(2, 2, c4.clone()).is_ok());
        assert!(matches!(
            HermitianMap::from_choi(2, 3, c4),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(matches!(
            HermitianMap::from_choi(0, 2, HermitianMatrix::identity(1)),
            Err(Error::InvalidArgument(_))
        ));
        assert!(matches!(
            HermitianMap::from_choi(17, 1, HermitianMatrix::identity(17)),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn conjugate_is_an_involution_and_fixes_self_adjoint_maps() {
        let phi = HermitianMap::random_hermitian(2, 3, 31).unwrap();
        let back = phi.conjugate().conjugate();
        assert_eq!(phi.choi().matrix(), back.choi().matrix());
        assert_eq!(back.input_dim(), 2);
        assert_eq!(back.output_dim(), 3);

        let t = HermitianMap::transpose(2).unwrap();
        assert_eq!(t.choi().matrix(), t.conjugate().choi().matrix());

        let tr = HermitianMap::trace_map(2, 3).unwrap();
        let tr_conj = tr.conjugate();
        assert_eq!(tr_conj.input_dim(), 3);
        assert_eq!(tr_conj.output_dim(), 2);
        assert_eq!(
            tr_conj.choi().matrix(),
            HermitianMap::trace_map(3, 2).unwrap().choi().matrix()
        );
    }

    #[test]
    fn conjugate_satisfies_the_trace_pairing() {
        let phi = HermitianMap::random_hermitian(2, 3, 41).unwrap();
        let conj = phi.conjugate();
        for seed in 0..20u64 {
            let x = random_matrix(2, 100 + seed);
            let y = random_matrix(3, 200 + seed);
            let lhs = (&phi.apply(&x).unwrap().adjoint() * &y).trace();
            let rhs = (&x.adjoint() * &conj.apply(&y).unwrap()).trace();
            assert!((lhs - rhs).norm() < 1e-12, "pairing gap {}", (lhs - rhs).norm());
        }
    }

    #[test]
    fn kraus_construction_matches_direct_conjugation() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let ops: Vec<ComplexMatrix> = (0..3)
            .map(|_| random_gaussian_matrix(3, 2, &mut rng))
            .collect();
        let phi = HermitianMap::from_kraus(2, 3, &ops).unwrap();
        assert!(phi.is_cp().unwrap());
        let x = random_matrix(2, 77);
        let mut want = ComplexMatrix::zeros(3, 3);
        for op in &ops {
            want = &want + &(&(op * &x) * &op.adjoint());
        }
        assert!((&phi.apply(&x).unwrap() - &want).frobenius_norm() < 1e-12);
    }

    #[test]
    fn positivity_sampling_distinguishes_the_three_verdicts() {
        let id = HermitianMap::identity(2).unwrap();
        assert!(matches!(
            id.sample_positivity(50, 0).unwrap(),
            PositivityStatus::CpCertified { .. }
        ));

        let t = HermitianMap::transpose(2).unwrap();
        match t.sample_positivity(1000, 0).unwrap() {
            PositivityStatus::PositiveSampled { samples_used } => assert_eq!(samples_used, 1000),
            other => panic!("transpose should sample positive, got {other:?}"),
        }

        // Choi diag(1,1,1,-1): Phi(E_00) = diag(1,1), Phi(E_11) = diag(1,-1).
        let mut data = ComplexMatrix::identity(4).as_dmatrix().clone();
        data[(3, 3)] = c(-1.0, 0.0);
        let bad = HermitianMap::from_choi(
            2,
            2,
            HermitianMatrix::new(ComplexMatrix::from_dmatrix(data).unwrap()).unwrap(),
        )
        .unwrap();
        match bad.sample_positivity(1000, 0).unwrap() {
            PositivityStatus::NotPositive {
                counterexample,
                output_lambda_min,
                ..
            } => {
                assert!(output_lambda_min < 0.0);
                // Re-check the counterexample independently.
                let image = HermitianMatrix::new(
                    bad.apply(&outer_product(&counterexample, &counterexample)).unwrap(),
                )
                .unwrap();
                assert!(image.lambda_min().unwrap() < -1e-12);
            }
            other => panic!("expected a counterexample, got {other:?}"),
        }
    }

    #[test]
    fn positive_noncp_sampler_is_positive_but_not_cp() {
        for seed in 0..5u64 {
            for (m, n) in [(2usize, 2usize), (2, 3), (3, 3)] {
                let phi = HermitianMap::random_positive_noncp(m, n, seed).unwrap();
                assert!(!phi.is_cp().unwrap());
                assert!(matches!(
                    phi.sample_positivity(200, seed).unwrap(),
                    PositivityStatus::PositiveSampled { .. }
                ));
            }
        }
        assert!(HermitianMap::random_positive_noncp(3, 2, 0).is_err());
        assert!(HermitianMap::random_positive_noncp(1, 4, 0).is_err());
    }

    #[test]
    fn cp_order_certificates_are_exact_spectral_facts() {
        let phi = HermitianMap::random_cp(2, 2, 8).unwrap();
        let delta = HermitianMap::random_cp(2, 2, 9).unwrap();
        let psi = phi.add(&delta).unwrap();
        let cert = leq_cp(&phi, &psi).unwrap();
        assert!(cert.holds);
        let reverse = leq_cp(&psi, &phi).unwrap();
        assert!(!reverse.holds);
        match reverse.evidence {
            OrderEvidence::ChoiLambdaMin(l) => assert!(l < 0.0),
            _ => panic!("expected spectral evidence"),
        }
    }

    #[test]
    fn positive_order_detects_the_zero_map_below_the_trace_map() {
        let tr = HermitianMap::trace_map(2, 2).unwrap();
        let zero = HermitianMap::zero(2, 2).unwrap();
        let cert = leq_positive(&zero, &tr, 200, 0).unwrap();
        assert!(cert.holds);
        let failing = leq_positive(&tr, &zero, 200, 0).unwrap();
        assert!(!failing.holds);
        match failing.evidence {
            OrderEvidence::Positivity(PositivityStatus::NotPositive { .. }) => {}
            other => panic!("expected a counterexample, got {other:?}"),
        }
    }

    #[test]
    fn map_norms_on_stock_maps() {
        let evidence = PositivityStatus::Indeterminate;
        let t = HermitianMap::transpose(2).unwrap();
        let norm = map_norm(&t, MapNormMode::PositiveExact(&evidence)).unwrap();
        assert!((norm - 1.0).abs() < 1e-12);

        let tr = HermitianMap::trace_map(2, 2).unwrap();
        let norm = map_norm(&tr, MapNormMode::PositiveExact(&evidence)).unwrap();
        assert!((norm - 2.0).abs() < 1e-12);

        let zero = HermitianMap::zero(2, 2).unwrap();
        let sampled = map_norm(&zero, MapNormMode::SampledLower { trials: 20, seed: 0 }).unwrap();
        assert_eq!(sampled, 0.0);

        // Sampled transpose norms never exceed the exact value 1.
        let sampled_t = map_norm(&t, MapNormMode::SampledLower { trials: 100, seed: 1 }).unwrap();
        assert!(sampled_t <= 1.0 + 1e-9);
        assert!(sampled_t > 0.9, "contractions should come close to norm one");

        let refuted = PositivityStatus::NotPositive {
            counterexample: vec![c(1.0, 0.0), c(0.0, 0.0)],
            output_lambda_min: -1.0,
            samples_used: 1,
        };
        assert!(matches!(
            map_norm(&t, MapNormMode::PositiveExact(&refuted)),
            Err(Error::NotPositiveEvidence)
        ));
    }

    #[test]
    fn restriction_form_reads_diagonal_blocks() {
        let t = HermitianMap::transpose(2).unwrap();
        let e0 = [c(1.0, 0.0), c(0.0, 0.0)];
        let e1 = [c(0.0, 0.0), c(1.0, 0.0)];
        assert!((t.restriction_form(0, &e0).unwrap() - 1.0).abs() < 1e-12);
        assert!(t.restriction_form(0, &e1).unwrap().abs() < 1e-12);
        assert!(t.restriction_form(2, &e0).is_err());
        assert!(t.restriction_form(0, &[c(1.0, 0.0)]).is_err());
    }

    #[test]
    fn order_invariants_hold_on_sampled_cp_pairs() {
        for invariant in [
            OrderInvariant::ConjugateOrder,
            OrderInvariant::RestrictionMonotonicity,
            OrderInvariant::NormMonotonicity,
        ] {
            let report = verify_order_invariant(invariant, 2, 2, 50, 7).unwrap();
            assert!(
                report.pass,
                "{:?} violated by {}",
                invariant, report.max_violation
            );
        }
    }

    #[test]
    fn generators_are_seed_deterministic() {
        let a = HermitianMap::random_cp(2, 3, 99).unwrap();
        let b = HermitianMap::random_cp(2, 3, 99).unwrap();
        assert_eq!(a.choi().matrix(), b.choi().matrix());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        /// Application is linear and intertwines adjoints: Phi(X*) = Phi(X)*.
        #[test]
        fn apply_is_linear_and_adjoint_preserving(seed in 0u64..500) {
            let phi = HermitianMap::random_hermitian(2, 3, seed).unwrap();
            let x = random_matrix(2, seed.wrapping_add(1000));
            let y = random_matrix(2, seed.wrapping_add(2000));
            let sum = phi.apply(&(&x + &y)).unwrap();
            let parts = &phi.apply(&x).unwrap() + &phi.apply(&y).unwrap();
            prop_assert!((&sum - &parts).frobenius_norm() < 1e-10);

            let adj = phi.apply(&x.adjoint()).unwrap();
            let adj_of_image = phi.apply(&x).unwrap().adjoint();
            prop_assert!((&adj - &adj_of_image).frobenius_norm() < 1e-10);
        }

        /// Map arithmetic agrees with pointwise arithmetic of images.
        #[test]
        fn arithmetic_commutes_with_application(seed in 0u64..500) {
            let phi = HermitianMap::random_hermitian(2, 2, seed).unwrap();
            let psi = HermitianMap::random_hermitian(2, 2, seed.wrapping_add(1)).unwrap();
            let x = random_matrix(2, seed.wrapping_add(3000));
            let combined = phi.scale(0.5).add(&psi.scale(2.0)).unwrap().apply(&x).unwrap();
            let pointwise = &phi.apply(&x).unwrap().scale(0.5) + &psi.apply(&x).unwrap().scale(2.0);
            prop_assert!((&combined - &pointwise).frobenius_norm() < 1e-10);
        }

        /// Conjugation of CP maps preserves complete positivity.
        #[test]
        fn conjugate_preserves_cp(seed in 0u64..500) {
            let phi = HermitianMap::random_cp(2, 3, seed).unwrap();
            prop_assert!(phi.conjugate().is_cp().unwrap());
        }

        /// Extended application acts factorwise: (id ⊗ Φ)(A ⊗ B) = A ⊗ Φ(B).
        #[test]
        fn extended_application_respects_tensor_factors(seed in 0u64..500) {
            let phi = HermitianMap::random_hermitian(2, 3, seed).unwrap();
            let a = random_matrix(3, seed.wrapping_add(4000));
            let b = random_matrix(2, seed.wrapping_add(5000));
            let lhs = phi.apply_extended(3, &crate::linalg::tensor_product(&a, &b)).unwrap();
            let rhs = crate::linalg::tensor_product(&a, &phi.apply(&b).unwrap());
            prop_assert!((&lhs - &rhs).frobenius_norm() < 1e-10);
        }
    }
}
