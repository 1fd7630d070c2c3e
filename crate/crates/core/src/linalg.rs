//! Dense complex matrix kernel: validated matrices, Hermitian eigendecomposition,
//! tensor/partial-trace operations and the random generators used by sampling code.
//!
//! Everything downstream goes through two types. [`ComplexMatrix`] is a finite-entry
//! dense matrix; [`HermitianMatrix`] additionally guarantees exact (bitwise) equality
//! `a_jk == conj(a_kj)`, which spectral routines rely on. Eigendecompositions are
//! verified after the solve and failures surface as errors, never as silent noise.

use nalgebra::DMatrix;
pub use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::{tol, Error, Result};

/// Dense complex matrix with at least one row and column and all entries finite.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix {
    data: DMatrix<Complex64>,
}

impl ComplexMatrix {
    /// Validates shape and finiteness of a raw nalgebra matrix.
    pub fn from_dmatrix(data: DMatrix<Complex64>) -> Result<Self> {
        if data.nrows() == 0 || data.ncols() == 0 {
            return Err(Error::InvalidShape("matrix must be at least 1x1".into()));
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { data })
    }

    /// Builds from row slices; rows must be nonempty and of equal length.
    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        if rows.is_empty() || rows[0].is_empty() {
            return Err(Error::InvalidShape("matrix must be at least 1x1".into()));
        }
        let ncols = rows[0].len();
        if rows.iter().any(|r| r.len() != ncols) {
            return Err(Error::InvalidShape("rows have unequal lengths".into()));
        }
        let data = DMatrix::from_fn(rows.len(), ncols, |i, j| rows[i][j]);
        Self::from_dmatrix(data)
    }

    /// Builds entrywise from a function of `(row, col)`.
    pub fn from_fn(
        rows: usize,
        cols: usize,
        f: impl FnMut(usize, usize) -> Complex64,
    ) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidShape("matrix must be at least 1x1".into()));
        }
        Self::from_dmatrix(DMatrix::from_fn(rows, cols, f))
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            data: DMatrix::zeros(rows.max(1), cols.max(1)),
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            data: DMatrix::identity(dim.max(1), dim.max(1)),
        }
    }

    pub fn rows(&self) -> usize {
        self.data.nrows()
    }

    pub fn cols(&self) -> usize {
        self.data.ncols()
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.data[(row, col)]
    }

    pub fn as_dmatrix(&self) -> &DMatrix<Complex64> {
        &self.data
    }

    pub fn adjoint(&self) -> Self {
        Self {
            data: self.data.adjoint(),
        }
    }

    pub fn transpose(&self) -> Self {
        Self {
            data: self.data.transpose(),
        }
    }

    pub fn conjugate(&self) -> Self {
        Self {
            data: self.data.map(|z| z.conj()),
        }
    }

    pub fn trace(&self) -> Complex64 {
        self.data.diagonal().iter().sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest entry modulus; the scale used by Hermitian tolerance checks.
    pub fn max_entry_modulus(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn scale(&self, factor: f64) -> Self {
        Self {
            data: self.data.map(|z| z * factor),
        }
    }

    pub fn scale_complex(&self, factor: Complex64) -> Self {
        Self {
            data: self.data.map(|z| z * factor),
        }
    }

    /// Largest singular value, computed as `sqrt(lambda_max(A* A))`.
    pub fn operator_norm(&self) -> Result<f64> {
        let gram = HermitianMatrix::new(ComplexMatrix {
            data: self.data.adjoint() * &self.data,
        })?;
        let spec = hermitian_eig(&gram)?;
        Ok(spec.lambda_max().max(0.0).sqrt())
    }

    /// Worst violation of `a_jk == conj(a_kj)` over all entry pairs; requires square.
    pub fn hermitian_deviation(&self) -> Result<f64> {
        if self.rows() != self.cols() {
            return Err(Error::NotSquare {
                rows: self.rows(),
                cols: self.cols(),
            });
        }
        let n = self.rows();
        let mut dev: f64 = 0.0;
        for i in 0..n {
            for j in i..n {
                dev = dev.max((self.data[(i, j)] - self.data[(j, i)].conj()).norm());
            }
        }
        Ok(dev)
    }
}

impl std::ops::Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    /// Panics on shape mismatch, like the underlying nalgebra operator.
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix {
            data: &self.data + &rhs.data,
        }
    }
}

impl std::ops::Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix {
            data: &self.data - &rhs.data,
        }
    }
}

impl std::ops::Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix {
            data: &self.data * &rhs.data,
        }
    }
}

/// Matrix unit `E_jk`: one at `(j, k)`, zero elsewhere.
pub fn matrix_unit(dim: usize, j: usize, k: usize) -> ComplexMatrix {
    let mut data = DMatrix::zeros(dim, dim);
    data[(j, k)] = Complex64::new(1.0, 0.0);
    ComplexMatrix { data }
}

/// Outer product `x y*` as a matrix of shape `len(x) x len(y)`.
pub fn outer_product(x: &[Complex64], y: &[Complex64]) -> ComplexMatrix {
    ComplexMatrix {
        data: DMatrix::from_fn(x.len().max(1), y.len().max(1), |i, j| {
            if x.is_empty() || y.is_empty() {
                Complex64::new(0.0, 0.0)
            } else {
                x[i] * y[j].conj()
            }
        }),
    }
}

/// Kronecker product with the first factor major:
/// `(A ⊗ B)[(i,a),(j,b)] = A[i,j] B[a,b]` at row `i*rows(B)+a`, column `j*cols(B)+b`.
pub fn tensor_product(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    ComplexMatrix {
        data: a.data.kronecker(&b.data),
    }
}

/// Traces out the second tensor factor of a square matrix on `C^d1 ⊗ C^d2`:
/// `Y[j,k] = sum_b X[(j,b),(k,b)]`.
pub fn partial_trace_second(
    x: &ComplexMatrix,
    dim_first: usize,
    dim_second: usize,
) -> Result<ComplexMatrix> {
    check_bipartite(x, dim_first, dim_second)?;
    let data = DMatrix::from_fn(dim_first, dim_first, |j, k| {
        (0..dim_second)
            .map(|b| x.data[(j * dim_second + b, k * dim_second + b)])
            .sum()
    });
    Ok(ComplexMatrix { data })
}

/// Traces out the first tensor factor: `Y[a,b] = sum_j X[(j,a),(j,b)]`.
pub fn partial_trace_first(
    x: &ComplexMatrix,
    dim_first: usize,
    dim_second: usize,
) -> Result<ComplexMatrix> {
    check_bipartite(x, dim_first, dim_second)?;
    let data = DMatrix::from_fn(dim_second, dim_second, |a, b| {
        (0..dim_first)
            .map(|j| x.data[(j * dim_second + a, j * dim_second + b)])
            .sum()
    });
    Ok(ComplexMatrix { data })
}

fn check_bipartite(x: &ComplexMatrix, dim_first: usize, dim_second: usize) -> Result<()> {
    if dim_first == 0 || dim_second == 0 {
        return Err(Error::InvalidArgument(
            "tensor factor dimensions must be positive".into(),
        ));
    }
    if x.rows() != x.cols() {
        return Err(Error::NotSquare {
            rows: x.rows(),
            cols: x.cols(),
        });
    }
    if x.rows() != dim_first * dim_second {
        return Err(Error::DimensionMismatch {
            context: "partial trace",
            expected: dim_first * dim_second,
            got: x.rows(),
        });
    }
    Ok(())
}

/// Square matrix with exact entrywise Hermitian symmetry.
///
/// Construction symmetrizes inputs whose deviation sits below the scale-aware
/// tolerance and rejects anything larger, so a stored value is always exactly
/// equal to its own adjoint and has a real diagonal.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianMatrix {
    mat: ComplexMatrix,
}

impl HermitianMatrix {
    /// Accepts a square matrix with Hermitian deviation at most
    /// `HERM_TOL_COEFF * max(1, max entry modulus)` and stores `(A + A*)/2`.
    pub fn new(mat: ComplexMatrix) -> Result<Self> {
        let deviation = mat.hermitian_deviation()?;
        let tolerance = tol::herm_tol(mat.max_entry_modulus());
        if deviation > tolerance {
            return Err(Error::NotHermitian {
                deviation,
                tolerance,
            });
        }
        let sym = (&mat.data + mat.data.adjoint()).map(|z| z * 0.5);
        Ok(Self::wrap(ComplexMatrix { data: sym }))
    }

    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        Self::new(ComplexMatrix::from_rows(rows)?)
    }

    /// Internal constructor for matrices that are Hermitian by construction.
    pub(crate) fn wrap(mat: ComplexMatrix) -> Self {
        debug_assert_eq!(mat.hermitian_deviation().unwrap(), 0.0);
        Self { mat }
    }

    pub fn identity(dim: usize) -> Self {
        Self::wrap(ComplexMatrix::identity(dim))
    }

    pub fn zeros(dim: usize) -> Self {
        Self::wrap(ComplexMatrix::zeros(dim, dim))
    }

    /// `s * I`.
    pub fn scaled_identity(dim: usize, s: f64) -> Self {
        Self::identity(dim).scale(s)
    }

    pub fn dim(&self) -> usize {
        self.mat.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.mat
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.mat
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.mat.entry(row, col)
    }

    /// Trace; exactly real because the stored diagonal is real.
    pub fn trace_real(&self) -> f64 {
        self.mat.as_dmatrix().diagonal().iter().map(|z| z.re).sum()
    }

    /// Scaling by a real factor preserves exact symmetry.
    pub fn scale(&self, factor: f64) -> Self {
        Self::wrap(self.mat.scale(factor))
    }

    /// `A + s*I`, exact on the off-diagonal.
    pub fn add_scaled_identity(&self, s: f64) -> Self {
        let mut data = self.mat.data.clone();
        for i in 0..data.nrows() {
            data[(i, i)] += Complex64::new(s, 0.0);
        }
        Self::wrap(ComplexMatrix { data })
    }

    pub fn eig(&self) -> Result<SpectralDecomposition> {
        hermitian_eig(self)
    }

    pub fn lambda_min(&self) -> Result<f64> {
        Ok(self.eig()?.lambda_min())
    }

    /// Largest eigenvalue modulus.
    pub fn operator_norm(&self) -> Result<f64> {
        Ok(self.eig()?.spectral_radius())
    }

    /// Sum of eigenvalue moduli.
    pub fn trace_norm(&self) -> Result<f64> {
        Ok(self.eig()?.eigenvalues().iter().map(|l| l.abs()).sum())
    }

    /// True when `lambda_min >= -slack`.
    pub fn is_psd_within(&self, slack: f64) -> Result<bool> {
        Ok(self.lambda_min()? >= -slack)
    }
}

impl std::ops::Add for &HermitianMatrix {
    type Output = HermitianMatrix;
    fn add(self, rhs: &HermitianMatrix) -> HermitianMatrix {
        HermitianMatrix::wrap(&self.mat + &rhs.mat)
    }
}

impl std::ops::Sub for &HermitianMatrix {
    type Output = HermitianMatrix;
    fn sub(self, rhs: &HermitianMatrix) -> HermitianMatrix {
        HermitianMatrix::wrap(&self.mat - &rhs.mat)
    }
}

/// Verified eigendecomposition of a Hermitian matrix.
///
/// Eigenvalues are ascending; column `i` of [`Self::vectors`] is a unit
/// eigenvector for `eigenvalues[i]`. Ties keep the solver's order, so the
/// decomposition is deterministic for a given input.
#[derive(Clone, Debug)]
pub struct SpectralDecomposition {
    eigenvalues: Vec<f64>,
    vectors: ComplexMatrix,
}

impl SpectralDecomposition {
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn lambda_min(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn lambda_max(&self) -> f64 {
        *self.eigenvalues.last().expect("nonempty spectrum")
    }

    /// `max |lambda_i|`; the operator norm of the decomposed matrix.
    pub fn spectral_radius(&self) -> f64 {
        self.lambda_min().abs().max(self.lambda_max().abs())
    }

    /// Unitary matrix of eigenvector columns.
    pub fn vectors(&self) -> &ComplexMatrix {
        &self.vectors
    }

    /// Eigenvector for `eigenvalues[index]`.
    pub fn vector(&self, index: usize) -> Vec<Complex64> {
        (0..self.vectors.rows())
            .map(|r| self.vectors.entry(r, index))
            .collect()
    }

    /// Rebuilds `V f(Λ) V*`; the spectral function of the original matrix.
    pub fn recombine(&self, f: impl Fn(f64) -> f64) -> Result<HermitianMatrix> {
        let n = self.eigenvalues.len();
        let v = self.vectors.as_dmatrix();
        let mut scaled = v.clone();
        for (i, lam) in self.eigenvalues.iter().enumerate() {
            let factor = f(*lam);
            for r in 0..n {
                scaled[(r, i)] *= factor;
            }
        }
        HermitianMatrix::new(ComplexMatrix {
            data: scaled * v.adjoint(),
        })
    }
}

/// Eigendecomposition of a Hermitian matrix with post-solve verification.
///
/// Each eigenpair must satisfy `||A v - lambda v|| <= EIG_TOL * max|lambda|`
/// and the eigenvector matrix must be unitary to within `EIG_TOL`; otherwise
/// the solve is reported as failed rather than returned.
pub fn hermitian_eig(a: &HermitianMatrix) -> Result<SpectralDecomposition> {
    let n = a.dim();
    let se = nalgebra::SymmetricEigen::try_new(a.mat.data.clone(), f64::EPSILON, 0)
        .ok_or_else(|| Error::EigenFailure("symmetric eigen-solver did not converge".into()))?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| se.eigenvalues[i].total_cmp(&se.eigenvalues[j]));
    let eigenvalues: Vec<f64> = order.iter().map(|&i| se.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(n, n, |r, c| se.eigenvectors[(r, order[c])]);

    let scale = eigenvalues.iter().fold(0.0f64, |m, l| m.max(l.abs()));
    let residual = &a.mat.data * &vectors
        - &vectors * DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
            n,
            eigenvalues.iter().map(|l| Complex64::new(*l, 0.0)),
        ));
    for i in 0..n {
        let r = residual.column(i).norm();
        if r > tol::EIG_TOL * scale {
            return Err(Error::EigenFailure(format!(
                "eigenpair {i} residual {r:.3e} exceeds {:.3e}",
                tol::EIG_TOL * scale
            )));
        }
    }
    let gram_defect = (vectors.adjoint() * &vectors - DMatrix::<Complex64>::identity(n, n)).norm();
    if gram_defect > tol::EIG_TOL {
        return Err(Error::EigenFailure(format!(
            "eigenvector matrix deviates from unitary by {gram_defect:.3e}"
        )));
    }

    Ok(SpectralDecomposition {
        eigenvalues,
        vectors: ComplexMatrix { data: vectors },
    })
}

/// Splits `A = P - N` with `P, N` positive semidefinite and `PN = 0`.
///
/// Eigenvalues within `EIG_SPLIT_COEFF * ||A||` of zero are assigned to the
/// positive part (clamped at zero), so near-null directions never create a
/// spurious negative component.
pub fn positive_negative_parts(a: &HermitianMatrix) -> Result<(HermitianMatrix, HermitianMatrix)> {
    let spec = a.eig()?;
    let split = tol::EIG_SPLIT_COEFF * spec.spectral_radius();
    let pos = spec.recombine(|l| if l >= -split { l.max(0.0) } else { 0.0 })?;
    let neg = spec.recombine(|l| if l < -split { -l } else { 0.0 })?;
    Ok((pos, neg))
}

/// Standard complex Gaussian matrix: entries `(x + iy)/sqrt(2)` with `x, y ~ N(0,1)`.
pub fn random_gaussian_matrix(rows: usize, cols: usize, rng: &mut impl Rng) -> ComplexMatrix {
    let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
    ComplexMatrix {
        data: DMatrix::from_fn(rows.max(1), cols.max(1), |_, _| {
            let re: f64 = StandardNormal.sample(rng);
            let im: f64 = StandardNormal.sample(rng);
            Complex64::new(re * inv_sqrt2, im * inv_sqrt2)
        }),
    }
}

/// Haar-distributed unit vector: normalized complex Gaussian sample.
pub fn random_unit_vector(dim: usize, rng: &mut impl Rng) -> Vec<Complex64> {
    loop {
        let g = random_gaussian_matrix(dim, 1, rng);
        let norm = g.frobenius_norm();
        if norm > 1e-6 {
            return (0..dim).map(|i| g.entry(i, 0) / norm).collect();
        }
    }
}

/// Haar-distributed unitary via QR of a complex Gaussian matrix with the
/// phase correction `U = Q diag(r_jj / |r_jj|)`.
pub fn random_unitary(dim: usize, rng: &mut impl Rng) -> ComplexMatrix {
    let g = random_gaussian_matrix(dim, dim, rng);
    let qr = g.data.qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..dim {
        let rjj = r[(j, j)];
        let phase = if rjj.norm() > 0.0 {
            rjj / rjj.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        for i in 0..dim {
            q[(i, j)] *= phase;
        }
    }
    ComplexMatrix { data: q }
}

/// Random Hermitian contraction `U diag(t) U*` with `t` uniform in `[-1, 1]`,
/// so the operator norm never exceeds one.
pub fn random_hermitian_contraction(dim: usize, rng: &mut impl Rng) -> HermitianMatrix {
    let u = random_unitary(dim, rng);
    let mut scaled = u.data.clone();
    for j in 0..dim {
        let t: f64 = rng.random_range(-1.0..=1.0);
        for i in 0..dim {
            scaled[(i, j)] *= t;
        }
    }
    HermitianMatrix::new(ComplexMatrix {
        data: scaled * u.data.adjoint(),
    })
    .expect("unitary conjugation of a real diagonal stays Hermitian")
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    const TEST_TOL: f64 = 1e-12;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    /// Swap operator on C^2 ⊗ C^2: sum of E_ij ⊗ E_ji.
    fn swap_two() -> HermitianMatrix {
        let mut acc = ComplexMatrix::zeros(4, 4);
        for i in 0..2 {
            for j in 0..2 {
                acc = &acc + &tensor_product(&matrix_unit(2, i, j), &matrix_unit(2, j, i));
            }
        }
        HermitianMatrix::new(acc).unwrap()
    }

    /// Maximally entangled antisymmetric unit vector (0, 1, -1, 0)/sqrt(2).
    fn singlet_vector() -> Vec<Complex64> {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        vec![c(0.0, 0.0), c(s, 0.0), c(-s, 0.0), c(0.0, 0.0)]
    }

    #[test]
    fn rejects_empty_and_ragged_and_nonfinite() {
        assert!(matches!(
            ComplexMatrix::from_rows(&[]),
            Err(Error::InvalidShape(_))
        ));
        assert!(matches!(
            ComplexMatrix::from_rows(&[vec![c(1.0, 0.0)], vec![]]),
            Err(Error::InvalidShape(_))
        ));
        assert!(matches!(
            ComplexMatrix::from_rows(&[vec![c(f64::NAN, 0.0)]]),
            Err(Error::NonFinite)
        ));
        assert!(matches!(
            ComplexMatrix::from_rows(&[vec![c(0.0, f64::INFINITY)]]),
            Err(Error::NonFinite)
        ));
    }

    #[test]
    fn hermitian_constructor_symmetrizes_small_and_rejects_large() {
        // Deviation 2e-12 on entries of modulus ~1: inside the band, symmetrized.
        let near = ComplexMatrix::from_rows(&[
            vec![c(1.0, 0.0), c(0.5, 1e-12)],
            vec![c(0.5, 1e-12), c(-1.0, 0.0)],
        ])
        .unwrap();
        let h = HermitianMatrix::new(near).unwrap();
        assert_eq!(h.matrix().hermitian_deviation().unwrap(), 0.0);
        assert_eq!(h.entry(0, 1).conj(), h.entry(1, 0));

        // Deviation 1 is far outside the band.
        let far = ComplexMatrix::from_rows(&[
            vec![c(0.0, 0.0), c(1.0, 0.0)],
            vec![c(0.0, 0.0), c(0.0, 0.0)],
        ])
        .unwrap();
        assert!(matches!(
            HermitianMatrix::new(far),
            Err(Error::NotHermitian { .. })
        ));
    }

    #[test]
    fn hermitian_diagonal_is_exactly_real() {
        let h = HermitianMatrix::from_rows(&[
            vec![c(2.0, 5e-13), c(0.0, 1.0)],
            vec![c(0.0, -1.0), c(3.0, 0.0)],
        ])
        .unwrap();
        assert_eq!(h.entry(0, 0).im, 0.0);
        assert_eq!(h.trace_real(), 5.0);
    }

    #[test]
    fn swap_operator_squares_to_identity_with_trace_two() {
        let s = swap_two();
        let s2 = s.matrix() * s.matrix();
        assert!((&s2 - &ComplexMatrix::identity(4)).frobenius_norm() < TEST_TOL);
        assert!((s.trace_real() - 2.0).abs() < TEST_TOL);
    }

    /// S^2 = I forces eigenvalues in {-1, +1}; tr S = 2 fixes multiplicities
    /// (1, 3). The -1 eigenspace is the antisymmetric line spanned by the
    /// singlet vector, the +1 eigenspace the symmetric subspace.
    #[test]
    fn swap_spectrum_is_minus_one_once_plus_one_thrice() {
        let spec = swap_two().eig().unwrap();
        let expected = [-1.0, 1.0, 1.0, 1.0];
        for (got, want) in spec.eigenvalues().iter().zip(expected) {
            assert!((got - want).abs() < TEST_TOL, "{got} vs {want}");
        }
        // Lowest-index eigenvector spans the singlet line.
        let v = spec.vector(0);
        let overlap: Complex64 = singlet_vector()
            .iter()
            .zip(&v)
            .map(|(a, b)| a.conj() * b)
            .sum();
        assert!((overlap.norm() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn partial_traces_of_singlet_projector_are_maximally_mixed() {
        let psi = singlet_vector();
        let rho = outer_product(&psi, &psi);
        let half_identity = ComplexMatrix::identity(2).scale(0.5);
        let t2 = partial_trace_second(&rho, 2, 2).unwrap();
        let t1 = partial_trace_first(&rho, 2, 2).unwrap();
        assert!((&t2 - &half_identity).frobenius_norm() < TEST_TOL);
        assert!((&t1 - &half_identity).frobenius_norm() < TEST_TOL);
    }

    #[test]
    fn partial_trace_rejects_wrong_dimensions() {
        let x = ComplexMatrix::identity(4);
        assert!(matches!(
            partial_trace_second(&x, 2, 3),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(matches!(
            partial_trace_second(&x, 0, 4),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn sign_split_of_integer_diagonal_is_exact() {
        let a = HermitianMatrix::from_rows(&[
            vec![c(2.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)],
            vec![c(0.0, 0.0), c(-3.0, 0.0), c(0.0, 0.0)],
            vec![c(0.0, 0.0), c(0.0, 0.0), c(5.0, 0.0)],
        ])
        .unwrap();
        let (p, n) = positive_negative_parts(&a).unwrap();
        let p_expect = [2.0, 0.0, 5.0];
        let n_expect = [0.0, 3.0, 0.0];
        for i in 0..3 {
            assert!((p.entry(i, i).re - p_expect[i]).abs() < TEST_TOL);
            assert!((n.entry(i, i).re - n_expect[i]).abs() < TEST_TOL);
        }
        assert!((a.trace_norm().unwrap() - 10.0).abs() < TEST_TOL);
        assert!((a.operator_norm().unwrap() - 5.0).abs() < TEST_TOL);
    }

    #[test]
    fn sign_split_sends_near_null_directions_to_the_positive_part() {
        // -1e-15 sits inside the split band 1e-10 * ||A||, so N stays zero.
        let a = HermitianMatrix::from_rows(&[
            vec![c(-1e-15, 0.0), c(0.0, 0.0)],
            vec![c(0.0, 0.0), c(1.0, 0.0)],
        ])
        .unwrap();
        let (p, n) = positive_negative_parts(&a).unwrap();
        assert_eq!(n.matrix().frobenius_norm(), 0.0);
        assert!(p.lambda_min().unwrap() >= 0.0);
        assert!((p.entry(1, 1).re - 1.0).abs() < TEST_TOL);
    }

    #[test]
    fn operator_norm_of_nilpotent_jordan_block_is_its_weight() {
        // Singular values of [[0, 2], [0, 0]] are {2, 0}.
        let a = ComplexMatrix::from_rows(&[
            vec![c(0.0, 0.0), c(2.0, 0.0)],
            vec![c(0.0, 0.0), c(0.0, 0.0)],
        ])
        .unwrap();
        assert!((a.operator_norm().unwrap() - 2.0).abs() < TEST_TOL);
    }

    #[test]
    fn eigendecomposition_reconstructs_random_hermitian_matrices() {
        let mut r = rng(7);
        for dim in [1usize, 2, 3, 5, 8] {
            let g = random_gaussian_matrix(dim, dim, &mut r);
            let h = HermitianMatrix::new(ComplexMatrix {
                data: (g.as_dmatrix() + g.as_dmatrix().adjoint()).map(|z| z * 0.5),
            })
            .unwrap();
            let spec = h.eig().unwrap();
            let rebuilt = spec.recombine(|l| l).unwrap();
            let err = (rebuilt.matrix() - h.matrix()).frobenius_norm();
            assert!(err < 1e-11 * h.operator_norm().unwrap().max(1.0), "{err}");
        }
    }

    #[test]
    fn random_unitary_is_unitary_and_seed_deterministic() {
        let u = random_unitary(4, &mut rng(42));
        let gram = &u.adjoint() * &u;
        assert!((&gram - &ComplexMatrix::identity(4)).frobenius_norm() < 1e-12);

        let again = random_unitary(4, &mut rng(42));
        assert_eq!(u, again);
    }

    #[test]
    fn random_contraction_has_operator_norm_at_most_one() {
        let mut r = rng(3);
        for _ in 0..20 {
            let x = random_hermitian_contraction(3, &mut r);
            assert!(x.operator_norm().unwrap() <= 1.0 + 1e-12);
        }
    }

    #[test]
    fn random_unit_vectors_are_normalized() {
        let mut r = rng(11);
        for dim in [1usize, 2, 5] {
            let v = random_unit_vector(dim, &mut r);
            let norm: f64 = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            assert!((norm - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn tensor_product_matches_direct_entry_formula() {
        let a = ComplexMatrix::from_rows(&[
            vec![c(1.0, 1.0), c(2.0, 0.0)],
            vec![c(0.0, -1.0), c(3.0, 2.0)],
        ])
        .unwrap();
        let b = ComplexMatrix::from_rows(&[
            vec![c(0.0, 2.0), c(1.0, 0.0)],
            vec![c(-1.0, 0.0), c(0.5, 0.5)],
        ])
        .unwrap();
        let t = tensor_product(&a, &b);
        for i in 0..2 {
            for a_i in 0..2 {
                for j in 0..2 {
                    for b_j in 0..2 {
                        let want = a.entry(i, j) * b.entry(a_i, b_j);
                        let got = t.entry(i * 2 + a_i, j * 2 + b_j);
                        assert_eq!(got, want);
                    }
                }
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        /// tr_2(A ⊗ B) = tr(B) A and tr_1(A ⊗ B) = tr(A) B.
        #[test]
        fn partial_traces_factor_on_tensor_products(seed in 0u64..1000) {
            let mut r = rng(seed);
            let a = random_gaussian_matrix(2, 2, &mut r);
            let b = random_gaussian_matrix(3, 3, &mut r);
            let t = tensor_product(&a, &b);
            let t2 = partial_trace_second(&t, 2, 3).unwrap();
            let t1 = partial_trace_first(&t, 2, 3).unwrap();
            prop_assert!((&t2 - &a.scale_complex(b.trace())).frobenius_norm() < 1e-12);
            prop_assert!((&t1 - &b.scale_complex(a.trace())).frobenius_norm() < 1e-12);
        }

        /// Partial traces are trace-preserving.
        #[test]
        fn partial_trace_preserves_trace(seed in 0u64..1000) {
            let mut r = rng(seed);
            let x = random_gaussian_matrix(6, 6, &mut r);
            let full = x.trace();
            let t2 = partial_trace_second(&x, 2, 3).unwrap().trace();
            let t1 = partial_trace_first(&x, 2, 3).unwrap().trace();
            prop_assert!((full - t2).norm() < 1e-12);
            prop_assert!((full - t1).norm() < 1e-12);
        }

        /// Operator norm is unitarily invariant.
        #[test]
        fn operator_norm_is_unitarily_invariant(seed in 0u64..1000) {
            let mut r = rng(seed);
            let a = random_gaussian_matrix(3, 3, &mut r);
            let u = random_unitary(3, &mut r);
            let v = random_unitary(3, &mut r);
            let rotated = &(&u * &a) * &v;
            let diff = (a.operator_norm().unwrap() - rotated.operator_norm().unwrap()).abs();
            prop_assert!(diff < 1e-10 * a.operator_norm().unwrap().max(1.0));
        }

        /// Positive and negative parts are PSD, orthogonal, and reassemble the input.
        #[test]
        fn sign_split_invariants(seed in 0u64..1000) {
            let mut r = rng(seed);
            let g = random_gaussian_matrix(4, 4, &mut r);
            let h = HermitianMatrix::new(ComplexMatrix::from_dmatrix(
                (g.as_dmatrix() + g.as_dmatrix().adjoint()).map(|z| z * 0.5),
            ).unwrap()).unwrap();
            let (p, n) = positive_negative_parts(&h).unwrap();
            let scale = h.operator_norm().unwrap().max(1.0);
            prop_assert!(p.lambda_min().unwrap() >= -1e-12 * scale);
            prop_assert!(n.lambda_min().unwrap() >= -1e-12 * scale);
            let recon = p.matrix() - n.matrix();
            prop_assert!((&recon - h.matrix()).frobenius_norm() < 1e-10 * scale);
            prop_assert!((p.matrix() * n.matrix()).frobenius_norm() < 1e-9 * scale * scale);
        }

        /// (A ⊗ B)(x ⊗ y) = (Ax) ⊗ (By) on basis-expanded vectors.
        #[test]
        fn tensor_product_acts_factorwise(seed in 0u64..1000) {
            let mut r = rng(seed);
            let a = random_gaussian_matrix(2, 2, &mut r);
            let b = random_gaussian_matrix(2, 2, &mut r);
            let x = random_gaussian_matrix(2, 1, &mut r);
            let y = random_gaussian_matrix(2, 1, &mut r);
            let lhs = &tensor_product(&a, &b) * &tensor_product(&x, &y);
            let rhs = tensor_product(&(&a * &x), &(&b * &y));
            prop_assert!((&lhs - &rhs).frobenius_norm() < 1e-12);
        }
    }
}
