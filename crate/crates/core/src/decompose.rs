//! Decompositions of a Hermitian map into differences of completely positive maps.
//!
//! Two constructions are provided. The Jordan split takes positive and negative
//! spectral parts of the Choi matrix, giving the unique pair with orthogonal
//! supports; the norm of the negative part is exactly the distance from complete
//! positivity. The block-diagonal split uses `d = ||C||` and the pair
//! `C_1 = (dI + C)/2`, `C_2 = (dI - C)/2`, whose sum is `d I`: the Choi matrix of
//! `d tr(.) I`, a block-diagonal (indeed diagonal) matrix, so both parts are CP
//! and the sum applied to the identity has norm exactly `m d`.

use crate::linalg::{positive_negative_parts, ComplexMatrix, HermitianMatrix};
use crate::map::{HermitianMap, PositivityStatus};
use crate::{tol, Error, Result};

/// Which construction produced a [`CpPair`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DecompositionMethod {
    Jordan,
    BlockDiagonal,
}

impl DecompositionMethod {
    pub fn label(&self) -> &'static str {
        match self {
            DecompositionMethod::Jordan => "JORDAN",
            DecompositionMethod::BlockDiagonal => "BLOCK_DIAGONAL",
        }
    }
}

/// Pair of completely positive maps with `Φ = plus - minus`.
#[derive(Clone, Debug)]
pub struct CpPair {
    pub plus: HermitianMap,
    pub minus: HermitianMap,
    pub method: DecompositionMethod,
    /// The shift `d = ||C||` used by the block-diagonal construction.
    pub d_used: Option<f64>,
    /// Operator norm of `C - (C_plus - C_minus)`; the reconstruction defect.
    pub residual: f64,
}

fn reconstruction_residual(phi: &HermitianMap, pair_diff: &HermitianMatrix) -> Result<f64> {
    (phi.choi() - pair_diff).operator_norm()
}

/// Spectral sign split of the Choi matrix: `plus` and `minus` have orthogonal
/// supports and `||C_minus|| = d(Φ)` exactly (near-null directions are folded
/// into the positive part).
pub fn jordan_decompose(phi: &HermitianMap) -> Result<CpPair> {
    let (p, n) = positive_negative_parts(phi.choi())?;
    let diff = &p - &n;
    let residual = reconstruction_residual(phi, &diff)?;
    Ok(CpPair {
        plus: HermitianMap::from_choi(phi.input_dim(), phi.output_dim(), p)?,
        minus: HermitianMap::from_choi(phi.input_dim(), phi.output_dim(), n)?,
        method: DecompositionMethod::Jordan,
        d_used: None,
        residual,
    })
}

/// Shift split at `d = ||C||`: both `(dI ± C)/2` are PSD because `dI` dominates
/// `±C`, and their sum `dI` is the Choi matrix of `d tr(.) I`. Off-diagonal
/// entries of the two parts cancel exactly in floating point.
pub fn block_diagonal_decompose(phi: &HermitianMap) -> Result<CpPair> {
    let d = phi.choi().operator_norm()?;
    let side = phi.choi().dim();
    let build = |sign: f64| -> HermitianMatrix {
        let m = ComplexMatrix::from_fn(side, side, |i, j| {
            let half = phi.choi().entry(i, j) * (0.5 * sign);
            if i == j {
                half + 0.5 * d
            } else {
                half
            }
        })
        .expect("entries stay finite");
        HermitianMatrix::wrap(m)
    };
    let c1 = build(1.0);
    let c2 = build(-1.0);
    let diff = &c1 - &c2;
    let residual = reconstruction_residual(phi, &diff)?;
    Ok(CpPair {
        plus: HermitianMap::from_choi(phi.input_dim(), phi.output_dim(), c1)?,
        minus: HermitianMap::from_choi(phi.input_dim(), phi.output_dim(), c2)?,
        method: DecompositionMethod::BlockDiagonal,
        d_used: Some(d),
        residual,
    })
}

/// Whether a square matrix on `C^blocks ⊗ C^block_size` has all off-diagonal
/// blocks below the exactness tolerance.
pub fn is_block_diagonal(
    c: &HermitianMatrix,
    blocks: usize,
    block_size: usize,
) -> Result<bool> {
    if blocks == 0 || block_size == 0 {
        return Err(Error::InvalidArgument("block layout must be positive".into()));
    }
    if c.dim() != blocks * block_size {
        return Err(Error::DimensionMismatch {
            context: "block layout",
            expected: blocks * block_size,
            got: c.dim(),
        });
    }
    for j in 0..blocks {
        for k in 0..blocks {
            if j == k {
                continue;
            }
            for a in 0..block_size {
                for b in 0..block_size {
                    if c.entry(j * block_size + a, k * block_size + b).norm()
                        > tol::BLOCK_DIAG_TOL
                    {
                        return Ok(false);
                    }
                }
            }
        }
    }
    Ok(true)
}

/// For maps with block-diagonal Choi matrices, positivity is equivalent to
/// complete positivity, and both reduce to each diagonal block `Φ(E_jj)` being
/// PSD. Requires a block-diagonal Choi matrix and evidence not refuting
/// positivity; a genuinely negative block contradicts the hypothesis and is
/// flagged as an error carrying the block index.
pub fn block_diagonal_positive_check(
    phi: &HermitianMap,
    evidence: &PositivityStatus,
) -> Result<bool> {
    if evidence.is_not_positive() {
        return Err(Error::NotPositiveEvidence);
    }
    if !is_block_diagonal(phi.choi(), phi.input_dim(), phi.output_dim())? {
        return Err(Error::InvalidArgument(
            "Choi matrix is not block-diagonal".into(),
        ));
    }
    let slack = phi.psd_slack()?;
    for j in 0..phi.input_dim() {
        let block = HermitianMatrix::new(phi.choi_block(j, j))?;
        let lambda_min = block.lambda_min()?;
        if lambda_min < -slack {
            return Err(Error::NegativeDiagonalBlock {
                index: j,
                lambda_min,
            });
        }
    }
    Ok(true)
}

/// Norms relating a decomposition to the map it splits.
#[derive(Clone, Copy, Debug)]
pub struct NormComparison {
    /// `||Φ1(I) + Φ2(I)||`.
    pub sum_on_identity: f64,
    /// `m * ||Φ(I)||`; the reference scale for decompositions of positive maps.
    pub scaled_map_on_identity: f64,
    /// `m * ||C||`; equals `sum_on_identity` for the block-diagonal pair.
    pub scaled_choi_norm: f64,
}

/// Reports `||Φ1(I) + Φ2(I)||` next to its reference scales. Nothing is
/// asserted here: for positive maps the optimal decomposition satisfies
/// `||Φ1(I) + Φ2(I)|| <= m ||Φ(I)||`, and these numbers let a caller see where
/// a concrete pair stands.
pub fn norm_comparison(phi: &HermitianMap, pair: &CpPair) -> Result<NormComparison> {
    let sum = pair.plus.add(&pair.minus)?;
    let m = phi.input_dim() as f64;
    Ok(NormComparison {
        sum_on_identity: sum.apply_identity()?.operator_norm()?,
        scaled_map_on_identity: m * phi.apply_identity()?.operator_norm()?,
        scaled_choi_norm: m * phi.choi().operator_norm()?,
    })
}
